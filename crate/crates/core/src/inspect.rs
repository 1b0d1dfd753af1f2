//! Static duration analysis.
//!
//! Both analyzers are structural folds over the expression tree and never
//! call the host functions embedded in it.

use std::fmt;

use thiserror::Error;

use crate::dsl::{Anim, Node, Seconds};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InspectErrorKind {
    /// A `Bind` continuation hides what runs next.
    DynamicBind,
    /// Exact duration is undefined for a conditional; `max_duration` handles it.
    ConditionalInExactMode,
    /// A custom operation without the needed metadata.
    OpaqueCustomOp(String),
}

impl fmt::Display for InspectErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InspectErrorKind::DynamicBind => f.write_str("DynamicBind"),
            InspectErrorKind::ConditionalInExactMode => f.write_str("ConditionalInExactMode"),
            InspectErrorKind::OpaqueCustomOp(name) => write!(f, "OpaqueCustomOp({name})"),
        }
    }
}

/// Names the offending node by child indices from the root
/// (see [`Anim::node_at`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at node {}", format_node_path(.path_to_node))]
pub struct InspectError {
    pub kind: InspectErrorKind,
    pub path_to_node: Vec<usize>,
}

impl InspectError {
    pub fn node_path_string(&self) -> String {
        format_node_path(&self.path_to_node)
    }
}

fn format_node_path(path: &[usize]) -> String {
    if path.is_empty() {
        "/".to_owned()
    } else {
        path.iter().map(|i| format!("/{i}")).collect()
    }
}

/// An upper bound on running time over all branch choices.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MaxDuration(pub Seconds);

impl MaxDuration {
    pub fn get(self) -> f64 {
        self.0.get()
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Exact,
    Max,
}

/// Exact running time of `a`.
pub fn duration(a: &Anim) -> Result<Seconds, InspectError> {
    fold(a, Mode::Exact, &mut Vec::new())
}

/// Running time of `a` assuming every conditional takes its longer branch.
pub fn max_duration(a: &Anim) -> Result<MaxDuration, InspectError> {
    fold(a, Mode::Max, &mut Vec::new()).map(MaxDuration)
}

fn fold(a: &Anim, mode: Mode, at: &mut Vec<usize>) -> Result<Seconds, InspectError> {
    let fail = |kind, at: &Vec<usize>| {
        Err(InspectError {
            kind,
            path_to_node: at.clone(),
        })
    };
    match a.node() {
        Node::LinearTo { dur, .. } | Node::Delay(dur) => Ok(*dur),
        Node::SetValue { .. } | Node::GetValue { .. } | Node::Pure(_) => Ok(Seconds::ZERO),
        Node::Seq2 { first, second, .. } => {
            let x = child(first, 0, mode, at)?;
            let y = child(second, 1, mode, at)?;
            Ok(x + y)
        }
        Node::Par2 { left, right, .. } => {
            let x = child(left, 0, mode, at)?;
            let y = child(right, 1, mode, at)?;
            Ok(x.max(y))
        }
        Node::IfThenElse {
            cond,
            then_branch,
            else_branch,
        } => match mode {
            Mode::Exact => fail(InspectErrorKind::ConditionalInExactMode, at),
            Mode::Max => {
                let c = child(cond, 0, mode, at)?;
                let t = child(then_branch, 1, mode, at)?;
                let e = child(else_branch, 2, mode, at)?;
                Ok(c + t.max(e))
            }
        },
        Node::Bind { .. } => fail(InspectErrorKind::DynamicBind, at),
        Node::Custom(op) => {
            let meta = match mode {
                Mode::Exact => op.duration_meta(),
                Mode::Max => op.max_duration_meta(),
            };
            match meta {
                Some(d) => Ok(d),
                None => fail(InspectErrorKind::OpaqueCustomOp(op.name().to_owned()), at),
            }
        }
    }
}

fn child(a: &Anim, index: usize, mode: Mode, at: &mut Vec<usize>) -> Result<Seconds, InspectError> {
    at.push(index);
    let r = fold(a, mode, at);
    at.pop();
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::{PropertyPath, Value};
    use crate::dsl::*;
    use crate::exec::StepOutcome;

    fn p(s: &str) -> PropertyPath {
        PropertyPath::parse(s).unwrap()
    }

    fn secs(s: f64) -> Seconds {
        Seconds::new(s).unwrap()
    }

    fn tween(path: &str, d: f64, to: f64) -> Anim {
        linear_to(p(path), secs(d), Target::new(to).unwrap())
    }

    #[test]
    fn sum_and_max_rules() {
        let a = parallel(sequential(delay(secs(1.0)), delay(secs(2.0))), delay(secs(1.5)));
        assert_eq!(duration(&a).unwrap().get(), 3.0);
        assert_eq!(max_duration(&a).unwrap().get(), 3.0);
    }

    #[test]
    fn instantaneous_nodes_cost_nothing() {
        assert_eq!(
            duration(&set_value(p("a"), Value::text("green"))).unwrap(),
            Seconds::ZERO
        );
        assert_eq!(duration(&get_number(p("x"))).unwrap(), Seconds::ZERO);
        assert_eq!(duration(&unit()).unwrap(), Seconds::ZERO);
        assert_eq!(duration(&tween("x", 0.0, 1.0)).unwrap(), Seconds::ZERO);
    }

    #[test]
    fn bind_is_not_inspectable() {
        let complicated = bind(get_number(p("v")), ResultKind::Unit, |v| match v {
            ResultValue::Number(d) => tween("x", d.max(0.0), 10.0),
            _ => unit(),
        });
        let tree = sequential(tween("x", 1.0, 0.0), complicated);
        let err = duration(&tree).unwrap_err();
        assert_eq!(err.kind, InspectErrorKind::DynamicBind);
        assert_eq!(err.path_to_node, vec![1]);
        assert!(matches!(
            tree.node_at(&err.path_to_node).unwrap().node(),
            Node::Bind { .. }
        ));
        assert_eq!(
            max_duration(&tree).unwrap_err().kind,
            InspectErrorKind::DynamicBind
        );
        assert_eq!(err.to_string(), "DynamicBind at node /1");
    }

    #[test]
    fn conditional_needs_max_mode() {
        let ite = if_then_else(
            get_flag(p("c")),
            sequential(tween("a", 0.5, 1.0), tween("b", 0.5, 1.0)),
            tween("b", 0.5, 0.0),
        )
        .unwrap();
        let tree = parallel(delay(secs(0.1)), ite);
        let err = duration(&tree).unwrap_err();
        assert_eq!(err.kind, InspectErrorKind::ConditionalInExactMode);
        assert_eq!(err.path_to_node, vec![1]);
        assert_eq!(max_duration(&tree).unwrap().get(), 1.0);
    }

    #[test]
    fn conditional_adds_condition_time() {
        let cond = map2(
            Combine::right(ResultKind::Boolean),
            delay(secs(0.25)),
            get_flag(p("c")),
        )
        .unwrap();
        let ite = if_then_else(cond, tween("a", 1.0, 1.0), tween("a", 2.0, 1.0)).unwrap();
        assert_eq!(max_duration(&ite).unwrap().get(), 2.25);
    }

    #[test]
    fn custom_metadata() {
        let noop = |d: &crate::document::Document, dt: Seconds| {
            Ok(StepOutcome::done(d.clone(), ResultValue::Unit, dt))
        };
        let opaque = custom(CustomOp::new("morph", noop).unwrap());
        let err = duration(&sequential(unit(), opaque.clone())).unwrap_err();
        assert_eq!(err.kind, InspectErrorKind::OpaqueCustomOp("morph".into()));
        assert_eq!(err.path_to_node, vec![1]);
        assert_eq!(
            max_duration(&opaque).unwrap_err().kind,
            InspectErrorKind::OpaqueCustomOp("morph".into())
        );

        let setlike = custom(CustomOp::new("set", noop).unwrap().with_duration(Seconds::ZERO));
        assert_eq!(duration(&setlike).unwrap(), Seconds::ZERO);
        assert_eq!(max_duration(&setlike).unwrap().get(), 0.0);

        let bounded = custom(
            CustomOp::new("wobble", noop)
                .unwrap()
                .with_max_duration(secs(0.7)),
        );
        assert!(duration(&bounded).is_err());
        assert_eq!(max_duration(&bounded).unwrap().get(), 0.7);
    }

    #[test]
    fn first_offender_in_preorder() {
        let noop = |d: &crate::document::Document, dt: Seconds| {
            Ok(StepOutcome::done(d.clone(), ResultValue::Unit, dt))
        };
        let tree = sequential(
            parallel(unit(), custom(CustomOp::new("a", noop).unwrap())),
            bind(unit(), ResultKind::Unit, |_| unit()),
        );
        let err = duration(&tree).unwrap_err();
        assert_eq!(err.path_to_node, vec![0, 1]);
        assert_eq!(err.node_path_string(), "/0/1");
    }
}
