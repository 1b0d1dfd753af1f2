//! Animation expressions.
//!
//! An [`Anim`] is an immutable tree. Static composition (`Seq2`, `Par2`,
//! `IfThenElse`) keeps every child visible to the analyzers in
//! [`crate::inspect`]; `Bind` hides its continuation behind a host function
//! and is therefore runnable but not inspectable.

use std::borrow::Cow;
use std::fmt;
use std::ops::Add;
use std::sync::Arc;

use thiserror::Error;

use crate::document::{Document, PropertyPath, Value};
use crate::exec::{ExecError, StepOutcome};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("kind mismatch in {context}: expected {expected}, found {found}")]
    KindMismatch {
        context: &'static str,
        expected: ResultKind,
        found: ResultKind,
    },
    #[error("invalid duration {0}: must be finite and non-negative")]
    InvalidSeconds(f64),
    #[error("invalid target {0}: must be finite")]
    NonFiniteTarget(f64),
    #[error("custom operation name must not be empty")]
    EmptyOpName,
}

/// A non-negative, finite span of time in seconds.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Seconds(f64);

impl Seconds {
    pub const ZERO: Seconds = Seconds(0.0);

    pub fn new(s: f64) -> Result<Seconds, DslError> {
        if s.is_finite() && s >= 0.0 {
            // normalizes -0.0
            Ok(Seconds(s + 0.0))
        } else {
            Err(DslError::InvalidSeconds(s))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn max(self, other: Seconds) -> Seconds {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }

    /// `self - other`, clamped at zero.
    pub fn saturating_sub(self, other: Seconds) -> Seconds {
        Seconds((self.0 - other.0).max(0.0))
    }
}

impl Add for Seconds {
    type Output = Seconds;

    fn add(self, rhs: Seconds) -> Seconds {
        Seconds(self.0 + rhs.0)
    }
}

impl fmt::Display for Seconds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// The value a tween moves toward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target(f64);

impl Target {
    pub fn new(v: f64) -> Result<Target, DslError> {
        if v.is_finite() {
            Ok(Target(v))
        } else {
            Err(DslError::NonFiniteTarget(v))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResultKind {
    Unit,
    Number,
    Boolean,
}

impl fmt::Display for ResultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResultKind::Unit => "unit",
            ResultKind::Number => "number",
            ResultKind::Boolean => "boolean",
        })
    }
}

/// What a finished animation yields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResultValue {
    Unit,
    Number(f64),
    Boolean(bool),
}

impl ResultValue {
    pub fn kind(&self) -> ResultKind {
        match self {
            ResultValue::Unit => ResultKind::Unit,
            ResultValue::Number(_) => ResultKind::Number,
            ResultValue::Boolean(_) => ResultKind::Boolean,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            ResultValue::Unit => serde_json::Value::Null,
            ResultValue::Number(x) => serde_json::Number::from_f64(*x)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            ResultValue::Boolean(b) => serde_json::Value::Bool(*b),
        }
    }
}

type CombineFn = dyn Fn(ResultValue, ResultValue) -> ResultValue + Send + Sync;

/// A pure binary function on result values, with declared kinds.
///
/// An input kind of `None` accepts any kind.
#[derive(Clone)]
pub struct Combine {
    name: Cow<'static, str>,
    inputs: [Option<ResultKind>; 2],
    output: ResultKind,
    f: Arc<CombineFn>,
}

impl Combine {
    pub fn new<F>(
        name: impl Into<Cow<'static, str>>,
        inputs: [Option<ResultKind>; 2],
        output: ResultKind,
        f: F,
    ) -> Combine
    where
        F: Fn(ResultValue, ResultValue) -> ResultValue + Send + Sync + 'static,
    {
        Combine {
            name: name.into(),
            inputs,
            output,
            f: Arc::new(f),
        }
    }

    /// Discards both results and yields unit.
    pub fn ignore() -> Combine {
        Combine::new("ignore", [None, None], ResultKind::Unit, |_, _| ResultValue::Unit)
    }

    /// Keeps the right-hand result.
    pub fn right(kind: ResultKind) -> Combine {
        Combine::new("right", [None, Some(kind)], kind, |_, b| b)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn output(&self) -> ResultKind {
        self.output
    }

    pub fn apply(&self, a: ResultValue, b: ResultValue) -> ResultValue {
        (self.f)(a, b)
    }

    fn check(&self, context: &'static str, a: ResultKind, b: ResultKind) -> Result<(), DslError> {
        for (want, got) in self.inputs.iter().zip([a, b]) {
            if let Some(want) = *want {
                if want != got {
                    return Err(DslError::KindMismatch {
                        context,
                        expected: want,
                        found: got,
                    });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Combine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

type ContinuationFn = dyn Fn(ResultValue) -> Anim + Send + Sync;

/// The host function behind a `Bind` node.
#[derive(Clone)]
pub struct Continuation {
    output: ResultKind,
    f: Arc<ContinuationFn>,
}

impl Continuation {
    pub fn output(&self) -> ResultKind {
        self.output
    }

    pub fn call(&self, v: ResultValue) -> Anim {
        (self.f)(v)
    }
}

impl fmt::Debug for Continuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<continuation -> {}>", self.output)
    }
}

type CustomStepFn = dyn Fn(&Document, Seconds) -> Result<StepOutcome, ExecError> + Send + Sync;

/// A user-supplied operation with run-time behaviour and optional
/// inspection metadata.
#[derive(Clone)]
pub struct CustomOp {
    name: String,
    step: Arc<CustomStepFn>,
    duration: Option<Seconds>,
    max_duration: Option<Seconds>,
}

impl CustomOp {
    /// Without metadata the op runs but the analyzers reject it.
    pub fn new<F>(name: impl Into<String>, step: F) -> Result<CustomOp, DslError>
    where
        F: Fn(&Document, Seconds) -> Result<StepOutcome, ExecError> + Send + Sync + 'static,
    {
        let name = name.into();
        if name.is_empty() {
            return Err(DslError::EmptyOpName);
        }
        Ok(CustomOp {
            name,
            step: Arc::new(step),
            duration: None,
            max_duration: None,
        })
    }

    /// Declares the exact duration; the maximum defaults to it.
    pub fn with_duration(mut self, d: Seconds) -> CustomOp {
        self.duration = Some(d);
        self
    }

    pub fn with_max_duration(mut self, d: Seconds) -> CustomOp {
        self.max_duration = Some(d);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn duration_meta(&self) -> Option<Seconds> {
        self.duration
    }

    pub fn max_duration_meta(&self) -> Option<Seconds> {
        self.max_duration.or(self.duration)
    }

    pub(crate) fn run_step(&self, doc: &Document, dt: Seconds) -> Result<StepOutcome, ExecError> {
        (self.step)(doc, dt)
    }
}

impl fmt::Debug for CustomOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "custom:{}", self.name)
    }
}

#[derive(Debug)]
pub enum Node {
    LinearTo {
        path: PropertyPath,
        dur: Seconds,
        target: Target,
    },
    SetValue {
        path: PropertyPath,
        value: Value,
    },
    GetValue {
        path: PropertyPath,
        kind: ResultKind,
    },
    Delay(Seconds),
    Pure(ResultValue),
    Seq2 {
        first: Anim,
        second: Anim,
        combine: Combine,
    },
    Par2 {
        left: Anim,
        right: Anim,
        combine: Combine,
    },
    IfThenElse {
        cond: Anim,
        then_branch: Anim,
        else_branch: Anim,
    },
    Bind {
        first: Anim,
        cont: Continuation,
    },
    Custom(CustomOp),
}

/// An animation expression. Cheap to clone; children are shared.
#[derive(Clone)]
pub struct Anim {
    node: Arc<Node>,
    kind: ResultKind,
}

impl fmt::Debug for Anim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.node, f)
    }
}

impl Anim {
    fn from_node(node: Node, kind: ResultKind) -> Anim {
        Anim {
            node: Arc::new(node),
            kind,
        }
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn kind(&self) -> ResultKind {
        self.kind
    }

    /// Statically visible children, in index order. A `Bind` exposes only
    /// its first animation.
    pub fn children(&self) -> Vec<&Anim> {
        match &*self.node {
            Node::Seq2 { first, second, .. } => vec![first, second],
            Node::Par2 { left, right, .. } => vec![left, right],
            Node::IfThenElse {
                cond,
                then_branch,
                else_branch,
            } => vec![cond, then_branch, else_branch],
            Node::Bind { first, .. } => vec![first],
            _ => Vec::new(),
        }
    }

    /// Follows child indices from this node.
    pub fn node_at(&self, path: &[usize]) -> Option<&Anim> {
        path.iter().try_fold(self, |at, &i| at.children().get(i).copied())
    }

    /// Node-for-node equality. Host functions compare by name
    /// (combines, custom ops) or by identity (continuations).
    pub fn structurally_eq(&self, other: &Anim) -> bool {
        if Arc::ptr_eq(&self.node, &other.node) {
            return true;
        }
        if self.kind != other.kind {
            return false;
        }
        use Node::*;
        match (&*self.node, &*other.node) {
            (
                LinearTo { path, dur, target },
                LinearTo {
                    path: p2,
                    dur: d2,
                    target: t2,
                },
            ) => path == p2 && dur == d2 && target == t2,
            (SetValue { path, value }, SetValue { path: p2, value: v2 }) => path == p2 && value == v2,
            (GetValue { path, kind }, GetValue { path: p2, kind: k2 }) => path == p2 && kind == k2,
            (Delay(a), Delay(b)) => a == b,
            (Pure(a), Pure(b)) => a == b,
            (
                Seq2 {
                    first,
                    second,
                    combine,
                },
                Seq2 {
                    first: f2,
                    second: s2,
                    combine: c2,
                },
            ) => combine.name == c2.name && first.structurally_eq(f2) && second.structurally_eq(s2),
            (
                Par2 { left, right, combine },
                Par2 {
                    left: l2,
                    right: r2,
                    combine: c2,
                },
            ) => combine.name == c2.name && left.structurally_eq(l2) && right.structurally_eq(r2),
            (
                IfThenElse {
                    cond,
                    then_branch,
                    else_branch,
                },
                IfThenElse {
                    cond: c2,
                    then_branch: t2,
                    else_branch: e2,
                },
            ) => {
                cond.structurally_eq(c2) && then_branch.structurally_eq(t2) && else_branch.structurally_eq(e2)
            }
            (Bind { first, cont }, Bind { first: f2, cont: k2 }) => {
                Arc::ptr_eq(&cont.f, &k2.f) && first.structurally_eq(f2)
            }
            (Custom(a), Custom(b)) => a.name == b.name,
            _ => false,
        }
    }
}

pub fn linear_to(path: PropertyPath, dur: Seconds, target: Target) -> Anim {
    Anim::from_node(Node::LinearTo { path, dur, target }, ResultKind::Unit)
}

/// Instantaneously writes `value` at `path`.
pub fn set_value(path: PropertyPath, value: Value) -> Anim {
    Anim::from_node(Node::SetValue { path, value }, ResultKind::Unit)
}

/// Instantaneously reads the leaf at `path`. `kind` is the expected leaf
/// kind (number or boolean); a different leaf is a run-time type mismatch.
pub fn get_value(path: PropertyPath, kind: ResultKind) -> Result<Anim, DslError> {
    if kind == ResultKind::Unit {
        return Err(DslError::KindMismatch {
            context: "get_value",
            expected: ResultKind::Number,
            found: ResultKind::Unit,
        });
    }
    Ok(Anim::from_node(Node::GetValue { path, kind }, kind))
}

pub fn get_number(path: PropertyPath) -> Anim {
    Anim::from_node(
        Node::GetValue {
            path,
            kind: ResultKind::Number,
        },
        ResultKind::Number,
    )
}

pub fn get_flag(path: PropertyPath) -> Anim {
    Anim::from_node(
        Node::GetValue {
            path,
            kind: ResultKind::Boolean,
        },
        ResultKind::Boolean,
    )
}

pub fn delay(dur: Seconds) -> Anim {
    Anim::from_node(Node::Delay(dur), ResultKind::Unit)
}

pub fn pure(v: ResultValue) -> Anim {
    Anim::from_node(Node::Pure(v), v.kind())
}

pub fn unit() -> Anim {
    pure(ResultValue::Unit)
}

/// Runs `a`, then `b`, combining their results.
pub fn map2(combine: Combine, a: Anim, b: Anim) -> Result<Anim, DslError> {
    combine.check("map2", a.kind, b.kind)?;
    let kind = combine.output;
    Ok(Anim::from_node(
        Node::Seq2 {
            first: a,
            second: b,
            combine,
        },
        kind,
    ))
}

/// Runs `a` and `b` at the same time, combining their results.
pub fn lift_p2(combine: Combine, a: Anim, b: Anim) -> Result<Anim, DslError> {
    combine.check("lift_p2", a.kind, b.kind)?;
    let kind = combine.output;
    Ok(Anim::from_node(
        Node::Par2 {
            left: a,
            right: b,
            combine,
        },
        kind,
    ))
}

pub fn sequential(a: Anim, b: Anim) -> Anim {
    map2(Combine::ignore(), a, b).expect("ignore accepts any kinds")
}

pub fn parallel(a: Anim, b: Anim) -> Anim {
    lift_p2(Combine::ignore(), a, b).expect("ignore accepts any kinds")
}

/// Left fold with [`sequential`]; `None` for an empty input.
pub fn sequence_all(anims: impl IntoIterator<Item = Anim>) -> Option<Anim> {
    anims.into_iter().reduce(sequential)
}

/// Left fold with [`parallel`]; `None` for an empty input.
pub fn parallel_all(anims: impl IntoIterator<Item = Anim>) -> Option<Anim> {
    anims.into_iter().reduce(parallel)
}

pub fn if_then_else(cond: Anim, then_branch: Anim, else_branch: Anim) -> Result<Anim, DslError> {
    if cond.kind != ResultKind::Boolean {
        return Err(DslError::KindMismatch {
            context: "if_then_else condition",
            expected: ResultKind::Boolean,
            found: cond.kind,
        });
    }
    if then_branch.kind != else_branch.kind {
        return Err(DslError::KindMismatch {
            context: "if_then_else branches",
            expected: then_branch.kind,
            found: else_branch.kind,
        });
    }
    let kind = then_branch.kind;
    Ok(Anim::from_node(
        Node::IfThenElse {
            cond,
            then_branch,
            else_branch,
        },
        kind,
    ))
}

/// Dynamic sequencing: the continuation builds the next animation from the
/// first one's result. `output` is the kind every continuation result must
/// have; it is checked when the continuation runs.
pub fn bind<F>(a: Anim, output: ResultKind, cont: F) -> Anim
where
    F: Fn(ResultValue) -> Anim + Send + Sync + 'static,
{
    Anim::from_node(
        Node::Bind {
            first: a,
            cont: Continuation {
                output,
                f: Arc::new(cont),
            },
        },
        output,
    )
}

pub fn custom(op: CustomOp) -> Anim {
    Anim::from_node(Node::Custom(op), ResultKind::Unit)
}
