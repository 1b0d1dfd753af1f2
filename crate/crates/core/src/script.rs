//! Serialized scenarios: an initial document plus an animation script.
//!
//! Scripts cover the statically composed fragment of the DSL. There is no
//! serialized `bind`; conditionals use a small closed predicate language so
//! every script stays at least max-duration inspectable.
//!
//! ```json
//! {
//!   "name": "menuIntro",
//!   "state": { "menu": { "width": 0 }, "obscuringBox": { "alpha": 0 } },
//!   "animation": { "par": [
//!     { "linearTo": { "path": "menu.width", "for": 0.5, "to": 75 } },
//!     { "linearTo": { "path": "obscuringBox.alpha", "for": 0.5, "to": 0.65 } }
//!   ] }
//! }
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::document::{Document, DocumentError, PropertyPath, Value};
use crate::dsl::{self, Anim, Combine, DslError, ResultKind, ResultValue, Seconds, Target};
use crate::schedule::{self, ScheduleError};

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum ScriptNode {
    LinearTo(LinearToSpec),
    Set(SetSpec),
    Delay(f64),
    Seq(Vec<ScriptNode>),
    Par(Vec<ScriptNode>),
    If(Box<IfSpec>),
    RelSeq(Box<RelSpec>),
    RelMaxSeq(Box<RelSpec>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearToSpec {
    pub path: String,
    #[serde(rename = "for")]
    pub duration: f64,
    pub to: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    pub path: String,
    pub value: Leaf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfSpec {
    pub cond: CondNode,
    #[serde(rename = "then")]
    pub then_branch: ScriptNode,
    #[serde(rename = "else")]
    pub else_branch: ScriptNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelSpec {
    pub first: ScriptNode,
    pub second: ScriptNode,
    pub offset: f64,
}

/// A leaf literal for `set`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Leaf {
    Boolean(bool),
    Number(f64),
    Text(String),
}

/// A comparison operand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Boolean(bool),
    Number(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum CondNode {
    Gt(String, f64),
    Lt(String, f64),
    Eq(String, Literal),
    Flag(String),
}

impl ScriptNode {
    pub fn compile(&self) -> Result<Anim, ScriptError> {
        Ok(match self {
            ScriptNode::LinearTo(spec) => dsl::linear_to(
                PropertyPath::parse(&spec.path)?,
                Seconds::new(spec.duration)?,
                Target::new(spec.to)?,
            ),
            ScriptNode::Set(spec) => {
                let value = match &spec.value {
                    Leaf::Boolean(b) => Value::Boolean(*b),
                    Leaf::Number(x) => Value::number(*x)?,
                    Leaf::Text(s) => Value::Text(s.clone()),
                };
                dsl::set_value(PropertyPath::parse(&spec.path)?, value)
            }
            ScriptNode::Delay(s) => dsl::delay(Seconds::new(*s)?),
            ScriptNode::Seq(items) => dsl::sequence_all(compile_all(items)?)
                .ok_or_else(|| ScriptError::Invalid("`seq` needs at least one element".into()))?,
            ScriptNode::Par(items) => dsl::parallel_all(compile_all(items)?)
                .ok_or_else(|| ScriptError::Invalid("`par` needs at least one element".into()))?,
            ScriptNode::If(spec) => dsl::if_then_else(
                spec.cond.compile()?,
                spec.then_branch.compile()?,
                spec.else_branch.compile()?,
            )?,
            ScriptNode::RelSeq(spec) => {
                schedule::rel_sequential(&spec.first.compile()?, &spec.second.compile()?, spec.offset)?
            }
            ScriptNode::RelMaxSeq(spec) => {
                schedule::rel_max_sequential(&spec.first.compile()?, &spec.second.compile()?, spec.offset)?
            }
        })
    }
}

fn compile_all(items: &[ScriptNode]) -> Result<Vec<Anim>, ScriptError> {
    items.iter().map(ScriptNode::compile).collect()
}

impl CondNode {
    /// A zero-duration read followed by a pure comparison.
    pub fn compile(&self) -> Result<Anim, ScriptError> {
        let (path, literal, name): (&str, Literal, &'static str) = match self {
            CondNode::Flag(path) => return Ok(dsl::get_flag(PropertyPath::parse(path)?)),
            CondNode::Gt(path, x) => (path, Literal::Number(*x), "gt"),
            CondNode::Lt(path, x) => (path, Literal::Number(*x), "lt"),
            CondNode::Eq(path, lit) => (path, lit.clone(), "eq"),
        };
        let path = PropertyPath::parse(path)?;
        let (read, rhs, kind) = match literal {
            Literal::Number(x) => {
                if !x.is_finite() {
                    return Err(ScriptError::Invalid(format!(
                        "comparison literal {x} is not finite"
                    )));
                }
                (dsl::get_number(path), ResultValue::Number(x), ResultKind::Number)
            }
            Literal::Boolean(b) => (dsl::get_flag(path), ResultValue::Boolean(b), ResultKind::Boolean),
        };
        let compare = Combine::new(
            name,
            [Some(kind), Some(kind)],
            ResultKind::Boolean,
            move |a, b| {
                let holds = match (a, b) {
                    (ResultValue::Number(x), ResultValue::Number(y)) => match name {
                        "gt" => x > y,
                        "lt" => x < y,
                        _ => x == y,
                    },
                    (ResultValue::Boolean(x), ResultValue::Boolean(y)) => x == y,
                    _ => false,
                };
                ResultValue::Boolean(holds)
            },
        );
        Ok(dsl::map2(compare, read, dsl::pure(rhs))?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub state: serde_json::Value,
    pub animation: ScriptNode,
}

/// A loaded, kind-checked scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub state: Document,
    pub script: ScriptNode,
    pub animation: Anim,
}

pub fn parse_script(text: &str) -> Result<ScriptNode, ScriptError> {
    serde_json::from_str(text).map_err(parse_error)
}

pub fn to_json_string(node: &ScriptNode) -> String {
    serde_json::to_string(node).expect("script nodes serialize")
}

/// Parses and compiles a scenario. Relative sequencing is resolved here, so
/// inspection failures surface before anything runs.
pub fn load_scenario(bytes: &[u8]) -> Result<Scenario, ScriptError> {
    let file: ScenarioFile = serde_json::from_slice(bytes).map_err(parse_error)?;
    let state = Document::from_json(&file.state)?;
    let animation = file.animation.compile()?;
    Ok(Scenario {
        name: file.name,
        description: file.description,
        state,
        script: file.animation,
        animation,
    })
}

fn parse_error(e: serde_json::Error) -> ScriptError {
    ScriptError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inspect::{duration, max_duration, InspectErrorKind};
    use proptest::prelude::*;

    const MENU_INTRO: &str = r#"{
        "name": "menuIntro",
        "state": {"menu": {"width": 0}, "obscuringBox": {"alpha": 0}},
        "animation": {"par": [
            {"linearTo": {"path": "menu.width", "for": 0.5, "to": 75}},
            {"linearTo": {"path": "obscuringBox.alpha", "for": 0.5, "to": 0.65}}
        ]}
    }"#;

    #[test]
    fn loads_and_inspects() {
        let sc = load_scenario(MENU_INTRO.as_bytes()).unwrap();
        assert_eq!(sc.name, "menuIntro");
        assert_eq!(duration(&sc.animation).unwrap().get(), 0.5);
    }

    #[test]
    fn unknown_tag_is_a_parse_error() {
        let text = MENU_INTRO.replacen("linearTo", "linerTo", 1);
        match load_scenario(text.as_bytes()).unwrap_err() {
            ScriptError::Parse { line, message, .. } => {
                assert!(message.contains("linerTo"), "{message}");
                assert_eq!(line, 5);
            }
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(load_scenario(b"{nope"), Err(ScriptError::Parse { .. })));
    }

    #[test]
    fn empty_lists_and_bad_values() {
        assert!(matches!(
            parse_script(r#"{"seq": []}"#).unwrap().compile(),
            Err(ScriptError::Invalid(_))
        ));
        assert!(matches!(
            parse_script(r#"{"par": []}"#).unwrap().compile(),
            Err(ScriptError::Invalid(_))
        ));
        assert!(matches!(
            parse_script(r#"{"delay": -1}"#).unwrap().compile(),
            Err(ScriptError::Dsl(_))
        ));
        assert!(matches!(
            parse_script(r#"{"linearTo": {"path": "a..b", "for": 1, "to": 0}}"#)
                .unwrap()
                .compile(),
            Err(ScriptError::Document(DocumentError::PathSyntax { .. }))
        ));
        assert!(parse_script(r#"{"linearTo": {"path": "a", "for": 1, "to": 0, "ease": 2}}"#).is_err());
    }

    #[test]
    fn conditionals() {
        let node = parse_script(
            r#"{"if": {"cond": {"gt": ["n", 0]},
                       "then": {"linearTo": {"path": "x", "for": 1, "to": 1}},
                       "else": {"delay": 0.5}}}"#,
        )
        .unwrap();
        let a = node.compile().unwrap();
        assert_eq!(
            duration(&a).unwrap_err().kind,
            InspectErrorKind::ConditionalInExactMode
        );
        assert_eq!(max_duration(&a).unwrap().get(), 1.0);

        for cond in [
            r#"{"flag": "on"}"#,
            r#"{"eq": ["on", true]}"#,
            r#"{"lt": ["n", 3]}"#,
            r#"{"eq": ["n", 1.5]}"#,
        ] {
            let c: CondNode = serde_json::from_str(cond).unwrap();
            let anim = c.compile().unwrap();
            assert_eq!(anim.kind(), ResultKind::Boolean);
            assert_eq!(duration(&anim).unwrap(), Seconds::ZERO);
        }
    }

    #[test]
    fn relative_nodes_resolve_at_load() {
        let node = parse_script(
            r#"{"relSeq": {"first": {"if": {"cond": {"flag": "c"}, "then": {"delay": 1}, "else": {"delay": 1}}},
                           "second": {"delay": 1}, "offset": -0.5}}"#,
        )
        .unwrap();
        assert!(matches!(node.compile(), Err(ScriptError::Schedule(_))));
        let text = to_json_string(&node).replace("relSeq", "relMaxSeq");
        let a = parse_script(&text).unwrap().compile().unwrap();
        assert_eq!(max_duration(&a).unwrap().get(), 1.5);
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![(-1000i32..1000).prop_map(|x| x as f64 / 8.0), -1e6f64..1e6]
    }

    fn path() -> impl Strategy<Value = String> {
        "[a-z]{1,4}(\\.[a-z]{1,4}){0,2}"
    }

    fn cond() -> impl Strategy<Value = CondNode> {
        prop_oneof![
            (path(), finite()).prop_map(|(p, x)| CondNode::Gt(p, x)),
            (path(), finite()).prop_map(|(p, x)| CondNode::Lt(p, x)),
            (path(), finite()).prop_map(|(p, x)| CondNode::Eq(p, Literal::Number(x))),
            (path(), any::<bool>()).prop_map(|(p, b)| CondNode::Eq(p, Literal::Boolean(b))),
            path().prop_map(CondNode::Flag),
        ]
    }

    fn script() -> impl Strategy<Value = ScriptNode> {
        let leaf = prop_oneof![
            (path(), 0.0f64..5.0, finite())
                .prop_map(|(path, duration, to)| ScriptNode::LinearTo(LinearToSpec { path, duration, to })),
            (
                path(),
                prop_oneof![
                    any::<bool>().prop_map(Leaf::Boolean),
                    finite().prop_map(Leaf::Number),
                    "[a-z ]{0,8}".prop_map(Leaf::Text),
                ]
            )
                .prop_map(|(path, value)| ScriptNode::Set(SetSpec { path, value })),
            (0.0f64..5.0).prop_map(ScriptNode::Delay),
        ];
        leaf.prop_recursive(4, 32, 4, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 1..4).prop_map(ScriptNode::Seq),
                prop::collection::vec(inner.clone(), 1..4).prop_map(ScriptNode::Par),
                (cond(), inner.clone(), inner.clone()).prop_map(|(cond, then_branch, else_branch)| {
                    ScriptNode::If(Box::new(IfSpec {
                        cond,
                        then_branch,
                        else_branch,
                    }))
                }),
                (inner.clone(), inner.clone(), finite()).prop_map(|(first, second, offset)| {
                    ScriptNode::RelSeq(Box::new(RelSpec {
                        first,
                        second,
                        offset,
                    }))
                }),
                (inner.clone(), inner, finite()).prop_map(|(first, second, offset)| {
                    ScriptNode::RelMaxSeq(Box::new(RelSpec {
                        first,
                        second,
                        offset,
                    }))
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn round_trip(node in script()) {
            let text = to_json_string(&node);
            let back = parse_script(&text).unwrap();
            prop_assert_eq!(&back, &node);
            prop_assert_eq!(to_json_string(&back), text);
        }
    }
}
