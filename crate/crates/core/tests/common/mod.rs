//! Shared fixtures: a random animation model with a brute-force duration
//! oracle, frame partitions and scenario-pack loading.
#![allow(dead_code)]

use std::path::PathBuf;

use microanim::prelude::*;
use proptest::prelude::*;
use serde_json::{json, Map};

pub const PATH_COUNT: usize = 8;
pub const FLAG_COUNT: u32 = 3;

pub fn tween(path: &str, d: f64, to: f64) -> Anim {
    linear_to(
        PropertyPath::parse(path).unwrap(),
        Seconds::new(d).unwrap(),
        Target::new(to).unwrap(),
    )
}

/// Plain-data mirror of an animation tree.
#[derive(Debug, Clone)]
pub enum Model {
    Tween {
        path: usize,
        dur: f64,
        to: f64,
    },
    Set {
        path: usize,
        value: f64,
    },
    Delay(f64),
    /// Reads `k` and tweens `path` for that many seconds.
    BindTween {
        path: usize,
    },
    Seq(Box<Model>, Box<Model>),
    Par(Box<Model>, Box<Model>),
    If {
        flag: u32,
        then: Box<Model>,
        otherwise: Box<Model>,
    },
}

fn path(i: usize) -> PropertyPath {
    PropertyPath::parse(&format!("p{i}")).unwrap()
}

impl Model {
    pub fn build(&self) -> Anim {
        match self {
            Model::Tween { path: p, dur, to } => {
                linear_to(path(*p), Seconds::new(*dur).unwrap(), Target::new(*to).unwrap())
            }
            Model::Set { path: p, value } => set_value(path(*p), Value::number(*value).unwrap()),
            Model::Delay(d) => delay(Seconds::new(*d).unwrap()),
            Model::BindTween { path: p } => {
                let lens = path(*p);
                bind(
                    get_number(PropertyPath::parse("k").unwrap()),
                    ResultKind::Unit,
                    move |v| match v {
                        ResultValue::Number(k) => linear_to(
                            lens.clone(),
                            Seconds::new(k.abs()).unwrap(),
                            Target::new(-5.0).unwrap(),
                        ),
                        _ => unreachable!("get_number yields numbers"),
                    },
                )
            }
            Model::Seq(a, b) => sequential(a.build(), b.build()),
            Model::Par(a, b) => parallel(a.build(), b.build()),
            Model::If {
                flag,
                then,
                otherwise,
            } => if_then_else(
                get_flag(PropertyPath::parse(&format!("c{flag}")).unwrap()),
                then.build(),
                otherwise.build(),
            )
            .unwrap(),
        }
    }

    /// Exact duration by direct fold; `None` when it depends on runtime data.
    pub fn duration_oracle(&self) -> Option<f64> {
        match self {
            Model::Tween { dur, .. } | Model::Delay(dur) => Some(*dur),
            Model::Set { .. } => Some(0.0),
            Model::BindTween { .. } | Model::If { .. } => None,
            Model::Seq(a, b) => Some(a.duration_oracle()? + b.duration_oracle()?),
            Model::Par(a, b) => Some(a.duration_oracle()?.max(b.duration_oracle()?)),
        }
    }

    /// Upper bound over both branches of every conditional.
    pub fn max_duration_oracle(&self) -> f64 {
        match self {
            Model::Tween { dur, .. } | Model::Delay(dur) => *dur,
            Model::Set { .. } => 0.0,
            Model::BindTween { .. } => panic!("no static bound for a bind"),
            Model::Seq(a, b) => a.max_duration_oracle() + b.max_duration_oracle(),
            Model::Par(a, b) => a.max_duration_oracle().max(b.max_duration_oracle()),
            Model::If { then, otherwise, .. } => {
                then.max_duration_oracle().max(otherwise.max_duration_oracle())
            }
        }
    }
}

/// Initial document: numeric leaves `p0..p7`, flags `c0..c2` taken from the
/// bits of `flags`, and `k` for bind-driven durations.
pub fn model_document(flags: u32) -> Document {
    let mut root = Map::new();
    for i in 0..PATH_COUNT {
        root.insert(format!("p{i}"), json!(i as f64 * 3.0));
    }
    for f in 0..FLAG_COUNT {
        root.insert(format!("c{f}"), json!(flags & (1 << f) != 0));
    }
    root.insert("k".into(), json!(0.75));
    Document::from_json(&serde_json::Value::Object(root)).unwrap()
}

fn seconds() -> impl Strategy<Value = f64> {
    prop_oneof![
        1 => Just(0.0),
        3 => (0u32..=16).prop_map(|k| f64::from(k) * 0.125),
        3 => 0.0f64..2.0,
    ]
}

fn leaf(lo: usize, hi: usize, binds: bool) -> BoxedStrategy<Model> {
    let tween =
        (lo..hi, seconds(), -100.0f64..100.0).prop_map(|(path, dur, to)| Model::Tween { path, dur, to });
    let set = (lo..hi, -100.0f64..100.0).prop_map(|(path, value)| Model::Set { path, value });
    let delay = seconds().prop_map(Model::Delay);
    if binds {
        prop_oneof![4 => tween, 2 => set, 2 => delay, 1 => (lo..hi).prop_map(|path| Model::BindTween { path })].boxed()
    } else {
        prop_oneof![4 => tween, 2 => set, 2 => delay].boxed()
    }
}

/// Parallel branches get disjoint halves of the leaf pool, so no two
/// concurrently running nodes ever write the same leaf.
fn tree_in(lo: usize, hi: usize, depth: u32, ifs: bool, binds: bool) -> BoxedStrategy<Model> {
    let leaf = leaf(lo, hi, binds);
    if depth == 0 {
        return leaf;
    }
    let sub = tree_in(lo, hi, depth - 1, ifs, binds);
    let seq = (sub.clone(), sub.clone()).prop_map(|(a, b)| Model::Seq(a.into(), b.into()));
    let par = if hi - lo >= 2 {
        let mid = (lo + hi) / 2;
        (
            tree_in(lo, mid, depth - 1, ifs, binds),
            tree_in(mid, hi, depth - 1, ifs, binds),
        )
            .prop_map(|(a, b)| Model::Par(a.into(), b.into()))
            .boxed()
    } else {
        seq.clone().boxed()
    };
    if ifs {
        let cond = (0..FLAG_COUNT, sub.clone(), sub).prop_map(|(flag, t, e)| Model::If {
            flag,
            then: t.into(),
            otherwise: e.into(),
        });
        prop_oneof![2 => leaf, 2 => seq, 2 => par, 1 => cond].boxed()
    } else {
        prop_oneof![2 => leaf, 2 => seq, 2 => par].boxed()
    }
}

pub fn tree(depth: u32, ifs: bool, binds: bool) -> BoxedStrategy<Model> {
    tree_in(0, PATH_COUNT, depth, ifs, binds)
}

/// A total time and a non-negative partition of it (zeros included).
pub fn partition() -> impl Strategy<Value = (f64, Vec<f64>)> {
    let total = prop_oneof![(0u32..=48).prop_map(|k| f64::from(k) * 0.125), 0.0f64..6.0];
    let weight = prop_oneof![1 => Just(0.0), 4 => 0.01f64..1.0];
    (total, proptest::collection::vec(weight, 1..8)).prop_map(|(total, weights)| {
        let sum: f64 = weights.iter().sum();
        let deltas = if sum > 0.0 {
            weights.iter().map(|w| total * w / sum).collect()
        } else {
            vec![total]
        };
        (total, deltas)
    })
}

/// Steps through `deltas`, stopping once the animation finishes; unused
/// deltas are added to the leftover.
pub fn step_through(anim: &Anim, doc: &Document, deltas: &[f64]) -> Result<StepOutcome, String> {
    let mut anim = anim.clone();
    let mut doc = doc.clone();
    for (i, dt) in deltas.iter().enumerate() {
        let out = step(&anim, &doc, *dt).map_err(|e| e.to_string())?;
        match out.progress {
            Progress::Remainder(rest) => {
                anim = rest;
                doc = out.next_state;
            }
            Progress::Done(result) => {
                let unused: f64 = deltas[i + 1..].iter().sum();
                let leftover = out.leftover.map_or(0.0, Seconds::get) + unused;
                return Ok(StepOutcome::done(
                    out.next_state,
                    result,
                    Seconds::new(leftover).unwrap(),
                ));
            }
        }
    }
    Ok(StepOutcome::remainder(doc, anim))
}

pub fn json_close(a: &serde_json::Value, b: &serde_json::Value, tol: f64) -> bool {
    use serde_json::Value as J;
    match (a, b) {
        (J::Number(x), J::Number(y)) => (x.as_f64().unwrap() - y.as_f64().unwrap()).abs() <= tol,
        (J::Object(x), J::Object(y)) => {
            x.len() == y.len()
                && x.iter()
                    .all(|(k, v)| y.get(k).is_some_and(|w| json_close(v, w, tol)))
        }
        _ => a == b,
    }
}

/// Same state and progress; remainders are compared by what they do when
/// run to completion.
pub fn compare_outcomes(x: &StepOutcome, y: &StepOutcome, tol: f64) -> Result<(), String> {
    let (sx, sy) = (x.next_state.to_json(), y.next_state.to_json());
    if !json_close(&sx, &sy, tol) {
        return Err(format!("states differ: {sx} vs {sy}"));
    }
    match (&x.progress, &y.progress) {
        (Progress::Done(a), Progress::Done(b)) => {
            if !json_close(&a.to_json(), &b.to_json(), tol) {
                return Err(format!("results differ: {a:?} vs {b:?}"));
            }
            let (lx, ly) = (
                x.leftover.map_or(0.0, Seconds::get),
                y.leftover.map_or(0.0, Seconds::get),
            );
            if (lx - ly).abs() > tol {
                return Err(format!("leftovers differ: {lx} vs {ly}"));
            }
            Ok(())
        }
        (Progress::Remainder(a), Progress::Remainder(b)) => {
            let fa = step(a, &x.next_state, 100.0).map_err(|e| e.to_string())?;
            let fb = step(b, &y.next_state, 100.0).map_err(|e| e.to_string())?;
            if !fa.progress.is_done() || !fb.progress.is_done() {
                return Err("remainder did not finish within 100 s".into());
            }
            compare_outcomes(&fa, &fb, tol)
        }
        (a, b) => Err(format!(
            "progress differs: done={} vs done={}",
            a.is_done(),
            b.is_done()
        )),
    }
}

pub fn pack_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios"))
}

pub fn pack_path(name: &str) -> PathBuf {
    pack_dir().join(format!("{name}.json"))
}

pub fn load_pack(name: &str) -> Scenario {
    let bytes = std::fs::read(pack_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    load_scenario(&bytes).unwrap_or_else(|e| panic!("{name}: {e}"))
}
