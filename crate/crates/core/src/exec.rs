//! Delta-time stepping.
//!
//! [`step`] advances an animation by one frame delta and returns the next
//! state, either the remaining animation or its result, and any time the
//! animation did not need. [`run`] and [`run_fps`] fold `step` over frames.

use std::io::{self, Write};

use thiserror::Error;

use crate::document::{Document, DocumentError, Value};
use crate::dsl::{pure, Anim, Node, ResultKind, ResultValue, Seconds};

/// Remaining durations at or below this are treated as finished, so that
/// frame deltas which sum to a duration only up to rounding still complete
/// it.
pub const TIME_EPSILON: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecError {
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("time delta {0} is negative")]
    NegativeDelta(f64),
    #[error("time delta {0} is not finite")]
    NonFiniteDelta(f64),
    #[error("custom operation `{name}` broke the step contract: {reason}")]
    CustomOpContract { name: String, reason: String },
    #[error("custom operation `{name}` failed: {message}")]
    CustomOpFailed { name: String, message: String },
    #[error("{context} produced a {found} result where {expected} was declared")]
    KindViolation {
        context: &'static str,
        expected: ResultKind,
        found: ResultKind,
    },
    #[error("fps must be positive and finite, got {0}")]
    InvalidFps(f64),
}

#[derive(Debug, Clone)]
pub enum Progress {
    Remainder(Anim),
    Done(ResultValue),
}

impl Progress {
    pub fn is_done(&self) -> bool {
        matches!(self, Progress::Done(_))
    }
}

/// One frame's result. `leftover` is `None` exactly when the animation
/// still has a remainder.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub next_state: Document,
    pub progress: Progress,
    pub leftover: Option<Seconds>,
}

impl StepOutcome {
    pub fn done(next_state: Document, result: ResultValue, leftover: Seconds) -> StepOutcome {
        StepOutcome {
            next_state,
            progress: Progress::Done(result),
            leftover: Some(leftover),
        }
    }

    pub fn remainder(next_state: Document, rest: Anim) -> StepOutcome {
        StepOutcome {
            next_state,
            progress: Progress::Remainder(rest),
            leftover: None,
        }
    }
}

/// Internal step result; the state is threaded by value.
enum Stepped {
    Remainder(Anim),
    Done(ResultValue, f64),
}

/// Advances `anim` by `dt` seconds starting from `doc`.
pub fn step(anim: &Anim, doc: &Document, dt: f64) -> Result<StepOutcome, ExecError> {
    let dt = check_delta(dt)?;
    let mut state = doc.clone();
    let progress = step_node(anim, &mut state, dt.get())?;
    Ok(match progress {
        Stepped::Remainder(rest) => StepOutcome::remainder(state, rest),
        Stepped::Done(v, left) => StepOutcome::done(state, v, Seconds::new(left).expect("leftover is valid")),
    })
}

fn check_delta(dt: f64) -> Result<Seconds, ExecError> {
    if !dt.is_finite() {
        Err(ExecError::NonFiniteDelta(dt))
    } else if dt < 0.0 {
        Err(ExecError::NegativeDelta(dt))
    } else {
        Ok(Seconds::new(dt).expect("checked"))
    }
}

/// Shared time accounting of tweens and delays. Returns the leftover when
/// the span finishes within `dt`, otherwise the remaining duration.
fn consume(dur: f64, dt: f64) -> Result<f64, f64> {
    let rest = dur - dt;
    if rest <= TIME_EPSILON {
        Ok((dt - dur).max(0.0))
    } else {
        Err(rest)
    }
}

fn step_node(anim: &Anim, state: &mut Document, dt: f64) -> Result<Stepped, ExecError> {
    match anim.node() {
        Node::LinearTo { path, dur, target } => {
            let cur = state.resolve_number(path)?;
            match consume(dur.get(), dt) {
                Ok(left) => {
                    // assigned, not accumulated: the endpoint is exact
                    state.write_in_place(path, number(target.get())?)?;
                    Ok(Stepped::Done(ResultValue::Unit, left))
                }
                Err(rest) => {
                    let next = cur + (target.get() - cur) * (dt / dur.get());
                    state.write_in_place(path, number(next)?)?;
                    Ok(Stepped::Remainder(crate::dsl::linear_to(
                        path.clone(),
                        Seconds::new(rest).expect("rest is positive"),
                        *target,
                    )))
                }
            }
        }
        Node::SetValue { path, value } => {
            state.write_in_place(path, value.clone())?;
            Ok(Stepped::Done(ResultValue::Unit, dt))
        }
        Node::GetValue { path, kind } => {
            let leaf = state.resolve(path)?;
            let v = match (kind, leaf) {
                (ResultKind::Number, Value::Number(x)) => ResultValue::Number(x.get()),
                (ResultKind::Boolean, Value::Boolean(b)) => ResultValue::Boolean(*b),
                (kind, leaf) => {
                    return Err(DocumentError::TypeMismatch {
                        path: path.to_string(),
                        expected: match kind {
                            ResultKind::Boolean => "boolean",
                            _ => "number",
                        },
                        found: leaf.kind_name(),
                    }
                    .into())
                }
            };
            Ok(Stepped::Done(v, dt))
        }
        Node::Delay(dur) => Ok(match consume(dur.get(), dt) {
            Ok(left) => Stepped::Done(ResultValue::Unit, left),
            Err(rest) => Stepped::Remainder(crate::dsl::delay(Seconds::new(rest).expect("rest is positive"))),
        }),
        Node::Pure(v) => Ok(Stepped::Done(*v, dt)),
        Node::Seq2 {
            first,
            second,
            combine,
        } => match step_node(first, state, dt)? {
            Stepped::Remainder(rest) => Ok(Stepped::Remainder(rebuild_seq(rest, second.clone(), combine))),
            Stepped::Done(x, left) => match step_node(second, state, left)? {
                Stepped::Done(y, left) => Ok(Stepped::Done(
                    checked(combine.apply(x, y), combine.output(), "combine function")?,
                    left,
                )),
                Stepped::Remainder(rest) => Ok(Stepped::Remainder(rebuild_seq(pure(x), rest, combine))),
            },
        },
        Node::Par2 { left, right, combine } => {
            let a = step_node(left, state, dt)?;
            let b = step_node(right, state, dt)?;
            Ok(match (a, b) {
                (Stepped::Done(x, la), Stepped::Done(y, lb)) => Stepped::Done(
                    checked(combine.apply(x, y), combine.output(), "combine function")?,
                    la.min(lb),
                ),
                (Stepped::Done(x, _), Stepped::Remainder(rb)) => {
                    Stepped::Remainder(rebuild_par(pure(x), rb, combine))
                }
                (Stepped::Remainder(ra), Stepped::Done(y, _)) => {
                    Stepped::Remainder(rebuild_par(ra, pure(y), combine))
                }
                (Stepped::Remainder(ra), Stepped::Remainder(rb)) => {
                    Stepped::Remainder(rebuild_par(ra, rb, combine))
                }
            })
        }
        Node::IfThenElse {
            cond,
            then_branch,
            else_branch,
        } => match step_node(cond, state, dt)? {
            Stepped::Remainder(rest) => Ok(Stepped::Remainder(
                crate::dsl::if_then_else(rest, then_branch.clone(), else_branch.clone())
                    .expect("kinds unchanged"),
            )),
            Stepped::Done(ResultValue::Boolean(b), left) => {
                step_node(if b { then_branch } else { else_branch }, state, left)
            }
            Stepped::Done(other, _) => Err(ExecError::KindViolation {
                context: "condition",
                expected: ResultKind::Boolean,
                found: other.kind(),
            }),
        },
        Node::Bind { first, cont } => match step_node(first, state, dt)? {
            Stepped::Remainder(rest) => {
                let cont = cont.clone();
                Ok(Stepped::Remainder(crate::dsl::bind(
                    rest,
                    cont.output(),
                    move |v| cont.call(v),
                )))
            }
            Stepped::Done(x, left) => {
                let next = cont.call(x);
                if next.kind() != cont.output() {
                    return Err(ExecError::KindViolation {
                        context: "bind continuation",
                        expected: cont.output(),
                        found: next.kind(),
                    });
                }
                step_node(&next, state, left)
            }
        },
        Node::Custom(op) => {
            let supplied = Seconds::new(dt).expect("validated delta");
            let out = op.run_step(state, supplied)?;
            validate_custom(op.name(), &out, dt)?;
            *state = out.next_state;
            Ok(match out.progress {
                Progress::Remainder(rest) => Stepped::Remainder(rest),
                Progress::Done(v) => Stepped::Done(v, out.leftover.expect("validated").get()),
            })
        }
    }
}

fn number(x: f64) -> Result<Value, DocumentError> {
    Value::number(x)
}

fn checked(v: ResultValue, expected: ResultKind, context: &'static str) -> Result<ResultValue, ExecError> {
    if v.kind() == expected {
        Ok(v)
    } else {
        Err(ExecError::KindViolation {
            context,
            expected,
            found: v.kind(),
        })
    }
}

fn rebuild_seq(first: Anim, second: Anim, combine: &crate::dsl::Combine) -> Anim {
    crate::dsl::map2(combine.clone(), first, second).expect("kinds unchanged")
}

fn rebuild_par(left: Anim, right: Anim, combine: &crate::dsl::Combine) -> Anim {
    crate::dsl::lift_p2(combine.clone(), left, right).expect("kinds unchanged")
}

fn validate_custom(name: &str, out: &StepOutcome, dt: f64) -> Result<(), ExecError> {
    let fail = |reason: String| {
        Err(ExecError::CustomOpContract {
            name: name.to_owned(),
            reason,
        })
    };
    match (&out.progress, out.leftover) {
        (Progress::Remainder(_), Some(l)) => {
            fail(format!("returned a remainder together with leftover time {l}"))
        }
        (Progress::Remainder(rest), None) if rest.kind() != ResultKind::Unit => {
            fail(format!("remainder has kind {}, expected unit", rest.kind()))
        }
        (Progress::Remainder(_), None) => Ok(()),
        (Progress::Done(_), None) => fail("finished without reporting leftover time".into()),
        (Progress::Done(v), _) if v.kind() != ResultKind::Unit => {
            fail(format!("finished with a {} result, expected unit", v.kind()))
        }
        (Progress::Done(_), Some(l)) if l.get() > dt => {
            fail(format!("reported leftover {l} exceeding the supplied delta {dt}"))
        }
        (Progress::Done(_), Some(_)) => Ok(()),
    }
}

#[derive(Debug, Clone)]
pub struct Frame {
    /// Supplied time since the start of the run, at the end of this frame.
    pub t: f64,
    pub state: Document,
}

#[derive(Debug, Clone)]
pub enum Terminal {
    /// `consumed` is the animation time actually used.
    Completed { result: ResultValue, consumed: f64 },
    /// All supplied time (`consumed`) was used and `remainder` is left.
    OutOfTime { remainder: Anim, consumed: f64 },
}

#[derive(Debug, Clone)]
pub struct FrameTrace {
    pub frames: Vec<Frame>,
    pub terminal: Terminal,
}

impl FrameTrace {
    pub fn is_completed(&self) -> bool {
        matches!(self.terminal, Terminal::Completed { .. })
    }

    pub fn final_state(&self) -> Option<&Document> {
        self.frames.last().map(|f| &f.state)
    }

    /// Writes one JSON object per frame, then the terminal line.
    pub fn write_json_lines(&self, out: &mut impl Write) -> io::Result<()> {
        for frame in &self.frames {
            let line = serde_json::json!({ "t": frame.t, "state": frame.state.to_json() });
            writeln!(out, "{line}")?;
        }
        let terminal = match &self.terminal {
            Terminal::Completed { result, consumed } => serde_json::json!({
                "done": true,
                "result": result.to_json(),
                "consumed": consumed,
            }),
            Terminal::OutOfTime { consumed, .. } => serde_json::json!({
                "done": false,
                "result": null,
                "consumed": consumed,
            }),
        };
        writeln!(out, "{terminal}")
    }
}

/// Steps `anim` once per delta, snapshotting the state after each frame.
/// Stops at completion; unused time in the final frame is discarded.
/// Zero-length frames share a timestamp with the previous frame and
/// replace its snapshot.
pub fn run(
    anim: &Anim,
    doc: &Document,
    frame_deltas: impl IntoIterator<Item = f64>,
) -> Result<FrameTrace, ExecError> {
    run_timed(anim, doc, frame_deltas.into_iter().map(|dt| (dt, None)))
}

/// `run` with uniform deltas of `1/fps` for at most `max_time` seconds.
pub fn run_fps(anim: &Anim, doc: &Document, fps: f64, max_time: Seconds) -> Result<FrameTrace, ExecError> {
    if !(fps.is_finite() && fps > 0.0) {
        return Err(ExecError::InvalidFps(fps));
    }
    let dt = 1.0 / fps;
    let frames = (max_time.get() * fps + 1e-9).floor() as u64;
    run_timed(anim, doc, (1..=frames).map(move |k| (dt, Some(k as f64 / fps))))
}

fn run_timed(
    anim: &Anim,
    doc: &Document,
    deltas: impl Iterator<Item = (f64, Option<f64>)>,
) -> Result<FrameTrace, ExecError> {
    let mut frames: Vec<Frame> = Vec::new();
    let mut current = anim.clone();
    let mut state = doc.clone();
    let mut elapsed = 0.0;
    for (dt, stamp) in deltas {
        let out = step(&current, &state, dt)?;
        let before = elapsed;
        elapsed = stamp.unwrap_or(elapsed + dt);
        state = out.next_state;
        match frames.last_mut() {
            Some(last) if last.t == elapsed => last.state = state.clone(),
            _ => frames.push(Frame {
                t: elapsed,
                state: state.clone(),
            }),
        }
        match out.progress {
            Progress::Done(result) => {
                let left = out.leftover.map_or(0.0, Seconds::get);
                return Ok(FrameTrace {
                    frames,
                    terminal: Terminal::Completed {
                        result,
                        consumed: before + (dt - left),
                    },
                });
            }
            Progress::Remainder(rest) => current = rest,
        }
    }
    Ok(FrameTrace {
        frames,
        terminal: Terminal::OutOfTime {
            remainder: current,
            consumed: elapsed,
        },
    })
}
