//! Relative sequencing: start a second animation at a signed offset from
//! the statically computed end of the first.

use thiserror::Error;

use crate::dsl::{delay, parallel, sequential, Anim, Seconds};
use crate::inspect::{self, InspectError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("cannot schedule relative to an uninspectable animation: {0}")]
    Inspect(#[from] InspectError),
    #[error("relative start {start} is before time zero (duration {duration}, offset {offset})")]
    NegativeStart { duration: f64, offset: f64, start: f64 },
    #[error("offset {0} is not finite")]
    NonFiniteOffset(f64),
}

/// Plays `b` starting `offset` seconds after the end of `a` (negative
/// offsets overlap `a`'s tail). The end of `a` is its exact duration.
pub fn rel_sequential(a: &Anim, b: &Anim, offset: f64) -> Result<Anim, ScheduleError> {
    let end = inspect::duration(a)?;
    join(a, b, end, offset)
}

/// Like [`rel_sequential`], measuring the end of `a` by its maximum
/// duration, so `a` may contain conditionals.
pub fn rel_max_sequential(a: &Anim, b: &Anim, offset: f64) -> Result<Anim, ScheduleError> {
    let end = inspect::max_duration(a)?;
    join(a, b, end.0, offset)
}

fn join(a: &Anim, b: &Anim, end: Seconds, offset: f64) -> Result<Anim, ScheduleError> {
    if !offset.is_finite() {
        return Err(ScheduleError::NonFiniteOffset(offset));
    }
    let start = end.get() + offset;
    let start = Seconds::new(start).map_err(|_| ScheduleError::NegativeStart {
        duration: end.get(),
        offset,
        start,
    })?;
    Ok(parallel(a.clone(), sequential(delay(start), b.clone())))
}
