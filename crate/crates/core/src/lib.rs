//! Composable micro-animations.
//!
//! Animations are expression trees ([`dsl::Anim`]) built from linear tweens,
//! instantaneous state edits, and sequential, parallel and conditional
//! composition. [`exec`] steps them against a [`document::Document`] by
//! frame deltas; [`inspect`] computes their duration without running them;
//! [`schedule`] uses that to start one animation relative to the end of
//! another.
//!
//! ```
//! use microanim::prelude::*;
//!
//! let x = PropertyPath::parse("x").unwrap();
//! let y = PropertyPath::parse("y").unwrap();
//! let right = linear_to(x, Seconds::new(1.0).unwrap(), Target::new(50.0).unwrap());
//! let up = linear_to(y, Seconds::new(1.0).unwrap(), Target::new(50.0).unwrap());
//! let both = parallel(right, up);
//! assert_eq!(duration(&both).unwrap().get(), 1.0);
//!
//! let doc = Document::from_json_str(r#"{"x": 0, "y": 0}"#).unwrap();
//! let out = step(&both, &doc, 0.5).unwrap();
//! assert_eq!(out.next_state.to_json()["x"], 25.0);
//! ```

pub mod cli;
pub mod document;
pub mod dsl;
pub mod exec;
pub mod inspect;
pub mod schedule;
pub mod script;

pub mod prelude {
    pub use crate::document::{Document, DocumentError, PropertyPath, Value};
    pub use crate::dsl::{
        bind, custom, delay, get_flag, get_number, get_value, if_then_else, lift_p2, linear_to, map2,
        parallel, pure, sequential, set_value, unit, Anim, Combine, CustomOp, DslError, ResultKind,
        ResultValue, Seconds, Target,
    };
    pub use crate::exec::{run, run_fps, step, ExecError, FrameTrace, Progress, StepOutcome, Terminal};
    pub use crate::inspect::{duration, max_duration, InspectError, InspectErrorKind, MaxDuration};
    pub use crate::schedule::{rel_max_sequential, rel_sequential, ScheduleError};
    pub use crate::script::{load_scenario, Scenario, ScriptError, ScriptNode};
}
