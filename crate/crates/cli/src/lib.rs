//! Parameter sweeps, figure presets and closed-form cross-checks for the
//! accelerated two-qubit model.

pub mod presets;
pub mod spec;
pub mod sweep;
pub mod verify;

pub use presets::{figure_preset, UnknownPreset, PRESET_NAMES};
pub use spec::{parse_spec, Method, ParseError, Quantity, Range, SweepArgs, SweepSpec};
pub use sweep::{emit_csv, format_value, run_sweep, SweepTable};
pub use verify::{verify, CheckRecord, VerificationReport};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const VERIFICATION: i32 = 2;
    pub const IO: i32 = 3;
}
