//! Pipeline behind the `logitkit` binary: report documents rendered as
//! aligned text or JSON, and the validation battery.

pub mod format;
pub mod report;
pub mod validate;

pub const EXIT_OK: i32 = 0;
/// Unreadable or invalid input, usage errors, failed fits.
pub const EXIT_INPUT: i32 = 1;
/// Report printed, but the fit is separated.
pub const EXIT_SEPARATION: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
