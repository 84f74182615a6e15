// Every numeric threshold lives here so the other crates never hard-code one.

pub const SYMMETRY: f64 = 1e-10;
pub const LYAP_RESIDUAL: f64 = 1e-9;
pub const PINV_IDENTITY: f64 = 1e-10;
pub const PR_MARGIN: f64 = -1e-9;
/// Grid points closer than this to an imaginary-axis pole are skipped.
pub const POLE_PROXIMITY: f64 = 1e-6;
/// |Re λ| at or below this counts as "on the imaginary axis".
pub const AXIS_POLE_RE: f64 = 1e-9;
/// Kalman rank tests: singular values below this times the largest are zero.
pub const RANK_REL: f64 = 1e-8;

pub const PR_GRID_LO: f64 = 1e-3;
pub const PR_GRID_HI: f64 = 1e4;
pub const PR_GRID_POINTS: usize = 400;
