//! Upper and lower bounds on the concavity deficit and the tail estimates
//! they rely on.

mod gaussian;
mod lower;
mod report;
mod tail;
mod upper;

pub use gaussian::{gaussian_entropy_tail, gaussian_entropy_tail_1d, gaussian_norm_tail, gaussian_norm_tail_1d};
pub(crate) use lower::profile_entropy;
pub use lower::{
    c_tilde, counting_bound, deficit_lower, deficit_lower_eps, k_phi, varentropy, well_spaced_sum_bound,
    SPACING_CONSTANT,
};
pub use report::{BoundKind, BoundReport, Precondition};
pub use tail::{
    chebyshev_anchor, log_concave_constants, log_concave_tail, log_concave_tail_for, ls93_step,
    strong_lc_tail_dominates, TailKind, TailModel,
};
pub use upper::{deficit_upper_tv, mixture_tv_spread};
