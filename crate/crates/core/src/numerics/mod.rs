//! Shared numerical machinery: special functions, adaptive quadrature and
//! seeded Monte Carlo.

pub mod mc;
pub mod quadrature;
pub mod special;

use serde::{Deserialize, Serialize};

pub use mc::{mc_expectation, McRng, McSpec, Sampler};
pub use quadrature::{integrate_1d, integrate_2d, integrate_points, QuadratureSpec};
pub use special::{
    erf, erfc, ln_gamma, log_sum_exp, reg_upper_gamma, std_normal_cdf, std_normal_sf,
    unit_ball_volume,
};

/// How an [`Estimate`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    MonteCarlo { seed: u64, samples: u64 },
    ClosedForm,
}

/// A numeric value with an error bar.
///
/// For quadrature `error` is the integrator's error bound, for Monte Carlo it
/// is the standard error `sd/√n`, for closed forms it is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub method: Method,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0, method: Method::ClosedForm }
    }

    pub fn quadrature(value: f64, error: f64) -> Self {
        Estimate { value, error: error.abs(), method: Method::Quadrature }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }

    /// Affine combination `a·self + b·other` with errors added in absolute value.
    pub fn combine(self, a: f64, other: Estimate, b: f64) -> Estimate {
        Estimate {
            value: a * self.value + b * other.value,
            error: a.abs() * self.error + b.abs() * other.error,
            method: merge_method(self.method, other.method),
        }
    }

    pub fn scale(self, a: f64) -> Estimate {
        Estimate { value: a * self.value, error: a.abs() * self.error, method: self.method }
    }

    pub fn shift(self, c: f64) -> Estimate {
        Estimate { value: self.value + c, ..self }
    }
}

fn merge_method(a: Method, b: Method) -> Method {
    match (a, b) {
        (Method::ClosedForm, m) | (m, Method::ClosedForm) => m,
        (Method::MonteCarlo { .. }, _) => a,
        (_, Method::MonteCarlo { .. }) => b,
        _ => Method::Quadrature,
    }
}

/// Sums a list of estimates, adding their errors.
pub fn sum_estimates<I: IntoIterator<Item = Estimate>>(it: I) -> Estimate {
    it.into_iter().fold(Estimate::exact(0.0), |acc, e| acc.combine(1.0, e, 1.0))
}
