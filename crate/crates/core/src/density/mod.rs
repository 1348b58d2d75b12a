//! Component densities, mixtures and their exact quantities.
//!
//! A component is either an isotropic Gaussian or the law of `A W + b` for a
//! spherically symmetric base `W` with density `ψ(|w|)`.

mod affine;
mod mixture;
mod profile;
mod schema;
mod separation;

use std::f64::consts::PI;

pub use affine::AffineMap;
pub use mixture::MixtureModel;
pub(crate) use mixture::{integrate_domain, Domain};
pub use profile::{CustomProfile, RadialProfile};
pub use schema::{ComponentSpec, MixtureSpec};
pub use separation::{
    auto_certificate, certify, common_base, minimal_certificate, verify_separation, CommonBase,
    SeparationCertificate,
};

use crate::error::{Error, Result};
use crate::numerics::special::reg_upper_gamma;
use crate::numerics::McRng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, PartialEq)]
pub struct IsotropicGaussian {
    mean: Vec<f64>,
    sigma: f64,
}

impl IsotropicGaussian {
    pub fn new(mean: Vec<f64>, sigma: f64) -> Result<Self> {
        if mean.is_empty() {
            return Err(Error::input("Gaussian mean must have dimension >= 1"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::input(format!("Gaussian sigma must be positive, got {sigma}")));
        }
        if mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::input("Gaussian mean has non-finite entries"));
        }
        Ok(IsotropicGaussian { mean, sigma })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComponentDensity {
    Gaussian(IsotropicGaussian),
    Pushforward { profile: RadialProfile, map: AffineMap },
}

impl ComponentDensity {
    pub fn gaussian(mean: Vec<f64>, sigma: f64) -> Result<Self> {
        Ok(ComponentDensity::Gaussian(IsotropicGaussian::new(mean, sigma)?))
    }

    pub fn pushforward(profile: RadialProfile, map: AffineMap) -> Result<Self> {
        profile.validate()?;
        profile.check_dim(map.dim())?;
        Ok(ComponentDensity::Pushforward { profile, map })
    }

    pub fn dim(&self) -> usize {
        match self {
            ComponentDensity::Gaussian(g) => g.dim(),
            ComponentDensity::Pushforward { map, .. } => map.dim(),
        }
    }

    /// Location parameter: the Gaussian mean or the affine offset b.
    pub fn center(&self) -> &[f64] {
        match self {
            ComponentDensity::Gaussian(g) => g.mean(),
            ComponentDensity::Pushforward { map, .. } => map.offset(),
        }
    }

    /// ln f(z); `z` must have length `dim()`.
    #[inline]
    pub(crate) fn ln_pdf_unchecked(&self, z: &[f64]) -> f64 {
        match self {
            ComponentDensity::Gaussian(g) => {
                let d = g.dim() as f64;
                let s2 = g.sigma * g.sigma;
                let r2: f64 = z.iter().zip(&g.mean).map(|(a, b)| (a - b) * (a - b)).sum();
                -0.5 * r2 / s2 - 0.5 * d * (2.0 * PI * s2).ln()
            }
            ComponentDensity::Pushforward { profile, map } => {
                let r = map.inverse_norm(z);
                profile.ln_psi(r, map.dim()) - map.ln_abs_det()
            }
        }
    }

    pub fn log_pdf(&self, z: &[f64]) -> Result<f64> {
        if z.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: z.len() });
        }
        Ok(self.ln_pdf_unchecked(z))
    }

    /// The component as a (base profile, affine map) pair. A Gaussian
    /// N(μ, σ²I) becomes base N(0, σ²I) translated by μ.
    pub fn as_pushforward(&self) -> (RadialProfile, AffineMap) {
        match self {
            ComponentDensity::Gaussian(g) => {
                (RadialProfile::Gaussian { sigma: g.sigma }, AffineMap::translation(g.mean()))
            }
            ComponentDensity::Pushforward { profile, map } => (profile.clone(), map.clone()),
        }
    }

    /// Radius around `center()` outside of which the density is negligible.
    pub fn bounding_radius(&self) -> f64 {
        match self {
            ComponentDensity::Gaussian(g) => RadialProfile::Gaussian { sigma: g.sigma }.effective_radius(g.dim()),
            ComponentDensity::Pushforward { profile, map } => {
                map.singular_range().1 * profile.effective_radius(map.dim())
            }
        }
    }

    /// Compact support as an ellipse {z : |A⁻¹(z − b)| ≤ R}.
    pub(crate) fn support_ellipse(&self) -> Option<(&AffineMap, f64)> {
        match self {
            ComponentDensity::Pushforward { profile, map } => profile.support_radius().map(|r| (map, r)),
            _ => None,
        }
    }

    /// The same density shifted by `by`.
    pub fn translated(&self, by: &[f64]) -> Result<Self> {
        if by.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: by.len() });
        }
        let shift = |c: &[f64]| -> Vec<f64> { c.iter().zip(by).map(|(a, b)| a + b).collect() };
        match self {
            ComponentDensity::Gaussian(g) => ComponentDensity::gaussian(shift(g.mean()), g.sigma),
            ComponentDensity::Pushforward { profile, map } => {
                let offset = nalgebra::DVector::from_vec(shift(map.offset()));
                ComponentDensity::pushforward(profile.clone(), AffineMap::new(map.matrix().clone(), offset)?)
            }
        }
    }

    /// True for N(b, I) in any parametrization.
    pub fn is_unit_gaussian(&self) -> bool {
        match self {
            ComponentDensity::Gaussian(g) => g.sigma == 1.0,
            ComponentDensity::Pushforward { profile: RadialProfile::Gaussian { sigma }, map } => {
                // A W with W ~ N(0, σ²I) is N(0, I) iff σA is orthogonal.
                let (lo, hi) = map.singular_range();
                (lo * sigma - 1.0).abs() < 1e-12 && (hi * sigma - 1.0).abs() < 1e-12
            }
            _ => false,
        }
    }

    pub fn sample(&self, rng: &mut McRng, out: &mut [f64]) {
        match self {
            ComponentDensity::Gaussian(g) => {
                for (x, m) in out.iter_mut().zip(&g.mean) {
                    let z: f64 = StandardNormal.sample(rng);
                    *x = m + g.sigma * z;
                }
            }
            ComponentDensity::Pushforward { profile, map } => {
                let mut w = vec![0.0; map.dim()];
                profile.sample(rng, &mut w);
                out.copy_from_slice(&map.apply(&w));
            }
        }
    }
}

/// Differential entropy h(f_i) in nats.
///
/// Gaussian: `(d/2) ln(2πeσ²)`. Pushforward: `h(W) + ln|det A|`; fails with
/// `Unsupported` when the base entropy is not known (see
/// [`crate::oracle::attach_profile_entropy`]).
pub fn component_entropy(c: &ComponentDensity) -> Result<f64> {
    match c {
        ComponentDensity::Gaussian(g) => {
            Ok(0.5 * g.dim() as f64 * (2.0 * PI * std::f64::consts::E * g.sigma * g.sigma).ln())
        }
        ComponentDensity::Pushforward { profile, map } => profile
            .entropy(map.dim())
            .map(|h| h + map.ln_abs_det())
            .ok_or_else(|| {
                Error::unsupported(format!(
                    "base profile '{}' has no known entropy; compute it with the oracle first",
                    profile.family()
                ))
            }),
    }
}

/// P(|Z| > t) for a standard Gaussian in R^d, i.e. Q(d/2, t²/2).
pub fn gaussian_tail(d: usize, t: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::input("dimension must be >= 1"));
    }
    if !(t >= 0.0) {
        return Err(Error::input(format!("tail threshold must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    reg_upper_gamma(0.5 * d as f64, 0.5 * t * t)
}
