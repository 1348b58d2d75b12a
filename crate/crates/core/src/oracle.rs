//! Reference values for h(f), the concavity deficit, I(X;Z) and H(X|Z).
//!
//! Quadrature for d ≤ 2, Monte Carlo with hierarchical sampling (i ~ p, then
//! z ~ f_i) above. With π_i(z) = p_i f_i(z)/f(z) the per-point integrands are
//!
//! * deficit: `f · Σ π_i ln(π_i/p_i)` (a KL divergence, never negative)
//! * H(X|Z): `f · (−Σ π_i ln π_i)`
//!
//! so neither route subtracts two large entropies.

use serde::Serialize;

use crate::bounds::profile_entropy;
use crate::density::{component_entropy, integrate_domain, ComponentDensity, Domain, MixtureModel, RadialProfile};
use crate::divergence::{Backend, DivergenceSpec};
use crate::error::{Error, Result};
use crate::numerics::{mc_expectation, Estimate, QuadratureSpec};

pub type OracleSpec = DivergenceSpec;
pub type OracleResult = Estimate;

/// Slack added to the combined error when comparing two routes.
const AGREEMENT_FACTOR: f64 = 4.0;

fn use_mc(spec: &OracleSpec, d: usize) -> bool {
    match spec.backend {
        Backend::Auto => d > 2,
        Backend::Quadrature => false,
        Backend::MonteCarlo => true,
    }
}

/// ∫ f(z) g(z) dz, with `g` given ln f and the joint terms ln p_i + ln f_i(z).
fn expect<G>(model: &MixtureModel, spec: &OracleSpec, g: G) -> Result<Estimate>
where
    G: Fn(f64, &[f64]) -> f64 + Sync,
{
    let n = model.len();
    let eval = |z: &[f64]| -> (f64, f64) {
        let mut buf = [0.0f64; 16];
        let mut heap;
        let joint: &mut [f64] = if n <= buf.len() {
            &mut buf[..n]
        } else {
            heap = vec![0.0; n];
            &mut heap
        };
        model.joint_ln(z, joint);
        let lf = crate::numerics::log_sum_exp(joint);
        (lf, g(lf, joint))
    };
    if use_mc(spec, model.dim()) {
        return mc_expectation(model, |z| eval(z).1, &spec.mc);
    }
    let domain = Domain::covering(&[model])?;
    integrate_domain(
        &domain,
        |z| {
            let (lf, v) = eval(z);
            if lf == f64::NEG_INFINITY {
                0.0
            } else {
                lf.exp() * v
            }
        },
        &spec.quadrature,
    )
}

/// h(f) = −∫ f ln f.
pub fn mixture_entropy(model: &MixtureModel, spec: &OracleSpec) -> Result<OracleResult> {
    expect(model, spec, |lf, _| -lf)
}

/// h(f_i), from the closed form when known and by radial quadrature otherwise.
pub fn component_entropy_any(c: &ComponentDensity, spec: &QuadratureSpec) -> Result<f64> {
    match component_entropy(c) {
        Ok(h) => Ok(h),
        Err(Error::Unsupported(_)) => {
            let (profile, map) = c.as_pushforward();
            Ok(profile_entropy(&profile, map.dim(), spec)? + map.ln_abs_det())
        }
        Err(e) => Err(e),
    }
}

/// Computes the entropy of a custom profile once and stores it on the profile.
pub fn attach_profile_entropy(profile: RadialProfile, d: usize, spec: &QuadratureSpec) -> Result<RadialProfile> {
    match profile {
        RadialProfile::Custom(c) if profile_has_no_entropy(&c, d) => {
            let h = profile_entropy(&RadialProfile::Custom(c.clone()), d, spec)?;
            Ok(RadialProfile::Custom(c.with_entropy(h)))
        }
        other => Ok(other),
    }
}

fn profile_has_no_entropy(c: &crate::density::CustomProfile, d: usize) -> bool {
    RadialProfile::Custom(c.clone()).entropy(d).is_none()
}

/// Σ p_i h(f_i).
pub fn average_component_entropy(model: &MixtureModel, spec: &OracleSpec) -> Result<f64> {
    let mut s = 0.0;
    for (p, c) in model.weights().iter().zip(model.components()) {
        s += p * component_entropy_any(c, &spec.quadrature)?;
    }
    Ok(s)
}

/// The deficit along both routes plus the conditional entropy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeficitPaths {
    /// h(f).
    pub mixture_entropy: OracleResult,
    /// Σ p_i h(f_i).
    pub component_entropy: f64,
    /// h(f) − Σ p_i h(f_i).
    pub via_entropies: OracleResult,
    /// Σ p_i D(f_i ‖ f).
    pub via_divergences: OracleResult,
    /// H(X|Z), integrated directly.
    pub conditional_entropy: OracleResult,
    /// H(p).
    pub weight_entropy: f64,
}

impl DeficitPaths {
    /// Largest pairwise disagreement between the three deficit routes,
    /// divided by the combined error allowance.
    pub fn worst_ratio(&self) -> f64 {
        let c = self.weight_entropy - self.conditional_entropy.value;
        let vals = [
            (self.via_entropies.value, self.via_entropies.error),
            (self.via_divergences.value, self.via_divergences.error),
            (c, self.conditional_entropy.error),
        ];
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in i + 1..3 {
                let allow = allowance(vals[i].1, vals[j].1, self.weight_entropy);
                worst = worst.max((vals[i].0 - vals[j].0).abs() / allow);
            }
        }
        worst
    }
}

fn allowance(ea: f64, eb: f64, scale: f64) -> f64 {
    AGREEMENT_FACTOR * (ea + eb) + 1e-9 * (1.0 + scale.abs())
}

/// Every route, with agreement checked.
pub fn deficit_paths(model: &MixtureModel, spec: &OracleSpec) -> Result<DeficitPaths> {
    let h = mixture_entropy(model, spec)?;
    let hc = average_component_entropy(model, spec)?;
    let via_entropies = h.shift(-hc);
    let via_divergences = divergence_route(model, spec)?;
    let conditional_entropy = conditional_route(model, spec)?;
    let paths = DeficitPaths {
        mixture_entropy: h,
        component_entropy: hc,
        via_entropies,
        via_divergences,
        conditional_entropy,
        weight_entropy: model.weight_entropy(),
    };
    let w = paths.worst_ratio();
    if w > 1.0 {
        return Err(Error::InternalConsistency(format!(
            "deficit routes disagree: h(f) − Σp h(f_i) = {:e}, Σp D(f_i‖f) = {:e}, H(p) − H(X|Z) = {:e}",
            paths.via_entropies.value,
            paths.via_divergences.value,
            paths.weight_entropy - paths.conditional_entropy.value
        )));
    }
    Ok(paths)
}

fn divergence_route(model: &MixtureModel, spec: &OracleSpec) -> Result<Estimate> {
    let ln_p: Vec<f64> = model.weights().iter().map(|p| p.ln()).collect();
    expect(model, spec, |lf, joint| {
        let mut s = 0.0;
        for (lj, lp) in joint.iter().zip(&ln_p) {
            let lpi = lj - lf;
            if lpi > f64::NEG_INFINITY {
                s += lpi.exp() * (lpi - lp);
            }
        }
        s
    })
}

fn conditional_route(model: &MixtureModel, spec: &OracleSpec) -> Result<Estimate> {
    expect(model, spec, |lf, joint| {
        let mut s = 0.0;
        for lj in joint {
            let lpi = lj - lf;
            if lpi > f64::NEG_INFINITY {
                s -= lpi.exp() * lpi;
            }
        }
        s
    })
}

/// h(f) − Σ p_i h(f_i), returned from the Σ p_i D(f_i‖f) route after checking
/// it against h(f) − Σ p_i h(f_i).
pub fn concavity_deficit(model: &MixtureModel, spec: &OracleSpec) -> Result<OracleResult> {
    let b = divergence_route(model, spec)?;
    let h = mixture_entropy(model, spec)?;
    let a = h.shift(-average_component_entropy(model, spec)?);
    let allow = allowance(a.error, b.error, h.value);
    if (a.value - b.value).abs() > allow {
        return Err(Error::InternalConsistency(format!(
            "deficit via entropies {:e} vs via divergences {:e} (allowance {allow:e})",
            a.value, b.value
        )));
    }
    Ok(b)
}

/// H(X|Z) = −∫ Σ p_i f_i ln π_i, checked against H(p) − deficit.
pub fn conditional_entropy_x_given_z(model: &MixtureModel, spec: &OracleSpec) -> Result<OracleResult> {
    let c = conditional_route(model, spec)?;
    let b = divergence_route(model, spec)?;
    let hp = model.weight_entropy();
    let allow = allowance(c.error, b.error, hp);
    if (hp - b.value - c.value).abs() > allow {
        return Err(Error::InternalConsistency(format!(
            "H(X|Z) = {:e} but H(p) − deficit = {:e}",
            c.value,
            hp - b.value
        )));
    }
    Ok(c)
}

/// I(X; Z) = Σ p_i D(f_i ‖ f).
pub fn mutual_information(model: &MixtureModel, spec: &OracleSpec) -> Result<OracleResult> {
    concavity_deficit(model, spec)
}
