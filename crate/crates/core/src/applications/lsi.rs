//! Log-Sobolev deficit δ(μ) = I(μ‖γ)/2 − D(μ‖γ) of translated standard
//! Gaussians, with I(μ‖γ) = ∫ |∇ ln(dμ/dγ)|² dμ.

use crate::bounds::{deficit_upper_tv, BoundKind, BoundReport};
use crate::density::{integrate_domain, ComponentDensity, Domain, MixtureModel};
use crate::divergence::{kl, DensityPair, DivergenceSpec};
use crate::error::{Error, Result};
use crate::numerics::{log_sum_exp, Estimate};

/// δ(μ) for a 1-d mixture of N(m_i, 1). Here ∂ ln(dμ/dγ)(x) is the posterior
/// mean Σ π_i(x) m_i.
pub fn lsi_deficit_oracle(model: &MixtureModel, spec: &DivergenceSpec) -> Result<Estimate> {
    if model.dim() != 1 {
        return Err(Error::unsupported("the Fisher information oracle is one-dimensional"));
    }
    if !model.components().iter().all(ComponentDensity::is_unit_gaussian) {
        return Err(Error::input("components must be unit-variance Gaussians"));
    }
    let means: Vec<f64> = model.components().iter().map(|c| c.center()[0]).collect();
    let domain = Domain::covering(&[model])?;
    let n = model.len();
    let fisher = integrate_domain(
        &domain,
        |z| {
            let mut joint = vec![0.0; n];
            model.joint_ln(z, &mut joint);
            let lf = log_sum_exp(&joint);
            let score: f64 = joint.iter().zip(&means).map(|(lj, m)| (lj - lf).exp() * m).sum();
            lf.exp() * score * score
        },
        &spec.quadrature,
    )?;
    let gamma = MixtureModel::single(ComponentDensity::gaussian(vec![0.0], 1.0)?);
    let d = kl(&DensityPair::new(model.clone(), gamma)?, spec)?;
    Ok(fisher.combine(0.5, d, -1.0))
}

/// δ(Σ p_i γ_i) ≤ 𝒯_f H(p). For d = 1 the oracle value is attached as
/// `oracle` and checked against the bound.
pub fn lsi_deficit_bound(model: &MixtureModel, spec: &DivergenceSpec) -> Result<BoundReport> {
    let unit = model.components().iter().all(ComponentDensity::is_unit_gaussian);
    if model.len() < 2 {
        let mut r = BoundReport::new(BoundKind::UpperDeficit, 0.0).precondition("unit-variance Gaussians", unit);
        if unit {
            r = r.detail("oracle", 0.0).detail("oracle_error", 0.0);
        }
        return Ok(r);
    }
    let upper = deficit_upper_tv(model, spec)?;
    let mut r = BoundReport::new(BoundKind::UpperDeficit, upper.value)
        .precondition("unit-variance Gaussians", unit)
        .input("n", model.len() as f64)
        .input("d", model.dim() as f64)
        .detail("t_f", upper.get("t_f").unwrap_or(f64::NAN))
        .detail("entropy_p", model.weight_entropy());
    if unit && model.dim() == 1 {
        let delta = lsi_deficit_oracle(model, spec)?;
        if delta.value > r.value + delta.error + 1e-9 {
            return Err(Error::InternalConsistency(format!(
                "LSI deficit {:e} exceeds its bound {:e}",
                delta.value, r.value
            )));
        }
        r = r.detail("oracle", delta.value).detail("oracle_error", delta.error);
    }
    Ok(r)
}
