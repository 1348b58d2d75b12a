use crate::density::MixtureModel;
use crate::divergence::{total_variation, DensityPair, DivergenceSpec};
use crate::error::Result;

use super::report::{BoundKind, BoundReport};

/// 𝒯_f = max_j ‖f_j − f̃_j‖_TV, with f̃_j the mixture of the other components.
///
/// Returns the per-component distances and the total error of the maximizer.
pub fn mixture_tv_spread(model: &MixtureModel, spec: &DivergenceSpec) -> Result<(f64, f64, Vec<f64>)> {
    let mut tvs = Vec::with_capacity(model.len());
    let (mut best, mut best_err) = (0.0f64, 0.0);
    for j in 0..model.len() {
        let comp = MixtureModel::single(model.components()[j].clone());
        let pair = DensityPair::new(comp, model.mixture_complement(j)?)?;
        let tv = total_variation(&pair, spec)?;
        if tv.value > best {
            best = tv.value;
            best_err = tv.error;
        }
        tvs.push(tv.value);
    }
    Ok((best, best_err, tvs))
}

/// Upper bound min(𝒯_f H(p), H(p)) on h(f) − Σ p_i h(f_i).
pub fn deficit_upper_tv(model: &MixtureModel, spec: &DivergenceSpec) -> Result<BoundReport> {
    let hp = model.weight_entropy();
    if model.len() < 2 {
        return Ok(BoundReport::new(BoundKind::UpperDeficit, hp)
            .precondition("n >= 2", false)
            .detail("entropy_p", hp)
            .detail("trivial", hp));
    }
    let (t_f, t_err, tvs) = mixture_tv_spread(model, spec)?;
    let paper = t_f * hp;
    let mut r = BoundReport::new(BoundKind::UpperDeficit, paper.min(hp))
        .precondition("n >= 2", true)
        .input("n", model.len() as f64)
        .input("d", model.dim() as f64)
        .detail("t_f", t_f)
        .detail("t_f_error", t_err)
        .detail("entropy_p", hp)
        .detail("paper_bound", paper)
        .detail("trivial", hp);
    for (j, tv) in tvs.iter().enumerate() {
        r = r.detail(&format!("tv_{j}"), *tv);
    }
    Ok(r)
}
