use rand::Rng;

use super::ComponentDensity;
use crate::error::{Error, Result};
use crate::numerics::special::{log_sum_exp, shannon_entropy};
use crate::numerics::{integrate_2d, integrate_points, Estimate, McRng, QuadratureSpec, Sampler};

/// f = Σ p_i f_i with p_i > 0 and Σ p_i = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModel {
    weights: Vec<f64>,
    ln_weights: Vec<f64>,
    components: Vec<ComponentDensity>,
    dim: usize,
}

const WEIGHT_SUM_TOL: f64 = 1e-12;

impl MixtureModel {
    pub fn new(weights: Vec<f64>, components: Vec<ComponentDensity>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::input("a mixture needs at least one component"));
        }
        if weights.len() != components.len() {
            return Err(Error::input(format!(
                "{} weights for {} components",
                weights.len(),
                components.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::input(format!("mixture weights must be positive, got {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::input(format!("mixture weights sum to {total}, not 1")));
        }
        let dim = components[0].dim();
        for c in &components {
            if c.dim() != dim {
                return Err(Error::Dimension { expected: dim, got: c.dim() });
            }
        }
        let ln_weights = weights.iter().map(|w| w.ln()).collect();
        Ok(MixtureModel { weights, ln_weights, components, dim })
    }

    pub fn single(c: ComponentDensity) -> Self {
        MixtureModel::new(vec![1.0], vec![c]).expect("single component is valid")
    }

    /// Equal-weight mixture of the given components.
    pub fn uniform(components: Vec<ComponentDensity>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::input("a mixture needs at least one component"));
        }
        let mut w = vec![1.0 / n as f64; n];
        // Push rounding into the last weight so the sum is exactly 1 to tolerance.
        w[n - 1] = 1.0 - w[..n - 1].iter().sum::<f64>();
        MixtureModel::new(w, components)
    }

    /// Gaussians N(mean_i, σ²I) with the given weights.
    pub fn gaussian_translates(weights: Vec<f64>, means: &[Vec<f64>], sigma: f64) -> Result<Self> {
        let comps = means
            .iter()
            .map(|m| ComponentDensity::gaussian(m.clone(), sigma))
            .collect::<Result<Vec<_>>>()?;
        MixtureModel::new(weights, comps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[ComponentDensity] {
        &self.components
    }

    /// H(p) in nats.
    pub fn weight_entropy(&self) -> f64 {
        shannon_entropy(&self.weights)
    }

    #[inline]
    pub(crate) fn ln_pdf_unchecked(&self, z: &[f64]) -> f64 {
        if self.components.len() == 1 {
            return self.components[0].ln_pdf_unchecked(z);
        }
        let mut terms = [0.0f64; 16];
        if self.components.len() <= terms.len() {
            for (k, (c, lw)) in self.components.iter().zip(&self.ln_weights).enumerate() {
                terms[k] = lw + c.ln_pdf_unchecked(z);
            }
            log_sum_exp(&terms[..self.components.len()])
        } else {
            let v: Vec<f64> = self
                .components
                .iter()
                .zip(&self.ln_weights)
                .map(|(c, lw)| lw + c.ln_pdf_unchecked(z))
                .collect();
            log_sum_exp(&v)
        }
    }

    /// ln Σ p_i f_i(z), evaluated by log-sum-exp.
    pub fn log_pdf(&self, z: &[f64]) -> Result<f64> {
        if z.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: z.len() });
        }
        Ok(self.ln_pdf_unchecked(z))
    }

    /// ln p_i + ln f_i(z) for each component, written into `out`.
    pub(crate) fn joint_ln(&self, z: &[f64], out: &mut [f64]) {
        for ((o, c), lw) in out.iter_mut().zip(&self.components).zip(&self.ln_weights) {
            *o = lw + c.ln_pdf_unchecked(z);
        }
    }

    /// f̃_j = Σ_{i≠j} p_i f_i / (1 − p_j).
    pub fn mixture_complement(&self, j: usize) -> Result<MixtureModel> {
        let n = self.len();
        if n == 1 {
            return Err(Error::UndefinedComplement);
        }
        if j >= n {
            return Err(Error::input(format!("component index {j} out of range for {n} components")));
        }
        let rest: f64 = self.weights.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, w)| w).sum();
        let mut weights = Vec::with_capacity(n - 1);
        let mut comps = Vec::with_capacity(n - 1);
        for (i, (w, c)) in self.weights.iter().zip(&self.components).enumerate() {
            if i != j {
                weights.push(w / rest);
                comps.push(c.clone());
            }
        }
        let s: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= s);
        MixtureModel::new(weights, comps)
    }

    /// t·a + (1−t)·b as one mixture; endpoints return the corresponding input.
    pub fn blend(a: &MixtureModel, b: &MixtureModel, t: f64) -> Result<MixtureModel> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::input(format!("blend parameter must be in [0,1], got {t}")));
        }
        if a.dim != b.dim {
            return Err(Error::Dimension { expected: a.dim, got: b.dim });
        }
        if t == 1.0 {
            return Ok(a.clone());
        }
        if t == 0.0 {
            return Ok(b.clone());
        }
        let mut weights: Vec<f64> = a.weights.iter().map(|w| t * w).collect();
        weights.extend(b.weights.iter().map(|w| (1.0 - t) * w));
        let s: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= s);
        let mut comps = a.components.clone();
        comps.extend(b.components.iter().cloned());
        MixtureModel::new(weights, comps)
    }

    fn pick(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        self.weights.len() - 1
    }
}

impl Sampler for MixtureModel {
    fn dim(&self) -> usize {
        self.dim
    }

    /// Hierarchical draw: i ~ p, then z ~ f_i.
    fn sample(&self, rng: &mut McRng, out: &mut [f64]) {
        let u: f64 = rng.random();
        let i = self.pick(u);
        self.components[i].sample(rng, out);
    }
}

/// Integration region shared by a set of mixtures on R¹ or R².
#[derive(Debug, Clone)]
pub(crate) enum Domain {
    Line(Vec<f64>),
    Plane {
        x_points: Vec<f64>,
        y_range: (f64, f64),
        y_breaks: Vec<f64>,
        ellipses: Vec<Ellipse>,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct Ellipse {
    center: [f64; 2],
    // M = A^{-T} A^{-1}
    m: [[f64; 2]; 2],
    radius: f64,
}

impl Ellipse {
    fn x_extent(&self) -> f64 {
        let det = self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[0][1];
        self.radius * (self.m[1][1] / det).sqrt()
    }

    fn y_slice(&self, x: f64) -> Option<(f64, f64)> {
        let ux = x - self.center[0];
        let (a, b, c) = (self.m[1][1], self.m[0][1] * ux, self.m[0][0] * ux * ux - self.radius * self.radius);
        let disc = b * b - a * c;
        if disc < 0.0 {
            return None;
        }
        let s = disc.sqrt();
        Some((self.center[1] + (-b - s) / a, self.center[1] + (-b + s) / a))
    }
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    v
}

impl Domain {
    /// Region covering every component of every model: the union of the
    /// component balls of radius [`ComponentDensity::bounding_radius`], with
    /// breakpoints at centers and support edges. In 1-D the outer ends are
    /// infinite, in 2-D the region is the bounding box of the balls.
    pub(crate) fn covering(models: &[&MixtureModel]) -> Result<Domain> {
        let dim = models[0].dim();
        if let Some(m) = models.iter().find(|m| m.dim() != dim) {
            return Err(Error::Dimension { expected: dim, got: m.dim() });
        }
        let comps: Vec<&ComponentDensity> = models.iter().flat_map(|m| m.components()).collect();
        match dim {
            1 => {
                let mut pts = vec![f64::NEG_INFINITY, f64::INFINITY];
                for c in &comps {
                    let x = c.center()[0];
                    let r = c.bounding_radius();
                    pts.extend([x, x - r, x + r]);
                    if let Some((map, rad)) = c.support_ellipse() {
                        let h = map.matrix()[(0, 0)].abs() * rad;
                        pts.extend([x - h, x + h]);
                    }
                }
                Ok(Domain::Line(sorted_unique(pts)))
            }
            2 => {
                let (mut xlo, mut xhi, mut ylo, mut yhi) =
                    (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
                let mut xs = Vec::new();
                let mut ys = Vec::new();
                let mut ellipses = Vec::new();
                for c in &comps {
                    let ctr = c.center();
                    let r = c.bounding_radius();
                    xlo = xlo.min(ctr[0] - r);
                    xhi = xhi.max(ctr[0] + r);
                    ylo = ylo.min(ctr[1] - r);
                    yhi = yhi.max(ctr[1] + r);
                    xs.push(ctr[0]);
                    ys.push(ctr[1]);
                    if let Some((map, rad)) = c.support_ellipse() {
                        let inv = map.inverse_matrix();
                        let mut m = [[0.0; 2]; 2];
                        for i in 0..2 {
                            for j in 0..2 {
                                m[i][j] = (0..2).map(|k| inv[(k, i)] * inv[(k, j)]).sum();
                            }
                        }
                        let e = Ellipse { center: [ctr[0], ctr[1]], m, radius: rad };
                        let w = e.x_extent();
                        xs.extend([ctr[0] - w, ctr[0] + w]);
                        ellipses.push(e);
                    }
                }
                xs.extend([xlo, xhi]);
                let x_points = sorted_unique(xs.into_iter().map(|x| x.clamp(xlo, xhi)).collect());
                Ok(Domain::Plane { x_points, y_range: (ylo, yhi), y_breaks: ys, ellipses })
            }
            d => Err(Error::unsupported(format!("quadrature is available for d <= 2, got d = {d}"))),
        }
    }

    fn y_points(&self, x: f64) -> Vec<f64> {
        match self {
            Domain::Line(_) => unreachable!("y_points on a line domain"),
            Domain::Plane { y_range, y_breaks, ellipses, .. } => {
                let (lo, hi) = *y_range;
                let mut v = vec![lo, hi];
                v.extend(y_breaks.iter().copied());
                for e in ellipses {
                    if let Some((a, b)) = e.y_slice(x) {
                        v.extend([a, b]);
                    }
                }
                sorted_unique(v.into_iter().map(|y| y.clamp(lo, hi)).collect())
            }
        }
    }
}

/// ∫ g(z) dz over a [`Domain`].
pub(crate) fn integrate_domain<G>(domain: &Domain, g: G, spec: &QuadratureSpec) -> Result<Estimate>
where
    G: Fn(&[f64]) -> f64,
{
    match domain {
        Domain::Line(points) => integrate_points(|x| g(&[x]), points, spec),
        Domain::Plane { x_points, .. } => {
            integrate_2d(|x, y| g(&[x, y]), x_points, |x| domain.y_points(x), spec)
        }
    }
}
