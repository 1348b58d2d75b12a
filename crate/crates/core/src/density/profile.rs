//! Spherically symmetric base densities `ψ(|w|)` on R^d.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::numerics::special::{ln_gamma, reg_upper_gamma, unit_ball_volume};
use crate::numerics::{integrate_points, McRng, QuadratureSpec};

/// A user-supplied radial profile, `ln ψ(r)` for `r ≥ 0` in a fixed dimension.
#[derive(Clone)]
pub struct CustomProfile {
    ln_psi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    dim: usize,
    entropy: Option<f64>,
    radius: f64,
    label: String,
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("entropy", &self.entropy)
            .field("radius", &self.radius)
            .finish()
    }
}

impl CustomProfile {
    /// Builds a custom profile and checks that it is radially non-increasing
    /// and normalized on R^dim to within 1e-8.
    ///
    /// `radius` bounds the region holding all but a negligible fraction of the
    /// mass; it sizes quadrature boxes.
    pub fn new<F>(label: &str, dim: usize, radius: f64, ln_psi: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(Error::input("profile dimension must be >= 1"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::input("profile radius must be positive and finite"));
        }
        let p = CustomProfile {
            ln_psi: Arc::new(ln_psi),
            dim,
            entropy: None,
            radius,
            label: label.to_string(),
        };
        let mut prev = f64::INFINITY;
        for k in 0..=2000 {
            let r = radius * 1.5 * k as f64 / 2000.0;
            let v = (p.ln_psi)(r);
            if v.is_nan() {
                return Err(Error::input(format!("profile '{label}' is NaN at r = {r}")));
            }
            if v > prev + 1e-12 * prev.abs().max(1.0) {
                return Err(Error::input(format!("profile '{label}' increases at r = {r}")));
            }
            prev = v;
        }
        let mass = radial_integral_raw(&*p.ln_psi, dim, 0.0, |_, lp| lp.exp(), &QuadratureSpec::with_tol(1e-11))?;
        if (mass.value - 1.0).abs() > 1e-8 {
            return Err(Error::input(format!(
                "profile '{label}' integrates to {} on R^{dim}, not 1",
                mass.value
            )));
        }
        Ok(p)
    }

    pub fn with_entropy(mut self, h: f64) -> Self {
        self.entropy = Some(h);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn same_as(&self, other: &CustomProfile) -> bool {
        Arc::ptr_eq(&self.ln_psi, &other.ln_psi) && self.dim == other.dim
    }
}

#[derive(Debug, Clone)]
pub enum RadialProfile {
    /// N(0, σ²I).
    Gaussian { sigma: f64 },
    /// Uniform on the ball of the given radius.
    UniformBall { radius: f64 },
    /// ψ(r) ∝ e^{−r/scale}.
    Exponential { scale: f64 },
    Custom(CustomProfile),
}

impl PartialEq for RadialProfile {
    fn eq(&self, other: &Self) -> bool {
        use RadialProfile::*;
        match (self, other) {
            (Gaussian { sigma: a }, Gaussian { sigma: b }) => a == b,
            (UniformBall { radius: a }, UniformBall { radius: b }) => a == b,
            (Exponential { scale: a }, Exponential { scale: b }) => a == b,
            (Custom(a), Custom(b)) => a.same_as(b),
            _ => false,
        }
    }
}

impl RadialProfile {
    pub fn validate(&self) -> Result<()> {
        let s = match self {
            RadialProfile::Gaussian { sigma } => *sigma,
            RadialProfile::UniformBall { radius } => *radius,
            RadialProfile::Exponential { scale } => *scale,
            RadialProfile::Custom(_) => return Ok(()),
        };
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::input(format!("{} scale must be positive and finite", self.family())));
        }
        Ok(())
    }

    pub fn family(&self) -> &str {
        match self {
            RadialProfile::Gaussian { .. } => "gaussian",
            RadialProfile::UniformBall { .. } => "uniform_ball",
            RadialProfile::Exponential { .. } => "exponential",
            RadialProfile::Custom(c) => &c.label,
        }
    }

    /// Scale parameter (σ, radius or exponential scale); `None` for custom profiles.
    pub fn scale(&self) -> Option<f64> {
        match self {
            RadialProfile::Gaussian { sigma } => Some(*sigma),
            RadialProfile::UniformBall { radius } => Some(*radius),
            RadialProfile::Exponential { scale } => Some(*scale),
            RadialProfile::Custom(_) => None,
        }
    }

    pub(crate) fn with_scale(&self, s: f64) -> RadialProfile {
        match self {
            RadialProfile::Gaussian { .. } => RadialProfile::Gaussian { sigma: s },
            RadialProfile::UniformBall { .. } => RadialProfile::UniformBall { radius: s },
            RadialProfile::Exponential { .. } => RadialProfile::Exponential { scale: s },
            RadialProfile::Custom(c) => RadialProfile::Custom(c.clone()),
        }
    }

    /// Same family, possibly different scale.
    pub(crate) fn same_family(&self, other: &RadialProfile) -> bool {
        match (self, other) {
            (RadialProfile::Custom(a), RadialProfile::Custom(b)) => a.same_as(b),
            _ => std::mem::discriminant(self) == std::mem::discriminant(other),
        }
    }

    /// Dimension a custom profile is tied to.
    pub fn fixed_dim(&self) -> Option<usize> {
        match self {
            RadialProfile::Custom(c) => Some(c.dim),
            _ => None,
        }
    }

    pub fn check_dim(&self, d: usize) -> Result<()> {
        match self.fixed_dim() {
            Some(k) if k != d => Err(Error::Dimension { expected: k, got: d }),
            _ => Ok(()),
        }
    }

    /// ln ψ(r) for the profile normalized on R^d.
    pub fn ln_psi(&self, r: f64, d: usize) -> f64 {
        let df = d as f64;
        match self {
            RadialProfile::Gaussian { sigma } => {
                -0.5 * r * r / (sigma * sigma) - 0.5 * df * (2.0 * PI * sigma * sigma).ln()
            }
            RadialProfile::UniformBall { radius } => {
                if r <= *radius {
                    -(unit_ball_volume(d).ln() + df * radius.ln())
                } else {
                    f64::NEG_INFINITY
                }
            }
            RadialProfile::Exponential { scale } => -r / scale - exp_log_normalizer(*scale, d),
            RadialProfile::Custom(c) => (c.ln_psi)(r),
        }
    }

    /// ‖ψ‖_∞ = ψ(0).
    pub fn sup_norm(&self, d: usize) -> f64 {
        self.ln_psi(0.0, d).exp()
    }

    /// Differential entropy in nats when known in closed form (or supplied).
    pub fn entropy(&self, d: usize) -> Option<f64> {
        let df = d as f64;
        match self {
            RadialProfile::Gaussian { sigma } => {
                Some(0.5 * df * (2.0 * PI * std::f64::consts::E * sigma * sigma).ln())
            }
            RadialProfile::UniformBall { radius } => Some(unit_ball_volume(d).ln() + df * radius.ln()),
            RadialProfile::Exponential { scale } => Some(exp_log_normalizer(*scale, d) + df),
            RadialProfile::Custom(c) => c.entropy,
        }
    }

    /// P(|W| > t).
    pub fn tail(&self, d: usize, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::input(format!("tail threshold must be >= 0, got {t}")));
        }
        let df = d as f64;
        match self {
            RadialProfile::Gaussian { sigma } => reg_upper_gamma(0.5 * df, 0.5 * (t / sigma).powi(2)),
            RadialProfile::UniformBall { radius } => {
                Ok(if t >= *radius { 0.0 } else { 1.0 - (t / radius).powi(d as i32) })
            }
            RadialProfile::Exponential { scale } => reg_upper_gamma(df, t / scale),
            RadialProfile::Custom(c) => {
                let inside = radial_integral_raw(&*c.ln_psi, d, 0.0, |_, lp| lp.exp(), &QuadratureSpec::default())?;
                let tail = if t == 0.0 {
                    1.0
                } else {
                    let outside =
                        radial_integral_raw(&*c.ln_psi, d, t, |_, lp| lp.exp(), &QuadratureSpec::default())?;
                    outside.value / inside.value
                };
                Ok(tail.clamp(0.0, 1.0))
            }
        }
    }

    /// Radius beyond which the mass is negligible (below ~1e-30 for d ≤ 2).
    pub fn effective_radius(&self, d: usize) -> f64 {
        let df = d as f64;
        match self {
            RadialProfile::Gaussian { sigma } => sigma * (12.0 + df.sqrt()),
            RadialProfile::UniformBall { radius } => *radius,
            RadialProfile::Exponential { scale } => scale * (75.0 + 2.0 * df),
            RadialProfile::Custom(c) => c.radius,
        }
    }

    /// Hard support radius, if the support is bounded.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            RadialProfile::UniformBall { radius } => Some(*radius),
            _ => None,
        }
    }

    /// Built-in profiles are log-concave; a custom one is checked for concavity
    /// of ln ψ on a radial grid.
    pub fn is_log_concave(&self) -> bool {
        match self {
            RadialProfile::Custom(c) => {
                let n = 400;
                let h = c.radius / n as f64;
                let v: Vec<f64> = (0..=n).map(|k| (c.ln_psi)(k as f64 * h)).collect();
                // ψ(|w|) is log-concave on R^d iff ln ψ is concave and non-increasing on [0, ∞).
                v.windows(3).all(|w| {
                    let scale = w[1].abs().max(1.0);
                    w.iter().any(|x| !x.is_finite()) || w[0] + w[2] - 2.0 * w[1] <= 1e-9 * scale
                })
            }
            _ => true,
        }
    }

    /// True when the profile is log-concave with Hessian of −ln ψ ⪰ I, i.e.
    /// strongly log-concave relative to the standard Gaussian.
    pub fn strongly_log_concave(&self) -> bool {
        matches!(self, RadialProfile::Gaussian { sigma } if *sigma <= 1.0)
    }

    /// Draws W into `out` (length d).
    pub fn sample(&self, rng: &mut McRng, out: &mut [f64]) {
        let d = out.len();
        match self {
            RadialProfile::Gaussian { sigma } => {
                for x in out.iter_mut() {
                    let z: f64 = StandardNormal.sample(rng);
                    *x = sigma * z;
                }
            }
            RadialProfile::UniformBall { radius } => {
                let u: f64 = rng.random();
                let r = radius * u.powf(1.0 / d as f64);
                random_direction(rng, out);
                out.iter_mut().for_each(|x| *x *= r);
            }
            RadialProfile::Exponential { scale } => {
                let g = Gamma::new(d as f64, *scale).expect("valid gamma parameters");
                let r = g.sample(rng);
                random_direction(rng, out);
                out.iter_mut().for_each(|x| *x *= r);
            }
            RadialProfile::Custom(c) => {
                // Rejection from a uniform ball of radius c.radius against ψ(0).
                let top = (c.ln_psi)(0.0);
                loop {
                    let u: f64 = rng.random();
                    let r = c.radius * u.powf(1.0 / d as f64);
                    let acc: f64 = rng.random();
                    if acc.ln() <= (c.ln_psi)(r) - top {
                        random_direction(rng, out);
                        out.iter_mut().for_each(|x| *x *= r);
                        return;
                    }
                }
            }
        }
    }

    /// ∫_{|w| > from} g(|w|, ln ψ(|w|)) ψ-weighted radially:
    /// `∫_from^∞ g(r, ln ψ(r)) · d ω_d r^{d−1} dr`.
    ///
    /// `g` receives ln ψ so integrands like ψ ln ψ stay finite.
    pub fn radial_integral<G>(&self, d: usize, from: f64, g: G, spec: &QuadratureSpec) -> Result<crate::Estimate>
    where
        G: Fn(f64, f64) -> f64,
    {
        self.check_dim(d)?;
        let lp = |r: f64| self.ln_psi(r, d);
        let mut points = vec![from.max(0.0)];
        if let Some(rad) = self.support_radius() {
            if rad > from {
                points.push(rad);
            }
            // Nothing beyond the support.
            if rad <= from {
                return Ok(crate::Estimate::quadrature(0.0, 0.0));
            }
        } else {
            let s = self.scale().unwrap_or(1.0);
            // Breaks near the radial mode help the tail map converge.
            let mode = s * ((d as f64) - 1.0).max(0.0).sqrt();
            if mode > points[0] {
                points.push(mode);
            }
            let far = self.effective_radius(d);
            if far > *points.last().unwrap() {
                points.push(far);
            }
            points.push(f64::INFINITY);
        }
        radial_points_integral(&lp, d, &points, g, spec)
    }
}

fn exp_log_normalizer(scale: f64, d: usize) -> f64 {
    // ∫ e^{−r/s} dω_d r^{d−1} dr = d ω_d s^d Γ(d)
    let df = d as f64;
    (df * unit_ball_volume(d)).ln() + df * scale.ln() + ln_gamma(df)
}

fn random_direction(rng: &mut McRng, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for x in out.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *x = z;
            norm2 += z * z;
        }
        if norm2 > 0.0 {
            let n = norm2.sqrt();
            out.iter_mut().for_each(|x| *x /= n);
            return;
        }
    }
}

fn radial_points_integral<L, G>(lp: &L, d: usize, points: &[f64], g: G, spec: &QuadratureSpec) -> Result<crate::Estimate>
where
    L: Fn(f64) -> f64 + ?Sized,
    G: Fn(f64, f64) -> f64,
{
    let surface = d as f64 * unit_ball_volume(d);
    integrate_points(
        |r| {
            let l = lp(r);
            if l == f64::NEG_INFINITY {
                return 0.0;
            }
            let v = g(r, l);
            if v == 0.0 {
                return 0.0;
            }
            v * surface * r.powi(d as i32 - 1)
        },
        points,
        spec,
    )
}

fn radial_integral_raw<L, G>(lp: &L, d: usize, from: f64, g: G, spec: &QuadratureSpec) -> Result<crate::Estimate>
where
    L: Fn(f64) -> f64 + ?Sized,
    G: Fn(f64, f64) -> f64,
{
    radial_points_integral(lp, d, &[from, f64::INFINITY], g, spec)
}
