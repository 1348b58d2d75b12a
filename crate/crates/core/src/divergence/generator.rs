use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A convex f with f(1) = 0, generating D_f(μ‖ν) = ∫ v f(u/v).
#[derive(Clone)]
pub struct ConvexGenerator {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    label: String,
}

impl fmt::Debug for ConvexGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexGenerator").field("label", &self.label).finish()
    }
}

const GRID: usize = 200;

impl ConvexGenerator {
    /// Validates f(1) = 0 (to 1e-12) and midpoint convexity on a grid in (0, 10].
    pub fn new<F>(label: &str, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let g = ConvexGenerator { f: Arc::new(f), label: label.to_string() };
        g.check()?;
        Ok(g)
    }

    fn check(&self) -> Result<()> {
        let at_one = (self.f)(1.0);
        if !(at_one.abs() <= 1e-12) {
            return Err(Error::input(format!("generator '{}': f(1) = {at_one}, expected 0", self.label)));
        }
        let xs: Vec<f64> = (1..=GRID).map(|k| 10.0 * k as f64 / GRID as f64).collect();
        let fx: Vec<f64> = xs.iter().map(|&x| (self.f)(x)).collect();
        if let Some(i) = fx.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!("generator '{}' is not finite at {}", self.label, xs[i])));
        }
        for i in 0..GRID {
            for j in (i + 1)..GRID {
                let mid = (self.f)(0.5 * (xs[i] + xs[j]));
                if mid > 0.5 * (fx[i] + fx[j]) + 1e-9 {
                    return Err(Error::input(format!(
                        "generator '{}' fails midpoint convexity between {} and {}",
                        self.label, xs[i], xs[j]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// f(x) = x ln x: relative entropy.
    pub fn kl() -> Self {
        ConvexGenerator::new("kl", |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() }).unwrap()
    }

    /// f(x) = (x − 1)²: Pearson χ².
    pub fn pearson() -> Self {
        ConvexGenerator::new("pearson", |x: f64| (x - 1.0) * (x - 1.0)).unwrap()
    }

    /// f(x) = |x − 1|/2: total variation.
    pub fn total_variation() -> Self {
        ConvexGenerator::new("tv", |x: f64| 0.5 * (x - 1.0).abs()).unwrap()
    }

    /// f(x) = −ln x: reverse relative entropy.
    pub fn reverse_kl() -> Self {
        ConvexGenerator::new("reverse_kl", |x: f64| -x.ln()).unwrap()
    }
}

/// f̂(x) = (t x + 1 − t) · f((r x + 1 − r)/(t x + 1 − t)), so that
/// D_{f̂}(μ‖ν) = D_f(rμ + (1−r)ν ‖ tμ + (1−t)ν).
///
/// Fails when f̂ is not finite on a log grid covering (0, ∞).
pub fn skewed_generator(g: &ConvexGenerator, r: f64, t: f64) -> Result<ConvexGenerator> {
    if !(0.0..=1.0).contains(&r) || !(0.0..=1.0).contains(&t) {
        return Err(Error::input(format!("skew parameters must lie in [0,1], got r = {r}, t = {t}")));
    }
    let inner = g.f.clone();
    let f = move |x: f64| {
        let den = t * x + 1.0 - t;
        den * inner((r * x + 1.0 - r) / den)
    };
    for k in -24..=24 {
        let x = 10f64.powf(k as f64 * 0.5);
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::input(format!(
                "skewed generator of '{}' (r = {r}, t = {t}) is not finite at x = {x:e}",
                g.label
            )));
        }
    }
    ConvexGenerator::new(&format!("{}[r={r},t={t}]", g.label), f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        for g in [
            ConvexGenerator::kl(),
            ConvexGenerator::pearson(),
            ConvexGenerator::total_variation(),
            ConvexGenerator::reverse_kl(),
        ] {
            assert_eq!(g.eval(1.0), 0.0);
        }
        assert!(ConvexGenerator::new("concave", |x: f64| -(x - 1.0) * (x - 1.0)).is_err());
        assert!(ConvexGenerator::new("offset", |x: f64| (x - 1.0).powi(2) + 1.0).is_err());
    }

    #[test]
    fn identity_skew() {
        let g = ConvexGenerator::kl();
        let s = skewed_generator(&g, 1.0, 0.0).unwrap();
        for x in [0.1, 0.5, 1.0, 3.0, 9.0] {
            assert!((s.eval(x) - g.eval(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn skew_kl_is_skew_relative_information_generator() {
        let g = ConvexGenerator::kl();
        for t in [0.1, 0.5, 0.9] {
            let s = skewed_generator(&g, 1.0, t).unwrap();
            for x in [0.2, 1.0, 4.0] {
                let want = x * (x / (t * x + 1.0 - t)).ln();
                assert!((s.eval(x) - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn skew_pearson_is_scaled_skew_chi2_generator() {
        let g = ConvexGenerator::pearson();
        for t in [0.2, 0.5, 0.8] {
            let s = skewed_generator(&g, 1.0, t).unwrap();
            for x in [0.2, 1.0, 4.0] {
                // χ²_t generator: (x − 1)²/(t x + 1 − t)
                let chi = (x - 1.0) * (x - 1.0) / (t * x + 1.0 - t);
                assert!((s.eval(x) - (1.0 - t) * (1.0 - t) * chi).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn non_finite_skew_is_reported() {
        let g = ConvexGenerator::reverse_kl();
        assert!(skewed_generator(&g, 1.0, 0.0).is_ok());
        assert!(skewed_generator(&g, 2.0, 0.0).is_err());
        // e^x − e overflows far out on (0, ∞).
        let exp = ConvexGenerator::new("exp", |x: f64| x.exp() - std::f64::consts::E).unwrap();
        assert!(skewed_generator(&exp, 1.0, 0.0).is_err());
        // r = t = 1 collapses f̂ to x·f(1) = 0.
        assert!(skewed_generator(&exp, 1.0, 1.0).is_ok());
    }
}
