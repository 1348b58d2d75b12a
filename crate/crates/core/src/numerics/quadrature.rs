//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Infinite ends are mapped onto finite ones: `[a, ∞)` uses
//! `x = a + t/(1−t)`, `(−∞, b]` uses `x = b − t/(1−t)`, both with
//! `t ∈ [0, 1)` and Jacobian `1/(1−t)²`. The Kronrod nodes are interior, so
//! `t = 1` is never evaluated. A doubly infinite range is split at 0 (or at the
//! supplied breakpoints).
//!
//! Error estimates follow QUADPACK's QK15 heuristic.

use std::cell::Cell;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::Estimate;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { abs_tol: 1e-10, rel_tol: 1e-10, max_subdivisions: 1 << 20 }
    }
}

impl QuadratureSpec {
    pub fn with_tol(tol: f64) -> Self {
        QuadratureSpec { abs_tol: tol, rel_tol: tol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::input("quadrature tolerances must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::input("max_subdivisions must be positive"));
        }
        Ok(())
    }

    /// Spec for nested inner integrals: ten times tighter.
    pub fn tightened(&self, factor: f64) -> Self {
        QuadratureSpec {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy)]
enum Map {
    Finite,
    /// x = origin + t/(1−t)
    Upper(f64),
    /// x = origin − t/(1−t)
    Lower(f64),
}

impl Map {
    #[inline]
    fn apply(self, t: f64) -> (f64, f64) {
        match self {
            Map::Finite => (t, 1.0),
            Map::Upper(a) => {
                let s = 1.0 - t;
                (a + t / s, 1.0 / (s * s))
            }
            Map::Lower(b) => {
                let s = 1.0 - t;
                (b - t / s, 1.0 / (s * s))
            }
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    map: Map,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn qk15<F: FnMut(f64) -> f64>(f: &mut F, map: Map, a: f64, b: f64) -> Result<(f64, f64)> {
    let mut eval = |t: f64| -> Result<f64> {
        let (x, jac) = map.apply(t);
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand { at: x });
        }
        let r = v * jac;
        if !r.is_finite() {
            return Err(Error::NonFiniteIntegrand { at: x });
        }
        Ok(r)
    };
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let dhlgth = hlgth.abs();

    let fc = eval(centr)?;
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..3 {
        let jtw = 2 * j + 1;
        let absc = hlgth * XGK[jtw];
        let f1 = eval(centr - absc)?;
        let f2 = eval(centr + absc)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += WG[j] * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let absc = hlgth * XGK[jtwm1];
        let f1 = eval(centr - absc)?;
        let f2 = eval(centr + absc)?;
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * hlgth;
    resabs *= dhlgth;
    resasc *= dhlgth;
    let mut abserr = ((resk - resg) * hlgth).abs();
    if resasc != 0.0 && abserr != 0.0 {
        abserr = resasc * (200.0 * abserr / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        abserr = abserr.max(50.0 * f64::EPSILON * resabs);
    }
    Ok((result, abserr))
}

fn pieces(points: &[f64]) -> Result<Vec<(Map, f64, f64)>> {
    if points.len() < 2 {
        return Err(Error::input("integration needs at least two points"));
    }
    if points.iter().any(|p| p.is_nan()) {
        return Err(Error::input("integration limit is NaN"));
    }
    let mut out = Vec::new();
    for w in points.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if !(hi >= lo) {
            return Err(Error::input("integration points must be sorted"));
        }
        if lo == hi {
            continue;
        }
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => out.push((Map::Finite, lo, hi)),
            (true, false) => out.push((Map::Upper(lo), 0.0, 1.0)),
            (false, true) => out.push((Map::Lower(hi), 0.0, 1.0)),
            (false, false) => {
                out.push((Map::Lower(0.0), 0.0, 1.0));
                out.push((Map::Upper(0.0), 0.0, 1.0));
            }
        }
    }
    Ok(out)
}

/// Integrates `f` over the union of `[points[k], points[k+1]]`.
///
/// The outer points may be infinite; interior points act as initial
/// breakpoints (kinks, support edges, component centers).
pub fn integrate_points<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    spec.validate()?;
    let parts = pieces(points)?;
    if parts.is_empty() {
        return Ok(Estimate::quadrature(0.0, 0.0));
    }
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for (map, a, b) in parts {
        let (value, error) = qk15(&mut f, map, a, b)?;
        total += value;
        total_err += error;
        heap.push(Segment { a, b, map, value, error });
    }
    let mut frozen_value = 0.0;
    let mut frozen_err = 0.0;
    let mut count = heap.len();

    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= tol {
            // Re-sum exactly to shed drift from the running totals.
            total = frozen_value + heap.iter().map(|s| s.value).sum::<f64>();
            total_err = frozen_err + heap.iter().map(|s| s.error).sum::<f64>();
            if total_err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
                return Ok(Estimate::quadrature(total, total_err));
            }
        }
        let Some(seg) = heap.pop() else {
            return Err(Error::NonConvergence {
                estimate: frozen_value,
                error: frozen_err,
                reason: "round-off limit reached".into(),
            });
        };
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) || (seg.b - seg.a) < 4.0 * f64::EPSILON * mid.abs().max(1e-300) {
            frozen_value += seg.value;
            frozen_err += seg.error;
            if heap.is_empty() {
                return Err(Error::NonConvergence {
                    estimate: frozen_value,
                    error: frozen_err,
                    reason: "round-off limit reached".into(),
                });
            }
            continue;
        }
        if count >= spec.max_subdivisions {
            let estimate = frozen_value + seg.value + heap.iter().map(|s| s.value).sum::<f64>();
            let error = frozen_err + seg.error + heap.iter().map(|s| s.error).sum::<f64>();
            return Err(Error::NonConvergence {
                estimate,
                error,
                reason: format!("{} subdivisions exhausted", spec.max_subdivisions),
            });
        }
        let (v1, e1) = qk15(&mut f, seg.map, seg.a, mid)?;
        let (v2, e2) = qk15(&mut f, seg.map, mid, seg.b)?;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, map: seg.map, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, map: seg.map, value: v2, error: e2 });
        count += 1;
    }
}

/// ∫_a^b f(x) dx; either limit may be infinite.
pub fn integrate_1d<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    if a > b {
        return integrate_points(f, &[b, a], spec).map(|e| e.scale(-1.0));
    }
    integrate_points(f, &[a, b], spec)
}

/// Nested 2-D quadrature over `x ∈ [x_points₀, x_pointsₙ]` and, for each x,
/// `y` over the points returned by `y_points(x)`.
///
/// Inner integrals run at a tenfold tighter tolerance. The reported error is
/// the outer error plus the largest inner error times the x-extent.
pub fn integrate_2d<F, P>(
    f: F,
    x_points: &[f64],
    y_points: P,
    spec: &QuadratureSpec,
) -> Result<Estimate>
where
    F: Fn(f64, f64) -> f64,
    P: Fn(f64) -> Vec<f64>,
{
    let inner_spec = spec.tightened(0.1);
    let max_inner = Cell::new(0.0f64);
    let failure: Cell<Option<Error>> = Cell::new(None);
    let outer = integrate_points(
        |x| {
            let ys = y_points(x);
            if ys.len() < 2 {
                return 0.0;
            }
            match integrate_points(|y| f(x, y), &ys, &inner_spec) {
                Ok(e) => {
                    max_inner.set(max_inner.get().max(e.error));
                    e.value
                }
                Err(err) => {
                    let prev = failure.take();
                    failure.set(Some(prev.unwrap_or(err)));
                    0.0
                }
            }
        },
        x_points,
        spec,
    );
    if let Some(err) = failure.take() {
        return Err(err);
    }
    let outer = outer?;
    let width = x_points.last().unwrap() - x_points.first().unwrap();
    Ok(Estimate::quadrature(outer.value, outer.error + max_inner.get() * width.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::special::std_normal_pdf;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn exponential_half_line() {
        let e = integrate_1d(|x| (-x).exp(), 0.0, f64::INFINITY, &spec()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-10);
        assert!(e.error <= 1e-10);
    }

    #[test]
    fn normal_moments_full_line() {
        let s = spec();
        let m0 = integrate_1d(std_normal_pdf, f64::NEG_INFINITY, f64::INFINITY, &s).unwrap();
        let m2 = integrate_1d(|x| x * x * std_normal_pdf(x), f64::NEG_INFINITY, f64::INFINITY, &s)
            .unwrap();
        assert!((m0.value - 1.0).abs() < 1e-10);
        assert!((m2.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn lower_infinite_and_reversed_limits() {
        let e = integrate_1d(|x| x.exp(), f64::NEG_INFINITY, 0.0, &spec()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-10);
        let r = integrate_1d(|x| x, 1.0, 0.0, &spec()).unwrap();
        assert!((r.value + 0.5).abs() < 1e-14);
    }

    #[test]
    fn breakpoints_handle_kinks() {
        let e = integrate_points(|x: f64| (x - 0.3).abs(), &[-1.0, 0.3, 1.0], &spec()).unwrap();
        let want = 0.5 * 1.3f64.powi(2) + 0.5 * 0.7f64.powi(2);
        assert!((e.value - want).abs() < 1e-13);
    }

    #[test]
    fn error_estimates_are_conservative() {
        // (integrand, a, b, exact)
        type Case = (Box<dyn Fn(f64) -> f64>, f64, f64, f64);
        let inf = f64::INFINITY;
        let cases: Vec<Case> = vec![
            (Box::new(|x| x.sin()), 0.0, PI, 2.0),
            (Box::new(|x| x.cos()), 0.0, PI / 2.0, 1.0),
            (Box::new(|x| x.exp()), 0.0, 1.0, std::f64::consts::E - 1.0),
            (Box::new(|x| 1.0 / (1.0 + x * x)), 0.0, inf, PI / 2.0),
            (Box::new(|x| 1.0 / (1.0 + x * x)), -inf, inf, PI),
            (Box::new(|x| x.sqrt()), 0.0, 1.0, 2.0 / 3.0),
            (Box::new(|x| x.ln()), 0.0, 1.0, -1.0),
            (Box::new(|x| 1.0 / x.sqrt()), 0.0, 1.0, 2.0),
            (Box::new(|x| (-x * x).exp()), -inf, inf, PI.sqrt()),
            (Box::new(|x| x.powi(5)), -1.0, 2.0, (64.0 - 1.0) / 6.0),
            (Box::new(|x| (-x).exp() * x.powi(3)), 0.0, inf, 6.0),
            (Box::new(|x| x.abs()), -1.0, 2.0, 2.5),
            (Box::new(|x| (10.0 * x).sin().powi(2)), 0.0, PI, PI / 2.0),
            (Box::new(|x| 1.0 / (1.0 + x)), 0.0, 1.0, std::f64::consts::LN_2),
            (Box::new(|x| x * (-x).exp()), 0.0, inf, 1.0),
            (Box::new(|x: f64| (-x.abs()).exp()), -inf, inf, 2.0),
            (Box::new(|x| 1.0 / (x * x)), 1.0, inf, 1.0),
            (Box::new(|x| x.cos().powi(2)), 0.0, 2.0 * PI, PI),
            (Box::new(|x| (1.0 - x * x).max(0.0).sqrt()), -1.0, 1.0, PI / 2.0),
            (Box::new(|x| (x * x) / (x.exp() - 1.0).max(1e-300)), 0.0, inf, 2.404_113_806_319_188_5),
        ];
        assert_eq!(cases.len(), 20);
        let mut ok = 0;
        for (f, a, b, exact) in &cases {
            let e = integrate_1d(|x| f(x), *a, *b, &spec()).unwrap();
            if (e.value - exact).abs() <= e.error {
                ok += 1;
            }
        }
        assert!(ok >= 19, "{ok}/20 conservative");
    }

    #[test]
    fn nonconvergence_carries_estimate() {
        let tight = QuadratureSpec { abs_tol: 1e-15, rel_tol: 1e-15, max_subdivisions: 4 };
        match integrate_1d(|x| (50.0 * x).sin(), 0.0, 10.0, &tight) {
            Err(Error::NonConvergence { estimate, .. }) => assert!(estimate.is_finite()),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn nan_integrand_is_reported() {
        let r = integrate_1d(|x| if x > 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0, &spec());
        assert!(matches!(r, Err(Error::NonFiniteIntegrand { .. })));
    }

    #[test]
    fn two_dimensional_gaussian_and_disk() {
        let s = spec();
        let g = integrate_2d(
            |x, y| (-(x * x + y * y) / 2.0).exp() / (2.0 * PI),
            &[-12.0, 0.0, 12.0],
            |_| vec![-12.0, 0.0, 12.0],
            &s,
        )
        .unwrap();
        assert!((g.value - 1.0).abs() < 1e-9);
        let disk = integrate_2d(
            |_, _| 1.0,
            &[-1.0, 1.0],
            |x| {
                let h = (1.0 - x * x).max(0.0).sqrt();
                vec![-h, h]
            },
            &s,
        )
        .unwrap();
        assert!((disk.value - PI).abs() < 1e-9);
    }
}
