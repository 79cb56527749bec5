//! The inverse problem: recover hazard and survival curves from a dynamic
//! weighted generating function, plus the constancy diagnostics that single
//! out the Rayleigh law.
//!
//! For a curve C(t) = C_s(W,X;t) the hazard satisfies
//! h(t) = (t + C'(t)) / (s C(t)), and integrating it recovers the survival
//! function S(x) = exp(-int_0^x h). A constant curve C = k forces
//! h(t) = t/(sk), the linear hazard of a Rayleigh law with sigma^2 = sk.

use crate::distributions::DistributionModel;
use crate::egf::{self, EgfQuery};
use crate::error::{Error, Result};

/// A function sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveOnGrid {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl CurveOnGrid {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "grid and values lengths differ: {} vs {}",
                grid.len(),
                values.len()
            )));
        }
        if grid.is_empty() {
            return Err(Error::InvalidParameter("grid must not be empty".into()));
        }
        if grid[0] < 0.0 || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "grid must be non-negative and strictly increasing".into(),
            ));
        }
        Ok(CurveOnGrid { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.iter().copied().zip(self.values.iter().copied())
    }
}

/// Relative step of the central difference applied to supplied curves.
pub const DERIVATIVE_REL_STEP: f64 = 1e-5;
/// Absolute floor of the differentiation step near t = 0.
pub const DERIVATIVE_ABS_FLOOR: f64 = 1e-6;
/// Negative hazard values beyond this tolerance signal a bad input curve.
pub const HAZARD_NOISE_TOL: f64 = 1e-6;

/// Hazard rate at age t implied by the curve C = C_s(W,X;.).
///
/// C is differentiated numerically with a central difference (relative step
/// 1e-5, absolute floor 1e-6). Values that come out slightly negative from
/// derivative noise are clamped to zero; anything below -1e-6 is an error.
pub fn hazard_from_dwcregf<F: Fn(f64) -> f64>(c: &F, s: f64, t: f64) -> Result<f64> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidParameter(format!("order s must be positive, got {s}")));
    }
    let ct = c(t);
    if ct.is_nan() || ct <= 0.0 {
        return Err(Error::Domain(format!("curve must be positive at t={t}, got {ct}")));
    }
    let h = (DERIVATIVE_REL_STEP * t.abs()).max(DERIVATIVE_ABS_FLOOR);
    let lo = (t - h).max(0.0);
    let derivative = (c(t + h) - c(lo)) / (t + h - lo);
    let hazard = (t + derivative) / (s * ct);
    if hazard < -HAZARD_NOISE_TOL {
        return Err(Error::Domain(format!(
            "curve implies negative hazard {hazard} at t={t}; inconsistent input"
        )));
    }
    Ok(hazard.max(0.0))
}

/// Survival function on `grid` reconstructed from the curve C.
///
/// S(x) = exp(-int_0^x (u + C'(u)) / (s C(u)) du), with the hazard integral
/// accumulated by adaptive Simpson refinement on each grid cell (starting
/// from 0 even when the grid does not). S(0) = 1 and the output is
/// non-increasing by construction.
pub fn reconstruct_survival<F: Fn(f64) -> f64>(
    c: &F,
    s: f64,
    grid: &[f64],
) -> Result<CurveOnGrid> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("grid must not be empty".into()));
    }
    let mut cumulative = 0.0;
    let mut previous = 0.0;
    let mut values = Vec::with_capacity(grid.len());
    for &x in grid {
        if x < previous {
            return Err(Error::InvalidParameter("grid must be increasing".into()));
        }
        if x > previous {
            cumulative +=
                adaptive_simpson(&|u| hazard_from_dwcregf(c, s, u), previous, x, 1e-10, 24)?;
        }
        values.push((-cumulative).exp());
        previous = x;
    }
    CurveOnGrid::new(grid.to_vec(), values)
}

/// Adaptive Simpson with absolute tolerance; the integrand may fail.
fn adaptive_simpson<F: Fn(f64) -> Result<f64>>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a)?, f(m)?, f(b)?);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> Result<f64>>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    let half_tol = 0.5 * tol;
    Ok(simpson_step(f, a, m, fa, flm, fm, left, half_tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, half_tol, depth - 1)?)
}

/// Uniform grid of `points` values from 0 to the model's 99th percentile.
pub fn default_grid(dist: &DistributionModel, points: usize) -> Vec<f64> {
    let hi = dist.quantile(0.99).expect("0.99 is a valid probability");
    (0..points).map(|i| hi * i as f64 / (points.saturating_sub(1)).max(1) as f64).collect()
}

/// Maximum relative departure of C_s(W,X;t) from its value at t = 0 over
/// the grid. Zero (up to round-off) exactly for the Rayleigh law.
pub fn constancy_index(dist: &DistributionModel, s: f64, grid: &[f64]) -> Result<f64> {
    let at_zero = egf::dwcregf(dist, EgfQuery::new(s, 0.0)?)?.value;
    let mut worst: f64 = 0.0;
    for &t in grid {
        let v = egf::dwcregf(dist, EgfQuery::new(s, t)?)?.value;
        worst = worst.max((v - at_zero).abs() / at_zero);
    }
    Ok(worst)
}

/// Maximum relative gap between s * C_s(W,X;t) and the weighted mean
/// residual life over the grid. Zero exactly for the Rayleigh law, and
/// identically zero for any law at s = 1 where the two functionals coincide.
pub fn wmrl_identity_gap(dist: &DistributionModel, s: f64, grid: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &t in grid {
        let c = egf::dwcregf(dist, EgfQuery::new(s, t)?)?.value;
        let m = egf::wmrl(dist, t)?;
        worst = worst.max((s * c - m).abs() / m);
    }
    Ok(worst)
}

/// The model's dynamic weighted generating function as a plain callable,
/// for feeding into the reconstruction routines. Panics if evaluated
/// outside the region where the survival is positive.
pub fn model_curve<'a>(dist: &'a DistributionModel, s: f64) -> impl Fn(f64) -> f64 + 'a {
    move |t: f64| {
        egf::dwcregf(dist, EgfQuery::new(s, t).expect("valid query"))
            .expect("curve evaluated inside the support")
            .value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistributionModel as D;

    #[test]
    fn hazard_from_exponential_curve() {
        // Exponential(2) at s = 1: C(t) = (1 + 2t)/4 gives constant hazard 2.
        let c = |t: f64| (1.0 + 2.0 * t) / 4.0;
        let h = hazard_from_dwcregf(&c, 1.0, 3.0).unwrap();
        assert!((h - 2.0).abs() < 1e-9, "{h}");
    }

    #[test]
    fn hazard_from_constant_curve_is_linear() {
        // Constant curve k = sigma^2/s forces h(t) = t/(s k).
        let c = |_: f64| 1.0;
        let h = hazard_from_dwcregf(&c, 1.0, 1.5).unwrap();
        assert!((h - 1.5).abs() < 1e-9, "{h}");
    }

    #[test]
    fn hazard_matches_uniform_model() {
        let u = D::uniform(0.0, 1.0).unwrap();
        let c = model_curve(&u, 1.0);
        let h = hazard_from_dwcregf(&c, 1.0, 0.25).unwrap();
        assert!((h - 4.0 / 3.0).abs() < 1e-5, "{h}");
        assert!((h - u.hazard(0.25).unwrap()).abs() < 1e-5);
    }

    #[test]
    fn hazard_rejects_bad_curves() {
        let negative = |_: f64| -1.0;
        assert!(hazard_from_dwcregf(&negative, 1.0, 1.0).is_err());
        // A curve falling faster than -t implies a negative hazard.
        let falling = |t: f64| 10.0 - 10.0 * t;
        assert!(hazard_from_dwcregf(&falling, 1.0, 0.1).is_err());
    }

    #[test]
    fn reconstruct_rayleigh_from_its_curve() {
        let r = D::rayleigh(1.0).unwrap();
        let c = model_curve(&r, 1.0);
        let grid: Vec<f64> = (0..=120).map(|i| 3.0 * i as f64 / 120.0).collect();
        let rec = reconstruct_survival(&c, 1.0, &grid).unwrap();
        for (x, v) in rec.iter() {
            assert!((v - (-0.5 * x * x).exp()).abs() < 1e-4, "x={x}");
        }
    }

    #[test]
    fn reconstruct_exponential_at_order_two() {
        let e = D::exponential(1.0).unwrap();
        let c = model_curve(&e, 2.0);
        let grid: Vec<f64> = (0..=160).map(|i| 4.0 * i as f64 / 160.0).collect();
        let rec = reconstruct_survival(&c, 2.0, &grid).unwrap();
        for (x, v) in rec.iter() {
            assert!((v - (-x).exp()).abs() < 1e-4, "x={x}, v={v}");
        }
    }

    #[test]
    fn constant_curve_reconstructs_a_rayleigh_law() {
        // C = k at order s gives S(x) = exp(-x^2 / (2 s k)).
        let k = 2.0;
        let s = 1.5;
        let c = |_: f64| k;
        let grid: Vec<f64> = (0..=100).map(|i| 3.0 * i as f64 / 100.0).collect();
        let rec = reconstruct_survival(&c, s, &grid).unwrap();
        for (x, v) in rec.iter() {
            let expect = (-x * x / (2.0 * s * k)).exp();
            assert!((v - expect).abs() < 1e-6, "x={x}");
        }
    }

    #[test]
    fn reconstruction_is_monotone_and_starts_at_one() {
        let w = D::weibull(1.5, 2.0).unwrap();
        let c = model_curve(&w, 1.0);
        let grid = default_grid(&w, 50);
        let rec = reconstruct_survival(&c, 1.0, &grid).unwrap();
        assert_eq!(rec.values()[0], 1.0);
        assert!(rec.values().windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn constancy_index_examples() {
        let r = D::rayleigh(2.0).unwrap();
        let grid: Vec<f64> = (0..=40).map(|i| 4.0 * i as f64 / 40.0).collect();
        for &s in &[0.5, 1.0, 2.0, 5.0] {
            assert!(constancy_index(&r, s, &grid).unwrap() < 1e-9, "s={s}");
        }

        let e = D::exponential(1.0).unwrap();
        let idx = constancy_index(&e, 1.0, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(idx, 2.0);

        let u = D::uniform(0.0, 1.0).unwrap();
        assert!(constancy_index(&u, 1.0, &[0.0, 0.25, 0.5]).unwrap() > 0.0);
    }

    #[test]
    fn wmrl_identity_gap_examples() {
        let r = D::rayleigh(1.5).unwrap();
        let grid: Vec<f64> = (0..=30).map(|i| 3.0 * i as f64 / 30.0).collect();
        assert!(wmrl_identity_gap(&r, 3.0, &grid).unwrap() < 1e-9);

        let e = D::exponential(1.0).unwrap();
        let gap = wmrl_identity_gap(&e, 2.0, &[0.0]).unwrap();
        assert!((gap - 0.5).abs() < 1e-12, "{gap}");

        // At s = 1 the two functionals coincide for any law.
        for dist in [D::weibull(1.5, 2.0).unwrap(), D::lomax(5.0, 1.0).unwrap()] {
            let gap = wmrl_identity_gap(&dist, 1.0, &[0.0, 0.5, 1.0]).unwrap();
            assert_eq!(gap, 0.0, "{dist}");
        }
    }

    #[test]
    fn uniqueness_under_tiny_perturbation() {
        let e = D::exponential(1.0).unwrap();
        let c1 = model_curve(&e, 1.0);
        let c2 = |t: f64| c1(t) * (1.0 + 1e-10);
        let grid: Vec<f64> = (0..=80).map(|i| 3.0 * i as f64 / 80.0).collect();
        let r1 = reconstruct_survival(&c1, 1.0, &grid).unwrap();
        let r2 = reconstruct_survival(&c2, 1.0, &grid).unwrap();
        let worst = r1
            .values()
            .iter()
            .zip(r2.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn curve_on_grid_invariants() {
        assert!(CurveOnGrid::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(CurveOnGrid::new(vec![1.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(CurveOnGrid::new(vec![2.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(CurveOnGrid::new(vec![], vec![]).is_err());
        assert!(CurveOnGrid::new(vec![0.0, 0.5], vec![1.0, 2.0]).is_ok());
    }
}
