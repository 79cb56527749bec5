//! Globally adaptive Gauss-Kronrod quadrature.
//!
//! A 7-point Gauss / 15-point Kronrod pair is applied per interval; the
//! interval with the largest error estimate is bisected until the summed
//! error estimate meets the tolerance. Semi-infinite integrals are mapped
//! onto (0,1) with x = a + t/(1-t) before integration.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Value and error bound returned by the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
}

// 15-point Kronrod abscissae on [-1, 1] (positive half, descending).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
// 7-point Gauss weights.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];
// 15-point Kronrod weights.
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// One Gauss-Kronrod evaluation over [a, b]; returns (value, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = kronrod.abs();
    let mut fv = [0.0f64; 15];
    fv[7] = fc;

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        let sum = f1 + f2;
        kronrod += WGK[j] * sum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            // XGK[1], XGK[3], XGK[5] are the Gauss nodes.
            gauss += WG[j / 2] * sum;
        }
    }

    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let value = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    // QUADPACK-style error rescaling.
    let raw = ((kronrod - gauss) * half).abs();
    let mut err = raw;
    if res_asc != 0.0 && raw != 0.0 {
        let scale = (200.0 * raw / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

#[derive(Debug)]
struct Segment {
    a: f64,
    b: f64,
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
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

const MAX_SEGMENTS: usize = 4000;

/// Integrate `f` over the finite interval [a, b] to relative tolerance
/// `rel_tol`. Integrals that are genuinely near zero need
/// [`integrate_with_abs`] with an absolute tolerance instead.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<Quadrature> {
    integrate_with_abs(f, a, b, rel_tol, 1e-300)
}

/// Integrate with both a relative and an absolute tolerance; convergence
/// is declared when either is met.
pub fn integrate_with_abs<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integrate requires finite endpoints".into()));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, abs_error: 0.0 });
    }

    let mut heap: BinaryHeap<Segment> = BinaryHeap::new();
    let init = 8;
    for i in 0..init {
        let lo = a + (b - a) * i as f64 / init as f64;
        let hi = a + (b - a) * (i + 1) as f64 / init as f64;
        let (value, error) = gk15(&f, lo, hi);
        heap.push(Segment { a: lo, b: hi, value, error });
    }

    let mut frozen: Vec<Segment> = Vec::new();
    loop {
        let err_sum: f64 =
            heap.iter().map(|s| s.error).sum::<f64>() + frozen.iter().map(|s| s.error).sum::<f64>();
        let val_sum: f64 =
            heap.iter().map(|s| s.value).sum::<f64>() + frozen.iter().map(|s| s.value).sum::<f64>();
        let tol = (rel_tol * val_sum.abs()).max(abs_tol).max(1e-300);

        if err_sum <= tol {
            return Ok(finish(heap, frozen));
        }
        if heap.len() + frozen.len() >= MAX_SEGMENTS || heap.is_empty() {
            let q = finish(heap, frozen);
            if q.abs_error <= (1e-9 * q.value.abs()).max(abs_tol) {
                return Ok(q);
            }
            return Err(Error::QuadratureFailed { estimate: q.value, error_bound: q.abs_error });
        }

        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        // Cannot be split further in f64; keep its contribution as-is.
        if mid <= worst.a || mid >= worst.b {
            frozen.push(worst);
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }
}

fn finish(heap: BinaryHeap<Segment>, frozen: Vec<Segment>) -> Quadrature {
    let mut segs: Vec<Segment> = heap.into_vec();
    segs.extend(frozen);
    segs.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
    let value = segs.iter().map(|s| s.value).sum();
    let abs_error = segs.iter().map(|s| s.error).sum();
    Quadrature { value, abs_error }
}

/// Integrate `f` over [a, +inf) by the substitution x = a + (u/(1-u))^3.
///
/// The cubic map softens algebraic tail decay: an integrand falling like
/// x^(-q) becomes (1-u)^(3q-4) near u = 1, bounded for q >= 4/3 and only
/// mildly singular below that, so the adaptive subdivision converges where
/// a linear map would stall. The integrand must decay at infinity;
/// evaluations that overflow to non-finite values in the far tail are
/// treated as zero.
pub fn integrate_to_inf<F: Fn(f64) -> f64>(f: F, a: f64, rel_tol: f64) -> Result<Quadrature> {
    integrate_to_inf_with_abs(f, a, rel_tol, 1e-300)
}

/// Semi-infinite integral with both tolerances; see [`integrate_with_abs`].
pub fn integrate_to_inf_with_abs<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Quadrature> {
    let g = move |u: f64| {
        let one_minus = 1.0 - u;
        let r = u / one_minus;
        let x = a + r * r * r;
        if !x.is_finite() {
            return 0.0;
        }
        let fx = f(x);
        if fx == 0.0 {
            return 0.0;
        }
        let jac = 3.0 * u * u / (one_minus * one_minus * one_minus * one_minus);
        let v = fx * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_with_abs(g, 0.0, 1.0, rel_tol, abs_tol)
}
