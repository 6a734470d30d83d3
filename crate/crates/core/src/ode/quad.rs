use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use super::OdeError;

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

// Largest tanh-sinh abscissa parameter. At 5.3 the angular distance of the
// outermost node from an endpoint is about 1e-140, so sin^2 of it is still a
// normal double.
const TAU_MAX: f64 = 5.3;
const MIN_LEVEL: usize = 3;
const MAX_LEVEL: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub err_est: f64,
    pub evaluations: usize,
}

/// Integral over `[lo, hi]` of an integrand with at worst inverse square root
/// singularities at the endpoints.
///
/// The substitution `x = lo + (hi - lo) sin^2(phi)` removes `p = 1/2`
/// endpoint singularities exactly; the smooth integral in `phi` is then
/// evaluated by tanh-sinh refinement until successive levels differ by less
/// than `tol * max(1, |I|)`. Abscissae are snapped to representable points strictly inside
/// the interval and the Jacobian is taken at the snapped point, so `g` is
/// never called on an endpoint.
pub fn quad_singular<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, tol: f64) -> Result<f64, OdeError> {
    check_interval(lo, hi, tol)?;
    let node = |near_lo: bool, near: f64, _far: f64| -> f64 {
        let mut x = if near_lo { lo + near } else { hi - near };
        if x <= lo {
            x = lo.next_up();
        }
        if x >= hi {
            x = hi.next_down();
        }
        let (d_lo, d_hi) = (x - lo, hi - x);
        g(x) * 2.0 * (d_lo * d_hi).sqrt()
    };
    tanh_sinh_sin2(node, hi - lo, tol).map(|r| r.value)
}

/// Like [`quad_singular`], but the integrand also receives the distances
/// `x - lo` and `hi - x`, computed without cancellation. Integrands that
/// subtract nearly equal quantities near an endpoint should use these.
pub fn quad_sin2<G: Fn(f64, f64, f64) -> f64>(
    g: G,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<QuadResult, OdeError> {
    check_interval(lo, hi, tol)?;
    let node = |near_lo: bool, near: f64, far: f64| -> f64 {
        let jac = 2.0 * (near * far).sqrt();
        if near_lo {
            g(lo + near, near, far) * jac
        } else {
            g(hi - near, far, near) * jac
        }
    };
    tanh_sinh_sin2(node, hi - lo, tol)
}

fn check_interval(lo: f64, hi: f64, tol: f64) -> Result<(), OdeError> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(OdeError::InvalidInput(format!(
            "quadrature interval [{lo}, {hi}] must be finite and non-empty"
        )));
    }
    if !(tol > 0.0) {
        return Err(OdeError::InvalidInput(
            "quadrature tol must be positive".into(),
        ));
    }
    Ok(())
}

/// Tanh-sinh over `phi in [0, pi/2]`. `node(near_lo, near, far)` returns the
/// transformed integrand `g(x) dx/dphi` at the abscissa whose distance to the
/// nearer endpoint is `near` (and to the other one `far`).
fn tanh_sinh_sin2<N: FnMut(bool, f64, f64) -> f64>(
    mut node: N,
    len: f64,
    tol: f64,
) -> Result<QuadResult, OdeError> {
    let mut evaluations = 0usize;
    let mut pair = |tau: f64| -> f64 {
        let v = FRAC_PI_2 * tau.sinh();
        let w = FRAC_PI_2 * tau.cosh() / (v.cosh() * v.cosh());
        // angular offset of the node from the nearer endpoint
        let delta = if tau == 0.0 {
            FRAC_PI_4
        } else {
            FRAC_PI_2 / (1.0 + (2.0 * v).exp())
        };
        let (sd, cd) = delta.sin_cos();
        let (near, far) = (len * sd * sd, len * cd * cd);
        if tau == 0.0 {
            evaluations += 1;
            return w * FRAC_PI_4 * node(true, near, far);
        }
        evaluations += 2;
        w * FRAC_PI_4 * (node(true, near, far) + node(false, near, far))
    };

    let mut h = 1.0;
    let mut sum = pair(0.0);
    let mut k = 1;
    while k as f64 * h <= TAU_MAX {
        sum += pair(k as f64 * h);
        k += 1;
    }
    let mut estimate = h * sum;
    let mut err_est = f64::INFINITY;

    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut j = 1;
        while j as f64 * h <= TAU_MAX {
            sum += pair(j as f64 * h);
            j += 2;
        }
        let next = h * sum;
        err_est = (next - estimate).abs();
        estimate = next;
        if !estimate.is_finite() {
            break;
        }
        if level >= MIN_LEVEL && err_est <= tol * estimate.abs().max(1.0) {
            return Ok(QuadResult {
                value: estimate,
                err_est,
                evaluations,
            });
        }
    }
    Err(OdeError::NoConvergence { estimate, err_est })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
