//! Shared numerical kernels: adaptive Runge-Kutta 5(4) for complex ODE systems,
//! adaptive Gauss-Kronrod quadrature, composite Gauss-Legendre quadrature on the
//! torus, orthonormal Hermite functions, a Hermitian matrix exponential, and a
//! deterministic splitmix64 generator.

use crate::{C64, Error, Result};
use nalgebra::{DMatrix, DVector};

/// Deterministic splitmix64 stream; used wherever reproducible draws are needed.
#[derive(Debug, Clone)]
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Step statistics from the adaptive integrator.
#[derive(Debug, Clone, Copy, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub min_step: f64,
    pub max_step: f64,
}

const SAFETY: f64 = 0.9;
const SHRINK_LIMIT: f64 = 0.2;
const GROW_LIMIT: f64 = 5.0;

/// Dormand-Prince 5(4) with a scaled max-norm error controller.
///
/// Integrates dy/dt = rhs(t, y) from t0 to t1 (t1 > t0). `tol` is the relative
/// local-error tolerance; the scale floor 1e-300 keeps the controller defined
/// at y = 0. `observer` is called after every accepted step (including the
/// initial point).
pub fn integrate_adaptive<F, O>(
    mut rhs: F,
    t0: f64,
    t1: f64,
    y0: DVector<C64>,
    tol: f64,
    mut observer: O,
) -> Result<(DVector<C64>, OdeStats)>
where
    F: FnMut(f64, &DVector<C64>, &mut DVector<C64>),
    O: FnMut(f64, &DVector<C64>),
{
    if !(t1 > t0) || !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "integration interval/tolerance invalid: t0={t0}, t1={t1}, tol={tol}"
        )));
    }
    let dim = y0.len();
    let span = t1 - t0;
    let h_min = span * 1e-14;

    let mut t = t0;
    let mut y = y0;
    let mut h = span * 1e-4;
    let mut stats = OdeStats {
        min_step: f64::INFINITY,
        ..OdeStats::default()
    };
    observer(t, &y);

    let mut k = vec![DVector::<C64>::zeros(dim); 7];
    let mut ytmp = DVector::<C64>::zeros(dim);
    let mut ynew = DVector::<C64>::zeros(dim);

    // Dormand-Prince coefficients.
    const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [&[f64]; 6] = [
        &[1.0 / 5.0],
        &[3.0 / 40.0, 9.0 / 40.0],
        &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
        &[
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
        ],
        &[
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
        ],
        &[
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    // Fifth-order weights equal A[5] (FSAL row); E = b5 - b4 gives the error.
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];

    loop {
        if t >= t1 {
            return Ok((y, stats));
        }
        if h < h_min {
            return Err(Error::StepSizeUnderflow { t });
        }
        if t + h > t1 {
            h = t1 - t;
        }

        rhs(t, &y, &mut k[0]);
        for stage in 0..6 {
            ytmp.copy_from(&y);
            for (j, &aj) in A[stage].iter().enumerate() {
                if aj != 0.0 {
                    ytmp.axpy(C64::new(h * aj, 0.0), &k[j], C64::new(1.0, 0.0));
                }
            }
            let (head, tail) = k.split_at_mut(stage + 1);
            let _ = head;
            rhs(t + C[stage] * h, &ytmp, &mut tail[0]);
        }
        // k[6] = f at the 5th-order solution node (c = 1); ytmp currently holds
        // the 5th-order solution because A[5] equals the b5 weights.
        ynew.copy_from(&ytmp);

        let mut err_inf: f64 = 0.0;
        let mut ymax: f64 = 0.0;
        for i in 0..dim {
            let mut e = C64::new(0.0, 0.0);
            for (j, &ej) in E.iter().enumerate() {
                if ej != 0.0 {
                    e += k[j][i] * ej;
                }
            }
            err_inf = err_inf.max((e * h).norm());
            ymax = ymax.max(y[i].norm().max(ynew[i].norm()));
        }
        let scale = 1e-300 + tol * ymax;
        let ratio = err_inf / scale;

        if ratio.is_nan() || ratio > 1.0 {
            stats.rejected += 1;
            let factor = if ratio.is_nan() {
                SHRINK_LIMIT
            } else {
                (SAFETY * ratio.powf(-0.2)).clamp(SHRINK_LIMIT, 0.9)
            };
            h *= factor;
            continue;
        }

        t += h;
        y.copy_from(&ynew);
        stats.accepted += 1;
        stats.min_step = stats.min_step.min(h);
        stats.max_step = stats.max_step.max(h);
        observer(t, &y);

        let factor = if ratio == 0.0 {
            GROW_LIMIT
        } else {
            (SAFETY * ratio.powf(-0.2)).clamp(SHRINK_LIMIT, GROW_LIMIT)
        };
        h *= factor;
    }
}

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gk15(f: &mut impl FnMut(f64) -> C64, a: f64, b: f64) -> (C64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut kron = C64::new(0.0, 0.0);
    let mut gauss = C64::new(0.0, 0.0);
    for (i, &x) in XGK.iter().enumerate() {
        let (flo, fhi);
        if x == 0.0 {
            let fm = f(mid);
            flo = fm;
            fhi = C64::new(0.0, 0.0);
        } else {
            flo = f(mid - half * x);
            fhi = f(mid + half * x);
        }
        let sum = flo + fhi;
        kron += sum * WGK[i];
        // Odd Kronrod indices are the embedded Gauss nodes (the center counts once).
        if i % 2 == 1 {
            gauss += sum * WG[i / 2];
        }
    }
    kron *= half;
    gauss *= half;
    ((kron), (kron - gauss).norm())
}

/// Adaptive Gauss-Kronrod integral of f over [a, b] to absolute tolerance.
/// Returns (integral, error estimate).
pub fn gauss_kronrod(
    mut f: impl FnMut(f64) -> C64,
    a: f64,
    b: f64,
    abs_tol: f64,
) -> Result<(C64, f64)> {
    const MAX_DEPTH: usize = 28;
    fn recurse(
        f: &mut impl FnMut(f64) -> C64,
        a: f64,
        b: f64,
        tol: f64,
        depth: usize,
    ) -> std::result::Result<(C64, f64), f64> {
        let (val, err) = gk15(f, a, b);
        if err <= tol || err == 0.0 {
            return Ok((val, err));
        }
        if depth >= MAX_DEPTH {
            return Err(err);
        }
        let mid = 0.5 * (a + b);
        let left = recurse(f, a, mid, 0.5 * tol, depth + 1)?;
        let right = recurse(f, mid, b, 0.5 * tol, depth + 1)?;
        Ok((left.0 + right.0, left.1 + right.1))
    }
    recurse(&mut f, a, b, abs_tol, 0).map_err(|error| Error::QuadratureNotConverged { error })
}

// 8-point Gauss-Legendre on [-1, 1].
const XGL: [f64; 4] = [
    0.1834346424956498,
    0.5255324099163290,
    0.7966664774136267,
    0.9602898564975363,
];
const WGL: [f64; 4] = [
    0.3626837833783620,
    0.3137066458778873,
    0.2223810344533745,
    0.1012285362903763,
];

fn gl8_nodes(a: f64, b: f64) -> [(f64, f64); 8] {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut out = [(0.0, 0.0); 8];
    for i in 0..4 {
        out[2 * i] = (mid - half * XGL[i], half * WGL[i]);
        out[2 * i + 1] = (mid + half * XGL[i], half * WGL[i]);
    }
    out
}

/// Composite tensor Gauss-Legendre integral of f over [0, 2pi] x [0, 2pi]
/// with `panels` panels per axis (8 nodes per panel).
pub fn gl2d_torus(f: &impl Fn(f64, f64) -> C64, panels: usize) -> C64 {
    let tau = 2.0 * std::f64::consts::PI;
    let width = tau / panels as f64;
    let mut total = C64::new(0.0, 0.0);
    for pi in 0..panels {
        let (a1, b1) = (pi as f64 * width, (pi as f64 + 1.0) * width);
        for (x1, w1) in gl8_nodes(a1, b1) {
            for pj in 0..panels {
                let (a2, b2) = (pj as f64 * width, (pj as f64 + 1.0) * width);
                for (x2, w2) in gl8_nodes(a2, b2) {
                    total += f(x1, x2) * (w1 * w2);
                }
            }
        }
    }
    total
}

/// Doubles the panel count until successive refinements agree to `abs_tol`.
pub fn gl2d_torus_adaptive(f: &impl Fn(f64, f64) -> C64, abs_tol: f64) -> Result<C64> {
    let mut panels = 1;
    let mut prev = gl2d_torus(f, panels);
    loop {
        panels *= 2;
        let next = gl2d_torus(f, panels);
        let diff = (next - prev).norm();
        if diff < abs_tol {
            return Ok(next);
        }
        if panels >= 64 {
            return Err(Error::QuadratureNotConverged { error: diff });
        }
        prev = next;
    }
}

/// Orthonormal Hermite functions h_0..h_{n_max-1} at xi:
/// h_0 = pi^{-1/4} exp(-xi^2/2), h_{k+1} = xi*sqrt(2/(k+1))*h_k - sqrt(k/(k+1))*h_{k-1}.
pub fn hermite_functions(n_max: usize, xi: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n_max);
    if n_max == 0 {
        return h;
    }
    let h0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    h.push(h0);
    if n_max == 1 {
        return h;
    }
    h.push(xi * std::f64::consts::SQRT_2 * h0);
    for k in 1..n_max - 1 {
        let kf = k as f64;
        let next =
            xi * (2.0 / (kf + 1.0)).sqrt() * h[k] - (kf / (kf + 1.0)).sqrt() * h[k - 1];
        h.push(next);
    }
    h
}

/// exp(M) for Hermitian M via eigendecomposition. Reference route for tests
/// and cross-checks; production gauge operators use the exact normal-ordered
/// factorization instead.
pub fn expm_hermitian(m: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut scaled = eig.eigenvectors.clone();
    for j in 0..n {
        let e = eig.eigenvalues[j].exp();
        for i in 0..n {
            scaled[(i, j)] *= e;
        }
    }
    &scaled * eig.eigenvectors.adjoint()
}
