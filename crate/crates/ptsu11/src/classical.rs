//! Classical counterpart of the gauge reduction: a complexified canonical
//! transformation turns the quadratic non-Hermitian Hamiltonian
//! H(x, p, t) = (Omega/4 + i(G/2)sin phi) x^2 + (Omega/4 - i(G/2)sin phi) p^2
//!              - i G cos(phi) x p, phi = omega t,
//! into the rotor H' = (Gamma/2)(X^2 + P^2). The module carries the map, its
//! generating function, the Lagrangian-equivalence verification, action-angle
//! coordinates, the Hannay angle, and direct trajectory integration.

use crate::gauge::{self, GaugeSolution, ModelParams};
use crate::numerics::{self, SplitMix64};
use crate::{C64, Error, Result};
use nalgebra::DVector;
use std::f64::consts::PI;

/// Phase-space point of the complexified classical model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPhasePoint {
    pub x: C64,
    pub p: C64,
    pub t: f64,
}

/// Action-angle coordinates of the rotor: I >= 0, Theta taken mod 2 pi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionAngle {
    pub action: f64,
    pub angle: f64,
}

impl ActionAngle {
    pub fn new(action: f64, angle: f64) -> Result<Self> {
        if !(action >= 0.0) || !angle.is_finite() {
            return Err(Error::InvalidInput(format!(
                "action must be non-negative and angle finite, got I={action}, Theta={angle}"
            )));
        }
        Ok(ActionAngle {
            action,
            angle: angle.rem_euclid(2.0 * PI),
        })
    }
}

/// Hannay angle summary: closed form, quadrature, and the residual of the
/// quantum-classical correspondence gamma_n + (n + 1/2) dtheta = 0.
#[derive(Debug, Clone, Copy)]
pub struct HannayResult {
    pub dtheta_closed: f64,
    pub dtheta_quadrature: f64,
    pub correspondence_residual: f64,
}

/// Linear map (X, P) -> (x, p): x = a X + b P, p = c X + d P, det = 1.
#[derive(Debug, Clone, Copy)]
pub struct MapCoefficients {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl MapCoefficients {
    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }
}

/// Coefficients at drive phase phi = (2 pi / period) t:
/// a = cos(eta/2) + i sin(phi) sin(eta/2), b = c = -i cos(phi) sin(eta/2),
/// d = cos(eta/2) - i sin(phi) sin(eta/2).
pub fn map_coefficients(gauge: &GaugeSolution, t: f64) -> MapCoefficients {
    let phi = gauge.phase(t);
    let ch = (gauge.eta / 2.0).cos();
    let sh = (gauge.eta / 2.0).sin();
    let (alpha, beta) = phi.sin_cos();
    MapCoefficients {
        a: C64::new(ch, alpha * sh),
        b: C64::new(0.0, -beta * sh),
        c: C64::new(0.0, -beta * sh),
        d: C64::new(ch, -alpha * sh),
    }
}

/// Drive-phase derivative of the map coefficients (d/dphi).
fn map_coefficients_phase_derivative(gauge: &GaugeSolution, t: f64) -> MapCoefficients {
    let phi = gauge.phase(t);
    let sh = (gauge.eta / 2.0).sin();
    let (alpha, beta) = phi.sin_cos();
    MapCoefficients {
        a: C64::new(0.0, beta * sh),
        b: C64::new(0.0, alpha * sh),
        c: C64::new(0.0, alpha * sh),
        d: C64::new(0.0, -beta * sh),
    }
}

/// (x, p) = (a X + b P, c X + d P).
pub fn canonical_map(x_new: C64, p_new: C64, t: f64, gauge: &GaugeSolution) -> (C64, C64) {
    let m = map_coefficients(gauge, t);
    (m.a * x_new + m.b * p_new, m.c * x_new + m.d * p_new)
}

/// (X, P) from (x, p); uses det = 1.
pub fn inverse_canonical_map(x: C64, p: C64, t: f64, gauge: &GaugeSolution) -> (C64, C64) {
    let m = map_coefficients(gauge, t);
    (m.d * x - m.b * p, -m.c * x + m.a * p)
}

/// Quadratic-form coefficients (f_xx, f_xp, f_pp) of the generating function
/// F(X, P, t) = f_xx X^2/2 + f_xp X P + f_pp P^2/2 with
/// f_xx = -a c, f_xp = 1 - a d, f_pp = -b d.
fn generating_coefficients(m: &MapCoefficients) -> (C64, C64, C64) {
    (
        -m.a * m.c,
        C64::new(1.0, 0.0) - m.a * m.d,
        -m.b * m.d,
    )
}

/// Generating function value F(X, P, t).
pub fn generating_function(
    x_new: C64,
    p_new: C64,
    t: f64,
    gauge: &GaugeSolution,
    params: &ModelParams,
) -> C64 {
    debug_assert!((gauge.period - params.period()).abs() < 1e-12 * params.period());
    let m = map_coefficients(gauge, t);
    let (fxx, fxp, fpp) = generating_coefficients(&m);
    fxx * x_new * x_new * 0.5 + fxp * x_new * p_new + fpp * p_new * p_new * 0.5
}

/// (q_xx, q_pp, q_xp) with H = q_xx x^2 + q_pp p^2 + q_xp x p.
pub fn hamiltonian_coefficients(params: &ModelParams, t: f64) -> (C64, C64, C64) {
    let phi = params.phase(t);
    let (sin_phi, cos_phi) = phi.sin_cos();
    let q_xx = C64::new(params.omega_cap / 4.0, 0.5 * params.g * sin_phi);
    let q_pp = C64::new(params.omega_cap / 4.0, -0.5 * params.g * sin_phi);
    let q_xp = C64::new(0.0, -params.g * cos_phi);
    (q_xx, q_pp, q_xp)
}

/// H(x, p, t) of the complexified classical model.
pub fn classical_hamiltonian(z: &ComplexPhasePoint, params: &ModelParams) -> C64 {
    let (q_xx, q_pp, q_xp) = hamiltonian_coefficients(params, z.t);
    q_xx * z.x * z.x + q_pp * z.p * z.p + q_xp * z.x * z.p
}

/// Coefficients (h_xx, h_pp, h_xp) of the transformed Hamiltonian
/// H'(X, P) = h_xx X^2 + h_pp P^2 + h_xp X P at time t, assembled as
/// H(map) - p * dx/dt|_{X,P} - dF/dt|_{X,P}.
pub(crate) fn transformed_coefficients(
    params: &ModelParams,
    gauge: &GaugeSolution,
    t: f64,
) -> (C64, C64, C64) {
    let w = gauge.drive();
    let m = map_coefficients(gauge, t);
    let mp = map_coefficients_phase_derivative(gauge, t);
    let (da, db, dc, dd) = (mp.a * w, mp.b * w, mp.c * w, mp.d * w);
    let (q_xx, q_pp, q_xp) = hamiltonian_coefficients(params, t);

    // d/dt of the generating-function coefficients.
    let dfxx = -(da * m.c + m.a * dc);
    let dfxp = -(da * m.d + m.a * dd);
    let dfpp = -(db * m.d + m.b * dd);

    let h_xx = q_xx * m.a * m.a + q_pp * m.c * m.c + q_xp * m.a * m.c - m.c * da - dfxx * 0.5;
    let h_pp = q_xx * m.b * m.b + q_pp * m.d * m.d + q_xp * m.b * m.d - m.d * db - dfpp * 0.5;
    let h_xp = q_xx * m.a * m.b * 2.0 + q_pp * m.c * m.d * 2.0 + q_xp * (m.a * m.d + m.b * m.c)
        - (m.c * db + m.d * da)
        - dfxp;
    (h_xx, h_pp, h_xp)
}

/// Transformed Hamiltonian with its coefficient certificate.
#[derive(Debug, Clone, Copy)]
pub struct TransformedHamiltonian {
    pub xx: C64,
    pub pp: C64,
    pub xp: C64,
    pub gamma: f64,
    /// Largest coefficient deviation from (Gamma/2, Gamma/2, 0) over the
    /// checked times.
    pub max_deviation: f64,
}

/// Assembles H' and checks that it is the static rotor (Gamma/2)(X^2 + P^2)
/// at fixed and randomized times, to 1e-12 per coefficient.
pub fn transformed_hamiltonian(
    params: &ModelParams,
    gauge: &GaugeSolution,
) -> Result<TransformedHamiltonian> {
    const TOL: f64 = 1e-12;
    let period = gauge.period;
    let mut times = vec![0.0, period / 7.0, period / 3.0];
    let mut rng = SplitMix64::new(0x48414e4e41593031);
    for _ in 0..10 {
        times.push(rng.uniform(0.0, period));
    }
    let half_gamma = C64::new(gauge.gamma / 2.0, 0.0);
    let mut max_dev = 0.0f64;
    let mut first = None;
    for &t in &times {
        let (h_xx, h_pp, h_xp) = transformed_coefficients(params, gauge, t);
        if first.is_none() {
            first = Some((h_xx, h_pp, h_xp));
        }
        for (name, value, expected) in [
            ("xx", h_xx, half_gamma),
            ("pp", h_pp, half_gamma),
            ("xp", h_xp, C64::new(0.0, 0.0)),
        ] {
            let dev = (value - expected).norm();
            max_dev = max_dev.max(dev);
            if dev >= TOL {
                return Err(Error::CoefficientMismatch {
                    name,
                    value,
                    expected,
                });
            }
        }
    }
    let (xx, pp, xp) = first.expect("time grid is non-empty");
    Ok(TransformedHamiltonian {
        xx,
        pp,
        xp,
        gamma: (xx + pp).re,
        max_deviation: max_dev,
    })
}

/// Max over random samples of |P dX/dt - H' - (p dx/dt - H) - dF/dt|, the
/// Lagrangian one-form equivalence of the two descriptions. The flow
/// (dX/dt, dP/dt) is generated by the assembled H' coefficients, not by the
/// closed-form rotor.
pub fn verify_gauge_equivalence(
    params: &ModelParams,
    gauge: &GaugeSolution,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = SplitMix64::new(seed);
    let period = gauge.period;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x_new = C64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        let p_new = C64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        let t = rng.uniform(0.0, period);

        let (h_xx, h_pp, h_xp) = transformed_coefficients(params, gauge, t);
        let h_new = h_xx * x_new * x_new + h_pp * p_new * p_new + h_xp * x_new * p_new;
        let x_dot_new = h_xp * x_new + h_pp * p_new * 2.0;
        let p_dot_new = -(h_xx * x_new * 2.0 + h_xp * p_new);

        let w = gauge.drive();
        let m = map_coefficients(gauge, t);
        let mp = map_coefficients_phase_derivative(gauge, t);
        let (x, p) = (m.a * x_new + m.b * p_new, m.c * x_new + m.d * p_new);
        let x_dot = (mp.a * w) * x_new + (mp.b * w) * p_new + m.a * x_dot_new + m.b * p_dot_new;

        let z = ComplexPhasePoint { x, p, t };
        let h_old = classical_hamiltonian(&z, params);

        let (fxx, fxp, fpp) = generating_coefficients(&m);
        let dfxx = -((mp.a * w) * m.c + m.a * (mp.c * w));
        let dfxp = -((mp.a * w) * m.d + m.a * (mp.d * w));
        let dfpp = -((mp.b * w) * m.d + m.b * (mp.d * w));
        let df_dt = dfxx * x_new * x_new * 0.5
            + dfxp * x_new * p_new
            + dfpp * p_new * p_new * 0.5
            + (fxx * x_new + fxp * p_new) * x_dot_new
            + (fxp * x_new + fpp * p_new) * p_dot_new;

        let residual = p_new * x_dot_new - h_new - (p * x_dot - h_old) - df_dt;
        worst = worst.max(residual.norm());
    }
    Ok(worst)
}

/// (X, P) = (sqrt(2I) sin Theta, sqrt(2I) cos Theta); then H' = Gamma I.
pub fn action_angle_map(aa: &ActionAngle) -> (f64, f64) {
    let r = (2.0 * aa.action).sqrt();
    (r * aa.angle.sin(), r * aa.angle.cos())
}

/// Torus average (1/2pi) int dTheta dphi p(Theta, phi) d x(Theta, phi)/dphi
/// at fixed action, by composite Gauss-Legendre with panel doubling.
pub fn hannay_bracket(gauge: &GaugeSolution, action: f64, abs_tol: f64) -> Result<C64> {
    let sqrt2i = (2.0 * action).sqrt();
    let f = |theta: f64, phi: f64| -> C64 {
        let x_new = C64::new(sqrt2i * theta.sin(), 0.0);
        let p_new = C64::new(sqrt2i * theta.cos(), 0.0);
        // Map coefficients at drive phase phi directly.
        let ch = (gauge.eta / 2.0).cos();
        let sh = (gauge.eta / 2.0).sin();
        let (alpha, beta) = phi.sin_cos();
        let c = C64::new(0.0, -beta * sh);
        let d = C64::new(ch, -alpha * sh);
        let da = C64::new(0.0, beta * sh);
        let db = C64::new(0.0, alpha * sh);
        let p = c * x_new + d * p_new;
        let dx_dphi = da * x_new + db * p_new;
        p * dx_dphi
    };
    let integral = numerics::gl2d_torus_adaptive(&f, abs_tol)?;
    Ok(integral / C64::new(2.0 * PI, 0.0))
}

/// Quadrature Hannay angle: minus the action slope of the bracket, with the
/// imaginary residual and an affine-linearity check at a third action.
#[derive(Debug, Clone, Copy)]
pub struct HannayQuadrature {
    pub value: f64,
    pub imag_residual: f64,
    pub linearity_residual: f64,
}

pub fn hannay_angle_quadrature(
    params: &ModelParams,
    gauge: &GaugeSolution,
) -> Result<HannayQuadrature> {
    debug_assert!((gauge.period - params.period()).abs() < 1e-12 * params.period());
    const TOL: f64 = 1e-10;
    let b1 = hannay_bracket(gauge, 1.0, TOL)?;
    let b2 = hannay_bracket(gauge, 2.0, TOL)?;
    let b3 = hannay_bracket(gauge, 3.0, TOL)?;
    let slope = b2 - b1;
    let linearity = (b3 - b1 - slope * 2.0).norm();
    Ok(HannayQuadrature {
        value: -slope.re,
        imag_residual: slope.im.abs(),
        linearity_residual: linearity,
    })
}

/// Closed-form Hannay shift per period: pi (cos eta - 1).
pub fn hannay_angle_closed(params: &ModelParams, gauge: &GaugeSolution) -> f64 {
    debug_assert!((gauge.period - params.period()).abs() < 1e-12 * params.period());
    PI * (gauge.eta.cos() - 1.0)
}

/// Quantum-classical correspondence at level n: the quadrature Berry phase
/// and the quadrature Hannay angle satisfy gamma_n + (n + 1/2) dtheta = 0.
pub fn correspondence_check(params: &ModelParams, n: usize) -> Result<HannayResult> {
    let gauge = gauge::solve_auxiliary(params)?;
    let dtheta_closed = hannay_angle_closed(params, &gauge);
    let quad = hannay_angle_quadrature(params, &gauge)?;
    let cutoff = (n + 8).next_power_of_two().max(16);
    let space = crate::fock::FockSpace::new(cutoff, 2)?;
    let berry = crate::dynamics::berry_phase_quadrature(&gauge, params, n, space)?;
    let residual = berry.value + (n as f64 + 0.5) * quad.value;
    Ok(HannayResult {
        dtheta_closed,
        dtheta_quadrature: quad.value,
        correspondence_residual: residual,
    })
}

/// Integrates Hamilton's equations of the complexified model from z0.t
/// (t0 must match z0.t) to t1. Returns the thinned trajectory.
pub fn integrate_trajectory(
    params: &ModelParams,
    z0: &ComplexPhasePoint,
    t0: f64,
    t1: f64,
    tol: f64,
) -> Result<Vec<ComplexPhasePoint>> {
    if (z0.t - t0).abs() > 1e-12 * t0.abs().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "initial point carries t={}, integration starts at t={t0}",
            z0.t
        )));
    }
    let y0 = DVector::from_vec(vec![z0.x, z0.p]);
    let mut points: Vec<ComplexPhasePoint> = Vec::new();
    let rhs = |t: f64, y: &DVector<C64>, dy: &mut DVector<C64>| {
        let (q_xx, q_pp, q_xp) = hamiltonian_coefficients(params, t);
        dy[0] = q_pp * y[1] * 2.0 + q_xp * y[0];
        dy[1] = -(q_xx * y[0] * 2.0 + q_xp * y[1]);
    };
    let observer = |t: f64, y: &DVector<C64>| {
        points.push(ComplexPhasePoint {
            x: y[0],
            p: y[1],
            t,
        });
    };
    let (y_end, _stats) = numerics::integrate_adaptive(rhs, t0, t1, y0, tol, observer)?;
    if points.last().map(|q| q.t) != Some(t1) {
        points.push(ComplexPhasePoint {
            x: y_end[0],
            p: y_end[1],
            t: t1,
        });
    }
    Ok(points)
}

/// Exact endpoint: pull back to rotor coordinates at t0, rotate by
/// Gamma (t1 - t0), push forward at t1.
pub fn analytic_trajectory_endpoint(
    gauge: &GaugeSolution,
    z0: &ComplexPhasePoint,
    t1: f64,
) -> ComplexPhasePoint {
    let (x0, p0) = inverse_canonical_map(z0.x, z0.p, z0.t, gauge);
    let angle = gauge.gamma * (t1 - z0.t);
    let (s, c) = angle.sin_cos();
    let x1 = x0 * c + p0 * s;
    let p1 = -x0 * s + p0 * c;
    let (x, p) = canonical_map(x1, p1, t1, gauge);
    ComplexPhasePoint { x, p, t: t1 }
}
