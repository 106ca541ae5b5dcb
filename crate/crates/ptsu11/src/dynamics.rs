//! Biorthogonal quantum dynamics in the original gauge: analytic state pairs
//! carried by the gauge frame, the metric operator relating kets to bras,
//! direct Schrodinger evolution of the non-Hermitian model, the geometric
//! phase by closed form / quadrature / evolution, and position-space
//! wavefunctions.

use crate::fock::{FockSpace, OperatorMatrix};
use crate::gauge::{self, Branch, GaugeSolution, ModelParams};
use crate::numerics::{self, OdeStats};
use crate::{C64, Error, Result};
use nalgebra::DVector;
use std::f64::consts::PI;

/// Right/left eigenvector pair of the non-Hermitian evolution, stored with
/// the convention that inner products conjugate the bra coefficients:
/// <bra|ket> = sum_i conj(bra_i) ket_i.
#[derive(Debug, Clone)]
pub struct BiorthogonalState {
    pub ket: DVector<C64>,
    pub bra: DVector<C64>,
    pub label: usize,
    pub time: f64,
}

impl BiorthogonalState {
    /// <bra | v> with the conjugating pairing.
    pub fn pair(&self, v: &DVector<C64>) -> C64 {
        self.bra.iter().zip(v.iter()).map(|(b, k)| b.conj() * k).sum()
    }
}

/// Bare Fock basis vector |n>.
pub fn kernel_eigenstate(n: usize, space: FockSpace) -> Result<DVector<C64>> {
    if n >= space.cutoff() {
        return Err(Error::IndexOutOfRange {
            index: n,
            limit: space.cutoff(),
        });
    }
    let mut v = DVector::<C64>::zeros(space.cutoff());
    v[n] = C64::new(1.0, 0.0);
    Ok(v)
}

/// Analytic solution pair in the original gauge:
/// ket = e^{-i E_n t} R^{-1} e_n, bra = e^{-i E_n t} R e_n, E_n = Gamma (n + 1/2).
/// The pair solves i d ket/dt = H ket exactly and <bra_m|ket_n> = delta_mn.
pub fn gauge_solution_state(
    params: &ModelParams,
    gauge: &GaugeSolution,
    n: usize,
    t: f64,
    space: FockSpace,
) -> Result<BiorthogonalState> {
    let dim = space.cutoff();
    if n >= dim {
        return Err(Error::IndexOutOfRange {
            index: n,
            limit: dim,
        });
    }
    let tau = (gauge.eta / 2.0).tan();
    if !tau.is_finite() || tau.abs() >= 1.0 {
        return Err(Error::ExponentialDidNotConverge { tau_abs: tau.abs() });
    }
    let phi = params.phase(t);
    let energy = gauge.gamma * (n as f64 + 0.5);
    let phase = C64::new(0.0, -energy * t).exp();
    let mut ket = gauge::gauss_column(dim, gauge.eta, phi, 1.0, n);
    let mut bra = gauge::gauss_column(dim, gauge.eta, phi, -1.0, n);
    ket *= phase;
    bra *= phase;
    Ok(BiorthogonalState {
        ket,
        bra,
        label: n,
        time: t,
    })
}

/// Metric chi(t) = R(t)^2 mapping kets to bras: chi ket_n = bra_n. Exists as
/// a bounded operator only while |tan(eta)| < 1.
pub fn metric_operator(
    gauge: &GaugeSolution,
    params: &ModelParams,
    t: f64,
    space: FockSpace,
) -> Result<OperatorMatrix> {
    let tan_eta = gauge.eta.tan();
    if !tan_eta.is_finite() || tan_eta.abs() >= 1.0 {
        return Err(Error::ExponentialDidNotConverge {
            tau_abs: tan_eta.abs(),
        });
    }
    let chi = gauge::gauss_factorization(space.cutoff(), 2.0 * gauge.eta, params.phase(t), -1.0);
    OperatorMatrix::new(space, chi)
}

/// Trajectory of a direct integration. States are thinned to a bounded count
/// (the final state is always kept); norms are not renormalized anywhere.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<DVector<C64>>,
    pub step_controller_stats: OdeStats,
}

impl EvolutionResult {
    pub fn final_state(&self) -> (f64, &DVector<C64>) {
        (
            *self.times.last().expect("trajectory is never empty"),
            self.states.last().expect("trajectory is never empty"),
        )
    }
}

const TRAJECTORY_CAP: usize = 1025;

/// Integrates i d psi/dt = H(t) psi from t0 to t1 with the adaptive RK5(4)
/// stepper. The model is non-Hermitian: the norm is genuinely not conserved
/// and no renormalization is applied. Truncation places eigenvalues with
/// |Im| growing linearly in the cutoff on the boundary, so long horizons
/// amplify roundoff by exp(0.46 * cutoff * t); see `stability_horizon`.
pub fn evolve(
    params: &ModelParams,
    psi0: &DVector<C64>,
    t0: f64,
    t1: f64,
    space: FockSpace,
    tol: f64,
) -> Result<EvolutionResult> {
    if psi0.len() != space.cutoff() {
        return Err(Error::DimensionMismatch {
            left: psi0.len(),
            right: space.cutoff(),
        });
    }
    let mut times: Vec<f64> = Vec::new();
    let mut states: Vec<DVector<C64>> = Vec::new();
    let mut stride = 1usize;
    let mut count = 0usize;

    let rhs = |t: f64, y: &DVector<C64>, dy: &mut DVector<C64>| {
        gauge::apply_hamiltonian(params, t, y, dy);
        for z in dy.iter_mut() {
            *z = C64::new(z.im, -z.re);
        }
    };
    let observer = |t: f64, y: &DVector<C64>| {
        if count % stride == 0 {
            times.push(t);
            states.push(y.clone());
            if times.len() >= TRAJECTORY_CAP {
                let mut i = 0usize;
                times.retain(|_| {
                    i += 1;
                    (i - 1) % 2 == 0
                });
                let mut j = 0usize;
                states.retain(|_| {
                    j += 1;
                    (j - 1) % 2 == 0
                });
                stride *= 2;
            }
        }
        count += 1;
    };
    let (y_end, stats) = numerics::integrate_adaptive(rhs, t0, t1, psi0.clone(), tol, observer)?;
    if times.last().copied() != Some(t1) {
        times.push(t1);
        states.push(y_end);
    }
    Ok(EvolutionResult {
        times,
        states,
        step_controller_stats: stats,
    })
}

/// Horizon up to which direct integration keeps `target` accuracy: truncation
/// boundary modes amplify roundoff like exp(0.46 * cutoff * t), so
/// t_max = ln(target / eps) / (0.46 * cutoff).
pub fn stability_horizon(space: FockSpace, target: f64) -> f64 {
    if !(target > f64::EPSILON) {
        return 0.0;
    }
    (target / f64::EPSILON).ln() / (0.46 * space.cutoff() as f64)
}

/// gamma_n = pi (n + 1/2)(1 - cos eta) per drive period.
pub fn berry_phase_closed(gauge: &GaugeSolution, params: &ModelParams, n: usize) -> f64 {
    debug_assert!((gauge.period - params.period()).abs() < 1e-12 * params.period());
    PI * (n as f64 + 0.5) * (1.0 - gauge.eta.cos())
}

/// Quadrature value together with the magnitude of its imaginary part,
/// which the exact expression says should vanish.
#[derive(Debug, Clone, Copy)]
pub struct QuadraturePhase {
    pub value: f64,
    pub imag_residual: f64,
}

/// gamma_n as the period integral of the frame-velocity diagonal
/// <n| i R dR^{-1}/dt |n>, by adaptive Gauss-Kronrod to 1e-10 absolute.
pub fn berry_phase_quadrature(
    gauge: &GaugeSolution,
    params: &ModelParams,
    n: usize,
    space: FockSpace,
) -> Result<QuadraturePhase> {
    if n >= space.cutoff() {
        return Err(Error::IndexOutOfRange {
            index: n,
            limit: space.cutoff(),
        });
    }
    debug_assert!((gauge.period - params.period()).abs() < 1e-12 * params.period());
    let f = |t: f64| -> C64 {
        let fv = gauge::frame_velocity(gauge, t, space);
        fv.entries()[(n, n)]
    };
    let (integral, _err) = numerics::gauss_kronrod(f, 0.0, gauge.period, 1e-10)?;
    Ok(QuadraturePhase {
        value: integral.re,
        imag_residual: integral.im.abs(),
    })
}

/// Geometric phase extracted from a direct evolution window.
#[derive(Debug, Clone, Copy)]
pub struct EvolutionPhase {
    /// Geometric phase per full period (window value scaled by T / horizon).
    pub gamma: f64,
    /// arg <bra_frame(horizon) | psi(horizon)>, the raw total phase.
    pub total: f64,
    /// Dynamical phase over the window, from the analytic-pair quadrature.
    pub dynamical: f64,
    /// 2 pi multiples added when unwrapping toward the closed-form target.
    pub wrap_shift: i64,
    /// Actual window length used.
    pub horizon: f64,
    pub stats: OdeStats,
}

/// Evolves ket_n(0) directly and splits the accumulated phase into dynamical
/// and geometric parts. `horizon = None` integrates the full period, so the
/// total phase is arg <bra_n(0)|psi(T)>; a shorter window measures the same
/// geometric rate where the truncated integration is still stable and scales
/// it to the full period. The 2 pi unwrapping toward the closed-form target
/// is recorded in `wrap_shift`.
pub fn berry_phase_from_evolution(
    params: &ModelParams,
    gauge: &GaugeSolution,
    n: usize,
    space: FockSpace,
    tol: f64,
    horizon: Option<f64>,
) -> Result<EvolutionPhase> {
    let period = gauge.period;
    let t_h = horizon.unwrap_or(period).min(period);
    if !(t_h > 0.0) {
        return Err(Error::InvalidInput(format!(
            "evolution window must be positive, got {t_h}"
        )));
    }

    let start = gauge_solution_state(params, gauge, n, 0.0, space)?;
    let run = evolve(params, &start.ket, 0.0, t_h, space, tol)?;
    let (_, psi_end) = run.final_state();

    // Frame bra at the window end, without any energy phase.
    let bra_frame = gauge::gauss_column(space.cutoff(), gauge.eta, params.phase(t_h), -1.0, n);
    let c: C64 = bra_frame
        .iter()
        .zip(psi_end.iter())
        .map(|(b, k)| b.conj() * k)
        .sum();
    let total = c.arg();

    // Dynamical phase from the analytic pair: -int Re <bra|H|ket> dt.
    let integrand = |t: f64| -> C64 {
        let pair = gauge_solution_state(params, gauge, n, t, space)
            .expect("frame exists: checked above");
        let mut h_ket = DVector::<C64>::zeros(space.cutoff());
        gauge::apply_hamiltonian(params, t, &pair.ket, &mut h_ket);
        pair.pair(&h_ket)
    };
    let (dyn_integral, _) = numerics::gauss_kronrod(integrand, 0.0, t_h, 1e-10)?;
    let dynamical = -dyn_integral.re;

    let gamma_window = total - dynamical;
    let target = berry_phase_closed(gauge, params, n) * (t_h / period);
    let wrap_shift = ((target - gamma_window) / (2.0 * PI)).round() as i64;
    let gamma_window = gamma_window + 2.0 * PI * wrap_shift as f64;
    Ok(EvolutionPhase {
        gamma: gamma_window * (period / t_h),
        total,
        dynamical,
        wrap_shift,
        horizon: t_h,
        stats: run.step_controller_stats,
    })
}

/// The three phase routes side by side. The evolution entry is None when the
/// gauge frame has no bounded operator realization (|tan(eta/2)| >= 1).
#[derive(Debug, Clone, Copy)]
pub struct PhaseReport {
    pub gamma_closed: f64,
    pub gamma_quadrature: f64,
    pub gamma_evolution: Option<f64>,
    pub n: usize,
    pub branch: Branch,
}

pub fn phase_report(
    params: &ModelParams,
    gauge: &GaugeSolution,
    n: usize,
    space: FockSpace,
    tol: f64,
    horizon: Option<f64>,
) -> Result<PhaseReport> {
    let gamma_closed = berry_phase_closed(gauge, params, n);
    let quad = berry_phase_quadrature(gauge, params, n, space)?;
    let frame_exists = (gauge.eta / 2.0).tan().abs() < 1.0;
    let gamma_evolution = if frame_exists {
        Some(berry_phase_from_evolution(params, gauge, n, space, tol, horizon)?.gamma)
    } else {
        None
    };
    Ok(PhaseReport {
        gamma_closed,
        gamma_quadrature: quad.value,
        gamma_evolution,
        n,
        branch: params.branch,
    })
}

/// Eigenfunction of the kernel 2 Gamma Sz in position space:
/// u_n(X) = Gamma^{1/4} h_n(sqrt(Gamma) X) with orthonormal Hermite h_n.
/// Gamma <= 0 has no normalizable eigenfunctions.
pub fn kernel_wavefunction(n: usize, gamma: f64, grid: &[f64]) -> Result<Vec<f64>> {
    if !(gamma > 0.0) {
        return Err(Error::NonNormalizable { gamma });
    }
    let scale = gamma.sqrt();
    let amp = gamma.powf(0.25);
    Ok(grid
        .iter()
        .map(|&x| {
            let h = numerics::hermite_functions(n + 1, scale * x);
            amp * h[n]
        })
        .collect())
}

/// Expands Fock coefficients over the oscillator eigenfunctions h_m(X).
pub fn wavefunction_from_coefficients(coeffs: &DVector<C64>, grid: &[f64]) -> Vec<C64> {
    grid.iter()
        .map(|&x| {
            let h = numerics::hermite_functions(coeffs.len(), x);
            coeffs
                .iter()
                .zip(h.iter())
                .map(|(c, hv)| c * *hv)
                .sum()
        })
        .collect()
}

/// Position-space wavefunction of ket_n(t) in the original gauge.
pub fn original_gauge_wavefunction(
    params: &ModelParams,
    gauge: &GaugeSolution,
    n: usize,
    t: f64,
    grid: &[f64],
    space: FockSpace,
) -> Result<Vec<C64>> {
    let state = gauge_solution_state(params, gauge, n, t, space)?;
    Ok(wavefunction_from_coefficients(&state.ket, grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{certify_cutoff, solve_auxiliary};

    fn golden() -> (ModelParams, GaugeSolution) {
        let params = ModelParams::new(2.0, 0.5, 1.0, Branch::Minus).unwrap();
        let gauge = solve_auxiliary(&params).unwrap();
        (params, gauge)
    }

    #[test]
    fn gram_matrix_is_identity_on_certified_space() {
        let (params, gauge) = golden();
        let space = certify_cutoff(&params, &gauge, 8, 16).unwrap();
        let t = 0.77;
        let labels = [0usize, 1, 5, 8];
        for &m in &labels {
            let sm = gauge_solution_state(&params, &gauge, m, t, space).unwrap();
            for &n in &labels {
                let sn = gauge_solution_state(&params, &gauge, n, t, space).unwrap();
                let overlap = sm.pair(&sn.ket);
                let want = if m == n { 1.0 } else { 0.0 };
                assert!(
                    (overlap - C64::new(want, 0.0)).norm() < 1e-10,
                    "({m},{n}): {overlap}"
                );
            }
        }
    }

    #[test]
    fn metric_maps_kets_to_bras() {
        let (params, gauge) = golden();
        let space = certify_cutoff(&params, &gauge, 4, 16).unwrap();
        let t = 1.3;
        let chi = metric_operator(&gauge, &params, t, space).unwrap();
        for n in [0usize, 3] {
            let s = gauge_solution_state(&params, &gauge, n, t, space).unwrap();
            let mapped = chi.entries() * &s.ket;
            let w = space.interior().len();
            let diff: f64 = (0..w)
                .map(|i| (mapped[i] - s.bra[i]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(diff < 1e-8, "n={n}: {diff}");
        }
    }

    #[test]
    fn metric_requires_contractive_doubled_angle() {
        // eta close to pi/2: frame exists (|tan(eta/2)| < 1) but chi = R^2 does not.
        let params = ModelParams::new(0.05, 0.49, 0.05, Branch::Minus).unwrap();
        let gauge = solve_auxiliary(&params).unwrap();
        assert!((gauge.eta / 2.0).tan().abs() < 1.0);
        assert!(gauge.eta.tan().abs() >= 1.0);
        let space = FockSpace::new(16, 2).unwrap();
        assert!(matches!(
            metric_operator(&gauge, &params, 0.0, space),
            Err(Error::ExponentialDidNotConverge { .. })
        ));
    }

    #[test]
    fn evolve_reproduces_diagonal_phases_at_zero_coupling() {
        let params = ModelParams::new(2.0, 0.0, 1.0, Branch::Minus).unwrap();
        let space = FockSpace::new(16, 2).unwrap();
        let psi0 = kernel_eigenstate(2, space).unwrap();
        let period = params.period();
        let run = evolve(&params, &psi0, 0.0, period, space, 1e-11).unwrap();
        let (t_end, psi) = run.final_state();
        assert_eq!(t_end, period);
        // H = Omega Sz: phase e^{-i Omega (n + 1/2)/2 * T} on |2>.
        let want = C64::new(0.0, -2.0 * 1.25 * period).exp();
        assert!((psi[2] - want).norm() < 1e-9, "{}", (psi[2] - want).norm());
        for i in 0..16 {
            if i != 2 {
                assert!(psi[i].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn evolve_is_linear_in_the_initial_state() {
        let (params, _) = golden();
        let space = FockSpace::new(64, 8).unwrap();
        let t1 = params.period() / 8.0;
        let u = kernel_eigenstate(0, space).unwrap();
        let v = kernel_eigenstate(3, space).unwrap();
        let a = C64::new(0.8, -0.3);
        let b = C64::new(-0.2, 0.55);
        let mixed: DVector<C64> = &u * a + &v * b;
        let ru = evolve(&params, &u, 0.0, t1, space, 1e-10).unwrap();
        let rv = evolve(&params, &v, 0.0, t1, space, 1e-10).unwrap();
        let rm = evolve(&params, &mixed, 0.0, t1, space, 1e-10).unwrap();
        let lin: DVector<C64> = ru.final_state().1 * a + rv.final_state().1 * b;
        let diff = (rm.final_state().1 - &lin).norm();
        assert!(diff < 1e-7, "{diff}");
    }

    #[test]
    fn evolve_does_not_conserve_norm() {
        let (params, _) = golden();
        let space = FockSpace::new(128, 16).unwrap();
        let psi0 = kernel_eigenstate(0, space).unwrap();
        let run = evolve(&params, &psi0, 0.0, params.period() / 8.0, space, 1e-9).unwrap();
        let max_dev = run
            .states
            .iter()
            .map(|s| (s.norm() - 1.0).abs())
            .fold(0.0f64, f64::max);
        assert!(max_dev > 0.1, "{max_dev}");
    }

    #[test]
    fn evolve_dimension_mismatch() {
        let (params, _) = golden();
        let space = FockSpace::new(16, 2).unwrap();
        let psi0 = DVector::<C64>::zeros(8);
        assert!(matches!(
            evolve(&params, &psi0, 0.0, 1.0, space, 1e-9),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn trajectory_thinning_keeps_endpoints() {
        let (params, _) = golden();
        let space = FockSpace::new(64, 8).unwrap();
        let psi0 = kernel_eigenstate(0, space).unwrap();
        let t1 = params.period() / 4.0;
        let run = evolve(&params, &psi0, 0.0, t1, space, 1e-11).unwrap();
        assert!(run.times.len() <= TRAJECTORY_CAP + 1);
        assert_eq!(run.times[0], 0.0);
        assert_eq!(*run.times.last().unwrap(), t1);
        assert!(run.times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn quadrature_phase_matches_closed_form() {
        let (params, gauge) = golden();
        let space = FockSpace::new(32, 4).unwrap();
        for n in [0usize, 3] {
            let closed = berry_phase_closed(&gauge, &params, n);
            let q = berry_phase_quadrature(&gauge, &params, n, space).unwrap();
            assert!((q.value - closed).abs() < 1e-10, "n={n}");
            assert!(q.imag_residual < 1e-12);
        }
        let closed0 = berry_phase_closed(&gauge, &params, 0);
        assert!((closed0 - 0.0806080869231663).abs() < 1e-15);
    }

    #[test]
    fn windowed_evolution_phase_matches_closed_form() {
        let (params, gauge) = golden();
        let space = certify_cutoff(&params, &gauge, 8, 16).unwrap();
        let window = (gauge.period / 8.0).min(stability_horizon(space, 1e-8));
        let phase =
            berry_phase_from_evolution(&params, &gauge, 0, space, 1e-10, Some(window)).unwrap();
        let closed = berry_phase_closed(&gauge, &params, 0);
        assert!((phase.gamma - closed).abs() < 1e-8, "{}", phase.gamma - closed);
        assert_eq!(phase.wrap_shift, 0);
        assert!((phase.horizon - window).abs() < 1e-15);
    }

    #[test]
    fn phase_report_skips_evolution_on_wild_branch() {
        let params = ModelParams::new(2.0, 0.5, 1.0, Branch::Plus).unwrap();
        let gauge = solve_auxiliary(&params).unwrap();
        let space = FockSpace::new(32, 4).unwrap();
        let rep = phase_report(&params, &gauge, 1, space, 1e-9, None).unwrap();
        assert!(rep.gamma_evolution.is_none());
        assert!((rep.gamma_quadrature - rep.gamma_closed).abs() < 1e-10);
        assert_eq!(rep.n, 1);
    }

    #[test]
    fn kernel_wavefunction_values() {
        let grid = [0.0f64];
        let v = kernel_wavefunction(0, 1.0, &grid).unwrap();
        assert!((v[0] - std::f64::consts::PI.powf(-0.25)).abs() < 1e-15);
        let v1 = kernel_wavefunction(1, 1.0, &grid).unwrap();
        assert!(v1[0].abs() < 1e-15);
        assert!(matches!(
            kernel_wavefunction(0, 0.0, &grid),
            Err(Error::NonNormalizable { .. })
        ));
        assert!(matches!(
            kernel_wavefunction(2, -0.5, &grid),
            Err(Error::NonNormalizable { .. })
        ));
    }

    #[test]
    fn kernel_wavefunction_normalized_on_grid() {
        let (_, gauge) = golden();
        let steps = 4000usize;
        let (lo, hi) = (-9.0f64, 9.0f64);
        let dx = (hi - lo) / steps as f64;
        let grid: Vec<f64> = (0..=steps).map(|i| lo + i as f64 * dx).collect();
        for n in 0..4 {
            let v = kernel_wavefunction(n, gauge.gamma, &grid).unwrap();
            let mut norm = 0.0;
            for (i, val) in v.iter().enumerate() {
                let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
                norm += w * val * val * dx;
            }
            assert!((norm - 1.0).abs() < 1e-6, "n={n}: {norm}");
        }
    }

    #[test]
    fn original_wavefunction_biorthogonal_norm_and_periodicity() {
        let (params, gauge) = golden();
        let space = FockSpace::new(64, 8).unwrap();
        let steps = 4000usize;
        let (lo, hi) = (-10.0f64, 10.0f64);
        let dx = (hi - lo) / steps as f64;
        let grid: Vec<f64> = (0..=steps).map(|i| lo + i as f64 * dx).collect();
        let t = 0.6;

        let psi = original_gauge_wavefunction(&params, &gauge, 0, t, &grid, space).unwrap();
        let state = gauge_solution_state(&params, &gauge, 0, t, space).unwrap();
        let phi_bra = wavefunction_from_coefficients(&state.bra, &grid);

        // Biorthogonal (metric-weighted) norm integrates to one.
        let mut pairing = C64::new(0.0, 0.0);
        // Plain norm matches the coefficient norm (Parseval).
        let mut plain = 0.0f64;
        for i in 0..=steps {
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            pairing += phi_bra[i].conj() * psi[i] * w * dx;
            plain += psi[i].norm_sqr() * w * dx;
        }
        assert!((pairing - C64::new(1.0, 0.0)).norm() < 1e-6, "{pairing}");
        assert!((plain - state.ket.norm_sqr()).abs() < 1e-6);

        let psi_next =
            original_gauge_wavefunction(&params, &gauge, 0, t + gauge.period, &grid, space)
                .unwrap();
        let max_diff = psi
            .iter()
            .zip(psi_next.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        // One full period multiplies the state by e^{-i E_0 T} only.
        let phase = C64::new(0.0, -gauge.gamma * 0.5 * gauge.period).exp();
        let max_frame_diff = psi
            .iter()
            .zip(psi_next.iter())
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0f64, f64::max);
        assert!(max_frame_diff < 1e-10, "{max_frame_diff}");
        assert!(max_diff > 1e-3, "energy phase should move the raw values");
    }

    #[test]
    fn stability_horizon_scales_inversely_with_cutoff() {
        let s128 = FockSpace::new(128, 16).unwrap();
        let s256 = FockSpace::new(256, 16).unwrap();
        let h128 = stability_horizon(s128, 1e-8);
        let h256 = stability_horizon(s256, 1e-8);
        assert!(h128 > 0.25 && h128 < 0.35, "{h128}");
        assert!((h128 / h256 - 2.0).abs() < 1e-12);
        assert_eq!(stability_horizon(s128, 0.0), 0.0);
    }
}
