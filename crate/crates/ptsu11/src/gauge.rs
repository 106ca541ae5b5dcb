//! Non-unitary gauge reduction of the driven su(1,1) Hamiltonian
//! H(t) = Omega*Sz + G*(S+ e^{i w t} - S- e^{-i w t}).
//!
//! A time-periodic similarity R(t) = exp(-(eta/2)(S+ e^{i phi} + S- e^{-i phi})),
//! phi = w t, maps H into the static kernel H' = 2*Gamma*Sz once eta solves
//! ((Omega + w)/2) sin(eta) + G cos(eta) = 0. R is Hermitian positive-definite
//! but not unitary; it is built exactly from its normal-ordered factorization
//! R = exp(-tau e^{i phi} S+) sech(eta/2)^{-(n+1/2)} ... exp(-tau e^{-i phi} S-),
//! tau = tan(eta/2), which is entirely lower/diagonal/upper banded and avoids
//! dense matrix exponentials.

use crate::fock::{self, FockSpace, OperatorMatrix, build_su11};
use crate::{C64, Error, Result};
use nalgebra::DMatrix;
use std::f64::consts::PI;

const TAU_2PI: f64 = 2.0 * PI;

/// Which root of the auxiliary equation the gauge follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(&self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "+" | "+1" | "plus" => Ok(Branch::Plus),
            "-" | "-1" | "minus" => Ok(Branch::Minus),
            other => Err(format!("branch must be one of +, +1, plus, -, -1, minus; got {other:?}")),
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        })
    }
}

/// Model parameters: level splitting Omega (omega_cap), two-photon drive
/// strength g, drive frequency drive > 0, and the gauge branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega_cap: f64,
    pub g: f64,
    pub drive: f64,
    pub branch: Branch,
}

impl ModelParams {
    pub fn new(omega_cap: f64, g: f64, drive: f64, branch: Branch) -> Result<Self> {
        if !omega_cap.is_finite() || !g.is_finite() || !drive.is_finite() {
            return Err(Error::InvalidInput(format!(
                "parameters must be finite: Omega={omega_cap}, G={g}, omega={drive}"
            )));
        }
        if drive <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "drive frequency must be positive, got {drive}"
            )));
        }
        Ok(ModelParams {
            omega_cap,
            g,
            drive,
            branch,
        })
    }

    /// Drive period T = 2 pi / omega.
    pub fn period(&self) -> f64 {
        TAU_2PI / self.drive
    }

    /// Drive phase phi(t) = omega t.
    pub fn phase(&self, t: f64) -> f64 {
        self.drive * t
    }
}

/// Solution of the auxiliary equation: rotation angle eta, discriminant
/// Delta, kernel scale Gamma, and the drive period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeSolution {
    pub delta: f64,
    pub eta: f64,
    pub gamma: f64,
    pub period: f64,
}

impl GaugeSolution {
    pub fn drive(&self) -> f64 {
        TAU_2PI / self.period
    }

    pub fn phase(&self, t: f64) -> f64 {
        self.drive() * t
    }
}

/// Solves ((Omega + w)/2) sin(eta) + G cos(eta) = 0 on the requested branch.
///
/// With b the branch sign and Delta = sqrt((w + Omega)^2 + 4 G^2):
///   eta   = atan2(2 G b, -b (w + Omega)),
///   Gamma = -(b Delta + w) / 2.
/// The atan2 form fixes the quadrant so that cos(eta) = -b (w + Omega)/Delta
/// and sin(eta) = 2 G b / Delta without dividing by a vanishing Delta.
pub fn solve_auxiliary(params: &ModelParams) -> Result<GaugeSolution> {
    let b = params.branch.sign();
    let s = params.drive + params.omega_cap;
    let delta = (s * s + 4.0 * params.g * params.g).sqrt();
    if delta == 0.0 {
        return Err(Error::DegenerateParameters);
    }
    let eta = (2.0 * params.g * b).atan2(-b * s);
    let gamma = -(b * delta + params.drive) / 2.0;
    Ok(GaugeSolution {
        delta,
        eta,
        gamma,
        period: params.period(),
    })
}

/// H(t) = Omega Sz + G (S+ e^{i phi} - S- e^{-i phi}), phi = omega t.
pub fn build_hamiltonian(params: &ModelParams, t: f64, space: FockSpace) -> OperatorMatrix {
    let eip = C64::new(0.0, params.phase(t)).exp();
    su11_combination(
        space,
        C64::new(params.omega_cap, 0.0),
        C64::new(params.g, 0.0) * eip,
        C64::new(-params.g, 0.0) * eip.conj(),
    )
}

/// Applies H(t) to a state in O(cutoff) using the band structure.
pub fn apply_hamiltonian(
    params: &ModelParams,
    t: f64,
    state: &nalgebra::DVector<C64>,
    out: &mut nalgebra::DVector<C64>,
) {
    let n = state.len();
    let eip = C64::new(0.0, params.phase(t)).exp();
    let cp = C64::new(params.g, 0.0) * eip;
    let cm = C64::new(-params.g, 0.0) * eip.conj();
    for i in 0..n {
        let mut acc = state[i] * (params.omega_cap * fock::sz_diagonal(i));
        if i >= 2 {
            acc += cp * fock::pair_amplitude(i - 2) * state[i - 2];
        }
        if i + 2 < n {
            acc += cm * fock::pair_amplitude(i) * state[i + 2];
        }
        out[i] = acc;
    }
}

/// cz*Sz + cp*S+ + cm*S- assembled directly on the band.
pub fn su11_combination(space: FockSpace, cz: C64, cp: C64, cm: C64) -> OperatorMatrix {
    let n = space.cutoff();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = cz * fock::sz_diagonal(i);
    }
    for i in 0..n.saturating_sub(2) {
        let amp = fock::pair_amplitude(i);
        m[(i + 2, i)] = cp * amp;
        m[(i, i + 2)] = cm * amp;
    }
    OperatorMatrix::new(space, m).expect("band assembly is finite by construction")
}

/// Same band as `su11_combination` but truncated to a w x w window.
fn band_window(w: usize, cz: C64, cp: C64, cm: C64) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::zeros(w, w);
    for i in 0..w {
        m[(i, i)] = cz * fock::sz_diagonal(i);
    }
    for i in 0..w.saturating_sub(2) {
        let amp = fock::pair_amplitude(i);
        m[(i + 2, i)] = cp * amp;
        m[(i, i + 2)] = cm * amp;
    }
    m
}

/// exp(z S+): lower-triangular, column-sparse polynomial (S+ is nilpotent
/// on the truncated space).
pub(crate) fn exp_splus(n: usize, z: C64) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::identity(n, n);
    for col in 0..n {
        let mut term = C64::new(1.0, 0.0);
        let mut k = 0usize;
        loop {
            let row = col + 2 * (k + 1);
            if row >= n {
                break;
            }
            term *= z * 0.5 * ((row - 1) as f64 * row as f64).sqrt() / (k as f64 + 1.0);
            m[(row, col)] = term;
            k += 1;
        }
    }
    m
}

/// exp(z S-): upper-triangular mirror of `exp_splus`.
pub(crate) fn exp_sminus(n: usize, z: C64) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::identity(n, n);
    for col in 0..n {
        let mut term = C64::new(1.0, 0.0);
        let mut k = 0usize;
        while col >= 2 * (k + 1) {
            let row = col - 2 * (k + 1);
            term *= z * 0.5 * (((row + 1) as f64) * ((row + 2) as f64)).sqrt() / (k as f64 + 1.0);
            m[(row, col)] = term;
            k += 1;
        }
    }
    m
}

/// Normal-ordered factorization of exp(-(s*eta/2)(S+ e^{i phi} + S- e^{-i phi})):
/// sign = -1 gives the operator itself, sign = +1 its inverse. tau = sign*tan(eta/2),
/// diagonal sec(eta/2)^{n+1/2}.
pub(crate) fn gauss_factorization(n: usize, eta: f64, phi: f64, sign: f64) -> DMatrix<C64> {
    let tau = sign * (eta / 2.0).tan();
    let sec = 1.0 / (eta / 2.0).cos();
    let eip = C64::new(0.0, phi).exp();
    let l = exp_splus(n, eip * tau);
    let mut du = exp_sminus(n, eip.conj() * tau);
    for i in 0..n {
        let d = C64::new(sec.powf(i as f64 + 0.5), 0.0);
        for j in i..n {
            du[(i, j)] *= d;
        }
    }
    l * du
}

/// Single column `col` of the factorization, in O(cutoff^2) without forming
/// the full matrix. Used for gauge frames and cutoff certification.
pub(crate) fn gauss_column(n: usize, eta: f64, phi: f64, sign: f64, col: usize) -> nalgebra::DVector<C64> {
    let tau = sign * (eta / 2.0).tan();
    let sec = 1.0 / (eta / 2.0).cos();
    let eip = C64::new(0.0, phi).exp();
    let zm = eip.conj() * tau;
    let zp = eip * tau;

    // U e_col: support {col, col-2, ...}.
    let mut u: Vec<(usize, C64)> = Vec::with_capacity(col / 2 + 1);
    let mut term = C64::new(1.0, 0.0);
    u.push((col, term));
    let mut k = 0usize;
    while col >= 2 * (k + 1) {
        let row = col - 2 * (k + 1);
        term *= zm * 0.5 * (((row + 1) as f64) * ((row + 2) as f64)).sqrt() / (k as f64 + 1.0);
        u.push((row, term));
        k += 1;
    }

    // L (D (U e_col)): column j of L has support {j, j+2, ...}.
    let mut out = nalgebra::DVector::<C64>::zeros(n);
    for &(j, v) in &u {
        let mut t2 = v * sec.powf(j as f64 + 0.5);
        out[j] += t2;
        let mut kk = 0usize;
        loop {
            let row = j + 2 * (kk + 1);
            if row >= n {
                break;
            }
            t2 *= zp * 0.5 * ((row - 1) as f64 * row as f64).sqrt() / (kk as f64 + 1.0);
            out[row] += t2;
            kk += 1;
        }
    }
    out
}

/// Builds (R(t), R(t)^{-1}). Fails with ExponentialDidNotConverge when
/// |tan(eta/2)| >= 1: there the normal-ordered series has no bounded limit
/// and the gauge frame does not exist as an operator.
pub fn build_r(
    gauge: &GaugeSolution,
    params: &ModelParams,
    t: f64,
    space: FockSpace,
) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let tau = (gauge.eta / 2.0).tan();
    if !tau.is_finite() || tau.abs() >= 1.0 {
        return Err(Error::ExponentialDidNotConverge { tau_abs: tau.abs() });
    }
    let n = space.cutoff();
    let phi = params.phase(t);
    let r = gauss_factorization(n, gauge.eta, phi, -1.0);
    let rinv = gauss_factorization(n, gauge.eta, phi, 1.0);
    Ok((
        OperatorMatrix::new(space, r)?,
        OperatorMatrix::new(space, rinv)?,
    ))
}

/// Closed-form adjoint actions R S R^{-1} of the three generators.
#[derive(Debug, Clone)]
pub struct TransformedGenerators {
    pub sz: OperatorMatrix,
    pub splus: OperatorMatrix,
    pub sminus: OperatorMatrix,
}

/// Band coefficients (cz, cp, cm) of R S R^{-1} for S in {Sz, S+, S-}.
fn adjoint_coefficients(eta: f64, phi: f64) -> [[C64; 3]; 3] {
    let (sin_eta, cos_eta) = eta.sin_cos();
    let ch2 = (eta / 2.0).cos().powi(2);
    let sh2 = (eta / 2.0).sin().powi(2);
    let eip = C64::new(0.0, phi).exp();
    let eim = eip.conj();
    let re = |x: f64| C64::new(x, 0.0);
    [
        // R Sz R^{-1}
        [
            re(cos_eta),
            re(sin_eta / 2.0) * eip,
            re(-sin_eta / 2.0) * eim,
        ],
        // R S+ R^{-1}
        [re(-sin_eta) * eim, re(ch2), re(sh2) * eim * eim],
        // R S- R^{-1}
        [re(sin_eta) * eip, re(sh2) * eip * eip, re(ch2)],
    ]
}

pub fn transformed_generators(
    gauge: &GaugeSolution,
    t: f64,
    space: FockSpace,
) -> TransformedGenerators {
    let c = adjoint_coefficients(gauge.eta, gauge.phase(t));
    TransformedGenerators {
        sz: su11_combination(space, c[0][0], c[0][1], c[0][2]),
        splus: su11_combination(space, c[1][0], c[1][1], c[1][2]),
        sminus: su11_combination(space, c[2][0], c[2][1], c[2][2]),
    }
}

/// Band coefficients of the frame velocity i R dR^{-1}/dt:
///   2 w sin^2(eta/2) Sz - (w/2) sin(eta) e^{i phi} S+ + (w/2) sin(eta) e^{-i phi} S-.
/// `flip_pair_sign` negates the S+/S- coefficients (fault-injection hook for
/// exercising the verification paths).
fn frame_velocity_coefficients(gauge: &GaugeSolution, t: f64, flip_pair_sign: bool) -> [C64; 3] {
    let w = gauge.drive();
    let eta = gauge.eta;
    let eip = C64::new(0.0, gauge.phase(t)).exp();
    let fault = if flip_pair_sign { -1.0 } else { 1.0 };
    let cz = C64::new(2.0 * w * (eta / 2.0).sin().powi(2), 0.0);
    let cp = C64::new(-fault * 0.5 * w * eta.sin(), 0.0) * eip;
    let cm = C64::new(fault * 0.5 * w * eta.sin(), 0.0) * eip.conj();
    [cz, cp, cm]
}

/// i R dR^{-1}/dt in closed band form.
pub fn frame_velocity(gauge: &GaugeSolution, t: f64, space: FockSpace) -> OperatorMatrix {
    let c = frame_velocity_coefficients(gauge, t, false);
    su11_combination(space, c[0], c[1], c[2])
}

/// Band coefficients of H'(t) = R H R^{-1} - i R dR^{-1}/dt, assembled from
/// the closed-form adjoints. When eta solves the auxiliary equation the S+/S-
/// coefficients cancel and the Sz coefficient equals 2*Gamma.
fn gauge_transform_coefficients(
    params: &ModelParams,
    gauge: &GaugeSolution,
    t: f64,
    flip_frame_sign: bool,
) -> [C64; 3] {
    let phi = params.phase(t);
    let adj = adjoint_coefficients(gauge.eta, phi);
    let frame = frame_velocity_coefficients(gauge, t, flip_frame_sign);
    let eip = C64::new(0.0, phi).exp();
    let h_omega = C64::new(params.omega_cap, 0.0);
    let h_plus = C64::new(params.g, 0.0) * eip;
    let h_minus = C64::new(-params.g, 0.0) * eip.conj();
    let mut out = [C64::new(0.0, 0.0); 3];
    for i in 0..3 {
        out[i] = h_omega * adj[0][i] + h_plus * adj[1][i] + h_minus * adj[2][i] - frame[i];
    }
    out
}

/// H'(t) = R H R^{-1} - i R dR^{-1}/dt via the closed-form band assembly.
pub fn gauge_transform(
    params: &ModelParams,
    gauge: &GaugeSolution,
    t: f64,
    space: FockSpace,
) -> OperatorMatrix {
    gauge_transform_faulted(params, gauge, t, space, false)
}

/// `gauge_transform` with the optional frame-velocity sign fault injected.
pub fn gauge_transform_faulted(
    params: &ModelParams,
    gauge: &GaugeSolution,
    t: f64,
    space: FockSpace,
    flip_frame_sign: bool,
) -> OperatorMatrix {
    let c = gauge_transform_coefficients(params, gauge, t, flip_frame_sign);
    su11_combination(space, c[0], c[1], c[2])
}

/// H'(t) computed by dense conjugation with the factorized R, as an
/// independent cross-check of the band assembly. O(cutoff^3).
pub fn gauge_transform_conjugation(
    params: &ModelParams,
    gauge: &GaugeSolution,
    t: f64,
    space: FockSpace,
) -> Result<OperatorMatrix> {
    let (r, rinv) = build_r(gauge, params, t, space)?;
    let h = build_hamiltonian(params, t, space);
    let fv = frame_velocity(gauge, t, space);
    let entries = r.entries() * h.entries() * rinv.entries() - fv.entries();
    OperatorMatrix::new(space, entries)
}

/// Frobenius residuals of the four conjugation identities on a test window:
/// R S+/- R^{-1} and R Sz R^{-1} against their closed adjoint forms, and the
/// product-rule frame velocity against its closed form.
#[derive(Debug, Clone, Copy)]
pub struct BchReport {
    pub splus: f64,
    pub sminus: f64,
    pub sz: f64,
    pub frame: f64,
}

impl BchReport {
    pub fn max(&self) -> f64 {
        self.splus.max(self.sminus).max(self.sz).max(self.frame)
    }
}

/// Residuals on the space's interior window.
pub fn verify_bch(
    params: &ModelParams,
    gauge: &GaugeSolution,
    t: f64,
    space: FockSpace,
) -> Result<BchReport> {
    let w = space.interior().len();
    verify_bch_windowed(params, gauge, t, space, w, false)
}

/// Residuals on the leading w x w window, optionally with the frame-velocity
/// sign fault injected into the closed form under test.
pub fn verify_bch_windowed(
    params: &ModelParams,
    gauge: &GaugeSolution,
    t: f64,
    space: FockSpace,
    window: usize,
    flip_frame_sign: bool,
) -> Result<BchReport> {
    let n = space.cutoff();
    let w = window.min(n);
    let (r, rinv) = build_r(gauge, params, t, space)?;
    let r = r.entries();
    let rinv = rinv.entries();
    let gen = build_su11(space);

    // Windowed slab products P = (R S R^{-1})[0..w, 0..w]; exact in exact
    // arithmetic up to the truncation tail that the margin absorbs.
    let slab = |s: &DMatrix<C64>| -> DMatrix<C64> {
        let y = s * rinv.columns(0, w);
        r.rows(0, w) * y
    };
    let p_z = slab(gen.sz.entries());
    let p_p = slab(gen.splus.entries());
    let p_m = slab(gen.sminus.entries());

    let phi = params.phase(t);
    let adj = adjoint_coefficients(gauge.eta, phi);
    let resid = |p: &DMatrix<C64>, c: &[C64; 3]| -> f64 {
        (p - band_window(w, c[0], c[1], c[2])).norm()
    };
    let sz = resid(&p_z, &adj[0]);
    let splus = resid(&p_p, &adj[1]);
    let sminus = resid(&p_m, &adj[2]);

    // Product rule: dR^{-1}/dt = i w { (sin(eta)/2)(e^{i phi} S+ - e^{-i phi} S-)
    // + 2 sin^2(eta/2) Sz } R^{-1}, so i R dR^{-1}/dt is the same su(1,1)
    // combination of the slab products with an overall factor -w.
    let wfreq = gauge.drive();
    let eip = C64::new(0.0, phi).exp();
    let half_sin = 0.5 * gauge.eta.sin();
    let sh2 = (gauge.eta / 2.0).sin().powi(2);
    let c_p = C64::new(-wfreq * half_sin, 0.0) * eip;
    let c_m = C64::new(wfreq * half_sin, 0.0) * eip.conj();
    let c_z = C64::new(-wfreq * 2.0 * sh2, 0.0);
    let mut lhs4 = DMatrix::<C64>::zeros(w, w);
    for i in 0..w {
        for j in 0..w {
            lhs4[(i, j)] = c_p * p_p[(i, j)] + c_m * p_m[(i, j)] + c_z * p_z[(i, j)];
        }
    }
    let frame_c = frame_velocity_coefficients(gauge, t, flip_frame_sign);
    let frame = (&lhs4 - band_window(w, frame_c[0], frame_c[1], frame_c[2])).norm();

    Ok(BchReport {
        splus,
        sminus,
        sz,
        frame,
    })
}

/// Richardson finite-difference check of the closed frame velocity:
/// returns || i R(t) D_h R^{-1}(t) - closed || on the interior window,
/// with the 5-point fourth-order stencil at h = period * 1e-5.
pub fn verify_frame_velocity_fd(
    params: &ModelParams,
    gauge: &GaugeSolution,
    t: f64,
    space: FockSpace,
) -> Result<f64> {
    let h = gauge.period * 1e-5;
    let rinv_at = |tt: f64| -> Result<DMatrix<C64>> {
        Ok(build_r(gauge, params, tt, space)?.1.into_entries())
    };
    let rp1 = rinv_at(t + h)?;
    let rm1 = rinv_at(t - h)?;
    let rp2 = rinv_at(t + 2.0 * h)?;
    let rm2 = rinv_at(t - 2.0 * h)?;
    let mut deriv = (rp1 - rm1) * C64::new(8.0 / (12.0 * h), 0.0);
    deriv += (rm2 - rp2) * C64::new(1.0 / (12.0 * h), 0.0);
    let (r, _) = build_r(gauge, params, t, space)?;
    let fd = r.entries() * deriv * C64::i();
    let closed = frame_velocity(gauge, t, space);
    let w = space.interior().len();
    let diff = fd.view((0, 0), (w, w)) - closed.entries().view((0, 0), (w, w));
    Ok(diff.norm())
}

/// || Pi conj(H(-t)) Pi - H(t) ||_F: the symmetry that protects a real kernel.
/// conj is entrywise; the parity sandwich flips entries with odd i + j.
pub fn pt_check(params: &ModelParams, t: f64, space: FockSpace) -> f64 {
    let h_plus = build_hamiltonian(params, t, space);
    let h_minus = build_hamiltonian(params, -t, space);
    let n = space.cutoff();
    let mut acc = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            let lhs = h_minus.entries()[(i, j)].conj() * sign;
            acc += (lhs - h_plus.entries()[(i, j)]).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Kernel eigenvalues E_n = Gamma (n + 1/2) for n = 0..n_max-1.
pub fn spectrum(gauge: &GaugeSolution, n_max: usize) -> Vec<f64> {
    (0..n_max)
        .map(|n| gauge.gamma * (n as f64 + 0.5))
        .collect()
}

/// Instantaneous eigenvalues of H(t): sqrt(Omega^2 + 4 G^2) (n + 1/2) / 2,
/// independent of t because H(t) is a time-dependent similarity of
/// Omega Sz + G (S+ - S-).
pub fn instantaneous_spectrum(params: &ModelParams, n_max: usize) -> Vec<f64> {
    let scale = (params.omega_cap * params.omega_cap + 4.0 * params.g * params.g).sqrt();
    (0..n_max).map(|n| scale * 0.5 * (n as f64 + 0.5)).collect()
}

/// Lowest `count` near-real eigenvalues of the truncated H(t) by complex
/// Schur reduction; eigenvalues with |Im| >= 1e-6 are truncation artifacts
/// and are discarded before sorting by real part.
pub fn hamiltonian_eigenvalues(
    params: &ModelParams,
    t: f64,
    space: FockSpace,
    count: usize,
) -> Result<Vec<f64>> {
    let h = build_hamiltonian(params, t, space);
    let schur = nalgebra::linalg::Schur::try_new(h.into_entries(), f64::EPSILON, 0)
        .ok_or_else(|| Error::InvalidInput("Schur iteration did not converge".into()))?;
    let (_, t_mat) = schur.unpack();
    let mut real: Vec<f64> = t_mat
        .diagonal()
        .iter()
        .filter(|z| z.im.abs() < 1e-6)
        .map(|z| z.re)
        .collect();
    real.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    if real.len() < count {
        return Err(Error::InvalidInput(format!(
            "only {} near-real eigenvalues below cutoff {}, need {count}",
            real.len(),
            space.cutoff()
        )));
    }
    real.truncate(count);
    Ok(real)
}

/// Smallest power-of-two cutoff whose gauge-frame columns for levels up to
/// n_max have tail norm below 1e-10 in the top 2*margin rows. The tail bound
/// is t-independent because the drive only changes entry phases.
pub fn certify_cutoff(
    params: &ModelParams,
    gauge: &GaugeSolution,
    n_max: usize,
    margin: usize,
) -> Result<FockSpace> {
    const TAIL_TOL: f64 = 1e-10;
    const HARD_MAX: usize = 2048;
    let tau = (gauge.eta / 2.0).tan();
    if !tau.is_finite() || tau.abs() >= 1.0 {
        return Err(Error::ExponentialDidNotConverge { tau_abs: tau.abs() });
    }
    debug_assert!((gauge.period - params.period()).abs() < 1e-12 * params.period());
    let mut n = 64usize.max((n_max + 2 * margin + 2).next_power_of_two());
    loop {
        let mut worst = 0.0f64;
        let mut cols = vec![n_max];
        if n_max >= 1 {
            cols.push(n_max - 1);
        }
        for &col in &cols {
            for sign in [-1.0f64, 1.0] {
                let v = gauss_column(n, gauge.eta, 0.0, sign, col);
                let mut tail = 0.0;
                for i in n.saturating_sub(2 * margin)..n {
                    tail += v[i].norm_sqr();
                }
                worst = worst.max(tail.sqrt());
            }
        }
        if worst < TAIL_TOL {
            return FockSpace::new(n, margin);
        }
        if n >= HARD_MAX {
            return Err(Error::CutoffNotConverged {
                tail: worst,
                cutoff: n,
            });
        }
        n *= 2;
    }
}
