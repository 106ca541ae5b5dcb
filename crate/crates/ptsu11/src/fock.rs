//! Truncated Fock space and the dense operator algebra on it: ladder
//! operators, the su(1,1) generators realized by two-photon combinations,
//! commutators, and bosonic parity.

use crate::{C64, Error, Result};
use nalgebra::DMatrix;

/// Finite Fock basis {|0>, ..., |cutoff-1>} with a declared boundary margin.
///
/// The margin marks how many top levels are considered contaminated by
/// truncation; residual checks are evaluated on the interior block only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    cutoff: usize,
    boundary_margin: usize,
}

impl FockSpace {
    /// Requires cutoff >= 4 and boundary_margin < cutoff / 2.
    pub fn new(cutoff: usize, boundary_margin: usize) -> Result<Self> {
        if cutoff < 4 {
            return Err(Error::InvalidInput(format!(
                "cutoff must be at least 4, got {cutoff}"
            )));
        }
        if boundary_margin >= cutoff / 2 {
            return Err(Error::InvalidInput(format!(
                "boundary_margin {boundary_margin} must be below cutoff/2 = {}",
                cutoff / 2
            )));
        }
        Ok(FockSpace {
            cutoff,
            boundary_margin,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn boundary_margin(&self) -> usize {
        self.boundary_margin
    }

    /// Indices unaffected by the declared truncation margin.
    pub fn interior(&self) -> std::ops::Range<usize> {
        0..self.cutoff - self.boundary_margin
    }
}

/// Dense complex operator tied to a FockSpace. All entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    space: FockSpace,
    entries: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn new(space: FockSpace, entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != space.cutoff() || entries.ncols() != space.cutoff() {
            return Err(Error::DimensionMismatch {
                left: entries.nrows(),
                right: space.cutoff(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput(
                "operator entries must be finite".into(),
            ));
        }
        Ok(OperatorMatrix { space, entries })
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.entries
    }

    /// Frobenius norm of the sub-block rows x cols.
    pub fn block_norm(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> f64 {
        let mut acc = 0.0;
        for i in rows {
            for j in cols.clone() {
                acc += self.entries[(i, j)].norm_sqr();
            }
        }
        acc.sqrt()
    }
}

/// Annihilation and creation operators: a|n> = sqrt(n)|n-1>, adag|n> = sqrt(n+1)|n+1>.
pub fn build_ladder(space: FockSpace) -> (OperatorMatrix, OperatorMatrix) {
    let n = space.cutoff();
    let mut a = DMatrix::<C64>::zeros(n, n);
    let mut adag = DMatrix::<C64>::zeros(n, n);
    for m in 0..n - 1 {
        let amp = ((m + 1) as f64).sqrt();
        a[(m, m + 1)] = C64::new(amp, 0.0);
        adag[(m + 1, m)] = C64::new(amp, 0.0);
    }
    (
        OperatorMatrix { space, entries: a },
        OperatorMatrix {
            space,
            entries: adag,
        },
    )
}

/// su(1,1) generators in the two-photon realization:
/// Sz = (a^dag a + 1/2)/2, S+ = (a^dag)^2/2, S- = a^2/2.
#[derive(Debug, Clone)]
pub struct Su11Generators {
    pub sz: OperatorMatrix,
    pub splus: OperatorMatrix,
    pub sminus: OperatorMatrix,
}

/// Band amplitude of S+/S- between |n> and |n+2>: sqrt((n+1)(n+2))/2.
pub(crate) fn pair_amplitude(n: usize) -> f64 {
    0.5 * (((n + 1) as f64) * ((n + 2) as f64)).sqrt()
}

/// Diagonal of Sz at level n: (n + 1/2)/2.
pub(crate) fn sz_diagonal(n: usize) -> f64 {
    0.5 * (n as f64 + 0.5)
}

pub fn build_su11(space: FockSpace) -> Su11Generators {
    let n = space.cutoff();
    let mut sz = DMatrix::<C64>::zeros(n, n);
    let mut splus = DMatrix::<C64>::zeros(n, n);
    let mut sminus = DMatrix::<C64>::zeros(n, n);
    for m in 0..n {
        sz[(m, m)] = C64::new(sz_diagonal(m), 0.0);
    }
    for m in 0..n.saturating_sub(2) {
        let amp = C64::new(pair_amplitude(m), 0.0);
        splus[(m + 2, m)] = amp;
        sminus[(m, m + 2)] = amp;
    }
    Su11Generators {
        sz: OperatorMatrix { space, entries: sz },
        splus: OperatorMatrix {
            space,
            entries: splus,
        },
        sminus: OperatorMatrix {
            space,
            entries: sminus,
        },
    }
}

/// [A, B] = AB - BA. Both operators must share the cutoff.
pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    if a.space.cutoff() != b.space.cutoff() {
        return Err(Error::DimensionMismatch {
            left: a.space.cutoff(),
            right: b.space.cutoff(),
        });
    }
    let entries = &a.entries * &b.entries - &b.entries * &a.entries;
    Ok(OperatorMatrix {
        space: a.space,
        entries,
    })
}

/// Bosonic parity Pi = diag((-1)^n). Pi a Pi = -a, Pi^2 = 1.
pub fn parity_operator(space: FockSpace) -> OperatorMatrix {
    let n = space.cutoff();
    let mut p = DMatrix::<C64>::zeros(n, n);
    for m in 0..n {
        p[(m, m)] = C64::new(if m % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    OperatorMatrix { space, entries: p }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(n: usize, margin: usize) -> FockSpace {
        FockSpace::new(n, margin).unwrap()
    }

    #[test]
    fn space_validation() {
        assert!(FockSpace::new(3, 0).is_err());
        assert!(FockSpace::new(4, 2).is_err());
        assert!(FockSpace::new(4, 1).is_ok());
        let s = space(128, 16);
        assert_eq!(s.interior(), 0..112);
    }

    #[test]
    fn ladder_entries() {
        let (a, adag) = build_ladder(space(6, 1));
        for m in 0..5usize {
            let amp = ((m + 1) as f64).sqrt();
            assert_eq!(a.entries()[(m, m + 1)].re, amp);
            assert_eq!(adag.entries()[(m + 1, m)].re, amp);
        }
        assert_eq!(a.entries()[(5, 5)], C64::new(0.0, 0.0));
    }

    #[test]
    fn ladder_commutator_identity_with_boundary_defect() {
        let s = space(8, 1);
        let (a, adag) = build_ladder(s);
        let c = commutator(&a, &adag).unwrap();
        for m in 0..7 {
            assert!((c.entries()[(m, m)].re - 1.0).abs() < 1e-14);
        }
        // Truncation replaces the last diagonal entry by -(cutoff-1).
        assert!((c.entries()[(7, 7)].re + 7.0).abs() < 1e-14);
    }

    #[test]
    fn su11_matrix_elements() {
        let g = build_su11(space(4, 1));
        assert_eq!(g.sz.entries()[(0, 0)].re, 0.25);
        assert_eq!(g.sz.entries()[(1, 1)].re, 0.75);
        assert_eq!(g.sz.entries()[(2, 2)].re, 1.25);
        assert!((g.splus.entries()[(2, 0)].re - 0.5 * 2.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(g.splus.entries()[(2, 0)], g.sminus.entries()[(0, 2)]);
    }

    #[test]
    fn su11_commutation_relations_on_interior() {
        let s = space(24, 2);
        let g = build_su11(s);
        let interior = s.interior();

        let check = |got: &OperatorMatrix, want: &DMatrix<C64>, label: &str| {
            for i in interior.clone() {
                for j in interior.clone() {
                    let d = (got.entries()[(i, j)] - want[(i, j)]).norm();
                    assert!(d < 1e-13, "{label} at ({i},{j}): {d}");
                }
            }
        };

        let c1 = commutator(&g.sz, &g.splus).unwrap();
        check(&c1, g.splus.entries(), "[Sz,S+] = S+");
        let c2 = commutator(&g.sz, &g.sminus).unwrap();
        let minus_sm = g.sminus.entries().map(|z| -z);
        check(&c2, &minus_sm, "[Sz,S-] = -S-");
        let c3 = commutator(&g.splus, &g.sminus).unwrap();
        let minus_2sz = g.sz.entries().map(|z| -2.0 * z);
        check(&c3, &minus_2sz, "[S+,S-] = -2Sz");
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let (a, _) = build_ladder(space(4, 1));
        let (_, bdag) = build_ladder(space(6, 1));
        assert!(matches!(
            commutator(&a, &bdag),
            Err(Error::DimensionMismatch { left: 4, right: 6 })
        ));
    }

    #[test]
    fn parity_conjugates_ladder() {
        let s = space(8, 1);
        let p = parity_operator(s);
        let (a, _) = build_ladder(s);
        let p2 = p.entries() * p.entries();
        assert!((p2 - DMatrix::<C64>::identity(8, 8)).norm() < 1e-15);
        let pap = p.entries() * a.entries() * p.entries();
        assert!((pap + a.entries()).norm() < 1e-15);
    }

    #[test]
    fn operator_matrix_rejects_nonfinite() {
        let s = space(4, 1);
        let mut m = DMatrix::<C64>::zeros(4, 4);
        m[(0, 0)] = C64::new(f64::NAN, 0.0);
        assert!(OperatorMatrix::new(s, m).is_err());
    }

    #[test]
    fn builders_are_bit_deterministic() {
        let s = space(16, 2);
        let g1 = build_su11(s);
        let g2 = build_su11(s);
        assert_eq!(g1.splus.entries(), g2.splus.entries());
        assert_eq!(g1.sz.entries(), g2.sz.entries());
    }
}
