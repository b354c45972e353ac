use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{BasisDescriptor, BasisKind, OperatorMatrix, SparseMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spin {
    Up,
    Down,
}

/// A local Hermitian term. Site indices are zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermDescriptor {
    /// `S^x_j`
    SpinX { site: usize },
    /// `S^z_j`
    SpinZ { site: usize },
    /// `S^z_i S^z_j`
    SpinZZ { i: usize, j: usize },
    /// `c^dag_{i,s} c_{j,s} + h.c.`
    FermionHop { i: usize, j: usize, spin: Spin },
    /// `n_{j,s}`
    FermionNumber { site: usize, spin: Spin },
    /// `n_{j,up} n_{j,down}`
    DoubleOccupancy { site: usize },
    /// `b^dag_i b_j + h.c.`
    BosonHop { i: usize, j: usize },
    /// `n_j`
    BosonNumber { site: usize },
    /// `(b^dag_j b_j)^2`
    BosonDensitySquared { site: usize },
    /// `n_j (n_j - 1) / 2`
    BosonPairInteraction { site: usize },
}

impl TermDescriptor {
    pub fn label(&self) -> String {
        match *self {
            TermDescriptor::SpinX { site } => format!("Sx[{site}]"),
            TermDescriptor::SpinZ { site } => format!("Sz[{site}]"),
            TermDescriptor::SpinZZ { i, j } => format!("SzSz[{i},{j}]"),
            TermDescriptor::FermionHop { i, j, spin } => format!("hop_{spin:?}[{i},{j}]"),
            TermDescriptor::FermionNumber { site, spin } => format!("n_{spin:?}[{site}]"),
            TermDescriptor::DoubleOccupancy { site } => format!("nn[{site}]"),
            TermDescriptor::BosonHop { i, j } => format!("bhop[{i},{j}]"),
            TermDescriptor::BosonNumber { site } => format!("n[{site}]"),
            TermDescriptor::BosonDensitySquared { site } => format!("n2[{site}]"),
            TermDescriptor::BosonPairInteraction { site } => format!("npair[{site}]"),
        }
    }

    fn required_kind(&self) -> BasisKind {
        match self {
            TermDescriptor::SpinX { .. }
            | TermDescriptor::SpinZ { .. }
            | TermDescriptor::SpinZZ { .. } => BasisKind::SpinHalf,
            TermDescriptor::FermionHop { .. }
            | TermDescriptor::FermionNumber { .. }
            | TermDescriptor::DoubleOccupancy { .. } => BasisKind::FermionSpinful,
            TermDescriptor::BosonHop { .. }
            | TermDescriptor::BosonNumber { .. }
            | TermDescriptor::BosonDensitySquared { .. }
            | TermDescriptor::BosonPairInteraction { .. } => BasisKind::BosonCutoff,
        }
    }

    fn sites(&self) -> Vec<usize> {
        match *self {
            TermDescriptor::SpinX { site }
            | TermDescriptor::SpinZ { site }
            | TermDescriptor::FermionNumber { site, .. }
            | TermDescriptor::DoubleOccupancy { site }
            | TermDescriptor::BosonNumber { site }
            | TermDescriptor::BosonDensitySquared { site }
            | TermDescriptor::BosonPairInteraction { site } => vec![site],
            TermDescriptor::SpinZZ { i, j }
            | TermDescriptor::FermionHop { i, j, .. }
            | TermDescriptor::BosonHop { i, j } => vec![i, j],
        }
    }
}

/// Fermion helpers on the `(up << sites) | down` encoding.
struct FermionModes {
    sites: usize,
}

impl FermionModes {
    fn bit(&self, site: usize, spin: Spin) -> u32 {
        match spin {
            Spin::Up => (self.sites + site) as u32,
            Spin::Down => site as u32,
        }
    }

    /// Number of occupied modes preceding `(site, spin)` in Jordan-Wigner order.
    fn preceding(&self, state: u64, site: usize, spin: Spin) -> u32 {
        let v = self.sites as u32;
        let up = state >> v;
        let down = state & ((1u64 << v) - 1);
        let below = (1u64 << site) - 1;
        match spin {
            Spin::Up => (up & below).count_ones(),
            Spin::Down => up.count_ones() + (down & below).count_ones(),
        }
    }

    fn annihilate(&self, state: u64, site: usize, spin: Spin) -> Option<(u64, f64)> {
        let b = self.bit(site, spin);
        if state >> b & 1 == 0 {
            return None;
        }
        let sign = if self.preceding(state, site, spin).is_multiple_of(2) { 1.0 } else { -1.0 };
        Some((state & !(1u64 << b), sign))
    }

    fn create(&self, state: u64, site: usize, spin: Spin) -> Option<(u64, f64)> {
        let b = self.bit(site, spin);
        if state >> b & 1 == 1 {
            return None;
        }
        let sign = if self.preceding(state, site, spin).is_multiple_of(2) { 1.0 } else { -1.0 };
        Some((state | (1u64 << b), sign))
    }

    fn occupied(&self, state: u64, site: usize, spin: Spin) -> bool {
        state >> self.bit(site, spin) & 1 == 1
    }
}

/// Matrix of a local term on `basis`.
pub fn build_operator(
    term: TermDescriptor,
    basis: &Arc<BasisDescriptor>,
) -> Result<OperatorMatrix> {
    if term.required_kind() != basis.kind() {
        return Err(Error::TermMismatch {
            term: term.label(),
            basis: basis.kind().name(),
        });
    }
    if let Some(&bad) = term.sites().iter().find(|&&s| s >= basis.sites()) {
        return Err(Error::InvalidArgument(format!(
            "site {bad} out of range for {} sites",
            basis.sites()
        )));
    }
    let d = basis.dimension();
    let states = basis.states();
    let mut triplets = Vec::new();
    let fm = FermionModes { sites: basis.sites() };

    for (col, &s) in states.iter().enumerate() {
        match term {
            TermDescriptor::SpinZ { site } => {
                triplets.push((col, col, spin_z(s, site)));
            }
            TermDescriptor::SpinZZ { i, j } => {
                triplets.push((col, col, spin_z(s, i) * spin_z(s, j)));
            }
            TermDescriptor::SpinX { site } => {
                let flipped = s ^ (1u64 << site);
                if let Some(row) = basis.index_of(flipped) {
                    triplets.push((row, col, 0.5));
                }
            }
            TermDescriptor::FermionNumber { site, spin } => {
                if fm.occupied(s, site, spin) {
                    triplets.push((col, col, 1.0));
                }
            }
            TermDescriptor::DoubleOccupancy { site } => {
                if fm.occupied(s, site, Spin::Up) && fm.occupied(s, site, Spin::Down) {
                    triplets.push((col, col, 1.0));
                }
            }
            TermDescriptor::FermionHop { i, j, spin } => {
                if i == j {
                    return Err(Error::InvalidArgument("hopping needs two distinct sites".into()));
                }
                for (to, from) in [(i, j), (j, i)] {
                    let moved = fm
                        .annihilate(s, from, spin)
                        .and_then(|(t, s1)| fm.create(t, to, spin).map(|(u, s2)| (u, s1 * s2)));
                    if let Some((target, sign)) = moved {
                        if let Some(row) = basis.index_of(target) {
                            triplets.push((row, col, sign));
                        }
                    }
                }
            }
            TermDescriptor::BosonNumber { site } => {
                let n = basis.boson_occupation(s, site) as f64;
                triplets.push((col, col, n));
            }
            TermDescriptor::BosonDensitySquared { site } => {
                let n = basis.boson_occupation(s, site) as f64;
                triplets.push((col, col, n * n));
            }
            TermDescriptor::BosonPairInteraction { site } => {
                let n = basis.boson_occupation(s, site) as f64;
                triplets.push((col, col, 0.5 * n * (n - 1.0)));
            }
            TermDescriptor::BosonHop { i, j } => {
                if i == j {
                    return Err(Error::InvalidArgument("hopping needs two distinct sites".into()));
                }
                let cutoff = basis.boson_cutoff().unwrap_or(0);
                let base = basis.boson_base();
                for (to, from) in [(i, j), (j, i)] {
                    let n_from = basis.boson_occupation(s, from);
                    let n_to = basis.boson_occupation(s, to);
                    if n_from == 0 || n_to + 1 > cutoff {
                        continue;
                    }
                    let target = s - base.pow(from as u32) + base.pow(to as u32);
                    if let Some(row) = basis.index_of(target) {
                        let amp = ((n_from * (n_to + 1)) as f64).sqrt();
                        triplets.push((row, col, amp));
                    }
                }
            }
        }
    }
    OperatorMatrix::new(
        basis.clone(),
        SparseMatrix::from_triplets(d, d, triplets),
        term.label(),
    )
}

fn spin_z(state: u64, site: usize) -> f64 {
    if state >> site & 1 == 0 {
        0.5
    } else {
        -0.5
    }
}

/// Matrix of the fermion annihilation operator `c_{site,spin}` on a full
/// Fock-space basis (no particle-number sector). Not Hermitian.
pub fn annihilation_matrix(
    basis: &BasisDescriptor,
    site: usize,
    spin: Spin,
) -> Result<SparseMatrix> {
    if basis.kind() != BasisKind::FermionSpinful {
        return Err(Error::TermMismatch {
            term: format!("c_{spin:?}[{site}]"),
            basis: basis.kind().name(),
        });
    }
    if basis.sector().is_some() {
        return Err(Error::InvalidArgument(
            "annihilation operators need the full Fock space".into(),
        ));
    }
    let fm = FermionModes { sites: basis.sites() };
    let d = basis.dimension();
    let mut triplets = Vec::new();
    for (col, &s) in basis.states().iter().enumerate() {
        if let Some((t, sign)) = fm.annihilate(s, site, spin) {
            let row = basis.index_of(t).expect("full Fock space is closed");
            triplets.push((row, col, sign));
        }
    }
    Ok(SparseMatrix::from_triplets(d, d, triplets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::Sector;

    fn spins(n: usize) -> Arc<BasisDescriptor> {
        Arc::new(BasisDescriptor::new(BasisKind::SpinHalf, n, None, None).unwrap())
    }

    #[test]
    fn szsz_on_two_spins() {
        let op = build_operator(TermDescriptor::SpinZZ { i: 0, j: 1 }, &spins(2)).unwrap();
        let m = op.matrix();
        assert!(m.is_diagonal());
        assert_eq!(m.diagonal(), vec![0.25, -0.25, -0.25, 0.25]);
    }

    #[test]
    fn sx_on_one_spin() {
        let op = build_operator(TermDescriptor::SpinX { site: 0 }, &spins(1)).unwrap();
        let m = op.matrix();
        assert_eq!(m.get(0, 1), 0.5);
        assert_eq!(m.get(1, 0), 0.5);
        assert_eq!(m.get(0, 0), 0.0);
    }

    #[test]
    fn fermion_hop_two_sites_single_up() {
        let basis = Arc::new(
            BasisDescriptor::new(
                BasisKind::FermionSpinful,
                2,
                Some(Sector::Spinful { up: 1, down: 0 }),
                None,
            )
            .unwrap(),
        );
        // Hand evaluation: |up on site 0> and |up on site 1> have no occupied
        // modes between them, so c^dag_0 c_1 carries sign +1 and -t * hop has
        // off-diagonal entries -t.
        let op = build_operator(
            TermDescriptor::FermionHop { i: 0, j: 1, spin: Spin::Up },
            &basis,
        )
        .unwrap();
        let h = op.matrix().scaled(-1.0);
        assert_eq!(basis.dimension(), 2);
        assert_eq!(h.get(0, 1), -1.0);
        assert_eq!(h.get(1, 0), -1.0);
        assert_eq!(h.get(0, 0), 0.0);
    }

    #[test]
    fn down_hop_picks_up_sign_from_up_electrons() {
        // Two down electrons on three sites; the hop 0 <-> 2 passes the
        // down mode on site 1.
        let basis = Arc::new(
            BasisDescriptor::new(
                BasisKind::FermionSpinful,
                3,
                Some(Sector::Spinful { up: 0, down: 2 }),
                None,
            )
            .unwrap(),
        );
        let op = build_operator(
            TermDescriptor::FermionHop { i: 0, j: 2, spin: Spin::Down },
            &basis,
        )
        .unwrap();
        // |down on 1,2> -> |down on 0,1>: c^dag_0 c_2 acting past the occupied
        // site-1 down mode gives a minus sign.
        let from = basis.index_of(0b110).unwrap();
        let to = basis.index_of(0b011).unwrap();
        assert_eq!(op.matrix().get(to, from), -1.0);
    }

    #[test]
    fn term_basis_mismatch_rejected() {
        let err = build_operator(
            TermDescriptor::BosonHop { i: 0, j: 1 },
            &spins(2),
        )
        .unwrap_err();
        assert!(matches!(err, Error::TermMismatch { .. }));
    }

    #[test]
    fn anticommutators_on_three_sites() {
        let basis = BasisDescriptor::new(BasisKind::FermionSpinful, 3, None, None).unwrap();
        let d = basis.dimension();
        let modes: Vec<(usize, Spin)> = (0..3)
            .flat_map(|s| [(s, Spin::Up), (s, Spin::Down)])
            .collect();
        let ops: Vec<SparseMatrix> = modes
            .iter()
            .map(|&(s, sp)| annihilation_matrix(&basis, s, sp).unwrap())
            .collect();
        let id = SparseMatrix::identity(d);
        for (a, ca) in ops.iter().enumerate() {
            for (b, cb) in ops.iter().enumerate() {
                let cbd = cb.transpose();
                let anti = SparseMatrix::linear_combination(&[
                    (1.0, &ca.product(&cbd)),
                    (1.0, &cbd.product(ca)),
                ]);
                let expected = if a == b { id.clone() } else { SparseMatrix::from_triplets(d, d, vec![]) };
                let diff = SparseMatrix::linear_combination(&[(1.0, &anti), (-1.0, &expected)]);
                assert!(diff.max_abs() < 1e-12, "{{c_{a}, c_{b}^dag}}");
                let anti_cc = SparseMatrix::linear_combination(&[
                    (1.0, &ca.product(cb)),
                    (1.0, &cb.product(ca)),
                ]);
                assert!(anti_cc.max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn boson_hop_respects_cutoff_and_amplitudes() {
        let basis = Arc::new(
            BasisDescriptor::new(BasisKind::BosonCutoff, 2, Some(Sector::Total(2)), Some(2))
                .unwrap(),
        );
        let op = build_operator(TermDescriptor::BosonHop { i: 0, j: 1 }, &basis).unwrap();
        // |2,0> <-> |1,1> amplitude sqrt(2).
        let s20 = basis.index_of(2).unwrap();
        let s11 = basis.index_of(1 + 3).unwrap();
        assert!((op.matrix().get(s11, s20) - 2f64.sqrt()).abs() < 1e-15);
        assert!(op.max_hermitian_deviation() < 1e-12);
    }
}
