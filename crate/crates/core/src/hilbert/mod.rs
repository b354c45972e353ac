//! Many-body bases and sparse operator matrices.
//!
//! Three kinds of local Hilbert space are supported: spin-1/2 chains,
//! spinful fermion chains and bosons with a per-site occupation cutoff.
//! Basis states are stored as integer encodings and kept in ascending order,
//! which is lexicographic order on the occupation string read from the last
//! site down to site 0:
//!
//! * spin-1/2: bit `j` is 1 when site `j` is spin down, so index 0 is the
//!   fully polarized up state;
//! * fermions: the spin-up occupation mask occupies the high `sites` bits and
//!   the spin-down mask the low bits, so the up string is compared first;
//! * bosons: the occupation of site `j` is digit `j` in base `cutoff + 1`.
//!
//! Fermionic operators use the Jordan-Wigner mode order
//! `(0,up), (1,up), ..., (V-1,up), (0,down), ..., (V-1,down)`.

mod sparse;
mod terms;

pub use sparse::{OperatorMatrix, SparseMatrix, HERMITIAN_TOLERANCE};
pub use terms::{annihilation_matrix, build_operator, Spin, TermDescriptor};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ModelFamily, ModelSpec};

/// Local Hilbert-space type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    SpinHalf,
    FermionSpinful,
    BosonCutoff,
}

impl BasisKind {
    pub fn name(self) -> &'static str {
        match self {
            BasisKind::SpinHalf => "spin_half",
            BasisKind::FermionSpinful => "fermion_spinful",
            BasisKind::BosonCutoff => "boson_cutoff",
        }
    }
}

/// Particle-number constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    /// Fixed `N_up` and `N_down` (fermions).
    Spinful { up: usize, down: usize },
    /// Fixed total particle number (bosons; for fermions every
    /// `N_up + N_down = n` split is included).
    Total(usize),
}

/// An enumerated many-body basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisDescriptor {
    kind: BasisKind,
    sites: usize,
    sector: Option<Sector>,
    boson_cutoff: Option<usize>,
    states: Vec<u64>,
}

impl BasisDescriptor {
    pub fn new(
        kind: BasisKind,
        sites: usize,
        sector: Option<Sector>,
        boson_cutoff: Option<usize>,
    ) -> Result<Self> {
        if sites == 0 {
            return Err(Error::InvalidSpec("number of sites must be positive".into()));
        }
        let states = match kind {
            BasisKind::SpinHalf => {
                if sector.is_some() {
                    return Err(Error::Sector(
                        "spin-1/2 bases do not take a particle-number sector".into(),
                    ));
                }
                if sites > 30 {
                    return Err(Error::InvalidSpec(format!("{sites} spins is too many")));
                }
                (0..1u64 << sites).collect()
            }
            BasisKind::FermionSpinful => fermion_states(sites, sector)?,
            BasisKind::BosonCutoff => {
                let cutoff = match (boson_cutoff, sector) {
                    (Some(c), _) => c,
                    (None, Some(Sector::Total(n))) => n,
                    (None, _) => {
                        return Err(Error::Sector(
                            "boson basis needs either a cutoff or a total particle number".into(),
                        ))
                    }
                };
                boson_states(sites, cutoff, sector)?
            }
        };
        let boson_cutoff = match kind {
            BasisKind::BosonCutoff => Some(boson_cutoff.unwrap_or(match sector {
                Some(Sector::Total(n)) => n,
                _ => 0,
            })),
            _ => None,
        };
        Ok(Self {
            kind,
            sites,
            sector,
            boson_cutoff,
            states,
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn sector(&self) -> Option<Sector> {
        self.sector
    }

    pub fn boson_cutoff(&self) -> Option<usize> {
        self.boson_cutoff
    }

    pub fn dimension(&self) -> usize {
        self.states.len()
    }

    /// Encoded basis states in enumeration order.
    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn index_of(&self, state: u64) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }

    /// Occupation of `site` in a boson state encoding.
    pub(crate) fn boson_occupation(&self, state: u64, site: usize) -> usize {
        let base = self.boson_cutoff.unwrap_or(0) as u64 + 1;
        ((state / base.pow(site as u32)) % base) as usize
    }

    pub(crate) fn boson_base(&self) -> u64 {
        self.boson_cutoff.unwrap_or(0) as u64 + 1
    }

    /// Particle count of a basis state (fermions and bosons).
    pub fn particle_count(&self, state: u64) -> usize {
        match self.kind {
            BasisKind::SpinHalf => 0,
            BasisKind::FermionSpinful => state.count_ones() as usize,
            BasisKind::BosonCutoff => (0..self.sites)
                .map(|j| self.boson_occupation(state, j))
                .sum(),
        }
    }
}

fn fermion_states(sites: usize, sector: Option<Sector>) -> Result<Vec<u64>> {
    if 2 * sites > 40 {
        return Err(Error::InvalidSpec(format!("{sites} fermion sites is too many")));
    }
    let masks = |count: Option<usize>| -> Vec<u64> {
        (0..1u64 << sites)
            .filter(|m| count.is_none_or(|c| m.count_ones() as usize == c))
            .collect()
    };
    let pairs: Vec<(usize, usize)> = match sector {
        None => {
            let all = masks(None);
            let mut out = Vec::with_capacity(all.len() * all.len());
            for &up in &all {
                for &down in &all {
                    out.push(up << sites | down);
                }
            }
            return Ok(out);
        }
        Some(Sector::Spinful { up, down }) => {
            if up > sites || down > sites {
                return Err(Error::Sector(format!(
                    "N_up = {up}, N_down = {down} exceeds {sites} sites"
                )));
            }
            vec![(up, down)]
        }
        Some(Sector::Total(n)) => {
            if n > 2 * sites {
                return Err(Error::Sector(format!(
                    "N = {n} exceeds the capacity {} of {sites} spinful sites",
                    2 * sites
                )));
            }
            (n.saturating_sub(sites)..=n.min(sites))
                .map(|up| (up, n - up))
                .collect()
        }
    };
    let mut out = Vec::new();
    for (nu, nd) in pairs {
        let ups = masks(Some(nu));
        let downs = masks(Some(nd));
        for &u in &ups {
            for &d in &downs {
                out.push(u << sites | d);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn boson_states(sites: usize, cutoff: usize, sector: Option<Sector>) -> Result<Vec<u64>> {
    let total = match sector {
        None => None,
        Some(Sector::Total(n)) => {
            if n > sites * cutoff {
                return Err(Error::Sector(format!(
                    "N = {n} exceeds sites * cutoff = {}",
                    sites * cutoff
                )));
            }
            Some(n)
        }
        Some(Sector::Spinful { .. }) => {
            return Err(Error::Sector("bosons take a total particle number sector".into()))
        }
    };
    let base = cutoff as u64 + 1;
    let full = (base as f64).powi(sites as i32);
    if full > 1e12 {
        return Err(Error::InvalidSpec(
            "boson occupation space too large to enumerate".into(),
        ));
    }
    // Depth-first enumeration over occupation strings; collected then sorted
    // so the order is the ascending integer encoding.
    let mut out = Vec::new();
    let mut occ = vec![0usize; sites];
    fn recurse(
        site: usize,
        remaining: Option<usize>,
        cutoff: usize,
        occ: &mut Vec<usize>,
        base: u64,
        out: &mut Vec<u64>,
    ) {
        if site == occ.len() {
            if remaining.is_none_or(|r| r == 0) {
                let code = occ
                    .iter()
                    .rev()
                    .fold(0u64, |acc, &n| acc * base + n as u64);
                out.push(code);
            }
            return;
        }
        let max_here = remaining.map_or(cutoff, |r| r.min(cutoff));
        for n in 0..=max_here {
            occ[site] = n;
            recurse(
                site + 1,
                remaining.map(|r| r - n),
                cutoff,
                occ,
                base,
                out,
            );
        }
        occ[site] = 0;
    }
    recurse(0, total, cutoff, &mut occ, base, &mut out);
    out.sort_unstable();
    Ok(out)
}

/// Basis for a model specification.
pub fn build_basis(spec: &ModelSpec) -> Result<BasisDescriptor> {
    match spec.family {
        ModelFamily::Tfim => BasisDescriptor::new(BasisKind::SpinHalf, spec.sites, None, None),
        ModelFamily::FermiHubbard => {
            BasisDescriptor::new(BasisKind::FermionSpinful, spec.sites, spec.sector, None)
        }
        ModelFamily::BoseHubbard => BasisDescriptor::new(
            BasisKind::BosonCutoff,
            spec.sites,
            spec.sector,
            spec.boson_cutoff,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn spin_half_dimension() {
        let b = BasisDescriptor::new(BasisKind::SpinHalf, 4, None, None).unwrap();
        assert_eq!(b.dimension(), 16);
    }

    #[test]
    fn fermion_sector_dimension() {
        let b = BasisDescriptor::new(
            BasisKind::FermionSpinful,
            4,
            Some(Sector::Spinful { up: 2, down: 2 }),
            None,
        )
        .unwrap();
        assert_eq!(b.dimension(), 36);
        for (sites, up, down) in [(5, 1, 3), (6, 3, 3), (3, 0, 2)] {
            let b = BasisDescriptor::new(
                BasisKind::FermionSpinful,
                sites,
                Some(Sector::Spinful { up, down }),
                None,
            )
            .unwrap();
            assert_eq!(b.dimension(), binomial(sites, up) * binomial(sites, down));
        }
    }

    #[test]
    fn boson_sector_dimension_by_enumeration() {
        // Count occupation triples summing to 3 with n_j <= 3 by brute force.
        let mut count = 0;
        for a in 0..=3 {
            for b in 0..=3 {
                for c in 0..=3 {
                    if a + b + c == 3 {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(count, 10);
        let basis =
            BasisDescriptor::new(BasisKind::BosonCutoff, 3, Some(Sector::Total(3)), Some(3))
                .unwrap();
        assert_eq!(basis.dimension(), count);
        // Cutoff below N removes states.
        let capped =
            BasisDescriptor::new(BasisKind::BosonCutoff, 3, Some(Sector::Total(3)), Some(1))
                .unwrap();
        assert_eq!(capped.dimension(), 1);
    }

    #[test]
    fn inconsistent_sectors_rejected() {
        let err = BasisDescriptor::new(
            BasisKind::FermionSpinful,
            3,
            Some(Sector::Spinful { up: 4, down: 0 }),
            None,
        )
        .unwrap_err();
        assert!(err.to_string().contains("exceeds"), "{err}");
        let err =
            BasisDescriptor::new(BasisKind::BosonCutoff, 2, Some(Sector::Total(5)), Some(2))
                .unwrap_err();
        assert!(err.to_string().contains("sites * cutoff"), "{err}");
        assert!(BasisDescriptor::new(BasisKind::SpinHalf, 0, None, None).is_err());
    }

    #[test]
    fn enumeration_is_sorted_and_reproducible() {
        let make = || {
            BasisDescriptor::new(BasisKind::BosonCutoff, 4, Some(Sector::Total(4)), Some(3))
                .unwrap()
        };
        let a = make();
        let b = make();
        assert_eq!(a.states(), b.states());
        assert!(a.states().windows(2).all(|w| w[0] < w[1]));
        for &s in a.states() {
            assert_eq!(a.particle_count(s), 4);
        }
    }

    #[test]
    fn fermion_total_sector_is_union_of_splits() {
        let b = BasisDescriptor::new(BasisKind::FermionSpinful, 3, Some(Sector::Total(3)), None)
            .unwrap();
        let expected: usize = (0..=3).map(|u| binomial(3, u) * binomial(3, 3 - u)).sum();
        assert_eq!(b.dimension(), expected);
    }
}
