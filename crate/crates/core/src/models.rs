//! Lattice models written as `H(c) = H0 + c * G2`.
//!
//! | family        | `H0`                                   | `G2`                      |
//! |---------------|----------------------------------------|---------------------------|
//! | TFIM          | `h_x sum_j S^x_j`                      | `sum_bonds S^z_i S^z_j`   |
//! | Fermi-Hubbard | `-t sum_{j,s} (c^dag_{j,s} c_{j+1,s} + h.c.)` | `sum_j n_{j,up} n_{j,down}` |
//! | Bose-Hubbard  | `-t sum_j (b^dag_j b_{j+1} + h.c.)`    | `sum_j (b^dag_j b_j)^2`   |
//!
//! The TFIM may carry a longitudinal field `h_z sum_j S^z_j`, kept as a
//! separate operator so it can be varied independently of `c`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    build_basis, build_operator, BasisDescriptor, OperatorMatrix, Sector, Spin, TermDescriptor,
};

/// Default cap on the Hilbert-space dimension of a single model.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    Tfim,
    FermiHubbard,
    BoseHubbard,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// Which on-site operator plays the role of `G2` for bosons.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoseInteraction {
    /// `sum_j (b^dag_j b_j)^2 = sum_j n_j^2`
    #[default]
    DensitySquared,
    /// `sum_j n_j (n_j - 1) / 2`
    PairCount,
}

fn default_cap() -> usize {
    DEFAULT_DIMENSION_CAP
}

/// Declarative description of a lattice model instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub family: ModelFamily,
    pub sites: usize,
    /// Hopping `t` (Hubbard models).
    #[serde(default)]
    pub hopping: f64,
    /// Transverse field (TFIM).
    #[serde(default)]
    pub h_x: f64,
    /// Longitudinal symmetry-breaking field (TFIM).
    #[serde(default)]
    pub h_z: f64,
    /// Interaction strength.
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub sector: Option<Sector>,
    #[serde(default)]
    pub boson_cutoff: Option<usize>,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default)]
    pub bose_interaction: BoseInteraction,
    #[serde(default = "default_cap")]
    pub dimension_cap: usize,
}

impl ModelSpec {
    pub fn tfim(sites: usize, h_x: f64, c: f64) -> Self {
        Self {
            family: ModelFamily::Tfim,
            sites,
            hopping: 0.0,
            h_x,
            h_z: 0.0,
            c,
            sector: None,
            boson_cutoff: None,
            boundary: Boundary::Open,
            bose_interaction: BoseInteraction::default(),
            dimension_cap: DEFAULT_DIMENSION_CAP,
        }
    }

    pub fn fermi_hubbard(sites: usize, hopping: f64, c: f64, up: usize, down: usize) -> Self {
        Self {
            family: ModelFamily::FermiHubbard,
            sector: Some(Sector::Spinful { up, down }),
            hopping,
            ..Self::tfim(sites, 0.0, c)
        }
    }

    pub fn bose_hubbard(sites: usize, hopping: f64, c: f64, particles: usize) -> Self {
        Self {
            family: ModelFamily::BoseHubbard,
            sector: Some(Sector::Total(particles)),
            boson_cutoff: Some(particles),
            hopping,
            ..Self::tfim(sites, 0.0, c)
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_h_z(mut self, h_z: f64) -> Self {
        self.h_z = h_z;
        self
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites == 0 {
            return Err(Error::InvalidSpec("sites must be positive".into()));
        }
        for (name, v) in [("hopping", self.hopping), ("h_x", self.h_x), ("h_z", self.h_z), ("c", self.c)] {
            if !v.is_finite() {
                return Err(Error::InvalidSpec(format!("{name} must be finite")));
            }
        }
        if self.family != ModelFamily::Tfim {
            if self.h_z != 0.0 {
                return Err(Error::InvalidSpec("h_z is only defined for the TFIM".into()));
            }
            if self.h_x != 0.0 {
                return Err(Error::InvalidSpec("h_x is only defined for the TFIM".into()));
            }
        } else if self.hopping != 0.0 {
            return Err(Error::InvalidSpec("the TFIM has no hopping".into()));
        }
        if self.boundary == Boundary::Periodic && self.sites < 3 {
            return Err(Error::InvalidSpec(
                "periodic boundaries need at least 3 sites".into(),
            ));
        }
        Ok(())
    }

    /// Nearest-neighbour bonds `(j, j+1)`, plus `(V-1, 0)` when periodic.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut bonds: Vec<(usize, usize)> = (0..self.sites.saturating_sub(1)).map(|j| (j, j + 1)).collect();
        if self.boundary == Boundary::Periodic {
            bonds.push((self.sites - 1, 0));
        }
        bonds
    }
}

/// Operator content of a model: `H0`, `G2` and auxiliary observables.
#[derive(Clone, Debug)]
pub struct ModelOperators {
    pub spec: ModelSpec,
    pub h0: OperatorMatrix,
    pub g2: OperatorMatrix,
    /// `sum_j S^z_j` (TFIM only).
    pub hz_term: Option<OperatorMatrix>,
    /// `sum_j S^x_j` (TFIM only).
    pub sx_total: Option<OperatorMatrix>,
}

pub const LABEL_H0: &str = "H0";
pub const LABEL_G2: &str = "G2";
pub const LABEL_SX: &str = "Sx_total";
pub const LABEL_SZ: &str = "Sz_total";

impl ModelOperators {
    pub fn basis(&self) -> &Arc<BasisDescriptor> {
        self.h0.basis()
    }

    pub fn dimension(&self) -> usize {
        self.h0.dimension()
    }

    /// `H0 + c G2 + h_z sum_j S^z_j`.
    pub fn hamiltonian_at(&self, c: f64, h_z: f64) -> Result<OperatorMatrix> {
        hamiltonian_at(self, c, h_z)
    }

    /// Observables worth tracking per eigenstate: `G2`, `H0` and the spin
    /// totals when present.
    pub fn observables(&self) -> Vec<&OperatorMatrix> {
        let mut out = vec![&self.g2, &self.h0];
        out.extend(self.sx_total.iter());
        out.extend(self.hz_term.iter());
        out
    }
}

fn sum_terms(
    basis: &Arc<BasisDescriptor>,
    terms: impl IntoIterator<Item = (f64, TermDescriptor)>,
    label: &str,
) -> Result<OperatorMatrix> {
    let ops: Vec<(f64, OperatorMatrix)> = terms
        .into_iter()
        .map(|(coef, t)| build_operator(t, basis).map(|op| (coef, op)))
        .collect::<Result<_>>()?;
    if ops.is_empty() {
        return zero_operator(basis, label);
    }
    let refs: Vec<(f64, &OperatorMatrix)> = ops.iter().map(|(c, op)| (*c, op)).collect();
    OperatorMatrix::combine(&refs, label)
}

/// Builds `(H0, G2)` and auxiliary operators for `spec`.
pub fn build_model(spec: &ModelSpec) -> Result<ModelOperators> {
    spec.validate()?;
    let basis = Arc::new(build_basis(spec)?);
    if basis.dimension() > spec.dimension_cap {
        return Err(Error::DimensionCap {
            dimension: basis.dimension(),
            cap: spec.dimension_cap,
        });
    }
    if basis.dimension() == 0 {
        return Err(Error::Sector("the sector contains no states".into()));
    }
    let v = spec.sites;
    let bonds = spec.bonds();
    let (h0, g2, hz_term, sx_total) = match spec.family {
        ModelFamily::Tfim => {
            let sx = sum_terms(&basis, (0..v).map(|j| (1.0, TermDescriptor::SpinX { site: j })), LABEL_SX)?;
            let sz = sum_terms(&basis, (0..v).map(|j| (1.0, TermDescriptor::SpinZ { site: j })), LABEL_SZ)?;
            let h0 = OperatorMatrix::combine(&[(spec.h_x, &sx)], LABEL_H0)?;
            let g2 = sum_terms(
                &basis,
                bonds.iter().map(|&(i, j)| (1.0, TermDescriptor::SpinZZ { i, j })),
                LABEL_G2,
            )?;
            (h0, g2, Some(sz), Some(sx))
        }
        ModelFamily::FermiHubbard => {
            let hops = bonds.iter().flat_map(|&(i, j)| {
                [Spin::Up, Spin::Down]
                    .into_iter()
                    .map(move |spin| (-spec.hopping, TermDescriptor::FermionHop { i, j, spin }))
            });
            let h0 = sum_terms(&basis, hops, LABEL_H0)?;
            let g2 = sum_terms(
                &basis,
                (0..v).map(|j| (1.0, TermDescriptor::DoubleOccupancy { site: j })),
                LABEL_G2,
            )?;
            (h0, g2, None, None)
        }
        ModelFamily::BoseHubbard => {
            let h0 = sum_terms(
                &basis,
                bonds
                    .iter()
                    .map(|&(i, j)| (-spec.hopping, TermDescriptor::BosonHop { i, j })),
                LABEL_H0,
            )?;
            let term = |site| match spec.bose_interaction {
                BoseInteraction::DensitySquared => TermDescriptor::BosonDensitySquared { site },
                BoseInteraction::PairCount => TermDescriptor::BosonPairInteraction { site },
            };
            let g2 = sum_terms(&basis, (0..v).map(|j| (1.0, term(j))), LABEL_G2)?;
            (h0, g2, None, None)
        }
    };
    Ok(ModelOperators {
        spec: spec.clone(),
        h0,
        g2,
        hz_term,
        sx_total,
    })
}

fn zero_operator(basis: &Arc<BasisDescriptor>, label: &str) -> Result<OperatorMatrix> {
    let d = basis.dimension();
    OperatorMatrix::new(
        basis.clone(),
        crate::hilbert::SparseMatrix::from_triplets(d, d, vec![]),
        label,
    )
}

/// `H = H0 + c G2 (+ h_z sum_j S^z_j)`.
pub fn hamiltonian_at(ops: &ModelOperators, c: f64, h_z: f64) -> Result<OperatorMatrix> {
    if !ops.h0.same_basis(&ops.g2) {
        return Err(Error::BasisMismatch);
    }
    let mut terms = vec![(1.0, &ops.h0), (c, &ops.g2)];
    match (&ops.hz_term, h_z) {
        (_, 0.0) => {}
        (Some(sz), z) => {
            if !sz.same_basis(&ops.h0) {
                return Err(Error::BasisMismatch);
            }
            terms.push((z, sz));
        }
        (None, _) => {
            return Err(Error::InvalidSpec(
                "a longitudinal field needs a spin model".into(),
            ))
        }
    }
    OperatorMatrix::combine(&terms, "H")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::SparseMatrix;

    fn dense_eigenvalues(op: &OperatorMatrix) -> Vec<f64> {
        let m = op.matrix().to_dense();
        let mut ev: Vec<f64> = m
            .selfadjoint_eigenvalues(faer::Side::Lower)
            .into_iter()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    fn commutator_norm(a: &SparseMatrix, b: &SparseMatrix) -> f64 {
        SparseMatrix::linear_combination(&[(1.0, &a.product(b)), (-1.0, &b.product(a))]).max_abs()
    }

    #[test]
    fn tfim_two_sites_single_bond() {
        let ops = build_model(&ModelSpec::tfim(2, 1.0, -1.0)).unwrap();
        let ev = dense_eigenvalues(&ops.g2);
        assert_eq!(ev, vec![-0.25, -0.25, 0.25, 0.25]);
        assert_eq!(ModelSpec::tfim(5, 1.0, 0.0).bonds().len(), 4);
        assert_eq!(
            ModelSpec::tfim(5, 1.0, 0.0)
                .with_boundary(Boundary::Periodic)
                .bonds()
                .len(),
            5
        );
    }

    #[test]
    fn hubbard_two_sites_double_occupancy() {
        // Four basis states |ud,0>, |u,d>, |d,u>, |0,ud>; two are doubly occupied.
        let ops = build_model(&ModelSpec::fermi_hubbard(2, 1.0, 0.0, 1, 1)).unwrap();
        assert!(ops.g2.matrix().is_diagonal());
        let mut diag = ops.g2.matrix().diagonal();
        diag.sort_by(f64::total_cmp);
        assert_eq!(diag, vec![0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn bose_single_site_two_particles() {
        let ops = build_model(&ModelSpec::bose_hubbard(1, 1.0, 0.0, 2)).unwrap();
        assert_eq!(ops.dimension(), 1);
        assert_eq!(ops.g2.matrix().get(0, 0), 4.0);
        let mut spec = ModelSpec::bose_hubbard(1, 1.0, 0.0, 2);
        spec.bose_interaction = BoseInteraction::PairCount;
        let ops = build_model(&spec).unwrap();
        assert_eq!(ops.g2.matrix().get(0, 0), 1.0);
    }

    #[test]
    fn hamiltonian_at_zero_coupling_is_h0() {
        let ops = build_model(&ModelSpec::tfim(3, 0.7, 0.0)).unwrap();
        let h = hamiltonian_at(&ops, 0.0, 0.0).unwrap();
        assert_eq!(h.matrix(), ops.h0.matrix());
    }

    #[test]
    fn tfim_two_sites_ground_energy() {
        // H = Sx1 + Sx2 - Sz1 Sz2. In the Sx-parity-even sector spanned by
        // |++>, |-->, Sz1Sz2 maps |++> <-> |--> with amplitude 1/4, so
        // E = -1/2 (1 + 1/16)^(1/2) * 2 ... solved as the 2x2 block
        // [[1, -1/4], [-1/4, -1]] with lowest eigenvalue -sqrt(1 + 1/16).
        let ops = build_model(&ModelSpec::tfim(2, 1.0, -1.0)).unwrap();
        let h = hamiltonian_at(&ops, -1.0, 0.0).unwrap();
        let ev = dense_eigenvalues(&h);
        let expected = -(1.0f64 + 1.0 / 16.0).sqrt();
        assert!((ev[0] - expected).abs() < 1e-12, "{ev:?}");
        // The odd block {|+->, |-+>} has Sz1Sz2 = [[0, 1/4], [1/4, 0]] shifted by 0.
        let mut all = vec![expected, (1.0f64 + 1.0 / 16.0).sqrt(), 0.25, -0.25];
        all.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&all) {
            assert!((a - b).abs() < 1e-12, "{ev:?} vs {all:?}");
        }
    }

    #[test]
    fn hubbard_two_sites_ground_energy_closed_form() {
        let (t, c) = (1.0, 4.0);
        let ops = build_model(&ModelSpec::fermi_hubbard(2, t, c, 1, 1)).unwrap();
        let h = hamiltonian_at(&ops, c, 0.0).unwrap();
        let ev = dense_eigenvalues(&h);
        let expected = (c - (c * c + 16.0 * t * t).sqrt()) / 2.0;
        assert!((ev[0] - expected).abs() < 1e-12);
        assert!((ev[0] + 0.828_427_124_746_190_1).abs() < 1e-12);
    }

    #[test]
    fn dh_dc_is_g2() {
        let ops = build_model(&ModelSpec::bose_hubbard(3, 1.0, 0.0, 3)).unwrap();
        let a = hamiltonian_at(&ops, 1.25, 0.0).unwrap();
        let b = hamiltonian_at(&ops, 0.25, 0.0).unwrap();
        let diff = SparseMatrix::linear_combination(&[(1.0, a.matrix()), (-1.0, b.matrix())]);
        let resid = SparseMatrix::linear_combination(&[(1.0, &diff), (-1.0, ops.g2.matrix())]);
        assert_eq!(resid.max_abs(), 0.0);
    }

    #[test]
    fn tfim_parity_commutes_without_longitudinal_field() {
        let spec = ModelSpec::tfim(4, 0.8, -1.3);
        let ops = build_model(&spec).unwrap();
        let d = ops.dimension();
        // prod_j (2 S^x_j) flips every spin.
        let parity = SparseMatrix::from_triplets(d, d, (0..d).map(|i| (d - 1 - i, i, 1.0)).collect());
        let h = hamiltonian_at(&ops, spec.c, 0.0).unwrap();
        assert!(commutator_norm(&parity, h.matrix()) < 1e-12);
        let hz = hamiltonian_at(&ops, spec.c, 0.3).unwrap();
        assert!(commutator_norm(&parity, hz.matrix()) > 1e-3);
    }

    #[test]
    fn hubbard_conserves_particle_number_on_full_fock_space() {
        let mut spec = ModelSpec::fermi_hubbard(3, 1.0, 2.0, 0, 0);
        spec.sector = None;
        let ops = build_model(&spec).unwrap();
        let n_ops: Vec<_> = (0..3)
            .flat_map(|j| [Spin::Up, Spin::Down].map(|s| (1.0, TermDescriptor::FermionNumber { site: j, spin: s })))
            .collect();
        let n = sum_terms(ops.basis(), n_ops, "N").unwrap();
        let h = hamiltonian_at(&ops, 2.0, 0.0).unwrap();
        assert!(commutator_norm(n.matrix(), h.matrix()) < 1e-12);

        let mut spec = ModelSpec::bose_hubbard(3, 1.0, 1.5, 0);
        spec.sector = None;
        spec.boson_cutoff = Some(2);
        let ops = build_model(&spec).unwrap();
        let n = sum_terms(
            ops.basis(),
            (0..3).map(|j| (1.0, TermDescriptor::BosonNumber { site: j })),
            "N",
        )
        .unwrap();
        let h = hamiltonian_at(&ops, 1.5, 0.0).unwrap();
        assert!(commutator_norm(n.matrix(), h.matrix()) < 1e-12);
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = ModelSpec::fermi_hubbard(2, 1.0, 1.0, 1, 1);
        spec.h_z = 0.1;
        assert!(build_model(&spec).is_err());
        let mut spec = ModelSpec::tfim(13, 1.0, 1.0);
        assert!(matches!(build_model(&spec), Err(Error::DimensionCap { .. })));
        spec.dimension_cap = 1 << 13;
        spec.sites = 3;
        assert!(build_model(&spec).is_ok());
        assert!(hamiltonian_at(
            &build_model(&ModelSpec::bose_hubbard(2, 1.0, 0.0, 1)).unwrap(),
            1.0,
            0.5
        )
        .is_err());
    }

    #[test]
    fn all_model_operators_are_hermitian() {
        for spec in [
            ModelSpec::tfim(5, 1.0, -0.5).with_h_z(0.2).with_boundary(Boundary::Periodic),
            ModelSpec::fermi_hubbard(4, 1.0, 3.0, 2, 1).with_boundary(Boundary::Periodic),
            ModelSpec::bose_hubbard(4, 1.0, 2.0, 3),
        ] {
            let ops = build_model(&spec).unwrap();
            for op in ops.observables() {
                assert!(op.max_hermitian_deviation() < 1e-12);
            }
            let h = ops.hamiltonian_at(spec.c, spec.h_z).unwrap();
            assert!(h.max_hermitian_deviation() < 1e-12);
        }
    }
}
