//! Linear relations between Pontryagin spaces, stored as orthonormal column
//! bases of their graphs.
//!
//! A relation T from (H1, J1) to (H2, J2) is any subspace of H1 x H2. The
//! graph carries the Krein metric diag(J1, -J2); isometry, contraction and
//! expansion are sign conditions on the compressed form of that metric, and
//! the adjoint is a single null-space computation.

use crate::error::{Error, Result};
use crate::linalg::{
    self, hcat, identity, max_abs, null_space, orth, pinv, span_eq, try_inverse_capped, vcat,
    zeros, CMatrix, C64,
};
use crate::pspace::{PontryaginSpace, Subspace};

/// Domain, range, kernel and multivalued part of a relation.
#[derive(Debug, Clone)]
pub struct RelationParts {
    pub dom: Subspace,
    pub ran: Subspace,
    pub ker: Subspace,
    pub mul: Subspace,
}

/// Sign classification of a relation under the graph metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub isometric: bool,
    pub unitary: bool,
    pub contractive: bool,
    pub expanding: bool,
}

/// Residuals for the two unitary-relation identities
/// ker T = (dom T)^perp and mul T = (ran T)^perp.
#[derive(Debug, Clone, Copy)]
pub struct UnitaryIdentityReport {
    pub ker_dom_residual: f64,
    pub mul_ran_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct LinearRelation {
    space_in: PontryaginSpace,
    space_out: PontryaginSpace,
    /// Orthonormal basis of the graph; first `dim_in` rows are the input
    /// components, the rest the output components.
    basis: CMatrix,
}

impl LinearRelation {
    pub fn new(
        space_in: PontryaginSpace,
        space_out: PontryaginSpace,
        generators: &CMatrix,
    ) -> Result<Self> {
        let total = space_in.dim() + space_out.dim();
        if generators.nrows() != total {
            return Err(Error::Dimension(format!(
                "relation generators must have {} rows, got {}",
                total,
                generators.nrows()
            )));
        }
        Ok(LinearRelation {
            space_in,
            space_out,
            basis: orth(generators),
        })
    }

    /// Graph of a matrix acting from `space_in` to `space_out`.
    pub fn from_operator(
        space_in: PontryaginSpace,
        space_out: PontryaginSpace,
        a: &CMatrix,
    ) -> Result<Self> {
        if a.nrows() != space_out.dim() || a.ncols() != space_in.dim() {
            return Err(Error::Dimension(format!(
                "operator must be {}x{}, got {}x{}",
                space_out.dim(),
                space_in.dim(),
                a.nrows(),
                a.ncols()
            )));
        }
        let gens = vcat(&[&identity(space_in.dim()), a]);
        LinearRelation::new(space_in, space_out, &gens)
    }

    pub fn identity_on(space: &PontryaginSpace) -> Self {
        let gens = vcat(&[&identity(space.dim()), &identity(space.dim())]);
        LinearRelation {
            space_in: space.clone(),
            space_out: space.clone(),
            basis: orth(&gens),
        }
    }

    pub fn space_in(&self) -> &PontryaginSpace {
        &self.space_in
    }

    pub fn space_out(&self) -> &PontryaginSpace {
        &self.space_out
    }

    /// Dimension of the graph subspace.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// Input components of the generators.
    pub fn x(&self) -> CMatrix {
        self.basis.rows(0, self.space_in.dim()).into_owned()
    }

    /// Output components of the generators.
    pub fn y(&self) -> CMatrix {
        self.basis
            .rows(self.space_in.dim(), self.space_out.dim())
            .into_owned()
    }

    /// Graph space (H1 x H2, diag(J1, -J2)).
    pub fn graph_space(&self) -> PontryaginSpace {
        PontryaginSpace::graph(&self.space_in, &self.space_out)
    }

    pub fn graph_subspace(&self) -> Subspace {
        self.graph_space()
            .subspace(&self.basis)
            .expect("graph basis has matching dimension")
    }

    pub fn inverse(&self) -> LinearRelation {
        LinearRelation {
            space_in: self.space_out.clone(),
            space_out: self.space_in.clone(),
            basis: orth(&vcat(&[&self.y(), &self.x()])),
        }
    }

    pub fn span_eq(&self, other: &LinearRelation) -> bool {
        self.space_in.dim() == other.space_in.dim()
            && self.space_out.dim() == other.space_out.dim()
            && span_eq(&self.basis, &other.basis)
    }

    pub fn parts(&self) -> RelationParts {
        let x = self.x();
        let y = self.y();
        let dom = self.space_in.subspace(&x).expect("dom");
        let ran = self.space_out.subspace(&y).expect("ran");
        // ker: inputs of graph elements with vanishing output
        let cy = null_space(&y);
        let ker = self.space_in.subspace(&(&x * &cy)).expect("ker");
        let cx = null_space(&x);
        let mul = self.space_out.subspace(&(&y * &cx)).expect("mul");
        RelationParts { dom, ran, ker, mul }
    }

    /// Adjoint relation from (H2, J2) to (H1, J1), computed as the Euclidean
    /// orthogonal complement of the block-flipped, metric-weighted graph.
    pub fn adjoint(&self) -> LinearRelation {
        let x = self.x();
        let y = self.y();
        // (h, k) adjoint-related iff Y* J2 h - X* J1 k = 0
        let m = hcat(&[
            &(y.adjoint() * self.space_out.j()),
            &(-(x.adjoint() * self.space_in.j())),
        ]);
        LinearRelation {
            space_in: self.space_out.clone(),
            space_out: self.space_in.clone(),
            basis: null_space(&m),
        }
    }

    /// Hermitian form X* J1 X - Y* J2 Y on graph coefficients; zero exactly
    /// for isometric relations.
    pub fn isometry_form(&self) -> CMatrix {
        let x = self.x();
        let y = self.y();
        let a = x.adjoint() * self.space_in.j() * &x;
        let b = y.adjoint() * self.space_out.j() * &y;
        a - b
    }

    pub fn classify(&self) -> Classification {
        let q = self.isometry_form();
        let scale = max_abs(&q).max(1e-300);
        let isometric = max_abs(&q) <= 1e-10 * scale.max(1.0) || max_abs(&q) < 1e-12;
        let (neg, _, pos) = linalg::inertia(&q, 1e-10);
        let contractive = isometric || neg == 0;
        let expanding = isometric || pos == 0;
        let unitary = isometric && self.inverse().span_eq(&self.adjoint());
        Classification {
            isometric,
            unitary,
            contractive,
            expanding,
        }
    }

    /// Verifies ker T = (dom T)^perp and mul T = (ran T)^perp; the residuals
    /// are span distances (1.0 when the dimensions disagree).
    pub fn check_unitary_identities(&self) -> Result<UnitaryIdentityReport> {
        if !self.classify().unitary {
            return Err(Error::NotUnitary(
                "unitary identities only hold for unitary relations".into(),
            ));
        }
        let parts = self.parts();
        let ker_dom = span_distance(parts.ker.basis(), parts.dom.orthogonal_companion().basis());
        let mul_ran = span_distance(parts.mul.basis(), parts.ran.orthogonal_companion().basis());
        Ok(UnitaryIdentityReport {
            ker_dom_residual: ker_dom,
            mul_ran_residual: mul_ran,
            pass: ker_dom < 1e-8 && mul_ran < 1e-8,
        })
    }

    /// Point spectrum: lambda with ker(T - lambda) nontrivial. Candidates
    /// come from the compressed pencil and are confirmed by a rank test.
    pub fn point_spectrum(&self) -> Vec<C64> {
        if self.space_in.dim() != self.space_out.dim() || self.dim() == 0 {
            return vec![];
        }
        let x = self.x();
        let y = self.y();
        let xx = x.adjoint() * &x;
        let scale = max_abs(&y).max(max_abs(&x)).max(1.0);
        let candidates: Vec<C64> = match try_inverse_capped(&xx) {
            Some(inv) => linalg::eigenvalues(&(inv * (x.adjoint() * &y))),
            None => return self.point_spectrum_scan(),
        };
        let mut out = vec![];
        for lam in candidates {
            let pencil = &y - &x * lam;
            let hit = linalg::smallest_singular_value(&pencil) <= 1e-8 * scale * (1.0 + lam.norm());
            if hit && !out.iter().any(|z: &C64| (z - lam).norm() < 1e-8) {
                out.push(lam);
            }
        }
        out
    }

    // fallback when the domain is degenerate: candidates from the
    // pseudoinverse-compressed pencil, confirmed by a rank test
    fn point_spectrum_scan(&self) -> Vec<C64> {
        let x = self.x();
        let y = self.y();
        let k = self.dim();
        let a = x.adjoint() * &y;
        let b = x.adjoint() * &x;
        let mut out = vec![];
        for lam in linalg::eigenvalues(&(pinv(&b) * &a)) {
            let pencil = &y - &x * lam;
            if linalg::rank(&pencil) < k {
                out.push(lam);
            }
        }
        out
    }

    /// Defect subspace ker(T^{-[*]} - lambda) of an isometric relation.
    pub fn defect_subspace(&self, lambda: C64) -> Result<Subspace> {
        if (lambda.norm() - 1.0).abs() < 1e-12 {
            return Err(Error::UnimodularPoint(lambda));
        }
        let a = self.inverse().adjoint();
        let x = a.x();
        let y = a.y();
        let coeff = null_space(&(&y - &x * lambda));
        self.space_in.subspace(&(&x * coeff))
    }

    /// Simplicity test for an isometric operator: no point spectrum off the
    /// unit circle and defect subspaces spanning the whole space over the
    /// sample set. Samples hitting the point spectrum are discarded. The
    /// span must stabilize before the final quarter of the samples.
    pub fn is_simple(&self, samples: &[C64]) -> Result<bool> {
        let n = self.space_in.dim();
        for lam in self.point_spectrum() {
            if (lam.norm() - 1.0).abs() > 1e-8 {
                return Ok(false);
            }
        }
        let spectrum = self.point_spectrum();
        let mut basis = zeros(n, 0);
        let mut dims = vec![];
        for &lam in samples {
            if (lam.norm() - 1.0).abs() < 1e-6 {
                continue;
            }
            if spectrum.iter().any(|z| (z - lam).norm() < 1e-8) {
                continue;
            }
            let d = self.defect_subspace(lam)?;
            basis = orth(&hcat(&[&basis, d.basis()]));
            dims.push(basis.ncols());
        }
        if dims.is_empty() {
            return Err(Error::InsufficientSamples(
                "no admissible sample points".into(),
            ));
        }
        let full = basis.ncols() == n;
        // stabilized: the last half of the samples added nothing
        let half = dims.len() / 2;
        let stabilized = dims[half.saturating_sub(1)] == *dims.last().unwrap();
        if !stabilized && !full {
            return Err(Error::InsufficientSamples(format!(
                "defect span still growing after {} samples (dim {})",
                dims.len(),
                basis.ncols()
            )));
        }
        Ok(full)
    }

    /// `(T - lambda)^{-1}` as a matrix when it is a bounded everywhere
    /// defined operator, i.e. the square pencil Y - lambda X is invertible.
    pub fn resolvent_matrix(&self, lambda: C64) -> Option<CMatrix> {
        if self.space_in.dim() != self.space_out.dim() {
            return None;
        }
        let n = self.space_in.dim();
        if self.dim() != n {
            return None;
        }
        let x = self.x();
        let pencil = self.y() - &x * lambda;
        try_inverse_capped(&pencil).map(|inv| x * inv)
    }

    /// `(I - z T)^{-1}` as a matrix when bounded and everywhere defined.
    pub fn coresolvent_matrix(&self, z: C64) -> Option<CMatrix> {
        if self.space_in.dim() != self.space_out.dim() {
            return None;
        }
        let n = self.space_in.dim();
        if self.dim() != n {
            return None;
        }
        let x = self.x();
        let pencil = &x - self.y() * z;
        try_inverse_capped(&pencil).map(|inv| x * inv)
    }

    /// True when `(T - lambda)^{-1}` is boundedly invertible.
    pub fn in_resolvent_set(&self, lambda: C64) -> bool {
        self.resolvent_matrix(lambda).is_some()
    }
}

/// Maximal deviation between two spans: dimension mismatch counts as 1.
pub fn span_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let s = (a.adjoint() * b).svd(false, false).singular_values;
    s.iter().map(|&x| (x - 1.0).abs()).fold(0.0, f64::max)
}
