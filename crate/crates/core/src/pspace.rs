//! Finite-dimensional Pontryagin spaces and their subspaces.
//!
//! A space is (C^n, J) with J a Hermitian involution; the indefinite inner
//! product is `[f, g] = (J f, g)`, conjugate-linear in the second argument.
//! The negative index kappa counts the -1 eigenvalues of J. Subspaces carry
//! Euclidean-orthonormal bases and compare by span, never by basis.

use crate::error::{Error, Result};
use crate::linalg::{
    self, cr, hcat, hermitian_eigen, identity, max_abs, null_space, orth, span_eq,
    span_intersection, vcat, zeros, CMatrix, CVector, C64,
};

/// Sign class of a vector under the indefinite inner product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorClass {
    Positive,
    Negative,
    Neutral,
}

/// A finite-dimensional Pontryagin space (C^n, J).
#[derive(Debug, Clone)]
pub struct PontryaginSpace {
    dim: usize,
    j: CMatrix,
    kappa: usize,
}

impl PontryaginSpace {
    /// Builds a space from a fundamental symmetry candidate. The matrix is
    /// symmetrized and projected onto an exact involution through its
    /// spectral decomposition; construction fails if it is not a Hermitian
    /// involution within `1e-6`.
    pub fn new(j: CMatrix) -> Result<Self> {
        if j.nrows() != j.ncols() {
            return Err(Error::Dimension(format!(
                "fundamental symmetry must be square, got {}x{}",
                j.nrows(),
                j.ncols()
            )));
        }
        let n = j.nrows();
        if n == 0 {
            return Ok(PontryaginSpace {
                dim: 0,
                j,
                kappa: 0,
            });
        }
        let herm_res = max_abs(&(&j - j.adjoint()));
        let inv_res = max_abs(&(&j * &j - identity(n)));
        if herm_res > 1e-6 || inv_res > 1e-6 {
            return Err(Error::Input(format!(
                "not a fundamental symmetry: |J - J*| = {herm_res:.2e}, |J^2 - I| = {inv_res:.2e}"
            )));
        }
        let sym = (&j + j.adjoint()).scale(0.5);
        let (vals, vecs) = hermitian_eigen(&sym);
        let kappa = vals.iter().filter(|&&v| v < 0.0).count();
        let signs = CMatrix::from_fn(n, n, |r, col| {
            if r == col {
                cr(vals[r].signum())
            } else {
                cr(0.0)
            }
        });
        let exact = &vecs * signs * vecs.adjoint();
        let exact = (&exact + exact.adjoint()).scale(0.5);
        Ok(PontryaginSpace {
            dim: n,
            j: exact,
            kappa,
        })
    }

    /// Hilbert space: J = I.
    pub fn hilbert(dim: usize) -> Self {
        PontryaginSpace {
            dim,
            j: identity(dim),
            kappa: 0,
        }
    }

    /// Diagonal metric with `plus` entries +1 followed by `minus` entries -1.
    pub fn with_signature(plus: usize, minus: usize) -> Self {
        let dim = plus + minus;
        let j = CMatrix::from_fn(dim, dim, |r, c_| {
            if r != c_ {
                cr(0.0)
            } else if r < plus {
                cr(1.0)
            } else {
                cr(-1.0)
            }
        });
        PontryaginSpace {
            dim,
            j,
            kappa: minus,
        }
    }

    /// Boundary space L1 x L2 with metric diag(I, -I).
    pub fn boundary(l1: usize, l2: usize) -> Self {
        let mut s = Self::with_signature(l1, l2);
        s.kappa = l2;
        s
    }

    /// Graph space of a pair of spaces with metric diag(J_in, -J_out).
    pub fn graph(space_in: &Self, space_out: &Self) -> Self {
        let n1 = space_in.dim;
        let n2 = space_out.dim;
        let j = vcat(&[
            &hcat(&[&space_in.j, &zeros(n1, n2)]),
            &hcat(&[&zeros(n2, n1), &(-space_out.j.clone())]),
        ]);
        PontryaginSpace {
            dim: n1 + n2,
            j,
            kappa: space_in.kappa + (n2 - space_out.kappa),
        }
    }

    /// Orthogonal direct sum of two spaces.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let j = vcat(&[
            &hcat(&[&self.j, &zeros(self.dim, other.dim)]),
            &hcat(&[&zeros(other.dim, self.dim), &other.j]),
        ]);
        PontryaginSpace {
            dim: self.dim + other.dim,
            j,
            kappa: self.kappa + other.kappa,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn j(&self) -> &CMatrix {
        &self.j
    }

    pub fn is_hilbert(&self) -> bool {
        self.kappa == 0
    }

    pub fn same_space(&self, other: &Self) -> bool {
        self.dim == other.dim && max_abs(&(&self.j - &other.j)) < 1e-10
    }

    /// Indefinite inner product `[f, g] = (J f, g)`.
    pub fn inner(&self, f: &CVector, g: &CVector) -> Result<C64> {
        if f.len() != self.dim || g.len() != self.dim {
            return Err(Error::Dimension(format!(
                "inner product expects vectors of length {}, got {} and {}",
                self.dim,
                f.len(),
                g.len()
            )));
        }
        Ok((g.adjoint() * (&self.j * f))[(0, 0)])
    }

    /// Classifies a nonzero vector by the sign of `[f, f]`.
    pub fn vector_class(&self, f: &CVector) -> Result<VectorClass> {
        if f.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        let v = self.inner(f, f)?.re;
        let band = 1e-10 * f.norm_squared();
        Ok(if v > band {
            VectorClass::Positive
        } else if v < -band {
            VectorClass::Negative
        } else {
            VectorClass::Neutral
        })
    }

    pub fn full_subspace(&self) -> Subspace {
        Subspace {
            ambient: self.clone(),
            basis: identity(self.dim),
        }
    }

    pub fn zero_subspace(&self) -> Subspace {
        Subspace {
            ambient: self.clone(),
            basis: zeros(self.dim, 0),
        }
    }

    pub fn subspace(&self, columns: &CMatrix) -> Result<Subspace> {
        if columns.nrows() != self.dim {
            return Err(Error::Dimension(format!(
                "subspace generators must have {} rows, got {}",
                self.dim,
                columns.nrows()
            )));
        }
        Ok(Subspace {
            ambient: self.clone(),
            basis: orth(columns),
        })
    }
}

/// Decomposition of a subspace into isotropic, uniformly positive and
/// uniformly negative summands.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub isotropic: Subspace,
    pub positive: Subspace,
    pub negative: Subspace,
}

/// A subspace of a Pontryagin space, stored as an orthonormal column basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient: PontryaginSpace,
    basis: CMatrix,
}

impl Subspace {
    pub fn ambient(&self) -> &PontryaginSpace {
        &self.ambient
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Compressed Gram form B* J B of the ambient metric.
    pub fn gram(&self) -> CMatrix {
        self.basis.adjoint() * self.ambient.j() * &self.basis
    }

    /// Count of negative eigenvalues of the compressed Gram form, with a
    /// symmetric zero band classifying isotropic directions.
    pub fn negative_index(&self) -> usize {
        let (neg, _, _) = linalg::inertia(&self.gram(), 1e-10);
        neg
    }

    /// `{g : [f, g] = 0 for all f in self}`. The metric is invertible, so
    /// the companion has complementary dimension.
    pub fn orthogonal_companion(&self) -> Subspace {
        let m = self.basis.adjoint() * self.ambient.j();
        Subspace {
            ambient: self.ambient.clone(),
            basis: null_space(&m),
        }
    }

    /// Splits the subspace into isotropic, positive and negative parts via
    /// the spectral decomposition of the compressed Gram form.
    pub fn decompose(&self) -> Decomposition {
        let g = self.gram();
        let (vals, vecs) = hermitian_eigen(&g);
        let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let band = 1e-10 * scale.max(1e-300);
        let pick = |pred: &dyn Fn(f64) -> bool| -> CMatrix {
            let cols: Vec<usize> = (0..vals.len()).filter(|&i| pred(vals[i])).collect();
            let sel = CMatrix::from_fn(vals.len(), cols.len(), |r, k| vecs[(r, cols[k])]);
            orth(&(&self.basis * sel))
        };
        Decomposition {
            isotropic: Subspace {
                ambient: self.ambient.clone(),
                basis: pick(&|v| v.abs() <= band),
            },
            positive: Subspace {
                ambient: self.ambient.clone(),
                basis: pick(&|v| v > band),
            },
            negative: Subspace {
                ambient: self.ambient.clone(),
                basis: pick(&|v| v < -band),
            },
        }
    }

    pub fn span_eq(&self, other: &Subspace) -> bool {
        span_eq(&self.basis, &other.basis)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        Subspace {
            ambient: self.ambient.clone(),
            basis: span_intersection(&self.basis, &other.basis),
        }
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        Subspace {
            ambient: self.ambient.clone(),
            basis: orth(&hcat(&[&self.basis, &other.basis])),
        }
    }

    pub fn contains_span(&self, other: &Subspace) -> bool {
        if other.dim() == 0 {
            return true;
        }
        let proj = &self.basis * (self.basis.adjoint() * &other.basis);
        max_abs(&(proj - &other.basis)) < 1e-8
    }
}

/// Unit coordinate vector e_k (0-indexed) in C^n.
pub fn unit_vector(n: usize, k: usize) -> CVector {
    CVector::from_fn(n, |i, _| if i == k { cr(1.0) } else { cr(0.0) })
}

/// Anti-diagonal fundamental symmetry of size n (ones on the skew diagonal).
pub fn antidiagonal_symmetry(n: usize) -> CMatrix {
    CMatrix::from_fn(
        n,
        n,
        |r, col| if r + col == n - 1 { cr(1.0) } else { cr(0.0) },
    )
}
