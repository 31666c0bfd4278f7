//! Dense complex linear-algebra helpers shared by all modules.
//!
//! Everything here works on `DMatrix<Complex<f64>>`. Subspaces are always
//! represented by matrices with Euclidean-orthonormal columns obtained from
//! rank-revealing SVD, so span-level operations are basis independent.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative rank cutoff for SVD-based factorizations.
pub const RANK_TOL: f64 = 1e-10;
/// Threshold on principal angles for span-equality tests.
pub const SPAN_TOL: f64 = 1e-8;
/// Condition-number cap for "boundedly invertible" decisions.
pub const COND_CAP: f64 = 1e12;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Singular value decomposition A = U diag(s) V^H computed by one-sided
/// Jacobi rotations. `u` is m x n with zero columns past the rank, `v` is a
/// full n x n unitary, `s` is descending. Used instead of the built-in SVD,
/// which loses accuracy on rank-deficient structured inputs.
#[derive(Debug, Clone)]
pub struct JacobiSvd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

pub fn jacobi_svd(a: &CMatrix) -> JacobiSvd {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = identity(n);
    if n > 0 && m > 0 {
        let tol = 1e-15;
        for _sweep in 0..60 {
            let mut rotated = false;
            for i in 0..n {
                for j in (i + 1)..n {
                    let ci = w.column(i);
                    let cj = w.column(j);
                    let aii = ci.norm_squared();
                    let ajj = cj.norm_squared();
                    let aij = (ci.adjoint() * cj)[(0, 0)];
                    let off = aij.norm();
                    if off <= tol * (aii * ajj).sqrt().max(1e-300) {
                        continue;
                    }
                    rotated = true;
                    // phase so the coupled 2x2 Gram becomes real symmetric
                    let phase = aij / off;
                    let theta = 0.5 * (2.0 * off).atan2(aii - ajj);
                    let (cs, sn) = (theta.cos(), theta.sin());
                    // columns (i, j) <- (c*ci + s*conj(phase)... ) apply
                    // R = [[c, -s*phase], [s*conj(phase), c]] on the right
                    for r in 0..m {
                        let wi = w[(r, i)];
                        let wj = w[(r, j)];
                        w[(r, i)] = wi * cs + wj * phase.conj() * sn;
                        w[(r, j)] = -wi * phase * sn + wj * cs;
                    }
                    for r in 0..n {
                        let vi = v[(r, i)];
                        let vj = v[(r, j)];
                        v[(r, i)] = vi * cs + vj * phase.conj() * sn;
                        v[(r, j)] = -vi * phase * sn + vj * cs;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
    }
    // norms, sorted descending
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|i| w.column(i).norm()).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let s: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let smax = s.first().cloned().unwrap_or(0.0);
    let mut u = zeros(m, n);
    let mut vv = zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vv.set_column(k, &v.column(i).into_owned());
        if norms[i] > 1e-300 && norms[i] > f64::EPSILON * smax * 1e-2 {
            let col = w.column(i).into_owned().scale(1.0 / norms[i]);
            u.set_column(k, &col);
        }
    }
    JacobiSvd { u, s, v: vv }
}

/// Hermitian eigendecomposition by two-sided Jacobi rotations; eigenvalues
/// descending, eigenvectors as columns.
pub fn jacobi_hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    if n == 0 {
        return (vec![], zeros(0, 0));
    }
    let mut w = (a + a.adjoint()).scale(0.5);
    let mut q = identity(n);
    let scale = max_abs(&w).max(1e-300);
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let off = w[(i, j)].norm();
                if off <= 1e-16 * scale {
                    continue;
                }
                rotated = true;
                let phase = w[(i, j)] / off;
                let theta = 0.5 * (2.0 * off).atan2(w[(i, i)].re - w[(j, j)].re);
                let (cs, sn) = (theta.cos(), theta.sin());
                // unitary R acting on (i, j): same convention as the SVD
                for r in 0..n {
                    let wi = w[(r, i)];
                    let wj = w[(r, j)];
                    w[(r, i)] = wi * cs + wj * phase.conj() * sn;
                    w[(r, j)] = -wi * phase * sn + wj * cs;
                }
                for col in 0..n {
                    let wi = w[(i, col)];
                    let wj = w[(j, col)];
                    w[(i, col)] = wi * cs + wj * phase * sn;
                    w[(j, col)] = -wi * phase.conj() * sn + wj * cs;
                }
                for r in 0..n {
                    let qi = q[(r, i)];
                    let qj = q[(r, j)];
                    q[(r, i)] = qi * cs + qj * phase.conj() * sn;
                    q[(r, j)] = -qi * phase * sn + qj * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]));
    let vals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vecs = CMatrix::from_fn(n, n, |r, k| q[(r, order[k])]);
    (vals, vecs)
}

/// Largest entry modulus; 0 for empty matrices.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(nr: usize, nc: usize) -> CMatrix {
    CMatrix::zeros(nr, nc)
}

/// Vertical concatenation. All blocks must agree in column count.
pub fn vcat(blocks: &[&CMatrix]) -> CMatrix {
    let nc = blocks.iter().map(|b| b.ncols()).max().unwrap_or(0);
    let nr: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(nr, nc);
    let mut row = 0;
    for b in blocks {
        assert!(b.ncols() == nc || b.nrows() == 0, "vcat: column mismatch");
        out.view_mut((row, 0), (b.nrows(), b.ncols())).copy_from(*b);
        row += b.nrows();
    }
    out
}

/// Horizontal concatenation. All blocks must agree in row count.
pub fn hcat(blocks: &[&CMatrix]) -> CMatrix {
    let nr = blocks.iter().map(|b| b.nrows()).max().unwrap_or(0);
    let nc: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(nr, nc);
    let mut col = 0;
    for b in blocks {
        assert!(b.nrows() == nr || b.ncols() == 0, "hcat: row mismatch");
        out.view_mut((0, col), (b.nrows(), b.ncols())).copy_from(*b);
        col += b.ncols();
    }
    out
}

/// 2x2 block matrix assembly.
pub fn block2x2(a: &CMatrix, b: &CMatrix, c_: &CMatrix, d: &CMatrix) -> CMatrix {
    vcat(&[&hcat(&[a, b]), &hcat(&[c_, d])])
}

/// Euclidean-orthonormal basis of the column span (rank-revealing SVD).
pub fn orth(m: &CMatrix) -> CMatrix {
    orth_tol(m, RANK_TOL)
}

pub fn orth_tol(m: &CMatrix, tol: f64) -> CMatrix {
    if m.ncols() == 0 || m.nrows() == 0 {
        return zeros(m.nrows(), 0);
    }
    let svd = jacobi_svd(m);
    let smax = svd.s.first().cloned().unwrap_or(0.0);
    if smax == 0.0 {
        return zeros(m.nrows(), 0);
    }
    let r = svd.s.iter().filter(|&&x| x > tol * smax).count();
    svd.u.columns(0, r).into_owned()
}

/// Orthonormal basis of the (right) null space.
pub fn null_space(m: &CMatrix) -> CMatrix {
    null_space_tol(m, RANK_TOL)
}

pub fn null_space_tol(m: &CMatrix, tol: f64) -> CMatrix {
    let nc = m.ncols();
    if nc == 0 {
        return zeros(0, 0);
    }
    if m.nrows() == 0 {
        return identity(nc);
    }
    let svd = jacobi_svd(m);
    let smax = svd.s.first().cloned().unwrap_or(0.0);
    let r = if smax == 0.0 {
        0
    } else {
        svd.s.iter().filter(|&&x| x > tol * smax).count()
    };
    svd.v.columns(r, nc - r).into_owned()
}

pub fn rank(m: &CMatrix) -> usize {
    rank_tol(m, RANK_TOL)
}

pub fn rank_tol(m: &CMatrix, tol: f64) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let svd = jacobi_svd(m);
    let smax = svd.s.first().cloned().unwrap_or(0.0);
    if smax == 0.0 {
        0
    } else {
        svd.s.iter().filter(|&&x| x > tol * smax).count()
    }
}

/// Moore-Penrose pseudoinverse via the Jacobi SVD.
pub fn pinv(m: &CMatrix) -> CMatrix {
    if m.nrows() == 0 || m.ncols() == 0 {
        return zeros(m.ncols(), m.nrows());
    }
    let svd = jacobi_svd(m);
    let smax = svd.s.first().cloned().unwrap_or(0.0);
    let mut acc = zeros(m.ncols(), m.nrows());
    for i in 0..svd.s.len() {
        if smax > 0.0 && svd.s[i] > RANK_TOL * smax {
            acc += (svd.v.column(i) * svd.u.column(i).adjoint()).scale(1.0 / svd.s[i]);
        }
    }
    acc
}

/// Solves A X = B for X in the least-squares sense; returns (X, residual).
pub fn lstsq(a: &CMatrix, b: &CMatrix) -> (CMatrix, f64) {
    let x = pinv(a) * b;
    let res = max_abs(&(a * &x - b));
    (x, res)
}

/// Inverse with a condition-number cap; `None` when the matrix is not
/// square or its condition number exceeds `COND_CAP`.
pub fn try_inverse_capped(m: &CMatrix) -> Option<CMatrix> {
    if m.nrows() != m.ncols() {
        return None;
    }
    if m.nrows() == 0 {
        return Some(zeros(0, 0));
    }
    let svd = jacobi_svd(m);
    let smax = svd.s.first().cloned().unwrap_or(0.0);
    let smin = svd.s.last().cloned().unwrap_or(0.0);
    // the cap is measured against max(smax, 1) so that numerically zero
    // pencils never count as well conditioned
    if smax == 0.0 || smin <= 0.0 || smax.max(1.0) / smin > COND_CAP {
        return None;
    }
    // invert through the factorization rather than LU
    let mut acc = zeros(m.ncols(), m.nrows());
    for i in 0..svd.s.len() {
        acc += (svd.v.column(i) * svd.u.column(i).adjoint()).scale(1.0 / svd.s[i]);
    }
    Some(acc)
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    jacobi_hermitian_eigen(m)
}

/// Inertia (negative, zero, positive counts) of a Hermitian matrix with a
/// symmetric zero band `tol * max(spectral norm, 1)`. The floor keeps the
/// band meaningful for numerically zero matrices (neutral subspaces).
pub fn inertia(m: &CMatrix, tol: f64) -> (usize, usize, usize) {
    let (vals, _) = hermitian_eigen(m);
    let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let band = tol * scale.max(1.0);
    let neg = vals.iter().filter(|&&v| v < -band).count();
    let pos = vals.iter().filter(|&&v| v > band).count();
    (neg, vals.len() - neg - pos, pos)
}

/// Eigenvalues of a general complex square matrix (Schur form).
pub fn eigenvalues(m: &CMatrix) -> Vec<C64> {
    let n = m.nrows();
    if n == 0 {
        return vec![];
    }
    if let Some(ev) = m.clone().schur().eigenvalues() {
        return ev.iter().cloned().collect();
    }
    // fall back on the real 2n x 2n embedding; spurious conjugates are
    // filtered by a rank test
    let re = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, ri) = (i / n, i % n);
        let (bj, rj) = (j / n, j % n);
        let z = m[(ri, rj)];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    });
    let scale = max_abs(m).max(1.0);
    re.complex_eigenvalues()
        .iter()
        .map(|z| c(z.re, z.im))
        .filter(|&lam| {
            let shifted = m - identity(n) * lam;
            smallest_singular_value(&shifted) <= 1e-8 * scale
        })
        .collect()
}

pub fn smallest_singular_value(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let svd = jacobi_svd(m);
    let k = m.nrows().min(m.ncols());
    svd.s[k - 1]
}

/// True when the column spans of two orthonormal-basis matrices coincide:
/// equal dimensions and all principal angles below `SPAN_TOL`.
pub fn span_eq(a: &CMatrix, b: &CMatrix) -> bool {
    span_eq_tol(a, b, SPAN_TOL)
}

pub fn span_eq_tol(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return false;
    }
    if a.ncols() == 0 {
        return true;
    }
    let m = a.adjoint() * b;
    let svd = jacobi_svd(&m);
    svd.s.iter().all(|&x| (x - 1.0).abs() < tol)
}

/// Orthonormal basis of the intersection of two column spans.
pub fn span_intersection(a: &CMatrix, b: &CMatrix) -> CMatrix {
    if a.ncols() == 0 || b.ncols() == 0 {
        return zeros(a.nrows(), 0);
    }
    // c in span(a) ∩ span(b)  <=>  c = a x = b y  <=>  (x; -y) in ker [a b]
    let ns = null_space(&hcat(&[a, b]));
    if ns.ncols() == 0 {
        return zeros(a.nrows(), 0);
    }
    orth(&(a * ns.rows(0, a.ncols()).into_owned()))
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn matrix_exp(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    if n == 0 {
        return zeros(0, 0);
    }
    let nrm = m.norm();
    let k = if nrm > 0.5 {
        (nrm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let b = m.scale(1.0 / 2f64.powi(k as i32));
    let mut term = identity(n);
    let mut acc = identity(n);
    for i in 1..24 {
        term = (&term * &b).scale(1.0 / i as f64);
        acc += &term;
    }
    for _ in 0..k {
        acc = &acc * &acc;
    }
    acc
}

/// Kronecker product, column-major vec convention: vec(AXB) = (B^T ⊗ A) vec(X).
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn vec_of(m: &CMatrix) -> CVector {
    CVector::from_iterator(m.nrows() * m.ncols(), m.iter().cloned())
}

pub fn unvec(v: &CVector, nr: usize, nc: usize) -> CMatrix {
    CMatrix::from_fn(nr, nc, |i, j| v[j * nr + i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orth_and_null_are_complementary() {
        let m = CMatrix::from_row_slice(
            3,
            4,
            &[
                c(1.0, 0.0),
                c(0.0, 1.0),
                c(1.0, 1.0),
                c(0.0, 0.0),
                c(2.0, 0.0),
                c(0.0, 2.0),
                c(2.0, 2.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(1.0, 0.0),
                c(1.0, 0.0),
                c(0.0, 0.0),
            ],
        );
        let r = rank(&m);
        let q = orth(&m);
        let ns = null_space(&m);
        assert_eq!(q.ncols(), r);
        assert_eq!(ns.ncols(), 4 - r);
        assert!(max_abs(&(&m * &ns)) < 1e-12);
    }

    #[test]
    fn span_intersection_of_planes() {
        let a = orth(&CMatrix::from_row_slice(
            3,
            2,
            &[cr(1.0), cr(0.0), cr(0.0), cr(1.0), cr(0.0), cr(0.0)],
        ));
        let b = orth(&CMatrix::from_row_slice(
            3,
            2,
            &[cr(0.0), cr(0.0), cr(1.0), cr(0.0), cr(0.0), cr(1.0)],
        ));
        let i = span_intersection(&a, &b);
        assert_eq!(i.ncols(), 1);
        assert!(i[(0, 0)].norm() < 1e-10 && i[(2, 0)].norm() < 1e-10);
    }

    #[test]
    fn eigenvalues_of_companion() {
        let m = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(-1.0), cr(0.0)]);
        let mut ev = eigenvalues(&m);
        ev.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-9);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn jacobi_svd_handles_structured_rank_deficiency() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let mut worst = 0.0f64;
        for trial in 0..200usize {
            let nr = 1 + trial % 7;
            let nc = 1 + (trial / 5) % 7;
            let rk = 1 + trial % nr.min(nc).max(1);
            let a = CMatrix::from_fn(nr, rk, |_, _| {
                c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let b = CMatrix::from_fn(rk, nc, |_, _| {
                c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let mut m = &a * &b;
            if trial % 3 == 0 && nc > 1 {
                for i in 0..nr {
                    m[(i, nc - 1)] = c(0.0, 0.0);
                }
            }
            if trial % 4 == 0 && nr > 1 {
                for j in 0..nc {
                    m[(nr - 1, j)] = c(0.0, 0.0);
                }
            }
            let svd = jacobi_svd(&m);
            let sig = CMatrix::from_fn(nc, nc, |i, j| if i == j { cr(svd.s[i]) } else { cr(0.0) });
            worst = worst.max(max_abs(&(&svd.u * sig * svd.v.adjoint() - &m)));
            worst = worst.max(max_abs(&(svd.v.adjoint() * &svd.v - identity(nc))));
            let null = null_space(&m);
            worst = worst.max(max_abs(&(&m * &null)));
            let q = orth(&m);
            assert_eq!(q.ncols() + null.ncols(), nc.min(rank(&m) + (nc - rank(&m))));
            if q.ncols() > 0 {
                worst = worst.max(max_abs(&(q.adjoint() * &q - identity(q.ncols()))));
            }
        }
        assert!(worst < 1e-12, "worst structured SVD residual {worst:.3e}");
    }

    #[test]
    fn jacobi_hermitian_eigen_reconstructs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(78);
        let mut worst = 0.0f64;
        for trial in 0..100usize {
            let n = 1 + trial % 8;
            let a = CMatrix::from_fn(n, n, |_, _| {
                c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let h = (&a + a.adjoint()).scale(0.5);
            let (vals, vecs) = jacobi_hermitian_eigen(&h);
            let d = CMatrix::from_fn(n, n, |i, j| if i == j { cr(vals[i]) } else { cr(0.0) });
            worst = worst.max(max_abs(&(&vecs * d * vecs.adjoint() - &h)));
            worst = worst.max(max_abs(&(vecs.adjoint() * &vecs - identity(n))));
            // eigenvalues descending
            for k in 1..n {
                assert!(vals[k - 1] >= vals[k] - 1e-12);
            }
        }
        assert!(worst < 1e-12, "worst Hermitian eigen residual {worst:.3e}");
    }

    #[test]
    fn capped_inverse_matches_direct_solve() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(79);
        for n in 1..=6usize {
            let m = CMatrix::from_fn(n, n, |_, _| {
                c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            }) + identity(n).scale(1.5);
            let inv = try_inverse_capped(&m).unwrap();
            assert!(max_abs(&(&m * inv - identity(n))) < 1e-11);
        }
        // singular matrix rejected
        let mut sing = identity(3);
        sing[(2, 2)] = cr(0.0);
        assert!(try_inverse_capped(&sing).is_none());
    }

    #[test]
    fn kron_vec_identity() {
        let a = CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(2.0), cr(3.0), cr(4.0)]);
        let x = CMatrix::from_row_slice(2, 2, &[cr(0.5), c(0.0, 1.0), cr(-1.0), cr(2.0)]);
        let b = CMatrix::from_row_slice(2, 2, &[cr(2.0), cr(0.0), cr(1.0), cr(1.0)]);
        let lhs = vec_of(&(&a * &x * &b));
        let rhs = kron(&b.transpose(), &a) * vec_of(&x);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn matrix_exp_rotation() {
        let m = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(-1.0), cr(1.0), cr(0.0)]);
        let e = matrix_exp(&m.scale(std::f64::consts::PI));
        assert!(max_abs(&(e + identity(2))) < 1e-10);
    }
}
