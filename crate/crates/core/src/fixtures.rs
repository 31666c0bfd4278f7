//! Reference fixtures shared by tests, the acceptance suite and the CLI.
//!
//! `antidiag4_*` is a fully worked 4-dimensional example: the state space
//! carries the skew-diagonal fundamental symmetry, the isometry maps e1 to
//! e2, every defect subspace is degenerate, and the Weyl function of the
//! attached boundary triple has an explicit rational closed form whose
//! kernel is singular at every point pair.

use crate::boundary::BoundaryPair;
use crate::colligation::UnitaryColligation;
use crate::error::Result;
use crate::kernels::{classify_pair, PairClass};
use crate::linalg::{c, cr, orth, vcat, zeros, CMatrix, C64};
use crate::pspace::{antidiagonal_symmetry, PontryaginSpace};
use crate::realize::{realize, RationalFunctionData};
use crate::relation::LinearRelation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Boundary triple over (C^4, antidiagonal J) for the isometry e1 -> e2.
/// The domain is the full adjoint-inverse relation { (f, f') : f'_3 = f_4 }
/// and the boundary maps are the diagonalizing combinations of the graph
/// form; both boundary spaces are C^3.
pub fn antidiag4_pair() -> Result<BoundaryPair> {
    let space = PontryaginSpace::new(antidiagonal_symmetry(4))?;
    let s = cr(1.0 / 2f64.sqrt());
    // free parameters: f1, f2, f3, f4, f'1, f'2, f'4 (f'3 = f4)
    let mut gens = zeros(8 + 6, 7);
    for k in 0..7 {
        let mut f = zeros(4, 1);
        let mut fp = zeros(4, 1);
        match k {
            0..=3 => f[(k, 0)] = cr(1.0),
            4 => fp[(0, 0)] = cr(1.0),
            5 => fp[(1, 0)] = cr(1.0),
            _ => fp[(3, 0)] = cr(1.0),
        }
        if k == 3 {
            fp[(2, 0)] = cr(1.0); // f'_3 = f_4
        }
        let u1 = CMatrix::from_fn(3, 1, |r, _| {
            s * match r {
                0 => fp[(0, 0)] - fp[(3, 0)],
                1 => f[(0, 0)] - fp[(1, 0)] + f[(3, 0)],
                _ => f[(1, 0)] + f[(2, 0)],
            }
        });
        let u2 = CMatrix::from_fn(3, 1, |r, _| {
            s * match r {
                0 => fp[(0, 0)] + fp[(3, 0)],
                1 => f[(0, 0)] - fp[(1, 0)] - f[(3, 0)],
                _ => f[(1, 0)] - f[(2, 0)],
            }
        });
        let col = vcat(&[&f, &fp, &u1, &u2]);
        gens.view_mut((0, k), (14, 1)).copy_from(&col);
    }
    let graph = PontryaginSpace::graph(&space, &space);
    let boundary = PontryaginSpace::boundary(3, 3);
    let gamma = LinearRelation::new(graph, boundary, &gens)?;
    BoundaryPair::direct(space, 3, 3, gamma)
}

/// Closed form of the Weyl function of `antidiag4_pair`.
pub fn antidiag4_theta(lambda: C64) -> CMatrix {
    let l = lambda;
    let scale = (l * l * cr(3.0)).inv();
    CMatrix::from_row_slice(
        3,
        3,
        &[
            l * l,
            l.powu(3) * cr(2.0),
            l.powu(4) * cr(2.0),
            l * cr(2.0),
            l * l,
            -l.powu(3) * cr(2.0),
            cr(2.0),
            -l * cr(2.0),
            l * l,
        ],
    ) * scale
}

/// Closed form of the kernel S_omega(lambda) of `antidiag4_pair` for
/// interior points.
pub fn antidiag4_kernel(lambda: C64, omega: C64) -> CMatrix {
    let (l, wbar) = (lambda, omega.conj());
    let q = l * wbar;
    let mid = CMatrix::from_row_slice(
        3,
        3,
        &[
            (cr(1.0) + q * cr(2.0)) * cr(2.0),
            -(cr(2.0) + q),
            cr(1.0) - q,
            -(cr(2.0) + q),
            (cr(1.0) - q) * cr(2.0),
            -(cr(1.0) + q * cr(2.0)),
            cr(1.0) - q,
            -(cr(1.0) + q * cr(2.0)),
            -(cr(2.0) + q) * cr(2.0),
        ],
    );
    let lam_diag = CMatrix::from_fn(3, 3, |r, s| {
        if r == s {
            l.powu(r as u32)
        } else {
            c(0.0, 0.0)
        }
    });
    let om_diag = CMatrix::from_fn(3, 3, |r, s| {
        if r == s {
            omega.powu(r as u32)
        } else {
            c(0.0, 0.0)
        }
    });
    let front = cr(-2.0) * ((l * l * wbar * wbar * cr(9.0)).inv());
    om_diag.adjoint() * mid * lam_diag * front
}

/// Seeded ordinary boundary triple backed by a closely connected
/// colligation.
pub fn random_ordinary_pair(seed: u64, dim: usize, kappa: usize, l: usize) -> BoundaryPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let col = UnitaryColligation::random_closely_connected(&mut rng, dim, kappa, l);
        let bp = BoundaryPair::from_colligation(col).expect("random colligation validates");
        if classify_pair(&bp).class == PairClass::Ordinary {
            return bp;
        }
    }
}

/// Pair whose boundary relation has a nontrivial multivalued part: the
/// permutation colligation on a 1-dimensional Hilbert state with a dead
/// first boundary input (ker F is nontrivial).
pub fn mul_nontrivial_pair() -> Result<BoundaryPair> {
    let state = PontryaginSpace::hilbert(1);
    let t = zeros(1, 1);
    let f = CMatrix::from_row_slice(1, 2, &[cr(0.0), cr(1.0)]);
    let g = CMatrix::from_row_slice(2, 1, &[cr(1.0), cr(0.0)]);
    let h = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(0.0), cr(1.0), cr(0.0)]);
    let col = UnitaryColligation::new(state, t, f, g, h)?;
    BoundaryPair::from_colligation(col)
}

/// Boundary pair realizing the reciprocal function 1/lambda (negative
/// index one), produced by the shifted realization pipeline.
pub fn reciprocal_pair() -> Result<(BoundaryPair, usize)> {
    let coeffs: Vec<CMatrix> = (0..9)
        .map(|k| CMatrix::from_row_slice(1, 1, &[cr(2.0 * (-2.0f64).powi(k))]))
        .collect();
    let data = RationalFunctionData::new(coeffs, cr(0.5))?;
    realize(&data, cr(0.5))
}

/// Direct sum of two reciprocal-function pairs: Weyl function
/// diag(1/lambda, 1/lambda) with negative index two and 2-dim boundaries.
pub fn double_reciprocal_pair() -> Result<(BoundaryPair, usize)> {
    let (a, ka) = reciprocal_pair()?;
    let (b, kb) = reciprocal_pair()?;
    Ok((a.direct_sum(&b)?, ka + kb))
}

/// Generic interior sample points on the standard annulus, seeded.
pub fn annulus_points(seed: u64, count: usize) -> Vec<C64> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = 0.15 + 0.7 * rng.gen::<f64>();
            let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            c(r * phi.cos(), r * phi.sin())
        })
        .collect()
}

/// Interior/exterior mixed fan used for defect-span sampling.
pub fn mixed_points(seed: u64, count: usize) -> Vec<C64> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let r = if i % 2 == 0 {
                0.15 + 0.7 * rng.gen::<f64>()
            } else {
                1.2 + 1.8 * rng.gen::<f64>()
            };
            let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            c(r * phi.cos(), r * phi.sin())
        })
        .collect()
}

/// Orthonormalized graph of an explicit matrix in L1 x L2 coordinates.
pub fn graph_of_matrix(m: &CMatrix) -> CMatrix {
    orth(&vcat(&[&crate::linalg::identity(m.ncols()), m]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn antidiag4_pair_is_unitary_and_matches_closed_form() {
        let bp = antidiag4_pair().unwrap();
        assert!(bp.green_identity_residual() < 1e-12);
        assert_eq!(bp.parts().v.dim(), 1);
        assert_eq!(bp.gamma().dim(), 7);
        for lam in [cr(0.5), c(0.3, 0.2), c(-0.41, 0.11)] {
            let th = bp.theta(lam).unwrap();
            assert!(
                max_abs(&(&th - &antidiag4_theta(lam))) < 1e-10,
                "theta mismatch at {lam}"
            );
        }
    }

    #[test]
    fn antidiag4_theta_value_at_half() {
        // closed form evaluated at 1/2 against hand-computed entries
        let th = antidiag4_theta(cr(0.5));
        let expect = CMatrix::from_row_slice(
            3,
            3,
            &[
                cr(1.0 / 3.0),
                cr(1.0 / 3.0),
                cr(1.0 / 6.0),
                cr(4.0 / 3.0),
                cr(1.0 / 3.0),
                cr(-1.0 / 3.0),
                cr(8.0 / 3.0),
                cr(-4.0 / 3.0),
                cr(1.0 / 3.0),
            ],
        );
        assert!(max_abs(&(th - expect)) < 1e-12);
    }

    #[test]
    fn antidiag4_kernel_is_singular_with_trivial_joint_kernel() {
        let bp = antidiag4_pair().unwrap();
        let evaluator = |z: C64| bp.theta(z);
        let (lam, om) = (cr(0.5), cr(1.0 / 3.0));
        let s = crate::kernels::schur_kernel(&evaluator, lam, om).unwrap();
        assert!(max_abs(&(&s - &antidiag4_kernel(lam, om))) < 1e-10);
        // determinant vanishes identically, but two distinct omegas have
        // trivial joint kernel
        assert!(s.determinant().norm() < 1e-9);
        let om2 = c(0.21, -0.4);
        let s2 = crate::kernels::schur_kernel(&evaluator, lam, om2).unwrap();
        let stacked = vcat(&[&s, &s2]);
        assert_eq!(crate::linalg::rank(&stacked), 3);
    }

    #[test]
    fn antidiag4_is_ordinary_with_simple_isometry() {
        let bp = antidiag4_pair().unwrap();
        assert_eq!(classify_pair(&bp).class, PairClass::Ordinary);
        let samples = mixed_points(3, 8);
        assert!(bp.parts().v.is_simple(&samples).unwrap());
        // defect subspaces are uniformly 3-dimensional
        let d = bp.parts().v.defect_subspace(c(0.37, 0.21)).unwrap();
        assert_eq!(d.dim(), 3);
    }

    #[test]
    fn mul_nontrivial_pair_is_general() {
        let bp = mul_nontrivial_pair().unwrap();
        let cls = classify_pair(&bp);
        assert_eq!(cls.class, PairClass::General);
        assert_eq!(cls.mul_gamma_dim, 1);
        // the boundary relation itself is unitary with a nontrivial
        // multivalued part, and its identities hold with nontrivial
        // isotropic pieces
        let gamma = bp.gamma();
        assert!(gamma.classify().unitary);
        assert!(gamma.parts().mul.dim() > 0);
        let rep = gamma.check_unitary_identities().unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn reciprocal_fixtures_have_expected_index() {
        let (bp, kappa) = reciprocal_pair().unwrap();
        assert_eq!(kappa, 1);
        let th = bp.theta(cr(0.3)).unwrap();
        assert!((th[(0, 0)] - cr(10.0 / 3.0)).norm() < 1e-9);
        let (bp2, kappa2) = double_reciprocal_pair().unwrap();
        assert_eq!(kappa2, 2);
        let th2 = bp2.theta(c(0.0, 0.4)).unwrap();
        assert!((th2[(0, 0)] - c(0.0, -2.5)).norm() < 1e-9);
        assert!((th2[(1, 1)] - c(0.0, -2.5)).norm() < 1e-9);
        assert!(th2[(0, 1)].norm() < 1e-9);
    }
}
