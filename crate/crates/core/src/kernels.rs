//! Schur-type kernels, negative-squares estimation and boundary-pair
//! classification.
//!
//! The kernel comes in four branches depending on whether each argument
//! lies inside or outside the unit disc; on every branch it factors through
//! the gamma-fields of a boundary pair, which is what
//! `kernel_gamma_identities_residual` checks. Negative squares of the
//! classical kernel (I - Theta(lambda) Theta(omega)*)/(1 - lambda
//! conj(omega)) are estimated by sampling Gram matrices and counting
//! negative eigenvalues until the count stabilizes under refinement.

use crate::boundary::BoundaryPair;
use crate::error::{Error, Result};
use crate::linalg::{
    self, c, identity, max_abs, smallest_singular_value, try_inverse_capped, CMatrix, CVector, C64,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Which side of the unit circle a point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Interior,
    Exterior,
}

pub fn region_of(z: C64) -> Result<Region> {
    let r = z.norm();
    if (r - 1.0).abs() < 1e-12 {
        Err(Error::UnimodularPoint(z))
    } else if r < 1.0 {
        Ok(Region::Interior)
    } else {
        Ok(Region::Exterior)
    }
}

/// Evaluator for an operator-valued function on the unit disc.
pub type ThetaFn<'a> = dyn Fn(C64) -> Result<CMatrix> + 'a;

/// Reflected function Theta(1/conj(lambda))^* for |lambda| > 1.
fn theta_sharp_of(theta: &ThetaFn, lambda: C64) -> Result<CMatrix> {
    Ok(theta(lambda.conj().inv())?.adjoint())
}

/// Four-branch kernel S_omega(lambda) built from an interior evaluator:
///
/// * both interior:  (I - Theta(omega)* Theta(lambda)) / (1 - lambda conj(omega))
/// * both exterior:  (I - Theta#(omega)* Theta#(lambda)) / (1 - lambda conj(omega))
/// * lambda in, omega out:  (Theta(lambda) - Theta#(omega)*) / (1 - lambda conj(omega))
/// * lambda out, omega in:  (Theta#(lambda) - Theta(omega)*) / (1 - lambda conj(omega))
pub fn schur_kernel(theta: &ThetaFn, lambda: C64, omega: C64) -> Result<CMatrix> {
    let denom = cden(lambda, omega)?;
    let rl = region_of(lambda)?;
    let ro = region_of(omega)?;
    let m = match (rl, ro) {
        (Region::Interior, Region::Interior) => {
            let tl = theta(lambda)?;
            let to = theta(omega)?;
            identity(tl.ncols()) - to.adjoint() * &tl
        }
        (Region::Exterior, Region::Exterior) => {
            let tl = theta_sharp_of(theta, lambda)?;
            let to = theta_sharp_of(theta, omega)?;
            identity(tl.ncols()) - to.adjoint() * &tl
        }
        (Region::Interior, Region::Exterior) => {
            let tl = theta(lambda)?;
            let to = theta_sharp_of(theta, omega)?;
            &tl - to.adjoint()
        }
        (Region::Exterior, Region::Interior) => {
            let tl = theta_sharp_of(theta, lambda)?;
            let to = theta(omega)?;
            &tl - to.adjoint()
        }
    };
    Ok(m * denom.inv())
}

/// Classical negative-squares kernel (I - Theta(lambda) Theta(omega)*) /
/// (1 - lambda conj(omega)) for interior points.
pub fn classical_kernel(theta: &ThetaFn, lambda: C64, omega: C64) -> Result<CMatrix> {
    let denom = cden(lambda, omega)?;
    let tl = theta(lambda)?;
    let to = theta(omega)?;
    Ok((identity(tl.nrows()) - tl * to.adjoint()) * denom.inv())
}

fn cden(lambda: C64, omega: C64) -> Result<C64> {
    let d = c(1.0, 0.0) - lambda * omega.conj();
    if d.norm() < 1e-12 {
        return Err(Error::UnimodularProduct(lambda, omega));
    }
    Ok(d)
}

/// Sampled kernel Gram matrix together with its point set.
#[derive(Debug, Clone)]
pub struct KernelSample {
    pub points: Vec<C64>,
    pub gram: CMatrix,
    pub negative: usize,
}

impl KernelSample {
    /// Gram matrix of the classical kernel over points x coordinate
    /// vectors. The row point enters the unconjugated slot: block (i, j)
    /// is (I - Theta(w_i) Theta(w_j)*)/(1 - w_i conj(w_j)), which factors
    /// through the state space as a metric Gram and therefore carries at
    /// most kappa negative eigenvalues. Function values are evaluated once
    /// per point.
    pub fn build(theta: &ThetaFn, points: &[C64], out_dim: usize, band: f64) -> Result<Self> {
        let values: Vec<CMatrix> = points
            .iter()
            .map(|&z| theta(z))
            .collect::<Result<Vec<_>>>()?;
        let m = points.len() * out_dim;
        let mut gram = linalg::zeros(m, m);
        for (pi, &wi) in points.iter().enumerate() {
            for (pj, &wj) in points.iter().enumerate() {
                let denom = cden(wi, wj)?;
                let k = (identity(out_dim) - &values[pi] * values[pj].adjoint()) * denom.inv();
                for a in 0..out_dim {
                    for b in 0..out_dim {
                        gram[(pi * out_dim + a, pj * out_dim + b)] = k[(a, b)];
                    }
                }
            }
        }
        let gram = (&gram + gram.adjoint()).scale(0.5);
        let (neg, _, _) = linalg::inertia(&gram, band);
        Ok(KernelSample {
            points: points.to_vec(),
            gram,
            negative: neg,
        })
    }
}

/// Sampling policy for negative-squares estimation.
#[derive(Debug, Clone)]
pub struct SamplerConfig {
    pub seed: u64,
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// Starting number of points; grows by doubling.
    pub initial_points: usize,
    /// Refinement cap.
    pub max_points: usize,
    /// Relative negative-eigenvalue band.
    pub band: f64,
    /// Expected count; only used to size the initial sample.
    pub expected: Option<usize>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 1,
            inner_radius: 0.15,
            outer_radius: 0.85,
            initial_points: 8,
            max_points: 64,
            band: 1e-9,
            expected: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NegativeSquares {
    pub count: usize,
    pub stabilized: bool,
    pub points_used: usize,
}

/// Draws annulus points (rejecting evaluation failures), doubles the sample
/// until two consecutive rounds agree on the negative count.
pub fn negative_squares(
    theta: &ThetaFn,
    out_dim: usize,
    cfg: &SamplerConfig,
) -> Result<NegativeSquares> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let start = cfg
        .initial_points
        .max(cfg.expected.map_or(0, |k| 2 * k + 2));
    let mut points: Vec<C64> = Vec::new();
    let draw = |points: &mut Vec<C64>, target: usize, rng: &mut ChaCha8Rng| {
        let mut attempts = 0;
        while points.len() < target && attempts < 200 * target {
            attempts += 1;
            let r = cfg.inner_radius + (cfg.outer_radius - cfg.inner_radius) * rng.gen::<f64>();
            let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            let z = c(r * phi.cos(), r * phi.sin());
            if theta(z).is_ok() {
                points.push(z);
            }
        }
    };
    let mut counts: Vec<usize> = Vec::new();
    let mut target = start;
    loop {
        draw(&mut points, target, &mut rng);
        if points.is_empty() {
            return Err(Error::InsufficientSamples(
                "no admissible sample points for the kernel".into(),
            ));
        }
        let sample = KernelSample::build(theta, &points, out_dim, cfg.band)?;
        counts.push(sample.negative);
        let n = counts.len();
        if n >= 2 && counts[n - 1] == counts[n - 2] {
            return Ok(NegativeSquares {
                count: counts[n - 1],
                stabilized: true,
                points_used: points.len(),
            });
        }
        if target >= cfg.max_points {
            return Ok(NegativeSquares {
                count: *counts.last().unwrap(),
                stabilized: false,
                points_used: points.len(),
            });
        }
        target = (target * 2).min(cfg.max_points);
    }
}

/// Analytic-versus-quadrature check of the Gram matrix of the functions
/// u_j / (1 - lambda_j z) on the unit circle.
#[derive(Debug, Clone)]
pub struct GramLemmaReport {
    pub analytic: CMatrix,
    pub quadrature: CMatrix,
    pub max_abs_diff: f64,
    /// True when the points lie outside the disc and the analytic matrix
    /// enters with reversed sign.
    pub sign_flipped: bool,
}

pub fn gram_matrix_lemma_check(points: &[C64], vectors: &[CVector]) -> Result<GramLemmaReport> {
    if points.len() != vectors.len() || points.is_empty() {
        return Err(Error::Dimension("need one vector per sample point".into()));
    }
    let regions: Vec<Region> = points
        .iter()
        .map(|&z| region_of(z))
        .collect::<Result<_>>()?;
    let all_in = regions.iter().all(|&r| r == Region::Interior);
    let all_out = regions.iter().all(|&r| r == Region::Exterior);
    if !all_in && !all_out {
        return Err(Error::MixedRegion(
            "gram lemma needs all points on one side of the circle".into(),
        ));
    }
    let n = points.len();
    let analytic = CMatrix::from_fn(n, n, |j, k| {
        let dot = (vectors[k].adjoint() * &vectors[j])[(0, 0)];
        dot / (c(1.0, 0.0) - points[j] * points[k].conj())
    });
    // trapezoid rule on the circle is spectrally accurate for these
    // rational integrands
    let nodes = 4096;
    let mut quadrature = linalg::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let mut acc = c(0.0, 0.0);
            for t in 0..nodes {
                let ang = 2.0 * std::f64::consts::PI * (t as f64) / (nodes as f64);
                let z = c(ang.cos(), ang.sin());
                let fj = (c(1.0, 0.0) - points[j] * z).inv();
                let fk = (c(1.0, 0.0) - points[k] * z).inv();
                acc += fj * fk.conj();
            }
            let dot = (vectors[k].adjoint() * &vectors[j])[(0, 0)];
            quadrature[(j, k)] = acc * dot / c(nodes as f64, 0.0);
        }
    }
    let sign = if all_out { -1.0 } else { 1.0 };
    let diff = max_abs(&(&quadrature - &analytic * c(sign, 0.0)));
    Ok(GramLemmaReport {
        analytic,
        quadrature,
        max_abs_diff: diff,
        sign_flipped: all_out,
    })
}

/// Residual of the kernel/gamma-field identity matching the regions of the
/// two points: the kernel branch equals a metric product of gamma-fields.
pub fn kernel_gamma_identities_residual(bp: &BoundaryPair, lambda: C64, mu: C64) -> Result<f64> {
    let j = bp.space().j();
    let denom = cden(lambda, mu)?;
    let (kernel, product) = match (region_of(lambda)?, region_of(mu)?) {
        (Region::Interior, Region::Interior) => {
            let tl = bp.theta(lambda)?;
            let tm = bp.theta(mu)?;
            let gl = bp.gamma1(lambda)?;
            let gm = bp.gamma1(mu)?;
            (
                (identity(tl.ncols()) - tm.adjoint() * &tl) * denom.inv(),
                gm.adjoint() * j * &gl,
            )
        }
        (Region::Exterior, Region::Exterior) => {
            let tl = bp.theta_sharp(lambda)?;
            let tm = bp.theta_sharp(mu)?;
            let gl = bp.gamma2(lambda)?;
            let gm = bp.gamma2(mu)?;
            (
                (identity(tl.ncols()) - tm.adjoint() * &tl) * denom.inv(),
                -(gm.adjoint() * j * &gl),
            )
        }
        (Region::Interior, Region::Exterior) => {
            let tl = bp.theta(lambda)?;
            let tm = bp.theta_sharp(mu)?;
            let gl = bp.gamma1(lambda)?;
            let gm = bp.gamma2(mu)?;
            (
                (&tl - tm.adjoint()) * denom.inv(),
                -(gm.adjoint() * j * &gl),
            )
        }
        (Region::Exterior, Region::Interior) => {
            let tl = bp.theta_sharp(lambda)?;
            let tm = bp.theta(mu)?;
            let gl = bp.gamma2(lambda)?;
            let gm = bp.gamma1(mu)?;
            ((&tl - tm.adjoint()) * denom.inv(), gm.adjoint() * j * &gl)
        }
    };
    Ok(max_abs(&(kernel - product)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    /// mul Gamma nontrivial: the Weyl family may be multivalued.
    General,
    /// Gamma single-valued but not surjective onto the boundary space.
    SingleValued,
    /// Single-valued with full boundary range: an ordinary boundary triple.
    Ordinary,
}

#[derive(Debug, Clone)]
pub struct PairClassification {
    pub class: PairClass,
    pub mul_gamma_dim: usize,
    pub ran_gamma_dim: usize,
    /// Dimension of the multivalued part of the isometry itself; nonzero
    /// values are reported rather than rejected, since most statements
    /// assume an operator.
    pub mul_v_dim: usize,
    /// Invertibility of the diagonal kernel S_lambda(lambda) at the probe,
    /// a sufficient condition for ordinarity.
    pub diagonal_kernel_invertible: Option<bool>,
    pub probe: Option<C64>,
}

/// Classifies a pair as general / single-valued / ordinary from the parts
/// of its boundary relation, with a kernel-based sufficient check at a
/// probe point.
pub fn classify_pair(bp: &BoundaryPair) -> PairClassification {
    let parts = bp.gamma().parts();
    let mul_dim = parts.mul.dim();
    let ran_dim = parts.ran.dim();
    let mul_v_dim = bp.parts().v.parts().mul.dim();
    let full_boundary = bp.l1() + bp.l2();
    let class = if mul_dim > 0 {
        PairClass::General
    } else if ran_dim == full_boundary {
        PairClass::Ordinary
    } else {
        PairClass::SingleValued
    };
    // probe the diagonal kernel on a fixed fan of candidate points
    let mut diag = None;
    let mut probe = None;
    for &cand in &[
        c(0.3, 0.1),
        c(-0.25, 0.2),
        c(0.15, -0.4),
        c(0.5, 0.3),
        c(-0.4, -0.3),
    ] {
        if let Ok(th) = bp.theta(cand) {
            let evaluator = move |_z: C64| Ok(th.clone());
            if let Ok(s) = schur_kernel(&evaluator, cand, cand) {
                let scale = max_abs(&s).max(1.0);
                diag = Some(
                    s.nrows() == s.ncols()
                        && smallest_singular_value(&s) > 1e-10 * scale
                        && try_inverse_capped(&s).is_some(),
                );
                probe = Some(cand);
                break;
            }
        }
    }
    PairClassification {
        class,
        mul_gamma_dim: mul_dim,
        ran_gamma_dim: ran_dim,
        mul_v_dim,
        diagonal_kernel_invertible: diag,
        probe,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colligation::UnitaryColligation;
    use crate::linalg::cr;
    use crate::pspace::PontryaginSpace;

    fn ident_theta(z: C64) -> Result<CMatrix> {
        Ok(CMatrix::from_row_slice(1, 1, &[z]))
    }

    fn inv_theta(z: C64) -> Result<CMatrix> {
        if z.norm() < 1e-9 {
            return Err(Error::SingularResolvent(z));
        }
        Ok(CMatrix::from_row_slice(1, 1, &[z.inv()]))
    }

    #[test]
    fn kernel_of_identity_function_is_one() {
        for (l, w) in [(c(0.3, 0.1), c(0.2, -0.4)), (c(-0.5, 0.2), c(0.1, 0.1))] {
            let k = schur_kernel(&ident_theta, l, w).unwrap();
            assert!((k[(0, 0)] - cr(1.0)).norm() < 1e-12);
            let kc = classical_kernel(&ident_theta, l, w).unwrap();
            assert!((kc[(0, 0)] - cr(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn kernel_of_reciprocal_function() {
        let (l, w) = (c(0.4, 0.1), c(0.3, -0.2));
        let k = classical_kernel(&inv_theta, l, w).unwrap();
        let expect = -(l * w.conj()).inv();
        assert!((k[(0, 0)] - expect).norm() < 1e-12);
        assert!(matches!(
            schur_kernel(&ident_theta, c(0.5, 0.0), c(2.0, 0.0)),
            Err(Error::UnimodularProduct(_, _))
        ));
    }

    #[test]
    fn negative_squares_of_reference_functions() {
        let cfg = SamplerConfig::default();
        let ns = negative_squares(&ident_theta, 1, &cfg).unwrap();
        assert_eq!((ns.count, ns.stabilized), (0, true));
        let ns = negative_squares(&inv_theta, 1, &cfg).unwrap();
        assert_eq!((ns.count, ns.stabilized), (1, true));
    }

    #[test]
    fn gram_lemma_matches_quadrature() {
        let e = CVector::from_vec(vec![cr(1.0)]);
        let rep = gram_matrix_lemma_check(&[c(0.0, 0.0)], std::slice::from_ref(&e)).unwrap();
        assert!((rep.analytic[(0, 0)] - cr(1.0)).norm() < 1e-12);
        assert!(rep.max_abs_diff < 1e-10);

        // exterior point: quadrature Gram is the sign-flipped analytic one
        let lam = c(1.6, 0.3);
        let rep = gram_matrix_lemma_check(&[lam], std::slice::from_ref(&e)).unwrap();
        assert!(rep.sign_flipped);
        assert!(rep.max_abs_diff < 1e-10);
        let expect = (cr(1.0) - lam * lam.conj()).inv();
        assert!((rep.analytic[(0, 0)] - expect).norm() < 1e-12);

        let pts = [c(0.2, 0.1), c(-0.3, 0.25), c(0.45, -0.2)];
        let vecs = vec![e.clone(), e.clone(), e.clone()];
        let rep = gram_matrix_lemma_check(&pts, &vecs).unwrap();
        assert!(rep.max_abs_diff < 1e-8);

        assert!(matches!(
            gram_matrix_lemma_check(&[c(0.5, 0.0), c(2.0, 0.0)], &[e.clone(), e]),
            Err(Error::MixedRegion(_))
        ));
    }

    #[test]
    fn classify_flip_pair_as_ordinary() {
        let col = UnitaryColligation::new(
            PontryaginSpace::hilbert(1),
            linalg::zeros(1, 1),
            identity(1),
            identity(1),
            linalg::zeros(1, 1),
        )
        .unwrap();
        let bp = crate::boundary::BoundaryPair::from_colligation(col).unwrap();
        let cls = classify_pair(&bp);
        assert_eq!(cls.class, PairClass::Ordinary);
        assert_eq!(cls.mul_gamma_dim, 0);
        assert_eq!(cls.mul_v_dim, 0);
    }

    #[test]
    fn rectangular_function_kernels() {
        // column-valued function into C^2: all four branches produce the
        // expected shapes and a stabilized count
        let s = 0.5f64.sqrt();
        let theta = move |z: C64| -> Result<CMatrix> {
            Ok(CMatrix::from_row_slice(2, 1, &[z * s, z * z * s]))
        };
        let (li, le) = (c(0.3, 0.1), c(1.6, -0.4));
        assert_eq!(schur_kernel(&theta, li, li).unwrap().shape(), (1, 1));
        assert_eq!(schur_kernel(&theta, le, le).unwrap().shape(), (2, 2));
        assert_eq!(schur_kernel(&theta, li, le).unwrap().shape(), (2, 1));
        assert_eq!(schur_kernel(&theta, le, li).unwrap().shape(), (1, 2));
        assert_eq!(classical_kernel(&theta, li, li).unwrap().shape(), (2, 2));
        let ns = negative_squares(&theta, 2, &SamplerConfig::default()).unwrap();
        assert_eq!((ns.count, ns.stabilized), (0, true));
    }
}
