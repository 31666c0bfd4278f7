//! Unitary boundary pairs for isometric operators: construction from
//! colligations or directly as relations, the main transform, the kernels
//! V, V1, V2, V*, gamma-fields, Weyl functions, Moebius transforms and
//! transposition.
//!
//! A boundary pair is a unitary relation Gamma from the graph space
//! (H^2, diag(J, -J)) to the boundary space (L1 x L2, diag(I, -I)). Its
//! kernel is the isometry V; the Weyl function maps incoming boundary data
//! of defect elements to outgoing data.

use crate::colligation::UnitaryColligation;
use crate::error::{Error, Result};
use crate::linalg::{cr, hcat, max_abs, null_space, orth, pinv, rank, vcat, zeros, CMatrix, C64};
use crate::pspace::PontryaginSpace;
use crate::relation::LinearRelation;
use std::sync::OnceLock;

/// How the pair was built. Colligation-backed pairs remember their blocks
/// so tests can compare the generic solver against closed forms.
#[derive(Debug, Clone)]
pub enum Backing {
    Direct,
    Colligation(UnitaryColligation),
}

/// The four distinguished relations of a pair.
#[derive(Debug, Clone)]
pub struct BoundaryParts {
    /// ker Gamma: the isometry V.
    pub v: LinearRelation,
    /// ker Gamma_1.
    pub v1: LinearRelation,
    /// ker Gamma_2.
    pub v2: LinearRelation,
    /// dom Gamma.
    pub v_star: LinearRelation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Interior,
    Exterior,
}

/// Weyl data at one point: `theta` is the Weyl function on the interior
/// branch and its reflected adjoint on the exterior branch; `gamma` is the
/// matching gamma-field.
#[derive(Debug, Clone)]
pub struct WeylEvaluation {
    pub lambda: C64,
    pub branch: Branch,
    pub theta: CMatrix,
    pub gamma: CMatrix,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct BoundaryPair {
    space: PontryaginSpace,
    l1: usize,
    l2: usize,
    gamma: LinearRelation,
    backing: Backing,
    parts: OnceLock<BoundaryParts>,
}

impl BoundaryPair {
    /// Wraps a directly specified relation after verifying unitarity
    /// between the two Krein graph spaces.
    pub fn direct(
        space: PontryaginSpace,
        l1: usize,
        l2: usize,
        gamma: LinearRelation,
    ) -> Result<Self> {
        Self::build(space, l1, l2, gamma, Backing::Direct)
    }

    fn build(
        space: PontryaginSpace,
        l1: usize,
        l2: usize,
        gamma: LinearRelation,
        backing: Backing,
    ) -> Result<Self> {
        let n = space.dim();
        if gamma.space_in().dim() != 2 * n || gamma.space_out().dim() != l1 + l2 {
            return Err(Error::Dimension(format!(
                "gamma must map H^2 (dim {}) to L1 x L2 (dim {}), got {} -> {}",
                2 * n,
                l1 + l2,
                gamma.space_in().dim(),
                gamma.space_out().dim()
            )));
        }
        let cls = gamma.classify();
        if !cls.unitary {
            let q = gamma.isometry_form();
            return Err(Error::NotUnitary(format!(
                "boundary relation is {} (worst generator-pair residual {:.3e})",
                if cls.isometric {
                    "isometric but not maximal"
                } else {
                    "not isometric"
                },
                max_abs(&q)
            )));
        }
        Ok(BoundaryPair {
            space,
            l1,
            l2,
            gamma,
            backing,
            parts: OnceLock::new(),
        })
    }

    /// Boundary pair of a unitary colligation, generated by
    /// ((T h + F u1, h), (u1, G h + H u1)) over all h, u1.
    pub fn from_colligation(c: UnitaryColligation) -> Result<Self> {
        if !c.validate().pass {
            return Err(Error::InvalidColligation(
                "colligation fails its identities".into(),
            ));
        }
        let n = c.state().dim();
        let (l1, l2) = (c.l1(), c.l2());
        let mut gens = zeros(2 * n + l1 + l2, n + l1);
        for k in 0..n + l1 {
            let mut h = zeros(n, 1);
            let mut u1 = zeros(l1, 1);
            if k < n {
                h[(k, 0)] = cr(1.0);
            } else {
                u1[(k - n, 0)] = cr(1.0);
            }
            let f = c.t() * &h + c.f() * &u1;
            let u2 = c.g() * &h + c.h() * &u1;
            let col = vcat(&[&f, &h, &u1, &u2]);
            gens.view_mut((0, k), (col.nrows(), 1)).copy_from(&col);
        }
        let space = c.state().clone();
        let graph = PontryaginSpace::graph(&space, &space);
        let boundary = PontryaginSpace::boundary(l1, l2);
        let gamma = LinearRelation::new(graph, boundary, &gens)?;
        Self::build(space, l1, l2, gamma, Backing::Colligation(c))
    }

    /// Rebuilds a pair from a unitary relation between the product spaces
    /// H x L2 and H x L1 by reversing the main transform.
    pub fn from_main_transform(
        space: PontryaginSpace,
        l1: usize,
        l2: usize,
        u: &LinearRelation,
    ) -> Result<Self> {
        let n = space.dim();
        if u.space_in().dim() != n + l2 || u.space_out().dim() != n + l1 {
            return Err(Error::Dimension(format!(
                "main transform must map H x L2 -> H x L1, got {} -> {}",
                u.space_in().dim(),
                u.space_out().dim()
            )));
        }
        let b = u.basis();
        let f = b.rows(0, n).into_owned();
        let u2 = b.rows(n, l2).into_owned();
        let fp = b.rows(n + l2, n).into_owned();
        let u1 = b.rows(2 * n + l2, l1).into_owned();
        let gens = vcat(&[&f, &fp, &u1, &u2]);
        let graph = PontryaginSpace::graph(&space, &space);
        let boundary = PontryaginSpace::boundary(l1, l2);
        let gamma = LinearRelation::new(graph, boundary, &gens)?;
        Self::build(space, l1, l2, gamma, Backing::Direct)
    }

    pub fn space(&self) -> &PontryaginSpace {
        &self.space
    }
    pub fn l1(&self) -> usize {
        self.l1
    }
    pub fn l2(&self) -> usize {
        self.l2
    }
    pub fn gamma(&self) -> &LinearRelation {
        &self.gamma
    }
    pub fn backing(&self) -> &Backing {
        &self.backing
    }
    pub fn kappa(&self) -> usize {
        self.space.kappa()
    }

    /// Row blocks (f, f', u1, u2) of the generator basis.
    pub fn blocks(&self) -> (CMatrix, CMatrix, CMatrix, CMatrix) {
        let n = self.space.dim();
        let b = self.gamma.basis();
        (
            b.rows(0, n).into_owned(),
            b.rows(n, n).into_owned(),
            b.rows(2 * n, self.l1).into_owned(),
            b.rows(2 * n + self.l1, self.l2).into_owned(),
        )
    }

    /// The block reshuffle ((f, f'), (u1, u2)) -> ((f, u2), (f', u1)),
    /// a unitary relation between the Pontryagin product spaces exactly
    /// when the pair itself is unitary.
    pub fn main_transform(&self) -> LinearRelation {
        let (f, fp, u1, u2) = self.blocks();
        let gens = vcat(&[&f, &u2, &fp, &u1]);
        let sp_in = self.space.direct_sum(&PontryaginSpace::hilbert(self.l2));
        let sp_out = self.space.direct_sum(&PontryaginSpace::hilbert(self.l1));
        LinearRelation::new(sp_in, sp_out, &gens).expect("block reshuffle preserves dimensions")
    }

    /// Largest violation of the scattering identity
    /// [f, g] - [f', g'] = (u1, v1) - (u2, v2) over all generator pairs.
    pub fn green_identity_residual(&self) -> f64 {
        max_abs(&self.gamma.isometry_form())
    }

    pub fn parts(&self) -> &BoundaryParts {
        self.parts.get_or_init(|| {
            let (f, fp, u1, u2) = self.blocks();
            let graph_gens = vcat(&[&f, &fp]);
            let rel = |coeff: &CMatrix| {
                LinearRelation::new(
                    self.space.clone(),
                    self.space.clone(),
                    &(&graph_gens * coeff),
                )
                .expect("graph blocks have matching dimensions")
            };
            let boundary = vcat(&[&u1, &u2]);
            let v = rel(&null_space(&boundary));
            let v1 = rel(&null_space(&u1));
            let v2 = rel(&null_space(&u2));
            let v_star = LinearRelation::new(self.space.clone(), self.space.clone(), &graph_gens)
                .expect("graph blocks have matching dimensions");
            BoundaryParts { v, v1, v2, v_star }
        })
    }

    /// lambda in the interior admissible set: |lambda| < 1 and
    /// (V1 - lambda)^{-1} bounded.
    pub fn in_interior_domain(&self, lambda: C64) -> bool {
        lambda.norm() < 1.0 && self.parts().v1.in_resolvent_set(lambda)
    }

    /// lambda in the exterior admissible set: |lambda| > 1 and
    /// (V2 - lambda)^{-1} bounded.
    pub fn in_exterior_domain(&self, lambda: C64) -> bool {
        lambda.norm() > 1.0 && self.parts().v2.in_resolvent_set(lambda)
    }

    /// Weyl data at `lambda`. Inside the disc this returns Theta(lambda)
    /// and gamma_1(lambda); outside, the reflected function and
    /// gamma_2(lambda). Fails when no consistent operator exists.
    pub fn weyl(&self, lambda: C64) -> Result<WeylEvaluation> {
        let branch = if lambda.norm() < 1.0 {
            if !self.in_interior_domain(lambda) {
                return Err(Error::ExcludedPoint {
                    lambda,
                    reason: "inside the disc but not in rho(V1)".into(),
                });
            }
            Branch::Interior
        } else if lambda.norm() > 1.0 {
            if !self.in_exterior_domain(lambda) {
                return Err(Error::ExcludedPoint {
                    lambda,
                    reason: "outside the disc but not in rho(V2)".into(),
                });
            }
            Branch::Exterior
        } else {
            return Err(Error::ExcludedPoint {
                lambda,
                reason: "on the unit circle".into(),
            });
        };

        let (f, fp, u1, u2) = self.blocks();
        let defect_coeff = null_space(&(&fp - &f * lambda));
        let b1 = &u1 * &defect_coeff;
        let b2 = &u2 * &defect_coeff;
        let fv = &f * &defect_coeff;
        let (src, dst, want) = match branch {
            Branch::Interior => (&b1, &b2, self.l1),
            Branch::Exterior => (&b2, &b1, self.l2),
        };
        let scale = max_abs(src).max(max_abs(dst)).max(1.0);
        let pi = pinv(src);
        let theta = dst * &pi;
        let gamma = &fv * &pi;
        let residual = (max_abs(&(&theta * src - dst)).max(max_abs(&(&gamma * src - &fv)))) / scale;
        if rank(src) < want || residual > 1e-8 {
            return Err(Error::MultivaluedWeyl {
                lambda,
                residual,
                generators: vcat(&[&b1, &b2]),
            });
        }
        Ok(WeylEvaluation {
            lambda,
            branch,
            theta,
            gamma,
            residual,
        })
    }

    /// Weyl function Theta(lambda), interior branch.
    pub fn theta(&self, lambda: C64) -> Result<CMatrix> {
        let ev = self.weyl(lambda)?;
        match ev.branch {
            Branch::Interior => Ok(ev.theta),
            Branch::Exterior => Err(Error::ExcludedPoint {
                lambda,
                reason: "interior Weyl function requested outside the disc".into(),
            }),
        }
    }

    /// Reflected Weyl function Theta(1/conj(lambda))^* on the exterior branch.
    pub fn theta_sharp(&self, lambda: C64) -> Result<CMatrix> {
        let ev = self.weyl(lambda)?;
        match ev.branch {
            Branch::Exterior => Ok(ev.theta),
            Branch::Interior => Err(Error::ExcludedPoint {
                lambda,
                reason: "reflected Weyl function requested inside the disc".into(),
            }),
        }
    }

    pub fn gamma1(&self, lambda: C64) -> Result<CMatrix> {
        let ev = self.weyl(lambda)?;
        match ev.branch {
            Branch::Interior => Ok(ev.gamma),
            Branch::Exterior => Err(Error::ExcludedPoint {
                lambda,
                reason: "gamma_1 requested outside the disc".into(),
            }),
        }
    }

    pub fn gamma2(&self, lambda: C64) -> Result<CMatrix> {
        let ev = self.weyl(lambda)?;
        match ev.branch {
            Branch::Exterior => Ok(ev.gamma),
            Branch::Interior => Err(Error::ExcludedPoint {
                lambda,
                reason: "gamma_2 requested inside the disc".into(),
            }),
        }
    }

    /// gamma_2(1/conj(lambda)) with the metric adjoint on the state leg,
    /// defined on the interior branch; zero at the origin.
    pub fn gamma2_sharp(&self, lambda: C64) -> Result<CMatrix> {
        if lambda.norm() == 0.0 {
            return Ok(zeros(self.l2, self.space.dim()));
        }
        let mu = lambda.conj().inv();
        let g2 = self.gamma2(mu)?;
        Ok(g2.adjoint() * self.space.j())
    }

    /// gamma_1(1/conj(lambda)) with the metric adjoint, exterior branch.
    pub fn gamma1_sharp(&self, lambda: C64) -> Result<CMatrix> {
        let mu = lambda.conj().inv();
        let g1 = self.gamma1(mu)?;
        Ok(g1.adjoint() * self.space.j())
    }

    /// Limit of gamma_2_sharp(lambda)/lambda at the origin, recovered from
    /// the generators with vanishing first graph component. For a
    /// colligation-backed pair this is exactly the block G.
    pub fn gamma2_sharp_deriv0(&self) -> Result<CMatrix> {
        let (f, fp, _, u2) = self.blocks();
        let coeff = null_space(&f);
        let imgs = &fp * &coeff;
        let b2 = &u2 * &coeff;
        if rank(&b2) < self.l2 {
            return Err(Error::SingularPencil(
                "limit gamma-field at infinity is not everywhere defined".into(),
            ));
        }
        // solve L b2 = imgs for the limit map u2 -> f'
        let lim = &imgs * pinv(&b2);
        let res = max_abs(&(&lim * &b2 - &imgs));
        if res > 1e-8 * max_abs(&imgs).max(1.0) {
            return Err(Error::SingularPencil(format!(
                "limit gamma-field at infinity is multivalued (residual {res:.3e})"
            )));
        }
        Ok(lim.adjoint() * self.space.j())
    }

    /// Pair with the graph side composed with the hyperbolic rotation of
    /// parameter `alpha`; Weyl functions are related by the disc
    /// automorphism mu(lambda) = (lambda - conj(alpha))/(1 - alpha lambda).
    pub fn mobius(&self, alpha: C64) -> Result<BoundaryPair> {
        if (alpha.norm() - 1.0).abs() < 1e-12 {
            return Err(Error::UnimodularAlpha(alpha));
        }
        if alpha.norm() > 0.0 {
            let inv = alpha.inv();
            if self
                .parts()
                .v
                .point_spectrum()
                .iter()
                .any(|z| (z - inv).norm() < 1e-8)
            {
                return Err(Error::EigenvalueCollision(alpha));
            }
        }
        let beta = cr((1.0 - alpha.norm_sqr()).sqrt());
        let (f, fp, u1, u2) = self.blocks();
        let nf = (&f - &fp * alpha) * beta.inv();
        let nfp = (&fp - &f * alpha.conj()) * beta.inv();
        let gens = vcat(&[&nf, &nfp, &u1, &u2]);
        let graph = PontryaginSpace::graph(&self.space, &self.space);
        let boundary = PontryaginSpace::boundary(self.l1, self.l2);
        let gamma = LinearRelation::new(graph, boundary, &gens)?;
        Self::build(self.space.clone(), self.l1, self.l2, gamma, Backing::Direct)
    }

    /// Transposed pair: graph and boundary components swapped; a boundary
    /// pair for the inverse isometry.
    pub fn transpose(&self) -> BoundaryPair {
        let (f, fp, u1, u2) = self.blocks();
        let gens = vcat(&[&fp, &f, &u2, &u1]);
        let graph = PontryaginSpace::graph(&self.space, &self.space);
        let boundary = PontryaginSpace::boundary(self.l2, self.l1);
        let gamma = LinearRelation::new(graph, boundary, &gens)
            .expect("transposed generators have matching dimensions");
        Self::build(self.space.clone(), self.l2, self.l1, gamma, Backing::Direct)
            .expect("transpose of a unitary pair is unitary")
    }

    /// Block direct sum of two pairs: states, incoming and outgoing
    /// boundary spaces are concatenated.
    pub fn direct_sum(&self, other: &BoundaryPair) -> Result<BoundaryPair> {
        let (fa, fpa, u1a, u2a) = self.blocks();
        let (fb, fpb, u1b, u2b) = other.blocks();
        let (ka, kb) = (fa.ncols(), fb.ncols());
        let pad = |top: &CMatrix, rows: usize, left: bool| -> CMatrix {
            if left {
                hcat(&[top, &zeros(rows, kb)])
            } else {
                hcat(&[&zeros(rows, ka), top])
            }
        };
        let gens = vcat(&[
            &vcat(&[&pad(&fa, fa.nrows(), true), &pad(&fb, fb.nrows(), false)]),
            &vcat(&[
                &pad(&fpa, fpa.nrows(), true),
                &pad(&fpb, fpb.nrows(), false),
            ]),
            &vcat(&[
                &pad(&u1a, u1a.nrows(), true),
                &pad(&u1b, u1b.nrows(), false),
            ]),
            &vcat(&[
                &pad(&u2a, u2a.nrows(), true),
                &pad(&u2b, u2b.nrows(), false),
            ]),
        ]);
        let space = self.space.direct_sum(&other.space);
        let graph = PontryaginSpace::graph(&space, &space);
        let boundary = PontryaginSpace::boundary(self.l1 + other.l1, self.l2 + other.l2);
        let gamma = LinearRelation::new(graph, boundary, &gens)?;
        Self::build(
            space,
            self.l1 + other.l1,
            self.l2 + other.l2,
            gamma,
            Backing::Direct,
        )
    }

    /// Residual of the gamma-field resolvent identity
    /// gamma(lambda) = gamma(mu) + (lambda - mu)(V_j - lambda)^{-1} gamma(mu)
    /// on whichever branch contains both points.
    pub fn gamma_resolvent_identity_residual(&self, lambda: C64, mu: C64) -> Result<f64> {
        if lambda.norm() < 1.0 && mu.norm() < 1.0 {
            let gl = self.gamma1(lambda)?;
            let gm = self.gamma1(mu)?;
            let res = self
                .parts()
                .v1
                .resolvent_matrix(lambda)
                .ok_or(Error::ExcludedPoint {
                    lambda,
                    reason: "not in rho(V1)".into(),
                })?;
            Ok(max_abs(&(&gl - &gm - (res * &gm) * (lambda - mu))))
        } else if lambda.norm() > 1.0 && mu.norm() > 1.0 {
            let gl = self.gamma2(lambda)?;
            let gm = self.gamma2(mu)?;
            let res = self
                .parts()
                .v2
                .resolvent_matrix(lambda)
                .ok_or(Error::ExcludedPoint {
                    lambda,
                    reason: "not in rho(V2)".into(),
                })?;
            Ok(max_abs(&(&gl - &gm - (res * &gm) * (lambda - mu))))
        } else {
            Err(Error::ExcludedPoint {
                lambda,
                reason: "points lie on different sides of the unit circle".into(),
            })
        }
    }
}

/// Orthonormal generator matrix of the graph of an operator-valued
/// boundary relation given by explicit row maps; helper for fixtures.
pub fn relation_from_maps(
    space: &PontryaginSpace,
    l1: usize,
    l2: usize,
    domain: &CMatrix,
    map1: &dyn Fn(&CMatrix) -> CMatrix,
    map2: &dyn Fn(&CMatrix) -> CMatrix,
) -> Result<LinearRelation> {
    let n = space.dim();
    if domain.nrows() != 2 * n {
        return Err(Error::Dimension(format!(
            "domain generators must have {} rows",
            2 * n
        )));
    }
    let dom = orth(domain);
    let mut gens = zeros(2 * n + l1 + l2, dom.ncols());
    for k in 0..dom.ncols() {
        let fh = dom.column(k).into_owned();
        let fh = CMatrix::from_fn(2 * n, 1, |r, _| fh[r]);
        let u1 = map1(&fh);
        let u2 = map2(&fh);
        let col = vcat(&[&fh, &u1, &u2]);
        gens.view_mut((0, k), (col.nrows(), 1)).copy_from(&col);
    }
    let graph = PontryaginSpace::graph(space, space);
    let boundary = PontryaginSpace::boundary(l1, l2);
    LinearRelation::new(graph, boundary, &gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, identity};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn flip_pair() -> BoundaryPair {
        let c = UnitaryColligation::new(
            PontryaginSpace::hilbert(1),
            zeros(1, 1),
            identity(1),
            identity(1),
            zeros(1, 1),
        )
        .unwrap();
        BoundaryPair::from_colligation(c).unwrap()
    }

    #[test]
    fn flip_pair_weyl_is_identity_function() {
        let bp = flip_pair();
        assert!(bp.green_identity_residual() < 1e-12);
        let ev = bp.weyl(cr(0.3)).unwrap();
        assert!((ev.theta[(0, 0)] - cr(0.3)).norm() < 1e-12);
        assert!((ev.gamma[(0, 0)] - cr(1.0)).norm() < 1e-12);
        // V is trivial
        assert_eq!(bp.parts().v.dim(), 0);
        // V1 = {0} x C, V2 = C x {0}
        let p = bp.parts();
        assert_eq!(p.v1.parts().mul.dim(), 1);
        assert_eq!(p.v1.parts().dom.dim(), 0);
        assert_eq!(p.v2.parts().ker.dim(), 1);
        assert_eq!(p.v2.parts().ran.dim(), 0);
    }

    #[test]
    fn flip_pair_gamma2_closed_forms() {
        let bp = flip_pair();
        // gamma_2(mu) = 1/mu, so the reflected field is multiplication by lambda
        let lam = c(0.4, 0.2);
        let g2s = bp.gamma2_sharp(lam).unwrap();
        assert!((g2s[(0, 0)] - lam).norm() < 1e-10);
        assert!(max_abs(&bp.gamma2_sharp(cr(0.0)).unwrap()) == 0.0);
        let d0 = bp.gamma2_sharp_deriv0().unwrap();
        assert!((d0[(0, 0)] - cr(1.0)).norm() < 1e-10);
    }

    #[test]
    fn empty_state_pair_is_purely_multivalued() {
        let th0 = CMatrix::from_row_slice(1, 1, &[c(0.6, 0.8)]);
        let col = UnitaryColligation::empty_state(th0.clone()).unwrap();
        let bp = BoundaryPair::from_colligation(col).unwrap();
        let (f, fp, u1, u2) = bp.blocks();
        assert_eq!(f.nrows(), 0);
        assert_eq!(fp.nrows(), 0);
        // boundary graph is {(u, th0 u)}
        let bg = vcat(&[&u1, &u2]);
        let expect = orth(&vcat(&[&identity(1), &th0]));
        assert!(crate::linalg::span_eq(&orth(&bg), &expect));
    }

    #[test]
    fn main_transform_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let col = UnitaryColligation::random(&mut rng, 4, 1, 2);
        let bp = BoundaryPair::from_colligation(col.clone()).unwrap();
        let mt = bp.main_transform();
        assert!(mt.classify().unitary);
        // the main transform is the graph of the inverse connecting matrix
        let sp_in = col.state().direct_sum(&PontryaginSpace::hilbert(2));
        let u_inv =
            LinearRelation::from_operator(sp_in.clone(), sp_in.clone(), &col.connecting_matrix())
                .unwrap()
                .inverse();
        assert!(mt.span_eq(&u_inv));
        // and reversing the transform recovers the pair
        let back = BoundaryPair::from_main_transform(col.state().clone(), 2, 2, &mt).unwrap();
        assert!(back.gamma().span_eq(bp.gamma()));
    }

    #[test]
    fn dropping_a_generator_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let col = UnitaryColligation::random(&mut rng, 3, 1, 2);
        let bp = BoundaryPair::from_colligation(col).unwrap();
        let basis = bp.gamma().basis().clone();
        let truncated = basis.columns(0, basis.ncols() - 1).into_owned();
        let graph = PontryaginSpace::graph(bp.space(), bp.space());
        let boundary = PontryaginSpace::boundary(2, 2);
        let rel = LinearRelation::new(graph, boundary, &truncated).unwrap();
        assert!(matches!(
            BoundaryPair::direct(bp.space().clone(), 2, 2, rel),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn colligation_closed_forms_match_generic_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let col = UnitaryColligation::random(&mut rng, 4, 2, 2);
        let bp = BoundaryPair::from_colligation(col.clone()).unwrap();
        let n = 4;
        for lam in [c(0.25, 0.1), c(-0.2, -0.35)] {
            if !bp.in_interior_domain(lam) {
                continue;
            }
            let ev = bp.weyl(lam).unwrap();
            let theta = col.characteristic_function(lam).unwrap();
            assert!(max_abs(&(&ev.theta - &theta)) < 1e-9);
            let g1 = crate::linalg::try_inverse_capped(&(identity(n) - col.t() * lam)).unwrap()
                * col.f();
            assert!(max_abs(&(&ev.gamma - &g1)) < 1e-9);
        }
        // exterior branch: gamma_2(mu) = (mu - T^[*])^{-1} G^[*]
        let mu = c(1.9, 0.4);
        if bp.in_exterior_domain(mu) {
            let ev = bp.weyl(mu).unwrap();
            let g2 = crate::linalg::try_inverse_capped(&(identity(n) * mu - col.t_adj())).unwrap()
                * col.g_adj();
            assert!(max_abs(&(&ev.gamma - &g2)) < 1e-9);
            let ths = col
                .characteristic_function(mu.conj().inv())
                .unwrap()
                .adjoint();
            assert!(max_abs(&(&ev.theta - &ths)) < 1e-9);
        }
        // deriv of the reflected gamma-field at 0 equals the block G
        let d0 = bp.gamma2_sharp_deriv0().unwrap();
        assert!(max_abs(&(&d0 - col.g())) < 1e-9);
        // the kernel of the pair is the metric adjoint of T restricted to
        // ker F^[*]
        let kerfs = crate::linalg::null_space(&col.f_adj());
        let expect_v = LinearRelation::new(
            col.state().clone(),
            col.state().clone(),
            &vcat(&[&kerfs, &(col.t_adj() * &kerfs)]),
        )
        .unwrap();
        assert!(bp.parts().v.span_eq(&expect_v));
    }

    #[test]
    fn mobius_identity_at_zero_and_inverse_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let col = UnitaryColligation::random(&mut rng, 3, 1, 2);
        let bp = BoundaryPair::from_colligation(col).unwrap();
        let id = bp.mobius(cr(0.0)).unwrap();
        assert!(id.gamma().span_eq(bp.gamma()));
        let a = c(0.3, -0.2);
        let round = bp.mobius(a).unwrap().mobius(-a).unwrap();
        assert!(round.gamma().span_eq(bp.gamma()));
        assert!(matches!(
            bp.mobius(c(0.6, 0.8)),
            Err(Error::UnimodularAlpha(_))
        ));
    }

    #[test]
    fn transpose_is_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let col = UnitaryColligation::random(&mut rng, 3, 1, 2);
        let bp = BoundaryPair::from_colligation(col).unwrap();
        let tp = bp.transpose();
        // the transposed pair belongs to the inverse isometry
        assert!(tp.parts().v.span_eq(&bp.parts().v.inverse()));
        assert!(tp.parts().v1.span_eq(&bp.parts().v2.inverse()));
        let tt = tp.transpose();
        assert!(tt.gamma().span_eq(bp.gamma()));
    }

    #[test]
    fn resolvent_identity_vanishes_at_equal_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let col = UnitaryColligation::random(&mut rng, 3, 0, 2);
        let bp = BoundaryPair::from_colligation(col).unwrap();
        let lam = c(0.2, 0.1);
        let r = bp.gamma_resolvent_identity_residual(lam, lam).unwrap();
        assert!(r < 1e-12);
    }
}
