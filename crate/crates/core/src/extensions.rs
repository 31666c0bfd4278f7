//! Proper extensions selected by boundary parameters, with resolvent and
//! coresolvent formulas checked against direct pencil inversion.
//!
//! A parameter is a pair (Phi_1, Phi_2) of boundary blocks over an auxiliary
//! space; the extension collects the graph elements whose boundary images
//! lie in the column span of (Phi_1; Phi_2). Its resolvent splits into the
//! resolvent of a distinguished extension plus a rank-limited correction
//! through the gamma-fields.

use crate::boundary::BoundaryPair;
use crate::error::{Error, Result};
use crate::linalg::{
    hcat, identity, max_abs, null_space, rank, smallest_singular_value, try_inverse_capped, vcat,
    CMatrix, C64,
};
use crate::relation::LinearRelation;

/// Boundary parameter (Phi_1, Phi_2) over an auxiliary space of dimension
/// `param_dim`.
#[derive(Debug, Clone)]
pub struct ExtensionParameter {
    phi1: CMatrix,
    phi2: CMatrix,
}

impl ExtensionParameter {
    /// Requires a jointly injective pair: ker(Phi_1* Phi_1 + Phi_2* Phi_2)
    /// must be trivial.
    pub fn new(phi1: CMatrix, phi2: CMatrix) -> Result<Self> {
        if phi1.ncols() != phi2.ncols() {
            return Err(Error::Dimension(format!(
                "parameter blocks must share the auxiliary dimension, got {} and {}",
                phi1.ncols(),
                phi2.ncols()
            )));
        }
        let joint = phi1.adjoint() * &phi1 + phi2.adjoint() * &phi2;
        if phi1.ncols() > 0 {
            let scale = max_abs(&joint).max(1.0);
            if smallest_singular_value(&joint) <= 1e-12 * scale {
                return Err(Error::DegenerateParameter(
                    "ker(Phi1* Phi1 + Phi2* Phi2) is nontrivial".into(),
                ));
            }
        }
        Ok(ExtensionParameter { phi1, phi2 })
    }

    /// Phi_1 = Phi_2 = I on an l-dimensional boundary component.
    pub fn identity(l: usize) -> Self {
        ExtensionParameter {
            phi1: identity(l),
            phi2: identity(l),
        }
    }

    /// Graph of an operator from L1 to L2: Phi_1 = I, Phi_2 = op.
    pub fn graph_of(op: &CMatrix) -> Self {
        ExtensionParameter {
            phi1: identity(op.ncols()),
            phi2: op.clone(),
        }
    }

    pub fn phi1(&self) -> &CMatrix {
        &self.phi1
    }
    pub fn phi2(&self) -> &CMatrix {
        &self.phi2
    }
    pub fn param_dim(&self) -> usize {
        self.phi1.ncols()
    }

    /// The parameter as a relation in L1 x L2.
    pub fn as_relation(&self, l1: usize, l2: usize) -> Result<LinearRelation> {
        if self.phi1.nrows() != l1 || self.phi2.nrows() != l2 {
            return Err(Error::Dimension(
                "parameter blocks do not match the boundary dimensions".into(),
            ));
        }
        LinearRelation::new(
            crate::pspace::PontryaginSpace::hilbert(l1),
            crate::pspace::PontryaginSpace::hilbert(l2),
            &vcat(&[&self.phi1, &self.phi2]),
        )
    }
}

/// The extension determined by the parameter: all graph elements whose
/// boundary image equals (Phi_1 h, Phi_2 h) for some h. Assembled once as
/// a null space of the joint constraint system.
pub fn build_extension(bp: &BoundaryPair, phi: &ExtensionParameter) -> Result<LinearRelation> {
    if phi.phi1.nrows() != bp.l1() || phi.phi2.nrows() != bp.l2() {
        return Err(Error::Dimension(format!(
            "parameter blocks are {}x{} and {}x{}, boundary needs {} and {} rows",
            phi.phi1.nrows(),
            phi.phi1.ncols(),
            phi.phi2.nrows(),
            phi.phi2.ncols(),
            bp.l1(),
            bp.l2()
        )));
    }
    let (f, fp, u1, u2) = bp.blocks();
    let system = vcat(&[
        &hcat(&[&u1, &-phi.phi1.clone()]),
        &hcat(&[&u2, &-phi.phi2.clone()]),
    ]);
    let ns = null_space(&system);
    let k = f.ncols();
    let coeff = ns.rows(0, k).into_owned();
    let gens = vcat(&[&(&f * &coeff), &(&fp * &coeff)]);
    LinearRelation::new(bp.space().clone(), bp.space().clone(), &gens)
}

/// Outcome of direct pencil inversion on a relation.
#[derive(Debug, Clone)]
pub enum DirectInversion {
    Matrix(CMatrix),
    NotInvertible,
}

impl DirectInversion {
    pub fn matrix(&self) -> Option<&CMatrix> {
        match self {
            DirectInversion::Matrix(m) => Some(m),
            DirectInversion::NotInvertible => None,
        }
    }
}

/// `(V - lambda)^{-1}` solved columnwise from the generators.
pub fn direct_resolvent_oracle(v: &LinearRelation, lambda: C64) -> DirectInversion {
    match v.resolvent_matrix(lambda) {
        Some(m) => DirectInversion::Matrix(m),
        None => DirectInversion::NotInvertible,
    }
}

/// `(I - z V)^{-1}` solved columnwise from the generators.
pub fn direct_coresolvent_oracle(v: &LinearRelation, z: C64) -> DirectInversion {
    match v.coresolvent_matrix(z) {
        Some(m) => DirectInversion::Matrix(m),
        None => DirectInversion::NotInvertible,
    }
}

/// Resolvent of the extension at an interior or exterior point, via the
/// gamma-field correction formula. The origin uses the limit object of the
/// reflected gamma-field instead of a 1/lambda scaling.
pub fn resolvent(bp: &BoundaryPair, phi: &ExtensionParameter, lambda: C64) -> Result<CMatrix> {
    if bp.in_interior_domain(lambda) {
        let base = bp
            .parts()
            .v1
            .resolvent_matrix(lambda)
            .expect("interior domain implies invertible pencil");
        let theta = bp.theta(lambda)?;
        let g1 = bp.gamma1(lambda)?;
        let mid = invert_pencil(&(&phi.phi2 - &theta * &phi.phi1))?;
        if lambda.norm() == 0.0 {
            let deriv = bp.gamma2_sharp_deriv0()?;
            Ok(base + g1 * &phi.phi1 * mid * deriv)
        } else {
            let g2s = bp.gamma2_sharp(lambda)?;
            Ok(base + (g1 * &phi.phi1 * mid * g2s) * lambda.inv())
        }
    } else if bp.in_exterior_domain(lambda) {
        let base = bp
            .parts()
            .v2
            .resolvent_matrix(lambda)
            .expect("exterior domain implies invertible pencil");
        let theta_s = bp.theta_sharp(lambda)?;
        let g2 = bp.gamma2(lambda)?;
        let g1s = bp.gamma1_sharp(lambda)?;
        let mid = invert_pencil(&(&phi.phi1 - &theta_s * &phi.phi2))?;
        Ok(base - (g2 * &phi.phi2 * mid * g1s) * lambda.inv())
    } else {
        Err(Error::ExcludedPoint {
            lambda,
            reason: "resolvent formula needs an admissible point".into(),
        })
    }
}

/// Coresolvent (I - z V_Phi)^{-1}; `z = 0` gives the identity.
pub fn coresolvent(bp: &BoundaryPair, phi: &ExtensionParameter, z: C64) -> Result<CMatrix> {
    let n = bp.space().dim();
    if z.norm() == 0.0 {
        return Ok(identity(n));
    }
    let j = bp.space().j();
    if z.norm() < 1.0 {
        // needs conj(z) interior-admissible and 1/z exterior-admissible
        let base = bp
            .parts()
            .v2
            .coresolvent_matrix(z)
            .ok_or(Error::ExcludedPoint {
                lambda: z,
                reason: "I - z V2 is not invertible".into(),
            })?;
        let g2 = bp.gamma2(z.inv())?;
        let theta_conj = bp.theta(z.conj())?;
        let g1 = bp.gamma1(z.conj())?;
        let mid = invert_pencil(&(&phi.phi1 - theta_conj.adjoint() * &phi.phi2))?;
        Ok(base + g2 * &phi.phi2 * mid * (g1.adjoint() * j))
    } else {
        let base = bp
            .parts()
            .v1
            .coresolvent_matrix(z)
            .ok_or(Error::ExcludedPoint {
                lambda: z,
                reason: "I - z V1 is not invertible".into(),
            })?;
        let g1 = bp.gamma1(z.inv())?;
        let theta_inv = bp.theta(z.inv())?;
        let g2 = bp.gamma2(z.conj())?;
        let mid = invert_pencil(&(&phi.phi2 - &theta_inv * &phi.phi1))?;
        Ok(base - g1 * &phi.phi1 * mid * (g2.adjoint() * j))
    }
}

fn invert_pencil(m: &CMatrix) -> Result<CMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::SingularPencil(format!(
            "pencil is {}x{}, bounded inversion needs a square block",
            m.nrows(),
            m.ncols()
        )));
    }
    try_inverse_capped(m).ok_or_else(|| {
        Error::SingularPencil(format!(
            "pencil condition exceeds the cap (smallest singular value {:.3e})",
            smallest_singular_value(m)
        ))
    })
}

/// Point check: a nontrivial pencil kernel flags a candidate eigenvalue of
/// the extension; bounded invertibility certifies a resolvent point. For
/// ordinary boundary triples the two flags are exact complements.
#[derive(Debug, Clone, Copy)]
pub struct SpectralPointReport {
    pub implies_eigenvalue: bool,
    pub pencil_invertible: bool,
}

pub fn spectral_point_check(
    bp: &BoundaryPair,
    phi: &ExtensionParameter,
    lambda: C64,
) -> Result<SpectralPointReport> {
    let pencil = if bp.in_interior_domain(lambda) {
        let theta = bp.theta(lambda)?;
        &phi.phi2 - &theta * &phi.phi1
    } else if bp.in_exterior_domain(lambda) {
        let theta_s = bp.theta_sharp(lambda)?;
        &phi.phi1 - &theta_s * &phi.phi2
    } else {
        return Err(Error::ExcludedPoint {
            lambda,
            reason: "spectral check needs an admissible point".into(),
        });
    };
    let scale = max_abs(&pencil).max(1.0);
    let kernel_nontrivial = pencil.ncols() > 0
        && (rank(&pencil) < pencil.ncols() || smallest_singular_value(&pencil) <= 1e-10 * scale);
    Ok(SpectralPointReport {
        implies_eigenvalue: kernel_nontrivial,
        pencil_invertible: pencil.nrows() == pencil.ncols()
            && try_inverse_capped(&pencil).is_some(),
    })
}
