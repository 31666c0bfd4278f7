//! Generalized coresolvents via the coupling construction.
//!
//! The coupling joins an ordinary boundary triple (the base) with a second
//! boundary pair (the parameter) into one pair on the orthogonal sum of the
//! state spaces: the parameter enters transposed, occupying the crossed
//! boundary slots, so the coupled Weyl function is block anti-diagonal in
//! the base Weyl function and the transposed parameter Weyl function.
//! Compressing the coresolvent of the canonical coupled extension to the
//! base space yields the Krein-type formula with the parameter Weyl
//! function as the free datum.

use crate::boundary::BoundaryPair;
use crate::error::{Error, Result};
use crate::extensions::{build_extension, direct_coresolvent_oracle, ExtensionParameter};
use crate::kernels::{classify_pair, PairClass, SamplerConfig};
use crate::linalg::{
    self, c, hcat, identity, max_abs, try_inverse_capped, vcat, zeros, CMatrix, C64,
};
use crate::pspace::PontryaginSpace;
use crate::relation::LinearRelation;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// An ordinary base triple coupled with a parameter pair.
#[derive(Debug, Clone)]
pub struct Coupling {
    base: BoundaryPair,
    parameter: BoundaryPair,
    tilde: BoundaryPair,
    tilde_extension: LinearRelation,
}

impl Coupling {
    pub fn base(&self) -> &BoundaryPair {
        &self.base
    }
    pub fn parameter(&self) -> &BoundaryPair {
        &self.parameter
    }
    pub fn tilde(&self) -> &BoundaryPair {
        &self.tilde
    }
    /// The coupled extension with identity boundary parameter.
    pub fn tilde_extension(&self) -> &LinearRelation {
        &self.tilde_extension
    }
    /// Negative-index excess contributed by the parameter state space.
    pub fn index_excess(&self) -> usize {
        self.parameter.space().kappa()
    }
}

/// Builds the coupled boundary pair. The base must be an ordinary triple
/// and the boundary dimensions must agree crosswise.
pub fn couple(base: &BoundaryPair, parameter: &BoundaryPair) -> Result<Coupling> {
    if base.l1() != parameter.l1() || base.l2() != parameter.l2() {
        return Err(Error::Dimension(format!(
            "boundary dimensions must match: base ({}, {}), parameter ({}, {})",
            base.l1(),
            base.l2(),
            parameter.l1(),
            parameter.l2()
        )));
    }
    let cls = classify_pair(base);
    if cls.class != PairClass::Ordinary {
        return Err(Error::NotOrdinary(format!(
            "classification {:?} (mul dim {}, ran dim {})",
            cls.class, cls.mul_gamma_dim, cls.ran_gamma_dim
        )));
    }
    let bl = base.l1() + base.l2();
    let (fa, fpa, u1a, u2a) = base.blocks();
    let (fb, fpb, u1b, u2b) = parameter.blocks();
    let (ka, kb) = (fa.ncols(), fb.ncols());

    // base generators keep their slots; parameter generators enter with the
    // graph reversed and the boundary components crossed:
    //   f~ = (f+, f-'), f~' = (f+', f-),
    //   u~1 = (u1+, u2-), u~2 = (u1-, u2+)
    let left = |m: &CMatrix| hcat(&[m, &zeros(m.nrows(), kb)]);
    let right = |m: &CMatrix| hcat(&[&zeros(m.nrows(), ka), m]);
    let gens = vcat(&[
        &vcat(&[&left(&fa), &right(&fpb)]),
        &vcat(&[&left(&fpa), &right(&fb)]),
        &left(&u1a),
        &right(&u2b),
        &right(&u1b),
        &left(&u2a),
    ]);

    let space = base.space().direct_sum(parameter.space());
    let graph = PontryaginSpace::graph(&space, &space);
    let boundary = PontryaginSpace::boundary(bl, bl);
    let gamma = LinearRelation::new(graph, boundary, &gens)?;
    let tilde = BoundaryPair::direct(space, bl, bl, gamma)?;
    let tilde_extension = build_extension(&tilde, &ExtensionParameter::identity(bl))?;
    let coupling = Coupling {
        base: base.clone(),
        parameter: parameter.clone(),
        tilde,
        tilde_extension,
    };
    verify_block_structure(&coupling)?;
    Ok(coupling)
}

// Weyl function of the coupled pair must be the anti-diagonal of the base
// Weyl function and the transposed parameter Weyl function, and its
// gamma-fields block-diagonal/anti-diagonal in the base and transposed
// parameter fields; checked at the first two admissible probe points.
fn verify_block_structure(cp: &Coupling) -> Result<()> {
    let (l1, l2) = (cp.base.l1(), cp.base.l2());
    let (nb, np) = (cp.base.space().dim(), cp.parameter.space().dim());
    let mut checked = 0;
    for &z in &[
        c(0.23, 0.11),
        c(-0.31, 0.17),
        c(0.12, -0.4),
        c(0.45, 0.2),
        c(-0.2, -0.33),
        c(0.37, -0.05),
        c(0.05, 0.29),
        c(-0.44, -0.12),
    ] {
        let (tz, bz, pz) = (
            cp.tilde.weyl(z),
            cp.base.theta(z),
            cp.parameter.theta(z.conj()),
        );
        let (tz, bz, pz) = match (tz, bz, pz) {
            (Ok(a), Ok(b), Ok(p)) => (a, b, p),
            _ => continue,
        };
        let eps_t = pz.adjoint();
        let expect = vcat(&[
            &hcat(&[&zeros(l1, l1), &eps_t]),
            &hcat(&[&bz, &zeros(l2, l2)]),
        ]);
        if max_abs(&(&tz.theta - &expect)) > 1e-7 {
            return Err(Error::NotUnitary(format!(
                "coupled Weyl function lost its block structure at z = {z} (residual {:.3e})",
                max_abs(&(&tz.theta - &expect))
            )));
        }
        // interior gamma-field: diag(gamma_1 of the base, transposed
        // parameter field (1/z) gamma_2(1/z))
        if np > 0 {
            if let (Ok(g1b), Ok(g2p)) = (cp.base.gamma1(z), cp.parameter.gamma2(z.inv())) {
                let expect_g = vcat(&[
                    &hcat(&[&g1b, &zeros(nb, l2)]),
                    &hcat(&[&zeros(np, l1), &(g2p * z.inv())]),
                ]);
                if max_abs(&(&tz.gamma - &expect_g)) > 1e-7 {
                    return Err(Error::NotUnitary(format!(
                        "coupled gamma-field lost its block structure at z = {z}"
                    )));
                }
            }
        }
        checked += 1;
        if checked >= 2 {
            break;
        }
    }
    Ok(())
}

/// Interior/exterior Krein-type formula for the compressed coresolvent of
/// the coupled extension.
pub fn generalized_coresolvent(cp: &Coupling, z: C64) -> Result<CMatrix> {
    let eps = |w: C64| cp.parameter.theta(w);
    generalized_coresolvent_formula(&cp.base, &eps, z)
}

/// The same formula with an arbitrary parameter-function evaluator; used
/// for degenerate parameters (for example the zero function) that no
/// finite-dimensional pair realizes.
pub fn generalized_coresolvent_formula(
    base: &BoundaryPair,
    eps: &dyn Fn(C64) -> Result<CMatrix>,
    z: C64,
) -> Result<CMatrix> {
    let n = base.space().dim();
    if z.norm() == 0.0 {
        return Ok(identity(n));
    }
    let j = base.space().j();
    if z.norm() < 1.0 {
        let base_core = base
            .parts()
            .v2
            .coresolvent_matrix(z)
            .ok_or(Error::ExcludedPoint {
                lambda: z,
                reason: "I - z V2 is not invertible".into(),
            })?;
        let g2 = base.gamma2(z.inv())?;
        let theta_c = base.theta(z.conj())?;
        let g1 = base.gamma1(z.conj())?;
        let ez = eps(z)?;
        let pencil = identity(base.l1()) - theta_c.adjoint() * &ez;
        let mid = try_inverse_capped(&pencil).ok_or(Error::Regularity(z))?;
        Ok(base_core + g2 * ez * mid * (g1.adjoint() * j))
    } else {
        let base_core = base
            .parts()
            .v1
            .coresolvent_matrix(z)
            .ok_or(Error::ExcludedPoint {
                lambda: z,
                reason: "I - z V1 is not invertible".into(),
            })?;
        let g1 = base.gamma1(z.inv())?;
        let theta_i = base.theta(z.inv())?;
        let g2 = base.gamma2(z.conj())?;
        // transposed parameter function at 1/z
        let eps_t = eps(z.conj().inv())?.adjoint();
        let pencil = identity(base.l2()) - &theta_i * &eps_t;
        let mid = try_inverse_capped(&pencil).ok_or(Error::Regularity(z))?;
        Ok(base_core - g1 * eps_t * mid * (g2.adjoint() * j))
    }
}

/// Compression of the coupled extension's coresolvent to the base space:
/// the direct oracle the formula is checked against.
pub fn compression_oracle(cp: &Coupling, z: C64) -> Result<CMatrix> {
    let n = cp.base.space().dim();
    match direct_coresolvent_oracle(&cp.tilde_extension, z) {
        crate::extensions::DirectInversion::Matrix(m) => Ok(m.view((0, 0), (n, n)).into_owned()),
        crate::extensions::DirectInversion::NotInvertible => Err(Error::ExcludedPoint {
            lambda: z,
            reason: "z is not a coresolvent point of the coupled extension".into(),
        }),
    }
}

/// Defect kernel of a coresolvent family:
/// (K_z + K_w^[*] - I)/(1 - z conj(w)) - K_w^[*] K_z, with the metric
/// adjoint on the state space.
pub fn coresolvent_kernel(
    k: &dyn Fn(C64) -> Result<CMatrix>,
    j: &CMatrix,
    z: C64,
    w: C64,
) -> Result<CMatrix> {
    let d = c(1.0, 0.0) - z * w.conj();
    if d.norm() < 1e-12 {
        return Err(Error::UnimodularProduct(z, w));
    }
    let kz = k(z)?;
    let kw = k(w)?;
    let kws = j * kw.adjoint() * j;
    let n = kz.nrows();
    Ok((&kz + &kws - identity(n)) * d.inv() - kws * kz)
}

#[derive(Debug, Clone)]
pub struct RegularityIndex {
    pub count: usize,
    pub stabilized: bool,
    pub points_used: usize,
}

/// Negative-squares estimate of the coresolvent defect kernel; for a
/// coupling with a simple parameter isometry this equals the parameter's
/// negative index. The parameter simplicity precondition is verified on a
/// seeded sample fan.
pub fn regularity_index(cp: &Coupling, cfg: &SamplerConfig) -> Result<RegularityIndex> {
    let simple_samples: Vec<C64> = sample_fan(cfg.seed ^ 0x5eed, 12);
    if cp.parameter.space().dim() > 0 {
        let simple = cp
            .parameter
            .parts()
            .v
            .is_simple(&simple_samples)
            .map_err(|e| Error::NotSimple(format!("simplicity check failed: {e}")))?;
        if !simple {
            return Err(Error::NotSimple(
                "parameter isometry has proper reducing defect structure".into(),
            ));
        }
    }
    let k = |z: C64| compression_oracle(cp, z);
    let j = cp.base.space().j().clone();
    let n = cp.base.space().dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut points: Vec<C64> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut target = cfg
        .initial_points
        .max(cfg.expected.map_or(0, |e| 2 * e + 2));
    loop {
        let mut attempts = 0;
        while points.len() < target && attempts < 400 * target {
            attempts += 1;
            let r = cfg.inner_radius + (cfg.outer_radius - cfg.inner_radius) * rng.gen::<f64>();
            let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            let z = c(r * phi.cos(), r * phi.sin());
            if k(z).is_ok() {
                points.push(z);
            }
        }
        if points.is_empty() {
            return Err(Error::InsufficientSamples(
                "no admissible coresolvent points".into(),
            ));
        }
        // Gram of the kernel over points x coordinate vectors in the
        // indefinite metric of the base space
        let m = points.len() * n;
        let mut gram = zeros(m, m);
        for (pi, &zi) in points.iter().enumerate() {
            for (pj, &zj) in points.iter().enumerate() {
                let r = coresolvent_kernel(&k, &j, zj, zi)?;
                let block = &j * r;
                for a in 0..n {
                    for b in 0..n {
                        gram[(pi * n + a, pj * n + b)] = block[(a, b)];
                    }
                }
            }
        }
        let gram = (&gram + gram.adjoint()).scale(0.5);
        let (neg, _, _) = linalg::inertia(&gram, cfg.band);
        counts.push(neg);
        let nrounds = counts.len();
        if nrounds >= 2 && counts[nrounds - 1] == counts[nrounds - 2] {
            return Ok(RegularityIndex {
                count: neg,
                stabilized: true,
                points_used: points.len(),
            });
        }
        if target >= cfg.max_points {
            return Ok(RegularityIndex {
                count: neg,
                stabilized: false,
                points_used: points.len(),
            });
        }
        target = (target * 2).min(cfg.max_points);
    }
}

/// The frozen boundary relation of the compressed coresolvent at one
/// point: boundary images of the columns (z K_z g, K_z g - g) under the
/// base triple. For couplings it reproduces the parameter Weyl function,
/// and the extension selected by the frozen relation reproduces the
/// coresolvent value itself.
#[derive(Debug, Clone)]
pub struct ShtrausParameter {
    /// Generators of the extracted relation, stacked as (u1; u2) columns.
    pub generators: CMatrix,
    /// Span distance to the graph of the parameter Weyl function at z,
    /// when that evaluation succeeds.
    pub weyl_match_residual: Option<f64>,
    /// Relative deviation of the coresolvent of the frozen-parameter
    /// extension from the compressed coresolvent.
    pub frozen_coresolvent_residual: f64,
}

pub fn shtraus_parameter(cp: &Coupling, z: C64) -> Result<ShtrausParameter> {
    let kz = compression_oracle(cp, z)?;
    let n = cp.base.space().dim();
    let (f, fp, u1, u2) = cp.base.blocks();
    let graph = vcat(&[&f, &fp]);
    // columns (z K_z g; K_z g - g) over the coordinate basis g
    let top = &kz * z;
    let bottom = &kz - identity(n);
    let target = vcat(&[&top, &bottom]);
    let (coeff, res) = linalg::lstsq(&graph, &target);
    if res > 1e-7 * max_abs(&target).max(1.0) {
        return Err(Error::ExcludedPoint {
            lambda: z,
            reason: format!(
                "coresolvent columns leave the domain of the boundary relation (residual {res:.3e})"
            ),
        });
    }
    let b1 = &u1 * &coeff;
    let b2 = &u2 * &coeff;
    let generators = linalg::orth(&vcat(&[&b1, &b2]));
    let weyl_match_residual = cp.parameter.theta(z).ok().map(|eps| {
        let graph_eps = linalg::orth(&vcat(&[&identity(cp.base.l1()), &eps]));
        crate::relation::span_distance(&generators, &graph_eps)
    });
    // freeze the extracted relation into an extension and recompute
    let phi = ExtensionParameter::new(
        generators.rows(0, cp.base.l1()).into_owned(),
        generators.rows(cp.base.l1(), cp.base.l2()).into_owned(),
    )?;
    let frozen = crate::extensions::coresolvent(&cp.base, &phi, z)?;
    let frozen_coresolvent_residual = max_abs(&(&frozen - &kz)) / max_abs(&kz).max(1.0);
    Ok(ShtrausParameter {
        generators,
        weyl_match_residual,
        frozen_coresolvent_residual,
    })
}

fn sample_fan(seed: u64, count: usize) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let r = if i % 2 == 0 {
            0.15 + 0.7 * rng.gen::<f64>()
        } else {
            1.2 + 2.0 * rng.gen::<f64>()
        };
        let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
        out.push(c(r * phi.cos(), r * phi.sin()));
    }
    out
}
