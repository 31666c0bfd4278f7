//! Realization of rational generalized Schur functions as unitary
//! colligations, and from there as boundary pairs.
//!
//! The pipeline is: minimal state-space realization from Taylor data
//! (block-Hankel SVD), then a state metric from the Stein equation
//! T* P T - P = -G* G, diagonalized by congruence to an exact signature
//! matrix. Functions not holomorphic at the origin are realized after a
//! disc-automorphism shift and pulled back with the hyperbolic transform of
//! the resulting pair.

use crate::boundary::BoundaryPair;
use crate::colligation::UnitaryColligation;
use crate::error::{Error, Result};
use crate::linalg::{
    c, cr, hermitian_eigen, identity, kron, max_abs, try_inverse_capped, unvec, vec_of, zeros,
    CMatrix, C64,
};
use crate::pspace::PontryaginSpace;

/// Taylor data of an operator-valued rational function: `taylor[k]` is the
/// k-th coefficient at `center`. A minimal realization of degree d needs at
/// least 2 d + 1 coefficients.
#[derive(Debug, Clone)]
pub struct RationalFunctionData {
    pub taylor: Vec<CMatrix>,
    pub center: C64,
    pub degree_hint: Option<usize>,
}

impl RationalFunctionData {
    pub fn new(taylor: Vec<CMatrix>, center: C64) -> Result<Self> {
        if taylor.is_empty() {
            return Err(Error::Input("need at least one Taylor coefficient".into()));
        }
        let shape = taylor[0].shape();
        if taylor.iter().any(|m| m.shape() != shape) {
            return Err(Error::Dimension(
                "all Taylor coefficients must have the same shape".into(),
            ));
        }
        Ok(RationalFunctionData {
            taylor,
            center,
            degree_hint: None,
        })
    }

    pub fn with_degree_hint(mut self, d: usize) -> Self {
        self.degree_hint = Some(d);
        self
    }

    pub fn out_dim(&self) -> usize {
        self.taylor[0].nrows()
    }

    pub fn in_dim(&self) -> usize {
        self.taylor[0].ncols()
    }

    /// Truncated evaluation of the series at `center + dz`.
    pub fn eval(&self, dz: C64) -> CMatrix {
        let mut acc = zeros(self.out_dim(), self.in_dim());
        let mut p = cr(1.0);
        for m in &self.taylor {
            acc += m * p;
            p *= dz;
        }
        acc
    }
}

/// Raw state-space realization (T, F, G, H) before any metric is installed.
#[derive(Debug, Clone)]
pub struct RawRealization {
    pub t: CMatrix,
    pub f: CMatrix,
    pub g: CMatrix,
    pub h: CMatrix,
}

/// Block-Hankel realization with balanced coordinates. The Hankel rank must
/// agree across two consecutive block sizes (or match the degree hint).
pub fn minimal_realization(data: &RationalFunctionData) -> Result<RawRealization> {
    let (p, m) = (data.out_dim(), data.in_dim());
    let ncoef = data.taylor.len();
    if ncoef < 3 {
        return Err(Error::RankNotStabilized(
            "need at least three Taylor coefficients".into(),
        ));
    }
    // with N coefficients the largest usable block count q satisfies
    // 2q <= N - 1 (the shifted Hankel reaches index 2q)
    let q = (ncoef - 1) / 2;
    if q == 0 {
        return Err(Error::RankNotStabilized(
            "not enough coefficients for a Hankel block".into(),
        ));
    }
    let hankel = |blocks: usize, shift: usize| -> CMatrix {
        CMatrix::from_fn(blocks * p, blocks * m, |i, j| {
            let (bi, ri) = (i / p, i % p);
            let (bj, rj) = (j / m, j % m);
            data.taylor[bi + bj + 1 + shift][(ri, rj)]
        })
    };
    let h_big = hankel(q, 0);
    let svd = crate::linalg::jacobi_svd(&h_big);
    let smax = svd.s.first().cloned().unwrap_or(0.0);
    let rank_of = |s: &[f64]| {
        if smax == 0.0 {
            0
        } else {
            s.iter().filter(|&&x| x > 1e-9 * smax).count()
        }
    };
    let r = rank_of(&svd.s);
    match data.degree_hint {
        Some(d) if d != r => {
            return Err(Error::RankNotStabilized(format!(
                "Hankel rank {r} does not match the degree hint {d}"
            )));
        }
        Some(_) => {}
        None => {
            if q >= 2 {
                let h_small = hankel(q - 1, 0);
                let r_small = rank_of(&crate::linalg::jacobi_svd(&h_small).s);
                if r_small != r {
                    return Err(Error::RankNotStabilized(format!(
                        "rank {r_small} at {} blocks vs {r} at {} blocks",
                        q - 1,
                        q
                    )));
                }
            } else if r > 0 {
                return Err(Error::RankNotStabilized(
                    "too few coefficients to confirm the Hankel rank".into(),
                ));
            }
        }
    }
    let raw = if r == 0 {
        RawRealization {
            t: zeros(0, 0),
            f: zeros(0, m),
            g: zeros(p, 0),
            h: data.taylor[0].clone(),
        }
    } else {
        let sqrt_s = CMatrix::from_fn(
            r,
            r,
            |i, j| if i == j { cr(svd.s[i].sqrt()) } else { cr(0.0) },
        );
        let inv_sqrt_s = CMatrix::from_fn(r, r, |i, j| {
            if i == j {
                cr(1.0 / svd.s[i].sqrt())
            } else {
                cr(0.0)
            }
        });
        let u_r = svd.u.columns(0, r).into_owned();
        let vh_r = svd.v.columns(0, r).adjoint();
        let observability = &u_r * &sqrt_s;
        let controllability = &sqrt_s * &vh_r;
        let shifted = hankel(q, 1);
        let t = &inv_sqrt_s * (u_r.adjoint() * shifted * vh_r.adjoint()) * &inv_sqrt_s;
        let f = controllability.columns(0, m).into_owned();
        let g = observability.rows(0, p).into_owned();
        RawRealization {
            t,
            f,
            g,
            h: data.taylor[0].clone(),
        }
    };
    // every supplied coefficient must be reproduced, otherwise the data is
    // not rational of the detected degree
    let mut power = identity(raw.t.nrows());
    let scale = data.taylor.iter().map(max_abs).fold(1.0f64, f64::max);
    for (k, coeff) in data.taylor.iter().enumerate().skip(1) {
        let predicted = &raw.g * &power * &raw.f;
        if max_abs(&(predicted - coeff)) > 1e-7 * scale {
            return Err(Error::RankNotStabilized(format!(
                "coefficient {k} is not reproduced by a degree-{r} realization"
            )));
        }
        power = &power * &raw.t;
    }
    Ok(raw)
}

/// Stein solution and diagnostics from `install_metric`.
#[derive(Debug, Clone)]
pub struct MetricReport {
    /// Gram matrix solving T* P T - P = -G* G in the raw coordinates.
    pub p: CMatrix,
    pub kappa: usize,
    pub stein_residual: f64,
    /// Residuals of F* P F + H* H = I and T* P F + G* H = 0.
    pub identity_residuals: [f64; 2],
}

/// Solves the Stein equation for the state Gram matrix, verifies the two
/// remaining coupling identities, and changes basis so the metric becomes
/// an exact signature matrix.
pub fn install_metric(raw: &RawRealization) -> Result<(UnitaryColligation, MetricReport)> {
    let r = raw.t.nrows();
    let (p_dim, m_dim) = (raw.g.nrows(), raw.f.ncols());
    if r == 0 {
        let col = UnitaryColligation::new(
            PontryaginSpace::hilbert(0),
            zeros(0, 0),
            zeros(0, m_dim),
            zeros(p_dim, 0),
            raw.h.clone(),
        )
        .map_err(|e| Error::NotSchurClass(format!("constant block is not unitary: {e}")))?;
        return Ok((
            col,
            MetricReport {
                p: zeros(0, 0),
                kappa: 0,
                stein_residual: 0.0,
                identity_residuals: [0.0, 0.0],
            },
        ));
    }
    // vec(T* P T) = (T^t (x) T*) vec(P)
    let lhs = kron(&raw.t.transpose(), &raw.t.adjoint()) - identity(r * r);
    let rhs = -vec_of(&(raw.g.adjoint() * &raw.g));
    let sol = try_inverse_capped(&lhs).ok_or_else(|| {
        Error::SteinSingular("eigenvalue pair of T with product 1 on the unit circle".into())
    })? * rhs;
    let p = unvec(&sol, r, r);
    let p = (&p + p.adjoint()).scale(0.5);
    let stein_residual = max_abs(&(raw.t.adjoint() * &p * &raw.t - &p + raw.g.adjoint() * &raw.g));
    let id2 =
        max_abs(&(raw.f.adjoint() * &p * &raw.f + raw.h.adjoint() * &raw.h - identity(m_dim)));
    let id3 = max_abs(&(raw.t.adjoint() * &p * &raw.f + raw.g.adjoint() * &raw.h));
    let scale = max_abs(&p).max(1.0);
    if stein_residual > 1e-8 * scale || id2 > 1e-7 * scale || id3 > 1e-7 * scale {
        return Err(Error::NotSchurClass(format!(
            "coupling identities violated: stein {stein_residual:.3e}, boundary {id2:.3e}, cross {id3:.3e}"
        )));
    }
    let (vals, vecs) = hermitian_eigen(&p);
    let band = 1e-10 * vals.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    if vals.iter().any(|v| v.abs() <= band) {
        return Err(Error::NotSchurClass(
            "state Gram matrix is singular; the realization is not minimal".into(),
        ));
    }
    let kappa = vals.iter().filter(|&&v| v < 0.0).count();
    // congruence S = W |Lambda|^{-1/2} makes S* P S an exact signature
    let s = &vecs
        * CMatrix::from_fn(r, r, |i, j| {
            if i == j {
                cr(1.0 / vals[i].abs().sqrt())
            } else {
                cr(0.0)
            }
        });
    let s_inv = try_inverse_capped(&s)
        .ok_or_else(|| Error::SteinSingular("Gram diagonalization is ill conditioned".into()))?;
    let t = &s_inv * &raw.t * &s;
    let f = &s_inv * &raw.f;
    let g = &raw.g * &s;
    let state = PontryaginSpace::with_signature(r - kappa, kappa);
    let col = UnitaryColligation::new(state, t, f, g, raw.h.clone())
        .map_err(|e| Error::NotSchurClass(format!("normalized blocks fail validation: {e}")))?;
    Ok((
        col,
        MetricReport {
            p,
            kappa,
            stein_residual,
            identity_residuals: [id2, id3],
        },
    ))
}

/// Coefficients of the shifted function s((z + conj(a))/(1 + a z)) at 0,
/// given the coefficients of s at conj(a).
pub fn shift_series(data: &RationalFunctionData, alpha: C64) -> Result<Vec<CMatrix>> {
    let expected_center = alpha.conj();
    if (data.center - expected_center).norm() > 1e-10 {
        return Err(Error::CenterMismatch {
            center: data.center,
            expected: expected_center,
        });
    }
    if alpha.norm() == 0.0 {
        return Ok(data.taylor.clone());
    }
    let n = data.taylor.len();
    let beta2 = 1.0 - alpha.norm_sqr();
    // w(z) = beta^2 z / (1 + alpha z); accumulate powers of w
    let mut w = vec![c(0.0, 0.0); n];
    for (j, wj) in w.iter_mut().enumerate().skip(1) {
        *wj = (-alpha).powu((j - 1) as u32) * beta2;
    }
    let mut wk = vec![c(0.0, 0.0); n];
    wk[0] = cr(1.0);
    let (pd, md) = (data.out_dim(), data.in_dim());
    let mut out = vec![zeros(pd, md); n];
    for (k, coeff) in data.taylor.iter().enumerate() {
        if k > 0 {
            let mut next = vec![c(0.0, 0.0); n];
            for i in 0..n {
                for j in 0..n - i {
                    next[i + j] += wk[i] * w[j];
                }
            }
            wk = next;
        }
        for i in 0..n {
            out[i] += coeff * wk[i];
        }
    }
    Ok(out)
}

/// Full pipeline: realize the (possibly shifted) Taylor data as a
/// colligation-backed boundary pair whose Weyl function reproduces the
/// input, returning the pair and its negative index.
pub fn realize(data: &RationalFunctionData, alpha: C64) -> Result<(BoundaryPair, usize)> {
    if (alpha.norm() - 1.0).abs() < 1e-12 {
        return Err(Error::UnimodularAlpha(alpha));
    }
    if alpha.norm() > 1.0 {
        return Err(Error::UnimodularAlpha(alpha));
    }
    let shifted = RationalFunctionData {
        taylor: shift_series(data, alpha)?,
        center: c(0.0, 0.0),
        degree_hint: data.degree_hint,
    };
    let raw = minimal_realization(&shifted)?;
    let (col, report) = install_metric(&raw)?;
    let kappa = report.kappa;
    // minimality makes the realization closely connected and hence the
    // underlying isometry simple; a failure here means degenerate data
    if !col.is_closely_connected() {
        return Err(Error::NotSchurClass(
            "minimal realization is not closely connected".into(),
        ));
    }
    let pair = BoundaryPair::from_colligation(col)?;
    if alpha.norm() == 0.0 {
        Ok((pair, kappa))
    } else {
        Ok((pair.mobius(-alpha)?, kappa))
    }
}

/// Taylor data of a colligation's characteristic function; convenience for
/// round trips.
pub fn taylor_of_colligation(col: &UnitaryColligation, count: usize) -> RationalFunctionData {
    RationalFunctionData {
        taylor: col.taylor_coefficients(count),
        center: c(0.0, 0.0),
        degree_hint: None,
    }
}
