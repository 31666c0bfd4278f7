//! Unitary colligations over a Pontryagin state space.
//!
//! The connecting operator U = [[T, F], [G, H]] maps (H, J) + L1 into
//! (H, J) + L2 with Hilbert boundary spaces. Adjoints of state-space legs
//! carry the J weight: T^[*] = J T* J, F^[*] = F* J, G^[*] = J G*.

use crate::error::{Error, Result};
use crate::linalg::{
    block2x2, c, hcat, identity, matrix_exp, max_abs, try_inverse_capped, vcat, zeros, CMatrix, C64,
};
use crate::pspace::PontryaginSpace;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Residuals of the six block identities of a unitary colligation.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub residuals: [f64; 6],
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct UnitaryColligation {
    state: PontryaginSpace,
    l1: usize,
    l2: usize,
    t: CMatrix,
    f: CMatrix,
    g: CMatrix,
    h: CMatrix,
}

impl UnitaryColligation {
    /// Builds and validates a colligation; fails when any identity residual
    /// exceeds `1e-9`.
    pub fn new(
        state: PontryaginSpace,
        t: CMatrix,
        f: CMatrix,
        g: CMatrix,
        h: CMatrix,
    ) -> Result<Self> {
        let n = state.dim();
        let l1 = f.ncols();
        let l2 = g.nrows();
        if t.shape() != (n, n) || f.nrows() != n || g.ncols() != n || h.shape() != (l2, l1) {
            return Err(Error::Dimension(format!(
                "block shapes T{:?} F{:?} G{:?} H{:?} inconsistent with state dim {}",
                t.shape(),
                f.shape(),
                g.shape(),
                h.shape(),
                n
            )));
        }
        let col = UnitaryColligation {
            state,
            l1,
            l2,
            t,
            f,
            g,
            h,
        };
        let report = col.validate();
        if !report.pass {
            return Err(Error::InvalidColligation(format!(
                "max identity residual {:.3e}",
                report.max_residual
            )));
        }
        Ok(col)
    }

    /// Colligation with empty state space; `h` must be unitary.
    pub fn empty_state(h: CMatrix) -> Result<Self> {
        UnitaryColligation::new(
            PontryaginSpace::hilbert(0),
            zeros(0, 0),
            zeros(0, h.ncols()),
            zeros(h.nrows(), 0),
            h,
        )
    }

    pub fn state(&self) -> &PontryaginSpace {
        &self.state
    }
    pub fn l1(&self) -> usize {
        self.l1
    }
    pub fn l2(&self) -> usize {
        self.l2
    }
    pub fn t(&self) -> &CMatrix {
        &self.t
    }
    pub fn f(&self) -> &CMatrix {
        &self.f
    }
    pub fn g(&self) -> &CMatrix {
        &self.g
    }
    pub fn h(&self) -> &CMatrix {
        &self.h
    }

    pub fn t_adj(&self) -> CMatrix {
        self.state.j() * self.t.adjoint() * self.state.j()
    }
    pub fn f_adj(&self) -> CMatrix {
        self.f.adjoint() * self.state.j()
    }
    pub fn g_adj(&self) -> CMatrix {
        self.state.j() * self.g.adjoint()
    }

    /// Connecting block matrix U.
    pub fn connecting_matrix(&self) -> CMatrix {
        block2x2(&self.t, &self.f, &self.g, &self.h)
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.state.dim();
        let ts = self.t_adj();
        let fs = self.f_adj();
        let gs = self.g_adj();
        let residuals = [
            max_abs(&(&ts * &self.t + &gs * &self.g - identity(n))),
            max_abs(&(&fs * &self.f + self.h.adjoint() * &self.h - identity(self.l1))),
            max_abs(&(&ts * &self.f + &gs * &self.h)),
            max_abs(&(&self.t * &ts + &self.f * &fs - identity(n))),
            max_abs(&(&self.g * &gs + &self.h * self.h.adjoint() - identity(self.l2))),
            max_abs(&(&self.t * &gs + &self.f * self.h.adjoint())),
        ];
        let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
        ValidationReport {
            residuals,
            max_residual,
            pass: max_residual <= 1e-9,
        }
    }

    /// Characteristic function H + lambda G (I - lambda T)^{-1} F.
    pub fn characteristic_function(&self, lambda: C64) -> Result<CMatrix> {
        let n = self.state.dim();
        if n == 0 {
            return Ok(self.h.clone());
        }
        let pencil = identity(n) - &self.t * lambda;
        let inv = try_inverse_capped(&pencil).ok_or(Error::SingularResolvent(lambda))?;
        Ok(&self.h + (&self.g * inv * &self.f) * lambda)
    }

    /// Taylor coefficients of the characteristic function at 0:
    /// M_0 = H, M_k = G T^{k-1} F.
    pub fn taylor_coefficients(&self, count: usize) -> Vec<CMatrix> {
        let mut out = vec![self.h.clone()];
        let mut power = identity(self.state.dim());
        for _ in 1..count {
            out.push(&self.g * &power * &self.f);
            power = &power * &self.t;
        }
        out
    }

    /// Krylov test: the spans of T^m F and (T^[*])^n G^[*] must fill the
    /// state space. Powers beyond dim-1 are redundant; rank stagnation
    /// exits early.
    pub fn is_closely_connected(&self) -> bool {
        let n = self.state.dim();
        if n == 0 {
            return true;
        }
        let mut basis = zeros(n, 0);
        let mut blocks_f = self.f.clone();
        let mut blocks_g = self.g_adj();
        let ts = self.t_adj();
        for _ in 0..n {
            let stacked = hcat(&[&basis, &blocks_f, &blocks_g]);
            let next = crate::linalg::orth(&stacked);
            if next.ncols() == basis.ncols() {
                break;
            }
            basis = next;
            if basis.ncols() == n {
                return true;
            }
            blocks_f = &self.t * &blocks_f;
            blocks_g = &ts * &blocks_g;
        }
        basis.ncols() == n
    }

    /// Seeded random unitary colligation: exponentiates a J'-skew generator
    /// so the connecting matrix is exactly metric-unitary, with
    /// J' = diag(J, I) and J the target signature.
    pub fn random(rng: &mut ChaCha8Rng, dim: usize, kappa: usize, l: usize) -> Self {
        assert!(kappa <= dim, "kappa must not exceed the state dimension");
        let state = PontryaginSpace::with_signature(dim - kappa, kappa);
        let total = dim + l;
        let jp = {
            let mut m = identity(total);
            m.view_mut((0, 0), (dim, dim)).copy_from(state.j());
            m
        };
        let a = CMatrix::from_fn(total, total, |_, _| {
            c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let skew = (&a - a.adjoint()).scale(0.5);
        let u = matrix_exp(&(&jp * skew).scale(0.9));
        let t = u.view((0, 0), (dim, dim)).into_owned();
        let f = u.view((0, dim), (dim, l)).into_owned();
        let g = u.view((dim, 0), (l, dim)).into_owned();
        let h = u.view((dim, dim), (l, l)).into_owned();
        UnitaryColligation::new(state, t, f, g, h)
            .expect("exponential of a metric-skew generator is metric-unitary")
    }

    /// Retries `random` until the result is closely connected.
    pub fn random_closely_connected(
        rng: &mut ChaCha8Rng,
        dim: usize,
        kappa: usize,
        l: usize,
    ) -> Self {
        loop {
            let c = Self::random(rng, dim, kappa, l);
            if c.is_closely_connected() {
                return c;
            }
        }
    }

    /// Direct sum with an uncoupled metric-unitary state block: the extra
    /// block never meets the boundary spaces, so the result cannot be
    /// closely connected.
    pub fn with_uncoupled_block(
        &self,
        block: &CMatrix,
        block_space: &PontryaginSpace,
    ) -> Result<Self> {
        let m = block_space.dim();
        if block.shape() != (m, m) {
            return Err(Error::Dimension("uncoupled block must be square".into()));
        }
        let state = self.state.direct_sum(block_space);
        let t = block2x2(
            &self.t,
            &zeros(self.state.dim(), m),
            &zeros(m, self.state.dim()),
            block,
        );
        let f = vcat(&[&self.f, &zeros(m, self.l1)]);
        let g = hcat(&[&self.g, &zeros(self.l2, m)]);
        UnitaryColligation::new(state, t, f, g, self.h.clone())
    }
}
