//! Shared JSON representations: complex scalars as `[re, im]`, matrices as
//! row-major arrays of rows, and tagged wrappers for the domain objects.

use crate::boundary::BoundaryPair;
use crate::colligation::UnitaryColligation;
use crate::error::{Error, Result};
use crate::extensions::ExtensionParameter;
use crate::linalg::{c, CMatrix, C64};
use crate::pspace::PontryaginSpace;
use crate::realize::RationalFunctionData;
use crate::relation::LinearRelation;
use serde::{Deserialize, Serialize};

pub type ComplexJson = [f64; 2];
pub type MatrixJson = Vec<Vec<ComplexJson>>;

pub fn complex_to_json(z: C64) -> ComplexJson {
    [z.re, z.im]
}

pub fn complex_from_json(v: ComplexJson) -> C64 {
    c(v[0], v[1])
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex_to_json(m[(i, j)])).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMatrix> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != nc) {
        return Err(Error::Input("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(nr, nc, |i, j| {
        complex_from_json(rows[i][j])
    }))
}

/// `{"dim": n, "J": matrix}` or `{"dim": n, "kappa": k}` for the diagonal
/// metric with k trailing -1 entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceJson {
    pub dim: usize,
    #[serde(rename = "J", skip_serializing_if = "Option::is_none")]
    pub j: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<usize>,
}

impl SpaceJson {
    pub fn from_space(s: &PontryaginSpace) -> Self {
        SpaceJson {
            dim: s.dim(),
            j: Some(matrix_to_json(s.j())),
            kappa: None,
        }
    }

    pub fn to_space(&self) -> Result<PontryaginSpace> {
        match (&self.j, self.kappa) {
            (Some(rows), _) => {
                let m = matrix_from_json(rows)?;
                if m.nrows() != self.dim {
                    return Err(Error::Dimension(format!(
                        "J is {}x{} but dim = {}",
                        m.nrows(),
                        m.ncols(),
                        self.dim
                    )));
                }
                PontryaginSpace::new(m)
            }
            (None, Some(k)) => {
                if k > self.dim {
                    return Err(Error::Dimension(format!(
                        "kappa {} exceeds dim {}",
                        k, self.dim
                    )));
                }
                Ok(PontryaginSpace::with_signature(self.dim - k, k))
            }
            (None, None) => Ok(PontryaginSpace::hilbert(self.dim)),
        }
    }
}

/// Relation as generator columns (first dim_in rows = inputs).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationJson {
    pub space_in: SpaceJson,
    pub space_out: SpaceJson,
    pub generators: MatrixJson,
}

impl RelationJson {
    pub fn from_relation(r: &LinearRelation) -> Self {
        RelationJson {
            space_in: SpaceJson::from_space(r.space_in()),
            space_out: SpaceJson::from_space(r.space_out()),
            generators: matrix_to_json(r.basis()),
        }
    }

    pub fn to_relation(&self) -> Result<LinearRelation> {
        LinearRelation::new(
            self.space_in.to_space()?,
            self.space_out.to_space()?,
            &matrix_from_json(&self.generators)?,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColligationJson {
    pub state: SpaceJson,
    #[serde(rename = "T")]
    pub t: MatrixJson,
    #[serde(rename = "F")]
    pub f: MatrixJson,
    #[serde(rename = "G")]
    pub g: MatrixJson,
    #[serde(rename = "H")]
    pub h: MatrixJson,
}

impl ColligationJson {
    pub fn from_colligation(c: &UnitaryColligation) -> Self {
        ColligationJson {
            state: SpaceJson::from_space(c.state()),
            t: matrix_to_json(c.t()),
            f: matrix_to_json(c.f()),
            g: matrix_to_json(c.g()),
            h: matrix_to_json(c.h()),
        }
    }

    pub fn to_colligation(&self) -> Result<UnitaryColligation> {
        let state = self.state.to_space()?;
        let mut t = matrix_from_json(&self.t)?;
        let mut f = matrix_from_json(&self.f)?;
        let g = matrix_from_json(&self.g)?;
        let h = matrix_from_json(&self.h)?;
        // zero-row matrices serialize as [] and lose their column count;
        // rebuild them from the state and boundary dimensions
        if state.dim() == 0 {
            t = crate::linalg::zeros(0, 0);
            if f.nrows() == 0 {
                f = crate::linalg::zeros(0, h.ncols());
            }
        }
        UnitaryColligation::new(state, t, f, g, h)
    }
}

/// Boundary pair: `backing` selects between an explicit relation and a
/// colligation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairJson {
    #[serde(rename = "H")]
    pub space: SpaceJson,
    #[serde(rename = "L1")]
    pub l1: usize,
    #[serde(rename = "L2")]
    pub l2: usize,
    pub backing: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<RelationJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colligation: Option<ColligationJson>,
}

impl PairJson {
    pub fn from_pair(bp: &BoundaryPair) -> Self {
        match bp.backing() {
            crate::boundary::Backing::Colligation(c) => PairJson {
                space: SpaceJson::from_space(bp.space()),
                l1: bp.l1(),
                l2: bp.l2(),
                backing: "colligation".into(),
                gamma: None,
                colligation: Some(ColligationJson::from_colligation(c)),
            },
            crate::boundary::Backing::Direct => PairJson {
                space: SpaceJson::from_space(bp.space()),
                l1: bp.l1(),
                l2: bp.l2(),
                backing: "direct".into(),
                gamma: Some(RelationJson::from_relation(bp.gamma())),
                colligation: None,
            },
        }
    }

    pub fn to_pair(&self) -> Result<BoundaryPair> {
        match self.backing.as_str() {
            "colligation" => {
                let c = self
                    .colligation
                    .as_ref()
                    .ok_or_else(|| Error::Input("colligation backing without blocks".into()))?
                    .to_colligation()?;
                BoundaryPair::from_colligation(c)
            }
            "direct" => {
                let rel = self
                    .gamma
                    .as_ref()
                    .ok_or_else(|| Error::Input("direct backing without a relation".into()))?
                    .to_relation()?;
                BoundaryPair::direct(self.space.to_space()?, self.l1, self.l2, rel)
            }
            other => Err(Error::Input(format!("unknown backing '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParameterJson {
    pub param_dim: usize,
    #[serde(rename = "Phi1")]
    pub phi1: MatrixJson,
    #[serde(rename = "Phi2")]
    pub phi2: MatrixJson,
}

impl ParameterJson {
    pub fn from_parameter(p: &ExtensionParameter) -> Self {
        ParameterJson {
            param_dim: p.param_dim(),
            phi1: matrix_to_json(p.phi1()),
            phi2: matrix_to_json(p.phi2()),
        }
    }

    pub fn to_parameter(&self) -> Result<ExtensionParameter> {
        let p1 = matrix_from_json(&self.phi1)?;
        let p2 = matrix_from_json(&self.phi2)?;
        if p1.ncols() != self.param_dim {
            return Err(Error::Dimension(format!(
                "Phi1 has {} columns but param_dim = {}",
                p1.ncols(),
                self.param_dim
            )));
        }
        ExtensionParameter::new(p1, p2)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealizeInputJson {
    pub taylor: Vec<MatrixJson>,
    pub center: ComplexJson,
    pub alpha: ComplexJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_hint: Option<usize>,
}

impl RealizeInputJson {
    pub fn to_data(&self) -> Result<(RationalFunctionData, C64)> {
        let taylor = self
            .taylor
            .iter()
            .map(matrix_from_json)
            .collect::<Result<Vec<_>>>()?;
        let mut data = RationalFunctionData::new(taylor, complex_from_json(self.center))?;
        data.degree_hint = self.degree_hint;
        Ok((data, complex_from_json(self.alpha)))
    }
}

/// Wrapper accepted by kernel-style commands: any of the three evaluator
/// sources.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThetaSourceJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colligation: Option<ColligationJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rational: Option<RealizeInputJson>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs, zeros};

    #[test]
    fn space_round_trip() {
        let s = PontryaginSpace::with_signature(2, 1);
        let js = SpaceJson::from_space(&s);
        let back = js.to_space().unwrap();
        assert!(back.same_space(&s));
        let diag = SpaceJson {
            dim: 3,
            j: None,
            kappa: Some(1),
        };
        assert_eq!(diag.to_space().unwrap().kappa(), 1);
    }

    #[test]
    fn pair_round_trip_through_json_text() {
        let col = UnitaryColligation::new(
            PontryaginSpace::hilbert(1),
            zeros(1, 1),
            identity(1),
            identity(1),
            zeros(1, 1),
        )
        .unwrap();
        let bp = BoundaryPair::from_colligation(col).unwrap();
        let js = PairJson::from_pair(&bp);
        let text = serde_json::to_string(&js).unwrap();
        let parsed: PairJson = serde_json::from_str(&text).unwrap();
        let back = parsed.to_pair().unwrap();
        assert!(back.gamma().span_eq(bp.gamma()));
        let th = back.theta(c(0.25, 0.1)).unwrap();
        assert!(max_abs(&(th - CMatrix::from_row_slice(1, 1, &[c(0.25, 0.1)]))) < 1e-10);
    }
}
