//! JSON file formats for instances and solutions.
//!
//! Elements are written as their canonical integer encodings and
//! polynomials as little-endian coefficient lists (the zero polynomial is `[]`).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{Field, FieldParams};
use crate::mglssr::{Engine, ShiftRegisterProblem, SrSolution};
use crate::skewpoly::SkewPoly;

/// `{"p":2,"m":3,"s":1,"modulus":[1,1,0,1]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDesc {
    pub p: u32,
    pub m: usize,
    pub s: usize,
    pub modulus: Vec<u32>,
}

impl FieldDesc {
    pub fn from_params(params: &FieldParams) -> Self {
        FieldDesc { p: params.p(), m: params.m(), s: params.s(), modulus: params.modulus().to_vec() }
    }

    pub fn to_params(&self) -> Result<Arc<FieldParams>> {
        FieldParams::new(self.p, self.m, self.s, self.modulus.clone()).map(Arc::new)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub field: FieldDesc,
    pub ell: usize,
    pub gamma: Vec<usize>,
    pub g: Vec<Vec<u64>>,
    pub s: Vec<Vec<u64>>,
}

impl InstanceFile {
    pub fn from_problem(problem: &ShiftRegisterProblem) -> Self {
        InstanceFile {
            field: FieldDesc::from_params(problem.params()),
            ell: problem.ell(),
            gamma: problem.gamma().to_vec(),
            g: problem.g().iter().map(SkewPoly::encodings).collect(),
            s: problem.s().iter().map(SkewPoly::encodings).collect(),
        }
    }

    pub fn to_problem(&self) -> Result<ShiftRegisterProblem> {
        let params = self.field.to_params()?;
        let field = Field::new(params.clone());
        if self.g.len() != self.ell || self.s.len() != self.ell {
            return Err(Error::Parse(format!(
                "ell = {} but {} moduli and {} sequences",
                self.ell,
                self.g.len(),
                self.s.len()
            )));
        }
        let polys = |v: &[Vec<u64>]| v.iter().map(|c| SkewPoly::from_encodings(&field, c)).collect::<Result<Vec<_>>>();
        ShiftRegisterProblem::new(params, polys(&self.s)?, polys(&self.g)?, self.gamma.clone())
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Compact JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("serialisable");
        s.push('\n');
        s
    }
}

/// Solution file. `field` is written so that `verify` can reject a solution
/// paired with an instance over a different field; it is optional on input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub lambda: Vec<u64>,
    pub omega: Vec<Vec<u64>>,
    pub deg_lambda: usize,
    pub engine: Engine,
    pub field_ops: u64,
    pub transforms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDesc>,
}

impl SolutionFile {
    pub fn from_solution(problem: &ShiftRegisterProblem, sol: &SrSolution) -> Self {
        SolutionFile {
            lambda: sol.lambda.encodings(),
            omega: sol.omega.iter().map(SkewPoly::encodings).collect(),
            deg_lambda: sol.deg_lambda(),
            engine: sol.engine,
            field_ops: sol.stats.field_ops(),
            transforms: sol.stats.transforms,
            field: Some(FieldDesc::from_params(problem.params())),
        }
    }

    /// Decodes `lambda` and `omega` over the instance field, checking the
    /// recorded field, the shape and `deg_lambda`.
    pub fn to_polys(&self, problem: &ShiftRegisterProblem) -> Result<(SkewPoly, Vec<SkewPoly>)> {
        if let Some(f) = &self.field {
            if *f != FieldDesc::from_params(problem.params()) {
                return Err(Error::FieldMismatch);
            }
        }
        let field = Field::new(problem.params().clone());
        let lambda = SkewPoly::from_encodings(&field, &self.lambda).map_err(|_| Error::FieldMismatch)?;
        let omega = self
            .omega
            .iter()
            .map(|c| SkewPoly::from_encodings(&field, c).map_err(|_| Error::FieldMismatch))
            .collect::<Result<Vec<_>>>()?;
        if omega.len() != problem.ell() {
            return Err(Error::Parse(format!("{} omega entries for ell = {}", omega.len(), problem.ell())));
        }
        Ok((lambda, omega))
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Compact JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("serialisable");
        s.push('\n');
        s
    }
}
