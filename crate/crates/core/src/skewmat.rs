//! Vectors and matrices over the skew polynomial ring: leading positions,
//! the value function, simple transformations and Mulders–Storjohann
//! reduction to weak Popov form, plus determinant-degree bookkeeping.

use crate::error::{Error, Result};
use crate::skewpoly::{SkewPoly, SkewRing};

/// A row vector over `K[x; theta]`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SkewVector(Vec<SkewPoly>);

impl SkewVector {
    pub fn new(entries: Vec<SkewPoly>) -> Self {
        SkewVector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        SkewVector(vec![SkewPoly::zero(); n])
    }

    pub fn entries(&self) -> &[SkewPoly] {
        &self.0
    }

    pub fn entries_mut(&mut self) -> &mut [SkewPoly] {
        &mut self.0
    }

    pub fn into_entries(self) -> Vec<SkewPoly> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(SkewPoly::is_zero)
    }

    /// Maximum entry degree; `None` for the zero vector.
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().filter_map(SkewPoly::degree).max()
    }

    /// Largest index whose entry attains the vector degree.
    pub fn leading_position(&self) -> Result<usize> {
        let d = self.degree().ok_or(Error::LpOfZeroVector)?;
        Ok(self.0.iter().rposition(|e| e.degree() == Some(d)).expect("degree is attained"))
    }

    /// `n deg v + LP(v) + 1`, and 0 for the zero vector (`n` is the vector length).
    pub fn value(&self) -> u64 {
        match self.degree() {
            None => 0,
            Some(d) => {
                let lp = self.leading_position().expect("non-zero");
                (self.len() * d + lp + 1) as u64
            }
        }
    }

    /// Entry at the leading position.
    pub fn leading_term(&self) -> Result<&SkewPoly> {
        Ok(&self.0[self.leading_position()?])
    }

    pub fn leading_coeff(&self) -> Result<crate::Fe> {
        Ok(self.leading_term()?.lead().expect("leading term is non-zero"))
    }
}

/// A rectangular matrix over `K[x; theta]`, stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewMatrix {
    rows: Vec<SkewVector>,
    ncols: usize,
}

impl SkewMatrix {
    pub fn new(rows: Vec<SkewVector>) -> Result<Self> {
        let ncols = rows.first().map_or(0, SkewVector::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Shape("rows of unequal length".into()));
        }
        Ok(SkewMatrix { rows, ncols })
    }

    pub fn from_polys(rows: Vec<Vec<SkewPoly>>) -> Result<Self> {
        SkewMatrix::new(rows.into_iter().map(SkewVector::new).collect())
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut v = SkewVector::zeros(n);
                v.0[i] = SkewPoly::one();
                v
            })
            .collect();
        SkewMatrix { rows, ncols: n }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols
    }

    pub fn rows(&self) -> &[SkewVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &SkewVector {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> &SkewPoly {
        &self.rows[i].0[j]
    }

    pub fn into_rows(self) -> Vec<SkewVector> {
        self.rows
    }

    /// Sum of row degrees; fails on a zero row.
    pub fn degree(&self) -> Result<usize> {
        self.rows.iter().map(|r| r.degree().ok_or(Error::NotFullRank)).sum()
    }

    /// Largest entry degree.
    pub fn max_degree(&self) -> Option<usize> {
        self.rows.iter().filter_map(SkewVector::degree).max()
    }

    /// Leading positions of non-zero rows are pairwise distinct.
    pub fn is_weak_popov(&self) -> bool {
        let mut seen = vec![false; self.ncols];
        for row in &self.rows {
            if let Ok(lp) = row.leading_position() {
                if std::mem::replace(&mut seen[lp], true) {
                    return false;
                }
            }
        }
        true
    }

    /// Total stored coefficients across entries.
    pub fn coeff_count(&self) -> usize {
        self.rows.iter().flat_map(|r| r.0.iter()).map(SkewPoly::len).sum()
    }
}

/// One simple transformation: `rows[row] -= alpha x^beta rows[pivot]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransformStep {
    pub row: usize,
    pub pivot: usize,
    pub value_before: u64,
    pub value_after: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransformLog {
    pub count: u64,
    pub steps: Vec<TransformStep>,
}

impl TransformLog {
    fn push(&mut self, step: TransformStep) {
        self.count += 1;
        self.steps.push(step);
    }

    /// Every logged step strictly decreased the replaced row's value.
    pub fn values_strictly_decrease(&self) -> bool {
        self.steps.iter().all(|s| s.value_after < s.value_before)
    }
}

/// Replaces row `j` by `v_j - alpha x^beta v_i`, with
/// `beta = deg v_j - deg v_i` and `alpha = LC(v_j) / theta^beta(LC(v_i))`.
pub fn simple_transform(ring: &SkewRing, v: &mut SkewMatrix, i: usize, j: usize) -> Result<TransformStep> {
    let bad = |why: &str| Error::NotSimpleTransform(why.to_string());
    if i == j || i >= v.nrows() || j >= v.nrows() {
        return Err(bad("rows must be distinct and in range"));
    }
    let (vi, vj) = (&v.rows[i], &v.rows[j]);
    let (Some(di), Some(dj)) = (vi.degree(), vj.degree()) else {
        return Err(bad("zero row"));
    };
    let lp = vi.leading_position()?;
    if lp != vj.leading_position()? {
        return Err(bad("leading positions differ"));
    }
    if di > dj {
        return Err(bad("deg v_i > deg v_j"));
    }
    let beta = dj - di;
    let fld = ring.field();
    let alpha = fld.div(vj.leading_coeff()?, fld.frobenius(vi.leading_coeff()?, beta as i64))?;
    let value_before = vj.value();

    let pivot = v.rows[i].clone();
    for (target, src) in v.rows[j].0.iter_mut().zip(pivot.0.iter()) {
        let mut coeffs = std::mem::take(target).into_coeffs();
        ring.sub_mul_monomial_into(&mut coeffs, alpha, beta, src.coeffs());
        *target = SkewPoly::new(coeffs);
    }
    let value_after = v.rows[j].value();
    debug_assert!(v.rows[j].0[lp].degree() < Some(dj), "leading term not cancelled");
    Ok(TransformStep { row: j, pivot: i, value_before, value_after })
}

/// Mulders–Storjohann: apply simple transformations until the matrix is in
/// weak Popov form.
///
/// Pivot order: rows are scanned by increasing index; the first row whose
/// leading position was already seen pairs with that earlier row. The
/// lower-degree row is subtracted from the higher-degree one, and on equal
/// degrees the lower index is the subtractor.
pub fn mulders_storjohann(ring: &SkewRing, v: SkewMatrix) -> Result<(SkewMatrix, TransformLog)> {
    if !v.is_square() {
        return Err(Error::Shape(format!("expected a square matrix, got {}x{}", v.nrows(), v.ncols())));
    }
    let mut v = v;
    let mut log = TransformLog::default();
    loop {
        let mut seen: Vec<Option<usize>> = vec![None; v.ncols()];
        let mut pair = None;
        for (r, row) in v.rows.iter().enumerate() {
            let Ok(lp) = row.leading_position() else { continue };
            match seen[lp] {
                Some(q) => {
                    pair = Some((q, r));
                    break;
                }
                None => seen[lp] = Some(r),
            }
        }
        let Some((q, r)) = pair else { break };
        let (i, j) = if v.rows[r].degree() < v.rows[q].degree() { (r, q) } else { (q, r) };
        log.push(simple_transform(ring, &mut v, i, j)?);
    }
    Ok((v, log))
}

/// Degree of the determinant of a triangular matrix: the sum of the diagonal degrees.
pub fn det_degree_triangular(v: &SkewMatrix) -> Result<usize> {
    if !v.is_square() {
        return Err(Error::Shape("triangular determinant needs a square matrix".into()));
    }
    let n = v.nrows();
    let upper = (0..n).all(|i| (0..i).all(|j| v.entry(i, j).is_zero()));
    let lower = (0..n).all(|i| (i + 1..n).all(|j| v.entry(i, j).is_zero()));
    if !upper && !lower {
        return Err(Error::Precondition("matrix is not triangular".into()));
    }
    (0..n).map(|i| v.entry(i, i).degree().ok_or(Error::SingularTriangular)).sum()
}

/// `deg V - deg det V`, with the determinant degree supplied by the caller.
pub fn orthogonality_defect(v: &SkewMatrix, det_degree: usize) -> Result<i64> {
    Ok(v.degree()? as i64 - det_degree as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FieldParams;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn ring() -> SkewRing {
        SkewRing::from_params(Arc::new(FieldParams::new(2, 2, 1, vec![1, 1, 1]).unwrap()))
    }

    fn p(r: &SkewRing, enc: &[u64]) -> SkewPoly {
        SkewPoly::from_encodings(r.field(), enc).unwrap()
    }

    fn x(k: usize) -> SkewPoly {
        SkewPoly::x_pow(k)
    }

    fn vecp(entries: Vec<SkewPoly>) -> SkewVector {
        SkewVector::new(entries)
    }

    #[test]
    fn vector_degree_lp_value() {
        let zero = vecp(vec![SkewPoly::zero(), SkewPoly::zero()]);
        assert_eq!(zero.degree(), None);
        assert_eq!(zero.leading_position(), Err(Error::LpOfZeroVector));
        assert_eq!(zero.value(), 0);
        let a = vecp(vec![SkewPoly::one(), x(2)]);
        assert_eq!(a.degree(), Some(2));
        assert_eq!(a.leading_position(), Ok(1));
        assert_eq!(a.value(), 6);
        let b = vecp(vec![x(1), x(1)]);
        assert_eq!(b.degree(), Some(1));
        assert_eq!(b.leading_position(), Ok(1));
        let c = vecp(vec![x(2), SkewPoly::one()]);
        assert_eq!(c.leading_position(), Ok(0));
        assert_eq!(c.value(), 5);
    }

    #[test]
    fn weak_popov_recognition() {
        assert!(SkewMatrix::identity(3).is_weak_popov());
        let m = SkewMatrix::from_polys(vec![vec![SkewPoly::one(), x(1)], vec![SkewPoly::zero(), x(2)]]).unwrap();
        assert!(!m.is_weak_popov());
        let m = SkewMatrix::from_polys(vec![vec![x(2), SkewPoly::one()], vec![SkewPoly::zero(), x(3)]]).unwrap();
        assert!(m.is_weak_popov());
        assert!(SkewMatrix::from_polys(vec![vec![x(1)], vec![x(1), x(2)]]).is_err());
    }

    #[test]
    fn simple_transform_example() {
        let r = ring();
        let mut m = SkewMatrix::from_polys(vec![vec![SkewPoly::one(), x(1)], vec![SkewPoly::zero(), x(2)]]).unwrap();
        let step = simple_transform(&r, &mut m, 0, 1).unwrap();
        assert_eq!(m.row(1), &vecp(vec![x(1), SkewPoly::zero()]));
        assert_eq!((step.value_before, step.value_after), (6, 3));
    }

    #[test]
    fn simple_transform_same_degree_uses_lc_ratio() {
        let r = ring();
        // rows (1, z x) and (0, (z+1) x): beta = 0, alpha = (z+1)/z = z
        let mut m = SkewMatrix::from_polys(vec![
            vec![SkewPoly::one(), p(&r, &[0, 2])],
            vec![SkewPoly::zero(), p(&r, &[1, 3])],
        ])
        .unwrap();
        simple_transform(&r, &mut m, 0, 1).unwrap();
        // (0, 1 + (z+1)x) - z (1, z x) = (z, 1)
        assert_eq!(m.row(1), &vecp(vec![p(&r, &[2]), SkewPoly::one()]));
    }

    #[test]
    fn simple_transform_rejects_invalid() {
        let r = ring();
        let mut m = SkewMatrix::from_polys(vec![vec![x(2), SkewPoly::one()], vec![SkewPoly::zero(), x(3)]]).unwrap();
        assert!(matches!(simple_transform(&r, &mut m, 0, 1), Err(Error::NotSimpleTransform(_))));
        assert!(matches!(simple_transform(&r, &mut m, 1, 1), Err(Error::NotSimpleTransform(_))));
        let mut m = SkewMatrix::from_polys(vec![vec![x(1), x(3)], vec![SkewPoly::zero(), x(2)]]).unwrap();
        assert!(matches!(simple_transform(&r, &mut m, 0, 1), Err(Error::NotSimpleTransform(_))));
    }

    #[test]
    fn ms_on_weak_popov_is_identity() {
        let r = ring();
        let m = SkewMatrix::from_polys(vec![vec![x(2), SkewPoly::one()], vec![SkewPoly::zero(), x(3)]]).unwrap();
        let (out, log) = mulders_storjohann(&r, m.clone()).unwrap();
        assert_eq!(out, m);
        assert_eq!(log.count, 0);
    }

    #[test]
    fn ms_small_example() {
        let r = ring();
        let m = SkewMatrix::from_polys(vec![vec![SkewPoly::one(), x(1)], vec![SkewPoly::zero(), x(2)]]).unwrap();
        let det = det_degree_triangular(&m).unwrap();
        let (out, log) = mulders_storjohann(&r, m).unwrap();
        assert!(out.is_weak_popov());
        assert!(log.count >= 1);
        assert!(log.values_strictly_decrease());
        assert_eq!(out.degree().unwrap(), det);
        assert_eq!(orthogonality_defect(&out, det).unwrap(), 0);
    }

    #[test]
    fn determinant_degree() {
        assert_eq!(det_degree_triangular(&SkewMatrix::identity(4)).unwrap(), 0);
        let d = SkewMatrix::from_polys(vec![vec![x(3), SkewPoly::zero()], vec![SkewPoly::zero(), x(5)]]).unwrap();
        assert_eq!(det_degree_triangular(&d).unwrap(), 8);
        let sing = SkewMatrix::from_polys(vec![vec![x(3), x(1)], vec![SkewPoly::zero(), SkewPoly::zero()]]).unwrap();
        assert_eq!(det_degree_triangular(&sing), Err(Error::SingularTriangular));
        let full = SkewMatrix::from_polys(vec![vec![x(3), x(1)], vec![x(1), x(2)]]).unwrap();
        assert!(matches!(det_degree_triangular(&full), Err(Error::Precondition(_))));
    }

    #[test]
    fn od_of_weighted_basis_example() {
        // ell = 1, gamma = (0, 0), g = x^3, s = x^2
        let m = SkewMatrix::from_polys(vec![vec![SkewPoly::one(), x(2)], vec![SkewPoly::zero(), x(3)]]).unwrap();
        let det = det_degree_triangular(&m).unwrap();
        assert_eq!(det, 3);
        assert_eq!(orthogonality_defect(&m, det).unwrap(), 2);
        let zero_row = SkewMatrix::from_polys(vec![vec![SkewPoly::one(), x(2)], vec![SkewPoly::zero(), SkewPoly::zero()]]).unwrap();
        assert_eq!(orthogonality_defect(&zero_row, 0), Err(Error::NotFullRank));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn ms_reduces_random_triangular(entries in prop::collection::vec(prop::collection::vec(0u64..4, 0..5), 9)) {
            let r = ring();
            let n = 3;
            let mut rows = Vec::new();
            for i in 0..n {
                let mut row = Vec::new();
                for j in 0..n {
                    let e = p(&r, &entries[i * n + j]);
                    row.push(match j.cmp(&i) {
                        std::cmp::Ordering::Less => SkewPoly::zero(),
                        std::cmp::Ordering::Equal if e.is_zero() => SkewPoly::one(),
                        _ => e,
                    });
                }
                rows.push(row);
            }
            let m = SkewMatrix::from_polys(rows).unwrap();
            let det = det_degree_triangular(&m).unwrap();
            let (out, log) = mulders_storjohann(&r, m).unwrap();
            prop_assert!(out.is_weak_popov());
            prop_assert!(log.values_strictly_decrease());
            prop_assert_eq!(out.degree().unwrap(), det);
        }
    }
}
