//! Exact dense linear algebra over Q and the tower K: deterministic RREF,
//! nullspaces, a certified symmetric PSD decision, and intersection of a
//! K-span with Q^n.

use crate::exactnum::{AlgebraicNumber, Field, Rat, SignOracle};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum LinalgError {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Dense row-major matrix with exact entries.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<F: Field> {
    pub r: usize,
    pub c: usize,
    pub e: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zero(r: usize, c: usize) -> Self {
        Matrix {
            r,
            c,
            e: vec![F::zero(); r * c],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix {
            r,
            c,
            e: rows.into_iter().flatten().collect(),
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &F {
        &self.e[i * self.c + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut F {
        &mut self.e[i * self.c + j]
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.e[i * self.c..(i + 1) * self.c]
    }

    pub fn rows_vec(&self) -> Vec<Vec<F>> {
        (0..self.r).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero(self.c, self.r);
        for i in 0..self.r {
            for j in 0..self.c {
                *m.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        m
    }

    pub fn matvec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.c, "matvec dimension mismatch");
        (0..self.r)
            .map(|i| {
                let mut acc = F::zero();
                for j in 0..self.c {
                    let t = self.at(i, j).mul(&v[j]);
                    acc = acc.add(&t);
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.c, o.r, "matmul dimension mismatch");
        let mut m = Self::zero(self.r, o.c);
        for i in 0..self.r {
            for k in 0..self.c {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.c {
                    let t = a.mul(o.at(k, j));
                    let cur = m.at(i, j).add(&t);
                    *m.at_mut(i, j) = cur;
                }
            }
        }
        m
    }

    pub fn is_symmetric(&self) -> bool {
        self.r == self.c
            && (0..self.r).all(|i| (0..i).all(|j| self.at(i, j) == self.at(j, i)))
    }
}

pub fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    assert_eq!(a.len(), b.len());
    let mut acc = F::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        acc = acc.add(&x.mul(y));
    }
    acc
}

/// Deterministic reduced row echelon form. Columns are scanned left to
/// right; the pivot is the first nonzero entry at or below the current row.
/// Returns the reduced matrix and the pivot columns.
pub fn rref<F: Field>(m: &Matrix<F>) -> (Matrix<F>, Vec<usize>) {
    let mut a = m.rows_vec();
    let (rows, cols) = (m.r, m.c);
    let mut piv_cols = Vec::new();
    let mut cur = 0usize;
    for col in 0..cols {
        if cur == rows {
            break;
        }
        let Some(p) = (cur..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(cur, p);
        let inv = a[cur][col].inv();
        for x in a[cur].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..rows {
            if i != cur && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..cols {
                    if a[cur][j].is_zero() {
                        continue;
                    }
                    let t = a[cur][j].mul(&f);
                    a[i][j] = a[i][j].sub(&t);
                }
                F::content_normalize_row(&mut a[i]);
            }
        }
        piv_cols.push(col);
        cur += 1;
    }
    // content normalization may rescale rows; restore unit pivots
    for (k, &col) in piv_cols.iter().enumerate() {
        if !a[k][col].is_zero() && a[k][col] != F::one() {
            let inv = a[k][col].inv();
            for x in a[k].iter_mut() {
                *x = x.mul(&inv);
            }
        }
    }
    (Matrix::from_rows(a), piv_cols)
}

pub fn rank<F: Field>(m: &Matrix<F>) -> usize {
    rref(m).1.len()
}

/// Basis of {v : Mv = 0}; every vector is re-verified by exact
/// multiplication before being returned.
pub fn nullspace<F: Field>(m: &Matrix<F>) -> Vec<Vec<F>> {
    let (r, piv) = rref(m);
    let mut basis = Vec::new();
    let mut is_piv = vec![false; m.c];
    for &c in &piv {
        is_piv[c] = true;
    }
    for free in 0..m.c {
        if is_piv[free] {
            continue;
        }
        let mut v = vec![F::zero(); m.c];
        v[free] = F::one();
        for (k, &pc) in piv.iter().enumerate() {
            v[pc] = r.at(k, free).neg();
        }
        assert!(
            m.matvec(&v).iter().all(|x| x.is_zero()),
            "nullspace vector failed verification"
        );
        basis.push(v);
    }
    basis
}

/// Solve Ax = b. Returns None when inconsistent, else a particular solution
/// (free coordinates zero) and a basis of the homogeneous nullspace.
pub fn solve_affine<F: Field>(
    a: &Matrix<F>,
    b: &[F],
) -> Option<(Vec<F>, Vec<Vec<F>>)> {
    assert_eq!(a.r, b.len(), "rhs length mismatch");
    let mut aug = Matrix::zero(a.r, a.c + 1);
    for i in 0..a.r {
        for j in 0..a.c {
            *aug.at_mut(i, j) = a.at(i, j).clone();
        }
        *aug.at_mut(i, a.c) = b[i].clone();
    }
    let (r, piv) = rref(&aug);
    if piv.contains(&a.c) {
        return None;
    }
    let mut x = vec![F::zero(); a.c];
    for (k, &pc) in piv.iter().enumerate() {
        x[pc] = r.at(k, a.c).clone();
    }
    let ns = nullspace(a);
    debug_assert!(a
        .matvec(&x)
        .iter()
        .zip(b)
        .all(|(l, rr)| l.sub(rr).is_zero()));
    Some((x, ns))
}

/// Positive semidefiniteness decision with an exact certificate either way.
#[derive(Clone, Debug)]
pub enum PsdOutcome<F: Field> {
    Certificate(PsdCertificate<F>),
    Refutation(PsdRefutation<F>),
}

/// Exact symmetric decomposition M = Σ_t d_t ℓ_t ℓ_tᵀ with d_t > 0, plus a
/// kernel basis; rank is the number of pivots.
#[derive(Clone, Debug)]
pub struct PsdCertificate<F: Field> {
    pub rank: usize,
    pub pivots: Vec<(usize, F)>,
    pub cols: Vec<Vec<F>>,
    pub kernel: Vec<Vec<F>>,
}

/// A direction of negative curvature: sign(wᵀ M w) = −1.
#[derive(Clone, Debug)]
pub struct PsdRefutation<F: Field> {
    pub witness: Vec<F>,
}

impl<F: Field> PsdOutcome<F> {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdOutcome::Certificate(_))
    }

    pub fn rank(&self) -> Option<usize> {
        match self {
            PsdOutcome::Certificate(c) => Some(c.rank),
            PsdOutcome::Refutation(_) => None,
        }
    }
}

/// Fix v so that r·v = 0 for each recorded pivot row, walking the pivots in
/// reverse; later pivot rows vanish on earlier pivot columns, so earlier
/// updates never disturb rows already fixed.
fn lift_through_pivots<F: Field>(pivot_rows: &[(usize, F, Vec<F>)], v: &mut [F]) {
    for (p, d, row) in pivot_rows.iter().rev() {
        let s = dot(row, v);
        if !s.is_zero() {
            v[*p] = v[*p].sub(&s.div(d));
        }
    }
}

/// Decide whether a symmetric matrix is PSD by exact symmetric elimination.
///
/// Loop: sweep out kernel rows (zero diagonal, zero row), then pivot on the
/// smallest-index nonzero diagonal. A negative pivot, or an all-zero
/// diagonal with a nonzero off-diagonal entry, yields a witness vector that
/// is lifted back through the recorded pivot rows. A completed elimination
/// yields the exact decomposition M = Σ d_t ℓ_t ℓ_tᵀ.
pub fn psd_decide<F: Field>(
    m: &Matrix<F>,
    oracle: &dyn SignOracle<F>,
) -> Result<PsdOutcome<F>, LinalgError> {
    if !m.is_symmetric() {
        return Err(LinalgError::NotSymmetric);
    }
    let n = m.r;
    let mut s = m.clone();
    let mut processed = vec![false; n];
    let mut pivot_rows: Vec<(usize, F, Vec<F>)> = Vec::new();
    let mut pivots: Vec<(usize, F)> = Vec::new();
    let mut cols: Vec<Vec<F>> = Vec::new();
    let mut kernel: Vec<Vec<F>> = Vec::new();
    let mut done = 0usize;
    while done < n {
        // kernel sweep
        for i in 0..n {
            if !processed[i]
                && s.at(i, i).is_zero()
                && (0..n).all(|j| s.at(i, j).is_zero())
            {
                processed[i] = true;
                done += 1;
                let mut v = vec![F::zero(); n];
                v[i] = F::one();
                lift_through_pivots(&pivot_rows, &mut v);
                assert!(
                    m.matvec(&v).iter().all(|x| x.is_zero()),
                    "kernel vector failed verification"
                );
                kernel.push(v);
            }
        }
        if done == n {
            break;
        }
        // smallest-index nonzero diagonal
        let pivot = (0..n).find(|&i| !processed[i] && !s.at(i, i).is_zero());
        match pivot {
            Some(p) => {
                let d = s.at(p, p).clone();
                if oracle.sign(&d) < 0 {
                    let mut v = vec![F::zero(); n];
                    v[p] = F::one();
                    lift_through_pivots(&pivot_rows, &mut v);
                    return Ok(verify_refutation(m, v, oracle));
                }
                let row: Vec<F> = s.row(p).to_vec();
                let dinv = d.inv();
                let col: Vec<F> = row.iter().map(|x| x.mul(&dinv)).collect();
                // Schur update S <- S - (1/d) r rᵀ zeroes row and column p
                for i in 0..n {
                    if row[i].is_zero() {
                        continue;
                    }
                    let fi = row[i].mul(&dinv);
                    for j in 0..n {
                        if row[j].is_zero() {
                            continue;
                        }
                        let t = fi.mul(&row[j]);
                        let cur = s.at(i, j).sub(&t);
                        *s.at_mut(i, j) = cur;
                    }
                }
                debug_assert!((0..n).all(|j| s.at(p, j).is_zero()));
                pivot_rows.push((p, d.clone(), row));
                pivots.push((p, d));
                cols.push(col);
                processed[p] = true;
                done += 1;
            }
            None => {
                // all remaining diagonals are zero, some row is nonzero:
                // pick the smallest (i, j) with a nonzero entry
                let mut found = None;
                'outer: for i in 0..n {
                    if processed[i] {
                        continue;
                    }
                    for j in i + 1..n {
                        if !processed[j] && !s.at(i, j).is_zero() {
                            found = Some((i, j));
                            break 'outer;
                        }
                    }
                }
                let (i, j) = found.expect("nonzero row must have an off-diagonal entry");
                let c = s.at(i, j).clone();
                let mut v = vec![F::zero(); n];
                v[i] = F::one();
                // vᵀSv = ±2c; choose the sign that makes it negative
                v[j] = if oracle.sign(&c) > 0 {
                    F::one().neg()
                } else {
                    F::one()
                };
                lift_through_pivots(&pivot_rows, &mut v);
                return Ok(verify_refutation(m, v, oracle));
            }
        }
    }
    let cert = PsdCertificate {
        rank: pivots.len(),
        pivots,
        cols,
        kernel,
    };
    verify_certificate(m, &cert);
    Ok(PsdOutcome::Certificate(cert))
}

fn verify_refutation<F: Field>(
    m: &Matrix<F>,
    witness: Vec<F>,
    oracle: &dyn SignOracle<F>,
) -> PsdOutcome<F> {
    let mv = m.matvec(&witness);
    let q = dot(&witness, &mv);
    assert_eq!(oracle.sign(&q), -1, "refutation witness failed verification");
    PsdOutcome::Refutation(PsdRefutation { witness })
}

/// Exact reconstruction check: Σ d_t ℓ_t ℓ_tᵀ = M entrywise.
pub fn verify_certificate<F: Field>(m: &Matrix<F>, cert: &PsdCertificate<F>) {
    let n = m.r;
    let mut acc: Matrix<F> = Matrix::zero(n, n);
    for ((_, d), l) in cert.pivots.iter().zip(&cert.cols) {
        for i in 0..n {
            if l[i].is_zero() {
                continue;
            }
            let di = d.mul(&l[i]);
            for j in 0..n {
                if l[j].is_zero() {
                    continue;
                }
                let t = di.mul(&l[j]);
                let cur = acc.at(i, j).add(&t);
                *acc.at_mut(i, j) = cur;
            }
        }
    }
    assert_eq!(&acc, m, "certificate reconstruction mismatch");
    for v in &cert.kernel {
        assert!(
            m.matvec(v).iter().all(|x| x.is_zero()),
            "certificate kernel vector failed verification"
        );
    }
    assert_eq!(cert.rank, cert.pivots.len());
    assert_eq!(cert.rank + cert.kernel.len(), n);
}

/// Map a K-vector to its 6n rational coordinates, entry-major.
fn expand_k_vector(v: &[AlgebraicNumber]) -> Vec<Rat> {
    let mut out = Vec::with_capacity(6 * v.len());
    for x in v {
        out.extend(x.c.iter().cloned());
    }
    out
}

/// Basis of span_K(B) ∩ Qⁿ, returned over Q.
///
/// A rational vector lies in the real span of B iff it lies in the K-span
/// (the membership system is K-linear), so the real and K intersections
/// agree. The K-span is the Q-span of {γ·v} for γ ranging over the six
/// field basis elements; expanding to Q^{6n} turns membership of a rational
/// vector w into the linear conditions z·ŵ = 0 for z in the nullspace of
/// the expanded row matrix, where ŵ puts w_j at the constant coordinate of
/// entry j.
pub fn rational_intersection(basis: &[Vec<AlgebraicNumber>]) -> Vec<Vec<Rat>> {
    if basis.is_empty() {
        return Vec::new();
    }
    let n = basis[0].len();
    assert!(basis.iter().all(|v| v.len() == n), "ragged basis");
    let mut gens: Vec<Vec<Rat>> = Vec::with_capacity(6 * basis.len());
    for v in basis {
        for bi in 0..6 {
            let mut gamma = AlgebraicNumber::zero();
            gamma.c[bi] = Rat::one();
            let gv: Vec<AlgebraicNumber> = v.iter().map(|x| x.mul(&gamma)).collect();
            gens.push(expand_k_vector(&gv));
        }
    }
    let a = Matrix::from_rows(gens);
    let null = nullspace(&a);
    // conditions on w: Σ_j w_j z[6j] = 0 for every nullspace vector z
    let cond_rows: Vec<Vec<Rat>> = null
        .iter()
        .map(|z| (0..n).map(|j| z[6 * j].clone()).collect())
        .collect();
    let result = if cond_rows.is_empty() {
        // expanded rows span all of Q^{6n}: every rational vector qualifies
        (0..n)
            .map(|i| {
                let mut v = vec![Rat::zero(); n];
                v[i] = Rat::one();
                v
            })
            .collect()
    } else {
        nullspace(&Matrix::from_rows(cond_rows))
    };
    // verify membership of each output in the K-span exactly
    let vt = Matrix::from_rows(
        (0..n)
            .map(|i| basis.iter().map(|v| v[i].clone()).collect())
            .collect(),
    );
    for w in &result {
        let rhs: Vec<AlgebraicNumber> = w.iter().map(AlgebraicNumber::from_rat).collect();
        assert!(
            solve_affine(&vt, &rhs).is_some(),
            "rational_intersection output not in the K-span"
        );
    }
    result
}

/// Serialize a matrix: `rows:`/`cols:` headers then one entry per line in
/// the exactnum textual form.
pub fn matrix_to_text<F: Field>(m: &Matrix<F>) -> String {
    let mut out = format!("rows: {}\ncols: {}\n", m.r, m.c);
    for x in &m.e {
        let k = x.to_tower();
        match k.as_rat() {
            Some(r) => out.push_str(&crate::exactnum::rat_to_string(&r)),
            None => out.push_str(&k.to_text()),
        }
        out.push('\n');
    }
    out
}

pub fn matrix_from_text<F: Field>(text: &str) -> Result<Matrix<F>, LinalgError> {
    let mut rows = None;
    let mut cols = None;
    let mut entries = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(v) = line.strip_prefix("rows:") {
            rows = Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|e| LinalgError::Parse(format!("bad rows: {e}")))?,
            );
        } else if let Some(v) = line.strip_prefix("cols:") {
            cols = Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|e| LinalgError::Parse(format!("bad cols: {e}")))?,
            );
        } else {
            let k = AlgebraicNumber::parse(line).map_err(LinalgError::Parse)?;
            let f = F::from_tower(&k).ok_or_else(|| {
                LinalgError::Parse("tower entry in rational matrix".into())
            })?;
            entries.push(f);
        }
    }
    let (r, c) = match (rows, cols) {
        (Some(r), Some(c)) => (r, c),
        _ => return Err(LinalgError::Parse("missing rows:/cols: headers".into())),
    };
    if entries.len() != r * c {
        return Err(LinalgError::Parse(format!(
            "expected {} entries, found {}",
            r * c,
            entries.len()
        )));
    }
    Ok(Matrix { r, c, e: entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat_i, BetaRoot, Embedding, QSign, K};

    fn mq(rows: &[&[i64]]) -> Matrix<Rat> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat_i(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rref_identity() {
        let m: Matrix<Rat> = Matrix::identity(4);
        let (r, piv) = rref(&m);
        assert_eq!(r, Matrix::identity(4));
        assert_eq!(piv, vec![0, 1, 2, 3]);
    }

    #[test]
    fn rref_tower_rank_one() {
        let a = K::alpha();
        let a2 = a.pow(2);
        let m = Matrix::from_rows(vec![
            vec![a.clone(), K::one()],
            vec![a2, a.clone()],
        ]);
        let (_, piv) = rref(&m);
        assert_eq!(piv.len(), 1);
    }

    #[test]
    fn nullspace_zero_matrix() {
        let m: Matrix<Rat> = Matrix::zero(3, 3);
        assert_eq!(nullspace(&m).len(), 3);
    }

    #[test]
    fn rank_nullity() {
        let m = mq(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        let r = rank(&m);
        let k = nullspace(&m).len();
        assert_eq!(r + k, 3);
        assert_eq!(r, 2);
    }

    #[test]
    fn psd_diag_refutation() {
        let m = mq(&[&[1, 0], &[0, -1]]);
        match psd_decide(&m, &QSign).unwrap() {
            PsdOutcome::Refutation(r) => {
                assert_eq!(r.witness, vec![rat_i(0), rat_i(1)]);
            }
            _ => panic!("expected refutation"),
        }
    }

    #[test]
    fn psd_offdiag_refutation() {
        let m = mq(&[&[0, 1], &[1, 0]]);
        match psd_decide(&m, &QSign).unwrap() {
            PsdOutcome::Refutation(r) => {
                let q = dot(&r.witness, &m.matvec(&r.witness));
                assert!(q < rat_i(0));
            }
            _ => panic!("expected refutation"),
        }
    }

    #[test]
    fn psd_rank_one_certificate() {
        let m = mq(&[&[1, 1], &[1, 1]]);
        match psd_decide(&m, &QSign).unwrap() {
            PsdOutcome::Certificate(c) => {
                assert_eq!(c.rank, 1);
                assert_eq!(c.kernel.len(), 1);
            }
            _ => panic!("expected certificate"),
        }
    }

    #[test]
    fn psd_gram_matrices_certify() {
        // AᵀA is PSD for any A
        let a = mq(&[&[1, 2, 0, -1], &[3, 0, 1, 2], &[1, 1, 1, 1]]);
        let m = a.transpose().mul(&a);
        match psd_decide(&m, &QSign).unwrap() {
            PsdOutcome::Certificate(c) => {
                assert_eq!(c.rank, 3);
                assert_eq!(c.kernel.len(), 1);
            }
            _ => panic!("expected certificate"),
        }
    }

    #[test]
    fn psd_hidden_indefinite() {
        // leading principal minors positive except the last
        let m = mq(&[&[2, 3, 0], &[3, 4, 1], &[0, 1, 1]]);
        match psd_decide(&m, &QSign).unwrap() {
            PsdOutcome::Refutation(r) => {
                let q = dot(&r.witness, &m.matvec(&r.witness));
                assert!(q < rat_i(0));
            }
            _ => panic!("expected refutation"),
        }
    }

    #[test]
    fn psd_over_tower() {
        let emb = Embedding::new(BetaRoot::First);
        let a = K::alpha();
        let m = Matrix::from_rows(vec![
            vec![a.clone(), K::one()],
            vec![K::one(), a.clone()],
        ]);
        // eigenvalues alpha ± 1 > 0
        match psd_decide(&m, &emb).unwrap() {
            PsdOutcome::Certificate(c) => assert_eq!(c.rank, 2),
            _ => panic!("expected certificate"),
        }
        // beta is a root of X^2 + a^2 X + (1-a^2); the matrix of that
        // quadratic's companion bilinear form is indefinite
        let b = K::beta();
        let m2 = Matrix::from_rows(vec![
            vec![b.clone(), K::one()],
            vec![K::one(), b.neg()],
        ]);
        assert!(!psd_decide(&m2, &emb).unwrap().is_psd());
    }

    #[test]
    fn non_symmetric_rejected() {
        let m = mq(&[&[1, 2], &[3, 4]]);
        assert!(matches!(
            psd_decide(&m, &QSign),
            Err(LinalgError::NotSymmetric)
        ));
    }

    #[test]
    fn rational_intersection_examples() {
        let a = K::alpha();
        // span{(a, a)} meets Q^2 in span{(1,1)}
        let b1 = vec![vec![a.clone(), a.clone()]];
        let r1 = rational_intersection(&b1);
        assert_eq!(r1.len(), 1);
        let v = &r1[0];
        assert_eq!(v[0], v[1]);
        assert!(!Field::is_zero(&v[0]));
        // span{(1, a)} meets Q^2 trivially
        let b2 = vec![vec![K::one(), a.clone()]];
        assert!(rational_intersection(&b2).is_empty());
        // full span: basis of Q^2 comes back
        let b3 = vec![
            vec![K::one(), K::zero()],
            vec![K::zero(), a.clone()],
        ];
        assert_eq!(rational_intersection(&b3).len(), 2);
    }

    #[test]
    fn solve_affine_cases() {
        let a = mq(&[&[1, 1], &[0, 1]]);
        let (x, ns) = solve_affine(&a, &[rat_i(3), rat_i(1)]).unwrap();
        assert_eq!(x, vec![rat_i(2), rat_i(1)]);
        assert!(ns.is_empty());
        let sing = mq(&[&[1, 1], &[1, 1]]);
        assert!(solve_affine(&sing, &[rat_i(0), rat_i(1)]).is_none());
        let (_, ns2) = solve_affine(&sing, &[rat_i(2), rat_i(2)]).unwrap();
        assert_eq!(ns2.len(), 1);
    }

    #[test]
    fn matrix_text_roundtrip() {
        let m = mq(&[&[1, -2], &[0, 7]]);
        let t = matrix_to_text(&m);
        let m2: Matrix<Rat> = matrix_from_text(&t).unwrap();
        assert_eq!(m, m2);
        let a = K::alpha();
        let mk = Matrix::from_rows(vec![vec![a.clone(), K::one()], vec![K::zero(), a.pow(2)]]);
        let tk = matrix_to_text(&mk);
        let mk2: Matrix<K> = matrix_from_text(&tk).unwrap();
        assert_eq!(mk, mk2);
        // tower entries refuse to load as rational
        assert!(matrix_from_text::<Rat>(&tk).is_err());
    }
}
