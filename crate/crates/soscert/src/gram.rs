//! SOS-cone machinery: Gram matrices, moment functionals and matrices,
//! annihilator constraint spaces, block and kernel restrictions, and the
//! deterministic search for exact PSD moment matrices.

use crate::exactnum::{Embedding, Field, Rat, SignOracle};
use crate::linalg::{psd_decide, rref, Matrix, PsdCertificate, PsdOutcome};
use crate::multipoly::{
    monomial_basis, poly_from_text, Monomial, MonomialOrder, Polynomial,
};
use crate::numopt::{
    project_affine_psd, rationalize, tower_rationalize, AffineFloatSpace, FloatSymMatrix,
    ProjectionConfig, RoundingConfig,
};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum GramError {
    #[error("prescription is inconsistent: {0}")]
    InconsistentBlock(String),
    #[error("constraint system has no solution: {0}")]
    Empty(String),
    #[error("certificate does not match the matrix")]
    CertificateMismatch,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("value outside the functional's domain: {0}")]
    OutOfDomain(String),
}

fn index_map(monos: &[Monomial]) -> BTreeMap<Monomial, usize> {
    monos.iter().enumerate().map(|(i, m)| (*m, i)).collect()
}

/// Linear functional on the degree-2d forms, stored as values on the
/// canonical (lex-descending) monomial listing.
#[derive(Clone, Debug)]
pub struct MomentFunctional<F: Field> {
    pub n: usize,
    pub d: usize,
    pub monos: Vec<Monomial>,
    pub values: Vec<F>,
}

impl<F: Field> MomentFunctional<F> {
    pub fn from_values(n: usize, d: usize, values: Vec<F>) -> Self {
        let monos = monomial_basis(n, 2 * d, MonomialOrder::Lex);
        assert_eq!(values.len(), monos.len(), "functional value count mismatch");
        MomentFunctional { n, d, monos, values }
    }

    pub fn value_of(&self, m: &Monomial) -> Result<F, GramError> {
        let map = index_map(&self.monos);
        map.get(m)
            .map(|&i| self.values[i].clone())
            .ok_or_else(|| GramError::OutOfDomain(format!("{m:?}")))
    }

    /// Exact application to a degree-2d form.
    pub fn apply(&self, p: &Polynomial<F>) -> Result<F, GramError> {
        let map = index_map(&self.monos);
        let mut acc = F::zero();
        for (m, c) in &p.terms {
            let i = map
                .get(m)
                .ok_or_else(|| GramError::OutOfDomain(format!("{m:?}")))?;
            acc = acc.add(&c.mul(&self.values[*i]));
        }
        Ok(acc)
    }
}

/// Moment matrix of a functional over a quadratic monomial basis:
/// entry (i, j) = ℓ(basis_i · basis_j). Hankel-consistent by construction.
#[derive(Clone, Debug)]
pub struct MomentMatrix<F: Field> {
    pub basis: Vec<Monomial>,
    pub mat: Matrix<F>,
}

impl<F: Field> MomentMatrix<F> {
    pub fn from_functional(
        ell: &MomentFunctional<F>,
        basis: &[Monomial],
    ) -> Result<Self, GramError> {
        let map = index_map(&ell.monos);
        let k = basis.len();
        let mut mat = Matrix::zero(k, k);
        for i in 0..k {
            for j in i..k {
                let m = basis[i].mul(&basis[j]);
                let idx = map
                    .get(&m)
                    .ok_or_else(|| GramError::OutOfDomain(format!("{m:?}")))?;
                *mat.at_mut(i, j) = ell.values[*idx].clone();
                *mat.at_mut(j, i) = ell.values[*idx].clone();
            }
        }
        Ok(MomentMatrix {
            basis: basis.to_vec(),
            mat,
        })
    }
}

/// True iff entries agree whenever their basis products coincide.
pub fn hankel_consistent<F: Field>(basis: &[Monomial], mat: &Matrix<F>) -> bool {
    let mut seen: BTreeMap<Monomial, F> = BTreeMap::new();
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            let m = basis[i].mul(&basis[j]);
            match seen.get(&m) {
                Some(v) => {
                    if v != mat.at(i, j) {
                        return false;
                    }
                }
                None => {
                    seen.insert(m, mat.at(i, j).clone());
                }
            }
        }
    }
    true
}

/// Symmetric coefficient matrix A with f = mᵀAm over a monomial basis m.
#[derive(Clone, Debug)]
pub struct GramMatrix<F: Field> {
    pub basis: Vec<Monomial>,
    pub mat: Matrix<F>,
}

/// Exact expansion mᵀAm.
pub fn gram_expand<F: Field>(g: &GramMatrix<F>) -> Polynomial<F> {
    let n = g.basis.first().map(|m| m.n as usize).unwrap_or(1);
    let mut out = Polynomial::zero(n);
    for i in 0..g.basis.len() {
        for j in 0..g.basis.len() {
            let c = g.mat.at(i, j);
            if !c.is_zero() {
                out.add_term(&g.basis[i].mul(&g.basis[j]), c);
            }
        }
    }
    out
}

/// True iff Σ wᵢ pᵢ² = f exactly with every weight strictly positive.
pub fn sos_verify<F: Field>(
    parts: &[(F, Polynomial<F>)],
    f: &Polynomial<F>,
    oracle: &dyn SignOracle<F>,
) -> bool {
    if parts.iter().any(|(w, _)| oracle.sign(w) <= 0) {
        return false;
    }
    let mut acc = Polynomial::zero(f.n);
    for (w, p) in parts {
        acc = acc.add(&p.mul(p).scale(w));
    }
    acc == *f
}

/// Turn an exact PSD certificate of a Gram matrix into the weighted squares
/// Σ dᵢ ℓᵢ² = mᵀAm, where ℓᵢ contracts the certificate column with the
/// basis. The identity is re-verified exactly.
pub fn weighted_sos_from_certificate<F: Field>(
    g: &GramMatrix<F>,
    cert: &PsdCertificate<F>,
) -> Result<Vec<(F, Polynomial<F>)>, GramError> {
    let n = g.basis.first().map(|m| m.n as usize).unwrap_or(1);
    if cert.cols.iter().any(|c| c.len() != g.basis.len()) {
        return Err(GramError::CertificateMismatch);
    }
    let mut parts = Vec::new();
    for ((_, d), col) in cert.pivots.iter().zip(&cert.cols) {
        let mut p = Polynomial::zero(n);
        for (m, c) in g.basis.iter().zip(col) {
            p.add_term(m, c);
        }
        parts.push((d.clone(), p));
    }
    let expansion = gram_expand(g);
    let mut acc = Polynomial::zero(n);
    for (w, p) in &parts {
        acc = acc.add(&p.mul(p).scale(w));
    }
    if acc != expansion {
        return Err(GramError::CertificateMismatch);
    }
    Ok(parts)
}

/// An affine space of moment functionals, kept as the accumulated exact
/// constraint system plus its deterministic solution (offset with free
/// coordinates zero, direction basis unit at the free columns).
#[derive(Clone, Debug)]
pub struct ConstraintSpace<F: Field> {
    pub n: usize,
    pub d: usize,
    pub monos: Vec<Monomial>,
    rows: Vec<Vec<F>>,
    rhs: Vec<F>,
    pub offset: Vec<F>,
    pub dirs: Vec<Vec<F>>,
    pub free_cols: Vec<usize>,
}

impl<F: Field> ConstraintSpace<F> {
    pub fn dimension(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_linear(&self) -> bool {
        self.offset.iter().all(|x| x.is_zero())
    }

    pub fn functional(&self, coords: &[F]) -> MomentFunctional<F> {
        MomentFunctional {
            n: self.n,
            d: self.d,
            monos: self.monos.clone(),
            values: coords.to_vec(),
        }
    }

    pub fn point(&self, t: &[F]) -> Vec<F> {
        assert_eq!(t.len(), self.dirs.len());
        let mut v = self.offset.clone();
        for (tk, dir) in t.iter().zip(&self.dirs) {
            if tk.is_zero() {
                continue;
            }
            for (vi, di) in v.iter_mut().zip(dir) {
                let add = tk.mul(di);
                *vi = vi.add(&add);
            }
        }
        v
    }

    /// Exact membership test.
    pub fn contains(&self, coords: &[F]) -> bool {
        self.rows
            .iter()
            .zip(&self.rhs)
            .all(|(row, b)| crate::linalg::dot(row, coords) == *b)
    }

    /// Solve the accumulated system: one RREF of the augmented matrix, the
    /// particular solution with free coordinates zero, and the unit-at-free
    /// nullspace basis.
    fn resolve(&mut self) -> Result<(), GramError> {
        let cols = self.monos.len();
        if self.rows.is_empty() {
            self.offset = vec![F::zero(); cols];
            self.dirs = (0..cols)
                .map(|i| {
                    let mut v = vec![F::zero(); cols];
                    v[i] = F::one();
                    v
                })
                .collect();
            self.free_cols = (0..cols).collect();
            return Ok(());
        }
        let mut aug = Vec::with_capacity(self.rows.len());
        for (row, b) in self.rows.iter().zip(&self.rhs) {
            let mut r = row.clone();
            r.push(b.clone());
            aug.push(r);
        }
        let (r, piv) = rref(&Matrix::from_rows(aug));
        if piv.contains(&cols) {
            return Err(GramError::Empty(
                "constraints force an impossible value".into(),
            ));
        }
        // keep only the reduced rows: same solution set, and later
        // with_extra_rows calls re-reduce an already-echelonized block
        self.rows = (0..piv.len())
            .map(|k| r.row(k)[..cols].to_vec())
            .collect();
        self.rhs = (0..piv.len()).map(|k| r.at(k, cols).clone()).collect();
        let mut offset = vec![F::zero(); cols];
        for (k, &pc) in piv.iter().enumerate() {
            offset[pc] = r.at(k, cols).clone();
        }
        let mut is_piv = vec![false; cols];
        for &pc in &piv {
            is_piv[pc] = true;
        }
        let mut dirs = Vec::new();
        let mut free_cols = Vec::new();
        for free in 0..cols {
            if is_piv[free] {
                continue;
            }
            let mut v = vec![F::zero(); cols];
            v[free] = F::one();
            for (k, &pc) in piv.iter().enumerate() {
                v[pc] = r.at(k, free).neg();
            }
            dirs.push(v);
            free_cols.push(free);
        }
        self.offset = offset;
        self.dirs = dirs;
        self.free_cols = free_cols;
        Ok(())
    }

    fn with_extra_rows(
        &self,
        rows: Vec<Vec<F>>,
        rhs: Vec<F>,
    ) -> Result<ConstraintSpace<F>, GramError> {
        let mut out = self.clone();
        out.rows.extend(rows);
        out.rhs.extend(rhs);
        out.resolve()?;
        Ok(out)
    }
}

/// Space of functionals annihilating p·q for every p in `ps` and every
/// monomial q of complementary degree.
pub fn annihilator_space<F: Field>(
    ps: &[Polynomial<F>],
    n: usize,
    d: usize,
) -> ConstraintSpace<F> {
    let monos = monomial_basis(n, 2 * d, MonomialOrder::Lex);
    let map = index_map(&monos);
    let mut rows = Vec::new();
    for p in ps {
        assert!(p.is_homogeneous(), "annihilator generators must be forms");
        let deg = p.degree();
        assert!(deg <= 2 * d, "generator degree exceeds 2d");
        for q in monomial_basis(n, 2 * d - deg, MonomialOrder::Lex) {
            let prod = p.mul_monomial(&q, &F::one());
            let mut row = vec![F::zero(); monos.len()];
            for (m, c) in &prod.terms {
                row[map[m]] = c.clone();
            }
            rows.push(row);
        }
    }
    let nrows = rows.len();
    let mut s = ConstraintSpace {
        n,
        d,
        monos,
        rows,
        rhs: vec![F::zero(); nrows],
        offset: Vec::new(),
        dirs: Vec::new(),
        free_cols: Vec::new(),
    };
    s.resolve().expect("homogeneous system is always consistent");
    s
}

/// Read the value prescribed for each product monomial off a block matrix,
/// rejecting Hankel-inconsistent prescriptions.
fn block_values<F: Field>(
    block: &MomentMatrix<F>,
    label: &str,
) -> Result<BTreeMap<Monomial, F>, GramError> {
    let k = block.basis.len();
    let mut vals: BTreeMap<Monomial, F> = BTreeMap::new();
    for i in 0..k {
        for j in 0..k {
            let m = block.basis[i].mul(&block.basis[j]);
            let v = block.mat.at(i, j);
            match vals.get(&m) {
                Some(old) if old != v => {
                    return Err(GramError::InconsistentBlock(format!(
                        "{label} block entries disagree on a repeated monomial"
                    )))
                }
                Some(_) => {}
                None => {
                    vals.insert(m, v.clone());
                }
            }
        }
    }
    Ok(vals)
}

/// Affine subspace of `s` whose moment matrices agree with the prescribed
/// pure-x and pure-y blocks.
pub fn restrict_blocks<F: Field>(
    s: &ConstraintSpace<F>,
    x_block: &MomentMatrix<F>,
    y_block: &MomentMatrix<F>,
) -> Result<ConstraintSpace<F>, GramError> {
    let map = index_map(&s.monos);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (block, label) in [(x_block, "x"), (y_block, "y")] {
        let vals = block_values(block, label)?;
        for (m, v) in vals {
            let idx = *map
                .get(&m)
                .ok_or_else(|| GramError::OutOfDomain(format!("{m:?}")))?;
            let mut row = vec![F::zero(); s.monos.len()];
            row[idx] = F::one();
            rows.push(row);
            rhs.push(v);
        }
    }
    s.with_extra_rows(rows, rhs)
}

/// Subspace of `s` whose moment matrices over `quad_basis` kill every
/// vector in `vs`.
pub fn kernel_constrained_space<F: Field>(
    s: &ConstraintSpace<F>,
    quad_basis: &[Monomial],
    vs: &[Vec<F>],
) -> Result<ConstraintSpace<F>, GramError> {
    let map = index_map(&s.monos);
    let mut rows = Vec::new();
    for v in vs {
        assert_eq!(v.len(), quad_basis.len(), "kernel vector length mismatch");
        for i in 0..quad_basis.len() {
            let mut row = vec![F::zero(); s.monos.len()];
            for (j, vj) in v.iter().enumerate() {
                if vj.is_zero() {
                    continue;
                }
                let m = quad_basis[i].mul(&quad_basis[j]);
                let idx = *map
                    .get(&m)
                    .ok_or_else(|| GramError::OutOfDomain(format!("{m:?}")))?;
                row[idx] = row[idx].add(vj);
            }
            rows.push(row);
        }
    }
    let nrows = rows.len();
    s.with_extra_rows(rows, vec![F::zero(); nrows])
}

/// Pin individual functional values, e.g. a normalization ℓ(x2⁴) = 1.
pub fn constrain_values<F: Field>(
    s: &ConstraintSpace<F>,
    values: &[(Monomial, F)],
) -> Result<ConstraintSpace<F>, GramError> {
    let map = index_map(&s.monos);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (m, v) in values {
        let idx = *map
            .get(m)
            .ok_or_else(|| GramError::OutOfDomain(format!("{m:?}")))?;
        let mut row = vec![F::zero(); s.monos.len()];
        row[idx] = F::one();
        rows.push(row);
        rhs.push(v.clone());
    }
    s.with_extra_rows(rows, rhs)
}

impl ConstraintSpace<Rat> {
    pub fn promote(&self) -> ConstraintSpace<crate::exactnum::AlgebraicNumber> {
        use crate::exactnum::AlgebraicNumber as K;
        let lift = |v: &Vec<Rat>| -> Vec<K> { v.iter().map(K::from_rat).collect() };
        ConstraintSpace {
            n: self.n,
            d: self.d,
            monos: self.monos.clone(),
            rows: self.rows.iter().map(lift).collect(),
            rhs: self.rhs.iter().map(K::from_rat).collect(),
            offset: lift(&self.offset),
            dirs: self.dirs.iter().map(lift).collect(),
            free_cols: self.free_cols.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FindConfig {
    /// Continued-fraction denominator ladder for the numeric fallback.
    pub denominators: Vec<u64>,
    pub pocs: ProjectionConfig,
    /// Attempt low-height tower rounding when the rational ladder fails.
    pub tower_fallback: bool,
}

impl Default for FindConfig {
    fn default() -> Self {
        FindConfig {
            denominators: vec![1, 10, 100, 1000, 10_000, 1_000_000],
            pocs: ProjectionConfig::default(),
            tower_fallback: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FoundPoint<F: Field> {
    pub coords: Vec<F>,
    pub moment: MomentMatrix<F>,
    pub certificate: PsdCertificate<F>,
    pub candidate_index: usize,
    pub description: String,
}

#[derive(Clone, Debug)]
pub enum FindOutcome<F: Field> {
    Found(Box<FoundPoint<F>>),
    Inconclusive { candidates_tried: usize },
}

fn try_candidate<F: Field>(
    s: &ConstraintSpace<F>,
    quad_basis: &[Monomial],
    coords: Vec<F>,
    oracle: &dyn SignOracle<F>,
    accept: &dyn Fn(&PsdCertificate<F>) -> bool,
    index: usize,
    description: String,
) -> Option<FoundPoint<F>> {
    if !s.contains(&coords) {
        return None;
    }
    let ell = s.functional(&coords);
    let moment = MomentMatrix::from_functional(&ell, quad_basis).ok()?;
    match psd_decide(&moment.mat, oracle) {
        Ok(PsdOutcome::Certificate(cert)) if accept(&cert) => Some(FoundPoint {
            coords,
            moment,
            certificate: cert,
            candidate_index: index,
            description,
        }),
        _ => None,
    }
}

/// Deterministic search for an exact PSD functional in an affine constraint
/// space: the canonical point first, then one step along each direction
/// (+ then −), then rationalizations of an alternating-projection iterate
/// with a growing denominator bound. `accept` filters certificates (e.g. by
/// rank); failure to find is inconclusive, never a refutation.
pub fn find_psd_point<F: Field>(
    s: &ConstraintSpace<F>,
    quad_basis: &[Monomial],
    oracle: &dyn SignOracle<F>,
    to_f64: &dyn Fn(&F) -> f64,
    accept: &dyn Fn(&PsdCertificate<F>) -> bool,
    emb: Option<&Embedding>,
    cfg: &FindConfig,
) -> FindOutcome<F> {
    let mut tried = 0usize;
    let mut index = 0usize;
    // (1) canonical point
    tried += 1;
    if let Some(hit) = try_candidate(
        s,
        quad_basis,
        s.offset.clone(),
        oracle,
        accept,
        index,
        "canonical".into(),
    ) {
        return FindOutcome::Found(Box::new(hit));
    }
    // (2) canonical ± each direction
    for k in 0..s.dirs.len() {
        for sign in [1i64, -1] {
            index += 1;
            tried += 1;
            let step = if sign > 0 {
                s.dirs[k].clone()
            } else {
                s.dirs[k].iter().map(|x| x.neg()).collect()
            };
            let coords: Vec<F> = s
                .offset
                .iter()
                .zip(&step)
                .map(|(o, d)| o.add(d))
                .collect();
            let desc = format!("canonical{}dir{}", if sign > 0 { "+" } else { "-" }, k);
            if let Some(hit) =
                try_candidate(s, quad_basis, coords, oracle, accept, index, desc)
            {
                return FindOutcome::Found(Box::new(hit));
            }
        }
    }
    // (3) numeric fallback: alternating projections, then exact rounding of
    // the free coordinates
    let float_mat = |coords: &[F]| -> Option<FloatSymMatrix> {
        let ell = s.functional(&coords.to_vec());
        let mm = MomentMatrix::from_functional(&ell, quad_basis).ok()?;
        let k = quad_basis.len();
        Some(FloatSymMatrix::from_fn(k, |i, j| to_f64(mm.mat.at(i, j))))
    };
    let Some(offset_f) = float_mat(&s.offset) else {
        return FindOutcome::Inconclusive {
            candidates_tried: tried,
        };
    };
    let dirs_f: Vec<FloatSymMatrix> = s
        .dirs
        .iter()
        .filter_map(|d| float_mat(d))
        .collect();
    if dirs_f.len() != s.dirs.len() {
        return FindOutcome::Inconclusive {
            candidates_tried: tried,
        };
    }
    let space = AffineFloatSpace {
        offset: offset_f,
        dirs: dirs_f,
    };
    let res = project_affine_psd(&space, None, &cfg.pocs);
    // free coordinate values, read off the iterate Hankel-style
    let map = index_map(&s.monos);
    let k = quad_basis.len();
    let mut sums: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for i in 0..k {
        for j in 0..k {
            let m = quad_basis[i].mul(&quad_basis[j]);
            if let Some(&idx) = map.get(&m) {
                let e = sums.entry(idx).or_insert((0.0, 0));
                e.0 += res.matrix.at(i, j);
                e.1 += 1;
            }
        }
    }
    let free_vals: Vec<f64> = s
        .free_cols
        .iter()
        .map(|fc| match sums.get(fc) {
            Some((sum, count)) => sum / *count as f64,
            None => 0.0,
        })
        .collect();
    for &den in &cfg.denominators {
        index += 1;
        tried += 1;
        let t: Vec<F> = free_vals
            .iter()
            .map(|&v| F::from_rat(&rationalize(v, den)))
            .collect();
        let coords = s.point(&t);
        let desc = format!("projection-denominator-{den}");
        if let Some(hit) = try_candidate(s, quad_basis, coords, oracle, accept, index, desc) {
            return FindOutcome::Found(Box::new(hit));
        }
    }
    if cfg.tower_fallback {
        if let Some(e) = emb {
            index += 1;
            tried += 1;
            let rcfg = RoundingConfig::default();
            let t: Option<Vec<F>> = free_vals
                .iter()
                .map(|&v| tower_rationalize(v, e, &rcfg).and_then(|k| F::from_tower(&k)))
                .collect();
            if let Some(t) = t {
                let coords = s.point(&t);
                if let Some(hit) = try_candidate(
                    s,
                    quad_basis,
                    coords,
                    oracle,
                    accept,
                    index,
                    "projection-tower".into(),
                ) {
                    return FindOutcome::Found(Box::new(hit));
                }
            }
        }
    }
    FindOutcome::Inconclusive {
        candidates_tried: tried,
    }
}

/// Boundary membership (the dual obstruction): when ℓ is PSD with
/// ℓ(f) = 0, every exact weighted-SOS decomposition of f must lie inside
/// the kernel of ℓ's moment matrix.
pub fn boundary_membership<F: Field>(
    ell: &MomentFunctional<F>,
    quad_basis: &[Monomial],
    f: &Polynomial<F>,
    parts: &[(F, Polynomial<F>)],
    oracle: &dyn SignOracle<F>,
) -> Result<bool, GramError> {
    if !sos_verify(parts, f, oracle) {
        return Ok(false);
    }
    if !ell.apply(f)?.is_zero() {
        return Ok(false);
    }
    let moment = MomentMatrix::from_functional(ell, quad_basis)?;
    let Ok(PsdOutcome::Certificate(_)) = psd_decide(&moment.mat, oracle) else {
        return Ok(false);
    };
    let map = index_map(quad_basis);
    for (_, p) in parts {
        let mut v = vec![F::zero(); quad_basis.len()];
        for (m, c) in &p.terms {
            let idx = map
                .get(m)
                .ok_or_else(|| GramError::OutOfDomain(format!("{m:?}")))?;
            v[*idx] = c.clone();
        }
        if !moment.mat.matvec(&v).iter().all(|x| x.is_zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn monomial_from_text(s: &str, names: &[String]) -> Result<Monomial, GramError> {
    let p: Polynomial<Rat> =
        poly_from_text(s, names).map_err(GramError::Parse)?;
    if p.terms.len() != 1 {
        return Err(GramError::Parse(format!("not a monomial: {s}")));
    }
    let (m, c) = p.terms.iter().next().unwrap();
    if *c != <Rat as Field>::one() {
        return Err(GramError::Parse(format!("not a monic monomial: {s}")));
    }
    Ok(*m)
}

fn entry_to_text<F: Field>(x: &F) -> String {
    let k = x.to_tower();
    match k.as_rat() {
        Some(r) => crate::exactnum::rat_to_string(&r),
        None => k.to_text(),
    }
}

fn entry_from_text<F: Field>(s: &str) -> Result<F, GramError> {
    let k = crate::exactnum::AlgebraicNumber::parse(s).map_err(GramError::Parse)?;
    F::from_tower(&k).ok_or_else(|| GramError::Parse("tower entry in rational context".into()))
}

/// Serialize a constraint space: variable list, degree, monomial listing,
/// then the offset and direction vectors one entry per line.
pub fn space_to_text<F: Field>(s: &ConstraintSpace<F>, names: &[String]) -> String {
    let mut out = String::new();
    out.push_str(&format!("vars: {}\n", names.join(" ")));
    out.push_str(&format!("degree: {}\n", s.d));
    let mono_names: Vec<String> = s.monos.iter().map(|m| m.to_text(names)).collect();
    out.push_str(&format!("monomials: {}\n", mono_names.join(" ")));
    out.push_str("offset:\n");
    for x in &s.offset {
        out.push_str(&entry_to_text(x));
        out.push('\n');
    }
    out.push_str(&format!("dirs: {}\n", s.dirs.len()));
    for dir in &s.dirs {
        for x in dir {
            out.push_str(&entry_to_text(x));
            out.push('\n');
        }
    }
    out
}

pub fn space_from_text<F: Field>(text: &str) -> Result<(ConstraintSpace<F>, Vec<String>), GramError> {
    let mut names: Option<Vec<String>> = None;
    let mut degree: Option<usize> = None;
    let mut monos: Option<Vec<Monomial>> = None;
    let mut offset: Vec<F> = Vec::new();
    let mut dirs: Vec<Vec<F>> = Vec::new();
    let mut dir_count: Option<usize> = None;
    #[derive(Clone, Copy, PartialEq)]
    enum Mode {
        Header,
        Offset,
        Dirs,
    }
    let mut mode = Mode::Header;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("vars:") {
            names = Some(rest.split_whitespace().map(|s| s.to_string()).collect());
        } else if let Some(rest) = line.strip_prefix("degree:") {
            degree = Some(
                rest.trim()
                    .parse()
                    .map_err(|e| GramError::Parse(format!("bad degree: {e}")))?,
            );
        } else if let Some(rest) = line.strip_prefix("monomials:") {
            let nm = names
                .as_ref()
                .ok_or_else(|| GramError::Parse("monomials before vars".into()))?;
            let mut ms = Vec::new();
            for tok in rest.split_whitespace() {
                ms.push(monomial_from_text(tok, nm)?);
            }
            monos = Some(ms);
        } else if line == "offset:" {
            mode = Mode::Offset;
        } else if let Some(rest) = line.strip_prefix("dirs:") {
            dir_count = Some(
                rest.trim()
                    .parse()
                    .map_err(|e| GramError::Parse(format!("bad dirs count: {e}")))?,
            );
            mode = Mode::Dirs;
        } else {
            let x = entry_from_text::<F>(line)?;
            match mode {
                Mode::Offset => offset.push(x),
                Mode::Dirs => {
                    let width = monos.as_ref().map(|m| m.len()).unwrap_or(0);
                    if dirs.last().map(|d: &Vec<F>| d.len() == width).unwrap_or(true) {
                        dirs.push(Vec::new());
                    }
                    dirs.last_mut().unwrap().push(x);
                }
                Mode::Header => {
                    return Err(GramError::Parse(format!("unexpected entry line: {line}")))
                }
            }
        }
    }
    let names = names.ok_or_else(|| GramError::Parse("missing vars:".into()))?;
    let d = degree.ok_or_else(|| GramError::Parse("missing degree:".into()))?;
    let monos = monos.ok_or_else(|| GramError::Parse("missing monomials:".into()))?;
    if offset.len() != monos.len() {
        return Err(GramError::Parse("offset length mismatch".into()));
    }
    if let Some(dc) = dir_count {
        if dirs.len() != dc {
            return Err(GramError::Parse(format!(
                "expected {dc} dirs, found {}",
                dirs.len()
            )));
        }
    }
    if dirs.iter().any(|v| v.len() != monos.len()) {
        return Err(GramError::Parse("direction length mismatch".into()));
    }
    let n = names.len();
    // rebuild a defining system so membership checks stay available: the
    // space is the solution set of its own orthogonality conditions; store
    // the affine data directly and synthesize rows from the complement
    let mut space = ConstraintSpace {
        n,
        d,
        monos,
        rows: Vec::new(),
        rhs: Vec::new(),
        offset,
        dirs,
        free_cols: Vec::new(),
    };
    synthesize_rows(&mut space);
    Ok((space, names))
}

/// Rebuild a constraint system from affine data: w lies in the space iff
/// z·w = z·offset for every z in the nullspace of the stacked directions
/// (as rows). Used after deserialization, where the original rows are gone.
fn synthesize_rows<F: Field>(space: &mut ConstraintSpace<F>) {
    let cols = space.monos.len();
    if space.dirs.is_empty() {
        // zero-dimensional: pin every coordinate
        space.rows = (0..cols)
            .map(|i| {
                let mut row = vec![F::zero(); cols];
                row[i] = F::one();
                row
            })
            .collect();
        space.rhs = space.offset.clone();
        return;
    }
    let null = crate::linalg::nullspace(&Matrix::from_rows(space.dirs.clone()));
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for z in null {
        rhs.push(crate::linalg::dot(&z, &space.offset));
        rows.push(z);
    }
    space.rows = rows;
    space.rhs = rhs;
    // free columns: recompute from a fresh solve for determinism
    let mut clone = space.clone();
    if clone.resolve().is_ok() {
        space.free_cols = clone.free_cols.clone();
    }
}

/// Serialize a functional: variable list, degree, monomial listing, values.
pub fn functional_to_text<F: Field>(ell: &MomentFunctional<F>, names: &[String]) -> String {
    let mut out = String::new();
    out.push_str(&format!("vars: {}\n", names.join(" ")));
    out.push_str(&format!("degree: {}\n", ell.d));
    let mono_names: Vec<String> = ell.monos.iter().map(|m| m.to_text(names)).collect();
    out.push_str(&format!("monomials: {}\n", mono_names.join(" ")));
    out.push_str("values:\n");
    for x in &ell.values {
        out.push_str(&entry_to_text(x));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat_i, QSign};
    use crate::multipoly::default_names;

    fn pq(s: &str, n: usize) -> Polynomial<Rat> {
        poly_from_text::<Rat>(s, &default_names(n)).unwrap()
    }

    fn quad_basis(n: usize) -> Vec<Monomial> {
        monomial_basis(n, 2, MonomialOrder::Lex)
    }

    #[test]
    fn gram_expand_identity() {
        let basis = quad_basis(4);
        let g: GramMatrix<Rat> = GramMatrix {
            basis: basis.clone(),
            mat: Matrix::identity(10),
        };
        let p = gram_expand(&g);
        assert_eq!(p.num_terms(), 10);
        assert_eq!(p.coeff(&Monomial::new(4, &[4, 0, 0, 0])), rat_i(1));
        assert_eq!(p.coeff(&Monomial::new(4, &[2, 2, 0, 0])), rat_i(1));
        let zero: GramMatrix<Rat> = GramMatrix {
            basis,
            mat: Matrix::zero(10, 10),
        };
        assert!(gram_expand(&zero).is_zero());
    }

    #[test]
    fn sos_verify_cases() {
        let f = pq("x0^4 + 2*x0^2*x1^2 + x1^4", 4);
        let p = pq("x0^2 + x1^2", 4);
        assert!(sos_verify(&[(rat_i(1), p)], &f, &QSign));
        let bad = pq("x0^4 + x1^4", 4);
        assert!(!sos_verify(&[(rat_i(1), pq("x0^2", 4))], &bad, &QSign));
        // nonpositive weight rejected
        assert!(!sos_verify(
            &[(rat_i(-1), pq("x0^2", 4))],
            &pq("x0^4", 4).neg(),
            &QSign
        ));
    }

    #[test]
    fn weighted_sos_roundtrip() {
        let basis = vec![Monomial::new(4, &[2, 0, 0, 0]), Monomial::new(4, &[1, 1, 0, 0])];
        let mut mat = Matrix::<Rat>::zero(2, 2);
        *mat.at_mut(0, 0) = rat_i(4);
        *mat.at_mut(1, 1) = rat_i(9);
        let g = GramMatrix { basis, mat };
        let cert = match psd_decide(&g.mat, &QSign).unwrap() {
            PsdOutcome::Certificate(c) => c,
            _ => panic!("psd"),
        };
        let parts = weighted_sos_from_certificate(&g, &cert).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].0, rat_i(4));
        assert_eq!(parts[0].1, pq("x0^2", 4));
        assert_eq!(parts[1].0, rat_i(9));
        assert_eq!(parts[1].1, pq("x0*x1", 4));
        assert!(sos_verify(&parts, &gram_expand(&g), &QSign));
    }

    #[test]
    fn weighted_sos_rank_one() {
        let basis = vec![Monomial::new(4, &[2, 0, 0, 0]), Monomial::new(4, &[1, 1, 0, 0])];
        let mut mat = Matrix::<Rat>::zero(2, 2);
        *mat.at_mut(0, 0) = rat_i(1);
        *mat.at_mut(0, 1) = rat_i(2);
        *mat.at_mut(1, 0) = rat_i(2);
        *mat.at_mut(1, 1) = rat_i(4);
        let g = GramMatrix { basis, mat };
        let cert = match psd_decide(&g.mat, &QSign).unwrap() {
            PsdOutcome::Certificate(c) => c,
            _ => panic!("psd"),
        };
        let parts = weighted_sos_from_certificate(&g, &cert).unwrap();
        assert_eq!(parts.len(), 1);
        assert!(sos_verify(&parts, &gram_expand(&g), &QSign));
    }

    #[test]
    fn annihilator_dimensions() {
        let s = annihilator_space::<Rat>(&[], 4, 2);
        assert_eq!(s.dimension(), 35);
        // n=2: p = x0^2 forces ell(x0^4)=ell(x0^3 x1)=ell(x0^2 x1^2)=0
        let p = pq("x0^2", 2);
        let s2 = annihilator_space(&[p.clone()], 2, 2);
        assert_eq!(s2.dimension(), 2);
        // invariant: every basis functional annihilates p·q
        for dir in &s2.dirs {
            let ell = s2.functional(dir);
            for q in monomial_basis(2, 2, MonomialOrder::Lex) {
                let pq_poly = p.mul_monomial(&q, &rat_i(1));
                assert!(Field::is_zero(&ell.apply(&pq_poly).unwrap()));
            }
        }
    }

    #[test]
    fn hankel_and_blocks() {
        // functional on n=2, d=2: values over the 5 monomials x0^4..x1^4
        let vals = vec![rat_i(2), rat_i(0), rat_i(1), rat_i(0), rat_i(3)];
        let ell = MomentFunctional::from_values(2, 2, vals);
        let qb = quad_basis(2);
        let mm = MomentMatrix::from_functional(&ell, &qb).unwrap();
        assert!(hankel_consistent(&mm.basis, &mm.mat));
        assert_eq!(*mm.mat.at(0, 2), rat_i(1));
        assert_eq!(*mm.mat.at(1, 1), rat_i(1));
        // corrupt one Hankel pair
        let mut bad = mm.mat.clone();
        *bad.at_mut(1, 1) = rat_i(7);
        assert!(!hankel_consistent(&mm.basis, &bad));
        // a block built from the corrupt matrix is rejected
        let bad_block = MomentMatrix {
            basis: mm.basis.clone(),
            mat: bad,
        };
        let s = annihilator_space::<Rat>(&[], 2, 2);
        assert!(matches!(
            restrict_blocks(&s, &bad_block, &bad_block),
            Err(GramError::InconsistentBlock(_))
        ));
    }

    #[test]
    fn restriction_dimensions() {
        // full dual space of n=2,d=2 is 5-dimensional; prescribing the
        // quadratic block (3x3, 5 distinct products) pins everything
        let s = annihilator_space::<Rat>(&[], 2, 2);
        let vals = vec![rat_i(1), rat_i(0), rat_i(1), rat_i(0), rat_i(1)];
        let ell = MomentFunctional::from_values(2, 2, vals);
        let qb = quad_basis(2);
        let mm = MomentMatrix::from_functional(&ell, &qb).unwrap();
        let empty_block = MomentMatrix {
            basis: Vec::new(),
            mat: Matrix::zero(0, 0),
        };
        let restricted = restrict_blocks(&s, &mm, &empty_block).unwrap();
        assert_eq!(restricted.dimension(), 0);
        assert_eq!(restricted.offset, ell.values);
        // restricting by an implied block changes nothing
        let again = restrict_blocks(&restricted, &mm, &empty_block).unwrap();
        assert_eq!(again.dimension(), 0);
    }

    #[test]
    fn conflicting_value_is_empty() {
        let s = annihilator_space::<Rat>(&[], 2, 2);
        let m = Monomial::new(2, &[4, 0]);
        let s1 = constrain_values(&s, &[(m, rat_i(1))]).unwrap();
        assert_eq!(s1.dimension(), 4);
        assert!(matches!(
            constrain_values(&s1, &[(m, rat_i(2))]),
            Err(GramError::Empty(_))
        ));
    }

    #[test]
    fn kernel_constraint_and_search_order() {
        // n=2, d=1: moment matrix [[l(x0^2), l(x0x1)], [l(x0x1), l(x1^2)]]
        let s = annihilator_space::<Rat>(&[], 2, 1);
        assert_eq!(s.dimension(), 3);
        let pin = constrain_values(
            &s,
            &[
                (Monomial::new(2, &[2, 0]), rat_i(1)),
                (Monomial::new(2, &[0, 2]), rat_i(1)),
            ],
        )
        .unwrap();
        assert_eq!(pin.dimension(), 1);
        let qb = monomial_basis(2, 1, MonomialOrder::Lex);
        let to_f64 = |x: &Rat| num::ToPrimitive::to_f64(x).unwrap();
        // accept any PSD certificate: the canonical point (identity) wins
        let any = |_: &PsdCertificate<Rat>| true;
        match find_psd_point(&pin, &qb, &QSign, &to_f64, &any, None, &FindConfig::default()) {
            FindOutcome::Found(f) => {
                assert_eq!(f.description, "canonical");
                assert_eq!(f.certificate.rank, 2);
            }
            _ => panic!("expected canonical hit"),
        }
        // demand rank 1: the +dir candidate [[1,1],[1,1]] is the first hit
        let rank1 = |c: &PsdCertificate<Rat>| c.rank == 1;
        match find_psd_point(&pin, &qb, &QSign, &to_f64, &rank1, None, &FindConfig::default()) {
            FindOutcome::Found(f) => {
                assert_eq!(f.description, "canonical+dir0");
                assert_eq!(f.certificate.rank, 1);
                assert_eq!(f.certificate.kernel.len(), 1);
            }
            _ => panic!("expected +dir hit"),
        }
        // demanding rank 0 is impossible: honest inconclusive
        let rank0 = |c: &PsdCertificate<Rat>| c.rank == 0;
        assert!(matches!(
            find_psd_point(&pin, &qb, &QSign, &to_f64, &rank0, None, &FindConfig::default()),
            FindOutcome::Inconclusive { .. }
        ));
        // kernel constraint: kill (1, -1); with the pins this forces
        // l(x0x1) = 1, the rank-1 all-ones matrix
        let constrained = kernel_constrained_space(&pin, &qb, &[vec![rat_i(1), rat_i(-1)]]).unwrap();
        assert_eq!(constrained.dimension(), 0);
        assert_eq!(constrained.offset, vec![rat_i(1), rat_i(1), rat_i(1)]);
        // constraining by the zero vector changes nothing
        let unchanged = kernel_constrained_space(&pin, &qb, &[vec![rat_i(0), rat_i(0)]]).unwrap();
        assert_eq!(unchanged.dimension(), pin.dimension());
    }

    #[test]
    fn pocs_fallback_rationalizes() {
        // pin only the off-diagonal l(x0x1) = 1 and leave the diagonal
        // free: the canonical point [[0,1],[1,0]] is indefinite and every
        // one-step candidate fails, so the alternating-projection fallback
        // must run; it converges to the all-ones rank-1 matrix, which the
        // denominator-1 rung rounds to exactly
        let s = annihilator_space::<Rat>(&[], 2, 1);
        let pin = constrain_values(&s, &[(Monomial::new(2, &[1, 1]), rat_i(1))]).unwrap();
        assert_eq!(pin.dimension(), 2);
        let qb = monomial_basis(2, 1, MonomialOrder::Lex);
        let to_f64 = |x: &Rat| num::ToPrimitive::to_f64(x).unwrap();
        let rank1 = |c: &PsdCertificate<Rat>| c.rank == 1;
        match find_psd_point(&pin, &qb, &QSign, &to_f64, &rank1, None, &FindConfig::default()) {
            FindOutcome::Found(f) => {
                assert_eq!(f.description, "projection-denominator-1");
                assert_eq!(f.certificate.rank, 1);
                assert_eq!(f.coords, vec![rat_i(1), rat_i(1), rat_i(1)]);
            }
            _ => panic!("expected the numeric fallback to land"),
        }
    }

    #[test]
    fn boundary_membership_example() {
        // f = x0^4 with its trivial decomposition; ell vanishing on
        // everything but x1^4 is PSD with ell(f) = 0
        let f = pq("x0^4", 2);
        let parts = vec![(rat_i(1), pq("x0^2", 2))];
        let vals = vec![rat_i(0), rat_i(0), rat_i(0), rat_i(0), rat_i(1)];
        let ell = MomentFunctional::from_values(2, 2, vals);
        let qb = quad_basis(2);
        assert!(boundary_membership(&ell, &qb, &f, &parts, &QSign).unwrap());
        // same ell against a decomposition leaning on x1^2: fails
        let g = pq("x1^4", 2);
        let parts2 = vec![(rat_i(1), pq("x1^2", 2))];
        assert!(!boundary_membership(&ell, &qb, &g, &parts2, &QSign).unwrap());
    }

    #[test]
    fn space_text_roundtrip() {
        let s = annihilator_space(&[pq("x0^2", 2)], 2, 2);
        let names = default_names(2);
        let txt = space_to_text(&s, &names);
        let (s2, names2) = space_from_text::<Rat>(&txt).unwrap();
        assert_eq!(names, names2);
        assert_eq!(s.monos, s2.monos);
        assert_eq!(s.offset, s2.offset);
        assert_eq!(s.dirs, s2.dirs);
        // membership carried over
        assert!(s2.contains(&s.point(&[rat_i(2), rat_i(-1)])));
    }
}
