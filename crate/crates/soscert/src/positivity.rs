//! Strict-positivity certification: exact sign enumeration for the zero
//! locus of g, interior rational Gram certificates, and certified interval
//! branch-and-bound over unit-box faces.

use crate::exactnum::{rat_i, AlgebraicNumber, Field, Interval, QSign, Rat};
use crate::gram::{weighted_sos_from_certificate, GramMatrix};
use crate::linalg::{psd_decide, solve_affine, Matrix, PsdCertificate, PsdOutcome};
use crate::multipoly::{monomial_basis, Monomial, MonomialOrder, Polynomial};
use crate::numopt::{
    project_affine_psd, round_gram_to_exact, AffineFloatSpace, FloatSymMatrix, ProjectionConfig,
};
use num::ToPrimitive;
use std::collections::{BTreeMap, VecDeque};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum PositivityError {
    #[error("polynomial is not a nonzero homogeneous form")]
    NotHomogeneous,
    #[error("odd-degree forms change sign")]
    OddDegree,
    #[error("unexpected generator shape: {0}")]
    ShapeMismatch(String),
    #[error("identity failed: {0}")]
    IdentityMismatch(String),
    #[error("no Gram matrix exists on the support basis")]
    NotRepresentable,
    #[error("no positive-definite Gram found: {0}")]
    NotDefinite(String),
    #[error("sign enumeration hit a zero: {0}")]
    EnumerationZero(String),
    #[error("box budget exhausted after {0} boxes")]
    Inconclusive(usize),
    #[error("witness of nonpositivity found: {0}")]
    NotPositive(String),
}

fn support_vars(p: &Polynomial<Rat>) -> Vec<usize> {
    let mut used = vec![false; p.n];
    for m in p.terms.keys() {
        for (i, flag) in used.iter_mut().enumerate() {
            if m.e[i] > 0 {
                *flag = true;
            }
        }
    }
    (0..p.n).filter(|&i| used[i]).collect()
}

// ---------------------------------------------------------------------------
// Sign enumeration for the zero locus of g = Σ qᵢ²

/// The eight evaluations of q₄ on the normalized sign patterns
/// (±1, ±1, ±1, 1), plus the case-split notes. All values nonzero proves
/// g > 0 away from y = 0.
#[derive(Clone, Debug)]
pub struct SignEnumeration {
    pub cases: Vec<([i8; 3], Rat)>,
    pub notes: Vec<String>,
}

/// Exhaust the real zero locus of g = q₁² + q₂² + q₃² + q₄²: the first
/// three force y₀² = y₁² = y₂² = y₃²; if y ≠ 0 every coordinate is
/// nonzero, evenness lets us normalize y₃ = 1, and q₄ is evaluated on the
/// eight remaining sign patterns.
pub fn g_zero_locus(qs: &[Polynomial<Rat>]) -> Result<SignEnumeration, PositivityError> {
    if qs.len() != 4 {
        return Err(PositivityError::ShapeMismatch(format!(
            "expected 4 quadratics, got {}",
            qs.len()
        )));
    }
    let n = qs[0].n;
    if n != 8 {
        return Err(PositivityError::ShapeMismatch(
            "expected the 8-variable ring".into(),
        ));
    }
    // q_i = y_{i-1}^2 - y_3^2 for i = 1..3 (y-block starts at variable 4)
    for (i, q) in qs.iter().take(3).enumerate() {
        let mut expected = Polynomial::zero(n);
        let mut hi = [0u8; 8];
        hi[4 + i] = 2;
        expected.add_term(&Monomial::new(n, &hi), &rat_i(1));
        let mut lo = [0u8; 8];
        lo[7] = 2;
        expected.add_term(&Monomial::new(n, &lo), &rat_i(-1));
        if *q != expected {
            return Err(PositivityError::ShapeMismatch(format!(
                "q{} is not y{}^2 - y3^2",
                i + 1,
                i
            )));
        }
    }
    let q4 = &qs[3];
    if !q4.is_homogeneous() || q4.degree() != 2 {
        return Err(PositivityError::ShapeMismatch("q4 is not a quadratic form".into()));
    }
    if support_vars(q4).iter().any(|&v| v < 4) {
        return Err(PositivityError::ShapeMismatch("q4 involves x-variables".into()));
    }
    let mut cases = Vec::new();
    for s0 in [1i8, -1] {
        for s1 in [1i8, -1] {
            for s2 in [1i8, -1] {
                let mut pt = vec![rat_i(0); 8];
                pt[4] = rat_i(s0 as i64);
                pt[5] = rat_i(s1 as i64);
                pt[6] = rat_i(s2 as i64);
                pt[7] = rat_i(1);
                let v = q4.evaluate(&pt);
                if Field::is_zero(&v) {
                    return Err(PositivityError::EnumerationZero(format!(
                        "q4 vanishes at pattern ({s0}, {s1}, {s2}, 1)"
                    )));
                }
                cases.push(([s0, s1, s2], v));
            }
        }
    }
    let notes = vec![
        "q1 = q2 = q3 = 0 forces y0^2 = y1^2 = y2^2 = y3^2".into(),
        "all |y_i| equal, so y3 = 0 forces y = 0".into(),
        "q4 is even, so normalizing y3 = 1 loses no sign pattern".into(),
        "q4 nonzero on every pattern, hence g > 0 whenever y != 0".into(),
    ];
    Ok(SignEnumeration { cases, notes })
}

// ---------------------------------------------------------------------------
// Interior rational Gram certificates

#[derive(Clone, Debug)]
pub struct InteriorGramConfig {
    pub pocs: ProjectionConfig,
    pub max_denominator: u64,
    pub start: Option<FloatSymMatrix>,
}

impl Default for InteriorGramConfig {
    fn default() -> Self {
        let mut pocs = ProjectionConfig::default();
        pocs.eig_floor = 1e-4;
        InteriorGramConfig {
            pocs,
            max_denominator: 1_000_000,
            start: None,
        }
    }
}

/// A positive-definite rational Gram matrix for p over the degree-d
/// monomials in its support variables, with the exact PSD certificate and
/// the weighted-square decomposition it induces.
#[derive(Clone, Debug)]
pub struct InteriorGram {
    pub basis: Vec<Monomial>,
    pub gram: Matrix<Rat>,
    pub certificate: PsdCertificate<Rat>,
    pub parts: Vec<(Rat, Polynomial<Rat>)>,
    pub min_eig_estimate: f64,
}

fn upper_pairs(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..k {
        for j in i..k {
            out.push((i, j));
        }
    }
    out
}

fn symmetric_from_upper(k: usize, pairs: &[(usize, usize)], u: &[Rat]) -> Matrix<Rat> {
    let mut m = Matrix::zero(k, k);
    for (&(i, j), v) in pairs.iter().zip(u) {
        *m.at_mut(i, j) = v.clone();
        *m.at_mut(j, i) = v.clone();
    }
    m
}

/// Search for a positive-definite rational Gram matrix of p: solve the
/// exact coefficient-matching system, push a float iterate into the PSD
/// interior by alternating projections with an eigenvalue floor, round back
/// to ℚ with exact per-monomial repair, and decide definiteness exactly.
/// Success certifies p > 0 away from 0 in its support variables.
pub fn interior_gram_certificate(
    p: &Polynomial<Rat>,
    cfg: &InteriorGramConfig,
) -> Result<InteriorGram, PositivityError> {
    if p.is_zero() || !p.is_homogeneous() {
        return Err(PositivityError::NotHomogeneous);
    }
    let deg = p.degree();
    if deg % 2 != 0 {
        return Err(PositivityError::OddDegree);
    }
    let d = deg / 2;
    let support = support_vars(p);
    let on_support = |m: &Monomial| (0..p.n).all(|i| m.e[i] == 0 || support.contains(&i));
    let basis: Vec<Monomial> = monomial_basis(p.n, d, MonomialOrder::Lex)
        .into_iter()
        .filter(|m| on_support(m))
        .collect();
    let products: Vec<Monomial> = monomial_basis(p.n, deg, MonomialOrder::Lex)
        .into_iter()
        .filter(|m| on_support(m))
        .collect();
    if p.terms.keys().any(|m| !products.contains(m)) {
        return Err(PositivityError::NotRepresentable);
    }
    let k = basis.len();
    let pairs = upper_pairs(k);
    let mut rows = Vec::with_capacity(products.len());
    let mut rhs = Vec::with_capacity(products.len());
    let index: BTreeMap<Monomial, usize> =
        products.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut row_data = vec![vec![rat_i(0); pairs.len()]; products.len()];
    for (col, &(i, j)) in pairs.iter().enumerate() {
        let m = basis[i].mul(&basis[j]);
        let r = index[&m];
        let mult = if i == j { rat_i(1) } else { rat_i(2) };
        row_data[r][col] = row_data[r][col].clone() + mult;
    }
    for (r, m) in products.iter().enumerate() {
        rows.push(std::mem::take(&mut row_data[r]));
        rhs.push(p.coeff(m));
    }
    let a = Matrix::from_rows(rows);
    let Some((particular, nullspace)) = solve_affine(&a, &rhs) else {
        return Err(PositivityError::NotRepresentable);
    };
    // numeric interior push
    let to_float = |u: &[Rat]| {
        let m = symmetric_from_upper(k, &pairs, u);
        FloatSymMatrix::from_fn(k, |i, j| m.at(i, j).to_f64().unwrap_or(0.0))
    };
    let space = AffineFloatSpace {
        offset: to_float(&particular),
        dirs: nullspace.iter().map(|v| to_float(v)).collect(),
    };
    let res = project_affine_psd(&space, cfg.start.as_ref(), &cfg.pocs);
    let gram = round_gram_to_exact(&res.matrix, &basis, p, cfg.max_denominator);
    match psd_decide(&gram, &QSign) {
        Ok(PsdOutcome::Certificate(cert)) if cert.rank == k => {
            let gm = GramMatrix {
                basis: basis.clone(),
                mat: gram.clone(),
            };
            let parts = weighted_sos_from_certificate(&gm, &cert)
                .map_err(|e| PositivityError::NotDefinite(e.to_string()))?;
            Ok(InteriorGram {
                basis,
                gram,
                certificate: cert,
                parts,
                min_eig_estimate: res.min_eigenvalue,
            })
        }
        Ok(PsdOutcome::Certificate(cert)) => Err(PositivityError::NotDefinite(format!(
            "rounded Gram has rank {} of {}",
            cert.rank, k
        ))),
        Ok(PsdOutcome::Refutation(_)) => Err(PositivityError::NotDefinite(
            "rounded Gram is indefinite".into(),
        )),
        Err(e) => Err(PositivityError::NotDefinite(e.to_string())),
    }
}

// ---------------------------------------------------------------------------
// Certified interval branch-and-bound on unit-box faces

#[derive(Clone, Debug)]
pub struct BnbConfig {
    pub box_budget: usize,
}

impl Default for BnbConfig {
    fn default() -> Self {
        BnbConfig { box_budget: 100_000 }
    }
}

/// A face cover certifying p > 0 on {max |v_i| = 1} over the support
/// variables: every box evaluates to a positive exact lower bound, and the
/// boxes partition the 2k faces.
#[derive(Clone, Debug)]
pub struct BnbCertificate {
    pub support: Vec<usize>,
    pub boxes: Vec<(Vec<Interval>, Rat)>,
    pub boxes_processed: usize,
    pub min_lower_bound: Rat,
}

#[derive(Clone, Debug)]
pub enum BnbOutcome {
    Certified(BnbCertificate),
    /// Interval evaluation proved p ≤ 0 somewhere on this sub-box.
    Counterbox { bounds: Vec<Interval>, value: Interval },
    Inconclusive { boxes_processed: usize },
}

fn box_sort_key(bounds: &[Interval]) -> Vec<Rat> {
    bounds
        .iter()
        .flat_map(|iv| [iv.lo.clone(), iv.hi.clone()])
        .collect()
}

/// Certify strict positivity of a form on the unit-box boundary by
/// breadth-first bisection with exact rational interval arithmetic.
/// Homogeneity extends the conclusion to every nonzero point of the
/// support-variable space.
pub fn interval_bnb(p: &Polynomial<Rat>, cfg: &BnbConfig) -> BnbOutcome {
    assert!(!p.is_zero() && p.is_homogeneous(), "need a nonzero form");
    let support = support_vars(p);
    let mut queue: VecDeque<Vec<Interval>> = VecDeque::new();
    for &v in &support {
        for sign in [1i64, -1] {
            let bounds: Vec<Interval> = (0..p.n)
                .map(|i| {
                    if i == v {
                        Interval::point(rat_i(sign))
                    } else if support.contains(&i) {
                        Interval::new(rat_i(-1), rat_i(1))
                    } else {
                        Interval::point(rat_i(0))
                    }
                })
                .collect();
            queue.push_back(bounds);
        }
    }
    let mut certified: Vec<(Vec<Interval>, Rat)> = Vec::new();
    let mut processed = 0usize;
    while let Some(bounds) = queue.pop_front() {
        processed += 1;
        if processed > cfg.box_budget {
            return BnbOutcome::Inconclusive {
                boxes_processed: processed,
            };
        }
        let v = p.eval_interval(&bounds);
        if v.lo > rat_i(0) {
            certified.push((bounds, v.lo));
            continue;
        }
        if v.hi < rat_i(0) {
            return BnbOutcome::Counterbox { bounds, value: v };
        }
        // split the widest edge; a zero-width box evaluates exactly, so a
        // straddling zero-width value is a genuine zero on the face
        let widest = support
            .iter()
            .copied()
            .max_by(|&a, &b| bounds[a].width().cmp(&bounds[b].width()))
            .expect("nonempty support");
        if Field::is_zero(&bounds[widest].width()) {
            return BnbOutcome::Counterbox { bounds, value: v };
        }
        let mid = bounds[widest].mid();
        let mut left = bounds.clone();
        left[widest] = Interval::new(bounds[widest].lo.clone(), mid.clone());
        let mut right = bounds;
        right[widest] = Interval::new(mid, right[widest].hi.clone());
        queue.push_back(left);
        queue.push_back(right);
    }
    certified.sort_by(|(a, _), (b, _)| box_sort_key(a).cmp(&box_sort_key(b)));
    let min_lower_bound = certified
        .iter()
        .map(|(_, lo)| lo.clone())
        .min()
        .expect("at least one face");
    BnbOutcome::Certified(BnbCertificate {
        support,
        boxes: certified,
        boxes_processed: processed,
        min_lower_bound,
    })
}

/// Independent re-check of a face-cover certificate: every box sits inside
/// its face, evaluates to the recorded positive bound, per-face volumes sum
/// to the full face measure, and (for covers of moderate size) boxes have
/// pairwise disjoint interiors.
pub fn verify_bnb_certificate(p: &Polynomial<Rat>, cert: &BnbCertificate) -> bool {
    let support = support_vars(p);
    if cert.support != support {
        return false;
    }
    let k = support.len();
    let one = rat_i(1);
    for (bounds, lo) in &cert.boxes {
        if bounds.len() != p.n {
            return false;
        }
        let v = p.eval_interval(bounds);
        if v.lo != *lo || *lo <= rat_i(0) {
            return false;
        }
        for (i, iv) in bounds.iter().enumerate() {
            if support.contains(&i) {
                if iv.lo < -one.clone() || iv.hi > one {
                    return false;
                }
            } else if !Field::is_zero(&iv.lo) || !Field::is_zero(&iv.hi) {
                return false;
            }
        }
    }
    // group by pinned face and compare exact volumes
    let face_volume = crate::exactnum::pow_rat(&rat_i(2), (k as u32).saturating_sub(1));
    for &v in &support {
        for sign in [1i64, -1] {
            let pin = rat_i(sign);
            let members: Vec<&(Vec<Interval>, Rat)> = cert
                .boxes
                .iter()
                .filter(|(b, _)| b[v].lo == pin && b[v].hi == pin)
                .collect();
            let mut vol = rat_i(0);
            for (b, _) in &members {
                let mut w = rat_i(1);
                for &u in &support {
                    if u != v {
                        w *= b[u].width();
                    }
                }
                vol += w;
            }
            if vol != face_volume {
                return false;
            }
            if members.len() <= 20_000 {
                for i in 0..members.len() {
                    for j in (i + 1)..members.len() {
                        let (a, _) = members[i];
                        let (b, _) = members[j];
                        let overlap = support.iter().all(|&u| {
                            u == v || (a[u].lo < b[u].hi && b[u].lo < a[u].hi)
                        });
                        if overlap {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// The composite strict-positivity argument for h = f + g + r²

#[derive(Clone, Debug)]
pub struct StrictPositivity {
    pub signs: SignEnumeration,
    pub r_at_y_zero: Polynomial<Rat>,
    pub f_restricted: Polynomial<Rat>,
    pub bnb: BnbCertificate,
    pub gram: Option<InteriorGram>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Default)]
pub struct StrictPositivityConfig {
    pub bnb: BnbConfig,
    pub gram: InteriorGramConfig,
}

/// The three-step strict-positivity proof of h = f + Σ qᵢ² + r²:
/// g > 0 off y = 0 (sign enumeration), r(x, 0) = x₂², and the restriction
/// f[x₂ := 0] is strictly positive (certified face cover, with an interior
/// Gram certificate as corroboration when available). f itself is a sum of
/// squares over the tower, hence nonnegative under any real embedding.
pub fn strict_positivity_chain(
    h: &Polynomial<Rat>,
    f: &Polynomial<Rat>,
    ps: &[Polynomial<AlgebraicNumber>],
    qs: &[Polynomial<Rat>],
    r: &Polynomial<Rat>,
    cfg: &StrictPositivityConfig,
) -> Result<StrictPositivity, PositivityError> {
    // h = f + Σ q² + r²
    let mut rebuilt = f.clone();
    for q in qs {
        rebuilt = rebuilt.add(&q.mul(q));
    }
    rebuilt = rebuilt.add(&r.mul(r));
    if rebuilt != *h {
        return Err(PositivityError::IdentityMismatch(
            "h != f + sum q_i^2 + r^2".into(),
        ));
    }
    // f = Σ p² over the tower, so f ≥ 0 pointwise under a real embedding
    let mut fsum = Polynomial::<AlgebraicNumber>::zero(f.n);
    for p in ps {
        fsum = fsum.add(&p.mul(p));
    }
    match fsum.demote() {
        Some(q) if q == *f => {}
        _ => {
            return Err(PositivityError::IdentityMismatch(
                "f != sum p_i^2 over the tower".into(),
            ))
        }
    }
    let signs = g_zero_locus(qs)?;
    // r with the y-block zeroed must be exactly x2^2
    let zeros: BTreeMap<usize, Polynomial<Rat>> =
        (4..8).map(|v| (v, Polynomial::zero(8))).collect();
    let r0 = r.substitute(&zeros);
    let mut x2sq = Polynomial::zero(8);
    x2sq.add_term(&Monomial::new(8, &[0, 0, 2, 0]), &rat_i(1));
    if r0 != x2sq {
        return Err(PositivityError::ShapeMismatch("r(x, 0) != x2^2".into()));
    }
    // the restriction f[x2 := 0]
    let mut x2zero = BTreeMap::new();
    x2zero.insert(2usize, Polynomial::zero(8));
    let f0 = f.substitute(&x2zero);
    let bnb = match interval_bnb(&f0, &cfg.bnb) {
        BnbOutcome::Certified(c) => c,
        BnbOutcome::Counterbox { bounds, .. } => {
            return Err(PositivityError::NotPositive(format!(
                "f[x2:=0] nonpositive on a face box pinned at {:?}",
                bounds.iter().map(|iv| iv.to_f64()).collect::<Vec<_>>()
            )))
        }
        BnbOutcome::Inconclusive { boxes_processed } => {
            return Err(PositivityError::Inconclusive(boxes_processed))
        }
    };
    let gram = interior_gram_certificate(&f0, &cfg.gram).ok();
    let notes = vec![
        "h(v) = 0 forces g(y) = 0, hence y = 0".into(),
        "with y = 0, h = f + x2^4, and f >= 0 as a sum of squares over the tower".into(),
        "f + x2^4 = 0 then forces x2 = 0 and f[x2:=0](x0, x1, x3) = 0".into(),
        "the face cover excludes nonzero zeros of f[x2:=0], so v = 0".into(),
    ];
    Ok(StrictPositivity {
        signs,
        r_at_y_zero: r0,
        f_restricted: f0,
        bnb,
        gram,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multipoly::{default_names, poly_from_text};

    fn pq(s: &str) -> Polynomial<Rat> {
        poly_from_text::<Rat>(s, &default_names(8)).unwrap()
    }

    fn paper_qs() -> Vec<Polynomial<Rat>> {
        vec![
            pq("y0^2 - y3^2"),
            pq("y1^2 - y3^2"),
            pq("y2^2 - y3^2"),
            pq("-y0^2 - y0*y1 - y0*y2 + y0*y3 - y1*y2 + y1*y3 + y2*y3"),
        ]
    }

    #[test]
    fn sign_enumeration_values() {
        let signs = g_zero_locus(&paper_qs()).unwrap();
        assert_eq!(signs.cases.len(), 8);
        let expect: BTreeMap<[i8; 3], i64> = [
            ([1, 1, 1], -1),
            ([1, 1, -1], 1),
            ([1, -1, 1], 1),
            ([1, -1, -1], -1),
            ([-1, 1, 1], 1),
            ([-1, 1, -1], -1),
            ([-1, -1, 1], -1),
            ([-1, -1, -1], -7),
        ]
        .into_iter()
        .collect();
        for (pat, val) in &signs.cases {
            assert_eq!(*val, rat_i(expect[pat]), "pattern {pat:?}");
        }
    }

    #[test]
    fn sign_enumeration_rejects_bad_shape() {
        let mut qs = paper_qs();
        qs[0] = pq("y0^2 - 2*y3^2");
        assert!(matches!(
            g_zero_locus(&qs),
            Err(PositivityError::ShapeMismatch(_))
        ));
        // a q4 that vanishes on a pattern is caught
        let mut qs2 = paper_qs();
        qs2[3] = pq("y0*y1 - y2*y3");
        assert!(matches!(
            g_zero_locus(&qs2),
            Err(PositivityError::EnumerationZero(_))
        ));
    }

    fn f_restricted() -> Polynomial<Rat> {
        pq("40*x0^4 + 8*x0^2*x1^2 + 64*x0^2*x1*x3 + 32*x0^2*x3^2 + 2*x1^4 + 8*x3^4")
    }

    #[test]
    fn interior_gram_on_restriction() {
        let f0 = f_restricted();
        let cert = interior_gram_certificate(&f0, &InteriorGramConfig::default()).unwrap();
        assert_eq!(cert.basis.len(), 6);
        assert_eq!(cert.certificate.rank, 6);
        assert!(cert.certificate.pivots.iter().all(|(_, d)| *d > rat_i(0)));
        // the induced weighted squares recompose f0 exactly
        let mut acc = Polynomial::zero(8);
        for (w, p) in &cert.parts {
            acc = acc.add(&p.mul(p).scale(w));
        }
        assert_eq!(acc, f0);
    }

    #[test]
    fn interior_gram_trivial_square() {
        let p = pq("x0^4 + 2*x0^2*x1^2 + x1^4");
        let cert = interior_gram_certificate(&p, &InteriorGramConfig::default()).unwrap();
        assert_eq!(cert.basis.len(), 3);
        assert_eq!(cert.certificate.rank, 3);
    }

    #[test]
    fn interior_gram_rejects_non_definite() {
        // x0^2 x1^2 is a square but vanishes on two lines: no PD Gram
        let p = pq("x0^2*x1^2");
        assert!(matches!(
            interior_gram_certificate(&p, &InteriorGramConfig::default()),
            Err(PositivityError::NotDefinite(_))
        ));
        // an outright non-SOS form fails too
        assert!(interior_gram_certificate(&pq("x0^2 - x1^2"), &InteriorGramConfig::default())
            .is_err());
    }

    #[test]
    fn bnb_certifies_circle_on_initial_faces() {
        let p = pq("x0^2 + x1^2");
        match interval_bnb(&p, &BnbConfig::default()) {
            BnbOutcome::Certified(c) => {
                assert_eq!(c.boxes_processed, 4);
                assert_eq!(c.boxes.len(), 4);
                assert_eq!(c.min_lower_bound, rat_i(1));
                assert!(verify_bnb_certificate(&p, &c));
                // tampering is caught
                let mut bad = c.clone();
                bad.boxes[0].1 = rat_i(2);
                assert!(!verify_bnb_certificate(&p, &bad));
            }
            other => panic!("expected certification, got {other:?}"),
        }
    }

    #[test]
    fn bnb_finds_counterbox() {
        let p = pq("x0^2 - x1^2");
        match interval_bnb(&p, &BnbConfig::default()) {
            BnbOutcome::Counterbox { bounds, value } => {
                assert!(value.hi < rat_i(0));
                // the witness box pins x1 at ±1 and brackets x0 = 0
                assert_eq!(bounds[1].width(), rat_i(0));
                assert!(bounds[0].contains(&rat_i(0)));
            }
            other => panic!("expected counterbox, got {other:?}"),
        }
    }

    #[test]
    fn bnb_certifies_restriction() {
        let f0 = f_restricted();
        match interval_bnb(&f0, &BnbConfig::default()) {
            BnbOutcome::Certified(c) => {
                assert!(c.min_lower_bound > rat_i(0));
                assert!(c.boxes_processed < 100_000);
                assert!(verify_bnb_certificate(&f0, &c));
            }
            other => panic!("expected certification, got {other:?}"),
        }
    }

    #[test]
    fn chain_on_toy_data() {
        // f = (x0^2 + x1^2)^2 is a single square over the tower; together
        // with the paper's q's and r = x2^2 - y2^2 the chain goes through
        let sq = pq("x0^2 + x1^2");
        let f = sq.mul(&sq);
        let qs = paper_qs();
        let r = pq("x2^2 - y2^2");
        let mut h = f.clone();
        for q in &qs {
            h = h.add(&q.mul(q));
        }
        h = h.add(&r.mul(&r));
        let ps = vec![sq.promote()];
        let cert =
            strict_positivity_chain(&h, &f, &ps, &qs, &r, &StrictPositivityConfig::default())
                .unwrap();
        assert_eq!(cert.r_at_y_zero, pq("x2^2"));
        assert_eq!(cert.f_restricted, f);
        assert!(cert.bnb.min_lower_bound > rat_i(0));
        // breaking the sum identity is caught
        let h_bad = h.add(&pq("x0^4"));
        assert!(matches!(
            strict_positivity_chain(&h_bad, &f, &ps, &qs, &r, &StrictPositivityConfig::default()),
            Err(PositivityError::IdentityMismatch(_))
        ));
    }
}
