//! End-to-end verification pipeline: embeds the certified constants, runs
//! the staged checks (block f, block g, the combined form h, strict
//! positivity, smoothness, variant experiments), and serializes every stage
//! into a report whose certificate payloads can be re-verified offline.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use num::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::exactnum::{
    rat, rat_i, rat_to_string, AlgebraicNumber, BetaRoot, Embedding, Field, Interval, QSign, Rat,
    SignOracle,
};
use crate::gram::{
    annihilator_space, boundary_membership, constrain_values, find_psd_point, gram_expand,
    hankel_consistent, kernel_constrained_space, restrict_blocks, ConstraintSpace, FindConfig,
    FindOutcome, FoundPoint, GramMatrix, MomentMatrix,
};
use crate::groebner::{modp_probe, projective_smoothness, SmoothnessConfig};
use crate::linalg::{
    matrix_from_text, matrix_to_text, psd_decide, rational_intersection, Matrix, PsdCertificate,
    PsdOutcome,
};
use crate::multipoly::{
    default_names, monomial_basis, poly_from_text, poly_to_text, Monomial, MonomialOrder,
    Polynomial,
};
use crate::numopt::{project_affine_psd, AffineFloatSpace, FloatSymMatrix, ProjectionConfig};
use crate::positivity::{
    interior_gram_certificate, strict_positivity_chain, verify_bnb_certificate, BnbCertificate,
    InteriorGramConfig, PositivityError, StrictPositivityConfig,
};

type K = AlgebraicNumber;

// ---------------------------------------------------------------------------
// Certified constants

const F_TEXT: &str = "40*x0^4 + 8*x0^2*x1^2 + 32*x0^2*x1*x2 + 64*x0^2*x1*x3 + 16*x0^2*x2^2 \
                      + 16*x0^2*x2*x3 + 32*x0^2*x3^2 + 2*x1^4 + 8*x1^2*x2^2 + 8*x1^2*x2*x3 \
                      + 16*x1*x2*x3^2 + 8*x2^2*x3^2 + 8*x3^4";

const P_TEXTS: [&str; 3] = [
    "(-2 + 4*a - 4*a^2)*x0^2 + x1^2 - 2*x1*x2 + 2*x2*x3 - 2*x3^2",
    "(6 - 4*a - 4*a^2)*x0^2 + x1^2 + 2*x1*x2 + 2*x2*x3 + 2*x3^2",
    "(4*a)*x0*x1 + 4*x0*x2 + (4*a^2)*x0*x3",
];

const Q_TEXTS: [&str; 4] = [
    "y0^2 - y3^2",
    "y1^2 - y3^2",
    "y2^2 - y3^2",
    "-y0^2 - y0*y1 - y0*y2 + y0*y3 - y1*y2 + y1*y3 + y2*y3",
];

const R_TEXT: &str = "x2^2 - y2^2";

const S_TEXTS: [&str; 3] = ["x0*y0 + x0*y1", "x1*y0 + x1*y1", "x3*y0 + x3*y1"];

/// Kernel vectors u1..u6 as sparse coordinates over the printed quadratic
/// basis (x0^2, x0x1, x0x2, x0x3, x1^2, x1x2, x1x3, x2^2, x2x3, x3^2).
const U_COORDS: [&[(usize, &str)]; 6] = [
    &[(2, "1"), (3, "-a*b")],
    &[(1, "1"), (3, "a + b")],
    &[(0, "2 - a"), (4, "-1/2*a"), (9, "1")],
    &[(0, "1 - 2*a^2"), (4, "1/2"), (8, "1")],
    &[(0, "2*a + a^2 + 2*b"), (4, "-1/2*a^2"), (6, "1")],
    &[(0, "-a"), (4, "1/2*a"), (5, "1")],
];

/// The 10x10 moment matrix of the unique (up to scale) functional
/// annihilating the q-block, over the printed y-quadratic basis.
const QY_ROWS: [[i64; 10]; 10] = [
    [6, -1, -1, 1, 6, -1, 1, 6, 1, 6],
    [-1, 6, -1, 1, -1, -1, 1, -1, 1, -1],
    [-1, -1, 6, 1, -1, -1, 1, -1, 1, -1],
    [1, 1, 1, 6, 1, 1, -1, 1, -1, 1],
    [6, -1, -1, 1, 6, -1, 1, 6, 1, 6],
    [-1, -1, -1, 1, -1, 6, 1, -1, 1, -1],
    [1, 1, 1, -1, 1, 1, 6, 1, -1, 1],
    [6, -1, -1, 1, 6, -1, 1, 6, 1, 6],
    [1, 1, 1, -1, 1, 1, -1, 1, 6, 1],
    [6, -1, -1, 1, 6, -1, 1, 6, 1, 6],
];

/// All fixed data of the verification target: the three tower quadratics
/// behind f, the rational quadratics behind g, the coupling square r, the
/// kernel vectors, and the printed bases, in both their 4-variable and
/// 8-variable (x0..x3, y0..y3) forms.
pub struct PaperConstants {
    pub root: BetaRoot,
    pub emb: Embedding,
    /// Degree-2 monomials in 4 variables, printed (lex-descending) order.
    pub mx: Vec<Monomial>,
    /// 36 degree-2 monomials in 8 variables: x-quadratics, y-quadratics,
    /// then the mixed products x_i y_j.
    pub mxy: Vec<Monomial>,
    pub p: Vec<Polynomial<K>>,
    pub f4: Polynomial<Rat>,
    pub u: Vec<Vec<K>>,
    pub qy: Matrix<Rat>,
    pub p8: Vec<Polynomial<K>>,
    pub q8: Vec<Polynomial<Rat>>,
    pub r8: Polynomial<Rat>,
    pub s8: Vec<Polynomial<Rat>>,
    pub f8: Polynomial<Rat>,
    pub g8: Polynomial<Rat>,
    pub h8: Polynomial<Rat>,
}

fn lift_x<C: Field>(p: &Polynomial<C>) -> Polynomial<C> {
    assert_eq!(p.n, 4);
    Polynomial::from_terms(
        8,
        p.terms.iter().map(|(m, c)| {
            let mut e = [0u8; 8];
            e[..4].copy_from_slice(&m.e[..4]);
            (Monomial::new(8, &e), c.clone())
        }),
    )
}

/// Restrict a pure-y 8-variable polynomial to 4 variables.
fn project_y(p: &Polynomial<Rat>) -> Polynomial<Rat> {
    assert_eq!(p.n, 8);
    Polynomial::from_terms(
        4,
        p.terms.iter().map(|(m, c)| {
            assert!(m.e[..4].iter().all(|&e| e == 0), "not a pure-y monomial");
            (Monomial::new(4, &m.e[4..8]), c.clone())
        }),
    )
}

impl PaperConstants {
    pub fn new(root: BetaRoot) -> Self {
        let emb = Embedding::new(root);
        let n4 = default_names(4);
        let n8 = default_names(8);
        let mx = monomial_basis(4, 2, MonomialOrder::Lex);
        assert_eq!(mx.len(), 10);
        assert_eq!(mx[0], Monomial::new(4, &[2, 0, 0, 0]));
        assert_eq!(mx[7], Monomial::new(4, &[0, 0, 2, 0]));

        let mut mxy: Vec<Monomial> = mx
            .iter()
            .map(|m| {
                let mut e = [0u8; 8];
                e[..4].copy_from_slice(&m.e[..4]);
                Monomial::new(8, &e)
            })
            .collect();
        mxy.extend(mx.iter().map(|m| {
            let mut e = [0u8; 8];
            e[4..8].copy_from_slice(&m.e[..4]);
            Monomial::new(8, &e)
        }));
        for i in 0..4 {
            for j in 0..4 {
                let mut e = [0u8; 8];
                e[i] = 1;
                e[4 + j] = 1;
                mxy.push(Monomial::new(8, &e));
            }
        }
        assert_eq!(mxy.len(), 36);
        assert_eq!(
            mxy.iter().collect::<BTreeSet<_>>().len(),
            36,
            "printed combined basis has a repeat"
        );

        let p: Vec<Polynomial<K>> = P_TEXTS
            .iter()
            .map(|t| poly_from_text::<K>(t, &n4).expect("p parses"))
            .collect();
        let f4 = poly_from_text::<Rat>(F_TEXT, &n4).expect("f parses");
        let u: Vec<Vec<K>> = U_COORDS
            .iter()
            .map(|entries| {
                let mut v = vec![K::zero(); 10];
                for (idx, text) in entries.iter() {
                    v[*idx] = K::parse(text).expect("u coordinate parses");
                }
                v
            })
            .collect();
        let qy = Matrix::from_rows(
            QY_ROWS
                .iter()
                .map(|row| row.iter().map(|&x| rat_i(x)).collect())
                .collect(),
        );

        let p8: Vec<Polynomial<K>> = p.iter().map(lift_x).collect();
        let q8: Vec<Polynomial<Rat>> = Q_TEXTS
            .iter()
            .map(|t| poly_from_text::<Rat>(t, &n8).expect("q parses"))
            .collect();
        let r8 = poly_from_text::<Rat>(R_TEXT, &n8).expect("r parses");
        let s8: Vec<Polynomial<Rat>> = S_TEXTS
            .iter()
            .map(|t| poly_from_text::<Rat>(t, &n8).expect("s parses"))
            .collect();
        let f8 = lift_x(&f4);
        let mut g8 = Polynomial::zero(8);
        for q in &q8 {
            g8 = g8.add(&q.mul(q));
        }
        let h8 = f8.add(&g8).add(&r8.mul(&r8));

        // load-time integrity: the defining identities of the constants
        let mut fsum = Polynomial::<K>::zero(4);
        for pi in &p {
            fsum = fsum.add(&pi.mul(pi));
        }
        assert_eq!(fsum.demote(), Some(f4.clone()), "f != sum p_i^2");
        assert_eq!(g8.num_terms(), 26);
        assert_eq!(h8.num_terms(), 41);
        assert!(qy.is_symmetric());
        assert!(qy
            .rows_vec()
            .iter()
            .flatten()
            .all(|x| *x == rat_i(6) || *x == rat_i(-1) || *x == rat_i(1)));
        assert!(hankel_consistent(&mx, &qy));

        PaperConstants {
            root,
            emb,
            mx,
            mxy,
            p,
            f4,
            u,
            qy,
            p8,
            q8,
            r8,
            s8,
            f8,
            g8,
            h8,
        }
    }

    /// Coefficient vector of a quadratic over a quadratic basis.
    pub fn coeff_vector<F: Field>(p: &Polynomial<F>, basis: &[Monomial]) -> Vec<F> {
        let mut v = vec![F::zero(); basis.len()];
        for (m, c) in &p.terms {
            let idx = basis
                .iter()
                .position(|b| b == m)
                .expect("monomial outside the quadratic basis");
            v[idx] = c.clone();
        }
        v
    }

    /// u1..u6 padded into the 36-coordinate combined basis.
    pub fn u_padded(&self) -> Vec<Vec<K>> {
        self.u
            .iter()
            .map(|v| {
                let mut w = vec![K::zero(); 36];
                w[..10].clone_from_slice(v);
                w
            })
            .collect()
    }

    /// The 14 printed kernel generators over the combined basis, with the
    /// coupling vector for the given r.
    pub fn kernel_generators(&self, r: &Polynomial<Rat>) -> Vec<Vec<K>> {
        let mut vs = self.u_padded();
        for q in &self.q8 {
            vs.push(Self::coeff_vector(&q.promote(), &self.mxy));
        }
        vs.push(Self::coeff_vector(&r.promote(), &self.mxy));
        for s in &self.s8 {
            vs.push(Self::coeff_vector(&s.promote(), &self.mxy));
        }
        vs
    }
}

// ---------------------------------------------------------------------------
// Report plumbing

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Pass,
    Fail,
    Inconclusive,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub status: StageStatus,
    pub numbers: BTreeMap<String, Value>,
    pub certificate: Value,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub version: String,
    pub verdict: String,
    pub beta_root: String,
    pub timestamp: u64,
    pub stages: Vec<StageRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootPolicy {
    Auto,
    Fixed(BetaRoot),
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub root: RootPolicy,
    pub skip_groebner: bool,
    pub skip_variants: bool,
    /// Bits used when recording isolating enclosures of the tower
    /// generators in the report.
    pub precision_bits: u32,
    /// Overrides the rationalization denominator bounds of the numeric
    /// fallbacks when set.
    pub max_denominator: Option<u64>,
    pub smoothness_timeout: Duration,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            root: RootPolicy::Auto,
            skip_groebner: false,
            skip_variants: false,
            precision_bits: 64,
            max_denominator: None,
            smoothness_timeout: Duration::from_secs(1800),
        }
    }
}

fn find_config(cfg: &PipelineConfig) -> FindConfig {
    let mut fc = FindConfig::default();
    if let Some(d) = cfg.max_denominator {
        fc.denominators.retain(|&x| x <= d);
        if !fc.denominators.contains(&d) {
            fc.denominators.push(d);
        }
    }
    fc
}

fn record(
    name: &str,
    status: StageStatus,
    numbers: BTreeMap<String, Value>,
    certificate: Value,
    t0: Instant,
) -> StageRecord {
    StageRecord {
        name: name.into(),
        status,
        numbers,
        certificate,
        seconds: t0.elapsed().as_secs_f64(),
    }
}

fn fail_rec(name: &str, numbers: BTreeMap<String, Value>, msg: &str, t0: Instant) -> StageRecord {
    record(
        name,
        StageStatus::Fail,
        numbers,
        json!({"kind": "failure", "detail": msg}),
        t0,
    )
}

fn skipped_rec(name: &str, why: &str) -> StageRecord {
    StageRecord {
        name: name.into(),
        status: StageStatus::Skipped,
        numbers: BTreeMap::new(),
        certificate: json!({"kind": "skipped", "detail": why}),
        seconds: 0.0,
    }
}

// text encoding of exact payloads

fn entry_text<F: Field>(x: &F) -> String {
    match x.as_rat() {
        Some(r) => rat_to_string(&r),
        None => x.to_tower().to_text(),
    }
}

fn entry_parse<F: Field>(s: &str) -> Result<F, String> {
    let k = AlgebraicNumber::parse(s)?;
    F::from_tower(&k).ok_or_else(|| format!("tower value {s:?} in a rational context"))
}

fn vectors_to_value<F: Field>(vs: &[Vec<F>]) -> Value {
    if vs.is_empty() {
        return Value::Null;
    }
    Value::String(matrix_to_text(&Matrix::from_rows(vs.to_vec())))
}

fn vectors_from_value<F: Field>(v: &Value) -> Result<Vec<Vec<F>>, String> {
    match v {
        Value::Null => Ok(Vec::new()),
        Value::String(s) => Ok(matrix_from_text::<F>(s)
            .map_err(|e| e.to_string())?
            .rows_vec()),
        _ => Err("expected a matrix string".into()),
    }
}

fn matrix_to_value<F: Field>(m: &Matrix<F>) -> Value {
    Value::String(matrix_to_text(m))
}

fn matrix_from_value<F: Field>(v: &Value) -> Result<Matrix<F>, String> {
    matrix_from_text::<F>(v.as_str().ok_or("expected a matrix string")?)
        .map_err(|e| e.to_string())
}

fn cert_to_value<F: Field>(c: &PsdCertificate<F>) -> Value {
    json!({
        "rank": c.rank,
        "pivots": c.pivots.iter()
            .map(|(i, d)| json!([i, entry_text(d)]))
            .collect::<Vec<_>>(),
        "cols": vectors_to_value(&c.cols),
        "kernel": vectors_to_value(&c.kernel),
    })
}

fn cert_from_value<F: Field>(v: &Value) -> Result<PsdCertificate<F>, String> {
    let rank = v["rank"].as_u64().ok_or("missing rank")? as usize;
    let mut pivots = Vec::new();
    for pair in v["pivots"].as_array().ok_or("missing pivots")? {
        let idx = pair[0].as_u64().ok_or("bad pivot index")? as usize;
        let d = entry_parse::<F>(pair[1].as_str().ok_or("bad pivot value")?)?;
        pivots.push((idx, d));
    }
    Ok(PsdCertificate {
        rank,
        pivots,
        cols: vectors_from_value(&v["cols"])?,
        kernel: vectors_from_value(&v["kernel"])?,
    })
}

fn span_rank<F: Field>(vs: &[Vec<F>]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    crate::linalg::rank(&Matrix::from_rows(vs.to_vec()))
}

/// True iff the two sets generate the same subspace.
fn same_span<F: Field>(a: &[Vec<F>], b: &[Vec<F>]) -> bool {
    let ra = span_rank(a);
    let rb = span_rank(b);
    if ra != rb {
        return false;
    }
    let mut all = a.to_vec();
    all.extend(b.to_vec());
    span_rank(&all) == ra
}

fn scale_matrix<F: Field>(m: &Matrix<F>, s: &F) -> Matrix<F> {
    let mut out = m.clone();
    for x in out.e.iter_mut() {
        *x = x.mul(s);
    }
    out
}

fn promote_matrix(m: &Matrix<Rat>) -> Matrix<K> {
    Matrix::from_rows(
        m.rows_vec()
            .iter()
            .map(|r| r.iter().map(K::from_rat).collect())
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// Stage 1: the block f = p1^2 + p2^2 + p3^2

pub fn stage_block1(
    c: &PaperConstants,
    cfg: &PipelineConfig,
) -> (StageRecord, Option<FoundPoint<K>>) {
    let t0 = Instant::now();
    let mut numbers = BTreeMap::new();

    let mut fsum = Polynomial::<K>::zero(4);
    for p in &c.p {
        fsum = fsum.add(&p.mul(p));
    }
    if fsum.demote().as_ref() != Some(&c.f4) {
        return (
            fail_rec("block1", numbers, "sum of p_i^2 does not reproduce f", t0),
            None,
        );
    }
    numbers.insert("f_terms".into(), json!(c.f4.num_terms()));

    let e = annihilator_space(&c.p, 4, 2);
    numbers.insert("annihilator_dim".into(), json!(e.dimension()));
    if e.dimension() != 8 {
        return (
            fail_rec("block1", numbers, "annihilator space dimension is not 8", t0),
            None,
        );
    }

    let ker = match kernel_constrained_space(&e, &c.mx, &c.u) {
        Ok(s) => s,
        Err(err) => return (fail_rec("block1", numbers, &err.to_string(), t0), None),
    };
    numbers.insert("kernel_constrained_dim".into(), json!(ker.dimension()));
    let x2_4 = Monomial::new(4, &[0, 0, 4, 0]);
    let norm = match constrain_values(&ker, &[(x2_4, K::one())]) {
        Ok(s) => s,
        Err(err) => return (fail_rec("block1", numbers, &err.to_string(), t0), None),
    };
    numbers.insert("normalized_dim".into(), json!(norm.dimension()));

    let accept = |cert: &PsdCertificate<K>| cert.rank == 4;
    let to_f64 = |x: &K| c.emb.to_f64(x);
    let fp = match find_psd_point(
        &norm,
        &c.mx,
        &c.emb,
        &to_f64,
        &accept,
        Some(&c.emb),
        &find_config(cfg),
    ) {
        FindOutcome::Found(b) => *b,
        FindOutcome::Inconclusive { candidates_tried } => {
            numbers.insert("candidates_tried".into(), json!(candidates_tried));
            return (
                record(
                    "block1",
                    StageStatus::Inconclusive,
                    numbers,
                    json!({"kind": "inconclusive",
                           "detail": "no PSD rank-4 point found in the normalized slice"}),
                    t0,
                ),
                None,
            );
        }
    };
    numbers.insert("rank".into(), json!(fp.certificate.rank));
    numbers.insert("kernel_dim".into(), json!(fp.certificate.kernel.len()));
    numbers.insert("candidate_index".into(), json!(fp.candidate_index));

    if fp.certificate.kernel.len() != 6 || !same_span(&fp.certificate.kernel, &c.u) {
        return (
            fail_rec("block1", numbers, "kernel is not exactly span{u1..u6}", t0),
            None,
        );
    }
    let pvecs: Vec<Vec<K>> = c
        .p
        .iter()
        .map(|p| PaperConstants::coeff_vector(p, &c.mx))
        .collect();
    for (i, pv) in pvecs.iter().enumerate() {
        if !fp.moment.mat.matvec(pv).iter().all(|x| x.is_zero()) {
            return (
                fail_rec("block1", numbers, &format!("p{} is not in the kernel", i + 1), t0),
                None,
            );
        }
    }
    // p3 = 4 u1 + 4 alpha u2
    let four = K::from_rat(&rat_i(4));
    let four_alpha = K::alpha().scale(&rat_i(4));
    let combo: Vec<K> = (0..10)
        .map(|j| c.u[0][j].mul(&four).add(&c.u[1][j].mul(&four_alpha)))
        .collect();
    if combo != pvecs[2] {
        return (
            fail_rec("block1", numbers, "p3 != 4 u1 + 4 alpha u2", t0),
            None,
        );
    }
    let rational = rational_intersection(&c.u);
    numbers.insert("rational_kernel_dim".into(), json!(rational.len()));
    if !rational.is_empty() {
        return (
            fail_rec("block1", numbers, "span{u1..u6} meets Q^10 nontrivially", t0),
            None,
        );
    }
    // the normalization pins ell(x2^4) = 1
    if *fp.moment.mat.at(7, 7) != K::one() {
        return (fail_rec("block1", numbers, "normalization lost", t0), None);
    }

    let alpha_iv = c.emb.enclose(&K::alpha(), cfg.precision_bits);
    let beta_iv = c.emb.enclose(&K::beta(), cfg.precision_bits);
    let payload = json!({
        "kind": "block1",
        "moment": matrix_to_value(&fp.moment.mat),
        "certificate": cert_to_value(&fp.certificate),
        "u_vectors": vectors_to_value(&c.u),
        "p_vectors": vectors_to_value(&pvecs),
        "found_at": fp.description,
        "alpha_enclosure": interval_to_value(&alpha_iv),
        "beta_enclosure": interval_to_value(&beta_iv),
    });
    (
        record("block1", StageStatus::Pass, numbers, payload, t0),
        Some(fp),
    )
}

// ---------------------------------------------------------------------------
// Stage 2: the block g = q1^2 + ... + q4^2

pub fn stage_block2(c: &PaperConstants) -> StageRecord {
    let t0 = Instant::now();
    let mut numbers = BTreeMap::new();

    let mut gsum = Polynomial::<Rat>::zero(8);
    for q in &c.q8 {
        gsum = gsum.add(&q.mul(q));
    }
    if gsum != c.g8 {
        return fail_rec("block2", numbers, "sum of q_i^2 does not reproduce g", t0);
    }
    numbers.insert("g_terms".into(), json!(c.g8.num_terms()));
    let ones: Vec<Rat> = (0..8).map(|i| if i < 4 { rat_i(0) } else { rat_i(1) }).collect();
    if c.g8.evaluate(&ones) != rat_i(1) {
        return fail_rec("block2", numbers, "g(1,1,1,1) != 1", t0);
    }

    if !c.qy.is_symmetric() || !hankel_consistent(&c.mx, &c.qy) {
        return fail_rec("block2", numbers, "Q_y is not a moment matrix", t0);
    }
    let cert = match psd_decide(&c.qy, &QSign) {
        Ok(PsdOutcome::Certificate(cert)) => cert,
        Ok(PsdOutcome::Refutation(_)) => {
            return fail_rec("block2", numbers, "Q_y is not PSD", t0)
        }
        Err(e) => return fail_rec("block2", numbers, &e.to_string(), t0),
    };
    numbers.insert("rank".into(), json!(cert.rank));
    numbers.insert("kernel_dim".into(), json!(cert.kernel.len()));
    let expected_pivots: Vec<(usize, Rat)> = vec![
        (0, rat_i(6)),
        (1, rat(35, 6)),
        (2, rat(28, 5)),
        (3, rat(21, 4)),
        (5, rat(14, 3)),
        (6, rat(7, 2)),
    ];
    if cert.rank != 6 || cert.pivots != expected_pivots {
        return fail_rec("block2", numbers, "unexpected LDL pivots for Q_y", t0);
    }
    let qvecs: Vec<Vec<Rat>> = c
        .q8
        .iter()
        .map(|q| PaperConstants::coeff_vector(&project_y(q), &c.mx))
        .collect();
    if !same_span(&cert.kernel, &qvecs) {
        return fail_rec("block2", numbers, "kernel of Q_y is not span{q1..q4}", t0);
    }

    // the pure-y annihilator is one-dimensional and proportional to Q_y
    let qs4: Vec<Polynomial<Rat>> = c.q8.iter().map(project_y).collect();
    let ey = annihilator_space(&qs4, 4, 2);
    numbers.insert("y_annihilator_dim".into(), json!(ey.dimension()));
    if ey.dimension() != 1 {
        return fail_rec("block2", numbers, "pure-y annihilator is not a line", t0);
    }
    let m4 = monomial_basis(4, 4, MonomialOrder::Lex);
    let mut qyvals = vec![rat_i(0); m4.len()];
    for i in 0..10 {
        for j in 0..10 {
            let m = c.mx[i].mul(&c.mx[j]);
            let idx = m4.iter().position(|x| *x == m).unwrap();
            qyvals[idx] = c.qy.at(i, j).clone();
        }
    }
    let gen = &ey.dirs[0];
    let pivot = gen
        .iter()
        .position(|x| !Field::is_zero(x))
        .expect("nonzero generator");
    let lam = qyvals[pivot].clone() / gen[pivot].clone();
    let proportional = gen
        .iter()
        .zip(&qyvals)
        .all(|(gi, qi)| gi.clone() * lam.clone() == *qi);
    if !proportional {
        return fail_rec("block2", numbers, "Q_y is not the annihilator generator", t0);
    }

    let payload = json!({
        "kind": "block2",
        "qy": matrix_to_value(&c.qy),
        "certificate": cert_to_value(&cert),
        "q_vectors": vectors_to_value(&qvecs),
    });
    record("block2", StageStatus::Pass, numbers, payload, t0)
}

// ---------------------------------------------------------------------------
// Stage 3: the combined form h = f + g + r^2

pub fn stage_combined(
    c: &PaperConstants,
    block1: &FoundPoint<K>,
    cfg: &PipelineConfig,
) -> StageRecord {
    let t0 = Instant::now();
    let mut numbers = BTreeMap::new();

    let mut gens: Vec<Polynomial<K>> = c.p8.clone();
    gens.extend(c.q8.iter().map(|q| q.promote()));
    gens.push(c.r8.promote());
    let s70 = annihilator_space(&gens, 8, 2);
    numbers.insert("annihilator_dim".into(), json!(s70.dimension()));
    if s70.dimension() != 70 {
        return fail_rec("combined", numbers, "annihilator dimension is not 70", t0);
    }

    // pure-block prescription: 6 * the block-1 moment matrix and Q_y
    let x_block = MomentMatrix {
        basis: c.mxy[..10].to_vec(),
        mat: scale_matrix(&block1.moment.mat, &K::from_rat(&rat_i(6))),
    };
    let y_block = MomentMatrix {
        basis: c.mxy[10..20].to_vec(),
        mat: promote_matrix(&c.qy),
    };
    let s62 = match restrict_blocks(&s70, &x_block, &y_block) {
        Ok(s) => s,
        Err(e) => return fail_rec("combined", numbers, &e.to_string(), t0),
    };
    numbers.insert("restricted_dim".into(), json!(s62.dimension()));
    if s62.dimension() != 62 {
        return fail_rec("combined", numbers, "block-restricted dimension is not 62", t0);
    }

    let vs = c.kernel_generators(&c.r8);
    let s13 = match kernel_constrained_space(&s62, &c.mxy, &vs) {
        Ok(s) => s,
        Err(e) => return fail_rec("combined", numbers, &e.to_string(), t0),
    };
    numbers.insert("constrained_dim".into(), json!(s13.dimension()));

    let accept = |cert: &PsdCertificate<K>| cert.rank == 22;
    let to_f64 = |x: &K| c.emb.to_f64(x);
    let fp = match find_psd_point(
        &s13,
        &c.mxy,
        &c.emb,
        &to_f64,
        &accept,
        Some(&c.emb),
        &find_config(cfg),
    ) {
        FindOutcome::Found(b) => *b,
        FindOutcome::Inconclusive { candidates_tried } => {
            numbers.insert("candidates_tried".into(), json!(candidates_tried));
            return record(
                "combined",
                StageStatus::Inconclusive,
                numbers,
                json!({"kind": "inconclusive",
                       "detail": "no PSD rank-22 point found in the constrained slice"}),
                t0,
            );
        }
    };
    numbers.insert("rank".into(), json!(fp.certificate.rank));
    numbers.insert("kernel_dim".into(), json!(fp.certificate.kernel.len()));
    numbers.insert("candidate_index".into(), json!(fp.candidate_index));

    if fp.certificate.kernel.len() != 14 || !same_span(&fp.certificate.kernel, &vs) {
        return fail_rec(
            "combined",
            numbers,
            "kernel is not exactly the span of the 14 printed generators",
            t0,
        );
    }

    // the functional annihilates h, and every printed square is in the kernel
    let ell = s13.functional(&fp.coords);
    let h_k = c.h8.promote();
    match ell.apply(&h_k) {
        Ok(v) if v.is_zero() => {}
        _ => return fail_rec("combined", numbers, "ell(h) != 0", t0),
    }
    let mut parts: Vec<(K, Polynomial<K>)> =
        c.p8.iter().map(|p| (K::one(), p.clone())).collect();
    parts.extend(c.q8.iter().map(|q| (K::one(), q.promote())));
    parts.push((K::one(), c.r8.promote()));
    match boundary_membership(&ell, &c.mxy, &h_k, &parts, &c.emb) {
        Ok(true) => {}
        _ => {
            return fail_rec(
                "combined",
                numbers,
                "boundary membership of the tower decomposition failed",
                t0,
            )
        }
    }

    // rationality obstruction
    let rational = rational_intersection(&fp.certificate.kernel);
    numbers.insert("rational_kernel_dim".into(), json!(rational.len()));
    if rational.len() != 8 {
        return fail_rec("combined", numbers, "rational kernel dimension is not 8", t0);
    }
    let qrs: Vec<Vec<Rat>> = vs[6..]
        .iter()
        .map(|v| {
            v.iter()
                .map(|x| x.as_rat().expect("q, r, s vectors are rational"))
                .collect()
        })
        .collect();
    if !same_span(&rational, &qrs) {
        return fail_rec(
            "combined",
            numbers,
            "rational kernel is not span{q1..q4, r, s1..s3}",
            t0,
        );
    }
    if rational.iter().any(|w| !Field::is_zero(&w[0])) {
        return fail_rec(
            "combined",
            numbers,
            "a rational kernel vector involves x0^2",
            t0,
        );
    }
    // support disjointness of the two kernel groups over the printed basis
    let support = |group: &[Vec<K>]| -> BTreeSet<usize> {
        group
            .iter()
            .flat_map(|v| {
                v.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(i, _)| i)
            })
            .collect()
    };
    let u_support = support(&vs[..6]);
    let qrs_support = support(&vs[6..]);
    if u_support.intersection(&qrs_support).count() != 0 {
        return fail_rec("combined", numbers, "kernel group supports overlap", t0);
    }
    if !u_support.contains(&0) || qrs_support.contains(&0) {
        return fail_rec("combined", numbers, "x0^2 support check failed", t0);
    }
    let x0_4 = Monomial::new(8, &[4, 0, 0, 0, 0, 0, 0, 0]);
    if c.h8.coeff(&x0_4) != rat_i(40) {
        return fail_rec("combined", numbers, "x0^4 coefficient of h is not 40", t0);
    }
    numbers.insert("h_x0pow4".into(), json!(40));

    // machine-checked contradiction chain: a rational SOS h = sum g_j^2
    // would put every g_j in ker M (PSD, ell(h) = 0), hence in the rational
    // kernel, whose members all lack x0^2; comparing x0^4 coefficients gives
    // 40 = 0.
    let m330 = monomial_basis(8, 4, MonomialOrder::Lex);
    let h_coeffs: Vec<Rat> = m330.iter().map(|m| c.h8.coeff(m)).collect();

    let payload = json!({
        "kind": "combined",
        "moment": matrix_to_value(&fp.moment.mat),
        "certificate": cert_to_value(&fp.certificate),
        "kernel_generators": vectors_to_value(&vs),
        "rational_kernel": vectors_to_value(&rational),
        "ell": vectors_to_value(&[fp.coords.clone()]),
        "h_coeffs": vectors_to_value(&[h_coeffs]),
        "found_at": fp.description,
    });
    record("combined", StageStatus::Pass, numbers, payload, t0)
}

// ---------------------------------------------------------------------------
// Stage 4: strict positivity of h

fn interval_to_value(iv: &Interval) -> Value {
    json!([rat_to_string(&iv.lo), rat_to_string(&iv.hi)])
}

fn interval_from_value(v: &Value) -> Result<Interval, String> {
    let arr = v.as_array().ok_or("expected [lo, hi]")?;
    let lo = crate::exactnum::parse_rat(arr[0].as_str().ok_or("bad lo")?)?;
    let hi = crate::exactnum::parse_rat(arr[1].as_str().ok_or("bad hi")?)?;
    Ok(Interval::new(lo, hi))
}

fn bnb_to_value(cert: &BnbCertificate) -> Value {
    json!({
        "support": cert.support,
        "boxes": cert.boxes.iter().map(|(bounds, val)| {
            json!({
                "bounds": bounds.iter().map(interval_to_value).collect::<Vec<_>>(),
                "value": rat_to_string(val),
            })
        }).collect::<Vec<_>>(),
        "boxes_processed": cert.boxes_processed,
        "min_lower_bound": rat_to_string(&cert.min_lower_bound),
    })
}

fn bnb_from_value(v: &Value) -> Result<BnbCertificate, String> {
    let support = v["support"]
        .as_array()
        .ok_or("missing support")?
        .iter()
        .map(|x| x.as_u64().map(|u| u as usize).ok_or("bad support index"))
        .collect::<Result<Vec<_>, _>>()?;
    let mut boxes = Vec::new();
    for b in v["boxes"].as_array().ok_or("missing boxes")? {
        let bounds = b["bounds"]
            .as_array()
            .ok_or("missing bounds")?
            .iter()
            .map(interval_from_value)
            .collect::<Result<Vec<_>, _>>()?;
        let val = crate::exactnum::parse_rat(b["value"].as_str().ok_or("bad value")?)?;
        boxes.push((bounds, val));
    }
    Ok(BnbCertificate {
        support,
        boxes,
        boxes_processed: v["boxes_processed"].as_u64().unwrap_or(0) as usize,
        min_lower_bound: crate::exactnum::parse_rat(
            v["min_lower_bound"].as_str().ok_or("missing bound")?,
        )?,
    })
}

pub fn stage_positivity(c: &PaperConstants) -> StageRecord {
    let t0 = Instant::now();
    let mut numbers = BTreeMap::new();
    let n8 = default_names(8);
    let n4 = default_names(4);

    let pcfg = StrictPositivityConfig::default();
    let sp = match strict_positivity_chain(&c.h8, &c.f8, &c.p8, &c.q8, &c.r8, &pcfg) {
        Ok(sp) => sp,
        Err(PositivityError::Inconclusive(boxes)) => {
            numbers.insert("bnb_boxes_processed".into(), json!(boxes));
            return record(
                "positivity",
                StageStatus::Inconclusive,
                numbers,
                json!({"kind": "inconclusive", "detail": "face cover budget exhausted"}),
                t0,
            );
        }
        Err(e) => return fail_rec("positivity", numbers, &e.to_string(), t0),
    };
    numbers.insert("sign_patterns".into(), json!(sp.signs.cases.len()));
    numbers.insert("f0_terms".into(), json!(sp.f_restricted.num_terms()));
    numbers.insert("bnb_boxes".into(), json!(sp.bnb.boxes.len()));
    numbers.insert("bnb_boxes_processed".into(), json!(sp.bnb.boxes_processed));
    numbers.insert(
        "gram_rank".into(),
        json!(sp.gram.as_ref().map(|g| g.certificate.rank).unwrap_or(0)),
    );

    // the zero structure around the origin and the printed real zero of f
    let zeros8 = vec![rat_i(0); 8];
    if c.h8.evaluate(&zeros8) != rat_i(0) {
        return fail_rec("positivity", numbers, "h(0) != 0", t0);
    }
    let witness: Vec<Rat> = [0, 0, 1, 0, 0, 0, 1, 0].iter().map(|&x| rat_i(x)).collect();
    if c.h8.evaluate(&witness) != rat_i(1) {
        return fail_rec("positivity", numbers, "h(0,0,1,0,0,0,1,0) != 1", t0);
    }
    let r2: Vec<Rat> = [0, 0, 1, 0].iter().map(|&x| rat_i(x)).collect();
    if c.f4.evaluate(&r2) != rat_i(0) {
        return fail_rec("positivity", numbers, "f(0,0,1,0) != 0", t0);
    }
    for i in 0..4 {
        if c.f4.partial_derivative(i).evaluate(&r2) != rat_i(0) {
            return fail_rec("positivity", numbers, "grad f at (0,0,1,0) != 0", t0);
        }
    }

    let gram_value = sp.gram.as_ref().map(|g| {
        json!({
            "basis": g.basis.iter().map(|m| m.to_text(&n8)).collect::<Vec<_>>(),
            "gram": matrix_to_value(&g.gram),
            "rank": g.certificate.rank,
            "min_eig_estimate": g.min_eig_estimate,
        })
    });
    let payload = json!({
        "kind": "positivity",
        "h": poly_to_text(&c.h8, &n8),
        "f": poly_to_text(&c.f8, &n8),
        "f4": poly_to_text(&c.f4, &n4),
        "p": c.p.iter().map(|p| poly_to_text(p, &n4)).collect::<Vec<_>>(),
        "q": c.q8.iter().map(|q| poly_to_text(q, &n8)).collect::<Vec<_>>(),
        "r": poly_to_text(&c.r8, &n8),
        "f0": poly_to_text(&sp.f_restricted, &n8),
        "signs": sp.signs.cases.iter().map(|(pat, val)| {
            json!([pat[0], pat[1], pat[2], rat_to_string(val)])
        }).collect::<Vec<_>>(),
        "bnb": bnb_to_value(&sp.bnb),
        "gram": gram_value.unwrap_or(Value::Null),
        "notes": sp.notes,
    });
    record("positivity", StageStatus::Pass, numbers, payload, t0)
}

// ---------------------------------------------------------------------------
// Stage 5: smoothness of {h = 0}

/// Complete-intersection quotient dimensions for eight cubic generators,
/// the central coefficients of (1 + t + t^2)^8.
const CI_DIMS: [(usize, usize); 6] = [
    (3, 112),
    (4, 266),
    (5, 504),
    (6, 784),
    (7, 1016),
    (8, 1107),
];

pub fn stage_smoothness(c: &PaperConstants, cfg: &PipelineConfig) -> StageRecord {
    let t0 = Instant::now();
    let mut numbers = BTreeMap::new();
    let scfg = SmoothnessConfig {
        timeout: Some(cfg.smoothness_timeout),
        ..SmoothnessConfig::default()
    };
    let out = projective_smoothness(&c.h8, 8, &scfg);
    let rep = out.report();
    numbers.insert("max_power".into(), json!(rep.max_power));
    numbers.insert("exact".into(), json!(rep.exact as i64));
    numbers.insert("timed_out".into(), json!(rep.timed_out as i64));
    numbers.insert("basis_size".into(), json!(rep.basis_size));
    for (d, dim) in &rep.quotient_dims {
        numbers.insert(format!("quotient_dim_{d}"), json!(dim));
    }
    if out.is_nonsingular() {
        // would be a stronger result than the budgeted check can deliver;
        // reaching it here means the computation itself misbehaved
        return fail_rec(
            "smoothness",
            numbers,
            "degree-8 run claims nonsingularity, which is impossible at this cap",
            t0,
        );
    }
    let mut notes: Vec<String> = rep.notes.clone();
    if rep.exact {
        if rep.power_by_var.iter().any(|p| p.is_some()) {
            return fail_rec(
                "smoothness",
                numbers,
                "a variable power <= 8 appeared in the Jacobian ideal",
                t0,
            );
        }
        let expect: Vec<(usize, usize)> = CI_DIMS.to_vec();
        if rep.quotient_dims != expect {
            return fail_rec(
                "smoothness",
                numbers,
                "quotient dimensions differ from the complete-intersection pattern",
                t0,
            );
        }
        notes.push(
            "exact degree-8 truncation: no variable power <= 8 lies in the Jacobian ideal"
                .into(),
        );
        notes.push(
            "quotient dimensions match a complete intersection of 8 cubics; the socle \
             degree of such an algebra is 16, so pure powers cannot appear before degree 17"
                .into(),
        );
    } else {
        notes.push("degree-8 truncation timed out; result is evidence only".into());
    }

    // mod-p corroboration (never part of the certification)
    let partials: Vec<Polynomial<Rat>> = (0..8)
        .map(|i| c.h8.partial_derivative(i))
        .filter(|p| !p.is_zero())
        .collect();
    let mut probe_values = Vec::new();
    for prime in [46337u64, 30011] {
        if let Some(probe) = modp_probe(&partials, 8, prime, 5_000_000) {
            numbers.insert(
                format!("probe_{prime}_powers_found"),
                json!(probe.var_powers.iter().filter(|p| p.is_some()).count()),
            );
            if rep.exact && probe.quotient_dims != CI_DIMS.to_vec() {
                return fail_rec(
                    "smoothness",
                    numbers,
                    "mod-p probe disagrees with the exact quotient dimensions",
                    t0,
                );
            }
            probe_values.push(json!({
                "prime": probe.prime,
                "cap": probe.cap,
                "quotient_dims": probe.quotient_dims,
                "var_powers": probe.var_powers,
            }));
        }
    }

    // controls: the Fermat quartic certifies, and f (which has real zeros)
    // must not
    let n4 = default_names(4);
    let fermat = poly_from_text::<Rat>("x0^4 + x1^4 + x2^4 + x3^4", &n4).unwrap();
    let fermat_out = projective_smoothness(&fermat, 3, &scfg);
    let fermat_ok = fermat_out.is_nonsingular()
        && fermat_out
            .report()
            .power_by_var
            .iter()
            .all(|p| *p == Some(3));
    numbers.insert("fermat_nonsingular".into(), json!(fermat_ok as i64));
    if !fermat_ok {
        return fail_rec("smoothness", numbers, "Fermat-quartic control failed", t0);
    }
    let f_out = projective_smoothness(&c.f4, 8, &scfg);
    numbers.insert(
        "f_not_certified".into(),
        json!(!f_out.is_nonsingular() as i64),
    );
    if f_out.is_nonsingular() {
        return fail_rec(
            "smoothness",
            numbers,
            "f was certified nonsingular despite its real zero (0,0,1,0)",
            t0,
        );
    }
    notes.push(
        "control: f itself is not certified, consistent with its real zero (0,0,1,0), \
         a singular point of {f = 0}"
            .into(),
    );

    let payload = json!({
        "kind": "diagnostics",
        "power_by_var": rep.power_by_var,
        "probes": probe_values,
        "notes": notes,
    });
    record("smoothness", StageStatus::Inconclusive, numbers, payload, t0)
}

// ---------------------------------------------------------------------------
// Stage 6: variant experiments for r

pub fn stage_variants(
    c: &PaperConstants,
    block1: Option<&FoundPoint<K>>,
    cfg: &PipelineConfig,
) -> StageRecord {
    let t0 = Instant::now();
    let mut numbers = BTreeMap::new();
    let n8 = default_names(8);
    let mut variant_values = Vec::new();

    // boundary-like variants: exact space dimensions, numeric PSD evidence
    if let Some(fp) = block1 {
        let variants: [(&str, &str, i64); 2] =
            [("x2^2 - y1^2", "v1", 1), ("x2^2 - 2*y2^2", "v2", 4)];
        for (r_text, key, x_scale) in variants {
            let rv = poly_from_text::<Rat>(r_text, &n8).expect("variant r parses");
            let mut gens: Vec<Polynomial<K>> = c.p8.clone();
            gens.extend(c.q8.iter().map(|q| q.promote()));
            gens.push(rv.promote());
            let s70 = annihilator_space(&gens, 8, 2);
            let x_block = MomentMatrix {
                basis: c.mxy[..10].to_vec(),
                mat: scale_matrix(&fp.moment.mat, &K::from_rat(&rat_i(6 * x_scale))),
            };
            let y_block = MomentMatrix {
                basis: c.mxy[10..20].to_vec(),
                mat: promote_matrix(&c.qy),
            };
            let (res_dim, con_dim, pocs) = match restrict_blocks(&s70, &x_block, &y_block) {
                Ok(s62) => {
                    let vs = c.kernel_generators(&rv);
                    match kernel_constrained_space(&s62, &c.mxy, &vs) {
                        Ok(s13) => {
                            let space = embed_moment_space(&s13, &c.mxy, &c.emb);
                            let pr = project_affine_psd(&space, None, &ProjectionConfig::default());
                            (s62.dimension() as i64, s13.dimension() as i64, Some(pr))
                        }
                        Err(_) => (s62.dimension() as i64, -1, None),
                    }
                }
                Err(_) => (-1, -1, None),
            };
            numbers.insert(format!("{key}_annihilator_dim"), json!(s70.dimension()));
            numbers.insert(format!("{key}_restricted_dim"), json!(res_dim));
            numbers.insert(format!("{key}_constrained_dim"), json!(con_dim));
            numbers.insert(format!("{key}_x_scale"), json!(x_scale));
            let mut entry = json!({
                "r": r_text,
                "annihilator_dim": s70.dimension(),
                "restricted_dim": res_dim,
                "constrained_dim": con_dim,
                "x_scale": x_scale,
                "evidence": "numerical evidence only; no exact certificate claimed",
            });
            if let Some(pr) = pocs {
                numbers.insert(format!("{key}_numeric_rank"), json!(pr.estimated_rank));
                entry["numeric_rank"] = json!(pr.estimated_rank);
                entry["numeric_kernel_dim"] = json!(36 - pr.estimated_rank);
                entry["numeric_min_eigenvalue"] = json!(pr.min_eigenvalue);
            }
            variant_values.push(entry);
        }
    } else {
        variant_values.push(json!({
            "evidence": "boundary variants skipped: no block-1 moment matrix available",
        }));
    }

    // interior variant: r = x2^2 + y2^2 admits a positive-definite rational
    // Gram matrix, found numerically and verified exactly
    let rplus = poly_from_text::<Rat>("x2^2 + y2^2", &n8).unwrap();
    let h2 = c.f8.add(&c.g8).add(&rplus.mul(&rplus));
    let basis36 = monomial_basis(8, 2, MonomialOrder::Lex);
    let start = interior_start(c, &rplus, &basis36);
    let icfg = InteriorGramConfig {
        pocs: ProjectionConfig {
            max_iters: 40_000,
            tol: 1e-12,
            relax: 1.9,
            eig_floor: 2e-3,
            rank_threshold_factor: 1e-6,
        },
        max_denominator: cfg.max_denominator.unwrap_or(1000),
        start: Some(start),
    };
    match interior_gram_certificate(&h2, &icfg) {
        Ok(ig) => {
            numbers.insert("interior_rank".into(), json!(ig.certificate.rank));
            numbers.insert("interior_basis".into(), json!(ig.basis.len()));
            let payload = json!({
                "kind": "variants",
                "variants": variant_values,
                "interior": {
                    "r": "x2^2 + y2^2",
                    "h2": poly_to_text(&h2, &n8),
                    "f": poly_to_text(&c.f8, &n8),
                    "g": poly_to_text(&c.g8, &n8),
                    "basis": ig.basis.iter().map(|m| m.to_text(&n8)).collect::<Vec<_>>(),
                    "gram": matrix_to_value(&ig.gram),
                    "rank": ig.certificate.rank,
                    "min_eig_estimate": ig.min_eig_estimate,
                },
            });
            record("variants", StageStatus::Pass, numbers, payload, t0)
        }
        Err(e) => record(
            "variants",
            StageStatus::Inconclusive,
            numbers,
            json!({
                "kind": "variants",
                "variants": variant_values,
                "interior": {"error": e.to_string()},
            }),
            t0,
        ),
    }
}

/// Float moment-matrix image of a constraint space under the embedding.
fn embed_moment_space(
    s: &ConstraintSpace<K>,
    quad_basis: &[Monomial],
    emb: &Embedding,
) -> AffineFloatSpace {
    let map: BTreeMap<&Monomial, usize> = s.monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let k = quad_basis.len();
    let to_mat = |coords: &[K]| {
        FloatSymMatrix::from_fn(k, |i, j| {
            let m = quad_basis[i].mul(&quad_basis[j]);
            emb.to_f64(&coords[map[&m]])
        })
    };
    AffineFloatSpace {
        offset: to_mat(&s.offset),
        dirs: s.dirs.iter().map(|d| to_mat(d)).collect(),
    }
}

/// Warm start for the interior search: the Gram matrix of the known
/// decomposition f + g + r_plus^2 over the lex quadratic basis.
fn interior_start(
    c: &PaperConstants,
    rplus: &Polynomial<Rat>,
    basis: &[Monomial],
) -> FloatSymMatrix {
    let k = basis.len();
    let mut vecs: Vec<Vec<f64>> = Vec::new();
    for p in &c.p8 {
        let v = PaperConstants::coeff_vector(p, basis);
        vecs.push(v.iter().map(|x| c.emb.to_f64(x)).collect());
    }
    for q in &c.q8 {
        let v = PaperConstants::coeff_vector(q, basis);
        vecs.push(v.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect());
    }
    let v = PaperConstants::coeff_vector(rplus, basis);
    vecs.push(v.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect());
    FloatSymMatrix::from_fn(k, |i, j| vecs.iter().map(|v| v[i] * v[j]).sum())
}

// ---------------------------------------------------------------------------
// Orchestration

pub fn full_report(cfg: &PipelineConfig) -> VerificationReport {
    let (consts, rec1, found1) = match cfg.root {
        RootPolicy::Fixed(r) => {
            let c = PaperConstants::new(r);
            let (rec, found) = stage_block1(&c, cfg);
            (c, rec, found)
        }
        RootPolicy::Auto => {
            let c = PaperConstants::new(BetaRoot::First);
            let (rec, found) = stage_block1(&c, cfg);
            if rec.status == StageStatus::Pass {
                (c, rec, found)
            } else {
                let c2 = PaperConstants::new(BetaRoot::Second);
                let (rec2, found2) = stage_block1(&c2, cfg);
                (c2, rec2, found2)
            }
        }
    };
    let block1_pass = rec1.status == StageStatus::Pass;
    let mut stages = vec![rec1];
    stages.push(stage_block2(&consts));
    match (&found1, block1_pass) {
        (Some(fp), true) => stages.push(stage_combined(&consts, fp, cfg)),
        _ => stages.push(skipped_rec(
            "combined",
            "requires the block-1 moment matrix",
        )),
    }
    stages.push(stage_positivity(&consts));
    if cfg.skip_groebner {
        stages.push(skipped_rec("smoothness", "disabled by flag"));
    } else {
        stages.push(stage_smoothness(&consts, cfg));
    }
    if cfg.skip_variants {
        stages.push(skipped_rec("variants", "disabled by flag"));
    } else {
        stages.push(stage_variants(&consts, found1.as_ref(), cfg));
    }

    let verdict = verdict_of(&stages).to_string();
    VerificationReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        verdict,
        beta_root: consts.root.label().to_string(),
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        stages,
    }
}

/// Overall verdict. The smoothness stage is a budgeted sharpening whose
/// inconclusive outcome does not demote the headline result; every other
/// non-skipped stage must pass.
pub fn verdict_of(stages: &[StageRecord]) -> &'static str {
    if stages.iter().any(|s| s.status == StageStatus::Fail) {
        return "fail";
    }
    let blocking = stages.iter().any(|s| {
        s.status == StageStatus::Inconclusive && s.name != "smoothness"
    });
    if blocking {
        "inconclusive"
    } else {
        "pass"
    }
}

pub fn exit_code(verdict: &str) -> i32 {
    match verdict {
        "pass" => 0,
        "fail" => 1,
        _ => 2,
    }
}

/// Deterministic serialization: identical flags give identical bytes once
/// the wall-clock fields are cleared.
pub fn canonical_json(report: &VerificationReport) -> String {
    let mut c = report.clone();
    c.timestamp = 0;
    for s in &mut c.stages {
        s.seconds = 0.0;
    }
    serde_json::to_string_pretty(&c).expect("report serializes")
}

// ---------------------------------------------------------------------------
// Independent re-verification of report payloads

fn parse_root(label: &str) -> Result<BetaRoot, String> {
    match label {
        "first" => Ok(BetaRoot::First),
        "second" => Ok(BetaRoot::Second),
        other => Err(format!("unknown beta root {other:?}")),
    }
}

/// Re-check a PSD decomposition payload: positive pivot weights, exact
/// reconstruction sum, and an exact kernel.
fn check_decomposition<F: Field>(
    m: &Matrix<F>,
    cert: &PsdCertificate<F>,
    oracle: &dyn SignOracle<F>,
) -> Result<(), String> {
    if cert.rank != cert.pivots.len() || cert.rank != cert.cols.len() {
        return Err("certificate shape mismatch".into());
    }
    if cert.rank + cert.kernel.len() != m.r {
        return Err("rank plus kernel dimension misses the matrix size".into());
    }
    let n = m.r;
    let mut acc = Matrix::<F>::zero(n, n);
    for ((_, d), col) in cert.pivots.iter().zip(&cert.cols) {
        if oracle.sign(d) != 1 {
            return Err("nonpositive pivot weight".into());
        }
        for i in 0..n {
            if col[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if col[j].is_zero() {
                    continue;
                }
                let t = d.mul(&col[i]).mul(&col[j]);
                *acc.at_mut(i, j) = acc.at(i, j).add(&t);
            }
        }
    }
    if acc != *m {
        return Err("pivot columns do not reconstruct the matrix".into());
    }
    for k in &cert.kernel {
        if !m.matvec(k).iter().all(|x| x.is_zero()) {
            return Err("a claimed kernel vector is not annihilated".into());
        }
    }
    if span_rank(&cert.kernel) != cert.kernel.len() {
        return Err("kernel vectors are dependent".into());
    }
    Ok(())
}

fn recheck_block1(payload: &Value, emb: &Embedding) -> Result<(), String> {
    let m: Matrix<K> = matrix_from_value(&payload["moment"])?;
    let cert: PsdCertificate<K> = cert_from_value(&payload["certificate"])?;
    let u: Vec<Vec<K>> = vectors_from_value(&payload["u_vectors"])?;
    let p: Vec<Vec<K>> = vectors_from_value(&payload["p_vectors"])?;
    check_decomposition(&m, &cert, emb)?;
    if cert.rank != 4 || cert.kernel.len() != 6 {
        return Err("expected rank 4 with kernel dimension 6".into());
    }
    if u.len() != 6 || !same_span(&cert.kernel, &u) {
        return Err("kernel is not span{u1..u6}".into());
    }
    if p.len() != 3 {
        return Err("expected three p vectors".into());
    }
    for pv in &p {
        if !m.matvec(pv).iter().all(|x| x.is_zero()) {
            return Err("a p vector is outside the kernel".into());
        }
    }
    let four = K::from_rat(&rat_i(4));
    let four_alpha = K::alpha().scale(&rat_i(4));
    let combo: Vec<K> = (0..10)
        .map(|j| u[0][j].mul(&four).add(&u[1][j].mul(&four_alpha)))
        .collect();
    if combo != p[2] {
        return Err("p3 != 4 u1 + 4 alpha u2".into());
    }
    if !rational_intersection(&u).is_empty() {
        return Err("span{u} meets Q^10 nontrivially".into());
    }
    if *m.at(7, 7) != K::one() {
        return Err("normalization ell(x2^4) = 1 lost".into());
    }
    Ok(())
}

fn recheck_block2(payload: &Value) -> Result<(), String> {
    let qy: Matrix<Rat> = matrix_from_value(&payload["qy"])?;
    let cert: PsdCertificate<Rat> = cert_from_value(&payload["certificate"])?;
    let qvecs: Vec<Vec<Rat>> = vectors_from_value(&payload["q_vectors"])?;
    if !qy.is_symmetric() {
        return Err("Q_y is not symmetric".into());
    }
    let mx = monomial_basis(4, 2, MonomialOrder::Lex);
    if !hankel_consistent(&mx, &qy) {
        return Err("Q_y is not Hankel-consistent".into());
    }
    check_decomposition(&qy, &cert, &QSign)?;
    if cert.rank != 6 || cert.kernel.len() != 4 {
        return Err("expected rank 6 with kernel dimension 4".into());
    }
    if qvecs.len() != 4 || !same_span(&cert.kernel, &qvecs) {
        return Err("kernel is not span{q1..q4}".into());
    }
    Ok(())
}

fn recheck_combined(payload: &Value, emb: &Embedding) -> Result<(), String> {
    let m: Matrix<K> = matrix_from_value(&payload["moment"])?;
    let cert: PsdCertificate<K> = cert_from_value(&payload["certificate"])?;
    let gens: Vec<Vec<K>> = vectors_from_value(&payload["kernel_generators"])?;
    let rational: Vec<Vec<Rat>> = vectors_from_value(&payload["rational_kernel"])?;
    let ell: Vec<Vec<K>> = vectors_from_value(&payload["ell"])?;
    let h_coeffs: Vec<Vec<Rat>> = vectors_from_value(&payload["h_coeffs"])?;
    check_decomposition(&m, &cert, emb)?;
    if cert.rank != 22 || cert.kernel.len() != 14 {
        return Err("expected rank 22 with kernel dimension 14".into());
    }
    if gens.len() != 14 || !same_span(&cert.kernel, &gens) {
        return Err("kernel is not the span of the 14 generators".into());
    }
    for v in &gens {
        if !m.matvec(v).iter().all(|x| x.is_zero()) {
            return Err("a printed generator is outside the kernel".into());
        }
    }
    // the functional behind the matrix annihilates h
    let (ell, h_coeffs) = match (ell.first(), h_coeffs.first()) {
        (Some(a), Some(b)) if a.len() == b.len() => (a, b),
        _ => return Err("malformed functional payload".into()),
    };
    let m330 = monomial_basis(8, 4, MonomialOrder::Lex);
    if ell.len() != m330.len() {
        return Err("functional length mismatch".into());
    }
    let mxy_check: Vec<Monomial> = {
        // reconstruct the printed combined basis
        let mx = monomial_basis(4, 2, MonomialOrder::Lex);
        let mut v: Vec<Monomial> = mx
            .iter()
            .map(|m| {
                let mut e = [0u8; 8];
                e[..4].copy_from_slice(&m.e[..4]);
                Monomial::new(8, &e)
            })
            .collect();
        v.extend(mx.iter().map(|m| {
            let mut e = [0u8; 8];
            e[4..8].copy_from_slice(&m.e[..4]);
            Monomial::new(8, &e)
        }));
        for i in 0..4 {
            for j in 0..4 {
                let mut e = [0u8; 8];
                e[i] = 1;
                e[4 + j] = 1;
                v.push(Monomial::new(8, &e));
            }
        }
        v
    };
    let idx_of = |m: &Monomial| m330.iter().position(|x| x == m).unwrap();
    for i in 0..36 {
        for j in 0..36 {
            let k = idx_of(&mxy_check[i].mul(&mxy_check[j]));
            if *m.at(i, j) != ell[k] {
                return Err("moment matrix disagrees with the stored functional".into());
            }
        }
    }
    let mut pairing = K::zero();
    for (l, h) in ell.iter().zip(h_coeffs) {
        if Field::is_zero(h) {
            continue;
        }
        pairing = pairing.add(&l.scale(h));
    }
    if !pairing.is_zero() {
        return Err("ell(h) != 0".into());
    }
    let x0_4 = Monomial::new(8, &[4, 0, 0, 0, 0, 0, 0, 0]);
    if h_coeffs[idx_of(&x0_4)] != rat_i(40) {
        return Err("stored h has the wrong x0^4 coefficient".into());
    }
    // rationality obstruction
    let fresh = rational_intersection(&cert.kernel);
    if rational.len() != 8 || fresh.len() != 8 || !same_span(&rational, &fresh) {
        return Err("rational kernel intersection mismatch".into());
    }
    if rational.iter().any(|w| !Field::is_zero(&w[0])) {
        return Err("a rational kernel vector involves x0^2".into());
    }
    Ok(())
}

fn recheck_positivity(payload: &Value) -> Result<(), String> {
    let n8 = default_names(8);
    let n4 = default_names(4);
    let parse8 = |key: &str| -> Result<Polynomial<Rat>, String> {
        poly_from_text::<Rat>(payload[key].as_str().ok_or("missing polynomial")?, &n8)
    };
    let h = parse8("h")?;
    let f = parse8("f")?;
    let r = parse8("r")?;
    let f0 = parse8("f0")?;
    let f4 = poly_from_text::<Rat>(payload["f4"].as_str().ok_or("missing f4")?, &n4)?;
    let qs: Vec<Polynomial<Rat>> = payload["q"]
        .as_array()
        .ok_or("missing q")?
        .iter()
        .map(|v| poly_from_text::<Rat>(v.as_str().unwrap_or(""), &n8))
        .collect::<Result<_, _>>()?;
    let ps: Vec<Polynomial<K>> = payload["p"]
        .as_array()
        .ok_or("missing p")?
        .iter()
        .map(|v| poly_from_text::<K>(v.as_str().unwrap_or(""), &n4))
        .collect::<Result<_, _>>()?;
    // identities
    let mut rebuilt = f.clone();
    for q in &qs {
        rebuilt = rebuilt.add(&q.mul(q));
    }
    rebuilt = rebuilt.add(&r.mul(&r));
    if rebuilt != h {
        return Err("h != f + sum q^2 + r^2".into());
    }
    let mut fsum = Polynomial::<K>::zero(4);
    for p in &ps {
        fsum = fsum.add(&p.mul(p));
    }
    if fsum.demote().as_ref() != Some(&f4) || lift_x(&f4) != f {
        return Err("f != sum p^2 over the tower".into());
    }
    let zeros: BTreeMap<usize, Polynomial<Rat>> =
        (4..8).map(|v| (v, Polynomial::zero(8))).collect();
    let mut x2sq = Polynomial::zero(8);
    x2sq.add_term(&Monomial::new(8, &[0, 0, 2, 0]), &rat_i(1));
    if r.substitute(&zeros) != x2sq {
        return Err("r(x, 0) != x2^2".into());
    }
    let mut x2zero = BTreeMap::new();
    x2zero.insert(2usize, Polynomial::zero(8));
    if f.substitute(&x2zero) != f0 {
        return Err("stored f0 is not f[x2 := 0]".into());
    }
    // sign enumeration values
    let q4 = &qs[3];
    for case in payload["signs"].as_array().ok_or("missing signs")? {
        let arr = case.as_array().ok_or("bad sign case")?;
        let pt: Vec<Rat> = vec![
            rat_i(0),
            rat_i(0),
            rat_i(0),
            rat_i(0),
            rat_i(arr[0].as_i64().ok_or("bad sign")?),
            rat_i(arr[1].as_i64().ok_or("bad sign")?),
            rat_i(arr[2].as_i64().ok_or("bad sign")?),
            rat_i(1),
        ];
        let val = crate::exactnum::parse_rat(arr[3].as_str().ok_or("bad value")?)?;
        if Field::is_zero(&val) || q4.evaluate(&pt) != val {
            return Err("sign-enumeration value mismatch".into());
        }
    }
    // the face cover
    let bnb = bnb_from_value(&payload["bnb"])?;
    if !verify_bnb_certificate(&f0, &bnb) {
        return Err("face-cover certificate failed re-verification".into());
    }
    // optional interior Gram
    if !payload["gram"].is_null() {
        let g = &payload["gram"];
        let basis: Vec<Monomial> = g["basis"]
            .as_array()
            .ok_or("missing gram basis")?
            .iter()
            .map(|v| parse_monomial(v.as_str().unwrap_or(""), &n8))
            .collect::<Result<_, _>>()?;
        let gram: Matrix<Rat> = matrix_from_value(&g["gram"])?;
        let gm = GramMatrix {
            basis: basis.clone(),
            mat: gram.clone(),
        };
        if gram_expand(&gm) != f0 {
            return Err("gram matrix does not expand to f0".into());
        }
        match psd_decide(&gram, &QSign) {
            Ok(PsdOutcome::Certificate(cert)) if cert.rank == basis.len() => {}
            _ => return Err("gram matrix is not positive definite".into()),
        }
    }
    Ok(())
}

fn parse_monomial(s: &str, names: &[String]) -> Result<Monomial, String> {
    let p: Polynomial<Rat> = poly_from_text(s, names)?;
    if p.num_terms() != 1 {
        return Err(format!("not a monomial: {s}"));
    }
    let (m, c) = p.terms.iter().next().unwrap();
    if *c != rat_i(1) {
        return Err(format!("not monic: {s}"));
    }
    Ok(*m)
}

fn recheck_variants(payload: &Value) -> Result<(), String> {
    let interior = &payload["interior"];
    if interior.get("error").is_some() {
        return Ok(()); // inconclusive stage carries no certificate
    }
    let n8 = default_names(8);
    let h2 = poly_from_text::<Rat>(interior["h2"].as_str().ok_or("missing h2")?, &n8)?;
    let f = poly_from_text::<Rat>(interior["f"].as_str().ok_or("missing f")?, &n8)?;
    let g = poly_from_text::<Rat>(interior["g"].as_str().ok_or("missing g")?, &n8)?;
    let rplus = poly_from_text::<Rat>(interior["r"].as_str().ok_or("missing r")?, &n8)?;
    if f.add(&g).add(&rplus.mul(&rplus)) != h2 {
        return Err("h2 != f + g + r^2".into());
    }
    let basis: Vec<Monomial> = interior["basis"]
        .as_array()
        .ok_or("missing basis")?
        .iter()
        .map(|v| parse_monomial(v.as_str().unwrap_or(""), &n8))
        .collect::<Result<_, _>>()?;
    let gram: Matrix<Rat> = matrix_from_value(&interior["gram"])?;
    let gm = GramMatrix {
        basis: basis.clone(),
        mat: gram.clone(),
    };
    if gram_expand(&gm) != h2 {
        return Err("gram matrix does not expand to h2".into());
    }
    match psd_decide(&gram, &QSign) {
        Ok(PsdOutcome::Certificate(cert)) if cert.rank == basis.len() => Ok(()),
        _ => Err("gram matrix is not positive definite".into()),
    }
}

/// Re-verify every certificate payload in a report using only the exact
/// primitives; discovery paths are never re-run. Returns one outcome per
/// stage.
pub fn recheck_report(report: &VerificationReport) -> Vec<(String, Result<(), String>)> {
    let emb = match parse_root(&report.beta_root) {
        Ok(root) => Embedding::new(root),
        Err(e) => {
            return report
                .stages
                .iter()
                .map(|s| (s.name.clone(), Err(e.clone())))
                .collect()
        }
    };
    report
        .stages
        .iter()
        .map(|s| {
            let out = match s.status {
                StageStatus::Skipped => Ok(()),
                StageStatus::Fail | StageStatus::Inconclusive => Ok(()),
                StageStatus::Pass => match s.name.as_str() {
                    "block1" => recheck_block1(&s.certificate, &emb),
                    "block2" => recheck_block2(&s.certificate),
                    "combined" => recheck_combined(&s.certificate, &emb),
                    "positivity" => recheck_positivity(&s.certificate),
                    "smoothness" => Ok(()),
                    "variants" => recheck_variants(&s.certificate),
                    other => Err(format!("unknown stage {other:?}")),
                },
            };
            (s.name.clone(), out)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_load_and_parse() {
        let c = PaperConstants::new(BetaRoot::First);
        assert_eq!(c.f4.num_terms(), 13);
        assert_eq!(c.h8.num_terms(), 41);
        assert_eq!(c.g8.num_terms(), 26);
        assert_eq!(
            c.h8.coeff(&Monomial::new(8, &[4, 0, 0, 0, 0, 0, 0, 0])),
            rat_i(40)
        );
        // u5 head coordinate reads back in canonical form
        assert_eq!(c.u[4][0], K::parse("2*a + a^2 + 2*b").unwrap());
        // every u vector avoids the x2^2 coordinate
        assert!(c.u.iter().all(|v| v[7].is_zero()));
        // printed combined basis: x2^2 sits at index 7, y2^2 at 17
        assert_eq!(c.mxy[7], Monomial::new(8, &[0, 0, 2, 0, 0, 0, 0, 0]));
        assert_eq!(c.mxy[17], Monomial::new(8, &[0, 0, 0, 0, 0, 0, 2, 0]));
        assert_eq!(c.mxy[20], Monomial::new(8, &[1, 0, 0, 0, 1, 0, 0, 0]));
    }

    #[test]
    fn block2_passes_and_rechecks() {
        let c = PaperConstants::new(BetaRoot::First);
        let rec = stage_block2(&c);
        assert_eq!(rec.status, StageStatus::Pass);
        assert_eq!(rec.numbers["rank"], json!(6));
        assert_eq!(rec.numbers["kernel_dim"], json!(4));
        assert_eq!(rec.numbers["y_annihilator_dim"], json!(1));
        recheck_block2(&rec.certificate).unwrap();
    }

    #[test]
    fn block1_passes_and_rechecks() {
        let c = PaperConstants::new(BetaRoot::First);
        let cfg = PipelineConfig::default();
        let (rec, found) = stage_block1(&c, &cfg);
        assert_eq!(rec.status, StageStatus::Pass, "{:?}", rec.certificate);
        assert_eq!(rec.numbers["annihilator_dim"], json!(8));
        assert_eq!(rec.numbers["kernel_constrained_dim"], json!(4));
        assert_eq!(rec.numbers["normalized_dim"], json!(3));
        assert_eq!(rec.numbers["rank"], json!(4));
        assert_eq!(rec.numbers["kernel_dim"], json!(6));
        assert_eq!(rec.numbers["rational_kernel_dim"], json!(0));
        let fp = found.unwrap();
        assert_eq!(fp.description, "canonical+dir2");
        // M[0][0] = 1/4 + a^2 b / 4
        let expect = K::from_coords([
            rat(1, 4),
            rat_i(0),
            rat_i(0),
            rat_i(0),
            rat_i(0),
            rat(1, 4),
        ]);
        assert_eq!(*fp.moment.mat.at(0, 0), expect);
        recheck_block1(&rec.certificate, &c.emb).unwrap();
    }

    #[test]
    fn corrupted_f_fails_block1() {
        let mut c = PaperConstants::new(BetaRoot::First);
        let x0_4 = Monomial::new(4, &[4, 0, 0, 0]);
        c.f4.add_term(&x0_4, &rat_i(1)); // 40 -> 41
        let cfg = PipelineConfig::default();
        let (rec, found) = stage_block1(&c, &cfg);
        assert_eq!(rec.status, StageStatus::Fail);
        assert!(found.is_none());
        assert!(rec.certificate["detail"]
            .as_str()
            .unwrap()
            .contains("reproduce f"));
    }

    #[test]
    fn second_root_rejects_block1_kernel() {
        // under the second root the printed kernel vectors are not all
        // annihilated, so the search cannot deliver the required kernel
        let c = PaperConstants::new(BetaRoot::Second);
        let cfg = PipelineConfig::default();
        let (rec, _) = stage_block1(&c, &cfg);
        assert_ne!(rec.status, StageStatus::Pass);
    }

    #[test]
    fn verdict_rules() {
        let mk = |name: &str, status: StageStatus| StageRecord {
            name: name.into(),
            status,
            numbers: BTreeMap::new(),
            certificate: Value::Null,
            seconds: 0.0,
        };
        let all_pass = vec![mk("block1", StageStatus::Pass), mk("combined", StageStatus::Pass)];
        assert_eq!(verdict_of(&all_pass), "pass");
        let smooth_inc = vec![
            mk("block1", StageStatus::Pass),
            mk("smoothness", StageStatus::Inconclusive),
        ];
        assert_eq!(verdict_of(&smooth_inc), "pass");
        let comb_inc = vec![
            mk("block1", StageStatus::Pass),
            mk("combined", StageStatus::Inconclusive),
        ];
        assert_eq!(verdict_of(&comb_inc), "inconclusive");
        let with_fail = vec![mk("block1", StageStatus::Fail)];
        assert_eq!(verdict_of(&with_fail), "fail");
        let skipped = vec![
            mk("block1", StageStatus::Pass),
            mk("variants", StageStatus::Skipped),
        ];
        assert_eq!(verdict_of(&skipped), "pass");
        assert_eq!(exit_code("pass"), 0);
        assert_eq!(exit_code("fail"), 1);
        assert_eq!(exit_code("inconclusive"), 2);
    }

    #[test]
    fn canonical_json_is_stable() {
        let c = PaperConstants::new(BetaRoot::First);
        let a = stage_block2(&c);
        let b = stage_block2(&c);
        let report = |rec: StageRecord, ts: u64| VerificationReport {
            version: "0.1.0".into(),
            verdict: "pass".into(),
            beta_root: "first".into(),
            timestamp: ts,
            stages: vec![rec],
        };
        let ra = report(a, 11);
        let rb = report(b, 99);
        assert_eq!(canonical_json(&ra), canonical_json(&rb));
        // round trip through serde keeps the canonical form
        let back: VerificationReport =
            serde_json::from_str(&serde_json::to_string(&ra).unwrap()).unwrap();
        assert_eq!(canonical_json(&back), canonical_json(&ra));
    }

    #[test]
    fn recheck_rejects_tampering() {
        let c = PaperConstants::new(BetaRoot::First);
        let rec = stage_block2(&c);
        let mut bad = rec.certificate.clone();
        // swap a kernel claim: drop one q vector and duplicate another
        let qv = bad["q_vectors"].as_str().unwrap().to_string();
        let tampered = qv.replacen("-1", "-2", 1);
        bad["q_vectors"] = Value::String(tampered);
        assert!(recheck_block2(&bad).is_err());
    }
}
