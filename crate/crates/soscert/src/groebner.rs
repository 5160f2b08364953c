//! Buchberger's algorithm over ℚ, normal forms with cofactor transcripts,
//! and the projective-nonsingularity check via variable-power membership in
//! the Jacobian ideal.
//!
//! For homogeneous input a degree cap is sound: every polynomial entering
//! the derivation of a basis element of degree ≤ D itself has degree ≤ D,
//! so the capped basis decides ideal membership exactly for forms of degree
//! ≤ D. Capped runs are flagged `truncated_to` and refuse queries above the
//! cap.

use crate::exactnum::{rat_i, Field, Rat};
use crate::multipoly::{monomial_basis, Monomial, MonomialOrder, Polynomial};
use std::cmp::Reverse;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum GroebnerError {
    #[error("time budget {limit:?} exhausted after {pairs_done} pairs (basis size {basis_size})")]
    Timeout {
        limit: Duration,
        pairs_done: usize,
        basis_size: usize,
    },
    #[error("degree caps require homogeneous generators")]
    InhomogeneousCap,
    #[error("empty generator list")]
    Empty,
}

#[derive(Clone, Debug)]
pub struct Ideal {
    pub generators: Vec<Polynomial<Rat>>,
    pub order: MonomialOrder,
}

impl Ideal {
    pub fn new(generators: Vec<Polynomial<Rat>>, order: MonomialOrder) -> Result<Self, GroebnerError> {
        let gens: Vec<_> = generators.into_iter().filter(|p| !p.is_zero()).collect();
        if gens.is_empty() {
            return Err(GroebnerError::Empty);
        }
        let n = gens[0].n;
        assert!(gens.iter().all(|p| p.n == n), "mixed variable counts");
        Ok(Ideal {
            generators: gens,
            order,
        })
    }
}

#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    pub elements: Vec<Polynomial<Rat>>,
    pub order: MonomialOrder,
    /// Present when S-pairs above this degree were discarded; membership
    /// answers are exact only for forms of degree ≤ the cap.
    pub truncated_to: Option<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct BuchbergerConfig {
    pub degree_cap: Option<usize>,
    pub timeout: Option<Duration>,
}

fn lead(p: &Polynomial<Rat>, order: MonomialOrder) -> (Monomial, Rat) {
    match order {
        MonomialOrder::DegRevLex => {
            let (m, c) = p.terms.last_key_value().expect("lead of zero");
            (*m, c.clone())
        }
        MonomialOrder::Lex => {
            let (m, c) = p
                .terms
                .iter()
                .max_by(|(a, _), (b, _)| order.cmp(a, b))
                .expect("lead of zero");
            (*m, c.clone())
        }
    }
}

/// Scale to a primitive integer-coefficient representative with positive
/// leading coefficient.
fn strip_content(p: &mut Polynomial<Rat>, order: MonomialOrder) {
    if p.is_zero() {
        return;
    }
    let keys: Vec<Monomial> = p.terms.keys().copied().collect();
    let mut row: Vec<Rat> = keys.iter().map(|k| p.terms[k].clone()).collect();
    Rat::content_normalize_row(&mut row);
    for (k, v) in keys.iter().zip(row) {
        p.terms.insert(*k, v);
    }
    let (_, lc) = lead(p, order);
    if lc < rat_i(0) {
        for v in p.terms.values_mut() {
            *v = -v.clone();
        }
    }
}

/// work -= c · q · g, removing cancelled terms.
fn sub_scaled(work: &mut BTreeMap<Monomial, Rat>, g: &Polynomial<Rat>, q: &Monomial, c: &Rat) {
    for (m, a) in &g.terms {
        let key = m.mul(q);
        let delta = c * a;
        match work.entry(key) {
            Entry::Occupied(mut e) => {
                let nv = e.get() - &delta;
                if num::Zero::is_zero(&nv) {
                    e.remove();
                } else {
                    *e.get_mut() = nv;
                }
            }
            Entry::Vacant(e) => {
                if !num::Zero::is_zero(&delta) {
                    e.insert(-delta);
                }
            }
        }
    }
}

fn max_term(work: &BTreeMap<Monomial, Rat>, order: MonomialOrder) -> Option<(Monomial, Rat)> {
    match order {
        MonomialOrder::DegRevLex => work.last_key_value().map(|(m, c)| (*m, c.clone())),
        MonomialOrder::Lex => work
            .iter()
            .max_by(|(a, _), (b, _)| order.cmp(a, b))
            .map(|(m, c)| (*m, c.clone())),
    }
}

fn nf_worker(
    p: &Polynomial<Rat>,
    basis: &[Polynomial<Rat>],
    leads: &[(Monomial, Rat)],
    order: MonomialOrder,
    mut cofactors: Option<&mut Vec<Polynomial<Rat>>>,
) -> Polynomial<Rat> {
    let mut work = p.terms.clone();
    let mut rem = Polynomial::zero(p.n);
    while let Some((m, c)) = max_term(&work, order) {
        let mut reduced = false;
        for (k, (lm, lc)) in leads.iter().enumerate() {
            if lm.divides(&m) {
                let q = lm.div_into(&m);
                let factor = &c / lc;
                sub_scaled(&mut work, &basis[k], &q, &factor);
                if let Some(cof) = cofactors.as_deref_mut() {
                    cof[k].add_term(&q, &factor);
                }
                reduced = true;
                break;
            }
        }
        if !reduced {
            rem.terms.insert(m, c);
            work.remove(&m);
        }
    }
    rem
}

/// Unique remainder of multivariate division by a (Groebner) basis.
pub fn normal_form(p: &Polynomial<Rat>, gb: &GroebnerBasis) -> Polynomial<Rat> {
    let leads: Vec<_> = gb.elements.iter().map(|g| lead(g, gb.order)).collect();
    nf_worker(p, &gb.elements, &leads, gb.order, None)
}

/// Remainder together with cofactors: p = Σ cᵢ·gᵢ + r.
pub fn normal_form_with_cofactors(
    p: &Polynomial<Rat>,
    gb: &GroebnerBasis,
) -> (Polynomial<Rat>, Vec<Polynomial<Rat>>) {
    let leads: Vec<_> = gb.elements.iter().map(|g| lead(g, gb.order)).collect();
    let mut cof = vec![Polynomial::zero(p.n); gb.elements.len()];
    let r = nf_worker(p, &gb.elements, &leads, gb.order, Some(&mut cof));
    (r, cof)
}

fn spoly(
    f: &Polynomial<Rat>,
    g: &Polynomial<Rat>,
    lf: &(Monomial, Rat),
    lg: &(Monomial, Rat),
) -> Polynomial<Rat> {
    let l = lf.0.lcm(&lg.0);
    let qf = lf.0.div_into(&l);
    let qg = lg.0.div_into(&l);
    let a = f.mul_monomial(&qf, &lf.1.clone().recip());
    let b = g.mul_monomial(&qg, &lg.1.clone().recip());
    a.sub(&b)
}

/// Buchberger with the normal selection strategy (smallest lcm degree, then
/// smallest lcm, then oldest pair), the product and chain criteria, and
/// content stripping of every new basis element. With a degree cap on
/// homogeneous input, pairs above the cap are discarded and the result is
/// flagged truncated.
pub fn buchberger(ideal: &Ideal, cfg: &BuchbergerConfig) -> Result<GroebnerBasis, GroebnerError> {
    let order = ideal.order;
    if cfg.degree_cap.is_some() && !ideal.generators.iter().all(|p| p.is_homogeneous()) {
        return Err(GroebnerError::InhomogeneousCap);
    }
    let mut basis: Vec<Polynomial<Rat>> = Vec::new();
    for gen in &ideal.generators {
        let mut g = gen.clone();
        strip_content(&mut g, order);
        if !basis.contains(&g) {
            basis.push(g);
        }
    }
    let mut leads: Vec<(Monomial, Rat)> = basis.iter().map(|g| lead(g, order)).collect();
    let mut heap: BinaryHeap<Reverse<(u8, Monomial, usize, usize)>> = BinaryHeap::new();
    for j in 1..basis.len() {
        for i in 0..j {
            let l = leads[i].0.lcm(&leads[j].0);
            heap.push(Reverse((l.degree() as u8, l, i, j)));
        }
    }
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut truncated = false;
    let start = Instant::now();
    let mut pairs_done = 0usize;
    while let Some(Reverse((ldeg, l, i, j))) = heap.pop() {
        if let Some(t) = cfg.timeout {
            if start.elapsed() > t {
                return Err(GroebnerError::Timeout {
                    limit: t,
                    pairs_done,
                    basis_size: basis.len(),
                });
            }
        }
        pairs_done += 1;
        done.insert((i, j));
        if let Some(cap) = cfg.degree_cap {
            if ldeg as usize > cap {
                // homogeneous: no future pair can fall back under the cap
                truncated = true;
                heap.clear();
                break;
            }
        }
        // product criterion: coprime leads reduce to zero
        if l == leads[i].0.mul(&leads[j].0) {
            continue;
        }
        // chain criterion: some processed third element divides the lcm
        let mut skip = false;
        for (k, (lm, _)) in leads.iter().enumerate() {
            if k == i || k == j || !lm.divides(&l) {
                continue;
            }
            let p1 = (i.min(k), i.max(k));
            let p2 = (j.min(k), j.max(k));
            if done.contains(&p1) && done.contains(&p2) {
                skip = true;
                break;
            }
        }
        if skip {
            continue;
        }
        let s = spoly(&basis[i], &basis[j], &leads[i], &leads[j]);
        let mut nf = nf_worker(&s, &basis, &leads, order, None);
        if nf.is_zero() {
            continue;
        }
        strip_content(&mut nf, order);
        let t = basis.len();
        let lt = lead(&nf, order);
        for (i2, (lm, _)) in leads.iter().enumerate() {
            let l2 = lm.lcm(&lt.0);
            heap.push(Reverse((l2.degree() as u8, l2, i2, t)));
        }
        basis.push(nf);
        leads.push(lt);
    }
    // minimalize: drop elements whose lead is divisible by another kept lead
    let mut idx: Vec<usize> = (0..basis.len()).collect();
    idx.sort_by(|&a, &b| order.cmp(&leads[a].0, &leads[b].0));
    let mut kept: Vec<Polynomial<Rat>> = Vec::new();
    let mut kept_leads: Vec<(Monomial, Rat)> = Vec::new();
    for &k in &idx {
        if !kept_leads.iter().any(|(lm, _)| lm.divides(&leads[k].0)) {
            kept.push(basis[k].clone());
            kept_leads.push(leads[k].clone());
        }
    }
    // tail-reduce each element against the others, then make monic
    for k in 0..kept.len() {
        let mut others = kept.clone();
        others.remove(k);
        let mut other_leads = kept_leads.clone();
        other_leads.remove(k);
        let nf = nf_worker(&kept[k], &others, &other_leads, order, None);
        kept[k] = nf;
        kept_leads[k] = lead(&kept[k], order);
    }
    for (g, (_, lc)) in kept.iter_mut().zip(&kept_leads) {
        let inv = lc.clone().recip();
        *g = g.scale(&inv);
    }
    // canonical presentation: descending by leading monomial
    let mut pairs: Vec<(Monomial, Polynomial<Rat>)> = kept_leads
        .iter()
        .map(|(m, _)| *m)
        .zip(kept)
        .collect();
    pairs.sort_by(|(a, _), (b, _)| order.cmp(b, a));
    Ok(GroebnerBasis {
        elements: pairs.into_iter().map(|(_, g)| g).collect(),
        order,
        truncated_to: if truncated { cfg.degree_cap } else { None },
    })
}

/// Exhaustive S-pair check (intended for small bases). On a truncated basis
/// only pairs within the cap are examined.
pub fn is_groebner(gb: &GroebnerBasis) -> bool {
    let leads: Vec<_> = gb.elements.iter().map(|g| lead(g, gb.order)).collect();
    for j in 1..gb.elements.len() {
        for i in 0..j {
            let l = leads[i].0.lcm(&leads[j].0);
            if let Some(cap) = gb.truncated_to {
                if l.degree() > cap {
                    continue;
                }
            }
            let s = spoly(&gb.elements[i], &gb.elements[j], &leads[i], &leads[j]);
            if !nf_worker(&s, &gb.elements, &leads, gb.order, None).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Smallest N ≤ maxN with varᴺ in the ideal, or None. A hit is re-verified
/// by expanding the division transcript varᴺ = Σ cᵢgᵢ exactly.
pub fn variable_power_membership(
    gb: &GroebnerBasis,
    var: usize,
    max_n: usize,
) -> Option<usize> {
    assert!(max_n >= 1);
    if let Some(cap) = gb.truncated_to {
        assert!(max_n <= cap, "query degree above the truncation cap");
    }
    let n = gb.elements[0].n;
    for pow in 1..=max_n {
        let mut p = Polynomial::zero(n);
        let mut e = [0u8; crate::multipoly::MAX_VARS];
        e[var] = pow as u8;
        p.add_term(&Monomial::new(n, &e[..n]), &rat_i(1));
        let (r, cof) = normal_form_with_cofactors(&p, gb);
        if r.is_zero() {
            let mut acc = Polynomial::zero(n);
            for (c, g) in cof.iter().zip(&gb.elements) {
                acc = acc.add(&c.mul(g));
            }
            assert_eq!(acc, p, "division transcript failed to expand");
            return Some(pow);
        }
    }
    None
}

/// Quotient dimensions dim (R/I)_d for the listed degrees, by counting
/// degree-d monomials outside the lead-term staircase. Exact for d within
/// any truncation cap.
pub fn quotient_dimensions(
    leads: &[Monomial],
    n: usize,
    degrees: &[usize],
) -> Vec<(usize, usize)> {
    degrees
        .iter()
        .map(|&d| {
            let all = monomial_basis(n, d, MonomialOrder::Lex);
            let outside = all
                .iter()
                .filter(|m| !leads.iter().any(|l| l.divides(m)))
                .count();
            (d, outside)
        })
        .collect()
}

pub fn basis_leads(gb: &GroebnerBasis) -> Vec<Monomial> {
    gb.elements.iter().map(|g| lead(g, gb.order).0).collect()
}

// ---------------------------------------------------------------------------
// Mod-p probe: same truncated Buchberger over F_p. Fast corroborating
// evidence for runs where the exact computation is out of reach; results
// are labeled evidence and never upgrade to a proof.

type PPoly = BTreeMap<Monomial, u64>;

fn p_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn p_inv(a: u64, p: u64) -> u64 {
    p_pow(a, p - 2, p)
}

fn p_lead(g: &PPoly) -> (Monomial, u64) {
    let (m, c) = g.last_key_value().expect("lead of zero");
    (*m, *c)
}

fn p_monic(g: &mut PPoly, p: u64) {
    let (_, lc) = p_lead(g);
    let inv = p_inv(lc, p);
    for v in g.values_mut() {
        *v = *v * inv % p;
    }
}

fn p_sub_scaled(work: &mut PPoly, g: &PPoly, q: &Monomial, c: u64, p: u64) {
    for (m, a) in g {
        let key = m.mul(q);
        let delta = c * a % p;
        let cur = work.get(&key).copied().unwrap_or(0);
        let nv = (cur + p - delta) % p;
        if nv == 0 {
            work.remove(&key);
        } else {
            work.insert(key, nv);
        }
    }
}

fn p_nf(f: &PPoly, basis: &[PPoly], leads: &[(Monomial, u64)], p: u64) -> PPoly {
    let mut work = f.clone();
    let mut rem = PPoly::new();
    while let Some((m, c)) = work.last_key_value().map(|(m, c)| (*m, *c)) {
        let mut reduced = false;
        for (k, (lm, _)) in leads.iter().enumerate() {
            if lm.divides(&m) {
                let q = lm.div_into(&m);
                p_sub_scaled(&mut work, &basis[k], &q, c, p);
                reduced = true;
                break;
            }
        }
        if !reduced {
            rem.insert(m, c);
            work.remove(&m);
        }
    }
    rem
}

fn p_reduce_poly(g: &Polynomial<Rat>, p: u64) -> Option<PPoly> {
    use num::Integer;
    let modulus = num::BigInt::from(p);
    let mut out = PPoly::new();
    for (m, c) in &g.terms {
        let den = num::ToPrimitive::to_u64(&c.denom().mod_floor(&modulus))?;
        if den == 0 {
            return None;
        }
        let num_res = num::ToPrimitive::to_u64(&c.numer().mod_floor(&modulus))?;
        let v = num_res * p_inv(den, p) % p;
        if v != 0 {
            out.insert(*m, v);
        }
    }
    Some(out)
}

/// Degrevlex truncated Buchberger over F_p; None when the pair budget runs
/// out or a denominator vanishes mod p.
fn p_buchberger(
    gens: &[Polynomial<Rat>],
    cap: usize,
    p: u64,
    pair_budget: usize,
) -> Option<Vec<PPoly>> {
    let mut basis: Vec<PPoly> = Vec::new();
    for g in gens {
        let mut pg = p_reduce_poly(g, p)?;
        if pg.is_empty() {
            return None;
        }
        p_monic(&mut pg, p);
        if !basis.contains(&pg) {
            basis.push(pg);
        }
    }
    let mut leads: Vec<(Monomial, u64)> = basis.iter().map(p_lead).collect();
    let mut heap: BinaryHeap<Reverse<(u8, Monomial, usize, usize)>> = BinaryHeap::new();
    for j in 1..basis.len() {
        for i in 0..j {
            let l = leads[i].0.lcm(&leads[j].0);
            heap.push(Reverse((l.degree() as u8, l, i, j)));
        }
    }
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut pairs_done = 0usize;
    while let Some(Reverse((ldeg, l, i, j))) = heap.pop() {
        pairs_done += 1;
        if pairs_done > pair_budget {
            return None;
        }
        done.insert((i, j));
        if ldeg as usize > cap {
            break;
        }
        if l == leads[i].0.mul(&leads[j].0) {
            continue;
        }
        let mut skip = false;
        for (k, (lm, _)) in leads.iter().enumerate() {
            if k == i || k == j || !lm.divides(&l) {
                continue;
            }
            if done.contains(&(i.min(k), i.max(k))) && done.contains(&(j.min(k), j.max(k))) {
                skip = true;
                break;
            }
        }
        if skip {
            continue;
        }
        // S-polynomial of monic elements
        let qf = leads[i].0.div_into(&l);
        let qg = leads[j].0.div_into(&l);
        let mut s = PPoly::new();
        for (m, a) in &basis[i] {
            s.insert(m.mul(&qf), *a);
        }
        p_sub_scaled(&mut s, &basis[j], &qg, 1, p);
        let mut nf = p_nf(&s, &basis, &leads, p);
        if nf.is_empty() {
            continue;
        }
        p_monic(&mut nf, p);
        let t = basis.len();
        let lt = p_lead(&nf);
        for (i2, (lm, _)) in leads.iter().enumerate() {
            let l2 = lm.lcm(&lt.0);
            heap.push(Reverse((l2.degree() as u8, l2, i2, t)));
        }
        basis.push(nf);
        leads.push(lt);
    }
    Some(basis)
}

/// Mod-p evidence for a truncated ideal computation: staircase quotient
/// dimensions and variable-power membership over F_p.
#[derive(Clone, Debug)]
pub struct ModpProbe {
    pub prime: u64,
    pub cap: usize,
    pub quotient_dims: Vec<(usize, usize)>,
    pub var_powers: Vec<Option<usize>>,
}

pub fn modp_probe(
    gens: &[Polynomial<Rat>],
    cap: usize,
    prime: u64,
    pair_budget: usize,
) -> Option<ModpProbe> {
    let n = gens[0].n;
    let basis = p_buchberger(gens, cap, prime, pair_budget)?;
    let leads: Vec<(Monomial, u64)> = basis.iter().map(p_lead).collect();
    let lead_monos: Vec<Monomial> = leads.iter().map(|(m, _)| *m).collect();
    let min_deg = gens.iter().map(|g| g.degree()).min().unwrap_or(1);
    let degrees: Vec<usize> = (min_deg..=cap).collect();
    let quotient_dims = quotient_dimensions(&lead_monos, n, &degrees);
    let mut var_powers = Vec::new();
    for var in 0..n {
        let mut found = None;
        for pow in 1..=cap {
            let mut e = [0u8; crate::multipoly::MAX_VARS];
            e[var] = pow as u8;
            let mut f = PPoly::new();
            f.insert(Monomial::new(n, &e[..n]), 1);
            if p_nf(&f, &basis, &leads, prime).is_empty() {
                found = Some(pow);
                break;
            }
        }
        var_powers.push(found);
    }
    Some(ModpProbe {
        prime,
        cap,
        quotient_dims,
        var_powers,
    })
}

// ---------------------------------------------------------------------------
// Projective nonsingularity

#[derive(Clone, Debug)]
pub struct SmoothnessConfig {
    pub timeout: Option<Duration>,
    pub probe_primes: Vec<u64>,
    pub probe_pair_budget: usize,
}

impl Default for SmoothnessConfig {
    fn default() -> Self {
        SmoothnessConfig {
            timeout: Some(Duration::from_secs(1800)),
            probe_primes: vec![46337, 30011],
            probe_pair_budget: 5_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SmoothnessReport {
    pub max_power: usize,
    /// Smallest power of each variable in the Jacobian ideal, up to
    /// max_power. Proof-grade when `exact`, otherwise unknown.
    pub power_by_var: Vec<Option<usize>>,
    /// The capped basis completed, so power answers (including absences)
    /// are exact.
    pub exact: bool,
    pub basis_size: usize,
    pub quotient_dims: Vec<(usize, usize)>,
    pub timed_out: bool,
    /// Mod-p corroboration; evidence only, never part of the certification.
    pub probes: Vec<ModpProbe>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub enum SmoothnessOutcome {
    /// Every variable has a power ≤ max_power in the Jacobian ideal, so the
    /// zero locus of the partials is the origin alone and the projective
    /// hypersurface is nonsingular.
    Nonsingular(SmoothnessReport),
    /// Not certified: either a proof that no power ≤ max_power exists (an
    /// exact run) or an inconclusive capped/timed-out run. Never a
    /// singularity claim.
    NotCertified(SmoothnessReport),
}

impl SmoothnessOutcome {
    pub fn report(&self) -> &SmoothnessReport {
        match self {
            SmoothnessOutcome::Nonsingular(r) | SmoothnessOutcome::NotCertified(r) => r,
        }
    }

    pub fn is_nonsingular(&self) -> bool {
        matches!(self, SmoothnessOutcome::Nonsingular(_))
    }
}

/// Nonsingularity of the projective hypersurface {h = 0} via the Jacobian
/// criterion: certify V(∂h) ⊆ {0} by finding a power of every variable in
/// the ideal of the partials. The computation is capped at degree
/// max_power, which is exact for these homogeneous generators.
pub fn projective_smoothness(
    h: &Polynomial<Rat>,
    max_power: usize,
    cfg: &SmoothnessConfig,
) -> SmoothnessOutcome {
    assert!(h.is_homogeneous() && h.degree() >= 1, "need a nonzero form");
    let n = h.n;
    let partials: Vec<Polynomial<Rat>> = (0..n).map(|i| h.partial_derivative(i)).collect();
    let gens: Vec<Polynomial<Rat>> = partials.into_iter().filter(|p| !p.is_zero()).collect();
    let mut notes = vec![format!(
        "h itself omitted from the generators: {}·h = Σ vᵢ·∂h/∂vᵢ in characteristic 0",
        h.degree()
    )];
    let ideal = Ideal::new(gens.clone(), MonomialOrder::DegRevLex)
        .expect("a nonzero form has a nonzero partial");
    let min_deg = ideal.generators.iter().map(|g| g.degree()).min().unwrap();
    let degrees: Vec<usize> = (min_deg..=max_power).collect();
    let bcfg = BuchbergerConfig {
        degree_cap: Some(max_power),
        timeout: cfg.timeout,
    };
    match buchberger(&ideal, &bcfg) {
        Ok(gb) => {
            let power_by_var: Vec<Option<usize>> = (0..n)
                .map(|v| variable_power_membership(&gb, v, max_power))
                .collect();
            let report = SmoothnessReport {
                max_power,
                power_by_var: power_by_var.clone(),
                exact: true,
                basis_size: gb.elements.len(),
                quotient_dims: quotient_dimensions(&basis_leads(&gb), n, &degrees),
                timed_out: false,
                probes: Vec::new(),
                notes,
            };
            if power_by_var.iter().all(|p| p.is_some()) {
                SmoothnessOutcome::Nonsingular(report)
            } else {
                SmoothnessOutcome::NotCertified(report)
            }
        }
        Err(GroebnerError::Timeout { basis_size, .. }) => {
            notes.push("exact computation timed out; attaching mod-p evidence".into());
            let probes: Vec<ModpProbe> = cfg
                .probe_primes
                .iter()
                .filter_map(|&p| modp_probe(&gens, max_power, p, cfg.probe_pair_budget))
                .collect();
            SmoothnessOutcome::NotCertified(SmoothnessReport {
                max_power,
                power_by_var: vec![None; n],
                exact: false,
                basis_size,
                quotient_dims: Vec::new(),
                timed_out: true,
                probes,
                notes,
            })
        }
        Err(e) => panic!("unexpected Groebner failure: {e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multipoly::{default_names, poly_from_text};

    fn pq(s: &str, n: usize) -> Polynomial<Rat> {
        poly_from_text::<Rat>(s, &default_names(n)).unwrap()
    }

    fn gb_of(gens: &[&str], n: usize) -> GroebnerBasis {
        let ideal = Ideal::new(
            gens.iter().map(|s| pq(s, n)).collect(),
            MonomialOrder::DegRevLex,
        )
        .unwrap();
        buchberger(&ideal, &BuchbergerConfig::default()).unwrap()
    }

    #[test]
    fn trivial_pair() {
        let gb = gb_of(&["x0", "y0"], 8);
        assert_eq!(gb.elements, vec![pq("x0", 8), pq("y0", 8)]);
        assert!(is_groebner(&gb));
        assert!(gb.truncated_to.is_none());
    }

    #[test]
    fn elimination_example() {
        let gb = gb_of(&["x0^2 - x1^2", "x0^2 + x1^2"], 2);
        assert_eq!(gb.elements, vec![pq("x0^2", 2), pq("x1^2", 2)]);
        assert!(is_groebner(&gb));
    }

    fn fermat_octic() -> Polynomial<Rat> {
        let mut h = Polynomial::zero(8);
        for i in 0..8 {
            let mut e = [0u8; 8];
            e[i] = 4;
            h.add_term(&Monomial::new(8, &e), &rat_i(1));
        }
        h
    }

    #[test]
    fn fermat_jacobian_basis() {
        let h = fermat_octic();
        let out = projective_smoothness(&h, 8, &SmoothnessConfig::default());
        assert!(out.is_nonsingular());
        let report = out.report();
        assert!(report.exact);
        assert_eq!(report.power_by_var, vec![Some(3); 8]);
        assert_eq!(report.basis_size, 8);
        // the staircase of <v_i^3> matches the complete-intersection series
        assert_eq!(
            report.quotient_dims,
            vec![(3, 112), (4, 266), (5, 504), (6, 784), (7, 1016), (8, 1107)]
        );
    }

    #[test]
    fn normal_form_examples() {
        let gb = gb_of(&["x0"], 8);
        assert!(normal_form(&pq("x0^2", 8), &gb).is_zero());
        let gb2 = gb_of(&["x0^2"], 8);
        let p = pq("x0 + 1", 8);
        assert_eq!(normal_form(&p, &gb2), p);
        // idempotence
        let gb3 = gb_of(&["x0^2 - x1^2", "x1^3"], 2);
        let q = pq("x0^3 + x0*x1^2 + x1 + 1", 2);
        let r = normal_form(&q, &gb3);
        assert_eq!(normal_form(&r, &gb3), r);
    }

    #[test]
    fn cofactor_transcript_expands() {
        let gb = gb_of(&["x0^2 - x1^2", "x0^2 + x1^2"], 2);
        let p = pq("x0^4 + x1^4", 2);
        let (r, cof) = normal_form_with_cofactors(&p, &gb);
        assert!(r.is_zero());
        let mut acc = Polynomial::zero(2);
        for (c, g) in cof.iter().zip(&gb.elements) {
            acc = acc.add(&c.mul(g));
        }
        assert_eq!(acc, p);
    }

    #[test]
    fn power_membership_examples() {
        let gb = gb_of(&["x0^3"], 8);
        assert_eq!(variable_power_membership(&gb, 0, 8), Some(3));
        assert_eq!(variable_power_membership(&gb, 1, 8), None);
        let gb2 = gb_of(&["x0*x1"], 2);
        assert_eq!(variable_power_membership(&gb2, 0, 8), None);
    }

    #[test]
    fn singular_control_not_certified() {
        // x0^2 x1^2 is singular along two lines; the check must not claim
        // otherwise, and the completed basis proves no power exists
        let h = pq("x0^2*x1^2", 2);
        let out = projective_smoothness(&h, 8, &SmoothnessConfig::default());
        assert!(!out.is_nonsingular());
        let report = out.report();
        assert!(report.exact);
        assert!(!report.timed_out);
        assert_eq!(report.power_by_var, vec![None, None]);
    }

    #[test]
    fn euler_identity_membership() {
        // any form lies in the ideal of its partials (char 0); degree-4
        // membership only needs the cap-4 basis
        let q = pq("x0^4 + x0^2*x1^2 + x1^3*x2", 3);
        let gens: Vec<_> = (0..3).map(|i| q.partial_derivative(i)).collect();
        let ideal = Ideal::new(gens, MonomialOrder::DegRevLex).unwrap();
        let gb = buchberger(
            &ideal,
            &BuchbergerConfig {
                degree_cap: Some(4),
                timeout: None,
            },
        )
        .unwrap();
        assert!(normal_form(&q, &gb).is_zero());
    }

    #[test]
    fn truncation_agrees_below_cap() {
        let gens = ["x0^2 - x1*x2", "x1^2 - x0*x2", "x2^3"];
        let full = gb_of(&gens, 3);
        assert!(is_groebner(&full));
        let ideal = Ideal::new(
            gens.iter().map(|s| pq(s, 3)).collect(),
            MonomialOrder::DegRevLex,
        )
        .unwrap();
        let capped = buchberger(
            &ideal,
            &BuchbergerConfig {
                degree_cap: Some(3),
                timeout: None,
            },
        )
        .unwrap();
        // membership answers agree for forms within the cap
        for probe in ["x0^2*x1 - x1^2*x2", "x0*x1*x2", "x0^3"] {
            let p = pq(probe, 3);
            assert_eq!(
                normal_form(&p, &capped).is_zero(),
                normal_form(&p, &full).is_zero(),
                "{probe}"
            );
        }
    }

    #[test]
    fn modp_probe_fermat() {
        let mut gens = Vec::new();
        for i in 0..8 {
            let mut e = [0u8; 8];
            e[i] = 3;
            let mut p = Polynomial::zero(8);
            p.add_term(&Monomial::new(8, &e), &rat_i(4));
            gens.push(p);
        }
        let probe = modp_probe(&gens, 6, 46337, 100_000).unwrap();
        assert_eq!(probe.var_powers, vec![Some(3); 8]);
        assert_eq!(
            probe.quotient_dims,
            vec![(3, 112), (4, 266), (5, 504), (6, 784)]
        );
    }

    #[test]
    fn timeout_is_reported() {
        // an immediate deadline forces the timeout path
        let h = fermat_octic();
        let cfg = SmoothnessConfig {
            timeout: Some(Duration::ZERO),
            probe_primes: vec![46337],
            probe_pair_budget: 100_000,
        };
        let out = projective_smoothness(&h, 6, &cfg);
        assert!(!out.is_nonsingular());
        let report = out.report();
        assert!(report.timed_out);
        assert!(!report.exact);
        // the probe still reports mod-p power hits as evidence
        assert_eq!(report.probes.len(), 1);
        assert_eq!(report.probes[0].var_powers, vec![Some(3); 8]);
    }
}
