//! Exact arithmetic in Q and in the real tower K = Q(a)(b), where a^3 = 2 and
//! b^2 + a^2*b + (1 - a^2) = 0, with a terminating sign oracle driven by
//! isolating-interval refinement.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

pub type Rat = BigRational;

pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical text form: `p` when the denominator is 1, else `p/q`.
pub fn rat_to_string(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|e| format!("bad numerator {n:?}: {e}"))?;
        let d = BigInt::from_str(d.trim()).map_err(|e| format!("bad denominator {d:?}: {e}"))?;
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(Rat::new(n, d))
    } else {
        let n = BigInt::from_str(s).map_err(|e| format!("bad integer {s:?}: {e}"))?;
        Ok(Rat::from_integer(n))
    }
}

/// Exact field operations shared by Q and K, plus the hooks linear algebra
/// needs (rational embedding checks and optional row normalization).
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; panics on zero (callers guard).
    fn inv(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn from_rat(r: &Rat) -> Self;
    fn as_rat(&self) -> Option<Rat>;
    /// Conversion from a tower element; None when it does not embed.
    fn from_tower(k: &AlgebraicNumber) -> Option<Self>;
    /// Embedding into the tower (always exact).
    fn to_tower(&self) -> AlgebraicNumber;
    /// Divide a whole row by its positive content to curb growth (Q only).
    fn content_normalize_row(_row: &mut [Self]) {}
    fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }
    fn from_i64(n: i64) -> Self {
        Self::from_rat(&rat_i(n))
    }
}

impl Field for Rat {
    fn zero() -> Self {
        rat_i(0)
    }
    fn one() -> Self {
        rat_i(1)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        rat_i(1) / self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn as_rat(&self) -> Option<Rat> {
        Some(self.clone())
    }
    fn from_tower(k: &AlgebraicNumber) -> Option<Self> {
        k.as_rat()
    }
    fn to_tower(&self) -> AlgebraicNumber {
        AlgebraicNumber::from_rat(self)
    }
    fn content_normalize_row(row: &mut [Self]) {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for x in row.iter() {
            if !Zero::is_zero(x) {
                num_gcd = num::integer::gcd(num_gcd, x.numer().abs());
                den_lcm = num::integer::lcm(den_lcm, x.denom().clone());
            }
        }
        if num_gcd.is_zero() || (num_gcd.is_one() && den_lcm.is_one()) {
            return;
        }
        let scale = Rat::new(den_lcm, num_gcd);
        for x in row.iter_mut() {
            *x *= &scale;
        }
    }
}

/// Basis order for K over Q, fixed for all coordinate I/O.
pub const BASIS_NAMES: [&str; 6] = ["1", "a", "a^2", "b", "a*b", "a^2*b"];

/// Element of K = Q(a)(b) as coordinates over (1, a, a^2, b, a*b, a^2*b).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgebraicNumber {
    pub c: [Rat; 6],
}

pub type K = AlgebraicNumber;

fn arr6() -> [Rat; 6] {
    [
        rat_i(0),
        rat_i(0),
        rat_i(0),
        rat_i(0),
        rat_i(0),
        rat_i(0),
    ]
}

/// Product in Q(a) modulo a^3 = 2.
fn mul3(u: &[Rat; 3], v: &[Rat; 3]) -> [Rat; 3] {
    [
        &u[0] * &v[0] + (&u[1] * &v[2] + &u[2] * &v[1]) * rat_i(2),
        &u[0] * &v[1] + &u[1] * &v[0] + &u[2] * &v[2] * rat_i(2),
        &u[0] * &v[2] + &u[1] * &v[1] + &u[2] * &v[0],
    ]
}

fn add3(u: &[Rat; 3], v: &[Rat; 3]) -> [Rat; 3] {
    [&u[0] + &v[0], &u[1] + &v[1], &u[2] + &v[2]]
}

fn sub3(u: &[Rat; 3], v: &[Rat; 3]) -> [Rat; 3] {
    [&u[0] - &v[0], &u[1] - &v[1], &u[2] - &v[2]]
}

fn is_zero3(u: &[Rat; 3]) -> bool {
    u.iter().all(|x| Zero::is_zero(x))
}

/// Inverse in Q(a): solve (mult-by-u) y = 1 by 3x3 elimination.
fn inv3(u: &[Rat; 3]) -> [Rat; 3] {
    assert!(!is_zero3(u), "division by zero in Q(a)");
    // columns of the multiplication-by-u matrix: u*1, u*a, u*a^2
    let two = rat_i(2);
    let m = [
        [u[0].clone(), &u[2] * &two, &u[1] * &two],
        [u[1].clone(), u[0].clone(), &u[2] * &two],
        [u[2].clone(), u[1].clone(), u[0].clone()],
    ];
    let mut aug: Vec<Vec<Rat>> = (0..3)
        .map(|i| {
            let mut row: Vec<Rat> = m[i].to_vec();
            row.push(if i == 0 { rat_i(1) } else { rat_i(0) });
            row
        })
        .collect();
    let mut r = 0;
    for c in 0..3 {
        let Some(p) = (r..3).find(|&i| !Zero::is_zero(&aug[i][c])) else {
            continue;
        };
        aug.swap(r, p);
        let pinv = rat_i(1) / aug[r][c].clone();
        for x in aug[r].iter_mut() {
            *x *= &pinv;
        }
        for i in 0..3 {
            if i != r && !Zero::is_zero(&aug[i][c]) {
                let f = aug[i][c].clone();
                for j in 0..4 {
                    let t = &aug[r][j] * &f;
                    aug[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    assert_eq!(r, 3, "singular multiplication matrix in Q(a)");
    [aug[0][3].clone(), aug[1][3].clone(), aug[2][3].clone()]
}

impl AlgebraicNumber {
    pub fn zero() -> Self {
        AlgebraicNumber { c: arr6() }
    }

    pub fn one() -> Self {
        Self::from_rat(&rat_i(1))
    }

    pub fn from_rat(r: &Rat) -> Self {
        let mut c = arr6();
        c[0] = r.clone();
        AlgebraicNumber { c }
    }

    pub fn alpha() -> Self {
        let mut c = arr6();
        c[1] = rat_i(1);
        AlgebraicNumber { c }
    }

    pub fn beta() -> Self {
        let mut c = arr6();
        c[3] = rat_i(1);
        AlgebraicNumber { c }
    }

    /// Build from the six basis coordinates.
    pub fn from_coords(c: [Rat; 6]) -> Self {
        AlgebraicNumber { c }
    }

    pub fn from_parts(lo: [Rat; 3], hi: [Rat; 3]) -> Self {
        let [l0, l1, l2] = lo;
        let [h0, h1, h2] = hi;
        AlgebraicNumber {
            c: [l0, l1, l2, h0, h1, h2],
        }
    }

    fn lo(&self) -> [Rat; 3] {
        [self.c[0].clone(), self.c[1].clone(), self.c[2].clone()]
    }

    fn hi(&self) -> [Rat; 3] {
        [self.c[3].clone(), self.c[4].clone(), self.c[5].clone()]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| Zero::is_zero(x))
    }

    pub fn is_rational(&self) -> bool {
        self.c[1..].iter().all(|x| Zero::is_zero(x))
    }

    /// The exact basis coordinates over (1, a, a^2, b, a*b, a^2*b).
    pub fn rational_coordinates(&self) -> [Rat; 6] {
        self.c.clone()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut c = arr6();
        for i in 0..6 {
            c[i] = &self.c[i] + &o.c[i];
        }
        AlgebraicNumber { c }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut c = arr6();
        for i in 0..6 {
            c[i] = &self.c[i] - &o.c[i];
        }
        AlgebraicNumber { c }
    }

    pub fn neg(&self) -> Self {
        let mut c = arr6();
        for i in 0..6 {
            c[i] = -self.c[i].clone();
        }
        AlgebraicNumber { c }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if o.is_rational() {
            return self.scale(&o.c[0]);
        }
        if self.is_rational() {
            return o.scale(&self.c[0]);
        }
        // (a0 + a1 b)(b0 + b1 b) with b^2 = (a^2 - 1) - a^2 b
        let a0 = self.lo();
        let a1 = self.hi();
        let b0 = o.lo();
        let b1 = o.hi();
        let a1b1 = mul3(&a1, &b1);
        let beta_sq_lo = [-rat_i(1), rat_i(0), rat_i(1)];
        let lo = add3(&mul3(&a0, &b0), &mul3(&a1b1, &beta_sq_lo));
        let cross = add3(&mul3(&a0, &b1), &mul3(&a1, &b0));
        let hi = sub3(&cross, &mul3(&a1b1, &[rat_i(0), rat_i(0), rat_i(1)]));
        Self::from_parts(lo, hi)
    }

    pub fn scale(&self, r: &Rat) -> Self {
        let mut c = arr6();
        for i in 0..6 {
            c[i] = &self.c[i] * r;
        }
        AlgebraicNumber { c }
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "division by zero in K");
        // conjugate over Q(a): bbar = -a^2 - b, so conj = (a0 - a1*a^2) - a1*b
        let a0 = self.lo();
        let a1 = self.hi();
        let a1a2 = mul3(&a1, &[rat_i(0), rat_i(0), rat_i(1)]);
        let conj = Self::from_parts(sub3(&a0, &a1a2), [
            -a1[0].clone(),
            -a1[1].clone(),
            -a1[2].clone(),
        ]);
        let norm = self.mul(&conj);
        assert!(
            is_zero3(&norm.hi()),
            "norm must land in Q(a): {:?}",
            norm
        );
        let ninv = inv3(&norm.lo());
        let mut out = conj;
        let lo = mul3(&out.lo(), &ninv);
        let hi = mul3(&out.hi(), &ninv);
        out = Self::from_parts(lo, hi);
        out
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Canonical text form: all six coordinates, joined with " + ".
    pub fn to_text(&self) -> String {
        let mut parts = Vec::with_capacity(6);
        for (i, name) in BASIS_NAMES.iter().enumerate() {
            let coef = rat_to_string(&self.c[i]);
            if i == 0 {
                parts.push(coef);
            } else {
                parts.push(format!("{coef}*{name}"));
            }
        }
        parts.join(" + ")
    }

    /// Parse the textual form. Accepts any subset of terms, signs inline or
    /// as separators, so both printed and hand-written forms round-trip.
    pub fn parse(s: &str) -> Result<Self, String> {
        let mut c = arr6();
        for (idx, coef) in parse_tower_terms(s)? {
            c[idx] += coef;
        }
        Ok(AlgebraicNumber { c })
    }
}

/// Split a tower expression into (basis index, coefficient) pairs.
pub fn parse_tower_terms(s: &str) -> Result<Vec<(usize, Rat)>, String> {
    let compact: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty tower literal".into());
    }
    let mut terms = Vec::new();
    let mut cur = String::new();
    for (i, ch) in compact.char_indices() {
        if (ch == '+' || ch == '-') && i > 0 {
            let prev = compact.as_bytes()[i - 1] as char;
            if prev != '^' && prev != '*' && prev != '/' && prev != '+' && prev != '-' {
                terms.push(cur.clone());
                cur.clear();
            }
        }
        cur.push(ch);
    }
    terms.push(cur);
    let mut out = Vec::new();
    for t in terms {
        if t.is_empty() {
            continue;
        }
        out.push(parse_tower_term(&t)?);
    }
    Ok(out)
}

fn parse_tower_term(t: &str) -> Result<(usize, Rat), String> {
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, t.strip_prefix('+').unwrap_or(t)),
    };
    let pieces: Vec<&str> = body.split('*').filter(|p| !p.is_empty()).collect();
    let mut coef = Rat::from_integer(BigInt::from(sign));
    let mut a_pow = 0u32;
    let mut b_pow = 0u32;
    let mut saw_coef = false;
    for p in &pieces {
        if let Some(rest) = p.strip_prefix("a^") {
            a_pow += rest
                .parse::<u32>()
                .map_err(|e| format!("bad power in {p:?}: {e}"))?;
        } else if *p == "a" {
            a_pow += 1;
        } else if let Some(rest) = p.strip_prefix("b^") {
            b_pow += rest
                .parse::<u32>()
                .map_err(|e| format!("bad power in {p:?}: {e}"))?;
        } else if *p == "b" {
            b_pow += 1;
        } else {
            if saw_coef {
                return Err(format!("two coefficients in term {t:?}"));
            }
            coef *= parse_rat(p)?;
            saw_coef = true;
        }
    }
    if pieces.is_empty() {
        return Err(format!("empty term in {t:?}"));
    }
    if a_pow > 2 || b_pow > 1 {
        return Err(format!(
            "term {t:?} not in reduced basis form (a exponent <= 2, b exponent <= 1)"
        ));
    }
    let idx = (a_pow as usize) + if b_pow == 1 { 3 } else { 0 };
    Ok((idx, coef))
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl Field for AlgebraicNumber {
    fn zero() -> Self {
        AlgebraicNumber::zero()
    }
    fn one() -> Self {
        AlgebraicNumber::one()
    }
    fn add(&self, o: &Self) -> Self {
        AlgebraicNumber::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        AlgebraicNumber::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return AlgebraicNumber::zero();
        }
        if self.is_rational() {
            return o.scale(&self.c[0]);
        }
        if o.is_rational() {
            return self.scale(&o.c[0]);
        }
        AlgebraicNumber::mul(self, o)
    }
    fn neg(&self) -> Self {
        AlgebraicNumber::neg(self)
    }
    fn inv(&self) -> Self {
        AlgebraicNumber::inv(self)
    }
    fn is_zero(&self) -> bool {
        AlgebraicNumber::is_zero(self)
    }
    fn from_rat(r: &Rat) -> Self {
        AlgebraicNumber::from_rat(r)
    }
    fn as_rat(&self) -> Option<Rat> {
        if self.is_rational() {
            Some(self.c[0].clone())
        } else {
            None
        }
    }
    fn from_tower(k: &AlgebraicNumber) -> Option<Self> {
        Some(k.clone())
    }
    fn to_tower(&self) -> AlgebraicNumber {
        self.clone()
    }
}

/// Rational interval [lo, hi]; the sign-oracle and branch-and-bound substrate.
#[derive(Clone, PartialEq, Debug)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval lo > hi");
        Interval { lo, hi }
    }

    pub fn point(x: Rat) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Interval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }

    pub fn neg(&self) -> Self {
        Interval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let cands = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        Interval { lo, hi }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        if r.is_negative() {
            Interval {
                lo: &self.hi * r,
                hi: &self.lo * r,
            }
        } else {
            Interval {
                lo: &self.lo * r,
                hi: &self.hi * r,
            }
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return Interval::point(rat_i(1));
        }
        if e % 2 == 1 {
            // odd powers are monotone
            return Interval {
                lo: pow_rat(&self.lo, e),
                hi: pow_rat(&self.hi, e),
            };
        }
        let l = pow_rat(&self.lo, e);
        let h = pow_rat(&self.hi, e);
        if !self.lo.is_negative() {
            Interval { lo: l, hi: h }
        } else if !self.hi.is_positive() {
            Interval { lo: h, hi: l }
        } else {
            Interval {
                lo: rat_i(0),
                hi: l.max(h),
            }
        }
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rat {
        (&self.lo + &self.hi) / rat_i(2)
    }

    /// Sign of every point in the interval, or None if it straddles zero.
    pub fn definite_sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if Zero::is_zero(&self.lo) && Zero::is_zero(&self.hi) {
            Some(0)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.mid().to_f64().unwrap_or(f64::NAN)
    }
}

pub fn pow_rat(x: &Rat, e: u32) -> Rat {
    let mut acc = rat_i(1);
    let mut base = x.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Which real root of X^2 + a^2 X + (1 - a^2) the symbol b denotes.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
pub enum BetaRoot {
    First,
    Second,
}

impl BetaRoot {
    pub fn label(&self) -> &'static str {
        match self {
            BetaRoot::First => "first",
            BetaRoot::Second => "second",
        }
    }
}

/// Isolating data for one choice of the tower's real embedding.
#[derive(Clone, Debug)]
pub struct TowerDescriptor {
    pub root: BetaRoot,
    pub alpha_interval: Interval,
    pub beta_interval: Interval,
}

impl TowerDescriptor {
    /// X^3 - 2, coefficients low to high.
    pub fn minpoly_alpha(&self) -> Vec<Rat> {
        vec![rat_i(-2), rat_i(0), rat_i(0), rat_i(1)]
    }

    /// X^2 + a^2 X + (1 - a^2): coefficients low to high, each in Q(a)
    /// as coordinates over (1, a, a^2).
    pub fn minpoly_beta(&self) -> Vec<[Rat; 3]> {
        vec![
            [rat_i(1), rat_i(0), -rat_i(1)],
            [rat_i(0), rat_i(0), rat_i(1)],
            [rat_i(1), rat_i(0), rat_i(0)],
        ]
    }
}

fn alpha_start() -> Interval {
    Interval::new(rat(5, 4), rat(13, 10))
}

fn beta_start(root: BetaRoot) -> Interval {
    match root {
        BetaRoot::First => Interval::new(rat(1, 4), rat(1, 2)),
        BetaRoot::Second => Interval::new(rat_i(-2), rat(-15, 8)),
    }
}

/// Descriptors for both real roots of the beta quadratic.
pub fn beta_roots() -> [TowerDescriptor; 2] {
    [
        TowerDescriptor {
            root: BetaRoot::First,
            alpha_interval: alpha_start(),
            beta_interval: beta_start(BetaRoot::First),
        },
        TowerDescriptor {
            root: BetaRoot::Second,
            alpha_interval: alpha_start(),
            beta_interval: beta_start(BetaRoot::Second),
        },
    ]
}

struct EmbState {
    alpha: Interval,
    beta: Interval,
}

/// A fixed real embedding of K with monotonically refined isolating
/// intervals. Refinement only ever shrinks the intervals, so sharing the
/// cache across sign queries is sound.
pub struct Embedding {
    pub root: BetaRoot,
    state: Mutex<EmbState>,
}

impl Embedding {
    pub fn new(root: BetaRoot) -> Self {
        Embedding {
            root,
            state: Mutex::new(EmbState {
                alpha: alpha_start(),
                beta: beta_start(root),
            }),
        }
    }

    pub fn descriptor(&self) -> TowerDescriptor {
        let st = self.state.lock().unwrap();
        TowerDescriptor {
            root: self.root,
            alpha_interval: st.alpha.clone(),
            beta_interval: st.beta.clone(),
        }
    }

    fn refine_alpha_locked(st: &mut EmbState) {
        let m = st.alpha.mid();
        // sign of m^3 - 2 (never exactly zero at rational m)
        if pow_rat(&m, 3) > rat_i(2) {
            st.alpha.hi = m;
        } else {
            st.alpha.lo = m;
        }
    }

    /// Sign of c0 + c1 a + c2 a^2 for rational c_i, by alpha refinement.
    fn sign_qa_locked(st: &mut EmbState, c: &[Rat; 3]) -> i8 {
        if is_zero3(c) {
            return 0;
        }
        loop {
            let ia = &st.alpha;
            let v = Interval::point(c[0].clone())
                .add(&ia.scale(&c[1]))
                .add(&ia.pow(2).scale(&c[2]));
            if let Some(s) = v.definite_sign() {
                if s != 0 {
                    return s;
                }
            }
            Self::refine_alpha_locked(st);
        }
    }

    fn refine_beta_locked(st: &mut EmbState, root: BetaRoot) {
        let m = st.beta.mid();
        // q(m) = (m^2 + 1) + (m - 1) a^2 in Q(a); never zero at rational m
        let qm = [&m * &m + rat_i(1), rat_i(0), &m - rat_i(1)];
        let s = Self::sign_qa_locked(st, &qm);
        debug_assert!(s != 0);
        // upward parabola: first root has q < 0 to its left inside the
        // bracket's right end, second root the reverse
        let hi_side_positive = match root {
            BetaRoot::First => true,
            BetaRoot::Second => false,
        };
        if (s > 0) == hi_side_positive {
            st.beta.hi = m;
        } else {
            st.beta.lo = m;
        }
    }

    /// Interval enclosure of x at the embedding's current precision.
    fn enclose_locked(st: &EmbState, x: &AlgebraicNumber) -> Interval {
        let ia = &st.alpha;
        let ia2 = ia.pow(2);
        let lo_part = Interval::point(x.c[0].clone())
            .add(&ia.scale(&x.c[1]))
            .add(&ia2.scale(&x.c[2]));
        let hi_part = Interval::point(x.c[3].clone())
            .add(&ia.scale(&x.c[4]))
            .add(&ia2.scale(&x.c[5]));
        lo_part.add(&hi_part.mul(&st.beta))
    }

    /// Enclosure with width at most 2^-bits.
    pub fn enclose(&self, x: &AlgebraicNumber, bits: u32) -> Interval {
        let tol = Rat::new(BigInt::one(), BigInt::from(2u8).pow(bits));
        let mut st = self.state.lock().unwrap();
        loop {
            let v = Self::enclose_locked(&st, x);
            if v.width() <= tol {
                return v;
            }
            Self::refine_alpha_locked(&mut st);
            let root = self.root;
            Self::refine_beta_locked(&mut st, root);
        }
    }

    /// Exact sign via coordinate test then interval refinement. Terminates
    /// for every input because nonzero elements have nonzero real value and
    /// the enclosure width shrinks geometrically.
    pub fn sign(&self, x: &AlgebraicNumber) -> i8 {
        if x.is_zero() {
            return 0;
        }
        let mut st = self.state.lock().unwrap();
        loop {
            let v = Self::enclose_locked(&st, x);
            if v.lo.is_positive() {
                return 1;
            }
            if v.hi.is_negative() {
                return -1;
            }
            Self::refine_alpha_locked(&mut st);
            let root = self.root;
            Self::refine_beta_locked(&mut st, root);
        }
    }

    pub fn to_f64(&self, x: &AlgebraicNumber) -> f64 {
        let (af, bf) = self.basis_f64();
        let c: Vec<f64> = x.c.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect();
        c[0] + c[1] * af + c[2] * af * af + (c[3] + c[4] * af + c[5] * af * af) * bf
    }

    /// Double-precision values of (a, b) under this embedding.
    pub fn basis_f64(&self) -> (f64, f64) {
        let mut st = self.state.lock().unwrap();
        let tol = Rat::new(BigInt::one(), BigInt::from(2u8).pow(60));
        while st.alpha.width() > tol || st.beta.width() > tol {
            Self::refine_alpha_locked(&mut st);
            let root = self.root;
            Self::refine_beta_locked(&mut st, root);
        }
        (st.alpha.to_f64(), st.beta.to_f64())
    }
}

/// Oracle abstraction so PSD decisions run identically over Q and K.
pub trait SignOracle<F>: Sync {
    fn sign(&self, x: &F) -> i8;
}

/// Signs of rationals need no context.
pub struct QSign;

impl SignOracle<Rat> for QSign {
    fn sign(&self, x: &Rat) -> i8 {
        if Zero::is_zero(x) {
            0
        } else if x.is_positive() {
            1
        } else {
            -1
        }
    }
}

impl SignOracle<AlgebraicNumber> for Embedding {
    fn sign(&self, x: &AlgebraicNumber) -> i8 {
        Embedding::sign(self, x)
    }
}

/// Monic minimal polynomial of x over Q (coefficients low to high), found as
/// the first linear dependency among 1, x, x^2, ...; the degree divides 6.
pub fn minpoly_over_q(x: &AlgebraicNumber) -> Vec<Rat> {
    // rows: reduced coordinate vectors; combos: expression of each reduced
    // row in terms of the original powers
    let mut reduced: Vec<([Rat; 6], Vec<Rat>)> = Vec::new();
    let mut power = AlgebraicNumber::one();
    for k in 0..=6usize {
        let mut v = power.c.clone();
        let mut combo = vec![rat_i(0); k + 1];
        combo[k] = rat_i(1);
        // eliminate against recorded rows
        for (row, rcombo) in &reduced {
            let lead = row.iter().position(|c| !Zero::is_zero(c)).unwrap();
            if !Zero::is_zero(&v[lead]) {
                let f = v[lead].clone() / row[lead].clone();
                for i in 0..6 {
                    let t = &row[i] * &f;
                    v[i] -= t;
                }
                for (i, rc) in rcombo.iter().enumerate() {
                    let t = rc * &f;
                    if i < combo.len() {
                        combo[i] -= t;
                    }
                }
            }
        }
        if v.iter().all(|c| Zero::is_zero(c)) {
            // combo gives Σ combo_i x^i = 0 with combo_k = 1 after scaling
            let lead = combo[k].clone();
            let mut out: Vec<Rat> = combo.into_iter().map(|c| c / lead.clone()).collect();
            out.truncate(k + 1);
            return out;
        }
        reduced.push((v, combo));
        power = power.mul(x);
    }
    unreachable!("every element of a degree-6 field has minimal degree <= 6");
}

/// Evaluate a univariate rational polynomial (low-to-high coefficients) at a
/// tower element.
pub fn eval_univariate(coeffs: &[Rat], x: &AlgebraicNumber) -> AlgebraicNumber {
    let mut acc = AlgebraicNumber::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add(&AlgebraicNumber::from_rat(c));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(c: [i64; 6]) -> K {
        K::from_coords([
            rat_i(c[0]),
            rat_i(c[1]),
            rat_i(c[2]),
            rat_i(c[3]),
            rat_i(c[4]),
            rat_i(c[5]),
        ])
    }

    #[test]
    fn alpha_cubed_is_two() {
        let a = K::alpha();
        assert_eq!(a.mul(&a).mul(&a), k([2, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn beta_satisfies_quadratic() {
        // b^2 + a^2 b + (1 - a^2) = 0
        let b = K::beta();
        let a2 = K::alpha().pow(2);
        let val = b.pow(2).add(&a2.mul(&b)).add(&K::one()).sub(&a2);
        assert!(val.is_zero());
        // and b^2 itself has coordinates (-1, 0, 1, 0, 0, -1)
        assert_eq!(b.pow(2), k([-1, 0, 1, 0, 0, -1]));
    }

    #[test]
    fn mul_identity() {
        let x = k([3, -1, 2, 0, 5, -7]);
        assert_eq!(x.mul(&K::one()), x);
    }

    #[test]
    fn inverse_roundtrip() {
        let samples = [
            k([1, 0, 0, 0, 0, 0]),
            k([0, 1, 0, 0, 0, 0]),
            k([0, 0, 0, 1, 0, 0]),
            k([3, -1, 2, 1, 5, -7]),
            k([0, 0, 0, 0, 0, 2]),
            K::from_coords([rat(1, 2), rat(-3, 4), rat_i(0), rat(2, 7), rat_i(1), rat_i(0)]),
        ];
        for x in samples {
            assert_eq!(x.mul(&x.inv()), K::one(), "failed for {x}");
        }
    }

    #[test]
    fn sign_oracle_basics() {
        let emb = Embedding::new(BetaRoot::First);
        assert_eq!(emb.sign(&K::zero()), 0);
        // alpha - 1 > 0, 2 - alpha^2 > 0 (alpha ~ 1.2599, alpha^2 ~ 1.5874)
        assert_eq!(emb.sign(&K::alpha().sub(&K::one())), 1);
        assert_eq!(emb.sign(&K::from_rat(&rat_i(2)).sub(&K::alpha().pow(2))), 1);
        // discriminant a^4 + 4a^2 - 4 > 0: two real roots exist
        let a2 = K::alpha().pow(2);
        let disc = a2.pow(2).add(&a2.scale(&rat_i(4))).sub(&K::from_rat(&rat_i(4)));
        assert_eq!(emb.sign(&disc), 1);
        // beta itself: positive under the first root, negative under the second
        assert_eq!(emb.sign(&K::beta()), 1);
        let emb2 = Embedding::new(BetaRoot::Second);
        assert_eq!(emb2.sign(&K::beta()), -1);
    }

    #[test]
    fn beta_root_approximations() {
        let emb = Embedding::new(BetaRoot::First);
        let (af, bf) = emb.basis_f64();
        assert!((af - 1.2599210498948732).abs() < 1e-12);
        assert!((bf - 0.30964057128167155).abs() < 1e-12);
        let emb2 = Embedding::new(BetaRoot::Second);
        let (_, bf2) = emb2.basis_f64();
        assert!((bf2 + 1.8970416232498710).abs() < 1e-10);
    }

    #[test]
    fn minpoly_examples() {
        // minpoly(alpha) = X^3 - 2
        assert_eq!(
            minpoly_over_q(&K::alpha()),
            vec![rat_i(-2), rat_i(0), rat_i(0), rat_i(1)]
        );
        // minpoly(beta) has degree 6 and kills beta
        let mb = minpoly_over_q(&K::beta());
        assert_eq!(mb.len(), 7);
        assert!(eval_univariate(&mb, &K::beta()).is_zero());
        // minpoly(1/2) = X - 1/2
        assert_eq!(
            minpoly_over_q(&K::from_rat(&rat(1, 2))),
            vec![rat(-1, 2), rat_i(1)]
        );
    }

    #[test]
    fn paper_t2_coordinates() {
        // t2 = -1/2 a - 1/2 b has coordinates (0, -1/2, 0, -1/2, 0, 0)
        let t2 = K::alpha().scale(&rat(-1, 2)).add(&K::beta().scale(&rat(-1, 2)));
        assert_eq!(
            t2.rational_coordinates(),
            [rat_i(0), rat(-1, 2), rat_i(0), rat(-1, 2), rat_i(0), rat_i(0)]
        );
        assert_eq!(
            K::from_rat(&rat_i(7)).rational_coordinates(),
            [rat_i(7), rat_i(0), rat_i(0), rat_i(0), rat_i(0), rat_i(0)]
        );
        let ab = K::alpha().mul(&K::beta());
        assert_eq!(
            ab.rational_coordinates(),
            [rat_i(0), rat_i(0), rat_i(0), rat_i(0), rat_i(1), rat_i(0)]
        );
    }

    #[test]
    fn text_roundtrip() {
        let samples = [
            K::zero(),
            K::one(),
            k([3, -1, 2, 1, 5, -7]),
            K::from_coords([rat(1, 2), rat(-3, 4), rat_i(0), rat(2, 7), rat_i(1), rat_i(0)]),
        ];
        for x in samples {
            let s = x.to_text();
            let y = K::parse(&s).unwrap();
            assert_eq!(x, y, "roundtrip failed for {s}");
        }
        // hand-written sparse forms parse too
        assert_eq!(K::parse("a^2*b").unwrap(), k([0, 0, 0, 0, 0, 1]));
        assert_eq!(K::parse("1/2 - a").unwrap(), K::from_coords([
            rat(1, 2),
            rat_i(-1),
            rat_i(0),
            rat_i(0),
            rat_i(0),
            rat_i(0)
        ]));
    }

    #[test]
    fn interval_pow_straddles_zero() {
        let iv = Interval::new(rat_i(-2), rat_i(1));
        let sq = iv.pow(2);
        assert_eq!(sq.lo, rat_i(0));
        assert_eq!(sq.hi, rat_i(4));
        let cube = iv.pow(3);
        assert_eq!(cube.lo, rat_i(-8));
        assert_eq!(cube.hi, rat_i(1));
    }

    #[test]
    fn beta_descriptors() {
        let [d1, d2] = beta_roots();
        assert_eq!(d1.root, BetaRoot::First);
        assert_eq!(d2.root, BetaRoot::Second);
        assert!(d1.beta_interval.contains(&rat(31, 100)));
        assert!(d2.beta_interval.contains(&rat(-19, 10)));
        assert_eq!(d1.minpoly_alpha(), vec![rat_i(-2), rat_i(0), rat_i(0), rat_i(1)]);
    }
}
