//! Sparse multivariate polynomials over Q or the tower K: arithmetic,
//! calculus, substitution, graded monomial bases, and a bit-exact text form.

use crate::exactnum::{
    parse_rat, parse_tower_terms, rat_i, rat_to_string, AlgebraicNumber, Field, Interval, Rat,
};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

pub const MAX_VARS: usize = 8;

/// Power product in up to eight variables with cached total degree.
/// The derived `Ord` is degrevlex ascending, so a `BTreeMap`'s last key is
/// the degrevlex leading monomial.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    pub e: [u8; MAX_VARS],
    pub n: u8,
    deg: u8,
}

impl Monomial {
    pub fn new(n: usize, exps: &[u8]) -> Self {
        assert!(n <= MAX_VARS && exps.len() <= n);
        let mut e = [0u8; MAX_VARS];
        e[..exps.len()].copy_from_slice(exps);
        let deg = e.iter().map(|&x| x as u16).sum::<u16>();
        assert!(deg <= u8::MAX as u16);
        Monomial {
            e,
            n: n as u8,
            deg: deg as u8,
        }
    }

    pub fn one(n: usize) -> Self {
        Monomial::new(n, &[])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = [0u8; MAX_VARS];
        e[i] = 1;
        Monomial {
            e,
            n: n as u8,
            deg: 1,
        }
    }

    pub fn degree(&self) -> usize {
        self.deg as usize
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        let mut e = [0u8; MAX_VARS];
        for i in 0..self.n as usize {
            e[i] = self.e[i] + o.e[i];
        }
        Monomial {
            e,
            n: self.n,
            deg: self.deg + o.deg,
        }
    }

    pub fn divides(&self, o: &Self) -> bool {
        (0..self.n as usize).all(|i| self.e[i] <= o.e[i])
    }

    /// o / self, assuming divisibility.
    pub fn div_into(&self, o: &Self) -> Self {
        debug_assert!(self.divides(o));
        let mut e = [0u8; MAX_VARS];
        for i in 0..self.n as usize {
            e[i] = o.e[i] - self.e[i];
        }
        Monomial {
            e,
            n: self.n,
            deg: o.deg - self.deg,
        }
    }

    pub fn lcm(&self, o: &Self) -> Self {
        let mut e = [0u8; MAX_VARS];
        let mut deg = 0u16;
        for i in 0..self.n as usize {
            e[i] = self.e[i].max(o.e[i]);
            deg += e[i] as u16;
        }
        Monomial {
            e,
            n: self.n,
            deg: deg as u8,
        }
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    pub fn to_text(&self, names: &[String]) -> String {
        if self.is_one() {
            return "1".into();
        }
        let mut parts = Vec::new();
        for i in 0..self.n as usize {
            match self.e[i] {
                0 => {}
                1 => parts.push(names[i].clone()),
                k => parts.push(format!("{}^{}", names[i], k)),
            }
        }
        parts.join("*")
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        MonomialOrder::DegRevLex.cmp(self, o)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Total orders compatible with multiplication. Comparisons are ascending;
/// descending listings reverse them.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MonomialOrder {
    DegRevLex,
    Lex,
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::DegRevLex => {
                match a.deg.cmp(&b.deg) {
                    Ordering::Equal => {}
                    ne => return ne,
                }
                // equal degree: greater iff the last nonzero exponent
                // difference is negative
                for i in (0..a.n as usize).rev() {
                    match a.e[i].cmp(&b.e[i]) {
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal => {}
                    }
                }
                Ordering::Equal
            }
            MonomialOrder::Lex => {
                for i in 0..a.n as usize {
                    match a.e[i].cmp(&b.e[i]) {
                        Ordering::Equal => {}
                        ne => return ne,
                    }
                }
                Ordering::Equal
            }
        }
    }
}

/// All degree-d monomials in n variables, listed in descending `order`.
pub fn monomial_basis(n: usize, d: usize, order: MonomialOrder) -> Vec<Monomial> {
    assert!(n >= 1 && n <= MAX_VARS && d <= u8::MAX as usize);
    let mut out = Vec::new();
    let mut exps = vec![0u8; n];
    fn rec(exps: &mut Vec<u8>, i: usize, left: usize, n: usize, out: &mut Vec<Monomial>) {
        if i == n - 1 {
            exps[i] = left as u8;
            out.push(Monomial::new(n, exps));
            return;
        }
        for v in (0..=left).rev() {
            exps[i] = v as u8;
            rec(exps, i + 1, left - v, n, out);
        }
    }
    rec(&mut exps, 0, d, n, &mut out);
    // recursion emits lex-descending; re-sort for other orders
    if order != MonomialOrder::Lex {
        out.sort_by(|a, b| order.cmp(b, a));
    }
    out
}

/// Sparse polynomial; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial<C: Field> {
    pub n: usize,
    pub terms: BTreeMap<Monomial, C>,
}

impl<C: Field> Polynomial<C> {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: C) -> Self {
        let mut p = Self::zero(n);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(n), c);
        }
        p
    }

    pub fn variable(n: usize, i: usize) -> Self {
        let mut p = Self::zero(n);
        p.terms.insert(Monomial::var(n, i), C::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(n: usize, it: I) -> Self {
        let mut p = Self::zero(n);
        for (m, c) in it {
            p.add_term(&m, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, m: &Monomial, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(m) {
            Some(cur) => {
                let s = cur.add(c);
                if s.is_zero() {
                    self.terms.remove(m);
                } else {
                    *cur = s;
                }
            }
            None => {
                self.terms.insert(*m, c.clone());
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n, "variable-list mismatch");
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n, "variable-list mismatch");
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m, &c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Polynomial {
            n: self.n,
            terms: self.terms.iter().map(|(m, x)| (*m, x.mul(c))).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Polynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(mm, x)| (mm.mul(m), x.mul(c)))
                .collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n, "variable-list mismatch");
        let mut out = Self::zero(self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(&m1.mul(m2), &c1.mul(c2));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.n, C::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys();
        match it.next() {
            None => true,
            Some(first) => {
                let d = first.degree();
                it.all(|m| m.degree() == d)
            }
        }
    }

    /// Exact evaluation at a point of field elements.
    pub fn evaluate(&self, pt: &[C]) -> C {
        assert_eq!(pt.len(), self.n, "point length mismatch");
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..self.n {
                for _ in 0..m.e[i] {
                    t = t.mul(&pt[i]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn partial_derivative(&self, var: usize) -> Self {
        assert!(var < self.n, "var out of range");
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let k = m.e[var];
            if k == 0 {
                continue;
            }
            let mut e = m.e;
            e[var] -= 1;
            let dm = Monomial::new(self.n, &e[..self.n]);
            out.add_term(&dm, &c.mul(&C::from_i64(k as i64)));
        }
        out
    }

    /// Exact substitution: every variable maps to its image (identity when
    /// absent from `assignments`), extended as a ring homomorphism.
    pub fn substitute(&self, assignments: &BTreeMap<usize, Polynomial<C>>) -> Self {
        for (v, q) in assignments {
            assert!(*v < self.n, "var out of range");
            assert_eq!(q.n, self.n, "variable-list mismatch");
        }
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let mut t = Self::constant(self.n, c.clone());
            for i in 0..self.n {
                if m.e[i] == 0 {
                    continue;
                }
                match assignments.get(&i) {
                    Some(img) => t = t.mul(&img.pow(m.e[i] as u32)),
                    None => {
                        let mut e = [0u8; MAX_VARS];
                        e[i] = m.e[i];
                        t = t.mul_monomial(&Monomial::new(self.n, &e[..self.n]), &C::one());
                    }
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Leading monomial under the given order, if nonzero.
    pub fn leading_monomial(&self, order: MonomialOrder) -> Option<Monomial> {
        match order {
            MonomialOrder::DegRevLex => self.terms.keys().next_back().copied(),
            _ => self
                .terms
                .keys()
                .max_by(|a, b| order.cmp(a, b))
                .copied(),
        }
    }

    pub fn leading_coeff(&self, order: MonomialOrder) -> Option<C> {
        self.leading_monomial(order).map(|m| self.coeff(&m))
    }

    /// Terms listed in graded-lex descending order (reading order).
    pub fn sorted_terms(&self) -> Vec<(Monomial, C)> {
        let mut v: Vec<(Monomial, C)> = self.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        v.sort_by(|a, b| {
            b.0.degree()
                .cmp(&a.0.degree())
                .then_with(|| MonomialOrder::Lex.cmp(&b.0, &a.0))
        });
        v
    }
}

impl Polynomial<Rat> {
    /// Enclosing interval of the value over a box of intervals. Powers are
    /// computed with `Interval::pow` so even powers stay tight across zero.
    pub fn eval_interval(&self, pt: &[Interval]) -> Interval {
        assert_eq!(pt.len(), self.n, "point length mismatch");
        let mut acc = Interval::point(rat_i(0));
        for (m, c) in &self.terms {
            let mut t = Interval::point(rat_i(1));
            for i in 0..self.n {
                if m.e[i] > 0 {
                    t = t.mul(&pt[i].pow(m.e[i] as u32));
                }
            }
            acc = acc.add(&t.scale(c));
        }
        acc
    }

    pub fn promote(&self) -> Polynomial<AlgebraicNumber> {
        Polynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, AlgebraicNumber::from_rat(c)))
                .collect(),
        }
    }
}

impl Polynomial<AlgebraicNumber> {
    /// Exact demotion to Q when every coefficient is rational.
    pub fn demote(&self) -> Option<Polynomial<Rat>> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            terms.insert(*m, c.as_rat()?);
        }
        Some(Polynomial { n: self.n, terms })
    }
}

/// Default variable names: x0..x3 then y0..y3, truncated to n.
pub fn default_names(n: usize) -> Vec<String> {
    let all = ["x0", "x1", "x2", "x3", "y0", "y1", "y2", "y3"];
    assert!(n <= all.len());
    all[..n].iter().map(|s| s.to_string()).collect()
}

pub const FIELD_HEADER: &str = "Q(a^3=2; b^2+a^2*b+1-a^2=0)";

fn coeff_to_text<C: Field>(c: &C) -> String {
    match c.as_rat() {
        Some(r) => rat_to_string(&r),
        // tower coefficients print parenthesized in canonical form
        None => format!("({})", c.to_tower().to_text()),
    }
}

/// Render one polynomial as a single line of the text grammar.
pub fn poly_to_text<C: Field>(p: &Polynomial<C>, names: &[String]) -> String {
    assert_eq!(names.len(), p.n);
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.sorted_terms().iter().enumerate() {
        let coef = coeff_to_text(c);
        let (sign, mag) = match coef.strip_prefix('-') {
            Some(rest) if !coef.starts_with("(-") => ("-", rest.to_string()),
            _ => ("+", coef),
        };
        if i == 0 {
            if sign == "-" {
                out.push('-');
            }
        } else {
            out.push_str(if sign == "-" { " - " } else { " + " });
        }
        if m.is_one() {
            out.push_str(&mag);
        } else if mag == "1" {
            out.push_str(&m.to_text(names));
        } else {
            out.push_str(&mag);
            out.push('*');
            out.push_str(&m.to_text(names));
        }
    }
    out
}

/// Split a polynomial body into signed term strings, respecting parentheses.
fn split_terms(s: &str) -> Vec<String> {
    let mut terms = Vec::new();
    let mut cur = String::new();
    let mut depth = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '+' | '-' if depth == 0 && i > 0 => {
                let prev = s[..i].chars().rev().find(|c| !c.is_whitespace());
                if !matches!(prev, Some('^') | Some('*') | Some('/') | Some('+') | Some('-')) {
                    terms.push(cur.clone());
                    cur.clear();
                }
            }
            _ => {}
        }
        cur.push(ch);
    }
    terms.push(cur);
    terms.into_iter().filter(|t| !t.trim().is_empty()).collect()
}

fn parse_term<C: Field>(
    t: &str,
    names: &[String],
) -> Result<(Monomial, C), String> {
    let t = t.trim();
    let (mut sign, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, t.strip_prefix('+').map(str::trim).unwrap_or(t)),
    };
    let _ = &mut sign;
    // split on '*' outside parentheses
    let mut pieces = Vec::new();
    let mut cur = String::new();
    let mut depth = 0usize;
    for ch in body.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
            }
            '*' if depth == 0 => {
                pieces.push(cur.clone());
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    pieces.push(cur);
    let n = names.len();
    let mut e = [0u8; MAX_VARS];
    let mut coef = C::one();
    let mut saw_any = false;
    for p in pieces {
        let p = p.trim();
        if p.is_empty() {
            continue;
        }
        saw_any = true;
        // a '^' counts as a variable exponent only outside parentheses;
        // tower literals keep theirs inside
        let caret = {
            let mut depth = 0usize;
            let mut found = None;
            for (i, ch) in p.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => depth = depth.saturating_sub(1),
                    '^' if depth == 0 => {
                        found = Some(i);
                        break;
                    }
                    _ => {}
                }
            }
            found
        };
        let (base, exp) = match caret {
            Some(i) => (
                p[..i].trim(),
                p[i + 1..]
                    .trim()
                    .parse::<u8>()
                    .map_err(|err| format!("bad exponent in {p:?}: {err}"))?,
            ),
            None => (p, 1u8),
        };
        if let Some(vi) = names.iter().position(|nm| nm == base) {
            e[vi] += exp;
        } else if exp != 1 {
            return Err(format!("exponent on non-variable {p:?}"));
        } else if let Some(inner) = base.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
            let mut k = AlgebraicNumber::zero();
            for (idx, c) in parse_tower_terms(inner)? {
                k.c[idx] += c;
            }
            coef = coef.mul(&k_to_c(&k)?);
        } else {
            coef = coef.mul(&C::from_rat(&parse_rat(base)?));
        }
    }
    if !saw_any {
        return Err(format!("empty term {t:?}"));
    }
    if sign {
        coef = coef.neg();
    }
    Ok((Monomial::new(n, &e[..n]), coef))
}

fn k_to_c<C: Field>(k: &AlgebraicNumber) -> Result<C, String> {
    C::from_tower(k).ok_or_else(|| "tower coefficient in a rational-coefficient context".into())
}

/// Parse one polynomial line against a fixed variable list.
pub fn poly_from_text<C: Field>(s: &str, names: &[String]) -> Result<Polynomial<C>, String> {
    let s = s.trim();
    if s == "0" {
        return Ok(Polynomial::zero(names.len()));
    }
    let mut p = Polynomial::zero(names.len());
    for t in split_terms(s) {
        let (m, c) = parse_term::<C>(&t, names)?;
        p.add_term(&m, &c);
    }
    Ok(p)
}

/// A parsed polynomial file: optional headers, then one polynomial per line.
pub struct PolyFile<C: Field> {
    pub names: Vec<String>,
    pub tower: bool,
    pub polys: Vec<Polynomial<C>>,
}

pub fn parse_poly_file<C: Field>(text: &str) -> Result<PolyFile<C>, String> {
    let mut names: Option<Vec<String>> = None;
    let mut tower = false;
    let mut polys = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("vars:") {
            names = Some(rest.split_whitespace().map(|s| s.to_string()).collect());
            continue;
        }
        if let Some(rest) = line.strip_prefix("field:") {
            let rest = rest.trim();
            if rest != FIELD_HEADER {
                return Err(format!("unsupported field {rest:?}"));
            }
            tower = true;
            continue;
        }
        let nm = names
            .clone()
            .ok_or_else(|| "polynomial before vars: header".to_string())?;
        polys.push(poly_from_text::<C>(line, &nm)?);
    }
    let names = names.ok_or_else(|| "missing vars: header".to_string())?;
    if names.is_empty() || names.len() > MAX_VARS {
        return Err(format!("variable count {} out of range", names.len()));
    }
    Ok(PolyFile {
        names,
        tower,
        polys,
    })
}

pub fn render_poly_file<C: Field>(
    names: &[String],
    tower: bool,
    polys: &[Polynomial<C>],
) -> String {
    let mut out = format!("vars: {}\n", names.join(" "));
    if tower {
        out.push_str(&format!("field: {FIELD_HEADER}\n"));
    }
    for p in polys {
        out.push_str(&poly_to_text(p, names));
        out.push('\n');
    }
    out
}

impl<C: Field> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", poly_to_text(self, &default_names(self.n)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, K};

    fn pq(s: &str, n: usize) -> Polynomial<Rat> {
        poly_from_text::<Rat>(s, &default_names(n)).unwrap()
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(monomial_basis(4, 2, MonomialOrder::Lex).len(), 10);
        assert_eq!(monomial_basis(4, 4, MonomialOrder::Lex).len(), 35);
        assert_eq!(monomial_basis(8, 4, MonomialOrder::DegRevLex).len(), 330);
        assert_eq!(monomial_basis(8, 2, MonomialOrder::Lex).len(), 36);
    }

    #[test]
    fn quadratic_basis_listing_order() {
        let names = default_names(4);
        let listed: Vec<String> = monomial_basis(4, 2, MonomialOrder::Lex)
            .iter()
            .map(|m| m.to_text(&names))
            .collect();
        assert_eq!(
            listed,
            vec![
                "x0^2", "x0*x1", "x0*x2", "x0*x3", "x1^2", "x1*x2", "x1*x3", "x2^2", "x2*x3",
                "x3^2"
            ]
        );
    }

    #[test]
    fn degrevlex_vs_lex() {
        let a = Monomial::new(4, &[0, 2, 0, 0]); // x1^2
        let b = Monomial::new(4, &[1, 0, 0, 1]); // x0*x3
        assert_eq!(MonomialOrder::DegRevLex.cmp(&a, &b), Ordering::Greater);
        assert_eq!(MonomialOrder::Lex.cmp(&a, &b), Ordering::Less);
    }

    #[test]
    fn arithmetic_and_eval() {
        let p = pq("x0^2 - 2*x0*x1 + x1^2", 4);
        let q = pq("x0 - x1", 4);
        assert_eq!(q.mul(&q), p);
        let pt = [rat_i(3), rat_i(1), rat_i(0), rat_i(0)];
        assert_eq!(p.evaluate(&pt), rat_i(4));
        assert_eq!(p.add(&p.neg()), Polynomial::zero(4));
        // evaluate is multiplicative
        let r = pq("2*x0*x3 + 1/2*x2^2", 4);
        let pt2 = [rat(1, 2), rat_i(-3), rat_i(2), rat(5, 7)];
        assert_eq!(
            p.mul(&r).evaluate(&pt2),
            p.evaluate(&pt2) * r.evaluate(&pt2)
        );
    }

    #[test]
    fn derivative_and_euler() {
        let p = pq("x0^4 + 7*x0^2*x1^2 - 3*x1*x2^3", 4);
        let d0 = p.partial_derivative(0);
        assert_eq!(d0, pq("4*x0^3 + 14*x0*x1^2", 4));
        // Euler: sum_i xi d_i p = 4p for homogeneous degree 4
        assert!(p.is_homogeneous());
        let mut acc = Polynomial::zero(4);
        for i in 0..4 {
            acc = acc.add(&p.partial_derivative(i).mul(&Polynomial::variable(4, i)));
        }
        assert_eq!(acc, p.scale(&rat_i(4)));
    }

    #[test]
    fn substitution() {
        let p = pq("x0^2*x2 + x2^2 - x3^2", 4);
        let mut asg = BTreeMap::new();
        asg.insert(2usize, Polynomial::zero(4));
        assert_eq!(p.substitute(&asg), pq("-x3^2", 4));
        // r[x2 := y2] = 0 for r = x2^2 - y2^2
        let r = pq("x2^2 - y2^2", 8);
        let mut asg2 = BTreeMap::new();
        asg2.insert(2usize, Polynomial::variable(8, 6));
        assert!(r.substitute(&asg2).is_zero());
        // identity substitution
        let mut asg3 = BTreeMap::new();
        asg3.insert(0usize, Polynomial::variable(4, 0));
        assert_eq!(p.substitute(&asg3), p);
    }

    #[test]
    fn interval_evaluation() {
        let p = pq("x0^2 - x1", 4);
        let pt = [
            Interval::new(rat_i(-1), rat_i(2)),
            Interval::new(rat_i(0), rat_i(1)),
            Interval::point(rat_i(0)),
            Interval::point(rat_i(0)),
        ];
        let v = p.eval_interval(&pt);
        // x0^2 in [0,4], x1 in [0,1] so p in [-1,4]
        assert_eq!(v.lo, rat_i(-1));
        assert_eq!(v.hi, rat_i(4));
    }

    #[test]
    fn text_roundtrip_rational() {
        let samples = [
            "40*x0^4 + 8*x0^2*x1^2 - 1/2*x2*x3^3",
            "x0^2 - x1^2",
            "0",
            "-3*x0*x1*x2*x3 + 7",
        ];
        for s in samples {
            let p = pq(s, 4);
            let txt = poly_to_text(&p, &default_names(4));
            let q = poly_from_text::<Rat>(&txt, &default_names(4)).unwrap();
            assert_eq!(p, q, "roundtrip failed: {s} -> {txt}");
        }
    }

    #[test]
    fn text_roundtrip_tower() {
        let names = default_names(4);
        let s = "(0 + -4*a + 4*a^2 + 0*b + 0*a*b + 0*a^2*b)*x0^2 + x1^2 - (0 + 0*a + 0*a^2 + 1*b + 0*a*b + 0*a^2*b)*x1*x2";
        let p = poly_from_text::<K>(s, &names).unwrap();
        assert_eq!(
            p.coeff(&Monomial::new(4, &[2, 0, 0, 0])),
            K::alpha().scale(&rat_i(-4)).add(&K::alpha().pow(2).scale(&rat_i(4)))
        );
        let txt = poly_to_text(&p, &names);
        let q = poly_from_text::<K>(&txt, &names).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn poly_file_roundtrip() {
        let text = "vars: x0 x1 x2 x3\nx0^2 - x1*x2\nx3^4\n";
        let pf = parse_poly_file::<Rat>(text).unwrap();
        assert_eq!(pf.polys.len(), 2);
        assert!(!pf.tower);
        let rendered = render_poly_file(&pf.names, pf.tower, &pf.polys);
        let pf2 = parse_poly_file::<Rat>(&rendered).unwrap();
        assert_eq!(pf.polys, pf2.polys);
    }

    #[test]
    fn promote_demote() {
        let p = pq("x0^2 - 3*x1*x2", 4);
        let pk = p.promote();
        assert_eq!(pk.demote().unwrap(), p);
        let mut pk2 = pk.clone();
        pk2.add_term(&Monomial::new(4, &[0, 0, 0, 2]), &K::alpha());
        assert!(pk2.demote().is_none());
    }
}
