//! Floating-point discovery layer: Jacobi eigendecomposition, alternating
//! projections onto (PSD cone) ∩ (affine subspace), and rational rounding of
//! numeric candidates back to exact values.

use crate::exactnum::{AlgebraicNumber, Embedding, Rat};
use crate::multipoly::Monomial;
use num::bigint::BigInt;
use num::{BigRational, FromPrimitive, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum NumoptError {
    #[error("jacobi sweeps did not converge within {0} sweeps")]
    NonConvergence(usize),
}

/// Dense symmetric matrix of doubles; symmetry is enforced by averaging.
#[derive(Clone, Debug)]
pub struct FloatSymMatrix {
    pub n: usize,
    pub e: Vec<f64>,
}

impl FloatSymMatrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), n * n);
        let mut e = entries;
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (e[i * n + j] + e[j * n + i]);
                e[i * n + j] = avg;
                e[j * n + i] = avg;
            }
        }
        FloatSymMatrix { n, e }
    }

    pub fn zero(n: usize) -> Self {
        FloatSymMatrix {
            n,
            e: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                e[i * n + j] = f(i, j);
            }
        }
        Self::new(n, e)
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.e[i * self.n + j]
    }

    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.e[i * self.n + j] = v;
        self.e[j * self.n + i] = v;
    }

    pub fn min_eigenvalue(&self, tol: f64) -> Result<f64, NumoptError> {
        let (evals, _) = jacobi_eigen(self, tol)?;
        Ok(*evals.last().unwrap_or(&0.0))
    }
}

/// Cyclic Jacobi eigendecomposition. Returns eigenvalues sorted descending
/// and matching orthonormal eigenvectors.
pub fn jacobi_eigen(
    m: &FloatSymMatrix,
    tol: f64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), NumoptError> {
    assert!(tol > 0.0);
    let n = m.n;
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut a = m.e.clone();
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    const MAX_SWEEPS: usize = 100;
    let mut sweeps = 0;
    while off(&a) > tol {
        if sweeps >= MAX_SWEEPS {
            return Err(NumoptError::NonConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].partial_cmp(&a[i * n + i]).unwrap());
    let evals: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let evecs: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();
    Ok((evals, evecs))
}

/// Count of eigenvalues above `factor` times the largest magnitude.
pub fn estimate_rank(evals: &[f64], factor: f64) -> usize {
    let max = evals.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if max == 0.0 {
        return 0;
    }
    evals.iter().filter(|&&x| x > factor * max).count()
}

/// Affine family of symmetric matrices: offset + span(dirs).
#[derive(Clone, Debug)]
pub struct AffineFloatSpace {
    pub offset: FloatSymMatrix,
    pub dirs: Vec<FloatSymMatrix>,
}

#[derive(Clone, Debug)]
pub struct ProjectionConfig {
    pub max_iters: usize,
    pub tol: f64,
    pub relax: f64,
    pub eig_floor: f64,
    pub rank_threshold_factor: f64,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        ProjectionConfig {
            max_iters: 20_000,
            tol: 1e-12,
            relax: 1.0,
            eig_floor: 0.0,
            rank_threshold_factor: 1e-6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProjectionResult {
    pub matrix: FloatSymMatrix,
    pub estimated_rank: usize,
    pub min_eigenvalue: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn frob_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Least-squares solve of the direction Gram system via eigendecomposition
/// (pseudoinverse), tolerant of dependent directions.
struct AffineProjector {
    dirs: Vec<Vec<f64>>,
    offset: Vec<f64>,
    gram_evals: Vec<f64>,
    gram_evecs: Vec<Vec<f64>>,
}

impl AffineProjector {
    fn new(space: &AffineFloatSpace) -> Self {
        let k = space.dirs.len();
        let dirs: Vec<Vec<f64>> = space.dirs.iter().map(|d| d.e.clone()).collect();
        let mut gram = FloatSymMatrix::zero(k.max(1));
        if k > 0 {
            for i in 0..k {
                for j in i..k {
                    let g = frob_dot(&dirs[i], &dirs[j]);
                    gram.set_sym(i, j, g);
                }
            }
        }
        let (gram_evals, gram_evecs) = if k > 0 {
            jacobi_eigen(&gram, 1e-13).expect("gram eigendecomposition")
        } else {
            (Vec::new(), Vec::new())
        };
        AffineProjector {
            dirs,
            offset: space.offset.e.clone(),
            gram_evals,
            gram_evecs,
        }
    }

    fn project(&self, x: &[f64]) -> Vec<f64> {
        let k = self.dirs.len();
        let mut out = self.offset.clone();
        if k == 0 {
            return out;
        }
        let rhs: Vec<f64> = self
            .dirs
            .iter()
            .map(|d| {
                d.iter()
                    .zip(x.iter().zip(&self.offset))
                    .map(|(di, (xi, oi))| di * (xi - oi))
                    .sum()
            })
            .collect();
        let cutoff = self
            .gram_evals
            .first()
            .map(|&m| m.abs() * 1e-12)
            .unwrap_or(0.0);
        let mut t = vec![0.0; k];
        for (lam, vec) in self.gram_evals.iter().zip(&self.gram_evecs) {
            if lam.abs() <= cutoff {
                continue;
            }
            let c = frob_dot(vec, &rhs) / lam;
            for (ti, vi) in t.iter_mut().zip(vec) {
                *ti += c * vi;
            }
        }
        for (ti, d) in t.iter().zip(&self.dirs) {
            for (oi, di) in out.iter_mut().zip(d) {
                *oi += ti * di;
            }
        }
        out
    }
}

fn psd_clip(n: usize, x: &[f64], floor: f64) -> Vec<f64> {
    let m = FloatSymMatrix::new(n, x.to_vec());
    let (evals, evecs) = jacobi_eigen(&m, 1e-13).expect("psd clip eigendecomposition");
    let mut out = vec![0.0; n * n];
    for (lam, v) in evals.iter().zip(&evecs) {
        let l = lam.max(floor);
        if l == 0.0 {
            continue;
        }
        for i in 0..n {
            if v[i] == 0.0 {
                continue;
            }
            let li = l * v[i];
            for j in 0..n {
                out[i * n + j] += li * v[j];
            }
        }
    }
    out
}

/// Alternating (optionally overrelaxed) projections between the PSD cone
/// and an affine family of symmetric matrices. The returned matrix is the
/// final affine-projected iterate, so its affine residual is zero up to
/// roundoff; hitting the iteration cap is reported as `converged: false`.
pub fn project_affine_psd(
    space: &AffineFloatSpace,
    start: Option<&FloatSymMatrix>,
    cfg: &ProjectionConfig,
) -> ProjectionResult {
    let n = space.offset.n;
    let projector = AffineProjector::new(space);
    let mut x: Vec<f64> = start.map(|s| s.e.clone()).unwrap_or_else(|| space.offset.e.clone());
    let mut best = x.clone();
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..cfg.max_iters {
        iterations = it + 1;
        let clipped = psd_clip(n, &x, cfg.eig_floor);
        let z = projector.project(&clipped);
        let mut step = 0.0f64;
        let mut xn = x.clone();
        for i in 0..x.len() {
            let nx = x[i] + cfg.relax * (z[i] - x[i]);
            step = step.max((nx - x[i]).abs());
            xn[i] = nx;
        }
        x = xn;
        best = z;
        if step < cfg.tol {
            converged = true;
            break;
        }
    }
    let matrix = FloatSymMatrix::new(n, best);
    let (evals, _) = jacobi_eigen(&matrix, 1e-13).expect("result eigendecomposition");
    ProjectionResult {
        estimated_rank: estimate_rank(&evals, cfg.rank_threshold_factor),
        min_eigenvalue: *evals.last().unwrap_or(&0.0),
        matrix,
        converged,
        iterations,
    }
}

/// Best rational approximation with denominator at most `max_denominator`,
/// by the continued-fraction convergent/semiconvergent rule.
pub fn rationalize(x: f64, max_denominator: u64) -> Rat {
    assert!(x.is_finite(), "rationalize needs a finite input");
    assert!(max_denominator >= 1);
    let exact = BigRational::from_f64(x).expect("finite float");
    let limit = BigInt::from(max_denominator);
    if *exact.denom() <= limit {
        return exact;
    }
    let (mut n, mut d) = (exact.numer().clone(), exact.denom().clone());
    let (mut p0, mut q0, mut p1, mut q1) = (
        BigInt::zero(),
        BigInt::from(1),
        BigInt::from(1),
        BigInt::zero(),
    );
    loop {
        let a = n.clone() / &d;
        let q2 = &q0 + &a * &q1;
        if q2 > limit {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let r = &n - &a * &d;
        n = std::mem::replace(&mut d, r);
        if d.is_zero() {
            break;
        }
    }
    let k = (&limit - &q0) / &q1;
    let bound1 = Rat::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let bound2 = Rat::new(p1, q1);
    if (&bound2 - &exact).abs() <= (&bound1 - &exact).abs() {
        bound2
    } else {
        bound1
    }
}

/// Configuration for rounding numeric values to exact candidates.
#[derive(Clone, Debug)]
pub struct RoundingConfig {
    pub max_denominator: u64,
    /// Numerator bound for tower-candidate coordinates.
    pub tower_numerator_bound: i64,
    /// Denominator bound for tower-candidate coordinates.
    pub tower_denominator_bound: i64,
    pub tower_tolerance: f64,
}

impl Default for RoundingConfig {
    fn default() -> Self {
        RoundingConfig {
            max_denominator: 1_000_000,
            tower_numerator_bound: 8,
            tower_denominator_bound: 4,
            tower_tolerance: 1e-9,
        }
    }
}

/// Match a double against low-height tower elements with support on at most
/// two basis coordinates. The first hit in a deterministic small-to-large
/// sweep wins; None when nothing lands within tolerance.
pub fn tower_rationalize(
    x: f64,
    emb: &Embedding,
    cfg: &RoundingConfig,
) -> Option<AlgebraicNumber> {
    let (af, bf) = emb.basis_f64();
    let basis_f = [1.0, af, af * af, bf, af * bf, af * af * bf];
    let mut coords: Vec<Rat> = Vec::new();
    let mut floats: Vec<f64> = Vec::new();
    for q in 1..=cfg.tower_denominator_bound {
        for p in -(cfg.tower_numerator_bound)..=cfg.tower_numerator_bound {
            if num::integer::gcd(p.abs(), q) != 1 {
                continue;
            }
            coords.push(Rat::new(BigInt::from(p), BigInt::from(q)));
            floats.push(p as f64 / q as f64);
        }
    }
    // order candidate coefficients by height so simple answers win ties
    let mut idx: Vec<usize> = (0..coords.len()).collect();
    idx.sort_by(|&i, &j| {
        let hi = coords[i].numer().abs().max(coords[i].denom().abs());
        let hj = coords[j].numer().abs().max(coords[j].denom().abs());
        hi.cmp(&hj)
    });
    let hit = |val: f64| (val - x).abs() <= cfg.tower_tolerance;
    if hit(0.0) {
        return Some(AlgebraicNumber::zero());
    }
    // single basis coordinate
    for b in 0..6 {
        for &ci in &idx {
            if hit(floats[ci] * basis_f[b]) {
                let mut out = AlgebraicNumber::zero();
                out.c[b] = coords[ci].clone();
                return Some(out);
            }
        }
    }
    // two basis coordinates
    for b1 in 0..6 {
        for b2 in b1 + 1..6 {
            for &c1 in &idx {
                let part = floats[c1] * basis_f[b1];
                for &c2 in &idx {
                    if hit(part + floats[c2] * basis_f[b2]) {
                        let mut out = AlgebraicNumber::zero();
                        out.c[b1] = coords[c1].clone();
                        out.c[b2] = coords[c2].clone();
                        return Some(out);
                    }
                }
            }
        }
    }
    None
}

/// Round a numeric Gram candidate to rational entries, then repair it with
/// the exact orthogonal projection onto {A : Σ_{m_i m_j = m} A_ij = f_m}:
/// the per-monomial defect is spread equally over that monomial's positions,
/// which are disjoint across monomials, so one pass is exact.
pub fn round_gram_to_exact(
    g: &FloatSymMatrix,
    basis: &[Monomial],
    f: &crate::multipoly::Polynomial<Rat>,
    max_denominator: u64,
) -> crate::linalg::Matrix<Rat> {
    use crate::exactnum::Field;
    let n = basis.len();
    assert_eq!(g.n, n);
    let mut a = crate::linalg::Matrix::<Rat>::zero(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rationalize(g.at(i, j), max_denominator);
            *a.at_mut(i, j) = v.clone();
            *a.at_mut(j, i) = v;
        }
    }
    let mut groups: BTreeMap<Monomial, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            groups.entry(basis[i].mul(&basis[j])).or_default().push((i, j));
        }
    }
    for (m, positions) in &groups {
        let target = f.coeff(m);
        let mut sum = <Rat as num::Zero>::zero();
        for &(i, j) in positions {
            sum += a.at(i, j);
        }
        let delta = (&target - &sum) / Rat::from_integer(BigInt::from(positions.len() as i64));
        if !Field::is_zero(&delta) {
            for &(i, j) in positions {
                let cur = a.at(i, j) + &delta;
                *a.at_mut(i, j) = cur;
            }
        }
    }
    // any monomial of f outside the basis products would make the target
    // space empty; assert exact agreement
    let mut expanded = crate::multipoly::Polynomial::<Rat>::zero(f.n);
    for (m, positions) in &groups {
        let mut sum = <Rat as num::Zero>::zero();
        for &(i, j) in positions {
            sum += a.at(i, j);
        }
        expanded.add_term(m, &sum);
    }
    assert_eq!(&expanded, f, "gram rounding target unreachable");
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, rat_i, BetaRoot};

    #[test]
    fn jacobi_small_examples() {
        let d = FloatSymMatrix::new(2, vec![3.0, 0.0, 0.0, 1.0]);
        let (evals, _) = jacobi_eigen(&d, 1e-12).unwrap();
        assert_eq!(evals, vec![3.0, 1.0]);
        let m = FloatSymMatrix::new(2, vec![0.0, 1.0, 1.0, 0.0]);
        let (evals2, vecs2) = jacobi_eigen(&m, 1e-12).unwrap();
        assert!((evals2[0] - 1.0).abs() < 1e-12 && (evals2[1] + 1.0).abs() < 1e-12);
        // eigenvector residual
        for (lam, v) in evals2.iter().zip(&vecs2) {
            let r0 = m.at(0, 0) * v[0] + m.at(0, 1) * v[1] - lam * v[0];
            let r1 = m.at(1, 0) * v[0] + m.at(1, 1) * v[1] - lam * v[1];
            assert!(r0.abs() < 1e-12 && r1.abs() < 1e-12);
        }
    }

    #[test]
    fn jacobi_orthogonality_36() {
        // deterministic pseudo-random symmetric matrix
        let n = 36;
        let mut state = 0x243F6A8885A308D3u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let m = {
            let mut e = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    e[i * n + j] = next();
                }
            }
            FloatSymMatrix::new(n, e)
        };
        let (evals, vecs) = jacobi_eigen(&m, 1e-12).unwrap();
        let mut max_orth: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d = frob_dot(&vecs[i], &vecs[j]) - if i == j { 1.0 } else { 0.0 };
                max_orth = max_orth.max(d.abs());
            }
        }
        assert!(max_orth < 1e-9, "orthogonality defect {max_orth}");
        let mut max_recon: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += evals[k] * vecs[k][i] * vecs[k][j];
                }
                max_recon = max_recon.max((s - m.at(i, j)).abs());
            }
        }
        assert!(max_recon < 1e-7, "reconstruction defect {max_recon}");
    }

    #[test]
    fn pocs_shrinks_offdiagonal() {
        let space = AffineFloatSpace {
            offset: FloatSymMatrix::new(2, vec![1.0, 2.0, 2.0, 1.0]),
            dirs: vec![FloatSymMatrix::new(2, vec![0.0, 1.0, 1.0, 0.0])],
        };
        let cfg = ProjectionConfig {
            max_iters: 5000,
            tol: 1e-13,
            ..Default::default()
        };
        let res = project_affine_psd(&space, None, &cfg);
        let t = res.matrix.at(0, 1);
        assert!(t.abs() <= 1.0 + 1e-6, "t = {t}");
        assert!(res.min_eigenvalue > -1e-8);
        assert!((res.matrix.at(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pocs_empty_dirs_returns_offset() {
        let space = AffineFloatSpace {
            offset: FloatSymMatrix::new(2, vec![2.0, 0.0, 0.0, 3.0]),
            dirs: vec![],
        };
        let res = project_affine_psd(&space, None, &ProjectionConfig::default());
        assert!(res.converged);
        assert_eq!(res.matrix.e, vec![2.0, 0.0, 0.0, 3.0]);
        assert_eq!(res.estimated_rank, 2);
    }

    #[test]
    fn rationalize_examples() {
        assert_eq!(rationalize(0.5, 10), rat(1, 2));
        assert_eq!(rationalize(0.333333, 100), rat(1, 3));
        let c = rationalize(1.259921, 1_000_000);
        let cubed = &c * &c * &c;
        let err = (cubed - rat_i(2)).abs();
        assert!(err < rat(1, 100_000));
    }

    #[test]
    fn tower_rounding() {
        let emb = Embedding::new(BetaRoot::First);
        let (af, bf) = emb.basis_f64();
        let cfg = RoundingConfig::default();
        let alpha = tower_rationalize(af, &emb, &cfg).unwrap();
        assert_eq!(alpha, crate::exactnum::K::alpha());
        let t2 = tower_rationalize(-0.5 * af - 0.5 * bf, &emb, &cfg).unwrap();
        assert_eq!(
            t2.rational_coordinates(),
            [rat_i(0), rat(-1, 2), rat_i(0), rat(-1, 2), rat_i(0), rat_i(0)]
        );
        assert!(tower_rationalize(0.123456789, &emb, &cfg).is_none());
    }

    #[test]
    fn gram_rounding_repairs_exactly() {
        use crate::multipoly::{poly_from_text, default_names};
        // f = (x0^2 + x1^2)^2 over basis (x0^2, x0*x1, x1^2)
        let f = poly_from_text::<Rat>(
            "x0^4 + 2*x0^2*x1^2 + x1^4",
            &default_names(2),
        )
        .unwrap();
        let basis = vec![
            Monomial::new(2, &[2, 0]),
            Monomial::new(2, &[1, 1]),
            Monomial::new(2, &[0, 2]),
        ];
        let g = FloatSymMatrix::new(
            3,
            vec![
                1.0000001, 0.0, 0.01, //
                0.0, 1.9999998, 0.0, //
                0.01, 0.0, 0.9999999,
            ],
        );
        let a = round_gram_to_exact(&g, &basis, &f, 1000);
        // exact expansion equality is asserted inside; PSD-ness checked here
        let out = crate::linalg::psd_decide(&a, &crate::exactnum::QSign).unwrap();
        assert!(out.is_psd());
    }

    #[test]
    fn gram_rounding_identity_fixed_point() {
        use crate::multipoly::{default_names, poly_from_text};
        let f = poly_from_text::<Rat>("x0^4 + x1^4", &default_names(2)).unwrap();
        let basis = vec![
            Monomial::new(2, &[2, 0]),
            Monomial::new(2, &[1, 1]),
            Monomial::new(2, &[0, 2]),
        ];
        let g = FloatSymMatrix::new(3, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let a = round_gram_to_exact(&g, &basis, &f, 10);
        assert_eq!(*a.at(0, 0), rat_i(1));
        assert_eq!(*a.at(1, 1), rat_i(0));
        assert_eq!(*a.at(0, 2), rat_i(0));
    }
}
