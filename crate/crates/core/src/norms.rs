//! Certified operator norms.
//!
//! The spectral norm is computed as `√λmax(T*T)` by bisection: a successful
//! Cholesky factorization of `σI − T*T` shows `σ > λmax`, a failed one shows
//! `σ ≤ λmax`. Representation matrices are banded (or banded plus a cyclic
//! wrap), so factorizations are done on the matrix envelope.

use std::collections::HashSet;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::dynsys::{DynamicalSystem, Point};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::extension::{extend_periodic, lift_point, Chooser, ExtPoint};
use crate::funcalg::{ExtFunction, NormBracket};
use crate::repr::{
    orbit_rep_sparse, orbit_sparse_from_values, periodic_rep_matrix, periodic_sparse, BilateralOrbit, Matrix,
    PeriodicOrbit, Sparse, LAMBDA_TOL,
};

/// Lower triangle of a Hermitian matrix restricted to its envelope:
/// `rows[i][j − first[i]] = H[i][j]` for `first[i] ≤ j ≤ i`.
struct Profile {
    first: Vec<usize>,
    rows: Vec<Vec<Complex64>>,
}

impl Profile {
    /// `T* T` for a sparse `T`.
    fn gram(t: &Sparse) -> Self {
        let n = t.n;
        let mut by_row: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); n];
        for &(i, j, v) in &t.entries {
            if !v.is_zero() {
                by_row[i].push((j, v));
            }
        }
        let mut dense: Vec<Vec<Complex64>> = (0..n).map(|i| vec![Complex64::zero(); i + 1]).collect();
        for row in &by_row {
            for &(a, va) in row {
                for &(b, vb) in row {
                    if a >= b {
                        dense[a][b] += va.conj() * vb;
                    }
                }
            }
        }
        let mut first = Vec::with_capacity(n);
        let mut rows = Vec::with_capacity(n);
        for (i, mut r) in dense.into_iter().enumerate() {
            let f = r.iter().position(|v| !v.is_zero()).unwrap_or(i);
            r.drain(..f);
            first.push(f);
            rows.push(r);
        }
        Self { first, rows }
    }

    fn get(&self, i: usize, j: usize) -> Complex64 {
        let (i, j, conj) = if i >= j { (i, j, false) } else { (j, i, true) };
        if j < self.first[i] {
            return Complex64::zero();
        }
        let v = self.rows[i][j - self.first[i]];
        if conj {
            v.conj()
        } else {
            v
        }
    }

    fn n(&self) -> usize {
        self.rows.len()
    }

    /// Lower and upper starting bounds for `λmax`.
    fn initial_bounds(&self) -> (f64, f64) {
        let n = self.n();
        let lo = (0..n).map(|i| self.get(i, i).re).fold(0.0, f64::max);
        let mut row_sums = vec![0.0; n];
        for i in 0..n {
            for (off, v) in self.rows[i].iter().enumerate() {
                let j = self.first[i] + off;
                row_sums[i] += v.norm();
                if j != i {
                    row_sums[j] += v.norm();
                }
            }
        }
        (lo, row_sums.into_iter().fold(0.0, f64::max).max(lo))
    }

    /// Whether `σI − H` is positive definite (Cholesky on the envelope).
    fn shifted_positive_definite(&self, sigma: f64) -> bool {
        let n = self.n();
        let mut l: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        for i in 0..n {
            let fi = self.first[i];
            let mut row = vec![Complex64::zero(); i + 1 - fi];
            for j in fi..=i {
                let fj = self.first[j];
                let mut s = -self.rows[i][j - fi];
                if j == i {
                    s += sigma;
                }
                let start = fi.max(fj);
                if j < i {
                    for k in start..j {
                        s -= row[k - fi] * l[j][k - fj].conj();
                    }
                } else {
                    for k in start..j {
                        s -= row[k - fi].norm_sqr();
                    }
                }
                if j < i {
                    row[j - fi] = s / l[j][j - fj].re;
                } else {
                    let d = s.re;
                    if !(d > 0.0) {
                        return false;
                    }
                    row[i - fi] = Complex64::new(d.sqrt(), 0.0);
                }
            }
            l.push(row);
        }
        true
    }

    /// Bracket for `λmax`, bisected to machine precision.
    fn lambda_max(&self) -> (f64, f64) {
        let (mut lo, mut hi) = self.initial_bounds();
        if hi <= 0.0 {
            return (0.0, 0.0);
        }
        if !self.shifted_positive_definite(hi * (1.0 + 4.0 * f64::EPSILON) + f64::MIN_POSITIVE) {
            // Gershgorin already bounds λmax; only roundoff can land here.
            hi *= 1.0 + 1e-12;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.shifted_positive_definite(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo, hi)
    }
}

/// `[lower, upper]` for the largest singular value of a sparse matrix.
pub fn sparse_norm_bracket(t: &Sparse) -> Result<(f64, f64)> {
    if t.entries.iter().any(|(_, _, v)| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let (lo, hi) = Profile::gram(t).lambda_max();
    Ok((lo.sqrt(), hi.sqrt()))
}

pub fn spectral_norm_bracket(m: &Matrix) -> Result<(f64, f64)> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    sparse_norm_bracket(&Sparse { n: m.dim(), entries: m.entries() })
}

/// Largest singular value (relative accuracy well below `1e−9`).
pub fn spectral_norm(m: &Matrix) -> Result<f64> {
    Ok(spectral_norm_bracket(m)?.1)
}

fn sparse_norm(t: &Sparse) -> Result<f64> {
    Ok(sparse_norm_bracket(t)?.1)
}

/// One convergence record.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// `"A"` (orbit truncations), `"B"` (periodic `λ`-grid) or `"X"`
    /// (bilateral windows on the extension).
    pub family: &'static str,
    pub label: String,
    pub param: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    pub bracket: NormBracket,
    pub traces: Vec<Trace>,
}

impl NormEstimate {
    pub fn traces_tsv(&self) -> String {
        let mut s = String::from("family\tlabel\tparam\tvalue\n");
        for t in &self.traces {
            s.push_str(&format!("{}\t{}\t{:.6}\t{:.6}\n", t.family, t.label, t.param, t.value));
        }
        s
    }
}

/// Sampling budgets for the norm estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct Budget {
    pub n_max: usize,
    pub grid: usize,
    pub window: usize,
    pub seed: u64,
    pub procedural: usize,
    pub max_denominator: u64,
    pub max_word_period: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self { n_max: 256, grid: 256, window: 128, seed: 0, procedural: 32, max_denominator: 63, max_word_period: 6 }
    }
}

impl Budget {
    pub fn describe(&self) -> String {
        format!("nmax={},grid={},window={},seed={}", self.n_max, self.grid, self.window, self.seed)
    }
}

/// Default sample points: `(orbit-representation points, periodic points)`.
pub fn default_samples(sys: &DynamicalSystem, budget: &Budget) -> Result<(Vec<Point>, Vec<Point>)> {
    let periodic = match sys {
        DynamicalSystem::CircleTimesK { k } => {
            let mut pts = Vec::new();
            for q in 1..=budget.max_denominator {
                if q.gcd(&(*k as u64)) != 1 {
                    continue;
                }
                for p in 0..q {
                    if p.gcd(&q) == 1 || (p == 0 && q == 1) {
                        pts.push(Point::Rational(BigRational::new(BigInt::from(p), BigInt::from(q))));
                    }
                }
            }
            pts
        }
        _ => sys.periodic_points(budget.max_word_period),
    };
    let mut general = periodic.clone();
    if !matches!(sys, DynamicalSystem::Permutation(_)) {
        for i in 0..budget.procedural as u64 {
            general.push(sys.procedural_point(budget.seed.wrapping_add(i))?);
        }
    }
    Ok((general, periodic))
}

fn truncation_sizes(n_max: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut n = 1;
    while n < n_max {
        sizes.push(n);
        n *= 2;
    }
    sizes.push(n_max);
    sizes
}

/// Lower bound for `A = sup_x ‖π_x(F)‖` from orbit truncations of size
/// `1, 2, 4, …, n_max`; upper bound `‖F‖₁`.
pub fn estimate_a(sys: &DynamicalSystem, f: &Element, points: &[Point], n_max: usize) -> Result<NormEstimate> {
    f.require_semicrossed()?;
    if points.is_empty() {
        return Err(Error::BadInput("estimate needs at least one sample point".into()));
    }
    if n_max == 0 || n_max < f.band_width() {
        return Err(Error::BadInput(format!("nmax {n_max} is below the band width {}", f.band_width())));
    }
    let coeffs: Vec<(i64, &ExtFunction)> = f.coeffs().iter().map(|(k, g)| (*k, g)).collect();
    let sizes = truncation_sizes(n_max);
    let mut traces = Vec::new();
    let mut best = (0.0, String::from("none"));
    for x in points {
        let orbit = sys.forward_orbit(x, n_max)?;
        let values: Vec<Vec<Complex64>> = coeffs
            .iter()
            .map(|(_, g)| orbit.iter().map(|p| g.base().eval(sys, p)).collect())
            .collect::<Result<_>>()?;
        for &n in &sizes {
            let truncated: Vec<Vec<Complex64>> = values.iter().map(|v| v[..n].to_vec()).collect();
            let (lo, _) = sparse_norm_bracket(&orbit_sparse_from_values(n, &coeffs, &truncated))?;
            traces.push(Trace { family: "A", label: x.to_string(), param: n as f64, value: lo });
            if lo > best.0 {
                best = (lo, format!("orbit x={x} n={n}"));
            }
        }
    }
    let ell1 = f.ell1_upper();
    Ok(NormEstimate {
        bracket: NormBracket {
            lower: best.0.min(ell1),
            upper: ell1,
            lower_witness: best.1,
            upper_method: "l1 norm".into(),
        },
        traces,
    })
}

/// `L = Σₙ |n| ‖fₙ‖`, a Lipschitz constant of `θ ↦ ‖Π_{y,e^{iθ}}(F)‖`.
pub fn lambda_lipschitz(f: &Element) -> f64 {
    f.coeffs().iter().map(|(n, g)| n.unsigned_abs() as f64 * g.sup_norm().upper).sum()
}

/// `λ_j = e^{2πij/grid}`.
pub fn lambda_grid(grid: usize) -> Vec<Complex64> {
    (0..grid).map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / grid as f64)).collect()
}

/// Grid maxima of `‖Π_{y,λ}(F)‖` with a Lipschitz certificate over `λ`.
pub fn estimate_b(sys: &DynamicalSystem, f: &Element, periodic: &[Point], grid: usize) -> Result<NormEstimate> {
    if grid < 8 {
        return Err(Error::BadInput(format!("lambda grid needs at least 8 points, got {grid}")));
    }
    if periodic.is_empty() {
        return Err(Error::BadInput("estimate needs at least one periodic point".into()));
    }
    let lip = lambda_lipschitz(f);
    let slack = lip * PI / grid as f64;
    let lambdas = lambda_grid(grid);
    let mut seen: HashSet<Point> = HashSet::new();
    let mut traces = Vec::new();
    let mut best = (0.0, String::from("none"));
    for y in periodic {
        let orbit = PeriodicOrbit::new(sys, y)?;
        if orbit.points.iter().any(|p| seen.contains(p)) {
            continue;
        }
        seen.extend(orbit.points.iter().cloned());
        let values = orbit.element_values(sys, f)?;
        for (j, lambda) in lambdas.iter().enumerate() {
            let (lo, _) = sparse_norm_bracket(&periodic_sparse(orbit.period(), &values, *lambda))?;
            traces.push(Trace { family: "B", label: y.to_string(), param: j as f64 / grid as f64, value: lo });
            if lo > best.0 {
                best = (lo, format!("periodic y={y} lambda=e(2pi*{j}/{grid})"));
            }
        }
    }
    let ell1 = f.ell1_upper();
    let cert = best.0 + slack;
    let (upper, method) = if cert < ell1 {
        (cert, format!("grid max + Lipschitz {lip:.6} * pi / {grid}"))
    } else {
        (ell1, "l1 norm".to_string())
    };
    Ok(NormEstimate {
        bracket: NormBracket { lower: best.0.min(upper), upper, lower_witness: best.1, upper_method: method },
        traces,
    })
}

/// Which family produced the lower bound.
pub fn witness_family(est: &NormEstimate) -> &'static str {
    if est.bracket.lower_witness.starts_with("periodic") {
        "periodic"
    } else {
        "orbit"
    }
}

/// `‖F‖ = max{A, B}` at the given budget.
///
/// The lower bound is the larger sampled value. The upper bound is the
/// `λ`-certified periodic bound, raised to the sampled orbit value when
/// that is larger, and capped by `‖F‖₁`.
pub fn semicrossed_norm(sys: &DynamicalSystem, f: &Element, budget: &Budget) -> Result<NormEstimate> {
    let (general, periodic) = default_samples(sys, budget)?;
    semicrossed_norm_with(sys, f, &general, &periodic, budget)
}

pub fn semicrossed_norm_with(
    sys: &DynamicalSystem,
    f: &Element,
    general: &[Point],
    periodic: &[Point],
    budget: &Budget,
) -> Result<NormEstimate> {
    let a = estimate_a(sys, f, general, budget.n_max.max(f.band_width()).max(1))?;
    let b = estimate_b(sys, f, periodic, budget.grid)?;
    let ell1 = f.ell1_upper();
    let b_cert = b.bracket.upper;
    let (lower, lower_witness) = if b.bracket.lower >= a.bracket.lower {
        (b.bracket.lower, b.bracket.lower_witness.clone())
    } else {
        (a.bracket.lower, a.bracket.lower_witness.clone())
    };
    let candidate = b_cert.max(a.bracket.lower);
    let (upper, upper_method) = if candidate < ell1 {
        (candidate, format!("max(A sample, B certificate: {})", b.bracket.upper_method))
    } else {
        (ell1, "l1 norm".to_string())
    };
    let mut traces = a.traces;
    traces.extend(b.traces);
    Ok(NormEstimate { bracket: NormBracket { lower, upper, lower_witness, upper_method }, traces })
}

fn check_unit(lambda: Complex64) -> Result<()> {
    if (lambda.norm() - 1.0).abs() > LAMBDA_TOL {
        return Err(Error::BadLambda(lambda.norm()));
    }
    Ok(())
}

/// `η_{i+jp} = λ^{N−j} ξ_i / √N` for `i = 1..p`, `j = 0..N−1`.
pub fn lemma5_vector(xi: &[Complex64], lambda: Complex64, n: usize) -> Result<Vec<Complex64>> {
    check_unit(lambda)?;
    let norm: f64 = xi.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if xi.is_empty() || (norm - 1.0).abs() > 1e-12 {
        return Err(Error::BadInput(format!("xi must be a unit vector, got norm {norm}")));
    }
    if n == 0 {
        return Err(Error::BadInput("N must be at least 1".into()));
    }
    let p = xi.len();
    let scale = 1.0 / (n as f64).sqrt();
    let mut eta = vec![Complex64::zero(); n * p];
    for j in 0..n {
        let phase = lambda.powi((n - j) as i32);
        for (i, x) in xi.iter().enumerate() {
            eta[i + j * p] = phase * x * scale;
        }
    }
    Ok(eta)
}

fn sparse_apply(t: &Sparse, v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::zero(); t.n];
    for &(i, j, a) in &t.entries {
        out[i] += a * v[j];
    }
    out
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `(‖π_y(F) η‖, ‖Π_{y,λ}(F) ξ‖)` with `ξ` the best of the basis vectors
/// and the top right singular vector of `Π_{y,λ}(F)`.
///
/// `Π_{y,λ}(U) = λC` places `λ` on every shift entry, so `η` is built from
/// `ζ_i = λ^{−i} ξ_i` and `μ = λᵖ`, which is the same vector for the
/// equivalent form with the whole twist on the wrap-around entry.
pub fn lemma5_check(
    sys: &DynamicalSystem,
    y: &Point,
    lambda: Complex64,
    f: &Element,
    big_n: usize,
    n: usize,
) -> Result<(f64, f64)> {
    f.require_semicrossed()?;
    let rho = periodic_rep_matrix(sys, y, lambda, f)?;
    let p = rho.dim();
    if n < big_n * p + f.band_width() {
        return Err(Error::BadInput(format!(
            "truncation {n} is below N*p + band = {}",
            big_n * p + f.band_width()
        )));
    }
    let xi = best_xi(&rho);
    let rhs = vec_norm(&rho.apply(&xi));
    let zeta: Vec<Complex64> =
        xi.iter().enumerate().map(|(i, x)| x * lambda.powi(-(i as i32 + 1))).collect();
    let eta = lemma5_vector(&zeta, lambda.powi(p as i32), big_n)?;
    let mut padded = eta;
    padded.resize(n, Complex64::zero());
    let t = orbit_rep_sparse(sys, y, f, n)?;
    let lhs = vec_norm(&sparse_apply(&t, &padded));
    Ok((lhs, rhs))
}

fn best_xi(rho: &Matrix) -> Vec<Complex64> {
    let p = rho.dim();
    let mut candidates: Vec<Vec<Complex64>> = (0..p)
        .map(|i| {
            let mut e = vec![Complex64::zero(); p];
            e[i] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    let svd = rho.0.clone().svd(false, true);
    if let Some(v_t) = svd.v_t {
        let (top, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, s)| if *s > acc.1 { (i, *s) } else { acc });
        let v: Vec<Complex64> = (0..p).map(|j| v_t[(top, j)].conj()).collect();
        let norm = vec_norm(&v);
        if norm > 0.0 {
            candidates.push(v.iter().map(|x| x / norm).collect());
        }
    }
    candidates
        .into_iter()
        .map(|xi| (vec_norm(&rho.apply(&xi)), xi))
        .fold((-1.0, Vec::new()), |acc, (v, xi)| if v > acc.0 { (v, xi) } else { acc })
        .1
}

/// `(‖Π_x̃(F)‖ on the window −M..M, max over the orbit windows)`.
///
/// The second value is the largest `n`-truncated orbit-representation norm
/// at `p(φ̃^{−k} x̃)`, `k = 0..2M`.
pub fn lemma6_check(sys: &DynamicalSystem, x: &ExtPoint, f: &Element, m: usize, n: usize) -> Result<(f64, f64)> {
    f.require_semicrossed()?;
    if m < f.band_width() || m == 0 {
        return Err(Error::WindowTooSmall { window: m, needed: f.band_width().max(1) });
    }
    if n == 0 {
        return Err(Error::BadInput("truncation must be at least 1".into()));
    }
    let bilateral = sparse_norm(&BilateralOrbit::new(sys, x, m, 1)?.sparse(sys, f)?)?;
    // Two-sided values c(t), t = 2−n ..= 2M+1; the orbit at c(k+1) reads
    // c(k+1), c(k), …, c(k+2−n).
    let lo = 2 - n as i64;
    let hi = 2 * m as i64 + 1;
    let points = x.two_sided(sys, lo, hi)?;
    let coeffs: Vec<(i64, &ExtFunction)> = f.coeffs().iter().map(|(k, g)| (*k, g)).collect();
    let values: Vec<Vec<Complex64>> = coeffs
        .iter()
        .map(|(_, g)| points.iter().map(|p| g.base().eval(sys, p)).collect())
        .collect::<Result<_>>()?;
    let mut orbit_sup: f64 = 0.0;
    for k in 0..=2 * m as i64 {
        let start = (k + 1 - lo) as usize;
        let window: Vec<Vec<Complex64>> =
            values.iter().map(|v| (0..n).map(|i| v[start - i]).collect()).collect();
        orbit_sup = orbit_sup.max(sparse_norm(&orbit_sparse_from_values(n, &coeffs, &window))?);
    }
    Ok((bilateral, orbit_sup))
}

/// Sample points of the extension: periodic lifts plus seeded lazy lifts.
pub fn extension_samples(sys: &DynamicalSystem, budget: &Budget) -> Result<Vec<ExtPoint>> {
    let (general, periodic) = default_samples(sys, budget)?;
    let mut seen: HashSet<Point> = HashSet::new();
    let mut out = Vec::new();
    for y in &periodic {
        if seen.contains(y) {
            continue;
        }
        let lift = extend_periodic(sys, y)?;
        if let ExtPoint::Periodic(p) = &lift {
            seen.extend(p.coords().iter().cloned());
        }
        out.push(lift);
    }
    let aperiodic: Vec<&Point> = general.iter().filter(|p| !periodic.contains(p)).collect();
    for (i, x) in aperiodic.iter().enumerate().take(budget.procedural) {
        out.push(lift_point(sys, x, Chooser::SeededRandom(budget.seed.wrapping_add(i as u64)))?);
    }
    Ok(out)
}

/// Norm of `F` in the crossed product of the extension, bracketed by
/// bilateral windows (lower) and `‖F‖₁` (upper).
pub fn crossed_norm(sys: &DynamicalSystem, f: &Element, budget: &Budget) -> Result<NormEstimate> {
    let window = budget.window.max(f.band_width()).max(1);
    let mut traces = Vec::new();
    let mut best = (0.0, String::from("none"));
    for (i, x) in extension_samples(sys, budget)?.iter().enumerate() {
        let v = sparse_norm_bracket(&BilateralOrbit::new(sys, x, window, f.max_depth())?.sparse(sys, f)?)?.0;
        traces.push(Trace { family: "X", label: format!("lift{i}"), param: window as f64, value: v });
        if v > best.0 {
            best = (v, format!("bilateral lift{i} M={window}"));
        }
    }
    let ell1 = f.ell1_upper();
    Ok(NormEstimate {
        bracket: NormBracket { lower: best.0.min(ell1), upper: ell1, lower_witness: best.1, upper_method: "l1 norm".into() },
        traces,
    })
}

/// `(semicrossed bracket, crossed-product bracket)` for a semicrossed `F`.
pub fn theorem3_check(sys: &DynamicalSystem, f: &Element, budget: &Budget) -> Result<(NormBracket, NormBracket)> {
    f.require_semicrossed()?;
    let semi = semicrossed_norm(sys, f, budget)?;
    let crossed = crossed_norm(sys, f, budget)?;
    Ok((semi.bracket, crossed.bracket))
}

/// Dense SVD norm, used where an independent check is wanted.
pub fn svd_norm(m: &Matrix) -> f64 {
    let d: DMatrix<Complex64> = m.0.clone();
    d.singular_values().iter().copied().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::{BaseFunction, TrigPoly};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn doubling() -> DynamicalSystem {
        DynamicalSystem::circle(2).unwrap()
    }

    fn q(p: i64, d: i64) -> Point {
        Point::rational(p, d).unwrap()
    }

    fn cos() -> BaseFunction {
        BaseFunction::Trig(TrigPoly::cos(1))
    }

    #[test]
    fn spectral_norm_examples() {
        assert_eq!(spectral_norm(&Matrix::identity(5)).unwrap(), 1.0);
        let shift = Matrix::from_entries(3, &[(1, 0, c(1.0)), (2, 1, c(1.0))]);
        assert_eq!(spectral_norm(&shift).unwrap(), 1.0);
        let rank1 = Matrix::from_entries(2, &[(1, 0, c(-0.5))]);
        assert_eq!(spectral_norm(&rank1).unwrap(), 0.5);
        assert_eq!(spectral_norm(&Matrix::zeros(3)).unwrap(), 0.0);
        let bad = Matrix::from_entries(1, &[(0, 0, c(f64::NAN))]);
        assert_eq!(spectral_norm(&bad), Err(Error::NonFinite));
    }

    #[test]
    fn spectral_norm_matches_svd() {
        let entries: Vec<(usize, usize, Complex64)> = (0..6)
            .flat_map(|i| (0..6).map(move |j| (i, j, Complex64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, (i + 2 * j) as f64 * 0.1))))
            .collect();
        let m = Matrix::from_entries(6, &entries);
        let (lo, hi) = spectral_norm_bracket(&m).unwrap();
        let s = svd_norm(&m);
        assert!(lo <= s * (1.0 + 1e-12) && s <= hi * (1.0 + 1e-12));
        assert!((hi - lo) / hi < 1e-12);
    }

    #[test]
    fn estimate_examples() {
        let sys = doubling();
        let pts = vec![q(1, 3), q(1, 7), q(1, 5)];
        let a = estimate_a(&sys, &Element::u_pow(1), &pts, 16).unwrap();
        assert_eq!((a.bracket.lower, a.bracket.upper), (1.0, 1.0));
        let a = estimate_a(&sys, &Element::constant(c(-3.0)), &pts, 16).unwrap();
        assert_eq!((a.bracket.lower, a.bracket.upper), (3.0, 3.0));

        let b = estimate_b(&sys, &Element::u_pow(1), &pts, 16).unwrap();
        assert_eq!(b.bracket.lower, 1.0);
        let f = Element::one().add(&sys, &Element::u_pow(1)).unwrap();
        let b = estimate_b(&sys, &f, &[q(1, 3)], 16).unwrap();
        assert!((b.bracket.lower - 2.0).abs() < 1e-12);
        let b = estimate_b(&sys, &Element::base_term(0, cos()), &[q(1, 3)], 8).unwrap();
        assert!((b.bracket.lower - 0.5).abs() < 1e-12);
        assert!(estimate_b(&sys, &f, &[q(1, 2)], 16).is_err());
    }

    #[test]
    fn semicrossed_norm_of_one_plus_u() {
        let sys = doubling();
        let f = Element::one().add(&sys, &Element::u_pow(1)).unwrap();
        let budget = Budget { n_max: 32, grid: 32, procedural: 2, max_denominator: 15, ..Budget::default() };
        let est = semicrossed_norm(&sys, &f, &budget).unwrap();
        assert!((est.bracket.lower - 2.0).abs() < 1e-12);
        assert_eq!(est.bracket.upper, 2.0);
        assert_eq!(witness_family(&est), "periodic");
    }

    #[test]
    fn averaging_vector_examples() {
        let v = lemma5_vector(&[c(1.0)], c(1.0), 2).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert!((v[0] - c(r)).norm() < 1e-15 && (v[1] - c(r)).norm() < 1e-15);
        let i = Complex64::new(0.0, 1.0);
        let v = lemma5_vector(&[c(1.0), c(0.0)], i, 2).unwrap();
        let expected = [c(-r), c(0.0), i * r, c(0.0)];
        for (a, b) in v.iter().zip(expected) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!(lemma5_vector(&[c(2.0)], c(1.0), 2).is_err());
    }

    #[test]
    fn periodic_vs_orbit_examples() {
        let sys = doubling();
        let (lhs, rhs) = lemma5_check(&sys, &q(1, 3), c(1.0), &Element::u_pow(1), 8, 17).unwrap();
        assert!((lhs - 1.0).abs() < 1e-12 && (rhs - 1.0).abs() < 1e-12);
        let k = Element::constant(c(2.5));
        let (lhs, rhs) = lemma5_check(&sys, &q(1, 7), Complex64::new(0.0, 1.0), &k, 4, 12).unwrap();
        assert!((lhs - 2.5).abs() < 1e-12 && (rhs - 2.5).abs() < 1e-12);
        let f = Element::one().add(&sys, &Element::u_pow(1)).unwrap();
        let (lhs, rhs) = lemma5_check(&sys, &q(1, 3), c(1.0), &f, 64, 129).unwrap();
        assert!((rhs - 2.0).abs() < 1e-12);
        assert!((lhs - (4.0 - 1.0 / 64.0f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bilateral_vs_orbit_examples() {
        let sys = doubling();
        let x = extend_periodic(&sys, &q(1, 3)).unwrap();
        let (b, o) = lemma6_check(&sys, &x, &Element::u_pow(1), 4, 9).unwrap();
        assert_eq!((b, o), (1.0, 1.0));
        let (b, o) = lemma6_check(&sys, &x, &Element::base_term(0, cos()), 4, 9).unwrap();
        assert!((b - 0.5).abs() < 1e-12 && (o - 0.5).abs() < 1e-12);
        let f = Element::one().add(&sys, &Element::base_term(1, cos())).unwrap();
        let (b, o) = lemma6_check(&sys, &x, &f, 32, 65).unwrap();
        assert!((b - o).abs() < 1e-2, "{b} {o}");
    }
}
