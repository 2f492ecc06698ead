//! Finite matrices for the representation families.
//!
//! All families use the same shift convention: `U` sends basis vector `e_j`
//! to `e_{j+1}` (cyclically for periodic orbits, scaled by `λ`), and a
//! function acts diagonally through its values along the relevant orbit.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::dynsys::{DynamicalSystem, Point};
use crate::element::{Element, Relation2Element};
use crate::error::{Error, Result};
use crate::extension::{extend_periodic, ExtPoint};
use crate::funcalg::{BaseFunction, ExtFunction};
use crate::norms::spectral_norm;

/// Tolerance on `|λ| = 1`.
pub const LAMBDA_TOL: f64 = 1e-12;

/// Dense complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix(pub DMatrix<Complex64>);

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_entries(n: usize, entries: &[(usize, usize, Complex64)]) -> Self {
        let mut m = DMatrix::zeros(n, n);
        for &(i, j, v) in entries {
            m[(i, j)] += v;
        }
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim()).map(|i| (0..self.dim()).map(|j| self.0[(i, j)] * v[j]).sum()).collect()
    }

    /// Row-major nonzero entries.
    pub fn entries(&self) -> Vec<(usize, usize, Complex64)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = self.0[(i, j)];
                if !v.is_zero() {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    /// TSV with a header row; cells are `re,im`.
    pub fn to_tsv(&self) -> String {
        let n = self.dim();
        let mut s = String::from("row");
        for j in 0..n {
            s.push_str(&format!("\t{j}"));
        }
        s.push('\n');
        for i in 0..n {
            s.push_str(&i.to_string());
            for j in 0..n {
                let v = self.0[(i, j)];
                s.push_str(&format!("\t{:.6},{:.6}", v.re + 0.0, v.im + 0.0));
            }
            s.push('\n');
        }
        s
    }
}

/// Sparse square matrix used internally for large banded representations.
#[derive(Debug, Clone, PartialEq)]
pub struct Sparse {
    pub n: usize,
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl Sparse {
    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_entries(self.n, &self.entries)
    }
}

/// Which representation to build.
#[derive(Debug, Clone)]
pub enum RepSpec {
    OrbitTrunc { x: Point, n: usize },
    Periodic { y: Point, lambda: Complex64 },
    BilateralWindow { x: ExtPoint, m: usize },
    BackwardOrbit { orbit: ExtPoint, n: usize },
}

/// Which covariance relation to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `f U = U (f ∘ φ)`.
    One,
    /// `U f = (f ∘ φ) U`.
    Two,
}

impl RepSpec {
    /// The relation this family is built to satisfy.
    pub fn native_relation(&self) -> Relation {
        match self {
            Self::BackwardOrbit { .. } => Relation::Two,
            _ => Relation::One,
        }
    }
}

impl fmt::Display for RepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OrbitTrunc { x, n } => write!(f, "orbit:{x}:{n}"),
            Self::Periodic { y, lambda } => write!(f, "periodic:{y}:({:.6},{:.6})", lambda.re, lambda.im),
            Self::BilateralWindow { m, .. } => write!(f, "bilateral:{m}"),
            Self::BackwardOrbit { n, .. } => write!(f, "backward:{n}"),
        }
    }
}

fn check_lambda(lambda: Complex64) -> Result<()> {
    if (lambda.norm() - 1.0).abs() > LAMBDA_TOL || !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::BadLambda(lambda.norm()));
    }
    Ok(())
}

/// Values `f(x_j)` of depth-1 coefficients along a forward orbit, per power.
fn band_values(sys: &DynamicalSystem, orbit: &[Point], coeffs: &[(i64, &ExtFunction)]) -> Result<Vec<Vec<Complex64>>> {
    coeffs
        .iter()
        .map(|(_, f)| orbit.iter().map(|x| f.base().eval(sys, x)).collect())
        .collect()
}

/// Compression of `π_x(F)` to the first `n` coordinates, in sparse form.
pub fn orbit_rep_sparse(sys: &DynamicalSystem, x: &Point, f: &Element, n: usize) -> Result<Sparse> {
    let orbit = sys.forward_orbit(x, n)?;
    orbit_rep_from_orbit(sys, &orbit, f)
}

/// Orbit representation built from precomputed orbit values.
pub fn orbit_rep_from_orbit(sys: &DynamicalSystem, orbit: &[Point], f: &Element) -> Result<Sparse> {
    f.require_semicrossed()?;
    let coeffs: Vec<(i64, &ExtFunction)> = f.coeffs().iter().map(|(k, g)| (*k, g)).collect();
    let values = band_values(sys, orbit, &coeffs)?;
    Ok(orbit_sparse_from_values(orbit.len(), &coeffs, &values))
}

pub(crate) fn orbit_sparse_from_values(
    n: usize,
    coeffs: &[(i64, &ExtFunction)],
    values: &[Vec<Complex64>],
) -> Sparse {
    let mut entries = Vec::new();
    for ((k, _), vals) in coeffs.iter().zip(values) {
        let k = *k as usize;
        for j in 0..n.saturating_sub(k) {
            entries.push((j + k, j, vals[j]));
        }
    }
    Sparse { n, entries }
}

/// `n × n` compression of the forward-orbit representation `π_x(F)`.
pub fn orbit_rep_matrix(sys: &DynamicalSystem, x: &Point, f: &Element, n: usize) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::BadInput("dimension must be at least 1".into()));
    }
    Ok(orbit_rep_sparse(sys, x, f, n)?.to_matrix())
}

/// Periodic lift data: the orbit `y, φy, …` and the lift used to evaluate
/// deeper coefficients.
pub struct PeriodicOrbit {
    pub points: Vec<Point>,
    lift: ExtPoint,
}

impl PeriodicOrbit {
    pub fn new(sys: &DynamicalSystem, y: &Point) -> Result<Self> {
        let lift = extend_periodic(sys, y)?;
        let ExtPoint::Periodic(p) = &lift else { unreachable!() };
        let period = p.coords().len();
        Ok(Self { points: sys.forward_orbit(y, period)?, lift })
    }

    pub fn period(&self) -> usize {
        self.points.len()
    }

    /// Values of `f` at `φ̃^j(ỹ)` for `j = 0..p`.
    pub fn values(&self, sys: &DynamicalSystem, f: &ExtFunction) -> Result<Vec<Complex64>> {
        let p = self.period() as i64;
        let ExtPoint::Periodic(lift) = &self.lift else { unreachable!() };
        (0..p)
            .map(|j| {
                // Coordinate m of φ̃^j(ỹ) is c(m − j), read cyclically.
                let t = (f.depth() as i64 - 1 - j).rem_euclid(p) as usize;
                f.base().eval(sys, &lift.coords()[t])
            })
            .collect()
    }

    /// Per-power values, reusable across many `λ`.
    pub fn element_values(&self, sys: &DynamicalSystem, f: &Element) -> Result<Vec<(i64, Vec<Complex64>)>> {
        f.coeffs().iter().map(|(n, g)| Ok((*n, self.values(sys, g)?))).collect()
    }
}

pub(crate) fn periodic_sparse(p: usize, values: &[(i64, Vec<Complex64>)], lambda: Complex64) -> Sparse {
    let mut entries = Vec::new();
    for (n, vals) in values {
        let scale = lambda.powi(*n as i32);
        for (j, v) in vals.iter().enumerate() {
            let row = (j as i64 + n).rem_euclid(p as i64) as usize;
            entries.push((row, j, scale * v));
        }
    }
    Sparse { n: p, entries }
}

/// `p × p` matrix of `Π_{y,λ}(F)`; any element is accepted, deeper
/// coefficients are evaluated on the periodic lift of `y`.
pub fn periodic_rep_matrix(sys: &DynamicalSystem, y: &Point, lambda: Complex64, f: &Element) -> Result<Matrix> {
    check_lambda(lambda)?;
    let orbit = PeriodicOrbit::new(sys, y)?;
    let values = orbit.element_values(sys, f)?;
    Ok(periodic_sparse(orbit.period(), &values, lambda).to_matrix())
}

/// Window of the two-sided orbit of `x̃` large enough for `F`.
pub struct BilateralOrbit {
    m: usize,
    lo: i64,
    values: Vec<Point>,
}

impl BilateralOrbit {
    pub fn new(sys: &DynamicalSystem, x: &ExtPoint, m: usize, max_depth: usize) -> Result<Self> {
        let lo = 1 - m as i64;
        let hi = max_depth as i64 + m as i64;
        Ok(Self { m, lo, values: x.two_sided(sys, lo, hi)? })
    }

    /// Value of `f` at `φ̃^i(x̃)`.
    pub fn eval(&self, sys: &DynamicalSystem, f: &ExtFunction, i: i64) -> Result<Complex64> {
        let t = f.depth() as i64 - i;
        f.base().eval(sys, &self.values[(t - self.lo) as usize])
    }

    pub fn sparse(&self, sys: &DynamicalSystem, f: &Element) -> Result<Sparse> {
        let m = self.m as i64;
        let mut entries = Vec::new();
        for (k, g) in f.coeffs() {
            for i in -m..=m {
                let row = i + k;
                if row < -m || row > m {
                    continue;
                }
                entries.push(((row + m) as usize, (i + m) as usize, self.eval(sys, g, i)?));
            }
        }
        Ok(Sparse { n: 2 * self.m + 1, entries })
    }
}

/// `(2M+1) × (2M+1)` compression of the bilateral representation at `x̃`
/// to coordinates `−M..M`.
pub fn bilateral_rep_matrix(sys: &DynamicalSystem, x: &ExtPoint, f: &Element, m: usize) -> Result<Matrix> {
    let needed = f.band_width();
    if m < needed || m == 0 {
        return Err(Error::WindowTooSmall { window: m, needed: needed.max(1) });
    }
    let orbit = BilateralOrbit::new(sys, x, m, f.max_depth())?;
    Ok(orbit.sparse(sys, f)?.to_matrix())
}

/// `n × n` compression of the backward-orbit representation `π_𝒪(G)` for
/// `G = Σ gₖ Uᵏ`; entry `(j+k, j)` is `gₖ(x_{j+k})`.
pub fn backward_rep_matrix(sys: &DynamicalSystem, orbit: &ExtPoint, g: &Relation2Element, n: usize) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::BadInput("dimension must be at least 1".into()));
    }
    let coords = orbit.coords(sys, n)?;
    let mut entries = Vec::new();
    for (k, f) in g.coeffs() {
        if *k < 0 || f.depth() != 1 {
            return Err(Error::WrongForm);
        }
        let k = *k as usize;
        for j in 0..n.saturating_sub(k) {
            entries.push((j + k, j, f.base().eval(sys, &coords[j + k])?));
        }
    }
    Ok(Matrix::from_entries(n, &entries))
}

/// Matrix of `ρ(F)` for a semicrossed (or relation-2) element under `spec`.
pub fn rep_matrix(sys: &DynamicalSystem, spec: &RepSpec, f: &Element) -> Result<Matrix> {
    match spec {
        RepSpec::OrbitTrunc { x, n } => orbit_rep_matrix(sys, x, f, *n),
        RepSpec::Periodic { y, lambda } => periodic_rep_matrix(sys, y, *lambda, f),
        RepSpec::BilateralWindow { x, m } => bilateral_rep_matrix(sys, x, f, *m),
        RepSpec::BackwardOrbit { orbit, n } => backward_rep_matrix(sys, orbit, &f.to_relation2()?, *n),
    }
}

/// `‖ρ(f)ρ(U) − ρ(U)ρ(f∘φ)‖` (relation one) or `‖ρ(U)ρ(f) − ρ(f∘φ)ρ(U)‖`
/// (relation two).
pub fn covariance_defect(sys: &DynamicalSystem, spec: &RepSpec, f: &BaseFunction, relation: Relation) -> Result<f64> {
    let rf = rep_matrix(sys, spec, &Element::base_term(0, f.clone()))?;
    let rfp = rep_matrix(sys, spec, &Element::base_term(0, f.alpha_base(sys)?))?;
    let ru = rep_matrix(sys, spec, &Element::u_pow(1))?;
    let diff = match relation {
        Relation::One => rf.mul(&ru).sub(&ru.mul(&rfp)),
        Relation::Two => ru.mul(&rf).sub(&rfp.mul(&ru)),
    };
    spectral_norm(&diff)
}

/// Nonzero threshold when reading invariance off generator matrices.
const INVARIANCE_TOL: f64 = 1e-9;

/// True iff the coordinate subspaces invariant under every generator are
/// exactly `{0}` and the tails `span{e_k, …, e_n}`.
pub fn invariant_tail_check(sys: &DynamicalSystem, x: &Point, generators: &[Element], n: usize) -> Result<bool> {
    if n == 0 || n > 20 {
        return Err(Error::BadInput(format!("subset enumeration needs 1 <= n <= 20, got {n}")));
    }
    let orbit = sys.forward_orbit(x, n)?;
    for j in 0..n {
        for i in 0..j {
            if orbit[i] == orbit[j] {
                return Err(Error::OrbitCollision { i: i + 1, j: j + 1 });
            }
        }
    }
    // reach[j]: bitmask of rows hit by column j of some generator.
    let mut reach = vec![0u32; n];
    for g in generators {
        for (i, j, v) in orbit_rep_from_orbit(sys, &orbit, g)?.entries {
            if v.norm() > INVARIANCE_TOL {
                reach[j] |= 1 << i;
            }
        }
    }
    let full = (1u32 << n) - 1;
    for subset in 0..=full {
        let invariant = (0..n).all(|j| subset & (1 << j) == 0 || reach[j] & !subset == 0);
        let is_tail = (0..=n).any(|k| subset == full & !((1u32 << k) - 1));
        if invariant != is_tail {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `U` together with the separating functions for every orbit position.
pub fn default_generators(sys: &DynamicalSystem, x: &Point, n: usize) -> Result<Vec<Element>> {
    let orbit = sys.forward_orbit(x, n)?;
    let mut gens = vec![Element::u_pow(1)];
    for k in 1..=n {
        gens.push(Element::base_term(0, sys.separating_function(&orbit, k, n)?));
    }
    Ok(gens)
}
