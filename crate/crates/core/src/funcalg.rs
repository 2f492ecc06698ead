//! Function algebras on `X` and on the extension `X̃`.
//!
//! `C(X)` is modelled by dense subalgebras closed under composition with
//! `φ`: trigonometric polynomials for circle maps, cylinder functions for
//! subshifts and value tables for permutations. Functions on `X̃` are
//! depth-tagged base functions; `ExtFunction(m, g)` reads coordinate `m`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rustfft::FftPlanner;

use crate::dynsys::{DynamicalSystem, Point, TransitionMatrix};
use crate::error::{Error, Result};
use crate::extension::ExtPoint;

/// Coefficients and values below this modulus are treated as zero.
pub const ZERO_TOL: f64 = 1e-15;

const MIN_SUP_GRID: usize = 4096;

/// A certified interval for a norm.
#[derive(Debug, Clone, PartialEq)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    pub lower_witness: String,
    pub upper_method: String,
}

impl NormBracket {
    pub fn exact(value: f64, how: &str) -> Self {
        Self { lower: value, upper: value, lower_witness: how.into(), upper_method: how.into() }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        self.lower - tol <= v && v <= self.upper + tol
    }

    pub fn overlaps(&self, other: &NormBracket, tol: f64) -> bool {
        self.lower <= other.upper + tol && other.lower <= self.upper + tol
    }
}

/// `e^{2πiθ}`.
#[inline]
pub fn cis_turns(theta: f64) -> Complex64 {
    let t = theta - theta.round();
    let (s, c) = (2.0 * PI * t).sin_cos();
    Complex64::new(c, s)
}

/// Fractional part of `k·r` as a float, computed exactly before rounding.
pub fn frac_mul(k: i64, r: &BigRational) -> f64 {
    if let (Some(p), Some(q)) = (r.numer().to_i128(), r.denom().to_i128()) {
        if let Some(kp) = (k as i128).checked_mul(p) {
            let rem = kp.rem_euclid(q);
            return if q < (1i128 << 53) { rem as f64 / q as f64 } else { ratio_f64(&BigInt::from(rem), r.denom()) };
        }
    }
    let rem = (BigInt::from(k) * r.numer()).mod_floor(r.denom());
    ratio_f64(&rem, r.denom())
}

fn ratio_f64(num: &BigInt, den: &BigInt) -> f64 {
    BigRational::new(num.clone(), den.clone()).to_f64().unwrap_or(0.0)
}

/// Trigonometric polynomial `Σ c_k e^{2πikx}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPoly {
    coeffs: BTreeMap<i64, Complex64>,
}

impl TrigPoly {
    pub fn new(coeffs: BTreeMap<i64, Complex64>) -> Self {
        let mut p = Self { coeffs };
        p.prune();
        p
    }

    pub fn from_pairs(pairs: &[(i64, Complex64)]) -> Self {
        let mut coeffs = BTreeMap::new();
        for &(k, c) in pairs {
            *coeffs.entry(k).or_insert(Complex64::zero()) += c;
        }
        Self::new(coeffs)
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_pairs(&[(0, c)])
    }

    /// `cos 2πkx`.
    pub fn cos(k: i64) -> Self {
        Self::from_pairs(&[(k, Complex64::new(0.5, 0.0)), (-k, Complex64::new(0.5, 0.0))])
    }

    /// `sin 2πkx`.
    pub fn sin(k: i64) -> Self {
        Self::from_pairs(&[(k, Complex64::new(0.0, -0.5)), (-k, Complex64::new(0.0, 0.5))])
    }

    /// `e^{2πikx}`.
    pub fn exp(k: i64) -> Self {
        Self::from_pairs(&[(k, Complex64::new(1.0, 0.0))])
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.norm() > ZERO_TOL);
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_freq(&self) -> u64 {
        self.coeffs.keys().map(|k| k.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn l1(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|(k, c)| (self.coeff(-k) - c.conj()).norm() <= tol)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &other.coeffs {
            *coeffs.entry(*k).or_insert(Complex64::zero()) += c;
        }
        Self::new(coeffs)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|(k, c)| (*k, c * s)).collect())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.coeffs.iter().map(|(k, c)| (-k, c.conj())).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (Some((&alo, _)), Some((&blo, _))) = (self.coeffs.first_key_value(), other.coeffs.first_key_value())
        else {
            return Self::default();
        };
        let ahi = *self.coeffs.last_key_value().unwrap().0;
        let bhi = *other.coeffs.last_key_value().unwrap().0;
        let span_a = (ahi - alo) as usize + 1;
        let span_b = (bhi - blo) as usize + 1;
        if self.coeffs.len() * other.coeffs.len() < span_a + span_b {
            let mut coeffs = BTreeMap::new();
            for (i, a) in &self.coeffs {
                for (j, b) in &other.coeffs {
                    *coeffs.entry(i + j).or_insert(Complex64::zero()) += a * b;
                }
            }
            return Self::new(coeffs);
        }
        let mut da = vec![Complex64::zero(); span_a];
        for (k, c) in &self.coeffs {
            da[(k - alo) as usize] = *c;
        }
        let mut db = vec![Complex64::zero(); span_b];
        for (k, c) in &other.coeffs {
            db[(k - blo) as usize] = *c;
        }
        let mut out = vec![Complex64::zero(); span_a + span_b - 1];
        for (i, a) in da.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in db.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out.into_iter().enumerate().map(|(i, c)| (alo + blo + i as i64, c)).collect())
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::constant(Complex64::new(1.0, 0.0));
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `x ↦ p(Kx)`.
    pub fn compose_times(&self, k: u32) -> Self {
        Self::new(self.coeffs.iter().map(|(f, c)| (f * k as i64, *c)).collect())
    }

    /// Evaluation at an exact rational phase.
    pub fn eval_rational(&self, x: &BigRational) -> Complex64 {
        self.coeffs.iter().map(|(k, c)| c * cis_turns(frac_mul(*k, x))).sum()
    }

    pub fn eval_f64(&self, x: f64) -> Complex64 {
        self.coeffs.iter().map(|(k, c)| c * cis_turns((*k as f64 * x).fract())).sum()
    }

    /// Values on the uniform grid `j/n`, `j = 0..n`.
    pub fn grid_values(&self, n: usize) -> Vec<Complex64> {
        let mut buf = vec![Complex64::zero(); n];
        for (k, c) in &self.coeffs {
            buf[k.rem_euclid(n as i64) as usize] += c;
        }
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        buf
    }

    /// Grid maximum widened by the Bernstein bound `|p'| ≤ 2πK Σ|c_k|`.
    pub fn sup_norm(&self) -> NormBracket {
        if self.is_zero() {
            return NormBracket::exact(0.0, "zero");
        }
        let k = self.max_freq();
        let l1 = self.l1();
        if k == 0 {
            return NormBracket::exact(l1, "constant");
        }
        let n = (8 * k as usize + 64).max(MIN_SUP_GRID).next_power_of_two();
        let (arg, lower) = self
            .grid_values(n)
            .iter()
            .enumerate()
            .map(|(j, v)| (j, v.norm()))
            .fold((0, 0.0), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc });
        let width = PI * k as f64 * l1 / n as f64;
        let (upper, method) = if lower + width < l1 {
            (lower + width, format!("grid {n} + derivative bound"))
        } else {
            (l1, "coefficient l1".to_string())
        };
        NormBracket { lower, upper, lower_witness: format!("x = {arg}/{n}"), upper_method: method }
    }

    /// A real polynomial `f` with `0 ≤ f ≤ 1`, `f(a) = 1` and `f(b) = 0` for
    /// every `b` in `zeros`.
    pub fn bump(a: &BigRational, zeros: &[BigRational]) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let mut t = Self::constant(one);
        for b in zeros {
            let d = (a - b).to_f64().unwrap_or(0.0);
            let norm = (PI * d).sin().powi(2);
            // sin²(π(x−b)) = 1/2 − (e^{−2πib}e(x) + e^{2πib}e(−x))/4
            let eb = cis_turns(frac_mul(1, b));
            let factor = Self::from_pairs(&[
                (0, Complex64::new(0.5, 0.0)),
                (1, -eb.conj() / 4.0),
                (-1, -eb / 4.0),
            ])
            .scale(Complex64::new(1.0 / norm, 0.0));
            t = t.mul(&Self::damped_below(&factor, a, 1.5));
        }
        let t = Self::damped_below(&t, a, 2.0);
        t.scale(Complex64::new(2.0, 0.0)).add(&t.mul(&t).scale(-one))
    }

    /// `g · cos^{2N}(π(x−a))` for the smallest power-of-two `N` (or zero)
    /// whose certified sup is at most `cap`.
    fn damped_below(g: &Self, a: &BigRational, cap: f64) -> Self {
        if g.sup_norm().upper <= cap {
            return g.clone();
        }
        let ea = cis_turns(frac_mul(1, a));
        let mut kernel = Self::from_pairs(&[
            (0, Complex64::new(0.5, 0.0)),
            (1, ea.conj() / 4.0),
            (-1, ea / 4.0),
        ]);
        for _ in 0..16 {
            let candidate = g.mul(&kernel);
            if candidate.sup_norm().upper <= cap {
                return candidate;
            }
            kernel = kernel.mul(&kernel);
        }
        g.mul(&kernel)
    }
}

/// Cylinder function: value depends on the first `depth` symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct Cylinder {
    depth: usize,
    values: BTreeMap<Vec<u8>, Complex64>,
}

impl Cylinder {
    /// Values for every admissible word of length `depth`; words absent from
    /// `given` take the value 0.
    pub fn new(m: &TransitionMatrix, depth: usize, given: &BTreeMap<Vec<u8>, Complex64>) -> Result<Self> {
        if depth == 0 {
            return Err(Error::BadInput("cylinder depth must be at least 1".into()));
        }
        for w in given.keys() {
            if w.len() != depth || !m.admits(w) {
                return Err(Error::BadInput(format!("cylinder word {w:?} is not an admissible word of length {depth}")));
            }
        }
        let values = m
            .words(depth)
            .into_iter()
            .map(|w| {
                let v = given.get(&w).copied().unwrap_or_default();
                (w, v)
            })
            .collect();
        Ok(Self { depth, values })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &BTreeMap<Vec<u8>, Complex64> {
        &self.values
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { depth: self.depth, values: self.values.iter().map(|(w, v)| (w.clone(), f(*v))).collect() }
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let (deep, shallow, swapped) = if self.depth >= other.depth { (self, other, false) } else { (other, self, true) };
        let values = deep
            .values
            .iter()
            .map(|(w, v)| {
                let s = shallow.values.get(&w[..shallow.depth]).copied().unwrap_or_default();
                (w.clone(), if swapped { f(s, *v) } else { f(*v, s) })
            })
            .collect();
        Self { depth: deep.depth, values }
    }

    fn compose_shift(&self, m: &TransitionMatrix) -> Self {
        let values = m
            .words(self.depth + 1)
            .into_iter()
            .map(|w| {
                let v = self.values.get(&w[1..]).copied().unwrap_or_default();
                (w, v)
            })
            .collect();
        Self { depth: self.depth + 1, values }
    }
}

/// A function in the chosen dense subalgebra of `C(X)`.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseFunction {
    Constant(Complex64),
    Trig(TrigPoly),
    Cylinder(Cylinder),
    Tabular(Vec<Complex64>),
}

impl BaseFunction {
    pub fn constant(c: f64) -> Self {
        Self::Constant(Complex64::new(c, 0.0))
    }

    pub fn zero() -> Self {
        Self::Constant(Complex64::zero())
    }

    pub fn cylinder_indicator(m: &TransitionMatrix, prefix: &[u8]) -> Self {
        let depth = prefix.len().max(1);
        let values = m
            .words(depth)
            .into_iter()
            .map(|w| {
                let v = if w.starts_with(prefix) { 1.0 } else { 0.0 };
                (w, Complex64::new(v, 0.0))
            })
            .collect();
        Self::Cylinder(Cylinder { depth, values })
    }

    pub fn tabular_real(values: &[f64]) -> Self {
        Self::Tabular(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Constant(c) => c.norm() <= ZERO_TOL,
            Self::Trig(p) => p.is_zero(),
            Self::Cylinder(c) => c.values.values().all(|v| v.norm() <= ZERO_TOL),
            Self::Tabular(t) => t.iter().all(|v| v.norm() <= ZERO_TOL),
        }
    }

    pub fn as_constant(&self) -> Option<Complex64> {
        match self {
            Self::Constant(c) => Some(*c),
            Self::Trig(p) if p.coeffs.keys().all(|&k| k == 0) => Some(p.coeff(0)),
            _ => None,
        }
    }

    pub fn eval(&self, sys: &DynamicalSystem, x: &Point) -> Result<Complex64> {
        match self {
            Self::Constant(c) => Ok(*c),
            Self::Trig(p) => Ok(p.eval_rational(&sys.circle_phase(x)?)),
            Self::Cylinder(c) => {
                let w = x.symbols(c.depth)?;
                c.values
                    .get(&w)
                    .copied()
                    .ok_or_else(|| Error::InvalidPoint(format!("{x} is not admissible")))
            }
            Self::Tabular(t) => match x {
                Point::State(s) if *s < t.len() => Ok(t[*s]),
                _ => Err(Error::TypeMismatch { system: "permutation", point: x.to_string() }),
            },
        }
    }

    fn mismatch(&self, other: &Self) -> Error {
        Error::BadInput(format!(
            "cannot combine {} and {} functions",
            self.kind_name(),
            other.kind_name()
        ))
    }

    fn kind_name(&self) -> &'static str {
        match self {
            Self::Constant(_) => "constant",
            Self::Trig(_) => "trigonometric",
            Self::Cylinder(_) => "cylinder",
            Self::Tabular(_) => "tabular",
        }
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        match self {
            Self::Constant(c) => Self::Constant(f(*c)),
            Self::Cylinder(c) => Self::Cylinder(c.map(f)),
            Self::Tabular(t) => Self::Tabular(t.iter().map(|v| f(*v)).collect()),
            Self::Trig(_) => unreachable!("trigonometric polynomials are not mapped pointwise"),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        match self {
            Self::Trig(p) => Self::Trig(p.scale(s)),
            _ => self.map(|v| v * s),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn conj(&self) -> Self {
        match self {
            Self::Trig(p) => Self::Trig(p.conj()),
            _ => self.map(|v| v.conj()),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(match (self, other) {
            (Self::Constant(a), Self::Constant(b)) => Self::Constant(a + b),
            (Self::Constant(c), Self::Trig(p)) | (Self::Trig(p), Self::Constant(c)) => {
                Self::Trig(p.add(&TrigPoly::constant(*c)))
            }
            (Self::Constant(c), f) | (f, Self::Constant(c)) => f.map(|v| v + c),
            (Self::Trig(a), Self::Trig(b)) => Self::Trig(a.add(b)),
            (Self::Cylinder(a), Self::Cylinder(b)) => Self::Cylinder(a.zip(b, |x, y| x + y)),
            (Self::Tabular(a), Self::Tabular(b)) if a.len() == b.len() => {
                Self::Tabular(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            _ => return Err(self.mismatch(other)),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Ok(match (self, other) {
            (Self::Constant(a), Self::Constant(b)) => Self::Constant(a * b),
            (Self::Constant(c), f) | (f, Self::Constant(c)) => f.scale(*c),
            (Self::Trig(a), Self::Trig(b)) => Self::Trig(a.mul(b)),
            (Self::Cylinder(a), Self::Cylinder(b)) => Self::Cylinder(a.zip(b, |x, y| x * y)),
            (Self::Tabular(a), Self::Tabular(b)) if a.len() == b.len() => {
                Self::Tabular(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            _ => return Err(self.mismatch(other)),
        })
    }

    /// `g ∘ φ`.
    pub fn alpha_base(&self, sys: &DynamicalSystem) -> Result<Self> {
        Ok(match (self, sys) {
            (Self::Constant(c), _) => Self::Constant(*c),
            (Self::Trig(p), DynamicalSystem::CircleTimesK { k }) => Self::Trig(p.compose_times(*k)),
            (Self::Cylinder(c), DynamicalSystem::Sft(m)) => Self::Cylinder(c.compose_shift(m)),
            (Self::Tabular(t), DynamicalSystem::Permutation(perm)) if t.len() == perm.len() => {
                Self::Tabular(perm.iter().map(|&j| t[j]).collect())
            }
            _ => {
                return Err(Error::BadInput(format!(
                    "{} function does not live on a {} system",
                    self.kind_name(),
                    sys.kind_name()
                )))
            }
        })
    }

    pub fn alpha_base_pow(&self, sys: &DynamicalSystem, n: usize) -> Result<Self> {
        let mut g = self.clone();
        for _ in 0..n {
            g = g.alpha_base(sys)?;
        }
        Ok(g)
    }

    /// Sup-norm bracket; exact for every variant except trigonometric.
    pub fn sup_norm(&self) -> NormBracket {
        let finite_max = |vals: &mut dyn Iterator<Item = Complex64>| {
            let m = vals.map(|v| v.norm()).fold(0.0, f64::max);
            NormBracket::exact(m, "max over finitely many values")
        };
        match self {
            Self::Constant(c) => NormBracket::exact(c.norm(), "constant"),
            Self::Trig(p) => p.sup_norm(),
            Self::Cylinder(c) => finite_max(&mut c.values.values().copied()),
            Self::Tabular(t) => finite_max(&mut t.iter().copied()),
        }
    }

    /// Checks that the function can be evaluated on points of `sys`.
    pub fn check_system(&self, sys: &DynamicalSystem) -> Result<()> {
        self.alpha_base(sys).map(|_| ())
    }
}

/// A function on `X̃` reading coordinate `depth` of its argument.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtFunction {
    depth: usize,
    base: BaseFunction,
}

impl ExtFunction {
    pub fn new(depth: usize, base: BaseFunction) -> Result<Self> {
        if depth == 0 {
            return Err(Error::BadInput("ExtFunction depth must be at least 1".into()));
        }
        Ok(Self::with_depth(depth, base))
    }

    /// The embedding of `C(X)` at depth 1.
    pub fn iota(base: BaseFunction) -> Self {
        Self { depth: 1, base }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::iota(BaseFunction::Constant(c))
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn base(&self) -> &BaseFunction {
        &self.base
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero()
    }

    pub fn evaluate(&self, sys: &DynamicalSystem, x: &ExtPoint) -> Result<Complex64> {
        self.base.eval(sys, &x.coord(sys, self.depth)?)
    }

    /// `f ∘ φ̃`.
    pub fn alpha_tilde(&self, sys: &DynamicalSystem) -> Result<Self> {
        if self.depth >= 2 {
            Ok(Self { depth: self.depth - 1, base: self.base.clone() })
        } else {
            Ok(Self { depth: 1, base: self.base.alpha_base(sys)? })
        }
    }

    /// `f ∘ φ̃⁻¹`.
    pub fn alpha_tilde_inv(&self) -> Self {
        Self::with_depth(self.depth + 1, self.base.clone())
    }

    /// Constants are kept at depth 1.
    fn with_depth(depth: usize, base: BaseFunction) -> Self {
        let depth = if matches!(base, BaseFunction::Constant(_)) { 1 } else { depth };
        Self { depth, base }
    }

    /// `f ∘ φ̃ⁿ` for any integer `n`.
    pub fn alpha_tilde_pow(&self, sys: &DynamicalSystem, n: i64) -> Result<Self> {
        if n <= 0 {
            return Ok(Self::with_depth(self.depth + n.unsigned_abs() as usize, self.base.clone()));
        }
        let n = n as usize;
        if n < self.depth {
            Ok(Self { depth: self.depth - n, base: self.base.clone() })
        } else {
            Ok(Self { depth: 1, base: self.base.alpha_base_pow(sys, n - self.depth + 1)? })
        }
    }

    /// Rewrites at depth `target ≥ depth` without changing the function.
    pub fn at_depth(&self, sys: &DynamicalSystem, target: usize) -> Result<Self> {
        if target < self.depth {
            return Err(Error::BadInput(format!("cannot lower depth {} to {target}", self.depth)));
        }
        Ok(Self { depth: target, base: self.base.alpha_base_pow(sys, target - self.depth)? })
    }

    fn common(&self, sys: &DynamicalSystem, other: &Self) -> Result<(BaseFunction, BaseFunction, usize)> {
        let d = self.depth.max(other.depth);
        let lift = |f: &Self| -> Result<BaseFunction> {
            // Constants factor through every coordinate.
            if matches!(f.base, BaseFunction::Constant(_)) {
                Ok(f.base.clone())
            } else {
                Ok(f.at_depth(sys, d)?.base)
            }
        };
        Ok((lift(self)?, lift(other)?, d))
    }

    pub fn add(&self, sys: &DynamicalSystem, other: &Self) -> Result<Self> {
        let (a, b, d) = self.common(sys, other)?;
        Self::normalized(d, a.add(&b)?)
    }

    pub fn multiply(&self, sys: &DynamicalSystem, other: &Self) -> Result<Self> {
        let (a, b, d) = self.common(sys, other)?;
        Self::normalized(d, a.mul(&b)?)
    }

    fn normalized(depth: usize, base: BaseFunction) -> Result<Self> {
        if let Some(c) = base.as_constant() {
            return Ok(Self::constant(c));
        }
        Self::new(depth, base)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { depth: self.depth, base: self.base.scale(s) }
    }

    pub fn neg(&self) -> Self {
        Self { depth: self.depth, base: self.base.neg() }
    }

    pub fn conj(&self) -> Self {
        Self { depth: self.depth, base: self.base.conj() }
    }

    pub fn sup_norm(&self) -> NormBracket {
        self.base.sup_norm()
    }
}
