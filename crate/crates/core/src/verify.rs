//! Numerical checks of the norm identities and structural theorems, run
//! over a corpus of points and elements of one system.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynsys::{Classification, DynamicalSystem, Point};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::extension::{
    classify_ext, extend_periodic, lift_point, tilde_apply, verify_transfer, Chooser, ExtPoint, Property,
};
use crate::funcalg::{cis_turns, BaseFunction, TrigPoly};
use crate::norms::{
    default_samples, estimate_a, estimate_b, lemma5_check, lemma6_check, semicrossed_norm, spectral_norm,
    theorem3_check, Budget,
};
use crate::repr::{
    bilateral_rep_matrix, covariance_defect, default_generators, invariant_tail_check, periodic_rep_matrix,
};
use crate::sample::{random_base, random_crossed, random_rep_spec, random_semicrossed};

/// One verification statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Lemma3,
    Lemma5,
    Lemma6,
    Cor5,
    Thm1,
    Thm3,
    Lemma7,
    Thm4Pushdown,
    Covariance,
    Compression,
    Prop1,
}

impl Check {
    pub const ALL: [Check; 11] = [
        Self::Covariance,
        Self::Lemma3,
        Self::Thm1,
        Self::Compression,
        Self::Cor5,
        Self::Lemma5,
        Self::Lemma6,
        Self::Lemma7,
        Self::Thm4Pushdown,
        Self::Thm3,
        Self::Prop1,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Lemma3 => "lemma3",
            Self::Lemma5 => "lemma5",
            Self::Lemma6 => "lemma6",
            Self::Cor5 => "cor5",
            Self::Thm1 => "thm1",
            Self::Thm3 => "thm3",
            Self::Lemma7 => "lemma7",
            Self::Thm4Pushdown => "thm4-pushdown",
            Self::Covariance => "covariance",
            Self::Compression => "compression",
            Self::Prop1 => "prop1",
        }
    }

    /// A single check by name, or every check for `"all"`.
    pub fn parse(name: &str) -> Option<Vec<Check>> {
        if name == "all" {
            return Some(Self::ALL.to_vec());
        }
        Self::ALL.iter().find(|c| c.name() == name).map(|c| vec![*c])
    }
}

/// A result row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub check: &'static str,
    pub case: String,
    pub measured: String,
    pub bound: String,
    pub pass: bool,
}

impl Row {
    pub fn header() -> &'static str {
        "check\tcase\tmeasured\tbound\tstatus"
    }

    pub fn to_tsv(&self) -> String {
        let status = if self.pass { "pass" } else { "fail" };
        format!("{}\t{}\t{}\t{}\t{}", self.check, self.case, self.measured, self.bound, status)
    }
}

fn num(v: f64) -> String {
    format!("{v:.6}")
}

/// Tolerances used by the checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Covariance defect allowed for trigonometric functions (symbolic
    /// systems must be exact).
    pub covariance: f64,
    /// `lhs ≥ rhs − slack` in the periodic-to-orbit comparison.
    pub lemma5_slack: f64,
    /// Allowed relative deviation of the deficit ratio from `1/2`.
    pub halving: f64,
    pub lemma6: f64,
    pub bracket_width: f64,
    pub norm: f64,
    pub matrix: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            covariance: 1e-12,
            lemma5_slack: 0.1,
            halving: 0.2,
            lemma6: 1e-2,
            bracket_width: 5e-2,
            norm: 1e-10,
            matrix: 1e-12,
        }
    }
}

/// The system, elements and budgets a check runs over.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub sys: DynamicalSystem,
    pub elements: Vec<(String, Element)>,
    pub budget: Budget,
    pub tol: Tolerances,
    /// Number of random cases for the randomized checks.
    pub cases: usize,
}

impl Corpus {
    /// Corpus with the standard elements `U`, `1+U`, `U·f` and a seeded
    /// random `f₀ + U·f₁`.
    pub fn new(sys: DynamicalSystem, budget: Budget) -> Result<Self> {
        let elements = standard_elements(&sys, budget.seed)?;
        Ok(Self { sys, elements, budget, tol: Tolerances::default(), cases: 20 })
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.budget.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn semicrossed(&self) -> impl Iterator<Item = &(String, Element)> {
        self.elements.iter().filter(|(_, f)| f.is_semicrossed())
    }

    fn periodic_orbits(&self, max_period: usize, count: usize) -> Result<Vec<Point>> {
        let (_, periodic) = default_samples(&self.sys, &self.budget)?;
        let mut seen: Vec<Point> = Vec::new();
        let mut out = Vec::new();
        for y in periodic {
            if out.len() >= count {
                break;
            }
            if seen.contains(&y) {
                continue;
            }
            let Some(p) = self.sys.period_of(&y)? else { continue };
            if p > max_period {
                continue;
            }
            seen.extend(self.sys.forward_orbit(&y, p)?);
            out.push(y);
        }
        Ok(out)
    }
}

/// A simple real function on the system: `cos 2πx`, the indicator of the
/// symbol-0 cylinder, or the indicator of state 0.
pub fn simple_function(sys: &DynamicalSystem) -> BaseFunction {
    match sys {
        DynamicalSystem::CircleTimesK { .. } => BaseFunction::Trig(TrigPoly::cos(1)),
        DynamicalSystem::Sft(m) => BaseFunction::cylinder_indicator(m, &[0]),
        DynamicalSystem::Permutation(perm) => {
            let mut v = vec![0.0; perm.len()];
            v[0] = 1.0;
            BaseFunction::tabular_real(&v)
        }
    }
}

pub fn standard_elements(sys: &DynamicalSystem, seed: u64) -> Result<Vec<(String, Element)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = Element::u_pow(1);
    let f0 = random_base(sys, &mut rng);
    let f1 = random_base(sys, &mut rng);
    Ok(vec![
        ("U".into(), u.clone()),
        ("1+U".into(), Element::one().add(sys, &u)?),
        ("U*f".into(), Element::base_term(1, simple_function(sys))),
        ("f0+U*f1".into(), Element::base_term(0, f0).add(sys, &Element::base_term(1, f1))?),
    ])
}

/// Runs one check and returns its rows.
pub fn run(check: Check, corpus: &Corpus) -> Result<Vec<Row>> {
    match check {
        Check::Covariance => covariance(corpus),
        Check::Lemma3 => lemma3(corpus),
        Check::Thm1 => thm1(corpus),
        Check::Compression => compression(corpus),
        Check::Cor5 => cor5(corpus),
        Check::Lemma5 => lemma5(corpus),
        Check::Lemma6 => lemma6(corpus),
        Check::Lemma7 => lemma7(corpus),
        Check::Thm4Pushdown => thm4_pushdown(corpus),
        Check::Thm3 => thm3(corpus),
        Check::Prop1 => prop1(corpus),
    }
}

fn covariance(c: &Corpus) -> Result<Vec<Row>> {
    let mut rng = c.rng(1);
    let tol = match c.sys {
        DynamicalSystem::CircleTimesK { .. } => c.tol.covariance,
        _ => 0.0,
    };
    let mut rows = Vec::new();
    for i in 0..c.cases {
        let f = random_base(&c.sys, &mut rng);
        let spec = random_rep_spec(&c.sys, &mut rng)?;
        let defect = covariance_defect(&c.sys, &spec, &f, spec.native_relation())?;
        rows.push(Row {
            check: "covariance",
            case: format!("case{i} {spec}"),
            measured: format!("{defect:e}"),
            bound: format!("{tol:e}"),
            pass: defect <= tol,
        });
    }
    Ok(rows)
}

/// Eventually periodic points: preimages of periodic points that are not
/// themselves periodic.
fn eventually_periodic(c: &Corpus, count: usize) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for y in c.periodic_orbits(usize::MAX, count)? {
        for x in c.sys.preimages(&y)? {
            if c.sys.period_of(&x)?.is_none() && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out.truncate(count);
    Ok(out)
}

fn lemma3(c: &Corpus) -> Result<Vec<Row>> {
    const DEPTH: usize = 128;
    let mut rows = Vec::new();
    let (_, periodic) = default_samples(&c.sys, &c.budget)?;
    for y in &periodic {
        let Some(p) = c.sys.period_of(y)? else { continue };
        let class = classify_ext(&c.sys, &extend_periodic(&c.sys, y)?, DEPTH)?;
        rows.push(Row {
            check: "lemma3",
            case: format!("periodic {y}"),
            measured: class.to_string().replace('\t', " "),
            bound: format!("periodic {p}"),
            pass: class == Classification::Periodic { period: p },
        });
    }
    let choosers = [
        Chooser::AlwaysMin,
        Chooser::SeededRandom(c.budget.seed),
        Chooser::SeededRandom(c.budget.seed.wrapping_add(1)),
        Chooser::ExplicitTail(vec![1, 0]),
    ];
    for x in eventually_periodic(c, 4)? {
        for chooser in &choosers {
            let lift = lift_point(&c.sys, &x, chooser.clone())?;
            let class = classify_ext(&c.sys, &lift, DEPTH)?;
            rows.push(Row {
                check: "lemma3",
                case: format!("lift {x} {chooser}"),
                measured: class.to_string().replace('\t', " "),
                bound: "not periodic".into(),
                pass: !class.is_periodic(),
            });
        }
    }
    Ok(rows)
}

fn flags(b: [bool; 4]) -> String {
    b.iter().map(|&v| if v { 't' } else { 'f' }).collect()
}

fn transfer_row(sys: &DynamicalSystem, case: String) -> Result<Row> {
    let mut base = [false; 4];
    let mut ext = [false; 4];
    for (i, p) in Property::ALL.iter().enumerate() {
        (base[i], ext[i]) = verify_transfer(sys, *p)?;
    }
    Ok(Row { check: "thm1", case, measured: flags(ext), bound: flags(base), pass: base == ext })
}

/// Every surjective 0/1 transition matrix on at most three symbols.
pub fn all_small_sfts() -> Vec<Vec<Vec<bool>>> {
    let mut out = Vec::new();
    for s in 1..=3usize {
        for bits in 0u32..(1 << (s * s)) {
            let rows: Vec<Vec<bool>> = (0..s).map(|i| (0..s).map(|j| bits >> (i * s + j) & 1 == 1).collect()).collect();
            if DynamicalSystem::sft(rows.clone()).is_ok() {
                out.push(rows);
            }
        }
    }
    out
}

fn matrix_label(rows: &[Vec<bool>]) -> String {
    rows.iter().map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>()).collect::<Vec<_>>().join("/")
}

fn thm1(c: &Corpus) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    if let DynamicalSystem::Sft(m) = &c.sys {
        rows.push(transfer_row(&c.sys, format!("config {}", matrix_label(m.rows())))?);
    }
    for m in all_small_sfts() {
        let sys = DynamicalSystem::sft(m.clone())?;
        rows.push(transfer_row(&sys, matrix_label(&m))?);
    }
    Ok(rows)
}

fn compression(c: &Corpus) -> Result<Vec<Row>> {
    let (general, periodic) = default_samples(&c.sys, &c.budget)?;
    let mut rows = Vec::new();
    let mut rng = c.rng(4);
    let mut elements: Vec<(String, Element)> = c.semicrossed().cloned().collect();
    for i in 0..c.cases {
        elements.push((format!("random{i}"), random_semicrossed(&c.sys, &mut rng, 3)));
    }
    let n_max = c.budget.n_max.min(64);
    let general: Vec<Point> = general.into_iter().take(12).collect();
    let periodic: Vec<Point> = periodic.into_iter().take(12).collect();
    for (name, f) in &elements {
        let a = estimate_a(&c.sys, f, &general, n_max.max(f.band_width()).max(1))?;
        let mut worst_drop: f64 = 0.0;
        for pair in a.traces.windows(2) {
            if pair[0].label == pair[1].label && pair[1].param > pair[0].param {
                worst_drop = worst_drop.max(pair[0].value - pair[1].value);
            }
        }
        rows.push(Row {
            check: "compression",
            case: format!("{name} monotone"),
            measured: num(worst_drop),
            bound: format!("{:e}", c.tol.norm),
            pass: worst_drop <= c.tol.norm,
        });
        let b = estimate_b(&c.sys, f, &periodic, 16)?;
        let ell1 = f.ell1_upper();
        let top = a.traces.iter().chain(&b.traces).map(|t| t.value).fold(0.0, f64::max);
        rows.push(Row {
            check: "compression",
            case: format!("{name} l1 cap"),
            measured: num(top),
            bound: num(ell1),
            pass: top <= ell1 + c.tol.norm,
        });
    }
    Ok(rows)
}

fn cor5(c: &Corpus) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for (name, f) in c.semicrossed() {
        let est = semicrossed_norm(&c.sys, f, &c.budget)?;
        let b = &est.bracket;
        rows.push(Row {
            check: "cor5",
            case: format!("{name} [{:.6},{:.6}]", b.lower, b.upper),
            measured: num(b.width()),
            bound: num(c.tol.bracket_width),
            pass: b.lower <= b.upper + c.tol.norm && b.width() <= c.tol.bracket_width,
        });
    }
    Ok(rows)
}

fn lemma5(c: &Corpus) -> Result<Vec<Row>> {
    let lambdas = [0.0, 0.25, 1.0 / 3.0, 0.125, 0.6];
    let orbits = c.periodic_orbits(4, 4)?;
    let mut rows = Vec::new();
    let mut count = 0;
    'outer: for y in &orbits {
        for (name, f) in c.semicrossed() {
            for t in lambdas {
                if count >= c.cases {
                    break 'outer;
                }
                count += 1;
                let lambda = cis_turns(t);
                let p = c.sys.period_of(y)?.unwrap_or(1);
                let run = |big_n: usize| lemma5_check(&c.sys, y, lambda, f, big_n, big_n * p + f.band_width());
                let (lhs64, rhs64) = run(64)?;
                let (lhs128, rhs128) = run(128)?;
                let d64 = lhs64 - rhs64;
                let d128 = lhs128 - rhs128;
                let ratio = if d64.abs() < 1e-9 { 0.5 } else { d128 / d64 };
                let halves = (ratio - 0.5).abs() <= 0.5 * c.tol.halving;
                rows.push(Row {
                    check: "lemma5",
                    case: format!("{name} y={y} lambda=e({t:.4})"),
                    measured: format!("lhs={lhs64:.6} rhs={rhs64:.6} ratio={ratio:.6}"),
                    bound: format!("slack={} ratio=0.5+-{}", c.tol.lemma5_slack, 0.5 * c.tol.halving),
                    pass: lhs64 >= rhs64 - c.tol.lemma5_slack && halves,
                });
            }
        }
    }
    Ok(rows)
}

fn lemma6(c: &Corpus) -> Result<Vec<Row>> {
    let points: Vec<ExtPoint> =
        c.periodic_orbits(8, 4)?.iter().map(|y| extend_periodic(&c.sys, y)).collect::<Result<_>>()?;
    let big_m = c.budget.window.max(2);
    let mut rows = Vec::new();
    for (i, x) in points.iter().enumerate() {
        for (name, f) in c.semicrossed() {
            let mut diffs = Vec::new();
            for m in [big_m / 2, big_m] {
                let m = m.max(f.band_width()).max(1);
                let (bil, sup) = lemma6_check(&c.sys, x, f, m, 2 * m + 1)?;
                diffs.push((bil, sup, (bil - sup).abs()));
            }
            let (bil, sup, diff) = diffs[1];
            let decreasing = diff <= diffs[0].2 + c.tol.norm;
            rows.push(Row {
                check: "lemma6",
                case: format!("{name} lift{i} M={big_m}"),
                measured: format!("bilateral={bil:.6} orbit={sup:.6} diff={diff:.6}"),
                bound: num(c.tol.lemma6),
                pass: diff <= c.tol.lemma6 && decreasing,
            });
        }
    }
    Ok(rows)
}

/// Largest entrywise difference between `U*·mat(F)·U` and `mat(α(F))` on
/// the interior of a bilateral window.
pub fn alpha_interior_defect(sys: &DynamicalSystem, x: &ExtPoint, f: &Element, m: usize) -> Result<f64> {
    let mat_f = bilateral_rep_matrix(sys, x, f, m)?;
    let mat_a = bilateral_rep_matrix(sys, x, &f.alpha(sys)?, m)?;
    let mat_u = bilateral_rep_matrix(sys, x, &Element::u_pow(1), m)?;
    let conj = mat_u.adjoint().mul(&mat_f).mul(&mat_u);
    let n = mat_f.dim();
    let edge = f.band_width() + 1;
    let mut worst: f64 = 0.0;
    for i in edge..n.saturating_sub(edge) {
        for j in edge..n.saturating_sub(edge) {
            worst = worst.max((conj.get(i, j) - mat_a.get(i, j)).norm());
        }
    }
    Ok(worst)
}

fn lemma7(c: &Corpus) -> Result<Vec<Row>> {
    let mut rng = c.rng(7);
    let mut rows = Vec::new();
    let mut elements = c.elements.clone();
    for i in 0..c.cases {
        elements.push((format!("random{i}"), random_crossed(&c.sys, &mut rng, -2..=2, 3)));
    }
    let x = match c.sys.procedural_point(c.budget.seed) {
        Ok(p) => lift_point(&c.sys, &p, Chooser::SeededRandom(c.budget.seed))?,
        Err(_) => extend_periodic(&c.sys, &Point::State(0))?,
    };
    for (name, f) in &elements {
        let alpha = f.alpha(&c.sys)?;
        let structural = f.coeffs().len() == alpha.coeffs().len()
            && f.coeffs().iter().all(|(n, g)| g.alpha_tilde(&c.sys).ok().as_ref() == alpha.coeff(*n));
        let m = 8usize.max(f.band_width() + 2);
        let defect = alpha_interior_defect(&c.sys, &x, f, m)?;
        rows.push(Row {
            check: "lemma7",
            case: name.clone(),
            measured: format!("structural={structural} defect={defect:e}"),
            bound: format!("{:e}", c.tol.matrix),
            pass: structural && defect <= c.tol.matrix,
        });
    }
    Ok(rows)
}

/// Largest deviation of `‖Π_{y,λ}(G Uᵐ)‖` from `‖Π_{y,λ}(G)‖`.
pub fn pushdown_norm_defect(
    sys: &DynamicalSystem,
    g: &Element,
    h: &Element,
    orbits: &[Point],
    lambdas: &[Complex64],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for y in orbits {
        for &lambda in lambdas {
            let a = spectral_norm(&periodic_rep_matrix(sys, y, lambda, g)?)?;
            let b = spectral_norm(&periodic_rep_matrix(sys, y, lambda, h)?)?;
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

fn thm4_pushdown(c: &Corpus) -> Result<Vec<Row>> {
    let mut rng = c.rng(9);
    let orbits = c.periodic_orbits(6, 3)?;
    let lambdas = [cis_turns(0.0), cis_turns(0.2), cis_turns(0.55)];
    let mut rows = Vec::new();
    for i in 0..c.cases {
        let g = random_crossed(&c.sys, &mut rng, 0..=2, 4);
        let d = g.max_depth();
        for j in 0..3 {
            let m = d - 1 + j;
            let h = g.pushdown(&c.sys, m)?;
            let defect = pushdown_norm_defect(&c.sys, &g, &h, &orbits, &lambdas)?;
            rows.push(Row {
                check: "thm4-pushdown",
                case: format!("random{i} d={d} m={m}"),
                measured: format!("semicrossed={} defect={defect:e}", h.is_semicrossed()),
                bound: format!("{:e}", c.tol.norm),
                pass: h.is_semicrossed() && defect <= c.tol.norm,
            });
        }
    }
    Ok(rows)
}

fn thm3(c: &Corpus) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for (name, f) in c.semicrossed() {
        let (semi, crossed) = theorem3_check(&c.sys, f, &c.budget)?;
        rows.push(Row {
            check: "thm3",
            case: name.clone(),
            measured: format!(
                "semicrossed=[{:.6},{:.6}] crossed=[{:.6},{:.6}]",
                semi.lower, semi.upper, crossed.lower, crossed.upper
            ),
            bound: "overlap".into(),
            pass: semi.overlaps(&crossed, c.tol.norm),
        });
    }
    Ok(rows)
}

/// Points whose first `n` orbit points are distinct.
fn aperiodic_windows(c: &Corpus, n: usize, count: usize) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for i in 0..(4 * count as u64) {
        if out.len() >= count {
            break;
        }
        let x = match c.sys.procedural_point(c.budget.seed.wrapping_add(i)) {
            Ok(x) => x,
            Err(Error::InvalidSystem(_)) => return Ok(out),
            Err(e) => return Err(e),
        };
        let orbit = c.sys.forward_orbit(&x, n)?;
        let distinct = (0..n).all(|j| (0..j).all(|i| orbit[i] != orbit[j]));
        if distinct {
            out.push(x);
        }
    }
    Ok(out)
}

fn prop1(c: &Corpus) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for x in aperiodic_windows(c, 10, c.cases)? {
        let mut bad = Vec::new();
        for n in 4..=10 {
            let gens = default_generators(&c.sys, &x, n)?;
            if !invariant_tail_check(&c.sys, &x, &gens, n)? {
                bad.push(n);
            }
        }
        rows.push(Row {
            check: "prop1",
            case: format!("x={x} n=4..10"),
            measured: if bad.is_empty() { "tails only".into() } else { format!("extra invariant subspaces at n={bad:?}") },
            bound: "tails only".into(),
            pass: bad.is_empty(),
        });
    }
    Ok(rows)
}

/// Coefficient of `α(F)` evaluated at `x̃` against the coefficient of `F`
/// evaluated at `φ̃ x̃`.
pub fn alpha_pointwise_defect(sys: &DynamicalSystem, f: &Element, x: &ExtPoint) -> Result<f64> {
    let moved = tilde_apply(sys, x)?;
    let alpha = f.alpha(sys)?;
    let mut worst: f64 = 0.0;
    for (n, g) in f.coeffs() {
        let a = alpha.coeff(*n).map(|h| h.evaluate(sys, x)).transpose()?.unwrap_or_default();
        let b = g.evaluate(sys, &moved)?;
        worst = worst.max((a - b).norm());
    }
    Ok(worst)
}
