//! Computable base systems `(X, φ)`.
//!
//! Three families are supported: the expanding circle maps `x ↦ kx mod 1`
//! acting on exact rationals (plus seeded base-`k` digit expansions for
//! aperiodic points), one-sided subshifts of finite type, and permutations of
//! a finite set. Every map is a continuous surjection; only the permutations
//! are invertible.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::funcalg::{BaseFunction, TrigPoly};

/// Number of base-`k` digits kept when a digit expansion is turned into a
/// rational for function evaluation.
pub const PROCEDURAL_DIGITS: usize = 96;

/// Largest cylinder depth used when separating symbolic points.
const MAX_SEPARATION_DEPTH: usize = 24;

/// Square 0/1 transition matrix of a subshift of finite type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransitionMatrix {
    rows: Vec<Vec<bool>>,
}

impl TransitionMatrix {
    /// Validates squareness and that every row and every column has a 1.
    pub fn new(rows: Vec<Vec<bool>>) -> Result<Self> {
        let s = rows.len();
        if s == 0 {
            return Err(Error::InvalidSystem("empty transition matrix".into()));
        }
        if s > 256 {
            return Err(Error::InvalidSystem("alphabet larger than 256 symbols".into()));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != s) {
            return Err(Error::InvalidSystem(format!(
                "transition matrix is not square (row {i} has {} entries, expected {s})",
                rows[i].len()
            )));
        }
        if let Some(i) = (0..s).find(|&i| !rows[i].iter().any(|&b| b)) {
            return Err(Error::InvalidMatrix { axis: "row", index: i });
        }
        if let Some(j) = (0..s).find(|&j| !rows.iter().any(|r| r[j])) {
            return Err(Error::InvalidMatrix { axis: "column", index: j });
        }
        Ok(Self { rows })
    }

    pub fn from_u8(rows: &[Vec<u8>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&v| v != 0).collect()).collect())
    }

    pub fn full(s: usize) -> Self {
        Self { rows: vec![vec![true; s]; s] }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn allowed(&self, a: u8, b: u8) -> bool {
        self.rows[a as usize][b as usize]
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn successors(&self, a: u8) -> Vec<u8> {
        (0..self.size())
            .filter(|&b| self.rows[a as usize][b])
            .map(|b| b as u8)
            .collect()
    }

    pub fn predecessors(&self, b: u8) -> Vec<u8> {
        (0..self.size())
            .filter(|&a| self.rows[a][b as usize])
            .map(|a| a as u8)
            .collect()
    }

    pub fn admits(&self, word: &[u8]) -> bool {
        word.iter().all(|&a| (a as usize) < self.size())
            && word.windows(2).all(|w| self.allowed(w[0], w[1]))
    }

    /// All admissible words of length `len`, in lexicographic order.
    ///
    /// Every row has a successor, so each finite path extends to an infinite
    /// admissible sequence.
    pub fn words(&self, len: usize) -> Vec<Vec<u8>> {
        if len == 0 {
            return vec![Vec::new()];
        }
        let mut out: Vec<Vec<u8>> = (0..self.size()).map(|a| vec![a as u8]).collect();
        for _ in 1..len {
            let mut next = Vec::with_capacity(out.len() * 2);
            for w in &out {
                let last = *w.last().unwrap();
                for b in self.successors(last) {
                    let mut v = w.clone();
                    v.push(b);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    /// Graph-theoretic report for the one-sided shift.
    pub fn properties(&self) -> SftReport {
        let s = self.size();
        let mut graph = DiGraph::<(), ()>::with_capacity(s, s * s);
        let nodes: Vec<_> = (0..s).map(|_| graph.add_node(())).collect();
        for a in 0..s {
            for b in 0..s {
                if self.rows[a][b] {
                    graph.add_edge(nodes[a], nodes[b], ());
                }
            }
        }
        let components = tarjan_scc(&graph);
        let mut component = vec![0usize; s];
        for (c, members) in components.iter().enumerate() {
            for v in members {
                component[v.index()] = c;
            }
        }
        let transitive = components.len() == 1;
        // A word a0..an closes up into a cycle through a0 iff an reaches a0,
        // i.e. iff every edge stays inside one strongly connected component.
        let edges_close = (0..s).all(|a| (0..s).all(|b| !self.rows[a][b] || component[a] == component[b]));
        let single_cycle = transitive && self.rows.iter().all(|r| r.iter().filter(|&&v| v).count() == 1);
        SftReport {
            transitive,
            dense_periodic: edges_close,
            minimal: single_cycle,
            dense_recurrent: edges_close,
        }
    }
}

/// Topological properties of a subshift of finite type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SftReport {
    pub transitive: bool,
    pub dense_periodic: bool,
    pub minimal: bool,
    pub dense_recurrent: bool,
}

pub fn sft_properties(rows: &[Vec<bool>]) -> Result<SftReport> {
    Ok(TransitionMatrix::new(rows.to_vec())?.properties())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DynamicalSystem {
    /// `x ↦ kx mod 1` on the circle `[0, 1)`.
    CircleTimesK { k: u32 },
    /// One-sided shift on sequences admissible for the transition matrix.
    Sft(TransitionMatrix),
    /// A bijection of `{0, …, s−1}`.
    Permutation(Vec<usize>),
}

impl DynamicalSystem {
    pub fn circle(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidSystem(format!("circle map needs k >= 2, got {k}")));
        }
        Ok(Self::CircleTimesK { k })
    }

    pub fn sft(rows: Vec<Vec<bool>>) -> Result<Self> {
        Ok(Self::Sft(TransitionMatrix::new(rows)?))
    }

    pub fn permutation(perm: Vec<usize>) -> Result<Self> {
        let s = perm.len();
        if s == 0 {
            return Err(Error::InvalidSystem("empty permutation".into()));
        }
        let mut seen = vec![false; s];
        for &p in &perm {
            if p >= s || seen[p] {
                return Err(Error::InvalidSystem(format!("{perm:?} is not a bijection")));
            }
            seen[p] = true;
        }
        Ok(Self::Permutation(perm))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::CircleTimesK { .. } => "circle",
            Self::Sft(_) => "sft",
            Self::Permutation(_) => "permutation",
        }
    }

    pub fn is_homeomorphism(&self) -> bool {
        matches!(self, Self::Permutation(_))
    }

    fn mismatch(&self, x: &Point) -> Error {
        Error::TypeMismatch { system: self.kind_name(), point: x.to_string() }
    }

    /// Transition structure of the symbolic coding (digits for circle maps).
    fn digit_matrix(&self) -> Option<TransitionMatrix> {
        match self {
            Self::CircleTimesK { k } => Some(TransitionMatrix::full(*k as usize)),
            Self::Sft(m) => Some(m.clone()),
            Self::Permutation(_) => None,
        }
    }

    /// Checks that `x` is a point of this system.
    pub fn validate(&self, x: &Point) -> Result<()> {
        match (self, x) {
            (Self::CircleTimesK { .. }, Point::Rational(r)) => {
                if r.is_negative() || *r >= BigRational::one() {
                    Err(Error::InvalidPoint(format!("{r} is outside [0, 1)")))
                } else {
                    Ok(())
                }
            }
            (Self::CircleTimesK { k }, Point::Procedural(p)) => {
                if p.alphabet() == *k as usize {
                    Ok(())
                } else {
                    Err(self.mismatch(x))
                }
            }
            (Self::Sft(m), Point::Word(w)) => {
                let mut seq = w.preperiod.clone();
                seq.extend_from_slice(&w.cycle);
                seq.push(w.cycle[0]);
                if m.admits(&seq) {
                    Ok(())
                } else {
                    Err(Error::InvalidPoint(format!("{w} is not admissible")))
                }
            }
            (Self::Sft(m), Point::Procedural(p)) => {
                if p.stream.successors.len() == m.size() && p.is_admissible(m) {
                    Ok(())
                } else {
                    Err(Error::InvalidPoint(format!("{p} is not admissible")))
                }
            }
            (Self::Permutation(perm), Point::State(s)) => {
                if *s < perm.len() {
                    Ok(())
                } else {
                    Err(Error::InvalidPoint(format!("state {s} out of range")))
                }
            }
            _ => Err(self.mismatch(x)),
        }
    }

    /// `φ(x)`, exact.
    pub fn apply(&self, x: &Point) -> Result<Point> {
        match (self, x) {
            (Self::CircleTimesK { k }, Point::Rational(r)) => {
                let num = (r.numer() * BigInt::from(*k)).mod_floor(r.denom());
                Ok(Point::Rational(BigRational::new(num, r.denom().clone())))
            }
            (Self::CircleTimesK { .. } | Self::Sft(_), Point::Procedural(p)) => {
                Ok(Point::Procedural(p.shifted()))
            }
            (Self::Sft(_), Point::Word(w)) => Ok(Point::Word(w.shifted())),
            (Self::Permutation(perm), Point::State(s)) if *s < perm.len() => Ok(Point::State(perm[*s])),
            _ => Err(self.mismatch(x)),
        }
    }

    /// The full preimage set `φ⁻¹{x}`, in a fixed order.
    ///
    /// Circle preimages are ordered by value, symbolic ones by the prepended
    /// symbol.
    pub fn preimages(&self, x: &Point) -> Result<Vec<Point>> {
        match (self, x) {
            (Self::CircleTimesK { k }, Point::Rational(r)) => {
                let k = BigInt::from(*k);
                Ok((0..k.to_u32().unwrap())
                    .map(|j| Point::Rational((r + BigRational::from_integer(BigInt::from(j))) / &k))
                    .collect())
            }
            (Self::CircleTimesK { k }, Point::Procedural(p)) => {
                Ok((0..*k as u8).map(|a| Point::Procedural(p.prepended(a))).collect())
            }
            (Self::Sft(m), Point::Word(w)) => Ok(m
                .predecessors(w.first())
                .into_iter()
                .map(|a| Point::Word(w.prepended(a)))
                .collect()),
            (Self::Sft(m), Point::Procedural(p)) => Ok(m
                .predecessors(p.symbol(0))
                .into_iter()
                .map(|a| Point::Procedural(p.prepended(a)))
                .collect()),
            (Self::Permutation(perm), Point::State(s)) if *s < perm.len() => {
                let pre = perm.iter().position(|&t| t == *s).unwrap();
                Ok(vec![Point::State(pre)])
            }
            _ => Err(self.mismatch(x)),
        }
    }

    /// `[x, φ(x), …, φⁿ⁻¹(x)]`.
    pub fn forward_orbit(&self, x: &Point, n: usize) -> Result<Vec<Point>> {
        let mut out = Vec::with_capacity(n);
        if n == 0 {
            return Ok(out);
        }
        let mut cur = x.clone();
        for i in 0..n {
            if i + 1 < n {
                let next = self.apply(&cur)?;
                out.push(std::mem::replace(&mut cur, next));
            } else {
                out.push(cur.clone());
            }
        }
        Ok(out)
    }

    pub fn iterate(&self, x: &Point, n: usize) -> Result<Point> {
        let mut cur = x.clone();
        for _ in 0..n {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }

    /// Periodicity class of `x`.
    ///
    /// Rational, word and state points are classified exactly (a rational
    /// `p/q` needs at most `q` steps); digit expansions are reported
    /// `Unresolved`.
    pub fn classify(&self, x: &Point, max_steps: usize) -> Result<Classification> {
        self.validate(x)?;
        match x {
            Point::Rational(_) => {
                let mut seen: HashMap<Point, usize> = HashMap::new();
                let mut cur = x.clone();
                for t in 0..=max_steps {
                    if let Some(&first) = seen.get(&cur) {
                        let period = t - first;
                        return Ok(if first == 0 {
                            Classification::Periodic { period }
                        } else {
                            Classification::EventuallyPeriodic { preperiod: first, period }
                        });
                    }
                    let next = self.apply(&cur)?;
                    seen.insert(std::mem::replace(&mut cur, next), t);
                }
                Ok(Classification::Unresolved { steps: max_steps })
            }
            Point::Word(w) => Ok(if w.preperiod.is_empty() {
                Classification::Periodic { period: w.cycle.len() }
            } else {
                Classification::EventuallyPeriodic { preperiod: w.preperiod.len(), period: w.cycle.len() }
            }),
            Point::State(s) => {
                let Self::Permutation(perm) = self else { unreachable!() };
                let mut period = 1;
                let mut cur = perm[*s];
                while cur != *s {
                    cur = perm[cur];
                    period += 1;
                }
                Ok(Classification::Periodic { period })
            }
            Point::Procedural(_) => Ok(Classification::Unresolved { steps: max_steps }),
        }
    }

    /// Period of `x` if it is periodic, found with an exact search.
    pub fn period_of(&self, x: &Point) -> Result<Option<usize>> {
        let steps = match x {
            Point::Rational(r) => r.denom().to_usize().unwrap_or(usize::MAX / 2) + 1,
            _ => 1,
        };
        Ok(match self.classify(x, steps)? {
            Classification::Periodic { period } => Some(period),
            _ => None,
        })
    }

    /// A `[0, 1]`-valued function equal to 1 at `orbit[n]` and 0 at every
    /// other `orbit[j]`, `j ≤ m` (indices are 1-based).
    pub fn separating_function(&self, orbit: &[Point], n: usize, m: usize) -> Result<BaseFunction> {
        if n == 0 || n > m || m > orbit.len() {
            return Err(Error::BadInput(format!(
                "need 1 <= n <= m <= {}, got n = {n}, m = {m}",
                orbit.len()
            )));
        }
        let target = &orbit[n - 1];
        for (j, other) in orbit[..m].iter().enumerate() {
            if j + 1 != n && other == target {
                return Err(Error::SeparationImpossible { n, j: j + 1 });
            }
        }
        let others: Vec<&Point> = orbit[..m]
            .iter()
            .enumerate()
            .filter(|(j, _)| j + 1 != n)
            .map(|(_, p)| p)
            .collect();
        match self {
            Self::CircleTimesK { .. } => {
                let a = self.circle_phase(target)?;
                let bs = others
                    .iter()
                    .map(|p| self.circle_phase(p))
                    .collect::<Result<Vec<_>>>()?;
                Ok(BaseFunction::Trig(TrigPoly::bump(&a, &bs)))
            }
            Self::Sft(m) => {
                let target_syms = target.symbols(MAX_SEPARATION_DEPTH)?;
                let mut depth = 1;
                for p in &others {
                    let syms = p.symbols(MAX_SEPARATION_DEPTH)?;
                    let diff = syms
                        .iter()
                        .zip(&target_syms)
                        .position(|(a, b)| a != b)
                        .ok_or_else(|| {
                            Error::BadInput(format!(
                                "{target} and {p} agree on the first {MAX_SEPARATION_DEPTH} symbols"
                            ))
                        })?;
                    depth = depth.max(diff + 1);
                }
                let prefix = &target_syms[..depth];
                Ok(BaseFunction::cylinder_indicator(m, prefix))
            }
            Self::Permutation(perm) => {
                let Point::State(s) = target else { return Err(self.mismatch(target)) };
                let mut values = vec![0.0; perm.len()];
                values[*s] = 1.0;
                Ok(BaseFunction::tabular_real(&values))
            }
        }
    }

    /// A circle point as an exact rational (digit expansions are truncated).
    pub fn circle_phase(&self, x: &Point) -> Result<BigRational> {
        match (self, x) {
            (Self::CircleTimesK { .. }, Point::Rational(r)) => Ok(r.clone()),
            (Self::CircleTimesK { k }, Point::Procedural(p)) => Ok(p.truncated_value(*k, PROCEDURAL_DIGITS)),
            _ => Err(self.mismatch(x)),
        }
    }

    /// A deterministic aperiodic-looking point built from a seeded walk.
    pub fn procedural_point(&self, seed: u64) -> Result<Point> {
        let m = self
            .digit_matrix()
            .ok_or_else(|| Error::InvalidSystem("permutation systems have no digit expansions".into()))?;
        Ok(Point::Procedural(ProceduralWord::new(&m, seed)))
    }

    /// Every periodic point of period at most `max_period` (symbolic systems
    /// and permutations) in a deterministic order.
    pub fn periodic_points(&self, max_period: usize) -> Vec<Point> {
        match self {
            Self::CircleTimesK { k } => {
                // Fixed points of φⁿ are j/(kⁿ−1).
                let mut out: Vec<Point> = Vec::new();
                for n in 1..=max_period {
                    let q = (*k as u64).pow(n as u32) - 1;
                    for j in 0..q {
                        let r = BigRational::new(BigInt::from(j), BigInt::from(q));
                        let p = Point::Rational(r);
                        if !out.contains(&p) {
                            out.push(p);
                        }
                    }
                }
                out
            }
            Self::Sft(m) => {
                let mut out = Vec::new();
                for n in 1..=max_period {
                    for w in m.words(n) {
                        if m.allowed(*w.last().unwrap(), w[0]) {
                            let word = Word::new(Vec::new(), w).expect("nonempty cycle");
                            let p = Point::Word(word);
                            if !out.contains(&p) {
                                out.push(p);
                            }
                        }
                    }
                }
                out
            }
            Self::Permutation(perm) => (0..perm.len()).map(Point::State).collect(),
        }
    }
}

/// Periodicity class of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Periodic { period: usize },
    /// Aperiodic point whose image under `φ^preperiod` is periodic.
    EventuallyPeriodic { preperiod: usize, period: usize },
    Unresolved { steps: usize },
}

impl Classification {
    pub fn is_periodic(&self) -> bool {
        matches!(self, Self::Periodic { .. })
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Periodic { period } => write!(f, "periodic\t{period}\t0"),
            Self::EventuallyPeriodic { preperiod, period } => {
                write!(f, "eventually_periodic\t{period}\t{preperiod}")
            }
            Self::Unresolved { steps } => write!(f, "unresolved\t-\t{steps}"),
        }
    }
}

/// Eventually periodic sequence `preperiod · cycle^∞`, stored canonically:
/// the cycle is primitive and the preperiod is as short as possible.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    preperiod: Vec<u8>,
    cycle: Vec<u8>,
}

impl Word {
    pub fn new(mut preperiod: Vec<u8>, cycle: Vec<u8>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidPoint("word cycle must be nonempty".into()));
        }
        let mut cycle = primitive_root(&cycle).to_vec();
        while let (Some(&a), Some(&b)) = (preperiod.last(), cycle.last()) {
            if a != b {
                break;
            }
            preperiod.pop();
            cycle.rotate_right(1);
        }
        Ok(Self { preperiod, cycle })
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.preperiod
    }

    pub fn cycle(&self) -> &[u8] {
        &self.cycle
    }

    pub fn symbol(&self, i: usize) -> u8 {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.cycle[(i - self.preperiod.len()) % self.cycle.len()]
        }
    }

    fn first(&self) -> u8 {
        self.symbol(0)
    }

    fn shifted(&self) -> Self {
        if self.preperiod.is_empty() {
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(1);
            Self { preperiod: Vec::new(), cycle }
        } else {
            Self { preperiod: self.preperiod[1..].to_vec(), cycle: self.cycle.clone() }
        }
    }

    fn prepended(&self, a: u8) -> Self {
        let mut pre = Vec::with_capacity(self.preperiod.len() + 1);
        pre.push(a);
        pre.extend_from_slice(&self.preperiod);
        Self::new(pre, self.cycle.clone()).expect("cycle is nonempty")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.preperiod {
            write!(f, "{}", symbol_char(*s))?;
        }
        write!(f, "(")?;
        for s in &self.cycle {
            write!(f, "{}", symbol_char(*s))?;
        }
        write!(f, ")")
    }
}

fn symbol_char(s: u8) -> char {
    std::char::from_digit(s as u32, 36).unwrap_or('?')
}

fn primitive_root(w: &[u8]) -> &[u8] {
    let n = w.len();
    for d in 1..n {
        if n % d == 0 && (d..n).all(|i| w[i] == w[i - d]) {
            return &w[..d];
        }
    }
    w
}

struct SymbolStream {
    seed: u64,
    successors: Vec<Vec<u8>>,
    cache: Mutex<StreamCache>,
}

struct StreamCache {
    symbols: Vec<u8>,
    rng: ChaCha8Rng,
}

impl SymbolStream {
    fn symbol(&self, i: usize) -> u8 {
        let mut cache = self.cache.lock().expect("symbol cache poisoned");
        while cache.symbols.len() <= i {
            let StreamCache { symbols, rng } = &mut *cache;
            let next = match symbols.last() {
                None => rng.random_range(0..self.successors.len()) as u8,
                Some(&s) => {
                    let succ = &self.successors[s as usize];
                    succ[rng.random_range(0..succ.len())]
                }
            };
            symbols.push(next);
        }
        cache.symbols[i]
    }
}

/// A one-sided sequence `head · walk[offset..]`, where `walk` is a seeded
/// random walk on the transition graph, generated lazily and memoized.
#[derive(Clone)]
pub struct ProceduralWord {
    head: Vec<u8>,
    stream: Arc<SymbolStream>,
    offset: usize,
}

impl ProceduralWord {
    fn new(m: &TransitionMatrix, seed: u64) -> Self {
        let successors = (0..m.size()).map(|a| m.successors(a as u8)).collect();
        let stream = SymbolStream {
            seed,
            successors,
            cache: Mutex::new(StreamCache { symbols: Vec::new(), rng: ChaCha8Rng::seed_from_u64(seed) }),
        };
        Self { head: Vec::new(), stream: Arc::new(stream), offset: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.stream.seed
    }

    fn alphabet(&self) -> usize {
        self.stream.successors.len()
    }

    pub fn symbol(&self, i: usize) -> u8 {
        if i < self.head.len() {
            self.head[i]
        } else {
            self.stream.symbol(self.offset + i - self.head.len())
        }
    }

    fn is_admissible(&self, m: &TransitionMatrix) -> bool {
        let mut seq = self.head.clone();
        seq.push(self.stream.symbol(self.offset));
        m.admits(&seq)
    }

    fn canonical(mut self) -> Self {
        while let Some(&last) = self.head.last() {
            if self.offset == 0 || self.stream.symbol(self.offset - 1) != last {
                break;
            }
            self.head.pop();
            self.offset -= 1;
        }
        self
    }

    fn shifted(&self) -> Self {
        let mut out = self.clone();
        if out.head.is_empty() {
            out.offset += 1;
        } else {
            out.head.remove(0);
        }
        out
    }

    fn prepended(&self, a: u8) -> Self {
        let mut out = self.clone();
        out.head.insert(0, a);
        out.canonical()
    }

    /// `Σ_{i<digits} d_i k^{−(i+1)}` as an exact rational.
    fn truncated_value(&self, k: u32, digits: usize) -> BigRational {
        let base = BigInt::from(k);
        let mut num = BigInt::zero();
        for i in 0..digits {
            num = num * &base + BigInt::from(self.symbol(i));
        }
        BigRational::new(num, num_traits::pow(base, digits))
    }
}

impl PartialEq for ProceduralWord {
    fn eq(&self, other: &Self) -> bool {
        self.stream.seed == other.stream.seed
            && self.stream.successors == other.stream.successors
            && self.offset == other.offset
            && self.head == other.head
    }
}

impl Eq for ProceduralWord {}

impl Hash for ProceduralWord {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.stream.seed.hash(state);
        self.offset.hash(state);
        self.head.hash(state);
    }
}

impl fmt::Debug for ProceduralWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProceduralWord({self})")
    }
}

impl fmt::Display for ProceduralWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.head {
            write!(f, "{}", symbol_char(*s))?;
        }
        write!(f, "~{}", self.stream.seed)?;
        if self.offset > 0 {
            write!(f, "+{}", self.offset)?;
        }
        Ok(())
    }
}

/// A point of one of the base systems.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Point {
    /// Reduced rational in `[0, 1)`.
    Rational(BigRational),
    Word(Word),
    Procedural(ProceduralWord),
    State(usize),
}

impl Point {
    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q <= 0 || p < 0 || p >= q {
            return Err(Error::InvalidPoint(format!("{p}/{q} is outside [0, 1)")));
        }
        Ok(Self::Rational(BigRational::new(BigInt::from(p), BigInt::from(q))))
    }

    pub fn word(preperiod: &[u8], cycle: &[u8]) -> Result<Self> {
        Ok(Self::Word(Word::new(preperiod.to_vec(), cycle.to_vec())?))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Self::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// First `n` symbols of a symbolic point.
    pub fn symbols(&self, n: usize) -> Result<Vec<u8>> {
        match self {
            Self::Word(w) => Ok((0..n).map(|i| w.symbol(i)).collect()),
            Self::Procedural(p) => Ok((0..n).map(|i| p.symbol(i)).collect()),
            _ => Err(Error::InvalidPoint(format!("{self} has no symbolic coding"))),
        }
    }

    /// Floating approximation of a circle point.
    pub fn approx_value(&self) -> Option<f64> {
        match self {
            Self::Rational(r) => r.to_f64(),
            Self::Procedural(p) => {
                let k = p.alphabet() as f64;
                let mut x = 0.0;
                let mut scale = 1.0 / k;
                for i in 0..64 {
                    x += p.symbol(i) as f64 * scale;
                    scale /= k;
                }
                Some(x)
            }
            _ => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rational(r) => write!(f, "{r}"),
            Self::Word(w) => write!(f, "{w}"),
            Self::Procedural(p) => write!(f, "{p}"),
            Self::State(s) => write!(f, "#{s}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doubling() -> DynamicalSystem {
        DynamicalSystem::circle(2).unwrap()
    }

    fn golden() -> DynamicalSystem {
        DynamicalSystem::sft(vec![vec![true, true], vec![true, false]]).unwrap()
    }

    fn q(p: i64, d: i64) -> Point {
        Point::rational(p, d).unwrap()
    }

    #[test]
    fn apply_examples() {
        let sys = doubling();
        assert_eq!(sys.apply(&q(1, 3)).unwrap(), q(2, 3));
        assert_eq!(sys.apply(&q(1, 2)).unwrap(), q(0, 1));
        let w = Point::word(&[], &[0, 1]).unwrap();
        assert_eq!(golden().apply(&w).unwrap(), Point::word(&[], &[1, 0]).unwrap());
    }

    #[test]
    fn preimage_examples() {
        let sys = doubling();
        assert_eq!(sys.preimages(&q(1, 3)).unwrap(), vec![q(1, 6), q(2, 3)]);
        assert_eq!(sys.preimages(&q(0, 1)).unwrap(), vec![q(0, 1), q(1, 2)]);
        // Only 0 may precede 1 in the golden-mean shift.
        let pre = golden().preimages(&Point::word(&[], &[1, 0]).unwrap()).unwrap();
        assert_eq!(pre, vec![Point::word(&[], &[0, 1]).unwrap()]);
    }

    #[test]
    fn classify_examples() {
        let sys = doubling();
        assert_eq!(sys.classify(&q(1, 3), 10).unwrap(), Classification::Periodic { period: 2 });
        assert_eq!(
            sys.classify(&q(1, 2), 10).unwrap(),
            Classification::EventuallyPeriodic { preperiod: 1, period: 1 }
        );
        assert_eq!(sys.classify(&q(1, 7), 10).unwrap(), Classification::Periodic { period: 3 });
        assert_eq!(sys.classify(&q(1, 7), 2).unwrap(), Classification::Unresolved { steps: 2 });
    }

    #[test]
    fn forward_orbit_examples() {
        let sys = doubling();
        assert_eq!(sys.forward_orbit(&q(1, 3), 4).unwrap(), vec![q(1, 3), q(2, 3), q(1, 3), q(2, 3)]);
        let perm = DynamicalSystem::permutation(vec![1, 0]).unwrap();
        assert_eq!(
            perm.forward_orbit(&Point::State(0), 3).unwrap(),
            vec![Point::State(0), Point::State(1), Point::State(0)]
        );
        let full = DynamicalSystem::sft(vec![vec![true; 2]; 2]).unwrap();
        let orbit = full.forward_orbit(&Point::word(&[0], &[1]).unwrap(), 3).unwrap();
        let ones = Point::word(&[], &[1]).unwrap();
        assert_eq!(orbit, vec![Point::word(&[0], &[1]).unwrap(), ones.clone(), ones]);
    }

    #[test]
    fn word_canonical_form() {
        let w = Word::new(vec![0, 1, 0, 1], vec![0, 1, 0, 1]).unwrap();
        assert_eq!(w.preperiod(), &[] as &[u8]);
        assert_eq!(w.cycle(), &[0, 1]);
        let w = Word::new(vec![1, 1], vec![0, 1]).unwrap();
        assert_eq!(w.preperiod(), &[1]);
        assert_eq!(w.cycle(), &[1, 0]);
        assert!(Word::new(vec![], vec![]).is_err());
    }

    #[test]
    fn invalid_inputs() {
        assert!(DynamicalSystem::circle(1).is_err());
        assert_eq!(
            DynamicalSystem::sft(vec![vec![true, false], vec![true, false]]),
            Err(Error::InvalidMatrix { axis: "column", index: 1 })
        );
        assert!(DynamicalSystem::permutation(vec![0, 0]).is_err());
        assert!(golden().validate(&Point::word(&[], &[1]).unwrap()).is_err());
        assert!(matches!(doubling().apply(&Point::State(0)), Err(Error::TypeMismatch { .. })));
    }

    #[test]
    fn separating_function_examples() {
        let sys = doubling();
        let f = sys.separating_function(&[q(1, 3), q(2, 3)], 1, 2).unwrap();
        let at = |p: &Point| f.eval(&sys, p).unwrap();
        assert!((at(&q(1, 3)).re - 1.0).abs() < 1e-12);
        assert!(at(&q(2, 3)).norm() < 1e-12);
        assert_eq!(
            sys.separating_function(&[q(1, 3), q(2, 3), q(1, 3)], 1, 3),
            Err(Error::SeparationImpossible { n: 1, j: 3 })
        );

        let g = golden();
        let orbit = g.forward_orbit(&Point::word(&[], &[0, 1]).unwrap(), 2).unwrap();
        let f = g.separating_function(&orbit, 1, 2).unwrap();
        // orbit[1] = (01)^∞ starts with 0: indicator of the depth-1 cylinder [0].
        assert_eq!(f, BaseFunction::cylinder_indicator(&TransitionMatrix::from_u8(&[vec![1, 1], vec![1, 0]]).unwrap(), &[0]));
    }

    #[test]
    fn sft_property_examples() {
        let full = sft_properties(&[vec![true, true], vec![true, true]]).unwrap();
        assert_eq!(full, SftReport { transitive: true, dense_periodic: true, minimal: false, dense_recurrent: true });
        let golden = sft_properties(&[vec![true, true], vec![true, false]]).unwrap();
        assert_eq!(golden, full);
        let cycle = sft_properties(&[vec![false, true], vec![true, false]]).unwrap();
        assert_eq!(cycle, SftReport { transitive: true, dense_periodic: true, minimal: true, dense_recurrent: true });
        // 0 → 1 is a one-way edge.
        let split = sft_properties(&[vec![true, true], vec![false, true]]).unwrap();
        assert!(!split.transitive && !split.dense_periodic);
        assert!(sft_properties(&[vec![false, false], vec![true, true]]).is_err());
    }

    #[test]
    fn procedural_points_shift_and_prepend() {
        let sys = golden();
        let p = sys.procedural_point(11).unwrap();
        sys.validate(&p).unwrap();
        let image = sys.apply(&p).unwrap();
        let pre = sys.preimages(&image).unwrap();
        assert!(pre.contains(&p));
        assert_eq!(sys.classify(&p, 50).unwrap(), Classification::Unresolved { steps: 50 });
        let c = doubling().procedural_point(3).unwrap();
        let x = c.approx_value().unwrap();
        assert!((0.0..1.0).contains(&x));
    }

    #[test]
    fn periodic_points_of_small_period() {
        let pts = doubling().periodic_points(2);
        assert_eq!(pts, vec![q(0, 1), q(1, 3), q(2, 3)]);
        let pts = golden().periodic_points(2);
        assert_eq!(pts.len(), 3);
    }
}
