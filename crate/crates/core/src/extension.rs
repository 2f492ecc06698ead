//! The natural extension `(X̃, φ̃)` of a base system.
//!
//! Points of `X̃` are backward orbits `(x₁, x₂, …)` with `φ(x_{n+1}) = x_n`.
//! They are built lazily: a chooser picks one preimage at each new depth and
//! the resulting coordinates are memoized behind a lock, so clones share
//! work and always agree.

use std::fmt;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynsys::{Classification, DynamicalSystem, Point, SftReport};
use crate::error::{Error, Result};

/// Number of backward steps searched for a return to the starting state
/// before a lift is left lazy.
const RETURN_SEARCH: usize = 256;

/// Rule selecting one preimage at each depth of a backward orbit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Chooser {
    /// First preimage in the order returned by `preimages`.
    AlwaysMin,
    SeededRandom(u64),
    /// Index (taken modulo the number of preimages) used at depth `d` is
    /// `tail[(d − 1) mod len]`.
    ExplicitTail(Vec<usize>),
}

impl Chooser {
    fn pick(&self, depth: usize, count: usize, rng: &mut ChaCha8Rng) -> usize {
        match self {
            Self::AlwaysMin => 0,
            Self::SeededRandom(_) => rng.random_range(0..count),
            Self::ExplicitTail(tail) => tail[(depth - 1) % tail.len()] % count,
        }
    }

    /// Number of depths after which a deterministic rule repeats itself.
    fn cycle_len(&self) -> Option<usize> {
        match self {
            Self::AlwaysMin => Some(1),
            Self::SeededRandom(_) => None,
            Self::ExplicitTail(tail) => Some(tail.len()),
        }
    }

    fn rng(&self) -> ChaCha8Rng {
        match self {
            Self::SeededRandom(seed) => ChaCha8Rng::seed_from_u64(*seed),
            _ => ChaCha8Rng::seed_from_u64(0),
        }
    }
}

impl fmt::Display for Chooser {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AlwaysMin => write!(f, "min"),
            Self::SeededRandom(s) => write!(f, "seeded={s}"),
            Self::ExplicitTail(t) => {
                let parts: Vec<String> = t.iter().map(|i| i.to_string()).collect();
                write!(f, "tail={}", parts.join("."))
            }
        }
    }
}

/// One period of a periodic backward orbit, read cyclically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicLift {
    coords: Vec<Point>,
}

impl PeriodicLift {
    pub fn coords(&self) -> &[Point] {
        &self.coords
    }
}

struct LiftCore {
    chooser: Chooser,
    state: Mutex<LiftState>,
}

struct LiftState {
    coords: Vec<Point>,
    rng: ChaCha8Rng,
}

impl LiftCore {
    /// Coordinate `i` (0-based) of the chooser-built backward orbit.
    fn coord(&self, sys: &DynamicalSystem, i: usize) -> Result<Point> {
        let mut st = self.state.lock().expect("lift cache poisoned");
        while st.coords.len() <= i {
            let depth = st.coords.len();
            let pre = sys.preimages(st.coords.last().unwrap())?;
            let LiftState { coords, rng } = &mut *st;
            let idx = self.chooser.pick(depth, pre.len(), rng);
            coords.push(pre.into_iter().nth(idx).unwrap());
        }
        Ok(st.coords[i].clone())
    }
}

/// A backward orbit `head · core[skip..]`, where `core` is built by a
/// chooser from its base point.
#[derive(Clone)]
pub struct LazyLift {
    head: Vec<Point>,
    core: Arc<LiftCore>,
    skip: usize,
}

impl LazyLift {
    pub fn chooser(&self) -> &Chooser {
        &self.core.chooser
    }
}

impl fmt::Debug for LazyLift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazyLift")
            .field("head", &self.head)
            .field("chooser", &self.core.chooser)
            .field("skip", &self.skip)
            .finish()
    }
}

/// A point of the natural extension.
#[derive(Debug, Clone)]
pub enum ExtPoint {
    Periodic(PeriodicLift),
    Lazy(LazyLift),
}

impl ExtPoint {
    /// Coordinate `m ≥ 1`.
    pub fn coord(&self, sys: &DynamicalSystem, m: usize) -> Result<Point> {
        if m == 0 {
            return Err(Error::BadInput("extension coordinates are numbered from 1".into()));
        }
        match self {
            Self::Periodic(p) => Ok(p.coords[(m - 1) % p.coords.len()].clone()),
            Self::Lazy(l) => {
                if m <= l.head.len() {
                    Ok(l.head[m - 1].clone())
                } else {
                    l.core.coord(sys, l.skip + m - 1 - l.head.len())
                }
            }
        }
    }

    /// Coordinates `1..=n`.
    pub fn coords(&self, sys: &DynamicalSystem, n: usize) -> Result<Vec<Point>> {
        (1..=n).map(|m| self.coord(sys, m)).collect()
    }

    /// Two-sided orbit values `c(t)` for `t` in `lo..=hi`, where `c(t)` is
    /// coordinate `t` for `t ≥ 1` and `φ^{1−t}(x₁)` for `t ≤ 0`. Coordinate
    /// `m` of `φ̃ⁱ(x̃)` is `c(m − i)`.
    pub fn two_sided(&self, sys: &DynamicalSystem, lo: i64, hi: i64) -> Result<Vec<Point>> {
        let mut out = Vec::with_capacity((hi - lo + 1).max(0) as usize);
        if lo > hi {
            return Ok(out);
        }
        if lo <= 0 {
            let x1 = self.coord(sys, 1)?;
            let forward = sys.forward_orbit(&x1, (1 - lo) as usize + 1)?;
            for t in lo..=hi.min(0) {
                out.push(forward[(1 - t) as usize].clone());
            }
        }
        for t in lo.max(1)..=hi {
            out.push(self.coord(sys, t as usize)?);
        }
        Ok(out)
    }

    pub fn project(&self, sys: &DynamicalSystem) -> Result<Point> {
        self.coord(sys, 1)
    }

    pub fn is_periodic_lift(&self) -> bool {
        matches!(self, Self::Periodic(_))
    }

    /// Compares coordinates `1..=depth`.
    pub fn agrees_to(&self, sys: &DynamicalSystem, other: &Self, depth: usize) -> Result<bool> {
        for m in 1..=depth {
            if self.coord(sys, m)? != other.coord(sys, m)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn describe(&self, sys: &DynamicalSystem, depth: usize) -> Result<String> {
        match self {
            Self::Periodic(p) => {
                let parts: Vec<String> = p.coords.iter().map(|c| c.to_string()).collect();
                Ok(format!("periodic [{}]", parts.join(", ")))
            }
            Self::Lazy(_) => {
                let parts: Vec<String> = self.coords(sys, depth)?.iter().map(|c| c.to_string()).collect();
                Ok(format!("lazy [{}, ...]", parts.join(", ")))
            }
        }
    }
}

/// A backward orbit starting at `x`, with preimages picked by `chooser`.
///
/// Returns a `PeriodicLift` when the chooser provably cycles back to `x`
/// within the search bound.
pub fn lift_point(sys: &DynamicalSystem, x: &Point, chooser: Chooser) -> Result<ExtPoint> {
    sys.validate(x)?;
    if let Chooser::ExplicitTail(t) = &chooser {
        if t.is_empty() {
            return Err(Error::BadInput("explicit chooser tail must be nonempty".into()));
        }
    }
    let core = Arc::new(LiftCore {
        state: Mutex::new(LiftState { coords: vec![x.clone()], rng: chooser.rng() }),
        chooser,
    });
    if let Some(len) = core.chooser.cycle_len() {
        let states = match sys {
            DynamicalSystem::Permutation(p) => p.len(),
            _ => RETURN_SEARCH,
        };
        let bound = states.max(RETURN_SEARCH) * len;
        let mut j = len;
        while j <= bound {
            if core.coord(sys, j)? == *x {
                let coords: Vec<Point> = (0..j).map(|i| core.coord(sys, i)).collect::<Result<_>>()?;
                return Ok(ExtPoint::Periodic(PeriodicLift { coords: primitive(coords) }));
            }
            j += len;
        }
    }
    Ok(ExtPoint::Lazy(LazyLift { head: Vec::new(), core, skip: 0 }))
}

fn primitive(coords: Vec<Point>) -> Vec<Point> {
    let n = coords.len();
    for d in 1..n {
        if n % d == 0 && (d..n).all(|i| coords[i] == coords[i - d]) {
            return coords[..d].to_vec();
        }
    }
    coords
}

/// The periodic lift `(x, φ^{n−1}x, …, φx, x, …)` of a point of period `n`.
pub fn extend_periodic(sys: &DynamicalSystem, x: &Point) -> Result<ExtPoint> {
    let n = sys.period_of(x)?.ok_or_else(|| Error::NotPeriodic(x.to_string()))?;
    let orbit = sys.forward_orbit(x, n)?;
    let mut coords = Vec::with_capacity(n);
    coords.push(x.clone());
    coords.extend(orbit[1..].iter().rev().cloned());
    Ok(ExtPoint::Periodic(PeriodicLift { coords }))
}

/// `φ̃(x₁, x₂, …) = (φ(x₁), x₁, x₂, …)`.
pub fn tilde_apply(sys: &DynamicalSystem, x: &ExtPoint) -> Result<ExtPoint> {
    match x {
        ExtPoint::Periodic(p) => {
            let mut coords = p.coords.clone();
            coords.rotate_right(1);
            Ok(ExtPoint::Periodic(PeriodicLift { coords }))
        }
        ExtPoint::Lazy(l) => {
            let mut out = l.clone();
            if out.skip > 0 {
                out.skip -= 1;
            } else {
                let first = x.coord(sys, 1)?;
                out.head.insert(0, sys.apply(&first)?);
            }
            Ok(ExtPoint::Lazy(out))
        }
    }
}

/// `φ̃⁻¹(x₁, x₂, …) = (x₂, x₃, …)`.
pub fn tilde_inverse(x: &ExtPoint) -> ExtPoint {
    match x {
        ExtPoint::Periodic(p) => {
            let mut coords = p.coords.clone();
            coords.rotate_left(1);
            ExtPoint::Periodic(PeriodicLift { coords })
        }
        ExtPoint::Lazy(l) => {
            let mut out = l.clone();
            if out.head.is_empty() {
                out.skip += 1;
            } else {
                out.head.remove(0);
            }
            ExtPoint::Lazy(out)
        }
    }
}

/// `φ̃ⁿ` for any integer `n`.
pub fn tilde_pow(sys: &DynamicalSystem, x: &ExtPoint, n: i64) -> Result<ExtPoint> {
    let mut cur = x.clone();
    if n >= 0 {
        for _ in 0..n {
            cur = tilde_apply(sys, &cur)?;
        }
    } else {
        for _ in 0..n.unsigned_abs() {
            cur = tilde_inverse(&cur);
        }
    }
    Ok(cur)
}

/// Periodicity of `x̃` under `φ̃`.
///
/// Lazy lifts are reported periodic only when the chooser's state provably
/// repeats: some core coordinate and chooser phase recur `p` steps later
/// and every coordinate before that point is checked directly.
pub fn classify_ext(sys: &DynamicalSystem, x: &ExtPoint, max_depth: usize) -> Result<Classification> {
    match x {
        ExtPoint::Periodic(p) => Ok(Classification::Periodic { period: p.coords.len() }),
        ExtPoint::Lazy(l) => {
            let Some(len) = l.core.chooser.cycle_len() else {
                return Ok(Classification::Unresolved { steps: max_depth });
            };
            let coords = x.coords(sys, max_depth)?;
            let offset = l.head.len();
            for p in 1..=max_depth / 2 {
                if p % len != 0 && !matches!(sys, DynamicalSystem::Permutation(_)) {
                    continue;
                }
                if !(0..max_depth - p).all(|t| coords[t] == coords[t + p]) {
                    continue;
                }
                // The core is chooser-driven from index `skip` on; a repeated
                // (coordinate, phase) state at core index i makes it periodic.
                let certified = (offset..max_depth - p).any(|t| {
                    let core_index = l.skip + t - offset;
                    core_index % len == (core_index + p) % len && coords[t] == coords[t + p]
                });
                if certified {
                    return Ok(Classification::Periodic { period: p });
                }
            }
            Ok(Classification::Unresolved { steps: max_depth })
        }
    }
}

/// Which topological property to transfer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    Transitive,
    DensePeriodic,
    Minimal,
    DenseRecurrent,
}

impl Property {
    pub const ALL: [Property; 4] = [Self::Transitive, Self::DensePeriodic, Self::Minimal, Self::DenseRecurrent];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Transitive => "transitive",
            Self::DensePeriodic => "densePeriodic",
            Self::Minimal => "minimal",
            Self::DenseRecurrent => "denseRecurrent",
        }
    }

    fn pick(&self, r: &SftReport) -> bool {
        match self {
            Self::Transitive => r.transitive,
            Self::DensePeriodic => r.dense_periodic,
            Self::Minimal => r.minimal,
            Self::DenseRecurrent => r.dense_recurrent,
        }
    }
}

/// The property on the one-sided shift and, computed separately, on the
/// two-sided shift with the same transition matrix.
pub fn verify_transfer(sys: &DynamicalSystem, property: Property) -> Result<(bool, bool)> {
    let DynamicalSystem::Sft(m) = sys else {
        return Err(Error::InvalidSystem("property transfer is checked on subshifts of finite type".into()));
    };
    let base = property.pick(&m.properties());
    let s = m.size();
    let a = m.rows();
    // reach[i][j]: a path of positive length from i to j.
    let mut reach: Vec<Vec<bool>> = a.to_vec();
    for k in 0..s {
        for i in 0..s {
            if reach[i][k] {
                for j in 0..s {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let edges_on_cycles = (0..s).all(|i| (0..s).all(|j| !a[i][j] || reach[j][i]));
    let extension = match property {
        Property::Transitive => reach.iter().all(|r| r.iter().all(|&b| b)),
        Property::DensePeriodic | Property::DenseRecurrent => edges_on_cycles,
        Property::Minimal => single_orbit_by_traces(a),
    };
    Ok((base, extension))
}

/// A two-sided SFT is minimal iff it is one periodic orbit, iff its graph
/// has no closed walk shorter than the alphabet size `s` and exactly `s`
/// closed walks of length `s`.
fn single_orbit_by_traces(a: &[Vec<bool>]) -> bool {
    let s = a.len();
    let adj: Vec<Vec<u128>> = a.iter().map(|r| r.iter().map(|&b| b as u128).collect()).collect();
    let mut power = adj.clone();
    for n in 1..=s {
        let trace: u128 = (0..s).map(|i| power[i][i]).fold(0, u128::saturating_add);
        let expected = if n == s { s as u128 } else { 0 };
        if trace != expected {
            return false;
        }
        if n < s {
            let mut next = vec![vec![0u128; s]; s];
            for i in 0..s {
                for k in 0..s {
                    if power[i][k] == 0 {
                        continue;
                    }
                    for j in 0..s {
                        if adj[k][j] != 0 {
                            next[i][j] = next[i][j].saturating_add(power[i][k]);
                        }
                    }
                }
            }
            power = next;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doubling() -> DynamicalSystem {
        DynamicalSystem::circle(2).unwrap()
    }

    fn q(p: i64, d: i64) -> Point {
        Point::rational(p, d).unwrap()
    }

    #[test]
    fn lift_examples() {
        let sys = doubling();
        let lift = lift_point(&sys, &q(1, 3), Chooser::ExplicitTail(vec![1, 0])).unwrap();
        let ExtPoint::Periodic(p) = &lift else { panic!("expected periodic lift") };
        assert_eq!(p.coords(), &[q(1, 3), q(2, 3)]);

        let lazy = lift_point(&sys, &q(1, 3), Chooser::AlwaysMin).unwrap();
        assert!(!lazy.is_periodic_lift());
        assert_eq!(lazy.coords(&sys, 3).unwrap(), vec![q(1, 3), q(1, 6), q(1, 12)]);

        let perm = DynamicalSystem::permutation(vec![1, 2, 0]).unwrap();
        let lift = lift_point(&perm, &Point::State(0), Chooser::AlwaysMin).unwrap();
        let ExtPoint::Periodic(p) = &lift else { panic!("expected periodic lift") };
        assert_eq!(p.coords(), &[Point::State(0), Point::State(2), Point::State(1)]);
    }

    #[test]
    fn extend_periodic_examples() {
        let sys = doubling();
        let ExtPoint::Periodic(p) = extend_periodic(&sys, &q(1, 3)).unwrap() else { panic!() };
        assert_eq!(p.coords(), &[q(1, 3), q(2, 3)]);
        let ExtPoint::Periodic(p) = extend_periodic(&sys, &q(1, 7)).unwrap() else { panic!() };
        assert_eq!(p.coords(), &[q(1, 7), q(4, 7), q(2, 7)]);
        assert!(matches!(extend_periodic(&sys, &q(1, 2)), Err(Error::NotPeriodic(_))));
    }

    #[test]
    fn tilde_maps() {
        let sys = doubling();
        let x = extend_periodic(&sys, &q(1, 3)).unwrap();
        let y = tilde_apply(&sys, &x).unwrap();
        let ExtPoint::Periodic(p) = &y else { panic!() };
        assert_eq!(p.coords(), &[q(2, 3), q(1, 3)]);
        assert_eq!(x.project(&sys).unwrap(), q(1, 3));

        let half = lift_point(&sys, &q(1, 2), Chooser::AlwaysMin).unwrap();
        assert_eq!(half.coords(&sys, 2).unwrap(), vec![q(1, 2), q(1, 4)]);
        let img = tilde_apply(&sys, &half).unwrap();
        assert_eq!(img.coords(&sys, 3).unwrap(), vec![q(0, 1), q(1, 2), q(1, 4)]);
        let back = tilde_inverse(&img);
        assert!(back.agrees_to(&sys, &half, 10).unwrap());
        let inv = tilde_inverse(&half);
        assert!(tilde_apply(&sys, &inv).unwrap().agrees_to(&sys, &half, 10).unwrap());
    }

    #[test]
    fn two_sided_values() {
        let sys = doubling();
        let x = lift_point(&sys, &q(1, 5), Chooser::AlwaysMin).unwrap();
        let vals = x.two_sided(&sys, -1, 2).unwrap();
        assert_eq!(vals, vec![q(4, 5), q(2, 5), q(1, 5), q(1, 10)]);
    }

    #[test]
    fn classify_ext_examples() {
        let sys = doubling();
        let x = extend_periodic(&sys, &q(1, 3)).unwrap();
        assert_eq!(classify_ext(&sys, &x, 8).unwrap(), Classification::Periodic { period: 2 });
        for chooser in [Chooser::AlwaysMin, Chooser::SeededRandom(4), Chooser::ExplicitTail(vec![1])] {
            let lift = lift_point(&sys, &q(1, 2), chooser).unwrap();
            assert!(!classify_ext(&sys, &lift, 128).unwrap().is_periodic());
        }
        let zero = lift_point(&sys, &q(0, 1), Chooser::AlwaysMin).unwrap();
        assert_eq!(classify_ext(&sys, &zero, 8).unwrap(), Classification::Periodic { period: 1 });
        // A lazy lift that reaches the cycle only after a tilde_apply step.
        let lazy = lift_point(&sys, &q(1, 3), Chooser::SeededRandom(1)).unwrap();
        assert_eq!(classify_ext(&sys, &lazy, 16).unwrap(), Classification::Unresolved { steps: 16 });
    }

    #[test]
    fn transfer_examples() {
        let golden = DynamicalSystem::sft(vec![vec![true, true], vec![true, false]]).unwrap();
        assert_eq!(verify_transfer(&golden, Property::Transitive).unwrap(), (true, true));
        let full = DynamicalSystem::sft(vec![vec![true, true], vec![true, true]]).unwrap();
        assert_eq!(verify_transfer(&full, Property::Minimal).unwrap(), (false, false));
        let cycle = DynamicalSystem::sft(vec![vec![false, true], vec![true, false]]).unwrap();
        assert_eq!(verify_transfer(&cycle, Property::Minimal).unwrap(), (true, true));
    }
}
