//! Seeded random systems, functions and elements for test corpora.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::Rng;

use crate::dynsys::{DynamicalSystem, Point, TransitionMatrix};
use crate::element::Element;
use crate::error::Result;
use crate::extension::{extend_periodic, lift_point, Chooser, ExtPoint};
use crate::funcalg::{BaseFunction, ExtFunction, TrigPoly};
use crate::repr::RepSpec;

fn coefficient<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// A random transition matrix of the given size with no zero row or column.
pub fn random_matrix<R: Rng>(rng: &mut R, size: usize) -> TransitionMatrix {
    loop {
        let rows: Vec<Vec<bool>> = (0..size).map(|_| (0..size).map(|_| rng.random_bool(0.6)).collect()).collect();
        if let Ok(m) = TransitionMatrix::new(rows) {
            return m;
        }
    }
}

/// Circle maps `×2`, `×3`, SFTs on 2–3 symbols or permutations on 3–6 states.
pub fn random_system<R: Rng>(rng: &mut R) -> DynamicalSystem {
    match rng.random_range(0..3) {
        0 => DynamicalSystem::CircleTimesK { k: rng.random_range(2..=3) },
        1 => {
            let size = rng.random_range(2..=3);
            DynamicalSystem::Sft(random_matrix(rng, size))
        }
        _ => {
            let n = rng.random_range(3..=6);
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            DynamicalSystem::Permutation(perm)
        }
    }
}

/// A random function from the system's dense subalgebra.
pub fn random_base<R: Rng>(sys: &DynamicalSystem, rng: &mut R) -> BaseFunction {
    match sys {
        DynamicalSystem::CircleTimesK { .. } => {
            let terms = rng.random_range(1..=3);
            let pairs: Vec<(i64, Complex64)> =
                (0..terms).map(|_| (rng.random_range(-3..=3), coefficient(rng))).collect();
            let p = TrigPoly::from_pairs(&pairs);
            if p.is_zero() {
                BaseFunction::constant(1.0)
            } else {
                BaseFunction::Trig(p)
            }
        }
        DynamicalSystem::Sft(m) => {
            let depth = rng.random_range(1..=3);
            let mut given = BTreeMap::new();
            for w in m.words(depth) {
                given.insert(w, coefficient(rng));
            }
            let mut f = BaseFunction::zero();
            for (w, v) in given {
                let term = BaseFunction::cylinder_indicator(m, &w).scale(v);
                f = f.add(&term).expect("same system");
            }
            f
        }
        DynamicalSystem::Permutation(perm) => BaseFunction::Tabular((0..perm.len()).map(|_| coefficient(rng)).collect()),
    }
}

/// A random semicrossed element `Σ_{n=0}^{max_power} Uⁿ fₙ` with 1–3 terms.
pub fn random_semicrossed<R: Rng>(sys: &DynamicalSystem, rng: &mut R, max_power: i64) -> Element {
    let terms = rng.random_range(1..=3);
    let mut coeffs = BTreeMap::new();
    for _ in 0..terms {
        coeffs.insert(rng.random_range(0..=max_power), ExtFunction::iota(random_base(sys, rng)));
    }
    Element::from_coeffs(coeffs)
}

/// A random crossed-product element with powers in `powers` and coefficient
/// depths in `1..=max_depth`.
pub fn random_crossed<R: Rng>(
    sys: &DynamicalSystem,
    rng: &mut R,
    powers: RangeInclusive<i64>,
    max_depth: usize,
) -> Element {
    let terms = rng.random_range(1..=3);
    let mut coeffs = BTreeMap::new();
    for _ in 0..terms {
        let depth = rng.random_range(1..=max_depth);
        let f = ExtFunction::new(depth, random_base(sys, rng)).expect("depth is positive");
        coeffs.insert(rng.random_range(powers.clone()), f);
    }
    Element::from_coeffs(coeffs)
}

/// A random point: a periodic point, a seeded procedural point or, for
/// permutations, a random state.
pub fn random_point<R: Rng>(sys: &DynamicalSystem, rng: &mut R) -> Result<Point> {
    match sys {
        DynamicalSystem::Permutation(perm) => Ok(Point::State(rng.random_range(0..perm.len()))),
        _ => {
            if rng.random_bool(0.3) {
                let periodic = sys.periodic_points(3);
                Ok(periodic[rng.random_range(0..periodic.len())].clone())
            } else {
                sys.procedural_point(rng.random())
            }
        }
    }
}

/// A random point of the extension.
pub fn random_ext_point<R: Rng>(sys: &DynamicalSystem, rng: &mut R) -> Result<ExtPoint> {
    let x = random_point(sys, rng)?;
    if sys.period_of(&x)?.is_some() && rng.random_bool(0.5) {
        return extend_periodic(sys, &x);
    }
    lift_point(sys, &x, Chooser::SeededRandom(rng.random()))
}

/// A random representation spec of modest dimension.
pub fn random_rep_spec<R: Rng>(sys: &DynamicalSystem, rng: &mut R) -> Result<RepSpec> {
    Ok(match rng.random_range(0..4) {
        0 => RepSpec::OrbitTrunc { x: random_point(sys, rng)?, n: rng.random_range(4..=16) },
        1 => {
            let periodic = sys.periodic_points(3);
            let y = periodic[rng.random_range(0..periodic.len())].clone();
            RepSpec::Periodic { y, lambda: Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)) }
        }
        2 => RepSpec::BilateralWindow { x: random_ext_point(sys, rng)?, m: rng.random_range(3..=8) },
        _ => RepSpec::BackwardOrbit { orbit: random_ext_point(sys, rng)?, n: rng.random_range(4..=16) },
    })
}
