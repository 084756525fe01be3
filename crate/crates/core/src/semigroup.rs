//! Metric semigroups `(M, d, +)`: a commutative addition together with a
//! translation-invariant metric, `d(u + w, v + w) = d(u, v)`.
//!
//! Four concrete instances are provided:
//!
//! | instance          | addition             | distance                          |
//! |-------------------|----------------------|-----------------------------------|
//! | `nonneg-real`     | `a + b`              | `|a - b|`                         |
//! | `real-vector(k)`  | componentwise        | Euclidean norm of the difference  |
//! | `interval`        | Minkowski sum        | Hausdorff distance                |
//! | `box(k)`          | Minkowski sum        | max over coordinates of Hausdorff |
//!
//! Intervals under Minkowski addition have no inverses, so nothing in this
//! crate relies on subtraction of elements.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tolerance::scale;

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidElement(format!(
                "interval endpoints must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo > hi {
            return Err(Error::InvalidElement(format!(
                "interval [{lo}, {hi}] has lo > hi"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Minkowski sum `[a1 + a2, b1 + b2]`.
    pub fn minkowski_add(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo + other.lo,
            hi: self.hi + other.hi,
        }
    }

    /// Hausdorff distance `max(|a1 - a2|, |b1 - b2|)`.
    pub fn hausdorff(&self, other: &Interval) -> f64 {
        let dl = libm::fabs(self.lo - other.lo);
        let dh = libm::fabs(self.hi - other.hi);
        if dl >= dh {
            dl
        } else {
            dh
        }
    }
}

/// The concrete semigroup a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instance {
    NonNegReal,
    RealVector(usize),
    Interval,
    Boxed(usize),
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instance::NonNegReal => write!(f, "nonneg-real"),
            Instance::RealVector(k) => write!(f, "real-vector({k})"),
            Instance::Interval => write!(f, "interval"),
            Instance::Boxed(k) => write!(f, "box({k})"),
        }
    }
}

impl Instance {
    /// Validates the dimension parameter.
    pub fn checked(self) -> Result<Self> {
        match self {
            Instance::RealVector(0) | Instance::Boxed(0) => Err(Error::InvalidElement(
                "vector and box instances need dimension >= 1".to_string(),
            )),
            other => Ok(other),
        }
    }

    /// True when addition and distance are exact on the dyadic samples the
    /// law checker draws (interval and box instances).
    pub fn is_exact(&self) -> bool {
        matches!(self, Instance::Interval | Instance::Boxed(_))
    }

    /// Whether `e` is a well-formed member of this instance.
    pub fn check(&self, e: &Element) -> Result<()> {
        let found = e.instance();
        if found != *self {
            return Err(Error::InstanceMismatch {
                expected: self.to_string(),
                found: found.to_string(),
            });
        }
        match e {
            Element::Scalar(v) if !(v.is_finite() && *v >= 0.0) => Err(Error::InvalidElement(
                format!("nonneg-real value must be finite and >= 0, got {v}"),
            )),
            Element::Vector(xs) if xs.iter().any(|x| !x.is_finite()) => Err(Error::InvalidElement(
                "vector components must be finite".to_string(),
            )),
            Element::Interval(iv) => Interval::new(iv.lo, iv.hi).map(|_| ()),
            Element::Boxed(ivs) => ivs
                .iter()
                .try_for_each(|iv| Interval::new(iv.lo, iv.hi).map(|_| ())),
            _ => Ok(()),
        }
    }

    /// Draws one element. Interval and box payloads are multiples of 1/256
    /// bounded by 16 in magnitude, so sums and differences of a few of them
    /// are exact in `f64`.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Element {
        fn dyadic<R: Rng>(rng: &mut R) -> f64 {
            rng.random_range(-4096i32..=4096) as f64 / 256.0
        }
        fn dyadic_interval<R: Rng>(rng: &mut R) -> Interval {
            let lo = dyadic(rng);
            let width = rng.random_range(0i32..=4096) as f64 / 256.0;
            Interval { lo, hi: lo + width }
        }
        match *self {
            Instance::NonNegReal => Element::Scalar(rng.random_range(0.0..100.0)),
            Instance::RealVector(k) => {
                Element::Vector((0..k).map(|_| rng.random_range(-10.0..10.0)).collect())
            }
            Instance::Interval => Element::Interval(dyadic_interval(rng)),
            Instance::Boxed(k) => Element::Boxed((0..k).map(|_| dyadic_interval(rng)).collect()),
        }
    }
}

/// A value of one of the shipped semigroup instances.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Scalar(f64),
    Vector(Vec<f64>),
    Interval(Interval),
    Boxed(Vec<Interval>),
}

impl Element {
    pub fn scalar(v: f64) -> Result<Self> {
        let e = Element::Scalar(v);
        Instance::NonNegReal.check(&e)?;
        Ok(e)
    }

    pub fn vector(xs: Vec<f64>) -> Result<Self> {
        let e = Element::Vector(xs);
        e.instance().checked()?.check(&e)?;
        Ok(e)
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Interval::new(lo, hi).map(Element::Interval)
    }

    pub fn boxed(ivs: Vec<Interval>) -> Result<Self> {
        let e = Element::Boxed(ivs);
        e.instance().checked()?;
        Ok(e)
    }

    pub fn instance(&self) -> Instance {
        match self {
            Element::Scalar(_) => Instance::NonNegReal,
            Element::Vector(xs) => Instance::RealVector(xs.len()),
            Element::Interval(_) => Instance::Interval,
            Element::Boxed(ivs) => Instance::Boxed(ivs.len()),
        }
    }

    fn mismatch(&self, other: &Element) -> Error {
        Error::InstanceMismatch {
            expected: self.instance().to_string(),
            found: other.instance().to_string(),
        }
    }

    /// Semigroup addition.
    pub fn add(&self, other: &Element) -> Result<Element> {
        match (self, other) {
            (Element::Scalar(a), Element::Scalar(b)) => Ok(Element::Scalar(a + b)),
            (Element::Vector(a), Element::Vector(b)) if a.len() == b.len() => Ok(Element::Vector(
                a.iter().zip(b).map(|(x, y)| x + y).collect(),
            )),
            (Element::Interval(a), Element::Interval(b)) => {
                Ok(Element::Interval(a.minkowski_add(b)))
            }
            (Element::Boxed(a), Element::Boxed(b)) if a.len() == b.len() => Ok(Element::Boxed(
                a.iter().zip(b).map(|(x, y)| x.minkowski_add(y)).collect(),
            )),
            _ => Err(self.mismatch(other)),
        }
    }

    /// Translation-invariant distance.
    pub fn dist(&self, other: &Element) -> Result<f64> {
        match (self, other) {
            (Element::Scalar(a), Element::Scalar(b)) => Ok(libm::fabs(a - b)),
            (Element::Vector(a), Element::Vector(b)) if a.len() == b.len() => {
                if a.len() == 1 {
                    return Ok(libm::fabs(a[0] - b[0]));
                }
                let sq: f64 = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| {
                        let d = x - y;
                        d * d
                    })
                    .sum();
                Ok(libm::sqrt(sq))
            }
            (Element::Interval(a), Element::Interval(b)) => Ok(a.hausdorff(b)),
            (Element::Boxed(a), Element::Boxed(b)) if a.len() == b.len() => Ok(a
                .iter()
                .zip(b)
                .map(|(x, y)| x.hausdorff(y))
                .fold(0.0, f64::max)),
            _ => Err(self.mismatch(other)),
        }
    }

    /// Largest absolute payload coordinate, used to scale tolerances.
    pub fn magnitude(&self) -> f64 {
        match self {
            Element::Scalar(v) => libm::fabs(*v),
            Element::Vector(xs) => xs.iter().map(|x| libm::fabs(*x)).fold(0.0, f64::max),
            Element::Interval(iv) => libm::fabs(iv.lo).max(libm::fabs(iv.hi)),
            Element::Boxed(ivs) => ivs
                .iter()
                .map(|iv| libm::fabs(iv.lo).max(libm::fabs(iv.hi)))
                .fold(0.0, f64::max),
        }
    }
}

/// Free-function form of [`Element::add`].
pub fn add(a: &Element, b: &Element) -> Result<Element> {
    a.add(b)
}

/// Free-function form of [`Element::dist`].
pub fn dist(a: &Element, b: &Element) -> Result<f64> {
    a.dist(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    Associativity,
    Commutativity,
    NonNegativity,
    Identity,
    Symmetry,
    Triangle,
    TranslationInvariance,
    /// `d(u,v) <= d(u+ū, v+v̄) + d(ū,v̄)`
    CancellationBound,
    /// `d(u+ū, v+v̄) <= d(u,v) + d(ū,v̄)`
    SumBound,
}

impl Law {
    pub const ALL: [Law; 9] = [
        Law::Associativity,
        Law::Commutativity,
        Law::NonNegativity,
        Law::Identity,
        Law::Symmetry,
        Law::Triangle,
        Law::TranslationInvariance,
        Law::CancellationBound,
        Law::SumBound,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Law::Associativity => "associativity",
            Law::Commutativity => "commutativity",
            Law::NonNegativity => "non-negativity",
            Law::Identity => "identity-of-indiscernibles",
            Law::Symmetry => "symmetry",
            Law::Triangle => "triangle",
            Law::TranslationInvariance => "translation-invariance",
            Law::CancellationBound => "cancellation-bound",
            Law::SumBound => "sum-bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawResult {
    pub law: Law,
    /// Worst violation seen, relative to `max(1, magnitude)`.
    pub worst_violation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawReport {
    pub instance: Instance,
    pub samples: usize,
    pub seed: u64,
    /// Tolerance applied to every law (0 for exact instances).
    pub tolerance: f64,
    pub laws: Vec<LawResult>,
}

impl LawReport {
    pub fn all_passed(&self) -> bool {
        self.laws.iter().all(|l| l.passed)
    }

    pub fn worst(&self) -> f64 {
        self.laws
            .iter()
            .map(|l| l.worst_violation)
            .fold(0.0, f64::max)
    }
}

/// Relative tolerance used for float-backed instances.
pub const FLOAT_LAW_TOL: f64 = 1e-12;

/// Checks every semigroup and metric law on `samples` seeded draws.
pub fn verify_semigroup_laws(instance: Instance, samples: usize, seed: u64) -> Result<LawReport> {
    let instance = instance.checked()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = if instance.is_exact() {
        0.0
    } else {
        FLOAT_LAW_TOL
    };
    let mut worst = [0.0f64; 9];
    let mut record = |law: Law, violation: f64, mag: f64| {
        let idx = Law::ALL.iter().position(|l| *l == law).unwrap_or(0);
        let rel = if violation > 0.0 {
            violation / scale(mag)
        } else {
            0.0
        };
        if rel > worst[idx] || rel.is_nan() {
            worst[idx] = if rel.is_nan() { f64::INFINITY } else { rel };
        }
    };

    for _ in 0..samples.max(1) {
        let u = instance.sample(&mut rng);
        let v = instance.sample(&mut rng);
        let ub = instance.sample(&mut rng);
        let vb = instance.sample(&mut rng);
        let w = instance.sample(&mut rng);

        let mag = [&u, &v, &ub, &vb, &w]
            .iter()
            .map(|e| e.magnitude())
            .fold(0.0, f64::max)
            * 4.0;

        let lhs = u.add(&v)?.add(&w)?;
        let rhs = u.add(&v.add(&w)?)?;
        record(Law::Associativity, lhs.dist(&rhs)?, mag);
        record(Law::Commutativity, u.add(&v)?.dist(&v.add(&u)?)?, mag);

        let duv = u.dist(&v)?;
        record(Law::NonNegativity, -duv, mag);
        let self_dist = u.dist(&u)?;
        let distinct_zero = if u != v && duv == 0.0 { 1.0 } else { 0.0 };
        record(Law::Identity, self_dist.max(distinct_zero), mag);
        record(Law::Symmetry, libm::fabs(duv - v.dist(&u)?), mag);
        record(Law::Triangle, duv - (u.dist(&w)? + w.dist(&v)?), mag);

        let shifted = u.add(&w)?.dist(&v.add(&w)?)?;
        record(Law::TranslationInvariance, libm::fabs(shifted - duv), mag);

        let dsum = u.add(&ub)?.dist(&v.add(&vb)?)?;
        let dbar = ub.dist(&vb)?;
        record(Law::CancellationBound, duv - (dsum + dbar), mag);
        record(Law::SumBound, dsum - (duv + dbar), mag);
    }

    let laws = Law::ALL
        .iter()
        .zip(worst)
        .map(|(&law, w)| LawResult {
            law,
            worst_violation: w,
            passed: w <= tol,
        })
        .collect();
    Ok(LawReport {
        instance,
        samples: samples.max(1),
        seed,
        tolerance: tol,
        laws,
    })
}
