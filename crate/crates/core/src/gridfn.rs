//! Bivariate functions `f: I×I → M` sampled on a finite product grid.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::semigroup::{Element, Instance, Interval};

/// Strictly increasing points of `[0, 1]` that start at 0 and end at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    points: Vec<f64>,
}

impl Grid1D {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::GridTooShort(points.len()));
        }
        for (i, p) in points.iter().enumerate() {
            if !p.is_finite() || *p < 0.0 || *p > 1.0 {
                return Err(Error::GridPointOutOfRange(i));
            }
        }
        for i in 1..points.len() {
            if points[i] <= points[i - 1] {
                return Err(Error::NonMonotoneGrid(i));
            }
        }
        let (first, last) = (points[0], points[points.len() - 1]);
        if first != 0.0 || last != 1.0 {
            return Err(Error::GridEndpoint { first, last });
        }
        Ok(Grid1D { points })
    }

    /// `n` equally spaced points `k / (n - 1)`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::GridTooShort(n));
        }
        let last = (n - 1) as f64;
        Grid1D::new((0..n).map(|k| k as f64 / last).collect())
    }

    /// A grid of `n` points whose interior points are drawn uniformly.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(Error::GridTooShort(n));
        }
        loop {
            let mut pts: Vec<f64> = (0..n - 2).map(|_| rng.random_range(0.02..0.98)).collect();
            pts.sort_by(f64::total_cmp);
            pts.insert(0, 0.0);
            pts.push(1.0);
            if let Ok(g) = Grid1D::new(pts) {
                return Ok(g);
            }
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last_index(&self) -> usize {
        self.points.len() - 1
    }
}

/// Values `f(t_i, s_j)` on `grid_t × grid_s`, stored with `i` outer.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction2D {
    grid_t: Grid1D,
    grid_s: Grid1D,
    instance: Instance,
    values: Vec<Element>,
}

impl GridFunction2D {
    /// Builds a function from rows indexed by `grid_t`, each holding one
    /// value per point of `grid_s`.
    pub fn new(
        grid_t: Grid1D,
        grid_s: Grid1D,
        instance: Instance,
        rows: Vec<Vec<Element>>,
    ) -> Result<Self> {
        let instance = instance.checked()?;
        let (n, m) = (grid_t.len(), grid_s.len());
        let bad_shape = rows.len() != n || rows.iter().any(|r| r.len() != m);
        if bad_shape {
            return Err(Error::DimensionMismatch {
                rows: n,
                cols: m,
                found_rows: rows.len(),
                found_cols: rows.iter().map(|r| r.len()).find(|&l| l != m).unwrap_or(m),
            });
        }
        let values: Vec<Element> = rows.into_iter().flatten().collect();
        for v in &values {
            instance.check(v)?;
        }
        Ok(GridFunction2D {
            grid_t,
            grid_s,
            instance,
            values,
        })
    }

    /// Evaluates `f(t, s)` at every grid point.
    pub fn from_fn(
        grid_t: Grid1D,
        grid_s: Grid1D,
        instance: Instance,
        mut f: impl FnMut(f64, f64) -> Result<Element>,
    ) -> Result<Self> {
        let mut rows = Vec::with_capacity(grid_t.len());
        for &t in grid_t.points() {
            let row = grid_s
                .points()
                .iter()
                .map(|&s| f(t, s))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        GridFunction2D::new(grid_t, grid_s, instance, rows)
    }

    /// Convenience constructor for `nonneg-real` functions.
    pub fn from_scalars(grid_t: Grid1D, grid_s: Grid1D, rows: Vec<Vec<f64>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(Element::scalar)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        GridFunction2D::new(grid_t, grid_s, Instance::NonNegReal, rows)
    }

    pub fn grid_t(&self) -> &Grid1D {
        &self.grid_t
    }

    pub fn grid_s(&self) -> &Grid1D {
        &self.grid_s
    }

    pub fn instance(&self) -> Instance {
        self.instance
    }

    pub fn rows(&self) -> usize {
        self.grid_t.len()
    }

    pub fn cols(&self) -> usize {
        self.grid_s.len()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Element {
        &self.values[i * self.grid_s.len() + j]
    }

    /// Row-major iterator over all values.
    pub fn values(&self) -> &[Element] {
        &self.values
    }

    /// Same grids and same semigroup instance.
    pub fn same_domain(&self, other: &GridFunction2D) -> bool {
        self.instance == other.instance
            && self.grid_t == other.grid_t
            && self.grid_s == other.grid_s
    }

    pub(crate) fn check_same_domain(&self, other: &GridFunction2D) -> Result<()> {
        if self.same_domain(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Indices into a grid: strictly increasing, containing the first and the
/// last index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    indices: Vec<usize>,
    grid_len: usize,
}

impl Partition {
    pub fn new(indices: Vec<usize>, grid_len: usize) -> Result<Self> {
        if grid_len < 2 {
            return Err(Error::GridTooShort(grid_len));
        }
        if indices.first() != Some(&0) || indices.last() != Some(&(grid_len - 1)) {
            return Err(Error::InvalidPartition(format!(
                "partition must contain indices 0 and {}",
                grid_len - 1
            )));
        }
        if indices.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPartition(
                "indices must be strictly increasing".to_string(),
            ));
        }
        Ok(Partition { indices, grid_len })
    }

    /// Every grid index.
    pub fn full(grid_len: usize) -> Self {
        Partition {
            indices: (0..grid_len).collect(),
            grid_len,
        }
    }

    /// Only the two endpoints.
    pub fn coarse(grid_len: usize) -> Self {
        Partition {
            indices: alloc::vec![0, grid_len - 1],
            grid_len,
        }
    }

    /// Bit `k` of `interior` selects interior index `k + 1`.
    pub(crate) fn from_interior_mask(interior: u64, grid_len: usize) -> Self {
        let mut indices = Vec::with_capacity(grid_len);
        indices.push(0);
        for k in 0..grid_len.saturating_sub(2) {
            if interior >> k & 1 == 1 {
                indices.push(k + 1);
            }
        }
        indices.push(grid_len - 1);
        Partition { indices, grid_len }
    }

    pub(crate) fn from_flags(flags: &[bool]) -> Self {
        let grid_len = flags.len() + 2;
        let mut indices = Vec::with_capacity(grid_len);
        indices.push(0);
        indices.extend(
            flags
                .iter()
                .enumerate()
                .filter(|(_, &f)| f)
                .map(|(k, _)| k + 1),
        );
        indices.push(grid_len - 1);
        Partition { indices, grid_len }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn grid_len(&self) -> usize {
        self.grid_len
    }

    /// Number of intervals.
    pub fn intervals(&self) -> usize {
        self.indices.len() - 1
    }

    pub fn is_full(&self) -> bool {
        self.indices.len() == self.grid_len
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.indices.binary_search(&idx).is_ok()
    }
}

/// A pair `(Π, Π*)` of partitions of the `t` and `s` grids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionPair {
    pub pi: Partition,
    pub pi_star: Partition,
}

impl PartitionPair {
    pub fn new(pi: Partition, pi_star: Partition) -> Self {
        PartitionPair { pi, pi_star }
    }

    pub fn full(f: &GridFunction2D) -> Self {
        PartitionPair {
            pi: Partition::full(f.rows()),
            pi_star: Partition::full(f.cols()),
        }
    }

    pub fn coarse(f: &GridFunction2D) -> Self {
        PartitionPair {
            pi: Partition::coarse(f.rows()),
            pi_star: Partition::coarse(f.cols()),
        }
    }

    pub fn check_fits(&self, f: &GridFunction2D) -> Result<()> {
        if self.pi.grid_len != f.rows() || self.pi_star.grid_len != f.cols() {
            return Err(Error::InvalidPartition(format!(
                "partition pair is for a {}x{} grid, function grid is {}x{}",
                self.pi.grid_len,
                self.pi_star.grid_len,
                f.rows(),
                f.cols()
            )));
        }
        Ok(())
    }
}

/// Recipes for [`synth_function`].
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// Every value equals the given element.
    Constant(Element),
    /// `f(t, s) = a·t + b·s`. For interval and box instances every
    /// coordinate is the Minkowski sum `[a·t, (a+1)·t] + [b·s, (b+1)·s]`.
    SeparableAdditive { a: f64, b: f64 },
    /// `f(t, s) = t·s` (nonneg-real and real-vector only).
    Product,
    /// A seeded discrete Brownian-sheet walk with the given step.
    RandomWalk { step: f64 },
}

impl Generator {
    fn name(&self) -> &'static str {
        match self {
            Generator::Constant(_) => "constant",
            Generator::SeparableAdditive { .. } => "separable-additive",
            Generator::Product => "product",
            Generator::RandomWalk { .. } => "random-walk",
        }
    }
}

fn incompatible(generator: &Generator, instance: Instance) -> Error {
    Error::IncompatibleGenerator {
        generator: generator.name().to_string(),
        instance: instance.to_string(),
    }
}

/// Builds a grid function from a generator. Output depends only on the
/// arguments.
pub fn synth_function(
    generator: &Generator,
    grid_t: &Grid1D,
    grid_s: &Grid1D,
    instance: Instance,
    seed: u64,
) -> Result<GridFunction2D> {
    let instance = instance.checked()?;
    let (gt, gs) = (grid_t.clone(), grid_s.clone());
    match generator {
        Generator::Constant(c) => {
            instance
                .check(c)
                .map_err(|_| incompatible(generator, instance))?;
            GridFunction2D::from_fn(gt, gs, instance, |_, _| Ok(c.clone()))
        }
        &Generator::SeparableAdditive { a, b } => {
            if !a.is_finite() || !b.is_finite() {
                return Err(incompatible(generator, instance));
            }
            if instance == Instance::NonNegReal && (a < 0.0 || b < 0.0) {
                return Err(incompatible(generator, instance));
            }
            let iv = |t: f64, s: f64| -> Result<Interval> {
                Interval::new(a * t + b * s, (a + 1.0) * t + (b + 1.0) * s)
            };
            GridFunction2D::from_fn(gt, gs, instance, |t, s| match instance {
                Instance::NonNegReal => Element::scalar(a * t + b * s),
                Instance::RealVector(k) => Element::vector(alloc::vec![a * t + b * s; k]),
                Instance::Interval => iv(t, s).map(Element::Interval),
                Instance::Boxed(k) => Element::boxed(alloc::vec![iv(t, s)?; k]),
            })
        }
        Generator::Product => match instance {
            Instance::NonNegReal => {
                GridFunction2D::from_fn(gt, gs, instance, |t, s| Element::scalar(t * s))
            }
            Instance::RealVector(k) => GridFunction2D::from_fn(gt, gs, instance, |t, s| {
                Element::vector(alloc::vec![t * s; k])
            }),
            _ => Err(incompatible(generator, instance)),
        },
        &Generator::RandomWalk { step } => {
            if !(step.is_finite() && step > 0.0) {
                return Err(incompatible(generator, instance));
            }
            random_walk(gt, gs, instance, step, seed)
        }
    }
}

fn random_walk(
    grid_t: Grid1D,
    grid_s: Grid1D,
    instance: Instance,
    step: f64,
    seed: u64,
) -> Result<GridFunction2D> {
    let (n, m) = (grid_t.len(), grid_s.len());
    let channels = match instance {
        Instance::NonNegReal | Instance::Interval => {
            1 + usize::from(instance == Instance::Interval)
        }
        Instance::RealVector(k) => k,
        Instance::Boxed(k) => 2 * k,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut walks: Vec<Vec<f64>> = Vec::with_capacity(channels);
    for _ in 0..channels {
        let mut w = alloc::vec![0.0f64; n * m];
        for i in 0..n {
            for j in 0..m {
                let xi = step * rng.random_range(-1.0..1.0);
                w[i * m + j] = match (i, j) {
                    (0, 0) => xi,
                    (0, _) => w[j - 1] + xi,
                    (_, 0) => w[(i - 1) * m] + xi,
                    _ => w[(i - 1) * m + j] + w[i * m + j - 1] - w[(i - 1) * m + j - 1] + xi,
                };
            }
        }
        walks.push(w);
    }
    let interval_at = |c: usize, idx: usize| -> Result<Interval> {
        let lo = walks[c][idx];
        Interval::new(lo, lo + libm::fabs(walks[c + 1][idx]))
    };
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(m);
        for j in 0..m {
            let idx = i * m + j;
            row.push(match instance {
                Instance::NonNegReal => Element::scalar(libm::fabs(walks[0][idx]))?,
                Instance::RealVector(k) => {
                    Element::vector((0..k).map(|c| walks[c][idx]).collect())?
                }
                Instance::Interval => Element::Interval(interval_at(0, idx)?),
                Instance::Boxed(k) => Element::boxed(
                    (0..k)
                        .map(|c| interval_at(2 * c, idx))
                        .collect::<Result<Vec<_>>>()?,
                )?,
            });
        }
        rows.push(row);
    }
    GridFunction2D::new(grid_t, grid_s, instance, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(vec![0.0, 1.0]).is_ok());
        assert_eq!(
            Grid1D::new(vec![0.0, 0.5, 0.5, 1.0]),
            Err(Error::NonMonotoneGrid(2))
        );
        assert!(matches!(
            Grid1D::new(vec![0.1, 1.0]),
            Err(Error::GridEndpoint { .. })
        ));
        assert_eq!(Grid1D::new(vec![0.0]), Err(Error::GridTooShort(1)));
        assert!(Grid1D::new(vec![0.0, 1.5, 1.0]).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let g = Grid1D::uniform(3).unwrap();
        let err = GridFunction2D::from_scalars(
            g.clone(),
            g,
            vec![vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]],
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                rows: 3,
                cols: 3,
                ..
            }
        ));
    }

    #[test]
    fn constant_generator() {
        let g = Grid1D::uniform(4).unwrap();
        let c = Element::interval(1.0, 2.0).unwrap();
        let f = synth_function(
            &Generator::Constant(c.clone()),
            &g,
            &g,
            Instance::Interval,
            0,
        )
        .unwrap();
        assert!(f.values().iter().all(|v| *v == c));
        assert!(synth_function(&Generator::Constant(c), &g, &g, Instance::NonNegReal, 0).is_err());
    }

    #[test]
    fn product_generator_on_unit_square() {
        let g = Grid1D::uniform(2).unwrap();
        let f = synth_function(&Generator::Product, &g, &g, Instance::NonNegReal, 0).unwrap();
        let vals: Vec<f64> = f
            .values()
            .iter()
            .map(|e| match e {
                Element::Scalar(v) => *v,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(vals, vec![0.0, 0.0, 0.0, 1.0]);
        assert!(synth_function(&Generator::Product, &g, &g, Instance::Interval, 0).is_err());
    }

    #[test]
    fn random_walk_is_deterministic() {
        let g = Grid1D::uniform(5).unwrap();
        for inst in [
            Instance::NonNegReal,
            Instance::RealVector(2),
            Instance::Interval,
            Instance::Boxed(2),
        ] {
            let gen = Generator::RandomWalk { step: 0.1 };
            let a = synth_function(&gen, &g, &g, inst, 42).unwrap();
            let b = synth_function(&gen, &g, &g, inst, 42).unwrap();
            let c = synth_function(&gen, &g, &g, inst, 43).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, c);
        }
    }

    #[test]
    fn partitions() {
        assert!(Partition::new(vec![0, 2], 3).is_ok());
        assert!(Partition::new(vec![1, 2], 3).is_err());
        assert!(Partition::new(vec![0, 1], 3).is_err());
        assert!(Partition::new(vec![0, 1, 1, 2], 3).is_err());
        assert_eq!(Partition::from_interior_mask(0b10, 4).indices(), &[0, 2, 3]);
        assert_eq!(Partition::from_flags(&[true, false]).indices(), &[0, 1, 3]);
    }
}
