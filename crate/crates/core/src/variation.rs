//! Variation sums on a fixed partition pair, joint variation of two
//! functions, and the metric `ρ`.
//!
//! For a partition pair `(Π, Π*)` with points `t_0 < … < t_n` and
//! `s_0 < … < s_m`, every family sums per-interval terms of three kinds:
//!
//! * row terms built from `d(f(t_i,0), f(t_{i-1},0))`,
//! * column terms built from `d(f(0,s_j), f(0,s_{j-1}))`,
//! * mixed cell terms built from
//!   `d(f(t_i,s_j) + f(t_{i-1},s_{j-1}), f(t_i,s_{j-1}) + f(t_{i-1},s_j))`,
//!
//! and each of the three sums is passed through the family's outer map. The
//! joint variation of `(f, g)` replaces every distance by its cross-sum
//! form, e.g. `d(f(t_i,0) + g(t_{i-1},0), f(t_{i-1},0) + g(t_i,0))`.
//!
//! Summation order is fixed: row and column sums ascend; the mixed sum runs
//! `j` outer, `i` inner, both ascending.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::gridfn::{GridFunction2D, PartitionPair};
use crate::search::{solve_sup, Method};
use crate::semigroup::Element;

/// Waterman weight sequences `λ_{i,j}` (positive, non-increasing in each
/// index, vanishing, with divergent double sum).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WatermanWeights {
    /// `λ_{i,j} = 1 / (i·j)`.
    Harmonic,
}

impl WatermanWeights {
    /// Weight for 1-based positions `i`, `j`.
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        match self {
            WatermanWeights::Harmonic => 1.0 / ((i as f64) * (j as f64)),
        }
    }

    /// Checks positivity and monotonicity on `1..=n × 1..=m`.
    pub fn check_range(&self, n: usize, m: usize) -> Result<()> {
        for i in 1..=n.max(1) {
            for j in 1..=m.max(1) {
                let w = self.weight(i, j);
                if !(w > 0.0 && w.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "λ({i},{j}) = {w} is not positive"
                    )));
                }
                if self.weight(i + 1, j) > w || self.weight(i, j + 1) > w {
                    return Err(Error::InvalidConfig(format!(
                        "λ is increasing somewhere after ({i},{j})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Distortion functions `κ: [0,1] → [0,1]` for the Korenblum family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distortion {
    /// `κ(t) = t^α` with `0 < α < 1`.
    Power { alpha: f64 },
}

impl Distortion {
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Distortion::Power { alpha } => libm::pow(t, alpha),
        }
    }

    /// Samples the defining properties: `κ(0) = 0`, `κ(1) = 1`, increasing
    /// and concave on a uniform mesh, and `κ(t)/t` growing along `t = 10^-k`.
    pub fn validate(&self) -> Result<()> {
        let Distortion::Power { alpha } = *self;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "power distortion needs 0 < alpha < 1, got {alpha}"
            )));
        }
        if self.eval(0.0) != 0.0 || self.eval(1.0) != 1.0 {
            return Err(Error::InvalidConfig(
                "κ(0) must be 0 and κ(1) must be 1".into(),
            ));
        }
        const MESH: usize = 64;
        let k: Vec<f64> = (0..=MESH)
            .map(|i| self.eval(i as f64 / MESH as f64))
            .collect();
        for i in 1..=MESH {
            if k[i] <= k[i - 1] {
                return Err(Error::InvalidConfig("κ is not increasing".into()));
            }
            if i < MESH && 2.0 * k[i] < k[i - 1] + k[i + 1] {
                return Err(Error::InvalidConfig("κ is not concave".into()));
            }
        }
        let mut prev = 1.0;
        for e in 1..=12 {
            let t = libm::pow(10.0, -(e as f64));
            let ratio = self.eval(t) / t;
            if ratio <= prev {
                return Err(Error::InvalidConfig("κ(t)/t does not grow as t → 0".into()));
            }
            prev = ratio;
        }
        Ok(())
    }
}

/// A variation family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Wiener p-variation, `p > 0`; `p = 1` is the Jordan variation.
    Wiener { p: f64 },
    /// Riesz p-variation, `p > 1`.
    Riesz { p: f64 },
    /// Waterman Λ-variation.
    Waterman { lambda: WatermanWeights },
    /// Korenblum κ-variation with outer root `1/p`, `p > 1`. The inner
    /// terms are `d / κ(Δ)`; `dp_variant` switches them to `d^p / κ(Δ)`.
    Korenblum {
        kappa: Distortion,
        p: f64,
        dp_variant: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Axis {
    Row,
    Col,
}

/// A validated [`Family`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyConfig {
    family: Family,
}

#[inline]
fn pow_p(d: f64, p: f64) -> f64 {
    if p == 1.0 {
        d
    } else {
        libm::pow(d, p)
    }
}

impl FamilyConfig {
    pub fn new(family: Family) -> Result<Self> {
        let finite_above = |p: f64, min: f64, name: &str| -> Result<()> {
            if p.is_finite() && p > min {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!(
                    "{name} requires p > {min}, got {p}"
                )))
            }
        };
        match family {
            Family::Wiener { p } => finite_above(p, 0.0, "wiener")?,
            Family::Riesz { p } => finite_above(p, 1.0, "riesz")?,
            Family::Waterman { .. } => {}
            Family::Korenblum { kappa, p, .. } => {
                finite_above(p, 1.0, "korenblum")?;
                kappa.validate()?;
            }
        }
        Ok(FamilyConfig { family })
    }

    pub fn wiener(p: f64) -> Result<Self> {
        FamilyConfig::new(Family::Wiener { p })
    }

    pub fn riesz(p: f64) -> Result<Self> {
        FamilyConfig::new(Family::Riesz { p })
    }

    pub fn waterman_harmonic() -> Self {
        FamilyConfig {
            family: Family::Waterman {
                lambda: WatermanWeights::Harmonic,
            },
        }
    }

    pub fn korenblum_power(alpha: f64, p: f64) -> Result<Self> {
        FamilyConfig::new(Family::Korenblum {
            kappa: Distortion::Power { alpha },
            p,
            dp_variant: false,
        })
    }

    /// Same configuration with the `d^p` Korenblum inner terms switched on or
    /// off. No effect on other families.
    pub fn with_dp_variant(mut self, on: bool) -> Self {
        if let Family::Korenblum { dp_variant, .. } = &mut self.family {
            *dp_variant = on;
        }
        self
    }

    /// Wiener 0.5, 1, 2; Riesz 2; Waterman harmonic; Korenblum `t^0.5`, p=2.
    pub fn standard_suite() -> Vec<FamilyConfig> {
        let ok = |r: Result<FamilyConfig>| r.expect("built-in configuration");
        alloc::vec![
            ok(FamilyConfig::wiener(0.5)),
            ok(FamilyConfig::wiener(1.0)),
            ok(FamilyConfig::wiener(2.0)),
            ok(FamilyConfig::riesz(2.0)),
            FamilyConfig::waterman_harmonic(),
            ok(FamilyConfig::korenblum_power(0.5, 2.0)),
        ]
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Wiener with `p = 1`.
    pub fn is_jordan(&self) -> bool {
        matches!(self.family, Family::Wiener { p } if p == 1.0)
    }

    /// Per-grid checks (Waterman weight monotonicity on the queried range).
    pub(crate) fn check_for(&self, f: &GridFunction2D) -> Result<()> {
        if let Family::Waterman { lambda } = self.family {
            lambda.check_range(f.rows(), f.cols())?;
        }
        Ok(())
    }

    /// Terms depend on the position of an interval within its partition.
    pub(crate) fn positional(&self) -> bool {
        matches!(self.family, Family::Waterman { .. })
    }

    /// The outer map is the identity, so the total is one additive sum.
    pub(crate) fn linear(&self) -> bool {
        match self.family {
            Family::Wiener { p } => p <= 1.0,
            Family::Waterman { .. } => true,
            Family::Riesz { .. } | Family::Korenblum { .. } => false,
        }
    }

    /// Contribution of one row (or column) interval of length `len` at
    /// 1-based position `pos`.
    #[inline]
    pub(crate) fn edge_term(&self, axis: Axis, d: f64, len: f64, pos: usize) -> f64 {
        match self.family {
            Family::Wiener { p } => pow_p(d, p),
            Family::Riesz { p } => libm::pow(d, p) / libm::pow(len, p - 1.0),
            Family::Waterman { lambda } => {
                let w = match axis {
                    Axis::Row => lambda.weight(pos, 1),
                    Axis::Col => lambda.weight(1, pos),
                };
                w * d
            }
            Family::Korenblum {
                kappa,
                p,
                dp_variant,
            } => {
                let num = if dp_variant { libm::pow(d, p) } else { d };
                num / kappa.eval(len)
            }
        }
    }

    /// Contribution of the cell at row position `k`, column position `l`.
    #[inline]
    pub(crate) fn cell_term(&self, d: f64, dt: f64, ds: f64, k: usize, l: usize) -> f64 {
        match self.family {
            Family::Wiener { p } => pow_p(d, p),
            Family::Riesz { p } => {
                libm::pow(d, p) / (libm::pow(dt, p - 1.0) * libm::pow(ds, p - 1.0))
            }
            Family::Waterman { lambda } => lambda.weight(k, l) * d,
            Family::Korenblum {
                kappa,
                p,
                dp_variant,
            } => {
                let num = if dp_variant { libm::pow(d, p) } else { d };
                num / (kappa.eval(dt) * kappa.eval(ds))
            }
        }
    }

    /// Outer map applied to each of the three sums.
    #[inline]
    pub(crate) fn aggregate(&self, sum: f64) -> f64 {
        match self.family {
            Family::Wiener { p } if p <= 1.0 => sum,
            Family::Wiener { p } | Family::Riesz { p } | Family::Korenblum { p, .. } => {
                libm::pow(sum, 1.0 / p)
            }
            Family::Waterman { .. } => sum,
        }
    }
}

impl fmt::Display for FamilyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Wiener { p } => write!(f, "wiener(p={p})"),
            Family::Riesz { p } => write!(f, "riesz(p={p})"),
            Family::Waterman { .. } => write!(f, "waterman(harmonic)"),
            Family::Korenblum {
                kappa: Distortion::Power { alpha },
                p,
                dp_variant,
            } => {
                write!(f, "korenblum(alpha={alpha}, p={p}")?;
                if dp_variant {
                    write!(f, ", dp-variant")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FamilyConfig {
    pub fn label(&self) -> String {
        format!("{self}")
    }
}

/// Row, column and mixed terms of a variation, plus their sum.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VariationBreakdown {
    pub row: f64,
    pub col: f64,
    pub mixed: f64,
    pub total: f64,
}

impl VariationBreakdown {
    pub(crate) fn new(row: f64, col: f64, mixed: f64) -> Self {
        VariationBreakdown {
            row,
            col,
            mixed,
            total: row + col + mixed,
        }
    }
}

/// Distance of one row/column step from `a` to `b`.
#[inline]
pub(crate) fn edge_dist(
    fa: &Element,
    fb: &Element,
    g: Option<(&Element, &Element)>,
) -> Result<f64> {
    match g {
        None => fb.dist(fa),
        Some((ga, gb)) => fb.add(ga)?.dist(&fa.add(gb)?),
    }
}

/// The four corners of a cell `[t_a, t_b] × [s_c, s_e]`.
#[derive(Clone, Copy)]
pub(crate) struct Corners<'a> {
    pub ac: &'a Element,
    pub ae: &'a Element,
    pub bc: &'a Element,
    pub be: &'a Element,
}

/// `X(b,e) + X(a,c) + Y(b,c) + Y(a,e)`, associated left to right.
fn cross_side(x: Corners<'_>, y: Corners<'_>) -> Result<Element> {
    x.be.add(x.ac)?.add(y.bc)?.add(y.ae)
}

/// Mixed-term distance of a cell.
#[inline]
pub(crate) fn cell_dist(f: Corners<'_>, g: Option<Corners<'_>>) -> Result<f64> {
    match g {
        None => f.be.add(f.ac)?.dist(&f.bc.add(f.ae)?),
        Some(g) => cross_side(f, g)?.dist(&cross_side(g, f)?),
    }
}

/// Read access to a lattice of values with its coordinates: either a grid
/// function restricted to a partition pair, or a product tuple.
pub(crate) trait Lattice {
    fn n(&self) -> usize;
    fn m(&self) -> usize;
    fn t(&self, i: usize) -> f64;
    fn s(&self, j: usize) -> f64;
    fn f(&self, i: usize, j: usize) -> &Element;
    fn g(&self, i: usize, j: usize) -> Option<&Element>;
}

fn corners<L: Lattice + ?Sized>(
    l: &L,
    pick: impl Fn(&L, usize, usize) -> Option<&Element>,
    i: usize,
    j: usize,
) -> Option<Corners<'_>> {
    Some(Corners {
        ac: pick(l, i - 1, j - 1)?,
        ae: pick(l, i - 1, j)?,
        bc: pick(l, i, j - 1)?,
        be: pick(l, i, j)?,
    })
}

/// Evaluates the three sums on a lattice.
pub(crate) fn evaluate<L: Lattice + ?Sized>(
    lat: &L,
    cfg: &FamilyConfig,
) -> Result<VariationBreakdown> {
    let (n, m) = (lat.n(), lat.m());

    let mut row_sum = 0.0;
    for i in 1..n {
        let g = lat.g(i - 1, 0).zip(lat.g(i, 0));
        let d = edge_dist(lat.f(i - 1, 0), lat.f(i, 0), g)?;
        row_sum += cfg.edge_term(Axis::Row, d, lat.t(i) - lat.t(i - 1), i);
    }

    let mut col_sum = 0.0;
    for j in 1..m {
        let g = lat.g(0, j - 1).zip(lat.g(0, j));
        let d = edge_dist(lat.f(0, j - 1), lat.f(0, j), g)?;
        col_sum += cfg.edge_term(Axis::Col, d, lat.s(j) - lat.s(j - 1), j);
    }

    let mut mixed_sum = 0.0;
    for j in 1..m {
        let ds = lat.s(j) - lat.s(j - 1);
        for i in 1..n {
            let fc = corners(lat, |l, a, b| Some(l.f(a, b)), i, j)
                .expect("f is defined at every lattice point");
            let gc = corners(lat, |l, a, b| l.g(a, b), i, j);
            let d = cell_dist(fc, gc)?;
            mixed_sum += cfg.cell_term(d, lat.t(i) - lat.t(i - 1), ds, i, j);
        }
    }

    Ok(VariationBreakdown::new(
        cfg.aggregate(row_sum),
        cfg.aggregate(col_sum),
        cfg.aggregate(mixed_sum),
    ))
}

/// A grid function (or pair) restricted to a partition pair.
pub(crate) struct PartitionView<'a> {
    pub f: &'a GridFunction2D,
    pub g: Option<&'a GridFunction2D>,
    pub rows: &'a [usize],
    pub cols: &'a [usize],
}

impl Lattice for PartitionView<'_> {
    fn n(&self) -> usize {
        self.rows.len()
    }
    fn m(&self) -> usize {
        self.cols.len()
    }
    fn t(&self, i: usize) -> f64 {
        self.f.grid_t().points()[self.rows[i]]
    }
    fn s(&self, j: usize) -> f64 {
        self.f.grid_s().points()[self.cols[j]]
    }
    fn f(&self, i: usize, j: usize) -> &Element {
        self.f.get(self.rows[i], self.cols[j])
    }
    fn g(&self, i: usize, j: usize) -> Option<&Element> {
        self.g.map(|g| g.get(self.rows[i], self.cols[j]))
    }
}

/// Row, column and mixed variation of `f` on `pair`.
pub fn variation_on_partition(
    f: &GridFunction2D,
    pair: &PartitionPair,
    cfg: &FamilyConfig,
) -> Result<VariationBreakdown> {
    pair.check_fits(f)?;
    cfg.check_for(f)?;
    evaluate(
        &PartitionView {
            f,
            g: None,
            rows: pair.pi.indices(),
            cols: pair.pi_star.indices(),
        },
        cfg,
    )
}

/// Joint variation of `(f, g)` on `pair`. Symmetric in `f` and `g`.
pub fn joint_variation_on_partition(
    f: &GridFunction2D,
    g: &GridFunction2D,
    pair: &PartitionPair,
    cfg: &FamilyConfig,
) -> Result<VariationBreakdown> {
    f.check_same_domain(g)?;
    pair.check_fits(f)?;
    cfg.check_for(f)?;
    evaluate(
        &PartitionView {
            f,
            g: Some(g),
            rows: pair.pi.indices(),
            cols: pair.pi_star.indices(),
        },
        cfg,
    )
}

/// `d(f(0,0), g(0,0))` plus the joint variation on `pair`.
pub fn rho_on_partition(
    f: &GridFunction2D,
    g: &GridFunction2D,
    pair: &PartitionPair,
    cfg: &FamilyConfig,
) -> Result<f64> {
    let joint = joint_variation_on_partition(f, g, pair, cfg)?;
    Ok(f.get(0, 0).dist(g.get(0, 0))? + joint.total)
}

/// `ρ(f, g) = d(f(0,0), g(0,0)) + sup over grid subpartitions of the joint
/// variation`.
pub fn rho(f: &GridFunction2D, g: &GridFunction2D, cfg: &FamilyConfig) -> Result<f64> {
    f.check_same_domain(g)?;
    let sup = solve_sup(f, Some(g), cfg, Method::Auto)?;
    Ok(f.get(0, 0).dist(g.get(0, 0))? + sup.value)
}
