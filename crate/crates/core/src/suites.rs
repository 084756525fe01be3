//! Seeded property suites: semigroup laws, metric axioms of `ρ`, the
//! subadditivity and reverse-triangle lemmas, and search/oracle agreement.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gridfn::{synth_function, Generator, Grid1D, GridFunction2D};
use crate::search::{brute_force_sup, solve_sup, Method};
use crate::semigroup::{verify_semigroup_laws, Element, Instance, Law};
use crate::tolerance::{scale, ASSERT_REL, ORACLE_REL};
use crate::variation::{rho, FamilyConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Semigroup,
    Axioms,
    Lemmas,
    SearchOracle,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Semigroup,
        Suite::Axioms,
        Suite::Lemmas,
        Suite::SearchOracle,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Semigroup => "semigroup",
            Suite::Axioms => "axioms",
            Suite::Lemmas => "lemmas",
            Suite::SearchOracle => "search-oracle",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown suite '{s}' (expected semigroup|axioms|lemmas|search-oracle)"
                ))
            })
    }
}

/// One property checked over many cases. `worst_margin` is the smallest
/// relative slack seen (negative means the property was exceeded).
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: usize,
    pub tolerance: f64,
    pub worst_margin: f64,
    pub violations: usize,
}

impl CheckOutcome {
    fn new(name: String, tolerance: f64) -> Self {
        CheckOutcome {
            name,
            cases: 0,
            tolerance,
            worst_margin: f64::INFINITY,
            violations: 0,
        }
    }

    /// Records `lhs <= rhs`.
    fn le(&mut self, lhs: f64, rhs: f64) {
        let margin = (rhs - lhs) / scale(lhs).max(scale(rhs));
        self.record(margin);
    }

    /// Records `a == b`.
    fn same(&mut self, a: f64, b: f64) {
        let margin = -libm::fabs(a - b) / scale(a).max(scale(b));
        self.record(margin);
    }

    fn record(&mut self, margin: f64) {
        self.cases += 1;
        // NaN margins count as violations.
        if margin.is_nan() || margin < -self.tolerance {
            self.violations += 1;
        }
        if margin.is_nan() || margin < self.worst_margin {
            self.worst_margin = margin;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub count: usize,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }
}

/// The instances every suite sweeps.
pub fn standard_instances() -> Vec<Instance> {
    vec![
        Instance::NonNegReal,
        Instance::RealVector(2),
        Instance::Interval,
        Instance::Boxed(2),
    ]
}

/// Runs `suite` with `count` cases per (family, instance) combination over
/// the default families: [`FamilyConfig::standard_suite`] for the axioms
/// and lemmas, [`oracle_families`] for the search oracle.
pub fn run_suite(suite: Suite, seed: u64, count: usize) -> Result<SuiteReport> {
    let families = match suite {
        Suite::SearchOracle => oracle_families(),
        _ => FamilyConfig::standard_suite(),
    };
    run_suite_for(suite, seed, count, &families)
}

/// Like [`run_suite`] with an explicit family list (ignored by the
/// semigroup suite).
pub fn run_suite_for(
    suite: Suite,
    seed: u64,
    count: usize,
    families: &[FamilyConfig],
) -> Result<SuiteReport> {
    if count == 0 {
        return Err(Error::InvalidConfig("count must be at least 1".into()));
    }
    let checks = match suite {
        Suite::Semigroup => semigroup_suite(seed, count)?,
        Suite::Axioms => axioms_suite(seed, count, families)?,
        Suite::Lemmas => lemmas_suite(seed, count, families)?,
        Suite::SearchOracle => search_oracle_suite(seed, count, families)?,
    };
    Ok(SuiteReport {
        suite,
        seed,
        count,
        checks,
    })
}

fn semigroup_suite(seed: u64, count: usize) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for inst in standard_instances() {
        let report = verify_semigroup_laws(inst, count, seed)?;
        for law in &report.laws {
            let mut c = CheckOutcome::new(format!("{inst}: {}", law.law.name()), report.tolerance);
            c.cases = count;
            c.worst_margin = -law.worst_violation;
            c.violations = usize::from(!law.passed);
            out.push(c);
        }
    }
    debug_assert_eq!(out.len(), Law::ALL.len() * standard_instances().len());
    Ok(out)
}

/// A random function on the given grids.
pub fn random_function<R: Rng>(
    rng: &mut R,
    gt: &Grid1D,
    gs: &Grid1D,
    instance: Instance,
) -> Result<GridFunction2D> {
    let step = rng.random_range(0.1..2.0);
    synth_function(
        &Generator::RandomWalk { step },
        gt,
        gs,
        instance,
        rng.random(),
    )
}

/// `f` with one entry replaced by a different random element.
fn perturbed<R: Rng>(rng: &mut R, f: &GridFunction2D) -> Result<GridFunction2D> {
    let (i, j) = (rng.random_range(0..f.rows()), rng.random_range(0..f.cols()));
    let mut fresh = f.instance().sample(rng);
    while &fresh == f.get(i, j) {
        fresh = f.instance().sample(rng);
    }
    let rows: Vec<Vec<Element>> = (0..f.rows())
        .map(|a| {
            (0..f.cols())
                .map(|b| {
                    if (a, b) == (i, j) {
                        fresh.clone()
                    } else {
                        f.get(a, b).clone()
                    }
                })
                .collect()
        })
        .collect();
    GridFunction2D::new(f.grid_t().clone(), f.grid_s().clone(), f.instance(), rows)
}

fn sub_seed(seed: u64, a: usize, b: usize) -> u64 {
    seed ^ ((a as u64) << 40) ^ ((b as u64) << 20) ^ 0x5eed
}

fn axioms_suite(seed: u64, count: usize, families: &[FamilyConfig]) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for (fi, cfg) in families.iter().enumerate() {
        for (ii, inst) in standard_instances().into_iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, fi, ii));
            let tag = format!("{cfg} / {inst}");
            let mut sym = CheckOutcome::new(format!("{tag}: symmetry"), 0.0);
            let mut zero = CheckOutcome::new(format!("{tag}: rho(f,f) = 0"), 0.0);
            let mut sep = CheckOutcome::new(format!("{tag}: f != g implies rho > 0"), 0.0);
            let mut tri = CheckOutcome::new(format!("{tag}: triangle"), ASSERT_REL);
            for _ in 0..count {
                let gt = Grid1D::random(4, &mut rng)?;
                let gs = Grid1D::random(4, &mut rng)?;
                let f = random_function(&mut rng, &gt, &gs, inst)?;
                let g = random_function(&mut rng, &gt, &gs, inst)?;
                let h = random_function(&mut rng, &gt, &gs, inst)?;
                let fg = rho(&f, &g, cfg)?;
                sym.same(fg, rho(&g, &f, cfg)?);
                zero.same(rho(&f, &f, cfg)?, 0.0);
                let near = perturbed(&mut rng, &f)?;
                let d = rho(&f, &near, cfg)?;
                sep.record(if d > 0.0 { 0.0 } else { -1.0 });
                if f != g {
                    sep.record(if fg > 0.0 { 0.0 } else { -1.0 });
                }
                tri.le(rho(&f, &h, cfg)?, fg + rho(&g, &h, cfg)?);
            }
            out.extend([sym, zero, sep, tri]);
        }
    }
    Ok(out)
}

fn lemmas_suite(seed: u64, count: usize, families: &[FamilyConfig]) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for (fi, cfg) in families.iter().enumerate() {
        for (ii, inst) in standard_instances().into_iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, fi, ii) ^ 0x1e44a);
            let tag = format!("{cfg} / {inst}");
            let mut sub = CheckOutcome::new(format!("{tag}: V(f,g) <= V(f) + V(g)"), ASSERT_REL);
            let mut rev = CheckOutcome::new(format!("{tag}: |V(f) - V(g)| <= V(f,g)"), ASSERT_REL);
            for _ in 0..count {
                let gt = Grid1D::random(4, &mut rng)?;
                let gs = Grid1D::random(4, &mut rng)?;
                let f = random_function(&mut rng, &gt, &gs, inst)?;
                let g = random_function(&mut rng, &gt, &gs, inst)?;
                let vf = solve_sup(&f, None, cfg, Method::Auto)?.value;
                let vg = solve_sup(&g, None, cfg, Method::Auto)?.value;
                let vfg = solve_sup(&f, Some(&g), cfg, Method::Auto)?.value;
                sub.le(vfg, vf + vg);
                rev.le(libm::fabs(vf - vg), vfg);
            }
            out.extend([sub, rev]);
        }
    }
    Ok(out)
}

/// The standard families plus the Korenblum `d^p` variant and Wiener 3,
/// where the optimum is not always the full grid.
pub fn oracle_families() -> Vec<FamilyConfig> {
    let mut v = FamilyConfig::standard_suite();
    v.push(
        FamilyConfig::korenblum_power(0.5, 2.0)
            .expect("built-in configuration")
            .with_dp_variant(true),
    );
    v.push(FamilyConfig::wiener(3.0).expect("built-in configuration"));
    v
}

fn search_oracle_suite(
    seed: u64,
    count: usize,
    families: &[FamilyConfig],
) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let instances = standard_instances();

    // Values 0, 1, 2 along t: the coarse partition wins for p > 1.
    let ramp = GridFunction2D::from_scalars(
        Grid1D::uniform(3)?,
        Grid1D::uniform(2)?,
        vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]],
    )?;
    let w2 = FamilyConfig::wiener(2.0)?;
    let mut fixed = CheckOutcome::new("wiener(p=2): ramp 0,1,2 has sup 2".into(), ORACLE_REL);
    let r = solve_sup(&ramp, None, &w2, Method::Auto)?;
    fixed.same(r.value, 2.0);
    fixed.record(if r.argmax.pi.indices() == [0, 2] {
        0.0
    } else {
        -1.0
    });
    out.push(fixed);

    for (fi, cfg) in families.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, fi, 0) ^ 0x0bac1e);
        let mut eq = CheckOutcome::new(format!("{cfg}: auto = brute force"), ORACLE_REL);
        let mut cert = CheckOutcome::new(format!("{cfg}: argmax reproduces value"), ORACLE_REL);
        for _ in 0..count {
            let inst = instances[rng.random_range(0..instances.len())];
            let gt = Grid1D::random(rng.random_range(2..=6), &mut rng)?;
            let gs = Grid1D::random(rng.random_range(2..=6), &mut rng)?;
            let f = random_function(&mut rng, &gt, &gs, inst)?;
            let g = if rng.random_bool(0.5) {
                Some(random_function(&mut rng, &gt, &gs, inst)?)
            } else {
                None
            };
            let auto = solve_sup(&f, g.as_ref(), cfg, Method::Auto)?;
            let brute = brute_force_sup(&f, g.as_ref(), cfg)?;
            eq.same(auto.value, brute.value);
            let again = match &g {
                Some(g) => {
                    crate::variation::joint_variation_on_partition(&f, g, &auto.argmax, cfg)?
                }
                None => crate::variation::variation_on_partition(&f, &auto.argmax, cfg)?,
            };
            cert.same(again.total, auto.value);
        }
        out.extend([eq, cert]);
    }
    Ok(out)
}
