//! Precompactness certificates for finite function families.
//!
//! A family is joint equivariated at level `ε` by a partition pair `P` when
//! every pair of members has `sup V(f,g) ≤ ε + V(f,g,P)`. Given such a
//! witness at `ε/2`, any cover of the family at radius `ε/2` under the
//! pseudo-metric `ρ_P` (ρ evaluated on `P` alone) is an `ε`-net for `ρ`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gridfn::{GridFunction2D, PartitionPair};
use crate::search::{solve_sup, Method};
use crate::semigroup::Element;
use crate::variation::{
    evaluate, joint_variation_on_partition, rho, rho_on_partition, FamilyConfig, Lattice,
};

/// A non-empty list of functions on shared grids, one label each.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionFamily {
    members: Vec<GridFunction2D>,
    labels: Vec<String>,
}

impl FunctionFamily {
    pub fn new(members: Vec<GridFunction2D>, labels: Vec<String>) -> Result<Self> {
        if members.is_empty() || members.len() != labels.len() {
            return Err(Error::InvalidFamily);
        }
        for m in &members[1..] {
            members[0].check_same_domain(m)?;
        }
        Ok(FunctionFamily { members, labels })
    }

    pub fn members(&self) -> &[GridFunction2D] {
        &self.members
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Values of a function at the points of a partition pair, with the
/// coordinates of those points.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTuple {
    t: Vec<f64>,
    s: Vec<f64>,
    entries: Vec<Element>,
}

impl ProductTuple {
    /// `entries[i][j]` sits at `(t[i], s[j])`.
    pub fn new(t: Vec<f64>, s: Vec<f64>, entries: Vec<Vec<Element>>) -> Result<Self> {
        let increasing = |v: &[f64]| v.len() >= 2 && v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&t) || !increasing(&s) {
            return Err(Error::TupleMismatch(
                "coordinates must be strictly increasing with at least two points".into(),
            ));
        }
        if entries.len() != t.len() || entries.iter().any(|r| r.len() != s.len()) {
            return Err(Error::TupleMismatch(format!(
                "expected {}x{} entries",
                t.len(),
                s.len()
            )));
        }
        let entries: Vec<Element> = entries.into_iter().flatten().collect();
        let inst = entries[0].instance();
        if let Some(e) = entries.iter().find(|e| e.instance() != inst) {
            return Err(Error::InstanceMismatch {
                expected: format!("{inst}"),
                found: format!("{}", e.instance()),
            });
        }
        Ok(ProductTuple { t, s, entries })
    }

    /// The partition-evaluation map `T f = {f(t_i, s_j)}`.
    pub fn from_function(f: &GridFunction2D, pair: &PartitionPair) -> Result<Self> {
        pair.check_fits(f)?;
        let rows = pair.pi.indices();
        let cols = pair.pi_star.indices();
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                entries.push(f.get(i, j).clone());
            }
        }
        Ok(ProductTuple {
            t: rows.iter().map(|&i| f.grid_t().points()[i]).collect(),
            s: cols.iter().map(|&j| f.grid_s().points()[j]).collect(),
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.t.len()
    }

    pub fn cols(&self) -> usize {
        self.s.len()
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn entry(&self, i: usize, j: usize) -> &Element {
        &self.entries[i * self.s.len() + j]
    }
}

struct TuplePair<'a> {
    xi: &'a ProductTuple,
    delta: &'a ProductTuple,
}

impl Lattice for TuplePair<'_> {
    fn n(&self) -> usize {
        self.xi.rows()
    }
    fn m(&self) -> usize {
        self.xi.cols()
    }
    fn t(&self, i: usize) -> f64 {
        self.xi.t[i]
    }
    fn s(&self, j: usize) -> f64 {
        self.xi.s[j]
    }
    fn f(&self, i: usize, j: usize) -> &Element {
        self.xi.entry(i, j)
    }
    fn g(&self, i: usize, j: usize) -> Option<&Element> {
        Some(self.delta.entry(i, j))
    }
}

/// Product-space metric `ρ'(ξ, δ)`: `d(ξ_00, δ_00)` plus the joint row,
/// column and mixed sums of the two tuples.
pub fn product_rho_prime(
    xi: &ProductTuple,
    delta: &ProductTuple,
    cfg: &FamilyConfig,
) -> Result<f64> {
    if xi.t != delta.t || xi.s != delta.s {
        return Err(Error::TupleMismatch(format!(
            "{}x{} tuple against {}x{} tuple on different coordinates",
            xi.rows(),
            xi.cols(),
            delta.rows(),
            delta.cols()
        )));
    }
    if xi.entries[0].instance() != delta.entries[0].instance() {
        return Err(Error::InstanceMismatch {
            expected: format!("{}", xi.entries[0].instance()),
            found: format!("{}", delta.entries[0].instance()),
        });
    }
    let joint = evaluate(&TuplePair { xi, delta }, cfg)?;
    Ok(xi.entry(0, 0).dist(delta.entry(0, 0))? + joint.total)
}

/// Outcome of a witness search.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivariationCertificate {
    pub epsilon: f64,
    pub witness: PartitionPair,
    /// Largest `sup V(f,g) − V(f,g,witness)` over member pairs.
    pub defect: f64,
    pub holds: bool,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

/// Joint suprema for all unordered pairs `i < j`, in row-major order.
fn pair_sups(a: &FunctionFamily, cfg: &FamilyConfig) -> Result<Vec<f64>> {
    let m = a.members();
    let mut out = Vec::with_capacity(m.len() * (m.len() - 1) / 2);
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            out.push(solve_sup(&m[i], Some(&m[j]), cfg, Method::Auto)?.value);
        }
    }
    Ok(out)
}

fn defect_with(
    a: &FunctionFamily,
    sups: &[f64],
    pair: &PartitionPair,
    cfg: &FamilyConfig,
) -> Result<f64> {
    let m = a.members();
    let mut worst = 0.0f64;
    let mut k = 0;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let at = joint_variation_on_partition(&m[i], &m[j], pair, cfg)?.total;
            worst = worst.max(sups[k] - at);
            k += 1;
        }
    }
    Ok(worst)
}

/// Largest gap between the joint supremum and the joint variation on
/// `pair`, over all member pairs (the diagonal contributes 0).
pub fn equivariation_defect(
    a: &FunctionFamily,
    pair: &PartitionPair,
    cfg: &FamilyConfig,
) -> Result<f64> {
    pair.check_fits(&a.members()[0])?;
    defect_with(a, &pair_sups(a, cfg)?, pair, cfg)
}

/// Tries the full grid, then removes one interior index at a time (the one
/// leaving the smallest defect) down to the coarse pair. Returns the first
/// candidate with defect at most `epsilon`, otherwise the best candidate
/// seen with `holds = false`.
pub fn find_equivariation_witness(
    a: &FunctionFamily,
    epsilon: f64,
    cfg: &FamilyConfig,
) -> Result<EquivariationCertificate> {
    check_epsilon(epsilon)?;
    let f0 = &a.members()[0];
    let sups = pair_sups(a, cfg)?;
    let mut current = PartitionPair::full(f0);
    let mut defect = defect_with(a, &sups, &current, cfg)?;
    let mut best = (defect, current.clone());
    loop {
        if defect <= epsilon {
            return Ok(EquivariationCertificate {
                epsilon,
                witness: current,
                defect,
                holds: true,
            });
        }
        let mut next: Option<(f64, PartitionPair)> = None;
        for axis_rows in [true, false] {
            let part = if axis_rows {
                &current.pi
            } else {
                &current.pi_star
            };
            let idx = part.indices();
            for k in 1..idx.len() - 1 {
                let mut reduced: Vec<usize> = idx.to_vec();
                reduced.remove(k);
                let mut cand = current.clone();
                let target = if axis_rows {
                    &mut cand.pi
                } else {
                    &mut cand.pi_star
                };
                *target = crate::gridfn::Partition::new(reduced, target.grid_len())?;
                let d = defect_with(a, &sups, &cand, cfg)?;
                if next.as_ref().is_none_or(|n| d < n.0) {
                    next = Some((d, cand));
                }
            }
        }
        match next {
            Some((d, cand)) => {
                defect = d;
                current = cand;
                if d < best.0 {
                    best = (d, current.clone());
                }
            }
            None => break,
        }
    }
    Ok(EquivariationCertificate {
        epsilon,
        witness: best.1,
        defect: best.0,
        holds: false,
    })
}

/// Centers of a constructed net (indices into the family, ascending) and
/// the certificate of the witness used to build it.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonNet {
    pub centers: Vec<usize>,
    pub labels: Vec<String>,
    pub certificate: EquivariationCertificate,
}

/// Builds an `ε`-net for `ρ`: a witness at `ε/2`, then a greedy cover under
/// `ρ` restricted to the witness with radius `ε/2`. Each step takes the
/// member covering the most uncovered members (earliest on ties). Without
/// a witness the centers are empty and the certificate does not hold.
pub fn build_epsilon_net(
    a: &FunctionFamily,
    epsilon: f64,
    cfg: &FamilyConfig,
) -> Result<EpsilonNet> {
    check_epsilon(epsilon)?;
    let certificate = find_equivariation_witness(a, epsilon / 2.0, cfg)?;
    if !certificate.holds {
        return Ok(EpsilonNet {
            centers: Vec::new(),
            labels: Vec::new(),
            certificate,
        });
    }
    let m = a.members();
    let n = m.len();
    let radius = epsilon / 2.0;
    let reach = radius + 1e-9 * radius.max(1.0);
    let mut covers = alloc::vec![false; n * n];
    for i in 0..n {
        covers[i * n + i] = true;
        for j in i + 1..n {
            let r = rho_on_partition(&m[i], &m[j], &certificate.witness, cfg)?;
            let c = r <= reach;
            covers[i * n + j] = c;
            covers[j * n + i] = c;
        }
    }
    let mut covered = alloc::vec![false; n];
    let mut left = n;
    let mut centers = Vec::new();
    while left > 0 {
        let mut best = (0usize, 0usize);
        for c in 0..n {
            let gain = (0..n).filter(|&j| !covered[j] && covers[c * n + j]).count();
            if gain > best.1 {
                best = (c, gain);
            }
        }
        let c = best.0;
        centers.push(c);
        for j in 0..n {
            if !covered[j] && covers[c * n + j] {
                covered[j] = true;
                left -= 1;
            }
        }
    }
    centers.sort_unstable();
    let labels = centers.iter().map(|&c| a.labels()[c].clone()).collect();
    Ok(EpsilonNet {
        centers,
        labels,
        certificate,
    })
}

/// Result of checking a net against the full metric.
#[derive(Debug, Clone, PartialEq)]
pub struct NetCheck {
    pub ok: bool,
    /// Largest distance from a member to its nearest center.
    pub worst: f64,
    /// Label of the first member attaining `worst` when the check fails.
    pub offender: Option<String>,
}

/// Evaluates the full `ρ` from every member to its nearest center.
pub fn verify_epsilon_net(
    a: &FunctionFamily,
    centers: &[usize],
    epsilon: f64,
    cfg: &FamilyConfig,
) -> Result<NetCheck> {
    check_epsilon(epsilon)?;
    if centers.iter().any(|&c| c >= a.len()) {
        return Err(Error::InvalidFamily);
    }
    let m = a.members();
    let mut worst = (f64::NEG_INFINITY, 0usize);
    for (i, f) in m.iter().enumerate() {
        let mut near = f64::INFINITY;
        for &c in centers {
            near = near.min(if c == i { 0.0 } else { rho(f, &m[c], cfg)? });
        }
        if near > worst.0 {
            worst = (near, i);
        }
    }
    let ok = worst.0 <= epsilon + 1e-9 * worst.0.max(1.0);
    Ok(NetCheck {
        ok,
        worst: worst.0,
        offender: (!ok).then(|| a.labels()[worst.1].clone()),
    })
}

/// Farthest-point cover of the values `{f(t_i, s_j) : f ∈ A}` at radius
/// `epsilon`. The first center is the first member's value.
pub fn pointwise_net(a: &FunctionFamily, i: usize, j: usize, epsilon: f64) -> Result<Vec<Element>> {
    check_epsilon(epsilon)?;
    let f0 = &a.members()[0];
    if i >= f0.rows() || j >= f0.cols() {
        return Err(Error::InvalidPartition(format!(
            "point ({i},{j}) is outside a {}x{} grid",
            f0.rows(),
            f0.cols()
        )));
    }
    let values: Vec<&Element> = a.members().iter().map(|f| f.get(i, j)).collect();
    let mut nearest: Vec<f64> = Vec::with_capacity(values.len());
    for v in &values {
        nearest.push(v.dist(values[0])?);
    }
    let mut centers = alloc::vec![values[0].clone()];
    loop {
        let (far, d) =
            nearest
                .iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |b, (k, d)| if d > b.1 { (k, d) } else { b },
                );
        if d <= epsilon {
            return Ok(centers);
        }
        centers.push(values[far].clone());
        for (k, v) in values.iter().enumerate() {
            nearest[k] = nearest[k].min(v.dist(values[far])?);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfn::{synth_function, Generator, Grid1D, Partition};
    use crate::semigroup::Instance;
    use alloc::string::ToString;
    use alloc::vec;

    fn along_t(values: &[f64]) -> GridFunction2D {
        let gt = Grid1D::uniform(values.len()).unwrap();
        let gs = Grid1D::uniform(2).unwrap();
        GridFunction2D::from_scalars(gt, gs, values.iter().map(|&v| vec![v, v]).collect()).unwrap()
    }

    fn family(fs: Vec<GridFunction2D>) -> FunctionFamily {
        let labels = (0..fs.len()).map(|k| format!("f{k}")).collect();
        FunctionFamily::new(fs, labels).unwrap()
    }

    fn theta_family(count: usize) -> FunctionFamily {
        let g = Grid1D::uniform(5).unwrap();
        let fs = (0..count)
            .map(|k| {
                let th = k as f64 / (count - 1) as f64;
                GridFunction2D::from_fn(g.clone(), g.clone(), Instance::NonNegReal, |t, s| {
                    Element::scalar(th * t * s)
                })
                .unwrap()
            })
            .collect();
        family(fs)
    }

    #[test]
    fn family_validation() {
        assert_eq!(
            FunctionFamily::new(vec![], vec![]),
            Err(Error::InvalidFamily)
        );
        let f = along_t(&[0.0, 1.0]);
        let g = along_t(&[0.0, 1.0, 2.0]);
        assert!(FunctionFamily::new(vec![f.clone()], vec![]).is_err());
        assert_eq!(
            FunctionFamily::new(vec![f, g], vec!["a".to_string(), "b".to_string()]),
            Err(Error::GridMismatch)
        );
    }

    #[test]
    fn defect_examples() {
        let w2 = FamilyConfig::wiener(2.0).unwrap();
        let a = family(vec![along_t(&[0.0, 1.0, 2.0]), along_t(&[0.0, 0.0, 0.0])]);
        let full = PartitionPair::full(&a.members()[0]);
        let d = equivariation_defect(&a, &full, &w2).unwrap();
        assert!((d - (2.0 - 2f64.sqrt())).abs() < 1e-12);
        let single = family(vec![along_t(&[0.0, 3.0, 1.0])]);
        assert_eq!(equivariation_defect(&single, &full, &w2).unwrap(), 0.0);
    }

    #[test]
    fn witness_examples() {
        let w2 = FamilyConfig::wiener(2.0).unwrap();
        let a = family(vec![along_t(&[0.0, 1.0, 2.0]), along_t(&[0.0, 0.0, 0.0])]);
        let c = find_equivariation_witness(&a, 0.1, &w2).unwrap();
        assert!(c.holds);
        assert_eq!(c.defect, 0.0);
        assert_eq!(c.witness.pi, Partition::coarse(3));

        let w1 = FamilyConfig::wiener(1.0).unwrap();
        let t = theta_family(6);
        let c = find_equivariation_witness(&t, 1e-6, &w1).unwrap();
        assert!(c.holds);
        assert_eq!(c.defect, 0.0);
        assert_eq!(c.witness, PartitionPair::full(&t.members()[0]));
        assert!(find_equivariation_witness(&t, 0.0, &w1).is_err());
    }

    #[test]
    fn isometry_on_tuples() {
        let g = Grid1D::uniform(4).unwrap();
        let f = synth_function(
            &Generator::RandomWalk { step: 1.0 },
            &g,
            &g,
            Instance::Interval,
            1,
        )
        .unwrap();
        let h = synth_function(
            &Generator::RandomWalk { step: 1.0 },
            &g,
            &g,
            Instance::Interval,
            2,
        )
        .unwrap();
        let pair = PartitionPair::new(
            Partition::new(vec![0, 2, 3], 4).unwrap(),
            Partition::new(vec![0, 1, 3], 4).unwrap(),
        );
        let (tf, th) = (
            ProductTuple::from_function(&f, &pair).unwrap(),
            ProductTuple::from_function(&h, &pair).unwrap(),
        );
        for cfg in FamilyConfig::standard_suite() {
            let direct = rho_on_partition(&f, &h, &pair, &cfg).unwrap();
            assert_eq!(product_rho_prime(&tf, &th, &cfg).unwrap(), direct);
            assert_eq!(product_rho_prime(&th, &tf, &cfg).unwrap(), direct);
            assert_eq!(product_rho_prime(&tf, &tf, &cfg).unwrap(), 0.0);
        }
        let other = ProductTuple::from_function(&f, &PartitionPair::full(&f)).unwrap();
        assert!(product_rho_prime(&tf, &other, &FamilyConfig::wiener(1.0).unwrap()).is_err());
    }

    #[test]
    fn pointwise_examples() {
        let fs = [0.0, 0.04, 0.5].iter().map(|&v| along_t(&[v, v])).collect();
        let a = family(fs);
        assert_eq!(pointwise_net(&a, 0, 0, 0.1).unwrap().len(), 2);
        assert_eq!(pointwise_net(&a, 1, 1, 1.0).unwrap().len(), 1);
        let same = family(vec![along_t(&[2.0, 2.0]); 3]);
        assert_eq!(
            pointwise_net(&same, 0, 1, 0.1).unwrap(),
            vec![Element::scalar(2.0).unwrap()]
        );
        assert!(pointwise_net(&a, 2, 0, 0.1).is_err());
    }

    #[test]
    fn theta_net() {
        let w1 = FamilyConfig::wiener(1.0).unwrap();
        let a = theta_family(101);
        let net = build_epsilon_net(&a, 0.1, &w1).unwrap();
        assert!(net.certificate.holds);
        assert!(net.centers.len() <= 11, "{}", net.centers.len());
        assert!(verify_epsilon_net(&a, &net.centers, 0.1, &w1).unwrap().ok);

        let bad = verify_epsilon_net(&a, &[0], 0.1, &w1).unwrap();
        assert!(!bad.ok);
        assert_eq!(bad.offender.as_deref(), Some("f100"));
        assert!((bad.worst - 1.0).abs() < 1e-12);

        let all: Vec<usize> = (0..a.len()).collect();
        let check = verify_epsilon_net(&a, &all, 0.1, &w1).unwrap();
        assert!(check.ok);
        assert_eq!(check.worst, 0.0);
    }

    #[test]
    fn small_nets() {
        let w1 = FamilyConfig::wiener(1.0).unwrap();
        let single = family(vec![along_t(&[0.0, 1.0])]);
        assert_eq!(
            build_epsilon_net(&single, 0.1, &w1).unwrap().centers,
            vec![0]
        );
        let a = theta_family(5);
        assert_eq!(build_epsilon_net(&a, 3.0, &w1).unwrap().centers.len(), 1);
    }
}
