use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semivar_core::suites::{oracle_families, random_function, standard_instances};
use semivar_core::tolerance::{le_rel, ASSERT_REL, ORACLE_REL};
use semivar_core::*;

#[derive(Debug)]
struct Case {
    cfg: FamilyConfig,
    f: GridFunction2D,
    g: GridFunction2D,
    h: GridFunction2D,
    pair: PartitionPair,
    rng: ChaCha8Rng,
}

fn random_partition(rng: &mut ChaCha8Rng, len: usize) -> Partition {
    let mut idx = vec![0];
    idx.extend((1..len - 1).filter(|_| rng.random_bool(0.5)));
    idx.push(len - 1);
    Partition::new(idx, len).unwrap()
}

fn case(seed: u64, family: usize, instance: usize, n: usize, m: usize) -> Case {
    let fams = oracle_families();
    let insts = standard_instances();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gt = Grid1D::random(n, &mut rng).unwrap();
    let gs = Grid1D::random(m, &mut rng).unwrap();
    let inst = insts[instance % insts.len()];
    let f = random_function(&mut rng, &gt, &gs, inst).unwrap();
    let g = random_function(&mut rng, &gt, &gs, inst).unwrap();
    let h = random_function(&mut rng, &gt, &gs, inst).unwrap();
    let pair = PartitionPair::new(random_partition(&mut rng, n), random_partition(&mut rng, m));
    Case {
        cfg: fams[family % fams.len()],
        f,
        g,
        h,
        pair,
        rng,
    }
}

fn any_case(max: usize) -> impl Strategy<Value = Case> {
    (any::<u64>(), 0..8usize, 0..4usize, 2..=max, 2..=max)
        .prop_map(|(seed, fam, inst, n, m)| case(seed, fam, inst, n, m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn joint_variation_is_symmetric(c in any_case(6)) {
        let a = joint_variation_on_partition(&c.f, &c.g, &c.pair, &c.cfg).unwrap();
        let b = joint_variation_on_partition(&c.g, &c.f, &c.pair, &c.cfg).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn sup_dominates_every_partition(c in any_case(6)) {
        let sup = solve_sup(&c.f, Some(&c.g), &c.cfg, Method::Auto).unwrap();
        let at = joint_variation_on_partition(&c.f, &c.g, &c.pair, &c.cfg).unwrap().total;
        prop_assert!(le_rel(at, sup.value, ORACLE_REL));
        prop_assert!(le_rel(rho_on_partition(&c.f, &c.g, &c.pair, &c.cfg).unwrap(),
            rho(&c.f, &c.g, &c.cfg).unwrap(), ORACLE_REL));
    }

    #[test]
    fn argmax_reproduces_value(c in any_case(7)) {
        for g in [None, Some(&c.g)] {
            let r = solve_sup(&c.f, g, &c.cfg, Method::Auto).unwrap();
            let again = match g {
                Some(g) => joint_variation_on_partition(&c.f, g, &r.argmax, &c.cfg).unwrap(),
                None => variation_on_partition(&c.f, &r.argmax, &c.cfg).unwrap(),
            };
            prop_assert_eq!(again.total, r.value);
            prop_assert!(r.optimal);
        }
    }

    #[test]
    fn jordan_refinement_is_monotone(mut c in any_case(8)) {
        let w1 = FamilyConfig::wiener(1.0).unwrap();
        let (n, m) = (c.f.rows(), c.f.cols());
        let before = joint_variation_on_partition(&c.f, &c.g, &c.pair, &w1).unwrap().total;
        let axis_rows = c.rng.random_bool(0.5);
        let len = if axis_rows { n } else { m };
        let extra = c.rng.random_range(0..len);
        let refine = |p: &Partition| {
            let mut idx = p.indices().to_vec();
            if !idx.contains(&extra) {
                idx.push(extra);
                idx.sort_unstable();
            }
            Partition::new(idx, p.grid_len()).unwrap()
        };
        let finer = if axis_rows {
            PartitionPair::new(refine(&c.pair.pi), c.pair.pi_star.clone())
        } else {
            PartitionPair::new(c.pair.pi.clone(), refine(&c.pair.pi_star))
        };
        let after = joint_variation_on_partition(&c.f, &c.g, &finer, &w1).unwrap().total;
        prop_assert!(le_rel(before, after, ORACLE_REL));
        let single_before = variation_on_partition(&c.f, &c.pair, &w1).unwrap().total;
        let single_after = variation_on_partition(&c.f, &finer, &w1).unwrap().total;
        prop_assert!(le_rel(single_before, single_after, ORACLE_REL));
    }

    #[test]
    fn greedy_never_exceeds_exact(c in any_case(7)) {
        let exact = brute_force_sup(&c.f, Some(&c.g), &c.cfg).unwrap();
        let greedy = solve_sup(&c.f, Some(&c.g), &c.cfg, Method::Greedy).unwrap();
        prop_assert!(!greedy.optimal);
        prop_assert!(le_rel(greedy.value, exact.value, ORACLE_REL));
    }

    #[test]
    fn bound_is_admissible(mut c in any_case(5)) {
        let (n, m) = (c.f.rows(), c.f.cols());
        let kr = c.rng.random_range(0..=n - 2);
        let kc = c.rng.random_range(0..=m - 2);
        let partial = PartialSelection {
            rows: (0..kr).map(|_| c.rng.random_bool(0.5)).collect(),
            cols: (0..kc).map(|_| c.rng.random_bool(0.5)).collect(),
        };
        let bound = bb_upper_bound(&c.f, Some(&c.g), &c.cfg, &partial).unwrap();
        let ok = |p: &Partition, fixed: &[bool]| {
            fixed.iter().enumerate().all(|(k, &d)| p.contains(k + 1) == d)
        };
        for pi in enumerate_partitions(c.f.grid_t()).unwrap() {
            if !ok(&pi, &partial.rows) {
                continue;
            }
            for ps in enumerate_partitions(c.f.grid_s()).unwrap() {
                if !ok(&ps, &partial.cols) {
                    continue;
                }
                let pair = PartitionPair::new(pi.clone(), ps);
                let v = joint_variation_on_partition(&c.f, &c.g, &pair, &c.cfg).unwrap().total;
                prop_assert!(le_rel(v, bound, ORACLE_REL), "{} > {}", v, bound);
            }
        }
    }

    #[test]
    fn product_metric_axioms(c in any_case(6)) {
        let t = |x: &GridFunction2D| ProductTuple::from_function(x, &c.pair).unwrap();
        let (xi, de, ze) = (t(&c.f), t(&c.g), t(&c.h));
        let d = |a: &ProductTuple, b: &ProductTuple| product_rho_prime(a, b, &c.cfg).unwrap();
        prop_assert_eq!(d(&xi, &xi), 0.0);
        prop_assert_eq!(d(&xi, &de), d(&de, &xi));
        prop_assert!(le_rel(d(&xi, &ze), d(&xi, &de) + d(&de, &ze), ASSERT_REL));
        if xi != de {
            prop_assert!(d(&xi, &de) > 0.0);
        }
    }

    #[test]
    fn rho_is_a_metric(c in any_case(5)) {
        let r = |a: &GridFunction2D, b: &GridFunction2D| rho(a, b, &c.cfg).unwrap();
        prop_assert_eq!(r(&c.f, &c.f), 0.0);
        prop_assert_eq!(r(&c.f, &c.g), r(&c.g, &c.f));
        prop_assert!(le_rel(r(&c.f, &c.h), r(&c.f, &c.g) + r(&c.g, &c.h), ASSERT_REL));
    }
}

fn small_family(seed: u64, fam: usize, size: usize) -> (FunctionFamily, FamilyConfig) {
    let c = case(seed, fam, (seed % 4) as usize, 4, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfa);
    let gt = c.f.grid_t().clone();
    let gs = c.f.grid_s().clone();
    let members: Vec<_> = (0..size)
        .map(|_| random_function(&mut rng, &gt, &gs, c.f.instance()).unwrap())
        .collect();
    let labels = (0..size).map(|k| format!("m{k}")).collect();
    (FunctionFamily::new(members, labels).unwrap(), c.cfg)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn defect_is_nonnegative(seed in any::<u64>(), fam in 0..8usize, size in 1..5usize) {
        let (a, cfg) = small_family(seed, fam, size);
        let f0 = &a.members()[0];
        for pair in [PartitionPair::full(f0), PartitionPair::coarse(f0)] {
            prop_assert!(equivariation_defect(&a, &pair, &cfg).unwrap() >= 0.0);
        }
    }

    #[test]
    fn built_nets_verify(seed in any::<u64>(), fam in 0..8usize, size in 1..6usize, eps in 0.5f64..20.0) {
        let (a, cfg) = small_family(seed, fam, size);
        let net = build_epsilon_net(&a, eps, &cfg).unwrap();
        if net.certificate.holds {
            prop_assert!(!net.centers.is_empty());
            prop_assert!(net.certificate.defect <= eps / 2.0);
            let check = verify_epsilon_net(&a, &net.centers, eps, &cfg).unwrap();
            prop_assert!(check.ok, "worst {} for eps {}", check.worst, eps);
        } else {
            prop_assert!(net.centers.is_empty());
        }
    }

    #[test]
    fn witness_composition_bound(seed in any::<u64>(), fam in 0..8usize, size in 2..5usize) {
        // rho(f, g) <= defect + rho on the witness, for every pair.
        let (a, cfg) = small_family(seed, fam, size);
        let cert = find_equivariation_witness(&a, 1e9, &cfg).unwrap();
        let m = a.members();
        for i in 0..m.len() {
            for j in 0..m.len() {
                let full = rho(&m[i], &m[j], &cfg).unwrap();
                let on_p = rho_on_partition(&m[i], &m[j], &cert.witness, &cfg).unwrap();
                prop_assert!(le_rel(full, cert.defect + on_p, ORACLE_REL));
            }
        }
    }

    #[test]
    fn pointwise_net_covers(seed in any::<u64>(), size in 1..12usize, eps in 0.05f64..3.0) {
        let (a, _) = small_family(seed, 0, size);
        let centers = pointwise_net(&a, 1, 2, eps).unwrap();
        for f in a.members() {
            let v = f.get(1, 2);
            prop_assert!(centers.iter().any(|c| c.dist(v).unwrap() <= eps));
        }
        for c in &centers {
            prop_assert!(a.members().iter().any(|f| f.get(1, 2) == c));
        }
    }
}
