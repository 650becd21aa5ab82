use proptest::prelude::*;
use volterra_lab::arith::{decide, make_simplex, EscalationPolicy, ExactRational, Interval, Verdict};
use volterra_lab::qso::{aggregate, operator_of};
use volterra_lab::spiral::{rotate, v_step, SpiralPoint};
use volterra_lab::tournament::{build_tripartite, Tournament};

fn q(n: i64, d: i64) -> ExactRational {
    ExactRational::new(n.into(), d.into()).unwrap()
}

fn rational() -> impl Strategy<Value = ExactRational> {
    (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| q(n, d))
}

fn weights(n: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..1000, n).prop_filter("nonzero", |w| w.iter().any(|&v| v > 0))
}

fn simplex(w: &[u64]) -> Vec<ExactRational> {
    let s: u64 = w.iter().sum();
    w.iter().map(|&v| q(v as i64, s as i64)).collect()
}

fn intra_edges(sizes: [usize; 3], bits: u64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    let mut start = 1;
    let mut k = 0;
    for s in sizes {
        for i in start..start + s {
            for j in i + 1..start + s {
                edges.push(if bits >> (k % 64) & 1 == 1 { (i, j) } else { (j, i) });
                k += 1;
            }
        }
        start += s;
    }
    edges
}

proptest! {
    #[test]
    fn interval_ops_contain_exact_results(a in rational(), b in rational(), prec in 8u32..200) {
        let (ia, ib) = (Interval::from_rational(&a, prec), Interval::from_rational(&b, prec));
        prop_assert!(ia.contains_rational(&a));
        prop_assert!(ia.add(&ib).contains_rational(&(&a + &b)));
        prop_assert!(ia.sub(&ib).contains_rational(&(&a - &b)));
        prop_assert!(ia.mul(&ib).contains_rational(&(&a * &b)));
        if b != ExactRational::zero() && !ib.contains_zero() {
            prop_assert!(ia.div(&ib).unwrap().contains_rational(&(&a / &b)));
        }
    }

    #[test]
    fn spiral_step_enclosure_contains_exact_step(w in weights(3), prec in 16u32..256) {
        let p = SpiralPoint::from_coords(<[ExactRational; 3]>::try_from(simplex(&w)).unwrap()).unwrap();
        let exact = v_step(&v_step(&p));
        let enc = v_step(&v_step(&p.to_interval(prec)));
        for k in 0..3 {
            prop_assert!(enc.coords()[k].contains_rational(&exact.coords()[k]));
        }
    }

    #[test]
    fn escalation_never_lowers_precision(start in 16u32..256, doublings in 0u32..6) {
        let pol = EscalationPolicy::new(start, start << doublings);
        let s: Vec<u32> = pol.schedule().collect();
        prop_assert_eq!(s[0], start);
        prop_assert!(s.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(*s.last().unwrap(), start << doublings);
    }

    #[test]
    fn decided_verdicts_do_not_depend_on_precision(a in rational(), b in rational()) {
        let exact = Verdict::from_bool(a <= b);
        let pol = EscalationPolicy::new(16, 1024);
        let (v, _) = decide(&pol, |p| {
            let (ia, ib) = (Interval::from_rational(&a, p), Interval::from_rational(&b, p));
            volterra_lab::arith::Scalar::le(&ia, &ib)
        });
        prop_assert!(v == exact || v == Verdict::Undecided);
        if a != b {
            prop_assert_eq!(v, exact);
        }
    }

    #[test]
    fn rotation_commutes_with_the_spiral_map(w in weights(3)) {
        let p = SpiralPoint::from_coords(<[ExactRational; 3]>::try_from(simplex(&w)).unwrap()).unwrap();
        prop_assert_eq!(v_step(&rotate(&p)), rotate(&v_step(&p)));
    }

    #[test]
    fn relabelling_commutes_with_the_operator(
        n in 2usize..7,
        index in any::<u64>(),
        w in weights(6),
        shift in 0usize..6,
    ) {
        let pairs = n * (n - 1) / 2;
        let t = Tournament::from_index(n, index & ((1u64 << pairs) - 1));
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n + 1).collect();
        let x = simplex(&w[..n].iter().map(|&v| v + 1).collect::<Vec<_>>());
        let mut y = vec![ExactRational::zero(); n];
        for i in 0..n {
            y[perm[i] - 1] = x[i].clone();
        }
        let fx = operator_of(&t).apply(&make_simplex(x).unwrap()).unwrap();
        let fy = operator_of(&t.relabel(&perm).unwrap()).apply(&make_simplex(y).unwrap()).unwrap();
        for i in 0..n {
            prop_assert_eq!(&fy.coords()[perm[i] - 1], &fx.coords()[i]);
        }
    }

    #[test]
    fn aggregation_commutes_with_the_operator(
        sizes in prop::array::uniform3(1usize..4),
        seed in any::<u64>(),
        w in weights(9),
    ) {
        let n: usize = sizes.iter().sum();
        let (t, part) = build_tripartite(sizes, &intra_edges(sizes, seed)).unwrap();
        let x = make_simplex(simplex(&w[..n].iter().map(|&v| v + 1).collect::<Vec<_>>())).unwrap();
        let lhs = aggregate(&operator_of(&t).apply(&x).unwrap(), &part).unwrap();
        let agg = aggregate(&x, &part).unwrap();
        let rhs = v_step(&SpiralPoint::new(agg).unwrap());
        prop_assert_eq!(lhs.coords(), rhs.coords());
    }
}
