use proptest::prelude::*;

use troplab::degen::{curve_family_gh_limit, curve_family_hybrid_limit, CurveFamily};
use troplab::forms::{
    covering_radius_sq, is_equivalent, jacobi_decompose, lll_reduce, rescale_to_diameter_one, FlatTorus,
    QuadraticForm, DEFAULT_BUDGET,
};
use troplab::hybrid::{
    barycentric_subdivision, dual_complex, hybrid_limit, pushforward_map, GluingFunction, IncidenceComplex,
    MonomialPathChart,
};
use troplab::limits::{classify_collapse_symbolic, Convention, MonomialEntry, SymbolicSiegelPath};
use troplab::scalar::{int, rat};
use troplab::siegel::{in_siegel_set, siegel_reduce, u0, SiegelPoint, SymplecticElement};
use troplab::tropical::WeightedMetricGraph;
use troplab::{Matrix, Rational};

const TOL: f64 = 1e-9;

fn pd_matrix(n: usize) -> impl Strategy<Value = Matrix<Rational>> {
    proptest::collection::vec(-3i64..=3, n * n).prop_map(move |v| {
        let a = Matrix::from_fn(n, n, |i, j| int(v[i * n + j]));
        a.transpose().mul(&a).add(&Matrix::identity(n))
    })
}

fn unimodular(n: usize) -> impl Strategy<Value = Matrix<i64>> {
    proptest::collection::vec((0..n, 0..n, -2i64..=2), 0..8).prop_map(move |ops| {
        let mut u = Matrix::<i64>::identity(n);
        for (i, j, q) in ops {
            if i != j {
                for r in 0..n {
                    let v = u[(r, i)] + q * u[(r, j)];
                    u[(r, i)] = v;
                }
            }
        }
        u
    })
}

fn exact_mu_sq(f: &QuadraticForm<Rational>) -> Rational {
    covering_radius_sq(f, TOL, DEFAULT_BUDGET).unwrap().exact().cloned().expect("exact in dimension <= 2")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_recomposes(m in (1usize..=4).prop_flat_map(pd_matrix)) {
        let jd = jacobi_decompose(&m).unwrap();
        prop_assert_eq!(jd.recompose(), m);
        prop_assert!(jd.d.iter().all(|d| *d > int(0)));
    }

    #[test]
    fn lll_is_a_unimodular_change_of_basis(m in (1usize..=4).prop_flat_map(pd_matrix)) {
        let f = QuadraticForm::new(m).unwrap();
        let r = lll_reduce(&f, &rat(3, 4)).unwrap();
        let det = r.u.det_exact();
        prop_assert!(det == int(1) || det == int(-1));
        prop_assert_eq!(&r.u.cast::<Rational>().congruence(f.gram()), r.reduced.gram());
        prop_assert_eq!(r.reduced.det(), f.det());
    }

    #[test]
    fn covering_radius_scales_and_is_basis_free(
        (m, u) in (1usize..=2).prop_flat_map(|n| (pd_matrix(n), unimodular(n))),
        c in 1i64..=9,
    ) {
        let f = QuadraticForm::new(m).unwrap();
        let mu = exact_mu_sq(&f);
        prop_assert_eq!(exact_mu_sq(&f.scaled(&int(c)).unwrap()), &mu * int(c));
        prop_assert_eq!(exact_mu_sq(&f.transformed(&u).unwrap()), mu);
    }

    #[test]
    fn rescaled_tori_have_diameter_one(m in (1usize..=2).prop_flat_map(pd_matrix), c in 1i64..=5) {
        let t = FlatTorus::new(QuadraticForm::new(m).unwrap());
        let r = rescale_to_diameter_one(&t, TOL).unwrap();
        prop_assert_eq!(exact_mu_sq(&r.gram), int(1));
        let scaled = FlatTorus::new(t.gram.scaled(&int(c)).unwrap());
        prop_assert_eq!(rescale_to_diameter_one(&scaled, TOL).unwrap().gram, r.gram);
    }

    #[test]
    fn equivalence_finds_planted_witnesses(
        (m, u) in (1usize..=3).prop_flat_map(|n| (pd_matrix(n), unimodular(n))),
    ) {
        let f = QuadraticForm::new(m).unwrap();
        let g = f.transformed(&u).unwrap();
        let w = is_equivalent(&f, &g).unwrap().expect("planted equivalence");
        prop_assert_eq!(&w.cast::<Rational>().congruence(f.gram()), g.gram());
    }
}

fn small_point() -> impl Strategy<Value = SiegelPoint<Rational>> {
    (
        proptest::collection::vec((-20i64..=20, 1i64..=7), 3),
        proptest::collection::vec(-2i64..=2, 4),
    )
        .prop_map(|(x, a)| {
            let xm = Matrix::from_rows(vec![
                vec![rat(x[0].0, x[0].1), rat(x[1].0, x[1].1)],
                vec![rat(x[1].0, x[1].1), rat(x[2].0, x[2].1)],
            ])
            .unwrap();
            let am = Matrix::from_fn(2, 2, |i, j| rat(a[i * 2 + j], 3));
            let y = am.transpose().mul(&am).add(&Matrix::diagonal(&[rat(1, 4), rat(1, 5)]));
            SiegelPoint::new(xm, QuadraticForm::new(y).unwrap()).unwrap()
        })
}

fn symplectic_form(g: usize) -> Matrix<i64> {
    Matrix::from_fn(2 * g, 2 * g, |i, j| {
        if j == i + g {
            1
        } else if i == j + g {
            -1
        } else {
            0
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn siegel_reduction_lands_in_the_siegel_set(z in small_point()) {
        let u = int(u0(2));
        let red = siegel_reduce(&z, &u, 200).unwrap();
        prop_assert!(red.success);
        prop_assert!(in_siegel_set(&red.point, &u));
        let gm = red.gamma.matrix();
        prop_assert_eq!(gm.transpose().mul(&symplectic_form(2)).mul(gm), symplectic_form(2));
        prop_assert_eq!(red.gamma.act(&z).unwrap(), red.point);
    }

    #[test]
    fn symplectic_action_composes(z in small_point(), s in proptest::collection::vec(-2i64..=2, 3)) {
        let t = SymplecticElement::translation(
            &Matrix::from_rows(vec![vec![s[0], s[1]], vec![s[1], s[2]]]).unwrap(),
        )
        .unwrap();
        let j = SymplecticElement::partial_inversion(2);
        let both = j.compose(&t);
        prop_assert_eq!(both.act(&z).unwrap(), j.act(&t.act(&z).unwrap()).unwrap());
    }

    #[test]
    fn collapse_limit_ignores_reparameterization(
        e in proptest::collection::vec(0i64..=3, 3),
        c in proptest::collection::vec(1i64..=5, 3),
        k in 1i64..=4,
    ) {
        let mut exps = e.clone();
        exps.sort_unstable();
        exps[2] += 1;
        let d: Vec<MonomialEntry<Rational>> = exps
            .iter()
            .zip(&c)
            .map(|(&e, &c)| MonomialEntry::new(int(c), int(e), Convention::SToInfinity))
            .collect();
        let path = SymbolicSiegelPath::diagonal(d);
        let Ok(lim) = classify_collapse_symbolic(&path, TOL) else { return Ok(()); };
        let re = classify_collapse_symbolic(&path.reparameterized(&int(k)), TOL).unwrap();
        prop_assert_eq!(re.limit.gram, lim.limit.gram);
        prop_assert_eq!(re.r, lim.r);
    }
}

fn graph() -> impl Strategy<Value = WeightedMetricGraph<Rational>> {
    (2usize..=5)
        .prop_flat_map(|nv| {
            (
                Just(nv),
                proptest::collection::vec(any::<prop::sample::Index>(), nv - 1),
                proptest::collection::vec((0..nv, 0..nv), 1..=4),
                proptest::collection::vec((1i64..=9, 1i64..=3), nv - 1 + 4),
            )
        })
        .prop_map(|(nv, parents, extra, lens)| {
            let mut edges: Vec<(i64, i64)> = (1..nv).map(|v| (parents[v - 1].index(v) as i64, v as i64)).collect();
            edges.extend(extra.iter().map(|&(u, v)| (u as i64, v as i64)));
            let edges = edges
                .into_iter()
                .zip(lens)
                .map(|((u, v), (p, q))| (u, v, rat(p, q)))
                .collect();
            WeightedMetricGraph::new((0..nv as i64).map(|i| (i, 1)).collect(), edges).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tropical_jacobian_scales_with_lengths(g in graph(), c in 1i64..=7) {
        let j = g.tropical_jacobian().unwrap().gram;
        let scaled = g.scaled(&int(c)).unwrap();
        prop_assert_eq!(scaled.tropical_jacobian().unwrap().gram, j.scaled(&int(c)).unwrap());
        prop_assert_eq!(scaled.diameter(), g.diameter() * int(c));
        prop_assert_eq!(g.rescale_to_diameter_one().unwrap().diameter(), int(1));
    }

    #[test]
    fn curve_limits_are_base_change_invariant(
        g in graph(),
        m in proptest::collection::vec(1u64..=6, 8),
        k in 1u64..=5,
    ) {
        let m: Vec<u64> = m.into_iter().take(g.edges().len()).collect();
        let km: Vec<u64> = m.iter().map(|x| x * k).collect();
        let f = CurveFamily::new(g.clone(), m).unwrap();
        let fk = CurveFamily::new(g, km).unwrap();
        prop_assert_eq!(curve_family_gh_limit(&f).unwrap(), curve_family_gh_limit(&fk).unwrap());
        let log = curve_family_hybrid_limit(&f, GluingFunction::Log).unwrap();
        prop_assert_eq!(&log, &curve_family_hybrid_limit(&fk, GluingFunction::Log).unwrap());
        let total = log.edges().iter().fold(int(0), |acc, e| acc + &e.length);
        prop_assert_eq!(total, int(1));
    }

    #[test]
    fn pushforwards_compose(
        x in proptest::collection::vec(0i64..=5, 3),
        m1 in proptest::collection::vec(1i64..=3, 9),
        m2 in proptest::collection::vec(0i64..=3, 6),
    ) {
        prop_assume!(x.iter().any(|&v| v > 0));
        prop_assume!((0..3).all(|j| m2[j] + m2[3 + j] > 0));
        let exps: Vec<Rational> = x.iter().map(|&v| int(v)).collect();
        let a = Matrix::from_fn(3, 3, |i, j| m1[i * 3 + j]);
        let b = Matrix::from_fn(2, 3, |i, j| m2[i * 3 + j]);
        let p = hybrid_limit(&MonomialPathChart::in_simplex(exps).unwrap(), GluingFunction::Log).unwrap().coords;
        let total = p.iter().fold(int(0), |acc, v| acc + v);
        prop_assert_eq!(total, int(1));
        let step = pushforward_map(&b, &pushforward_map(&a, &p).unwrap()).unwrap();
        prop_assert_eq!(step, pushforward_map(&b.mul(&a), &p).unwrap());
    }

    #[test]
    fn subdivision_keeps_euler_characteristic(
        n in 2usize..=5,
        raw in proptest::collection::vec(proptest::collection::vec(1usize..=5, 1..=3), 1..=4),
    ) {
        let strata: Vec<Vec<usize>> = raw
            .into_iter()
            .map(|s| {
                let mut s: Vec<usize> = s.into_iter().map(|i| (i - 1) % n + 1).collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        let inc = IncidenceComplex::generated_by(n, strata).unwrap();
        let c = dual_complex(&inc);
        let sd = barycentric_subdivision(&c).unwrap();
        prop_assert_eq!(sd.euler_characteristic(), c.euler_characteristic());
        prop_assert!(c.satisfies_face_identities());
        prop_assert!(sd.satisfies_face_identities());
    }
}
