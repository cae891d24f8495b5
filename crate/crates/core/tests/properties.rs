use cumruin::cl::ClKernel;
use cumruin::{
    cum_parisian_prob_bm, cum_parisian_prob_cl, ruin_prob_bm, BrownianParams, CramerLundbergParams,
};
use proptest::prelude::*;

fn cl_model() -> impl Strategy<Value = CramerLundbergParams> {
    (0.5f64..3.0, 0.2f64..2.0, 0.5f64..2.0)
        .prop_map(|(c, l, a)| CramerLundbergParams::new(c, l, a).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cl_cumulative_is_monotone_and_dominated(m in cl_model(), x in 0.0f64..2.0, r in 0.05f64..0.8) {
        let t = 1.0;
        let ker = ClKernel::new(m, x, t).unwrap();
        let p = ker.cum_parisian_prob(r, t).unwrap();
        let classical = 1.0 - ker.survival_x(t);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(p <= classical + 1e-12);
        prop_assert!(ker.cum_parisian_prob(r * 1.2, t).unwrap() <= p + 1e-12);
        prop_assert!(cum_parisian_prob_cl(&m, x + 0.3, r, t).unwrap() <= p + 1e-10);
        prop_assert!(cum_parisian_prob_cl(&m, x, r, t * 1.5).unwrap() >= p - 1e-10);
    }

    #[test]
    fn cl_exponential_parisian_is_monotone_in_q(m in cl_model(), x in 0.0f64..2.0, q in 0.1f64..5.0) {
        let ker = ClKernel::new(m, x, 1.0).unwrap();
        let p = ker.exp_parisian_prob(q, 1.0).unwrap();
        prop_assert!(p <= ker.exp_parisian_prob(q * 1.5, 1.0).unwrap() + 1e-12);
        prop_assert!(p <= 1.0 - ker.survival_x(1.0) + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn bm_cumulative_is_monotone_and_dominated(c in 0.2f64..2.0, sigma in 0.5f64..2.0, x in 0.05f64..1.0, r in 0.05f64..0.5) {
        let m = BrownianParams::new(c, sigma).unwrap();
        let t = 1.0;
        let p = cum_parisian_prob_bm(&m, x, r, t).unwrap();
        prop_assert!(p <= ruin_prob_bm(&m, x, t).unwrap() + 1e-10);
        prop_assert!(cum_parisian_prob_bm(&m, x, r * 1.3, t).unwrap() <= p + 1e-10);
        prop_assert!(cum_parisian_prob_bm(&m, x * 1.5, r, t).unwrap() <= p + 1e-10);
        prop_assert!(cum_parisian_prob_bm(&m, x, r, t * 1.4).unwrap() >= p - 1e-10);
    }
}
