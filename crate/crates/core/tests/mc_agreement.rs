use cumruin::cl::ClKernel;
use cumruin::mc::{estimate_events, simulate_occupation, McConfig, RuinEvent, Surplus};
use cumruin::{classical_ruin_prob_cl, CramerLundbergParams};

const PATHS: u64 = 200_000;

fn model() -> CramerLundbergParams {
    CramerLundbergParams::new(2.0, 1.0, 1.0).unwrap()
}

#[test]
fn formulas_match_exact_paths_off_the_acceptance_grid() {
    let m = model();
    let (t, r, q) = (1.5, 0.3, 1.0);
    let events = [
        RuinEvent::Classical,
        RuinEvent::Cumulative { r },
        RuinEvent::ExponentialParisian { q },
        RuinEvent::CumulativeExpAllowance { q },
    ];
    for (i, x) in [0.0, 0.5].into_iter().enumerate() {
        let ker = ClKernel::new(m, x, t).unwrap();
        let exp = ker.exp_parisian_prob(q, t).unwrap();
        let expected = [
            classical_ruin_prob_cl(&m, x, t).unwrap(),
            ker.cum_parisian_prob(r, t).unwrap(),
            exp,
            exp,
        ];
        let est = estimate_events(
            &Surplus::CramerLundberg(m),
            x,
            t,
            &events,
            McConfig::new(PATHS, 77 + i as u64).unwrap(),
        )
        .unwrap();
        for (e, v) in est.iter().zip(expected) {
            assert!(
                e.z_score(v) < 4.0,
                "x={x} {}: MC {} vs {v} ({} SE)",
                e.estimator,
                e.probability,
                e.z_score(v)
            );
        }
    }
}

#[test]
fn parisian_estimate_sits_below_cumulative() {
    let m = model();
    let events = [
        RuinEvent::Parisian { r: 0.2 },
        RuinEvent::Cumulative { r: 0.2 },
    ];
    let est = estimate_events(
        &Surplus::CramerLundberg(m),
        1.0,
        2.0,
        &events,
        McConfig::new(50_000, 3).unwrap(),
    )
    .unwrap();
    assert!(est[0].hits <= est[1].hits);
    assert!(est[0].hits > 0);
}

#[test]
fn mean_occupation_matches_first_moment() {
    let m = model();
    let t = 1.0;
    let dist = ClKernel::new(m, 0.0, t)
        .unwrap()
        .distribution(t, 2047)
        .unwrap();
    let sample = simulate_occupation(
        &Surplus::CramerLundberg(m),
        0.0,
        t,
        100,
        McConfig::new(PATHS, 12).unwrap(),
    )
    .unwrap();
    let se = sample.mean_std_error();
    assert!(
        (sample.mean - dist.mean()).abs() < 3.0 * se,
        "MC {} vs {} (se {se})",
        sample.mean,
        dist.mean()
    );
}
