use davlab_core::construction::params::params_with_radius;
use davlab_core::construction::{
    construct_with, verify_weight_set, ConstructOptions, Tier, Verdict,
};
use davlab_core::construction::verify::StageCover;
use davlab_core::{davenport_constant, Error, Modulus, WeightSet};

#[test]
fn goodness_pass_implies_condition_and_exact() {
    let mut passes = 0;
    for p in [43u64, 47, 53, 59] {
        for radius in [2u64, 3] {
            for seed in 0..3 {
                let params = params_with_radius(p, 4, radius, seed).unwrap();
                let options = ConstructOptions {
                    tier: Some(Tier::GoodnessFull),
                    ..ConstructOptions::default()
                };
                let cert = match construct_with(&params, &options) {
                    Ok(c) => c,
                    Err(Error::CoverFailure { .. }) => continue,
                    Err(e) => panic!("{e}"),
                };
                let weights = WeightSet::new(Modulus::new(p).unwrap(), cert.weights.clone()).unwrap();
                let stages: Vec<StageCover> = cert
                    .stages
                    .iter()
                    .map(|s| StageCover {
                        d: s.d,
                        xs: s.xs.clone(),
                    })
                    .collect();
                let condition =
                    verify_weight_set(&weights, &params, &stages, Tier::ConditionExact).unwrap();
                let exact = verify_weight_set(&weights, &params, &stages, Tier::Exact).unwrap();
                if cert.verification.verdict == Verdict::Pass {
                    passes += 1;
                    assert_eq!(condition.verdict, Verdict::Pass, "p={p} L={radius} seed={seed}");
                }
                if condition.verdict == Verdict::Pass {
                    assert_eq!(exact.verdict, Verdict::Pass, "p={p} L={radius} seed={seed}");
                }
                if exact.verdict == Verdict::Pass {
                    let d = davenport_constant(&weights, p).value.exact().unwrap();
                    assert!(d <= 4, "p={p}: D_A = {d}");
                }
            }
        }
    }
    assert!(passes > 0);
}
