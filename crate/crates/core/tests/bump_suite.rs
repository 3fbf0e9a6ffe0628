//! Profile-level contracts: plateau values, monotonicity certification,
//! blow-up behavior, ramp bounds, junction smoothness.

use hulllab_core::bump::{
    make_cutoffs, make_ramp, ramp_mu, CutoffSpec, LemmaGh, SawtoothSpec, SeriesWeights,
};
use hulllab_core::error::CoreError;
use std::f64::consts::{FRAC_PI_2, PI};

#[test]
fn cutoff_plateau_values() {
    let spec = CutoffSpec::default();
    let c = make_cutoffs(spec).unwrap();
    assert_eq!(c.beta.value(0.0), 0.0);
    assert_eq!(c.beta.value(spec.alpha3), 1.0);
    assert_eq!(c.beta.value(-spec.alpha3), 1.0);
    for phi in [-0.69f64, -0.3, 0.0, 0.42, 0.699] {
        assert_eq!(c.gamma.value(phi), phi, "gamma must be the identity inside alpha2");
    }
    assert_eq!(c.gamma.value(spec.alpha3), FRAC_PI_2);
    assert_eq!(c.gamma.value(-spec.alpha3), -FRAC_PI_2);
    assert_eq!(c.gamma.value(2.9), FRAC_PI_2);
    assert_eq!(c.chi.value(0.3), 1.0);
    assert_eq!(c.chi.value(spec.alpha), 0.0);
    assert_eq!(c.chi.value(spec.alpha + 2.0), 0.0);
}

#[test]
fn chi_blows_up() {
    let spec = CutoffSpec::default();
    let c = make_cutoffs(spec).unwrap();
    let v = c.chi.value(-spec.alpha + 1e-6);
    assert!(v > 1e3, "chi near the blow-up end: {v}");
    // increasing without bound as the argument decreases
    let mut prev = c.chi.value(-spec.alpha + 1e-2);
    for k in 3..=7 {
        let cur = c.chi.value(-spec.alpha + 10f64.powi(-k));
        assert!(cur > prev);
        prev = cur;
    }
}

#[test]
fn profiles_certify() {
    let c = make_cutoffs(CutoffSpec::default()).unwrap();
    c.beta.certify(1024).unwrap();
    c.gamma.certify(1024).unwrap();
    c.chi.certify(1024).unwrap();
}

#[test]
fn cutoff_spec_rejects_bad_ordering() {
    let bad = CutoffSpec {
        alpha2: 1.7, // above pi/2
        ..CutoffSpec::default()
    };
    assert!(matches!(
        make_cutoffs(bad),
        Err(CoreError::OrderingViolation { .. })
    ));
}

#[test]
fn junction_smoothness() {
    let spec = CutoffSpec::default();
    let c = make_cutoffs(spec).unwrap();
    for (profile, junctions) in [
        (&c.beta, vec![spec.alpha1, spec.alpha3, -spec.alpha1, -spec.alpha3]),
        (&c.gamma, vec![spec.alpha2, spec.alpha3, -spec.alpha2, -spec.alpha3]),
        (&c.chi, vec![spec.alpha2, spec.alpha, -spec.alpha2]),
    ] {
        for x0 in junctions {
            let (d1, d2) = profile.fd_junction_jump(x0, 1e-4);
            assert!(
                d1 < 1e-5 * (1.0 + profile.deriv(x0).abs()),
                "{} first-derivative jump {d1:.2e} at {x0}",
                profile.name
            );
            assert!(d2 < 1e-2, "{} second-derivative jump {d2:.2e} at {x0}", profile.name);
        }
    }
}

#[test]
fn ramp_bounds() {
    let delta = 0.37;
    let ramp = make_ramp(delta).unwrap();
    let mu = ramp_mu();
    assert_eq!(ramp.value(delta / 2.0), 0.0);
    assert_eq!(ramp.value(3.0 * delta), 1.0);
    let mut worst = 0.0f64;
    for i in 0..20000 {
        let t = 3.0 * delta * (i as f64 + 0.5) / 20000.0;
        worst = worst.max(ramp.deriv(t) - mu / delta);
        assert!(
            ramp.value(t) <= mu * t / delta + 1e-12,
            "chi_delta(t) <= mu t / delta violated at {t}"
        );
    }
    assert!(worst <= 1e-9, "derivative bound excess {worst}");
    assert!(matches!(make_ramp(-1.0), Err(CoreError::InvalidArgument(_))));
}

#[test]
fn weights_reject_non_decreasing() {
    let saw = SawtoothSpec::default();
    let mut w = SeriesWeights::dyadic(6, &saw);
    w.c[3] = w.c[2] * 1.5;
    assert!(matches!(
        LemmaGh::build(CutoffSpec::default(), saw, w),
        Err(CoreError::TailBound { .. })
    ));
}

#[test]
fn series_pair_plateau_and_window() {
    let gh = LemmaGh::with_defaults().unwrap();
    let saw = gh.saw;
    // g = 1 above phi3 for sampled theta
    for i in 0..20 {
        let th = -PI + 2.0 * PI * i as f64 / 20.0;
        assert_eq!(gh.g([th, saw.phi3 + 0.1]), 1.0);
    }
    // periodicity residual on a grid
    let per = saw.period();
    let mut worst = 0.0f64;
    for i in 0..40 {
        for j in 0..40 {
            let p = [-PI + i as f64 * 0.15, -1.0 + j as f64 * 0.08];
            worst = worst.max((gh.g([p[0] + per, p[1]]) - gh.g(p)).abs());
        }
    }
    assert!(worst < 1e-10, "periodicity {worst:.2e}");
    // h exceeds g at the W window midpoint
    let mid = [PI / 2.0, 0.5 * (saw.phi1_plus() + saw.phi2)];
    assert!(gh.h(mid) > gh.g(mid));
    // descriptor carries the construction constants
    let d = gh.describe();
    assert!(d["weights"]["truncation_order"].as_u64().unwrap() >= 4);
    assert!(d["uncovered_margin"].as_f64().unwrap() < 1e-6 + 2.1e-6);
}

#[test]
fn profile_descriptors_serialize() {
    let c = make_cutoffs(CutoffSpec::default()).unwrap();
    let json = serde_json::to_string(&c.beta.describe()).unwrap();
    assert!(json.contains("certified_intervals"));
    assert!(json.contains("even"));
}
