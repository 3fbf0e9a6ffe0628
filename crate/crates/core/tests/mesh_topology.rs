//! Connected-sum topology through exported triangulations: Euler
//! characteristics, orientability flags, boundary counts.

use hulllab_core::mesh::{mesh_chain, mesh_rp2_fundamental, mesh_splice};
use hulllab_core::surface::{chain_rp2, chain_tori, ChainSpec};

#[test]
fn rp2_fundamental_domain_characteristic() {
    // bare projective plane: chi = 1, non-orientable, closed
    let rp2 = hulllab_core::surface::build_rp2();
    let cap = (0.45 * std::f64::consts::PI).sin() * 0.999;
    let eval = |x: [f64; 3]| -> Option<Vec<f64>> {
        let (ci, params) = if x[1].abs() <= cap {
            (0usize, [x[2].atan2(x[0]), x[1].asin()])
        } else {
            (1usize, [x[1].atan2(x[0]), x[2].asin()])
        };
        Some(rp2.charts[ci].map.eval(params).coords().to_vec())
    };
    let m = mesh_rp2_fundamental(&eval, &|_| false, 48);
    assert_eq!(m.euler_characteristic(), 1);
    assert_eq!(m.boundary_components(), 0);
    assert!(!m.orientable(), "projective plane must be non-orientable");
}

#[test]
fn tori_chain_characteristics() {
    for m in 1..=3usize {
        let chain = chain_tori(ChainSpec::tori(m)).unwrap();
        let mesh = mesh_chain(&chain, false, 64);
        let chi = mesh.euler_characteristic();
        assert_eq!(
            chi,
            2 - 2 * m as i64,
            "chi(#_{m} T^2) = {} expected {}",
            chi,
            2 - 2 * m as i64
        );
        assert_eq!(mesh.boundary_components(), 0, "m = {m}");
        assert!(mesh.orientable(), "tori chain must be orientable (m = {m})");
    }
}

#[test]
fn rp2_chain_characteristics() {
    for m in 1..=3usize {
        let chain = chain_rp2(ChainSpec::rp2(m)).unwrap();
        let mesh = mesh_chain(&chain, true, 64);
        let chi = mesh.euler_characteristic();
        assert_eq!(
            chi,
            2 - m as i64,
            "chi(#_{m} RP^2) = {chi} expected {}",
            2 - m as i64
        );
        assert_eq!(mesh.boundary_components(), 0, "m = {m}");
        assert!(!mesh.orientable(), "rp2 chain must be non-orientable (m = {m})");
    }
}

#[test]
fn splice_mesh_keeps_chain_topology() {
    let chain = chain_tori(ChainSpec::tori(1)).unwrap();
    let disc = hulllab_core::surface::build_disc_delta(hulllab_core::bump::CutoffSpec::default())
        .unwrap();
    let gh = std::sync::Arc::new(hulllab_core::bump::LemmaGh::with_defaults().unwrap());
    let saw = gh.saw;
    let k = std::sync::Arc::new(hulllab_core::bump::SignFieldK::new(
        saw,
        hulllab_core::bump::sample_e1(&saw, 1000, 42),
    ));
    let f = std::sync::Arc::new(hulllab_core::bump::DiscFieldF::new(gh, k));
    let spliced = hulllab_core::surface::splice_disc(&chain, &disc, f, 1.0).unwrap();
    let mesh = mesh_splice(&chain, &spliced, 64);
    // the splice swaps a disc for a disc: chi(T^2) = 0, closed
    assert_eq!(mesh.euler_characteristic(), 0);
    assert_eq!(mesh.boundary_components(), 0);
}
