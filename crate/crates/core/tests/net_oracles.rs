use std::sync::Arc;

use modloc::kernel::{CVector, Tolerances, C64};
use modloc::net::{Localization, LocalNet};
use modloc::rep::probes::spectral_gap_probe;
use modloc::rep::sphere::{SphereToyModel, SphereWedge};
use modloc::rep::trivial::TrivialModel;
use modloc::rep::{NetModel, RapidityModel};
use modloc::subspace::factor_classify;
use modloc::wedge::{Region, Wedge};

#[test]
fn rapidity_wedge_is_consistent_and_dual() {
    let net = LocalNet::new(Arc::new(RapidityModel::new(1.0, 64).unwrap()));
    let w1 = Wedge::standard(2);
    assert!(net.wedge_consistency(&w1).unwrap() <= net.tolerances().rank);
    assert!(net.duality_residual(&w1).unwrap() < 1e-9);
    assert!(net.duality_residual(&w1.translated(&[0.3, 0.7])).unwrap() < 1e-9);
}

#[test]
fn rapidity_modular_spectrum_avoids_one_and_approaches_it() {
    let tol = Tolerances::default();
    let gaps: Vec<f64> = [32, 64, 128]
        .into_iter()
        .map(|n| {
            let m = RapidityModel::new(1.0, n).unwrap();
            let r = spectral_gap_probe(&m.reference_modular_data().unwrap(), tol.spec);
            assert_eq!(r.unit_eigenspace_dim, 0, "N={n}");
            r.min_gap
        })
        .collect();
    assert!(gaps[1] < gaps[0] && gaps[2] < gaps[1], "{gaps:?}");
}

#[test]
fn sphere_toy_structure() {
    let model = Arc::new(SphereToyModel::new(1, 1.0, Tolerances::default()).unwrap());
    let net = LocalNet::new(model.clone());
    let w0 = SphereWedge::reference();
    assert!(net.duality_residual(&w0).unwrap() <= 1e-12);
    let k = net.wedge_space(&w0).unwrap();
    assert_eq!(k.real_dim(), 3);
    let f = factor_classify(&k);
    assert!(!f.factor);
    assert_eq!(f.center_real_dim, 1);
    let meet = net.space(&Localization::Meet(SphereWedge::coordinate_hemispheres())).unwrap();
    assert_eq!(meet.real_dim(), 0);
    assert_eq!(model.default_family().len(), 6);
}

#[test]
fn trivial_control_meet_is_the_real_line() {
    let model = Arc::new(TrivialModel::new(Tolerances::default()));
    let net = LocalNet::new(model.clone());
    let meet = net.space(&Localization::Meet(model.default_family())).unwrap();
    assert_eq!(meet.real_dim(), 1);
    assert!(meet.contains(&CVector::from_element(1, C64::new(1.0, 0.0))));
    assert!(!meet.contains(&CVector::from_element(1, C64::new(0.0, 1.0))));
}

#[test]
fn spacelike_double_cones_are_local() {
    let net = LocalNet::new(Arc::new(RapidityModel::new(1.0, 32).unwrap()));
    let left = Region::double_cone_2d([0.0, -2.0], [0.0, -1.0]);
    let right = Region::double_cone_2d([0.0, 1.0], [0.0, 2.0]);
    let l = net.locality(&left, &right).unwrap().expect("separated by a wedge");
    assert!(l.residual <= net.tolerances().rank);
    let overlapping = Region::double_cone_2d([0.0, -1.5], [0.0, 1.0]);
    assert!(net.locality(&left, &overlapping).unwrap().is_none());
}

#[test]
fn concurrent_cache_misses_agree() {
    let net = LocalNet::new(Arc::new(RapidityModel::new(1.0, 32).unwrap()));
    let w = Wedge::standard(2).translated(&[0.0, 0.5]);
    let spaces: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..4).map(|_| s.spawn(|| net.wedge_space(&w).unwrap())).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for k in &spaces[1..] {
        assert_eq!(k.real_basis(), spaces[0].real_basis());
    }
    let fresh = LocalNet::new(Arc::new(RapidityModel::new(1.0, 32).unwrap()));
    assert_eq!(fresh.wedge_space(&w).unwrap().real_basis(), spaces[0].real_basis());
}
