mod common;

use common::dense::{self, Optics};
use eraser::dynamics::{open_shutters, prepare, remove_plate, PreparationConfig};
use eraser::hilbert::{Cavity, Wall};
use eraser::optics::{diffracted_amplitude, Slit};
use eraser::{analytic_pattern, pattern, BranchState, Error, MarkerLabel, ScenarioId, SlitGeometry};
use num_complex::Complex64;

fn prep(laser_on: bool) -> BranchState {
    prepare(&PreparationConfig { laser_on, plate_in: true, geom: SlitGeometry::default() }).unwrap()
}

#[test]
fn laser_off_shows_cross_term() {
    let g = SlitGeometry::default();
    let p = pattern(&prep(false));
    assert!(p.max_abs_diff(&analytic_pattern(ScenarioId::I, &g)).unwrap() < 1e-12);
    assert!((p.integral() - 1.0).abs() < 1e-12);
}

#[test]
fn laser_on_tags_paths_evenly() {
    let g = SlitGeometry::default();
    let s = prep(true);
    let labels: Vec<_> = s.labels().collect();
    assert_eq!(labels, vec![MarkerLabel::new(Cavity::C1, Wall::G), MarkerLabel::new(Cavity::C2, Wall::G)]);
    for (_, amp) in s.branches() {
        assert!((amp.norm_sqr() - 0.5).abs() < 1e-12);
    }
    assert!(pattern(&s).max_abs_diff(&analytic_pattern(ScenarioId::IIa, &g)).unwrap() < 1e-12);
}

#[test]
fn shutters_route_symmetric_part_to_wall() {
    let g = SlitGeometry::default();
    let s = open_shutters(&prep(true)).unwrap();
    let (p1, p2) = (diffracted_amplitude(&g, Slit::One), diffracted_amplitude(&g, Slit::Two));
    for (label, sign) in [(MarkerLabel::new(Cavity::Vac, Wall::E), 1.0), (MarkerLabel::new(Cavity::Minus, Wall::G), -1.0)] {
        let amp = s.branch(label).unwrap();
        for i in 0..g.grid().n_bins() {
            // (1/sqrt2) psi_pm with psi_pm = (psi1 pm psi2)/sqrt2
            let expect = 0.5 * (p1.values()[i] + p2.values()[i] * sign);
            assert!((amp.values()[i] - expect).norm() < 1e-12);
        }
    }
    assert_eq!(s.branches().len(), 2);
    assert!(pattern(&s).max_abs_diff(&pattern(&prep(true))).unwrap() < 1e-12);
}

#[test]
fn shutters_match_dense_map() {
    let optics = Optics::default_with_bins(2048);
    let expect = optics.prepare_on().apply(&dense::shutter_matrix());
    let got = dense::from_branch_state(&open_shutters(&prep(true)).unwrap());
    assert!(dense::max_abs_diff(&got, &expect) < 1e-12);
}

#[test]
fn antisymmetric_photon_ignores_shutters() {
    let g = SlitGeometry::default();
    let minus = BranchState::single(MarkerLabel::new(Cavity::Minus, Wall::G), diffracted_amplitude(&g, Slit::One));
    let out = open_shutters(&minus).unwrap();
    assert_eq!(dense::max_abs_diff(&dense::from_branch_state(&out), &dense::from_branch_state(&minus)), 0.0);
}

#[test]
fn shutters_twice_is_an_order_error() {
    let s = open_shutters(&prep(true)).unwrap();
    assert!(matches!(open_shutters(&s), Err(Error::ProtocolOrder(_))));
    assert!(open_shutters(&prep(false)).is_err());
}

#[test]
fn plate_removal_restores_fringes() {
    let g = SlitGeometry::default();
    let erased = remove_plate(&prep(true)).unwrap();
    assert_eq!(erased.labels().collect::<Vec<_>>(), vec![MarkerLabel::new(Cavity::T, Wall::G)]);
    let p = pattern(&erased);
    assert!(p.max_abs_diff(&pattern(&prep(false))).unwrap() < 1e-12);
    assert!(p.max_abs_diff(&analytic_pattern(ScenarioId::IVa, &g)).unwrap() < 1e-12);
    // (1/2)(|psi1|^2 + |psi2|^2 + 2 Re psi1* psi2) up to the window normalization
    let (p1, p2) = (diffracted_amplitude(&g, Slit::One), diffracted_amplitude(&g, Slit::Two));
    let z = 1.0 + p1.inner(&p2).unwrap().re;
    for (i, v) in p.values().iter().enumerate() {
        let (a, b) = (p1.values()[i], p2.values()[i]);
        let expect = 0.5 * (a.norm_sqr() + b.norm_sqr() + 2.0 * (a.conj() * b).re) / z;
        assert!((v - expect).abs() < 1e-12);
    }
}

#[test]
fn plate_removal_is_idempotent() {
    let once = remove_plate(&prep(true)).unwrap();
    let twice = remove_plate(&once).unwrap();
    assert_eq!(dense::max_abs_diff(&dense::from_branch_state(&once), &dense::from_branch_state(&twice)), 0.0);
}

#[test]
fn plate_out_at_emission_equals_tag_then_remove() {
    let g = SlitGeometry::default();
    let out = prepare(&PreparationConfig { laser_on: true, plate_in: false, geom: g }).unwrap();
    let later = remove_plate(&prep(true)).unwrap();
    assert!(dense::max_abs_diff(&dense::from_branch_state(&out), &dense::from_branch_state(&later)) < 1e-15);
}

#[test]
fn plate_removal_after_shutters_is_rejected() {
    let s = open_shutters(&prep(true)).unwrap();
    assert!(matches!(remove_plate(&s), Err(Error::ProtocolOrder(_))));
}

#[test]
fn removal_merges_orthogonal_tags() {
    let g = SlitGeometry::default();
    let p1 = diffracted_amplitude(&g, Slit::One);
    let a = BranchState::single(MarkerLabel::new(Cavity::C1, Wall::G), p1.clone());
    let b = BranchState::single(MarkerLabel::new(Cavity::C2, Wall::G), p1.clone());
    let (ma, mb) = (remove_plate(&a).unwrap(), remove_plate(&b).unwrap());
    let overlap = eraser::hilbert::inner_product(&ma, &mb).unwrap();
    assert!((overlap - Complex64::new(1.0, 0.0)).norm() < 1e-12);
}
