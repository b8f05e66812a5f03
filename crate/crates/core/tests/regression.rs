//! Values with no closed form, frozen from the first run on fixed seeds.

use std::f64::consts::PI;

use hall_core::conductance::{
    instantaneous_identity_check, kubo_streda, sigma_e1, sigma_e2, BoundaryFilter, SwitchedSystem,
    TraceWindow,
};
use hall_core::operators::{
    cauchy_potential, harper_hamiltonian, restrict_half_plane, DisorderConfig, EdgeGeometry,
};
use hall_core::spectral::{dynamical_localization_bound, localization_minima, spectral_projection};
use hall_core::{eigendecompose, init_sequential_kernels, EnergySet, LatticeBox, SmoothStep};

fn close(got: f64, frozen: f64) -> bool {
    (got - frozen).abs() <= 1e-9 * frozen.abs().max(1e-12)
}

#[test]
fn clean_gap_localization_bound() {
    init_sequential_kernels();
    let bx = LatticeBox::centered(6).unwrap();
    let spec = eigendecompose(&harper_hamiltonian(bx, 2.0 * PI / 3.0)).unwrap();
    let d = dynamical_localization_bound(&spec, (-1.9, -0.8), 1.0, 2.0, &[0.0, 1.0, 2.0, 4.0]);
    assert!(close(d, 1.07839835400841147e8), "{d:.17e}");
}

#[test]
fn strong_disorder_minima_total() {
    init_sequential_kernels();
    let bx = LatticeBox::centered(6).unwrap();
    let v = cauchy_potential(
        bx,
        &DisorderConfig {
            alpha: 8.0,
            seed: 3,
        },
    );
    let spec = eigendecompose(
        &harper_hamiltonian(bx, 2.0 * PI / 3.0)
            .plus_diagonal(&v)
            .unwrap(),
    )
    .unwrap();
    let m = localization_minima(&spec, (-1.0, 1.0));
    assert_eq!(m.len(), 8);
    let total: f64 = m.iter().map(|m| m.m).sum();
    assert!(close(total, 1.23502071249059875e-1), "{total:.17e}");
}

struct Disordered {
    edge: SwitchedSystem,
    bulk: SwitchedSystem,
    rho: SmoothStep,
    sigma_b: f64,
}

fn disordered() -> Disordered {
    init_sequential_kernels();
    let bx = LatticeBox::new((-10, 9), (-10, 7)).unwrap();
    let v = cauchy_potential(
        bx,
        &DisorderConfig {
            alpha: 4.0,
            seed: 11,
        },
    );
    let hb = harper_hamiltonian(bx, 2.0 * PI / 3.0)
        .plus_diagonal(&v)
        .unwrap();
    let (ha, _) = restrict_half_plane(&hb, &EdgeGeometry::within(6, &bx).unwrap()).unwrap();
    let edge = SwitchedSystem::new(ha).unwrap();
    let bulk = SwitchedSystem::new(hb).unwrap();
    let rho = SmoothStep::bump(-1.9, -0.8).unwrap();
    let lam0 = bulk.spec.gap_midpoint(-1.9, -0.8);
    let p = spectral_projection(&bulk.spec, &EnergySet::below(lam0)).unwrap();
    let sigma_b = kubo_streda(&p, &bulk.l1, &bulk.l2, TraceWindow::at_crossing(4))
        .unwrap()
        .value;
    Disordered {
        edge,
        bulk,
        rho,
        sigma_b,
    }
}

#[test]
fn identity_gap_curve() {
    let d = disordered();
    assert!(
        close(d.sigma_b, -4.39149982246265088e-6),
        "{:.17e}",
        d.sigma_b
    );
    let frozen = [
        (0.0, 1.74759420111273919e-5, 3.66870632990556542e-3),
        (1.0, 1.70422128153060581e-5, 1.79794235198139224e-3),
        (2.0, 1.10938105530667200e-6, 2.40961308450587117e-3),
        (4.0, 2.25745009796344902e-5, 1.81753672867724286e-4),
    ];
    for (t, gap, lhs) in frozen {
        let c = instantaneous_identity_check(
            &d.edge,
            &d.bulk,
            &d.rho,
            d.sigma_b,
            t,
            BoundaryFilter::default(),
        )
        .unwrap();
        assert!(close(c.gap, gap), "t={t}: {:.17e}", c.gap);
        assert!(close(c.lhs, lhs), "t={t}: {:.17e}", c.lhs);
        // the correction carries most of the current
        assert!(c.gap < 0.05 * c.lhs.abs().max(1e-3));
    }
}

#[test]
fn averaged_current_trend() {
    let d = disordered();
    let frozen = [
        (1e-6, 3.66871602953291152e-3),
        (10.0, 1.22645804331613403e-3),
        (100.0, 6.46430312190389173e-3),
        (200.0, 4.19548078352463192e-4),
    ];
    for (tt, v) in frozen {
        let got = sigma_e2(&d.edge, &d.rho, tt).unwrap().value;
        assert!(close(got, v), "T={tt}: {got:.17e}");
    }
    let start = (frozen[0].1 - d.sigma_b).abs();
    let end = (frozen[3].1 - d.sigma_b).abs();
    assert!(end < start);
}

#[test]
fn corrected_edge_conductance() {
    let d = disordered();
    let e1 = sigma_e1(&d.edge, &d.bulk, &d.rho, BoundaryFilter::default()).unwrap();
    assert!(close(e1.value, 1.30844421886646030e-5), "{:.17e}", e1.value);
    assert_eq!(e1.component("levels_used"), Some(11.0));
    assert_eq!(e1.component("levels_skipped"), Some(17.0));
    let raw = e1.component("edge_current").unwrap();
    assert!((e1.value - d.sigma_b).abs() < (raw - d.sigma_b).abs());
}
