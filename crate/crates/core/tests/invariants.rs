//! Cross-module invariants that need more than one module to check.

use cavity_core::branches::{
    branch_state, conditional_steady_superposition, post_emission_collapse, special_state, Branch, Sign,
};
use cavity_core::correlations::{hft_approx, hft_from_branches, hft_numeric, QuadratureSpec};
use cavity_core::dynamics::{integrate_master, integrate_master_with, semiclassical_steady_state, SystemParams};
use cavity_core::entanglement::collapse_functions;
use cavity_core::hilbert::{build_operators, SpaceSpec, StateVector, GROUND};
use cavity_core::trajectories::{ensemble_density, run_ensemble, StepPlan, TrajectoryResult};
use nalgebra::DMatrix;
use cavity_core::C64;

fn observable_error(batch: &[TrajectoryResult], exact: &[(f64, f64, f64)], pe: &DMatrix<C64>, n: &DMatrix<C64>) -> f64 {
    let rhos = ensemble_density(batch).unwrap();
    let mut sq = 0.0;
    for ((_, rho), (_, e_pe, e_n)) in rhos.iter().zip(exact).skip(1) {
        let m = rho.matrix();
        let pe_hat = (m * pe).trace().re;
        let n_hat = (m * n).trace().re;
        sq += (pe_hat - e_pe).powi(2) + ((n_hat - e_n) / e_n.max(1.0)).powi(2);
    }
    sq.sqrt()
}

#[test]
fn ensemble_error_shrinks_as_inverse_sqrt_n() {
    let p = SystemParams::figure1();
    let s = SpaceSpec::new(45).unwrap();
    let ops = build_operators(s);
    let psi0 = StateVector::basis(s, GROUND, 0);
    let plan = StepPlan { t_final: 5.0, dt: 0.002, stride: 250 };
    let me = integrate_master(&psi0.projector(), &p, 5.0, 0.002, 250).unwrap();
    let exact: Vec<(f64, f64, f64)> = me
        .samples
        .iter()
        .map(|(t, r)| {
            let m = r.matrix();
            (*t, (m * ops.excited_projector()).trace().re, (m * &ops.number.matrix).trace().re)
        })
        .collect();

    let all = run_ensemble(&psi0, &p, &plan, 77, 1600).unwrap();
    let pe = ops.excited_projector();
    // four independent batches of 100 against four of 400
    let small: f64 = (0..4).map(|k| observable_error(&all[k * 100..(k + 1) * 100], &exact, &pe, &ops.number.matrix)).sum::<f64>() / 4.0;
    let large: f64 = (0..4).map(|k| observable_error(&all[k * 400..(k + 1) * 400], &exact, &pe, &ops.number.matrix)).sum::<f64>() / 4.0;
    let ratio = small / large;
    assert!((1.3..3.2).contains(&ratio), "error ratio {ratio} (N=100: {small}, N=400: {large})");
}

#[test]
fn rabi_terms_of_correlation_and_entropy_have_opposite_signs() {
    let p = SystemParams::figure1();
    let s = SpaceSpec::default();
    let ss = semiclassical_steady_state(&p).unwrap();
    let ts: Vec<f64> = (0..=400).map(|k| 0.005 * k as f64).collect();

    // oscillatory part of h: coherent minus incoherent branch combination
    let coh = hft_from_branches(&ts, &p, QuadratureSpec::default(), true, s).unwrap();
    let inc = hft_from_branches(&ts, &p, QuadratureSpec::default(), false, s).unwrap();
    let h_osc: Vec<f64> = coh.values.iter().zip(&inc.values).map(|(a, b)| a - b).collect();
    let a_rabi = hft_approx(&ts, &p, true).unwrap();
    let a_flat = hft_approx(&ts, &p, false).unwrap();
    let h_osc_approx: Vec<f64> = a_rabi.values.iter().zip(&a_flat.values).map(|(a, b)| a - b).collect();

    // oscillatory part of the short-time entropy
    let e_osc: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let u = (-0.5 * (p.g * t).powi(2)).exp();
            -collapse_functions(u).unwrap().f2 * (2.0 * p.g * ss.r_ss * t).sin() * p.g * t / ss.r_ss
        })
        .collect();

    let first_extremum = |y: &[f64]| {
        (1..y.len() - 1)
            .find(|&i| (y[i] - y[i - 1]) * (y[i + 1] - y[i]) <= 0.0 && y[i].abs() > 1e-6)
            .map(|i| y[i])
            .unwrap()
    };
    assert!(first_extremum(&h_osc) > 0.0);
    assert!(first_extremum(&h_osc_approx) > 0.0);
    assert!(first_extremum(&e_osc) < 0.0);
}

#[test]
fn correlation_keeps_growing_after_collapse() {
    let p = SystemParams::figure1();
    let s = SpaceSpec::default();
    // window between the collapse time and min(6, 1/2κ)
    let t_end = 6f64.min(1.0 / (2.0 * p.kappa));
    let ts: Vec<f64> = (0..=40).map(|k| 3.0 + (t_end - 3.0) * k as f64 / 40.0).collect();
    let branches = hft_from_branches(&ts, &p, QuadratureSpec::default(), true, s).unwrap();
    for w in branches.values.windows(2) {
        assert!(w[1] >= w[0] - 1e-3, "{:?}", branches.values);
    }
    let eq5 = conditional_steady_superposition(&p, 0.0, s).unwrap();
    let numeric = hft_numeric(&eq5.projector(), &p, QuadratureSpec::default(), t_end, 0.002, 50).unwrap();
    let window: Vec<f64> = numeric.taus.iter().zip(&numeric.values).filter(|(t, _)| **t >= 3.0).map(|(_, v)| *v).collect();
    assert!(window.len() > 5);
    for w in window.windows(2) {
        assert!(w[1] >= w[0] - 1e-3, "{window:?}");
    }
    assert!(window[window.len() - 1] > window[0]);
}

#[test]
fn upper_branch_tracks_master_equation_at_short_times() {
    let p = SystemParams::figure1();
    let s = SpaceSpec::default();
    let ss = semiclassical_steady_state(&p).unwrap();
    let upper = special_state(Sign::Plus, ss.r_ss, -ss.phi_ss, s).unwrap();
    let collapsed = post_emission_collapse(&upper).unwrap();
    let mut worst: f64 = 1.0;
    integrate_master_with(&collapsed.projector(), &p, 1.0, 0.002, 25, |t, rho| {
        worst = worst.min(rho.fidelity_with_pure(&branch_state(Branch::Upper, t, &p, s)?)?);
        Ok(())
    })
    .unwrap();
    assert!(worst >= 0.95, "worst fidelity {worst}");
}
