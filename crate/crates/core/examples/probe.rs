use lightcone::evolution::PropagatorPlan;
use lightcone::experiments::*;
use lightcone::hamiltonian::build_tfim;
use lightcone::lattice::{build_chain, Region};
use lightcone::quantum::{DenseOperator, PureState};
use std::time::Instant;

fn main() {
    faer::set_global_parallelism(faer::Par::Seq);
    let plan = PropagatorPlan::to_time(1.0).unwrap();

    // --- criterion 3 sizes: n = 10 scan ---
    let t0 = Instant::now();
    let g = build_chain(10, false).unwrap();
    let h = build_tfim(&g, 1.0, 1.0).unwrap();
    let t_values: Vec<f64> = (1..=20).map(|i| 0.25 * i as f64).collect();
    let grid = ScanGrid::new(vec![3, 4, 5, 6, 7, 8], t_values, Pauli::Z, Pauli::Z).unwrap();
    let opts = ScanOpts::new(plan);
    let table = lightcone_scan(&h, &grid, &opts).unwrap();
    println!("n=10 scan took {:?}", t0.elapsed());
    // log C vs L at t = 1.0 (index 3).
    let ti = 3;
    let pts: Vec<(f64, f64)> = table
        .l_values
        .iter()
        .enumerate()
        .map(|(li, &l)| (l as f64, table.values[ti][li].ln()))
        .collect();
    let fit = least_squares(&pts).unwrap();
    println!("t=1 log-linear: slope={:.4} r2={:.5}", fit.slope, fit.r_squared);
    println!("row t=1: {:?}", table.values[ti]);
    let lc_fit = fit_lightcone(&table, 0.1).unwrap();
    println!(
        "fit: v={:.4} xi={:.4} arrivals={:?} excluded={:?} monotone={}",
        lc_fit.v_est, lc_fit.xi_est, lc_fit.arrivals, lc_fit.excluded, lc_fit.monotone_arrivals
    );

    // --- criterion 4: n = 8 fit + truncation ---
    let t0 = Instant::now();
    let g8 = build_chain(8, false).unwrap();
    let h8 = build_tfim(&g8, 1.0, 1.0).unwrap();
    let t_values8: Vec<f64> = (1..=16).map(|i| 0.25 * i as f64).collect();
    let grid8 = ScanGrid::new(vec![3, 4, 5, 6, 7], t_values8, Pauli::Z, Pauli::Z).unwrap();
    let table8 = lightcone_scan(&h8, &grid8, &opts).unwrap();
    let fit8 = fit_lightcone(&table8, 0.1).unwrap();
    println!("n=8 fit: v={:.4} xi={:.4} ({:?})", fit8.v_est, fit8.xi_est, t0.elapsed());
    let a = Region::new(&g8, vec![0]).unwrap();
    let tr = truncation_scan(&h8, &a, &DenseOperator::pauli_z(0), 0.5, &[1, 2, 3, 4, 5, 6, 7], &plan).unwrap();
    println!("truncation errors at t=0.5: {:?}", tr.errors);
    let cut = fit8.v_est * 0.5 + 4.0 * fit8.xi_est;
    println!("threshold l > {:.3}", cut);
    for (li, &l) in tr.l_values.iter().enumerate() {
        if (l as f64) > cut {
            println!("  l={} err={:.3e} (must be < 1e-3)", l, tr.errors[li]);
        }
    }

    // --- criterion 5: n = 12 quench ---
    let t0 = Instant::now();
    let g12 = build_chain(12, false).unwrap();
    let h12 = build_tfim(&g12, 1.0, 1.0).unwrap();
    let t_values12: Vec<f64> = (1..=40).map(|i| 0.2 * i as f64).collect();
    let traj = correlation_spread(
        &h12,
        &PureState::plus_state(12),
        &DenseOperator::pauli_z(0),
        &DenseOperator::pauli_z(11),
        &t_values12,
        &plan,
    )
    .unwrap();
    println!("n=12 quench took {:?}", t0.elapsed());
    let guard = 0.5 * 11.0 / (2.0 * lc_fit.v_est);
    println!("quiet window t <= {:.3}", guard);
    let mut max_in_window: f64 = 0.0;
    let mut max_later: f64 = 0.0;
    for (i, &t) in t_values12.iter().enumerate() {
        let c = traj.connected[i].abs();
        if t <= guard { max_in_window = max_in_window.max(c); } else { max_later = max_later.max(c); }
    }
    println!("max |corr| in window = {:.3e}; max later = {:.3}", max_in_window, max_later);
    let peak_t: Vec<(f64, f64)> = t_values12.iter().zip(&traj.connected).map(|(&t, &c)| (t, c)).collect();
    println!("trajectory: {:?}", peak_t);
}
