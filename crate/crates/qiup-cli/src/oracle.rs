//! `oracle-check`: sweeps the closed-form interferometer rates against
//! the exact two-photon state-vector model over a parameter grid and
//! fails if any rate disagrees beyond 1e-12.

use std::f64::consts::{PI, TAU};

use qiup_core::fock::{mz_network, su11_network, two_particle_network, zwm_network};
use qiup_core::interferometer::{
    mz_count_rate, su11_count_rate, two_particle_rates, zwm_count_rate, MzPort, PhaseSetting,
    Transmittance, ZwmPort,
};

use crate::{CliError, OracleArgs};

const TOLERANCE: f64 = 1e-12;

struct Tracker {
    name: &'static str,
    max_delta: f64,
}

impl Tracker {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            max_delta: 0.0,
        }
    }

    fn track(&mut self, closed_form: f64, oracle: f64) {
        let delta = (closed_form - oracle).abs();
        if delta > self.max_delta {
            self.max_delta = delta;
        }
    }
}

pub fn run(args: &OracleArgs) -> Result<(), CliError> {
    if args.grid == 0 {
        return Err(CliError::Validation(
            "--grid must have at least one point per axis".into(),
        ));
    }
    let n = args.grid;
    let magnitudes: Vec<f64> = if n == 1 {
        vec![0.5]
    } else {
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    };
    let phis: Vec<f64> = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
    let gammas = [0.0, 1.0, PI, 4.0];
    // Nudging one closed form proves the comparison has teeth.
    let bug = if args.inject_bug { 1e-9 } else { 0.0 };

    let mut mz = Tracker::new("mach-zehnder");
    let mut zwm = Tracker::new("induced-coherence");
    let mut su11 = Tracker::new("su11");
    let mut pair = Tracker::new("two-particle");

    let internal = |e: &dyn std::fmt::Display| CliError::Validation(e.to_string());
    for &m in &magnitudes {
        for &phi in &phis {
            for &gamma in &gammas {
                let t = Transmittance::new(m, gamma).map_err(|e| internal(&e))?;
                let phase = PhaseSetting::new(phi);

                let (network, ports) = mz_network(&t, phase);
                let state = network.build_state().map_err(|e| internal(&e))?;
                mz.track(
                    mz_count_rate(&t, phase, MzPort::A) + bug,
                    state.signal_rate(&ports.port_a),
                );
                mz.track(
                    mz_count_rate(&t, phase, MzPort::B),
                    state.signal_rate(&ports.port_b),
                );

                let (network, ports) = zwm_network(&t, phase);
                let state = network.build_state().map_err(|e| internal(&e))?;
                zwm.track(
                    zwm_count_rate(&t, phase, ZwmPort::S1),
                    state.signal_rate(&ports.signal_1),
                );
                zwm.track(
                    zwm_count_rate(&t, phase, ZwmPort::S2),
                    state.signal_rate(&ports.signal_2),
                );

                let (network, ports) = su11_network(&t, phase);
                let state = network.build_state().map_err(|e| internal(&e))?;
                su11.track(su11_count_rate(&t, phase), state.signal_rate(&ports.signal));

                let (network, ports) = two_particle_network(&t, phase);
                let state = network.build_state().map_err(|e| internal(&e))?;
                let rates = two_particle_rates(&t, phase);
                pair.track(rates.singles, state.signal_rate(&ports.signal_1));
                pair.track(rates.singles, state.signal_rate(&ports.signal_2));
                let closed_coincidence = (1.0 + m * m - 2.0 * m * (phi + gamma).cos()) / 8.0;
                pair.track(
                    closed_coincidence,
                    state.coincidence_rate(&ports.signal_1, &ports.idler_1),
                );
            }
        }
    }

    let trackers = [mz, zwm, su11, pair];
    for t in &trackers {
        println!(
            "oracle-check: {:<18} max |delta| = {:.3e}",
            t.name, t.max_delta
        );
    }
    let worst = trackers
        .iter()
        .max_by(|a, b| a.max_delta.total_cmp(&b.max_delta))
        .expect("four trackers");
    if worst.max_delta > TOLERANCE {
        return Err(CliError::OracleFailed(format!(
            "{} deviates from the state-vector model by {:.3e} (tolerance {TOLERANCE:e})",
            worst.name, worst.max_delta
        )));
    }
    println!(
        "oracle-check: PASS ({n}x{n} grid x {} object phases, tolerance {TOLERANCE:e})",
        gammas.len()
    );
    Ok(())
}
