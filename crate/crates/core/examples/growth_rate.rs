// Per-cycle growth of the perturbation, measured on one car's velocity.
use ringtraffic::metrics::{cyclic_amplitudes, fit_growth_rate, CycleDetection};
use ringtraffic::stability::{max_growth_rate, ring_wave_period, BranchRange};
use ringtraffic::{run_single_lane, ModelParams, SingleLaneScenario};

fn main() -> ringtraffic::Result<()> {
    let p = ModelParams::default();
    let dt = 0.01;
    let period = ring_wave_period(50, &p)?;
    let det = CycleDetection::for_params(&p).with_separation((0.75 * period / dt).round() as usize);
    println!("ring wave period {period:.2} s");
    for delay in [0.0, 0.5, 0.7, 0.75] {
        let rec = run_single_lane(&SingleLaneScenario::perturbed_ring(delay, dt, 1200.0))?;
        let v = &rec.probe(0).expect("probed").velocities;
        let lsa = max_growth_rate(50, delay, &p, &BranchRange::default())?;
        match cyclic_amplitudes(v, p.ring_velocity(50), &det).and_then(|f| fit_growth_rate(&f)) {
            Ok(fit) => println!(
                "delay {delay:.2}: k = {:+.3} over {} cycles, linear rate {:+.2e} /s",
                fit.k,
                fit.cycles.len(),
                lsa.max_real_part
            ),
            Err(e) => println!("delay {delay:.2}: {e}"),
        }
    }
    Ok(())
}
