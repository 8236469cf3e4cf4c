// A 1 m nudge on a ring of 50 cars, with and without a reaction delay.
use ringtraffic::metrics::{flow_rate, mean_velocity};
use ringtraffic::{run_single_lane, SingleLaneScenario};

fn main() -> ringtraffic::Result<()> {
    for delay in [0.0, 0.5, 0.75] {
        let sc = SingleLaneScenario::perturbed_ring(delay, 0.01, 600.0);
        let rec = run_single_lane(&sc)?;
        let probe = rec.probe(0).expect("vehicle 0 is probed");
        let (lo, hi) = probe
            .velocities
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let t = rec.termination.time();
        let q = flow_rate(&rec, t.min(300.0), 500.0, 18.63)?;
        println!(
            "delay {delay:.2} s: {} at {t:.1} s, v in [{lo:.3}, {hi:.3}] (mean {:.3}) m/s, flow {q:.3} veh/s",
            rec.termination.reason(),
            mean_velocity(probe)?
        );
    }
    Ok(())
}
