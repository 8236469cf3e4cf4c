// One driver with twice the sensitivity among 49 ordinary ones.
use ringtraffic::lane_change::{AGGRESSIVE_VEHICLE, CONTROL_VEHICLE};
use ringtraffic::metrics::{lane_change_counts, mean_velocity};
use ringtraffic::{run_two_lane, TwoLaneScenario};

fn main() -> ringtraffic::Result<()> {
    let (mut aggr, mut ctrl, mut adv) = (0.0, 0.0, 0.0);
    let replicas = 10;
    for seed in 0..replicas {
        let rec = run_two_lane(&TwoLaneScenario::aggressive(seed))?;
        let counts = lane_change_counts(&rec);
        let va = mean_velocity(rec.probe(AGGRESSIVE_VEHICLE).expect("probed"))?;
        let vc = mean_velocity(rec.probe(CONTROL_VEHICLE).expect("probed"))?;
        println!(
            "seed {seed}: changes {} vs {}, mean speed {va:.3} vs {vc:.3} m/s",
            counts[AGGRESSIVE_VEHICLE], counts[CONTROL_VEHICLE]
        );
        aggr += counts[AGGRESSIVE_VEHICLE] as f64;
        ctrl += counts[CONTROL_VEHICLE] as f64;
        adv += va / vc - 1.0;
    }
    let n = replicas as f64;
    println!(
        "mean changes {:.2} vs {:.2}, speed advantage {:.2}%",
        aggr / n,
        ctrl / n,
        100.0 * adv / n
    );
    Ok(())
}
