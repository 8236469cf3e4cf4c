// All 50 cars start in one lane; frustration spreads them over both.
use ringtraffic::metrics::{flow_rate, imbalance_series};
use ringtraffic::{run_two_lane, TwoLaneScenario};

fn main() -> ringtraffic::Result<()> {
    let seeds = 0..5u64;
    println!(
        "{:>5} {:>8} {:>8} {:>8} {:>10}",
        "seed", "dN(10)", "dN(30)", "dN(60)", "Q(60) veh/s"
    );
    for seed in seeds {
        let rec = run_two_lane(&TwoLaneScenario::load_balance(seed))?;
        let imb = imbalance_series(&rec)?;
        let at = |t: f64| imb[rec.sample_index_at(t).expect("inside run")].1;
        let q = flow_rate(&rec, 60.0, 500.0, 5.0)?;
        println!(
            "{seed:>5} {:>8} {:>8} {:>8} {q:>10.2}",
            at(10.0),
            at(30.0),
            at(60.0)
        );
    }
    Ok(())
}
