// Characteristic roots of the delayed ring, one Lambert W branch at a time.
use ringtraffic::stability::{characteristic_roots, max_growth_rate, BranchRange, JacobianSpec};
use ringtraffic::ModelParams;

fn main() -> ringtraffic::Result<()> {
    let p = ModelParams::default();
    let spec = JacobianSpec::new(50, &p)?;
    println!("c = {:.5}", spec.scale_c);
    let branches = BranchRange { lo: -3, hi: 3 };
    let d = spec.eigenvalues[1];
    println!("slowest ring mode d = {d:.5}");
    for delay in [0.25, 0.75] {
        println!("delay {delay} s");
        for (b, s) in branches
            .iter()
            .zip(characteristic_roots(d, delay, &branches)?)
        {
            println!("  branch {b:+}: s = {:+.4} {:+.4}i", s.re, s.im);
        }
    }
    println!("{:>6} {:>12}", "delay", "max Re s");
    for k in 0..=16 {
        let delay = k as f64 * 0.05;
        let v = max_growth_rate(50, delay, &p, &BranchRange::default())?;
        println!(
            "{delay:>6.2} {:>+12.4e}{}",
            v.max_real_part,
            if v.stable { "" } else { "  unstable" }
        );
    }
    Ok(())
}
