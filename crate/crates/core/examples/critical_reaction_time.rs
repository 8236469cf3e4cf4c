use ringtraffic::stability::{critical_reaction_time, TauSearch};
use ringtraffic::ModelParams;

fn main() -> ringtraffic::Result<()> {
    let p = ModelParams::default();
    let search = TauSearch {
        tol: 1e-4,
        ..TauSearch::default()
    };
    for n in [10, 20, 30, 40, 50, 75, 100, 133] {
        let tau = critical_reaction_time(n, &p, &search)?;
        println!("N = {n:>3}: tau = {tau:.4} s");
    }
    Ok(())
}
