use ringtraffic::model::{
    fundamental_diagram_summary, fundamental_diagram_table, per_hour, per_km,
    DEFAULT_RHO_RESOLUTION,
};
use ringtraffic::ModelParams;

fn main() -> ringtraffic::Result<()> {
    let p = ModelParams::default();
    let s = fundamental_diagram_summary(&p, DEFAULT_RHO_RESOLUTION)?;
    println!(
        "capacity {:.1} veh/h at {:.2} veh/km, jam density {:.2} veh/km",
        per_hour(s.q_star),
        per_km(s.rho_star),
        per_km(s.rho_jam)
    );
    println!("{:>10} {:>8} {:>10}", "veh/km", "v m/s", "veh/h");
    for pt in fundamental_diagram_table(&p, 14)? {
        println!(
            "{:>10.2} {:>8.2} {:>10.1}",
            per_km(pt.rho),
            pt.v_eq,
            per_hour(pt.q)
        );
    }
    Ok(())
}
