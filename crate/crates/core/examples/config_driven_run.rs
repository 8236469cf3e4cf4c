// Resolve a TOML config with overrides and write the experiment's files.
use ringtraffic::{load_config, run_scenario, ConfigSources};

const CONFIG: &str = r#"
kind = "load-balance"
replicas = 4
t_end = 60.0

[lane_change]
r = 0.2
"#;

fn main() -> ringtraffic::Result<()> {
    let src = ConfigSources {
        text: Some(CONFIG.into()),
        overrides: vec!["base_seed=7".into(), "flow.delta=10".into()],
        ..Default::default()
    };
    let cfg = load_config(&src, None)?;
    let out = std::env::temp_dir().join("ringtraffic-example");
    let manifest = run_scenario(&cfg, &out, 2)?;
    println!("config {}", manifest.config_sha256);
    println!("seeds {:?}", manifest.seeds);
    for a in &manifest.artifacts {
        println!("  {}", out.join(a).display());
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&manifest.results).expect("json")
    );
    Ok(())
}
