//! Running a benchmark experiment from a TOML config and writing the report
//! files, the same path the `cimbench` binary takes.

use std::error::Error;

use circumcentered::bench::output::{write_report, Format};
use circumcentered::bench::{run_experiment, ExperimentConfig, RunOptions};

const CONFIG: &str = r#"
name = "three-planes"
ambient_dim = 6
seed = 11
max_iters = 25

[instance]
source = "random"
count = 3
dim_range = [3, 5]
common_dim = 1

[[methods]]
name = "map"
method = "map"

[[methods]]
name = "crm"
method = "cim"
recipe = "psi"

[[methods]]
name = "crm_symmetric"
method = "cim"
recipe = "psi_symmetric"

[[methods]]
name = "accel"
method = "accel_map"
"#;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let opts = RunOptions {
        verify: true,
        ..RunOptions::default()
    };
    let report = run_experiment(&cfg, &opts)?;
    for (name, value) in &report.constants.values {
        println!("{name:<10} {value:.6}");
    }
    for m in &report.methods {
        println!(
            "{:<14} final error {:.3e}, audits passed: {}",
            m.name,
            m.final_error.unwrap_or(f64::NAN),
            m.passed()
        );
    }
    for c in &report.checks {
        println!("check {:<22} {}", c.name, if c.passed { "ok" } else { "FAIL" });
    }

    let dir = std::env::temp_dir().join(format!("cimbench-example-{}", std::process::id()));
    let written = write_report(&report, &dir, Format::Csv)?;
    println!("wrote {} files to {}", written.len(), dir.display());
    std::fs::remove_dir_all(&dir)?;
    assert!(report.passed);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
