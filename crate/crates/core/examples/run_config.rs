//! Driving the runner from an in-memory TOML config, as the `rcm-sim` binary
//! does from a file.

use rcm_simplicial::config::RunConfig;
use rcm_simplicial::runner::{run, Overrides};

const CONFIG: &str = r#"
task = "sample"
seed = 5
out = "run-config-out"

beta = 20.0

[space]
kind = "euclidean_box"
bounds = [[0.0, 1.0], [0.0, 1.0]]

[system]
name = "cech"
alpha = 2
radius = 0.1

[replicates]
count = 200
"#;

fn main() -> rcm_simplicial::Result<()> {
    let cfg = RunConfig::from_toml(CONFIG)?;
    let dir = run(&cfg, CONFIG, &Overrides::default())?;
    print!("{}", std::fs::read_to_string(dir.join("manifest.txt"))?);
    Ok(())
}
