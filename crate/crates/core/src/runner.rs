//! Runs one configured task and writes its reports plus a manifest.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::complex::ComplexSample;
use crate::config::{Plan, RunConfig, Task};
use crate::connect::Connection;
use crate::error::{Error, Result};
use crate::functional::simplex_counts;
use crate::moments::{empirical_moments, euler_moments, fmt_f, replicate_counts, stationary_limits};
use crate::normapprox::{gamma_quantities, run_clt_experiment};
use crate::render::{render_disk, render_line_process};
use crate::seed::SeedStream;
use crate::space::Space;

/// Command-line overrides; `None` keeps the config value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub task: Option<Task>,
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 2,
        Error::Io(_) => 3,
        Error::Hypothesis(_) => 4,
        _ => 1,
    }
}

/// Git-style object hash: SHA-256 of `"blob <len>\0" + content`.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

struct Outputs {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Outputs {
    fn write(&mut self, name: &str, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        std::fs::write(self.dir.join(name), &buf)?;
        self.files.push((name.to_string(), content_hash(&buf)));
        Ok(())
    }
}

fn write_counts(out: &mut Vec<u8>, counts: &[Vec<usize>], a: &[f64]) -> Result<()> {
    writeln!(out, "# schema: rcm-counts v1")?;
    let cols: Vec<String> = (0..a.len()).map(|j| format!("f{j}")).collect();
    writeln!(out, "replicate,{},chi", cols.join(","))?;
    for (i, c) in counts.iter().enumerate() {
        let chi: f64 = c.iter().zip(a).map(|(&n, &w)| n as f64 * w).sum();
        let cs: Vec<String> = c.iter().map(|n| n.to_string()).collect();
        writeln!(out, "{i},{},{}", cs.join(","), fmt_f(chi))?;
    }
    Ok(())
}

fn sample_one(plan: &Plan, stream: SeedStream) -> Result<ComplexSample> {
    plan.model.sample(stream.named("sample"))
}

fn run_task(plan: &Plan, stream: SeedStream, outs: &mut Outputs) -> Result<()> {
    let is_disk = matches!(plan.model.window.space(), Space::HyperbolicDisk { .. });
    match plan.task {
        Task::Sample => {
            let c = sample_one(plan, stream)?;
            outs.write("complex.txt", |b| Ok(c.write_dump(b)?))?;
            let mut counts = vec![simplex_counts(&c)];
            if plan.replicates > 0 {
                counts = replicate_counts(&plan.model, plan.replicates, stream.named("replicates"))?;
            }
            outs.write("counts.csv", |b| write_counts(b, &counts, plan.a.as_slice()))?;
            if is_disk {
                outs.write("complex.svg", |b| Ok(b.write_all(render_disk(&c).as_bytes())?))?;
            }
        }
        Task::Render => {
            let c = sample_one(plan, stream)?;
            outs.write("complex.svg", |b| Ok(b.write_all(render_disk(&c).as_bytes())?))?;
            if matches!(plan.model.system.connection(1), Connection::HyperbolicLine) {
                outs.write("lines.svg", |b| Ok(b.write_all(render_line_process(&c).as_bytes())?))?;
            }
        }
        Task::Moments => {
            let mut report = euler_moments(&plan.a, &plan.model, &plan.budget, stream.named("moments"))?;
            if plan.replicates >= 2 {
                let counts = replicate_counts(&plan.model, plan.replicates, stream.named("replicates"))?;
                report.empirical = Some(empirical_moments(&counts, &plan.a)?);
            }
            outs.write("moments.csv", |b| report.write_csv(b))?;
            outs.write("moments.json", |b| report.write_json(b))?;
            if let Space::MarkedStationary { marks, .. } = plan.model.window.space() {
                if plan.model.system.is_translation_invariant() {
                    let st = stationary_limits(
                        &plan.model.system,
                        plan.model.window.dimension(),
                        marks,
                        plan.model.beta,
                        std::slice::from_ref(&plan.model.window),
                        &plan.budget,
                        stream.named("stationary"),
                    )?;
                    outs.write("stationary.csv", |b| st.write_csv(b))?;
                }
            }
        }
        Task::Gamma => {
            let g = gamma_quantities(&plan.model, &plan.a, &plan.gamma, &plan.budget, stream.named("gamma"))?;
            outs.write("gamma.csv", |b| g.write_csv(b))?;
        }
        Task::Clt => {
            let exp = plan.clt.as_ref().ok_or_else(|| Error::Config("task `clt` needs a [clt] section".into()))?;
            let rep = run_clt_experiment(exp, stream.named("clt"))?;
            outs.write("ladder.csv", |b| rep.write_csv(b))?;
            if let Some(st) = &rep.stationary {
                outs.write("stationary.csv", |b| st.write_csv(b))?;
            }
            if let Some(cov) = &rep.covariance {
                outs.write("covariance.csv", |b| {
                    writeln!(b, "# schema: rcm-covariance v1")?;
                    writeln!(b, "i,j,empirical,empirical_se,sigma,sigma_se,z")?;
                    let st = rep.stationary.as_ref().expect("stationary report");
                    for (i, row) in cov.empirical.iter().enumerate() {
                        for (j, e) in row.iter().enumerate() {
                            let s = st.sigma[i][j];
                            writeln!(
                                b,
                                "{i},{j},{},{},{},{},{}",
                                fmt_f(e.value),
                                fmt_f(e.standard_error),
                                fmt_f(s.value),
                                fmt_f(s.standard_error),
                                fmt_f(cov.z[i][j])
                            )?;
                        }
                    }
                    Ok(())
                })?;
            }
        }
    }
    Ok(())
}

/// Validates `config`, runs its task and writes reports and `manifest.txt`
/// into the output directory. Returns the output directory.
pub fn run(config: &RunConfig, config_text: &str, overrides: &Overrides) -> Result<PathBuf> {
    let mut cfg = config.clone();
    if let Some(t) = overrides.task {
        cfg.task = t;
    }
    if let Some(s) = overrides.seed {
        cfg.seed = s;
    }
    if let Some(o) = &overrides.out {
        cfg.out = o.clone();
    }
    if overrides.threads.is_some() {
        cfg.threads = overrides.threads;
    }
    let plan = cfg.prepare()?;
    let threads = cfg.threads.unwrap_or(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    std::fs::create_dir_all(&plan.out)?;
    let mut outs = Outputs { dir: plan.out.clone(), files: Vec::new() };
    log::info!("running {:?} with seed {} on {threads} threads", plan.task, plan.seed);
    pool.install(|| run_task(&plan, SeedStream::new(plan.seed), &mut outs))?;
    write_manifest(&plan, config_text, &outs)?;
    Ok(plan.out)
}

/// Loads a config file and runs it.
pub fn run_file(path: &Path, overrides: &Overrides) -> Result<PathBuf> {
    let (cfg, text) = RunConfig::load(path)?;
    run(&cfg, &text, overrides)
}

fn write_manifest(plan: &Plan, config_text: &str, outs: &Outputs) -> Result<()> {
    let mut m = BufWriter::new(File::create(outs.dir.join("manifest.txt"))?);
    writeln!(m, "# rcm-sim manifest v1")?;
    writeln!(m, "task = {:?}", plan.task)?;
    writeln!(m, "seed = {}", plan.seed)?;
    writeln!(m, "config_hash = {}", content_hash(config_text.as_bytes()))?;
    writeln!(m, "version = {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(m, "[outputs]")?;
    for (name, hash) in &outs.files {
        writeln!(m, "{name} {hash}")?;
    }
    writeln!(m, "[config]")?;
    m.write_all(config_text.as_bytes())?;
    if !config_text.ends_with('\n') {
        writeln!(m)?;
    }
    m.flush()?;
    Ok(())
}
