//! `pcboot` command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 data error, 3 criterion failed.

mod args;
mod manifest;

use std::f64::consts::TAU;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use serde_json::json;

use pcboot::detect::{default_grid, frequency_scan, infer_period, ScanConfig};
use pcboot::diagnostics::{block_variance_study, mbb_consistency_check, Sigma2};
use pcboot::sim::{BaseProcess, Model, Par1Spec};
use pcboot::{cyclic::cyclic_estimator, APFunction, Series};

use args::{Cli, Command, DiagnoseArgs, EstimateArgs, Mode, ModelArgs, ModelKind, ReplayArgs, ScanArgs, SimulateArgs};
use manifest::{manifest_path, sha256_file, timestamp, Artifact, RunManifest};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Criterion(String),
}

impl CliError {
    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Data(format!("{}: {e}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Criterion(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Criterion(m) => f.write_str(m),
        }
    }
}

impl From<pcboot::Error> for CliError {
    fn from(e: pcboot::Error) -> Self {
        match e {
            pcboot::Error::InvalidParameter(_) | pcboot::Error::InvalidProbability(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// What the current invocation should record.
struct Context {
    args: Vec<String>,
    cwd: PathBuf,
    record: bool,
}

impl Context {
    fn finish<P: Serialize>(
        &self,
        command: &str,
        params: &P,
        seed: Option<u64>,
        inputs: &[&Path],
        outputs: &[&Path],
    ) -> CliResult<Option<PathBuf>> {
        let Some(primary) = outputs.first() else {
            return Ok(None);
        };
        if !self.record {
            return Ok(None);
        }
        let m = RunManifest {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            args: self.args.clone(),
            cwd: self.cwd.clone(),
            params: serde_json::to_value(params).expect("parameters serialize"),
            seed,
            inputs: inputs.iter().map(|p| Artifact::of(p)).collect::<CliResult<_>>()?,
            outputs: outputs.iter().map(|p| Artifact::of(p)).collect::<CliResult<_>>()?,
            timestamp: timestamp(),
        };
        let path = manifest_path(primary);
        m.write(&path)?;
        Ok(Some(path))
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let ctx = Context {
        args: argv[1..].to_vec(),
        cwd: std::env::current_dir().unwrap_or_default(),
        record: true,
    };
    match run(cli.command, &ctx) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command, ctx: &Context) -> CliResult<()> {
    match command {
        Command::Simulate(a) => simulate(&a, ctx),
        Command::Estimate(a) => estimate(&a, ctx),
        Command::Scan(a) => scan(&a, ctx),
        Command::Diagnose(a) => diagnose(&a, ctx),
        Command::Replay(a) => replay(&a),
    }
}

fn build_model(m: &ModelArgs) -> CliResult<Model> {
    Ok(match m.model {
        ModelKind::Zeros => Model::Zeros,
        ModelKind::Iid => Model::Iid { sd: m.sd },
        ModelKind::Par1 => Model::Par1(Par1Spec {
            noise_sd: m.sd,
            burn_in: m.burn_in,
            ..Par1Spec::default()
        }),
        ModelKind::Modulated => {
            if !(m.period.is_finite() && m.period > 0.0) {
                return Err(CliError::Usage(format!("--period must be positive, got {}", m.period)));
            }
            let envelope = APFunction::constant(m.offset).add(&APFunction::cosine(m.amp, TAU / m.period)?);
            let base = match m.ar_phi {
                Some(phi) => BaseProcess::Ar1 { phi, sd: m.sd },
                None => BaseProcess::IidGaussian { sd: m.sd },
            };
            Model::Modulated { envelope, base }
        }
    })
}

fn read_series(path: &Path) -> CliResult<Series> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Series::read_csv(BufReader::new(file)).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn simulate(a: &SimulateArgs, ctx: &Context) -> CliResult<()> {
    if a.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let series = build_model(&a.model)?.generate(a.n, a.seed)?;
    let mut out = create(&a.out)?;
    series.write_csv(&mut out)?;
    out.flush().map_err(|e| CliError::io(&a.out, e))?;
    drop(out);
    if let Some(m) = ctx.finish("simulate", a, Some(a.seed), &[], &[&a.out])? {
        println!("{}", m.display());
    }
    Ok(())
}

fn estimate(a: &EstimateArgs, ctx: &Context) -> CliResult<()> {
    let series = read_series(&a.input)?;
    let est = cyclic_estimator(series.values(), a.lambda, a.tau)?;
    let text = serde_json::to_string(&est).expect("estimate serializes");
    println!("{text}");
    if let Some(out) = &a.out {
        write_text(out, &(text + "\n"))?;
        ctx.finish("estimate", a, None, &[&a.input], &[out])?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ScanSummary {
    significant_lambdas: Vec<f64>,
    inferred_period: Option<u32>,
}

fn scan(a: &ScanArgs, ctx: &Context) -> CliResult<()> {
    let series = read_series(&a.input)?;
    let config = ScanConfig {
        tau: a.tau,
        lambda_grid: default_grid(a.grid_points)?,
        block: a.block,
        replicates: a.replicates,
        alpha_lo: a.alpha_lo,
        alpha_hi: a.alpha_hi,
        seed: a.seed,
    };
    let result = frequency_scan(series.values(), &config)?;
    let significant_lambdas = result.significant_lambdas();
    let inferred_period = infer_period(&significant_lambdas, a.period_tol, a.max_period)?;
    let summary = ScanSummary {
        significant_lambdas,
        inferred_period,
    };
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    print!("{text}");

    let mut outputs: Vec<&Path> = Vec::new();
    if let Some(out) = &a.out {
        write_text(out, &text)?;
        outputs.push(out);
    }
    if let Some(tsv) = &a.tsv {
        let mut w = create(tsv)?;
        result
            .write_tsv(&mut w)
            .and_then(|()| w.flush())
            .map_err(|e| CliError::io(tsv, e))?;
        outputs.push(tsv);
    }
    ctx.finish("scan", a, Some(a.seed), &[&a.input], &outputs)?;
    Ok(())
}

/// σ² of the block-variance limit when the model pins it down.
fn known_sigma2(model: &Model) -> Option<f64> {
    match model {
        Model::Zeros => Some(0.0),
        Model::Iid { sd } => Some(sd * sd),
        Model::Modulated {
            envelope,
            base: BaseProcess::IidGaussian { sd },
        } => Some(envelope.mul(envelope).mean_value().re * sd * sd),
        _ => None,
    }
}

fn diagnose(a: &DiagnoseArgs, ctx: &Context) -> CliResult<()> {
    let model = build_model(&a.model)?;
    let (report, pass) = match a.mode {
        Mode::Consistency => {
            let n_list = if a.n.is_empty() { vec![300, 1200, 4800] } else { a.n.clone() };
            let slack = a.slack.unwrap_or(0.02);
            let max_final = a.max_final.unwrap_or(0.10);
            let r = mbb_consistency_check(
                &model,
                &n_list,
                a.q,
                a.replicates,
                a.monte_carlo.unwrap_or(1000),
                a.seed,
            )?;
            let pass = r.is_non_increasing(slack) && r.final_distance().is_some_and(|d| d <= max_final);
            let v = json!({
                "mode": "consistency",
                "slack": slack,
                "max_final": max_final,
                "pass": pass,
                "report": r,
            });
            (v, pass)
        }
        Mode::Blockvar => {
            let n = match a.n.as_slice() {
                [] => 600,
                [n] => *n,
                _ => return Err(CliError::Usage("blockvar takes a single --n".into())),
            };
            let blocks = if a.b.is_empty() { vec![9, 51, 249] } else { a.b.clone() };
            let slack = a.slack.unwrap_or(0.06);
            let max_final = a.max_final.unwrap_or(0.15);
            let sigma2 = match a.sigma2.or_else(|| known_sigma2(&model)) {
                Some(v) => Sigma2::Known(v),
                None => Sigma2::Calibrated,
            };
            let r = block_variance_study(&model, n, &blocks, a.monte_carlo.unwrap_or(2000), a.seed, sigma2)?;
            let pass = r.is_decreasing(slack) && r.final_sup_dev().is_some_and(|d| d <= max_final);
            let v = json!({
                "mode": "blockvar",
                "slack": slack,
                "max_final": max_final,
                "pass": pass,
                "report": r,
            });
            (v, pass)
        }
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    print!("{text}");
    if let Some(out) = &a.out {
        write_text(out, &text)?;
        ctx.finish("diagnose", a, Some(a.seed), &[], &[out])?;
    }
    if pass {
        Ok(())
    } else {
        Err(CliError::Criterion("diagnostic criteria not met".into()))
    }
}

fn replay(a: &ReplayArgs) -> CliResult<()> {
    let m = manifest::RunManifest::read(&a.manifest)?;
    std::env::set_current_dir(&m.cwd).map_err(|e| CliError::io(&m.cwd, e))?;
    for input in &m.inputs {
        let actual = sha256_file(&input.path)?;
        if actual != input.sha256 {
            return Err(CliError::Data(format!("input {} changed since the run", input.path.display())));
        }
    }
    let argv = std::iter::once("pcboot".to_string()).chain(m.args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Data(format!("manifest arguments: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Data("manifest records a replay".into()));
    }
    let ctx = Context {
        args: m.args.clone(),
        cwd: m.cwd.clone(),
        record: false,
    };
    // A failed criterion is itself a reproducible outcome; the hashes decide.
    match run(cli.command, &ctx) {
        Ok(()) | Err(CliError::Criterion(_)) => {}
        Err(e) => return Err(e),
    }

    let mut reproduced = true;
    let outputs: Vec<serde_json::Value> = m
        .outputs
        .iter()
        .map(|o| {
            let actual = sha256_file(&o.path)?;
            let matches = actual == o.sha256;
            reproduced &= matches;
            Ok(json!({
                "path": o.path,
                "expected": o.sha256,
                "actual": actual,
                "matches": matches,
            }))
        })
        .collect::<CliResult<_>>()?;
    let report = json!({ "manifest": a.manifest, "reproduced": reproduced, "outputs": outputs });
    eprintln!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if reproduced {
        Ok(())
    } else {
        Err(CliError::Criterion("replayed outputs differ from the manifest".into()))
    }
}
