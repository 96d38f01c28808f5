//! `cct` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration or usage
//! error.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::hilbert::{fidelity, schmidt_rank, C64, FIDELITY_TOL};
use crate::protocol::{self, StageFidelity};
use crate::rng::stream;
use crate::verify::{CheckContext, CheckRegistry, CheckReport, SCHMIDT_TOL};
use crate::zeno::{self, GateExperiment, ModelRegistry, MonteCarloReport, StageProbabilities};

pub use config::{ConfigError, Experiment, Format, Mode, RunConfig};
use output::{emit, float, Report, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cct",
    version,
    about = "Counterfactual controlled-unitary protocol simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON configuration document.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "INT")]
    pub seed: Option<u64>,
    #[arg(long, value_name = "INT")]
    pub trials: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    #[value(name = "M")]
    M,
    #[value(name = "N")]
    N,
    #[value(name = "K")]
    K,
    Diag,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one protocol instance and check it against the closed forms.
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate stage probabilities while varying cycle counts.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "diag", ignore_case = true)]
        axis: Axis,
        /// Comma-separated cycle counts.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        values: Vec<u32>,
    },
    /// Run the acceptance checks and print a pass/fail matrix.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated check ids, e.g. AC1,AC6.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Corrupt the named catalog gate before checking.
        #[arg(long, hide = true, value_name = "GATE")]
        break_gate: Option<String>,
    },
    /// Seeded Monte Carlo campaign over a gate or the whole protocol.
    Montecarlo {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        experiment: Option<Experiment>,
        /// Absorber model name for gate experiments.
        #[arg(long)]
        model: Option<String>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl From<zeno::ZenoError> for CliError {
    fn from(e: zeno::ZenoError) -> Self {
        CliError::Config(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => EXIT_VERIFICATION,
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { common } => cmd_run(&resolve(&common)?),
        Command::Sweep { common, axis, values } => cmd_sweep(&resolve(&common)?, axis, &values),
        Command::Verify {
            common,
            only,
            break_gate,
        } => cmd_verify(&resolve(&common)?, &only, break_gate),
        Command::Montecarlo {
            common,
            experiment,
            model,
        } => {
            let mut config = resolve(&common)?;
            if let Some(e) = experiment {
                config.experiment = e;
            }
            if let Some(m) = model {
                config.model = m;
            }
            config.validate()?;
            cmd_montecarlo(&config)
        }
    }
}

fn resolve(common: &Common) -> Result<RunConfig, ConfigError> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(trials) = common.trials {
        config.trials = trials;
    }
    if let Some(out) = &common.out {
        config.output = Some(out.clone());
    }
    if let Some(format) = common.format {
        config.format = format;
    }
    Ok(config)
}

#[derive(Debug, Serialize)]
pub struct RunResults {
    pub mode: Mode,
    pub outcome: Option<u8>,
    pub outcome_probability: Option<f64>,
    pub stage_fidelities: Vec<StageFidelity>,
    pub worst_fidelity: f64,
    pub compact_form_discrepancy: Option<f64>,
    pub output_amplitudes: Vec<C64>,
    pub output_ket: String,
    pub schmidt_rank: usize,
    pub separable: bool,
    pub notes: Vec<String>,
    pub pass: bool,
    pub stage_probabilities: StageProbabilities,
}

pub fn run_results(config: &RunConfig) -> Result<RunResults, CliError> {
    let cycles = config.cycles()?;
    let (transcript, stage_fidelities, worst, compact, pass, probabilities) = match config.mode {
        Mode::General => {
            let input = config.general();
            let mut rng = stream(config.seed, 0);
            let t = protocol::run_general(&input, &mut rng).map_err(ConfigError::from)?;
            let v = protocol::verify_general(&t, &input).map_err(ConfigError::from)?;
            let p = zeno::stage_probabilities_general(&cycles, &input)?;
            (
                t,
                v.stage_fidelities,
                v.worst_fidelity,
                Some(v.compact_form_discrepancy),
                v.pass,
                p,
            )
        }
        Mode::Bell => {
            let input = config.bell();
            let t = protocol::run_bell(&input).map_err(ConfigError::from)?;
            let expected = protocol::expected_output_bell(&input).map_err(ConfigError::from)?;
            let f = fidelity(&t.output, &expected).map_err(|e| CliError::Verification(e.to_string()))?;
            let p = zeno::stage_probabilities_bell(&cycles, &input)?;
            let fidelities = vec![StageFidelity {
                label: "output",
                fidelity: f,
            }];
            (t, fidelities, f, None, f >= 1.0 - FIDELITY_TOL, p)
        }
    };
    let rank = schmidt_rank(&transcript.output, &[0], SCHMIDT_TOL)
        .map_err(|e| CliError::Verification(e.to_string()))?;
    let mut notes = Vec::new();
    if rank == 1 {
        notes.push("separable output".to_string());
    }
    Ok(RunResults {
        mode: config.mode,
        outcome: transcript.outcome(),
        outcome_probability: transcript.measurement.map(|m| m.probability),
        stage_fidelities,
        worst_fidelity: worst,
        compact_form_discrepancy: compact,
        output_amplitudes: transcript.output.amps().to_vec(),
        output_ket: transcript.output.ket_string(1e-12),
        schmidt_rank: rank,
        separable: rank == 1,
        notes,
        pass,
        stage_probabilities: probabilities,
    })
}

pub fn cmd_run(config: &RunConfig) -> Result<(), CliError> {
    let results = run_results(config)?;
    let pass = results.pass;
    let worst = results.worst_fidelity;
    let text = match config.format {
        Format::Json => Report::new(config, &results).to_json(),
        Format::Csv => {
            let mut table = Table::new(vec!["stage", "fidelity"]);
            for s in &results.stage_fidelities {
                table.push(vec![s.label.to_string(), float(s.fidelity)]);
            }
            table.to_csv()
        }
    };
    emit(config.output.as_deref(), &text)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Verification(format!("worst stage fidelity {worst}")))
    }
}

pub const GENERAL_SWEEP_COLUMNS: [&str; 12] = [
    "value", "M", "N", "K", "lambda2", "lambda3", "lambda4", "lambda5", "nabla7", "nabla8", "zeta0", "zeta1",
];

pub const BELL_SWEEP_COLUMNS: [&str; 10] = [
    "value", "M", "N", "K", "nabla", "nabla9", "nabla10", "lambda6", "lambda7", "zeta",
];

/// One sweep row in column order; cycle counts are exact integers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: u32,
    #[serde(rename = "M")]
    pub m: u32,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "K")]
    pub k: u32,
    /// Probabilities in the order of the mode's column list after `K`.
    pub probabilities: Vec<f64>,
}

pub fn sweep_rows(
    config: &RunConfig,
    axis: Axis,
    values: &[u32],
) -> Result<(Vec<&'static str>, Vec<SweepRow>), CliError> {
    if values.is_empty() {
        return Err(ConfigError::new("--values", "at least one value is required").into());
    }
    let header = match config.mode {
        Mode::General => GENERAL_SWEEP_COLUMNS.to_vec(),
        Mode::Bell => BELL_SWEEP_COLUMNS.to_vec(),
    };
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let mut point = config.clone();
        match axis {
            Axis::M => point.m = value,
            Axis::N => point.n = value,
            Axis::K => point.k = value,
            Axis::Diag => (point.m, point.n, point.k) = (value, value, value),
        }
        let cycles = point.cycles()?;
        let probabilities = match config.mode {
            Mode::General => {
                let p = zeno::stage_probabilities_general(&cycles, &config.general())?;
                let [z0, z1] = p.zeta_m.expect("general protocol sets zeta_m");
                vec![
                    p.lambda[2].expect("lambda2"),
                    p.lambda[3].expect("lambda3"),
                    p.lambda[4].expect("lambda4"),
                    p.lambda[5].expect("lambda5"),
                    p.nabla[7].expect("nabla7"),
                    p.nabla[8].expect("nabla8"),
                    z0,
                    z1,
                ]
            }
            Mode::Bell => {
                let p = zeno::stage_probabilities_bell(&cycles, &config.bell())?;
                vec![
                    p.nabla_class.expect("nabla"),
                    p.nabla[9].expect("nabla9"),
                    p.nabla[10].expect("nabla10"),
                    p.lambda[6].expect("lambda6"),
                    p.lambda[7].expect("lambda7"),
                    p.zeta.expect("zeta"),
                ]
            }
        };
        rows.push(SweepRow {
            value,
            m: point.m,
            n: point.n,
            k: point.k,
            probabilities,
        });
    }
    Ok((header, rows))
}

#[derive(Debug, Serialize)]
struct SweepResults<'a> {
    axis: &'static str,
    columns: &'a [&'static str],
    rows: Vec<serde_json::Map<String, serde_json::Value>>,
}

pub fn cmd_sweep(config: &RunConfig, axis: Axis, values: &[u32]) -> Result<(), CliError> {
    let (header, rows) = sweep_rows(config, axis, values)?;
    let text = match config.format {
        Format::Csv => {
            let mut table = Table::new(header);
            for r in &rows {
                let mut cells = vec![
                    r.value.to_string(),
                    r.m.to_string(),
                    r.n.to_string(),
                    r.k.to_string(),
                ];
                cells.extend(r.probabilities.iter().map(|&p| float(p)));
                table.push(cells);
            }
            table.to_csv()
        }
        Format::Json => {
            let objects = rows
                .iter()
                .map(|r| {
                    let mut map = serde_json::Map::new();
                    for (name, v) in header[..4].iter().zip([r.value, r.m, r.n, r.k]) {
                        map.insert((*name).into(), v.into());
                    }
                    for (name, &p) in header[4..].iter().zip(&r.probabilities) {
                        map.insert((*name).into(), p.into());
                    }
                    map
                })
                .collect();
            let axis = match axis {
                Axis::M => "M",
                Axis::N => "N",
                Axis::K => "K",
                Axis::Diag => "diag",
            };
            Report::new(
                config,
                SweepResults {
                    axis,
                    columns: &header,
                    rows: objects,
                },
            )
            .to_json()
        }
    };
    emit(config.output.as_deref(), &text)?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct MonteCarloResults {
    pub experiment: Experiment,
    pub model: Option<String>,
    pub report: MonteCarloReport,
    pub z_score: f64,
}

pub fn montecarlo_results(config: &RunConfig) -> Result<MonteCarloResults, CliError> {
    if config.trials == 0 {
        return Err(ConfigError::new("trials", "at least one trial is required").into());
    }
    let cycles = config.cycles()?;
    let (model, report) = match config.experiment {
        Experiment::Cct => {
            let report = zeno::simulate_cct(&cycles, &config.input(), config.trials, config.seed)
                .map_err(|e| ConfigError::new("input", e.to_string()))?;
            (None, report)
        }
        gate => {
            let experiment = match gate {
                Experiment::Qz => GateExperiment::Qz { n: config.n },
                _ => GateExperiment::Cqz {
                    m: config.m,
                    n: config.n,
                },
            };
            let model = ModelRegistry::default()
                .get(&config.model)
                .map_err(ConfigError::from)?;
            let report = zeno::simulate_gate(
                experiment,
                &config.absorber,
                config.polarization,
                model.as_ref(),
                config.trials,
                config.seed,
            )?;
            (Some(model.name().to_string()), report)
        }
    };
    Ok(MonteCarloResults {
        experiment: config.experiment,
        model,
        z_score: report.z_score(),
        report,
    })
}

pub const MONTECARLO_COLUMNS: [&str; 10] = [
    "trials",
    "successes",
    "absorbed",
    "discarded",
    "abort_rate_estimate",
    "standard_error",
    "expected_abort_rate",
    "z_score",
    "conditional_fidelity",
    "counterfactual_violations",
];

pub fn cmd_montecarlo(config: &RunConfig) -> Result<(), CliError> {
    let results = montecarlo_results(config)?;
    let text = match config.format {
        Format::Json => Report::new(config, &results).to_json(),
        Format::Csv => {
            let r = &results.report;
            let mut table = Table::new(MONTECARLO_COLUMNS.to_vec());
            table.push(vec![
                r.trials.to_string(),
                r.successes.to_string(),
                r.absorbed.to_string(),
                r.discarded.to_string(),
                float(r.abort_rate_estimate),
                float(r.standard_error),
                float(r.expected_abort_rate),
                float(results.z_score),
                r.conditional_fidelity.map(float).unwrap_or_default(),
                r.counterfactual_violations.to_string(),
            ]);
            table.to_csv()
        }
    };
    emit(config.output.as_deref(), &text)?;
    Ok(())
}

pub fn cmd_verify(config: &RunConfig, only: &[String], break_gate: Option<String>) -> Result<(), CliError> {
    let registry = CheckRegistry::default();
    if let Some(unknown) = only.iter().find(|id| registry.get(id).is_none()) {
        let known: Vec<_> = registry.ids().collect();
        return Err(ConfigError::new(
            "--only",
            format!("unknown check `{unknown}`, expected one of {known:?}"),
        )
        .into());
    }
    let ctx = CheckContext {
        seed: config.seed,
        fault: break_gate,
    };
    let reports = registry.run(&ctx, (!only.is_empty()).then_some(only));
    for r in &reports {
        println!("{}", r.line());
    }
    let failed: Vec<&CheckReport> = reports.iter().filter(|r| !r.pass).collect();
    println!(
        "{} of {} checks passed",
        reports.len() - failed.len(),
        reports.len()
    );
    if let Some(path) = &config.output {
        let text = match config.format {
            Format::Json => Report::new(config, &reports).to_json(),
            Format::Csv => {
                let mut table = Table::new(vec!["id", "pass", "elapsed_secs"]);
                for r in &reports {
                    table.push(vec![r.id.to_string(), r.pass.to_string(), float(r.elapsed_secs)]);
                }
                table.to_csv()
            }
        };
        emit(Some(path), &text)?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        let names: Vec<String> = failed.iter().map(|r| format!("{} {}", r.id, r.title)).collect();
        Err(CliError::Verification(names.join(", ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diag_sweep_zeta_decreases() {
        let (header, rows) = sweep_rows(&RunConfig::default(), Axis::Diag, &[5, 10, 20, 40]).unwrap();
        let z0 = header.iter().position(|h| *h == "zeta0").unwrap() - 4;
        let z: Vec<f64> = rows.iter().map(|r| r.probabilities[z0]).collect();
        assert!(z.windows(2).all(|w| w[1] < w[0]), "{z:?}");
    }

    #[test]
    fn m_sweep_lambda2_rises_then_falls() {
        // Detector survival grows with M while absorption loss grows like M/N.
        let values: Vec<u32> = (1..=60).collect();
        let (_, rows) = sweep_rows(&RunConfig::default(), Axis::M, &values).unwrap();
        assert!(rows.iter().all(|r| r.n == 25 && r.k == 25));
        let l2: Vec<f64> = rows.iter().map(|r| r.probabilities[0]).collect();
        let peak = l2
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
        assert!(peak > 0 && peak < l2.len() - 1, "peak at {peak}");
        assert!(l2[..=peak].windows(2).all(|w| w[1] >= w[0]), "{l2:?}");
        assert!(l2[peak..].windows(2).all(|w| w[1] <= w[0]), "{l2:?}");
    }

    #[test]
    fn zero_cycle_value_is_config_error() {
        let e = sweep_rows(&RunConfig::default(), Axis::N, &[0]).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_CONFIG);
    }

    #[test]
    fn teleportation_config_is_separable() {
        let config = RunConfig {
            gamma: C64::new(0.0, 0.0),
            delta: C64::new(1.0, 0.0),
            angles: crate::gates::EulerAngles::new(0.3, 1.1, -0.7),
            ..RunConfig::default()
        };
        let r = run_results(&config).unwrap();
        assert!(r.pass && r.separable);
        assert_eq!(r.schmidt_rank, 1);
        assert_eq!(r.notes, ["separable output"]);
    }

    #[test]
    fn identity_run_passes() {
        let r = run_results(&RunConfig::default()).unwrap();
        assert!(r.pass);
        assert!(matches!(r.outcome, Some(0 | 1)));
    }

    #[test]
    fn bell_run_passes() {
        let config = RunConfig {
            mode: Mode::Bell,
            angles: crate::gates::EulerAngles::new(0.4, 2.0, 1.0),
            ..RunConfig::default()
        };
        let r = run_results(&config).unwrap();
        assert!(r.pass);
        assert!(r.outcome.is_none());
    }

    #[test]
    fn zero_trials_rejected() {
        let config = RunConfig {
            trials: 0,
            ..RunConfig::default()
        };
        assert_eq!(montecarlo_results(&config).unwrap_err().exit_code(), EXIT_CONFIG);
    }
}
