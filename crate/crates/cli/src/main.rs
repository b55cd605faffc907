//! `surprise`: evaluate schemes, sweep parameters and emit figure tables as CSV.
//!
//! Exit codes: 0 on success, 1 on I/O failure, 2 on invalid input.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use surprise_core::closed_form::DEFAULT_K2_PROB;
use surprise_core::table::format_number;
use surprise_core::{
    evaluate_scheme, figure_table, run_sweep, DualRiskSpec, DualScheme, Execution, FigureId,
    FigureOverrides, Grid, HazardSpec, ModelError, ModelParams, Modulation, ResolutionNode,
    ScalingMode, Scheme, SweepSpec, SweepTarget, Table, TimingRiskSpec,
};

#[derive(Parser)]
#[command(
    name = "surprise",
    version,
    about = "Anticipated-surprise utility model"
)]
struct Cli {
    /// Evaluate grid points one at a time instead of on the thread pool.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one scheme and print a CSV header and row.
    Eval {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// none, full, partial:<gamma> or scale:<s>
        #[arg(long, default_value = "none")]
        scaling: ScalingMode,
    },
    /// Write the data behind one figure.
    Figure {
        /// fig1, fig3-left, fig3-right, fig5-left, fig5-right, fig7, figA1, figA2 or figA3
        id: FigureId,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        k1: Option<f64>,
        #[arg(long)]
        k2: Option<f64>,
        #[arg(long)]
        modulation: Option<Modulation>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long = "k2-prob")]
        k2_prob: Option<f64>,
    },
    /// Evaluate a scheme over a grid of one parameter.
    Sweep {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "none")]
        scaling: ScalingMode,
        /// p, n, p_tr, p_pr or k_tr
        #[arg(long)]
        target: SweepTarget,
        #[arg(long, requires_all = ["stop", "count"], conflicts_with = "values")]
        start: Option<f64>,
        #[arg(long)]
        stop: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        /// Explicit grid, comma separated.
        #[arg(long, value_delimiter = ',', required_unless_present = "start")]
        values: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct SchemeArgs {
    /// gamble, hazard, timing, dual-a-after, dual-a-before, dual-b or tree:<path>
    #[arg(long)]
    scheme: String,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    hi: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    lo: f64,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    n: Option<f64>,
    #[arg(long = "p-tr")]
    p_tr: Option<f64>,
    #[arg(long = "k-tr")]
    k_tr: Option<f64>,
    #[arg(long = "p-pr")]
    p_pr: Option<f64>,
    #[arg(long = "k2-prob", default_value_t = DEFAULT_K2_PROB)]
    k2_prob: f64,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value_t = 3.0)]
    k: f64,
    #[arg(long, default_value_t = 1.6)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    k1: f64,
    #[arg(long, default_value_t = 2.0)]
    k2: f64,
    #[arg(long, default_value = "hyperbolic")]
    modulation: Modulation,
}

enum Failure {
    Io(String),
    Invalid(String),
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

impl ModelArgs {
    fn params(&self) -> Outcome<ModelParams> {
        Ok(
            ModelParams::new(self.k, self.alpha, self.k1, self.k2)?
                .with_modulation(self.modulation),
        )
    }
}

fn required(value: Option<f64>, flag: &str, scheme: &str) -> Outcome<f64> {
    value.ok_or_else(|| Failure::Invalid(format!("scheme {scheme} requires --{flag}")))
}

fn whole(value: f64, flag: &str) -> Outcome<u32> {
    if value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        Ok(value as u32)
    } else {
        Err(Failure::Invalid(format!(
            "--{flag} must be a whole number, got {value}"
        )))
    }
}

fn load_tree(path: &Path) -> Outcome<ResolutionNode> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    let (tree, report) = ResolutionNode::from_json(&text)?;
    for r in &report.renormalized {
        eprintln!(
            "warning: renormalized branch probabilities at {} (sum was {})",
            r.path, r.original_sum
        );
    }
    Ok(tree)
}

impl SchemeArgs {
    fn build(&self) -> Outcome<Scheme> {
        let name = self.scheme.as_str();
        if let Some(path) = name.strip_prefix("tree:") {
            return Ok(Scheme::Tree(load_tree(Path::new(path))?));
        }
        let p = || required(self.p, "p", name);
        let n = || required(self.n, "n", name);
        let dual = |scheme| -> Outcome<Scheme> {
            let spec = DualRiskSpec::new(
                p()?,
                whole(n()?, "n")?,
                required(self.p_pr, "p-pr", name)?,
                scheme,
            )?
            .with_k2_prob(self.k2_prob)?;
            Ok(Scheme::Dual(spec))
        };
        match name {
            "gamble" => Ok(Scheme::Gamble {
                hi: self.hi,
                lo: self.lo,
                p: p()?,
            }),
            "hazard" => Ok(Scheme::Hazard(HazardSpec::new(p()?, n()?)?)),
            "timing" => Ok(Scheme::Timing(TimingRiskSpec::new(
                p()?,
                whole(n()?, "n")?,
                required(self.p_tr, "p-tr", name)?,
                required(self.k_tr, "k-tr", name)?,
            )?)),
            "dual-a-after" => dual(DualScheme::SeparateAfter),
            "dual-a-before" => dual(DualScheme::SeparateBefore),
            "dual-b" => dual(DualScheme::Incorporated),
            other => Err(Failure::Invalid(format!(
                "unknown scheme '{other}', expected gamble, hazard, timing, dual-a-after, \
                 dual-a-before, dual-b or tree:<path>"
            ))),
        }
    }

    /// Fills the sweep target with `value` so the base scheme can be built
    /// without the caller repeating it.
    fn with_placeholder(&self, target: SweepTarget, value: f64) -> SchemeArgs {
        let mut a = self.clone();
        let slot = match target {
            SweepTarget::P => &mut a.p,
            SweepTarget::N => &mut a.n,
            SweepTarget::PTr => &mut a.p_tr,
            SweepTarget::PPr => &mut a.p_pr,
            SweepTarget::KTr => &mut a.k_tr,
        };
        slot.get_or_insert(value);
        a
    }
}

fn emit(text: &str, out: Option<&Path>) -> Outcome<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

fn eval_csv(scheme: &Scheme, params: &ModelParams, scaling: ScalingMode) -> Outcome<String> {
    let r = evaluate_scheme(scheme, params, scaling)?;
    let named = scheme.parameters();
    let mut header = vec!["scheme"];
    header.extend(named.iter().map(|(name, _)| *name));
    header.extend(["u0", "delta", "u"]);
    header.extend(scheme.extra_column());

    let mut row = vec![scheme.id().to_string()];
    row.extend(named.iter().map(|(_, v)| format_number(*v)));
    row.extend([r.u0, r.delta, r.utility].map(format_number));
    row.extend(r.extra.map(format_number));
    Ok(format!("{}\n{}\n", header.join(","), row.join(",")))
}

fn run(cli: Cli) -> Outcome<()> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match cli.command {
        Command::Eval {
            scheme,
            model,
            scaling,
        } => {
            let params = model.params()?;
            let scheme = scheme.build()?;
            emit(&eval_csv(&scheme, &params, scaling)?, None)
        }
        Command::Figure {
            id,
            out,
            k,
            alpha,
            k1,
            k2,
            modulation,
            p,
            n,
            k2_prob,
        } => {
            let overrides = FigureOverrides {
                k,
                alpha,
                k1,
                k2,
                modulation,
                p,
                n,
                k2_prob,
            };
            let table = figure_table(id, &overrides, exec)?;
            emit(&table.to_csv(), out.as_deref())
        }
        Command::Sweep {
            scheme,
            model,
            scaling,
            target,
            start,
            stop,
            count,
            values,
            out,
        } => {
            let grid = match (values, start, stop, count) {
                (Some(v), ..) => Grid::Values(v),
                (None, Some(start), Some(stop), Some(count)) => Grid::linspace(start, stop, count),
                _ => {
                    return Err(Failure::Invalid(
                        "sweep needs --values or --start/--stop/--count".into(),
                    ))
                }
            };
            let first = grid.points()?[0];
            let spec = SweepSpec {
                target,
                grid,
                base: scheme.with_placeholder(target, first).build()?,
                params: model.params()?,
                scaling,
            };
            let table: Table = run_sweep(&spec, exec)?;
            emit(&table.to_csv(), out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
