//! Command-line front end.
//!
//! Subcommands: `measure` (C, N, N_c across a partition), `audit` (all
//! applicable monogamy bounds over a ν grid), `figure` (bound-comparison
//! curves as CSV/JSON), `random-audit` (batch audits of Haar-random states),
//! `counterexamples` (closed-form equality checks for the qudit
//! counterexample states), and `croof` (direct convex-roof runs).
//!
//! Exit codes are part of the interface: 0 success/all-hold, 2 input error,
//! 3 validation or numerical error, 4 inequality violation.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::{Path, PathBuf};

use crate::convexroof::{roof_with_decomposition, RoofConfig, RoofObjective};
use crate::error::{Error, Result};
use crate::measures::{self, MeasureKind, MeasureValue};
use crate::monogamy::{self, AuditOptions, AuditReport, NuGrid};
use crate::states;
use crate::tensor::{self, Partition, PureState, QuantumState};

#[derive(Parser, Debug)]
#[command(
    name = "entmono",
    version,
    about = "Entanglement measures and monogamy-bound audits for small multi-qudit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute concurrence, negativity, and CREN across a partition.
    Measure(MeasureArgs),
    /// Check every applicable monogamy bound for one state over a ν grid.
    Audit(AuditArgs),
    /// Emit the bound-comparison curves behind the two shipped figures.
    Figure(FigureArgs),
    /// Audit a batch of seeded Haar-random pure states.
    RandomAudit(RandomAuditArgs),
    /// Verify the closed-form equalities of the qudit counterexample states.
    Counterexamples(CounterexamplesArgs),
    /// Run the convex-roof optimizer directly on a state.
    Croof(CroofArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MeasureKindArg {
    Concurrence,
    Cren,
}

impl From<MeasureKindArg> for MeasureKind {
    fn from(m: MeasureKindArg) -> Self {
        match m {
            MeasureKindArg::Concurrence => MeasureKind::Concurrence,
            MeasureKindArg::Cren => MeasureKind::Cren,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ObjectiveArg {
    Negativity,
    Concurrence,
}

/// State source: a builtin name (`w3`, `ghz4`, `example1`, `gsd-example2`,
/// `ou`, `kim-sanders`, `wN`, `ghzN`) or a path to a state JSON file.
#[derive(Args, Debug, Clone)]
struct StateArgs {
    /// Builtin state name or path to a JSON state file.
    #[arg(long)]
    state: String,
    /// Family parameters for builtin families (example1: p1..p5,theta;
    /// gsd-example2: theta0..theta4,phi).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    /// Smallest ν (≥ 2).
    #[arg(long, default_value_t = 2.0)]
    nu_min: f64,
    /// Largest ν (inclusive).
    #[arg(long, default_value_t = 10.0)]
    nu_max: f64,
    /// ν grid spacing.
    #[arg(long, default_value_t = 0.25)]
    nu_step: f64,
}

impl GridArgs {
    fn grid(&self) -> Result<NuGrid> {
        NuGrid::new(self.nu_min, self.nu_max, self.nu_step)
    }
}

#[derive(Args, Debug, Clone)]
struct RoofArgs {
    /// Convex-roof restarts.
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// Convex-roof sweep cap per restart.
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    /// Decomposition cardinality m (default: rank²).
    #[arg(long)]
    ensemble_size: Option<usize>,
    /// Convex-roof objective-change tolerance.
    #[arg(long, default_value_t = 1e-8)]
    roof_tol: f64,
}

impl RoofArgs {
    fn config(&self, seed: u64) -> RoofConfig {
        RoofConfig {
            ensemble_size: self.ensemble_size,
            restarts: self.restarts,
            max_iters: self.max_iters,
            tol: self.roof_tol,
            seed,
            lower_hint: 0.0,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct OutArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Partition as side-A and side-B subsystem digits, e.g. `0:12`.
    #[arg(long)]
    partition: Option<String>,
    /// Subsystem treated as A when no partition is given.
    #[arg(long, default_value_t = 0)]
    first: usize,
    /// Seed for the convex-roof optimizer (mixed multi-qudit inputs).
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    roof: RoofArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Measure kind the bounds are stated for.
    #[arg(long, value_enum)]
    measure: MeasureKindArg,
    /// Subsystem treated as A.
    #[arg(long, default_value_t = 0)]
    first: usize,
    #[command(flatten)]
    grid: GridArgs,
    /// Relative pass/fail tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    /// Seed for optimizer-backed ingredients.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    roof: RoofArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// Which figure to reproduce: `fig1` (product-form family, concurrence)
    /// or `fig2` (generalized-Schmidt instance, CREN).
    #[arg(value_parser = ["fig1", "fig2"])]
    which: String,
    /// fig1 only: plug in the published ingredient values verbatim instead
    /// of deriving them from the state.
    #[arg(long, default_value_t = false)]
    paper_values: bool,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct RandomAuditArgs {
    /// Register dimensions, e.g. `2,2,2` or `2,2,2,2`.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 2, 2])]
    dims: Vec<usize>,
    /// Number of Haar-random states.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Measure kind to audit.
    #[arg(long, value_enum, default_value_t = MeasureKindArg::Concurrence)]
    measure: MeasureKindArg,
    /// Subsystem treated as A.
    #[arg(long, default_value_t = 0)]
    first: usize,
    /// Base seed; state i uses the stream split off (seed, i).
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    grid: GridArgs,
    /// Relative pass/fail tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    #[command(flatten)]
    roof: RoofArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct CounterexamplesArgs {
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct CroofArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Partition as side-A and side-B subsystem digits, e.g. `0:12`.
    #[arg(long)]
    partition: Option<String>,
    /// Roof objective.
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Negativity)]
    objective: ObjectiveArg,
    /// Optimizer seed.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    roof: RoofArgs,
    #[command(flatten)]
    out: OutArgs,
}

/// Parses arguments and runs; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Measure(a) => cmd_measure(a),
        Command::Audit(a) => cmd_audit(a),
        Command::Figure(a) => cmd_figure(a),
        Command::RandomAudit(a) => cmd_random_audit(a),
        Command::Counterexamples(a) => cmd_counterexamples(a),
        Command::Croof(a) => cmd_croof(a),
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn resolve_state(args: &StateArgs) -> Result<(QuantumState, String)> {
    match states::builtin_state(&args.state, args.params.as_deref()) {
        Ok((psi, recipe)) => Ok((QuantumState::Pure(psi), recipe.name)),
        Err(Error::Input(msg)) => {
            let path = Path::new(&args.state);
            if path.exists() {
                if args.params.is_some() {
                    return Err(Error::Input(
                        "--params only applies to builtin state families".into(),
                    ));
                }
                let label = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| args.state.clone());
                Ok((tensor::state_from_json_file(path)?, label))
            } else {
                Err(Error::Input(format!("{msg}; no such file either")))
            }
        }
        Err(e) => Err(e),
    }
}

fn resolve_partition(arg: &Option<String>, first: usize, n: usize) -> Result<Partition> {
    match arg {
        Some(s) => Partition::parse(s),
        None => Partition::first_vs_rest(first, n),
    }
}

fn require_pure<'a>(state: &'a QuantumState, what: &str) -> Result<&'a PureState> {
    state.as_pure().ok_or_else(|| {
        Error::Validation(format!("{what} needs a pure state, got a density matrix"))
    })
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------
// measure
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct MeasureReport {
    state: String,
    dims: Vec<usize>,
    partition: String,
    concurrence: MeasureValue,
    negativity: MeasureValue,
    cren: MeasureValue,
}

fn cmd_measure(args: MeasureArgs) -> Result<i32> {
    let (state, label) = resolve_state(&args.state)?;
    let n = state.dims().len();
    let partition = resolve_partition(&args.partition, args.first, n)?;
    let roof_cfg = args.roof.config(args.seed);

    let rho = state.to_density();
    let concurrence = match &state {
        QuantumState::Pure(psi) => measures::concurrence_pure(psi, &partition)?,
        QuantumState::Mixed(m) if m.dims().as_slice() == [2, 2] => {
            measures::wootters_concurrence(m)?
        }
        QuantumState::Mixed(m) => {
            let mut cfg = roof_cfg.clone();
            cfg.lower_hint = 0.0;
            crate::convexroof::roof_upper_bound(m, &partition, RoofObjective::Concurrence, &cfg)?
        }
    };
    let negativity = measures::negativity(&rho, &partition)?;
    let cren = measures::cren(&state, &partition, &roof_cfg)?;

    let report = MeasureReport {
        state: label,
        dims: state.dims().as_slice().to_vec(),
        partition: partition.to_string(),
        concurrence,
        negativity,
        cren,
    };
    let format = args.out.format.unwrap_or(Format::Text);
    let text = match format {
        Format::Json => to_json(&report),
        Format::Text => {
            let fmt_mv = |mv: &MeasureValue| {
                let mut s = format!("{} ({})", mv.value, mv.method);
                if let Some([lo, hi]) = mv.interval {
                    s.push_str(&format!(" interval [{lo}, {hi}]"));
                }
                s
            };
            format!(
                "state: {}  dims: {:?}  partition: {}\nC   = {}\nN   = {}\nN_c = {}\n",
                report.state,
                report.dims,
                report.partition,
                fmt_mv(&report.concurrence),
                fmt_mv(&report.negativity),
                fmt_mv(&report.cren),
            )
        }
        Format::Csv => {
            return Err(Error::Input(
                "measure supports --format text or json".into(),
            ))
        }
    };
    emit(&text, &args.out.out)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------------

fn audit_options(grid: &GridArgs, tolerance: f64, roof: &RoofArgs, seed: u64) -> Result<AuditOptions> {
    Ok(AuditOptions {
        nu_grid: grid.grid()?,
        rel_tol: tolerance,
        roof: roof.config(seed),
    })
}

fn render_audit(report: &AuditReport, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(to_json(report)),
        Format::Csv => Ok(report.to_csv()),
        Format::Text => Err(Error::Input("audit supports --format json or csv".into())),
    }
}

fn cmd_audit(args: AuditArgs) -> Result<i32> {
    let (state, label) = resolve_state(&args.state)?;
    let psi = require_pure(&state, "audit")?;
    let opts = audit_options(&args.grid, args.tolerance, &args.roof, args.seed)?;
    let report = monogamy::audit(psi, args.first, args.measure.into(), &opts, &label)?;
    let format = args.out.format.unwrap_or(Format::Json);
    emit(&render_audit(&report, format)?, &args.out.out)?;
    if report.all_hold_with_certainty() {
        Ok(0)
    } else {
        for row in &report.rows {
            for b in &row.bounds {
                if b.verdict != monogamy::Verdict::HoldsWithCertainty {
                    eprintln!(
                        "bound {} at nu={} verdict={} margin={}",
                        b.id, row.nu, b.verdict, b.margin
                    );
                }
            }
        }
        Ok(4)
    }
}

// ---------------------------------------------------------------------------
// figure
// ---------------------------------------------------------------------------

#[derive(Serialize, Clone, Copy)]
struct FigureIngredients {
    /// One-vs-rest measure value (C or N_c of the pure state).
    lhs: f64,
    pair_ab: f64,
    pair_ac: f64,
    residual: f64,
}

#[derive(Serialize)]
struct FigureRow {
    nu: f64,
    lhs: f64,
    lemma_bound: f64,
    zhang2021_bound: f64,
    sum_bound: f64,
}

#[derive(Serialize)]
struct Fig1Diagnostics {
    state_derived: FigureIngredients,
    quoted: FigureIngredients,
    c_sq_state_derived: f64,
    c_sq_quoted: f64,
    /// Whether the quoted ingredients agree with the state-derived ones.
    consistent: bool,
}

#[derive(Serialize)]
struct FigureReport {
    which: String,
    paper_values: bool,
    ingredients: FigureIngredients,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<Fig1Diagnostics>,
    rows: Vec<FigureRow>,
}

fn example1_state_ingredients() -> Result<FigureIngredients> {
    let (p, theta) = states::example1_default_params();
    let psi = states::example1_state(p, theta)?;
    let lhs = measures::concurrence_pure(&psi, &Partition::first_vs_rest(0, 3)?)?.value;
    let c_ab = measures::wootters_concurrence(&psi.reduced(&[0, 1])?)?.value;
    let c_ac = measures::wootters_concurrence(&psi.reduced(&[0, 2])?)?.value;
    Ok(FigureIngredients {
        lhs,
        pair_ab: c_ab,
        pair_ac: c_ac,
        residual: lhs * lhs - c_ab * c_ab - c_ac * c_ac,
    })
}

/// The published Example-1 ingredient values, verbatim:
/// C_{A|BC} = √(48/625), C_AB = 2(4−√15)/25, C_AC = 2(2√5−2)/25,
/// κ = (4/25)((16√15+1)/125)².
fn example1_quoted_ingredients() -> FigureIngredients {
    let s15 = 15f64.sqrt();
    let s5 = 5f64.sqrt();
    let kappa_inner = (16.0 * s15 + 1.0) / 125.0;
    FigureIngredients {
        lhs: (48f64 / 625.0).sqrt(),
        pair_ab: 2.0 * (4.0 - s15) / 25.0,
        pair_ac: 2.0 * (2.0 * s5 - 2.0) / 25.0,
        residual: (4.0 / 25.0) * kappa_inner * kappa_inner,
    }
}

fn gsd_example2_ingredients() -> Result<FigureIngredients> {
    let (t, phi) = states::gsd_example2_params();
    let psi = states::gsd_state(t, phi)?;
    let lhs = measures::negativity(&psi.to_density(), &Partition::first_vs_rest(0, 3)?)?.value;
    // Two-qubit reduced states: CREN equals the Wootters concurrence.
    let n_ab = measures::wootters_concurrence(&psi.reduced(&[0, 1])?)?.value;
    let n_ac = measures::wootters_concurrence(&psi.reduced(&[0, 2])?)?.value;
    Ok(FigureIngredients {
        lhs,
        pair_ab: n_ab,
        pair_ac: n_ac,
        residual: lhs * lhs - n_ab * n_ab - n_ac * n_ac,
    })
}

fn figure_rows(ing: &FigureIngredients, grid: &NuGrid) -> Result<Vec<FigureRow>> {
    let mut rows = Vec::new();
    for nu in grid.values() {
        rows.push(FigureRow {
            nu,
            lhs: ing.lhs.powf(nu),
            lemma_bound: monogamy::kappa_half_terms(
                ing.pair_ab * ing.pair_ab,
                ing.pair_ac * ing.pair_ac,
                ing.residual,
                nu,
            )?,
            zhang2021_bound: monogamy::zhang2021(ing.pair_ab, ing.pair_ac, ing.residual, nu)?,
            sum_bound: monogamy::sum_bound(&[ing.pair_ab, ing.pair_ac], nu),
        });
    }
    Ok(rows)
}

fn figure_csv(rows: &[FigureRow]) -> String {
    let mut out = String::from("nu,lhs,lemma_bound,zhang2021_bound,sum_bound\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.nu, r.lhs, r.lemma_bound, r.zhang2021_bound, r.sum_bound
        ));
    }
    out
}

fn cmd_figure(args: FigureArgs) -> Result<i32> {
    let grid = args.grid.grid()?;
    let report = match args.which.as_str() {
        "fig1" => {
            let derived = example1_state_ingredients()?;
            let quoted = example1_quoted_ingredients();
            let ing = if args.paper_values { quoted } else { derived };
            let c_sq_state = derived.lhs * derived.lhs;
            let c_sq_quoted = quoted.lhs * quoted.lhs;
            let consistent = (c_sq_state - c_sq_quoted).abs() <= 1e-9
                && (derived.pair_ac - quoted.pair_ac).abs() <= 1e-9
                && (derived.residual - quoted.residual).abs() <= 1e-9;
            let diagnostics = Fig1Diagnostics {
                state_derived: derived,
                quoted,
                c_sq_state_derived: c_sq_state,
                c_sq_quoted,
                consistent,
            };
            if !diagnostics.consistent && !args.paper_values {
                eprintln!(
                    "note: published ingredient values disagree with the state-derived ones \
                     (C² {} vs {}); using state-derived. Pass --paper-values for the published set.",
                    diagnostics.c_sq_quoted, diagnostics.c_sq_state_derived
                );
            }
            FigureReport {
                which: "fig1".into(),
                paper_values: args.paper_values,
                ingredients: ing,
                diagnostics: Some(diagnostics),
                rows: figure_rows(&ing, &grid)?,
            }
        }
        "fig2" => {
            if args.paper_values {
                return Err(Error::Input(
                    "--paper-values applies to fig1 only".into(),
                ));
            }
            let ing = gsd_example2_ingredients()?;
            FigureReport {
                which: "fig2".into(),
                paper_values: false,
                ingredients: ing,
                diagnostics: None,
                rows: figure_rows(&ing, &grid)?,
            }
        }
        other => return Err(Error::Input(format!("unknown figure `{other}`"))),
    };
    let format = args.out.format.unwrap_or(Format::Csv);
    let text = match format {
        Format::Csv => figure_csv(&report.rows),
        Format::Json => to_json(&report),
        Format::Text => return Err(Error::Input("figure supports --format csv or json".into())),
    };
    emit(&text, &args.out.out)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// random-audit
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct BoundSummary {
    id: monogamy::BoundId,
    min_margin: f64,
    min_margin_state: String,
    min_margin_nu: f64,
}

#[derive(Serialize)]
struct VerdictCounts {
    holds_with_certainty: usize,
    holds_at_best_estimate: usize,
    indeterminate: usize,
    fails_with_certainty: usize,
}

#[derive(Serialize)]
struct RandomAuditSummary {
    dims: Vec<usize>,
    measure_kind: MeasureKind,
    samples: usize,
    seed: u64,
    nu_min: f64,
    nu_max: f64,
    nu_step: f64,
    bounds: Vec<BoundSummary>,
    verdicts: VerdictCounts,
    violations: Vec<String>,
}

fn cmd_random_audit(args: RandomAuditArgs) -> Result<i32> {
    if args.samples < 1 {
        return Err(Error::Input("--samples must be ≥ 1".into()));
    }
    let dims = tensor::DimVector::new(args.dims.clone())?;
    let opts = audit_options(&args.grid, args.tolerance, &args.roof, args.seed)?;
    let kind: MeasureKind = args.measure.into();

    let mut bound_summaries: Vec<BoundSummary> = Vec::new();
    let mut counts = VerdictCounts {
        holds_with_certainty: 0,
        holds_at_best_estimate: 0,
        indeterminate: 0,
        fails_with_certainty: 0,
    };
    let mut violations = Vec::new();

    for i in 0..args.samples {
        let label = format!("haar-{i:05}");
        let psi = states::haar_random_pure(&dims, states::split_seed(args.seed, i as u64));
        let report = monogamy::audit(&psi, args.first, kind, &opts, &label)?;
        for row in &report.rows {
            for b in &row.bounds {
                match b.verdict {
                    monogamy::Verdict::HoldsWithCertainty => counts.holds_with_certainty += 1,
                    monogamy::Verdict::HoldsAtBestEstimate => counts.holds_at_best_estimate += 1,
                    monogamy::Verdict::Indeterminate => counts.indeterminate += 1,
                    monogamy::Verdict::FailsWithCertainty => counts.fails_with_certainty += 1,
                }
                if b.verdict == monogamy::Verdict::FailsWithCertainty
                    && !violations.contains(&label)
                {
                    violations.push(label.clone());
                    eprintln!(
                        "violation: {} at nu={} bound {} margin={}\n{}",
                        label,
                        row.nu,
                        b.id,
                        b.margin,
                        tensor::pure_to_json(&psi)
                    );
                }
                match bound_summaries.iter_mut().find(|s| s.id == b.id) {
                    Some(s) => {
                        if b.margin < s.min_margin {
                            s.min_margin = b.margin;
                            s.min_margin_state = label.clone();
                            s.min_margin_nu = row.nu;
                        }
                    }
                    None => bound_summaries.push(BoundSummary {
                        id: b.id,
                        min_margin: b.margin,
                        min_margin_state: label.clone(),
                        min_margin_nu: row.nu,
                    }),
                }
            }
        }
    }

    let exit = if counts.fails_with_certainty > 0 { 4 } else { 0 };
    let summary = RandomAuditSummary {
        dims: args.dims,
        measure_kind: kind,
        samples: args.samples,
        seed: args.seed,
        nu_min: args.grid.nu_min,
        nu_max: args.grid.nu_max,
        nu_step: args.grid.nu_step,
        bounds: bound_summaries,
        verdicts: counts,
        violations,
    };
    let format = args.out.format.unwrap_or(Format::Json);
    let text = match format {
        Format::Json => to_json(&summary),
        _ => {
            return Err(Error::Input(
                "random-audit supports --format json".into(),
            ))
        }
    };
    emit(&text, &args.out.out)?;
    Ok(exit)
}

// ---------------------------------------------------------------------------
// counterexamples
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ClosedFormRow {
    nu: f64,
    lemma3_rhs: f64,
    reference: f64,
    abs_diff: f64,
}

#[derive(Serialize)]
struct CkwComparison {
    c_sq_full: f64,
    pairwise_sq_sum: f64,
    ckw_violated: bool,
}

#[derive(Serialize)]
struct CounterexampleEntry {
    label: String,
    dims: Vec<usize>,
    /// Known pairwise CRENs (N_cAB, N_cAC) and the A|BC CREN.
    known_pairwise: [f64; 2],
    known_full: f64,
    /// Exact squared ingredients used in the closed-form check.
    pairwise_sq: [f64; 2],
    epsilon: f64,
    /// ‖ρ^{T_A}‖₁ − 1 computed from the state (must equal the known value).
    negativity_direct: f64,
    closed_form_rows: Vec<ClosedFormRow>,
    max_closed_form_diff: f64,
    ckw: CkwComparison,
}

#[derive(Serialize)]
struct CounterexampleReport {
    entries: Vec<CounterexampleEntry>,
}

fn counterexample_entry(
    label: &str,
    psi: &PureState,
    pairwise_sq: [f64; 2],
    epsilon: f64,
) -> Result<CounterexampleEntry> {
    let (n_ab, n_ac, n_full) =
        states::known_cren_ingredients(label).expect("known counterexample");
    let p = Partition::first_vs_rest(0, 3)?;
    let negativity_direct = measures::negativity(&psi.to_density(), &p)?.value;
    let mut rows = Vec::new();
    let mut max_diff = 0.0f64;
    for &nu in &[2.0, 3.0, 4.0, 10.0] {
        let rhs = monogamy::counterexample_bound(pairwise_sq[0], pairwise_sq[1], epsilon, nu)?;
        let reference = 2f64.powf(nu);
        let diff = (rhs - reference).abs();
        max_diff = max_diff.max(diff);
        rows.push(ClosedFormRow {
            nu,
            lemma3_rhs: rhs,
            reference,
            abs_diff: diff,
        });
    }
    // The concurrence analogue: pairwise tangles exceed the one-vs-rest
    // tangle C² = 2(1 − Tr ρ_A²) on these states.
    let c_full = measures::concurrence_pure(psi, &p)?.value;
    let pairwise_sq_sum = pairwise_sq[0] + pairwise_sq[1];
    let c_sq_full = c_full * c_full;
    Ok(CounterexampleEntry {
        label: label.to_string(),
        dims: psi.dims().as_slice().to_vec(),
        known_pairwise: [n_ab, n_ac],
        known_full: n_full,
        pairwise_sq,
        epsilon,
        negativity_direct,
        closed_form_rows: rows,
        max_closed_form_diff: max_diff,
        ckw: CkwComparison {
            c_sq_full,
            pairwise_sq_sum,
            ckw_violated: pairwise_sq_sum > c_sq_full + 1e-9,
        },
    })
}

fn cmd_counterexamples(args: CounterexamplesArgs) -> Result<i32> {
    let ou = states::ou_state();
    let ks = states::kim_sanders_state();
    let report = CounterexampleReport {
        entries: vec![
            counterexample_entry("ou", &ou, [1.0, 1.0], 2.0)?,
            counterexample_entry("kim-sanders", &ks, [8.0 / 9.0, 8.0 / 9.0], 20.0 / 9.0)?,
        ],
    };
    let format = args.out.format.unwrap_or(Format::Json);
    let text = match format {
        Format::Json => to_json(&report),
        _ => {
            return Err(Error::Input(
                "counterexamples supports --format json".into(),
            ))
        }
    };
    emit(&text, &args.out.out)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// croof
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CroofReport {
    state: String,
    dims: Vec<usize>,
    partition: String,
    objective: String,
    measure: MeasureValue,
    ensemble_size: usize,
    member_weights: Vec<f64>,
}

fn cmd_croof(args: CroofArgs) -> Result<i32> {
    let (state, label) = resolve_state(&args.state)?;
    let rho = state.to_density();
    let n = rho.dims().len();
    let partition = resolve_partition(&args.partition, 0, n)?;
    let objective = match args.objective {
        ObjectiveArg::Negativity => RoofObjective::Negativity,
        ObjectiveArg::Concurrence => RoofObjective::Concurrence,
    };
    let cfg = args.roof.config(args.seed);
    let (measure, point) = roof_with_decomposition(&rho, &partition, objective, &cfg)?;
    let report = CroofReport {
        state: label,
        dims: rho.dims().as_slice().to_vec(),
        partition: partition.to_string(),
        objective: match args.objective {
            ObjectiveArg::Negativity => "negativity".into(),
            ObjectiveArg::Concurrence => "concurrence".into(),
        },
        measure,
        ensemble_size: point.ensemble_size,
        member_weights: point.ensemble.iter().map(|(p, _)| *p).collect(),
    };
    let format = args.out.format.unwrap_or(Format::Json);
    let text = match format {
        Format::Json => to_json(&report),
        _ => return Err(Error::Input("croof supports --format json".into())),
    };
    emit(&text, &args.out.out)?;
    Ok(0)
}
