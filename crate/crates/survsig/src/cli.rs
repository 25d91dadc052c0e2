//! Command-line front end: model ingestion, query dispatch, and
//! deterministic table/curve output.
//!
//! Subcommands: `check`, `signature`, `joint`, `survival`, `marginal`,
//! `conditional`, `simulate`. Results go to standard output, diagnostics
//! to standard error. Exit status: 0 on success, 1 when the model or
//! query is invalid, 2 when the command line itself is malformed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::lifetimes::LifetimeDistribution;
use crate::model::{mask_label, SharedModel};
use crate::modelfile::LoadedModel;
use crate::oracle;
use crate::order::{PairOrder, TripleOrder};
use crate::reliability::{standalone_survival, SurvivalEvaluator};
use crate::signature::{
    format_probability, joint_signature_three, merged_signature, survival_signature_single,
    variant_signature, EventKind, SignatureTable, DEFAULT_BUDGET,
};

#[derive(Parser, Debug)]
#[command(
    name = "survsig",
    version,
    about = "Exact survival signatures and reliability of coherent systems with shared components"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a model file and report systems, sharing and coherence
    Check(CheckArgs),
    /// Print the survival signature table of a single system
    Signature(SignatureArgs),
    /// Print the joint (or variant-event) signature table of the systems
    Joint(JointArgs),
    /// Joint survival probability at given times or over a grid
    Survival(SurvivalArgs),
    /// Marginal survival probability of one system
    Marginal(MarginalArgs),
    /// Conditional survival of one system given another's status
    Conditional(ConditionalArgs),
    /// Monte-Carlo estimate of joint survival, with standard errors
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Cap on configurations the exact table solver may enumerate
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct TimeArgs {
    /// Observation time of the first selected system
    #[arg(long, allow_negative_numbers = true)]
    t1: Option<f64>,
    /// Observation time of the second selected system
    #[arg(long, allow_negative_numbers = true)]
    t2: Option<f64>,
    /// Observation time of the third selected system
    #[arg(long, allow_negative_numbers = true)]
    t3: Option<f64>,
    /// Sweep every unfixed time axis over start:stop:step (inclusive)
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Model file (JSON)
    file: PathBuf,
}

#[derive(Args, Debug)]
struct SignatureArgs {
    /// Model file (JSON)
    file: PathBuf,
    /// System to compute (defaults to the file's only system)
    #[arg(long)]
    systems: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct JointArgs {
    /// Model file (JSON)
    file: PathBuf,
    /// Comma-separated system names (defaults to all declared systems)
    #[arg(long)]
    systems: Option<String>,
    /// Time ordering: earlier|same|later, a rank string like 1<2=3, or
    /// `any` for the union over all orderings
    #[arg(long, default_value = "any")]
    order: String,
    /// Event: both|s1not2|s2not1|s1only|s2only|neither
    #[arg(long, default_value = "both")]
    event: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SurvivalArgs {
    /// Model file (JSON)
    file: PathBuf,
    /// Comma-separated system names (defaults to all declared systems)
    #[arg(long)]
    systems: Option<String>,
    #[command(flatten)]
    times: TimeArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct MarginalArgs {
    /// Model file (JSON)
    file: PathBuf,
    /// System to compute (defaults to the file's only system)
    #[arg(long)]
    systems: Option<String>,
    /// Observation time
    #[arg(long, allow_negative_numbers = true)]
    t1: Option<f64>,
    /// Sweep the time over start:stop:step (inclusive)
    #[arg(long)]
    grid: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ConditionalArgs {
    /// Model file (JSON)
    file: PathBuf,
    /// Two comma-separated system names (defaults to the file's two)
    #[arg(long)]
    systems: Option<String>,
    /// Conditioning system and status, e.g. S2:functioning or S2:failed
    #[arg(long)]
    given: String,
    /// Time at which the subject system's survival is evaluated
    #[arg(long, allow_negative_numbers = true)]
    t1: Option<f64>,
    /// Time at which the conditioning system's status was observed
    #[arg(long, allow_negative_numbers = true)]
    t2: Option<f64>,
    /// Sweep unfixed times over start:stop:step (inclusive)
    #[arg(long)]
    grid: Option<String>,
    /// Require both systems alive at --t1 (needs --given ...:functioning
    /// and --t1 greater than --t2)
    #[arg(long)]
    joint: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Model file (JSON)
    file: PathBuf,
    /// Comma-separated system names (defaults to all declared systems)
    #[arg(long)]
    systems: Option<String>,
    #[command(flatten)]
    times: TimeArgs,
    /// Random seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of simulated component lifetimes vectors
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

/// Failures split by exit status: 1 for invalid models or queries, 2 for
/// malformed command lines.
#[derive(Debug)]
enum CliError {
    Validation(String),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Validation(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Check(args) => check(args),
        Command::Signature(args) => signature(args),
        Command::Joint(args) => joint(args),
        Command::Survival(args) => survival(args),
        Command::Marginal(args) => marginal(args),
        Command::Conditional(args) => conditional(args),
        Command::Simulate(args) => simulate(args),
    }
}

fn load(path: &Path) -> Result<LoadedModel, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    Ok(LoadedModel::from_json_str(&text)?)
}

fn split_systems(spec: &str) -> Result<Vec<String>, CliError> {
    let names: Vec<String> = spec.split(',').map(|s| s.trim().to_string()).collect();
    if names.iter().any(String::is_empty) {
        return Err(usage("--systems must be a comma-separated list of system names"));
    }
    Ok(names)
}

fn selected_names(loaded: &LoadedModel, systems: &Option<String>) -> Result<Vec<String>, CliError> {
    match systems {
        Some(spec) => split_systems(spec),
        None => Ok(loaded.systems().iter().map(|s| s.name().to_string()).collect()),
    }
}

fn single_name(loaded: &LoadedModel, systems: &Option<String>, what: &str) -> Result<String, CliError> {
    let names = selected_names(loaded, systems)?;
    if names.len() != 1 {
        return Err(usage(format!(
            "{what} takes exactly one system; the file declares {}, pick one with --systems",
            loaded.systems().len()
        )));
    }
    loaded.system(&names[0])?;
    Ok(names.into_iter().next().expect("one name"))
}

fn shared_model(loaded: &LoadedModel, names: &[String]) -> Result<SharedModel, CliError> {
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok(loaded.shared_subset(&refs)?)
}

/// Inclusive arithmetic grid `start:stop:step`.
#[derive(Debug, Clone, Copy)]
struct Grid {
    start: f64,
    stop: f64,
    step: f64,
}

impl Grid {
    fn parse(spec: &str) -> Result<Grid, CliError> {
        let bad = || {
            usage(format!(
                "invalid --grid `{spec}`: expected start:stop:step with 0 <= start <= stop and step > 0"
            ))
        };
        let parts: Vec<f64> = spec
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        let [start, stop, step] = parts.as_slice() else {
            return Err(bad());
        };
        let (start, stop, step) = (*start, *stop, *step);
        if !(start.is_finite() && stop.is_finite() && step.is_finite())
            || start < 0.0
            || stop < start
            || step <= 0.0
        {
            return Err(bad());
        }
        if (stop - start) / step > 100_000.0 {
            return Err(usage(format!("--grid `{spec}` has over 100000 points")));
        }
        Ok(Grid { start, stop, step })
    }

    fn values(&self) -> Vec<f64> {
        let mut values = Vec::new();
        let mut i: u64 = 0;
        loop {
            let v = self.start + i as f64 * self.step;
            if v > self.stop + self.step * 1e-9 {
                return values;
            }
            values.push(v.min(self.stop));
            i += 1;
        }
    }
}

/// Expands explicit times and an optional grid into the list of time
/// tuples to evaluate, first axis slowest. At most two axes may be swept.
fn resolve_times(
    axes: usize,
    explicit: [Option<f64>; 3],
    grid: &Option<String>,
) -> Result<Vec<Vec<f64>>, CliError> {
    for (i, t) in explicit.iter().enumerate().skip(axes) {
        if t.is_some() {
            return Err(usage(format!(
                "--t{} does not apply to a selection of {axes} system(s)",
                i + 1
            )));
        }
    }
    let free: Vec<usize> = (0..axes).filter(|i| explicit[*i].is_none()).collect();
    let Some(grid) = grid else {
        if let Some(i) = free.first() {
            return Err(usage(format!("missing --t{} (or use --grid)", i + 1)));
        }
        return Ok(vec![explicit[..axes].iter().map(|t| t.unwrap()).collect()]);
    };
    let grid = Grid::parse(grid)?;
    let values = grid.values();
    let mut base: Vec<f64> = explicit[..axes].iter().map(|t| t.unwrap_or(0.0)).collect();
    match *free.as_slice() {
        [] => Err(usage("--grid given but every time is already fixed")),
        [a] => Ok(values
            .iter()
            .map(|&v| {
                base[a] = v;
                base.clone()
            })
            .collect()),
        [a, b] => {
            let mut tuples = Vec::with_capacity(values.len() * values.len());
            for &va in &values {
                for &vb in &values {
                    base[a] = va;
                    base[b] = vb;
                    tuples.push(base.clone());
                }
            }
            Ok(tuples)
        }
        _ => Err(usage(
            "--grid sweeps at most two time axes; fix the rest with --t1/--t2/--t3",
        )),
    }
}

fn describe(dist: &LifetimeDistribution) -> String {
    match dist {
        LifetimeDistribution::Exponential { rate } => format!("exponential(rate = {rate})"),
        LifetimeDistribution::Weibull { shape, scale } => {
            format!("weibull(shape = {shape}, scale = {scale})")
        }
        LifetimeDistribution::Empirical { points, interpolate } => format!(
            "empirical({} breakpoint(s), {})",
            points.len(),
            if *interpolate { "interpolated" } else { "step" }
        ),
    }
}

fn render_table(table: &SignatureTable, format: Format) -> String {
    match format {
        Format::Json => {
            let mut out = table.to_json_string();
            out.push('\n');
            out
        }
        Format::Csv => table.to_csv(),
    }
}

/// Tabular numeric output: a time tuple per row plus one or two values.
struct Points {
    command: &'static str,
    /// Extra JSON members, already encoded (key-value text).
    extras: Vec<String>,
    time_labels: Vec<&'static str>,
    value_labels: Vec<&'static str>,
    rows_key: &'static str,
    rows: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Points {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = String::new();
                let mut header: Vec<&str> = self.time_labels.clone();
                header.extend(&self.value_labels);
                out.push_str(&header.join(","));
                out.push('\n');
                for (times, values) in &self.rows {
                    let cells: Vec<String> = times
                        .iter()
                        .chain(values)
                        .map(|x| format_probability(*x))
                        .collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let mut out = String::from("{\n");
                let _ = writeln!(out, "  \"command\": \"{}\",", self.command);
                for extra in &self.extras {
                    let _ = writeln!(out, "  {extra},");
                }
                let _ = writeln!(out, "  \"{}\": [", self.rows_key);
                for (i, (times, values)) in self.rows.iter().enumerate() {
                    let mut fields: Vec<String> = Vec::new();
                    for (label, t) in self.time_labels.iter().zip(times) {
                        fields.push(format!("\"{label}\": {}", format_probability(*t)));
                    }
                    for (label, v) in self.value_labels.iter().zip(values) {
                        fields.push(format!("\"{label}\": {}", format_probability(*v)));
                    }
                    let comma = if i + 1 < self.rows.len() { "," } else { "" };
                    let _ = writeln!(out, "    {{{}}}{comma}", fields.join(", "));
                }
                out.push_str("  ]\n}\n");
                out
            }
        }
    }
}

fn json_string_list(names: &[String]) -> String {
    let quoted: Vec<String> = names.iter().map(|n| format!("\"{n}\"")).collect();
    format!("[{}]", quoted.join(", "))
}

fn check(args: &CheckArgs) -> Result<String, CliError> {
    let loaded = load(&args.file)?;
    let mut out = String::new();
    let _ = writeln!(out, "systems: {}", loaded.systems().len());
    for system in loaded.systems() {
        let report = system.structure().verify_coherent()?;
        let paths = system.structure().minimal_path_sets()?;
        let _ = writeln!(
            out,
            "  {}: coherence PASS ({} components, {} minimal path sets)",
            system.name(),
            report.component_count,
            paths.len()
        );
    }
    let _ = writeln!(
        out,
        "components: {} across {} type(s)",
        loaded.components().len(),
        loaded.types().len()
    );
    for (name, dist) in loaded.types().iter().zip(loaded.distributions()) {
        let _ = writeln!(out, "  type {name}: {}", describe(dist));
    }
    if loaded.systems().len() >= 2 {
        let model = loaded.shared()?;
        let counts = model.group_counts();
        let masks = model.group_masks();
        let header: Vec<String> = masks.iter().map(|m| format!("n_{}", mask_label(*m))).collect();
        let _ = writeln!(out, "sharing counts ({}):", header.join(", "));
        for (ty, name) in model.types().iter().enumerate() {
            let tuple: Vec<String> = masks
                .iter()
                .map(|m| counts.count(ty, *m).to_string())
                .collect();
            let _ = writeln!(out, "  type {name}: ({})", tuple.join(", "));
        }
        if model.unused_components().is_empty() {
            let _ = writeln!(out, "unused components: none");
        } else {
            let names: Vec<String> = model
                .unused_components()
                .iter()
                .map(|c| c.to_string())
                .collect();
            let _ = writeln!(out, "unused components: {}", names.join(", "));
        }
        let _ = writeln!(
            out,
            "systems share components: {}",
            if model.is_independent() { "no" } else { "yes" }
        );
    }
    Ok(out)
}

fn signature(args: &SignatureArgs) -> Result<String, CliError> {
    let loaded = load(&args.file)?;
    let name = single_name(&loaded, &args.systems, "signature")?;
    let system = loaded.system(&name)?;
    let table = survival_signature_single(
        system.structure(),
        loaded.components(),
        loaded.types(),
        args.output.budget,
    )?;
    Ok(render_table(&table, args.output.format))
}

fn parse_event(spec: &str) -> Result<EventKind, CliError> {
    match EventKind::parse(spec) {
        Ok(EventKind::SingleSystem) | Err(_) => Err(usage(format!(
            "invalid --event `{spec}`: use both, s1not2, s2not1, s1only, s2only or neither"
        ))),
        Ok(event) => Ok(event),
    }
}

fn joint(args: &JointArgs) -> Result<String, CliError> {
    let loaded = load(&args.file)?;
    let names = selected_names(&loaded, &args.systems)?;
    let model = shared_model(&loaded, &names)?;
    let event = parse_event(&args.event)?;
    if event != EventKind::AllFunction && model.system_count() != 2 {
        return Err(usage("events other than `both` need exactly two systems"));
    }
    let table = if args.order == "any" {
        merged_signature(&model, event, args.output.budget)?
    } else if model.system_count() == 2 {
        let order = PairOrder::parse(&args.order).map_err(|_| {
            usage(format!(
                "invalid --order `{}` for two systems: use earlier, same, later or any",
                args.order
            ))
        })?;
        variant_signature(&model, order, event, args.output.budget)?
    } else {
        let order = TripleOrder::parse(&args.order).map_err(|_| {
            usage(format!(
                "invalid --order `{}` for three systems: use a rank string like 1<2=3, or any",
                args.order
            ))
        })?;
        joint_signature_three(&model, order, args.output.budget)?
    };
    Ok(render_table(&table, args.output.format))
}

fn survival(args: &SurvivalArgs) -> Result<String, CliError> {
    let loaded = load(&args.file)?;
    let names = selected_names(&loaded, &args.systems)?;
    if names.is_empty() || names.len() > 3 {
        return Err(usage("survival takes one to three systems"));
    }
    let tuples = resolve_times(
        names.len(),
        [args.times.t1, args.times.t2, args.times.t3],
        &args.times.grid,
    )?;
    let mut rows = Vec::with_capacity(tuples.len());
    if names.len() == 1 {
        let system = loaded.system(&names[0])?;
        for t in tuples {
            let p = standalone_survival(
                system.structure(),
                loaded.components(),
                loaded.types(),
                loaded.distributions(),
                t[0],
                args.output.budget,
            )?;
            rows.push((t, vec![p]));
        }
    } else {
        let model = shared_model(&loaded, &names)?;
        let evaluator = SurvivalEvaluator::with_budget(
            &model,
            loaded.distributions().to_vec(),
            args.output.budget,
        )?;
        for t in tuples {
            let p = match names.len() {
                2 => evaluator.joint_survival_two(t[0], t[1])?,
                _ => evaluator.joint_survival_three(t[0], t[1], t[2])?,
            };
            rows.push((t, vec![p]));
        }
    }
    let points = Points {
        command: "survival",
        extras: vec![format!("\"systems\": {}", json_string_list(&names))],
        time_labels: ["t_1", "t_2", "t_3"][..names.len()].to_vec(),
        value_labels: vec!["probability"],
        rows_key: "points",
        rows,
    };
    Ok(points.render(args.output.format))
}

fn marginal(args: &MarginalArgs) -> Result<String, CliError> {
    let loaded = load(&args.file)?;
    let name = single_name(&loaded, &args.systems, "marginal")?;
    let tuples = resolve_times(1, [args.t1, None, None], &args.grid)?;
    let mut rows = Vec::with_capacity(tuples.len());
    if loaded.systems().len() == 1 {
        let system = loaded.system(&name)?;
        for t in tuples {
            let p = standalone_survival(
                system.structure(),
                loaded.components(),
                loaded.types(),
                loaded.distributions(),
                t[0],
                args.output.budget,
            )?;
            rows.push((t, vec![p]));
        }
    } else {
        let model = loaded.shared()?;
        let evaluator = SurvivalEvaluator::with_budget(
            &model,
            loaded.distributions().to_vec(),
            args.output.budget,
        )?;
        for t in tuples {
            let p = evaluator.marginal_survival(&name, t[0])?;
            rows.push((t, vec![p]));
        }
    }
    let points = Points {
        command: "marginal",
        extras: vec![format!("\"system\": \"{name}\"")],
        time_labels: vec!["t"],
        value_labels: vec!["probability"],
        rows_key: "points",
        rows,
    };
    Ok(points.render(args.output.format))
}

fn conditional(args: &ConditionalArgs) -> Result<String, CliError> {
    let loaded = load(&args.file)?;
    let (given_name, functioning) = match args.given.split_once(':') {
        Some((name, "functioning")) => (name.to_string(), true),
        Some((name, "failed")) => (name.to_string(), false),
        _ => {
            return Err(usage(format!(
                "invalid --given `{}`: use SYSTEM:functioning or SYSTEM:failed",
                args.given
            )))
        }
    };
    if args.joint && !functioning {
        return Err(usage("--joint applies only to --given SYSTEM:functioning"));
    }
    let names = selected_names(&loaded, &args.systems)?;
    if names.len() != 2 {
        return Err(usage("conditional takes exactly two systems"));
    }
    if !names.contains(&given_name) {
        return Err(usage(format!(
            "--given system `{given_name}` is not among the selected systems"
        )));
    }
    let subject = names
        .iter()
        .find(|n| **n != given_name)
        .ok_or_else(|| usage("the subject and conditioning systems must differ"))?
        .clone();
    // The evaluator conditions on its second system.
    let model = shared_model(&loaded, &[subject.clone(), given_name.clone()])?;
    let evaluator = SurvivalEvaluator::with_budget(
        &model,
        loaded.distributions().to_vec(),
        args.output.budget,
    )?;
    let tuples = resolve_times(2, [args.t1, args.t2, None], &args.grid)?;
    let mut rows = Vec::with_capacity(tuples.len());
    for t in tuples {
        let p = match (functioning, args.joint) {
            (true, false) => evaluator.conditional_survival_given_functioning(t[0], t[1])?,
            (true, true) => evaluator.conditional_joint_survival(t[0], t[1])?,
            (false, _) => evaluator.conditional_survival_given_failed(t[0], t[1])?,
        };
        rows.push((t, vec![p]));
    }
    let state = if functioning { "functioning" } else { "failed" };
    let points = Points {
        command: "conditional",
        extras: vec![
            format!("\"system\": \"{subject}\""),
            format!("\"given\": {{\"system\": \"{given_name}\", \"state\": \"{state}\"}}"),
            format!("\"joint\": {}", args.joint),
        ],
        time_labels: vec!["t", "t_2"],
        value_labels: vec!["probability"],
        rows_key: "points",
        rows,
    };
    Ok(points.render(args.output.format))
}

fn simulate(args: &SimulateArgs) -> Result<String, CliError> {
    let loaded = load(&args.file)?;
    let names = selected_names(&loaded, &args.systems)?;
    if names.len() < 2 || names.len() > 3 {
        return Err(usage("simulate takes two or three systems"));
    }
    if args.samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let model = shared_model(&loaded, &names)?;
    let tuples = resolve_times(
        names.len(),
        [args.times.t1, args.times.t2, args.times.t3],
        &args.times.grid,
    )?;
    let run = oracle::simulate_failure_times(&model, loaded.distributions(), args.seed, args.samples)?;
    let mut rows = Vec::with_capacity(tuples.len());
    for t in tuples {
        let (estimate, stderr) = oracle::estimate_joint_survival(&run, &t)?;
        rows.push((t, vec![estimate, stderr]));
    }
    let points = Points {
        command: "simulate",
        extras: vec![
            format!("\"systems\": {}", json_string_list(&names)),
            format!("\"seed\": {}", args.seed),
            format!("\"samples\": {}", args.samples),
            format!("\"generator\": \"{}\"", oracle::GENERATOR_ID),
        ],
        time_labels: ["t_1", "t_2", "t_3"][..names.len()].to_vec(),
        value_labels: vec!["estimate", "stderr"],
        rows_key: "estimates",
        rows,
    };
    Ok(points.render(args.format))
}
