//! Command dispatch. Exit status: 0 success or certified, 1 the property
//! failed, 2 bad input.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use fairdiv_core::algorithms::{self, AlgorithmError, OrderChoice, QueryLedger};
use fairdiv_core::divisions::sharing_matrix;
use fairdiv_core::impossibility::{self, ImpossibilityError, PieSearch, SearchCertificate};
use fairdiv_core::measures::{Geometry, PiecewiseConstantMeasure};
use fairdiv_core::strongkprop::{self, StrongError};
use fairdiv_core::{fixtures, ConnectedDivision, Division, FairnessReport, SharingMatrix};
use serde_json::{json, Value};

use crate::io::{self, division_json, InputError, Scenario};
use crate::render;

pub const THREADS_ENV: &str = "FAIRDIV_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fairdiv", version, about = "Exact k-proportional fair-division workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fairness report for a division of a scenario.
    Check {
        #[arg(long)]
        scenario: PathBuf,
        /// Division file; defaults to every division named in the scenario.
        #[arg(long, conflicts_with = "name")]
        division: Option<PathBuf>,
        /// Only check this named division from the scenario.
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Run a constructive protocol.
    Solve {
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        #[arg(long)]
        scenario: PathBuf,
        /// Player order for `equitable`: comma-separated indices or `search`.
        #[arg(long)]
        order: Option<String>,
        #[arg(long)]
        emit_division: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Grid-search certificate for one of the two impossibility results.
    Impossibility {
        #[arg(value_enum)]
        theorem: Which,
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Grid denominator; defaults to 60 on the pie and 40 on the cake.
        #[arg(long)]
        grid: Option<u32>,
        #[arg(long, default_value_t = 3)]
        refine: u32,
        /// Fairness level searched on the pie; defaults to n − 1.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, env = THREADS_ENV, default_value_t = 1)]
        threads: usize,
        /// Include wall time in the JSON certificate.
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        json: bool,
    },
    /// Decide and construct a strong k-proportional division.
    StrongKprop {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        emit_division: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Write the built-in scenarios.
    Fixtures {
        /// Print only this scenario to stdout.
        #[arg(value_enum)]
        name: Option<Fixture>,
        /// Write every scenario into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Player count of the pie and cake counterexamples.
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Algorithm {
    CutChoose,
    LastDiminisher,
    EvenPaz,
    Equitable,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    Pie,
    Cake,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    Pie,
    Cake,
    SixPlayer,
    FourPlayer,
}

impl Fixture {
    pub const ALL: [Fixture; 4] = [Fixture::Pie, Fixture::Cake, Fixture::SixPlayer, Fixture::FourPlayer];

    pub fn file_name(self) -> &'static str {
        match self {
            Fixture::Pie => "pie.json",
            Fixture::Cake => "cake.json",
            Fixture::SixPlayer => "six-player.json",
            Fixture::FourPlayer => "four-player.json",
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error(transparent)]
    Input(Box<InputError>),
    #[error("{0}")]
    Usage(String),
    /// The computation ran but the property does not hold.
    #[error("{0}")]
    Property(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(Box::new(e))
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Property(_) => 1,
            _ => 2,
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Check { scenario, division, name, json } => {
            check(&scenario, division.as_deref(), name.as_deref(), json, out)
        }
        Command::Solve { algorithm, scenario, order, emit_division, json } => {
            solve(algorithm, &scenario, order.as_deref(), emit_division.as_deref(), json, out)
        }
        Command::Impossibility { theorem, n, grid, refine, k, threads, timing, json } => {
            impossibility(theorem, n, grid, refine, k, threads, timing, json, out)
        }
        Command::StrongKprop { scenario, k, emit_division, json } => {
            strong(&scenario, k, emit_division.as_deref(), json, out)
        }
        Command::Fixtures { name, out_dir, n } => fixtures_cmd(name, out_dir.as_deref(), n, out),
    }
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<(), Failure> {
    out.write_all(io::pretty(v).as_bytes())?;
    Ok(())
}

fn matrix_of(d: &Division, s: &Scenario, at: &str) -> Result<SharingMatrix, Failure> {
    sharing_matrix(d, &s.measures).map_err(|e| InputError::Invalid { at: at.into(), message: e.to_string() }.into())
}

fn check(
    scenario: &Path,
    division: Option<&Path>,
    name: Option<&str>,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let s = Scenario::load(scenario)?;
    let selected: Vec<(String, Division)> = match (division, name) {
        (Some(path), _) => vec![(path.display().to_string(), io::load_division(path, s.geometry, s.n())?)],
        (None, Some(name)) => {
            let d =
                s.division(name).ok_or_else(|| Failure::Usage(format!("scenario has no division named {name:?}")))?;
            vec![(name.to_string(), d.clone())]
        }
        (None, None) if s.divisions.is_empty() => {
            return Err(Failure::Usage("scenario names no divisions; pass --division".into()));
        }
        (None, None) => s.divisions.clone(),
    };
    let mut results = Vec::new();
    for (label, d) in &selected {
        let m = matrix_of(d, &s, label)?;
        let report = FairnessReport::new(&m);
        if json {
            results.push(json!({
                "name": label,
                "division": division_json(d),
                "sharing_matrix": render::sharing_json(&m),
                "report": render::report_json(&report),
            }));
        } else {
            writeln!(out, "division {label}")?;
            out.write_all(render::matrix_text(m.entries(), &s.names).as_bytes())?;
            writeln!(out)?;
            out.write_all(render::report_text(&report).as_bytes())?;
            writeln!(out)?;
        }
    }
    if json {
        emit(out, &json!({ "checks": results }))?;
    }
    Ok(0)
}

fn parse_order(text: Option<&str>, n: usize) -> Result<OrderChoice, Failure> {
    match text {
        None => Ok(OrderChoice::Fixed((0..n).collect())),
        Some("search") => Ok(OrderChoice::Search),
        Some(list) => list
            .split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|_| Failure::Usage(format!("bad player index {t:?} in --order")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(OrderChoice::Fixed),
    }
}

fn algorithm_failure(e: AlgorithmError) -> Failure {
    match e {
        AlgorithmError::NoEquitableOrder | AlgorithmError::BracketExhausted { .. } | AlgorithmError::CutUnavailable => {
            Failure::Property(e.to_string())
        }
        other => Failure::Usage(other.to_string()),
    }
}

fn solve(
    algorithm: Algorithm,
    scenario: &Path,
    order: Option<&str>,
    emit_division: Option<&Path>,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let s = Scenario::load(scenario)?;
    if order.is_some() && !matches!(algorithm, Algorithm::Equitable) {
        return Err(Failure::Usage("--order only applies to the equitable algorithm".into()));
    }
    // Protocols run on the cake; a pie is cut open at 0 and the result read
    // back as a pie division.
    let cake: Vec<PiecewiseConstantMeasure> = s.measures.iter().map(|m| m.with_geometry(Geometry::Cake)).collect();
    let ledger = QueryLedger::new();
    let oracles = algorithms::oracles(&cake, &ledger);
    let mut extra = None;
    let result: Result<ConnectedDivision, AlgorithmError> = match algorithm {
        Algorithm::CutChoose => algorithms::cut_and_choose(&oracles),
        Algorithm::LastDiminisher => algorithms::last_diminisher(&oracles),
        Algorithm::EvenPaz => algorithms::even_paz(&oracles),
        Algorithm::Equitable => {
            let order = parse_order(order, s.n())?;
            algorithms::equitable_connected(&oracles, &order).map(|o| {
                extra = Some((o.value, o.order));
                o.division
            })
        }
    };
    let mut d = result.map_err(algorithm_failure)?;
    if s.geometry == Geometry::Pie {
        d = algorithms::reopen_as_pie(&d).map_err(|e| Failure::Property(e.to_string()))?;
    }
    let d = Division::Connected(d);
    let m = matrix_of(&d, &s, "solver output")?;
    let report = FairnessReport::new(&m);
    let counts = ledger.counts();
    if let Some(path) = emit_division {
        io::write(path, &io::pretty(&division_json(&d)))?;
    }
    if json {
        let mut v = json!({
            "algorithm": algorithm.to_possible_value().expect("not skipped").get_name(),
            "division": division_json(&d),
            "sharing_matrix": render::sharing_json(&m),
            "report": render::report_json(&report),
            "ledger": render::ledger_json(&counts),
        });
        if let Some((value, order)) = &extra {
            v["value"] = io::rational_json(value);
            v["order"] = json!(order);
        }
        emit(out, &v)?;
    } else {
        out.write_all(io::pretty(&division_json(&d)).as_bytes())?;
        if let Some((value, order)) = &extra {
            writeln!(out, "common value {} with order {:?}", fairdiv_core::rational::format(value), order)?;
        }
        out.write_all(render::ledger_text(&counts).as_bytes())?;
        writeln!(out)?;
        out.write_all(render::matrix_text(m.entries(), &s.names).as_bytes())?;
        writeln!(out)?;
        out.write_all(render::report_text(&report).as_bytes())?;
    }
    Ok(0)
}

fn search_failure(e: ImpossibilityError) -> Failure {
    match e {
        ImpossibilityError::Fairness(_) | ImpossibilityError::Invalid(_) | ImpossibilityError::Division(_) => {
            Failure::Property(e.to_string())
        }
        other => Failure::Usage(other.to_string()),
    }
}

#[allow(clippy::too_many_arguments)]
fn impossibility(
    which: Which,
    n: usize,
    grid: Option<u32>,
    refine: u32,
    k: Option<usize>,
    threads: usize,
    timing: bool,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    if threads == 0 {
        return Err(Failure::Usage("--threads must be at least 1".into()));
    }
    let cert: SearchCertificate = match which {
        Which::Pie => {
            let mut opts = PieSearch::new(n);
            opts.grid = grid.unwrap_or(opts.grid);
            opts.refine_rounds = refine;
            opts.k = k.unwrap_or(opts.k);
            opts.threads = threads;
            if opts.k < 1 || opts.k > n {
                return Err(Failure::Usage(format!("--k must lie in [1, {n}]")));
            }
            impossibility::certify_pie_impossibility(&opts).map_err(search_failure)?
        }
        Which::Cake => {
            if k.is_some() {
                return Err(Failure::Usage("--k only applies to the pie search".into()));
            }
            impossibility::certify_cake_pareto(n, grid.unwrap_or(40)).map_err(search_failure)?
        }
    };
    if json {
        emit(out, &render::certificate_json(&cert, timing))?;
    } else {
        out.write_all(render::certificate_text(&cert).as_bytes())?;
    }
    Ok(if cert.passed { 0 } else { 1 })
}

fn strong_failure(e: StrongError) -> Failure {
    match e {
        StrongError::TooFewPlayers { .. } | StrongError::KOutOfRange { .. } | StrongError::Measure(_) => {
            Failure::Usage(e.to_string())
        }
        other => Failure::Property(other.to_string()),
    }
}

fn strong(
    scenario: &Path,
    k: usize,
    emit_division: Option<&Path>,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let s = Scenario::load(scenario)?;
    let exists = strongkprop::strong_k_exists(&s.measures, k).map_err(strong_failure)?;
    let classes = strongkprop::equality_classes(&s.measures).map_err(|e| Failure::Usage(e.to_string()))?;
    if !exists {
        let blocking = classes.classes().iter().find(|c| c.len() >= k).cloned().unwrap_or_default();
        if json {
            emit(
                out,
                &json!({ "exists": false, "k": k, "classes": render::classes_json(&classes), "blocking_class": blocking }),
            )?;
        } else {
            writeln!(out, "strong {k}-proportional division does not exist")?;
            writeln!(out, "players {blocking:?} have identical measures")?;
            writeln!(out, "equality classes: {:?}", classes.classes())?;
        }
        return Ok(1);
    }
    let sd = strongkprop::strong_k_division(&s.measures, k).map_err(strong_failure)?;
    let d = Division::General(sd.division.clone());
    // Recompute from the division itself rather than trusting the target.
    let m = matrix_of(&d, &s, "strong division")?;
    let report = FairnessReport::new(&m);
    let verified = report.k_level(k).is_some_and(|l| l.strong.holds) && m == sd.matrix;
    if let Some(path) = emit_division {
        io::write(path, &io::pretty(&division_json(&d)))?;
    }
    if json {
        let mut v = render::strong_json(&sd, &report);
        v["k"] = json!(k);
        v["classes"] = render::classes_json(&classes);
        v["verified"] = json!(verified);
        emit(out, &v)?;
    } else {
        writeln!(out, "strong {k}-proportional division exists")?;
        writeln!(out, "equality classes: {:?}", classes.classes())?;
        writeln!(out, "epsilon = {} after {} halvings", fairdiv_core::rational::format(&sd.epsilon), sd.halvings)?;
        writeln!(out)?;
        out.write_all(render::matrix_text(m.entries(), &s.names).as_bytes())?;
        writeln!(out)?;
        out.write_all(render::report_text(&report).as_bytes())?;
    }
    if verified {
        Ok(0)
    } else {
        Err(Failure::Property(format!("constructed division is not strong {k}-proportional")))
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Built-in scenario with its reference divisions.
pub fn fixture(which: Fixture, n: usize) -> Result<Scenario, String> {
    let scenario = |geometry, names, measures, divisions| Scenario { geometry, names, measures, divisions };
    Ok(match which {
        Fixture::Pie => {
            let ms = impossibility::pie_counterexample(n).map_err(|e| e.to_string())?;
            scenario(Geometry::Pie, names("p", n), ms, vec![])
        }
        Fixture::Cake => {
            let ms = impossibility::cake_counterexample(n).map_err(|e| e.to_string())?;
            let dominating = impossibility::dominating_division(n).map_err(|e| e.to_string())?;
            scenario(Geometry::Cake, names("p", n), ms, vec![("dominating".into(), dominating.into())])
        }
        Fixture::SixPlayer => {
            let ms = fixtures::six_player();
            let exact = strongkprop::exact_division(&ms).map_err(|e| e.to_string())?;
            let names = ["a0", "b0", "c0", "a1", "b1", "c1"].map(String::from).to_vec();
            scenario(Geometry::Cake, names, ms, vec![("exact".into(), exact.into())])
        }
        Fixture::FourPlayer => {
            let ms = fixtures::four_player();
            let d =
                strongkprop::realize_sharing_matrix(&fixtures::four_player_matrix(), &ms).map_err(|e| e.to_string())?;
            scenario(Geometry::Cake, names("p", 4), ms, vec![("example".into(), d.into())])
        }
    })
}

fn fixtures_cmd(name: Option<Fixture>, out_dir: Option<&Path>, n: usize, out: &mut dyn Write) -> Result<i32, Failure> {
    let build = |f| fixture(f, n).map_err(Failure::Usage);
    match (name, out_dir) {
        (Some(f), None) => {
            out.write_all(io::pretty(&io::scenario_file(&build(f)?)).as_bytes())?;
        }
        (None, Some(dir)) => {
            std::fs::create_dir_all(dir)
                .map_err(|source| InputError::Write { path: dir.display().to_string(), source })?;
            for f in Fixture::ALL {
                let path = dir.join(f.file_name());
                io::write(&path, &io::pretty(&io::scenario_file(&build(f)?)))?;
                writeln!(out, "{}", path.display())?;
            }
        }
        _ => return Err(Failure::Usage("give either a fixture name or --out-dir".into())),
    }
    Ok(0)
}
