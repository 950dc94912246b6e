//! `regdist`: one-shot queries against the decision tables, standardization
//! dumps, experiment runs and report tables.
//!
//! Exit codes: 0 when the query was answered (either verdict), 2 for invalid
//! input, 3 when an experiment ran but one of its checks failed, 1 for I/O.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use regdist_core::decide::{atom_requirements, regularity, Family, SpaceSpec, VerdictRecord};
use regdist_core::grammar::parse_sequence;
use regdist_core::lr::LrIndex;
use regdist_core::rational::q_display;
use regdist_core::report::{classical_report, example48_report};
use regdist_core::seqcore::{describe_exponents, ParamSequence};
use regdist_core::standardize::{beta_log2, build_map, lr_transfer_check, to_csv};
use regdist_core::verify::config::{run_experiment, Config, Experiment};
use regdist_core::Error;

#[derive(Parser)]
#[command(
    name = "regdist",
    version,
    about = "Regular-distribution content of generalized Besov and Triebel-Lizorkin spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Is every element of the space a regular distribution?
    Decide(SpaceArgs),
    /// Dump k(j), the standardized sequence and the constants of the map.
    Standardize(StandardizeArgs),
    /// Ratio bounds and Boyd indices of a sequence.
    Boyd(BoydArgs),
    /// Smallest admissible atom orders M and L.
    Atoms(SpaceArgs),
    /// Run an experiment from a `key = value` config file.
    Verify(VerifyArgs),
    /// Regenerate a markdown table.
    Report(ReportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Markdown,
}

#[derive(Args)]
struct SpaceArgs {
    /// B or F
    family: String,
    #[arg(short = 'n', default_value_t = 1)]
    n: u32,
    /// decimal, rational p/q or inf
    #[arg(short = 'p')]
    p: String,
    #[arg(short = 'q')]
    q: String,
    #[arg(long, default_value = "1")]
    sigma: String,
    #[arg(long = "N", default_value = "2^(1*j)")]
    big_n: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct StandardizeArgs {
    #[arg(long, default_value = "1")]
    sigma: String,
    #[arg(long = "N", default_value = "2^(1*j)")]
    big_n: String,
    /// table depth J
    #[arg(short = 'J', default_value_t = 32)]
    depth: usize,
    /// also run the l_r transfer check at this index
    #[arg(short = 'r')]
    r: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct BoydArgs {
    #[arg(long)]
    sigma: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// lacunary | extremal_series | extremal_integral | case3
    experiment: String,
    #[arg(long)]
    config: PathBuf,
    /// output directory; defaults to $REGDIST_OUT, then the current directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// classical | example48
    kind: String,
}

enum Failure {
    Invalid(String),
    Checks(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => Failure::Io(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

fn seq(flag: &str, text: &str) -> Result<ParamSequence, Failure> {
    parse_sequence(text).map_err(|e| Failure::Invalid(format!("--{flag} '{text}': {e}")))
}

fn index(flag: &str, text: &str) -> Result<LrIndex, Failure> {
    LrIndex::parse(text).map_err(|e| Failure::Invalid(format!("-{flag} '{text}': {e}")))
}

fn space(a: &SpaceArgs) -> Result<SpaceSpec, Failure> {
    let family: Family = a.family.parse().map_err(Failure::from)?;
    let spec = SpaceSpec::new(
        family,
        a.n,
        index("p", &a.p)?,
        index("q", &a.q)?,
        seq("sigma", &a.sigma)?,
        seq("N", &a.big_n)?,
    )?;
    Ok(spec)
}

fn pretty(v: &impl serde::Serialize) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::Io(e.to_string()))
}

fn unsupported(format: Format, cmd: &str) -> Failure {
    let name = match format {
        Format::Json => "json",
        Format::Csv => "csv",
        Format::Markdown => "markdown",
    };
    Failure::Invalid(format!("{cmd} does not support --format {name}"))
}

fn decide(a: &SpaceArgs) -> Result<String, Failure> {
    let spec = space(a)?;
    let verdict = regularity(&spec)?;
    let rec = VerdictRecord::new(&spec, &verdict);
    match a.format {
        Format::Json => pretty(&rec),
        Format::Markdown => Ok(format!(
            "| space | case | condition | index | contained |\n|---|---|---|---|---|\n| {}({}, {}, n={}) | {} | {} | {} | {} |\n\n{}",
            rec.family,
            rec.p,
            rec.q,
            rec.n,
            rec.case_id,
            verdict.tested_sequence,
            rec.index_r,
            if verdict.contained { "yes" } else { "no" },
            rec.explanation
        )),
        Format::Csv => Err(unsupported(a.format, "decide")),
    }
}

fn atoms(a: &SpaceArgs) -> Result<String, Failure> {
    let spec = space(a)?;
    let req = atom_requirements(&spec.sigma, &spec.big_n, spec.n, &spec.p, &spec.q, spec.family)?;
    let moments = if req.needs_moments() {
        format!("moments up to order {}", req.l_min)
    } else {
        "no moment conditions".to_string()
    };
    match a.format {
        Format::Json => pretty(&json!({
            "family": spec.family,
            "M_min": req.m_min,
            "M_bound": q_display(&req.m_bound),
            "L_min": req.l_min,
            "L_bound": q_display(&req.l_bound),
            "moments": moments,
        })),
        Format::Markdown => Ok(format!(
            "| M_min | M > | L_min | L > | moments |\n|---|---|---|---|---|\n| {} | {} | {} | {} | {} |",
            req.m_min,
            q_display(&req.m_bound),
            req.l_min,
            q_display(&req.l_bound),
            moments
        )),
        Format::Csv => Err(unsupported(a.format, "atoms")),
    }
}

fn standardize(a: &StandardizeArgs) -> Result<String, Failure> {
    let sigma = seq("sigma", &a.sigma)?;
    let big_n = seq("N", &a.big_n)?;
    let map = build_map(&sigma, &big_n, a.depth)?;
    let transfer = match &a.r {
        Some(r) => Some(lr_transfer_check(&sigma, &big_n, &index("r", r)?, a.depth)?),
        None => None,
    };
    match a.format {
        Format::Csv => Ok(to_csv(&map, &sigma).trim_end().to_string()),
        Format::Json => {
            let beta = beta_log2(&map, &sigma)?;
            let mut out = json!({
                "sigma": sigma.to_string(),
                "N": big_n.to_string(),
                "kappa0": map.kappa0,
                "kappa1": map.kappa1,
                "j0": map.j0,
                "c0": map.c0,
                "mu0": map.mu0,
                "mu1": map.mu1,
                "k": map.k,
                "log2_beta": beta,
            });
            if let Some(t) = transfer {
                out["transfer"] = json!({
                    "r": t.r,
                    "log2_A": t.log2_a,
                    "log2_B": t.log2_b_plain,
                    "upper_holds": t.upper_holds,
                    "lower_holds": t.lower_holds,
                    "symbolic": t.symbolic,
                });
            }
            pretty(&out)
        }
        Format::Markdown => {
            let mut s = format!(
                "kappa0 = {}, kappa1 = {}, j0 = {}, c0 = {}, mu0 = {}, mu1 = {}\n\n| j | k(j) |\n|---|---|\n",
                map.kappa0, map.kappa1, map.j0, map.c0, map.mu0, map.mu1
            );
            for (j, k) in map.k.iter().enumerate() {
                s.push_str(&format!("| {j} | {k} |\n"));
            }
            Ok(s.trim_end().to_string())
        }
    }
}

fn boyd(a: &BoydArgs) -> Result<String, Failure> {
    let sigma = seq("sigma", &a.sigma)?;
    let adm = sigma.admissibility_bounds();
    let b = sigma.boyd_indices();
    match a.format {
        Format::Json => pretty(&json!({
            "sigma": sigma.to_string(),
            "exponents": describe_exponents(&sigma),
            "alpha": q_display(&b.alpha),
            "beta": q_display(&b.beta),
            "d0": adm.d0,
            "d0_at": adm.d0_at,
            "d1": adm.d1,
            "d1_at": adm.d1_at,
            "admissible": adm.is_admissible,
            "assumption_N": adm.satisfies_assumption_n,
        })),
        Format::Markdown => Ok(format!(
            "| sequence | alpha | beta | d0 | d1 | assumption on N |\n|---|---|---|---|---|---|\n| {} | {} | {} | {} | {} | {} |",
            sigma,
            q_display(&b.alpha),
            q_display(&b.beta),
            adm.d0,
            adm.d1,
            adm.satisfies_assumption_n
        )),
        Format::Csv => Err(unsupported(a.format, "boyd")),
    }
}

fn verify(a: &VerifyArgs) -> Result<String, Failure> {
    let kind: Experiment = a.experiment.parse()?;
    let cfg = Config::load(&a.config).map_err(|e| match e {
        Error::Io(io) => Failure::Invalid(format!("--config {}: {io}", a.config.display())),
        other => other.into(),
    })?;
    let out = a
        .out
        .clone()
        .or_else(|| std::env::var_os("REGDIST_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let manifest = run_experiment(kind, &cfg, &out)?;
    let text = pretty(&manifest)?;
    if manifest.passed {
        Ok(text)
    } else {
        Err(Failure::Checks(text))
    }
}

fn report(a: &ReportArgs) -> Result<String, Failure> {
    let text = match a.kind.as_str() {
        "classical" => classical_report()?,
        "example48" => example48_report()?,
        other => {
            return Err(Failure::Invalid(format!(
                "unknown report '{other}'; expected classical or example48"
            )))
        }
    };
    Ok(text.trim_end().to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Decide(a) => decide(a),
        Command::Standardize(a) => standardize(a),
        Command::Boyd(a) => boyd(a),
        Command::Atoms(a) => atoms(a),
        Command::Verify(a) => verify(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(text) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Checks(manifest)) => {
            println!("{manifest}");
            eprintln!("error: experiment checks failed");
            ExitCode::from(3)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
