use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fed_core::graph::{load_graph, Graph};
use fed_core::matching::{self, FractionBox, FractionalMatching};
use fed_core::oracle::{
    epr_lambda_max, optimize_thetas, verify_fm_bound, OracleError, SpectrumOptions,
    VariationalOptions, QUBIT_CAP_ENV,
};
use fed_core::ratio::{self, certify, CertifyOptions, DomainMode, KappaMode};
use fed_core::rational::{self, Rational};

#[derive(Parser, Debug)]
#[command(
    name = "fed",
    version,
    about = "Certified approximation ratios for the EPR model via fractional matchings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format; `csv` is only meaningful for `table`.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Largest qubit count the exact oracles will simulate.
    #[arg(long, global = true, env = QUBIT_CAP_ENV, default_value_t = 20)]
    qubit_cap: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify the approximation ratio reached from a matching strategy.
    Certify {
        graph: PathBuf,
        /// mwfm | hfm[:d] | qhfm | constrained:δ,Δ
        #[arg(long, default_value = "qhfm")]
        matching: Strategy,
        /// `auto` solves the max-min problem; a number (or `fixed:v`) pins κ.
        #[arg(long, default_value = "auto")]
        kappa: Kappa,
        /// Inner minimum over the matching's interval or its exact fraction set.
        #[arg(long, value_enum, default_value_t = Domain::Interval)]
        domain: Domain,
        /// Also compute λ_max exactly and report the true ratio.
        #[arg(long)]
        oracle: bool,
        /// Largest common-neighbour set summed term by term.
        #[arg(long, default_value_t = fed_core::magic_state::DEFAULT_ZZ_CAP)]
        zz_cap: usize,
    },
    /// Tabulate r_d and κ_d for regular graphs.
    Table {
        #[arg(long, default_value_t = 10)]
        d_max: usize,
    },
    /// Exact λ_max against the matching upper bound.
    Oracle {
        graph: PathBuf,
        /// Also maximize the magic-state energy over all edge angles.
        #[arg(long)]
        variational: bool,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a fractional matching and its quality ratios.
    Matching {
        graph: PathBuf,
        #[arg(long, default_value = "mwfm")]
        matching: Strategy,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Domain {
    Interval,
    Set,
}

#[derive(Clone, Debug)]
enum Strategy {
    Mwfm,
    Hfm(Option<usize>),
    Qhfm,
    Constrained(Rational, Rational),
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        match (name, arg) {
            ("mwfm", None) => Ok(Self::Mwfm),
            ("qhfm", None) => Ok(Self::Qhfm),
            ("hfm", None) => Ok(Self::Hfm(None)),
            ("hfm", Some(d)) => d
                .parse()
                .ok()
                .filter(|&d| d > 0)
                .map(|d| Self::Hfm(Some(d)))
                .ok_or_else(|| format!("bad degree `{d}`")),
            ("constrained", Some(bounds)) => {
                let (a, b) = bounds.split_once(',').ok_or("expected constrained:δ,Δ")?;
                let parse = |t: &str| rational::parse(t.trim()).map_err(|e| e.to_string());
                let (delta, big_delta) = (parse(a)?, parse(b)?);
                if !rational::is_positive(&delta) || delta > big_delta {
                    return Err(format!("need 0 < δ ≤ Δ, got δ={a} Δ={b}"));
                }
                Ok(Self::Constrained(delta, big_delta))
            }
            _ => Err(format!(
                "unknown matching `{s}` (mwfm, hfm[:d], qhfm, constrained:δ,Δ)"
            )),
        }
    }
}

impl Strategy {
    fn build(&self, g: &Graph) -> Result<FractionalMatching> {
        Ok(match self {
            Self::Mwfm => matching::mwfm(g),
            Self::Qhfm => matching::qhfm(g)?,
            Self::Hfm(d) => {
                let d = match d {
                    Some(d) => *d,
                    None => g
                        .regular_degree()
                        .ok_or_else(|| anyhow!("graph is not regular; pass hfm:d"))?,
                };
                matching::hfm(g, d)?
            }
            Self::Constrained(delta, big_delta) => {
                matching::constrained_fm(g, &FractionBox::from_degrees(delta, big_delta)?)?
            }
        })
    }
}

#[derive(Clone, Copy, Debug)]
struct Kappa(KappaMode);

impl FromStr for Kappa {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Self(KappaMode::Auto));
        }
        let v = s.strip_prefix("fixed:").unwrap_or(s);
        match v.parse::<f64>() {
            Ok(k) if k > 0.0 && k.is_finite() => Ok(Self(KappaMode::Fixed(k))),
            _ => Err(format!("κ must be `auto` or a positive number, got `{s}`")),
        }
    }
}

fn load(path: &Path) -> Result<Graph> {
    load_graph(path).with_context(|| format!("reading {}", path.display()))
}

fn r3(x: f64) -> String {
    // Adding 0.0 turns a rounded -0.0 into 0.0.
    format!("{:.3}", (x * 1e3).round() / 1e3 + 0.0)
}

fn opt3(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), r3)
}

struct Output {
    json: Value,
    text: String,
    csv: Option<String>,
}

fn run_certify(
    cli: &Cli,
    graph: &Path,
    strategy: &Strategy,
    kappa: KappaMode,
    domain: Domain,
    oracle: bool,
    zz_cap: usize,
) -> Result<Output> {
    let g = load(graph)?;
    let fm = strategy.build(&g)?;
    let opts = CertifyOptions {
        domain: match domain {
            Domain::Interval => DomainMode::Interval,
            Domain::Set => DomainMode::Fractions,
        },
        kappa,
        evaluate_energy: true,
        zz_cap,
    };
    let mut cert = certify(&g, &fm, &opts)?;
    if oracle {
        let spectrum_opts = SpectrumOptions {
            qubit_cap: cli.qubit_cap,
            ..Default::default()
        };
        match epr_lambda_max(&g, &spectrum_opts) {
            Ok(res) => cert.attach_lambda_max(res.lambda_max),
            Err(e @ OracleError::TooManyQubits { .. }) => {
                report_warning(cli.format, &e.to_string())
            }
            Err(e) => return Err(e.into()),
        }
    }

    let mut json = serde_json::to_value(&cert)?;
    json["graph"] = json!(graph.display().to_string());
    json["matching_fractions"] = serde_json::to_value(&fm)?["fractions"].clone();

    let mut text = String::new();
    let _ = writeln!(text, "graph        {}", graph.display());
    let _ = writeln!(
        text,
        "vertices     {}  edges {}  simple {}",
        cert.vertex_count, cert.edge_count, cert.simple
    );
    let _ = writeln!(
        text,
        "matching     {} value {} (max {})",
        fm.kind().short_name(),
        cert.matching_value,
        cert.mwfm_value
    );
    let _ = writeln!(
        text,
        "fractions    [{}, {}]",
        cert.fraction_lo, cert.fraction_hi
    );
    let _ = writeln!(text, "kappa*       {}", r3(cert.kappa_star));
    let _ = writeln!(text, "r            {}", r3(cert.r));
    let _ = writeln!(text, "s_hat        {} ({})", cert.s_hat, r3(cert.s_hat_f64));
    let _ = writeln!(text, "guarantee    {}", r3(cert.guarantee));
    let _ = writeln!(text, "energy       {}", opt3(cert.energy));
    let _ = writeln!(text, "vs FM bound  {}", opt3(cert.achieved_ratio));
    if oracle {
        let _ = writeln!(text, "lambda_max   {}", opt3(cert.lambda_max));
        let _ = writeln!(text, "true ratio   {}", opt3(cert.true_ratio));
    }
    Ok(Output {
        json,
        text,
        csv: None,
    })
}

fn run_table(d_max: usize) -> Result<Output> {
    if d_max < 2 {
        bail!("--d-max must be at least 2");
    }
    let mut rows = Vec::new();
    let mut csv = String::from("d,r_d,kappa_d\n");
    let mut text = format!("{:>4}  {:>6}  {:>6}\n", "d", "r_d", "kappa");
    for d in 2..=d_max {
        let sol = ratio::solve_rd(d)?;
        rows.push(json!({ "d": d, "r_d": sol.r, "kappa_d": sol.kappa_star }));
        let _ = writeln!(csv, "{d},{},{}", sol.r, sol.kappa_star);
        let _ = writeln!(text, "{d:>4}  {:>6}  {:>6}", r3(sol.r), r3(sol.kappa_star));
    }
    Ok(Output {
        json: Value::Array(rows),
        text,
        csv: Some(csv),
    })
}

fn run_oracle(
    cli: &Cli,
    graph: &Path,
    variational: bool,
    restarts: usize,
    seed: u64,
) -> Result<Output> {
    let g = load(graph)?;
    let spectrum_opts = SpectrumOptions {
        qubit_cap: cli.qubit_cap,
        ..Default::default()
    };
    let report = verify_fm_bound(&g, &spectrum_opts)?;
    let mut json = serde_json::to_value(&report)?;
    json["graph"] = json!(graph.display().to_string());
    json["simple"] = json!(g.is_simple());
    let mut text = String::new();
    let _ = writeln!(text, "graph        {}", graph.display());
    let _ = writeln!(text, "lambda_max   {}", r3(report.lambda_max));
    let _ = writeln!(text, "FM bound     {}", r3(report.bound));
    let _ = writeln!(text, "slack        {}", r3(report.slack));
    if variational {
        let res = optimize_thetas(
            &g,
            &VariationalOptions {
                restarts,
                seed,
                qubit_cap: cli.qubit_cap,
                ..Default::default()
            },
        )?;
        let _ = writeln!(text, "best energy  {}", r3(res.energy));
        let _ = writeln!(text, "best ratio   {}", r3(res.ratio));
        json["variational"] = serde_json::to_value(&res)?;
    }
    Ok(Output {
        json,
        text,
        csv: None,
    })
}

fn run_matching(graph: &Path, strategy: &Strategy) -> Result<Output> {
    let g = load(graph)?;
    let fm = strategy.build(&g)?;
    let quality = matching::quality(&g, &fm)?;
    let json = json!({
        "graph": graph.display().to_string(),
        "matching": fm,
        "quality": quality,
    });
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{} value {} (max {})",
        fm.kind().short_name(),
        rational::format(fm.value()),
        rational::format(&quality.mwfm_value)
    );
    for (id, e) in g.edges().iter().enumerate() {
        let _ = writeln!(
            text,
            "{} {} {}",
            g.label(e.u),
            g.label(e.v),
            rational::format(fm.fraction(id))
        );
    }
    let _ = writeln!(
        text,
        "s {}  s_hat {}",
        r3(rational::to_f64(&quality.s)),
        r3(rational::to_f64(&quality.s_hat))
    );
    Ok(Output {
        json,
        text,
        csv: None,
    })
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Certify {
            graph,
            matching,
            kappa,
            domain,
            oracle,
            zz_cap,
        } => run_certify(cli, graph, matching, kappa.0, *domain, *oracle, *zz_cap),
        Command::Table { d_max } => run_table(*d_max),
        Command::Oracle {
            graph,
            variational,
            restarts,
            seed,
        } => run_oracle(cli, graph, *variational, *restarts, *seed),
        Command::Matching { graph, matching } => run_matching(graph, matching),
    }
}

fn render(format: Format, out: &Output) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&out.json)? + "\n",
        Format::Text => out.text.clone(),
        Format::Csv => out
            .csv
            .clone()
            .ok_or_else(|| anyhow!("csv output is only available for `table`"))?,
    })
}

fn report_warning(format: Format, message: &str) {
    if format == Format::Json {
        eprintln!("{}", json!({ "warning": message }));
    } else {
        eprintln!("warning: {message}");
    }
}

fn report_error(format: Format, err: &anyhow::Error) {
    if format == Format::Json {
        let chain: Vec<String> = err.chain().map(|e| e.to_string()).collect();
        eprintln!("{}", json!({ "error": err.to_string(), "causes": chain }));
    } else {
        eprintln!("error: {err:#}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        let body = render(cli.format, &out)?;
        match &cli.out {
            Some(path) => {
                std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                print!("{body}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report_error(cli.format, &e);
            ExitCode::FAILURE
        }
    }
}
