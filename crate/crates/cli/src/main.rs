use std::path::PathBuf;
use std::process::ExitCode;

use charsum_cli::campaign::run_to_output;
use charsum_cli::config::{parse_list, parse_range};
use charsum_cli::engine::Checks;
use charsum_cli::{run_case, CampaignConfig, CaseSpec, CliError, CliResult, Family};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "charsum",
    version,
    about = "Exact mixed character sums modulo prime powers: evaluation, bounds and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate S(χ, g, f, p^m) directly and through the reductions.
    Eval(CaseArgs),
    /// Classify the sum and list every applicable bound.
    Bound(CaseArgs),
    /// Print the reduction trace of the fast evaluator.
    Reduce(CaseArgs),
    /// Run a verification campaign.
    Verify(VerifyArgs),
    /// Run the built-in small campaign (p ∈ {3, 5}, m ≤ 3, monomials, all characters).
    Selftest {
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Args)]
struct CaseArgs {
    /// Prime p.
    #[arg(long)]
    p: u64,
    /// Exponent m of the modulus p^m.
    #[arg(long)]
    m: u32,
    /// Additive argument, e.g. "x^3 + 2/x".
    #[arg(long)]
    f: String,
    /// Multiplicative argument.
    #[arg(long, default_value = "1")]
    g: String,
    /// Character index c (principal when omitted).
    #[arg(long)]
    chi: Option<u64>,
    /// Sign component for p = 2.
    #[arg(long)]
    kappa: Option<u8>,
    /// Print one JSON object instead of the text summary.
    #[arg(long)]
    json: bool,
    /// Append the reduction trace.
    #[arg(long)]
    trace: bool,
    /// Skip direct summation above this modulus.
    #[arg(long, default_value_t = 78_125)]
    max_q: u64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated primes.
    #[arg(long)]
    p: Option<String>,
    /// Exponent range a..b or a single exponent.
    #[arg(long)]
    m: Option<String>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory for cases.csv, cases.jsonl and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest modulus p^m enumerated.
    #[arg(long)]
    max_q: Option<u64>,
    /// Extra `key=value` overrides.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn case(
    args: &CaseArgs,
    traced: bool,
    render: impl Fn(&charsum_cli::single::CaseOutcome) -> String,
) -> CliResult<()> {
    let spec = CaseSpec {
        p: args.p,
        m: args.m,
        f: args.f.clone(),
        g: args.g.clone(),
        chi: args.chi,
        kappa: args.kappa,
    };
    let checks = Checks {
        max_q: args.max_q,
        ..Checks::default()
    };
    let out = run_case(&spec, &checks)?;
    if args.json {
        println!("{}", out.row.json_line());
    } else {
        print!("{}", render(&out));
        if args.trace && !traced {
            print!("{}", out.trace.render());
        }
    }
    if out.row.passed() {
        Ok(())
    } else {
        Err(CliError::Violations(1))
    }
}

fn verify_config(args: &VerifyArgs) -> CliResult<CampaignConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            CampaignConfig::parse(&text)?
        }
        None => CampaignConfig::default(),
    };
    if let Some(p) = &args.p {
        cfg.primes = parse_list("p", p).map_err(CliError::Input)?;
    }
    if let Some(m) = &args.m {
        (cfg.m_min, cfg.m_max) = parse_range(m).map_err(CliError::Input)?;
    }
    if let Some(j) = args.jobs {
        cfg.jobs = j;
    }
    if let Some(q) = args.max_q {
        cfg.max_q = q;
    }
    if args.out.is_some() {
        cfg.out.clone_from(&args.out);
    }
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("expected KEY=VALUE, got '{kv}'")))?;
        cfg.set(k, v).map_err(CliError::Input)?;
    }
    Ok(cfg)
}

fn campaign(cfg: &CampaignConfig) -> CliResult<()> {
    let summary = run_to_output(cfg)?;
    print!("{}", summary.render());
    match summary.violations {
        0 => Ok(()),
        n => Err(CliError::Violations(n)),
    }
}

fn selftest_config(jobs: usize) -> CampaignConfig {
    CampaignConfig {
        primes: vec![3, 5],
        m_min: 1,
        m_max: 3,
        families: vec![Family::Monomial],
        jobs,
        ..CampaignConfig::default()
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Eval(a) => case(&a, false, |o| o.render_eval()),
        Command::Bound(a) => {
            if a.json {
                let spec = CaseSpec {
                    p: a.p,
                    m: a.m,
                    f: a.f.clone(),
                    g: a.g.clone(),
                    chi: a.chi,
                    kappa: a.kappa,
                };
                let out = run_case(
                    &spec,
                    &Checks {
                        max_q: a.max_q,
                        ..Checks::default()
                    },
                )?;
                println!(
                    "{}",
                    serde_json::to_string(&out.report).expect("report serializes")
                );
                return if out.row.passed() {
                    Ok(())
                } else {
                    Err(CliError::Violations(1))
                };
            }
            case(&a, false, |o| o.render_bound())
        }
        Command::Reduce(a) => case(&a, true, |o| o.render_reduce()),
        Command::Verify(a) => {
            let cfg = verify_config(&a)?;
            campaign(&cfg)
        }
        Command::Selftest { jobs } => campaign(&selftest_config(jobs)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
