use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hardylab::VerdictOutcome;
use hardylab_cli::config::{HartmanTask, IdentitiesTask, NetConfig, PairTask, SumProductTask};
use hardylab_cli::{run, CliError, RunConfig, RunOptions, RunOutcome, TaskConfig};

/// Operator identities and compactness diagnostics for Hankel and Toeplitz operators on H².
#[derive(Parser)]
#[command(name = "hardylab", version)]
struct Cli {
    /// Directory for reports; overrides `output_dir` in the config.
    #[arg(long, global = true, env = "HARDYLAB_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,
    /// Seed for random instances; overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Stamp used in file names instead of the current UTC time.
    #[arg(long, global = true)]
    stamp: Option<String>,
    /// Only print the report path.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a TOML config.
    Run { config: PathBuf },
    /// Operator identities on seeded random trigonometric polynomials.
    CheckIdentities {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 64)]
        window: usize,
        #[arg(long, default_value_t = 8)]
        max_degree: u32,
    },
    /// Hartman compactness verdict from singular values of finite Hankel sections.
    Compactness {
        symbol: String,
        #[arg(long, value_delimiter = ',', default_values_t = [256, 512, 1024])]
        sizes: Vec<usize>,
        #[arg(long)]
        expect: Option<Expect>,
    },
    /// Compactness of H_f T_g from radial sweeps.
    Product {
        f: String,
        g: String,
        #[command(flatten)]
        net: NetArgs,
        #[arg(long)]
        expect: Option<Expect>,
    },
    /// Compactness of H_{f1} T_{g1} + H_{f2} T_{g2} from radial sweeps.
    SumProduct {
        f1: String,
        g1: String,
        f2: String,
        g2: String,
        #[command(flatten)]
        net: NetArgs,
        #[arg(long)]
        expect: Option<Expect>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Expect {
    Compact,
    Noncompact,
}

impl From<Expect> for VerdictOutcome {
    fn from(e: Expect) -> Self {
        match e {
            Expect::Compact => VerdictOutcome::Compact,
            Expect::Noncompact => VerdictOutcome::Noncompact,
        }
    }
}

#[derive(Args)]
struct NetArgs {
    /// Uniform boundary angles.
    #[arg(long, default_value_t = NetConfig::default().angles)]
    angles: usize,
    /// Extra boundary angle in radians; repeatable.
    #[arg(long = "angle")]
    extra: Vec<f64>,
    /// First radius index: r = 1 - 2^-from.
    #[arg(long, default_value_t = NetConfig::default().from)]
    from: u32,
    /// Last radius index.
    #[arg(long, default_value_t = NetConfig::default().to)]
    to: u32,
    /// Skip the jump points of arc symbols.
    #[arg(long)]
    no_jumps: bool,
}

impl NetArgs {
    fn config(&self) -> NetConfig {
        NetConfig {
            angles: self.angles,
            extra: self.extra.clone(),
            jumps: !self.no_jumps,
            from: self.from,
            to: self.to,
            ..NetConfig::default()
        }
    }
}

fn symbols(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn config_for(command: Command) -> Result<RunConfig, CliError> {
    let single = |symbols, task| RunConfig { symbols, tasks: vec![task], ..RunConfig::default() };
    Ok(match command {
        Command::Run { config } => RunConfig::load(&config)?,
        Command::CheckIdentities { instances, window, max_degree } => {
            let mut t = IdentitiesTask::new("identities");
            t.instances = instances;
            t.window = window;
            t.max_degree = max_degree;
            single(BTreeMap::new(), TaskConfig::Identities(t))
        }
        Command::Compactness { symbol, sizes, expect } => single(
            symbols(&[("symbol", &symbol)]),
            TaskConfig::Hartman(HartmanTask {
                id: "compactness".into(),
                symbol: "symbol".into(),
                sizes,
                expect: expect.map(Into::into),
                thresholds: None,
            }),
        ),
        Command::Product { f, g, net, expect } => single(
            symbols(&[("f", &f), ("g", &g)]),
            TaskConfig::Product(PairTask {
                id: "product".into(),
                f: "f".into(),
                g: "g".into(),
                net: net.config(),
                expect: expect.map(Into::into),
                thresholds: None,
            }),
        ),
        Command::SumProduct { f1, g1, f2, g2, net, expect } => single(
            symbols(&[("f1", &f1), ("g1", &g1), ("f2", &f2), ("g2", &g2)]),
            TaskConfig::SumProduct(SumProductTask {
                id: "sum-product".into(),
                f1: "f1".into(),
                g1: "g1".into(),
                f2: "f2".into(),
                g2: "g2".into(),
                net: net.config(),
                expect: expect.map(Into::into),
                thresholds: None,
            }),
        ),
    })
}

fn print(outcome: &RunOutcome, quiet: bool) {
    if !quiet {
        for line in &outcome.report.summary.tasks {
            let mark = if line.passed { "PASS" } else { "FAIL" };
            println!("{mark}  {:<12} {:<24} {}", line.kind, line.id, line.headline);
        }
        let s = &outcome.report.summary;
        println!("{} passed, {} failed in {:.1}s", s.passed, s.failed, outcome.report.run.wall_clock_seconds);
    }
    println!("{}", outcome.files.report.display());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = RunOptions { output_dir: cli.output_dir, seed: cli.seed, stamp: cli.stamp };
    match config_for(cli.command).and_then(|cfg| run(cfg, &opts)) {
        Ok(outcome) => {
            print(&outcome, cli.quiet);
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("hardylab: {e}");
            ExitCode::from(CliError::EXIT_CODE)
        }
    }
}
