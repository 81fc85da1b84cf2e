
use anyhow::Result;
use byzmac_core::codec::StepOrder;
use byzmac_core::region::SearchConfig;
use byzmac_core::DEFAULT_BUDGET;
use clap::{Args, Parser, Subcommand, ValueEnum};
use byzmac_cli::commands::{self, DecoderKind, Example, Outcome};
use byzmac_cli::io::{self, parse_list, Document, RunManifest, SCHEMA_VERSION};
use serde::Serialize;
use serde_json::Value;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "byzmac", version, about = "Byzantine two-user multiple-access channel toolkit")]
struct Cli {
    /// Cap on exhaustive enumeration size.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Write the JSON document to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the JSON document instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    /// Exit with status 4 when a feasibility verdict is INCONCLUSIVE.
    #[arg(long, global = true)]
    require_decisive: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Cmd {
    /// Spoofability, symmetrizability and overwritability of a channel.
    Classify {
        #[arg(long)]
        channel: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Spoofing certificate, output-law gaps and the converse chain on a code.
    AttackDemo(AttackDemoCli),
    /// Decode one received word.
    Decode(DecodeCli),
    /// Exact or Monte Carlo error probabilities.
    Simulate(SimulateCli),
    #[command(subcommand)]
    Codebook(CodebookCmd),
    #[command(subcommand)]
    Region(RegionCmd),
    #[command(subcommand)]
    Examples(ExamplesCmd),
}

#[derive(Args, Debug, Serialize)]
struct AttackDemoCli {
    #[arg(long)]
    channel: String,
    /// Code spec; defaults to a seeded two-message uniform-composition code.
    #[arg(long)]
    code: Option<String>,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Spoofed user (1 or 2); default tries both.
    #[arg(long)]
    user: Option<u8>,
    #[arg(long, default_value_t = 0.25)]
    eta: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum OrderArg {
    Step2First,
    Step3First,
}

impl From<OrderArg> for StepOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Step2First => StepOrder::Step2First,
            OrderArg::Step3First => StepOrder::Step3First,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct DecodeCli {
    #[arg(long)]
    channel: String,
    #[arg(long)]
    code: String,
    /// Comma-separated output symbols.
    #[arg(long)]
    received: String,
    #[arg(long)]
    eta: f64,
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
    #[arg(long)]
    five_step: bool,
    #[arg(long, value_enum, default_value = "step2-first")]
    order: OrderArg,
}

#[derive(Args, Debug, Serialize)]
struct SimulateCli {
    #[arg(long)]
    channel: String,
    #[arg(long)]
    code: String,
    #[arg(long, conflicts_with = "trials")]
    exact: bool,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON file holding one attack or an array of attacks.
    #[arg(long)]
    adversary: Option<String>,
    #[arg(long, value_enum, default_value = "auto")]
    #[serde(skip)]
    decoder: DecoderKind,
    #[arg(long, default_value_t = 0.25)]
    eta: f64,
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "step2-first")]
    order: OrderArg,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CodebookCmd {
    /// Random constant-composition codebook.
    Gen {
        #[arg(long)]
        comp1: String,
        #[arg(long)]
        comp2: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the bare codebook here, for use with `--code`.
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Check the codebook type properties at a given epsilon.
    Audit {
        #[arg(long)]
        code: String,
        #[arg(long)]
        epsilon: f64,
    },
    /// Halve eta until no received word is ambiguous.
    EtaSearch {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        code: String,
        #[arg(long, default_value_t = 0.25)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-3)]
        min_eta: f64,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum RegionCmd {
    /// Inner-bound corner points (heuristic minimization).
    Inner {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        comp1: String,
        #[arg(long)]
        comp2: String,
        #[arg(long, default_value_t = 32)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Closed-form corners for the erasure channel with uniform-ish inputs.
    ErasureExact {
        /// Comma-separated deltas.
        #[arg(long)]
        delta: String,
    },
    /// Vertices of the attack polytope.
    Polytope {
        #[arg(long)]
        channel: String,
    },
    /// Grid evaluation of the arbitrarily varying channel region.
    Jahn {
        #[arg(long)]
        channel: String,
        #[arg(long, default_value_t = 10)]
        input_res: usize,
        #[arg(long, default_value_t = 10)]
        state_res: usize,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ExamplesCmd {
    Reproduce {
        #[arg(long, value_enum)]
        #[serde(skip)]
        which: Example,
        #[arg(long)]
        n: Option<usize>,
    },
}

fn subcommand_name(cmd: &Cmd) -> String {
    match cmd {
        Cmd::Classify { .. } => "classify".into(),
        Cmd::AttackDemo(_) => "attack-demo".into(),
        Cmd::Decode(_) => "decode".into(),
        Cmd::Simulate(_) => "simulate".into(),
        Cmd::Codebook(c) => match c {
            CodebookCmd::Gen { .. } => "codebook gen",
            CodebookCmd::Audit { .. } => "codebook audit",
            CodebookCmd::EtaSearch { .. } => "codebook eta-search",
        }
        .into(),
        Cmd::Region(r) => match r {
            RegionCmd::Inner { .. } => "region inner",
            RegionCmd::ErasureExact { .. } => "region erasure-exact",
            RegionCmd::Polytope { .. } => "region polytope",
            RegionCmd::Jahn { .. } => "region jahn",
        }
        .into(),
        Cmd::Examples(_) => "examples reproduce".into(),
    }
}

/// Flattens the parsed subcommand into a name-to-value map.
fn parameters(cli: &Cli) -> std::collections::BTreeMap<String, Value> {
    fn collect(v: Value, out: &mut std::collections::BTreeMap<String, Value>) {
        if let Value::Object(m) = v {
            for (k, v) in m {
                match v {
                    Value::Object(_) => collect(v, out),
                    other => {
                        out.insert(k, other);
                    }
                }
            }
        }
    }
    let mut out = std::collections::BTreeMap::new();
    collect(serde_json::to_value(&cli.cmd).unwrap_or(Value::Null), &mut out);
    match &cli.cmd {
        Cmd::Simulate(s) => {
            out.insert("decoder".into(), Value::String(format!("{:?}", s.decoder).to_lowercase()));
        }
        Cmd::Examples(ExamplesCmd::Reproduce { which, .. }) => {
            let name = which.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default();
            out.insert("which".into(), Value::String(name));
        }
        _ => {}
    }
    out.insert("budget".into(), Value::String(cli.budget.to_string()));
    out
}

fn inputs(cmd: &Cmd) -> Vec<String> {
    let mut v = Vec::new();
    let mut push = |s: &str| v.push(s.to_string());
    match cmd {
        Cmd::Classify { channel, .. } => push(channel),
        Cmd::AttackDemo(a) => {
            push(&a.channel);
            if let Some(c) = &a.code {
                push(c);
            }
        }
        Cmd::Decode(d) => {
            push(&d.channel);
            push(&d.code);
        }
        Cmd::Simulate(s) => {
            push(&s.channel);
            push(&s.code);
            if let Some(a) = &s.adversary {
                push(a);
            }
        }
        Cmd::Codebook(CodebookCmd::Audit { code, .. }) => push(code),
        Cmd::Codebook(CodebookCmd::EtaSearch { channel, code, .. }) => {
            push(channel);
            push(code);
        }
        Cmd::Region(RegionCmd::Inner { channel, .. } | RegionCmd::Polytope { channel } | RegionCmd::Jahn { channel, .. }) => {
            push(channel)
        }
        _ => {}
    }
    v
}

fn run(cli: &Cli) -> Result<Outcome> {
    let budget = cli.budget;
    match &cli.cmd {
        Cmd::Classify { channel, tol } => commands::classify_cmd(channel, *tol),
        Cmd::AttackDemo(a) => commands::attack_demo(&commands::AttackDemoArgs {
            channel: &a.channel,
            code: a.code.as_deref(),
            n: a.n,
            user: a.user,
            eta: a.eta,
            alpha: a.alpha,
            seed: a.seed,
            tol: a.tol,
            budget,
        }),
        Cmd::Decode(d) => {
            let received: Vec<usize> = parse_list(&d.received)?;
            commands::decode(&commands::DecodeArgs {
                channel: &d.channel,
                code: &d.code,
                received: &received,
                eta: d.eta,
                alpha: d.alpha,
                five_step: d.five_step,
                order: d.order.into(),
                budget,
            })
        }
        Cmd::Simulate(s) => commands::simulate(&commands::SimulateArgs {
            channel: &s.channel,
            code: &s.code,
            exact: s.exact,
            trials: s.trials,
            seed: s.seed,
            adversary: s.adversary.as_deref(),
            decoder: s.decoder,
            eta: s.eta,
            alpha: s.alpha,
            order: s.order.into(),
            workers: s.workers,
            budget,
        }),
        Cmd::Codebook(CodebookCmd::Gen { comp1, comp2, n, n1, n2, seed, write }) => {
            let (cb, out) = commands::codebook_gen(comp1, comp2, *n, *n1, *n2, *seed)?;
            if let Some(path) = write {
                std::fs::write(path, serde_json::to_string_pretty(&cb)? + "\n")?;
            }
            Ok(out)
        }
        Cmd::Codebook(CodebookCmd::Audit { code, epsilon }) => commands::codebook_audit(code, *epsilon, budget),
        Cmd::Codebook(CodebookCmd::EtaSearch { channel, code, alpha, min_eta }) => {
            commands::codebook_eta_search(channel, code, *alpha, *min_eta, budget)
        }
        Cmd::Region(RegionCmd::Inner { channel, comp1, comp2, starts, seed }) => {
            let cfg = SearchConfig { starts: *starts, seed: *seed, ..SearchConfig::default() };
            commands::region_inner(channel, comp1, comp2, &cfg)
        }
        Cmd::Region(RegionCmd::ErasureExact { delta }) => commands::region_erasure_exact(&parse_list(delta)?),
        Cmd::Region(RegionCmd::Polytope { channel }) => commands::region_polytope(channel, budget),
        Cmd::Region(RegionCmd::Jahn { channel, input_res, state_res }) => commands::region_jahn(channel, *input_res, *state_res),
        Cmd::Examples(ExamplesCmd::Reproduce { which, n }) => commands::reproduce(*which, *n, budget),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<byzmac_core::Error>() {
        Some(byzmac_core::Error::TooLarge { .. } | byzmac_core::Error::BudgetExceeded { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let doc = Document {
        schema_version: SCHEMA_VERSION,
        manifest: RunManifest {
            subcommand: subcommand_name(&cli.cmd),
            inputs: inputs(&cli.cmd),
            parameters: parameters(&cli),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds: start.elapsed().as_secs_f64(),
        },
        result: outcome.result,
    };
    if let Some(path) = &cli.out {
        if let Err(e) = io::write_document(path, &doc) {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    }
    if cli.json {
        match serde_json::to_string_pretty(&doc) {
            Ok(s) => println!("{s}"),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        }
    } else {
        for line in &outcome.summary {
            println!("{line}");
        }
    }
    if cli.require_decisive && outcome.inconclusive {
        eprintln!("error: a feasibility verdict is INCONCLUSIVE");
        return ExitCode::from(4);
    }
    ExitCode::SUCCESS
}
