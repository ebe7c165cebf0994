//! Command-line workbench for one-shot capacities of multicast networks
//! under restricted adversarial noise.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use advnet::bounds;
use advnet::builtin::{self, Family};
use advnet::error::Error;
use advnet::instance::{instance_json, load_instance, Instance};
use advnet::netgraph::{detect_levels, CutPair};
use advnet::reduce::{self, AutoOptions};
use advnet::schemes;
use advnet::search::{self, SearchBudget};

#[derive(Parser)]
#[command(name = "advnet", version, about = "one-shot capacity workbench for adversarial networks")]
struct Cli {
    /// Emit machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an instance file and print a summary
    Validate { file: PathBuf },
    /// Evaluate capacity bounds on an instance
    Bound {
        file: PathBuf,
        /// singleton | partition | trimmed | full | all
        #[arg(long, default_value = "all")]
        which: String,
        /// Override the adversary budget of the file
        #[arg(long)]
        t: Option<usize>,
        /// Vertex budget for exhaustive cut enumeration
        #[arg(long, default_value_t = 12)]
        max_vertices: usize,
    },
    /// Construct (and optionally verify) a named scheme
    Scheme(SchemeArgs),
    /// Exact or linear capacity by exhaustive search
    Capacity {
        file: PathBuf,
        #[arg(long, conflicts_with = "linear")]
        exact: bool,
        #[arg(long)]
        linear: bool,
        /// Maximum number of network codes to enumerate
        #[arg(long)]
        budget: Option<u128>,
        /// Greedy independent sets only (lower-bound certificates)
        #[arg(long)]
        greedy: bool,
        /// Disable the symmetry reduction
        #[arg(long)]
        no_symmetry: bool,
        /// Bypass the certificate cache
        #[arg(long)]
        no_cache: bool,
        #[arg(long)]
        t: Option<usize>,
    },
    /// Cut-pair reduction bound
    Reduce {
        file: PathBuf,
        /// Edge ids (file order, comma separated) of the earlier cut
        #[arg(long, value_delimiter = ',')]
        cut1: Option<Vec<usize>>,
        /// Edge ids of the later cut
        #[arg(long, value_delimiter = ',')]
        cut2: Option<Vec<usize>>,
        /// Terminal name for explicit cuts (defaults to trying each)
        #[arg(long)]
        terminal: Option<String>,
        /// Enumerate cut pairs automatically
        #[arg(long)]
        auto: bool,
        #[arg(long, default_value_t = 64)]
        max_pairs: usize,
        /// Vertex budget for exhaustive cut enumeration
        #[arg(long, default_value_t = 12)]
        max_vertices: usize,
        /// Write the full reduction chain as JSON
        #[arg(long)]
        emit_chain: Option<PathBuf>,
        #[arg(long)]
        t: Option<usize>,
    },
    /// Random-noise capacity curves of the split-relay comparison networks
    Curves {
        #[arg(long, default_value_t = 1)]
        generalization: u8,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0.01)]
        pstep: f64,
        /// Output CSV path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in instance library
    Instances {
        #[command(subcommand)]
        action: InstancesAction,
    },
}

#[derive(Subcommand)]
enum InstancesAction {
    /// List available instance names
    List,
    /// Print an instance as JSON (alphabet and budget as given)
    Emit {
        name: String,
        #[arg(long, default_value_t = 3)]
        alphabet: usize,
        #[arg(long, default_value_t = 1)]
        t: usize,
    },
}

#[derive(Args)]
struct SchemeArgs {
    /// diamond | mirrored-diamond | wide-diamond | shell | majority |
    /// partition | trimmed | crossover (omit when using --verify-file)
    name: Option<String>,
    #[arg(long, default_value_t = 3)]
    q: usize,
    #[arg(long)]
    t: Option<usize>,
    /// Relay in-degrees for partition/trimmed schemes
    #[arg(long, value_delimiter = ',')]
    a: Option<Vec<usize>>,
    /// Relay out-degrees for partition/trimmed schemes
    #[arg(long, value_delimiter = ',')]
    b: Option<Vec<usize>>,
    /// Verify the scheme after construction
    #[arg(long)]
    verify: bool,
    /// Write the certificate to a file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Re-verify an existing certificate file
    #[arg(long)]
    verify_file: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::BudgetExceeded(_) | Error::DomainTooLarge(_, _) => 3,
                _ => 2,
            })
        }
    }
}

fn run(cli: &Cli) -> advnet::Result<ExitCode> {
    match &cli.command {
        Command::Validate { file } => validate_cmd(cli, file),
        Command::Bound { file, which, t, max_vertices } => bound_cmd(cli, file, which, *t, *max_vertices),
        Command::Scheme(args) => scheme_cmd(cli, args),
        Command::Capacity { file, linear, budget, greedy, no_symmetry, no_cache, t, .. } => {
            capacity_cmd(cli, file, *linear, *budget, *greedy, *no_symmetry, *no_cache, *t)
        }
        Command::Reduce { file, cut1, cut2, terminal, auto, max_pairs, max_vertices, emit_chain, t } => {
            reduce_cmd(cli, file, cut1, cut2, terminal, *auto, *max_pairs, *max_vertices, emit_chain, *t)
        }
        Command::Curves { generalization, n, pstep, out } => curves_cmd(*generalization, *n, *pstep, out),
        Command::Instances { action } => instances_cmd(cli, action),
    }
}

fn validate_cmd(cli: &Cli, file: &Path) -> advnet::Result<ExitCode> {
    let inst = load_instance(file)?;
    let net = &inst.network;
    let mut min_cuts = vec![];
    for t in net.terminals().collect::<Vec<_>>() {
        min_cuts.push((net.vertex_name(t).to_string(), net.min_cut(net.source(), t)?));
    }
    let levels = detect_levels(net).map(|lm| lm.levels());
    if cli.json {
        println!(
            "{}",
            serde_json::json!({
                "vertices": net.vertex_count(),
                "edges": net.edge_count(),
                "vulnerable": net.vulnerable().len(),
                "t": inst.budget,
                "levels": levels,
                "min_cuts": min_cuts,
                "edge_map": inst.edge_map,
            })
        );
    } else {
        println!(
            "valid network: {} vertices, {} edges, {} vulnerable, budget t = {}",
            net.vertex_count(),
            net.edge_count(),
            net.vulnerable().len(),
            inst.budget
        );
        match levels {
            Some(m) => println!("layered with {m} levels"),
            None => println!("not layered"),
        }
        for (name, cut) in &min_cuts {
            println!("min-cut to {name}: {cut}");
        }
        if inst.edge_map.iter().enumerate().any(|(old, &new)| old != new) {
            println!("edge reorder map (file -> validated): {:?}", inst.edge_map);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn two_level_profile_of(inst: &Instance) -> Option<(Vec<usize>, Vec<usize>)> {
    detect_levels(&inst.network).and_then(|lm| lm.two_level_profile())
}

fn bound_cmd(
    cli: &Cli,
    file: &Path,
    which: &str,
    t: Option<usize>,
    max_vertices: usize,
) -> advnet::Result<ExitCode> {
    let inst = load_instance(file)?;
    let budget = t.unwrap_or(inst.budget);
    let mut reports = vec![];
    let profile = two_level_profile_of(&inst);
    let want = |name: &str| which == "all" || which == name;
    if want("singleton") {
        reports.push(bounds::singleton_bound_with_limit(&inst.network, budget, max_vertices)?);
    }
    if want("partition") {
        match &profile {
            Some((ins, outs)) => reports.push(bounds::lower_mds_partition(ins, outs, budget)?),
            None if which != "all" => return Err(Error::NotTwoLevel),
            None => {}
        }
    }
    if want("trimmed") {
        match &profile {
            Some((ins, outs)) => reports.push(bounds::lower_trimmed_forwarding(ins, outs, budget)?),
            None if which != "all" => return Err(Error::NotTwoLevel),
            None => {}
        }
    }
    if want("full") {
        reports.push(bounds::full_adversary_value(&inst.network, budget)?);
    }
    if reports.is_empty() {
        return Err(Error::Parse(format!("unknown bound selector {which}")));
    }
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&reports).unwrap());
    } else {
        for r in &reports {
            let assumptions = if r.assumptions.is_empty() {
                String::new()
            } else {
                format!("  [{}]", r.assumptions.join("; "))
            };
            println!("{:<28} {}{}", r.name, r.display_value(), assumptions);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn build_scheme(args: &SchemeArgs) -> advnet::Result<schemes::Scheme> {
    let name = args.name.as_deref().ok_or_else(|| Error::Parse("missing scheme name".into()))?;
    let q = args.q;
    let t = args.t;
    let profile = || -> advnet::Result<(Vec<usize>, Vec<usize>)> {
        match (&args.a, &args.b) {
            (Some(a), Some(b)) => Ok((a.clone(), b.clone())),
            _ => Err(Error::Parse("partition/trimmed schemes need --a and --b".into())),
        }
    };
    match name {
        "diamond" => schemes::diamond_alarm(q),
        "mirrored-diamond" => schemes::mirrored_alarm(q),
        "wide-diamond" => schemes::wide_diamond_majority(q),
        "shell" => schemes::shell_relay(q, t.unwrap_or(2)),
        "majority" => schemes::balanced_majority(q, t.unwrap_or(1)),
        "crossover" => schemes::crossover_alarm(q),
        "partition" => {
            let (a, b) = profile()?;
            schemes::partitioned_mds(&a, &b, t.unwrap_or(1), q)
        }
        "trimmed" => {
            let (a, b) = profile()?;
            schemes::trimmed_forwarding(&a, &b, t.unwrap_or(1), q)
        }
        other => Err(Error::Parse(format!("unknown scheme {other}"))),
    }
}

fn scheme_cmd(cli: &Cli, args: &SchemeArgs) -> advnet::Result<ExitCode> {
    if let Some(path) = &args.verify_file {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
        let scheme = schemes::scheme_from_certificate(&value)?;
        let report = schemes::verify(&scheme, scheme.budget)?;
        return emit_verification(cli, &scheme, Some(&report));
    }
    let scheme = build_scheme(args)?;
    let report = if args.verify {
        Some(schemes::verify(&scheme, args.t.unwrap_or(scheme.budget))?)
    } else {
        None
    };
    if let Some(path) = &args.out {
        let cert = schemes::scheme_to_certificate(&scheme)?;
        std::fs::write(path, serde_json::to_string_pretty(&cert).unwrap())
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    emit_verification(cli, &scheme, report.as_ref())
}

fn emit_verification(
    cli: &Cli,
    scheme: &schemes::Scheme,
    report: Option<&schemes::VerificationReport>,
) -> advnet::Result<ExitCode> {
    if cli.json {
        println!(
            "{}",
            serde_json::json!({
                "label": scheme.label,
                "alphabet": scheme.alphabet,
                "budget": scheme.budget,
                "claimed_code_size": scheme.claimed_code_size.to_string(),
                "claimed_rate": scheme.claimed_rate(),
                "verification": report,
            })
        );
    } else {
        println!(
            "scheme {}: alphabet {}, budget {}, claimed code size {} (rate {:.6})",
            scheme.label,
            scheme.alphabet,
            scheme.budget,
            scheme.claimed_code_size,
            scheme.claimed_rate()
        );
        if let Some(r) = report {
            if r.passed {
                println!("verification: PASS ({} words, rate {:.6})", r.code_size, r.rate);
            } else {
                println!("verification: FAIL");
                if let Some(w) = &r.witness {
                    println!(
                        "  colliding words {:?} and {:?} at terminal {}",
                        w.word_a, w.word_b, w.terminal
                    );
                    println!(
                        "  patterns {:?} vs {:?} both observe {:?}",
                        w.pattern_a.assignments, w.pattern_b.assignments, w.observation
                    );
                }
            }
        }
    }
    match report {
        Some(r) if !r.passed => Ok(ExitCode::from(1)),
        _ => Ok(ExitCode::SUCCESS),
    }
}

#[allow(clippy::too_many_arguments)]
fn capacity_cmd(
    cli: &Cli,
    file: &Path,
    linear: bool,
    budget: Option<u128>,
    greedy: bool,
    no_symmetry: bool,
    no_cache: bool,
    t: Option<usize>,
) -> advnet::Result<ExitCode> {
    let inst = load_instance(file)?;
    let adversary = t.unwrap_or(inst.budget);
    let mut search_budget = SearchBudget {
        greedy,
        symmetry: !no_symmetry,
        ..SearchBudget::default()
    };
    if let Some(b) = budget {
        search_budget.max_codes = b;
    }
    let cache_dir: Option<PathBuf> =
        if no_cache { None } else { std::env::var_os("ADVNET_CACHE_DIR").map(PathBuf::from) };
    let cert = if linear {
        search::exact_linear_capacity(
            &inst.network,
            inst.alphabet,
            adversary,
            &search_budget,
            cache_dir.as_deref(),
        )?
    } else {
        search::exact_capacity(
            &inst.network,
            inst.alphabet,
            adversary,
            &search_budget,
            cache_dir.as_deref(),
        )?
    };
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&cert).unwrap());
    } else {
        println!(
            "max code size {} (rate {:.6}), mode {}, {} codes examined, {}",
            cert.max_code_size,
            cert.rate(),
            cert.mode,
            cert.codes_examined,
            if cert.exhaustive { "proved optimal" } else { "lower bound only" }
        );
        println!("witness outer code: {:?}", cert.witness_outer);
    }
    Ok(if cert.exhaustive { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

#[allow(clippy::too_many_arguments)]
fn reduce_cmd(
    cli: &Cli,
    file: &Path,
    cut1: &Option<Vec<usize>>,
    cut2: &Option<Vec<usize>>,
    terminal: &Option<String>,
    auto: bool,
    max_pairs: usize,
    max_vertices: usize,
    emit_chain: &Option<PathBuf>,
    t: Option<usize>,
) -> advnet::Result<ExitCode> {
    let inst = load_instance(file)?;
    let budget = t.unwrap_or(inst.budget);
    let pairs = if auto {
        None
    } else {
        let (Some(c1), Some(c2)) = (cut1, cut2) else {
            return Err(Error::Parse("provide --cut1 and --cut2, or --auto".into()));
        };
        let map = |ids: &[usize]| -> advnet::Result<std::collections::BTreeSet<usize>> {
            ids.iter()
                .map(|&old| {
                    inst.edge_map
                        .get(old)
                        .copied()
                        .ok_or(Error::EdgeOutOfRange(old))
                })
                .collect()
        };
        let first = map(c1)?;
        let second = map(c2)?;
        let terminals: Vec<usize> = match terminal {
            Some(name) => vec![inst.network.vertex_id(name)?],
            None => inst.network.terminals().collect(),
        };
        let mut pairs = vec![];
        for t in terminals {
            let pair = CutPair { first: first.clone(), second: second.clone(), terminal: t };
            if pair.validate(&inst.network).is_ok() {
                pairs.push(pair);
            }
        }
        if pairs.is_empty() {
            return Err(Error::InvalidCutPair(
                "the given cuts are not a nested cut pair for any terminal".into(),
            ));
        }
        Some(pairs)
    };
    let (report, chain) = reduce::double_cut_bound(
        &inst.network,
        inst.alphabet,
        budget,
        pairs,
        AutoOptions { max_pairs, max_vertices },
    )?;
    if let Some(path) = emit_chain {
        std::fs::write(path, serde_json::to_string_pretty(&chain).unwrap())
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    if cli.json {
        println!(
            "{}",
            serde_json::json!({ "bound": report, "chain": chain })
        );
    } else {
        println!("cut-pair bound: {} (rule {})", report.display_value(), chain.rule);
        println!(
            "terminal {}, first cut {:?}, second cut {:?}",
            inst.network.vertex_name(chain.terminal),
            chain.first_cut,
            chain.second_cut
        );
        for stage in &chain.stages {
            println!("  stage {}: {}", stage.tag, stage.note);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn curves_cmd(
    generalization: u8,
    n: usize,
    pstep: f64,
    out: &Option<PathBuf>,
) -> advnet::Result<ExitCode> {
    let csv = bounds::curves_csv(generalization, n, pstep)?;
    match out {
        Some(path) => {
            std::fs::write(path, csv).map_err(|e| Error::Io(e.to_string()))?;
        }
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn instances_cmd(cli: &Cli, action: &InstancesAction) -> advnet::Result<ExitCode> {
    match action {
        InstancesAction::List => {
            for name in builtin::names() {
                println!("{name}");
            }
        }
        InstancesAction::Emit { name, alphabet, t } => {
            let net = builtin::by_name(name)?;
            let value = instance_json(&net, *alphabet, *t);
            if cli.json {
                println!("{value}");
            } else {
                println!("{}", serde_json::to_string_pretty(&value).unwrap());
            }
        }
    }
    let _ = Family::A;
    Ok(ExitCode::SUCCESS)
}
