//! `btnet`: build memorizers, evaluate networks, run experiments and encode
//! networks from the command line.
//!
//! Exit codes: 0 ok, 1 other errors, 2 inconsistent data, 3 search budget
//! exhausted, 4 shape mismatch, 5 malformed bit stream.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use btnet::btn_format::{parse_btn, to_btn_string};
use btnet::codec;
use btnet::hsg::{build_dataset_interpolator, build_memorizer, MemorizerConfig, PartialFunction};
use btnet::learn::curves::{eps_grid, high_quantization_bound, tempered_curves};
use btnet::learn::{run_experiment, to_csv, Dataset, ExperimentConfig};
use btnet::network::MAX_TABLE_INPUTS;
use btnet::{Bits, Error, Mode, Network};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "btnet", version, about = "Binary threshold network toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a network that fits every sample of a dataset.
    BuildMemorizer {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Memorize only the disagreements with this network and XOR it back in.
        #[arg(long)]
        teacher: Option<PathBuf>,
        #[arg(long)]
        ternary_first_layer: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = btnet::gadgets::DEFAULT_RETRIES)]
        max_retries: usize,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Evaluate a network on one input or on every input.
    Eval {
        #[arg(long)]
        net: PathBuf,
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        input: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Run a teacher/noise/learner experiment grid and write its CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Run trials on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Write the closed-form risk curves on a 101-point noise grid.
    Curves {
        #[arg(long)]
        out: PathBuf,
        /// Quantization level for an extra `1 − Q^(−H(ε))` column.
        #[arg(long)]
        q: Option<f64>,
    },
    /// Canonicalize and encode a `.btn` network into a `.btnbits` file.
    Encode {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Leave the depth out of the stream.
        #[arg(long)]
        depth_known: bool,
    },
    /// Decode a `.btnbits` file back into a `.btn` network.
    Decode {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Depth to use when the stream omits it.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Run the built-in invariant suites.
    Verify {
        #[arg(long)]
        quick: bool,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Inconsistent { .. }) => 2,
        Some(Error::SearchBudget(_) | Error::Budget(_)) => 3,
        Some(Error::Shape { .. }) => 4,
        Some(Error::Malformed { .. }) => 5,
        _ => 1,
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn load_net(path: &Path) -> anyhow::Result<Network> {
    Ok(parse_btn(&read(path)?)?)
}

fn build(
    dataset: &Path,
    out: &Path,
    teacher: Option<&Path>,
    config: MemorizerConfig,
    report_path: Option<&Path>,
) -> anyhow::Result<()> {
    let s = Dataset::parse(&read(dataset)?)?;
    let (network, report) = match teacher {
        Some(t) => {
            let teacher = load_net(t)?;
            let r = build_dataset_interpolator(&teacher, &s, &config)?;
            (r.network.clone(), r.summary())
        }
        None => {
            let f = PartialFunction::new(s.input_dim(), s.distinct()?)?;
            let r = build_memorizer(&f, &config)?;
            let mut text = r.summary();
            text.push_str("training_errors 0\n");
            (r.network, text)
        }
    };
    write(out, to_btn_string(&network))?;
    print!("{report}");
    if let Some(p) = report_path {
        write(p, &report)?;
    }
    Ok(())
}

fn eval(net: &Path, input: Option<&str>, all: bool) -> anyhow::Result<()> {
    let net = load_net(net)?;
    let d = net.input_dim();
    if all {
        if d > MAX_TABLE_INPUTS {
            bail!("--all needs at most {MAX_TABLE_INPUTS} inputs, network has {d}");
        }
        let mut out = String::new();
        for x in 0..1u64 << d {
            let bits = Bits::from_u64(x, d);
            let _ = writeln!(out, "{bits} {}", net.evaluate(&bits)?);
        }
        print!("{out}");
        return Ok(());
    }
    let raw = input.expect("clap requires --input without --all");
    let x = Bits::parse(raw).with_context(|| format!("input `{raw}` is not a bit string"))?;
    println!("{}", net.evaluate(&x)?);
    Ok(())
}

fn simulate(config: &Path, out: &Path, sequential: bool) -> anyhow::Result<()> {
    let c = ExperimentConfig::parse(&read(config)?, config.parent())?;
    let mode = if sequential {
        Mode::Sequential
    } else {
        Mode::default()
    };
    let rows = run_experiment(&c, mode)?;
    for r in &rows {
        for f in &r.failures {
            eprintln!("eps {} n {}: trial failed: {f}", r.eps, r.n);
        }
    }
    write(out, to_csv(&rows))
}

fn curves(out: &Path, q: Option<f64>) -> anyhow::Result<()> {
    let points = tempered_curves(&eps_grid(100))?;
    let mut s = String::from("eps,bayes,independent,arbitrary,trivial");
    if let Some(q) = q {
        let _ = write!(s, ",quantized_q{q}");
    }
    s.push('\n');
    for p in &points {
        let _ = write!(
            s,
            "{},{:.12},{:.12},{:.12},{:.12}",
            p.eps, p.bayes, p.independent, p.arbitrary, p.trivial
        );
        if let Some(q) = q {
            let _ = write!(s, ",{:.12}", high_quantization_bound(p.eps, q)?);
        }
        s.push('\n');
    }
    write(out, s)
}

fn encode(net: &Path, out: &Path, depth_known: bool) -> anyhow::Result<()> {
    let net = load_net(net)?;
    let canon = codec::canonicalize(&net)?;
    let bits = codec::encode(&canon, depth_known)?;
    write(out, codec::to_bytes(&bits))?;
    let w = net.size().weights;
    println!(
        "w {w} bits {} bound {:.1}",
        bits.len(),
        codec::length_bound(w)
    );
    Ok(())
}

fn decode(file: &Path, out: &Path, depth: Option<usize>) -> anyhow::Result<()> {
    let bytes = fs::read(file).with_context(|| format!("reading {}", file.display()))?;
    let bits = codec::from_bytes(&bytes)?;
    let net = codec::decode(&bits, depth)?;
    write(out, to_btn_string(&net))?;
    let w = net.size().weights;
    println!(
        "w {w} bits {} bound {:.1}",
        bits.len(),
        codec::length_bound(w)
    );
    Ok(())
}

fn verify(quick: bool) -> anyhow::Result<bool> {
    let outcomes = btnet::verify::run(quick);
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    for o in &outcomes {
        println!(
            "{:<width$}  {}  {:>7.2}s  {}",
            o.name,
            if o.passed { "PASS" } else { "FAIL" },
            o.seconds,
            o.detail
        );
    }
    Ok(outcomes.iter().all(|o| o.passed))
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::BuildMemorizer {
            dataset,
            out,
            teacher,
            ternary_first_layer,
            seed,
            max_retries,
            report,
        } => {
            let config = MemorizerConfig {
                seed,
                max_retries,
                ternary_first_layer,
                ..MemorizerConfig::default()
            };
            build(
                &dataset,
                &out,
                teacher.as_deref(),
                config,
                report.as_deref(),
            )?;
        }
        Command::Eval { net, input, all } => eval(&net, input.as_deref(), all)?,
        Command::Simulate {
            config,
            out,
            sequential,
        } => simulate(&config, &out, sequential)?,
        Command::Curves { out, q } => curves(&out, q)?,
        Command::Encode {
            net,
            out,
            depth_known,
        } => encode(&net, &out, depth_known)?,
        Command::Decode { net, out, depth } => decode(&net, &out, depth)?,
        Command::Verify { quick } => return verify(quick),
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
