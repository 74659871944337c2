use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use greenlab::config::{preset, Overrides, Run, RunConfig, PRESETS};
use greenlab::runs::{self, ensure_dir, green_table_csv, litam_diag_csv, litam_report};
use greenlab::verify::{run_suite, TITLES};
use greenlab::Failure;
use greenlab_core::litam::negative_tail_variant;
use greenlab_core::oracle::catalogue;
use greenlab_core::Verdict;

#[derive(Parser)]
#[command(name = "greenlab", version, about = "Green functions of critical and subcritical elliptic operators on 1-D and radial grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide critical vs subcritical from the exhaustion Green sequence.
    Classify(Common),
    /// Dirichlet Green functions on every construction window.
    Green(Common),
    /// Li–Tam renormalized Green function with diagnostics.
    Litam {
        #[command(flatten)]
        common: Common,
        /// Also emit the variant that is nonpositive away from `z`, as `z=<x>`.
        #[arg(long, value_name = "z=X")]
        negative_tail: Option<String>,
    },
    /// Martin kernel along a pole ladder and per-end probes.
    Martin {
        #[command(flatten)]
        common: Common,
        /// Top rung m of the pole ladder y_m, m = 3..=ladder.
        #[arg(long, default_value_t = 8)]
        ladder: usize,
    },
    /// Run the verification suite and print a pass/fail matrix.
    Verify {
        /// `all` or a comma-separated list of criterion numbers.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Print every sub-check.
        #[arg(long)]
        verbose: bool,
    },
    /// Print the oracle catalogue and the presets.
    Report,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Construction grid nodes.
    #[arg(long)]
    n: Option<usize>,
    /// Construction windows.
    #[arg(long)]
    jmax: Option<usize>,
    /// Reference pole.
    #[arg(long)]
    pole: Option<f64>,
    /// Normalization point x0.
    #[arg(long = "ref")]
    reference: Option<f64>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<Run, Failure> {
        let mut run = match (&self.config, &self.preset) {
            (Some(path), p) => {
                let mut cfg = RunConfig::load(path)?;
                if p.is_some() {
                    cfg.preset = p.clone();
                }
                cfg.resolve()?
            }
            (None, Some(p)) => preset(p)?,
            (None, None) => return Err(Failure::Config("need --preset or --config".into())),
        };
        Overrides { n: self.n, jmax: self.jmax, pole: self.pole, reference: self.reference, out: self.out.clone() }.apply(&mut run)?;
        Ok(run)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("greenlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::Classify(c) => classify(&c.resolve()?),
        Command::Green(c) => {
            let run = c.resolve()?;
            let dir = ensure_dir(&run.out)?;
            runs::green_csv(&run)?.write(&dir.join("green.csv"))?;
            println!("wrote {}", dir.join("green.csv").display());
            Ok(0)
        }
        Command::Litam { common, negative_tail } => litam(&common.resolve()?, negative_tail.as_deref()),
        Command::Martin { common, ladder } => martin(&common.resolve()?, ladder),
        Command::Verify { suite, verbose } => verify(&suite, verbose),
        Command::Report => {
            report();
            Ok(0)
        }
    }
}

fn classify(run: &Run) -> Result<u8, Failure> {
    let out = runs::classify_run(run)?;
    let dir = ensure_dir(&run.out)?;
    out.evidence_csv().write(&dir.join("classification.csv"))?;
    match out.verdict {
        Some(Verdict::Critical) => println!("Critical"),
        Some(Verdict::Subcritical) => println!("Subcritical"),
        None => {
            println!("Indeterminate after {} windows", out.evidence.len());
            return Ok(1);
        }
    }
    Ok(0)
}

fn parse_tail(arg: &str) -> Result<f64, Failure> {
    arg.strip_prefix("z=").unwrap_or(arg).parse().map_err(|_| Failure::Config(format!("--negative-tail expects z=<x>, got `{arg}`")))
}

fn litam(run: &Run, tail: Option<&str>) -> Result<u8, Failure> {
    let z = tail.map(parse_tail).transpose()?;
    let extra: Vec<f64> = z.into_iter().collect();
    let r = runs::litam_run(run, &extra)?;
    let dir = ensure_dir(&run.out)?;
    let nodes = r.built.grid.nodes();
    let j = r.built.exhaustion.len();
    green_table_csv(&r.green.table, nodes, j).write(&dir.join("green_table.csv"))?;
    litam_diag_csv(&r.green, nodes).write(&dir.join("litam_diag.csv"))?;
    let mut report = litam_report(run, &r);
    if let Some(z) = z {
        let zn = greenlab::config::node_of(&r.built.grid, z);
        let (variant, cz) = negative_tail_variant(&r.green.table, nodes, zn, run.radius)?;
        green_table_csv(&variant, nodes, j).write(&dir.join("green_table_negative_tail.csv"))?;
        report.push_str(&format!("negative-tail variant at z = {}: C_z = {}\n", nodes[zn], greenlab::csv::float(cz)));
    }
    std::fs::write(dir.join("report.txt"), &report)?;
    print!("{report}");
    Ok(0)
}

fn martin(run: &Run, ladder: usize) -> Result<u8, Failure> {
    let m = runs::martin_run(run, ladder)?;
    let dir = ensure_dir(&run.out)?;
    m.kernel_csv().write(&dir.join("kernel.csv"))?;
    m.probe_csv().write(&dir.join("probe.csv"))?;
    m.limit_csv().write(&dir.join("martin_limit.csv"))?;
    println!("negative-tail shift C = {}", greenlab::csv::float(m.c_z));
    for (k, e) in m.errors.iter().enumerate() {
        println!("m = {}: sup |K(., y_m) - phi| = {e:.6}", k + 3);
    }
    for end in &m.ends {
        println!("end {}: divergent = {}, rate {:.6}", end.end.label(run.operator.geometry), end.divergent, end.rate);
    }
    Ok(0)
}

fn verify(suite: &str, verbose: bool) -> Result<u8, Failure> {
    let ids: Vec<usize> = if suite == "all" {
        (1..=TITLES.len()).collect()
    } else {
        suite
            .split(',')
            .map(|s| s.trim().parse().ok().filter(|&i| (1..=TITLES.len()).contains(&i)))
            .collect::<Option<_>>()
            .ok_or_else(|| Failure::Config(format!("bad suite `{suite}`")))?
    };
    let reports = run_suite(&ids);
    for r in &reports {
        println!("{}", r.line());
        if verbose {
            for d in &r.detail[1..] {
                println!("       {d}");
            }
        }
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    println!("{passed}/{} criteria pass", reports.len());
    Ok(if passed == reports.len() { 0 } else { 1 })
}

fn report() {
    println!("{:<22} {:<60} {:<28} origin", "oracle", "formula", "region");
    for e in catalogue() {
        println!("{:<22} {:<60} {:<28} {}", e.name, e.formula, e.region, e.source);
    }
    println!();
    println!("{:<20} {:<10} construction", "preset", "geometry");
    for name in PRESETS {
        let r = preset(name).expect("preset");
        let s = &r.construction;
        println!("{:<20} {:<10} n = {}, {} windows, pole {}", name, format!("{:?}", r.operator.geometry), s.n, s.jmax, s.pole);
    }
}
