//! Command line front end: inspect a line configuration, compute boundary
//! and cover homology, run the consistency checks, or sweep the whole
//! example corpus.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use plumbline::arrangement::{self, LineConfiguration};
use plumbline::pipeline::{self, CheckStatus, Report, RunOptions};

#[derive(Parser)]
#[command(
    name = "plumbline",
    version,
    about = "Homology of the two 3-manifolds attached to a complex line arrangement"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// How a configuration is named on the command line.
#[derive(Args)]
struct ConfigSource {
    /// Path to a configuration file (.arr)
    #[arg(
        value_name = "FILE",
        required_unless_present = "catalog",
        conflicts_with = "catalog"
    )]
    file: Option<PathBuf>,

    /// Built-in family instead of a file: generic:N, pencil:N,
    /// near_pencil:N, maclane, with_concurrencies:N:f1;f2;...
    #[arg(long, value_name = "SPEC")]
    catalog: Option<String>,
}

impl ConfigSource {
    fn load(&self) -> Result<(String, LineConfiguration), pipeline::PipelineError> {
        if let Some(spec) = &self.catalog {
            let entry = arrangement::parse_catalog_spec(spec)?;
            let config = arrangement::catalog(&entry)?;
            Ok((format!("catalog:{spec}"), config))
        } else {
            let path = self.file.as_ref().expect("clap enforces one source");
            let config = arrangement::read_arr_file(path)?;
            Ok((path.display().to_string(), config))
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Combinatorial invariants only: multiplicity tuple, Betti numbers,
    /// characteristic polynomial, rank formula
    Info {
        #[command(flatten)]
        source: ConfigSource,
        /// Emit the full report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Plumbing graph and first homology of the boundary manifold
    Boundary {
        #[command(flatten)]
        source: ConfigSource,
        #[arg(long)]
        json: bool,
    },
    /// First homology of the cyclic cover of the given degree (defaults to
    /// the line count, i.e. the Milnor fiber boundary)
    Cover {
        #[command(flatten)]
        source: ConfigSource,
        /// Cover degree; must divide the line count
        #[arg(long, value_name = "D")]
        modulus: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Homology along the tower of two-power covers (line count must be a
    /// power of two)
    Tower {
        #[command(flatten)]
        source: ConfigSource,
        #[arg(long)]
        json: bool,
    },
    /// Everything: all invariants, all consistency checks, observations
    Report {
        #[command(flatten)]
        source: ConfigSource,
        #[arg(long)]
        json: bool,
    },
    /// Run every corpus configuration and compare against annotations and
    /// the built-in reference table
    Table1 {
        /// Directory of .arr files
        #[arg(long, value_name = "DIR", default_value = "corpus")]
        corpus: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, pipeline::PipelineError> {
    match command {
        Command::Info { source, json } => {
            let (label, config) = source.load()?;
            let report = pipeline::run(&label, &config, &RunOptions::info_only())?;
            if json {
                println!("{}", pipeline::to_json(&report));
            } else {
                print_input(&report);
                print_combinatorics(&report);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Boundary { source, json } => {
            let (label, config) = source.load()?;
            let mut opts = RunOptions::info_only();
            opts.include_boundary = true;
            let report = pipeline::run(&label, &config, &opts)?;
            if json {
                println!("{}", pipeline::to_json(&report));
            } else {
                print_input(&report);
                print_boundary(&report);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Cover {
            source,
            modulus,
            json,
        } => {
            let (label, config) = source.load()?;
            let mut opts = RunOptions::info_only();
            opts.include_boundary = true;
            opts.include_cover = true;
            opts.cover_degree = modulus;
            let report = pipeline::run(&label, &config, &opts)?;
            if json {
                println!("{}", pipeline::to_json(&report));
            } else {
                print_input(&report);
                if let Some(c) = &report.milnor_boundary {
                    println!("cover degree {}", c.degree);
                    println!("H1 = {}", c.h1.display);
                    println!(
                        "rank {}  mod-2 rank {}  even torsion factors {}",
                        c.h1.free_rank, c.mod2_rank, c.even_torsion_count
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Tower { source, json } => {
            let (label, config) = source.load()?;
            let mut opts = RunOptions::info_only();
            opts.include_boundary = true;
            opts.include_tower = true;
            let report = pipeline::run(&label, &config, &opts)?;
            if json {
                println!("{}", pipeline::to_json(&report));
            } else {
                print_input(&report);
                print_tower(&report);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { source, json } => {
            let (label, config) = source.load()?;
            let report = pipeline::run(&label, &config, &RunOptions::full())?;
            if json {
                println!("{}", pipeline::to_json(&report));
            } else {
                print_full(&report);
            }
            Ok(if report.all_checks_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Table1 { corpus, json } => {
            let items = pipeline::load_corpus_dir(&corpus)?;
            let outcome = pipeline::run_table_harness(&items, &RunOptions::full())?;
            if json {
                println!("{}", outcome.to_json());
            } else {
                print!("{}", outcome.to_text());
            }
            Ok(if outcome.all_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
    }
}

fn print_input(report: &Report) {
    println!("source: {}", report.input.source);
    println!(
        "lines {}  multiplicity tuple {}  double points {}  assumption {}",
        report.input.n,
        report.input.multiplicity_tuple,
        report.input.double_points,
        if report.input.assumption_star {
            "holds"
        } else {
            "fails"
        }
    );
}

fn print_combinatorics(report: &Report) {
    let c = &report.combinatorics;
    println!("charpoly coefficients (t^3..t^0): {:?}", c.charpoly);
    println!(
        "Betti numbers: cone {:?}, projective complement {:?}",
        c.betti_cone, c.betti_projective
    );
    println!(
        "Euler characteristic of the projective complement: {}",
        c.chi_projective
    );
    println!(
        "predicted Milnor fiber boundary rank: {}",
        c.milnor_boundary_rank_formula
    );
}

fn print_boundary(report: &Report) {
    if let Some(b) = &report.boundary {
        println!(
            "plumbing graph: {} vertices, {} edges, first Betti number {}",
            b.graph_vertices, b.graph_edges, b.graph_b1
        );
        println!("H1(boundary manifold) = {}", b.h1.display);
        println!(
            "simplified presentation: {} generators, {} relators",
            b.simplified_generators, b.simplified_relators
        );
    }
}

fn print_tower(report: &Report) {
    if let Some(t) = &report.tower {
        println!("tower of two-power covers:");
        for l in &t.levels {
            println!(
                "  degree {:>3}: H1 = {}  (mod-2 rank {})",
                l.degree, l.h1.display, l.mod2_rank
            );
        }
        println!("  alpha {:?}  rho {:?}  tau {:?}", t.alpha, t.rho, t.tau);
    }
}

fn print_full(report: &Report) {
    print_input(report);
    print_combinatorics(report);
    print_boundary(report);
    if let Some(m) = &report.milnor_boundary {
        println!("H1(Milnor fiber boundary) = {}", m.h1.display);
        println!(
            "rank {}  mod-2 rank {}  even torsion factors {}",
            m.h1.free_rank, m.mod2_rank, m.even_torsion_count
        );
    }
    if let Some(r) = &report.resonance {
        println!(
            "resonance: alpha0 {}  algebra dims {:?}  double dims {:?}  d {}  beta {}",
            r.alpha0, r.dims_algebra, r.dims_double, r.d, r.beta
        );
    }
    print_tower(report);
    println!("checks:");
    for c in &report.checks {
        let status = match c.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::NotApplicable => "n/a ",
        };
        let values: Vec<String> = c.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!("  [{status}] {} {}", c.key, values.join("  "));
    }
    for o in &report.observations {
        println!("note: {o}");
    }
}
