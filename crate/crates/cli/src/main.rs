//! Command-line interface: homology grids, link invariants, spectral
//! sequence pages, randomized Reidemeister scrambles and the verification
//! suite, over diagrams given as bundled names or paths to diagram files.
//!
//! Exit codes: 0 success, 1 check or computation failure, 2 usage error.

use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dkh::cobordism::{movie_two_colourable, parse_movie};
use dkh::diagram::{parse_diagram, ProjectiveDiagram};
use dkh::exactalg::RingTag;
use dkh::moves::random_script;
use dkh::render;
use dkh::theories::{
    bn_homology, bn_spectral, dkh_homology, lee_homology, lee_spectral, rasmussen,
    reduced_homology, TheoryTag,
};

#[derive(Parser)]
#[command(
    name = "dkh",
    about = "Doubled Khovanov, Lee and Bar-Natan homology for links in RP^3",
    long_about = "Computes doubled link homologies from tangle diagrams in a disk with \
antipodally identified boundary endpoints. Diagrams are bundled names (see `dkh list`) \
or paths to diagram files. The cube size limit honours the DKH_MAX_CROSSINGS \
environment variable."
)]
struct Cli {
    /// Worker threads for the engine (results are identical regardless).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TheoryFlag {
    Dkh,
    Lee,
    Bn,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RingFlag {
    Z,
    Q,
    F2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct FormatArg {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Homology grid of a diagram for one of the three theories.
    Homology {
        diagram: String,
        #[arg(long, value_enum, default_value = "dkh")]
        theory: TheoryFlag,
        /// Coefficients; doubled Lee needs Q and doubled Bar-Natan F2.
        #[arg(long, value_enum)]
        ring: Option<RingFlag>,
        /// Reduced theory at the marked arc (doubled Khovanov or Bar-Natan).
        #[arg(long)]
        reduced: bool,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Combinatorial and homological invariants of a diagram.
    Invariants {
        diagram: String,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Spectral sequence pages (Lee over Q, Bar-Natan over F2).
    Ss {
        diagram: String,
        #[arg(long, value_enum, default_value = "lee")]
        theory: TheoryFlag,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Apply a seeded random Reidemeister move script.
    Moves {
        diagram: String,
        #[arg(long, default_value = "0")]
        seed: u64,
        #[arg(long, default_value = "10")]
        count: usize,
        /// Growth cap: no move raises the crossing count above this.
        #[arg(long, default_value = "8")]
        max_crossings: usize,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Euler characteristic, colourability and genus of a movie file.
    Movie { file: String },
    /// Run the verification suite.
    Verify,
    /// List bundled diagrams and movies.
    List,
}

fn load_diagram(spec: &str) -> Result<ProjectiveDiagram, String> {
    if let Some(d) = dkh::bundled::bundled(spec) {
        return Ok(d);
    }
    if Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec).map_err(|e| format!("{spec}: {e}"))?;
        return parse_diagram(&text).map_err(|e| format!("{spec}: {e}"));
    }
    Err(format!(
        "{spec}: not a bundled diagram name or a readable file (see `dkh list`)"
    ))
}

fn ring_tag(r: RingFlag) -> RingTag {
    match r {
        RingFlag::Z => RingTag::Integers,
        RingFlag::Q => RingTag::Rationals,
        RingFlag::F2 => RingTag::Mod2,
    }
}

/// Usage errors exit 2, everything else that fails exits 1.
enum Failure {
    Usage(String),
    Check(String),
}

impl Failure {
    fn code(&self) -> ExitCode {
        match self {
            Failure::Usage(_) => ExitCode::from(2),
            Failure::Check(_) => ExitCode::from(1),
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Check(m) => m,
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Homology {
            diagram,
            theory,
            ring,
            reduced,
            format,
        } => {
            let d = load_diagram(&diagram).map_err(Failure::Usage)?;
            let ring = match (theory, ring) {
                (TheoryFlag::Dkh, r) => ring_tag(r.unwrap_or(RingFlag::Z)),
                (TheoryFlag::Lee, None | Some(RingFlag::Q)) => RingTag::Rationals,
                (TheoryFlag::Lee, Some(_)) => {
                    return usage("doubled Lee homology is computed over Q (--ring q)")
                }
                (TheoryFlag::Bn, None | Some(RingFlag::F2)) => RingTag::Mod2,
                (TheoryFlag::Bn, Some(_)) => {
                    return usage("doubled Bar-Natan homology is computed over F2 (--ring f2)")
                }
            };
            match theory {
                TheoryFlag::Dkh => {
                    let h = if reduced {
                        reduced_homology(&d, TheoryTag::DoubledKhovanov, ring)
                            .map_err(|e| Failure::Check(e.to_string()))?
                    } else {
                        dkh_homology(&d, ring).map_err(|e| Failure::Check(e.to_string()))?
                    };
                    print_grid(&h, format.format);
                }
                TheoryFlag::Bn if reduced => {
                    let h = reduced_homology(&d, TheoryTag::DoubledBarNatan, ring)
                        .map_err(|e| Failure::Check(e.to_string()))?;
                    print_grid(&h, format.format);
                }
                TheoryFlag::Lee if reduced => {
                    return usage(
                        "the v_- span is not a subcomplex of the doubled Lee complex; \
                         --reduced supports dkh and bn",
                    );
                }
                TheoryFlag::Lee => {
                    let h = lee_homology(&d).map_err(|e| Failure::Check(e.to_string()))?;
                    print_filtered(&h, format.format);
                }
                TheoryFlag::Bn => {
                    let h = bn_homology(&d).map_err(|e| Failure::Check(e.to_string()))?;
                    print_filtered(&h, format.format);
                }
            }
        }
        Command::Invariants { diagram, format } => {
            let d = load_diagram(&diagram).map_err(Failure::Usage)?;
            let comps = d.components();
            let knot = comps.len() == 1;
            let colourings = dkh::colouring::enumerate_two_colourings(&d);
            let odd = dkh::colouring::odd_writhe_set(&d);
            let lee = lee_homology(&d).map_err(|e| Failure::Check(e.to_string()))?;
            let bn = bn_homology(&d).map_err(|e| Failure::Check(e.to_string()))?;
            let ds_q = knot.then(|| rasmussen(&d, RingTag::Rationals)).transpose();
            let ds_f2 = knot.then(|| rasmussen(&d, RingTag::Mod2)).transpose();
            let (ds_q, ds_f2) = match (ds_q, ds_f2) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return Err(Failure::Check(e.to_string())),
            };
            let report = serde_json::json!({
                "components": comps.len(),
                "writhe": d.writhe(),
                "wall_passages": d.wall_passages(),
                "degenerate_components": d.degenerate_components(),
                "two_colourings": colourings.len(),
                "odd_writhes": odd,
                "ds_Q": ds_q,
                "ds_F2": ds_f2,
                "lee_s_support": lee.s_support(),
                "bn_s_support": bn.s_support(),
            });
            match format.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
                _ => {
                    println!("components:            {}", comps.len());
                    println!("writhe:                {}", d.writhe());
                    println!("wall passages:         {}", d.wall_passages());
                    println!("degenerate components: {:?}", d.degenerate_components());
                    println!("2-colourings:          {}", colourings.len());
                    println!("odd writhes:           {odd:?}");
                    match ds_q {
                        Some(v) => println!("ds over Q:             {v}"),
                        None => println!("ds over Q:             undefined (not a knot)"),
                    }
                    match ds_f2 {
                        Some(v) => println!("ds over F2:            {v}"),
                        None => println!("ds over F2:            undefined (not a knot)"),
                    }
                    println!("Lee s-support:         {:?}", lee.s_support());
                    println!("BN s-support:          {:?}", bn.s_support());
                }
            }
        }
        Command::Ss {
            diagram,
            theory,
            format,
        } => {
            let d = load_diagram(&diagram).map_err(Failure::Usage)?;
            let ss = match theory {
                TheoryFlag::Lee => lee_spectral(&d).map_err(|e| Failure::Check(e.to_string()))?,
                TheoryFlag::Bn => bn_spectral(&d).map_err(|e| Failure::Check(e.to_string()))?,
                TheoryFlag::Dkh => {
                    return usage("the doubled Khovanov grading is not filtered; use lee or bn")
                }
            };
            match format.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&render::spectral_json(&ss)).unwrap()
                ),
                _ => print!("{}", render::spectral_text(&ss)),
            }
        }
        Command::Moves {
            diagram,
            seed,
            count,
            max_crossings,
            format,
        } => {
            let d = load_diagram(&diagram).map_err(Failure::Usage)?;
            let (script, out) = random_script(&d, seed, count, max_crossings);
            if !out.validate().is_empty() {
                return Err(Failure::Check("move output failed validation".into()));
            }
            match format.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "moves": script.moves,
                        "diagram": out.serialize(),
                    }))
                    .unwrap()
                ),
                _ => {
                    for m in &script.moves {
                        println!("# {m:?}");
                    }
                    print!("{}", out.serialize());
                }
            }
        }
        Command::Movie { file } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| Failure::Usage(format!("{file}: {e}")))?;
            let movie = parse_movie(&text).map_err(|e| Failure::Check(e.to_string()))?;
            let frames = movie.frames().map_err(|e| Failure::Check(e.to_string()))?;
            println!("events:               {}", movie.events.len());
            println!("euler characteristic: {}", movie.euler_characteristic());
            println!(
                "2-colourable:         {}",
                movie_two_colourable(&movie).map_err(|e| Failure::Check(e.to_string()))?
            );
            match movie.genus() {
                Ok(g) => println!("genus:                {g}"),
                Err(e) => println!("genus:                undefined ({e})"),
            }
            println!("final diagram:\n{}", frames.last().unwrap().serialize());
        }
        Command::Verify => {
            let results = dkh::verify::run_all();
            let mut ok = true;
            for r in &results {
                println!(
                    "{} {}: {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.details
                );
                ok &= r.passed;
            }
            if !ok {
                return Err(Failure::Check("verification suite failed".into()));
            }
        }
        Command::List => {
            println!("bundled diagrams:");
            for b in dkh::bundled::BUNDLED {
                println!("  {:<18} {}", b.name, b.description);
            }
            println!("bundled movies:");
            for (name, _) in dkh::bundled::BUNDLED_MOVIES {
                println!("  {name}");
            }
        }
    }
    Ok(())
}

fn print_grid(h: &dkh::exactalg::HomologySummary, format: Format) {
    match format {
        Format::Text => print!("{}", render::grid_text(h)),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&render::grid_json(h)).unwrap()
        ),
        Format::Csv => print!("{}", render::grid_csv(h)),
    }
}

fn print_filtered(h: &dkh::exactalg::FilteredHomology, format: Format) {
    match format {
        Format::Text => print!("{}", render::filtered_text(h)),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&render::filtered_json(h)).unwrap()
        ),
        Format::Csv => {
            println!("i,rank,s,level_rank");
            for d in &h.degrees {
                for (s, m) in &d.s_levels {
                    println!("{},{},{},{}", d.i, d.rank, s, m);
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}
