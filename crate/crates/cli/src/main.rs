mod source;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use nilentropy::bfs::{DEFAULT_BUDGET, DEFAULT_RADIUS_CAP};
use nilentropy::constructions::{semidirect_unipotent, surface_lie_ranks, upper_central_lengths};
use nilentropy::growth::{
    abelian_comparison, distortion_profile, growth_series, growth_series_with, quotient_tower, tower_is_monotone,
    DistortionConfig, GrowthOptions, GrowthSeries, LengthMode, LengthOracle,
};
use nilentropy::hall::HallBasis;
use nilentropy::json::{group_to_json, semidirect_to_json};
use nilentropy::{spectral_report, Polycyclic};

#[derive(Parser)]
#[command(name = "nilentropy", version, about = "Automorphism growth experiments in nilpotent groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Hall basis: index, weight, bracket.
    Hall {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        class: usize,
    },
    /// Normal form of a word in the generators.
    Eval {
        #[arg(long)]
        group: String,
        #[arg(long)]
        word: String,
    },
    /// Product of two elements, given as coordinates or words.
    Mul {
        #[arg(long)]
        group: String,
        a: String,
        b: String,
    },
    /// Word length of an element in one or all length modes.
    Len {
        #[arg(long)]
        group: String,
        #[arg(long)]
        element: String,
        #[arg(long)]
        mode: Option<String>,
        #[arg(long, default_value_t = DEFAULT_RADIUS_CAP)]
        radius_cap: u32,
    },
    /// Graded matrices and spectral data of an endomorphism, as JSON.
    AutCheck {
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        aut: String,
    },
    /// Write the series l(phi^n(g)), n = 1..N, as CSV.
    Grow {
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        aut: String,
        #[arg(long)]
        subject: String,
        #[arg(long, default_value_t = 30)]
        n: u32,
        #[arg(long, default_value = "karidi")]
        mode: String,
        #[arg(long, default_value_t = DEFAULT_RADIUS_CAP)]
        radius_cap: u32,
        /// CSV output; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Two-column `n length` plot data.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Compare the entropy estimate with the spectral radius on H_1.
    Entropy {
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        aut: String,
        /// Subjects (default: the generators); repeatable.
        #[arg(long)]
        subject: Vec<String>,
        #[arg(long, default_value_t = 30)]
        n: u32,
        /// JSON report; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Entropy estimates on the quotients N / gamma_k(N).
    Tower {
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        aut: String,
        /// Comma-separated levels k, each in [2, class + 1].
        #[arg(long, default_value = "2,3,4")]
        levels: String,
        #[arg(long)]
        subject: Vec<String>,
        #[arg(long, default_value_t = 30)]
        n: u32,
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
        /// CSV table; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distortion degree of gamma_i from BFS data.
    Distortion {
        #[arg(long)]
        group: String,
        #[arg(long)]
        weight: usize,
        #[arg(long, default_value_t = 16)]
        max_radius: u32,
        #[arg(long, default_value_t = 400_000)]
        max_ball: usize,
        /// JSON report; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Two-column `r D(r)` envelope.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// The semidirect product N x Z for a unipotent automorphism.
    Semidirect {
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        aut: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nilpotent quotient of a closed surface group.
    Surface {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        class: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A problem with the invocation rather than the computation.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("NILENTROPY_THREADS") else {
        return Ok(());
    };
    let n: usize = match v.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return Err(UsageError(format!("NILENTROPY_THREADS must be a positive integer, got `{v}`")).into()),
    };
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot write `{}`", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: Option<&Path>, v: &Value) -> Result<()> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Integral lengths print without a fractional part.
fn format_length(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

fn write_csv(w: Box<dyn Write>, series: &GrowthSeries) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["n", "length", "mode"])?;
    for e in &series.entries {
        csv.write_record([e.n.to_string(), format_length(e.length), e.mode.to_string()])?;
    }
    csv.flush()?;
    Ok(())
}

fn write_plot(path: &Path, blocks: &[(String, Vec<(u64, f64)>)]) -> Result<()> {
    let mut w = output(Some(path))?;
    for (i, (label, points)) in blocks.iter().enumerate() {
        if i > 0 {
            writeln!(w, "\n")?;
        }
        writeln!(w, "# {label}")?;
        for (n, y) in points {
            writeln!(w, "{n} {}", format_length(*y))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Hall { rank, class } => {
            print!("{}", HallBasis::generate(rank, class)?);
        }
        Command::Eval { group, word } => {
            let spec = source::group(&group)?;
            println!("{}", source::element(&spec, &word)?);
        }
        Command::Mul { group, a, b } => {
            let spec = source::group(&group)?;
            let (a, b) = (source::element(&spec, &a)?, source::element(&spec, &b)?);
            println!("{}", spec.multiply(&a, &b));
        }
        Command::Len {
            group,
            element,
            mode,
            radius_cap,
        } => {
            let spec = source::group(&group)?;
            let g = source::element(&spec, &element)?;
            let modes = match mode {
                Some(m) => vec![m.parse::<LengthMode>()?],
                None => LengthMode::ALL.to_vec(),
            };
            let options = GrowthOptions {
                radius_cap,
                budget: DEFAULT_BUDGET,
            };
            for m in modes {
                let value = LengthOracle::new(&spec, m, options)?.length(&g)?;
                match value {
                    Some(v) => println!("{m}\t{}", format_length(v)),
                    None => println!("{m}\tunknown (beyond radius {radius_cap})"),
                }
            }
        }
        Command::AutCheck { group, aut } => {
            let (spec, phi) = source::group_and_automorphism(group.as_deref(), &aut)?;
            let report = spectral_report(&phi.abelianization_matrix())?;
            let graded: Vec<String> = (1..=spec.class())
                .map(|w| phi.graded_matrix(w).map(|m| m.to_string()))
                .collect::<nilentropy::Result<_>>()?;
            write_json(
                None,
                &json!({
                    "automorphism": phi.is_automorphism(),
                    "homologically_trivial": phi.is_homologically_trivial(),
                    "graded_matrices": graded,
                    "spectral": report,
                }),
            )?;
        }
        Command::Grow {
            group,
            aut,
            subject,
            n,
            mode,
            radius_cap,
            out,
            plot,
        } => {
            let mode: LengthMode = mode.parse()?;
            let (spec, phi) = source::group_and_automorphism(group.as_deref(), &aut)?;
            let g = source::element(&spec, &subject)?;
            let options = GrowthOptions {
                radius_cap,
                budget: DEFAULT_BUDGET,
            };
            let series = growth_series_with(&phi, &g, n, mode, options)?;
            write_csv(output(out.as_deref())?, &series)?;
            if let Some(p) = plot {
                write_plot(&p, &[(format!("subject {} mode {mode}", g), series.points(mode))])?;
            }
        }
        Command::Entropy {
            group,
            aut,
            subject,
            n,
            out,
            plot,
        } => {
            let (spec, phi) = source::group_and_automorphism(group.as_deref(), &aut)?;
            let subjects = source::subjects(&spec, &subject)?;
            let report = abelian_comparison(&phi, &subjects, n)?;
            write_json(out.as_deref(), &serde_json::to_value(&report)?)?;
            if let Some(p) = plot {
                let blocks = subjects
                    .iter()
                    .map(|g| {
                        let s = growth_series(&phi, g, n, LengthMode::Karidi)?;
                        Ok((format!("subject {g} mode karidi"), s.points(LengthMode::Karidi)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                write_plot(&p, &blocks)?;
            }
        }
        Command::Tower {
            group,
            aut,
            levels,
            subject,
            n,
            tolerance,
            out,
        } => {
            let (spec, phi) = source::group_and_automorphism(group.as_deref(), &aut)?;
            let levels = source::usize_list(&levels).map_err(|e| UsageError(format!("{e:#}")))?;
            let subjects = source::subjects(&spec, &subject)?;
            let tower = quotient_tower(&phi, &subjects, &levels, n)?;
            let mut csv = csv::Writer::from_writer(output(out.as_deref())?);
            csv.write_record(["level", "hirsch_length", "entropy", "rate", "residual"])?;
            for l in &tower {
                csv.write_record([
                    l.level.to_string(),
                    l.hirsch_length.to_string(),
                    l.estimate.value.to_string(),
                    l.estimate.rate.to_string(),
                    l.estimate.residual.to_string(),
                ])?;
            }
            csv.flush()?;
            eprintln!("monotone within {tolerance}: {}", tower_is_monotone(&tower, tolerance));
        }
        Command::Distortion {
            group,
            weight,
            max_radius,
            max_ball,
            out,
            plot,
        } => {
            let spec = source::group(&group)?;
            let cfg = DistortionConfig {
                max_radius,
                max_ball,
                ..DistortionConfig::default()
            };
            let profile = distortion_profile(&spec, weight, cfg)?;
            write_json(out.as_deref(), &serde_json::to_value(&profile)?)?;
            if let Some(p) = plot {
                let points = profile.envelope.iter().map(|&(r, d)| (r as u64, d as f64)).collect();
                write_plot(&p, &[(format!("weight {weight} envelope"), points)])?;
            }
        }
        Command::Semidirect { group, aut, out } => {
            let (spec, phi) = source::group_and_automorphism(group.as_deref(), &aut)?;
            let s = semidirect_unipotent(&spec, &phi)?;
            let uc = upper_central_lengths(&s, s.hirsch_length())?;
            let mut doc = semidirect_to_json(&s);
            doc["upper_central_length"] = json!(uc.length);
            doc["lower_central_length"] = json!(uc.lower_central_length);
            write_json(out.as_deref(), &doc)?;
        }
        Command::Surface { genus, class, out } => {
            let ranks = surface_lie_ranks(genus, class)?;
            let spec = nilentropy::surface_quotient(genus, class)?;
            write_json(
                out.as_deref(),
                &json!({
                    "genus": genus,
                    "class": class,
                    "graded_ranks": ranks,
                    "hirsch_length": spec.hirsch_length(),
                    "group": group_to_json(&spec),
                }),
            )?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
