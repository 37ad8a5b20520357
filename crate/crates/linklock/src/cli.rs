//! The `linklock` command line. Every subcommand is a thin shell over the
//! library call of the same name.
//!
//! Exit status: 0 on success, 2 when an input is unreadable or invalid,
//! 3 when a probe contradicts its expected outcome, 64 on usage errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use linklock_core::constructions::{ConstructionError, FixtureParams};
use linklock_core::flatten::{flatten_components, FlattenOptions};
use linklock_core::rigidity::reduce;
use linklock_core::Motion;

use crate::fixtures::{self, Fixture};
use crate::io::{self, ComponentRecord, FlattenRecord, IoError, Loaded, TraceRecord};
use crate::probe::{run_probe, ProbeParams};
use crate::render::{render_configuration, render_motion, render_touching, RenderStyle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_EXPECTATION: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable supplying the seed when `--seed` is absent.
pub const SEED_ENV: &str = "LINKLOCK_SEED";

#[derive(Parser, Debug)]
#[command(name = "linklock", version, about = "Locked planar tree linkages: fixtures, rigidity, flattening, probes, SVG")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct FixtureArgs {
    /// Half-height of the vertical segment.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Horizontal edge length (fig3).
    #[arg(long, default_value_t = 0.01)]
    h: f64,
    /// Vertical gap (fig3).
    #[arg(long, default_value_t = 0.01)]
    g: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a fixture as JSON.
    Gen {
        /// fig2, fig2b, fig2-aug, fig2-cut, fig3, comb or chain-N.
        fixture: String,
        #[command(flatten)]
        dims: FixtureArgs,
        /// Perturb touching fixtures by this much (fig2-cut: defaults to 0.01).
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run the rigidity reduction on a touching configuration; prints the proof log.
    Rigidity {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Flatten a configuration (each component of a forest separately).
    Flatten {
        file: PathBuf,
        /// Root vertex id; defaults to the first vertex.
        #[arg(long)]
        root: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 20)]
        restarts: u32,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Perturb-and-flatten sweep over δ; writes a JSON report.
    Probe {
        /// fig2, fig2-aug or fig2-cut.
        fixture: String,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Comma-separated, strictly decreasing; defaults to 0.1,0.05,0.01 times the scale.
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
        #[arg(long, default_value_t = 10)]
        trials: u32,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write one CSV row per trial.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Draw a configuration, touching configuration or motion as SVG.
    Render {
        file: PathBuf,
        /// Render a motion (a motion file, or the first component of a flatten result).
        #[arg(long)]
        motion: bool,
        /// Pull-apart ε for touching configurations (at most ε₀).
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        no_labels: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
}

/// A failure with its exit status.
struct Failure(i32, String);

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure(EXIT_INVALID, e.to_string())
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure(EXIT_INVALID, e.to_string())
}

fn construction(e: ConstructionError) -> Failure {
    match e {
        ConstructionError::UnknownFixture(_) => Failure(EXIT_USAGE, e.to_string()),
        _ => invalid(e),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Failure(EXIT_USAGE, format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

/// Runs the command line `argv` (program name first) and returns the exit status.
pub fn cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let parsed = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(parsed.command) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            eprintln!("linklock: {msg}");
            code
        }
    }
}

fn run(cmd: Command) -> Result<i32, Failure> {
    match cmd {
        Command::Gen { fixture, dims, delta, seed, output } => {
            if !fixtures::is_known(&fixture) {
                return Err(Failure(EXIT_USAGE, format!("unknown fixture {fixture:?}; known: {}", fixtures::FIXTURE_NAMES.join(", "))));
            }
            let defaults = FixtureParams::default();
            let params = FixtureParams { scale: dims.scale, h: dims.h, g: dims.g, delta: delta.unwrap_or(defaults.delta), seed: resolve_seed(seed)? };
            let text = match fixtures::generate(&fixture, &params, delta.is_some()).map_err(construction)? {
                Fixture::Touching(tc) => io::touching_to_json(&tc),
                Fixture::Configuration(c) => io::configuration_to_json(&c),
            };
            write(&output, &text)?;
        }
        Command::Rigidity { file, output } => {
            let tc = io::touching_from_json(&read(&file)?)?;
            let trace = reduce(&tc).map_err(invalid)?;
            print!("{}", trace.proof_log(tc.linkage()));
            write(&output, &io::to_json(&TraceRecord::new(&trace, tc.linkage())))?;
        }
        Command::Flatten { file, root, budget, seed, restarts, output } => {
            let c = io::configuration_from_json(&read(&file)?)?;
            let root = match root {
                Some(r) if c.linkage().index_of(&r).is_none() => return Err(invalid(format!("unknown root vertex {r:?}"))),
                Some(r) => r,
                None => c.linkage().vertices().first().cloned().ok_or_else(|| invalid("empty linkage"))?,
            };
            let seed = resolve_seed(seed)?;
            let opts = FlattenOptions { budget, seed, restarts, ..FlattenOptions::default() };
            let parts = flatten_components(&c, &root, &opts).map_err(invalid)?;
            let components: Vec<ComponentRecord> = parts
                .iter()
                .map(|(part, r)| {
                    let l = part.linkage();
                    let name = if l.index_of(&root).is_some() { root.clone() } else { l.vertices()[0].clone() };
                    println!("{name}: {} flatness {} maxDisplacement {} ({} steps)", r.status.name(), r.final_flatness, r.max_displacement, r.steps);
                    ComponentRecord::new(&name, r)
                })
                .collect();
            write(&output, &io::to_json(&FlattenRecord { budget, seed, components }))?;
        }
        Command::Probe { fixture, scale, deltas, trials, budget, seed, csv, output } => {
            if !fixtures::PROBE_FIXTURES.contains(&fixture.as_str()) {
                return Err(Failure(EXIT_USAGE, format!("unknown probe fixture {fixture:?}; known: {}", fixtures::PROBE_FIXTURES.join(", "))));
            }
            let params = FixtureParams { scale, ..FixtureParams::default() };
            let (tc, expect_locked) = fixtures::probe_fixture(&fixture, &params).map_err(construction)?;
            let p = ProbeParams {
                deltas: deltas.unwrap_or_else(|| vec![0.1 * scale, 0.05 * scale, 0.01 * scale]),
                trials,
                budget,
                seed: resolve_seed(seed)?,
                expect_locked,
                ..ProbeParams::default()
            };
            let report = run_probe(&fixture, &tc, &p).map_err(invalid)?;
            print!("{}", report.to_text());
            write(&output, &io::to_json(&report))?;
            if let Some(path) = csv {
                write(&path, &report.to_csv())?;
            }
            if !report.expectation_failures().is_empty() {
                return Ok(EXIT_EXPECTATION);
            }
        }
        Command::Render { file, motion, epsilon, no_labels, output } => {
            let text = read(&file)?;
            let style = RenderStyle { pull_apart_epsilon: epsilon, labels: !no_labels, ..RenderStyle::default() };
            let loaded = if motion { Loaded::Motion(motion_input(&text)?) } else { io::parse(&text)? };
            match loaded {
                Loaded::Configuration(c) => write(&output, &render_configuration(&c, &style).map_err(invalid)?)?,
                Loaded::Touching(tc) => write(&output, &render_touching(&tc, &style).map_err(invalid)?)?,
                Loaded::Motion(m) => {
                    let svg = render_motion(&m, &style).map_err(invalid)?;
                    for (i, frame) in svg.frames.iter().enumerate() {
                        write(&frame_path(&output, i), frame)?;
                    }
                    write(&output, &svg.animated)?;
                }
                Loaded::Linkage(_) => return Err(invalid("a bare linkage has no coordinates to draw")),
            }
        }
    }
    Ok(EXIT_OK)
}

/// A motion file, or the first component of a flatten result.
fn motion_input(text: &str) -> Result<Motion, Failure> {
    if let Ok(rec) = serde_json::from_str::<FlattenRecord>(text) {
        let first = rec.components.first().ok_or_else(|| invalid("flatten result has no components"))?;
        return match first.motion.load()? {
            Loaded::Motion(m) => Ok(m),
            other => Err(invalid(format!("expected a motion, found a {}", other.kind()))),
        };
    }
    Ok(io::motion_from_json(text)?)
}

/// `out.svg` → `out-frame-0003.svg`.
pub fn frame_path(output: &Path, i: usize) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "motion".into());
    output.with_file_name(format!("{stem}-frame-{i:04}.svg"))
}
