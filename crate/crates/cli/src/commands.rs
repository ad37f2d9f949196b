//! Command-line surface: argument parsing, dispatch and exit codes.
//!
//! Exit codes: 0 when every report is `Verified`, `NoViolationUpTo` or
//! `NotFoundUpTo`; 1 when some report carries a violation witness; 2 for
//! usage, config and input errors.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use bstree_core::checks;
use bstree_core::groups::check_automorphism;
use bstree_core::isometry::{check_compatibility, classify_isometry, find_witness};
use bstree_core::surfaces::CurveSpec;
use bstree_core::tree::{self, DotOptions, TreeVertex, VertexKind};
use bstree_core::{CheckReport, Side, Splitting, TreeEdge, Verdict, Word};
use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{parse_config, Bounds, ConfigErrors, Session, SplittingEntry};
use crate::suites::{self, class_text, run_jobs, BsParams, SurfaceParams};
use crate::DEFAULT_CONFIG;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config error\n{0}")]
    Config(#[from] ConfigErrors),
    #[error(transparent)]
    Core(#[from] bstree_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Parser)]
#[command(name = "bstree", version, about = "Groups acting on Bass–Serre trees")]
pub struct Cli {
    /// Session config; the built-in session is used when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Per-check wall-clock times on stderr.
    #[arg(long, global = true)]
    pub timings: bool,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    C1,
    C2,
    Faithful,
    Minimal,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteKind {
    Bs,
    Surface,
    Freeproduct,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normal form of a word.
    Nf {
        group: String,
        #[arg(allow_hyphen_values = true)]
        word: String,
    },
    /// Breadth-first ball around the base vertex.
    Ball {
        splitting: String,
        #[arg(long)]
        radius: Option<usize>,
        /// Transversal bound: coset representatives up to this length.
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        barycentric: bool,
    },
    /// Image of a vertex (`A:w`, `B:w`, `V:w`) or edge (`edge:w`).
    Act {
        splitting: String,
        #[arg(allow_hyphen_values = true)]
        word: String,
        #[arg(allow_hyphen_values = true)]
        target: String,
    },
    /// Structural conditions on a splitting.
    Check {
        splitting: String,
        #[arg(value_enum, default_value = "all")]
        which: Which,
        #[arg(long)]
        word: Option<usize>,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long)]
        transversal: Option<usize>,
        #[arg(long)]
        power: Option<u64>,
        #[arg(long, default_value_t = 6)]
        faithful_radius: usize,
        /// Orbit word bound for minimality; twice the radius by default.
        #[arg(long)]
        orbit: Option<usize>,
    },
    /// Extends an automorphism to the tree and checks compatibility.
    Extend {
        splitting: String,
        automorphism: String,
        #[arg(long)]
        witness_bound: Option<usize>,
        #[arg(long)]
        word: Option<usize>,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long)]
        transversal: Option<usize>,
    },
    /// Shipped acceptance pipelines.
    Suite {
        #[arg(value_enum)]
        kind: SuiteKind,
        #[arg(long, default_value_t = 2)]
        p: i64,
        #[arg(long, default_value_t = 3)]
        q: i64,
        #[arg(long, default_value_t = 4)]
        kmax: u32,
        #[arg(long, default_value_t = 2)]
        genus: u32,
        /// `separating:h` or `nonseparating`.
        #[arg(long, default_value = "nonseparating")]
        curve: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        length: usize,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
                return 0;
            }
            let _ = err.write_all(text.as_bytes());
            return 2;
        }
    };
    match execute(&cli, out, err) {
        Ok(violation) => i32::from(violation),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn load_session(cli: &Cli) -> Result<Session, CliError> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => DEFAULT_CONFIG.to_string(),
    };
    let mut session = parse_config(&text)?;
    if let Some(seed) = cli.seed {
        session.seed = seed;
    }
    Ok(session)
}

fn splitting<'a>(session: &'a Session, name: &str) -> Result<&'a SplittingEntry, CliError> {
    session
        .splittings
        .get(name)
        .ok_or_else(|| CliError::Usage(format!("no splitting named `{name}`")))
}

fn parse_curve(text: &str) -> Result<CurveSpec, CliError> {
    if text == "nonseparating" {
        return Ok(CurveSpec::NonSeparating);
    }
    text.strip_prefix("separating:")
        .and_then(|h| h.parse().ok())
        .map(CurveSpec::Separating)
        .ok_or_else(|| CliError::Usage(format!("curve must be `separating:h` or `nonseparating`, got `{text}`")))
}

enum Target {
    Vertex(TreeVertex),
    Edge(TreeEdge),
}

fn parse_target(s: &Splitting, text: &str) -> Result<Target, CliError> {
    let (kind, word) = text
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("expected `A:w`, `B:w`, `V:w` or `edge:w`, got `{text}`")))?;
    let rep = s.whole().parse_word(word)?;
    let kind = match (kind, s.is_hnn()) {
        ("edge", _) => return Ok(Target::Edge(tree::normalize_edge(s, &rep)?)),
        ("V", true) | ("A", true) => VertexKind::V,
        ("A", false) => VertexKind::A,
        ("B", false) => VertexKind::B,
        _ => {
            let kinds = if s.is_hnn() { "V" } else { "A or B" };
            return Err(CliError::Usage(format!(
                "vertex kind `{kind}` does not exist here, use {kinds}"
            )));
        }
    };
    Ok(Target::Vertex(tree::normalize_vertex(s, kind, &rep)?))
}

fn vertex_kinds(s: &Splitting) -> Vec<Side> {
    if s.is_hnn() {
        vec![Side::A]
    } else {
        vec![Side::A, Side::B]
    }
}

struct Printer<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    timings: bool,
    violation: bool,
}

impl Printer<'_> {
    fn line(&mut self, text: impl AsRef<str>) -> Result<(), CliError> {
        writeln!(self.out, "{}", text.as_ref()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        })
    }

    fn report(&mut self, r: &CheckReport) -> Result<(), CliError> {
        self.violation |= r.is_violation();
        if self.timings {
            if let Some(d) = r.elapsed {
                let _ = writeln!(self.err, "timing {}: {:.3} s", r.name, d.as_secs_f64());
            }
        }
        self.line(r.to_string())
    }

    fn timed(&mut self, f: impl FnOnce() -> bstree_core::Result<CheckReport>) -> Result<(), CliError> {
        let start = Instant::now();
        let mut r = f()?;
        r.elapsed = Some(start.elapsed());
        self.report(&r)
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool, CliError> {
    let mut p = Printer {
        out,
        err,
        timings: cli.timings,
        violation: false,
    };
    match &cli.command {
        Command::Suite {
            kind,
            p: bp,
            q,
            kmax,
            genus,
            curve,
            samples,
            length,
        } => {
            let (header, jobs) = match kind {
                SuiteKind::Bs => (
                    format!("suite bs [p={bp} q={q} kmax={kmax}]"),
                    suites::bs_jobs(BsParams {
                        p: *bp,
                        q: *q,
                        kmax: *kmax,
                    })?,
                ),
                SuiteKind::Surface => {
                    let curve = parse_curve(curve)?;
                    let seed = cli.seed.unwrap_or(0);
                    (
                        format!("suite surface [genus={genus} curve={curve} seed={seed}]"),
                        suites::surface_jobs(SurfaceParams {
                            genus: *genus,
                            curve,
                            seed,
                            samples: *samples,
                            max_len: *length,
                        })?,
                    )
                }
                SuiteKind::Freeproduct => (
                    "suite freeproduct [Z^2 * Z^3]".to_string(),
                    suites::free_product_jobs()?,
                ),
            };
            let output = run_jobs(jobs)?;
            if p.timings {
                for (label, d) in &output.timings {
                    let _ = writeln!(p.err, "timing {label}: {:.3} s", d.as_secs_f64());
                }
                p.timings = false;
            }
            p.line(header)?;
            for r in &output.reports {
                p.report(r)?;
            }
        }
        command => {
            let session = load_session(cli)?;
            run_session_command(&session, command, &mut p)?;
        }
    }
    Ok(p.violation)
}

fn run_session_command(session: &Session, command: &Command, p: &mut Printer<'_>) -> Result<(), CliError> {
    let bounds: Bounds = session.bounds;
    match command {
        Command::Nf { group, word } => {
            let g = session
                .group(group)
                .ok_or_else(|| CliError::Usage(format!("no group or splitting named `{group}`")))?;
            let w = g.parse_word(word)?;
            p.line(g.normal_form(&w)?.to_string())?;
        }
        Command::Ball {
            splitting: name,
            radius,
            bound,
            dot,
            barycentric,
        } => {
            let s = &splitting(session, name)?.splitting;
            let radius = radius.unwrap_or(bounds.radius);
            let tb = bound.unwrap_or(bounds.transversal);
            if tb == 0 {
                return Err(CliError::Usage("--bound must be positive".into()));
            }
            let ball = tree::expand_ball(s, &tree::base_vertex(s, Side::A), radius, tb)?;
            p.line(format!(
                "ball {name} [radius={radius} transversal={tb}] vertices={} edges={} complete={}",
                ball.vertices.len(),
                ball.edges.len(),
                ball.is_complete()
            ))?;
            for v in &ball.vertices {
                let mark = if v.truncated { " (truncated)" } else { "" };
                p.line(format!("  {} {}{mark}", v.depth, v.vertex))?;
            }
            if let Some(path) = dot {
                let text = tree::export_dot(
                    &ball,
                    &DotOptions {
                        barycentric: *barycentric,
                    },
                );
                std::fs::write(path, text).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
            }
        }
        Command::Act {
            splitting: name,
            word,
            target,
        } => {
            let s = &splitting(session, name)?.splitting;
            let g = s.whole().parse_word(word)?;
            match parse_target(s, target)? {
                Target::Vertex(v) => {
                    let image = tree::act_vertex(s, &g, &v)?;
                    let d = tree::distance(s, &v, &image)?;
                    p.line(format!("{g} · {v} = {image}"))?;
                    p.line(format!("distance {d}"))?;
                }
                Target::Edge(e) => {
                    let image = tree::act_edge(s, &g, &e)?;
                    let fixed = tree::edge_equal(s, &e, &image)?;
                    p.line(format!("{g} · {e} = {image}"))?;
                    p.line(format!("fixed {}", if fixed { "yes" } else { "no" }))?;
                }
            }
        }
        Command::Check {
            splitting: name,
            which,
            word,
            radius,
            transversal,
            power,
            faithful_radius,
            orbit,
        } => {
            let s = &splitting(session, name)?.splitting;
            let word = word.unwrap_or(bounds.word);
            let radius = radius.unwrap_or(bounds.radius);
            let tb = transversal.unwrap_or(bounds.transversal).max(1);
            let power = power.unwrap_or(bounds.power);
            let orbit = orbit.unwrap_or(2 * radius);
            let all = *which == Which::All;
            if all || *which == Which::C1 {
                p.timed(|| checks::check_c1(s, word))?;
            }
            if all || *which == Which::C2 {
                for side in vertex_kinds(s) {
                    p.timed(|| checks::check_c2(s, &tree::base_vertex(s, side), tb, power))?;
                }
            }
            if all || *which == Which::Faithful {
                p.timed(|| checks::check_faithful(s, word, *faithful_radius, tb))?;
            }
            if all || *which == Which::Minimal {
                p.timed(|| checks::check_not_line(s, tb))?;
                p.timed(|| checks::check_minimal(s, radius, tb, orbit))?;
            }
        }
        Command::Extend {
            splitting: name,
            automorphism,
            witness_bound,
            word,
            radius,
            transversal,
        } => {
            let s = &splitting(session, name)?.splitting;
            let entry = session
                .automorphisms
                .get(automorphism)
                .ok_or_else(|| CliError::Usage(format!("no automorphism named `{automorphism}`")))?;
            if entry.on != *name {
                return Err(CliError::Usage(format!(
                    "automorphism `{automorphism}` acts on `{}`, not `{name}`",
                    entry.on
                )));
            }
            let wb = witness_bound.unwrap_or(bounds.witness);
            let word = word.unwrap_or(bounds.word);
            let radius = radius.unwrap_or(bounds.radius);
            let tb = transversal.unwrap_or(bounds.transversal).max(1);
            let mut hom = check_automorphism(&entry.phi)?;
            hom.name = "automorphism".into();
            p.report(&hom)?;
            if hom.is_violation() {
                return Ok(());
            }
            let Some(iso) = find_witness(s, &entry.phi, wb)? else {
                p.report(
                    &CheckReport::new("extend", Verdict::NotFoundUpTo)
                        .bound("witness", wb)
                        .detail(format!("no certified witness for `{automorphism}`")),
                )?;
                return Ok(());
            };
            p.line(format!("extend {automorphism} on {name} [witness={wb}]"))?;
            p.line(format!("  witness {}", iso.witness))?;
            for side in vertex_kinds(s) {
                let v = tree::base_vertex(s, side);
                p.line(format!("  {v} -> {}", iso.apply_vertex(s, &v)?))?;
            }
            let e = tree::base_edge();
            p.line(format!("  {e} -> {}", iso.apply_edge(s, &e)?))?;
            let probe = tree::base_vertex(s, Side::A);
            p.line(format!("  class: {}", class_text(&classify_isometry(s, &iso, &probe)?)))?;
            let ball = tree::expand_ball(s, &probe, radius, tb)?;
            let sample: Vec<Word> = s.whole().alphabet().reduced_words(word).collect();
            p.timed(|| check_compatibility(s, &iso, &ball, &sample))?;
        }
        Command::Suite { .. } => unreachable!("suites do not read the session"),
    }
    Ok(())
}
