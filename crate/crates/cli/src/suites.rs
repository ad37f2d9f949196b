//! The shipped pipelines behind `bstree suite`. Each suite is a list of
//! independent jobs that run on scoped threads; reports are collected in
//! job order, so output does not depend on scheduling.

use std::thread;
use std::time::{Duration, Instant};

use bstree_core::checks::{self, faithful_witnesses_for};
use bstree_core::isometry::{classify, IsometryClass};
use bstree_core::splittings::{baumslag_solitar_splitting, build_splitting, Side, SplittingSpec};
use bstree_core::surfaces::{self, CurveSpec, SplittingWitness, SuiteBounds};
use bstree_core::tree;
use bstree_core::{Alphabet, CheckReport, GeneratorId, GroupHandle, Result, Verdict, Word};

use crate::sample::WordSampler;

type JobFn<'a> = Box<dyn FnOnce() -> Result<Vec<CheckReport>> + Send + 'a>;

pub struct Job<'a> {
    pub label: &'static str,
    run: JobFn<'a>,
}

impl<'a> Job<'a> {
    pub fn new<F>(label: &'static str, run: F) -> Self
    where
        F: FnOnce() -> Result<Vec<CheckReport>> + Send + 'a,
    {
        Job {
            label,
            run: Box::new(run),
        }
    }

    pub fn single<F>(label: &'static str, run: F) -> Self
    where
        F: FnOnce() -> Result<CheckReport> + Send + 'a,
    {
        Job::new(label, move || run().map(|r| vec![r]))
    }
}

#[derive(Debug, Default)]
pub struct SuiteOutput {
    pub reports: Vec<CheckReport>,
    pub timings: Vec<(&'static str, Duration)>,
}

impl SuiteOutput {
    pub fn has_violation(&self) -> bool {
        self.reports.iter().any(CheckReport::is_violation)
    }
}

pub fn run_jobs(jobs: Vec<Job<'_>>) -> Result<SuiteOutput> {
    thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .into_iter()
            .map(|job| {
                let label = job.label;
                let handle = scope.spawn(move || {
                    let start = Instant::now();
                    let result = (job.run)();
                    (result, start.elapsed())
                });
                (label, handle)
            })
            .collect();
        let mut out = SuiteOutput::default();
        for (label, handle) in handles {
            let (result, elapsed) = handle.join().unwrap_or_else(|p| std::panic::resume_unwind(p));
            let mut reports = result?;
            if let [only] = reports.as_mut_slice() {
                only.elapsed = Some(elapsed);
            }
            out.timings.push((label, elapsed));
            out.reports.extend(reports);
        }
        Ok(out)
    })
}

fn gen(name: &str) -> Result<GeneratorId> {
    GeneratorId::new(name)
}

#[derive(Clone, Copy, Debug)]
pub struct BsParams {
    pub p: i64,
    pub q: i64,
    pub kmax: u32,
}

/// Edges moved by `x^{p·k}` for `k ≤ kmax`, searched within radius 4.
fn bs_powers_on(s: &bstree_core::Splitting, p: i64, kmax: u32) -> Result<CheckReport> {
    let x = gen("x")?;
    let powers = (1..=kmax as i64).map(|k| Word::power(x, p * k));
    let found = faithful_witnesses_for(s, powers, 4, 1)?;
    let mut r = checks::faithful_report(&found, 0, 4, 1);
    r.name = "faithful-powers".into();
    r.bounds = vec![
        ("powers".into(), format!("x^{p}k, k <= {kmax}")),
        ("radius".into(), "4".into()),
        ("transversal".into(), "1".into()),
    ];
    Ok(r)
}

pub fn bs_jobs(params: BsParams) -> Result<Vec<Job<'static>>> {
    let BsParams { p, q, kmax } = params;
    let s = baumslag_solitar_splitting(p, q)?;
    let (s1, s2, s3) = (s.clone(), s.clone(), s);
    Ok(vec![
        Job::single("identities", move || checks::bs_suite(p, q, kmax)),
        Job::new("conditions", move || {
            Ok(vec![
                checks::check_c1(&s1, 2)?,
                checks::check_c2(&s1, &tree::base_vertex(&s1, Side::A), 2, 64)?,
                checks::check_not_line(&s1, 1)?,
            ])
        }),
        Job::single("faithful-powers", move || bs_powers_on(&s2, p, kmax)),
        Job::single("classify", move || {
            let probe = tree::base_vertex(&s3, Side::A);
            let t = Word::generator(gen("t")?);
            let x = Word::generator(gen("x")?);
            let ct = classify(&s3, &t, &probe)?;
            let cx = classify(&s3, &x, &probe)?;
            let verdict = match (&ct, &cx) {
                (IsometryClass::Hyperbolic { length: 1 }, IsometryClass::Elliptic { .. }) => Verdict::Verified,
                _ => Verdict::ViolationWitness(format!("t: {ct:?}, x: {cx:?}")),
            };
            Ok(CheckReport::new("classify", verdict)
                .bound("probe", &probe)
                .detail(format!("t: {}", class_text(&ct)))
                .detail(format!("x: {}", class_text(&cx))))
        }),
    ])
}

pub fn class_text(c: &IsometryClass) -> String {
    match c {
        IsometryClass::Elliptic { fixed } => format!("elliptic, fixes {fixed}"),
        IsometryClass::Hyperbolic { length } => format!("hyperbolic, translation length {length}"),
        IsometryClass::UnknownWithinBound => "undecided within bound".into(),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SurfaceParams {
    pub genus: u32,
    pub curve: CurveSpec,
    pub seed: u64,
    pub samples: usize,
    pub max_len: usize,
}

/// Runs both word-problem solvers on each word (given in the surface
/// alphabet) and reports the first disagreement.
pub fn solver_agreement<I>(w: &SplittingWitness, words: I) -> Result<(usize, usize, Option<Word>)>
where
    I: IntoIterator<Item = Word>,
{
    let (mut total, mut trivial) = (0, 0);
    for u in words {
        total += 1;
        let by_dehn = w.surface.is_identity(&u)?;
        let by_splitting = w.splitting.whole().is_identity(&w.from_surface.apply(&u)?)?;
        if by_dehn != by_splitting {
            return Ok((total, trivial, Some(u)));
        }
        trivial += usize::from(by_dehn);
    }
    Ok((total, trivial, None))
}

/// Seeded random surface words of length ≤ `max_len`; every other one is a
/// conjugate of the relator, so both outcomes are exercised.
pub fn random_surface_words(surface: &GroupHandle, seed: u64, samples: usize, max_len: usize) -> Vec<Word> {
    let mut sampler = WordSampler::new(seed);
    let alphabet: &Alphabet = surface.alphabet();
    let relator = surface.relators()[0].clone();
    (0..samples)
        .map(|i| {
            if i % 2 == 0 || max_len < relator.len() {
                return sampler.word(alphabet, max_len);
            }
            let u = sampler.word(alphabet, (max_len - relator.len()) / 2);
            let r = if sampler.below(2) == 0 {
                relator.clone()
            } else {
                relator.inverse()
            };
            Word::product([&u, &r, &u.inverse()])
        })
        .collect()
}

pub fn agreement_report(w: &SplittingWitness, seed: u64, samples: usize, max_len: usize) -> Result<CheckReport> {
    let words = random_surface_words(&w.surface, seed, samples, max_len);
    let (total, trivial, bad) = solver_agreement(w, words)?;
    let verdict = match bad {
        Some(u) => Verdict::ViolationWitness(format!("solvers disagree on {u}")),
        None => Verdict::NoViolationUpTo,
    };
    Ok(CheckReport::new("solver-agreement", verdict)
        .bound("samples", samples)
        .bound("length", max_len)
        .bound("seed", seed)
        .detail(format!("{total} words compared, {trivial} trivial")))
}

pub fn surface_jobs(params: SurfaceParams) -> Result<Vec<Job<'static>>> {
    let SurfaceParams {
        genus,
        curve,
        seed,
        samples,
        max_len,
    } = params;
    let witness = surfaces::split_along_curve(genus, curve)?;
    Ok(vec![
        Job::new("curve-stabilizer", move || {
            surfaces::curve_stabilizer_suite(genus, curve, &SuiteBounds::default())
        }),
        Job::single("solver-agreement", move || {
            agreement_report(&witness, seed, samples, max_len)
        }),
    ])
}

/// `ℤ² ∗ ℤ³`: a free product with free abelian factors.
pub fn z2_free_z3() -> Result<bstree_core::Splitting> {
    let a = GroupHandle::free_abelian(Alphabet::from_names(&["a", "b"])?)?;
    let b = GroupHandle::free_abelian(Alphabet::from_names(&["c", "d", "e"])?)?;
    build_splitting(SplittingSpec::Amalgam { a, b, edge: None })
}

pub fn free_product_jobs() -> Result<Vec<Job<'static>>> {
    let s = z2_free_z3()?;
    let (s1, s2, s3) = (s.clone(), s.clone(), s);
    Ok(vec![
        Job::new("conditions", move || {
            Ok(vec![
                checks::check_c1(&s1, 2)?,
                checks::check_c2(&s1, &tree::base_vertex(&s1, Side::A), 1, 16)?,
                checks::check_c2(&s1, &tree::base_vertex(&s1, Side::B), 1, 16)?,
                checks::check_not_line(&s1, 1)?,
            ])
        }),
        Job::single("minimal", move || checks::check_minimal(&s2, 2, 1, 4)),
        Job::single("faithful", move || checks::check_faithful(&s3, 2, 4, 1)),
    ])
}

pub fn render(header: &str, reports: &[CheckReport]) -> String {
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for r in reports {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}
