//! Acceptance suite: one PASS/FAIL line per criterion, each with its pinned
//! runtime limit. Runs without the libtest harness so the lines always show
//! up in the test log; any failure makes the process exit non-zero.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use bstree::config::parse_config as session;
use bstree::sample::WordSampler;
use bstree::suites::{random_surface_words, solver_agreement};
use bstree::DEFAULT_CONFIG;
use bstree_core::checks::{self, faithful_witnesses_for, Moved};
use bstree_core::isometry::{
    check_compatibility, classify, find_witness, min_displacement, ExtendedIsometry, IsometryClass,
};
use bstree_core::splittings::baumslag_solitar_splitting;
use bstree_core::surfaces::{dehn_twist, split_along_curve, CurveSpec, SplittingWitness};
use bstree_core::tree::{self, walk_ball, Reached, Walk};
use bstree_core::{Automorphism, GeneratorId, Side, Splitting, Verdict, Word};

type Outcome = Result<String, String>;

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gen(name: &str) -> GeneratorId {
    GeneratorId::new(name).unwrap()
}

/// Exact rationals for the affine model of BS(p, q).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Q {
    num: i128,
    den: i128,
}

impl Q {
    fn new(num: i128, den: i128) -> Q {
        fn gcd(a: i128, b: i128) -> i128 {
            if b == 0 {
                a.abs()
            } else {
                gcd(b, a % b)
            }
        }
        let g = gcd(num, den).max(1) * den.signum();
        Q {
            num: num / g,
            den: den / g,
        }
    }
    fn add(self, o: Q) -> Q {
        Q::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }
    fn mul(self, o: Q) -> Q {
        Q::new(self.num * o.num, self.den * o.den)
    }
}

/// `z ↦ m·z + b`; `x` acts as `z ↦ z + 1` and `t` as `z ↦ (q/p)·z`, which
/// satisfies `t xᵖ t⁻¹ = x^q`.
fn affine_image(w: &Word, p: i128, q: i128) -> (Q, Q) {
    let (mut m, mut b) = (Q::new(1, 1), Q::new(0, 1));
    for l in w.letters() {
        let s = l.sign.value() as i128;
        // Right-multiplying by the letter: f ∘ letter.
        let (lm, lb) = match (l.gen.as_str(), s) {
            ("x", s) => (Q::new(1, 1), Q::new(s, 1)),
            ("t", 1) => (Q::new(q, p), Q::new(0, 1)),
            ("t", _) => (Q::new(p, q), Q::new(0, 1)),
            _ => unreachable!(),
        };
        b = m.mul(lb).add(b);
        m = m.mul(lm);
    }
    (m, b)
}

fn criterion_1() -> Outcome {
    let mut lines = 0;
    for (p, q) in [(2i64, 3i64), (3, 2), (2, 5), (3, 4)] {
        let r = checks::bs_suite(p, q, 4).map_err(fail)?;
        ensure(r.verdict == Verdict::Verified, || format!("BS({p},{q}): {}", r.verdict))?;
        for k in 1..=4u32 {
            let a = k as i64 * p.pow(k);
            let b = k as i64 * q.pow(k);
            let line = format!("k = {k}: t^{k} x^{a} t^-{k} = x^{b}");
            ensure(r.details.contains(&line), || format!("BS({p},{q}) lacks `{line}`"))?;
            let w = Word::from_runs([
                (gen("t"), k as i64),
                (gen("x"), a),
                (gen("t"), -(k as i64)),
                (gen("x"), -b),
            ]);
            let image = affine_image(&w, p as i128, q as i128);
            ensure(image == (Q::new(1, 1), Q::new(0, 1)), || {
                format!("affine model rejects {w}")
            })?;
            lines += 1;
        }
        let control = Word::from_runs([(gen("t"), 1), (gen("x"), p), (gen("t"), -1), (gen("x"), -(q + 1))]);
        ensure(affine_image(&control, p as i128, q as i128).1 != Q::new(0, 1), || {
            "control trivial in model".into()
        })?;
    }
    Ok(format!(
        "{lines} identities exact, controls rejected, affine model agrees"
    ))
}

fn replay_moved(s: &Splitting, g: &Word, m: &Moved) -> Result<bool, String> {
    match m {
        Moved::Vertex(v) => {
            let image = tree::act_vertex(s, g, v).map_err(fail)?;
            Ok(tree::distance(s, v, &image).map_err(fail)? > 0)
        }
        Moved::Edge(e) => {
            let (u, w) = tree::endpoints(s, e).map_err(fail)?;
            Ok(!(tree::fixes_vertex(s, g, &u).map_err(fail)? && tree::fixes_vertex(s, g, &w).map_err(fail)?))
        }
    }
}

fn criterion_2() -> Outcome {
    let mut replayed = 0;
    for curve in [CurveSpec::Separating(1), CurveSpec::NonSeparating] {
        let s = split_along_curve(2, curve).map_err(fail)?.splitting;
        let words = s.whole().alphabet().reduced_words(3);
        let found = faithful_witnesses_for(&s, words, 6, 1).map_err(fail)?;
        ensure(found.fixing.is_empty(), || {
            format!("{curve}: {} fixes the ball", found.fixing[0])
        })?;
        ensure(found.skipped_identity == 1, || {
            format!("{curve}: nontrivial words skipped as identity")
        })?;
        for (g, m) in &found.moved {
            ensure(replay_moved(&s, g, m)?, || {
                format!("{curve}: replay of {g} moving {m} failed")
            })?;
            replayed += 1;
        }
    }
    let s = baumslag_solitar_splitting(2, 3).map_err(fail)?;
    let center = tree::base_vertex(&s, Side::A);
    for k in 1..=5 {
        let g = Word::power(gen("x"), 2 * k);
        let mut moved = None;
        walk_ball(&s, &center, 4, 1, |item| {
            if let Reached::Edge(e) = item {
                if !tree::fixes_edge(&s, &g, e)? {
                    moved = Some(e.clone());
                    return Ok(Walk::Stop);
                }
            }
            Ok(Walk::Continue)
        })
        .map_err(fail)?;
        let e = moved.ok_or_else(|| format!("{g} fixes every edge within radius 4"))?;
        ensure(replay_moved(&s, &g, &Moved::Edge(e.clone()))?, || {
            format!("replay of {g} on {e} failed")
        })?;
        replayed += 1;
    }
    Ok(format!("{replayed} moved witnesses replayed"))
}

/// Certified automorphisms of the genus-2 HNN splitting with their
/// extensions: the twist, its inverse, and conjugations by generators.
fn hnn_generators(w: &SplittingWitness) -> Result<Vec<ExtendedIsometry>, String> {
    let s = &w.splitting;
    let twist = w
        .transport(&dehn_twist(2, CurveSpec::NonSeparating).map_err(fail)?)
        .map_err(fail)?;
    let t = find_witness(s, &twist, 2).map_err(fail)?.ok_or("no twist witness")?;
    let mut gens = vec![t.invert(s).map_err(fail)?, t];
    for g in s.whole().generators() {
        for e in [1, -1] {
            gens.push(ExtendedIsometry::inner(s, &Word::power(*g, e)).map_err(fail)?);
        }
    }
    Ok(gens)
}

fn random_isometry(
    s: &Splitting,
    gens: &[ExtendedIsometry],
    rng: &mut WordSampler,
) -> Result<ExtendedIsometry, String> {
    let len = 1 + rng.below(3);
    let mut iso = gens[rng.below(gens.len())].clone();
    for _ in 1..len {
        iso = gens[rng.below(gens.len())].compose(s, &iso).map_err(fail)?;
    }
    Ok(iso)
}

fn criterion_3() -> Outcome {
    let w = split_along_curve(2, CurveSpec::NonSeparating).map_err(fail)?;
    let s = &w.splitting;
    let gens = hnn_generators(&w)?;
    let ball = tree::expand_ball(s, &tree::base_vertex(s, Side::A), 3, 1).map_err(fail)?;
    let mut rng = WordSampler::new(3);
    let mut checked = 0usize;
    for pair in 0..50 {
        let phi = random_isometry(s, &gens, &mut rng)?;
        let psi = random_isometry(s, &gens, &mut rng)?;
        let both = psi.compose(s, &phi).map_err(|e| format!("pair {pair}: compose: {e}"))?;
        let back = phi.invert(s).map_err(|e| format!("pair {pair}: invert: {e}"))?;
        let expected = psi.phi.apply(&phi.witness).map_err(fail)?.concat(&psi.witness);
        ensure(both.witness == expected, || format!("pair {pair}: composite witness"))?;
        let expected = phi.phi.apply_inverse(&phi.witness.inverse()).map_err(fail)?;
        ensure(back.witness == expected, || format!("pair {pair}: inverse witness"))?;
        for v in ball.vertex_list() {
            let once = phi.apply_vertex(s, v).map_err(fail)?;
            let lhs = both.apply_vertex(s, v).map_err(fail)?;
            let rhs = psi.apply_vertex(s, &once).map_err(fail)?;
            ensure(tree::vertex_equal(s, &lhs, &rhs).map_err(fail)?, || {
                format!("pair {pair}: composition at {v}")
            })?;
            let home = back.apply_vertex(s, &once).map_err(fail)?;
            ensure(tree::vertex_equal(s, &home, v).map_err(fail)?, || {
                format!("pair {pair}: inverse at {v}")
            })?;
            checked += 1;
        }
        for e in ball.edge_list() {
            let lhs = both.apply_edge(s, e).map_err(fail)?;
            let rhs = psi.apply_edge(s, &phi.apply_edge(s, e).map_err(fail)?).map_err(fail)?;
            ensure(tree::edge_equal(s, &lhs, &rhs).map_err(fail)?, || {
                format!("pair {pair}: composition at {e}")
            })?;
        }
    }
    Ok(format!(
        "50 pairs re-certified, {checked} vertex laws on a {}-vertex ball",
        ball.vertices.len()
    ))
}

fn criterion_4() -> Outcome {
    let mut checked = 0usize;
    let mut rng = WordSampler::new(4);
    for curve in [CurveSpec::NonSeparating, CurveSpec::Separating(1)] {
        let s = split_along_curve(2, curve).map_err(fail)?.splitting;
        let ball = tree::expand_ball(&s, &tree::base_vertex(&s, Side::A), 3, 1).map_err(fail)?;
        for _ in 0..100 {
            let x = rng.word(s.whole().alphabet(), 5);
            let phi = Automorphism::inner(s.whole(), &x).map_err(fail)?;
            let iso = ExtendedIsometry::new(&s, phi, tree::base_edge(), x.clone()).map_err(fail)?;
            for v in ball.vertex_list() {
                let a = iso.apply_vertex(&s, v).map_err(fail)?;
                let b = tree::act_vertex(&s, &x, v).map_err(fail)?;
                ensure(tree::vertex_equal(&s, &a, &b).map_err(fail)?, || {
                    format!("{curve}: {x} at {v}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} vertex images agree for 2 × 100 conjugators"))
}

fn criterion_5() -> Outcome {
    let mut pairs = 0usize;
    for (curve, corruption) in [(CurveSpec::NonSeparating, "b1"), (CurveSpec::Separating(1), "a2")] {
        let w = split_along_curve(2, curve).map_err(fail)?;
        let s = &w.splitting;
        let twist = w.transport(&dehn_twist(2, curve).map_err(fail)?).map_err(fail)?;
        let iso = find_witness(s, &twist, 2)
            .map_err(fail)?
            .ok_or_else(|| format!("{curve}: no witness"))?;
        let ball = tree::expand_ball(s, &tree::base_vertex(s, Side::A), 3, 1).map_err(fail)?;
        let sample: Vec<Word> = s.whole().alphabet().reduced_words(3).collect();
        let r = check_compatibility(s, &iso, &ball, &sample).map_err(fail)?;
        ensure(r.verdict == Verdict::Verified, || format!("{curve}: {}", r.verdict))?;
        pairs += sample.len() * (ball.vertices.len() + ball.edges.len());
        let bad_witness = iso.witness.concat(&Word::generator(gen(corruption)));
        let bad = ExtendedIsometry::unchecked(twist.clone(), tree::base_edge(), bad_witness);
        ensure(bad.certification_failure(s).map_err(fail)?.is_some(), || {
            format!("{curve}: corrupted witness certified")
        })?;
        let r = check_compatibility(s, &bad, &ball, &sample).map_err(fail)?;
        ensure(r.is_violation(), || {
            format!("{curve}: corrupted witness passed compatibility")
        })?;
    }
    Ok(format!("{pairs} (g, cell) pairs agree; corrupted witnesses rejected"))
}

fn criterion_6() -> Outcome {
    let mut compared = 0usize;
    for curve in [CurveSpec::Separating(1), CurveSpec::NonSeparating] {
        let w = split_along_curve(2, curve).map_err(fail)?;
        let words = w.surface.alphabet().reduced_words(8);
        let (total, trivial, bad) = solver_agreement(&w, words).map_err(fail)?;
        ensure(bad.is_none(), || {
            format!("{curve}: disagreement on {}", bad.clone().unwrap())
        })?;
        // ε and the 16 cyclic conjugates of the relator and its inverse.
        ensure(trivial == 17, || format!("{curve}: {trivial} trivial words"))?;
        compared += total;
        let random = random_surface_words(&w.surface, 6, 10_000, 20);
        ensure(random.iter().all(|u| u.len() <= 20), || "random word too long".into())?;
        let (total, _, bad) = solver_agreement(&w, random).map_err(fail)?;
        ensure(bad.is_none(), || {
            format!("{curve}: disagreement on {}", bad.clone().unwrap())
        })?;
        compared += total;
    }
    Ok(format!("{compared} words compared"))
}

fn criterion_7() -> Outcome {
    let z = bstree::suites::z2_free_z3().map_err(fail)?;
    let bs23 = baumslag_solitar_splitting(2, 3).map_err(fail)?;
    let bs24 = baumslag_solitar_splitting(2, 4).map_err(fail)?;
    let sep = split_along_curve(2, CurveSpec::Separating(1)).map_err(fail)?.splitting;
    let non = split_along_curve(2, CurveSpec::NonSeparating).map_err(fail)?.splitting;
    for (name, s) in [("BS(2,3)", &bs23), ("sep2", &sep), ("non2", &non), ("Z2*Z3", &z)] {
        let r = checks::check_c1(s, 2).map_err(fail)?;
        ensure(r.verdict == Verdict::Verified, || {
            format!("c1 on {name}: {}", r.verdict)
        })?;
    }
    let v = tree::base_vertex(&bs24, Side::A);
    let r = checks::check_c2(&bs24, &v, 2, 64).map_err(fail)?;
    ensure(r.is_violation(), || format!("c2 on BS(2,4): {}", r.verdict))?;
    let v = tree::base_vertex(&bs23, Side::A);
    let r = checks::check_c2(&bs23, &v, 2, 64).map_err(fail)?;
    ensure(!r.is_violation(), || format!("c2 on BS(2,3): {}", r.verdict))?;
    let shipped = session(DEFAULT_CONFIG).map_err(fail)?;
    for (name, entry) in &shipped.splittings {
        let r = checks::check_not_line(&entry.splitting, 1).map_err(fail)?;
        ensure(r.verdict == Verdict::Verified, || {
            format!("not-line on {name}: {}", r.verdict)
        })?;
    }
    Ok(format!(
        "c1 on 4 splittings, c2 both ways, not-line on {} shipped splittings",
        shipped.splittings.len()
    ))
}

fn criterion_8() -> Outcome {
    let s = baumslag_solitar_splitting(2, 3).map_err(fail)?;
    let probe = tree::base_vertex(&s, Side::A);
    let t = classify(&s, &Word::generator(gen("t")), &probe).map_err(fail)?;
    ensure(matches!(t, IsometryClass::Hyperbolic { length: 1 }), || {
        format!("t: {t:?}")
    })?;
    let ball = tree::expand_ball(&s, &probe, 4, 1).map_err(fail)?;
    ensure(ball.is_complete(), || "radius-4 ball is truncated".into())?;
    let mut rng = WordSampler::new(8);
    let (mut elliptic, mut hyperbolic) = (0, 0);
    for _ in 0..100 {
        let g = rng.word(s.whole().alphabet(), 5);
        let class = classify(&s, &g, &probe).map_err(fail)?;
        let brute = min_displacement(&s, &g, &ball).map_err(fail)?;
        ensure(class.displacement() == Some(brute), || {
            format!("{g}: {class:?} but brute force {brute}")
        })?;
        if let IsometryClass::Elliptic { fixed } = &class {
            ensure(tree::fixes_vertex(&s, &g, fixed).map_err(fail)?, || {
                format!("{g} moves {fixed}")
            })?;
            elliptic += 1;
        } else {
            hyperbolic += 1;
        }
    }
    Ok(format!(
        "t hyperbolic of length 1; {elliptic} elliptic and {hyperbolic} hyperbolic samples agree"
    ))
}

fn run_bin(args: &[&str]) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_bstree"))
        .args(args)
        .output()
        .map_err(fail)?;
    ensure(o.status.code() == Some(0), || {
        format!("{args:?} exited with {:?}", o.status.code())
    })?;
    Ok(o.stdout)
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(fail)?;
    let dot = dir.path().join("ball.dot");
    let dot = dot.to_str().unwrap();
    let runs: [&[&str]; 5] = [
        &["suite", "bs", "--p", "2", "--q", "3", "--kmax", "4"],
        &["suite", "surface", "--curve", "nonseparating", "--seed", "9"],
        &["suite", "surface", "--curve", "separating:1", "--seed", "9"],
        &["suite", "freeproduct"],
        &["ball", "bs23", "--radius", "2", "--bound", "6", "--dot", dot],
    ];
    for args in runs {
        let first = run_bin(args)?;
        let first_dot = std::fs::read(dot).unwrap_or_default();
        let second = run_bin(args)?;
        ensure(first == second, || format!("{args:?}: stdout differs"))?;
        ensure(first_dot == std::fs::read(dot).unwrap_or_default(), || {
            format!("{args:?}: DOT differs")
        })?;
    }
    Ok("5 commands byte-identical across reruns".into())
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, Option<u64>, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        (1, "Baumslag-Solitar identity family", Some(10), criterion_1),
        (2, "faithfulness witnesses", Some(60), criterion_2),
        (3, "extension algebra", Some(120), criterion_3),
        (4, "inner automorphisms act by translation", None, criterion_4),
        (5, "Dehn twist compatibility", None, criterion_5),
        (6, "solver cross-validation", Some(300), criterion_6),
        (7, "condition checks", None, criterion_7),
        (8, "isometry classification", None, criterion_8),
        (9, "determinism", None, criterion_9),
    ];
    let mut failed = 0;
    for (n, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let limit_text = limit.map(|s| format!(" (limit {s} s)")).unwrap_or_default();
        let over = limit.is_some_and(|s| elapsed > Duration::from_secs(s));
        let (status, text) = match (&outcome, over) {
            (Ok(msg), false) => ("PASS", msg.clone()),
            (Ok(msg), true) => ("FAIL", format!("too slow; {msg}")),
            (Err(msg), _) => ("FAIL", msg.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {n} {status}: {name} in {:.2} s{limit_text}: {text}",
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        println!("acceptance: 9/9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 9 criteria failed");
        ExitCode::FAILURE
    }
}
