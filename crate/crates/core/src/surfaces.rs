//! Closed surface groups, their splittings along a standard simple closed
//! curve, and Dehn twists along that curve.
//!
//! Generators are `a1, b1, …, ag, bg` with relator `∏ [ai, bi]`. Cutting
//! along the separating curve `∏_{i≤h} [ai, bi]` gives
//! `F(a1..bh) ∗_⟨c⟩ F(a(h+1)..bg)`; cutting along `a1` gives an HNN extension
//! of `F(a1, a2, b2, …)` with stable letter `b1` and
//! `b1·a1·b1⁻¹ = (∏_{i≥2} [ai, bi])·a1`. Both splittings use the surface
//! generator names, so the comparison maps are the identity on names.

use alloc::format;
use alloc::vec::Vec;

use crate::checks;
use crate::error::{Error, Result};
use crate::groups::{check_automorphism, check_homomorphism, commutator, Automorphism, GroupHandle, Homomorphism};
use crate::isometry::{check_compatibility, find_witness};
use crate::report::{CheckReport, Verdict};
use crate::splittings::{build_splitting, EdgeImages, Side, Splitting, SplittingSpec};
use crate::tree;
use crate::words::{free_reduce, Alphabet, GeneratorId, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveSpec {
    /// Separates the first `h` handles from the rest.
    Separating(u32),
    /// The curve `a1`.
    NonSeparating,
}

impl core::fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CurveSpec::Separating(h) => write!(f, "separating:{h}"),
            CurveSpec::NonSeparating => f.write_str("nonseparating"),
        }
    }
}

fn a(i: u32) -> Result<GeneratorId> {
    GeneratorId::new(&format!("a{i}"))
}

fn b(i: u32) -> Result<GeneratorId> {
    GeneratorId::new(&format!("b{i}"))
}

fn check_genus(genus: u32, curve: Option<CurveSpec>) -> Result<()> {
    if genus < 2 {
        return Err(Error::InvalidParameter(format!(
            "genus must be at least 2, got {genus}"
        )));
    }
    if let Some(CurveSpec::Separating(h)) = curve {
        if h == 0 || h >= genus {
            return Err(Error::InvalidParameter(format!(
                "separating curve needs 1 ≤ h ≤ {}, got {h}",
                genus - 1
            )));
        }
    }
    Ok(())
}

/// `a1, b1, …, ag, bg`.
pub fn surface_alphabet(genus: u32) -> Result<Alphabet> {
    let mut gens = Vec::with_capacity(2 * genus as usize);
    for i in 1..=genus {
        gens.push(a(i)?);
        gens.push(b(i)?);
    }
    Alphabet::new(gens)
}

pub fn surface_group(genus: u32) -> Result<GroupHandle> {
    check_genus(genus, None)?;
    GroupHandle::surface(surface_alphabet(genus)?)
}

/// `∏_{i ∈ range} [ai, bi]`.
fn commutator_product(range: core::ops::RangeInclusive<u32>) -> Result<Word> {
    let mut out = Word::identity();
    for i in range {
        out = out.concat(&commutator(a(i)?, b(i)?));
    }
    Ok(out)
}

/// The curve as a word: `∏_{i≤h} [ai, bi]` or `a1`.
pub fn curve_word(curve: CurveSpec) -> Result<Word> {
    match curve {
        CurveSpec::Separating(h) => commutator_product(1..=h),
        CurveSpec::NonSeparating => Ok(Word::generator(a(1)?)),
    }
}

/// A splitting of the surface group together with the comparison maps.
#[derive(Clone, Debug)]
pub struct SplittingWitness {
    pub genus: u32,
    pub curve: CurveSpec,
    pub splitting: Splitting,
    pub surface: GroupHandle,
    /// From the split group to the surface group.
    pub to_surface: Homomorphism,
    pub from_surface: Homomorphism,
}

impl SplittingWitness {
    /// Moves an automorphism of the surface group to the split group.
    pub fn transport(&self, phi: &Automorphism) -> Result<Automorphism> {
        let forward = self.from_surface.compose(&phi.forward.compose(&self.to_surface)?)?;
        let backward = self.from_surface.compose(&phi.backward.compose(&self.to_surface)?)?;
        Automorphism::new(forward, backward)
    }
}

/// Default length up to which both solvers are compared during construction.
pub const CONSTRUCTION_AGREEMENT_BOUND: usize = 4;

pub fn split_along_curve(genus: u32, curve: CurveSpec) -> Result<SplittingWitness> {
    split_along_curve_with(genus, curve, CONSTRUCTION_AGREEMENT_BOUND)
}

/// Builds and certifies the splitting: both comparison maps respect the
/// relators, they are mutually inverse on generators, and the two word
/// problem solvers agree on all reduced words of length ≤ `agreement_bound`.
pub fn split_along_curve_with(genus: u32, curve: CurveSpec, agreement_bound: usize) -> Result<SplittingWitness> {
    check_genus(genus, Some(curve))?;
    let surface = surface_group(genus)?;
    let c = GeneratorId::new("c")?;
    let splitting = match curve {
        CurveSpec::Separating(h) => {
            let mut left = Vec::new();
            let mut right = Vec::new();
            for i in 1..=genus {
                let side = if i <= h { &mut left } else { &mut right };
                side.push(a(i)?);
                side.push(b(i)?);
            }
            build_splitting(SplittingSpec::Amalgam {
                a: GroupHandle::free(Alphabet::new(left)?),
                b: GroupHandle::free(Alphabet::new(right)?),
                edge: Some(EdgeImages {
                    generator: c,
                    first: commutator_product(1..=h)?,
                    second: commutator_product(h + 1..=genus)?.inverse(),
                }),
            })?
        }
        CurveSpec::NonSeparating => {
            let mut base = alloc::vec![a(1)?];
            for i in 2..=genus {
                base.push(a(i)?);
                base.push(b(i)?);
            }
            let a1 = Word::generator(a(1)?);
            build_splitting(SplittingSpec::Hnn {
                base: GroupHandle::free(Alphabet::new(base)?),
                stable: b(1)?,
                edge: Some(EdgeImages {
                    generator: c,
                    first: a1.clone(),
                    second: commutator_product(2..=genus)?.concat(&a1),
                }),
            })?
        }
    };
    let whole = splitting.whole().clone();
    let names: Vec<(GeneratorId, Word)> = surface.generators().iter().map(|g| (*g, Word::generator(*g))).collect();
    let to_surface = Homomorphism::new(&whole, &surface, &names)?;
    let from_surface = Homomorphism::new(&surface, &whole, &names)?;
    for (label, h) in [("to surface", &to_surface), ("from surface", &from_surface)] {
        let r = check_homomorphism(h)?;
        if r.is_violation() {
            return Err(Error::Certification(format!("{label}: {}", r.verdict)));
        }
    }
    for g in surface.generators() {
        let gw = Word::generator(*g);
        if !surface.equal(&gw, &to_surface.apply(&from_surface.apply(&gw)?)?)?
            || !whole.equal(&gw, &from_surface.apply(&to_surface.apply(&gw)?)?)?
        {
            return Err(Error::Certification(format!("comparison maps disagree on {g}")));
        }
    }
    for w in surface.alphabet().reduced_words(agreement_bound) {
        if surface.is_identity(&w)? != whole.is_identity(&w)? {
            return Err(Error::Certification(format!("solvers disagree on {w}")));
        }
    }
    Ok(SplittingWitness {
        genus,
        curve,
        splitting,
        surface,
        to_surface,
        from_surface,
    })
}

/// The Dehn twist along the curve, as a certified automorphism of the
/// surface group fixing the curve word exactly.
pub fn dehn_twist(genus: u32, curve: CurveSpec) -> Result<Automorphism> {
    check_genus(genus, Some(curve))?;
    let g = surface_group(genus)?;
    let twist = match curve {
        CurveSpec::NonSeparating => {
            let (a1, b1) = (a(1)?, b(1)?);
            let img = |e: i64| Word::from_runs([(b1, 1), (a1, e)]);
            Automorphism::new(
                Homomorphism::with_defaults(&g, &g, &[(b1, img(1))])?,
                Homomorphism::with_defaults(&g, &g, &[(b1, img(-1))])?,
            )?
        }
        CurveSpec::Separating(h) => {
            let c = commutator_product(1..=h)?;
            let conj = |w: &Word, gen: GeneratorId| {
                free_reduce(&Word::product([w, &Word::generator(gen), &w.inverse()])).into_word()
            };
            let mut fwd = Vec::new();
            let mut bwd = Vec::new();
            for i in h + 1..=genus {
                for gen in [a(i)?, b(i)?] {
                    fwd.push((gen, conj(&c, gen)));
                    bwd.push((gen, conj(&c.inverse(), gen)));
                }
            }
            Automorphism::new(
                Homomorphism::with_defaults(&g, &g, &fwd)?,
                Homomorphism::with_defaults(&g, &g, &bwd)?,
            )?
        }
    };
    let report = check_automorphism(&twist)?;
    if report.is_violation() {
        return Err(Error::Certification(format!("twist: {}", report.verdict)));
    }
    let cw = curve_word(curve)?;
    if free_reduce(&twist.apply(&cw)?).into_word() != free_reduce(&cw).into_word() {
        return Err(Error::Certification("twist moves the curve".into()));
    }
    Ok(twist)
}

/// `b1 ↦ b1·a2`: not an automorphism, used as a negative control.
pub fn corrupted_twist(genus: u32) -> Result<Automorphism> {
    let g = surface_group(genus)?;
    let (b1, a2) = (b(1)?, a(2)?);
    Automorphism::new(
        Homomorphism::with_defaults(&g, &g, &[(b1, Word::from_runs([(b1, 1), (a2, 1)]))])?,
        Homomorphism::with_defaults(&g, &g, &[(b1, Word::from_runs([(b1, 1), (a2, -1)]))])?,
    )
}

/// `ai ↔ a(i+1)`, `bi ↔ b(i+1)` for genus 2: a certified automorphism
/// exchanging the two sides of the separating curve.
pub fn handle_swap() -> Result<Automorphism> {
    let g = surface_group(2)?;
    let pairs = [(a(1)?, a(2)?), (b(1)?, b(2)?)];
    let mut images = Vec::new();
    for (x, y) in pairs {
        images.push((x, Word::generator(y)));
        images.push((y, Word::generator(x)));
    }
    let swap = Homomorphism::new(&g, &g, &images)?;
    let phi = Automorphism::new(swap.clone(), swap)?;
    let report = check_automorphism(&phi)?;
    if report.is_violation() {
        return Err(Error::Certification(format!("swap: {}", report.verdict)));
    }
    Ok(phi)
}

/// For words `x` with `|x| ≤ bound` outside the vertex group, no generator
/// of the vertex group is conjugated by `x` back into it.
pub fn check_malnormal(s: &Splitting, side: Side, bound: usize) -> Result<CheckReport> {
    let report = |v: Verdict| CheckReport::new("malnormal", v).bound("word", format!("{bound}"));
    let gens: Vec<Word> = s
        .factor(side)
        .generators()
        .iter()
        .map(|g| Word::generator(*g))
        .collect();
    let mut tested = 0usize;
    for x in s.whole().alphabet().reduced_words(bound) {
        if s.in_vertex_group(&x, side)? {
            continue;
        }
        tested += 1;
        for g in &gens {
            let conj = Word::product([&x, g, &x.inverse()]);
            if s.in_vertex_group(&conj, side)? {
                return Ok(report(Verdict::ViolationWitness(format!(
                    "{x}·{g}·{x}⁻¹ lies in {side}"
                ))));
            }
        }
    }
    Ok(report(Verdict::NoViolationUpTo).detail(format!("{tested} conjugators outside {side}")))
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteBounds {
    pub c1_word: usize,
    pub faithful_word: usize,
    pub faithful_radius: usize,
    pub transversal: usize,
    pub minimal_radius: usize,
    pub orbit_word: usize,
    pub witness: usize,
    pub compat_word: usize,
    pub compat_radius: usize,
    pub malnormal_word: usize,
}

impl Default for SuiteBounds {
    fn default() -> Self {
        SuiteBounds {
            c1_word: 2,
            faithful_word: 3,
            faithful_radius: 6,
            transversal: 1,
            minimal_radius: 2,
            orbit_word: 4,
            witness: 2,
            compat_word: 2,
            compat_radius: 2,
            malnormal_word: 3,
        }
    }
}

/// Splitting certification, the structural checks, and the twist and an
/// inner automorphism extended to the tree, in a fixed order.
pub fn curve_stabilizer_suite(genus: u32, curve: CurveSpec, bounds: &SuiteBounds) -> Result<Vec<CheckReport>> {
    let witness = split_along_curve(genus, curve)?;
    let s = &witness.splitting;
    let mut out = Vec::new();
    out.push(
        CheckReport::new("splitting", Verdict::Verified)
            .bound("genus", format!("{genus}"))
            .bound("curve", format!("{curve}"))
            .detail(format!("relators: {}", join(s.whole().relators())))
            .detail(format!(
                "solvers agree on words of length ≤ {CONSTRUCTION_AGREEMENT_BOUND}"
            )),
    );
    out.push(checks::check_c1(s, bounds.c1_word)?);
    out.push(checks::check_faithful(
        s,
        bounds.faithful_word,
        bounds.faithful_radius,
        bounds.transversal,
    )?);
    out.push(checks::check_not_line(s, bounds.transversal.max(1))?);
    out.push(checks::check_minimal(
        s,
        bounds.minimal_radius,
        bounds.transversal,
        bounds.orbit_word,
    )?);
    if !s.is_hnn() {
        out.push(check_malnormal(s, Side::A, bounds.malnormal_word)?);
    }

    let ball = tree::expand_ball(
        s,
        &tree::base_vertex(s, Side::A),
        bounds.compat_radius,
        bounds.transversal,
    )?;
    let sample: Vec<Word> = s.whole().alphabet().reduced_words(bounds.compat_word).collect();
    let twist = witness.transport(&dehn_twist(genus, curve)?)?;
    let inner_word = Word::from_runs([(a(2)?, 1), (b(1)?, -1)]);
    let inner = Automorphism::inner(s.whole(), &inner_word)?;
    for (label, phi) in [("twist", &twist), ("inner", &inner)] {
        match find_witness(s, phi, bounds.witness)? {
            Some(iso) => {
                let mut r = check_compatibility(s, &iso, &ball, &sample)?;
                r.name = format!("{label}-compatibility");
                out.push(r.detail(format!("witness {}", iso.witness)));
            }
            None => out.push(
                CheckReport::new(&format!("{label}-compatibility"), Verdict::NotFoundUpTo)
                    .bound("witness", format!("{}", bounds.witness)),
            ),
        }
    }
    for mut r in checks::check_lambda_membership(s, &twist, bounds.witness)? {
        r.name = format!("twist-{}", r.name);
        out.push(r);
    }
    Ok(out)
}

fn join(words: &[Word]) -> alloc::string::String {
    let parts: Vec<alloc::string::String> = words.iter().map(|w| format!("{w}")).collect();
    parts.join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(lit: &str) -> Word {
        Word::parse(lit).unwrap()
    }

    #[test]
    fn presentations() {
        let g2 = surface_group(2).unwrap();
        assert_eq!((g2.generators().len(), g2.relators()[0].len()), (4, 8));
        let g3 = surface_group(3).unwrap();
        assert_eq!((g3.generators().len(), g3.relators()[0].len()), (6, 12));
        assert!(surface_group(1).is_err());
    }

    #[test]
    fn splittings_certify() {
        let sep = split_along_curve(2, CurveSpec::Separating(1)).unwrap();
        assert_eq!(sep.splitting.edge_image(Side::A), Some(&w("a1 b1 a1^-1 b1^-1")));
        assert_eq!(sep.splitting.edge_image(Side::B), Some(&w("b2 a2 b2^-1 a2^-1")));
        let non = split_along_curve(2, CurveSpec::NonSeparating).unwrap();
        assert!(non
            .splitting
            .whole()
            .is_identity(&w("b1 a1 b1^-1 a1^-1 b2 a2 b2^-1 a2^-1"))
            .unwrap());
        assert!(split_along_curve(3, CurveSpec::Separating(1)).is_ok());
        assert!(split_along_curve(2, CurveSpec::Separating(2)).is_err());
    }

    #[test]
    fn twists() {
        let t = dehn_twist(2, CurveSpec::NonSeparating).unwrap();
        assert_eq!(t.apply(&w("a1")).unwrap(), w("a1"));
        assert_eq!(t.apply(&w("b1")).unwrap(), w("b1 a1"));
        let t2 = t.compose(&t).unwrap();
        assert_eq!(check_automorphism(&t2).unwrap().verdict, Verdict::Verified);
        assert_eq!(t2.apply(&w("a1")).unwrap(), w("a1"));
        let s = dehn_twist(2, CurveSpec::Separating(1)).unwrap();
        let c = curve_word(CurveSpec::Separating(1)).unwrap();
        assert_eq!(s.apply(&c).unwrap(), c);
        assert!(check_automorphism(&corrupted_twist(2).unwrap()).unwrap().is_violation());
        assert!(handle_swap().is_ok());
    }

    #[test]
    fn malnormal_separating_factor() {
        let sep = split_along_curve(2, CurveSpec::Separating(1)).unwrap();
        let r = check_malnormal(&sep.splitting, Side::A, 2).unwrap();
        assert_eq!(r.verdict, Verdict::NoViolationUpTo);
        let non = split_along_curve(2, CurveSpec::NonSeparating).unwrap();
        // b1·a1·b1⁻¹ is back in the base.
        assert!(check_malnormal(&non.splitting, Side::A, 1).unwrap().is_violation());
    }
}

#[cfg(test)]
mod suite_tests {
    use super::*;

    #[test]
    fn suites_pass_on_genus_two() {
        for curve in [CurveSpec::Separating(1), CurveSpec::NonSeparating] {
            let reports = curve_stabilizer_suite(2, curve, &SuiteBounds::default()).unwrap();
            for r in &reports {
                assert!(
                    matches!(r.verdict, Verdict::Verified | Verdict::NoViolationUpTo),
                    "{curve}: {r}"
                );
            }
        }
    }
}
