//! One-edge splittings: amalgamated products `A ∗_C B` and HNN extensions
//! `A ∗_{C,θ}`, with their syllable normal forms.
//!
//! Edge groups are cyclic or trivial. For an HNN extension with stable letter
//! `t` and edge generator `c` the defining relation is
//! `t · emb0(c) · t⁻¹ = emb1(c)`, so the stabilizer of the base edge of the
//! tree is `emb0(C)`. For an amalgam it is the common image `C`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::groups::{
    check_homomorphism, GroupHandle, Homomorphism, Membership, Presentation, DEFAULT_MEMBERSHIP_BOUND,
};
use crate::words::{Alphabet, GeneratorId, Sign, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

#[derive(Clone, Debug)]
pub struct AmalgamData {
    pub a: GroupHandle,
    pub b: GroupHandle,
    pub edge: GroupHandle,
    pub emb_a: Homomorphism,
    pub emb_b: Homomorphism,
    c_a: Option<Word>,
    c_b: Option<Word>,
    membership_bound: u64,
}

#[derive(Clone, Debug)]
pub struct HnnData {
    pub base: GroupHandle,
    pub edge: GroupHandle,
    pub emb0: Homomorphism,
    pub emb1: Homomorphism,
    pub stable: GeneratorId,
    c0: Option<Word>,
    c1: Option<Word>,
    membership_bound: u64,
}

#[derive(Clone, Debug)]
pub enum SplittingData {
    Amalgam(AmalgamData),
    Hnn(HnnData),
}

impl SplittingData {
    fn membership_bound(&self) -> u64 {
        match self {
            SplittingData::Amalgam(d) => d.membership_bound,
            SplittingData::Hnn(d) => d.membership_bound,
        }
    }
}

/// Images of the edge generator in the two factors (amalgam) or the two
/// embeddings into the base (HNN: `first` = emb0, `second` = emb1).
#[derive(Clone, Debug)]
pub struct EdgeImages {
    pub generator: GeneratorId,
    pub first: Word,
    pub second: Word,
}

#[derive(Clone, Debug)]
pub enum SplittingSpec {
    Amalgam {
        a: GroupHandle,
        b: GroupHandle,
        edge: Option<EdgeImages>,
    },
    Hnn {
        base: GroupHandle,
        stable: GeneratorId,
        edge: Option<EdgeImages>,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    /// Edge-generator powers checked to be nontrivial in each factor.
    pub injectivity_bound: u64,
    /// Bound handed to the membership oracle during syllable reduction.
    pub membership_bound: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            injectivity_bound: 16,
            membership_bound: DEFAULT_MEMBERSHIP_BOUND,
        }
    }
}

/// A certified splitting together with the split group itself.
#[derive(Clone, Debug)]
pub struct Splitting {
    data: Arc<SplittingData>,
    whole: GroupHandle,
}

pub fn build_splitting(spec: SplittingSpec) -> Result<Splitting> {
    build_splitting_with(spec, BuildOptions::default())
}

pub fn build_splitting_with(spec: SplittingSpec, opts: BuildOptions) -> Result<Splitting> {
    let data = match spec {
        SplittingSpec::Amalgam { a, b, edge } => {
            for g in a.generators() {
                if b.alphabet().contains(*g) {
                    return Err(Error::AlphabetCollision(*g));
                }
            }
            let (edge_group, emb_a, emb_b) = edge_maps(&a, &b, edge.as_ref())?;
            let c_a = edge_image(&emb_a);
            let c_b = edge_image(&emb_b);
            SplittingData::Amalgam(AmalgamData {
                a,
                b,
                edge: edge_group,
                emb_a,
                emb_b,
                c_a,
                c_b,
                membership_bound: opts.membership_bound,
            })
        }
        SplittingSpec::Hnn { base, stable, edge } => {
            if base.alphabet().contains(stable) {
                return Err(Error::AlphabetCollision(stable));
            }
            let (edge_group, emb0, emb1) = edge_maps(&base, &base, edge.as_ref())?;
            let c0 = edge_image(&emb0);
            let c1 = edge_image(&emb1);
            SplittingData::Hnn(HnnData {
                base,
                edge: edge_group,
                emb0,
                emb1,
                stable,
                c0,
                c1,
                membership_bound: opts.membership_bound,
            })
        }
    };
    certify_embeddings(&data, opts.injectivity_bound)?;
    let presentation = whole_presentation(&data)?;
    let data = Arc::new(data);
    let whole = GroupHandle::from_splitting(presentation, data.clone());
    Ok(Splitting { data, whole })
}

fn edge_maps(
    first: &GroupHandle,
    second: &GroupHandle,
    edge: Option<&EdgeImages>,
) -> Result<(GroupHandle, Homomorphism, Homomorphism)> {
    match edge {
        None => {
            let trivial = GroupHandle::free(Alphabet::default());
            let e1 = Homomorphism::new(&trivial, first, &[])?;
            let e2 = Homomorphism::new(&trivial, second, &[])?;
            Ok((trivial, e1, e2))
        }
        Some(images) => {
            let c = GroupHandle::free(Alphabet::new(vec![images.generator])?);
            let e1 = Homomorphism::new(&c, first, &[(images.generator, images.first.clone())])?;
            let e2 = Homomorphism::new(&c, second, &[(images.generator, images.second.clone())])?;
            Ok((c, e1, e2))
        }
    }
}

fn edge_image(emb: &Homomorphism) -> Option<Word> {
    emb.images().next().map(|(_, w)| w.clone())
}

fn certify_embeddings(data: &SplittingData, bound: u64) -> Result<()> {
    let (pairs, maps): (Vec<(&GroupHandle, &Option<Word>)>, [&Homomorphism; 2]) = match data {
        SplittingData::Amalgam(d) => (vec![(&d.a, &d.c_a), (&d.b, &d.c_b)], [&d.emb_a, &d.emb_b]),
        SplittingData::Hnn(d) => (vec![(&d.base, &d.c0), (&d.base, &d.c1)], [&d.emb0, &d.emb1]),
    };
    for emb in maps {
        let report = check_homomorphism(emb)?;
        if report.is_violation() {
            return Err(Error::Certification(format!("edge embedding: {}", report.verdict)));
        }
    }
    for (factor, image) in pairs {
        if let Some(c) = image {
            let mut power = Word::identity();
            for n in 1..=bound.max(1) {
                power = power.concat(c);
                if factor.is_identity(&power)? {
                    return Err(Error::Certification(format!(
                        "edge embedding is not injective: ({c})^{n} = 1"
                    )));
                }
            }
        }
    }
    Ok(())
}

fn whole_presentation(data: &SplittingData) -> Result<Presentation> {
    match data {
        SplittingData::Amalgam(d) => {
            let mut gens = d.a.generators().to_vec();
            gens.extend_from_slice(d.b.generators());
            let mut relators = d.a.relators().to_vec();
            relators.extend_from_slice(d.b.relators());
            if let (Some(ca), Some(cb)) = (&d.c_a, &d.c_b) {
                relators.push(ca.concat(&cb.inverse()));
            }
            Ok(Presentation {
                generators: Alphabet::new(gens)?,
                relators,
            })
        }
        SplittingData::Hnn(d) => {
            let mut gens = d.base.generators().to_vec();
            gens.push(d.stable);
            let mut relators = d.base.relators().to_vec();
            if let (Some(c0), Some(c1)) = (&d.c0, &d.c1) {
                let t = Word::generator(d.stable);
                relators.push(Word::product([&t, c0, &t.inverse(), &c1.inverse()]));
            }
            Ok(Presentation {
                generators: Alphabet::new(gens)?,
                relators,
            })
        }
    }
}

/// HNN data for `BS(p, q)`: base `⟨x⟩`, `emb0(c) = xᵖ`, `emb1(c) = x^q`.
pub(crate) fn baumslag_solitar_data(p: i64, q: i64, x: GeneratorId, t: GeneratorId) -> Result<SplittingData> {
    let base = GroupHandle::free(Alphabet::new(vec![x])?);
    let c = GeneratorId::new("c")?;
    let edge = GroupHandle::free(Alphabet::new(vec![c])?);
    let c0 = Word::power(x, p);
    let c1 = Word::power(x, q);
    Ok(SplittingData::Hnn(HnnData {
        emb0: Homomorphism::new(&edge, &base, &[(c, c0.clone())])?,
        emb1: Homomorphism::new(&edge, &base, &[(c, c1.clone())])?,
        base,
        edge,
        stable: t,
        c0: Some(c0),
        c1: Some(c1),
        membership_bound: DEFAULT_MEMBERSHIP_BOUND,
    }))
}

/// Syllable decomposition of a word in the split group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SyllableForm {
    /// Alternating factor pieces. When reduced and of length ≥ 2, no piece
    /// lies in the edge group.
    Amalgam {
        syllables: Vec<(Side, Word)>,
        reduced: bool,
    },
    /// `g₀ t^{ε₁} g₁ … t^{εₙ} gₙ`; when reduced there is no pinch.
    Hnn {
        pieces: Vec<Word>,
        signs: Vec<Sign>,
        stable: GeneratorId,
        reduced: bool,
    },
}

impl SyllableForm {
    pub fn is_reduced(&self) -> bool {
        match self {
            SyllableForm::Amalgam { reduced, .. } | SyllableForm::Hnn { reduced, .. } => *reduced,
        }
    }

    /// Number of factor syllables (amalgam) or stable letters (HNN).
    pub fn syllable_count(&self) -> usize {
        match self {
            SyllableForm::Amalgam { syllables, .. } => syllables.len(),
            SyllableForm::Hnn { signs, .. } => signs.len(),
        }
    }

    pub fn t_length(&self) -> usize {
        match self {
            SyllableForm::Amalgam { .. } => 0,
            SyllableForm::Hnn { signs, .. } => signs.len(),
        }
    }

    /// Identity test; meaningful only for reduced forms.
    pub fn is_identity(&self) -> bool {
        match self {
            SyllableForm::Amalgam { syllables, .. } => syllables.is_empty(),
            SyllableForm::Hnn { pieces, signs, .. } => signs.is_empty() && pieces[0].is_empty(),
        }
    }

    pub fn to_word(&self) -> Word {
        match self {
            SyllableForm::Amalgam { syllables, .. } => Word::product(syllables.iter().map(|(_, w)| w)),
            SyllableForm::Hnn {
                pieces, signs, stable, ..
            } => {
                let mut out = pieces[0].clone();
                for (s, piece) in signs.iter().zip(&pieces[1..]) {
                    out.push_run(*stable, s.value());
                    out.extend_unreduced(piece);
                }
                out
            }
        }
    }
}

impl Splitting {
    pub fn data(&self) -> &SplittingData {
        &self.data
    }

    /// The split group, with the syllable-reduction word problem solver.
    pub fn whole(&self) -> &GroupHandle {
        &self.whole
    }

    pub fn is_hnn(&self) -> bool {
        matches!(*self.data, SplittingData::Hnn(_))
    }

    pub fn stable_letter(&self) -> Option<GeneratorId> {
        match &*self.data {
            SplittingData::Hnn(d) => Some(d.stable),
            SplittingData::Amalgam(_) => None,
        }
    }

    /// Vertex group on the given side; for HNN extensions both sides name
    /// the base group.
    pub fn factor(&self, side: Side) -> &GroupHandle {
        match (&*self.data, side) {
            (SplittingData::Amalgam(d), Side::A) => &d.a,
            (SplittingData::Amalgam(d), Side::B) => &d.b,
            (SplittingData::Hnn(d), _) => &d.base,
        }
    }

    pub fn edge_group(&self) -> &GroupHandle {
        match &*self.data {
            SplittingData::Amalgam(d) => &d.edge,
            SplittingData::Hnn(d) => &d.edge,
        }
    }

    /// Image of the edge generator: in `A`/`B` for amalgams, `emb0`/`emb1`
    /// for HNN extensions. `None` when the edge group is trivial.
    pub fn edge_image(&self, side: Side) -> Option<&Word> {
        match (&*self.data, side) {
            (SplittingData::Amalgam(d), Side::A) => d.c_a.as_ref(),
            (SplittingData::Amalgam(d), Side::B) => d.c_b.as_ref(),
            (SplittingData::Hnn(d), Side::A) => d.c0.as_ref(),
            (SplittingData::Hnn(d), Side::B) => d.c1.as_ref(),
        }
    }

    pub fn membership_bound(&self) -> u64 {
        self.data.membership_bound()
    }

    /// Fully reduced syllable form. Errors with `MembershipUnknown` if a
    /// pinch or merge could not be decided within the splitting's bound.
    pub fn reduce(&self, w: &Word) -> Result<SyllableForm> {
        self.whole.check_word(w)?;
        reduce_with_bound(&self.data, w, self.data.membership_bound())
    }

    pub fn reduce_with_bound(&self, w: &Word, bound: u64) -> Result<SyllableForm> {
        self.whole.check_word(w)?;
        reduce_with_bound(&self.data, w, bound)
    }

    /// The unreduced decomposition of `w` into maximal factor pieces.
    pub fn parse_syllables(&self, w: &Word) -> Result<SyllableForm> {
        self.whole.check_word(w)?;
        Ok(match &*self.data {
            SplittingData::Amalgam(d) => {
                let mut syllables: Vec<(Side, Word)> = Vec::new();
                for r in w.runs() {
                    let side = amalgam_side(d, r.gen);
                    match syllables.last_mut() {
                        Some((s, piece)) if *s == side => piece.push_run(r.gen, r.exp),
                        _ => syllables.push((side, Word::power(r.gen, r.exp))),
                    }
                }
                SyllableForm::Amalgam {
                    syllables,
                    reduced: false,
                }
            }
            SplittingData::Hnn(d) => {
                let mut pieces = vec![Word::identity()];
                let mut signs = Vec::new();
                for l in w.letters() {
                    if l.gen == d.stable {
                        signs.push(l.sign);
                        pieces.push(Word::identity());
                    } else if let Some(p) = pieces.last_mut() {
                        p.push_run(l.gen, l.sign.value());
                    }
                }
                SyllableForm::Hnn {
                    pieces,
                    signs,
                    stable: d.stable,
                    reduced: false,
                }
            }
        })
    }

    /// Whether `w` lies in the vertex group on `side` (the base group for
    /// HNN extensions, whatever `side` says).
    pub fn in_vertex_group(&self, w: &Word, side: Side) -> Result<bool> {
        let form = self.reduce(w)?;
        self.form_in_vertex_group(&form, side)
    }

    pub(crate) fn form_in_vertex_group(&self, form: &SyllableForm, side: Side) -> Result<bool> {
        match form {
            SyllableForm::Hnn { signs, .. } => Ok(signs.is_empty()),
            SyllableForm::Amalgam { syllables, .. } => match syllables.as_slice() {
                [] => Ok(true),
                [(s, _)] if *s == side => Ok(true),
                [(s, piece)] => Ok(self.edge_power(*s, piece)?.power().is_some()),
                _ => Ok(false),
            },
        }
    }

    /// Decides whether `w` lies in the base edge stabilizer, reporting the
    /// power of the edge generator when it does.
    pub fn edge_membership(&self, w: &Word, bound: u64) -> Result<Membership> {
        let form = match self.reduce_with_bound(w, bound) {
            Ok(f) => f,
            Err(Error::MembershipUnknown { bound }) => return Ok(Membership::Unknown { bound }),
            Err(e) => return Err(e),
        };
        self.form_edge_membership(&form, bound)
    }

    pub(crate) fn form_edge_membership(&self, form: &SyllableForm, bound: u64) -> Result<Membership> {
        match form {
            SyllableForm::Hnn { pieces, signs, .. } => {
                if !signs.is_empty() {
                    return Ok(Membership::NotMember);
                }
                self.edge_power_bounded(Side::A, &pieces[0], bound)
            }
            SyllableForm::Amalgam { syllables, .. } => match syllables.as_slice() {
                [] => Ok(Membership::Power(0)),
                [(s, piece)] => self.edge_power_bounded(*s, piece, bound),
                _ => Ok(Membership::NotMember),
            },
        }
    }

    fn edge_power(&self, side: Side, piece: &Word) -> Result<Membership> {
        self.edge_power_bounded(side, piece, self.membership_bound())
    }

    /// Membership of a factor element in the image of the edge group on
    /// `side` (`emb0`/`emb1` for HNN extensions).
    pub(crate) fn edge_power_bounded(&self, side: Side, piece: &Word, bound: u64) -> Result<Membership> {
        edge_power(self.factor(side), piece, self.edge_image(side), bound)
    }
}

fn edge_power(factor: &GroupHandle, w: &Word, c: Option<&Word>, bound: u64) -> Result<Membership> {
    match c {
        None => Ok(if w.is_empty() || factor.is_identity_unchecked(w)? {
            Membership::Power(0)
        } else {
            Membership::NotMember
        }),
        Some(c) => factor.cyclic_membership_unchecked(w, c, bound),
    }
}

fn amalgam_side(d: &AmalgamData, gen: GeneratorId) -> Side {
    if d.a.alphabet().contains(gen) {
        Side::A
    } else {
        Side::B
    }
}

pub(crate) fn reduce_data(data: &SplittingData, w: &Word) -> Result<SyllableForm> {
    reduce_with_bound(data, w, data.membership_bound())
}

fn decided(m: Membership) -> Result<Option<i64>> {
    match m {
        Membership::Power(n) => Ok(Some(n)),
        Membership::NotMember => Ok(None),
        Membership::Unknown { bound } => Err(Error::MembershipUnknown { bound }),
    }
}

// Factor normal forms are empty exactly for the identity, for every strategy,
// so emptiness of a normalized piece is the triviality test below.

fn reduce_with_bound(data: &SplittingData, w: &Word, bound: u64) -> Result<SyllableForm> {
    match data {
        SplittingData::Amalgam(d) => reduce_amalgam(d, w, bound),
        SplittingData::Hnn(d) => reduce_hnn(d, w, bound),
    }
}

fn reduce_amalgam(d: &AmalgamData, w: &Word, bound: u64) -> Result<SyllableForm> {
    let factor = |s: Side| if s == Side::A { &d.a } else { &d.b };
    let image = |s: Side| if s == Side::A { d.c_a.as_ref() } else { d.c_b.as_ref() };
    let in_edge =
        |s: Side, piece: &Word| -> Result<Option<i64>> { decided(edge_power(factor(s), piece, image(s), bound)?) };
    let edge_word = |s: Side, n: i64| -> Word { image(s).map(|c| c.pow(n)).unwrap_or_default() };

    let mut stack: Vec<(Side, Word)> = Vec::new();
    let push = |stack: &mut Vec<(Side, Word)>, side: Side, word: Word| -> Result<()> {
        let mut side = side;
        let mut word = factor(side).normal_form_unchecked(&word)?;
        loop {
            if word.is_empty() {
                return Ok(());
            }
            let Some((top_side, _)) = stack.last() else {
                stack.push((side, word));
                return Ok(());
            };
            let top_side = *top_side;
            if top_side == side {
                let (_, top) = stack.pop().expect("nonempty");
                word = factor(side).normal_form_unchecked(&top.concat(&word))?;
                continue;
            }
            if let Some(n) = in_edge(side, &word)? {
                // Move the edge element across and merge it into the top.
                side = top_side;
                word = edge_word(side, n);
                continue;
            }
            if stack.len() == 1 {
                if let Some(n) = in_edge(top_side, &stack[0].1)? {
                    stack.pop();
                    word = factor(side).normal_form_unchecked(&edge_word(side, n).concat(&word))?;
                    continue;
                }
            }
            stack.push((side, word));
            return Ok(());
        }
    };

    let mut segment: Option<(Side, Word)> = None;
    for r in w.runs() {
        let side = amalgam_side(d, r.gen);
        match &mut segment {
            Some((s, piece)) if *s == side => piece.push_run(r.gen, r.exp),
            _ => {
                if let Some((s, piece)) = segment.take() {
                    push(&mut stack, s, piece)?;
                }
                segment = Some((side, Word::power(r.gen, r.exp)));
            }
        }
    }
    if let Some((s, piece)) = segment {
        push(&mut stack, s, piece)?;
    }
    Ok(SyllableForm::Amalgam {
        syllables: stack,
        reduced: true,
    })
}

fn reduce_hnn(d: &HnnData, w: &Word, bound: u64) -> Result<SyllableForm> {
    let mut pieces: Vec<Word> = vec![Word::identity()];
    let mut signs: Vec<Sign> = Vec::new();
    for r in w.runs() {
        if r.gen != d.stable {
            pieces.last_mut().expect("nonempty").push_run(r.gen, r.exp);
            continue;
        }
        let sign = Sign::of(r.exp);
        for _ in 0..r.exp.unsigned_abs() {
            let last = pieces.last_mut().expect("nonempty");
            *last = d.base.normal_form_unchecked(last)?;
            let mut pinched = false;
            if signs.last() == Some(&-sign) {
                // t g t⁻¹ with g ∈ emb0(C) becomes emb1 of the same power;
                // t⁻¹ g t with g ∈ emb1(C) becomes emb0.
                let (from, to) = match -sign {
                    Sign::Pos => (d.c0.as_ref(), d.c1.as_ref()),
                    Sign::Neg => (d.c1.as_ref(), d.c0.as_ref()),
                };
                if let Some(n) = decided(edge_power(&d.base, last, from, bound)?)? {
                    pieces.pop();
                    signs.pop();
                    let replacement = to.map(|c| c.pow(n)).unwrap_or_default();
                    let prev = pieces.last_mut().expect("nonempty");
                    prev.extend_unreduced(&replacement);
                    pinched = true;
                }
            }
            if !pinched {
                signs.push(sign);
                pieces.push(Word::identity());
            }
        }
    }
    for p in pieces.iter_mut() {
        *p = d.base.normal_form_unchecked(p)?;
    }
    Ok(SyllableForm::Hnn {
        pieces,
        signs,
        stable: d.stable,
        reduced: true,
    })
}

/// `BS(p, q)` as a certified HNN splitting on generators `x`, `t`.
pub fn baumslag_solitar_splitting(p: i64, q: i64) -> Result<Splitting> {
    let x = GeneratorId::new("x")?;
    let t = GeneratorId::new("t")?;
    build_splitting(SplittingSpec::Hnn {
        base: GroupHandle::free(Alphabet::new(vec![x])?),
        stable: t,
        edge: Some(EdgeImages {
            generator: GeneratorId::new("c")?,
            first: Word::power(x, p),
            second: Word::power(x, q),
        }),
    })
}
