use alloc::format;
use alloc::vec::Vec;

use super::GroupHandle;
use crate::error::{Error, Result};
use crate::report::{CheckReport, Verdict};
use crate::words::{GeneratorId, Word};

/// A map on generators, extended to words by substitution. Whether it
/// respects the relators is certified separately by [`check_homomorphism`].
#[derive(Clone, Debug)]
pub struct Homomorphism {
    source: GroupHandle,
    target: GroupHandle,
    /// Aligned with `source.generators()`.
    images: Vec<Word>,
}

impl Homomorphism {
    /// Generators without an explicit image are an error; use
    /// [`Homomorphism::with_defaults`] to fix them instead.
    pub fn new(source: &GroupHandle, target: &GroupHandle, images: &[(GeneratorId, Word)]) -> Result<Self> {
        for (g, img) in images {
            if !source.alphabet().contains(*g) {
                return Err(Error::UnknownGenerator(*g));
            }
            target.check_word(img)?;
        }
        let images = source
            .generators()
            .iter()
            .map(|g| {
                images
                    .iter()
                    .find(|(k, _)| k == g)
                    .map(|(_, v)| v.clone())
                    .ok_or(Error::MissingImage(*g))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Homomorphism {
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    /// Like [`Homomorphism::new`] but unlisted generators map to themselves.
    pub fn with_defaults(source: &GroupHandle, target: &GroupHandle, images: &[(GeneratorId, Word)]) -> Result<Self> {
        let mut full: Vec<(GeneratorId, Word)> = images.to_vec();
        for g in source.generators() {
            if !full.iter().any(|(k, _)| k == g) {
                full.push((*g, Word::generator(*g)));
            }
        }
        Homomorphism::new(source, target, &full)
    }

    pub fn identity(group: &GroupHandle) -> Self {
        Homomorphism {
            source: group.clone(),
            target: group.clone(),
            images: group.generators().iter().map(|g| Word::generator(*g)).collect(),
        }
    }

    /// `g ↦ w·g·w⁻¹`.
    pub fn conjugation(group: &GroupHandle, w: &Word) -> Result<Self> {
        group.check_word(w)?;
        let inv = w.inverse();
        Ok(Homomorphism {
            source: group.clone(),
            target: group.clone(),
            images: group
                .generators()
                .iter()
                .map(|g| crate::words::free_reduce(&Word::product([w, &Word::generator(*g), &inv])).into_word())
                .collect(),
        })
    }

    pub fn source(&self) -> &GroupHandle {
        &self.source
    }

    pub fn target(&self) -> &GroupHandle {
        &self.target
    }

    pub fn image(&self, gen: GeneratorId) -> Result<&Word> {
        self.source
            .alphabet()
            .index_of(gen)
            .map(|i| &self.images[i])
            .ok_or(Error::MissingImage(gen))
    }

    pub fn images(&self) -> impl Iterator<Item = (GeneratorId, &Word)> {
        self.source.generators().iter().copied().zip(self.images.iter())
    }

    /// Substitutes generator images into `w` and freely reduces.
    pub fn apply(&self, w: &Word) -> Result<Word> {
        w.substitute(|g| self.image(g))
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &Homomorphism) -> Result<Homomorphism> {
        if !inner.target.same_group(&self.source) {
            return Err(Error::InvalidParameter(
                "composition of maps between different groups".into(),
            ));
        }
        let images = inner
            .images
            .iter()
            .map(|img| self.apply(img))
            .collect::<Result<Vec<_>>>()?;
        Ok(Homomorphism {
            source: inner.source.clone(),
            target: self.target.clone(),
            images,
        })
    }
}

/// Verified iff every source relator maps to the identity of the target.
pub fn check_homomorphism(h: &Homomorphism) -> Result<CheckReport> {
    for r in h.source.relators() {
        let img = h.apply(r)?;
        if !h.target.is_identity(&img)? {
            return Ok(CheckReport::new(
                "homomorphism",
                Verdict::ViolationWitness(format!("relator {r}")),
            ));
        }
    }
    Ok(CheckReport::new("homomorphism", Verdict::Verified)
        .detail(format!("{} relators map to 1", h.source.relators().len())))
}

/// An automorphism given by a forward map and its claimed inverse.
#[derive(Clone, Debug)]
pub struct Automorphism {
    pub forward: Homomorphism,
    pub backward: Homomorphism,
}

impl Automorphism {
    pub fn new(forward: Homomorphism, backward: Homomorphism) -> Result<Self> {
        let g = forward.source();
        let ok = forward.target().same_group(g) && backward.source().same_group(g) && backward.target().same_group(g);
        if !ok {
            return Err(Error::InvalidParameter(
                "automorphism maps must be endomorphisms of one group".into(),
            ));
        }
        Ok(Automorphism { forward, backward })
    }

    pub fn identity(group: &GroupHandle) -> Self {
        Automorphism {
            forward: Homomorphism::identity(group),
            backward: Homomorphism::identity(group),
        }
    }

    /// Conjugation `g ↦ w·g·w⁻¹`.
    pub fn inner(group: &GroupHandle, w: &Word) -> Result<Self> {
        Ok(Automorphism {
            forward: Homomorphism::conjugation(group, w)?,
            backward: Homomorphism::conjugation(group, &w.inverse())?,
        })
    }

    pub fn group(&self) -> &GroupHandle {
        self.forward.source()
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.forward.apply(w)
    }

    pub fn apply_inverse(&self, w: &Word) -> Result<Word> {
        self.backward.apply(w)
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Automorphism) -> Result<Automorphism> {
        Ok(Automorphism {
            forward: self.forward.compose(&inner.forward)?,
            backward: inner.backward.compose(&self.backward)?,
        })
    }
}

/// Verified iff both maps are homomorphisms and both composites fix every
/// generator.
pub fn check_automorphism(phi: &Automorphism) -> Result<CheckReport> {
    let named = |r: CheckReport, which: &str| CheckReport {
        name: "automorphism".into(),
        verdict: match r.verdict {
            Verdict::ViolationWitness(w) => Verdict::ViolationWitness(format!("{which} {w}")),
            v => v,
        },
        ..r
    };
    let fwd = check_homomorphism(&phi.forward)?;
    if fwd.is_violation() {
        return Ok(named(fwd, "forward"));
    }
    let bwd = check_homomorphism(&phi.backward)?;
    if bwd.is_violation() {
        return Ok(named(bwd, "backward"));
    }
    let group = phi.group();
    for g in group.generators() {
        let gw = Word::generator(*g);
        let there_and_back = phi.backward.apply(&phi.forward.apply(&gw)?)?;
        let back_and_there = phi.forward.apply(&phi.backward.apply(&gw)?)?;
        for round in [there_and_back, back_and_there] {
            if !group.equal(&gw, &round)? {
                return Ok(CheckReport::new(
                    "automorphism",
                    Verdict::ViolationWitness(format!("{g}")),
                ));
            }
        }
    }
    Ok(CheckReport::new("automorphism", Verdict::Verified)
        .detail("both maps are homomorphisms and mutually inverse on generators"))
}
