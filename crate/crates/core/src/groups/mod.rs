//! Group handles: a finite presentation bundled with a word-problem strategy.
//!
//! | strategy          | identity test                         | normal form                    |
//! |-------------------|---------------------------------------|--------------------------------|
//! | free              | free reduction                        | reduced word                   |
//! | free abelian      | exponent vector                       | `g₁^e₁ g₂^e₂ …` in declared order |
//! | surface           | Dehn's algorithm                      | Dehn-reduced word (see below)  |
//! | Baumslag–Solitar  | Britton reduction of the HNN splitting | reduced syllable form          |
//! | from splitting    | syllable reduction                    | reduced syllable form          |
//!
//! Dehn reduction is not confluent, so for surface groups the normal form only
//! promises that it is empty exactly when the input is the identity. Compare
//! surface elements with [`GroupHandle::equal`].

mod dehn;
mod morphism;

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use morphism::{check_automorphism, check_homomorphism, Automorphism, Homomorphism};

use crate::error::{Error, Result};
use crate::splittings::{self, SplittingData};
use crate::words::{cyclic_reduce, free_reduce, Alphabet, GeneratorId, Word};
use dehn::DehnTable;

/// Default bound for the three-valued membership oracle on groups without
/// an exact decision procedure.
pub const DEFAULT_MEMBERSHIP_BOUND: u64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Alphabet,
    pub relators: Vec<Word>,
}

#[derive(Clone, Debug)]
pub enum Strategy {
    Free,
    Surface { genus: u32 },
    FreeAbelian { rank: u32 },
    BaumslagSolitar { p: i64, q: i64 },
    FromSplitting(Arc<SplittingData>),
}

/// Result of asking whether `w` lies in the cyclic subgroup `⟨c⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `w = cⁿ`.
    Power(i64),
    NotMember,
    /// No decision procedure applies and no power with `|n| ≤ bound` matched.
    Unknown {
        bound: u64,
    },
}

impl Membership {
    pub fn power(self) -> Option<i64> {
        match self {
            Membership::Power(n) => Some(n),
            _ => None,
        }
    }
}

/// Cheap to clone; the presentation and solver tables are shared.
#[derive(Clone)]
pub struct GroupHandle(Arc<GroupInner>);

struct GroupInner {
    presentation: Presentation,
    strategy: Strategy,
    dehn: Option<DehnTable>,
    /// HNN data backing the Baumslag–Solitar solver.
    britton: Option<Arc<SplittingData>>,
}

impl fmt::Debug for GroupHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind: alloc::string::String = match &self.0.strategy {
            Strategy::Free => "Free".into(),
            Strategy::Surface { genus } => format!("Surface({genus})"),
            Strategy::FreeAbelian { rank } => format!("FreeAbelian({rank})"),
            Strategy::BaumslagSolitar { p, q } => format!("BaumslagSolitar({p},{q})"),
            Strategy::FromSplitting(_) => "FromSplitting".into(),
        };
        write!(f, "{kind}{:?}", self.0.presentation.generators.generators())
    }
}

impl GroupHandle {
    fn build(presentation: Presentation, strategy: Strategy) -> Self {
        GroupHandle(Arc::new(GroupInner {
            presentation,
            strategy,
            dehn: None,
            britton: None,
        }))
    }

    pub fn free(generators: Alphabet) -> Self {
        GroupHandle::build(
            Presentation {
                generators,
                relators: Vec::new(),
            },
            Strategy::Free,
        )
    }

    pub fn free_abelian(generators: Alphabet) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidParameter("free abelian rank must be ≥ 1".into()));
        }
        let gens = generators.generators();
        let mut relators = Vec::new();
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                relators.push(commutator(gens[i], gens[j]));
            }
        }
        let rank = gens.len() as u32;
        Ok(GroupHandle::build(
            Presentation { generators, relators },
            Strategy::FreeAbelian { rank },
        ))
    }

    /// Surface group of genus `g ≥ 2` on generators listed as
    /// `a₁, b₁, …, a_g, b_g`, with relator `∏ [aᵢ, bᵢ]`.
    pub fn surface(generators: Alphabet) -> Result<Self> {
        let gens = generators.generators();
        if gens.len() < 4 || !gens.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "surface group needs 2g generators with g ≥ 2, got {}",
                gens.len()
            )));
        }
        let relator = Word::product(
            gens.chunks(2)
                .map(|p| commutator(p[0], p[1]))
                .collect::<Vec<_>>()
                .iter(),
        );
        let genus = (gens.len() / 2) as u32;
        let dehn = DehnTable::new(gens, &relator);
        Ok(GroupHandle(Arc::new(GroupInner {
            presentation: Presentation {
                generators,
                relators: vec![relator],
            },
            strategy: Strategy::Surface { genus },
            dehn: Some(dehn),
            britton: None,
        })))
    }

    /// `⟨x, t | t xᵖ t⁻¹ = x^q⟩`, solved by Britton reduction over `⟨x⟩`.
    pub fn baumslag_solitar(p: i64, q: i64, x: GeneratorId, t: GeneratorId) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidParameter("p and q must be nonzero".into()));
        }
        if x == t {
            return Err(Error::InvalidParameter("x and t must differ".into()));
        }
        let data = splittings::baumslag_solitar_data(p, q, x, t)?;
        let relator = Word::product(
            [
                Word::generator(t),
                Word::power(x, p),
                Word::power(t, -1),
                Word::power(x, -q),
            ]
            .iter(),
        );
        Ok(GroupHandle(Arc::new(GroupInner {
            presentation: Presentation {
                generators: Alphabet::new(vec![x, t])?,
                relators: vec![relator],
            },
            strategy: Strategy::BaumslagSolitar { p, q },
            dehn: None,
            britton: Some(Arc::new(data)),
        })))
    }

    pub(crate) fn from_splitting(presentation: Presentation, data: Arc<SplittingData>) -> Self {
        GroupHandle::build(presentation, Strategy::FromSplitting(data))
    }

    pub fn presentation(&self) -> &Presentation {
        &self.0.presentation
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.0.presentation.generators
    }

    pub fn generators(&self) -> &[GeneratorId] {
        self.alphabet().generators()
    }

    pub fn relators(&self) -> &[Word] {
        &self.0.presentation.relators
    }

    pub fn strategy(&self) -> &Strategy {
        &self.0.strategy
    }

    pub fn same_group(&self, other: &GroupHandle) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.presentation == other.0.presentation
                && core::mem::discriminant(&self.0.strategy) == core::mem::discriminant(&other.0.strategy))
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        self.alphabet().check(w)
    }

    pub fn parse_word(&self, literal: &str) -> Result<Word> {
        self.alphabet().parse_word(literal)
    }

    fn splitting_data(&self) -> Option<&SplittingData> {
        match &self.0.strategy {
            Strategy::FromSplitting(data) => Some(data),
            _ => self.0.britton.as_deref(),
        }
    }

    fn exponent_vector(&self, w: &Word) -> Vec<i64> {
        self.generators().iter().map(|g| w.exponent_sum(*g)).collect()
    }

    /// Whether `w` represents the identity.
    pub fn is_identity(&self, w: &Word) -> Result<bool> {
        self.check_word(w)?;
        self.is_identity_unchecked(w)
    }

    pub(crate) fn is_identity_unchecked(&self, w: &Word) -> Result<bool> {
        match &self.0.strategy {
            Strategy::Free => Ok(free_reduce(w).is_empty()),
            Strategy::FreeAbelian { .. } => Ok(self.exponent_vector(w).iter().all(|e| *e == 0)),
            Strategy::Surface { .. } => {
                let dehn = self.0.dehn.as_ref().expect("surface groups carry a Dehn table");
                Ok(dehn.is_identity(&dehn.encode(w)))
            }
            Strategy::BaumslagSolitar { .. } | Strategy::FromSplitting(_) => {
                let data = self.splitting_data().expect("splitting-backed group");
                Ok(splittings::reduce_data(data, w)?.is_identity())
            }
        }
    }

    pub fn equal(&self, u: &Word, v: &Word) -> Result<bool> {
        self.is_identity(&u.inverse().concat(v))
    }

    pub fn normal_form(&self, w: &Word) -> Result<Word> {
        self.check_word(w)?;
        self.normal_form_unchecked(w)
    }

    pub(crate) fn normal_form_unchecked(&self, w: &Word) -> Result<Word> {
        match &self.0.strategy {
            Strategy::Free => Ok(free_reduce(w).into_word()),
            Strategy::FreeAbelian { .. } => Ok(Word::from_runs(
                self.generators().iter().copied().zip(self.exponent_vector(w)),
            )),
            Strategy::Surface { .. } => {
                let dehn = self.0.dehn.as_ref().expect("surface groups carry a Dehn table");
                Ok(dehn.decode(&dehn.reduce(&dehn.encode(w))))
            }
            Strategy::BaumslagSolitar { .. } | Strategy::FromSplitting(_) => {
                let data = self.splitting_data().expect("splitting-backed group");
                Ok(splittings::reduce_data(data, w)?.to_word())
            }
        }
    }

    /// Decides `w ∈ ⟨c⟩`. Exact for free and free abelian groups (and hence
    /// for the `⟨x⟩` vertex group of a Baumslag–Solitar splitting); elsewhere
    /// it tries powers `|n| ≤ bound` and answers `Unknown` if none match.
    pub fn cyclic_membership(&self, w: &Word, c: &Word, bound: u64) -> Result<Membership> {
        self.check_word(w)?;
        self.check_word(c)?;
        if self.is_identity_unchecked(c)? {
            return Err(Error::InvalidParameter(format!(
                "cyclic membership needs a nontrivial generator, got {c}"
            )));
        }
        self.cyclic_membership_unchecked(w, c, bound)
    }

    pub(crate) fn cyclic_membership_unchecked(&self, w: &Word, c: &Word, bound: u64) -> Result<Membership> {
        match &self.0.strategy {
            Strategy::Free => Ok(free_membership(w, c)),
            Strategy::FreeAbelian { .. } => Ok(abelian_membership(&self.exponent_vector(w), &self.exponent_vector(c))),
            _ => {
                if self.is_identity_unchecked(w)? {
                    return Ok(Membership::Power(0));
                }
                let mut forward = w.clone();
                let mut backward = w.clone();
                let c_inv = c.inverse();
                for n in 1..=bound as i64 {
                    forward = forward.concat(&c_inv);
                    if self.is_identity_unchecked(&forward)? {
                        return Ok(Membership::Power(n));
                    }
                    backward = backward.concat(c);
                    if self.is_identity_unchecked(&backward)? {
                        return Ok(Membership::Power(-n));
                    }
                }
                Ok(Membership::Unknown { bound })
            }
        }
    }

    /// `[G : ⟨c⟩]` when it is known, `None` for infinite or undetermined.
    /// With `c = None` the subgroup is trivial.
    pub(crate) fn cyclic_index(&self, c: Option<&Word>) -> CosetIndex {
        let rank = self.generators().len();
        match (&self.0.strategy, c) {
            (_, _) if rank == 0 => CosetIndex::Finite(1),
            (Strategy::Free | Strategy::FreeAbelian { .. }, Some(c)) if rank == 1 => {
                let n = free_reduce(c).exponent_sum(self.generators()[0]);
                CosetIndex::Finite(n.unsigned_abs())
            }
            (Strategy::Free | Strategy::FreeAbelian { .. }, _) => CosetIndex::Infinite,
            _ => CosetIndex::Unknown,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum CosetIndex {
    Finite(u64),
    Infinite,
    Unknown,
}

pub fn commutator(a: GeneratorId, b: GeneratorId) -> Word {
    Word::from_runs([(a, 1), (b, 1), (a, -1), (b, -1)])
}

/// Exact root test in a free group: conjugate `c = u·v·u⁻¹` to its cyclic
/// core `v`, then `w ∈ ⟨c⟩` iff `u⁻¹·w·u` is a power of `v`.
fn free_membership(w: &Word, c: &Word) -> Membership {
    let (core, conj) = cyclic_reduce(c);
    let shifted = free_reduce(&Word::product([&conj.inverse(), w, &conj]));
    if shifted.is_empty() {
        return Membership::Power(0);
    }
    let (lv, lw) = (core.len(), shifted.len());
    if lv == 0 || lw % lv != 0 {
        return Membership::NotMember;
    }
    let n = (lw / lv) as i64;
    for candidate in [n, -n] {
        if free_reduce(&core.pow(candidate)) == shifted {
            return Membership::Power(candidate);
        }
    }
    Membership::NotMember
}

fn abelian_membership(w: &[i64], c: &[i64]) -> Membership {
    let Some(i) = c.iter().position(|e| *e != 0) else {
        return Membership::NotMember;
    };
    if w[i] % c[i] != 0 {
        return Membership::NotMember;
    }
    let n = w[i] / c[i];
    if w.iter().zip(c).all(|(a, b)| *a == n * b) {
        Membership::Power(n)
    } else {
        Membership::NotMember
    }
}
