//! Free words over named generators.
//!
//! A [`Word`] is an immutable sequence of signed generator letters. Internally
//! consecutive letters with the same generator and sign are stored as a single
//! exponent run, so `x^4096` costs one run rather than 4096 letters, but the
//! public contract is the letter sequence: equality, length and iteration all
//! talk about letters.
//!
//! Literal syntax: whitespace separated tokens `name`, `name^n` or `name^-n`.
//! The empty string and the token `1` both denote the identity.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Deref, Neg};

use crate::error::{Error, Result};

pub const MAX_NAME_LEN: usize = 15;

/// Generator name: an ASCII identifier of at most [`MAX_NAME_LEN`] bytes,
/// starting with a letter or underscore. Stored inline so it is `Copy`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeneratorId {
    len: u8,
    bytes: [u8; MAX_NAME_LEN],
}

impl GeneratorId {
    pub fn new(name: &str) -> Result<Self> {
        let raw = name.as_bytes();
        let valid_head = raw.first().is_some_and(|b| b.is_ascii_alphabetic() || *b == b'_');
        let valid_tail = raw.iter().all(|b| b.is_ascii_alphanumeric() || *b == b'_');
        if !valid_head || !valid_tail || raw.len() > MAX_NAME_LEN {
            return Err(Error::InvalidGeneratorName(name.to_string()));
        }
        let mut bytes = [0u8; MAX_NAME_LEN];
        bytes[..raw.len()].copy_from_slice(raw);
        Ok(GeneratorId {
            len: raw.len() as u8,
            bytes,
        })
    }

    pub fn as_str(&self) -> &str {
        // Only ASCII bytes are ever stored.
        core::str::from_utf8(&self.bytes[..self.len as usize]).unwrap_or("?")
    }
}

impl Ord for GeneratorId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.as_str().cmp(other.as_str())
    }
}

impl PartialOrd for GeneratorId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn of(exp: i64) -> Sign {
        if exp < 0 {
            Sign::Neg
        } else {
            Sign::Pos
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    pub gen: GeneratorId,
    pub sign: Sign,
}

impl Letter {
    pub fn new(gen: GeneratorId, sign: Sign) -> Self {
        Letter { gen, sign }
    }

    pub fn inverse(self) -> Self {
        Letter {
            gen: self.gen,
            sign: -self.sign,
        }
    }
}

/// `gen^exp` with `exp != 0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Run {
    pub gen: GeneratorId,
    pub exp: i64,
}

/// A finite word in the generators, not necessarily reduced.
///
/// Invariant on the run encoding: no zero exponents, and two adjacent runs on
/// the same generator always have opposite signs. This makes structural
/// equality coincide with equality of letter sequences.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    runs: Vec<Run>,
}

impl Word {
    pub fn identity() -> Self {
        Word { runs: Vec::new() }
    }

    pub fn generator(gen: GeneratorId) -> Self {
        Word::power(gen, 1)
    }

    pub fn power(gen: GeneratorId, exp: i64) -> Self {
        let mut w = Word::identity();
        w.push_run(gen, exp);
        w
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut w = Word::identity();
        for l in letters {
            w.push_run(l.gen, l.sign.value());
        }
        w
    }

    pub fn from_runs<I: IntoIterator<Item = (GeneratorId, i64)>>(runs: I) -> Self {
        let mut w = Word::identity();
        for (gen, exp) in runs {
            w.push_run(gen, exp);
        }
        w
    }

    /// Concatenation of several words, unreduced.
    pub fn product<'a, I: IntoIterator<Item = &'a Word>>(words: I) -> Self {
        let mut w = Word::identity();
        for part in words {
            w.extend_unreduced(part);
        }
        w
    }

    pub(crate) fn push_run(&mut self, gen: GeneratorId, exp: i64) {
        if exp == 0 {
            return;
        }
        if let Some(last) = self.runs.last_mut() {
            if last.gen == gen && Sign::of(last.exp) == Sign::of(exp) {
                last.exp += exp;
                return;
            }
        }
        self.runs.push(Run { gen, exp });
    }

    pub(crate) fn extend_unreduced(&mut self, other: &Word) {
        for r in &other.runs {
            self.push_run(r.gen, r.exp);
        }
    }

    /// Appends with free cancellation at the seam; keeps a reduced word reduced.
    pub(crate) fn push_reduced(&mut self, gen: GeneratorId, exp: i64) {
        if exp == 0 {
            return;
        }
        if let Some(last) = self.runs.last_mut() {
            if last.gen == gen {
                last.exp += exp;
                if last.exp == 0 {
                    self.runs.pop();
                }
                return;
            }
        }
        self.runs.push(Run { gen, exp });
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn letters(&self) -> Letters<'_> {
        Letters {
            runs: &self.runs,
            run: 0,
            used: 0,
        }
    }

    /// Number of letters.
    pub fn len(&self) -> usize {
        self.runs.iter().map(|r| r.exp.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn first_letter(&self) -> Option<Letter> {
        self.runs.first().map(|r| Letter::new(r.gen, Sign::of(r.exp)))
    }

    pub fn last_letter(&self) -> Option<Letter> {
        self.runs.last().map(|r| Letter::new(r.gen, Sign::of(r.exp)))
    }

    pub fn inverse(&self) -> Word {
        Word {
            runs: self
                .runs
                .iter()
                .rev()
                .map(|r| Run {
                    gen: r.gen,
                    exp: -r.exp,
                })
                .collect(),
        }
    }

    /// Unreduced concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.extend_unreduced(other);
        w
    }

    /// `self^n`, unreduced; negative powers use the inverse.
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut w = Word::identity();
        for _ in 0..n.unsigned_abs() {
            w.extend_unreduced(&base);
        }
        w
    }

    /// Generators in order of first occurrence.
    pub fn generators(&self) -> Vec<GeneratorId> {
        let mut out: Vec<GeneratorId> = Vec::new();
        for r in &self.runs {
            if !out.contains(&r.gen) {
                out.push(r.gen);
            }
        }
        out
    }

    pub fn exponent_sum(&self, gen: GeneratorId) -> i64 {
        self.runs.iter().filter(|r| r.gen == gen).map(|r| r.exp).sum()
    }

    /// Replaces each letter `g^{±1}` by `image(g)^{±1}` and freely reduces.
    pub fn substitute<'a, F>(&self, mut image: F) -> Result<Word>
    where
        F: FnMut(GeneratorId) -> Result<&'a Word>,
    {
        let mut out = Word::identity();
        for r in &self.runs {
            let img = image(r.gen)?;
            let piece = if r.exp < 0 { img.inverse() } else { img.clone() };
            for _ in 0..r.exp.unsigned_abs() {
                for pr in &piece.runs {
                    out.push_reduced(pr.gen, pr.exp);
                }
            }
        }
        Ok(out)
    }

    /// Parses a word literal without checking it against any alphabet.
    pub fn parse(literal: &str) -> Result<Word> {
        let syntax = |reason: &str| Error::WordSyntax {
            literal: literal.to_string(),
            reason: reason.to_string(),
        };
        let mut w = Word::identity();
        for token in literal.split_whitespace() {
            if token == "1" {
                continue;
            }
            let (name, exp) = match token.split_once('^') {
                Some((name, exp)) => {
                    let exp: i64 = exp.parse().map_err(|_| syntax("exponent is not an integer"))?;
                    (name, exp)
                }
                None => (token, 1),
            };
            let gen = GeneratorId::new(name).map_err(|_| syntax("bad generator name"))?;
            w.push_run(gen, exp);
        }
        Ok(w)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            return f.write_str("1");
        }
        for (i, r) in self.runs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if r.exp == 1 {
                write!(f, "{}", r.gen)?;
            } else {
                write!(f, "{}^{}", r.gen, r.exp)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl From<ReducedWord> for Word {
    fn from(w: ReducedWord) -> Word {
        w.0
    }
}

pub struct Letters<'a> {
    runs: &'a [Run],
    run: usize,
    used: u64,
}

impl Iterator for Letters<'_> {
    type Item = Letter;

    fn next(&mut self) -> Option<Letter> {
        let r = self.runs.get(self.run)?;
        self.used += 1;
        if self.used == r.exp.unsigned_abs() {
            self.run += 1;
            self.used = 0;
        }
        Some(Letter::new(r.gen, Sign::of(r.exp)))
    }
}

/// A freely reduced word: no adjacent letters `g^s g^-s`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ReducedWord(Word);

impl ReducedWord {
    /// Accepts `w` only if it is already freely reduced.
    pub fn new(w: Word) -> Option<Self> {
        is_freely_reduced(&w).then_some(ReducedWord(w))
    }

    pub fn into_word(self) -> Word {
        self.0
    }

    pub fn as_word(&self) -> &Word {
        &self.0
    }
}

impl Deref for ReducedWord {
    type Target = Word;

    fn deref(&self) -> &Word {
        &self.0
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ReducedWord({})", self.0)
    }
}

pub fn is_freely_reduced(w: &Word) -> bool {
    w.runs.windows(2).all(|p| p[0].gen != p[1].gen)
}

/// The unique freely reduced word equal to `w` in the free group.
pub fn free_reduce(w: &Word) -> ReducedWord {
    let mut out = Word {
        runs: Vec::with_capacity(w.runs.len()),
    };
    for r in &w.runs {
        out.push_reduced(r.gen, r.exp);
    }
    ReducedWord(out)
}

/// Splits `w` as `c · u · c⁻¹` (freely) with `u` cyclically reduced.
///
/// The conjugator returned is the longest one peeled off the ends of the
/// reduced word, so an already cyclically reduced input yields `c = ε`.
pub fn cyclic_reduce(w: &Word) -> (ReducedWord, Word) {
    let mut runs = free_reduce(w).0.runs;
    let mut conj = Word::identity();
    let mut lo = 0usize;
    loop {
        let n = runs.len() - lo;
        if n < 2 {
            break;
        }
        let hi = runs.len() - 1;
        let (first, last) = (runs[lo], runs[hi]);
        if first.gen != last.gen || Sign::of(first.exp) == Sign::of(last.exp) {
            break;
        }
        let m = first.exp.abs().min(last.exp.abs());
        let step = first.exp.signum() * m;
        conj.push_reduced(first.gen, step);
        runs[lo].exp -= step;
        runs[hi].exp += step;
        if runs[hi].exp == 0 {
            runs.pop();
        }
        if runs[lo].exp == 0 {
            lo += 1;
        }
    }
    let core = Word {
        runs: runs.split_off(lo),
    };
    (ReducedWord(core), conj)
}

/// An ordered set of generators. The order fixes the shortlex order used by
/// every enumeration in the crate: `g₀ < g₀⁻¹ < g₁ < g₁⁻¹ < …`.
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct Alphabet {
    gens: Vec<GeneratorId>,
}

impl Alphabet {
    pub fn new(gens: Vec<GeneratorId>) -> Result<Self> {
        for (i, g) in gens.iter().enumerate() {
            if gens[..i].contains(g) {
                return Err(Error::InvalidParameter(alloc::format!("generator {g} declared twice")));
            }
        }
        Ok(Alphabet { gens })
    }

    pub fn from_names(names: &[&str]) -> Result<Self> {
        let gens = names.iter().map(|n| GeneratorId::new(n)).collect::<Result<Vec<_>>>()?;
        Alphabet::new(gens)
    }

    pub fn generators(&self) -> &[GeneratorId] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn index_of(&self, gen: GeneratorId) -> Option<usize> {
        self.gens.iter().position(|g| *g == gen)
    }

    pub fn contains(&self, gen: GeneratorId) -> bool {
        self.gens.contains(&gen)
    }

    pub fn check(&self, w: &Word) -> Result<()> {
        match w.runs.iter().find(|r| !self.contains(r.gen)) {
            Some(r) => Err(Error::UnknownGenerator(r.gen)),
            None => Ok(()),
        }
    }

    /// Parses a literal and validates it against this alphabet.
    pub fn parse_word(&self, literal: &str) -> Result<Word> {
        let w = Word::parse(literal)?;
        self.check(&w)?;
        Ok(w)
    }

    /// Letter number `k` in shortlex order.
    pub fn letter(&self, k: usize) -> Letter {
        let sign = if k.is_multiple_of(2) { Sign::Pos } else { Sign::Neg };
        Letter::new(self.gens[k / 2], sign)
    }

    /// Freely reduced words of length `≤ max_len`, in shortlex order.
    pub fn reduced_words(&self, max_len: usize) -> ShortlexWords<'_> {
        ShortlexWords {
            alphabet: self,
            max_len,
            current: None,
            done: false,
        }
    }
}

pub struct ShortlexWords<'a> {
    alphabet: &'a Alphabet,
    max_len: usize,
    current: Option<Vec<usize>>,
    done: bool,
}

impl ShortlexWords<'_> {
    fn smallest_after(prev: Option<usize>) -> usize {
        match prev {
            Some(1) => 1,
            _ => 0,
        }
    }

    fn fill_from(idx: &mut [usize], start: usize) {
        for i in start..idx.len() {
            let prev = if i == 0 { None } else { Some(idx[i - 1]) };
            idx[i] = Self::smallest_after(prev);
        }
    }

    fn advance(idx: &mut [usize], letters: usize) -> bool {
        for pos in (0..idx.len()).rev() {
            let prev = if pos == 0 { None } else { Some(idx[pos - 1]) };
            let mut cand = idx[pos] + 1;
            if prev.is_some_and(|p| cand == p ^ 1) {
                cand += 1;
            }
            if cand < letters {
                idx[pos] = cand;
                Self::fill_from(idx, pos + 1);
                return true;
            }
        }
        false
    }
}

impl Iterator for ShortlexWords<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        let letters = 2 * self.alphabet.len();
        match self.current.as_mut() {
            None => {
                self.current = Some(Vec::new());
            }
            Some(idx) => {
                if !Self::advance(idx, letters) {
                    let len = idx.len() + 1;
                    if len > self.max_len || letters == 0 {
                        self.done = true;
                        return None;
                    }
                    let mut next = vec![0usize; len];
                    Self::fill_from(&mut next, 0);
                    *idx = next;
                }
            }
        }
        let idx = self.current.as_ref()?;
        if idx.is_empty() && self.max_len == 0 {
            self.done = true;
        }
        Some(Word::from_letters(idx.iter().map(|&k| self.alphabet.letter(k))))
    }
}
