//! Dehn's algorithm for a one-relator presentation satisfying C′(1/6).
//!
//! Words are encoded as letter codes `2·i + (1 if inverse)` over the group's
//! generator list. The symmetrized relator set holds every cyclic permutation
//! of the relator and of its inverse.

use alloc::vec::Vec;

use crate::words::{GeneratorId, Letter, Sign, Word};

#[derive(Clone, Debug)]
pub(crate) struct DehnTable {
    gens: Vec<GeneratorId>,
    /// Symmetrized relators bucketed by first letter code.
    by_first: Vec<Vec<Vec<u8>>>,
    relator_len: usize,
}

impl DehnTable {
    pub(crate) fn new(gens: &[GeneratorId], relator: &Word) -> Self {
        let codes_of = |w: &Word| -> Vec<u8> {
            w.letters()
                .map(|l| {
                    let i = gens.iter().position(|g| *g == l.gen).unwrap_or(0);
                    (2 * i + usize::from(l.sign == Sign::Neg)) as u8
                })
                .collect()
        };
        let forward = codes_of(relator);
        let backward = codes_of(&relator.inverse());
        let mut by_first = alloc::vec![Vec::new(); 2 * gens.len()];
        for base in [&forward, &backward] {
            for shift in 0..base.len() {
                let mut r = Vec::with_capacity(base.len());
                r.extend_from_slice(&base[shift..]);
                r.extend_from_slice(&base[..shift]);
                let bucket: &mut Vec<Vec<u8>> = &mut by_first[r[0] as usize];
                if !bucket.contains(&r) {
                    bucket.push(r);
                }
            }
        }
        DehnTable {
            gens: gens.to_vec(),
            by_first,
            relator_len: forward.len(),
        }
    }

    pub(crate) fn encode(&self, w: &Word) -> Vec<u8> {
        let mut out = Vec::with_capacity(w.len());
        for r in w.runs() {
            let i = self.gens.iter().position(|g| *g == r.gen).unwrap_or(0);
            let code = (2 * i + usize::from(r.exp < 0)) as u8;
            for _ in 0..r.exp.unsigned_abs() {
                out.push(code);
            }
        }
        out
    }

    pub(crate) fn decode(&self, codes: &[u8]) -> Word {
        Word::from_letters(codes.iter().map(|&c| {
            let sign = if c % 2 == 0 { Sign::Pos } else { Sign::Neg };
            Letter::new(self.gens[(c / 2) as usize], sign)
        }))
    }

    /// Minimum length of a relator piece that may be replaced.
    fn threshold(&self) -> usize {
        self.relator_len / 2 + 1
    }

    /// One Dehn rewrite on a freely reduced code word. Returns false if no
    /// subword is longer than half a relator.
    fn rewrite_once(&self, w: &mut Vec<u8>) -> bool {
        let need = self.threshold();
        for start in 0..w.len() {
            if w.len() - start < need {
                break;
            }
            for r in &self.by_first[w[start] as usize] {
                let m = w[start..].iter().zip(r.iter()).take_while(|(a, b)| a == b).count();
                if m >= need {
                    // r = u·v with u = w[start..start+m]; u = v⁻¹ in the group.
                    let mut out = Vec::with_capacity(w.len());
                    out.extend_from_slice(&w[..start]);
                    out.extend(r[m..].iter().rev().map(|c| c ^ 1));
                    out.extend_from_slice(&w[start + m..]);
                    *w = free_reduce_codes(&out);
                    return true;
                }
            }
        }
        false
    }

    /// Dehn-reduces `w`; every rewrite strictly shortens the word.
    pub(crate) fn reduce(&self, w: &[u8]) -> Vec<u8> {
        let mut cur = free_reduce_codes(w);
        while self.rewrite_once(&mut cur) {}
        cur
    }

    /// Lengths after free reduction and after each rewrite.
    #[cfg(test)]
    pub(crate) fn trace(&self, w: &[u8]) -> Vec<usize> {
        let mut cur = free_reduce_codes(w);
        let mut lengths = alloc::vec![cur.len()];
        while self.rewrite_once(&mut cur) {
            lengths.push(cur.len());
        }
        lengths
    }

    pub(crate) fn is_identity(&self, w: &[u8]) -> bool {
        let mut cur = self.reduce(w);
        loop {
            let before = cur.len();
            let mut lo = 0;
            let mut hi = cur.len();
            while hi - lo >= 2 && cur[lo] == cur[hi - 1] ^ 1 {
                lo += 1;
                hi -= 1;
            }
            cur = cur[lo..hi].to_vec();
            if cur.len() == before {
                return cur.is_empty();
            }
            cur = self.reduce(&cur);
        }
    }
}

pub(crate) fn free_reduce_codes(w: &[u8]) -> Vec<u8> {
    let mut out: Vec<u8> = Vec::with_capacity(w.len());
    for &c in w {
        if out.last() == Some(&(c ^ 1)) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out
}
