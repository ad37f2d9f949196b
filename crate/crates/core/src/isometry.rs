//! Tree isometries induced by automorphisms that preserve the stabilizers
//! of a base edge up to a common conjugator.
//!
//! Given `φ` and a witness `x` with `φ(G_v) = x·G_v·x⁻¹` for both endpoints
//! and the edge, the isometry sends `g·v` to `φ(g)·x·v`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::groups::{Automorphism, Homomorphism};
use crate::report::{CheckReport, Verdict};
use crate::splittings::{Side, Splitting};
use crate::tree::{
    self, distance_geodesic, edge_equal, fixes_edge, fixes_vertex, vertex_equal, TreeBall, TreeEdge, TreeVertex,
    VertexKind,
};
use crate::words::Word;

/// One of the three stabilizers attached to the base edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stabilizer {
    /// The first endpoint (`A`-side).
    First,
    /// The second endpoint (`B` for amalgams, `t⁻¹A` for HNN extensions).
    Second,
    Edge,
}

impl Stabilizer {
    pub const ALL: [Stabilizer; 3] = [Stabilizer::First, Stabilizer::Second, Stabilizer::Edge];

    pub fn name(self) -> &'static str {
        match self {
            Stabilizer::First => "G_v1",
            Stabilizer::Second => "G_v2",
            Stabilizer::Edge => "G_e",
        }
    }
}

fn stable_inverse(s: &Splitting) -> Word {
    s.stable_letter().map(|t| Word::power(t, -1)).unwrap_or_default()
}

/// Generators of the chosen stabilizer of the edge `e0·C`.
pub fn stabilizer_generators(s: &Splitting, e0: &Word, which: Stabilizer) -> Vec<Word> {
    let conj = |w: &Word| Word::product([e0, w, &e0.inverse()]);
    match which {
        Stabilizer::First => s
            .factor(Side::A)
            .generators()
            .iter()
            .map(|g| conj(&Word::generator(*g)))
            .collect(),
        Stabilizer::Second => {
            let shift = stable_inverse(s);
            s.factor(Side::B)
                .generators()
                .iter()
                .map(|g| conj(&Word::product([&shift, &Word::generator(*g), &shift.inverse()])))
                .collect()
        }
        Stabilizer::Edge => s.edge_image(Side::A).map(conj).into_iter().collect(),
    }
}

/// Whether `h` maps every generator of the stabilizer into `x·Stab·x⁻¹`.
pub fn maps_into_conjugate(s: &Splitting, h: &Homomorphism, e0: &Word, which: Stabilizer, x: &Word) -> Result<bool> {
    let xe = x.concat(e0);
    for gen in stabilizer_generators(s, e0, which) {
        let img = h.apply(&gen)?;
        let ok = match which {
            Stabilizer::First => {
                let kind = if s.is_hnn() { VertexKind::V } else { VertexKind::A };
                fixes_vertex(s, &img, &TreeVertex { kind, rep: xe.clone() })?
            }
            Stabilizer::Second => {
                let v = if s.is_hnn() {
                    TreeVertex {
                        kind: VertexKind::V,
                        rep: xe.concat(&stable_inverse(s)),
                    }
                } else {
                    TreeVertex {
                        kind: VertexKind::B,
                        rep: xe.clone(),
                    }
                };
                fixes_vertex(s, &img, &v)?
            }
            Stabilizer::Edge => fixes_edge(s, &img, &TreeEdge { rep: xe.clone() })?,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `φ(Stab) = x·Stab·x⁻¹`, via containment both ways (the reverse
/// containment uses the witness `φ⁻¹(x⁻¹)`).
pub fn conjugates_stabilizer(
    s: &Splitting,
    phi: &Automorphism,
    e0: &Word,
    which: Stabilizer,
    x: &Word,
) -> Result<bool> {
    if !maps_into_conjugate(s, &phi.forward, e0, which, x)? {
        return Ok(false);
    }
    let y = phi.apply_inverse(&x.inverse())?;
    maps_into_conjugate(s, &phi.backward, e0, which, &y)
}

#[derive(Clone, Debug)]
pub struct ExtendedIsometry {
    pub phi: Automorphism,
    pub base_edge: TreeEdge,
    pub witness: Word,
}

impl ExtendedIsometry {
    /// Builds the isometry after certifying the witness.
    pub fn new(s: &Splitting, phi: Automorphism, base_edge: TreeEdge, witness: Word) -> Result<Self> {
        let iso = ExtendedIsometry::unchecked(phi, base_edge, witness);
        if let Some(reason) = iso.certification_failure(s)? {
            return Err(Error::Certification(reason));
        }
        Ok(iso)
    }

    /// No certification; used for negative controls.
    pub fn unchecked(phi: Automorphism, base_edge: TreeEdge, witness: Word) -> Self {
        ExtendedIsometry {
            phi,
            base_edge,
            witness,
        }
    }

    /// Conjugation by `w`, with witness `w` on the base edge.
    pub fn inner(s: &Splitting, w: &Word) -> Result<Self> {
        let phi = Automorphism::inner(s.whole(), w)?;
        ExtendedIsometry::new(s, phi, tree::base_edge(), w.clone())
    }

    pub fn identity(s: &Splitting) -> Self {
        ExtendedIsometry::unchecked(Automorphism::identity(s.whole()), tree::base_edge(), Word::identity())
    }

    /// `None` when all conditions hold, otherwise the first failed one.
    pub fn certification_failure(&self, s: &Splitting) -> Result<Option<String>> {
        let e0 = &self.base_edge.rep;
        for which in Stabilizer::ALL {
            if !conjugates_stabilizer(s, &self.phi, e0, which, &self.witness)? {
                return Ok(Some(format!(
                    "witness {} does not conjugate {} onto its image",
                    self.witness,
                    which.name()
                )));
            }
        }
        if s.is_hnn() {
            // Both endpoints lie in one orbit; the images computed through
            // either must agree.
            let shift = Word::product([e0, &stable_inverse(s), &e0.inverse()]);
            let via_first = TreeVertex {
                kind: VertexKind::V,
                rep: Word::product([&self.phi.apply(&shift)?, &self.witness, e0]),
            };
            let direct = TreeVertex {
                kind: VertexKind::V,
                rep: Word::product([&self.witness, &shift, e0]),
            };
            if !vertex_equal(s, &via_first, &direct)? {
                return Ok(Some(format!(
                    "witness {} maps the second endpoint inconsistently",
                    self.witness
                )));
            }
        }
        Ok(None)
    }

    pub fn apply_vertex(&self, s: &Splitting, v: &TreeVertex) -> Result<TreeVertex> {
        let e0 = &self.base_edge.rep;
        let g = v.rep.concat(&e0.inverse());
        let rep = Word::product([&self.phi.apply(&g)?, &self.witness, e0]);
        tree::normalize_vertex(s, v.kind, &rep)
    }

    pub fn apply_edge(&self, s: &Splitting, e: &TreeEdge) -> Result<TreeEdge> {
        let e0 = &self.base_edge.rep;
        let g = e.rep.concat(&e0.inverse());
        let rep = Word::product([&self.phi.apply(&g)?, &self.witness, e0]);
        tree::normalize_edge(s, &rep)
    }

    /// Inverse isometry, with witness `φ⁻¹(x⁻¹)`.
    pub fn invert(&self, s: &Splitting) -> Result<Self> {
        let witness = self.phi.apply_inverse(&self.witness.inverse())?;
        ExtendedIsometry::new(s, self.phi.inverse(), self.base_edge.clone(), witness)
    }

    /// `self ∘ inner`, with witness `φ_self(x_inner)·x_self`.
    pub fn compose(&self, s: &Splitting, inner: &ExtendedIsometry) -> Result<Self> {
        if !edge_equal(s, &self.base_edge, &inner.base_edge)? {
            return Err(Error::InvalidParameter(
                "composed isometries use different base edges".into(),
            ));
        }
        let witness = self.phi.apply(&inner.witness)?.concat(&self.witness);
        let phi = self.phi.compose(&inner.phi)?;
        ExtendedIsometry::new(s, phi, self.base_edge.clone(), witness)
    }
}

/// Shortlex search for a witness on the edge `base_edge`. `Ok(None)` means
/// nothing of length ≤ `bound` passed, including candidates whose membership
/// tests came back undecided.
pub fn find_witness_at(
    s: &Splitting,
    phi: &Automorphism,
    base_edge: &TreeEdge,
    bound: usize,
) -> Result<Option<ExtendedIsometry>> {
    for x in s.whole().alphabet().reduced_words(bound) {
        let iso = ExtendedIsometry::unchecked(phi.clone(), base_edge.clone(), x);
        match iso.certification_failure(s) {
            Ok(None) => return Ok(Some(iso)),
            Ok(Some(_)) | Err(Error::MembershipUnknown { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

pub fn find_witness(s: &Splitting, phi: &Automorphism, bound: usize) -> Result<Option<ExtendedIsometry>> {
    find_witness_at(s, phi, &tree::base_edge(), bound)
}

/// Checks `φ̄(g·u) = φ(g)·φ̄(u)` for every sample element and every vertex
/// and edge of the ball. Violations are reported for the first `g` in
/// sample order.
pub fn check_compatibility(
    s: &Splitting,
    iso: &ExtendedIsometry,
    ball: &TreeBall,
    sample: &[Word],
) -> Result<CheckReport> {
    let images_v = ball
        .vertex_list()
        .map(|u| iso.apply_vertex(s, u))
        .collect::<Result<Vec<_>>>()?;
    let images_e = ball
        .edge_list()
        .map(|e| iso.apply_edge(s, e))
        .collect::<Result<Vec<_>>>()?;
    let mut checked = 0usize;
    for g in sample {
        let phi_g = iso.phi.apply(g)?;
        for (u, img) in ball.vertex_list().zip(&images_v) {
            let lhs = iso.apply_vertex(s, &tree::act_vertex(s, g, u)?)?;
            let rhs = tree::act_vertex(s, &phi_g, img)?;
            if !vertex_equal(s, &lhs, &rhs)? {
                return Ok(compat_report(
                    ball,
                    sample,
                    Verdict::ViolationWitness(format!("g = {g}, u = {u}")),
                ));
            }
            checked += 1;
        }
        for (e, img) in ball.edge_list().zip(&images_e) {
            let lhs = iso.apply_edge(s, &tree::act_edge(s, g, e)?)?;
            let rhs = tree::act_edge(s, &phi_g, img)?;
            if !edge_equal(s, &lhs, &rhs)? {
                return Ok(compat_report(
                    ball,
                    sample,
                    Verdict::ViolationWitness(format!("g = {g}, e = {e}")),
                ));
            }
            checked += 1;
        }
    }
    Ok(compat_report(ball, sample, Verdict::Verified).detail(format!("{checked} (g, u) pairs agree")))
}

fn compat_report(ball: &TreeBall, sample: &[Word], verdict: Verdict) -> CheckReport {
    CheckReport::new("compatibility", verdict)
        .bound("sample", format!("{}", sample.len()))
        .bound("radius", format!("{}", ball.radius))
        .bound("transversal", format!("{}", ball.transversal_bound))
}

#[derive(Clone, Debug)]
pub enum IsometryClass {
    Elliptic { fixed: TreeVertex },
    Hyperbolic { length: usize },
    UnknownWithinBound,
}

impl IsometryClass {
    /// Minimal displacement: 0 for elliptic, the translation length otherwise.
    pub fn displacement(&self) -> Option<usize> {
        match self {
            IsometryClass::Elliptic { .. } => Some(0),
            IsometryClass::Hyperbolic { length } => Some(*length),
            IsometryClass::UnknownWithinBound => None,
        }
    }
}

/// Classifies the isometry `map` from the displacements `d(v, γv)` and
/// `d(v, γ²v)` at the probe vertex.
pub fn classify_map<F>(s: &Splitting, probe: &TreeVertex, map: F) -> Result<IsometryClass>
where
    F: Fn(&TreeVertex) -> Result<TreeVertex>,
{
    let once = map(probe)?;
    let twice = map(&once)?;
    let (d1, path) = distance_geodesic(s, probe, &once)?;
    let d2 = tree::distance(s, probe, &twice)?;
    if d2 > d1 {
        return Ok(IsometryClass::Hyperbolic { length: d2 - d1 });
    }
    if d1 % 2 != 0 {
        return Ok(IsometryClass::UnknownWithinBound);
    }
    let mid = &path[d1 / 2];
    if vertex_equal(s, &map(mid)?, mid)? {
        Ok(IsometryClass::Elliptic { fixed: mid.clone() })
    } else {
        Ok(IsometryClass::UnknownWithinBound)
    }
}

/// Classifies the action of a group element.
pub fn classify(s: &Splitting, gamma: &Word, probe: &TreeVertex) -> Result<IsometryClass> {
    s.whole().check_word(gamma)?;
    classify_map(s, probe, |v| tree::act_vertex(s, gamma, v))
}

pub fn classify_isometry(s: &Splitting, iso: &ExtendedIsometry, probe: &TreeVertex) -> Result<IsometryClass> {
    classify_map(s, probe, |v| iso.apply_vertex(s, v))
}

/// Minimum of `d(u, γu)` over the vertices of the ball.
pub fn min_displacement(s: &Splitting, gamma: &Word, ball: &TreeBall) -> Result<usize> {
    let mut best = usize::MAX;
    for u in ball.vertex_list() {
        let d = tree::distance(s, u, &tree::act_vertex(s, gamma, u)?)?;
        best = best.min(d);
        if best == 0 {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupHandle;
    use crate::splittings::{baumslag_solitar_splitting, build_splitting, EdgeImages, SplittingSpec};
    use crate::tree::{base_vertex, expand_ball};
    use crate::words::{Alphabet, GeneratorId};

    fn w(lit: &str) -> Word {
        Word::parse(lit).unwrap()
    }

    /// Genus 2 split along a₁: base F(a1, a2, b2), stable letter b1.
    fn genus2_hnn() -> Splitting {
        let base = GroupHandle::free(Alphabet::from_names(&["a1", "a2", "b2"]).unwrap());
        build_splitting(SplittingSpec::Hnn {
            base,
            stable: GeneratorId::new("b1").unwrap(),
            edge: Some(EdgeImages {
                generator: GeneratorId::new("c").unwrap(),
                first: w("a1"),
                second: w("a2 b2 a2^-1 b2^-1 a1"),
            }),
        })
        .unwrap()
    }

    fn twist(s: &Splitting, img: &str, inv: &str) -> Automorphism {
        let g = s.whole();
        let b1 = GeneratorId::new("b1").unwrap();
        Automorphism::new(
            Homomorphism::with_defaults(g, g, &[(b1, w(img))]).unwrap(),
            Homomorphism::with_defaults(g, g, &[(b1, w(inv))]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn identity_and_inner_witnesses() {
        let s = genus2_hnn();
        let id = Automorphism::identity(s.whole());
        assert!(find_witness(&s, &id, 2).unwrap().unwrap().witness.is_empty());
        let inner = Automorphism::inner(s.whole(), &w("b1 a2")).unwrap();
        let found = find_witness(&s, &inner, 2).unwrap().unwrap();
        // Any witness is b1 a2 up to the edge stabilizer on the right.
        let diff = w("b1 a2").inverse().concat(&found.witness);
        assert!(s.edge_membership(&diff, 16).unwrap().power().is_some());
    }

    #[test]
    fn twist_witness_is_edge_equivalent_to_a1_inverse() {
        let s = genus2_hnn();
        let t = twist(&s, "b1 a1", "b1 a1^-1");
        let iso = find_witness(&s, &t, 2).unwrap().unwrap();
        let diff = w("a1^-1").inverse().concat(&iso.witness);
        assert!(s.edge_membership(&diff, 16).unwrap().power().is_some());
        let a = base_vertex(&s, Side::A);
        assert!(vertex_equal(&s, &iso.apply_vertex(&s, &a).unwrap(), &a).unwrap());
        let e = tree::base_edge();
        assert!(edge_equal(&s, &iso.apply_edge(&s, &e).unwrap(), &e).unwrap());
    }

    #[test]
    fn compatibility_and_negative_control() {
        let s = genus2_hnn();
        let t = twist(&s, "b1 a1", "b1 a1^-1");
        let iso = find_witness(&s, &t, 2).unwrap().unwrap();
        let ball = expand_ball(&s, &base_vertex(&s, Side::A), 2, 1).unwrap();
        let sample: Vec<Word> = s.whole().alphabet().reduced_words(2).collect();
        assert_eq!(
            check_compatibility(&s, &iso, &ball, &sample).unwrap().verdict,
            Verdict::Verified
        );
        let bad = ExtendedIsometry::unchecked(t, tree::base_edge(), iso.witness.concat(&w("b1")));
        assert!(bad.certification_failure(&s).unwrap().is_some());
        assert!(check_compatibility(&s, &bad, &ball, &sample).unwrap().is_violation());
    }

    #[test]
    fn invert_and_compose() {
        let s = genus2_hnn();
        let t = find_witness(&s, &twist(&s, "b1 a1", "b1 a1^-1"), 2).unwrap().unwrap();
        let c = ExtendedIsometry::inner(&s, &w("a2 b1")).unwrap();
        let ct = c.compose(&s, &t).unwrap();
        let back = ct.compose(&s, &ct.invert(&s).unwrap()).unwrap();
        let ball = expand_ball(&s, &base_vertex(&s, Side::A), 2, 1).unwrap();
        for u in ball.vertex_list() {
            assert!(vertex_equal(&s, &back.apply_vertex(&s, u).unwrap(), u).unwrap());
            let direct = ct.apply_vertex(&s, u).unwrap();
            let stepwise = c.apply_vertex(&s, &t.apply_vertex(&s, u).unwrap()).unwrap();
            assert!(vertex_equal(&s, &direct, &stepwise).unwrap());
        }
    }

    #[test]
    fn classification_examples() {
        let s = baumslag_solitar_splitting(2, 3).unwrap();
        let a = base_vertex(&s, Side::A);
        assert!(matches!(
            classify(&s, &w("x"), &a).unwrap(),
            IsometryClass::Elliptic { .. }
        ));
        assert!(matches!(
            classify(&s, &w("t"), &a).unwrap(),
            IsometryClass::Hyperbolic { length: 1 }
        ));
        let conj = classify(&s, &w("x t x t^-1 x^-1"), &a).unwrap();
        assert!(matches!(conj, IsometryClass::Elliptic { .. }));
        let ball = expand_ball(&s, &a, 3, 3).unwrap();
        assert_eq!(min_displacement(&s, &w("t x"), &ball).unwrap(), 1);
        assert_eq!(min_displacement(&s, &w("t x t"), &ball).unwrap(), 2);
    }
}
