//! The Bass–Serre tree of a splitting, as a lazy coset space.
//!
//! Vertices are left cosets of the vertex groups and edges are left cosets
//! of the edge group. For an amalgam the base edge `C` joins `A` and `B`;
//! for an HNN extension it joins `A` and `t⁻¹A`. Representatives are kept in
//! a normalized form (trailing stabilizer syllable stripped) but they are not
//! canonical: compare with [`vertex_equal`] and [`edge_equal`].

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::error::Result;
use crate::groups::CosetIndex;
use crate::splittings::{Side, Splitting, SyllableForm};
use crate::words::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    /// Cosets of `A` in an amalgam.
    A,
    /// Cosets of `B` in an amalgam.
    B,
    /// Cosets of the base group of an HNN extension.
    V,
}

impl VertexKind {
    pub fn side(self) -> Side {
        match self {
            VertexKind::B => Side::B,
            VertexKind::A | VertexKind::V => Side::A,
        }
    }
}

impl fmt::Display for VertexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VertexKind::A => "A",
            VertexKind::B => "B",
            VertexKind::V => "V",
        })
    }
}

/// The coset `rep·X` where `X` is the vertex group named by `kind`.
#[derive(Clone, Debug)]
pub struct TreeVertex {
    pub kind: VertexKind,
    pub rep: Word,
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·{}", self.rep, self.kind)
    }
}

/// The coset `rep·C`.
#[derive(Clone, Debug)]
pub struct TreeEdge {
    pub rep: Word,
}

impl fmt::Display for TreeEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·C", self.rep)
    }
}

pub fn base_vertex(s: &Splitting, side: Side) -> TreeVertex {
    let kind = if s.is_hnn() {
        VertexKind::V
    } else if side == Side::A {
        VertexKind::A
    } else {
        VertexKind::B
    };
    TreeVertex {
        kind,
        rep: Word::identity(),
    }
}

pub fn base_edge() -> TreeEdge {
    TreeEdge { rep: Word::identity() }
}

fn stable_word(s: &Splitting, exp: i64) -> Word {
    match s.stable_letter() {
        Some(t) => Word::power(t, exp),
        None => Word::identity(),
    }
}

/// Amalgam: `(rep·A, rep·B)`; HNN: `(rep·A, rep·t⁻¹·A)`.
pub fn endpoints(s: &Splitting, e: &TreeEdge) -> Result<(TreeVertex, TreeVertex)> {
    if s.is_hnn() {
        let first = normalize_vertex(s, VertexKind::V, &e.rep)?;
        let second = normalize_vertex(s, VertexKind::V, &e.rep.concat(&stable_word(s, -1)))?;
        Ok((first, second))
    } else {
        Ok((
            normalize_vertex(s, VertexKind::A, &e.rep)?,
            normalize_vertex(s, VertexKind::B, &e.rep)?,
        ))
    }
}

/// Strips a trailing syllable lying in the vertex group.
pub fn normalize_vertex(s: &Splitting, kind: VertexKind, rep: &Word) -> Result<TreeVertex> {
    let form = s.reduce(rep)?;
    let rep = match form {
        SyllableForm::Hnn {
            mut pieces,
            signs,
            stable,
            reduced,
        } => {
            pieces.pop();
            pieces.push(Word::identity());
            SyllableForm::Hnn {
                pieces,
                signs,
                stable,
                reduced,
            }
            .to_word()
        }
        SyllableForm::Amalgam { mut syllables, reduced } => {
            let strip = match syllables.as_slice() {
                [] => false,
                [(side, piece)] => {
                    *side == kind.side()
                        || s.edge_power_bounded(*side, piece, s.membership_bound())?
                            .power()
                            .is_some()
                }
                [.., (side, _)] => *side == kind.side(),
            };
            if strip {
                syllables.pop();
            }
            SyllableForm::Amalgam { syllables, reduced }.to_word()
        }
    };
    Ok(TreeVertex { kind, rep })
}

/// Strips a trailing syllable lying in the edge group.
pub fn normalize_edge(s: &Splitting, rep: &Word) -> Result<TreeEdge> {
    let bound = s.membership_bound();
    let form = s.reduce(rep)?;
    let rep = match form {
        SyllableForm::Hnn {
            mut pieces,
            signs,
            stable,
            reduced,
        } => {
            let last = pieces.last_mut().expect("nonempty");
            if s.edge_power_bounded(Side::A, last, bound)?.power().is_some() {
                *last = Word::identity();
            }
            SyllableForm::Hnn {
                pieces,
                signs,
                stable,
                reduced,
            }
            .to_word()
        }
        SyllableForm::Amalgam { mut syllables, reduced } => {
            if let Some((side, piece)) = syllables.last() {
                if s.edge_power_bounded(*side, piece, bound)?.power().is_some() {
                    syllables.pop();
                }
            }
            SyllableForm::Amalgam { syllables, reduced }.to_word()
        }
    };
    Ok(TreeEdge { rep })
}

pub fn act_vertex(s: &Splitting, g: &Word, v: &TreeVertex) -> Result<TreeVertex> {
    normalize_vertex(s, v.kind, &g.concat(&v.rep))
}

pub fn act_edge(s: &Splitting, g: &Word, e: &TreeEdge) -> Result<TreeEdge> {
    normalize_edge(s, &g.concat(&e.rep))
}

/// `g·X = h·Y` iff `X = Y` and `g⁻¹h ∈ X`.
pub fn vertex_equal(s: &Splitting, u: &TreeVertex, v: &TreeVertex) -> Result<bool> {
    if u.kind != v.kind {
        return Ok(false);
    }
    s.in_vertex_group(&u.rep.inverse().concat(&v.rep), u.kind.side())
}

pub fn edge_equal(s: &Splitting, e: &TreeEdge, f: &TreeEdge) -> Result<bool> {
    let form = s.reduce(&e.rep.inverse().concat(&f.rep))?;
    Ok(s.form_edge_membership(&form, s.membership_bound())?.power().is_some())
}

/// Whether `g` fixes `v`.
pub fn fixes_vertex(s: &Splitting, g: &Word, v: &TreeVertex) -> Result<bool> {
    let conj = Word::product([&v.rep.inverse(), g, &v.rep]);
    s.in_vertex_group(&conj, v.kind.side())
}

/// Whether `g` fixes `e`.
pub fn fixes_edge(s: &Splitting, g: &Word, e: &TreeEdge) -> Result<bool> {
    let conj = Word::product([&e.rep.inverse(), g, &e.rep]);
    let form = s.reduce(&conj)?;
    Ok(s.form_edge_membership(&form, s.membership_bound())?.power().is_some())
}

/// Distance and geodesic vertex path from `u` to `v`, both ends included.
pub fn distance_geodesic(s: &Splitting, u: &TreeVertex, v: &TreeVertex) -> Result<(usize, Vec<TreeVertex>)> {
    let rel = u.rep.inverse().concat(&v.rep);
    let form = s.reduce(&rel)?;
    let relative: Vec<(VertexKind, Word)> = match form {
        SyllableForm::Hnn {
            pieces, signs, stable, ..
        } => {
            let mut prefix = Word::identity();
            let mut path = vec![(VertexKind::V, Word::identity())];
            for (piece, sign) in pieces.iter().zip(&signs) {
                prefix.extend_unreduced(piece);
                prefix.push_run(stable, sign.value());
                path.push((VertexKind::V, prefix.clone()));
            }
            path
        }
        SyllableForm::Amalgam { mut syllables, .. } => {
            let kind_of = |side: Side| if side == Side::A { VertexKind::A } else { VertexKind::B };
            let strip = match syllables.as_slice() {
                [] => false,
                [(side, piece)] => {
                    kind_of(*side) == v.kind
                        || s.edge_power_bounded(*side, piece, s.membership_bound())?
                            .power()
                            .is_some()
                }
                [.., (side, _)] => kind_of(*side) == v.kind,
            };
            if strip {
                syllables.pop();
            }
            let mut path = Vec::with_capacity(syllables.len() + 2);
            match syllables.first() {
                None => {
                    path.push((u.kind, Word::identity()));
                    if v.kind != u.kind {
                        path.push((v.kind, Word::identity()));
                    }
                }
                Some((first, _)) => {
                    if kind_of(*first) != u.kind {
                        path.push((u.kind, Word::identity()));
                    }
                    path.push((kind_of(*first), Word::identity()));
                    let mut prefix = Word::identity();
                    for (side, piece) in &syllables {
                        prefix.extend_unreduced(piece);
                        path.push((kind_of(side.other()), prefix.clone()));
                    }
                }
            }
            path
        }
    };
    let path = relative
        .into_iter()
        .map(|(kind, w)| normalize_vertex(s, kind, &u.rep.concat(&w)))
        .collect::<Result<Vec<_>>>()?;
    Ok((path.len() - 1, path))
}

pub fn distance(s: &Splitting, u: &TreeVertex, v: &TreeVertex) -> Result<usize> {
    distance_geodesic(s, u, v).map(|(d, _)| d)
}

/// Coset representatives of a vertex group modulo an embedded edge group,
/// enumerated shortlex.
#[derive(Clone, Debug)]
pub struct Transversal {
    pub reps: Vec<Word>,
    /// Whether `reps` is known to cover every coset.
    pub complete: bool,
}

/// Transversal of `X/emb(C)` where `side` selects `A`/`B` for amalgams and
/// `emb0`/`emb1` (both in the base) for HNN extensions.
pub fn transversal(s: &Splitting, side: Side, bound: usize) -> Result<Transversal> {
    let factor = s.factor(side);
    let image = s.edge_image(side);
    let index = factor.cyclic_index(image);
    let target = match index {
        CosetIndex::Finite(n) => Some(n as usize),
        _ => None,
    };
    let mut reps: Vec<Word> = Vec::new();
    for w in factor.alphabet().reduced_words(bound) {
        if target == Some(reps.len()) {
            break;
        }
        let mut fresh = true;
        for r in &reps {
            let quotient = r.inverse().concat(&w);
            let m = s.edge_power_bounded(side, &quotient, s.membership_bound())?;
            if let crate::groups::Membership::Unknown { bound } = m {
                return Err(crate::error::Error::MembershipUnknown { bound });
            }
            if m.power().is_some() {
                fresh = false;
                break;
            }
        }
        if fresh {
            reps.push(w);
        }
    }
    let complete = target == Some(reps.len());
    Ok(Transversal { reps, complete })
}

/// The transversals needed to enumerate neighbors anywhere in the tree.
#[derive(Clone, Debug)]
pub struct Neighborhoods {
    pub a: Transversal,
    pub b: Transversal,
}

impl Neighborhoods {
    pub fn new(s: &Splitting, bound: usize) -> Result<Self> {
        Ok(Neighborhoods {
            a: transversal(s, Side::A, bound)?,
            b: transversal(s, Side::B, bound)?,
        })
    }

    /// Number of enumerated neighbors of a vertex of this kind.
    pub fn degree(&self, kind: VertexKind) -> usize {
        match kind {
            VertexKind::A => self.a.reps.len(),
            VertexKind::B => self.b.reps.len(),
            VertexKind::V => self.a.reps.len() + self.b.reps.len(),
        }
    }

    pub fn complete(&self, kind: VertexKind) -> bool {
        match kind {
            VertexKind::A => self.a.complete,
            VertexKind::B => self.b.complete,
            VertexKind::V => self.a.complete && self.b.complete,
        }
    }

    /// Enumerated `(edge, neighbor)` pairs of `v`, in shortlex order of the
    /// transversal representatives.
    pub fn neighbors(&self, s: &Splitting, v: &TreeVertex) -> Result<Vec<(TreeEdge, TreeVertex)>> {
        let mut out = Vec::with_capacity(self.degree(v.kind));
        match v.kind {
            VertexKind::A | VertexKind::B => {
                let (reps, other) = if v.kind == VertexKind::A {
                    (&self.a.reps, VertexKind::B)
                } else {
                    (&self.b.reps, VertexKind::A)
                };
                for a in reps {
                    let g = v.rep.concat(a);
                    out.push((normalize_edge(s, &g)?, normalize_vertex(s, other, &g)?));
                }
            }
            VertexKind::V => {
                let t = stable_word(s, 1);
                let t_inv = stable_word(s, -1);
                for a in &self.a.reps {
                    let g = v.rep.concat(a);
                    out.push((
                        normalize_edge(s, &g)?,
                        normalize_vertex(s, VertexKind::V, &g.concat(&t_inv))?,
                    ));
                }
                for a in &self.b.reps {
                    let g = v.rep.concat(a).concat(&t);
                    out.push((normalize_edge(s, &g)?, normalize_vertex(s, VertexKind::V, &g)?));
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct BallVertex {
    pub vertex: TreeVertex,
    pub depth: usize,
    /// Index of the parent in [`TreeBall::vertices`].
    pub parent: Option<usize>,
    /// The neighbor enumeration of this vertex was cut by the bound.
    pub truncated: bool,
}

#[derive(Clone, Debug)]
pub struct BallEdge {
    pub edge: TreeEdge,
    /// Indices of the parent and child endpoint.
    pub ends: (usize, usize),
}

/// A finite breadth-first window onto the tree.
#[derive(Clone, Debug)]
pub struct TreeBall {
    pub center: TreeVertex,
    pub radius: usize,
    pub transversal_bound: usize,
    pub vertices: Vec<BallVertex>,
    pub edges: Vec<BallEdge>,
}

impl TreeBall {
    /// True when no expanded vertex had its neighbors truncated.
    pub fn is_complete(&self) -> bool {
        self.vertices.iter().all(|v| !v.truncated)
    }

    pub fn vertex_list(&self) -> impl Iterator<Item = &TreeVertex> {
        self.vertices.iter().map(|v| &v.vertex)
    }

    pub fn edge_list(&self) -> impl Iterator<Item = &TreeEdge> {
        self.edges.iter().map(|e| &e.edge)
    }

    /// Degree of each vertex inside the ball.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for e in &self.edges {
            deg[e.ends.0] += 1;
            deg[e.ends.1] += 1;
        }
        deg
    }
}

/// What a ball visitor wants after seeing an item.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Walk {
    Continue,
    Stop,
}

/// An item reached during a breadth-first walk.
#[derive(Clone, Copy, Debug)]
pub enum Reached<'a> {
    Vertex(&'a TreeVertex, usize),
    Edge(&'a TreeEdge),
}

/// Breadth-first walk with early exit; returns the ball built so far.
pub fn walk_ball<F>(
    s: &Splitting,
    center: &TreeVertex,
    radius: usize,
    transversal_bound: usize,
    mut visit: F,
) -> Result<(TreeBall, Walk)>
where
    F: FnMut(Reached<'_>) -> Result<Walk>,
{
    let hoods = Neighborhoods::new(s, transversal_bound.max(1))?;
    let mut ball = TreeBall {
        center: center.clone(),
        radius,
        transversal_bound,
        vertices: vec![BallVertex {
            vertex: center.clone(),
            depth: 0,
            parent: None,
            truncated: false,
        }],
        edges: Vec::new(),
    };
    if visit(Reached::Vertex(center, 0))? == Walk::Stop {
        return Ok((ball, Walk::Stop));
    }
    let mut next = 0;
    while next < ball.vertices.len() {
        let idx = next;
        next += 1;
        let depth = ball.vertices[idx].depth;
        if depth == radius {
            continue;
        }
        let v = ball.vertices[idx].vertex.clone();
        let parent = ball.vertices[idx].parent.map(|p| ball.vertices[p].vertex.clone());
        ball.vertices[idx].truncated = !hoods.complete(v.kind);
        for (edge, nb) in hoods.neighbors(s, &v)? {
            if let Some(p) = &parent {
                if vertex_equal(s, p, &nb)? {
                    continue;
                }
            }
            let child = ball.vertices.len();
            ball.vertices.push(BallVertex {
                vertex: nb,
                depth: depth + 1,
                parent: Some(idx),
                truncated: false,
            });
            ball.edges.push(BallEdge {
                edge,
                ends: (idx, child),
            });
            let (e, nv) = (&ball.edges[child - 1].edge, &ball.vertices[child].vertex);
            if visit(Reached::Edge(e))? == Walk::Stop || visit(Reached::Vertex(nv, depth + 1))? == Walk::Stop {
                return Ok((ball, Walk::Stop));
            }
        }
    }
    Ok((ball, Walk::Continue))
}

/// Breadth-first materialization of the ball of the given radius.
pub fn expand_ball(s: &Splitting, center: &TreeVertex, radius: usize, transversal_bound: usize) -> Result<TreeBall> {
    walk_ball(s, center, radius, transversal_bound, |_| Ok(Walk::Continue)).map(|(b, _)| b)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DotOptions {
    /// Split every edge with a midpoint node.
    pub barycentric: bool,
}

fn quote(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz text for the ball; node order follows the breadth-first order.
pub fn export_dot(ball: &TreeBall, options: &DotOptions) -> String {
    let mut out = String::new();
    out.push_str("graph tree {\n");
    for (i, v) in ball.vertices.iter().enumerate() {
        let style = if v.truncated { ", style=dashed" } else { "" };
        let _ = writeln!(
            out,
            "  n{i} [label=\"{}: {}\"{style}];",
            v.vertex.kind,
            quote(&format!("{}", v.vertex.rep))
        );
    }
    for (i, e) in ball.edges.iter().enumerate() {
        let (a, b) = e.ends;
        if options.barycentric {
            let _ = writeln!(
                out,
                "  m{i} [label=\"C: {}\", shape=point];",
                quote(&format!("{}", e.edge.rep))
            );
            let _ = writeln!(out, "  n{a} -- m{i};");
            let _ = writeln!(out, "  m{i} -- n{b};");
        } else {
            let _ = writeln!(out, "  n{a} -- n{b};");
        }
    }
    out.push_str("}\n");
    out
}
