//! The session config: an INI-like file of `[group <name>]`,
//! `[splitting <name>]`, `[automorphism <name>]` and `[bounds]` sections
//! with `key = value` lines. Values that denote words use the word literal
//! syntax (`t x^2 t^-1`, `1` for the identity).
//!
//! ```text
//! [group X]
//! kind = free
//! generators = x
//!
//! [splitting bs23]
//! kind = hnn
//! base = X
//! stable = t
//! edge = c
//! first = x^2
//! second = x^3
//!
//! [automorphism conj]
//! on = bs23
//! kind = inner
//! conjugator = t x
//! ```

use std::collections::BTreeMap;
use std::fmt;

use bstree_core::groups::{Automorphism, GroupHandle, Homomorphism};
use bstree_core::splittings::{build_splitting_with, BuildOptions, EdgeImages, Splitting, SplittingSpec};
use bstree_core::surfaces::{dehn_twist, split_along_curve, CurveSpec, SplittingWitness};
use bstree_core::{Alphabet, GeneratorId, Word};

/// A problem in the config, located by 1-based line number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Every error found, in line order.
#[derive(Clone, Debug, thiserror::Error)]
#[error("{}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct ConfigErrors(pub Vec<ConfigError>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub word: usize,
    pub radius: usize,
    pub transversal: usize,
    pub witness: usize,
    pub power: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            word: 2,
            radius: 2,
            transversal: 1,
            witness: 2,
            power: 16,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SplittingEntry {
    pub splitting: Splitting,
    /// Present for `kind = surface`.
    pub surface: Option<SplittingWitness>,
}

#[derive(Clone, Debug)]
pub struct AutomorphismEntry {
    /// Name of the splitting whose group it acts on.
    pub on: String,
    pub phi: Automorphism,
}

#[derive(Clone, Debug, Default)]
pub struct Session {
    pub groups: BTreeMap<String, GroupHandle>,
    pub splittings: BTreeMap<String, SplittingEntry>,
    pub automorphisms: BTreeMap<String, AutomorphismEntry>,
    pub bounds: Bounds,
    pub seed: u64,
}

impl Session {
    /// A group by name, falling back to the group of a splitting.
    pub fn group(&self, name: &str) -> Option<&GroupHandle> {
        self.groups
            .get(name)
            .or_else(|| self.splittings.get(name).map(|s| s.splitting.whole()))
    }
}

struct Section {
    kind: String,
    name: Option<String>,
    line: usize,
    entries: Vec<(String, String, usize)>,
}

impl Section {
    fn get(&self, key: &str) -> Option<(&str, usize)> {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_str(), *l))
    }
}

struct Ctx {
    errors: Vec<ConfigError>,
}

impl Ctx {
    fn err(&mut self, line: usize, message: impl Into<String>) {
        self.errors.push(ConfigError {
            line,
            message: message.into(),
        });
    }

    fn required<'a>(&mut self, s: &'a Section, key: &str) -> Option<(&'a str, usize)> {
        let found = s.get(key);
        if found.is_none() {
            self.err(s.line, format!("missing key `{key}`"));
        }
        found
    }

    fn reject_unknown(&mut self, s: &Section, allowed: &[&str], prefixes: &[&str]) {
        for (k, _, line) in &s.entries {
            let ok = allowed.contains(&k.as_str()) || prefixes.iter().any(|p| k.starts_with(p));
            if !ok {
                self.err(*line, format!("unknown key `{k}` in [{}]", s.kind));
            }
        }
    }

    fn int<T: std::str::FromStr>(&mut self, value: &str, line: usize, key: &str) -> Option<T> {
        match value.parse() {
            Ok(v) => Some(v),
            Err(_) => {
                self.err(line, format!("`{key}` must be an integer, got `{value}`"));
                None
            }
        }
    }

    fn positive(&mut self, value: &str, line: usize, key: &str) -> Option<usize> {
        let v: usize = self.int(value, line, key)?;
        if v == 0 {
            self.err(line, format!("`{key}` must be positive"));
            return None;
        }
        Some(v)
    }

    fn word(&mut self, value: &str, line: usize) -> Option<Word> {
        match Word::parse(value) {
            Ok(w) => Some(w),
            Err(e) => {
                self.err(line, e.to_string());
                None
            }
        }
    }

    fn generator(&mut self, value: &str, line: usize) -> Option<GeneratorId> {
        match GeneratorId::new(value.trim()) {
            Ok(g) => Some(g),
            Err(e) => {
                self.err(line, e.to_string());
                None
            }
        }
    }

    fn core<T>(&mut self, line: usize, r: bstree_core::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.err(line, e.to_string());
                None
            }
        }
    }
}

fn lex(text: &str, ctx: &mut Ctx) -> Vec<Section> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(header) = content.strip_prefix('[') {
            let Some(header) = header.strip_suffix(']') else {
                ctx.err(line, "unterminated section header");
                continue;
            };
            let mut parts = header.split_whitespace();
            let kind = parts.next().unwrap_or("").to_string();
            let name = parts.next().map(str::to_string);
            if parts.next().is_some() {
                ctx.err(line, "section header takes at most a kind and a name");
            }
            match (kind.as_str(), &name) {
                ("group" | "splitting" | "automorphism", None) => ctx.err(line, format!("[{kind}] needs a name")),
                ("bounds", Some(_)) => ctx.err(line, "[bounds] takes no name"),
                ("group" | "splitting" | "automorphism" | "bounds", _) => {}
                _ => ctx.err(line, format!("unknown section kind `{kind}`")),
            }
            sections.push(Section {
                kind,
                name,
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            ctx.err(line, "expected `key = value`");
            continue;
        };
        let Some(section) = sections.last_mut() else {
            ctx.err(line, "key outside of any section");
            continue;
        };
        let key = key.trim().to_string();
        if section.entries.iter().any(|(k, _, _)| *k == key) {
            ctx.err(line, format!("duplicate key `{key}`"));
            continue;
        }
        section.entries.push((key, value.trim().to_string(), line));
    }
    sections
}

pub fn parse_config(text: &str) -> Result<Session, ConfigErrors> {
    let mut ctx = Ctx { errors: Vec::new() };
    let sections = lex(text, &mut ctx);
    let mut session = Session::default();
    let mut seen: BTreeMap<(String, String), usize> = BTreeMap::new();
    for s in &sections {
        if let Some(name) = &s.name {
            if let Some(first) = seen.insert((s.kind.clone(), name.clone()), s.line) {
                ctx.err(s.line, format!("{} `{name}` already defined on line {first}", s.kind));
            }
        }
    }
    for s in sections.iter().filter(|s| s.kind == "bounds") {
        parse_bounds(s, &mut session, &mut ctx);
    }
    for s in sections.iter().filter(|s| s.kind == "group") {
        if let (Some(name), Some(g)) = (&s.name, parse_group(s, &mut ctx)) {
            session.groups.insert(name.clone(), g);
        }
    }
    for s in sections.iter().filter(|s| s.kind == "splitting") {
        if let (Some(name), Some(e)) = (&s.name, parse_splitting(s, &session, &mut ctx)) {
            session.splittings.insert(name.clone(), e);
        }
    }
    for s in sections.iter().filter(|s| s.kind == "automorphism") {
        if let (Some(name), Some(a)) = (&s.name, parse_automorphism(s, &session, &mut ctx)) {
            session.automorphisms.insert(name.clone(), a);
        }
    }
    if ctx.errors.is_empty() {
        Ok(session)
    } else {
        ctx.errors.sort_by_key(|e| e.line);
        Err(ConfigErrors(ctx.errors))
    }
}

fn parse_bounds(s: &Section, session: &mut Session, ctx: &mut Ctx) {
    ctx.reject_unknown(s, &["word", "radius", "transversal", "witness", "power", "seed"], &[]);
    let b = &mut session.bounds;
    if let Some((v, l)) = s.get("word") {
        b.word = ctx.int(v, l, "word").unwrap_or(b.word);
    }
    if let Some((v, l)) = s.get("radius") {
        b.radius = ctx.int(v, l, "radius").unwrap_or(b.radius);
    }
    if let Some((v, l)) = s.get("transversal") {
        b.transversal = ctx.positive(v, l, "transversal").unwrap_or(b.transversal);
    }
    if let Some((v, l)) = s.get("witness") {
        b.witness = ctx.int(v, l, "witness").unwrap_or(b.witness);
    }
    if let Some((v, l)) = s.get("power") {
        b.power = ctx.positive(v, l, "power").map(|p| p as u64).unwrap_or(b.power);
    }
    if let Some((v, l)) = s.get("seed") {
        session.seed = ctx.int(v, l, "seed").unwrap_or(0);
    }
}

fn generator_list(value: &str, line: usize, ctx: &mut Ctx) -> Option<Alphabet> {
    let mut gens = Vec::new();
    for name in value.split_whitespace() {
        gens.push(ctx.generator(name, line)?);
    }
    ctx.core(line, Alphabet::new(gens))
}

fn parse_group(s: &Section, ctx: &mut Ctx) -> Option<GroupHandle> {
    ctx.reject_unknown(s, &["kind", "generators", "rank", "genus", "p", "q", "relators"], &[]);
    let (kind, kline) = ctx.required(s, "kind")?;
    let named = |ctx: &mut Ctx, default: Vec<String>| -> Option<Alphabet> {
        match s.get("generators") {
            Some((v, l)) => generator_list(v, l, ctx),
            None => generator_list(&default.join(" "), s.line, ctx),
        }
    };
    let rank_names = |ctx: &mut Ctx| -> Option<Vec<String>> {
        match s.get("rank") {
            Some((v, l)) => {
                let n: usize = ctx.int(v, l, "rank")?;
                Some((1..=n).map(|i| format!("x{i}")).collect())
            }
            None if s.get("generators").is_some() => Some(Vec::new()),
            None => {
                ctx.err(s.line, "give `generators` or `rank`");
                None
            }
        }
    };
    let group = match kind {
        "free" => {
            let names = rank_names(ctx)?;
            GroupHandle::free(named(ctx, names)?)
        }
        "free-abelian" => {
            let names = rank_names(ctx)?;
            let alphabet = named(ctx, names)?;
            ctx.core(kline, GroupHandle::free_abelian(alphabet))?
        }
        "surface" => {
            let (v, l) = ctx.required(s, "genus")?;
            let genus: u32 = ctx.int(v, l, "genus")?;
            let names = (1..=genus).flat_map(|i| [format!("a{i}"), format!("b{i}")]).collect();
            let alphabet = named(ctx, names)?;
            if alphabet.len() != 2 * genus as usize {
                ctx.err(l, format!("genus {genus} needs {} generators", 2 * genus));
                return None;
            }
            ctx.core(kline, GroupHandle::surface(alphabet))?
        }
        "baumslag-solitar" => {
            let (pv, pl) = ctx.required(s, "p")?;
            let (qv, ql) = ctx.required(s, "q")?;
            let p: i64 = ctx.int(pv, pl, "p")?;
            let q: i64 = ctx.int(qv, ql, "q")?;
            let alphabet = named(ctx, vec!["x".into(), "t".into()])?;
            if alphabet.len() != 2 {
                ctx.err(kline, "baumslag-solitar groups take two generators `x t`");
                return None;
            }
            let gens = alphabet.generators();
            ctx.core(kline, GroupHandle::baumslag_solitar(p, q, gens[0], gens[1]))?
        }
        other => {
            ctx.err(kline, format!("unknown group kind `{other}`"));
            return None;
        }
    };
    if let Some((v, l)) = s.get("relators") {
        for lit in v.split(',') {
            let w = ctx.word(lit, l)?;
            match group.is_identity(&w) {
                Ok(true) => {}
                Ok(false) => ctx.err(l, format!("relator `{w}` is not trivial in a {kind} group")),
                Err(e) => ctx.err(l, e.to_string()),
            }
        }
    }
    Some(group)
}

fn group_ref<'a>(s: &Section, key: &str, session: &'a Session, ctx: &mut Ctx) -> Option<&'a GroupHandle> {
    let (name, line) = ctx.required(s, key)?;
    let g = session.groups.get(name);
    if g.is_none() {
        ctx.err(line, format!("undefined group `{name}`"));
    }
    g
}

fn edge_images(s: &Section, ctx: &mut Ctx) -> Option<Option<EdgeImages>> {
    match (s.get("first"), s.get("second")) {
        (None, None) => {
            if let Some((_, l)) = s.get("edge") {
                ctx.err(l, "`edge` needs `first` and `second`");
                return None;
            }
            Some(None)
        }
        (Some((f, fl)), Some((g, gl))) => {
            let generator = match s.get("edge") {
                Some((v, l)) => ctx.generator(v, l)?,
                None => ctx.generator("c", s.line)?,
            };
            let first = ctx.word(f, fl)?;
            let second = ctx.word(g, gl)?;
            Some(Some(EdgeImages {
                generator,
                first,
                second,
            }))
        }
        _ => {
            ctx.err(s.line, "give both `first` and `second` or neither");
            None
        }
    }
}

fn parse_curve(value: &str, line: usize, ctx: &mut Ctx) -> Option<CurveSpec> {
    if value == "nonseparating" {
        return Some(CurveSpec::NonSeparating);
    }
    if let Some(h) = value.strip_prefix("separating:") {
        return ctx.int(h, line, "curve").map(CurveSpec::Separating);
    }
    ctx.err(
        line,
        format!("curve must be `separating:h` or `nonseparating`, got `{value}`"),
    );
    None
}

fn parse_splitting(s: &Section, session: &Session, ctx: &mut Ctx) -> Option<SplittingEntry> {
    ctx.reject_unknown(
        s,
        &[
            "kind",
            "a",
            "b",
            "base",
            "stable",
            "edge",
            "first",
            "second",
            "genus",
            "curve",
            "p",
            "q",
            "membership",
        ],
        &[],
    );
    let (kind, kline) = ctx.required(s, "kind")?;
    let mut opts = BuildOptions::default();
    if let Some((v, l)) = s.get("membership") {
        opts.membership_bound = ctx.positive(v, l, "membership")? as u64;
    }
    let built = match kind {
        "amalgam" => {
            let a = group_ref(s, "a", session, ctx).cloned();
            let b = group_ref(s, "b", session, ctx).cloned();
            let edge = edge_images(s, ctx)?;
            let spec = SplittingSpec::Amalgam { a: a?, b: b?, edge };
            ctx.core(kline, build_splitting_with(spec, opts))?
        }
        "hnn" => {
            let base = group_ref(s, "base", session, ctx).cloned();
            let (sv, sl) = ctx.required(s, "stable")?;
            let stable = ctx.generator(sv, sl)?;
            let edge = edge_images(s, ctx)?;
            let spec = SplittingSpec::Hnn {
                base: base?,
                stable,
                edge,
            };
            ctx.core(kline, build_splitting_with(spec, opts))?
        }
        "baumslag-solitar" => {
            let (pv, pl) = ctx.required(s, "p")?;
            let (qv, ql) = ctx.required(s, "q")?;
            let p: i64 = ctx.int(pv, pl, "p")?;
            let q: i64 = ctx.int(qv, ql, "q")?;
            let x = ctx.generator("x", kline)?;
            let spec = SplittingSpec::Hnn {
                base: GroupHandle::free(ctx.core(kline, Alphabet::new(vec![x]))?),
                stable: ctx.generator("t", kline)?,
                edge: Some(EdgeImages {
                    generator: ctx.generator("c", kline)?,
                    first: Word::power(x, p),
                    second: Word::power(x, q),
                }),
            };
            ctx.core(kline, build_splitting_with(spec, opts))?
        }
        "surface" => {
            let (gv, gl) = ctx.required(s, "genus")?;
            let genus: u32 = ctx.int(gv, gl, "genus")?;
            let (cv, cl) = ctx.required(s, "curve")?;
            let curve = parse_curve(cv, cl, ctx)?;
            let witness = ctx.core(kline, split_along_curve(genus, curve))?;
            return Some(SplittingEntry {
                splitting: witness.splitting.clone(),
                surface: Some(witness),
            });
        }
        other => {
            ctx.err(kline, format!("unknown splitting kind `{other}`"));
            return None;
        }
    };
    Some(SplittingEntry {
        splitting: built,
        surface: None,
    })
}

fn parse_automorphism(s: &Section, session: &Session, ctx: &mut Ctx) -> Option<AutomorphismEntry> {
    ctx.reject_unknown(s, &["on", "kind", "conjugator"], &["forward.", "backward."]);
    let (on, oline) = ctx.required(s, "on")?;
    let Some(entry) = session.splittings.get(on) else {
        ctx.err(oline, format!("undefined splitting `{on}`"));
        return None;
    };
    let g = entry.splitting.whole();
    let (kind, kline) = ctx.required(s, "kind")?;
    let phi = match kind {
        "identity" => Automorphism::identity(g),
        "inner" => {
            let (v, l) = ctx.required(s, "conjugator")?;
            let w = ctx.word(v, l)?;
            ctx.core(l, Automorphism::inner(g, &w))?
        }
        "dehn-twist" => {
            let Some(witness) = &entry.surface else {
                ctx.err(
                    kline,
                    format!("dehn-twist needs a surface splitting, `{on}` is not one"),
                );
                return None;
            };
            let twist = ctx.core(kline, dehn_twist(witness.genus, witness.curve))?;
            ctx.core(kline, witness.transport(&twist))?
        }
        "map" => {
            let mut maps = Vec::new();
            for prefix in ["forward.", "backward."] {
                let mut images = Vec::new();
                for (k, v, l) in &s.entries {
                    if let Some(gen) = k.strip_prefix(prefix) {
                        let gen = ctx.generator(gen, *l)?;
                        images.push((gen, ctx.word(v, *l)?));
                    }
                }
                maps.push(ctx.core(kline, Homomorphism::with_defaults(g, g, &images))?);
            }
            let backward = maps.pop()?;
            let forward = maps.pop()?;
            ctx.core(kline, Automorphism::new(forward, backward))?
        }
        other => {
            ctx.err(kline, format!("unknown automorphism kind `{other}`"));
            return None;
        }
    };
    Some(AutomorphismEntry {
        on: on.to_string(),
        phi,
    })
}
