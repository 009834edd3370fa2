//! Text front end: infix expressions over a domain, plus the declarative
//! domain, morphism, and finite-space file formats.
//!
//! Grammar for expressions: `+ - * / ^` with the usual precedence, `^`
//! binding tightest with an integer exponent, names matching
//! `[a-zA-Z][a-zA-Z0-9_]*`, integer literals of any size. Parsing, then
//! printing, then parsing again is a fixed point.

use std::collections::BTreeMap;

use crate::degree::Degree;
use crate::domain::{Domain, Morphism};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::section::{ParameterSystem, Section};
use crate::sheaf::{FinAlg, FinPresheaf, FiniteSpace};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(src[start..i].to_string())));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Tok::Name(src[start..i].to_string())));
            }
            _ => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(out)
}

/// The identifiers occurring in an expression, in order of appearance.
pub fn identifiers(src: &str) -> Result<Vec<String>> {
    let mut out: Vec<String> = Vec::new();
    for (_, t) in tokenize(src)? {
        if let Tok::Name(n) = t {
            if !out.contains(&n) {
                out.push(n);
            }
        }
    }
    Ok(out)
}

struct Parser<'a, S: Scalar> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    domain: &'a Domain,
    _marker: std::marker::PhantomData<S>,
}

impl<'a, S: Scalar> Parser<'a, S> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(usize::MAX)
    }

    fn expr(&mut self) -> Result<Section<S>> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?)?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Section<S>> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.factor()?)?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = acc.mul(&rhs.invert()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Section<S>> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            return Ok(self.factor()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Section<S>> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let neg = if let Some(Tok::Minus) = self.peek() {
                self.bump();
                true
            } else {
                false
            };
            let pos = self.here();
            match self.bump() {
                Some((_, Tok::Int(digits))) => {
                    let e: u32 = digits.parse().map_err(|_| Error::Parse {
                        pos,
                        msg: "exponent too large".into(),
                    })?;
                    if neg {
                        Ok(base.invert()?.pow(e))
                    } else {
                        Ok(base.pow(e))
                    }
                }
                _ => Err(Error::Parse {
                    pos,
                    msg: "expected integer exponent after `^`".into(),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Section<S>> {
        let pos = self.here();
        match self.bump() {
            Some((_, Tok::Int(digits))) => {
                let mut acc = S::zero();
                let ten = S::from_int(10);
                for d in digits.bytes() {
                    acc = acc * ten.clone() + S::from_int((d - b'0') as i64);
                }
                Ok(Section::constant(self.domain.system(), acc))
            }
            Some((_, Tok::Name(name))) => self.domain.generator(&name),
            Some((_, Tok::LParen)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((_, Tok::RParen)) => Ok(inner),
                    _ => Err(Error::Parse {
                        pos,
                        msg: "unclosed parenthesis".into(),
                    }),
                }
            }
            _ => Err(Error::Parse {
                pos,
                msg: "expected a number, name, or parenthesized expression".into(),
            }),
        }
    }
}

/// Parses an infix expression into a section over the domain's algebra.
pub fn parse_expression<S: Scalar>(src: &str, domain: &Domain) -> Result<Section<S>> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(Error::Parse {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        domain,
        _marker: std::marker::PhantomData::<S>,
    };
    let s = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse {
            pos: p.here(),
            msg: "trailing input".into(),
        });
    }
    Ok(s)
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(k) => &line[..k],
        None => line,
    }
}

/// Parses a declarative domain file: `rank n`, optional `truncation T`,
/// optional `domain NAME`, then `coord NAME` and `param NAME BITS` lines.
pub fn parse_domain_str(src: &str) -> Result<Domain> {
    let mut rank: Option<usize> = None;
    let mut truncation: Option<usize> = None;
    let mut name = "main".to_string();
    let mut coords: Vec<String> = Vec::new();
    let mut params: Vec<(String, Degree)> = Vec::new();
    for raw in src.lines() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "rank" if words.len() == 2 => {
                rank = Some(words[1].parse().map_err(|_| {
                    Error::Declaration(format!("invalid rank `{}`", words[1]))
                })?);
            }
            "truncation" if words.len() == 2 => {
                truncation = Some(words[1].parse().map_err(|_| {
                    Error::Declaration(format!("invalid truncation `{}`", words[1]))
                })?);
            }
            "domain" if words.len() == 2 => name = words[1].to_string(),
            "coord" if words.len() == 2 => coords.push(words[1].to_string()),
            "param" if words.len() == 3 => {
                params.push((words[1].to_string(), Degree::parse(words[2])?));
            }
            _ => {
                return Err(Error::Declaration(format!(
                    "unrecognized declaration `{line}`"
                )))
            }
        }
    }
    let rank = rank.ok_or_else(|| Error::Declaration("missing `rank` line".into()))?;
    let system = ParameterSystem::new(rank, coords, params, truncation)?;
    Ok(Domain::new(name, system))
}

/// Serializes a domain in the declarative format.
pub fn domain_to_str(domain: &Domain) -> String {
    let sys = domain.system();
    let mut out = format!("rank {}\ntruncation {}\ndomain {}\n", sys.rank(), sys.truncation(), domain.name());
    for c in sys.coord_vars().names() {
        out.push_str(&format!("coord {c}\n"));
    }
    for i in 0..sys.param_count() {
        out.push_str(&format!("param {} {}\n", sys.param_name(i), sys.param_degree(i)));
    }
    out
}

/// Parses a morphism file against already-loaded source and target domains:
/// `target_symbol := expression-over-source` lines.
pub fn parse_morphism_str<S: Scalar>(
    src: &str,
    source: &Domain,
    target: &Domain,
) -> Result<Morphism<S>> {
    let mut images: BTreeMap<String, Section<S>> = BTreeMap::new();
    for raw in src.lines() {
        let line = strip_comment(raw).trim();
        if line.is_empty() || line.starts_with("source") || line.starts_with("target") {
            continue;
        }
        let Some((lhs, rhs)) = line.split_once(":=") else {
            return Err(Error::Declaration(format!(
                "expected `symbol := expression`, got `{line}`"
            )));
        };
        let symbol = lhs.trim().to_string();
        if images.contains_key(&symbol) {
            return Err(Error::Declaration(format!("duplicate image for `{symbol}`")));
        }
        images.insert(symbol, parse_expression(rhs.trim(), source)?);
    }
    Morphism::from_images(source.clone(), target.clone(), &images)
}

/// The `source`/`target` file references of a morphism file.
pub fn morphism_file_refs(src: &str) -> Result<(String, String)> {
    let mut source = None;
    let mut target = None;
    for raw in src.lines() {
        let line = strip_comment(raw).trim();
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.len() == 2 && words[0] == "source" {
            source = Some(words[1].to_string());
        }
        if words.len() == 2 && words[0] == "target" {
            target = Some(words[1].to_string());
        }
    }
    match (source, target) {
        (Some(s), Some(t)) => Ok((s, t)),
        _ => Err(Error::Declaration(
            "morphism file needs `source FILE` and `target FILE` lines".into(),
        )),
    }
}

fn builtin_alg(name: &str) -> Result<FinAlg> {
    match name {
        "zero" => Ok(FinAlg::zero_ring()),
        "z2" => Ok(FinAlg::cyclic(2)),
        "z3" => Ok(FinAlg::cyclic(3)),
        "z4" => Ok(FinAlg::cyclic(4)),
        "z2xz2" => Ok(FinAlg::product(&FinAlg::cyclic(2), &FinAlg::cyclic(2))),
        _ => Err(Error::Declaration(format!("unknown algebra `{name}`"))),
    }
}

/// A parsed finite-space file: the presheaf plus optional gluing data
/// (cover member names and transition tables).
pub struct SpaceFile {
    pub presheaf: FinPresheaf,
    pub open_names: BTreeMap<String, usize>,
    pub cover: Vec<usize>,
    /// `(i, j, open id) -> table` over cover positions.
    pub transitions: BTreeMap<(usize, usize, usize), Vec<usize>>,
}

/// Parses the declarative finite-space format: `points`, named `open`
/// lines, optional `basis`, `alg OPEN NAME`, `res FROM TO TABLE|id`, and
/// optional `cover` plus `transition FROM TO OPEN TABLE` lines.
pub fn parse_space_str(src: &str) -> Result<SpaceFile> {
    let mut points: Vec<String> = Vec::new();
    let mut open_defs: Vec<(String, Vec<String>)> = Vec::new();
    let mut basis_names: Option<Vec<String>> = None;
    let mut alg_lines: Vec<(String, String)> = Vec::new();
    let mut res_lines: Vec<(String, String, Vec<String>)> = Vec::new();
    let mut cover_names: Vec<String> = Vec::new();
    let mut transition_lines: Vec<(String, String, String, Vec<usize>)> = Vec::new();

    for raw in src.lines() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "points" => points = words[1..].iter().map(|s| s.to_string()).collect(),
            "open" if words.len() >= 2 => open_defs.push((
                words[1].to_string(),
                words[2..].iter().map(|s| s.to_string()).collect(),
            )),
            "basis" => basis_names = Some(words[1..].iter().map(|s| s.to_string()).collect()),
            "alg" if words.len() == 3 => {
                alg_lines.push((words[1].to_string(), words[2].to_string()))
            }
            "res" if words.len() >= 4 => res_lines.push((
                words[1].to_string(),
                words[2].to_string(),
                words[3..].iter().map(|s| s.to_string()).collect(),
            )),
            "cover" => cover_names = words[1..].iter().map(|s| s.to_string()).collect(),
            "transition" if words.len() >= 4 => {
                let table = words[4..]
                    .iter()
                    .map(|w| {
                        w.parse::<usize>().map_err(|_| {
                            Error::Declaration(format!("invalid transition entry `{w}`"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                transition_lines.push((
                    words[1].to_string(),
                    words[2].to_string(),
                    words[3].to_string(),
                    table,
                ));
            }
            _ => {
                return Err(Error::Declaration(format!(
                    "unrecognized declaration `{line}`"
                )))
            }
        }
    }

    if points.is_empty() {
        return Err(Error::Declaration("missing `points` line".into()));
    }
    let point_index = |name: &str| -> Result<usize> {
        points
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| Error::Declaration(format!("unknown point `{name}`")))
    };
    let mut masks = Vec::new();
    let mut open_names: BTreeMap<String, u32> = BTreeMap::new();
    for (name, members) in &open_defs {
        let mut mask = 0u32;
        for m in members {
            mask |= 1 << point_index(m)?;
        }
        if open_names.insert(name.clone(), mask).is_some() {
            return Err(Error::Declaration(format!("duplicate open `{name}`")));
        }
        masks.push(mask);
    }
    let named_mask = |name: &str| -> Result<u32> {
        open_names
            .get(name)
            .copied()
            .ok_or_else(|| Error::Declaration(format!("unknown open `{name}`")))
    };

    let space = FiniteSpace::new(points.clone(), masks, None)?;
    let basis_ids = match &basis_names {
        None => None,
        Some(names) => Some(
            names
                .iter()
                .map(|n| Ok(space.open_id(named_mask(n)?).expect("declared open")))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    let space = FiniteSpace::new(
        points.clone(),
        (0..space.n_opens()).map(|u| space.open_mask(u)).collect(),
        basis_ids,
    )?;

    let mut algs: Vec<Option<FinAlg>> = vec![None; space.n_opens()];
    for (open, alg) in &alg_lines {
        let id = space.open_id(named_mask(open)?).expect("declared open");
        algs[id] = Some(builtin_alg(alg)?);
    }
    let algs = algs
        .into_iter()
        .enumerate()
        .map(|(u, a)| {
            a.ok_or_else(|| {
                Error::Declaration(format!("missing `alg` declaration for open #{u}"))
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut res = BTreeMap::new();
    for (from, to, words) in &res_lines {
        let f = space.open_id(named_mask(from)?).expect("open");
        let t = space.open_id(named_mask(to)?).expect("open");
        let table: Vec<usize> = if words.len() == 1 && words[0] == "id" {
            (0..algs[f].size()).collect()
        } else {
            words
                .iter()
                .map(|w| {
                    w.parse::<usize>()
                        .map_err(|_| Error::Declaration(format!("invalid table entry `{w}`")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        res.insert((f, t), table);
    }
    let presheaf = FinPresheaf::new(space.clone(), algs, res)?;

    let mut name_ids = BTreeMap::new();
    for (name, mask) in &open_names {
        name_ids.insert(name.clone(), space.open_id(*mask).expect("open"));
    }
    let cover = cover_names
        .iter()
        .map(|n| Ok(space.open_id(named_mask(n)?).expect("open")))
        .collect::<Result<Vec<_>>>()?;
    let mut transitions = BTreeMap::new();
    for (from, to, open, table) in transition_lines {
        let fi = cover_names
            .iter()
            .position(|n| *n == from)
            .ok_or_else(|| Error::Declaration(format!("`{from}` is not in the cover")))?;
        let ti = cover_names
            .iter()
            .position(|n| *n == to)
            .ok_or_else(|| Error::Declaration(format!("`{to}` is not in the cover")))?;
        let oid = space.open_id(named_mask(&open)?).expect("open");
        transitions.insert((fi, ti, oid), table);
    }

    Ok(SpaceFile {
        presheaf,
        open_names: name_ids,
        cover,
        transitions,
    })
}
