//! Generalised triangulations of closed 3-manifolds.
//!
//! A triangulation is a list of abstract tetrahedra whose faces are glued in
//! pairs. Face `k` of a tetrahedron is the face opposite its vertex `k`, and
//! every gluing carries the full permutation of `{0,1,2,3}` it induces on
//! tetrahedron vertices.
//!
//! Text format, one tetrahedron per line after a `tets N` header:
//!
//! ```text
//! tets 2
//! tet 0: 1:0123 1:0123 1:0123 1:0123
//! tet 1: 0:0123 0:0123 0:0123 0:0123
//! ```
//!
//! `-` marks an unglued face and `#` starts a comment.

mod families;
mod pachner;
mod perm;
mod skeleton;
mod validate;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use families::{lens_space, one_tetrahedron_s3};
pub use pachner::MoveError;
pub use perm::Perm4;
pub use skeleton::{
    edge_slot,     DualGraph, EdgeClass, EdgeEmbedding, LinkStep, Skeleton, TriangleClass, TriangleEmbedding,
    VertexClass, EDGE_SLOTS,
};
pub use validate::ValidationReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("non-involutive gluing: tet {tet} face {face} points to tet {partner} face {partner_face}, which points elsewhere")]
    NonInvolutive { tet: usize, face: usize, partner: usize, partner_face: usize },
    #[error("face glued twice: tet {tet} face {face} is the target of more than one gluing")]
    GluedTwice { tet: usize, face: usize },
    #[error("tet {tet} face {face} is glued to itself")]
    SelfGluing { tet: usize, face: usize },
    #[error("tet {tet} face {face}: vertex map {perm} does not send face {face} onto face {partner_face}")]
    BadFaceMap { tet: usize, face: usize, perm: Perm4, partner_face: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangulationError {
    #[error("triangulation is not closed: tet {tet} face {face} is unglued")]
    NotClosed { tet: usize, face: usize },
    #[error("triangulation has no tetrahedra")]
    Empty,
}

/// One side of a face pairing: the partner face and the vertex map onto it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gluing {
    pub tet: usize,
    pub face: usize,
    pub perm: Perm4,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    gluings: Vec<[Option<Gluing>; 4]>,
}

impl Triangulation {
    /// Builds a triangulation from a complete gluing table, checking the
    /// involution invariant.
    pub fn from_gluings(gluings: Vec<[Option<Gluing>; 4]>) -> Result<Self, ParseError> {
        let tri = Triangulation { gluings };
        tri.check_involution()?;
        Ok(tri)
    }

    pub fn size(&self) -> usize {
        self.gluings.len()
    }

    pub fn gluing(&self, tet: usize, face: usize) -> Option<Gluing> {
        self.gluings[tet][face]
    }

    pub fn gluings(&self) -> &[[Option<Gluing>; 4]] {
        &self.gluings
    }

    pub fn is_closed(&self) -> bool {
        self.first_unglued().is_none()
    }

    fn first_unglued(&self) -> Option<(usize, usize)> {
        self.gluings
            .iter()
            .enumerate()
            .find_map(|(t, g)| g.iter().position(Option::is_none).map(|f| (t, f)))
    }

    /// Error unless every face is glued and there is at least one tetrahedron.
    pub fn require_closed(&self) -> Result<(), TriangulationError> {
        if self.gluings.is_empty() {
            return Err(TriangulationError::Empty);
        }
        match self.first_unglued() {
            Some((tet, face)) => Err(TriangulationError::NotClosed { tet, face }),
            None => Ok(()),
        }
    }

    fn check_involution(&self) -> Result<(), ParseError> {
        let n = self.gluings.len();
        let mut claimed = vec![[false; 4]; n];
        for (t, faces) in self.gluings.iter().enumerate() {
            for (f, g) in faces.iter().enumerate() {
                let Some(g) = g else { continue };
                if g.tet >= n || g.face >= 4 {
                    return Err(ParseError::NonInvolutive { tet: t, face: f, partner: g.tet, partner_face: g.face });
                }
                if (g.tet, g.face) == (t, f) {
                    return Err(ParseError::SelfGluing { tet: t, face: f });
                }
                if g.perm.apply(f) != g.face {
                    return Err(ParseError::BadFaceMap { tet: t, face: f, perm: g.perm, partner_face: g.face });
                }
                if std::mem::replace(&mut claimed[g.tet][g.face], true) {
                    return Err(ParseError::GluedTwice { tet: g.tet, face: g.face });
                }
            }
        }
        for (t, faces) in self.gluings.iter().enumerate() {
            for (f, g) in faces.iter().enumerate() {
                let Some(g) = g else { continue };
                let back = self.gluings[g.tet][g.face];
                let expected = Gluing { tet: t, face: f, perm: g.perm.inverse() };
                if back != Some(expected) {
                    return Err(ParseError::NonInvolutive { tet: t, face: f, partner: g.tet, partner_face: g.face });
                }
            }
        }
        Ok(())
    }

    /// Line-based text serialisation, inverse of [`Triangulation::from_str`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Disjoint union, with `other`'s tetrahedra renumbered after ours.
    pub fn disjoint_union(&self, other: &Triangulation) -> Triangulation {
        let shift = self.size();
        let mut gluings = self.gluings.clone();
        gluings.extend(other.gluings.iter().map(|faces| {
            faces.map(|g| g.map(|g| Gluing { tet: g.tet + shift, ..g }))
        }));
        Triangulation { gluings }
    }

    /// Combinatorial isomorphism test (relabelling of tetrahedra and of
    /// vertices within each tetrahedron). Requires connected inputs to be
    /// conclusive; returns false for mismatched sizes.
    pub fn is_isomorphic(&self, other: &Triangulation) -> bool {
        let n = self.size();
        if n != other.size() {
            return false;
        }
        if n == 0 {
            return true;
        }
        for target in 0..n {
            for perm in Perm4::all() {
                if self.try_isomorphism(other, target, perm) {
                    return true;
                }
            }
        }
        false
    }

    fn try_isomorphism(&self, other: &Triangulation, target: usize, perm: Perm4) -> bool {
        let n = self.size();
        let mut image: Vec<Option<(usize, Perm4)>> = vec![None; n];
        let mut used = vec![false; n];
        image[0] = Some((target, perm));
        used[target] = true;
        let mut stack = vec![0usize];
        while let Some(t) = stack.pop() {
            let (t2, p) = image[t].unwrap();
            for f in 0..4 {
                let f2 = p.apply(f);
                match (self.gluings[t][f], other.gluings[t2][f2]) {
                    (None, None) => {}
                    (Some(g), Some(h)) => {
                        // vertex map of the neighbour: h ∘ p ∘ g⁻¹
                        let q = h.perm.compose(p).compose(g.perm.inverse());
                        match image[g.tet] {
                            Some((u, qq)) => {
                                if u != h.tet || qq != q {
                                    return false;
                                }
                            }
                            None => {
                                if used[h.tet] {
                                    return false;
                                }
                                used[h.tet] = true;
                                image[g.tet] = Some((h.tet, q));
                                stack.push(g.tet);
                            }
                        }
                    }
                    _ => return false,
                }
            }
        }
        image.iter().all(Option::is_some)
    }
}

impl fmt::Display for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tets {}", self.size())?;
        for (t, faces) in self.gluings.iter().enumerate() {
            write!(f, "tet {t}:")?;
            for g in faces {
                match g {
                    Some(g) => write!(f, " {}:{}", g.tet, g.perm)?,
                    None => write!(f, " -")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for Triangulation {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, ParseError> {
        parse_triangulation(text)
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, column, message: message.into() }
}

/// A whitespace-separated token with its 1-based column.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(|(s, t)| (s + 1, t))
}

pub fn parse_triangulation(text: &str) -> Result<Triangulation, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
        .filter(|(_, l)| !l.trim().is_empty());

    let (hline, header) = lines.next().ok_or_else(|| syntax(1, 1, "missing `tets N` header"))?;
    let mut toks = tokens(header);
    match toks.next() {
        Some((_, "tets")) => {}
        Some((c, other)) => return Err(syntax(hline, c, format!("expected `tets`, found {other:?}"))),
        None => return Err(syntax(hline, 1, "missing `tets N` header")),
    }
    let (c, count) = toks.next().ok_or_else(|| syntax(hline, header.len() + 1, "missing tetrahedron count"))?;
    let n: usize = count.parse().map_err(|_| syntax(hline, c, format!("bad tetrahedron count {count:?}")))?;
    if let Some((c, extra)) = toks.next() {
        return Err(syntax(hline, c, format!("unexpected token {extra:?}")));
    }

    let mut gluings: Vec<Option<[Option<Gluing>; 4]>> = vec![None; n];
    for (lno, line) in lines {
        let mut toks = tokens(line);
        match toks.next() {
            Some((_, "tet")) => {}
            Some((c, other)) => return Err(syntax(lno, c, format!("expected `tet`, found {other:?}"))),
            None => unreachable!("blank lines are filtered"),
        }
        let (c, label) = toks.next().ok_or_else(|| syntax(lno, line.len() + 1, "missing tetrahedron index"))?;
        let idx_text = label
            .strip_suffix(':')
            .ok_or_else(|| syntax(lno, c, format!("expected `i:`, found {label:?}")))?;
        let idx: usize = idx_text.parse().map_err(|_| syntax(lno, c, format!("bad tetrahedron index {idx_text:?}")))?;
        if idx >= n {
            return Err(syntax(lno, c, format!("tetrahedron index {idx} out of range 0..{n}")));
        }
        if gluings[idx].is_some() {
            return Err(syntax(lno, c, format!("tetrahedron {idx} listed twice")));
        }
        let mut faces = [None; 4];
        for (f, face) in faces.iter_mut().enumerate() {
            let (c, tok) = toks.next().ok_or_else(|| syntax(lno, line.len() + 1, "expected four face gluings"))?;
            *face = parse_gluing(tok, f).map_err(|m| syntax(lno, c, m))?;
            if let Some(g) = face {
                if g.tet >= n {
                    return Err(syntax(lno, c, format!("partner tetrahedron {} out of range 0..{n}", g.tet)));
                }
            }
        }
        if let Some((c, extra)) = toks.next() {
            return Err(syntax(lno, c, format!("unexpected token {extra:?}")));
        }
        gluings[idx] = Some(faces);
    }

    let gluings = gluings
        .into_iter()
        .enumerate()
        .map(|(i, g)| g.ok_or_else(|| syntax(hline, 1, format!("tetrahedron {i} is missing"))))
        .collect::<Result<Vec<_>, _>>()?;
    Triangulation::from_gluings(gluings)
}

/// Parses `-` or `j:abcd` for face `face`; the partner face is the image of `face`.
fn parse_gluing(tok: &str, face: usize) -> Result<Option<Gluing>, String> {
    if tok == "-" {
        return Ok(None);
    }
    let (tet, perm) = tok.split_once(':').ok_or_else(|| format!("expected `j:abcd` or `-`, found {tok:?}"))?;
    let tet: usize = tet.parse().map_err(|_| format!("bad partner index {tet:?}"))?;
    let perm: Perm4 = perm.parse()?;
    Ok(Some(Gluing { tet, face: perm.apply(face), perm }))
}
