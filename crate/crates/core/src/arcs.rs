//! Admissible colourings as systems of normal arcs in the 2-skeleton.
//!
//! A colour φ ∈ {0, …, r−2} is read as the number of points where normal
//! arcs cross the edge. Each triangle class carries three corner coordinates,
//! `corners[k]` counting the arcs that cut off corner k, so the edge opposite
//! corner k is crossed `corners[k+1] + corners[k+2]` times.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::triangulation::{edge_slot, Skeleton, Triangulation, TriangulationError, EDGE_SLOTS};
use crate::tvcore::{is_admissible_triple, Colour};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArcError {
    #[error("colouring has {found} entries, expected {expected}")]
    ColouringLength { expected: usize, found: usize },
    #[error("triangle {triangle} has inadmissible colours ({}, {}, {})", .colours[0], .colours[1], .colours[2])]
    Inadmissible { triangle: usize, colours: [Colour; 3] },
    #[error("arc system has {found} triangles, expected {expected}")]
    SystemLength { expected: usize, found: usize },
    #[error("triangle {triangle} carries {total} arcs, more than {bound}")]
    TooManyArcs { triangle: usize, total: u32, bound: u32 },
    #[error("edge {edge} is crossed {first} times in one triangle and {second} in another")]
    Mismatch { edge: usize, first: u32, second: u32 },
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

/// Corner coordinates per triangle class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArcSystem {
    pub corners: Vec<[u32; 3]>,
}

impl ArcSystem {
    pub fn zero(skeleton: &Skeleton) -> ArcSystem {
        ArcSystem { corners: vec![[0; 3]; skeleton.num_triangles()] }
    }

    /// Crossings of the side opposite corner `k` of triangle `f`.
    pub fn crossings(&self, f: usize, k: usize) -> u32 {
        let c = &self.corners[f];
        c[(k + 1) % 3] + c[(k + 2) % 3]
    }

    pub fn total(&self, f: usize) -> u32 {
        self.corners[f].iter().sum()
    }
}

/// Corner coordinates of one triangle whose side opposite corner k has colour `phi[k]`.
pub fn triangle_arcs(phi: [Colour; 3]) -> [u32; 3] {
    let p = phi.map(u32::from);
    [0, 1, 2].map(|k| (p[(k + 1) % 3] + p[(k + 2) % 3] - p[k]) / 2)
}

pub fn colouring_to_arcs(skeleton: &Skeleton, r: usize, colouring: &[Colour]) -> Result<ArcSystem, ArcError> {
    if colouring.len() != skeleton.num_edges() {
        return Err(ArcError::ColouringLength { expected: skeleton.num_edges(), found: colouring.len() });
    }
    let mut corners = Vec::with_capacity(skeleton.num_triangles());
    for (f, tc) in skeleton.triangles().iter().enumerate() {
        let phi = tc.edges.map(|e| colouring[e]);
        if !is_admissible_triple(r, phi[0], phi[1], phi[2]) {
            return Err(ArcError::Inadmissible { triangle: f, colours: phi });
        }
        corners.push(triangle_arcs(phi));
    }
    Ok(ArcSystem { corners })
}

pub fn arcs_to_colouring(skeleton: &Skeleton, r: usize, arcs: &ArcSystem) -> Result<Vec<Colour>, ArcError> {
    if arcs.corners.len() != skeleton.num_triangles() {
        return Err(ArcError::SystemLength { expected: skeleton.num_triangles(), found: arcs.corners.len() });
    }
    let bound = (r - 2) as u32;
    let mut colour: Vec<Option<u32>> = vec![None; skeleton.num_edges()];
    for (f, tc) in skeleton.triangles().iter().enumerate() {
        let total = arcs.total(f);
        if total > bound {
            return Err(ArcError::TooManyArcs { triangle: f, total, bound });
        }
        for (k, &e) in tc.edges.iter().enumerate() {
            let x = arcs.crossings(f, k);
            match colour[e] {
                Some(y) if y != x => return Err(ArcError::Mismatch { edge: e, first: y, second: x }),
                _ => colour[e] = Some(x),
            }
        }
    }
    Ok(colour.into_iter().map(|c| c.unwrap_or(0) as Colour).collect())
}

/// Crossings of edge {a, b} of tetrahedron t as seen from its face `face`.
fn face_crossings(skeleton: &Skeleton, arcs: &ArcSystem, t: usize, face: usize, a: usize, b: usize) -> u32 {
    let f = skeleton.tet_faces(t)[face];
    let c = &arcs.corners[f];
    c[skeleton.face_corner(t, face, a)] + c[skeleton.face_corner(t, face, b)]
}

/// The two faces of a tetrahedron that contain edge {a, b}.
fn faces_on(a: usize, b: usize) -> [usize; 2] {
    let mut other = (0..4).filter(|&v| v != a && v != b);
    [other.next().unwrap(), other.next().unwrap()]
}

/// Every tetrahedron edge sees the same number of crossings from both its faces.
pub fn verify_tet_cycles(skeleton: &Skeleton, arcs: &ArcSystem) -> bool {
    arcs.corners.len() == skeleton.num_triangles()
        && (0..skeleton.num_tetrahedra()).all(|t| {
            EDGE_SLOTS.iter().all(|&(a, b)| {
                let [f, g] = faces_on(a, b);
                face_crossings(skeleton, arcs, t, f, a, b) == face_crossings(skeleton, arcs, t, g, a, b)
            })
        })
}

/// Face whose arc total bounds edge slot {a, b}; together the six choices cover all four faces.
fn bound_face(a: usize, b: usize) -> usize {
    [3, 1, 1, 3, 2, 0][edge_slot(a, b)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcVariable {
    pub triangle: usize,
    pub corner: usize,
    pub vertex: usize,
}

/// `coefficients · x` compared against `rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coefficients: Vec<i64>,
    pub rhs: i64,
}

impl Constraint {
    pub fn evaluate(&self, x: &[i64]) -> i64 {
        self.coefficients.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

/// Equalities `= rhs` and inequalities `>= rhs` over the corner coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcPolytope {
    pub variables: Vec<ArcVariable>,
    pub equalities: Vec<Constraint>,
    pub inequalities: Vec<Constraint>,
}

impl ArcPolytope {
    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.variables.len()
            && self.equalities.iter().all(|c| c.evaluate(x) == c.rhs)
            && self.inequalities.iter().all(|c| c.evaluate(x) >= c.rhs)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

fn var_index(f: usize, k: usize) -> usize {
    3 * f + k
}

/// The arc polytope at level r, or the cone when `r` is `None`.
pub fn arc_constraints(tri: &Triangulation, r: Option<usize>) -> Result<ArcPolytope, ArcError> {
    tri.require_closed()?;
    let sk = tri.skeleton();
    let nvars = 3 * sk.num_triangles();
    let variables = sk
        .triangles()
        .iter()
        .enumerate()
        .flat_map(|(f, tc)| (0..3).map(move |k| ArcVariable { triangle: f, corner: k, vertex: tc.vertices[k] }))
        .collect();
    let mut equalities = Vec::with_capacity(6 * sk.num_tetrahedra());
    let mut upper = Vec::new();
    for t in 0..sk.num_tetrahedra() {
        for &(a, b) in &EDGE_SLOTS {
            let [f, g] = faces_on(a, b);
            let mut row = vec![0i64; nvars];
            for (face, sign) in [(f, 1), (g, -1)] {
                let tc = sk.tet_faces(t)[face];
                for v in [a, b] {
                    row[var_index(tc, sk.face_corner(t, face, v))] += sign;
                }
            }
            equalities.push(Constraint { coefficients: row, rhs: 0 });
            if let Some(r) = r {
                let tc = sk.tet_faces(t)[bound_face(a, b)];
                let mut row = vec![0i64; nvars];
                for k in 0..3 {
                    row[var_index(tc, k)] = -1;
                }
                upper.push(Constraint { coefficients: row, rhs: -((r - 2) as i64) });
            }
        }
    }
    let mut inequalities: Vec<Constraint> = (0..nvars)
        .map(|i| {
            let mut row = vec![0i64; nvars];
            row[i] = 1;
            Constraint { coefficients: row, rhs: 0 }
        })
        .collect();
    inequalities.extend(upper);
    Ok(ArcPolytope { variables, equalities, inequalities })
}

pub fn export_arc_polytope(tri: &Triangulation, r: usize) -> Result<ArcPolytope, ArcError> {
    arc_constraints(tri, Some(r))
}

fn write_row(f: &mut fmt::Formatter<'_>, tag: &str, c: &Constraint, op: &str) -> fmt::Result {
    write!(f, "{tag}")?;
    for x in &c.coefficients {
        write!(f, " {x}")?;
    }
    writeln!(f, " {op} {}", c.rhs)
}

impl fmt::Display for ArcPolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.variables.len())?;
        for (i, v) in self.variables.iter().enumerate() {
            writeln!(f, "var {i} triangle {} corner {} vertex {}", v.triangle, v.corner, v.vertex)?;
        }
        for c in &self.equalities {
            write_row(f, "eq", c, "=")?;
        }
        for c in &self.inequalities {
            write_row(f, "ge", c, ">=")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("polytope line {line}: {message}")]
pub struct PolytopeParseError {
    pub line: usize,
    pub message: String,
}

impl FromStr for ArcPolytope {
    type Err = PolytopeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |line: usize, message: &str| PolytopeParseError { line, message: message.to_string() };
        let mut lines = s.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (_, head) = lines.next().ok_or_else(|| err(1, "missing header"))?;
        let n: usize = head
            .strip_prefix("vars ")
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| err(1, "expected `vars N`"))?;
        let mut p = ArcPolytope { variables: Vec::new(), equalities: Vec::new(), inequalities: Vec::new() };
        for (no, line) in lines {
            let words: Vec<&str> = line.split_whitespace().collect();
            let ints = |ws: &[&str]| -> Result<Vec<i64>, PolytopeParseError> {
                ws.iter().map(|w| w.parse().map_err(|_| err(no, "expected an integer"))).collect()
            };
            match words[0] {
                "var" => {
                    let w = &words[1..];
                    if w.len() != 7 || w[1] != "triangle" || w[3] != "corner" || w[5] != "vertex" {
                        return Err(err(no, "expected `var i triangle T corner K vertex V`"));
                    }
                    let v = ints(&[w[0], w[2], w[4], w[6]])?;
                    if v[0] as usize != p.variables.len() {
                        return Err(err(no, "variables out of order"));
                    }
                    p.variables.push(ArcVariable { triangle: v[1] as usize, corner: v[2] as usize, vertex: v[3] as usize });
                }
                tag @ ("eq" | "ge") => {
                    let op = if tag == "eq" { "=" } else { ">=" };
                    if words.len() != n + 3 || words[n + 1] != op {
                        return Err(err(no, "wrong number of coefficients or operator"));
                    }
                    let v = ints(&words[1..=n])?;
                    let rhs = ints(&words[n + 2..])?[0];
                    let c = Constraint { coefficients: v, rhs };
                    if tag == "eq" {
                        p.equalities.push(c);
                    } else {
                        p.inequalities.push(c);
                    }
                }
                _ => return Err(err(no, "unknown line")),
            }
        }
        if p.variables.len() != n {
            return Err(err(0, "legend does not list every variable"));
        }
        Ok(p)
    }
}

/// Flattens an arc system into the polytope's variable order.
pub fn arcs_to_point(arcs: &ArcSystem) -> Vec<i64> {
    arcs.corners.iter().flatten().map(|&x| x as i64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::{lens_space, one_tetrahedron_s3};
    use crate::tvcore::AdmissibleColourings;
    use proptest::prelude::*;

    fn double() -> Triangulation {
        "tets 2\ntet 0: 1:0123 1:0123 1:0123 1:0123\ntet 1: 0:0123 0:0123 0:0123 0:0123\n"
            .parse()
            .unwrap()
    }

    #[test]
    fn single_triangle_examples() {
        assert_eq!(triangle_arcs([0, 0, 0]), [0, 0, 0]);
        // sides opposite corners 0 and 1 have colour 1, so they meet at corner 2
        assert_eq!(triangle_arcs([1, 1, 0]), [0, 0, 1]);
        for a in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    if !is_admissible_triple(5, a, b, c) {
                        continue;
                    }
                    let x = triangle_arcs([a, b, c]);
                    assert_eq!([x[1] + x[2], x[0] + x[2], x[0] + x[1]], [a, b, c].map(u32::from));
                    assert!(x.iter().sum::<u32>() <= 3);
                }
            }
        }
    }

    #[test]
    fn round_trip_on_all_admissible_colourings() {
        for tri in [double(), one_tetrahedron_s3(), lens_space(3, 1), lens_space(4, 1)] {
            let sk = tri.skeleton();
            for r in 3..=5 {
                for c in AdmissibleColourings::enumerate(&sk, r, u64::MAX).unwrap().iter() {
                    let arcs = colouring_to_arcs(&sk, r, c).unwrap();
                    assert!(verify_tet_cycles(&sk, &arcs));
                    assert!((0..sk.num_triangles()).all(|f| arcs.total(f) as usize <= r - 2));
                    assert_eq!(arcs_to_colouring(&sk, r, &arcs).unwrap(), c);
                }
            }
        }
    }

    #[test]
    fn zero_system() {
        let sk = lens_space(5, 2).skeleton();
        let z = ArcSystem::zero(&sk);
        assert!(verify_tet_cycles(&sk, &z));
        assert_eq!(arcs_to_colouring(&sk, 3, &z).unwrap(), vec![0; sk.num_edges()]);
    }

    #[test]
    fn single_bump_breaks_matching() {
        let tri = lens_space(3, 1);
        let sk = tri.skeleton();
        for f in 0..sk.num_triangles() {
            for k in 0..3 {
                let mut a = ArcSystem::zero(&sk);
                a.corners[f][k] += 1;
                assert!(!verify_tet_cycles(&sk, &a));
                assert!(matches!(arcs_to_colouring(&sk, 5, &a), Err(ArcError::Mismatch { .. })));
            }
        }
    }

    #[test]
    fn inadmissible_colouring_is_rejected() {
        let sk = double().skeleton();
        let mut c = vec![0; 6];
        c[0] = 1;
        assert!(matches!(colouring_to_arcs(&sk, 3, &c), Err(ArcError::Inadmissible { .. })));
        assert!(matches!(colouring_to_arcs(&sk, 3, &[0]), Err(ArcError::ColouringLength { .. })));
    }

    #[test]
    fn polytope_counts() {
        for tri in [double(), one_tetrahedron_s3(), lens_space(9, 1)] {
            let n = tri.size();
            let p = export_arc_polytope(&tri, 4).unwrap();
            assert_eq!(p.variables.len(), 6 * n);
            assert_eq!(p.equalities.len(), 6 * n);
            assert_eq!(p.inequalities.len(), 12 * n);
            assert!(p.contains(&vec![0; 6 * n]));
            let cone = arc_constraints(&tri, None).unwrap();
            assert_eq!(cone.inequalities.len(), 6 * n);
        }
    }

    #[test]
    fn text_round_trip() {
        let p = export_arc_polytope(&lens_space(3, 1), 5).unwrap();
        let text = p.to_text();
        assert!(text.starts_with("vars 18\nvar 0 triangle 0 corner 0 vertex "));
        assert_eq!(text.parse::<ArcPolytope>().unwrap(), p);
        assert!("vars 2\nvar 0 triangle 0 corner 0 vertex 0\neq 1 = 0\n".parse::<ArcPolytope>().is_err());
    }

    fn lattice_points(p: &ArcPolytope, ub: i64) -> usize {
        fn go(p: &ArcPolytope, ub: i64, x: &mut Vec<i64>) -> usize {
            if x.len() == p.variables.len() {
                return p.contains(x) as usize;
            }
            (0..=ub)
                .map(|v| {
                    x.push(v);
                    let n = go(p, ub, x);
                    x.pop();
                    n
                })
                .sum()
        }
        go(p, ub, &mut Vec::new())
    }

    #[test]
    fn lattice_points_of_double_simplex() {
        let tri = double();
        let sk = tri.skeleton();
        for r in [3, 4] {
            let p = export_arc_polytope(&tri, r).unwrap();
            let points = lattice_points(&p, (r - 2) as i64);
            assert_eq!(points, AdmissibleColourings::enumerate(&sk, r, u64::MAX).unwrap().len());
        }
    }

    proptest! {
        #[test]
        fn image_lies_in_polytope(seed in 0usize..1000, r in 3usize..7) {
            let tri = lens_space(5, 2);
            let sk = tri.skeleton();
            let all = AdmissibleColourings::enumerate(&sk, r, u64::MAX).unwrap();
            let c = all.iter().nth(seed % all.len()).unwrap();
            let arcs = colouring_to_arcs(&sk, r, c).unwrap();
            let p = export_arc_polytope(&tri, r).unwrap();
            prop_assert!(p.contains(&arcs_to_point(&arcs)));
            let mut bumped = arcs.clone();
            bumped.corners[seed % sk.num_triangles()][seed % 3] += 1;
            prop_assert!(!verify_tet_cycles(&sk, &bumped));
        }
    }
}
