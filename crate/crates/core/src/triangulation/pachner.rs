//! The 2–3 move and its inverse.

use thiserror::Error;

use super::{Gluing, ParseError, Perm4, Skeleton, Triangulation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("move not applicable: no triangle {0}")]
    NoSuchTriangle(usize),
    #[error("move not applicable: no edge {0}")]
    NoSuchEdge(usize),
    #[error("move not applicable: triangle {0} is a boundary face")]
    BoundaryTriangle(usize),
    #[error("move not applicable: both sides of triangle {0} lie in the same tetrahedron")]
    SameTetrahedron(usize),
    #[error("move not applicable: edge {edge} has degree {degree}, expected 3")]
    EdgeDegree { edge: usize, degree: usize },
    #[error("move not applicable: edge {0} does not meet three distinct tetrahedra")]
    RepeatedTetrahedron(usize),
    #[error("move not applicable: result is degenerate ({0})")]
    Degenerate(ParseError),
}

/// New location of an old face slot: tetrahedron, face, and the vertex map
/// from old to new tetrahedron vertices. `None` marks a slot that vanishes.
type Slot = Option<(usize, usize, Perm4)>;

/// Replaces the tetrahedra in `removed` by `added` fresh ones appended at the
/// end, transporting every surviving gluing through `relocate`.
fn rebuild(
    tri: &Triangulation,
    removed: &[usize],
    added: usize,
    relocate: impl Fn(usize, usize) -> Slot,
    internal: &[(usize, usize, usize, Perm4)],
) -> Result<Triangulation, MoveError> {
    let n = tri.size();
    let mut index = vec![usize::MAX; n];
    let mut kept = 0;
    for (t, slot) in index.iter_mut().enumerate() {
        if !removed.contains(&t) {
            *slot = kept;
            kept += 1;
        }
    }
    let base = kept;
    let locate = |t: usize, f: usize| -> Slot {
        if removed.contains(&t) {
            relocate(t, f).map(|(k, face, mu)| (base + k, face, mu))
        } else {
            Some((index[t], f, Perm4::IDENTITY))
        }
    };
    let mut gluings = vec![[None; 4]; base + added];
    for t in 0..n {
        for f in 0..4 {
            let Some((nt, nf, mu)) = locate(t, f) else { continue };
            let Some(g) = tri.gluing(t, f) else { continue };
            let (pt, pf, nu) = locate(g.tet, g.face).expect("surviving face glued to a vanishing one");
            let perm = nu.compose(g.perm).compose(mu.inverse());
            gluings[nt][nf] = Some(Gluing { tet: pt, face: pf, perm });
        }
    }
    for &(a, fa, b, perm) in internal {
        let fb = perm.apply(fa);
        gluings[base + a][fa] = Some(Gluing { tet: base + b, face: fb, perm });
        gluings[base + b][fb] = Some(Gluing { tet: base + a, face: fa, perm: perm.inverse() });
    }
    Triangulation::from_gluings(gluings).map_err(MoveError::Degenerate)
}

fn perm_from(pairs: [(usize, usize); 4]) -> Perm4 {
    let mut images = [0u8; 4];
    for (from, to) in pairs {
        images[from] = to as u8;
    }
    Perm4::new(images).expect("vertex map is a bijection")
}

impl Triangulation {
    /// 2–3 move across triangle class `triangle` (indexed as in [`Skeleton`]).
    ///
    /// The two tetrahedra meeting at the triangle are replaced by three
    /// tetrahedra appended at the end; the new degree-3 edge is slot 0 of
    /// tetrahedron `size() - 3` of the result.
    pub fn pachner_2_3(&self, triangle: usize) -> Result<Triangulation, MoveError> {
        let sk = Skeleton::new(self);
        let class = sk.triangles().get(triangle).ok_or(MoveError::NoSuchTriangle(triangle))?;
        let first = class.embeddings[0];
        let (t0, f0) = (first.tet, first.face);
        let g = self.gluing(t0, f0).ok_or(MoveError::BoundaryTriangle(triangle))?;
        let (t1, f1, pi) = (g.tet, g.face, g.perm);
        if t0 == t1 {
            return Err(MoveError::SameTetrahedron(triangle));
        }
        let u = first.corners;
        let relocate = |t: usize, f: usize| -> Slot {
            if t == t0 {
                let i = u.iter().position(|&v| v == f)?;
                let mu = perm_from([(f0, 0), (u[(i + 1) % 3], 2), (u[(i + 2) % 3], 3), (u[i], 1)]);
                Some((i, 1, mu))
            } else {
                let i = u.iter().position(|&v| pi.apply(v) == f)?;
                let img = |k: usize| pi.apply(u[k % 3]);
                let mu = perm_from([(f1, 1), (img(i + 1), 2), (img(i + 2), 3), (img(i), 0)]);
                Some((i, 0, mu))
            }
        };
        let swap = Perm4::new([0, 1, 3, 2]).unwrap();
        let internal = [(0, 2, 1, swap), (1, 2, 2, swap), (2, 2, 0, swap)];
        let mut removed = [t0, t1];
        removed.sort_unstable();
        rebuild(self, &removed, 3, relocate, &internal)
    }

    /// 3–2 move at edge class `edge`, which must have degree 3 and lie in
    /// three distinct tetrahedra. The two new tetrahedra are appended.
    pub fn pachner_3_2(&self, edge: usize) -> Result<Triangulation, MoveError> {
        let sk = Skeleton::new(self);
        let class = sk.edges().get(edge).ok_or(MoveError::NoSuchEdge(edge))?;
        if class.degree() != 3 {
            return Err(MoveError::EdgeDegree { edge, degree: class.degree() });
        }
        let tets = sk.edge_tetrahedra(edge);
        if tets.len() != 3 {
            return Err(MoveError::RepeatedTetrahedron(edge));
        }
        // Walk once around the edge, recording for each tetrahedron its edge
        // ends (a, b) and link vertices (x, y), exiting through the face opposite x.
        let start = class.embeddings[0];
        let [a, b] = start.ends;
        let mut rest = (0..4).filter(|&v| v != a && v != b);
        let mut state = (start.tet, a, b, rest.next().unwrap(), rest.next().unwrap());
        let mut walk = Vec::with_capacity(3);
        for _ in 0..3 {
            walk.push(state);
            let (t, a, b, x, y) = state;
            let g = self.gluing(t, x).ok_or(MoveError::RepeatedTetrahedron(edge))?;
            let p = g.perm;
            state = (g.tet, p.apply(a), p.apply(b), p.apply(y), p.apply(x));
        }
        if state != walk[0] || walk.iter().map(|s| s.0).collect::<std::collections::BTreeSet<_>>().len() != 3 {
            return Err(MoveError::RepeatedTetrahedron(edge));
        }
        let relocate = |t: usize, f: usize| -> Slot {
            let j = walk.iter().position(|s| s.0 == t)?;
            let (_, a, b, x, y) = walk[j];
            let place = |apex: usize, other: usize| perm_from([(apex, 3), (x, j), (y, (j + 1) % 3), (other, (j + 2) % 3)]);
            if f == b {
                Some((0, (j + 2) % 3, place(a, b)))
            } else if f == a {
                Some((1, (j + 2) % 3, place(b, a)))
            } else {
                None
            }
        };
        let mut removed = tets;
        removed.sort_unstable();
        rebuild(self, &removed, 2, relocate, &[(0, 3, 1, Perm4::IDENTITY)])
    }
}
