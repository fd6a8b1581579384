use std::collections::VecDeque;

use super::Triangulation;

/// Tetrahedron edge slots, in the order used for edge indices 0..6.
pub const EDGE_SLOTS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Slot index of the edge joining local vertices `a` and `b`.
#[inline]
pub fn edge_slot(a: usize, b: usize) -> usize {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    match (lo, hi) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("no edge between vertices {a} and {b}"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexClass {
    /// (tetrahedron, local vertex), sorted.
    pub embeddings: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeEmbedding {
    pub tet: usize,
    pub slot: usize,
    /// Local vertices sitting at the class's canonical ends 0 and 1.
    pub ends: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeClass {
    pub embeddings: Vec<EdgeEmbedding>,
    /// Vertex classes at canonical ends 0 and 1.
    pub vertices: [usize; 2],
}

impl EdgeClass {
    pub fn degree(&self) -> usize {
        self.embeddings.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangleEmbedding {
    pub tet: usize,
    pub face: usize,
    /// Local tetrahedron vertex at each canonical corner.
    pub corners: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleClass {
    pub embeddings: Vec<TriangleEmbedding>,
    /// Vertex class at each corner.
    pub vertices: [usize; 3],
    /// `edges[k]` is the edge class opposite corner `k`.
    pub edges: [usize; 3],
}

/// One crossing of the walk around an edge: leaving `tet` through `face`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkStep {
    pub tet: usize,
    pub face: usize,
    pub triangle: usize,
    /// Canonical corners of the triangle at the edge's ends 0 and 1.
    pub corners: [usize; 2],
}

/// Vertex, edge and triangle classes of a triangulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    tets: usize,
    vertices: Vec<VertexClass>,
    edges: Vec<EdgeClass>,
    triangles: Vec<TriangleClass>,
    tet_vertices: Vec<[usize; 4]>,
    tet_edges: Vec<[usize; 6]>,
    tet_faces: Vec<[usize; 4]>,
    /// `face_corners[t][f][v]`: canonical corner of local vertex `v` in face `f`.
    face_corners: Vec<[[u8; 4]; 4]>,
    /// Some edge is identified with itself in reverse.
    reversed_edge: Option<usize>,
    gluings: Vec<[Option<super::Gluing>; 4]>,
}

impl Skeleton {
    pub fn new(tri: &Triangulation) -> Skeleton {
        let n = tri.size();
        let gl = tri.gluings();

        let mut tet_vertices = vec![[usize::MAX; 4]; n];
        let mut vertices = Vec::new();
        for t0 in 0..n {
            for v0 in 0..4 {
                if tet_vertices[t0][v0] != usize::MAX {
                    continue;
                }
                let id = vertices.len();
                let mut emb = vec![(t0, v0)];
                tet_vertices[t0][v0] = id;
                let mut queue = VecDeque::from([(t0, v0)]);
                while let Some((t, v)) = queue.pop_front() {
                    for f in (0..4).filter(|&f| f != v) {
                        if let Some(g) = gl[t][f] {
                            let w = g.perm.apply(v);
                            if tet_vertices[g.tet][w] == usize::MAX {
                                tet_vertices[g.tet][w] = id;
                                emb.push((g.tet, w));
                                queue.push_back((g.tet, w));
                            }
                        }
                    }
                }
                emb.sort_unstable();
                vertices.push(VertexClass { embeddings: emb });
            }
        }

        let mut tet_edges = vec![[usize::MAX; 6]; n];
        let mut edge_ends: Vec<[[usize; 2]; 6]> = vec![[[0; 2]; 6]; n];
        let mut edges = Vec::new();
        let mut reversed_edge = None;
        for t0 in 0..n {
            for (s0, &(a0, b0)) in EDGE_SLOTS.iter().enumerate() {
                if tet_edges[t0][s0] != usize::MAX {
                    continue;
                }
                let id = edges.len();
                tet_edges[t0][s0] = id;
                edge_ends[t0][s0] = [a0, b0];
                let mut emb = vec![EdgeEmbedding { tet: t0, slot: s0, ends: [a0, b0] }];
                let mut queue = VecDeque::from([(t0, a0, b0)]);
                while let Some((t, a, b)) = queue.pop_front() {
                    for f in (0..4).filter(|&f| f != a && f != b) {
                        let Some(g) = gl[t][f] else { continue };
                        let (a2, b2) = (g.perm.apply(a), g.perm.apply(b));
                        let s2 = edge_slot(a2, b2);
                        if tet_edges[g.tet][s2] == usize::MAX {
                            tet_edges[g.tet][s2] = id;
                            edge_ends[g.tet][s2] = [a2, b2];
                            emb.push(EdgeEmbedding { tet: g.tet, slot: s2, ends: [a2, b2] });
                            queue.push_back((g.tet, a2, b2));
                        } else if edge_ends[g.tet][s2][0] != a2 && reversed_edge.is_none() {
                            reversed_edge = Some(id);
                        }
                    }
                }
                emb.sort_unstable_by_key(|e| (e.tet, e.slot));
                let vs = [tet_vertices[t0][a0], tet_vertices[t0][b0]];
                edges.push(EdgeClass { embeddings: emb, vertices: vs });
            }
        }

        let mut tet_faces = vec![[usize::MAX; 4]; n];
        let mut face_corners = vec![[[u8::MAX; 4]; 4]; n];
        let mut triangles = Vec::new();
        for t in 0..n {
            for f in 0..4 {
                if tet_faces[t][f] != usize::MAX {
                    continue;
                }
                let id = triangles.len();
                let mut corners = [0usize; 3];
                for (k, v) in (0..4).filter(|&v| v != f).enumerate() {
                    corners[k] = v;
                }
                let mut emb = vec![TriangleEmbedding { tet: t, face: f, corners }];
                tet_faces[t][f] = id;
                for (k, &v) in corners.iter().enumerate() {
                    face_corners[t][f][v] = k as u8;
                }
                if let Some(g) = gl[t][f] {
                    let other = corners.map(|v| g.perm.apply(v));
                    tet_faces[g.tet][g.face] = id;
                    for (k, &v) in other.iter().enumerate() {
                        face_corners[g.tet][g.face][v] = k as u8;
                    }
                    emb.push(TriangleEmbedding { tet: g.tet, face: g.face, corners: other });
                }
                let vs = corners.map(|v| tet_vertices[t][v]);
                let es = [0, 1, 2].map(|k| tet_edges[t][edge_slot(corners[(k + 1) % 3], corners[(k + 2) % 3])]);
                triangles.push(TriangleClass { embeddings: emb, vertices: vs, edges: es });
            }
        }

        Skeleton {
            tets: n,
            vertices,
            edges,
            triangles,
            tet_vertices,
            tet_edges,
            tet_faces,
            face_corners,
            reversed_edge,
            gluings: gl.to_vec(),
        }
    }

    pub fn num_tetrahedra(&self) -> usize {
        self.tets
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self) -> &[VertexClass] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeClass] {
        &self.edges
    }

    pub fn triangles(&self) -> &[TriangleClass] {
        &self.triangles
    }

    pub fn edge_degree(&self, e: usize) -> usize {
        self.edges[e].degree()
    }

    /// Vertex classes of tetrahedron `t`, indexed by local vertex.
    pub fn tet_vertices(&self, t: usize) -> [usize; 4] {
        self.tet_vertices[t]
    }

    /// Edge classes of tetrahedron `t`, indexed by [`EDGE_SLOTS`].
    pub fn tet_edges(&self, t: usize) -> [usize; 6] {
        self.tet_edges[t]
    }

    /// Triangle classes of tetrahedron `t`, indexed by face.
    pub fn tet_faces(&self, t: usize) -> [usize; 4] {
        self.tet_faces[t]
    }

    /// Canonical corner of the triangle class at local vertex `v` of face `f` of `t`.
    pub fn face_corner(&self, t: usize, f: usize, v: usize) -> usize {
        debug_assert_ne!(f, v);
        self.face_corners[t][f][v] as usize
    }

    /// First edge class found identified with itself in reverse, if any.
    pub fn reversed_edge(&self) -> Option<usize> {
        self.reversed_edge
    }

    /// v − e + f − n.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64 - self.tets as i64
    }

    /// Distinct tetrahedra containing edge `e`, sorted.
    pub fn edge_tetrahedra(&self, e: usize) -> Vec<usize> {
        let mut ts: Vec<usize> = self.edges[e].embeddings.iter().map(|x| x.tet).collect();
        ts.dedup();
        ts
    }

    /// Cyclic walk around edge `e` starting from its first embedding, listing
    /// every triangle side incident to `e` once. Stops early at an unglued face.
    pub fn edge_link(&self, e: usize) -> Vec<LinkStep> {
        let start = self.edges[e].embeddings[0];
        let [a0, b0] = start.ends;
        let mut others = (0..4).filter(|&v| v != a0 && v != b0);
        let (x0, y0) = (others.next().unwrap(), others.next().unwrap());
        let initial = (start.tet, a0, b0, x0, y0);
        let mut state = initial;
        let mut steps = Vec::new();
        loop {
            let (t, a, b, x, y) = state;
            let triangle = self.tet_faces[t][x];
            steps.push(LinkStep {
                tet: t,
                face: x,
                triangle,
                corners: [self.face_corner(t, x, a), self.face_corner(t, x, b)],
            });
            let Some(g) = self.gluings[t][x] else { break };
            let p = g.perm;
            state = (g.tet, p.apply(a), p.apply(b), p.apply(y), p.apply(x));
            if state == initial || steps.len() > 6 * self.tets {
                break;
            }
        }
        steps
    }

    pub fn dual_graph(&self) -> DualGraph {
        let mut arcs = Vec::new();
        for (t, faces) in self.gluings.iter().enumerate() {
            for (f, g) in faces.iter().enumerate() {
                if let Some(g) = g {
                    if (t, f) < (g.tet, g.face) {
                        arcs.push((t, f, g.tet, g.face));
                    }
                }
            }
        }
        DualGraph { nodes: self.tets, arcs }
    }
}

/// Multigraph with a node per tetrahedron and an arc per face gluing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    pub nodes: usize,
    /// (tet, face, partner tet, partner face) with the first pair smaller.
    pub arcs: Vec<(usize, usize, usize, usize)>,
}

impl DualGraph {
    /// Node degrees, counting each loop twice.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes];
        for &(a, _, b, _) in &self.arcs {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Simple adjacency lists: loops dropped and parallel arcs merged.
    pub fn simple_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes];
        for &(a, _, b, _) in &self.arcs {
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes == 0 {
            return true;
        }
        let adj = self.simple_adjacency();
        let mut seen = vec![false; self.nodes];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.nodes
    }
}
