//! Dynamic programming over a nice tree decomposition of the dual graph.
//!
//! At node τ the table maps each colouring ψ of the current edges Curr_τ
//! (edges shared by a finished tetrahedron in T_τ and an unfinished one) to
//! the partial invariant: the sum, over admissible colourings of E_τ that
//! restrict to ψ, of the adjusted weights of the tetrahedra in T_τ.

use std::collections::HashMap;

use crate::cyclotomic::{CyclotomicElement, CyclotomicField};
use crate::scalar::Coefficient;
use crate::treewidth::{greedy_fill_in, make_nice, NiceKind, NiceTreeDecomposition};
use crate::triangulation::{Skeleton, Triangulation};
use crate::tvcore::{Colour, TetColours, TvError, WeightTable};

/// Partial colourings of Curr_τ (colours in increasing edge order) to partial invariants.
pub type DpTable<T> = HashMap<Vec<Colour>, CyclotomicElement<T>>;

/// A tetrahedron Δ(x) chosen for every vertex, edge and triangle class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightAssignment {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub triangles: Vec<usize>,
}

impl WeightAssignment {
    /// Δ(x) = tetrahedron of the first embedding of x.
    pub fn first_embedding(sk: &Skeleton) -> WeightAssignment {
        WeightAssignment {
            vertices: sk.vertices().iter().map(|v| v.embeddings[0].0).collect(),
            edges: sk.edges().iter().map(|e| e.embeddings[0].tet).collect(),
            triangles: sk.triangles().iter().map(|f| f.embeddings[0].tet).collect(),
        }
    }

    /// Δ(x) = tetrahedron of the last embedding of x.
    pub fn last_embedding(sk: &Skeleton) -> WeightAssignment {
        WeightAssignment {
            vertices: sk.vertices().iter().map(|v| v.embeddings.last().unwrap().0).collect(),
            edges: sk.edges().iter().map(|e| e.embeddings.last().unwrap().tet).collect(),
            triangles: sk.triangles().iter().map(|f| f.embeddings.last().unwrap().tet).collect(),
        }
    }
}

/// Per tetrahedron: how many vertex weights, and which edge and triangle weights, it carries.
struct Carried {
    vertices: Vec<u32>,
    edges: Vec<Vec<usize>>,
    triangles: Vec<Vec<usize>>,
}

impl Carried {
    fn new(sk: &Skeleton, wa: &WeightAssignment) -> Carried {
        let n = sk.num_tetrahedra();
        let mut c = Carried { vertices: vec![0; n], edges: vec![Vec::new(); n], triangles: vec![Vec::new(); n] };
        for &t in &wa.vertices {
            c.vertices[t] += 1;
        }
        for (e, &t) in wa.edges.iter().enumerate() {
            c.edges[t].push(e);
        }
        for (f, &t) in wa.triangles.iter().enumerate() {
            c.triangles[t].push(f);
        }
        c
    }

    fn weight<T: Coefficient>(
        &self,
        sk: &Skeleton,
        table: &WeightTable<T>,
        t: usize,
        colouring: &[Colour],
    ) -> Result<CyclotomicElement<T>, TvError> {
        let mut w = table.tet(&TetColours::of(sk, t, colouring))?.clone();
        if self.vertices[t] > 0 {
            w *= &table.vertex().pow(self.vertices[t]);
        }
        for &e in &self.edges[t] {
            w *= table.edge(colouring[e]);
        }
        for &f in &self.triangles[t] {
            let [a, b, c] = sk.triangles()[f].edges.map(|e| colouring[e]);
            w *= table.triangle(a, b, c)?;
        }
        Ok(w)
    }
}

/// |t|′ = |t| · Π_{Δ(v)=t}|v| · Π_{Δ(e)=t}|e| · Π_{Δ(f)=t}|f|, reading t's
/// colours from a full colouring.
pub fn adjusted_tet_weight<T: Coefficient>(
    sk: &Skeleton,
    table: &WeightTable<T>,
    wa: &WeightAssignment,
    t: usize,
    colouring: &[Colour],
) -> Result<CyclotomicElement<T>, TvError> {
    Carried::new(sk, wa).weight(sk, table, t, colouring)
}

/// T_τ, E_τ, F_τ and Curr_τ for every node, each sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BagSets {
    pub finished: Vec<Vec<usize>>,
    pub edges: Vec<Vec<usize>>,
    pub triangles: Vec<Vec<usize>>,
    pub current: Vec<Vec<usize>>,
}

pub fn bag_sets(sk: &Skeleton, nice: &NiceTreeDecomposition) -> BagSets {
    let n = sk.num_tetrahedra();
    let mut finished: Vec<Vec<usize>> = Vec::with_capacity(nice.len());
    for i in 0..nice.len() {
        let set = match nice.kinds[i] {
            NiceKind::Leaf => Vec::new(),
            NiceKind::Introduce(_) => finished[nice.children[i][0]].clone(),
            NiceKind::Forget(t) => {
                let mut s = finished[nice.children[i][0]].clone();
                s.push(t);
                s.sort_unstable();
                s
            }
            NiceKind::Join => {
                let (a, b) = (&finished[nice.children[i][0]], &finished[nice.children[i][1]]);
                assert!(a.iter().all(|t| b.binary_search(t).is_err()), "join children share finished tetrahedra");
                let mut s: Vec<usize> = a.iter().chain(b).copied().collect();
                s.sort_unstable();
                s
            }
        };
        finished.push(set);
    }
    let edge_tets: Vec<Vec<usize>> = (0..sk.num_edges()).map(|e| sk.edge_tetrahedra(e)).collect();
    let mut edges = Vec::with_capacity(nice.len());
    let mut triangles = Vec::with_capacity(nice.len());
    let mut current = Vec::with_capacity(nice.len());
    let mut inside = vec![false; n];
    for set in &finished {
        for &t in set {
            inside[t] = true;
        }
        let mut es: Vec<usize> = set.iter().flat_map(|&t| sk.tet_edges(t)).collect();
        es.sort_unstable();
        es.dedup();
        let mut fs: Vec<usize> = set.iter().flat_map(|&t| sk.tet_faces(t)).collect();
        fs.sort_unstable();
        fs.dedup();
        let curr = es.iter().copied().filter(|&e| edge_tets[e].iter().any(|&t| !inside[t])).collect();
        for &t in set {
            inside[t] = false;
        }
        edges.push(es);
        triangles.push(fs);
        current.push(curr);
    }
    BagSets { finished, edges, triangles, current }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FptStats {
    pub nodes: usize,
    pub width: usize,
    pub max_table: usize,
    pub max_current: usize,
}

#[derive(Debug, Clone)]
pub struct FptRun<T> {
    pub value: CyclotomicElement<T>,
    pub stats: FptStats,
    /// Every node's table, when requested.
    pub tables: Option<Vec<DpTable<T>>>,
}

fn add_into<T: Coefficient>(table: &mut DpTable<T>, key: Vec<Colour>, value: CyclotomicElement<T>) {
    match table.entry(key) {
        std::collections::hash_map::Entry::Occupied(mut o) => *o.get_mut() += &value,
        std::collections::hash_map::Entry::Vacant(v) => {
            v.insert(value);
        }
    }
}

/// Runs the dynamic program; `trace` keeps a copy of every node's table.
pub fn run_fpt<T: Coefficient>(
    sk: &Skeleton,
    table: &WeightTable<T>,
    nice: &NiceTreeDecomposition,
    wa: &WeightAssignment,
    trace: bool,
) -> Result<FptRun<T>, TvError> {
    let sets = bag_sets(sk, nice);
    let carried = Carried::new(sk, wa);
    let colours = table.colours() as Colour;
    let field = table.field();
    let mut tables: Vec<Option<DpTable<T>>> = (0..nice.len()).map(|_| None).collect();
    let mut traced = Vec::new();
    let mut stats = FptStats { nodes: nice.len(), width: nice.width(), ..FptStats::default() };
    let mut scratch = vec![0 as Colour; sk.num_edges()];

    for i in 0..nice.len() {
        let curr = &sets.current[i];
        let out: DpTable<T> = match nice.kinds[i] {
            NiceKind::Leaf => DpTable::from([(Vec::new(), field.one())]),
            NiceKind::Introduce(_) => tables[nice.children[i][0]].take().expect("child table"),
            NiceKind::Forget(t) => {
                let child = nice.children[i][0];
                let child_curr = &sets.current[child];
                let input = tables[child].take().expect("child table");
                let mut fresh: Vec<usize> =
                    sk.tet_edges(t).into_iter().filter(|e| child_curr.binary_search(e).is_err()).collect();
                fresh.sort_unstable();
                fresh.dedup();
                let mut out = DpTable::new();
                for (key, value) in &input {
                    for (&e, &c) in child_curr.iter().zip(key) {
                        scratch[e] = c;
                    }
                    let mut digits = vec![0 as Colour; fresh.len()];
                    'fresh: loop {
                        for (&e, &c) in fresh.iter().zip(&digits) {
                            scratch[e] = c;
                        }
                        let admissible = (0..4).all(|v| {
                            let [a, b, c] = TetColours::of(sk, t, &scratch).face(v);
                            table.admissible(a, b, c)
                        });
                        if admissible {
                            let w = carried.weight(sk, table, t, &scratch)?;
                            let restricted: Vec<Colour> = curr.iter().map(|&e| scratch[e]).collect();
                            add_into(&mut out, restricted, value * &w);
                        }
                        for d in digits.iter_mut() {
                            *d += 1;
                            if *d < colours {
                                continue 'fresh;
                            }
                            *d = 0;
                        }
                        break;
                    }
                }
                out
            }
            NiceKind::Join => {
                let (c1, c2) = (nice.children[i][0], nice.children[i][1]);
                let (curr1, curr2) = (&sets.current[c1], &sets.current[c2]);
                let left = tables[c1].take().expect("child table");
                let right = tables[c2].take().expect("child table");
                let shared: Vec<usize> = curr1.iter().copied().filter(|e| curr2.binary_search(e).is_ok()).collect();
                let shared1: Vec<usize> = shared.iter().map(|e| curr1.binary_search(e).unwrap()).collect();
                let shared2: Vec<usize> = shared.iter().map(|e| curr2.binary_search(e).unwrap()).collect();
                let mut buckets: HashMap<Vec<Colour>, Vec<_>> = HashMap::new();
                for (key, value) in &right {
                    let sub: Vec<Colour> = shared2.iter().map(|&k| key[k]).collect();
                    buckets.entry(sub).or_default().push((key, value));
                }
                let mut out = DpTable::new();
                for (key1, v1) in &left {
                    let sub: Vec<Colour> = shared1.iter().map(|&k| key1[k]).collect();
                    let Some(matches) = buckets.get(&sub) else { continue };
                    for (&e, &c) in curr1.iter().zip(key1.iter()) {
                        scratch[e] = c;
                    }
                    for (key2, v2) in matches {
                        for (&e, &c) in curr2.iter().zip(key2.iter()) {
                            scratch[e] = c;
                        }
                        let restricted: Vec<Colour> = curr.iter().map(|&e| scratch[e]).collect();
                        add_into(&mut out, restricted, v1 * *v2);
                    }
                }
                out
            }
        };
        stats.max_table = stats.max_table.max(out.len());
        stats.max_current = stats.max_current.max(curr.len());
        if trace {
            traced.push(out.clone());
        }
        tables[i] = Some(out);
    }
    let root = tables[nice.root].take().expect("root table");
    let value = root.get(&Vec::new()).cloned().unwrap_or_else(|| field.zero());
    Ok(FptRun { value, stats, tables: trace.then_some(traced) })
}

/// GreedyFillIn decomposition of the dual graph, made nice.
pub fn nice_decomposition(tri: &Triangulation) -> NiceTreeDecomposition {
    make_nice(&greedy_fill_in(&tri.dual_graph()))
}

pub fn tv_fpt_with_stats<T: Coefficient>(
    tri: &Triangulation,
    field: &CyclotomicField<T>,
) -> Result<(CyclotomicElement<T>, FptStats), TvError> {
    tri.require_closed()?;
    let sk = tri.skeleton();
    let table = WeightTable::new(field);
    let nice = nice_decomposition(tri);
    let run = run_fpt(&sk, &table, &nice, &WeightAssignment::first_embedding(&sk), false)?;
    Ok((run.value, run.stats))
}

pub fn tv_fpt<T: Coefficient>(tri: &Triangulation, field: &CyclotomicField<T>) -> Result<CyclotomicElement<T>, TvError> {
    tv_fpt_with_stats(tri, field).map(|(v, _)| v)
}
