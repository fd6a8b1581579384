//! Depth-first state sum over edges sorted by decreasing degree.
//!
//! Each triangle and tetrahedron weight is multiplied in at the depth where
//! its last edge is coloured, a branch is cut as soon as a completed triangle
//! is inadmissible, and the vertex weights enter once at the root.

use crate::cyclotomic::{CyclotomicElement, CyclotomicField};
use crate::scalar::Coefficient;
use crate::triangulation::{Skeleton, Triangulation};
use crate::tvcore::{Colour, TetColours, TvError, WeightTable};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BacktrackStats {
    /// Search-tree nodes entered, the root included.
    pub visits: u64,
    /// Complete admissible colourings reached.
    pub leaves: u64,
}

impl BacktrackStats {
    /// Σ_{i ≤ ℓ} (r−1)^i, the size of the full search tree.
    pub fn visit_bound(r: usize, edges: usize) -> f64 {
        (0..=edges).map(|i| ((r - 1) as f64).powi(i as i32)).sum()
    }
}

/// Edge classes by decreasing degree; ties keep canonical index order.
pub fn sort_edges_by_degree(skeleton: &Skeleton) -> Vec<usize> {
    let mut order: Vec<usize> = (0..skeleton.num_edges()).collect();
    order.sort_by_key(|&e| std::cmp::Reverse(skeleton.edge_degree(e)));
    order
}

struct Search<'a, T> {
    skeleton: &'a Skeleton,
    table: &'a WeightTable<T>,
    order: &'a [usize],
    /// Triangle classes whose last edge is coloured at each depth.
    triangles_at: Vec<Vec<usize>>,
    /// Tetrahedra whose last edge is coloured at each depth.
    tets_at: Vec<Vec<usize>>,
    colouring: Vec<Colour>,
    /// `partial[d]`: product of every factor completed above depth d.
    partial: Vec<CyclotomicElement<T>>,
    total: CyclotomicElement<T>,
    stats: BacktrackStats,
}

impl<T: Coefficient> Search<'_, T> {
    fn descend(&mut self, depth: usize) -> Result<(), TvError> {
        if depth == self.order.len() {
            self.stats.leaves += 1;
            self.total += &self.partial[depth];
            return Ok(());
        }
        let edge = self.order[depth];
        'colours: for c in 0..self.table.colours() as Colour {
            self.stats.visits += 1;
            self.colouring[edge] = c;
            for &f in &self.triangles_at[depth] {
                let [a, b, c] = self.skeleton.triangles()[f].edges.map(|e| self.colouring[e]);
                if !self.table.admissible(a, b, c) {
                    continue 'colours;
                }
            }
            let mut factor = self.table.edge(c).clone();
            for &f in &self.triangles_at[depth] {
                let [a, b, c] = self.skeleton.triangles()[f].edges.map(|e| self.colouring[e]);
                factor *= self.table.triangle(a, b, c)?;
            }
            for &t in &self.tets_at[depth] {
                factor *= self.table.tet(&TetColours::of(self.skeleton, t, &self.colouring))?;
            }
            let next = &self.partial[depth] * &factor;
            self.partial[depth + 1] = next;
            self.descend(depth + 1)?;
        }
        Ok(())
    }
}

/// The state sum with an explicit edge order (a permutation of the edge classes).
pub fn tv_backtrack_ordered<T: Coefficient>(
    skeleton: &Skeleton,
    table: &WeightTable<T>,
    order: &[usize],
) -> Result<(CyclotomicElement<T>, BacktrackStats), TvError> {
    let l = skeleton.num_edges();
    assert_eq!(order.len(), l, "edge order must list every edge once");
    let mut depth_of = vec![usize::MAX; l];
    for (d, &e) in order.iter().enumerate() {
        assert_eq!(depth_of[e], usize::MAX, "edge {e} repeated in order");
        depth_of[e] = d;
    }
    let mut triangles_at = vec![Vec::new(); l.max(1)];
    for (f, tri) in skeleton.triangles().iter().enumerate() {
        let d = tri.edges.iter().map(|&e| depth_of[e]).max().unwrap();
        triangles_at[d].push(f);
    }
    let mut tets_at = vec![Vec::new(); l.max(1)];
    for t in 0..skeleton.num_tetrahedra() {
        let d = skeleton.tet_edges(t).iter().map(|&e| depth_of[e]).max().unwrap();
        tets_at[d].push(t);
    }
    let field = table.field();
    let mut partial = vec![field.zero(); l + 1];
    partial[0] = table.vertex().pow(skeleton.num_vertices() as u32);
    let mut search = Search {
        skeleton,
        table,
        order,
        triangles_at,
        tets_at,
        colouring: vec![0; l],
        partial,
        total: field.zero(),
        stats: BacktrackStats { visits: 1, leaves: 0 },
    };
    search.descend(0)?;
    Ok((search.total, search.stats))
}

pub fn tv_backtrack_with_stats<T: Coefficient>(
    tri: &Triangulation,
    field: &CyclotomicField<T>,
) -> Result<(CyclotomicElement<T>, BacktrackStats), TvError> {
    tri.require_closed()?;
    let sk = tri.skeleton();
    let table = WeightTable::new(field);
    tv_backtrack_ordered(&sk, &table, &sort_edges_by_degree(&sk))
}

pub fn tv_backtrack<T: Coefficient>(
    tri: &Triangulation,
    field: &CyclotomicField<T>,
) -> Result<CyclotomicElement<T>, TvError> {
    tv_backtrack_with_stats(tri, field).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::lens_space;
    use crate::tvcore::{tv_direct, DEFAULT_BUDGET};
    use crate::{ExactField, FloatField};

    fn double() -> Triangulation {
        "tets 2\ntet 0: 1:0123 1:0123 1:0123 1:0123\ntet 1: 0:0123 0:0123 0:0123 0:0123\n"
            .parse()
            .unwrap()
    }

    #[test]
    fn order_is_stable_by_degree() {
        assert_eq!(sort_edges_by_degree(&double().skeleton()), vec![0, 1, 2, 3, 4, 5]);
        let sk = lens_space(5, 2).skeleton();
        let order = sort_edges_by_degree(&sk);
        let mut sorted = order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..sk.num_edges()).collect::<Vec<_>>());
        for w in order.windows(2) {
            let (a, b) = (sk.edge_degree(w[0]), sk.edge_degree(w[1]));
            assert!(a > b || (a == b && w[0] < w[1]));
        }
    }

    #[test]
    fn matches_direct() {
        for tri in [double(), lens_space(3, 1), lens_space(5, 2)] {
            for (r, q) in [(3, 1), (4, 3), (5, 1), (5, 2)] {
                let f = ExactField::new(r, q).unwrap();
                let (bt, stats) = tv_backtrack_with_stats(&tri, &f).unwrap();
                assert_eq!(bt, tv_direct(&tri, &f, DEFAULT_BUDGET).unwrap());
                let sk = tri.skeleton();
                assert!((stats.visits as f64) <= BacktrackStats::visit_bound(r as usize, sk.num_edges()));
            }
        }
    }

    #[test]
    fn any_order_gives_same_sum() {
        let tri = lens_space(4, 1);
        let sk = tri.skeleton();
        let f = ExactField::new(5, 3).unwrap();
        let table = WeightTable::new(&f);
        let canonical: Vec<usize> = (0..sk.num_edges()).collect();
        let reversed: Vec<usize> = canonical.iter().rev().copied().collect();
        let (a, _) = tv_backtrack_ordered(&sk, &table, &canonical).unwrap();
        let (b, _) = tv_backtrack_ordered(&sk, &table, &reversed).unwrap();
        let (c, _) = tv_backtrack_ordered(&sk, &table, &sort_edges_by_degree(&sk)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn float_engine_tracks_exact() {
        let tri = lens_space(5, 1);
        let exact = tv_backtrack(&tri, &ExactField::new(6, 1).unwrap()).unwrap().approx_complex();
        let float = tv_backtrack(&tri, &FloatField::new(6, 1).unwrap()).unwrap().approx_complex();
        assert!((exact.0 - float.0).abs() < 1e-9 && (exact.1 - float.1).abs() < 1e-9);
    }
}
