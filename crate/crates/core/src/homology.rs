//! Z₂ homology of the cell complex of a triangulation and the r = 3 values
//! it determines.
//!
//! With the weights of [`crate::tvcore`], TV_{3,q}(S³) = |v| = 1/2. The
//! values here are scaled to that normalisation: TV_{3,2} = 2^{β₂} · 1/2, and
//! TV_{3,1} is either the same or zero depending on the Euler parity of a
//! basis of H₂(M; Z₂).

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use thiserror::Error;

use crate::cyclotomic::{CyclotomicElement, CyclotomicField};
use crate::scalar::Coefficient;
use crate::triangulation::{Skeleton, Triangulation, TriangulationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
    #[error("the r=3 homology engine needs a closed, connected, orientable triangulation; use a general engine")]
    Unsupported,
    #[error("the r=3 homology engine only evaluates r=3 (got r={0})")]
    WrongR(i64),
    #[error("chain is not a 2-cycle")]
    NotACycle,
}

/// Gaussian elimination state over Z₂, keyed by lowest set bit.
#[derive(Debug, Clone)]
struct Echelon {
    rows: Vec<Option<FixedBitSet>>,
    rank: usize,
}

impl Echelon {
    fn new(len: usize) -> Echelon {
        Echelon { rows: vec![None; len], rank: 0 }
    }

    /// Reduces `v` in place; returns its new pivot, or `None` if it became zero.
    fn reduce(&self, v: &mut FixedBitSet) -> Option<usize> {
        while let Some(p) = v.ones().next() {
            match &self.rows[p] {
                Some(row) => v.symmetric_difference_with(row),
                None => return Some(p),
            }
        }
        None
    }

    /// Adds `v` to the span; false if it was already dependent.
    fn insert(&mut self, mut v: FixedBitSet) -> bool {
        match self.reduce(&mut v) {
            Some(p) => {
                self.rows[p] = Some(v);
                self.rank += 1;
                true
            }
            None => false,
        }
    }
}

/// Boundary maps ∂₁, ∂₂, ∂₃ with entries = incidence multiplicity mod 2,
/// stored column-wise: `d2[f]` is the set of edges on the boundary of triangle f.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMatrices {
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub tetrahedra: usize,
    pub d1: Vec<FixedBitSet>,
    pub d2: Vec<FixedBitSet>,
    pub d3: Vec<FixedBitSet>,
}

fn toggled(len: usize, items: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let mut v = FixedBitSet::with_capacity(len);
    for i in items {
        v.toggle(i);
    }
    v
}

/// Applies a column-stored matrix to a chain.
fn apply(columns: &[FixedBitSet], rows: usize, chain: &FixedBitSet) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(rows);
    for j in chain.ones() {
        out.symmetric_difference_with(&columns[j]);
    }
    out
}

fn rank(columns: &[FixedBitSet], rows: usize) -> usize {
    let mut ech = Echelon::new(rows);
    for c in columns {
        ech.insert(c.clone());
    }
    ech.rank
}

impl BoundaryMatrices {
    pub fn new(sk: &Skeleton) -> BoundaryMatrices {
        let (v, e, f, n) = (sk.num_vertices(), sk.num_edges(), sk.num_triangles(), sk.num_tetrahedra());
        let d1 = sk.edges().iter().map(|ec| toggled(v, ec.vertices)).collect();
        let d2 = sk.triangles().iter().map(|tc| toggled(e, tc.edges)).collect();
        let d3 = (0..n).map(|t| toggled(f, sk.tet_faces(t))).collect();
        let m = BoundaryMatrices { vertices: v, edges: e, triangles: f, tetrahedra: n, d1, d2, d3 };
        for col in &m.d2 {
            assert!(apply(&m.d1, v, col).is_clear(), "∂₁∘∂₂ ≠ 0");
        }
        for col in &m.d3 {
            assert!(apply(&m.d2, e, col).is_clear(), "∂₂∘∂₃ ≠ 0");
        }
        m
    }

    /// ∂₂ of a chain of triangles.
    pub fn boundary2(&self, chain: &FixedBitSet) -> FixedBitSet {
        apply(&self.d2, self.edges, chain)
    }

    /// ∂₃ of a chain of tetrahedra.
    pub fn boundary3(&self, chain: &FixedBitSet) -> FixedBitSet {
        apply(&self.d3, self.triangles, chain)
    }

    pub fn ranks(&self) -> [usize; 3] {
        [rank(&self.d1, self.vertices), rank(&self.d2, self.edges), rank(&self.d3, self.triangles)]
    }

    /// (β₀, β₁, β₂, β₃) over Z₂.
    pub fn betti(&self) -> [usize; 4] {
        let [r1, r2, r3] = self.ranks();
        [self.vertices - r1, self.edges - r1 - r2, self.triangles - r2 - r3, self.tetrahedra - r3]
    }

    /// True when a chain of triangles lies in the image of ∂₃.
    pub fn is_boundary(&self, chain: &FixedBitSet) -> bool {
        let mut ech = Echelon::new(self.triangles);
        for c in &self.d3 {
            ech.insert(c.clone());
        }
        ech.reduce(&mut chain.clone()).is_none()
    }

    /// 2-cycles whose classes form a basis of H₂ = ker ∂₂ / im ∂₃.
    pub fn h2_basis(&self) -> Vec<FixedBitSet> {
        let f = self.triangles;
        // kernel of ∂₂ by elimination with a combination record
        let mut rows: Vec<Option<(FixedBitSet, FixedBitSet)>> = vec![None; self.edges];
        let mut kernel = Vec::new();
        for (j, col) in self.d2.iter().enumerate() {
            let mut v = col.clone();
            let mut combo = toggled(f, [j]);
            loop {
                match v.ones().next() {
                    None => {
                        kernel.push(combo);
                        break;
                    }
                    Some(p) => match &rows[p] {
                        Some((rv, rc)) => {
                            v.symmetric_difference_with(rv);
                            combo.symmetric_difference_with(rc);
                        }
                        None => {
                            rows[p] = Some((v, combo));
                            break;
                        }
                    },
                }
            }
        }
        let mut span = Echelon::new(f);
        for c in &self.d3 {
            span.insert(c.clone());
        }
        let mut basis = Vec::new();
        for z in kernel {
            let mut reduced = z.clone();
            if span.reduce(&mut reduced).is_some() {
                span.insert(reduced);
                basis.push(z);
            }
        }
        basis
    }
}

/// Parity of χ of the closed surface carried by a 2-cycle. Around each edge
/// the sides belonging to the cycle are paired in their cyclic order,
/// starting from the first one met; triangle corners joined through paired
/// sides give the surface's vertices.
pub fn euler_parity(sk: &Skeleton, cycle: &FixedBitSet) -> Result<bool, HomologyError> {
    let f: usize = cycle.count_ones(..);
    let mut edges = 0usize;
    let mut parent: Vec<usize> = (0..3 * sk.num_triangles()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in 0..sk.num_edges() {
        let sides: Vec<_> = sk.edge_link(e).into_iter().filter(|s| cycle.contains(s.triangle)).collect();
        if sides.len() % 2 == 1 {
            return Err(HomologyError::NotACycle);
        }
        edges += sides.len() / 2;
        for pair in sides.chunks_exact(2) {
            for end in 0..2 {
                let a = find(&mut parent, 3 * pair[0].triangle + pair[0].corners[end]);
                let b = find(&mut parent, 3 * pair[1].triangle + pair[1].corners[end]);
                parent[a] = b;
            }
        }
    }
    let mut vertices = 0;
    for t in cycle.ones() {
        for k in 0..3 {
            let x = 3 * t + k;
            if find(&mut parent, x) == x {
                vertices += 1;
            }
        }
    }
    let chi = vertices as i64 - edges as i64 + f as i64;
    Ok(chi.rem_euclid(2) == 1)
}

/// The r = 3 evaluation through H₂(M; Z₂).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tv3 {
    pub beta2: usize,
    /// |H₂(M; Z₂)| = 2^{β₂}.
    pub h2_order: BigUint,
    /// Some basis class has odd Euler characteristic.
    pub odd_class: bool,
}

impl Tv3 {
    /// TV_{3,q} for odd q (q ∈ {1, 5}) is zero under an odd class, else equals the even case.
    pub fn vanishes_for_odd_q(&self) -> bool {
        self.odd_class
    }

    /// TV_{3,q} as an element of the given field, which must have r = 3.
    pub fn value<T: Coefficient>(&self, field: &CyclotomicField<T>) -> Result<CyclotomicElement<T>, HomologyError> {
        if field.r() != 3 {
            return Err(HomologyError::WrongR(field.r()));
        }
        if field.q() % 2 == 1 && self.odd_class {
            return Ok(field.zero());
        }
        // 2^{β₂} · TV(S³), TV(S³) = 1/2
        let two = T::one() + T::one();
        let mut c = T::one() / two.clone();
        for _ in 0..self.beta2 {
            c = c * two.clone();
        }
        let mut coeffs = vec![T::zero(); field.degree()];
        coeffs[0] = c;
        Ok(field.from_coefficients(coeffs).expect("degree matches"))
    }
}

pub fn betti_z2(tri: &Triangulation) -> [usize; 4] {
    BoundaryMatrices::new(&tri.skeleton()).betti()
}

pub fn tv3(tri: &Triangulation) -> Result<Tv3, HomologyError> {
    tri.require_closed()?;
    let report = tri.validate();
    if !report.connected || !report.orientable {
        return Err(HomologyError::Unsupported);
    }
    let sk = tri.skeleton();
    let m = BoundaryMatrices::new(&sk);
    let basis = m.h2_basis();
    let mut odd_class = false;
    for c in &basis {
        odd_class |= euler_parity(&sk, c)?;
    }
    Ok(Tv3 { beta2: basis.len(), h2_order: BigUint::from(1u8) << basis.len(), odd_class })
}

/// TV_{3,q} by the homology route.
pub fn tv_homology<T: Coefficient>(
    tri: &Triangulation,
    field: &CyclotomicField<T>,
) -> Result<CyclotomicElement<T>, HomologyError> {
    if field.r() != 3 {
        return Err(HomologyError::WrongR(field.r()));
    }
    tv3(tri)?.value(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backtrack::tv_backtrack;
    use crate::triangulation::{lens_space, one_tetrahedron_s3};
    use crate::ExactField;
    use rand::{Rng, SeedableRng};

    fn double() -> Triangulation {
        "tets 2\ntet 0: 1:0123 1:0123 1:0123 1:0123\ntet 1: 0:0123 0:0123 0:0123 0:0123\n"
            .parse()
            .unwrap()
    }

    #[test]
    fn sphere_betti_numbers() {
        assert_eq!(betti_z2(&double()), [1, 0, 0, 1]);
        assert_eq!(betti_z2(&one_tetrahedron_s3()), [1, 0, 0, 1]);
        let m = BoundaryMatrices::new(&double().skeleton());
        // ∂₂ of the doubled simplex is the triangle-edge incidence of ∂Δ³
        assert!(m.d2.iter().all(|c| c.count_ones(..) == 3));
        assert!(m.h2_basis().is_empty());
    }

    #[test]
    fn lens_space_betti_numbers() {
        for (p, q) in [(2, 1), (3, 1), (4, 1), (5, 2), (6, 1), (8, 3)] {
            let b = betti_z2(&lens_space(p, q));
            let expected = if p % 2 == 0 { [1, 1, 1, 1] } else { [1, 0, 0, 1] };
            assert_eq!(b, expected, "L({p},{q})");
        }
    }

    #[test]
    fn empty_cycle_is_even() {
        let sk = double().skeleton();
        assert!(!euler_parity(&sk, &FixedBitSet::with_capacity(sk.num_triangles())).unwrap());
    }

    #[test]
    fn sphere_around_a_tetrahedron_is_even() {
        let tri = lens_space(5, 1);
        let sk = tri.skeleton();
        let m = BoundaryMatrices::new(&sk);
        for t in 0..sk.num_tetrahedra() {
            let c = m.boundary3(&toggled(sk.num_tetrahedra(), [t]));
            assert!(m.boundary2(&c).is_clear());
            assert!(!euler_parity(&sk, &c).unwrap());
        }
    }

    #[test]
    fn projective_plane_is_odd() {
        let tri = lens_space(2, 1);
        let t = tv3(&tri).unwrap();
        assert_eq!(t.beta2, 1);
        assert!(t.odd_class);
        let t4 = tv3(&lens_space(4, 1)).unwrap();
        assert!(!t4.odd_class);
    }

    #[test]
    fn parity_is_constant_on_classes() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for tri in [lens_space(2, 1), lens_space(4, 1), lens_space(6, 1), lens_space(8, 3)] {
            let sk = tri.skeleton();
            let m = BoundaryMatrices::new(&sk);
            for c in m.h2_basis() {
                assert!(m.boundary2(&c).is_clear());
                assert!(!m.is_boundary(&c));
                let base = euler_parity(&sk, &c).unwrap();
                for _ in 0..20 {
                    let x = toggled(sk.num_tetrahedra(), (0..sk.num_tetrahedra()).filter(|_| rng.gen_bool(0.5)));
                    let mut shifted = c.clone();
                    shifted.symmetric_difference_with(&m.boundary3(&x));
                    assert_eq!(euler_parity(&sk, &shifted).unwrap(), base);
                }
            }
        }
    }

    #[test]
    fn agrees_with_state_sum() {
        for tri in [double(), one_tetrahedron_s3(), lens_space(2, 1), lens_space(3, 1), lens_space(4, 1), lens_space(6, 1)] {
            for q in [1, 2, 4, 5] {
                let f = ExactField::new(3, q).unwrap();
                assert_eq!(tv_homology(&tri, &f).unwrap(), tv_backtrack(&tri, &f).unwrap(), "q={q}");
            }
        }
    }

    #[test]
    fn rejects_unsupported_inputs() {
        let two = double().disjoint_union(&double());
        assert_eq!(tv3(&two), Err(HomologyError::Unsupported));
        let f = ExactField::new(5, 1).unwrap();
        assert_eq!(tv_homology(&double(), &f), Err(HomologyError::WrongR(5)));
    }
}
