//! Colours, admissibility, the four weight functions and the brute-force
//! state sum.
//!
//! Colours are stored doubled: a colour θ ∈ {0, ½, …, (r−2)/2} is the
//! integer φ = 2θ ∈ {0, …, r−2}. Every formula below is written in doubled
//! form and halves only where a bracket argument or sign exponent needs θ.
//!
//! Tetrahedron edges are indexed by [`EDGE_SLOTS`] (01, 02, 03, 12, 13, 23),
//! and slot k carries the colour i_k of the standard labelling: the faces
//! opposite vertices 3, 2, 1, 0 carry (i₀,i₁,i₃), (i₀,i₂,i₄), (i₁,i₂,i₅),
//! (i₃,i₄,i₅) and the opposite pairs are (i₀,i₅), (i₁,i₄), (i₂,i₃).

use std::sync::OnceLock;

use thiserror::Error;

use crate::cyclotomic::{CyclotomicElement, CyclotomicField, FieldError};
use crate::scalar::Coefficient;
use crate::triangulation::{edge_slot, Perm4, Skeleton, Triangulation, TriangulationError, EDGE_SLOTS};

/// A doubled colour φ = 2θ.
pub type Colour = u8;

/// One doubled colour per edge class, indexed like [`Skeleton::edges`].
pub type Colouring = Vec<Colour>;

/// Default cap on the number of colourings [`tv_direct`] will enumerate.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Slots of the three edges of each face, indexed by the opposite vertex.
pub const FACE_SLOTS: [[usize; 3]; 4] = [[3, 4, 5], [1, 2, 5], [0, 2, 4], [0, 1, 3]];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TvError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
    #[error("inadmissible triple ({0}, {1}, {2}) in doubled colours")]
    Inadmissible(Colour, Colour, Colour),
    #[error("colour {colour} out of range for r={r}")]
    ColourRange { colour: Colour, r: usize },
    #[error("colouring has {found} entries, expected {expected}")]
    ColouringLength { expected: usize, found: usize },
    #[error("direct enumeration needs {needed} colourings, budget is {budget}")]
    BudgetExceeded { needed: f64, budget: u64 },
}

/// Parity, triangle inequalities and the upper bound a+b+c ≤ 2(r−2), all in doubled form.
#[inline]
pub fn is_admissible_triple(r: usize, a: Colour, b: Colour, c: Colour) -> bool {
    let (a, b, c) = (a as usize, b as usize, c as usize);
    (a + b + c) % 2 == 0 && a <= b + c && b <= a + c && c <= a + b && a + b + c <= 2 * (r - 2)
}

/// The six doubled colours of a tetrahedron, indexed by edge slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TetColours(pub [Colour; 6]);

impl TetColours {
    pub fn of(skeleton: &Skeleton, tet: usize, colouring: &[Colour]) -> TetColours {
        TetColours(skeleton.tet_edges(tet).map(|e| colouring[e]))
    }

    /// Colours of the face opposite vertex `v`.
    pub fn face(&self, v: usize) -> [Colour; 3] {
        FACE_SLOTS[v].map(|s| self.0[s])
    }

    pub fn is_admissible(&self, r: usize) -> bool {
        (0..4).all(|v| {
            let [a, b, c] = self.face(v);
            is_admissible_triple(r, a, b, c)
        })
    }

    /// Colours after relabelling the tetrahedron's vertices by `p`.
    pub fn relabel(&self, p: Perm4) -> TetColours {
        let mut out = [0; 6];
        for (s, &(a, b)) in EDGE_SLOTS.iter().enumerate() {
            out[edge_slot(p.apply(a), p.apply(b))] = self.0[s];
        }
        TetColours(out)
    }

    /// Smallest relabelling under the 24 vertex permutations.
    pub fn canonical(&self) -> TetColours {
        Perm4::all().map(|p| self.relabel(p)).min().expect("24 permutations")
    }
}

fn check_range(r: usize, c: Colour) -> Result<(), TvError> {
    if (c as usize) + 2 > r {
        return Err(TvError::ColourRange { colour: c, r });
    }
    Ok(())
}

fn sign<T: Coefficient>(x: CyclotomicElement<T>, odd: bool) -> CyclotomicElement<T> {
    if odd {
        -x
    } else {
        x
    }
}

/// |v| = |ζ − ζ⁻¹|² / (2r), computed in the field as (2 − ζ² − ζ⁻²)/(2r).
pub fn vertex_weight<T: Coefficient>(field: &CyclotomicField<T>) -> CyclotomicElement<T> {
    let num = field.from_integer(2) - field.zeta_power(2) - field.zeta_power(-2);
    num.checked_div(&field.from_integer(2 * field.r())).expect("2r is invertible")
}

/// |e| = (−1)^φ [φ+1].
pub fn edge_weight<T: Coefficient>(field: &CyclotomicField<T>, c: Colour) -> CyclotomicElement<T> {
    sign(field.bracket(c as usize + 1), c % 2 == 1)
}

pub fn triangle_weight<T: Coefficient>(
    field: &CyclotomicField<T>,
    a: Colour,
    b: Colour,
    c: Colour,
) -> Result<CyclotomicElement<T>, TvError> {
    let r = field.r() as usize;
    if !is_admissible_triple(r, a, b, c) {
        return Err(TvError::Inadmissible(a, b, c));
    }
    let (a, b, c) = (a as usize, b as usize, c as usize);
    let half = (a + b + c) / 2;
    let num = field.bracket_factorial((a + b - c) / 2)
        * field.bracket_factorial((a + c - b) / 2)
        * field.bracket_factorial((b + c - a) / 2);
    let den = field.inverse_bracket_factorial(half + 1)?;
    Ok(sign(num * den, half % 2 == 1))
}

/// Σ_{z_min ≤ z ≤ z_max} (−1)^z [z+1]! / (τ(t,z) κ(t,z)).
pub fn tet_weight<T: Coefficient>(
    field: &CyclotomicField<T>,
    tc: &TetColours,
) -> Result<CyclotomicElement<T>, TvError> {
    let r = field.r() as usize;
    for v in 0..4 {
        let [a, b, c] = tc.face(v);
        if !is_admissible_triple(r, a, b, c) {
            return Err(TvError::Inadmissible(a, b, c));
        }
    }
    let i = tc.0.map(usize::from);
    let faces = [i[0] + i[1] + i[3], i[0] + i[2] + i[4], i[1] + i[2] + i[5], i[3] + i[4] + i[5]].map(|s| s / 2);
    let quads = [i[0] + i[1] + i[4] + i[5], i[0] + i[2] + i[3] + i[5], i[1] + i[2] + i[3] + i[4]].map(|s| s / 2);
    let zmin = *faces.iter().max().unwrap();
    let zmax = *quads.iter().min().unwrap();
    let mut total = field.zero();
    for z in zmin..=zmax {
        if z + 1 >= r {
            break;
        }
        let mut term = field.bracket_factorial(z + 1);
        for &s in &faces {
            term *= &field.inverse_bracket_factorial(z - s)?;
        }
        for &s in &quads {
            term *= &field.inverse_bracket_factorial(s - z)?;
        }
        if z % 2 == 1 {
            total -= &term;
        } else {
            total += &term;
        }
    }
    Ok(total)
}

/// Per-field weights with admissibility lookup and memoised tetrahedron
/// weights. Safe to share across threads.
pub struct WeightTable<T> {
    field: CyclotomicField<T>,
    r: usize,
    vertex: CyclotomicElement<T>,
    edges: Vec<CyclotomicElement<T>>,
    admissible: Vec<bool>,
    triangles: Vec<Option<CyclotomicElement<T>>>,
    tets: Vec<OnceLock<Box<CyclotomicElement<T>>>>,
}

impl<T: Coefficient> WeightTable<T> {
    pub fn new(field: &CyclotomicField<T>) -> WeightTable<T> {
        let r = field.r() as usize;
        let m = r - 1;
        let mut admissible = vec![false; m * m * m];
        let mut triangles = vec![None; m * m * m];
        for a in 0..m as Colour {
            for b in 0..m as Colour {
                for c in 0..m as Colour {
                    let idx = (a as usize * m + b as usize) * m + c as usize;
                    if is_admissible_triple(r, a, b, c) {
                        admissible[idx] = true;
                        triangles[idx] = Some(triangle_weight(field, a, b, c).expect("admissible"));
                    }
                }
            }
        }
        WeightTable {
            field: field.clone(),
            r,
            vertex: vertex_weight(field),
            edges: (0..m as Colour).map(|c| edge_weight(field, c)).collect(),
            admissible,
            triangles,
            tets: (0..m.pow(6)).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn field(&self) -> &CyclotomicField<T> {
        &self.field
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of colours, r − 1.
    pub fn colours(&self) -> usize {
        self.r - 1
    }

    pub fn vertex(&self) -> &CyclotomicElement<T> {
        &self.vertex
    }

    pub fn edge(&self, c: Colour) -> &CyclotomicElement<T> {
        &self.edges[c as usize]
    }

    #[inline]
    fn triple_index(&self, a: Colour, b: Colour, c: Colour) -> usize {
        let m = self.r - 1;
        (a as usize * m + b as usize) * m + c as usize
    }

    #[inline]
    pub fn admissible(&self, a: Colour, b: Colour, c: Colour) -> bool {
        self.admissible[self.triple_index(a, b, c)]
    }

    pub fn tet_admissible(&self, tc: &TetColours) -> bool {
        (0..4).all(|v| {
            let [a, b, c] = tc.face(v);
            self.admissible(a, b, c)
        })
    }

    pub fn triangle(&self, a: Colour, b: Colour, c: Colour) -> Result<&CyclotomicElement<T>, TvError> {
        let m = self.r - 1;
        if a as usize >= m || b as usize >= m || c as usize >= m {
            return Err(TvError::Inadmissible(a, b, c));
        }
        self.triangles[self.triple_index(a, b, c)].as_ref().ok_or(TvError::Inadmissible(a, b, c))
    }

    /// Memoised [`tet_weight`]; entries are filled per symmetry orbit.
    pub fn tet(&self, tc: &TetColours) -> Result<&CyclotomicElement<T>, TvError> {
        for &c in &tc.0 {
            check_range(self.r, c)?;
        }
        if !self.tet_admissible(tc) {
            let bad = (0..4).map(|v| tc.face(v)).find(|&[a, b, c]| !self.admissible(a, b, c)).unwrap();
            return Err(TvError::Inadmissible(bad[0], bad[1], bad[2]));
        }
        let slot = &self.tets[self.tet_index(tc)];
        if let Some(w) = slot.get() {
            return Ok(w);
        }
        let canon = tc.canonical();
        let rep = self.tets[self.tet_index(&canon)]
            .get_or_init(|| Box::new(tet_weight(&self.field, &canon).expect("admissible")));
        Ok(slot.get_or_init(|| rep.clone()))
    }

    fn tet_index(&self, tc: &TetColours) -> usize {
        let m = self.r - 1;
        tc.0.iter().rev().fold(0, |acc, &c| acc * m + c as usize)
    }
}

impl<T> std::fmt::Debug for WeightTable<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WeightTable(r={})", self.r)
    }
}

/// Eq. (1): product of all vertex, edge, triangle and tetrahedron weights.
pub fn colouring_weight<T: Coefficient>(
    skeleton: &Skeleton,
    table: &WeightTable<T>,
    colouring: &[Colour],
) -> Result<CyclotomicElement<T>, TvError> {
    if colouring.len() != skeleton.num_edges() {
        return Err(TvError::ColouringLength { expected: skeleton.num_edges(), found: colouring.len() });
    }
    for &c in colouring {
        check_range(table.r(), c)?;
    }
    let mut w = table.vertex().pow(skeleton.num_vertices() as u32);
    for &c in colouring {
        w *= table.edge(c);
    }
    for tri in skeleton.triangles() {
        let [a, b, c] = tri.edges.map(|e| colouring[e]);
        w *= table.triangle(a, b, c)?;
    }
    for t in 0..skeleton.num_tetrahedra() {
        w *= table.tet(&TetColours::of(skeleton, t, colouring))?;
    }
    Ok(w)
}

/// True when every triangle class is admissible under `colouring`.
pub fn is_admissible_colouring(skeleton: &Skeleton, r: usize, colouring: &[Colour]) -> bool {
    skeleton.triangles().iter().all(|t| {
        let [a, b, c] = t.edges.map(|e| colouring[e]);
        is_admissible_triple(r, a, b, c)
    })
}

/// Every admissible colouring of a triangulation for one value of r, found
/// by enumerating all (r−1)^ℓ colourings. Independent of q, so one
/// enumeration serves every field with the same r.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleColourings {
    r: usize,
    edges: usize,
    flat: Vec<Colour>,
    enumerated: u64,
}

impl AdmissibleColourings {
    pub fn enumerate(skeleton: &Skeleton, r: usize, budget: u64) -> Result<Self, TvError> {
        let m = r - 1;
        let l = skeleton.num_edges();
        let needed = (m as f64).powi(l as i32);
        if needed > budget as f64 {
            return Err(TvError::BudgetExceeded { needed, budget });
        }
        let triples: Vec<[usize; 3]> = skeleton.triangles().iter().map(|t| t.edges).collect();
        let mut ok = vec![false; m * m * m];
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    ok[(a * m + b) * m + c] = is_admissible_triple(r, a as Colour, b as Colour, c as Colour);
                }
            }
        }
        let mut flat = Vec::new();
        let mut colouring = vec![0 as Colour; l];
        let mut enumerated = 0u64;
        loop {
            enumerated += 1;
            if triples.iter().all(|&[a, b, c]| {
                ok[(colouring[a] as usize * m + colouring[b] as usize) * m + colouring[c] as usize]
            }) {
                flat.extend_from_slice(&colouring);
            }
            // odometer step
            let mut k = 0;
            loop {
                if k == l {
                    return Ok(AdmissibleColourings { r, edges: l, flat, enumerated });
                }
                colouring[k] += 1;
                if (colouring[k] as usize) < m {
                    break;
                }
                colouring[k] = 0;
                k += 1;
            }
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        if self.edges == 0 {
            return 1;
        }
        self.flat.len() / self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of colourings inspected, (r−1)^ℓ.
    pub fn enumerated(&self) -> u64 {
        self.enumerated
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Colour]> {
        self.flat.chunks_exact(self.edges.max(1)).map(move |c| &c[..self.edges])
    }

    pub fn sum_weights<T: Coefficient>(
        &self,
        skeleton: &Skeleton,
        table: &WeightTable<T>,
    ) -> Result<CyclotomicElement<T>, TvError> {
        assert_eq!(table.r(), self.r, "weight table built for a different r");
        let mut total = table.field().zero();
        for c in self.iter() {
            total += &colouring_weight(skeleton, table, c)?;
        }
        Ok(total)
    }
}

/// The state sum by exhaustive enumeration of all (r−1)^ℓ colourings.
pub fn tv_direct<T: Coefficient>(
    tri: &Triangulation,
    field: &CyclotomicField<T>,
    budget: u64,
) -> Result<CyclotomicElement<T>, TvError> {
    tri.require_closed()?;
    let sk = tri.skeleton();
    let table = WeightTable::new(field);
    AdmissibleColourings::enumerate(&sk, table.r(), budget)?.sum_weights(&sk, &table)
}

/// Direct-engine budget from `TV_BUDGET`, falling back to [`DEFAULT_BUDGET`].
pub fn budget_from_env() -> u64 {
    std::env::var("TV_BUDGET")
        .ok()
        .and_then(|s| s.trim().replace('_', "").parse::<f64>().ok())
        .filter(|b| *b >= 0.0)
        .map(|b| b as u64)
        .unwrap_or(DEFAULT_BUDGET)
}
