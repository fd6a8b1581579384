use std::fmt;

use super::{Skeleton, Triangulation};

/// Findings of [`Triangulation::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub closed: bool,
    pub connected: bool,
    pub orientable: bool,
    pub euler_ok: bool,
    /// No edge is identified with itself in reverse.
    pub edges_valid: bool,
    pub first_unglued: Option<(usize, usize)>,
    /// First (tet, face) whose gluing contradicts the orientation built so far.
    pub orientation_violation: Option<(usize, usize)>,
    pub euler_characteristic: i64,
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub tetrahedra: usize,
}

impl ValidationReport {
    /// All checks pass.
    pub fn is_valid(&self) -> bool {
        self.closed && self.connected && self.orientable && self.euler_ok && self.edges_valid
    }
}

/// Signs s(t) ∈ {±1} with s(t)·s(t′)·sign(π) = −1 across every gluing, or the
/// first gluing where no such choice exists.
pub(super) fn orientation(tri: &Triangulation) -> Result<Vec<i8>, (usize, usize)> {
    let n = tri.size();
    let mut sign = vec![0i8; n];
    for root in 0..n {
        if sign[root] != 0 {
            continue;
        }
        sign[root] = 1;
        let mut stack = vec![root];
        while let Some(t) = stack.pop() {
            for f in 0..4 {
                let Some(g) = tri.gluing(t, f) else { continue };
                let want = -sign[t] * g.perm.sign();
                if sign[g.tet] == 0 {
                    sign[g.tet] = want;
                    stack.push(g.tet);
                } else if sign[g.tet] != want {
                    return Err((t, f));
                }
            }
        }
    }
    Ok(sign)
}

impl Triangulation {
    pub fn validate(&self) -> ValidationReport {
        let sk = Skeleton::new(self);
        let chi = sk.euler_characteristic();
        let violation = orientation(self).err();
        ValidationReport {
            closed: self.is_closed() && self.size() > 0,
            connected: sk.dual_graph().is_connected(),
            orientable: violation.is_none(),
            euler_ok: chi == 0,
            edges_valid: sk.reversed_edge().is_none(),
            first_unglued: self.first_unglued(),
            orientation_violation: violation,
            euler_characteristic: chi,
            vertices: sk.num_vertices(),
            edges: sk.num_edges(),
            triangles: sk.num_triangles(),
            tetrahedra: sk.num_tetrahedra(),
        }
    }

    pub fn skeleton(&self) -> Skeleton {
        Skeleton::new(self)
    }

    pub fn dual_graph(&self) -> super::DualGraph {
        Skeleton::new(self).dual_graph()
    }

    pub fn is_orientable(&self) -> bool {
        orientation(self).is_ok()
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "yes"
    } else {
        "no"
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "closed {}", mark(self.closed))?;
        if let Some((t, face)) = self.first_unglued {
            write!(f, " (tet {t} face {face} unglued)")?;
        }
        writeln!(f)?;
        writeln!(f, "connected {}", mark(self.connected))?;
        write!(f, "orientable {}", mark(self.orientable))?;
        if let Some((t, face)) = self.orientation_violation {
            write!(f, " (gluing at tet {t} face {face})")?;
        }
        writeln!(f)?;
        writeln!(f, "edges_valid {}", mark(self.edges_valid))?;
        writeln!(f, "euler_ok {} (chi {})", mark(self.euler_ok), self.euler_characteristic)?;
        writeln!(
            f,
            "counts tets {} vertices {} edges {} triangles {}",
            self.tetrahedra, self.vertices, self.edges, self.triangles
        )
    }
}
