//! Small built-in triangulations.

use super::{Gluing, Perm4, Triangulation};

/// The lens space L(p, q) as `p` tetrahedra around a central edge.
///
/// Tetrahedron `k` has vertices (N, S, v_k, v_{k+1}). Neighbours around the
/// axis share the face through N, S, v_{k+1}; the upper face N v_k v_{k+1} is
/// glued to the lower face S v_{k+q} v_{k+q+1}. Requires `p ≥ 2` and
/// `gcd(p, q) = 1`.
pub fn lens_space(p: usize, q: usize) -> Triangulation {
    assert!(p >= 2, "lens space needs p >= 2");
    assert_eq!(num_integer::gcd(p, q % p), 1, "lens space needs gcd(p, q) = 1");
    let q = q % p;
    let around = Perm4::new([0, 1, 3, 2]).unwrap();
    let flip = Perm4::new([1, 0, 2, 3]).unwrap();
    let gluings = (0..p)
        .map(|k| {
            [
                Some(Gluing { tet: (k + p - q) % p, face: 1, perm: flip }),
                Some(Gluing { tet: (k + q) % p, face: 0, perm: flip }),
                Some(Gluing { tet: (k + 1) % p, face: 3, perm: around }),
                Some(Gluing { tet: (k + p - 1) % p, face: 2, perm: around }),
            ]
        })
        .collect();
    Triangulation::from_gluings(gluings).expect("lens space gluings are involutive")
}

/// A one-tetrahedron triangulation of the 3-sphere.
pub fn one_tetrahedron_s3() -> Triangulation {
    ONE_TET_S3.parse().expect("built-in triangulation parses")
}

const ONE_TET_S3: &str = "tets 1\ntet 0: 0:1023 0:1023 0:0132 0:0132\n";
