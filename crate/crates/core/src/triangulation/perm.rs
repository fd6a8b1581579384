use std::fmt;
use std::str::FromStr;

/// A permutation of the four vertices of a tetrahedron, stored as its image list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm4([u8; 4]);

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    /// Returns `None` unless `images` is a permutation of `0..4`.
    pub fn new(images: [u8; 4]) -> Option<Perm4> {
        let mut seen = [false; 4];
        for &i in &images {
            if i > 3 || std::mem::replace(&mut seen[i as usize], true) {
                return None;
            }
        }
        Some(Perm4(images))
    }

    #[inline]
    pub fn apply(self, v: usize) -> usize {
        self.0[v] as usize
    }

    pub fn images(self) -> [u8; 4] {
        self.0
    }

    pub fn inverse(self) -> Perm4 {
        let mut inv = [0u8; 4];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        Perm4(inv)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: Perm4) -> Perm4 {
        Perm4(other.0.map(|i| self.0[i as usize]))
    }

    /// +1 for even permutations, −1 for odd.
    pub fn sign(self) -> i8 {
        let mut inversions = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// All 24 permutations in lexicographic order.
    pub fn all() -> impl Iterator<Item = Perm4> {
        (0..256u32).filter_map(|code| {
            let images = [0, 1, 2, 3].map(|k| ((code >> (2 * (3 - k))) & 3) as u8);
            Perm4::new(images)
        })
    }
}

impl fmt::Display for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm4({self})")
    }
}

impl FromStr for Perm4 {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let digits: Vec<u8> = s.bytes().map(|b| b.wrapping_sub(b'0')).collect();
        let arr: [u8; 4] = digits
            .try_into()
            .map_err(|_| format!("vertex map {s:?} must have exactly four digits"))?;
        Perm4::new(arr).ok_or_else(|| format!("vertex map {s:?} is not a permutation of 0123"))
    }
}
