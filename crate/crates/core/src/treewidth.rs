//! Tree decompositions of the dual graph.
//!
//! [`greedy_fill_in`] eliminates nodes in minimum fill-in order (ties by
//! smallest index) and makes one bag per eliminated node; [`make_nice`]
//! turns any valid decomposition into leaf/introduce/forget/join form with
//! an empty root bag.

use std::collections::BTreeSet;
use std::fmt;

use crate::triangulation::DualGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    /// Sorted tetrahedron indices per tree node.
    pub bags: Vec<Vec<usize>>,
    pub parent: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TdViolation {
    /// Parent links do not form a single rooted tree.
    NotATree,
    /// Property (1): tetrahedron in no bag.
    MissingTetrahedron(usize),
    /// Property (2): no bag holds both ends of a gluing.
    UncoveredGluing(usize, usize),
    /// Property (3): bags holding the tetrahedron are not connected.
    DisconnectedOccurrences(usize),
}

impl fmt::Display for TdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TdViolation::NotATree => write!(f, "parent links do not form a rooted tree"),
            TdViolation::MissingTetrahedron(t) => write!(f, "property (1): tetrahedron {t} is in no bag"),
            TdViolation::UncoveredGluing(a, b) => {
                write!(f, "property (2): no bag contains both {a} and {b}, which are glued")
            }
            TdViolation::DisconnectedOccurrences(t) => {
                write!(f, "property (3): bags containing tetrahedron {t} are not connected")
            }
        }
    }
}

impl TreeDecomposition {
    /// One bag holding all `n` tetrahedra.
    pub fn single_bag(n: usize) -> TreeDecomposition {
        TreeDecomposition { bags: vec![(0..n).collect()], parent: vec![None] }
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// max |B| − 1.
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn root(&self) -> Option<usize> {
        self.parent.iter().position(Option::is_none)
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.bags.len()];
        for (i, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                ch[p].push(i);
            }
        }
        ch
    }

    /// Checks the three decomposition properties against `graph`.
    pub fn validate(&self, graph: &DualGraph) -> Result<(), TdViolation> {
        let k = self.bags.len();
        if k == 0 || self.parent.len() != k || self.parent.iter().filter(|p| p.is_none()).count() != 1 {
            return Err(TdViolation::NotATree);
        }
        // every node must reach the root
        for start in 0..k {
            let (mut node, mut steps) = (start, 0);
            while let Some(p) = self.parent[node] {
                if p >= k || steps > k {
                    return Err(TdViolation::NotATree);
                }
                node = p;
                steps += 1;
            }
        }
        let sets: Vec<BTreeSet<usize>> = self.bags.iter().map(|b| b.iter().copied().collect()).collect();
        for t in 0..graph.nodes {
            let holders: Vec<usize> = (0..k).filter(|&i| sets[i].contains(&t)).collect();
            if holders.is_empty() {
                return Err(TdViolation::MissingTetrahedron(t));
            }
            let tops = holders
                .iter()
                .filter(|&&i| self.parent[i].is_none_or(|p| !sets[p].contains(&t)))
                .count();
            if tops != 1 {
                return Err(TdViolation::DisconnectedOccurrences(t));
            }
        }
        for &(a, _, b, _) in &graph.arcs {
            if !sets.iter().any(|s| s.contains(&a) && s.contains(&b)) {
                return Err(TdViolation::UncoveredGluing(a, b));
            }
        }
        Ok(())
    }
}

/// Minimum fill-in elimination. Loops are ignored and parallel arcs merged.
/// Each component gets its own tree; extra roots hang below the root of the
/// last component eliminated.
pub fn greedy_fill_in(graph: &DualGraph) -> TreeDecomposition {
    let n = graph.nodes;
    let mut adj: Vec<BTreeSet<usize>> =
        graph.simple_adjacency().into_iter().map(|l| l.into_iter().collect()).collect();
    let mut eliminated = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut bags = Vec::with_capacity(n);
    let mut later = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !eliminated[v])
            .min_by_key(|&v| (fill_in(&adj, v), v))
            .expect("uneliminated node remains");
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &a in &nbrs {
            adj[a].remove(&v);
        }
        adj[v].clear();
        eliminated[v] = true;
        let mut bag = nbrs.clone();
        bag.push(v);
        bag.sort_unstable();
        order.push(v);
        bags.push(bag);
        later.push(nbrs);
    }
    let mut position = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut parent: Vec<Option<usize>> =
        later.iter().map(|nbrs| nbrs.iter().map(|&u| position[u]).min()).collect();
    if let Some(last) = n.checked_sub(1) {
        for p in parent.iter_mut().take(last) {
            if p.is_none() {
                *p = Some(last);
            }
        }
    }
    TreeDecomposition { bags, parent }
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let nbrs: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NiceKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

impl fmt::Display for NiceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NiceKind::Leaf => write!(f, "leaf"),
            NiceKind::Introduce(t) => write!(f, "introduce {t}"),
            NiceKind::Forget(t) => write!(f, "forget {t}"),
            NiceKind::Join => write!(f, "join"),
        }
    }
}

/// Nodes are stored children first, so index order is a valid bottom-up order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub kinds: Vec<NiceKind>,
    pub children: Vec<Vec<usize>>,
    pub root: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NicenessViolation {
    pub node: usize,
    pub reason: &'static str,
}

impl fmt::Display for NicenessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {}: {}", self.node, self.reason)
    }
}

impl NiceTreeDecomposition {
    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.bags.len()];
        for (i, ch) in self.children.iter().enumerate() {
            for &c in ch {
                parent[c] = Some(i);
            }
        }
        parent
    }

    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        TreeDecomposition { bags: self.bags.clone(), parent: self.parents() }
    }

    /// Checks every node's tag against its bag and children.
    pub fn validate(&self) -> Result<(), NicenessViolation> {
        let bad = |node, reason| Err(NicenessViolation { node, reason });
        if !self.bags[self.root].is_empty() {
            return bad(self.root, "root bag is not empty");
        }
        for (i, kind) in self.kinds.iter().enumerate() {
            let ch = &self.children[i];
            if ch.iter().any(|&c| c >= i) {
                return bad(i, "child stored after parent");
            }
            let bag = &self.bags[i];
            match *kind {
                NiceKind::Leaf => {
                    if !ch.is_empty() || bag.len() != 1 {
                        return bad(i, "leaf must have no children and one tetrahedron");
                    }
                }
                NiceKind::Join => {
                    if ch.len() != 2 || self.bags[ch[0]] != *bag || self.bags[ch[1]] != *bag {
                        return bad(i, "join needs two children with identical bags");
                    }
                }
                NiceKind::Introduce(t) => {
                    if ch.len() != 1 || bag.binary_search(&t).is_err() {
                        return bad(i, "introduce must add its tetrahedron to a single child");
                    }
                    let mut expect = self.bags[ch[0]].clone();
                    if expect.binary_search(&t).is_ok() {
                        return bad(i, "introduced tetrahedron already present");
                    }
                    expect.push(t);
                    expect.sort_unstable();
                    if expect != *bag {
                        return bad(i, "introduce bag is not child plus one");
                    }
                }
                NiceKind::Forget(t) => {
                    if ch.len() != 1 || bag.binary_search(&t).is_ok() {
                        return bad(i, "forget must drop its tetrahedron from a single child");
                    }
                    let mut expect = bag.clone();
                    expect.push(t);
                    expect.sort_unstable();
                    if expect != self.bags[ch[0]] {
                        return bad(i, "forget bag is not child minus one");
                    }
                }
            }
        }
        Ok(())
    }

    /// Text listing: `width k`, then one `node i: kind [children] {bag}` per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("width {}\nnodes {}\nroot {}\n", self.width(), self.len(), self.root);
        for i in 0..self.len() {
            let ch: Vec<String> = self.children[i].iter().map(usize::to_string).collect();
            let bag: Vec<String> = self.bags[i].iter().map(usize::to_string).collect();
            out.push_str(&format!("node {i}: {} children [{}] bag {{{}}}\n", self.kinds[i], ch.join(" "), bag.join(" ")));
        }
        out
    }

    fn push(&mut self, bag: Vec<usize>, kind: NiceKind, children: Vec<usize>) -> usize {
        self.bags.push(bag);
        self.kinds.push(kind);
        self.children.push(children);
        self.bags.len() - 1
    }

    /// Forgets then introduces single tetrahedra until node `from` reaches `target`.
    fn morph(&mut self, mut from: usize, target: &[usize]) -> usize {
        let current = self.bags[from].clone();
        for &t in current.iter().filter(|t| target.binary_search(t).is_err()) {
            let bag: Vec<usize> = self.bags[from].iter().copied().filter(|&x| x != t).collect();
            from = self.push(bag, NiceKind::Forget(t), vec![from]);
        }
        for &t in target.iter().filter(|t| current.binary_search(t).is_err()) {
            let mut bag = self.bags[from].clone();
            bag.push(t);
            bag.sort_unstable();
            from = self.push(bag, NiceKind::Introduce(t), vec![from]);
        }
        from
    }
}

/// Converts a valid decomposition into nice form with the same width.
pub fn make_nice(td: &TreeDecomposition) -> NiceTreeDecomposition {
    let mut nice = NiceTreeDecomposition { bags: Vec::new(), kinds: Vec::new(), children: Vec::new(), root: 0 };
    let root = td.root().expect("decomposition has a root");
    let children = td.children();

    // explicit post-order to avoid deep recursion on long paths
    let mut built: Vec<Option<usize>> = vec![None; td.len()];
    let mut stack = vec![(root, false)];
    while let Some((node, expanded)) = stack.pop() {
        if !expanded {
            stack.push((node, true));
            for &c in children[node].iter().rev() {
                stack.push((c, false));
            }
            continue;
        }
        let bag = &td.bags[node];
        let mut parts: Vec<usize> = children[node]
            .iter()
            .map(|&c| {
                let sub = built[c].expect("child built first");
                nice.morph(sub, bag)
            })
            .collect();
        if parts.is_empty() {
            let top = match bag.first() {
                Some(&first) => {
                    let leaf = nice.push(vec![first], NiceKind::Leaf, Vec::new());
                    nice.morph(leaf, bag)
                }
                None => panic!("empty bag without children"),
            };
            parts.push(top);
        }
        let mut acc = parts[0];
        for &p in &parts[1..] {
            acc = nice.push(bag.clone(), NiceKind::Join, vec![acc, p]);
        }
        built[node] = Some(acc);
    }
    let top = built[root].expect("root built");
    nice.root = nice.morph(top, &[]);
    nice
}
