use num_integer::Integer;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use tv_core::backtrack::{tv_backtrack, tv_backtrack_ordered};
use tv_core::fpt::{bag_sets, nice_decomposition, tv_fpt};
use tv_core::homology::betti_z2;
use tv_core::treewidth::{greedy_fill_in, make_nice};
use tv_core::triangulation::lens_space;
use tv_core::tvcore::WeightTable;
use tv_core::{ExactField, Triangulation};

fn lens() -> impl Strategy<Value = (usize, usize)> {
    (2usize..11).prop_flat_map(|p| (Just(p), (1..p.max(2))).prop_filter("coprime", |(p, q)| p.gcd(q) == 1))
}

fn field() -> impl Strategy<Value = (i64, i64)> {
    (3i64..6).prop_flat_map(|r| (Just(r), 1..2 * r)).prop_filter("coprime", |(r, q)| r.gcd(q) == 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fpt_matches_backtrack((p, q) in lens(), (r, s) in field()) {
        let tri = lens_space(p, q);
        let f = ExactField::new(r, s).unwrap();
        prop_assert_eq!(tv_fpt(&tri, &f).unwrap(), tv_backtrack(&tri, &f).unwrap());
    }

    #[test]
    fn lens_spaces_validate((p, q) in lens()) {
        let tri = lens_space(p, q);
        let report = tri.validate();
        prop_assert!(report.is_valid());
        prop_assert_eq!(report.euler_characteristic, 0);
        let expected = if p % 2 == 0 { [1, 1, 1, 1] } else { [1, 0, 0, 1] };
        prop_assert_eq!(betti_z2(&tri), expected);
    }

    #[test]
    fn text_round_trip((p, q) in lens()) {
        let tri = lens_space(p, q);
        let back: Triangulation = tri.to_text().parse().unwrap();
        prop_assert_eq!(back, tri);
    }

    #[test]
    fn nice_form_keeps_width((p, q) in lens()) {
        let tri = lens_space(p, q);
        let graph = tri.dual_graph();
        let td = greedy_fill_in(&graph);
        prop_assert!(td.validate(&graph).is_ok());
        let nice = make_nice(&td);
        prop_assert!(nice.validate().is_ok());
        prop_assert_eq!(nice.width(), td.width());
        let k = nice.width();
        let sets = bag_sets(&tri.skeleton(), &nice_decomposition(&tri));
        prop_assert!(sets.current.iter().all(|c| c.len() <= 6 * (k + 1)));
        prop_assert!(sets.current[nice.root].is_empty());
    }

    #[test]
    fn pachner_round_trip((p, q) in lens(), pick in 0usize..64) {
        let tri = lens_space(p, q);
        let sk = tri.skeleton();
        let movable: Vec<usize> = (0..sk.num_triangles()).filter(|&t| tri.pachner_2_3(t).is_ok()).collect();
        prop_assume!(!movable.is_empty());
        let moved = tri.pachner_2_3(movable[pick % movable.len()]).unwrap();
        prop_assert!(moved.validate().is_valid());
        let msk = moved.skeleton();
        let edge = msk.tet_edges(moved.size() - 3)[0];
        prop_assert_eq!(msk.edge_degree(edge), 3);
        prop_assert!(moved.pachner_3_2(edge).unwrap().is_isomorphic(&tri));
        let f = ExactField::new(5, 2).unwrap();
        prop_assert_eq!(tv_fpt(&moved, &f).unwrap(), tv_fpt(&tri, &f).unwrap());
    }

    #[test]
    fn edge_order_is_irrelevant((p, q) in lens(), order in any::<u64>()) {
        let tri = lens_space(p, q);
        let sk = tri.skeleton();
        let mut perm: Vec<usize> = (0..sk.num_edges()).collect();
        perm.shuffle(&mut StdRng::seed_from_u64(order));
        let f = ExactField::new(4, 1).unwrap();
        let table = WeightTable::new(&f);
        let (v, _) = tv_backtrack_ordered(&sk, &table, &perm).unwrap();
        prop_assert_eq!(v, tv_backtrack(&tri, &f).unwrap());
    }
}
