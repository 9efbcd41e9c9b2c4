use proptest::prelude::*;
use rademacher_clt::cubical::{
    cell_census, expected_intrinsic_volume, intrinsic_volumes, plaquette_covariance,
    plaquette_oracle_covariance, CubicalLattice, CubicalModel,
};
use rademacher_clt::graphs::{
    degree_count, expected_subgraph_count, subgraph_count, ERSample, EdgeIndexer, GraphSpec,
};
use rademacher_clt::util::mc_mean;
use rademacher_clt::{Configuration, RademacherSpace};

#[test]
fn subgraph_means_by_monte_carlo() {
    for (n, g) in [(16, GraphSpec::triangle()), (10, GraphSpec::cycle(4).unwrap()), (12, GraphSpec::path(3).unwrap())] {
        let ix = EdgeIndexer::new(n).unwrap();
        let space = RademacherSpace::homogeneous(ix.edges(), 0.3).unwrap();
        let acc = mc_mean(100_000, 4096, 3, |rng| {
            let w = space.sample(rng);
            subgraph_count(&ERSample::from_configuration(&ix, &w).unwrap(), &g) as f64
        });
        let mean = expected_subgraph_count(n, 0.3, &g).unwrap();
        assert!((acc.mean - mean).abs() <= 4.0 * acc.std_error(), "{}: {} vs {mean}", g.name(), acc.mean);
    }
}

#[test]
fn intrinsic_volume_means_by_monte_carlo() {
    for (d, n) in [(1, 8), (2, 6), (3, 4)] {
        let l = CubicalLattice::new(d, n).unwrap();
        let space = RademacherSpace::homogeneous(l.top_cells(), 0.4).unwrap();
        for model in [CubicalModel::Voxel, CubicalModel::Plaquette] {
            for j in 0..=d {
                let acc = mc_mean(100_000, 4096, 9, |rng| {
                    intrinsic_volumes(&l, &space.sample(rng), model).unwrap()[j]
                });
                let mean = expected_intrinsic_volume(&l, model, 0.4, j).unwrap();
                let tol = 4.0 * acc.std_error() + 1e-9;
                assert!((acc.mean - mean).abs() <= tol, "d={d} {model:?} j={j}");
            }
        }
    }
}

#[test]
fn plaquette_magnitudes() {
    for d in 1..=3 {
        let l = CubicalLattice::new(d, 3).unwrap();
        for i in 0..=d {
            for j in 0..=d {
                let s = plaquette_covariance(&l, 0.3, i, j).unwrap();
                let o = plaquette_oracle_covariance(&l, 0.3, i, j).unwrap();
                assert!((s.abs() - o.abs()).abs() < 1e-12);
                if (i + j) % 2 == 0 {
                    assert!((s - o).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn pattern_file_format() {
    let g = GraphSpec::parse_edge_list("paw", "# triangle with a tail\n4 4\n0 1\n1 2\n0 2\n2 3\n").unwrap();
    assert_eq!(g.automorphism_count(), 2);
    assert!(GraphSpec::parse_edge_list("bad", "3 2\n0 1\n").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_count_is_kept_edge_count(n in 2usize..12, mask in any::<u64>()) {
        let ix = EdgeIndexer::new(n).unwrap();
        let m = ix.edges().min(64);
        let mut w = Configuration::all_minus(ix.edges());
        for k in 0..m {
            w.set(k, mask >> k & 1 == 1);
        }
        let s = ERSample::from_configuration(&ix, &w).unwrap();
        prop_assert_eq!(subgraph_count(&s, &GraphSpec::edge()), w.count_plus() as u64);
        let total: u64 = (0..n).map(|i| degree_count(&s, i)).sum();
        prop_assert_eq!(total, n as u64);
        let degree_sum: usize = s.degrees().iter().sum();
        prop_assert_eq!(degree_sum, 2 * w.count_plus());
    }

    #[test]
    fn indexer_is_bijective(n in 2usize..40) {
        let ix = EdgeIndexer::new(n).unwrap();
        for k in 0..ix.edges() {
            let (a, b) = ix.pair(k);
            prop_assert!(a < b && b < n);
            prop_assert_eq!(ix.index(a, b), k);
            prop_assert_eq!(ix.index(b, a), k);
        }
    }

    #[test]
    fn voxel_volumes_are_additive_on_circles(n in 3usize..12, mask in any::<u64>()) {
        let l = CubicalLattice::new(1, n).unwrap();
        let w = Configuration::from_mask(n, mask & ((1u64 << n) - 1));
        let v = intrinsic_volumes(&l, &w, CubicalModel::Voxel).unwrap();
        let kept = w.count_plus();
        let arcs = if kept == n { 0 } else { (0..n).filter(|&k| w.is_plus(k) && !w.is_plus((k + 1) % n)).count() };
        prop_assert_eq!(v, vec![arcs as f64, kept as f64]);
    }

    #[test]
    fn full_voxel_complex_is_a_torus(d in 1usize..4, n in 3usize..6) {
        let l = CubicalLattice::new(d, n).unwrap();
        let full = Configuration::all_plus(l.top_cells());
        let v = intrinsic_volumes(&l, &full, CubicalModel::Voxel).unwrap();
        prop_assert_eq!(v[0], 0.0);
        let census = cell_census(&l, &full, CubicalModel::Voxel).unwrap();
        for (delta, c) in census.iter().enumerate() {
            prop_assert_eq!(*c as usize, l.cell_count(delta));
        }
    }
}
