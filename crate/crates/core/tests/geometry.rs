mod common;

use common::{cloud, covariance, euclid, jacobi_eigen, preference_from_scratch, random_rotation};
use laat_core::geometry::*;
use laat_core::LaatError;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn uniform_cloud(n: usize, dim: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
    cloud(&rows)
}

/// Neighbor lists straight from pairwise distances, before any filtering.
fn raw_lists(c: &PointCloud, r: f64) -> Vec<Vec<u32>> {
    (0..c.len())
        .map(|i| {
            (0..c.len())
                .filter(|&j| j != i && euclid(c.point(i), c.point(j)) <= r)
                .map(|j| j as u32)
                .collect()
        })
        .collect()
}

/// The degeneracy filter applied by repeated full passes.
fn filtered_lists(c: &PointCloud, r: f64) -> (Vec<bool>, Vec<Vec<u32>>) {
    let mut lists = raw_lists(c, r);
    let mut active = vec![true; c.len()];
    loop {
        let mut changed = false;
        for i in 0..c.len() {
            if active[i] && lists[i].len() < c.dim() {
                active[i] = false;
                changed = true;
            }
        }
        for i in 0..c.len() {
            if active[i] {
                lists[i].retain(|&j| active[j as usize]);
            } else {
                lists[i].clear();
            }
        }
        if !changed {
            return (active, lists);
        }
    }
}

#[test]
fn collinear_triple_middle_point() {
    let c = cloud(&[vec![0.0, 0.0], vec![0.5, 0.0], vec![1.0, 0.0]]);
    let index = NeighborhoodIndex::build(&c, 1.0).unwrap();
    assert_eq!(index.neighbors(1), &[0, 2]);
    assert!(index.eigenvalues(1)[1].abs() < 1e-15);
    let v1 = index.eigenvector(1, 0);
    assert!((v1[0].abs() - 1.0).abs() < 1e-12 && v1[1].abs() < 1e-12);
}

#[test]
fn unit_cube_counts_match_pairwise_scan() {
    let c = uniform_cloud(100, 3, 11);
    let index = NeighborhoodIndex::build(&c, 0.3).unwrap();
    let (active, lists) = filtered_lists(&c, 0.3);
    for i in 0..c.len() {
        assert_eq!(index.is_active(i), active[i]);
        assert_eq!(index.neighbors(i).len(), lists[i].len(), "point {i}");
    }
}

#[test]
fn lists_match_pairwise_scan_at_two_thousand_points() {
    let c = uniform_cloud(2000, 3, 5);
    let index = NeighborhoodIndex::build(&c, 0.08).unwrap();
    let (active, lists) = filtered_lists(&c, 0.08);
    assert!(active.iter().any(|a| !a), "radius should deactivate some points");
    for i in 0..c.len() {
        assert_eq!(index.neighbors(i), lists[i].as_slice(), "point {i}");
    }
    let brute = NeighborhoodIndex::build_brute_force(&c, 0.08).unwrap();
    for i in 0..c.len() {
        assert_eq!(index.neighbors(i), brute.neighbors(i));
    }
}

#[test]
fn radius_and_filter_errors() {
    let c = uniform_cloud(10, 3, 1);
    assert!(matches!(NeighborhoodIndex::build(&c, 0.0), Err(LaatError::InvalidArgument(_))));
    assert!(matches!(NeighborhoodIndex::build(&c, -1.0), Err(LaatError::InvalidArgument(_))));
    assert!(matches!(
        NeighborhoodIndex::build(&c, 1e-6),
        Err(LaatError::EmptyAfterFilter { min_size: 3 })
    ));
}

#[test]
fn eigenvalues_match_jacobi_on_fifty_point_neighborhood() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // anisotropic blob so the spectrum is well separated
    let rows: Vec<Vec<f64>> = (0..50)
        .map(|_| {
            let g: [f64; 3] = [
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            ];
            vec![3.0 * g[0], 1.0 * g[1] + 0.5 * g[0], 0.3 * g[2]]
        })
        .collect();
    let c = cloud(&rows);
    let index = NeighborhoodIndex::build(&c, 1e3).unwrap();
    let all: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    let (vals, _) = jacobi_eigen(covariance(&all));
    let total: f64 = vals.iter().sum();
    let lam = normalized_eigenvalues(&index, 0).unwrap();
    for (a, b) in lam.iter().zip(&vals) {
        assert!((a - b / total).abs() <= 1e-9, "{lam:?} vs {vals:?}");
    }
}

#[test]
fn isotropic_gaussian_has_equal_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rows: Vec<Vec<f64>> = (0..20_000)
        .map(|_| (0..3).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    let c = cloud(&rows);
    // one point sees everything
    let index = NeighborhoodIndex::build_brute_force(&c, 1e3).unwrap();
    for l in normalized_eigenvalues(&index, 0).unwrap() {
        assert!((l - 1.0 / 3.0).abs() < 0.05);
    }
}

#[test]
fn line_segment_spectrum() {
    let rows: Vec<Vec<f64>> = (0..7).map(|k| vec![0.25 * k as f64, 0.0]).collect();
    let c = cloud(&rows);
    let index = NeighborhoodIndex::build(&c, 10.0).unwrap();
    let lam = normalized_eigenvalues(&index, 3).unwrap();
    assert!((lam[0] - 1.0).abs() < 1e-15 && lam[1].abs() < 1e-15);
}

#[test]
fn weights_match_direct_cosines() {
    let c = uniform_cloud(40, 3, 21);
    let index = NeighborhoodIndex::build(&c, 0.6).unwrap();
    for i in index.active_ids().take(10) {
        for &j in index.neighbors(i) {
            let j = j as usize;
            let w = jump_alignment_weights(&c, &index, i, j).unwrap();
            let jump: Vec<f64> = c.point(j).iter().zip(c.point(i)).map(|(a, b)| a - b).collect();
            let len = euclid(c.point(i), c.point(j));
            let cos: Vec<f64> = (0..3)
                .map(|d| {
                    let v = index.eigenvector(i, d);
                    (v.iter().zip(&jump).map(|(a, b)| a * b).sum::<f64>() / len).abs()
                })
                .collect();
            let s: f64 = cos.iter().sum();
            for d in 0..3 {
                assert!((w[d] - cos[d] / s).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn parallel_jump_in_three_dimensions() {
    let c = cloud(&[
        vec![0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0],
        vec![-1.0, 0.2, 0.0],
        vec![0.1, 0.0, 0.3],
    ]);
    let mut index = NeighborhoodIndex::build(&c, 5.0).unwrap();
    index.set_eigenvectors(0, &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
    assert_eq!(jump_alignment_weights(&c, &index, 0, 1).unwrap(), vec![1.0, 0.0, 0.0]);
}

#[test]
fn preference_matches_from_scratch_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        // centre plus ten neighbors, all within the radius of the centre
        let mut rows = vec![vec![0.0, 0.0, 0.0]];
        for _ in 0..10 {
            rows.push(vec![
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.2..0.2),
                rng.random_range(-0.1..0.1),
            ]);
        }
        let c = cloud(&rows);
        let index = NeighborhoodIndex::build_brute_force(&c, 10.0).unwrap();
        let e = alignment_preference(&c, &index, 0, Degeneracy::Strict).unwrap();
        let nbrs: Vec<&[f64]> = rows[1..].iter().map(Vec::as_slice).collect();
        let oracle = preference_from_scratch(&rows[0], &nbrs);
        for (a, b) in e.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-12, "{e:?}\n{oracle:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lists_are_symmetric_and_match_scan(n in 5usize..400, seed in any::<u64>(), r in 0.05f64..0.5) {
        let c = uniform_cloud(n, 3, seed);
        match NeighborhoodIndex::build(&c, r) {
            Ok(index) => {
                let (active, lists) = filtered_lists(&c, r);
                for i in 0..n {
                    prop_assert_eq!(index.is_active(i), active[i]);
                    prop_assert_eq!(index.neighbors(i), lists[i].as_slice());
                    for &j in index.neighbors(i) {
                        prop_assert!(index.neighbors(j as usize).contains(&(i as u32)));
                    }
                }
            }
            Err(LaatError::EmptyAfterFilter { .. }) => {
                let (active, _) = filtered_lists(&c, r);
                prop_assert!(active.iter().all(|a| !a));
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn normalized_quantities_sum_to_one(seed in any::<u64>(), dim in 2usize..5) {
        let c = uniform_cloud(150, dim, seed);
        let index = NeighborhoodIndex::build(&c, 0.6).unwrap();
        for i in index.active_ids() {
            let lam = normalized_eigenvalues(&index, i).unwrap();
            prop_assert!((lam.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            let e = alignment_preference(&c, &index, i, Degeneracy::Strict).unwrap();
            prop_assert!((e.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn preference_ignores_eigenvector_signs(seed in any::<u64>(), flips in prop::collection::vec(any::<bool>(), 3)) {
        let c = uniform_cloud(80, 3, seed);
        let index = NeighborhoodIndex::build(&c, 0.5).unwrap();
        let mut flipped = index.clone();
        for i in index.active_ids() {
            let vecs: Vec<Vec<f64>> = (0..3)
                .map(|d| {
                    let s = if flips[d] { -1.0 } else { 1.0 };
                    index.eigenvector(i, d).iter().map(|x| s * x).collect()
                })
                .collect();
            flipped.set_eigenvectors(i, &vecs);
        }
        for i in index.active_ids() {
            let a = alignment_preference(&c, &index, i, Degeneracy::Strict).unwrap();
            let b = alignment_preference(&c, &flipped, i, Degeneracy::Strict).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn preference_survives_rigid_motion(seed in any::<u64>(), shift in prop::collection::vec(-10.0f64..10.0, 3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = uniform_cloud(120, 3, seed);
        let rot = random_rotation(&mut rng);
        let moved_rows: Vec<Vec<f64>> = c
            .points()
            .iter()
            .map(|p| (0..3).map(|a| (0..3).map(|b| rot[a][b] * p[b]).sum::<f64>() + shift[a]).collect())
            .collect();
        let moved = cloud(&moved_rows);
        let r = 0.4;
        let ia = NeighborhoodIndex::build(&c, r).unwrap();
        let ib = NeighborhoodIndex::build(&moved, r).unwrap();
        let ta = AlignmentTable::build(&c, &ia, Degeneracy::Strict).unwrap();
        let tb = AlignmentTable::build(&moved, &ib, Degeneracy::Strict).unwrap();
        for i in 0..c.len() {
            // a pair right at the radius could flip membership under roundoff
            prop_assume!(ia.neighbors(i) == ib.neighbors(i));
            for (x, y) in ta.row(i).iter().zip(tb.row(i)) {
                prop_assert!((x - y).abs() <= 1e-9, "{} vs {}", x, y);
            }
        }
    }
}
