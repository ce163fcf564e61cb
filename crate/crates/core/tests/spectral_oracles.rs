mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use posegraph_spectra::dataset::{synth_graph, GraphKind, PhiSource};
use posegraph_spectra::graph::{laplacian, unit_laplacian};
use posegraph_spectra::spectral::{
    algebraic_connectivity, assemble_fim, criteria_from_fim, criteria_from_laplacian, kirchhoff_index,
    spanning_tree_count, spanning_tree_count_exact, verify_bound, weighted_laplacian, CriteriaValues, Criterion,
    WeightScheme,
};
use posegraph_spectra::{InfoMatrix, LaplacianMatrix};

/// Counts spanning trees by trying every `(n-1)`-subset of edges.
fn enumerate_spanning_trees(n: usize, pairs: &[(usize, usize)]) -> u128 {
    fn is_tree(n: usize, pairs: &[(usize, usize)], pick: &[usize]) -> bool {
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(p: &mut [usize], mut a: usize) -> usize {
            while p[a] != a {
                a = p[a];
            }
            a
        }
        for &i in pick {
            let (a, b) = pairs[i];
            let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        true
    }
    fn rec(n: usize, pairs: &[(usize, usize)], start: usize, pick: &mut Vec<usize>, count: &mut u128) {
        if pick.len() == n - 1 {
            if is_tree(n, pairs, pick) {
                *count += 1;
            }
            return;
        }
        let need = n - 1 - pick.len();
        for i in start..=pairs.len().saturating_sub(need) {
            pick.push(i);
            rec(n, pairs, i + 1, pick, count);
            pick.pop();
        }
    }
    if n == 1 {
        return 1;
    }
    let mut count = 0;
    rec(n, pairs, 0, &mut Vec::new(), &mut count);
    count
}

#[test]
fn matrix_tree_matches_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    for n in 2..=8usize {
        for _ in 0..30 {
            let max_extra = (n * (n - 1) / 2 - (n - 1)).min(7);
            let extra = rng.gen_range(0..=max_extra);
            let pairs = random_connected_pairs(&mut rng, n, extra);
            let l = unit_laplacian(&unit_graph(n, &pairs));
            let brute = enumerate_spanning_trees(n, &pairs);
            assert_eq!(spanning_tree_count_exact(&l), Some(brute), "n={n} pairs={pairs:?}");
            assert_eq!(spanning_tree_count(&l).exp().round() as u128, brute);
            checked += 1;
        }
    }
    assert!(checked >= 200);
}

#[test]
fn disconnected_graph_has_no_spanning_tree() {
    let l = unit_laplacian(&unit_graph(4, &[(0, 1), (2, 3)]));
    assert_eq!(spanning_tree_count_exact(&l), Some(0));
    assert_eq!(spanning_tree_count(&l), f64::NEG_INFINITY);
}

#[test]
fn constant_fim_spectrum_is_kronecker_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let n = rng.gen_range(2..=10);
        let extra = rng.gen_range(0..=n);
        let pairs = random_connected_pairs(&mut rng, n, extra);
        let phi = spd(&mut rng, 3);
        let g = graph_from_pairs(n, 3, &pairs, || phi.clone());

        let l = laplacian_by_hand(n, &pairs, &vec![1.0; pairs.len()]);
        let kron = l.kronecker(phi.matrix());
        let y = assemble_fim(&g).unwrap();
        assert!((y.matrix() - &kron).amax() < 1e-12);

        let mu = eig(&l);
        let rho = eig(phi.matrix());
        let mut products: Vec<f64> = mu.iter().flat_map(|m| rho.iter().map(move |r| m * r)).collect();
        products.sort_by(f64::total_cmp);
        let scale = products.last().unwrap().max(1.0);
        for (a, b) in y.spectrum().values().iter().zip(&products) {
            assert!((a - b).abs() <= 1e-9 * scale, "{a} vs {b}");
        }
    }
}

/// `n · trace(L⁺)` from the Moore-Penrose inverse `(L + J/n)⁻¹ − J/n`.
fn kirchhoff_by_pseudo_inverse(l: &DMatrix<f64>) -> f64 {
    let n = l.nrows();
    let j = DMatrix::from_element(n, n, 1.0 / n as f64);
    let pinv = (l + &j).try_inverse().unwrap() - j;
    n as f64 * pinv.trace()
}

#[test]
fn closed_form_indices_of_complete_graphs() {
    for n in 3..=8usize {
        let g = unit_graph(n, &complete_pairs(n));
        let l = unit_laplacian(&g);
        assert_eq!(l.trace(), 2.0 * g.m() as f64);
        assert!((algebraic_connectivity(&l).unwrap() - n as f64).abs() < 1e-9 * n as f64);
        assert_eq!(spanning_tree_count_exact(&l), Some((n as u128).pow(n as u32 - 2)));
        let kf = kirchhoff_index(&l).unwrap();
        assert!(rel(kf, (n - 1) as f64) < 1e-9);
        assert!(rel(kirchhoff_by_pseudo_inverse(l.matrix()), (n - 1) as f64) < 1e-9);
    }
}

#[test]
fn trace_is_twice_edge_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..40 {
        let n = rng.gen_range(2..30);
        let extra = rng.gen_range(0..2 * n);
        let pairs = random_connected_pairs(&mut rng, n, extra);
        assert_eq!(unit_laplacian(&unit_graph(n, &pairs)).trace(), 2.0 * pairs.len() as f64);
    }
}

#[test]
fn a_opt_constant_weight_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        let n = rng.gen_range(3..25);
        let extra = rng.gen_range(0..n);
        let pairs = random_connected_pairs(&mut rng, n, extra);
        let w = rng.gen_range(0.5..40.0);
        let g = unit_graph(n, &pairs);
        let l = laplacian(&g, &vec![w; pairs.len()]).unwrap();
        let kf_unit = kirchhoff_by_pseudo_inverse(&laplacian_by_hand(n, &pairs, &vec![1.0; pairs.len()]));
        let r = criteria_from_laplacian(&l, None).unwrap();
        let nf = n as f64;
        assert!(rel(r.full_dim.a_opt, w * nf * nf / kf_unit) < 1e-9);
        // reduced convention averages over n-1 eigenvalues instead
        assert!(rel(r.a_opt, w * nf * (nf - 1.0) / kf_unit) < 1e-9);
        assert!(rel(r.full_dim.t_opt, 2.0 * pairs.len() as f64 * w / nf) < 1e-12);
    }
}

/// Full-dimension D of the FIM straight from its spectrum: `(Π λ)^(1/(nℓ))` over
/// the nonzero eigenvalues.
fn fim_full_dim_d(y: &DMatrix<f64>, ell: usize) -> f64 {
    let vals = posegraph_spectra::linalg::symmetric_eigenvalues(y);
    let log_sum: f64 = vals[ell..].iter().map(|v| v.ln()).sum();
    (log_sum / y.nrows() as f64).exp()
}

#[test]
fn p0_exponent_on_constant_chains() {
    let phi = InfoMatrix::diagonal(&[11.11, 11.11, 250.0]).unwrap();
    let phi_d = CriteriaValues::of(&phi.eigenvalues()).unwrap().d;
    for n in [5usize, 50, 400] {
        let g = synth_graph(GraphKind::Chain, n, &PhiSource::Constant(phi.clone())).unwrap();
        let y = assemble_fim(&g).unwrap();
        let l_unit = criteria_from_laplacian(&unit_laplacian(&g), None).unwrap();
        let expected = l_unit.full_dim.d_opt * phi_d.powf((n as f64 - 1.0) / n as f64);
        let oracle = fim_full_dim_d(y.matrix(), 3);
        assert!(rel(oracle, expected) < 1e-9, "n={n}: {oracle} vs {expected}");
        let fim_report = criteria_from_fim(&y).unwrap();
        assert!(rel(fim_report.full_dim.d_opt, expected) < 1e-9);
        let scaled = criteria_from_laplacian(&unit_laplacian(&g), Some(&phi)).unwrap();
        assert!(rel(scaled.full_dim.d_opt, expected) < 1e-9);
    }
}

#[test]
fn max_eig_weights_bound_the_fim() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut violations = 0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=50);
        let extra = rng.gen_range(0..=n);
        let pairs = random_connected_pairs(&mut rng, n, extra);
        let mut phis = Vec::new();
        for _ in 0..pairs.len() {
            phis.push(spd(&mut rng, 3));
        }
        let mut it = phis.into_iter();
        let g = graph_from_pairs(n, 3, &pairs, || it.next().unwrap());
        let fim = criteria_from_fim(&assemble_fim(&g).unwrap()).unwrap();
        let lw = weighted_laplacian(&g, WeightScheme::MaxEig).unwrap();
        let lap = criteria_from_laplacian(&lw, Some(&InfoMatrix::identity(3))).unwrap();
        violations += verify_bound(&fim, &lap)
            .violations
            .iter()
            .filter(|v| matches!(v.criterion, Criterion::T | Criterion::D | Criterion::E))
            .count();
    }
    assert_eq!(violations, 0);
}

fn spectrum_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3f64..1e3, 1..12)
}

fn graph_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, Vec<f64>)> {
    (2usize..9, any::<u64>()).prop_flat_map(|(n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let extra = (seed as usize) % (n + 1);
        let pairs = random_connected_pairs(&mut rng, n, extra);
        let m = pairs.len();
        (Just(n), Just(pairs), prop::collection::vec(0.1f64..50.0, m))
    })
}

fn weighted(n: usize, pairs: &[(usize, usize)], w: &[f64]) -> LaplacianMatrix {
    let edges: Vec<_> = pairs.iter().zip(w).map(|(&(a, b), &w)| (a, b, w)).collect();
    LaplacianMatrix::from_weighted_edges(n, &edges, None).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_means_are_ordered(values in spectrum_strategy()) {
        prop_assert!(CriteriaValues::of(&values).unwrap().ordering_holds(1e-12));
    }

    #[test]
    fn criteria_are_homogeneous(values in spectrum_strategy(), c in 0.01f64..100.0) {
        let a = CriteriaValues::of(&values).unwrap();
        let scaled: Vec<f64> = values.iter().map(|v| v * c).collect();
        let b = CriteriaValues::of(&scaled).unwrap();
        for k in Criterion::ALL {
            prop_assert!(rel(b.get(k), c * a.get(k)) < 1e-12);
        }
    }

    #[test]
    fn laplacian_route_criteria_are_ordered((n, pairs, w) in graph_strategy()) {
        let r = criteria_from_laplacian(&weighted(n, &pairs, &w), None).unwrap();
        prop_assert!(r.connected);
        prop_assert!(r.values().ordering_holds(1e-9));
    }

    #[test]
    fn tree_count_ignores_vertex_labels((n, pairs, w) in graph_strategy(), shift in 1usize..8) {
        let relabel: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| ((a + shift) % n, (b + shift) % n)).collect();
        let a = spanning_tree_count(&weighted(n, &pairs, &w));
        let b = spanning_tree_count(&weighted(n, &relabel, &w));
        prop_assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn adding_an_edge_never_lowers_tree_count((n, pairs, w) in graph_strategy(), extra_w in 0.1f64..50.0, pick in any::<u64>()) {
        let missing: Vec<(usize, usize)> = complete_pairs(n).into_iter().filter(|p| !pairs.contains(p)).collect();
        prop_assume!(!missing.is_empty());
        let mut more = pairs.clone();
        more.push(missing[(pick as usize) % missing.len()]);
        let mut w2 = w.clone();
        w2.push(extra_w);
        prop_assert!(spanning_tree_count(&weighted(n, &more, &w2)) > spanning_tree_count(&weighted(n, &pairs, &w)));
    }

    #[test]
    fn fiedler_value_positive_iff_connected((n, pairs, w) in graph_strategy(), cut in any::<u64>()) {
        let l = weighted(n, &pairs, &w);
        prop_assert!(algebraic_connectivity(&l).unwrap() > 0.0);
        // removing one edge may or may not disconnect the graph
        let drop = (cut as usize) % pairs.len();
        let mut fewer = pairs.clone();
        fewer.remove(drop);
        let mut wf = w.clone();
        wf.remove(drop);
        let lf = weighted(n, &fewer, &wf);
        let connected = posegraph_spectra::graph::component_count(n, fewer.iter().copied()) == 1;
        prop_assert_eq!(algebraic_connectivity(&lf).unwrap() > 0.0, connected);
    }
}
