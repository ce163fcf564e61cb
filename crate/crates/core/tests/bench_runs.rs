use posegraph_spectra::bench::{audit_bounds, incremental_run, timing_sweep, ExperimentConfig};
use posegraph_spectra::dataset::{
    export_series, parse_series_csv, synth_graph, GraphKind, PhiSource, SeriesFormat, SERIES_HEADER,
};
use posegraph_spectra::dataset::export::TIMING_COLUMNS;
use posegraph_spectra::linalg::relative_difference;
use posegraph_spectra::spectral::{Criterion, WeightScheme};
use posegraph_spectra::{InfoMatrix, PoseGraph};

fn frh_phi() -> InfoMatrix {
    InfoMatrix::diagonal(&[11.11, 11.11, 250.0]).unwrap()
}

fn without_timing(csv: &str) -> Vec<String> {
    let drop: Vec<usize> = TIMING_COLUMNS
        .iter()
        .map(|c| SERIES_HEADER.iter().position(|h| h == c).unwrap())
        .collect();
    csv.lines()
        .map(|l| {
            l.split(',')
                .enumerate()
                .filter(|(i, _)| !drop.contains(i))
                .map(|(_, f)| f)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect()
}

#[test]
fn max_eig_run_on_random_loopy_graph_has_no_violations() {
    let g = synth_graph(GraphKind::ChainWithLoops { seed: 11 }, 200, &PhiSource::Randomized { seed: 11, ell: 3 }).unwrap();
    let cfg = ExperimentConfig {
        scheme: WeightScheme::MaxEig,
        stride: 4,
        ..Default::default()
    };
    let run = incremental_run(&g, &cfg).unwrap();
    assert!(!run.rows.is_empty());
    assert!(run.rows.iter().all(|r| r.t_fim.is_some()));
    assert!(run.violations.is_empty(), "{:?}", run.violations);
    assert!(audit_bounds(&run.rows).is_empty());
    assert!(run.ordering_failures.is_empty());
    assert!(run.audit_failures(&[Criterion::T, Criterion::D, Criterion::E]).is_empty());
}

#[test]
fn matched_weights_overlap_on_constant_prefix() {
    let constant = synth_graph(GraphKind::ChainWithLoops { seed: 2 }, 80, &PhiSource::Constant(frh_phi())).unwrap();
    let varied = synth_graph(GraphKind::ChainWithLoops { seed: 2 }, 80, &PhiSource::Randomized { seed: 4, ell: 3 }).unwrap();
    let split = constant.m() / 2;
    // on a tree D-opt is exact for any information, so a loop must follow the split
    assert!(constant.edges()[split..].iter().any(|e| e.to.0 != e.from.0 + 1));
    let mut edges = constant.edges().to_vec();
    edges[split..].clone_from_slice(&varied.edges()[split..]);
    let g = PoseGraph::new(3, constant.vertices().to_vec(), edges).unwrap();

    for (p, pick) in [(0.0, Criterion::D), (1.0, Criterion::T)] {
        let cfg = ExperimentConfig {
            scheme: WeightScheme::matched(p).unwrap(),
            ..Default::default()
        };
        let run = incremental_run(&g, &cfg).unwrap();
        let mut diverged = false;
        for r in &run.rows {
            let (fim, lap) = match pick {
                Criterion::D => (r.d_fim.unwrap(), r.d_lap),
                _ => (r.t_fim.unwrap(), r.t_lap),
            };
            let gap = relative_difference(fim, lap);
            // T with trace-mean weights is a trace identity, exact at every step
            if r.step < split || pick == Criterion::T {
                assert!(gap < 1e-9, "p={p} step {}: gap {gap:e}", r.step);
            } else {
                diverged |= gap > 1e-6;
            }
        }
        assert_eq!(diverged, pick == Criterion::D, "p={p}");
    }
}

#[test]
fn runs_are_deterministic_apart_from_timing() {
    let g = synth_graph(GraphKind::ChainWithLoops { seed: 2 }, 80, &PhiSource::Randomized { seed: 3, ell: 3 }).unwrap();
    let cfg = ExperimentConfig {
        scheme: WeightScheme::MaxEig,
        stride: 3,
        ..Default::default()
    };
    let a = export_series(&incremental_run(&g, &cfg).unwrap().rows, SeriesFormat::Csv).unwrap();
    let b = export_series(&incremental_run(&g, &cfg).unwrap().rows, SeriesFormat::Csv).unwrap();
    assert_eq!(without_timing(&a), without_timing(&b));
    assert_eq!(parse_series_csv(&a).unwrap().len(), a.lines().count() - 1);
}

#[test]
fn toml_config_drives_a_run() {
    let cfg = ExperimentConfig::from_toml(
        "scheme = \"unit\"\nstride = 5\ncriteria = [\"t\", \"d\", \"e\"]\nphi_bar_diag = [11.11, 11.11, 250.0]\n",
    )
    .unwrap();
    let g = synth_graph(GraphKind::Chain, 41, &PhiSource::Constant(frh_phi())).unwrap();
    let run = incremental_run(&g, &cfg).unwrap();
    assert_eq!(run.rows.len(), 8);
    assert!(run.constant_phi);
    assert!(run.audit_failures(&cfg.criteria).is_empty(), "{:?}", run.gaps);
}

#[test]
fn larger_blocks_slow_only_the_information_route() {
    let three = timing_sweep(&[60], 3, 3).unwrap();
    let six = timing_sweep(&[60], 6, 3).unwrap();
    let fim_ratio = six.points[0].us_fim / three.points[0].us_fim;
    let lap_ratio = six.points[0].us_lap / three.points[0].us_lap;
    assert!(fim_ratio > 2.0, "FIM route ratio {fim_ratio}");
    assert!(fim_ratio > lap_ratio, "FIM {fim_ratio} vs Laplacian {lap_ratio}");
}
