use std::fmt::Write as _;
use std::fs;

use posegraph_spectra::bench::{
    audit_bounds, incremental_run, timing_sweep, ExperimentConfig, RouteGaps, RowViolation,
};
use posegraph_spectra::dataset::export::format_sig12;
use posegraph_spectra::dataset::{
    export_series, parse_series_csv, serialize_pose_graph, synth_graph, DatasetDescriptor, GraphKind, PhiSource,
    SeriesFormat,
};
use posegraph_spectra::explore::{run_episode, ExplorationMetrics, ExplorerConfig, OccupancyGrid, Policy};
use posegraph_spectra::graph::is_connected;
use posegraph_spectra::spectral::{
    assemble_fim, criteria_from_fim, criteria_from_laplacian, edge_weights, graph_health_metrics, verify_bound,
    weighted_laplacian, HealthMetrics, OptimalityReport, WeightScheme, DENSE_FIM_LIMIT,
};
use posegraph_spectra::dataset::ParsedGraph;
use posegraph_spectra::{Error, InfoMatrix, PoseGraph};
use std::path::Path;
use serde::Serialize;

use crate::args::{AnalyzeArgs, BenchArgs, CompareArgs, ExploreArgs, Format, GenArgs, Kind, Route};
use crate::output::{emit, to_json};
use crate::Failure;

/// Prefixes load errors with the offending path.
fn in_file<T, E: Into<Failure>>(path: &Path, r: std::result::Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| match e.into() {
        Failure::Usage(m) => Failure::Usage(format!("{}: {m}", path.display())),
        Failure::Data(m) => Failure::Data(format!("{}: {m}", path.display())),
        audit => audit,
    })
}

fn read(path: &Path) -> Result<String, Failure> {
    in_file(path, fs::read_to_string(path))
}

fn load_graph(path: &Path) -> Result<ParsedGraph, Failure> {
    in_file(path, DatasetDescriptor::path(path).load())
}

#[derive(Serialize)]
struct AnalyzeReport {
    n: usize,
    m: usize,
    ell: usize,
    weights: WeightScheme,
    connected: bool,
    non_pd_edges: Vec<usize>,
    skipped_records: usize,
    health: HealthMetrics,
    edge_weights: Vec<f64>,
    laplacian: Option<OptimalityReport>,
    fim: Option<OptimalityReport>,
    /// Whether the information-matrix values stay below the Laplacian ones;
    /// only reported for maxeig weights, where it is guaranteed.
    bound_holds: Option<bool>,
    warnings: Vec<String>,
}

/// `φ̄` paired with the Laplacian so its values are comparable with the
/// information-matrix route: the shared matrix for unit weights on a
/// constant-information graph, the identity for max-eigenvalue weights.
fn laplacian_phi(g: &PoseGraph, scheme: WeightScheme) -> Option<InfoMatrix> {
    match scheme {
        WeightScheme::Unit => {
            let first = &g.edges().first()?.info;
            g.edges().iter().all(|e| e.info == *first).then(|| first.clone())
        }
        WeightScheme::MaxEig => Some(InfoMatrix::identity(g.ell())),
        WeightScheme::Matched(_) => None,
    }
}

pub fn analyze(args: &AnalyzeArgs) -> Result<(), Failure> {
    let parsed = load_graph(&args.graph)?;
    let scheme: WeightScheme = args.weights.parse()?;
    let g = parsed.analysis_graph();
    if g.n() < 2 {
        return Err(Failure::Data(format!("{}: need at least two vertices", args.graph.display())));
    }
    let mut warnings = Vec::new();
    if !parsed.non_pd_edges.is_empty() {
        warnings.push(format!(
            "{} information matrices were not positive definite and were clamped",
            parsed.non_pd_edges.len()
        ));
    }
    let connected = is_connected(&g);
    if !connected {
        warnings.push("graph is disconnected; criteria other than Ẽ-opt are reported as zero".into());
    }
    if scheme == WeightScheme::Unit && laplacian_phi(&g, scheme).is_none() {
        warnings.push("information differs between edges; the unit Laplacian is reported unscaled".into());
    }

    let laplacian = match args.route {
        Route::Fim => None,
        _ => Some(criteria_from_laplacian(
            &weighted_laplacian(&g, scheme)?,
            laplacian_phi(&g, scheme).as_ref(),
        )?),
    };
    let fim = match args.route {
        Route::Laplacian => None,
        Route::Both if g.n() * g.ell() > DENSE_FIM_LIMIT => {
            warnings.push(format!(
                "information-matrix route skipped: dimension {} exceeds {DENSE_FIM_LIMIT}",
                g.n() * g.ell()
            ));
            None
        }
        _ => Some(criteria_from_fim(&assemble_fim(&g)?)?),
    };
    let bound_holds = match (&fim, &laplacian, scheme) {
        (Some(f), Some(l), WeightScheme::MaxEig) => Some(verify_bound(f, l).holds()),
        _ => None,
    };
    for w in &warnings {
        log::warn!("{w}");
    }
    let report = AnalyzeReport {
        n: g.n(),
        m: g.m(),
        ell: g.ell(),
        weights: scheme,
        connected,
        non_pd_edges: parsed.non_pd_edges.clone(),
        skipped_records: parsed.skipped_records,
        health: graph_health_metrics(&g),
        edge_weights: edge_weights(&g, scheme)?,
        laplacian,
        fim,
        bound_holds,
        warnings,
    };
    let text = match args.format {
        Format::Json => to_json(&report)?,
        Format::Csv => analyze_csv(&report),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(())
}

fn analyze_csv(r: &AnalyzeReport) -> String {
    let mut out = String::from(
        "route,n,m,connected,t_opt,d_opt,a_opt,e_opt,e_tilde_opt,log_d_opt,full_t_opt,full_d_opt,full_a_opt\n",
    );
    for (name, rep) in [("laplacian", &r.laplacian), ("fim", &r.fim)] {
        let Some(rep) = rep else { continue };
        let values = [
            rep.t_opt,
            rep.d_opt,
            rep.a_opt,
            rep.e_opt,
            rep.e_tilde_opt,
            rep.log_d_opt,
            rep.full_dim.t_opt,
            rep.full_dim.d_opt,
            rep.full_dim.a_opt,
        ];
        write!(out, "{name},{},{},{}", rep.n, rep.m, rep.connected).unwrap();
        for v in values {
            write!(out, ",{}", format_sig12(v)).unwrap();
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct CompareSummary {
    weights: WeightScheme,
    evaluated_steps: usize,
    disconnected_steps: Vec<usize>,
    constant_phi: bool,
    gaps: Option<RouteGaps>,
    violations: Vec<RowViolation>,
    ordering_failures: Vec<usize>,
    failures: Vec<String>,
}

pub fn compare(args: &CompareArgs) -> Result<(), Failure> {
    if args.audit_series {
        return audit_series(args);
    }
    let mut cfg = match &args.config {
        Some(p) => in_file(p, ExperimentConfig::from_toml(&read(p)?))?,
        None => ExperimentConfig::default(),
    };
    if let Some(w) = &args.weights {
        cfg.scheme = w.parse()?;
    }
    if let Some(s) = args.stride {
        cfg.stride = s;
    }
    if let Some(c) = args.cap {
        cfg.fim_route_cap = c;
    }
    let g = load_graph(&args.input)?.analysis_graph();
    let run = incremental_run(&g, &cfg)?;
    let series = export_series(&run.rows, series_format(args.format))?;
    emit(args.out.as_deref(), &series)?;

    let failures = run.audit_failures(&cfg.criteria);
    let any_fim = run.rows.iter().any(|r| r.t_fim.is_some());
    let summary = CompareSummary {
        weights: cfg.scheme,
        evaluated_steps: run.rows.len(),
        disconnected_steps: run.disconnected_steps.clone(),
        constant_phi: run.constant_phi,
        gaps: any_fim.then_some(run.gaps),
        violations: run.violations.clone(),
        ordering_failures: run.ordering_failures.clone(),
        failures: failures.clone(),
    };
    if let Some(p) = &args.summary {
        fs::write(p, to_json(&summary)?)?;
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Audit(failures))
    }
}

fn series_format(f: Format) -> SeriesFormat {
    match f {
        Format::Csv => SeriesFormat::Csv,
        Format::Json => SeriesFormat::Json,
    }
}

fn audit_series(args: &CompareArgs) -> Result<(), Failure> {
    let rows = in_file(&args.input, parse_series_csv(&read(&args.input)?))?;
    let violations = audit_bounds(&rows);
    let failures: Vec<String> = violations
        .iter()
        .map(|v| format!("step {}: {} bound violated by {:e}", v.step, v.criterion.name(), v.rel_gap))
        .collect();
    let summary = CompareSummary {
        weights: WeightScheme::MaxEig,
        evaluated_steps: rows.len(),
        disconnected_steps: Vec::new(),
        constant_phi: false,
        gaps: None,
        violations,
        ordering_failures: Vec::new(),
        failures: failures.clone(),
    };
    let text = to_json(&summary)?;
    emit(args.summary.as_deref().or(args.out.as_deref()), &text)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Audit(failures))
    }
}

pub fn bench(args: &BenchArgs) -> Result<(), Failure> {
    if args.repeats < 3 {
        return Err(Failure::Usage(format!("--repeats must be at least 3, got {}", args.repeats)));
    }
    if args.ell != 3 && args.ell != 6 {
        return Err(Failure::Usage(format!("--ell must be 3 or 6, got {}", args.ell)));
    }
    let summary = timing_sweep(&args.sizes, args.ell, args.repeats)?;
    emit(args.out.as_deref(), &to_json(&summary)?)?;
    let failures = summary.failures();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Audit(failures))
    }
}

fn parse_phi(spec: &str, seed: u64, ell: usize) -> Result<PhiSource, Failure> {
    let spec = spec.trim();
    if spec.eq_ignore_ascii_case("frh") {
        return Ok(PhiSource::Constant(InfoMatrix::diagonal(&[11.11, 11.11, 250.0])?));
    }
    if spec.eq_ignore_ascii_case("random") {
        return Ok(PhiSource::Randomized { seed, ell });
    }
    if let Some(list) = spec.strip_prefix("diag:") {
        let diag = list
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::Usage(format!("bad --phi {spec:?}: {e}")))?;
        return Ok(PhiSource::Constant(InfoMatrix::diagonal(&diag)?));
    }
    Err(Failure::Usage(format!("unknown --phi {spec:?} (expected frh, random or diag:<a>,<b>,...)")))
}

pub fn gen(args: &GenArgs) -> Result<(), Failure> {
    let phi = parse_phi(&args.phi, args.seed, args.ell)?;
    let kind = match args.kind {
        Kind::Chain => GraphKind::Chain,
        Kind::Loops => GraphKind::ChainWithLoops { seed: args.seed },
    };
    let g = synth_graph(kind, args.n, &phi)?;
    emit(args.out.as_deref(), &serialize_pose_graph(&g, None))?;
    Ok(())
}

#[derive(Serialize)]
struct Episode {
    policy: Policy,
    seed: u64,
    metrics: ExplorationMetrics,
}

#[derive(Serialize)]
struct PolicySummary {
    policy: Policy,
    episodes: usize,
    mean_norm_tree_connectivity: f64,
    mean_rmse: f64,
    mean_coverage: f64,
    mean_avg_degree: f64,
}

#[derive(Serialize)]
struct Ordering {
    tau_holds: bool,
    rmse_holds: bool,
}

#[derive(Serialize)]
struct ExploreReport {
    budget: usize,
    episodes: Vec<Episode>,
    summary: Vec<PolicySummary>,
    /// dopt against closest: mean τ̄ not lower, mean rmse not higher.
    ordering: Option<Ordering>,
}

pub fn explore(args: &ExploreArgs) -> Result<(), Failure> {
    let policies: Vec<Policy> = if args.policy.eq_ignore_ascii_case("all") {
        Policy::ALL.to_vec()
    } else {
        vec![args.policy.parse()?]
    };
    if args.check_ordering && policies.len() < 2 {
        return Err(Failure::Usage("--check-ordering needs --policy all".into()));
    }
    if args.seeds == 0 {
        return Err(Failure::Usage("--seeds must be at least 1".into()));
    }
    let cfg = match &args.config {
        Some(p) => in_file(p, ExplorerConfig::from_toml(&read(p)?))?,
        None => ExplorerConfig::default(),
    };
    let world = in_file(&args.world, OccupancyGrid::load_world(&args.world))?;

    let mut episodes = Vec::new();
    let mut log = String::new();
    for &policy in &policies {
        for seed in args.seed..args.seed + args.seeds {
            let r = run_episode(&world, policy, args.budget, seed, &cfg)?;
            log::info!(
                "{policy} seed {seed}: coverage {:.1} %, rmse {:.3} m, τ̄ {:.4}",
                r.metrics.coverage,
                r.metrics.rmse,
                r.metrics.norm_tree_connectivity
            );
            log.push_str(&r.log);
            episodes.push(Episode {
                policy,
                seed,
                metrics: r.metrics,
            });
        }
    }
    let summary: Vec<PolicySummary> = policies
        .iter()
        .map(|&policy| {
            let mine: Vec<&ExplorationMetrics> =
                episodes.iter().filter(|e| e.policy == policy).map(|e| &e.metrics).collect();
            let mean = |f: fn(&ExplorationMetrics) -> f64| mine.iter().map(|m| f(m)).sum::<f64>() / mine.len() as f64;
            PolicySummary {
                policy,
                episodes: mine.len(),
                mean_norm_tree_connectivity: mean(|m| m.norm_tree_connectivity),
                mean_rmse: mean(|m| m.rmse),
                mean_coverage: mean(|m| m.coverage),
                mean_avg_degree: mean(|m| m.avg_degree),
            }
        })
        .collect();
    let find = |p: Policy| summary.iter().find(|s| s.policy == p);
    let ordering = match (find(Policy::GraphDopt), find(Policy::ClosestFrontier)) {
        (Some(d), Some(c)) => Some(Ordering {
            tau_holds: d.mean_norm_tree_connectivity >= c.mean_norm_tree_connectivity,
            rmse_holds: d.mean_rmse <= c.mean_rmse,
        }),
        _ => None,
    };
    let report = ExploreReport {
        budget: args.budget,
        episodes,
        summary,
        ordering,
    };
    if let Some(p) = &args.log {
        fs::write(p, &log)?;
    }
    emit(args.out.as_deref(), &to_json(&report)?)?;
    if args.check_ordering {
        let o = report.ordering.as_ref().expect("both policies ran");
        let mut failures = Vec::new();
        if !o.tau_holds {
            failures.push("mean τ̄ of dopt is below closest".to_string());
        }
        if !o.rmse_holds {
            failures.push("mean rmse of dopt is above closest".to_string());
        }
        if !failures.is_empty() {
            return Err(Failure::Audit(failures));
        }
    }
    Ok(())
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_data_error() {
            Failure::Data(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Data(e.to_string())
    }
}
