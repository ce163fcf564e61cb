use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bench::config::ExperimentConfig;
use crate::dataset::ResultRow;
use crate::error::{Error, Result};
use crate::graph::{Edge, InfoMatrix, PoseGraph, Vertex, VertexId};
use crate::linalg::relative_difference;
use crate::spectral::report::bound_violation;
use crate::spectral::{
    assemble_fim, criteria_from_fim, criteria_from_laplacian, weighted_laplacian, Criterion,
    OptimalityReport, WeightScheme,
};

/// A criterion at one step where the information-matrix value exceeds the
/// Laplacian value beyond the allowed slack.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowViolation {
    pub step: usize,
    pub criterion: Criterion,
    pub rel_gap: f64,
}

/// Largest relative difference between the two routes over a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RouteGaps {
    pub t: f64,
    pub d: f64,
    pub e: f64,
}

impl RouteGaps {
    pub fn get(&self, c: Criterion) -> Option<f64> {
        match c {
            Criterion::T => Some(self.t),
            Criterion::D => Some(self.d),
            Criterion::E => Some(self.e),
            Criterion::A | Criterion::ETilde => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementalRun {
    pub scheme: WeightScheme,
    pub rows: Vec<ResultRow>,
    /// Steps skipped because the prefix graph was disconnected.
    pub disconnected_steps: Vec<usize>,
    /// Steps whose Laplacian or information-matrix criteria broke the
    /// `Ẽ ≥ T ≥ D ≥ A ≥ E` chain.
    pub ordering_failures: Vec<usize>,
    /// Whether every edge carried the same information matrix.
    pub constant_phi: bool,
    pub gaps: RouteGaps,
    /// Bound audit; only populated for the max-eigenvalue scheme.
    pub violations: Vec<RowViolation>,
}

/// Thresholds of the unit-scheme equivalence audit.
pub const UNIT_GAP_TOL_TD: f64 = 1e-6;
pub const UNIT_GAP_TOL_E: f64 = 1e-4;

impl IncrementalRun {
    /// Outcome of the scheme's audit: the route gaps for the unit scheme
    /// with constant `φ`, the bound for the max-eigenvalue scheme, nothing
    /// otherwise. Returns a description of each failure.
    pub fn audit_failures(&self, criteria: &[Criterion]) -> Vec<String> {
        let mut out = Vec::new();
        match self.scheme {
            WeightScheme::Unit if self.constant_phi => {
                for &c in criteria {
                    let tol = if c == Criterion::E {
                        UNIT_GAP_TOL_E
                    } else {
                        UNIT_GAP_TOL_TD
                    };
                    if let Some(gap) = self.gaps.get(c) {
                        if gap > tol {
                            out.push(format!("{} route gap {gap:e} exceeds {tol:e}", c.name()));
                        }
                    }
                }
            }
            WeightScheme::MaxEig => {
                for v in self.violations.iter().filter(|v| criteria.contains(&v.criterion)) {
                    out.push(format!(
                        "step {}: {} bound violated by {:e}",
                        v.step,
                        v.criterion.name(),
                        v.rel_gap
                    ));
                }
            }
            _ => {}
        }
        for s in &self.ordering_failures {
            out.push(format!("step {s}: criteria ordering broken"));
        }
        out
    }
}

struct DisjointSets(Vec<usize>);

impl DisjointSets {
    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }

    /// Returns true when `a` and `b` were in different sets.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
        ra != rb
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e6)
}

/// Replays `g`'s edges in order, evaluating both routes on the growing graph.
///
/// Vertices enter when an edge first references them. A step is the index of
/// the edge just inserted; step `k` is evaluated when `(k + 1) % stride == 0`
/// or it is the final edge. Disconnected prefixes are recorded and skipped.
pub fn incremental_run(g: &PoseGraph, cfg: &ExperimentConfig) -> Result<IncrementalRun> {
    let ell = g.ell();
    cfg.validate(ell)?;
    if g.m() == 0 {
        return Err(Error::InvalidGraph("incremental run needs at least one edge".into()));
    }
    let phi_bar: Option<InfoMatrix> = match cfg.scheme {
        WeightScheme::Unit => Some(cfg.phi_bar.clone().unwrap_or_else(|| g.edges()[0].info.clone())),
        _ => None,
    };
    let constant_phi = g.edges().iter().all(|e| e.info == g.edges()[0].info)
        && phi_bar.as_ref().is_none_or(|p| *p == g.edges()[0].info);

    let first = g.edges()[0].from.0;
    let root = Vertex {
        id: VertexId(0),
        pose: g.vertices()[first].pose,
    };
    let mut prefix = PoseGraph::new(ell, vec![root], Vec::new())?;
    let mut local: HashMap<usize, usize> = HashMap::from([(first, 0)]);
    let mut sets = DisjointSets(vec![0]);
    let mut components = 1usize;
    let mut run = IncrementalRun {
        scheme: cfg.scheme,
        rows: Vec::new(),
        disconnected_steps: Vec::new(),
        ordering_failures: Vec::new(),
        constant_phi,
        gaps: RouteGaps::default(),
        violations: Vec::new(),
    };

    for (step, e) in g.edges().iter().enumerate() {
        let mut ids = [0usize; 2];
        for (slot, v) in ids.iter_mut().zip([e.from.0, e.to.0]) {
            *slot = *local.entry(v).or_insert_with(|| {
                components += 1;
                sets.0.push(prefix.n());
                prefix.add_vertex(g.vertices()[v].pose).0
            });
        }
        let [a, b] = ids;
        if sets.union(a, b) {
            components -= 1;
        }
        let mut edge = Edge::new(a, b, e.info.clone());
        edge.relative_pose = e.relative_pose;
        prefix.add_edge(edge)?;

        let last = step + 1 == g.m();
        if (step + 1) % cfg.stride != 0 && !last {
            continue;
        }
        if components != 1 {
            run.disconnected_steps.push(step);
            continue;
        }
        let (lap, us_lap) = timed(|| -> Result<OptimalityReport> {
            let l = weighted_laplacian(&prefix, cfg.scheme)?;
            criteria_from_laplacian(&l, phi_bar.as_ref())
        });
        let lap = lap?;
        let fim = if prefix.n() * ell <= cfg.fim_route_cap {
            let (r, us) = timed(|| criteria_from_fim(&assemble_fim(&prefix)?));
            Some((r?, us))
        } else {
            None
        };
        let ordered = lap.values().ordering_holds(1e-9)
            && fim.as_ref().is_none_or(|(f, _)| f.values().ordering_holds(1e-9));
        if !ordered {
            run.ordering_failures.push(step);
        }
        if let Some((f, _)) = &fim {
            run.gaps.t = run.gaps.t.max(relative_difference(f.t_opt, lap.t_opt));
            run.gaps.d = run.gaps.d.max(relative_difference(f.d_opt, lap.d_opt));
            run.gaps.e = run.gaps.e.max(relative_difference(f.e_opt, lap.e_opt));
        }
        run.rows.push(ResultRow {
            step,
            n: prefix.n(),
            m: prefix.m(),
            t_fim: fim.as_ref().map(|(f, _)| f.t_opt),
            d_fim: fim.as_ref().map(|(f, _)| f.d_opt),
            e_fim: fim.as_ref().map(|(f, _)| f.e_opt),
            t_lap: lap.t_opt,
            d_lap: lap.d_opt,
            e_lap: lap.e_opt,
            us_fim: fim.as_ref().map(|(_, us)| *us),
            us_lap,
        });
    }
    if !run.disconnected_steps.is_empty() {
        log::warn!("{} disconnected prefixes skipped", run.disconnected_steps.len());
    }
    if cfg.scheme == WeightScheme::MaxEig {
        run.violations = audit_bounds(&run.rows);
    }
    Ok(run)
}

/// Every T, D or E value whose information-matrix route exceeds the
/// Laplacian route beyond the relative slack.
pub fn audit_bounds(rows: &[ResultRow]) -> Vec<RowViolation> {
    let mut out = Vec::new();
    for r in rows {
        let pairs = [
            (Criterion::T, r.t_fim, r.t_lap),
            (Criterion::D, r.d_fim, r.d_lap),
            (Criterion::E, r.e_fim, r.e_lap),
        ];
        for (c, fim, lap) in pairs {
            if let Some(v) = fim.and_then(|f| bound_violation(c, f, lap)) {
                out.push(RowViolation {
                    step: r.step,
                    criterion: c,
                    rel_gap: v.rel_gap,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{synth_graph, GraphKind, PhiSource};

    fn frh_phi() -> InfoMatrix {
        InfoMatrix::diagonal(&[11.11, 11.11, 250.0]).unwrap()
    }

    #[test]
    fn unit_scheme_overlaps_on_constant_chain() {
        let g = synth_graph(GraphKind::Chain, 40, &PhiSource::Constant(frh_phi())).unwrap();
        let run = incremental_run(&g, &ExperimentConfig::default()).unwrap();
        assert_eq!(run.rows.len(), 39);
        assert!(run.constant_phi);
        assert!(run.audit_failures(&Criterion::ALL).is_empty(), "{:?}", run.gaps);
    }

    #[test]
    fn max_eig_bound_on_random_loopy_graph() {
        let g = synth_graph(
            GraphKind::ChainWithLoops { seed: 2 },
            60,
            &PhiSource::Randomized { seed: 5, ell: 3 },
        )
        .unwrap();
        let cfg = ExperimentConfig {
            scheme: WeightScheme::MaxEig,
            ..Default::default()
        };
        let run = incremental_run(&g, &cfg).unwrap();
        assert!(run.violations.is_empty(), "{:?}", run.violations);
        assert!(run.ordering_failures.is_empty());
    }

    #[test]
    fn stride_and_cap() {
        let g = synth_graph(GraphKind::Chain, 30, &PhiSource::Constant(frh_phi())).unwrap();
        let cfg = ExperimentConfig {
            stride: 10,
            fim_route_cap: 45,
            ..Default::default()
        };
        let run = incremental_run(&g, &cfg).unwrap();
        let steps: Vec<_> = run.rows.iter().map(|r| r.step).collect();
        assert_eq!(steps, vec![9, 19, 28]);
        assert!(run.rows[0].t_fim.is_some());
        assert!(run.rows[1].t_fim.is_none() && run.rows[1].us_fim.is_none());
    }

    #[test]
    fn disconnected_prefixes_skipped() {
        let mut g = PoseGraph::with_vertex_count(4, 3).unwrap();
        for (a, b) in [(0, 1), (2, 3), (1, 2)] {
            g.add_edge(Edge::new(a, b, InfoMatrix::identity(3))).unwrap();
        }
        let run = incremental_run(&g, &ExperimentConfig::default()).unwrap();
        assert_eq!(run.disconnected_steps, vec![1]);
        assert_eq!(run.rows.iter().map(|r| r.step).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn corrupted_row_flags_exactly_one_violation() {
        let g = synth_graph(
            GraphKind::ChainWithLoops { seed: 1 },
            20,
            &PhiSource::Randomized { seed: 1, ell: 3 },
        )
        .unwrap();
        let cfg = ExperimentConfig {
            scheme: WeightScheme::MaxEig,
            ..Default::default()
        };
        let mut rows = incremental_run(&g, &cfg).unwrap().rows;
        assert!(audit_bounds(&rows).is_empty());
        let k = rows.len() / 2;
        rows[k].t_fim = Some(rows[k].t_lap * 2.0);
        let v = audit_bounds(&rows);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].step, v[0].criterion), (rows[k].step, Criterion::T));
    }
}
