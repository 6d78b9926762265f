use std::io::Write;

use serde::Serialize;

use super::BenchError;
use crate::automata::{reduce_to_3dfa, Acceptor, Apta};
use crate::encoding::EncodingKind;
use crate::samples::LabeledSamples;
use crate::sat::SolverConfig;
use crate::search::{solve_pareto, AttemptStatus, SearchConfig, StatesAllocation};

/// First line of every metrics file.
pub const METRICS_SCHEMA: &str = "# dfa-decomp metrics v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricsRow {
    pub benchmark_id: String,
    pub encoder: String,
    pub allocation: String,
    pub acceptor_states: usize,
    pub num_vars: u32,
    pub num_clauses: usize,
    pub status: String,
    pub solve_time_ms: u64,
}

#[derive(Debug, Clone)]
pub struct RunMetrics {
    pub benchmark_id: String,
    pub acceptor_states_apta: usize,
    pub acceptor_states_3dfa: usize,
    /// One row per solved (encoder, allocation); dominated allocations that
    /// the search skipped are left out.
    pub rows: Vec<MetricsRow>,
    pub frontier_3dfa: Vec<StatesAllocation>,
    pub frontier_apta: Vec<StatesAllocation>,
}

/// Runs the Pareto search with each encoder on the same samples.
pub fn compare_run(
    benchmark_id: &str,
    samples: &LabeledSamples,
    n: usize,
    solver: &SolverConfig,
) -> Result<RunMetrics, BenchError> {
    let apta = Apta::build(samples);
    let three_dfa = reduce_to_3dfa(&apta);
    let mut rows = Vec::new();
    let mut frontiers = Vec::new();
    for encoder in [EncodingKind::ThreeDfa, EncodingKind::AptaLegacy] {
        let cfg = SearchConfig::default()
            .with_solver(solver.clone())
            .with_encoder(encoder);
        let frontier = solve_pareto(samples, n, &cfg)?;
        let acceptor_states = match encoder {
            EncodingKind::ThreeDfa => three_dfa.num_states(),
            EncodingKind::AptaLegacy => apta.num_states(),
        };
        rows.extend(
            frontier
                .attempts
                .iter()
                .filter(|a| a.status != AttemptStatus::Skipped)
                .map(|a| MetricsRow {
                    benchmark_id: benchmark_id.to_string(),
                    encoder: encoder.as_str().to_string(),
                    allocation: a.allocation.to_string(),
                    acceptor_states,
                    num_vars: a.num_vars,
                    num_clauses: a.num_clauses,
                    status: a.status.as_str().to_string(),
                    solve_time_ms: a.solve_time_ms.min(u64::MAX as u128) as u64,
                }),
        );
        frontiers.push(frontier.allocations());
    }
    let frontier_apta = frontiers.pop().unwrap();
    let frontier_3dfa = frontiers.pop().unwrap();
    Ok(RunMetrics {
        benchmark_id: benchmark_id.to_string(),
        acceptor_states_apta: apta.num_states(),
        acceptor_states_3dfa: three_dfa.num_states(),
        rows,
        frontier_3dfa,
        frontier_apta,
    })
}

/// Writes the schema comment, a header row and one row per entry.
pub fn write_metrics_csv<W: Write>(mut out: W, rows: &[MetricsRow]) -> Result<(), BenchError> {
    writeln!(out, "{METRICS_SCHEMA}")?;
    let mut writer = csv::Writer::from_writer(out);
    if rows.is_empty() {
        writer.write_record([
            "benchmark_id",
            "encoder",
            "allocation",
            "acceptor_states",
            "num_vars",
            "num_clauses",
            "status",
            "solve_time_ms",
        ])?;
    }
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::{parse_samples, SampleFormat};

    #[test]
    fn fixture_comparison() {
        let s = parse_samples("+ a a b\n+ a a a\n+ a b\n- b\n- a b a\n", SampleFormat::Lines).unwrap();
        let m = compare_run("fixture", &s, 2, &SolverConfig::builtin()).unwrap();
        assert_eq!(m.acceptor_states_apta, 8);
        assert_eq!(m.acceptor_states_3dfa, 7);
        assert_eq!(m.frontier_3dfa, m.frontier_apta);
        assert_eq!(m.frontier_3dfa.len(), 1);
        let by_encoder = |e: &str| m.rows.iter().find(|r| r.encoder == e && r.allocation == "(2,2)").unwrap().clone();
        assert!(by_encoder("3dfa").num_vars <= by_encoder("apta").num_vars);

        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &m.rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(METRICS_SCHEMA));
        assert_eq!(
            lines.next(),
            Some("benchmark_id,encoder,allocation,acceptor_states,num_vars,num_clauses,status,solve_time_ms")
        );
        assert!(text.contains("fixture,3dfa,\"(2,2)\",7,"));
    }

    #[test]
    fn empty_metrics_still_have_header() {
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
    }
}
