//! JSON report builders. Indices in every report are 1-based to match the
//! tensor file format.

use serde_json::{json, Value};

use tencomp_core::engine::{Residuals, SolveMethod, TcpSolution, ViOutcome, Violation};
use tencomp_core::oracles::{
    Certificate, ClassReport, ClassVerdict, EnumerationRecord, ProbeRecord, SearchRecord, Witness,
};
use tencomp_core::tensor::Tensor;

fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|&i| i + 1).collect()
}

fn residuals_json(residuals: &Residuals) -> Value {
    json!({
        "min_x": residuals.min_x,
        "min_w": residuals.min_w,
        "comp": residuals.comp,
    })
}

/// One solution in the report format:
/// `{ "x": [...], "w": [...], "support": [...], "residuals": {...},
///    "complete": bool, "method": "enumerate"|"vi" }`.
pub fn solution_json(solution: &TcpSolution, complete: bool, method: SolveMethod) -> Value {
    json!({
        "x": solution.x,
        "w": solution.w,
        "support": one_based(&solution.support),
        "residuals": residuals_json(&solution.residuals),
        "complete": complete,
        "method": method.as_str(),
    })
}

pub fn violation_json(violation: &Violation) -> Value {
    json!({
        "condition": violation.condition.to_string(),
        "magnitude": violation.magnitude,
        "index": violation.index.map(|i| i + 1),
    })
}

fn probe_json(probe: &ProbeRecord) -> Value {
    json!({
        "q": probe.q,
        "solutions": probe.solutions,
        "nonzero_solutions": probe.nonzero_solutions,
        "complete": probe.complete,
    })
}

fn enumeration_json(record: &EnumerationRecord) -> Value {
    json!({ "kind": "enumeration", "probes": record.probes.iter().map(probe_json).collect::<Vec<_>>() })
}

fn search_json(record: &SearchRecord) -> Value {
    json!({
        "kind": "search",
        "starts": record.starts,
        "evaluations": record.evaluations,
        "faces": record.faces,
        "pairs": record.pairs,
        "best_value": record.best_value,
        "estimated_modulus": record.estimated_modulus,
        "seed": record.seed,
    })
}

pub fn witness_json(witness: &Witness) -> Value {
    match witness {
        Witness::Vector {
            x,
            condition,
            value,
        } => json!({
            "kind": "vector",
            "x": x,
            "violated_condition": condition,
            "value": value,
        }),
        Witness::Pair {
            x,
            y,
            lhs,
            rhs,
            condition,
        } => json!({
            "kind": "vector_pair",
            "pair": { "x": x, "y": y },
            "lhs": lhs,
            "rhs": rhs,
            "violated_condition": condition,
        }),
        Witness::RSystem { x, t } => json!({
            "kind": "rsystem",
            "x": x,
            "t": t,
        }),
        Witness::QVector { q, enumeration } => json!({
            "kind": "q_vector",
            "q": q,
            "enumeration": enumeration.as_ref().map(probe_json),
        }),
    }
}

fn certificate_json(certificate: &Certificate) -> Value {
    match certificate {
        Certificate::Rule => json!({ "kind": "rule" }),
        Certificate::Enumeration(record) => enumeration_json(record),
        Certificate::Witness(witness) => {
            json!({ "kind": "witness", "witness": witness_json(witness) })
        }
        Certificate::Search(record) => search_json(record),
    }
}

/// `{ "class": ..., "verdict": ..., "certificate": {...}, "complete": bool,
///    "citations": [...] }`.
pub fn verdict_json(verdict: &ClassVerdict) -> Value {
    json!({
        "class": verdict.class.as_str(),
        "verdict": verdict.verdict.as_str(),
        "certificate": certificate_json(&verdict.certificate),
        "complete": verdict.complete,
        "citations": verdict.citations.iter().map(|c| c.as_str()).collect::<Vec<_>>(),
    })
}

pub fn tensor_meta_json(tensor: &Tensor) -> Value {
    json!({
        "order": tensor.order(),
        "dim": tensor.dim(),
        "nnz": tensor.nnz(),
        "symmetric": tensor.is_symmetric(),
        "nonnegative": tensor.is_nonnegative(),
    })
}

pub fn class_report_json(tensor: &Tensor, report: &ClassReport) -> Value {
    json!({
        "tensor": tensor_meta_json(tensor),
        "verdicts": report.verdicts.iter().map(verdict_json).collect::<Vec<_>>(),
        "skipped": report
            .skipped
            .iter()
            .map(|(class, reason)| json!({ "class": class.as_str(), "reason": reason }))
            .collect::<Vec<_>>(),
        "ladder_violations": report.ladder_violations,
    })
}

pub fn vi_outcome_json(outcome: &ViOutcome) -> Value {
    match outcome {
        ViOutcome::Solved {
            solution,
            diagnostics,
        } => json!({
            "status": "solved",
            "solution": solution_json(solution, true, SolveMethod::Vi),
            "kkt_residual": diagnostics.kkt_residual,
            "s": diagnostics.s_value,
            "iterations": diagnostics.iterations,
            "start": diagnostics.start_index,
        }),
        ViOutcome::RConditionSuspect { state, diagnostics } => json!({
            "status": "r_condition_suspect",
            "y": state.y,
            "omega": state.omega,
            "kkt_residual": state.kkt_residual,
            "s": diagnostics.s_value,
        }),
        ViOutcome::Failed {
            best_residual,
            starts,
        } => json!({
            "status": "failed",
            "best_residual": best_residual,
            "starts": starts,
        }),
    }
}
