//! Verdict rendering: human-readable text and the JSON shapes documented in
//! `docs/cli-json-schema.json`.

use roesser::certify::{CertVerdict, CertificationReport};
use roesser::linalg::ComplexMatrix;
use roesser::model::ExtendedComplex;
use roesser::oracle::{OracleStatus, OracleVerdict};
use roesser::sdp::SdpStatus;
use roesser::sim::{DecayReport, SimVerdict};
use roesser::transfer::BoundaryPoint;
use serde_json::{json, Value};

pub fn exit_code_oracle(status: OracleStatus) -> i32 {
    match status {
        OracleStatus::Stable => 0,
        OracleStatus::Unstable => 1,
        OracleStatus::Indeterminate => 2,
    }
}

pub fn exit_code_certify(verdict: CertVerdict) -> i32 {
    match verdict {
        CertVerdict::CertifiedStable | CertVerdict::GridStable => 0,
        CertVerdict::Unstable => 1,
        CertVerdict::Indeterminate => 2,
    }
}

pub fn exit_code_simulate(verdict: SimVerdict) -> i32 {
    match verdict {
        SimVerdict::Decaying => 0,
        SimVerdict::Growing => 1,
        SimVerdict::Inconclusive => 2,
    }
}

fn point_json(p: &ExtendedComplex) -> Value {
    match p {
        ExtendedComplex::Finite(z) => json!({ "re": z.re, "im": z.im }),
        ExtendedComplex::Infinity => json!("infinity"),
    }
}

fn boundary_point_json(p: &BoundaryPoint) -> Value {
    json!({ "value": point_json(&p.value), "source_angle": p.source_angle })
}

fn point_text(p: &ExtendedComplex) -> String {
    match p {
        ExtendedComplex::Finite(z) => format!("{z}"),
        ExtendedComplex::Infinity => "infinity".to_string(),
    }
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn oracle_status_str(s: OracleStatus) -> &'static str {
    match s {
        OracleStatus::Stable => "stable",
        OracleStatus::Unstable => "unstable",
        OracleStatus::Indeterminate => "indeterminate",
    }
}

pub fn oracle_verdict_json(v: &OracleVerdict) -> Value {
    json!({
        "status": oracle_status_str(v.status),
        "worst_value": finite_or_null(v.worst_value),
        "worst_point": v.worst_point.iter().map(boundary_point_json).collect::<Vec<_>>(),
        "samples_checked": v.samples_checked,
        "max_step_jump": finite_or_null(v.max_step_jump),
        "note": v.note.clone().map(Value::String).unwrap_or(Value::Null),
    })
}

fn complex_matrix_json(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| {
            let row: Vec<Value> = (0..m.cols())
                .map(|j| json!({ "re": m[(i, j)].re, "im": m[(i, j)].im }))
                .collect();
            Value::Array(row)
        })
        .collect();
    Value::Array(rows)
}

fn real_matrix_json(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| {
            let row: Vec<Value> = (0..m.cols()).map(|j| json!(m[(i, j)].re)).collect();
            Value::Array(row)
        })
        .collect();
    Value::Array(rows)
}

fn complex_matrix_text(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        out.push_str("    [");
        for j in 0..m.cols() {
            if j > 0 {
                out.push_str(", ");
            }
            out.push_str(&format!("{}", m[(i, j)]));
        }
        out.push_str("]\n");
    }
    out
}

pub fn oracle_json(model_name: Option<&str>, n: usize, v: &OracleVerdict) -> Value {
    json!({
        "command": "oracle",
        "model": model_name.map(|s| Value::String(s.to_string())).unwrap_or(Value::Null),
        "n": n,
        "verdict": oracle_status_str(v.status),
        "exit_code": exit_code_oracle(v.status),
        "report": oracle_verdict_json(v),
    })
}

pub fn oracle_text(model_name: Option<&str>, n: usize, v: &OracleVerdict) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "model: {} ({}D)\n",
        model_name.unwrap_or("<unnamed>"),
        n
    ));
    out.push_str(&format!("verdict: {}\n", oracle_status_str(v.status).to_uppercase()));
    if v.worst_value.is_finite() {
        out.push_str(&format!("worst indicator: {:?}\n", v.worst_value));
    }
    if let Some(p) = v.worst_point.first() {
        let pts: Vec<String> = v.worst_point.iter().map(|b| point_text(&b.value)).collect();
        let _ = p;
        out.push_str(&format!("worst point: {}\n", pts.join(", ")));
    }
    out.push_str(&format!("samples checked: {}\n", v.samples_checked));
    if v.max_step_jump.is_finite() && v.max_step_jump > 0.0 {
        out.push_str(&format!("max sample-to-sample jump: {:.3e}\n", v.max_step_jump));
    }
    if let Some(note) = &v.note {
        out.push_str(&format!("note: {note}\n"));
    }
    out
}

fn cert_verdict_str(v: CertVerdict) -> &'static str {
    match v {
        CertVerdict::CertifiedStable => "certified-stable",
        CertVerdict::GridStable => "grid-stable",
        CertVerdict::Unstable => "unstable",
        CertVerdict::Indeterminate => "indeterminate",
    }
}

fn sdp_status_str(s: SdpStatus) -> &'static str {
    match s {
        SdpStatus::Feasible => "feasible",
        SdpStatus::Infeasible => "infeasible",
        SdpStatus::Indeterminate => "indeterminate",
    }
}

pub fn certify_json(model_name: Option<&str>, n: usize, r: &CertificationReport) -> Value {
    json!({
        "command": "certify",
        "model": model_name.map(|s| Value::String(s.to_string())).unwrap_or(Value::Null),
        "n": n,
        "verdict": cert_verdict_str(r.verdict),
        "exit_code": exit_code_certify(r.verdict),
        "degree": r.certifying_degree.map(|d| json!(d)).unwrap_or(Value::Null),
        "basis": match r.basis {
            roesser::lyapunov::Basis::Monomial => "monomial",
            roesser::lyapunov::Basis::Moebius => "moebius",
        },
        "sdp_margin": r.sdp_margin.map(|m| json!(m)).unwrap_or(Value::Null),
        "eps": r.eps,
        "y": r.y.as_ref().map(real_matrix_json).unwrap_or(Value::Null),
        "p_coeffs": r.p_coeffs.as_ref()
            .map(|cs| Value::Array(cs.iter().map(complex_matrix_json).collect()))
            .unwrap_or(Value::Null),
        "degree_attempts": r.degree_attempts.iter().map(|a| json!({
            "degree": a.degree,
            "status": sdp_status_str(a.status),
            "margin": a.margin,
            "iterations": a.iterations,
        })).collect::<Vec<_>>(),
        "a22_check": r.a22_check.as_ref().map(oracle_verdict_json).unwrap_or(Value::Null),
        "boundary_sweep": r.boundary_sweep.as_ref().map(oracle_verdict_json).unwrap_or(Value::Null),
        "fine_sweep": r.fine_sweep.as_ref().map(|f| json!({
            "passed": f.passed,
            "samples": f.samples,
            "min_p_eig": finite_or_null(f.min_p_eig),
            "max_stein_eig": finite_or_null(f.max_stein_eig),
            "worst_point": f.worst_point.as_ref().map(boundary_point_json).unwrap_or(Value::Null),
            "infinity_skipped": f.infinity_skipped,
        })).unwrap_or(Value::Null),
        "interior": r.interior.as_ref().map(|i| json!({
            "passed": i.passed,
            "samples": i.samples,
            "min_p_eig": finite_or_null(i.min_p_eig),
            "max_stein_eig": finite_or_null(i.max_stein_eig),
            "worst_point": i.worst_point.as_ref().map(point_json).unwrap_or(Value::Null),
        })).unwrap_or(Value::Null),
        "counterexample": r.counterexample.as_ref().map(boundary_point_json).unwrap_or(Value::Null),
        "notes": r.notes.clone(),
        "wall_seconds": {
            "a22_check": r.wall.a22_check,
            "boundary_sweep": r.wall.boundary_sweep,
            "hierarchy": r.wall.hierarchy,
            "fine_sweep": r.wall.fine_sweep,
            "interior": r.wall.interior,
        },
    })
}

pub fn certify_text(model_name: Option<&str>, n: usize, r: &CertificationReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "model: {} ({}D)\n",
        model_name.unwrap_or("<unnamed>"),
        n
    ));
    let verdict = cert_verdict_str(r.verdict).to_uppercase();
    match r.certifying_degree {
        Some(d) => out.push_str(&format!(
            "verdict: {verdict} (degree {d}, basis {})\n",
            match r.basis {
                roesser::lyapunov::Basis::Monomial => "monomial",
                roesser::lyapunov::Basis::Moebius => "moebius",
            }
        )),
        None => out.push_str(&format!("verdict: {verdict}\n")),
    }
    if let Some(a22) = &r.a22_check {
        out.push_str(&format!(
            "eliminated-block check: {} (worst {:?})\n",
            oracle_status_str(a22.status),
            a22.worst_value
        ));
    }
    if let Some(sweep) = &r.boundary_sweep {
        out.push_str(&format!(
            "boundary sweep: {}; worst {:?} over {} samples\n",
            oracle_status_str(sweep.status),
            sweep.worst_value,
            sweep.samples_checked
        ));
        if let Some(p) = sweep.worst_point.first() {
            out.push_str(&format!("  worst at delta = {}\n", point_text(&p.value)));
        }
    }
    if let Some(ce) = &r.counterexample {
        out.push_str(&format!("counterexample: delta = {}\n", point_text(&ce.value)));
    }
    if !r.degree_attempts.is_empty() {
        out.push_str("hierarchy:\n");
        for a in &r.degree_attempts {
            out.push_str(&format!(
                "  degree {}: {}, margin {:.3e}, {} newton iterations\n",
                a.degree,
                sdp_status_str(a.status),
                a.margin,
                a.iterations
            ));
        }
    }
    if let Some(f) = &r.fine_sweep {
        out.push_str(&format!(
            "fine sweep: {}; min eig P = {:.6e}, max eig stein = {:.6e} ({} samples{})\n",
            if f.passed { "pass" } else { "FAIL" },
            f.min_p_eig,
            f.max_stein_eig,
            f.samples,
            if f.infinity_skipped { ", infinity sample skipped" } else { "" }
        ));
    }
    if let Some(i) = &r.interior {
        out.push_str(&format!(
            "interior check: {}; min eig P = {:.6e}, max eig stein = {:.6e} ({} samples)\n",
            if i.passed { "pass" } else { "FAIL" },
            i.min_p_eig,
            i.max_stein_eig,
            i.samples
        ));
    }
    if let Some(margin) = r.sdp_margin {
        out.push_str(&format!("sdp margin: {margin:?}  eps: {:?}\n", r.eps));
    }
    if let Some(y) = &r.y {
        out.push_str("Y =\n");
        out.push_str(&complex_matrix_text(y));
    }
    if let Some(ps) = &r.p_coeffs {
        for (i, p) in ps.iter().enumerate() {
            out.push_str(&format!("P{i} =\n"));
            out.push_str(&complex_matrix_text(p));
        }
    }
    for note in &r.notes {
        out.push_str(&format!("note: {note}\n"));
    }
    out.push_str(&format!(
        "wall: a22 {:.3}s, sweep {:.3}s, hierarchy {:.3}s, fine {:.3}s, interior {:.3}s\n",
        r.wall.a22_check, r.wall.boundary_sweep, r.wall.hierarchy, r.wall.fine_sweep, r.wall.interior
    ));
    out
}

fn sim_verdict_str(v: SimVerdict) -> &'static str {
    match v {
        SimVerdict::Decaying => "decaying",
        SimVerdict::Growing => "growing",
        SimVerdict::Inconclusive => "inconclusive",
    }
}

pub fn simulate_json(
    model_name: Option<&str>,
    grid: (usize, usize),
    seed: u64,
    window: usize,
    r: &DecayReport,
) -> Value {
    json!({
        "command": "simulate",
        "model": model_name.map(|s| Value::String(s.to_string())).unwrap_or(Value::Null),
        "verdict": sim_verdict_str(r.verdict),
        "exit_code": exit_code_simulate(r.verdict),
        "rates": r.rates.iter().map(|v| finite_or_null(*v)).collect::<Vec<_>>(),
        "truncated_at": r.truncated_at.iter()
            .map(|t| t.map(|d| json!(d)).unwrap_or(Value::Null))
            .collect::<Vec<_>>(),
        "grid": [grid.0, grid.1],
        "seed": seed,
        "trials": r.rates.len(),
        "window": window,
    })
}

pub fn simulate_text(
    model_name: Option<&str>,
    grid: (usize, usize),
    seed: u64,
    r: &DecayReport,
) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "model: {} (grid {}x{}, seed {seed})\n",
        model_name.unwrap_or("<unnamed>"),
        grid.0,
        grid.1
    ));
    out.push_str(&format!("verdict: {}\n", sim_verdict_str(r.verdict).to_uppercase()));
    for (i, (rate, trunc)) in r.rates.iter().zip(&r.truncated_at).enumerate() {
        match trunc {
            Some(d) => out.push_str(&format!(
                "trial {i}: rate {rate:.6} (growth cap hit at front {d})\n"
            )),
            None => out.push_str(&format!("trial {i}: rate {rate:.6}\n")),
        }
    }
    out
}
