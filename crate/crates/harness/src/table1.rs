//! Gate-complexity comparison table with computed step and gate counts.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use lindblad_rand_core::formulas::{gate_count, step_count_with, BoundOptions, Implementation, MethodId};
use lindblad_rand_core::norms::GeneratorStats;

/// Asymptotic gate complexities, as LaTeX.
pub const COMPLEXITY_S1_DET: &str = r"O\left((t\Lambda)^{2}M^{3}/\epsilon\right)";
pub const COMPLEXITY_S2_DET: &str = r"O\left((t\Lambda)^{3/2}M^{5/2}/\sqrt{3\epsilon}\right)";
pub const COMPLEXITY_S1_RAN: &str = COMPLEXITY_S2_DET;
pub const COMPLEXITY_S2_RAN: &str = r"O\left((t\Lambda)^{3/2}M^{2}/\sqrt{\epsilon}\right)";
pub const COMPLEXITY_QDRIFT_CS: &str = r"O\left((t\Gamma\Omega)^{2}/\epsilon\right)";
pub const COMPLEXITY_QDRIFT_QF: &str = r"O\left((t\Gamma\Omega)^{2}M/\epsilon\right)";

pub const INFEASIBLE: &str = "infeasible (M!)";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Input {
    pub m: usize,
    pub t: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub omega: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gates {
    Count(u64),
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub label: &'static str,
    pub method: MethodId,
    pub implementation: Implementation,
    /// Empty for rows the comparison table does not list.
    pub complexity: &'static str,
    pub n: usize,
    pub gates: Gates,
}

const ROWS: [(&str, MethodId, Implementation, &str); 8] = [
    ("First Order TS Deterministic", MethodId::S1Det, Implementation::ClassicalSampling, COMPLEXITY_S1_DET),
    ("Second Order TS Deterministic", MethodId::S2Det, Implementation::ClassicalSampling, COMPLEXITY_S2_DET),
    ("First Order TS Randomised (CS)", MethodId::S1Ran, Implementation::ClassicalSampling, COMPLEXITY_S1_RAN),
    ("Second Order TS Randomised (CS)", MethodId::S2Ran, Implementation::ClassicalSampling, COMPLEXITY_S2_RAN),
    ("QDRIFT (CS)", MethodId::Qdrift, Implementation::ClassicalSampling, COMPLEXITY_QDRIFT_CS),
    ("First Order TS Randomised (QF)", MethodId::S1Ran, Implementation::QuantumForking, COMPLEXITY_S1_RAN),
    ("QDRIFT (QF)", MethodId::Qdrift, Implementation::QuantumForking, COMPLEXITY_QDRIFT_QF),
    ("Second Order TS Randomised (QF)", MethodId::S2Ran, Implementation::QuantumForking, ""),
];

pub fn table1_report(input: &Table1Input, opts: BoundOptions) -> Result<Vec<Table1Row>> {
    if input.m == 0 {
        bail!("M must be positive");
    }
    for (name, v) in [("lambda", input.lambda), ("gamma", input.gamma), ("omega", input.omega)] {
        if !(v >= 0.0 && v.is_finite()) {
            bail!("{name} must be a nonnegative number, got {v}");
        }
    }
    let stats = GeneratorStats { lambda: input.lambda, omega: input.omega, gamma_total: input.gamma, m_total: input.m };
    ROWS.iter()
        .map(|&(label, method, implementation, complexity)| {
            let n = step_count_with(method, &stats, input.t, input.eps, opts)?.n_steps;
            let gates = match (method, implementation) {
                (MethodId::S2Ran, Implementation::QuantumForking) => Gates::Infeasible,
                _ => Gates::Count(gate_count(method, input.m, n, implementation)?),
            };
            Ok(Table1Row { label, method, implementation, complexity, n, gates })
        })
        .collect()
}

fn gates_cell(g: &Gates) -> String {
    match g {
        Gates::Count(c) => c.to_string(),
        Gates::Infeasible => INFEASIBLE.to_string(),
    }
}

pub fn render_text(input: &Table1Input, rows: &[Table1Row]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "M = {}, t = {}, Lambda = {}, Gamma = {}, Omega = {}, eps = {}",
        input.m, input.t, input.lambda, input.gamma, input.omega, input.eps
    );
    let lw = rows.iter().map(|r| r.label.len()).max().unwrap_or(0);
    let cw = rows.iter().map(|r| r.complexity.len()).max().unwrap_or(0);
    let _ = writeln!(s, "{:<lw$}  {:<cw$}  {:>10}  {:>15}", "Method", "Gate complexity", "N", "gates");
    for r in rows {
        let complexity = if r.complexity.is_empty() { "-" } else { r.complexity };
        let _ = writeln!(s, "{:<lw$}  {:<cw$}  {:>10}  {:>15}", r.label, complexity, r.n, gates_cell(&r.gates));
    }
    s
}

pub fn render_latex(rows: &[Table1Row]) -> String {
    let mut s = String::from("\\begin{tabular}{l l r r}\n\\hline\nMethod & Gate Complexity & $N$ & gates \\\\\n\\hline\n");
    for r in rows {
        let complexity = if r.complexity.is_empty() { "--".to_string() } else { format!("${}$", r.complexity) };
        let _ = writeln!(s, "{} & {} & {} & {} \\\\", r.label, complexity, r.n, gates_cell(&r.gates));
    }
    s.push_str("\\hline\n\\end{tabular}\n");
    s
}
