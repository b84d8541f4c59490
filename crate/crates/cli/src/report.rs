//! JSON and text renderings of command results.

use serde_json::{json, Map, Value};
use subrec_core::algebra::{ClassicalSector, NoiselessReport};
use subrec_core::correctability::CorrectabilityCertificate;
use subrec_core::io::{matrix_columns, matrix_rows, SubsystemJson};
use subrec_core::linalg::{ComplexMatrix, C64};
use subrec_core::recovery::RecoveryResult;
use subrec_core::ucc::UccReport;
use subrec_core::SubsystemDecomposition;

/// Code vectors are listed in text output up to this dimension.
const TEXT_VECTOR_DIM: usize = 8;

pub struct Report {
    pub command: &'static str,
    /// Exit 0 when true, 2 for a clean negative result.
    pub success: bool,
    body: Map<String, Value>,
    residuals: Map<String, Value>,
    pub text: String,
}

impl Report {
    fn new(command: &'static str, success: bool) -> Self {
        Report {
            command,
            success,
            body: Map::new(),
            residuals: Map::new(),
            text: String::new(),
        }
    }

    fn field(&mut self, key: &str, value: Value) {
        self.body.insert(key.into(), value);
    }

    fn residual(&mut self, key: &str, value: f64) {
        self.residuals.insert(key.into(), json!(value));
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    pub fn with_command(mut self, command: &'static str) -> Self {
        self.command = command;
        self
    }

    pub fn to_json(&self, tol: f64) -> String {
        let mut out = Map::new();
        out.insert("command".into(), json!(self.command));
        out.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        out.insert("tolerance".into(), json!(tol));
        out.insert("success".into(), json!(self.success));
        out.extend(self.body.clone());
        out.insert("residuals".into(), Value::Object(self.residuals.clone()));
        serde_json::to_string_pretty(&Value::Object(out)).expect("report serializes")
    }
}

fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

fn complex(z: C64) -> String {
    let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    match (re == 0.0, im == 0.0) {
        (_, true) => format!("{re:.4}"),
        (true, false) => format!("{im:.4}i"),
        (false, false) => format!("{re:.4}{:+.4}i", im),
    }
}

fn column_lines(report: &mut Report, label: &str, m: &ComplexMatrix) {
    if m.nrows() > TEXT_VECTOR_DIM {
        return;
    }
    for (j, col) in m.column_iter().enumerate() {
        let entries: Vec<String> = col.iter().map(|&z| complex(z)).collect();
        report.line(format!("    {label}{j} = ({})", entries.join(", ")));
    }
}

fn subsystem_value(dec: &SubsystemDecomposition) -> Value {
    serde_json::to_value(SubsystemJson::from_decomposition(dec)).expect("subsystem serializes")
}

fn sector_value(s: &ClassicalSector) -> Value {
    json!({ "block": s.block, "isometry": matrix_columns(&s.isometry) })
}

pub fn check(cert: &CorrectabilityCertificate, dec: &SubsystemDecomposition) -> Report {
    let mut r = Report::new("check", cert.passed);
    r.field("passed", json!(cert.passed));
    r.field("residual", json!(cert.residual));
    r.field("dA", json!(dec.d_a()));
    r.field("dB", json!(dec.d_b()));
    r.field("kraus_count", json!(cert.kraus_count));
    if let Some(blocks) = &cert.f_blocks {
        let rows: Vec<Vec<Value>> = blocks
            .iter()
            .map(|row| row.iter().map(|f| json!(matrix_rows(f))).collect())
            .collect();
        r.field("F_blocks", json!(rows));
    }
    if let Some(g) = &cert.g_a {
        r.field("G_A", json!(matrix_rows(&g.matrix)));
    }
    r.residual("certificate", cert.residual);
    if let Some(s) = cert.superop_residual {
        r.residual("superoperator", s);
    }

    r.line(format!("correctable: {}", if cert.passed { "yes" } else { "no" }));
    r.line(format!(
        "subsystem: d = {}, d_A = {}, d_B = {}; {} Kraus operators",
        dec.dim(),
        dec.d_a(),
        dec.d_b(),
        cert.kraus_count
    ));
    r.line(format!("residual: {}", sci(cert.residual)));
    if let Some(s) = cert.superop_residual {
        r.line(format!("superoperator identity residual: {}", sci(s)));
    }
    r
}

pub fn recover(rec: &RecoveryResult, dec: &SubsystemDecomposition) -> Report {
    let mut r = Report::new("recover", true);
    let blocks: Vec<Value> = rec
        .d_blocks
        .iter()
        .map(|b| json!({ "index": b.index, "rank": b.rank, "diagonal": b.diagonal }))
        .collect();
    let headline = format!(
        "U_recovery maps the channel output on the code into C ⊗ B with d_C = {}, d_B = {}",
        rec.d_c(),
        dec.d_b()
    );
    r.field("passed", json!(true));
    r.field("U_recovery", json!(matrix_rows(&rec.u_recovery)));
    r.field("C", subsystem_value(&rec.c_subsystem));
    r.field(
        "F_CA_kraus",
        json!(rec.f_ca_kraus.iter().map(matrix_rows).collect::<Vec<_>>()),
    );
    r.field("residual", json!(rec.residual));
    r.field(
        "summary",
        json!({
            "dim": dec.dim(),
            "dA": dec.d_a(),
            "dB": dec.d_b(),
            "dC": rec.d_c(),
            "D_blocks": blocks,
            "D_trace": rec.d_trace(),
            "text": headline,
        }),
    );
    r.residual("recovery", rec.residual);
    r.residual("orthogonality", rec.orthogonality_residual);
    r.residual("action", rec.action_residual);

    r.line("recovery: constructed");
    r.line(format!(
        "d = {}, d_A = {}, d_B = {}, d_C = {}",
        dec.dim(),
        dec.d_a(),
        dec.d_b(),
        rec.d_c()
    ));
    for b in &rec.d_blocks {
        r.line(format!("  Kraus block {}: rank {}", b.index, b.rank));
    }
    r.line(format!("F_C|A Kraus operators: {}", rec.f_ca_kraus.len()));
    r.line(format!("residual: {}", sci(rec.residual)));
    r.line(format!("orthogonality residual: {}", sci(rec.orthogonality_residual)));
    r.line(format!("action residual: {}", sci(rec.action_residual)));
    r
}

pub fn noiseless(ns: &NoiselessReport, composed: bool) -> Report {
    let mut r = Report::new("ns", !ns.subsystems.is_empty());
    let s = &ns.structure;
    r.field("channel", json!(if composed { "E†∘E" } else { "E" }));
    r.field("seed", json!(s.seed));
    r.field(
        "blocks",
        json!(s.blocks.iter().map(|&(m, n)| json!({ "m": m, "n": n })).collect::<Vec<_>>()),
    );
    r.field("Q", json!(matrix_rows(&s.q)));
    r.field(
        "subsystems",
        json!(ns
            .subsystems
            .iter()
            .map(|sub| json!({
                "block": sub.block,
                "subsystem": subsystem_value(&sub.decomposition),
                "residual": sub.residual,
            }))
            .collect::<Vec<_>>()),
    );
    r.field(
        "classical_sectors",
        json!(ns.classical_sectors.iter().map(sector_value).collect::<Vec<_>>()),
    );
    r.residual("structure", s.residual);
    r.residual(
        "subsystems",
        ns.subsystems.iter().map(|x| x.residual).fold(0.0, f64::max),
    );

    r.line(format!(
        "fixed-point algebra of {}: {}",
        if composed { "E†∘E" } else { "E" },
        s.blocks
            .iter()
            .map(|(m, n)| format!("M_{m} ⊗ I_{n}"))
            .collect::<Vec<_>>()
            .join(" ⊕ ")
    ));
    r.line(format!("structure residual: {}", sci(s.residual)));
    if ns.subsystems.is_empty() {
        r.line("no quantum noiseless subsystem");
    }
    for sub in &ns.subsystems {
        let dec = &sub.decomposition;
        r.line(format!(
            "noiseless subsystem (block {}): d_A = {}, d_B = {}, residual {}",
            sub.block,
            dec.d_a(),
            dec.d_b(),
            sci(sub.residual)
        ));
    }
    sector_lines(&mut r, &ns.classical_sectors);
    r
}

fn sector_lines(r: &mut Report, sectors: &[ClassicalSector]) {
    if !sectors.is_empty() {
        r.line(format!("classical sectors: {}", sectors.len()));
    }
    for s in sectors {
        r.line(format!("  sector (block {}): dimension {}", s.block, s.isometry.ncols()));
        column_lines(r, "v", &s.isometry);
    }
}

pub fn ucc(rep: &UccReport) -> Report {
    let mut r = Report::new("ucc", !rep.subsystems.is_empty());
    r.field("seed", json!(rep.structure.seed));
    r.field(
        "blocks",
        json!(rep
            .structure
            .blocks
            .iter()
            .map(|&(m, n)| json!({ "m": m, "n": n }))
            .collect::<Vec<_>>()),
    );
    let subs: Vec<Value> = rep
        .subsystems
        .iter()
        .zip(&rep.rank_diagnostics)
        .map(|(s, d)| {
            json!({
                "block": s.block,
                "subsystem": subsystem_value(&s.decomposition),
                "U_correction": matrix_rows(&s.u_correction),
                "residual": s.residual,
                "output_rank": d.output_rank,
                "code_rank": d.code_rank,
            })
        })
        .collect();
    r.field("subsystems", json!(subs));
    r.field(
        "classical_sectors",
        json!(rep.classical_sectors.iter().map(sector_value).collect::<Vec<_>>()),
    );
    r.residual("structure", rep.structure.residual);
    r.residual(
        "correction",
        rep.subsystems.iter().map(|s| s.residual).fold(0.0, f64::max),
    );

    if rep.subsystems.is_empty() {
        r.line("no unitarily correctable subsystem");
    } else {
        r.line(format!("unitarily correctable subsystems: {}", rep.subsystems.len()));
    }
    for s in &rep.subsystems {
        let dec = &s.decomposition;
        r.line(format!(
            "  block {}: d_A = {}, d_B = {}, correction residual {}",
            s.block,
            dec.d_a(),
            dec.d_b(),
            sci(s.residual)
        ));
        column_lines(&mut r, "w", dec.isometry());
    }
    sector_lines(&mut r, &rep.classical_sectors);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use subrec_core::linalg::c;

    #[test]
    fn complex_formatting() {
        assert_eq!(complex(c(1.0, 0.0)), "1.0000");
        assert_eq!(complex(c(0.0, -0.5)), "-0.5000i");
        assert_eq!(complex(c(0.25, 0.5)), "0.2500+0.5000i");
        assert_eq!(complex(c(1e-16, 1.0)), "1.0000i");
    }

    #[test]
    fn residuals_use_three_significant_digits() {
        assert_eq!(sci(1.23456e-12), "1.23e-12");
        let mut r = Report::new("check", false);
        r.residual("certificate", 0.5);
        let v: Value = serde_json::from_str(&r.to_json(1e-9)).unwrap();
        assert_eq!(v["residuals"]["certificate"], json!(0.5));
        assert_eq!(v["version"], json!(env!("CARGO_PKG_VERSION")));
    }
}
