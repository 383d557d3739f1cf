//! Machine-readable bench reports (JSON) and the human-facing aligned CSV
//! table, one row per (algorithm, eps) cell.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct BenchCell {
    pub algo: String,
    pub mode: String,
    pub target_eps: f64,
    pub delta: f64,
    pub n: usize,
    pub d: usize,
    /// Formula coreset size for this cell, when one exists.
    pub formula_size: Option<usize>,
    /// Largest measured cardinality across trials.
    pub nnz_max: usize,
    pub build_time_ms_mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_error_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_error_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weak_ratio_max: Option<f64>,
    pub trials: usize,
    pub success_count: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub input: String,
    pub n: usize,
    pub d: usize,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    pub cells: Vec<BenchCell>,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned CSV: type, size formula vs measured, error and success columns.
    pub fn to_table(&self) -> String {
        let mut rows: Vec<Vec<String>> = vec![vec![
            "algo".into(),
            "mode".into(),
            "eps".into(),
            "delta".into(),
            "formula_size".into(),
            "nnz_max".into(),
            "build_ms".into(),
            "worst_err".into(),
            "empirical_err".into(),
            "weak_ratio".into(),
            "success".into(),
        ]];
        let fmt_opt = |v: &Option<f64>| match v {
            Some(x) => format!("{x:.6}"),
            None => "-".into(),
        };
        for c in &self.cells {
            rows.push(vec![
                c.algo.clone(),
                c.mode.clone(),
                format!("{}", c.target_eps),
                format!("{}", c.delta),
                c.formula_size
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| "O(1)".into()),
                c.nnz_max.to_string(),
                format!("{:.3}", c.build_time_ms_mean),
                fmt_opt(&c.worst_error_max),
                fmt_opt(&c.empirical_error_max),
                fmt_opt(&c.weak_ratio_max),
                format!("{}/{}", c.success_count, c.trials),
            ]);
        }
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|j| rows.iter().map(|r| r[j].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &rows {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:<w$}"))
                .collect();
            out.push_str(line.join(" , ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// The one-line JSON summary printed by `build`.
#[derive(Debug, Serialize)]
pub struct BuildSummary<'a> {
    pub algo: &'a str,
    pub nnz: usize,
    pub build_ms: f64,
}

/// The JSON report printed by `verify`.
#[derive(Debug, Default, Serialize)]
pub struct VerifyReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_case: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weak_mean_norm_sq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weak_cost_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moment_mean_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moment_mass_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moment_variance_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified_eps: Option<f64>,
}

/// The JSON log printed by `stream`.
#[derive(Debug, Serialize)]
pub struct StreamLog {
    pub chunks: usize,
    pub depth: usize,
    pub levels: Vec<StreamLevelLog>,
    pub nnz: usize,
    pub worst_error: f64,
    pub error_bound: f64,
}

#[derive(Debug, Serialize)]
pub struct StreamLevelLog {
    pub level: usize,
    pub coresets: usize,
    pub total_entries: usize,
}
