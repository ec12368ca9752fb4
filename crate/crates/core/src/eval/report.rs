use std::fmt::Write as _;

use serde::Serialize;

use super::MetricsReport;
use crate::features::Dataset;
use crate::models::{cross_validate, cross_validate_auto, CvMethod, ModelError, ModelKind, TrainConfig};

pub const CSV_HEADER: &str = "group,model,precision,recall,f1,support,accuracy,flags";
pub const POOLED_GROUP: &str = "all";
pub const AVERAGE_GROUP: &str = "average";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub group: String,
    pub model: ModelKind,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Absent on average rows.
    pub support: Option<usize>,
    pub accuracy: f64,
    pub flags: String,
}

impl ReportRow {
    fn from_metrics(group: &str, model: ModelKind, m: &MetricsReport, method: CvMethod) -> Self {
        let mut flags = m.zero_division.describe();
        if method == CvMethod::LeaveOneOut {
            if !flags.is_empty() {
                flags.push(';');
            }
            flags.push_str("leave_one_out");
        }
        Self {
            group: group.to_string(),
            model,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            support: Some(m.support),
            accuracy: m.accuracy,
            flags,
        }
    }

    /// Unweighted mean over `rows`.
    fn average(model: ModelKind, rows: &[ReportRow]) -> Self {
        let n = rows.len() as f64;
        let mean = |f: fn(&ReportRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
        Self {
            group: AVERAGE_GROUP.to_string(),
            model,
            precision: mean(|r| r.precision),
            recall: mean(|r| r.recall),
            f1: mean(|r| r.f1),
            support: None,
            accuracy: mean(|r| r.accuracy),
            flags: String::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ReportTable {
    pub rows: Vec<ReportRow>,
}

impl ReportTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for r in &self.rows {
            let support = r.support.map(|s| s.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6},{},{:.6},{}",
                r.group,
                r.model.short(),
                r.precision,
                r.recall,
                r.f1,
                support,
                r.accuracy,
                r.flags
            );
        }
        out
    }

    /// Column-aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let header = ["group", "model", "precision", "recall", "f1", "support", "accuracy", "flags"];
        let body: Vec<[String; 8]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.group.clone(),
                    r.model.short().to_string(),
                    format!("{:.4}", r.precision),
                    format!("{:.4}", r.recall),
                    format!("{:.4}", r.f1),
                    r.support.map(|s| s.to_string()).unwrap_or_default(),
                    format!("{:.4}", r.accuracy),
                    r.flags.clone(),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &body {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let mut line = |cells: &[String]| {
            let mut l = String::new();
            for (i, (c, w)) in cells.iter().zip(widths).enumerate() {
                if i > 0 {
                    l.push_str("  ");
                }
                // text columns left, numbers right
                if i < 2 || i == 7 {
                    let _ = write!(l, "{c:<w$}");
                } else {
                    let _ = write!(l, "{c:>w$}");
                }
            }
            out.push_str(l.trim_end());
            out.push('\n');
        };
        line(&header.map(String::from));
        for row in &body {
            line(row);
        }
        out
    }
}

/// One row per group per model from within-group cross-validation, plus an
/// unweighted average row per model. Groups with a class smaller than `k`
/// fall back to leave-one-out (flagged in the row).
pub fn per_group_report(
    ds: &Dataset,
    kinds: &[ModelKind],
    base: &TrainConfig,
    k: usize,
    seed: u64,
) -> Result<ReportTable, ModelError> {
    let groups = ds.split_by_group();
    let mut rows = Vec::new();
    for &kind in kinds {
        let cfg = TrainConfig { kind, ..base.clone() };
        let mut model_rows = Vec::with_capacity(groups.len());
        for (g, sub) in &groups {
            let r = cross_validate_auto(sub, &cfg, k, seed)?;
            model_rows.push(ReportRow::from_metrics(g, kind, &r.metrics, r.method));
        }
        if !model_rows.is_empty() {
            let avg = ReportRow::average(kind, &model_rows);
            rows.extend(model_rows);
            rows.push(avg);
        }
    }
    Ok(ReportTable { rows })
}

/// One row per model from k-fold cross-validation on the whole dataset.
pub fn pooled_report(
    ds: &Dataset,
    kinds: &[ModelKind],
    base: &TrainConfig,
    k: usize,
    seed: u64,
) -> Result<ReportTable, ModelError> {
    let mut rows = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let cfg = TrainConfig { kind, ..base.clone() };
        let r = cross_validate(ds, &cfg, k, seed)?;
        rows.push(ReportRow::from_metrics(POOLED_GROUP, kind, &r.metrics, r.method));
    }
    Ok(ReportTable { rows })
}

/// Bar chart of recall per report row as a standalone SVG document.
pub fn recall_bar_svg(table: &ReportTable) -> String {
    let bar_w = 48.0;
    let gap = 16.0;
    let plot_h = 200.0;
    let left = 40.0;
    let top = 20.0;
    let width = left + table.rows.len() as f64 * (bar_w + gap) + gap;
    let height = top + plot_h + 60.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for tick in 0..=4 {
        let v = tick as f64 / 4.0;
        let y = top + plot_h * (1.0 - v);
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{y}" x2="{width}" y2="{y}" stroke="#dddddd"/><text x="{}" y="{}" font-size="10" text-anchor="end">{v:.2}</text>"##,
            left - 4.0,
            y + 3.0
        );
    }
    for (i, r) in table.rows.iter().enumerate() {
        let x = left + gap + i as f64 * (bar_w + gap);
        let h = plot_h * r.recall.clamp(0.0, 1.0);
        let _ = writeln!(
            s,
            r##"<rect x="{x}" y="{}" width="{bar_w}" height="{h}" fill="#4477aa"><title>{} {} recall {:.4}</title></rect>"##,
            top + plot_h - h,
            r.group,
            r.model.short(),
            r.recall
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="10" text-anchor="middle">{}</text><text x="{}" y="{}" font-size="10" text-anchor="middle">{}</text>"#,
            x + bar_w / 2.0,
            top + plot_h + 14.0,
            r.model.short(),
            x + bar_w / 2.0,
            top + plot_h + 28.0,
            r.group
        );
    }
    s.push_str("</svg>\n");
    s
}
