use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::{FeatureError, FeatureSchema};

/// Label assigned to windows that were never matched against annotations.
pub const UNLABELED: &str = "unlabeled";

const LEAD_COLUMNS: [&str; 3] = ["recording_id", "window_start_index", "label"];

/// Feature matrix with per-row labels, groups (recording or dog id) and
/// source window offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub schema: FeatureSchema,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    pub groups: Vec<String>,
    pub starts: Vec<usize>,
}

impl Dataset {
    pub fn new(
        schema: FeatureSchema,
        rows: Vec<Vec<f64>>,
        labels: Vec<String>,
        groups: Vec<String>,
        starts: Vec<usize>,
    ) -> Result<Self, FeatureError> {
        let n = rows.len();
        if labels.len() != n || groups.len() != n || starts.len() != n {
            return Err(FeatureError::Inconsistent(format!(
                "{n} rows, {} labels, {} groups, {} starts",
                labels.len(),
                groups.len(),
                starts.len()
            )));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != schema.len()) {
            return Err(FeatureError::DimensionMismatch {
                expected: schema.len(),
                found: r.len(),
            });
        }
        Ok(Self {
            schema,
            rows,
            labels,
            groups,
            starts,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.schema.len()
    }

    /// Distinct labels in sorted order.
    pub fn classes(&self) -> Vec<String> {
        let mut c = self.labels.clone();
        c.sort();
        c.dedup();
        c
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i].clone()).collect(),
            groups: idx.iter().map(|&i| self.groups[i].clone()).collect(),
            starts: idx.iter().map(|&i| self.starts[i]).collect(),
        }
    }

    /// Relabels every row that is not `positive` as `negative`.
    pub fn binarize(mut self, positive: &str, negative: &str) -> Dataset {
        for l in &mut self.labels {
            if l != positive {
                *l = negative.to_string();
            }
        }
        self
    }

    /// Groups in order of first appearance.
    pub fn group_ids(&self) -> Vec<String> {
        let mut seen: Vec<String> = Vec::new();
        for g in &self.groups {
            if !seen.contains(g) {
                seen.push(g.clone());
            }
        }
        seen
    }

    /// One sub-dataset per group, in order of first appearance.
    pub fn split_by_group(&self) -> Vec<(String, Dataset)> {
        self.group_ids()
            .into_iter()
            .map(|g| {
                let idx: Vec<usize> = (0..self.len()).filter(|&i| self.groups[i] == g).collect();
                let sub = self.subset(&idx);
                (g, sub)
            })
            .collect()
    }

    pub fn concat(parts: &[Dataset]) -> Result<Dataset, FeatureError> {
        let first = parts.first().ok_or(FeatureError::EmptyInput)?;
        let mut out = Dataset {
            schema: first.schema.clone(),
            rows: Vec::new(),
            labels: Vec::new(),
            groups: Vec::new(),
            starts: Vec::new(),
        };
        for p in parts {
            if p.schema != out.schema {
                return Err(FeatureError::Inconsistent("schemas differ".into()));
            }
            out.rows.extend(p.rows.iter().cloned());
            out.labels.extend(p.labels.iter().cloned());
            out.groups.extend(p.groups.iter().cloned());
            out.starts.extend(p.starts.iter().copied());
        }
        Ok(out)
    }

    /// Hex SHA-256 over schema, labels and the exact bits of every value.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.schema.hash().0.as_bytes());
        for (row, label) in self.rows.iter().zip(&self.labels) {
            h.update(label.as_bytes());
            h.update([0u8]);
            for v in row {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }
}

/// Feature file: `recording_id,window_start_index,label,<schema names>`,
/// values in shortest round-trip form.
pub fn write_features_csv(ds: &Dataset) -> String {
    let mut out = String::new();
    out.push_str(&LEAD_COLUMNS.join(","));
    for n in ds.schema.names() {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for i in 0..ds.len() {
        let _ = write!(out, "{},{},{}", ds.groups[i], ds.starts[i], ds.labels[i]);
        for v in &ds.rows[i] {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn read_features_csv(text: &str) -> Result<Dataset, FeatureError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = rdr.records();
    let err = |line: usize, reason: &str| FeatureError::Csv {
        line,
        reason: reason.to_string(),
    };
    let header = records
        .next()
        .ok_or_else(|| err(1, "missing header"))?
        .map_err(|e| err(1, &e.to_string()))?;
    if header.len() < LEAD_COLUMNS.len() || !header.iter().take(3).eq(LEAD_COLUMNS) {
        return Err(err(1, "header must start with recording_id,window_start_index,label"));
    }
    let schema = FeatureSchema::new(header.iter().skip(3).map(str::to_string).collect());
    let d = schema.len();
    let (mut rows, mut labels, mut groups, mut starts) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (i, rec) in records.enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| err(line, &e.to_string()))?;
        if rec.len() != d + 3 {
            return Err(err(line, &format!("expected {} fields, found {}", d + 3, rec.len())));
        }
        groups.push(rec[0].to_string());
        starts.push(rec[1].parse().map_err(|_| err(line, "bad window_start_index"))?);
        labels.push(rec[2].to_string());
        let row = rec
            .iter()
            .skip(3)
            .map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| err(line, "non-numeric or non-finite feature value"))?;
        rows.push(row);
    }
    Dataset::new(schema, rows, labels, groups, starts)
}
