use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, LeafDistribution, NodeId};

/// Probability rows over the leaves of a hierarchy, with optional labels.
#[derive(Clone, Debug, Serialize)]
pub struct Dataset {
    #[serde(skip)]
    pub hierarchy: Hierarchy,
    pub distributions: Vec<LeafDistribution>,
    pub labels: Option<Vec<NodeId>>,
}

impl Dataset {
    pub fn new(
        hierarchy: Hierarchy,
        distributions: Vec<LeafDistribution>,
        labels: Option<Vec<NodeId>>,
    ) -> Result<Self> {
        for (i, d) in distributions.iter().enumerate() {
            if d.len() != hierarchy.leaf_count() {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, hierarchy has {} leaves",
                    d.len(),
                    hierarchy.leaf_count()
                )));
            }
        }
        if let Some(ls) = &labels {
            if ls.len() != distributions.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} labels for {} rows",
                    ls.len(),
                    distributions.len()
                )));
            }
            if let Some(&bad) = ls.iter().find(|&&l| !hierarchy.is_leaf(l)) {
                return Err(Error::UnknownLabel(hierarchy.name(bad).to_string()));
            }
        }
        Ok(Dataset {
            hierarchy,
            distributions,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.distributions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distributions.is_empty()
    }

    pub fn labels(&self) -> Result<&[NodeId]> {
        self.labels.as_deref().ok_or(Error::MissingLabels)
    }

    /// CSV with a header of leaf names.
    pub fn probs_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.hierarchy.leaf_names()).expect("in-memory write");
        for d in &self.distributions {
            w.write_record(d.probs().iter().map(|v| v.to_string()))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// One leaf name per line.
    pub fn labels_text(&self) -> Option<String> {
        self.labels.as_ref().map(|ls| {
            ls.iter()
                .map(|&l| format!("{}\n", self.hierarchy.name(l)))
                .collect()
        })
    }

    pub fn write(&self, probs: impl AsRef<Path>, labels: Option<&Path>) -> Result<()> {
        std::fs::write(probs, self.probs_csv())?;
        if let (Some(path), Some(text)) = (labels, self.labels_text()) {
            std::fs::write(path, text)?;
        }
        Ok(())
    }
}

pub fn load_dataset(
    hier_path: impl AsRef<Path>,
    probs_path: impl AsRef<Path>,
    labels_path: Option<&Path>,
) -> Result<Dataset> {
    let h = Hierarchy::read_tsv(hier_path)?;
    let rows = parse_probs(&h, &crate::error::read_text(probs_path.as_ref())?)?;
    let labels = match labels_path {
        Some(p) => Some(parse_labels(&h, &crate::error::read_text(p)?)?),
        None => None,
    };
    Dataset::new(h, rows, labels)
}

/// Parses the probability CSV. The header must list the leaf names in leaf
/// order; every row is validated and renormalized.
pub fn parse_probs(h: &Hierarchy, text: &str) -> Result<Vec<LeafDistribution>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| Error::FormatError {
        line: 1,
        msg: e.to_string(),
    })?;
    if header.len() != h.leaf_count() {
        return Err(Error::DimensionMismatch(format!(
            "header has {} columns, hierarchy has {} leaves",
            header.len(),
            h.leaf_count()
        )));
    }
    for (i, (got, &leaf)) in header.iter().zip(h.leaves()).enumerate() {
        if got != h.name(leaf) {
            return Err(Error::DimensionMismatch(format!(
                "column {i} is `{got}`, expected leaf `{}`",
                h.name(leaf)
            )));
        }
    }
    let mut rows = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let line = idx + 2;
        let rec = rec.map_err(|e| Error::FormatError {
            line,
            msg: e.to_string(),
        })?;
        let vals = rec
            .iter()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::FormatError {
                line,
                msg: format!("row {idx}: {e}"),
            })?;
        let d = LeafDistribution::for_hierarchy(h, vals).map_err(|e| Error::FormatError {
            line,
            msg: format!("row {idx}: {e}"),
        })?;
        rows.push(d);
    }
    Ok(rows)
}

pub fn parse_labels(h: &Hierarchy, text: &str) -> Result<Vec<NodeId>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|name| match h.node_by_name(name) {
            Some(n) if h.is_leaf(n) => Ok(n),
            _ => Err(Error::UnknownLabel(name.to_string())),
        })
        .collect()
}
