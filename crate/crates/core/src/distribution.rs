//! Finite probability vectors over an ordered, labelled support.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ksum;

/// Mass deviation from 1 that is silently renormalized.
pub const RENORMALIZE_TOL: f64 = 1e-9;

/// A probability vector over an ordered discrete support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    labels: Vec<String>,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDistribution {
    labels: Option<Vec<String>>,
    probs: Vec<f64>,
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawDistribution::deserialize(d)?;
        let labels = raw
            .labels
            .unwrap_or_else(|| (0..raw.probs.len()).map(|i| i.to_string()).collect());
        Distribution::new(labels, raw.probs).map_err(serde::de::Error::custom)
    }
}

impl Distribution {
    /// Validates and, if the mass is within [`RENORMALIZE_TOL`] of 1, renormalizes.
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if labels.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} labels for {} probabilities",
                labels.len(),
                probs.len()
            )));
        }
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidDistribution(format!("duplicate label {l:?}")));
            }
        }
        for (i, &x) in probs.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "entry {i} is {x}, expected a finite nonnegative number"
                )));
            }
        }
        let mass = ksum(probs.iter().copied());
        if (mass - 1.0).abs() > RENORMALIZE_TOL {
            return Err(Error::InvalidDistribution(format!(
                "total mass {mass} differs from 1 by more than {RENORMALIZE_TOL}"
            )));
        }
        let probs = if mass == 1.0 {
            probs
        } else {
            probs.into_iter().map(|x| x / mass).collect()
        };
        Ok(Self { labels, probs })
    }

    /// Distribution with labels `0..k`.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let labels = (0..probs.len()).map(|i| i.to_string()).collect();
        Self::new(labels, probs)
    }

    /// Ber(x) on the support `["0", "1"]` with mass `x` on `"1"`.
    pub fn bernoulli(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::domain(format!("Bernoulli bias {x} outside [0, 1]")));
        }
        Self::new(vec!["0".into(), "1".into()], vec![1.0 - x, x])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// n-fold product distribution, labels joined with `,`.
    pub fn product_power(&self, n: usize) -> Result<Self> {
        let mut labels = vec![String::new()];
        let mut probs = vec![1.0];
        for _ in 0..n {
            let mut nl = Vec::with_capacity(labels.len() * self.len());
            let mut np = Vec::with_capacity(labels.len() * self.len());
            for (l, &w) in labels.iter().zip(&probs) {
                for (sl, &sp) in self.labels.iter().zip(&self.probs) {
                    nl.push(if l.is_empty() { sl.clone() } else { format!("{l},{sl}") });
                    np.push(w * sp);
                }
            }
            labels = nl;
            probs = np;
        }
        Self::new(labels, probs)
    }

    /// Push forward through a deterministic map `cell[i]` into `d` outputs.
    pub fn coarsen(&self, cell: &[usize], d: usize) -> Result<Self> {
        if cell.len() != self.len() {
            return Err(Error::structural("coarsening map length differs from support size"));
        }
        let mut out = vec![0.0; d];
        for (&c, &x) in cell.iter().zip(&self.probs) {
            if c >= d {
                return Err(Error::structural(format!("cell index {c} out of range {d}")));
            }
            out[c] += x;
        }
        Self::from_probs(out)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Reads `label,prob` rows. A header row is accepted if its second field is not numeric.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut labels = Vec::new();
        let mut probs = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(Error::Parse(format!("row {i}: expected 2 fields, got {}", rec.len())));
            }
            match rec[1].parse::<f64>() {
                Ok(x) => {
                    labels.push(rec[0].to_string());
                    probs.push(x);
                }
                Err(_) if i == 0 => continue,
                Err(e) => return Err(Error::Parse(format!("row {i}: {e}"))),
            }
        }
        Self::new(labels, probs)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["label", "prob"])?;
        for (l, p) in self.labels.iter().zip(&self.probs) {
            w.write_record([l.as_str(), &format!("{p:e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Loads a file, choosing CSV for a `.csv` extension and JSON otherwise.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            Self::read_csv(bytes.as_slice())
        } else {
            Self::from_json_str(std::str::from_utf8(&bytes).map_err(|e| Error::Parse(e.to_string()))?)
        }
    }
}

/// Checks that two distributions share a support size.
pub fn check_aligned(p: &Distribution, q: &Distribution) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::structural(format!(
            "support sizes differ: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    Ok(())
}
