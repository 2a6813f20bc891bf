//! Row-stochastic channels between finite alphabets.

use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::numeric::ksum;

/// Row-sum tolerance for a channel matrix.
pub const ROW_TOL: f64 = 1e-12;

/// Additive slack in the pairwise LDP ratio check.
pub const LDP_SLACK: f64 = 1e-12;

/// A stochastic map `P(y | x)`; row `x` is the output law for input `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Channel {
    input_labels: Vec<String>,
    output_labels: Vec<String>,
    matrix: Vec<Vec<f64>>,
    epsilon_ldp: Option<f64>,
}

#[derive(Deserialize)]
struct RawChannel {
    input_labels: Option<Vec<String>>,
    output_labels: Option<Vec<String>>,
    matrix: Vec<Vec<f64>>,
    epsilon_ldp: Option<f64>,
}

impl<'de> Deserialize<'de> for Channel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawChannel::deserialize(d)?;
        let mut ch = Channel::new(raw.matrix, raw.epsilon_ldp).map_err(serde::de::Error::custom)?;
        if let Some(l) = raw.input_labels {
            ch = ch.with_input_labels(l).map_err(serde::de::Error::custom)?;
        }
        if let Some(l) = raw.output_labels {
            ch = ch.with_output_labels(l).map_err(serde::de::Error::custom)?;
        }
        Ok(ch)
    }
}

fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl Channel {
    /// Validates shape, nonnegativity, row sums and (if given) the LDP level.
    pub fn new(matrix: Vec<Vec<f64>>, epsilon_ldp: Option<f64>) -> Result<Self> {
        let k_out = matrix.first().map_or(0, Vec::len);
        if matrix.is_empty() || k_out == 0 {
            return Err(Error::structural("channel matrix is empty"));
        }
        for (x, row) in matrix.iter().enumerate() {
            if row.len() != k_out {
                return Err(Error::structural(format!(
                    "row {x} has {} entries, expected {k_out}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::domain(format!("row {x} has entry {v}")));
            }
            let s = ksum(row.iter().copied());
            if (s - 1.0).abs() > ROW_TOL {
                return Err(Error::domain(format!("row {x} sums to {s}")));
            }
        }
        let ch = Self {
            input_labels: index_labels(matrix.len()),
            output_labels: index_labels(k_out),
            matrix,
            epsilon_ldp: None,
        };
        match epsilon_ldp {
            None => Ok(ch),
            Some(e) => ch.with_ldp_level(e),
        }
    }

    /// Deterministic map sending input `x` to output `cells[x] < d`.
    pub fn from_quantizer(cells: &[usize], d: usize) -> Result<Self> {
        if let Some(&c) = cells.iter().find(|&&c| c >= d) {
            return Err(Error::structural(format!("cell {c} out of range for {d} outputs")));
        }
        let matrix = cells
            .iter()
            .map(|&c| {
                let mut row = vec![0.0; d];
                row[c] = 1.0;
                row
            })
            .collect();
        Self::new(matrix, None)
    }

    /// Records `epsilon` as the channel's privacy level after checking it.
    pub fn with_ldp_level(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::domain(format!("epsilon = {epsilon} must be nonnegative")));
        }
        if !ldp_feasible(&self, epsilon) {
            return Err(Error::domain(format!("channel is not {epsilon}-LDP")));
        }
        self.epsilon_ldp = Some(epsilon);
        Ok(self)
    }

    pub fn with_input_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.matrix.len() {
            return Err(Error::structural("input label count does not match rows"));
        }
        self.input_labels = labels;
        Ok(self)
    }

    pub fn with_output_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.k_out() {
            return Err(Error::structural("output label count does not match columns"));
        }
        self.output_labels = labels;
        Ok(self)
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn epsilon_ldp(&self) -> Option<f64> {
        self.epsilon_ldp
    }

    pub fn k_in(&self) -> usize {
        self.matrix.len()
    }

    pub fn k_out(&self) -> usize {
        self.matrix[0].len()
    }

    pub fn output_labels(&self) -> &[String] {
        &self.output_labels
    }

    /// Law of the output when the input has law `p`.
    pub fn push_forward(&self, p: &Distribution) -> Result<Distribution> {
        if p.len() != self.k_in() {
            return Err(Error::structural(format!(
                "distribution has {} symbols, channel expects {}",
                p.len(),
                self.k_in()
            )));
        }
        let out = push_slice(&self.matrix, p.probs());
        Distribution::new(self.output_labels.clone(), out)
    }

    /// Permutes output columns: new column `j` is old column `perm[j]`.
    pub fn relabel_outputs(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.k_out()];
        if perm.len() != self.k_out()
            || perm
                .iter()
                .any(|&j| j >= seen.len() || std::mem::replace(&mut seen[j], true))
        {
            return Err(Error::structural("not a permutation of the outputs"));
        }
        Ok(Self {
            input_labels: self.input_labels.clone(),
            output_labels: perm.iter().map(|&j| self.output_labels[j].clone()).collect(),
            matrix: self
                .matrix
                .iter()
                .map(|row| perm.iter().map(|&j| row[j]).collect())
                .collect(),
            epsilon_ldp: self.epsilon_ldp,
        })
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub(crate) fn push_slice(matrix: &[Vec<f64>], p: &[f64]) -> Vec<f64> {
    let k_out = matrix[0].len();
    (0..k_out)
        .map(|y| ksum(matrix.iter().zip(p).map(|(row, &px)| px * row[y])))
        .collect()
}

/// Whether `P(y|x) ≤ e^ε P(y|x′) + 1e-12` for every output `y` and inputs `x, x′`.
pub fn ldp_feasible(ch: &Channel, epsilon: f64) -> bool {
    ldp_feasible_matrix(&ch.matrix, epsilon)
}

pub(crate) fn ldp_feasible_matrix(matrix: &[Vec<f64>], epsilon: f64) -> bool {
    if epsilon.is_nan() || epsilon < 0.0 {
        return false;
    }
    if epsilon == f64::INFINITY {
        return true;
    }
    let factor = epsilon.exp();
    (0..matrix[0].len()).all(|y| {
        let (lo, hi) = matrix.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), row| {
            (lo.min(row[y]), hi.max(row[y]))
        });
        hi <= factor * lo + LDP_SLACK
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Channel::new(vec![vec![0.5, 0.5], vec![1.0]], None).is_err());
        assert!(Channel::new(vec![vec![0.5, 0.6]], None).is_err());
        assert!(Channel::new(vec![vec![1.5, -0.5]], None).is_err());
        assert!(Channel::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], Some(3.0)).is_err());
    }

    #[test]
    fn constant_channel_is_private_at_every_level() {
        let ch = Channel::new(vec![vec![0.2, 0.8]; 3], None).unwrap();
        for e in [0.0, 0.1, 1.0, 50.0] {
            assert!(ldp_feasible(&ch, e));
        }
    }

    #[test]
    fn deterministic_quantizer_is_never_private() {
        let ch = Channel::from_quantizer(&[0, 1, 1], 2).unwrap();
        for e in [0.0, 1.0, 30.0, 700.0] {
            assert!(!ldp_feasible(&ch, e));
        }
        assert!(ldp_feasible(&ch, f64::INFINITY));
    }

    #[test]
    fn randomized_response_exact_level() {
        for e in [0.1_f64, 0.5, 1.0, 3.0] {
            let f = 1.0 / (1.0 + e.exp());
            let ch = Channel::new(vec![vec![1.0 - f, f], vec![f, 1.0 - f]], None).unwrap();
            assert!(ldp_feasible(&ch, e));
            assert!(!ldp_feasible(&ch, 0.999 * e));
        }
    }

    #[test]
    fn json_round_trip_and_push_forward() {
        let ch = Channel::new(vec![vec![0.9, 0.1], vec![0.3, 0.7], vec![0.5, 0.5]], None)
            .unwrap()
            .with_output_labels(vec!["lo".into(), "hi".into()])
            .unwrap();
        let back = Channel::from_json_str(&ch.to_json_string().unwrap()).unwrap();
        assert_eq!(ch, back);
        let p = Distribution::from_probs(vec![0.5, 0.25, 0.25]).unwrap();
        let out = ch.push_forward(&p).unwrap();
        assert!((out.probs()[0] - 0.65).abs() < 1e-15);
        assert_eq!(out.labels(), ["lo", "hi"]);
    }

    #[test]
    fn relabel_checks_permutation() {
        let ch = Channel::new(vec![vec![0.9, 0.1, 0.0]], None).unwrap();
        assert!(ch.relabel_outputs(&[0, 0, 1]).is_err());
        let r = ch.relabel_outputs(&[2, 0, 1]).unwrap();
        assert_eq!(r.matrix()[0], vec![0.0, 0.9, 0.1]);
    }
}
