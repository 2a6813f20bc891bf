//! Deterministic quantizers with `D` output cells.
//!
//! The search space is restricted to partitions of the support into intervals
//! of the likelihood-ratio order; `brute_force_quantizer` searches all maps
//! and is used to confirm that the restriction loses nothing on small inputs.

use serde::Serialize;

use super::channel::Channel;
use super::Objective;
use crate::distribution::{check_aligned, Distribution};
use crate::error::{Error, Result};

/// Largest number of maps `D^|X|` that brute force will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantizerSolution {
    /// Output cell of each input symbol.
    pub cells: Vec<usize>,
    pub d: usize,
    pub objective: f64,
    pub channel: Channel,
}

/// Support indices sorted by `p/q` ascending; `p = q = 0` symbols go last.
pub fn llr_order(p: &[f64], q: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    let key = |i: usize| -> (u8, f64) {
        if p[i] == 0.0 && q[i] == 0.0 {
            (1, 0.0)
        } else {
            (0, (p[i] / q[i]).ln())
        }
    };
    idx.sort_by(|&a, &b| {
        let (ka, kb) = (key(a), key(b));
        ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    idx
}

fn validate(p: &Distribution, q: &Distribution, d: usize, objective: &Objective) -> Result<()> {
    check_aligned(p, q)?;
    objective.validate()?;
    if d == 0 {
        return Err(Error::domain("a quantizer needs at least one output"));
    }
    Ok(())
}

/// Best interval quantizer by dynamic programming over the likelihood-ratio
/// order, `O(|X|² D)` objective evaluations.
///
/// Among optimal partitions the one with the lexicographically smallest cell
/// boundaries is returned. If `D ≥ |X|` the map is injective and the extra
/// outputs are unused.
pub fn optimal_quantizer_dp(
    p: &Distribution,
    q: &Distribution,
    d: usize,
    objective: &Objective,
) -> Result<QuantizerSolution> {
    validate(p, q, d, objective)?;
    let (pp, qq) = (p.probs(), q.probs());
    let order = llr_order(pp, qq);
    let k = order.len();
    let mut cells = vec![0usize; k];

    if d >= k {
        for (rank, &x) in order.iter().enumerate() {
            cells[x] = rank;
        }
        return Ok(QuantizerSolution {
            objective: objective.value(pp, qq),
            channel: Channel::from_quantizer(&cells, d)?,
            cells,
            d,
        });
    }

    // suffix[c][i]: best value for symbols order[i..] split into c cells.
    let neg = f64::NEG_INFINITY;
    let mut suffix = vec![vec![neg; k + 1]; d + 1];
    let mut choice = vec![vec![usize::MAX; k + 1]; d + 1];
    suffix[0][k] = 0.0;
    for c in 1..=d {
        for i in (0..k).rev() {
            if k - i < c {
                continue;
            }
            let (mut pm, mut qm) = (0.0, 0.0);
            for j in (i + 1)..=(k - c + 1) {
                pm += pp[order[j - 1]];
                qm += qq[order[j - 1]];
                let rest = suffix[c - 1][j];
                if rest == neg {
                    continue;
                }
                let v = objective.term(pm, qm) + rest;
                if v > suffix[c][i] {
                    suffix[c][i] = v;
                    choice[c][i] = j;
                }
            }
        }
    }
    let mut i = 0;
    for c in (1..=d).rev() {
        let j = choice[c][i];
        for &x in &order[i..j] {
            cells[x] = d - c;
        }
        i = j;
    }
    Ok(QuantizerSolution {
        objective: suffix[d][0],
        channel: Channel::from_quantizer(&cells, d)?,
        cells,
        d,
    })
}

/// Value of the deterministic quantizer `cells` (outputs `0..d`).
pub fn quantizer_value(p: &[f64], q: &[f64], cells: &[usize], d: usize, objective: &Objective) -> f64 {
    let mut pm = vec![0.0; d];
    let mut qm = vec![0.0; d];
    for ((&c, &a), &b) in cells.iter().zip(p).zip(q) {
        pm[c] += a;
        qm[c] += b;
    }
    pm.iter().zip(&qm).map(|(&a, &b)| objective.term(a, b)).sum()
}

/// Exhaustive search over all `D^|X|` maps. Returns the first maximizer in
/// lexicographic order of the cell vector.
pub fn brute_force_quantizer(
    p: &Distribution,
    q: &Distribution,
    d: usize,
    objective: &Objective,
) -> Result<(f64, Vec<usize>)> {
    validate(p, q, d, objective)?;
    let k = p.len();
    let count = (d as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::Capacity {
            what: "quantizer maps",
            needed: count,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let (pp, qq) = (p.probs(), q.probs());
    let mut cells = vec![0usize; k];
    let mut best = (f64::NEG_INFINITY, cells.clone());
    loop {
        let v = quantizer_value(pp, qq, &cells, d, objective);
        if v > best.0 {
            best = (v, cells.clone());
        }
        // Odometer increment, last position fastest.
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(best);
            }
            pos -= 1;
            cells[pos] += 1;
            if cells[pos] < d {
                break;
            }
            cells[pos] = 0;
        }
    }
}
