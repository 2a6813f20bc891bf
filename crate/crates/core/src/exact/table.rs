//! Exact distribution of the n-sample log-likelihood ratio.

use serde::Serialize;

use crate::distribution::{check_aligned, Distribution};
use crate::error::{Error, Result};
use crate::numeric::{binomial_u128, ksum, ln_factorial_table, KahanSum};

/// Largest number of type classes materialized into a table.
pub const TYPE_CLASS_LIMIT: u128 = 2_000_000;
/// Largest number of type classes visited by the streaming reductions.
pub const STREAM_LIMIT: u128 = 200_000_000;
/// Largest number of atoms the convolution path may hold.
pub const CONVOLUTION_ATOM_LIMIT: usize = 4_000_000;
/// Absolute LLR distance under which the convolution path merges atoms.
pub const MERGE_TOL: f64 = 1e-9;

/// One value of the LLR with its probability under each hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LlrAtom {
    /// `ln(P/Q)`; `+inf` when `Q = 0`, `-inf` when `P = 0`.
    pub llr: f64,
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableStrategy {
    Auto,
    TypeClass,
    Convolution,
}

/// Atoms sorted by increasing LLR.
#[derive(Debug, Clone, Serialize)]
pub struct LlrAtomTable {
    pub n: u64,
    pub strategy: TableStrategy,
    atoms: Vec<LlrAtom>,
}

/// Support restricted to symbols with positive mass under `p` or `q`.
#[derive(Debug, Clone)]
pub(crate) struct Reduced {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl Reduced {
    pub fn new(p: &Distribution, q: &Distribution) -> Result<Self> {
        check_aligned(p, q)?;
        let (mut rp, mut rq) = (Vec::new(), Vec::new());
        for (&a, &b) in p.probs().iter().zip(q.probs()) {
            if a > 0.0 || b > 0.0 {
                rp.push(a);
                rq.push(b);
            }
        }
        Ok(Self { p: rp, q: rq })
    }

    pub fn k(&self) -> usize {
        self.p.len()
    }

    pub fn type_class_count(&self, n: u64) -> u128 {
        let k = self.k() as u64;
        binomial_u128(n + k - 1, k - 1)
    }

    fn single_atom(&self, i: usize) -> LlrAtom {
        let (a, b) = (self.p[i], self.q[i]);
        let llr = if b == 0.0 {
            f64::INFINITY
        } else if a == 0.0 {
            f64::NEG_INFINITY
        } else {
            (a / b).ln()
        };
        LlrAtom { llr, p: a, q: b }
    }
}

/// Visits every type class with positive mass under at least one hypothesis.
///
/// The callback receives `(P, Q, llr)` for the whole class. With
/// `skip_one_sided` set, classes with `P = 0` or `Q = 0` are pruned.
pub(crate) fn for_each_type_class<F: FnMut(f64, f64, f64)>(red: &Reduced, n: u64, skip_one_sided: bool, mut f: F) {
    let k = red.k();
    let lnf = ln_factorial_table(n as usize);
    let lp: Vec<f64> = red.p.iter().map(|x| x.ln()).collect();
    let lq: Vec<f64> = red.q.iter().map(|x| x.ln()).collect();
    let d: Vec<f64> = lp
        .iter()
        .zip(&lq)
        .map(|(a, b)| if a.is_finite() && b.is_finite() { a - b } else { 0.0 })
        .collect();

    struct Ctx<'a> {
        k: usize,
        lnf: &'a [f64],
        lp: &'a [f64],
        lq: &'a [f64],
        d: &'a [f64],
        skip: bool,
        n: usize,
    }

    fn term(c: usize, l: f64) -> f64 {
        if c == 0 {
            0.0
        } else {
            c as f64 * l
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn rec<F: FnMut(f64, f64, f64)>(
        ctx: &Ctx,
        i: usize,
        rem: usize,
        coef: f64,
        lnp: f64,
        lnq: f64,
        llr: f64,
        f: &mut F,
    ) {
        if i + 1 == ctx.k {
            let c = rem;
            let coef = coef - ctx.lnf[c];
            let lnp = lnp + term(c, ctx.lp[i]);
            let lnq = lnq + term(c, ctx.lq[i]);
            if lnp == f64::NEG_INFINITY && lnq == f64::NEG_INFINITY {
                return;
            }
            if ctx.skip && (lnp == f64::NEG_INFINITY || lnq == f64::NEG_INFINITY) {
                return;
            }
            let pm = (coef + lnp).exp();
            let qm = (coef + lnq).exp();
            let l = if lnq == f64::NEG_INFINITY {
                f64::INFINITY
            } else if lnp == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                llr + term(c, ctx.d[i])
            };
            f(pm, qm, l);
            return;
        }
        for c in 0..=rem {
            let nlnp = lnp + term(c, ctx.lp[i]);
            let nlnq = lnq + term(c, ctx.lq[i]);
            if nlnp == f64::NEG_INFINITY && nlnq == f64::NEG_INFINITY {
                continue;
            }
            if ctx.skip && (nlnp == f64::NEG_INFINITY || nlnq == f64::NEG_INFINITY) {
                continue;
            }
            rec(
                ctx,
                i + 1,
                rem - c,
                coef - ctx.lnf[c],
                nlnp,
                nlnq,
                llr + term(c, ctx.d[i]),
                f,
            );
        }
    }

    let ctx = Ctx {
        k,
        lnf: &lnf,
        lp: &lp,
        lq: &lq,
        d: &d,
        skip: skip_one_sided,
        n: n as usize,
    };
    rec(&ctx, 0, ctx.n, lnf[ctx.n], 0.0, 0.0, 0.0, &mut f);
}

fn sort_atoms(atoms: &mut [LlrAtom]) {
    atoms.sort_by(|a, b| a.llr.total_cmp(&b.llr));
}

/// Merges runs of atoms whose LLR lies within [`MERGE_TOL`] of the run's first atom.
fn merge_sorted(atoms: Vec<LlrAtom>) -> Vec<LlrAtom> {
    let mut out: Vec<LlrAtom> = Vec::with_capacity(atoms.len());
    let mut start = f64::NAN;
    for a in atoms {
        if let Some(last) = out.last_mut() {
            let same = if a.llr.is_finite() {
                start.is_finite() && a.llr - start <= MERGE_TOL
            } else {
                a.llr == start
            };
            if same {
                last.p += a.p;
                last.q += a.q;
                if last.llr.is_finite() {
                    last.llr = (last.p / last.q).ln();
                }
                continue;
            }
        }
        start = a.llr;
        out.push(a);
    }
    out
}

impl LlrAtomTable {
    pub fn atoms(&self) -> &[LlrAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass_p(&self) -> f64 {
        ksum(self.atoms.iter().map(|a| a.p))
    }

    pub fn mass_q(&self) -> f64 {
        ksum(self.atoms.iter().map(|a| a.q))
    }

    /// `Σ min(α P, (1−α) Q)` over atoms.
    pub fn bayes_error(&self, alpha: f64) -> f64 {
        ksum(self.atoms.iter().map(|a| (alpha * a.p).min((1.0 - alpha) * a.q)))
    }

    /// Hockey-stick divergence of the product pair, `Σ (P − γ Q)_+`.
    pub fn e_gamma(&self, gamma: f64) -> f64 {
        ksum(self.atoms.iter().map(|a| (a.p - gamma * a.q).max(0.0)))
    }

    /// Minimum type-II error subject to type-I error at most `alpha_t1`.
    ///
    /// Rejects `p` on the atoms with the smallest LLR first and randomizes on
    /// the atom where the type-I budget runs out.
    pub fn np_type2(&self, alpha_t1: f64) -> f64 {
        let mut budget = alpha_t1.clamp(0.0, 1.0);
        let mut acc = KahanSum::new();
        let mut iter = self.atoms.iter();
        for a in iter.by_ref() {
            if a.p <= budget {
                budget -= a.p;
                continue;
            }
            let frac = budget / a.p;
            acc.add((1.0 - frac) * a.q);
            break;
        }
        for a in iter {
            acc.add(a.q);
        }
        acc.value().clamp(0.0, 1.0)
    }

    /// Table for the empty sample: one atom at LLR 0.
    pub fn trivial() -> Self {
        Self {
            n: 0,
            strategy: TableStrategy::TypeClass,
            atoms: vec![LlrAtom {
                llr: 0.0,
                p: 1.0,
                q: 1.0,
            }],
        }
    }
}

/// Exact n-sample LLR distribution, choosing the strategy automatically.
pub fn build_llr_table(p: &Distribution, q: &Distribution, n: u64) -> Result<LlrAtomTable> {
    build_llr_table_with(p, q, n, TableStrategy::Auto)
}

pub fn build_llr_table_with(
    p: &Distribution,
    q: &Distribution,
    n: u64,
    strategy: TableStrategy,
) -> Result<LlrAtomTable> {
    let red = Reduced::new(p, q)?;
    build_reduced(&red, n, strategy)
}

pub(crate) fn build_reduced(red: &Reduced, n: u64, strategy: TableStrategy) -> Result<LlrAtomTable> {
    if n == 0 {
        return Ok(LlrAtomTable::trivial());
    }
    let count = red.type_class_count(n);
    let use_types = match strategy {
        TableStrategy::TypeClass => {
            if count > TYPE_CLASS_LIMIT {
                return Err(Error::Capacity {
                    what: "type classes",
                    needed: count,
                    limit: TYPE_CLASS_LIMIT,
                });
            }
            true
        }
        TableStrategy::Convolution => false,
        TableStrategy::Auto => count <= TYPE_CLASS_LIMIT,
    };
    if use_types {
        let mut atoms = Vec::with_capacity(count as usize);
        for_each_type_class(red, n, false, |pm, qm, llr| atoms.push(LlrAtom { llr, p: pm, q: qm }));
        sort_atoms(&mut atoms);
        return Ok(LlrAtomTable {
            n,
            strategy: TableStrategy::TypeClass,
            atoms,
        });
    }
    convolve(red, n)
}

fn convolve(red: &Reduced, n: u64) -> Result<LlrAtomTable> {
    let mut base: Vec<LlrAtom> = (0..red.k()).map(|i| red.single_atom(i)).collect();
    sort_atoms(&mut base);
    let base = merge_sorted(base);
    let mut cur = base.clone();
    for _ in 1..n {
        let needed = cur.len() * base.len();
        if needed > 4 * CONVOLUTION_ATOM_LIMIT {
            return Err(Error::Capacity {
                what: "convolution atoms",
                needed: needed as u128,
                limit: CONVOLUTION_ATOM_LIMIT as u128,
            });
        }
        let mut next = Vec::with_capacity(needed);
        for a in &cur {
            for b in &base {
                let pm = a.p * b.p;
                let qm = a.q * b.q;
                if pm == 0.0 && qm == 0.0 {
                    continue;
                }
                let llr = if qm == 0.0 {
                    f64::INFINITY
                } else if pm == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    a.llr + b.llr
                };
                next.push(LlrAtom { llr, p: pm, q: qm });
            }
        }
        sort_atoms(&mut next);
        cur = merge_sorted(next);
        if cur.len() > CONVOLUTION_ATOM_LIMIT {
            return Err(Error::Capacity {
                what: "convolution atoms",
                needed: cur.len() as u128,
                limit: CONVOLUTION_ATOM_LIMIT as u128,
            });
        }
    }
    Ok(LlrAtomTable {
        n,
        strategy: TableStrategy::Convolution,
        atoms: cur,
    })
}
