use super::trivialize::first_violation;
use super::{int_scale, ExtensionData, TrivializationWitness};
use crate::error::{Error, Result};
use crate::padic_series::TruncatedSeries;

/// One replayed congruence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    /// `witness`, `a`, `b`, `c`, `d` or `conclusion`.
    pub stage: &'static str,
    /// The relation the congruence is read from.
    pub relation: &'static str,
    pub statement: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorsionOutcome {
    /// `alpha = 0 mod p` and `beta = alpha / p` trivializes `e`.
    Certified {
        beta: TrivializationWitness,
        trace: Vec<TraceStep>,
        precision: u32,
    },
    /// A congruence of the chain failed; `step` is the first failure.
    Refuted {
        step: TraceStep,
        trace: Vec<TraceStep>,
    },
    /// Every congruence holds, but `alpha` has a coefficient prime to p in a
    /// degree above `M / p`, where `phi^*` is invisible at this truncation.
    Inconclusive {
        reason: String,
        trace: Vec<TraceStep>,
    },
}

impl TorsionOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, TorsionOutcome::Certified { .. })
    }

    pub fn trace(&self) -> &[TraceStep] {
        match self {
            TorsionOutcome::Certified { trace, .. }
            | TorsionOutcome::Refuted { trace, .. }
            | TorsionOutcome::Inconclusive { trace, .. } => trace,
        }
    }
}

fn zero_mod_p(s: &TruncatedSeries) -> bool {
    s.is_divisible_by_p_pow(1)
}

fn zero_mod_p_through(s: &TruncatedSeries, degree: usize) -> bool {
    let p = s.context().p();
    s.residues().iter().take(degree + 1).all(|c| c % p == 0)
}

struct Trace {
    steps: Vec<TraceStep>,
}

impl Trace {
    fn record(&mut self, stage: &'static str, relation: &'static str, statement: String, holds: bool) -> bool {
        self.steps.push(TraceStep {
            stage,
            relation,
            statement,
            holds,
        });
        holds
    }

    fn refuted(self) -> TorsionOutcome {
        let step = self.steps.last().cloned().expect("a failing step");
        TorsionOutcome::Refuted {
            step,
            trace: self.steps,
        }
    }
}

/// Upgrades a trivialization `w` of `p e` to one of `e`.
///
/// With `A = w.alpha` the chain is
/// (a) `A_ii = p m_ii = 0 mod p`;
/// (b) `A_ij + A_ji = p m_ij = 0 mod p`;
/// (c) `p v_i0 = phi^* A_{i,h-1} - p^(1 + [i = h-1]) A_{i+1,0}` gives
///     `phi^* A_{i,h-1} = 0 mod p`, so `A_{i,h-1} = 0 mod p`;
/// (d) for `j = h-2, ..., 0`, `v_{i,j+1} = phi^* A_ij - p^[i = h-1] A_{i+1,j+1}`
///     with `v_{i,j+1} = 0 mod p` gives `A_ij = 0 mod p`.
/// Every congruence is evaluated on the data. Then `beta = A / p` is checked
/// against the equations of `e` at one p-adic digit less.
pub fn p_torsion_check(e: &ExtensionData, w: &TrivializationWitness) -> Result<TorsionOutcome> {
    if !e.is_geometric() {
        return Err(Error::HypothesisMissing("geometric flag is not set".into()));
    }
    if !e.satisfies_rank_one() {
        return Err(Error::HypothesisMissing(
            "Frobenius is not of rank one mod p on the a-components".into(),
        ));
    }
    let h = e.height();
    if w.height() != h {
        return Err(Error::Dimension(format!("witness height {} != {h}", w.height())));
    }
    let wctx = w.context();
    if wctx.precision() < 2 {
        return Err(Error::PrecisionExhausted {
            needed: 2,
            available: wctx.precision(),
        });
    }
    let p = wctx.p();
    let pe = int_scale(e, p as i128);
    if let Some((eq, i, j)) = first_violation(&pe, w.alpha())? {
        return Err(Error::WitnessInvalid(format!(
            "{} equation for p*e fails at ({i}, {j})",
            eq.name()
        )));
    }
    let a = w.alpha();
    let v = e.v().with_precision(wctx.precision())?;
    let window = wctx.frobenius_window();
    let mut trace = Trace { steps: Vec::new() };
    for relation in ["connection", "frobenius", "pairing"] {
        trace.record("witness", relation, format!("{relation} equations hold for p*e"), true);
    }

    for i in 0..h {
        let ok = zero_mod_p(a.get(i, i));
        if !trace.record("a", "pairing-diagonal", format!("A[{i}][{i}] = p m[{i}][{i}] = 0 mod p"), ok) {
            return Ok(trace.refuted());
        }
    }
    for i in 0..h {
        for j in i + 1..h {
            let ok = zero_mod_p(&(a.get(i, j) + a.get(j, i)));
            let statement = format!("A[{i}][{j}] + A[{j}][{i}] = p m[{i}][{j}] = 0 mod p");
            if !trace.record("b", "pairing-offdiagonal", statement, ok) {
                return Ok(trace.refuted());
            }
        }
    }

    // bound[i][j]: A_ij = 0 mod p is derived through this degree
    let top = wctx.truncation();
    let mut bound = vec![vec![0usize; h]; h];
    for (i, row) in bound.iter_mut().enumerate() {
        row[i] = top;
    }
    let symmetrize = |bound: &mut Vec<Vec<usize>>| {
        for i in 0..h {
            for j in 0..h {
                bound[i][j] = bound[i][j].max(bound[j][i]);
            }
        }
    };

    let last = h - 1;
    for i in 0..h {
        let pulled = a.get(i, last).frobenius_pullback();
        let statement = format!(
            "phi^* A[{i}][{last}] = p v[{i}][0] + p^k A[{}][0] = 0 mod p",
            (i + 1) % h
        );
        if !trace.record("c", "frobenius", statement, zero_mod_p(&pulled)) {
            return Ok(trace.refuted());
        }
        bound[i][last] = bound[i][last].max(window);
        let ok = zero_mod_p_through(a.get(i, last), bound[i][last]);
        let statement = format!("A[{i}][{last}] = 0 mod p through degree {}", bound[i][last]);
        if !trace.record("c", "frobenius-injective", statement, ok) {
            return Ok(trace.refuted());
        }
    }
    symmetrize(&mut bound);

    for j in (0..last).rev() {
        for i in 0..h {
            let ok = zero_mod_p(v.get(i, j + 1));
            if !trace.record("d", "rank-one-mod-p", format!("v[{i}][{}] = 0 mod p", j + 1), ok) {
                return Ok(trace.refuted());
            }
            let (ni, nj) = ((i + 1) % h, j + 1);
            // the A_{i+1,j+1} term carries an extra p on the last row
            let premise = if i == last { top } else { bound[ni][nj] };
            let statement = format!(
                "phi^* A[{i}][{j}] = v[{i}][{nj}] + p^[i = h-1] A[{ni}][{nj}] = 0 mod p through degree {premise}"
            );
            let ok = zero_mod_p_through(&a.get(i, j).frobenius_pullback(), premise);
            if !trace.record("d", "frobenius-reduced", statement, ok) {
                return Ok(trace.refuted());
            }
            bound[i][j] = bound[i][j].max(premise / p as usize);
            let ok = zero_mod_p_through(a.get(i, j), bound[i][j]);
            let statement = format!("A[{i}][{j}] = 0 mod p through degree {}", bound[i][j]);
            if !trace.record("d", "frobenius-injective", statement, ok) {
                return Ok(trace.refuted());
            }
        }
        symmetrize(&mut bound);
    }

    let underived = a
        .entries()
        .find(|(i, j, s)| !zero_mod_p(s) && bound[*i][*j] < top);
    if let Some((i, j, _)) = underived {
        let reason = format!(
            "A[{i}][{j}] is nonzero mod p above degree {}, which the chain cannot reach at truncation {top}",
            bound[i][j]
        );
        trace.record("conclusion", "frobenius-injective", "A = 0 mod p in all degrees".into(), false);
        return Ok(TorsionOutcome::Inconclusive {
            reason,
            trace: trace.steps,
        });
    }
    let ok = a.entries().all(|(_, _, s)| zero_mod_p(s));
    if !trace.record("conclusion", "frobenius-injective", "A = 0 mod p in all degrees".into(), ok) {
        return Ok(trace.refuted());
    }

    let beta = a.div_p_pow(1)?;
    let precision = beta.context().precision();
    let violation = first_violation(e, &beta)?;
    let statement = format!("beta = A / p trivializes e at precision {precision}");
    if !trace.record("conclusion", "trivialization", statement, violation.is_none()) {
        return Ok(trace.refuted());
    }
    Ok(TorsionOutcome::Certified {
        beta: TrivializationWitness::new(beta)?,
        trace: trace.steps,
        precision,
    })
}
