//! Exact one-shot expected information gain.
//!
//! For a branch `s = ±1` the unnormalized posterior weights are
//! `w_i = p_i (1 + s <O>_i) / 2`, whose total `m_s` is the outcome
//! probability. The branch entropy is evaluated without materializing the
//! posterior: `H = log2 m - (1/m) sum_i w_i log2 w_i`.

use super::state::{entropy_bits, BeliefState, EVIDENCE_FLOOR};
use crate::error::Result;

/// `p(+1) = sum_i p(i) (1 + <O>_i) / 2`.
pub fn outcome_probability(belief: &BeliefState, column: &[f64]) -> Result<f64> {
    belief.check_column(column)?;
    let p: f64 = belief
        .probs()
        .iter()
        .zip(column)
        .map(|(p, e)| p * 0.5 * (1.0 + e))
        .sum();
    Ok(p.clamp(0.0, 1.0))
}

/// A constant column leaves the posterior equal to the prior.
fn is_constant(column: &[f64]) -> bool {
    column.iter().all(|&e| e == column[0])
}

#[inline]
fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

fn branch_entropy(mass: f64, weighted_xlogx: f64) -> f64 {
    if mass < EVIDENCE_FLOOR {
        return 0.0;
    }
    (mass.log2() - weighted_xlogx / mass).max(0.0)
}

/// `I = H(prior) - [p(+1) H(post|+1) + p(-1) H(post|-1)]`, in bits.
pub fn expected_info_gain(belief: &BeliefState, column: &[f64]) -> Result<f64> {
    belief.check_column(column)?;
    if is_constant(column) {
        return Ok(0.0);
    }
    let (mut m_plus, mut m_minus, mut s_plus, mut s_minus) = (0.0, 0.0, 0.0, 0.0);
    for (&p, &e) in belief.probs().iter().zip(column) {
        let wp = p * 0.5 * (1.0 + e);
        let wm = p * 0.5 * (1.0 - e);
        m_plus += wp;
        m_minus += wm;
        s_plus += xlog2x(wp);
        s_minus += xlog2x(wm);
    }
    let expected = m_plus * branch_entropy(m_plus, s_plus) + m_minus * branch_entropy(m_minus, s_minus);
    Ok((belief.entropy() - expected).max(0.0))
}

/// Same as [`expected_info_gain`] but measured on the class distribution;
/// the posterior is still formed at the candidate level.
pub fn expected_class_info_gain(belief: &BeliefState, column: &[f64]) -> Result<f64> {
    belief.check_column(column)?;
    let labels = belief.require_classes()?;
    if is_constant(column) {
        return Ok(0.0);
    }
    let nc = labels.n_classes();
    let mut prior = vec![0.0; nc];
    let mut plus = vec![0.0; nc];
    let mut minus = vec![0.0; nc];
    for ((&p, &e), &c) in belief.probs().iter().zip(column).zip(labels.labels()) {
        prior[c] += p;
        plus[c] += p * 0.5 * (1.0 + e);
        minus[c] += p * 0.5 * (1.0 - e);
    }
    let m_plus: f64 = plus.iter().sum();
    let m_minus: f64 = minus.iter().sum();
    let s_plus: f64 = plus.iter().map(|&w| xlog2x(w)).sum();
    let s_minus: f64 = minus.iter().map(|&w| xlog2x(w)).sum();
    let expected = m_plus * branch_entropy(m_plus, s_plus) + m_minus * branch_entropy(m_minus, s_minus);
    Ok((entropy_bits(&prior) - expected).max(0.0))
}
