//! The explicit sawtooth transfer function g with
//! 1_S(t) − mes S = g(t) − g(t+α), its cocycle verification, and the
//! quarter-threshold block-average check on the induced frequency
//! perturbations δ_j.

use crate::dd::Dd;
use crate::diophantine::{frac_multiple, DiophantineError, IrrationalAlpha, TorusPoint};
use crate::quasicrystal::FrequencySlice;
use crate::torus_sets::{MultibandSet, SetForm, TorusSetError};
use rand::Rng;
use rand::SeedableRng;
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoboundaryError {
    #[error("interval at left={0} has no ℤα+ℤ length certificate")]
    MissingCertificate(f64),
    #[error("reconstruction failed at j={j}: residual {residual}")]
    ReconstructionFailure { j: i64, residual: f64 },
    #[error(transparent)]
    TorusSet(#[from] TorusSetError),
    #[error(transparent)]
    Diophantine(#[from] DiophantineError),
}

/// Finite sum of translated sawtooths θ(t − shift) plus a constant.
/// θ is 1-periodic with θ(t) = t on [0,1); evaluation is right-continuous.
#[derive(Clone, Debug)]
pub struct SawtoothSum {
    terms: Vec<(i64, TorusPoint)>,
    offset: Dd,
}

impl SawtoothSum {
    pub fn zero() -> SawtoothSum {
        SawtoothSum {
            terms: Vec::new(),
            offset: Dd::ZERO,
        }
    }

    pub fn terms(&self) -> &[(i64, TorusPoint)] {
        &self.terms
    }

    pub fn offset(&self) -> f64 {
        self.offset.to_f64()
    }

    pub fn with_offset(&self, offset: f64) -> SawtoothSum {
        SawtoothSum {
            terms: self.terms.clone(),
            offset: Dd::from_f64(offset),
        }
    }

    pub fn evaluate_dd(&self, t: &TorusPoint) -> Dd {
        let mut acc = self.offset;
        for (coeff, shift) in &self.terms {
            let saw = t.sub_fract(shift).dd();
            acc = acc + saw.mul_f64(*coeff as f64);
        }
        acc
    }

    /// Σ coeff·θ(t − shift) + offset.
    pub fn evaluate(&self, t: &TorusPoint) -> f64 {
        self.evaluate_dd(t).to_f64()
    }

    /// Positions where g itself jumps (the shifts), with net jump −coeff.
    pub fn jump_positions(&self) -> Vec<TorusPoint> {
        self.terms.iter().map(|(_, s)| *s).collect()
    }

    /// Σ|coeff|, an upper bound for sup g − inf g.
    pub fn coefficient_mass(&self) -> i64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }
}

/// Build g for a set whose interval lengths carry ℤα+ℤ certificates
/// (m_j, n_j). An interval rotated to start at a contributes
/// Σ_{k=1}^{m} θ(t − a − kα) for m > 0 and −Σ_{k=0}^{|m|−1} θ(t − a + kα)
/// for m < 0. With `normalize`, the constant is chosen so ∫_S g = 0,
/// by closed-form piecewise-linear integration.
pub fn build_coboundary(
    set: &MultibandSet,
    alpha: &IrrationalAlpha,
    normalize: bool,
) -> Result<SawtoothSum, CoboundaryError> {
    let mut terms: Vec<(i64, TorusPoint)> = Vec::new();
    for (c, iv) in set.terms() {
        let cert = iv
            .certificate()
            .ok_or_else(|| CoboundaryError::MissingCertificate(iv.left().value()))?;
        let m = cert.m;
        if m > 0 {
            for k in 1..=m {
                let shift = iv.left().add_real(frac_multiple(alpha, k)?.real());
                terms.push((c, shift));
            }
        } else if m < 0 {
            for k in 0..m.abs() {
                let shift = iv.left().sub_real(frac_multiple(alpha, k)?.real());
                terms.push((-c, shift));
            }
        }
        // m = 0 means length 1: the full circle contributes nothing
    }
    let mut g = SawtoothSum {
        terms,
        offset: Dd::ZERO,
    };
    if normalize {
        let mes = set.measure_real().dd();
        if mes.to_f64() > 0.0 {
            let integral = integral_over_set(&g, set)?;
            g.offset = -(integral / mes);
        }
    }
    Ok(g)
}

/// ∫_S Σ coeff·θ(t − shift) dt, in closed form over the disjoint form of S.
fn integral_over_set(g: &SawtoothSum, set: &MultibandSet) -> Result<Dd, CoboundaryError> {
    let disjoint = set.to_disjoint()?;
    let intervals = match disjoint.form() {
        SetForm::Disjoint(ivs) => ivs,
        SetForm::Combination(_) => unreachable!("to_disjoint returns disjoint form"),
    };
    let mut total = Dd::ZERO;
    for (coeff, shift) in g.terms() {
        for iv in intervals {
            let u = iv.left().sub_fract(shift).dd();
            let len = iv.length().dd();
            // ∫_a^{a+len} θ(t−s) dt with u = {a−s}
            let piece = if (u + len).to_f64() <= 1.0 {
                // len·u + len²/2
                len * u + (len * len).div_f64(2.0)
            } else {
                // (1−u²)/2 + (u+len−1)²/2
                let w = (u + len).add_f64(-1.0);
                (Dd::ONE - u * u).div_f64(2.0) + (w * w).div_f64(2.0)
            };
            total = total + piece.mul_f64(*coeff as f64);
        }
    }
    Ok(total)
}

/// Result of a randomized cocycle check.
#[derive(Clone, Copy, Debug)]
pub struct CocycleCheck {
    /// max over sampled t of |1_S(t) − mes S − g(t) + g(t+α)|
    pub max_residual: f64,
    /// sample points that had to be nudged off a jump
    pub perturbed_points: usize,
}

/// Check the cocycle identity on seeded random points; points within
/// 1e−9 of any jump of either side are perturbed away and counted.
pub fn verify_cocycle(
    g: &SawtoothSum,
    set: &MultibandSet,
    alpha: &IrrationalAlpha,
    grid_size: usize,
    rng_seed: u64,
) -> CocycleCheck {
    let mut jumps: Vec<f64> = Vec::new();
    let alpha_real = alpha.as_real();
    for (_, shift) in g.terms() {
        jumps.push(shift.value());
        jumps.push(shift.sub_real(&alpha_real).value());
    }
    for p in set.endpoint_points() {
        jumps.push(p.value());
    }
    let mes = set.measure_real().dd();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(rng_seed);
    let mut max_residual = 0.0f64;
    let mut perturbed_points = 0usize;
    for _ in 0..grid_size {
        let mut t = rng.gen::<f64>();
        let mut nudged = false;
        while jumps.iter().any(|&j| circle_dist(t, j) < 1e-9) {
            t = (t + 3.3e-9).rem_euclid(1.0);
            nudged = true;
        }
        if nudged {
            perturbed_points += 1;
        }
        let point = TorusPoint::from_f64(t);
        let indicator = if set.contains(&point) { 1.0 } else { 0.0 };
        let lhs = Dd::from_f64(indicator) - mes;
        let rhs = g.evaluate_dd(&point) - g.evaluate_dd(&point.add_real(&alpha_real));
        let residual = (lhs - rhs).abs().to_f64();
        max_residual = max_residual.max(residual);
    }
    CocycleCheck {
        max_residual,
        perturbed_points,
    }
}

fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Frequency perturbations δ_j = g({λ_j α}) and c = −g(0), with the
/// reconstruction λ_j = (j + δ_j + c)/mes S asserted to 1e−9 for every j.
#[derive(Clone, Debug)]
pub struct AvdoninDeltas {
    /// paper-style index of `lambdas[0]` (λ_0 is the first element ≥ 0)
    pub j_first: i64,
    pub lambdas: Vec<i64>,
    pub deltas: Vec<f64>,
    pub c: f64,
}

pub fn avdonin_deltas(
    g: &SawtoothSum,
    slice: &FrequencySlice,
) -> Result<AvdoninDeltas, CoboundaryError> {
    let pos0 = slice.elements.partition_point(|&e| e < 0) as i64;
    let mes = slice.set.measure_real().dd();
    let c_dd = -g.evaluate_dd(&TorusPoint::zero());
    let mut deltas = Vec::with_capacity(slice.elements.len());
    for (i, &lambda) in slice.elements.iter().enumerate() {
        let j = i as i64 - pos0;
        let orbit = frac_multiple(&slice.alpha, lambda)?;
        let delta = g.evaluate_dd(&orbit);
        // λ_j = (j + δ_j + c) / mes S
        let rec = (Dd::from_f64(j as f64) + delta + c_dd) / mes;
        let residual = (rec.to_f64() - lambda as f64).abs();
        if residual > 1e-9 {
            return Err(CoboundaryError::ReconstructionFailure { j, residual });
        }
        deltas.push(delta.to_f64());
    }
    Ok(AvdoninDeltas {
        j_first: -pos0,
        lambdas: slice.elements.clone(),
        deltas,
        c: c_dd.to_f64(),
    })
}

impl AvdoninDeltas {
    /// CSV export: columns j, lambda_j, delta_j.
    pub fn export_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "j,lambda_j,delta_j")?;
        for (i, (&l, &d)) in self.lambdas.iter().zip(&self.deltas).enumerate() {
            writeln!(w, "{},{},{}", self.j_first + i as i64, l, d)?;
        }
        Ok(())
    }
}

/// Smallest block length N ≤ n_max with sup_n |(δ_{n+1}+…+δ_{n+N})/N|
/// strictly below `threshold`, over all blocks inside the window.
pub fn find_avdonin_n(deltas: &[f64], threshold: f64, n_max: usize) -> Option<usize> {
    if deltas.is_empty() {
        return None;
    }
    let mut prefix = Vec::with_capacity(deltas.len() + 1);
    let mut acc = crate::dd::CompensatedSum::new();
    prefix.push(0.0);
    for &d in deltas {
        acc.add(d);
        prefix.push(acc.value());
    }
    for n in 1..=n_max.min(deltas.len()) {
        let mut sup = 0.0f64;
        for start in 0..=(deltas.len() - n) {
            let avg = (prefix[start + n] - prefix[start]) / n as f64;
            sup = sup.max(avg.abs());
        }
        if sup < threshold {
            return Some(n);
        }
    }
    None
}

/// Net jumps of h(t) = g(t) − g(t+α): −coeff at each shift, +coeff at
/// shift − α, merged over coinciding positions.
pub fn cocycle_jump_profile(g: &SawtoothSum, alpha: &IrrationalAlpha) -> Vec<(TorusPoint, i64)> {
    let alpha_real = alpha.as_real();
    let mut raw: Vec<(TorusPoint, i64)> = Vec::new();
    for (c, shift) in g.terms() {
        raw.push((*shift, -c));
        raw.push((shift.sub_real(&alpha_real), *c));
    }
    raw.sort_by(|x, y| x.0.real().cmp_real(y.0.real()));
    let mut merged: Vec<(TorusPoint, i64)> = Vec::new();
    for (p, c) in raw {
        match merged.last_mut() {
            Some((q, acc)) if q.real().cmp_real(p.real()) == Ordering::Equal => *acc += c,
            _ => merged.push((p, c)),
        }
    }
    merged.retain(|(_, c)| *c != 0);
    merged
}
