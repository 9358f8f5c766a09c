//! Finite-section Gram analysis of exponential systems E(Λ) in L²(S):
//! closed-form Fourier coefficients of multiband indicators, extreme
//! eigenvalues of Gram sections, Riesz-bound trends over nested centered
//! windows, the duality experiment, and the counting-function BMO
//! diagnostic.
//!
//! Finite sections bound the true Riesz constants one-sidedly (Cauchy
//! interlacing); the trend tables report monotone columns and never claim
//! the biinfinite limit.

use crate::dd::{cos2pi, sin2pi, Dd};
use crate::diophantine::{ExactReal, IrrationalAlpha};
use crate::discrepancy::{bmo_statistic, BmoReport, WindowFamily};
use crate::eigen::{eigen_hermitian, EigenError};
use crate::quasicrystal::{lambda_slice, FrequencySlice, QuasicrystalError};
use crate::torus_sets::{MultibandSet, TorusInterval};
use num_complex::Complex64;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FramesError {
    #[error("gram dimension {0} exceeds the 2048 cap")]
    DimensionTooLarge(usize),
    #[error("mes S = {mes} does not match |I| = {interval} within 1e-12")]
    MeasureMismatch { mes: f64, interval: f64 },
    #[error("sampling density a must lie in (0,1], got {0}")]
    BadSamplingDensity(f64),
    #[error("could not collect {0} centered elements of the frequency set")]
    NotEnoughElements(usize),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Quasicrystal(#[from] QuasicrystalError),
}

pub const GRAM_DIM_CAP: usize = 2048;

/// ∫_S e^{−2πimt} dt in closed form over the intervals of S.
pub fn indicator_fourier(set: &MultibandSet, m: i64) -> Complex64 {
    if m == 0 {
        return Complex64::new(set.measure(), 0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (c, iv) in set.terms() {
        // e^{−2πima}·e^{−πimℓ}·sin(πmℓ)/(πm)
        let a_phase = iv.left().real().dd().mul_int_fract(m);
        let half = iv.length().dd().mul_f64(m as f64).div_f64(2.0).fract();
        let amp = sin2pi(half) / (std::f64::consts::PI * m as f64);
        let phase = Complex64::new(cos2pi(a_phase), -sin2pi(a_phase))
            * Complex64::new(cos2pi(half), -sin2pi(half));
        acc += phase * amp * c as f64;
    }
    acc
}

/// Finite Hermitian section `G[i][j]` = ⟨e_{λ_i}, e_{λ_j}⟩ in L²(S), i.e. the
/// Fourier coefficient of 1_S at λ_j − λ_i.
#[derive(Clone, Debug)]
pub struct GramSection {
    pub lambdas: Vec<i64>,
    pub set: MultibandSet,
    entries: Vec<Complex64>,
    pub dim: usize,
}

pub fn gram_section(
    slice: &FrequencySlice,
    set: &MultibandSet,
) -> Result<GramSection, FramesError> {
    gram_section_of(&slice.elements, set)
}

/// Gram section for an explicit sorted frequency list.
pub fn gram_section_of(lambdas: &[i64], set: &MultibandSet) -> Result<GramSection, FramesError> {
    let dim = lambdas.len();
    if dim > GRAM_DIM_CAP {
        return Err(FramesError::DimensionTooLarge(dim));
    }
    let mes = set.measure();
    let mut cache: HashMap<i64, Complex64> = HashMap::new();
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        entries[i * dim + i] = Complex64::new(mes, 0.0);
        for j in i + 1..dim {
            let diff = lambdas[j] - lambdas[i];
            let value = *cache
                .entry(diff)
                .or_insert_with(|| indicator_fourier(set, diff));
            entries[i * dim + j] = value;
            entries[j * dim + i] = value.conj();
        }
    }
    Ok(GramSection {
        lambdas: lambdas.to_vec(),
        set: set.clone(),
        entries,
        dim,
    })
}

impl GramSection {
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Binary dump: u64 dim, then row-major (re, im) pairs, little-endian f64.
    pub fn export_binary<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&(self.dim as u64).to_le_bytes())?;
        for z in &self.entries {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }
}

/// Extreme eigenvalues with a residual certificate.
#[derive(Clone, Copy, Debug)]
pub struct EigenSummary {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// max ‖Gv − λv‖ over the two returned eigenpairs
    pub residual: f64,
}

pub fn eigen_extremes(gram: &GramSection) -> Result<EigenSummary, FramesError> {
    if gram.dim == 0 {
        return Err(FramesError::NotEnoughElements(1));
    }
    let decomp = eigen_hermitian(&gram.entries, gram.dim)?;
    let last = gram.dim - 1;
    let residual = decomp
        .residual(&gram.entries, 0)
        .max(decomp.residual(&gram.entries, last));
    let bound = 1e-10 * gram.dim as f64;
    if residual > bound {
        return Err(FramesError::Eigen(EigenError::ConvergenceFailure {
            rotations: crate::eigen::ROTATION_BUDGET_FACTOR * gram.dim * gram.dim,
            off_norm: residual,
        }));
    }
    Ok(EigenSummary {
        lambda_min: decomp.eigenvalues[0],
        lambda_max: decomp.eigenvalues[last],
        residual,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct TrendRow {
    pub n: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct TrendTable {
    pub rows: Vec<TrendRow>,
}

impl TrendTable {
    /// CSV: N, lambda_min, lambda_max, residual.
    pub fn export_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,lambda_min,lambda_max,residual")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{}",
                r.n, r.lambda_min, r.lambda_max, r.residual
            )?;
        }
        Ok(())
    }

    /// Cauchy interlacing for nested sections: λ_min nonincreasing and
    /// λ_max nondecreasing with N.
    pub fn interlacing_holds(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].lambda_min <= w[0].lambda_min && w[1].lambda_max >= w[0].lambda_max)
    }
}

/// `count` elements of Λ_α(window_set) centered at zero, following the
/// enumeration λ_{−1} < 0 ≤ λ_0. Sizes drawn from one enumeration nest.
pub fn centered_elements(
    alpha: &IrrationalAlpha,
    window_set: &MultibandSet,
    count: usize,
) -> Result<Vec<i64>, FramesError> {
    let mut k = (count as i64).max(16);
    loop {
        let slice = lambda_slice(alpha, window_set, -k, k)?;
        let pos0 = slice.elements.partition_point(|&e| e < 0);
        let left_need = count / 2;
        let right_need = count - left_need;
        if pos0 >= left_need && slice.elements.len() - pos0 >= right_need {
            let lo = pos0 - left_need;
            return Ok(slice.elements[lo..lo + count].to_vec());
        }
        k *= 2;
        if k > 100_000_000 {
            return Err(FramesError::NotEnoughElements(count));
        }
    }
}

fn check_measure_match(interval: &TorusInterval, set: &MultibandSet) -> Result<(), FramesError> {
    let mes = set.measure_real();
    let len = interval.length();
    let diff = mes.sub(len).dd().abs().to_f64();
    if diff > 1e-12 {
        return Err(FramesError::MeasureMismatch {
            mes: mes.to_f64(),
            interval: len.to_f64(),
        });
    }
    Ok(())
}

fn trend_for(
    lambda_base: &[i64],
    set: &MultibandSet,
    sizes: &[usize],
    negate: bool,
) -> Result<TrendTable, FramesError> {
    let pos0 = lambda_base.partition_point(|&e| e < 0);
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let left_need = n / 2;
        if pos0 < left_need || lambda_base.len() - pos0 < n - left_need {
            return Err(FramesError::NotEnoughElements(n));
        }
        let lo = pos0 - left_need;
        let window = &lambda_base[lo..lo + n];
        let gram = if negate {
            let negated: Vec<i64> = window.iter().rev().map(|&x| -x).collect();
            gram_section_of(&negated, set)?
        } else {
            gram_section_of(window, set)?
        };
        let summary = eigen_extremes(&gram)?;
        rows.push(TrendRow {
            n,
            lambda_min: summary.lambda_min,
            lambda_max: summary.lambda_max,
            residual: summary.residual,
        });
    }
    Ok(TrendTable { rows })
}

/// Extreme Gram eigenvalues of E(Λ_α(I)) on S over nested centered
/// sections of each size. Requires mes S = |I| (Landau necessity).
pub fn riesz_trend(
    alpha: &IrrationalAlpha,
    interval: &TorusInterval,
    set: &MultibandSet,
    sizes: &[usize],
) -> Result<TrendTable, FramesError> {
    check_measure_match(interval, set)?;
    let max_size = sizes.iter().copied().max().unwrap_or(0);
    let window = MultibandSet::single(interval.clone());
    let base = centered_elements(alpha, &window, max_size)?;
    trend_for(&base, set, sizes, false)
}

/// Primal: E(Λ_α(I)) analyzed on S. Dual: E(−Λ_α(S)) analyzed on I,
/// with each dual section the exact negation of a centered window of
/// Λ_α(S), so that for S = I the two tables coincide.
pub fn duality_trend(
    alpha: &IrrationalAlpha,
    interval: &TorusInterval,
    set: &MultibandSet,
    sizes: &[usize],
) -> Result<(TrendTable, TrendTable), FramesError> {
    let primal = riesz_trend(alpha, interval, set, sizes)?;

    let max_size = sizes.iter().copied().max().unwrap_or(0);
    let base = centered_elements(alpha, set, max_size)?;
    let interval_set = MultibandSet::single(interval.clone());
    let dual = trend_for(&base, &interval_set, sizes, true)?;
    Ok((primal, dual))
}

/// BMO statistics of the integer-sampled counting deviation
/// f(n) = n_Λ(n) − a·n over the slice window.
pub fn pavlov_bmo_diagnostic(
    slice: &FrequencySlice,
    a: f64,
    family: WindowFamily,
) -> Result<BmoReport, FramesError> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(FramesError::BadSamplingDensity(a));
    }
    pavlov_bmo_diagnostic_real(slice, &ExactReal::from_f64(a), family)
}

/// Same diagnostic with a high-precision sampling density (used for the
/// cross-module identity with the discrepancy series).
pub fn pavlov_bmo_diagnostic_real(
    slice: &FrequencySlice,
    a: &ExactReal,
    family: WindowFamily,
) -> Result<BmoReport, FramesError> {
    let av = a.to_f64();
    if !(av > 0.0 && av <= 1.0) {
        return Err(FramesError::BadSamplingDensity(av));
    }
    let a_dd = a.dd();
    let mut values = Vec::with_capacity((slice.hi - slice.lo) as usize);
    for n in slice.lo + 1..=slice.hi {
        let count = slice
            .counting_function(n as f64)
            .map_err(FramesError::Quasicrystal)?;
        let v = (Dd::from_f64(count as f64) - a_dd.mul_f64(n as f64)).to_f64();
        values.push(v);
    }
    Ok(bmo_statistic(&values, family))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus_sets::{parse_interval, parse_set, Closure};

    fn golden() -> IrrationalAlpha {
        IrrationalAlpha::golden()
    }

    #[test]
    fn fourier_examples() {
        let g = golden();
        let half = parse_set("I:0,0.5", &g).unwrap();
        let f1 = indicator_fourier(&half, 1);
        // (1 − e^{−πi})/(2πi) = −i/π
        assert!((f1.re).abs() < 1e-16);
        assert!((f1.im + 1.0 / std::f64::consts::PI).abs() < 1e-15);

        let f0 = indicator_fourier(&half, 0);
        assert_eq!(f0, Complex64::new(0.5, 0.0));

        let f2 = indicator_fourier(&half, 2);
        assert_eq!(f2, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn fourier_of_combination_matches_disjoint() {
        let g = golden();
        let s = parse_set("C:(1)0,3a+(-1)0.1,1a", &g).unwrap();
        let d = s.to_disjoint().unwrap();
        for m in [-7i64, -1, 1, 2, 13] {
            let a = indicator_fourier(&s, m);
            let b = indicator_fourier(&d, m);
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn gram_of_circle_is_identity() {
        let g = golden();
        let circle = MultibandSet::circle(&g, Closure::LeftSemiClosed);
        let lambdas: Vec<i64> = vec![-3, -1, 0, 2, 5, 11];
        let gram = gram_section_of(&lambdas, &circle).unwrap();
        for i in 0..gram.dim {
            for j in 0..gram.dim {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(gram.entry(i, j), Complex64::new(expect, 0.0));
            }
        }
        let s = eigen_extremes(&gram).unwrap();
        assert_eq!((s.lambda_min, s.lambda_max), (1.0, 1.0));
    }

    #[test]
    fn gram_two_by_two_closed_form() {
        let g = golden();
        let half = parse_set("I:0,0.5", &g).unwrap();
        let gram = gram_section_of(&[0, 1], &half).unwrap();
        let pi = std::f64::consts::PI;
        assert!((gram.entry(0, 1) - Complex64::new(0.0, -1.0 / pi)).norm() < 1e-15);
        assert!((gram.entry(1, 0) - Complex64::new(0.0, 1.0 / pi)).norm() < 1e-15);
        let s = eigen_extremes(&gram).unwrap();
        assert!((s.lambda_min - (0.5 - 1.0 / pi)).abs() < 1e-13);
        assert!((s.lambda_max - (0.5 + 1.0 / pi)).abs() < 1e-13);
    }

    #[test]
    fn gram_one_by_one() {
        let g = golden();
        let s = parse_set("I:0,a", &g).unwrap();
        let gram = gram_section_of(&[7], &s).unwrap();
        assert_eq!(gram.entry(0, 0), Complex64::new(s.measure(), 0.0));
    }

    #[test]
    fn centered_elements_nest() {
        let g = golden();
        let s = parse_set("I:0,a", &g).unwrap();
        let big = centered_elements(&g, &s, 64).unwrap();
        let small = centered_elements(&g, &s, 16).unwrap();
        assert_eq!(big.len(), 64);
        assert!(small.iter().all(|x| big.contains(x)));
        // roughly symmetric about zero
        assert!(big[0] < 0 && big[63] > 0);
    }

    #[test]
    fn riesz_trend_good_interval() {
        let g = golden();
        let iv = parse_interval("I:0,a", &g).unwrap();
        let s = parse_set("I:0,a", &g).unwrap();
        let table = riesz_trend(&g, &iv, &s, &[16, 32, 64]).unwrap();
        assert!(table.interlacing_holds());
        assert!(table.rows.iter().all(|r| r.lambda_min > 1e-3));
        assert!(table.rows.iter().all(|r| r.lambda_max <= 1.1));
    }

    #[test]
    fn riesz_trend_measure_mismatch() {
        let g = golden();
        let iv = parse_interval("I:0,a", &g).unwrap();
        let s = parse_set("I:0,0.5", &g).unwrap();
        assert!(matches!(
            riesz_trend(&g, &iv, &s, &[8]),
            Err(FramesError::MeasureMismatch { .. })
        ));
    }

    #[test]
    fn duality_coincides_for_s_equals_i() {
        let g = golden();
        let iv = parse_interval("I:0,a", &g).unwrap();
        let s = parse_set("I:0,a", &g).unwrap();
        let (primal, dual) = duality_trend(&g, &iv, &s, &[16, 32]).unwrap();
        for (p, d) in primal.rows.iter().zip(&dual.rows) {
            assert!((p.lambda_min - d.lambda_min).abs() < 1e-12);
            assert!((p.lambda_max - d.lambda_max).abs() < 1e-12);
        }
    }

    #[test]
    fn riesz_trend_on_full_circle_is_flat() {
        let g = golden();
        let iv = parse_interval("I:0,0a", &g).unwrap(); // length {0a} = 1
        let circle = MultibandSet::circle(&g, Closure::LeftSemiClosed);
        let table = riesz_trend(&g, &iv, &circle, &[4, 8, 16]).unwrap();
        for r in &table.rows {
            assert_eq!(r.lambda_min, 1.0);
            assert_eq!(r.lambda_max, 1.0);
        }
    }

    #[test]
    fn pavlov_stays_bounded_for_certified_interval() {
        // a = mes S with |S| = α: the counting deviation is bounded, so
        // the BMO statistic cannot double across window sizes
        let g = golden();
        let s = parse_set("I:0,a", &g).unwrap();
        let mes = s.measure();
        let small = lambda_slice(&g, &s, 0, 1 << 10).unwrap();
        let large = lambda_slice(&g, &s, 0, 1 << 14).unwrap();
        let l_small = pavlov_bmo_diagnostic(&small, mes, WindowFamily::AllDyadic)
            .unwrap()
            .l2_norm;
        let l_large = pavlov_bmo_diagnostic(&large, mes, WindowFamily::AllDyadic)
            .unwrap()
            .l2_norm;
        assert!(l_large <= 2.0 * l_small, "{l_large} vs {l_small}");
    }

    #[test]
    fn pavlov_on_integers_is_zero() {
        let g = golden();
        let circle = MultibandSet::circle(&g, Closure::LeftSemiClosed);
        let slice = lambda_slice(&g, &circle, 0, 512).unwrap();
        let report = pavlov_bmo_diagnostic(&slice, 1.0, WindowFamily::AllDyadic).unwrap();
        assert_eq!(report.l2_norm, 0.0);
    }

    #[test]
    fn pavlov_rejects_bad_density() {
        let g = golden();
        let s = parse_set("I:0,a", &g).unwrap();
        let slice = lambda_slice(&g, &s, 0, 64).unwrap();
        assert!(matches!(
            pavlov_bmo_diagnostic(&slice, 0.0, WindowFamily::AllDyadic),
            Err(FramesError::BadSamplingDensity(_))
        ));
        assert!(matches!(
            pavlov_bmo_diagnostic(&slice, 1.5, WindowFamily::AllDyadic),
            Err(FramesError::BadSamplingDensity(_))
        ));
    }

    #[test]
    fn binary_dump_layout() {
        let g = golden();
        let half = parse_set("I:0,0.5", &g).unwrap();
        let gram = gram_section_of(&[0, 1], &half).unwrap();
        let mut buf = Vec::new();
        gram.export_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 4 * 16);
        assert_eq!(u64::from_le_bytes(buf[0..8].try_into().unwrap()), 2);
        let first = f64::from_le_bytes(buf[8..16].try_into().unwrap());
        assert_eq!(first, 0.5);
    }
}
