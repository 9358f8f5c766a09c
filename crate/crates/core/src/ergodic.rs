//! Ergodic sums of trigonometric polynomials under the irrational
//! rotation: atomic spectral measures, the variance V_N in direct and
//! kernel form, its N → ∞ limit, and coboundary solving.

use crate::coboundary::{build_coboundary, verify_cocycle};
use crate::dd::{cos2pi, sin2pi, CompensatedSum, Dd};
use crate::diophantine::{
    frac_multiple, DiophantineError, IrrationalAlpha, LatticeElement, TorusPoint,
};
use crate::discrepancy::{
    bmo_statistic, discrepancy_series, measure_certificate, BmoReport, WindowFamily,
};
use crate::torus_sets::MultibandSet;
pub use num_complex::Complex64;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ErgodicError {
    #[error("degree {0} exceeds the 10^4 cap")]
    DegreeTooLarge(i64),
    #[error("constant term c_0 = {0} is nonzero: not a coboundary under rotation")]
    NotMeanZero(Complex64),
    #[error("variance identity violated at N={n}: direct {direct} vs kernel {kernel}")]
    KernelIdentityViolation { n: usize, direct: f64, kernel: f64 },
    #[error(transparent)]
    Diophantine(#[from] DiophantineError),
}

pub const DEGREE_CAP: i64 = 10_000;

/// f(x) = Σ_k c_k e^{2πikx} with finite support.
#[derive(Clone, Debug, Default)]
pub struct TrigPolynomial {
    coeffs: BTreeMap<i64, Complex64>,
}

impl TrigPolynomial {
    pub fn new(pairs: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self, ErgodicError> {
        let mut coeffs = BTreeMap::new();
        for (k, c) in pairs {
            if k.abs() > DEGREE_CAP {
                return Err(ErgodicError::DegreeTooLarge(k));
            }
            if c != Complex64::new(0.0, 0.0) {
                *coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
            }
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(TrigPolynomial { coeffs })
    }

    pub fn zero() -> Self {
        TrigPolynomial::default()
    }

    pub fn constant(c: Complex64) -> Self {
        TrigPolynomial::new([(0, c)]).unwrap()
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs
            .get(&k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.keys().map(|k| k.abs()).max().unwrap_or(0)
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&k, &c) in &self.coeffs {
            let phase = (k as f64 * x).rem_euclid(1.0);
            acc += c * Complex64::new(
                (std::f64::consts::TAU * phase).cos(),
                (std::f64::consts::TAU * phase).sin(),
            );
        }
        acc
    }

    /// Random polynomial with coefficients uniform in the unit square,
    /// support in [−degree, degree]; mean-zero drops the constant term.
    pub fn random<R: rand::Rng>(rng: &mut R, degree: i64, mean_zero: bool) -> Self {
        let mut pairs = Vec::new();
        for k in -degree..=degree {
            if mean_zero && k == 0 {
                continue;
            }
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            pairs.push((k, c));
        }
        TrigPolynomial::new(pairs).unwrap()
    }
}

/// Atomic spectral measure of f under the rotation by α: an atom of mass
/// |c_k|² at position {kα} for each k in the support.
#[derive(Clone, Debug)]
pub struct SpectralMeasure {
    pub atoms: Vec<(TorusPoint, f64)>,
}

pub fn spectral_measure(
    f: &TrigPolynomial,
    alpha: &IrrationalAlpha,
) -> Result<SpectralMeasure, ErgodicError> {
    let mut atoms = Vec::new();
    for (k, c) in f.coeffs() {
        let mass = c.norm_sqr();
        if mass > 0.0 {
            atoms.push((frac_multiple(alpha, k)?, mass));
        }
    }
    Ok(SpectralMeasure { atoms })
}

impl SpectralMeasure {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, m)| m).sum()
    }

    /// ⟨U^n f, f⟩ reconstructed from the atoms.
    pub fn autocorrelation(&self, n: i64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (pos, mass) in &self.atoms {
            let phase = pos.real().dd().mul_int_fract(n);
            acc += *mass * Complex64::new(cos2pi(phase), sin2pi(phase));
        }
        acc
    }
}

/// ⟨U^n f, f⟩ from the coefficients directly.
pub fn autocorrelation_direct(
    f: &TrigPolynomial,
    alpha: &IrrationalAlpha,
    n: i64,
) -> Result<Complex64, ErgodicError> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, c) in f.coeffs() {
        let phase = frac_multiple(alpha, k)?.real().dd().mul_int_fract(n);
        acc += c.norm_sqr() * Complex64::new(cos2pi(phase), sin2pi(phase));
    }
    Ok(acc)
}

/// V_N from closed-form L² norms of the ergodic sums. The k = 0 term is
/// handled exactly: its ergodic sum is n·c_0, contributing
/// |c_0|²(N²−1)/12.
pub fn variance_direct(
    f: &TrigPolynomial,
    alpha: &IrrationalAlpha,
    n: usize,
) -> Result<f64, ErgodicError> {
    let mut total = CompensatedSum::new();
    for (k, c) in f.coeffs() {
        let mass = c.norm_sqr();
        if mass == 0.0 {
            continue;
        }
        if k == 0 {
            let nf = n as f64;
            total.add(mass * (nf * nf - 1.0) / 12.0);
            continue;
        }
        // w_n = (1 − z^n)/(1 − z): only z^n varies over the window, so
        // (1/N)Σ|w_n − mean w|² = (1/N)Σ|z^n − mean z^n|² / |1 − z|²
        let step = frac_multiple(alpha, k)?.real().dd();
        let mut zs = Vec::with_capacity(n);
        let mut theta = Dd::ZERO;
        for _ in 0..n {
            theta = (theta + step).fract();
            zs.push(Complex64::new(cos2pi(theta), sin2pi(theta)));
        }
        let (mut sum_re, mut sum_im) = (CompensatedSum::new(), CompensatedSum::new());
        for z in &zs {
            sum_re.add(z.re);
            sum_im.add(z.im);
        }
        let mean = Complex64::new(sum_re.value() / n as f64, sum_im.value() / n as f64);
        let mut dev = CompensatedSum::new();
        for z in &zs {
            dev.add((z - mean).norm_sqr());
        }
        let one_minus_z = Complex64::new(1.0 - cos2pi(step), -sin2pi(step));
        total.add(mass * dev.value() / (n as f64 * one_minus_z.norm_sqr()));
    }
    Ok(total.value())
}

/// The variance kernel Q_N(t) = (1 − sin²(πNt)/(N² sin²πt)) / (4 sin²πt),
/// with the removable singularity at t = 0 evaluated by its limit
/// (N²−1)/12 and a series switch near the singularity.
pub fn variance_kernel_q(t: &TorusPoint, n: usize) -> f64 {
    let nf = n as f64;
    let t_dd = t.real().dd();
    let s = sin2pi(t_dd.div_f64(2.0)); // sin(πt) ≥ 0 on [0,1)
    let dist = t.circle_dist_f64(&TorusPoint::zero());
    let x = std::f64::consts::PI * dist;
    // The direct form cancels catastrophically once πNt is small (its
    // bracket is 1 − (1 − O((Nx)²))), so the expansion takes over while
    // its own truncation error (Nx)⁴ is still below the cancellation
    // noise eps/(Nx)².
    if s.abs() < 1e-8 || nf * x < 3e-3 {
        return (nf * nf - 1.0) / 12.0 - x * x * (nf * nf - 1.0) * (nf * nf - 4.0) / 90.0;
    }
    let nt = t_dd.mul_f64(nf).div_f64(2.0).fract();
    let sn = sin2pi(nt); // sin(πNt)
    (1.0 - (sn * sn) / (nf * nf * s * s)) / (4.0 * s * s)
}

/// V_N = Σ_atoms mass·Q_N(position).
pub fn variance_kernel(
    f: &TrigPolynomial,
    alpha: &IrrationalAlpha,
    n: usize,
) -> Result<f64, ErgodicError> {
    let mu = spectral_measure(f, alpha)?;
    let mut total = CompensatedSum::new();
    for (pos, mass) in &mu.atoms {
        total.add(mass * variance_kernel_q(pos, n));
    }
    Ok(total.value())
}

/// lim V_N = (1/4)∫ dμ_f / sin²πt; an atom at 0 with positive mass makes
/// the limit infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VarianceLimit {
    Finite(f64),
    Infinite,
}

impl VarianceLimit {
    pub fn is_finite(&self) -> bool {
        matches!(self, VarianceLimit::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            VarianceLimit::Finite(v) => Some(*v),
            VarianceLimit::Infinite => None,
        }
    }
}

pub fn variance_limit(
    f: &TrigPolynomial,
    alpha: &IrrationalAlpha,
) -> Result<VarianceLimit, ErgodicError> {
    let mu = spectral_measure(f, alpha)?;
    let mut total = CompensatedSum::new();
    for (pos, mass) in &mu.atoms {
        if pos.value() == 0.0 {
            return Ok(VarianceLimit::Infinite);
        }
        let s = sin2pi(pos.real().dd().div_f64(2.0));
        total.add(mass / (4.0 * s * s));
    }
    Ok(VarianceLimit::Finite(total.value()))
}

/// (V_N direct, V_N kernel, limit) with the kernel identity enforced.
#[derive(Clone, Debug)]
pub struct VarianceCurve {
    pub n_list: Vec<usize>,
    pub v_direct: Vec<f64>,
    pub v_kernel: Vec<f64>,
    pub v_limit: VarianceLimit,
}

pub const KERNEL_IDENTITY_TOL: f64 = 1e-10;

pub fn variance_curve(
    f: &TrigPolynomial,
    alpha: &IrrationalAlpha,
    n_list: &[usize],
) -> Result<VarianceCurve, ErgodicError> {
    let mut v_direct = Vec::with_capacity(n_list.len());
    let mut v_kernel = Vec::with_capacity(n_list.len());
    let v_limit = variance_limit(f, alpha)?;
    for &n in n_list {
        let d = variance_direct(f, alpha, n)?;
        let k = variance_kernel(f, alpha, n)?;
        if (d - k).abs() > KERNEL_IDENTITY_TOL {
            return Err(ErgodicError::KernelIdentityViolation {
                n,
                direct: d,
                kernel: k,
            });
        }
        if let VarianceLimit::Finite(lim) = v_limit {
            debug_assert!(k <= lim + 1e-9, "kernel bounded by the limit");
        }
        v_direct.push(d);
        v_kernel.push(k);
    }
    Ok(VarianceCurve {
        n_list: n_list.to_vec(),
        v_direct,
        v_kernel,
        v_limit,
    })
}

impl VarianceCurve {
    /// CSV: N, v_direct, v_kernel, v_limit.
    pub fn export_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,v_direct,v_kernel,v_limit")?;
        let lim = match self.v_limit {
            VarianceLimit::Finite(v) => format!("{}", v),
            VarianceLimit::Infinite => "inf".to_string(),
        };
        for i in 0..self.n_list.len() {
            writeln!(
                w,
                "{},{},{},{}",
                self.n_list[i], self.v_direct[i], self.v_kernel[i], lim
            )?;
        }
        Ok(())
    }
}

/// Independent quadrature oracle for V_N: ergodic sums evaluated
/// pointwise on a uniform grid of `m_points` (exact for trigonometric
/// polynomials since the integrand has degree far below the grid size).
pub fn variance_grid_oracle(
    f: &TrigPolynomial,
    alpha: &IrrationalAlpha,
    n: usize,
    m_points: usize,
) -> f64 {
    let alpha_f = alpha.value();
    let coeffs: Vec<(i64, Complex64)> = f.coeffs().collect();
    let steps: Vec<Complex64> = coeffs
        .iter()
        .map(|&(k, _)| {
            let phase = (k as f64 * alpha_f).rem_euclid(1.0) * std::f64::consts::TAU;
            Complex64::new(phase.cos(), phase.sin())
        })
        .collect();
    let mut total = CompensatedSum::new();
    let mut s_vals = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..m_points {
        let x = i as f64 / m_points as f64;
        let mut carriers: Vec<Complex64> = coeffs
            .iter()
            .map(|&(k, _)| {
                let phase = (k as f64 * x).rem_euclid(1.0) * std::f64::consts::TAU;
                Complex64::new(phase.cos(), phase.sin())
            })
            .collect();
        let mut running = Complex64::new(0.0, 0.0);
        for s in s_vals.iter_mut() {
            let mut f_val = Complex64::new(0.0, 0.0);
            for (j, &(_, c)) in coeffs.iter().enumerate() {
                f_val += c * carriers[j];
            }
            running += f_val;
            *s = running;
            for (j, step) in steps.iter().enumerate() {
                carriers[j] *= step;
            }
        }
        let mean = s_vals.iter().sum::<Complex64>() / n as f64;
        let var: f64 = s_vals.iter().map(|s| (s - mean).norm_sqr()).sum::<f64>() / n as f64;
        total.add(var);
    }
    total.value() / m_points as f64
}

/// Solve f = g − Ug for mean-zero f: ĝ(k) = c_k / (1 − e^{2πikα}).
pub fn solve_coboundary_trigpoly(
    f: &TrigPolynomial,
    alpha: &IrrationalAlpha,
) -> Result<TrigPolynomial, ErgodicError> {
    let c0 = f.coeff(0);
    if c0 != Complex64::new(0.0, 0.0) {
        return Err(ErgodicError::NotMeanZero(c0));
    }
    let mut pairs = Vec::new();
    for (k, c) in f.coeffs() {
        let phase = frac_multiple(alpha, k)?.real().dd();
        let denom = Complex64::new(1.0 - cos2pi(phase), -sin2pi(phase));
        pairs.push((k, c / denom));
    }
    TrigPolynomial::new(pairs)
}

/// sup_k |f̂(k) − ĝ(k)(1 − e^{2πikα})|: the coefficient-level residual of
/// the cocycle equation.
pub fn coboundary_residual(
    f: &TrigPolynomial,
    g: &TrigPolynomial,
    alpha: &IrrationalAlpha,
) -> Result<f64, ErgodicError> {
    let mut support: Vec<i64> = f.support().chain(g.support()).collect();
    support.sort_unstable();
    support.dedup();
    let mut worst = 0.0f64;
    for k in support {
        let phase = frac_multiple(alpha, k)?.real().dd();
        let denom = Complex64::new(1.0 - cos2pi(phase), -sin2pi(phase));
        let resid = (f.coeff(k) - g.coeff(k) * denom).norm();
        worst = worst.max(resid);
    }
    Ok(worst)
}

/// Ergodic sums S_n(x0) = Σ_{k<n} (1_S − mes S)(x0 + kα) for n = 1..=N,
/// accumulated as reals (independent of the integer-count path).
pub fn indicator_ergodic_sums(
    set: &MultibandSet,
    alpha: &IrrationalAlpha,
    x0: &TorusPoint,
    n_max: usize,
) -> Vec<f64> {
    let mes = set.measure_real().dd();
    let step = alpha.as_real();
    let mut point = *x0;
    let mut acc = Dd::ZERO;
    let mut out = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        let term = Dd::from_f64(if set.contains(&point) { 1.0 } else { 0.0 }) - mes;
        acc = acc + term;
        out.push(acc.to_f64());
        point = point.add_real(&step);
    }
    out
}

/// Bundle: BMO of the ergodic sums of 1_S − mes S at base x0, the ℤα+ℤ
/// certificate for mes S, and, when the set supports it, the explicit
/// sawtooth g with its cocycle residual. Report only; no theorem is
/// asserted numerically.
#[derive(Clone, Debug)]
pub struct CoboundaryExperimentReport {
    pub bmo: BmoReport,
    pub sums_sup_abs: f64,
    pub certificate: Option<LatticeElement>,
    pub cocycle_residual: Option<f64>,
}

pub fn bmo_coboundary_experiment(
    set: &MultibandSet,
    alpha: &IrrationalAlpha,
    x0: &TorusPoint,
    n_max: usize,
    family: WindowFamily,
) -> CoboundaryExperimentReport {
    let series = discrepancy_series(alpha, set, n_max, x0);
    let bmo = bmo_statistic(&series.values, family);
    let sums_sup_abs = series.sup_abs(n_max);
    let certificate = measure_certificate(alpha, set);
    let all_certified = set.terms().iter().all(|(_, iv)| iv.certificate().is_some());
    let cocycle_residual = if certificate.is_some() && all_certified {
        build_coboundary(set, alpha, false)
            .map(|g| verify_cocycle(&g, set, alpha, 10_000, 2718).max_residual)
            .ok()
    } else {
        None
    };
    CoboundaryExperimentReport {
        bmo,
        sums_sup_abs,
        certificate,
        cocycle_residual,
    }
}
