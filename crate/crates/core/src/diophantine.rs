//! The rotation number α, its orbit on the circle, continued fractions,
//! and membership certificates for ℤα+ℤ.
//!
//! Two representations are supported: exact quadratic irrationals, where
//! orbit comparisons are decided by integer sign tests in ℤ[√d], and
//! double-double floats for arbitrary α.

use crate::dd::Dd;
use crate::quad::{is_perfect_square, QuadExact};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiophantineError {
    #[error("d is a perfect square")]
    PerfectSquare,
    #[error("d must be positive")]
    NonPositiveD,
    #[error("r must be nonzero")]
    ZeroDenominator,
    #[error("q must be nonzero (alpha would be rational)")]
    RationalAlpha,
    #[error("alpha must lie in (0,1)")]
    OutOfUnitInterval,
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("operands come from different quadratic fields")]
    MixedFields,
    #[error("multiplier k exceeds the supported range")]
    KOutOfRange,
    #[error("continued fraction depth must be at least 1")]
    DepthZero,
    #[error("float residual below 2^-45, further digits unreliable")]
    PrecisionExhausted,
    #[error("cannot parse alpha spec `{0}`")]
    Parse(String),
}

const K_BOUND_FLOAT: i64 = 1_000_000_000;

/// A real number carried as a double-double, with an exact quadratic form
/// attached whenever it is available.
#[derive(Clone, Copy, Debug)]
pub struct ExactReal {
    dd: Dd,
    exact: Option<QuadExact>,
}

impl ExactReal {
    pub fn from_f64(x: f64) -> ExactReal {
        ExactReal {
            dd: Dd::from_f64(x),
            exact: None,
        }
    }

    pub fn from_dd(dd: Dd) -> ExactReal {
        ExactReal { dd, exact: None }
    }

    pub fn from_quad(q: QuadExact) -> ExactReal {
        ExactReal {
            dd: q.to_dd(),
            exact: Some(q),
        }
    }

    pub fn zero() -> ExactReal {
        ExactReal {
            dd: Dd::ZERO,
            exact: Some(QuadExact::zero(1)),
        }
    }

    pub fn one() -> ExactReal {
        ExactReal {
            dd: Dd::ONE,
            exact: Some(QuadExact::from_integer(1, 1)),
        }
    }

    pub fn dd(&self) -> Dd {
        self.dd
    }

    pub fn exact(&self) -> Option<&QuadExact> {
        self.exact.as_ref()
    }

    pub fn to_f64(&self) -> f64 {
        self.dd.to_f64()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    fn combine(dd: Dd, exact: Option<QuadExact>) -> ExactReal {
        match exact {
            Some(q) => ExactReal::from_quad(q),
            None => ExactReal::from_dd(dd),
        }
    }

    pub fn add(&self, other: &ExactReal) -> ExactReal {
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a.add(b).ok(),
            _ => None,
        };
        ExactReal::combine(self.dd + other.dd, exact)
    }

    pub fn sub(&self, other: &ExactReal) -> ExactReal {
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a.sub(b).ok(),
            _ => None,
        };
        ExactReal::combine(self.dd - other.dd, exact)
    }

    pub fn neg(&self) -> ExactReal {
        ExactReal::combine(-self.dd, self.exact.map(|q| q.neg()))
    }

    pub fn add_int(&self, n: i64) -> ExactReal {
        let exact = self.exact.and_then(|q| q.add_int(n as i128).ok());
        ExactReal::combine(self.dd.add_f64(n as f64), exact)
    }

    pub fn mul_int(&self, k: i64) -> ExactReal {
        let exact = self.exact.and_then(|q| q.mul_int(k as i128).ok());
        ExactReal::combine(self.dd.mul_f64(k as f64), exact)
    }

    /// Fractional part in `[0,1)`.
    pub fn fract(&self) -> ExactReal {
        match self.exact.and_then(|q| q.fract().ok()) {
            Some(q) => ExactReal::from_quad(q),
            None => ExactReal::from_dd(self.dd.fract()),
        }
    }

    /// Comparison: exact when both operands live in the same field,
    /// double-double otherwise.
    pub fn cmp_real(&self, other: &ExactReal) -> Ordering {
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            if a.same_field(b) {
                if let Ok(ord) = a.cmp_exact(b) {
                    return ord;
                }
            }
        }
        self.dd.cmp_dd(other.dd)
    }

    pub fn cmp_f64(&self, x: f64) -> Ordering {
        self.cmp_real(&ExactReal::from_f64(x))
    }
}

/// The rotation number α ∈ (0,1).
#[derive(Clone, Debug)]
pub struct IrrationalAlpha {
    repr: AlphaRepr,
    label: String,
}

#[derive(Clone, Debug)]
pub enum AlphaRepr {
    /// `(p + q√d)/r` reduced mod 1 into (0,1); orbit arithmetic is exact.
    ExactQuadratic(QuadExact),
    /// Compensated double-double; hi+lo ∈ (0,1).
    HighPrecFloat(Dd),
}

impl IrrationalAlpha {
    /// `(p + q√d)/r`, validated and reduced mod 1.
    pub fn exact_quadratic(p: i64, q: i64, d: i64, r: i64) -> Result<Self, DiophantineError> {
        if d <= 0 {
            return Err(DiophantineError::NonPositiveD);
        }
        if is_perfect_square(d) {
            return Err(DiophantineError::PerfectSquare);
        }
        if r == 0 {
            return Err(DiophantineError::ZeroDenominator);
        }
        if q == 0 {
            return Err(DiophantineError::RationalAlpha);
        }
        let raw = QuadExact::new(p as i128, q as i128, r as i128, d)?;
        let reduced = raw.fract()?;
        let label = format!("quad:{},{},{},{}", p, q, d, r);
        Ok(IrrationalAlpha {
            repr: AlphaRepr::ExactQuadratic(reduced),
            label,
        })
    }

    /// High-precision float α; must lie in (0,1).
    pub fn high_prec(value: Dd) -> Result<Self, DiophantineError> {
        let v = Dd::new(value.hi, value.lo);
        if !(v.hi > 0.0 || (v.hi == 0.0 && v.lo > 0.0)) || v.hi >= 1.0 {
            return Err(DiophantineError::OutOfUnitInterval);
        }
        Ok(IrrationalAlpha {
            label: format!("float:{:e}", v.to_f64()),
            repr: AlphaRepr::HighPrecFloat(v),
        })
    }

    /// Parse `"quad:p,q,d,r"` or a decimal literal.
    pub fn parse(spec: &str) -> Result<Self, DiophantineError> {
        if let Some(rest) = spec.strip_prefix("quad:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 4 {
                return Err(DiophantineError::Parse(spec.to_string()));
            }
            let nums: Result<Vec<i64>, _> = parts.iter().map(|s| s.trim().parse::<i64>()).collect();
            let nums = nums.map_err(|_| DiophantineError::Parse(spec.to_string()))?;
            Self::exact_quadratic(nums[0], nums[1], nums[2], nums[3])
        } else {
            let dd = parse_decimal_dd(spec.trim())
                .ok_or_else(|| DiophantineError::Parse(spec.to_string()))?;
            Self::high_prec(dd)
        }
    }

    /// (√5 − 1)/2, the golden rotation.
    pub fn golden() -> Self {
        Self::exact_quadratic(-1, 1, 5, 2).unwrap()
    }

    /// √2 − 1.
    pub fn sqrt2_minus_1() -> Self {
        Self::exact_quadratic(-1, 1, 2, 1).unwrap()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn repr(&self) -> &AlphaRepr {
        &self.repr
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, AlphaRepr::ExactQuadratic(_))
    }

    pub fn quad(&self) -> Option<&QuadExact> {
        match &self.repr {
            AlphaRepr::ExactQuadratic(q) => Some(q),
            AlphaRepr::HighPrecFloat(_) => None,
        }
    }

    pub fn value_dd(&self) -> Dd {
        match &self.repr {
            AlphaRepr::ExactQuadratic(q) => q.to_dd(),
            AlphaRepr::HighPrecFloat(v) => *v,
        }
    }

    pub fn value(&self) -> f64 {
        self.value_dd().to_f64()
    }

    pub fn as_real(&self) -> ExactReal {
        match &self.repr {
            AlphaRepr::ExactQuadratic(q) => ExactReal::from_quad(*q),
            AlphaRepr::HighPrecFloat(v) => ExactReal::from_dd(*v),
        }
    }
}

/// Parse a plain decimal literal into a double-double.
pub fn parse_decimal_dd(s: &str) -> Option<Dd> {
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, s.strip_prefix('+').unwrap_or(s)),
    };
    if rest.is_empty() {
        return None;
    }
    let mut acc = Dd::ZERO;
    let mut frac_digits = 0u32;
    let mut seen_dot = false;
    let mut seen_digit = false;
    for ch in rest.chars() {
        match ch {
            '0'..='9' => {
                acc = acc.mul_f64(10.0).add_f64((ch as u8 - b'0') as f64);
                if seen_dot {
                    frac_digits += 1;
                }
                seen_digit = true;
            }
            '.' if !seen_dot => seen_dot = true,
            _ => return None,
        }
    }
    if !seen_digit {
        return None;
    }
    for _ in 0..frac_digits {
        acc = acc.div_f64(10.0);
    }
    Some(acc.mul_f64(sign))
}

/// A point on the circle 𝕋 = ℝ/ℤ, value in `[0,1)`.
#[derive(Clone, Copy, Debug)]
pub struct TorusPoint {
    real: ExactReal,
}

impl TorusPoint {
    pub fn zero() -> TorusPoint {
        TorusPoint {
            real: ExactReal::zero(),
        }
    }

    pub fn from_f64(x: f64) -> TorusPoint {
        TorusPoint {
            real: ExactReal::from_f64(x.rem_euclid(1.0)),
        }
    }

    pub fn from_real(r: ExactReal) -> TorusPoint {
        TorusPoint { real: r.fract() }
    }

    pub fn value(&self) -> f64 {
        self.real.to_f64()
    }

    pub fn real(&self) -> &ExactReal {
        &self.real
    }

    pub fn exact(&self) -> Option<&QuadExact> {
        self.real.exact()
    }

    /// `(self - other) mod 1` in `[0,1)`.
    pub fn sub_fract(&self, other: &TorusPoint) -> ExactReal {
        self.real.sub(&other.real).fract()
    }

    /// `(self + x) mod 1` as a torus point.
    pub fn add_real(&self, x: &ExactReal) -> TorusPoint {
        TorusPoint {
            real: self.real.add(x).fract(),
        }
    }

    pub fn sub_real(&self, x: &ExactReal) -> TorusPoint {
        TorusPoint {
            real: self.real.sub(x).fract(),
        }
    }

    /// Distance on the circle, as f64.
    pub fn circle_dist_f64(&self, other: &TorusPoint) -> f64 {
        let rel = self.sub_fract(other).to_f64();
        rel.min(1.0 - rel)
    }
}

/// An element mα + n of ℤα+ℤ together with its real value.
#[derive(Clone, Copy, Debug)]
pub struct LatticeElement {
    pub m: i64,
    pub n: i64,
    value: ExactReal,
}

impl LatticeElement {
    pub fn new(m: i64, n: i64, alpha: &IrrationalAlpha) -> LatticeElement {
        let value = alpha.as_real().mul_int(m).add_int(n);
        LatticeElement { m, n, value }
    }

    pub fn value(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn real(&self) -> &ExactReal {
        &self.value
    }
}

/// `{kα}`: the orbit point of the rotation after k steps.
pub fn frac_multiple(alpha: &IrrationalAlpha, k: i64) -> Result<TorusPoint, DiophantineError> {
    match &alpha.repr {
        AlphaRepr::ExactQuadratic(q) => {
            let f = q.mul_int(k as i128)?.fract()?;
            Ok(TorusPoint {
                real: ExactReal::from_quad(f),
            })
        }
        AlphaRepr::HighPrecFloat(v) => {
            if k.abs() > K_BOUND_FLOAT {
                return Err(DiophantineError::KOutOfRange);
            }
            Ok(TorusPoint {
                real: ExactReal::from_dd(v.mul_int_fract(k)),
            })
        }
    }
}

/// Partial quotients and convergents of α.
#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    /// a_1, a_2, ... (a_0 = 0 is implicit for α ∈ (0,1)).
    pub quotients: Vec<u64>,
    /// (p_k, q_k) aligned with `quotients`.
    pub convergents: Vec<(i128, i128)>,
}

/// First `depth` partial quotients of α.
pub fn cf_expand(
    alpha: &IrrationalAlpha,
    depth: usize,
) -> Result<ContinuedFraction, DiophantineError> {
    if depth == 0 {
        return Err(DiophantineError::DepthZero);
    }
    let quotients = match &alpha.repr {
        AlphaRepr::ExactQuadratic(q) => cf_quotients_exact(q, depth)?,
        AlphaRepr::HighPrecFloat(v) => cf_quotients_float(*v, depth)?,
    };
    let mut convergents = Vec::with_capacity(depth);
    // p_{-1} = 1, p_0 = a_0 = 0; q_{-1} = 0, q_0 = 1
    let (mut p_prev, mut p_cur) = (1i128, 0i128);
    let (mut q_prev, mut q_cur) = (0i128, 1i128);
    for &a in &quotients {
        let a = a as i128;
        let p_next = a
            .checked_mul(p_cur)
            .and_then(|x| x.checked_add(p_prev))
            .ok_or(DiophantineError::Overflow)?;
        let q_next = a
            .checked_mul(q_cur)
            .and_then(|x| x.checked_add(q_prev))
            .ok_or(DiophantineError::Overflow)?;
        convergents.push((p_next, q_next));
        p_prev = p_cur;
        p_cur = p_next;
        q_prev = q_cur;
        q_cur = q_next;
    }
    Ok(ContinuedFraction {
        quotients,
        convergents,
    })
}

fn cf_quotients_exact(q: &QuadExact, depth: usize) -> Result<Vec<u64>, DiophantineError> {
    // Work with x = (P + √D)/Q, maintaining Q | D − P².
    let (mut pp, mut qq, dd) = if q.b() >= 0 {
        (q.a(), q.c(), q.b() * q.b() * q.d() as i128)
    } else {
        (-q.a(), -q.c(), q.b() * q.b() * q.d() as i128)
    };
    let mut big_d = dd;
    if (big_d - pp * pp) % qq != 0 {
        let s = qq.abs();
        pp = pp.checked_mul(s).ok_or(DiophantineError::Overflow)?;
        big_d = big_d
            .checked_mul(s)
            .and_then(|x| x.checked_mul(s))
            .ok_or(DiophantineError::Overflow)?;
        qq = qq.checked_mul(s).ok_or(DiophantineError::Overflow)?;
    }
    let isqrt_d = crate::quad::isqrt_u128(big_d as u128) as i128;
    let mut out = Vec::with_capacity(depth);
    for k in 0..=depth {
        let num = if qq > 0 {
            pp + isqrt_d
        } else {
            pp + isqrt_d + 1
        };
        let a = num.div_euclid(qq);
        if k == 0 {
            debug_assert_eq!(a, 0, "alpha is reduced into (0,1)");
        } else {
            out.push(u64::try_from(a).map_err(|_| DiophantineError::Overflow)?);
        }
        let p_next = a
            .checked_mul(qq)
            .and_then(|x| x.checked_sub(pp))
            .ok_or(DiophantineError::Overflow)?;
        let q_next = (big_d - p_next * p_next) / qq;
        pp = p_next;
        qq = q_next;
    }
    Ok(out)
}

fn cf_quotients_float(v: Dd, depth: usize) -> Result<Vec<u64>, DiophantineError> {
    let threshold = 2f64.powi(-45);
    let mut x = v;
    // uncertainty of the current remainder; each inversion amplifies it
    // by 1/x², so deep quotients of a finite-precision α go unreliable
    let mut uncertainty = v.to_f64().abs() * 2f64.powi(-104) + 1e-300;
    let mut out = Vec::with_capacity(depth);
    for _ in 0..depth {
        let xv = x.to_f64();
        if xv < threshold || uncertainty / (xv * xv) > threshold {
            return Err(DiophantineError::PrecisionExhausted);
        }
        let inv = Dd::ONE / x;
        let a = inv.floor();
        if a < 1.0 {
            return Err(DiophantineError::PrecisionExhausted);
        }
        out.push(a as u64);
        uncertainty /= xv * xv;
        x = inv.add_f64(-a);
    }
    Ok(out)
}

/// Smallest-|m| certificate that `x = mα + n`, within `m_bound` and `tol`.
///
/// Exact-representable `x` under an exact α is decided exactly; `tol` is
/// ignored on that path. Ties at equal |m| prefer smaller |n|, then
/// positive m. Absence is a value, not a proof.
pub fn membership_z_alpha_z(
    x: &TorusPoint,
    alpha: &IrrationalAlpha,
    m_bound: i64,
    tol: f64,
) -> Option<LatticeElement> {
    if let (AlphaRepr::ExactQuadratic(aq), Some(xq)) = (&alpha.repr, x.exact()) {
        if let Some(res) = membership_exact(xq, aq, alpha, m_bound) {
            return res;
        }
        // exact path declined (overflow); fall through to the scan
    }
    let xv = x.real().dd();
    let av = alpha.value_dd();
    let mut level = 0i64;
    while level <= m_bound {
        let ms: &[i64] = if level == 0 { &[0] } else { &[level, -level] };
        let mut best: Option<(i64, i64, f64)> = None;
        for &m in ms {
            // x − mα can be any real; pick the nearest integer n
            let r = xv - mul_int_dd(av, m);
            let n = r.to_f64().round();
            let resid = r.add_f64(-n).abs().to_f64();
            if resid <= tol {
                let n = n as i64;
                let cand = (m, n, resid);
                best = Some(match best {
                    None => cand,
                    Some(prev) => {
                        if (n.abs(), m < 0) < (prev.1.abs(), prev.0 < 0) {
                            cand
                        } else {
                            prev
                        }
                    }
                });
            }
        }
        if let Some((m, n, _)) = best {
            return Some(LatticeElement::new(m, n, alpha));
        }
        level += 1;
    }
    None
}

fn mul_int_dd(v: Dd, k: i64) -> Dd {
    let kf = k as f64;
    let p = v.mul_f64(kf);
    Dd::new(p.hi, p.lo)
}

/// Exact decision path; `Some(result)` when decidable, `None` on overflow.
fn membership_exact(
    xq: &QuadExact,
    aq: &QuadExact,
    alpha: &IrrationalAlpha,
    m_bound: i64,
) -> Option<Option<LatticeElement>> {
    if xq.b() == 0 {
        // rational x in (0,1): mα+n rational forces m = 0, n = x ∉ ℤ
        return Some(None);
    }
    if xq.d() != aq.d() {
        return Some(None);
    }
    // x = (a+b√d)/c, α = (p+q√d)/r: m = b r/(c q) must be an integer
    let num = xq.b().checked_mul(aq.c())?;
    let den = xq.c().checked_mul(aq.b())?;
    if num % den != 0 {
        return Some(None);
    }
    let m = num / den;
    if m.unsigned_abs() > m_bound.unsigned_abs() as u128 {
        return Some(None);
    }
    // n = x − mα must be an integer
    let m_alpha = aq.mul_int(m).ok()?;
    let n_val = xq.sub(&m_alpha).ok()?;
    if !n_val.is_integer() {
        return Some(None);
    }
    let m = i64::try_from(m).ok()?;
    let n = i64::try_from(n_val.a()).ok()?;
    Some(Some(LatticeElement::new(m, n, alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_multiple_identity_and_algebraic() {
        let g = IrrationalAlpha::golden();
        assert_eq!(frac_multiple(&g, 0).unwrap().value(), 0.0);

        let s = IrrationalAlpha::sqrt2_minus_1();
        // {3(√2−1)} = 3√2 − 4 ≈ 0.24264
        let p = frac_multiple(&s, 3).unwrap();
        assert!((p.value() - (3.0 * 2f64.sqrt() - 4.0)).abs() < 1e-14);
        let exact = p.exact().unwrap();
        assert_eq!((exact.a(), exact.b(), exact.c()), (-4, 3, 1));

        // {2·golden} = √5 − 2 ≈ 0.23607
        let p2 = frac_multiple(&g, 2).unwrap();
        assert!((p2.value() - 0.236_067_977_499_79).abs() < 1e-13);
    }

    #[test]
    fn frac_multiple_additivity() {
        let g = IrrationalAlpha::golden();
        for (j, k) in [(3i64, 8i64), (100, -37), (12345, 6789)] {
            let a = frac_multiple(&g, j).unwrap();
            let b = frac_multiple(&g, k).unwrap();
            let both = frac_multiple(&g, j + k).unwrap();
            let sum = a.add_real(b.real());
            assert_eq!(
                sum.real().exact().unwrap(),
                both.exact().unwrap(),
                "exact additivity mod 1"
            );
        }
        // float mode, within 2·2^-40
        let f = IrrationalAlpha::parse("0.618033988749894848204586834366").unwrap();
        for (j, k) in [(3i64, 8i64), (1000, 999_983)] {
            let a = frac_multiple(&f, j).unwrap();
            let b = frac_multiple(&f, k).unwrap();
            let both = frac_multiple(&f, j + k).unwrap();
            let sum = a.add_real(b.real());
            let diff = sum.circle_dist_f64(&both);
            assert!(diff < 2.0 * 2f64.powi(-40));
        }
    }

    #[test]
    fn cf_fixed_points() {
        let g = IrrationalAlpha::golden();
        let cf = cf_expand(&g, 5).unwrap();
        assert_eq!(cf.quotients, vec![1, 1, 1, 1, 1]);
        assert_eq!(cf.convergents, vec![(1, 1), (1, 2), (2, 3), (3, 5), (5, 8)]);

        let s = IrrationalAlpha::sqrt2_minus_1();
        let cf = cf_expand(&s, 4).unwrap();
        assert_eq!(cf.quotients, vec![2, 2, 2, 2]);
    }

    #[test]
    fn cf_inverse_pi_float() {
        let inv_pi = IrrationalAlpha::parse("0.318309886183790671537767526745").unwrap();
        let cf = cf_expand(&inv_pi, 4).unwrap();
        assert_eq!(cf.quotients, vec![3, 7, 15, 1]);
        // ten digits still carry four reliable quotients
        let coarse = IrrationalAlpha::parse("0.3183098861").unwrap();
        let cf = cf_expand(&coarse, 4).unwrap();
        assert_eq!(cf.quotients, vec![3, 7, 15, 1]);
    }

    #[test]
    fn cf_determinant_and_approximation() {
        let s = IrrationalAlpha::sqrt2_minus_1();
        let cf = cf_expand(&s, 12).unwrap();
        for k in 1..cf.convergents.len() {
            let (pk, qk) = cf.convergents[k];
            let (pk1, qk1) = cf.convergents[k - 1];
            let det = pk * qk1 - pk1 * qk;
            // vec index k holds the (k+1)-st convergent, so the sign
            // p_k q_{k−1} − p_{k−1} q_k = (−1)^{k+1} lands on even indices
            let expected = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(det, expected);
            assert!(qk > qk1);
        }
        let a = s.value();
        for k in 0..cf.convergents.len() - 1 {
            let (pk, qk) = cf.convergents[k];
            let (_, qk_next) = cf.convergents[k + 1];
            let err = (a - pk as f64 / qk as f64).abs();
            assert!(err < 1.0 / (qk as f64 * qk_next as f64));
        }
    }

    #[test]
    fn cf_float_precision_exhausted() {
        // a ten-digit literal cannot support 40 reliable quotients
        let a = IrrationalAlpha::parse("0.3183098861").unwrap();
        let res = cf_expand(&a, 40);
        assert!(matches!(res, Err(DiophantineError::PrecisionExhausted)));
    }

    #[test]
    fn membership_basic_certificates() {
        let g = IrrationalAlpha::golden();
        let a_pt = frac_multiple(&g, 1).unwrap();
        let hit = membership_z_alpha_z(&a_pt, &g, 10_000, 1e-9).unwrap();
        assert_eq!((hit.m, hit.n), (1, 0));

        // x = 1 − α = −α + 1
        let one_minus = TorusPoint::from_real(ExactReal::one().sub(&g.as_real()));
        let hit = membership_z_alpha_z(&one_minus, &g, 10_000, 1e-9).unwrap();
        assert_eq!((hit.m, hit.n), (-1, 1));

        // x = 1/2 has no certificate
        let half = TorusPoint::from_real(ExactReal::from_quad(QuadExact::new(1, 0, 2, 5).unwrap()));
        assert!(membership_z_alpha_z(&half, &g, 10_000, 1e-9).is_none());
    }

    #[test]
    fn membership_round_trip() {
        let g = IrrationalAlpha::golden();
        for m in -100i64..=100 {
            if m == 0 {
                continue;
            }
            let el = LatticeElement::new(m, -(m as f64 * g.value()).floor() as i64, &g);
            let pt = TorusPoint::from_real(*el.real());
            let rec = membership_z_alpha_z(&pt, &g, 10_000, 1e-9).unwrap();
            assert_eq!(rec.m, m, "m recovered");
        }
    }

    #[test]
    fn membership_prefers_smaller_n_at_equal_m() {
        // with a generous tolerance both m = +1 and m = −1 qualify at
        // level 1; the (smaller |n|) rule picks m = +1, n = 0
        let f = IrrationalAlpha::parse("0.618033988749894848204586834366").unwrap();
        let x = TorusPoint::from_f64(0.5);
        let hit = membership_z_alpha_z(&x, &f, 100, 0.2).unwrap();
        assert_eq!((hit.m, hit.n), (1, 0));
    }

    #[test]
    fn membership_float_scan() {
        let f = IrrationalAlpha::parse("0.618033988749894848204586834366").unwrap();
        let x = TorusPoint::from_f64((2.0 * f.value()).fract());
        let hit = membership_z_alpha_z(&x, &f, 100, 1e-9).unwrap();
        assert_eq!((hit.m, hit.n), (2, -1));
    }

    #[test]
    fn exact_overflow_is_explicit() {
        let g = IrrationalAlpha::golden();
        // k² d no longer fits the 128-bit sign test; never a silent wrap
        assert!(matches!(
            frac_multiple(&g, i64::MAX),
            Err(DiophantineError::Overflow)
        ));
        // convergents of the golden ratio overflow i128 near depth 180
        assert!(matches!(
            cf_expand(&g, 200),
            Err(DiophantineError::Overflow)
        ));
        assert!(cf_expand(&g, 150).is_ok());
    }

    #[test]
    fn membership_respects_search_bound() {
        let g = IrrationalAlpha::golden();
        let x = frac_multiple(&g, 7).unwrap();
        assert!(membership_z_alpha_z(&x, &g, 5, 1e-9).is_none());
        let hit = membership_z_alpha_z(&x, &g, 7, 1e-9).unwrap();
        assert_eq!(hit.m, 7);
    }

    #[test]
    fn alpha_validation_errors() {
        assert!(matches!(
            IrrationalAlpha::exact_quadratic(1, 0, 4, 2),
            Err(DiophantineError::PerfectSquare)
        ));
        assert!(matches!(
            IrrationalAlpha::exact_quadratic(1, 0, 5, 2),
            Err(DiophantineError::RationalAlpha)
        ));
        assert!(matches!(
            IrrationalAlpha::exact_quadratic(1, 1, 5, 0),
            Err(DiophantineError::ZeroDenominator)
        ));
        assert!(IrrationalAlpha::parse("not-a-number").is_err());
        assert!(IrrationalAlpha::parse("1.5").is_err());
    }

    #[test]
    fn lattice_element_recomputable() {
        let g = IrrationalAlpha::golden();
        let el = LatticeElement::new(999_983, -618_016, &g);
        let recomputed = g.value_dd().mul_f64(999_983.0).add_f64(-618_016.0);
        assert!((el.value() - recomputed.to_f64()).abs() < 2f64.powi(-40));
    }
}
