//! Double-double arithmetic: unevaluated sums `hi + lo` with roughly
//! 106 bits of significand. Used for orbit points, measures and phases
//! whenever exact quadratic arithmetic is not available.

/// Unevaluated sum of two doubles, `|lo| <= ulp(hi)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Renormalizing constructor; `hi` and `lo` need not be ordered.
    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add_f64(self, rhs: f64) -> Dd {
        let (s, e) = two_sum(self.hi, rhs);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, rhs: f64) -> Dd {
        let (p, e) = two_prod(self.hi, rhs);
        let (hi, lo) = quick_two_sum(p, e + self.lo * rhs);
        Dd { hi, lo }
    }

    pub fn div_f64(self, rhs: f64) -> Dd {
        let q1 = self.hi / rhs;
        let (p, e) = two_prod(q1, rhs);
        let r = self - Dd { hi: p, lo: e };
        let q2 = (r.hi + r.lo) / rhs;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    /// Largest integer `<= self`, exact.
    pub fn floor(self) -> f64 {
        let f = self.hi.floor();
        if f == self.hi && self.lo < 0.0 {
            f - 1.0
        } else {
            f
        }
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(self) -> Dd {
        let mut r = self.add_f64(-self.floor());
        // guard against rounding at the wrap point; compare as a pair so
        // values like {hi: 1.0, lo: -1e-20} stay untouched
        if r.hi < 0.0 || (r.hi == 0.0 && r.lo < 0.0) {
            r = r.add_f64(1.0);
        }
        if r.hi > 1.0 || (r.hi == 1.0 && r.lo >= 0.0) {
            r = r.add_f64(-1.0);
        }
        r
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn cmp_dd(self, rhs: Dd) -> std::cmp::Ordering {
        self.hi
            .partial_cmp(&rhs.hi)
            .unwrap()
            .then(self.lo.partial_cmp(&rhs.lo).unwrap())
    }

    /// `k * self mod 1`, with `k` an integer of magnitude below 2^53.
    pub fn mul_int_fract(self, k: i64) -> Dd {
        let kf = k as f64;
        let (p1, e1) = two_prod(kf, self.hi);
        let (p2, e2) = two_prod(kf, self.lo);
        let s = Dd::new(p1, e1) + Dd::new(p2, e2);
        s.fract()
    }

    /// sqrt via one Newton step on the double estimate.
    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        let s = self.hi.sqrt();
        // s + (self - s^2) / (2 s)
        let (p, e) = two_prod(s, s);
        let diff = self - Dd { hi: p, lo: e };
        Dd::from_f64(s) + diff.div_f64(2.0 * s)
    }
}

impl std::ops::Add for Dd {
    type Output = Dd;

    #[inline]
    fn add(self, rhs: Dd) -> Dd {
        let (s1, e1) = two_sum(self.hi, rhs.hi);
        let (s2, e2) = two_sum(self.lo, rhs.lo);
        let (s1, t) = quick_two_sum(s1, e1 + s2);
        let (hi, lo) = quick_two_sum(s1, t + e2);
        Dd { hi, lo }
    }
}

impl std::ops::Neg for Dd {
    type Output = Dd;

    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;

    #[inline]
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;

    #[inline]
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;

    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs.mul_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs.mul_f64(q2);
        let q3 = r.hi / rhs.hi;
        Dd::new(q1, q2).add_f64(q3)
    }
}

/// sin(2πu) for u ∈ [0,1), with quadrant reduction done in double-double
/// so that half-integer arguments give exact zeros.
pub fn sin2pi(u: Dd) -> f64 {
    let u = u.fract();
    let s = if u.hi < 0.25 {
        u
    } else if u.hi < 0.75 {
        Dd::from_f64(0.5) - u
    } else {
        u.add_f64(-1.0)
    };
    let x = s.to_f64() * std::f64::consts::TAU;
    x.sin()
}

/// cos(2πu) = sin(2π(u + 1/4)).
pub fn cos2pi(u: Dd) -> f64 {
    sin2pi(u.add_f64(0.25))
}

/// Compensated (Neumaier) running sum of plain doubles.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_keeps_small_residuals() {
        let a = Dd::from_f64(1.0);
        let tiny = Dd::from_f64(1e-25);
        let s = a + tiny - a;
        assert!((s.to_f64() - 1e-25).abs() < 1e-40);
    }

    #[test]
    fn fract_handles_negative_and_wrap() {
        let x = Dd::from_f64(-0.25);
        assert!((x.fract().to_f64() - 0.75).abs() < 1e-30);
        // 3 − 1e−20 has fractional part 1 − 1e−20, held as {1.0, -1e-20}
        let y = Dd::new(3.0, -1e-20);
        let f = y.fract();
        assert_eq!(y.floor(), 2.0);
        assert!(f.cmp_dd(Dd::ONE) == std::cmp::Ordering::Less);
        assert!(f.cmp_dd(Dd::ZERO) != std::cmp::Ordering::Less);
        assert!((f.hi - 1.0).abs() < 1e-15 && f.lo < 0.0);
    }

    #[test]
    fn mul_int_fract_matches_direct() {
        let alpha = Dd::from_f64(0.6180339887498949);
        let direct = (7.0 * 0.6180339887498949_f64).fract();
        let via = alpha.mul_int_fract(7).to_f64();
        assert!((direct - via).abs() < 1e-12);
    }

    #[test]
    fn sqrt_newton_accuracy() {
        let five = Dd::from_f64(5.0);
        let r = five.sqrt();
        let back = r * r - five;
        assert!(back.to_f64().abs() < 1e-30);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut cs = CompensatedSum::new();
        let mut naive = 0.0_f64;
        for _ in 0..1_000_000 {
            cs.add(0.1);
            naive += 0.1;
        }
        let exact = 100_000.0;
        assert!((cs.value() - exact).abs() < 1e-9);
        assert!((cs.value() - exact).abs() <= (naive - exact).abs());
    }
}
