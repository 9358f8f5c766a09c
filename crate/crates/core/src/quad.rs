//! Exact arithmetic on quadratic irrationals `(a + b√d) / c` with 128-bit
//! integer components. All operations are checked; overflow is an error,
//! never a silent wrap.

use crate::dd::Dd;
use crate::DiophantineError;
use std::cmp::Ordering;

/// `(a + b√d) / c`, reduced, with `c > 0` and `d` squarefree positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadExact {
    a: i128,
    b: i128,
    c: i128,
    d: i64,
}

pub(crate) fn isqrt_u128(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u128 + 2;
    loop {
        let y = (x + n / x) / 2;
        if y >= x {
            break;
        }
        x = y;
    }
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub(crate) fn is_perfect_square(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = isqrt_u128(n as u128);
    r * r == n as u128
}

/// Split `d = d0 * s^2` with `d0` squarefree; returns `(d0, s)`.
pub(crate) fn squarefree_decompose(d: i64) -> (i64, i64) {
    let mut d0 = d;
    let mut s = 1i64;
    let mut i = 2i64;
    while i * i <= d0 {
        while d0 % (i * i) == 0 {
            d0 /= i * i;
            s *= i;
        }
        i += 1;
    }
    (d0, s)
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn i128_to_dd(x: i128) -> Dd {
    let hi = x as f64;
    let lo = (x - hi as i128) as f64;
    Dd::new(hi, lo)
}

type Checked<T> = Result<T, DiophantineError>;

#[inline]
fn cadd(x: i128, y: i128) -> Checked<i128> {
    x.checked_add(y).ok_or(DiophantineError::Overflow)
}

#[inline]
fn cmul(x: i128, y: i128) -> Checked<i128> {
    x.checked_mul(y).ok_or(DiophantineError::Overflow)
}

impl QuadExact {
    /// Build `(a + b√d)/c`; `d` is made squarefree and the fraction reduced.
    pub fn new(a: i128, b: i128, c: i128, d: i64) -> Checked<QuadExact> {
        if c == 0 {
            return Err(DiophantineError::ZeroDenominator);
        }
        if d <= 0 {
            return Err(DiophantineError::NonPositiveD);
        }
        let (d0, s) = squarefree_decompose(d);
        let b = cmul(b, s as i128)?;
        let mut q = QuadExact { a, b, c, d: d0 };
        q.reduce();
        Ok(q)
    }

    pub fn zero(d: i64) -> QuadExact {
        QuadExact {
            a: 0,
            b: 0,
            c: 1,
            d,
        }
    }

    pub fn from_integer(n: i128, d: i64) -> QuadExact {
        QuadExact {
            a: n,
            b: 0,
            c: 1,
            d,
        }
    }

    pub fn a(&self) -> i128 {
        self.a
    }
    pub fn b(&self) -> i128 {
        self.b
    }
    pub fn c(&self) -> i128 {
        self.c
    }
    pub fn d(&self) -> i64 {
        self.d
    }

    fn reduce(&mut self) {
        if self.c < 0 {
            self.a = -self.a;
            self.b = -self.b;
            self.c = -self.c;
        }
        let g = gcd(gcd(self.a, self.b), self.c);
        if g > 1 {
            self.a /= g;
            self.b /= g;
            self.c /= g;
        }
    }

    pub fn same_field(&self, other: &QuadExact) -> bool {
        self.d == other.d || self.b == 0 || other.b == 0
    }

    pub fn add(&self, other: &QuadExact) -> Checked<QuadExact> {
        let d = if self.b != 0 { self.d } else { other.d };
        if !self.same_field(other) {
            return Err(DiophantineError::MixedFields);
        }
        let a = cadd(cmul(self.a, other.c)?, cmul(other.a, self.c)?)?;
        let b = cadd(cmul(self.b, other.c)?, cmul(other.b, self.c)?)?;
        let c = cmul(self.c, other.c)?;
        let mut q = QuadExact { a, b, c, d };
        q.reduce();
        Ok(q)
    }

    pub fn sub(&self, other: &QuadExact) -> Checked<QuadExact> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> QuadExact {
        QuadExact {
            a: -self.a,
            b: -self.b,
            c: self.c,
            d: self.d,
        }
    }

    pub fn add_int(&self, n: i128) -> Checked<QuadExact> {
        let a = cadd(self.a, cmul(n, self.c)?)?;
        Ok(QuadExact { a, ..*self })
    }

    pub fn mul_int(&self, k: i128) -> Checked<QuadExact> {
        let mut q = QuadExact {
            a: cmul(self.a, k)?,
            b: cmul(self.b, k)?,
            c: self.c,
            d: self.d,
        };
        q.reduce();
        Ok(q)
    }

    /// Sign of the real value, decided in integer arithmetic.
    pub fn sign(&self) -> Checked<Ordering> {
        // c > 0, so the sign is that of a + b√d
        let (a, b) = (self.a, self.b);
        Ok(if a == 0 && b == 0 {
            Ordering::Equal
        } else if a >= 0 && b >= 0 {
            Ordering::Greater
        } else if a <= 0 && b <= 0 {
            Ordering::Less
        } else {
            let a2 = cmul(a, a)?;
            let b2d = cmul(cmul(b, b)?, self.d as i128)?;
            if a > 0 {
                // a > 0, b < 0: positive iff a^2 > b^2 d
                a2.cmp(&b2d)
            } else {
                // a < 0, b > 0: positive iff b^2 d > a^2
                b2d.cmp(&a2)
            }
        })
    }

    pub fn cmp_exact(&self, other: &QuadExact) -> Checked<Ordering> {
        self.sub(other)?.sign()
    }

    pub fn is_integer(&self) -> bool {
        self.b == 0 && self.c == 1
    }

    /// Exact floor, using a double-double estimate fixed up by sign tests.
    pub fn floor(&self) -> Checked<i128> {
        let mut f = self.to_dd().floor() as i128;
        // fix up: want 0 <= self - f < 1
        loop {
            let diff = self.add_int(-f)?;
            match diff.sign()? {
                Ordering::Less => f -= 1,
                _ => {
                    if diff.add_int(-1)?.sign()? == Ordering::Less {
                        return Ok(f);
                    }
                    f += 1;
                }
            }
        }
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Checked<QuadExact> {
        let f = self.floor()?;
        self.add_int(-f)
    }

    pub fn to_dd(&self) -> Dd {
        let sqrt_d = Dd::from_f64(self.d as f64).sqrt();
        let num = i128_to_dd(self.a) + i128_to_dd(self.b) * sqrt_d;
        num / i128_to_dd(self.c)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_dd().to_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_extraction() {
        assert_eq!(squarefree_decompose(8), (2, 2));
        assert_eq!(squarefree_decompose(5), (5, 1));
        assert_eq!(squarefree_decompose(45), (5, 3));
    }

    #[test]
    fn perfect_square_detection() {
        assert!(is_perfect_square(49));
        assert!(is_perfect_square(0));
        assert!(!is_perfect_square(5));
        assert!(!is_perfect_square(-4));
    }

    #[test]
    fn golden_value_and_floor() {
        // (−1 + √5)/2 ≈ 0.618
        let g = QuadExact::new(-1, 1, 2, 5).unwrap();
        assert!((g.to_f64() - 0.618_033_988_749_894_9).abs() < 1e-15);
        assert_eq!(g.floor().unwrap(), 0);
        let threeg = g.mul_int(3).unwrap();
        assert_eq!(threeg.floor().unwrap(), 1);
        let frac = threeg.fract().unwrap();
        // 3(√5−1)/2 − 1 = (−3+3√5)/2 − 1 = (−5+3√5)/2
        assert_eq!(frac, QuadExact::new(-5, 3, 2, 5).unwrap());
    }

    #[test]
    fn sign_mixed_coefficients() {
        // 7 − 3√5 < 0 since 49 < 45? no: 49 > 45, so positive
        let x = QuadExact::new(7, -3, 1, 5).unwrap();
        assert_eq!(x.sign().unwrap(), Ordering::Greater);
        let y = QuadExact::new(-7, 3, 1, 5).unwrap();
        assert_eq!(y.sign().unwrap(), Ordering::Less);
        let z = QuadExact::new(6, -3, 1, 5).unwrap();
        assert_eq!(z.sign().unwrap(), Ordering::Less);
    }

    #[test]
    fn arithmetic_round_trip() {
        let g = QuadExact::new(-1, 1, 2, 5).unwrap();
        let s = g.add(&g).unwrap(); // √5 − 1
        assert_eq!(s, QuadExact::new(-1, 1, 1, 5).unwrap());
        let back = s.sub(&g).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn d_not_squarefree_normalizes() {
        // (0 + 1√8)/2 = √2
        let x = QuadExact::new(0, 1, 2, 8).unwrap();
        assert_eq!(x.d(), 2);
        assert_eq!(x, QuadExact::new(0, 1, 1, 2).unwrap());
    }
}
