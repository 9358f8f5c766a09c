//! Semi-closed intervals and multiband sets on the circle, in disjoint
//! and integer-combination form.
//!
//! Endpoints are carried as [`ExactReal`]s, so sets built from ℤα+ℤ data
//! keep exact endpoints and membership of orbit points is decided by
//! integer sign tests rather than float comparisons.

use crate::diophantine::{ExactReal, IrrationalAlpha, LatticeElement, TorusPoint};
use crate::quad::QuadExact;
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TorusSetError {
    #[error("interval length must lie in (0,1], got {0}")]
    BadLength(f64),
    #[error("intervals overlap near t={0}")]
    Overlap(f64),
    #[error("closure must be uniform over the set")]
    MixedClosure,
    #[error("total measure exceeds 1")]
    MeasureTooLarge,
    #[error("indicator value {value} at t={witness}: not an indicator")]
    NotAnIndicator { witness: f64, value: i64 },
    #[error("cannot parse set spec `{0}`")]
    Parse(String),
}

/// Which endpoint each interval contains; uniform over a set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closure {
    LeftSemiClosed,
    RightSemiClosed,
}

/// An interval of length in (0,1] on 𝕋, wrap-around permitted.
#[derive(Clone, Debug)]
pub struct TorusInterval {
    left: TorusPoint,
    length: ExactReal,
    certificate: Option<LatticeElement>,
    closure: Closure,
}

impl TorusInterval {
    pub fn new(
        left: TorusPoint,
        length: ExactReal,
        closure: Closure,
    ) -> Result<TorusInterval, TorusSetError> {
        let v = length.to_f64();
        if length.cmp_f64(0.0) != Ordering::Greater || length.cmp_f64(1.0) == Ordering::Greater {
            return Err(TorusSetError::BadLength(v));
        }
        Ok(TorusInterval {
            left,
            length,
            certificate: None,
            closure,
        })
    }

    /// Interval whose length carries a ℤα+ℤ certificate.
    pub fn with_certificate(
        left: TorusPoint,
        length: LatticeElement,
        closure: Closure,
    ) -> Result<TorusInterval, TorusSetError> {
        let mut iv = TorusInterval::new(left, *length.real(), closure)?;
        iv.certificate = Some(length);
        Ok(iv)
    }

    /// Interval of length {mα} (length 1 when m = 0), certificate attached.
    pub fn with_length_multiple(
        left: TorusPoint,
        alpha: &IrrationalAlpha,
        m: i64,
        closure: Closure,
    ) -> Result<TorusInterval, TorusSetError> {
        let el = length_certificate(alpha, m);
        TorusInterval::with_certificate(left, el, closure)
    }

    pub fn left(&self) -> &TorusPoint {
        &self.left
    }

    pub fn length(&self) -> &ExactReal {
        &self.length
    }

    pub fn certificate(&self) -> Option<&LatticeElement> {
        self.certificate.as_ref()
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    /// Right endpoint `left + length mod 1`.
    pub fn right(&self) -> TorusPoint {
        self.left.add_real(&self.length)
    }

    pub fn contains(&self, t: &TorusPoint) -> bool {
        if self.length.cmp_f64(1.0) == Ordering::Equal {
            return true;
        }
        let rel = t.sub_fract(&self.left);
        match self.closure {
            Closure::LeftSemiClosed => rel.cmp_real(&self.length) == Ordering::Less,
            Closure::RightSemiClosed => {
                rel.cmp_f64(0.0) == Ordering::Greater
                    && rel.cmp_real(&self.length) != Ordering::Greater
            }
        }
    }
}

/// Length `{mα}` as a lattice element (m, −⌊mα⌋); m = 0 gives length 1.
pub fn length_certificate(alpha: &IrrationalAlpha, m: i64) -> LatticeElement {
    if m == 0 {
        return LatticeElement::new(0, 1, alpha);
    }
    let scaled = alpha.as_real().mul_int(m);
    let n = -scaled.dd().floor() as i64;
    LatticeElement::new(m, n, alpha)
}

/// Union of intervals on 𝕋, in disjoint or integer-combination form.
#[derive(Clone, Debug)]
pub struct MultibandSet {
    form: SetForm,
    closure: Closure,
}

#[derive(Clone, Debug)]
pub enum SetForm {
    Disjoint(Vec<TorusInterval>),
    Combination(Vec<(i64, TorusInterval)>),
}

impl MultibandSet {
    /// Pairwise disjoint intervals with a uniform closure.
    pub fn disjoint(intervals: Vec<TorusInterval>) -> Result<MultibandSet, TorusSetError> {
        let closure = uniform_closure(intervals.iter().map(|iv| iv.closure))?;
        let mut sorted: Vec<TorusInterval> = intervals;
        sorted.sort_by(|x, y| x.left.real().cmp_real(y.left.real()));
        if sorted.len() > 1 {
            for i in 0..sorted.len() {
                let cur = &sorted[i];
                let next = &sorted[(i + 1) % sorted.len()];
                let gap = next.left.sub_fract(&cur.left);
                if gap.cmp_real(&cur.length) == Ordering::Less {
                    return Err(TorusSetError::Overlap(next.left.value()));
                }
            }
        }
        let mut total = ExactReal::zero();
        for iv in &sorted {
            total = total.add(&iv.length);
        }
        if total.cmp_f64(1.0 + 1e-12) == Ordering::Greater {
            return Err(TorusSetError::MeasureTooLarge);
        }
        Ok(MultibandSet {
            form: SetForm::Disjoint(sorted),
            closure,
        })
    }

    /// Integer combination of intervals whose induced step function is an
    /// indicator; verified on the partition cut by all endpoints.
    pub fn combination(terms: Vec<(i64, TorusInterval)>) -> Result<MultibandSet, TorusSetError> {
        let closure = uniform_closure(terms.iter().map(|(_, iv)| iv.closure))?;
        let set = MultibandSet {
            form: SetForm::Combination(terms),
            closure,
        };
        for cut in set.endpoint_points() {
            let v = set.step_value(&cut);
            if v != 0 && v != 1 {
                return Err(TorusSetError::NotAnIndicator {
                    witness: cut.value(),
                    value: v,
                });
            }
        }
        Ok(set)
    }

    /// The whole circle.
    pub fn circle(alpha: &IrrationalAlpha, closure: Closure) -> MultibandSet {
        let iv = TorusInterval::with_certificate(
            TorusPoint::zero(),
            length_certificate(alpha, 0),
            closure,
        )
        .unwrap();
        MultibandSet {
            form: SetForm::Disjoint(vec![iv]),
            closure,
        }
    }

    /// The empty set (no intervals).
    pub fn empty(closure: Closure) -> MultibandSet {
        MultibandSet {
            form: SetForm::Disjoint(Vec::new()),
            closure,
        }
    }

    /// Single interval as a set.
    pub fn single(interval: TorusInterval) -> MultibandSet {
        let closure = interval.closure;
        MultibandSet {
            form: SetForm::Disjoint(vec![interval]),
            closure,
        }
    }

    pub fn form(&self) -> &SetForm {
        &self.form
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    pub fn is_combination(&self) -> bool {
        matches!(self.form, SetForm::Combination(_))
    }

    /// All (coefficient, interval) pairs; disjoint intervals carry +1.
    pub fn terms(&self) -> Vec<(i64, &TorusInterval)> {
        match &self.form {
            SetForm::Disjoint(ivs) => ivs.iter().map(|iv| (1, iv)).collect(),
            SetForm::Combination(ts) => ts.iter().map(|(c, iv)| (*c, iv)).collect(),
        }
    }

    fn step_value(&self, t: &TorusPoint) -> i64 {
        self.terms()
            .iter()
            .map(|(c, iv)| if iv.contains(t) { *c } else { 0 })
            .sum()
    }

    pub fn contains(&self, t: &TorusPoint) -> bool {
        match &self.form {
            SetForm::Disjoint(ivs) => ivs.iter().any(|iv| iv.contains(t)),
            SetForm::Combination(_) => self.step_value(t) == 1,
        }
    }

    /// Lebesgue measure as a high-precision real.
    pub fn measure_real(&self) -> ExactReal {
        let mut total = ExactReal::zero();
        for (c, iv) in self.terms() {
            total = total.add(&iv.length.mul_int(c));
        }
        total
    }

    pub fn measure(&self) -> f64 {
        self.measure_real().to_f64()
    }

    /// Endpoints (lefts and rights) of every constituent interval.
    pub fn endpoint_points(&self) -> Vec<TorusPoint> {
        let mut pts = Vec::new();
        for (_, iv) in self.terms() {
            pts.push(*iv.left());
            pts.push(iv.right());
        }
        pts
    }

    /// Canonical sorted disjoint form with the same indicator.
    pub fn to_disjoint(&self) -> Result<MultibandSet, TorusSetError> {
        match &self.form {
            SetForm::Disjoint(_) => Ok(self.clone()),
            SetForm::Combination(terms) => {
                if terms.is_empty() {
                    return Ok(MultibandSet::empty(self.closure));
                }
                combination_sweep(self, self.closure)
            }
        }
    }
}

fn uniform_closure(mut closures: impl Iterator<Item = Closure>) -> Result<Closure, TorusSetError> {
    let first = match closures.next() {
        Some(c) => c,
        None => return Ok(Closure::LeftSemiClosed),
    };
    for c in closures {
        if c != first {
            return Err(TorusSetError::MixedClosure);
        }
    }
    Ok(first)
}

fn combination_sweep(set: &MultibandSet, closure: Closure) -> Result<MultibandSet, TorusSetError> {
    // cut points, sorted and deduplicated
    let mut cuts = set.endpoint_points();
    cuts.sort_by(|x, y| x.real().cmp_real(y.real()));
    cuts.dedup_by(|x, y| x.real().cmp_real(y.real()) == Ordering::Equal);
    let n = cuts.len();

    // arc i runs between cuts[i] and cuts[(i+1) % n]; its representative
    // point (where the step function equals the arc value) depends on the
    // closure convention
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let rep = match closure {
            Closure::LeftSemiClosed => &cuts[i],
            Closure::RightSemiClosed => &cuts[(i + 1) % n],
        };
        let v = set.step_value(rep);
        if v != 0 && v != 1 {
            return Err(TorusSetError::NotAnIndicator {
                witness: rep.value(),
                value: v,
            });
        }
        values.push(v);
    }

    if values.iter().all(|&v| v == 1) {
        let iv = TorusInterval::new(cuts[0], ExactReal::one(), closure)?;
        return Ok(MultibandSet {
            form: SetForm::Disjoint(vec![iv]),
            closure,
        });
    }

    // start after a zero arc and collect maximal runs of ones
    let start = values.iter().position(|&v| v == 0).unwrap();
    let mut intervals = Vec::new();
    let mut run_start: Option<usize> = None;
    for step in 1..=n {
        let i = (start + step) % n;
        match (values[i], run_start) {
            (1, None) => run_start = Some(i),
            (0, Some(s)) => {
                intervals.push(make_interval(&cuts[s], &cuts[i], closure)?);
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = run_start {
        // the run ends at the zero arc `start`
        intervals.push(make_interval(&cuts[s], &cuts[start], closure)?);
    }
    MultibandSet::disjoint(intervals)
}

fn make_interval(
    left: &TorusPoint,
    right: &TorusPoint,
    closure: Closure,
) -> Result<TorusInterval, TorusSetError> {
    let length = right.sub_fract(left);
    TorusInterval::new(*left, length, closure)
}

/// Parse a value token: a decimal literal (kept as an exact rational when
/// it has at most 30 digits) or a lattice token `Ma`, `Ma+N`, `Ma-N`.
pub fn parse_value(
    token: &str,
    alpha: &IrrationalAlpha,
) -> Result<(ExactReal, Option<LatticeElement>), TorusSetError> {
    let token = token.trim();
    if let Some(apos) = token.find('a') {
        let (m_str, rest) = token.split_at(apos);
        let rest = &rest[1..];
        let m: i64 = if m_str.is_empty() || m_str == "+" {
            1
        } else if m_str == "-" {
            -1
        } else {
            m_str
                .parse()
                .map_err(|_| TorusSetError::Parse(token.to_string()))?
        };
        let n: i64 = if rest.is_empty() {
            0
        } else {
            rest.parse()
                .map_err(|_| TorusSetError::Parse(token.to_string()))?
        };
        let el = LatticeElement::new(m, n, alpha);
        return Ok((*el.real(), Some(el)));
    }
    // exact decimal rational when small enough, double-double otherwise
    let digits: String = token.chars().filter(|c| c.is_ascii_digit()).collect();
    if digits.len() <= 30 {
        if let Some(exact) = parse_decimal_rational(token) {
            return Ok((ExactReal::from_quad(exact), None));
        }
    }
    let dd = crate::diophantine::parse_decimal_dd(token)
        .ok_or_else(|| TorusSetError::Parse(token.to_string()))?;
    Ok((ExactReal::from_dd(dd), None))
}

fn parse_decimal_rational(s: &str) -> Option<QuadExact> {
    let (neg, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let mut num: i128 = 0;
    let mut den: i128 = 1;
    let mut seen_dot = false;
    let mut seen_digit = false;
    for ch in rest.chars() {
        match ch {
            '0'..='9' => {
                num = num
                    .checked_mul(10)?
                    .checked_add((ch as u8 - b'0') as i128)?;
                if seen_dot {
                    den = den.checked_mul(10)?;
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
    if neg {
        num = -num;
    }
    QuadExact::new(num, 0, den, 1).ok()
}

fn parse_closure(token: &str) -> Result<Closure, TorusSetError> {
    match token.trim() {
        "L" | "l" | "left" => Ok(Closure::LeftSemiClosed),
        "R" | "r" | "right" => Ok(Closure::RightSemiClosed),
        other => Err(TorusSetError::Parse(other.to_string())),
    }
}

/// Parse `"I:left,length[,closure]"` into a single interval.
pub fn parse_interval(spec: &str, alpha: &IrrationalAlpha) -> Result<TorusInterval, TorusSetError> {
    let body = spec
        .strip_prefix("I:")
        .ok_or_else(|| TorusSetError::Parse(spec.to_string()))?;
    let parts: Vec<&str> = body.split(',').collect();
    if parts.len() < 2 || parts.len() > 3 {
        return Err(TorusSetError::Parse(spec.to_string()));
    }
    let closure = if parts.len() == 3 {
        parse_closure(parts[2])?
    } else {
        Closure::LeftSemiClosed
    };
    let (left, _) = parse_value(parts[0], alpha)?;
    let (length, cert) = parse_value(parts[1], alpha)?;
    // lattice lengths are reduced into (0,1]; {0a} means the full circle
    let (length, cert) = match cert {
        Some(el) => {
            let reduced = reduce_length(el, alpha);
            (*reduced.real(), Some(reduced))
        }
        None => (length, None),
    };
    let left = TorusPoint::from_real(left);
    match cert {
        Some(el) => TorusInterval::with_certificate(left, el, closure),
        None => TorusInterval::new(left, length, closure),
    }
}

/// Reduce a lattice element into (0,1] by adjusting n, keeping the certificate.
fn reduce_length(el: LatticeElement, alpha: &IrrationalAlpha) -> LatticeElement {
    if el.m == 0 {
        return LatticeElement::new(0, 1, alpha);
    }
    let shift = el.real().dd().add_f64(-1e-18).floor() as i64;
    LatticeElement::new(el.m, el.n - shift, alpha)
}

/// Parse `"I:..."` or `"C:(c1)left,length+(c2)left,length..."`, with an
/// optional `@L` / `@R` closure suffix on combinations.
pub fn parse_set(spec: &str, alpha: &IrrationalAlpha) -> Result<MultibandSet, TorusSetError> {
    if spec.starts_with("I:") {
        return Ok(MultibandSet::single(parse_interval(spec, alpha)?));
    }
    let body = spec
        .strip_prefix("C:")
        .ok_or_else(|| TorusSetError::Parse(spec.to_string()))?;
    let (body, closure) = match body.rsplit_once('@') {
        Some((b, c)) => (b, parse_closure(c)?),
        None => (body, Closure::LeftSemiClosed),
    };
    let mut terms = Vec::new();
    for term in body.split('+') {
        let term = term.trim();
        let inner = term
            .strip_prefix('(')
            .and_then(|t| t.split_once(')'))
            .ok_or_else(|| TorusSetError::Parse(term.to_string()))?;
        let coeff: i64 = inner
            .0
            .trim()
            .parse()
            .map_err(|_| TorusSetError::Parse(term.to_string()))?;
        // interval part is "left,length"
        let parts: Vec<&str> = inner.1.split(',').collect();
        if parts.len() != 2 {
            return Err(TorusSetError::Parse(term.to_string()));
        }
        let iv = parse_interval(&format!("I:{},{}", parts[0], parts[1]), alpha)?;
        let iv = TorusInterval { closure, ..iv };
        terms.push((coeff, iv));
    }
    MultibandSet::combination(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn golden() -> IrrationalAlpha {
        IrrationalAlpha::golden()
    }

    fn half_open(left: f64, length: f64) -> TorusInterval {
        TorusInterval::new(
            TorusPoint::from_f64(left),
            ExactReal::from_f64(length),
            Closure::LeftSemiClosed,
        )
        .unwrap()
    }

    #[test]
    fn contains_honors_closure() {
        let iv = half_open(0.0, 0.5);
        assert!(iv.contains(&TorusPoint::zero()));
        assert!(!iv.contains(&TorusPoint::from_f64(0.5)));

        let riv = TorusInterval::new(
            TorusPoint::zero(),
            ExactReal::from_f64(0.5),
            Closure::RightSemiClosed,
        )
        .unwrap();
        assert!(!riv.contains(&TorusPoint::zero()));
        assert!(riv.contains(&TorusPoint::from_f64(0.5)));
    }

    #[test]
    fn contains_wraps_across_zero() {
        let g = golden();
        let iv = parse_interval("I:0.9,0.2", &g).unwrap(); // [0.9, 0.1)
        assert!(iv.contains(&TorusPoint::from_f64(0.95)));
        assert!(iv.contains(&TorusPoint::zero()));
        assert!(iv.contains(&TorusPoint::from_f64(0.05)));
        assert!(!iv.contains(&TorusPoint::from_f64(0.1)));
        assert!(!iv.contains(&TorusPoint::from_f64(0.5)));
    }

    #[test]
    fn combination_difference_membership() {
        let g = golden();
        // I1 = [0, 0.8), I2 = [0.2, 0.4): S = I1 \ I2
        let s = parse_set("C:(1)0,0.8+(-1)0.2,0.2", &g).unwrap();
        assert!(!s.contains(&TorusPoint::from_f64(0.3)));
        assert!(s.contains(&TorusPoint::from_f64(0.1)));
        assert!(s.contains(&TorusPoint::from_f64(0.5)));
        assert!((s.measure() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn measure_examples() {
        let g = golden();
        let circle = MultibandSet::circle(&g, Closure::LeftSemiClosed);
        assert_eq!(circle.measure(), 1.0);

        // [0,α) ∪ [0.7, 0.7+α−1/2): measure 2α − 1/2
        let a = g.as_real();
        let half = ExactReal::from_quad(QuadExact::new(1, 0, 2, 5).unwrap());
        let i1 =
            TorusInterval::with_length_multiple(TorusPoint::zero(), &g, 1, Closure::LeftSemiClosed)
                .unwrap();
        let i2 = TorusInterval::new(
            TorusPoint::from_f64(0.7),
            a.sub(&half),
            Closure::LeftSemiClosed,
        )
        .unwrap();
        let s = MultibandSet::disjoint(vec![i1, i2]).unwrap();
        let expect = 2.0 * g.value() - 0.5;
        assert!((s.measure() - expect).abs() < 1e-15);
        assert!((s.measure() - 0.736_067_977_499_79).abs() < 1e-12);
    }

    #[test]
    fn combination_to_disjoint_examples() {
        let g = golden();
        let s = parse_set("C:(1)0,0.8+(-1)0.2,0.2", &g).unwrap();
        let d = s.to_disjoint().unwrap();
        let ivs = match d.form() {
            SetForm::Disjoint(ivs) => ivs,
            _ => panic!("expected disjoint"),
        };
        assert_eq!(ivs.len(), 2);
        assert!((ivs[0].left().value() - 0.0).abs() < 1e-15);
        assert!((ivs[0].length().to_f64() - 0.2).abs() < 1e-15);
        assert!((ivs[1].left().value() - 0.4).abs() < 1e-15);
        assert!((ivs[1].length().to_f64() - 0.4).abs() < 1e-15);

        let adj = parse_set("C:(1)0,0.3+(1)0.3,0.3", &g).unwrap();
        let d = adj.to_disjoint().unwrap();
        let ivs = match d.form() {
            SetForm::Disjoint(ivs) => ivs,
            _ => panic!("expected disjoint"),
        };
        assert_eq!(ivs.len(), 1);
        assert!((ivs[0].length().to_f64() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn combination_rejects_non_indicator() {
        let g = golden();
        let res = parse_set("C:(2)0,0.3", &g);
        match res {
            Err(TorusSetError::NotAnIndicator { witness, value }) => {
                assert_eq!(value, 2);
                assert!((0.0..0.3).contains(&witness));
            }
            other => panic!("expected NotAnIndicator, got {:?}", other),
        }
    }

    #[test]
    fn disjoint_rejects_overlap() {
        let res = MultibandSet::disjoint(vec![half_open(0.0, 0.5), half_open(0.4, 0.2)]);
        assert!(matches!(res, Err(TorusSetError::Overlap(_))));
    }

    #[test]
    fn measure_preserved_by_normalization_exactly() {
        let g = golden();
        // S = I1 \ I2 with lattice lengths {3α}, {1α}
        let s = parse_set("C:(1)0,3a+(-1)0.1,1a", &g).unwrap();
        let d = s.to_disjoint().unwrap();
        let m1 = s.measure_real();
        let m2 = d.measure_real();
        let (e1, e2) = (m1.exact().unwrap(), m2.exact().unwrap());
        assert_eq!(e1.cmp_exact(e2).unwrap(), Ordering::Equal);
    }

    #[test]
    fn combination_agrees_with_disjoint_at_random_points() {
        let g = golden();
        let s = parse_set("C:(1)0,3a+(-1)0.1,1a", &g).unwrap();
        let d = s.to_disjoint().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let t = TorusPoint::from_f64(rng.gen::<f64>());
            assert_eq!(s.contains(&t), d.contains(&t));
        }
    }

    #[test]
    fn parse_interval_forms() {
        let g = golden();
        let iv = parse_interval("I:0,a", &g).unwrap();
        assert!((iv.length().to_f64() - g.value()).abs() < 1e-15);
        assert_eq!(iv.certificate().map(|e| (e.m, e.n)), Some((1, 0)));

        let iv = parse_interval("I:0.25,0.5,R", &g).unwrap();
        assert_eq!(iv.closure(), Closure::RightSemiClosed);

        // {3a} reduces into (0,1] with the certificate (3, -1)
        let iv = parse_interval("I:0,3a", &g).unwrap();
        assert_eq!(iv.certificate().map(|e| (e.m, e.n)), Some((3, -1)));
        assert!((iv.length().to_f64() - (3.0 * g.value() - 1.0)).abs() < 1e-15);
    }
}
