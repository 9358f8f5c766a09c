//! Frequency sets Λ_α(S) = {n ∈ ℤ : nα mod 1 ∈ S}: window generation,
//! counting functions, and uniform-density diagnostics.

use crate::diophantine::{frac_multiple, DiophantineError, IrrationalAlpha};
use crate::torus_sets::MultibandSet;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuasicrystalError {
    #[error("x={0} is outside the slice window")]
    OutOfWindow(f64),
    #[error("window must satisfy lo < hi")]
    EmptyWindow,
    #[error(transparent)]
    Diophantine(#[from] DiophantineError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// How close an orbit point may come to a set boundary, in float mode,
/// before the membership decision is flagged as unreliable.
pub const BOUNDARY_GRAZE: f64 = 1e-9;

/// The elements of Λ_α(S) inside an integer window `[lo, hi)`.
#[derive(Clone, Debug)]
pub struct FrequencySlice {
    pub alpha: IrrationalAlpha,
    pub set: MultibandSet,
    pub lo: i64,
    pub hi: i64,
    /// Sorted, distinct integers n with {nα} ∈ S.
    pub elements: Vec<i64>,
    /// In float mode: n whose orbit point grazes a set boundary.
    pub boundary_warnings: Vec<i64>,
}

/// Enumerate Λ_α(S) ∩ [lo, hi).
pub fn lambda_slice(
    alpha: &IrrationalAlpha,
    set: &MultibandSet,
    lo: i64,
    hi: i64,
) -> Result<FrequencySlice, QuasicrystalError> {
    if lo >= hi {
        return Err(QuasicrystalError::EmptyWindow);
    }
    let mut elements = Vec::new();
    let mut boundary_warnings = Vec::new();
    let step = alpha.as_real();
    let check_boundaries = !alpha.is_exact();
    let endpoints = if check_boundaries {
        set.endpoint_points()
    } else {
        Vec::new()
    };
    let mut point = frac_multiple(alpha, lo)?;
    for n in lo..hi {
        if set.contains(&point) {
            elements.push(n);
        }
        if check_boundaries {
            let graze = endpoints
                .iter()
                .any(|e| point.circle_dist_f64(e) < BOUNDARY_GRAZE);
            if graze {
                boundary_warnings.push(n);
            }
        }
        point = point.add_real(&step);
    }
    Ok(FrequencySlice {
        alpha: alpha.clone(),
        set: set.clone(),
        lo,
        hi,
        elements,
        boundary_warnings,
    })
}

impl FrequencySlice {
    /// Counting function n_Λ(x), normalized so n_Λ(0) = 0 whenever the
    /// window contains 0 (otherwise counts are relative to the window
    /// edge nearest zero).
    pub fn counting_function(&self, x: f64) -> Result<i64, QuasicrystalError> {
        if x < self.lo as f64 || x > self.hi as f64 {
            return Err(QuasicrystalError::OutOfWindow(x));
        }
        let anchor = 0f64.clamp(self.lo as f64, self.hi as f64);
        let below = |v: f64| self.elements.partition_point(|&e| (e as f64) < v) as i64;
        Ok(below(x) - below(anchor))
    }

    /// Lower/upper density over sliding integer windows `[a, a+r)`,
    /// a ∈ [lo, hi−r]; returns rows (r, dminus, dplus).
    pub fn density_profile(&self, r_values: &[i64]) -> Vec<(i64, f64, f64)> {
        let mut rows = Vec::with_capacity(r_values.len());
        for &r in r_values {
            assert!(r >= 1 && self.lo + r <= self.hi, "r must fit in the window");
            let mut min_count = i64::MAX;
            let mut max_count = i64::MIN;
            // two moving cursors over the sorted elements
            let mut lo_idx = 0usize; // first element >= a
            let mut hi_idx = 0usize; // first element >= a + r
            for a in self.lo..=(self.hi - r) {
                while lo_idx < self.elements.len() && self.elements[lo_idx] < a {
                    lo_idx += 1;
                }
                while hi_idx < self.elements.len() && self.elements[hi_idx] < a + r {
                    hi_idx += 1;
                }
                let count = (hi_idx - lo_idx) as i64;
                min_count = min_count.min(count);
                max_count = max_count.max(count);
            }
            rows.push((r, min_count as f64 / r as f64, max_count as f64 / r as f64));
        }
        rows
    }

    /// CSV export: one row per integer n in the window.
    pub fn export_csv<W: Write>(&self, mut w: W) -> Result<(), QuasicrystalError> {
        writeln!(w, "n,frac,in_s,boundary_flag")?;
        let mut point = frac_multiple(&self.alpha, self.lo)?;
        let step = self.alpha.as_real();
        let mut elem_idx = 0usize;
        let mut warn_idx = 0usize;
        for n in self.lo..self.hi {
            let in_s = if elem_idx < self.elements.len() && self.elements[elem_idx] == n {
                elem_idx += 1;
                1
            } else {
                0
            };
            let flagged = if warn_idx < self.boundary_warnings.len()
                && self.boundary_warnings[warn_idx] == n
            {
                warn_idx += 1;
                1
            } else {
                0
            };
            writeln!(w, "{},{},{},{}", n, point.value(), in_s, flagged)?;
            point = point.add_real(&step);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus_sets::{parse_set, Closure};

    #[test]
    fn golden_half_interval_slice() {
        let g = IrrationalAlpha::golden();
        let s = parse_set("I:0,0.5", &g).unwrap();
        let slice = lambda_slice(&g, &s, 0, 10).unwrap();
        assert_eq!(slice.elements, vec![0, 2, 4, 5, 7]);
    }

    #[test]
    fn circle_and_empty_slices() {
        let g = IrrationalAlpha::golden();
        let circle = MultibandSet::circle(&g, Closure::LeftSemiClosed);
        let slice = lambda_slice(&g, &circle, -3, 3).unwrap();
        assert_eq!(slice.elements, vec![-3, -2, -1, 0, 1, 2]);

        let empty = MultibandSet::empty(Closure::LeftSemiClosed);
        let slice = lambda_slice(&g, &empty, -3, 3).unwrap();
        assert!(slice.elements.is_empty());
    }

    #[test]
    fn counting_function_normalization() {
        let g = IrrationalAlpha::golden();
        let s = parse_set("I:0,0.5", &g).unwrap();
        let slice = lambda_slice(&g, &s, 0, 10).unwrap();
        assert_eq!(slice.counting_function(6.0).unwrap(), 4);
        assert_eq!(slice.counting_function(0.0).unwrap(), 0);
        assert!(slice.counting_function(-1.0).is_err());
    }

    #[test]
    fn counting_function_negative_side() {
        let g = IrrationalAlpha::golden();
        let circle = MultibandSet::circle(&g, Closure::LeftSemiClosed);
        let slice = lambda_slice(&g, &circle, -5, 5).unwrap();
        // n_Λ(x) = x on ℤ: #([-3,0)) = 3 with negative sign
        assert_eq!(slice.counting_function(-3.0).unwrap(), -3);
        assert_eq!(slice.counting_function(4.0).unwrap(), 4);
    }

    #[test]
    fn counting_is_nondecreasing_and_steps_at_elements() {
        let g = IrrationalAlpha::golden();
        let s = parse_set("I:0,a", &g).unwrap();
        let slice = lambda_slice(&g, &s, -20, 20).unwrap();
        let mut prev = slice.counting_function(-20.0).unwrap();
        for k in -19..=20 {
            let cur = slice.counting_function(k as f64).unwrap();
            assert!(cur >= prev);
            let is_elem = slice.elements.contains(&(k - 1));
            assert_eq!(cur - prev, if is_elem { 1 } else { 0 });
            prev = cur;
        }
    }

    #[test]
    fn density_of_circle_and_empty() {
        let g = IrrationalAlpha::golden();
        let circle = MultibandSet::circle(&g, Closure::LeftSemiClosed);
        let slice = lambda_slice(&g, &circle, 0, 1000).unwrap();
        for (_, dminus, dplus) in slice.density_profile(&[10, 100, 500]) {
            assert_eq!(dminus, 1.0);
            assert_eq!(dplus, 1.0);
        }

        let empty = MultibandSet::empty(Closure::LeftSemiClosed);
        let slice = lambda_slice(&g, &empty, 0, 1000).unwrap();
        for (_, dminus, dplus) in slice.density_profile(&[10, 100]) {
            assert_eq!(dminus, 0.0);
            assert_eq!(dplus, 0.0);
        }
    }

    #[test]
    fn density_approaches_interval_length() {
        let g = IrrationalAlpha::golden();
        let s = parse_set("I:0,a", &g).unwrap();
        let slice = lambda_slice(&g, &s, 0, 100_000).unwrap();
        let rows = slice.density_profile(&[10_000]);
        let (_, dminus, dplus) = rows[0];
        assert!((dminus - g.value()).abs() < 1e-3);
        assert!((dplus - g.value()).abs() < 1e-3);
        assert!(dminus <= s.measure() && s.measure() <= dplus);
    }

    #[test]
    fn float_mode_flags_boundary_grazing() {
        let a = IrrationalAlpha::parse("0.618033988749894848204586834366").unwrap();
        // right endpoint exactly on an orbit point: {1·α} = α
        let s = parse_set(&format!("I:0,{:.30}", a.value()), &a).unwrap();
        let slice = lambda_slice(&a, &s, 0, 100).unwrap();
        assert!(slice.boundary_warnings.contains(&1));
    }

    #[test]
    fn csv_export_shape() {
        let g = IrrationalAlpha::golden();
        let s = parse_set("I:0,0.5", &g).unwrap();
        let slice = lambda_slice(&g, &s, 0, 5).unwrap();
        let mut buf = Vec::new();
        slice.export_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,frac,in_s,boundary_flag");
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("0,0,1,"));
    }
}
