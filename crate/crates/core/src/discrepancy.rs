//! Discrepancy sequences D(n,S) = ν(n,S) − n·mes S of the irrational
//! rotation, sliding-window BMO statistics, and the bounded-vs-BMO
//! dichotomy report.

use crate::dd::{CompensatedSum, Dd};
use crate::diophantine::{membership_z_alpha_z, IrrationalAlpha, LatticeElement, TorusPoint};
use crate::quasicrystal::BOUNDARY_GRAZE;
use crate::torus_sets::MultibandSet;

/// Default search bound and tolerance for ℤα+ℤ certificates.
pub const M_BOUND_DEFAULT: i64 = 10_000;
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// ν(n,S): hits of the orbit {base + kα}, 0 ≤ k ≤ n−1, in S.
pub fn hit_count(alpha: &IrrationalAlpha, set: &MultibandSet, n: usize, base: &TorusPoint) -> i64 {
    let step = alpha.as_real();
    let mut point = *base;
    let mut hits = 0i64;
    for _ in 0..n {
        if set.contains(&point) {
            hits += 1;
        }
        point = point.add_real(&step);
    }
    hits
}

/// D(n) for n = 1..=N, with exact hit counts retained alongside.
#[derive(Clone, Debug)]
pub struct DiscrepancySeries {
    pub alpha: IrrationalAlpha,
    pub set: MultibandSet,
    pub base: TorusPoint,
    /// D(n), index i holds D(i+1).
    pub values: Vec<f64>,
    /// ν(n), index i holds ν(i+1).
    pub hits: Vec<i64>,
    /// Float mode: steps k whose orbit point grazed a set boundary, so the
    /// reported D(n) carries a ± uncertainty of the number of flags ≤ n−1.
    pub boundary_flags: Vec<i64>,
}

/// One-pass computation of the discrepancy trajectory.
pub fn discrepancy_series(
    alpha: &IrrationalAlpha,
    set: &MultibandSet,
    n_max: usize,
    base: &TorusPoint,
) -> DiscrepancySeries {
    let mes = set.measure_real().dd();
    let step = alpha.as_real();
    let check_boundaries = !alpha.is_exact();
    let endpoints = if check_boundaries {
        set.endpoint_points()
    } else {
        Vec::new()
    };
    let mut point = *base;
    let mut cum_hits = 0i64;
    let mut n_mes = Dd::ZERO;
    let mut values = Vec::with_capacity(n_max);
    let mut hits = Vec::with_capacity(n_max);
    let mut boundary_flags = Vec::new();
    for k in 0..n_max as i64 {
        if set.contains(&point) {
            cum_hits += 1;
        }
        if check_boundaries
            && endpoints
                .iter()
                .any(|e| point.circle_dist_f64(e) < BOUNDARY_GRAZE)
        {
            boundary_flags.push(k);
        }
        n_mes = n_mes + mes;
        values.push((Dd::from_f64(cum_hits as f64) - n_mes).to_f64());
        hits.push(cum_hits);
        point = point.add_real(&step);
    }
    DiscrepancySeries {
        alpha: alpha.clone(),
        set: set.clone(),
        base: *base,
        values,
        hits,
        boundary_flags,
    }
}

impl DiscrepancySeries {
    pub fn n_max(&self) -> usize {
        self.values.len()
    }

    pub fn sup_abs(&self, n: usize) -> f64 {
        self.values[..n.min(self.values.len())]
            .iter()
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// CSV export: columns n, D.
    pub fn export_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,d")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", i + 1, v)?;
        }
        Ok(())
    }
}

/// Window family over which mean oscillations are maximized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowFamily {
    /// All windows [j·2^k, (j+1)·2^k) plus the trailing partial block at
    /// each scale; O(N log N) work.
    AllDyadic,
    /// Every window; O(N² log N) work, meant for N ≤ 2^13.
    Exhaustive,
}

/// Sliding-window mean-oscillation statistics of a sequence.
#[derive(Clone, Copy, Debug)]
pub struct BmoReport {
    /// max over windows of (1/|W|) Σ |c_k − mean|
    pub l1_norm: f64,
    /// max over windows of sqrt((1/|W|) Σ |c_k − mean|²)
    pub l2_norm: f64,
    /// argmax window for the ℓ² statistic, 1-based half-open (n, m).
    pub worst_window: (usize, usize),
    pub family: WindowFamily,
    pub n: usize,
}

struct WindowBest {
    value: f64,
    start: usize,
    end: usize,
}

impl WindowBest {
    fn new() -> Self {
        WindowBest {
            value: -1.0,
            start: 0,
            end: 0,
        }
    }

    fn offer(&mut self, value: f64, start: usize, end: usize) {
        let better = value > self.value
            || (value == self.value
                && (start < self.start
                    || (start == self.start && end - start < self.end - self.start)));
        if better {
            self.value = value;
            self.start = start;
            self.end = end;
        }
    }
}

/// Mean-oscillation statistics of `values` over the given window family.
pub fn bmo_statistic(values: &[f64], family: WindowFamily) -> BmoReport {
    match family {
        WindowFamily::AllDyadic => bmo_dyadic(values),
        WindowFamily::Exhaustive => bmo_exhaustive(values),
    }
}

fn window_oscillation(window: &[f64]) -> (f64, f64) {
    let len = window.len() as f64;
    let mut sum = CompensatedSum::new();
    for &v in window {
        sum.add(v);
    }
    let mean = sum.value() / len;
    let mut abs_dev = CompensatedSum::new();
    let mut sq_dev = CompensatedSum::new();
    for &v in window {
        let d = v - mean;
        abs_dev.add(d.abs());
        sq_dev.add(d * d);
    }
    (abs_dev.value() / len, (sq_dev.value() / len).sqrt())
}

fn bmo_dyadic(values: &[f64]) -> BmoReport {
    let n = values.len();
    let mut l1 = 0.0f64;
    let mut best2 = WindowBest::new();
    let mut step = 1usize;
    loop {
        let mut start = 0usize;
        while start < n {
            let end = (start + step).min(n);
            let (o1, o2) = window_oscillation(&values[start..end]);
            l1 = l1.max(o1);
            best2.offer(o2, start, end);
            start += step;
        }
        if step >= n {
            break;
        }
        step *= 2;
    }
    BmoReport {
        l1_norm: l1,
        l2_norm: best2.value.max(0.0),
        worst_window: (best2.start + 1, best2.end + 1),
        family: WindowFamily::AllDyadic,
        n,
    }
}

/// Fenwick tree over value ranks holding counts and sums, used to answer
/// Σ|c − μ| queries per window in O(log N).
struct RankFenwick {
    cnt: Vec<i64>,
    sum: Vec<f64>,
}

impl RankFenwick {
    fn new(n: usize) -> Self {
        RankFenwick {
            cnt: vec![0; n + 1],
            sum: vec![0.0; n + 1],
        }
    }

    fn clear(&mut self) {
        self.cnt.fill(0);
        self.sum.fill(0.0);
    }

    fn update(&mut self, rank: usize, cnt: i64, value: f64) {
        let mut i = rank + 1;
        while i < self.cnt.len() {
            self.cnt[i] += cnt;
            self.sum[i] += value;
            i += i & i.wrapping_neg();
        }
    }

    /// (count, sum) over ranks < `rank`.
    fn prefix(&self, rank: usize) -> (i64, f64) {
        let mut i = rank;
        let (mut c, mut s) = (0i64, 0.0f64);
        while i > 0 {
            c += self.cnt[i];
            s += self.sum[i];
            i -= i & i.wrapping_neg();
        }
        (c, s)
    }
}

fn bmo_exhaustive(values: &[f64]) -> BmoReport {
    let n = values.len();
    // prefix sums for the ℓ² statistic
    let mut pre1 = Vec::with_capacity(n + 1);
    let mut pre2 = Vec::with_capacity(n + 1);
    let (mut s1, mut s2) = (CompensatedSum::new(), CompensatedSum::new());
    pre1.push(0.0);
    pre2.push(0.0);
    for &v in values {
        s1.add(v);
        s2.add(v * v);
        pre1.push(s1.value());
        pre2.push(s2.value());
    }
    // value ranks for the ℓ¹ statistic
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.dedup();
    let rank_of = |v: f64| sorted.partition_point(|&s| s < v);

    let mut l1 = 0.0f64;
    let mut best2 = WindowBest::new();
    let mut fen = RankFenwick::new(sorted.len());
    for start in 0..n {
        // a fresh tree per start keeps float drift from repeated
        // insert/remove cycles out of the sums
        fen.clear();
        for end in start + 1..=n {
            let v = values[end - 1];
            fen.update(rank_of(v), 1, v);
            let len = (end - start) as f64;
            let wsum = pre1[end] - pre1[start];
            let mean = wsum / len;
            // ℓ²
            let sq = ((pre2[end] - pre2[start]) - wsum * wsum / len).max(0.0);
            best2.offer((sq / len).sqrt(), start, end);
            // ℓ¹ via the rank tree: elements below / at-or-above the mean
            let (c_lt, s_lt) = fen.prefix(rank_of(mean));
            let c_ge = (end - start) as i64 - c_lt;
            let s_ge = wsum - s_lt;
            let abs_sum = (mean * c_lt as f64 - s_lt) + (s_ge - mean * c_ge as f64);
            l1 = l1.max(abs_sum / len);
        }
    }
    BmoReport {
        l1_norm: l1,
        l2_norm: best2.value.max(0.0),
        worst_window: (best2.start + 1, best2.end + 1),
        family: WindowFamily::Exhaustive,
        n,
    }
}

/// Verdict of the dichotomy experiment. The verdict restates the
/// certificate; it is not a numerical claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DichotomyVerdict {
    /// |I| ∈ ℤα+ℤ certified: bounded discrepancy predicted.
    BoundedPredicted,
    /// No certificate within the search bound: BMO divergence predicted.
    UnboundedBmoPredicted,
}

#[derive(Clone, Debug)]
pub struct DichotomyRow {
    pub n: usize,
    pub sup_abs_d: f64,
    pub bmo: BmoReport,
}

#[derive(Clone, Debug)]
pub struct DichotomyReport {
    pub certificate: Option<LatticeElement>,
    pub rows: Vec<DichotomyRow>,
    pub verdict: DichotomyVerdict,
    pub boundary_flag_count: usize,
}

/// Bundle membership of mes S, sup|D| and BMO statistics per window size.
pub fn dichotomy_report(
    alpha: &IrrationalAlpha,
    set: &MultibandSet,
    n_list: &[usize],
) -> DichotomyReport {
    let n_max = n_list.iter().copied().max().unwrap_or(0);
    let series = discrepancy_series(alpha, set, n_max, &TorusPoint::zero());
    dichotomy_report_from_series(&series, n_list)
}

/// Same bundle, reusing an already-computed series.
pub fn dichotomy_report_from_series(
    series: &DiscrepancySeries,
    n_list: &[usize],
) -> DichotomyReport {
    dichotomy_report_with(series, n_list, M_BOUND_DEFAULT, MEMBERSHIP_TOL)
}

/// Same bundle with an explicit certificate search bound and tolerance.
pub fn dichotomy_report_with(
    series: &DiscrepancySeries,
    n_list: &[usize],
    m_bound: i64,
    tol: f64,
) -> DichotomyReport {
    let (alpha, set) = (&series.alpha, &series.set);
    let certificate = measure_certificate_with(alpha, set, m_bound, tol);
    let rows = n_list
        .iter()
        .map(|&n| DichotomyRow {
            n,
            sup_abs_d: series.sup_abs(n),
            bmo: bmo_statistic(&series.values[..n], WindowFamily::AllDyadic),
        })
        .collect();
    let verdict = if certificate.is_some() {
        DichotomyVerdict::BoundedPredicted
    } else {
        DichotomyVerdict::UnboundedBmoPredicted
    };
    DichotomyReport {
        certificate,
        verdict,
        rows,
        boundary_flag_count: series.boundary_flags.len(),
    }
}

/// Certificate that mes S ∈ ℤα+ℤ: smallest-|m| search first, composed
/// interval certificates as a fallback beyond the search bound.
pub fn measure_certificate(alpha: &IrrationalAlpha, set: &MultibandSet) -> Option<LatticeElement> {
    measure_certificate_with(alpha, set, M_BOUND_DEFAULT, MEMBERSHIP_TOL)
}

pub fn measure_certificate_with(
    alpha: &IrrationalAlpha,
    set: &MultibandSet,
    m_bound: i64,
    tol: f64,
) -> Option<LatticeElement> {
    let mes = set.measure_real();
    if mes.cmp_f64(1.0) == std::cmp::Ordering::Equal {
        return Some(LatticeElement::new(0, 1, alpha));
    }
    if mes.cmp_f64(0.0) == std::cmp::Ordering::Equal {
        return Some(LatticeElement::new(0, 0, alpha));
    }
    let pt = TorusPoint::from_real(mes);
    if let Some(el) = membership_z_alpha_z(&pt, alpha, m_bound, tol) {
        return Some(el);
    }
    // compose from per-interval certificates when every term carries one
    let mut m_total = 0i64;
    let mut n_total = 0i64;
    for (c, iv) in set.terms() {
        let el = iv.certificate()?;
        m_total = m_total.checked_add(c.checked_mul(el.m)?)?;
        n_total = n_total.checked_add(c.checked_mul(el.n)?)?;
    }
    Some(LatticeElement::new(m_total, n_total, alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus_sets::{parse_set, Closure};
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn hit_count_examples() {
        let g = IrrationalAlpha::golden();
        let circle = MultibandSet::circle(&g, Closure::LeftSemiClosed);
        let zero = TorusPoint::zero();
        assert_eq!(hit_count(&g, &circle, 0, &zero), 0);
        assert_eq!(hit_count(&g, &circle, 17, &zero), 17);
        let half = parse_set("I:0,0.5", &g).unwrap();
        assert_eq!(hit_count(&g, &half, 10, &zero), 5);
    }

    #[test]
    fn circle_series_is_zero() {
        let g = IrrationalAlpha::golden();
        let circle = MultibandSet::circle(&g, Closure::LeftSemiClosed);
        let s = discrepancy_series(&g, &circle, 100, &TorusPoint::zero());
        assert!(s.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn golden_interval_first_value_and_closed_form() {
        let g = IrrationalAlpha::golden();
        let set = parse_set("I:0,a", &g).unwrap();
        let s = discrepancy_series(&g, &set, 10_000, &TorusPoint::zero());
        let a = g.value();
        assert!((s.values[0] - (1.0 - a)).abs() < 1e-14);
        // Hecke closed form: D(n) = (1−α) − {(n−1)α}, brute-forced here
        for n in 1..=10_000usize {
            let frac = crate::diophantine::frac_multiple(&g, n as i64 - 1)
                .unwrap()
                .value();
            let closed = (1.0 - a) - frac;
            assert!(
                (s.values[n - 1] - closed).abs() < 1e-11,
                "closed form at n={n}"
            );
        }
        assert!(s.sup_abs(10_000) < 1.0);
    }

    #[test]
    fn telescoping_matches_direct_counts() {
        let g = IrrationalAlpha::golden();
        let set = parse_set("C:(1)0,3a+(-1)0.1,1a", &g).unwrap();
        let s = discrepancy_series(&g, &set, 2_000, &TorusPoint::zero());
        let mes = set.measure();
        for n in [1usize, 2, 17, 100, 999, 2_000] {
            let direct = hit_count(&g, &set, n, &TorusPoint::zero());
            assert_eq!(s.hits[n - 1], direct);
            let reconstructed = (s.values[n - 1] + n as f64 * mes).round() as i64;
            assert_eq!(reconstructed, direct);
        }
        // telescoping increments
        for n in 1..s.values.len() {
            let inc = s.hits[n] - s.hits[n - 1];
            assert!(inc == 0 || inc == 1);
            assert!(s.values[n].abs() <= (n + 1) as f64);
        }
    }

    #[test]
    fn bmo_constant_and_alternating() {
        let constant = vec![3.25; 257];
        let r = bmo_statistic(&constant, WindowFamily::AllDyadic);
        assert_eq!(r.l1_norm, 0.0);
        assert_eq!(r.l2_norm, 0.0);

        let alt: Vec<f64> = (0..256)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let r = bmo_statistic(&alt, WindowFamily::AllDyadic);
        assert!((r.l1_norm - 1.0).abs() < 1e-12);
        assert!((r.l2_norm - 1.0).abs() < 1e-12);
        let r = bmo_statistic(&alt, WindowFamily::Exhaustive);
        assert!((r.l1_norm - 1.0).abs() < 1e-12);
        assert!((r.l2_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn worst_window_ties_resolve_earliest_then_shortest() {
        let constant = vec![2.0; 37];
        for family in [WindowFamily::AllDyadic, WindowFamily::Exhaustive] {
            let r = bmo_statistic(&constant, family);
            assert_eq!(r.worst_window, (1, 2), "{family:?}");
        }
        // a single spike: the argmax ℓ² window is the shortest one
        // containing contrast, and must be reported deterministically
        let mut spiked = vec![0.0; 64];
        spiked[10] = 8.0;
        let a = bmo_statistic(&spiked, WindowFamily::Exhaustive);
        let b = bmo_statistic(&spiked, WindowFamily::Exhaustive);
        assert_eq!(a.worst_window, b.worst_window);
        assert!((a.l2_norm - b.l2_norm).abs() == 0.0);
    }

    #[test]
    fn bmo_families_agree_on_dyadic_windows() {
        // exhaustive must dominate dyadic, and both obey l1 ≤ l2 ≤ 2·sup
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(2..200);
            let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let dy = bmo_statistic(&vals, WindowFamily::AllDyadic);
            let ex = bmo_statistic(&vals, WindowFamily::Exhaustive);
            let sup = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            for r in [&dy, &ex] {
                // two computation paths of the same max can differ by
                // rounding, hence the relative slack
                assert!(
                    r.l1_norm <= r.l2_norm * (1.0 + 1e-10) + 1e-12,
                    "Cauchy-Schwarz: {} vs {}",
                    r.l1_norm,
                    r.l2_norm
                );
                assert!(r.l2_norm <= 2.0 * sup + 1e-12);
            }
            assert!(ex.l1_norm >= dy.l1_norm - 1e-12);
            assert!(ex.l2_norm >= dy.l2_norm - 1e-12);
        }
    }

    #[test]
    fn bmo_exhaustive_l1_matches_naive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 60;
        let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let ex = bmo_statistic(&vals, WindowFamily::Exhaustive);
        let mut naive_l1 = 0.0f64;
        let mut naive_l2 = 0.0f64;
        for s in 0..n {
            for e in s + 1..=n {
                let w = &vals[s..e];
                let mean: f64 = w.iter().sum::<f64>() / w.len() as f64;
                let a: f64 = w.iter().map(|v| (v - mean).abs()).sum::<f64>() / w.len() as f64;
                let q: f64 = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / w.len() as f64;
                naive_l1 = naive_l1.max(a);
                naive_l2 = naive_l2.max(q.sqrt());
            }
        }
        assert!((ex.l1_norm - naive_l1).abs() < 1e-10);
        assert!((ex.l2_norm - naive_l2).abs() < 1e-10);
    }

    #[test]
    fn kesten_direction_half_interval_grows() {
        let g = IrrationalAlpha::golden();
        let set = parse_set("I:0,0.5", &g).unwrap();
        let s = discrepancy_series(&g, &set, 1 << 16, &TorusPoint::zero());
        let small = bmo_statistic(&s.values[..1 << 10], WindowFamily::AllDyadic);
        let large = bmo_statistic(&s.values, WindowFamily::AllDyadic);
        assert!(
            large.l2_norm > small.l2_norm,
            "ℓ² BMO must grow: {} vs {}",
            large.l2_norm,
            small.l2_norm
        );
    }

    #[test]
    fn dichotomy_report_certificates() {
        let g = IrrationalAlpha::golden();

        let bounded = parse_set("I:0,a", &g).unwrap();
        let rep = dichotomy_report(&g, &bounded, &[1_000, 10_000]);
        assert_eq!(rep.verdict, DichotomyVerdict::BoundedPredicted);
        let cert = rep.certificate.unwrap();
        assert_eq!((cert.m, cert.n), (1, 0));
        assert!(rep.rows.iter().all(|r| r.sup_abs_d < 1.0));
        assert!(rep.rows[1].sup_abs_d >= rep.rows[0].sup_abs_d - 1e-15);

        let two_alpha = parse_set("I:0,2a", &g).unwrap();
        let rep = dichotomy_report(&g, &two_alpha, &[10_000]);
        let cert = rep.certificate.unwrap();
        assert_eq!((cert.m, cert.n), (2, -1));
        assert!(rep.rows[0].sup_abs_d < 2.0);

        let half = parse_set("I:0,0.5", &g).unwrap();
        let rep = dichotomy_report(&g, &half, &[4_096]);
        assert_eq!(rep.verdict, DichotomyVerdict::UnboundedBmoPredicted);
        assert!(rep.certificate.is_none());
    }
}
