//! The permanence measure 1 - W (probability inside a window of half-width
//! N0), focusing detection, and the critical-size transition scan.

use alloc::vec::Vec;

use crate::automaton;
use crate::error::Error;
use crate::lattice::LatticeField;
use crate::tightbinding;

/// 1 - W sampled over a time grid for fixed window N0 and packet size N.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSeries {
    pub n0: u32,
    pub n_half: u32,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// Outcome of focusing detection on one measure series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocusingVerdict {
    pub focusing: bool,
    /// Peak time, refined by parabolic interpolation; absent when not focusing.
    pub t_peak: Option<f64>,
    /// The (refined) peak value of the series.
    pub peak_value: f64,
    /// Peak relative to the t = 0 value.
    pub normalized_peak: f64,
}

/// Relative margin by which an interior maximum must exceed the start
/// value to count as focusing.
pub const FOCUS_EPSILON: f64 = 1e-6;

/// Probability inside |n| <= n0. Callers feeding non-unitary automaton
/// fields must pre-normalize.
pub fn permanence(field: &LatticeField, n0: u32) -> f64 {
    let mut sum = 0.0;
    for n in -(n0 as i64)..=n0 as i64 {
        sum += field.amp(n).norm_sqr();
    }
    sum
}

/// The square-packet tight-binding measure series 1 - W(t).
pub fn measure_series(n_half: u32, n0: u32, lambda: f64, times: &[f64]) -> MeasureSeries {
    let initial = LatticeField::square_packet(n_half);
    let values = times
        .iter()
        .map(|&t| permanence(&tightbinding::propagate(&initial, lambda, t), n0))
        .collect();
    MeasureSeries { n0, n_half, times: times.to_vec(), values }
}

/// Default uniform time grid for a packet of half-width N: 400 points on
/// [0, 3 * 1.2 * 0.026 * (2N+1)^2], wide enough that the focus is interior
/// under either sign convention of the effective mass.
pub fn default_time_grid(n_half: u32, lambda: f64, points: usize) -> Vec<f64> {
    let width = (2 * n_half as i64 + 1) as f64;
    let t_max = 3.0 * 1.2 * 0.026 * width * width / libm::fabs(lambda);
    uniform_grid(t_max, points)
}

/// `points` uniform samples on [0, t_max], endpoints included.
pub fn uniform_grid(t_max: f64, points: usize) -> Vec<f64> {
    debug_assert!(points >= 2);
    (0..points)
        .map(|i| t_max * i as f64 / (points - 1) as f64)
        .collect()
}

/// Focusing iff the series has an interior maximum exceeding values[0] by
/// the relative margin `FOCUS_EPSILON`. The peak is refined by parabolic
/// interpolation through the three samples around the discrete argmax;
/// ties within the margin resolve to the earliest (the first contraction
/// event).
pub fn detect_focusing(series: &MeasureSeries) -> Result<FocusingVerdict, Error> {
    detect_on_values(&series.times, &series.values)
}

fn detect_on_values(times: &[f64], values: &[f64]) -> Result<FocusingVerdict, Error> {
    if values.len() < 3 {
        return Err(Error::TooFewSamples);
    }
    let v0 = values[0];
    // earliest interior argmax among values tied within the relative margin
    let mut best = 1usize;
    for i in 2..values.len() - 1 {
        if values[i] > values[best] * (1.0 + FOCUS_EPSILON) {
            best = i;
        }
    }
    let interior_max = values[best];
    let focusing = interior_max > v0 * (1.0 + FOCUS_EPSILON);
    if !focusing {
        return Ok(FocusingVerdict {
            focusing: false,
            t_peak: None,
            peak_value: interior_max,
            normalized_peak: if v0 > 0.0 { interior_max / v0 } else { f64::NAN },
        });
    }
    let (t_peak, peak_value) = refine_parabolic(times, values, best);
    Ok(FocusingVerdict {
        focusing: true,
        t_peak: Some(t_peak),
        peak_value,
        normalized_peak: if v0 > 0.0 { peak_value / v0 } else { f64::NAN },
    })
}

fn refine_parabolic(times: &[f64], values: &[f64], i: usize) -> (f64, f64) {
    let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
    let denom = y0 - 2.0 * y1 + y2;
    if denom >= 0.0 {
        return (times[i], y1);
    }
    let shift = 0.5 * (y0 - y2) / denom; // in grid-step units
    if !(-1.0..=1.0).contains(&shift) {
        // not a genuine local maximum (e.g. a rising edge); don't extrapolate
        return (times[i], y1);
    }
    let h = 0.5 * (times[i + 1] - times[i - 1]);
    let t = times[i] + shift * h;
    let v = y1 - 0.25 * (y0 - y2) * shift;
    (t, v)
}

/// Focusing with an expansion requirement: the interior maximum must also
/// give back at least `giveback` of its rise by the end of the window
/// (contraction followed by expansion). Used for the non-unitary automaton
/// where late-time gain otherwise masquerades as focusing.
pub fn detect_focusing_with_expansion(
    series: &MeasureSeries,
    giveback: f64,
) -> Result<FocusingVerdict, Error> {
    let verdict = detect_on_values(&series.times, &series.values)?;
    if !verdict.focusing {
        return Ok(verdict);
    }
    let v0 = series.values[0];
    let peak = verdict.peak_value;
    let last = *series.values.last().unwrap();
    let expanded = last < peak - giveback * (peak - v0);
    if expanded {
        Ok(verdict)
    } else {
        Ok(FocusingVerdict { focusing: false, t_peak: None, ..verdict })
    }
}

/// Per-time-normalized central share of the automaton square packet:
/// the intensity profile is normalized to unit sum at each step before
/// applying the permanence window, removing the global non-unitary growth.
pub fn automaton_measure_series(n_half: u32, delta: f64, tau_max: u32, n0: u32) -> MeasureSeries {
    let grid = automaton::evolve_square(n_half, delta, tau_max);
    let values = (0..grid.rows.len())
        .map(|r| grid.window_sum(r, n0) / grid.row_total(r))
        .collect();
    MeasureSeries { n0, n_half, times: grid.times.clone(), values }
}

/// Fraction of the rise that must be given back by the window end for the
/// automaton verdict (contraction-then-expansion requirement).
pub const AUTOMATON_GIVEBACK: f64 = 0.5;

/// Focusing classification of the automaton square packet on the
/// normalized intensity profile.
pub fn automaton_focusing(
    n_half: u32,
    delta: f64,
    tau_max: u32,
    n0: u32,
) -> Result<FocusingVerdict, Error> {
    let series = automaton_measure_series(n_half, delta, tau_max, n0);
    detect_focusing_with_expansion(&series, AUTOMATON_GIVEBACK)
}

/// One row of a transition scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanEntry {
    pub n_half: u32,
    pub t_peak: Option<f64>,
    pub normalized_peak: f64,
    pub focusing: bool,
}

/// Result of a transition scan over packet sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome {
    pub entries: Vec<ScanEntry>,
    /// The transition size: the last N below the terminal plateau of
    /// normalized peaks. None when the scan is inconclusive.
    pub critical_n: Option<u32>,
    /// Human-readable reason when critical_n is None.
    pub inconclusive_reason: Option<&'static str>,
}

/// Relative half-width of the plateau band.
pub const PLATEAU_TOLERANCE: f64 = 0.01;
/// Minimum number of scan points required on the plateau.
pub const PLATEAU_MIN_MEMBERS: usize = 3;

/// Scan packet sizes at fixed window N0 and report, per N, the normalized
/// peak of [1-W(t)]/[1-W(0)] together with the transition size.
///
/// The plateau is the longest terminal run (at least three members) of
/// sizes whose normalized peaks all lie within 1% of their median; the
/// critical N is the last size before that run begins. If no such run
/// exists, or the run covers the whole range (the transition lies below
/// it), the scan is inconclusive.
pub fn transition_scan(
    n_range: &[u32],
    n0: u32,
    lambda: f64,
    times: &[f64],
) -> ScanOutcome {
    let entries: Vec<ScanEntry> = n_range
        .iter()
        .map(|&n| {
            let series = measure_series(n, n0, lambda, times);
            let verdict = detect_focusing(&series).expect("scan grids have >= 3 samples");
            ScanEntry {
                n_half: n,
                t_peak: verdict.t_peak,
                normalized_peak: verdict.normalized_peak,
                focusing: verdict.focusing,
            }
        })
        .collect();

    let (critical_n, inconclusive_reason) = locate_transition(&entries);
    ScanOutcome { entries, critical_n, inconclusive_reason }
}

/// Plateau-onset rule shared by the scan and its tests.
pub fn locate_transition(entries: &[ScanEntry]) -> (Option<u32>, Option<&'static str>) {
    let len = entries.len();
    if len < PLATEAU_MIN_MEMBERS + 1 {
        return (None, Some("range too small to establish a plateau"));
    }
    // smallest start index whose suffix (>= 3 members, all focusing) has
    // every normalized peak within the tolerance band around the median
    let mut onset: Option<usize> = None;
    for start in 0..=len - PLATEAU_MIN_MEMBERS {
        let suffix = &entries[start..];
        if suffix.iter().any(|e| !e.focusing) {
            continue;
        }
        let mut peaks: Vec<f64> = suffix.iter().map(|e| e.normalized_peak).collect();
        peaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = if peaks.len() % 2 == 1 {
            peaks[peaks.len() / 2]
        } else {
            0.5 * (peaks[peaks.len() / 2 - 1] + peaks[peaks.len() / 2])
        };
        let all_within = suffix
            .iter()
            .all(|e| libm::fabs(e.normalized_peak - median) <= PLATEAU_TOLERANCE * median);
        if all_within {
            onset = Some(start);
            break;
        }
    }
    match onset {
        None => (None, Some("no terminal plateau of normalized peaks")),
        Some(0) => (None, Some("plateau covers the whole range; transition lies below it")),
        Some(s) => (Some(entries[s - 1].n_half), None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permanence_of_initial_square() {
        let f = LatticeField::square_packet(7);
        assert!((permanence(&f, 1) - 0.2).abs() < 1e-15);
        assert!((permanence(&f, 7) - 1.0).abs() < 1e-14);
        assert!((permanence(&f, 20) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn permanence_of_delta_peak_after_evolution() {
        let f = LatticeField::delta_peak(0);
        let g = tightbinding::propagate(&f, 1.0, 2.0);
        let expected = crate::numerics::bessel_j(0, 2.0).unwrap().powi(2);
        assert!((permanence(&g, 0) - expected).abs() < 1e-14);
    }

    #[test]
    fn monotone_in_window_width() {
        let g = tightbinding::propagate(&LatticeField::square_packet(5), 1.0, 4.0);
        let mut prev = 0.0;
        for n0 in 0..30 {
            let w = permanence(&g, n0);
            assert!(w >= prev - 1e-15);
            prev = w;
        }
        assert!((prev - g.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn series_start_value() {
        let times = uniform_grid(5.0, 50);
        let s = measure_series(7, 1, 1.0, &times);
        assert!((s.values[0] - 3.0 / 15.0).abs() < 1e-15);
        let s = measure_series(2, 5, 1.0, &times);
        assert!((s.values[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constant_series_is_not_focusing() {
        let s = MeasureSeries {
            n0: 1,
            n_half: 1,
            times: vec![0.0, 1.0, 2.0, 3.0],
            values: vec![0.5, 0.5, 0.5, 0.5],
        };
        let v = detect_focusing(&s).unwrap();
        assert!(!v.focusing);
        assert!(v.t_peak.is_none());
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let s = MeasureSeries { n0: 1, n_half: 1, times: vec![0.0, 1.0], values: vec![0.5, 0.4] };
        assert_eq!(detect_focusing(&s), Err(Error::TooFewSamples));
    }

    #[test]
    fn detector_is_scale_invariant() {
        let times = default_time_grid(7, 1.0, 400);
        let mut s = measure_series(7, 1, 1.0, &times);
        let a = detect_focusing(&s).unwrap();
        for v in &mut s.values {
            *v *= 3.5;
        }
        let b = detect_focusing(&s).unwrap();
        assert_eq!(a.focusing, b.focusing);
        assert!((a.normalized_peak - b.normalized_peak).abs() < 1e-12);
    }

    #[test]
    fn tb_n7_focuses_and_n1_does_not() {
        let times = default_time_grid(7, 1.0, 400);
        let v7 = detect_focusing(&measure_series(7, 1, 1.0, &times)).unwrap();
        assert!(v7.focusing);
        let t_peak = v7.t_peak.unwrap();
        assert!(t_peak > 10.0 && t_peak < 14.0, "t_peak={t_peak}");

        let times1 = default_time_grid(1, 1.0, 400);
        let v1 = detect_focusing(&measure_series(1, 1, 1.0, &times1)).unwrap();
        assert!(!v1.focusing);
    }

    #[test]
    fn measure_series_n0_5_red_and_green_regimes() {
        let times = default_time_grid(7, 1.0, 400);
        // N = 7, N0 = 5: rises to an interior maximum (red curve)
        let red = detect_focusing(&measure_series(7, 5, 1.0, &times)).unwrap();
        assert!(red.focusing);
        // N = 3 < N0 = 5: window swallows the packet, monotone decay (green)
        let times3 = default_time_grid(3, 1.0, 400);
        let green = detect_focusing(&measure_series(3, 5, 1.0, &times3)).unwrap();
        assert!(!green.focusing);
    }

    #[test]
    fn automaton_series_values_are_normalized_shares() {
        let s = automaton_measure_series(7, 0.05, 10, 1);
        assert!((s.values[0] - 0.2).abs() < 1e-14);
        assert!(s.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn scan_with_tiny_range_is_inconclusive() {
        let times = default_time_grid(3, 1.0, 200);
        let out = transition_scan(&[1, 2, 3], 1, 1.0, &times);
        assert_eq!(out.critical_n, None);
        assert!(out.inconclusive_reason.is_some());
    }
}

#[cfg(test)]
mod tail_tests {
    use super::*;

    #[test]
    fn single_point_series_is_the_start_value() {
        let s = measure_series(7, 1, 1.0, &[0.0]);
        assert_eq!(s.values.len(), 1);
        assert!((s.values[0] - 3.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn long_time_tail_decays() {
        // the center empties ballistically (~1/t with the slow-mode
        // prefactor of the square packet's narrow momentum spread)
        let s = measure_series(7, 1, 1.0, &[0.0, 60.0, 100.0, 250.0]);
        assert!(s.values[3] < s.values[2] && s.values[2] < s.values[1]);
        assert!(
            s.values[3] < 0.2 * s.values[0],
            "tail {} vs start {}",
            s.values[3],
            s.values[0]
        );
    }
}
