//! Shared state types: a complex field with finite support on the integer
//! lattice, and an intensity grid over (site, time).

use alloc::vec;
use alloc::vec::Vec;

use crate::Complex;

/// Complex amplitude per integer site at one instant.
///
/// `offset` is the site index of the first stored amplitude; everything
/// outside the stored window is implicitly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeField {
    offset: i64,
    amplitudes: Vec<Complex>,
}

impl LatticeField {
    pub fn new(offset: i64, amplitudes: Vec<Complex>) -> Self {
        debug_assert!(amplitudes.iter().all(|a| a.re.is_finite() && a.im.is_finite()));
        Self { offset, amplitudes }
    }

    /// Unit amplitude on a single site.
    pub fn delta_peak(site: i64) -> Self {
        Self::new(site, vec![Complex::new(1.0, 0.0)])
    }

    /// Normalized square packet: 1/sqrt(2N+1) on |n| <= N, zero elsewhere.
    pub fn square_packet(n_half: u32) -> Self {
        let width = 2 * n_half as usize + 1;
        let amp = Complex::new(1.0 / libm::sqrt(width as f64), 0.0);
        Self::new(-(n_half as i64), vec![amp; width])
    }

    /// Site index of the first stored amplitude.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Inclusive support bounds (first, last); first > last never occurs
    /// for non-empty fields.
    pub fn support(&self) -> (i64, i64) {
        (self.offset, self.offset + self.amplitudes.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Amplitude at an arbitrary site (zero outside the stored window).
    pub fn amp(&self, site: i64) -> Complex {
        let idx = site - self.offset;
        if idx < 0 || idx >= self.amplitudes.len() as i64 {
            Complex::new(0.0, 0.0)
        } else {
            self.amplitudes[idx as usize]
        }
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex] {
        &mut self.amplitudes
    }

    /// Iterate (site, amplitude) over the stored window.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .map(move |(i, a)| (self.offset + i as i64, *a))
    }

    /// Total probability (sum of |amplitude|^2).
    pub fn norm_sqr(&self) -> f64 {
        // compensated so unitarity tests are not limited by the reduction
        let mut sum = 0.0f64;
        let mut c = 0.0f64;
        for a in &self.amplitudes {
            let term = a.norm_sqr();
            let y = term - c;
            let t = sum + y;
            c = (t - sum) - y;
            sum = t;
        }
        sum
    }

    /// Per-site intensities |amplitude|^2 over the stored window.
    pub fn intensities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Intensity |phi|^2 over a fixed site window and a list of times.
///
/// Row r holds the intensities at `times[r]`; column c is site
/// `offset + c`. The window is common to all rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeGrid {
    pub times: Vec<f64>,
    pub offset: i64,
    pub rows: Vec<Vec<f64>>,
}

impl SpaceTimeGrid {
    pub fn site_count(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.site_count() as i64).map(move |i| self.offset + i)
    }

    /// Intensity at (row index, site), zero outside the window.
    pub fn intensity(&self, row: usize, site: i64) -> f64 {
        let idx = site - self.offset;
        if idx < 0 || idx >= self.site_count() as i64 {
            0.0
        } else {
            self.rows[row][idx as usize]
        }
    }

    /// Sum of intensities in |site| <= n0 for one row.
    pub fn window_sum(&self, row: usize, n0: u32) -> f64 {
        let mut sum = 0.0;
        for site in -(n0 as i64)..=n0 as i64 {
            sum += self.intensity(row, site);
        }
        sum
    }

    /// Total intensity of one row.
    pub fn row_total(&self, row: usize) -> f64 {
        self.rows[row].iter().sum()
    }
}
