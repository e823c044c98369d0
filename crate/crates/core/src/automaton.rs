//! Two-species linear cellular automaton: coupled real populations x, y on
//! a lattice with discrete time,
//!
//!   x' = x + Δ (y_{n+1} + y_{n-1}),
//!   y' = y - Δ (x_{n+1} + x_{n-1}),
//!
//! equivalent under phi = x + i y to the complex one-step map
//!
//!   phi' = phi - i Δ (phi_{n+1} + phi_{n-1}),
//!
//! whose Floquet operator 1 - iΔ(T + T†) is not unitary. The closed-form
//! kernel is a polynomial in Δ evaluated in log-space so that step counts
//! of several hundred stay inside f64 range.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::lattice::{LatticeField, SpaceTimeGrid};
use crate::numerics::LogFactorialTable;
use crate::Complex;

/// Parameters of one automaton run. The lattice is sized so the support,
/// which widens by exactly one site per step, never reaches the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutomatonParams {
    pub delta: f64,
    pub tau_max: u32,
    pub half_width: u32,
}

impl AutomatonParams {
    /// half_width = n_half + tau_max, the exact reach of the evolved field.
    pub fn for_square(n_half: u32, delta: f64, tau_max: u32) -> Result<Self, Error> {
        if !delta.is_finite() {
            return Err(Error::Domain("automaton: delta must be finite"));
        }
        Ok(Self { delta, tau_max, half_width: n_half + tau_max })
    }
}

/// Real species view of a complex field: x = Re phi, y = Im phi.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesPair {
    pub offset: i64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl SpeciesPair {
    pub fn to_field(&self) -> LatticeField {
        let amps = self
            .x
            .iter()
            .zip(&self.y)
            .map(|(&x, &y)| Complex::new(x, y))
            .collect();
        LatticeField::new(self.offset, amps)
    }
}

/// One step of the complex map phi' = phi - iΔ(phi_{n+1} + phi_{n-1}).
/// The support widens by one site on each side.
pub fn step(field: &LatticeField, delta: f64) -> LatticeField {
    let (lo, hi) = field.support();
    let new_lo = lo - 1;
    let new_hi = hi + 1;
    let mut amps = vec![Complex::new(0.0, 0.0); (new_hi - new_lo + 1) as usize];
    for (i, amp) in amps.iter_mut().enumerate() {
        let n = new_lo + i as i64;
        let neighbours = field.amp(n + 1) + field.amp(n - 1);
        *amp = field.amp(n) - Complex::new(0.0, delta) * neighbours;
    }
    LatticeField::new(new_lo, amps)
}

/// Split a complex field into its two real species.
pub fn species_view(field: &LatticeField) -> SpeciesPair {
    SpeciesPair {
        offset: field.offset(),
        x: field.amplitudes().iter().map(|a| a.re).collect(),
        y: field.amplitudes().iter().map(|a| a.im).collect(),
    }
}

/// One step of the real two-species update. Splitting `step` of the
/// combined complex field gives the same result.
pub fn species_step(pair: &SpeciesPair, delta: f64) -> SpeciesPair {
    let field = pair.to_field();
    let lo = field.support().0 - 1;
    let hi = field.support().1 + 1;
    let mut x = Vec::with_capacity((hi - lo + 1) as usize);
    let mut y = Vec::with_capacity((hi - lo + 1) as usize);
    for n in lo..=hi {
        x.push(field.amp(n).re + delta * (field.amp(n + 1).im + field.amp(n - 1).im));
        y.push(field.amp(n).im - delta * (field.amp(n + 1).re + field.amp(n - 1).re));
    }
    SpeciesPair { offset: lo, x, y }
}

/// Closed-form one-to-many kernel K_{tau; d}: the amplitude transported a
/// displacement d in tau steps,
///
///   K_{tau;d} = sum over r with r+d even, |d| <= r <= tau of
///               tau! (-iΔ)^r / ((tau-r)! ((r+d)/2)! ((r-d)/2)!),
///
/// zero for |d| > tau. Terms are accumulated in ascending r with
/// compensated summation; magnitudes are built in log-space.
pub fn kernel(tau: u32, d: i64, delta: f64) -> Complex {
    let table = LogFactorialTable::new(tau as usize);
    kernel_with_table(tau, d, delta, &table)
}

fn kernel_with_table(tau: u32, d: i64, delta: f64, table: &LogFactorialTable) -> Complex {
    let ad = d.unsigned_abs();
    if ad > tau as u64 {
        return Complex::new(0.0, 0.0);
    }
    if delta == 0.0 {
        return if d == 0 {
            Complex::new(1.0, 0.0)
        } else {
            Complex::new(0.0, 0.0)
        };
    }
    let ln_delta = libm::log(libm::fabs(delta));
    let tau_us = tau as usize;
    let ad_us = ad as usize;

    let mut re = 0.0f64;
    let mut re_c = 0.0f64;
    let mut im = 0.0f64;
    let mut im_c = 0.0f64;
    let mut r = ad_us;
    while r <= tau_us {
        let half_plus = (r + ad_us) / 2;
        let half_minus = (r - ad_us) / 2;
        let ln_mag = table.get(tau_us) - table.get(tau_us - r) - table.get(half_plus)
            - table.get(half_minus)
            + r as f64 * ln_delta;
        let mut mag = libm::exp(ln_mag);
        if delta < 0.0 && r % 2 == 1 {
            mag = -mag;
        }
        // (-i)^r cycles 1, -i, -1, i
        let (t_re, t_im) = match r % 4 {
            0 => (mag, 0.0),
            1 => (0.0, -mag),
            2 => (-mag, 0.0),
            _ => (0.0, mag),
        };
        let y = t_re - re_c;
        let t = re + y;
        re_c = (t - re) - y;
        re = t;
        let y = t_im - im_c;
        let t = im + y;
        im_c = (t - im) - y;
        im = t;
        r += 2;
    }
    Complex::new(re, im)
}

/// Kernel values K_{tau; d} for d = 0..=tau (parity gives d < 0).
fn kernel_row(tau: u32, delta: f64, table: &LogFactorialTable) -> Vec<Complex> {
    (0..=tau as i64)
        .map(|d| kernel_with_table(tau, d, delta, table))
        .collect()
}

/// Intensity grid |phi_{tau,n}|^2 of the normalized square packet
/// phi_{0,n} = 1/sqrt(2N+1) on |n| <= N, for tau = 0..=tau_max, computed
/// row by row from the closed-form kernel.
pub fn evolve_square(n_half: u32, delta: f64, tau_max: u32) -> SpaceTimeGrid {
    let params = AutomatonParams::for_square(n_half, delta, tau_max)
        .expect("finite delta");
    let table = LogFactorialTable::new(tau_max as usize);
    let half = params.half_width as i64;
    let width = (2 * half + 1) as usize;
    let amp0 = 1.0 / libm::sqrt((2 * n_half as i64 + 1) as f64);

    let rows = (0..=tau_max)
        .map(|tau| {
            let krow = kernel_row(tau, delta, &table);
            let mut row = vec![0.0f64; width];
            for (i, out) in row.iter_mut().enumerate() {
                let n = i as i64 - half;
                let mut acc = Complex::new(0.0, 0.0);
                for m in -(n_half as i64)..=n_half as i64 {
                    let d = (n - m).unsigned_abs();
                    if d <= tau as u64 {
                        acc += krow[d as usize]; // K is even in d
                    }
                }
                *out = (acc * amp0).norm_sqr();
            }
            row
        })
        .collect();

    SpaceTimeGrid {
        times: (0..=tau_max).map(|t| t as f64).collect(),
        offset: -half,
        rows,
    }
}

/// The square-packet field after `tau` iterated steps (the oracle route;
/// `evolve_square` uses the closed-form kernel instead).
pub fn iterate_square(n_half: u32, delta: f64, tau: u32) -> LatticeField {
    let mut field = LatticeField::square_packet(n_half);
    for _ in 0..tau {
        field = step(&field, delta);
    }
    field
}
