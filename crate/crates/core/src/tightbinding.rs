//! Nearest-neighbour tight-binding chain propagated by the unitary Bessel
//! kernel K_d(t) = i^d J_d(Λt). The kernel composes exactly under the
//! Bessel addition theorem, conserves the norm, and at small times one
//! automaton step with Δ = -ΛT/2 matches it to O(T²).

use alloc::vec;
use alloc::vec::Vec;

use crate::continuum;
use crate::error::Error;
use crate::lattice::{LatticeField, SpaceTimeGrid};
use crate::numerics::bessel_j_array;
use crate::Complex;

/// Run parameters: coupling Λ (the time scale; conventionally 1) and a
/// strictly increasing grid of non-negative times.
#[derive(Debug, Clone, PartialEq)]
pub struct TBParams {
    pub lambda: f64,
    pub time_grid: Vec<f64>,
}

impl TBParams {
    pub fn new(lambda: f64, time_grid: Vec<f64>) -> Result<Self, Error> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(Error::Config("tightbinding: lambda must be finite and non-zero"));
        }
        if time_grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::Config("tightbinding: times must be finite and non-negative"));
        }
        if time_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("tightbinding: time grid must be strictly increasing"));
        }
        Ok(Self { lambda, time_grid })
    }
}

/// An array of identical square packets: `count` packets of half-width
/// `n_half`, centers `spacing` sites apart. Packets must not overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PacketArraySpec {
    pub count: u32,
    pub n_half: u32,
    pub spacing: u32,
}

impl PacketArraySpec {
    pub fn new(count: u32, n_half: u32, spacing: u32) -> Result<Self, Error> {
        if count == 0 {
            return Err(Error::Config("packet array: count must be positive"));
        }
        if spacing <= 2 * n_half {
            return Err(Error::Config("packet array: packets overlap (need spacing > 2 n_half)"));
        }
        Ok(Self { count, n_half, spacing })
    }

    /// Smallest disjoint arrangement: one empty site between packets.
    pub fn default_spacing(n_half: u32) -> u32 {
        2 * n_half + 2
    }

    /// Packet centers, symmetric around the origin (to within half a site
    /// when count is even and spacing odd).
    pub fn centers(&self) -> Vec<i64> {
        let shift = ((self.count as i64 - 1) * self.spacing as i64) / 2;
        (0..self.count as i64)
            .map(|j| j * self.spacing as i64 - shift)
            .collect()
    }

    /// Total occupied span in sites, end to end.
    pub fn span(&self) -> u32 {
        (self.count - 1) * self.spacing + 2 * self.n_half + 1
    }
}

/// Number of kernel orders to keep so that the discarded tail of J_d(Λt)
/// is below 1e-16 uniformly.
pub fn kernel_reach(lambda: f64, t: f64) -> usize {
    let a = libm::fabs(lambda * t);
    libm::ceil(a + 40.0 + 10.0 * libm::log(1.0 + a)) as usize
}

/// The propagator element K_d(t) = i^d J_d(Λt).
pub fn tb_kernel(d: i64, lambda: f64, t: f64) -> Complex {
    let j = crate::numerics::bessel_j(d, lambda * t).unwrap_or(f64::NAN);
    i_pow(d) * j
}

/// i^d for signed d.
#[inline]
fn i_pow(d: i64) -> Complex {
    match d.rem_euclid(4) {
        0 => Complex::new(1.0, 0.0),
        1 => Complex::new(0.0, 1.0),
        2 => Complex::new(-1.0, 0.0),
        _ => Complex::new(0.0, -1.0),
    }
}

/// phi_n(t) = sum_m i^{n-m} J_{n-m}(Λt) phi_m(0), truncated where the
/// kernel falls below 1e-16.
pub fn propagate(initial: &LatticeField, lambda: f64, t: f64) -> LatticeField {
    if t == 0.0 {
        return initial.clone();
    }
    let reach = kernel_reach(lambda, t) as i64;
    let (lo, hi) = initial.support();
    let out_lo = lo - reach;
    let out_hi = hi + reach;
    let bessel = bessel_j_array(((hi - lo) + reach) as usize, lambda * t);

    let width = (out_hi - out_lo + 1) as usize;
    let mut amps = vec![Complex::new(0.0, 0.0); width];
    for (i, out) in amps.iter_mut().enumerate() {
        let n = out_lo + i as i64;
        let mut acc = Complex::new(0.0, 0.0);
        for (m, phi0) in initial.iter() {
            let d = n - m;
            let ad = d.unsigned_abs() as usize;
            if ad >= bessel.len() {
                continue;
            }
            // J_{-d}(x) = (-1)^d J_d(x)
            let mut j = bessel[ad];
            if d < 0 && ad % 2 == 1 {
                j = -j;
            }
            acc += i_pow(d) * j * phi0;
        }
        *out = acc;
    }
    LatticeField::new(out_lo, amps)
}

/// Intensity grid of the normalized square packet of half-width N over a
/// time grid, all rows on the common site window of the latest time.
pub fn evolve_square_tb(n_half: u32, lambda: f64, times: &[f64]) -> SpaceTimeGrid {
    let initial = LatticeField::square_packet(n_half);
    grid_from_field(&initial, lambda, times)
}

/// Intensity grid for a disjoint array of normalized square packets with
/// total norm 1.
pub fn evolve_packet_array(
    spec: &PacketArraySpec,
    lambda: f64,
    times: &[f64],
) -> Result<SpaceTimeGrid, Error> {
    let initial = packet_array_field(spec)?;
    Ok(grid_from_field(&initial, lambda, times))
}

/// The t = 0 field of a packet array: equal amplitude on every occupied
/// site, unit total norm.
pub fn packet_array_field(spec: &PacketArraySpec) -> Result<LatticeField, Error> {
    PacketArraySpec::new(spec.count, spec.n_half, spec.spacing)?;
    let centers = spec.centers();
    let lo = centers[0] - spec.n_half as i64;
    let hi = centers[centers.len() - 1] + spec.n_half as i64;
    let occupied = spec.count as usize * (2 * spec.n_half as usize + 1);
    let amp = Complex::new(1.0 / libm::sqrt(occupied as f64), 0.0);
    let mut amps = vec![Complex::new(0.0, 0.0); (hi - lo + 1) as usize];
    for c in &centers {
        for n in c - spec.n_half as i64..=c + spec.n_half as i64 {
            amps[(n - lo) as usize] = amp;
        }
    }
    Ok(LatticeField::new(lo, amps))
}

fn grid_from_field(initial: &LatticeField, lambda: f64, times: &[f64]) -> SpaceTimeGrid {
    let t_last = times.iter().cloned().fold(0.0f64, f64::max);
    let reach = kernel_reach(lambda, t_last) as i64;
    let (lo, hi) = initial.support();
    let offset = lo - reach;
    let width = (hi + reach - offset + 1) as usize;

    let rows = times
        .iter()
        .map(|&t| {
            let field = propagate(initial, lambda, t);
            let mut row = vec![0.0f64; width];
            for (site, amp) in field.iter() {
                let idx = site - offset;
                if idx >= 0 && (idx as usize) < width {
                    row[idx as usize] = amp.norm_sqr();
                }
            }
            row
        })
        .collect();

    SpaceTimeGrid { times: times.to_vec(), offset, rows }
}

/// Convergence diagnostic for the continuum limit (Λ < 0): compares the
/// band-edge-gauged propagator with the free Schrödinger kernel of the
/// continuum module.
///
/// For Λ < 0 the spectrum is E(q) = |Λ| cos q; removing the q = 0 band
/// phase e^{-i|Λ|t} and conjugating maps slow modes onto i∂ₜφ = -∂²φ/∂x²
/// with x = n/sqrt|Λ| and effective time t/2, so the discrepancy
///
///   | conj(e^{i|Λ|t} i^d J_d(Λt)) - G(d/sqrt|Λ|, t/2)/sqrt|Λ| |
///
/// decays like |Λ|^{-1/2} (the residue is the opposite band edge).
pub fn continuum_kernel_check(d: i64, lambda: f64, t: f64) -> Result<f64, Error> {
    if lambda >= 0.0 || !lambda.is_finite() {
        return Err(Error::Domain("continuum_kernel_check: requires lambda < 0"));
    }
    if t <= 0.0 {
        return Err(Error::Domain("continuum_kernel_check: requires t > 0 (kernel singular at 0)"));
    }
    let al = libm::fabs(lambda);
    let kernel = tb_kernel(d, lambda, t);
    let phase = al * t;
    let gauge = Complex::new(libm::cos(phase), libm::sin(phase));
    let gauged = (gauge * kernel).conj();
    let x = d as f64 / libm::sqrt(al);
    let g = continuum::gaussian_kernel(x, 0.5 * t) / libm::sqrt(al);
    Ok((gauged - g).norm())
}
