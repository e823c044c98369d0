//! Discrete (tight-binding) and continuous Wigner functions.
//!
//! The discrete transform over Bloch quasi-momentum k,
//!
//!   W_n(k;t) = 2 Σ_m e^{2ikm} φ_{n-m}(t) φ*_{n+m}(t),
//!
//! is real up to rounding, π-periodic in k, and lives on the strip
//! [-π/2, π/2). For fields evolved by the kernel i^d J_d(Λt) each fixed-k
//! column obeys the discrete wave equation
//!
//!   (1/(Λ² sin²k)) ∂²ₜ W_n = W_{n+1} + W_{n-1} - 2 W_n,
//!
//! with effective velocity |Λ sin k|; its solutions expand in even-order
//! Bessel functions J_{2(n-m)}(2Λt sin k). In the strong-coupling
//! continuum of the site index the evolution degenerates to the shear
//! ν → ν - t sin k (for Λ > 0).

use alloc::vec::Vec;

use crate::error::Error;
use crate::lattice::LatticeField;
use crate::numerics::bessel_j_array;
use crate::Complex;

const PI: f64 = core::f64::consts::PI;

/// Real Wigner values over (site n, quasi-momentum k).
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    /// Site of the first row.
    pub n_offset: i64,
    /// Quasi-momentum samples, conventionally inside [-π/2, π/2).
    pub k_samples: Vec<f64>,
    /// values[row][col] = W_{n_offset + row}(k_samples[col]).
    pub values: Vec<Vec<f64>>,
    /// Largest |imaginary part| encountered before it was dropped.
    pub max_imag_residue: f64,
}

impl WignerGrid {
    pub fn n_rows(&self) -> usize {
        self.values.len()
    }

    pub fn site(&self, row: usize) -> i64 {
        self.n_offset + row as i64
    }

    pub fn row_of_site(&self, site: i64) -> Option<usize> {
        let idx = site - self.n_offset;
        if idx < 0 || idx >= self.values.len() as i64 {
            None
        } else {
            Some(idx as usize)
        }
    }

    pub fn value(&self, site: i64, col: usize) -> f64 {
        self.row_of_site(site).map_or(0.0, |r| self.values[r][col])
    }

    /// One fixed-k column as a row over sites.
    pub fn k_column(&self, col: usize) -> WignerRow {
        WignerRow {
            offset: self.n_offset,
            values: self.values.iter().map(|r| r[col]).collect(),
        }
    }

    /// (1/2π) ∫ W_n(k) dk over the strip, for a uniform k grid. Equals
    /// |φ_n|² (the m = 0 term is the only survivor of the k average).
    pub fn k_marginal(&self, row: usize) -> f64 {
        let vals = &self.values[row];
        let mean: f64 = vals.iter().sum::<f64>() / vals.len() as f64;
        0.5 * mean
    }

    /// Σ_n W_n(k) at one k column (non-negative for any field).
    pub fn n_marginal(&self, col: usize) -> f64 {
        self.values.iter().map(|r| r[col]).sum()
    }

    /// Fraction of strictly positive values in |n| <= n_window,
    /// |k| <= k_window.
    pub fn positive_fraction(&self, n_window: i64, k_window: f64) -> f64 {
        let mut total = 0usize;
        let mut positive = 0usize;
        for (row, vals) in self.values.iter().enumerate() {
            let n = self.n_offset + row as i64;
            if n.abs() > n_window {
                continue;
            }
            for (col, &v) in vals.iter().enumerate() {
                if libm::fabs(self.k_samples[col]) > k_window {
                    continue;
                }
                total += 1;
                if v > 0.0 {
                    positive += 1;
                }
            }
        }
        if total == 0 {
            0.0
        } else {
            positive as f64 / total as f64
        }
    }
}

/// A single fixed-k Wigner column over sites.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerRow {
    pub offset: i64,
    pub values: Vec<f64>,
}

impl WignerRow {
    pub fn value(&self, site: i64) -> f64 {
        let idx = site - self.offset;
        if idx < 0 || idx >= self.values.len() as i64 {
            0.0
        } else {
            self.values[idx as usize]
        }
    }
}

/// Uniform quasi-momentum grid: `nodes` samples of [-π/2, π/2), half-open.
pub fn k_strip(nodes: usize) -> Vec<f64> {
    (0..nodes)
        .map(|j| -0.5 * PI + PI * j as f64 / nodes as f64)
        .collect()
}

/// Tolerance scale for the imaginary residue of the transform.
const IMAG_TOLERANCE: f64 = 1e-12;

/// The discrete Wigner transform of a field. The m-sum runs over the
/// finite overlap of the supports of φ_{n-m} and φ_{n+m}; imaginary parts
/// are checked against 1e-12 (times the field scale) and dropped.
pub fn discrete_wigner(field: &LatticeField, k_samples: &[f64]) -> Result<WignerGrid, Error> {
    let (s0, s1) = field.support();
    let scale = field.norm_sqr().max(0.5) * 2.0;
    let mut values = Vec::with_capacity((s1 - s0 + 1) as usize);
    let mut max_residue = 0.0f64;

    for n in s0..=s1 {
        let extent = (n - s0).min(s1 - n);
        let mut row = Vec::with_capacity(k_samples.len());
        for &k in k_samples {
            // fold into the fundamental strip; makes the pi-periodicity
            // W_n(k + pi) = W_n(k) bitwise exact
            let k = k - PI * libm::round(k / PI);
            let mut re = 0.0f64;
            let mut re_c = 0.0f64;
            let mut im = 0.0f64;
            let mut im_c = 0.0f64;
            for m in -extent..=extent {
                let prod = field.amp(n - m) * field.amp(n + m).conj();
                let angle = 2.0 * k * m as f64;
                let phase = Complex::new(libm::cos(angle), libm::sin(angle));
                let term = phase * prod * 2.0;
                let y = term.re - re_c;
                let t = re + y;
                re_c = (t - re) - y;
                re = t;
                let y = term.im - im_c;
                let t = im + y;
                im_c = (t - im) - y;
                im = t;
            }
            let residue = libm::fabs(im);
            if !residue.is_finite() || residue > IMAG_TOLERANCE * scale {
                return Err(Error::Numerical(
                    "discrete_wigner: imaginary residue above tolerance",
                ));
            }
            if residue > max_residue {
                max_residue = residue;
            }
            row.push(re);
        }
        values.push(row);
    }
    Ok(WignerGrid {
        n_offset: s0,
        k_samples: k_samples.to_vec(),
        values,
        max_imag_residue: max_residue,
    })
}

/// ∂W_n(k;t)/∂t computed from the field via the chain dynamics
/// dφ_j/dt = i(Λ/2)(φ_{j+1} + φ_{j-1}) (the generator of i^d J_d(Λt)).
pub fn wigner_time_derivative(
    field: &LatticeField,
    lambda: f64,
    k_samples: &[f64],
) -> Result<WignerGrid, Error> {
    let (s0, s1) = field.support();
    // φ̇ has support one site wider; use it for both factors
    let lo = s0 - 1;
    let hi = s1 + 1;
    let half_il = Complex::new(0.0, 0.5 * lambda);
    let dphi: Vec<Complex> = (lo..=hi)
        .map(|j| half_il * (field.amp(j + 1) + field.amp(j - 1)))
        .collect();
    let dphi_at = |j: i64| -> Complex {
        if j < lo || j > hi {
            Complex::new(0.0, 0.0)
        } else {
            dphi[(j - lo) as usize]
        }
    };

    let scale = (field.norm_sqr().max(0.5)) * 2.0 * (1.0 + libm::fabs(lambda));
    let mut values = Vec::with_capacity((hi - lo + 1) as usize);
    let mut max_residue = 0.0f64;
    for n in lo..=hi {
        let extent = (n - lo).min(hi - n);
        let mut row = Vec::with_capacity(k_samples.len());
        for &k in k_samples {
            let k = k - PI * libm::round(k / PI);
            let mut acc = Complex::new(0.0, 0.0);
            for m in -extent..=extent {
                let a = dphi_at(n - m) * field.amp(n + m).conj();
                let b = field.amp(n - m) * dphi_at(n + m).conj();
                let angle = 2.0 * k * m as f64;
                let phase = Complex::new(libm::cos(angle), libm::sin(angle));
                acc += phase * (a + b) * 2.0;
            }
            let residue = libm::fabs(acc.im);
            if !residue.is_finite() || residue > IMAG_TOLERANCE * scale {
                return Err(Error::Numerical(
                    "wigner_time_derivative: imaginary residue above tolerance",
                ));
            }
            if residue > max_residue {
                max_residue = residue;
            }
            row.push(acc.re);
        }
        values.push(row);
    }
    Ok(WignerGrid {
        n_offset: lo,
        k_samples: k_samples.to_vec(),
        values,
        max_imag_residue: max_residue,
    })
}

/// Closed-form initial Wigner of the normalized square packet,
///
///   W_n(k;0) = [2/(2N+1)] Θ(N-|n|) sin(k(2N-2|n|+1))/sin(k),
///
/// with the k → 0 limit 2(2N-2|n|+1)/(2N+1). π-periodic in k by
/// construction (the ratio has odd numerator order).
pub fn initial_square_wigner(n_half: u32, n: i64, k: f64) -> f64 {
    if n.abs() > n_half as i64 {
        return 0.0;
    }
    let m_order = (2 * n_half as i64 - 2 * n.abs() + 1) as f64;
    // fold to the nearest multiple of π; the ratio is invariant
    let k_r = k - PI * libm::round(k / PI);
    let ratio = if libm::fabs(k_r) < 1e-7 {
        m_order * (1.0 - (m_order * m_order - 1.0) * k_r * k_r / 6.0)
    } else {
        libm::sin(k_r * m_order) / libm::sin(k_r)
    };
    2.0 / (2.0 * n_half as f64 + 1.0) * ratio
}

/// Shear-approximation arguments: continuous site variable ν, Bloch
/// momentum k, time t (strong-coupling regime, here with Λ = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearParams {
    pub nu: f64,
    pub k: f64,
    pub t: f64,
}

/// Strong-coupling shear approximation of the evolved Wigner function:
/// the initial profile transported rigidly along ν at velocity sin k
/// (for Λ = 1, mode k moves with group velocity +sin k), read off by
/// linear interpolation between integer sites.
pub fn shear_approximation(n_half: u32, p: ShearParams) -> f64 {
    let x = p.nu - p.t * libm::sin(p.k);
    let base = libm::floor(x);
    let frac = x - base;
    let lo = base as i64;
    let a = initial_square_wigner(n_half, lo, p.k);
    let b = initial_square_wigner(n_half, lo + 1, p.k);
    (1.0 - frac) * a + frac * b
}

/// Shear-approximation grid over integer sites and a k grid.
pub fn shear_grid(
    n_half: u32,
    n_lo: i64,
    n_hi: i64,
    k_samples: &[f64],
    t: f64,
) -> WignerGrid {
    let values = (n_lo..=n_hi)
        .map(|n| {
            k_samples
                .iter()
                .map(|&k| shear_approximation(n_half, ShearParams { nu: n as f64, k, t }))
                .collect()
        })
        .collect();
    WignerGrid {
        n_offset: n_lo,
        k_samples: k_samples.to_vec(),
        values,
        max_imag_residue: 0.0,
    }
}

/// Agreement statistics between a shear-approximation grid and the
/// transform of the evolved field, on the common (n,k) points of the
/// evolved grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearComparison {
    /// max |W| over the evolved grid.
    pub region_scale: f64,
    /// max |W_shear - W| anywhere.
    pub max_abs_diff: f64,
    /// max |W_shear - W| / region_scale (relative to the Wigner scale).
    pub scale_relative: f64,
    /// max pointwise |W_shear - W|/|W| where |W| > cut * region_scale.
    pub pointwise_relative: f64,
}

/// Compare the shear approximation against an evolved Wigner grid on the
/// region |W| > cut * max|W|.
pub fn compare_shear(evolved: &WignerGrid, n_half: u32, t: f64, cut: f64) -> ShearComparison {
    let mut region_scale = 0.0f64;
    for row in &evolved.values {
        for &v in row {
            region_scale = region_scale.max(libm::fabs(v));
        }
    }
    let mut max_abs = 0.0f64;
    let mut pointwise = 0.0f64;
    for (r, row) in evolved.values.iter().enumerate() {
        let n = evolved.n_offset + r as i64;
        for (c, &w) in row.iter().enumerate() {
            let k = evolved.k_samples[c];
            let ws = shear_approximation(n_half, ShearParams { nu: n as f64, k, t });
            let diff = libm::fabs(ws - w);
            max_abs = max_abs.max(diff);
            if libm::fabs(w) > cut * region_scale {
                pointwise = pointwise.max(diff / libm::fabs(w));
            }
        }
    }
    ShearComparison {
        region_scale,
        max_abs_diff: max_abs,
        scale_relative: if region_scale > 0.0 { max_abs / region_scale } else { 0.0 },
        pointwise_relative: pointwise,
    }
}

/// Exclusion half-widths around k = 0 and k = ±π/2 in the wave-equation
/// residual (the prefactor diverges at sin k = 0 and the spec of the
/// check keeps clear of the zone boundaries).
const RESIDUAL_K_EXCLUSION: f64 = 1e-3;

/// Maximum over (n, k, interior time) of the discrete-wave-equation
/// residual
///
///   | D²ₜ W_n(k) / (Λ² sin²k) - (W_{n+1} + W_{n-1} - 2 W_n) |
///
/// for a sequence of Wigner grids at uniformly spaced times (spacing h).
/// For grids built from exactly evolved fields the residual is O(h²).
pub fn wigner_wave_residual(grids: &[WignerGrid], h: f64, lambda: f64) -> Result<f64, Error> {
    if grids.len() < 3 {
        return Err(Error::TooFewSamples);
    }
    let first = &grids[0];
    for g in grids {
        if g.n_offset != first.n_offset
            || g.values.len() != first.values.len()
            || g.k_samples != first.k_samples
        {
            return Err(Error::Config("wigner_wave_residual: grids must share their window"));
        }
    }
    let mut worst = 0.0f64;
    for w in grids.windows(3) {
        let (wm, w0, wp) = (&w[0], &w[1], &w[2]);
        for (c, &k) in first.k_samples.iter().enumerate() {
            if libm::fabs(k) < RESIDUAL_K_EXCLUSION
                || libm::fabs(libm::fabs(k) - 0.5 * PI) < RESIDUAL_K_EXCLUSION
            {
                continue;
            }
            let speed_sq = lambda * lambda * libm::sin(k) * libm::sin(k);
            for r in 1..first.values.len() - 1 {
                let d2t = (wp.values[r][c] - 2.0 * w0.values[r][c] + wm.values[r][c]) / (h * h);
                let lap = w0.values[r + 1][c] + w0.values[r - 1][c] - 2.0 * w0.values[r][c];
                // at Λ = 0 the equation degenerates to ∂²ₜW = 0
                let res = if speed_sq == 0.0 {
                    libm::fabs(d2t)
                } else {
                    libm::fabs(d2t / speed_sq - lap)
                };
                if res > worst {
                    worst = res;
                }
            }
        }
    }
    Ok(worst)
}

/// Evolve one fixed-k Wigner column by the discrete wave equation via the
/// even-order Bessel expansion:
///
///   W_n(t) = Σ_m J_{2(n-m)}(2Λt sin k) W_m(0) + Σ_m G_{n-m}(t) Ẇ_m(0),
///
/// where G is the wave propagator acting on the initial time derivative
/// (∂ₜG_d = J_{2d}(2Λt sin k)). The expansion coefficients are the initial
/// data directly, so no linear solve is involved; as sin k → 0 the formula
/// degenerates smoothly to W(t) = W(0) + t Ẇ(0).
pub fn bessel_wave_evolve(
    w0: &WignerRow,
    wdot0: &WignerRow,
    lambda: f64,
    k: f64,
    t: f64,
) -> WignerRow {
    let c = lambda * libm::sin(k);
    let a = 2.0 * c * t; // Bessel argument
    if libm::fabs(a) < 1e-12 {
        // frozen column: W(t) = W(0) + t Ẇ(0)
        let lo = w0.offset.min(wdot0.offset);
        let hi = (w0.offset + w0.values.len() as i64 - 1)
            .max(wdot0.offset + wdot0.values.len() as i64 - 1);
        let values = (lo..=hi).map(|n| w0.value(n) + t * wdot0.value(n)).collect();
        return WignerRow { offset: lo, values };
    }

    let reach = crate::tightbinding::kernel_reach(1.0, libm::fabs(a)).div_ceil(2) + 1;
    let jtab = bessel_j_array(2 * reach + 1, a);
    let j_even = |d: i64| -> f64 {
        let idx = 2 * d.unsigned_abs() as usize; // J_{2d}; even order, even in both signs
        if idx < jtab.len() {
            jtab[idx]
        } else {
            0.0
        }
    };
    let gtab = sine_propagator(reach as i64, c, t);

    let in_lo = w0.offset.min(wdot0.offset);
    let in_hi = (w0.offset + w0.values.len() as i64 - 1)
        .max(wdot0.offset + wdot0.values.len() as i64 - 1);
    let out_lo = in_lo - reach as i64;
    let out_hi = in_hi + reach as i64;
    let values = (out_lo..=out_hi)
        .map(|n| {
            let mut acc = 0.0f64;
            for m in in_lo..=in_hi {
                let d = n - m;
                if d.unsigned_abs() as usize <= reach {
                    acc += j_even(d) * w0.value(m);
                    acc += gtab[(d + reach as i64) as usize] * wdot0.value(m);
                }
            }
            acc
        })
        .collect();
    WignerRow { offset: out_lo, values }
}

/// G_d(t) = (1/2π) ∫ e^{iκd} sin(2ct sin(κ/2)) / (2c sin(κ/2)) dκ,
/// the wave propagator applied to the initial velocity; smooth and
/// 2π-periodic, so the uniform trapezoid rule converges spectrally.
fn sine_propagator(reach: i64, c: f64, t: f64) -> Vec<f64> {
    let a = libm::fabs(2.0 * c * t);
    let nodes = ((8.0 * (reach as f64 + a + 16.0)) as usize).next_power_of_two().max(1024);
    let mut samples = Vec::with_capacity(nodes);
    for j in 0..nodes {
        let kappa = -PI + 2.0 * PI * j as f64 / nodes as f64;
        let s = libm::sin(0.5 * kappa);
        let v = if libm::fabs(s) < 1e-14 {
            t
        } else {
            libm::sin(2.0 * c * t * s) / (2.0 * c * s)
        };
        samples.push((kappa, v));
    }
    (-reach..=reach)
        .map(|d| {
            let mut acc = 0.0f64;
            for &(kappa, v) in &samples {
                acc += libm::cos(kappa * d as f64) * v;
            }
            acc / nodes as f64
        })
        .collect()
}

/// Continuous Wigner function of the square packet 1/sqrt(L) on
/// |x| <= L/2:
///
///   W(x,p) = (2/L) sin(2p(L/2 - |x|)) / p   for |x| < L/2, else 0,
///
/// with the p → 0 limit (4/L)(L/2 - |x|).
pub fn continuous_wigner_square(l: f64, x: f64, p: f64) -> f64 {
    let a = 0.5 * l - libm::fabs(x);
    if a <= 0.0 {
        return 0.0;
    }
    if libm::fabs(p * a) < 1e-8 {
        let z = 2.0 * p * a;
        return (2.0 / l) * 2.0 * a * (1.0 - z * z / 6.0);
    }
    (2.0 / l) * libm::sin(2.0 * p * a) / p
}

/// Central intensity reconstructed from the sheared phase-space picture:
///
///   |φ(0,t)|² = (1/2π) ∫ W(2pt, p; 0) dp,
///
/// the free evolution transporting the initial Wigner function rigidly
/// along x at velocity 2p (both velocity signs give the same slice since
/// W is even in p).
pub fn continuous_shear_slice(l: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 1.0 / l;
    }
    // support |2pt| < L/2  =>  |p| < L/(4t); even integrand
    let p_max = 0.25 * l / t;
    let integrand = |p: f64| continuous_wigner_square(l, 2.0 * p * t, p);
    // phase scale of sin(2p(L/2 - 2pt)) sets the node count
    let phase_max = 2.0 * p_max * 0.5 * l;
    let mut n = (64.0 * (1.0 + phase_max / (2.0 * PI))) as usize * 2 + 1;
    n = n.clamp(2001, 400_001);
    let h = p_max / (n - 1) as f64;
    let mut acc = 0.0f64;
    for i in 0..n {
        let p = i as f64 * h;
        let w = if i == 0 || i == n - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * integrand(p);
    }
    let half = acc * h / 3.0;
    2.0 * half / (2.0 * PI)
}
