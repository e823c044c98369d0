//! Special functions and combinatorial helpers shared by the kernels:
//! integer-order Bessel functions of the first kind, log-factorials, and
//! Fresnel integrals.
//!
//! Bessel values are produced by backward (Miller) recurrence normalized
//! with the identity `J_0(x) + 2 Σ_{k≥1} J_{2k}(x) = 1`, which is stable
//! for orders above the argument; the forward regime is covered by the
//! same downward pass since it yields every order from the start index to
//! zero in one sweep. A truncated power series serves as an independent
//! oracle in the tests, never in the evaluation path.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;

/// ln(n!) with relative error below 1e-13.
///
/// Exact cumulative summation up to n = 255, Stirling's series beyond.
pub fn log_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 255 {
        let mut sum = 0.0f64;
        let mut c = 0.0f64;
        for k in 2..=n {
            let term = libm::log(k as f64);
            let y = term - c;
            let t = sum + y;
            c = (t - sum) - y;
            sum = t;
        }
        return sum;
    }
    stirling_ln_factorial(n as f64)
}

fn stirling_ln_factorial(n: f64) -> f64 {
    // ln n! = n ln n - n + (1/2) ln(2 pi n) + 1/(12n) - 1/(360n^3) + 1/(1260n^5) - 1/(1680n^7)
    let inv = 1.0 / n;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    n * libm::log(n) - n + 0.5 * libm::log(2.0 * core::f64::consts::PI * n) + series
}

/// Precomputed table of ln(k!) for k = 0..=max, used by the automaton
/// kernel where the same factorials recur across summation terms.
pub struct LogFactorialTable {
    values: Vec<f64>,
}

impl LogFactorialTable {
    pub fn new(max: usize) -> Self {
        let mut values = Vec::with_capacity(max + 1);
        values.push(0.0);
        let mut sum = 0.0f64;
        let mut c = 0.0f64;
        for k in 1..=max {
            let term = libm::log(k as f64);
            let y = term - c;
            let t = sum + y;
            c = (t - sum) - y;
            sum = t;
            values.push(sum);
        }
        Self { values }
    }

    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }
}

/// Smallest useful magnitude of ln|J_n(x)|; below this the value
/// underflows to zero in f64.
const LN_UNDERFLOW: f64 = -745.0;

/// J_order(x) for signed integer order.
///
/// Satisfies J_{-n}(x) = (-1)^n J_n(x) exactly by construction. Absolute
/// error is below 1e-12 for |x| <= 1e4 and |order| <= 1e6.
pub fn bessel_j(order: i64, x: f64) -> Result<f64, Error> {
    if !x.is_finite() {
        return Err(Error::Domain("bessel_j: argument must be finite"));
    }
    // J_{-n}(x) = (-1)^n J_n(x), J_n(-x) = (-1)^n J_n(x)
    let n = order.unsigned_abs() as usize;
    let ax = libm::fabs(x);
    let mut negate = false;
    if order < 0 && n % 2 == 1 {
        negate = !negate;
    }
    if x < 0.0 && n % 2 == 1 {
        negate = !negate;
    }

    // Rigorous tail bound: |J_n(x)| <= (x/2)^n / n! * exp(x^2 / (4(n+1))),
    // avoids long recurrences for orders far beyond the turning point.
    if n >= 8 && (n as f64) > ax {
        let bound = n as f64 * libm::log(ax / 2.0) - log_factorial(n as u64)
            + ax * ax / (4.0 * (n as f64 + 1.0));
        if bound < LN_UNDERFLOW {
            return Ok(0.0);
        }
    }

    let values = miller_array(n.max(1), ax);
    let v = values[n];
    Ok(if negate { -v } else { v })
}

/// J_0(x), J_1(x), ..., J_max(x) in one normalized downward pass.
///
/// Negative `x` is folded back with J_n(-x) = (-1)^n J_n(x).
pub fn bessel_j_array(max_order: usize, x: f64) -> Vec<f64> {
    let ax = libm::fabs(x);
    let mut values = miller_array(max_order, ax);
    if x < 0.0 {
        for (k, v) in values.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }
    values
}

fn miller_array(max_order: usize, ax: f64) -> Vec<f64> {
    debug_assert!(ax >= 0.0 && ax.is_finite());
    if ax == 0.0 {
        let mut values = vec![0.0; max_order + 1];
        values[0] = 1.0;
        return values;
    }

    let turning = libm::ceil(ax) as usize;
    let margin = 40 + libm::ceil(16.0 * libm::cbrt(ax.max(1.0))) as usize;
    let start = max_order.max(turning) + margin;

    let mut values = vec![0.0; max_order + 1];
    let mut sum = 0.0f64; // accumulates f_0 + 2 f_2 + 2 f_4 + ...
    let mut fk1 = 0.0f64; // f_{k+1}
    let mut fk = 1e-30f64; // f_k, arbitrary seed
    let mut k = start;
    loop {
        if k <= max_order {
            values[k] = fk;
        }
        if k % 2 == 0 {
            sum += if k == 0 { fk } else { 2.0 * fk };
        }
        if k == 0 {
            break;
        }
        let fkm1 = (2.0 * k as f64 / ax) * fk - fk1;
        fk1 = fk;
        fk = fkm1;
        k -= 1;
        if libm::fabs(fk) > 1e250 {
            let scale = 1e-250;
            fk *= scale;
            fk1 *= scale;
            sum *= scale;
            for v in values.iter_mut() {
                *v *= scale;
            }
        }
    }

    let norm = 1.0 / sum;
    for v in values.iter_mut() {
        *v *= norm;
    }
    values
}

/// Fresnel integrals C(z) = ∫_0^z cos(πu²/2) du and S(z) = ∫_0^z sin(πu²/2) du.
///
/// Power series for |z| <= 1.6, complex continued fraction for the
/// auxiliary error-function form beyond. Absolute error is well below the
/// 1e-9 target of the propagation code.
pub fn fresnel(z: f64) -> (f64, f64) {
    let az = libm::fabs(z);
    if az == 0.0 {
        return (0.0, 0.0);
    }
    let (c, s) = if az <= 1.6 {
        fresnel_series(az)
    } else {
        fresnel_continued_fraction(az)
    };
    if z < 0.0 {
        (-c, -s)
    } else {
        (c, s)
    }
}

fn fresnel_series(z: f64) -> (f64, f64) {
    // C = sum (-1)^j (pi/2)^{2j}   z^{4j+1} / ((2j)!   (4j+1))
    // S = sum (-1)^j (pi/2)^{2j+1} z^{4j+3} / ((2j+1)! (4j+3))
    let half_pi = 0.5 * core::f64::consts::PI;
    let z2 = z * z;
    let w = half_pi * z2; // pi z^2 / 2
    let ratio = -(w * w); // successive-term factor, sign carries the alternation

    let mut c_sum = 0.0;
    let mut term = z; // j = 0 term of C before the 1/(4j+1) weight
    let mut j = 0u32;
    loop {
        c_sum += term / (4 * j + 1) as f64;
        let jf = j as f64;
        term *= ratio / ((2.0 * jf + 1.0) * (2.0 * jf + 2.0));
        j += 1;
        if libm::fabs(term) < 1e-18 * libm::fabs(c_sum).max(1e-30) || j > 80 {
            break;
        }
    }

    let mut s_sum = 0.0;
    let mut term = w * z; // j = 0 term of S before the 1/(4j+3) weight: (pi/2) z^3
    let mut j = 0u32;
    loop {
        s_sum += term / (4 * j + 3) as f64;
        let jf = j as f64;
        term *= ratio / ((2.0 * jf + 2.0) * (2.0 * jf + 3.0));
        j += 1;
        if libm::fabs(term) < 1e-18 * libm::fabs(s_sum).max(1e-30) || j > 80 {
            break;
        }
    }
    (c_sum, s_sum)
}

fn fresnel_continued_fraction(z: f64) -> (f64, f64) {
    // C(z) + i S(z) = (1+i)/2 * erf(w),  w = (sqrt(pi)/2)(1-i) z,
    // erfc(w) = e^{-w^2}/sqrt(pi) * 1/(w + (1/2)/(w + 1/(w + (3/2)/(w + ...))))
    // evaluated by the modified Lentz method; w^2 = -i pi z^2 / 2 is purely
    // imaginary so e^{-w^2} is unimodular and cannot overflow.
    use num_complex::Complex64;
    let sqrt_pi = libm::sqrt(core::f64::consts::PI);
    let w = Complex64::new(1.0, -1.0) * (sqrt_pi / 2.0 * z);

    // modified Lentz for the fraction b0 + a1/(b1 + a2/(b2 + ...)),
    // b_j = w for all j, a_j = j/2
    let floor = 1e-280;
    let mut f = w;
    let mut c = w;
    let mut d = Complex64::new(0.0, 0.0);
    for j in 1..200 {
        let a = Complex64::new(j as f64 / 2.0, 0.0);
        d = w + a * d;
        if d.norm_sqr() < floor {
            d = Complex64::new(floor, 0.0);
        }
        d = d.inv();
        c = w + a / c;
        if c.norm_sqr() < floor {
            c = Complex64::new(floor, 0.0);
        }
        let delta = c * d;
        f *= delta;
        if (delta - Complex64::new(1.0, 0.0)).norm_sqr() < 1e-32 {
            break;
        }
    }
    // f now approximates the full continued fraction K; erfc = e^{-w^2}/(sqrt(pi) K)
    let phase = core::f64::consts::FRAC_PI_2 * z * z; // -w^2 = i pi z^2/2
    let exp_mw2 = Complex64::new(libm::cos(phase), libm::sin(phase));
    let erfc = exp_mw2 / (sqrt_pi * f);
    let erf = Complex64::new(1.0, 0.0) - erfc;
    let e = Complex64::new(0.5, 0.5) * erf; // C + iS
    (e.re, e.im)
}
