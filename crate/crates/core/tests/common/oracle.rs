//! Independent reference implementations used only by tests.
//!
//! Nothing here calls into the library's numerical kernels.

#![allow(dead_code)]

use num_complex::Complex64;

/// Unevaluated sum `hi + lo` carrying roughly 106 bits of mantissa.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let e = b - (s - a);
        Self { hi: s, lo: e }
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        let e = (a - (s - bb)) + (b - bb);
        (s, e)
    }

    fn add(self, other: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        Self::quick_two_sum(s, e)
    }

    fn mul(self, other: Self) -> Self {
        let p = self.hi * other.hi;
        let e = self.hi.mul_add(other.hi, -p);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        Self::quick_two_sum(p, e)
    }

    fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let prod = Self::from_f64(q1).mul(Self::from_f64(d));
        let r = self.add(Self {
            hi: -prod.hi,
            lo: -prod.lo,
        });
        let q2 = r.hi / d;
        Self::quick_two_sum(q1, q2)
    }

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// J0 by its Maclaurin series evaluated in double-double arithmetic.
///
/// Accurate to ~1e-15 absolute on [0, 30]; 90 terms.
pub fn j0_series_dd(t: f64) -> f64 {
    assert!(
        (0.0..=30.0).contains(&t),
        "series oracle only valid on [0, 30]"
    );
    let half = DoubleDouble::from_f64(t / 2.0);
    let q = half.mul(half).neg();
    let mut term = DoubleDouble::from_f64(1.0);
    let mut sum = term;
    for k in 1..90u32 {
        let kk = f64::from(k) * f64::from(k);
        term = term.mul(q).div_f64(kk);
        sum = sum.add(term);
    }
    sum.to_f64()
}

/// J0 by Miller's downward recurrence normalised with `J0 + 2 sum J_2k = 1`.
pub fn j0_miller(t: f64) -> f64 {
    assert!(t >= 0.0 && t.is_finite());
    if t == 0.0 {
        return 1.0;
    }
    let start = {
        let n = t + 40.0 + 12.0 * t.cbrt();
        let n = n.ceil() as usize;
        n + (n % 2)
    };
    let mut j_next = 0.0f64; // J_{n+1}
    let mut j_cur = 1e-300f64; // J_n
    let mut norm = 0.0f64;
    let mut j0 = 0.0;
    for n in (1..=start).rev() {
        let j_prev = (2.0 * n as f64 / t) * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        // j_cur now holds J_{n-1}
        let order = n - 1;
        if order > 0 && order % 2 == 0 {
            norm += 2.0 * j_cur;
        }
        if order == 0 {
            j0 = j_cur;
            norm += j_cur;
        }
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
            j0 *= 1e-250;
        }
    }
    j0 / norm
}

/// Best available oracle: the double-double series where it is valid, Miller otherwise.
pub fn j0_oracle(t: f64) -> f64 {
    if t <= 20.0 {
        j0_series_dd(t)
    } else {
        j0_miller(t)
    }
}

/// `int_a^b exp(-i alpha s) ds` in closed form.
pub fn exp_integral(a: f64, b: f64, alpha: f64) -> Complex64 {
    if alpha.abs() < 1e-14 {
        return Complex64::new(b - a, 0.0);
    }
    let e = |s: f64| Complex64::from_polar(1.0, -alpha * s);
    (e(a) - e(b)) / Complex64::new(0.0, alpha)
}

/// `int_a^b s exp(-i alpha s) ds` in closed form.
pub fn linear_exp_integral(a: f64, b: f64, alpha: f64) -> Complex64 {
    if alpha.abs() < 1e-14 {
        return Complex64::new((b * b - a * a) / 2.0, 0.0);
    }
    let anti = |s: f64| {
        Complex64::from_polar(1.0, -alpha * s)
            * (Complex64::new(0.0, s / alpha) + Complex64::new(1.0 / (alpha * alpha), 0.0))
    };
    anti(b) - anti(a)
}

/// Midpoint Riemann sum of `int_a^b exp(-i alpha s) ds` with `n` cells.
pub fn exp_integral_riemann(a: f64, b: f64, alpha: f64, n: usize) -> Complex64 {
    let ds = (b - a) / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let s = a + (i as f64 + 0.5) * ds;
        acc += Complex64::from_polar(1.0, -alpha * s);
    }
    acc * ds
}

/// Far field of a constant source on an axis-aligned rectangle, by separable closed form.
pub fn rect_far_field(
    c: Complex64,
    (x_lo, x_hi, y_lo, y_hi): (f64, f64, f64, f64),
    theta: [f64; 2],
    k: f64,
) -> Complex64 {
    c * exp_integral(x_lo, x_hi, k * theta[0]) * exp_integral(y_lo, y_hi, k * theta[1])
}

/// Far field of the three-band source whose middle band has amplitude `x`.
pub fn f1_far_field(theta: [f64; 2], k: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let top = rect_far_field(one, (-1.0, 1.0, 1.0, 2.0), theta, k);
    let bottom = rect_far_field(one, (-1.0, 1.0, -2.0, -1.0), theta, k);
    let middle =
        linear_exp_integral(-1.0, 1.0, k * theta[0]) * exp_integral(-1.0, 1.0, k * theta[1]);
    top + middle + bottom
}

/// Far field of the two-band source.
pub fn f2_far_field(theta: [f64; 2], k: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    rect_far_field(one, (-1.0, 1.0, 1.0, 2.0), theta, k)
        + rect_far_field(one, (-1.0, 1.0, -2.0, -1.0), theta, k)
}

/// Shoelace area of a closed polygon.
pub fn shoelace(vertices: &[[f64; 2]]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    acc / 2.0
}

/// `sum_j J0(k_j r) dk` on the midpoint wavenumber grid, using the oracle J0.
pub fn j0_superposition(r: f64, n: usize, k_max: f64) -> f64 {
    let dk = k_max / n as f64;
    (0..n)
        .map(|j| j0_oracle((j as f64 + 0.5) * dk * r) * dk)
        .sum()
}
