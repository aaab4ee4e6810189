//! Matrix exponentials.

use crate::error::{Error, Result};
use crate::linalg::eig::eigh;
use crate::linalg::matrix::ComplexMatrix;
use crate::scalar::{Real, C};

/// `exp(scale * op)`.
///
/// Hermitian inputs go through the eigendecomposition, everything else through
/// scaling and squaring of a Taylor series.
pub fn matrix_exp<T: Real>(op: &ComplexMatrix<T>, scale: C<T>) -> Result<ComplexMatrix<T>> {
    if !op.is_square() {
        return Err(Error::DimensionMismatch("exponential of a non-square matrix".into()));
    }
    if !op.is_finite() {
        return Err(Error::NonFinite);
    }
    let out = if op.is_hermitian(T::lit(1e-12).max(T::epsilon() * T::lit(8.0))) {
        let e = eigh(op)?;
        e.apply(|l| (scale * l).exp())
    } else {
        return matrix_exp_series(op, scale);
    };
    if !out.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(out)
}

/// Scaling-and-squaring Taylor exponential; valid for any square matrix.
pub fn matrix_exp_series<T: Real>(op: &ComplexMatrix<T>, scale: C<T>) -> Result<ComplexMatrix<T>> {
    if !op.is_square() {
        return Err(Error::DimensionMismatch("exponential of a non-square matrix".into()));
    }
    let n = op.rows();
    let a = op.scale(scale);
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<T>())
        .fold(T::zero(), T::max);
    if !norm1.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut squarings = 0i32;
    let half = T::lit(0.5);
    let mut nb = norm1;
    while nb > half {
        nb *= half;
        squarings += 1;
    }
    let b = a.scale_real(T::lit(0.5).powi(squarings));
    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=60 {
        term = (&term * &b).scale_real(T::one() / T::lit(k as f64));
        result = &result + &term;
        if term.max_abs() <= T::epsilon() * T::lit(1e-3) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    if !result.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(result)
}

/// `exp(-i t H) v` for Hermitian `H` by Chebyshev expansion.
///
/// Needs only matrix-vector products, so it scales to apparatus dimensions
/// where a full eigendecomposition per sample is too slow. The spectrum is
/// bracketed with Gershgorin discs.
pub fn unitary_action<T: Real>(h: &ComplexMatrix<T>, t: T, v: &[C<T>]) -> Result<Vec<C<T>>> {
    let n = h.rows();
    if !h.is_square() || v.len() != n {
        return Err(Error::DimensionMismatch("unitary action shape".into()));
    }
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    for i in 0..n {
        let radius: T = (0..n).filter(|&j| j != i).map(|j| h[(i, j)].norm()).sum();
        let d = h[(i, i)].re;
        lo = lo.min(d - radius);
        hi = hi.max(d + radius);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let center = (hi + lo) * T::lit(0.5);
    let half_width = ((hi - lo) * T::lit(0.5)).max(T::lit(1e-300).max(T::min_positive_value()));
    let z = t * half_width;
    let coeffs = bessel_j_sequence(z);

    // X = (H - center) / half_width has spectrum in [-1, 1].
    let apply_x = |w: &[C<T>]| -> Vec<C<T>> {
        let hw = h.matvec(w);
        hw.iter()
            .zip(w)
            .map(|(a, b)| (*a - *b * center) / half_width)
            .collect()
    };
    // exp(-i z x) = J0(z) + 2 sum_k (-i)^k J_k(z) T_k(x)
    let minus_i = C::new(T::zero(), -T::one());
    let mut acc: Vec<C<T>> = v.iter().map(|x| *x * coeffs[0]).collect();
    let mut t_prev: Vec<C<T>> = v.to_vec();
    let mut t_cur = apply_x(v);
    let mut phase = minus_i;
    let two = T::lit(2.0);
    for (k, &jk) in coeffs.iter().enumerate().skip(1) {
        let w = phase * (two * jk);
        for (a, x) in acc.iter_mut().zip(&t_cur) {
            *a += *x * w;
        }
        if k + 1 < coeffs.len() {
            let xt = apply_x(&t_cur);
            let next: Vec<C<T>> = xt.iter().zip(&t_prev).map(|(a, b)| *a * two - *b).collect();
            t_prev = std::mem::replace(&mut t_cur, next);
        }
        phase *= minus_i;
    }
    let global = C::new(T::zero(), -(t * center)).exp();
    let out: Vec<C<T>> = acc.into_iter().map(|x| x * global).collect();
    if out.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite);
    }
    Ok(out)
}

/// `J_0(z), ..., J_K(z)` with `K` large enough that the tail is below
/// machine precision. Miller backward recurrence normalized by
/// `J_0 + 2 sum J_{2k} = 1`.
fn bessel_j_sequence<T: Real>(z: T) -> Vec<T> {
    let za = z.abs().to_f64_lossy();
    if za < 1e-300 {
        return vec![T::one()];
    }
    if za < 1.0 {
        return bessel_series(z);
    }
    let keep = (za + 10.0 * za.cbrt() + 25.0).ceil() as usize;
    let mut start = keep + 20 + (za.sqrt() * 2.0) as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut vals = vec![0.0f64; start + 2];
    vals[start] = 1e-300;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * k as f64 / za * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            for v in vals.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    let norm = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    let sign = if z < T::zero() { -1.0 } else { 1.0 };
    vals.truncate(keep + 1);
    vals.iter()
        .enumerate()
        .map(|(k, v)| {
            let s = if k % 2 == 1 { sign } else { 1.0 };
            T::lit(s * v / norm)
        })
        .collect()
}

/// Power series for small arguments, where the backward recurrence overflows.
fn bessel_series<T: Real>(z: T) -> Vec<T> {
    let h = z.to_f64_lossy() / 2.0;
    let mut out = Vec::new();
    let mut lead = 1.0f64;
    for k in 0.. {
        if k > 0 {
            lead *= h / k as f64;
        }
        if k > 1 && lead.abs() < 1e-18 {
            break;
        }
        let mut term = lead;
        let mut sum = 0.0;
        for m in 1..40 {
            sum += term;
            term *= -h * h / (m as f64 * (m + k) as f64);
            if term.abs() < 1e-20 * sum.abs() {
                sum += term;
                break;
            }
        }
        out.push(T::lit(sum));
    }
    out
}
