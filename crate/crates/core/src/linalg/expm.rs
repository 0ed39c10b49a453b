//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants (degrees 3, 5, 7, 9, 13), following Higham's 2005 scheme.

use num_complex::Complex;

use super::{ensure_square, identity, one_norm};
use crate::error::{Error, Result};
use crate::scalar::{ComplexMatrix, Real};

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Largest 1-norm for which the degree-m approximant is accurate to unit
// roundoff in double precision.
const THETA3: f64 = 1.495585217958292e-2;
const THETA5: f64 = 2.539_398_330_063_23e-1;
const THETA7: f64 = 9.504178996162932e-1;
const THETA9: f64 = 2.097847961257068e0;
const THETA13: f64 = 5.371920351148152e0;

fn scaled<T: Real>(m: &ComplexMatrix<T>, s: f64) -> ComplexMatrix<T> {
    let f = Complex::new(T::of(s), T::zero());
    m.map(|z| z * f)
}

/// Accumulates `sum_k coeffs[k] * powers[k]`; `powers[0]` is the identity.
fn combine<T: Real>(coeffs: &[f64], powers: &[&ComplexMatrix<T>]) -> ComplexMatrix<T> {
    let n = powers[0].nrows();
    let mut acc = ComplexMatrix::<T>::zeros(n, n);
    for (c, p) in coeffs.iter().zip(powers) {
        acc += scaled(p, *c);
    }
    acc
}

fn pade_low<T: Real>(a: &ComplexMatrix<T>, b: &[f64]) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let n = a.nrows();
    let id = identity::<T>(n);
    let a2 = a * a;
    let mut powers = vec![id];
    // even powers I, A^2, A^4, ...
    while powers.len() * 2 < b.len() {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    let refs: Vec<&ComplexMatrix<T>> = powers.iter().collect();
    let odd: Vec<f64> = b.iter().skip(1).step_by(2).copied().collect();
    let even: Vec<f64> = b.iter().step_by(2).copied().collect();
    let u = a * combine(&odd, &refs[..odd.len()]);
    let v = combine(&even, &refs[..even.len()]);
    (u, v)
}

fn pade13<T: Real>(a: &ComplexMatrix<T>) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let n = a.nrows();
    let id = identity::<T>(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &B13;
    let inner_u = &a6 * combine(&[b[13], b[11], b[9]], &[&a6, &a4, &a2]);
    let u = a * (inner_u + combine(&[b[7], b[5], b[3], b[1]], &[&a6, &a4, &a2, &id]));
    let inner_v = &a6 * combine(&[b[12], b[10], b[8]], &[&a6, &a4, &a2]);
    let v = inner_v + combine(&[b[6], b[4], b[2], b[0]], &[&a6, &a4, &a2, &id]);
    (u, v)
}

/// Matrix exponential `e^a`.
pub fn mat_exp<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let n = ensure_square(a)?;
    if n == 0 {
        return Ok(a.clone());
    }
    let norm = one_norm(a).as_f64();
    if !norm.is_finite() {
        return Err(Error::Numerical("matrix exponential of a non-finite matrix".into()));
    }
    if norm == 0.0 {
        return Ok(identity(n));
    }

    let (u, v, squarings) = if norm <= THETA3 {
        let (u, v) = pade_low(a, &B3);
        (u, v, 0)
    } else if norm <= THETA5 {
        let (u, v) = pade_low(a, &B5);
        (u, v, 0)
    } else if norm <= THETA7 {
        let (u, v) = pade_low(a, &B7);
        (u, v, 0)
    } else if norm <= THETA9 {
        let (u, v) = pade_low(a, &B9);
        (u, v, 0)
    } else {
        let s = (norm / THETA13).log2().ceil().max(0.0) as i32;
        let a_s = scaled(a, 2f64.powi(-s));
        let (u, v) = pade13(&a_s);
        (u, v, s)
    };

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| Error::Numerical("singular Padé denominator in matrix exponential".into()))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}
