//! Complete elliptic integral of the first kind and Jacobi elliptic
//! functions, both by the arithmetic–geometric mean.
//!
//! Functions take the modulus `k`; the parameter is `m = k²`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const AGM_TOL: f64 = 1e-16;
const MAX_STEPS: usize = 64;

fn check_modulus(k: f64) -> Result<()> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::precondition(format!(
            "elliptic modulus must satisfy 0 <= k < 1, got {k}"
        )));
    }
    Ok(())
}

/// AGM ladder `(a_n, c_n)` starting from `a₀ = 1`, `b₀ = √(1−k²)`, `c₀ = k`.
fn agm_ladder(k: f64) -> (Vec<f64>, Vec<f64>) {
    let mut a = vec![1.0];
    let mut c = vec![k];
    let mut b = (1.0 - k * k).sqrt();
    for _ in 0..MAX_STEPS {
        let an = *a.last().unwrap();
        if c.last().unwrap().abs() <= AGM_TOL * an {
            break;
        }
        let next_a = 0.5 * (an + b);
        let next_c = 0.5 * (an - b);
        b = (an * b).sqrt();
        a.push(next_a);
        c.push(next_c);
    }
    (a, c)
}

/// `K(k) = π / (2 AGM(1, √(1−k²)))`.
pub fn elliptic_k(k: f64) -> Result<f64> {
    check_modulus(k)?;
    let (a, _) = agm_ladder(k);
    Ok(FRAC_PI_2 / a.last().unwrap())
}

/// Jacobi `(sn, cn, dn)(u | k)` by the descending AGM/Landen recursion.
pub fn jacobi(u: f64, k: f64) -> Result<(f64, f64, f64)> {
    check_modulus(k)?;
    if k == 0.0 {
        return Ok((u.sin(), u.cos(), 1.0));
    }
    let (a, c) = agm_ladder(k);
    let n = a.len() - 1;
    let mut phi = 2f64.powi(n as i32) * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    // dn > 0 for real arguments; this form stays accurate where cn = 0
    let dn = (1.0 - k * k * sn * sn).sqrt();
    Ok((sn, cn, dn))
}

pub fn elliptic_cn(u: f64, k: f64) -> Result<f64> {
    jacobi(u, k).map(|(_, cn, _)| cn)
}
