//! Exact arithmetic over the R-th roots of unity.
//!
//! A root is stored as an integer exponent mod R, so products and
//! conjugates never leave the integers. Whether a finite sum of roots is
//! exactly zero is decided algebraically: the sum vanishes iff its
//! coefficient polynomial is divisible by the R-th cyclotomic polynomial.
//! No floating-point tolerance is involved anywhere in this module.

use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CyclotomicError {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("modulus must be at least 1, got {0}")]
    InvalidModulus(u32),
    #[error("exponent {exponent} out of range for modulus {modulus}")]
    ExponentOutOfRange { exponent: u32, modulus: u32 },
}

/// An element of T_R = {e^{j2πr/R}}, stored as the exponent r.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnitRoot {
    exponent: u32,
    modulus: u32,
}

impl UnitRoot {
    pub fn new(exponent: u32, modulus: u32) -> Result<Self, CyclotomicError> {
        if modulus == 0 {
            return Err(CyclotomicError::InvalidModulus(modulus));
        }
        if exponent >= modulus {
            return Err(CyclotomicError::ExponentOutOfRange { exponent, modulus });
        }
        Ok(Self { exponent, modulus })
    }

    /// Reduces an arbitrary signed exponent into [0, modulus).
    pub fn normalized(exponent: i64, modulus: u32) -> Result<Self, CyclotomicError> {
        if modulus == 0 {
            return Err(CyclotomicError::InvalidModulus(modulus));
        }
        let e = exponent.rem_euclid(modulus as i64) as u32;
        Ok(Self { exponent: e, modulus })
    }

    pub fn one(modulus: u32) -> Self {
        Self { exponent: 0, modulus }
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn mul(&self, other: &UnitRoot) -> Result<UnitRoot, CyclotomicError> {
        if self.modulus != other.modulus {
            return Err(CyclotomicError::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(UnitRoot {
            exponent: (self.exponent + other.exponent) % self.modulus,
            modulus: self.modulus,
        })
    }

    pub fn conj(&self) -> UnitRoot {
        UnitRoot {
            exponent: (self.modulus - self.exponent) % self.modulus,
            modulus: self.modulus,
        }
    }

    /// Numeric value e^{j2π·exponent/modulus}; for simulation only, never
    /// for verification.
    pub fn value(&self) -> Complex64 {
        let theta = TAU * self.exponent as f64 / self.modulus as f64;
        Complex64::new(theta.cos(), theta.sin())
    }
}

/// An integer combination Σ_r coeffs[r]·e^{j2πr/R}, represented exactly.
///
/// Coefficients are signed so that conjugated or differenced sums reuse the
/// same zero test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSum {
    coeffs: Vec<i64>,
}

impl RootSum {
    pub fn new(modulus: u32) -> Result<Self, CyclotomicError> {
        if modulus == 0 {
            return Err(CyclotomicError::InvalidModulus(modulus));
        }
        Ok(Self { coeffs: vec![0; modulus as usize] })
    }

    pub fn from_coefficients(coeffs: Vec<i64>) -> Result<Self, CyclotomicError> {
        if coeffs.is_empty() {
            return Err(CyclotomicError::InvalidModulus(0));
        }
        Ok(Self { coeffs })
    }

    pub fn modulus(&self) -> u32 {
        self.coeffs.len() as u32
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn add_exponent(&mut self, exponent: u32, weight: i64) {
        let r = (exponent as usize) % self.coeffs.len();
        self.coeffs[r] += weight;
    }

    pub fn add_root(&mut self, root: &UnitRoot, weight: i64) -> Result<(), CyclotomicError> {
        if root.modulus() != self.modulus() {
            return Err(CyclotomicError::ModulusMismatch(root.modulus(), self.modulus()));
        }
        self.add_exponent(root.exponent(), weight);
        Ok(())
    }

    pub fn add(&mut self, other: &RootSum) -> Result<(), CyclotomicError> {
        if other.modulus() != self.modulus() {
            return Err(CyclotomicError::ModulusMismatch(other.modulus(), self.modulus()));
        }
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += o;
        }
        Ok(())
    }

    /// Exact zero test: the represented complex sum equals 0 iff the
    /// coefficient polynomial is divisible by Φ_R over the integers.
    pub fn is_zero(&self) -> bool {
        if self.coeffs.iter().all(|&c| c == 0) {
            return true;
        }
        let phi = cyclotomic_polynomial(self.modulus());
        poly_divisible(&self.coeffs, &phi)
    }

    /// Floating-point evaluation; used by tests as an independent check.
    pub fn value(&self) -> Complex64 {
        let r = self.coeffs.len() as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let theta = TAU * k as f64 / r;
                Complex64::new(theta.cos(), theta.sin()) * c as f64
            })
            .sum()
    }
}

/// Convenience wrapper over [`RootSum::is_zero`].
pub fn sum_is_zero(s: &RootSum) -> bool {
    s.is_zero()
}

/// Coefficients of Φ_R(x), ascending degree, computed by dividing x^R − 1
/// by Φ_d for every proper divisor d of R. Memoized; R stays small (≤ 64
/// in practice) so the recursion cost is negligible.
pub fn cyclotomic_polynomial(r: u32) -> Vec<i64> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<i64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&r) {
        return p.clone();
    }
    let poly = compute_cyclotomic(r);
    cache.lock().unwrap().insert(r, poly.clone());
    poly
}

fn compute_cyclotomic(r: u32) -> Vec<i64> {
    assert!(r >= 1, "cyclotomic polynomial undefined for R = 0");
    if r == 1 {
        return vec![-1, 1]; // x - 1
    }
    // x^R - 1
    let mut num = vec![0i64; r as usize + 1];
    num[0] = -1;
    num[r as usize] = 1;
    for d in 1..r {
        if r % d == 0 {
            num = poly_div_exact(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

/// Exact quotient of dividend by a monic divisor that is known to divide it.
fn poly_div_exact(dividend: &[i64], divisor: &[i64]) -> Vec<i64> {
    let n = dividend.len();
    let m = divisor.len();
    debug_assert!(m >= 1 && divisor[m - 1] == 1, "divisor must be monic");
    debug_assert!(n >= m);
    let mut rem: Vec<i64> = dividend.to_vec();
    let mut quot = vec![0i64; n - m + 1];
    for i in (0..quot.len()).rev() {
        let c = rem[i + m - 1];
        quot[i] = c;
        if c != 0 {
            for (j, &d) in divisor.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "division was not exact");
    quot
}

/// True iff the monic divisor divides the dividend over the integers.
/// Remainder arithmetic runs in i128: cyclotomic coefficients are tiny for
/// the moduli used here, but intermediate remainders can grow.
fn poly_divisible(dividend: &[i64], divisor: &[i64]) -> bool {
    let m = divisor.len();
    debug_assert!(divisor[m - 1] == 1);
    let mut rem: Vec<i128> = dividend.iter().map(|&c| c as i128).collect();
    while rem.len() >= m {
        let c = *rem.last().unwrap();
        if c != 0 {
            let off = rem.len() - m;
            for (j, &d) in divisor.iter().enumerate() {
                rem[off + j] -= c * d as i128;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}

/// Distinct prime factors of n, ascending.
pub fn distinct_prime_factors(n: u32) -> Vec<u32> {
    let mut n = n;
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Membership in W(R): true iff M is a nonzero nonnegative integer
/// combination of the distinct prime factors of R. Dynamic programming over
/// reachable sums up to M.
pub fn vanishing_set_contains(m: u32, r: u32) -> bool {
    assert!(m >= 1, "M must be positive");
    assert!(r >= 2, "R must be at least 2");
    let primes = distinct_prime_factors(r);
    let m = m as usize;
    let mut reachable = vec![false; m + 1];
    reachable[0] = true;
    for &p in &primes {
        let p = p as usize;
        for s in p..=m {
            if reachable[s - p] {
                reachable[s] = true;
            }
        }
    }
    reachable[m]
}
