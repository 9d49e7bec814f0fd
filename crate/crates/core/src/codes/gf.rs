//! Arithmetic in small finite fields GF(p^k) and the quadratic character,
//! used by the Paley and conference-matrix constructions.
//!
//! Elements are encoded as integers in [0, q): the base-p digits of the
//! index are the coefficients of a polynomial over GF(p), reduced modulo a
//! fixed irreducible monic polynomial (the lexicographically first one, for
//! determinism). Fields here never exceed a few hundred elements, so a full
//! multiplication table is precomputed.

use super::CodesError;

#[derive(Debug, Clone)]
pub struct SmallField {
    p: u32,
    q: u32,
    is_square: Vec<bool>,
}

/// Splits q into (p, k) if q is a prime power, otherwise None.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut n = q;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            return if n == 1 { Some((p, k)) } else { None };
        }
        p += 1;
    }
    Some((q, 1))
}

impl SmallField {
    pub fn new(q: u32) -> Result<Self, CodesError> {
        let (p, k) = prime_power(q).ok_or_else(|| {
            CodesError::InvalidInput(format!("{q} is not a prime power"))
        })?;
        let modpoly = if k == 1 { vec![0, 1] } else { find_irreducible(p, k) };
        let mut is_square = vec![false; q as usize];
        for a in 1..q {
            is_square[poly_mulmod(a, a, p, k, &modpoly) as usize] = true;
        }
        Ok(Self { p, q, is_square })
    }

    /// Multiplication for tests and diagnostics; field use at runtime only
    /// needs the character and subtraction.
    #[cfg(test)]
    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let (p, k) = prime_power(self.q).expect("validated on construction");
        let modpoly = if k == 1 { vec![0, 1] } else { find_irreducible(p, k) };
        poly_mulmod(a, b, p, k, &modpoly)
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        // Digit-wise subtraction mod p.
        let mut out = 0;
        let mut a = a;
        let mut b = b;
        let mut place = 1;
        while a > 0 || b > 0 {
            let da = a % self.p;
            let db = b % self.p;
            out += ((da + self.p - db) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    /// Quadratic character: 0 at zero, +1 on nonzero squares, −1 otherwise.
    pub fn chi(&self, a: u32) -> i8 {
        if a == 0 {
            0
        } else if self.is_square[a as usize] {
            1
        } else {
            -1
        }
    }
}

/// Multiplies two field elements given as digit encodings and reduces by
/// the monic modulus polynomial (ascending coefficients, degree k).
fn poly_mulmod(a: u32, b: u32, p: u32, k: u32, modpoly: &[u32]) -> u32 {
    let da = digits(a, p, k);
    let db = digits(b, p, k);
    let mut prod = vec![0u32; (2 * k - 1) as usize];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // Reduce: x^k ≡ −(modpoly[0] + ... + modpoly[k-1] x^{k-1}).
    for d in (k as usize..prod.len()).rev() {
        let c = prod[d];
        if c != 0 {
            prod[d] = 0;
            for j in 0..k as usize {
                let sub = (c * modpoly[j]) % p;
                prod[d - k as usize + j] = (prod[d - k as usize + j] + p - sub) % p;
            }
        }
    }
    encode(&prod[..k as usize], p)
}

fn digits(mut a: u32, p: u32, k: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(k as usize);
    for _ in 0..k {
        out.push(a % p);
        a /= p;
    }
    out
}

fn encode(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Lexicographically first monic irreducible polynomial of degree k over
/// GF(p), by trial division against every monic polynomial of degree
/// 1..=k/2.
fn find_irreducible(p: u32, k: u32) -> Vec<u32> {
    let tail_count = p.pow(k);
    for idx in 0..tail_count {
        let mut poly = digits(idx, p, k);
        poly.push(1); // monic of degree k
        if is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("an irreducible polynomial of degree {k} over GF({p}) exists");
}

fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let k = poly.len() - 1;
    for d in 1..=k / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut div = digits(idx, p, d as u32);
            div.push(1);
            if poly_rem_is_zero(poly, &div, p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(poly: &[u32], div: &[u32], p: u32) -> bool {
    let mut rem: Vec<u32> = poly.to_vec();
    let d = div.len() - 1;
    while rem.len() > d {
        let c = *rem.last().unwrap();
        if c != 0 {
            let off = rem.len() - 1 - d;
            for (j, &v) in div.iter().enumerate() {
                rem[off + j] = (rem[off + j] + p - (c * v) % p) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(49), Some((7, 2)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn prime_field_character_matches_euler_criterion() {
        let f = SmallField::new(11).unwrap();
        for a in 1..11u32 {
            let euler = {
                let mut acc = 1u64;
                for _ in 0..5 {
                    acc = acc * a as u64 % 11;
                }
                if acc == 1 { 1 } else { -1 }
            };
            assert_eq!(f.chi(a) as i64, euler, "a={a}");
        }
    }

    fn check_field_axioms(q: u32) {
        let f = SmallField::new(q).unwrap();
        // Multiplicative group: every nonzero element has an inverse, and
        // exactly (q-1)/2 nonzero elements are squares.
        let mut squares = 0;
        for a in 1..q {
            assert!(
                (1..q).any(|b| f.mul_slow(a, b) == 1),
                "no inverse for {a} in GF({q})"
            );
            if f.chi(a) == 1 {
                squares += 1;
            }
        }
        assert_eq!(squares, (q - 1) / 2);
        // Character sum over the whole field is zero.
        let total: i32 = (0..q).map(|a| f.chi(a) as i32).sum();
        assert_eq!(total, 0);
    }

    #[test]
    fn extension_fields_are_fields() {
        for &q in &[9u32, 25, 27, 49, 81] {
            check_field_axioms(q);
        }
    }

    #[test]
    fn subtraction_is_additive_inverse() {
        for &q in &[13u32, 25, 27] {
            let f = SmallField::new(q).unwrap();
            for a in 0..q {
                for b in 0..q {
                    let d = f.sub(a, b);
                    // (a - b) + b == a, digit-wise.
                    let back = {
                        let mut out = 0;
                        let mut x = d;
                        let mut y = b;
                        let mut place = 1;
                        while x > 0 || y > 0 {
                            out += ((x % f.p) + (y % f.p)) % f.p * place;
                            x /= f.p;
                            y /= f.p;
                            place *= f.p;
                        }
                        out
                    };
                    assert_eq!(back, a);
                }
            }
        }
    }
}
