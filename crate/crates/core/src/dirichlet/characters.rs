//! Real Dirichlet characters stored as value tables, and the Kronecker
//! symbol for fundamental discriminants.

use serde::{Deserialize, Serialize};

use super::DirichletError;

/// A Dirichlet character mod `modulus`, stored as `values[n mod q]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletCharacter {
    modulus: u64,
    values: Vec<f64>,
}

impl DirichletCharacter {
    pub fn new(modulus: u64, values: Vec<f64>) -> Result<Self, DirichletError> {
        if modulus == 0 || values.len() as u64 != modulus {
            return Err(DirichletError::InvalidSeries(format!(
                "character table must have exactly `modulus` entries (modulus {modulus}, {} values)",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DirichletError::InvalidSeries("character values must be finite".into()));
        }
        Ok(Self { modulus, values })
    }

    /// `chi_D(n) = (D/n)` for a fundamental discriminant `D`.
    pub fn kronecker(discriminant: i64) -> Result<Self, DirichletError> {
        if !is_fundamental_discriminant(discriminant) {
            return Err(DirichletError::NotFundamental(discriminant));
        }
        let q = discriminant.unsigned_abs();
        let values = (0..q).map(|n| kronecker_symbol(discriminant, n) as f64).collect();
        Self::new(q, values)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, n: u64) -> f64 {
        self.values[(n % self.modulus) as usize]
    }

    /// True when the character is 1 on every residue coprime to the modulus.
    pub fn is_principal(&self) -> bool {
        (1..self.modulus)
            .filter(|&r| gcd(r, self.modulus) == 1)
            .chain(std::iter::once(1))
            .all(|r| self.at(r) == 1.0)
    }

    /// `chi(-1) = -1`.
    pub fn is_odd(&self) -> bool {
        self.at(self.modulus - 1) < 0.0
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn is_squarefree(mut m: u64) -> bool {
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p * p) {
            return false;
        }
        if m.is_multiple_of(p) {
            m /= p;
        }
        p += 1;
    }
    true
}

/// Discriminant of a quadratic field: `D = 1 mod 4` squarefree, or
/// `D = 4m` with `m = 2, 3 mod 4` squarefree. `D = 1` is excluded.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// Jacobi symbol `(a/m)` for odd positive `m`.
fn jacobi(a: i64, m: u64) -> i32 {
    debug_assert!(m % 2 == 1);
    let mut a = a.rem_euclid(m as i64) as u64;
    let mut m = m;
    let mut result = 1;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if matches!(m % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

/// Kronecker symbol `(d/n)` for `n >= 0`.
pub fn kronecker_symbol(d: i64, n: u64) -> i32 {
    if n == 0 {
        return if d.unsigned_abs() == 1 { 1 } else { 0 };
    }
    let twos = n.trailing_zeros();
    let odd = n >> twos;
    let two_part = if twos == 0 {
        1
    } else if d % 2 == 0 {
        0
    } else {
        let k = match d.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        };
        if twos.is_multiple_of(2) {
            1
        } else {
            k
        }
    };
    two_part * jacobi(d, odd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fundamental_discriminants() {
        let good = [-3, -4, -7, -8, -11, 5, 8, 12, 13, -20, 28];
        let bad = [0, 1, -1, 2, 3, -12, 9, 16, -16, 20, 45];
        for d in good {
            assert!(is_fundamental_discriminant(d), "{d}");
        }
        for d in bad {
            assert!(!is_fundamental_discriminant(d), "{d}");
        }
    }

    #[test]
    fn chi_minus_four_is_the_alternating_character() {
        let chi = DirichletCharacter::kronecker(-4).unwrap();
        assert_eq!(chi.values(), &[0.0, 1.0, 0.0, -1.0]);
        assert!(chi.is_odd());
        assert!(!chi.is_principal());
    }

    #[test]
    fn kronecker_agrees_with_euler_criterion_for_odd_primes() {
        // (D/p) = D^((p-1)/2) mod p
        for &d in &[-3i64, -7, 5, 13, -23] {
            for &p in &[3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
                let r = d.rem_euclid(p as i64) as u64;
                let mut e = 1u64;
                for _ in 0..(p - 1) / 2 {
                    e = e * r % p;
                }
                let expect = match e {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                };
                assert_eq!(kronecker_symbol(d, p), expect, "d={d} p={p}");
            }
        }
    }

    #[test]
    fn kronecker_is_multiplicative_in_n() {
        for &d in &[-4i64, -8, 5, 12, -15] {
            for m in 1..40u64 {
                for n in 1..40u64 {
                    assert_eq!(kronecker_symbol(d, m * n), kronecker_symbol(d, m) * kronecker_symbol(d, n));
                }
            }
        }
    }

    #[test]
    fn rejects_non_fundamental() {
        assert!(matches!(DirichletCharacter::kronecker(-12), Err(DirichletError::NotFundamental(-12))));
        assert!(DirichletCharacter::new(3, vec![0.0, 1.0]).is_err());
    }
}
