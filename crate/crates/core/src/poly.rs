//! Dense univariate integer polynomials in `x`.
//!
//! The hypergeometric families, the conjecture coefficients and the p-adic
//! evaluations all live in `Z[x]`; a dense coefficient vector is both simpler
//! and much faster there than the sparse multivariate type.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::laurent::{Context, ExpVector, LaurentPoly, ModulusContext};
use crate::report::{CongruenceReport, Witness};

/// `coeffs[k]` is the coefficient of `x^k`; no trailing zeros are stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: Vec<BigInt>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::from_coeffs(vec![c.into()])
    }

    /// `c * x^k`.
    pub fn monomial(k: usize, c: impl Into<BigInt>) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c.into();
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        UniPoly::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        UniPoly::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|v| v * c).collect())
    }

    /// Schoolbook product; the sparse `x^p` factors skip their zero slots.
    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        UniPoly::from_coeffs(out)
    }

    /// Product with every coefficient reduced modulo `m` (a machine-size
    /// modulus); the result has representatives in `[0, m)`.
    pub fn mul_mod(&self, other: &UniPoly, m: u64) -> UniPoly {
        let a = self.residues(m);
        let b = other.residues(m);
        if a.is_empty() || b.is_empty() {
            return UniPoly::zero();
        }
        let mut out = vec![0u128; a.len() + b.len() - 1];
        let m128 = m as u128;
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y != 0 {
                    out[i + j] = (out[i + j] + x as u128 * y as u128) % m128;
                }
            }
        }
        UniPoly::from_coeffs(out.into_iter().map(BigInt::from).collect())
    }

    /// Coefficients reduced into `[0, m)` as machine integers.
    pub fn residues(&self, m: u64) -> Vec<u64> {
        self.coeffs.iter().map(|c| arith::mod_floor_u64(c, m)).collect()
    }

    /// The substitution `x -> x^q`.
    pub fn substitute_power(&self, q: usize) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); (self.coeffs.len() - 1) * q + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * q] = c.clone();
        }
        UniPoly { coeffs }
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::from_coeffs(
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k).collect(),
        )
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        UniPoly { coeffs }
    }

    pub fn reduce_mod(&self, m: &ModulusContext) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|c| c.mod_floor(m.modulus())).collect())
    }

    pub fn divisible_by(&self, m: &BigInt) -> bool {
        self.coeffs.iter().all(|c| (c % m).is_zero())
    }

    /// Minimum p-adic valuation of the coefficients; `None` for zero.
    pub fn valuation(&self, p: u64) -> Option<u32> {
        self.coeffs.iter().filter_map(|c| arith::valuation(c, p)).min()
    }

    /// Horner evaluation modulo `m`.
    pub fn eval_mod(&self, x: u64, m: u64) -> u64 {
        let x = x % m;
        self.coeffs.iter().rev().fold(0u64, |acc, c| {
            (arith::mul_mod(acc, x, m) + arith::mod_floor_u64(c, m)) % m
        })
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Embeds the polynomial as a Laurent polynomial in `z_{var+1}`.
    pub fn to_laurent(&self, ctx: Context, var: usize) -> LaurentPoly {
        let terms = self.coeffs.iter().enumerate().map(|(k, c)| {
            let mut e = ExpVector::zero(ctx);
            e.z[var] = k as i64;
            (e, c.clone())
        });
        LaurentPoly::from_terms(ctx, terms).expect("exponent lengths match context")
    }

    /// Reads a Laurent polynomial whose only variable is `z_{var+1}`,
    /// with nonnegative exponents.
    pub fn from_laurent(a: &LaurentPoly, var: usize) -> Option<UniPoly> {
        let mut coeffs: Vec<BigInt> = Vec::new();
        for (e, c) in a.terms() {
            if e.t.iter().any(|&x| x != 0)
                || e.z.iter().enumerate().any(|(i, &x)| i != var && x != 0)
            {
                return None;
            }
            let k = usize::try_from(e.z[var]).ok()?;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, BigInt::zero());
            }
            coeffs[k] = c.clone();
        }
        Some(UniPoly::from_coeffs(coeffs))
    }
}

/// A polynomial with coefficients held as residues in `[0, m)`.
///
/// Used when only a congruence class is needed and the exact coefficients
/// would be thousands of digits long (e.g. `P_4` at `p = 13`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResiduePoly {
    modulus: u64,
    coeffs: Vec<u64>,
}

impl ResiduePoly {
    pub fn new(modulus: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= modulus;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        ResiduePoly { modulus, coeffs }
    }

    pub fn one(modulus: u64) -> Self {
        Self::new(modulus, vec![1])
    }

    pub fn from_unipoly(a: &UniPoly, modulus: u64) -> Self {
        Self::new(modulus, a.residues(modulus))
    }

    pub fn to_unipoly(&self) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus;
        Self::new(m, self.coeffs.iter().map(|&c| (m - c) % m).collect())
    }

    pub fn sub(&self, other: &ResiduePoly) -> Self {
        assert_eq!(self.modulus, other.modulus, "residue moduli differ");
        let m = self.modulus;
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[u64], k: usize| v.get(k).copied().unwrap_or(0);
        Self::new(m, (0..n).map(|k| (get(&self.coeffs, k) + m - get(&other.coeffs, k)) % m).collect())
    }

    /// Product; zero slots of either factor are skipped, so `B(x^p)` factors
    /// cost only their nonzero terms.
    pub fn mul(&self, other: &ResiduePoly) -> Self {
        assert_eq!(self.modulus, other.modulus, "residue moduli differ");
        if self.is_zero() || other.is_zero() {
            return Self::new(self.modulus, Vec::new());
        }
        let m = self.modulus as u128;
        let sparse: Vec<(usize, u128)> = other
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| (j, c as u128))
            .collect();
        let mut out = vec![0u128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let a = a as u128;
            for &(j, b) in &sparse {
                out[i + j] = (out[i + j] + a * b) % m;
            }
        }
        Self::new(self.modulus, out.into_iter().map(|c| c as u64).collect())
    }

    pub fn substitute_power(&self, q: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0u64; (self.coeffs.len() - 1) * q + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            coeffs[k * q] = c;
        }
        ResiduePoly { modulus: self.modulus, coeffs }
    }

    pub fn derivative(&self) -> Self {
        let m = self.modulus;
        Self::new(
            m,
            self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| arith::mul_mod(c, k as u64 % m, m)).collect(),
        )
    }

    pub fn eval(&self, x: u64) -> u64 {
        let m = self.modulus;
        let x = x % m;
        self.coeffs.iter().rev().fold(0u64, |acc, &c| (arith::mul_mod(acc, x, m) + c) % m)
    }

    /// Lowest `k` with a nonzero coefficient, with that coefficient.
    pub fn first_nonzero(&self) -> Option<(usize, u64)> {
        self.coeffs.iter().enumerate().find(|(_, &c)| c != 0).map(|(k, &c)| (k, c))
    }
}

/// Checks `a ≡ b` where both sides are already residues modulo `p^s`.
pub fn congruent_residues(a: &ResiduePoly, b: &ResiduePoly, m: &ModulusContext, description: &str) -> CongruenceReport {
    let witness = a
        .sub(b)
        .first_nonzero()
        .map(|(k, r)| Witness { monomial: x_monomial(k), residue: r.to_string() });
    CongruenceReport::from_witness(description, Some(m.as_modulus()), witness)
}

/// Checks `a ≡ b (mod p^s)`; the witness is the lowest offending power of `x`.
pub fn congruent(a: &UniPoly, b: &UniPoly, m: &ModulusContext, description: &str) -> CongruenceReport {
    let n = a.coeffs.len().max(b.coeffs.len());
    let witness = (0..n).find_map(|k| {
        let r = (a.coeff(k) - b.coeff(k)).mod_floor(m.modulus());
        (!r.is_zero()).then(|| Witness { monomial: x_monomial(k), residue: r.to_string() })
    });
    CongruenceReport::from_witness(description, Some(m.as_modulus()), witness)
}

/// Checks `a = b` exactly.
pub fn identical(a: &UniPoly, b: &UniPoly, description: &str) -> CongruenceReport {
    let n = a.coeffs.len().max(b.coeffs.len());
    let witness = (0..n).find_map(|k| {
        let d = a.coeff(k) - b.coeff(k);
        (!d.is_zero()).then(|| Witness { monomial: x_monomial(k), residue: d.to_string() })
    });
    CongruenceReport::from_witness(description, None, witness)
}

fn x_monomial(k: usize) -> String {
    match k {
        0 => "1".to_string(),
        1 => "x".to_string(),
        _ => format!("x^{k}"),
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let body = if k == 0 { mag.to_string() } else { format!("{mag}*{}", x_monomial(k)) };
            match (first, c.is_negative()) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = UniPoly::from_i64(&[1, 1]);
        assert_eq!(a.mul(&a), UniPoly::from_i64(&[1, 2, 1]));
        assert_eq!(a.sub(&a), UniPoly::zero());
        assert_eq!(a.substitute_power(3), UniPoly::from_i64(&[1, 0, 0, 1]));
        assert_eq!(UniPoly::from_i64(&[5, 3, 2]).derivative(), UniPoly::from_i64(&[3, 4]));
        assert_eq!(a.shift(2), UniPoly::from_i64(&[0, 0, 1, 1]));
        assert_eq!(a.to_string(), "1 + 1*x");
    }

    #[test]
    fn modular_product_matches_exact() {
        let a = UniPoly::from_i64(&[7, -3, 12, 40]);
        let b = UniPoly::from_i64(&[-1, 0, 9]);
        let m = ModulusContext::new(5, 2).unwrap();
        assert_eq!(a.mul_mod(&b, 25), a.mul(&b).reduce_mod(&m));
    }

    #[test]
    fn evaluation() {
        let a = UniPoly::from_i64(&[1, 4, 1]);
        assert_eq!(a.eval_mod(2, 25), 13);
        assert_eq!(a.eval(&BigInt::from(-3)), BigInt::from(-2));
        assert_eq!(UniPoly::from_i64(&[-1]).eval_mod(0, 9), 8);
    }

    #[test]
    fn congruence_witness() {
        let m = ModulusContext::new(3, 1).unwrap();
        let a = UniPoly::from_i64(&[1, 15, 36, 15]);
        let r = congruent(&a, &UniPoly::one(), &m, "d");
        assert!(r.pass);
        let r = congruent(&UniPoly::from_i64(&[0, 3, 4]), &UniPoly::zero(), &m, "d");
        assert_eq!(r.witness.unwrap(), Witness { monomial: "x^2".into(), residue: "1".into() });
    }

    #[test]
    fn residue_polys_track_exact_arithmetic() {
        let a = UniPoly::from_i64(&[7, -3, 12, 40]);
        let b = UniPoly::from_i64(&[-1, 0, 9]);
        let ra = ResiduePoly::from_unipoly(&a, 27);
        let rb = ResiduePoly::from_unipoly(&b, 27);
        let m = ModulusContext::new(3, 3).unwrap();
        assert_eq!(ra.mul(&rb.substitute_power(3)).to_unipoly(), a.mul(&b.substitute_power(3)).reduce_mod(&m));
        assert_eq!(ra.sub(&rb).to_unipoly(), a.sub(&b).reduce_mod(&m));
        assert_eq!(ra.derivative().to_unipoly(), a.derivative().reduce_mod(&m));
        assert_eq!(ra.eval(5), a.eval_mod(5, 27));
        assert!(congruent_residues(&ra, &ra, &m, "self").pass);
        assert_eq!(ra.sub(&rb).first_nonzero(), Some((0, 8)));
    }

    #[test]
    fn laurent_round_trip() {
        let ctx = Context::new(1, 1);
        let a = UniPoly::from_i64(&[2, 0, -1]);
        let l = a.to_laurent(ctx, 0);
        assert_eq!(UniPoly::from_laurent(&l, 0), Some(a));
    }
}
