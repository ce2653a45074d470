//! Fixed-precision p-adic integers, Teichmüller lifts, and unit roots of the
//! Legendre family recovered from ratios of approximation polynomials.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::hyperg::{self, Exponent, FamilyTag, HypergError};
use crate::poly::ResiduePoly;
use crate::report::{CongruenceReport, Modulus, Witness};

#[derive(Debug, Error)]
pub enum PadicError {
    #[error(transparent)]
    Hyperg(#[from] HypergError),
    #[error("{0} is not a p-adic unit")]
    NotUnit(String),
    #[error("invalid prime or precision: p = {p}, S = {precision}")]
    InvalidPrecision { p: u64, precision: u32 },
    #[error("precision mismatch: {0} vs {1}")]
    PrecisionMismatch(String, String),
    #[error("the curve y^2 = x(x-1)(x-{alpha}) is singular mod {p}")]
    SingularCurve { alpha: i64, p: u64 },
    #[error("point {0} lies outside the convergence domain")]
    OutsideDomain(String),
    #[error("unit roots are only traced for the half and third families, not {0}")]
    UnsupportedFamily(FamilyTag),
}

/// An element of `Z_p / p^S`, stored as its residue in `[0, p^S)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicInt {
    p: u64,
    precision: u32,
    residue: u64,
}

impl PadicInt {
    pub fn new(a: i64, p: u64, precision: u32) -> Result<Self, PadicError> {
        let m = Self::modulus_for(p, precision)?;
        Ok(PadicInt { p, precision, residue: a.rem_euclid(m as i64) as u64 })
    }

    pub fn from_residue(residue: u64, p: u64, precision: u32) -> Result<Self, PadicError> {
        let m = Self::modulus_for(p, precision)?;
        Ok(PadicInt { p, precision, residue: residue % m })
    }

    fn modulus_for(p: u64, precision: u32) -> Result<u64, PadicError> {
        if p < 3 || !arith::is_prime(p) || precision == 0 {
            return Err(PadicError::InvalidPrecision { p, precision });
        }
        arith::checked_pow(p, precision)
            .filter(|m| *m < 1 << 62)
            .ok_or(PadicError::InvalidPrecision { p, precision })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.precision)
    }

    pub fn is_unit(&self) -> bool {
        !self.residue.is_multiple_of(self.p)
    }

    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    /// Valuation, or `None` when the element is zero at this precision.
    pub fn valuation(&self) -> Option<u32> {
        arith::valuation_u64(self.residue, self.p)
    }

    /// Reduction to a lower precision.
    pub fn reduce(&self, precision: u32) -> PadicInt {
        let precision = precision.min(self.precision).max(1);
        PadicInt { p: self.p, precision, residue: self.residue % self.p.pow(precision) }
    }

    fn same(&self, other: &PadicInt) -> Result<(), PadicError> {
        if self.p != other.p || self.precision != other.precision {
            return Err(PadicError::PrecisionMismatch(self.to_string(), other.to_string()));
        }
        Ok(())
    }

    pub fn add(&self, other: &PadicInt) -> Result<PadicInt, PadicError> {
        self.same(other)?;
        Ok(PadicInt { residue: (self.residue + other.residue) % self.modulus(), ..*self })
    }

    pub fn sub(&self, other: &PadicInt) -> Result<PadicInt, PadicError> {
        self.same(other)?;
        let m = self.modulus();
        Ok(PadicInt { residue: (self.residue + m - other.residue) % m, ..*self })
    }

    pub fn mul(&self, other: &PadicInt) -> Result<PadicInt, PadicError> {
        self.same(other)?;
        Ok(PadicInt { residue: arith::mul_mod(self.residue, other.residue, self.modulus()), ..*self })
    }

    pub fn neg(&self) -> PadicInt {
        let m = self.modulus();
        PadicInt { residue: (m - self.residue) % m, ..*self }
    }

    pub fn pow(&self, e: u64) -> PadicInt {
        PadicInt { residue: arith::pow_mod(self.residue, e, self.modulus()), ..*self }
    }

    pub fn unit_inverse(&self) -> Result<PadicInt, PadicError> {
        unit_inverse(self)
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.p, self.precision)
    }
}

pub fn unit_inverse(u: &PadicInt) -> Result<PadicInt, PadicError> {
    if !u.is_unit() {
        return Err(PadicError::NotUnit(u.to_string()));
    }
    let inv = arith::inv_mod(u.residue, u.modulus()).expect("units are invertible");
    Ok(PadicInt { residue: inv, ..*u })
}

/// The Teichmüller representative `ω(a)`: the solution of `ω^p = ω` with
/// `ω ≡ a mod p`, by iterating `x -> x^p` until it stabilises.
pub fn teichmuller(a: i64, p: u64, precision: u32) -> Result<PadicInt, PadicError> {
    let mut x = PadicInt::new(a, p, precision)?;
    if !x.is_unit() {
        return Err(PadicError::NotUnit(x.to_string()));
    }
    // Each step gains one digit; `precision` steps always suffice.
    for _ in 0..precision {
        let next = x.pow(p);
        if next == x {
            break;
        }
        x = next;
    }
    Ok(x)
}

/// Evaluates a residue polynomial at a p-adic point of the same modulus.
fn eval(poly: &ResiduePoly, x: &PadicInt) -> PadicInt {
    debug_assert_eq!(poly.modulus(), x.modulus());
    PadicInt { residue: poly.eval(x.residue), ..*x }
}

/// `\bar F_s` for a traced family, modulo `p^prec`: `Σ C(M,k)² x^k` for the
/// half family and `Σ C([-2/3]_s,k) C([-1/3]_s,k) x^k` for the thirds.
pub fn bar_family(tag: FamilyTag, p: u64, s: u32, prec: u32) -> Result<ResiduePoly, PadicError> {
    let (a, b) = match tag {
        FamilyTag::Half => (Exponent::new(-1, 2), Exponent::new(-1, 2)),
        FamilyTag::ThirdQ | FamilyTag::ThirdR => (Exponent::new(-2, 3), Exponent::new(-1, 3)),
        other => return Err(PadicError::UnsupportedFamily(other)),
    };
    if s == 0 {
        return Ok(ResiduePoly::one(p.pow(prec)));
    }
    Ok(hyperg::bar_hypergeometric_residues(a, b, p, s, prec)?)
}

/// `C(-1/2, k)` modulo `p^e` for `k < n`; these are p-integral for odd `p`.
pub fn half_binomial_row_mod(n: usize, p: u64, e: u32) -> Vec<u64> {
    let m = p.pow(e);
    let split = |mut a: u64| {
        let mut v = 0u32;
        while a.is_multiple_of(p) {
            a /= p;
            v += 1;
        }
        (a, v)
    };
    let mut out = Vec::with_capacity(n);
    // C(-1/2, k+1) = C(-1/2, k) * (-(2k+1)) / (2(k+1)), kept as unit * p^val.
    let (mut unit, mut val) = (1u64 % m, 0u32);
    for k in 0..n as u64 {
        out.push(if val >= e { 0 } else { arith::mul_mod(unit, p.pow(val), m) });
        let (num, vn) = split(2 * k + 1);
        let (den, vd) = split(2 * (k + 1));
        unit = arith::mul_mod(unit, (m - num % m) % m, m);
        unit = arith::mul_mod(unit, arith::inv_mod(den % m, m).expect("unit"), m);
        val = val + vn - vd;
    }
    out
}

/// Dwork's truncation `F_s = Σ_{k<p^s} C(-1/2,k)² x^k` modulo `p^prec`.
pub fn dwork_truncation_mod(p: u64, s: u32, prec: u32) -> ResiduePoly {
    let m = p.pow(prec);
    let row = half_binomial_row_mod(p.pow(s) as usize, p, prec);
    ResiduePoly::new(m, row.iter().map(|&c| arith::mul_mod(c, c, m)).collect())
}

/// Igusa's polynomial `g = Σ_{k ≤ (p-1)/2} C(-1/2,k)² x^k` modulo `p^prec`.
pub fn igusa_polynomial(p: u64, prec: u32) -> ResiduePoly {
    let m = p.pow(prec);
    let row = half_binomial_row_mod((p as usize).div_ceil(2), p, prec);
    ResiduePoly::new(m, row.iter().map(|&c| arith::mul_mod(c, c, m)).collect())
}

/// `F_s` modulo `p^s` together with `g` modulo `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DworkTruncation {
    pub f_s: ResiduePoly,
    pub g: ResiduePoly,
}

pub fn dwork_truncation(p: u64, s: u32) -> DworkTruncation {
    DworkTruncation { f_s: dwork_truncation_mod(p, s, s), g: igusa_polynomial(p, 1) }
}

/// Which convergence domain a point is tested against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    /// `|\bar P_1(x)|_p = 1`.
    Half,
    /// `|\bar Q_1(x)|_p = 1`.
    Third,
    /// `|g(x)|_p = 1` for Igusa's `g`.
    Dwork,
    /// `|\bar T_1(z_1,z_2,z_3)|_p = 1` on triples.
    Kz,
    /// Triples whose cross ratio `(z_j-z_k)/(z_i-z_k)`, or its inverse, is
    /// integral with `|g|_p = 1`, for `σ = (i,j,k)` (0-based).
    KzCrossRatio([usize; 3]),
}

/// `\bar T_1(z) = Σ_{k1+k2+k3=M} C(M,k1)C(M,k2)C(M,k3) z^k` mod `p`, `M = (p-1)/2`.
pub fn t_bar_1_mod_p(z: [u64; 3], p: u64) -> u64 {
    let m = (p - 1) / 2;
    let row = arith::binomial_row_mod(m, p, 1);
    let mut acc = 0u64;
    for k1 in 0..=m {
        for k2 in 0..=m - k1 {
            let k3 = m - k1 - k2;
            let c = arith::mul_mod(arith::mul_mod(row[k1 as usize], row[k2 as usize], p), row[k3 as usize], p);
            let mono = arith::mul_mod(
                arith::mul_mod(arith::pow_mod(z[0], k1, p), arith::pow_mod(z[1], k2, p), p),
                arith::pow_mod(z[2], k3, p),
                p,
            );
            acc = (acc + arith::mul_mod(c, mono, p)) % p;
        }
    }
    acc
}

/// `(a/b)` as a p-adic integer if `v(a) ≥ v(b)`, computed to the precision
/// left after cancelling `p^{v(b)}`. `None` if the quotient is not integral
/// or `b` vanishes at this precision.
fn integral_ratio(a: &PadicInt, b: &PadicInt) -> Option<PadicInt> {
    let vb = b.valuation()?;
    let va = a.valuation().unwrap_or(a.precision);
    if va < vb || vb >= a.precision {
        return None;
    }
    let prec = a.precision - vb;
    let q = a.p.pow(vb);
    let num = PadicInt::from_residue(a.residue / q, a.p, prec).ok()?;
    let den = PadicInt::from_residue(b.residue / q, a.p, prec).ok()?;
    num.mul(&den.unit_inverse().ok()?).ok()
}

/// Membership of a point (one coordinate, or three for the KZ domains).
pub fn domain_membership(point: &[PadicInt], which: Domain) -> bool {
    let Some(first) = point.first() else { return false };
    let p = first.p;
    match which {
        Domain::Half | Domain::Third | Domain::Dwork => {
            let poly = match which {
                Domain::Half => bar_family(FamilyTag::Half, p, 1, 1),
                Domain::Third if p % 3 != 0 => bar_family(FamilyTag::ThirdQ, p, 1, 1),
                Domain::Third => return false,
                _ => Ok(igusa_polynomial(p, 1)),
            };
            let poly = poly.expect("odd prime");
            poly.eval(first.residue % p) != 0
        }
        Domain::Kz => {
            if point.len() != 3 {
                return false;
            }
            let z = [point[0].residue % p, point[1].residue % p, point[2].residue % p];
            t_bar_1_mod_p(z, p) != 0
        }
        Domain::KzCrossRatio([i, j, k]) => {
            if point.len() != 3 || point.iter().any(|z| z.p != p || z.precision != first.precision) {
                return false;
            }
            let d = |a: usize, b: usize| point[a].sub(&point[b]).expect("same precision");
            let (dj, di) = (d(j, k), d(i, k));
            if dj.is_zero() || di.is_zero() || d(i, j).is_zero() {
                return false;
            }
            let g = igusa_polynomial(p, 1);
            let good = |r: Option<PadicInt>| r.is_some_and(|r| g.eval(r.residue % p) != 0);
            good(integral_ratio(&dj, &di)) || good(integral_ratio(&di, &dj))
        }
    }
}

/// Successive ratios `f_s = \bar F_{s+1}(x) / \bar F_s(x^p)` at one point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitRootTrace {
    pub x: PadicInt,
    pub family: FamilyTag,
    /// `f_s` for `s = 1..=s_max`, each reduced modulo `p^s`.
    pub ratios: Vec<PadicInt>,
    /// Observed `v(f_{s+1} - f_s)` for `s = 1..s_max`, computed at working
    /// precision `s_max + 1`; `None` means zero at that precision.
    pub delta_valuations: Vec<Option<u32>>,
    /// Whether every delta meets the guaranteed bound `v ≥ s + 1`.
    pub bound_holds: bool,
}

/// `f_s(x) = \bar F_{s+1}(x) / \bar F_s(x^p)` at precision `prec`.
pub fn ratio_at(tag: FamilyTag, x: &PadicInt, s: u32) -> Result<PadicInt, PadicError> {
    let (p, prec) = (x.p, x.precision);
    let num = eval(&bar_family(tag, p, s + 1, prec)?, x);
    let den = eval(&bar_family(tag, p, s, prec)?, &x.pow(p));
    if !den.is_unit() {
        return Err(PadicError::OutsideDomain(x.to_string()));
    }
    num.mul(&den.unit_inverse()?)
}

/// Traces `f_s` for `s = 1..=s_max` and checks the Cauchy rate
/// `|f_{s+1} - f_s|_p ≤ p^{-(s+1)}`.
pub fn unit_root(x: &PadicInt, family: FamilyTag, s_max: u32) -> Result<UnitRootTrace, PadicError> {
    let work = PadicInt::from_residue(x.residue, x.p, s_max + 1)?;
    let domain = if family == FamilyTag::Half { Domain::Half } else { Domain::Third };
    if !domain_membership(&[work], domain) {
        return Err(PadicError::OutsideDomain(x.to_string()));
    }
    let full: Vec<PadicInt> = (1..=s_max).map(|s| ratio_at(family, &work, s)).collect::<Result<_, _>>()?;
    let mut delta_valuations = Vec::new();
    let mut bound_holds = true;
    for (idx, pair) in full.windows(2).enumerate() {
        let s = idx as u32 + 1;
        let v = pair[1].sub(&pair[0])?.valuation();
        bound_holds &= v.is_none_or(|v| v > s);
        delta_valuations.push(v);
    }
    let ratios = full.iter().enumerate().map(|(i, f)| f.reduce(i as u32 + 1)).collect();
    Ok(UnitRootTrace { x: *x, family, ratios, delta_valuations, bound_holds })
}

/// `a_p = p + 1 - #E(F_p)` for `y² = x(x-1)(x-α)` by exhaustive count.
pub fn legendre_point_count(alpha: i64, p: u64) -> Result<i64, PadicError> {
    let a = alpha.rem_euclid(p as i64) as u64;
    if a == 0 || a == 1 {
        return Err(PadicError::SingularCurve { alpha, p });
    }
    let mut squares = vec![0i64; p as usize];
    for y in 0..p {
        squares[(y * y % p) as usize] += 1;
    }
    let mut affine = 0i64;
    for x in 0..p {
        let rhs = x * ((x + p - 1) % p) % p * ((x + p - a) % p) % p;
        affine += squares[rhs as usize];
    }
    Ok(p as i64 + 1 - (affine + 1))
}

/// The unit root `u = (-1)^{(p-1)/2} f_s(ω(α))` modulo `p^prec`.
pub fn unit_root_value(alpha: i64, p: u64, s: u32, prec: u32) -> Result<PadicInt, PadicError> {
    let w = teichmuller(alpha, p, prec)?;
    if !domain_membership(&[w], Domain::Half) {
        return Err(PadicError::OutsideDomain(w.to_string()));
    }
    let f = ratio_at(FamilyTag::Half, &w, s)?;
    Ok(if (p - 1) / 2 % 2 == 1 { f.neg() } else { f })
}

/// `u² - a_p u + p ≡ 0 mod p^s` for the unit root `u` approximated by `f_s`,
/// plus the check that `u` is the unit root (`u` a unit with `u ≡ a_p mod p`).
pub fn frobenius_quadratic_check(alpha: i64, p: u64, s: u32) -> Result<CongruenceReport, PadicError> {
    let ap = legendre_point_count(alpha, p)?;
    // f_s agrees with the limit to p^{s+1}; evaluate one digit beyond s.
    let u = unit_root_value(alpha, p, s, s + 1)?;
    let ap_p = PadicInt::new(ap, p, s + 1)?;
    let p_p = PadicInt::new(p as i64, p, s + 1)?;
    let resid = u.mul(&u)?.sub(&ap_p.mul(&u)?)?.add(&p_p)?;
    let modulus = Some(Modulus { p, s });
    let v = resid.valuation();
    let quad = CongruenceReport::from_witness(
        "unit root satisfies the Frobenius quadratic",
        modulus,
        v.is_some_and(|v| v < s).then(|| Witness {
            monomial: format!("alpha={alpha}"),
            residue: (resid.residue % p.pow(s)).to_string(),
        }),
    )
    .with_valuation(v);
    let unit = CongruenceReport::from_witness(
        "approximation is the unit root",
        Some(Modulus { p, s: 1 }),
        (!(u.is_unit() && u.reduce(1) == PadicInt::new(ap, p, 1)?)).then(|| Witness {
            monomial: format!("alpha={alpha}"),
            residue: (u.residue % p).to_string(),
        }),
    );
    Ok(CongruenceReport::all(
        format!("unit root of y^2 = x(x-1)(x-{alpha}) at p = {p}, a_p = {ap}"),
        modulus,
        &[quad, unit],
    ))
}

/// `α ∈ F_p \ {0,1}` with `ω(α)` in the half domain.
pub fn admissible_alphas(p: u64) -> Vec<i64> {
    (2..p as i64).filter(|&a| teichmuller(a, p, 1).is_ok_and(|w| domain_membership(&[w], Domain::Half))).collect()
}

/// `\bar P_{s+1}(x)/\bar P_s(x^p) ≡ F_{s+1}(x)/F_s(x^p)` modulo `p^{s-1}`,
/// the agreement implied by the shared limit. The observed valuation of the
/// worst difference, computed modulo `p^{s+1}`, is recorded.
pub fn limits_agree_check(p: u64, s: u32, samples: &[PadicInt]) -> Result<CongruenceReport, PadicError> {
    let prec = s + 1;
    let bar_num = bar_family(FamilyTag::Half, p, s + 1, prec)?;
    let bar_den = bar_family(FamilyTag::Half, p, s, prec)?;
    let dw_num = dwork_truncation_mod(p, s + 1, prec);
    let dw_den = dwork_truncation_mod(p, s, prec);
    let mut worst: Option<u32> = None;
    let mut witness = None;
    for x in samples {
        let x = PadicInt::from_residue(x.residue, p, prec)?;
        if !domain_membership(&[x], Domain::Half) {
            return Err(PadicError::OutsideDomain(x.to_string()));
        }
        let xp = x.pow(p);
        let a = eval(&bar_num, &x).mul(&eval(&bar_den, &xp).unit_inverse()?)?;
        let b = eval(&dw_num, &x).mul(&eval(&dw_den, &xp).unit_inverse()?)?;
        let v = a.sub(&b)?.valuation();
        if let Some(v) = v {
            worst = Some(worst.map_or(v, |w| w.min(v)));
            if v < s.saturating_sub(1) && witness.is_none() {
                witness = Some(Witness { monomial: format!("x={}", x.residue), residue: a.sub(&b)?.residue.to_string() });
            }
        }
    }
    let modulus = Modulus { p, s: s.saturating_sub(1).max(1) };
    let report = if s <= 1 {
        CongruenceReport::pass("approximation and Dwork truncation ratios agree", Some(modulus))
    } else {
        CongruenceReport::from_witness("approximation and Dwork truncation ratios agree", Some(modulus), witness)
    };
    Ok(report.with_valuation(Some(worst.unwrap_or(prec))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn teichmuller_examples() {
        for p in [3u64, 5, 7] {
            assert_eq!(teichmuller(1, p, 4).unwrap().residue(), 1);
            assert_eq!(teichmuller(p as i64 - 1, p, 4).unwrap().residue(), p.pow(4) - 1);
            for s in 1..=6 {
                for a in 1..p as i64 {
                    let w = teichmuller(a, p, s).unwrap();
                    assert_eq!(w.pow(p), w);
                    assert_eq!(w.residue() % p, a as u64);
                }
            }
        }
        assert_eq!(teichmuller(2, 5, 2).unwrap().residue(), 7);
        assert!(teichmuller(5, 5, 2).is_err());
    }

    #[test]
    fn inverses() {
        let one = PadicInt::new(1, 5, 2).unwrap();
        assert_eq!(unit_inverse(&one).unwrap(), one);
        assert_eq!(unit_inverse(&PadicInt::new(2, 5, 2).unwrap()).unwrap().residue(), 13);
        assert!(unit_inverse(&PadicInt::new(5, 5, 2).unwrap()).is_err());
        assert_eq!(PadicInt::new(-1, 3, 2).unwrap().residue(), 8);
        assert_eq!(PadicInt::new(18, 3, 3).unwrap().valuation(), Some(2));
    }

    #[test]
    fn domains() {
        let zero = PadicInt::new(0, 3, 2).unwrap();
        assert!(domain_membership(&[zero], Domain::Half));
        let w = teichmuller(2, 3, 2).unwrap();
        assert!(!domain_membership(&[w], Domain::Half));
        let kz: Vec<PadicInt> = [1, 0, 0].iter().map(|&a| PadicInt::new(a, 5, 2).unwrap()).collect();
        assert!(domain_membership(&kz, Domain::Kz));
        // Igusa's g and \bar P_1 agree mod p, so the two domains coincide.
        for p in [3u64, 5, 7, 11] {
            let bar = bar_family(FamilyTag::Half, p, 1, 1).unwrap();
            assert_eq!(igusa_polynomial(p, 1), bar);
            for a in 0..p as i64 {
                let x = PadicInt::new(a, p, 1).unwrap();
                assert_eq!(domain_membership(&[x], Domain::Half), domain_membership(&[x], Domain::Dwork));
            }
        }
        // (0, x, 1) with σ = (0,1,2): ratio (x - 1)/(0 - 1) = 1 - x.
        let pt = |v: [i64; 3]| v.map(|a| PadicInt::new(a, 5, 3).unwrap());
        let g = igusa_polynomial(5, 1);
        for x in 2..5i64 {
            let want = g.eval((1 - x).rem_euclid(5) as u64) != 0 || g.eval(inv5(1 - x)) != 0;
            assert_eq!(domain_membership(&pt([0, x, 1]), Domain::KzCrossRatio([0, 1, 2])), want);
        }
        assert!(!domain_membership(&pt([1, 1, 0]), Domain::KzCrossRatio([0, 1, 2])));
    }

    fn inv5(a: i64) -> u64 {
        arith::inv_mod(a.rem_euclid(5) as u64, 5).unwrap()
    }

    #[test]
    fn point_counts() {
        assert_eq!(legendre_point_count(2, 5).unwrap(), -2);
        assert!(legendre_point_count(1, 5).is_err());
        assert!(legendre_point_count(0, 7).is_err());
        // Oracle: a_p = -Σ_x χ(x(x-1)(x-α)) with χ by Euler's criterion.
        for p in [3u64, 5, 7, 11, 13] {
            for a in 2..p as i64 {
                let mut sum = 0i64;
                for x in 0..p {
                    let f = (x * ((x + p - 1) % p) % p * ((x + p - a as u64) % p)) % p;
                    let e = arith::pow_mod(f, (p - 1) / 2, p);
                    sum += if f == 0 { 0 } else if e == 1 { 1 } else { -1 };
                }
                assert_eq!(legendre_point_count(a, p).unwrap(), -sum);
                assert!(legendre_point_count(a, p).unwrap().abs() <= 2 * (p as f64).sqrt() as i64);
            }
        }
    }

    #[test]
    fn unit_root_traces() {
        let zero = PadicInt::new(0, 5, 4).unwrap();
        let t = unit_root(&zero, FamilyTag::Half, 3).unwrap();
        assert!(t.ratios.iter().all(|f| f.residue() == 1));
        let w = teichmuller(2, 5, 4).unwrap();
        let t = unit_root(&w, FamilyTag::Half, 3).unwrap();
        assert!(t.bound_holds);
        for (i, f) in t.ratios.iter().enumerate().skip(1) {
            assert_eq!(f.reduce(i as u32), t.ratios[i - 1]);
        }
        let w = teichmuller(3, 7, 5).unwrap();
        let t = unit_root(&w, FamilyTag::Half, 4).unwrap();
        assert!(t.bound_holds);
        for (s, v) in t.delta_valuations.iter().enumerate() {
            assert!(v.is_none_or(|v| v as usize > s), "{:?}", t.delta_valuations);
        }
        assert!(t.ratios.iter().all(|f| f.is_unit()));
        let w = teichmuller(2, 3, 3).unwrap();
        assert!(unit_root(&w, FamilyTag::Half, 2).is_err());
        let w = teichmuller(2, 7, 4).unwrap();
        assert!(unit_root(&w, FamilyTag::ThirdQ, 3).unwrap().bound_holds);
    }

    #[test]
    fn frobenius_quadratic() {
        for s in 1..=4 {
            assert!(frobenius_quadratic_check(2, 5, s).unwrap().pass);
        }
        for p in [5u64, 7, 11] {
            for a in admissible_alphas(p) {
                for s in 1..=4 {
                    let r = frobenius_quadratic_check(a, p, s).unwrap();
                    assert!(r.pass, "p={p} a={a} s={s}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn dwork_truncations() {
        // F_1 at p = 3 has three terms; the last, 9/64, vanishes mod 3.
        assert_eq!(dwork_truncation_mod(3, 1, 3).coeffs().len(), 3);
        assert_eq!(dwork_truncation(3, 1).f_s.coeffs().len(), 2);
        // C(-1/2,1)² = 1/4.
        for p in [3u64, 5, 7] {
            for s in 1..=3 {
                let q = p.pow(s);
                let quarter = arith::rational_mod(1, 4, q).unwrap();
                assert_eq!(dwork_truncation_mod(p, s, s).coeffs()[1], quarter);
            }
        }
        assert_eq!(half_binomial_row_mod(4, 7, 2), vec![1, arith::rational_mod(-1, 2, 49).unwrap(), arith::rational_mod(3, 8, 49).unwrap(), arith::rational_mod(-5, 16, 49).unwrap()]);
    }

    #[test]
    fn limits_agree() {
        let zero = PadicInt::new(0, 5, 4).unwrap();
        let r = limits_agree_check(5, 3, &[zero]).unwrap();
        assert!(r.pass);
        for (p, a) in [(5u64, 2i64), (7, 3)] {
            let w = teichmuller(a, p, 4).unwrap();
            let r = limits_agree_check(p, 3, &[w]).unwrap();
            assert!(r.pass && r.observed_valuation.unwrap() >= 2, "{r:?}");
        }
    }
}
