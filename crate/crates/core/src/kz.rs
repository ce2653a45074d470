//! The rank-two KZ system in three points, its polynomial solutions modulo
//! `p^s`, the scalar polynomials `T_s`, `U_s`, and the η-vector relations.
//!
//! All polynomials live in the context `(; z_1, z_2, z_3)`. The master
//! polynomial is `Φ_s = ((t-z_1)(t-z_2)(t-z_3))^M` with `M = (p^s-1)/2`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::arith;
use crate::hyperg::{self, FamilyTag, HypergError};
use crate::laurent::{self, Context, ExpVector, LaurentPoly, ModulusContext, PolyError};
use crate::padic::{self, Domain, PadicError, PadicInt};
use crate::poly::{self, UniPoly};
use crate::report::{CongruenceReport, Modulus, Witness};

/// Context of the three KZ variables.
pub const KZ_CTX: Context = Context::new(0, 3);
const MASTER_CTX: Context = Context::new(1, 3);

/// Largest `p^s` for which [`kz_build`] also extracts `I_s`, `T_s`, `U_s`
/// from the expanded master polynomial and cross-checks the closed forms.
pub const KZ_EXTRACTION_CAP: u64 = 49;

/// Default cap on sample triples per `(p, s)`.
pub const SAMPLE_CAP: usize = 50;

#[derive(Debug, Error)]
pub enum KzError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Hyperg(#[from] HypergError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("closed form and extraction disagree for {0}")]
    CrossCheck(String),
    #[error("sample {0:?} has coinciding coordinates mod p")]
    CoincidentPoints([u64; 3]),
    #[error("{0} is not a unit at the sample point")]
    NonUnit(String),
    #[error("precision s must be at least 1")]
    ZeroPrecision,
}

/// `Ω_{ij}` for `i ≠ j` (0-based); symmetric in `i`, `j`.
pub fn omega(i: usize, j: usize) -> [[i64; 3]; 3] {
    assert!(i != j && i < 3 && j < 3, "Ω_ij needs distinct indices in 0..3");
    let mut m = [[0i64; 3]; 3];
    m[i][i] = -1;
    m[j][j] = -1;
    m[i][j] = 1;
    m[j][i] = 1;
    m
}

fn half_power(p: u64, s: u32) -> u64 {
    (p.pow(s) - 1) / 2
}

/// Binomial rows `C(n, ·)` for `n` in `0..=n_max`.
fn pascal(n_max: u64) -> Vec<Vec<BigInt>> {
    (0..=n_max).map(arith::binomial_row).collect()
}

fn z_mono(a: u64, b: u64, c: u64) -> ExpVector {
    ExpVector::new(vec![], vec![a as i64, b as i64, c as i64])
}

fn from_map(map: HashMap<(u64, u64, u64), BigInt>) -> LaurentPoly {
    LaurentPoly::from_terms(KZ_CTX, map.into_iter().map(|((a, b, c), v)| (z_mono(a, b, c), v)))
        .expect("three z exponents")
}

/// `(-1)^{Σe} Σ_{k1+k2+k3=K} Π C(e_i, k_i) z^k`: the coefficient of
/// `t^{Σe-K}` in `Π (t - z_i)^{e_i}`.
fn trinomial_coefficient(e: [u64; 3], k_total: u64) -> LaurentPoly {
    let rows: Vec<Vec<BigInt>> = e.iter().map(|&n| arith::binomial_row(n)).collect();
    let mut map = HashMap::new();
    for k1 in 0..=k_total.min(e[0]) {
        for k2 in 0..=(k_total - k1).min(e[1]) {
            let k3 = k_total - k1 - k2;
            if k3 > e[2] {
                continue;
            }
            let c = &rows[0][k1 as usize] * &rows[1][k2 as usize] * &rows[2][k3 as usize];
            map.insert((k1, k2, k3), if k_total % 2 == 1 { -c } else { c });
        }
    }
    from_map(map)
}

/// `T_s` from its trinomial closed form; `T_0 = 1`.
pub fn t_closed_form(p: u64, s: u32) -> LaurentPoly {
    if s == 0 {
        return LaurentPoly::one(KZ_CTX);
    }
    let m = half_power(p, s);
    trinomial_coefficient([m, m, m], m)
}

/// `I_{s,i}` from the closed form: factor `i` carries exponent `M-1`.
pub fn i_closed_form(p: u64, s: u32, i: usize) -> LaurentPoly {
    let m = half_power(p, s);
    let mut e = [m, m, m];
    e[i] -= 1;
    trinomial_coefficient(e, m - 1)
}

/// `U_s = (-1)^M Σ_k C(M,k)² (z_1-z_3)^{M-k} (z_2-z_3)^k`, expanded.
pub fn u_closed_form(p: u64, s: u32) -> LaurentPoly {
    if s == 0 {
        return LaurentPoly::one(KZ_CTX);
    }
    let m = half_power(p, s);
    let rows = pascal(m);
    let mut map: HashMap<(u64, u64, u64), BigInt> = HashMap::new();
    for k in 0..=m {
        let ck = &rows[m as usize][k as usize] * &rows[m as usize][k as usize];
        let (ea, eb) = (m - k, k);
        for a in 0..=ea {
            for b in 0..=eb {
                let c3 = ea - a + eb - b;
                let mut v = &ck * &rows[ea as usize][a as usize] * &rows[eb as usize][b as usize];
                if (c3 + m) % 2 == 1 {
                    v = -v;
                }
                *map.entry((a, b, c3)).or_insert_with(BigInt::zero) += v;
            }
        }
    }
    map.retain(|_, v| !v.is_zero());
    from_map(map)
}

fn linear_power(target: usize, n: u64, shift: Option<&LaurentPoly>) -> LaurentPoly {
    // (t - w)^n with w = z_target, or w = z_target - shift when given.
    let t = LaurentPoly::t_pow(MASTER_CTX, 0, 1);
    let mut w = LaurentPoly::z_pow(MASTER_CTX, target, 1);
    if let Some(sh) = shift {
        w = &w - sh;
    }
    (&t - &w).pow(n).expect("nonnegative power")
}

fn drop_t(a: &LaurentPoly) -> LaurentPoly {
    LaurentPoly::from_terms(KZ_CTX, a.terms().map(|(e, c)| (ExpVector::new(vec![], e.z.clone()), c.clone())))
        .expect("three z exponents")
}

/// Coefficient of `t^{p^s-1}` in `Π_i (t - z_i)^{e_i}`, by expansion.
fn extract(p: u64, s: u32, e: [u64; 3]) -> Result<LaurentPoly, KzError> {
    let mut prod = LaurentPoly::one(MASTER_CTX);
    for (i, &n) in e.iter().enumerate() {
        prod = prod.try_mul(&linear_power(i, n, None))?;
    }
    Ok(drop_t(&prod.coeff_t(&[p.pow(s) as i64 - 1])?))
}

/// Coefficient of `t^{p^s-1}` in `Φ_s(t + z_3, z)`, by expansion.
fn extract_u(p: u64, s: u32) -> Result<LaurentPoly, KzError> {
    let m = half_power(p, s);
    let z3 = LaurentPoly::z_pow(MASTER_CTX, 2, 1);
    let t = LaurentPoly::t_pow(MASTER_CTX, 0, 1);
    let prod = linear_power(0, m, Some(&z3)).try_mul(&linear_power(1, m, Some(&z3)))?.try_mul(&t.pow(m)?)?;
    Ok(drop_t(&prod.coeff_t(&[p.pow(s) as i64 - 1])?))
}

/// `I_s`, `T_s`, `U_s` at one `(p, s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KzApprox {
    pub p: u64,
    pub s: u32,
    pub i: [LaurentPoly; 3],
    pub t: LaurentPoly,
    pub u: LaurentPoly,
}

impl KzApprox {
    pub fn half_power(&self) -> u64 {
        half_power(self.p, self.s)
    }

    pub fn modulus(&self) -> Result<ModulusContext, KzError> {
        Ok(ModulusContext::new(self.p, self.s)?)
    }
}

pub fn kz_build(p: u64, s: u32) -> Result<KzApprox, KzError> {
    if s == 0 {
        return Err(KzError::ZeroPrecision);
    }
    let m = half_power(p, s);
    let i = [i_closed_form(p, s, 0), i_closed_form(p, s, 1), i_closed_form(p, s, 2)];
    let t = t_closed_form(p, s);
    let u = u_closed_form(p, s);
    if p.pow(s) <= KZ_EXTRACTION_CAP {
        for (idx, closed) in i.iter().enumerate() {
            let mut e = [m, m, m];
            e[idx] -= 1;
            if &extract(p, s, e)? != closed {
                return Err(KzError::CrossCheck(format!("I_s component {} at p = {p}, s = {s}", idx + 1)));
            }
        }
        if extract(p, s, [m, m, m])? != t {
            return Err(KzError::CrossCheck(format!("T_s at p = {p}, s = {s}")));
        }
        if extract_u(p, s)? != u {
            return Err(KzError::CrossCheck(format!("U_s at p = {p}, s = {s}")));
        }
    }
    Ok(KzApprox { p, s, i, t, u })
}

/// `Σ_{j≠i} (D_i/(z_i - z_j)) Ω_{ij} v` with `D_i = Π_{j≠i}(z_i - z_j)`;
/// the factor `D_i/(z_i - z_j)` is `z_i - z_k` for the remaining index `k`.
fn cleared_connection(i: usize, v: &[LaurentPoly; 3]) -> [LaurentPoly; 3] {
    let z = |a: usize| LaurentPoly::z_pow(KZ_CTX, a, 1);
    let mut out = [LaurentPoly::zero(KZ_CTX), LaurentPoly::zero(KZ_CTX), LaurentPoly::zero(KZ_CTX)];
    for j in (0..3).filter(|&j| j != i) {
        let k = 3 - i - j;
        let factor = &z(i) - &z(k);
        let om = omega(i, j);
        for (row, slot) in out.iter_mut().enumerate() {
            let mut acc = LaurentPoly::zero(KZ_CTX);
            for (col, vc) in v.iter().enumerate() {
                if om[row][col] != 0 {
                    acc = &acc + &vc.scale(&BigInt::from(om[row][col]));
                }
            }
            *slot = &*slot + &(&factor * &acc);
        }
    }
    out
}

fn denominator(i: usize) -> LaurentPoly {
    let z = |a: usize| LaurentPoly::z_pow(KZ_CTX, a, 1);
    let mut d = LaurentPoly::one(KZ_CTX);
    for j in (0..3).filter(|&j| j != i) {
        d = &d * &(&z(i) - &z(j));
    }
    d
}

fn vector_report(description: String, parts: &[LaurentPoly; 3], m: &ModulusContext) -> CongruenceReport {
    let zero = LaurentPoly::zero(KZ_CTX);
    let reports: Vec<CongruenceReport> = parts
        .iter()
        .enumerate()
        .map(|(c, v)| laurent::congruent(v, &zero, m).expect("same context").with_description(format!("component {}", c + 1)))
        .collect();
    CongruenceReport::all(description, Some(m.as_modulus()), &reports)
}

/// `D_i ∂_i I_s + M Σ_{j≠i} (D_i/(z_i-z_j)) Ω_{ij} I_s ≡ 0 mod p^s` for each
/// `i`, the constraint `I_1 + I_2 + I_3 ≡ 0`, and the exact identity
/// `M (I_1 + I_2 + I_3) = p^s [t^{p^s}] Φ_s` behind it.
pub fn kz_residual(a: &KzApprox) -> Result<Vec<CongruenceReport>, KzError> {
    let m = a.modulus()?;
    let big_m = BigInt::from(a.half_power());
    let mut out = Vec::new();
    for i in 0..3 {
        let d = denominator(i);
        let conn = cleared_connection(i, &a.i);
        let parts: [LaurentPoly; 3] =
            std::array::from_fn(|c| &(&d * &a.i[c].derivative_z(i)) + &conn[c].scale(&big_m));
        out.push(vector_report(format!("KZ equation in z_{} for the vector I_s", i + 1), &parts, &m));
    }
    let sum = &(&a.i[0] + &a.i[1]) + &a.i[2];
    out.push(
        laurent::congruent(&sum, &LaurentPoly::zero(KZ_CTX), &m)?
            .with_description("algebraic constraint I_1 + I_2 + I_3 ≡ 0"),
    );
    let hm = a.half_power();
    let next = trinomial_coefficient([hm, hm, hm], hm - 1);
    let rhs = next.scale(&arith::pow_big(a.p, a.s));
    out.push(laurent::identical(
        &sum.scale(&big_m),
        &rhs,
        "M (I_1 + I_2 + I_3) equals p^s times the t^{p^s} coefficient of the master polynomial",
    )?);
    Ok(out)
}

/// `∇T_s = ((1 - p^s)/2) I_s`, exactly.
pub fn gradient_identity(a: &KzApprox) -> Result<CongruenceReport, KzError> {
    let c = -BigInt::from(a.half_power());
    let parts: Vec<CongruenceReport> = (0..3)
        .map(|i| laurent::identical(&a.t.derivative_z(i), &a.i[i].scale(&c), &format!("component {}", i + 1)))
        .collect::<Result<_, _>>()?;
    Ok(CongruenceReport::all("gradient of T_s equals (1-p^s)/2 times I_s", None, &parts))
}

/// Restriction of a KZ polynomial to `(1, x, 0)` as a polynomial in `x`.
pub fn restrict_to_line(a: &LaurentPoly) -> UniPoly {
    let mut coeffs: Vec<BigInt> = Vec::new();
    for (e, c) in a.terms() {
        if e.z[2] != 0 {
            continue;
        }
        let k = e.z[1] as usize;
        if coeffs.len() <= k {
            coeffs.resize(k + 1, BigInt::zero());
        }
        coeffs[k] += c;
    }
    UniPoly::from_coeffs(coeffs)
}

/// `T_s(1, x, 0) = P_s(x)`, exactly.
pub fn t_line_identity(a: &KzApprox) -> Result<CongruenceReport, KzError> {
    let ps = hyperg::family_polynomial(FamilyTag::Half, a.p, a.s)?;
    Ok(poly::identical(&restrict_to_line(&a.t), &ps, "T_s(1, x, 0) = P_s(x)"))
}

fn permute(a: &LaurentPoly, perm: [usize; 3]) -> LaurentPoly {
    LaurentPoly::from_terms(
        KZ_CTX,
        a.terms().map(|(e, c)| {
            let mut z = vec![0; 3];
            for (src, &dst) in perm.iter().enumerate() {
                z[dst] = e.z[src];
            }
            (ExpVector::new(vec![], z), c.clone())
        }),
    )
    .expect("three z exponents")
}

/// `T_s` is invariant under all six permutations of the variables.
pub fn t_symmetry(a: &KzApprox) -> Result<CongruenceReport, KzError> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let parts: Vec<CongruenceReport> = PERMS
        .iter()
        .map(|&pm| laurent::identical(&permute(&a.t, pm), &a.t, &format!("{pm:?}")))
        .collect::<Result<_, _>>()?;
    Ok(CongruenceReport::all("T_s is symmetric in z_1, z_2, z_3", None, &parts))
}

/// Which scalar polynomial a congruence is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KzScalar {
    T,
    U,
}

fn scalar(which: KzScalar, p: u64, s: u32) -> LaurentPoly {
    match which {
        KzScalar::T => t_closed_form(p, s),
        KzScalar::U => u_closed_form(p, s),
    }
}

/// `X_{s+1}(z) X_{s-1}(z^p) ≡ X_s(z) X_s(z^p) mod p^s` for `X ∈ {T, U}`.
pub fn kz_dwork_congruence(p: u64, s: u32, which: KzScalar) -> Result<CongruenceReport, KzError> {
    if s == 0 {
        return Err(KzError::ZeroPrecision);
    }
    let m = ModulusContext::new(p, s)?;
    let red = |x: LaurentPoly| x.reduce_mod(&m);
    let (next, prev, cur) = (red(scalar(which, p, s + 1)), red(scalar(which, p, s - 1)), red(scalar(which, p, s)));
    let lhs = next.try_mul(&prev.substitute_power(p)?)?;
    let rhs = cur.try_mul(&cur.substitute_power(p)?)?;
    let name = match which {
        KzScalar::T => "T",
        KzScalar::U => "U",
    };
    Ok(laurent::congruent(&lhs, &rhs, &m)?
        .with_description(format!("three-term Dwork congruence {name}_{{s+1}}(z){name}_{{s-1}}(z^p) ≡ {name}_s(z){name}_s(z^p)")))
}

/// `U_1 ≡ T_1 mod p`.
pub fn u_t_lucas_check(p: u64) -> Result<CongruenceReport, KzError> {
    let m = ModulusContext::new(p, 1)?;
    Ok(laurent::congruent(&u_closed_form(p, 1), &t_closed_form(p, 1), &m)?.with_description("U_1 ≡ T_1 mod p"))
}

/// `U_s = (z_1-z_3)^M P_s((z_2-z_3)/(z_1-z_3))` after clearing denominators,
/// with the right side built from `P_s` alone.
pub fn u_factorization_check(p: u64, s: u32) -> Result<CongruenceReport, KzError> {
    let a = kz_build(p, s)?;
    let ps = hyperg::family_polynomial(FamilyTag::Half, p, s)?;
    let m = a.half_power();
    let z = |i: usize| LaurentPoly::z_pow(KZ_CTX, i, 1);
    let (d1, d2) = (&z(0) - &z(2), &z(1) - &z(2));
    let mut rhs = LaurentPoly::zero(KZ_CTX);
    for k in 0..=m {
        let c = ps.coeff(k as usize);
        if c.is_zero() {
            continue;
        }
        let term = d2.pow(k)?.try_mul(&d1.pow(m - k)?)?.scale(&c);
        rhs = &rhs + &term;
    }
    Ok(laurent::identical(&a.u, &rhs, "U_s = (z_1-z_3)^M P_s((z_2-z_3)/(z_1-z_3))")?)
}

/// `∂_iT_s(1,x,0) U_s(1,x,0) = ∂_iU_s(1,x,0) T_s(1,x,0)` for one `i` (0-based),
/// exactly when `modulus` is `None`, otherwise modulo `p^s`.
pub fn line_equality_component(a: &KzApprox, i: usize, modulo: bool) -> Result<CongruenceReport, KzError> {
    let line = restrict_to_line;
    let lhs = line(&a.t.derivative_z(i)).mul(&line(&a.u));
    let rhs = line(&a.u.derivative_z(i)).mul(&line(&a.t));
    let desc = format!("log-derivatives of T_s and U_s in z_{} agree on the line (1, x, 0)", i + 1);
    Ok(if modulo {
        poly::congruent(&lhs, &rhs, &a.modulus()?, &desc)
    } else {
        poly::identical(&lhs, &rhs, &desc)
    })
}

/// The three exact line equalities combined.
pub fn line_equality_check(p: u64, s: u32) -> Result<CongruenceReport, KzError> {
    let a = kz_build(p, s)?;
    let parts: Vec<CongruenceReport> =
        (0..3).map(|i| line_equality_component(&a, i, false)).collect::<Result<_, _>>()?;
    Ok(CongruenceReport::all("log-derivatives of T_s and U_s agree on the line (1, x, 0)", None, &parts))
}

fn eval(poly: &LaurentPoly, z: &[u64; 3], modulus: u64) -> u64 {
    poly.eval_mod(&[], z, modulus).expect("polynomial with nonnegative exponents")
}

/// Finite-`s` values `η^{(i)}_s = ∂_iT_s/T_s` and `η^{(ij)}_s = ∂_i∂_jT_s/T_s`
/// at a point, modulo `p^s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaValues {
    pub first: [PadicInt; 3],
    pub second: [[PadicInt; 3]; 3],
}

pub fn eta_evaluate(a: &KzApprox, z: &[PadicInt; 3]) -> Result<EtaValues, KzError> {
    let q = a.p.pow(a.s);
    let zr = [z[0].residue() % q, z[1].residue() % q, z[2].residue() % q];
    let mk = |r: u64| PadicInt::from_residue(r, a.p, a.s);
    let t = mk(eval(&a.t, &zr, q))?;
    let inv = t.unit_inverse().map_err(|_| KzError::NonUnit(format!("T_s at {zr:?}")))?;
    let grads: Vec<LaurentPoly> = (0..3).map(|i| a.t.derivative_z(i)).collect();
    let first: [PadicInt; 3] = std::array::from_fn(|i| mk(eval(&grads[i], &zr, q)).expect("valid").mul(&inv).expect("same"));
    let second: [[PadicInt; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let h = grads[j].derivative_z(i);
            mk(eval(&h, &zr, q)).expect("valid").mul(&inv).expect("same")
        })
    });
    Ok(EtaValues { first, second })
}

/// `H_i η` at a point modulo `p^s`, with `1/2` realised as `-M`.
fn h_times(i: usize, z: &[PadicInt; 3], eta: &[PadicInt; 3], half: &PadicInt) -> Result<[PadicInt; 3], KzError> {
    let zero = half.sub(half)?;
    let mut out = [zero; 3];
    for j in (0..3).filter(|&j| j != i) {
        let inv = z[i].sub(&z[j])?.unit_inverse()?;
        let om = omega(i, j);
        for (row, slot) in out.iter_mut().enumerate() {
            for col in 0..3 {
                let c = PadicInt::new(om[row][col], half.p(), half.precision())?;
                *slot = slot.add(&c.mul(&inv)?.mul(half)?.mul(&eta[col])?)?;
            }
        }
    }
    Ok(out)
}

/// The second-order η system at sample points modulo `p^s`: for each `i`,
/// `(η^{(i1)}, η^{(i2)}, η^{(i3)}) ≡ H_i η`, plus `Σ_i η^{(i)} ≡ 0`,
/// `Σ_j η^{(ij)} ≡ 0`, and that `η` has a unit component.
pub fn eta_kz_system_check(a: &KzApprox, samples: &[[PadicInt; 3]]) -> Result<CongruenceReport, KzError> {
    let (p, s) = (a.p, a.s);
    let half = PadicInt::new(-(a.half_power() as i64), p, s)?;
    let mut parts = Vec::new();
    for z in samples {
        let zr = z.map(|c| c.residue() % p);
        if zr[0] == zr[1] || zr[0] == zr[2] || zr[1] == zr[2] {
            return Err(KzError::CoincidentPoints(zr));
        }
        let z = z.map(|c| c.reduce(s));
        let eta = eta_evaluate(a, &z)?;
        let tag = format!("z={:?}", z.map(|c| c.residue()));
        let mut fail: Option<Witness> = None;
        let mut note = |label: String, v: PadicInt| {
            if !v.is_zero() && fail.is_none() {
                fail = Some(Witness { monomial: format!("{tag} {label}"), residue: v.residue().to_string() });
            }
        };
        for i in 0..3 {
            let rhs = h_times(i, &z, &eta.first, &half)?;
            for j in 0..3 {
                note(format!("row {} entry {}", i + 1, j + 1), eta.second[i][j].sub(&rhs[j])?);
            }
            let row_sum = eta.second[i][0].add(&eta.second[i][1])?.add(&eta.second[i][2])?;
            note(format!("second-order sum {}", i + 1), row_sum);
        }
        note("first-order sum".into(), eta.first[0].add(&eta.first[1])?.add(&eta.first[2])?);
        if !eta.first.iter().any(|c| c.is_unit()) && fail.is_none() {
            fail = Some(Witness { monomial: format!("{tag} eta has no unit component"), residue: "0".into() });
        }
        parts.push(CongruenceReport::from_witness(tag, Some(Modulus { p, s }), fail));
    }
    Ok(CongruenceReport::all("η-vector satisfies the KZ-type second-order system", Some(Modulus { p, s }), &parts))
}

/// `η^{(2)}_s(1,0,0) ≡ 1/4 mod p^s`.
pub fn eta_base_point_check(a: &KzApprox) -> Result<CongruenceReport, KzError> {
    let z = [1i64, 0, 0].map(|v| PadicInt::new(v, a.p, a.s).expect("valid"));
    let eta = eta_evaluate(a, &z)?;
    let quarter = arith::rational_mod(1, 4, a.p.pow(a.s)).expect("p odd");
    let got = eta.first[1].residue();
    Ok(CongruenceReport::from_witness(
        "η^{(2)}(1,0,0) ≡ 1/4",
        Some(Modulus { p: a.p, s: a.s }),
        (got != quarter).then(|| Witness { monomial: "(1,0,0)".into(), residue: got.to_string() }),
    ))
}

/// Teichmüller triples of distinct residues with `\bar T_1` a unit, in
/// lexicographic order of residues, at most `cap` of them.
pub fn sample_points(p: u64, precision: u32, cap: usize) -> Result<Vec<[PadicInt; 3]>, KzError> {
    let lift = |a: u64| -> Result<PadicInt, KzError> {
        Ok(if a == 0 { PadicInt::new(0, p, precision)? } else { padic::teichmuller(a as i64, p, precision)? })
    };
    let mut out = Vec::new();
    'outer: for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                if a == b || a == c || b == c {
                    continue;
                }
                let z = [lift(a)?, lift(b)?, lift(c)?];
                if padic::domain_membership(&z, Domain::Kz) {
                    out.push(z);
                    if out.len() >= cap {
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `|\bar T_{s+1}(z)/\bar T_s(z^p) - \bar T_s(z)/\bar T_{s-1}(z^p)|_p ≤ p^{-s}`
/// at the sample points, for `s = 1..s_max`.
pub fn t_ratio_cauchy_check(p: u64, s_max: u32, samples: &[[PadicInt; 3]]) -> Result<CongruenceReport, KzError> {
    let prec = s_max + 1;
    let q = p.pow(prec);
    let bars: Vec<LaurentPoly> = (0..=s_max + 1)
        .map(|s| {
            let t = t_closed_form(p, s);
            if s > 0 && half_power(p, s) % 2 == 1 {
                t.scale(&BigInt::from(-1))
            } else {
                t
            }
        })
        .collect();
    let mut parts = Vec::new();
    for z in samples {
        let zr = z.map(|c| c.residue() % q);
        let zp = zr.map(|c| arith::pow_mod(c, p, q));
        let ratio = |s: usize| -> Result<PadicInt, KzError> {
            let num = PadicInt::from_residue(eval(&bars[s + 1], &zr, q), p, prec)?;
            let den = PadicInt::from_residue(eval(&bars[s], &zp, q), p, prec)?;
            Ok(num.mul(&den.unit_inverse().map_err(|_| KzError::NonUnit(format!("T_{s}(z^p) at {zr:?}")))?)?)
        };
        let mut fail = None;
        let mut worst: Option<u32> = None;
        for s in 1..s_max as usize + 1 {
            let d = ratio(s)?.sub(&ratio(s - 1)?)?;
            if let Some(v) = d.valuation() {
                worst = Some(worst.map_or(v, |w| w.min(v)));
                if v < s as u32 && fail.is_none() {
                    fail = Some(Witness { monomial: format!("z={zr:?} s={s}"), residue: d.residue().to_string() });
                }
            }
        }
        parts.push(CongruenceReport::from_witness(format!("z={zr:?}"), Some(Modulus { p, s: s_max }), fail).with_valuation(worst));
    }
    Ok(CongruenceReport::all("Cauchy rate of the ratios of T-bar at sample points", Some(Modulus { p, s: s_max }), &parts))
}

/// Coordinates `u = (z_1-z_3, (z_2-z_3)/(z_1-z_3), z_1+z_2+z_3)` mapped back
/// to `z`. For `p = 3` the division by 3 is unavailable; `z_3 = 0` is used,
/// which is harmless because `∇U_s/U_s` depends only on differences.
pub fn z_from_u(u: &[PadicInt; 3]) -> Result<[PadicInt; 3], KzError> {
    let (u1, u2, u3) = (u[0], u[1], u[2]);
    let p = u1.p();
    let z3 = if p == 3 {
        PadicInt::new(0, p, u1.precision())?
    } else {
        let three_inv = PadicInt::new(3, p, u1.precision())?.unit_inverse()?;
        u3.sub(&u1)?.sub(&u1.mul(&u2)?)?.mul(&three_inv)?
    };
    Ok([u1.add(&z3)?, u1.mul(&u2)?.add(&z3)?, z3])
}

/// `(∇U_s/U_s)(z(u)) ≡ (1/u_1)(M - u_2 ρ, ρ, -M + (u_2 - 1) ρ)` with
/// `ρ = P_s'(u_2)/P_s(u_2)`, modulo `p^s`; also checks the components sum to 0.
pub fn omega_vector_compare(u: &[PadicInt; 3], p: u64, s: u32) -> Result<CongruenceReport, KzError> {
    let a = kz_build(p, s)?;
    let u = u.map(|c| c.reduce(s));
    let q = p.pow(s);
    let mk = |r: u64| PadicInt::from_residue(r, p, s);
    let u1_inv = u[0].unit_inverse().map_err(|_| KzError::NonUnit("u_1".into()))?;
    let z = z_from_u(&u)?;
    let zr = z.map(|c| c.residue());
    let uval = mk(eval(&a.u, &zr, q))?;
    let u_inv = uval.unit_inverse().map_err(|_| KzError::NonUnit(format!("U_s at {zr:?}")))?;
    let grad: Vec<PadicInt> = (0..3).map(|i| mk(eval(&a.u.derivative_z(i), &zr, q))?.mul(&u_inv).map_err(Into::into)).collect::<Result<_, KzError>>()?;
    let ps = hyperg::family_polynomial(FamilyTag::Half, p, s)?;
    let pv = mk(ps.eval_mod(u[1].residue(), q))?;
    let rho = mk(ps.derivative().eval_mod(u[1].residue(), q))?.mul(&pv.unit_inverse().map_err(|_| KzError::NonUnit("P_s(u_2)".into()))?)?;
    let big_m = PadicInt::new(a.half_power() as i64, p, s)?;
    let one = mk(1)?;
    let want = [
        big_m.sub(&u[1].mul(&rho)?)?.mul(&u1_inv)?,
        rho.mul(&u1_inv)?,
        big_m.neg().add(&u[1].sub(&one)?.mul(&rho)?)?.mul(&u1_inv)?,
    ];
    let mut fail = None;
    for c in 0..3 {
        let d = grad[c].sub(&want[c])?;
        if !d.is_zero() && fail.is_none() {
            fail = Some(Witness { monomial: format!("component {}", c + 1), residue: d.residue().to_string() });
        }
    }
    let sum = grad[0].add(&grad[1])?.add(&grad[2])?;
    if !sum.is_zero() && fail.is_none() {
        fail = Some(Witness { monomial: "component sum".into(), residue: sum.residue().to_string() });
    }
    Ok(CongruenceReport::from_witness(
        format!("∇U_s/U_s matches the omega vector at u = {:?}", u.map(|c| c.residue())),
        Some(Modulus { p, s }),
        fail,
    ))
}

/// Sample `u` points: `u_1` a Teichmüller unit, `u_2` a Teichmüller lift in
/// the half domain (or 0), `u_3` arbitrary.
pub fn omega_samples(p: u64, precision: u32, cap: usize) -> Result<Vec<[PadicInt; 3]>, KzError> {
    let mut out = Vec::new();
    for b in 0..p {
        let u2 = if b == 0 { PadicInt::new(0, p, precision)? } else { padic::teichmuller(b as i64, p, precision)? };
        if !padic::domain_membership(&[u2], Domain::Half) {
            continue;
        }
        for a in 1..p {
            let u1 = padic::teichmuller(a as i64, p, precision)?;
            let u3 = PadicInt::new((a + 2 * b) as i64, p, precision)?;
            out.push([u1, u2, u3]);
            if out.len() >= cap {
                return Ok(out);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kz(s: &str) -> LaurentPoly {
        LaurentPoly::parse(KZ_CTX, s).unwrap()
    }

    #[test]
    fn omega_matrices() {
        assert_eq!(omega(0, 1), [[-1, 1, 0], [1, -1, 0], [0, 0, 0]]);
        assert_eq!(omega(0, 2), [[-1, 0, 1], [0, 0, 0], [1, 0, -1]]);
        assert_eq!(omega(1, 2), [[0, 0, 0], [0, -1, 1], [0, 1, -1]]);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(omega(i, j), omega(j, i));
            // (1,1,1) is in the kernel.
            assert!(omega(i, j).iter().all(|r| r.iter().sum::<i64>() == 0));
        }
    }

    #[test]
    fn build_examples() {
        let a = kz_build(3, 1).unwrap();
        assert_eq!(a.t, kz("-z1 - z2 - z3"));
        assert_eq!(t_closed_form(5, 0), LaurentPoly::one(KZ_CTX));
        for p in [3u64, 5, 7] {
            for s in 1..=2 {
                let a = kz_build(p, s).unwrap();
                assert!(t_line_identity(&a).unwrap().pass);
                assert!(gradient_identity(&a).unwrap().pass);
                assert!(t_symmetry(&a).unwrap().pass);
            }
        }
    }

    #[test]
    fn residuals() {
        for (p, s) in [(3u64, 1u32), (3, 2), (5, 1), (5, 2), (7, 1)] {
            let a = kz_build(p, s).unwrap();
            for r in kz_residual(&a).unwrap() {
                assert!(r.pass, "p={p} s={s}: {r:?}");
            }
        }
        // Σ ∂_i T_s is p^s times a nonzero polynomial, so only ≡ 0.
        let a = kz_build(5, 1).unwrap();
        let sum = &(&a.t.derivative_z(0) + &a.t.derivative_z(1)) + &a.t.derivative_z(2);
        assert!(!sum.is_zero());
        assert!(sum.divisible_by(&ModulusContext::new(5, 1).unwrap()));
    }

    #[test]
    fn dwork_congruences() {
        for (p, s) in [(3u64, 1u32), (3, 2), (5, 1), (5, 2), (7, 1)] {
            assert!(kz_dwork_congruence(p, s, KzScalar::T).unwrap().pass, "T p={p} s={s}");
            assert!(kz_dwork_congruence(p, s, KzScalar::U).unwrap().pass, "U p={p} s={s}");
        }
        for p in [3u64, 5, 7] {
            assert!(u_t_lucas_check(p).unwrap().pass);
        }
    }

    #[test]
    fn u_factorization() {
        for (p, s) in [(3u64, 1u32), (3, 2), (5, 1), (7, 1)] {
            assert!(u_factorization_check(p, s).unwrap().pass);
            let a = kz_build(p, s).unwrap();
            let ps = hyperg::family_polynomial(FamilyTag::Half, p, s).unwrap();
            assert_eq!(restrict_to_line(&a.u), ps);
        }
    }

    #[test]
    fn line_equalities() {
        for (p, s) in [(3u64, 1u32), (5, 1), (3, 2)] {
            let a = kz_build(p, s).unwrap();
            assert!(line_equality_component(&a, 0, false).unwrap().pass);
            assert!(line_equality_component(&a, 1, false).unwrap().pass);
            // In z_3 the two sides differ by p^s times a nonzero polynomial.
            assert!(!line_equality_component(&a, 2, false).unwrap().pass);
            assert!(line_equality_component(&a, 2, true).unwrap().pass);
        }
    }

    #[test]
    fn eta_system() {
        for (p, s) in [(3u64, 1u32), (3, 2), (5, 1), (5, 2), (7, 2)] {
            let a = kz_build(p, s).unwrap();
            assert!(eta_base_point_check(&a).unwrap().pass);
            let samples = sample_points(p, s, SAMPLE_CAP).unwrap();
            if p > 3 {
                assert!(!samples.is_empty());
            }
            let r = eta_kz_system_check(&a, &samples).unwrap();
            assert!(r.pass, "p={p} s={s}: {r:?}");
        }
        let a = kz_build(5, 1).unwrap();
        let bad = [1i64, 1, 3].map(|v| PadicInt::new(v, 5, 1).unwrap());
        assert!(matches!(eta_kz_system_check(&a, &[bad]), Err(KzError::CoincidentPoints(_))));
    }

    #[test]
    fn cauchy_rates() {
        for p in [5u64, 7] {
            let samples = sample_points(p, 3, 10).unwrap();
            let r = t_ratio_cauchy_check(p, 2, &samples).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn omega_vectors() {
        for (p, s) in [(3u64, 1u32), (3, 2), (5, 1), (5, 2), (7, 1)] {
            for u in omega_samples(p, s, 12).unwrap() {
                let r = omega_vector_compare(&u, p, s).unwrap();
                assert!(r.pass, "p={p} s={s}: {r:?}");
            }
        }
    }
}
