//! Ghost terms and the decomposition of `Λ_0 Λ_1^p ⋯ Λ_{l-1}^{p^{l-1}}`
//! into products of the `I_λ` polynomials, together with the constant-term
//! congruences built on top of it.

use std::collections::HashMap;

use rand::Rng;
use thiserror::Error;

use crate::laurent::{self, Context, ExpVector, LaurentPoly, ModulusContext, PolyError};
use crate::polytope::{self, PolytopeError};
use crate::report::CongruenceReport;

/// Decomposition sums run over all `2^{l-1}` compositions; beyond this the
/// identities are not checked.
pub const MAX_TUPLE_LEN: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GhostError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("tuple {name} is not admissible: {source}")]
    NotAdmissible {
        name: String,
        #[source]
        source: PolytopeError,
    },
    #[error("index tuple of length {0} for a polynomial tuple of length {1}")]
    LengthMismatch(usize, usize),
    #[error("{0} is not in S: entry m_i must satisfy 0 <= m_i <= i")]
    NotInS(String),
    #[error("tuple length {0} exceeds the supported maximum {MAX_TUPLE_LEN}")]
    TooLong(usize),
    #[error("digit {digit} outside [1, {max}]")]
    DigitOutOfRange { digit: u64, max: u64 },
    #[error("empty tuple where a nonempty one is required")]
    Empty,
    #[error("members of a tuple must share a context")]
    MixedContext,
}

/// An ordered tuple of Laurent polynomials in a common context. May be
/// empty; the empty tuple has `λ̃ = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyTuple {
    ctx: Context,
    members: Vec<LaurentPoly>,
}

impl PolyTuple {
    pub fn new(ctx: Context, members: Vec<LaurentPoly>) -> Result<Self, GhostError> {
        if members.iter().any(|m| m.context() != ctx) {
            return Err(GhostError::MixedContext);
        }
        Ok(PolyTuple { ctx, members })
    }

    pub fn empty(ctx: Context) -> Self {
        PolyTuple { ctx, members: Vec::new() }
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    pub fn members(&self) -> &[LaurentPoly] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The concatenation `self * other`.
    pub fn concat(&self, other: &PolyTuple) -> Result<PolyTuple, GhostError> {
        if self.ctx != other.ctx {
            return Err(GhostError::MixedContext);
        }
        let mut members = self.members.clone();
        members.extend(other.members.iter().cloned());
        Ok(PolyTuple { ctx: self.ctx, members })
    }

    /// The derivative tuple: drop the first member.
    pub fn derivative(&self) -> PolyTuple {
        PolyTuple { ctx: self.ctx, members: self.members.iter().skip(1).cloned().collect() }
    }

    /// `λ̃ = Λ_0 Λ_1^p ⋯ Λ_{l-1}^{p^{l-1}}`.
    pub fn tilde(&self, p: u64) -> Result<LaurentPoly, PolyError> {
        let mut acc = LaurentPoly::one(self.ctx);
        let mut q = 1u64;
        for m in &self.members {
            acc = acc.try_mul(&m.pow(q)?)?;
            q = q.checked_mul(p).ok_or(PolyError::ExponentOverflow)?;
        }
        Ok(acc)
    }

    /// `CT_t(λ̃)`, with the last factor folded into the constant-term
    /// extraction.
    pub fn tilde_constant_term(&self, p: u64) -> Result<LaurentPoly, PolyError> {
        let Some((last, init)) = self.members.split_last() else {
            return Ok(LaurentPoly::one(self.ctx));
        };
        let head = PolyTuple { ctx: self.ctx, members: init.to_vec() }.tilde(p)?;
        let q = p.checked_pow(init.len() as u32).ok_or(PolyError::ExponentOverflow)?;
        head.constant_term_of_product(&last.pow(q)?)
    }

    fn slice(&self, start: usize, len: usize) -> PolyTuple {
        PolyTuple { ctx: self.ctx, members: self.members[start..start + len].to_vec() }
    }
}

/// `R_0(Λ) = Λ`, `R_m(Λ) = Λ^{p^m} - Λ(t^p, z^p)^{p^{m-1}}`.
pub fn ghost_term(lambda: &LaurentPoly, m: u32, p: u64) -> Result<LaurentPoly, PolyError> {
    if m == 0 {
        return Ok(lambda.clone());
    }
    let full = lambda.pow(p.checked_pow(m).ok_or(PolyError::ExponentOverflow)?)?;
    let frob = lambda.substitute_power(p)?.pow(p.pow(m - 1))?;
    full.try_sub(&frob)
}

/// Membership in `S`: `0 <= m_i <= i` for every position.
pub fn in_s(m: &[u32]) -> bool {
    !m.is_empty() && m.iter().enumerate().all(|(i, &v)| v as usize <= i)
}

/// `R_{m,λ} = Π_i R_{m_i}(Λ_i)(t^{p^{i - m_i}}, z^{p^{i - m_i}})`.
pub fn composed_ghost(lambda: &PolyTuple, m: &[u32], p: u64) -> Result<LaurentPoly, GhostError> {
    if m.len() != lambda.len() {
        return Err(GhostError::LengthMismatch(m.len(), lambda.len()));
    }
    if !in_s(m) {
        return Err(GhostError::NotInS(format!("{m:?}")));
    }
    let mut acc = LaurentPoly::one(lambda.ctx);
    for (i, (lam, &mi)) in lambda.members.iter().zip(m).enumerate() {
        let r = ghost_term(lam, mi, p)?;
        let q = p.pow(i as u32 - mi);
        acc = acc.try_mul(&r.substitute_power(q)?)?;
    }
    Ok(acc)
}

/// Positions `1 <= i < k` where `m` splits as `m[..i] * m[i..]` inside `S`.
fn split_points(m: &[u32]) -> Vec<usize> {
    (1..m.len())
        .filter(|&i| m[i..].iter().enumerate().all(|(j, &v)| v as usize <= j))
        .collect()
}

pub fn is_indecomposable(m: &[u32]) -> bool {
    in_s(m) && split_points(m).is_empty()
}

/// All of `S_k`, or only its indecomposable members, in lexicographic order.
pub fn enumerate_index_tuples(k: usize, indecomposable_only: bool) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let mut m = vec![0u32; k];
    loop {
        if !indecomposable_only || is_indecomposable(&m) {
            out.push(m.clone());
        }
        // odometer with digit i ranging over 0..=i, last position fastest
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if (m[i] as usize) < i {
                m[i] += 1;
                break;
            }
            m[i] = 0;
        }
    }
}

/// The unique factorization into indecomposables: cut at every point where
/// the remaining suffix is itself in `S`.
pub fn factor_index_tuple(m: &[u32]) -> Result<Vec<Vec<u32>>, GhostError> {
    if !in_s(m) {
        return Err(GhostError::NotInS(format!("{m:?}")));
    }
    let mut cuts = split_points(m);
    cuts.push(m.len());
    let mut start = 0;
    let mut out = Vec::with_capacity(cuts.len());
    for c in cuts {
        out.push(m[start..c].to_vec());
        start = c;
    }
    Ok(out)
}

/// `I_λ = Σ_{m ∈ S_l^ind} R_{m,λ}`.
pub fn i_lambda(lambda: &PolyTuple, p: u64) -> Result<LaurentPoly, GhostError> {
    if lambda.is_empty() {
        return Err(GhostError::Empty);
    }
    if lambda.len() > MAX_TUPLE_LEN {
        return Err(GhostError::TooLong(lambda.len()));
    }
    let mut acc = LaurentPoly::zero(lambda.ctx);
    for m in enumerate_index_tuples(lambda.len(), true) {
        acc = acc.try_add(&composed_ghost(lambda, &m, p)?)?;
    }
    Ok(acc)
}

/// Compositions of `l` as ordered lists of positive part lengths.
pub fn compositions(l: usize) -> Vec<Vec<usize>> {
    if l == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::with_capacity(1 << (l - 1));
    for mask in 0u32..(1 << (l - 1)) {
        let mut parts = Vec::new();
        let mut len = 1;
        for bit in 0..l - 1 {
            if mask >> bit & 1 == 1 {
                parts.push(len);
                len = 1;
            } else {
                len += 1;
            }
        }
        parts.push(len);
        out.push(parts);
    }
    out
}

/// Memoised `I` of consecutive sub-tuples `(start, len)`.
struct ISubTuples<'a> {
    lambda: &'a PolyTuple,
    p: u64,
    cache: HashMap<(usize, usize), LaurentPoly>,
}

impl<'a> ISubTuples<'a> {
    fn new(lambda: &'a PolyTuple, p: u64) -> Self {
        ISubTuples { lambda, p, cache: HashMap::new() }
    }

    fn get(&mut self, start: usize, len: usize) -> Result<LaurentPoly, GhostError> {
        if let Some(v) = self.cache.get(&(start, len)) {
            return Ok(v.clone());
        }
        let v = i_lambda(&self.lambda.slice(start, len), self.p)?;
        self.cache.insert((start, len), v.clone());
        Ok(v)
    }
}

fn check_len(lambda: &PolyTuple) -> Result<(), GhostError> {
    if lambda.is_empty() {
        return Err(GhostError::Empty);
    }
    if lambda.len() > MAX_TUPLE_LEN {
        return Err(GhostError::TooLong(lambda.len()));
    }
    Ok(())
}

/// Right-hand side of the decomposition identity: the sum over
/// compositions of `Π_i I_{λ^i}(t^{p^{o_i}}, z^{p^{o_i}})`, `o_i` the length
/// of the preceding pieces.
pub fn decomposition_sum(lambda: &PolyTuple, p: u64) -> Result<LaurentPoly, GhostError> {
    check_len(lambda)?;
    let mut parts = ISubTuples::new(lambda, p);
    let mut total = LaurentPoly::zero(lambda.ctx);
    for comp in compositions(lambda.len()) {
        let mut prod = LaurentPoly::one(lambda.ctx);
        let mut offset = 0;
        for len in comp {
            let piece = parts.get(offset, len)?.substitute_power(p.pow(offset as u32))?;
            prod = prod.try_mul(&piece)?;
            offset += len;
        }
        total = total.try_add(&prod)?;
    }
    Ok(total)
}

/// `Σ_{m ∈ S_l} R_{m,λ}`; equals `λ̃` exactly.
pub fn ghost_reconstruction(lambda: &PolyTuple, p: u64) -> Result<LaurentPoly, GhostError> {
    check_len(lambda)?;
    let mut total = LaurentPoly::zero(lambda.ctx);
    for m in enumerate_index_tuples(lambda.len(), false) {
        total = total.try_add(&composed_ghost(lambda, &m, p)?)?;
    }
    Ok(total)
}

/// `λ̃` equals the composition sum of products of `I` pieces, exactly.
pub fn verify_ghost_decomposition(lambda: &PolyTuple, p: u64) -> Result<CongruenceReport, GhostError> {
    let lhs = lambda.tilde(p)?;
    let rhs = decomposition_sum(lambda, p)?;
    Ok(laurent::identical(
        &lhs,
        &rhs,
        &format!("tuple decomposition into I-products, l = {}, p = {p}", lambda.len()),
    )?)
}

/// Right-hand side of the constant-term factorization:
/// `Σ Π_i CT_t(I_{λ^i})(z^{p^{o_i}})`.
pub fn ct_decomposition_sum(lambda: &PolyTuple, p: u64) -> Result<LaurentPoly, GhostError> {
    check_len(lambda)?;
    let mut parts = ISubTuples::new(lambda, p);
    let mut total = LaurentPoly::zero(lambda.ctx);
    for comp in compositions(lambda.len()) {
        let mut prod = LaurentPoly::one(lambda.ctx);
        let mut offset = 0;
        for len in comp {
            let ct = parts.get(offset, len)?.constant_term_t();
            prod = prod.try_mul(&ct.substitute_power(p.pow(offset as u32))?)?;
            offset += len;
        }
        total = total.try_add(&prod)?;
    }
    Ok(total)
}

fn require_admissible(name: &str, tuple: &PolyTuple, p: u64) -> Result<(), GhostError> {
    if tuple.is_empty() {
        return Ok(());
    }
    polytope::check_admissible(tuple.members(), p)
        .map_err(|source| GhostError::NotAdmissible { name: name.to_string(), source })
}

/// `CT_t(λ̃)` equals the composition sum of constant terms of `I` pieces,
/// exactly; requires an admissible tuple.
pub fn verify_ct_factorization(lambda: &PolyTuple, p: u64) -> Result<CongruenceReport, GhostError> {
    check_len(lambda)?;
    require_admissible("λ", lambda, p)?;
    let lhs = lambda.tilde_constant_term(p)?;
    let rhs = ct_decomposition_sum(lambda, p)?;
    Ok(laurent::identical(
        &lhs,
        &rhs,
        &format!("constant-term factorization, l = {}, p = {p}", lambda.len()),
    )?)
}

/// `CT(ã*b)(z) CT(ã'*c)(z^p) ≡ CT(ã'*b)(z^p) CT(ã*c)(z) (mod p^{l(a)})`.
pub fn verify_dwork_tuple_congruence(
    a: &PolyTuple,
    b: &PolyTuple,
    c: &PolyTuple,
    p: u64,
) -> Result<CongruenceReport, GhostError> {
    if a.is_empty() {
        return Err(GhostError::Empty);
    }
    let da = a.derivative();
    let ab = a.concat(b)?;
    let ac = a.concat(c)?;
    let dab = da.concat(b)?;
    let dac = da.concat(c)?;
    for (name, t) in [("a*b", &ab), ("a*c", &ac), ("a'*b", &dab), ("a'*c", &dac)] {
        require_admissible(name, t, p)?;
    }
    let m = ModulusContext::new(p, a.len() as u32)?;
    let lhs = ab.tilde_constant_term(p)?.try_mul(&dac.tilde_constant_term(p)?.substitute_power(p)?)?;
    let rhs = dab.tilde_constant_term(p)?.substitute_power(p)?.try_mul(&ac.tilde_constant_term(p)?)?;
    let report = laurent::congruent(&lhs, &rhs, &m)?;
    let v = lhs.try_sub(&rhs)?.valuation(p);
    Ok(report
        .with_description(format!(
            "tuple constant-term congruence, l(a) = {}, l(b) = {}, l(c) = {}, p = {p}",
            a.len(),
            b.len(),
            c.len()
        ))
        .with_valuation(v))
}

fn digits_tuple(lambda: &LaurentPoly, digits: &[u64], p: u64) -> Result<PolyTuple, GhostError> {
    let members = digits
        .iter()
        .map(|&d| {
            if d == 0 || d >= p {
                return Err(GhostError::DigitOutOfRange { digit: d, max: p - 1 });
            }
            Ok(lambda.pow(d)?)
        })
        .collect::<Result<Vec<_>, _>>()?;
    PolyTuple::new(lambda.context(), members)
}

/// `CT_t(Λ^{m_0 + m_1 p + ⋯})` computed directly from the digit sum.
pub fn ct_digit_power(lambda: &LaurentPoly, digits: &[u64], p: u64) -> Result<LaurentPoly, GhostError> {
    let mut n: u64 = 0;
    for (i, &d) in digits.iter().enumerate() {
        if d == 0 || d >= p {
            return Err(GhostError::DigitOutOfRange { digit: d, max: p - 1 });
        }
        n += d * p.pow(i as u32);
    }
    Ok(lambda.pow(n)?.constant_term_t())
}

/// The digit-tuple congruence for powers of a single Laurent polynomial:
/// `CT(Λ^{a*b}) CT(Λ^{a'*c}) ≡ CT(Λ^{a'*b}) CT(Λ^{a*c}) (mod p^{l(a)})`.
///
/// Each side is computed twice, once from the digit sum exponent directly
/// and once through the tuple machinery on `(Λ^{d_0}, Λ^{d_1}, …)`; the two
/// routes must agree exactly.
pub fn verify_mellit(
    lambda: &LaurentPoly,
    a: &[u64],
    b: &[u64],
    c: &[u64],
    p: u64,
) -> Result<CongruenceReport, GhostError> {
    if a.is_empty() {
        return Err(GhostError::Empty);
    }
    let concat = |x: &[u64], y: &[u64]| -> Vec<u64> { x.iter().chain(y).copied().collect() };
    let ab = concat(a, b);
    let ac = concat(a, c);
    let dab = concat(&a[1..], b);
    let dac = concat(&a[1..], c);
    let m = ModulusContext::new(p, a.len() as u32)?;

    let direct = |d: &[u64]| -> Result<LaurentPoly, GhostError> {
        if d.is_empty() {
            Ok(LaurentPoly::one(lambda.context()))
        } else {
            ct_digit_power(lambda, d, p)
        }
    };
    let lhs = direct(&ab)?.try_mul(&direct(&dac)?)?;
    let rhs = direct(&dab)?.try_mul(&direct(&ac)?)?;
    let direct_report = laurent::congruent(&lhs, &rhs, &m)?;

    let tuple = |d: &[u64]| digits_tuple(lambda, d, p);
    let via_tuples = verify_dwork_tuple_congruence(&tuple(a)?, &tuple(b)?, &tuple(c)?, p)?;
    let mut agree = Vec::new();
    for (name, d) in [("a*b", &ab), ("a*c", &ac), ("a'*b", &dab), ("a'*c", &dac)] {
        let via = tuple(d)?.tilde_constant_term(p)?;
        agree.push(laurent::identical(&direct(d)?, &via, &format!("routes agree on {name}"))?);
    }
    let routes = CongruenceReport::all("digit-sum and tuple routes agree", None, &agree);
    let v = lhs.try_sub(&rhs)?.valuation(p);
    Ok(CongruenceReport::all(
        format!("digit-power constant-term congruence, a = {a:?}, b = {b:?}, c = {c:?}, p = {p}"),
        Some(m.as_modulus()),
        &[direct_report, via_tuples, routes],
    )
    .with_valuation(v))
}

/// A random admissible instance `(a, b, c)` for the tuple congruence in the
/// context `(1, 1)`: members have t-support in `{-1, 0, 1}` with the origin in
/// the hull, so every weighted sum stays strictly inside `(-p^k, p^k)`.
pub fn random_tuple_instance<R: Rng>(
    rng: &mut R,
    max_a: usize,
    max_bc: usize,
) -> (PolyTuple, PolyTuple, PolyTuple) {
    let ctx = Context::new(1, 1);
    let member = |rng: &mut R| -> LaurentPoly {
        loop {
            let mut terms = Vec::new();
            for t in -1..=1i64 {
                for z in 0..=1i64 {
                    if rng.gen_bool(0.5) {
                        let mut c: i64 = rng.gen_range(-3..=3);
                        if c == 0 {
                            c = 1;
                        }
                        terms.push((ExpVector::new(vec![t], vec![z]), c.into()));
                    }
                }
            }
            let poly = LaurentPoly::from_terms(ctx, terms).expect("context (1, 1)");
            let ts = poly.t_support();
            let hull_has_origin = ts.iter().any(|t| t[0] == 0)
                || (ts.iter().any(|t| t[0] < 0) && ts.iter().any(|t| t[0] > 0));
            if !poly.is_zero() && hull_has_origin {
                return poly;
            }
        }
    };
    let la = rng.gen_range(1..=max_a);
    let lb = rng.gen_range(0..=max_bc);
    let lc = rng.gen_range(0..=max_bc);
    let a = (0..la).map(|_| member(rng)).collect();
    let b = (0..lb).map(|_| member(rng)).collect();
    let c = (0..lc).map(|_| member(rng)).collect();
    (
        PolyTuple::new(ctx, a).expect("shared context"),
        PolyTuple::new(ctx, b).expect("shared context"),
        PolyTuple::new(ctx, c).expect("shared context"),
    )
}

/// `(t - 1)(1 - z_1/t)` in the context `(1, 1)`, the building block of the
/// Legendre-family approximation polynomials.
pub fn legendre_block() -> LaurentPoly {
    let ctx = Context::new(1, 1);
    let a = LaurentPoly::parse(ctx, "t1 - 1").expect("literal");
    let b = LaurentPoly::parse(ctx, "1 - z1*t1^-1").expect("literal");
    &a * &b
}

/// The trinomial `1 + t + 1/t` in one `t` variable.
pub fn trinomial() -> LaurentPoly {
    LaurentPoly::parse(Context::new(1, 0), "t1^-1 + 1 + t1").expect("literal")
}

/// `true` iff every coefficient of `a` is divisible by `p^k`.
pub fn divisible_by_power(a: &LaurentPoly, p: u64, k: u32) -> bool {
    if k == 0 {
        return true;
    }
    let m = ModulusContext::new(p, k).expect("odd prime");
    a.divisible_by(&m)
}

/// `|m|`, the entry sum of an index tuple.
pub fn weight(m: &[u32]) -> u32 {
    m.iter().sum()
}
