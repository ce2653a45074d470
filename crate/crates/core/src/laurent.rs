//! Sparse multivariate Laurent polynomials with arbitrary-precision integer
//! coefficients.
//!
//! Variables come in two blocks: the `t` block, with respect to which constant
//! terms and Newton polytopes are taken, and the `z` block of parameters.
//! Terms are kept in a `BTreeMap` keyed by exponent vectors, so iteration
//! follows the lexicographic order on `(t_part, z_part)`; reports and text
//! serialization rely on that order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith;
use crate::report::{CongruenceReport, Modulus, Witness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable context mismatch: {0:?} vs {1:?}")]
    ContextMismatch(Context, Context),
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("negative exponent where a polynomial was required")]
    NegativeExponent,
    #[error("exponent vector has wrong length for context {0:?}")]
    BadExponentLength(Context),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid modulus: p = {p}, s = {s}")]
    InvalidModulus { p: u64, s: u32 },
}

/// Number of variables in each block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context {
    pub t_vars: usize,
    pub z_vars: usize,
}

impl Context {
    pub const fn new(t_vars: usize, z_vars: usize) -> Self {
        Context { t_vars, z_vars }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExpVector {
    pub t: Vec<i64>,
    pub z: Vec<i64>,
}

impl ExpVector {
    pub fn zero(ctx: Context) -> Self {
        ExpVector { t: vec![0; ctx.t_vars], z: vec![0; ctx.z_vars] }
    }

    pub fn new(t: Vec<i64>, z: Vec<i64>) -> Self {
        ExpVector { t, z }
    }

    fn checked_add(&self, other: &ExpVector) -> Result<ExpVector, PolyError> {
        let add = |a: &[i64], b: &[i64]| -> Result<Vec<i64>, PolyError> {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.checked_add(*y).ok_or(PolyError::ExponentOverflow))
                .collect()
        };
        Ok(ExpVector { t: add(&self.t, &other.t)?, z: add(&self.z, &other.z)? })
    }

    fn checked_scale(&self, q: i64) -> Result<ExpVector, PolyError> {
        let scale = |a: &[i64]| -> Result<Vec<i64>, PolyError> {
            a.iter().map(|x| x.checked_mul(q).ok_or(PolyError::ExponentOverflow)).collect()
        };
        Ok(ExpVector { t: scale(&self.t)?, z: scale(&self.z)? })
    }

    pub fn is_zero(&self) -> bool {
        self.t.iter().chain(&self.z).all(|&e| e == 0)
    }

    fn fits(&self, ctx: Context) -> bool {
        self.t.len() == ctx.t_vars && self.z.len() == ctx.z_vars
    }
}

impl fmt::Display for ExpVector {
    /// Monomial part only, e.g. `t1^2*z1`; the empty monomial prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, block) in [("t", &self.t), ("z", &self.z)] {
            for (i, &e) in block.iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(format!("{name}{}", i + 1)),
                    _ => parts.push(format!("{name}{}^{e}", i + 1)),
                }
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// A prime `p` with precision `s`, i.e. the modulus `p^s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulusContext {
    p: u64,
    s: u32,
    modulus: BigInt,
}

impl ModulusContext {
    pub fn new(p: u64, s: u32) -> Result<Self, PolyError> {
        if p < 3 || !arith::is_prime(p) || s == 0 {
            return Err(PolyError::InvalidModulus { p, s });
        }
        Ok(ModulusContext { p, s, modulus: arith::pow_big(p, s) })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn as_modulus(&self) -> Modulus {
        Modulus { p: self.p, s: self.s }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    ctx: Context,
    terms: BTreeMap<ExpVector, BigInt>,
}

impl LaurentPoly {
    pub fn zero(ctx: Context) -> Self {
        LaurentPoly { ctx, terms: BTreeMap::new() }
    }

    pub fn one(ctx: Context) -> Self {
        Self::constant(ctx, BigInt::one())
    }

    pub fn constant(ctx: Context, c: impl Into<BigInt>) -> Self {
        Self::monomial(ctx, ExpVector::zero(ctx), c).expect("zero exponent fits context")
    }

    pub fn monomial(ctx: Context, exp: ExpVector, c: impl Into<BigInt>) -> Result<Self, PolyError> {
        if !exp.fits(ctx) {
            return Err(PolyError::BadExponentLength(ctx));
        }
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Ok(LaurentPoly { ctx, terms })
    }

    /// The variable `t_{i+1}` raised to `e`.
    pub fn t_pow(ctx: Context, i: usize, e: i64) -> Self {
        let mut exp = ExpVector::zero(ctx);
        exp.t[i] = e;
        Self::monomial(ctx, exp, 1).expect("fits")
    }

    /// The variable `z_{i+1}` raised to `e`.
    pub fn z_pow(ctx: Context, i: usize, e: i64) -> Self {
        let mut exp = ExpVector::zero(ctx);
        exp.z[i] = e;
        Self::monomial(ctx, exp, 1).expect("fits")
    }

    pub fn from_terms<I>(ctx: Context, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (ExpVector, BigInt)>,
    {
        let mut out = LaurentPoly::zero(ctx);
        for (e, c) in terms {
            if !e.fits(ctx) {
                return Err(PolyError::BadExponentLength(ctx));
            }
            out.add_term(e, c);
        }
        Ok(out)
    }

    fn add_term(&mut self, e: ExpVector, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpVector, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &ExpVector) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn constant_coeff(&self) -> BigInt {
        self.coeff(&ExpVector::zero(self.ctx))
    }

    fn same_ctx(&self, other: &LaurentPoly) -> Result<(), PolyError> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(PolyError::ContextMismatch(self.ctx, other.ctx))
        }
    }

    pub fn try_add(&self, other: &LaurentPoly) -> Result<LaurentPoly, PolyError> {
        self.same_ctx(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &LaurentPoly) -> Result<LaurentPoly, PolyError> {
        self.same_ctx(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &LaurentPoly) -> Result<LaurentPoly, PolyError> {
        self.same_ctx(other)?;
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut acc: std::collections::HashMap<ExpVector, BigInt> =
            std::collections::HashMap::with_capacity(large.len() * small.len().min(64));
        for (ea, ca) in &small.terms {
            for (eb, cb) in &large.terms {
                let e = ea.checked_add(eb)?;
                let prod = ca * cb;
                match acc.get_mut(&e) {
                    Some(v) => *v += prod,
                    None => {
                        acc.insert(e, prod);
                    }
                }
            }
        }
        Ok(LaurentPoly {
            ctx: self.ctx,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn scale(&self, c: &BigInt) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero(self.ctx);
        }
        LaurentPoly {
            ctx: self.ctx,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Exact `n`-th power by repeated squaring; `a^0 = 1`.
    pub fn pow(&self, n: u64) -> Result<LaurentPoly, PolyError> {
        let mut result = LaurentPoly::one(self.ctx);
        if n == 0 {
            return Ok(result);
        }
        // A single monomial powers without any multiplication blow-up.
        if self.len() == 1 {
            let (e, c) = self.terms.iter().next().expect("one term");
            let q = i64::try_from(n).map_err(|_| PolyError::ExponentOverflow)?;
            let e = e.checked_scale(q)?;
            let c = num_traits::pow(c.clone(), n as usize);
            return LaurentPoly::monomial(self.ctx, e, c);
        }
        let mut base = self.clone();
        let mut n = n;
        loop {
            if n & 1 == 1 {
                result = result.try_mul(&base)?;
            }
            n >>= 1;
            if n == 0 {
                break;
            }
            base = base.try_mul(&base)?;
        }
        Ok(result)
    }

    /// The substitution `(t, z) -> (t^q, z^q)`.
    pub fn substitute_power(&self, q: u64) -> Result<LaurentPoly, PolyError> {
        let q = i64::try_from(q).map_err(|_| PolyError::ExponentOverflow)?;
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            terms.insert(e.checked_scale(q)?, c.clone());
        }
        Ok(LaurentPoly { ctx: self.ctx, terms })
    }

    /// The polynomial in `z` multiplying `t^e`, kept in the same context with
    /// zero `t` exponents. `coeff_t(0)` is the constant term with respect to `t`.
    pub fn coeff_t(&self, e: &[i64]) -> Result<LaurentPoly, PolyError> {
        if e.len() != self.ctx.t_vars {
            return Err(PolyError::BadExponentLength(self.ctx));
        }
        let zero_t = vec![0; self.ctx.t_vars];
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| k.t == e)
            .map(|(k, c)| (ExpVector { t: zero_t.clone(), z: k.z.clone() }, c.clone()))
            .collect();
        Ok(LaurentPoly { ctx: self.ctx, terms })
    }

    pub fn constant_term_t(&self) -> LaurentPoly {
        self.coeff_t(&vec![0; self.ctx.t_vars]).expect("length matches")
    }

    /// `CT_t(self * other)` without forming the full product.
    pub fn constant_term_of_product(&self, other: &LaurentPoly) -> Result<LaurentPoly, PolyError> {
        self.same_ctx(other)?;
        let mut by_t: BTreeMap<&[i64], Vec<(&[i64], &BigInt)>> = BTreeMap::new();
        for (e, c) in &other.terms {
            by_t.entry(e.t.as_slice()).or_default().push((e.z.as_slice(), c));
        }
        let zero_t = vec![0; self.ctx.t_vars];
        let mut out = LaurentPoly::zero(self.ctx);
        for (e, c) in &self.terms {
            let neg: Vec<i64> = e.t.iter().map(|x| -x).collect();
            let Some(partners) = by_t.get(neg.as_slice()) else { continue };
            for (z, c2) in partners {
                let z_sum = e
                    .z
                    .iter()
                    .zip(z.iter())
                    .map(|(a, b)| a.checked_add(*b).ok_or(PolyError::ExponentOverflow))
                    .collect::<Result<Vec<i64>, _>>()?;
                out.add_term(ExpVector { t: zero_t.clone(), z: z_sum }, c * *c2);
            }
        }
        Ok(out)
    }

    /// Distinct `t` exponent vectors in the support, in order.
    pub fn t_support(&self) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = self.terms.keys().map(|e| e.t.clone()).collect();
        out.dedup();
        out.sort();
        out.dedup();
        out
    }

    /// Coefficients replaced by their representatives in `[0, p^s)`.
    pub fn reduce_mod(&self, m: &ModulusContext) -> LaurentPoly {
        LaurentPoly {
            ctx: self.ctx,
            terms: self
                .terms
                .iter()
                .filter_map(|(e, c)| {
                    let r = c.mod_floor(m.modulus());
                    (!r.is_zero()).then(|| (e.clone(), r))
                })
                .collect(),
        }
    }

    /// True iff every coefficient is divisible by `p^s`.
    pub fn divisible_by(&self, m: &ModulusContext) -> bool {
        self.terms.values().all(|c| (c % m.modulus()).is_zero())
    }

    /// Minimum p-adic valuation over the coefficients; `None` for zero.
    pub fn valuation(&self, p: u64) -> Option<u32> {
        self.terms.values().filter_map(|c| arith::valuation(c, p)).min()
    }

    /// Partial derivative with respect to `z_{i+1}`.
    pub fn derivative_z(&self, i: usize) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.ctx);
        for (e, c) in &self.terms {
            let k = e.z[i];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2.z[i] -= 1;
            out.add_term(e2, c * k);
        }
        out
    }

    /// Partial derivative with respect to `t_{i+1}`.
    pub fn derivative_t(&self, i: usize) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.ctx);
        for (e, c) in &self.terms {
            let k = e.t[i];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2.t[i] -= 1;
            out.add_term(e2, c * k);
        }
        out
    }

    /// Polynomial substitution of every variable by a polynomial in the
    /// target context. All exponents must be nonnegative.
    pub fn compose(
        &self,
        target: Context,
        t_images: &[LaurentPoly],
        z_images: &[LaurentPoly],
    ) -> Result<LaurentPoly, PolyError> {
        if t_images.len() != self.ctx.t_vars || z_images.len() != self.ctx.z_vars {
            return Err(PolyError::BadExponentLength(self.ctx));
        }
        for img in t_images.iter().chain(z_images) {
            if img.ctx != target {
                return Err(PolyError::ContextMismatch(img.ctx, target));
            }
        }
        let images: Vec<&LaurentPoly> = t_images.iter().chain(z_images).collect();
        let mut powers: Vec<Vec<LaurentPoly>> = vec![vec![LaurentPoly::one(target)]; images.len()];
        let mut out = LaurentPoly::zero(target);
        for (e, c) in &self.terms {
            let mut term = LaurentPoly::constant(target, c.clone());
            for (v, &k) in e.t.iter().chain(&e.z).enumerate() {
                if k < 0 {
                    return Err(PolyError::NegativeExponent);
                }
                let k = k as usize;
                while powers[v].len() <= k {
                    let next = powers[v].last().expect("nonempty").try_mul(images[v])?;
                    powers[v].push(next);
                }
                if k > 0 {
                    term = term.try_mul(&powers[v][k])?;
                }
            }
            for (e2, c2) in term.terms {
                out.add_term(e2, c2);
            }
        }
        Ok(out)
    }

    /// Re-embeds the polynomial into a context with the same number of
    /// variables split differently, reading exponents as one flat list.
    pub fn reshape(&self, target: Context) -> Result<LaurentPoly, PolyError> {
        if target.t_vars + target.z_vars != self.ctx.t_vars + self.ctx.z_vars {
            return Err(PolyError::ContextMismatch(self.ctx, target));
        }
        let terms = self.terms.iter().map(|(e, c)| {
            let flat: Vec<i64> = e.t.iter().chain(&e.z).copied().collect();
            let (t, z) = flat.split_at(target.t_vars);
            (ExpVector { t: t.to_vec(), z: z.to_vec() }, c.clone())
        });
        LaurentPoly::from_terms(target, terms)
    }

    /// Evaluates a polynomial with nonnegative exponents modulo `m`.
    pub fn eval_mod(&self, t_vals: &[u64], z_vals: &[u64], m: u64) -> Result<u64, PolyError> {
        let mut acc: u64 = 0;
        for (e, c) in &self.terms {
            let mut term = arith::mod_floor_u64(c, m);
            for (&k, &v) in e.t.iter().zip(t_vals).chain(e.z.iter().zip(z_vals)) {
                if k < 0 {
                    return Err(PolyError::NegativeExponent);
                }
                term = arith::mul_mod(term, arith::pow_mod(v, k as u64, m), m);
            }
            acc = (acc + term) % m;
        }
        Ok(acc)
    }

    /// First monomial (in canonical order) whose coefficient is nonzero
    /// modulo `m`, with its residue in `[0, p^s)`.
    pub fn first_nonzero_mod(&self, m: &ModulusContext) -> Option<(ExpVector, BigInt)> {
        self.terms.iter().find_map(|(e, c)| {
            let r = c.mod_floor(m.modulus());
            (!r.is_zero()).then(|| (e.clone(), r))
        })
    }
}

/// Checks `a ≡ b (mod p^s)` coefficientwise; the witness is the first
/// offending monomial in lexicographic order.
pub fn congruent(a: &LaurentPoly, b: &LaurentPoly, m: &ModulusContext) -> Result<CongruenceReport, PolyError> {
    let diff = a.try_sub(b)?;
    let witness = diff.first_nonzero_mod(m).map(|(e, r)| Witness {
        monomial: e.to_string(),
        residue: r.to_string(),
    });
    Ok(CongruenceReport::from_witness(
        format!("congruence modulo {}^{}", m.p(), m.s()),
        Some(m.as_modulus()),
        witness,
    ))
}

/// Checks `a = b` exactly; the witness carries the first nonzero coefficient
/// of `a - b`.
pub fn identical(a: &LaurentPoly, b: &LaurentPoly, description: &str) -> Result<CongruenceReport, PolyError> {
    let diff = a.try_sub(b)?;
    let witness = diff.terms().next().map(|(e, c)| Witness {
        monomial: e.to_string(),
        residue: c.to_string(),
    });
    Ok(CongruenceReport::from_witness(description, None, witness))
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            let body = if e.is_zero() { mag.to_string() } else { format!("{mag}*{e}") };
            match (i, c.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl LaurentPoly {
    /// Parses the text form produced by `Display`, e.g.
    /// `1 + 2*t1 - 3*t1^-1*z1^2`. Coefficients may be omitted (`t1^2`), and
    /// `t`, `x`, `z` are accepted as aliases for `t1` and `z1`.
    pub fn parse(ctx: Context, s: &str) -> Result<LaurentPoly, PolyError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(PolyError::Parse("empty input".into()));
        }
        // Split into signed terms, ignoring '-' that follows '^'.
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        let mut prev: Option<char> = None;
        for ch in compact.chars() {
            if (ch == '+' || ch == '-') && prev != Some('^') {
                if !current.is_empty() {
                    terms.push((negative, std::mem::take(&mut current)));
                    negative = false;
                }
                if ch == '-' {
                    negative = !negative;
                }
            } else {
                current.push(ch);
            }
            prev = Some(ch);
        }
        if current.is_empty() {
            return Err(PolyError::Parse(format!("dangling sign in {s:?}")));
        }
        terms.push((negative, current));

        let mut out = LaurentPoly::zero(ctx);
        for (neg, body) in terms {
            let mut coeff = BigInt::one();
            let mut exp = ExpVector::zero(ctx);
            for factor in body.split('*') {
                if factor.is_empty() {
                    return Err(PolyError::Parse(format!("empty factor in {body:?}")));
                }
                if factor.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                    let c = BigInt::from_str(factor)
                        .map_err(|_| PolyError::Parse(format!("bad coefficient {factor:?}")))?;
                    coeff *= c;
                    continue;
                }
                let (var, e) = match factor.split_once('^') {
                    Some((v, e)) => (
                        v,
                        e.parse::<i64>()
                            .map_err(|_| PolyError::Parse(format!("bad exponent in {factor:?}")))?,
                    ),
                    None => (factor, 1),
                };
                let (block, idx) = parse_var(var)?;
                let slot = match block {
                    'z' => exp.z.get_mut(idx),
                    _ => exp.t.get_mut(idx),
                }
                .ok_or_else(|| PolyError::Parse(format!("variable {var:?} outside context")))?;
                *slot = slot.checked_add(e).ok_or(PolyError::ExponentOverflow)?;
            }
            if neg {
                coeff = -coeff;
            }
            out.add_term(exp, coeff);
        }
        Ok(out)
    }
}

fn parse_var(var: &str) -> Result<(char, usize), PolyError> {
    match var {
        "t" => return Ok(('t', 0)),
        "x" | "z" => return Ok(('z', 0)),
        _ => {}
    }
    let mut chars = var.chars();
    let block = chars.next().ok_or_else(|| PolyError::Parse("empty variable".into()))?;
    if block != 't' && block != 'z' {
        return Err(PolyError::Parse(format!("unknown variable {var:?}")));
    }
    let idx: usize = chars
        .as_str()
        .parse()
        .map_err(|_| PolyError::Parse(format!("unknown variable {var:?}")))?;
    if idx == 0 {
        return Err(PolyError::Parse(format!("variables are 1-indexed: {var:?}")));
    }
    Ok((block, idx - 1))
}

impl std::ops::Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("operands share a context")
    }
}

impl std::ops::Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_sub(rhs).expect("operands share a context")
    }
}

impl std::ops::Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("operands share a context")
    }
}

impl std::ops::Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            ctx: self.ctx,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const T1: Context = Context::new(1, 0);
    const T1Z1: Context = Context::new(1, 1);

    fn lp(ctx: Context, s: &str) -> LaurentPoly {
        LaurentPoly::parse(ctx, s).unwrap()
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&lp(T1, "t") * &lp(T1, "t^-1"), LaurentPoly::one(T1));
        assert_eq!(&lp(T1, "1 + t") * &lp(T1, "1 + t"), lp(T1, "1 + 2*t + t^2"));
        assert_eq!(
            &lp(T1Z1, "t - 1") * &lp(T1Z1, "t - x"),
            lp(T1Z1, "t^2 - t - t*z1 + z1")
        );
    }

    #[test]
    fn mul_context_mismatch() {
        let err = lp(T1, "t").try_mul(&lp(T1Z1, "t")).unwrap_err();
        assert!(matches!(err, PolyError::ContextMismatch(..)));
    }

    #[test]
    fn pow_examples() {
        assert_eq!(lp(T1, "1 + t").pow(0).unwrap(), LaurentPoly::one(T1));
        assert_eq!(lp(T1, "1 + t").pow(3).unwrap(), lp(T1, "1 + 3*t + 3*t^2 + t^3"));
        assert_eq!(lp(T1, "t + t^-1").pow(2).unwrap(), lp(T1, "t^2 + 2 + t^-2"));
    }

    #[test]
    fn substitute_power_examples() {
        assert_eq!(lp(T1, "1 + t").substitute_power(3).unwrap(), lp(T1, "1 + t^3"));
        assert_eq!(
            lp(T1Z1, "t*z1 + t^-1").substitute_power(2).unwrap(),
            lp(T1Z1, "t^2*z1^2 + t^-2")
        );
        assert_eq!(lp(T1, "5").substitute_power(7).unwrap(), lp(T1, "5"));
    }

    #[test]
    fn exponent_overflow_is_an_error() {
        let big = LaurentPoly::t_pow(T1, 0, i64::MAX / 2 + 1);
        assert_eq!(big.substitute_power(2).unwrap_err(), PolyError::ExponentOverflow);
        assert_eq!(big.try_mul(&big).unwrap_err(), PolyError::ExponentOverflow);
    }

    #[test]
    fn coeff_t_examples() {
        let a = lp(T1Z1, "t^2*z1 + 3*t^2 + z1^2");
        assert_eq!(a.coeff_t(&[2]).unwrap(), lp(T1Z1, "z1 + 3"));
        assert_eq!(lp(T1, "t + t^-1").pow(2).unwrap().constant_term_t(), lp(T1, "2"));
        assert_eq!(lp(T1, "1 + t + t^-1").pow(4).unwrap().constant_term_t(), lp(T1, "19"));
    }

    #[test]
    fn reduce_mod_examples() {
        let x = Context::new(0, 1);
        let m3 = ModulusContext::new(3, 1).unwrap();
        assert!(lp(x, "15*z1 + 36*z1^2 + 15*z1^3").reduce_mod(&m3).is_zero());
        assert_eq!(lp(T1, "1 + t").pow(3).unwrap().reduce_mod(&m3), lp(T1, "1 + t^3"));
        let m25 = ModulusContext::new(5, 2).unwrap();
        assert_eq!(lp(T1, "-1").reduce_mod(&m25), lp(T1, "24"));
    }

    #[test]
    fn congruent_examples() {
        let m9 = ModulusContext::new(3, 2).unwrap();
        let a = lp(T1, "1 + t").pow(9).unwrap();
        let b = lp(T1, "1 + t^3").pow(3).unwrap();
        assert!(congruent(&a, &a, &m9).unwrap().pass);
        assert!(congruent(&a, &b, &m9).unwrap().pass);
        let r = congruent(&lp(T1, "1 + 3*t"), &lp(T1, "1"), &m9).unwrap();
        assert!(!r.pass);
        let w = r.witness.unwrap();
        assert_eq!(w.monomial, "t1");
        assert_eq!(w.residue, "3");
    }

    #[test]
    fn modulus_validation() {
        assert!(ModulusContext::new(2, 1).is_err());
        assert!(ModulusContext::new(9, 1).is_err());
        assert!(ModulusContext::new(3, 0).is_err());
    }

    #[test]
    fn text_round_trip() {
        let a = lp(T1Z1, "-3*t^-1*z1^2 + 1 + 2*t");
        assert_eq!(a.to_string(), "-3*t1^-1*z1^2 + 1 + 2*t1");
        assert_eq!(LaurentPoly::parse(T1Z1, &a.to_string()).unwrap(), a);
        assert_eq!(LaurentPoly::zero(T1).to_string(), "0");
        assert!(LaurentPoly::parse(T1, "t2").is_err());
        assert!(LaurentPoly::parse(T1, "1 +").is_err());
    }

    #[test]
    fn derivatives_and_composition() {
        let ctx = Context::new(0, 2);
        let f = lp(ctx, "z1^2*z2 + 3*z2");
        assert_eq!(f.derivative_z(0), lp(ctx, "2*z1*z2"));
        assert_eq!(f.derivative_z(1), lp(ctx, "z1^2 + 3"));
        // z1 -> z1 - z2, z2 -> 1
        let g = f
            .compose(ctx, &[], &[lp(ctx, "z1 - z2"), LaurentPoly::one(ctx)])
            .unwrap();
        assert_eq!(g, lp(ctx, "z1^2 - 2*z1*z2 + z2^2 + 3"));
        assert_eq!(f.eval_mod(&[], &[2, 5], 7).unwrap(), (4 * 5 + 15) % 7);
    }
}
