//! Symmetrised squared-binomial differences `B(a,b;k)` and exhaustive scans
//! of their divisibility by `p^{s+1}`.
//!
//! `A(a,b;k) = C(M_{s+2}, a + Σ k1_i p^i + b p^{s+1})² C(M_s, Σ k2_i p^{i-1})²
//!           - C(M_{s+1}, a + Σ k1_i p^i)² C(M_{s+1}, Σ k2_i p^{i-1} + b p^s)²`
//! with `M_r = (p^r - 1)/2`, and `B` sums `A` over the `2^s` swaps
//! `k1_i <-> k2_i`.

use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::report::{CongruenceReport, Modulus, Witness};

/// Default cap on the number of profiles in one scan.
pub const DEFAULT_GRID_CAP: u64 = 2_000_000;

/// Digits of valuation recorded beyond the conjectured `s + 1`.
const EXTRA_PRECISION: u32 = 2;

#[derive(Debug, Error)]
pub enum ConjectureError {
    #[error("digit {digit} outside [0, {max}]")]
    DigitOutOfRange { digit: u64, max: u64 },
    #[error("profile has {got} digit pairs, expected {want}")]
    WrongLength { got: usize, want: usize },
    #[error("grid of {size} profiles exceeds the cap {cap}")]
    GridTooLarge { size: u64, cap: u64 },
    #[error("invalid prime or precision: p = {p}, s = {s}")]
    InvalidParameters { p: u64, s: u32 },
    #[error("checkpoint i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint record: {0}")]
    Json(#[from] serde_json::Error),
}

/// `(a, b; k^{(1)}, …, k^{(s)})` with every digit in `[0, p-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DigitProfile {
    pub a: u64,
    pub b: u64,
    pub k: Vec<(u64, u64)>,
}

impl DigitProfile {
    pub fn new(a: u64, b: u64, k: Vec<(u64, u64)>) -> Self {
        DigitProfile { a, b, k }
    }

    pub fn validate(&self, p: u64, s: u32) -> Result<(), ConjectureError> {
        if self.k.len() != s as usize {
            return Err(ConjectureError::WrongLength { got: self.k.len(), want: s as usize });
        }
        let digits = [self.a, self.b].into_iter().chain(self.k.iter().flat_map(|&(x, y)| [x, y]));
        for d in digits {
            if d >= p {
                return Err(ConjectureError::DigitOutOfRange { digit: d, max: p - 1 });
            }
        }
        Ok(())
    }

    /// The profile with pairs swapped where bit `i` of `mask` is set.
    pub fn swapped(&self, mask: u32) -> DigitProfile {
        let k = self
            .k
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| if mask >> i & 1 == 1 { (y, x) } else { (x, y) })
            .collect();
        DigitProfile { a: self.a, b: self.b, k }
    }

    /// Lower indices `(n1, n2, n3, n4)` of the four binomials in `A`.
    fn indices(&self, p: u64, s: u32) -> (u64, u64, u64, u64) {
        let mut first = self.a;
        let mut second = 0u64;
        let mut q = 1u64;
        for &(k1, k2) in &self.k {
            second += k2 * q;
            q *= p;
            first += k1 * q;
        }
        let ps = p.pow(s);
        (first + self.b * ps * p, second, first, second + self.b * ps)
    }

    /// The `index`-th profile of the full grid in lexicographic order of
    /// `(a, b, k1_1, k2_1, …)`.
    pub fn from_index(mut index: u64, p: u64, s: u32) -> DigitProfile {
        let n = 2 * s as usize + 2;
        let mut digits = vec![0u64; n];
        for d in digits.iter_mut().rev() {
            *d = index % p;
            index /= p;
        }
        let k = (0..s as usize).map(|i| (digits[2 + 2 * i], digits[3 + 2 * i])).collect();
        DigitProfile { a: digits[0], b: digits[1], k }
    }
}

fn half(p: u64, r: u32) -> u64 {
    (p.pow(r) - 1) / 2
}

fn sq(x: BigInt) -> BigInt {
    &x * &x
}

/// `A(a, b; k)`, exactly.
pub fn a_term(profile: &DigitProfile, p: u64, s: u32) -> Result<BigInt, ConjectureError> {
    check_params(p, s)?;
    profile.validate(p, s)?;
    let (n1, n2, n3, n4) = profile.indices(p, s);
    let c = |m: u64, n: u64| arith::binomial(m as i64, n as i64);
    Ok(sq(c(half(p, s + 2), n1)) * sq(c(half(p, s), n2)) - sq(c(half(p, s + 1), n3)) * sq(c(half(p, s + 1), n4)))
}

/// `B(a, b; k)`: the sum of `A` over all `2^s` swaps.
pub fn b_symmetrized(profile: &DigitProfile, p: u64, s: u32) -> Result<BigInt, ConjectureError> {
    let mut acc = BigInt::zero();
    for mask in 0..1u32 << s {
        acc += a_term(&profile.swapped(mask), p, s)?;
    }
    Ok(acc)
}

fn check_params(p: u64, s: u32) -> Result<(), ConjectureError> {
    if p < 3 || !arith::is_prime(p) || s == 0 || p.checked_pow(s + 2 + EXTRA_PRECISION + 1).is_none_or(|m| m >= 1 << 62) {
        return Err(ConjectureError::InvalidParameters { p, s });
    }
    Ok(())
}

/// Binomial rows modulo `p^e` for the three upper indices in `A`.
struct Tables {
    p: u64,
    s: u32,
    modulus: u64,
    top: Vec<u64>,
    low: Vec<u64>,
    mid: Vec<u64>,
}

impl Tables {
    fn new(p: u64, s: u32, e: u32) -> Self {
        let sq_row = |m: u64| -> Vec<u64> {
            let q = p.pow(e);
            arith::binomial_row_mod(m, p, e).into_iter().map(|c| arith::mul_mod(c, c, q)).collect()
        };
        Tables { p, s, modulus: p.pow(e), top: sq_row(half(p, s + 2)), low: sq_row(half(p, s)), mid: sq_row(half(p, s + 1)) }
    }

    fn a_mod(&self, profile: &DigitProfile) -> u64 {
        let m = self.modulus;
        let get = |row: &[u64], n: u64| row.get(n as usize).copied().unwrap_or(0);
        let (n1, n2, n3, n4) = profile.indices(self.p, self.s);
        let plus = arith::mul_mod(get(&self.top, n1), get(&self.low, n2), m);
        let minus = arith::mul_mod(get(&self.mid, n3), get(&self.mid, n4), m);
        (plus + m - minus) % m
    }

    fn b_mod(&self, profile: &DigitProfile) -> u64 {
        (0..1u32 << self.s).fold(0u64, |acc, mask| (acc + self.a_mod(&profile.swapped(mask))) % self.modulus)
    }
}

/// One scanned profile: `B` modulo `p^precision` and its valuation, capped
/// at `precision` (`None` means `B ≡ 0` at that precision).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub profile: DigitProfile,
    pub b: String,
    pub precision: u32,
    pub valuation: Option<u32>,
}

/// Options for [`conjecture_scan`].
#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub grid_cap: u64,
    /// NDJSON file of [`ScanRecord`]s; completed `(a, b)` shards found in it
    /// are not recomputed.
    pub checkpoint: Option<PathBuf>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { grid_cap: DEFAULT_GRID_CAP, checkpoint: None }
    }
}

/// Outcome of a scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub p: u64,
    pub s: u32,
    pub grid_size: u64,
    pub checked: u64,
    /// Smallest valuation seen, capped at the scan precision.
    pub min_valuation: u32,
    pub counterexample: Option<ScanRecord>,
}

impl ScanSummary {
    pub fn report(&self) -> CongruenceReport {
        let modulus = Some(Modulus { p: self.p, s: self.s + 1 });
        let desc = format!(
            "symmetrised binomial differences divisible by p^(s+1) over {} of {} profiles",
            self.checked, self.grid_size
        );
        let witness = self.counterexample.as_ref().map(|r| Witness {
            monomial: serde_json::to_string(&r.profile).expect("profile serialises"),
            residue: r.b.clone(),
        });
        CongruenceReport::from_witness(desc, modulus, witness).with_valuation(Some(self.min_valuation))
    }
}

fn shard_records(tables: &Tables, p: u64, s: u32, precision: u32, a: u64, b: u64) -> Vec<ScanRecord> {
    let per_shard = p.pow(2 * s);
    (0..per_shard)
        .map(|i| {
            let mut profile = DigitProfile::from_index(i, p, s);
            profile.a = a;
            profile.b = b;
            let r = tables.b_mod(&profile);
            ScanRecord { profile, b: r.to_string(), precision, valuation: arith::valuation_u64(r, p) }
        })
        .collect()
}

fn load_checkpoint(path: &Path, p: u64, s: u32, precision: u32) -> Result<Vec<ScanRecord>, ConjectureError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let per_shard = p.pow(2 * s) as usize;
    let mut records: Vec<ScanRecord> = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<ScanRecord>(&line) {
            Ok(r) if r.precision == precision && r.profile.k.len() == s as usize => records.push(r),
            // A torn final line from an interrupted run is dropped.
            _ => break,
        }
    }
    // Keep only complete shards.
    let mut out = Vec::new();
    for chunk in records.chunks(per_shard) {
        let key = (chunk[0].profile.a, chunk[0].profile.b);
        if chunk.len() == per_shard && chunk.iter().all(|r| (r.profile.a, r.profile.b) == key) {
            out.extend_from_slice(chunk);
        } else {
            break;
        }
    }
    Ok(out)
}

/// Checks `p^{s+1} | B(a,b;k)` over the whole digit grid. Shards by `(a, b)`
/// run in parallel; the first counterexample in grid order stops all later
/// shards, so the verdict and witness do not depend on scheduling.
pub fn conjecture_scan(p: u64, s: u32, opts: &ScanOptions) -> Result<ScanSummary, ConjectureError> {
    check_params(p, s)?;
    let grid_size = p.pow(2 * s + 2);
    if grid_size > opts.grid_cap {
        return Err(ConjectureError::GridTooLarge { size: grid_size, cap: opts.grid_cap });
    }
    let precision = s + 1 + EXTRA_PRECISION;
    let tables = Tables::new(p, s, precision);
    let target = s + 1;

    let resumed = match &opts.checkpoint {
        Some(path) => load_checkpoint(path, p, s, precision)?,
        None => Vec::new(),
    };
    let done: BTreeSet<(u64, u64)> = resumed.iter().map(|r| (r.profile.a, r.profile.b)).collect();
    let writer = match &opts.checkpoint {
        Some(path) => {
            // Rewrite so that a torn tail from an earlier run is dropped.
            let mut w = BufWriter::new(File::create(path)?);
            for r in &resumed {
                serde_json::to_writer(&mut w, r)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
            drop(w);
            Some(Mutex::new(BufWriter::new(OpenOptions::new().append(true).open(path)?)))
        }
        None => None,
    };

    let shards: Vec<(u64, u64)> = (0..p).flat_map(|a| (0..p).map(move |b| (a, b))).collect();
    let first_bad = AtomicUsize::new(usize::MAX);
    let results: Vec<Option<Vec<ScanRecord>>> = shards
        .par_iter()
        .enumerate()
        .map(|(idx, &(a, b))| -> Result<Option<Vec<ScanRecord>>, ConjectureError> {
            if idx > first_bad.load(Ordering::SeqCst) {
                return Ok(None);
            }
            let records = if done.contains(&(a, b)) {
                resumed.iter().filter(|r| (r.profile.a, r.profile.b) == (a, b)).cloned().collect()
            } else {
                let recs = shard_records(&tables, p, s, precision, a, b);
                if let Some(w) = &writer {
                    let mut w = w.lock().expect("checkpoint writer");
                    for r in &recs {
                        serde_json::to_writer(&mut *w, r)?;
                        w.write_all(b"\n")?;
                    }
                    w.flush()?;
                }
                recs
            };
            if records.iter().any(|r| r.valuation.is_some_and(|v| v < target)) {
                first_bad.fetch_min(idx, Ordering::SeqCst);
            }
            Ok(Some(records))
        })
        .collect::<Result<_, _>>()?;

    let stop = first_bad.load(Ordering::SeqCst);
    let mut checked = 0u64;
    let mut min_valuation = precision;
    let mut counterexample = None;
    for (idx, recs) in results.into_iter().enumerate() {
        if idx > stop {
            break;
        }
        let Some(recs) = recs else { continue };
        for r in recs {
            checked += 1;
            let v = r.valuation.unwrap_or(precision);
            min_valuation = min_valuation.min(v);
            if v < target && counterexample.is_none() {
                counterexample = Some(r);
            }
        }
    }
    Ok(ScanSummary { p, s, grid_size, checked, min_valuation, counterexample })
}

/// The displayed double sum for the coefficient of
/// `x^{N_0 + N_1 p + … + N_{s+1} p^{s+1}}`: the sum of `A(N_0, N_{s+1}; k)`
/// over splits `k1_i + k2_i = N_i`, `i = 1..s`.
pub fn display_sum(p: u64, s: u32, n: &[u64]) -> Result<BigInt, ConjectureError> {
    if n.len() != s as usize + 2 {
        return Err(ConjectureError::WrongLength { got: n.len(), want: s as usize + 2 });
    }
    if let Some(&d) = n.iter().find(|&&d| d >= p) {
        return Err(ConjectureError::DigitOutOfRange { digit: d, max: p - 1 });
    }
    let mut acc = BigInt::zero();
    let inner = &n[1..=s as usize];
    let count: u64 = inner.iter().map(|&d| d + 1).product();
    for mut idx in 0..count {
        let mut k = Vec::with_capacity(s as usize);
        for &d in inner {
            let k1 = idx % (d + 1);
            idx /= d + 1;
            k.push((k1, d - k1));
        }
        acc += a_term(&DigitProfile::new(n[0], n[s as usize + 1], k), p, s)?;
    }
    Ok(acc)
}

/// Coefficient of `x^N` in `\bar P_{s+2}(x)\bar P_s(x^p) - \bar P_{s+1}(x)\bar P_{s+1}(x^p)`,
/// exactly, with `\bar P_r = Σ C(M_r, k)² x^k`.
pub fn product_coefficient(p: u64, s: u32, big_n: u64) -> BigInt {
    let c2 = |m: u64, k: u64| sq(arith::binomial(m as i64, k as i64));
    let mut acc = BigInt::zero();
    for j in 0..=big_n / p {
        let i = big_n - p * j;
        acc += c2(half(p, s + 2), i) * c2(half(p, s), j);
        acc -= c2(half(p, s + 1), i) * c2(half(p, s + 1), j);
    }
    acc
}

/// `N_0 + N_1 p + …` from digits.
pub fn digits_value(p: u64, n: &[u64]) -> u64 {
    n.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// The displayed sum for `x^{N_0+N_1p+N_2p²+N_3p³}` in `\bar P_4\bar P_2(x^p) - \bar P_3\bar P_3(x^p)`
/// is `≡ 0 mod p³`; cross-checked against the full coefficient of that
/// product, which must also vanish mod `p³`.
pub fn coeff_identity_42_33(p: u64, n: [u64; 4]) -> Result<CongruenceReport, ConjectureError> {
    let modulus = Some(Modulus { p, s: 3 });
    let p3 = BigInt::from(p.pow(3));
    let check = |desc: &str, v: &BigInt| {
        let r = v.modulo(&p3);
        CongruenceReport::from_witness(
            desc,
            modulus,
            (!r.is_zero()).then(|| Witness { monomial: format!("N={n:?}"), residue: r.to_string() }),
        )
        .with_valuation(arith::valuation(v, p))
    };
    let display = display_sum(p, 2, &n)?;
    let full = product_coefficient(p, 2, digits_value(p, &n));
    Ok(CongruenceReport::all(
        format!("coefficient of x^N in the P-bar product difference, N = {n:?}"),
        modulus,
        &[check("displayed digit-split sum", &display), check("full product coefficient", &full)],
    ))
}

trait Modulo {
    fn modulo(&self, m: &BigInt) -> BigInt;
}

impl Modulo for BigInt {
    fn modulo(&self, m: &BigInt) -> BigInt {
        arith::mod_floor(self, m)
    }
}
