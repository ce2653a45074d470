//! Named verification suites: each expands a parameter set into an ordered
//! list of checks. Independent checks run on the ambient rayon pool; the
//! output order depends only on the parameters.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::conjecture::{self, ScanOptions};
use crate::ghost::{self, GhostError, PolyTuple};
use crate::hyperg::{self, ExponentTriple, FamilyTag};
use crate::kz::{self, KzScalar};
use crate::padic;
use crate::report::{CongruenceReport, Witness};
use crate::{Context, LaurentPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Ghost,
    DworkTuple,
    Mellit,
    Hyperg,
    Thirds,
    Fifths,
    UnitRoot,
    Kz,
    Conjecture,
    All,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Ghost,
        Suite::DworkTuple,
        Suite::Mellit,
        Suite::Hyperg,
        Suite::Thirds,
        Suite::Fifths,
        Suite::UnitRoot,
        Suite::Kz,
        Suite::Conjecture,
        Suite::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ghost => "ghost",
            Suite::DworkTuple => "dwork-tuple",
            Suite::Mellit => "mellit",
            Suite::Hyperg => "hyperg",
            Suite::Thirds => "thirds",
            Suite::Fifths => "fifths",
            Suite::UnitRoot => "unit-root",
            Suite::Kz => "kz",
            Suite::Conjecture => "conjecture",
            Suite::All => "all",
        }
    }

    /// The suites `self` runs, in order.
    pub fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::ALL[..9].to_vec(),
            s => vec![s],
        }
    }

    /// `(anchor, statement)` pairs covered by the suite. Anchors are the
    /// `paper_ref` values that appear in reports.
    pub fn inventory(self) -> Vec<(&'static str, &'static str)> {
        match self {
            Suite::Ghost => vec![
                (GHOST_DECOMP, "Λ_0(t)Λ_1(t^p)⋯ equals the sum of composed ghost terms over all index tuples, exactly"),
                (CT_FACTOR, "constant term of the product factors over the decompositions into indecomposables, exactly, for admissible tuples"),
                (I_LAMBDA, "I_λ is divisible by p^(l-1)"),
                (INDECOMPOSABLE, "indecomposable index tuples of length k have entry sum at least k-1, and factorization into indecomposables is unique"),
            ],
            Suite::DworkTuple => vec![(TUPLE_CONG, "CT(ã*b)(z)CT(ã'*c)(z^p) ≡ CT(ã'*b)(z^p)CT(ã*c)(z) mod p^l(a) on random admissible instances")],
            Suite::Mellit => vec![(MELLIT, "CT(Λ^{a*b})CT(Λ^{a'*c}) ≡ CT(Λ^{a'*b})CT(Λ^{a*c}) mod p^l(a) for digit tuples and Λ in t only")],
            Suite::Hyperg => vec![
                (HALF_CONG, "P_{s+1}(x)P_{s-1}(x^p) ≡ P_s(x)P_s(x^p) mod p^s"),
                (ODE, "the approximation polynomials solve the hypergeometric equation mod p^s"),
                (CK, "C_{s+1,kp}(x)C_{s-1,-k}(x^p) ≡ C_{s,kp}(x)C_{s,-k}(x^p) mod p^s for every admissible k"),
                (CT_REFINE, "the refined coefficient products sum to the constant term of the normalised master product"),
                (TYPE_II, "A(n+mp^s,x)A([n/p],x^p) ≡ A(n,x)A([n/p]+mp^(s-1),x^p) mod p^s"),
                (LUCAS, "the truncated half sum factors mod p as a product of Frobenius twists of its first level"),
                (MASTER_CONG, "master polynomial congruence Φ_{s+1}(t,x)Φ_{s-1}(t^p,x^p) ≡ Φ_s(t,x)Φ_s(t^p,x^p) mod p^s"),
            ],
            Suite::Thirds => vec![
                (THIRDS_CONG, "Q/R three-term congruences: straight pairs for p ≡ 1 mod 3, crossed pairs for p ≡ 2 mod 3, with the odd/even-s branch chosen by the residues"),
                (MASTER_CONG, "mixed Q/R master polynomial congruences"),
            ],
            Suite::Fifths => vec![(FIFTHS_CONG, "three-term congruences for the fifths families: crossed pairs for p ≡ ±2 mod 5, straight pairs for p ≡ ±1 mod 5")],
            Suite::UnitRoot => vec![
                (FROBENIUS, "u = ±f_s(ω(α)) satisfies u² - a_p u + p ≡ 0 mod p^s and is the unit root"),
                (CAUCHY, "|f_{s+1} - f_s|_p ≤ p^(-(s+1)) at Teichmüller points of the domain"),
                (LIMITS, "ratios of approximation polynomials and of Dwork truncations agree on the domain"),
            ],
            Suite::Kz => vec![
                (KZ_SYSTEM, "the approximation vector solves the KZ system and its linear constraint mod p^s"),
                (KZ_GRADIENT, "the gradient of T_s is expressed through the vector solution, exactly"),
                (KZ_LINE_T, "T_s restricted to the line (1,x,0) is the half approximation polynomial, exactly"),
                (KZ_DWORK, "T_{s+1}(z)T_{s-1}(z^p) ≡ T_s(z)T_s(z^p) and the same for U_s, mod p^s"),
                (KZ_U, "U_s = (z_1-z_3)^M P_s((z_2-z_3)/(z_1-z_3)), exactly; U_1 ≡ T_1 mod p"),
                (KZ_LINE_EQ, "∂_iT_s/T_s = ∂_iU_s/U_s on the line (1,x,0): exact for i = 1, 2, mod p^s for i = 3"),
                (KZ_ETA, "the η-vector satisfies the second-order KZ-type system at sample points, and η^(2)(1,0,0) ≡ 1/4"),
                (KZ_CAUCHY, "the ratios T̄_{s+1}(z)/T̄_s(z^p) are Cauchy at sample points"),
                (KZ_OMEGA, "∇U_s/U_s agrees with the vector built from P_s'/P_s in the u-coordinates"),
            ],
            Suite::Conjecture => vec![
                (SCAN, "p^(s+1) divides the symmetrised binomial difference B(a,b;k) over the full digit grid"),
                (COEFF, "the digit-split sum for the coefficient of x^N in P̄_4P̄_2(x^p) - P̄_3P̄_3(x^p) vanishes mod p³, and so does the coefficient"),
            ],
            Suite::All => Suite::ALL[..9].iter().flat_map(|s| s.inventory()).collect(),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

const GHOST_DECOMP: &str = "ghost decomposition of the Frobenius-twisted product";
const CT_FACTOR: &str = "constant-term factorization over indecomposables";
const I_LAMBDA: &str = "divisibility of I_lambda";
const INDECOMPOSABLE: &str = "weight bound for indecomposable index tuples";
const TUPLE_CONG: &str = "tuple constant-term congruence";
const MELLIT: &str = "digit-power constant-term congruence";
const HALF_CONG: &str = "three-term Dwork congruence for P_s";
const ODE: &str = "approximation polynomials solve the hypergeometric equation mod p^s";
const CK: &str = "refined master-coefficient congruence";
const CT_REFINE: &str = "refined coefficients sum to the constant term";
const TYPE_II: &str = "type II congruence for sums of squared binomials";
const LUCAS: &str = "Lucas factorization of the truncated half sum";
const MASTER_CONG: &str = "master polynomial congruence";
const THIRDS_CONG: &str = "three-term congruences for the thirds families";
const FIFTHS_CONG: &str = "three-term congruences for the fifths families";
const FROBENIUS: &str = "unit root of the Legendre curve";
const CAUCHY: &str = "Cauchy rate of approximation-polynomial ratios";
const LIMITS: &str = "approximation and Dwork truncation ratios share a limit";
const KZ_SYSTEM: &str = "polynomial solutions of the KZ system mod p^s";
const KZ_GRADIENT: &str = "gradient identity for T_s";
const KZ_LINE_T: &str = "restriction of T_s to a line";
const KZ_DWORK: &str = "three-term Dwork congruence for T_s and U_s";
const KZ_U: &str = "factorization of U_s through P_s";
const KZ_LINE_EQ: &str = "log-derivatives of T_s and U_s on a line";
const KZ_ETA: &str = "second-order system for the eta-vector";
const KZ_CAUCHY: &str = "Cauchy rate of T_s ratios";
const KZ_OMEGA: &str = "log-gradient of U_s in u-coordinates";
const SCAN: &str = "divisibility of symmetrised binomial differences";
const COEFF: &str = "digit-split coefficient identity mod p^3";

/// Parameters shared by every suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteParams {
    pub primes: Vec<u64>,
    pub s_max: u32,
    pub families: Vec<FamilyTag>,
    /// Cap on sample points, random instances and digit tuples per prime.
    pub samples: usize,
    pub seed: u64,
    /// Directory for conjecture-scan checkpoints.
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            primes: vec![3, 5, 7],
            s_max: 2,
            families: FamilyTag::ALL.to_vec(),
            samples: 20,
            seed: 0,
            cache_dir: None,
        }
    }
}

/// One entry of a suite's output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub id: String,
    pub paper_ref: &'static str,
    pub report: CongruenceReport,
}

type Job = Box<dyn Fn() -> Vec<Check> + Send + Sync>;

fn error_report(desc: &str, e: impl fmt::Display) -> CongruenceReport {
    CongruenceReport::fail(desc, None, Witness { monomial: "error".into(), residue: e.to_string() })
}

fn check<E: fmt::Display>(id: String, paper_ref: &'static str, r: Result<CongruenceReport, E>) -> Check {
    let report = r.unwrap_or_else(|e| error_report(paper_ref, e));
    Check { id, paper_ref, report }
}

fn run_jobs(jobs: Vec<Job>) -> Vec<Check> {
    jobs.par_iter().map(|j| j()).collect::<Vec<_>>().into_iter().flatten().collect()
}

/// Runs `suite` (every member for `all`) and returns its checks in order.
pub fn run(suite: Suite, params: &SuiteParams) -> Vec<Check> {
    suite.members().into_iter().flat_map(|s| run_one(s, params)).collect()
}

fn run_one(suite: Suite, params: &SuiteParams) -> Vec<Check> {
    let jobs = match suite {
        Suite::Ghost => ghost_jobs(params),
        Suite::DworkTuple => tuple_jobs(params),
        Suite::Mellit => mellit_jobs(params),
        Suite::Hyperg => hyperg_jobs(params),
        Suite::Thirds => thirds_jobs(params),
        Suite::Fifths => fifths_jobs(params),
        Suite::UnitRoot => unit_root_jobs(params),
        Suite::Kz => kz_jobs(params),
        Suite::Conjecture => conjecture_jobs(params),
        Suite::All => unreachable!("expanded by members()"),
    };
    run_jobs(jobs)
}

fn ps_pairs(params: &SuiteParams, keep: impl Fn(u64) -> bool) -> Vec<(u64, u32)> {
    params.primes.iter().filter(|&&p| keep(p)).flat_map(|&p| (1..=params.s_max).map(move |s| (p, s))).collect()
}

fn ghost_tuples() -> Vec<(&'static str, PolyTuple)> {
    let tri_ctx = Context::new(1, 0);
    let lp = |s: &str| LaurentPoly::parse(tri_ctx, s).expect("literal");
    let h = ghost::legendre_block();
    let tri = ghost::trinomial();
    let mixed = vec![tri.clone(), lp("t1^-1 + 2 + 3*t1"), lp("t1^-1 - 1 + t1")];
    let mut out = Vec::new();
    for l in 1..=3 {
        out.push(("legendre", PolyTuple::new(h.context(), vec![h.clone(); l]).expect("shared context")));
        out.push(("trinomial", PolyTuple::new(tri_ctx, vec![tri.clone(); l]).expect("shared context")));
    }
    out.push(("mixed", PolyTuple::new(tri_ctx, mixed).expect("shared context")));
    out
}

fn ghost_jobs(params: &SuiteParams) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    for &p in &params.primes {
        for (name, t) in ghost_tuples() {
            let l = t.len();
            let id = move |what: &str| format!("ghost/{what}/{name}-l{l}/p{p}");
            let t2 = t.clone();
            jobs.push(Box::new(move || {
                vec![
                    check(id("decomposition"), GHOST_DECOMP, ghost::verify_ghost_decomposition(&t2, p)),
                    check(id("ct-factorization"), CT_FACTOR, ghost::verify_ct_factorization(&t2, p)),
                    check(id("i-lambda"), I_LAMBDA, i_lambda_check(&t2, p)),
                ]
            }));
        }
    }
    jobs.push(Box::new(|| vec![Check { id: "ghost/indecomposable-bound/k<=6".into(), paper_ref: INDECOMPOSABLE, report: indecomposable_check(6) }]));
    jobs
}

fn i_lambda_check(t: &PolyTuple, p: u64) -> Result<CongruenceReport, GhostError> {
    let i = ghost::i_lambda(t, p)?;
    let k = t.len() as u32 - 1;
    let desc = format!("I_λ divisible by p^{k}, l = {}", t.len());
    let modulus = (k > 0).then_some(crate::Modulus { p, s: k });
    Ok(CongruenceReport::from_witness(
        desc,
        modulus,
        (!ghost::divisible_by_power(&i, p, k)).then(|| Witness { monomial: "I_λ".into(), residue: i.to_string() }),
    )
    .with_valuation(i.valuation(p)))
}

/// Every index tuple of length `k ≤ k_max` factors uniquely, and the
/// indecomposable ones have entry sum at least `k - 1`.
pub fn indecomposable_check(k_max: usize) -> CongruenceReport {
    for k in 1..=k_max {
        for m in ghost::enumerate_index_tuples(k, false) {
            let factors = match ghost::factor_index_tuple(&m) {
                Ok(f) => f,
                Err(e) => return error_report("index tuple factorization", e),
            };
            let joined: Vec<u32> = factors.concat();
            let indecomposable = factors.len() == 1;
            let bad = joined != m
                || factors.iter().any(|f| !ghost::is_indecomposable(f))
                || indecomposable != ghost::is_indecomposable(&m)
                || (indecomposable && (ghost::weight(&m) as usize) < k - 1);
            if bad {
                return CongruenceReport::fail(
                    "indecomposable weight bound",
                    None,
                    Witness { monomial: format!("{m:?}"), residue: format!("{factors:?}") },
                );
            }
        }
    }
    CongruenceReport::pass(format!("indecomposable index tuples of length k ≤ {k_max} have weight ≥ k-1"), None)
}

/// `count` random admissible instances of the tuple congruence at `p`,
/// drawn from a generator seeded by `(seed, p)`. Instances the polytope test
/// rejects are redrawn.
pub fn tuple_congruence_instances(p: u64, count: usize, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p.rotate_left(32));
    let max_a = if p <= 3 { 3 } else { 2 };
    let mut out = Vec::new();
    let mut drawn = 0usize;
    while out.len() < count {
        drawn += 1;
        let (a, b, c) = ghost::random_tuple_instance(&mut rng, max_a, 1);
        let idx = out.len();
        match ghost::verify_dwork_tuple_congruence(&a, &b, &c, p) {
            Err(GhostError::NotAdmissible { .. }) if drawn < 100 * count.max(1) => continue,
            r => out.push(check(format!("dwork-tuple/random/p{p}/{idx:03}"), TUPLE_CONG, r)),
        }
    }
    out
}

fn tuple_jobs(params: &SuiteParams) -> Vec<Job> {
    let (count, seed) = (params.samples, params.seed);
    params
        .primes
        .iter()
        .map(|&p| -> Job { Box::new(move || tuple_congruence_instances(p, count, seed)) })
        .collect()
}

fn digit_words(p: u64, len: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out.into_iter().flat_map(|w| (1..p).map(move |d| [w.clone(), vec![d]].concat())).collect();
    }
    out
}

/// The digit-power congruence for every `a` of length `la` and every `b`, `c`
/// of length at most one, for the trinomial family.
pub fn mellit_family(p: u64, la: usize) -> Vec<Check> {
    let short: Vec<Vec<u64>> = std::iter::once(Vec::new()).chain(digit_words(p, 1)).collect();
    let lambdas = [
        ("trinomial", ghost::trinomial()),
        ("skew-trinomial", LaurentPoly::parse(Context::new(1, 0), "t1^-1 + 3 + 2*t1").expect("literal")),
    ];
    let mut out = Vec::new();
    for (name, lam) in lambdas {
        let mut parts = Vec::new();
        for a in digit_words(p, la) {
            for b in &short {
                for c in &short {
                    parts.push(ghost::verify_mellit(&lam, &a, b, c, p).unwrap_or_else(|e| error_report(MELLIT, e)));
                }
            }
        }
        let report = CongruenceReport::all(
            format!("digit-power congruence for {name}, all {} digit triples with l(a) = {la}", parts.len()),
            Some(crate::Modulus { p, s: la as u32 }),
            &parts,
        );
        out.push(Check { id: format!("mellit/{name}/p{p}/la{la}"), paper_ref: MELLIT, report });
    }
    out
}

fn mellit_jobs(params: &SuiteParams) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    for &p in &params.primes {
        let max_la = if p == 3 { 2 } else { 1 };
        for la in 1..=max_la {
            jobs.push(Box::new(move || mellit_family(p, la)));
        }
    }
    jobs
}

fn ode_families(params: &SuiteParams, p: u64) -> Vec<FamilyTag> {
    params.families.iter().copied().filter(|f| f.triple().is_some() && f.compatible(p)).collect()
}

/// Master-polynomial congruences are checked only while `p^{s+1}` is small
/// enough to expand the bivariate products.
const MASTER_CAP: u64 = 125;

/// The exact constant-term comparison expands `((t-1)(1-x/t))^M` with
/// `M = (p^{s+1}-1)/2`; beyond this `p^{s+1}` it dominates the suite.
const REFINE_CAP: u64 = 625;

fn hyperg_jobs(params: &SuiteParams) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    for (p, s) in ps_pairs(params, |_| true) {
        let fams = ode_families(params, p);
        jobs.push(Box::new(move || {
            let id = |what: &str| format!("hyperg/{what}/p{p}/s{s}");
            let mut out = vec![check(id("half-three-term"), HALF_CONG, hyperg::family_congruence(FamilyTag::Half, FamilyTag::Half, p, s))];
            for &f in &fams {
                let e = f.triple().expect("filtered");
                let r = hyperg::approx_polynomial(&e, p, s).and_then(|poly| hyperg::hyp_ode_residual(&e, &poly, p, s));
                out.push(check(id(&format!("ode-{f}")), ODE, r));
            }
            out.push(check(id("refined-coefficients"), CK, ck_all(p, s)));
            if p.pow(s + 1) <= REFINE_CAP {
                out.push(check(id("refined-coefficients-sum"), CT_REFINE, hyperg::ct_refinement_check(p, s)));
            }
            for (n, m) in [(1, 1), (p + 1, 1), (p * p - 1, 2)] {
                out.push(check(id(&format!("type-ii-n{n}-m{m}")), TYPE_II, hyperg::type_ii_check(n, m, p, s)));
            }
            out.push(check(id("lucas"), LUCAS, hyperg::lucas_factorization(p, s)));
            if p.pow(s + 1) <= MASTER_CAP {
                let h = ExponentTriple::HALF;
                out.push(check(id("master-half"), MASTER_CONG, hyperg::baby_congruence(&h, &h, p, s)));
            }
            out
        }));
    }
    jobs
}

/// The refined coefficient congruence for every admissible `k` at once.
pub fn ck_all(p: u64, s: u32) -> Result<CongruenceReport, hyperg::HypergError> {
    let parts: Vec<CongruenceReport> =
        hyperg::ck_range(p, s)?.map(|k| hyperg::verify_ck(p, s, k)).collect::<Result<_, _>>()?;
    Ok(CongruenceReport::all(
        format!("refined coefficient congruence for all {} admissible k", parts.len()),
        Some(crate::Modulus { p, s }),
        &parts,
    ))
}

fn thirds_jobs(params: &SuiteParams) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    for (p, s) in ps_pairs(params, |p| FamilyTag::ThirdQ.compatible(p)) {
        jobs.push(Box::new(move || {
            let id = |what: &str, i: usize| format!("thirds/{what}-{i}/p{p}/s{s}");
            // thirds_suite covers 1..=s; keep only the entries for this s.
            let mut out = Vec::new();
            match hyperg::thirds_suite(p, s).and_then(|all| Ok((all, hyperg::thirds_suite(p, s - 1)?.len()))) {
                Ok((all, skip)) => {
                    for (i, r) in all.into_iter().skip(skip).enumerate() {
                        out.push(Check { id: id("congruence", i), paper_ref: THIRDS_CONG, report: r });
                    }
                }
                Err(e) => out.push(check::<hyperg::HypergError>(id("congruence", 0), THIRDS_CONG, Err(e))),
            }
            if p.pow(s + 1) <= MASTER_CAP {
                let [(f, g), _] = hyperg::third_pairs(p);
                let (e, e2) = (f.triple().expect("thirds"), g.triple().expect("thirds"));
                out.push(check(id("master", 0), MASTER_CONG, hyperg::baby_congruence(&e, &e2, p, s)));
            }
            out
        }));
    }
    jobs
}

fn fifths_jobs(params: &SuiteParams) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    for (p, s) in ps_pairs(params, |p| FamilyTag::Fifth41.compatible(p)) {
        jobs.push(Box::new(move || {
            let skip = if s > 1 { hyperg::fifths_suite(p, s - 1).map_or(0, |v| v.len()) } else { 0 };
            match hyperg::fifths_suite(p, s) {
                Ok(all) => all
                    .into_iter()
                    .skip(skip)
                    .enumerate()
                    .map(|(i, r)| Check { id: format!("fifths/congruence-{i}/p{p}/s{s}"), paper_ref: FIFTHS_CONG, report: r })
                    .collect(),
                Err(e) => vec![check::<hyperg::HypergError>(format!("fifths/congruence-0/p{p}/s{s}"), FIFTHS_CONG, Err(e))],
            }
        }));
    }
    jobs
}

fn unit_root_jobs(params: &SuiteParams) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    let s_max = params.s_max;
    for &p in &params.primes {
        let alphas: Vec<i64> = padic::admissible_alphas(p).into_iter().take(params.samples).collect();
        let families: Vec<FamilyTag> =
            params.families.iter().copied().filter(|f| f.triple().is_some() && f.compatible(p)).collect();
        for &alpha in &alphas {
            jobs.push(Box::new(move || {
                (1..=s_max)
                    .map(|s| check(format!("unit-root/frobenius/p{p}/alpha{alpha}/s{s}"), FROBENIUS, padic::frobenius_quadratic_check(alpha, p, s)))
                    .collect()
            }));
        }
        for f in families {
            let cap = params.samples;
            jobs.push(Box::new(move || vec![cauchy_check(p, f, s_max, cap)]));
        }
        let samples: Vec<i64> = alphas.clone();
        jobs.push(Box::new(move || {
            (1..=s_max)
                .map(|s| {
                    let pts: Result<Vec<_>, _> = samples.iter().map(|&a| padic::teichmuller(a, p, s + 1)).collect();
                    check(format!("unit-root/limits-agree/p{p}/s{s}"), LIMITS, pts.and_then(|pts| padic::limits_agree_check(p, s, &pts)))
                })
                .collect()
        }));
    }
    jobs
}

/// The Cauchy bound `v(f_{s+1} - f_s) ≥ s + 1` at every Teichmüller point of
/// the family's domain, at most `cap` of them.
pub fn cauchy_check(p: u64, family: FamilyTag, s_max: u32, cap: usize) -> Check {
    let id = format!("unit-root/cauchy-{family}/p{p}");
    let mut traces = Vec::new();
    for a in 0..p as i64 {
        if traces.len() >= cap {
            break;
        }
        let x = if a == 0 { padic::PadicInt::new(0, p, s_max + 1) } else { padic::teichmuller(a, p, s_max + 1) };
        let x = match x {
            Ok(x) => x,
            Err(e) => return check::<padic::PadicError>(id, CAUCHY, Err(e)),
        };
        match padic::unit_root(&x, family, s_max) {
            Ok(t) => traces.push(t),
            Err(padic::PadicError::OutsideDomain(_)) => continue,
            Err(e) => return check::<padic::PadicError>(id, CAUCHY, Err(e)),
        }
    }
    let bad = traces.iter().find(|t| !t.bound_holds);
    let observed = traces.iter().flat_map(|t| t.delta_valuations.iter().flatten().copied()).min();
    let report = CongruenceReport::from_witness(
        format!("Cauchy rate of {} ratios at {} domain points", family.symbol(), traces.len()),
        Some(crate::Modulus { p, s: s_max }),
        bad.map(|t| Witness { monomial: format!("x={}", t.x.residue()), residue: format!("{:?}", t.delta_valuations) }),
    )
    .with_valuation(observed);
    Check { id, paper_ref: CAUCHY, report }
}

fn kz_jobs(params: &SuiteParams) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    let cap = params.samples;
    for (p, s) in ps_pairs(params, |_| true) {
        jobs.push(Box::new(move || kz_checks(p, s, cap)));
    }
    for &p in &params.primes {
        let s_max = params.s_max;
        jobs.push(Box::new(move || {
            let r = kz::sample_points(p, s_max + 1, cap).and_then(|pts| kz::t_ratio_cauchy_check(p, s_max, &pts));
            vec![check(format!("kz/t-ratio-cauchy/p{p}"), KZ_CAUCHY, r)]
        }));
    }
    jobs
}

/// Every KZ-layer check at one `(p, s)`.
pub fn kz_checks(p: u64, s: u32, cap: usize) -> Vec<Check> {
    let id = |what: &str| format!("kz/{what}/p{p}/s{s}");
    let a = match kz::kz_build(p, s) {
        Ok(a) => a,
        Err(e) => return vec![check::<kz::KzError>(id("build"), KZ_SYSTEM, Err(e))],
    };
    let mut out = Vec::new();
    match kz::kz_residual(&a) {
        Ok(rs) => {
            for (i, r) in rs.into_iter().enumerate() {
                out.push(Check { id: id(&format!("system-{i}")), paper_ref: KZ_SYSTEM, report: r });
            }
        }
        Err(e) => out.push(check::<kz::KzError>(id("system"), KZ_SYSTEM, Err(e))),
    }
    out.push(check(id("gradient"), KZ_GRADIENT, kz::gradient_identity(&a)));
    out.push(check(id("t-on-line"), KZ_LINE_T, kz::t_line_identity(&a)));
    out.push(check(id("t-symmetry"), KZ_LINE_T, kz::t_symmetry(&a)));
    out.push(check(id("dwork-t"), KZ_DWORK, kz::kz_dwork_congruence(p, s, KzScalar::T)));
    out.push(check(id("dwork-u"), KZ_DWORK, kz::kz_dwork_congruence(p, s, KzScalar::U)));
    if s == 1 {
        out.push(check(id("u-t-mod-p"), KZ_U, kz::u_t_lucas_check(p)));
    }
    out.push(check(id("u-factorization"), KZ_U, kz::u_factorization_check(p, s)));
    for i in 0..3 {
        // In z_3 the identity holds only mod p^s.
        out.push(check(id(&format!("line-equality-z{}", i + 1)), KZ_LINE_EQ, kz::line_equality_component(&a, i, i == 2)));
    }
    out.push(check(id("eta-base-point"), KZ_ETA, kz::eta_base_point_check(&a)));
    let r = kz::sample_points(p, s, cap).and_then(|pts| kz::eta_kz_system_check(&a, &pts));
    out.push(check(id("eta-system"), KZ_ETA, r));
    let r = kz::omega_samples(p, s, cap).and_then(|us| {
        let parts: Vec<CongruenceReport> = us.iter().map(|u| kz::omega_vector_compare(u, p, s)).collect::<Result<_, _>>()?;
        Ok(CongruenceReport::all(
            format!("log-gradient of U_s at {} u-points", parts.len()),
            Some(crate::Modulus { p, s }),
            &parts,
        ))
    });
    out.push(check(id("omega-vector"), KZ_OMEGA, r));
    out
}

fn conjecture_jobs(params: &SuiteParams) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    for (p, s) in ps_pairs(params, |_| true) {
        let dir = params.cache_dir.clone();
        jobs.push(Box::new(move || vec![scan_check(p, s, dir.as_deref())]));
    }
    for &p in &params.primes {
        let (cap, seed) = (params.samples, params.seed);
        jobs.push(Box::new(move || coefficient_checks(p, cap, seed)));
    }
    jobs
}

/// Full-grid scan at `(p, s)`, checkpointed under `cache_dir` when given.
pub fn scan_check(p: u64, s: u32, cache_dir: Option<&std::path::Path>) -> Check {
    let opts = ScanOptions {
        checkpoint: cache_dir.map(|d| d.join(format!("scan-p{p}-s{s}.ndjson"))),
        ..ScanOptions::default()
    };
    let r = conjecture::conjecture_scan(p, s, &opts).map(|sum| sum.report());
    check(format!("conjecture/scan/p{p}/s{s}"), SCAN, r)
}

/// The digit-split coefficient identity for up to `cap` digit tuples `N`:
/// all of them when the grid is small enough, otherwise a seeded sample.
pub fn coefficient_checks(p: u64, cap: usize, seed: u64) -> Vec<Check> {
    let digits = |i: u64| [i / p.pow(3), i / (p * p) % p, i / p % p, i % p];
    let size = p.pow(4);
    let grid: Vec<[u64; 4]> = if size as usize <= cap {
        (0..size).map(digits).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
        let mut picked = std::collections::BTreeSet::new();
        while picked.len() < cap {
            picked.insert(rng.gen_range(0..size));
        }
        picked.into_iter().map(digits).collect()
    };
    grid.par_iter()
        .map(|&n| {
            let id = format!("conjecture/coefficient/p{p}/N{}{}{}{}", n[0], n[1], n[2], n[3]);
            check(id, COEFF, conjecture::coeff_identity_42_33(p, n))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            assert!(!s.inventory().is_empty());
        }
        assert!("bogus".parse::<Suite>().is_err());
        assert_eq!(Suite::All.members().len(), 9);
    }

    #[test]
    fn small_suites_pass() {
        let params = SuiteParams { primes: vec![3], s_max: 1, samples: 4, ..SuiteParams::default() };
        for suite in [Suite::Ghost, Suite::DworkTuple, Suite::Mellit, Suite::Hyperg, Suite::Kz, Suite::Conjecture] {
            let checks = run(suite, &params);
            assert!(!checks.is_empty(), "{suite}");
            for c in &checks {
                assert!(c.report.pass, "{}: {:?}", c.id, c.report);
            }
        }
    }

    #[test]
    fn random_instances_are_deterministic() {
        assert_eq!(tuple_congruence_instances(3, 5, 7), tuple_congruence_instances(3, 5, 7));
    }
}
