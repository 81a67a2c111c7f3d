//! End-to-end verification suites. Every criterion pins its bound and
//! tolerance here, in code; `threerank verify --suite <name>` and the
//! `acceptance` integration test both dispatch into this module.
//!
//! The expensive shared ingredient — the rank table over ±10⁶ — is built
//! once per process and reused across criteria.

use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;

use crate::arith::{self, CongruenceClass, FundamentalDiscriminant, Sign};
use crate::error::{Error, Result};
use crate::family::{FamilySpec, LinearPolynomial};
use crate::{bqf, rank3, search, stats, store};

/// Full-scale bounds and tolerances, one constant per criterion.
pub mod tolerances {
    /// Oracle equivalence holds for every fundamental D in (−10⁵, 0).
    pub const ORACLE_BOUND: i64 = 100_000;
    /// Reflection inequality holds for every squarefree 1 < d ≤ 10⁴.
    pub const SCHOLZ_BOUND: i64 = 10_000;
    /// Counting main term: relative error at X = 10⁶.
    pub const COUNT_X: f64 = 1e6;
    pub const COUNT_REL_TOL: f64 = 0.005;
    /// Mean of 3^{r₃}: relative error at X = 10⁶, and improvement over 10⁴.
    pub const MEAN_X: f64 = 1e6;
    pub const MEAN_X_SMALL: f64 = 1e4;
    pub const MEAN_REL_TOL: f64 = 0.15;
    /// Cohen–Lenstra rank-0 proportions at X = 10⁶, absolute tolerance.
    pub const CL_X: f64 = 1e6;
    pub const CL_ABS_TOL: f64 = 0.03;
    pub const CL_TARGET_MINUS: f64 = 0.5601;
    pub const CL_TARGET_PLUS: f64 = 0.8402;
    pub const CL_SUM_TOL: f64 = 1e-9;
    /// Witness scans at X = 10⁵ against the density bound 1/6 (n = 1).
    pub const WITNESS_X: f64 = 1e5;
    pub const WITNESS_REVERIFY: usize = 20;
    /// T(X)/X against Ω(3)/B at X = 10⁷, Euler product truncated at 10⁵.
    pub const OMEGA_X: f64 = 1e7;
    pub const OMEGA_PMAX: u64 = 100_000;
    pub const OMEGA_REL_TOL: f64 = 0.01;
    /// Polynomial-progression witness grid.
    pub const POLYPROG_A_MAX: i64 = 100;
    pub const POLYPROG_D_MAX: i64 = 10;
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        CriterionResult { name, passed, detail }
    }
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

/// The ±10⁶ rank table shared by the full-scale criteria.
pub fn shared_table() -> &'static store::RankTable {
    static TABLE: OnceLock<store::RankTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        rank3::rank_table(1_000_001, 1_000_001).expect("±10⁶ rank table builds")
    })
}

/// A small table sized for the `fast` smoke suite.
fn fast_table() -> &'static store::RankTable {
    static TABLE: OnceLock<store::RankTable> = OnceLock::new();
    TABLE.get_or_init(|| rank3::rank_table_range(-45_000, 45_000).expect("fast table builds"))
}

/// The family test corpus used by the Euler-product criterion.
pub fn family_corpus() -> Vec<FamilySpec> {
    let poly = |m, n| LinearPolynomial::new(m, n).unwrap();
    vec![
        FamilySpec::new(1, vec![poly(1, 3)], vec![]).unwrap(),
        FamilySpec::new(1, vec![], vec![poly(1, 1)]).unwrap(),
        FamilySpec::new(1, vec![poly(1, 3)], vec![poly(1, 1)]).unwrap(),
        search::corollary_family(1, 2).unwrap(),
        FamilySpec::new(1, vec![poly(16, 8)], vec![]).unwrap(),
        FamilySpec::new(1, vec![poly(9, 3)], vec![]).unwrap(),
    ]
}

fn theorem1_spec() -> FamilySpec {
    FamilySpec::new(
        1,
        vec![LinearPolynomial::new(1, 3).unwrap()],
        vec![LinearPolynomial::new(1, 1).unwrap()],
    )
    .unwrap()
}

/// Criterion 1: rank3 agrees with the quadratic-form oracle on every
/// fundamental D in (−bound, 0).
pub fn oracle_equivalence(bound: i64, table: &store::RankTable) -> Result<CriterionResult> {
    let discs: Vec<i64> = (1..bound).map(|t| -t).filter(|&d| arith::is_fundamental(d)).collect();
    let mismatches: Vec<i64> = discs
        .par_iter()
        .filter(|&&d| {
            let fd = FundamentalDiscriminant::new(d).expect("fundamental");
            let oracle = bqf::oracle_three_rank(fd).expect("oracle rank");
            table.lookup(d) != Some(oracle as u8)
        })
        .copied()
        .collect();
    Ok(CriterionResult::new(
        "oracle-equivalence",
        mismatches.is_empty(),
        format!(
            "{} discriminants in (-{bound}, 0), {} mismatches{}",
            discs.len(),
            mismatches.len(),
            if mismatches.is_empty() {
                String::new()
            } else {
                format!(" (first: {:?})", &mismatches[..mismatches.len().min(5)])
            }
        ),
    ))
}

/// Criterion 2: Scholz reflection r₃(d) ≤ r₃(−3d) ≤ r₃(d) + 1 for squarefree
/// 1 < d ≤ bound, with both sides read from the shared table.
pub fn scholz_reflection(bound: i64, table: &store::RankTable) -> Result<CriterionResult> {
    let mut checked = 0u64;
    let mut violations = Vec::new();
    for d in 2..=bound {
        if !arith::is_squarefree(d) {
            continue;
        }
        checked += 1;
        let plus = arith::fundamental_discriminant_of(d)?;
        let minus = arith::fundamental_discriminant_of(-3 * d)?;
        let rp = table.rank_of(plus.value())? as i32;
        let rm = table.rank_of(minus.value())? as i32;
        if !(rp <= rm && rm <= rp + 1) {
            violations.push((d, rp, rm));
        }
    }
    Ok(CriterionResult::new(
        "scholz-reflection",
        violations.is_empty(),
        format!(
            "{checked} squarefree d ≤ {bound}, {} violations{}",
            violations.len(),
            if violations.is_empty() {
                String::new()
            } else {
                format!(" (first: {:?})", &violations[..violations.len().min(3)])
            }
        ),
    ))
}

/// Criterion 3: the counting main term matches count_S within 0.5% at
/// X = 10⁶ for (m, N) ∈ {(0,1), (1,4), (1,3)} and both signs.
pub fn counting_asymptotic(x: f64) -> Result<CriterionResult> {
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for (m, n) in [(0i64, 1i64), (1, 4), (1, 3)] {
        for lambda in [Sign::Plus, Sign::Minus] {
            let cls = CongruenceClass::new(m, n)?;
            let report = stats::nh_count_report(x, cls, lambda, Some(tolerances::COUNT_REL_TOL))?;
            worst = worst.max(report.rel_err);
            lines.push(format!("({m},{n},{lambda}): {:.4}%", report.rel_err * 100.0));
        }
    }
    Ok(CriterionResult::new(
        "counting-asymptotic",
        worst <= tolerances::COUNT_REL_TOL,
        format!("max rel err {:.4}% [{}]", worst * 100.0, lines.join(", ")),
    ))
}

/// Criterion 4: the empirical mean of 3^{r₃} at X = 10⁶ is within 15% of
/// c(λ) for both signs, and closer than at X = 10⁴.
pub fn nh_mean(table: &store::RankTable) -> Result<CriterionResult> {
    let cls = CongruenceClass::new(0, 1)?;
    let mut pass = true;
    let mut lines = Vec::new();
    for lambda in [Sign::Minus, Sign::Plus] {
        let big = stats::nh_mean_empirical(
            tolerances::MEAN_X,
            cls,
            lambda,
            table,
            Some(tolerances::MEAN_REL_TOL),
        )?;
        let small =
            stats::nh_mean_empirical(tolerances::MEAN_X_SMALL, cls, lambda, table, None)?;
        let improved = big.rel_err < small.rel_err;
        pass &= big.pass && improved;
        lines.push(format!(
            "{lambda}: mean {:.4} vs {:.4} (rel {:.2}% at 1e6, {:.2}% at 1e4{})",
            big.statistic,
            big.prediction,
            big.rel_err * 100.0,
            small.rel_err * 100.0,
            if improved { "" } else { ", no improvement" }
        ));
    }
    Ok(CriterionResult::new("nh-mean", pass, lines.join("; ")))
}

/// Criterion 5: the exact partition inequality at every listed (n, sign,
/// class, X) combination.
pub fn partition_identity(xs: &[f64], table: &store::RankTable) -> Result<CriterionResult> {
    let mut checked = 0;
    let mut failures = Vec::new();
    for &x in xs {
        for n in 1..=3u32 {
            for lambda in [Sign::Plus, Sign::Minus] {
                for (m, nn) in [(0i64, 1i64), (1, 4)] {
                    let cls = CongruenceClass::new(m, nn)?;
                    checked += 1;
                    if !stats::partition_inequality_holds(x, cls, lambda, n, table)? {
                        failures.push(format!("(X={x}, n={n}, {lambda}, {m} mod {nn})"));
                    }
                }
            }
        }
    }
    Ok(CriterionResult::new(
        "partition-identity",
        failures.is_empty(),
        format!("{checked} exact inequality instances, {} failures {failures:?}", failures.len()),
    ))
}

/// Criterion 6: rank-0 proportions at X = 10⁶ within 0.03 of the heuristic
/// values, and the heuristic measure sums to 1 within 10⁻⁹.
pub fn cohen_lenstra(table: &store::RankTable) -> Result<CriterionResult> {
    let cls = CongruenceClass::new(0, 1)?;
    let mut pass = true;
    let mut lines = Vec::new();
    for (lambda, target) in [
        (Sign::Minus, tolerances::CL_TARGET_MINUS),
        (Sign::Plus, tolerances::CL_TARGET_PLUS),
    ] {
        let mut population = 0u64;
        let mut rank_zero = 0u64;
        arith::for_each_in_s(tolerances::CL_X, cls, lambda, |d| {
            population += 1;
            if table.lookup(d.value()) == Some(0) {
                rank_zero += 1;
            }
        });
        let proportion = rank_zero as f64 / population as f64;
        let ok = (proportion - target).abs() <= tolerances::CL_ABS_TOL;
        pass &= ok;
        lines.push(format!("{lambda}: P(r₃=0) = {proportion:.4} vs {target}"));

        let sum: f64 = (0..=40)
            .map(|r| stats::cohen_lenstra_prob(3, r, lambda).expect("p = 3 is an odd prime"))
            .sum();
        let ok = (sum - 1.0).abs() <= tolerances::CL_SUM_TOL;
        pass &= ok;
        lines.push(format!("{lambda}: Σ P(r) − 1 = {:+.2e}", sum - 1.0));
    }
    Ok(CriterionResult::new("cohen-lenstra", pass, lines.join("; ")))
}

/// Criterion 7: the two-polynomial family at X = 10⁵ meets the 1/6 density
/// bound and 20 sampled witnesses re-verify from scratch.
pub fn theorem1_witnesses(x: f64, table: &store::RankTable) -> Result<CriterionResult> {
    let spec = theorem1_spec();
    let report = search::theorem1_witnesses(&spec, x, table, usize::MAX)?;
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x7ea_0001);
    let sample: Vec<i64> = report
        .witnesses
        .choose_multiple(&mut rng, tolerances::WITNESS_REVERIFY)
        .copied()
        .collect();
    let mut reverified = 0;
    for &d in &sample {
        if search::verify_witness(&spec, d)? {
            reverified += 1;
        }
    }
    let pass = report.satisfied && reverified == sample.len();
    Ok(CriterionResult::new(
        "theorem1-witnesses",
        pass,
        format!(
            "{} of {} in T({x}) are witnesses (density {:.4} ≥ {:.4}: {}), {reverified}/{} re-verified",
            report.witnesses_total,
            report.scanned,
            report.density,
            report.bound,
            report.satisfied,
            sample.len()
        ),
    ))
}

/// Criterion 8: corollary part 2 (five consecutive shifts) at X = 10⁵ has a
/// nonempty witness set with density ≥ 1/6 of |T(X)|.
pub fn corollary_witnesses(x: f64, table: &store::RankTable) -> Result<CriterionResult> {
    let report = search::corollary_witnesses(1, 2, x, table, usize::MAX)?;
    let pass = report.witnesses_total > 0 && report.satisfied;
    Ok(CriterionResult::new(
        "corollary-witnesses",
        pass,
        format!(
            "{} of {} in T({x}) are witnesses (density {:.4} vs bound {:.4})",
            report.witnesses_total, report.scanned, report.density, report.bound
        ),
    ))
}

/// Criterion 9: T(X)/X matches Ω(3)/B within 1% at X = 10⁷ for {x + 3};
/// ω(2) = 0 and Ω(3) > 0 across the whole corpus.
pub fn omega3_density() -> Result<CriterionResult> {
    let spec = FamilySpec::new(1, vec![LinearPolynomial::new(1, 3).unwrap()], vec![])?;
    let fam = spec.normalize()?;
    let count = fam.count_t(tolerances::OMEGA_X);
    let measured = count as f64 / tolerances::OMEGA_X;
    let (product, tail) = stats::omega3_product(&fam, tolerances::OMEGA_PMAX);
    let predicted = product / fam.progression_modulus() as f64;
    let rel = (measured - predicted).abs() / predicted;
    let mut pass = rel <= tolerances::OMEGA_REL_TOL;
    let mut corpus_ok = true;
    for f in family_corpus() {
        let nf = f.normalize()?;
        corpus_ok &= stats::omega_p(2, &nf) == 0;
        let (value, _) = stats::omega3_product(&nf, 10_000);
        corpus_ok &= value > 0.0;
    }
    pass &= corpus_ok;
    Ok(CriterionResult::new(
        "omega3-density",
        pass,
        format!(
            "#T({:.0e})/X = {measured:.6} vs Ω(3)/B = {predicted:.6} (rel {:.3}%, tail {tail:.1e}); corpus ω(2)=0 and Ω(3)>0: {corpus_ok}",
            tolerances::OMEGA_X,
            rel * 100.0
        ),
    ))
}

/// Criterion 10: the {d, d²} polynomial progression has a witness in the
/// 100×10 grid and it re-verifies.
pub fn polyprog_witness() -> Result<CriterionResult> {
    let polys = vec![
        search::IntegerValuedPolynomial::new(vec![1])?,
        search::IntegerValuedPolynomial::new(vec![1, 2])?,
    ];
    let report = search::polyprog_witness(
        &polys,
        1,
        tolerances::POLYPROG_A_MAX,
        tolerances::POLYPROG_D_MAX,
    )?;
    match report.witness {
        Some((a, d)) => {
            let verified = search::verify_polyprog_witness(&polys, 1, a, d)?;
            Ok(CriterionResult::new(
                "polyprog-witness",
                verified,
                format!("witness (a, d) = ({a}, {d}), re-verified: {verified}"),
            ))
        }
        None => Ok(CriterionResult::new(
            "polyprog-witness",
            false,
            format!("no witness in the {}×{} grid", tolerances::POLYPROG_A_MAX, tolerances::POLYPROG_D_MAX),
        )),
    }
}

/// Criterion 11: the table build is thread-count independent byte for byte,
/// and the cache round-trips byte for byte.
pub fn determinism() -> Result<CriterionResult> {
    let build = |threads: usize| -> Result<String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
        let table = pool.install(|| rank3::rank_table_range(-20_000, 20_000))?;
        Ok(table.to_csv_string())
    };
    let csv1 = build(1)?;
    let csv8 = build(8)?;
    let threads_equal = csv1 == csv8;

    let dir = std::env::temp_dir().join(format!("threerank-determinism-{}", std::process::id()));
    let path = dir.join("ranks.csv");
    let table = rank3::rank_table_range(-2_000, 2_000)?;
    store::cache_store(&table, &path)?;
    let first = std::fs::read(&path)?;
    let reloaded = store::cache_load(&path)?;
    store::cache_store(&reloaded, &path)?;
    let second = std::fs::read(&path)?;
    let roundtrip_equal = first == second && reloaded == table;
    let _ = std::fs::remove_dir_all(&dir);

    Ok(CriterionResult::new(
        "determinism",
        threads_equal && roundtrip_equal,
        format!(
            "1-thread vs 8-thread CSV identical: {threads_equal} ({} bytes); cache round-trip identical: {roundtrip_equal}",
            csv1.len()
        ),
    ))
}

/// Names of the individually runnable suites.
pub const SUITES: &[&str] = &[
    "oracle-equivalence",
    "scholz-reflection",
    "counting-asymptotic",
    "nh-mean",
    "partition-identity",
    "cohen-lenstra",
    "theorem1-witnesses",
    "corollary-witnesses",
    "omega3-density",
    "polyprog-witness",
    "determinism",
    "all",
    "fast",
];

/// Run a named suite. `all` runs the eleven full criteria; `fast` is a
/// reduced-bound smoke subset with the same logic.
pub fn run_suite(name: &str) -> Result<Vec<CriterionResult>> {
    use tolerances as tol;
    let full_partition_xs = [1e4, 1e5, 1e6];
    match name {
        "oracle-equivalence" => Ok(vec![oracle_equivalence(tol::ORACLE_BOUND, shared_table())?]),
        "scholz-reflection" => Ok(vec![scholz_reflection(tol::SCHOLZ_BOUND, shared_table())?]),
        "counting-asymptotic" => Ok(vec![counting_asymptotic(tol::COUNT_X)?]),
        "nh-mean" => Ok(vec![nh_mean(shared_table())?]),
        "partition-identity" => Ok(vec![partition_identity(&full_partition_xs, shared_table())?]),
        "cohen-lenstra" => Ok(vec![cohen_lenstra(shared_table())?]),
        "theorem1-witnesses" => Ok(vec![theorem1_witnesses(tol::WITNESS_X, shared_table())?]),
        "corollary-witnesses" => Ok(vec![corollary_witnesses(tol::WITNESS_X, shared_table())?]),
        "omega3-density" => Ok(vec![omega3_density()?]),
        "polyprog-witness" => Ok(vec![polyprog_witness()?]),
        "determinism" => Ok(vec![determinism()?]),
        "all" => {
            let table = shared_table();
            Ok(vec![
                oracle_equivalence(tol::ORACLE_BOUND, table)?,
                scholz_reflection(tol::SCHOLZ_BOUND, table)?,
                counting_asymptotic(tol::COUNT_X)?,
                nh_mean(table)?,
                partition_identity(&full_partition_xs, table)?,
                cohen_lenstra(table)?,
                theorem1_witnesses(tol::WITNESS_X, table)?,
                corollary_witnesses(tol::WITNESS_X, table)?,
                omega3_density()?,
                polyprog_witness()?,
                determinism()?,
            ])
        }
        "fast" => {
            let table = fast_table();
            Ok(vec![
                oracle_equivalence(20_000, table)?,
                scholz_reflection(1_000, table)?,
                partition_identity(&[1e4], table)?,
                theorem1_witnesses(2e4, table)?,
                polyprog_witness()?,
                determinism()?,
            ])
        }
        other => Err(Error::InvalidRange(format!(
            "unknown suite {other:?}; available: {}",
            SUITES.join(", ")
        ))),
    }
}
