//! Analytic predictions next to their empirical measurements: Cohen–Lenstra
//! probabilities, mean values and counts over good progressions, the exact
//! density lower bound (3ⁿ − c(λ))/(3ⁿ − 1), and the squarefree Euler
//! product Ω(3) = ∏(1 − ω(p)/p²) with its local solution counts ω(p).
//!
//! Comparisons are reported, never asserted; callers (and the acceptance
//! suites) decide what tolerance a report has to meet.

use num_rational::Ratio;
use serde::Serialize;

use crate::arith::{self, mod_inverse, primes_below, CongruenceClass, Sign};
use crate::error::{Error, Result};
use crate::family::NormalizedFamily;
use crate::store::RankTable;

pub type Rational = Ratio<i64>;

/// Truncation index for the Cohen–Lenstra products; at p = 3 the dropped
/// tail is below 10⁻³⁰.
pub const CL_PRODUCT_TRUNCATION: u32 = 64;

/// An empirical statistic against its analytic prediction. `pass` reflects
/// the tolerance the caller supplied (true when none was).
#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    #[serde(rename = "X")]
    pub x: f64,
    pub population: u64,
    pub statistic: f64,
    pub prediction: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub good_pair: Option<bool>,
}

impl DensityReport {
    pub fn new(x: f64, population: u64, statistic: f64, prediction: f64, tol: Option<f64>) -> Self {
        let abs_err = (statistic - prediction).abs();
        let rel_err = if prediction != 0.0 {
            abs_err / prediction.abs()
        } else {
            f64::INFINITY
        };
        DensityReport {
            x,
            population,
            statistic,
            prediction,
            abs_err,
            rel_err,
            pass: tol.is_none_or(|t| rel_err <= t),
            good_pair: None,
        }
    }

    pub fn with_good_pair_flag(mut self, good: bool) -> Self {
        self.good_pair = Some(good);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn require_odd_prime(p: u64) -> Result<()> {
    let prime = p > 2 && (3..).step_by(2).take_while(|q| q * q <= p).all(|q| p % q != 0);
    if p % 2 == 0 || !prime {
        return Err(Error::InvalidRange(format!("p = {p} is not an odd prime")));
    }
    Ok(())
}

/// Heuristic probability that r_p(D) = r, for fundamental D of the given
/// sign class.
pub fn cohen_lenstra_prob(p: u64, r: u32, lambda: Sign) -> Result<f64> {
    require_odd_prime(p)?;
    let pf = p as f64;
    let tail_from = match lambda {
        Sign::Plus => r + 2,
        Sign::Minus => r + 1,
    };
    let mut value = match lambda {
        Sign::Plus => pf.powi(-((r as i32) * (r as i32) + r as i32)),
        Sign::Minus => pf.powi(-((r as i32) * (r as i32))),
    };
    for j in tail_from..=CL_PRODUCT_TRUNCATION {
        value *= 1.0 - pf.powi(-(j as i32));
    }
    for j in 1..=r {
        value /= 1.0 - pf.powi(-(j as i32));
    }
    Ok(value)
}

/// The mean-value constant: 4/3 for λ = +1, 2 for λ = −1, exactly.
pub fn c_lambda(lambda: Sign) -> Rational {
    match lambda {
        Sign::Plus => Rational::new(4, 3),
        Sign::Minus => Rational::new(2, 1),
    }
}

fn factorize(mut n: i64) -> Vec<(i64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Predicted main term for #S_λ(X, m, N) over a good progression:
/// 3X/(π²·φ(N)) · ∏_{p|N} q/(1+p) with q = 4 at p = 2 and q = p otherwise.
pub fn nh_count_prediction(x: f64, cls: CongruenceClass) -> f64 {
    let n = cls.modulus();
    let mut phi = 1i64;
    let mut product = 1.0f64;
    for (p, e) in factorize(n) {
        phi *= (p - 1) * p.pow(e - 1);
        let q = if p == 2 { 4.0 } else { p as f64 };
        product *= q / (1.0 + p as f64);
    }
    3.0 * x / (std::f64::consts::PI.powi(2) * phi as f64) * product
}

/// Empirical count of S_λ(X, cls) against the predicted main term.
pub fn nh_count_report(x: f64, cls: CongruenceClass, lambda: Sign, tol: Option<f64>) -> Result<DensityReport> {
    let count = arith::count_s(x, cls, lambda);
    let prediction = nh_count_prediction(x, cls);
    let good = crate::family::is_good_pair(
        if cls.residue() == 0 { cls.modulus() } else { cls.residue() },
        cls.modulus(),
    )
    .unwrap_or(false);
    Ok(DensityReport::new(x, count, count as f64, prediction, tol).with_good_pair_flag(good))
}

/// Empirical mean of 3^{r₃(D)} over S_λ(X, cls) against c(λ).
pub fn nh_mean_empirical(
    x: f64,
    cls: CongruenceClass,
    lambda: Sign,
    ranks: &RankTable,
    tol: Option<f64>,
) -> Result<DensityReport> {
    let (population, sum) = sum_three_pow_rank(x, cls, lambda, ranks)?;
    if population == 0 {
        return Err(Error::EmptyPopulation);
    }
    let statistic = sum as f64 / population as f64;
    let prediction = ratio_to_f64(c_lambda(lambda));
    Ok(DensityReport::new(x, population, statistic, prediction, tol))
}

fn ratio_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn sum_three_pow_rank(
    x: f64,
    cls: CongruenceClass,
    lambda: Sign,
    ranks: &RankTable,
) -> Result<(u64, u64)> {
    let mut population = 0u64;
    let mut sum = 0u64;
    let mut missing = None;
    arith::for_each_in_s(x, cls, lambda, |d| {
        if missing.is_some() {
            return;
        }
        match ranks.lookup(d.value()) {
            Some(r) => {
                population += 1;
                sum += 3u64.pow(r as u32);
            }
            None => missing = Some(d.value()),
        }
    });
    if let Some(d) = missing {
        return Err(Error::CoverageGap(d));
    }
    Ok((population, sum))
}

/// The exact lower bound (3ⁿ − c(λ))/(3ⁿ − 1) on the density of r₃ < n.
pub fn rank_lt_density_bound(n: u32, lambda: Sign) -> Rational {
    let pow = Rational::from_integer(3i64.pow(n));
    (pow - c_lambda(lambda)) / (pow - Rational::from_integer(1))
}

/// Empirical density of r₃(D) < n over S_λ(X, cls) against the exact bound.
/// `pass` records `statistic ≥ bound`, compared in exact rational arithmetic.
pub fn rank_lt_density_empirical(
    x: f64,
    cls: CongruenceClass,
    lambda: Sign,
    n: u32,
    ranks: &RankTable,
) -> Result<DensityReport> {
    let (population, below) = count_below_rank(x, cls, lambda, n, ranks)?;
    if population == 0 {
        return Err(Error::EmptyPopulation);
    }
    let bound = rank_lt_density_bound(n, lambda);
    let statistic = Rational::new(below as i64, population as i64);
    let mut report = DensityReport::new(
        x,
        population,
        ratio_to_f64(statistic),
        ratio_to_f64(bound),
        None,
    );
    report.pass = statistic >= bound;
    Ok(report)
}

fn count_below_rank(
    x: f64,
    cls: CongruenceClass,
    lambda: Sign,
    n: u32,
    ranks: &RankTable,
) -> Result<(u64, u64)> {
    let mut population = 0u64;
    let mut below = 0u64;
    let mut missing = None;
    arith::for_each_in_s(x, cls, lambda, |d| {
        if missing.is_some() {
            return;
        }
        match ranks.lookup(d.value()) {
            Some(r) => {
                population += 1;
                if (r as u32) < n {
                    below += 1;
                }
            }
            None => missing = Some(d.value()),
        }
    });
    if let Some(d) = missing {
        return Err(Error::CoverageGap(d));
    }
    Ok((population, below))
}

/// The partition inequality behind the density bound, in exact integers:
/// (3ⁿ − 1)·#{D ∈ S : r₃ < n}  ≥  3ⁿ·#S − Σ_{D ∈ S} 3^{r₃(D)}.
/// It holds at every finite X, not just asymptotically.
pub fn partition_inequality_holds(
    x: f64,
    cls: CongruenceClass,
    lambda: Sign,
    n: u32,
    ranks: &RankTable,
) -> Result<bool> {
    let (population, sum) = sum_three_pow_rank(x, cls, lambda, ranks)?;
    let (_, below) = count_below_rank(x, cls, lambda, n, ranks)?;
    let pow = 3u128.pow(n);
    Ok((pow - 1) * below as u128 + sum as u128 >= pow * population as u128)
}

/// Linear progressions `step·x + offset` attached to a family for the local
/// solution counts: the progression B·x + 1 itself plus every reduced
/// polynomial composed with it.
fn local_progressions(fam: &NormalizedFamily) -> Vec<(i64, i64)> {
    let b = fam.progression_modulus();
    let mut polys = vec![(b, 1i64)];
    for p in fam.polys() {
        let step = p.poly().slope() * (b >> p.u());
        let offset = (p.poly().slope() + p.poly().intercept()) >> p.u();
        polys.push((step, offset));
    }
    polys
}

/// Solution set of step·x + offset ≡ 0 (mod p²) as an arithmetic progression
/// `x ≡ residue (mod modulus)` with modulus | p², or `None` when empty.
fn linear_solutions_mod_p2(step: i64, offset: i64, p: u64) -> Option<(i64, i64)> {
    let p = p as i64;
    let p2 = p * p;
    let s = step.rem_euclid(p2);
    let o = offset.rem_euclid(p2);
    if s == 0 {
        return (o == 0).then_some((1, 0));
    }
    if s % p != 0 {
        let inv = mod_inverse(s, p2).expect("coprime to p²");
        let r = ((-o).rem_euclid(p2) as i128 * inv as i128).rem_euclid(p2 as i128) as i64;
        return Some((p2, r));
    }
    // p ‖ step within p²: solvable iff p | offset, solutions run mod p
    if o % p != 0 {
        return None;
    }
    let inv = mod_inverse(s / p, p)?;
    let r = ((-(o / p)).rem_euclid(p) as i128 * inv as i128).rem_euclid(p as i128) as i64;
    Some((p, r))
}

/// |A₁ ∪ … ∪ A_k| within [0, p²) for arithmetic progressions A_i, by
/// inclusion-exclusion with CRT intersections (all moduli divide p²).
fn union_size_mod_p2(sets: &[(i64, i64)], p2: i64) -> u64 {
    let k = sets.len();
    debug_assert!(k <= 20);
    let mut total: i128 = 0;
    for mask in 1u32..(1 << k) {
        // intersect the selected progressions
        let mut cur: Option<(i64, i64)> = None;
        for (i, &(m, r)) in sets.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            cur = match cur {
                None => Some((m, r)),
                Some((m0, r0)) => {
                    // both moduli are powers of p dividing p²
                    let (big, rb, small, rs) = if m0 >= m { (m0, r0, m, r) } else { (m, r, m0, r0) };
                    if rb.rem_euclid(small) != rs.rem_euclid(small) {
                        None
                    } else {
                        Some((big, rb))
                    }
                }
            };
            if cur.is_none() {
                break;
            }
        }
        if let Some((m, _)) = cur {
            let size = (p2 / m) as i128;
            if mask.count_ones() % 2 == 1 {
                total += size;
            } else {
                total -= size;
            }
        }
    }
    debug_assert!(total >= 0);
    total as u64
}

/// ω(p): the number of residues x mod p² at which at least one of the
/// family's progressions vanishes mod p². Union convention across the
/// progressions; the per-prime maximum is r + s + 1.
pub fn omega_p(p: u64, fam: &NormalizedFamily) -> u64 {
    omega_p_for(p, &local_progressions(fam))
}

pub(crate) fn omega_p_for(p: u64, progressions: &[(i64, i64)]) -> u64 {
    let sets: Vec<(i64, i64)> = progressions
        .iter()
        .filter_map(|&(s, o)| linear_solutions_mod_p2(s, o, p))
        .collect();
    if sets.is_empty() {
        return 0;
    }
    union_size_mod_p2(&sets, (p * p) as i64)
}

/// Truncated Euler product ∏_{p ≤ p_max}(1 − ω(p)/p²) with a rigorous bound
/// on the relative size of the dropped tail, using ω(p) ≤ r + s + 1.
pub fn omega3_product(fam: &NormalizedFamily, p_max: u64) -> (f64, f64) {
    omega3_product_for(&local_progressions(fam), p_max)
}

pub(crate) fn omega3_product_for(progressions: &[(i64, i64)], p_max: u64) -> (f64, f64) {
    let mut value = 1.0f64;
    for p in primes_below(p_max + 1) {
        let w = omega_p_for(p, progressions);
        value *= 1.0 - w as f64 / (p as f64 * p as f64);
    }
    let k = progressions.len() as f64;
    let pf = p_max as f64;
    // −ln ∏_{p>P} (1 − k/p²) ≤ Σ_{n>P} (k/n²)/(1 − k/P²) ≤ (k/P)/(1 − k/P²)
    let tail = if pf * pf > k {
        let s = (k / pf) / (1.0 - k / (pf * pf));
        1.0 - (-s).exp()
    } else {
        1.0
    };
    (value, tail)
}

/// Per-prime ω values up to a cap, for reporting.
pub fn omega_p_table(fam: &NormalizedFamily, p_max: u64) -> Vec<(u64, u64)> {
    primes_below(p_max + 1)
        .into_iter()
        .map(|p| (p, omega_p(p, fam)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{FamilySpec, LinearPolynomial};

    fn fam(m: i64, n: i64) -> NormalizedFamily {
        FamilySpec::new(1, vec![LinearPolynomial::new(m, n).unwrap()], vec![])
            .unwrap()
            .normalize()
            .unwrap()
    }

    #[test]
    fn cl_prob_frozen_values() {
        assert!((cohen_lenstra_prob(3, 0, Sign::Minus).unwrap() - 0.560126).abs() < 1e-6);
        assert!((cohen_lenstra_prob(3, 0, Sign::Plus).unwrap() - 0.840189).abs() < 1e-6);
        assert!((cohen_lenstra_prob(3, 1, Sign::Minus).unwrap() - 0.420094).abs() < 1e-6);
        assert!(cohen_lenstra_prob(2, 0, Sign::Plus).is_err());
        assert!(cohen_lenstra_prob(9, 0, Sign::Plus).is_err());
    }

    #[test]
    fn cl_probs_normalize_and_decrease() {
        for lambda in [Sign::Plus, Sign::Minus] {
            let probs: Vec<f64> =
                (0..=40).map(|r| cohen_lenstra_prob(3, r, lambda).unwrap()).collect();
            let total: f64 = probs.iter().sum();
            assert!((total - 1.0).abs() < 1e-9, "sum = {total} for {lambda}");
            // strictly decreasing until f64 underflow takes over
            for w in probs.windows(2).take_while(|w| w[0] > 1e-300) {
                assert!(w[1] < w[0]);
            }
        }
    }

    #[test]
    fn c_lambda_exact() {
        assert_eq!(c_lambda(Sign::Plus), Rational::new(4, 3));
        assert_eq!(c_lambda(Sign::Minus), Rational::new(2, 1));
        assert_eq!(c_lambda(Sign::Plus) * Rational::from_integer(3), Rational::from_integer(4));
    }

    #[test]
    fn count_predictions() {
        let pi2 = std::f64::consts::PI.powi(2);
        let x = 1e6;
        let p = nh_count_prediction(x, CongruenceClass::new(0, 1).unwrap());
        assert!((p - 3.0 * x / pi2).abs() < 1e-9);
        let p = nh_count_prediction(x, CongruenceClass::new(1, 4).unwrap());
        assert!((p - 2.0 * x / pi2).abs() < 1e-9);
        let p = nh_count_prediction(x, CongruenceClass::new(1, 3).unwrap());
        assert!((p - 3.0 * x / pi2 * 0.5 * 0.75).abs() < 1e-9);
    }

    #[test]
    fn density_bound_exact_values() {
        assert_eq!(rank_lt_density_bound(1, Sign::Minus), Rational::new(1, 2));
        assert_eq!(rank_lt_density_bound(1, Sign::Plus), Rational::new(5, 6));
        assert_eq!(rank_lt_density_bound(2, Sign::Minus), Rational::new(7, 8));
    }

    #[test]
    fn omega_examples() {
        // ω(2) = 0: every progression value is odd
        assert_eq!(omega_p(2, &fam(1, 3)), 0);
        // {x+3}: B = 16, progressions 16x+1 and 4x+1; two distinct roots mod 25
        assert_eq!(omega_p(5, &fam(1, 3)), 2);
        assert_eq!(omega_p(3, &fam(1, 3)), omega_p_brute(3, &fam(1, 3)));
    }

    fn omega_p_brute(p: u64, fam: &NormalizedFamily) -> u64 {
        let p2 = (p * p) as i64;
        let progs = local_progressions(fam);
        (0..p2)
            .filter(|&x| progs.iter().any(|&(s, o)| (s % p2 * x + o).rem_euclid(p2) == 0))
            .count() as u64
    }

    #[test]
    fn omega_matches_brute_force() {
        let families = [fam(1, 3), fam(1, 5), fam(9, 3), fam(16, 8)];
        for f in &families {
            for p in [2u64, 3, 5, 7, 11, 13] {
                assert_eq!(omega_p(p, f), omega_p_brute(p, f), "p = {p}");
            }
        }
    }

    #[test]
    fn omega_bounded_by_progression_count() {
        let f = fam(9, 3);
        for p in primes_below(200) {
            assert!(omega_p(p, &f) <= 2);
        }
    }

    #[test]
    fn omega3_positive_with_small_tail() {
        let (value, tail) = omega3_product(&fam(1, 3), 10_000);
        assert!(value > 0.0 && value < 1.0);
        assert!(tail < 1e-3);
    }

    #[test]
    fn bare_progression_product_matches_sieve() {
        // squarefree density of {4x + 1}: product over odd p of (1 − 1/p²),
        // checked against a direct sieve count
        let (value, tail) = omega3_product_for(&[(4, 1)], 50_000);
        let x = 2_000_000i64;
        let count = {
            let flags = arith::squarefree_range(1, x as u64 + 1);
            (0..)
                .map(|k| 4 * k + 1)
                .take_while(|&v| v < x)
                .filter(|&v| flags[(v - 1) as usize])
                .count() as f64
        };
        let density = count / (x as f64 / 4.0);
        assert!(
            (density - value).abs() < 2e-3 + tail,
            "sieve {density} vs product {value} (tail {tail})"
        );
    }

    #[test]
    fn report_json_key_order() {
        let r = DensityReport::new(100.0, 5, 2.0, 2.5, Some(0.5));
        let json = r.to_json();
        let want_prefix = r#"{"X":100.0,"population":5,"statistic":2.0,"prediction":2.5,"#;
        assert!(json.starts_with(want_prefix), "{json}");
        assert!(json.contains(r#""pass":true"#));
    }
}
