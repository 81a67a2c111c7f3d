//! Good pairs, normalization of families of linear polynomials, membership
//! in the squarefree progression sets T(X) and Tᵢ(X), and the image map that
//! sends a progression element to a fundamental discriminant.

use crate::arith::{
    self, is_squarefree, mod_inverse, primes_below, CongruenceClass, FundamentalDiscriminant,
    Sign,
};
use crate::error::{Error, Result};

/// Which clause of the good-pair definition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoodPairClause {
    /// An odd prime p | gcd(A, B) without p² | B, or with p² | A.
    OddPrime,
    /// B even without the required 2-adic shape of (A, B).
    TwoAdic,
}

impl std::fmt::Display for GoodPairClause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GoodPairClause::OddPrime => "clause i",
            GoodPairClause::TwoAdic => "clause ii",
        })
    }
}

/// `None` when (a, b) is good, otherwise the failing clause. A pair (A, B) is
/// good when (i) every odd prime p | gcd(A, B) has p² | B and p² ∤ A, and
/// (ii) if 2 | B then either A ≡ 1 (mod 4) and 4 | B, or A ≡ 8, 12 (mod 16)
/// and 16 | B.
pub fn good_pair_failure(a: i64, b: i64) -> Result<Option<GoodPairClause>> {
    if a < 1 || b < 1 {
        return Err(Error::InvalidRange(format!(
            "good pair needs positive integers, got ({a}, {b})"
        )));
    }
    let mut g = num_integer::gcd(a, b);
    while g % 2 == 0 {
        g /= 2;
    }
    let mut p = 3i64;
    while p * p <= g {
        if g % p == 0 {
            if b % (p * p) != 0 || a % (p * p) == 0 {
                return Ok(Some(GoodPairClause::OddPrime));
            }
            while g % p == 0 {
                g /= p;
            }
        }
        p += 2;
    }
    if g > 1 {
        // g itself is an odd prime dividing gcd(a, b)
        if b % (g * g) != 0 || a % (g * g) == 0 {
            return Ok(Some(GoodPairClause::OddPrime));
        }
    }
    if b % 2 == 0 {
        let first = a % 4 == 1 && b % 4 == 0;
        let second = matches!(a % 16, 8 | 12) && b % 16 == 0;
        if !first && !second {
            return Ok(Some(GoodPairClause::TwoAdic));
        }
    }
    Ok(None)
}

pub fn is_good_pair(a: i64, b: i64) -> Result<bool> {
    Ok(good_pair_failure(a, b)?.is_none())
}

/// f(x) = slope·x + intercept with positive integer coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearPolynomial {
    slope: i64,
    intercept: i64,
}

impl LinearPolynomial {
    pub fn new(slope: i64, intercept: i64) -> Result<Self> {
        if slope < 1 || intercept < 1 {
            return Err(Error::InvalidPolynomial(format!(
                "need positive slope and intercept, got {slope}x + {intercept}"
            )));
        }
        Ok(LinearPolynomial { slope, intercept })
    }

    pub fn slope(self) -> i64 {
        self.slope
    }

    pub fn intercept(self) -> i64 {
        self.intercept
    }

    pub fn eval(self, x: i64) -> i64 {
        self.slope * x + self.intercept
    }
}

impl std::fmt::Display for LinearPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x + {}", self.slope, self.intercept)
    }
}

/// A validated family: `positives` carry sign +1 (the field ℚ(√f(D))),
/// `negatives` sign −1 (ℚ(√−f(D))). Requires r + s ≥ 1, the size constraint
/// 4 + r + 3s ≤ 3^{n+1}, and every pair (intercept, slope) good.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    n_rank: u32,
    positives: Vec<LinearPolynomial>,
    negatives: Vec<LinearPolynomial>,
}

impl FamilySpec {
    pub fn new(
        n_rank: u32,
        positives: Vec<LinearPolynomial>,
        negatives: Vec<LinearPolynomial>,
    ) -> Result<Self> {
        if n_rank < 1 || n_rank > 37 {
            return Err(Error::InvalidFamily(format!("rank bound n = {n_rank} out of range")));
        }
        let (r, s) = (positives.len() as i64, negatives.len() as i64);
        if r + s < 1 {
            return Err(Error::InvalidFamily("family needs at least one polynomial".into()));
        }
        let limit = 3i64.pow(n_rank + 1);
        if 4 + r + 3 * s > limit {
            return Err(Error::InvalidFamily(format!(
                "size constraint violated: 4 + {r} + 3·{s} > 3^{}",
                n_rank + 1
            )));
        }
        for f in positives.iter().chain(&negatives) {
            // goodness is required of (intercept, slope), in that order
            if let Some(clause) = good_pair_failure(f.intercept, f.slope)? {
                return Err(Error::InvalidFamily(format!(
                    "pair ({}, {}) of {f} is not good ({clause})",
                    f.intercept, f.slope
                )));
            }
        }
        Ok(FamilySpec { n_rank, positives, negatives })
    }

    /// Strict text format: header `n <rank bound>`, then one `+ m n` or
    /// `- m n` line per polynomial. Blank lines are permitted, nothing else.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty family file".into()))?;
        let n_rank = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["n", v] => v
                .parse::<u32>()
                .map_err(|e| Error::Parse(format!("bad rank bound {v:?}: {e}")))?,
            _ => return Err(Error::Parse(format!("bad header {header:?}, expected `n <bound>`"))),
        };
        let mut positives = Vec::new();
        let mut negatives = Vec::new();
        for line in lines {
            match line.split_whitespace().collect::<Vec<_>>()[..] {
                [sign @ ("+" | "-"), m, n] => {
                    let m = m
                        .parse::<i64>()
                        .map_err(|e| Error::Parse(format!("bad slope {m:?}: {e}")))?;
                    let n = n
                        .parse::<i64>()
                        .map_err(|e| Error::Parse(format!("bad intercept {n:?}: {e}")))?;
                    let poly = LinearPolynomial::new(m, n)?;
                    if sign == "+" {
                        positives.push(poly);
                    } else {
                        negatives.push(poly);
                    }
                }
                _ => return Err(Error::Parse(format!("bad family line {line:?}"))),
            }
        }
        FamilySpec::new(n_rank, positives, negatives)
    }

    pub fn n_rank(&self) -> u32 {
        self.n_rank
    }

    pub fn positives(&self) -> &[LinearPolynomial] {
        &self.positives
    }

    pub fn negatives(&self) -> &[LinearPolynomial] {
        &self.negatives
    }

    /// All polynomials, positives first, with their sign.
    pub fn polynomials(&self) -> impl Iterator<Item = (LinearPolynomial, Sign)> + '_ {
        self.positives
            .iter()
            .map(|&f| (f, Sign::Plus))
            .chain(self.negatives.iter().map(|&f| (f, Sign::Minus)))
    }

    pub fn normalize(&self) -> Result<NormalizedFamily> {
        NormalizedFamily::new(self)
    }
}

/// One polynomial with its derived normalization data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizedPolynomial {
    poly: LinearPolynomial,
    lambda: Sign,
    /// 2-adic valuation of slope + intercept; 2^u exactly divides f(1).
    u: u32,
    /// 1 when the reduced value at 1 is ≡ 1 (mod 4), else 4.
    l: u8,
}

impl NormalizedPolynomial {
    pub fn poly(&self) -> LinearPolynomial {
        self.poly
    }

    pub fn lambda(&self) -> Sign {
        self.lambda
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    /// The normalizer from the reduced value at 1 (positive-sign convention).
    pub fn normalizer(&self) -> u8 {
        self.l
    }

    /// The reduced polynomial value f(x)/2^u; exact division, asserted.
    pub fn reduced_eval(&self, x: i64) -> i64 {
        let v = self.poly.eval(x);
        let div = 1i64 << self.u;
        assert_eq!(v % div, 0, "2^{} does not divide {}({x}) = {v}", self.u, self.poly);
        v / div
    }

    pub fn reduced_at_one(&self) -> i64 {
        self.reduced_eval(1)
    }

    /// The normalizer that makes the *signed* image λ·l·f̃(D) a fundamental
    /// discriminant: for λ = −1 the two residue cases swap, so the value at 1
    /// of the signed image decides.
    pub fn image_normalizer(&self) -> u8 {
        let signed = self.lambda.as_i64() * self.reduced_at_one();
        if signed.rem_euclid(4) == 1 {
            1
        } else {
            4
        }
    }

    /// Modulus of the image progression, 4·l*·slope with l* the image
    /// normalizer.
    pub fn image_modulus(&self) -> i64 {
        4 * self.image_normalizer() as i64 * self.poly.slope
    }

    /// Residue class of every image discriminant modulo `image_modulus`.
    pub fn image_class(&self) -> CongruenceClass {
        let m = self.image_modulus();
        let a = (self.lambda.as_i64() * self.image_normalizer() as i64 * self.reduced_at_one())
            .rem_euclid(m);
        CongruenceClass::new(a, m).expect("modulus is positive")
    }

    /// Strict bound on |image| over D < x: l*·f̃(x).
    pub fn image_bound(&self, x: f64) -> f64 {
        self.image_normalizer() as f64 * (self.poly.slope as f64 * x + self.poly.intercept as f64)
            / (1u64 << self.u) as f64
    }
}

/// A family with all §-derived data attached: per-polynomial (u, l, λ) and
/// the progression modulus B = 2^{u_max + 2}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedFamily {
    n_rank: u32,
    polys: Vec<NormalizedPolynomial>,
    u_max: u32,
    modulus: i64,
}

impl NormalizedFamily {
    fn new(spec: &FamilySpec) -> Result<Self> {
        let mut polys = Vec::with_capacity(spec.positives.len() + spec.negatives.len());
        let mut u_max = 0;
        for (poly, lambda) in spec.polynomials() {
            let sum = poly.slope + poly.intercept;
            let u = arith::v2(sum as u64);
            if u >= 40 {
                return Err(Error::InvalidFamily(format!(
                    "2-adic valuation {u} of {sum} is out of supported range"
                )));
            }
            u_max = u_max.max(u);
            let reduced_one = sum >> u;
            debug_assert!(reduced_one % 2 == 1);
            let l = if reduced_one.rem_euclid(4) == 1 { 1 } else { 4 };
            polys.push(NormalizedPolynomial { poly, lambda, u, l });
        }
        let modulus = 1i64 << (u_max + 2);
        let fam = NormalizedFamily { n_rank: spec.n_rank, polys, u_max, modulus };
        for p in &fam.polys {
            // the derived pair (l·f̃(1), 4·l·slope) is good — a theorem about
            // the construction, so a failure is an internal error
            let derived = (p.l as i64 * p.reduced_at_one(), 4 * p.l as i64 * p.poly.slope);
            assert!(
                is_good_pair(derived.0, derived.1)?,
                "derived pair {derived:?} of {} is not good",
                p.poly
            );
            // likewise for the signed image progression the rank statistics
            // actually run over
            let cls = p.image_class();
            assert!(
                is_good_pair(cls.residue(), cls.modulus())?,
                "image progression pair ({}, {}) of {} is not good",
                cls.residue(),
                cls.modulus(),
                p.poly
            );
        }
        Ok(fam)
    }

    pub fn n_rank(&self) -> u32 {
        self.n_rank
    }

    pub fn polys(&self) -> &[NormalizedPolynomial] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn u_max(&self) -> u32 {
        self.u_max
    }

    /// B = 2^{u_max + 2}; members of T are ≡ 1 (mod B).
    pub fn progression_modulus(&self) -> i64 {
        self.modulus
    }

    /// Membership in T (no index) or Tᵢ (with index): D in the right
    /// progression with D and the reduced values squarefree. D = 1 is
    /// excluded: its positive images degenerate to 1, which is not a
    /// discriminant.
    pub fn in_t(&self, d: i64, which: Option<usize>) -> bool {
        if d < 2 {
            return false;
        }
        match which {
            None => {
                d.rem_euclid(self.modulus) == 1
                    && is_squarefree(d)
                    && self.polys.iter().all(|p| is_squarefree(p.reduced_eval(d)))
            }
            Some(i) => {
                let p = &self.polys[i];
                d.rem_euclid(1i64 << (p.u + 2)) == 1
                    && is_squarefree(d)
                    && is_squarefree(p.reduced_eval(d))
            }
        }
    }

    /// The fundamental discriminant λᵢ·lᵢ*·f̃ᵢ(D) attached to D by the i-th
    /// polynomial. Needs D in the right progression and f̃ᵢ(D) squarefree
    /// (D itself need not be squarefree for the image to make sense).
    pub fn image_discriminant(&self, d: i64, i: usize) -> Result<FundamentalDiscriminant> {
        let p = &self.polys[i];
        if d < 2 || d.rem_euclid(1i64 << (p.u + 2)) != 1 {
            return Err(Error::InvalidRange(format!(
                "D = {d} is not ≡ 1 (mod 2^{})",
                p.u + 2
            )));
        }
        let reduced = p.reduced_eval(d);
        if !is_squarefree(reduced) {
            return Err(Error::InvalidRange(format!(
                "reduced value {reduced} at D = {d} is not squarefree"
            )));
        }
        let image = p.lambda.as_i64() * p.image_normalizer() as i64 * reduced;
        FundamentalDiscriminant::new(image)
            .map_err(|_| Error::Internal(format!("image {image} of D = {d} is not fundamental")))
    }

    /// Visit every D ∈ T(x) ascending, by sieving the progression directly.
    pub fn for_each_in_t<F: FnMut(i64)>(&self, x: f64, mut visit: F) {
        let bound = arith::strict_below(x);
        if bound < 2 {
            return;
        }
        let b = self.modulus;
        // D = B·k + 1 for k = 1, 2, ... (k = 0 gives the excluded D = 1)
        let k_max = (bound - 1) / b;
        if k_max < 1 {
            return;
        }
        let mut bad = vec![false; k_max as usize + 1];
        bad[0] = true;
        // progressions to keep squarefree: D itself and each reduced value,
        // all linear in k
        let mut progressions: Vec<(i64, i64)> = vec![(b, 1)];
        for p in &self.polys {
            let step = p.poly.slope * (b >> p.u);
            let offset = (p.poly.slope + p.poly.intercept) >> p.u;
            progressions.push((step, offset));
        }
        for &(step, offset) in &progressions {
            let max_value = step * k_max + offset;
            let primes = primes_below((max_value as u64).isqrt() + 1);
            for &pr in &primes {
                if pr == 2 {
                    // every progression value here is odd
                    debug_assert!(step % 2 == 0 && offset % 2 == 1);
                    continue;
                }
                let p2 = (pr * pr) as i64;
                let step_red = step.rem_euclid(p2);
                let g = num_integer::gcd(step_red, p2);
                if g == 1 {
                    let inv = mod_inverse(step_red, p2).expect("coprime");
                    let k0 = ((-offset).rem_euclid(p2) as i128 * inv as i128).rem_euclid(p2 as i128)
                        as i64;
                    let mut k = k0;
                    while k <= k_max {
                        bad[k as usize] = true;
                        k += p2;
                    }
                } else if g == pr as i64 {
                    // step ≡ 0 (mod p): value ≡ step/p·p·k + offset; solvable
                    // mod p² iff p | offset, then k runs mod p
                    if offset.rem_euclid(pr as i64) != 0 {
                        continue;
                    }
                    let p_i = pr as i64;
                    let step_p = step_red / p_i;
                    let off_p = offset.rem_euclid(p2) / p_i;
                    match mod_inverse(step_p, p_i) {
                        Some(inv) => {
                            let k0 = ((-off_p).rem_euclid(p_i) as i128 * inv as i128)
                                .rem_euclid(p_i as i128) as i64;
                            let mut k = k0;
                            while k <= k_max {
                                bad[k as usize] = true;
                                k += p_i;
                            }
                        }
                        None => {
                            // step ≡ 0 (mod p²) with p | offset: p² | value iff p² | offset
                            if offset.rem_euclid(p2) == 0 {
                                bad.iter_mut().for_each(|x| *x = true);
                            }
                        }
                    }
                } else {
                    // p² | step: constant residue
                    if offset.rem_euclid(p2) == 0 {
                        bad.iter_mut().for_each(|x| *x = true);
                    }
                }
            }
        }
        for k in 1..=k_max {
            if !bad[k as usize] {
                let d = b * k + 1;
                debug_assert!(self.in_t(d, None), "sieve admitted D = {d}");
                visit(d);
            }
        }
    }

    pub fn members_of_t(&self, x: f64) -> Vec<i64> {
        let mut out = Vec::new();
        self.for_each_in_t(x, |d| out.push(d));
        out
    }

    pub fn count_t(&self, x: f64) -> u64 {
        let mut n = 0;
        self.for_each_in_t(x, |_| n += 1);
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(m: i64, n: i64) -> LinearPolynomial {
        LinearPolynomial::new(m, n).unwrap()
    }

    fn single_plus(m: i64, n: i64) -> NormalizedFamily {
        FamilySpec::new(1, vec![poly(m, n)], vec![]).unwrap().normalize().unwrap()
    }

    fn single_minus(m: i64, n: i64) -> NormalizedFamily {
        FamilySpec::new(1, vec![], vec![poly(m, n)]).unwrap().normalize().unwrap()
    }

    #[test]
    fn good_pair_examples() {
        assert!(is_good_pair(1, 4).unwrap());
        assert!(!is_good_pair(3, 4).unwrap());
        assert!(is_good_pair(12, 16).unwrap());
        assert!(is_good_pair(3, 9).unwrap());
        assert!(!is_good_pair(9, 3).unwrap());
        assert!(!is_good_pair(18, 27).unwrap());
        assert!(is_good_pair(0, 1).is_err());
        assert_eq!(good_pair_failure(3, 4).unwrap(), Some(GoodPairClause::TwoAdic));
        assert_eq!(good_pair_failure(9, 3).unwrap(), Some(GoodPairClause::OddPrime));
    }

    #[test]
    fn normalize_x_plus_3() {
        let fam = single_plus(1, 3);
        let p = &fam.polys()[0];
        assert_eq!(p.u(), 2);
        assert_eq!(fam.progression_modulus(), 16);
        assert_eq!(p.reduced_at_one(), 1);
        assert_eq!(p.normalizer(), 1);
        assert_eq!(p.image_normalizer(), 1);
    }

    #[test]
    fn normalize_x_plus_5() {
        let fam = single_plus(1, 5);
        let p = &fam.polys()[0];
        assert_eq!(p.u(), 1);
        assert_eq!(fam.progression_modulus(), 8);
        assert_eq!(p.reduced_at_one(), 3);
        assert_eq!(p.normalizer(), 4);
        assert!(is_good_pair(4 * 3, 16).unwrap()); // the derived pair (12, 16)
    }

    #[test]
    fn lambda_table() {
        let fam = FamilySpec::new(1, vec![poly(1, 3)], vec![poly(1, 1)])
            .unwrap()
            .normalize()
            .unwrap();
        assert_eq!(fam.polys()[0].lambda(), Sign::Plus);
        assert_eq!(fam.polys()[1].lambda(), Sign::Minus);
    }

    #[test]
    fn family_invariants_enforced() {
        // 4 + r + 3s > 3^{n+1}
        let many: Vec<LinearPolynomial> = (1..=6).map(|i| poly(1, 2 * i + 1)).collect();
        assert!(FamilySpec::new(1, many, vec![]).is_err());
        // bad pair: (intercept, slope) = (3, 4) fails clause ii
        assert!(FamilySpec::new(1, vec![poly(4, 3)], vec![]).is_err());
        // empty family
        assert!(FamilySpec::new(1, vec![], vec![]).is_err());
    }

    #[test]
    fn in_t_examples() {
        let fam = single_plus(1, 3);
        assert!(fam.in_t(17, None));
        assert!(!fam.in_t(33, None)); // f̃(33) = 9 is not squarefree
        assert!(!fam.in_t(2, None));
        assert!(!fam.in_t(1, None)); // excluded: image would be 1
        assert!(fam.in_t(17, Some(0)));
    }

    #[test]
    fn reduced_values_odd_on_progression() {
        for fam in [single_plus(1, 3), single_plus(1, 5), single_minus(1, 1), single_plus(16, 8)] {
            let b = fam.progression_modulus();
            for k in 0..100 {
                let d = b * k + 1;
                for p in fam.polys() {
                    assert_eq!(p.reduced_eval(d).rem_euclid(2), 1, "f = {}, D = {d}", p.poly());
                }
            }
        }
    }

    #[test]
    fn image_positive_case() {
        let fam = single_plus(1, 3);
        assert_eq!(fam.image_discriminant(17, 0).unwrap().value(), 5);
    }

    #[test]
    fn image_negative_case_lands_on_fundamental() {
        // f = x + 5 on the negative side: f̃(9) = 7 and the field is ℚ(√-7),
        // whose discriminant is -7 itself (not -28 = 4·(-7), which is not
        // fundamental); the normalizer must flip for λ = -1
        let fam = single_minus(1, 5);
        let img = fam.image_discriminant(9, 0).unwrap();
        assert_eq!(img.value(), -7);
        assert!(arith::is_fundamental(-7) && !arith::is_fundamental(-28));
        assert_eq!(fam.polys()[0].normalizer(), 4);
        assert_eq!(fam.polys()[0].image_normalizer(), 1);
        // D = 9 is not itself in T (9 is not squarefree) but the image is
        // still well-defined
        assert!(!fam.in_t(9, Some(0)));
    }

    #[test]
    fn image_rejects_bad_inputs() {
        let fam = single_plus(1, 3);
        assert!(fam.image_discriminant(18, 0).is_err()); // wrong progression
        assert!(fam.image_discriminant(97, 0).is_err()); // f̃(97) = 25 not squarefree
    }

    #[test]
    fn images_are_fundamental_and_in_class() {
        for fam in [
            single_plus(1, 3),
            single_plus(1, 5),
            single_minus(1, 5),
            single_minus(1, 1),
            single_plus(16, 8),
            single_plus(9, 3),
        ] {
            let p = &fam.polys()[0];
            let cls = p.image_class();
            let mut seen = 0;
            let mut d = 1;
            while seen < 100 {
                d += 1i64 << (p.u() + 2);
                if !fam.in_t(d, Some(0)) {
                    continue;
                }
                seen += 1;
                let img = fam.image_discriminant(d, 0).unwrap();
                assert!(cls.contains(img.value()), "image {img} outside {cls}");
                assert_eq!(img.lambda(), p.lambda());
                assert!(
                    (img.value().unsigned_abs() as f64) < p.image_bound(d as f64 + 1.0),
                    "image {img} above bound"
                );
            }
        }
    }

    #[test]
    fn t_subset_of_t_i() {
        let fam = FamilySpec::new(1, vec![poly(1, 3)], vec![poly(1, 1)])
            .unwrap()
            .normalize()
            .unwrap();
        for d in 1..5000 {
            if fam.in_t(d, None) {
                for i in 0..fam.len() {
                    assert!(fam.in_t(d, Some(i)), "D = {d}, i = {i}");
                }
            }
        }
    }

    #[test]
    fn sieved_t_matches_pointwise() {
        for fam in [
            single_plus(1, 3),
            single_minus(1, 5),
            single_plus(9, 3),
            FamilySpec::new(1, vec![poly(1, 3)], vec![poly(1, 1)]).unwrap().normalize().unwrap(),
        ] {
            let got = fam.members_of_t(20_000.0);
            let want: Vec<i64> = (1..20_000i64).filter(|&d| fam.in_t(d, None)).collect();
            assert_eq!(got, want);
            assert_eq!(fam.count_t(20_000.0) as usize, want.len());
        }
    }

    #[test]
    fn image_injective_and_characterized() {
        // the image map is injective on Tᵢ, and an S-member is an image
        // exactly when its (unique) preimage lies in Tᵢ
        let fam = single_plus(1, 3);
        let p = &fam.polys()[0];
        let x = 4000.0;
        let mut images = std::collections::BTreeSet::new();
        for d in 1..4000i64 {
            if fam.in_t(d, Some(0)) {
                assert!(images.insert(fam.image_discriminant(d, 0).unwrap().value()));
            }
        }
        for e in arith::enumerate_s(p.image_bound(x), p.image_class(), p.lambda()) {
            // invert: e = l*·(slope·D + intercept)/2^u
            let l = p.image_normalizer() as i64;
            let num = e.value().abs() * (1i64 << p.u()) / l - p.poly().intercept();
            let preimage_ok = num % p.poly().slope() == 0 && {
                let d = num / p.poly().slope();
                d > 0 && (d as f64) < x && fam.in_t(d, Some(0))
            };
            assert_eq!(preimage_ok, images.contains(&e.value()), "E = {e}");
        }
    }

    #[test]
    fn lemma_derived_pairs_good_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(0x3_4ab7);
        let mut found = 0;
        while found < 1000 {
            let a = rng.gen_range(1..=200i64);
            let b = rng.gen_range(1..=200i64);
            if !is_good_pair(a, b).unwrap() {
                continue;
            }
            found += 1;
            // (a, b) = (intercept, slope): normalization asserts both derived
            // pairs internally for each sign
            let f = poly(b, a);
            FamilySpec::new(3, vec![f], vec![]).unwrap().normalize().unwrap();
            FamilySpec::new(3, vec![], vec![f]).unwrap().normalize().unwrap();
        }
    }

    #[test]
    fn parse_family_text() {
        let fam = FamilySpec::parse("n 1\n+ 1 3\n- 1 1\n").unwrap();
        assert_eq!(fam.n_rank(), 1);
        assert_eq!(fam.positives(), &[poly(1, 3)]);
        assert_eq!(fam.negatives(), &[poly(1, 1)]);

        assert!(FamilySpec::parse("").is_err());
        assert!(FamilySpec::parse("+ 1 3\n").is_err()); // missing header
        assert!(FamilySpec::parse("n 1\n* 1 3\n").is_err()); // unknown token
        assert!(FamilySpec::parse("n 1\n+ 1 3 7\n").is_err()); // extra field
        assert!(FamilySpec::parse("n 1\n+ 4 3\n").is_err()); // pair not good
    }
}
