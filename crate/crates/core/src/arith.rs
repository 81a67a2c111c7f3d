//! Integer-arithmetic substrate: Möbius and squarefree sieves, fundamental
//! discriminant predicates, and enumeration of the congruence-restricted
//! discriminant sets `S_λ(X, m, N)`.
//!
//! All range operations are segmented with a fixed segment length so memory
//! stays O(segment) regardless of the bound.

use crate::error::{Error, Result};

/// Segment length (in integers) for all segmented sieves.
pub const SEGMENT_LEN: u64 = 1 << 20;

/// Sign class of a discriminant: `Plus` for real quadratic fields (D > 0),
/// `Minus` for imaginary ones (D < 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(d: i64) -> Sign {
        if d >= 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Sign> {
        match s {
            "+" | "+1" | "1" => Ok(Sign::Plus),
            "-" | "-1" => Ok(Sign::Minus),
            other => Err(Error::Parse(format!("bad sign {other:?}, expected + or -"))),
        }
    }
}

/// A validated fundamental discriminant: either squarefree and ≡ 1 (mod 4),
/// or 4m with m squarefree and m ≡ 2, 3 (mod 4). Excludes 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FundamentalDiscriminant(i64);

impl FundamentalDiscriminant {
    pub fn new(d: i64) -> Result<Self> {
        if is_fundamental(d) {
            Ok(FundamentalDiscriminant(d))
        } else {
            Err(Error::NotFundamental(d))
        }
    }

    /// Skips validation. The caller must guarantee `is_fundamental(d)`.
    pub(crate) fn new_unchecked(d: i64) -> Self {
        debug_assert!(is_fundamental(d));
        FundamentalDiscriminant(d)
    }

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn lambda(self) -> Sign {
        Sign::of(self.0)
    }
}

impl std::fmt::Display for FundamentalDiscriminant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<i64> for FundamentalDiscriminant {
    type Error = Error;
    fn try_from(d: i64) -> Result<Self> {
        FundamentalDiscriminant::new(d)
    }
}

/// A residue class `m (mod N)`. Membership of a signed integer D is tested on
/// the mathematical residue `D.rem_euclid(N)`, which matters for D < 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CongruenceClass {
    residue: i64,
    modulus: i64,
}

impl CongruenceClass {
    pub fn new(m: i64, n: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidRange(format!("modulus {n} must be >= 1")));
        }
        Ok(CongruenceClass {
            residue: m.rem_euclid(n),
            modulus: n,
        })
    }

    pub fn residue(self) -> i64 {
        self.residue
    }

    pub fn modulus(self) -> i64 {
        self.modulus
    }

    pub fn contains(self, d: i64) -> bool {
        d.rem_euclid(self.modulus) == self.residue
    }
}

impl std::fmt::Display for CongruenceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (mod {})", self.residue, self.modulus)
    }
}

/// Primes below `n` by a plain sieve of Eratosthenes.
pub fn primes_below(n: u64) -> Vec<u64> {
    if n < 3 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n];
    let mut primes = Vec::new();
    for p in 2..n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q < n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

/// Möbius values for every integer in `[lo, hi)`.
///
/// Segmented internally; rejects `lo < 1`. An empty range yields an empty
/// vector.
pub fn mobius_range(lo: i64, hi: i64) -> Result<Vec<i8>> {
    if lo < 1 {
        return Err(Error::InvalidRange(format!("mobius_range needs lo >= 1, got {lo}")));
    }
    if hi <= lo {
        return Ok(Vec::new());
    }
    let (lo, hi) = (lo as u64, hi as u64);
    let primes = primes_below((hi - 1).isqrt() + 1);
    let mut out = Vec::with_capacity((hi - lo) as usize);
    let mut seg_lo = lo;
    while seg_lo < hi {
        let seg_hi = (seg_lo + SEGMENT_LEN).min(hi);
        out.extend_from_slice(&mobius_segment(seg_lo, seg_hi, &primes));
        seg_lo = seg_hi;
    }
    Ok(out)
}

/// Möbius values on `[lo, hi)` given primes covering sqrt(hi - 1).
pub(crate) fn mobius_segment(lo: u64, hi: u64, primes: &[u64]) -> Vec<i8> {
    let n = (hi - lo) as usize;
    let mut mu = vec![1i8; n];
    // rem[i] holds the cofactor of lo+i after dividing out each small prime once
    let mut rem: Vec<u64> = (lo..hi).collect();
    for &p in primes {
        if p * p >= hi {
            break;
        }
        let start = lo.next_multiple_of(p);
        let mut j = start;
        while j < hi {
            let i = (j - lo) as usize;
            mu[i] = -mu[i];
            rem[i] /= p;
            j += p;
        }
        let p2 = p * p;
        let mut j = lo.next_multiple_of(p2);
        while j < hi {
            mu[(j - lo) as usize] = 0;
            j += p2;
        }
    }
    // whatever remains is a single prime factor larger than sqrt(hi)
    for i in 0..n {
        if rem[i] > 1 {
            mu[i] = -mu[i];
        }
    }
    if lo == 1 {
        mu[0] = 1;
    }
    mu
}

/// Squarefree flags for `[lo, hi)` given primes covering sqrt(hi - 1).
pub(crate) fn squarefree_segment(lo: u64, hi: u64, primes: &[u64]) -> Vec<bool> {
    let n = (hi - lo) as usize;
    let mut flags = vec![true; n];
    if lo == 0 && n > 0 {
        flags[0] = false;
    }
    for &p in primes {
        let p2 = match p.checked_mul(p) {
            Some(p2) if p2 < hi => p2,
            _ => break,
        };
        let mut j = lo.next_multiple_of(p2);
        while j < hi {
            flags[(j - lo) as usize] = false;
            j += p2;
        }
    }
    flags
}

/// Squarefree flags for every integer in `[lo, hi)`.
pub fn squarefree_range(lo: u64, hi: u64) -> Vec<bool> {
    if hi <= lo {
        return Vec::new();
    }
    let primes = primes_below((hi - 1).isqrt() + 1);
    let mut out = Vec::with_capacity((hi - lo) as usize);
    let mut seg_lo = lo;
    while seg_lo < hi {
        let seg_hi = (seg_lo + SEGMENT_LEN).min(hi);
        out.extend_from_slice(&squarefree_segment(seg_lo, seg_hi, &primes));
        seg_lo = seg_hi;
    }
    out
}

/// Squarefree test for a single integer by trial division.
pub fn is_squarefree(n: i64) -> bool {
    let mut m = n.unsigned_abs();
    if m == 0 {
        return false;
    }
    let mut p: u64 = 2;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// Largest-square-free part of `t`, keeping the sign: the unique squarefree
/// `s` with `t = s·k²`.
pub fn squarefree_core(t: i64) -> i64 {
    let mut m = t.unsigned_abs();
    debug_assert!(m > 0);
    let mut core: i64 = 1;
    let mut p: u64 = 2;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if e % 2 == 1 {
                core *= p as i64;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    core *= m as i64;
    if t < 0 {
        -core
    } else {
        core
    }
}

/// Whether `d` is a fundamental discriminant. Total; 0 and 1 are excluded
/// (1 would be the "discriminant" of ℚ itself, which carries no class group).
pub fn is_fundamental(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m)
        }
        _ => false,
    }
}

/// The unique fundamental discriminant D with ℚ(√t) = ℚ(√D).
///
/// Rejects 0, 1, and perfect squares, which attach no quadratic field.
pub fn fundamental_discriminant_of(t: i64) -> Result<FundamentalDiscriminant> {
    if t == 0 || t == 1 {
        return Err(Error::NotAField(t));
    }
    if t > 1 {
        let r = (t as u64).isqrt();
        if r * r == t as u64 {
            return Err(Error::NotAField(t));
        }
    }
    let s = squarefree_core(t);
    let d = if s.rem_euclid(4) == 1 { s } else { 4 * s };
    Ok(FundamentalDiscriminant::new_unchecked(d))
}

/// Largest integer strictly below the real bound `x` (0 if none is positive).
pub(crate) fn strict_below(x: f64) -> i64 {
    if x <= 1.0 {
        return 0;
    }
    let f = x.floor();
    if f == x {
        f as i64 - 1
    } else {
        f as i64
    }
}

/// Visit every fundamental discriminant D with `0 < λD < x` and
/// `D ≡ cls (mod N)` in ascending |D| order.
///
/// Purely streaming: memory stays O(segment).
pub fn for_each_in_s<F: FnMut(FundamentalDiscriminant)>(
    x: f64,
    cls: CongruenceClass,
    lambda: Sign,
    mut visit: F,
) {
    let bound = strict_below(x);
    if bound < 3 {
        return;
    }
    let bound = bound as u64;
    let primes = primes_below(bound.isqrt() + 1);
    let sgn = lambda.as_i64();
    let mut seg_lo = 1u64;
    while seg_lo <= bound {
        let seg_hi = (seg_lo + SEGMENT_LEN).min(bound + 1);
        let sf = squarefree_segment(seg_lo, seg_hi, &primes);
        // quarter segment for the D = 4m branch
        let qlo = seg_lo.div_ceil(4).max(1);
        let qhi = (seg_hi - 1) / 4 + 1;
        let sfq = if qhi > qlo {
            squarefree_segment(qlo, qhi, &primes)
        } else {
            Vec::new()
        };
        for t in seg_lo..seg_hi {
            let fundamental = match (lambda, t % 4) {
                (Sign::Plus, 1) | (Sign::Minus, 3) => t != 1 && sf[(t - seg_lo) as usize],
                (_, 0) => {
                    let m = t / 4;
                    let want = match lambda {
                        // 4m fundamental needs m ≡ 2,3 (mod 4) on the signed m
                        Sign::Plus => matches!(m % 4, 2 | 3),
                        Sign::Minus => matches!(m % 4, 1 | 2),
                    };
                    want && sfq[(m - qlo) as usize]
                }
                _ => false,
            };
            if fundamental {
                let d = sgn * t as i64;
                if cls.contains(d) {
                    visit(FundamentalDiscriminant::new_unchecked(d));
                }
            }
        }
        seg_lo = seg_hi;
    }
}

/// `flags[i] == is_fundamental(lo + i)` for the closed interval [lo, hi],
/// computed by sieve rather than per-value trial division.
pub fn fundamental_flags(lo: i64, hi: i64) -> Vec<bool> {
    assert!(lo <= hi);
    let mut flags = vec![false; (hi - lo + 1) as usize];
    if hi >= 5 {
        mark_fundamentals(&mut flags, lo, Sign::Plus, lo.max(1) as u64, hi as u64);
    }
    if lo <= -3 {
        mark_fundamentals(&mut flags, lo, Sign::Minus, (-hi.min(-1)) as u64, (-lo) as u64);
    }
    flags
}

fn mark_fundamentals(flags: &mut [bool], lo: i64, sign: Sign, t_lo: u64, t_hi: u64) {
    let primes = primes_below(t_hi.isqrt() + 1);
    let sgn = sign.as_i64();
    let mut seg = t_lo;
    while seg <= t_hi {
        let seg_end = (seg + SEGMENT_LEN).min(t_hi + 1);
        let sf = squarefree_segment(seg, seg_end, &primes);
        let qlo = seg.div_ceil(4).max(1);
        let qhi = (seg_end - 1) / 4 + 1;
        let sfq = if qhi > qlo {
            squarefree_segment(qlo, qhi, &primes)
        } else {
            Vec::new()
        };
        for t in seg..seg_end {
            let fundamental = match (sign, t % 4) {
                (Sign::Plus, 1) | (Sign::Minus, 3) => sf[(t - seg) as usize],
                (_, 0) => {
                    let m = t / 4;
                    let want = match sign {
                        Sign::Plus => matches!(m % 4, 2 | 3),
                        Sign::Minus => matches!(m % 4, 1 | 2),
                    };
                    want && sfq[(m - qlo) as usize]
                }
                _ => false,
            };
            if fundamental {
                let d = sgn * t as i64;
                if t as i64 != 1 {
                    flags[(d - lo) as usize] = true;
                }
            }
        }
        seg = seg_end;
    }
}

/// Materialized version of [`for_each_in_s`].
pub fn enumerate_s(x: f64, cls: CongruenceClass, lambda: Sign) -> Vec<FundamentalDiscriminant> {
    let mut out = Vec::new();
    for_each_in_s(x, cls, lambda, |d| out.push(d));
    out
}

/// Cardinality of `S_λ(x, cls)` without materializing the set.
pub fn count_s(x: f64, cls: CongruenceClass, lambda: Sign) -> u64 {
    let mut n = 0;
    for_each_in_s(x, cls, lambda, |_| n += 1);
    n
}

/// 2-adic valuation of a positive integer.
pub fn v2(n: u64) -> u32 {
    debug_assert!(n > 0);
    n.trailing_zeros()
}

/// Inverse of `a` modulo `m` when gcd(a, m) = 1.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let (mut r0, mut r1) = (m, a.rem_euclid(m));
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        None
    } else {
        Some(t0.rem_euclid(m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu_trial(n: u64) -> i8 {
        let mut m = n;
        let mut k = 0;
        let mut p = 2;
        while p * p <= m {
            if m % p == 0 {
                m /= p;
                if m % p == 0 {
                    return 0;
                }
                k += 1;
            }
            p += 1;
        }
        if m > 1 {
            k += 1;
        }
        if k % 2 == 0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn mobius_examples() {
        assert_eq!(mobius_range(1, 2).unwrap(), vec![1]);
        assert_eq!(mobius_range(4, 7).unwrap(), vec![0, -1, 1]);
        assert_eq!(mobius_range(49, 50).unwrap(), vec![0]);
        assert!(mobius_range(0, 5).is_err());
    }

    #[test]
    fn mobius_matches_trial_division() {
        let mu = mobius_range(1, 100_001).unwrap();
        for n in 1..=100_000u64 {
            assert_eq!(mu[(n - 1) as usize], mu_trial(n), "mu({n})");
        }
    }

    #[test]
    fn mobius_segment_boundaries() {
        // force multi-segment agreement against a single pass
        let whole = mobius_range(1, 3_000_000).unwrap();
        let primes = primes_below(3_000_000u64.isqrt() + 1);
        let part = mobius_segment(2_999_000, 3_000_000, &primes);
        assert_eq!(&whole[2_998_999..], &part[..]);
    }

    #[test]
    fn fundamental_examples() {
        for d in [5, 12, 8, -3, -4, -23, -20, 13, 21] {
            assert!(is_fundamental(d), "{d}");
        }
        for d in [0, 1, 9, -9, 2, 3, -1, -12, 25, -28] {
            assert!(!is_fundamental(d), "{d}");
        }
    }

    #[test]
    fn fundamental_of_examples() {
        assert_eq!(fundamental_discriminant_of(20).unwrap().value(), 5);
        assert_eq!(fundamental_discriminant_of(12).unwrap().value(), 12);
        assert_eq!(fundamental_discriminant_of(-23).unwrap().value(), -23);
        assert_eq!(fundamental_discriminant_of(75).unwrap().value(), 12);
        assert!(fundamental_discriminant_of(0).is_err());
        assert!(fundamental_discriminant_of(1).is_err());
        assert!(fundamental_discriminant_of(49).is_err());
    }

    #[test]
    fn fundamental_of_idempotent() {
        for d in -300..300i64 {
            if is_fundamental(d) {
                assert_eq!(fundamental_discriminant_of(d).unwrap().value(), d);
            }
        }
    }

    #[test]
    fn enumerate_s_examples() {
        let got: Vec<i64> = enumerate_s(30.0, CongruenceClass::new(1, 4).unwrap(), Sign::Plus)
            .iter()
            .map(|d| d.value())
            .collect();
        assert_eq!(got, vec![5, 13, 17, 21, 29]);

        // signed-residue convention: D ≡ 0 (mod 4) tests the residue of D itself
        let got: Vec<i64> = enumerate_s(20.0, CongruenceClass::new(0, 4).unwrap(), Sign::Minus)
            .iter()
            .map(|d| d.value())
            .collect();
        assert_eq!(got, vec![-4, -8]);

        assert_eq!(count_s(2.0, CongruenceClass::new(0, 1).unwrap(), Sign::Plus), 0);
        assert_eq!(count_s(2.0, CongruenceClass::new(0, 1).unwrap(), Sign::Minus), 0);
    }

    #[test]
    fn enumerate_s_matches_is_fundamental() {
        for lambda in [Sign::Plus, Sign::Minus] {
            let cls = CongruenceClass::new(0, 1).unwrap();
            let got: Vec<i64> = enumerate_s(500.0, cls, lambda).iter().map(|d| d.value()).collect();
            let want: Vec<i64> = (1..500i64)
                .map(|t| lambda.as_i64() * t)
                .filter(|&d| is_fundamental(d))
                .collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn congruence_is_on_signed_value() {
        let cls = CongruenceClass::new(1, 3).unwrap();
        assert!(cls.contains(-5)); // -5 ≡ 1 (mod 3)
        assert!(!cls.contains(-4));
        let everything = CongruenceClass::new(0, 1).unwrap();
        assert!(everything.contains(-7) && everything.contains(7));
    }

    #[test]
    fn squarefree_helpers() {
        assert!(is_squarefree(1) && is_squarefree(-23) && is_squarefree(30));
        assert!(!is_squarefree(0) && !is_squarefree(12) && !is_squarefree(-50));
        assert_eq!(squarefree_core(75), 3);
        assert_eq!(squarefree_core(-50), -2);
        assert_eq!(squarefree_core(7), 7);
        let flags = squarefree_range(1, 1000);
        for n in 1..1000u64 {
            assert_eq!(flags[(n - 1) as usize], is_squarefree(n as i64), "{n}");
        }
    }

    #[test]
    fn fundamental_flags_match_predicate() {
        let (lo, hi) = (-500i64, 500i64);
        let flags = fundamental_flags(lo, hi);
        for d in lo..=hi {
            assert_eq!(flags[(d - lo) as usize], is_fundamental(d), "D = {d}");
        }
        // one-sided ranges
        let flags = fundamental_flags(10, 100);
        for d in 10..=100 {
            assert_eq!(flags[(d - 10) as usize], is_fundamental(d), "D = {d}");
        }
        let flags = fundamental_flags(-100, -10);
        for d in -100..=-10 {
            assert_eq!(flags[(d + 100) as usize], is_fundamental(d), "D = {d}");
        }
    }

    #[test]
    fn mod_inverse_basic() {
        assert_eq!(mod_inverse(16, 25), Some(11));
        assert_eq!(mod_inverse(4, 25).map(|v| (v * 4).rem_euclid(25)), Some(1));
        assert_eq!(mod_inverse(6, 9), None);
    }
}
