//! Witness engines: finite-height realizations of simultaneous small 3-rank
//! over T(X), the consecutive-shift corollary families, and polynomial
//! progressions a + gᵢ(d).

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, FundamentalDiscriminant};
use crate::error::{Error, Result};
use crate::family::{FamilySpec, LinearPolynomial, NormalizedFamily};
use crate::rank3;
use crate::stats::Rational;
use crate::store::RankTable;

pub const DEFAULT_WITNESS_CAP: usize = 1000;

/// Outcome of a witness scan over T(X). Densities are exact internally
/// (`witnesses_total / scanned`); the JSON carries decimals.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub witnesses: Vec<i64>,
    pub witnesses_total: u64,
    pub scanned: u64,
    pub density: f64,
    pub bound: f64,
    pub satisfied: bool,
    /// Same witness count relative to X rather than |T(X)|.
    pub density_per_x: f64,
}

impl WitnessReport {
    fn new(mut witnesses: Vec<i64>, scanned: u64, bound: Rational, x: f64, cap: usize) -> Self {
        let total = witnesses.len() as u64;
        witnesses.truncate(cap);
        let satisfied = scanned > 0
            && Rational::new(total as i64, scanned as i64) >= bound;
        WitnessReport {
            witnesses,
            witnesses_total: total,
            scanned,
            density: if scanned == 0 { 0.0 } else { total as f64 / scanned as f64 },
            bound: *bound.numer() as f64 / *bound.denom() as f64,
            satisfied,
            density_per_x: total as f64 / x,
        }
    }

    pub fn density_exact(&self) -> Option<Rational> {
        (self.scanned > 0).then(|| Rational::new(self.witnesses_total as i64, self.scanned as i64))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// The density bound 1/(3^{n+1} − 3) the witness sets are measured against.
pub fn witness_density_bound(n_rank: u32) -> Rational {
    Rational::new(1, 3i64.pow(n_rank + 1) - 3)
}

/// Scan T(X) for discriminants D whose every image has 3-rank below the
/// family's bound. `ranks` must cover all image discriminants.
pub fn theorem1_witnesses(
    spec: &FamilySpec,
    x: f64,
    ranks: &RankTable,
    cap: usize,
) -> Result<WitnessReport> {
    let fam = spec.normalize()?;
    let members = fam.members_of_t(x);
    let n = spec.n_rank();
    let mut witnesses = Vec::new();
    for &d in &members {
        if is_witness(&fam, d, n, ranks)? {
            witnesses.push(d);
        }
    }
    Ok(WitnessReport::new(
        witnesses,
        members.len() as u64,
        witness_density_bound(n),
        x,
        cap,
    ))
}

fn is_witness(fam: &NormalizedFamily, d: i64, n: u32, ranks: &RankTable) -> Result<bool> {
    for i in 0..fam.len() {
        let image = fam.image_discriminant(d, i)?;
        if ranks.rank_of(image.value())? as u32 >= n {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Closed table range [lo, hi] covering every image discriminant the family
/// can produce for D < x.
pub fn required_table_range(fam: &NormalizedFamily, x: f64) -> (i64, i64) {
    let mut lo = -1i64;
    let mut hi = 1i64;
    for p in fam.polys() {
        let bound = p.image_bound(x).ceil() as i64 + 1;
        match p.lambda() {
            arith::Sign::Plus => hi = hi.max(bound),
            arith::Sign::Minus => lo = lo.min(-bound),
        }
    }
    (lo, hi)
}

/// The consecutive-shift families: part 1 takes s = 3ⁿ − 2 shifts on the
/// negative side, part 2 takes r = 3^{n+1} − 4 shifts on the positive side.
pub fn corollary_family(n_rank: u32, part: u8) -> Result<FamilySpec> {
    if n_rank < 1 || n_rank > 12 {
        return Err(Error::InvalidRange(format!("corollary rank bound {n_rank} out of range")));
    }
    let shifts = |count: i64| -> Result<Vec<LinearPolynomial>> {
        (1..=count).map(|i| LinearPolynomial::new(1, i)).collect()
    };
    match part {
        1 => FamilySpec::new(n_rank, vec![], shifts(3i64.pow(n_rank) - 2)?),
        2 => FamilySpec::new(n_rank, shifts(3i64.pow(n_rank + 1) - 4)?, vec![]),
        other => Err(Error::InvalidRange(format!("corollary part must be 1 or 2, got {other}"))),
    }
}

pub fn corollary_witnesses(
    n_rank: u32,
    part: u8,
    x: f64,
    ranks: &RankTable,
    cap: usize,
) -> Result<WitnessReport> {
    theorem1_witnesses(&corollary_family(n_rank, part)?, x, ranks, cap)
}

/// Re-verify a reported witness from scratch: progression membership, image
/// fundamentality, and per-discriminant 3-ranks recomputed without the table.
pub fn verify_witness(spec: &FamilySpec, d: i64) -> Result<bool> {
    let fam = spec.normalize()?;
    if !fam.in_t(d, None) {
        return Ok(false);
    }
    for i in 0..fam.len() {
        let image = fam.image_discriminant(d, i)?;
        if rank3::three_rank(image)? >= spec.n_rank() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An integer-valued polynomial without constant term, stored in the
/// binomial basis: g(d) = Σ_j coeffs[j-1]·C(d, j).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerValuedPolynomial {
    coeffs: Vec<i64>,
}

impl IntegerValuedPolynomial {
    pub fn new(mut coeffs: Vec<i64>) -> Result<Self> {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidPolynomial(
                "zero polynomial: need at least one nonzero binomial coefficient".into(),
            ));
        }
        Ok(IntegerValuedPolynomial { coeffs })
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, d: i64) -> i64 {
        let mut value = 0i64;
        let mut binom = 1i64; // C(d, j), starting at j = 0
        for (j, &c) in self.coeffs.iter().enumerate() {
            let j = j as i64 + 1;
            binom = binom * (d - j + 1) / j; // exact: C(d,j-1)·(d-j+1) is divisible by j
            value += c * binom;
        }
        value
    }

    /// One polynomial per line, binomial-basis coefficients c₁ c₂ …
    pub fn parse_lines(text: &str) -> Result<Vec<Self>> {
        let mut polys = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let coeffs: Result<Vec<i64>> = line
                .split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|e| Error::Parse(format!("bad coefficient {t:?}: {e}"))))
                .collect();
            polys.push(IntegerValuedPolynomial::new(coeffs?)?);
        }
        if polys.is_empty() {
            return Err(Error::Parse("no polynomials in input".into()));
        }
        Ok(polys)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PolyProgReport {
    /// The lexicographically first witness in (d, a) order, if any.
    pub witness: Option<(i64, i64)>,
    pub scanned: u64,
}

/// Search the grid 1 ≤ d ≤ d_max (outer), 1 ≤ a ≤ a_max (inner) for the
/// first (a, d) with every a + gᵢ(d) a fundamental discriminant of 3-rank
/// below n. Ranks are computed on demand, per candidate value.
pub fn polyprog_witness(
    polys: &[IntegerValuedPolynomial],
    n_rank: u32,
    a_max: i64,
    d_max: i64,
) -> Result<PolyProgReport> {
    if polys.is_empty() || n_rank < 1 || a_max < 1 || d_max < 1 {
        return Err(Error::InvalidRange("polyprog needs polynomials, n ≥ 1 and a positive grid".into()));
    }
    let witness = (1..=d_max)
        .into_par_iter()
        .find_map_first(|d| first_a_for(polys, n_rank, a_max, d).map(|a| (a, d)));
    Ok(PolyProgReport { witness, scanned: (a_max as u64) * (d_max as u64) })
}

fn first_a_for(polys: &[IntegerValuedPolynomial], n_rank: u32, a_max: i64, d: i64) -> Option<i64> {
    let offsets: Vec<i64> = polys.iter().map(|g| g.eval(d)).collect();
    let mut rank_ok: HashMap<i64, bool> = HashMap::new();
    'outer: for a in 1..=a_max {
        for &g in &offsets {
            let v = a + g;
            let ok = *rank_ok.entry(v).or_insert_with(|| {
                FundamentalDiscriminant::new(v)
                    .map(|fd| rank3::three_rank(fd).map(|r| r < n_rank).unwrap_or(false))
                    .unwrap_or(false)
            });
            if !ok {
                continue 'outer;
            }
        }
        return Some(a);
    }
    None
}

/// From-scratch check of a polyprog witness.
pub fn verify_polyprog_witness(
    polys: &[IntegerValuedPolynomial],
    n_rank: u32,
    a: i64,
    d: i64,
) -> Result<bool> {
    for g in polys {
        let v = a + g.eval(d);
        match FundamentalDiscriminant::new(v) {
            Ok(fd) => {
                if rank3::three_rank(fd)? >= n_rank {
                    return Ok(false);
                }
            }
            Err(_) => return Ok(false),
        }
    }
    Ok(true)
}
