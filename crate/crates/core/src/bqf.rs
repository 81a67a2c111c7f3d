//! Independent ground truth for D < 0: the full class group via reduced
//! positive-definite binary quadratic forms and Gauss composition, with
//! direct 3-torsion counting.
//!
//! Deliberately plain: composition is textbook Gauss/Dirichlet followed by
//! reduction, and 3-torsion is counted by cubing every class. Desk-scale
//! discriminants (|D| up to ~10⁶) need nothing faster.

use crate::arith::FundamentalDiscriminant;
use crate::error::{Error, Result};

/// A positive-definite integral binary quadratic form ax² + bxy + cy².
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadraticForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        QuadraticForm { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// |b| ≤ a ≤ c, with b ≥ 0 on the boundary |b| = a or a = c.
    pub fn is_reduced(&self) -> bool {
        let QuadraticForm { a, b, c } = *self;
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// The principal (identity) form of discriminant `d < 0`.
    pub fn principal(d: i64) -> Self {
        debug_assert!(d < 0);
        if d.rem_euclid(4) == 0 {
            QuadraticForm::new(1, 0, -d / 4)
        } else {
            QuadraticForm::new(1, 1, (1 - d) / 4)
        }
    }

    /// The inverse class is represented by (a, -b, c).
    pub fn inverse(&self) -> Self {
        QuadraticForm::new(self.a, -self.b, self.c).reduce()
    }

    /// Canonical reduced representative of the class (positive definite only).
    pub fn reduce(&self) -> Self {
        let (mut a, mut b, mut c) = (self.a, self.b, self.c);
        debug_assert!(self.discriminant() < 0 && a > 0);
        loop {
            if c < a {
                std::mem::swap(&mut a, &mut c);
                b = -b;
            }
            if b.abs() > a {
                // translate b into (-a, a]
                let two_a = 2 * a;
                let r = b.rem_euclid(two_a);
                let new_b = if r > a { r - two_a } else { r };
                c += (new_b * new_b - b * b) / (4 * a);
                b = new_b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            if b == -a {
                b = a;
            }
            if c >= a {
                break;
            }
        }
        QuadraticForm::new(a, b, c)
    }
}

impl std::fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// gcd(a, b, c) = u·a + v·b + w·c
fn ext_gcd3(a: i64, b: i64, c: i64) -> (i64, i64, i64, i64) {
    let (g1, u1, v1) = ext_gcd(a, b);
    let (g, u2, w) = ext_gcd(g1, c);
    (g, u2 * u1, u2 * v1, w)
}

/// Gauss composition: the reduced representative of the product class.
pub fn compose(f: &QuadraticForm, g: &QuadraticForm) -> Result<QuadraticForm> {
    let d = f.discriminant();
    if d != g.discriminant() {
        return Err(Error::DiscriminantMismatch(d, g.discriminant()));
    }
    let s = (f.b + g.b) / 2;
    let n = (f.b - g.b) / 2;
    let (e, _u, v, w) = ext_gcd3(f.a, g.a, s);
    let a3 = (f.a / e) * (g.a / e);
    let two_a3 = 2 * a3;
    // b3 ≡ g.b + 2(g.a/e)(v·n − w·g.c)  (mod 2a3)
    let shift = (v as i128 * n as i128 - w as i128 * g.c as i128)
        .rem_euclid(two_a3 as i128) as i64;
    let b3 = (g.b as i128 + 2 * (g.a / e) as i128 * shift as i128).rem_euclid(two_a3 as i128) as i64;
    let c3 = ((b3 as i128 * b3 as i128 - d as i128) / (4 * a3 as i128)) as i64;
    Ok(QuadraticForm::new(a3, b3, c3).reduce())
}

fn cube(f: &QuadraticForm) -> Result<QuadraticForm> {
    compose(&compose(f, f)?, f)
}

/// Every reduced form of fundamental discriminant `d < 0`, sorted by (a, b).
/// The count is the class number h(d).
pub fn reduced_forms(d: FundamentalDiscriminant) -> Result<Vec<QuadraticForm>> {
    let dv = d.value();
    if dv >= 0 {
        return Err(Error::InvalidRange(format!(
            "class-group oracle handles D < 0 only, got {dv}"
        )));
    }
    let mut forms = Vec::new();
    let a_max = ((-dv) as u64 / 3).isqrt() as i64;
    for a in 1..=a_max {
        // b ≡ D (mod 2), -a < b ≤ a
        let mut b = -a + 1;
        if (b - dv).rem_euclid(2) != 0 {
            b += 1;
        }
        while b <= a {
            let num = b * b - dv;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                if c >= a && (b >= 0 || (b.abs() != a && a != c)) {
                    let f = QuadraticForm::new(a, b, c);
                    debug_assert!(f.is_reduced());
                    // fundamental discriminants only carry primitive forms
                    debug_assert_eq!(gcd3(a, b, c), 1);
                    forms.push(f);
                }
            }
            b += 2;
        }
    }
    forms.sort();
    Ok(forms)
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    num_integer::gcd(num_integer::gcd(a.abs(), b.abs()), c.abs())
}

/// log₃ of the number of classes killed by cubing, i.e. the 3-rank of the
/// class group of ℚ(√D) for fundamental D < 0.
pub fn oracle_three_rank(d: FundamentalDiscriminant) -> Result<u32> {
    let forms = reduced_forms(d)?;
    let id = QuadraticForm::principal(d.value());
    debug_assert!(forms.contains(&id));
    let mut torsion = 0u64;
    for f in &forms {
        if cube(f)? == id {
            torsion += 1;
        }
    }
    let mut r = 0u32;
    let mut pow = 1u64;
    while pow < torsion {
        pow *= 3;
        r += 1;
    }
    assert_eq!(pow, torsion, "3-torsion count {torsion} is not a power of 3 at D = {d}");
    Ok(r)
}
