//! GL₂(ℤ) machinery for binary cubic forms: unimodular transforms,
//! irreducibility over ℚ, and partitioning a set of equal-discriminant forms
//! into equivalence classes.

use std::collections::{BTreeSet, HashSet, VecDeque};

use super::BinaryCubicForm;

/// Hard ceiling on BFS states per component. The capped orbit piece of a small
/// form is tiny in practice; hitting this means the dedup assumptions broke.
const BFS_STATE_LIMIT: usize = 1 << 20;

impl BinaryCubicForm {
    /// (x, y) -> (y, x)
    pub(crate) fn swapped(self) -> Self {
        BinaryCubicForm::new(self.d, self.c, self.b, self.a)
    }

    /// (x, y) -> (x + t·y, y)
    pub(crate) fn translated_x(self, t: i64) -> Self {
        let BinaryCubicForm { a, b, c, d } = self;
        BinaryCubicForm::new(
            a,
            3 * a * t + b,
            3 * a * t * t + 2 * b * t + c,
            a * t * t * t + b * t * t + c * t + d,
        )
    }

    /// (x, y) -> (x, t·x + y)
    pub(crate) fn translated_y(self, t: i64) -> Self {
        let BinaryCubicForm { a, b, c, d } = self;
        BinaryCubicForm::new(
            a + b * t + c * t * t + d * t * t * t,
            b + 2 * c * t + 3 * d * t * t,
            c + 3 * d * t,
            d,
        )
    }

    /// (x, y) -> (-x, -y), i.e. F -> -F
    pub(crate) fn negated(self) -> Self {
        BinaryCubicForm::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub(crate) fn max_abs(self) -> i64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }
}

fn neighbors(f: BinaryCubicForm) -> [BinaryCubicForm; 6] {
    [
        f.swapped(),
        f.translated_x(1),
        f.translated_x(-1),
        f.translated_y(1),
        f.translated_y(-1),
        f.negated(),
    ]
}

/// Real roots of a·x³ + b·x² + c·x + d (a ≠ 0). Returns up to three.
fn real_roots(a: i64, b: i64, c: i64, d: i64) -> Vec<f64> {
    let (a, b, c, d) = (a as f64, b as f64, c as f64, d as f64);
    // depressed cubic t³ + p·t + q with x = t - b/(3a)
    let shift = b / (3.0 * a);
    let p = c / a - (b * b) / (3.0 * a * a);
    let q = (2.0 * b * b * b) / (27.0 * a * a * a) - (b * c) / (3.0 * a * a) + d / a;
    let disc = -4.0 * p * p * p - 27.0 * q * q;
    let mut roots = Vec::with_capacity(3);
    if disc > 0.0 {
        // three real roots, trigonometric form (p < 0 here)
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p)) * (-3.0 / p).sqrt();
        let phi = arg.clamp(-1.0, 1.0).acos() / 3.0;
        for k in 0..3 {
            roots.push(m * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift);
        }
    } else {
        let half_q = q / 2.0;
        let s = (half_q * half_q + p * p * p / 27.0).max(0.0).sqrt();
        let t = (-half_q + s).cbrt() + (-half_q - s).cbrt();
        roots.push(t - shift);
    }
    roots
}

fn divisors(n: i64) -> Vec<i64> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            out.push(i);
            if i != n / i {
                out.push(n / i);
            }
        }
        i += 1;
    }
    out
}

/// Irreducibility over ℚ. A linear factor means a rational root (p : q) with
/// q | a and p | d; float roots locate the candidates, exact evaluation
/// decides.
pub fn is_irreducible(f: &BinaryCubicForm) -> bool {
    if f.a == 0 || f.d == 0 {
        return false;
    }
    let roots = real_roots(f.a, f.b, f.c, f.d);
    for q in divisors(f.a) {
        for &x in &roots {
            let guess = (x * q as f64).round() as i64;
            for p in guess - 1..=guess + 1 {
                if f.eval(p, q) == 0 {
                    return false;
                }
            }
        }
    }
    true
}

/// Number of GL₂(ℤ)-classes among `forms`, which must all share one nonzero
/// discriminant. Partitioning is by breadth-first search over the generator
/// moves, capped in coefficient size; the cap is generous relative to the
/// inputs and its sufficiency is pinned by the oracle-agreement tests.
pub fn class_count(forms: &[BinaryCubicForm]) -> usize {
    let mut members: BTreeSet<BinaryCubicForm> = forms.iter().copied().collect();
    if members.len() <= 1 {
        return members.len();
    }
    debug_assert!({
        let d0 = forms[0].discriminant();
        forms.iter().all(|f| f.discriminant() == d0)
    });
    let cap = members.iter().map(|f| f.max_abs()).max().unwrap() * 4 + 64;
    let mut classes = 0;
    while let Some(&seed) = members.iter().next() {
        members.remove(&seed);
        classes += 1;
        if members.is_empty() {
            break;
        }
        let mut visited: HashSet<BinaryCubicForm> = HashSet::new();
        let mut queue = VecDeque::new();
        visited.insert(seed);
        queue.push_back(seed);
        'bfs: while let Some(f) = queue.pop_front() {
            for g in neighbors(f) {
                if g.max_abs() > cap || !visited.insert(g) {
                    continue;
                }
                members.remove(&g);
                if members.is_empty() {
                    break 'bfs;
                }
                queue.push_back(g);
            }
            assert!(
                visited.len() < BFS_STATE_LIMIT,
                "class BFS exceeded {BFS_STATE_LIMIT} states at disc {}",
                seed.discriminant()
            );
        }
    }
    classes
}

/// Whether two forms are GL₂(ℤ)-equivalent (test support; same capped BFS).
pub fn equivalent(f: &BinaryCubicForm, g: &BinaryCubicForm) -> bool {
    f.discriminant() == g.discriminant() && class_count(&[*f, *g]) == 1
}
