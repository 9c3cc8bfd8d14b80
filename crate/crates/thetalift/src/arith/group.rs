use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::mat::Mat2;
use super::ArithError;

/// The group `Γ₀(C/B) = {(a,b;c,d) ∈ SL₂(ℤ) : B | b, C | c}` with `gcd(B, C) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    pub c: u64,
    pub b: u64,
}

impl GroupSpec {
    /// `Γ₀(c/b)`.
    pub fn new(c: u64, b: u64) -> Result<Self, ArithError> {
        if c == 0 || b == 0 {
            return Err(ArithError::InvalidGroupSpec { c, b, reason: "levels must be positive" });
        }
        if c.gcd(&b) != 1 {
            return Err(ArithError::InvalidGroupSpec { c, b, reason: "levels must be coprime" });
        }
        Ok(GroupSpec { c, b })
    }

    pub fn sl2z() -> Self {
        GroupSpec { c: 1, b: 1 }
    }

    /// `Γ₀(N)`.
    pub fn gamma0(n: u64) -> Self {
        GroupSpec { c: n, b: 1 }
    }

    /// Index in `SL₂(ℤ)`, which equals the index of `Γ₀(BC)`.
    pub fn index(&self) -> u64 {
        psi(self.c * self.b)
    }

    pub(crate) fn contains_i64(&self, m: &[i64; 4]) -> bool {
        let [a, b, c, d] = *m;
        a as i128 * d as i128 - b as i128 * c as i128 == 1
            && b.rem_euclid(self.b as i64) == 0
            && c.rem_euclid(self.c as i64) == 0
    }
}

/// Dedekind psi function `N ∏_{q | N} (1 + 1/q)`.
pub(crate) fn psi(n: u64) -> u64 {
    let mut m = n;
    let mut out = n;
    let mut q = 2;
    while q * q <= m {
        if m % q == 0 {
            out = out / q * (q + 1);
            while m % q == 0 {
                m /= q;
            }
        }
        q += 1;
    }
    if m > 1 {
        out = out / m * (m + 1);
    }
    out
}

/// True iff `g` is integral with determinant 1, `B | b` and `C | c`.
pub fn in_group(g: &Mat2, spec: &GroupSpec) -> bool {
    let Some([_, b, c, _]) = g.int_entries() else {
        return false;
    };
    g.det().is_one()
        && (b % BigInt::from(spec.b)).is_zero()
        && (c % BigInt::from(spec.c)).is_zero()
}

fn inv_i64(m: &[i64; 4]) -> [i64; 4] {
    [m[3], -m[1], -m[2], m[0]]
}

fn mul_i64(x: &[i64; 4], y: &[i64; 4]) -> Option<[i64; 4]> {
    let e = |p: i64, q: i64, r: i64, s: i64| p.checked_mul(q)?.checked_add(r.checked_mul(s)?);
    Some([
        e(x[0], y[0], x[1], y[2])?,
        e(x[0], y[1], x[1], y[3])?,
        e(x[2], y[0], x[3], y[2])?,
        e(x[2], y[1], x[3], y[3])?,
    ])
}

/// Solve `a d - b c = 1` for coprime `(c, d)`.
fn complete_bottom_row(c: i64, d: i64) -> [i64; 4] {
    if c == 1 {
        return [0, -1, 1, d];
    }
    let e = d.extended_gcd(&c);
    debug_assert_eq!(e.gcd.abs(), 1);
    let (x, y) = if e.gcd == 1 { (e.x, e.y) } else { (-e.x, -e.y) };
    // d*x + c*y = 1, so a = x, b = -y
    [x, -y, c, d]
}

/// Canonical representative of `(c : d)` in `P¹(ℤ/N)`.
fn p1_canonical(c: i64, d: i64, n: i64, units: &[i64]) -> (i64, i64) {
    units
        .iter()
        .map(|u| ((u * c).rem_euclid(n), (u * d).rem_euclid(n)))
        .min()
        .expect("unit group is nonempty")
}

/// Representatives of `Γ₀(N) \ SL₂(ℤ)`, indexed by bottom rows on `P¹(ℤ/N)`.
///
/// For prime `p` the list is the identity followed by `(0,-1;1,t)`, `t = 0..p-1`.
pub fn coset_reps(n: u64) -> Result<Vec<Mat2>, ArithError> {
    if n == 0 {
        return Err(ArithError::InvalidGroupSpec { c: 0, b: 1, reason: "level must be positive" });
    }
    if n == 1 {
        return Ok(vec![Mat2::identity()]);
    }
    let ni = n as i64;
    let units: Vec<i64> = (1..ni).filter(|u| u.gcd(&ni) == 1).collect();
    let mut points = BTreeSet::new();
    for c in 0..ni {
        for d in 0..ni {
            if c.gcd(&d).gcd(&ni) == 1 {
                points.insert(p1_canonical(c, d, ni, &units));
            }
        }
    }
    let expected = psi(n) as usize;
    if points.len() != expected {
        return Err(ArithError::CosetCertificate {
            level: n,
            reason: format!("{} points on P¹, expected {expected}", points.len()),
        });
    }
    let mut ordered: Vec<(i64, i64)> = points.into_iter().collect();
    // (0 : 1) first so the identity leads
    ordered.sort_by_key(|&(c, d)| (c != 0, c, d));
    let mut reps = Vec::with_capacity(expected);
    for (c, d) in ordered {
        if c == 0 {
            reps.push([1, 0, 0, 1]);
            continue;
        }
        let mut dd = d;
        while c.gcd(&dd) != 1 {
            dd += ni;
        }
        reps.push(complete_bottom_row(c, dd));
    }
    let spec = GroupSpec::gamma0(n);
    for i in 0..reps.len() {
        for j in 0..i {
            let q = mul_i64(&reps[i], &inv_i64(&reps[j]));
            if q.is_some_and(|q| spec.contains_i64(&q)) {
                return Err(ArithError::CosetCertificate {
                    level: n,
                    reason: format!("representatives {j} and {i} share a coset"),
                });
            }
        }
    }
    Ok(reps.into_iter().map(|m| Mat2::from_ints(m[0], m[1], m[2], m[3])).collect())
}

/// Right cosets `Γ g` of a congruence subgroup, enumerated by breadth-first
/// search over the generators `S = (0,-1;1,0)` and `T = (1,1;0,1)`.
#[derive(Clone, Debug)]
pub struct CosetTable {
    pub spec: GroupSpec,
    reps: Vec<[i64; 4]>,
    /// `s_next[i] = j` iff `Γ g_i S = Γ g_j`.
    pub s_next: Vec<usize>,
    /// `t_next[i] = j` iff `Γ g_i T = Γ g_j`.
    pub t_next: Vec<usize>,
}

const S_GEN: [i64; 4] = [0, -1, 1, 0];
const T_GEN: [i64; 4] = [1, 1, 0, 1];

impl CosetTable {
    pub fn build(spec: GroupSpec) -> Result<Self, ArithError> {
        let target = spec.index() as usize;
        let mut reps: Vec<[i64; 4]> = vec![[1, 0, 0, 1]];
        let mut s_next = vec![usize::MAX];
        let mut t_next = vec![usize::MAX];
        let mut queue = VecDeque::from([0usize]);
        let overflow = || ArithError::CosetCertificate {
            level: spec.c * spec.b,
            reason: "entry overflow during enumeration".into(),
        };
        while let Some(i) = queue.pop_front() {
            for (gen, is_s) in [(S_GEN, true), (T_GEN, false)] {
                let g = mul_i64(&reps[i], &gen).ok_or_else(overflow)?;
                let mut found = None;
                for (k, r) in reps.iter().enumerate() {
                    let q = mul_i64(&g, &inv_i64(r)).ok_or_else(overflow)?;
                    if spec.contains_i64(&q) {
                        found = Some(k);
                        break;
                    }
                }
                let k = match found {
                    Some(k) => k,
                    None => {
                        reps.push(g);
                        s_next.push(usize::MAX);
                        t_next.push(usize::MAX);
                        queue.push_back(reps.len() - 1);
                        reps.len() - 1
                    }
                };
                if is_s {
                    s_next[i] = k;
                } else {
                    t_next[i] = k;
                }
            }
            if reps.len() > target {
                return Err(ArithError::CosetCertificate {
                    level: spec.c * spec.b,
                    reason: format!("more than {target} cosets found"),
                });
            }
        }
        if reps.len() != target {
            return Err(ArithError::CosetCertificate {
                level: spec.c * spec.b,
                reason: format!("{} cosets found, expected {target}", reps.len()),
            });
        }
        Ok(CosetTable { spec, reps, s_next, t_next })
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn reps(&self) -> Vec<Mat2> {
        self.reps.iter().map(|m| Mat2::from_ints(m[0], m[1], m[2], m[3])).collect()
    }

    pub fn rep_i64(&self, i: usize) -> [i64; 4] {
        self.reps[i]
    }

    /// Index of the coset containing `g ∈ SL₂(ℤ)`.
    pub fn index_of(&self, g: &Mat2) -> Option<usize> {
        let g = g.i64_entries()?;
        self.reps.iter().position(|r| {
            mul_i64(&g, &inv_i64(r)).is_some_and(|q| self.spec.contains_i64(&q))
        })
    }

    /// Orbits of right multiplication by `T`; each orbit is one cusp and its
    /// length is the cusp width.
    pub fn t_orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut orbits = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start] = true;
            let mut k = self.t_next[start];
            while k != start {
                seen[k] = true;
                orbit.push(k);
                k = self.t_next[k];
            }
            orbits.push(orbit);
        }
        orbits
    }
}
