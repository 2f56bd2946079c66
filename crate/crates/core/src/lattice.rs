//! Integer solutions of `a² + b² + c² + d² = n` and exact synthesis.
//!
//! Every primitive solution of norm `5^t` is, up to sign, the value of
//! exactly one word `prefix · s_{i1} ⋯ s_{it}`; [`exact_synthesis`] recovers
//! that word by peeling norm-5 right factors.

use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quat::{pow5, LipschitzQuaternion, MAX_HEIGHT};
use crate::words::{
    enumerate_shells_with_budget, GateSet, GateWord, Generator, Prefix, DEFAULT_MAX_POINTS,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeShell {
    pub n: u64,
    pub primitive_only: bool,
    /// Sign-canonical, sorted.
    pub points: Vec<LipschitzQuaternion>,
}

/// Jacobi's `r₄(n) = 8 Σ_{d | n, 4 ∤ d} d`, counting signed solutions.
pub fn four_square_count(n: u64) -> u128 {
    if n == 0 {
        return 1;
    }
    let mut sum: u128 = 0;
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let e = n / d;
            if !d.is_multiple_of(4) {
                sum += d as u128;
            }
            if e != d && !e.is_multiple_of(4) {
                sum += e as u128;
            }
        }
        d += 1;
    }
    8 * sum
}

/// Every canonical arrangement (permutation and signs) of the magnitudes in `m`.
fn push_arrangements(m: [i64; 4], primitive_only: bool, out: &mut Vec<LipschitzQuaternion>) {
    if primitive_only && m.iter().all(|x| x % 5 == 0) {
        return;
    }
    let mut perms: Vec<[i64; 4]> = Vec::with_capacity(24);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                if i == j || j == k || i == k {
                    continue;
                }
                let l = 6 - i - j - k;
                let p = [m[i], m[j], m[k], m[l]];
                if !perms.contains(&p) {
                    perms.push(p);
                }
            }
        }
    }
    for p in perms {
        let lead = match p.iter().position(|&x| x != 0) {
            Some(i) => i,
            None => continue,
        };
        let free: Vec<usize> = (lead + 1..4).filter(|&i| p[i] != 0).collect();
        for mask in 0..(1u32 << free.len()) {
            let mut v = p;
            for (bit, &i) in free.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    v[i] = -v[i];
                }
            }
            out.push(LipschitzQuaternion::from_coords(v));
        }
    }
}

/// All sign-canonical integer solutions of norm `n`, optionally restricted
/// to `gcd(a, b, c, d, 5) = 1`.
pub fn enumerate_nu(n: u64, primitive_only: bool) -> Result<LatticeShell> {
    enumerate_nu_with_budget(n, primitive_only, DEFAULT_MAX_POINTS)
}

pub fn enumerate_nu_with_budget(
    n: u64,
    primitive_only: bool,
    max_points: u128,
) -> Result<LatticeShell> {
    if n == 0 {
        return Err(Error::Contract("norm must be positive".into()));
    }
    let expected = four_square_count(n) / 2;
    if expected > max_points {
        return Err(Error::Budget {
            what: "lattice points",
            requested: expected,
            limit: max_points,
        });
    }
    let mut points = Vec::with_capacity(expected as usize);
    // magnitudes in non-increasing order x0 >= x1 >= x2 >= x3 >= 0
    let top = n.isqrt();
    let low = (n.div_ceil(4)).isqrt();
    for x0 in low..=top {
        let r0 = n - x0 * x0;
        for x1 in 0..=x0.min(r0.isqrt()) {
            let r1 = r0 - x1 * x1;
            if r1 > 2 * x1 * x1 {
                continue;
            }
            for x2 in 0..=x1.min(r1.isqrt()) {
                let r2 = r1 - x2 * x2;
                let x3 = r2.isqrt();
                if x3 * x3 == r2 && x3 <= x2 {
                    push_arrangements(
                        [x0 as i64, x1 as i64, x2 as i64, x3 as i64],
                        primitive_only,
                        &mut points,
                    );
                }
            }
        }
    }
    points.sort_unstable();
    Ok(LatticeShell {
        n,
        primitive_only,
        points,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShellComparison {
    pub h: u32,
    pub from_words: usize,
    pub from_lattice: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BijectionReport {
    pub t: u32,
    pub shells: Vec<ShellComparison>,
    pub total: usize,
}

/// Checks that the evaluated words of `V_Ω(t)` are exactly the primitive
/// solutions of norm `5^h`, `h ≤ t`, taken modulo sign.
pub fn bijection_check(t: u32) -> Result<BijectionReport> {
    let words = enumerate_shells_with_budget(GateSet::T, t, DEFAULT_MAX_POINTS)?;
    let mut shells = Vec::new();
    let mut word_side: FxHashSet<LipschitzQuaternion> = FxHashSet::default();
    let mut lattice_side: FxHashSet<LipschitzQuaternion> = FxHashSet::default();
    for shell in &words {
        let lattice = enumerate_nu(pow5(shell.t) as u64, true)?;
        shells.push(ShellComparison {
            h: shell.t,
            from_words: shell.elements.len(),
            from_lattice: lattice.points.len(),
        });
        word_side.extend(shell.elements.iter().copied());
        lattice_side.extend(lattice.points);
    }
    if word_side != lattice_side {
        let mut only_words: Vec<_> = word_side.difference(&lattice_side).copied().collect();
        let mut only_lattice: Vec<_> = lattice_side.difference(&word_side).copied().collect();
        only_words.sort_unstable();
        only_lattice.sort_unstable();
        let show = |v: &[LipschitzQuaternion]| {
            v.iter()
                .take(10)
                .map(|q| q.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        return Err(Error::Mismatch(format!(
            "t = {t}: {} only from words [{}], {} only from lattice [{}]",
            only_words.len(),
            show(&only_words),
            only_lattice.len(),
            show(&only_lattice)
        )));
    }
    Ok(BijectionReport {
        t,
        shells,
        total: word_side.len(),
    })
}

/// Factors a primitive quaternion of norm `5^t` into `prefix · s_{i1} ⋯ s_{it}`.
///
/// Each step right-divides by the first generator `g` (in
/// [`Generator::S_TYPE`] order) with `p · conj(g) ≡ 0 (mod 5)`.
pub fn exact_synthesis(p: &LipschitzQuaternion) -> Result<GateWord> {
    let t = p
        .height_of_norm()
        .ok_or_else(|| Error::Contract(format!("N{p} = {} is not a power of 5", p.norm())))?;
    if t > MAX_HEIGHT {
        return Err(Error::Contract(format!("height {t} exceeds {MAX_HEIGHT}")));
    }
    if !p.is_primitive() {
        return Err(Error::Contract(format!("{p} is divisible by 5")));
    }
    let mut rest = *p;
    let mut peeled = Vec::with_capacity(t as usize);
    for step in 0..t {
        let before = rest.norm();
        let next = Generator::S_TYPE.into_iter().find_map(|g| {
            rest.checked_mul(&g.quaternion().conj())
                .ok()
                .and_then(|r| r.div_exact(5))
                .map(|r| (g, r))
        });
        let (g, r) = next.ok_or_else(|| {
            Error::Internal(format!("no norm-5 right factor of {rest} at step {step}"))
        })?;
        if r.norm() * 5 != before {
            return Err(Error::Internal(format!("norm did not drop by 5 at step {step}")));
        }
        peeled.push(g);
        rest = r;
    }
    let prefix = Prefix::from_unit(&rest)
        .ok_or_else(|| Error::Internal(format!("remaining factor {rest} is not a unit")))?;
    peeled.reverse();
    GateWord::new(prefix, peeled)
}
