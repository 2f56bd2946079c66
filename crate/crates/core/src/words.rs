//! Generator sets S and T, reduced words, and exact shell enumeration.
//!
//! Quaternion table (matches the matrix definitions of the generators under
//! [`crate::quat::to_su2`]):
//!
//! | symbol | quaternion |
//! |--------|------------|
//! | iX     | i          |
//! | iY     | k          |
//! | iZ     | j          |
//! | s1^±1  | 1 ± 2i     |
//! | s2^±1  | 1 ± 2k     |
//! | s3^±1  | 1 ± 2j     |

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{LipschitzQuaternion, MAX_HEIGHT};

/// Default cap on the number of elements any exhaustive enumeration may hold.
pub const DEFAULT_MAX_POINTS: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    I,
    J,
    K,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    S1,
    S1Inv,
    S2,
    S2Inv,
    S3,
    S3Inv,
    IX,
    IY,
    IZ,
}

impl Generator {
    /// The weight-1 generators in synthesis trial order.
    pub const S_TYPE: [Generator; 6] = [
        Generator::S1,
        Generator::S1Inv,
        Generator::S2,
        Generator::S2Inv,
        Generator::S3,
        Generator::S3Inv,
    ];

    pub const ALL: [Generator; 9] = [
        Generator::S1,
        Generator::S1Inv,
        Generator::S2,
        Generator::S2Inv,
        Generator::S3,
        Generator::S3Inv,
        Generator::IX,
        Generator::IY,
        Generator::IZ,
    ];

    pub fn weight(self) -> u32 {
        if self.is_pauli() {
            0
        } else {
            1
        }
    }

    pub fn is_pauli(self) -> bool {
        matches!(self, Generator::IX | Generator::IY | Generator::IZ)
    }

    /// Inverse in PSU(2); the Pauli-type symbols are involutions there.
    pub fn inverse(self) -> Generator {
        use Generator::*;
        match self {
            S1 => S1Inv,
            S1Inv => S1,
            S2 => S2Inv,
            S2Inv => S2,
            S3 => S3Inv,
            S3Inv => S3,
            p => p,
        }
    }

    pub fn axis(self) -> Axis {
        use Generator::*;
        match self {
            S1 | S1Inv | IX => Axis::I,
            S2 | S2Inv | IY => Axis::K,
            S3 | S3Inv | IZ => Axis::J,
        }
    }

    pub fn quaternion(self) -> LipschitzQuaternion {
        use Generator::*;
        let sign = match self {
            S1Inv | S2Inv | S3Inv => -2,
            S1 | S2 | S3 => 2,
            _ => 1,
        };
        let real = i64::from(!self.is_pauli());
        match self.axis() {
            Axis::I => LipschitzQuaternion::new(real, sign, 0, 0),
            Axis::J => LipschitzQuaternion::new(real, 0, sign, 0),
            Axis::K => LipschitzQuaternion::new(real, 0, 0, sign),
        }
    }

    /// `P⁻¹ g P` for a Pauli-type `P`: unchanged on the same axis, inverted otherwise.
    fn conjugate_by(self, pauli: Axis) -> Generator {
        if self.axis() == pauli {
            self
        } else {
            self.inverse()
        }
    }

    pub fn name(self) -> &'static str {
        use Generator::*;
        match self {
            S1 => "s1",
            S1Inv => "s1inv",
            S2 => "s2",
            S2Inv => "s2inv",
            S3 => "s3",
            S3Inv => "s3inv",
            IX => "iX",
            IY => "iY",
            IZ => "iZ",
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Generator::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown generator {s:?}")))
    }
}

/// Weight-0 left factor of a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Prefix {
    I,
    IX,
    IY,
    IZ,
}

impl Prefix {
    pub const ALL: [Prefix; 4] = [Prefix::I, Prefix::IX, Prefix::IY, Prefix::IZ];

    pub fn quaternion(self) -> LipschitzQuaternion {
        match self {
            Prefix::I => LipschitzQuaternion::ONE,
            Prefix::IX => LipschitzQuaternion::I,
            Prefix::IY => LipschitzQuaternion::K,
            Prefix::IZ => LipschitzQuaternion::J,
        }
    }

    fn axis(self) -> Option<Axis> {
        match self {
            Prefix::I => None,
            Prefix::IX => Some(Axis::I),
            Prefix::IY => Some(Axis::K),
            Prefix::IZ => Some(Axis::J),
        }
    }

    fn from_axis(axis: Option<Axis>) -> Prefix {
        match axis {
            None => Prefix::I,
            Some(Axis::I) => Prefix::IX,
            Some(Axis::K) => Prefix::IY,
            Some(Axis::J) => Prefix::IZ,
        }
    }

    /// Product modulo sign: the Klein four-group.
    pub fn mul(self, other: Prefix) -> Prefix {
        match (self.axis(), other.axis()) {
            (None, b) => Prefix::from_axis(b),
            (a, None) => Prefix::from_axis(a),
            (Some(a), Some(b)) if a == b => Prefix::I,
            (Some(a), Some(b)) => {
                let third = [Axis::I, Axis::J, Axis::K]
                    .into_iter()
                    .find(|&c| c != a && c != b);
                Prefix::from_axis(third)
            }
        }
    }

    /// Recognizes a norm-1 quaternion (any sign).
    pub fn from_unit(q: &LipschitzQuaternion) -> Option<Prefix> {
        let c = q.canonical();
        Prefix::ALL.into_iter().find(|p| p.quaternion() == c)
    }

    pub fn name(self) -> &'static str {
        match self {
            Prefix::I => "I",
            Prefix::IX => "iX",
            Prefix::IY => "iY",
            Prefix::IZ => "iZ",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateSet {
    S,
    T,
}

impl GateSet {
    pub fn prefixes(self) -> &'static [Prefix] {
        match self {
            GateSet::S => &Prefix::ALL[..1],
            GateSet::T => &Prefix::ALL,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateSet::S => "S",
            GateSet::T => "T",
        }
    }
}

impl FromStr for GateSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "s" => Ok(GateSet::S),
            "T" | "t" => Ok(GateSet::T),
            _ => Err(Error::Validation(format!("unknown gate set {s:?}"))),
        }
    }
}

impl fmt::Display for GateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `prefix · body[0] · body[1] ⋯`, with a reduced body of weight-1 symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateWord {
    prefix: Prefix,
    body: Vec<Generator>,
}

impl GateWord {
    pub fn identity() -> Self {
        GateWord {
            prefix: Prefix::I,
            body: Vec::new(),
        }
    }

    pub fn new(prefix: Prefix, body: Vec<Generator>) -> Result<Self> {
        if let Some(g) = body.iter().find(|g| g.is_pauli()) {
            return Err(Error::Validation(format!("{g} cannot appear in a word body")));
        }
        if let Some(w) = body.windows(2).find(|w| w[1] == w[0].inverse()) {
            return Err(Error::Validation(format!(
                "body is not reduced: {} {}",
                w[0], w[1]
            )));
        }
        if body.len() > MAX_HEIGHT as usize {
            return Err(Error::Overflow(format!(
                "height {} exceeds {MAX_HEIGHT}",
                body.len()
            )));
        }
        Ok(GateWord { prefix, body })
    }

    pub fn prefix(&self) -> Prefix {
        self.prefix
    }

    pub fn body(&self) -> &[Generator] {
        &self.body
    }

    /// Sum of generator weights, i.e. the body length.
    pub fn height(&self) -> u32 {
        self.body.len() as u32
    }

    /// Symbols in order, prefix included unless it is `I`.
    pub fn symbols(&self) -> Vec<Generator> {
        let lead = match self.prefix {
            Prefix::I => None,
            Prefix::IX => Some(Generator::IX),
            Prefix::IY => Some(Generator::IY),
            Prefix::IZ => Some(Generator::IZ),
        };
        lead.into_iter().chain(self.body.iter().copied()).collect()
    }
}

/// Words order by height, then prefix, then body symbol by symbol.
impl Ord for GateWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.body
            .len()
            .cmp(&other.body.len())
            .then(self.prefix.cmp(&other.prefix))
            .then_with(|| self.body.cmp(&other.body))
    }
}

impl PartialOrd for GateWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Space-separated symbols; the identity word prints as the empty string.
impl fmt::Display for GateWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.symbols().iter().map(|g| g.name()).collect();
        f.write_str(&names.join(" "))
    }
}

impl FromStr for GateWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let seq = s
            .split_whitespace()
            .map(Generator::from_str)
            .collect::<Result<Vec<_>>>()?;
        reduce_word(&seq)
    }
}

/// Normalizes any generator sequence: Pauli-type symbols are moved to a
/// single left prefix (signs dropped) and inverse pairs are cancelled.
pub fn reduce_word(seq: &[Generator]) -> Result<GateWord> {
    let mut prefix = Prefix::I;
    let mut body: Vec<Generator> = Vec::with_capacity(seq.len());
    for &g in seq {
        if g.is_pauli() {
            // prefix · body · P = (prefix · P) · (P⁻¹ body P)
            for b in body.iter_mut() {
                *b = b.conjugate_by(g.axis());
            }
            prefix = prefix.mul(Prefix::from_axis(Some(g.axis())));
        } else if body.last() == Some(&g.inverse()) {
            body.pop();
        } else {
            body.push(g);
        }
    }
    GateWord::new(prefix, body)
}

/// Integer quaternion of a word, norm `5^height`, sign-canonical.
pub fn evaluate_word(w: &GateWord) -> LipschitzQuaternion {
    w.body
        .iter()
        .try_fold(w.prefix.quaternion(), |acc, g| acc.checked_mul(&g.quaternion()))
        .expect("height is bounded by MAX_HEIGHT")
        .canonical()
}

/// All elements of exact height `t` for one gate set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationShell {
    pub t: u32,
    pub gate_set: GateSet,
    /// Sign-canonical, sorted.
    pub elements: Vec<LipschitzQuaternion>,
}

/// `(|U(t)|, |V(t)|)` for generators of norm `q`: `|U(t)| = (q+1) q^{t-1}`
/// and `|V(t)| = ((q+1) q^t - 2)/(q-1)` for `t ≥ 1`, both 1 at `t = 0`;
/// multiplied by 4 for the Pauli-extended set.
pub fn count_closed_form_q(q: u128, gate_set: GateSet, t: u32) -> (u128, u128) {
    let (u, v) = if t == 0 {
        (1, 1)
    } else {
        let qt = q.pow(t);
        ((q + 1) * q.pow(t - 1), ((q + 1) * qt - 2) / (q - 1))
    };
    match gate_set {
        GateSet::S => (u, v),
        GateSet::T => (4 * u, 4 * v),
    }
}

pub fn count_closed_form(gate_set: GateSet, t: u32) -> (u128, u128) {
    count_closed_form_q(5, gate_set, t)
}

/// Breadth-first enumeration of every height `0..=t_max`, verifying that no
/// two reduced words collapse onto the same element.
pub fn enumerate_shells(gate_set: GateSet, t_max: u32) -> Result<Vec<EnumerationShell>> {
    enumerate_shells_with_budget(gate_set, t_max, DEFAULT_MAX_POINTS)
}

pub fn enumerate_shells_with_budget(
    gate_set: GateSet,
    t_max: u32,
    max_points: u128,
) -> Result<Vec<EnumerationShell>> {
    if t_max > MAX_HEIGHT {
        return Err(Error::Budget {
            what: "height",
            requested: t_max as u128,
            limit: MAX_HEIGHT as u128,
        });
    }
    let (_, total) = count_closed_form(gate_set, t_max);
    if total > max_points {
        return Err(Error::Budget {
            what: "enumerated elements",
            requested: total,
            limit: max_points,
        });
    }

    let mut shells = Vec::with_capacity(t_max as usize + 1);
    // S-words of the current height with their last symbol
    let mut frontier: Vec<(LipschitzQuaternion, Option<Generator>)> =
        vec![(LipschitzQuaternion::ONE, None)];
    for t in 0..=t_max {
        if t > 0 {
            frontier = frontier
                .par_iter()
                .flat_map_iter(|&(q, last)| {
                    Generator::S_TYPE
                        .into_iter()
                        .filter(move |g| Some(g.inverse()) != last)
                        .map(move |g| {
                            let next = q.checked_mul(&g.quaternion()).expect("within MAX_HEIGHT");
                            (next, Some(g))
                        })
                })
                .collect();
        }
        let mut elements: Vec<LipschitzQuaternion> = gate_set
            .prefixes()
            .iter()
            .flat_map(|p| {
                let pq = p.quaternion();
                frontier.iter().map(move |(q, _)| {
                    pq.checked_mul(q).expect("unit factor").canonical()
                })
            })
            .collect();
        let expected = elements.len();
        let distinct: FxHashSet<LipschitzQuaternion> = elements.iter().copied().collect();
        if distinct.len() != expected {
            return Err(Error::Internal(format!(
                "{} of {expected} reduced words of height {t} coincide",
                expected - distinct.len()
            )));
        }
        elements.par_sort_unstable();
        shells.push(EnumerationShell {
            t,
            gate_set,
            elements,
        });
    }
    Ok(shells)
}

/// Shell rows as `t,a,b,c,d`, sorted by `(t, a, b, c, d)`.
pub fn shells_to_csv<'a, I>(rows: I) -> String
where
    I: IntoIterator<Item = (u32, &'a LipschitzQuaternion)>,
{
    let mut rows: Vec<(u32, [i64; 4])> = rows.into_iter().map(|(t, q)| (t, q.coords())).collect();
    rows.sort_unstable();
    let mut out = String::from("t,a,b,c,d\n");
    for (t, [a, b, c, d]) in rows {
        out.push_str(&format!("{t},{a},{b},{c},{d}\n"));
    }
    out
}
