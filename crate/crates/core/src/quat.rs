//! Exact integer quaternions and the real forms of PSU(2).
//!
//! A point of SU(2) is a unit quaternion `x1 + x2 i + x3 j + x4 k`, written as
//! the matrix `((x1 + x2 i, x3 + x4 i), (-x3 + x4 i, x1 - x2 i))`. PSU(2)
//! identifies `x` with `-x`; [`Psu2Point`] always stores the representative
//! whose first nonzero coordinate is positive.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported height. Norms stay below `5^MAX_HEIGHT`, which keeps
/// every coefficient inside `i64` and every product inside `i128`.
pub const MAX_HEIGHT: u32 = 40;

/// `5^MAX_HEIGHT`.
pub const MAX_NORM: i128 = pow5(MAX_HEIGHT);

/// `5^t` as an exact integer. Callers keep `t <= MAX_HEIGHT`.
pub const fn pow5(t: u32) -> i128 {
    let mut acc: i128 = 1;
    let mut i = 0;
    while i < t {
        acc *= 5;
        i += 1;
    }
    acc
}

/// Integer quaternion `a + b i + c j + d k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LipschitzQuaternion {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl LipschitzQuaternion {
    pub const ONE: Self = Self::new(1, 0, 0, 0);
    pub const I: Self = Self::new(0, 1, 0, 0);
    pub const J: Self = Self::new(0, 0, 1, 0);
    pub const K: Self = Self::new(0, 0, 0, 1);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_coords(v: [i64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn coords(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// `a² + b² + c² + d²`.
    pub fn norm(&self) -> i128 {
        self.coords().iter().map(|&x| (x as i128) * (x as i128)).sum()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.a, -self.b, -self.c, -self.d)
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn dot(&self, other: &Self) -> i128 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(&x, y)| x as i128 * y as i128)
            .sum()
    }

    /// Hamilton product, rejecting results whose norm exceeds [`MAX_NORM`].
    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let (np, nq) = (self.norm(), rhs.norm());
        match np.checked_mul(nq) {
            Some(n) if n <= MAX_NORM => {}
            _ => {
                return Err(Error::Overflow(format!(
                    "product of norms {np} and {nq} exceeds 5^{MAX_HEIGHT}"
                )))
            }
        }
        let [a1, b1, c1, d1] = self.coords().map(i128::from);
        let [a2, b2, c2, d2] = rhs.coords().map(i128::from);
        let out = [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ];
        // |component| <= sqrt(norm) <= sqrt(MAX_NORM) < i64::MAX
        Ok(Self::from_coords(out.map(|x| x as i64)))
    }

    /// Representative of `{q, -q}` whose first nonzero coefficient is positive.
    pub fn canonical(&self) -> Self {
        if self.is_canonical() {
            *self
        } else {
            self.neg()
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.coords()
            .iter()
            .find(|&&x| x != 0)
            .map_or(true, |&x| x > 0)
    }

    /// `gcd(a, b, c, d, 5) = 1`, i.e. not every coefficient is divisible by 5.
    pub fn is_primitive(&self) -> bool {
        self.coords().iter().any(|x| x % 5 != 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coords() == [0; 4]
    }

    /// Componentwise exact division, `None` if any component is not divisible.
    pub fn div_exact(&self, k: i64) -> Option<Self> {
        if self.coords().iter().all(|x| x % k == 0) {
            Some(Self::from_coords(self.coords().map(|x| x / k)))
        } else {
            None
        }
    }

    /// If the norm is `5^t`, returns `t`.
    pub fn height_of_norm(&self) -> Option<u32> {
        let mut n = self.norm();
        if n <= 0 {
            return None;
        }
        let mut t = 0;
        while n % 5 == 0 {
            n /= 5;
            t += 1;
        }
        (n == 1).then_some(t)
    }

    /// Radial projection onto S³, sign-canonical.
    pub fn to_point(&self) -> Psu2Point {
        let n = (self.norm() as f64).sqrt();
        let v = self.coords().map(|x| x as f64 / n);
        Psu2Point::from_unit(v)
    }
}

impl fmt::Display for LipschitzQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.a, self.b, self.c, self.d)
    }
}

/// Exact quaternion product. See [`LipschitzQuaternion::checked_mul`].
pub fn quat_mul(p: &LipschitzQuaternion, q: &LipschitzQuaternion) -> Result<LipschitzQuaternion> {
    p.checked_mul(q)
}

fn canonical_sign(v: [f64; 4]) -> [f64; 4] {
    match v.iter().find(|&&x| x != 0.0) {
        Some(&x) if x < 0.0 => v.map(|c| -c),
        _ => v,
    }
}

fn hamilton(p: [f64; 4], q: [f64; 4]) -> [f64; 4] {
    let [a1, b1, c1, d1] = p;
    let [a2, b2, c2, d2] = q;
    [
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ]
}

/// Element of PSU(2) as a sign-canonical unit 4-vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Psu2Point([f64; 4]);

impl Psu2Point {
    pub const IDENTITY: Self = Psu2Point([1.0, 0.0, 0.0, 0.0]);

    /// Normalizes `v` and picks the canonical sign.
    pub fn new(v: [f64; 4]) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation(format!("non-finite coordinates {v:?}")));
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            return Err(Error::Validation("zero vector has no direction".into()));
        }
        Ok(Self::from_unit(v.map(|x| x / n)))
    }

    /// Wraps a vector that is already unit length.
    pub(crate) fn from_unit(v: [f64; 4]) -> Self {
        Psu2Point(canonical_sign(v))
    }

    pub fn coords(&self) -> [f64; 4] {
        self.0
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0).map(|(x, y)| x * y).sum()
    }

    /// Group product in PSU(2).
    pub fn mul(&self, other: &Self) -> Self {
        Self::from_unit(hamilton(self.0, other.0))
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = self.0;
        Self::from_unit([a, -b, -c, -d])
    }
}

/// The invariant metric `sqrt(1 - |<x, y>|)`.
///
/// Evaluated as `min(|x - y|, |x + y|) / sqrt(2)`, which is the same quantity
/// for unit vectors but keeps full relative precision for nearby points.
pub fn metric_d(x: &Psu2Point, y: &Psu2Point) -> f64 {
    let (mut minus, mut plus) = (0.0, 0.0);
    for (p, q) in x.0.iter().zip(y.0) {
        minus += (p - q) * (p - q);
        plus += (p + q) * (p + q);
    }
    (minus.min(plus) * 0.5).sqrt().min(1.0)
}

/// Tests `|<x, y>| > 5^t (1 - eps²)` for `y` of norm `5^t` and `x` on the
/// sphere of radius `5^{t/2}`; equivalent to `metric_d(x̂, ŷ) < eps`.
pub fn proximity_threshold(
    x_scaled: [f64; 4],
    y: &LipschitzQuaternion,
    t: u32,
    eps: f64,
) -> Result<bool> {
    if t > MAX_HEIGHT {
        return Err(Error::Contract(format!("height {t} exceeds {MAX_HEIGHT}")));
    }
    if y.norm() != pow5(t) {
        return Err(Error::Contract(format!(
            "N{y} = {} but 5^{t} = {}",
            y.norm(),
            pow5(t)
        )));
    }
    let inner: f64 = x_scaled
        .iter()
        .zip(y.coords())
        .map(|(x, c)| x * c as f64)
        .sum();
    Ok(inner.abs() > pow5(t) as f64 * (1.0 - eps * eps))
}

/// 2×2 special unitary matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su2Matrix(pub [[Complex64; 2]; 2]);

impl Su2Matrix {
    pub fn from_coords(v: [f64; 4]) -> Self {
        let [x1, x2, x3, x4] = v;
        Su2Matrix([
            [Complex64::new(x1, x2), Complex64::new(x3, x4)],
            [Complex64::new(-x3, x4), Complex64::new(x1, -x2)],
        ])
    }

    pub fn adjoint(&self) -> Self {
        let m = self.0;
        Su2Matrix([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let (a, b) = (self.0, rhs.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Su2Matrix(out)
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Largest entry of `|M* M - I|` and `|det M - 1|`.
    pub fn special_unitary_defect(&self) -> f64 {
        let g = self.adjoint().mul(self);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        [
            (g.0[0][0] - one).norm(),
            (g.0[1][1] - one).norm(),
            (g.0[0][1] - zero).norm(),
            (g.0[1][0] - zero).norm(),
            (self.det() - one).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// `sqrt(1 - |trace(X* Y)| / 2)`.
    pub fn distance(&self, other: &Self) -> f64 {
        let r = 1.0 - self.adjoint().mul(other).trace().norm() / 2.0;
        r.max(0.0).sqrt()
    }
}

/// Matrix form of a point.
pub fn to_su2(v: &Psu2Point) -> Su2Matrix {
    Su2Matrix::from_coords(v.0)
}

/// Matrix form of `q / sqrt(N(q))`.
pub fn quaternion_to_su2(q: &LipschitzQuaternion) -> Result<Su2Matrix> {
    if q.is_zero() {
        return Err(Error::Validation("zero quaternion".into()));
    }
    let n = (q.norm() as f64).sqrt();
    Ok(Su2Matrix::from_coords(q.coords().map(|x| x as f64 / n)))
}

/// Inverse of [`to_su2`]. Rejects inputs that are not special unitary
/// within `1e-9`, or that do not have the `((a, b), (-b̄, ā))` shape.
pub fn from_su2(m: &Su2Matrix) -> Result<Psu2Point> {
    const TOL: f64 = 1e-9;
    let defect = m.special_unitary_defect();
    if !(defect <= TOL) {
        return Err(Error::Validation(format!(
            "matrix is not special unitary (defect {defect:e})"
        )));
    }
    let [[a, b], [c, d]] = m.0;
    if (d - a.conj()).norm() > TOL || (c + b.conj()).norm() > TOL {
        return Err(Error::Validation("matrix lacks SU(2) shape".into()));
    }
    Psu2Point::new([a.re, a.im, b.re, b.im])
}

/// Proper rotation of R³.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rotation3(pub [[f64; 3]; 3]);

impl Rotation3 {
    pub const IDENTITY: Self = Rotation3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        Rotation3(out)
    }

    pub fn transpose(&self) -> Self {
        let m = self.0;
        Rotation3(std::array::from_fn(|i| std::array::from_fn(|j| m[j][i])))
    }

    pub fn det(&self) -> f64 {
        let m = self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        std::array::from_fn(|i| (0..3).map(|k| self.0[i][k] * v[k]).sum())
    }
}

/// Adjoint action `v ↦ q v q⁻¹` on the pure quaternions `v1 i + v2 j + v3 k`.
pub fn to_so3(v: &Psu2Point) -> Rotation3 {
    let [w, x, y, z] = v.0;
    Rotation3([
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ])
}
