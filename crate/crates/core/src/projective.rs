//! Homogeneous coordinates over ℚ (exact), ℝ and ℂ (binary64), with incidence,
//! metrics and projective maps.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat3, C3, V3};
use crate::scalar::{fmt_f64, int_to_f64_scaled, Scalar};

/// Angle below which two float points or lines are treated as equal.
pub const SCALE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coords {
    /// Primitive integer triple, first nonzero entry positive.
    Exact([BigInt; 3]),
    /// Unit vector, largest-modulus entry positive.
    Real(V3),
    /// Unit vector, largest-modulus entry real and positive.
    Complex(C3),
}

fn primitive(mut v: [BigInt; 3]) -> Result<[BigInt; 3]> {
    let g = v[0].gcd(&v[1]).gcd(&v[2]);
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    let first_negative = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    let g = if first_negative { -g } else { g };
    if !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
    Ok(v)
}

fn canonical_real(v: V3) -> Result<V3> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = linalg::norm(&v);
    if n == 0.0 {
        return Err(Error::ZeroVector);
    }
    let lead = v.iter().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { *x } else { acc });
    let s = lead.signum() / n;
    Ok([v[0] * s, v[1] * s, v[2] * s])
}

fn canonical_complex(v: C3) -> Result<C3> {
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = linalg::cnorm(&v);
    if n == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut lead = v[0];
    for z in &v[1..] {
        if z.norm() > lead.norm() {
            lead = *z;
        }
    }
    let phase = lead.conj() / lead.norm() / n;
    Ok([v[0] * phase, v[1] * phase, v[2] * phase])
}

fn big_to_f64(v: &[BigInt; 3]) -> V3 {
    let bits = v.iter().map(|x| x.bits()).max().unwrap_or(0);
    let shift = bits.saturating_sub(60);
    [
        int_to_f64_scaled(&v[0], shift),
        int_to_f64_scaled(&v[1], shift),
        int_to_f64_scaled(&v[2], shift),
    ]
}

fn clear_denominators(v: &[BigRational; 3]) -> [BigInt; 3] {
    let l = v[0].denom().lcm(v[1].denom()).lcm(v[2].denom());
    [
        (&v[0] * BigRational::from_integer(l.clone())).to_integer(),
        (&v[1] * BigRational::from_integer(l.clone())).to_integer(),
        (&v[2] * BigRational::from_integer(l)).to_integer(),
    ]
}

impl Coords {
    pub fn exact(v: [BigInt; 3]) -> Result<Self> {
        primitive(v).map(Coords::Exact)
    }

    pub fn real(v: V3) -> Result<Self> {
        canonical_real(v).map(Coords::Real)
    }

    pub fn complex(v: C3) -> Result<Self> {
        canonical_complex(v).map(Coords::Complex)
    }

    pub fn from_scalars(v: [Scalar; 3]) -> Result<Self> {
        if v.iter().all(Scalar::is_exact) {
            let q: Vec<BigRational> = v
                .into_iter()
                .map(|s| match s {
                    Scalar::Exact(q) => q,
                    Scalar::Float(_) => unreachable!(),
                })
                .collect();
            Coords::exact(clear_denominators(&[q[0].clone(), q[1].clone(), q[2].clone()]))
        } else {
            Coords::real([v[0].to_f64(), v[1].to_f64(), v[2].to_f64()])
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Coords::Complex(_) => Field::Complex,
            _ => Field::Real,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coords::Exact(_))
    }

    /// Largest coordinate bit length (0 for float coordinates).
    pub fn bits(&self) -> u64 {
        match self {
            Coords::Exact(v) => v.iter().map(|x| x.bits()).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// Unit real representative; `None` for complex coordinates.
    pub fn to_real(&self) -> Option<V3> {
        match self {
            Coords::Exact(v) => Some(linalg::normalize(&big_to_f64(v))),
            Coords::Real(v) => Some(*v),
            Coords::Complex(_) => None,
        }
    }

    pub fn to_complex(&self) -> C3 {
        match self {
            Coords::Complex(v) => *v,
            other => linalg::c3(&other.to_real().expect("real coordinates")),
        }
    }

    /// Drop exactness.
    pub fn to_float(&self) -> Coords {
        match self {
            Coords::Exact(_) => Coords::Real(canonical_real(self.to_real().unwrap()).unwrap()),
            other => other.clone(),
        }
    }

    fn cross(&self, other: &Coords) -> Result<Coords> {
        match (self, other) {
            (Coords::Exact(a), Coords::Exact(b)) => Coords::exact([
                &a[1] * &b[2] - &a[2] * &b[1],
                &a[2] * &b[0] - &a[0] * &b[2],
                &a[0] * &b[1] - &a[1] * &b[0],
            ]),
            (Coords::Complex(_), _) | (_, Coords::Complex(_)) => {
                if self.field() != other.field() {
                    return Err(Error::FieldMismatch("real and complex arguments"));
                }
                let (a, b) = (self.to_complex(), other.to_complex());
                let c = linalg::ccross(&a, &b);
                if linalg::cnorm(&c) <= SCALE_TOL {
                    return Err(Error::ZeroVector);
                }
                Coords::complex(c)
            }
            _ => {
                let (a, b) = (self.to_real().unwrap(), other.to_real().unwrap());
                let c = linalg::cross(&a, &b);
                if linalg::norm(&c) <= SCALE_TOL {
                    return Err(Error::ZeroVector);
                }
                Coords::real(c)
            }
        }
    }

    fn same_field(&self, other: &Coords) -> Result<()> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(Error::FieldMismatch("real and complex arguments"))
        }
    }

    /// Exact equality up to scale when both sides are exact, angle test otherwise.
    pub fn equivalent(&self, other: &Coords) -> bool {
        match (self, other) {
            (Coords::Exact(a), Coords::Exact(b)) => a == b,
            _ => self.angle(other).is_ok_and(|a| a <= SCALE_TOL),
        }
    }

    /// Point-to-point (or line-to-line) angle.
    fn angle(&self, other: &Coords) -> Result<f64> {
        self.same_field(other)?;
        match (self, other) {
            (Coords::Exact(a), Coords::Exact(b)) if a == b => Ok(0.0),
            (Coords::Complex(_), _) => Ok(linalg::cangle(&self.to_complex(), &other.to_complex())),
            _ => Ok(linalg::angle(&self.to_real().unwrap(), &other.to_real().unwrap())),
        }
    }

    /// Angle between a point and a line under the bilinear pairing:
    /// asin(|z·l| / (‖z‖‖l‖)).
    fn pairing_angle(&self, other: &Coords) -> Result<f64> {
        self.same_field(other)?;
        match (self, other) {
            (Coords::Exact(a), Coords::Exact(b)) => {
                let d = &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2];
                if d.is_zero() {
                    return Ok(0.0);
                }
                let (x, y) = (self.to_real().unwrap(), other.to_real().unwrap());
                Ok(linalg::dot(&x, &y).abs().atan2(linalg::norm(&linalg::cross(&x, &y))))
            }
            (Coords::Complex(_), _) => {
                let z = self.to_complex();
                let l = other.to_complex();
                let lc = [l[0].conj(), l[1].conj(), l[2].conj()];
                let pair = linalg::cdot(&z, &l).norm();
                let mut wedge = 0.0;
                for i in 0..3 {
                    for j in (i + 1)..3 {
                        wedge += (z[i] * lc[j] - z[j] * lc[i]).norm_sqr();
                    }
                }
                Ok(pair.atan2(wedge.sqrt()))
            }
            _ => {
                let (x, y) = (self.to_real().unwrap(), other.to_real().unwrap());
                Ok(linalg::dot(&x, &y).abs().atan2(linalg::norm(&linalg::cross(&x, &y))))
            }
        }
    }

    fn fmt_text(&self) -> String {
        match self {
            Coords::Exact(v) => {
                let den = v.iter().rev().find(|x| !x.is_zero()).expect("nonzero").clone();
                v.iter()
                    .map(|x| Scalar::Exact(BigRational::new(x.clone(), den.clone())).to_string())
                    .collect::<Vec<_>>()
                    .join("/")
            }
            Coords::Real(v) => v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join("/"),
            Coords::Complex(v) => v
                .iter()
                .map(|z| {
                    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
                    format!("{}{}{}i", fmt_f64(z.re), sign, fmt_f64(z.im.abs()))
                })
                .collect::<Vec<_>>()
                .join("/"),
        }
    }

    fn parse_text(s: &str) -> Result<Coords> {
        let parts: Vec<&str> = s.trim().split('/').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected x/y/z, got {s:?}")));
        }
        if parts.iter().any(|p| p.contains('i')) {
            let mut v = [Complex64::new(0.0, 0.0); 3];
            for (k, p) in parts.iter().enumerate() {
                v[k] = parse_complex(p)?;
            }
            return Coords::complex(v);
        }
        let a: Scalar = parts[0].parse()?;
        let b: Scalar = parts[1].parse()?;
        let c: Scalar = parts[2].parse()?;
        Coords::from_scalars([a, b, c])
    }
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let t = s.trim();
    let z = Complex64::from_str(t).map_err(|_| Error::Parse(format!("bad complex number {t:?}")))?;
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite)
    }
}

macro_rules! homogeneous {
    ($name:ident, $equal:expr) => {
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(pub Coords);

        impl $name {
            pub fn exact(v: [BigInt; 3]) -> Result<Self> {
                Coords::exact(v).map($name)
            }

            pub fn ints(x: i64, y: i64, z: i64) -> Self {
                $name::exact([x.into(), y.into(), z.into()]).expect("nonzero triple")
            }

            pub fn rational(v: [BigRational; 3]) -> Result<Self> {
                Coords::exact(clear_denominators(&v)).map($name)
            }

            pub fn real(v: V3) -> Result<Self> {
                Coords::real(v).map($name)
            }

            pub fn complex(v: C3) -> Result<Self> {
                Coords::complex(v).map($name)
            }

            pub fn from_scalars(v: [Scalar; 3]) -> Result<Self> {
                Coords::from_scalars(v).map($name)
            }

            pub fn field(&self) -> Field {
                self.0.field()
            }

            pub fn is_exact(&self) -> bool {
                self.0.is_exact()
            }

            pub fn to_real(&self) -> Option<V3> {
                self.0.to_real()
            }

            pub fn to_complex(&self) -> C3 {
                self.0.to_complex()
            }

            pub fn to_float(&self) -> Self {
                $name(self.0.to_float())
            }

            pub fn bits(&self) -> u64 {
                self.0.bits()
            }

            pub fn equivalent(&self, other: &Self) -> bool {
                self.0.equivalent(&other.0)
            }

            /// Exact integer representative, if any.
            pub fn ints_ref(&self) -> Option<&[BigInt; 3]> {
                match &self.0 {
                    Coords::Exact(v) => Some(v),
                    _ => None,
                }
            }

            pub(crate) fn cross_with(&self, other: &Self) -> Result<Coords> {
                self.0.cross(&other.0).map_err(|e| match e {
                    Error::ZeroVector => $equal,
                    e => e,
                })
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.fmt_text())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                Coords::parse_text(s).map($name)
            }
        }
    };
}

homogeneous!(HPoint, Error::EqualPoints);
homogeneous!(HLine, Error::EqualLines);

impl HPoint {
    /// Affine point (x, y) in the chart z = 1, exact.
    pub fn affine(x: BigRational, y: BigRational) -> Self {
        HPoint::rational([x, y, BigRational::one()]).expect("z = 1")
    }

    /// Affine point with small rational coordinates `xn/xd`, `yn/yd`.
    pub fn affine_ratio(xn: i64, xd: i64, yn: i64, yd: i64) -> Self {
        HPoint::affine(BigRational::new(xn.into(), xd.into()), BigRational::new(yn.into(), yd.into()))
    }

    /// Affine coordinates in the chart z = 1 (float); `None` at infinity.
    pub fn chart(&self) -> Option<(f64, f64)> {
        let v = self.to_real()?;
        (v[2] != 0.0).then(|| (v[0] / v[2], v[1] / v[2]))
    }
}

pub fn join(p: &HPoint, q: &HPoint) -> Result<HLine> {
    p.cross_with(q).map(HLine)
}

pub fn meet(l1: &HLine, l2: &HLine) -> Result<HPoint> {
    l1.cross_with(l2).map(HPoint)
}

/// Spherical (real) or Fubini–Study (complex) angle between two points.
pub fn dist(a: &HPoint, b: &HPoint) -> Result<f64> {
    a.0.angle(&b.0)
}

/// Same metric on lines, through their coefficient triples.
pub fn line_dist(a: &HLine, b: &HLine) -> Result<f64> {
    a.0.angle(&b.0)
}

pub fn dist_point_line(z: &HPoint, l: &HLine) -> Result<f64> {
    z.0.pairing_angle(&l.0)
}

/// Exact incidence for exact inputs, |sin angle| ≤ tol otherwise.
pub fn incident(z: &HPoint, l: &HLine, tol: f64) -> Result<bool> {
    match (&z.0, &l.0) {
        (Coords::Exact(a), Coords::Exact(b)) => {
            Ok((&a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]).is_zero())
        }
        _ => Ok(dist_point_line(z, l)?.sin() <= tol),
    }
}

pub fn complexify(l: &HLine) -> HLine {
    match &l.0 {
        Coords::Complex(_) => l.clone(),
        c => HLine(Coords::Complex(c.to_complex())),
    }
}

/// Determinant of three exact triples.
pub fn det_ints(a: &[BigInt; 3], b: &[BigInt; 3], c: &[BigInt; 3]) -> BigInt {
    &a[0] * (&b[1] * &c[2] - &b[2] * &c[1]) - &a[1] * (&b[0] * &c[2] - &b[2] * &c[0])
        + &a[2] * (&b[0] * &c[1] - &b[1] * &c[0])
}

/// Whether three points are collinear: exactly, or within `SCALE_TOL` for floats.
pub fn collinear(a: &HPoint, b: &HPoint, c: &HPoint) -> bool {
    match (a.ints_ref(), b.ints_ref(), c.ints_ref()) {
        (Some(x), Some(y), Some(z)) => det_ints(x, y, z).is_zero(),
        _ => match (a.to_real(), b.to_real(), c.to_real()) {
            (Some(x), Some(y), Some(z)) => linalg::dot(&x, &linalg::cross(&y, &z)).abs() <= SCALE_TOL,
            _ => {
                let (x, y, z) = (a.to_complex(), b.to_complex(), c.to_complex());
                linalg::cdot(&x, &linalg::ccross(&y, &z)).norm() <= SCALE_TOL
            }
        },
    }
}

/// An invertible 3×3 real array up to nonzero scale.
///
/// The stored representative keeps the sign it was built with, so spectra of
/// hand-written arrays come out as written. Equality is up to sign.
#[derive(Debug, Clone)]
pub enum ProjMap {
    /// Integer array with coprime entries.
    Exact([[BigInt; 3]; 3]),
    /// Array scaled by a positive factor to sup-norm 1.
    Float(Mat3),
}

impl PartialEq for ProjMap {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ProjMap::Exact(a), ProjMap::Exact(b)) => {
                a == b || a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| *x == -y)
            }
            _ => linalg::projective_distance(&self.to_f64(), &other.to_f64()) == 0.0,
        }
    }
}

fn mat_bits(m: &[[BigInt; 3]; 3]) -> u64 {
    m.iter().flatten().map(|x| x.bits()).max().unwrap_or(0)
}

fn big_mat_to_f64(m: &[[BigInt; 3]; 3]) -> Mat3 {
    let shift = mat_bits(m).saturating_sub(60);
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = int_to_f64_scaled(&m[i][j], shift);
        }
    }
    out
}

fn big_mul(a: &[[BigInt; 3]; 3], b: &[[BigInt; 3]; 3]) -> [[BigInt; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j] + &a[i][2] * &b[2][j]))
}

fn big_vec(m: &[[BigInt; 3]; 3], v: &[BigInt; 3]) -> [BigInt; 3] {
    std::array::from_fn(|i| &m[i][0] * &v[0] + &m[i][1] * &v[1] + &m[i][2] * &v[2])
}

fn big_det(m: &[[BigInt; 3]; 3]) -> BigInt {
    det_ints(&m[0], &m[1], &m[2])
}

fn big_cross(a: &[BigInt; 3], b: &[BigInt; 3]) -> [BigInt; 3] {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

/// Cofactor matrix: the inverse-transpose up to the factor det.
fn big_cofactor(m: &[[BigInt; 3]; 3]) -> [[BigInt; 3]; 3] {
    [big_cross(&m[1], &m[2]), big_cross(&m[2], &m[0]), big_cross(&m[0], &m[1])]
}

fn big_transpose(m: &[[BigInt; 3]; 3]) -> [[BigInt; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[j][i].clone()))
}

fn primitive_mat(m: [[BigInt; 3]; 3]) -> Result<[[BigInt; 3]; 3]> {
    let mut g = BigInt::zero();
    for x in m.iter().flatten() {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return Err(Error::Singular);
    }
    Ok(m.map(|row| row.map(|x| x / &g)))
}

impl ProjMap {
    pub fn exact(m: [[BigInt; 3]; 3]) -> Result<Self> {
        if big_det(&m).is_zero() {
            return Err(Error::Singular);
        }
        primitive_mat(m).map(ProjMap::Exact)
    }

    pub fn ints(m: [[i64; 3]; 3]) -> Result<Self> {
        ProjMap::exact(m.map(|row| row.map(BigInt::from)))
    }

    pub fn rational(m: [[BigRational; 3]; 3]) -> Result<Self> {
        let mut l = BigInt::one();
        for x in m.iter().flatten() {
            l = l.lcm(x.denom());
        }
        let lq = BigRational::from_integer(l);
        ProjMap::exact(m.map(|row| row.map(|x| (x * &lq).to_integer())))
    }

    pub fn float(m: Mat3) -> Result<Self> {
        if m.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let s = linalg::sup_norm(&m);
        if s == 0.0 {
            return Err(Error::Singular);
        }
        let n = linalg::scale_mat(&m, 1.0 / s);
        if linalg::det(&n).abs() <= 1e-14 {
            return Err(Error::Singular);
        }
        Ok(ProjMap::Float(n))
    }

    pub fn identity() -> Self {
        ProjMap::ints([[1, 0, 0], [0, 1, 0], [0, 0, 1]]).unwrap()
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ProjMap::Exact(_))
    }

    pub fn bits(&self) -> u64 {
        match self {
            ProjMap::Exact(m) => mat_bits(m),
            ProjMap::Float(_) => 0,
        }
    }

    /// Float array scaled by a positive factor to sup-norm 1.
    pub fn to_f64(&self) -> Mat3 {
        match self {
            ProjMap::Exact(m) => linalg::sup_scale(&big_mat_to_f64(m)),
            ProjMap::Float(m) => *m,
        }
    }

    /// Float array without rescaling (huge exact entries are shifted down).
    pub fn raw_f64(&self) -> Mat3 {
        match self {
            ProjMap::Exact(m) => big_mat_to_f64(m),
            ProjMap::Float(m) => *m,
        }
    }

    pub fn to_float(&self) -> ProjMap {
        ProjMap::Float(self.to_f64())
    }

    /// Representative with determinant 1 (real cube root).
    pub fn det_normalized(&self) -> Mat3 {
        let m = self.to_f64();
        let d = linalg::det(&m);
        linalg::scale_mat(&m, 1.0 / d.cbrt())
    }

    pub fn is_identity(&self) -> bool {
        *self == ProjMap::identity()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ProjMap) -> ProjMap {
        match (self, other) {
            (ProjMap::Exact(a), ProjMap::Exact(b)) => ProjMap::Exact(primitive_mat(big_mul(a, b)).expect("invertible")),
            _ => ProjMap::Float(linalg::sup_scale(&linalg::mat_mul(&self.to_f64(), &other.to_f64()))),
        }
    }

    pub fn inverse(&self) -> ProjMap {
        match self {
            ProjMap::Exact(m) => ProjMap::Exact(primitive_mat(big_transpose(&big_cofactor(m))).expect("invertible")),
            ProjMap::Float(m) => ProjMap::Float(linalg::sup_scale(&linalg::adjugate(m))),
        }
    }

    /// Inverse-transpose: the induced action on line coordinates.
    pub fn dual(&self) -> ProjMap {
        match self {
            ProjMap::Exact(m) => ProjMap::Exact(primitive_mat(big_cofactor(m)).expect("invertible")),
            ProjMap::Float(m) => ProjMap::Float(linalg::sup_scale(&linalg::transpose(&linalg::adjugate(m)))),
        }
    }

    pub fn transpose(&self) -> ProjMap {
        match self {
            ProjMap::Exact(m) => ProjMap::Exact(primitive_mat(big_transpose(m)).expect("invertible")),
            ProjMap::Float(m) => ProjMap::Float(linalg::transpose(m)),
        }
    }

    fn act(&self, c: &Coords) -> Result<Coords> {
        match (self, c) {
            (ProjMap::Exact(m), Coords::Exact(v)) => Coords::exact(big_vec(m, v)),
            (_, Coords::Complex(v)) => Coords::complex(linalg::cmat_vec(&self.to_f64(), v)),
            _ => Coords::real(linalg::mat_vec(&self.to_f64(), &c.to_real().unwrap())),
        }
    }

    pub fn apply_point(&self, x: &HPoint) -> Result<HPoint> {
        self.act(&x.0).map(HPoint)
    }

    pub fn apply_line(&self, l: &HLine) -> Result<HLine> {
        self.dual().act(&l.0).map(HLine)
    }

    /// Entries as text: nine comma-separated values, row-major.
    pub fn to_text(&self) -> String {
        match self {
            ProjMap::Exact(m) => m
                .iter()
                .flatten()
                .map(|x| Scalar::Exact(BigRational::from_integer(x.clone())).to_string())
                .collect::<Vec<_>>()
                .join(","),
            ProjMap::Float(m) => m.iter().flatten().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(","),
        }
    }
}

impl FromStr for ProjMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<Scalar> = s.split(',').map(str::parse).collect::<Result<_>>()?;
        if parts.len() != 9 {
            return Err(Error::Parse(format!("expected 9 entries, got {}", parts.len())));
        }
        if parts.iter().all(Scalar::is_exact) {
            let q: Vec<BigRational> = parts
                .into_iter()
                .map(|s| match s {
                    Scalar::Exact(q) => q,
                    Scalar::Float(_) => unreachable!(),
                })
                .collect();
            ProjMap::rational(std::array::from_fn(|i| std::array::from_fn(|j| q[3 * i + j].clone())))
        } else {
            ProjMap::float(std::array::from_fn(|i| std::array::from_fn(|j| parts[3 * i + j].to_f64())))
        }
    }
}

impl fmt::Display for ProjMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Things a projective map acts on.
pub trait Apply: Sized {
    fn apply_by(&self, m: &ProjMap) -> Result<Self>;
}

impl Apply for HPoint {
    fn apply_by(&self, m: &ProjMap) -> Result<Self> {
        m.apply_point(self)
    }
}

impl Apply for HLine {
    fn apply_by(&self, m: &ProjMap) -> Result<Self> {
        m.apply_line(self)
    }
}

pub fn apply<X: Apply>(m: &ProjMap, x: &X) -> Result<X> {
    x.apply_by(m)
}

/// Columns of the frame matrix scaled so that they sum to the fourth point.
fn frame_exact(pts: [&[BigInt; 3]; 4]) -> Result<[[BigInt; 3]; 3]> {
    let a: [[BigInt; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| pts[j][i].clone()));
    let d = big_det(&a);
    if d.is_zero() {
        return Err(Error::DegenerateFrame);
    }
    let lam = big_vec(&big_transpose(&big_cofactor(&a)), pts[3]);
    if lam.iter().any(Zero::is_zero) {
        return Err(Error::DegenerateFrame);
    }
    Ok(std::array::from_fn(|i| std::array::from_fn(|j| &a[i][j] * &lam[j])))
}

fn frame_float(pts: [V3; 4]) -> Result<Mat3> {
    for (a, b, c) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
        if linalg::dot(&pts[a], &linalg::cross(&pts[b], &pts[c])).abs() <= 1e-12 {
            return Err(Error::DegenerateFrame);
        }
    }
    let a: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| pts[j][i]));
    let lam = linalg::solve3(&a, &pts[3]).ok_or(Error::DegenerateFrame)?;
    Ok(std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] * lam[j])))
}

/// The unique projective map sending `src[k]` to `dst[k]` for k = 0..4.
pub fn map_from_correspondence(src: &[HPoint; 4], dst: &[HPoint; 4]) -> Result<ProjMap> {
    if src.iter().chain(dst.iter()).any(|p| p.field() != Field::Real) {
        return Err(Error::FieldMismatch("frames must be real"));
    }
    let exact_src: Option<Vec<&[BigInt; 3]>> = src.iter().map(HPoint::ints_ref).collect();
    let exact_dst: Option<Vec<&[BigInt; 3]>> = dst.iter().map(HPoint::ints_ref).collect();
    if let (Some(s), Some(d)) = (exact_src, exact_dst) {
        let bs = frame_exact([s[0], s[1], s[2], s[3]])?;
        let bd = frame_exact([d[0], d[1], d[2], d[3]])?;
        // for the three-collinear cases not caught by the λ test
        for (a, b, c) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
            if det_ints(s[a], s[b], s[c]).is_zero() || det_ints(d[a], d[b], d[c]).is_zero() {
                return Err(Error::DegenerateFrame);
            }
        }
        let inv = big_transpose(&big_cofactor(&bs));
        return ProjMap::exact(big_mul(&bd, &inv));
    }
    let s: [V3; 4] = std::array::from_fn(|k| src[k].to_real().unwrap());
    let d: [V3; 4] = std::array::from_fn(|k| dst[k].to_real().unwrap());
    let bs = frame_float(s)?;
    let bd = frame_float(d)?;
    let inv = linalg::inverse(&bs).ok_or(Error::DegenerateFrame)?;
    ProjMap::float(linalg::mat_mul(&bd, &inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn join_examples() {
        assert_eq!(join(&HPoint::ints(1, 0, 0), &HPoint::ints(0, 1, 0)).unwrap(), HLine::ints(0, 0, 1));
        let top = join(&HPoint::ints(-1, 1, 1), &HPoint::ints(1, 1, 1)).unwrap();
        assert_eq!(top, HLine::ints(0, 1, -1));
        let p = HPoint::ints(2, 3, 5);
        assert_eq!(join(&p, &HPoint::ints(4, 6, 10)), Err(Error::EqualPoints));
    }

    #[test]
    fn meet_examples() {
        assert_eq!(meet(&HLine::ints(1, 0, 0), &HLine::ints(0, 1, 0)).unwrap(), HPoint::ints(0, 0, 1));
        assert_eq!(meet(&HLine::ints(0, 1, -1), &HLine::ints(0, 1, 0)).unwrap(), HPoint::ints(1, 0, 0));
        assert_eq!(meet(&HLine::ints(0, 1, -1), &HLine::ints(0, -2, 2)), Err(Error::EqualLines));
    }

    #[test]
    fn dist_examples() {
        let d = dist(&HPoint::ints(1, 0, 0), &HPoint::ints(0, 1, 0)).unwrap();
        assert!((d - FRAC_PI_2).abs() < 1e-15);
        let d = dist(&HPoint::ints(1, 0, 0), &HPoint::ints(1, 1, 0)).unwrap();
        assert!((d - FRAC_PI_4).abs() < 1e-15);
        let d = dist(&HPoint::ints(-1, 1, 1), &HPoint::ints(1, -1, 1)).unwrap();
        assert!((d - (1.0f64 / 3.0).acos()).abs() < 1e-15);
        let z = HPoint::complex(linalg::c3(&[1.0, 0.0, 0.0])).unwrap();
        assert!(matches!(dist(&z, &HPoint::ints(1, 0, 0)), Err(Error::FieldMismatch(_))));
    }

    #[test]
    fn dist_point_line_examples() {
        let d = dist_point_line(&HPoint::ints(0, 0, 1), &HLine::ints(0, 0, 1)).unwrap();
        assert!((d - FRAC_PI_2).abs() < 1e-15);
        let d = dist_point_line(&HPoint::ints(1, 0, 1), &HLine::ints(0, 0, 1)).unwrap();
        assert!((d - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(dist_point_line(&HPoint::ints(3, 1, 1), &HLine::ints(0, 1, -1)).unwrap(), 0.0);
    }

    #[test]
    fn apply_examples() {
        let t = HPoint::ints(0, 1, 1);
        assert_eq!(apply(&ProjMap::identity(), &t).unwrap(), t);
        let mi = ProjMap::ints([[-1, 0, 0], [0, -1, 0], [0, 0, 1]]).unwrap();
        assert_eq!(apply(&mi, &t).unwrap(), HPoint::ints(0, -1, 1));
        let m1 = ProjMap::ints([[2, 0, 0], [0, 1, 1], [0, -1, 3]]).unwrap();
        assert_eq!(apply(&m1, &HPoint::ints(1, 0, 0)).unwrap(), HPoint::ints(1, 0, 0));
        assert_eq!(apply(&m1, &HLine::ints(0, 1, -1)).unwrap(), HLine::ints(0, 1, -1));
    }

    fn theta0_frame() -> [HPoint; 4] {
        [HPoint::ints(-1, 1, 1), HPoint::ints(1, 1, 1), HPoint::ints(1, -1, 1), HPoint::ints(-1, -1, 1)]
    }

    #[test]
    fn correspondence_examples() {
        let e = [HPoint::ints(1, 0, 0), HPoint::ints(0, 1, 0), HPoint::ints(0, 0, 1), HPoint::ints(1, 1, 1)];
        assert_eq!(map_from_correspondence(&e, &e).unwrap(), ProjMap::identity());

        let src = theta0_frame();
        let dst = [src[0].clone(), src[1].clone(), HPoint::ints(1, 0, 2), HPoint::ints(-1, 0, 2)];
        let m = map_from_correspondence(&src, &dst).unwrap();
        assert_eq!(m, ProjMap::ints([[2, 0, 0], [0, 1, 1], [0, -1, 3]]).unwrap());
        assert_eq!(apply(&m, &HPoint::ints(0, 1, 1)).unwrap(), HPoint::ints(0, 1, 1));
        assert_eq!(apply(&m, &HPoint::ints(0, -1, 1)).unwrap(), HPoint::ints(0, 0, 1));

        let dst = [src[1].clone(), src[0].clone(), src[3].clone(), src[2].clone()];
        let m = map_from_correspondence(&src, &dst).unwrap();
        assert_eq!(m, ProjMap::ints([[-1, 0, 0], [0, 1, 0], [0, 0, 1]]).unwrap());

        let bad = [src[0].clone(), src[1].clone(), HPoint::ints(0, 1, 1), src[3].clone()];
        assert_eq!(map_from_correspondence(&bad, &src), Err(Error::DegenerateFrame));
    }

    #[test]
    fn float_correspondence_matches_exact() {
        let src = theta0_frame();
        let dst = [src[0].clone(), src[1].clone(), HPoint::ints(1, 0, 2), HPoint::ints(-1, 0, 2)];
        let fs: [HPoint; 4] = std::array::from_fn(|k| src[k].to_float());
        let fd: [HPoint; 4] = std::array::from_fn(|k| dst[k].to_float());
        let m = map_from_correspondence(&fs, &fd).unwrap();
        let e = map_from_correspondence(&src, &dst).unwrap();
        assert!(linalg::projective_distance(&m.to_f64(), &e.to_f64()) < 1e-14);
        for k in 0..4 {
            let image = apply(&m, &fs[k]).unwrap();
            assert!(dist(&image, &fd[k]).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn complexify_examples() {
        let l = complexify(&HLine::ints(0, 1, -1));
        assert_eq!(l.field(), Field::Complex);
        let z = HPoint::complex([Complex64::new(0.0, 1.0), 1.0.into(), 1.0.into()]).unwrap();
        assert!(dist_point_line(&z, &l).unwrap() < 1e-15);
        for p in [HPoint::ints(-1, 1, 1), HPoint::ints(1, 1, 1)] {
            let pc = HPoint::complex(p.to_complex()).unwrap();
            assert!(dist_point_line(&pc, &l).unwrap() < 1e-15);
        }
    }

    #[test]
    fn text_round_trip() {
        let p = HPoint::affine_ratio(1, 4, 1, 1);
        assert_eq!(p.to_string(), "1:4/1:1/1:1");
        assert_eq!(p.to_string().parse::<HPoint>().unwrap(), p);
        let q: HPoint = "0.5/0.25/1".parse().unwrap();
        assert!(!q.is_exact());
        let back: HPoint = q.to_string().parse().unwrap();
        assert!(dist(&q, &back).unwrap() == 0.0);
        let z: HPoint = "0+1i/1/1".parse().unwrap();
        assert_eq!(z.field(), Field::Complex);
        let back: HPoint = z.to_string().parse().unwrap();
        assert!(dist(&z, &back).unwrap() < 1e-15);
        let m = ProjMap::ints([[2, 0, 0], [0, 1, 1], [0, -1, 3]]).unwrap();
        assert_eq!(m.to_text().parse::<ProjMap>().unwrap(), m);
    }

    #[test]
    fn dual_functoriality() {
        let g = ProjMap::ints([[2, 0, 0], [0, 1, 1], [0, -1, 3]]).unwrap();
        let h = ProjMap::ints([[1, 2, 0], [0, 1, 0], [3, 0, 1]]).unwrap();
        assert_eq!(g.compose(&h).dual(), g.dual().compose(&h.dual()));
        assert_eq!(g.compose(&g.inverse()), ProjMap::identity());
    }
}
