//! Marked boxes and the three Pappus box operations.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, V3};
use crate::projective::{self, det_ints, dist, join, meet, HLine, HPoint, ProjMap};
use crate::scalar::fmt_f64;

/// Default cap on coordinate bit length before exact boxes drop to floats.
pub const BIT_CEILING: u64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct MarkedBox {
    pub p: HPoint,
    pub q: HPoint,
    pub r: HPoint,
    pub s: HPoint,
    pub t: HPoint,
    pub b: HPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoxOp {
    I,
    Tau1,
    Tau2,
}

impl BoxOp {
    pub const ALL: [BoxOp; 3] = [BoxOp::I, BoxOp::Tau1, BoxOp::Tau2];

    pub fn letter(self) -> char {
        match self {
            BoxOp::I => 'i',
            BoxOp::Tau1 => '1',
            BoxOp::Tau2 => '2',
        }
    }

    pub fn from_letter(c: char) -> Result<Self> {
        match c {
            'i' => Ok(BoxOp::I),
            '1' => Ok(BoxOp::Tau1),
            '2' => Ok(BoxOp::Tau2),
            other => Err(Error::BadLetter(other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PappusTriple {
    pub u: HPoint,
    pub m: HPoint,
    pub v: HPoint,
    pub axis: HLine,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ThreeVerticesCollinear(&'static str),
    MarkOffEdge(&'static str),
    MarkEqualsVertex(&'static str),
    AtInfinity(&'static str),
    NotConvex,
    MarkOutsideEdge(&'static str),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ThreeVerticesCollinear(w) => write!(f, "three vertices collinear ({w})"),
            Violation::MarkOffEdge(w) => write!(f, "mark not on {w} edge"),
            Violation::MarkEqualsVertex(w) => write!(f, "mark equals vertex ({w})"),
            Violation::AtInfinity(w) => write!(f, "point {w} at infinity of the chart"),
            Violation::NotConvex => write!(f, "quadrilateral not convex"),
            Violation::MarkOutsideEdge(w) => write!(f, "mark outside the open {w} edge"),
        }
    }
}

fn sign_det(a: &HPoint, b: &HPoint, c: &HPoint) -> i8 {
    match (a.ints_ref(), b.ints_ref(), c.ints_ref()) {
        (Some(x), Some(y), Some(z)) => {
            let d = det_ints(x, y, z);
            if d.is_zero() {
                0
            } else if d.is_positive() {
                1
            } else {
                -1
            }
        }
        _ => {
            let (x, y, z) = (a.to_real().unwrap(), b.to_real().unwrap(), c.to_real().unwrap());
            let d = linalg::dot(&x, &linalg::cross(&y, &z));
            if d.abs() <= projective::SCALE_TOL {
                0
            } else if d > 0.0 {
                1
            } else {
                -1
            }
        }
    }
}

/// Representative with positive z, so that determinant signs read in the
/// chart z = 1. `None` when the point is on the line at infinity.
fn lift(p: &HPoint) -> Option<HPoint> {
    match p.ints_ref() {
        Some(v) => {
            if v[2].is_zero() {
                None
            } else if v[2].is_negative() {
                Some(HPoint(projective::Coords::Exact([-&v[0], -&v[1], -&v[2]])))
            } else {
                Some(p.clone())
            }
        }
        None => {
            let v = p.to_real()?;
            if v[2].abs() <= projective::SCALE_TOL {
                None
            } else {
                let s = v[2].signum();
                Some(HPoint(projective::Coords::Real([v[0] * s, v[1] * s, v[2] * s])))
            }
        }
    }
}

impl MarkedBox {
    pub fn new(p: HPoint, q: HPoint, r: HPoint, s: HPoint, t: HPoint, b: HPoint) -> Self {
        MarkedBox { p, q, r, s, t, b }
    }

    /// Square seed with marks (tx, 1) and (bx, -1).
    pub fn square(t: (i64, i64), b: (i64, i64)) -> Self {
        MarkedBox::new(
            HPoint::ints(-1, 1, 1),
            HPoint::ints(1, 1, 1),
            HPoint::ints(1, -1, 1),
            HPoint::ints(-1, -1, 1),
            HPoint::affine_ratio(t.0, t.1, 1, 1),
            HPoint::affine_ratio(b.0, b.1, -1, 1),
        )
    }

    /// The deliberately asymmetric default seed: t = (1/4, 1), b = (-1/3, -1).
    pub fn default_seed() -> Self {
        MarkedBox::square((1, 4), (-1, 3))
    }

    /// The mirror-symmetric seed Θ₀: t = (0, 1), b = (0, -1).
    pub fn symmetric_seed() -> Self {
        MarkedBox::square((0, 1), (0, 1))
    }

    pub fn points(&self) -> [&HPoint; 6] {
        [&self.p, &self.q, &self.r, &self.s, &self.t, &self.b]
    }

    pub fn frame(&self) -> [HPoint; 4] {
        [self.p.clone(), self.q.clone(), self.r.clone(), self.s.clone()]
    }

    pub fn is_exact(&self) -> bool {
        self.points().iter().all(|p| p.is_exact())
    }

    pub fn bits(&self) -> u64 {
        self.points().iter().map(|p| p.bits()).max().unwrap_or(0)
    }

    pub fn to_float(&self) -> MarkedBox {
        MarkedBox::new(
            self.p.to_float(),
            self.q.to_float(),
            self.r.to_float(),
            self.s.to_float(),
            self.t.to_float(),
            self.b.to_float(),
        )
    }

    /// The same box with the relabeling (p,q,r,s;t,b) → (q,p,s,r;t,b).
    pub fn mirror(&self) -> MarkedBox {
        MarkedBox::new(self.q.clone(), self.p.clone(), self.s.clone(), self.r.clone(), self.t.clone(), self.b.clone())
    }

    pub fn top_edge(&self) -> Result<HLine> {
        join(&self.p, &self.q).map_err(|_| Error::DegenerateBox(None))
    }

    pub fn bottom_edge(&self) -> Result<HLine> {
        join(&self.r, &self.s).map_err(|_| Error::DegenerateBox(None))
    }

    /// Equality as boxes: labelwise, or after the mirror relabeling.
    pub fn same_class(&self, other: &MarkedBox) -> bool {
        let eq = |a: &MarkedBox, b: &MarkedBox| a.points().iter().zip(b.points()).all(|(x, y)| x.equivalent(y));
        eq(self, other) || eq(&self.mirror(), other)
    }

    pub fn transform(&self, a: &ProjMap) -> Result<MarkedBox> {
        Ok(MarkedBox::new(
            a.apply_point(&self.p)?,
            a.apply_point(&self.q)?,
            a.apply_point(&self.r)?,
            a.apply_point(&self.s)?,
            a.apply_point(&self.t)?,
            a.apply_point(&self.b)?,
        ))
    }

    /// All violated invariants, with convexity read in the chart z = 1.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let v = [&self.p, &self.q, &self.r, &self.s];
        let names = ["pqr", "pqs", "prs", "qrs"];
        for (k, (a, b, c)) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)].into_iter().enumerate() {
            if projective::collinear(v[a], v[b], v[c]) {
                out.push(Violation::ThreeVerticesCollinear(names[k]));
            }
        }
        for (mark, a, b, edge) in [(&self.t, &self.p, &self.q, "top"), (&self.b, &self.r, &self.s, "bottom")] {
            if mark.equivalent(a) || mark.equivalent(b) {
                out.push(Violation::MarkEqualsVertex(edge));
            } else if !projective::collinear(mark, a, b) {
                out.push(Violation::MarkOffEdge(edge));
            }
        }
        if !out.is_empty() {
            return out;
        }
        let labels = ["p", "q", "r", "s", "t", "b"];
        let lifted: Vec<Option<HPoint>> = self.points().iter().map(|x| lift(x)).collect();
        for (k, l) in lifted.iter().enumerate() {
            if l.is_none() {
                out.push(Violation::AtInfinity(labels[k]));
            }
        }
        if !out.is_empty() {
            return out;
        }
        let [p, q, r, s, t, b] = [0, 1, 2, 3, 4, 5].map(|k| lifted[k].clone().unwrap());
        let turns = [sign_det(&p, &q, &r), sign_det(&q, &r, &s), sign_det(&r, &s, &p), sign_det(&s, &p, &q)];
        if turns.iter().any(|x| *x != turns[0]) {
            out.push(Violation::NotConvex);
        }
        let spq = sign_det(&s, &p, &q);
        if sign_det(&s, &p, &t) != spq || sign_det(&s, &t, &q) != spq {
            out.push(Violation::MarkOutsideEdge("top"));
        }
        let prs = sign_det(&p, &r, &s);
        if sign_det(&p, &r, &b) != prs || sign_det(&p, &b, &s) != prs {
            out.push(Violation::MarkOutsideEdge("bottom"));
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Whether `x` lies in the closed convex quadrilateral of this box (chart z = 1).
    pub fn contains(&self, x: &HPoint) -> bool {
        let (Some(p), Some(q), Some(r), Some(s), Some(x)) =
            (lift(&self.p), lift(&self.q), lift(&self.r), lift(&self.s), lift(x))
        else {
            return false;
        };
        let o = sign_det(&p, &q, &r);
        [(&p, &q), (&q, &r), (&r, &s), (&s, &p)].iter().all(|(a, b)| {
            let d = sign_det(a, b, &x);
            d == 0 || d == o
        })
    }

    pub fn pappus_triple(&self) -> Result<PappusTriple> {
        let deg = |_| Error::DegenerateBox(None);
        let u = meet(&join(&self.p, &self.b).map_err(deg)?, &join(&self.t, &self.s).map_err(deg)?).map_err(deg)?;
        let m = meet(&join(&self.p, &self.r).map_err(deg)?, &join(&self.q, &self.s).map_err(deg)?).map_err(deg)?;
        let v = meet(&join(&self.t, &self.r).map_err(deg)?, &join(&self.q, &self.b).map_err(deg)?).map_err(deg)?;
        let axis = join(&u, &v).map_err(deg)?;
        if u.equivalent(&m) || m.equivalent(&v) {
            return Err(Error::DegenerateBox(None));
        }
        Ok(PappusTriple { u, m, v, axis })
    }

    pub fn apply(&self, op: BoxOp) -> Result<MarkedBox> {
        match op {
            BoxOp::I => Ok(MarkedBox::new(
                self.r.clone(),
                self.s.clone(),
                self.p.clone(),
                self.q.clone(),
                self.b.clone(),
                self.t.clone(),
            )),
            BoxOp::Tau1 => {
                let pt = self.pappus_triple()?;
                Ok(MarkedBox::new(self.p.clone(), self.q.clone(), pt.v, pt.u, self.t.clone(), pt.m))
            }
            BoxOp::Tau2 => {
                let pt = self.pappus_triple()?;
                Ok(MarkedBox::new(pt.u, pt.v, self.r.clone(), self.s.clone(), pt.m, self.b.clone()))
            }
        }
    }

    /// Apply a word, rightmost letter first.
    pub fn apply_word(&self, word: &str) -> Result<MarkedBox> {
        let mut out = self.clone();
        for c in word.chars().rev() {
            out = out.apply(BoxOp::from_letter(c)?).map_err(|_| Error::DegenerateBox(Some(word.to_string())))?;
        }
        Ok(out)
    }

    pub fn unit_points(&self) -> [V3; 6] {
        self.points().map(|p| p.to_real().expect("real box"))
    }

    /// Max pairwise ρ-distance over the six points.
    pub fn diameter(&self) -> f64 {
        max_pairwise(&self.unit_points())
    }

    /// Max pairwise distance over (t, u, v, b): the convex region that
    /// contains the part of the invariant curve between the two marks.
    pub fn arc_bound(&self) -> Result<f64> {
        let pt = self.pappus_triple()?;
        let pts = [&self.t, &pt.u, &pt.v, &self.b].map(|p| p.to_real().unwrap());
        Ok(max_pairwise(&pts))
    }

    /// Max pairwise angle over the lines (pq, rs, pr, qs): the line-field
    /// counterpart of `arc_bound`.
    pub fn line_bound(&self) -> Result<f64> {
        let deg = |_| Error::DegenerateBox(None);
        let lines = [
            join(&self.p, &self.q).map_err(deg)?,
            join(&self.r, &self.s).map_err(deg)?,
            join(&self.p, &self.r).map_err(deg)?,
            join(&self.q, &self.s).map_err(deg)?,
        ];
        Ok(max_pairwise(&lines.map(|l| l.to_real().unwrap())))
    }

    pub fn to_tsv_fields(&self) -> String {
        self.points().iter().map(|p| p.to_string()).collect::<Vec<_>>().join("\t")
    }
}

/// `default`, `symmetric`, or six points `p;q;r;s;t;b` in `x/y/z` form.
impl std::str::FromStr for MarkedBox {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "default" => Ok(MarkedBox::default_seed()),
            "symmetric" => Ok(MarkedBox::symmetric_seed()),
            inline => {
                let pts: Vec<HPoint> = inline.split(';').map(|p| p.trim().parse()).collect::<Result<_>>()?;
                let [p, q, r, s, t, b]: [HPoint; 6] = pts
                    .try_into()
                    .map_err(|_| Error::Parse("a box needs six points p;q;r;s;t;b".into()))?;
                Ok(MarkedBox::new(p, q, r, s, t, b))
            }
        }
    }
}

pub fn max_pairwise(pts: &[V3]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            best = best.max(linalg::angle(&pts[i], &pts[j]));
        }
    }
    best
}

pub fn box_dist(a: &HPoint, b: &HPoint) -> f64 {
    dist(a, b).unwrap_or(f64::NAN)
}

#[derive(Debug, Clone)]
pub struct OrbitNode {
    pub word: String,
    pub bx: MarkedBox,
    pub diameter: f64,
}

impl OrbitNode {
    pub fn to_tsv(&self) -> String {
        format!("{}\t{}\t{}", display_word(&self.word), self.bx.to_tsv_fields(), fmt_f64(self.diameter))
    }
}

pub fn display_word(w: &str) -> &str {
    if w.is_empty() {
        "ε"
    } else {
        w
    }
}

#[derive(Debug, Clone, Default)]
pub struct Orbit {
    pub nodes: Vec<OrbitNode>,
    /// Words at which exact coordinates exceeded the bit ceiling and the
    /// subtree continued in floating point.
    pub float_fallbacks: Vec<String>,
}

fn letter_rank(c: char) -> u8 {
    match c {
        'i' => 0,
        '1' => 1,
        _ => 2,
    }
}

/// Order words by length, then lexicographically with i < 1 < 2.
pub fn word_cmp(a: &str, b: &str) -> std::cmp::Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.chars().map(letter_rank).cmp(b.chars().map(letter_rank)))
}

/// Reduced words (no "ii") over the alphabet, up to the given length, in
/// `word_cmp` order.
pub fn reduced_words(alphabet: &[BoxOp], maxlen: usize) -> Vec<String> {
    let mut ops: Vec<BoxOp> = alphabet.to_vec();
    ops.sort();
    ops.dedup();
    let mut out = vec![String::new()];
    let mut level = vec![String::new()];
    for _ in 0..maxlen {
        let mut next = Vec::new();
        for op in &ops {
            for w in &level {
                if *op == BoxOp::I && w.starts_with('i') {
                    continue;
                }
                let mut nw = String::with_capacity(w.len() + 1);
                nw.push(op.letter());
                nw.push_str(w);
                next.push(nw);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Breadth-first enumeration of reduced words with their boxes.
pub fn orbit(seed: &MarkedBox, depth: usize, alphabet: &[BoxOp], bit_ceiling: u64) -> Result<Orbit> {
    let mut ops: Vec<BoxOp> = alphabet.to_vec();
    ops.sort();
    ops.dedup();
    let mut result = Orbit::default();
    result.nodes.push(OrbitNode { word: String::new(), bx: seed.clone(), diameter: seed.diameter() });
    let mut level: Vec<(String, MarkedBox)> = vec![(String::new(), seed.clone())];
    for _ in 0..depth {
        let jobs: Vec<(BoxOp, usize)> = ops
            .iter()
            .flat_map(|op| (0..level.len()).map(move |k| (*op, k)))
            .filter(|(op, k)| !(*op == BoxOp::I && level[*k].0.starts_with('i')))
            .collect();
        let next: Vec<Result<(String, MarkedBox, bool)>> = jobs
            .par_iter()
            .map(|(op, k)| {
                let (w, bx) = &level[*k];
                let word = format!("{}{}", op.letter(), w);
                let nb = bx.apply(*op).map_err(|_| Error::DegenerateBox(Some(word.clone())))?;
                if nb.is_exact() && nb.bits() > bit_ceiling {
                    Ok((word, nb.to_float(), true))
                } else {
                    Ok((word, nb, false))
                }
            })
            .collect();
        let mut new_level = Vec::with_capacity(next.len());
        for item in next {
            let (word, bx, fell_back) = item?;
            if fell_back {
                result.float_fallbacks.push(word.clone());
            }
            result.nodes.push(OrbitNode { word: word.clone(), bx: bx.clone(), diameter: 0.0 });
            new_level.push((word, bx));
        }
        level = new_level;
    }
    result.nodes.par_iter_mut().for_each(|n| n.diameter = n.bx.diameter());
    Ok(result)
}

fn random_ratio<R: Rng>(rng: &mut R, lo: i64, hi: i64, den: i64) -> BigRational {
    BigRational::new(rng.gen_range(lo..=hi).into(), den.into())
}

/// Random valid box with small rational coordinates: a jittered square with
/// marks at random rational positions inside the top and bottom edges.
pub fn random_box<R: Rng>(rng: &mut R) -> MarkedBox {
    loop {
        let corner = |rng: &mut R, x: i64, y: i64| {
            let den = rng.gen_range(1..=12);
            let jx = random_ratio(rng, -den / 3, den / 3, den);
            let jy = random_ratio(rng, -den / 3, den / 3, den);
            HPoint::affine(BigRational::from_integer(x.into()) + jx, BigRational::from_integer(y.into()) + jy)
        };
        let p = corner(rng, -1, 1);
        let q = corner(rng, 1, 1);
        let r = corner(rng, 1, -1);
        let s = corner(rng, -1, -1);
        let along = |rng: &mut R, a: &HPoint, b: &HPoint| {
            let den: i64 = rng.gen_range(2..=16);
            let k: i64 = rng.gen_range(1..den);
            let a = a.ints_ref().unwrap();
            let b = b.ints_ref().unwrap();
            // affine combination (1-λ)a + λb with λ = k/den, on z-normalized reps
            let v: [BigInt; 3] = std::array::from_fn(|i| {
                BigInt::from(den - k) * &a[i] * &b[2] + BigInt::from(k) * &b[i] * &a[2]
            });
            HPoint::exact(v).unwrap()
        };
        let t = along(rng, &p, &q);
        let b = along(rng, &r, &s);
        let bx = MarkedBox::new(p, q, r, s, t, b);
        if bx.is_valid() {
            return bx;
        }
    }
}

/// Random invertible map with small integer entries.
pub fn random_map<R: Rng>(rng: &mut R) -> ProjMap {
    loop {
        let m: [[i64; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-5..=5)));
        if let Ok(map) = ProjMap::ints(m) {
            return map;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(xn: i64, xd: i64, yn: i64, yd: i64) -> HPoint {
        HPoint::affine_ratio(xn, xd, yn, yd)
    }

    #[test]
    fn theta0_is_valid() {
        assert!(MarkedBox::symmetric_seed().validate().is_empty());
        assert!(MarkedBox::default_seed().validate().is_empty());
    }

    #[test]
    fn collinear_vertices_flagged() {
        let mut bx = MarkedBox::symmetric_seed();
        bx.r = pt(3, 1, 1, 1);
        assert!(bx.validate().iter().any(|v| matches!(v, Violation::ThreeVerticesCollinear(_))));
        assert!(bx.validate()[0].to_string().contains("three vertices collinear"));
    }

    #[test]
    fn mark_on_vertex_flagged() {
        let mut bx = MarkedBox::symmetric_seed();
        bx.t = bx.p.clone();
        assert_eq!(bx.validate(), vec![Violation::MarkEqualsVertex("top")]);
        assert_eq!(bx.validate()[0].to_string(), "mark equals vertex (top)");
    }

    #[test]
    fn mark_outside_edge_flagged() {
        let mut bx = MarkedBox::symmetric_seed();
        bx.t = pt(2, 1, 1, 1);
        assert_eq!(bx.validate(), vec![Violation::MarkOutsideEdge("top")]);
    }

    #[test]
    fn pappus_triple_theta0() {
        let pt0 = MarkedBox::symmetric_seed().pappus_triple().unwrap();
        assert_eq!(pt0.u, pt(-1, 2, 0, 1));
        assert_eq!(pt0.m, pt(0, 1, 0, 1));
        assert_eq!(pt0.v, pt(1, 2, 0, 1));
        assert_eq!(pt0.axis, HLine::ints(0, 1, 0));
    }

    #[test]
    fn pappus_triple_tau1_theta0() {
        let child = MarkedBox::symmetric_seed().apply(BoxOp::Tau1).unwrap();
        assert_eq!(child, MarkedBox::new(pt(-1, 1, 1, 1), pt(1, 1, 1, 1), pt(1, 2, 0, 1), pt(-1, 2, 0, 1), pt(0, 1, 1, 1), pt(0, 1, 0, 1)));
        let tr = child.pappus_triple().unwrap();
        assert_eq!(tr.u, pt(-1, 3, 1, 3));
        assert_eq!(tr.m, pt(0, 1, 1, 3));
        assert_eq!(tr.v, pt(1, 3, 1, 3));
        assert_eq!(tr.axis, HLine::ints(0, 3, -1));
    }

    #[test]
    fn box_ops_theta0() {
        let th = MarkedBox::symmetric_seed();
        assert_eq!(
            th.apply(BoxOp::I).unwrap(),
            MarkedBox::new(pt(1, 1, -1, 1), pt(-1, 1, -1, 1), pt(-1, 1, 1, 1), pt(1, 1, 1, 1), pt(0, 1, -1, 1), pt(0, 1, 1, 1))
        );
        assert_eq!(
            th.apply(BoxOp::Tau2).unwrap(),
            MarkedBox::new(pt(-1, 2, 0, 1), pt(1, 2, 0, 1), pt(1, 1, -1, 1), pt(-1, 1, -1, 1), pt(0, 1, 0, 1), pt(0, 1, -1, 1))
        );
    }

    #[test]
    fn diameter_theta0() {
        let th = MarkedBox::symmetric_seed();
        // p·r = -1 gives arccos(1/3), but t·b = 0 and p·b = 0 reach π/2.
        let vertex_only = max_pairwise(&th.unit_points()[..4]);
        assert!((vertex_only - (1.0f64 / 3.0).acos()).abs() < 1e-14);
        assert!((th.diameter() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        // The child keeps p and gains v = (1/2, 0): ⟨(-1,1,1),(1,0,2)⟩ = 1
        // against norms √3·√5.
        let child = th.apply(BoxOp::Tau1).unwrap();
        let want = (1.0 / 15f64.sqrt()).acos();
        assert!((child.diameter() - want).abs() < 1e-14);
        assert!(child.diameter() < th.diameter());
    }

    #[test]
    fn orbit_counts() {
        let th = MarkedBox::symmetric_seed();
        let o = orbit(&th, 1, &[BoxOp::Tau1, BoxOp::Tau2], BIT_CEILING).unwrap();
        let words: Vec<&str> = o.nodes.iter().map(|n| n.word.as_str()).collect();
        assert_eq!(words, vec!["", "1", "2"]);
        assert_eq!(o.nodes[1].bx, th.apply(BoxOp::Tau1).unwrap());
        let o = orbit(&th, 2, &BoxOp::ALL, BIT_CEILING).unwrap();
        assert_eq!(o.nodes.len(), 12);
        assert!(o.nodes.iter().all(|n| !n.word.contains("ii")));
        assert_eq!(orbit(&th, 0, &BoxOp::ALL, BIT_CEILING).unwrap().nodes.len(), 1);
        let words: Vec<String> = o.nodes.iter().map(|n| n.word.clone()).collect();
        assert_eq!(words, reduced_words(&BoxOp::ALL, 2));
    }

    #[test]
    fn bit_ceiling_falls_back_to_float() {
        let o = orbit(&MarkedBox::default_seed(), 4, &[BoxOp::Tau1, BoxOp::Tau2], 8).unwrap();
        assert!(!o.float_fallbacks.is_empty());
        let exact = orbit(&MarkedBox::default_seed(), 4, &[BoxOp::Tau1, BoxOp::Tau2], BIT_CEILING).unwrap();
        for (a, b) in o.nodes.iter().zip(&exact.nodes) {
            assert_eq!(a.word, b.word);
            for (x, y) in a.bx.points().iter().zip(b.bx.points()) {
                assert!(box_dist(x, y) < 1e-12);
            }
        }
    }

    #[test]
    fn random_boxes_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let bx = random_box(&mut rng);
            assert!(bx.is_valid());
            for op in [BoxOp::Tau1, BoxOp::Tau2] {
                let child = bx.apply(op).unwrap();
                assert!(child.is_valid());
                assert!(child.points().iter().all(|x| bx.contains(x)));
            }
        }
    }

    #[test]
    fn mirror_commutes_with_ops() {
        let bx = MarkedBox::default_seed();
        for op in BoxOp::ALL {
            assert!(bx.mirror().apply(op).unwrap().same_class(&bx.apply(op).unwrap()));
        }
    }
}
