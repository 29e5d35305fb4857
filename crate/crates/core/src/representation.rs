//! Group elements as frame maps between the seed and its orbit boxes.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat3};
use crate::marked_box::{display_word, orbit, BoxOp, MarkedBox, BIT_CEILING};
use crate::projective::{dist, map_from_correspondence, ProjMap};
use crate::scalar::fmt_f64;
use crate::spectrum::{spectrum, SpectrumClass, SpectrumReport};

pub const MARK_TOL: f64 = 1e-9;
pub const DEDUPE_TOL: f64 = 1e-12;

/// A reduced word over {i, 1, 2}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(String);

impl Word {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        reduce_word(&format!("{}{}", self.0, other.0)).expect("valid letters")
    }

    pub fn reversed(&self) -> Word {
        reduce_word(&self.0.chars().rev().collect::<String>()).expect("valid letters")
    }

    pub fn tau_count(&self) -> usize {
        self.0.chars().filter(|c| *c != 'i').count()
    }

    pub fn i_count(&self) -> usize {
        self.0.chars().filter(|c| *c == 'i').count()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(display_word(&self.0))
    }
}

/// Remove "ii" pairs until none remain.
pub fn reduce_word(raw: &str) -> Result<Word> {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        BoxOp::from_letter(c)?;
        if c == 'i' && out.ends_with('i') {
            out.pop();
        } else {
            out.push(c);
        }
    }
    Ok(Word(out))
}

#[derive(Debug, Clone)]
pub struct GroupElement {
    pub word: Word,
    pub map: ProjMap,
    /// max of ρ(map·t, t_image) and ρ(map·b, b_image).
    pub mark_residual: f64,
    /// Whether the frame was matched against the mirror labeling (q,p,s,r) of
    /// the image box, which fits the marks better.
    pub mirrored: bool,
    pub dual_map: ProjMap,
}

impl GroupElement {
    pub fn in_sigma(&self, mark_tol: f64) -> bool {
        self.mark_residual <= mark_tol
    }

    pub fn matrix(&self) -> Mat3 {
        self.map.to_f64()
    }

    /// `word<TAB>m00,...,m22<TAB>class<TAB>|λ1|,|λ2|,|λ3|<TAB>mark_residual`
    /// with determinant-one entries.
    pub fn dump_line(&self) -> String {
        let m = self.map.det_normalized();
        let entries: Vec<String> = m.iter().flatten().map(|x| fmt_f64(*x)).collect();
        let (class, mods) = match spectrum(&self.map) {
            Ok(r) => (r.class.name(), r.normalized.map(|z| fmt_f64(z.norm())).join(",")),
            Err(_) => ("ill-conditioned", "nan,nan,nan".to_string()),
        };
        format!("{}\t{}\t{}\t{}\t{}", self.word, entries.join(","), class, mods, fmt_f64(self.mark_residual))
    }
}

fn element_from_box(word: Word, seed: &MarkedBox, image: &MarkedBox) -> Result<GroupElement> {
    let src = seed.frame();
    let fit = |target: &MarkedBox| -> Result<(ProjMap, f64)> {
        let map = map_from_correspondence(&src, &target.frame())
            .map_err(|_| Error::DegenerateBox(Some(word.as_str().to_string())))?;
        let dt = dist(&map.apply_point(&seed.t)?, &target.t)?;
        let db = dist(&map.apply_point(&seed.b)?, &target.b)?;
        Ok((map, dt.max(db)))
    };
    let (direct, rd) = fit(image)?;
    let (map, mark_residual, mirrored) = if rd == 0.0 {
        (direct, rd, false)
    } else {
        let (mirror, rm) = fit(&image.mirror())?;
        if rm < rd {
            (mirror, rm, true)
        } else {
            (direct, rd, false)
        }
    };
    let dual_map = map.dual();
    Ok(GroupElement { word, map, mark_residual, mirrored, dual_map })
}

/// The element whose map carries the seed frame to the frame of Box(word),
/// without the mark check.
pub fn rho_hat_unchecked(word: &Word, seed: &MarkedBox) -> Result<GroupElement> {
    let image = seed.apply_word(word.as_str())?;
    element_from_box(word.clone(), seed, &image)
}

/// As `rho_hat_unchecked`, failing with `MarkMismatch` when the marks do not
/// follow the frame within `mark_tol`.
pub fn rho_hat(word: &Word, seed: &MarkedBox, mark_tol: f64) -> Result<GroupElement> {
    let g = rho_hat_unchecked(word, seed)?;
    if g.mark_residual > mark_tol {
        return Err(Error::MarkMismatch { word: word.as_str().to_string(), residual: g.mark_residual });
    }
    Ok(g)
}

/// All reduced words up to `maxlen`, as elements, with maps merged when their
/// sup-normalized arrays agree within `dedupe_tol` (shortest word kept).
/// Elements failing the mark check are kept; use `in_sigma` to filter.
pub fn enumerate_group(seed: &MarkedBox, maxlen: usize, dedupe_tol: f64) -> Result<Vec<GroupElement>> {
    let boxes = orbit(seed, maxlen, &BoxOp::ALL, BIT_CEILING)?;
    let elements: Vec<GroupElement> = boxes
        .nodes
        .par_iter()
        .map(|n| element_from_box(Word(n.word.clone()), seed, &n.bx))
        .collect::<Result<_>>()?;
    Ok(dedupe(elements, dedupe_tol))
}

fn dedupe(elements: Vec<GroupElement>, tol: f64) -> Vec<GroupElement> {
    let arrays: Vec<Mat3> = elements.iter().map(|g| linalg::sup_normalize(&g.map.to_f64())).collect();
    // Bucket by rounded leading entries so the pass stays near linear.
    let key = |m: &Mat3| -> [i64; 3] {
        let q = 1e6;
        [(m[0][0] * q).round() as i64, (m[1][1] * q).round() as i64, (m[2][2] * q).round() as i64]
    };
    let mut buckets: std::collections::HashMap<[i64; 3], Vec<usize>> = std::collections::HashMap::new();
    let mut keep = Vec::new();
    'outer: for (k, m) in arrays.iter().enumerate() {
        let base = key(m);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let nk = [base[0] + dx, base[1] + dy, base[2] + dz];
                    if let Some(list) = buckets.get(&nk) {
                        if list.iter().any(|&j| linalg::projective_distance(&arrays[j], m) <= tol) {
                            continue 'outer;
                        }
                    }
                }
            }
        }
        buckets.entry(base).or_default().push(k);
        keep.push(k);
    }
    let mut slots: Vec<Option<GroupElement>> = elements.into_iter().map(Some).collect();
    keep.into_iter().map(|k| slots[k].take().unwrap()).collect()
}

/// Loxodromic elements with their spectra; elements whose spectrum is
/// ill-conditioned are skipped.
pub fn find_loxodromics(elements: &[GroupElement]) -> Vec<(GroupElement, SpectrumReport)> {
    let reports: Vec<Option<SpectrumReport>> = elements.par_iter().map(|g| spectrum(&g.map).ok()).collect();
    elements
        .iter()
        .zip(reports)
        .filter_map(|(g, r)| match r {
            Some(r) if r.class == SpectrumClass::Loxodromic => Some((g.clone(), r)),
            _ => None,
        })
        .collect()
}

/// First pair (in list order) whose fixed point sets are pairwise farther
/// apart than `sep_tol`, with that separation.
pub fn disjoint_pair(lox: &[(GroupElement, SpectrumReport)], sep_tol: f64) -> Option<(usize, usize, f64)> {
    let fixed: Vec<Vec<[f64; 3]>> = lox.iter().map(|(_, r)| r.fixed_points()).collect();
    for i in 0..lox.len() {
        for j in (i + 1)..lox.len() {
            let mut sep = f64::INFINITY;
            for a in &fixed[i] {
                for b in &fixed[j] {
                    sep = sep.min(linalg::angle(a, b));
                }
            }
            if sep > sep_tol {
                return Some((i, j, sep));
            }
        }
    }
    None
}

pub fn dual_element(g: &GroupElement) -> ProjMap {
    g.map.dual()
}

/// Words (all reduced words up to `maxlen`) whose map has order exactly 3 up
/// to scale.
pub fn order_three_words(seed: &MarkedBox, maxlen: usize) -> Result<Vec<Word>> {
    let boxes = orbit(seed, maxlen, &BoxOp::ALL, BIT_CEILING)?;
    let found: Vec<Option<Word>> = boxes
        .nodes
        .par_iter()
        .map(|n| {
            let g = element_from_box(Word(n.word.clone()), seed, &n.bx).ok()?;
            if g.map.is_identity() {
                return None;
            }
            let cube = g.map.compose(&g.map).compose(&g.map);
            let is_order3 = if cube.is_exact() {
                cube.is_identity()
            } else {
                linalg::projective_distance(&cube.to_f64(), &linalg::IDENTITY) <= 1e-10
            };
            is_order3.then(|| g.word.clone())
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

/// ‖ρ(uv) − ρ(v)·ρ(u)‖ after sup-normalization and sign alignment.
pub fn anti_homomorphism_residual(u: &Word, v: &Word, seed: &MarkedBox) -> Result<f64> {
    let uv = u.concat(v);
    let g_uv = rho_hat_unchecked(&uv, seed)?;
    let g_u = rho_hat_unchecked(u, seed)?;
    let g_v = rho_hat_unchecked(v, seed)?;
    let prod = g_v.map.compose(&g_u.map);
    Ok(linalg::projective_distance(&g_uv.map.to_f64(), &prod.to_f64()))
}
