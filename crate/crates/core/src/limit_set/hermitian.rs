//! Search for a Hermitian form preserved by a set of real projective maps.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat3};
use crate::projective::ProjMap;

/// Coordinates of a Hermitian array H = S + iA: the six entries of the
/// symmetric S on and above the diagonal, then the three of the
/// antisymmetric A above it.
const SYM: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
const ANTI: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

const NULL_TOL: f64 = 1e-9;
const RANDOM_TRIALS: usize = 4096;

#[derive(Debug, Clone)]
pub struct HermitianResult {
    /// A nondegenerate invariant form of signature (2,1) exists, or every
    /// form is invariant.
    pub found: bool,
    pub signature: Option<(usize, usize)>,
    /// Smallest ‖gᵀHg − H‖ over unit forms, stacked over the maps.
    pub joint_residual: f64,
    /// The invariant form found, sup-normalized.
    pub form: Option<[[Complex64; 3]; 3]>,
    /// Every Hermitian form is invariant (all maps are the identity).
    pub all_invariant: bool,
    pub null_dim: usize,
}

fn basis_array(k: usize) -> (Mat3, bool) {
    let mut m = [[0.0; 3]; 3];
    if k < 6 {
        let (i, j) = SYM[k];
        m[i][j] = 1.0;
        m[j][i] = 1.0;
        (m, true)
    } else {
        let (i, j) = ANTI[k - 6];
        m[i][j] = 1.0;
        m[j][i] = -1.0;
        (m, false)
    }
}

fn coords_of(m: &Mat3, symmetric: bool) -> Vec<f64> {
    if symmetric {
        SYM.iter().map(|&(i, j)| m[i][j]).collect()
    } else {
        ANTI.iter().map(|&(i, j)| m[i][j]).collect()
    }
}

/// Rows of the 9×9 operator H ↦ gᵀHg − H for one determinant-one g. The
/// symmetric and antisymmetric parts do not mix because g is real.
fn operator_rows(g: &Mat3) -> Vec<Vec<f64>> {
    let gt = linalg::transpose(g);
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(9);
    for k in 0..9 {
        let (e, symmetric) = basis_array(k);
        let mut img = linalg::mat_mul(&linalg::mat_mul(&gt, &e), g);
        for i in 0..3 {
            for j in 0..3 {
                img[i][j] -= e[i][j];
            }
        }
        let part = coords_of(&img, symmetric);
        let mut col = vec![0.0; 9];
        let offset = if symmetric { 0 } else { 6 };
        for (t, x) in part.into_iter().enumerate() {
            col[offset + t] = x;
        }
        cols.push(col);
    }
    (0..9).map(|r| (0..9).map(|c| cols[c][r]).collect()).collect()
}

fn form_of(h: &[f64]) -> [[Complex64; 3]; 3] {
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for (k, &(i, j)) in SYM.iter().enumerate() {
        out[i][j].re = h[k];
        out[j][i].re = h[k];
    }
    for (k, &(i, j)) in ANTI.iter().enumerate() {
        out[i][j].im = h[6 + k];
        out[j][i].im = -h[6 + k];
    }
    out
}

/// Signature (positive, negative) of a Hermitian array, from the 6×6 real
/// form [[S, −A], [A, S]] whose spectrum is that of H doubled.
pub fn signature(h: &[[Complex64; 3]; 3], rel_tol: f64) -> (usize, usize, usize) {
    let mut big = vec![vec![0.0; 6]; 6];
    for i in 0..3 {
        for j in 0..3 {
            let (s, a) = (h[i][j].re, h[i][j].im);
            big[i][j] = s;
            big[i + 3][j + 3] = s;
            big[i][j + 3] = -a;
            big[i + 3][j] = a;
        }
    }
    let (vals, _) = linalg::symmetric_eigen(&big);
    let top = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let pos = vals.iter().filter(|v| **v > rel_tol * top).count();
    let neg = vals.iter().filter(|v| **v < -rel_tol * top).count();
    (pos / 2, neg / 2, (6 - pos - neg) / 2)
}

/// Reduced row echelon form of the basis vectors, so the combinations tried
/// first are the simplest ones.
fn echelon(mut basis: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let rows = basis.len();
    let mut lead = 0;
    for c in 0..9 {
        if lead == rows {
            break;
        }
        let pivot = (lead..rows).max_by(|&a, &b| basis[a][c].abs().total_cmp(&basis[b][c].abs())).unwrap();
        if basis[pivot][c].abs() < 1e-9 {
            continue;
        }
        basis.swap(lead, pivot);
        let p = basis[lead][c];
        for x in basis[lead].iter_mut() {
            *x /= p;
        }
        for r in 0..rows {
            if r != lead {
                let f = basis[r][c];
                if f != 0.0 {
                    for k in 0..9 {
                        basis[r][k] -= f * basis[lead][k];
                    }
                }
            }
        }
        lead += 1;
    }
    for row in basis.iter_mut() {
        for x in row.iter_mut() {
            if x.abs() < 1e-13 {
                *x = 0.0;
            }
        }
    }
    basis
}

fn residual_of(ops: &[Vec<f64>], h: &[f64]) -> f64 {
    let n = h.iter().map(|x| x * x).sum::<f64>().sqrt();
    ops.iter().map(|row| row.iter().zip(h).map(|(a, b)| a * b).sum::<f64>().powi(2)).sum::<f64>().sqrt() / n
}

/// Looks for a common invariant Hermitian form of signature (2,1) in the
/// joint null space of H ↦ gᵀHg − H over the determinant-one maps.
pub fn hermitian_invariant_search(maps: &[ProjMap]) -> Result<HermitianResult> {
    if maps.is_empty() {
        return Err(Error::TooFew(1));
    }
    let ops: Vec<Vec<f64>> = maps.iter().flat_map(|m| operator_rows(&m.det_normalized())).collect();
    let svd = linalg::svd(&ops, 9);
    let joint_residual = svd.sigma[8];
    let null: Vec<Vec<f64>> =
        (0..9).filter(|&k| svd.sigma[k] <= NULL_TOL).map(|k| svd.v[k].clone()).collect();
    let null_dim = null.len();
    if null_dim == 9 {
        return Ok(HermitianResult {
            found: true,
            signature: None,
            joint_residual,
            form: None,
            all_invariant: true,
            null_dim,
        });
    }
    let basis = echelon(null);
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    let k = basis.len();
    if k > 0 {
        // Subsets by size, each with every sign pattern.
        let mut masks: Vec<u32> = (1..(1u32 << k)).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        for mask in masks {
            let members: Vec<usize> = (0..k).filter(|b| mask & (1 << b) != 0).collect();
            for signs in 0..(1u32 << (members.len() - 1)) {
                let mut h = vec![0.0; 9];
                for (t, &b) in members.iter().enumerate() {
                    let s = if t > 0 && signs & (1 << (t - 1)) != 0 { -1.0 } else { 1.0 };
                    for c in 0..9 {
                        h[c] += s * basis[b][c];
                    }
                }
                candidates.push(h);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..RANDOM_TRIALS {
            let mut h = vec![0.0; 9];
            for row in &basis {
                let w: f64 = rng.gen_range(-1.0..1.0);
                for c in 0..9 {
                    h[c] += w * row[c];
                }
            }
            candidates.push(h);
        }
    }
    for h in candidates {
        let form = form_of(&h);
        let (pos, neg, zero) = signature(&form, 1e-9);
        if zero == 0 && (pos, neg) != (3, 0) && (pos, neg) != (0, 3) {
            let flip = neg == 2;
            let residual = residual_of(&ops, &h);
            let top = h.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let sign = if flip { -1.0 } else { 1.0 };
            let normalized = form.map(|row| row.map(|z| z * (sign / top)));
            return Ok(HermitianResult {
                found: true,
                signature: Some((2, 1)),
                joint_residual: residual,
                form: Some(normalized),
                all_invariant: false,
                null_dim,
            });
        }
    }
    Ok(HermitianResult { found: false, signature: None, joint_residual, form: None, all_invariant: false, null_dim })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn diagonal_preserves_antidiagonal_form() {
        let g = ProjMap::float([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.5]]).unwrap();
        let r = hermitian_invariant_search(&[g]).unwrap();
        assert!(r.found);
        assert_eq!(r.signature, Some((2, 1)));
        assert!(r.joint_residual <= 1e-12);
        let j = [[c(0.0), c(0.0), c(1.0)], [c(0.0), c(1.0), c(0.0)], [c(1.0), c(0.0), c(0.0)]];
        assert_eq!(r.form.unwrap(), j);
    }

    #[test]
    fn identity_keeps_every_form() {
        let r = hermitian_invariant_search(&[ProjMap::identity()]).unwrap();
        assert!(r.found && r.all_invariant);
        assert_eq!(r.signature, None);
    }

    #[test]
    fn rotation_keeps_a_definite_form_only() {
        // SO(3) preserves the identity form, which is definite.
        let (s, co) = (0.6f64, 0.8f64);
        let a = ProjMap::float([[co, -s, 0.0], [s, co, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let b = ProjMap::float([[1.0, 0.0, 0.0], [0.0, co, -s], [0.0, s, co]]).unwrap();
        let r = hermitian_invariant_search(&[a, b]).unwrap();
        assert!(!r.found);
        assert_eq!(r.null_dim, 1);
    }

    #[test]
    fn signature_of_antidiagonal() {
        let j = [[c(0.0), c(0.0), c(1.0)], [c(0.0), c(1.0), c(0.0)], [c(1.0), c(0.0), c(0.0)]];
        assert_eq!(signature(&j, 1e-12), (2, 1, 0));
    }
}
