//! Concurrency census of sampled lines.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, V3};

use super::LineSample;

/// (largest number of lines within `tol` of a pairwise meet, number of
/// 3-subsets in general position).
pub fn general_position_census(lines: &[LineSample], tol: f64) -> Result<(usize, u64)> {
    let vs: Vec<V3> = lines.iter().map(|l| l.line).collect();
    general_position_census_vectors(&vs, tol)
}

/// As `general_position_census` on raw line coefficients. A triple i<j<k
/// counts as concurrent when line k passes within `tol` of the meet of i and j.
pub fn general_position_census_vectors(lines: &[V3], tol: f64) -> Result<(usize, u64)> {
    let n = lines.len();
    if n < 3 {
        return Err(Error::TooFew(3));
    }
    let unit: Vec<V3> = lines.iter().map(linalg::normalize).collect();
    let sin_tol = tol.sin();
    let rows: Vec<(usize, u64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = 2usize;
            let mut concurrent = 0u64;
            for j in (i + 1)..n {
                let c = linalg::cross(&unit[i], &unit[j]);
                let cn = linalg::norm(&c);
                if cn == 0.0 {
                    // Equal lines: every third line meets them.
                    best = best.max(n);
                    concurrent += (n - j - 1) as u64;
                    continue;
                }
                let p = linalg::scale(&c, 1.0 / cn);
                let mut through = 2usize;
                for (k, l) in unit.iter().enumerate() {
                    if k == i || k == j {
                        continue;
                    }
                    if linalg::dot(&p, l).abs() <= sin_tol {
                        through += 1;
                        if k > j {
                            concurrent += 1;
                        }
                    }
                }
                best = best.max(through);
            }
            (best, concurrent)
        })
        .collect();
    let max_concurrency = rows.iter().map(|r| r.0).max().unwrap_or(2);
    let concurrent: u64 = rows.iter().map(|r| r.1).sum();
    Ok((max_concurrency, triples(n) - concurrent))
}

pub fn triples(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) * n.saturating_sub(2) / 6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizontal_pencil_is_concurrent() {
        let lines = [[0.0, 1.0, -1.0], [0.0, 1.0, 0.0], [0.0, 1.0, 1.0]];
        assert_eq!(general_position_census_vectors(&lines, 1e-6).unwrap(), (3, 0));
    }

    #[test]
    fn coordinate_triangle_is_general() {
        let lines = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(general_position_census_vectors(&lines, 1e-6).unwrap(), (2, 1));
    }

    #[test]
    fn too_few() {
        assert_eq!(general_position_census_vectors(&[[1.0, 0.0, 0.0]], 1e-6), Err(Error::TooFew(3)));
    }

    #[test]
    fn count_identity() {
        assert_eq!(triples(200), 1_313_400);
    }
}
