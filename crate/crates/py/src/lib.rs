use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use pappus_core::limit_set::{self, VerifyConfig};
use pappus_core::marked_box::{self, BoxOp, MarkedBox, BIT_CEILING};
use pappus_core::projective::HPoint;
use pappus_core::representation::{self, reduce_word, DEDUPE_TOL, MARK_TOL};
use pappus_core::spectrum;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_seed(seed: &str) -> PyResult<MarkedBox> {
    let bx: MarkedBox = seed.parse().map_err(err)?;
    let v = bx.validate();
    if let Some(first) = v.first() {
        return Err(err(format!("invalid seed: {first}")));
    }
    Ok(bx)
}

fn sigma(seed: &MarkedBox, maxlen: usize) -> PyResult<Vec<representation::GroupElement>> {
    if maxlen == 0 {
        return Ok(Vec::new());
    }
    Ok(representation::enumerate_group(seed, maxlen, DEDUPE_TOL)
        .map_err(err)?
        .into_iter()
        .filter(|g| !g.word.is_empty() && g.in_sigma(MARK_TOL))
        .collect())
}

/// Orbit of the seed under the box operations, as (word, six unit points, diameter).
#[pyfunction]
#[pyo3(signature = (seed = "default", depth = 3, alphabet = "12"))]
fn orbit(seed: &str, depth: usize, alphabet: &str) -> PyResult<Vec<(String, Vec<[f64; 3]>, f64)>> {
    let bx = parse_seed(seed)?;
    let ops: Vec<BoxOp> = alphabet.chars().map(BoxOp::from_letter).collect::<Result<_, _>>().map_err(err)?;
    let o = marked_box::orbit(&bx, depth, &ops, BIT_CEILING).map_err(err)?;
    Ok(o.nodes.into_iter().map(|n| (n.word, n.bx.unit_points().to_vec(), n.diameter)).collect())
}

/// Determinant-one matrix of the element for `word`, its mark residual, and
/// whether it lies in the marked subsemigroup.
#[pyfunction]
#[pyo3(signature = (word, seed = "default"))]
fn rho_hat(word: &str, seed: &str) -> PyResult<([[f64; 3]; 3], f64, bool)> {
    let bx = parse_seed(seed)?;
    let w = reduce_word(word).map_err(err)?;
    let g = representation::rho_hat_unchecked(&w, &bx).map_err(err)?;
    Ok((g.map.det_normalized(), g.mark_residual, g.in_sigma(MARK_TOL)))
}

/// Class name and determinant-one eigenvalues of the element for `word`.
#[pyfunction]
#[pyo3(signature = (word, seed = "default"))]
fn spectrum_of(word: &str, seed: &str) -> PyResult<(String, Vec<Complex64>)> {
    let bx = parse_seed(seed)?;
    let w = reduce_word(word).map_err(err)?;
    let g = representation::rho_hat_unchecked(&w, &bx).map_err(err)?;
    let r = spectrum::spectrum(&g.map).map_err(err)?;
    Ok((r.class.name().to_string(), r.normalized.to_vec()))
}

/// Curve points, field lines (unit vectors) and the error bound of the base samples.
#[pyfunction]
#[pyo3(signature = (seed = "default", depth = 8, translate_len = 0))]
fn sample_curve(seed: &str, depth: usize, translate_len: usize) -> PyResult<(Vec<[f64; 3]>, Vec<[f64; 3]>, f64)> {
    let bx = parse_seed(seed)?;
    let elements = sigma(&bx, translate_len)?;
    let a = limit_set::sample_curve_with(&bx, depth, translate_len, &elements).map_err(err)?;
    let bound = a.base_error_bound();
    Ok((a.curve.iter().map(|c| c.point).collect(), a.lines.iter().map(|l| l.line).collect(), bound))
}

/// Distance from a complex point to the sampled limit set.
#[pyfunction]
#[pyo3(signature = (z, seed = "default", depth = 10, translate_len = 0))]
fn kulkarni_distance(z: [Complex64; 3], seed: &str, depth: usize, translate_len: usize) -> PyResult<f64> {
    let bx = parse_seed(seed)?;
    let elements = sigma(&bx, translate_len)?;
    let a = limit_set::sample_curve_with(&bx, depth, translate_len, &elements).map_err(err)?;
    let p = HPoint::complex(z).map_err(err)?;
    limit_set::kulkarni_distance(&p, &a).map_err(err)
}

/// Runs the verification suite; returns the overall status, the checks as
/// (name, status, residual, tolerance), and the full report text.
#[pyfunction]
#[pyo3(signature = (seed = "default", depth = 10, maxlen = 6))]
fn verify(py: Python<'_>, seed: &str, depth: usize, maxlen: usize) -> PyResult<(String, Vec<(String, String, f64, f64)>, String)> {
    let bx = parse_seed(seed)?;
    let cfg = VerifyConfig { depth, maxlen, ..VerifyConfig::default() };
    let report = py.detach(|| limit_set::verify_all(&bx, &cfg));
    let checks = report
        .checks
        .iter()
        .map(|c| (c.name.to_string(), c.status.name().to_string(), c.residual, c.tolerance))
        .collect();
    Ok((report.overall.name().to_string(), checks, report.to_text()))
}

#[pymodule]
fn pappus(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(orbit, m)?)?;
    m.add_function(wrap_pyfunction!(rho_hat, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_of, m)?)?;
    m.add_function(wrap_pyfunction!(sample_curve, m)?)?;
    m.add_function(wrap_pyfunction!(kulkarni_distance, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
