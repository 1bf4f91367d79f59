//! Python bindings. Artifacts cross the boundary as JSON text.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use gw::commands::{self, Artifact, EmbeddingChoice, TreeMapChoice};
use gw::config::Caps;
use gw::{Error, FamilySpec};

create_exception!(gridweaver, ConstructionError, PyException);

fn to_py(e: Error) -> PyErr {
    match (&e, e.stage()) {
        (Error::InvalidArgument(_), None) => PyValueError::new_err(e.to_string()),
        (_, stage) => ConstructionError::new_err(format!("stage {}: {}", stage.unwrap_or("setup"), e.root_cause())),
    }
}

fn caps(scale: Option<usize>, effort: Option<usize>) -> PyResult<Caps> {
    let mut c = Caps::from_env().map_err(to_py)?;
    if let Some(s) = scale {
        c.scale = s;
    }
    if let Some(e) = effort {
        c.effort = e;
    }
    Ok(c)
}

fn spec(text: &str) -> PyResult<FamilySpec> {
    FamilySpec::parse(text).map_err(to_py)
}

fn json(r: Result<Artifact, Error>) -> PyResult<String> {
    r.map(|a| a.to_json()).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (graph, rows, cols, budget=None, scale=None, effort=None))]
fn weave(py: Python<'_>, graph: &str, rows: usize, cols: usize, budget: Option<usize>, scale: Option<usize>, effort: Option<usize>) -> PyResult<String> {
    let (s, c) = (spec(graph)?, caps(scale, effort)?);
    json(py.detach(|| commands::cmd_weave(&s, rows, cols, budget, &c)))
}

#[pyfunction]
#[pyo3(signature = (graph, scale=None, effort=None))]
fn diverge(py: Python<'_>, graph: &str, scale: Option<usize>, effort: Option<usize>) -> PyResult<String> {
    let (s, c) = (spec(graph)?, caps(scale, effort)?);
    json(py.detach(|| commands::cmd_diverge(&s, &c)))
}

/// Returns `(minor_json, subdivision_json)`.
#[pyfunction]
fn transfer(py: Python<'_>, embedding: &str, rows: usize, cols: usize) -> PyResult<(String, String)> {
    let choice = match embedding {
        "hex-in-square" => EmbeddingChoice::HexInSquare,
        "square-identity" => EmbeddingChoice::SquareIdentity,
        "hex-identity" => EmbeddingChoice::HexIdentity,
        text if text.trim_start().starts_with('{') => {
            EmbeddingChoice::File(serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?)
        }
        other => return Err(PyValueError::new_err(format!("unknown embedding {other:?}"))),
    };
    let c = caps(None, None)?;
    let (m, s) = py.detach(|| commands::cmd_transfer(&choice, rows, cols, &c)).map_err(to_py)?;
    Ok((m.to_json(), s.to_json()))
}

#[pyfunction]
#[pyo3(signature = (graph, rays, depth, tree_qi="natural"))]
fn refute(py: Python<'_>, graph: &str, rays: usize, depth: usize, tree_qi: &str) -> PyResult<String> {
    let choice = match tree_qi {
        "natural" => TreeMapChoice::Natural,
        "identity" => TreeMapChoice::Identity,
        "collapse" => TreeMapChoice::Collapse,
        text if text.trim_start().starts_with('{') => {
            TreeMapChoice::File(serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?)
        }
        other => return Err(PyValueError::new_err(format!("unknown tree map {other:?}"))),
    };
    let (s, c) = (spec(graph)?, caps(None, None)?);
    json(py.detach(|| commands::cmd_refute(&s, rays, depth, &choice, &c)))
}

#[pyfunction]
fn demo_chain(m: usize, n: usize, length: usize) -> PyResult<String> {
    json(commands::cmd_demo_chain(m, n, length, &caps(None, None)?))
}

#[pyfunction]
fn demo_clique(n: usize) -> PyResult<String> {
    json(commands::cmd_demo_clique(n, &caps(None, None)?))
}

#[pyfunction]
fn demo_two_storey(rows: usize, cols: usize) -> PyResult<String> {
    json(commands::cmd_demo_two_storey(rows, cols, &caps(None, None)?))
}

/// CheckReport JSON for an artifact.
#[pyfunction]
fn verify(py: Python<'_>, artifact: &str) -> String {
    let report = py.detach(|| commands::verify_text(artifact));
    serde_json::to_string(&report).expect("reports serialize")
}

/// DOT text for a subdivision or minor artifact, `None` otherwise.
#[pyfunction]
fn to_dot(artifact: &str) -> PyResult<Option<String>> {
    let a = Artifact::from_json(artifact).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(commands::to_dot(&a))
}

/// Runs the command line in-process; returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> (i32, String, String) {
    let o = py.detach(|| gw::cli::run(std::iter::once("gridweaver".to_string()).chain(args)));
    (o.code, o.stdout, o.stderr)
}

#[pymodule]
#[pyo3(name = "gridweaver")]
fn gridweaver_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ConstructionError", m.py().get_type::<ConstructionError>())?;
    m.add_function(wrap_pyfunction!(weave, m)?)?;
    m.add_function(wrap_pyfunction!(diverge, m)?)?;
    m.add_function(wrap_pyfunction!(transfer, m)?)?;
    m.add_function(wrap_pyfunction!(refute, m)?)?;
    m.add_function(wrap_pyfunction!(demo_chain, m)?)?;
    m.add_function(wrap_pyfunction!(demo_clique, m)?)?;
    m.add_function(wrap_pyfunction!(demo_two_storey, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(to_dot, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
