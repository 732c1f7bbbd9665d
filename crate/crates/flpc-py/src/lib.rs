//! Python bindings for the flpc toolkit.
//!
//! The API is string-oriented: programs are parsed from source text, models
//! and translated rules come back as canonical strings, mirroring the
//! command-line driver's output.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use flpc::ast::FlpProgram;
use flpc::faspc::{self, FaspProgram};
use flpc::flatten;
use flpc::htsem;
use flpc::lpcore;
use flpc::parser::{parse_fasp, parse_flp};
use flpc::randgen::{random_safe_program, GenConfig};
use flpc::safety;

fn diagnostics_err(diags: Vec<flpc::parser::Diagnostic>) -> PyErr {
    let text: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
    PyValueError::new_err(text.join("\n"))
}

fn solve_translated(p: &FlpProgram, max_search: u128) -> PyResult<Vec<String>> {
    let lp = flatten::translate_program(p).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let c0: Vec<String> = p.signature.constructors().iter().cloned().collect();
    let ground =
        lpcore::ground(&lp, &c0).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let stable = lpcore::stable_models(&ground, max_search)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let mut lifted = Vec::new();
    for m in &stable {
        lifted.push(
            lpcore::lift(m, &p.signature).map_err(|e| PyRuntimeError::new_err(e.to_string()))?,
        );
    }
    lifted.sort();
    lifted.dedup();
    Ok(lifted.iter().map(|s| s.to_string()).collect())
}

/// A program over partial evaluable functions.
#[pyclass(name = "Program")]
struct PyProgram {
    inner: FlpProgram,
}

#[pymethods]
impl PyProgram {
    /// Canonical source text of the program.
    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Program({} rules)", self.inner.rules.len())
    }

    /// Safety violations as human-readable strings; empty means safe.
    fn check(&self) -> Vec<String> {
        safety::check_flp_program(&self.inner)
            .violations
            .iter()
            .map(|v| v.to_string())
            .collect()
    }

    /// Translate to function-free rules (or the quantified intermediate
    /// theory) and return them one per line.
    #[pyo3(signature = (intermediate = false))]
    fn translate(&self, intermediate: bool) -> PyResult<String> {
        if intermediate {
            let theory = flatten::translate_program_intermediate(&self.inner)
                .map_err(|e| PyValueError::new_err(e.to_string()))?;
            Ok(theory.iter().map(|r| format!("{r}\n")).collect())
        } else {
            let lp = flatten::translate_program(&self.inner)
                .map_err(|e| PyValueError::new_err(e.to_string()))?;
            Ok(lp.rules.iter().map(|r| format!("{r}\n")).collect())
        }
    }

    /// Enumerate models canonically, either by direct enumeration
    /// (`method="oracle"`) or through the translation (`method="translate"`).
    #[pyo3(signature = (method = "oracle", max_search = None))]
    fn solve(&self, method: &str, max_search: Option<u64>) -> PyResult<Vec<String>> {
        let limit = max_search.map(u128::from).unwrap_or(htsem::DEFAULT_MAX_SEARCH);
        match method {
            "oracle" => {
                let models = htsem::equilibrium_models(&self.inner, limit)
                    .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
                Ok(models.iter().map(|m| m.to_string()).collect())
            }
            "translate" => solve_translated(&self.inner, limit),
            other => Err(PyValueError::new_err(format!(
                "unknown method '{other}' (expected 'oracle' or 'translate')"
            ))),
        }
    }

    /// True when direct enumeration and the translation agree on all models.
    #[pyo3(signature = (max_search = None))]
    fn compare(&self, max_search: Option<u64>) -> PyResult<bool> {
        let oracle = self.solve("oracle", max_search)?;
        let translated = self.solve("translate", max_search)?;
        Ok(oracle == translated)
    }
}

/// A typed program over total functions.
#[pyclass(name = "TypedProgram")]
struct PyTypedProgram {
    inner: FaspProgram,
}

#[pymethods]
impl PyTypedProgram {
    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("TypedProgram({} rules)", self.inner.rules.len())
    }

    /// Enumerate answer sets canonically.
    #[pyo3(signature = (max_search = None))]
    fn solve(&self, max_search: Option<u64>) -> PyResult<Vec<String>> {
        let limit = max_search.map(u128::from).unwrap_or(faspc::DEFAULT_MAX_SEARCH);
        let answers = faspc::fasp_answer_sets(&self.inner, limit)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(answers.iter().map(|a| a.to_string()).collect())
    }

    /// Embed into an untyped program over partial functions.
    fn embed(&self) -> PyResult<PyProgram> {
        let inner = faspc::embed(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyProgram { inner })
    }
}

/// Parse source text for a program over partial evaluable functions.
#[pyfunction]
#[pyo3(signature = (text, name = "<python>"))]
fn parse(text: &str, name: &str) -> PyResult<PyProgram> {
    let inner = parse_flp(text, name).map_err(diagnostics_err)?;
    Ok(PyProgram { inner })
}

/// Parse source text for a typed program over total functions.
#[pyfunction]
#[pyo3(signature = (text, name = "<python>"))]
fn parse_typed(text: &str, name: &str) -> PyResult<PyTypedProgram> {
    let inner = parse_fasp(text, name).map_err(diagnostics_err)?;
    Ok(PyTypedProgram { inner })
}

/// Generate a small random safe program, deterministically from a seed.
#[pyfunction]
fn random_program(seed: u64) -> PyProgram {
    PyProgram { inner: random_safe_program(seed, &GenConfig::default()) }
}

#[pymodule]
fn flpc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProgram>()?;
    m.add_class::<PyTypedProgram>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(parse_typed, m)?)?;
    m.add_function(wrap_pyfunction!(random_program, m)?)?;
    Ok(())
}
