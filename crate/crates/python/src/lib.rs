//! Python bindings for `finiteverse`.
//!
//! Exact values cross the boundary as `fractions.Fraction`; kernel labels use
//! the wire form (`"Au.Bu"`); cells are `(p, q)` tuples.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use finiteverse::ensemble;
use finiteverse::entanglement::{self, ExperimentConfig, MeasurementOrder, Mode};
use finiteverse::formats;
use finiteverse::kernel::{self as kern, OutcomeLabel};
use finiteverse::life::{self, LifeState};
use finiteverse::mwi;
use finiteverse::query::{Predicate, Query};
use finiteverse::rational::{self, AngleDeg, Rational};
use finiteverse::relativity::{self as rel, Boost, Event};

pyo3::create_exception!(finiteverse_py, FiniteverseError, PyValueError);

fn err(e: finiteverse::Error) -> PyErr {
    FiniteverseError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((r.numer().clone(), r.denom().clone()))
}

fn mode_of(max_denominator: Option<u64>) -> Mode {
    match max_denominator {
        None => Mode::Exact,
        Some(max_denominator) => Mode::Approx { max_denominator },
    }
}

fn order_of(name: &str) -> PyResult<MeasurementOrder> {
    match name {
        "alice-first" => Ok(MeasurementOrder::AliceFirst),
        "bob-first" => Ok(MeasurementOrder::BobFirst),
        other => Err(PyValueError::new_err(format!(
            "order must be 'alice-first' or 'bob-first', not {other:?}"
        ))),
    }
}

/// Exact cos²(delta/2) for whitelisted integer angles.
#[pyfunction]
fn half_angle_cos2<'py>(py: Python<'py>, delta: i64) -> PyResult<Bound<'py, PyAny>> {
    let r = rational::half_angle_cos2_exact(AngleDeg::new(delta)).map_err(err)?;
    fraction(py, &r)
}

/// Best rational approximation with bounded denominator.
#[pyfunction]
fn rational_approx<'py>(
    py: Python<'py>,
    x: f64,
    max_denominator: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let r = rational::rational_approx(x, max_denominator).map_err(err)?;
    fraction(py, &r)
}

#[pyclass(frozen, skip_from_py_object, module = "finiteverse_py")]
#[derive(Clone)]
struct Kernel {
    inner: kern::Kernel,
}

#[pymethods]
impl Kernel {
    /// Build from a mapping of wire labels to positive integer counts.
    #[new]
    fn new(counts: BTreeMap<String, BigUint>) -> PyResult<Self> {
        let entries = counts
            .into_iter()
            .map(|(l, c)| Ok((l.parse::<OutcomeLabel>()?, c)))
            .collect::<finiteverse::Result<Vec<_>>>()
            .map_err(err)?;
        Ok(Kernel {
            inner: kern::Kernel::from_counts(entries).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Kernel {
            inner: formats::parse_kernel(text).map_err(err)?,
        })
    }

    fn to_text(&self) -> String {
        formats::write_kernel(&self.inner)
    }

    #[getter]
    fn total(&self) -> BigUint {
        self.inner.total().clone()
    }

    fn counts(&self) -> BTreeMap<String, BigUint> {
        self.inner
            .counts()
            .iter()
            .map(|(l, c)| (l.to_wire(), c.clone()))
            .collect()
    }

    fn tensor(&self, other: &Kernel) -> Kernel {
        Kernel {
            inner: self.inner.tensor(&other.inner),
        }
    }

    fn reduce(&self) -> Kernel {
        Kernel {
            inner: self.inner.reduce(),
        }
    }

    /// Exact probability of a query such as `"is:Au.Bu"` or, with
    /// `power > 1`, `"all-match"`. Large powers are evaluated symbolically.
    #[pyo3(signature = (query, power = 1, materialize_limit = 1 << 16))]
    fn probability<'py>(
        &self,
        py: Python<'py>,
        query: &str,
        power: u64,
        materialize_limit: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let q: Query = query.parse().map_err(err)?;
        let p = self
            .inner
            .power(power, &BigUint::from(materialize_limit))
            .and_then(|pw| q.probability(&pw))
            .map_err(err)?;
        fraction(py, &p)
    }

    /// Distribution of how many of `n` repetitions satisfy `predicate`.
    fn match_count_distribution<'py>(
        &self,
        py: Python<'py>,
        predicate: &str,
        n: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let pred: Predicate = predicate.parse().map_err(err)?;
        let pk = kern::PowerKernel::new(self.inner.clone(), n).map_err(err)?;
        let dict = PyDict::new(py);
        for (k, p) in pk.match_count_distribution(&|l| pred.test(l)) {
            dict.set_item(k, fraction(py, &p)?)?;
        }
        Ok(dict)
    }

    #[pyo3(signature = (cap = kern::DEFAULT_ENUMERATION_CAP))]
    fn enumerate_universes(&self, cap: u64) -> PyResult<Vec<String>> {
        Ok(self
            .inner
            .enumerate_universes(cap)
            .map_err(err)?
            .iter()
            .map(OutcomeLabel::to_wire)
            .collect())
    }

    fn __eq__(&self, other: &Kernel) -> bool {
        self.inner == other.inner
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        let items: Vec<String> = self
            .inner
            .counts()
            .iter()
            .map(|(l, c)| format!("'{}': {}", l.to_wire(), c))
            .collect();
        format!("Kernel({{{}}})", items.join(", "))
    }
}

/// Joint singlet kernel by sequential collapse in one measurement order.
///
/// Returns a dict with `kernel`, `distribution` (label -> Fraction, including
/// zero-probability outcomes), `in_flight` (partner spin after Up and Down)
/// and `approx_error` (None in exact mode).
#[pyfunction]
#[pyo3(signature = (alice, bob, order = "alice-first", max_denominator = None))]
fn collapse_joint<'py>(
    py: Python<'py>,
    alice: i64,
    bob: i64,
    order: &str,
    max_denominator: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = ExperimentConfig::new(alice, bob, order_of(order)?, mode_of(max_denominator))
        .map_err(err)?;
    let c = entanglement::collapse_joint(&cfg).map_err(err)?;
    let dist = PyDict::new(py);
    for (o, p) in &c.distribution {
        dist.set_item(o.label().to_wire(), fraction(py, p)?)?;
    }
    let out = PyDict::new(py);
    out.set_item(
        "kernel",
        Kernel {
            inner: c.kernel.clone(),
        },
    )?;
    out.set_item("distribution", dist)?;
    out.set_item(
        "in_flight",
        (c.in_flight[0].degrees(), c.in_flight[1].degrees()),
    )?;
    out.set_item("approx_error", c.approx_error)?;
    Ok(out)
}

/// Whether both measurement orders give the same joint kernel.
#[pyfunction]
#[pyo3(signature = (alice, bob, max_denominator = None))]
fn order_invariance(alice: i64, bob: i64, max_denominator: Option<u64>) -> PyResult<bool> {
    Ok(
        entanglement::order_invariance_check(alice, bob, mode_of(max_denominator))
            .map_err(err)?
            .agree,
    )
}

fn event(t: f64, x: f64) -> PyResult<Event> {
    Event::new("e", t, x).map_err(err)
}

fn boost(v: f64) -> PyResult<Boost> {
    Boost::new(v).map_err(err)
}

/// `(t', x')` of the event `(t, x)` seen from a frame moving at `v`.
#[pyfunction]
fn boost_event(t: f64, x: f64, v: f64) -> PyResult<(f64, f64)> {
    let e = boost(v)?.apply(&event(t, x)?);
    Ok((e.t, e.x))
}

#[pyfunction]
fn interval_class(e1: (f64, f64), e2: (f64, f64)) -> PyResult<String> {
    Ok(rel::interval_class(&event(e1.0, e1.1)?, &event(e2.0, e2.1)?).to_string())
}

/// `"before"`, `"simultaneous"` or `"after"`.
#[pyfunction]
fn temporal_order(e1: (f64, f64), e2: (f64, f64), v: f64) -> PyResult<String> {
    Ok(rel::temporal_order(&event(e1.0, e1.1)?, &event(e2.0, e2.1)?, boost(v)?).to_string())
}

#[pyfunction]
fn simultaneity_offset(x: f64, v: f64) -> PyResult<f64> {
    Ok(rel::simultaneity_offset(x, boost(v)?))
}

#[pyfunction]
fn reversing_velocity(e1: (f64, f64), e2: (f64, f64)) -> PyResult<f64> {
    Ok(
        rel::reversing_velocity(&event(e1.0, e1.1)?, &event(e2.0, e2.1)?)
            .map_err(err)?
            .velocity(),
    )
}

/// Singlet branching tree in a viewer order (`["Bob", "Alice"]`): returns the
/// rendered tree and its filament kernel.
#[pyfunction]
fn singlet_tree(alice: i64, bob: i64, order: Vec<String>) -> PyResult<(String, Kernel)> {
    let (events, corr) = mwi::singlet_events(alice, bob, Mode::Exact).map_err(err)?;
    let perm = order
        .iter()
        .map(|n| {
            events
                .iter()
                .position(|e| &e.name == n)
                .ok_or_else(|| PyValueError::new_err(format!("unknown event {n:?}")))
        })
        .collect::<PyResult<Vec<_>>>()?;
    let tree = mwi::BranchTree::build(&events, &perm, &corr).map_err(err)?;
    Ok((
        tree.render(),
        Kernel {
            inner: mwi::filament_decomposition(&tree),
        },
    ))
}

/// `[(step, entropy_bits, num_classes), ...]` for a deterministic ensemble.
#[pyfunction]
fn arrow_of_time(kernel: &Kernel, m: u64, steps: usize) -> PyResult<Vec<(usize, f64, usize)>> {
    Ok(ensemble::arrow_of_time(&kernel.inner, m, steps)
        .map_err(err)?
        .into_iter()
        .map(|r| (r.step, r.entropy_bits, r.num_classes))
        .collect())
}

/// Outcome counts from `n` seeded draws.
#[pyfunction]
fn sample_frequencies(kernel: &Kernel, n: u64, seed: u64) -> PyResult<BTreeMap<String, u64>> {
    let report = ensemble::sample_frequencies(&kernel.inner, n, seed).map_err(err)?;
    Ok(report
        .counts
        .into_iter()
        .map(|(l, c)| (l.to_wire(), c))
        .collect())
}

fn cells_of(state: &LifeState) -> Vec<(i64, i64)> {
    state.cells().into_iter().map(|c| (c.p, c.q)).collect()
}

#[pyfunction]
fn life_step(cells: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    cells_of(&life::life_step(&LifeState::new(cells)))
}

/// Every state from `h = 0` to `horizon`.
#[pyfunction]
#[pyo3(signature = (cells, horizon, budget = life::DEFAULT_CELL_BUDGET))]
fn run_block(
    cells: Vec<(i64, i64)>,
    horizon: usize,
    budget: usize,
) -> PyResult<Vec<Vec<(i64, i64)>>> {
    let history = life::run_block(&LifeState::new(cells), horizon, budget).map_err(err)?;
    Ok(history.states().iter().map(cells_of).collect())
}

/// `(period, (dp, dq))`, or None if the pattern does not recur by `max_h`.
#[pyfunction]
fn detect_period(cells: Vec<(i64, i64)>, max_h: usize) -> Option<(usize, (i64, i64))> {
    life::detect_period(&LifeState::new(cells), max_h).map(|p| (p.period, p.translation))
}

#[pyfunction]
fn parse_pattern(text: &str) -> PyResult<Vec<(i64, i64)>> {
    Ok(cells_of(&LifeState::from_plaintext(text).map_err(err)?))
}

#[pymodule]
fn finiteverse_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FiniteverseError", m.py().get_type::<FiniteverseError>())?;
    m.add_class::<Kernel>()?;
    m.add_function(wrap_pyfunction!(half_angle_cos2, m)?)?;
    m.add_function(wrap_pyfunction!(rational_approx, m)?)?;
    m.add_function(wrap_pyfunction!(collapse_joint, m)?)?;
    m.add_function(wrap_pyfunction!(order_invariance, m)?)?;
    m.add_function(wrap_pyfunction!(boost_event, m)?)?;
    m.add_function(wrap_pyfunction!(interval_class, m)?)?;
    m.add_function(wrap_pyfunction!(temporal_order, m)?)?;
    m.add_function(wrap_pyfunction!(simultaneity_offset, m)?)?;
    m.add_function(wrap_pyfunction!(reversing_velocity, m)?)?;
    m.add_function(wrap_pyfunction!(singlet_tree, m)?)?;
    m.add_function(wrap_pyfunction!(arrow_of_time, m)?)?;
    m.add_function(wrap_pyfunction!(sample_frequencies, m)?)?;
    m.add_function(wrap_pyfunction!(life_step, m)?)?;
    m.add_function(wrap_pyfunction!(run_block, m)?)?;
    m.add_function(wrap_pyfunction!(detect_period, m)?)?;
    m.add_function(wrap_pyfunction!(parse_pattern, m)?)?;
    Ok(())
}
