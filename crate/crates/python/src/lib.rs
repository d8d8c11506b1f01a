//! Python bindings for `kirchhoff_rod`.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use kirchhoff_rod::curves::continuous_energy as core_continuous_energy;
use kirchhoff_rod::energy::{self as energy, PenaltyMode};
use kirchhoff_rod::frames::{apply_twist, default_bishop, FrameField};
use kirchhoff_rod::harness::{self, ConvergenceRow};
use kirchhoff_rod::io;
use kirchhoff_rod::{
    AnalyticCurve, ArcLengthCurve, DiscreteRod, EnergyReport, Error, FramedDiscreteRod, MaterialParams,
    PenaltyParams, SplineCurve, TwistProfile, Vec3,
};

fn to_py(err: Error) -> PyErr {
    if err.is_numerical() {
        PyArithmeticError::new_err(err.to_string())
    } else {
        PyValueError::new_err(err.to_string())
    }
}

type Mat3 = [[f64; 3]; 3];
type SplineRow = (f64, [f64; 3], [f64; 3], [f64; 3]);

fn arr(v: Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn penalty_params(alpha: f64, beta: f64, hard: bool) -> PyResult<PenaltyParams> {
    let mode = if hard { PenaltyMode::Hard } else { PenaltyMode::Soft };
    Ok(PenaltyParams::new(alpha, beta).map_err(to_py)?.with_mode(mode))
}

fn report_dict<'py>(py: Python<'py>, r: &EnergyReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("N", r.n)?;
    d.set_item("lambda", r.lambda)?;
    d.set_item("max_edge", r.max_edge)?;
    d.set_item("bend", r.bend)?;
    d.set_item("tor", r.tor)?;
    d.set_item("pen", r.pen)?;
    d.set_item("total", r.total)?;
    Ok(d)
}

fn row_dict<'py>(py: Python<'py>, r: &ConvergenceRow) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("N", r.n)?;
    d.set_item("r_N", r.r_n)?;
    d.set_item("lambda_N", r.lambda)?;
    d.set_item("bend", r.bend)?;
    d.set_item("tor", r.tor)?;
    d.set_item("pen", r.pen)?;
    d.set_item("total", r.total)?;
    d.set_item("bend_err", r.bend_err)?;
    d.set_item("tor_err", r.tor_err)?;
    d.set_item("frame_dist", r.frame_dist)?;
    Ok(d)
}

/// Arc-length parametrized line, circular arc or helix.
#[pyclass(name = "Curve", frozen, skip_from_py_object, module = "pykirchhoff")]
#[derive(Clone)]
struct PyCurve(AnalyticCurve);

#[pymethods]
impl PyCurve {
    #[staticmethod]
    fn line(length: f64) -> PyResult<Self> {
        Ok(Self(AnalyticCurve::from_params("line", &[length]).map_err(to_py)?))
    }

    #[staticmethod]
    fn arc(radius: f64, length: f64) -> PyResult<Self> {
        Ok(Self(AnalyticCurve::from_params("arc", &[radius, length]).map_err(to_py)?))
    }

    #[staticmethod]
    fn helix(a: f64, b: f64, length: f64) -> PyResult<Self> {
        Ok(Self(AnalyticCurve::from_params("helix", &[a, b, length]).map_err(to_py)?))
    }

    #[staticmethod]
    fn from_params(name: &str, params: Vec<f64>) -> PyResult<Self> {
        Ok(Self(AnalyticCurve::from_params(name, &params).map_err(to_py)?))
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.0.name()
    }

    #[getter]
    fn length(&self) -> f64 {
        self.0.length()
    }

    fn eval(&self, s: f64) -> [f64; 3] {
        arr(self.0.eval(s))
    }

    fn deriv1(&self, s: f64) -> [f64; 3] {
        arr(self.0.deriv1(s))
    }

    fn deriv2(&self, s: f64) -> [f64; 3] {
        arr(self.0.deriv2(s))
    }

    fn deriv3(&self, s: f64) -> [f64; 3] {
        arr(self.0.deriv3(s))
    }

    fn sup_deriv2(&self) -> f64 {
        self.0.sup_deriv2()
    }

    fn sup_deriv3(&self) -> f64 {
        self.0.sup_deriv3()
    }

    /// ∫|u''|² over the curve.
    fn bend_energy(&self) -> f64 {
        self.0.bend_energy()
    }

    fn __repr__(&self) -> String {
        format!("Curve({})", self.0)
    }
}

/// Twist angle θ(s) along a curve.
#[pyclass(name = "Twist", frozen, skip_from_py_object, module = "pykirchhoff")]
#[derive(Clone)]
struct PyTwist(TwistProfile);

#[pymethods]
impl PyTwist {
    #[staticmethod]
    fn zero() -> Self {
        Self(TwistProfile::zero())
    }

    #[staticmethod]
    #[pyo3(signature = (value))]
    fn constant(value: f64) -> Self {
        Self(TwistProfile::Constant(value))
    }

    #[staticmethod]
    #[pyo3(signature = (slope = 1.0, offset = 0.0))]
    fn linear(slope: f64, offset: f64) -> Self {
        Self(TwistProfile::Linear { slope, offset })
    }

    #[staticmethod]
    #[pyo3(signature = (amplitude = 1.0, frequency = 1.0))]
    fn sine(amplitude: f64, frequency: f64) -> Self {
        Self(TwistProfile::Sine { amplitude, frequency })
    }

    #[staticmethod]
    fn from_name(name: &str) -> PyResult<Self> {
        Ok(Self(TwistProfile::from_name(name).map_err(to_py)?))
    }

    fn eval(&self, s: f64) -> f64 {
        self.0.eval(s)
    }

    fn deriv(&self, s: f64) -> f64 {
        self.0.deriv(s)
    }

    /// ∫₀ᴸ θ'² ds.
    fn tor_energy(&self, length: f64) -> f64 {
        self.0.tor_energy(length)
    }
}

/// Points x₀…x_N with one twist angle per edge.
#[pyclass(name = "FramedRod", frozen, skip_from_py_object, module = "pykirchhoff")]
#[derive(Clone)]
struct PyFramedRod(FramedDiscreteRod);

#[pymethods]
impl PyFramedRod {
    #[new]
    #[pyo3(signature = (points, angles = None))]
    fn new(points: Vec<[f64; 3]>, angles: Option<Vec<f64>>) -> PyResult<Self> {
        let rod = DiscreteRod::from_arrays(&points).map_err(to_py)?;
        let framed = match angles {
            Some(a) => FramedDiscreteRod::new(rod, a).map_err(to_py)?,
            None => FramedDiscreteRod::untwisted(rod),
        };
        Ok(Self(framed))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self(io::rod_from_json(text).map_err(to_py)?))
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self(io::rod_from_text(text).map_err(to_py)?))
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(Self(io::read_rod(&path).map_err(to_py)?))
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        io::write_rod(&path, &self.0).map_err(to_py)
    }

    fn to_json(&self) -> PyResult<String> {
        io::rod_to_json(&self.0).map_err(to_py)
    }

    fn to_text(&self) -> String {
        io::rod_to_text(&self.0)
    }

    #[getter]
    fn points(&self) -> Vec<[f64; 3]> {
        self.0.rod().points().iter().map(|p| arr(*p)).collect()
    }

    #[getter]
    fn angles(&self) -> Vec<f64> {
        self.0.angles().to_vec()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.0.rod().edge_count()
    }

    fn chord_lengths(&self) -> Vec<f64> {
        self.0.rod().chord_lengths()
    }

    fn total_length(&self) -> f64 {
        self.0.rod().total_length()
    }

    fn max_edge(&self) -> f64 {
        self.0.rod().max_edge()
    }

    /// ℓ(X)/L.
    fn lambda_(&self, length: f64) -> PyResult<f64> {
        Ok(self.0.rod().partition(length).map_err(to_py)?.lambda)
    }

    fn spline(&self, length: f64) -> PyResult<PySpline> {
        Ok(PySpline(kirchhoff_rod::build_spline(self.0.rod(), length).map_err(to_py)?))
    }

    /// Frames along the spline at every integration step: (ts, frames) with
    /// each frame a 3×3 nested list whose columns are b1, b2, b3.
    #[pyo3(signature = (length, steps = 8, twisted = true))]
    fn frames(&self, length: f64, steps: usize, twisted: bool) -> PyResult<(Vec<f64>, Vec<Mat3>)> {
        let spline = kirchhoff_rod::build_spline(self.0.rod(), length).map_err(to_py)?;
        let mut field: FrameField = default_bishop(&spline, steps).map_err(to_py)?;
        if twisted {
            let z = kirchhoff_rod::build_twist(&self.0, length).map_err(to_py)?;
            field = apply_twist(&field, &z).map_err(to_py)?;
        }
        let frames = field
            .frames
            .iter()
            .map(|f| {
                let m = f.0;
                [[m[(0, 0)], m[(0, 1)], m[(0, 2)]], [m[(1, 0)], m[(1, 1)], m[(1, 2)]], [m[(2, 0)], m[(2, 1)], m[(2, 2)]]]
            })
            .collect();
        Ok((field.ts, frames))
    }

    fn __len__(&self) -> usize {
        self.0.rod().points().len()
    }

    fn __repr__(&self) -> String {
        format!("FramedRod(N={})", self.0.rod().edge_count())
    }
}

/// The C¹ piecewise-cubic curve assigned to a rod, on [0, L].
#[pyclass(name = "Spline", frozen, skip_from_py_object, module = "pykirchhoff")]
struct PySpline(SplineCurve);

#[pymethods]
impl PySpline {
    fn eval(&self, t: f64) -> PyResult<[f64; 3]> {
        Ok(arr(self.0.eval(t).map_err(to_py)?))
    }

    fn deriv1(&self, t: f64) -> PyResult<[f64; 3]> {
        Ok(arr(self.0.deriv1(t).map_err(to_py)?))
    }

    fn deriv2(&self, t: f64) -> PyResult<[f64; 3]> {
        Ok(arr(self.0.deriv2(t).map_err(to_py)?))
    }

    #[getter]
    fn knots(&self) -> Vec<f64> {
        self.0.knots().to_vec()
    }

    #[getter]
    fn lambda_(&self) -> f64 {
        self.0.lambda()
    }

    #[getter]
    fn length(&self) -> f64 {
        self.0.length()
    }

    /// ∫₀ᴸ |y''|² dt.
    fn bend_energy(&self) -> f64 {
        self.0.bend_energy()
    }

    /// `count` uniform samples as (t, y, y', y'') tuples.
    fn sample(&self, count: usize) -> Vec<SplineRow> {
        self.0
            .sample(count)
            .into_iter()
            .map(|s| (s.t, arr(s.point), arr(s.deriv1), arr(s.deriv2)))
            .collect()
    }
}

#[pyfunction]
fn bend_local(x_prev: [f64; 3], x_mid: [f64; 3], x_next: [f64; 3]) -> PyResult<f64> {
    energy::bend_local(&x_prev.into(), &x_mid.into(), &x_next.into()).map_err(to_py)
}

#[pyfunction]
fn tor_local(x_prev: [f64; 3], x_mid: [f64; 3], x_next: [f64; 3], phi0: f64, phi1: f64) -> PyResult<f64> {
    energy::tor_local(&x_prev.into(), &x_mid.into(), &x_next.into(), phi0, phi1).map_err(to_py)
}

#[pyfunction]
fn bend_energy_spline(rod: &PyFramedRod, length: f64) -> PyResult<f64> {
    energy::bend_energy_spline(rod.0.rod(), length).map_err(to_py)
}

#[pyfunction]
fn tor_energy(rod: &PyFramedRod, length: f64) -> PyResult<f64> {
    energy::tor_energy(&rod.0, length).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (rod, length, alpha = 1.0, beta = 0.5, hard = false))]
fn penalty(rod: &PyFramedRod, length: f64, alpha: f64, beta: f64, hard: bool) -> PyResult<f64> {
    let n = rod.0.rod().edge_count();
    energy::penalty(rod.0.rod(), n, length, &penalty_params(alpha, beta, hard)?).map_err(to_py)
}

/// Energy report as a dict with keys N, lambda, max_edge, bend, tor, pen, total.
#[pyfunction]
#[pyo3(signature = (rod, length, alpha = 1.0, beta = 0.5, ej = 2.0, gj1 = 2.0, hard = false))]
#[allow(clippy::too_many_arguments)]
fn total_energy<'py>(
    py: Python<'py>,
    rod: &PyFramedRod,
    length: f64,
    alpha: f64,
    beta: f64,
    ej: f64,
    gj1: f64,
    hard: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let n = rod.0.rod().edge_count();
    let mat = MaterialParams::new(ej, gj1).map_err(to_py)?;
    let report = energy::total_energy(&rod.0, n, length, &penalty_params(alpha, beta, hard)?, &mat).map_err(to_py)?;
    report_dict(py, &report)
}

#[pyfunction]
fn solve_r_n(curve: &PyCurve, n: usize) -> PyResult<f64> {
    kirchhoff_rod::solve_r_n(&curve.0, n).map_err(to_py)
}

/// (N(r), s-values, terminated) of the chord walk at radius r.
#[pyfunction]
fn count_segments(curve: &PyCurve, r: f64) -> PyResult<(usize, Vec<f64>, bool)> {
    let w = kirchhoff_rod::count_segments(&curve.0, r).map_err(to_py)?;
    Ok((w.segments(), w.s, w.terminated))
}

#[pyfunction]
#[pyo3(signature = (curve, n, twist = None))]
fn recovery_rod(curve: &PyCurve, n: usize, twist: Option<&PyTwist>) -> PyResult<PyFramedRod> {
    let twist = twist.map_or(TwistProfile::zero(), |t| t.0);
    Ok(PyFramedRod(kirchhoff_rod::recovery_rod(&curve.0, &twist, n).map_err(to_py)?))
}

#[pyfunction]
fn continuous_energy(curve: &PyCurve, twist: &PyTwist) -> f64 {
    core_continuous_energy(&curve.0, &twist.0)
}

#[pyfunction]
fn riemann_bend(curve: &PyCurve, n: usize) -> PyResult<f64> {
    harness::riemann_bend(&curve.0, n).map_err(to_py)
}

#[pyfunction]
fn riemann_tor(twist: &PyTwist, length: f64, n: usize) -> PyResult<f64> {
    harness::riemann_tor(&twist.0, length, n).map_err(to_py)
}

/// Dict with N, energy (report dict), velocity_at_2, speed_defect and the rod.
#[pyfunction]
#[pyo3(signature = (n, alpha = 1.0, beta = 0.5))]
fn counterexample_spacing<'py>(py: Python<'py>, n: usize, alpha: f64, beta: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = harness::counterexample_spacing(n, &penalty_params(alpha, beta, false)?).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("N", r.n)?;
    d.set_item("energy", report_dict(py, &r.energy)?)?;
    d.set_item("velocity_at_2", r.velocity_at_2)?;
    d.set_item("speed_defect", r.speed_defect)?;
    d.set_item("rod", Py::new(py, PyFramedRod(r.rod))?)?;
    Ok(d)
}

/// Convergence table as a list of row dicts.
#[pyfunction]
#[pyo3(signature = (curve, twist, n_list, alpha = 1.0, beta = 0.5, ej = 2.0, gj1 = 2.0))]
#[allow(clippy::too_many_arguments)]
fn converge<'py>(
    py: Python<'py>,
    curve: &PyCurve,
    twist: &PyTwist,
    n_list: Vec<usize>,
    alpha: f64,
    beta: f64,
    ej: f64,
    gj1: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let pen = penalty_params(alpha, beta, false)?;
    let mat = MaterialParams::new(ej, gj1).map_err(to_py)?;
    let (curve, twist) = (curve.0, twist.0);
    let table = py.detach(|| harness::converge(&curve, &twist, &n_list, &pen, &mat)).map_err(to_py)?;
    table.rows.iter().map(|r| row_dict(py, r)).collect()
}

#[pyfunction]
#[pyo3(signature = (curve, n_list, steps = 8))]
fn frame_study(py: Python<'_>, curve: &PyCurve, n_list: Vec<usize>, steps: usize) -> PyResult<Vec<(usize, f64)>> {
    let curve = curve.0;
    py.detach(|| harness::frame_study(&curve, &n_list, steps)).map_err(to_py)
}

#[pymodule]
fn pykirchhoff(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCurve>()?;
    m.add_class::<PyTwist>()?;
    m.add_class::<PyFramedRod>()?;
    m.add_class::<PySpline>()?;
    m.add_function(wrap_pyfunction!(bend_local, m)?)?;
    m.add_function(wrap_pyfunction!(tor_local, m)?)?;
    m.add_function(wrap_pyfunction!(bend_energy_spline, m)?)?;
    m.add_function(wrap_pyfunction!(tor_energy, m)?)?;
    m.add_function(wrap_pyfunction!(penalty, m)?)?;
    m.add_function(wrap_pyfunction!(total_energy, m)?)?;
    m.add_function(wrap_pyfunction!(solve_r_n, m)?)?;
    m.add_function(wrap_pyfunction!(count_segments, m)?)?;
    m.add_function(wrap_pyfunction!(recovery_rod, m)?)?;
    m.add_function(wrap_pyfunction!(continuous_energy, m)?)?;
    m.add_function(wrap_pyfunction!(riemann_bend, m)?)?;
    m.add_function(wrap_pyfunction!(riemann_tor, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample_spacing, m)?)?;
    m.add_function(wrap_pyfunction!(converge, m)?)?;
    m.add_function(wrap_pyfunction!(frame_study, m)?)?;
    Ok(())
}
