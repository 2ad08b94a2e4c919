//! Python bindings: the main types and operations of `eville-core` exposed
//! as an extension module.
//!
//! Build with `cargo build -p eville-py --release`, then import the produced
//! `libeville.so` as the module `eville` (see `python/smoke_test.py`).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use eville_core::{evidence, families, linecross, mc, normal, oracles, paths, slln};

fn err(e: eville_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

// ---------------------------------------------------------------------------
// paths
// ---------------------------------------------------------------------------

/// A finite observation prefix x_1..x_T with running sums.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct SamplePath {
    inner: paths::SamplePath,
}

#[pymethods]
impl SamplePath {
    #[new]
    fn new(values: Vec<f64>) -> PyResult<Self> {
        Ok(SamplePath {
            inner: paths::SamplePath::new(values).map_err(err)?,
        })
    }

    #[getter]
    fn horizon(&self) -> usize {
        self.inner.horizon()
    }

    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn sum_at(&self, t: usize) -> f64 {
        self.inner.sum_at(t)
    }

    fn mean_at(&self, t: usize) -> f64 {
        self.inner.mean_at(t)
    }

    fn __len__(&self) -> usize {
        self.inner.horizon()
    }

    fn __repr__(&self) -> String {
        format!("SamplePath(horizon={})", self.inner.horizon())
    }
}

/// An adapted stop/continue decision procedure with first-hit semantics.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct StoppingRule {
    inner: paths::StoppingRule,
}

#[pymethods]
impl StoppingRule {
    #[staticmethod]
    fn always() -> Self {
        StoppingRule {
            inner: paths::StoppingRule::always(),
        }
    }

    #[staticmethod]
    fn never() -> Self {
        StoppingRule {
            inner: paths::StoppingRule::never(),
        }
    }

    #[staticmethod]
    fn first_one() -> Self {
        StoppingRule {
            inner: paths::StoppingRule::first_one(),
        }
    }

    #[staticmethod]
    fn count_ones(n: u32) -> Self {
        StoppingRule {
            inner: paths::StoppingRule::count_ones(n),
        }
    }

    #[staticmethod]
    fn leading_zeros(m: usize) -> PyResult<Self> {
        Ok(StoppingRule {
            inner: paths::StoppingRule::leading_zeros(m).map_err(err)?,
        })
    }

    #[staticmethod]
    fn fixed_time(t: usize) -> PyResult<Self> {
        Ok(StoppingRule {
            inner: paths::StoppingRule::fixed_time(t).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (threshold, start=1))]
    fn abs_mean_above(threshold: f64, start: usize) -> PyResult<Self> {
        Ok(StoppingRule {
            inner: paths::StoppingRule::abs_mean_above(threshold, start).map_err(err)?,
        })
    }

    #[getter]
    fn description(&self) -> String {
        self.inner.description().to_owned()
    }

    /// Would this rule declare STOP at t = len(prefix)?
    fn decide(&self, prefix: Vec<f64>) -> PyResult<bool> {
        Ok(self.inner.decide(&prefix).map_err(err)? == paths::Decision::Stop)
    }

    fn __repr__(&self) -> String {
        format!("StoppingRule({})", self.inner.description())
    }
}

/// First t <= horizon with STOP, or None when the rule never fires in time.
#[pyfunction]
fn hit_time(rule: &StoppingRule, path: &SamplePath) -> Option<usize> {
    paths::hit_time(&rule.inner, &path.inner).time()
}

/// Rule firing as soon as any constituent fires.
#[pyfunction]
fn min_rule(rules: Vec<StoppingRule>) -> PyResult<StoppingRule> {
    Ok(StoppingRule {
        inner: paths::min_rule(rules.into_iter().map(|r| r.inner).collect()).map_err(err)?,
    })
}

/// Rule stopping at the first t >= 1 with E_t >= level (log-domain compare).
#[pyfunction]
fn level_rule(process: &EvidenceProcess, level: f64) -> PyResult<StoppingRule> {
    Ok(StoppingRule {
        inner: paths::level_rule(process.inner.clone(), level).map_err(err)?,
    })
}

// ---------------------------------------------------------------------------
// evidence
// ---------------------------------------------------------------------------

/// An adapted nonnegative process evaluated in log-domain along a path.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct EvidenceProcess {
    inner: evidence::EvidenceProcess,
}

#[pymethods]
impl EvidenceProcess {
    #[staticmethod]
    fn likelihood(lambda: f64) -> Self {
        EvidenceProcess {
            inner: evidence::likelihood_process(lambda),
        }
    }

    #[staticmethod]
    fn normal_mixture() -> Self {
        EvidenceProcess {
            inner: evidence::normal_mixture(),
        }
    }

    #[staticmethod]
    fn one_sided_exact() -> Self {
        EvidenceProcess {
            inner: evidence::one_sided_mixture_exact(),
        }
    }

    #[staticmethod]
    fn one_sided_paper() -> Self {
        EvidenceProcess {
            inner: evidence::one_sided_mixture_paper(),
        }
    }

    #[staticmethod]
    fn constant(value: f64) -> Self {
        EvidenceProcess {
            inner: evidence::EvidenceProcess::constant(value),
        }
    }

    #[staticmethod]
    fn one_jump(rule: &StoppingRule, c: f64) -> PyResult<Self> {
        Ok(EvidenceProcess {
            inner: evidence::EvidenceProcess::one_jump(rule.inner.clone(), c).map_err(err)?,
        })
    }

    #[staticmethod]
    fn indicator_witness(rules: Vec<StoppingRule>) -> PyResult<Self> {
        Ok(EvidenceProcess {
            inner: evidence::EvidenceProcess::indicator_witness(
                rules.into_iter().map(|r| r.inner).collect(),
            )
            .map_err(err)?,
        })
    }

    #[staticmethod]
    fn mix(processes: Vec<EvidenceProcess>, weights: Vec<f64>) -> PyResult<Self> {
        let weights = evidence::MixtureWeights::new(weights).map_err(err)?;
        Ok(EvidenceProcess {
            inner: evidence::mix(processes.into_iter().map(|p| p.inner).collect(), weights)
                .map_err(err)?,
        })
    }

    fn stop_at_level(&self, level: f64) -> PyResult<Self> {
        Ok(EvidenceProcess {
            inner: evidence::stop_at_level(self.inner.clone(), level).map_err(err)?,
        })
    }

    fn lift_sup_to_lim(&self, n_terms: usize) -> PyResult<Self> {
        Ok(EvidenceProcess {
            inner: evidence::lift_sup_to_lim(self.inner.clone(), n_terms).map_err(err)?,
        })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_owned()
    }

    /// log E_0 .. log E_T along the path (-inf encodes the value 0).
    fn log_values(&self, path: &SamplePath) -> Vec<f64> {
        self.inner.log_values(&path.inner)
    }

    /// E_0 .. E_T (exponentiated).
    fn values(&self, path: &SamplePath) -> Vec<f64> {
        self.inner.values(&path.inner)
    }

    fn __repr__(&self) -> String {
        format!("EvidenceProcess({})", self.inner.label())
    }
}

/// Standard normal CDF (absolute error below 1e-12).
#[pyfunction]
fn normal_cdf(z: f64) -> f64 {
    normal::normal_cdf(z)
}

/// log of the standard normal CDF, accurate deep into the left tail.
#[pyfunction]
fn log_normal_cdf(z: f64) -> f64 {
    normal::log_normal_cdf(z)
}

// ---------------------------------------------------------------------------
// families
// ---------------------------------------------------------------------------

/// A parameterized sampler with documented mean and tail metadata.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct FamilyMember {
    inner: families::FamilyMember,
}

#[pymethods]
impl FamilyMember {
    #[staticmethod]
    #[pyo3(signature = (mu=0.0, sigma=1.0))]
    fn gaussian(mu: f64, sigma: f64) -> PyResult<Self> {
        Ok(FamilyMember {
            inner: families::gaussian_iid(mu, sigma).map_err(err)?,
        })
    }

    #[staticmethod]
    fn rademacher() -> Self {
        FamilyMember {
            inner: families::rademacher_iid(),
        }
    }

    #[staticmethod]
    fn truncated_cauchy(a: f64) -> PyResult<Self> {
        Ok(FamilyMember {
            inner: families::truncated_cauchy(a).map_err(err)?,
        })
    }

    #[staticmethod]
    fn standard_cauchy() -> Self {
        FamilyMember {
            inner: families::standard_cauchy(),
        }
    }

    #[staticmethod]
    fn binary_pn(n: u32) -> Self {
        FamilyMember {
            inner: families::binary_pn(n),
        }
    }

    #[staticmethod]
    fn two_coin(i: u8) -> PyResult<Self> {
        Ok(FamilyMember {
            inner: families::two_coin(i).map_err(err)?,
        })
    }

    #[staticmethod]
    fn gaussian_drift_schedule(drifts: Vec<f64>, sigma: f64) -> PyResult<Self> {
        Ok(FamilyMember {
            inner: families::gaussian_drift_schedule(drifts, sigma).map_err(err)?,
        })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_owned()
    }

    #[getter]
    fn mean(&self) -> Option<f64> {
        self.inner.mean()
    }

    #[getter]
    fn sigma_sub_gaussian(&self) -> Option<f64> {
        self.inner.sigma_sub_gaussian()
    }

    /// Sample x_1..x_T from substream `replicate` of generator `seed`.
    #[pyo3(signature = (horizon, seed, replicate=0))]
    fn sample_path(&self, horizon: usize, seed: u64, replicate: u64) -> SamplePath {
        SamplePath {
            inner: self.inner.sample_path(horizon, mc::substream_rng(seed, replicate)),
        }
    }

    /// Tail function r(K) = E[|X| 1{|X| > K}]: (value, stderr_or_None).
    #[pyo3(signature = (k, n_mc=100_000, seed=0))]
    fn tail_r(&self, k: f64, n_mc: u64, seed: u64) -> PyResult<(f64, Option<f64>)> {
        let est = families::tail_r(&self.inner, k, n_mc, seed).map_err(err)?;
        Ok((est.value, est.stderr))
    }

    fn __repr__(&self) -> String {
        format!("FamilyMember({})", self.inner.label())
    }
}

/// A finite grid of members standing in for a family.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct DistributionFamily {
    inner: families::DistributionFamily,
}

#[pymethods]
impl DistributionFamily {
    #[new]
    fn new(label: String, members: Vec<FamilyMember>) -> PyResult<Self> {
        Ok(DistributionFamily {
            inner: families::DistributionFamily::new(
                label,
                members.into_iter().map(|m| m.inner).collect(),
            )
            .map_err(err)?,
        })
    }

    #[staticmethod]
    fn singleton(member: &FamilyMember) -> Self {
        DistributionFamily {
            inner: families::DistributionFamily::singleton(member.inner.clone()),
        }
    }

    #[staticmethod]
    fn truncated_cauchy_grid(a_values: Vec<f64>) -> PyResult<Self> {
        Ok(DistributionFamily {
            inner: families::truncated_cauchy_family(&a_values).map_err(err)?,
        })
    }

    #[staticmethod]
    fn binary_pn_grid(n_values: Vec<u32>) -> PyResult<Self> {
        Ok(DistributionFamily {
            inner: families::binary_pn_family(&n_values).map_err(err)?,
        })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_owned()
    }

    fn members(&self) -> Vec<FamilyMember> {
        self.inner
            .members()
            .iter()
            .map(|m| FamilyMember { inner: m.clone() })
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.members().len()
    }
}

// ---------------------------------------------------------------------------
// linecross
// ---------------------------------------------------------------------------

/// A computed bound with the inputs that produced it.
#[pyclass(frozen)]
struct BoundReport {
    #[pyo3(get)]
    bound: f64,
    #[pyo3(get)]
    eps: f64,
    #[pyo3(get)]
    gamma: f64,
    #[pyo3(get)]
    k_truncation: f64,
    #[pyo3(get)]
    r_of_k: f64,
    #[pyo3(get)]
    event_threshold: f64,
    #[pyo3(get)]
    vacuous: bool,
}

impl From<linecross::BoundReport> for BoundReport {
    fn from(r: linecross::BoundReport) -> Self {
        BoundReport {
            bound: r.bound_value,
            eps: r.epsilon,
            gamma: r.gamma,
            k_truncation: r.k_truncation,
            r_of_k: r.r_of_k,
            event_threshold: r.event_threshold,
            vacuous: r.vacuous,
        }
    }
}

#[pymethods]
impl BoundReport {
    fn __repr__(&self) -> String {
        format!(
            "BoundReport(bound={}, threshold={}, vacuous={})",
            self.bound, self.event_threshold, self.vacuous
        )
    }
}

#[pyfunction]
fn dubins_savage_bound(alpha: f64, beta: f64) -> PyResult<f64> {
    linecross::dubins_savage_bound(alpha, beta).map_err(err)
}

#[pyfunction]
fn l1_bound(eps: f64, gamma: f64, k: f64, r_of_k: f64) -> PyResult<BoundReport> {
    Ok(linecross::l1_bound(eps, gamma, k, r_of_k).map_err(err)?.into())
}

#[pyfunction]
fn l1_bound_auto(eps: f64, gamma: f64, member: &FamilyMember) -> PyResult<BoundReport> {
    let tail = member
        .inner
        .tail()
        .ok_or_else(|| PyValueError::new_err("member has no tail function"))?;
    Ok(linecross::l1_bound_auto(eps, gamma, tail).map_err(err)?.into())
}

#[pyfunction]
fn fixed_k_mean_bound(eps: f64, k: u64, member: &FamilyMember) -> PyResult<BoundReport> {
    let tail = member
        .inner
        .tail()
        .ok_or_else(|| PyValueError::new_err("member has no tail function"))?;
    Ok(linecross::fixed_k_mean_bound(eps, k, tail).map_err(err)?.into())
}

// ---------------------------------------------------------------------------
// slln
// ---------------------------------------------------------------------------

/// A k_n schedule with its certification flag.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct KSchedule {
    inner: slln::KSchedule,
}

#[pymethods]
impl KSchedule {
    #[staticmethod]
    fn uncertified(entries: Vec<(u32, u128)>, family_label: String) -> PyResult<Self> {
        Ok(KSchedule {
            inner: slln::KSchedule::uncertified(entries, family_label).map_err(err)?,
        })
    }

    #[getter]
    fn certified(&self) -> bool {
        self.inner.certified()
    }

    #[getter]
    fn family_label(&self) -> String {
        self.inner.family_label().to_owned()
    }

    fn entries(&self) -> Vec<(u32, u128)> {
        self.inner.entries().iter().map(|e| (e.n, e.k_n)).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "KSchedule({} entries, certified={})",
            self.inner.entries().len(),
            self.inner.certified()
        )
    }
}

/// Drift rule: first u > k with |mean_u - mean_k| > 1/n.
#[pyfunction]
fn tau_kn(k: u128, n: u32) -> PyResult<StoppingRule> {
    Ok(StoppingRule {
        inner: slln::tau_kn(k, n).map_err(err)?,
    })
}

/// Smallest certified k_n per n <= n_max for a closed-form-tail family.
#[pyfunction]
fn k_schedule(family: &DistributionFamily, n_max: u32) -> PyResult<KSchedule> {
    Ok(KSchedule {
        inner: slln::k_schedule(&family.inner, n_max).map_err(err)?,
    })
}

/// The indicator witness over a schedule's drift rules.
#[pyfunction]
fn slln_witness(schedule: &KSchedule) -> PyResult<EvidenceProcess> {
    Ok(EvidenceProcess {
        inner: slln::slln_witness(&schedule.inner).map_err(err)?,
    })
}

/// Post-burn-in running-mean range (diagnostic only).
#[pyfunction]
#[pyo3(signature = (path, t_burnin=None))]
fn divergence_gap(path: &SamplePath, t_burnin: Option<usize>) -> PyResult<f64> {
    slln::divergence_gap(&path.inner, t_burnin).map_err(err)
}

/// The alternating doubling path x_t = (-1)^(t+1) 2^(t-1).
#[pyfunction]
fn doubling_path(horizon: usize) -> PyResult<SamplePath> {
    Ok(SamplePath {
        inner: slln::doubling_path(horizon).map_err(err)?,
    })
}

// ---------------------------------------------------------------------------
// oracles
// ---------------------------------------------------------------------------

/// An exactly computed probability: (value, error_bound, method).
#[pyfunction]
fn binary_pn_stop_prob(m: u32, n: u32) -> PyResult<(f64, f64, String)> {
    let e = oracles::binary_pn_stop_prob(m, n).map_err(err)?;
    Ok((e.value, e.error_bound, e.method))
}

#[pyfunction]
fn binary_first_one_prob(n: u32) -> (f64, f64, String) {
    let e = oracles::binary_first_one_prob(n);
    (e.value, e.error_bound, e.method)
}

#[pyfunction]
#[pyo3(signature = (n, t_trunc, i=1))]
fn two_coin_tau_n_prob(n: u32, t_trunc: u32, i: u8) -> PyResult<(f64, f64, String)> {
    let e = oracles::two_coin_tau_n_prob(i, n, t_trunc).map_err(err)?;
    Ok((e.value, e.error_bound, e.method))
}

// ---------------------------------------------------------------------------
// mc
// ---------------------------------------------------------------------------

/// A Monte Carlo point estimate with its provenance.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct McEstimate {
    #[pyo3(get)]
    value: f64,
    #[pyo3(get)]
    stderr: f64,
    #[pyo3(get)]
    n_paths: u64,
    #[pyo3(get)]
    horizon: u64,
    #[pyo3(get)]
    seed: u64,
    #[pyo3(get)]
    kind: String,
}

impl From<mc::McEstimate> for McEstimate {
    fn from(e: mc::McEstimate) -> Self {
        McEstimate {
            value: e.value,
            stderr: e.stderr,
            n_paths: e.n_paths,
            horizon: e.horizon,
            seed: e.seed,
            kind: e.kind.as_str().to_owned(),
        }
    }
}

#[pymethods]
impl McEstimate {
    fn __repr__(&self) -> String {
        format!("McEstimate(value={}, stderr={})", self.value, self.stderr)
    }
}

/// One verification row: an estimate against an optional bound.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct ReportRow {
    #[pyo3(get)]
    member: String,
    #[pyo3(get)]
    subject: String,
    #[pyo3(get)]
    estimate: McEstimate,
    #[pyo3(get)]
    bound: Option<f64>,
    #[pyo3(get)]
    violated: bool,
}

impl From<mc::ReportRow> for ReportRow {
    fn from(r: mc::ReportRow) -> Self {
        ReportRow {
            member: r.member,
            subject: r.subject,
            estimate: r.estimate.into(),
            bound: r.bound,
            violated: r.violated,
        }
    }
}

#[pymethods]
impl ReportRow {
    fn __repr__(&self) -> String {
        format!(
            "ReportRow({} / {}: {} violated={})",
            self.member, self.subject, self.estimate.value, self.violated
        )
    }
}

fn rows_of(report: mc::VerificationReport) -> Vec<ReportRow> {
    report.rows.into_iter().map(ReportRow::from).collect()
}

/// Frequency of hit_time <= horizon, with binomial standard error.
#[pyfunction]
fn estimate_stop_prob(
    member: &FamilyMember,
    rule: &StoppingRule,
    horizon: usize,
    n_paths: u64,
    seed: u64,
) -> PyResult<McEstimate> {
    Ok(mc::estimate_stop_prob(&member.inner, &rule.inner, horizon, n_paths, seed)
        .map_err(err)?
        .into())
}

/// Per-member stop probabilities plus the grid maximum (last row).
#[pyfunction]
fn mu_star_grid_bound(
    family: &DistributionFamily,
    rule: &StoppingRule,
    horizon: usize,
    n_paths: u64,
    seed: u64,
) -> PyResult<Vec<ReportRow>> {
    Ok(rows_of(
        mc::mu_star_grid_bound(&family.inner, &rule.inner, horizon, n_paths, seed)
            .map_err(err)?,
    ))
}

/// Crossing frequency of 1/alpha against the Ville bound alpha.
#[pyfunction]
fn ville_check(
    process: &EvidenceProcess,
    member: &FamilyMember,
    alpha: f64,
    horizon: usize,
    n_paths: u64,
    seed: u64,
) -> PyResult<Vec<ReportRow>> {
    Ok(rows_of(
        mc::ville_check(&process.inner, &member.inner, alpha, horizon, n_paths, seed)
            .map_err(err)?,
    ))
}

/// Stopped means E[E_{tau ^ T}] against 1, per member and rule.
#[pyfunction]
fn eprocess_check(
    process: &EvidenceProcess,
    rules: Vec<StoppingRule>,
    family: &DistributionFamily,
    horizon: usize,
    n_paths: u64,
    seed: u64,
) -> PyResult<Vec<ReportRow>> {
    let rules: Vec<_> = rules.into_iter().map(|r| r.inner).collect();
    Ok(rows_of(
        mc::eprocess_check(&process.inner, &rules, &family.inner, horizon, n_paths, seed)
            .map_err(err)?,
    ))
}

/// Fast line-crossing frequency for the fair-sign walk.
#[pyfunction]
#[pyo3(signature = (intercept, slope, horizon, n_paths, seed, two_sided=true))]
fn rademacher_line_crossing_freq(
    intercept: f64,
    slope: f64,
    horizon: u64,
    n_paths: u64,
    seed: u64,
    two_sided: bool,
) -> PyResult<McEstimate> {
    Ok(
        mc::rademacher_line_crossing_freq(intercept, slope, two_sided, horizon, n_paths, seed)
            .map_err(err)?
            .into(),
    )
}

#[pymodule]
fn eville(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DEFAULT_SEED", mc::DEFAULT_SEED)?;
    m.add_class::<SamplePath>()?;
    m.add_class::<StoppingRule>()?;
    m.add_class::<EvidenceProcess>()?;
    m.add_class::<FamilyMember>()?;
    m.add_class::<DistributionFamily>()?;
    m.add_class::<BoundReport>()?;
    m.add_class::<KSchedule>()?;
    m.add_class::<McEstimate>()?;
    m.add_class::<ReportRow>()?;
    m.add_function(wrap_pyfunction!(hit_time, m)?)?;
    m.add_function(wrap_pyfunction!(min_rule, m)?)?;
    m.add_function(wrap_pyfunction!(level_rule, m)?)?;
    m.add_function(wrap_pyfunction!(normal_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(log_normal_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(dubins_savage_bound, m)?)?;
    m.add_function(wrap_pyfunction!(l1_bound, m)?)?;
    m.add_function(wrap_pyfunction!(l1_bound_auto, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_k_mean_bound, m)?)?;
    m.add_function(wrap_pyfunction!(tau_kn, m)?)?;
    m.add_function(wrap_pyfunction!(k_schedule, m)?)?;
    m.add_function(wrap_pyfunction!(slln_witness, m)?)?;
    m.add_function(wrap_pyfunction!(divergence_gap, m)?)?;
    m.add_function(wrap_pyfunction!(doubling_path, m)?)?;
    m.add_function(wrap_pyfunction!(binary_pn_stop_prob, m)?)?;
    m.add_function(wrap_pyfunction!(binary_first_one_prob, m)?)?;
    m.add_function(wrap_pyfunction!(two_coin_tau_n_prob, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_stop_prob, m)?)?;
    m.add_function(wrap_pyfunction!(mu_star_grid_bound, m)?)?;
    m.add_function(wrap_pyfunction!(ville_check, m)?)?;
    m.add_function(wrap_pyfunction!(eprocess_check, m)?)?;
    m.add_function(wrap_pyfunction!(rademacher_line_crossing_freq, m)?)?;
    Ok(())
}
