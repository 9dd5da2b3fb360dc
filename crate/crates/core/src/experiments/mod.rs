//! Monte Carlo experiment harness.
//!
//! Everything here is protocol, not mathematics: deterministic seed
//! derivation, a bounded worker pool whose output is independent of
//! scheduling, CSV/manifest persistence, and the figure drivers. A run is
//! pinned down by its [`ExperimentConfig`] alone — re-running any config
//! reproduces the output files byte for byte, regardless of worker count.

pub mod config_file;
pub mod figures;
pub mod histogram;
pub mod manifest;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use num_complex::Complex;

use crate::eigensolver::{decompose, decompose_values, SpectralData};
use crate::ensemble::{
    sample_wigner, truncate, EntryLaw, SymmetricMatrix, TruncationSpec, WignerConfig,
};
use crate::error::{Error, Result};
use crate::resolvent::{
    epsilon_terms, eta_terms, lambda_identity_residual, m_n, m_n_from_values, minor_spectral,
    r_entry, resolvent_inequalities, schur_residual, ResolventView,
};
use crate::rng::mix64;
use crate::semicircle::{quantile_table, stieltjes_s, ComplexPoint, QuantileTable};
use crate::statistics::{
    delocalization_stat, kolmogorov_distance, q_nj, rigidity_profile, t_statistic,
    zeta_statistic, SpectralEdge,
};

pub use config_file::{load_config, parse_config, parse_n_spec};
pub use figures::{run_figure, FigureConfig, FigureKind, FigureOutput};
pub use histogram::{emit_histogram, Histogram, HistogramRange};
pub use manifest::{replay, sha256_hex, RunManifest};

/// The experiment protocols. The kind decides which statistics a trial
/// computes (and therefore whether eigenvectors are needed) and which side
/// outputs the run writes beside `records.csv`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Values-only statistics plus a pooled `histogram.csv` per dimension.
    EsdHistogram,
    /// Values-only statistics across an `n` grid (the `T_n` protocol).
    KolmogorovCurve,
    /// Values-only statistics plus the truncated edge column.
    EdgeTw,
    /// Full decompositions: `V_n` and its truncated companion.
    Delocalization,
    /// Full decompositions plus the exact-identity residual suite; suite
    /// failures are reported in the manifest notes.
    IdentitySuite,
    /// Values-only statistics plus `local_law.csv` with `sup_u |m_n - s|`
    /// per bandwidth.
    LocalLawScan,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::EsdHistogram,
        ExperimentKind::KolmogorovCurve,
        ExperimentKind::EdgeTw,
        ExperimentKind::Delocalization,
        ExperimentKind::IdentitySuite,
        ExperimentKind::LocalLawScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::EsdHistogram => "esd_histogram",
            ExperimentKind::KolmogorovCurve => "kolmogorov_curve",
            ExperimentKind::EdgeTw => "edge_tw",
            ExperimentKind::Delocalization => "delocalization",
            ExperimentKind::IdentitySuite => "identity_suite",
            ExperimentKind::LocalLawScan => "local_law_scan",
        }
    }

    fn needs_vectors(self) -> bool {
        matches!(self, ExperimentKind::Delocalization | ExperimentKind::IdentitySuite)
    }

    fn wants_truncated(self) -> bool {
        matches!(self, ExperimentKind::EdgeTw | ExperimentKind::Delocalization)
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
                Error::config(format!("unknown experiment '{s}', expected one of {names:?}"))
            })
    }
}

/// Full description of a run.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub law: EntryLaw<f64>,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub truncation: Option<TruncationSpec<f64>>,
    pub bins: usize,
    pub output_dir: PathBuf,
    pub workers: usize,
}

impl ExperimentConfig {
    /// A config with the customary defaults: no truncation, 70 bins,
    /// current directory, one worker.
    pub fn new(
        experiment: ExperimentKind,
        law: EntryLaw<f64>,
        n_values: Vec<usize>,
        trials: usize,
        master_seed: u64,
    ) -> Self {
        ExperimentConfig {
            experiment,
            law,
            n_values,
            trials,
            master_seed,
            truncation: None,
            bins: 70,
            output_dir: PathBuf::from("."),
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::config("trials must be at least 1"));
        }
        if self.n_values.is_empty() {
            return Err(Error::config("at least one matrix dimension is required"));
        }
        if let Some(&bad) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(Error::config(format!("every n must be at least 2, got {bad}")));
        }
        if self.bins < 2 {
            return Err(Error::config("bins must be at least 2"));
        }
        if self.workers < 1 {
            return Err(Error::config("workers must be at least 1"));
        }
        Ok(())
    }
}

/// Derives the per-trial RNG seed from `(master, trial, n)`.
///
/// Two rounds of the SplitMix64 finalizer, with `trial` and `n` lifted
/// onto separate lanes by fixed odd multipliers:
///
/// ```text
/// mix64(mix64(master ^ trial * 0xA24BAED4963EE407) ^ n * 0x9FB21C651E98DF25)
/// ```
///
/// Injectivity over a run's `(trial, n)` pairs is not structural, so
/// [`run`] scans for collisions and reports the count in the manifest.
pub fn derive_seed(master: u64, trial: usize, n: usize) -> u64 {
    let t = (trial as u64).wrapping_mul(0xA24B_AED4_963E_E407);
    let m = (n as u64).wrapping_mul(0x9FB2_1C65_1E98_DF25);
    mix64(mix64(master ^ t) ^ m)
}

/// One CSV row. Statistics a kind does not compute are `NaN`; a trial
/// whose decomposition fails keeps `NaN` everywhere (and the failure is
/// noted in the manifest) so the run can continue.
#[derive(Clone, Copy, Debug)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub n: usize,
    pub seed_used: u64,
    pub delta_star: f64,
    pub t_stat: f64,
    pub zeta: f64,
    pub zeta_truncated: f64,
    pub v_stat: f64,
    pub v_stat_truncated: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub max_bulk_rigidity: f64,
}

pub const CSV_HEADER: &str = "trial_index,n,seed_used,delta_star,t_stat,zeta,zeta_truncated,\
v_stat,v_stat_truncated,lambda_min,lambda_max,max_bulk_rigidity";

/// 17 significant digits — enough to reproduce the `f64` bit pattern.
fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

impl TrialRecord {
    fn blank(trial_index: usize, n: usize, seed_used: u64) -> Self {
        TrialRecord {
            trial_index,
            n,
            seed_used,
            delta_star: f64::NAN,
            t_stat: f64::NAN,
            zeta: f64::NAN,
            zeta_truncated: f64::NAN,
            v_stat: f64::NAN,
            v_stat_truncated: f64::NAN,
            lambda_min: f64::NAN,
            lambda_max: f64::NAN,
            max_bulk_rigidity: f64::NAN,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.trial_index,
            self.n,
            self.seed_used,
            fmt_float(self.delta_star),
            fmt_float(self.t_stat),
            fmt_float(self.zeta),
            fmt_float(self.zeta_truncated),
            fmt_float(self.v_stat),
            fmt_float(self.v_stat_truncated),
            fmt_float(self.lambda_min),
            fmt_float(self.lambda_max),
            fmt_float(self.max_bulk_rigidity),
        )
    }
}

/// The records file as a string: header plus one LF-terminated row each.
pub fn records_csv(records: &[TrialRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// The bandwidths scanned by [`ExperimentKind::LocalLawScan`].
pub const LOCAL_LAW_V: [f64; 4] = [0.02, 0.05, 0.1, 0.5];

/// One row of `local_law.csv`.
#[derive(Clone, Copy, Debug)]
pub struct LocalLawRow {
    pub trial_index: usize,
    pub n: usize,
    pub v: f64,
    pub sup_deviation: f64,
}

/// `sup_u |m_n(u + iv) - s(u + iv)|` over the grid `u = -2(0.05)2`.
pub fn local_law_sup(values: &[f64], v: f64) -> f64 {
    let mut sup = 0.0f64;
    for i in 0..=80 {
        let u = -2.0 + 0.05 * i as f64;
        let z = ComplexPoint::new(u, v).expect("positive bandwidth");
        let gap = (m_n_from_values(values, z) - stieltjes_s(z)).norm();
        sup = sup.max(gap);
    }
    sup
}

/// Order-preserving parallel map: worker threads claim input indices from
/// a shared counter and write into the matching output slot, so the result
/// order (and everything derived from it) is independent of scheduling.
pub(crate) fn par_map<I, O, F>(inputs: &[I], workers: usize, f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync,
{
    let workers = workers.clamp(1, inputs.len().max(1));
    if workers == 1 {
        return inputs.iter().map(|i| f(i)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<O>>> =
        Mutex::new((0..inputs.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= inputs.len() {
                    break;
                }
                let out = f(&inputs[i]);
                slots.lock().expect("no poisoned worker")[i] = Some(out);
            });
        }
    });
    slots
        .into_inner()
        .expect("no poisoned worker")
        .into_iter()
        .map(|o| o.expect("every slot filled"))
        .collect()
}

struct TrialOutput {
    record: TrialRecord,
    local_law: Vec<LocalLawRow>,
    eigenvalues: Option<Vec<f64>>,
    note: Option<String>,
}

fn fill_from_values(record: &mut TrialRecord, values: &[f64], table: &QuantileTable<f64>) {
    let n = values.len();
    record.delta_star = kolmogorov_distance(values);
    record.t_stat = t_statistic(record.delta_star, n).unwrap_or(f64::NAN);
    record.zeta = zeta_statistic(values[n - 1], n, SpectralEdge::Upper);
    record.lambda_min = values[0];
    record.lambda_max = values[n - 1];
    record.max_bulk_rigidity = rigidity_profile(values, table).max_bulk();
}

fn run_trial(config: &ExperimentConfig, n: usize, trial_index: usize, seed: u64) -> TrialOutput {
    let kind = config.experiment;
    let table = quantile_table::<f64>(n).expect("n >= 2 validated");
    let w = sample_wigner(&WignerConfig { n, law: config.law, seed });
    let mut out = TrialOutput {
        record: TrialRecord::blank(trial_index, n, seed),
        local_law: Vec::new(),
        eigenvalues: None,
        note: None,
    };

    let fail = |note: String, out: &mut TrialOutput| {
        out.note = Some(format!("trial {trial_index} n {n}: {note}"));
    };

    if kind.needs_vectors() {
        match decompose(&w) {
            Ok(sd) => {
                fill_from_values(&mut out.record, sd.eigenvalues(), &table);
                out.record.v_stat = delocalization_stat(&sd);
                if kind == ExperimentKind::IdentitySuite {
                    match identity_report(&w, &sd, &standard_z_grid()) {
                        Ok(report) if !report.passes() => {
                            fail(format!("identity suite failed: {report:?}"), &mut out)
                        }
                        Ok(_) => {}
                        Err(e) => fail(format!("identity suite error: {e}"), &mut out),
                    }
                }
            }
            Err(e) => fail(format!("decomposition failed: {e}"), &mut out),
        }
    } else {
        match decompose_values(&w) {
            Ok(values) => {
                fill_from_values(&mut out.record, &values, &table);
                if kind == ExperimentKind::LocalLawScan {
                    out.local_law = LOCAL_LAW_V
                        .iter()
                        .map(|&v| LocalLawRow {
                            trial_index,
                            n,
                            v,
                            sup_deviation: local_law_sup(&values, v),
                        })
                        .collect();
                }
                if kind == ExperimentKind::EsdHistogram {
                    out.eigenvalues = Some(values);
                }
            }
            Err(e) => fail(format!("decomposition failed: {e}"), &mut out),
        }
    }

    if kind.wants_truncated() {
        if let Some(spec) = config.truncation {
            match truncate(&w, &spec, config.law) {
                Ok(triple) => {
                    if kind.needs_vectors() {
                        match decompose(&triple.breve) {
                            Ok(sd) => {
                                out.record.v_stat_truncated = delocalization_stat(&sd);
                                out.record.zeta_truncated =
                                    zeta_statistic(sd.lambda_max(), n, SpectralEdge::Upper);
                            }
                            Err(e) => fail(format!("truncated decomposition: {e}"), &mut out),
                        }
                    } else {
                        match decompose_values(&triple.breve) {
                            Ok(values) => {
                                out.record.zeta_truncated =
                                    zeta_statistic(values[n - 1], n, SpectralEdge::Upper);
                            }
                            Err(e) => fail(format!("truncated decomposition: {e}"), &mut out),
                        }
                    }
                }
                Err(e) => fail(format!("truncation failed: {e}"), &mut out),
            }
        }
    }

    out
}

/// Executes a config: all `(n, trial)` jobs through the worker pool,
/// `records.csv` (plus any kind-specific side CSV) into `output_dir`, and
/// the manifest describing the run. Records are ordered by
/// `(n, trial_index)` whatever the scheduling; per-trial failures leave
/// `NaN` rows and a manifest note rather than aborting the run.
pub fn run(config: &ExperimentConfig) -> Result<(Vec<TrialRecord>, RunManifest)> {
    config.validate()?;
    let started = Instant::now();

    let mut ns = config.n_values.clone();
    ns.sort_unstable();
    ns.dedup();
    let jobs: Vec<(usize, usize, u64)> = ns
        .iter()
        .flat_map(|&n| {
            (0..config.trials).map(move |t| (n, t, derive_seed(config.master_seed, t, n)))
        })
        .collect();

    let mut sorted_seeds: Vec<u64> = jobs.iter().map(|job| job.2).collect();
    sorted_seeds.sort_unstable();
    let seed_collisions = sorted_seeds.windows(2).filter(|w| w[0] == w[1]).count();

    let outputs = par_map(&jobs, config.workers, |&(n, trial, seed)| {
        run_trial(config, n, trial, seed)
    });

    let mut records = Vec::with_capacity(outputs.len());
    let mut notes = Vec::new();
    let mut local_rows = Vec::new();
    let mut pooled: Vec<(usize, Vec<f64>)> = Vec::new();
    for out in outputs {
        if let Some(note) = out.note {
            notes.push(note);
        }
        local_rows.extend(out.local_law);
        if let Some(values) = out.eigenvalues {
            match pooled.iter_mut().find(|(n, _)| *n == out.record.n) {
                Some((_, pool)) => pool.extend(values),
                None => pooled.push((out.record.n, values)),
            }
        }
        records.push(out.record);
    }
    if seed_collisions > 0 {
        notes.push(format!("seed derivation produced {seed_collisions} collisions"));
    }

    std::fs::create_dir_all(&config.output_dir)
        .map_err(|e| io_at(&config.output_dir, e))?;
    let mut files: Vec<(String, String)> = vec![("records.csv".into(), records_csv(&records))];

    if config.experiment == ExperimentKind::LocalLawScan {
        let mut csv = String::from("trial_index,n,v,sup_deviation\n");
        for row in &local_rows {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                row.trial_index,
                row.n,
                fmt_float(row.v),
                fmt_float(row.sup_deviation)
            ));
        }
        files.push(("local_law.csv".into(), csv));
    }
    if config.experiment == ExperimentKind::EsdHistogram {
        let mut csv = String::from("n,bin_left,bin_right,density\n");
        for (n, values) in &pooled {
            let hist = histogram::emit_histogram(
                values,
                config.bins,
                histogram::HistogramRange::Data,
            )?;
            for i in 0..hist.bins() {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    n,
                    fmt_float(hist.edges[i]),
                    fmt_float(hist.edges[i + 1]),
                    fmt_float(hist.densities[i])
                ));
            }
        }
        files.push(("histogram.csv".into(), csv));
    }

    let mut digests = std::collections::BTreeMap::new();
    for (name, contents) in &files {
        let path = config.output_dir.join(name);
        std::fs::write(&path, contents).map_err(|e| io_at(&path, e))?;
        digests.insert(name.clone(), sha256_hex(contents.as_bytes()));
    }

    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config_file::config_to_map(config),
        records: records.len(),
        seeds: records.iter().map(|r| r.seed_used).collect(),
        seed_collisions,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        outputs: digests,
        notes,
    };
    manifest.write(&config.output_dir.join("manifest.json"))?;

    Ok((records, manifest))
}

pub(crate) fn io_at(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// Ten standard evaluation points with bandwidths spanning `[0.1, 4]`,
/// used by the identity suite and the `verify` command.
pub fn standard_z_grid() -> Vec<ComplexPoint<f64>> {
    let us = [-1.7, -0.6, 0.0, 0.9, 1.8, -1.2, 0.3, 1.5, -2.5, 2.2];
    let vs = [0.1, 0.25, 0.5, 0.8, 1.2, 1.7, 2.3, 3.0, 3.6, 4.0];
    us.iter()
        .zip(vs.iter())
        .map(|(&u, &v)| ComplexPoint::new(u, v).expect("fixed grid is valid"))
        .collect()
}

/// Worst residuals and slacks of the exact-identity suite on one matrix.
#[derive(Clone, Copy, Debug)]
pub struct IdentityReport {
    pub n: usize,
    pub z_points: usize,
    /// `| R_jj - 1/(-z - m_n + e1 + e2 + e3 + e4) |`, maximized.
    pub max_schur_residual: f64,
    /// `| (Tr R - Tr R^(j)) - (1 + eta0 + eta1 + eta2) R_jj |`, maximized.
    pub max_trace_minor_residual: f64,
    /// `| (m_n - s) - T_n / b_n |`, maximized.
    pub max_lambda_residual: f64,
    /// Minimum slack of the three resolvent bounds.
    pub min_inequality_slack: f64,
    /// Minimum slack of `2 w Im R_jj(u* + iw) - Q_nj(w)`.
    pub min_q_bound_slack: f64,
}

impl IdentityReport {
    /// The residual/slack thresholds the suite is held to.
    pub fn passes(&self) -> bool {
        self.max_schur_residual <= 1e-8
            && self.max_trace_minor_residual <= 1e-8
            && self.max_lambda_residual <= 1e-8
            && self.min_inequality_slack >= -1e-12
            && self.min_q_bound_slack >= -1e-12
    }
}

/// Probe rows: first, middle, last — enough to cover both edge and bulk
/// index behavior without an `O(n)` sweep per z-point.
fn probe_rows(n: usize) -> Vec<usize> {
    let mut rows = vec![0, n / 2, n - 1];
    rows.dedup();
    rows
}

/// Runs the exact-identity and inequality suite on one decomposed matrix:
/// the Schur-complement recursion, the trace-minor identity, the
/// `Lambda_n = T_n / b_n` representation, the three resolvent bounds, and
/// the spectral-window bound on `Q_nj`.
pub fn identity_report(
    w: &SymmetricMatrix<f64>,
    spectral: &SpectralData<f64>,
    zs: &[ComplexPoint<f64>],
) -> Result<IdentityReport> {
    let n = w.n();
    if n < 2 {
        return Err(Error::domain("identity suite needs n >= 2"));
    }
    if zs.is_empty() {
        return Err(Error::domain("identity suite needs at least one z point"));
    }
    let minors: Vec<SpectralData<f64>> =
        (0..n).map(|j| minor_spectral(w, j)).collect::<Result<Vec<_>>>()?;
    let probes = probe_rows(n);

    let mut report = IdentityReport {
        n,
        z_points: zs.len(),
        max_schur_residual: 0.0,
        max_trace_minor_residual: 0.0,
        max_lambda_residual: 0.0,
        min_inequality_slack: f64::INFINITY,
        min_q_bound_slack: f64::INFINITY,
    };

    for &z in zs {
        let view = ResolventView::new(spectral, z);
        let lambda = lambda_identity_residual(w, z, spectral, &minors)?;
        report.max_lambda_residual = report.max_lambda_residual.max(lambda);
        for &j in &probes {
            let minor = &minors[j];
            let terms = epsilon_terms(w, &view, j, minor);
            report.max_schur_residual =
                report.max_schur_residual.max(schur_residual(&view, j, &terms));

            let eta = eta_terms(w, j, z, minor);
            let tr_minor = m_n(minor, z) * (n as f64 - 1.0);
            let rjj = r_entry(&view, j, j);
            let trace_residual =
                ((view.trace() - tr_minor) - (Complex::new(1.0, 0.0) + eta.sum()) * rjj).norm();
            report.max_trace_minor_residual =
                report.max_trace_minor_residual.max(trace_residual);

            let ineq = resolvent_inequalities(minor, z);
            for slack in ineq.slacks {
                report.min_inequality_slack = report.min_inequality_slack.min(slack);
            }
        }
    }

    for &j in &probes {
        for window in [0.05, 0.2, 1.0] {
            let (value, endpoint) = q_nj(spectral, j, window);
            let z = ComplexPoint::new(endpoint, window)?;
            let view = ResolventView::new(spectral, z);
            let cap = 2.0 * window * r_entry(&view, j, j).im;
            report.min_q_bound_slack = report.min_q_bound_slack.min(cap - value);
        }
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    fn tiny_config(kind: ExperimentKind, dir: &Path) -> ExperimentConfig {
        let mut config = ExperimentConfig::new(
            kind,
            EntryLaw::Gaussian,
            vec![16, 8],
            2,
            77,
        );
        config.output_dir = dir.to_path_buf();
        config
    }

    #[test]
    fn derive_seed_is_deterministic_and_distinguishes_trials() {
        assert_eq!(derive_seed(5, 3, 100), derive_seed(5, 3, 100));
        let mut stream = Stream::new(12);
        for _ in 0..1_000_000 {
            let master = stream.next_u64();
            assert_ne!(derive_seed(master, 0, 64), derive_seed(master, 1, 64));
        }
    }

    #[test]
    fn derive_seed_avalanche() {
        // Flipping one master bit should flip about half the output bits.
        let mut stream = Stream::new(99);
        let mut total = 0u64;
        let samples = 10_000;
        for _ in 0..samples {
            let master = stream.next_u64();
            let bit = 1u64 << (stream.next_u64() % 64);
            let a = derive_seed(master, 7, 500);
            let b = derive_seed(master ^ bit, 7, 500);
            total += (a ^ b).count_ones() as u64;
        }
        let mean_flips = total as f64 / samples as f64;
        assert!(mean_flips >= 20.0, "mean flipped bits {mean_flips}");
    }

    #[test]
    fn smoke_run_single_trial() {
        let dir = tempfile::tempdir().unwrap();
        let mut config =
            ExperimentConfig::new(ExperimentKind::KolmogorovCurve, EntryLaw::Gaussian, vec![2], 1, 3);
        config.output_dir = dir.path().to_path_buf();
        let (records, manifest) = run(&config).unwrap();
        assert_eq!(records.len(), 1);
        let r = &records[0];
        assert!(r.delta_star >= 0.0 && r.delta_star <= 1.0);
        assert!(r.v_stat.is_nan(), "values-only kind must not report V_n");
        assert_eq!(manifest.records, 1);
        assert_eq!(manifest.seed_collisions, 0);
        assert!(dir.path().join("records.csv").exists());
        assert!(dir.path().join("manifest.json").exists());
    }

    #[test]
    fn records_are_ordered_and_reproducible_across_workers() {
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let mut config = tiny_config(ExperimentKind::KolmogorovCurve, dir1.path());
        config.n_values = vec![16, 8]; // unsorted on purpose
        let (records1, manifest1) = run(&config).unwrap();
        let keys: Vec<(usize, usize)> =
            records1.iter().map(|r| (r.n, r.trial_index)).collect();
        assert_eq!(keys, vec![(8, 0), (8, 1), (16, 0), (16, 1)]);

        config.output_dir = dir2.path().to_path_buf();
        config.workers = 4;
        let (records2, manifest2) = run(&config).unwrap();
        assert_eq!(records_csv(&records1), records_csv(&records2));
        assert_eq!(manifest1.outputs, manifest2.outputs);
        let bytes1 = std::fs::read(dir1.path().join("records.csv")).unwrap();
        let bytes2 = std::fs::read(dir2.path().join("records.csv")).unwrap();
        assert_eq!(bytes1, bytes2);
    }

    #[test]
    fn edge_kind_fills_truncated_zeta() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = ExperimentConfig::new(
            ExperimentKind::EdgeTw,
            EntryLaw::pareto(5.1).unwrap(),
            vec![40],
            2,
            11,
        );
        config.truncation = Some(TruncationSpec::default_spec());
        config.output_dir = dir.path().to_path_buf();
        let (records, _) = run(&config).unwrap();
        for r in &records {
            assert!(r.zeta.is_finite());
            assert!(r.zeta_truncated.is_finite());
            assert!(r.v_stat.is_nan() && r.v_stat_truncated.is_nan());
        }
    }

    #[test]
    fn delocalization_kind_fills_v_columns() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = ExperimentConfig::new(
            ExperimentKind::Delocalization,
            EntryLaw::pareto(9.1).unwrap(),
            vec![30],
            2,
            19,
        );
        config.truncation = Some(TruncationSpec::default_spec());
        config.output_dir = dir.path().to_path_buf();
        let (records, _) = run(&config).unwrap();
        for r in &records {
            assert!(r.v_stat >= 1.0 && r.v_stat <= 30.0);
            assert!(r.v_stat_truncated >= 1.0 && r.v_stat_truncated <= 30.0);
            assert!(r.zeta_truncated.is_finite());
        }
    }

    #[test]
    fn local_law_kind_writes_side_csv() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = tiny_config(ExperimentKind::LocalLawScan, dir.path());
        config.n_values = vec![24];
        let (_, manifest) = run(&config).unwrap();
        assert!(manifest.outputs.contains_key("local_law.csv"));
        let side = std::fs::read_to_string(dir.path().join("local_law.csv")).unwrap();
        // Header plus trials x bandwidths rows.
        assert_eq!(side.lines().count(), 1 + 2 * LOCAL_LAW_V.len());
        assert!(side.starts_with("trial_index,n,v,sup_deviation\n"));
    }

    #[test]
    fn esd_kind_writes_histogram_csv() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = tiny_config(ExperimentKind::EsdHistogram, dir.path());
        config.bins = 10;
        let (_, manifest) = run(&config).unwrap();
        assert!(manifest.outputs.contains_key("histogram.csv"));
        let side = std::fs::read_to_string(dir.path().join("histogram.csv")).unwrap();
        // Two dimensions x 10 bins, plus the header.
        assert_eq!(side.lines().count(), 1 + 2 * 10);
    }

    #[test]
    fn identity_kind_passes_on_gaussian_sample() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = tiny_config(ExperimentKind::IdentitySuite, dir.path());
        config.n_values = vec![12];
        config.trials = 1;
        let (records, manifest) = run(&config).unwrap();
        assert!(records[0].v_stat.is_finite());
        assert!(
            manifest.notes.is_empty(),
            "identity suite should pass cleanly: {:?}",
            manifest.notes
        );
    }

    #[test]
    fn identity_report_thresholds() {
        let w = sample_wigner(&WignerConfig { n: 20, law: EntryLaw::<f64>::Gaussian, seed: 4 });
        let sd = decompose(&w).unwrap();
        let report = identity_report(&w, &sd, &standard_z_grid()).unwrap();
        assert!(report.passes(), "{report:?}");
        assert!(report.max_schur_residual <= 1e-9);
        assert!(report.max_trace_minor_residual <= 1e-9);
        assert!(report.max_lambda_residual <= 1e-9);
        assert_eq!(report.n, 20);
        assert_eq!(report.z_points, 10);
    }

    #[test]
    fn local_law_sup_settles_at_moderate_bandwidth() {
        let w = sample_wigner(&WignerConfig { n: 300, law: EntryLaw::<f64>::Gaussian, seed: 9 });
        let values = decompose_values(&w).unwrap();
        let sup = local_law_sup(&values, 0.5);
        assert!(sup < 50.0 / (300.0 * 0.5), "sup = {sup}");
        // Tighter bandwidth, looser deviation: still bounded at this scale.
        assert!(local_law_sup(&values, 0.1) < 50.0 / (300.0 * 0.1));
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in ExperimentKind::ALL {
            let parsed: ExperimentKind = kind.name().parse().unwrap();
            assert_eq!(parsed, kind);
        }
        assert!("edge".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn config_validation_rejects_bad_fields() {
        let good = ExperimentConfig::new(
            ExperimentKind::EdgeTw,
            EntryLaw::Gaussian,
            vec![8],
            1,
            1,
        );
        assert!(good.validate().is_ok());
        let mut c = good.clone();
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.n_values = vec![8, 1];
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.n_values.clear();
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.bins = 1;
        assert!(c.validate().is_err());
        let mut c = good;
        c.workers = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn csv_floats_round_trip_exactly() {
        for v in [1.0 / 3.0, -2.5e-17, 6.02214076e23, f64::MIN_POSITIVE] {
            let parsed: f64 = fmt_float(v).parse().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits(), "{v}");
        }
        assert_eq!(fmt_float(f64::NAN), "NaN");
        assert!("NaN".parse::<f64>().unwrap().is_nan());
    }

    #[test]
    fn par_map_preserves_order_under_contention() {
        let inputs: Vec<usize> = (0..500).collect();
        let eight = par_map(&inputs, 8, |&i| i * i);
        let one = par_map(&inputs, 1, |&i| i * i);
        assert_eq!(eight, one);
        assert_eq!(eight[499], 499 * 499);
    }
}
