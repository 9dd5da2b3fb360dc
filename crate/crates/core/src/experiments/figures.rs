//! Figure drivers: simulate, render a self-contained SVG, and write a
//! companion CSV holding the exact plotted numbers.
//!
//! * `fig1` — empirical spectral density histograms for `mu = 3.1, 4.1,
//!   5.1, 9.1` with the semicircle density overlaid.
//! * `fig2` — mean `T_n` with a `+/- 1` standard deviation envelope over
//!   an `n` grid, for `mu = 5.1, 7.1, 9.1` and the Gaussian case.
//! * `fig3` — edge-statistic histograms (raw and truncated) for
//!   `mu = 5.1, 6.1, 7.1, 9.1` with the gamma-approximated Tracy-Widom
//!   density overlaid.
//! * `fig4` — delocalization-statistic histograms comparing raw,
//!   truncated, and Gaussian ensembles.
//!
//! Defaults are sized for a single desk-class core; the dimensions,
//! trial counts, bins, and seed are all overridable through
//! [`FigureConfig`]. Every figure is deterministic in the seed.

use std::path::PathBuf;

use crate::eigensolver::{decompose, decompose_values};
use crate::ensemble::{sample_wigner, truncate, EntryLaw, TruncationSpec, WignerConfig};
use crate::error::{Error, Result};
use crate::rng::mix64;
use crate::semicircle::density;
use crate::statistics::{
    delocalization_stat, kolmogorov_distance, t_statistic, zeta_statistic, SpectralEdge,
};
use crate::svg::{grid_panels, Axes, Canvas};
use crate::tracywidom::tw1_pdf;

use super::histogram::{emit_histogram, Histogram, HistogramRange};
use super::{derive_seed, io_at, par_map};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureKind {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl FigureKind {
    pub const ALL: [FigureKind; 4] =
        [FigureKind::Fig1, FigureKind::Fig2, FigureKind::Fig3, FigureKind::Fig4];

    pub fn name(self) -> &'static str {
        match self {
            FigureKind::Fig1 => "fig1",
            FigureKind::Fig2 => "fig2",
            FigureKind::Fig3 => "fig3",
            FigureKind::Fig4 => "fig4",
        }
    }
}

impl std::fmt::Display for FigureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FigureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config(format!("unknown figure '{s}', expected fig1..fig4")))
    }
}

/// Knobs shared by all figures. `None` fields fall back to the figure's
/// own default (see the module docs); `truncation` controls the clipping
/// used by the truncated series of fig3/fig4.
#[derive(Clone, Debug)]
pub struct FigureConfig {
    pub n: Option<usize>,
    pub n_values: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub bins: usize,
    pub master_seed: u64,
    pub truncation: TruncationSpec<f64>,
    pub output_dir: PathBuf,
    pub workers: usize,
}

impl Default for FigureConfig {
    fn default() -> Self {
        FigureConfig {
            n: None,
            n_values: None,
            trials: None,
            bins: 70,
            master_seed: 1,
            truncation: TruncationSpec::default_spec(),
            output_dir: PathBuf::from("."),
            workers: 1,
        }
    }
}

impl FigureConfig {
    fn validate(&self) -> Result<()> {
        if self.bins < 2 {
            return Err(Error::config("bins must be at least 2"));
        }
        if self.workers < 1 {
            return Err(Error::config("workers must be at least 1"));
        }
        if self.trials == Some(0) {
            return Err(Error::config("trials must be at least 1"));
        }
        if let Some(n) = self.n {
            if n < 2 {
                return Err(Error::config("n must be at least 2"));
            }
        }
        if let Some(ns) = &self.n_values {
            if ns.is_empty() || ns.iter().any(|&n| n < 2) {
                return Err(Error::config("every n must be at least 2"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct FigureOutput {
    pub svg_path: PathBuf,
    pub csv_path: PathBuf,
}

/// Runs one figure end to end and returns the written paths.
pub fn run_figure(kind: FigureKind, config: &FigureConfig) -> Result<FigureOutput> {
    config.validate()?;
    let (svg, csv) = match kind {
        FigureKind::Fig1 => fig1(config)?,
        FigureKind::Fig2 => fig2(config)?,
        FigureKind::Fig3 => fig3(config)?,
        FigureKind::Fig4 => fig4(config)?,
    };
    std::fs::create_dir_all(&config.output_dir)
        .map_err(|e| io_at(&config.output_dir, e))?;
    let svg_path = config.output_dir.join(format!("{kind}.svg"));
    let csv_path = config.output_dir.join(format!("{kind}.csv"));
    std::fs::write(&svg_path, svg).map_err(|e| io_at(&svg_path, e))?;
    std::fs::write(&csv_path, csv).map_err(|e| io_at(&csv_path, e))?;
    Ok(FigureOutput { svg_path, csv_path })
}

/// Seeds for multi-panel figures get a per-panel master so panels are
/// independent even at equal `(trial, n)`.
fn panel_seed(master: u64, panel: usize, trial: usize, n: usize) -> u64 {
    let lane = (panel as u64 + 1).wrapping_mul(0xD6E8_FEB8_6659_FD93);
    derive_seed(mix64(master ^ lane), trial, n)
}

fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

const PALETTE_BAR: &str = "#b8cce4";
const PALETTE_LINE: &str = "#cc2222";
const PALETTE_ENVELOPE: &str = "#222222";

/// Sample standard deviation (0 for fewer than two values).
fn mean_sd(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    let mean = values.iter().sum::<f64>() / k as f64;
    if k < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1) as f64;
    (mean, var.sqrt())
}

fn fig1(config: &FigureConfig) -> Result<(String, String)> {
    let n = config.n.unwrap_or(2000);
    let trials = config.trials.unwrap_or(20);
    let mus = [3.1, 4.1, 5.1, 9.1];
    let labels: Vec<String> = mus.iter().map(|mu| format!("mu = {mu}")).collect();

    let jobs: Vec<(usize, usize)> =
        (0..mus.len()).flat_map(|p| (0..trials).map(move |t| (p, t))).collect();
    let spectra: Vec<Result<Vec<f64>>> = par_map(&jobs, config.workers, |&(p, t)| {
        let law = EntryLaw::pareto(mus[p]).expect("tail indices exceed 3");
        let seed = panel_seed(config.master_seed, p, t, n);
        decompose_values(&sample_wigner(&WignerConfig { n, law, seed }))
    });

    let mut pooled: Vec<Vec<f64>> = vec![Vec::new(); mus.len()];
    for ((p, t), values) in jobs.iter().zip(spectra) {
        let values = values.map_err(|e| {
            Error::domain(format!("fig1 panel '{}', trial {t}: {e}", labels[*p]))
        })?;
        pooled[*p].extend(values);
    }

    let mut hists = Vec::with_capacity(mus.len());
    for (p, values) in pooled.iter().enumerate() {
        let hist = emit_histogram(values, config.bins, HistogramRange::Data)
            .map_err(|e| Error::domain(format!("fig1 panel '{}': {e}", labels[p])))?;
        hists.push(hist);
    }

    let mut canvas = Canvas::new(920.0, 680.0);
    let rects = grid_panels(920.0, 680.0, 2, 2);
    let mut csv = String::from("panel,bin_left,bin_right,density,semicircle_at_center\n");
    for (p, hist) in hists.iter().enumerate() {
        let (left, top, width, height) = rects[p];
        let x_lo = hist.edges[0].min(-2.2);
        let x_hi = hist.edges[hist.bins()].max(2.2);
        let d_max = hist.densities.iter().copied().fold(0.0f64, f64::max);
        let y_hi = (d_max.max(density(0.0))) * 1.12;
        let axes = Axes::new(left, top, width, height, (x_lo, x_hi), (0.0, y_hi));
        axes.frame(&mut canvas, &labels[p]);
        axes.draw_bars(&mut canvas, &hist.edges, &hist.densities, PALETTE_BAR);
        axes.draw_curve(&mut canvas, density, 257, PALETTE_LINE, 1.6);
        for (i, center) in hist.centers().iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                labels[p].replace(' ', ""),
                fmt_float(hist.edges[i]),
                fmt_float(hist.edges[i + 1]),
                fmt_float(hist.densities[i]),
                fmt_float(density(*center)),
            ));
        }
    }
    Ok((canvas.render(), csv))
}

fn fig2(config: &FigureConfig) -> Result<(String, String)> {
    let grid: Vec<usize> =
        config.n_values.clone().unwrap_or_else(|| (1..=10).map(|k| k * 100).collect());
    let trials = config.trials.unwrap_or(20);
    let panels: [(String, EntryLaw<f64>); 4] = [
        ("mu = 5.1".into(), EntryLaw::pareto(5.1).expect("valid")),
        ("mu = 7.1".into(), EntryLaw::pareto(7.1).expect("valid")),
        ("mu = 9.1".into(), EntryLaw::pareto(9.1).expect("valid")),
        ("gaussian".into(), EntryLaw::Gaussian),
    ];

    let jobs: Vec<(usize, usize, usize)> = (0..panels.len())
        .flat_map(|p| {
            let grid = &grid;
            (0..grid.len())
                .flat_map(move |g| (0..trials).map(move |t| (p, g, t)))
        })
        .collect();
    let outcomes: Vec<Result<f64>> = par_map(&jobs, config.workers, |&(p, g, t)| {
        let n = grid[g];
        let seed = panel_seed(config.master_seed, p, t, n);
        let values =
            decompose_values(&sample_wigner(&WignerConfig { n, law: panels[p].1, seed }))?;
        t_statistic(kolmogorov_distance(&values), n)
    });

    // t_samples[p][g] collects the trials.
    let mut t_samples: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); grid.len()]; panels.len()];
    for ((p, g, t), outcome) in jobs.iter().zip(outcomes) {
        let value = outcome.map_err(|e| {
            Error::domain(format!("fig2 panel '{}', n = {}, trial {t}: {e}", panels[*p].0, grid[*g]))
        })?;
        t_samples[*p][*g].push(value);
    }

    let mut canvas = Canvas::new(920.0, 680.0);
    let rects = grid_panels(920.0, 680.0, 2, 2);
    let mut csv = String::from("panel,n,trials,mean_t,sd_t\n");
    for (p, (label, _)) in panels.iter().enumerate() {
        let stats: Vec<(f64, f64)> = t_samples[p].iter().map(|s| mean_sd(s)).collect();
        let y_hi = stats
            .iter()
            .map(|(m, s)| m + s)
            .fold(0.0f64, f64::max)
            * 1.15;
        let x_lo = *grid.first().expect("validated nonempty") as f64;
        let x_hi = *grid.last().expect("validated nonempty") as f64;
        let pad = ((x_hi - x_lo) * 0.04).max(1.0);
        let (left, top, width, height) = rects[p];
        let axes =
            Axes::new(left, top, width, height, (x_lo - pad, x_hi + pad), (0.0, y_hi.max(1e-9)));
        axes.frame(&mut canvas, label);
        let mean_pts: Vec<(f64, f64)> =
            grid.iter().zip(&stats).map(|(&n, &(m, _))| (n as f64, m)).collect();
        let hi_pts: Vec<(f64, f64)> =
            grid.iter().zip(&stats).map(|(&n, &(m, s))| (n as f64, m + s)).collect();
        let lo_pts: Vec<(f64, f64)> =
            grid.iter().zip(&stats).map(|(&n, &(m, s))| (n as f64, (m - s).max(0.0))).collect();
        axes.draw_series(&mut canvas, &hi_pts, PALETTE_ENVELOPE, 1.0);
        axes.draw_series(&mut canvas, &lo_pts, PALETTE_ENVELOPE, 1.0);
        axes.draw_series(&mut canvas, &mean_pts, PALETTE_LINE, 1.8);
        for (&n, &(m, s)) in grid.iter().zip(&stats) {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                label.replace(' ', ""),
                n,
                trials,
                fmt_float(m),
                fmt_float(s),
            ));
        }
    }
    Ok((canvas.render(), csv))
}

/// Shared shape of the fig3/fig4 histogram pages.
struct HistPanel {
    label: String,
    hist: Histogram,
}

fn fig3(config: &FigureConfig) -> Result<(String, String)> {
    let n = config.n.unwrap_or(500);
    let trials = config.trials.unwrap_or(200);
    let mus = [5.1, 6.1, 7.1, 9.1];
    let range = HistogramRange::Fixed(-4.0, 1.0);

    let jobs: Vec<(usize, usize)> =
        (0..mus.len()).flat_map(|r| (0..trials).map(move |t| (r, t))).collect();
    let outcomes: Vec<Result<(f64, f64)>> = par_map(&jobs, config.workers, |&(r, t)| {
        let law = EntryLaw::pareto(mus[r]).expect("tail indices exceed 3");
        let seed = panel_seed(config.master_seed, r, t, n);
        let w = sample_wigner(&WignerConfig { n, law, seed });
        let values = decompose_values(&w)?;
        let zeta = zeta_statistic(values[n - 1], n, SpectralEdge::Upper);
        let breve = truncate(&w, &config.truncation, law)?.breve;
        let breve_values = decompose_values(&breve)?;
        let zeta_breve = zeta_statistic(breve_values[n - 1], n, SpectralEdge::Upper);
        Ok((zeta, zeta_breve))
    });

    let mut raw: Vec<Vec<f64>> = vec![Vec::new(); mus.len()];
    let mut trunc: Vec<Vec<f64>> = vec![Vec::new(); mus.len()];
    for ((r, t), outcome) in jobs.iter().zip(outcomes) {
        let (zeta, zeta_breve) = outcome.map_err(|e| {
            Error::domain(format!("fig3 mu = {}, trial {t}: {e}", mus[*r]))
        })?;
        raw[*r].push(zeta);
        trunc[*r].push(zeta_breve);
    }

    let mut panels: Vec<HistPanel> = Vec::with_capacity(2 * mus.len());
    for (r, mu) in mus.iter().enumerate() {
        for (series, values) in [("zeta_n", &raw[r]), ("breve zeta_n", &trunc[r])] {
            let label = format!("{series}, mu = {mu}");
            let hist = emit_histogram(values, config.bins, range)
                .map_err(|e| Error::domain(format!("fig3 panel '{label}': {e}")))?;
            panels.push(HistPanel { label, hist });
        }
    }

    let mut canvas = Canvas::new(860.0, 1240.0);
    let rects = grid_panels(860.0, 1240.0, mus.len(), 2);
    let mut csv =
        String::from("panel,bin_left,bin_right,density,tw_pdf_at_center,in_range_fraction\n");
    for (i, panel) in panels.iter().enumerate() {
        let (left, top, width, height) = rects[i];
        let d_max = panel.hist.densities.iter().copied().fold(0.0f64, f64::max);
        let y_hi = d_max.max(0.32) * 1.15;
        let axes = Axes::new(left, top, width, height, (-4.0, 1.0), (0.0, y_hi));
        axes.frame(&mut canvas, &panel.label);
        axes.draw_bars(&mut canvas, &panel.hist.edges, &panel.hist.densities, PALETTE_BAR);
        axes.draw_curve(&mut canvas, tw1_pdf, 257, PALETTE_LINE, 1.6);
        let fraction = panel.hist.included as f64 / panel.hist.total as f64;
        for (b, center) in panel.hist.centers().iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                panel.label.replace(' ', ""),
                fmt_float(panel.hist.edges[b]),
                fmt_float(panel.hist.edges[b + 1]),
                fmt_float(panel.hist.densities[b]),
                fmt_float(tw1_pdf(*center)),
                fmt_float(fraction),
            ));
        }
    }
    Ok((canvas.render(), csv))
}

fn fig4(config: &FigureConfig) -> Result<(String, String)> {
    let n = config.n.unwrap_or(800);
    let trials = config.trials.unwrap_or(100);

    // Three sampling groups; the pareto groups yield raw and truncated
    // statistics from the same draw.
    let groups: [(String, Option<f64>); 3] =
        [("mu = 5.1".into(), Some(5.1)), ("mu = 9.1".into(), Some(9.1)), ("gaussian".into(), None)];
    let jobs: Vec<(usize, usize)> =
        (0..groups.len()).flat_map(|g| (0..trials).map(move |t| (g, t))).collect();
    let outcomes: Vec<Result<(f64, Option<f64>)>> = par_map(&jobs, config.workers, |&(g, t)| {
        let law = match groups[g].1 {
            Some(mu) => EntryLaw::pareto(mu).expect("tail indices exceed 3"),
            None => EntryLaw::Gaussian,
        };
        let seed = panel_seed(config.master_seed, g, t, n);
        let w = sample_wigner(&WignerConfig { n, law, seed });
        let v_raw = delocalization_stat(&decompose(&w)?);
        let v_breve = match groups[g].1 {
            Some(_) => {
                let breve = truncate(&w, &config.truncation, law)?.breve;
                Some(delocalization_stat(&decompose(&breve)?))
            }
            None => None,
        };
        Ok((v_raw, v_breve))
    });

    let mut raw: Vec<Vec<f64>> = vec![Vec::new(); groups.len()];
    let mut trunc: Vec<Vec<f64>> = vec![Vec::new(); groups.len()];
    for ((g, t), outcome) in jobs.iter().zip(outcomes) {
        let (v_raw, v_breve) = outcome.map_err(|e| {
            Error::domain(format!("fig4 group '{}', trial {t}: {e}", groups[*g].0))
        })?;
        raw[*g].push(v_raw);
        if let Some(v) = v_breve {
            trunc[*g].push(v);
        }
    }

    // Panel layout mirrors the comparison: raw vs truncated per mu, then
    // the truncated heavy-tail case against the Gaussian baseline.
    let panel_data: [(String, &Vec<f64>); 6] = [
        ("V_n, mu = 5.1".into(), &raw[0]),
        ("breve V_n, mu = 5.1".into(), &trunc[0]),
        ("V_n, mu = 9.1".into(), &raw[1]),
        ("breve V_n, mu = 9.1".into(), &trunc[1]),
        ("breve V_n, mu = 9.1 (vs gaussian)".into(), &trunc[1]),
        ("V_n, gaussian".into(), &raw[2]),
    ];

    let mut canvas = Canvas::new(860.0, 1000.0);
    let rects = grid_panels(860.0, 1000.0, 3, 2);
    let mut csv = String::from("panel,bin_left,bin_right,density\n");
    for (i, (label, values)) in panel_data.iter().enumerate() {
        let hist = emit_histogram(values, config.bins, HistogramRange::Data)
            .map_err(|e| Error::domain(format!("fig4 panel '{label}': {e}")))?;
        let (left, top, width, height) = rects[i];
        let d_max = hist.densities.iter().copied().fold(0.0f64, f64::max);
        let x_lo = hist.edges[0];
        let x_hi = hist.edges[hist.bins()];
        let pad = (x_hi - x_lo) * 0.05;
        let axes = Axes::new(
            left,
            top,
            width,
            height,
            (x_lo - pad, x_hi + pad),
            (0.0, (d_max * 1.15).max(1e-9)),
        );
        axes.frame(&mut canvas, label);
        axes.draw_bars(&mut canvas, &hist.edges, &hist.densities, PALETTE_BAR);
        for b in 0..hist.bins() {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                label.replace(' ', ""),
                fmt_float(hist.edges[b]),
                fmt_float(hist.edges[b + 1]),
                fmt_float(hist.densities[b]),
            ));
        }
    }
    Ok((canvas.render(), csv))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(dir: &std::path::Path) -> FigureConfig {
        FigureConfig {
            n: Some(40),
            n_values: Some(vec![24, 48]),
            trials: Some(3),
            bins: 8,
            master_seed: 313,
            truncation: TruncationSpec::default_spec(),
            output_dir: dir.to_path_buf(),
            workers: 1,
        }
    }

    fn read(path: &std::path::Path) -> String {
        std::fs::read_to_string(path).unwrap()
    }

    #[test]
    fn fig1_emits_svg_and_dense_csv() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_figure(FigureKind::Fig1, &tiny(dir.path())).unwrap();
        let svg = read(&out.svg_path);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("<polyline"), "semicircle overlay missing");
        let csv = read(&out.csv_path);
        // Header plus 4 panels x 8 bins.
        assert_eq!(csv.lines().count(), 1 + 4 * 8);
        assert!(csv.starts_with("panel,bin_left,bin_right,density,semicircle_at_center\n"));
    }

    #[test]
    fn fig2_curves_and_csv_shape() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_figure(FigureKind::Fig2, &tiny(dir.path())).unwrap();
        let csv = read(&out.csv_path);
        // Header plus 4 panels x 2 grid points.
        assert_eq!(csv.lines().count(), 1 + 4 * 2);
        let svg = read(&out.svg_path);
        // Three series per panel.
        assert!(svg.matches("<polyline").count() >= 12);
    }

    #[test]
    fn fig3_histograms_and_overlay() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = tiny(dir.path());
        config.trials = Some(6);
        let out = run_figure(FigureKind::Fig3, &config).unwrap();
        let csv = read(&out.csv_path);
        assert_eq!(csv.lines().count(), 1 + 8 * 8);
        for line in csv.lines().skip(1) {
            let fraction: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert!((0.0..=1.0).contains(&fraction));
        }
        assert!(read(&out.svg_path).contains("breve zeta_n, mu = 9.1"));
    }

    #[test]
    fn fig4_panel_set() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = tiny(dir.path());
        config.n = Some(24);
        let out = run_figure(FigureKind::Fig4, &config).unwrap();
        let csv = read(&out.csv_path);
        assert_eq!(csv.lines().count(), 1 + 6 * 8);
        let svg = read(&out.svg_path);
        assert!(svg.contains("V_n, gaussian"));
        assert!(svg.contains("(vs gaussian)"));
    }

    #[test]
    fn figures_are_deterministic() {
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let out1 = run_figure(FigureKind::Fig2, &tiny(dir1.path())).unwrap();
        let mut config = tiny(dir2.path());
        config.workers = 4;
        let out2 = run_figure(FigureKind::Fig2, &config).unwrap();
        assert_eq!(read(&out1.csv_path), read(&out2.csv_path));
        assert_eq!(read(&out1.svg_path), read(&out2.svg_path));
    }

    #[test]
    fn kind_parsing_and_validation() {
        assert_eq!("fig3".parse::<FigureKind>().unwrap(), FigureKind::Fig3);
        assert!("fig9".parse::<FigureKind>().is_err());
        let mut config = FigureConfig::default();
        config.bins = 1;
        assert!(run_figure(FigureKind::Fig1, &config).is_err());
        let mut config = FigureConfig::default();
        config.trials = Some(0);
        assert!(run_figure(FigureKind::Fig1, &config).is_err());
    }
}
