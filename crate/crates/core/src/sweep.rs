//! Parameter sweeps over the Werner-Bell and spin-ensemble families, with
//! CSV rendering. Points are evaluated in parallel; output order and witness
//! seeds depend only on the grid index, so results do not depend on the
//! thread count.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criterion::{detect, CriterionReport, PreparedSet, Verdict, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::observables::{
    collective_spin_set, hp_quadrature_set, pauli_product_set, quadratures_from_spins, rotate_so3,
};
use crate::reference::{werner_ppt_min_eigenvalue, witness_optimize, AnnealParams, WitnessResult};
use crate::states::{bell_state, spin_ensemble_state, werner_mix};

/// `⟨W⟩` below this counts as a witness detection.
pub const WITNESS_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Experiment {
    WernerBell,
    SpinEnsemble,
    UncertaintySuite,
    Witness,
    FromData,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Criterion {
    /// Covariance criterion on the six collective spins.
    Cm,
    /// Covariance criterion on the four Holstein-Primakoff quadratures.
    Ds,
    Ppt,
    /// Decomposable witness search.
    Ew,
}

impl Criterion {
    pub const ALL: [Criterion; 4] = [Criterion::Cm, Criterion::Ds, Criterion::Ppt, Criterion::Ew];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Cm => "cm",
            Criterion::Ds => "ds",
            Criterion::Ppt => "ppt",
            Criterion::Ew => "ew",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::invalid(
                    "criteria",
                    format!("unknown criterion '{s}' (expected cm, ds, ppt or ew)"),
                )
            })
    }
}

/// Uniform grid with both endpoints included; `steps` is the point count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        Self { min, max, steps }
    }

    pub fn single(value: f64) -> Self {
        Self::new(value, value, 1)
    }

    pub fn validate(&self, name: &'static str) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::invalid(name, "grid needs at least one point"));
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::invalid(name, "grid bounds must be finite"));
        }
        if self.min > self.max {
            return Err(Error::invalid(
                name,
                format!("min {} exceeds max {}", self.min, self.max),
            ));
        }
        if self.steps == 1 && self.min != self.max {
            return Err(Error::invalid(name, "a one-point grid needs min == max"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps == 0
    }

    pub fn point(&self, i: usize) -> f64 {
        if self.steps <= 1 {
            return self.min;
        }
        if i + 1 == self.steps {
            return self.max;
        }
        self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.point(i)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub experiment: Experiment,
    #[serde(rename = "M")]
    pub m: usize,
    pub mu: Grid,
    pub t: Grid,
    pub criteria: Vec<Criterion>,
    pub tolerance: f64,
    pub seed: u64,
    /// Rotation applied to both ensembles' spin axes before building the
    /// observable sets.
    pub rotation: Option<[[f64; 3]; 3]>,
    pub anneal: AnnealParams,
    pub out: Option<String>,
}

impl SweepConfig {
    pub fn werner_bell(mu: Grid) -> Self {
        Self {
            experiment: Experiment::WernerBell,
            m: 1,
            mu,
            t: Grid::single(0.0),
            criteria: vec![Criterion::Cm],
            tolerance: DEFAULT_TOL,
            seed: 0,
            rotation: None,
            anneal: AnnealParams::default(),
            out: None,
        }
    }

    pub fn spin_ensemble(m: usize, mu: Grid, t: Grid, criteria: Vec<Criterion>) -> Self {
        Self {
            experiment: Experiment::SpinEnsemble,
            m,
            mu,
            t,
            criteria,
            ..Self::werner_bell(mu)
        }
    }

    pub fn wants(&self, c: Criterion) -> bool {
        self.criteria.contains(&c)
    }

    pub fn validate(&self) -> Result<()> {
        self.mu.validate("mu")?;
        self.t.validate("t")?;
        if self.mu.min < 0.0 || self.mu.max > 1.0 {
            return Err(Error::invalid("mu", "mixing weight must lie in [0, 1]"));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(Error::invalid(
                "tol",
                "tolerance must be finite and non-negative",
            ));
        }
        if self.criteria.is_empty() {
            return Err(Error::invalid("criteria", "select at least one criterion"));
        }
        if self.m == 0 {
            return Err(Error::invalid("M", "ensemble size must be at least 1"));
        }
        if self.wants(Criterion::Ew) {
            self.anneal.validate()?;
            let d = (self.m + 1) * (self.m + 1);
            if d > self.anneal.max_dim {
                return Err(Error::invalid(
                    "criteria",
                    format!(
                        "witness search requested at M={} (dimension {d}) but the cap is {}; the \
                         annealer runs alternating eigendecompositions per proposal and is not \
                         reliable at this size. Drop 'ew' or use a smaller M",
                        self.m, self.anneal.max_dim
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// SplitMix64 finalizer applied to `(master, index)`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Midpoints between consecutive grid points where the flag changes.
pub fn flip_points(xs: &[f64], flags: &[bool]) -> Vec<f64> {
    xs.windows(2)
        .zip(flags.windows(2))
        .filter(|(_, f)| f[0] != f[1])
        .map(|(x, _)| 0.5 * (x[0] + x[1]))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct WernerBellRow {
    pub mu: f64,
    pub report: CriterionReport,
}

pub fn run_werner_bell(cfg: &SweepConfig) -> Result<Vec<WernerBellRow>> {
    cfg.validate()?;
    let set = PreparedSet::new(&pauli_product_set())?;
    let psi = bell_state();
    cfg.mu
        .points()
        .into_par_iter()
        .map(|mu| {
            let rho = werner_mix(&psi, mu)?;
            Ok(WernerBellRow {
                mu,
                report: detect(&set.criterion_matrix(&rho)?, cfg.tolerance)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpinEnsembleRow {
    pub mu_index: usize,
    pub t_index: usize,
    pub mu: f64,
    pub t: f64,
    pub cm: Option<CriterionReport>,
    pub ds: Option<CriterionReport>,
    pub ppt_min_eigenvalue: Option<f64>,
    pub witness: Option<WitnessResult>,
}

impl SpinEnsembleRow {
    /// Verdict of one criterion, if it was evaluated.
    pub fn detected(&self, c: Criterion, tol: f64) -> Option<bool> {
        match c {
            Criterion::Cm => self.cm.as_ref().map(CriterionReport::is_entangled),
            Criterion::Ds => self.ds.as_ref().map(CriterionReport::is_entangled),
            Criterion::Ppt => self.ppt_min_eigenvalue.map(|v| v < -tol),
            Criterion::Ew => self
                .witness
                .as_ref()
                .map(|w| w.min_expectation < -WITNESS_THRESHOLD),
        }
    }
}

pub fn run_spin_ensemble(cfg: &SweepConfig) -> Result<Vec<SpinEnsembleRow>> {
    cfg.validate()?;
    let m = cfg.m;
    let mut spins = collective_spin_set(m)?;
    let mut quadratures = hp_quadrature_set(m)?;
    if let Some(r) = &cfg.rotation {
        spins = rotate_so3(&spins, r)?;
        quadratures = quadratures_from_spins(&spins, m)?;
    }
    let cm_set = match cfg.wants(Criterion::Cm) {
        true => Some(PreparedSet::new(&spins)?),
        false => None,
    };
    let ds_set = match cfg.wants(Criterion::Ds) {
        true => Some(PreparedSet::new(&quadratures)?),
        false => None,
    };

    let nt = cfg.t.len();
    let indices: Vec<usize> = (0..cfg.mu.len() * nt).collect();
    indices
        .into_par_iter()
        .map(|index| {
            let (mu_index, t_index) = (index / nt, index % nt);
            let (mu, t) = (cfg.mu.point(mu_index), cfg.t.point(t_index));
            let psi = spin_ensemble_state(m, t)?;
            let rho = werner_mix(&psi, mu)?;
            let report = |set: &Option<PreparedSet>| -> Result<Option<CriterionReport>> {
                set.as_ref()
                    .map(|s| detect(&s.criterion_matrix(&rho)?, cfg.tolerance))
                    .transpose()
            };
            let witness = match cfg.wants(Criterion::Ew) {
                true => Some(witness_optimize(
                    &rho,
                    m,
                    &cfg.anneal,
                    derive_seed(cfg.seed, index as u64),
                )?),
                false => None,
            };
            Ok(SpinEnsembleRow {
                mu_index,
                t_index,
                mu,
                t,
                cm: report(&cm_set)?,
                ds: report(&ds_set)?,
                ppt_min_eigenvalue: match cfg.wants(Criterion::Ppt) {
                    true => Some(werner_ppt_min_eigenvalue(&psi, mu)?),
                    false => None,
                },
                witness,
            })
        })
        .collect()
}

/// Column names and pre-formatted cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Shortest round-trip form; exponent notation for very small or large
/// magnitudes.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    match a != 0.0 && a.is_finite() && !(1e-4..1e6).contains(&a) {
        true => format!("{v:e}"),
        false => v.to_string(),
    }
}

fn verdict_cell(detected: bool) -> String {
    match detected {
        true => Verdict::Entangled,
        false => Verdict::Undetected,
    }
    .to_string()
}

fn report_columns(prefix: &str, n: usize, cols: &mut Vec<String>) {
    cols.extend((1..=n).map(|i| format!("{prefix}_eig{i}")));
    cols.push(format!("{prefix}_det"));
    cols.push(format!("{prefix}_verdict"));
}

fn report_cells(r: &CriterionReport, cells: &mut Vec<String>) {
    cells.extend(r.eigenvalues.iter().map(|&v| format_float(v)));
    cells.push(format_float(r.determinant));
    cells.push(r.verdict.to_string());
}

pub fn werner_bell_table(rows: &[WernerBellRow]) -> Table {
    let mut columns = vec!["mu".to_string()];
    report_columns("cm", 3, &mut columns);
    let rows = rows
        .iter()
        .map(|r| {
            let mut cells = vec![format_float(r.mu)];
            report_cells(&r.report, &mut cells);
            cells
        })
        .collect();
    Table { columns, rows }
}

pub fn spin_ensemble_table(cfg: &SweepConfig, rows: &[SpinEnsembleRow]) -> Table {
    let mut columns = vec!["mu".to_string(), "t".to_string()];
    for c in Criterion::ALL.into_iter().filter(|&c| cfg.wants(c)) {
        match c {
            Criterion::Cm => report_columns("cm", 6, &mut columns),
            Criterion::Ds => report_columns("ds", 4, &mut columns),
            Criterion::Ppt => columns.extend(["ppt_min_eig".into(), "ppt_verdict".into()]),
            Criterion::Ew => {
                columns.extend(["ew_min".into(), "ew_seed".into(), "ew_verdict".into()])
            }
        }
    }
    let rows = rows
        .iter()
        .map(|r| {
            let mut cells = vec![format_float(r.mu), format_float(r.t)];
            if let Some(cm) = &r.cm {
                report_cells(cm, &mut cells);
            }
            if let Some(ds) = &r.ds {
                report_cells(ds, &mut cells);
            }
            if let Some(v) = r.ppt_min_eigenvalue {
                cells.push(format_float(v));
                cells.push(verdict_cell(v < -cfg.tolerance));
            }
            if let Some(w) = &r.witness {
                cells.push(format_float(w.min_expectation));
                cells.push(w.seed.to_string());
                cells.push(verdict_cell(w.min_expectation < -WITNESS_THRESHOLD));
            }
            cells
        })
        .collect();
    Table { columns, rows }
}

/// `#` lines carrying the experiment and its full configuration, then a
/// header row and one line per point.
pub fn render_csv(cfg: &SweepConfig, table: &Table) -> Result<String> {
    let config = serde_json::to_string(cfg).map_err(|e| Error::Numerical(e.to_string()))?;
    let mut out = String::new();
    let experiment =
        serde_json::to_value(cfg.experiment).map_err(|e| Error::Numerical(e.to_string()))?;
    let _ = writeln!(out, "# entcov {}", experiment.as_str().unwrap_or_default());
    let _ = writeln!(out, "# config: {config}");
    let _ = writeln!(out, "{}", table.columns.join(","));
    for row in &table.rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    Ok(out)
}
