//! One function per subcommand. Each returns the table to print.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::time::Instant;

use kronecker_core::asymptotics::leading_term;
use kronecker_core::heat::{adiabatic_trace_limit, heat_trace_image, heat_trace_spectral};
use kronecker_core::leafwise::leafwise_df;
use kronecker_core::spectrum::{
    count_exact_rational, count_exact_with, eigenvalues_below, parse_ratio, strips_required,
};
use kronecker_core::weyl::{weyl_estimate, WeylParams, DEFAULT_QUADRATURE_TOLERANCE};
use kronecker_core::{
    AdiabaticScale, EnergyWindow, Execution, LatticeCount, LeafSpectrum, Slope, Terms,
};
use num_rational::Ratio;
use serde::Serialize;

use crate::sweep::{Output, SweepSpec};
use crate::table::{Table, Value};
use crate::CliError;

/// Default truncation target for the heat-trace series.
pub const DEFAULT_HEAT_EPS: f64 = 1e-12;

/// Settings shared by every subcommand.
#[derive(Clone, Copy, Debug)]
pub struct Globals {
    /// Energies on the command line are `μ = λ/4π²` rather than `λ`.
    pub reduced: bool,
    /// Tie tolerance for `near_boundary`.
    pub tol: f64,
    /// Accuracy target for truncated series and quadrature.
    pub eps: Option<f64>,
    /// Refuse counts that would visit more strips than this.
    pub max_strips: u64,
}

impl Globals {
    fn window(&self, energy: f64) -> EnergyWindow {
        if self.reduced {
            EnergyWindow::reduced(energy)
        } else {
            EnergyWindow::absolute(energy)
        }
    }

    fn energy(&self, text: &str) -> Result<EnergyWindow, CliError> {
        Ok(self.window(parse_real("lambda", text)?))
    }
}

pub fn parse_slope(text: &str) -> Result<Slope, CliError> {
    text.parse().map_err(CliError::from)
}

pub fn parse_real(name: &str, text: &str) -> Result<f64, CliError> {
    match text.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::usage(format!("{name} must be a finite real number, got {text:?}"))),
    }
}

fn parse_scale(text: &str) -> Result<AdiabaticScale, CliError> {
    Ok(AdiabaticScale::new(parse_real("h", text)?)?)
}

fn check_budget(s: &Slope, h: AdiabaticScale, w: EnergyWindow, tol: f64, limit: u64) -> Result<(), CliError> {
    let strips = strips_required(s, h, w, tol)?;
    if strips > limit {
        return Err(CliError::resource(format!(
            "h = {} needs {strips} strips, above the --max-strips budget of {limit}",
            h.get()
        )));
    }
    Ok(())
}

/// One line of a count or sweep table.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReportRow {
    pub h: f64,
    pub n_h: Option<u64>,
    pub h_n_h: Option<f64>,
    pub closed_form_asym: Option<f64>,
    pub weyl_value: Option<f64>,
    /// `h_n_h − h·closed_form_asym`
    pub residual: Option<f64>,
    pub near_boundary: Option<u64>,
    pub wall_time_ms: f64,
}

impl ReportRow {
    pub const COLUMNS: [&'static str; 8] =
        ["h", "n_h", "h_n_h", "closed_form_asym", "weyl_value", "residual", "near_boundary", "wall_time_ms"];

    fn build(
        s: &Slope,
        h: AdiabaticScale,
        w: EnergyWindow,
        count: Option<LatticeCount>,
        outputs: &BTreeSet<Output>,
        start: Instant,
    ) -> Result<ReportRow, CliError> {
        let hf = h.get();
        let lambda = w.lambda();
        let wants_asym = outputs.contains(&Output::AsymClosedForm) || outputs.contains(&Output::Residual);
        let closed_form_asym = wants_asym.then(|| leading_term(s, h, lambda));
        let weyl_value = if outputs.contains(&Output::Weyl) {
            let params = WeylParams::torus(lambda)?;
            Some(weyl_estimate(s, h, &params)?)
        } else {
            None
        };
        let h_n_h = count.map(|c| hf * c.count as f64);
        let residual = match (outputs.contains(&Output::Residual), h_n_h, closed_form_asym) {
            (true, Some(scaled), Some(asym)) => Some(scaled - hf * asym),
            _ => None,
        };
        Ok(ReportRow {
            h: hf,
            n_h: count.map(|c| c.count),
            h_n_h,
            closed_form_asym: closed_form_asym.filter(|_| outputs.contains(&Output::AsymClosedForm)),
            weyl_value,
            residual,
            near_boundary: count.map(|c| c.near_boundary),
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    }

    fn values(&self) -> Vec<Value> {
        vec![
            self.h.into(),
            self.n_h.into(),
            self.h_n_h.into(),
            self.closed_form_asym.into(),
            self.weyl_value.into(),
            self.residual.into(),
            self.near_boundary.into(),
            self.wall_time_ms.into(),
        ]
    }
}

fn report_table(rows: &[ReportRow]) -> Table {
    let mut table = Table::new(&ReportRow::COLUMNS);
    for row in rows {
        table.push(row.values());
    }
    table
}

/// One row in floating point. The residual needs the count even when the
/// count columns themselves were not requested.
fn compute_row(
    s: &Slope,
    w: EnergyWindow,
    h: f64,
    tol: f64,
    outputs: &BTreeSet<Output>,
    max_strips: u64,
) -> Result<ReportRow, CliError> {
    let start = Instant::now();
    let h = AdiabaticScale::new(h)?;
    let wants_count = outputs.contains(&Output::ExactCount);
    let count = if wants_count || outputs.contains(&Output::Residual) {
        check_budget(s, h, w, tol, max_strips)?;
        Some(count_exact_with(s, h, w, tol, Execution::default())?)
    } else {
        None
    };
    let mut row = ReportRow::build(s, h, w, count, outputs, start)?;
    if !wants_count {
        row.n_h = None;
        row.h_n_h = None;
        row.near_boundary = None;
        row.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    }
    Ok(row)
}

pub fn count(g: &Globals, slope: &str, h: &str, lambda: &str, exact_arith: bool) -> Result<Table, CliError> {
    let s = parse_slope(slope)?;
    let all: BTreeSet<Output> = Output::ALL.into_iter().collect();
    let row = if exact_arith {
        count_exact_arithmetic(g, &s, h, lambda, &all)?
    } else {
        let w = g.energy(lambda)?;
        compute_row(&s, w, parse_real("h", h)?, g.tol, &all, g.max_strips)?
    };
    Ok(report_table(&[row]))
}

/// Integer-only count; `h` and `μ` are exact rationals.
fn count_exact_arithmetic(
    g: &Globals,
    s: &Slope,
    h: &str,
    mu: &str,
    outputs: &BTreeSet<Output>,
) -> Result<ReportRow, CliError> {
    if !g.reduced {
        return Err(CliError::usage("--exact-arith needs --reduced: the exact threshold is μ = λ/4π²"));
    }
    if !s.is_rational() {
        return Err(CliError::usage("--exact-arith needs a rational slope"));
    }
    let start = Instant::now();
    let h_exact = parse_ratio(h)?;
    let mu_exact = parse_ratio(mu)?;
    let overflow = || CliError::resource(format!("h² = ({h})² does not fit in 64-bit integers"));
    let h_squared = Ratio::new(
        h_exact.numer().checked_mul(*h_exact.numer()).ok_or_else(overflow)?,
        h_exact.denom().checked_mul(*h_exact.denom()).ok_or_else(overflow)?,
    );
    let to_f64 = |r: Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
    let scale = AdiabaticScale::new(to_f64(h_exact))?;
    let w = EnergyWindow::reduced(to_f64(mu_exact));
    check_budget(s, scale, w, 0.0, g.max_strips)?;
    let c = count_exact_rational(s, h_squared, mu_exact, Execution::default())?;
    ReportRow::build(s, scale, w, Some(c), outputs, start)
}

/// Rows for every `h` of the sweep, sorted by `h` descending. Rows that fail
/// are reported on stderr and omitted; the worst failure is returned
/// alongside the table.
pub fn sweep(g: &Globals, spec: &SweepSpec) -> Result<(Table, Option<CliError>), CliError> {
    let mut hs = spec.h_values.resolve()?;
    hs.sort_by(|a, b| b.total_cmp(a));
    let w = g.window(spec.lambda);
    let results = Execution::default().map_items(&hs, |&h| {
        compute_row(&spec.slope, w, h, spec.tie_tolerance, &spec.outputs, g.max_strips)
    });
    let mut rows = Vec::new();
    let mut failure: Option<CliError> = None;
    for (h, result) in hs.iter().zip(results) {
        match result {
            Ok(row) => rows.push(row),
            Err(e) => {
                eprintln!("h = {h}: {}", e.message);
                if failure.as_ref().is_none_or(|f| e.code > f.code) {
                    failure = Some(e);
                }
            }
        }
    }
    Ok((report_table(&rows), failure))
}

pub fn asym(g: &Globals, slope: &str, h: &str, lambda: &str) -> Result<Table, CliError> {
    let s = parse_slope(slope)?;
    let h = parse_scale(h)?;
    let w = g.energy(lambda)?;
    let mut table = Table::new(&["h", "lambda", "closed_form_asym"]);
    table.push(vec![h.get().into(), w.lambda().into(), leading_term(&s, h, w.lambda()).into()]);
    Ok(table)
}

pub fn weyl(g: &Globals, slope: &str, h: &str, lambda: &str, q: u32) -> Result<Table, CliError> {
    let s = parse_slope(slope)?;
    let h = parse_scale(h)?;
    let w = g.energy(lambda)?;
    let params = WeylParams::new(q, w.lambda(), g.eps.unwrap_or(DEFAULT_QUADRATURE_TOLERANCE))?;
    let value = weyl_estimate(&s, h, &params)?;
    let mut table = Table::new(&["h", "lambda", "q", "weyl_value"]);
    table.push(vec![h.get().into(), w.lambda().into(), q.into(), value.into()]);
    Ok(table)
}

#[derive(Serialize)]
struct LeafReport<'a> {
    slope: &'a Slope,
    distribution: &'a kronecker_core::DistributionFunction,
}

/// `N_F(λ_i)` at `samples` equally spaced energies up to `lambda`, or the
/// distribution function itself as JSON.
pub fn leafwise(
    g: &Globals,
    slope: &str,
    lambda: &str,
    samples: usize,
    distribution: bool,
) -> Result<LeafOutput, CliError> {
    let s = parse_slope(slope)?;
    let top = g.energy(lambda)?.lambda();
    let LeafSpectrum { slope: s, df } = leafwise_df(&s, top);
    if distribution {
        let report = LeafReport { slope: &s, distribution: &df };
        let text = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::internal(format!("cannot serialize the distribution: {e}")))?;
        return Ok(LeafOutput::Json(text));
    }
    if samples == 0 {
        return Err(CliError::usage("--samples must be at least 1"));
    }
    let mut table = Table::new(&["lambda", "n_f"]);
    for i in 1..=samples {
        let x = if i == samples { top } else { top * i as f64 / samples as f64 };
        table.push(vec![x.into(), df.evaluate(x)?.into()]);
    }
    Ok(LeafOutput::Table(table))
}

pub enum LeafOutput {
    Table(Table),
    Json(String),
}

pub fn heat(g: &Globals, slope: &str, h: &str, t: &str) -> Result<Table, CliError> {
    let s = parse_slope(slope)?;
    let h = parse_scale(h)?;
    let t = parse_real("t", t)?;
    let eps = g.eps.unwrap_or(DEFAULT_HEAT_EPS);
    let spectral = heat_trace_spectral(&s, h, t, eps)?;
    let image = heat_trace_image(&s, h, t, eps)?;
    let limit = if s.is_rational() { None } else { Some(adiabatic_trace_limit(&s, t)?) };
    let mut table = Table::new(&[
        "h",
        "t",
        "spectral",
        "image",
        "difference",
        "spectral_bound",
        "image_bound",
        "spectral_terms",
        "image_terms",
        "h_image",
        "adiabatic_limit",
    ]);
    table.push(vec![
        h.get().into(),
        t.into(),
        spectral.value.into(),
        image.value.into(),
        (spectral.value - image.value).abs().into(),
        spectral.truncation_bound.into(),
        image.truncation_bound.into(),
        spectral.terms_used.into(),
        image.terms_used.into(),
        (h.get() * image.value).into(),
        limit.into(),
    ]);
    Ok(table)
}

/// Partial quotients with their convergents and `|α − p/q|`. `terms` is a
/// count or `-` for the full expansion of a rational slope.
pub fn cf(slope: &str, terms: &str) -> Result<(Table, String), CliError> {
    let s = parse_slope(slope)?;
    let terms = match terms.trim() {
        "-" => Terms::Full,
        n => match n.parse::<usize>() {
            Ok(n) if n >= 1 => Terms::Count(n),
            _ => return Err(CliError::usage(format!("term count must be a positive integer or '-', got {n:?}"))),
        },
    };
    let expansion = s.continued_fraction(terms)?;
    let mut table = Table::new(&["n", "quotient", "p", "q", "abs_error"]);
    for (n, (&a, &(p, q))) in expansion.partial_quotients().iter().zip(expansion.convergents()).enumerate() {
        table.push(vec![n.into(), a.into(), p.into(), q.into(), s.approximation_error(p, q).into()]);
    }
    Ok((table, expansion.notation()))
}

pub fn eig(g: &Globals, slope: &str, h: &str, lambda: &str) -> Result<Table, CliError> {
    let s = parse_slope(slope)?;
    let h = parse_scale(h)?;
    let w = g.energy(lambda)?;
    check_budget(&s, h, w, 0.0, g.max_strips)?;
    let mut table = Table::new(&["k", "l", "value", "reduced_value"]);
    for e in eigenvalues_below(&s, h, w)? {
        table.push(vec![e.k.into(), e.l.into(), e.value.into(), (e.value / (4.0 * PI * PI)).into()]);
    }
    Ok(table)
}
