use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use gkw::estim::{fit_family, lr_test, shrink, Dataset, FitOptions, FitResult};
use gkw::series::{central_moments_and_cumulants, l_moments, mean_deviations, moment, renyi_entropy, SeriesReport};
use gkw::{cdf, pdf, quantile, sample as draw, Params, SubModel};
use serde_json::{json, Map, Value};

use crate::input::parse_csv;
use crate::num::sig;
use crate::report::{DataBlock, FitReport, LrRow, ModelFit, SCHEMA};
use crate::{Ctx, EvalArgs, FitArgs, LrArgs, PropsArgs, SampleArgs, What};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad input data, contract violations.
    Input(String),
    Io(String),
    Numeric(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Io(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<gkw::Error> for CliError {
    fn from(e: gkw::Error) -> Self {
        use gkw::Error as E;
        match e {
            E::Domain { .. } | E::InvalidParams(_) | E::Precondition(_) | E::DataPoint { .. } | E::NotNested(_) => {
                CliError::Input(e.to_string())
            }
            E::NoConvergence { .. } | E::Estimation(_) | E::Divergent { .. } | E::NonFinite { .. } => {
                CliError::Numeric(e.to_string())
            }
        }
    }
}

type Res = Result<(), CliError>;

fn parse_theta(s: &str) -> Result<Params, CliError> {
    Ok(s.parse::<Params>()?)
}

fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("cannot parse {p:?} as a number")))
        })
        .collect()
}

fn io_err(path: &Path, e: io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes `text` to `path`, or to stdout when no path is given.
fn emit(path: Option<&Path>, text: &str) -> Res {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_err(p, e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn to_json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn theta_json(t: &Params) -> Value {
    serde_json::to_value(t).expect("params serialize")
}

pub fn eval(_ctx: &Ctx, a: &EvalArgs) -> Res {
    let theta = parse_theta(&a.theta)?;
    let pts = parse_list(&a.at)?;
    let mut rows = Vec::with_capacity(pts.len());
    for &x in &pts {
        let v = match a.what {
            What::Pdf => pdf(&theta, x),
            What::Cdf => cdf(&theta, x),
            What::Quantile => quantile(&theta, x)?,
        };
        if !v.is_finite() {
            return Err(CliError::Numeric(format!("non-finite value at {x}")));
        }
        rows.push((x, v));
    }
    let name = match a.what {
        What::Pdf => "pdf",
        What::Cdf => "cdf",
        What::Quantile => "quantile",
    };
    let text = if a.json {
        let rows: Vec<Value> = rows
            .iter()
            .map(|(x, v)| json!({ "x": x, "value": sig(*v, 12).parse::<f64>().unwrap_or(*v) }))
            .collect();
        to_json(&json!({ "schema": SCHEMA, "what": name, "theta": theta_json(&theta), "rows": rows }))
    } else {
        let mut s = format!("x\t{name}\n");
        for (x, v) in rows {
            s.push_str(&format!("{x}\t{}\n", sig(v, 12)));
        }
        s
    };
    emit(None, &text)
}

pub fn sample(_ctx: &Ctx, a: &SampleArgs) -> Res {
    let theta = parse_theta(&a.theta)?;
    if a.n == 0 {
        return Err(CliError::Input("--n must be at least 1".into()));
    }
    let xs = draw(&theta, a.n, a.seed)?;
    let mut s = String::with_capacity(a.n * 20 + 2);
    s.push_str("x\n");
    for x in xs {
        s.push_str(&format!("{x}\n"));
    }
    emit(a.out.as_deref(), &s)
}

fn report_value(r: &SeriesReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

pub fn props(ctx: &Ctx, a: &PropsArgs) -> Res {
    let theta = parse_theta(&a.theta)?;
    let ctl = &ctx.series;
    let mut out = Map::new();
    let mut reports = Map::new();
    out.insert("schema".into(), SCHEMA.into());
    out.insert("theta".into(), theta_json(&theta));
    if let Some(k) = a.moments {
        if k == 0 {
            return Err(CliError::Input("--moments must be at least 1".into()));
        }
        for r in 1..=k {
            let m = moment(&theta, r as f64, ctl)?;
            out.insert(format!("mu{r}"), json!(m.value));
            reports.insert(format!("mu{r}"), report_value(&m.report));
        }
        if k >= 2 {
            let c = central_moments_and_cumulants(&theta, k.min(6), ctl)?;
            out.insert("central".into(), json!(c.central));
            out.insert("cumulants".into(), json!(c.cumulants));
            reports.insert("central".into(), report_value(&c.report));
        }
    }
    if a.lmoments {
        let l = l_moments(&theta, 4, ctl)?;
        out.insert("lmoments".into(), json!(l.values));
        reports.insert("lmoments".into(), report_value(&l.report));
    }
    if let Some(rho) = a.entropy {
        match renyi_entropy(&theta, rho, ctl) {
            Ok(v) => {
                out.insert("entropy".into(), json!({ "rho": rho, "value": v.value, "divergent": false }));
                reports.insert("entropy".into(), report_value(&v.report));
            }
            Err(gkw::Error::Divergent { detail, .. }) => {
                ctx.note(format!("Renyi entropy diverges: {detail}"));
                out.insert(
                    "entropy".into(),
                    json!({ "rho": rho, "value": null, "divergent": true, "detail": detail }),
                );
            }
            Err(e) => return Err(e.into()),
        }
    }
    if a.deviations {
        let d = mean_deviations(&theta, ctl)?;
        out.insert("delta1".into(), json!(d.delta1));
        out.insert("delta2".into(), json!(d.delta2));
        reports.insert("deviations".into(), report_value(&d.report));
    }
    for (k, r) in &reports {
        if r["method"] == "quadrature" {
            ctx.note(format!("{k}: series did not converge, value from quadrature"));
        }
    }
    out.insert("reports".into(), Value::Object(reports));
    emit(None, &to_json(&Value::Object(out)))
}

/// Reads, converts and validates the data file.
fn load_data(ctx: &Ctx, a: &FitArgs) -> Result<Dataset, CliError> {
    let text = fs::read_to_string(&a.data).map_err(|e| io_err(&a.data, e))?;
    let rows = parse_csv(&text).map_err(|errs| {
        let lines: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
        CliError::Input(format!("{}: {}", a.data.display(), lines.join("; ")))
    })?;
    if rows.is_empty() {
        return Err(CliError::Input(format!("{}: no data", a.data.display())));
    }
    let mut values: Vec<f64> = rows.iter().map(|r| r.value).collect();
    if a.percent {
        values.iter_mut().for_each(|v| *v /= 100.0);
    }
    if a.shrink {
        values = shrink(&values);
        ctx.note(format!("applied (x(n-1) + 1/2)/n shrink to {} values", values.len()));
    }
    let bad: Vec<String> = rows
        .iter()
        .zip(&values)
        .filter(|(_, v)| !(**v > 0.0 && **v < 1.0))
        .map(|(r, _)| r.line.to_string())
        .collect();
    if !bad.is_empty() {
        return Err(CliError::Input(format!(
            "{}: values outside (0, 1) on lines {} (use --shrink or --percent)",
            a.data.display(),
            bad.join(", ")
        )));
    }
    Ok(Dataset::new(values, a.data.display().to_string())?)
}

fn plot_table(data: &Dataset, fits: &[FitResult]) -> String {
    const BINS: usize = 512;
    let w = 1.0 / BINS as f64;
    let mut counts = vec![0usize; BINS];
    for &x in data.values() {
        counts[((x / w) as usize).min(BINS - 1)] += 1;
    }
    let mut s = String::from("bin_left\tbin_right\thist_density");
    for f in fits {
        s.push('\t');
        s.push_str(f.submodel.name());
    }
    s.push('\n');
    let n = data.n() as f64;
    for (k, c) in counts.iter().enumerate() {
        let (lo, hi) = (k as f64 * w, (k + 1) as f64 * w);
        s.push_str(&format!("{lo}\t{hi}\t{}", *c as f64 / (n * w)));
        for f in fits {
            s.push_str(&format!("\t{}", pdf(&f.theta_hat, 0.5 * (lo + hi))));
        }
        s.push('\n');
    }
    s
}

pub fn fit(ctx: &Ctx, a: &FitArgs) -> Res {
    let mut models: Vec<SubModel> = Vec::new();
    for m in &a.models {
        let sub = m.parse::<SubModel>()?;
        if !models.contains(&sub) {
            models.push(sub);
        }
    }
    let data = load_data(ctx, a)?;
    let fits = fit_family(&data, &models, &FitOptions::default())?;
    for f in &fits {
        if !f.converged {
            ctx.note(format!("{}: optimizer did not converge (score sup-norm {:.3e})", f.submodel, f.grad_norm));
        }
    }
    let mut lr = Vec::new();
    for alt in &fits {
        for null in &fits {
            if null.submodel != alt.submodel
                && null.submodel.nested_in(alt.submodel)
                && null.submodel.free_count() < alt.submodel.free_count()
            {
                lr.push(LrRow::from(lr_test(null, alt)?));
            }
        }
    }
    let s = data.summary();
    let report = FitReport {
        schema: SCHEMA.into(),
        tool: format!("gkw {}", env!("CARGO_PKG_VERSION")),
        seed: a.seed,
        data: DataBlock {
            source: data.source().to_string(),
            n: s.n,
            min: s.min,
            max: s.max,
            mean: s.mean,
            variance: s.variance,
            percent: a.percent,
            shrink: a.shrink,
        },
        fits: fits.iter().map(ModelFit::from_fit).collect(),
        lr_tests: lr,
    };
    if let Some(p) = &a.plot {
        emit(Some(p), &plot_table(&data, &fits))?;
    }
    emit(a.out.as_deref(), &to_json(&report))
}

pub fn lr(_ctx: &Ctx, a: &LrArgs) -> Res {
    let text = fs::read_to_string(&a.report).map_err(|e| io_err(&a.report, e))?;
    let report: FitReport =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", a.report.display())))?;
    if report.schema != SCHEMA {
        return Err(CliError::Input(format!("unsupported report schema {:?}", report.schema)));
    }
    let find = |name: &str| -> Result<&ModelFit, CliError> {
        let sub = name.parse::<SubModel>()?;
        report
            .fits
            .iter()
            .find(|f| f.model == sub)
            .ok_or_else(|| CliError::Input(format!("model {sub} is not in the report")))
    };
    let null = find(&a.null)?;
    let alt = find(&a.alt)?;
    let r = lr_test(&null.to_fit(), &alt.to_fit())?;
    emit(
        None,
        &to_json(&json!({
            "schema": SCHEMA,
            "null": r.null_model,
            "alt": r.alt_model,
            "w": r.statistic_w,
            "df": r.df,
            "p_value": r.p_value,
        })),
    )
}
