use super::config::{OutputFormat, RunConfig};
use crate::error::{AdqError, Result};
use crate::geometry::DiskPoint;
use crate::portrait::{self, kappa_from, wigner_sweep, Portrait, SweepRow};
use crate::quantizer::{
    gamma_by_quadrature, gamma_constant, m_power_closed, quantize_with_estimate, Field,
    QuantizerOperator, SeriesMode, WeightSpec,
};
use crate::repn::{FockOperator, Generator};
use crate::report::Report;
use num_complex::Complex64;
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Observable {
    K0,
    K1,
    K2,
    Kplus,
    Kminus,
    /// expression in x, y, r, u = r², phi (see --expr)
    Custom,
}

impl Observable {
    fn generator(self) -> Option<Generator> {
        match self {
            Observable::K0 => Some(Generator::K0),
            Observable::K1 => Some(Generator::K1),
            Observable::K2 => Some(Generator::K2),
            Observable::Kplus => Some(Generator::Kplus),
            Observable::Kminus => Some(Generator::Kminus),
            Observable::Custom => None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Expr {
    pub re: Option<String>,
    pub im: Option<String>,
    /// growth order of the field at the boundary; 0 for bounded fields
    pub order: f64,
}

fn compile(src: &str) -> Result<evalexpr::Node> {
    evalexpr::build_operator_tree(src)
        .map_err(|e| AdqError::Invalid(format!("expression {src:?}: {e}")))
}

fn eval_node(node: &evalexpr::Node, z: DiskPoint) -> Result<f64> {
    use evalexpr::{ContextWithMutableVariables, HashMapContext, Value};
    let w = z.z();
    let mut ctx = HashMapContext::new();
    for (k, v) in [
        ("x", w.re),
        ("y", w.im),
        ("r", w.norm()),
        ("u", z.abs2()),
        ("phi", w.arg()),
    ] {
        ctx.set_value(k.into(), Value::Float(v))
            .map_err(|e| AdqError::Invalid(e.to_string()))?;
    }
    node.eval_number_with_context(&ctx)
        .map_err(|e| AdqError::Invalid(format!("expression: {e}")))
}

pub fn build_field(obs: Observable, expr: &Expr) -> Result<Field> {
    if let Some(a) = obs.generator() {
        return Ok(Field::observable(a));
    }
    let re = expr
        .re
        .as_deref()
        .ok_or_else(|| AdqError::Invalid("custom observable needs --expr".into()))?;
    let re_node = compile(re)?;
    let im_node = expr.im.as_deref().map(compile).transpose()?;
    // surface syntax and name errors before the grid is built
    let probe = DiskPoint::from_re_im(0.1, 0.2)?;
    eval_node(&re_node, probe)?;
    if let Some(n) = &im_node {
        eval_node(n, probe)?;
    }
    let name = match expr.im.as_deref() {
        Some(im) => format!("({re}) + i({im})"),
        None => re.to_string(),
    };
    Ok(Field::new(name, expr.order, move |z| {
        let re = eval_node(&re_node, z).unwrap_or(f64::NAN);
        let im = im_node
            .as_ref()
            .map_or(0.0, |n| eval_node(n, z).unwrap_or(f64::NAN));
        Complex64::new(re, im)
    }))
}

fn open_out(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| AdqError::Io(e.to_string()))
}

fn csv_io(e: csv::Error) -> AdqError {
    AdqError::Io(e.to_string())
}

fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_report(report: &Report, cfg: &RunConfig) -> Result<()> {
    let mut out = open_out(cfg.out.as_deref())?;
    match cfg.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => writeln!(out, "{}", json(report)?)?,
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "name",
                "reference",
                "measured",
                "tolerance",
                "status",
                "detail",
            ])
            .map_err(csv_io)?;
            for c in &report.checks {
                let status = serde_json::to_value(c.status)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default();
                w.write_record([
                    c.name.clone(),
                    c.reference.clone(),
                    fmt_num(c.measured),
                    fmt_num(c.tolerance),
                    status,
                    c.detail.clone().unwrap_or_default(),
                ])
                .map_err(csv_io)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct MatrixJson {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl MatrixJson {
    fn of(a: &FockOperator) -> MatrixJson {
        let n = a.dim();
        let grid = |f: fn(Complex64) -> f64| {
            (0..n)
                .map(|i| (0..n).map(|j| f(a.get(i, j))).collect())
                .collect()
        };
        MatrixJson {
            re: grid(|c| c.re),
            im: grid(|c| c.im),
        }
    }
}

#[derive(Serialize)]
struct QuantizeOutput {
    eta: f64,
    dim: usize,
    weight: String,
    observable: String,
    gamma: Option<f64>,
    /// max entry change when the quadrature grid is doubled
    grid_change: f64,
    operator: MatrixJson,
}

pub fn quantize_cmd(cfg: &RunConfig, obs: Observable, expr: &Expr) -> Result<()> {
    let w = cfg.weight_spec()?;
    let q = QuantizerOperator::new(&w, cfg.dim)?;
    let f = build_field(obs, expr)?;
    let (a, change) = quantize_with_estimate(&q, &f, cfg.dim, cfg.grid())?;
    let gamma = if cfg.eta > 1.0 {
        gamma_constant(&q, SeriesMode::Auto).ok()
    } else {
        None
    };
    let mut out = open_out(cfg.out.as_deref())?;
    match cfg.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => {
            let o = QuantizeOutput {
                eta: cfg.eta,
                dim: cfg.dim,
                weight: w.to_string(),
                observable: f.name().to_string(),
                gamma,
                grid_change: change,
                operator: MatrixJson::of(&a),
            };
            writeln!(out, "{}", json(&o)?)?;
        }
        OutputFormat::Csv => {
            writeln!(out, "# eta={}", cfg.eta)?;
            writeln!(out, "# dim={}", cfg.dim)?;
            writeln!(out, "# weight={w}")?;
            writeln!(out, "# observable={}", f.name())?;
            if let Some(g) = gamma {
                writeln!(out, "# gamma={g:.16e}")?;
            }
            writeln!(out, "# grid_change={change:.3e}")?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["row", "col", "re", "im"]).map_err(csv_io)?;
            for i in 0..a.dim() {
                for j in 0..a.dim() {
                    let c = a.get(i, j);
                    w.write_record([i.to_string(), j.to_string(), fmt_num(c.re), fmt_num(c.im)])
                        .map_err(csv_io)?;
                }
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct PortraitGrid {
    pub radii: usize,
    pub rmax: f64,
    pub angles: usize,
}

#[derive(Serialize)]
struct PortraitOutput {
    eta: f64,
    w1: String,
    w2: String,
    observable: String,
    kappa: Option<f64>,
    samples: Vec<portrait::PortraitSample>,
}

pub fn portrait_cmd(cfg: &RunConfig, obs: Observable, expr: &Expr, pg: PortraitGrid) -> Result<()> {
    if !(pg.rmax > 0.0 && pg.rmax < 1.0) || pg.radii == 0 || pg.angles == 0 {
        return Err(AdqError::Invalid(format!(
            "portrait grid needs 0 < rmax < 1 and positive counts, got {pg:?}"
        )));
    }
    let (w1, w2) = (cfg.weight_spec()?, cfg.weight2_spec()?);
    let q1 = QuantizerOperator::new(&w1, cfg.dim)?;
    let q2 = QuantizerOperator::new(&w2, cfg.dim)?;
    let f = build_field(obs, expr)?;
    let engine = Portrait::new(&q1, &q2, f.order(), cfg.grid())?;
    let kappa = match obs.generator() {
        Some(_) => Some(kappa_from(&engine)?.kappa),
        None => None,
    };
    let radii: Vec<f64> = (1..=pg.radii)
        .map(|i| pg.rmax * i as f64 / pg.radii as f64)
        .collect();
    let samples = portrait::portrait_grid(&engine, &f, &radii, pg.angles)?;
    let mut out = open_out(cfg.out.as_deref())?;
    match cfg.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            if let Some(k) = kappa {
                writeln!(out, "# kappa={k:.16e}")?;
            }
            portrait::write_csv(&samples, out)?;
        }
        OutputFormat::Json => {
            let o = PortraitOutput {
                eta: cfg.eta,
                w1: w1.to_string(),
                w2: w2.to_string(),
                observable: f.name().to_string(),
                kappa,
                samples,
            };
            writeln!(out, "{}", json(&o)?)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalRow {
    pub eta: f64,
    pub weight: String,
    pub k: usize,
    pub m_kk: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaRow {
    pub eta: f64,
    pub weight: String,
    pub gamma: Option<f64>,
    pub gamma_quadrature: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityRow {
    pub eta: f64,
    pub s: f64,
    pub min_m: f64,
    pub positive: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KappaRow {
    pub eta: f64,
    #[serde(flatten)]
    pub row: SweepRow,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Tables {
    pub diagonals: Vec<DiagonalRow>,
    pub gamma: Vec<GammaRow>,
    pub positivity: Vec<PositivityRow>,
    pub kappa: Vec<KappaRow>,
}

fn table_weights(eta: f64) -> Result<Vec<WeightSpec>> {
    Ok(vec![
        WeightSpec::perelomov(eta)?,
        WeightSpec::power(eta, eta + 0.5)?,
        WeightSpec::basis_projector(eta, 1)?,
        WeightSpec::half(eta)?,
    ])
}

pub fn build_tables(cfg: &RunConfig, etas: &[f64]) -> Result<Tables> {
    let mut t = Tables::default();
    let kmax = cfg.dim.min(20);
    for &eta in etas {
        if !(eta > 0.5 && eta.is_finite()) {
            return Err(AdqError::Invalid(format!("eta must exceed 1/2, got {eta}")));
        }
        for w in table_weights(eta)? {
            let q = QuantizerOperator::new(&w, kmax)?;
            t.diagonals.extend((0..kmax).map(|k| DiagonalRow {
                eta,
                weight: w.to_string(),
                k,
                m_kk: q.entry(k),
            }));
            let mut row = GammaRow {
                eta,
                weight: w.to_string(),
                gamma: None,
                gamma_quadrature: None,
                note: None,
            };
            if eta <= 1.0 {
                row.note = Some("gamma needs eta > 1".into());
            } else {
                let mut notes = Vec::new();
                match gamma_constant(&q, SeriesMode::Auto) {
                    Ok(g) => row.gamma = Some(g),
                    Err(e) => notes.push(e.to_string()),
                }
                match gamma_by_quadrature(&q, cfg.grid()) {
                    Ok(g) => row.gamma_quadrature = Some(g),
                    Err(e) => notes.push(e.to_string()),
                }
                if !notes.is_empty() {
                    row.note = Some(notes.join("; "));
                }
            }
            t.gamma.push(row);
        }
        for j in 1..=10 {
            let s = 1.0 + j as f64 * eta / 8.0;
            let mut min_m = f64::INFINITY;
            for k in 0..400 {
                min_m = min_m.min(m_power_closed(eta, s, k)?);
            }
            t.positivity.push(PositivityRow {
                eta,
                s,
                min_m,
                positive: min_m >= 0.0,
            });
        }
        let w1s = vec![
            WeightSpec::perelomov(eta)?,
            WeightSpec::basis_projector(eta, 1)?,
            WeightSpec::half(eta)?,
        ];
        let w2s = vec![
            WeightSpec::perelomov(eta)?,
            WeightSpec::power(eta, eta + 0.5)?,
        ];
        t.kappa.extend(
            wigner_sweep(&w1s, &w2s, cfg.dim, cfg.grid())
                .into_iter()
                .map(|row| KappaRow { eta, row }),
        );
    }
    Ok(t)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn write_table<const N: usize>(
    path: &Path,
    header: [&str; N],
    rows: Vec<[String; N]>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_io)?;
    w.write_record(header).map_err(csv_io)?;
    for r in rows {
        w.write_record(r).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn tables_cmd(cfg: &RunConfig, etas: &[f64]) -> Result<Vec<PathBuf>> {
    let dir = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("adq-tables"));
    std::fs::create_dir_all(&dir)?;
    let t = build_tables(cfg, etas)?;
    if cfg.format == Some(OutputFormat::Json) {
        let p = dir.join("tables.json");
        std::fs::write(&p, json(&t)?)?;
        return Ok(vec![p]);
    }
    let paths: Vec<PathBuf> = ["diagonals.csv", "gamma.csv", "positivity.csv", "kappa.csv"]
        .iter()
        .map(|f| dir.join(f))
        .collect();
    write_table(
        &paths[0],
        ["eta", "weight", "k", "m_kk"],
        t.diagonals
            .iter()
            .map(|r| {
                [
                    r.eta.to_string(),
                    r.weight.clone(),
                    r.k.to_string(),
                    fmt_num(r.m_kk),
                ]
            })
            .collect(),
    )?;
    write_table(
        &paths[1],
        ["eta", "weight", "gamma", "gamma_quadrature", "note"],
        t.gamma
            .iter()
            .map(|r| {
                [
                    r.eta.to_string(),
                    r.weight.clone(),
                    opt(r.gamma),
                    opt(r.gamma_quadrature),
                    r.note.clone().unwrap_or_default(),
                ]
            })
            .collect(),
    )?;
    write_table(
        &paths[2],
        ["eta", "s", "min_m", "positive"],
        t.positivity
            .iter()
            .map(|r| {
                [
                    r.eta.to_string(),
                    r.s.to_string(),
                    fmt_num(r.min_m),
                    r.positive.to_string(),
                ]
            })
            .collect(),
    )?;
    write_table(
        &paths[3],
        [
            "eta",
            "w1",
            "w2",
            "gamma",
            "kappa",
            "gamma_kappa_minus_one",
            "note",
        ],
        t.kappa
            .iter()
            .map(|r| {
                [
                    r.eta.to_string(),
                    r.row.w1.clone(),
                    r.row.w2.clone(),
                    opt(r.row.gamma),
                    opt(r.row.kappa),
                    opt(r.row.gamma_kappa_minus_one),
                    r.row.note.clone().unwrap_or_default(),
                ]
            })
            .collect(),
    )?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn custom_expression_field() {
        let e = Expr {
            re: Some("x*x + y".into()),
            im: Some("u".into()),
            order: 0.0,
        };
        let f = build_field(Observable::Custom, &e).unwrap();
        let v = f.eval(DiskPoint::from_re_im(0.3, 0.4).unwrap());
        assert!((v.re - 0.49).abs() < 1e-14 && (v.im - 0.25).abs() < 1e-14);
        let bad = Expr {
            re: Some("x +* 2".into()),
            ..Expr::default()
        };
        assert!(matches!(
            build_field(Observable::Custom, &bad),
            Err(AdqError::Invalid(_))
        ));
        let unknown = Expr {
            re: Some("zeta".into()),
            ..Expr::default()
        };
        assert!(build_field(Observable::Custom, &unknown).is_err());
        assert!(build_field(Observable::Custom, &Expr::default()).is_err());
    }
}
