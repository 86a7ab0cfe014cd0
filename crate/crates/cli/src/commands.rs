use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use spgamma::io::{
    load_graph, load_metric_matrix, load_panel, load_significance, write_edge_list, write_significance,
    SignificanceRecord,
};
use spgamma::{
    global_pvalue, local_pvalues, mc_global_pvalue, mc_local_pvalues, power_curve, AgreementTable, FdrMode,
    GridSpec, PanelMatrix, PowerMode, SimConfig, SimilarityKernel, Statistic, WeightGraph,
};

use crate::manifest::Manifest;
use crate::{CompareArgs, GisaArgs, InputArgs, LagArgs, LevelArg, LisaArgs, SimulateArgs};

#[derive(Debug)]
pub struct CliError {
    numeric: bool,
    msg: String,
}

impl CliError {
    fn input(msg: impl Into<String>) -> Self {
        Self { numeric: false, msg: msg.into() }
    }

    pub fn exit_code(&self) -> u8 {
        if self.numeric {
            3
        } else {
            2
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl From<spgamma::Error> for CliError {
    fn from(e: spgamma::Error) -> Self {
        Self { numeric: e.is_numeric(), msg: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::input(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

struct Loaded {
    statistic: Statistic,
    kernel: SimilarityKernel,
    data: PanelMatrix,
    graph: WeightGraph,
}

fn load_inputs(a: &InputArgs) -> Result<Loaded> {
    if a.lag == 0 {
        return Err(CliError::input("--lag must be at least 1"));
    }
    if a.mc == Some(0) {
        return Err(CliError::input("--mc must be at least 1"));
    }
    let statistic = Statistic::from(a.stat);
    let kernel = match &a.metric_matrix {
        Some(path) if statistic == Statistic::Moran => SimilarityKernel::Moran(Some(load_metric_matrix(path)?)),
        Some(_) => return Err(CliError::input("--metric-matrix applies only to --stat moran")),
        None => statistic.kernel(),
    };
    let data = load_panel(&a.panel)?;
    let graph = load_graph(&a.graph, Some(data.regions()))?.lag(a.lag);
    Ok(Loaded { statistic, kernel, data, graph })
}

fn input_manifest(command: &'static str, a: &InputArgs) -> Result<Manifest> {
    let mut m = Manifest::new(command, &a.out)
        .seed(a.seed)
        .param("stat", Statistic::from(a.stat).name())
        .param("lag", a.lag)
        .param("mc", a.mc)
        .input("graph", &a.graph)?
        .input("panel", &a.panel)?;
    if let Some(path) = &a.metric_matrix {
        m = m.input("metric_matrix", path)?;
    }
    Ok(m)
}

pub fn lisa(a: &LisaArgs) -> Result<String> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(CliError::input(format!("--alpha must be in (0, 1), got {}", a.alpha)));
    }
    let inp = load_inputs(&a.input)?;
    let lv = spgamma::lisa(&inp.kernel, &inp.data, &inp.graph)?;
    let report = local_pvalues(&lv, &inp.graph)?;
    let p_mc = match a.input.mc {
        Some(b) => Some(mc_local_pvalues(&inp.kernel, &inp.data, &inp.graph, b, a.input.seed)?),
        None => None,
    };
    let fdr = FdrMode::from(a.fdr);
    let p_adj = fdr.adjust(&report.p_raw, &inp.graph)?;
    let records: Vec<SignificanceRecord> = (0..lv.len())
        .map(|i| SignificanceRecord {
            region: i,
            statistic: lv.gamma[i],
            centered_deviation: lv.gamma[i] - lv.center[i],
            sign: report.sign[i],
            p_raw: report.p_raw[i],
            p_mc: p_mc.as_ref().map(|p| p[i]),
            p_adj: p_adj[i],
            sig_05: p_adj[i] <= 0.05,
            sig_01: p_adj[i] <= 0.01,
        })
        .collect();
    let mut out = create(&a.input.out)?;
    write_significance(&records, &mut out)?;
    out.flush()?;
    input_manifest("lisa", &a.input)?
        .param("fdr", fdr.name())
        .param("alpha", a.alpha)
        .write(&a.input.out)?;
    let hits = p_adj.iter().filter(|&&p| p <= a.alpha).count();
    Ok(format!(
        "{}: {hits} of {} regions with {} adjusted p <= {}",
        inp.statistic,
        records.len(),
        fdr,
        a.alpha
    ))
}

pub fn gisa(a: &GisaArgs) -> Result<String> {
    let inp = load_inputs(&a.input)?;
    let lv = spgamma::lisa(&inp.kernel, &inp.data, &inp.graph)?;
    let report = global_pvalue(&lv, &inp.graph)?;
    let p_mc = match a.input.mc {
        Some(b) => Some(mc_global_pvalue(&inp.kernel, &inp.data, &inp.graph, b, a.input.seed)?),
        None => None,
    };
    let mut out = create(&a.input.out)?;
    writeln!(out, "kernel,gamma,center,deviation,upsilon_sq,p,p_mc")?;
    writeln!(
        out,
        "{},{},{},{},{},{},{}",
        inp.statistic,
        report.gamma,
        report.center,
        report.deviation,
        report.upsilon_sq,
        report.p,
        p_mc.map(|p| p.to_string()).unwrap_or_default()
    )?;
    out.flush()?;
    input_manifest("gisa", &a.input)?.write(&a.input.out)?;
    Ok(format!("{}: global p = {}", inp.statistic, report.p))
}

pub fn simulate(a: &SimulateArgs) -> Result<String> {
    let statistics: Vec<Statistic> = if a.stats.is_empty() {
        Statistic::ALL.to_vec()
    } else {
        a.stats.iter().map(|&s| s.into()).collect()
    };
    let cfg = SimConfig {
        grid: GridSpec::new(a.rows, a.cols)?,
        times: a.t,
        c_values: a.c_list.clone(),
        replicates: a.replicates,
        alpha: a.alpha,
        seed: a.seed,
        statistics: statistics.clone(),
    };
    let mode = PowerMode::from(a.mode);
    let curve = power_curve(&cfg, mode)?;
    let mut out = create(&a.out)?;
    curve.write_csv(&mut out)?;
    out.flush()?;
    Manifest::new("simulate", &a.out)
        .seed(a.seed)
        .param("rows", a.rows)
        .param("cols", a.cols)
        .param("t", a.t)
        .param("c_list", &a.c_list)
        .param("replicates", a.replicates)
        .param("alpha", a.alpha)
        .param("mode", mode.name())
        .param("stats", statistics.iter().map(|s| s.name()).collect::<Vec<_>>())
        .write(&a.out)?;
    Ok(format!("{} power points written to {}", curve.points.len(), a.out.display()))
}

pub fn compare(a: &CompareArgs) -> Result<String> {
    let left = load_significance(&a.a)?;
    let right = load_significance(&a.b)?;
    if left.len() != right.len() || left.iter().zip(&right).any(|(x, y)| x.region != y.region) {
        return Err(CliError::input(format!(
            "{} and {} do not list the same regions in the same order",
            a.a.display(),
            a.b.display()
        )));
    }
    let pick = |r: &SignificanceRecord| match a.level {
        LevelArg::Five => r.sig_05,
        LevelArg::One => r.sig_01,
    };
    let table = AgreementTable::from_labels(
        &left.iter().map(pick).collect::<Vec<_>>(),
        &right.iter().map(pick).collect::<Vec<_>>(),
    )?;
    let rand = table.rand_index()?;
    let mcc = table.mcc();
    let mut out = create(&a.out)?;
    writeln!(out, "tp,fp,fn,tn,mcc,rand")?;
    writeln!(out, "{},{},{},{},{},{}", table.tp, table.fp, table.fn_, table.tn, mcc, rand)?;
    out.flush()?;
    let level = match a.level {
        LevelArg::Five => "0.05",
        LevelArg::One => "0.01",
    };
    Manifest::new("compare", &a.out)
        .param("level", level)
        .input("a", &a.a)?
        .input("b", &a.b)?
        .write(&a.out)?;
    Ok(format!("mcc = {mcc}, rand = {rand}"))
}

pub fn lag(a: &LagArgs) -> Result<String> {
    let g = load_graph(&a.graph, a.n)?.lag(a.k);
    let mut out = create(&a.out)?;
    write_edge_list(&g, &mut out)?;
    out.flush()?;
    Manifest::new("lag", &a.out)
        .param("k", a.k)
        .param("n", a.n)
        .input("graph", &a.graph)?
        .write(&a.out)?;
    Ok(format!("{} edges at distance {}", g.edge_count(), a.k))
}
