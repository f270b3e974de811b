//! Job dispatch, the on-disk result cache, and output rendering for the CLI.
//!
//! Rendered output never contains timings or cache statistics, so a job run
//! twice prints the same bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use xxhash_rust::xxh64::xxh64;

use crate::arith::{binomial, mu};
use crate::error::{invalid, Error, Result};
use crate::gf2::{cache, words_for, SparseEchelon};
use crate::index::{DegreeIndex, Span};
use crate::invariants::{invariant_dimension, transfer_report, ExtData, InvariantReport, TransferReport};
use crate::monomial::WeightVector;
use crate::planner::{self, render_sketch, ReductionPlan};
use crate::solver::{
    induced_m_classes, kameko_image_dimension, kameko_kernel_report, omega_block, positive_dimension,
    qp0_qpplus_split, AdmissibleBasis, CohitSpace, ImageReport, KernelReport, MClassReport, MInterpretation,
    OmegaBlockReport, PartSource, PositivePart, Provenance, SplitReport,
};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
const ENGINE_MAJOR: &str = env!("CARGO_PKG_VERSION_MAJOR");

/// Positive parts whose reduced basis is larger than this are not written to disk.
const PART_CACHE_LIMIT: u64 = 256 << 20;

pub const DEFAULT_MEM_CAP: u64 = 8 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Dim,
    Basis,
    Omega,
    Split,
    Kameko,
    Plan,
    Invariants,
    Table,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Dim => "dim",
            Command::Basis => "basis",
            Command::Omega => "omega",
            Command::Split => "split",
            Command::Kameko => "kameko",
            Command::Plan => "plan",
            Command::Invariants => "invariants",
            Command::Table => "table",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Template {
    pub a: u64,
    pub b: u64,
    pub s: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobSpec {
    pub command: Command,
    pub k: usize,
    pub n: Option<u64>,
    pub omega: Option<WeightVector>,
    pub template: Option<Template>,
    /// Inclusive degree range for `table`.
    pub range: Option<(u64, u64)>,
    pub interpretation: MInterpretation,
    pub ext_data: Option<PathBuf>,
}

impl JobSpec {
    pub fn new(command: Command, k: usize) -> JobSpec {
        JobSpec {
            command,
            k,
            n: None,
            omega: None,
            template: None,
            range: None,
            interpretation: MInterpretation::Set,
            ext_data: None,
        }
    }

    /// Checks that the fields present suit the command.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > crate::monomial::MAX_VARS {
            return Err(invalid(format!("-k must be in 1..={}", crate::monomial::MAX_VARS)));
        }
        let given = [self.n.is_some(), self.omega.is_some(), self.template.is_some()];
        let count = given.iter().filter(|&&g| g).count();
        let ok = match self.command {
            Command::Dim | Command::Plan => count == 1 && self.omega.is_none(),
            Command::Basis | Command::Split | Command::Invariants => given == [true, false, false],
            Command::Omega => given == [false, true, false],
            // here the weight vector names a block, not the target
            Command::Kameko => self.n.is_some() && self.template.is_none(),
            Command::Table => count == 0,
        };
        if !ok {
            return Err(invalid(format!("{} got a combination of -n, --omega and --template it does not accept", self.command.name())));
        }
        if self.command == Command::Table && self.range.is_none() {
            return Err(invalid("table needs --from and --to"));
        }
        if let Some((a, b)) = self.range {
            if a > b {
                return Err(invalid(format!("empty range {a}..={b}")));
            }
        }
        Ok(())
    }

    fn degree(&self) -> Result<u64> {
        match (self.n, self.template) {
            (Some(n), _) => Ok(n),
            (None, Some(t)) => planner::degree_template(t.a, t.b, t.s),
            _ => Err(invalid("no degree given")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: u64,
    pub dim: Option<u64>,
    /// `direct`, or the first reduction applied.
    pub provenance: String,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Output {
    Dimension { k: usize, n: u64, dim: u64, plan: ReductionPlan },
    Basis { basis: AdmissibleBasis },
    Omega { report: OmegaBlockReport },
    Split { report: SplitReport },
    Kameko { image: ImageReport, kernel: KernelReport, m: Option<MClassReport> },
    Plan { plan: ReductionPlan, sketch: String },
    Invariants { report: InvariantReport, transfer: TransferReport },
    Table { k: usize, rows: Vec<TableRow> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub job: JobSpec,
    pub engine_version: String,
    pub output: Output,
    pub basis_path: Option<PathBuf>,
    #[serde(skip)]
    pub wall_ms: u128,
    #[serde(skip)]
    pub cache_hits: u64,
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub cache_dir: Option<PathBuf>,
    pub mem_cap: u64,
    pub jobs: usize,
}

impl Default for Settings {
    fn default() -> Settings {
        Settings { cache_dir: None, mem_cap: DEFAULT_MEM_CAP, jobs: 1 }
    }
}

/// Dense footprint of a reduced basis over `ncols` columns.
pub fn predicted_bytes(ncols: usize) -> u64 {
    ncols as u64 * words_for(ncols) as u64 * 8
}

/// Positive parts from memory, then disk, then computation under the memory cap.
pub struct Workbench {
    settings: Settings,
    parts: FxHashMap<(usize, u64), Arc<PositivePart>>,
    cache_hits: u64,
}

impl Workbench {
    pub fn new(settings: Settings) -> Workbench {
        Workbench { settings, parts: FxHashMap::default(), cache_hits: 0 }
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    pub fn cache_hits(&self) -> u64 {
        self.cache_hits
    }

    fn root(&self) -> Option<PathBuf> {
        self.settings.cache_dir.as_ref().map(|d| d.join(format!("v{ENGINE_MAJOR}")))
    }

    fn part_path(&self, r: usize, n: u64) -> Option<PathBuf> {
        self.root().map(|d| d.join("parts").join(format!("r{r}-n{n}.hitq")))
    }

    fn fits(&self, r: usize, n: u64) -> Result<bool> {
        let cols = crate::arith::positive_monomial_count(r as u32, n)
            .ok_or_else(|| Error::ResourceLimit(format!("(P_{r}^+)_{n} is too large to index")))?;
        Ok(predicted_bytes(cols as usize) <= self.settings.mem_cap)
    }

    fn load_part(&self, path: &Path, r: usize, n: u64) -> Result<PositivePart> {
        let entry = cache::read_from(path)?;
        let index = DegreeIndex::new(r, n, Span::Positive)?;
        if entry.k != r as u64 || entry.n != n || entry.omega.is_some() || entry.basis.ncols() != index.len() {
            return Err(Error::CorruptCache(format!("{} does not hold the part ({r}, {n})", path.display())));
        }
        let hit = (mu(n) as usize <= r && !index.is_empty()).then(|| SparseEchelon::from_basis(&entry.basis));
        Ok(PositivePart::from_parts(index, hit))
    }

    fn store_part(&self, path: &Path, part: &PositivePart) -> Result<()> {
        let Some(hit) = part.hit() else {
            return Ok(());
        };
        if predicted_bytes(part.index().len()) > PART_CACHE_LIMIT {
            return Ok(());
        }
        std::fs::create_dir_all(path.parent().expect("part paths have a parent"))?;
        let entry = cache::CacheEntry {
            k: part.index().k() as u64,
            n: part.index().degree(),
            omega: None,
            basis: hit.to_reduced()?,
        };
        cache::write_to(path, &entry)
    }

    /// `dim (QP_r^+)_n`, through the rank when the part itself is over the cap.
    pub fn positive_dim(&mut self, r: usize, n: u64) -> Result<usize> {
        if self.parts.contains_key(&(r, n)) || self.fits(r, n)? {
            return Ok(self.part(r, n)?.dim());
        }
        log::info!("(P_{r}^+)_{n} is over the memory cap, using the rank route");
        positive_dimension(r, n)
    }

    /// `dim (QP_k)_n` as a sum over supports.
    pub fn dimension(&mut self, k: usize, n: u64) -> Result<u64> {
        if n == 0 {
            return Ok(1);
        }
        let mut total = 0;
        for r in (mu(n) as usize).max(1)..=k.min(n as usize) {
            total += binomial(k as u64, r as u64).expect("small binomial") * self.positive_dim(r, n)? as u64;
        }
        Ok(total)
    }

    fn result_path(&self, job: &JobSpec) -> Result<Option<PathBuf>> {
        let Some(root) = self.root() else {
            return Ok(None);
        };
        let mut key = serde_json::to_vec(&(ENGINE_MAJOR, &job.command, job.k, job.n, &job.omega, &job.template, &job.range, &job.interpretation))?;
        if let Some(p) = &job.ext_data {
            key.extend_from_slice(&std::fs::read(p)?);
        }
        Ok(Some(root.join("results").join(format!("{:016x}.json", xxh64(&key, 0)))))
    }

    /// Runs a job, answering from the result cache when possible.
    pub fn run(&mut self, job: &JobSpec) -> Result<ResultRecord> {
        job.validate()?;
        let start = Instant::now();
        let hits_before = self.cache_hits;
        let path = self.result_path(job)?;
        if let Some(p) = path.as_ref().filter(|p| p.exists()) {
            let text = std::fs::read_to_string(p)?;
            let mut rec: ResultRecord = serde_json::from_str(&text)
                .map_err(|e| Error::CorruptCache(format!("{}: {e}", p.display())))?;
            if rec.job != *job {
                return Err(Error::CorruptCache(format!("{} holds a different job", p.display())));
            }
            self.cache_hits += 1;
            rec.cache_hits = 1;
            rec.wall_ms = start.elapsed().as_millis();
            return Ok(rec);
        }
        let output = self.dispatch(job)?;
        let mut basis_path = None;
        if let (Some(root), Output::Basis { basis }) = (self.root(), &output) {
            let p = root.join("bases").join(format!("k{}-n{}.json", basis.k, basis.n));
            std::fs::create_dir_all(p.parent().expect("has parent"))?;
            atomic_write(&p, basis.to_json().as_bytes())?;
            basis_path = Some(p);
        }
        let rec = ResultRecord {
            job: job.clone(),
            engine_version: ENGINE_VERSION.to_string(),
            output,
            basis_path,
            wall_ms: start.elapsed().as_millis(),
            cache_hits: self.cache_hits - hits_before,
        };
        if let Some(p) = path {
            std::fs::create_dir_all(p.parent().expect("has parent"))?;
            atomic_write(&p, serde_json::to_string(&rec)?.as_bytes())?;
        }
        Ok(rec)
    }

    fn dispatch(&mut self, job: &JobSpec) -> Result<Output> {
        let k = job.k;
        match job.command {
            Command::Dim => {
                let n = job.degree()?;
                let plan = match job.template {
                    Some(t) => planner::plan_template(k, t.a, t.b, t.s)?,
                    None => planner::plan(k, n)?,
                };
                let dim = planner::evaluate(&plan, &mut |k, n, positive| {
                    if positive {
                        Ok(self.positive_dim(k, n)? as u64)
                    } else {
                        self.dimension(k, n)
                    }
                })?;
                Ok(Output::Dimension { k, n, dim, plan })
            }
            Command::Basis => {
                let n = job.degree()?;
                let space = self.space(k, n)?;
                let mut basis = AdmissibleBasis::new(k, n, None, space.basis().to_vec());
                basis.provenance = Provenance::Direct;
                Ok(Output::Basis { basis })
            }
            Command::Omega => {
                let omega = job.omega.as_ref().expect("validated");
                Ok(Output::Omega { report: omega_block(k, omega)? })
            }
            Command::Split => {
                let n = job.degree()?;
                Ok(Output::Split { report: qp0_qpplus_split(&self.space(k, n)?) })
            }
            Command::Kameko => {
                let d = job.degree()?;
                let image = kameko_image_dimension(k, d, self, true)?;
                let kernel = kameko_kernel_report(k, d, self, job.omega.as_ref())?;
                let m = match &job.omega {
                    Some(w) if w.degree() == 2 * d + k as u64 => Some(induced_m_classes(k, w, job.interpretation, self)?),
                    Some(w) => return Err(invalid(format!("block {w} has degree {}, not {}", w.degree(), 2 * d + k as u64))),
                    None => None,
                };
                Ok(Output::Kameko { image, kernel, m })
            }
            Command::Plan => {
                let plan = match job.template {
                    Some(t) => planner::plan_template(k, t.a, t.b, t.s)?,
                    None => planner::plan(k, job.degree()?)?,
                };
                let sketch = render_sketch(&plan);
                Ok(Output::Plan { plan, sketch })
            }
            Command::Invariants => {
                let n = job.degree()?;
                let report = invariant_dimension(&self.space(k, n)?)?;
                let ext = match &job.ext_data {
                    Some(p) => ExtData::load(p, k, n)?,
                    None => None,
                };
                let transfer = transfer_report(&report, ext.as_ref())?;
                Ok(Output::Invariants { report, transfer })
            }
            Command::Table => {
                let (from, to) = job.range.expect("validated");
                Ok(Output::Table { k, rows: self.table(k, from, to)? })
            }
        }
    }

    fn space(&mut self, k: usize, n: u64) -> Result<CohitSpace> {
        CohitSpace::build(k, n, self)
    }

    fn table(&mut self, k: usize, from: u64, to: u64) -> Result<Vec<TableRow>> {
        let degrees: Vec<u64> = (from..=to).collect();
        let jobs = self.settings.jobs.max(1).min(degrees.len().max(1));
        if jobs == 1 {
            return Ok(degrees.iter().map(|&n| table_row(self, k, n)).collect());
        }
        let settings = self.settings.clone();
        let chunks: Vec<Vec<TableRow>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|j| {
                    let settings = settings.clone();
                    let mine: Vec<u64> = degrees.iter().copied().skip(j).step_by(jobs).collect();
                    scope.spawn(move || {
                        let mut wb = Workbench::new(settings);
                        mine.into_iter().map(|n| table_row(&mut wb, k, n)).collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("table worker panicked")).collect()
        });
        let mut rows: Vec<TableRow> = chunks.into_iter().flatten().collect();
        rows.sort_by_key(|r| r.n);
        Ok(rows)
    }
}

fn table_row(wb: &mut Workbench, k: usize, n: u64) -> TableRow {
    let result = planner::plan(k, n).and_then(|plan| {
        let dim = planner::evaluate(&plan, &mut |k, n, positive| {
            if positive {
                Ok(wb.positive_dim(k, n)? as u64)
            } else {
                wb.dimension(k, n)
            }
        })?;
        Ok((plan, dim))
    });
    match result {
        Ok((plan, dim)) => TableRow { n, dim: Some(dim), provenance: provenance_label(&plan), error: None },
        Err(e) => TableRow { n, dim: None, provenance: String::new(), error: Some(e.to_string()) },
    }
}

fn provenance_label(plan: &ReductionPlan) -> String {
    use planner::Step;
    match &plan.root.step {
        Step::DirectCompute { .. } => "direct".into(),
        Step::WoodZero { .. } => "wood".into(),
        Step::KamekoIso { d, .. } => format!("kameko:{d}"),
        Step::TinSumStabilize { target, .. } => format!("tin-sum:{target}"),
        Step::SumStabilize { b, .. } => format!("sum:{b}"),
        Step::MothebeCompose { .. } => "mothebe".into(),
    }
}

impl PartSource for Workbench {
    fn part(&mut self, r: usize, n: u64) -> Result<Arc<PositivePart>> {
        if let Some(p) = self.parts.get(&(r, n)) {
            return Ok(p.clone());
        }
        let path = self.part_path(r, n);
        let part = match path.as_ref().filter(|p| p.exists()) {
            Some(p) => {
                self.cache_hits += 1;
                self.load_part(p, r, n)?
            }
            None => {
                if !self.fits(r, n)? {
                    return Err(Error::ResourceLimit(format!(
                        "eliminating (P_{r}^+)_{n} needs about {} MiB, over the cap of {} MiB",
                        predicted_bytes(crate::arith::positive_monomial_count(r as u32, n).unwrap_or(u64::MAX) as usize) >> 20,
                        self.settings.mem_cap >> 20
                    )));
                }
                let part = PositivePart::compute(r, n)?;
                if let Some(p) = &path {
                    self.store_part(p, &part)?;
                }
                part
            }
        };
        let part = Arc::new(part);
        self.parts.insert((r, n), part.clone());
        Ok(part)
    }
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Format> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            _ => Err(invalid(format!("unknown format {s:?}"))),
        }
    }
}

/// Renders the output of a record. Identical outputs render identically.
pub fn render(output: &Output, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => match output {
            Output::Basis { basis } => basis.to_json() + "\n",
            _ => serde_json::to_string_pretty(output)? + "\n",
        },
        Format::Csv => render_csv(output),
        Format::Text => render_text(output),
    })
}

fn render_csv(output: &Output) -> String {
    let mut out = String::new();
    match output {
        Output::Table { rows, .. } => {
            out.push_str("n,dim,provenance,error\n");
            for r in rows {
                let dim = r.dim.map(|d| d.to_string()).unwrap_or_default();
                let err = r.error.as_deref().unwrap_or("").replace('"', "'");
                let _ = writeln!(out, "{},{dim},{},\"{err}\"", r.n, r.provenance);
            }
        }
        Output::Basis { basis } => {
            let header: Vec<String> = (1..=basis.k).map(|i| format!("x{i}")).collect();
            let _ = writeln!(out, "{}", header.join(","));
            for m in &basis.monomials {
                let row: Vec<String> = m.exps().iter().map(|e| e.to_string()).collect();
                let _ = writeln!(out, "{}", row.join(","));
            }
        }
        _ => {
            out.push_str("key,value\n");
            for (key, value) in summary(output) {
                let _ = writeln!(out, "{key},{value}");
            }
        }
    }
    out
}

fn render_text(output: &Output) -> String {
    let mut out = String::new();
    match output {
        Output::Dimension { dim, .. } => {
            let _ = writeln!(out, "{dim}");
        }
        Output::Basis { basis } => {
            for m in &basis.monomials {
                let _ = writeln!(out, "{m}");
            }
        }
        Output::Plan { sketch, .. } => out.push_str(sketch),
        Output::Table { k, rows } => {
            let _ = writeln!(out, "| n | dim (QP_{k})_n | provenance |");
            let _ = writeln!(out, "|---|---|---|");
            for r in rows {
                match (&r.dim, &r.error) {
                    (Some(d), _) => {
                        let _ = writeln!(out, "| {} | {d} | {} |", r.n, r.provenance);
                    }
                    (None, e) => {
                        let _ = writeln!(out, "| {} | error | {} |", r.n, e.as_deref().unwrap_or(""));
                    }
                }
            }
        }
        _ => {
            for (key, value) in summary(output) {
                let _ = writeln!(out, "{key} = {value}");
            }
        }
    }
    out
}

fn summary(output: &Output) -> BTreeMap<String, String> {
    let mut s = BTreeMap::new();
    let mut put = |k: String, v: String| {
        s.insert(k, v);
    };
    match output {
        Output::Dimension { k, n, dim, .. } => put(format!("dim (QP_{k})_{n}"), dim.to_string()),
        Output::Basis { basis } => put(format!("dim (QP_{})_{}", basis.k, basis.n), basis.dim.to_string()),
        Output::Omega { report } => {
            put(format!("dim QP_{}^+{}", report.k, report.omega), report.dim_positive.to_string());
            put(format!("dim QP_{}{}", report.k, report.omega), report.dim_all.to_string());
        }
        Output::Split { report } => {
            put(format!("dim (QP_{}^0)_{}", report.k, report.n), report.dim_zero.to_string());
            put(format!("dim (QP_{}^+)_{}", report.k, report.n), report.dim_positive.to_string());
        }
        Output::Kameko { image, kernel, m } => {
            put("image".into(), image.dim.to_string());
            put("kernel".into(), kernel.dim_kernel.to_string());
            put("source".into(), kernel.dim_source.to_string());
            put("target".into(), kernel.dim_target.to_string());
            put("zero part".into(), kernel.dim_zero.to_string());
            put("positive below floor".into(), kernel.dim_below_floor.to_string());
            for b in &kernel.kernel_blocks {
                put(format!("block {}", b.omega), b.dim.to_string());
            }
            if let Some(m) = m {
                put("M".into(), m.span_dim.to_string());
                put("N".into(), m.complement_dim.to_string());
            }
        }
        Output::Plan { plan, .. } => put(format!("plan ({}, {})", plan.k, plan.n), format!("{:?}", plan.root.step)),
        Output::Invariants { report, transfer } => {
            put("quotient".into(), report.quotient_dim.to_string());
            put("invariants".into(), report.invariant_dim.to_string());
            put("ext".into(), transfer.ext_dim.map(|e| e.to_string()).unwrap_or_else(|| "not supplied".into()));
            put("verdict".into(), serde_json::to_value(transfer.verdict).expect("enum").as_str().unwrap_or("").into());
        }
        Output::Table { .. } => {}
    }
    s
}
