use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::cv::{cross_validate_many, paired_contingency, CvOptions, CvReport};
use super::methods::{fit_methods, Method, MethodSettings};
use super::metrics::zero_one_total;
use super::stats::{pooled_mcnemar, McNemar};
use crate::data::{load_dataset, resolve_dataset, Dataset, Scaler, SplitPlan, SplitScheme};
use crate::error::{Error, Result};

/// The four benchmark datasets, in table order.
pub const UCI_DATASETS: [&str; 4] = ["breast", "heart", "liver", "pima"];

/// Published reference numbers, per dataset in [`UCI_DATASETS`] order.
pub mod reference {
    /// Training 0-1 loss on all rows.
    pub const TRAIN_LR: [f64; 4] = [21.0, 39.0, 102.0, 167.0];
    pub const TRAIN_BBLR1: [f64; 4] = [11.0, 42.0, 102.0, 169.0];
    pub const TRAIN_SLA: [f64; 4] = [14.0, 39.0, 90.0, 157.0];
    pub const TRAIN_BBLR2: [f64; 4] = [12.0, 26.0, 90.0, 166.0];

    /// Test error (%) over 10 repetitions of 5-fold cross-validation.
    pub const CLEAN_LR: [f64; 4] = [3.2, 16.8, 31.5, 22.3];
    pub const CLEAN_SLA: [f64; 4] = [3.6, 17.7, 32.9, 23.9];
    pub const CLEAN_BBLR2: [f64; 4] = [3.2, 18.6, 30.6, 23.0];
    pub const CLEAN_BBLR3: [f64; 4] = [3.1, 15.9, 30.4, 22.2];
    pub const CLEAN_BBLR4: [f64; 4] = [3.0, 15.7, 30.5, 22.2];
    /// Test 0-1 loss summed over folds, averaged over repetitions.
    pub const CLEAN_SUM_LR: [f64; 4] = [22.0, 45.0, 109.0, 172.0];
    pub const CLEAN_SUM_SLA: [f64; 4] = [23.0, 48.0, 114.0, 184.0];
    pub const CLEAN_SUM_BBLR2: [f64; 4] = [22.0, 50.0, 105.0, 176.0];
    pub const CLEAN_SUM_BBLR3: [f64; 4] = [21.0, 43.0, 105.0, 171.0];

    /// As above with 10% of the training labels flipped.
    pub const NOISY_LR: [f64; 4] = [5.2, 16.4, 43.5, 25.0];
    pub const NOISY_SLA: [f64; 4] = [3.8, 18.1, 43.3, 31.1];
    pub const NOISY_BBLR2: [f64; 4] = [3.9, 17.3, 33.8, 24.0];
    pub const NOISY_BBLR3: [f64; 4] = [3.7, 15.5, 34.1, 22.7];
    pub const NOISY_BBLR4: [f64; 4] = [3.4, 15.2, 34.0, 22.5];
    pub const NOISY_SUM_LR: [f64; 4] = [36.0, 44.0, 150.0, 192.0];
    pub const NOISY_SUM_SLA: [f64; 4] = [26.0, 49.0, 149.0, 239.0];
    pub const NOISY_SUM_BBLR2: [f64; 4] = [26.0, 47.0, 149.0, 185.0];
    pub const NOISY_SUM_BBLR3: [f64; 4] = [25.0, 42.0, 117.0, 174.0];

    /// Pooled McNemar statistic of BBLR3 against LR.
    pub const MCNEMAR_CLEAN_VS_LR: f64 = 3.17;
    pub const MCNEMAR_NOISY_VS_LR: f64 = 4.33;

    pub const KERNEL_KBBLR: [f64; 4] = [2.98, 16.27, 26.91, 22.9];
    pub const KERNEL_LINEAR: [f64; 4] = [2.82, 17.08, 31.80, 21.57];
    pub const SPARSE_KBBLR: [f64; 4] = [2.83, 16.40, 28.74, 23.52];
    pub const SPARSE_SUPPORT: [f64; 4] = [127.0, 85.0, 111.0, 269.0];
}

/// Acceptance bands.
pub mod bands {
    pub const TRAIN_TOTAL_MAX: f64 = 310.0;
    pub const CLEAN_TOLERANCE: f64 = 2.0;
    pub const NOISY_LIVER_MARGIN: f64 = 5.0;
    pub const NOISY_PIMA_MARGIN: f64 = 1.0;
    pub const BBLR4_SLACK: f64 = 0.5;
    pub const KERNEL_TOLERANCE: f64 = 2.5;
    pub const SPARSE_RATIO: f64 = 0.5;
}

/// Penalty of the training-loss table, which has no held-out rows to tune on.
pub const TRAIN_TABLE_LAMBDA: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableId {
    /// Training 0-1 loss on all rows.
    Train01,
    /// Repeated cross-validation on clean data.
    CleanCv,
    /// Repeated cross-validation with flipped training labels.
    NoisyCv,
    KernelCompare,
    SparseKernel,
}

impl TableId {
    pub const ALL: [TableId; 5] = [
        TableId::Train01,
        TableId::CleanCv,
        TableId::NoisyCv,
        TableId::KernelCompare,
        TableId::SparseKernel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableId::Train01 => "train-01",
            TableId::CleanCv => "clean-cv",
            TableId::NoisyCv => "noisy-cv",
            TableId::KernelCompare => "kernel-compare",
            TableId::SparseKernel => "sparse-kernel",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            TableId::Train01 => "Training 0-1 loss on all rows",
            TableId::CleanCv => "Test error (%) and 0-1 loss, repeated 5-fold cross-validation",
            TableId::NoisyCv => "Test error (%) and 0-1 loss with flipped training labels",
            TableId::KernelCompare => "Kernel model test error (%)",
            TableId::SparseKernel => "Sparse kernel model: test error (%) and support counts",
        }
    }
}

impl FromStr for TableId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|t| t.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown table '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TableOptions {
    pub data_dir: Option<PathBuf>,
    pub datasets: Vec<String>,
    pub repetitions: usize,
    pub folds: usize,
    pub seed: u64,
    pub noise_rate: f64,
    pub settings: MethodSettings,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            data_dir: None,
            datasets: UCI_DATASETS.iter().map(|s| s.to_string()).collect(),
            repetitions: 10,
            folds: 5,
            seed: 1,
            noise_rate: 0.1,
            settings: MethodSettings::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub label: String,
    pub ours: Vec<Option<f64>>,
    pub reference: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Statistic {
    pub name: String,
    pub test: Option<McNemar>,
    pub reference: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableResult {
    pub id: TableId,
    pub title: String,
    pub datasets: Vec<String>,
    pub columns: Vec<Column>,
    pub statistics: Vec<Statistic>,
    pub bands: Vec<Band>,
    /// Datasets that could not be loaded, with the reason.
    pub skipped: Vec<String>,
    /// Fold-level results behind cross-validated columns, per dataset.
    #[serde(skip)]
    pub reports: Vec<(String, Vec<CvReport>)>,
}

impl TableResult {
    pub fn passed(&self) -> bool {
        self.bands.iter().all(|b| b.passed)
    }

    pub fn column(&self, label: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.label == label)
    }

    /// Our value of `label` on `dataset`.
    pub fn value(&self, label: &str, dataset: &str) -> Option<f64> {
        let i = self.datasets.iter().position(|d| d == dataset)?;
        self.column(label)?.ours[i]
    }

    /// Tab-separated rendering: one row per dataset with our value and the
    /// reference side by side, then statistics and band verdicts as comments.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} ({})", self.title, self.id.name());
        s.push_str("dataset");
        for c in &self.columns {
            let _ = write!(s, "\t{}\t{} ref", c.label, c.label);
        }
        s.push('\n');
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"));
        for (i, d) in self.datasets.iter().enumerate() {
            s.push_str(d);
            for c in &self.columns {
                let _ = write!(s, "\t{}\t{}", fmt(c.ours[i]), fmt(c.reference[i]));
            }
            s.push('\n');
        }
        for st in &self.statistics {
            let z = st.test.map_or_else(|| "-".to_string(), |m| format!("{:.2}", m.z));
            let sig = st.test.map_or("", |m| if m.significant { " significant" } else { "" });
            let _ = writeln!(s, "# {}: z = {z}{sig} (reference {})", st.name, fmt(st.reference));
        }
        for b in &self.bands {
            let _ = writeln!(s, "# {} {}: {}", if b.passed { "PASS" } else { "FAIL" }, b.name, b.detail);
        }
        for k in &self.skipped {
            let _ = writeln!(s, "# skipped {k}");
        }
        s
    }
}

fn reference_for(dataset: &str, table: &[f64; 4]) -> Option<f64> {
    UCI_DATASETS.iter().position(|d| *d == dataset).map(|i| table[i])
}

fn load_all(opts: &TableOptions) -> (Vec<(String, Dataset)>, Vec<String>) {
    let mut ok = Vec::new();
    let mut skipped = Vec::new();
    for name in &opts.datasets {
        match resolve_dataset(name, opts.data_dir.as_deref()).and_then(|p| load_dataset(&p)) {
            Ok(d) => ok.push((name.clone(), d)),
            Err(e) => skipped.push(format!("{name}: {e}")),
        }
    }
    (ok, skipped)
}

struct Protocol {
    names: Vec<String>,
    skipped: Vec<String>,
    methods: Vec<Method>,
    runs: Vec<Vec<CvReport>>,
    data: Vec<Dataset>,
}

impl Protocol {
    fn run(opts: &TableOptions, loaded: &[(String, Dataset)], skipped: &[String], methods: Vec<Method>, noise: Option<f64>) -> Result<Self> {
        let plan = SplitPlan {
            seed: opts.seed,
            scheme: SplitScheme::KFold {
                k: opts.folds,
                repetitions: opts.repetitions,
            },
            stratified: true,
        };
        let cv = CvOptions {
            noise_rate: noise,
            standardize: true,
        };
        let mut runs = Vec::new();
        for (_, d) in loaded {
            runs.push(cross_validate_many(d, &plan, &methods, &opts.settings, &cv)?);
        }
        Ok(Self {
            names: loaded.iter().map(|(n, _)| n.clone()).collect(),
            skipped: skipped.to_vec(),
            data: loaded.iter().map(|(_, d)| d.clone()).collect(),
            methods,
            runs,
        })
    }

    fn report(&self, ds: usize, m: Method) -> Option<&CvReport> {
        let j = self.methods.iter().position(|&x| x == m)?;
        self.runs.get(ds).map(|r| &r[j])
    }

    fn column(&self, label: &str, m: Method, f: impl Fn(&CvReport) -> Option<f64>, reference: Option<&[f64; 4]>) -> Column {
        Column {
            label: label.into(),
            ours: (0..self.names.len()).map(|i| self.report(i, m).and_then(&f)).collect(),
            reference: self.names.iter().map(|n| reference.and_then(|t| reference_for(n, t))).collect(),
        }
    }

    fn pooled(&self, a: Method, b: Method) -> Option<McNemar> {
        let mut pairs = Vec::new();
        for i in 0..self.names.len() {
            let (ra, rb) = (self.report(i, a)?, self.report(i, b)?);
            pairs.extend(paired_contingency(ra, rb, &self.data[i]).ok()?);
        }
        pooled_mcnemar(&pairs).ok()
    }

    fn table(&self, id: TableId, columns: Vec<Column>, statistics: Vec<Statistic>, bands: Vec<Band>) -> TableResult {
        TableResult {
            id,
            title: id.title().into(),
            datasets: self.names.clone(),
            columns,
            statistics,
            bands,
            skipped: self.skipped.clone(),
            reports: self.names.iter().cloned().zip(self.runs.iter().cloned()).collect(),
        }
    }
}

fn missing(name: &str, what: &str) -> Band {
    Band {
        name: name.into(),
        passed: false,
        detail: format!("no result for {what}"),
    }
}

/// One band per dataset; a required dataset without a value
/// fails the band.
fn per_dataset(datasets: &[&str], name: &str, check: impl Fn(&str) -> Option<(bool, String)>) -> Vec<Band> {
    datasets
        .iter()
        .map(|&d| match check(d) {
            Some((passed, detail)) => Band {
                name: format!("{name} ({d})"),
                passed,
                detail,
            },
            None => missing(&format!("{name} ({d})"), d),
        })
        .collect()
}

const LR_ERR: &str = "LR err%";
const SLA_ERR: &str = "SLA err%";
const B2_ERR: &str = "BBLR2 err%";
const B3_ERR: &str = "BBLR3 err%";
const B4_ERR: &str = "BBLR4 err%";
const LR_SUM: &str = "LR 0-1";
const SLA_SUM: &str = "SLA 0-1";
const B2_SUM: &str = "BBLR2 0-1";
const B3_SUM: &str = "BBLR3 0-1";
const K_ERR: &str = "KBBLR err%";
const SK_ERR: &str = "sparse KBBLR err%";
const SK_SV: &str = "sparse KBBLR support";
const K_SV: &str = "KBBLR support";

fn train01(opts: &TableOptions) -> Result<TableResult> {
    let (loaded, skipped) = load_all(opts);
    let methods = [Method::Lr, Method::Bblr1, Method::SlaSigmoid, Method::Bblr2];
    let settings = MethodSettings {
        fixed_lambda: Some(opts.settings.fixed_lambda.unwrap_or(TRAIN_TABLE_LAMBDA)),
        ..opts.settings.clone()
    };
    let mut values: Vec<Vec<Option<f64>>> = vec![Vec::new(); methods.len()];
    for (_, d) in &loaded {
        let d = Scaler::fit(d)?.transform(d)?;
        for (j, r) in fit_methods(&methods, &d, &settings, opts.seed).into_iter().enumerate() {
            let v = r
                .and_then(|t| t.predict(&d))
                .and_then(|p| zero_one_total(&p, d.labels()))
                .ok()
                .map(|e| e as f64);
            values[j].push(v);
        }
    }
    let names: Vec<String> = loaded.iter().map(|(n, _)| n.clone()).collect();
    let refs = [reference::TRAIN_LR, reference::TRAIN_BBLR1, reference::TRAIN_SLA, reference::TRAIN_BBLR2];
    let labels = ["LR", "BBLR1", "SLA", "BBLR2"];
    let columns = labels
        .iter()
        .zip(values)
        .zip(refs)
        .map(|((l, ours), r)| Column {
            label: l.to_string(),
            ours,
            reference: names.iter().map(|n| reference_for(n, &r)).collect(),
        })
        .collect();
    let mut t = TableResult {
        id: TableId::Train01,
        title: TableId::Train01.title().into(),
        datasets: names,
        columns,
        statistics: Vec::new(),
        bands: Vec::new(),
        skipped,
        reports: Vec::new(),
    };
    let mut bands = per_dataset(&UCI_DATASETS, "BBLR2 training 0-1 <= LR", |d| {
        let (b, l) = (t.value("BBLR2", d)?, t.value("LR", d)?);
        Some((b <= l, format!("{b} vs {l}")))
    });
    let total: Option<f64> = UCI_DATASETS.iter().map(|d| t.value("BBLR2", d)).sum();
    bands.push(match total {
        Some(s) => Band {
            name: "BBLR2 total training 0-1".into(),
            passed: s <= bands::TRAIN_TOTAL_MAX,
            detail: format!("{s} <= {}", bands::TRAIN_TOTAL_MAX),
        },
        None => missing("BBLR2 total training 0-1", "all four datasets"),
    });
    t.bands = bands;
    Ok(t)
}

fn linear_columns(p: &Protocol, noisy: bool) -> Vec<Column> {
    use reference as r;
    let err = |c: &CvReport| c.mean_error_percent();
    let sum = |c: &CvReport| c.mean_zero_one();
    let (e, s) = if noisy {
        (
            [r::NOISY_LR, r::NOISY_SLA, r::NOISY_BBLR2, r::NOISY_BBLR3, r::NOISY_BBLR4],
            [r::NOISY_SUM_LR, r::NOISY_SUM_SLA, r::NOISY_SUM_BBLR2, r::NOISY_SUM_BBLR3],
        )
    } else {
        (
            [r::CLEAN_LR, r::CLEAN_SLA, r::CLEAN_BBLR2, r::CLEAN_BBLR3, r::CLEAN_BBLR4],
            [r::CLEAN_SUM_LR, r::CLEAN_SUM_SLA, r::CLEAN_SUM_BBLR2, r::CLEAN_SUM_BBLR3],
        )
    };
    vec![
        p.column(LR_ERR, Method::Lr, err, Some(&e[0])),
        p.column(SLA_ERR, Method::SlaSigmoid, err, Some(&e[1])),
        p.column(B2_ERR, Method::Bblr2, err, Some(&e[2])),
        p.column(B3_ERR, Method::Bblr3, err, Some(&e[3])),
        p.column(B4_ERR, Method::Bblr4, err, Some(&e[4])),
        p.column(LR_SUM, Method::Lr, sum, Some(&s[0])),
        p.column(SLA_SUM, Method::SlaSigmoid, sum, Some(&s[1])),
        p.column(B2_SUM, Method::Bblr2, sum, Some(&s[2])),
        p.column(B3_SUM, Method::Bblr3, sum, Some(&s[3])),
    ]
}

const LINEAR_METHODS: [Method; 5] = [Method::Lr, Method::SlaSigmoid, Method::Bblr2, Method::Bblr3, Method::Bblr4];

fn clean_table(p: &Protocol) -> TableResult {
    let stats = vec![Statistic {
        name: "pooled McNemar, BBLR3 vs LR".into(),
        test: p.pooled(Method::Lr, Method::Bblr3),
        reference: Some(reference::MCNEMAR_CLEAN_VS_LR),
    }];
    let mut t = p.table(TableId::CleanCv, linear_columns(p, false), stats, Vec::new());
    let mut bands = per_dataset(&UCI_DATASETS, "BBLR3 error within 2pp of reference", |d| {
        let v = t.value(B3_ERR, d)?;
        let r = reference_for(d, &reference::CLEAN_BBLR3)?;
        Some(((v - r).abs() <= bands::CLEAN_TOLERANCE, format!("{v:.2} vs {r:.1}")))
    });
    let totals = |label: &str| -> Option<f64> { UCI_DATASETS.iter().map(|d| t.value(label, d)).sum() };
    bands.push(match (totals(B3_SUM), totals(LR_SUM)) {
        (Some(b), Some(l)) => Band {
            name: "BBLR3 total 0-1 <= LR total".into(),
            passed: b <= l,
            detail: format!("{b:.1} vs {l:.1}"),
        },
        _ => missing("BBLR3 total 0-1 <= LR total", "all four datasets"),
    });
    t.bands = bands;
    t
}

fn noisy_table(p: &Protocol) -> TableResult {
    let stats = vec![Statistic {
        name: "pooled McNemar, BBLR3 vs LR".into(),
        test: p.pooled(Method::Lr, Method::Bblr3),
        reference: Some(reference::MCNEMAR_NOISY_VS_LR),
    }];
    let mut t = p.table(TableId::NoisyCv, linear_columns(p, true), stats, Vec::new());
    let mut bands = Vec::new();
    for (d, margin) in [("liver", bands::NOISY_LIVER_MARGIN), ("pima", bands::NOISY_PIMA_MARGIN)] {
        bands.extend(per_dataset(&[d], &format!("BBLR3 beats LR by >= {margin}pp"), |d| {
            let (b, l) = (t.value(B3_ERR, d)?, t.value(LR_ERR, d)?);
            Some((l - b >= margin, format!("LR {l:.2} - BBLR3 {b:.2} = {:.2}", l - b)))
        }));
    }
    bands.extend(per_dataset(&UCI_DATASETS, "BBLR4 <= BBLR3 + 0.5pp", |d| {
        let (b4, b3) = (t.value(B4_ERR, d)?, t.value(B3_ERR, d)?);
        Some((b4 <= b3 + bands::BBLR4_SLACK, format!("{b4:.2} vs {b3:.2}")))
    }));
    t.bands = bands;
    t
}

fn kernel_table(p: &Protocol) -> TableResult {
    let err = |c: &CvReport| c.mean_error_percent();
    let mut t = p.table(
        TableId::KernelCompare,
        vec![p.column(K_ERR, Method::Kbblr, err, Some(&reference::KERNEL_KBBLR))],
        Vec::new(),
        Vec::new(),
    );
    t.bands = per_dataset(&UCI_DATASETS, "KBBLR error within 2.5pp of reference", |d| {
        let v = t.value(K_ERR, d)?;
        let r = reference_for(d, &reference::KERNEL_KBBLR)?;
        Some(((v - r).abs() <= bands::KERNEL_TOLERANCE, format!("{v:.2} vs {r:.2}")))
    });
    t
}

fn sparse_table(p: &Protocol) -> TableResult {
    let err = |c: &CvReport| c.mean_error_percent();
    let sv = |c: &CvReport| c.mean_support();
    let mut t = p.table(
        TableId::SparseKernel,
        vec![
            p.column(SK_ERR, Method::SparseKbblr, err, Some(&reference::SPARSE_KBBLR)),
            p.column(SK_SV, Method::SparseKbblr, sv, Some(&reference::SPARSE_SUPPORT)),
            p.column(K_ERR, Method::Kbblr, err, Some(&reference::KERNEL_KBBLR)),
            p.column(K_SV, Method::Kbblr, sv, None),
        ],
        Vec::new(),
        Vec::new(),
    );
    t.bands = per_dataset(&["heart", "liver"], "sparse support < 0.5 x L2 support", |d| {
        let (s, l) = (t.value(SK_SV, d)?, t.value(K_SV, d)?);
        Some((s < bands::SPARSE_RATIO * l, format!("{s:.1} vs {l:.1}")))
    });
    t
}

/// Runs the protocols behind `ids` and builds each table. Tables sharing a
/// protocol share its cross-validation run.
pub fn reproduce_tables(ids: &[TableId], opts: &TableOptions) -> Result<Vec<TableResult>> {
    opts.settings.validate()?;
    let (loaded, skipped) = load_all(opts);
    let wants = |t: TableId| ids.contains(&t);

    let mut clean_methods = Vec::new();
    if wants(TableId::CleanCv) {
        clean_methods.extend(LINEAR_METHODS);
    }
    if wants(TableId::KernelCompare) || wants(TableId::SparseKernel) {
        clean_methods.push(Method::Kbblr);
    }
    if wants(TableId::SparseKernel) {
        clean_methods.push(Method::SparseKbblr);
    }
    let clean = if clean_methods.is_empty() {
        None
    } else {
        Some(Protocol::run(opts, &loaded, &skipped, clean_methods, None)?)
    };
    let noisy = if wants(TableId::NoisyCv) {
        Some(Protocol::run(opts, &loaded, &skipped, LINEAR_METHODS.to_vec(), Some(opts.noise_rate))?)
    } else {
        None
    };

    let mut out = Vec::new();
    for &id in ids {
        out.push(match id {
            TableId::Train01 => train01(opts)?,
            TableId::CleanCv => clean_table(clean.as_ref().expect("clean protocol ran")),
            TableId::NoisyCv => noisy_table(noisy.as_ref().expect("noisy protocol ran")),
            TableId::KernelCompare => kernel_table(clean.as_ref().expect("clean protocol ran")),
            TableId::SparseKernel => sparse_table(clean.as_ref().expect("clean protocol ran")),
        });
    }
    Ok(out)
}

pub fn reproduce_table(id: TableId, opts: &TableOptions) -> Result<TableResult> {
    Ok(reproduce_tables(&[id], opts)?.remove(0))
}
