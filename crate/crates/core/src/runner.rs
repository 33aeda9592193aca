//! Experiment driver: configuration, validation, seeded stage pipeline,
//! atomic output files and the run report.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bundle::{trivial_bundle, AssignMode, CharacteristicClass, PrincipalBundle, SlotsJson};
use crate::complex::{fixtures, ComplexSpec, PointCloud, SimplicialComplex};
use crate::connection::{curvature_rows, holonomy_set, write_curvature_csv, Connection, ConnectionJson};
use crate::dynamics::{
    anneal_spins, apply_obstruction_trigger, evolve, frustrated_plaquettes, generate_network, ground_states,
    ising_couplings_connection, optimize_connection, sample_field, write_network_csv, Couplings, DistributionSpec,
    EvolveConfig, Functional, Gaussian, MaterialField, NetworkModel, ObstructionTrigger, OptimizerConfig, PathFamily,
    SpinAnnealConfig,
};
use crate::error::{Error, Result};
use crate::group::{GaugeGroup, GroupSpec};
use crate::smith::{simplicial_homology, HomologyDescriptor};
use crate::stats::{cumulants, raw_moments, read_samples_csv};

/// Where the base complex comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComplexSource {
    Inline { vertex_count: usize, maximal_simplices: Vec<Vec<usize>> },
    File { path: PathBuf },
    Fixture {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
    Rips { points: PathBuf, radius: f64, max_dim: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BundleKind {
    #[default]
    Trivial,
    Random,
    File,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BundleSection {
    pub kind: BundleKind,
    pub dims: Vec<usize>,
    pub density: f64,
    pub classes: Vec<i64>,
    pub mode: AssignMode,
    pub random_frames: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slots: Option<PathBuf>,
}

impl Default for BundleSection {
    fn default() -> Self {
        BundleSection {
            kind: BundleKind::Trivial,
            dims: vec![1],
            density: 0.0,
            classes: vec![1],
            mode: AssignMode::Free,
            random_frames: false,
            slots: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectionInit {
    #[default]
    Identity,
    Random,
    File,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConnectionSection {
    pub init: ConnectionInit,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    pub distribution: DistributionSpec,
    /// JSON `{"values": {"vertex": [..]}}`; sampled from the distribution when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    #[default]
    Static,
    Probability,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    pub family: PathFamily,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HolonomySection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<usize>,
    pub max_len: usize,
    pub product_depth: usize,
}

impl Default for HolonomySection {
    fn default() -> Self {
        HolonomySection { base: None, max_len: 6, product_depth: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingEntry {
    pub edge: [usize; 2],
    pub j: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IsingSection {
    /// Coupling on every edge not listed in `couplings`.
    pub uniform: i8,
    pub couplings: Vec<CouplingEntry>,
    pub anneal: SpinAnnealConfig,
    pub runs: usize,
}

impl Default for IsingSection {
    fn default() -> Self {
        IsingSection { uniform: -1, couplings: Vec::new(), anneal: SpinAnnealConfig::default(), runs: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveSection {
    pub steps: usize,
    pub config: EvolveConfig,
}

impl Default for EvolveSection {
    fn default() -> Self {
        EvolveSection { steps: 10, config: EvolveConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsSection {
    pub samples: PathBuf,
    #[serde(default = "default_order")]
    pub max_order: usize,
}

fn default_order() -> usize {
    4
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Homology,
    Classes,
    Trigger,
    Optimize,
    Holonomy,
    Curvature,
    Network,
    Ising,
    Evolve,
    Stats,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Homology => "homology",
            Stage::Classes => "classes",
            Stage::Trigger => "trigger",
            Stage::Optimize => "optimize",
            Stage::Holonomy => "holonomy",
            Stage::Curvature => "curvature",
            Stage::Network => "network",
            Stage::Ising => "ising",
            Stage::Evolve => "evolve",
            Stage::Stats => "stats",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub complex: ComplexSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(default)]
    pub bundle: BundleSection,
    #[serde(default)]
    pub connection: ConnectionSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSection>,
    #[serde(default)]
    pub functional: FunctionalKind,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub holonomy: HolonomySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trigger: Option<ObstructionTrigger>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ising: Option<IsingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<StatsSection>,
    pub stages: Vec<Stage>,
    #[serde(default)]
    pub output: OutputSection,
}

fn cfg_err<T>(path: &str, msg: impl Into<String>) -> Result<T> {
    Err(Error::Config { path: path.to_string(), msg: msg.into() })
}

/// Parse JSON, reporting the failing location as a JSON path.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let p = e.path().to_string();
        Error::Config { path: if p == "." || p == "?" { "$".into() } else { format!("$.{}", p) }, msg: e.inner().to_string() }
    })
}

pub fn read_json_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    parse_json(&text).map_err(|e| match e {
        Error::Config { path: p, msg } => Error::Config { path: format!("{}: {}", path.display(), p), msg },
        other => other,
    })
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        read_json_file(path)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn resolve(&self, base: &Path, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    }

    /// Reject inconsistent configurations before any computation.
    pub fn validate(&self, base: &Path) -> Result<()> {
        let exists = |p: &Path, at: &str| -> Result<()> {
            let r = self.resolve(base, p);
            if r.exists() {
                Ok(())
            } else {
                cfg_err(at, format!("file {} does not exist", r.display()))
            }
        };
        match &self.complex {
            ComplexSource::File { path } => exists(path, "$.complex.path")?,
            ComplexSource::Rips { points, radius, .. } => {
                exists(points, "$.complex.points")?;
                if !(*radius >= 0.0) {
                    return cfg_err("$.complex.radius", "radius must be non-negative");
                }
            }
            ComplexSource::Fixture { name, n } => {
                if fixture(name, *n).is_none() {
                    return cfg_err("$.complex.name", format!("unknown fixture {:?} or missing size", name));
                }
            }
            ComplexSource::Inline { .. } => {}
        }
        let group = match &self.group {
            Some(g) => Some(GaugeGroup::from_spec(g).or_else(|e| cfg_err("$.group", e.to_string()))?),
            None => None,
        };
        if self.stages.is_empty() {
            return cfg_err("$.stages", "at least one stage is required");
        }
        if self.bundle.kind == BundleKind::File {
            match &self.bundle.slots {
                Some(p) => exists(p, "$.bundle.slots")?,
                None => return cfg_err("$.bundle.slots", "file bundle needs a slots path"),
            }
        }
        if !(0.0..=1.0).contains(&self.bundle.density) {
            return cfg_err("$.bundle.density", "density must lie in [0, 1]");
        }
        if self.connection.init == ConnectionInit::File {
            match &self.connection.path {
                Some(p) => exists(p, "$.connection.path")?,
                None => return cfg_err("$.connection.path", "file connection needs a path"),
            }
        }
        if let Some(f) = &self.field {
            if let Err(e) = Gaussian::from_spec(&f.distribution) {
                return cfg_err("$.field.distribution", e.to_string());
            }
            if let Some(g) = &group {
                if f.distribution.covariance.len() != g.rep_dim {
                    return cfg_err(
                        "$.field.distribution.covariance",
                        format!("dimension {} differs from representation dimension {}", f.distribution.covariance.len(), g.rep_dim),
                    );
                }
            }
            if let Some(p) = &f.path {
                exists(p, "$.field.path")?;
            }
        }
        if let Some(s) = &self.stats {
            exists(&s.samples, "$.stats.samples")?;
            if s.max_order > crate::stats::MAX_ORDER {
                return cfg_err("$.stats.max_order", "order above 4");
            }
        }
        for (i, st) in self.stages.iter().enumerate() {
            let at = format!("$.stages[{}]", i);
            let need_group = matches!(
                st,
                Stage::Classes | Stage::Trigger | Stage::Optimize | Stage::Holonomy | Stage::Curvature | Stage::Network | Stage::Evolve
            );
            if need_group && group.is_none() {
                return cfg_err(&at, format!("stage {} needs $.group", st.name()));
            }
            let need_field = matches!(st, Stage::Optimize | Stage::Network | Stage::Evolve);
            if need_field && self.field.is_none() {
                return cfg_err(&at, format!("stage {} needs $.field", st.name()));
            }
            match st {
                Stage::Trigger if self.trigger.is_none() => return cfg_err(&at, "stage trigger needs $.trigger"),
                Stage::Stats if self.stats.is_none() => return cfg_err(&at, "stage stats needs $.stats"),
                Stage::Network if self.network.is_none() => return cfg_err(&at, "stage network needs $.network"),
                _ => {}
            }
        }
        Ok(())
    }
}

/// Deterministic per-stage seed: splitmix64 of the global seed and the stage counter.
pub fn stage_seed(global: u64, counter: u64) -> u64 {
    let mut z = global ^ counter.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fixture(name: &str, n: Option<usize>) -> Option<SimplicialComplex> {
    Some(match (name, n) {
        ("triangle", _) => fixtures::triangle(),
        ("hollow_triangle", _) => fixtures::hollow_triangle(),
        ("tetrahedron_boundary", _) => fixtures::tetrahedron_boundary(),
        ("torus7", _) => fixtures::torus7(),
        ("two_triangles", _) => fixtures::two_triangles(),
        ("circle", Some(n)) if n >= 3 => fixtures::circle(n),
        ("grid_torus", Some(n)) if n >= 3 => fixtures::grid_torus(n),
        ("disc_fan", Some(n)) if n >= 3 => fixtures::disc_fan(n),
        _ => return None,
    })
}

pub fn load_complex(src: &ComplexSource, base: &Path) -> Result<SimplicialComplex> {
    let rel = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
    match src {
        ComplexSource::Inline { vertex_count, maximal_simplices } => {
            SimplicialComplex::from_maximal_simplices(*vertex_count, maximal_simplices)
        }
        ComplexSource::File { path } => SimplicialComplex::from_spec(&read_json_file::<ComplexSpec>(&rel(path))?),
        ComplexSource::Fixture { name, n } => {
            fixture(name, *n).ok_or_else(|| Error::Config { path: "$.complex.name".into(), msg: format!("unknown fixture {}", name) })
        }
        ComplexSource::Rips { points, radius, max_dim } => {
            SimplicialComplex::build_vietoris_rips(&PointCloud::from_csv_path(&rel(points))?, *radius, *max_dim)
        }
    }
}

/// Write via a temporary sibling and rename, so readers never see partial files.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HolonomySummary {
    pub base: usize,
    pub elements: usize,
    pub max_distance_to_identity: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CurvatureSummary {
    pub rows: usize,
    pub flat_trace: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NetworkSummary {
    pub pairs: usize,
    pub sampled: usize,
    pub mean_probability: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IsingSummary {
    pub frustrated_plaquettes: usize,
    pub ground_energy: Option<i64>,
    pub ground_degeneracy: Option<usize>,
    pub annealed_energies: Vec<i64>,
}

/// Results of a run. Timings live in a separate list so result files are
/// reproducible byte for byte.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunReport {
    #[serde(skip)]
    pub timings: Vec<StageTiming>,
    pub stages: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub homology: Option<Vec<HomologyDescriptor>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<CharacteristicClass>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raised_slots: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<HolonomySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature: Option<CurvatureSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ising: Option<IsingSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evolve_final_probability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cumulants: Option<Value>,
    /// Output files written, relative to the output directory.
    pub files: Vec<String>,
}

impl RunReport {
    pub fn timings_json(&self) -> Value {
        serde_json::to_value(&self.timings).expect("timings serialize")
    }
}

/// Mutable state threaded through the stages.
pub struct Pipeline {
    pub config: ExperimentConfig,
    pub base: PathBuf,
    pub complex: SimplicialComplex,
    pub group: Option<GaugeGroup>,
    bundle: Option<PrincipalBundle>,
    connection: Option<Connection>,
    field: Option<MaterialField>,
    outputs: BTreeMap<String, Vec<u8>>,
}

impl Pipeline {
    pub fn new(config: ExperimentConfig, base: &Path) -> Result<Self> {
        config.validate(base)?;
        let complex = load_complex(&config.complex, base)?;
        let group = config.group.as_ref().map(GaugeGroup::from_spec).transpose()?;
        Ok(Pipeline { config, base: base.to_path_buf(), complex, group, bundle: None, connection: None, field: None, outputs: BTreeMap::new() })
    }

    fn rel(&self, p: &Path) -> PathBuf {
        self.config.resolve(&self.base, p)
    }

    fn seed(&self, label: u64) -> u64 {
        stage_seed(self.config.seed, label)
    }

    fn group(&self) -> Result<&GaugeGroup> {
        self.group.as_ref().ok_or_else(|| Error::Config { path: "$.group".into(), msg: "group required".into() })
    }

    pub fn bundle(&mut self) -> Result<&PrincipalBundle> {
        if self.bundle.is_none() {
            let g = self.group()?.clone();
            let sec = &self.config.bundle;
            let mut b = trivial_bundle(&self.complex, &g);
            if sec.random_frames {
                b = b.with_random_frames(&mut ChaCha8Rng::seed_from_u64(self.seed(1000)));
            }
            b = match sec.kind {
                BundleKind::Trivial => b,
                BundleKind::Random => b.assign_random(&sec.dims, sec.density, &sec.classes, sec.mode, self.seed(1001))?,
                BundleKind::File => {
                    let p = self.rel(sec.slots.as_ref().expect("validated"));
                    b.with_slots_json(&read_json_file::<SlotsJson>(&p)?)?
                }
            };
            self.bundle = Some(b);
        }
        Ok(self.bundle.as_ref().expect("just set"))
    }

    pub fn connection(&mut self) -> Result<&Connection> {
        if self.connection.is_none() {
            let seed = self.seed(1002);
            let init = self.config.connection.init;
            let path = self.config.connection.path.clone();
            let b = self.bundle()?.clone();
            let c = match init {
                ConnectionInit::Identity => Connection::identity(&b),
                ConnectionInit::Random => Connection::random(&b, &mut ChaCha8Rng::seed_from_u64(seed)),
                ConnectionInit::File => Connection::from_json(&b, &read_json_file::<ConnectionJson>(&self.rel(&path.expect("validated")))?)?,
            };
            self.connection = Some(c);
        }
        Ok(self.connection.as_ref().expect("just set"))
    }

    pub fn field(&mut self) -> Result<&MaterialField> {
        if self.field.is_none() {
            let sec = self.config.field.clone().ok_or_else(|| Error::Config { path: "$.field".into(), msg: "field required".into() })?;
            let f = match &sec.path {
                Some(p) => read_json_file::<MaterialField>(&self.rel(p))?,
                None => sample_field(&sec.distribution, &self.complex, self.seed(1003))?,
            };
            self.field = Some(f);
        }
        Ok(self.field.as_ref().expect("just set"))
    }

    fn distribution(&self) -> Result<Gaussian> {
        Gaussian::from_spec(&self.config.field.as_ref().expect("validated").distribution)
    }

    fn emit(&mut self, name: &str, bytes: Vec<u8>) {
        self.outputs.insert(name.to_string(), bytes);
    }

    fn emit_json<T: Serialize>(&mut self, name: &str, v: &T) {
        let mut s = serde_json::to_vec_pretty(v).expect("output serializes");
        s.push(b'\n');
        self.emit(name, s);
    }

    fn run_stage(&mut self, idx: usize, st: Stage, rep: &mut RunReport) -> Result<()> {
        let seed = self.seed(idx as u64);
        match st {
            Stage::Homology => {
                let top = self.complex.dim().unwrap_or(0);
                let h: Vec<HomologyDescriptor> = (0..=top).map(|k| simplicial_homology(&self.complex, k)).collect();
                self.emit_json("homology.json", &h);
                rep.homology = Some(h);
            }
            Stage::Classes => {
                let b = self.bundle()?.clone();
                let cls = b.characteristic_classes()?;
                self.emit_json("slots.json", &b.slots_json());
                self.emit_json("classes.json", &cls);
                rep.classes = Some(cls);
            }
            Stage::Trigger => {
                let b = self.bundle()?.clone();
                let conn = self.connection()?.clone();
                let trig = self.config.trigger.clone().expect("validated");
                let nb = apply_obstruction_trigger(&b, &conn, &trig, seed)?;
                let changed = nb.slots().iter().filter(|s| b.class(s.pair.0, s.pair.1, &s.face).map(|c| c != s.class).unwrap_or(true)).count();
                self.emit_json("slots.json", &nb.slots_json());
                self.connection = Some(Connection::from_home_values(&nb, &conn.home_values())?);
                self.bundle = Some(nb);
                rep.raised_slots = Some(changed);
            }
            Stage::Optimize => {
                let dist = self.distribution()?;
                let functional = match self.config.functional {
                    FunctionalKind::Static => Functional::Static(dist),
                    FunctionalKind::Probability => Functional::Probability(dist),
                };
                let field = self.field()?.clone();
                let init = self.connection()?.clone();
                let mut cfg = self.config.optimizer.clone();
                cfg.seed = seed;
                let res = optimize_connection(&functional, &field, &init, &cfg)?;
                let mut trace = Vec::new();
                for (i, f) in res.trace.iter().enumerate() {
                    serde_json::to_writer(&mut trace, &json!({"iter": i, "objective": f}))?;
                    trace.push(b'\n');
                }
                self.emit("trace.jsonl", trace);
                self.emit_json("connection.json", &res.connection.to_json());
                rep.final_objective = Some(res.objective);
                rep.converged = Some(res.converged);
                self.connection = Some(res.connection);
            }
            Stage::Holonomy => {
                let conn = self.connection()?.clone();
                let sec = self.config.holonomy.clone();
                let base = sec.base.or_else(|| self.complex.vertices().first().copied()).ok_or_else(|| Error::Input("empty complex".into()))?;
                let set = holonomy_set(&conn, base, sec.max_len, sec.product_depth)?;
                let g = conn.group();
                let elems: Vec<Value> = set.iter().map(|h| g.element_to_json(h)).collect();
                self.emit_json("holonomy.json", &json!({"base": base, "elements": elems}));
                rep.holonomy = Some(HolonomySummary {
                    base,
                    elements: set.len(),
                    max_distance_to_identity: set.iter().map(|h| g.distance_to_identity(h)).fold(0.0, f64::max),
                });
            }
            Stage::Curvature => {
                let conn = self.connection()?.clone();
                let mut buf = Vec::new();
                write_curvature_csv(&conn, &mut buf)?;
                self.emit("curvature.csv", buf);
                let rows = curvature_rows(&conn)?;
                rep.curvature = Some(CurvatureSummary {
                    rows: rows.len(),
                    flat_trace: conn.group().rep_dim as f64,
                    min: rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min),
                    max: rows.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max),
                });
            }
            Stage::Network => {
                let conn = self.connection()?.clone();
                let field = self.field()?.clone();
                let model = NetworkModel {
                    family: self.config.network.clone().expect("validated").family,
                    distribution: self.config.field.as_ref().expect("validated").distribution.clone(),
                };
                let links = generate_network(&conn, &field, &model, seed)?;
                let mut buf = Vec::new();
                write_network_csv(&links, &mut buf)?;
                self.emit("network.csv", buf);
                let n = links.len();
                rep.network = Some(NetworkSummary {
                    pairs: n,
                    sampled: links.iter().filter(|l| l.sampled).count(),
                    mean_probability: if n == 0 { 0.0 } else { links.iter().map(|l| l.probability).sum::<f64>() / n as f64 },
                });
            }
            Stage::Ising => {
                let sec = self.config.ising.clone().unwrap_or_default();
                let couplings = ising_couplings(&self.complex, &sec)?;
                let b = trivial_bundle(&self.complex, &GaugeGroup::cyclic(2));
                let conn = ising_couplings_connection(&b, &couplings)?;
                let frustrated = frustrated_plaquettes(&conn)?;
                let gs = if self.complex.vertex_count() <= 20 { Some(ground_states(&self.complex, &couplings)?) } else { None };
                let mut annealed = Vec::new();
                for r in 0..sec.runs {
                    annealed.push(anneal_spins(&self.complex, &couplings, &sec.anneal, stage_seed(seed, r as u64))?.0);
                }
                let summary = IsingSummary {
                    frustrated_plaquettes: frustrated.len(),
                    ground_energy: gs.map(|g| g.0),
                    ground_degeneracy: gs.map(|g| g.1),
                    annealed_energies: annealed,
                };
                self.emit_json("ising.json", &json!({"summary": summary, "frustrated": frustrated}));
                rep.ising = Some(summary);
            }
            Stage::Evolve => {
                let dist = self.distribution()?;
                let field = self.field()?.clone();
                let conn = self.connection()?.clone();
                let sec = self.config.evolve.clone().unwrap_or_default();
                let mut cfg = sec.config.clone();
                cfg.seed = seed;
                cfg.optimizer.seed = stage_seed(seed, 1);
                let traj = evolve(&field, &conn, &dist, sec.steps, &cfg)?;
                let mut buf = Vec::new();
                for s in &traj.steps {
                    serde_json::to_writer(&mut buf, s)?;
                    buf.push(b'\n');
                }
                self.emit("evolve.jsonl", buf);
                rep.evolve_final_probability = traj.steps.last().map(|s| s.probability_action);
                self.field = traj.steps.last().map(|s| s.field.clone());
                self.connection = Some(traj.connection);
            }
            Stage::Stats => {
                let sec = self.config.stats.clone().expect("validated");
                let samples = read_samples_csv(fs::File::open(self.rel(&sec.samples))?)?;
                let m = raw_moments(&samples, sec.max_order)?;
                let k = cumulants(&m)?;
                let out = json!({"moments": m.to_json(), "cumulants": k.to_json()});
                self.emit_json("cumulants.json", &out);
                rep.cumulants = Some(k.to_json());
            }
        }
        Ok(())
    }

    /// Run every configured stage in order.
    pub fn run(&mut self) -> Result<RunReport> {
        let mut rep = RunReport::default();
        for (i, st) in self.config.stages.clone().into_iter().enumerate() {
            let t = Instant::now();
            self.run_stage(i, st, &mut rep)?;
            rep.stages.push(st.name().to_string());
            rep.timings.push(StageTiming { stage: st.name().to_string(), seconds: t.elapsed().as_secs_f64() });
        }
        rep.files = self.outputs.keys().cloned().collect();
        Ok(rep)
    }

    /// Emitted files by name.
    pub fn outputs(&self) -> &BTreeMap<String, Vec<u8>> {
        &self.outputs
    }
}

pub fn ising_couplings(c: &SimplicialComplex, sec: &IsingSection) -> Result<Couplings> {
    let mut out: Couplings = c.simplices(1).iter().map(|e| ((e[0], e[1]), sec.uniform)).collect();
    for ce in &sec.couplings {
        let k = (ce.edge[0].min(ce.edge[1]), ce.edge[0].max(ce.edge[1]));
        if !out.contains_key(&k) {
            return Err(Error::Config { path: "$.ising.couplings".into(), msg: format!("{:?} is not an edge", ce.edge) });
        }
        out.insert(k, ce.j);
    }
    Ok(out)
}

/// Validate, run and write outputs (report.json, timings.json and stage files)
/// to the configured output directory, if any.
pub fn run(config: &ExperimentConfig, base: &Path) -> Result<RunReport> {
    let mut p = Pipeline::new(config.clone(), base)?;
    let rep = p.run()?;
    if let Some(dir) = &config.output.dir {
        let dir = config.resolve(base, dir);
        for (name, bytes) in p.outputs() {
            write_atomic(&dir.join(name), bytes)?;
        }
        let mut r = serde_json::to_vec_pretty(&rep)?;
        r.push(b'\n');
        write_atomic(&dir.join("report.json"), &r)?;
        write_atomic(&dir.join("timings.json"), &serde_json::to_vec_pretty(&rep.timings_json())?)?;
    }
    Ok(rep)
}

/// Exit status for an error: 2 for usage and configuration problems, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::Json(_) => 2,
        _ => 1,
    }
}
