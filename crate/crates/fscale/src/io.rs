//! On-disk formats.
//!
//! A data directory holds:
//!
//! * `graph.tsv`: `child<TAB>parent` per line, `#` comments allowed;
//! * `messages.jsonl`: one message object per line;
//! * `cascades.jsonl`: one activation `{"m": id, "v": node, "t": seconds}` per
//!   line, grouped by message in any order;
//! * `profiles.jsonl`: `{"node", "verified", "account_created", "interest"}`;
//! * `manifest.json`: counts and the generator settings, if synthetic.
//!
//! Node ids in files are the external strings of `graph.tsv`.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use fscale_core::baselines::LrcqModel;
use fscale_core::pipeline::TrainedModel;
use fscale_core::{
    ActivationModel, Cascade, CascadeState, Corpus, Env, Event, Message, NodeId, Profiles, SocialGraph,
    Topology, UserProfile,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GRAPH_FILE: &str = "graph.tsv";
pub const MESSAGES_FILE: &str = "messages.jsonl";
pub const CASCADES_FILE: &str = "cascades.jsonl";
pub const PROFILES_FILE: &str = "profiles.jsonl";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub nodes: usize,
    pub edges: usize,
    pub messages: usize,
    pub events: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<serde_json::Value>,
}

/// Graph, corpus and profiles loaded together.
#[derive(Debug, Clone)]
pub struct DataSet {
    pub graph: SocialGraph,
    pub corpus: Corpus,
    pub profiles: Profiles,
    pub manifest: Manifest,
}

impl DataSet {
    pub fn env(&self) -> Env<'_> {
        Env::new(&self.graph, &self.corpus, &self.profiles)
    }

    pub fn cascade_index(&self, id: &str) -> Result<usize> {
        self.corpus
            .message_index(id)
            .ok_or_else(|| Error::Invalid(format!("unknown cascade `{id}`")))
    }
}

#[derive(Serialize, Deserialize)]
struct EventRecord {
    m: String,
    v: String,
    t: f64,
}

#[derive(Serialize, Deserialize)]
struct ProfileRecord {
    node: String,
    verified: bool,
    account_created: f64,
    interest: Option<Vec<f64>>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(Error::io(path))?))
}

fn read_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(Error::io(path))
}

/// Parses each non-blank line of a JSON-lines file.
fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(Error::io(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(Error::io(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

fn write_jsonl<T: Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = create(path)?;
    for item in items {
        serde_json::to_writer(&mut w, &item)?;
        w.write_all(b"\n").map_err(Error::io(path))?;
    }
    w.flush().map_err(Error::io(path))
}

fn node_of(g: &SocialGraph, ext: &str) -> Result<NodeId> {
    g.node(ext)
        .ok_or_else(|| Error::Core(fscale_core::Error::UnknownNode(ext.to_string())))
}

pub fn read_graph(path: &Path) -> Result<SocialGraph> {
    let text = read_string(path)?;
    let (g, _) = SocialGraph::parse_edge_list(&text).map_err(|e| match e {
        fscale_core::Error::Parse { line, msg } => Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        },
        other => other.into(),
    })?;
    Ok(g)
}

/// Reads activation records and groups them into cascades, sorted by time
/// (stable, so equal timestamps keep file order).
pub fn read_cascades(path: &Path, g: &SocialGraph) -> Result<Vec<Cascade>> {
    let records: Vec<EventRecord> = read_jsonl(path)?;
    let mut order: Vec<String> = Vec::new();
    let mut by_id: std::collections::HashMap<String, Vec<Event>> = Default::default();
    for r in records {
        let node = node_of(g, &r.v)?;
        by_id
            .entry(r.m.clone())
            .or_insert_with(|| {
                order.push(r.m.clone());
                Vec::new()
            })
            .push(Event { node, t: r.t });
    }
    Ok(order
        .into_iter()
        .map(|id| {
            let events = by_id.remove(&id).unwrap_or_default();
            let mut c = Cascade::new(id, events);
            c.sort();
            c
        })
        .collect())
}

pub fn write_cascades<'a>(path: &Path, g: &SocialGraph, cascades: impl IntoIterator<Item = &'a Cascade>) -> Result<()> {
    let recs = cascades.into_iter().flat_map(|c| {
        c.events.iter().map(move |e| EventRecord {
            m: c.message_id.clone(),
            v: g.external_id(e.node).to_string(),
            t: e.t,
        })
    });
    write_jsonl(path, recs)
}

pub fn read_profiles(path: &Path, g: &SocialGraph) -> Result<Profiles> {
    let records: Vec<ProfileRecord> = read_jsonl(path)?;
    let mut p = Profiles::new(g.len());
    for r in records {
        p.insert(UserProfile {
            node: node_of(g, &r.node)?,
            verified: r.verified,
            account_created: r.account_created,
            interest: r.interest,
        })?;
    }
    Ok(p)
}

pub fn write_profiles(path: &Path, g: &SocialGraph, profiles: &Profiles) -> Result<()> {
    write_jsonl(
        path,
        profiles.iter().map(|p| ProfileRecord {
            node: g.external_id(p.node).to_string(),
            verified: p.verified,
            account_created: p.account_created,
            interest: p.interest.clone(),
        }),
    )
}

pub fn read_dataset(dir: &Path) -> Result<DataSet> {
    let graph = read_graph(&dir.join(GRAPH_FILE))?;
    let messages: Vec<Message> = read_jsonl(&dir.join(MESSAGES_FILE))?;
    let cascades = read_cascades(&dir.join(CASCADES_FILE), &graph)?;
    let corpus = Corpus::new(graph.len(), messages, cascades)?;
    let mut profiles = read_profiles(&dir.join(PROFILES_FILE), &graph)?;
    if let Some(v) = graph.nodes().find(|&v| profiles.get(v).is_err()) {
        return Err(Error::Invalid(format!(
            "node `{}` has no profile",
            graph.external_id(v)
        )));
    }
    profiles.fill_interest_from_history(&corpus);
    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest = if manifest_path.exists() {
        serde_json::from_str(&read_string(&manifest_path)?)?
    } else {
        Manifest {
            nodes: graph.len(),
            edges: graph.edge_count(),
            messages: corpus.len(),
            events: corpus.cascades.iter().map(Cascade::len).sum(),
            generator: None,
        }
    };
    Ok(DataSet {
        graph,
        corpus,
        profiles,
        manifest,
    })
}

pub fn write_dataset(dir: &Path, data: &DataSet) -> Result<()> {
    fs::create_dir_all(dir).map_err(Error::io(dir))?;
    let gpath = dir.join(GRAPH_FILE);
    fs::write(&gpath, data.graph.to_edge_list()).map_err(Error::io(&gpath))?;
    write_jsonl(&dir.join(MESSAGES_FILE), &data.corpus.messages)?;
    write_cascades(&dir.join(CASCADES_FILE), &data.graph, &data.corpus.cascades)?;
    write_profiles(&dir.join(PROFILES_FILE), &data.graph, &data.profiles)?;
    write_json(&dir.join(MANIFEST_FILE), &data.manifest)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(Error::io(path))?;
    w.flush().map_err(Error::io(path))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&read_string(path)?)?)
}

/// Any model the engine can host, as stored in a model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelFile {
    Fscalecp(TrainedModel),
    Lrcq1(LrcqModel),
    Lrcq2(LrcqModel),
}

impl ModelFile {
    pub fn name(&self) -> &'static str {
        match self {
            ModelFile::Fscalecp(_) => "FScaleCP",
            ModelFile::Lrcq1(_) => "LRC-Q1",
            ModelFile::Lrcq2(_) => "LRC-Q2",
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let m: ModelFile = read_json(path)?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelFile::Fscalecp(m) => m.validate()?,
            ModelFile::Lrcq1(m) | ModelFile::Lrcq2(m) => {
                if m.classifier.dim() != 2 {
                    return Err(fscale_core::Error::DimensionMismatch {
                        expected: 2,
                        got: m.classifier.dim(),
                    }
                    .into());
                }
            }
        }
        Ok(())
    }
}

impl<G: Topology + ?Sized> ActivationModel<G> for ModelFile {
    fn activation_probability(
        &self,
        env: Env<'_, G>,
        state: &CascadeState,
        message: &Message,
        v: NodeId,
    ) -> fscale_core::Result<f64> {
        match self {
            ModelFile::Fscalecp(m) => m.activation_probability(env, state, message, v),
            ModelFile::Lrcq1(m) | ModelFile::Lrcq2(m) => m.activation_probability(env, state, message, v),
        }
    }
}

/// Writes the per-step trace of a simulation as CSV.
pub fn write_trace(path: &Path, trace: &[fscale_core::engine::StepRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["step", "n_susceptible", "n_update", "delta_t", "activations", "time"])?;
    for r in trace {
        w.write_record([
            r.step.to_string(),
            r.n_susceptible.to_string(),
            r.n_update.to_string(),
            r.delta_t.to_string(),
            r.activations.to_string(),
            r.time.to_string(),
        ])?;
    }
    w.flush().map_err(Error::io(path))
}

pub fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(Error::io(dir))?;
    }
    Ok(())
}
