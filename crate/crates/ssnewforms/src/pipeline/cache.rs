//! On-disk checkpoints: the 2-isogeny graph, block characteristic
//! polynomials, finished levels, and a manifest of the latter.

use super::record::SCHEMA_VERSION;
use crate::ssgraph::{graph_from_text, graph_to_text, Block, IsogenyAdjacency, SupersingularSet};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    /// Config fingerprint → completed levels.
    pub completed: BTreeMap<String, Vec<u64>>,
}

impl Cache {
    pub fn open(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Write through a temporary file so readers never see a torn file.
    fn write_atomic(&self, name: &str, data: &str) -> io::Result<()> {
        let tmp = self.path(&format!(".{name}.tmp"));
        fs::write(&tmp, data)?;
        fs::rename(tmp, self.path(name))
    }

    fn graph_name(p: u64, ell: u64) -> String {
        format!("graph_p{p}_l{ell}_v{SCHEMA_VERSION}.txt")
    }

    pub fn load_graph(&self, p: u64, ell: u64) -> Option<(SupersingularSet, IsogenyAdjacency)> {
        let text = fs::read_to_string(self.path(&Self::graph_name(p, ell))).ok()?;
        let (set, adj) = graph_from_text(&text).ok()?;
        (set.p == p && adj.ell == ell).then_some((set, adj))
    }

    pub fn store_graph(&self, set: &SupersingularSet, adj: &IsogenyAdjacency) -> io::Result<()> {
        self.write_atomic(&Self::graph_name(set.p, adj.ell), &graph_to_text(set, adj))
    }

    pub fn charpoly_name(p: u64, block: Block, seed: u64, nu_index: usize) -> String {
        let b = match block {
            Block::Plus => "plus",
            Block::Minus => "minus",
        };
        format!("charpoly_p{p}_{b}_s{seed}_n{nu_index}_v{SCHEMA_VERSION}.json")
    }

    pub fn level_name(p: u64, fingerprint: &str) -> String {
        format!("level_p{p}_{fingerprint}_v{SCHEMA_VERSION}.json")
    }

    pub fn load_json<T: DeserializeOwned>(&self, name: &str) -> Option<T> {
        serde_json::from_str(&fs::read_to_string(self.path(name)).ok()?).ok()
    }

    pub fn store_json<T: Serialize>(&self, name: &str, value: &T) -> io::Result<()> {
        self.write_atomic(name, &serde_json::to_string(value).map_err(io::Error::other)?)
    }

    pub fn manifest(&self) -> Manifest {
        self.load_json("manifest.json").filter(|m: &Manifest| m.version == SCHEMA_VERSION).unwrap_or(Manifest {
            version: SCHEMA_VERSION,
            completed: BTreeMap::new(),
        })
    }

    pub fn mark_completed(&self, fingerprint: &str, p: u64) -> io::Result<()> {
        let mut m = self.manifest();
        let levels = m.completed.entry(fingerprint.to_string()).or_default();
        if let Err(i) = levels.binary_search(&p) {
            levels.insert(i, p);
        }
        self.store_json("manifest.json", &m)
    }
}
