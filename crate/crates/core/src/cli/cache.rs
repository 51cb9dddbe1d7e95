//! Content-addressed on-disk cache of eigen-solutions.
//!
//! One JSON file per request, named by the SHA-256 of a canonical key that
//! includes the discretisation version. Entries are written to a temporary
//! file in the same directory and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::eigensolver::{EigenRequest, EigenSolution, SolverSettings, SCHEME_VERSION};
use crate::qsl::{DirectSolver, EigenSource};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey {
    canonical: String,
}

impl CacheKey {
    pub fn new(req: &EigenRequest, settings: &SolverSettings) -> Self {
        let canonical = format!(
            "landau-qsl/eigen/v{SCHEME_VERSION}/n={:016x}/b0={:016x}/spin={}/m={}/levels={}/tol={:016x}/cells={}/refine={}/domain={:016x}/tail={:016x}/grow={}/partial={}",
            req.field.n().to_bits(),
            req.field.b0().to_bits(),
            req.spin,
            req.m,
            req.levels,
            req.tol.to_bits(),
            settings.initial_cells,
            settings.max_refinements,
            settings.domain_factor.to_bits(),
            settings.tail_threshold.to_bits(),
            settings.max_domain_doublings,
            settings.allow_unconverged,
        );
        Self { canonical }
    }

    pub fn canonical(&self) -> &str {
        &self.canonical
    }

    pub fn digest(&self) -> String {
        Sha256::digest(self.canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct Entry {
    scheme_version: u32,
    key: String,
    solution: EigenSolution,
}

/// Eigen source that consults a cache directory before solving.
#[derive(Debug)]
pub struct CachedSolver {
    dir: Option<PathBuf>,
    inner: DirectSolver,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl CachedSolver {
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Self {
            dir,
            inner: DirectSolver::default(),
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
        })
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> usize {
        self.misses.load(Ordering::Relaxed)
    }

    fn path_for(dir: &Path, key: &CacheKey) -> PathBuf {
        dir.join(format!("{}.json", key.digest()))
    }

    fn load(path: &Path, key: &CacheKey) -> Option<EigenSolution> {
        let bytes = fs::read(path).ok()?;
        let entry: Entry = serde_json::from_slice(&bytes).ok()?;
        (entry.scheme_version == SCHEME_VERSION && entry.key == key.canonical).then_some(entry.solution)
    }

    fn store(dir: &Path, path: &Path, key: &CacheKey, sol: &EigenSolution) -> Result<()> {
        let entry = Entry {
            scheme_version: SCHEME_VERSION,
            key: key.canonical.clone(),
            solution: sol.clone(),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        serde_json::to_writer(&mut tmp, &entry)?;
        tmp.flush()?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }
}

impl EigenSource for CachedSolver {
    fn solve(&self, req: &EigenRequest) -> Result<EigenSolution> {
        let Some(dir) = &self.dir else {
            return self.inner.solve(req);
        };
        let key = CacheKey::new(req, &self.inner.settings);
        let path = Self::path_for(dir, &key);
        if let Some(sol) = Self::load(&path, &key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(sol);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let sol = self.inner.solve(req)?;
        Self::store(dir, &path, &key, &sol)?;
        Ok(sol)
    }
}
