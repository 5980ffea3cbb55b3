//! Shared state for a run: configuration, the generic pair, generator images
//! (optionally backed by the disk cache), memoized relation spaces and counters.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::cache::{CacheError, CacheStats, CacheStore};
use crate::genmat::{varset, EvalError, GenericPair};
use crate::glcat::{catalog, AbsGen, Catalog, Partition};
use crate::hwv::DEFAULT_DEGREE_CAP;
use crate::images::GeneratorImages;
use crate::nullspace::StreamMode;
use crate::relfinder::RelationSpace;

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub degree_cap: u32,
    pub mode: StreamMode,
    /// `None` picks [`crate::hwv::default_blocked`].
    pub blocked: Option<bool>,
    pub cache_dir: Option<PathBuf>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { degree_cap: DEFAULT_DEGREE_CAP, mode: StreamMode::modular(), blocked: None, cache_dir: None }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct EngineStats {
    /// Words multiplied out on the generic matrices.
    pub word_evals: u64,
    /// Generator images evaluated (not loaded from the cache).
    pub image_evals: u64,
    /// ζ-systems assembled from evaluated images.
    pub system_evals: u64,
    pub cache: Option<CacheStats>,
}

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Cache(#[from] CacheError),
}

pub struct Engine {
    cfg: EngineConfig,
    cat: &'static Catalog,
    pair: GenericPair,
    cache: Option<CacheStore>,
    images: Mutex<Option<Arc<GeneratorImages>>>,
    pub(crate) spaces: Mutex<BTreeMap<Partition, Arc<RelationSpace>>>,
    image_evals: AtomicU64,
    pub(crate) system_evals: AtomicU64,
}

impl Engine {
    pub fn new(cfg: EngineConfig) -> Result<Self, EngineError> {
        let cache = cfg.cache_dir.as_ref().map(CacheStore::open).transpose()?;
        Ok(Engine {
            cfg,
            cat: catalog(),
            pair: GenericPair::new(),
            cache,
            images: Mutex::new(None),
            spaces: Mutex::new(BTreeMap::new()),
            image_evals: AtomicU64::new(0),
            system_evals: AtomicU64::new(0),
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn catalog(&self) -> &'static Catalog {
        self.cat
    }

    pub fn pair(&self) -> &GenericPair {
        &self.pair
    }

    pub fn cache(&self) -> Option<&CacheStore> {
        self.cache.as_ref()
    }

    pub fn stats(&self) -> EngineStats {
        EngineStats {
            word_evals: self.pair.word_evaluations(),
            image_evals: self.image_evals.load(Ordering::Relaxed),
            system_evals: self.system_evals.load(Ordering::Relaxed),
            cache: self.cache.as_ref().map(CacheStore::stats),
        }
    }

    /// `f()`, stored as JSON under `key` when a cache is configured.
    pub fn memo_json<T, E>(&self, key: &str, f: impl FnOnce() -> Result<T, E>) -> Result<T, E>
    where
        T: serde::Serialize + serde::de::DeserializeOwned,
        E: From<CacheError>,
    {
        let Some(cache) = &self.cache else {
            return f();
        };
        if let Some(v) = cache.get_json(key).and_then(|v| serde_json::from_value(v).ok()) {
            return Ok(v);
        }
        let v = f()?;
        cache.put_json(key, &serde_json::to_value(&v).expect("serializable"))?;
        Ok(v)
    }

    /// Cache key of the image of `g`; it names the basis element it evaluates.
    pub fn image_key(&self, g: AbsGen) -> String {
        format!("genimage:v1:{}:{}", g.index(), self.cat.basis_expr(g).to_grammar())
    }

    /// `eval(e_g)` for all generators, computed once per engine.
    pub fn images(&self) -> Result<Arc<GeneratorImages>, EngineError> {
        let mut slot = self.images.lock().expect("images lock");
        if let Some(imgs) = slot.as_ref() {
            return Ok(imgs.clone());
        }
        let vars = varset();
        let polys = AbsGen::all()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|g| -> Result<_, EngineError> {
                let key = self.image_key(g);
                if let Some(p) = self.cache.as_ref().and_then(|c| c.get_poly(&key, &vars)) {
                    return Ok(p);
                }
                let p = self.pair.eval_trace_expr(self.cat.basis_expr(g))?;
                self.image_evals.fetch_add(1, Ordering::Relaxed);
                if let Some(c) = &self.cache {
                    c.put_poly(&key, &p)?;
                }
                Ok(p)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let imgs = Arc::new(GeneratorImages::from_polys(polys));
        *slot = Some(imgs.clone());
        Ok(imgs)
    }
}
