//! Per-level runs (graph → T_2 characteristic polynomial → lifts →
//! q-expansions → degree sieve) and ranges of levels.

pub mod cache;
pub mod hecke;
pub mod record;

pub use cache::Cache;
pub use hecke::{BlockHecke, LevelHecke};
pub use record::{
    BlockReport, LevelReport, NewformRecord, OrbitSummary, Provenance, SieveOutcome, StageFailure, SCHEMA_VERSION,
};

use crate::gf::{is_prime, primes_in, DensePoly, PrimeFieldCtx};
use crate::lift::candidates::MAX_DEGREE;
use crate::lift::{detect_factors, lift_factor, strip_eisenstein, GaloisOrbit, LiftSearchConfig};
use crate::linalg::{charpoly_mod_nu, nu_primes, CharpolyRecord, SparseSignedMatrix, WiedemannParams};
use crate::mestre::{q_expansion, sturm_bound, ExpansionInputs, JData, QExpansion};
use crate::sieve::{certify_degrees, factor_mod_nu, SieveConfig, SieveState};
use crate::ssgraph::{build_adjacency, split_atkin_lehner, supersingular_count, Block};
use crate::zpoly::{self, ZPoly};
use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("{stage}: {message}")]
    Stage { stage: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn stage(stage: &str, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Stage { stage: stage.into(), message: e.to_string() }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub gmax: usize,
    /// Coefficients per form; the Sturm bound ⌊(p+1)/6⌋ when unset.
    pub ncoeffs: Option<usize>,
    /// Index into the auxiliary prime list of the first ν tried.
    pub nu_start: usize,
    pub seed: u64,
    pub sieve: bool,
    /// Factorizations tried by the sieve per block.
    pub sieve_budget: usize,
    pub workers: usize,
    pub cache_dir: Option<PathBuf>,
    /// Largest ℓ at which an ambiguous lift falls back to T_ℓ itself.
    pub exact_limit: u64,
    pub max_probes: usize,
    /// Fresh ν tried after a recoverable lift failure.
    pub lift_retries: usize,
    pub wiedemann: WiedemannParams,
    pub lift: LiftSearchConfig,
    pub sieve_cfg: SieveConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gmax: 6,
            ncoeffs: None,
            nu_start: 0,
            seed: 0,
            sieve: true,
            sieve_budget: 12,
            workers: 1,
            cache_dir: None,
            exact_limit: 100,
            max_probes: 40,
            lift_retries: 3,
            wiedemann: WiedemannParams::default(),
            lift: LiftSearchConfig::default(),
            sieve_cfg: SieveConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.gmax == 0 || self.gmax > MAX_DEGREE {
            return Err(PipelineError::Config(format!("gmax must be in 1..={MAX_DEGREE}")));
        }
        if self.ncoeffs.is_some_and(|n| n < 2) {
            return Err(PipelineError::Config("ncoeffs must be at least 2".into()));
        }
        if self.nu_start >= nu_primes().len() {
            return Err(PipelineError::Config(format!("nu_start must be below {}", nu_primes().len())));
        }
        if self.workers == 0 {
            return Err(PipelineError::Config("workers must be positive".into()));
        }
        Ok(())
    }

    pub fn ncoeffs_for(&self, p: u64) -> usize {
        self.ncoeffs.unwrap_or_else(|| sturm_bound(p)).max(2)
    }

    /// Hash of everything that affects output bytes.
    pub fn fingerprint(&self) -> String {
        let mut c = self.clone();
        c.workers = 1;
        c.cache_dir = None;
        let mut h = DefaultHasher::new();
        serde_json::to_string(&c).expect("config serializes").hash(&mut h);
        format!("{:016x}", h.finish())
    }
}

fn check_level(p: u64) -> Result<(), PipelineError> {
    if p < 5 || !is_prime(p) {
        return Err(PipelineError::Config(format!("level {p} is not a prime ≥ 5")));
    }
    Ok(())
}

/// Independent deterministic stream per (seed, level, purpose).
fn rng_for(seed: u64, p: u64, tag: u64) -> ChaCha8Rng {
    let mut s = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ p.rotate_left(17) ^ tag.rotate_left(47);
    s ^= s >> 29;
    ChaCha8Rng::seed_from_u64(s)
}

fn block_tag(block: Block) -> u64 {
    match block {
        Block::Plus => 1,
        Block::Minus => 2,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelOutput {
    pub records: Vec<NewformRecord>,
    pub report: LevelReport,
}

impl LevelOutput {
    /// One JSON object per line.
    pub fn record_lines(&self) -> String {
        self.records.iter().map(|r| serde_json::to_string(r).expect("record serializes") + "\n").collect()
    }

    pub fn report_line(&self) -> String {
        serde_json::to_string(&self.report).expect("report serializes") + "\n"
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CachedCharpoly {
    nu_index: usize,
    record: CharpolyRecord,
}

/// χ_ν of one block at the first ν from `start` that completes.
fn charpoly_at(
    t2: &SparseSignedMatrix,
    start: usize,
    cfg: &RunConfig,
    cache: Option<&Cache>,
    key: (u64, Block),
) -> Result<(usize, CharpolyRecord), PipelineError> {
    let name = Cache::charpoly_name(key.0, key.1, cfg.seed, start);
    if let Some(c) = cache.and_then(|c| c.load_json::<CachedCharpoly>(&name)) {
        return Ok((c.nu_index, c.record));
    }
    let mut rng = rng_for(cfg.seed, key.0, 16 + block_tag(key.1) + 4 * start as u64);
    let (w, rec) = charpoly_mod_nu(t2, &cfg.wiedemann, start, &mut rng).map_err(|e| stage("charpoly", e))?;
    if let Some(c) = cache {
        c.store_json(&name, &CachedCharpoly { nu_index: w.nu_index, record: rec.clone() })?;
    }
    Ok((w.nu_index, rec))
}

struct NuContext {
    index: usize,
    field: PrimeFieldCtx,
    chi_cusp: DensePoly<u64>,
    mu: DensePoly<u64>,
    record: CharpolyRecord,
}

fn nu_context(
    t2: &SparseSignedMatrix,
    start: usize,
    block: Block,
    cfg: &RunConfig,
    cache: Option<&Cache>,
    p: u64,
) -> Result<NuContext, PipelineError> {
    let (index, record) = charpoly_at(t2, start, cfg, cache, (p, block))?;
    let field = PrimeFieldCtx::new(record.nu).expect("ν is prime");
    let chi = DensePoly::new(&field, record.charpoly.clone().expect("completed"));
    let chi_cusp = match block {
        Block::Minus => {
            let c = strip_eisenstein(&field, &chi);
            if c.degree() == chi.degree() {
                return Err(stage("charpoly", "Eisenstein eigenvalue 3 missing from the invariant block"));
            }
            c
        }
        Block::Plus => chi,
    };
    let mu = DensePoly::new(&field, record.minpoly.clone());
    Ok(NuContext { index, field, chi_cusp, mu, record })
}

struct LevelContext<'a> {
    p: u64,
    cfg: &'a RunConfig,
    cache: Option<&'a Cache>,
    hecke: &'a LevelHecke,
    jd: &'a JData,
    ncoeffs: usize,
}

fn failure(stage: &str, e: impl std::fmt::Display, nu_history: &[u64], retries: usize) -> StageFailure {
    StageFailure { stage: stage.into(), message: e.to_string(), nu_history: nu_history.to_vec(), retries }
}

type Expanded = Vec<(GaloisOrbit, QExpansion)>;

fn run_block(ctx: &LevelContext<'_>, block: Block) -> (BlockReport, Vec<NewformRecord>, Expanded) {
    let p = ctx.p;
    let cfg = ctx.cfg;
    let t2 = ctx.hecke.operator(2, block).expect("T_2 is cached");
    let dim = t2.dim();
    let cusp_dim = dim - usize::from(block == Block::Minus);
    let mut rep = BlockReport::empty(block, dim, cusp_dim);
    let mut records = Vec::new();
    let mut expanded = Vec::new();
    if cusp_dim == 0 {
        rep.dims_accounted = Some(true);
        return (rep, records, expanded);
    }

    let t0 = Instant::now();
    let nu0 = match nu_context(&t2, cfg.nu_start, block, cfg, ctx.cache, p) {
        Ok(c) => c,
        Err(e) => {
            rep.failures.push(failure("charpoly", e, &[], 0));
            return (rep, records, expanded);
        }
    };
    rep.nu_history.push(nu0.field.modulus());
    rep.charpoly = Some(nu0.record.clone());
    info!(
        "stage=charpoly level={p} block={block:?} nu={} secs={:.3} notes={:?}",
        nu0.field.modulus(),
        t0.elapsed().as_secs_f64(),
        nu0.record.notes
    );

    let mut rng = rng_for(cfg.seed, p, 8 + block_tag(block));
    let t0 = Instant::now();
    let factors = match detect_factors(&nu0.field, &nu0.chi_cusp, cfg.gmax, &mut rng) {
        Ok(f) => f,
        Err(e) => {
            rep.failures.push(failure("detect", e, &rep.nu_history, 0));
            return (rep, records, expanded);
        }
    };
    info!("stage=detect level={p} block={block:?} factors={} secs={:.3}", factors.len(), t0.elapsed().as_secs_f64());

    let bh = ctx.hecke.block(block);
    let index = ctx.hecke.index(block);
    let mut known: Vec<ZPoly> = Vec::new();
    let mut lifts_complete = true;
    let mut last_index = nu0.index;
    for (rho, r) in &factors {
        let t0 = Instant::now();
        let mut retries = 0;
        let mut retry_ctx: Option<NuContext> = None;
        let orbits: Vec<GaloisOrbit> = loop {
            let c = retry_ctx.as_ref().unwrap_or(&nu0);
            match lift_factor(&c.field, block, &t2, rho, *r, &c.mu, &bh, &cfg.lift, &mut rng) {
                Ok(o) => break o,
                Err(e) if e.is_recoverable() && retries < cfg.lift_retries => {
                    warn!("stage=lift level={p} block={block:?} rho={} retry={} err={e}", zpoly::to_string(rho), retries);
                    retries += 1;
                    match nu_context(&t2, last_index + 1, block, cfg, None, p) {
                        Ok(next) => {
                            last_index = next.index;
                            rep.nu_history.push(next.field.modulus());
                            retry_ctx = Some(next);
                        }
                        Err(e2) => {
                            rep.failures.push(failure("lift", e2, &rep.nu_history, retries));
                            break Vec::new();
                        }
                    }
                }
                Err(e) => {
                    rep.failures.push(failure("lift", e, &rep.nu_history, retries));
                    break Vec::new();
                }
            }
        };
        let total: usize = orbits.iter().map(GaloisOrbit::dim).sum();
        if total != zpoly::degree(rho) * r {
            lifts_complete = false;
            if !orbits.is_empty() {
                rep.failures.push(failure(
                    "lift",
                    format!("orbits of {} span {total}, expected {}", zpoly::to_string(rho), zpoly::degree(rho) * r),
                    &rep.nu_history,
                    retries,
                ));
            }
            continue;
        }
        known.extend(std::iter::repeat(rho.clone()).take(*r));
        let nu_used = retry_ctx.as_ref().unwrap_or(&nu0).field.modulus();
        info!(
            "stage=lift level={p} block={block:?} rho={} orbits={} retries={retries} secs={:.3}",
            zpoly::to_string(rho),
            orbits.len(),
            t0.elapsed().as_secs_f64()
        );
        for orbit in &orbits {
            rep.orbits.push(OrbitSummary::new(rho, orbit.dim(), *r));
            let t0 = Instant::now();
            let inp = ExpansionInputs {
                set: &ctx.hecke.set,
                index,
                hecke: &bh,
                jd: ctx.jd,
                ncoeffs: ctx.ncoeffs,
                exact_limit: cfg.exact_limit,
                max_probes: cfg.max_probes,
            };
            match q_expansion(orbit, &inp) {
                Ok(qe) => {
                    info!(
                        "stage=mestre level={p} block={block:?} dim={} exact_primes={:?} secs={:.3}",
                        orbit.dim(),
                        qe.exact_primes,
                        t0.elapsed().as_secs_f64()
                    );
                    let prov = Provenance {
                        nu: nu_used.to_string(),
                        nu_history: rep.nu_history.iter().map(ToString::to_string).collect(),
                        lift_retries: retries.to_string(),
                        multiplicity: r.to_string(),
                        generator_ell: orbit.generator_ell.to_string(),
                        probe_primes: qe.probes.iter().map(ToString::to_string).collect(),
                        exact_primes: qe.exact_primes.iter().map(ToString::to_string).collect(),
                        seed: cfg.seed.to_string(),
                    };
                    records.push(NewformRecord::new(orbit, &qe, prov));
                    expanded.push((orbit.clone(), qe));
                }
                Err(e) => rep.failures.push(failure("mestre", e, &rep.nu_history, retries)),
            }
        }
    }
    let found: usize = rep.orbits.iter().map(|o| o.dim).sum();
    let remainder = cusp_dim - known.iter().map(|k| zpoly::degree(k)).sum::<usize>();

    if !cfg.sieve {
        rep.dims_accounted = (remainder == 0).then_some(found == cusp_dim);
        return (rep, records, expanded);
    }
    if !lifts_complete {
        rep.sieve = SieveOutcome::Failed { message: "some detected factors were not lifted".into() };
        return (rep, records, expanded);
    }
    let t0 = Instant::now();
    let state = SieveState::new(remainder, cfg.gmax, cfg.sieve_cfg.clone());
    let mut srng = rng_for(cfg.seed, p, 32 + block_tag(block));
    let mut first = Some(nu0.chi_cusp.clone());
    let mut next_index = last_index + 1;
    let mut extra_nus: Vec<u64> = Vec::new();
    let stream = || {
        if let Some(chi) = first.take() {
            return Some(factor_mod_nu(&nu0.field, &chi, &known, &cfg.sieve_cfg, &mut srng));
        }
        if next_index >= nu_primes().len() {
            return None;
        }
        let c = nu_context(&t2, next_index, block, cfg, None, p).ok()?;
        next_index = c.index + 1;
        extra_nus.push(c.field.modulus());
        Some(factor_mod_nu(&c.field, &c.chi_cusp, &known, &cfg.sieve_cfg, &mut srng))
    };
    match certify_degrees(state, stream, cfg.sieve_budget) {
        Ok(report) => {
            info!(
                "stage=sieve level={p} block={block:?} remainder={remainder} surviving={:?} nus={} secs={:.3}",
                report.surviving,
                report.nus_used.len(),
                t0.elapsed().as_secs_f64()
            );
            rep.dims_accounted = (!report.undetermined && report.surviving.is_empty())
                .then(|| found + report.irreducible_remainder.unwrap_or(0) == cusp_dim);
            rep.sieve = SieveOutcome::Ran(report);
        }
        Err(e) => rep.sieve = SieveOutcome::Failed { message: e.to_string() },
    }
    rep.nu_history.extend(extra_nus);
    (rep, records, expanded)
}

/// A level's output together with the objects behind its records.
pub struct LevelDetail {
    pub output: LevelOutput,
    /// Every emitted orbit with its expansion, in record order.
    pub orbits: Vec<(GaloisOrbit, QExpansion)>,
    pub hecke: LevelHecke,
}

/// Run one level end to end.
pub fn run_level(p: u64, cfg: &RunConfig) -> Result<LevelOutput, PipelineError> {
    run_level_detailed(p, cfg).map(|d| d.output)
}

pub fn run_level_detailed(p: u64, cfg: &RunConfig) -> Result<LevelDetail, PipelineError> {
    cfg.validate()?;
    check_level(p)?;
    let cache = cfg.cache_dir.as_deref().map(Cache::open).transpose()?;
    let genus = supersingular_count(p).map_err(|e| stage("graph", e))? - 1;
    let ncoeffs = cfg.ncoeffs_for(p);

    let t0 = Instant::now();
    // the graph depends on p only, so cached and fresh graphs agree
    let (set, adj) = match cache.as_ref().and_then(|c| c.load_graph(p, 2)) {
        Some(g) => g,
        None => {
            let g = build_adjacency(p, 2, &mut rng_for(0, p, 0)).map_err(|e| stage("graph", e))?;
            if let Some(c) = &cache {
                c.store_graph(&g.0, &g.1)?;
            }
            g
        }
    };
    info!("stage=graph level={p} vertices={} secs={:.3}", set.len(), t0.elapsed().as_secs_f64());
    let set = Arc::new(set);
    let split = split_atkin_lehner(&adj, &set);
    let hecke = LevelHecke::new(set.clone(), split, rand::RngCore::next_u64(&mut rng_for(cfg.seed, p, 4)));
    let fp = PrimeFieldCtx::new(p).expect("prime level");
    let jd = JData::new(&fp, ncoeffs.max(64)).map_err(|e| stage("series", e))?;

    let ctx = LevelContext { p, cfg, cache: cache.as_ref(), hecke: &hecke, jd: &jd, ncoeffs };
    let mut blocks = Vec::new();
    let mut records = Vec::new();
    let mut orbits = Vec::new();
    for block in [Block::Minus, Block::Plus] {
        let (rep, recs, exp) = run_block(&ctx, block);
        blocks.push(rep);
        records.extend(recs);
        orbits.extend(exp);
    }
    let mut notes = Vec::new();
    if genus == 0 {
        notes.push("cuspidal space is empty".to_string());
    }
    let partial = blocks.iter().any(|b| !b.failures.is_empty());
    let report =
        LevelReport { version: SCHEMA_VERSION, level: p, genus, ncoeffs, blocks, notes, partial, failures: Vec::new() };
    Ok(LevelDetail { output: LevelOutput { records, report }, orbits, hecke })
}

/// A level that failed outright, as a report with no blocks.
fn failed_level(p: u64, cfg: &RunConfig, e: &PipelineError) -> LevelOutput {
    let report = LevelReport {
        version: SCHEMA_VERSION,
        level: p,
        genus: supersingular_count(p).map_or(0, |c| c - 1),
        ncoeffs: cfg.ncoeffs_for(p),
        blocks: Vec::new(),
        notes: Vec::new(),
        partial: true,
        failures: vec![failure("level", e, &[], 0)],
    };
    LevelOutput { records: Vec::new(), report }
}

/// All primes p ≥ 5 in [a, b], in order. Levels are spread over
/// `cfg.workers` threads; finished levels are reused from the cache.
pub fn run_range(a: u64, b: u64, cfg: &RunConfig) -> Result<Vec<LevelOutput>, PipelineError> {
    cfg.validate()?;
    if a > b {
        return Err(PipelineError::Config(format!("empty range [{a}, {b}]")));
    }
    let cache = cfg.cache_dir.as_deref().map(Cache::open).transpose()?;
    let fingerprint = cfg.fingerprint();
    let levels: Vec<u64> = primes_in(a.max(5), b);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    let outputs: Vec<LevelOutput> = pool.install(|| {
        levels
            .par_iter()
            .map(|&p| {
                let name = Cache::level_name(p, &fingerprint);
                if let Some(done) = cache.as_ref().and_then(|c| c.load_json::<LevelOutput>(&name)) {
                    info!("stage=range level={p} cached=true");
                    return done;
                }
                match run_level(p, cfg) {
                    Ok(out) => {
                        if let Some(c) = &cache {
                            if let Err(e) = c.store_json(&name, &out) {
                                warn!("stage=range level={p} cache_write_failed={e}");
                            }
                        }
                        out
                    }
                    Err(e) => {
                        warn!("stage=range level={p} failed={e}");
                        failed_level(p, cfg, &e)
                    }
                }
            })
            .collect()
    });
    if let Some(c) = &cache {
        for o in outputs.iter().filter(|o| !o.report.partial) {
            c.mark_completed(&fingerprint, o.report.level)?;
        }
    }
    Ok(outputs)
}
