//! Hecke operators on both Atkin–Lehner blocks of one level, built on
//! demand and shared between the blocks.

use crate::lift::{HeckeSource, LiftError};
use crate::linalg::SparseSignedMatrix;
use crate::ssgraph::{block_row, hecke_row, ALSplitMatrices, Block, GraphError, SupersingularSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

type BlockPair = (Arc<SparseSignedMatrix>, Arc<SparseSignedMatrix>);

pub struct LevelHecke {
    pub set: Arc<SupersingularSet>,
    pub plus_index: Vec<usize>,
    pub minus_index: Vec<usize>,
    seed: u64,
    cache: RwLock<HashMap<u64, BlockPair>>,
}

impl LevelHecke {
    /// `t2` seeds the cache so that T_2 is never rebuilt.
    pub fn new(set: Arc<SupersingularSet>, t2: ALSplitMatrices, seed: u64) -> Self {
        let ALSplitMatrices { plus, minus, plus_index, minus_index } = t2;
        let cache = RwLock::new(HashMap::from([(2, (Arc::new(plus), Arc::new(minus)))]));
        Self { set, plus_index, minus_index, seed, cache }
    }

    pub fn index(&self, block: Block) -> &[usize] {
        match block {
            Block::Plus => &self.plus_index,
            Block::Minus => &self.minus_index,
        }
    }

    pub fn operator(&self, ell: u64, block: Block) -> Result<Arc<SparseSignedMatrix>, GraphError> {
        if let Some(pair) = self.cache.read().expect("lock").get(&ell) {
            return Ok(pick(pair, block));
        }
        let pair = self.build(ell)?;
        let out = pick(&pair, block);
        self.cache.write().expect("lock").entry(ell).or_insert(pair);
        Ok(out)
    }

    fn build(&self, ell: u64) -> Result<BlockPair, GraphError> {
        let set = &*self.set;
        // B-rows of the orbit representatives; pair reps are a subset
        let rows: Vec<(usize, Vec<(usize, u32)>)> = self
            .minus_index
            .par_iter()
            .map(|&i| {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ ell.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ i as u64);
                hecke_row(set, ell, i, &mut rng).map(|r| (i, r))
            })
            .collect::<Result<_, _>>()?;
        let brows: HashMap<usize, Vec<(usize, u32)>> = rows.into_iter().collect();
        let make = |block: Block, index: &[usize]| {
            let position: HashMap<usize, usize> = index.iter().enumerate().map(|(k, &i)| (i, k)).collect();
            let rows =
                index.iter().map(|&i| block_row(set, block, set.is_rational(i), &brows[&i], &position)).collect();
            Arc::new(SparseSignedMatrix::new(index.len(), rows))
        };
        Ok((make(Block::Plus, &self.plus_index), make(Block::Minus, &self.minus_index)))
    }

    pub fn block(&self, block: Block) -> BlockHecke<'_> {
        BlockHecke { level: self, block }
    }
}

fn pick(pair: &BlockPair, block: Block) -> Arc<SparseSignedMatrix> {
    match block {
        Block::Plus => pair.0.clone(),
        Block::Minus => pair.1.clone(),
    }
}

/// One block's view of a [`LevelHecke`].
pub struct BlockHecke<'a> {
    level: &'a LevelHecke,
    block: Block,
}

impl HeckeSource for BlockHecke<'_> {
    fn level(&self) -> u64 {
        self.level.set.p
    }

    fn block(&self, ell: u64) -> Result<Arc<SparseSignedMatrix>, LiftError> {
        Ok(self.level.operator(ell, self.block)?)
    }
}
