//! Supersingular ℓ-isogeny graphs over F_{p²} and their Atkin–Lehner blocks.

pub mod modpoly;
pub mod velu;

use crate::gf::{poly_roots, DensePoly, GfError, PrimeFieldCtx, QuadExtCtx, QuadExtElement};
use crate::linalg::SparseSignedMatrix;
use modpoly::{ModPolyError, ReducedModPoly};
use rand::Rng;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("level {0} must be a prime >= 5")]
    BadLevel(u64),
    #[error("isogeny degree {0} is not an odd prime or 2, or equals the level")]
    BadDegree(u64),
    #[error("BFS found {found} vertices, expected {expected}")]
    WrongVertexCount { found: usize, expected: usize },
    #[error("Φ_ℓ({0}, y) does not split over F_p²: {1} of {2} roots found")]
    NotSplit(QuadExtElement, usize, usize),
    #[error("vertex {0} is not in the supersingular set")]
    UnknownVertex(QuadExtElement),
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    ModPoly(#[from] ModPolyError),
    #[error(transparent)]
    Gf(#[from] GfError),
}

/// The 13 class-number-one discriminants with their j-invariants, by |D|.
pub const CM_TABLE: [(i64, i64); 13] = [
    (-3, 0),
    (-4, 1728),
    (-7, -3375),
    (-8, 8000),
    (-11, -32768),
    (-12, 54000),
    (-16, 287496),
    (-19, -884736),
    (-27, -12288000),
    (-28, 16581375),
    (-43, -884736000),
    (-67, -147197952000),
    (-163, -262537412640768000),
];

/// ⌊p/12⌋ + ε(p mod 12).
pub fn supersingular_count(p: u64) -> Result<usize, GraphError> {
    if p < 5 || !crate::gf::is_prime(p) {
        return Err(GraphError::BadLevel(p));
    }
    let eps = match p % 12 {
        1 => 0,
        5 | 7 => 1,
        11 => 2,
        _ => unreachable!("primes >= 5 are 1, 5, 7 or 11 mod 12"),
    };
    Ok((p / 12) as usize + eps)
}

/// Σ_x (x³ + ax + b | p); the curve is supersingular over F_p iff this is 0.
fn legendre_sum(f: &PrimeFieldCtx, a: u64, b: u64) -> i64 {
    (0..f.modulus())
        .map(|x| {
            let y2 = f.addm(f.addm(f.mulm(f.mulm(x, x), x), f.mulm(a, x)), b);
            i64::from(f.legendre(y2))
        })
        .sum()
}

/// Short Weierstrass coefficients (a, b) of a curve over F_p with the given j.
pub fn curve_with_j(f: &PrimeFieldCtx, j: u64) -> (u64, u64) {
    match j {
        0 => (0, 1),
        _ if j == 1728 % f.modulus() => (1, 0),
        _ => {
            let k = f.mulm(j, f.invm(f.subm(1728 % f.modulus(), j)).expect("j != 1728"));
            (f.mulm(3, k), f.mulm(2, k))
        }
    }
}

/// Is the F_p-rational j-invariant supersingular (trace zero point count)?
pub fn is_supersingular_fp(p: u64, j: u64) -> bool {
    let f = PrimeFieldCtx::new(p).expect("prime level");
    let (a, b) = curve_with_j(&f, j % p);
    legendre_sum(&f, a, b) == 0
}

/// A supersingular j-invariant in F_p: the first CM discriminant that is a
/// nonresidue mod p, else a brute-force scan of F_p.
pub fn find_starting_j(p: u64) -> Result<u64, GraphError> {
    let f = PrimeFieldCtx::new(p).map_err(|_| GraphError::BadLevel(p))?;
    if p < 5 {
        return Err(GraphError::BadLevel(p));
    }
    for (d, j) in CM_TABLE {
        if f.legendre(f.reduce_i64(d)) == -1 {
            return Ok(f.reduce_i64(j));
        }
    }
    (0..p).find(|&j| is_supersingular_fp(p, j)).ok_or(GraphError::BadLevel(p))
}

/// Vertex set ordered by BFS discovery, each non-rational j followed by j^σ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupersingularSet {
    pub p: u64,
    pub vertices: Vec<QuadExtElement>,
    pub conj: Vec<usize>,
    index: HashMap<QuadExtElement, usize>,
}

impl SupersingularSet {
    pub fn from_vertices(k: &QuadExtCtx, vertices: Vec<QuadExtElement>) -> Result<Self, GraphError> {
        let index: HashMap<_, _> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let conj = vertices
            .iter()
            .map(|v| {
                let c = k.conj(v);
                index.get(&c).copied().ok_or(GraphError::UnknownVertex(c))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { p: k.p(), vertices, conj, index })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, j: &QuadExtElement) -> Option<usize> {
        self.index.get(j).copied()
    }

    pub fn is_rational(&self, i: usize) -> bool {
        self.conj[i] == i
    }

    /// Orbit representatives j ≤ j^σ, in vertex order (the minus-block index).
    pub fn orbit_reps(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.vertices[i] <= self.vertices[self.conj[i]]).collect()
    }

    /// Representatives j < j^σ (the plus-block index).
    pub fn pair_reps(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.vertices[i] < self.vertices[self.conj[i]]).collect()
    }

    /// Automorphism weight w(j): 3 at j = 0, 2 at j = 1728, else 1.
    pub fn weight(&self, i: usize) -> u64 {
        let j = self.vertices[i];
        if j == QuadExtElement::rational(0) {
            3
        } else if j == QuadExtElement::rational(1728 % self.p) {
            2
        } else {
            1
        }
    }
}

/// B[j][j'] = multiplicity of j' among the roots of Φ_ℓ(j, y), stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsogenyAdjacency {
    pub ell: u64,
    pub rows: Vec<Vec<(usize, u32)>>,
}

impl IsogenyAdjacency {
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.rows[i].iter().find(|e| e.0 == j).map_or(0, |e| e.1)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let n = self.rows.len();
        let mut m = vec![vec![0i64; n]; n];
        for (i, r) in self.rows.iter().enumerate() {
            for &(c, v) in r {
                m[i][c] = i64::from(v);
            }
        }
        m
    }

    pub fn to_sparse(&self) -> SparseSignedMatrix {
        let rows = self.rows.iter().map(|r| r.iter().map(|&(c, v)| (c, i64::from(v))).collect()).collect();
        SparseSignedMatrix::new(self.rows.len(), rows)
    }

    /// Re-express in the vertex order of `to`.
    pub fn reindex(&self, from: &SupersingularSet, to: &SupersingularSet) -> Result<Self, GraphError> {
        let map: Vec<usize> = from
            .vertices
            .iter()
            .map(|v| to.index_of(v).ok_or(GraphError::UnknownVertex(*v)))
            .collect::<Result<_, _>>()?;
        let mut rows = vec![Vec::new(); self.rows.len()];
        for (i, r) in self.rows.iter().enumerate() {
            let mut nr: Vec<(usize, u32)> = r.iter().map(|&(c, v)| (map[c], v)).collect();
            nr.sort_unstable();
            rows[map[i]] = nr;
        }
        Ok(Self { ell: self.ell, rows })
    }
}

/// Multiset of roots of Φ_ℓ(j, y), optionally dividing out one known root.
fn neighbours<R: Rng + ?Sized>(
    k: &QuadExtCtx,
    phi: &ReducedModPoly,
    j: &QuadExtElement,
    known: Option<&QuadExtElement>,
    rng: &mut R,
) -> Result<Vec<QuadExtElement>, GraphError> {
    let mut poly = phi.specialize(k, j);
    let mut out = Vec::new();
    if let Some(r) = known {
        poly = poly.div_exact(k, &DensePoly::linear(k, r)).ok_or(GraphError::NotSplit(*j, 0, 0))?;
        out.push(*r);
    }
    let deg = poly.degree().unwrap_or(0);
    let roots = poly_roots(k, &poly, rng)?;
    if roots.len() != deg {
        return Err(GraphError::NotSplit(*j, roots.len(), deg));
    }
    out.extend(roots);
    Ok(out)
}

fn count_row(set_index: impl Fn(&QuadExtElement) -> Option<usize>, roots: &[QuadExtElement]) -> Result<Vec<(usize, u32)>, GraphError> {
    let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
    for r in roots {
        let i = set_index(r).ok_or(GraphError::UnknownVertex(*r))?;
        *counts.entry(i).or_default() += 1;
    }
    Ok(counts.into_iter().collect())
}

/// Breadth-first search of the ℓ-isogeny graph from the CM starting vertex.
pub fn build_adjacency<R: Rng + ?Sized>(
    p: u64,
    ell: u64,
    rng: &mut R,
) -> Result<(SupersingularSet, IsogenyAdjacency), GraphError> {
    let expected = supersingular_count(p)?;
    if ell == p || !crate::gf::is_prime(ell) {
        return Err(GraphError::BadDegree(ell));
    }
    let k = QuadExtCtx::new(p)?;
    let phi = modpoly::bundled(ell)?.reduce(p);
    let start = QuadExtElement::rational(find_starting_j(p)?);

    let mut vertices = vec![start];
    let mut index: HashMap<QuadExtElement, usize> = HashMap::from([(start, 0)]);
    let mut parent: Vec<Option<QuadExtElement>> = vec![None];
    let mut roots_of: Vec<Option<Vec<QuadExtElement>>> = vec![None];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let j = vertices[i];
        let cj = k.conj(&j);
        let ci = index[&cj];
        let roots = match (&roots_of[ci], ci != i) {
            (Some(r), true) => r.iter().map(|x| k.conj(x)).collect(),
            _ => neighbours(&k, &phi, &j, parent[i].as_ref(), rng)?,
        };
        for r in &roots {
            if index.contains_key(r) {
                continue;
            }
            let mut add = |v: QuadExtElement, from: QuadExtElement| {
                index.insert(v, vertices.len());
                queue.push_back(vertices.len());
                vertices.push(v);
                parent.push(Some(from));
                roots_of.push(None);
            };
            add(*r, j);
            if !r.is_rational() {
                add(k.conj(r), cj);
            }
        }
        roots_of[i] = Some(roots);
        if vertices.len() > expected {
            return Err(GraphError::WrongVertexCount { found: vertices.len(), expected });
        }
    }
    if vertices.len() != expected {
        return Err(GraphError::WrongVertexCount { found: vertices.len(), expected });
    }
    let set = SupersingularSet::from_vertices(&k, vertices)?;
    let rows = roots_of
        .iter()
        .map(|r| count_row(|v| set.index_of(v), r.as_ref().expect("every vertex processed")))
        .collect::<Result<_, _>>()?;
    Ok((set, IsogenyAdjacency { ell, rows }))
}

/// Build the ℓ-graph and express it in the vertex order of `base`.
pub fn build_adjacency_in<R: Rng + ?Sized>(
    base: &SupersingularSet,
    ell: u64,
    rng: &mut R,
) -> Result<IsogenyAdjacency, GraphError> {
    let (set, adj) = build_adjacency(base.p, ell, rng)?;
    adj.reindex(&set, base)
}

/// Row i of B_ℓ, from Φ_ℓ when bundled and from Vélu's formulas otherwise.
pub fn hecke_row<R: Rng + ?Sized>(
    set: &SupersingularSet,
    ell: u64,
    i: usize,
    rng: &mut R,
) -> Result<Vec<(usize, u32)>, GraphError> {
    if ell == set.p || !crate::gf::is_prime(ell) {
        return Err(GraphError::BadDegree(ell));
    }
    let k = QuadExtCtx::new(set.p)?;
    let roots = if modpoly::has_bundled(ell) {
        let phi = modpoly::bundled(ell)?.reduce(set.p);
        neighbours(&k, &phi, &set.vertices[i], None, rng)?
    } else {
        velu::isogenous_j_invariants(&k, &set.vertices[i], ell, rng)?
    };
    count_row(|v| set.index_of(v), &roots)
}

/// Hecke operator on the two Atkin–Lehner blocks (row convention).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ALSplitMatrices {
    /// Anti-invariant block, indexed by `plus_index`.
    pub plus: SparseSignedMatrix,
    /// Galois-invariant block, indexed by `minus_index`.
    pub minus: SparseSignedMatrix,
    pub plus_index: Vec<usize>,
    pub minus_index: Vec<usize>,
}

/// Which Atkin–Lehner block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Block {
    /// Anti-invariant basis {e_j - e_{j^σ}}.
    Plus,
    /// Invariant basis {Σ_{j ∈ O} e_j}; contains the Eisenstein class.
    Minus,
}

impl Block {
    /// Atkin–Lehner eigenvalue recorded for forms in this block.
    pub fn al_sign(self) -> i32 {
        match self {
            Block::Plus => 1,
            Block::Minus => -1,
        }
    }

    pub fn index(self, set: &SupersingularSet) -> Vec<usize> {
        match self {
            Block::Plus => set.pair_reps(),
            Block::Minus => set.orbit_reps(),
        }
    }
}

/// One row of the block matrix, given the full B-row of its representative.
pub fn block_row(
    set: &SupersingularSet,
    block: Block,
    row_rational: bool,
    brow: &[(usize, u32)],
    position: &HashMap<usize, usize>,
) -> Vec<(usize, i64)> {
    let mut out: BTreeMap<usize, i64> = BTreeMap::new();
    for &(c, m) in brow {
        let m = i64::from(m);
        match block {
            Block::Minus => {
                // Σ_{j ∈ O1} B[j][rep O2]; by equivariance B[j1σ][c] = B[j1][cσ]
                if row_rational {
                    if let Some(&pos) = position.get(&c) {
                        *out.entry(pos).or_default() += m;
                    }
                } else if set.is_rational(c) {
                    *out.entry(position[&c]).or_default() += 2 * m;
                } else {
                    let pos = position.get(&c).copied().unwrap_or_else(|| position[&set.conj[c]]);
                    *out.entry(pos).or_default() += m;
                }
            }
            Block::Plus => {
                if set.is_rational(c) {
                    continue;
                }
                if let Some(&pos) = position.get(&c) {
                    *out.entry(pos).or_default() += m;
                } else {
                    *out.entry(position[&set.conj[c]]).or_default() -= m;
                }
            }
        }
    }
    out.into_iter().filter(|e| e.1 != 0).collect()
}

pub fn split_atkin_lehner(adj: &IsogenyAdjacency, set: &SupersingularSet) -> ALSplitMatrices {
    let make = |block: Block| {
        let index = block.index(set);
        let position: HashMap<usize, usize> = index.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let rows = index.iter().map(|&i| block_row(set, block, set.is_rational(i), &adj.rows[i], &position)).collect();
        (SparseSignedMatrix::new(index.len(), rows), index)
    };
    let (plus, plus_index) = make(Block::Plus);
    let (minus, minus_index) = make(Block::Minus);
    ALSplitMatrices { plus, minus, plus_index, minus_index }
}

impl ALSplitMatrices {
    pub fn block(&self, b: Block) -> (&SparseSignedMatrix, &[usize]) {
        match b {
            Block::Plus => (&self.plus, &self.plus_index),
            Block::Minus => (&self.minus, &self.minus_index),
        }
    }
}

/// Plain-text graph cache: header, vertices as (a, b), then sparse triples.
pub fn graph_to_text(set: &SupersingularSet, adj: &IsogenyAdjacency) -> String {
    let mut s = format!("ssgraph 1\n{} {} {}\n", set.p, adj.ell, set.len());
    for v in &set.vertices {
        let _ = writeln!(s, "{} {}", v.a, v.b);
    }
    for (i, r) in adj.rows.iter().enumerate() {
        for &(c, m) in r {
            let _ = writeln!(s, "{i} {c} {m}");
        }
    }
    s
}

pub fn graph_from_text(text: &str) -> Result<(SupersingularSet, IsogenyAdjacency), GraphError> {
    let bad = |m: &str| GraphError::Cache(m.to_string());
    let mut lines = text.lines();
    if lines.next() != Some("ssgraph 1") {
        return Err(bad("unknown header"));
    }
    let nums = |l: Option<&str>| -> Result<Vec<u64>, GraphError> {
        l.ok_or_else(|| bad("truncated"))?
            .split_whitespace()
            .map(|x| x.parse::<u64>().map_err(|_| bad("bad integer")))
            .collect()
    };
    let head = nums(lines.next())?;
    let [p, ell, n] = head[..] else { return Err(bad("bad size line")) };
    let k = QuadExtCtx::new(p)?;
    let mut vertices = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let v = nums(lines.next())?;
        let [a, b] = v[..] else { return Err(bad("bad vertex")) };
        if a >= p || b >= p {
            return Err(bad("vertex out of range"));
        }
        vertices.push(QuadExtElement::new(a, b));
    }
    let set = SupersingularSet::from_vertices(&k, vertices)?;
    let mut rows = vec![Vec::new(); n as usize];
    for l in lines {
        let t = nums(Some(l))?;
        let [i, c, m] = t[..] else { return Err(bad("bad triple")) };
        if i >= n || c >= n {
            return Err(bad("index out of range"));
        }
        rows[i as usize].push((c as usize, m as u32));
    }
    Ok((set, IsogenyAdjacency { ell, rows }))
}
