//! Solvers for the (weighted) syndrome decoding problem: find a cheapest set of
//! columns of a parity matrix `H` whose XOR equals a target `s`.
//!
//! Columns are the parities available to the synthesizer. Every solver
//! returns the selected column indices (`support`) and their total cost.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::CnotCircuit;
use crate::error::{Error, Result};
use crate::gf2::{ones_of, weight_of, words_for, xor_into, xor_weight, BitMatrix, BitVec};

/// `H x = s` with column costs `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyndromeInstance {
    dim: usize,
    words: usize,
    columns: Vec<u64>,
    target: Vec<u64>,
    costs: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyndromeSolution {
    /// Selected column indices, increasing.
    pub support: Vec<usize>,
    /// Sum of the costs of the selected columns.
    pub weight: u64,
}

impl SyndromeInstance {
    /// Unweighted instance (all costs 1).
    pub fn new(columns: &[BitVec], target: &BitVec) -> Result<Self> {
        Self::weighted(columns, target, vec![1; columns.len()])
    }

    pub fn weighted(columns: &[BitVec], target: &BitVec, costs: Vec<u64>) -> Result<Self> {
        let dim = target.len();
        if costs.len() != columns.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} costs for {} columns",
                costs.len(),
                columns.len()
            )));
        }
        let words = words_for(dim);
        let mut flat = Vec::with_capacity(columns.len() * words);
        for (i, c) in columns.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::DimensionMismatch(format!("column {i} has length {}, expected {dim}", c.len())));
            }
            flat.extend_from_slice(c.words());
        }
        Ok(Self {
            dim,
            words,
            columns: flat,
            target: target.words().to_vec(),
            costs,
        })
    }

    pub(crate) fn from_raw(dim: usize, columns: Vec<u64>, target: Vec<u64>, costs: Vec<u64>) -> Self {
        let words = words_for(dim);
        debug_assert_eq!(columns.len(), costs.len() * words);
        debug_assert_eq!(target.len(), words);
        Self {
            dim,
            words,
            columns,
            target,
            costs,
        }
    }

    /// Length of the parity vectors.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of columns `m`.
    pub fn n_columns(&self) -> usize {
        self.costs.len()
    }

    pub fn costs(&self) -> &[u64] {
        &self.costs
    }

    #[inline]
    pub(crate) fn col(&self, i: usize) -> &[u64] {
        &self.columns[i * self.words..(i + 1) * self.words]
    }

    pub fn column(&self, i: usize) -> BitVec {
        BitVec::from_words(self.dim, self.col(i))
    }

    pub fn target(&self) -> BitVec {
        BitVec::from_words(self.dim, &self.target)
    }

    /// Whether `support` XORs to the target.
    pub fn is_solution(&self, support: &[usize]) -> bool {
        let mut acc = self.target.clone();
        for &i in support {
            xor_into(&mut acc, self.col(i));
        }
        acc.iter().all(|&w| w == 0)
    }

    pub fn solution_from_support(&self, mut support: Vec<usize>) -> SyndromeSolution {
        support.sort_unstable();
        support.dedup();
        let weight = support.iter().map(|&i| self.costs[i]).sum();
        SyndromeSolution { support, weight }
    }

    /// Solution from a sequence of picks; a column picked twice cancels.
    fn solution_from_toggles(&self, picks: &[usize]) -> SyndromeSolution {
        let mut on = HashMap::new();
        for &p in picks {
            *on.entry(p).or_insert(false) ^= true;
        }
        self.solution_from_support(on.into_iter().filter(|&(_, v)| v).map(|(k, _)| k).collect())
    }

    /// For each coordinate `j`, the cheapest column equal to `e_j` (lowest index on ties).
    fn canonical_columns(&self) -> Vec<Option<usize>> {
        let mut best: Vec<Option<usize>> = vec![None; self.dim];
        for i in 0..self.n_columns() {
            let c = self.col(i);
            if weight_of(c) == 1 {
                let j = ones_of(c).next().expect("weight one");
                if best[j].is_none_or(|b| self.costs[i] < self.costs[b]) {
                    best[j] = Some(i);
                }
            }
        }
        best
    }

    /// Any solution by Gaussian elimination, ignoring costs.
    fn any_solution(&self, residual: &[u64]) -> Option<Vec<usize>> {
        let mut basis = EchelonBasis::new(self.dim, self.n_columns());
        for i in 0..self.n_columns() {
            basis.insert(self.col(i), i);
        }
        basis.express(residual)
    }
}

impl SyndromeSolution {
    pub fn is_valid_for(&self, inst: &SyndromeInstance) -> bool {
        inst.is_solution(&self.support)
            && self.weight == self.support.iter().map(|&i| inst.costs[i]).sum::<u64>()
    }
}

/// Incremental echelon form remembering which inserted columns make up each
/// basis vector. Pivot of a stored vector is its highest set bit.
#[derive(Clone)]
struct EchelonBasis {
    combo_words: usize,
    /// (pivot, reduced vector, combination of inserted column labels)
    rows: Vec<(usize, Vec<u64>, Vec<u64>)>,
    pivot_slot: Vec<Option<usize>>,
    labels: Vec<usize>,
}

impl EchelonBasis {
    fn new(dim: usize, max_labels: usize) -> Self {
        Self {
            combo_words: words_for(max_labels.max(1)),
            rows: Vec::new(),
            pivot_slot: vec![None; dim],
            labels: Vec::new(),
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn highest_bit(v: &[u64]) -> Option<usize> {
        v.iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    /// Reduces `v` in place; returns the combination of basis rows used.
    fn reduce(&self, v: &mut [u64], combo: &mut [u64]) {
        while let Some(p) = Self::highest_bit(v) {
            match self.pivot_slot[p] {
                Some(slot) => {
                    let (_, row, c) = &self.rows[slot];
                    xor_into(v, row);
                    xor_into(combo, c);
                }
                None => return,
            }
        }
    }

    /// Inserts column `label`; returns false if it is dependent.
    fn insert(&mut self, v: &[u64], label: usize) -> bool {
        let mut v = v.to_vec();
        let mut combo = vec![0; self.combo_words];
        self.reduce(&mut v, &mut combo);
        let Some(p) = Self::highest_bit(&v) else {
            return false;
        };
        let idx = self.labels.len();
        self.labels.push(label);
        combo[idx / 64] ^= 1 << (idx % 64);
        self.pivot_slot[p] = Some(self.rows.len());
        self.rows.push((p, v, combo));
        true
    }

    fn contains(&self, v: &[u64]) -> bool {
        let mut v = v.to_vec();
        while let Some(p) = Self::highest_bit(&v) {
            match self.pivot_slot[p] {
                Some(slot) => xor_into(&mut v, &self.rows[slot].1),
                None => return false,
            }
        }
        true
    }

    /// Labels of inserted columns summing to `v`, if `v` is in the span.
    fn express(&self, v: &[u64]) -> Option<Vec<usize>> {
        let mut v = v.to_vec();
        let mut combo = vec![0; self.combo_words];
        self.reduce(&mut v, &mut combo);
        if v.iter().any(|&w| w != 0) {
            return None;
        }
        Some(ones_of(&combo).map(|i| self.labels[i]).collect())
    }
}

/// Greedy decoding: repeatedly add the column minimizing `wt(s ^ v)`.
///
/// Ties go to the lowest index. When no column lowers the weight (only
/// possible without canonical columns) the rest is solved by elimination.
pub fn solve_greedy(inst: &SyndromeInstance) -> Result<SyndromeSolution> {
    let mut s = inst.target.clone();
    let mut picks = Vec::new();
    greedy_from(inst, &mut s, &mut picks)?;
    Ok(inst.solution_from_toggles(&picks))
}

fn greedy_from(inst: &SyndromeInstance, s: &mut [u64], picks: &mut Vec<usize>) -> Result<()> {
    let mut cur = weight_of(s);
    while cur > 0 {
        let mut best = (u32::MAX, usize::MAX);
        for i in 0..inst.n_columns() {
            let w = xor_weight(s, inst.col(i));
            if w < best.0 {
                best = (w, i);
            }
        }
        if best.0 >= cur {
            let rest = inst.any_solution(s).ok_or(Error::Infeasible)?;
            picks.extend(rest);
            return Ok(());
        }
        xor_into(s, inst.col(best.1));
        picks.push(best.1);
        cur = best.0;
    }
    Ok(())
}

/// Bounded look-ahead search. At each step the `width` columns giving the
/// lightest residuals are expanded recursively to `depth` levels; one step is
/// then taken toward the leaf with the smallest `steps + wt(residual)`.
/// `width = usize::MAX`, `depth = 1` is exactly [`solve_greedy`].
pub fn solve_tree(inst: &SyndromeInstance, width: usize, depth: usize) -> Result<SyndromeSolution> {
    if width == 0 || depth == 0 {
        return Err(Error::Precondition("tree search needs width >= 1 and depth >= 1".into()));
    }
    let mut s = inst.target.clone();
    let mut picks = Vec::new();
    let step_cap = weight_of(&s) as usize + 2 * inst.dim + 2;
    let mut scratch = TreeScratch::new(inst.words, depth);
    while s.iter().any(|&w| w != 0) {
        if picks.len() >= step_cap {
            greedy_from(inst, &mut s, &mut picks)?;
            break;
        }
        let (score, first) = tree_expand(inst, &s, depth, width, &mut scratch, 0);
        let cur = weight_of(&s);
        if first == usize::MAX || (score as u64) > cur as u64 {
            // no column makes progress within the horizon
            greedy_from(inst, &mut s, &mut picks)?;
            break;
        }
        xor_into(&mut s, inst.col(first));
        picks.push(first);
    }
    Ok(inst.solution_from_toggles(&picks))
}

struct TreeScratch {
    cands: Vec<Vec<(u32, u32)>>,
    residuals: Vec<Vec<u64>>,
}

impl TreeScratch {
    fn new(words: usize, depth: usize) -> Self {
        Self {
            cands: vec![Vec::new(); depth],
            residuals: vec![vec![0; words]; depth],
        }
    }
}

/// Returns (best path score from `s`, first column of that path).
fn tree_expand(
    inst: &SyndromeInstance,
    s: &[u64],
    depth: usize,
    width: usize,
    scratch: &mut TreeScratch,
    level: usize,
) -> (u32, usize) {
    let m = inst.n_columns();
    if depth == 1 {
        let mut best = (u32::MAX, usize::MAX);
        for i in 0..m {
            let w = xor_weight(s, inst.col(i));
            if w < best.0 {
                best = (w, i);
            }
        }
        return (best.0.saturating_add(1), best.1);
    }
    let mut cands = std::mem::take(&mut scratch.cands[level]);
    cands.clear();
    cands.extend((0..m).map(|i| (xor_weight(s, inst.col(i)), i as u32)));
    if width < cands.len() {
        cands.select_nth_unstable(width - 1);
        cands.truncate(width);
    }
    cands.sort_unstable();
    let mut best = (u32::MAX, usize::MAX);
    for &(w, i) in &cands {
        let score = if w == 0 {
            1
        } else {
            let mut next = std::mem::take(&mut scratch.residuals[level]);
            next.copy_from_slice(s);
            xor_into(&mut next, inst.col(i as usize));
            let (sub, _) = tree_expand(inst, &next, depth - 1, width, scratch, level + 1);
            scratch.residuals[level] = next;
            sub.saturating_add(1)
        };
        if score < best.0 {
            best = (score, i as usize);
        }
    }
    scratch.cands[level] = cands;
    best
}

/// Greedy decoding for costed columns: repeatedly add the column minimizing
/// `c[i] + bc(s ^ v)`, where `bc` sums the costs of the canonical columns
/// needed for the residual. Ties: lowest cost, then lowest index.
pub fn solve_weighted_greedy(inst: &SyndromeInstance) -> Result<SyndromeSolution> {
    weighted_greedy_ranked(inst, None)
}

/// [`solve_weighted_greedy`] with ties broken by `tie_rank` instead of index.
pub(crate) fn weighted_greedy_ranked(inst: &SyndromeInstance, tie_rank: Option<&[u32]>) -> Result<SyndromeSolution> {
    let canon = inst.canonical_columns();
    let ccost: Vec<u64> = canon
        .iter()
        .map(|c| c.map_or(u64::MAX / (4 * inst.dim as u64 + 4), |i| inst.costs[i]))
        .collect();
    let basis_cost = |v: &[u64]| -> u64 { ones_of(v).map(|j| ccost[j]).sum() };
    let rank_of = |i: usize| tie_rank.map_or(i as u32, |r| r[i]);

    let mut s = inst.target.clone();
    let mut picks = Vec::new();
    let mut buf = vec![0u64; inst.words];
    let mut cur = basis_cost(&s);
    while s.iter().any(|&w| w != 0) {
        let mut best: Option<(u64, u64, u32, usize, u64)> = None;
        for i in 0..inst.n_columns() {
            buf.copy_from_slice(&s);
            xor_into(&mut buf, inst.col(i));
            let rest = basis_cost(&buf);
            // with random ranks, ties on the criterion are broken uniformly
            let by_cost = if tie_rank.is_some() { 0 } else { inst.costs[i] };
            let key = (inst.costs[i].saturating_add(rest), by_cost, rank_of(i));
            if best.is_none_or(|b| key < (b.0, b.1, b.2)) {
                best = Some((key.0, key.1, key.2, i, rest));
            }
        }
        let (_, _, _, i, rest) = best.ok_or(Error::Infeasible)?;
        if rest >= cur {
            // no progress possible through the criterion; finish canonically
            // or by elimination
            if s_has_canonical_cover(&s, &canon) {
                picks.extend(ones_of(&s).map(|j| canon[j].expect("covered")));
            } else {
                picks.extend(inst.any_solution(&s).ok_or(Error::Infeasible)?);
            }
            break;
        }
        xor_into(&mut s, inst.col(i));
        picks.push(i);
        cur = rest;
    }
    Ok(inst.solution_from_toggles(&picks))
}

fn s_has_canonical_cover(s: &[u64], canon: &[Option<usize>]) -> bool {
    ones_of(s).all(|j| canon[j].is_some())
}

/// How information sets are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum BasisPreference {
    Uniform,
    LowCostFirst,
}

/// Rewrites the instance in the basis formed by the columns `basis`
/// (which must span the column space): those columns become canonical.
fn change_basis(inst: &SyndromeInstance, basis_cols: &[usize]) -> SyndromeInstance {
    let r = basis_cols.len();
    let mut eb = EchelonBasis::new(inst.dim, r);
    for (k, &c) in basis_cols.iter().enumerate() {
        let inserted = eb.insert(inst.col(c), k);
        debug_assert!(inserted, "basis columns must be independent");
    }
    let new_words = words_for(r);
    let express = |v: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; new_words];
        let labels = eb.express(v).expect("vector in the span of the information set");
        for k in labels {
            out[k / 64] ^= 1 << (k % 64);
        }
        out
    };
    let mut columns = Vec::with_capacity(inst.n_columns() * new_words);
    for i in 0..inst.n_columns() {
        columns.extend(express(inst.col(i)));
    }
    let target = express(&inst.target);
    SyndromeInstance::from_raw(r, columns, target, inst.costs.clone())
}

/// Picks a maximal independent set of columns, scanning them in a random
/// order (stably sorted by cost for `LowCostFirst`).
fn random_information_set(inst: &SyndromeInstance, pref: BasisPreference, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.n_columns()).collect();
    order.shuffle(rng);
    if pref == BasisPreference::LowCostFirst {
        order.sort_by_key(|&i| inst.costs[i]);
    }
    let mut eb = EchelonBasis::new(inst.dim, inst.n_columns());
    let mut chosen = Vec::new();
    for i in order {
        if eb.insert(inst.col(i), i) {
            chosen.push(i);
            if eb.rank() == inst.dim {
                break;
            }
        }
    }
    chosen
}

/// Runs `inner` once, in the basis made of the cheapest independent columns.
/// Columns of equal cost are taken in index order, or in random order when
/// `rng` is given.
pub(crate) fn solve_in_cheapest_basis(
    inst: &SyndromeInstance,
    rng: Option<&mut ChaCha8Rng>,
    inner: impl Fn(&SyndromeInstance) -> Result<SyndromeSolution>,
) -> Result<SyndromeSolution> {
    let mut order: Vec<usize> = (0..inst.n_columns()).collect();
    if let Some(rng) = rng {
        order.shuffle(rng);
    }
    order.sort_by_key(|&i| inst.costs[i]);
    let mut eb = EchelonBasis::new(inst.dim, inst.n_columns());
    let mut basis = Vec::new();
    for i in order {
        if eb.rank() == inst.dim {
            break;
        }
        if eb.insert(inst.col(i), i) {
            basis.push(i);
        }
    }
    if !eb.contains(&inst.target) {
        return Err(Error::Infeasible);
    }
    let s = inner(&change_basis(inst, &basis))?;
    Ok(inst.solution_from_support(s.support))
}

/// Runs `inner` on the instance rewritten in `n_bases` information-set bases
/// and keeps the cheapest result (earliest on ties). The first basis is the
/// canonical one when every canonical vector is present.
pub(crate) fn solve_in_bases(
    inst: &SyndromeInstance,
    n_bases: usize,
    seed: u64,
    pref: BasisPreference,
    inner: impl Fn(&SyndromeInstance) -> Result<SyndromeSolution>,
) -> Result<SyndromeSolution> {
    if n_bases == 0 {
        return Err(Error::Precondition("at least one iteration is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let canonical = inst.canonical_columns();
    let has_identity = canonical.iter().all(Option::is_some);
    let mut best: Option<SyndromeSolution> = None;
    for t in 0..n_bases {
        let sol = if t == 0 && has_identity {
            inner(inst)?
        } else {
            let basis = random_information_set(inst, pref, &mut rng);
            let transformed = change_basis(inst, &basis);
            if !transformed_target_ok(inst, &basis) {
                return Err(Error::Infeasible);
            }
            let s = inner(&transformed)?;
            inst.solution_from_support(s.support)
        };
        if best.as_ref().is_none_or(|b| sol.weight < b.weight) {
            best = Some(sol);
        }
    }
    Ok(best.expect("n_bases >= 1"))
}

fn transformed_target_ok(inst: &SyndromeInstance, basis: &[usize]) -> bool {
    let mut eb = EchelonBasis::new(inst.dim, basis.len());
    for (k, &c) in basis.iter().enumerate() {
        eb.insert(inst.col(c), k);
    }
    eb.contains(&inst.target)
}

/// Information set decoding: greedy decoding in `n_iter` bases, the first
/// canonical and the others drawn from random independent column sets.
/// Deterministic per seed; the best weight is non-increasing in `n_iter`.
pub fn solve_isd(inst: &SyndromeInstance, n_iter: usize, seed: u64) -> Result<SyndromeSolution> {
    solve_in_bases(inst, n_iter, seed, BasisPreference::Uniform, solve_greedy)
}

/// Weighted counterpart of [`solve_isd`]; information sets favour cheap columns.
pub fn solve_weighted_isd(inst: &SyndromeInstance, n_iter: usize, seed: u64) -> Result<SyndromeSolution> {
    solve_in_bases(inst, n_iter, seed, BasisPreference::LowCostFirst, solve_weighted_greedy)
}

/// Repeats the tree search in `n_iter` bases.
pub fn solve_tree_isd(
    inst: &SyndromeInstance,
    width: usize,
    depth: usize,
    n_iter: usize,
    seed: u64,
) -> Result<SyndromeSolution> {
    solve_in_bases(inst, n_iter, seed, BasisPreference::Uniform, |i| solve_tree(i, width, depth))
}

/// Provably cheapest solution by branch-and-bound over column inclusion.
///
/// Fails with [`Error::BudgetExhausted`] (carrying the incumbent, if any)
/// when more than `budget` nodes are explored.
pub fn solve_exact(inst: &SyndromeInstance, budget: u64) -> Result<SyndromeSolution> {
    solve_exact_with_warm_start(inst, budget, None)
}

/// [`solve_exact`] seeded with a known solution whose cost prunes the search.
pub fn solve_exact_with_warm_start(
    inst: &SyndromeInstance,
    budget: u64,
    warm_start: Option<&SyndromeSolution>,
) -> Result<SyndromeSolution> {
    if !inst.target.iter().any(|&w| w != 0) {
        return Ok(inst.solution_from_support(Vec::new()));
    }
    let m = inst.n_columns();
    // explore cheap columns first
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| (inst.costs[i], i));

    let mut suffix: Vec<EchelonBasis> = Vec::with_capacity(m + 1);
    let mut acc = EchelonBasis::new(inst.dim, 0);
    suffix.push(acc.clone());
    for &i in order.iter().rev() {
        acc.insert(inst.col(i), 0);
        suffix.push(acc.clone());
    }
    suffix.reverse();
    if !suffix[0].contains(&inst.target) {
        return Err(Error::Infeasible);
    }
    let mut min_cost = vec![u64::MAX; m + 1];
    let mut max_weight = vec![0u32; m + 1];
    for p in (0..m).rev() {
        min_cost[p] = min_cost[p + 1].min(inst.costs[order[p]]);
        max_weight[p] = max_weight[p + 1].max(weight_of(inst.col(order[p])));
    }

    let mut bb = BranchAndBound {
        inst,
        order: &order,
        suffix: &suffix,
        min_cost: &min_cost,
        max_weight: &max_weight,
        budget,
        nodes: 0,
        best_cost: u64::MAX,
        best: None,
        chosen: Vec::new(),
        exhausted: false,
    };
    if let Some(w) = warm_start {
        if w.is_valid_for(inst) {
            bb.best_cost = w.weight;
            bb.best = Some(w.support.clone());
        }
    }
    let mut residual = inst.target.clone();
    bb.search(0, &mut residual, 0);
    let best = bb.best.map(|s| inst.solution_from_support(s));
    if bb.exhausted {
        return Err(Error::BudgetExhausted { best });
    }
    best.ok_or(Error::Infeasible)
}

struct BranchAndBound<'a> {
    inst: &'a SyndromeInstance,
    order: &'a [usize],
    suffix: &'a [EchelonBasis],
    min_cost: &'a [u64],
    max_weight: &'a [u32],
    budget: u64,
    nodes: u64,
    best_cost: u64,
    best: Option<Vec<usize>>,
    chosen: Vec<usize>,
    exhausted: bool,
}

impl BranchAndBound<'_> {
    fn search(&mut self, pos: usize, residual: &mut [u64], cost: u64) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let wt = weight_of(residual);
        if wt == 0 {
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best = Some(self.chosen.clone());
            }
            return;
        }
        if pos == self.order.len() {
            return;
        }
        let needed = wt.div_ceil(self.max_weight[pos].max(1)) as u64;
        if cost.saturating_add(needed.saturating_mul(self.min_cost[pos])) >= self.best_cost {
            return;
        }
        if !self.suffix[pos].contains(residual) {
            return;
        }
        let col = self.order[pos];
        let c = self.inst.costs[col];
        xor_into(residual, self.inst.col(col));
        self.chosen.push(col);
        self.search(pos + 1, residual, cost + c);
        self.chosen.pop();
        xor_into(residual, self.inst.col(col));
        self.search(pos + 1, residual, cost);
    }
}

/// Generator matrix `G` (`m x (m - n)`) of the code whose parity-check matrix
/// is `H`, i.e. `H G = 0`. Solutions of `H x = s` are `x0 ^ G y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMatrix {
    pub matrix: BitMatrix,
}

/// `H` as a `dim x m` matrix.
pub fn parity_check_matrix(inst: &SyndromeInstance) -> BitMatrix {
    let mut h = BitMatrix::zeros(inst.dim, inst.n_columns());
    for i in 0..inst.n_columns() {
        for j in ones_of(inst.col(i)) {
            h.set(j, i, true);
        }
    }
    h
}

/// For `H = (I | P)`, `G = (P ; I)`.
pub fn generator_from_parities(inst: &SyndromeInstance) -> Result<GeneratorMatrix> {
    let (n, m) = (inst.dim, inst.n_columns());
    if m < n || (0..n).any(|j| !ones_of(inst.col(j)).eq(std::iter::once(j))) {
        return Err(Error::Precondition("the first columns of H must be the canonical vectors".into()));
    }
    let mut g = BitMatrix::zeros(m, m - n);
    for k in 0..m - n {
        for j in ones_of(inst.col(n + k)) {
            g.set(j, k, true);
        }
        g.set(n + k, k, true);
    }
    Ok(GeneratorMatrix { matrix: g })
}

/// Parities in chronological order: each node beyond the first `n` is the sum
/// of two earlier ones (its triangle).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityGraph {
    pub parities: Vec<BitVec>,
    /// `parents[i]` for `i >= n`; `None` for the canonical nodes.
    pub parents: Vec<Option<(usize, usize)>>,
}

impl ParityGraph {
    /// Directed edges `parent -> child`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parents
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|(a, b)| [(a, i), (b, i)]))
            .flatten()
            .collect()
    }

    pub fn in_degree(&self, node: usize) -> usize {
        if self.parents[node].is_some() {
            2
        } else {
            0
        }
    }
}

/// Builds the triangle graph of a chronological parity history whose first
/// `n` entries are the canonical vectors, together with the generator matrix
/// with one column per triangle (three ones each).
pub fn parity_graph(history: &[BitVec]) -> Result<(ParityGraph, GeneratorMatrix)> {
    let n = history.first().map_or(0, BitVec::len);
    if history.len() < n || (0..n).any(|j| history[j] != BitVec::unit(n, j)) {
        return Err(Error::Precondition("history must start with the canonical vectors".into()));
    }
    let m = history.len();
    let mut first_seen: HashMap<&BitVec, usize> = HashMap::new();
    let mut parents = vec![None; m];
    for (idx, p) in history.iter().enumerate() {
        if p.len() != n {
            return Err(Error::DimensionMismatch(format!("parity {idx} has length {}", p.len())));
        }
        if idx >= n {
            let found = (0..idx).find_map(|a| {
                let other = p.xor(&history[a]);
                first_seen.get(&other).copied().filter(|&b| b != a && b < idx).map(|b| (a.min(b), a.max(b)))
            });
            parents[idx] = Some(found.ok_or_else(|| {
                Error::Precondition(format!("parity {idx} is not the sum of two earlier parities"))
            })?);
        }
        first_seen.entry(p).or_insert(idx);
    }
    let mut g = BitMatrix::zeros(m, m - n);
    for idx in n..m {
        let (a, b) = parents[idx].expect("non-canonical node");
        g.set(a, idx - n, true);
        g.set(b, idx - n, true);
        g.set(idx, idx - n, true);
    }
    Ok((
        ParityGraph {
            parities: history.to_vec(),
            parents,
        },
        GeneratorMatrix { matrix: g },
    ))
}

/// Chronological parity history of a circuit: the canonical vectors, then the
/// new parity of the target after each gate.
pub fn harvest_history(circuit: &CnotCircuit) -> Vec<BitVec> {
    let n = circuit.n_wires();
    let mut state = BitMatrix::identity(n);
    let mut out: Vec<BitVec> = (0..n).map(|j| BitVec::unit(n, j)).collect();
    for g in circuit.gates() {
        state.add_row(g.target, g.control);
        out.push(state.row_vec(g.target));
    }
    out
}
