//! Ground truth: verification of candidate sets, the exact maximum
//! F-Diophantine set size by exhaustive branch-and-bound, and greedy
//! extension of valid sets.
//!
//! Validity is hereditary (every subset of a valid set is valid), which is
//! what makes branch-and-bound complete: for k = 2 the compatible pairs
//! form a graph and the maximum set is its maximum clique; for k >= 3 the
//! search maintains the incremental k-subset conditions directly.

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::charsum::{chi, CharTable, CHAR_TABLE_CAP};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::MultiPoly;

/// How ordered tuples quantify over a k-subset for asymmetric F.
///
/// The definition quantifies over distinct a_1, ..., a_k, which this module
/// reads as "every ordering of every k-subset" (the strongest reading, the
/// default). `SingleOrdering` checks one ascending-encoding ordering per
/// subset instead. For symmetric F the two agree and the cheap path is
/// taken automatically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TupleMode {
    #[default]
    AllOrderings,
    SingleOrdering,
}

/// Outcome of verifying one candidate set.
#[derive(Debug, Clone)]
pub struct VerifyResult {
    pub valid: bool,
    /// Only populated when a strong (repeats-allowed) check was requested.
    pub strong_valid: Option<bool>,
    /// First failing tuple in deterministic order, with its non-square value.
    pub counterexample: Option<(Vec<FieldElement>, FieldElement)>,
}

impl VerifyResult {
    pub fn to_json(&self, spec: &FieldSpec) -> Value {
        json!({
            "valid": self.valid,
            "strong_valid": self.strong_valid,
            "counterexample": self.counterexample.as_ref().map(|(tuple, value)| json!({
                "tuple": tuple.iter().map(|&a| spec.elem_to_json(a)).collect::<Vec<_>>(),
                "value": spec.elem_to_json(*value),
            })),
        })
    }
}

struct Checker<'a> {
    f: &'a MultiPoly,
    table: Option<CharTable>,
    single_ordering: bool,
}

impl<'a> Checker<'a> {
    fn new(f: &'a MultiPoly, mode: TupleMode) -> Result<Checker<'a>> {
        let spec = f.spec();
        let table = if spec.q() <= CHAR_TABLE_CAP {
            Some(CharTable::build(spec)?)
        } else {
            None
        };
        Ok(Checker {
            f,
            table,
            single_ordering: mode == TupleMode::SingleOrdering || f.is_symmetric(),
        })
    }

    fn value_is_square(&self, point: &[FieldElement]) -> Result<Option<FieldElement>> {
        let value = self.f.evaluate(point)?;
        let square = match &self.table {
            Some(t) => t.chi(value).is_square(),
            None => chi(self.f.spec(), value).is_square(),
        };
        Ok(if square { None } else { Some(value) })
    }

    /// Checks one k-subset (ascending order); returns the first failing
    /// ordered tuple, permutations enumerated in lexicographic order.
    fn subset_ok(
        &self,
        subset: &[FieldElement],
    ) -> Result<Option<(Vec<FieldElement>, FieldElement)>> {
        if self.single_ordering {
            if let Some(value) = self.value_is_square(subset)? {
                return Ok(Some((subset.to_vec(), value)));
            }
            return Ok(None);
        }
        let mut perm: Vec<usize> = (0..subset.len()).collect();
        loop {
            let tuple: Vec<FieldElement> = perm.iter().map(|&i| subset[i]).collect();
            if let Some(value) = self.value_is_square(&tuple)? {
                return Ok(Some((tuple, value)));
            }
            if !next_permutation(&mut perm) {
                return Ok(None);
            }
        }
    }
}

/// Lexicographic next permutation; false once the sequence is descending.
fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

fn validate_set(spec: &FieldSpec, a: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let mut sorted = a.to_vec();
    for &x in &sorted {
        if x.is_zero() {
            return Err(Error::ZeroElement);
        }
        spec.element(x.encoding())?;
    }
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument(
            "set elements must be distinct".into(),
        ));
    }
    Ok(sorted)
}

/// Verifies that A is an F-Diophantine set. Distinct mode checks every
/// k-subset (vacuously valid when |A| < k); strong mode additionally checks
/// all tuples with repetition.
pub fn verify(
    f: &MultiPoly,
    a: &[FieldElement],
    strong: bool,
    mode: TupleMode,
) -> Result<VerifyResult> {
    let sorted = validate_set(f.spec(), a)?;
    let checker = Checker::new(f, mode)?;
    let k = f.k();

    let mut valid = true;
    let mut counterexample = None;
    if sorted.len() >= k {
        let mut failure = None;
        for_each_combination(sorted.len(), k, |idx| {
            let subset: Vec<FieldElement> = idx.iter().map(|&i| sorted[i]).collect();
            match checker.subset_ok(&subset) {
                Ok(None) => true,
                Ok(Some(bad)) => {
                    failure = Some(Ok(bad));
                    false
                }
                Err(e) => {
                    failure = Some(Err(e));
                    false
                }
            }
        });
        if let Some(outcome) = failure {
            let bad = outcome?;
            valid = false;
            counterexample = Some(bad);
        }
    }

    let strong_valid = if strong {
        let mut ok = true;
        let mut tuple_idx = vec![0usize; k];
        'outer: loop {
            let tuple: Vec<FieldElement> = tuple_idx.iter().map(|&i| sorted[i]).collect();
            if let Some(value) = checker.value_is_square(&tuple)? {
                ok = false;
                if counterexample.is_none() {
                    counterexample = Some((tuple, value));
                }
                break;
            }
            let mut pos = k;
            loop {
                if pos == 0 {
                    break 'outer;
                }
                pos -= 1;
                tuple_idx[pos] += 1;
                if tuple_idx[pos] < sorted.len() {
                    break;
                }
                tuple_idx[pos] = 0;
            }
        }
        Some(ok)
    } else {
        None
    };

    Ok(VerifyResult {
        valid,
        strong_valid,
        counterexample,
    })
}

/// Calls `visit` with each k-combination of 0..n in lexicographic order
/// until it returns false.
fn for_each_combination(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !visit(&idx) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Result of the exhaustive maximum search.
#[derive(Debug, Clone)]
pub struct MaxResult {
    pub max_size: usize,
    /// Lexicographically smallest maximum set under encoding order.
    pub witness_set: Vec<FieldElement>,
    pub nodes_explored: u64,
    /// False when the node cap stopped the search, making max_size only a
    /// lower bound.
    pub exhausted: bool,
}

impl MaxResult {
    pub fn to_json(&self, spec: &FieldSpec) -> Value {
        json!({
            "max_size": self.max_size,
            "witness_set": self.witness_set.iter().map(|&a| spec.elem_to_json(a)).collect::<Vec<_>>(),
            "exhausted": self.exhausted,
            "nodes_explored": self.nodes_explored,
        })
    }
}

pub const DEFAULT_NODE_CAP: u64 = 20_000_000;

fn exhaustive_cap(k: usize) -> u64 {
    match k {
        2 => 2000,
        3 => 200,
        4 => 80,
        _ => 64,
    }
}

/// Computes M(F; F_q) exactly by branch-and-bound over encoding order.
pub fn max_diophantine(f: &MultiPoly, node_cap: u64, mode: TupleMode) -> Result<MaxResult> {
    let spec = f.spec();
    let q = spec.q();
    let k = f.k();
    let cap = exhaustive_cap(k);
    if q > cap {
        return Err(Error::SizeLimit(format!(
            "exhaustive search for k={k} is capped at q <= {cap}"
        )));
    }
    let node_cap = if node_cap == 0 {
        DEFAULT_NODE_CAP
    } else {
        node_cap
    };
    if k == 2 {
        max_clique_k2(f, node_cap, mode)
    } else {
        max_general(f, node_cap, mode)
    }
}

/// k = 2: compatibility graph as bitset rows, searched in two phases.
/// Phase one finds the clique number with Tomita-style coloring order
/// (fast, order-free); phase two re-searches in strict encoding order for
/// the lexicographically smallest clique of that size.
fn max_clique_k2(f: &MultiPoly, node_cap: u64, mode: TupleMode) -> Result<MaxResult> {
    let spec = f.spec();
    let checker = Checker::new(f, mode)?;
    let n = (spec.q() - 1) as usize;
    let words = n.div_ceil(64);
    let elems: Vec<FieldElement> = (1..spec.q())
        .map(FieldElement::from_encoding_unchecked)
        .collect();

    let mut adj = vec![vec![0u64; words]; n];
    for i in 0..n {
        for j in i + 1..n {
            if checker.subset_ok(&[elems[i], elems[j]])?.is_none() {
                adj[i][j / 64] |= 1 << (j % 64);
                adj[j][i / 64] |= 1 << (i % 64);
            }
        }
    }

    let mut search = CliqueSearch {
        adj: &adj,
        words,
        nodes: 0,
        node_cap,
        capped: false,
    };
    let mut initial = vec![0u64; words];
    for v in 0..n {
        initial[v / 64] |= 1 << (v % 64);
    }

    let mut best: Vec<usize> = Vec::new();
    search.size_phase(&mut Vec::new(), &initial, &mut best);

    // With the size known, hunt the lex-smallest witness of that size. On a
    // capped run keep the phase-one clique: still a verified lower bound.
    if !search.capped && !best.is_empty() {
        let mut witness = Vec::new();
        search.lex_phase(&mut Vec::new(), &initial, best.len(), &mut witness);
        if !witness.is_empty() {
            best = witness;
        }
    }
    best.sort_unstable();

    Ok(MaxResult {
        max_size: best.len(),
        witness_set: best.iter().map(|&i| elems[i]).collect(),
        nodes_explored: search.nodes,
        exhausted: !search.capped,
    })
}

struct CliqueSearch<'g> {
    adj: &'g [Vec<u64>],
    words: usize,
    nodes: u64,
    node_cap: u64,
    capped: bool,
}

impl<'g> CliqueSearch<'g> {
    /// Greedy coloring of `cand` in ascending vertex order. Returns the
    /// vertices ordered by color class with their color numbers (1-based);
    /// a clique in `cand` has at most max-color vertices.
    fn color_order(&self, cand: &[u64]) -> Vec<(usize, usize)> {
        let mut classes: Vec<Vec<u64>> = Vec::new();
        let mut ordered: Vec<(usize, usize)> = Vec::new();
        for v in iter_bits(cand, self.words) {
            let mut color = classes.len();
            for (ci, class) in classes.iter().enumerate() {
                let conflict = class.iter().zip(&self.adj[v]).any(|(&c, &a)| c & a != 0);
                if !conflict {
                    color = ci;
                    break;
                }
            }
            if color == classes.len() {
                classes.push(vec![0u64; self.words]);
            }
            classes[color][v / 64] |= 1 << (v % 64);
            ordered.push((v, color + 1));
        }
        ordered.sort_by_key(|&(_, c)| c);
        ordered
    }

    /// Clique number: process vertices in decreasing color order, pruning
    /// on depth + color, shrinking the candidate set as processed vertices
    /// retire. Records the best clique found.
    fn size_phase(&mut self, current: &mut Vec<usize>, cand: &[u64], best: &mut Vec<usize>) {
        self.nodes += 1;
        if self.nodes > self.node_cap {
            self.capped = true;
            return;
        }
        if current.len() > best.len() {
            *best = current.clone();
        }
        let ordered = self.color_order(cand);
        let mut cand = cand.to_vec();
        for &(v, color) in ordered.iter().rev() {
            if current.len() + color <= best.len() {
                return; // colors only decrease from here
            }
            let mut next = vec![0u64; self.words];
            let mut any = false;
            for w in 0..self.words {
                next[w] = cand[w] & self.adj[v][w];
                any |= next[w] != 0;
            }
            current.push(v);
            if any {
                self.size_phase(current, &next, best);
            } else if current.len() > best.len() {
                *best = current.clone();
            }
            current.pop();
            if self.capped {
                return;
            }
            cand[v / 64] &= !(1 << (v % 64));
        }
    }

    /// First clique of exactly `target` vertices in encoding-lexicographic
    /// order; fills `found` and unwinds.
    fn lex_phase(
        &mut self,
        current: &mut Vec<usize>,
        cand: &[u64],
        target: usize,
        found: &mut Vec<usize>,
    ) {
        if !found.is_empty() || self.capped {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.node_cap {
            self.capped = true;
            return;
        }
        if current.len() == target {
            *found = current.clone();
            return;
        }
        let need = target - current.len();
        let remaining = popcount(cand);
        if remaining < need {
            return;
        }
        let colors = self.color_order(cand).last().map(|&(_, c)| c).unwrap_or(0);
        if colors < need {
            return;
        }
        let mut rest = remaining;
        for v in iter_bits(cand, self.words) {
            if rest < need {
                return;
            }
            rest -= 1;
            let mut next = vec![0u64; self.words];
            for w in 0..self.words {
                next[w] = cand[w] & self.adj[v][w];
            }
            clear_upto(&mut next, v);
            current.push(v);
            self.lex_phase(current, &next, target, found);
            current.pop();
            if !found.is_empty() || self.capped {
                return;
            }
        }
    }
}

fn popcount(bits: &[u64]) -> usize {
    bits.iter().map(|w| w.count_ones() as usize).sum()
}

fn iter_bits(bits: &[u64], words: usize) -> impl Iterator<Item = usize> + '_ {
    (0..words).flat_map(move |w| {
        let mut word = bits[w];
        std::iter::from_fn(move || {
            if word == 0 {
                return None;
            }
            let b = word.trailing_zeros() as usize;
            word &= word - 1;
            Some(w * 64 + b)
        })
    })
}

fn clear_upto(bits: &mut [u64], v: usize) {
    let w = v / 64;
    for word in bits.iter_mut().take(w) {
        *word = 0;
    }
    bits[w] &= !((1u64 << (v % 64)) - 1) & !(1u64 << (v % 64));
}

/// k >= 3: branch-and-bound maintaining the candidate list incrementally.
/// Adding v to S only creates k-subsets containing v, and filtering the
/// candidates after the addition only needs the subsets containing both v
/// and the candidate. Subset verdicts are memoized.
fn max_general(f: &MultiPoly, node_cap: u64, mode: TupleMode) -> Result<MaxResult> {
    let spec = f.spec();
    let checker = Checker::new(f, mode)?;
    let k = f.k();
    let elems: Vec<FieldElement> = (1..spec.q())
        .map(FieldElement::from_encoding_unchecked)
        .collect();

    struct Search<'c, 'f> {
        checker: &'c Checker<'f>,
        elems: Vec<FieldElement>,
        k: usize,
        memo: HashMap<Vec<usize>, bool>,
        best: Vec<usize>,
        nodes: u64,
        node_cap: u64,
        capped: bool,
    }

    impl<'c, 'f> Search<'c, 'f> {
        fn subset_valid(&mut self, subset_idx: &[usize]) -> Result<bool> {
            if let Some(&ok) = self.memo.get(subset_idx) {
                return Ok(ok);
            }
            let subset: Vec<FieldElement> = subset_idx.iter().map(|&i| self.elems[i]).collect();
            let ok = self.checker.subset_ok(&subset)?.is_none();
            self.memo.insert(subset_idx.to_vec(), ok);
            Ok(ok)
        }

        /// All new k-subsets created by appending u to S + v are those
        /// containing both v and u plus a (k-2)-subset of S. For k = 1 the
        /// elements impose no joint conditions (singletons are filtered
        /// before the search starts).
        fn pair_extension_valid(&mut self, s: &[usize], v: usize, u: usize) -> Result<bool> {
            if self.k < 2 || s.len() + 2 < self.k {
                return Ok(true);
            }
            let mut ok = true;
            let mut failure: Option<Error> = None;
            let need = self.k - 2;
            let mut chosen: Vec<usize> = Vec::with_capacity(self.k);
            for_each_combination(s.len(), need, |idx| {
                chosen.clear();
                chosen.extend(idx.iter().map(|&i| s[i]));
                chosen.push(v);
                chosen.push(u);
                chosen.sort_unstable();
                match self.subset_valid(&chosen) {
                    Ok(true) => true,
                    Ok(false) => {
                        ok = false;
                        false
                    }
                    Err(e) => {
                        failure = Some(e);
                        false
                    }
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
            Ok(ok)
        }

        fn expand(&mut self, s: &mut Vec<usize>, cand: &[usize]) -> Result<()> {
            self.nodes += 1;
            if self.nodes > self.node_cap {
                self.capped = true;
                return Ok(());
            }
            if s.len() > self.best.len() {
                self.best = s.clone();
            }
            for (i, &v) in cand.iter().enumerate() {
                if s.len() + (cand.len() - i) <= self.best.len() {
                    break;
                }
                let mut next = Vec::with_capacity(cand.len() - i);
                for &u in &cand[i + 1..] {
                    if self.pair_extension_valid(s, v, u)? {
                        next.push(u);
                    }
                }
                s.push(v);
                self.expand(s, &next)?;
                s.pop();
                if self.capped {
                    return Ok(());
                }
            }
            Ok(())
        }
    }

    let mut search = Search {
        checker: &checker,
        elems: elems.clone(),
        k,
        memo: HashMap::new(),
        best: Vec::new(),
        nodes: 0,
        node_cap,
        capped: false,
    };
    // singletons are only constrained when k = 1; beyond that every
    // element is vacuously admissible at the root
    let mut initial: Vec<usize> = Vec::with_capacity(elems.len());
    for i in 0..elems.len() {
        if k > 1 || search.subset_valid(&[i])? {
            initial.push(i);
        }
    }
    search.expand(&mut Vec::new(), &initial)?;

    Ok(MaxResult {
        max_size: search.best.len(),
        witness_set: search.best.iter().map(|&i| elems[i]).collect(),
        nodes_explored: search.nodes,
        exhausted: !search.capped,
    })
}

/// Repeatedly adds the smallest-encoding element that keeps the set valid.
/// The seed set must itself verify.
pub fn greedy_extend(
    f: &MultiPoly,
    a: &[FieldElement],
    mode: TupleMode,
) -> Result<Vec<FieldElement>> {
    let spec = f.spec();
    let mut current = validate_set(spec, a)?;
    let seed = verify(f, &current, false, mode)?;
    if !seed.valid {
        return Err(Error::InvalidArgument(
            "greedy extension needs a valid seed set".into(),
        ));
    }
    let checker = Checker::new(f, mode)?;
    let k = f.k();
    loop {
        let mut added = false;
        'scan: for enc in 1..spec.q() {
            let v = FieldElement::from_encoding_unchecked(enc);
            if current.binary_search(&v).is_ok() {
                continue;
            }
            // check every k-subset of current + v that contains v
            if current.len() + 1 >= k {
                let mut ok = true;
                let mut failure: Option<Error> = None;
                for_each_combination(current.len(), k - 1, |idx| {
                    let mut subset: Vec<FieldElement> = idx.iter().map(|&i| current[i]).collect();
                    subset.push(v);
                    subset.sort_unstable();
                    match checker.subset_ok(&subset) {
                        Ok(None) => true,
                        Ok(Some(_)) => {
                            ok = false;
                            false
                        }
                        Err(e) => {
                            failure = Some(e);
                            false
                        }
                    }
                });
                if let Some(e) = failure {
                    return Err(e);
                }
                if !ok {
                    continue 'scan;
                }
            }
            let pos = current.binary_search(&v).unwrap_err();
            current.insert(pos, v);
            added = true;
            break;
        }
        if !added {
            return Ok(current);
        }
    }
}
