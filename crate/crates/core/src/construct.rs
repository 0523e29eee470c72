//! The character-sum construction of F-Diophantine sets.
//!
//! For a polynomial F of type I or type II, the specialization family
//! `V(n) = { F(x^t1, ..., x^tk) : 1 <= t_i <= n }` has the property that no
//! product over a subset of V is a non-square constant times a square. A
//! complete-character-sum argument then guarantees a witness y0 of order at
//! least n with every g(y0) a square, and `A = {y0^1, ..., y0^n}` is an
//! F-Diophantine set of size n. Two alternate families are supported:
//! distinct specialization exponents (for homogeneous diagonal F with
//! square coefficients, which is of neither type) and doubled exponents
//! (producing a set of square elements).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::charsum::{chi, is_const_times_square, CharTable, CharValue, CHAR_TABLE_CAP};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::{MultiPoly, UniPoly};

mod bound;

pub use bound::{heuristic_bound, theorem_bound, theorem_bound_dm, TheoremBound};

/// Which specialization family to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// All exponent tuples in [1, n]^k.
    Standard,
    /// Tuples of pairwise-distinct exponents from {1, ..., n}.
    DistinctExponents,
    /// Exponents doubled; the resulting set consists of square elements.
    SquareElements,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Standard => "standard",
            Strategy::DistinctExponents => "distinct-exponents",
            Strategy::SquareElements => "square-elements",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Strategy::Standard),
            "distinct-exponents" | "distinct_exponents" => Ok(Strategy::DistinctExponents),
            "square-elements" | "square_elements" => Ok(Strategy::SquareElements),
            other => Err(Error::InvalidArgument(format!(
                "unknown strategy {other:?}"
            ))),
        }
    }
}

/// Cap on the number of specialization tuples enumerated by build_plan.
const TUPLE_CAP: u128 = 1 << 22;

/// The family V plus everything the witness scan needs.
#[derive(Debug, Clone)]
pub struct ConstructionPlan {
    f: MultiPoly,
    n: u32,
    strategy: Strategy,
    /// Deduplicated specializations, sorted canonically.
    v: Vec<UniPoly>,
    /// Specializations that collapsed to a square constant and were dropped.
    collapsed_dropped: u32,
    feasible: bool,
    infeasibility_reason: Option<String>,
    /// Minimum multiplicative order a witness must have (2n for the
    /// square-elements family, n otherwise).
    min_order: u64,
    /// The coarse family-size bound (dn)^m used by the census inequality.
    v_bound: u128,
}

impl ConstructionPlan {
    pub fn f(&self) -> &MultiPoly {
        &self.f
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn family(&self) -> &[UniPoly] {
        &self.v
    }

    pub fn feasible(&self) -> bool {
        self.feasible
    }

    pub fn infeasibility_reason(&self) -> Option<&str> {
        self.infeasibility_reason.as_deref()
    }

    pub fn min_order(&self) -> u64 {
        self.min_order
    }

    pub fn to_json(&self) -> Value {
        json!({
            "f": self.f.to_json(),
            "field": self.f.spec().to_json(),
            "n": self.n,
            "strategy": self.strategy.name(),
            "v": self.v.iter().map(UniPoly::to_json).collect::<Vec<_>>(),
            "v_size": self.v.len(),
            "v_bound": self.v_bound.to_string(),
            "collapsed_dropped": self.collapsed_dropped,
            "feasible": self.feasible,
            "infeasibility_reason": self.infeasibility_reason,
            "min_order": self.min_order,
        })
    }

    /// Samples subsets W of V (all of them when |V| <= 10, otherwise
    /// `samples` seeded draws) and returns the first whose product is a
    /// non-square constant times a square, i.e. a violation of the
    /// construction's core guarantee. Returns None when every sampled
    /// product is clean.
    pub fn subset_product_diagnostic(
        &self,
        samples: usize,
        seed: u64,
    ) -> Result<Option<Vec<usize>>> {
        let spec = self.f.spec().as_ref();
        let masks: Vec<u64> = if self.v.len() <= 10 {
            (1..(1u64 << self.v.len())).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples)
                .map(|_| {
                    let mut m = 0u64;
                    for i in 0..self.v.len().min(63) {
                        if rng.gen_bool(0.5) {
                            m |= 1 << i;
                        }
                    }
                    m
                })
                .filter(|&m| m != 0)
                .collect()
        };
        for mask in masks {
            let mut product: Option<UniPoly> = None;
            let mut indices = Vec::new();
            for (i, g) in self.v.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    indices.push(i);
                    product = Some(match product {
                        None => g.clone(),
                        Some(acc) => mul_unipoly(&acc, g, spec),
                    });
                }
            }
            let product = product.expect("mask nonzero");
            if product.is_zero() {
                continue;
            }
            if is_const_times_square(&product)?
                && chi(spec, product.leading_coeff()) == CharValue::NonSquare
            {
                return Ok(Some(indices));
            }
        }
        Ok(None)
    }
}

fn mul_unipoly(a: &UniPoly, b: &UniPoly, spec: &FieldSpec) -> UniPoly {
    let mut coeffs: BTreeMap<u64, FieldElement> = BTreeMap::new();
    for (da, ca) in a.coeffs() {
        for (db, cb) in b.coeffs() {
            let c = spec.mul(ca, cb);
            let entry = coeffs.entry(da + db).or_insert(FieldElement::ZERO);
            *entry = spec.add(*entry, c);
        }
    }
    UniPoly::new(std::sync::Arc::clone(a.spec()), coeffs)
}

/// Builds the specialization family for the given strategy.
///
/// Specializations that collapse to a constant square impose no condition
/// and are dropped; a collapse to a constant non-square makes the whole
/// plan infeasible and is reported as such.
pub fn build_plan(f: &MultiPoly, n: u32, strategy: Strategy) -> Result<ConstructionPlan> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let k = f.k();
    let class = f.classify()?;
    let hypothesis_ok = match strategy {
        Strategy::Standard | Strategy::SquareElements => class.type1 || class.type2,
        // The distinct-exponent family is a sub-family of the standard one,
        // so either the square-diagonal shape or type I/II suffices.
        Strategy::DistinctExponents => {
            f.is_homogeneous_square_diagonal() || class.type1 || class.type2
        }
    };
    if !hypothesis_ok {
        let need = match strategy {
            Strategy::DistinctExponents => {
                "homogeneous sum of square-coefficient pure powers, or type I/II"
            }
            _ => "type I or type II",
        };
        return Err(Error::StrategyHypothesisUnmet(format!(
            "strategy {} needs {need}",
            strategy.name()
        )));
    }
    if strategy == Strategy::DistinctExponents && (n as usize) < k {
        return Err(Error::InvalidArgument(format!(
            "distinct-exponents needs n >= k = {k}"
        )));
    }
    let tuple_count = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if tuple_count > TUPLE_CAP {
        return Err(Error::SizeLimit(format!(
            "n^k = {tuple_count} specialization tuples exceeds the cap"
        )));
    }

    let spec = f.spec().as_ref();
    let mut v: Vec<UniPoly> = Vec::new();
    let mut seen: std::collections::BTreeSet<Vec<(u64, u64)>> = std::collections::BTreeSet::new();
    let mut collapsed_dropped = 0u32;
    let mut feasible = true;
    let mut infeasibility_reason = None;

    let mut thetas = vec![1u32; k];
    'tuples: loop {
        let distinct_ok = strategy != Strategy::DistinctExponents || {
            let mut sorted = thetas.clone();
            sorted.sort_unstable();
            sorted.windows(2).all(|w| w[0] != w[1])
        };
        if distinct_ok {
            let effective: Vec<u32> = match strategy {
                Strategy::SquareElements => thetas.iter().map(|&t| 2 * t).collect(),
                _ => thetas.clone(),
            };
            let g = f.specialize(&effective)?;
            if g.is_constant() {
                // no condition on y when the constant is a square
                match chi(spec, g.constant_coeff()) {
                    CharValue::NonSquare => {
                        feasible = false;
                        infeasibility_reason = Some(format!(
                            "specialization at {thetas:?} collapsed to the non-square constant {}",
                            g.constant_coeff().encoding()
                        ));
                    }
                    _ => collapsed_dropped += 1,
                }
            } else {
                let key: Vec<(u64, u64)> = g.coeffs().map(|(d, c)| (d, c.encoding())).collect();
                if seen.insert(key) {
                    v.push(g);
                }
            }
        }
        // odometer over [1, n]^k
        let mut i = k;
        loop {
            if i == 0 {
                break 'tuples;
            }
            i -= 1;
            thetas[i] += 1;
            if thetas[i] <= n {
                break;
            }
            thetas[i] = 1;
        }
    }

    v.sort_by(|a, b| {
        let ka: Vec<(u64, u64)> = a.coeffs().map(|(d, c)| (d, c.encoding())).collect();
        let kb: Vec<(u64, u64)> = b.coeffs().map(|(d, c)| (d, c.encoding())).collect();
        (a.degree(), ka).cmp(&(b.degree(), kb))
    });

    // Verify the property the proof actually uses on V itself: a square
    // constant term (type I) or a square leading coefficient (type II /
    // distinct exponents). Exponent collisions sum coefficients, so this is
    // checked rather than assumed.
    if feasible {
        let type1_route = class.type1;
        for g in &v {
            let anchor_ok = if type1_route {
                chi(spec, g.constant_coeff()).value() == 1
            } else {
                chi(spec, g.leading_coeff()).value() == 1
            };
            if !anchor_ok {
                feasible = false;
                infeasibility_reason = Some(format!(
                    "specialization {g} lost its square {}",
                    if type1_route {
                        "constant term"
                    } else {
                        "leading coefficient"
                    }
                ));
                break;
            }
        }
    }

    let d = f.degree().ok_or(Error::NoMonomials)? as u128;
    let m = f.num_monomials() as u128;
    let dn = d
        * n as u128
        * if strategy == Strategy::SquareElements {
            2
        } else {
            1
        };
    let v_bound = dn.checked_pow(m as u32).unwrap_or(u128::MAX);

    Ok(ConstructionPlan {
        f: f.clone(),
        n,
        strategy,
        v,
        collapsed_dropped,
        feasible,
        infeasibility_reason,
        min_order: match strategy {
            Strategy::SquareElements => 2 * n as u64,
            _ => n as u64,
        },
        v_bound,
    })
}

/// Scan mode: stop at the first witness, or census the whole witness set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    First,
    FullCensus,
}

/// Result of a witness scan over F_q*.
#[derive(Debug, Clone)]
pub struct SearchReport {
    pub plan: ConstructionPlan,
    pub mode: SearchMode,
    /// Elements visited by the scan (all encodings <= the stop point).
    pub candidates_examined: u64,
    /// Scanned elements skipped for having order below the plan minimum.
    pub low_order_skipped: u64,
    /// The witness set Y, complete in census mode.
    pub witnesses: Vec<FieldElement>,
    pub first_witness: Option<FieldElement>,
    /// q / 2^((dn)^m) - (dn)^(m+1) sqrt(q), the guaranteed census floor.
    pub census_lower_bound: f64,
}

impl SearchReport {
    pub fn to_json(&self) -> Value {
        let spec = self.plan.f().spec();
        json!({
            "plan": self.plan.to_json(),
            "mode": self.mode,
            "candidates_examined": self.candidates_examined,
            "low_order_skipped": self.low_order_skipped,
            "witnesses": self.witnesses.iter().map(|&w| spec.elem_to_json(w)).collect::<Vec<_>>(),
            "first_witness": self.first_witness.map(|w| spec.elem_to_json(w)),
            "census_lower_bound": self.census_lower_bound,
        })
    }
}

/// The elements of order below `min_order`: the union of the cyclic
/// subgroups of each divisor of q - 1 below the threshold. At most
/// min_order^2 elements, built through the group generator.
fn low_order_set(spec: &FieldSpec, min_order: u64) -> std::collections::HashSet<u64> {
    let mut set = std::collections::HashSet::new();
    if min_order <= 1 {
        return set;
    }
    let group = spec.q() - 1;
    let gen = spec.generator();
    for d in 1..min_order.min(group + 1) {
        if !group.is_multiple_of(d) {
            continue;
        }
        let base = spec.pow(gen, group / d);
        let mut x = FieldElement::ONE;
        for _ in 0..d {
            set.insert(x.encoding());
            x = spec.mul(x, base);
        }
    }
    set
}

/// Scans F_q* in encoding order for witnesses: elements of order at least
/// the plan minimum at which every g in V evaluates to a square.
///
/// Deterministic regardless of thread count: first mode reports the
/// smallest-encoding witness, census mode the full sorted witness set.
pub fn find_witness(plan: &ConstructionPlan, mode: SearchMode) -> Result<SearchReport> {
    if !plan.feasible {
        return Err(Error::InfeasibleCollapse(
            plan.infeasibility_reason
                .clone()
                .unwrap_or_else(|| "plan marked infeasible".into()),
        ));
    }
    let spec = plan.f.spec();
    let q = spec.q();
    if mode == SearchMode::FullCensus && q > crate::charsum::CHAR_SUM_CAP {
        return Err(Error::SizeLimit(format!(
            "full census enumerates all of F_q*, capped at q <= {}",
            crate::charsum::CHAR_SUM_CAP
        )));
    }
    let zset = low_order_set(spec, plan.min_order);
    let table = if q <= CHAR_TABLE_CAP {
        Some(CharTable::build(spec)?)
    } else {
        None
    };

    let accepts = |enc: u64| -> bool {
        if zset.contains(&enc) {
            return false;
        }
        let y = FieldElement::from_encoding_unchecked(enc);
        plan.v.iter().all(|g| {
            let value = g.eval_nonzero(y);
            match &table {
                Some(t) => t.chi(value).is_square(),
                None => chi(spec, value).is_square(),
            }
        })
    };

    const PAR_THRESHOLD: u64 = 1 << 14;
    let witnesses: Vec<u64> = match mode {
        SearchMode::First => {
            let found = if q > PAR_THRESHOLD {
                (1..q).into_par_iter().find_first(|&enc| accepts(enc))
            } else {
                (1..q).find(|&enc| accepts(enc))
            };
            found.into_iter().collect()
        }
        SearchMode::FullCensus => {
            if q > PAR_THRESHOLD {
                (1..q).into_par_iter().filter(|&enc| accepts(enc)).collect()
            } else {
                (1..q).filter(|&enc| accepts(enc)).collect()
            }
        }
    };

    // Counters are defined by the deterministic scan semantics: everything
    // up to the stop point counts as examined.
    let stop = match mode {
        SearchMode::First => witnesses.first().copied().unwrap_or(q - 1),
        SearchMode::FullCensus => q - 1,
    };
    let low_order_skipped = zset.iter().filter(|&&z| z >= 1 && z <= stop).count() as u64;

    Ok(SearchReport {
        plan: plan.clone(),
        mode,
        candidates_examined: stop,
        low_order_skipped,
        witnesses: witnesses
            .iter()
            .map(|&w| FieldElement::from_encoding_unchecked(w))
            .collect(),
        first_witness: witnesses
            .first()
            .map(|&w| FieldElement::from_encoding_unchecked(w)),
        census_lower_bound: census_lower_bound(plan),
    })
}

/// q / 2^((dn)^m) - (dn)^(m+1) sqrt(q).
fn census_lower_bound(plan: &ConstructionPlan) -> f64 {
    let q = plan.f.spec().q() as f64;
    let d = plan.f.degree().unwrap_or(0) as f64;
    let m = plan.f.num_monomials() as f64;
    let dn = d * plan.n as f64;
    q * (-dn.powf(m)).exp2() - dn.powf(m + 1.0) * q.sqrt()
}

/// An F-Diophantine set produced by the construction: the first n powers of
/// a witness (2nd through 2n-th for the square-elements family).
#[derive(Debug, Clone)]
pub struct DiophantineSet {
    pub y0: FieldElement,
    pub n: u32,
    pub elements: Vec<FieldElement>,
    /// Result of a strong verification (repeats allowed); only ever set by
    /// the verifier, never assumed from the construction.
    pub strong: bool,
    pub strategy: Strategy,
}

impl DiophantineSet {
    pub fn to_json(&self, spec: &FieldSpec) -> Value {
        json!({
            "y0": spec.elem_to_json(self.y0),
            "n": self.n,
            "elements": self.elements.iter().map(|&a| spec.elem_to_json(a)).collect::<Vec<_>>(),
            "strong": self.strong,
            "strategy": self.strategy.name(),
        })
    }
}

/// Builds the plan, scans for the first witness y0 and assembles the set.
/// When n is omitted it defaults to max(theorem bound, 2), falling back to
/// 2 when the bound formula is outside its domain (tiny q).
pub fn construct_set(f: &MultiPoly, n: Option<u32>, strategy: Strategy) -> Result<DiophantineSet> {
    let q = f.spec().q();
    let n = match n {
        Some(n) => n,
        None => {
            let by_bound = match theorem_bound(f, q as u128) {
                Ok(b) => b.value,
                Err(Error::DomainError(_)) => 0,
                Err(e) => return Err(e),
            };
            (by_bound.max(2)).min(u32::MAX as u64) as u32
        }
    };
    let plan = build_plan(f, n, strategy)?;
    let report = find_witness(&plan, SearchMode::First)?;
    let y0 = report.first_witness.ok_or_else(|| {
        Error::NoWitness(format!(
            "no element of order >= {} makes all {} specializations square over q={q}",
            plan.min_order,
            plan.family().len()
        ))
    })?;
    Ok(assemble_set(f.spec(), y0, n, strategy))
}

fn assemble_set(spec: &FieldSpec, y0: FieldElement, n: u32, strategy: Strategy) -> DiophantineSet {
    let step = match strategy {
        Strategy::SquareElements => 2u64,
        _ => 1,
    };
    let base = spec.pow(y0, step);
    let mut elements = Vec::with_capacity(n as usize);
    let mut x = FieldElement::ONE;
    for _ in 0..n {
        x = spec.mul(x, base);
        elements.push(x);
    }
    DiophantineSet {
        y0,
        n,
        elements,
        strong: false,
        strategy,
    }
}

/// Largest n <= n_cap for which a witness exists, found by binary search.
/// Sound because the families are nested: V(n) is contained in V(n+1) and
/// the order threshold grows with n, so witness existence is monotone
/// non-increasing in n.
pub fn maximize(f: &MultiPoly, strategy: Strategy, n_cap: u32) -> Result<DiophantineSet> {
    let floor_n = match strategy {
        Strategy::DistinctExponents => (f.k() as u32).max(2),
        _ => 2,
    };
    if n_cap < floor_n {
        return Err(Error::InvalidArgument(format!(
            "n_cap must be at least {floor_n}"
        )));
    }
    let exists = |n: u32| -> Result<Option<FieldElement>> {
        let plan = build_plan(f, n, strategy)?;
        Ok(find_witness(&plan, SearchMode::First)?.first_witness)
    };
    if exists(floor_n)?.is_none() {
        // best-effort n = 1 (not meaningful for distinct exponents with k > 1)
        if strategy != Strategy::DistinctExponents {
            if let Some(y0) = exists(1)? {
                return Ok(assemble_set(f.spec(), y0, 1, strategy));
            }
        }
        return Err(Error::NoWitness(format!(
            "no witness even at n = {floor_n}"
        )));
    }
    let mut lo = floor_n;
    let mut hi = n_cap;
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if exists(mid)?.is_some() {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let y0 = exists(lo)?.expect("lo is a witnessed size");
    Ok(assemble_set(f.spec(), y0, lo, strategy))
}
