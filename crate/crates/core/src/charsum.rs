//! The quadratic character of F_q, complete character sums, distinct-root
//! counting and Weil-bound certification.
//!
//! Throughout the crate "square" means chi in {0, +1}: zero counts as a
//! square. The Weil bound certified here is
//! `|sum_y chi(g(y))| <= (s - 1) sqrt(q)` for g not a constant times a
//! square, where s is the number of distinct roots of g in its splitting
//! field. s equals the degree of the squarefree radical, which we compute
//! with a characteristic-p-aware decomposition: derivative-zero blocks are
//! p-th powers and are handled by taking coefficient-wise p-th roots
//! (inverse Frobenius, c -> c^(p^(e-1))) and recursing.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::UniPoly;

/// Enumeration cap for complete character sums: a partial sum certifies
/// nothing, so beyond this the operations refuse instead of subsampling.
pub const CHAR_SUM_CAP: u64 = 1 << 24;

/// Degree cap for the dense factor machinery.
const DENSE_DEGREE_CAP: u64 = 1 << 20;

/// Value of the quadratic character: -1, 0 or +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharValue {
    NonSquare,
    Zero,
    Square,
}

impl CharValue {
    pub fn value(self) -> i8 {
        match self {
            CharValue::NonSquare => -1,
            CharValue::Zero => 0,
            CharValue::Square => 1,
        }
    }

    /// Squares in the inclusive sense used by the whole artifact: chi >= 0.
    pub fn is_square(self) -> bool {
        self != CharValue::NonSquare
    }
}

/// chi(a) = a^((q-1)/2), extended by chi(0) = 0.
pub fn chi(spec: &FieldSpec, a: FieldElement) -> CharValue {
    if a.is_zero() {
        return CharValue::Zero;
    }
    let r = spec.pow(a, (spec.q() - 1) / 2);
    if r == FieldElement::ONE {
        CharValue::Square
    } else {
        CharValue::NonSquare
    }
}

/// Precomputed character table, worthwhile for repeated scans when q is
/// moderate. Built once, shared read-only.
pub struct CharTable {
    values: Vec<i8>,
}

/// Largest q for which `CharTable::build` will allocate.
pub const CHAR_TABLE_CAP: u64 = 1 << 20;

impl CharTable {
    pub fn build(spec: &FieldSpec) -> Result<CharTable> {
        let q = spec.q();
        if q > CHAR_TABLE_CAP {
            return Err(Error::SizeLimit(format!(
                "character table capped at q <= {CHAR_TABLE_CAP}"
            )));
        }
        let mut values = vec![-1i8; q as usize];
        values[0] = 0;
        for a in spec.nonzero_elements() {
            let s = spec.mul(a, a);
            values[s.encoding() as usize] = 1;
        }
        Ok(CharTable { values })
    }

    pub fn chi(&self, a: FieldElement) -> CharValue {
        match self.values[a.encoding() as usize] {
            0 => CharValue::Zero,
            1 => CharValue::Square,
            _ => CharValue::NonSquare,
        }
    }
}

/// Exact complete sum of chi(g(y)) over all q field elements.
pub fn char_sum(spec: &FieldSpec, g: &UniPoly) -> Result<i64> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if spec.q() > CHAR_SUM_CAP {
        return Err(Error::SizeLimit(format!(
            "complete character sums capped at q <= {CHAR_SUM_CAP}"
        )));
    }
    let mut sum = chi(spec, g.eval(FieldElement::ZERO)).value() as i64;
    if spec.q() <= CHAR_TABLE_CAP {
        let table = CharTable::build(spec)?;
        for y in spec.nonzero_elements() {
            sum += table.chi(g.eval_nonzero(y)).value() as i64;
        }
    } else {
        for y in spec.nonzero_elements() {
            sum += chi(spec, g.eval_nonzero(y)).value() as i64;
        }
    }
    Ok(sum)
}

/// Number of distinct roots of g in its splitting field: the degree of the
/// squarefree radical.
pub fn distinct_root_count(g: &UniPoly) -> Result<u64> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if g.degree() == Some(0) {
        return Err(Error::InvalidArgument(
            "distinct-root count needs degree >= 1".into(),
        ));
    }
    let factors = squarefree_factors(g)?;
    Ok(factors.iter().map(|(f, _)| f.degree()).sum())
}

/// True iff g = c * h^2 for some constant c, i.e. every irreducible factor
/// of g occurs with even multiplicity.
pub fn is_const_times_square(g: &UniPoly) -> Result<bool> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let factors = squarefree_factors(g)?;
    Ok(factors.iter().all(|&(_, mult)| mult % 2 == 0))
}

/// The certified Weil-bound report for one polynomial.
#[derive(Debug, Clone, Serialize)]
pub struct WeilReport {
    /// Exact integer sum of chi(g(y)) over F_q.
    pub sum: i64,
    /// Distinct roots of g in its splitting field.
    pub distinct_roots: u64,
    /// (s - 1) * sqrt(q).
    pub bound: f64,
    /// |sum| <= bound, evaluated only when the lemma applies.
    pub satisfied: Option<bool>,
    /// False when g is a constant times a square, the excluded case.
    pub applicable: bool,
}

impl WeilReport {
    pub fn to_json(&self) -> Value {
        json!({
            "sum": self.sum,
            "distinct_roots": self.distinct_roots,
            "bound": self.bound,
            "satisfied": self.satisfied,
            "applicable": self.applicable,
        })
    }
}

/// Computes the complete character sum and certifies it against the Weil
/// bound. The comparison |sum| <= (s-1) sqrt(q) is decided exactly in
/// integers as sum^2 <= (s-1)^2 q.
pub fn weil_check(g: &UniPoly) -> Result<WeilReport> {
    let spec = g.spec().as_ref();
    if g.is_constant() {
        return Err(Error::InvalidArgument(
            "weil_check needs a nonconstant polynomial".into(),
        ));
    }
    let sum = char_sum(spec, g)?;
    let s = distinct_root_count(g)?;
    let bound = (s.saturating_sub(1)) as f64 * (spec.q() as f64).sqrt();
    let applicable = !is_const_times_square(g)?;
    let satisfied = if applicable {
        let lhs = (sum as i128) * (sum as i128);
        let rhs = (s as i128 - 1) * (s as i128 - 1) * spec.q() as i128;
        Some(lhs <= rhs)
    } else {
        None
    };
    Ok(WeilReport {
        sum,
        distinct_roots: s,
        bound,
        satisfied,
        applicable,
    })
}

// --- dense univariate arithmetic backing the factor machinery ---

/// Dense monic-friendly polynomial over F_q; coefficients low-to-high with
/// no trailing zeros (zero polynomial = empty vector).
#[derive(Debug, Clone, PartialEq, Eq)]
struct Dense {
    c: Vec<FieldElement>,
}

impl Dense {
    fn from_sparse(g: &UniPoly) -> Result<Dense> {
        let deg = match g.degree() {
            None => return Ok(Dense { c: vec![] }),
            Some(d) => d,
        };
        if deg > DENSE_DEGREE_CAP {
            return Err(Error::SizeLimit(format!(
                "dense factor machinery capped at degree {DENSE_DEGREE_CAP}"
            )));
        }
        let mut c = vec![FieldElement::ZERO; deg as usize + 1];
        for (d, coeff) in g.coeffs() {
            c[d as usize] = coeff;
        }
        Ok(Dense { c })
    }

    fn zero() -> Dense {
        Dense { c: vec![] }
    }

    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn degree(&self) -> u64 {
        debug_assert!(!self.c.is_empty());
        (self.c.len() - 1) as u64
    }

    fn trim(mut self) -> Dense {
        while let Some(last) = self.c.last() {
            if last.is_zero() {
                self.c.pop();
            } else {
                break;
            }
        }
        self
    }

    fn monic(&self, spec: &FieldSpec) -> Dense {
        if self.is_zero() {
            return self.clone();
        }
        let lead = *self.c.last().unwrap();
        if lead == FieldElement::ONE {
            return self.clone();
        }
        let inv = spec.inv(lead).expect("nonzero leading coefficient");
        Dense {
            c: self.c.iter().map(|&x| spec.mul(x, inv)).collect(),
        }
    }

    /// Quotient and remainder by a nonzero divisor.
    fn divrem(&self, div: &Dense, spec: &FieldSpec) -> (Dense, Dense) {
        assert!(!div.is_zero(), "division by the zero polynomial");
        if self.is_zero() || self.c.len() < div.c.len() {
            return (Dense::zero(), self.clone());
        }
        let lead_inv = spec.inv(*div.c.last().unwrap()).expect("nonzero divisor");
        let mut rem = self.c.clone();
        let mut quot = vec![FieldElement::ZERO; rem.len() - div.c.len() + 1];
        for i in (div.c.len() - 1..rem.len()).rev() {
            let factor = spec.mul(rem[i], lead_inv);
            if factor.is_zero() {
                continue;
            }
            let off = i + 1 - div.c.len();
            quot[off] = factor;
            for (j, &dc) in div.c.iter().enumerate() {
                rem[off + j] = spec.sub(rem[off + j], spec.mul(factor, dc));
            }
        }
        (Dense { c: quot }.trim(), Dense { c: rem }.trim())
    }

    fn div_exact(&self, div: &Dense, spec: &FieldSpec) -> Dense {
        let (q, r) = self.divrem(div, spec);
        debug_assert!(r.is_zero(), "exact division had a remainder");
        q
    }

    /// Monic gcd by the Euclidean algorithm.
    fn gcd(&self, other: &Dense, spec: &FieldSpec) -> Dense {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b, spec);
            a = b;
            b = r;
        }
        a.monic(spec)
    }

    fn derivative(&self, spec: &FieldSpec) -> Dense {
        if self.c.len() <= 1 {
            return Dense::zero();
        }
        let out = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| spec.mul(spec.from_int(i as i64), a))
            .collect();
        Dense { c: out }.trim()
    }

    /// For a polynomial with only x^(p*i) terms, the p-th root: coefficient
    /// c at degree p*i maps to c^(p^(e-1)) at degree i.
    fn pth_root(&self, spec: &FieldSpec) -> Dense {
        let p = spec.p() as usize;
        debug_assert!(self
            .c
            .iter()
            .enumerate()
            .all(|(i, c)| i % p == 0 || c.is_zero()));
        let mut inv_frob_exp = 1u64;
        for _ in 0..spec.e() - 1 {
            inv_frob_exp *= spec.p();
        }
        let mut out = Vec::with_capacity(self.c.len() / p + 1);
        let mut i = 0;
        while i < self.c.len() {
            out.push(spec.pow(self.c[i], inv_frob_exp));
            i += p;
        }
        Dense { c: out }.trim()
    }
}

/// Squarefree decomposition valid in characteristic p: returns monic
/// squarefree pairwise-coprime factors with their exact multiplicities,
/// such that the product of factor^multiplicity is the monic part of g.
fn squarefree_factors(g: &UniPoly) -> Result<Vec<(Dense, u64)>> {
    let spec = g.spec().as_ref();
    let dense = Dense::from_sparse(g)?.monic(spec);
    let mut out = Vec::new();
    decompose(&dense, 1, spec, &mut out);
    out.sort_by_key(|&(_, m)| m);
    Ok(out)
}

/// Musser's algorithm with the characteristic-p fix: whatever survives the
/// multiplicity-peeling loop has all multiplicities divisible by p, is a
/// p-th power, and recurses at multiplicity scale p.
fn decompose(f: &Dense, scale: u64, spec: &FieldSpec, out: &mut Vec<(Dense, u64)>) {
    if f.is_zero() || f.degree() == 0 {
        return;
    }
    let fp = f.derivative(spec);
    if fp.is_zero() {
        decompose(&f.pth_root(spec), scale * spec.p(), spec, out);
        return;
    }
    let mut c = f.gcd(&fp, spec);
    let mut w = f.div_exact(&c, spec);
    let mut i = 1u64;
    while w.degree() > 0 {
        let y = w.gcd(&c, spec);
        let z = w.div_exact(&y, spec);
        if !z.is_zero() && z.degree() > 0 {
            out.push((z, scale * i));
        }
        c = c.div_exact(&y, spec);
        w = y;
        i += 1;
    }
    if !c.is_zero() && c.degree() > 0 {
        decompose(&c.pth_root(spec), scale * spec.p(), spec, out);
    }
}
