//! Sparse multivariate polynomials over F_q, the componentwise monomial
//! order, type I/II classification, and specialization x_i -> x^theta_i
//! down to univariate polynomials.

mod parse;

pub use parse::{parse_poly, parse_unipoly};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::charsum::chi;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

/// Hard caps keeping the tool at desk scale.
pub const MAX_ARITY: usize = 16;
pub const MAX_EXPONENT: u64 = 1 << 32;

/// A non-constant monic monomial x_1^a_1 ... x_k^a_k, degree >= 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Result<Self> {
        if exps.iter().all(|&e| e == 0) {
            return Err(Error::InvalidArgument(
                "a monomial has degree >= 1; constants are not monomials".into(),
            ));
        }
        Ok(Monomial { exps })
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn arity(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u64 {
        self.exps.iter().map(|&e| e as u64).sum()
    }

    /// Exponent vector under a permutation of the variables.
    fn permuted(&self, perm: &[usize]) -> Monomial {
        Monomial {
            exps: perm.iter().map(|&i| self.exps[i]).collect(),
        }
    }
}

/// Outcome of the componentwise comparison of two monomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    /// f > g componentwise (>= everywhere, unequal).
    Dominates,
    /// f = g.
    Equal,
    Incomparable,
    /// g > f componentwise.
    DominatedBy,
}

/// Componentwise comparison: f dominates g iff every exponent of f is >= the
/// matching exponent of g.
pub fn dominance(f: &Monomial, g: &Monomial) -> Result<Dominance> {
    if f.arity() != g.arity() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            got: g.arity(),
        });
    }
    let mut ge = true;
    let mut le = true;
    for (&a, &b) in f.exps.iter().zip(&g.exps) {
        if a < b {
            ge = false;
        }
        if a > b {
            le = false;
        }
    }
    Ok(match (ge, le) {
        (true, true) => Dominance::Equal,
        (true, false) => Dominance::Dominates,
        (false, true) => Dominance::DominatedBy,
        (false, false) => Dominance::Incomparable,
    })
}

/// Type I / type II classification of a polynomial.
///
/// Type I: the constant term is a nonzero square. Type II: some monomial
/// with a square coefficient strictly dominates every other monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub type1: bool,
    pub type2: bool,
    /// The dominating monomial witnessing type II, when type2 holds.
    pub dominant: Option<Monomial>,
}

/// A sparse multivariate polynomial `sum a_i f_i + C` over F_q, with the
/// monomials f_i non-constant and all stored coefficients nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    spec: Arc<FieldSpec>,
    k: usize,
    terms: BTreeMap<Monomial, FieldElement>,
    constant: FieldElement,
}

impl MultiPoly {
    pub fn new(
        spec: Arc<FieldSpec>,
        k: usize,
        terms: impl IntoIterator<Item = (Monomial, FieldElement)>,
        constant: FieldElement,
    ) -> Result<Self> {
        if k == 0 || k > MAX_ARITY {
            return Err(Error::InvalidArgument(format!(
                "arity must be in 1..={MAX_ARITY}"
            )));
        }
        let mut map: BTreeMap<Monomial, FieldElement> = BTreeMap::new();
        for (mono, coeff) in terms {
            if mono.arity() != k {
                return Err(Error::ArityMismatch {
                    expected: k,
                    got: mono.arity(),
                });
            }
            let entry = map.entry(mono).or_insert(FieldElement::ZERO);
            *entry = spec.add(*entry, coeff);
        }
        map.retain(|_, c| !c.is_zero());
        Ok(MultiPoly {
            spec,
            k,
            terms: map,
            constant,
        })
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of non-constant monomials (the m of the monomial expansion).
    pub fn num_monomials(&self) -> usize {
        self.terms.len()
    }

    /// Total degree d; None for a constant polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, FieldElement)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn constant(&self) -> FieldElement {
        self.constant
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    /// Exact evaluation at a point of F_q^k.
    pub fn evaluate(&self, point: &[FieldElement]) -> Result<FieldElement> {
        if point.len() != self.k {
            return Err(Error::ArityMismatch {
                expected: self.k,
                got: point.len(),
            });
        }
        let spec = &self.spec;
        let mut acc = self.constant;
        for (mono, coeff) in &self.terms {
            let mut term = *coeff;
            for (&x, &e) in point.iter().zip(mono.exps()) {
                if e > 0 {
                    term = spec.mul(term, spec.pow(x, e as u64));
                }
            }
            acc = spec.add(acc, term);
        }
        Ok(acc)
    }

    /// Formal substitution x_i -> x^theta_i; like powers are combined and
    /// coefficients that cancel to zero are dropped.
    pub fn specialize(&self, thetas: &[u32]) -> Result<UniPoly> {
        if thetas.len() != self.k {
            return Err(Error::ArityMismatch {
                expected: self.k,
                got: thetas.len(),
            });
        }
        if thetas.contains(&0) {
            return Err(Error::InvalidArgument(
                "specialization exponents must be >= 1".into(),
            ));
        }
        let mut coeffs: BTreeMap<u64, FieldElement> = BTreeMap::new();
        if !self.constant.is_zero() {
            coeffs.insert(0, self.constant);
        }
        for (mono, coeff) in &self.terms {
            let mut deg = 0u64;
            for (&a, &t) in mono.exps().iter().zip(thetas) {
                deg += a as u64 * t as u64;
            }
            let entry = coeffs.entry(deg).or_insert(FieldElement::ZERO);
            *entry = self.spec.add(*entry, *coeff);
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(UniPoly {
            spec: Arc::clone(&self.spec),
            coeffs,
        })
    }

    /// Both type flags; squareness is decided by the quadratic character.
    pub fn classify(&self) -> Result<Classification> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.terms.is_empty() {
            return Err(Error::NoMonomials);
        }
        let type1 = chi(&self.spec, self.constant).value() == 1;
        let mut dominant = None;
        'outer: for (cand, coeff) in &self.terms {
            if chi(&self.spec, *coeff).value() != 1 {
                continue;
            }
            for other in self.terms.keys() {
                if other == cand {
                    continue;
                }
                if dominance(cand, other)? != Dominance::Dominates {
                    continue 'outer;
                }
            }
            dominant = Some(cand.clone());
            break;
        }
        Ok(Classification {
            type1,
            type2: dominant.is_some(),
            dominant,
        })
    }

    /// True iff F is invariant under every permutation of its variables,
    /// checked on the transposition (1 2) and the k-cycle, which generate
    /// the symmetric group.
    pub fn is_symmetric(&self) -> bool {
        if self.k == 1 {
            return true;
        }
        let mut swap: Vec<usize> = (0..self.k).collect();
        swap.swap(0, 1);
        let mut cycle: Vec<usize> = (1..self.k).collect();
        cycle.push(0);
        for perm in [&swap, &cycle] {
            let permuted: BTreeMap<Monomial, FieldElement> = self
                .terms
                .iter()
                .map(|(m, &c)| (m.permuted(perm), c))
                .collect();
            if permuted != self.terms {
                return false;
            }
        }
        true
    }

    /// The homogeneous diagonal shape `sum c_i x_i^d` with every c_i a
    /// nonzero square and zero constant term: of neither type, but still
    /// constructible through the distinct-exponent family.
    pub fn is_homogeneous_square_diagonal(&self) -> bool {
        if !self.constant.is_zero() || self.terms.is_empty() {
            return false;
        }
        let d = match self.degree() {
            Some(d) => d,
            None => return false,
        };
        self.terms.iter().all(|(mono, &c)| {
            mono.degree() == d
                && mono.exps().iter().filter(|&&e| e > 0).count() == 1
                && chi(&self.spec, c).value() == 1
        })
    }

    /// Canonical text form, parsable by `parse_poly`.
    pub fn to_text(&self) -> String {
        format!("{self}")
    }

    /// Canonical JSON: terms sorted lexicographically by exponent vector.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, &c)| json!({ "coeff": self.spec.elem_to_json(c), "exps": m.exps() }))
            .collect();
        json!({
            "k": self.k,
            "terms": terms,
            "constant": self.spec.elem_to_json(self.constant),
        })
    }

    pub fn from_json(spec: Arc<FieldSpec>, v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::InvalidArgument("polynomial JSON must be an object".into()))?;
        let k = obj
            .get("k")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidArgument("missing arity k".into()))?
            as usize;
        let constant = match obj.get("constant") {
            Some(c) => spec.elem_from_json(c)?,
            None => FieldElement::ZERO,
        };
        let mut terms = Vec::new();
        if let Some(arr) = obj.get("terms").and_then(Value::as_array) {
            for t in arr {
                let coeff = spec.elem_from_json(
                    t.get("coeff")
                        .ok_or_else(|| Error::InvalidArgument("term missing coeff".into()))?,
                )?;
                let exps: Vec<u32> = t
                    .get("exps")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::InvalidArgument("term missing exps".into()))?
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .map(|n| n as u32)
                            .ok_or_else(|| Error::InvalidArgument("bad exponent".into()))
                    })
                    .collect::<Result<_>>()?;
                terms.push((Monomial::new(exps)?, coeff));
            }
        }
        MultiPoly::new(spec, k, terms, constant)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces: Vec<String> = Vec::new();
        for (mono, coeff) in &self.terms {
            let mut suffix = String::new();
            for (i, &e) in mono.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !suffix.is_empty() {
                    suffix.push('*');
                }
                suffix.push_str(&format!("x{}", i + 1));
                if e > 1 {
                    suffix.push_str(&format!("^{e}"));
                }
            }
            push_element_pieces(&mut pieces, &self.spec, *coeff, Some(&suffix));
        }
        if !self.constant.is_zero() {
            push_element_pieces(&mut pieces, &self.spec, self.constant, None);
        }
        if pieces.is_empty() {
            return write!(out, "0");
        }
        write!(out, "{}", pieces.join(" + "))
    }
}

/// Appends the grammar text for `a * suffix`, with the element distributed
/// into one piece per nonzero t-power so the output stays inside the
/// parenthesis-free term grammar.
fn push_element_pieces(
    pieces: &mut Vec<String>,
    spec: &FieldSpec,
    a: FieldElement,
    suffix: Option<&str>,
) {
    let components: Vec<(usize, u64)> = if spec.e() == 1 {
        vec![(0, a.encoding())]
    } else {
        spec.coeffs(a)
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c != 0)
            .collect()
    };
    for (tpow, c) in components {
        let mut factors: Vec<String> = Vec::new();
        if c != 1 || (tpow == 0 && suffix.is_none()) {
            factors.push(c.to_string());
        }
        if tpow == 1 {
            factors.push("t".into());
        } else if tpow > 1 {
            factors.push(format!("t^{tpow}"));
        }
        if let Some(s) = suffix {
            factors.push(s.to_string());
        }
        if factors.is_empty() {
            factors.push("1".into());
        }
        pieces.push(factors.join("*"));
    }
}

/// A sparse univariate polynomial over F_q (degree -> nonzero coefficient).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    spec: Arc<FieldSpec>,
    coeffs: BTreeMap<u64, FieldElement>,
}

impl UniPoly {
    pub fn new(
        spec: Arc<FieldSpec>,
        coeffs: impl IntoIterator<Item = (u64, FieldElement)>,
    ) -> Self {
        let mut map: BTreeMap<u64, FieldElement> = BTreeMap::new();
        for (deg, c) in coeffs {
            let entry = map.entry(deg).or_insert(FieldElement::ZERO);
            *entry = spec.add(*entry, c);
        }
        map.retain(|_, c| !c.is_zero());
        UniPoly { spec, coeffs: map }
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|&d| d == 0)
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (u64, FieldElement)> + '_ {
        self.coeffs.iter().map(|(&d, &c)| (d, c))
    }

    pub fn coeff(&self, deg: u64) -> FieldElement {
        self.coeffs.get(&deg).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn leading_coeff(&self) -> FieldElement {
        self.degree()
            .map(|d| self.coeffs[&d])
            .unwrap_or(FieldElement::ZERO)
    }

    pub fn constant_coeff(&self) -> FieldElement {
        self.coeff(0)
    }

    /// Evaluation valid at every point, including 0.
    pub fn eval(&self, y: FieldElement) -> FieldElement {
        if y.is_zero() {
            return self.constant_coeff();
        }
        self.eval_nonzero(y)
    }

    /// Evaluation with exponents reduced mod q-1, valid on F_q* only.
    /// This is the hot path of the witness scan where formal degrees can be
    /// much larger than the group order.
    pub fn eval_nonzero(&self, y: FieldElement) -> FieldElement {
        debug_assert!(!y.is_zero());
        let spec = &self.spec;
        let group = spec.q() - 1;
        let mut acc = FieldElement::ZERO;
        for (&deg, &c) in &self.coeffs {
            let e = if deg == 0 { 0 } else { ((deg - 1) % group) + 1 };
            acc = spec.add(acc, spec.mul(c, spec.pow(y, e)));
        }
        acc
    }

    /// JSON as a sorted `[[degree, coeff], ...]` list.
    pub fn to_json(&self) -> Value {
        let pairs: Vec<Value> = self
            .coeffs
            .iter()
            .map(|(&d, &c)| json!([d, self.spec.elem_to_json(c)]))
            .collect();
        json!(pairs)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces: Vec<String> = Vec::new();
        for (&deg, &c) in self.coeffs.iter().rev() {
            let suffix = match deg {
                0 => None,
                1 => Some("x".to_string()),
                d => Some(format!("x^{d}")),
            };
            push_element_pieces(&mut pieces, &self.spec, c, suffix.as_deref());
        }
        if pieces.is_empty() {
            return write!(out, "0");
        }
        write!(out, "{}", pieces.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64, e: u32) -> Arc<FieldSpec> {
        Arc::new(FieldSpec::new(p, e).unwrap())
    }

    fn poly(text: &str, k: usize, spec: &Arc<FieldSpec>) -> MultiPoly {
        parse_poly(text, k, spec).unwrap()
    }

    #[test]
    fn monomial_rejects_constants() {
        assert!(Monomial::new(vec![0, 0]).is_err());
        assert_eq!(Monomial::new(vec![2, 1]).unwrap().degree(), 3);
    }

    #[test]
    fn dominance_table() {
        let m = |v: Vec<u32>| Monomial::new(v).unwrap();
        assert_eq!(
            dominance(&m(vec![2, 1]), &m(vec![1, 0])).unwrap(),
            Dominance::Dominates
        );
        assert_eq!(
            dominance(&m(vec![2, 0]), &m(vec![0, 1])).unwrap(),
            Dominance::Incomparable
        );
        assert_eq!(
            dominance(&m(vec![1, 1]), &m(vec![1, 1])).unwrap(),
            Dominance::Equal
        );
        assert_eq!(
            dominance(&m(vec![1, 0]), &m(vec![2, 1])).unwrap(),
            Dominance::DominatedBy
        );
        assert!(dominance(&m(vec![1]), &m(vec![1, 0])).is_err());
    }

    #[test]
    fn classify_goldens() {
        // x1x2x3 + 1 is of both types over any odd field
        for spec in [f(7, 1), f(5, 1), f(3, 2), f(13, 1)] {
            let c = poly("x1*x2*x3 + 1", 3, &spec).classify().unwrap();
            assert!(c.type1 && c.type2, "q={}", spec.q());
        }
        // sum of square-coefficient pure powers, zero constant: neither type
        let spec = f(13, 1);
        let c = poly("x1^2 + x2^2", 2, &spec).classify().unwrap();
        assert!(!c.type1 && !c.type2);
        // x1x2 + 2: type I over F7 (2 = 3^2), not over F5; type II over both
        let c7 = poly("x1*x2 + 2", 2, &f(7, 1)).classify().unwrap();
        assert!(c7.type1 && c7.type2);
        let c5 = poly("x1*x2 + 2", 2, &f(5, 1)).classify().unwrap();
        assert!(!c5.type1 && c5.type2);
        assert_eq!(c5.dominant.unwrap().exps(), &[1, 1]);
    }

    #[test]
    fn classify_errors() {
        let spec = f(7, 1);
        let zero = MultiPoly::new(Arc::clone(&spec), 2, [], FieldElement::ZERO).unwrap();
        assert_eq!(zero.classify().unwrap_err(), Error::ZeroPolynomial);
        let constant = MultiPoly::new(Arc::clone(&spec), 2, [], FieldElement::ONE).unwrap();
        assert_eq!(constant.classify().unwrap_err(), Error::NoMonomials);
    }

    #[test]
    fn evaluate_spec_examples() {
        let f13 = f(13, 1);
        let p = poly("x1*x2 + 1", 2, &f13);
        let at = |a: u64, b: u64| {
            p.evaluate(&[f13.element(a).unwrap(), f13.element(b).unwrap()])
                .unwrap()
                .encoding()
        };
        assert_eq!(at(4, 3), 0);

        let f7 = f(7, 1);
        let p3 = poly("x1*x2*x3 + 1", 3, &f7);
        let one = FieldElement::ONE;
        assert_eq!(p3.evaluate(&[one, one, one]).unwrap().encoding(), 2);
        assert!(p3.evaluate(&[one, one]).is_err());
    }

    #[test]
    fn specialize_examples() {
        let f7 = f(7, 1);
        let p = poly("x1*x2 + 1", 2, &f7);
        let g = p.specialize(&[1, 2]).unwrap();
        assert_eq!(g.degree(), Some(3));
        assert_eq!(g.coeff(3).encoding(), 1);
        assert_eq!(g.coeff(0).encoding(), 1);

        // collision summing over F5
        let f5 = f(5, 1);
        let p = poly("x1 + x2", 2, &f5);
        let g = p.specialize(&[2, 2]).unwrap();
        assert_eq!(
            g.coeffs().collect::<Vec<_>>(),
            vec![(2, f5.element(2).unwrap())]
        );

        // degree bound d*n
        let p = poly("x1*x2*x3 + 1", 3, &f7);
        let g = p.specialize(&[5, 5, 5]).unwrap();
        assert_eq!(g.degree(), Some(15));

        // full cancellation leaves a constant
        let p = poly("x1 - x2 + 1", 2, &f7);
        let g = p.specialize(&[4, 4]).unwrap();
        assert!(g.is_constant());
        assert_eq!(g.constant_coeff().encoding(), 1);
    }

    #[test]
    fn symmetry_checks() {
        let f7 = f(7, 1);
        assert!(poly("x1*x2*x3 + 1", 3, &f7).is_symmetric());
        assert!(!poly("x1 - x2", 2, &f7).is_symmetric());
        assert!(poly("x1^2*x2 + x2^2*x1", 2, &f7).is_symmetric());
        assert!(!poly("x1^2*x2 + x2^2*x3 + x3^2*x1", 3, &f7).is_symmetric());
    }

    #[test]
    fn homogeneous_square_diagonal_shape() {
        let f13 = f(13, 1);
        assert!(poly("x1^2 + x2^2", 2, &f13).is_homogeneous_square_diagonal());
        // 12 = -1 is a square mod 13
        assert!(poly("x1 + 12*x2", 2, &f13).is_homogeneous_square_diagonal());
        // 2 is a non-square mod 13
        assert!(!poly("x1^2 + 2*x2^2", 2, &f13).is_homogeneous_square_diagonal());
        assert!(!poly("x1^2 + x2^2 + 1", 2, &f13).is_homogeneous_square_diagonal());
        assert!(!poly("x1^2 + x2", 2, &f13).is_homogeneous_square_diagonal());
        assert!(!poly("x1*x2 + x2^2", 2, &f13).is_homogeneous_square_diagonal());
    }

    #[test]
    fn json_roundtrip_and_shape() {
        let f9 = f(3, 2);
        let p = poly("t*x1^2 + x2 + t^1", 2, &f9);
        let v = p.to_json();
        let back = MultiPoly::from_json(Arc::clone(&f9), &v).unwrap();
        assert_eq!(back, p);
        assert_eq!(v["k"], 2);
        assert_eq!(v["constant"], json!({"coeffs": [0, 1]}));
    }

    #[test]
    fn unipoly_eval_agrees_with_reduced_eval() {
        let f13 = f(13, 1);
        let g = UniPoly::new(
            Arc::clone(&f13),
            [
                (25u64, FieldElement::ONE),
                (3, f13.element(5).unwrap()),
                (0, FieldElement::ONE),
            ],
        );
        for y in f13.nonzero_elements() {
            // 25 = 2*12 + 1, so x^25 agrees with x on F_13*
            let direct = f13.add(
                f13.add(
                    f13.pow(y, 25),
                    f13.mul(f13.element(5).unwrap(), f13.pow(y, 3)),
                ),
                FieldElement::ONE,
            );
            assert_eq!(g.eval_nonzero(y), direct);
        }
        assert_eq!(g.eval(FieldElement::ZERO), FieldElement::ONE);
    }
}
