//! Exact arithmetic in F_q for q = p^e an odd prime power.
//!
//! Elements are stored by their base-p integer encoding
//! `enc(a) = sum coeffs[i] * p^i`, a bijection onto `[0, q)`. The encoding
//! doubles as the canonical ordering used wherever "smallest" appears.
//! Extension fields work modulo a deterministic irreducible modulus: the
//! lexicographically smallest monic irreducible of degree e over F_p,
//! coefficients compared low-degree-first.

use std::sync::OnceLock;

use serde_json::{json, Value};

use crate::error::{Error, Result};

/// An element of F_q, stored as its base-p integer encoding in `[0, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn encoding(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Wraps an encoding known to be in range (scan internals).
    pub(crate) fn from_encoding_unchecked(enc: u64) -> FieldElement {
        FieldElement(enc)
    }
}

/// The ambient field F_q with q = p^e odd.
///
/// Immutable after construction and safe to share across threads.
#[derive(Debug)]
pub struct FieldSpec {
    p: u64,
    e: u32,
    q: u64,
    /// Monic irreducible modulus of degree e over F_p, low-to-high, length e+1.
    /// For e = 1 the convention is the polynomial x, i.e. `[0, 1]`.
    modulus: Vec<u64>,
    /// Factorization of the group order q - 1 as (prime, multiplicity) pairs.
    group_order_factors: Vec<(u64, u32)>,
    generator: OnceLock<FieldElement>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}
impl Eq for FieldSpec {}

impl FieldSpec {
    /// Builds F_{p^e} with the deterministic smallest-lex irreducible modulus.
    pub fn new(p: u64, e: u32) -> Result<Self> {
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::InvalidArgument(
                "extension degree e must be >= 1".into(),
            ));
        }
        let q = checked_pow(p, e)
            .ok_or_else(|| Error::SizeLimit(format!("{p}^{e} exceeds the 2^64 element cap")))?;
        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(p, e)
        };
        Ok(Self::assemble(p, e, q, modulus))
    }

    /// Builds F_{p^e} with a caller-supplied modulus (validated). This is the
    /// interop escape hatch for matching another system's representation.
    pub fn with_modulus(p: u64, e: u32, modulus: Vec<u64>) -> Result<Self> {
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::InvalidArgument(
                "extension degree e must be >= 1".into(),
            ));
        }
        let q = checked_pow(p, e)
            .ok_or_else(|| Error::SizeLimit(format!("{p}^{e} exceeds the 2^64 element cap")))?;
        if modulus.len() != e as usize + 1 || modulus[e as usize] != 1 {
            return Err(Error::InvalidArgument(format!(
                "modulus must be monic of degree {e} (got {} coefficients)",
                modulus.len()
            )));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidArgument(
                "modulus coefficients must be reduced mod p".into(),
            ));
        }
        if e == 1 {
            // Any monic linear works; elements are plain residues regardless.
            return Ok(Self::assemble(p, e, q, modulus));
        }
        if !is_irreducible(p, &modulus) {
            return Err(Error::InvalidArgument(
                "modulus is reducible over F_p".into(),
            ));
        }
        Ok(Self::assemble(p, e, q, modulus))
    }

    fn assemble(p: u64, e: u32, q: u64, modulus: Vec<u64>) -> Self {
        FieldSpec {
            p,
            e,
            q,
            modulus,
            group_order_factors: factorize(q - 1),
            generator: OnceLock::new(),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn group_order_factors(&self) -> &[(u64, u32)] {
        &self.group_order_factors
    }

    /// Element from its integer encoding. Errors when out of range.
    pub fn element(&self, enc: u64) -> Result<FieldElement> {
        if enc < self.q {
            Ok(FieldElement(enc))
        } else {
            Err(Error::InvalidArgument(format!(
                "encoding {enc} out of range for q={}",
                self.q
            )))
        }
    }

    /// Embeds an integer via reduction mod p (the prime subfield).
    pub fn from_int(&self, n: i64) -> FieldElement {
        let r = n.rem_euclid(self.p as i64) as u64;
        FieldElement(r)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() > self.e as usize {
            return Err(Error::InvalidArgument(format!(
                "coefficient vector longer than extension degree {}",
                self.e
            )));
        }
        let mut enc = 0u64;
        for (i, &c) in coeffs.iter().enumerate() {
            if c >= self.p {
                return Err(Error::InvalidArgument(format!(
                    "coefficient {c} not reduced mod {}",
                    self.p
                )));
            }
            enc += c * self.p.pow(i as u32);
        }
        Ok(FieldElement(enc))
    }

    /// Coefficient vector over F_p, low-to-high, length e.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.e as usize);
        let mut n = a.0;
        for _ in 0..self.e {
            v.push(n % self.p);
            n /= self.p;
        }
        v
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.e == 1 {
            return FieldElement(add_mod(a.0, b.0, self.p));
        }
        self.zip_coeffs(a, b, add_mod)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.e == 1 {
            return FieldElement(sub_mod(a.0, b.0, self.p));
        }
        self.zip_coeffs(a, b, sub_mod)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.sub(FieldElement::ZERO, a)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.e == 1 {
            return FieldElement(mul_mod(a.0, b.0, self.p));
        }
        let av = self.coeffs(a);
        let bv = self.coeffs(b);
        let e = self.e as usize;
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &x) in av.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in bv.iter().enumerate() {
                prod[i + j] = add_mod(prod[i + j], mul_mod(x, y, self.p), self.p);
            }
        }
        self.reduce_poly(&mut prod);
        self.encode_slice(&prod[..e])
    }

    /// a^exp by square-and-multiply; pow(a, 0) = 1 by the empty-product convention.
    pub fn pow(&self, a: FieldElement, mut exp: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// Multiplicative order, computed by descending through the prime
    /// factorization of q - 1.
    pub fn element_order(&self, a: FieldElement) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut order = self.q - 1;
        for &(prime, _) in &self.group_order_factors {
            while order.is_multiple_of(prime) && self.pow(a, order / prime) == FieldElement::ONE {
                order /= prime;
            }
        }
        Ok(order)
    }

    /// Smallest-encoding element of multiplicative order q - 1.
    pub fn generator(&self) -> FieldElement {
        *self.generator.get_or_init(|| {
            for enc in 1..self.q {
                let a = FieldElement(enc);
                if self.element_order(a).expect("nonzero") == self.q - 1 {
                    return a;
                }
            }
            unreachable!("F_q* is cyclic, a generator exists")
        })
    }

    /// All q - 1 nonzero elements in increasing encoding order.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.q).map(FieldElement)
    }

    /// All q elements in increasing encoding order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    pub fn to_json(&self) -> Value {
        json!({ "p": self.p, "e": self.e, "modulus": self.modulus })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::InvalidArgument("field JSON must be an object".into()))?;
        let p = obj
            .get("p")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidArgument("missing p".into()))?;
        let e = obj
            .get("e")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidArgument("missing e".into()))? as u32;
        match obj.get("modulus") {
            Some(m) => {
                let coeffs: Option<Vec<u64>> = m
                    .as_array()
                    .map(|a| a.iter().filter_map(Value::as_u64).collect());
                match coeffs {
                    Some(c) => FieldSpec::with_modulus(p, e, c),
                    None => Err(Error::InvalidArgument(
                        "modulus must be an array of integers".into(),
                    )),
                }
            }
            None => FieldSpec::new(p, e),
        }
    }

    /// Elements serialize as a bare integer for prime fields and as
    /// `{"coeffs": [...]}` for extension fields.
    pub fn elem_to_json(&self, a: FieldElement) -> Value {
        if self.e == 1 {
            json!(a.0)
        } else {
            json!({ "coeffs": self.coeffs(a) })
        }
    }

    pub fn elem_from_json(&self, v: &Value) -> Result<FieldElement> {
        if let Some(n) = v.as_u64() {
            return self.element(n);
        }
        if let Some(arr) = v.get("coeffs").and_then(Value::as_array) {
            let coeffs: Vec<u64> = arr
                .iter()
                .map(|x| {
                    x.as_u64()
                        .ok_or_else(|| Error::InvalidArgument("bad coefficient".into()))
                })
                .collect::<Result<_>>()?;
            return self.from_coeffs(&coeffs);
        }
        Err(Error::InvalidArgument(
            "element must be an integer or {\"coeffs\": [...]}".into(),
        ))
    }

    fn zip_coeffs(
        &self,
        a: FieldElement,
        b: FieldElement,
        f: impl Fn(u64, u64, u64) -> u64,
    ) -> FieldElement {
        let mut enc = 0u64;
        let mut pa = a.0;
        let mut pb = b.0;
        let mut scale = 1u64;
        for _ in 0..self.e {
            let c = f(pa % self.p, pb % self.p, self.p);
            enc += c * scale;
            pa /= self.p;
            pb /= self.p;
            scale = scale.saturating_mul(self.p);
        }
        FieldElement(enc)
    }

    /// Reduces a coefficient buffer of length >= e in place modulo the
    /// (monic) field modulus.
    fn reduce_poly(&self, buf: &mut [u64]) {
        let e = self.e as usize;
        for i in (e..buf.len()).rev() {
            let c = buf[i];
            if c == 0 {
                continue;
            }
            buf[i] = 0;
            for j in 0..e {
                let m = self.modulus[j];
                if m != 0 {
                    buf[i - e + j] = sub_mod(buf[i - e + j], mul_mod(c, m, self.p), self.p);
                }
            }
        }
    }

    fn encode_slice(&self, coeffs: &[u64]) -> FieldElement {
        let mut enc = 0u64;
        let mut scale = 1u64;
        for &c in coeffs {
            enc += c * scale;
            scale = scale.saturating_mul(self.p);
        }
        FieldElement(enc)
    }
}

fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        exp >>= 1;
    }
    acc
}

fn checked_pow(p: u64, e: u32) -> Option<u64> {
    let mut q = 1u64;
    for _ in 0..e {
        q = q.checked_mul(p)?;
    }
    Some(q)
}

/// Deterministic Miller-Rabin, valid for the full u64 range.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Factorization by trial division. Any cofactor surviving division up to
/// 2^32 is prime (it would otherwise exceed 2^64), so this is complete.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut factors = Vec::new();
    if n == 0 {
        return factors;
    }
    let mut push = |p: u64, n: &mut u64| {
        let mut mult = 0;
        while (*n).is_multiple_of(p) {
            *n /= p;
            mult += 1;
        }
        if mult > 0 {
            factors.push((p, mult));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        push(d, &mut n);
        push(d + 2, &mut n);
        d += 6;
    }
    if n > 1 {
        factors.push((n, 1));
    }
    factors
}

/// Writes q as p^e for p prime, if possible.
pub fn as_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let factors = factorize(q);
    if factors.len() == 1 {
        Some(factors[0])
    } else {
        None
    }
}

// --- dense polynomial arithmetic over F_p, used only for modulus search ---

fn fp_trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

fn fp_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    debug_assert_eq!(*b.last().unwrap(), 1, "divisor must be monic");
    let mut r = a.to_vec();
    while r.len() >= b.len() && !(r.len() == 1 && r[0] == 0) {
        let lead = *r.last().unwrap();
        if lead == 0 {
            r.pop();
            continue;
        }
        let off = r.len() - b.len();
        for (i, &c) in b.iter().enumerate() {
            r[off + i] = sub_mod(r[off + i], mul_mod(lead, c, p), p);
        }
        r.pop();
    }
    if r.is_empty() {
        r.push(0);
    }
    fp_trim(&mut r);
    r
}

fn fp_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = add_mod(prod[i + j], mul_mod(x, y, p), p);
        }
    }
    fp_rem(&prod, f, p)
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    fp_trim(&mut a);
    fp_trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        // make b monic before taking remainders
        let lead = *b.last().unwrap();
        if lead != 1 {
            let inv = pow_mod(lead, p - 2, p);
            for c in b.iter_mut() {
                *c = mul_mod(*c, inv, p);
            }
        }
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// x^(p^reps) mod f, by repeated exponentiation by p.
fn fp_frobenius_of_x(f: &[u64], p: u64, reps: u32) -> Vec<u64> {
    let mut cur = vec![0, 1]; // x
    for _ in 0..reps {
        let mut acc = vec![1u64]; // cur^p via square-and-multiply on exponent p
        let mut base = cur.clone();
        let mut exp = p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = fp_mulmod(&acc, &base, f, p);
            }
            exp >>= 1;
            if exp > 0 {
                base = fp_mulmod(&base, &base, f, p);
            }
        }
        cur = acc;
    }
    cur
}

/// Irreducibility over F_p: no roots for degree <= 3, and the standard
/// Frobenius/gcd criterion beyond.
fn is_irreducible(p: u64, f: &[u64]) -> bool {
    let e = (f.len() - 1) as u32;
    debug_assert!(e >= 2);
    if f[0] == 0 {
        return false; // root at 0
    }
    if e <= 3 {
        return (0..p).all(|x| fp_eval(f, x, p) != 0);
    }
    // x^(p^e) == x mod f, and gcd(x^(p^(e/r)) - x, f) = 1 for each prime r | e
    let frob_e = fp_frobenius_of_x(f, p, e);
    if frob_e != vec![0, 1] {
        return false;
    }
    for (r, _) in factorize(e as u64) {
        let sub = e / r as u32;
        let mut g = fp_frobenius_of_x(f, p, sub);
        // g - x
        if g.len() < 2 {
            g.resize(2, 0);
        }
        g[1] = sub_mod(g[1], 1, p);
        fp_trim(&mut g);
        let d = fp_gcd(f, &g, p);
        if d.len() > 1 {
            return false;
        }
    }
    true
}

fn fp_eval(f: &[u64], x: u64, p: u64) -> u64 {
    let mut v = 0u64;
    for &c in f.iter().rev() {
        v = add_mod(mul_mod(v, x, p), c, p);
    }
    v
}

/// Lexicographically smallest monic irreducible of degree e over F_p,
/// coefficient tuples (c_0, ..., c_{e-1}) compared low-degree-first.
fn smallest_irreducible(p: u64, e: u32) -> Vec<u64> {
    let e = e as usize;
    let mut coeffs = vec![0u64; e + 1];
    coeffs[e] = 1;
    loop {
        if is_irreducible(p, &coeffs) {
            return coeffs;
        }
        // odometer increment, last coordinate of (c_0..c_{e-1}) fastest
        let mut i = e - 1;
        loop {
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            if i == 0 {
                unreachable!("an irreducible of every degree exists over F_p");
            }
            i -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_field_prime() {
        let f = FieldSpec::new(7, 1).unwrap();
        assert_eq!(f.q(), 7);
        assert_eq!(f.group_order_factors(), &[(2, 1), (3, 1)]);
        assert_eq!(f.modulus(), &[0, 1]);
    }

    #[test]
    fn make_field_extension_has_smallest_lex_modulus() {
        // Oracle: brute-force scan over all monic quadratics in lex order.
        let f = FieldSpec::new(3, 2).unwrap();
        let mut expected = None;
        'outer: for c0 in 0..3u64 {
            for c1 in 0..3u64 {
                let cand = [c0, c1, 1];
                if (0..3).all(|x| fp_eval(&cand, x, 3) != 0) {
                    expected = Some(vec![c0, c1, 1]);
                    break 'outer;
                }
            }
        }
        assert_eq!(f.modulus(), expected.unwrap().as_slice());
        assert_eq!(f.modulus(), &[1, 0, 1]); // x^2 + 1
        assert_eq!(f.q(), 9);
    }

    #[test]
    fn make_field_rejections() {
        assert_eq!(FieldSpec::new(2, 4).unwrap_err(), Error::EvenCharacteristic);
        assert_eq!(FieldSpec::new(9, 1).unwrap_err(), Error::NotPrime(9));
        assert!(matches!(FieldSpec::new(3, 64), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn make_field_is_deterministic() {
        for (p, e) in [(3, 2), (3, 3), (5, 2), (3, 4), (7, 4)] {
            let a = FieldSpec::new(p, e).unwrap();
            let b = FieldSpec::new(p, e).unwrap();
            assert_eq!(a.modulus(), b.modulus());
        }
        assert_eq!(FieldSpec::new(5, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(FieldSpec::new(3, 3).unwrap().modulus(), &[1, 0, 2, 1]);
    }

    #[test]
    fn higher_degree_moduli_match_trial_division_oracle() {
        // frozen from an independent scan that trial-divides every monic
        // candidate by all lower-degree monic polynomials
        assert_eq!(FieldSpec::new(3, 4).unwrap().modulus(), &[1, 0, 1, 1, 1]);
        assert_eq!(FieldSpec::new(7, 4).unwrap().modulus(), &[1, 0, 0, 1, 1]);
        assert_eq!(
            FieldSpec::new(3, 6).unwrap().modulus(),
            &[1, 0, 0, 0, 1, 1, 1]
        );
        assert_eq!(FieldSpec::new(5, 5).unwrap().modulus(), &[1, 0, 0, 0, 4, 1]);
    }

    #[test]
    fn modulus_override_is_validated() {
        // x^2 + x + 2 is irreducible over F_3 (no roots: 2, 1, 2)
        let f = FieldSpec::with_modulus(3, 2, vec![2, 1, 1]).unwrap();
        assert_eq!(f.q(), 9);
        // x^2 + 2x + 1 = (x+1)^2 is not
        assert!(FieldSpec::with_modulus(3, 2, vec![1, 2, 1]).is_err());
    }

    #[test]
    fn inverse_in_f7_matches_scan() {
        let f = FieldSpec::new(7, 1).unwrap();
        let three = f.element(3).unwrap();
        // oracle: scan b in 1..6 for 3b = 1 mod 7
        let expected = (1..7).find(|&b| (3 * b) % 7 == 1).unwrap();
        assert_eq!(f.inv(three).unwrap().encoding(), expected);
        assert_eq!(expected, 5);
        assert_eq!(
            f.inv(FieldElement::ZERO).unwrap_err(),
            Error::DivisionByZero
        );
    }

    #[test]
    fn lagrange_in_f9() {
        let f = FieldSpec::new(3, 2).unwrap();
        for a in f.nonzero_elements() {
            assert_eq!(f.pow(a, 8), FieldElement::ONE);
        }
        let one = FieldElement::ONE;
        for a in f.elements() {
            assert_eq!(f.mul(a, one), a);
        }
    }

    #[test]
    fn element_orders_in_f7() {
        let f = FieldSpec::new(7, 1).unwrap();
        assert_eq!(f.element_order(f.element(6).unwrap()).unwrap(), 2);
        assert_eq!(f.element_order(f.element(3).unwrap()).unwrap(), 6);
        assert_eq!(f.element_order(FieldElement::ONE).unwrap(), 1);
        assert_eq!(
            f.element_order(FieldElement::ZERO).unwrap_err(),
            Error::DivisionByZero
        );
    }

    #[test]
    fn generators() {
        assert_eq!(FieldSpec::new(7, 1).unwrap().generator().encoding(), 3);
        assert_eq!(FieldSpec::new(3, 1).unwrap().generator().encoding(), 2);
        // F9: smallest encoding of order 8, verified against a power scan
        let f9 = FieldSpec::new(3, 2).unwrap();
        let g = f9.generator();
        for enc in 1..g.encoding() {
            let a = f9.element(enc).unwrap();
            assert!(f9.element_order(a).unwrap() < 8);
        }
        assert_eq!(f9.element_order(g).unwrap(), 8);
        assert_eq!(g.encoding(), 4);
    }

    #[test]
    fn enumeration_is_complete_and_ordered() {
        let f = FieldSpec::new(3, 2).unwrap();
        let encs: Vec<u64> = f.nonzero_elements().map(FieldElement::encoding).collect();
        assert_eq!(encs, (1..9).collect::<Vec<_>>());
        assert_eq!(FieldSpec::new(7, 1).unwrap().nonzero_elements().count(), 6);
    }

    #[test]
    fn element_json_roundtrip() {
        let f9 = FieldSpec::new(3, 2).unwrap();
        let a = f9.element(5).unwrap();
        let v = f9.elem_to_json(a);
        assert_eq!(v, json!({"coeffs": [2, 1]}));
        assert_eq!(f9.elem_from_json(&v).unwrap(), a);

        let f7 = FieldSpec::new(7, 1).unwrap();
        assert_eq!(f7.elem_to_json(f7.element(5).unwrap()), json!(5));

        let spec_json = f9.to_json();
        let back = FieldSpec::from_json(&spec_json).unwrap();
        assert_eq!(back, f9);
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(as_prime_power(729), Some((3, 6)));
        assert_eq!(as_prime_power(7), Some((7, 1)));
        assert_eq!(as_prime_power(12), None);
        assert_eq!(as_prime_power(1), None);
    }
}
