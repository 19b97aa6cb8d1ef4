//! Table-driven arithmetic in small finite fields F_{p^k}.
//!
//! Elements are indices in `[0, q)`: the index of `c_0 + c_1 x + ... + c_{k-1} x^{k-1}`
//! (reduced modulo the field's modulus) is `sum c_i p^i`. In particular the
//! prime subfield F_p sits at indices `0..p`, and the prime-subfield basis
//! `(1, x, ..., x^{k-1})` sits at indices `p^0, ..., p^{k-1}`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Field element as an index into the tables of its field.
pub type Elem = u8;

/// Default cap on the field order.
pub const DEFAULT_ORDER_CAP: u64 = 16;
/// Orders above this cannot be stored in an [`Elem`].
const HARD_ORDER_LIMIT: u64 = 256;

#[derive(Debug)]
pub struct FieldSpec {
    characteristic: u8,
    degree: u8,
    order: usize,
    /// Monic modulus, lowest coefficient first, length `degree + 1`.
    modulus: Vec<u8>,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
    frob: Vec<Elem>,
    /// Inverse of squaring; empty in odd characteristic.
    sqrt: Vec<Elem>,
}

/// Shared handle to an immutable [`FieldSpec`].
///
/// Two handles compare equal when they describe the same `(p, k)`; the modulus
/// is a deterministic function of `(p, k)` so the tables agree too.
#[derive(Clone)]
pub struct Field(Arc<FieldSpec>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.characteristic == other.0.characteristic && self.0.degree == other.0.degree)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.designator())
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.designator())
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Builds F_{p^k} under the default order cap.
pub fn make_field(p: u64, k: u32) -> Result<Field> {
    make_field_with_cap(p, k, DEFAULT_ORDER_CAP)
}

pub fn make_field_with_cap(p: u64, k: u32, cap: u64) -> Result<Field> {
    if !is_prime(p) {
        return Err(Error::NonPrimeCharacteristic(p));
    }
    if k == 0 {
        return Err(Error::BadParams("field degree must be at least 1".into()));
    }
    let order = p
        .checked_pow(k)
        .ok_or(Error::OrderCapExceeded { order: u64::MAX, cap })?;
    if order > cap.min(HARD_ORDER_LIMIT) {
        return Err(Error::OrderCapExceeded {
            order,
            cap: cap.min(HARD_ORDER_LIMIT),
        });
    }
    let spec = FieldSpec::build(p as u8, k as u8)?;
    Ok(Field(Arc::new(spec)))
}

// Polynomials over F_p, lowest coefficient first, no trailing zeros.
fn poly_trim(mut a: Vec<u8>) -> Vec<u8> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u8], b: &[u8], p: u8) -> Vec<u8> {
    let p = p as u32;
    let mut r: Vec<u8> = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db] as u32, p);
    while r.len() > db {
        let top = *r.last().unwrap() as u32;
        if top != 0 {
            let factor = top * lead_inv % p;
            let shift = r.len() - 1 - db;
            for (i, &bi) in b.iter().enumerate() {
                let v = (r[shift + i] as u32 + p * p - factor * bi as u32) % p;
                r[shift + i] = v as u8;
            }
        }
        r.pop();
    }
    poly_trim(r)
}

fn inv_mod(a: u32, p: u32) -> u32 {
    (1..p).find(|&x| a * x % p == 1).expect("nonzero residue mod a prime")
}

fn digits(mut v: usize, p: usize, len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((v % p) as u8);
        v /= p;
    }
    out
}

fn from_digits(d: &[u8], p: usize) -> usize {
    d.iter().rev().fold(0, |acc, &c| acc * p + c as usize)
}

/// Trial division by every monic polynomial of degree `1..=k/2`.
fn is_irreducible(poly: &[u8], p: u8) -> bool {
    let k = poly.len() - 1;
    for d in 1..=k / 2 {
        for low in 0..(p as usize).pow(d as u32) {
            let mut divisor = digits(low, p as usize, d);
            divisor.push(1);
            if poly_rem(poly, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u8, k: u8) -> Vec<u8> {
    let count = (p as usize).pow(k as u32);
    for low in 0..count {
        let mut poly = digits(low, p as usize, k as usize);
        poly.push(1);
        if is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldSpec {
    fn build(p: u8, k: u8) -> Result<Self> {
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(p, k)
        };
        let pu = p as usize;
        let ku = k as usize;
        let q = pu.pow(k as u32);

        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            let da = digits(a, pu, ku);
            for b in 0..q {
                let db = digits(b, pu, ku);
                let sum: Vec<u8> = da
                    .iter()
                    .zip(&db)
                    .map(|(&x, &y)| ((x as usize + y as usize) % pu) as u8)
                    .collect();
                add[a * q + b] = from_digits(&sum, pu) as Elem;

                let mut prod = vec![0u8; 2 * ku];
                for (i, &x) in da.iter().enumerate() {
                    for (j, &y) in db.iter().enumerate() {
                        prod[i + j] = ((prod[i + j] as usize + x as usize * y as usize) % pu) as u8;
                    }
                }
                let mut rem = poly_rem(&poly_trim(prod), &modulus, p);
                rem.resize(ku, 0);
                mul[a * q + b] = from_digits(&rem, pu) as Elem;
            }
        }

        let mut neg = vec![0; q];
        let mut inv = vec![0; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0).unwrap() as Elem;
            if a != 0 {
                inv[a] = (0..q)
                    .find(|&b| mul[a * q + b] == 1)
                    .ok_or_else(|| Error::Inconsistent(format!("{a} has no inverse")))?
                    as Elem;
            }
        }
        let mut frob = vec![0; q];
        for a in 0..q {
            let mut acc = 1usize;
            for _ in 0..pu {
                acc = mul[acc * q + a] as usize;
            }
            frob[a] = acc as Elem;
        }
        let sqrt = if p == 2 {
            let mut s = vec![0; q];
            for a in 0..q {
                s[frob[a] as usize] = a as Elem;
            }
            s
        } else {
            Vec::new()
        };

        let spec = FieldSpec {
            characteristic: p,
            degree: k,
            order: q,
            modulus,
            add,
            mul,
            neg,
            inv,
            frob,
            sqrt,
        };
        if q <= 16 {
            spec.check_axioms()?;
        }
        Ok(spec)
    }

    fn check_axioms(&self) -> Result<()> {
        let q = self.order;
        let add = |a: usize, b: usize| self.add[a * q + b] as usize;
        let mul = |a: usize, b: usize| self.mul[a * q + b] as usize;
        for a in 0..q {
            if add(a, 0) != a || mul(a, 1) != a {
                return Err(Error::Inconsistent(format!("identity fails at {a}")));
            }
            if a != 0 && mul(a, self.inv[a] as usize) != 1 {
                return Err(Error::Inconsistent(format!("inverse fails at {a}")));
            }
            for b in 0..q {
                if add(a, b) != add(b, a) || mul(a, b) != mul(b, a) {
                    return Err(Error::Inconsistent(format!("commutativity fails at ({a},{b})")));
                }
                for c in 0..q {
                    if add(add(a, b), c) != add(a, add(b, c))
                        || mul(mul(a, b), c) != mul(a, mul(b, c))
                        || mul(a, add(b, c)) != add(mul(a, b), mul(a, c))
                    {
                        return Err(Error::Inconsistent(format!("axiom fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(())
    }
}

impl Field {
    #[inline]
    pub fn characteristic(&self) -> u8 {
        self.0.characteristic
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.0.degree as usize
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.0.order
    }

    pub fn modulus(&self) -> &[u8] {
        &self.0.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.degree == 1
    }

    pub fn is_gf2(&self) -> bool {
        self.0.order == 2
    }

    /// "p" for prime fields, "p^k" otherwise.
    pub fn designator(&self) -> String {
        if self.0.degree == 1 {
            format!("{}", self.0.characteristic)
        } else {
            format!("{}^{}", self.0.characteristic, self.0.degree)
        }
    }

    /// The prime subfield F_p as a field in its own right.
    pub fn prime_subfield(&self) -> Field {
        if self.is_prime_field() {
            self.clone()
        } else {
            make_field_with_cap(self.0.characteristic as u64, 1, u64::MAX).expect("prime field")
        }
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.0.add[a as usize * self.0.order + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.0.mul[a as usize * self.0.order + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.0.neg[a as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        (a != 0).then(|| self.0.inv[a as usize])
    }

    #[inline]
    pub fn frobenius(&self, a: Elem) -> Elem {
        self.0.frob[a as usize]
    }

    /// Square root in characteristic 2 (squaring is a bijection there).
    pub fn sqrt_char2(&self, a: Elem) -> Result<Elem> {
        if self.0.characteristic != 2 {
            return Err(Error::CharacteristicMismatch {
                expected: 2,
                actual: self.0.characteristic as u64,
            });
        }
        Ok(self.0.sqrt[a as usize])
    }

    /// Coordinates of `a` over F_p in the basis `(1, x, ..., x^{k-1})`.
    pub fn prime_coords(&self, a: Elem) -> Vec<u8> {
        digits(a as usize, self.0.characteristic as usize, self.degree())
    }

    /// The `t`-th prime coordinate of `a`.
    #[inline]
    pub fn prime_coord(&self, a: Elem, t: usize) -> u8 {
        let p = self.0.characteristic as usize;
        ((a as usize / p.pow(t as u32)) % p) as u8
    }

    pub fn from_prime_coords(&self, coords: &[u8]) -> Result<Elem> {
        if coords.len() != self.degree() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} prime coordinates, got {}",
                self.degree(),
                coords.len()
            )));
        }
        if coords.iter().any(|&c| c >= self.0.characteristic) {
            return Err(Error::BadParams("prime coordinate out of range".into()));
        }
        Ok(from_digits(coords, self.0.characteristic as usize) as Elem)
    }

    /// The `l`-th element `x^l` of the prime-subfield basis.
    #[inline]
    pub fn prime_basis(&self, l: usize) -> Elem {
        (self.0.characteristic as usize).pow(l as u32) as Elem
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.0.order).map(|a| a as Elem)
    }

    pub fn scalar(&self, index: usize) -> Result<Scalar> {
        if index >= self.0.order {
            return Err(Error::BadParams(format!(
                "index {index} out of range for F_{}",
                self.designator()
            )));
        }
        Ok(Scalar {
            index: index as Elem,
            field: self.clone(),
        })
    }

    pub fn check_elem(&self, a: u64) -> Result<Elem> {
        if a as usize >= self.0.order {
            return Err(Error::Parse(format!(
                "{a} is not an element index of F_{}",
                self.designator()
            )));
        }
        Ok(a as Elem)
    }
}

impl FromStr for Field {
    type Err = Error;

    /// Parses the "p" / "p^k" designator under the default cap.
    fn from_str(s: &str) -> Result<Self> {
        parse_field(s, DEFAULT_ORDER_CAP)
    }
}

pub fn parse_field(s: &str, cap: u64) -> Result<Field> {
    let bad = || Error::Parse(format!("bad field designator {s:?}"));
    let s = s.trim();
    let (p, k) = match s.split_once('^') {
        Some((p, k)) => (
            p.trim().parse::<u64>().map_err(|_| bad())?,
            k.trim().parse::<u32>().map_err(|_| bad())?,
        ),
        None => (s.parse::<u64>().map_err(|_| bad())?, 1),
    };
    make_field_with_cap(p, k, cap)
}

/// A field element tagged with its field; mixing fields is an error.
#[derive(Clone, PartialEq, Eq)]
pub struct Scalar {
    index: Elem,
    field: Field,
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@F_{}", self.index, self.field.designator())
    }
}

impl Scalar {
    pub fn index(&self) -> Elem {
        self.index
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    fn same(&self, other: &Scalar) -> Result<()> {
        if self.field != other.field {
            return Err(Error::MixedFields(
                self.field.designator(),
                other.field.designator(),
            ));
        }
        Ok(())
    }

    fn with(&self, index: Elem) -> Scalar {
        Scalar {
            index,
            field: self.field.clone(),
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        self.same(other)?;
        Ok(self.with(self.field.add(self.index, other.index)))
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        self.same(other)?;
        Ok(self.with(self.field.mul(self.index, other.index)))
    }

    pub fn neg(&self) -> Scalar {
        self.with(self.field.neg(self.index))
    }

    pub fn inv(&self) -> Result<Scalar> {
        self.field
            .inv(self.index)
            .map(|i| self.with(i))
            .ok_or(Error::DivisionByZero)
    }

    pub fn frobenius(&self) -> Scalar {
        self.with(self.field.frobenius(self.index))
    }

    pub fn sqrt_char2(&self) -> Result<Scalar> {
        Ok(self.with(self.field.sqrt_char2(self.index)?))
    }

    pub fn prime_coords(&self) -> Vec<u8> {
        self.field.prime_coords(self.index)
    }
}
