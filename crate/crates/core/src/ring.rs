//! Finite coefficient rings: `Z/n`, binary direct products and full matrix
//! rings `M(k, Z/n)`.
//!
//! Every element is stored as a single `u64` code. The code is a mixed-radix
//! packing of the canonical encoding (residue, left-to-right tuple, row-major
//! matrix), so two elements are equal exactly when their codes are equal.
//! Rings with at most [`TABLE_LIMIT`] elements cache their addition and
//! multiplication tables.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Rings up to this order get precomputed operation tables.
pub const TABLE_LIMIT: u64 = 256;

/// Description of a supported finite ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RingSpec {
    /// Integers modulo `n`, `n >= 2`.
    Modular(u64),
    /// Direct product, left component first.
    Product(Box<RingSpec>, Box<RingSpec>),
    /// `size x size` matrices over `Z/modulus`.
    Matrix { size: usize, modulus: u64 },
}

impl RingSpec {
    pub fn modular(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::parse(format!("Z/{n}"), "modulus must be at least 2"));
        }
        Ok(RingSpec::Modular(n))
    }

    pub fn matrix(size: usize, modulus: u64) -> Result<Self> {
        if size < 1 {
            return Err(Error::parse(
                format!("M({size},Z/{modulus})"),
                "matrix size must be at least 1",
            ));
        }
        if modulus < 2 {
            return Err(Error::parse(format!("Z/{modulus}"), "modulus must be at least 2"));
        }
        Ok(RingSpec::Matrix { size, modulus })
    }

    pub fn product(left: RingSpec, right: RingSpec) -> Self {
        RingSpec::Product(Box::new(left), Box::new(right))
    }

    /// Number of elements, or `None` if it does not fit a `u64` code.
    pub fn order(&self) -> Option<u64> {
        match self {
            RingSpec::Modular(n) => Some(*n),
            RingSpec::Product(l, r) => l.order()?.checked_mul(r.order()?),
            RingSpec::Matrix { size, modulus } => {
                let digits = u32::try_from(size.checked_mul(*size)?).ok()?;
                modulus.checked_pow(digits)
            }
        }
    }

    pub fn is_commutative(&self) -> bool {
        match self {
            RingSpec::Modular(_) => true,
            RingSpec::Product(l, r) => l.is_commutative() && r.is_commutative(),
            RingSpec::Matrix { size, .. } => *size == 1,
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Modular(n) => write!(f, "Z/{n}"),
            RingSpec::Product(l, r) => write!(f, "{l} x {r}"),
            RingSpec::Matrix { size, modulus } => write!(f, "M({size},Z/{modulus})"),
        }
    }
}

impl std::str::FromStr for RingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_ring_spec(s)
    }
}

/// Parses `Z/<n>`, `M(<k>,Z/<n>)` and left-associative products `<spec> x <spec>`.
pub fn parse_ring_spec(text: &str) -> Result<RingSpec> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::parse("", "empty ring specification"));
    }
    let mut parts = text.split(" x ");
    let first = parse_atom(parts.next().unwrap_or_default())?;
    parts.try_fold(first, |acc, tok| Ok(RingSpec::product(acc, parse_atom(tok)?)))
}

fn parse_decimal(token: &str, whole: &str) -> Result<u64> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(whole, format!("expected a decimal number, found `{token}`")));
    }
    token
        .parse::<u64>()
        .map_err(|_| Error::parse(whole, format!("number `{token}` out of range")))
}

fn parse_atom(token: &str) -> Result<RingSpec> {
    let tok = token.trim();
    if let Some(n) = tok.strip_prefix("Z/") {
        let n = parse_decimal(n, tok)?;
        if n < 2 {
            return Err(Error::parse(tok, "modulus must be at least 2"));
        }
        return Ok(RingSpec::Modular(n));
    }
    if let Some(inner) = tok.strip_prefix("M(").and_then(|t| t.strip_suffix(')')) {
        let (k, base) = inner
            .split_once(',')
            .ok_or_else(|| Error::parse(tok, "expected `M(<k>,Z/<n>)`"))?;
        let k = parse_decimal(k, tok)?;
        let n = base
            .strip_prefix("Z/")
            .ok_or_else(|| Error::parse(tok, format!("expected `Z/<n>`, found `{base}`")))?;
        let n = parse_decimal(n, tok)?;
        if k < 1 {
            return Err(Error::parse(tok, "matrix size must be at least 1"));
        }
        if n < 2 {
            return Err(Error::parse(tok, "modulus must be at least 2"));
        }
        let size = usize::try_from(k).map_err(|_| Error::parse(tok, "matrix size too large"))?;
        return Ok(RingSpec::Matrix { size, modulus: n });
    }
    Err(Error::parse(tok, "unrecognised ring token"))
}

/// An element of a [`Ring`], stored as its canonical code.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement(u64);

impl RingElement {
    pub fn code(self) -> u64 {
        self.0
    }
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
}

/// A finite ring ready for arithmetic.
///
/// Cloning is cheap; the operation tables are shared.
#[derive(Clone)]
pub struct Ring {
    spec: RingSpec,
    order: u64,
    tables: Option<Arc<Tables>>,
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ring").field("spec", &self.spec.to_string()).finish()
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Ring {}

impl Ring {
    pub fn new(spec: RingSpec) -> Result<Self> {
        validate_spec(&spec)?;
        let order = spec
            .order()
            .filter(|&o| o < (1u64 << 62))
            .ok_or_else(|| Error::parse(spec.to_string(), "ring has too many elements"))?;
        let mut ring = Ring { spec, order, tables: None };
        if order <= TABLE_LIMIT {
            let n = order as usize;
            let mut add = Vec::with_capacity(n * n);
            let mut mul = Vec::with_capacity(n * n);
            for a in 0..order {
                for b in 0..order {
                    add.push(raw_add(&ring.spec, a, b) as u32);
                    mul.push(raw_mul(&ring.spec, a, b) as u32);
                }
            }
            ring.tables = Some(Arc::new(Tables { add, mul }));
        }
        Ok(ring)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ring::new(parse_ring_spec(text)?)
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_commutative(&self) -> bool {
        self.spec.is_commutative()
    }

    /// Wraps a raw code, checking that it is in range.
    pub fn element(&self, code: u64) -> Result<RingElement> {
        if code < self.order {
            Ok(RingElement(code))
        } else {
            Err(Error::Incompatible(format!(
                "code {code} is not an element of {}",
                self.spec
            )))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = RingElement> + '_ {
        (0..self.order).map(RingElement)
    }

    pub fn zero(&self) -> RingElement {
        RingElement(0)
    }

    pub fn one(&self) -> RingElement {
        RingElement(raw_one(&self.spec))
    }

    pub fn is_zero(&self, x: RingElement) -> bool {
        x.0 == 0
    }

    pub fn add(&self, a: RingElement, b: RingElement) -> RingElement {
        match &self.tables {
            Some(t) => RingElement(t.add[(a.0 * self.order + b.0) as usize] as u64),
            None => RingElement(raw_add(&self.spec, a.0, b.0)),
        }
    }

    pub fn sub(&self, a: RingElement, b: RingElement) -> RingElement {
        self.add(a, self.neg(b))
    }

    pub fn neg(&self, a: RingElement) -> RingElement {
        RingElement(raw_scale(&self.spec, a.0, -1))
    }

    pub fn mul(&self, a: RingElement, b: RingElement) -> RingElement {
        match &self.tables {
            Some(t) => RingElement(t.mul[(a.0 * self.order + b.0) as usize] as u64),
            None => RingElement(raw_mul(&self.spec, a.0, b.0)),
        }
    }

    /// `k * a` for an integer `k` (the ring as an algebra over the integers).
    pub fn int_scale(&self, a: RingElement, k: i64) -> RingElement {
        RingElement(raw_scale(&self.spec, a.0, k))
    }

    /// The image of the integer `k` under the unital map from the integers.
    pub fn from_int(&self, k: i64) -> RingElement {
        self.int_scale(self.one(), k)
    }

    pub fn sum<I: IntoIterator<Item = RingElement>>(&self, items: I) -> RingElement {
        items.into_iter().fold(self.zero(), |acc, x| self.add(acc, x))
    }

    pub fn product<I: IntoIterator<Item = RingElement>>(&self, items: I) -> RingElement {
        items.into_iter().fold(self.one(), |acc, x| self.mul(acc, x))
    }

    pub fn pow(&self, a: RingElement, mut e: u64) -> RingElement {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Two-sided inverse, if `a` is a unit.
    pub fn inverse(&self, a: RingElement) -> Option<RingElement> {
        raw_inverse(&self.spec, a.0).map(RingElement)
    }

    pub fn is_unit(&self, a: RingElement) -> bool {
        self.inverse(a).is_some()
    }

    pub fn try_inverse(&self, a: RingElement) -> Result<RingElement> {
        self.inverse(a)
            .ok_or_else(|| Error::NonUnit(format!("{} is not invertible in {}", self.format(a), self.spec)))
    }

    /// Generators of the additive group together with their additive orders.
    ///
    /// The additive group is the direct sum of the cyclic groups they span.
    pub fn additive_basis(&self) -> Vec<(RingElement, u64)> {
        raw_basis(&self.spec)
            .into_iter()
            .map(|(c, o)| (RingElement(c), o))
            .collect()
    }

    /// `a` commutes with every element of the ring.
    ///
    /// Checked against the additive generators, which suffices by distributivity.
    pub fn is_central(&self, a: RingElement) -> bool {
        self.is_commutative()
            || self
                .additive_basis()
                .into_iter()
                .all(|(g, _)| self.mul(a, g) == self.mul(g, a))
    }

    /// The center `C(R)`, in code order.
    pub fn center(&self) -> Vec<RingElement> {
        if self.is_commutative() {
            return self.elements().collect();
        }
        let basis = self.additive_basis();
        self.elements()
            .filter(|&a| basis.iter().all(|&(g, _)| self.mul(a, g) == self.mul(g, a)))
            .collect()
    }

    /// Invertible central elements, in code order.
    pub fn central_units(&self) -> Vec<RingElement> {
        self.center().into_iter().filter(|&a| self.is_unit(a)).collect()
    }

    /// Text encoding: decimal residue, `(l,r)` for products, `[[..],[..]]` for matrices.
    pub fn format(&self, a: RingElement) -> String {
        let mut out = String::new();
        raw_format(&self.spec, a.0, &mut out);
        out
    }

    pub fn parse_element(&self, text: &str) -> Result<RingElement> {
        let mut p = ElementParser { src: text.as_bytes(), pos: 0, whole: text };
        p.skip_ws();
        let code = p.parse(&self.spec)?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::parse(text, "trailing characters after element"));
        }
        Ok(RingElement(code))
    }
}

fn validate_spec(spec: &RingSpec) -> Result<()> {
    match spec {
        RingSpec::Modular(n) if *n < 2 => Err(Error::parse(spec.to_string(), "modulus must be at least 2")),
        RingSpec::Matrix { size, modulus } if *size < 1 || *modulus < 2 => {
            Err(Error::parse(spec.to_string(), "invalid matrix ring"))
        }
        RingSpec::Product(l, r) => {
            validate_spec(l)?;
            validate_spec(r)
        }
        _ => Ok(()),
    }
}

// ---- raw code arithmetic -------------------------------------------------

fn mulmod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn split(r: &RingSpec, code: u64) -> (u64, u64) {
    let ro = r.order().expect("validated order");
    (code / ro, code % ro)
}

fn join(r: &RingSpec, left: u64, right: u64) -> u64 {
    left * r.order().expect("validated order") + right
}

fn decode_matrix(size: usize, modulus: u64, mut code: u64) -> Vec<u64> {
    let mut digits = vec![0; size * size];
    for d in digits.iter_mut().rev() {
        *d = code % modulus;
        code /= modulus;
    }
    digits
}

fn encode_matrix(modulus: u64, digits: &[u64]) -> u64 {
    digits.iter().fold(0, |acc, &d| acc * modulus + d)
}

fn raw_one(spec: &RingSpec) -> u64 {
    match spec {
        RingSpec::Modular(_) => 1,
        RingSpec::Product(l, r) => join(r, raw_one(l), raw_one(r)),
        RingSpec::Matrix { size, modulus } => {
            let mut d = vec![0; size * size];
            for i in 0..*size {
                d[i * size + i] = 1;
            }
            encode_matrix(*modulus, &d)
        }
    }
}

fn raw_add(spec: &RingSpec, a: u64, b: u64) -> u64 {
    match spec {
        RingSpec::Modular(n) => ((a as u128 + b as u128) % *n as u128) as u64,
        RingSpec::Product(l, r) => {
            let (al, ar) = split(r, a);
            let (bl, br) = split(r, b);
            join(r, raw_add(l, al, bl), raw_add(r, ar, br))
        }
        RingSpec::Matrix { size, modulus } => {
            let x = decode_matrix(*size, *modulus, a);
            let y = decode_matrix(*size, *modulus, b);
            let z: Vec<u64> = x.iter().zip(&y).map(|(p, q)| (p + q) % modulus).collect();
            encode_matrix(*modulus, &z)
        }
    }
}

fn raw_scale(spec: &RingSpec, a: u64, k: i64) -> u64 {
    match spec {
        RingSpec::Modular(n) => {
            let k = (k as i128).rem_euclid(*n as i128) as u64;
            mulmod(a, k, *n)
        }
        RingSpec::Product(l, r) => {
            let (al, ar) = split(r, a);
            join(r, raw_scale(l, al, k), raw_scale(r, ar, k))
        }
        RingSpec::Matrix { size, modulus } => {
            let k = (k as i128).rem_euclid(*modulus as i128) as u64;
            let x = decode_matrix(*size, *modulus, a);
            let z: Vec<u64> = x.iter().map(|&p| mulmod(p, k, *modulus)).collect();
            encode_matrix(*modulus, &z)
        }
    }
}

fn matmul_mod(size: usize, modulus: u64, x: &[u64], y: &[u64]) -> Vec<u64> {
    let mut z = vec![0; size * size];
    for i in 0..size {
        for j in 0..size {
            let mut acc = 0u64;
            for t in 0..size {
                acc = (acc + mulmod(x[i * size + t], y[t * size + j], modulus)) % modulus;
            }
            z[i * size + j] = acc;
        }
    }
    z
}

fn raw_mul(spec: &RingSpec, a: u64, b: u64) -> u64 {
    match spec {
        RingSpec::Modular(n) => mulmod(a, b, *n),
        RingSpec::Product(l, r) => {
            let (al, ar) = split(r, a);
            let (bl, br) = split(r, b);
            join(r, raw_mul(l, al, bl), raw_mul(r, ar, br))
        }
        RingSpec::Matrix { size, modulus } => {
            let x = decode_matrix(*size, *modulus, a);
            let y = decode_matrix(*size, *modulus, b);
            encode_matrix(*modulus, &matmul_mod(*size, *modulus, &x, &y))
        }
    }
}

/// Inverse of `a` modulo `n` by the extended Euclidean algorithm.
pub(crate) fn inverse_mod(a: u64, n: u64) -> Option<u64> {
    let (mut r0, mut r1) = (n as i128, (a % n) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(n as i128) as u64)
}

/// Determinant of a square matrix over `Z/modulus` by cofactor expansion.
fn det_mod(size: usize, modulus: u64, m: &[u64]) -> u64 {
    match size {
        0 => 1 % modulus,
        1 => m[0] % modulus,
        _ => {
            let mut acc = 0u64;
            for col in 0..size {
                let entry = m[col];
                if entry == 0 {
                    continue;
                }
                let minor = minor_of(size, m, 0, col);
                let term = mulmod(entry, det_mod(size - 1, modulus, &minor), modulus);
                acc = if col % 2 == 0 {
                    (acc + term) % modulus
                } else {
                    (acc + modulus - term) % modulus
                };
            }
            acc
        }
    }
}

fn minor_of(size: usize, m: &[u64], row: usize, col: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity((size - 1) * (size - 1));
    for i in (0..size).filter(|&i| i != row) {
        for j in (0..size).filter(|&j| j != col) {
            out.push(m[i * size + j]);
        }
    }
    out
}

fn raw_inverse(spec: &RingSpec, a: u64) -> Option<u64> {
    match spec {
        RingSpec::Modular(n) => inverse_mod(a, *n),
        RingSpec::Product(l, r) => {
            let (al, ar) = split(r, a);
            Some(join(r, raw_inverse(l, al)?, raw_inverse(r, ar)?))
        }
        RingSpec::Matrix { size, modulus } => {
            let (k, n) = (*size, *modulus);
            let m = decode_matrix(k, n, a);
            let det_inv = inverse_mod(det_mod(k, n, &m), n)?;
            let mut inv = vec![0; k * k];
            if k == 1 {
                inv[0] = det_inv;
            } else {
                for i in 0..k {
                    for j in 0..k {
                        // adj[j][i] = (-1)^(i+j) det(minor(i, j))
                        let c = det_mod(k - 1, n, &minor_of(k, &m, i, j));
                        let c = if (i + j) % 2 == 0 { c } else { (n - c) % n };
                        inv[j * k + i] = mulmod(c, det_inv, n);
                    }
                }
            }
            Some(encode_matrix(n, &inv))
        }
    }
}

fn raw_basis(spec: &RingSpec) -> Vec<(u64, u64)> {
    match spec {
        RingSpec::Modular(n) => vec![(1, *n)],
        RingSpec::Product(l, r) => {
            let mut out: Vec<(u64, u64)> =
                raw_basis(l).into_iter().map(|(c, o)| (join(r, c, 0), o)).collect();
            out.extend(raw_basis(r).into_iter().map(|(c, o)| (join(r, 0, c), o)));
            out
        }
        RingSpec::Matrix { size, modulus } => (0..size * size)
            .map(|pos| {
                let mut d = vec![0; size * size];
                d[pos] = 1;
                (encode_matrix(*modulus, &d), *modulus)
            })
            .collect(),
    }
}

fn raw_format(spec: &RingSpec, a: u64, out: &mut String) {
    use std::fmt::Write;
    match spec {
        RingSpec::Modular(_) => {
            let _ = write!(out, "{a}");
        }
        RingSpec::Product(l, r) => {
            let (al, ar) = split(r, a);
            out.push('(');
            raw_format(l, al, out);
            out.push(',');
            raw_format(r, ar, out);
            out.push(')');
        }
        RingSpec::Matrix { size, modulus } => {
            let d = decode_matrix(*size, *modulus, a);
            out.push('[');
            for i in 0..*size {
                if i > 0 {
                    out.push(',');
                }
                out.push('[');
                for j in 0..*size {
                    if j > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "{}", d[i * size + j]);
                }
                out.push(']');
            }
            out.push(']');
        }
    }
}

struct ElementParser<'a> {
    src: &'a [u8],
    pos: usize,
    whole: &'a str,
}

impl ElementParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, ch: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::parse(
                self.whole,
                format!("expected `{}` at offset {}", ch as char, self.pos),
            ))
        }
    }

    fn residue(&mut self, modulus: u64) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let tok = &self.whole[start..self.pos];
        let v = parse_decimal(tok, self.whole)?;
        if v >= modulus {
            return Err(Error::parse(
                self.whole,
                format!("residue {v} out of range for Z/{modulus}"),
            ));
        }
        Ok(v)
    }

    fn parse(&mut self, spec: &RingSpec) -> Result<u64> {
        match spec {
            RingSpec::Modular(n) => self.residue(*n),
            RingSpec::Product(l, r) => {
                self.expect(b'(')?;
                let a = self.parse(l)?;
                self.expect(b',')?;
                let b = self.parse(r)?;
                self.expect(b')')?;
                Ok(join(r, a, b))
            }
            RingSpec::Matrix { size, modulus } => {
                let mut d = Vec::with_capacity(size * size);
                self.expect(b'[')?;
                for i in 0..*size {
                    if i > 0 {
                        self.expect(b',')?;
                    }
                    self.expect(b'[')?;
                    for j in 0..*size {
                        if j > 0 {
                            self.expect(b',')?;
                        }
                        d.push(self.residue(*modulus)?);
                    }
                    self.expect(b']')?;
                }
                self.expect(b']')?;
                Ok(encode_matrix(*modulus, &d))
            }
        }
    }
}

/// Square matrix over a ring, used for the blocks of incidence functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingMatrix {
    rows: usize,
    cols: usize,
    data: Vec<RingElement>,
}

impl RingMatrix {
    pub fn zero(ring: &Ring, rows: usize, cols: usize) -> Self {
        RingMatrix { rows, cols, data: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: &Ring, size: usize) -> Self {
        let mut m = Self::zero(ring, size, size);
        for i in 0..size {
            m.data[i * size + i] = ring.one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<RingElement>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        RingMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> RingElement {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RingElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add(&self, ring: &Ring, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| ring.add(a, b)).collect();
        RingMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, ring: &Ring, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zero(ring, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let v = ring.sum((0..self.cols).map(|t| ring.mul(self.get(i, t), other.get(t, j))));
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn is_zero(&self, ring: &Ring) -> bool {
        self.data.iter().all(|&x| ring.is_zero(x))
    }

    /// Determinant by cofactor expansion; commutative rings only.
    pub fn determinant(&self, ring: &Ring) -> RingElement {
        assert_eq!(self.rows, self.cols);
        det_generic(ring, self.rows, &self.data)
    }

    /// Two-sided inverse.
    ///
    /// Over a commutative ring this uses the adjugate, which needs no pivot
    /// search and so also works over rings such as `Z/12` where an invertible
    /// matrix may have no unit entry in a column. Products are inverted
    /// componentwise and blocks over `M(d, Z/n)` as `kd x kd` matrices over `Z/n`.
    pub fn inverse(&self, ring: &Ring) -> Result<RingMatrix> {
        if self.rows != self.cols {
            return Err(Error::NonUnit("non-square matrix".into()));
        }
        let k = self.rows;
        if k == 1 {
            let inv = ring.try_inverse(self.data[0])?;
            return Ok(RingMatrix { rows: 1, cols: 1, data: vec![inv] });
        }
        if !ring.is_commutative() {
            return self.inverse_by_structure(ring);
        }
        let det = self.determinant(ring);
        let det_inv = ring
            .inverse(det)
            .ok_or_else(|| Error::NonUnit(format!("block determinant {} is not a unit", ring.format(det))))?;
        let mut inv = Self::zero(ring, k, k);
        for i in 0..k {
            for j in 0..k {
                let minor = minor_generic(k, &self.data, i, j);
                let mut c = det_generic(ring, k - 1, &minor);
                if (i + j) % 2 == 1 {
                    c = ring.neg(c);
                }
                inv.set(j, i, ring.mul(c, det_inv));
            }
        }
        Ok(inv)
    }
}

impl RingMatrix {
    fn map_codes(&self, f: impl Fn(u64) -> u64) -> Self {
        let data = self.data.iter().map(|x| RingElement(f(x.0))).collect();
        RingMatrix { rows: self.rows, cols: self.cols, data }
    }

    fn inverse_by_structure(&self, ring: &Ring) -> Result<RingMatrix> {
        let k = self.rows;
        match ring.spec() {
            RingSpec::Modular(_) => unreachable!("commutative"),
            RingSpec::Product(l, r) => {
                let (lr, rr) = (Ring::new((**l).clone())?, Ring::new((**r).clone())?);
                let ro = rr.order();
                let li = self.map_codes(|c| c / ro).inverse(&lr)?;
                let ri = self.map_codes(|c| c % ro).inverse(&rr)?;
                let data = li.data.iter().zip(&ri.data).map(|(a, b)| RingElement(a.0 * ro + b.0)).collect();
                Ok(RingMatrix { rows: k, cols: k, data })
            }
            &RingSpec::Matrix { size: d, modulus } => {
                let zn = Ring::new(RingSpec::Modular(modulus))?;
                let big = k * d;
                let mut flat = RingMatrix::zero(&zn, big, big);
                for i in 0..k {
                    for j in 0..k {
                        let digits = decode_matrix(d, modulus, self.get(i, j).0);
                        for a in 0..d {
                            for b in 0..d {
                                flat.set(i * d + a, j * d + b, RingElement(digits[a * d + b]));
                            }
                        }
                    }
                }
                let inv = flat.inverse(&zn)?;
                let mut out = RingMatrix::zero(ring, k, k);
                for i in 0..k {
                    for j in 0..k {
                        let digits: Vec<u64> = (0..d * d)
                            .map(|p| inv.get(i * d + p / d, j * d + p % d).0)
                            .collect();
                        out.set(i, j, RingElement(encode_matrix(modulus, &digits)));
                    }
                }
                Ok(out)
            }
        }
    }
}

fn minor_generic(size: usize, m: &[RingElement], row: usize, col: usize) -> Vec<RingElement> {
    let mut out = Vec::with_capacity((size - 1) * (size - 1));
    for i in (0..size).filter(|&i| i != row) {
        for j in (0..size).filter(|&j| j != col) {
            out.push(m[i * size + j]);
        }
    }
    out
}

fn det_generic(ring: &Ring, size: usize, m: &[RingElement]) -> RingElement {
    match size {
        0 => ring.one(),
        1 => m[0],
        _ => {
            let mut acc = ring.zero();
            for col in 0..size {
                if ring.is_zero(m[col]) {
                    continue;
                }
                let term = ring.mul(m[col], det_generic(ring, size - 1, &minor_generic(size, m, 0, col)));
                acc = if col % 2 == 0 { ring.add(acc, term) } else { ring.sub(acc, term) };
            }
            acc
        }
    }
}

/// The abelian group `G` of invertible central elements, with its operation
/// tables indexed by position.
#[derive(Clone, Debug)]
pub struct CentralUnitGroup {
    ring: Ring,
    elements: Vec<RingElement>,
    identity: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
}

impl CentralUnitGroup {
    pub fn new(ring: &Ring) -> Self {
        let elements = ring.central_units();
        let pos = |x: RingElement| elements.binary_search(&x).expect("closed under product");
        let n = elements.len();
        let mut mul = Vec::with_capacity(n * n);
        for &a in &elements {
            for &b in &elements {
                mul.push(pos(ring.mul(a, b)));
            }
        }
        let inv = elements
            .iter()
            .map(|&a| pos(ring.inverse(a).expect("unit")))
            .collect();
        let identity = pos(ring.one());
        CentralUnitGroup { ring: ring.clone(), elements, identity, mul, inv }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[RingElement] {
        &self.elements
    }

    pub fn element(&self, index: usize) -> RingElement {
        self.elements[index]
    }

    pub fn index_of(&self, x: RingElement) -> Option<usize> {
        self.elements.binary_search(&x).ok()
    }

    pub fn contains(&self, x: RingElement) -> bool {
        self.index_of(x).is_some()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.elements.len() + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }
}
