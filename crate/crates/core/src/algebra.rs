//! The incidence algebra `I(X, R)` of a finite preorder over a finite ring.
//!
//! Functions are stored densely, indexed by ordered pairs of elements; pairs
//! with `x` not below `y` always hold zero.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::preorder::{Preorder, QuotientPoset};
use crate::ring::{Ring, RingElement, RingMatrix};

/// The carrier shared by all functions of one algebra.
pub struct IncidenceAlgebra {
    preorder: Preorder,
    quotient: QuotientPoset,
    ring: Ring,
    intervals: Vec<Vec<usize>>,
}

impl fmt::Debug for IncidenceAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IncidenceAlgebra")
            .field("labels", &self.preorder.labels())
            .field("ring", &self.ring.spec().to_string())
            .finish()
    }
}

impl PartialEq for IncidenceAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.preorder == other.preorder && self.ring == other.ring
    }
}

impl Eq for IncidenceAlgebra {}

impl IncidenceAlgebra {
    pub fn new(preorder: Preorder, ring: Ring) -> Arc<Self> {
        let n = preorder.len();
        let quotient = preorder.quotient();
        let intervals = (0..n * n)
            .map(|p| preorder.interval_indices(p / n, p % n))
            .collect();
        Arc::new(IncidenceAlgebra { preorder, quotient, ring, intervals })
    }

    pub fn preorder(&self) -> &Preorder {
        &self.preorder
    }

    pub fn quotient(&self) -> &QuotientPoset {
        &self.quotient
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn size(&self) -> usize {
        self.preorder.len()
    }

    /// Comparable ordered pairs `(x, y)`, `x <= y`, including the diagonal.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let n = self.size();
        (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| self.preorder.leq(x, y))
            .collect()
    }

    /// Nilpotency index bound for `M`: every product of more than
    /// `height` elements of `M` vanishes.
    pub fn radical_height(&self) -> usize {
        self.quotient.height()
    }
}

/// An element of an incidence algebra.
#[derive(Clone)]
pub struct IncidenceFunction {
    algebra: Arc<IncidenceAlgebra>,
    values: Vec<RingElement>,
}

impl PartialEq for IncidenceFunction {
    fn eq(&self, other: &Self) -> bool {
        same_carrier(&self.algebra, &other.algebra) && self.values == other.values
    }
}

impl Eq for IncidenceFunction {}

impl fmt::Debug for IncidenceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (x, y, v) in self.entries() {
            m.entry(
                &format!("{}->{}", self.algebra.preorder.label(x), self.algebra.preorder.label(y)),
                &self.algebra.ring.format(v),
            );
        }
        m.finish()
    }
}

fn same_carrier(a: &Arc<IncidenceAlgebra>, b: &Arc<IncidenceAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl IncidenceAlgebra {
    pub fn zero(self: &Arc<Self>) -> IncidenceFunction {
        let n = self.size();
        IncidenceFunction { algebra: Arc::clone(self), values: vec![self.ring.zero(); n * n] }
    }

    /// The identity of the algebra.
    pub fn delta(self: &Arc<Self>) -> IncidenceFunction {
        let mut f = self.zero();
        for x in 0..self.size() {
            f.put(x, x, self.ring.one());
        }
        f
    }

    pub fn zeta(self: &Arc<Self>) -> IncidenceFunction {
        let mut f = self.zero();
        for (x, y) in self.support() {
            f.put(x, y, self.ring.one());
        }
        f
    }

    /// The central idempotent `e_[x]` of a class of the quotient.
    pub fn class_idempotent(self: &Arc<Self>, class: usize) -> IncidenceFunction {
        let mut f = self.zero();
        for &t in self.quotient.members(class) {
            f.put(t, t, self.ring.one());
        }
        f
    }

    /// The single-entry function with value `value` at `(x, y)`.
    pub fn single(self: &Arc<Self>, x: usize, y: usize, value: RingElement) -> Result<IncidenceFunction> {
        if !self.preorder.leq(x, y) {
            return Err(Error::Support(
                self.preorder.label(x).to_string(),
                self.preorder.label(y).to_string(),
            ));
        }
        let mut f = self.zero();
        f.put(x, y, value);
        Ok(f)
    }

    /// Matrix unit `e_xy` for distinct comparable `x <= y`.
    pub fn matrix_unit(self: &Arc<Self>, x: usize, y: usize) -> Result<IncidenceFunction> {
        if x == y {
            return Err(Error::Domain(format!(
                "matrix unit needs distinct elements, got {} twice",
                self.preorder.label(x)
            )));
        }
        self.single(x, y, self.ring.one())
    }

    pub fn matrix_unit_by_label(self: &Arc<Self>, x: &str, y: &str) -> Result<IncidenceFunction> {
        self.matrix_unit(self.preorder.index_of(x)?, self.preorder.index_of(y)?)
    }

    /// Function with exactly the listed entries; later duplicates overwrite.
    pub fn from_entries<S: AsRef<str>>(
        self: &Arc<Self>,
        entries: &[(S, S, RingElement)],
    ) -> Result<IncidenceFunction> {
        let mut f = self.zero();
        for (x, y, v) in entries {
            let (i, j) = (self.preorder.index_of(x.as_ref())?, self.preorder.index_of(y.as_ref())?);
            if !self.preorder.leq(i, j) {
                return Err(Error::Support(x.as_ref().to_string(), y.as_ref().to_string()));
            }
            self.ring.element(v.code())?;
            f.put(i, j, *v);
        }
        Ok(f)
    }

    /// Function from raw values on [`IncidenceAlgebra::support`], in that order.
    pub fn from_support_values(self: &Arc<Self>, values: &[RingElement]) -> IncidenceFunction {
        let support = self.support();
        assert_eq!(values.len(), support.len());
        let mut f = self.zero();
        for (&(x, y), &v) in support.iter().zip(values) {
            f.put(x, y, v);
        }
        f
    }
}

impl IncidenceFunction {
    pub fn algebra(&self) -> &Arc<IncidenceAlgebra> {
        &self.algebra
    }

    fn ring(&self) -> &Ring {
        &self.algebra.ring
    }

    fn n(&self) -> usize {
        self.algebra.size()
    }

    fn put(&mut self, x: usize, y: usize, v: RingElement) {
        let n = self.n();
        self.values[x * n + y] = v;
    }

    pub fn get(&self, x: usize, y: usize) -> RingElement {
        self.values[x * self.n() + y]
    }

    pub fn get_by_label(&self, x: &str, y: &str) -> Result<RingElement> {
        let p = &self.algebra.preorder;
        Ok(self.get(p.index_of(x)?, p.index_of(y)?))
    }

    /// Sets a value; the pair must be comparable.
    pub fn set(&mut self, x: usize, y: usize, v: RingElement) -> Result<()> {
        if !self.algebra.preorder.leq(x, y) {
            let p = &self.algebra.preorder;
            return Err(Error::Support(p.label(x).to_string(), p.label(y).to_string()));
        }
        self.put(x, y, v);
        Ok(())
    }

    /// Non-zero entries in index order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, RingElement)> + '_ {
        let n = self.n();
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.code() != 0)
            .map(move |(p, &v)| (p / n, p % n, v))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.code() == 0)
    }

    fn check_carrier(&self, other: &IncidenceFunction) -> Result<()> {
        if same_carrier(&self.algebra, &other.algebra) {
            Ok(())
        } else {
            Err(Error::Incompatible("functions live in different incidence algebras".into()))
        }
    }

    fn map(&self, f: impl Fn(usize, usize, RingElement) -> RingElement) -> Self {
        let n = self.n();
        let values = self.values.iter().enumerate().map(|(p, &v)| f(p / n, p % n, v)).collect();
        IncidenceFunction { algebra: Arc::clone(&self.algebra), values }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_carrier(other)?;
        let r = self.ring();
        Ok(self.map(|x, y, v| r.add(v, other.get(x, y))))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_carrier(other)?;
        let r = self.ring();
        Ok(self.map(|x, y, v| r.sub(v, other.get(x, y))))
    }

    pub fn neg(&self) -> Self {
        let r = self.ring();
        self.map(|_, _, v| r.neg(v))
    }

    pub fn int_scale(&self, k: i64) -> Self {
        let r = self.ring();
        self.map(|_, _, v| r.int_scale(v, k))
    }

    /// `c * f` pointwise, multiplying on the left.
    pub fn left_scale(&self, c: RingElement) -> Self {
        let r = self.ring();
        self.map(|_, _, v| r.mul(c, v))
    }

    /// `(fg)(x, y) = sum over x <= z <= y of f(x, z) g(z, y)`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_carrier(other)?;
        let r = self.ring();
        let n = self.n();
        let alg = &self.algebra;
        let mut out = alg.zero();
        for p in 0..n * n {
            let (x, y) = (p / n, p % n);
            let mut acc = r.zero();
            for &z in &alg.intervals[p] {
                let a = self.get(x, z);
                if a.code() == 0 {
                    continue;
                }
                acc = r.add(acc, r.mul(a, other.get(z, y)));
            }
            out.values[p] = acc;
        }
        Ok(out)
    }

    /// `(l, m)`: the part supported on `x ~ y` and the part on `x !~ y`.
    pub fn split_lm(&self) -> (Self, Self) {
        let p = &self.algebra.preorder;
        let zero = self.ring().zero();
        let l = self.map(|x, y, v| if p.equiv(x, y) { v } else { zero });
        let m = self.map(|x, y, v| if p.equiv(x, y) { zero } else { v });
        (l, m)
    }

    pub fn l_part(&self) -> Self {
        self.split_lm().0
    }

    pub fn m_part(&self) -> Self {
        self.split_lm().1
    }

    pub fn is_in_l(&self) -> bool {
        self.m_part().is_zero()
    }

    pub fn is_in_m(&self) -> bool {
        self.l_part().is_zero()
    }

    /// The block `(f(x_i, y_j))` between two classes of the quotient, under
    /// the lexicographic numbering of each class.
    pub fn block(&self, x: usize, y: usize) -> RingMatrix {
        let q = &self.algebra.quotient;
        let (xs, ys) = (q.members(x), q.members(y));
        let mut m = RingMatrix::zero(self.ring(), xs.len(), ys.len());
        for (i, &s) in xs.iter().enumerate() {
            for (j, &t) in ys.iter().enumerate() {
                m.set(i, j, self.get(s, t));
            }
        }
        m
    }

    /// Inverse of an element of `L`, computed blockwise on the classes.
    fn invert_l(&self) -> Result<Self> {
        let q = &self.algebra.quotient;
        let r = self.ring();
        let mut out = self.algebra.zero();
        for c in 0..q.len() {
            let inv = self.block(c, c).inverse(r).map_err(|e| {
                Error::NonUnit(format!("diagonal block of class [{}]: {e}", q.representative(c)))
            })?;
            let members = q.members(c);
            for (i, &s) in members.iter().enumerate() {
                for (j, &t) in members.iter().enumerate() {
                    out.put(s, t, inv.get(i, j));
                }
            }
        }
        Ok(out)
    }

    /// `(1 + d)^(-1)` for `d` in `M`, as the terminating series `1 - d + d^2 - ...`.
    fn invert_one_plus_radical(d: &Self) -> Result<Self> {
        let alg = &d.algebra;
        let mut acc = alg.delta();
        let mut power = alg.delta();
        for k in 1..=alg.radical_height() {
            power = power.convolve(d)?;
            if power.is_zero() {
                break;
            }
            acc = if k % 2 == 1 { acc.sub(&power)? } else { acc.add(&power)? };
        }
        Ok(acc)
    }

    /// `u = (1 + d) v` with `v` the `L`-part of `u` and `d = m v^(-1)` in `M`.
    pub fn unit_decompose(&self) -> Result<(Self, Self)> {
        let (l, m) = self.split_lm();
        let v_inv = l.invert_l()?;
        let d = m.convolve(&v_inv)?;
        Ok((d, l))
    }

    pub fn invert(&self) -> Result<Self> {
        let (d, v) = self.unit_decompose()?;
        let v_inv = v.invert_l()?;
        let w = Self::invert_one_plus_radical(&d)?;
        v_inv.convolve(&w)
    }

    pub fn is_unit(&self) -> bool {
        self.split_lm().0.invert_l().is_ok()
    }

    /// `u^(-1) f u`.
    pub fn conjugate(&self, u: &Self) -> Result<Self> {
        self.check_carrier(u)?;
        u.invert()?.convolve(self)?.convolve(u)
    }

    /// Pointwise product `m * f`, with `m` on the left.
    pub fn hadamard(m: &Self, f: &Self) -> Result<Self> {
        m.check_carrier(f)?;
        let r = m.ring();
        Ok(m.map(|x, y, v| r.mul(v, f.get(x, y))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(elements: &[&str], rel: &[(&str, &str)], ring: &str) -> Arc<IncidenceAlgebra> {
        IncidenceAlgebra::new(
            Preorder::close_relations(elements, rel).unwrap(),
            Ring::parse(ring).unwrap(),
        )
    }

    fn chain3(ring: &str) -> Arc<IncidenceAlgebra> {
        alg(&["a", "b", "c"], &[("a", "b"), ("b", "c")], ring)
    }

    fn el(a: &IncidenceAlgebra, s: &str) -> RingElement {
        a.ring().parse_element(s).unwrap()
    }

    #[test]
    fn from_entries_enforces_support() {
        let a = chain3("Z/5");
        let eab = a.from_entries(&[("a", "b", el(&a, "1"))]).unwrap();
        assert_eq!(eab, a.matrix_unit_by_label("a", "b").unwrap());
        let err = a.from_entries(&[("c", "a", el(&a, "1"))]).unwrap_err();
        assert_eq!(err, Error::Support("c".into(), "a".into()));
        let pq = alg(&["p", "q"], &[("p", "q"), ("q", "p")], "Z/5");
        assert!(pq.from_entries(&[("p", "q", el(&pq, "2"))]).is_ok());
        assert!(a.matrix_unit_by_label("c", "a").is_err());
        assert!(a.matrix_unit_by_label("a", "a").is_err());
    }

    #[test]
    fn basis_products() {
        let a = chain3("Z/5");
        let eab = a.matrix_unit_by_label("a", "b").unwrap();
        let ebc = a.matrix_unit_by_label("b", "c").unwrap();
        assert_eq!(eab.convolve(&ebc).unwrap(), a.matrix_unit_by_label("a", "c").unwrap());
        assert!(a.class_idempotent(0).convolve(&a.class_idempotent(1)).unwrap().is_zero());
        assert_eq!(a.delta().convolve(&a.zeta()).unwrap(), a.zeta());
    }

    #[test]
    fn zeta_squared_counts_chains() {
        let a = chain3("Z/5");
        let z2 = a.zeta().convolve(&a.zeta()).unwrap();
        assert_eq!(z2.get_by_label("a", "c").unwrap(), el(&a, "3"));
        assert_eq!(z2.get_by_label("a", "b").unwrap(), el(&a, "2"));
    }

    #[test]
    fn split_examples() {
        let a = chain3("Z/5");
        let f = a.delta().add(&a.matrix_unit_by_label("a", "b").unwrap()).unwrap();
        let (l, m) = f.split_lm();
        assert_eq!(l, a.delta());
        assert_eq!(m, a.matrix_unit_by_label("a", "b").unwrap());

        let pq = alg(&["p", "q"], &[("p", "q"), ("q", "p")], "Z/5");
        let g = pq.from_entries(&[("p", "q", el(&pq, "2"))]).unwrap();
        assert_eq!(g.split_lm().0, g);
        let b = g.block(0, 0);
        assert_eq!(b, RingMatrix::from_rows(vec![vec![el(&pq, "0"), el(&pq, "2")], vec![el(&pq, "0"), el(&pq, "0")]]));
    }

    #[test]
    fn blocks_of_delta_and_incomparable_classes() {
        let a = alg(&["a", "b"], &[], "Z/3");
        assert_eq!(a.delta().block(0, 0), RingMatrix::identity(a.ring(), 1));
        assert!(a.zeta().block(0, 1).is_zero(a.ring()));
    }

    #[test]
    fn invert_zeta_on_chain() {
        let a = chain3("Z/5");
        let mu = a.zeta().invert().unwrap();
        assert_eq!(mu.get_by_label("a", "b").unwrap(), el(&a, "4"));
        assert_eq!(mu.get_by_label("b", "c").unwrap(), el(&a, "4"));
        assert_eq!(mu.get_by_label("a", "c").unwrap(), el(&a, "0"));
        assert_eq!(mu.get_by_label("b", "b").unwrap(), el(&a, "1"));
        assert_eq!(a.zeta().convolve(&mu).unwrap(), a.delta());
        assert_eq!(a.delta().invert().unwrap(), a.delta());
    }

    #[test]
    fn invert_rejects_singular_diagonal() {
        let a = chain3("Z/5");
        let f = a.zeta().sub(&a.class_idempotent(0)).unwrap();
        let err = f.invert().unwrap_err();
        assert!(matches!(err, Error::NonUnit(ref m) if m.contains("[a]")), "{err}");
    }

    #[test]
    fn unit_decompose_examples() {
        let a = alg(&["a", "b"], &[("a", "b")], "Z/5");
        let u = a
            .from_entries(&[("a", "a", el(&a, "2")), ("b", "b", el(&a, "3")), ("a", "b", el(&a, "4"))])
            .unwrap();
        let (d, v) = u.unit_decompose().unwrap();
        assert_eq!(d, a.from_entries(&[("a", "b", el(&a, "3"))]).unwrap());
        assert_eq!(v, a.from_entries(&[("a", "a", el(&a, "2")), ("b", "b", el(&a, "3"))]).unwrap());
        assert_eq!(a.delta().add(&d).unwrap().convolve(&v).unwrap(), u);

        let one_plus = a.delta().add(&a.matrix_unit(0, 1).unwrap()).unwrap();
        let (d, v) = one_plus.unit_decompose().unwrap();
        assert_eq!(d, a.matrix_unit(0, 1).unwrap());
        assert_eq!(v, a.delta());
    }

    #[test]
    fn conjugation_examples() {
        let a = alg(&["a", "b"], &[("a", "b")], "Z/5");
        let eab = a.matrix_unit(0, 1).unwrap();
        let u = a.from_entries(&[("a", "a", el(&a, "1")), ("b", "b", el(&a, "2"))]).unwrap();
        assert_eq!(eab.conjugate(&u).unwrap(), eab.int_scale(2));
        assert_eq!(eab.conjugate(&a.delta()).unwrap(), eab);

        let u = a.delta().add(&eab).unwrap();
        let eb = a.class_idempotent(1);
        assert_eq!(eb.conjugate(&u).unwrap(), eb.add(&eab.int_scale(4)).unwrap());
    }

    #[test]
    fn hadamard_examples() {
        let a = chain3("Z/5");
        let m = a
            .from_entries(&[
                ("a", "a", el(&a, "1")),
                ("b", "b", el(&a, "1")),
                ("c", "c", el(&a, "1")),
                ("a", "b", el(&a, "2")),
                ("b", "c", el(&a, "3")),
                ("a", "c", el(&a, "1")),
            ])
            .unwrap();
        let h = IncidenceFunction::hadamard(&m, &a.zeta()).unwrap();
        assert_eq!(h.get_by_label("a", "b").unwrap(), el(&a, "2"));
        assert_eq!(IncidenceFunction::hadamard(&a.zeta(), &m).unwrap(), m);
        assert!(IncidenceFunction::hadamard(&m, &a.zero()).unwrap().is_zero());
    }

    #[test]
    fn preorder_class_inversion() {
        // class {p, q} of size two over Z/12, block [[3,4],[4,3]] has no unit entry
        let a = alg(&["p", "q", "r"], &[("p", "q"), ("q", "p"), ("q", "r")], "Z/12");
        let f = a
            .from_entries(&[
                ("p", "p", el(&a, "3")),
                ("p", "q", el(&a, "4")),
                ("q", "p", el(&a, "4")),
                ("q", "q", el(&a, "3")),
                ("r", "r", el(&a, "5")),
                ("p", "r", el(&a, "7")),
            ])
            .unwrap();
        let g = f.invert().unwrap();
        assert_eq!(f.convolve(&g).unwrap(), a.delta());
        assert_eq!(g.convolve(&f).unwrap(), a.delta());
    }

    #[test]
    fn mismatched_carriers() {
        let a = chain3("Z/5");
        let b = chain3("Z/3");
        assert!(a.zeta().convolve(&b.zeta()).is_err());
        assert!(IncidenceFunction::hadamard(&a.zeta(), &b.zeta()).is_err());
    }
}
