//! Multiplicative automorphisms as weight systems.
//!
//! A multiplicative automorphism fixes `L` and scales every block `M_xy`,
//! `[x] < [y]`, by an invertible central element `c_xy`. The family
//! `(c_xy)` is exactly a system of central units satisfying
//! `c_xy = c_xz * c_zy` whenever `x < z < y`; this module works with those
//! systems directly, on the quotient poset.
//!
//! Inner (fractional) automorphisms are the coboundaries
//! `c_xy = v_x^(-1) v_y` of a potential `v`. For a fixed spanning tree every
//! system splits uniquely as a product of one that is trivial on tree edges
//! and an inner one.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{IncidenceAlgebra, IncidenceFunction};
use crate::error::{Error, Result};
use crate::graph::{ComparabilityGraph, Edge, FundamentalCycle, SemiPath, SpanningTree};
use crate::preorder::QuotientPoset;
use crate::ring::{CentralUnitGroup, Ring, RingElement};

/// Everything a weight system is defined over: the quotient poset, the
/// ring, the group of central units and the comparability graph.
pub struct WeightSpace {
    poset: QuotientPoset,
    ring: Ring,
    group: CentralUnitGroup,
    graph: ComparabilityGraph,
    pairs: Vec<(usize, usize)>,
    pair_index: Vec<Option<usize>>,
    /// `(xz, zy, xy)` pair indices for every `x < z < y`.
    triples: Vec<(usize, usize, usize)>,
}

impl fmt::Debug for WeightSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSpace")
            .field("classes", &self.poset.len())
            .field("ring", &self.ring.spec().to_string())
            .finish()
    }
}

impl PartialEq for WeightSpace {
    fn eq(&self, other: &Self) -> bool {
        self.poset == other.poset && self.ring == other.ring
    }
}

impl Eq for WeightSpace {}

fn same_space(a: &Arc<WeightSpace>, b: &Arc<WeightSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl WeightSpace {
    pub fn new(poset: QuotientPoset, ring: Ring) -> Arc<Self> {
        let group = CentralUnitGroup::new(&ring);
        let graph = ComparabilityGraph::build(&poset);
        let pairs = poset.strict_pairs();
        let k = poset.len();
        let mut pair_index = vec![None; k * k];
        for (i, &(a, b)) in pairs.iter().enumerate() {
            pair_index[a * k + b] = Some(i);
        }
        let mut triples = Vec::new();
        for (xy, &(x, y)) in pairs.iter().enumerate() {
            for z in 0..k {
                if poset.lt(x, z) && poset.lt(z, y) {
                    let xz = pair_index[x * k + z].expect("comparable");
                    let zy = pair_index[z * k + y].expect("comparable");
                    triples.push((xz, zy, xy));
                }
            }
        }
        Arc::new(WeightSpace { poset, ring, group, graph, pairs, pair_index, triples })
    }

    /// The space of weight systems acting on `algebra`.
    pub fn for_algebra(algebra: &IncidenceAlgebra) -> Arc<Self> {
        Self::new(algebra.quotient().clone(), algebra.ring().clone())
    }

    pub fn poset(&self) -> &QuotientPoset {
        &self.poset
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn group(&self) -> &CentralUnitGroup {
        &self.group
    }

    pub fn graph(&self) -> &ComparabilityGraph {
        &self.graph
    }

    /// Strictly comparable class pairs in lexicographic order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair_index(&self, x: usize, y: usize) -> Option<usize> {
        self.pair_index[x * self.poset.len() + y]
    }

    /// Default root: the class with the lexicographically least representative.
    pub fn default_root(&self) -> usize {
        0
    }

    pub fn spanning_tree(&self, root: usize) -> Result<SpanningTree> {
        self.graph.spanning_tree(root)
    }

    fn label(&self, c: usize) -> &str {
        self.poset.representative(c)
    }
}

/// A violated instance of `c_xy = c_xz c_zy`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub x: usize,
    pub z: usize,
    pub y: usize,
}

/// A family `(c_xy)` of central units indexed by strictly comparable class pairs.
#[derive(Clone)]
pub struct WeightSystem {
    space: Arc<WeightSpace>,
    values: Vec<RingElement>,
}

impl PartialEq for WeightSystem {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.values == other.values
    }
}

impl Eq for WeightSystem {}

impl std::hash::Hash for WeightSystem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.values.hash(state);
    }
}

impl fmt::Debug for WeightSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (i, &(x, y)) in self.space.pairs.iter().enumerate() {
            m.entry(
                &format!("{}{}", self.space.label(x), self.space.label(y)),
                &self.space.ring.format(self.values[i]),
            );
        }
        m.finish()
    }
}

impl WeightSystem {
    /// Builds a system from values listed in [`WeightSpace::pairs`] order.
    pub fn from_values(space: &Arc<WeightSpace>, values: Vec<RingElement>) -> Result<Self> {
        if values.len() != space.pairs.len() {
            let missing = space.pairs[values.len().min(space.pairs.len().saturating_sub(1))];
            return Err(Error::Totality(
                space.label(missing.0).to_string(),
                space.label(missing.1).to_string(),
            ));
        }
        for (i, &v) in values.iter().enumerate() {
            if !space.group.contains(v) {
                let (x, y) = space.pairs[i];
                return Err(Error::InvalidWeights(format!(
                    "value {} at ({}, {}) is not an invertible central element",
                    space.ring.format(v),
                    space.label(x),
                    space.label(y)
                )));
            }
        }
        Ok(WeightSystem { space: Arc::clone(space), values })
    }

    /// Builds a system from `(x, y, c_xy)` records keyed by class labels.
    pub fn from_pairs<S: AsRef<str>>(space: &Arc<WeightSpace>, records: &[(S, S, RingElement)]) -> Result<Self> {
        let mut values: Vec<Option<RingElement>> = vec![None; space.pairs.len()];
        for (x, y, v) in records {
            let a = space.poset.class_by_label(x.as_ref())?;
            let b = space.poset.class_by_label(y.as_ref())?;
            let idx = space.pair_index(a, b).ok_or_else(|| {
                Error::InvalidWeights(format!("{} is not strictly below {}", x.as_ref(), y.as_ref()))
            })?;
            if values[idx].replace(*v).is_some() {
                return Err(Error::InvalidWeights(format!(
                    "duplicate value for ({}, {})",
                    x.as_ref(),
                    y.as_ref()
                )));
            }
        }
        let mut full = Vec::with_capacity(values.len());
        for (i, v) in values.into_iter().enumerate() {
            let (x, y) = space.pairs[i];
            full.push(v.ok_or_else(|| {
                Error::Totality(space.label(x).to_string(), space.label(y).to_string())
            })?);
        }
        Self::from_values(space, full)
    }

    /// Builds a system from group indices (see [`CentralUnitGroup`]).
    pub fn from_group_indices(space: &Arc<WeightSpace>, indices: &[usize]) -> Self {
        assert_eq!(indices.len(), space.pairs.len());
        let values = indices.iter().map(|&i| space.group.element(i)).collect();
        WeightSystem { space: Arc::clone(space), values }
    }

    pub fn identity(space: &Arc<WeightSpace>) -> Self {
        let one = space.ring.one();
        WeightSystem { space: Arc::clone(space), values: vec![one; space.pairs.len()] }
    }

    pub fn space(&self) -> &Arc<WeightSpace> {
        &self.space
    }

    pub fn values(&self) -> &[RingElement] {
        &self.values
    }

    /// `c_xy` for classes `x < y`.
    pub fn weight(&self, x: usize, y: usize) -> Option<RingElement> {
        self.space.pair_index(x, y).map(|i| self.values[i])
    }

    pub fn weight_of(&self, e: Edge) -> RingElement {
        self.weight(e.lower, e.upper).expect("edge of the comparability graph")
    }

    /// Group indices of the values, in pair order.
    pub fn group_indices(&self) -> Vec<usize> {
        self.values
            .iter()
            .map(|&v| self.space.group.index_of(v).expect("central unit"))
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        let one = self.space.ring.one();
        self.values.iter().all(|&v| v == one)
    }

    /// Every triple `x < z < y` with `c_xy != c_xz c_zy`.
    pub fn validate(&self) -> Vec<Violation> {
        let r = &self.space.ring;
        self.space
            .triples
            .iter()
            .filter(|&&(xz, zy, xy)| r.mul(self.values[xz], self.values[zy]) != self.values[xy])
            .map(|&(xz, zy, _)| {
                let (x, z) = self.space.pairs[xz];
                let (_, y) = self.space.pairs[zy];
                Violation { x, z, y }
            })
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn ensure_valid(&self) -> Result<()> {
        match self.validate().first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidWeights(format!(
                "c({x},{y}) != c({x},{z}) c({z},{y})",
                x = self.space.label(v.x),
                z = self.space.label(v.z),
                y = self.space.label(v.y)
            ))),
        }
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::Incompatible("weight systems over different posets or rings".into()))
        }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let r = &self.space.ring;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| r.mul(a, b)).collect();
        Ok(WeightSystem { space: Arc::clone(&self.space), values })
    }

    pub fn inverse(&self) -> Self {
        let r = &self.space.ring;
        let values = self.values.iter().map(|&a| r.inverse(a).expect("central unit")).collect();
        WeightSystem { space: Arc::clone(&self.space), values }
    }

    /// `w(x, y)` for adjacent classes: `c_xy` along the order, `c_yx^(-1)` against it.
    pub fn edge_weight(&self, x: usize, y: usize) -> Result<RingElement> {
        if let Some(c) = self.weight(x, y) {
            return Ok(c);
        }
        if let Some(c) = self.weight(y, x) {
            return Ok(self.space.ring.inverse(c).expect("central unit"));
        }
        Err(Error::Domain(format!(
            "invalid semi-path: {} and {} are not comparable",
            self.space.label(x),
            self.space.label(y)
        )))
    }

    /// Product of edge weights along a semi-path; `1` for a single vertex.
    pub fn path_weight(&self, path: &SemiPath) -> Result<RingElement> {
        let r = &self.space.ring;
        let mut acc = r.one();
        for w in path.vertices.windows(2) {
            acc = r.mul(acc, self.edge_weight(w[0], w[1])?);
        }
        Ok(acc)
    }

    /// Extends values on tree edges to all pairs via tree semi-paths.
    ///
    /// `tree_values` maps each tree edge to its weight, in any order.
    pub fn from_tree(space: &Arc<WeightSpace>, tree: &SpanningTree, tree_values: &[(Edge, RingElement)]) -> Result<Self> {
        let r = &space.ring;
        let mut seed = Self::identity(space);
        for e in tree.tree_edges() {
            let v = tree_values
                .iter()
                .find(|(t, _)| t.key() == e.key())
                .map(|&(_, v)| v)
                .ok_or_else(|| {
                    Error::InvalidWeights(format!("missing value for tree edge {}", space.graph.format_edge(*e)))
                })?;
            if !space.group.contains(v) {
                return Err(Error::InvalidWeights(format!(
                    "tree value {} is not an invertible central element",
                    r.format(v)
                )));
            }
            let idx = space.pair_index(e.lower, e.upper).expect("edge");
            seed.values[idx] = v;
        }
        let mut out = seed.clone();
        for e in tree.non_tree_edges() {
            let w = seed.path_weight(&tree.path(e.lower, e.upper))?;
            out.values[space.pair_index(e.lower, e.upper).expect("edge")] = w;
        }
        Ok(out)
    }

    /// The coboundary `c_xy = v_x^(-1) v_y`.
    pub fn from_potential(v: &Potential) -> Self {
        let space = &v.space;
        let r = &space.ring;
        let values = space
            .pairs
            .iter()
            .map(|&(x, y)| r.mul(r.inverse(v.values[x]).expect("central unit"), v.values[y]))
            .collect();
        WeightSystem { space: Arc::clone(space), values }
    }

    /// Propagates `v_root = 1` along the tree: `v_child = v_parent w(parent, child)`.
    pub fn tree_potential(&self, tree: &SpanningTree) -> Potential {
        let r = &self.space.ring;
        let mut values = vec![r.one(); self.space.poset.len()];
        for v in tree.bfs_order().into_iter().skip(1) {
            let p = tree.parent(v).expect("non-root");
            values[v] = r.mul(values[p], self.edge_weight(p, v).expect("tree edge"));
        }
        Potential { space: Arc::clone(&self.space), values }
    }

    /// Weight of every fundamental cycle of `tree`.
    pub fn cycle_report(&self, tree: &SpanningTree) -> Result<CycleReport> {
        self.ensure_valid()?;
        let cycles = self
            .space
            .graph
            .fundamental_cycles(tree)
            .into_iter()
            .map(|c| {
                let w = self.path_weight(&c.path).expect("cycle of the graph");
                (c, w)
            })
            .collect::<Vec<_>>();
        let one = self.space.ring.one();
        Ok(CycleReport { inner: cycles.iter().all(|(_, w)| *w == one), cycles })
    }

    /// Innerness test through fundamental cycle weights.
    pub fn is_inner_cycles(&self, tree: &SpanningTree) -> Result<bool> {
        Ok(self.cycle_report(tree)?.inner)
    }

    /// A potential certifying innerness, or a fundamental cycle of non-unit weight.
    pub fn find_potential(&self, root: usize) -> Result<Innerness> {
        self.ensure_valid()?;
        let tree = self.space.spanning_tree(root)?;
        let v = self.tree_potential(&tree);
        let r = &self.space.ring;
        for cycle in self.space.graph.fundamental_cycles(&tree) {
            let e = cycle.edge;
            let expected = r.mul(r.inverse(v.values[e.lower]).expect("unit"), v.values[e.upper]);
            if self.weight_of(e) != expected {
                let weight = self.path_weight(&cycle.path)?;
                return Ok(Innerness::NotInner(CycleWitness { cycle, weight }));
            }
        }
        Ok(Innerness::Inner(v))
    }

    /// `self = tree_trivial * inner` with `inner` the coboundary of the tree potential.
    pub fn decompose(&self, tree: &SpanningTree) -> Result<Decomposition> {
        self.ensure_valid()?;
        let potential = self.tree_potential(tree);
        let inner = Self::from_potential(&potential);
        let tree_trivial = self.compose(&inner.inverse())?;
        Ok(Decomposition { tree_trivial, inner, potential })
    }

    /// Weight `1` on every edge of `tree`.
    pub fn is_tree_trivial(&self, tree: &SpanningTree) -> bool {
        let one = self.space.ring.one();
        tree.tree_edges().iter().all(|&e| self.weight_of(e) == one)
    }

    fn check_algebra(&self, algebra: &IncidenceAlgebra) -> Result<()> {
        if *algebra.quotient() == self.space.poset && *algebra.ring() == self.space.ring {
            Ok(())
        } else {
            Err(Error::Incompatible("weight system does not match the algebra".into()))
        }
    }

    /// The automorphism on `f`: fixes the `L`-part and multiplies each entry
    /// `f(s, t)`, `[s] < [t]`, on the left by `c_[s][t]`.
    pub fn apply(&self, f: &IncidenceFunction) -> Result<IncidenceFunction> {
        let alg = f.algebra();
        self.check_algebra(alg)?;
        let q = alg.quotient();
        let r = alg.ring();
        let mut out = f.clone();
        for (s, t, v) in f.entries() {
            let (a, b) = (q.class_of(s), q.class_of(t));
            if a != b {
                let c = self.weight(a, b).expect("support lies over comparable classes");
                out.set(s, t, r.mul(c, v))?;
            }
        }
        Ok(out)
    }

    /// The multiplicative function `m` with `m = 1` on `L` and `m(s, t) = c_[s][t]`.
    pub fn to_mult_function(&self, algebra: &Arc<IncidenceAlgebra>) -> Result<IncidenceFunction> {
        self.check_algebra(algebra)?;
        let q = algebra.quotient();
        let mut m = algebra.zero();
        for (s, t) in algebra.support() {
            let (a, b) = (q.class_of(s), q.class_of(t));
            let v = if a == b { algebra.ring().one() } else { self.weight(a, b).expect("comparable") };
            m.set(s, t, v)?;
        }
        Ok(m)
    }

    /// Reads a weight system back from a multiplicative function.
    ///
    /// Requires every value on a comparable pair to be a central unit, the
    /// identity `m(x, y) = m(x, z) m(z, y)` for all `x <= z <= y`, and
    /// `m = 1` on the `L`-part.
    pub fn from_mult_function(m: &IncidenceFunction) -> Result<Self> {
        let alg = m.algebra();
        let p = alg.preorder();
        let r = alg.ring();
        let space = WeightSpace::for_algebra(alg);
        for (s, t) in alg.support() {
            let v = m.get(s, t);
            if !space.group.contains(v) {
                return Err(Error::InvalidWeights(format!(
                    "m({}, {}) = {} is not an invertible central element",
                    p.label(s),
                    p.label(t),
                    r.format(v)
                )));
            }
            if p.equiv(s, t) && v != r.one() {
                return Err(Error::InvalidWeights(format!(
                    "m({}, {}) must be 1 on equivalent elements",
                    p.label(s),
                    p.label(t)
                )));
            }
        }
        for (s, t) in alg.support() {
            for z in p.interval_indices(s, t) {
                if r.mul(m.get(s, z), m.get(z, t)) != m.get(s, t) {
                    return Err(Error::InvalidWeights(format!(
                        "multiplicativity fails at ({}, {}, {})",
                        p.label(s),
                        p.label(z),
                        p.label(t)
                    )));
                }
            }
        }
        let q = alg.quotient();
        let values = space
            .pairs
            .iter()
            .map(|&(a, b)| m.get(q.members(a)[0], q.members(b)[0]))
            .collect();
        Ok(WeightSystem { space, values })
    }
}

/// `m_q(x, y) = q(x)^(-1) q(y)` as an incidence function.
pub fn from_point_map(q: &Potential, algebra: &Arc<IncidenceAlgebra>) -> Result<IncidenceFunction> {
    WeightSystem::from_potential(q).to_mult_function(algebra)
}

/// A central unit per class.
#[derive(Clone)]
pub struct Potential {
    space: Arc<WeightSpace>,
    values: Vec<RingElement>,
}

impl PartialEq for Potential {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.values == other.values
    }
}

impl Eq for Potential {}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (c, &v) in self.values.iter().enumerate() {
            m.entry(&self.space.label(c), &self.space.ring.format(v));
        }
        m.finish()
    }
}

impl Potential {
    pub fn new(space: &Arc<WeightSpace>, values: Vec<RingElement>) -> Result<Self> {
        if values.len() != space.poset.len() {
            return Err(Error::Domain(format!(
                "potential needs {} values, got {}",
                space.poset.len(),
                values.len()
            )));
        }
        if let Some((c, &v)) = values.iter().enumerate().find(|(_, v)| !space.group.contains(**v)) {
            return Err(Error::InvalidWeights(format!(
                "potential value {} at {} is not an invertible central element",
                space.ring.format(v),
                space.label(c)
            )));
        }
        Ok(Potential { space: Arc::clone(space), values })
    }

    pub fn from_labels<S: AsRef<str>>(space: &Arc<WeightSpace>, records: &[(S, RingElement)]) -> Result<Self> {
        let mut values = vec![None; space.poset.len()];
        for (label, v) in records {
            values[space.poset.class_by_label(label.as_ref())?] = Some(*v);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(c, v)| {
                v.ok_or_else(|| Error::Domain(format!("potential has no value for {}", space.label(c))))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, values)
    }

    pub fn space(&self) -> &Arc<WeightSpace> {
        &self.space
    }

    pub fn values(&self) -> &[RingElement] {
        &self.values
    }

    pub fn value(&self, class: usize) -> RingElement {
        self.values[class]
    }

    /// The invertible central element `sum v_x e_[x]` of `L` inducing the
    /// coboundary by conjugation.
    pub fn to_central_element(&self, algebra: &Arc<IncidenceAlgebra>) -> IncidenceFunction {
        let mut u = algebra.zero();
        let q = algebra.quotient();
        for s in 0..algebra.size() {
            u.set(s, s, self.values[q.class_of(s)]).expect("diagonal");
        }
        u
    }
}

#[derive(Clone, Debug)]
pub struct CycleWitness {
    pub cycle: FundamentalCycle,
    /// Weight of `cycle.path` as traversed.
    pub weight: RingElement,
}

#[derive(Clone, Debug)]
pub enum Innerness {
    Inner(Potential),
    NotInner(CycleWitness),
}

impl Innerness {
    pub fn is_inner(&self) -> bool {
        matches!(self, Innerness::Inner(_))
    }
}

#[derive(Clone, Debug)]
pub struct CycleReport {
    pub inner: bool,
    pub cycles: Vec<(FundamentalCycle, RingElement)>,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Trivial on every tree edge.
    pub tree_trivial: WeightSystem,
    /// Coboundary of `potential`.
    pub inner: WeightSystem,
    pub potential: Potential,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preorder::Preorder;

    fn space(elements: &[&str], rel: &[(&str, &str)], ring: &str) -> Arc<WeightSpace> {
        let p = Preorder::close_relations(elements, rel).unwrap();
        WeightSpace::new(p.quotient(), Ring::parse(ring).unwrap())
    }

    fn crown() -> Arc<WeightSpace> {
        space(&["a", "b", "c", "d"], &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")], "Z/5")
    }

    fn chain3(ring: &str) -> Arc<WeightSpace> {
        space(&["a", "b", "c"], &[("a", "b"), ("b", "c")], ring)
    }

    fn ws(s: &Arc<WeightSpace>, recs: &[(&str, &str, u64)]) -> WeightSystem {
        let recs: Vec<_> = recs.iter().map(|&(x, y, v)| (x, y, s.ring().element(v).unwrap())).collect();
        WeightSystem::from_pairs(s, &recs).unwrap()
    }

    fn pot(s: &Arc<WeightSpace>, recs: &[(&str, u64)]) -> Potential {
        let recs: Vec<_> = recs.iter().map(|&(x, v)| (x, s.ring().element(v).unwrap())).collect();
        Potential::from_labels(s, &recs).unwrap()
    }

    fn e(s: &Arc<WeightSpace>, v: u64) -> RingElement {
        s.ring().element(v).unwrap()
    }

    #[test]
    fn validate_examples() {
        let s = chain3("Z/5");
        assert!(ws(&s, &[("a", "b", 2), ("b", "c", 3), ("a", "c", 1)]).is_valid());
        let bad = ws(&s, &[("a", "b", 2), ("b", "c", 3), ("a", "c", 2)]);
        assert_eq!(bad.validate(), [Violation { x: 0, z: 1, y: 2 }]);
        let c = crown();
        assert!(ws(&c, &[("a", "c", 2), ("a", "d", 4), ("b", "c", 3), ("b", "d", 1)]).is_valid());
    }

    #[test]
    fn totality_and_membership_errors() {
        let s = chain3("Z/5");
        let err = WeightSystem::from_pairs(&s, &[("a", "b", e(&s, 1)), ("b", "c", e(&s, 1))]).unwrap_err();
        assert_eq!(err, Error::Totality("a".into(), "c".into()));
        let err = WeightSystem::from_pairs(
            &s,
            &[("a", "b", e(&s, 0)), ("b", "c", e(&s, 1)), ("a", "c", e(&s, 1))],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidWeights(_)));
        assert!(WeightSystem::from_pairs(&s, &[("b", "a", e(&s, 1))]).is_err());
    }

    #[test]
    fn group_operations() {
        let s = space(&["a", "b"], &[("a", "b")], "Z/5");
        let two = ws(&s, &[("a", "b", 2)]);
        let three = ws(&s, &[("a", "b", 3)]);
        assert_eq!(two.compose(&three).unwrap(), WeightSystem::identity(&s));
        assert_eq!(two.inverse(), three);
        assert_eq!(two.compose(&WeightSystem::identity(&s)).unwrap(), two);
    }

    #[test]
    fn path_weights() {
        let c = crown();
        let w = ws(&c, &[("a", "c", 2), ("a", "d", 1), ("b", "c", 1), ("b", "d", 1)]);
        let g = c.graph();
        let path = SemiPath::new(["b", "c", "a", "d"].iter().map(|l| g.vertex_by_label(l).unwrap()).collect());
        assert_eq!(w.path_weight(&path).unwrap(), e(&c, 3));
        assert_eq!(w.path_weight(&SemiPath::new(vec![0, 2])).unwrap(), e(&c, 2));
        assert_eq!(w.path_weight(&SemiPath::new(vec![2, 0])).unwrap(), e(&c, 3));
        assert_eq!(w.path_weight(&SemiPath::new(vec![1])).unwrap(), e(&c, 1));
        assert!(w.path_weight(&SemiPath::new(vec![0, 1])).is_err());
    }

    #[test]
    fn from_tree_examples() {
        let c = crown();
        let tree = c.spanning_tree(0).unwrap();
        let vals: Vec<(Edge, RingElement)> = tree
            .tree_edges()
            .iter()
            .map(|&ed| (ed, if ed.key() == (0, 2) { e(&c, 2) } else { e(&c, 1) }))
            .collect();
        let w = WeightSystem::from_tree(&c, &tree, &vals).unwrap();
        assert_eq!(w, ws(&c, &[("a", "c", 2), ("a", "d", 1), ("b", "c", 1), ("b", "d", 3)]));
        assert!(w.is_valid());

        let ones: Vec<_> = tree.tree_edges().iter().map(|&ed| (ed, e(&c, 1))).collect();
        assert!(WeightSystem::from_tree(&c, &tree, &ones).unwrap().is_identity());
        assert!(WeightSystem::from_tree(&c, &tree, &ones[..2]).is_err());

        let s = chain3("Z/5");
        let t = s.spanning_tree(0).unwrap();
        let vals: Vec<_> = t
            .tree_edges()
            .iter()
            .map(|&ed| (ed, if ed.key() == (0, 1) { e(&s, 2) } else { e(&s, 1) }))
            .collect();
        let w = WeightSystem::from_tree(&s, &t, &vals).unwrap();
        assert_eq!(w.weight(1, 2), Some(e(&s, 3)));
    }

    #[test]
    fn from_potential_examples() {
        let c = crown();
        let v = pot(&c, &[("a", 1), ("b", 2), ("c", 2), ("d", 1)]);
        assert_eq!(
            WeightSystem::from_potential(&v),
            ws(&c, &[("a", "c", 2), ("a", "d", 1), ("b", "c", 1), ("b", "d", 3)])
        );
        let constant = pot(&c, &[("a", 3), ("b", 3), ("c", 3), ("d", 3)]);
        assert!(WeightSystem::from_potential(&constant).is_identity());
        let s = space(&["a", "b"], &[("a", "b")], "Z/12");
        let v = pot(&s, &[("a", 1), ("b", 5)]);
        assert_eq!(WeightSystem::from_potential(&v), ws(&s, &[("a", "b", 5)]));
    }

    #[test]
    fn find_potential_examples() {
        let c = crown();
        let inner = ws(&c, &[("a", "c", 2), ("a", "d", 1), ("b", "c", 1), ("b", "d", 3)]);
        match inner.find_potential(0).unwrap() {
            Innerness::Inner(v) => assert_eq!(v, pot(&c, &[("a", 1), ("b", 2), ("c", 2), ("d", 1)])),
            other => panic!("expected inner, got {other:?}"),
        }
        let outer = ws(&c, &[("a", "c", 2), ("a", "d", 1), ("b", "c", 1), ("b", "d", 1)]);
        match outer.find_potential(0).unwrap() {
            Innerness::NotInner(w) => {
                assert_eq!(c.graph().format_path(&w.cycle.path), "b-d-a-c-b");
                // the opposite traversal b-c-a-d-b has weight 3
                assert_eq!(w.weight, e(&c, 2));
                assert_eq!(w.weight, c.ring().inverse(e(&c, 3)).unwrap());
            }
            other => panic!("expected a witness, got {other:?}"),
        }
        match WeightSystem::identity(&c).find_potential(0).unwrap() {
            Innerness::Inner(v) => assert!(v.values().iter().all(|&x| x == e(&c, 1))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decompose_examples() {
        let c = crown();
        let tree = c.spanning_tree(0).unwrap();
        let id = WeightSystem::identity(&c).decompose(&tree).unwrap();
        assert!(id.tree_trivial.is_identity() && id.inner.is_identity());

        let inner = ws(&c, &[("a", "c", 2), ("a", "d", 1), ("b", "c", 1), ("b", "d", 3)]);
        let d = inner.decompose(&tree).unwrap();
        assert!(d.tree_trivial.is_identity());
        assert_eq!(d.inner, inner);

        let outer = ws(&c, &[("a", "c", 2), ("a", "d", 1), ("b", "c", 1), ("b", "d", 1)]);
        let d = outer.decompose(&tree).unwrap();
        assert_eq!(d.potential, pot(&c, &[("a", 1), ("b", 2), ("c", 2), ("d", 1)]));
        assert_eq!(d.inner, inner);
        assert_eq!(d.tree_trivial, ws(&c, &[("a", "c", 1), ("a", "d", 1), ("b", "c", 1), ("b", "d", 2)]));
        assert_eq!(d.tree_trivial.compose(&d.inner).unwrap(), outer);
        assert!(d.tree_trivial.is_tree_trivial(&tree));

        let s = chain3("Z/5");
        let bad = ws(&s, &[("a", "b", 2), ("b", "c", 3), ("a", "c", 2)]);
        assert!(bad.decompose(&s.spanning_tree(0).unwrap()).is_err());
    }

    #[test]
    fn cycle_reports() {
        let c = crown();
        let tree = c.spanning_tree(0).unwrap();
        assert!(WeightSystem::identity(&c).is_inner_cycles(&tree).unwrap());
        let outer = ws(&c, &[("a", "c", 2), ("a", "d", 1), ("b", "c", 1), ("b", "d", 1)]);
        let rep = outer.cycle_report(&tree).unwrap();
        assert!(!rep.inner);
        assert_eq!(rep.cycles.len(), 1);
        assert_eq!(rep.cycles[0].1, e(&c, 2));
    }

    #[test]
    fn apply_scales_strict_blocks() {
        let p = Preorder::close_relations(&["a", "b", "c", "d"], &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")]).unwrap();
        let alg = IncidenceAlgebra::new(p, Ring::parse("Z/5").unwrap());
        let c = WeightSpace::for_algebra(&alg);
        let w = ws(&c, &[("a", "c", 2), ("a", "d", 1), ("b", "c", 1), ("b", "d", 1)]);
        let image = w.apply(&alg.zeta()).unwrap();
        assert_eq!(image.get_by_label("a", "c").unwrap(), e(&c, 2));
        assert_eq!(image.get_by_label("a", "a").unwrap(), e(&c, 1));
        assert_eq!(WeightSystem::identity(&c).apply(&alg.zeta()).unwrap(), alg.zeta());
        assert_eq!(w.to_mult_function(&alg).unwrap(), image);
    }

    #[test]
    fn apply_on_chain_is_multiplicative() {
        let p = Preorder::close_relations(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let alg = IncidenceAlgebra::new(p, Ring::parse("Z/5").unwrap());
        let s = WeightSpace::for_algebra(&alg);
        let w = ws(&s, &[("a", "b", 2), ("b", "c", 3), ("a", "c", 1)]);
        let eab = alg.matrix_unit(0, 1).unwrap();
        let ebc = alg.matrix_unit(1, 2).unwrap();
        let lhs = w.apply(&eab.convolve(&ebc).unwrap()).unwrap();
        let rhs = w.apply(&eab).unwrap().convolve(&w.apply(&ebc).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, alg.matrix_unit(0, 2).unwrap());
    }

    #[test]
    fn apply_lifts_through_classes() {
        let p = Preorder::close_relations(&["p", "q", "r"], &[("p", "q"), ("q", "p"), ("p", "r")]).unwrap();
        let alg = IncidenceAlgebra::new(p, Ring::parse("Z/5").unwrap());
        let s = WeightSpace::for_algebra(&alg);
        let w = ws(&s, &[("p", "r", 4)]);
        let image = w.apply(&alg.zeta()).unwrap();
        assert_eq!(image.get_by_label("q", "r").unwrap(), e(&s, 4));
        assert_eq!(image.get_by_label("p", "q").unwrap(), e(&s, 1));
        assert_eq!(WeightSystem::from_mult_function(&w.to_mult_function(&alg).unwrap()).unwrap(), w);
    }

    #[test]
    fn mult_function_conversions() {
        let p = Preorder::close_relations(&["a", "b", "c", "d"], &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")]).unwrap();
        let alg = IncidenceAlgebra::new(p, Ring::parse("Z/5").unwrap());
        let c = WeightSpace::for_algebra(&alg);
        assert_eq!(WeightSystem::identity(&c).to_mult_function(&alg).unwrap(), alg.zeta());
        let m = from_point_map(&pot(&c, &[("a", 1), ("b", 2), ("c", 2), ("d", 1)]), &alg).unwrap();
        assert_eq!(m.get_by_label("a", "c").unwrap(), e(&c, 2));
        assert_eq!(m.get_by_label("b", "d").unwrap(), e(&c, 3));
        assert_eq!(m.get_by_label("b", "b").unwrap(), e(&c, 1));
        let w = ws(&c, &[("a", "c", 2), ("a", "d", 4), ("b", "c", 3), ("b", "d", 1)]);
        assert_eq!(WeightSystem::from_mult_function(&w.to_mult_function(&alg).unwrap()).unwrap(), w);

        let bad = alg.zeta().int_scale(2);
        assert!(WeightSystem::from_mult_function(&bad).is_err());
        let not_unit = alg.delta();
        assert!(WeightSystem::from_mult_function(&not_unit).is_err());
    }

    #[test]
    fn from_mult_function_rejects_non_multiplicative() {
        let p = Preorder::close_relations(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let alg = IncidenceAlgebra::new(p, Ring::parse("Z/5").unwrap());
        let mut m = alg.zeta();
        m.set(0, 1, alg.ring().element(2).unwrap()).unwrap();
        let err = WeightSystem::from_mult_function(&m).unwrap_err();
        assert!(err.to_string().contains("multiplicativity"), "{err}");
    }
}
