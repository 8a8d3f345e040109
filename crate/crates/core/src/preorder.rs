//! Finite preorders, the equivalence `x ~ y` (`x <= y` and `y <= x`) and the
//! partially ordered quotient.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

/// A reflexive, transitive relation on a finite list of labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preorder {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    leq: Vec<bool>,
}

fn check_label(label: &str) -> Result<()> {
    if label.is_empty() || label.chars().any(char::is_whitespace) {
        return Err(Error::input(
            format!("label `{label}`"),
            "labels must be non-empty and contain no whitespace",
        ));
    }
    Ok(())
}

impl Preorder {
    /// Reflexive-transitive closure of `generators` on `elements`.
    pub fn close_relations<S: AsRef<str>>(elements: &[S], generators: &[(S, S)]) -> Result<Self> {
        let mut labels = Vec::with_capacity(elements.len());
        let mut index = HashMap::new();
        for e in elements {
            let e = e.as_ref();
            check_label(e)?;
            if index.insert(e.to_string(), labels.len()).is_some() {
                return Err(Error::input(format!("label `{e}`"), "declared twice"));
            }
            labels.push(e.to_string());
        }
        let n = labels.len();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (x, y) in generators {
            let lookup = |s: &S| {
                index
                    .get(s.as_ref())
                    .copied()
                    .ok_or_else(|| Error::UnknownLabel(s.as_ref().to_string()))
            };
            let (i, j) = (lookup(x)?, lookup(y)?);
            leq[i * n + j] = true;
        }
        close(n, &mut leq);
        Ok(Preorder { labels, index, leq })
    }

    /// Builds a preorder from a relation matrix that must already be a preorder.
    pub fn from_relation(labels: Vec<String>, leq: Vec<bool>) -> Result<Self> {
        let n = labels.len();
        if leq.len() != n * n {
            return Err(Error::Domain("relation matrix has the wrong size".into()));
        }
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            check_label(l)?;
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::input(format!("label `{l}`"), "declared twice"));
            }
        }
        let p = Preorder { labels, index, leq };
        if !p.is_reflexive() || !p.is_transitive() {
            return Err(Error::Domain("relation is not a preorder".into()));
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.len() + j]
    }

    pub fn equiv(&self, i: usize, j: usize) -> bool {
        self.leq(i, j) && self.leq(j, i)
    }

    /// `i <= j` but not `j <= i`.
    pub fn strictly_below(&self, i: usize, j: usize) -> bool {
        self.leq(i, j) && !self.leq(j, i)
    }

    pub fn relation(&self) -> &[bool] {
        &self.leq
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.len()).all(|i| self.leq(i, i))
    }

    pub fn is_transitive(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            (0..n).all(|j| !self.leq(i, j) || (0..n).all(|k| !self.leq(j, k) || self.leq(i, k)))
        })
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| i == j || !self.equiv(i, j)))
    }

    /// Generating pairs `(x, y)` with `x <= y`, `x != y`, in index order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && self.leq(i, j))
            .collect()
    }

    /// `{z | x <= z <= y}` as element indices; empty when `x` is not below `y`.
    pub fn interval_indices(&self, x: usize, y: usize) -> Vec<usize> {
        if !self.leq(x, y) {
            return Vec::new();
        }
        (0..self.len()).filter(|&z| self.leq(x, z) && self.leq(z, y)).collect()
    }

    /// The interval `[x, y]` as a set of labels.
    pub fn interval(&self, x: &str, y: &str) -> Result<BTreeSet<String>> {
        let (i, j) = (self.index_of(x)?, self.index_of(y)?);
        Ok(self
            .interval_indices(i, j)
            .into_iter()
            .map(|z| self.labels[z].clone())
            .collect())
    }

    pub fn quotient(&self) -> QuotientPoset {
        QuotientPoset::of(self)
    }

    pub fn is_poset(&self) -> bool {
        self.is_antisymmetric()
    }
}

fn close(n: usize, leq: &mut [bool]) {
    for k in 0..n {
        for i in 0..n {
            if !leq[i * n + k] {
                continue;
            }
            for j in 0..n {
                if leq[k * n + j] {
                    leq[i * n + j] = true;
                }
            }
        }
    }
}

/// The partial order on the `~`-classes of a preorder.
///
/// Classes are sorted by representative, and the representative of a class
/// is its lexicographically least label. Members of a class are listed in
/// lexicographic order too; that numbering is the one used for blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientPoset {
    classes: Vec<Vec<usize>>,
    member_labels: Vec<Vec<String>>,
    class_of: Vec<usize>,
    leq: Vec<bool>,
}

impl QuotientPoset {
    fn of(p: &Preorder) -> Self {
        let n = p.len();
        let mut seen = vec![false; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let mut members: Vec<usize> = (0..n).filter(|&j| p.equiv(i, j)).collect();
            for &j in &members {
                seen[j] = true;
            }
            members.sort_by(|&a, &b| p.label(a).cmp(p.label(b)));
            classes.push(members);
        }
        classes.sort_by(|a, b| p.label(a[0]).cmp(p.label(b[0])));
        let mut class_of = vec![0; n];
        for (c, members) in classes.iter().enumerate() {
            for &m in members {
                class_of[m] = c;
            }
        }
        let k = classes.len();
        let mut leq = vec![false; k * k];
        for a in 0..k {
            for b in 0..k {
                leq[a * k + b] = p.leq(classes[a][0], classes[b][0]);
            }
        }
        let member_labels = classes
            .iter()
            .map(|c| c.iter().map(|&m| p.label(m).to_string()).collect())
            .collect();
        QuotientPoset { classes, member_labels, class_of, leq }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn members(&self, class: usize) -> &[usize] {
        &self.classes[class]
    }

    pub fn member_labels(&self, class: usize) -> &[String] {
        &self.member_labels[class]
    }

    pub fn representative(&self, class: usize) -> &str {
        &self.member_labels[class][0]
    }

    pub fn class_of(&self, element: usize) -> usize {
        self.class_of[element]
    }

    /// Class whose representative (or any member) carries `label`.
    pub fn class_by_label(&self, label: &str) -> Result<usize> {
        self.member_labels
            .iter()
            .position(|m| m.iter().any(|l| l == label))
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.len() + b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    /// All strictly comparable pairs `(a, b)`, `a < b`, in lexicographic order.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let k = self.len();
        (0..k)
            .flat_map(|a| (0..k).map(move |b| (a, b)))
            .filter(|&(a, b)| self.lt(a, b))
            .collect()
    }

    pub fn is_partial_order(&self) -> bool {
        let k = self.len();
        let refl = (0..k).all(|a| self.leq(a, a));
        let anti = (0..k).all(|a| (0..k).all(|b| a == b || !(self.leq(a, b) && self.leq(b, a))));
        let trans = (0..k).all(|a| {
            (0..k).all(|b| !self.leq(a, b) || (0..k).all(|c| !self.leq(b, c) || self.leq(a, c)))
        });
        refl && anti && trans
    }

    /// Classes in an order compatible with `<=` (ties broken by index).
    pub fn linear_extension(&self) -> Vec<usize> {
        let k = self.len();
        let mut placed = vec![false; k];
        let mut out = Vec::with_capacity(k);
        while out.len() < k {
            let next = (0..k)
                .find(|&c| !placed[c] && (0..k).all(|d| placed[d] || d == c || !self.lt(d, c)))
                .expect("a partial order has a minimal element");
            placed[next] = true;
            out.push(next);
        }
        out
    }

    /// Longest chain `x = z0 < z1 < ... < zk = y`, returned as `k`.
    pub fn interval_length(&self, x: usize, y: usize) -> Result<usize> {
        if !self.leq(x, y) {
            return Err(Error::Domain(format!(
                "{} is not below {}",
                self.representative(x),
                self.representative(y)
            )));
        }
        let order = self.linear_extension();
        let mut best: Vec<Option<usize>> = vec![None; self.len()];
        best[x] = Some(0);
        for &c in &order {
            let Some(len) = best[c] else { continue };
            for &d in &order {
                if self.lt(c, d) && self.leq(d, y) {
                    best[d] = Some(best[d].map_or(len + 1, |b| b.max(len + 1)));
                }
            }
        }
        Ok(best[y].unwrap_or(0))
    }

    /// Length of the longest strict chain.
    pub fn height(&self) -> usize {
        let order = self.linear_extension();
        let mut best = vec![0usize; self.len()];
        for (pos, &c) in order.iter().enumerate() {
            for &d in &order[pos + 1..] {
                if self.lt(c, d) {
                    best[d] = best[d].max(best[c] + 1);
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    /// Connected components of the comparability graph, each sorted.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let k = self.len();
        let mut comp = vec![usize::MAX; k];
        let mut out = Vec::new();
        for start in 0..k {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![start];
            let mut members = Vec::new();
            comp[start] = id;
            while let Some(c) = stack.pop() {
                members.push(c);
                for d in 0..k {
                    if comp[d] == usize::MAX && (self.lt(c, d) || self.lt(d, c)) {
                        comp[d] = id;
                        stack.push(d);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    /// The quotient viewed as a poset on its representatives.
    pub fn as_preorder(&self) -> Preorder {
        let labels = (0..self.len()).map(|c| self.representative(c).to_string()).collect();
        Preorder::from_relation(labels, self.leq.clone()).expect("quotient is a partial order")
    }
}
