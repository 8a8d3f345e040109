//! Brute-force cross-checks on small instances.
//!
//! Everything here works from first principles (exhaustive enumeration,
//! explicit matrices, explicit conjugation) so it can be used to check the
//! structural code in [`crate::mult`] and [`crate::algebra`].

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{IncidenceAlgebra, IncidenceFunction};
use crate::error::{Error, Result};
use crate::formats::{function_file, weight_file, FunctionFile, WeightFile};
use crate::mult::{Innerness, WeightSpace, WeightSystem};
use crate::preorder::{Preorder, QuotientPoset};
use crate::ring::{Ring, RingElement, RingSpec};
use crate::sample;

/// Candidate limit for [`enumerate_mult`] and [`enumerate_inner`].
pub const ENUMERATION_GUARD: u128 = 10_000_000;
/// Limit on `|R|^(comparable pairs)` for [`verify_inner_conjugations`].
pub const UNIT_GUARD: u128 = 1_000_000;
/// Limit on the number of additive maps searched by [`verify_bimodule_maps`].
pub const ADDITIVE_MAP_GUARD: u128 = 1_000_000;

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Copy, Clone, Debug, Default)]
pub struct Options {
    /// Ignore the enumeration guards.
    pub force: bool,
}

fn guard(needed: u128, limit: u128, opts: Options) -> Result<()> {
    if needed > limit && !opts.force {
        return Err(Error::Guard { needed, limit });
    }
    Ok(())
}

fn power(base: usize, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

// ---- reports -------------------------------------------------------------

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct InstanceDescriptor {
    pub elements: Vec<String>,
    /// Every pair `x <= y` with `x != y`.
    pub relations: Vec<(String, String)>,
    pub ring: String,
}

impl InstanceDescriptor {
    pub fn new(p: &Preorder, ring: &RingSpec) -> Self {
        InstanceDescriptor {
            elements: p.labels().to_vec(),
            relations: p
                .pairs()
                .into_iter()
                .map(|(x, y)| (p.label(x).to_string(), p.label(y).to_string()))
                .collect(),
            ring: ring.to_string(),
        }
    }

    fn of_space(space: &WeightSpace) -> Self {
        Self::new(&space.poset().as_preorder(), space.ring().spec())
    }
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq, Default)]
pub struct Counts {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mult: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree_trivial: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub units: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplicative_units: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub endomorphisms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub automorphisms: Option<usize>,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
#[serde(untagged)]
pub enum Counterexample {
    Weights(WeightFile),
    Functions { weights: Option<WeightFile>, f: FunctionFile, g: FunctionFile },
    Text(String),
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl Check {
    fn pass(name: &str) -> Self {
        Check { name: name.into(), passed: true, detail: None, counterexample: None }
    }

    fn fail(name: &str, detail: impl Into<String>, cx: Option<Counterexample>) -> Self {
        Check { name: name.into(), passed: false, detail: Some(detail.into()), counterexample: cx }
    }

    fn from_bool(name: &str, ok: bool, detail: impl FnOnce() -> String) -> Self {
        if ok {
            Self::pass(name)
        } else {
            Self::fail(name, detail(), None)
        }
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub kind: String,
    pub instance: InstanceDescriptor,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub counts: Counts,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    fn new(kind: &str, instance: InstanceDescriptor) -> Self {
        VerificationReport { kind: kind.into(), instance, seed: None, counts: Counts::default(), checks: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

// ---- enumeration ---------------------------------------------------------

/// Every multiplicative automorphism, by exhaustive search over assignments
/// of central units to strictly comparable pairs, in lexicographic order of
/// group-index vectors.
///
/// Pairs are filled in order of interval length, so a pair with an
/// intermediate element is either forced by `c_xy = c_xz c_zy` or pruned.
pub fn enumerate_mult(space: &Arc<WeightSpace>, opts: Options) -> Result<Vec<WeightSystem>> {
    let g = space.group();
    let pairs = space.pairs();
    guard(power(g.len(), pairs.len()), ENUMERATION_GUARD, opts)?;
    let q = space.poset();
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by_key(|&i| (q.interval_length(pairs[i].0, pairs[i].1).expect("comparable"), i));
    // For each pair in fill order, the (xz, zy) index pairs below it.
    let k = q.len();
    let splits: Vec<Vec<(usize, usize)>> = order
        .iter()
        .map(|&i| {
            let (x, y) = pairs[i];
            (0..k)
                .filter(|&z| q.lt(x, z) && q.lt(z, y))
                .map(|z| (space.pair_index(x, z).unwrap(), space.pair_index(z, y).unwrap()))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut current = vec![usize::MAX; pairs.len()];
    fill(0, &order, &splits, g, &mut current, &mut out);
    out.sort();
    Ok(out.into_iter().map(|idx| WeightSystem::from_group_indices(space, &idx)).collect())
}

fn fill(
    depth: usize,
    order: &[usize],
    splits: &[Vec<(usize, usize)>],
    g: &crate::ring::CentralUnitGroup,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if depth == order.len() {
        out.push(current.clone());
        return;
    }
    let slot = order[depth];
    match splits[depth].split_first() {
        None => {
            for v in 0..g.len() {
                current[slot] = v;
                fill(depth + 1, order, splits, g, current, out);
            }
        }
        Some((&(a, b), rest)) => {
            let forced = g.mul(current[a], current[b]);
            if rest.iter().all(|&(c, d)| g.mul(current[c], current[d]) == forced) {
                current[slot] = forced;
                fill(depth + 1, order, splits, g, current, out);
            }
        }
    }
    current[slot] = usize::MAX;
}

/// Plain filter over all `|G|^pairs` assignments; only for tiny instances.
pub fn enumerate_mult_by_filter(space: &Arc<WeightSpace>, opts: Options) -> Result<Vec<WeightSystem>> {
    let g = space.group();
    let n = space.pairs().len();
    guard(power(g.len(), n), ENUMERATION_GUARD, opts)?;
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let ws = WeightSystem::from_group_indices(space, &idx);
        if ws.is_valid() {
            out.push(ws);
        }
        // odometer, last position fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < g.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// All coboundaries `v_x^(-1) v_y`, deduplicated, in lexicographic order.
pub fn enumerate_inner(space: &Arc<WeightSpace>, opts: Options) -> Result<Vec<WeightSystem>> {
    let g = space.group();
    let n = space.poset().len();
    guard(power(g.len(), n), ENUMERATION_GUARD, opts)?;
    let mut seen = BTreeSet::new();
    let mut idx = vec![0usize; n];
    loop {
        let coboundary: Vec<usize> = space
            .pairs()
            .iter()
            .map(|&(x, y)| g.mul(g.inv(idx[x]), idx[y]))
            .collect();
        seen.insert(coboundary);
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(seen
                    .into_iter()
                    .map(|i| WeightSystem::from_group_indices(space, &i))
                    .collect());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < g.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

// ---- structure -----------------------------------------------------------

/// Decomposition, counting and innerness checks over the whole of `Mult A`.
///
/// Checks, in order:
/// * `decomposition`: every system is `tree_trivial * inner` exactly, with the
///   first factor trivial on tree edges and the second a coboundary;
/// * `intersection`: the only tree-trivial inner system is the identity;
/// * `inner_count`: `|Mult0| = |G|^(m - lambda)`;
/// * `product_count`: `|Mult| = |Mult1| * |Mult0|`;
/// * `innerness_equivalence`: cycle test, potential search (two roots) and
///   membership in the inner enumeration agree;
/// * `path_independence`: a system is inner exactly when all simple
///   semi-paths between any two vertices have equal weight;
/// * `mult_equals_inner_iff_trivial_mult1`;
/// * `inner_subset`: every coboundary is a valid system.
pub fn verify_structure(space: &Arc<WeightSpace>, opts: Options) -> Result<VerificationReport> {
    let graph = space.graph();
    if !graph.is_connected() {
        return Err(Error::Disconnected(graph.component_count()));
    }
    let mut report = VerificationReport::new("structure", InstanceDescriptor::of_space(space));
    let all = enumerate_mult(space, opts)?;
    let inner = enumerate_inner(space, opts)?;
    let inner_set: BTreeSet<Vec<usize>> = inner.iter().map(WeightSystem::group_indices).collect();
    let root = space.default_root();
    let tree = space.spanning_tree(root)?;
    let alt_root = space.poset().len() - 1;
    let alt_tree = space.spanning_tree(alt_root)?;
    let mult1: Vec<&WeightSystem> = all.iter().filter(|w| w.is_tree_trivial(&tree)).collect();

    report.counts.group = Some(space.group().len());
    report.counts.mult = Some(all.len());
    report.counts.inner = Some(inner.len());
    report.counts.tree_trivial = Some(mult1.len());

    let cx = |w: &WeightSystem| Some(Counterexample::Weights(weight_file(w)));

    // decomposition
    let mut check = Check::pass("decomposition");
    for w in &all {
        let d = w.decompose(&tree)?;
        let ok = d.tree_trivial.compose(&d.inner)? == *w
            && d.tree_trivial.is_tree_trivial(&tree)
            && inner_set.contains(&d.inner.group_indices())
            && d.tree_trivial.is_valid();
        if !ok {
            check = Check::fail("decomposition", "decomposition does not recompose", cx(w));
            break;
        }
    }
    report.checks.push(check);

    let trivial_inner: Vec<&&WeightSystem> =
        mult1.iter().filter(|w| inner_set.contains(&w.group_indices())).collect();
    report.checks.push(match trivial_inner.as_slice() {
        [only] if only.is_identity() => Check::pass("intersection"),
        other => Check::fail(
            "intersection",
            format!("{} tree-trivial inner systems", other.len()),
            other.iter().find(|w| !w.is_identity()).and_then(|w| cx(w)),
        ),
    });

    let expected_inner = power(space.group().len(), graph.edge_count() - graph.cyclomatic_number());
    report.checks.push(Check::from_bool("inner_count", inner.len() as u128 == expected_inner, || {
        format!("|Mult0| = {}, expected {expected_inner}", inner.len())
    }));
    report.checks.push(Check::from_bool("product_count", all.len() == mult1.len() * inner.len(), || {
        format!("|Mult| = {} but |Mult1| * |Mult0| = {}", all.len(), mult1.len() * inner.len())
    }));

    let mut check = Check::pass("innerness_equivalence");
    for w in &all {
        let member = inner_set.contains(&w.group_indices());
        let cycles = w.is_inner_cycles(&tree)?;
        let cycles_alt = w.is_inner_cycles(&alt_tree)?;
        let found = w.find_potential(root)?;
        let found_alt = w.find_potential(alt_root)?;
        let potential_ok = match &found {
            Innerness::Inner(v) => WeightSystem::from_potential(v) == *w,
            Innerness::NotInner(wit) => wit.weight != space.ring().one(),
        };
        if ![cycles, cycles_alt, found.is_inner(), found_alt.is_inner()].iter().all(|&b| b == member) || !potential_ok
        {
            check = Check::fail(
                "innerness_equivalence",
                format!(
                    "member={member} cycles={cycles}/{cycles_alt} potential={}/{}",
                    found.is_inner(),
                    found_alt.is_inner()
                ),
                cx(w),
            );
            break;
        }
    }
    report.checks.push(check);

    let mut check = Check::pass("path_independence");
    let k = space.poset().len();
    let paths: Vec<Vec<crate::graph::SemiPath>> =
        (0..k * k).map(|p| graph.simple_paths(p / k, p % k)).collect();
    for w in &all {
        let member = inner_set.contains(&w.group_indices());
        let mut agree = true;
        'pairs: for ps in &paths {
            let mut weights = ps.iter().map(|p| w.path_weight(p).expect("graph path"));
            if let Some(first) = weights.next() {
                if weights.any(|x| x != first) {
                    agree = false;
                    break 'pairs;
                }
            }
        }
        if agree != member {
            check = Check::fail(
                "path_independence",
                format!("inner={member} but simple semi-path weights agree={agree}"),
                cx(w),
            );
            break;
        }
    }
    report.checks.push(check);

    let equal = all.len() == inner.len();
    report.checks.push(Check::from_bool(
        "mult_equals_inner_iff_trivial_mult1",
        equal == (mult1.len() == 1),
        || format!("|Mult| = {}, |Mult0| = {}, |Mult1| = {}", all.len(), inner.len(), mult1.len()),
    ));

    let all_set: BTreeSet<Vec<usize>> = all.iter().map(WeightSystem::group_indices).collect();
    report.checks.push(Check::from_bool("inner_subset", inner_set.is_subset(&all_set), || {
        "a coboundary is missing from the enumeration".into()
    }));
    Ok(report)
}

// ---- fractional = inner multiplicative -------------------------------------

/// The weight system of the conjugation `f -> u^(-1) f u`, if that map is
/// multiplicative (identity on `L`, scaling each strict block by a central unit).
pub fn multiplicative_conjugation(u: &IncidenceFunction, space: &Arc<WeightSpace>) -> Result<Option<WeightSystem>> {
    let alg = u.algebra();
    let r = alg.ring();
    let q = alg.quotient();
    let p = alg.preorder();
    let u_inv = u.invert()?;
    let basis = r.additive_basis();
    let mut candidates: Vec<Option<BTreeSet<usize>>> = vec![None; space.pairs().len()];
    for (s, t) in alg.support() {
        for &(gen, _) in &basis {
            let f = alg.single(s, t, gen)?;
            let image = u_inv.convolve(&f)?.convolve(u)?;
            if p.equiv(s, t) {
                if image != f {
                    return Ok(None);
                }
                continue;
            }
            if image.entries().any(|(x, y, _)| (x, y) != (s, t)) {
                return Ok(None);
            }
            let h = image.get(s, t);
            let fits: BTreeSet<usize> = (0..space.group().len())
                .filter(|&c| r.mul(space.group().element(c), gen) == h)
                .collect();
            let slot = space.pair_index(q.class_of(s), q.class_of(t)).expect("strict pair");
            let merged = match candidates[slot].take() {
                None => fits,
                Some(prev) => prev.intersection(&fits).copied().collect(),
            };
            if merged.is_empty() {
                return Ok(None);
            }
            candidates[slot] = Some(merged);
        }
    }
    let indices: Vec<usize> = candidates
        .into_iter()
        .map(|c| *c.expect("every strict pair has support").iter().next().expect("non-empty"))
        .collect();
    Ok(Some(WeightSystem::from_group_indices(space, &indices)))
}

/// Enumerates every unit `u` of the algebra and compares the weight systems
/// of the multiplicative conjugations with the coboundaries, as sets.
pub fn verify_inner_conjugations(alg: &Arc<IncidenceAlgebra>, opts: Options) -> Result<VerificationReport> {
    let space = WeightSpace::for_algebra(alg);
    let r = alg.ring();
    let support = alg.support();
    guard(power(r.order() as usize, support.len()), UNIT_GUARD, opts)?;
    let mut report = VerificationReport::new("inner_conjugations", InstanceDescriptor::new(alg.preorder(), r.spec()));
    let mut induced = BTreeSet::new();
    let (mut units, mut multiplicative) = (0usize, 0usize);
    let mut codes = vec![0u64; support.len()];
    loop {
        let values: Vec<RingElement> = codes.iter().map(|&c| r.element(c).expect("in range")).collect();
        let u = alg.from_support_values(&values);
        if u.is_unit() {
            units += 1;
            if let Some(w) = multiplicative_conjugation(&u, &space)? {
                multiplicative += 1;
                induced.insert(w.group_indices());
            }
        }
        let mut pos = codes.len();
        let done = loop {
            if pos == 0 {
                break true;
            }
            pos -= 1;
            codes[pos] += 1;
            if codes[pos] < r.order() {
                break false;
            }
            codes[pos] = 0;
        };
        if done {
            break;
        }
    }
    let inner: BTreeSet<Vec<usize>> = enumerate_inner(&space, opts)?.iter().map(WeightSystem::group_indices).collect();
    report.counts.units = Some(units);
    report.counts.multiplicative_units = Some(multiplicative);
    report.counts.inner = Some(inner.len());
    report.counts.mult = Some(induced.len());
    report.checks.push(if induced == inner {
        Check::pass("induced_equals_inner")
    } else {
        let odd = induced.symmetric_difference(&inner).next().expect("sets differ");
        Check::fail(
            "induced_equals_inner",
            format!("{} induced systems vs {} coboundaries", induced.len(), inner.len()),
            Some(Counterexample::Weights(weight_file(&WeightSystem::from_group_indices(&space, odd)))),
        )
    });
    Ok(report)
}

// ---- bimodule endomorphisms ----------------------------------------------

/// `rows x cols` matrices over a ring, row-major.
type Mat = Vec<RingElement>;

fn mat_mul(r: &Ring, a: &[RingElement], b: &[RingElement], n: usize, k: usize, m: usize) -> Mat {
    let mut out = vec![r.zero(); n * m];
    for i in 0..n {
        for j in 0..m {
            out[i * m + j] = r.sum((0..k).map(|t| r.mul(a[i * k + t], b[t * m + j])));
        }
    }
    out
}

/// Coordinates of `x` with respect to [`Ring::additive_basis`].
fn coordinates(r: &Ring, x: RingElement) -> Vec<u64> {
    fn rec(spec: &RingSpec, code: u64, out: &mut Vec<u64>) {
        match spec {
            RingSpec::Modular(_) => out.push(code),
            RingSpec::Product(l, rt) => {
                let ro = rt.order().expect("order");
                rec(l, code / ro, out);
                rec(rt, code % ro, out);
            }
            RingSpec::Matrix { size, modulus } => {
                let mut digits = vec![0; size * size];
                let mut c = code;
                for d in digits.iter_mut().rev() {
                    *d = c % modulus;
                    c /= modulus;
                }
                out.extend(digits);
            }
        }
    }
    let mut out = Vec::new();
    rec(r.spec(), x.code(), &mut out);
    out
}

/// Searches all additive maps `V -> V`, `V = M(n x m, R)`, for those that
/// commute with the left `M(n, R)` and right `M(m, R)` actions, and compares
/// them with multiplications by central elements.
pub fn verify_bimodule_maps(n: usize, m: usize, ring: &Ring, opts: Options) -> Result<VerificationReport> {
    if n == 0 || m == 0 {
        return Err(Error::Domain("matrix dimensions must be positive".into()));
    }
    let r = ring;
    let rbasis = r.additive_basis();
    // basis of V: (generator, additive order, position)
    let vbasis: Vec<(RingElement, u64, usize)> = (0..n * m)
        .flat_map(|pos| rbasis.iter().map(move |&(g, o)| (g, o, pos)))
        .collect();
    let basis_vec = |(g, _, pos): (RingElement, u64, usize)| -> Mat {
        let mut v = vec![r.zero(); n * m];
        v[pos] = g;
        v
    };
    let v_size = power(r.order() as usize, n * m);
    let v_all: Vec<Mat> = if v_size <= ADDITIVE_MAP_GUARD || opts.force {
        let mut all = Vec::new();
        let mut codes = vec![0u64; n * m];
        loop {
            all.push(codes.iter().map(|&c| r.element(c).expect("in range")).collect());
            let mut pos = codes.len();
            let done = loop {
                if pos == 0 {
                    break true;
                }
                pos -= 1;
                codes[pos] += 1;
                if codes[pos] < r.order() {
                    break false;
                }
                codes[pos] = 0;
            };
            if done {
                break all;
            }
        }
    } else {
        return Err(Error::Guard { needed: v_size, limit: ADDITIVE_MAP_GUARD });
    };
    // admissible images of each basis vector: elements killed by its additive order
    let admissible: Vec<Vec<usize>> = vbasis
        .iter()
        .map(|&(_, o, _)| {
            (0..v_all.len())
                .filter(|&i| v_all[i].iter().all(|&x| r.is_zero(r.int_scale(x, o as i64))))
                .collect()
        })
        .collect();
    let candidates = admissible.iter().fold(1u128, |acc, a| acc.saturating_mul(a.len() as u128));
    guard(candidates, ADDITIVE_MAP_GUARD, opts)?;

    let eval = |images: &[usize], v: &[RingElement]| -> Mat {
        let mut out = vec![r.zero(); n * m];
        for (pos, &x) in v.iter().enumerate() {
            for (k, c) in coordinates(r, x).into_iter().enumerate() {
                let img = &v_all[images[pos * rbasis.len() + k]];
                for (o, &y) in out.iter_mut().zip(img) {
                    *o = r.add(*o, r.int_scale(y, c as i64));
                }
            }
        }
        out
    };
    let left_gens: Vec<Mat> = (0..n * n)
        .flat_map(|pos| rbasis.iter().map(move |&(g, _)| (pos, g)))
        .map(|(pos, g)| {
            let mut a = vec![r.zero(); n * n];
            a[pos] = g;
            a
        })
        .collect();
    let right_gens: Vec<Mat> = (0..m * m)
        .flat_map(|pos| rbasis.iter().map(move |&(g, _)| (pos, g)))
        .map(|(pos, g)| {
            let mut b = vec![r.zero(); m * m];
            b[pos] = g;
            b
        })
        .collect();
    let basis_vecs: Vec<Mat> = vbasis.iter().map(|&b| basis_vec(b)).collect();

    // Both sides of each identity are additive in the acting element and in
    // the vector, so generators suffice.
    let is_bimodule_map = |images: &[usize]| -> bool {
        basis_vecs.iter().enumerate().all(|(bi, v)| {
            let fv = &v_all[images[bi]];
            left_gens.iter().all(|a| eval(images, &mat_mul(r, a, v, n, n, m)) == mat_mul(r, a, fv, n, n, m))
                && right_gens.iter().all(|b| eval(images, &mat_mul(r, v, b, n, m, m)) == mat_mul(r, fv, b, n, m, m))
        })
    };

    let mut survivors: Vec<Vec<usize>> = Vec::new();
    let mut choice = vec![0usize; vbasis.len()];
    loop {
        let images: Vec<usize> = choice.iter().zip(&admissible).map(|(&c, a)| a[c]).collect();
        if is_bimodule_map(&images) {
            survivors.push(images);
        }
        let mut pos = choice.len();
        let done = loop {
            if pos == 0 {
                break true;
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < admissible[pos].len() {
                break false;
            }
            choice[pos] = 0;
        };
        if done {
            break;
        }
    }

    let index_of = |v: &Mat| v_all.iter().position(|w| w == v).expect("element of V");
    let scalar_map = |c: RingElement| -> Vec<usize> {
        basis_vecs.iter().map(|v| index_of(&v.iter().map(|&x| r.mul(c, x)).collect())).collect()
    };
    let center = r.center();
    let expected: BTreeSet<Vec<usize>> = center.iter().map(|&c| scalar_map(c)).collect();
    let expected_auto: BTreeSet<Vec<usize>> =
        center.iter().filter(|&&c| r.is_unit(c)).map(|&c| scalar_map(c)).collect();
    let found: BTreeSet<Vec<usize>> = survivors.iter().cloned().collect();
    let bijective: BTreeSet<Vec<usize>> = survivors
        .iter()
        .filter(|images| {
            let hit: BTreeSet<Mat> = v_all.iter().map(|v| eval(images, v)).collect();
            hit.len() == v_all.len()
        })
        .cloned()
        .collect();

    let mut report = VerificationReport::new(
        "bimodule_maps",
        InstanceDescriptor { elements: vec![format!("{n}x{m}")], relations: Vec::new(), ring: r.spec().to_string() },
    );
    report.counts.endomorphisms = Some(found.len());
    report.counts.automorphisms = Some(bijective.len());
    report.checks.push(Check::from_bool("endomorphisms_are_central_multiplications", found == expected, || {
        format!("{} bimodule endomorphisms, {} central elements", found.len(), expected.len())
    }));
    report.checks.push(Check::from_bool(
        "automorphisms_are_central_unit_multiplications",
        bijective == expected_auto,
        || format!("{} bimodule automorphisms, {} central units", bijective.len(), expected_auto.len()),
    ));
    Ok(report)
}

// ---- algebra cross-checks ------------------------------------------------

/// Element order used for the matrix embedding: classes in a linear
/// extension of the quotient, members of a class in label order.
pub fn embedding_order(p: &Preorder) -> Vec<usize> {
    let q = p.quotient();
    q.linear_extension().into_iter().flat_map(|c| q.members(c).to_vec()).collect()
}

/// The structural matrix of `f` under [`embedding_order`].
pub fn to_matrix(f: &IncidenceFunction) -> Vec<Vec<RingElement>> {
    let alg = f.algebra();
    let p = alg.preorder();
    let order = embedding_order(p);
    order
        .iter()
        .map(|&x| {
            order
                .iter()
                .map(|&y| if p.leq(x, y) { f.get(x, y) } else { alg.ring().zero() })
                .collect()
        })
        .collect()
}

/// Compares `convolve(f, g)` with the product of the structural matrices.
pub fn matrix_oracle(f: &IncidenceFunction, g: &IncidenceFunction) -> Result<bool> {
    let r = f.algebra().ring();
    let (a, b) = (to_matrix(f), to_matrix(g));
    let n = a.len();
    let product: Vec<Vec<RingElement>> = (0..n)
        .map(|i| (0..n).map(|j| r.sum((0..n).map(|t| r.mul(a[i][t], b[t][j])))).collect())
        .collect();
    Ok(to_matrix(&f.convolve(g)?) == product)
}

/// Matrix-embedding agreement, associativity, identity and unit inversion on
/// `trials` random functions.
pub fn matrix_report(alg: &Arc<IncidenceAlgebra>, trials: usize, seed: u64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("algebra", InstanceDescriptor::new(alg.preorder(), alg.ring().spec()));
    report.seed = Some(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delta = alg.delta();
    let functions_cx = |f: &IncidenceFunction, g: &IncidenceFunction| {
        Some(Counterexample::Functions { weights: None, f: function_file(f), g: function_file(g) })
    };
    let mut matrix = Check::pass("matrix_embedding");
    let mut assoc = Check::pass("associativity");
    let mut identity = Check::pass("delta_identity");
    let mut inverse = Check::pass("unit_inverse");
    for _ in 0..trials {
        let f = sample::function(alg, &mut rng);
        let g = sample::function(alg, &mut rng);
        let h = sample::function(alg, &mut rng);
        if matrix.passed && !matrix_oracle(&f, &g)? {
            matrix = Check::fail("matrix_embedding", "convolution differs from the matrix product", functions_cx(&f, &g));
        }
        if assoc.passed && f.convolve(&g)?.convolve(&h)? != f.convolve(&g.convolve(&h)?)? {
            assoc = Check::fail("associativity", "(fg)h != f(gh)", functions_cx(&f, &g));
        }
        if identity.passed && (f.convolve(&delta)? != f || delta.convolve(&f)? != f) {
            identity = Check::fail("delta_identity", "delta is not an identity", functions_cx(&f, &delta));
        }
        let u = sample::unit_function(alg, &mut rng);
        let v = u.invert()?;
        if inverse.passed && (u.convolve(&v)? != delta || v.convolve(&u)? != delta) {
            inverse = Check::fail("unit_inverse", "u u^(-1) != delta", functions_cx(&u, &v));
        }
    }
    report.checks.extend([matrix, assoc, identity, inverse]);
    Ok(report)
}

/// Multiplicativity of `apply` and its action on `L`, on every pair of
/// single-entry functions and then on `trials` random pairs.
pub fn automorphism_check(
    ws: &WeightSystem,
    alg: &Arc<IncidenceAlgebra>,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("automorphism", InstanceDescriptor::new(alg.preorder(), alg.ring().spec()));
    report.seed = Some(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = alg.ring().one();
    let units: Vec<IncidenceFunction> =
        alg.support().into_iter().map(|(x, y)| alg.single(x, y, one)).collect::<Result<_>>()?;
    let mut pairs: Vec<(IncidenceFunction, IncidenceFunction)> = Vec::new();
    for f in &units {
        for g in &units {
            pairs.push((f.clone(), g.clone()));
        }
    }
    for _ in 0..trials {
        pairs.push((sample::function(alg, &mut rng), sample::function(alg, &mut rng)));
    }
    let m = ws.to_mult_function(alg)?;
    let mut mult = Check::pass("multiplicative");
    let mut fixes_l = Check::pass("fixes_l");
    let mut hadamard = Check::pass("hadamard_form");
    for (f, g) in &pairs {
        let lhs = ws.apply(&f.convolve(g)?)?;
        let rhs = ws.apply(f)?.convolve(&ws.apply(g)?)?;
        if mult.passed && lhs != rhs {
            mult = Check::fail(
                "multiplicative",
                "apply(fg) != apply(f) apply(g)",
                Some(Counterexample::Functions {
                    weights: Some(weight_file(ws)),
                    f: function_file(f),
                    g: function_file(g),
                }),
            );
        }
        if fixes_l.passed && ws.apply(f)?.l_part() != f.l_part() {
            fixes_l = Check::fail(
                "fixes_l",
                "L-part changed",
                Some(Counterexample::Functions { weights: Some(weight_file(ws)), f: function_file(f), g: function_file(g) }),
            );
        }
        if hadamard.passed && ws.apply(f)? != IncidenceFunction::hadamard(&m, f)? {
            hadamard = Check::fail(
                "hadamard_form",
                "apply differs from the Hadamard product with the multiplicative function",
                Some(Counterexample::Functions { weights: Some(weight_file(ws)), f: function_file(f), g: function_file(g) }),
            );
        }
    }
    report.checks.extend([mult, fixes_l, hadamard]);
    Ok(report)
}

/// Ring axioms, unit inverses and central-unit closure for one ring.
///
/// Exhaustive over all triples when `|R| <= 16`, otherwise `samples` random triples.
pub fn verify_ring(ring: &Ring, samples: usize, seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new(
        "ring",
        InstanceDescriptor { elements: Vec::new(), relations: Vec::new(), ring: ring.spec().to_string() },
    );
    report.seed = Some(seed);
    let r = ring;
    let triples: Vec<[RingElement; 3]> = if r.order() <= 16 {
        let all: Vec<RingElement> = r.elements().collect();
        let all = &all;
        all.iter()
            .flat_map(|&a| all.iter().flat_map(move |&b| all.iter().map(move |&c| [a, b, c])))
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| [sample::element(r, &mut rng), sample::element(r, &mut rng), sample::element(r, &mut rng)])
            .collect()
    };
    let axioms = triples.iter().all(|&[a, b, c]| {
        r.add(r.add(a, b), c) == r.add(a, r.add(b, c))
            && r.mul(r.mul(a, b), c) == r.mul(a, r.mul(b, c))
            && r.mul(a, r.add(b, c)) == r.add(r.mul(a, b), r.mul(a, c))
            && r.mul(r.add(a, b), c) == r.add(r.mul(a, c), r.mul(b, c))
            && r.add(a, b) == r.add(b, a)
            && r.add(a, r.zero()) == a
            && r.mul(a, r.one()) == a
            && r.mul(r.one(), a) == a
            && r.add(a, r.neg(a)) == r.zero()
    });
    report.checks.push(Check::from_bool("ring_axioms", axioms, || "a ring axiom fails".into()));
    let inverses = r.elements().take(100_000).all(|x| match r.inverse(x) {
        Some(y) => r.mul(x, y) == r.one() && r.mul(y, x) == r.one(),
        None => true,
    });
    report.checks.push(Check::from_bool("unit_inverses", inverses, || "bad inverse".into()));
    let cu = r.central_units();
    let all: Vec<RingElement> = if r.order() <= 4096 { r.elements().collect() } else { Vec::new() };
    let central = cu.iter().all(|&c| all.iter().all(|&x| r.mul(c, x) == r.mul(x, c)));
    let closed = cu.contains(&r.one())
        && cu.iter().all(|&a| cu.iter().all(|&b| cu.contains(&r.mul(a, b))))
        && cu.iter().all(|&a| cu.contains(&r.inverse(a).expect("unit")));
    report.checks.push(Check::from_bool("central_units_group", central && closed, || {
        "central units are not a central subgroup".into()
    }));
    report
}

// ---- small posets ----------------------------------------------------------

fn label(i: usize) -> String {
    ((b'a' + i as u8) as char).to_string()
}

fn canonical(n: usize, rel: u64) -> u64 {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    loop {
        let mut code = 0u64;
        for i in 0..n {
            for j in 0..n {
                if rel >> (i * n + j) & 1 == 1 {
                    code |= 1 << (perm[i] * n + perm[j]);
                }
            }
        }
        best = best.min(code);
        if !next_permutation(&mut perm) {
            return best;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All partial orders on `n` points up to isomorphism, labelled `a`, `b`, ...
/// with the natural label order a linear extension.
pub fn posets(n: usize) -> Vec<Preorder> {
    assert!(n <= 7, "poset generation is limited to 7 points");
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << slots.len()) {
        let mut lt = vec![false; n * n];
        for (b, &(i, j)) in slots.iter().enumerate() {
            if mask >> b & 1 == 1 {
                lt[i * n + j] = true;
            }
        }
        let transitive = (0..n).all(|i| {
            (0..n).all(|j| !lt[i * n + j] || (0..n).all(|k| !lt[j * n + k] || lt[i * n + k]))
        });
        if !transitive {
            continue;
        }
        let mut rel = 0u64;
        for (p, &b) in lt.iter().enumerate() {
            if b {
                rel |= 1 << p;
            }
        }
        if !seen.insert(canonical(n, rel)) {
            continue;
        }
        let leq: Vec<bool> = (0..n * n).map(|p| lt[p] || p / n == p % n).collect();
        out.push(Preorder::from_relation((0..n).map(label).collect(), leq).expect("partial order"));
    }
    out
}

/// Connected posets with between 1 and `max_n` points, up to isomorphism.
pub fn connected_posets(max_n: usize) -> Vec<Preorder> {
    (1..=max_n)
        .flat_map(posets)
        .filter(|p| p.quotient().is_connected())
        .collect()
}

/// Preorders on exactly `n` points: every poset on `k <= n` classes with
/// every assignment of class sizes.
pub fn preorders(n: usize) -> Vec<Preorder> {
    let mut out = Vec::new();
    for k in 1..=n {
        for q in posets(k) {
            for sizes in compositions(n, k) {
                let mut class_of = Vec::with_capacity(n);
                for (c, &s) in sizes.iter().enumerate() {
                    class_of.extend(std::iter::repeat(c).take(s));
                }
                let leq: Vec<bool> = (0..n * n).map(|p| q.leq(class_of[p / n], class_of[p % n])).collect();
                out.push(Preorder::from_relation((0..n).map(label).collect(), leq).expect("preorder"));
            }
        }
    }
    out
}

fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return if n >= 1 { vec![vec![n]] } else { Vec::new() };
    }
    (1..n)
        .flat_map(|first| {
            compositions(n - first, k - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Property (a): `[y, z] = [x]` for `y, z` in `[x]`; property (b): `[x] < [y]`
/// forces `s < t` for all members. Returns a description of the first failure.
pub fn check_quotient_properties(p: &Preorder) -> Option<String> {
    let q: QuotientPoset = p.quotient();
    for c in 0..q.len() {
        let members = q.members(c);
        let mut class: Vec<usize> = members.to_vec();
        class.sort_unstable();
        for &y in members {
            for &z in members {
                if p.interval_indices(y, z) != class {
                    return Some(format!("interval [{}, {}] is not the class", p.label(y), p.label(z)));
                }
            }
        }
    }
    for a in 0..q.len() {
        for b in 0..q.len() {
            if q.lt(a, b) {
                for &s in q.members(a) {
                    for &t in q.members(b) {
                        if !p.strictly_below(s, t) {
                            return Some(format!("{} not strictly below {}", p.label(s), p.label(t)));
                        }
                    }
                }
            }
        }
    }
    if !q.is_partial_order() {
        return Some("quotient relation is not a partial order".into());
    }
    for s in 0..p.len() {
        for t in 0..p.len() {
            if p.equiv(s, t) != (q.class_of(s) == q.class_of(t)) {
                return Some(format!("class membership of {} and {} disagrees with ~", p.label(s), p.label(t)));
            }
        }
    }
    None
}

/// [`verify_structure`] over every connected poset with at most
/// `max_classes` points and every ring in `rings`, skipping instances whose
/// enumeration would exceed the guards. Output order is deterministic.
pub fn sweep(max_classes: usize, rings: &[Ring], opts: Options) -> Vec<SweepEntry> {
    let instances: Vec<(Preorder, Ring)> = connected_posets(max_classes)
        .into_iter()
        .flat_map(|p| rings.iter().map(move |r| (p.clone(), r.clone())))
        .collect();
    instances
        .into_par_iter()
        .map(|(p, r)| {
            let descriptor = InstanceDescriptor::new(&p, r.spec());
            let space = WeightSpace::new(p.quotient(), r);
            match verify_structure(&space, opts) {
                Ok(report) => SweepEntry { instance: descriptor, report: Some(report), skipped: None },
                Err(e @ Error::Guard { .. }) => SweepEntry { instance: descriptor, report: None, skipped: Some(e.to_string()) },
                Err(e) => SweepEntry {
                    instance: descriptor.clone(),
                    report: Some(VerificationReport {
                        kind: "structure".into(),
                        instance: descriptor,
                        seed: None,
                        counts: Counts::default(),
                        checks: vec![Check::fail("run", e.to_string(), None)],
                    }),
                    skipped: None,
                },
            }
        })
        .collect()
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub instance: InstanceDescriptor,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

/// The rings of the standard sweep: `Z/2`, `Z/3`, `Z/4`, `Z/5`, `Z/12`.
pub fn standard_rings() -> Vec<Ring> {
    ["Z/2", "Z/3", "Z/4", "Z/5", "Z/12"]
        .iter()
        .map(|s| Ring::parse(s).expect("valid spec"))
        .collect()
}
