//! Seeded random sampling of incidence functions and weights.

use std::sync::Arc;

use rand::Rng as _;
use rand::RngCore;

use crate::algebra::{IncidenceAlgebra, IncidenceFunction};
use crate::mult::{Potential, WeightSpace};
use crate::ring::{Ring, RingElement};

pub fn element<R: RngCore>(ring: &Ring, rng: &mut R) -> RingElement {
    ring.element(rng.gen_range(0..ring.order())).expect("in range")
}

pub fn unit<R: RngCore>(ring: &Ring, rng: &mut R) -> RingElement {
    loop {
        let x = element(ring, rng);
        if ring.is_unit(x) {
            return x;
        }
    }
}

/// Uniform on the whole algebra.
pub fn function<R: RngCore>(alg: &Arc<IncidenceAlgebra>, rng: &mut R) -> IncidenceFunction {
    let values: Vec<RingElement> = alg.support().iter().map(|_| element(alg.ring(), rng)).collect();
    alg.from_support_values(&values)
}

pub fn radical<R: RngCore>(alg: &Arc<IncidenceAlgebra>, rng: &mut R) -> IncidenceFunction {
    function(alg, rng).m_part()
}

pub fn l_part<R: RngCore>(alg: &Arc<IncidenceAlgebra>, rng: &mut R) -> IncidenceFunction {
    function(alg, rng).l_part()
}

/// A unit of the algebra: random off-diagonal part, invertible diagonal blocks.
pub fn unit_function<R: RngCore>(alg: &Arc<IncidenceAlgebra>, rng: &mut R) -> IncidenceFunction {
    let q = alg.quotient();
    let all_singletons = q.classes().iter().all(|c| c.len() == 1);
    loop {
        let mut f = function(alg, rng);
        if all_singletons {
            for x in 0..alg.size() {
                f.set(x, x, unit(alg.ring(), rng)).expect("diagonal");
            }
        }
        if f.is_unit() {
            return f;
        }
    }
}

pub fn potential<R: RngCore>(space: &Arc<WeightSpace>, rng: &mut R) -> Potential {
    let g = space.group();
    let values = (0..space.poset().len())
        .map(|_| g.element(rng.gen_range(0..g.len())))
        .collect();
    Potential::new(space, values).expect("central units")
}

pub fn group_element<R: RngCore>(space: &WeightSpace, rng: &mut R) -> RingElement {
    let g = space.group();
    g.element(rng.gen_range(0..g.len()))
}
