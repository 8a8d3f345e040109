//! Small named preorders used throughout the tests and examples.

use crate::preorder::Preorder;

fn build(elements: &[&str], rel: &[(&str, &str)]) -> Preorder {
    Preorder::close_relations(elements, rel).expect("well-formed instance")
}

/// `a < b < ...`, labels `a`, `b`, `c`, ...
pub fn chain(n: usize) -> Preorder {
    let labels: Vec<String> = (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let rel: Vec<(String, String)> = labels.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    Preorder::close_relations(&labels, &rel).expect("chain")
}

pub fn antichain(n: usize) -> Preorder {
    let labels: Vec<String> = (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    Preorder::close_relations::<String>(&labels, &[]).expect("antichain")
}

/// `a, b < c, d`.
pub fn crown() -> Preorder {
    build(&["a", "b", "c", "d"], &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])
}

/// `a < b < d`, `a < c < d`.
pub fn diamond() -> Preorder {
    build(&["a", "b", "c", "d"], &[("a", "b"), ("b", "d"), ("a", "c"), ("c", "d")])
}

/// `p ~ q`, `p <= r`: a genuine preorder with a two-element class.
pub fn collapsed_pair() -> Preorder {
    build(&["p", "q", "r"], &[("p", "q"), ("q", "p"), ("p", "r")])
}
