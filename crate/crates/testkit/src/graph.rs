use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::Rng;

/// Nodes reachable from `from` in one or more steps.
pub fn reachable(edges: &[(String, String)], from: &str) -> BTreeSet<String> {
    let mut succ: HashMap<&str, Vec<&str>> = HashMap::new();
    for (a, b) in edges {
        succ.entry(a).or_default().push(b);
    }
    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<&str> = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        for &y in succ.get(x).into_iter().flatten() {
            if seen.insert(y.to_string()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Sparse random digraph on `nodes` nodes named `n0`, `n1`, ...
pub fn random_edges(rng: &mut impl Rng, nodes: usize) -> Vec<(String, String)> {
    let count = rng.gen_range(0..=nodes * 2);
    (0..count)
        .map(|_| {
            (
                format!("n{}", rng.gen_range(0..nodes)),
                format!("n{}", rng.gen_range(0..nodes)),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_edges() {
        let edges = vec![("a".to_string(), "b".to_string()), ("b".into(), "c".into())];
        assert_eq!(reachable(&edges, "a"), BTreeSet::from(["b".into(), "c".into()]));
        assert_eq!(reachable(&edges, "b"), BTreeSet::from(["c".into()]));
        assert!(reachable(&edges, "c").is_empty());
    }

    #[test]
    fn cycles_include_start() {
        let edges = vec![("x".to_string(), "y".to_string()), ("y".into(), "x".into())];
        assert_eq!(reachable(&edges, "x"), BTreeSet::from(["x".into(), "y".into()]));
    }
}
