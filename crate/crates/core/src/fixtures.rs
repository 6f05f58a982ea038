//! Small hand-checkable graphs shared by tests, the CLI corpus and docs.

use alloc::vec::Vec;

use crate::graph::{Graph, VertexId};

pub const S: VertexId = 0;
pub const A: VertexId = 1;
pub const B: VertexId = 2;
pub const T: VertexId = 3;

/// `s→a:1, a→b:−5, b→t:2`. No negative cycle; `d(s,t) = −2`.
pub fn a() -> Graph {
    Graph::new(4, [(S, A, 1.0), (A, B, -5.0), (B, T, 2.0)]).expect("fixture")
}

/// `s→a:1, a→b:−5, b→s:2, b→t:2`. Contains the cycle `s→a→b→s` of length −2.
pub fn b() -> Graph {
    Graph::new(4, [(S, A, 1.0), (A, B, -5.0), (B, S, 2.0), (B, T, 2.0)]).expect("fixture")
}

/// Chain `x1→y1:−1, y1→x2:0, x2→y2:−1, y2→x3:0, x3→y3:−1` with
/// `x_i = 2(i−1)`, `y_i = 2(i−1)+1`.
pub fn c() -> Graph {
    chain(3)
}

/// The chain of [`c`] with `links` negative edges.
pub fn chain(links: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..links {
        let x = 2 * i;
        edges.push((x, x + 1, -1.0));
        if i + 1 < links {
            edges.push((x + 1, x + 2, 0.0));
        }
    }
    Graph::new(2 * links, edges).expect("fixture")
}

/// `x_i` in [`chain`] (1-based like the fixture's labels).
pub fn x(i: usize) -> VertexId {
    2 * (i - 1)
}

/// `y_i` in [`chain`].
pub fn y(i: usize) -> VertexId {
    2 * (i - 1) + 1
}
