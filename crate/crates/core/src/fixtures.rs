//! Named sets used throughout the tests, demos and CLI.

use crate::sets::PolyZonotope;

/// The two-dimensional running example
/// `(4,4) + β₁(1,0) + α₁(2,0) + α₂(1,2) + α₁³α₂(2,2)`.
pub fn example1() -> PolyZonotope {
    PolyZonotope::new(
        vec![4.0, 4.0],
        vec![vec![1.0, 0.0]],
        vec![vec![2.0, 0.0], vec![1.0, 2.0], vec![2.0, 2.0]],
        vec![vec![1, 0], vec![0, 1], vec![3, 1]],
    )
    .expect("example set is well formed")
}

/// `{ α₁² }`, whose split children overapproximate worse than the parent.
pub fn square() -> PolyZonotope {
    PolyZonotope::dependent(vec![vec![1.0]], vec![vec![2]]).expect("square set is well formed")
}
