//! Ready-made curves used across tests, docs and the CLI self checks.

use std::sync::Arc;

use crate::curve::{Curve, EdgeLength, EdgeSpec};
use crate::rat::Rat;

/// `n` infinite leaves `e1..en` from a finite center `O` to infinite points
/// `I1..In`. `star(3)` is the tripod.
pub fn star(n: usize) -> Arc<Curve> {
    assert!(n >= 2, "a star needs at least two leaves");
    let mut vertices = vec![("O".to_string(), false)];
    let mut edges = Vec::with_capacity(n);
    for k in 1..=n {
        vertices.push((format!("I{k}"), true));
        edges.push(EdgeSpec {
            id: format!("e{k}"),
            ends: ("O".into(), format!("I{k}")),
            length: EdgeLength::Infinite,
            multiplicity: 1,
        });
    }
    Arc::new(Curve::new(vertices, edges).expect("star is valid"))
}

/// Two infinite leaves joined at a mandatory 2-valent center `M`.
pub fn segment() -> Arc<Curve> {
    Arc::new(
        Curve::new(
            vec![
                ("M".into(), false),
                ("I1".into(), true),
                ("I2".into(), true),
            ],
            vec![
                EdgeSpec {
                    id: "e1".into(),
                    ends: ("M".into(), "I1".into()),
                    length: EdgeLength::Infinite,
                    multiplicity: 1,
                },
                EdgeSpec {
                    id: "e2".into(),
                    ends: ("M".into(), "I2".into()),
                    length: EdgeLength::Infinite,
                    multiplicity: 1,
                },
            ],
        )
        .expect("segment is valid"),
    )
}

/// Circle built from two arcs `e1`, `e2` of the given lengths between
/// vertices `A` and `B`, all with multiplicity `m`.
pub fn circle_with_multiplicity(a: Rat, b: Rat, m: u64) -> Arc<Curve> {
    Arc::new(
        Curve::new(
            vec![("A".into(), false), ("B".into(), false)],
            vec![
                EdgeSpec {
                    id: "e1".into(),
                    ends: ("A".into(), "B".into()),
                    length: EdgeLength::Finite(a),
                    multiplicity: m,
                },
                EdgeSpec {
                    id: "e2".into(),
                    ends: ("A".into(), "B".into()),
                    length: EdgeLength::Finite(b),
                    multiplicity: m,
                },
            ],
        )
        .expect("circle is valid"),
    )
}

/// Circle of circumference `a + b` with multiplicity 1.
pub fn circle(a: Rat, b: Rat) -> Arc<Curve> {
    circle_with_multiplicity(a, b, 1)
}

/// Theta graph: vertices `A`, `B` joined by three parallel finite edges of
/// lengths 1, 1 and 2.
pub fn theta112() -> Arc<Curve> {
    use crate::rat::rat_int;
    Arc::new(
        Curve::new(
            vec![("A".into(), false), ("B".into(), false)],
            vec![
                EdgeSpec {
                    id: "e1".into(),
                    ends: ("A".into(), "B".into()),
                    length: EdgeLength::Finite(rat_int(1)),
                    multiplicity: 1,
                },
                EdgeSpec {
                    id: "e2".into(),
                    ends: ("A".into(), "B".into()),
                    length: EdgeLength::Finite(rat_int(1)),
                    multiplicity: 1,
                },
                EdgeSpec {
                    id: "e3".into(),
                    ends: ("A".into(), "B".into()),
                    length: EdgeLength::Finite(rat_int(2)),
                    multiplicity: 1,
                },
            ],
        )
        .expect("theta is valid"),
    )
}
