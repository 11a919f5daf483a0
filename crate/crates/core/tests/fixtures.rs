//! Hand-encoded skeletons, one per topological class, checked against the
//! invariant table without any tracing.

use kolportrait::compactification::ChartId;
use kolportrait::finite::{PointId, PointKind};
use kolportrait::global::{class_from_invariants, class_invariants, mask, RClass};
use kolportrait::skeleton::{compute_invariants, Attachment, Edge, EdgeKind, Node, RegionOrbit, SeparatrixSkeleton};
use kolportrait::Error;

/// Builds a skeleton from a compact description.
///
/// Finite points are `P0`, `P1`, `P2` with a kind; chart origins are `U1`,
/// `U2`, `V1`, `V2`; anything written `B<degrees>` is a boundary point.
/// Edges read `kind from>to at_from/at_to [conn]` with attachments `s`
/// (saddle type), `p` (parabolic) or `-`.
struct Fixture {
    sk: SeparatrixSkeleton,
}

impl Fixture {
    fn new(points: &[(&str, PointKind)]) -> Fixture {
        let mut sk = SeparatrixSkeleton::default();
        for &(name, kind) in points {
            let (id, location) = match name {
                "P0" => (PointId::P0, (0.0, 0.0)),
                "P1" => (PointId::P1, (0.0, -1.0)),
                "P2" => (PointId::P2, (-1.0, 0.0)),
                _ => panic!("unknown point {name}"),
            };
            sk.add_node(Node::Finite { id, kind, location });
        }
        for chart in [ChartId::U1, ChartId::U2, ChartId::V1, ChartId::V2] {
            sk.add_node(Node::Origin { chart, label: None });
        }
        Fixture { sk }
    }

    fn node(&mut self, name: &str) -> usize {
        let sk = &mut self.sk;
        let found = match name {
            "P0" => sk.finite(PointId::P0),
            "P1" => sk.finite(PointId::P1),
            "P2" => sk.finite(PointId::P2),
            "U1" => sk.origin(ChartId::U1),
            "U2" => sk.origin(ChartId::U2),
            "V1" => sk.origin(ChartId::V1),
            "V2" => sk.origin(ChartId::V2),
            b => {
                let deg: f64 = b.strip_prefix('B').and_then(|d| d.parse().ok()).expect("node name");
                let angle = deg.to_radians();
                let at = sk.nodes.iter().position(|n| matches!(n, Node::Boundary { angle: a } if *a == angle));
                Some(at.unwrap_or_else(|| sk.add_node(Node::Boundary { angle })))
            }
        };
        found.unwrap_or_else(|| panic!("node {name} is not in this fixture"))
    }

    fn edges(mut self, lines: &[&str]) -> Fixture {
        let att = |s: &str| match s {
            "s" => Some(Attachment::SaddleType),
            "p" => Some(Attachment::Parabolic),
            "-" => None,
            _ => panic!("bad attachment {s}"),
        };
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let kind = match parts[0] {
                "axis" => EdgeKind::Axis,
                "line" => EdgeKind::InvariantLine,
                "branch" => EdgeKind::SaddleBranch,
                "sep" => EdgeKind::OriginSeparatrix,
                k => panic!("bad edge kind {k}"),
            };
            let (a, b) = parts[1].split_once('>').unwrap();
            let (fa, fb) = parts[2].split_once('/').unwrap();
            let mut e = Edge::new(self.node(a), self.node(b), kind);
            e.at_from = att(fa);
            e.at_to = att(fb);
            e.connection = parts.get(3) == Some(&"conn");
            self.sk.edges.push(e);
        }
        self
    }

    fn regions(mut self, list: &str) -> Fixture {
        for pair in list.split_whitespace() {
            let (a, b) = pair.split_once('>').unwrap();
            let (alpha, omega) = (self.node(a), self.node(b));
            self.sk.regions.push(RegionOrbit { alpha, omega, path: Vec::new() });
        }
        self
    }
}

use PointKind::{Saddle, SaddleNode, StableNode, UnstableNode};

fn fixture(r: u8) -> SeparatrixSkeleton {
    let f = match r {
        1 => Fixture::new(&[("P0", Saddle), ("P1", UnstableNode), ("P2", StableNode)])
            .edges(&[
                "axis V1>P2 -/-",
                "axis P0>P2 s/-",
                "axis P0>U1 s/-",
                "axis V2>P0 -/s",
                "axis P1>P0 -/s",
                "axis P1>U2 -/-",
                "sep U2>P2 -/-",
                "sep V2>V1 -/-",
            ])
            .regions("P1>P2 P1>B0 P1>B22 V2>P2 B-90>U1 B98>P2"),
        2 => Fixture::new(&[("P0", UnstableNode), ("P1", Saddle), ("P2", StableNode)])
            .edges(&[
                "axis V1>P2 -/-",
                "axis P0>P2 -/-",
                "axis P0>U1 -/-",
                "axis V2>P1 -/s",
                "axis P0>P1 -/s",
                "axis P0>U2 -/-",
                "branch P1>U1 s/-",
                "branch P1>P2 s/-",
                "sep U2>P2 -/-",
                "sep V2>V1 -/-",
            ])
            .regions("P0>P2 P0>U1 P0>B28 V2>P2 V2>B-146 B-90>U1 B109>P2"),
        3 => Fixture::new(&[("P0", UnstableNode), ("P1", Saddle), ("P2", StableNode)])
            .edges(&[
                "axis V1>P2 -/-",
                "axis P0>P2 -/-",
                "axis P0>U1 -/-",
                "axis V2>P1 -/s",
                "axis P0>P1 -/s",
                "axis P0>U2 -/-",
                "line P1>U1 s/-",
                "line P1>V1 s/- conn",
                "sep U2>P2 -/-",
            ])
            .regions("P0>P2 P0>U1 P0>B35 V2>B-159 B-77>U1 B160>P2"),
        4 => Fixture::new(&[("P0", UnstableNode), ("P1", Saddle), ("P2", StableNode)])
            .edges(&[
                "axis V1>P2 -/-",
                "axis P0>P2 -/-",
                "axis P0>U1 -/-",
                "axis V2>P1 -/s",
                "axis P0>P1 -/s",
                "axis P0>U2 -/-",
                "branch P1>U1 s/-",
                "branch P1>B-121 s/-",
                "sep U2>P2 -/-",
                "sep P0>V1 -/-",
            ])
            .regions("P0>P2 P0>U1 P0>B41 P0>B-140 V2>B-115 B-74>U1 B162>P2"),
        5 => Fixture::new(&[("P0", UnstableNode), ("P1", Saddle), ("P2", StableNode)])
            .edges(&[
                "axis V1>P2 -/-",
                "axis P0>P2 -/-",
                "axis P0>U1 -/-",
                "axis V2>P1 -/s",
                "axis P0>P1 -/s",
                "axis P0>U2 -/-",
                "branch P1>B-62 s/-",
                "branch P1>P2 s/-",
                "sep U2>U1 -/-",
                "sep P0>V1 -/-",
            ])
            .regions("P0>P2 P0>U1 P0>B-27 P0>B138 V2>B-64 B-118>P2"),
        6 => Fixture::new(&[("P0", SaddleNode), ("P2", StableNode)])
            .edges(&[
                "axis V1>P2 -/-",
                "axis P0>P2 s/-",
                "axis P0>U1 s/-",
                "axis V2>P0 -/s",
                "axis P0>U2 p/-",
                "sep U2>P2 -/-",
                "sep V2>V1 -/-",
            ])
            .regions("P0>P2 P0>B31 V2>P2 V2>B-158 B-87>U1 B144>P2"),
        7 => Fixture::new(&[("P0", SaddleNode), ("P2", StableNode)])
            .edges(&[
                "axis V1>P2 -/-",
                "axis P0>P2 s/-",
                "axis P0>U1 s/-",
                "axis V2>P0 -/s",
                "axis P0>U2 p/-",
                "sep U2>U1 -/-",
                "sep P0>V1 p/-",
            ])
            .regions("P0>P2 P0>U1 P0>B134 V2>B-18 B-109>P2"),
        8 => Fixture::new(&[("P0", Saddle), ("P1", UnstableNode)])
            .edges(&[
                "axis P0>V1 s/-",
                "axis P0>U1 s/-",
                "axis V2>P0 -/s",
                "axis P1>P0 -/s",
                "axis P1>U2 -/-",
                "sep U2>V1 -/-",
            ])
            .regions("P1>U1 P1>V1 P1>B6 V2>V1 V2>B-144 B-87>U1 B116>V1"),
        9 => Fixture::new(&[("P0", UnstableNode), ("P1", Saddle)])
            .edges(&[
                "axis P0>V1 -/-",
                "axis P0>U1 -/-",
                "axis V2>P1 -/s",
                "axis P0>P1 -/s",
                "axis P0>U2 -/-",
                "branch P1>U1 s/-",
                "branch P1>B-131 s/-",
                "sep U2>V1 -/-",
            ])
            .regions("P0>U1 P0>V1 P0>B33 P0>B-159 V2>B-127 B-72>U1"),
        10 => Fixture::new(&[("P0", UnstableNode), ("P1", StableNode)])
            .edges(&[
                "axis P0>V1 -/-",
                "axis P0>U1 -/-",
                "axis V2>P1 -/-",
                "axis P0>P1 -/-",
                "axis P0>U2 -/-",
                "sep U1>P1 -/-",
                "sep V1>U2 -/-",
                "sep P0>V2 -/-",
            ])
            .regions("P0>P1 P0>U2 P0>B59 P0>B-129 B-52>P1 B159>U2"),
        11 => Fixture::new(&[("P0", SaddleNode)])
            .edges(&[
                "axis P0>V1 s/-",
                "axis P0>U1 s/-",
                "axis V2>P0 -/s",
                "axis P0>U2 p/-",
                "sep U2>V1 -/-",
            ])
            .regions("P0>V1 P0>B26 V2>B-174 B-81>U1 B140>V1"),
        12 => Fixture::new(&[("P0", Saddle)])
            .edges(&[
                "axis P0>V1 s/-",
                "axis P0>U1 s/-",
                "axis V2>P0 -/s",
                "axis U2>P0 -/s",
                "sep U2>V1 -/-",
                "sep V2>U1 -/-",
            ])
            .regions("U2>U1 U2>V1 U2>B2 V2>U1 V2>V1 V2>B-178 B-80>U1 B100>V1"),
        13 => Fixture::new(&[("P0", UnstableNode)])
            .edges(&[
                "axis P0>V1 -/-",
                "axis P0>U1 -/-",
                "axis P0>V2 -/-",
                "axis P0>U2 -/-",
                "sep U1>V2 -/-",
                "sep V1>U2 -/-",
            ])
            .regions("P0>U2 P0>V2 P0>B62 P0>B-118 B-36>V2 B144>U2"),
        _ => unreachable!(),
    };
    f.sk
}

#[test]
fn every_class_fixture_decodes_to_its_class() {
    for r in 1..=13 {
        let v = compute_invariants(&fixture(r)).unwrap();
        assert_eq!(class_from_invariants(&v), Some(RClass(r)), "fixture R{r}: {v:?}");
        assert_eq!(mask(&v, RClass(r)), class_invariants(RClass(r)), "fixture R{r}");
    }
}

#[test]
fn fixtures_are_pairwise_distinguished() {
    let vs: Vec<_> = (1..=13).map(|r| compute_invariants(&fixture(r)).unwrap()).collect();
    for i in 0..13 {
        for j in 0..13 {
            if i != j {
                assert_ne!(mask(&vs[i], RClass(i as u8 + 1)), mask(&vs[j], RClass(i as u8 + 1)), "R{} vs R{}", i + 1, j + 1);
            }
        }
    }
}

#[test]
fn lone_unstable_node() {
    let sk = Fixture::new(&[("P0", UnstableNode)]).sk;
    let v = compute_invariants(&sk).unwrap();
    assert_eq!((v.i1, v.i2, v.i3, v.i4, v.i5, v.i6), (1, 1, Some(0), Some(0), Some(0), Some(0)));
}

#[test]
fn region_orbits_between_origins_do_not_count() {
    let sk = Fixture::new(&[("P0", UnstableNode)]).regions("U2>V1 B10>U1 P0>B40").sk;
    assert_eq!(compute_invariants(&sk).unwrap().i5, Some(0));
    let sk = Fixture::new(&[("P0", UnstableNode)]).regions("P0>U1 P0>U1 V2>P0").sk;
    assert_eq!(compute_invariants(&sk).unwrap().i5, Some(2));
}

#[test]
fn saddle_with_missing_separatrix_is_malformed() {
    let sk = Fixture::new(&[("P0", Saddle)]).edges(&["axis P0>V1 s/-", "axis P0>U1 s/-", "axis V2>P0 -/s"]).sk;
    assert!(matches!(compute_invariants(&sk), Err(Error::MalformedSkeleton(_))));
}

#[test]
fn dangling_edge_is_malformed() {
    let mut sk = Fixture::new(&[("P0", UnstableNode)]).sk;
    sk.edges.push(Edge::new(0, 99, EdgeKind::SaddleBranch));
    assert!(matches!(compute_invariants(&sk), Err(Error::MalformedSkeleton(_))));
}

#[test]
fn closed_orbit_is_malformed() {
    let mut sk = Fixture::new(&[("P0", UnstableNode)]).sk;
    sk.edges.push(Edge::new(1, 1, EdgeKind::OriginSeparatrix));
    assert!(matches!(compute_invariants(&sk), Err(Error::MalformedSkeleton(_))));
}

#[test]
fn unresolved_edges_are_ignored() {
    let mut f = Fixture::new(&[("P0", Saddle), ("P1", StableNode)]).edges(&[
        "axis P0>V1 s/-",
        "axis P0>U1 s/-",
        "axis V2>P0 -/s",
        "branch P0>P1 s/-",
    ]);
    assert_eq!(compute_invariants(&f.sk).unwrap().i3, Some(1));
    f.sk.edges[3].unresolved = true;
    assert_eq!(compute_invariants(&f.sk).unwrap().i3, Some(0));
}
