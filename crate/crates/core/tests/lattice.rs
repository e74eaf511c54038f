//! Lattice geometry beyond the unit tests: large heavy-hex patches, stripes
//! and coupling-map files.

use std::collections::BTreeSet;

use qp_floquet::lattice::{build_chain, build_heavy_hex, Color, CouplingMapFile, QpFieldParams};

#[test]
fn seven_by_three_patch_has_processor_scale_counts() {
    let hex = build_heavy_hex(7, 3).unwrap();
    assert_eq!(hex.num_qubits, 144);
    assert_eq!(hex.edges.len(), 164);
    let sizes: Vec<usize> = hex.color_classes().values().map(Vec::len).collect();
    assert_eq!(sizes, vec![54, 55, 55]);
    let max_degree = (0..hex.num_qubits).map(|q| hex.edges.iter().filter(|e| e.a == q || e.b == q).count()).max();
    assert_eq!(max_degree, Some(3));
}

#[test]
fn stripes_are_paths_covering_every_qubit() {
    let hex = build_heavy_hex(3, 2).unwrap();
    let adjacent: BTreeSet<(usize, usize)> = hex.edges.iter().map(|e| e.pair()).collect();
    for color in [Color::Red, Color::Green, Color::Blue] {
        let members = hex.stripe_members(color);
        let unique: BTreeSet<usize> = members.iter().copied().collect();
        assert_eq!(unique.len(), members.len(), "{color:?} stripes overlap");
        for stripe in &hex.stripes[&color] {
            for w in stripe.windows(2) {
                assert!(adjacent.contains(&(w[0].min(w[1]), w[0].max(w[1]))), "{color:?} stripe is not a path");
            }
        }
    }
    let covered: BTreeSet<usize> = [Color::Red, Color::Green, Color::Blue].iter().flat_map(|&c| hex.stripe_members(c)).collect();
    assert_eq!(covered.len(), hex.num_qubits);
}

#[test]
fn stripe_fields_follow_intra_stripe_position() {
    let hex = build_heavy_hex(2, 2).unwrap();
    let params = QpFieldParams::new(3.0).with_omega0(0.4);
    let with_fields = hex.assign_qp_fields(&params);
    for (color, stripes) in &hex.stripes {
        for stripe in stripes {
            for (p, &q) in stripe.iter().enumerate() {
                assert!((with_fields.fields[color][q] - params.field_at(p)).abs() < 1e-15);
            }
        }
    }
    let chain = build_chain(9).unwrap().assign_qp_fields(&params);
    for (j, h) in chain.total_fields().iter().enumerate() {
        assert!((h - params.field_at(j)).abs() < 1e-15);
    }
}

#[test]
fn coupling_map_file_round_trips_through_disk() {
    let hex = build_heavy_hex(1, 2).unwrap();
    let file = CouplingMapFile { edges: hex.edges.iter().map(|e| e.pair()).collect(), coloring: Some(hex.edges.clone()) };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.json");
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let loaded = CouplingMapFile::read(&path).unwrap().to_lattice().unwrap();
    assert_eq!(loaded.color_classes(), hex.color_classes());
    assert!(!loaded.degenerate_stripes);
    let uncolored = CouplingMapFile { edges: file.edges.clone(), coloring: None }.to_lattice().unwrap();
    for class in uncolored.color_classes().values() {
        let mut seen = BTreeSet::new();
        assert!(class.iter().all(|&(a, b)| seen.insert(a) && seen.insert(b)));
    }
}
