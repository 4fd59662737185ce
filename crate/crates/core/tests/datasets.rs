use plgb_core::datasets;
use plgb_core::spec::{base_spec, Geometry};

#[test]
fn bundled_datasets_load() {
    for (name, text) in datasets::ALL {
        Geometry::parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn datasets_round_trip_through_serde() {
    for (name, text) in datasets::ALL {
        let g = Geometry::parse(text).unwrap();
        let json = serde_json::to_string(g.spec()).unwrap();
        let again = Geometry::parse(&json).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(g.spec(), again.spec(), "{name}");
    }
}

#[test]
fn hopf_base_spec_reloads() {
    let g = datasets::su2_hopf().unwrap();
    let base = g.induce_base().unwrap();
    let spec = base_spec(&base, None);
    let json = serde_json::to_string_pretty(&spec).unwrap();
    let reloaded = Geometry::parse(&json).unwrap();
    assert_eq!(reloaded.ring().declared(), 3);
    assert_eq!(reloaded.manifold().frame().names(), ["dz", "dzs"]);
}
