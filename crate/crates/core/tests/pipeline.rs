//! The bundled stack resolved end to end, layer by layer.

use guidance::serialization::serialize_catalog;
use guidance::{
    find_control, load_fixture, parse_document, resolve, resolve_catalogs, resolve_chain, validate_profile, Alteration,
    FixtureCorpus, Format, Part, ResolveError, ResolveOptions, ResolvedCatalog, SourceStore,
};

fn store() -> (tempfile::TempDir, SourceStore) {
    let dir = tempfile::tempdir().unwrap();
    FixtureCorpus.write_to(dir.path()).unwrap();
    let store = SourceStore::new(dir.path());
    (dir, store)
}

fn parts(resolved: &ResolvedCatalog) -> Vec<(String, Option<String>, String)> {
    find_control(&resolved.catalog, "id.am-3")
        .unwrap()
        .parts
        .iter()
        .map(|p| (p.name.clone(), p.class.clone(), p.prose.clone()))
        .collect()
}

#[test]
fn ot_layer_adds_two_parts() {
    let (_dir, store) = store();
    let ot = resolve_chain(&store, "ot-profile.yaml").unwrap();
    let parts = parts(&ot);
    let names: Vec<_> = parts.iter().map(|p| p.0.as_str()).collect();
    assert_eq!(names, ["statement", "guidance", "ot-specific"]);
    assert_eq!(parts[1].1.as_deref(), Some("supplemental-guidance"));
    assert_eq!(parts[2].1.as_deref(), Some("OT-specific-guidance"));
    assert!(parts[2]
        .2
        .starts_with("Organizations should consider the impact on OT systems"));
    assert_eq!(ot.depth, 1);
}

#[test]
fn am_layer_replaces_ot_guidance() {
    let (_dir, store) = store();
    let am = resolve_chain(&store, "am-profile.yaml").unwrap();
    let parts = parts(&am);
    let summary: Vec<_> = parts.iter().map(|p| (p.0.as_str(), p.1.as_deref().unwrap())).collect();
    assert_eq!(
        summary,
        [
            ("statement", "outcome"),
            ("guidance", "supplemental-guidance"),
            ("am-specific", "Additive-specific-guidance"),
        ]
    );
    assert_eq!(parts[0].2, "Organizational communication and data flows are mapped");
    assert!(parts[1].2.starts_with("Data flow diagrams enable a manufacturer"));
    assert!(parts[2].2.starts_with("Data flow diagrams for AM processes"));
    assert_eq!(
        am.provenance_of("id.am-3", "guidance").unwrap().origin_uri,
        "ot-profile.yaml"
    );
    assert_eq!(am.provenance_of("id.am-3", "am-specific").unwrap().layer_depth, 2);
    assert_eq!(am.provenance_of("id.am-5", "statement").unwrap().layer_depth, 0);
    assert_eq!(
        am.catalog.metadata.title,
        "Cybersecurity Framework Additive Manufacturing Profile"
    );
    // Controls nobody altered pass through untouched.
    let csf = load_fixture("csf-id-am").unwrap().into_catalog().unwrap();
    assert_eq!(find_control(&am.catalog, "id.am-6"), find_control(&csf, "id.am-6"));
}

#[test]
fn staged_equals_chained() {
    let (_dir, store) = store();
    let csf = load_fixture("csf-id-am").unwrap().into_catalog().unwrap();
    let ot = load_fixture("ot-profile").unwrap().into_profile().unwrap();
    let am = load_fixture("am-profile").unwrap().into_profile().unwrap();
    let c_rot = resolve_catalogs(&[csf], &ot).unwrap();
    let text = serialize_catalog(&c_rot.catalog, Format::Yaml);
    let mut reparsed = parse_document(text.as_bytes(), Format::Yaml)
        .unwrap()
        .into_catalog()
        .unwrap();
    reparsed.uri = "ot-profile.yaml".into();
    let staged = resolve(&[reparsed.into()], &am, &ResolveOptions::default()).unwrap();
    let chained = resolve_chain(&store, "am-profile.yaml").unwrap();
    assert!(staged.catalog.content_eq(&chained.catalog));
}

#[test]
fn removal_on_the_base_catalog_fails() {
    // Applied directly to the CSF catalog the AM profile removes a part that
    // only the OT layer supplies.
    let mut csf = load_fixture("csf-id-am").unwrap().into_catalog().unwrap();
    csf.uri = "ot-profile.yaml".into();
    let am = load_fixture("am-profile").unwrap().into_profile().unwrap();
    let err = resolve_catalogs(&[csf.clone()], &am).unwrap_err();
    assert_eq!(
        err.to_string(),
        "removal matched nothing: control id.am-3, selector by-name ot-specific"
    );
    let lenient = resolve(&[csf.clone().into()], &am, &ResolveOptions::lenient()).unwrap();
    assert_eq!(lenient.warnings.len(), 1);
    let report = validate_profile(&am, &[csf]);
    assert_eq!(report.error_count(), 1, "{report}");
}

#[test]
fn alteration_misuse_is_rejected() {
    let csf = load_fixture("csf-id-am").unwrap().into_catalog().unwrap();
    let mut profile = guidance::Profile::identity("csf-id-am.yaml");
    profile
        .alterations
        .push(Alteration::new("id.am-3").add(vec![Part::new("statement", None, "again")]));
    assert!(matches!(
        resolve_catalogs(std::slice::from_ref(&csf), &profile),
        Err(ResolveError::DuplicatePartName { .. })
    ));
    profile.alterations[0] = Alteration::new("id.am-9").add(vec![Part::new("x", None, "y")]);
    assert!(matches!(
        resolve_catalogs(&[csf], &profile),
        Err(ResolveError::UnknownControlId { .. })
    ));
}
