//! Resolve one layer at a time: persist the OT resolution, reload it, and
//! apply the AM profile on top. The result matches resolving the whole chain.

use std::error::Error;

use guidance::serialization::serialize_catalog;
use guidance::{
    load_fixture, parse_document, resolve, resolve_catalogs, resolve_chain, FixtureCorpus, Format, ResolveOptions,
    ResolvedCatalog, SourceStore,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let csf = load_fixture("csf-id-am")?.into_catalog().expect("a catalog");
    let ot = load_fixture("ot-profile")?.into_profile().expect("a profile");
    let am = load_fixture("am-profile")?.into_profile().expect("a profile");

    let ot_resolved = resolve_catalogs(&[csf], &ot)?;
    let text = serialize_catalog(&ot_resolved.catalog, Format::Yaml);
    let mut reloaded = parse_document(text.as_bytes(), Format::Yaml)?
        .into_catalog()
        .expect("a catalog");
    reloaded.uri = "ot-profile.yaml".into();

    let staged = resolve(
        &[ResolvedCatalog::from_source(reloaded)],
        &am,
        &ResolveOptions::default(),
    )?;

    let dir = tempfile::tempdir()?;
    FixtureCorpus.write_to(dir.path())?;
    let chained = resolve_chain(&SourceStore::new(dir.path()), "am-profile.yaml")?;

    assert!(staged.catalog.content_eq(&chained.catalog));
    println!(
        "staged and chained resolution agree on {} controls",
        staged.catalog.control_count()
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
