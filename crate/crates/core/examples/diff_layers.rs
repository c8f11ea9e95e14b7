//! Compare the OT and AM resolutions of the fixture stack.

use std::error::Error;

use guidance::{diff, resolve_chain, ChangeKind, FixtureCorpus, SourceStore};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    FixtureCorpus.write_to(dir.path())?;
    let store = SourceStore::new(dir.path());
    let ot = resolve_chain(&store, "ot-profile.yaml")?;
    let am = resolve_chain(&store, "am-profile.yaml")?;

    let changes = diff(&ot.catalog, &am.catalog);
    print!("{}", changes.to_text());

    let parts: Vec<_> = changes
        .iter()
        .filter(|e| e.kind.is_part_level())
        .map(|e| (e.kind, e.part_name.as_deref().unwrap_or_default()))
        .collect();
    assert!(parts.contains(&(ChangeKind::PartRemoved, "ot-specific")));
    assert!(parts.contains(&(ChangeKind::PartAdded, "am-specific")));
    assert!(diff(&am.catalog, &am.catalog).is_empty());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
