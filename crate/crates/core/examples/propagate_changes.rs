//! Edit an upstream profile and push the change through every profile that
//! depends on it.

use std::error::Error;

use guidance::{propagate, ChangeKind, FixtureCorpus, SourceStore};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    FixtureCorpus.write_to(dir.path())?;

    // First pass records a baseline under resolved/.
    let store = SourceStore::new(dir.path());
    for outcome in propagate(&store, "csf-id-am.yaml")? {
        let done = outcome.result?;
        println!(
            "{} -> {} (initial: {})",
            outcome.profile_uri, done.persisted_uri, done.initial
        );
    }

    let path = dir.path().join("ot-profile.yaml");
    let text = std::fs::read_to_string(&path)?;
    std::fs::write(
        &path,
        text.replace("Documenting data flows", "Keeping data flow records"),
    )?;

    let store = SourceStore::new(dir.path());
    for outcome in propagate(&store, "ot-profile.yaml")? {
        let done = outcome.result?;
        println!("{}: {} change(s)", outcome.profile_uri, done.changes.len());
        for entry in done.changes.iter() {
            assert_eq!(entry.kind, ChangeKind::PartModified);
            assert_eq!(entry.part_name.as_deref(), Some("guidance"));
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
