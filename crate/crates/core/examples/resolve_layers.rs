//! Resolve the bundled three-layer stack and inspect where each part of
//! ID.AM-3 came from.

use std::error::Error;

use guidance::{find_control, resolve_chain, FixtureCorpus, SourceStore};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    FixtureCorpus.write_to(dir.path())?;
    let store = SourceStore::new(dir.path());

    let resolved = resolve_chain(&store, "am-profile.yaml")?;
    println!("lineage: {}", resolved.lineage.join(" > "));

    let am3 = find_control(&resolved.catalog, "id.am-3").expect("id.am-3 is imported");
    for part in &am3.parts {
        let origin = resolved
            .provenance_of(&am3.id, &part.name)
            .expect("every part has provenance");
        println!("{:12} layer {} ({})", part.name, origin.layer_depth, origin.origin_uri);
    }
    assert_eq!(am3.part_names(), ["statement", "guidance", "am-specific"]);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
