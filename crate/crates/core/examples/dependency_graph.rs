//! Build the import graph of a store and list the profiles affected by an
//! edit to the base catalog.

use std::error::Error;

use guidance::{build_graph, FixtureCorpus, SourceStore};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    FixtureCorpus.write_to(dir.path())?;
    let graph = build_graph(&SourceStore::new(dir.path()))?;

    print!("{}", graph.to_text());
    let order = graph.topological_order()?;
    println!("resolution order: {}", order.join(", "));
    let affected: Vec<_> = graph.dependents("csf-id-am.yaml").into_iter().collect();
    println!("affected by csf-id-am.yaml: {}", affected.join(", "));
    assert_eq!(order, ["csf-id-am.yaml", "ot-profile.yaml", "am-profile.yaml"]);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
