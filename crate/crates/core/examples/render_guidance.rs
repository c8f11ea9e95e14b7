//! Render the AM resolution as Markdown, with layer footnotes.

use std::error::Error;

use guidance::{render_markdown, resolve_chain, FixtureCorpus, RenderOptions, SourceStore};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    FixtureCorpus.write_to(dir.path())?;
    let resolved = resolve_chain(&SourceStore::new(dir.path()), "am-profile.yaml")?;

    let text = render_markdown(&resolved, &RenderOptions::default().with_provenance(true));
    print!("{text}");
    assert!(text.contains("#### Additive-specific Guidance"));
    assert!(text.contains("ID.AM-3/am-specific from am-profile.yaml (layer 2)"));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
