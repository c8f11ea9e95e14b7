//! Parse a catalog, then catch the mistakes validation reports.

use std::error::Error;

use guidance::{parse_document, serialization::parse_document_unchecked, serialization::validate_document, Format};

const CATALOG: &str = r#"
catalog:
  metadata:
    title: Asset Management
    version: "1.1"
  controls:
    - id: ID.AM-3
      class: subcategory
      parts:
        - name: statement
          class: outcome
          prose: Organizational communication and data flows are mapped
"#;

const BROKEN: &str = r#"
catalog:
  metadata:
    title: Asset Management
    version: "1.1"
  controls:
    - id: id.am-3
      parts:
        - name: guidance
          prose: Draw the diagrams.
        - name: guidance
          prose: ""
"#;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let doc = parse_document(CATALOG.as_bytes(), Format::Yaml)?;
    let catalog = doc.as_catalog().expect("a catalog");
    // Identifiers are case-insensitive and stored lowercase.
    assert_eq!(catalog.controls[0].id, "id.am-3");
    println!(
        "parsed {} control(s) from {:?}",
        catalog.control_count(),
        catalog.metadata.title
    );

    let doc = parse_document_unchecked(BROKEN.as_bytes(), Format::Yaml)?;
    let report = validate_document(&doc);
    println!("{report}");
    assert_eq!(report.error_count(), 2);

    let err = parse_document(b"catalog:\n  metadata: [\n", Format::Yaml).unwrap_err();
    println!("{err}");
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
