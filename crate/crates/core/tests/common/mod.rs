//! Seeded generators for randomized catalogs, profiles and layer chains.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use guidance::{
    resolve_catalogs, Alteration, Catalog, Control, ImportDirective, Include, Metadata, Part, Profile, RemoveDirective,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

const WORDS: &[&str] = &[
    "data",
    "flow",
    "diagrams",
    "OT",
    "networked",
    "components",
    "AM",
    "CAD",
    "geometry",
    "porosity",
    "e.g.,",
    "(in-line",
    "probes)",
    "-",
    "#",
    "key:",
    "value",
    "'quoted'",
    "\"double\"",
    "null",
    "true",
    "123",
    "1.0",
    "~",
    "&anchor",
    "*alias",
    "!tag",
    "%",
    "@",
    "`tick`",
    "ünïcödé",
    "→",
    "[a]",
    "{b}",
    "a: b",
    "c #d",
    "|",
    ">",
    "?",
    "...",
    "---",
];

const CLASSES: &[&str] = &[
    "outcome",
    "subcategory",
    "category",
    "supplemental-guidance",
    "OT-specific-guidance",
    "Additive-specific-guidance",
    "camelCaseClass",
    "x.y_z-1",
];

/// Non-blank text exercising characters that need quoting in YAML.
pub fn prose(rng: &mut Rand) -> String {
    let n = rng.gen_range(1..=24);
    let mut out = String::new();
    for i in 0..n {
        if i > 0 {
            out.push_str(match rng.gen_range(0..20) {
                0 => "\n",
                1 => "  ",
                2 => "\t",
                _ => " ",
            });
        }
        out.push_str(WORDS.choose(rng).unwrap());
    }
    match rng.gen_range(0..12) {
        0 => format!(" {out}"),
        1 => format!("{out} "),
        2 => format!("{out}\n"),
        _ => out,
    }
}

pub fn class(rng: &mut Rand) -> Option<String> {
    rng.gen_bool(0.7).then(|| CLASSES.choose(rng).unwrap().to_string())
}

fn part_name(rng: &mut Rand, taken: &HashSet<String>) -> String {
    const STEMS: &[&str] = &["guidance", "ot-specific", "am-specific", "note", "example", "g.x_1"];
    loop {
        let stem = STEMS.choose(rng).unwrap();
        let name = if rng.gen_bool(0.5) {
            stem.to_string()
        } else {
            format!("{stem}-{}", rng.gen_range(0..100))
        };
        if !taken.contains(&name) {
            return name;
        }
    }
}

pub fn part(rng: &mut Rand, name: String) -> Part {
    Part {
        name,
        class: class(rng),
        prose: prose(rng),
    }
}

/// Fresh lowercase control ids.
pub struct Ids(usize);

impl Ids {
    pub fn new() -> Self {
        Ids(0)
    }

    pub fn next(&mut self, rng: &mut Rand) -> String {
        const PREFIXES: &[&str] = &["id.am-", "pr.ds_", "c", "de.cm-"];
        self.0 += 1;
        format!("{}{}", PREFIXES.choose(rng).unwrap(), self.0)
    }
}

pub fn parts(rng: &mut Rand) -> Vec<Part> {
    let mut out = Vec::new();
    let mut taken = HashSet::new();
    if rng.gen_bool(0.7) {
        taken.insert("statement".to_owned());
        out.push(part(rng, "statement".into()));
    }
    for _ in 0..rng.gen_range(0..4) {
        let name = part_name(rng, &taken);
        taken.insert(name.clone());
        out.push(part(rng, name));
    }
    out
}

pub fn control(rng: &mut Rand, ids: &mut Ids, depth: usize) -> Control {
    let mut c = Control {
        id: ids.next(rng),
        class: class(rng),
        parts: parts(rng),
        children: Vec::new(),
    };
    if depth > 0 {
        for _ in 0..rng.gen_range(0..3) {
            c.children.push(control(rng, ids, depth - 1));
        }
    }
    c
}

pub fn metadata(rng: &mut Rand) -> Metadata {
    let version = match rng.gen_range(0..4) {
        0 => "1.0".to_owned(),
        1 => "2".to_owned(),
        2 => "true".to_owned(),
        _ => prose(rng),
    };
    Metadata::new(prose(rng), version)
}

pub fn catalog(rng: &mut Rand) -> Catalog {
    let mut ids = Ids::new();
    let count = rng.gen_range(0..6);
    let controls = (0..count).map(|_| control(rng, &mut ids, 2)).collect();
    Catalog::new(metadata(rng), controls)
}

fn all_ids(catalog: &Catalog) -> Vec<String> {
    catalog.walk().map(|c| c.id.clone()).collect()
}

/// A document-valid profile; it need not resolve against anything.
pub fn profile(rng: &mut Rand) -> Profile {
    let mut ids = Ids::new();
    let mut pool: Vec<String> = (0..8).map(|_| ids.next(rng)).collect();
    let mut imports = Vec::new();
    for i in 0..rng.gen_range(1..3) {
        pool.shuffle(rng);
        let source = format!("layer-{i}.yaml");
        let mut import = if rng.gen_bool(0.5) {
            ImportDirective::all(source)
        } else {
            ImportDirective::ids(source, pool[..rng.gen_range(1..4)].iter().cloned())
        };
        if rng.gen_bool(0.4) {
            import.exclude = pool[4..rng.gen_range(5..8)].to_vec();
        }
        imports.push(import);
    }
    let mut profile = Profile::new(metadata(rng), imports);
    pool.shuffle(rng);
    for id in pool.iter().take(rng.gen_range(0..3)) {
        let mut alt = Alteration::new(id.clone());
        if rng.gen_bool(0.6) {
            for _ in 0..rng.gen_range(1..3) {
                alt = alt.remove(if rng.gen_bool(0.5) {
                    RemoveDirective::ByName(part_name(rng, &HashSet::new()))
                } else {
                    RemoveDirective::ByClass(CLASSES.choose(rng).unwrap().to_string())
                });
            }
        }
        if alt.removes.is_empty() || rng.gen_bool(0.5) {
            let mut taken = HashSet::from(["statement".to_owned()]);
            let adds = (0..rng.gen_range(1..3))
                .map(|_| {
                    let name = part_name(rng, &taken);
                    taken.insert(name.clone());
                    part(rng, name)
                })
                .collect();
            alt = alt.add(adds);
        }
        profile.alterations.push(alt);
    }
    profile
}

/// Alterations that resolve cleanly against `base`: removals target
/// distinct existing parts, additions use fresh names.
fn alterations_for(rng: &mut Rand, base: &Catalog) -> Vec<Alteration> {
    let mut controls: Vec<&Control> = base.walk().collect();
    controls.shuffle(rng);
    let mut out = Vec::new();
    for control in controls.into_iter().take(rng.gen_range(0..4)) {
        let mut alt = Alteration::new(control.id.clone());
        let mut targets: Vec<&Part> = control.parts.iter().collect();
        targets.shuffle(rng);
        for p in targets.into_iter().take(rng.gen_range(0..3)) {
            let class_unique = p.class.as_ref().is_some_and(|c| {
                control
                    .parts
                    .iter()
                    .filter(|q| q.class.as_ref().is_some_and(|d| d.eq_ignore_ascii_case(c)))
                    .count()
                    == 1
            });
            alt = alt.remove(if class_unique && rng.gen_bool(0.3) {
                RemoveDirective::ByClass(p.class.clone().unwrap())
            } else {
                RemoveDirective::ByName(p.name.clone())
            });
        }
        if alt.removes.is_empty() || rng.gen_bool(0.6) {
            let mut taken: HashSet<String> = control.parts.iter().map(|p| p.name.clone()).collect();
            taken.insert("statement".to_owned());
            let adds = (0..rng.gen_range(1..3))
                .map(|_| {
                    let name = part_name(rng, &taken);
                    taken.insert(name.clone());
                    part(rng, name)
                })
                .collect();
            alt = alt.add(adds);
        }
        out.push(alt);
    }
    out
}

/// A profile layered over `base` (stored at `source`) that resolves cleanly.
pub fn layer(rng: &mut Rand, source: &str, base: &Catalog) -> Profile {
    let ids = all_ids(base);
    let mut import = ImportDirective::all(source);
    if !ids.is_empty() && rng.gen_bool(0.3) {
        let mut pick = ids.clone();
        pick.shuffle(rng);
        import.include = Include::Ids(pick[..rng.gen_range(1..=pick.len())].to_vec());
    }
    if ids.len() > 1 && rng.gen_bool(0.3) {
        let chosen = match &import.include {
            Include::Ids(list) => list.clone(),
            Include::All => Vec::new(),
        };
        let candidates: Vec<_> = ids.iter().filter(|id| !chosen.contains(id)).cloned().collect();
        if let Some(id) = candidates.choose(rng) {
            import.exclude = vec![id.clone()];
        }
    }
    let mut profile = Profile::new(metadata(rng), vec![import]);
    let mut selected = base.clone();
    selected.uri = source.to_owned();
    let selected = resolve_catalogs(&[selected], &profile).expect("selection alone resolves");
    profile.alterations = alterations_for(rng, &selected.catalog);
    profile
}

/// Catalog plus two profiles: c.yaml <- p1.yaml <- p2.yaml.
pub struct Chain {
    pub catalog: Catalog,
    pub p1: Profile,
    pub p2: Profile,
}

pub fn chain(rng: &mut Rand) -> Chain {
    let mut catalog = catalog(rng);
    catalog.uri = "c.yaml".into();
    let p1 = layer(rng, "c.yaml", &catalog);
    let mut r1 = resolve_catalogs(&[catalog.clone()], &p1)
        .expect("generated layer resolves")
        .catalog;
    r1.uri = "p1.yaml".into();
    let p2 = layer(rng, "p1.yaml", &r1);
    Chain { catalog, p1, p2 }
}

/// Applies 0..4 edits that never reorder surviving controls or parts.
pub fn mutate(rng: &mut Rand, base: &Catalog) -> Catalog {
    let mut out = base.clone();
    let mut ids = Ids(10_000);
    for _ in 0..rng.gen_range(0..4) {
        let flat: Vec<String> = all_ids(&out);
        match rng.gen_range(0..7) {
            0 => out.metadata.title = prose(rng),
            1 | 2 => {
                let Some(id) = flat.choose(rng) else { continue };
                let c = find_mut(&mut out.controls, id).unwrap();
                if c.parts.is_empty() {
                    continue;
                }
                let i = rng.gen_range(0..c.parts.len());
                let p = &mut c.parts[i];
                if rng.gen_bool(0.7) {
                    p.prose = edit_one_char(rng, &p.prose);
                } else {
                    p.class = class(rng);
                }
            }
            3 => {
                let Some(id) = flat.choose(rng) else { continue };
                let c = find_mut(&mut out.controls, id).unwrap();
                if !c.parts.is_empty() {
                    let i = rng.gen_range(0..c.parts.len());
                    c.parts.remove(i);
                }
            }
            4 => {
                let Some(id) = flat.choose(rng) else { continue };
                let c = find_mut(&mut out.controls, id).unwrap();
                let mut taken: HashSet<String> = c.parts.iter().map(|p| p.name.clone()).collect();
                taken.insert("statement".to_owned());
                let name = part_name(rng, &taken);
                c.parts.push(part(rng, name));
            }
            5 => {
                let Some(id) = flat.choose(rng) else { continue };
                remove_control(&mut out.controls, id);
            }
            _ => {
                let fresh = control(rng, &mut ids, 1);
                match flat.choose(rng) {
                    Some(id) if rng.gen_bool(0.5) => find_mut(&mut out.controls, id).unwrap().children.push(fresh),
                    _ => out.controls.push(fresh),
                }
            }
        }
    }
    out
}

/// Replaces one character with a different one, keeping the text non-blank.
pub fn edit_one_char(rng: &mut Rand, text: &str) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    let i = rng.gen_range(0..chars.len());
    chars[i] = if chars[i] == 'x' { 'y' } else { 'x' };
    chars.into_iter().collect()
}

fn find_mut<'a>(controls: &'a mut [Control], id: &str) -> Option<&'a mut Control> {
    for c in controls {
        if c.id == id {
            return Some(c);
        }
        if let Some(found) = find_mut(&mut c.children, id) {
            return Some(found);
        }
    }
    None
}

fn remove_control(controls: &mut Vec<Control>, id: &str) -> bool {
    if let Some(i) = controls.iter().position(|c| c.id == id) {
        controls.remove(i);
        return true;
    }
    controls.iter_mut().any(|c| remove_control(&mut c.children, id))
}

/// (control id, part name) -> (prose, class) over the whole tree.
pub type PartTable = BTreeMap<(String, String), (String, Option<String>)>;

pub fn part_table(catalog: &Catalog) -> PartTable {
    catalog
        .walk()
        .flat_map(|c| {
            c.parts
                .iter()
                .map(move |p| ((c.id.clone(), p.name.clone()), (p.prose.clone(), p.class.clone())))
        })
        .collect()
}
