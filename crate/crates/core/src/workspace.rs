//! A registry of named entities loaded from TOML files.
//!
//! Every file starts with `schema_version = 1` and may hold arrays of
//! tables named `group`, `hom`, `extension`, `tower`, `ext_tower`, `scheme`,
//! `module`, `postnikov` and `space`. Entities may refer to ids defined in
//! any loaded file. All constructor invariants are checked at load time.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::catalog;
use crate::cohomology::GModule;
use crate::error::Error;
use crate::etale::GSetScheme;
use crate::group::{Elem, Extension, FiniteGroup, GroupHom, GroupTower};
use crate::postnikov::{two_stage_corpus, PostnikovTower};
use crate::sections::ExtensionTower;
use crate::simplicial::TruncatedSimplicialSet;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WorkspaceError {
    Io { path: PathBuf, message: String },
    Schema { file: PathBuf, line: usize, field: String, message: String },
    Invariant { file: PathBuf, line: usize, id: String, error: Error },
}

impl fmt::Display for WorkspaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorkspaceError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            WorkspaceError::Schema { file, line, field, message } => {
                write!(f, "schema error at {}:{line}, field `{field}`: {message}", file.display())
            }
            WorkspaceError::Invariant { file, line, id, error } => {
                write!(f, "invariant error at {}:{line} in `{id}`: {error}", file.display())
            }
        }
    }
}

impl std::error::Error for WorkspaceError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    schema_version: u32,
    #[serde(default)]
    group: Vec<GroupEntry>,
    #[serde(default)]
    hom: Vec<HomEntry>,
    #[serde(default)]
    extension: Vec<ExtensionEntry>,
    #[serde(default)]
    tower: Vec<TowerEntry>,
    #[serde(default)]
    ext_tower: Vec<ExtTowerEntry>,
    #[serde(default)]
    scheme: Vec<SchemeEntry>,
    #[serde(default)]
    module: Vec<ModuleEntry>,
    #[serde(default)]
    postnikov: Vec<PostnikovEntry>,
    #[serde(default)]
    space: Vec<SpaceEntry>,
}

#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct GroupEntry {
    id: String,
    builtin: Option<String>,
    order: Option<usize>,
    mul: Option<Vec<Vec<usize>>>,
}

#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct HomEntry {
    id: String,
    source: String,
    target: String,
    images: Vec<usize>,
}

#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct ExtensionEntry {
    id: String,
    builtin: Option<String>,
    projection: Option<String>,
    inclusion: Option<String>,
}

#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct TowerEntry {
    id: String,
    levels: Vec<String>,
    #[serde(default)]
    transitions: Vec<String>,
}

#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct ExtTowerEntry {
    id: String,
    levels: Vec<String>,
    #[serde(default)]
    pi_transitions: Vec<String>,
    #[serde(default)]
    g_transitions: Vec<String>,
}

#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct SchemeEntry {
    id: String,
    tower: Option<String>,
    kind: String,
    points: Option<usize>,
    level: Option<usize>,
    action: Option<Vec<Vec<usize>>>,
    parts: Option<Vec<String>>,
}

#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct ModuleEntry {
    id: String,
    group: Option<String>,
    module: Option<String>,
    action: Option<Vec<Vec<usize>>>,
    extension: Option<String>,
}

#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct PostnikovEntry {
    id: String,
    builtin: Option<String>,
    pi1: Option<String>,
    gamma: Option<String>,
    pi2: Option<String>,
    action: Option<Vec<Vec<usize>>>,
}

#[derive(Deserialize, Clone)]
struct SpaceEntry {
    id: String,
    #[serde(flatten)]
    space: TruncatedSimplicialSet,
}

/// Data for a two-stage Postnikov tower, assembled on demand at a chosen
/// truncation dimension.
#[derive(Clone, Debug)]
pub struct PostnikovData {
    pub pi1: FiniteGroup,
    pub gamma: GroupHom,
    pub pi2: FiniteGroup,
    pub action: Vec<Vec<Elem>>,
}

impl PostnikovData {
    pub fn assemble(&self, trunc_dim: usize) -> crate::Result<PostnikovTower> {
        crate::postnikov::TowerSpec {
            name: "",
            pi1: self.pi1.clone(),
            gamma: self.gamma.clone(),
            pi2: self.pi2.clone(),
            action: self.action.clone(),
        }
        .assemble(trunc_dim)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub groups: BTreeMap<String, FiniteGroup>,
    pub homs: BTreeMap<String, GroupHom>,
    pub extensions: BTreeMap<String, Extension>,
    pub towers: BTreeMap<String, GroupTower>,
    pub ext_towers: BTreeMap<String, ExtensionTower>,
    pub schemes: BTreeMap<String, GSetScheme>,
    pub modules: BTreeMap<String, GModule>,
    pub postnikov: BTreeMap<String, PostnikovData>,
    pub spaces: BTreeMap<String, TruncatedSimplicialSet>,
}

struct Source {
    path: PathBuf,
    text: String,
}

impl Source {
    /// The line of `id = "<id>"`, or 1.
    fn line_of(&self, id: &str) -> usize {
        let needle = format!("\"{id}\"");
        self.text
            .lines()
            .position(|l| {
                let l = l.trim_start();
                l.starts_with("id") && l.contains(&needle)
            })
            .map_or(1, |i| i + 1)
    }

    fn schema(&self, id: &str, field: &str, message: impl Into<String>) -> WorkspaceError {
        WorkspaceError::Schema { file: self.path.clone(), line: self.line_of(id), field: field.into(), message: message.into() }
    }

    fn invariant(&self, id: &str, error: Error) -> WorkspaceError {
        WorkspaceError::Invariant { file: self.path.clone(), line: self.line_of(id), id: id.into(), error }
    }
}

type WResult<T> = std::result::Result<T, WorkspaceError>;

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, src: &Source, owner: &str, field: &str, id: &str) -> WResult<&'a T> {
    map.get(id).ok_or_else(|| src.schema(owner, field, format!("unknown id `{id}`")))
}

fn insert<T>(map: &mut BTreeMap<String, T>, src: &Source, id: &str, value: T) -> WResult<()> {
    if map.insert(id.to_string(), value).is_some() {
        return Err(src.schema(id, "id", format!("duplicate id `{id}`")));
    }
    Ok(())
}

impl Workspace {
    /// Loads files, or every `.toml` file of a directory in name order.
    pub fn load<P: AsRef<Path>>(paths: &[P]) -> WResult<Self> {
        let mut files = Vec::new();
        for p in paths {
            let p = p.as_ref();
            if p.is_dir() {
                let mut entries: Vec<PathBuf> = std::fs::read_dir(p)
                    .map_err(|e| WorkspaceError::Io { path: p.to_path_buf(), message: e.to_string() })?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|e| e.extension().is_some_and(|x| x == "toml"))
                    .collect();
                entries.sort();
                files.extend(entries);
            } else {
                files.push(p.to_path_buf());
            }
        }
        let mut sources = Vec::new();
        for path in files {
            let text = std::fs::read_to_string(&path).map_err(|e| WorkspaceError::Io { path: path.clone(), message: e.to_string() })?;
            sources.push(Source { path, text });
        }
        Self::from_sources(sources)
    }

    /// Loads a single document held in memory; `name` is used in errors.
    pub fn from_str(name: &str, text: &str) -> WResult<Self> {
        Self::from_sources(vec![Source { path: PathBuf::from(name), text: text.to_string() }])
    }

    fn from_sources(sources: Vec<Source>) -> WResult<Self> {
        let mut docs = Vec::new();
        for src in &sources {
            let doc: Document = toml::from_str(&src.text).map_err(|e| {
                let line = e.span().map_or(1, |s| src.text[..s.start].matches('\n').count() + 1);
                WorkspaceError::Schema {
                    file: src.path.clone(),
                    line,
                    field: e.message().split('`').nth(1).unwrap_or("document").to_string(),
                    message: e.message().to_string(),
                }
            })?;
            if doc.schema_version != SCHEMA_VERSION {
                return Err(WorkspaceError::Schema {
                    file: src.path.clone(),
                    line: 1,
                    field: "schema_version".into(),
                    message: format!("expected {SCHEMA_VERSION}, got {}", doc.schema_version),
                });
            }
            docs.push(doc);
        }
        let mut ws = Workspace::default();
        let all = || sources.iter().zip(&docs);
        for (src, doc) in all() {
            for e in &doc.group {
                let g = ws.build_group(src, e)?;
                insert(&mut ws.groups, src, &e.id, g)?;
            }
        }
        for (src, doc) in all() {
            for e in &doc.hom {
                let s = lookup(&ws.groups, src, &e.id, "source", &e.source)?;
                let t = lookup(&ws.groups, src, &e.id, "target", &e.target)?;
                let h = GroupHom::new(s.clone(), t.clone(), e.images.clone()).map_err(|err| src.invariant(&e.id, err))?;
                insert(&mut ws.homs, src, &e.id, h)?;
            }
        }
        for (src, doc) in all() {
            for e in &doc.extension {
                let x = ws.build_extension(src, e)?;
                insert(&mut ws.extensions, src, &e.id, x)?;
            }
        }
        for (src, doc) in all() {
            for e in &doc.tower {
                let levels = e
                    .levels
                    .iter()
                    .map(|l| lookup(&ws.groups, src, &e.id, "levels", l).cloned())
                    .collect::<WResult<Vec<_>>>()?;
                let trans = e
                    .transitions
                    .iter()
                    .map(|h| lookup(&ws.homs, src, &e.id, "transitions", h).cloned())
                    .collect::<WResult<Vec<_>>>()?;
                let t = GroupTower::new(levels, trans).map_err(|err| src.invariant(&e.id, err))?;
                insert(&mut ws.towers, src, &e.id, t)?;
            }
        }
        for (src, doc) in all() {
            for e in &doc.ext_tower {
                let levels = e
                    .levels
                    .iter()
                    .map(|l| lookup(&ws.extensions, src, &e.id, "levels", l).cloned())
                    .collect::<WResult<Vec<_>>>()?;
                let homs = |ids: &[String], field: &str| {
                    ids.iter().map(|h| lookup(&ws.homs, src, &e.id, field, h).cloned()).collect::<WResult<Vec<_>>>()
                };
                let t = ExtensionTower::new(levels, homs(&e.pi_transitions, "pi_transitions")?, homs(&e.g_transitions, "g_transitions")?)
                    .map_err(|err| src.invariant(&e.id, err))?;
                insert(&mut ws.ext_towers, src, &e.id, t)?;
            }
        }
        // Schemes may be unions of earlier schemes, so resolve in file order.
        for (src, doc) in all() {
            for e in &doc.scheme {
                let s = ws.build_scheme(src, e)?;
                insert(&mut ws.schemes, src, &e.id, s)?;
            }
        }
        for (src, doc) in all() {
            for e in &doc.module {
                let m = ws.build_module(src, e)?;
                insert(&mut ws.modules, src, &e.id, m)?;
            }
        }
        for (src, doc) in all() {
            for e in &doc.postnikov {
                let p = ws.build_postnikov(src, e)?;
                insert(&mut ws.postnikov, src, &e.id, p)?;
            }
        }
        for (src, doc) in all() {
            for e in &doc.space {
                insert(&mut ws.spaces, src, &e.id, e.space.clone())?;
            }
        }
        Ok(ws)
    }

    fn build_group(&self, src: &Source, e: &GroupEntry) -> WResult<FiniteGroup> {
        match (&e.builtin, &e.mul) {
            (Some(name), None) => {
                let g = catalog::builtin(name).ok_or_else(|| src.schema(&e.id, "builtin", format!("unknown group `{name}`")))?;
                if let Some(n) = e.order.filter(|&n| n != g.order()) {
                    return Err(src.invariant(&e.id, Error::Malformed(format!("`{name}` has order {}, not {n}", g.order()))));
                }
                Ok(g)
            }
            (None, Some(mul)) => {
                if let Some(n) = e.order.filter(|&n| n != mul.len()) {
                    return Err(src.invariant(&e.id, Error::Malformed(format!("table has {} rows, order says {n}", mul.len()))));
                }
                FiniteGroup::from_table(mul.clone()).map_err(|err| src.invariant(&e.id, err))
            }
            _ => Err(src.schema(&e.id, "builtin", "exactly one of `builtin` and `mul` is required")),
        }
    }

    fn build_extension(&self, src: &Source, e: &ExtensionEntry) -> WResult<Extension> {
        match (&e.builtin, &e.projection) {
            (Some(name), None) => {
                catalog::corpus_extension(name).ok_or_else(|| src.schema(&e.id, "builtin", format!("unknown extension `{name}`")))
            }
            (None, Some(p)) => {
                let proj = lookup(&self.homs, src, &e.id, "projection", p)?.clone();
                match &e.inclusion {
                    None => Extension::from_projection(proj),
                    Some(i) => {
                        let inc = lookup(&self.homs, src, &e.id, "inclusion", i)?.clone();
                        Extension::new(
                            inc.source().clone(),
                            proj.source().clone(),
                            proj.target().clone(),
                            inc,
                            proj,
                        )
                    }
                }
                .map_err(|err| src.invariant(&e.id, err))
            }
            _ => Err(src.schema(&e.id, "projection", "exactly one of `builtin` and `projection` is required")),
        }
    }

    fn build_scheme(&self, src: &Source, e: &SchemeEntry) -> WResult<GSetScheme> {
        let inv = |err| src.invariant(&e.id, err);
        if e.kind == "union" {
            let parts = e.parts.as_ref().ok_or_else(|| src.schema(&e.id, "parts", "a union needs `parts`"))?;
            let mut it = parts.iter().map(|p| lookup(&self.schemes, src, &e.id, "parts", p));
            let first = it.next().ok_or_else(|| src.schema(&e.id, "parts", "a union needs at least one part"))??;
            return it.try_fold(first.clone(), |acc, p| acc.disjoint_union(p?).map_err(inv));
        }
        let tid = e.tower.as_ref().ok_or_else(|| src.schema(&e.id, "tower", "missing tower"))?;
        let tower = lookup(&self.towers, src, &e.id, "tower", tid)?;
        match e.kind.as_str() {
            "spec_k" => Ok(GSetScheme::spec_k(tower)),
            "split" => {
                let n = e.points.ok_or_else(|| src.schema(&e.id, "points", "`split` needs `points`"))?;
                Ok(GSetScheme::split(tower, n))
            }
            "field" => {
                let l = e.level.ok_or_else(|| src.schema(&e.id, "level", "`field` needs `level`"))?;
                GSetScheme::spec_field(tower, l).map_err(inv)
            }
            "action" => {
                let a = e.action.as_ref().ok_or_else(|| src.schema(&e.id, "action", "`action` needs an action table"))?;
                GSetScheme::new(tower.clone(), a.clone()).map_err(inv)
            }
            other => Err(src.schema(&e.id, "kind", format!("unknown scheme kind `{other}`"))),
        }
    }

    fn build_module(&self, src: &Source, e: &ModuleEntry) -> WResult<GModule> {
        let inv = |err| src.invariant(&e.id, err);
        if let Some(x) = &e.extension {
            let ext = lookup(&self.extensions, src, &e.id, "extension", x)?;
            return GModule::from_extension(ext).map_err(inv);
        }
        let g = lookup(&self.groups, src, &e.id, "group", e.group.as_deref().unwrap_or_default())?;
        let m = lookup(&self.groups, src, &e.id, "module", e.module.as_deref().unwrap_or_default())?;
        match &e.action {
            None => GModule::trivial(g, m).map_err(inv),
            Some(a) => GModule::new(g.clone(), m.clone(), a.clone()).map_err(inv),
        }
    }

    fn build_postnikov(&self, src: &Source, e: &PostnikovEntry) -> WResult<PostnikovData> {
        if let Some(name) = &e.builtin {
            let spec = two_stage_corpus()
                .into_iter()
                .find(|s| s.name == name)
                .ok_or_else(|| src.schema(&e.id, "builtin", format!("unknown tower `{name}`")))?;
            return Ok(PostnikovData { pi1: spec.pi1, gamma: spec.gamma, pi2: spec.pi2, action: spec.action });
        }
        let field = |v: &Option<String>, name: &str| -> WResult<String> {
            v.clone().ok_or_else(|| src.schema(&e.id, name, format!("missing `{name}`")))
        };
        let pi1 = lookup(&self.groups, src, &e.id, "pi1", &field(&e.pi1, "pi1")?)?.clone();
        let pi2 = lookup(&self.groups, src, &e.id, "pi2", &field(&e.pi2, "pi2")?)?.clone();
        let gamma = lookup(&self.homs, src, &e.id, "gamma", &field(&e.gamma, "gamma")?)?.clone();
        let action = e.action.clone().unwrap_or_else(|| vec![pi2.elements().collect(); pi1.order()]);
        let stage = crate::postnikov::PostnikovStage { n: 2, pi_n: pi2.clone(), action: action.clone(), k_invariant: crate::postnikov::KInvariant::Trivial };
        stage.check_action(&pi1).map_err(|err| src.invariant(&e.id, err))?;
        if gamma.source() != &pi1 {
            return Err(src.invariant(&e.id, Error::MismatchedSource("gamma does not start at pi1".into())));
        }
        Ok(PostnikovData { pi1, gamma, pi2, action })
    }

    pub fn entity_count(&self) -> usize {
        self.groups.len()
            + self.homs.len()
            + self.extensions.len()
            + self.towers.len()
            + self.ext_towers.len()
            + self.schemes.len()
            + self.modules.len()
            + self.postnikov.len()
            + self.spaces.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
schema_version = 1

[[group]]
id = "z2"
order = 2
mul = [[0, 1], [1, 0]]

[[group]]
id = "z4"
builtin = "Z4"

[[group]]
id = "one"
builtin = "trivial"

[[hom]]
id = "z4_to_z2"
source = "z4"
target = "z2"
images = [0, 1, 0, 1]

[[hom]]
id = "z2_to_one"
source = "z2"
target = "one"
images = [0, 0]

[[extension]]
id = "z4_over_z2"
projection = "z4_to_z2"

[[extension]]
id = "q8"
builtin = "Q8/<i>"

[[tower]]
id = "quadratic"
levels = ["one", "z2"]
transitions = ["z2_to_one"]

[[scheme]]
id = "two_points"
tower = "quadratic"
kind = "split"
points = 2

[[scheme]]
id = "spec_l"
tower = "quadratic"
kind = "field"
level = 1

[[scheme]]
id = "mixed"
kind = "union"
parts = ["two_points", "spec_l"]

[[module]]
id = "z2_trivial"
group = "z2"
module = "z2"

[[postnikov]]
id = "p1"
builtin = "Z2 with Z3, inversion"
"#;

    #[test]
    fn loads_sample() {
        let ws = Workspace::from_str("sample.toml", SAMPLE).unwrap();
        assert_eq!(ws.entity_count(), 3 + 2 + 2 + 1 + 3 + 1 + 1);
        assert_eq!(ws.schemes["mixed"].points(), 4);
        assert_eq!(ws.schemes["mixed"].rational_points(), &[0, 1]);
        assert_eq!(ws.extensions["z4_over_z2"].kernel().order(), 2);
    }

    #[test]
    fn broken_associativity_names_triple() {
        let text = "schema_version = 1\n[[group]]\nid = \"bad\"\nmul = [[0,1,2],[1,0,0],[2,2,1]]\n";
        match Workspace::from_str("bad.toml", text) {
            Err(WorkspaceError::Invariant { line, id, error, .. }) => {
                assert_eq!((line, id.as_str()), (3, "bad"));
                assert!(matches!(error, Error::NotAssociative(..) | Error::Malformed(_) | Error::NoInverse(_)), "{error:?}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dangling_reference_is_schema_error() {
        let text = "schema_version = 1\n[[hom]]\nid = \"h\"\nsource = \"nope\"\ntarget = \"nope\"\nimages = []\n";
        match Workspace::from_str("d.toml", text) {
            Err(WorkspaceError::Schema { field, line, .. }) => assert_eq!((field.as_str(), line), ("source", 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_and_version_errors() {
        assert!(matches!(
            Workspace::from_str("v.toml", "schema_version = 2\n"),
            Err(WorkspaceError::Schema { field, .. }) if field == "schema_version"
        ));
        match Workspace::from_str("s.toml", "schema_version = 1\n[[group]]\nid = \"a\"\ncolour = 3\n") {
            Err(WorkspaceError::Schema { line, .. }) => assert!(line >= 2),
            other => panic!("{other:?}"),
        }
        let dup = "schema_version = 1\n[[group]]\nid = \"a\"\nbuiltin = \"Z2\"\n[[group]]\nid = \"a\"\nbuiltin = \"Z3\"\n";
        assert!(matches!(Workspace::from_str("dup.toml", dup), Err(WorkspaceError::Schema { field, .. }) if field == "id"));
    }

    #[test]
    fn loads_space_table() {
        let text = r#"
schema_version = 1
[[space]]
id = "pt"
trunc_dim = 1
counts = [1, 1]
faces = [[[0], [0]]]
degeneracies = [[[0]]]
basepoint = 0
"#;
        let ws = Workspace::from_str("space.toml", text).unwrap();
        assert_eq!(ws.spaces["pt"].counts(), &[1, 1]);
    }
}
