//! Project files: JSON schema, loading with JSON-pointer error paths, and
//! canonical saving (sorted keys, 17 significant digits).

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::groupoid::{pointer_token, FiniteGroupoid, RawGroupoid};
use crate::kernel::GroupoidKernel;
use crate::linalg::{CMatrix, CVector, C64};
use crate::representation::{
    HaarSide, HaarSystem, HilbertFamily, UnitaryRepresentation, VectorField,
};

pub const FORMAT_VERSION: u32 = 1;

/// A complex number as `[re, im]`.
pub type RawComplex = [f64; 2];
pub type RawMatrix = Vec<Vec<RawComplex>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRepresentation {
    pub id: String,
    pub dims: BTreeMap<String, usize>,
    pub matrices: BTreeMap<String, RawMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawVectorField {
    pub id: String,
    pub values: BTreeMap<String, Vec<RawComplex>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawHaar {
    pub id: String,
    pub side: HaarSide,
    pub weights: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawKernel {
    pub id: String,
    pub values: RawMatrix,
}

/// The on-disk document. Every section but the version is optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectFile {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groupoid: Option<RawGroupoid>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub representations: Vec<RawRepresentation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vector_fields: Vec<RawVectorField>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub haar: Vec<RawHaar>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kernels: Vec<RawKernel>,
}

impl Default for ProjectFile {
    fn default() -> Self {
        Self {
            format_version: FORMAT_VERSION,
            groupoid: None,
            representations: Vec::new(),
            vector_fields: Vec::new(),
            haar: Vec::new(),
            kernels: Vec::new(),
        }
    }
}

fn to_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&pointer_token(key)),
            Segment::Enum { variant } => out.push_str(&pointer_token(variant)),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

impl ProjectFile {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
            path: to_pointer(e.path()),
            message: e.inner().to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_canonical_string(&self) -> Result<String> {
        Ok(canonical_json(&serde_json::to_value(self)?))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_canonical_string()?)?;
        Ok(())
    }
}

/// Re-serializes a document in canonical form.
pub fn canonicalize(text: &str) -> Result<String> {
    ProjectFile::from_json_str(text)?.to_canonical_string()
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

/// Arrays of scalars, or of arrays of scalars, stay on one line.
fn is_inline(items: &[Value]) -> bool {
    items.iter().all(|v| match v {
        Value::Array(inner) => inner.iter().all(is_scalar),
        other => is_scalar(other),
    })
}

/// Pretty JSON with sorted keys and fixed float formatting.
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) if !n.is_f64() => out.push_str(&u.to_string()),
            (_, Some(i)) if !n.is_f64() => out.push_str(&i.to_string()),
            _ => out.push_str(&format_float(n.as_f64().expect("finite number"))),
        },
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if is_inline(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, indent);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                push_indent(out, indent + 2);
                write_value(out, item, indent + 2);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            push_indent(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                push_indent(out, indent + 2);
                let _ = write!(out, "{}: ", Value::String((*k).clone()));
                write_value(out, &map[k.as_str()], indent + 2);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            push_indent(out, indent);
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

fn push_indent(out: &mut String, n: usize) {
    out.extend(std::iter::repeat_n(' ', n));
}

pub fn complex_from_raw(z: RawComplex) -> C64 {
    C64::new(z[0], z[1])
}

pub fn complex_to_raw(z: C64) -> RawComplex {
    [z.re, z.im]
}

pub fn matrix_to_raw(m: &CMatrix) -> RawMatrix {
    m.row_iter()
        .map(|row| row.iter().map(|&z| complex_to_raw(z)).collect())
        .collect()
}

pub fn vector_to_raw(v: &CVector) -> Vec<RawComplex> {
    v.iter().map(|&z| complex_to_raw(z)).collect()
}

fn matrix_from_raw(raw: &RawMatrix, shape: (usize, usize), path: &str) -> Result<CMatrix> {
    let (rows, cols) = shape;
    if raw.len() != rows {
        return Err(Error::Schema {
            path: path.to_string(),
            message: format!("expected {rows} rows, found {}", raw.len()),
        });
    }
    for (i, row) in raw.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Schema {
                path: format!("{path}/{i}"),
                message: format!("expected {cols} entries, found {}", row.len()),
            });
        }
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        complex_from_raw(raw[i][j])
    }))
}

/// Prepends `prefix` to the JSON-pointer path of a structural error.
pub fn prefix_path(err: Error, prefix: &str) -> Error {
    match err {
        Error::UnknownIdentifier { path, id } => Error::UnknownIdentifier {
            path: format!("{prefix}{path}"),
            id,
        },
        Error::DuplicateIdentifier { path, id } => Error::DuplicateIdentifier {
            path: format!("{prefix}{path}"),
            id,
        },
        Error::Schema { path, message } => Error::Schema {
            path: format!("{prefix}{path}"),
            message,
        },
        other => other,
    }
}

/// Resolves a map keyed by identifiers into canonical order, rejecting
/// unknown and missing keys.
fn keyed<'a, T>(map: &'a BTreeMap<String, T>, ids: &[String], path: &str) -> Result<Vec<&'a T>> {
    let known: HashSet<&str> = ids.iter().map(String::as_str).collect();
    if let Some(k) = map.keys().find(|k| !known.contains(k.as_str())) {
        return Err(Error::UnknownIdentifier {
            path: format!("{path}/{}", pointer_token(k)),
            id: k.clone(),
        });
    }
    ids.iter()
        .map(|id| {
            map.get(id).ok_or_else(|| Error::Schema {
                path: path.to_string(),
                message: format!("missing entry for `{id}`"),
            })
        })
        .collect()
}

fn to_keyed<T>(ids: &[String], values: impl IntoIterator<Item = T>) -> BTreeMap<String, T> {
    ids.iter().cloned().zip(values).collect()
}

/// A loaded project with every section resolved against the groupoid.
#[derive(Clone, Debug, Default)]
pub struct Project {
    pub groupoid: Option<Arc<FiniteGroupoid>>,
    pub representations: Vec<(String, UnitaryRepresentation)>,
    pub vector_fields: Vec<(String, VectorField)>,
    pub haar: Vec<(String, HaarSystem)>,
    pub kernels: Vec<(String, GroupoidKernel)>,
}

fn find<'a, T>(items: &'a [(String, T)], id: &str, section: &str) -> Result<&'a T> {
    items
        .iter()
        .find(|(k, _)| k == id)
        .map(|(_, v)| v)
        .ok_or_else(|| Error::UnknownIdentifier {
            path: format!("/{section}"),
            id: id.to_string(),
        })
}

fn upsert<T>(items: &mut Vec<(String, T)>, id: &str, value: T) {
    match items.iter_mut().find(|(k, _)| k == id) {
        Some(slot) => slot.1 = value,
        None => items.push((id.to_string(), value)),
    }
}

fn check_unique<'a>(ids: impl Iterator<Item = &'a str>, section: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for (i, id) in ids.enumerate() {
        if !seen.insert(id) {
            return Err(Error::DuplicateIdentifier {
                path: format!("/{section}/{i}/id"),
                id: id.to_string(),
            });
        }
    }
    Ok(())
}

impl Project {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_file(&ProjectFile::load(path)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_file(&ProjectFile::from_json_str(text)?)
    }

    pub fn with_groupoid(groupoid: Arc<FiniteGroupoid>) -> Self {
        Self {
            groupoid: Some(groupoid),
            ..Self::default()
        }
    }

    pub fn from_file(file: &ProjectFile) -> Result<Self> {
        if file.format_version != FORMAT_VERSION {
            return Err(Error::Schema {
                path: "/format_version".into(),
                message: format!(
                    "unsupported version {}, expected {FORMAT_VERSION}",
                    file.format_version
                ),
            });
        }
        let groupoid = match &file.groupoid {
            Some(raw) => Some(Arc::new(
                FiniteGroupoid::from_raw(raw).map_err(|e| prefix_path(e, "/groupoid"))?,
            )),
            None => None,
        };
        let needs_groupoid = |section: &str| -> Result<&Arc<FiniteGroupoid>> {
            groupoid.as_ref().ok_or_else(|| Error::Schema {
                path: format!("/{section}"),
                message: "requires a groupoid section".into(),
            })
        };
        check_unique(
            file.representations.iter().map(|r| r.id.as_str()),
            "representations",
        )?;
        check_unique(
            file.vector_fields.iter().map(|r| r.id.as_str()),
            "vector_fields",
        )?;
        check_unique(file.haar.iter().map(|r| r.id.as_str()), "haar")?;
        check_unique(file.kernels.iter().map(|r| r.id.as_str()), "kernels")?;

        let mut project = Project {
            groupoid: groupoid.clone(),
            ..Project::default()
        };
        for (i, raw) in file.representations.iter().enumerate() {
            let g = needs_groupoid("representations")?;
            let base = format!("/representations/{i}");
            let dims: Vec<usize> = keyed(&raw.dims, g.point_labels(), &format!("{base}/dims"))?
                .into_iter()
                .copied()
                .collect();
            let family = HilbertFamily::new(dims);
            let mats = keyed(&raw.matrices, g.arrow_labels(), &format!("{base}/matrices"))?;
            let matrices = g
                .arrows()
                .map(|a| {
                    let shape = (family.dim(g.range(a)), family.dim(g.source(a)));
                    let path = format!("{base}/matrices/{}", pointer_token(g.arrow_label(a)));
                    matrix_from_raw(mats[a.0], shape, &path)
                })
                .collect::<Result<Vec<_>>>()?;
            project.representations.push((
                raw.id.clone(),
                UnitaryRepresentation::new(g.clone(), family, matrices)?,
            ));
        }
        for (i, raw) in file.vector_fields.iter().enumerate() {
            let g = needs_groupoid("vector_fields")?;
            let values = keyed(
                &raw.values,
                g.point_labels(),
                &format!("/vector_fields/{i}/values"),
            )?
            .into_iter()
            .map(|v| CVector::from_iterator(v.len(), v.iter().map(|&z| complex_from_raw(z))))
            .collect();
            project
                .vector_fields
                .push((raw.id.clone(), VectorField::new(values)));
        }
        for (i, raw) in file.haar.iter().enumerate() {
            let g = needs_groupoid("haar")?;
            let weights = keyed(
                &raw.weights,
                g.arrow_labels(),
                &format!("/haar/{i}/weights"),
            )?
            .into_iter()
            .copied()
            .collect();
            project.haar.push((
                raw.id.clone(),
                HaarSystem {
                    side: raw.side,
                    weights,
                },
            ));
        }
        for (i, raw) in file.kernels.iter().enumerate() {
            let g = needs_groupoid("kernels")?;
            let n = g.arrow_count();
            let values = matrix_from_raw(&raw.values, (n, n), &format!("/kernels/{i}/values"))?;
            project
                .kernels
                .push((raw.id.clone(), GroupoidKernel::new(g.clone(), values)?));
        }
        Ok(project)
    }

    pub fn to_file(&self) -> ProjectFile {
        let mut file = ProjectFile {
            groupoid: self.groupoid.as_ref().map(|g| g.to_raw()),
            ..ProjectFile::default()
        };
        let Some(g) = &self.groupoid else {
            return file;
        };
        file.representations = self
            .representations
            .iter()
            .map(|(id, rep)| RawRepresentation {
                id: id.clone(),
                dims: to_keyed(g.point_labels(), rep.family().dims().iter().copied()),
                matrices: to_keyed(g.arrow_labels(), rep.matrices().iter().map(matrix_to_raw)),
            })
            .collect();
        file.vector_fields = self
            .vector_fields
            .iter()
            .map(|(id, v)| RawVectorField {
                id: id.clone(),
                values: to_keyed(g.point_labels(), v.values().iter().map(vector_to_raw)),
            })
            .collect();
        file.haar = self
            .haar
            .iter()
            .map(|(id, h)| RawHaar {
                id: id.clone(),
                side: h.side,
                weights: to_keyed(g.arrow_labels(), h.weights.iter().copied()),
            })
            .collect();
        file.kernels = self
            .kernels
            .iter()
            .map(|(id, k)| RawKernel {
                id: id.clone(),
                values: matrix_to_raw(k.values()),
            })
            .collect();
        file
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_file().save(path)
    }

    pub fn groupoid(&self) -> Result<&Arc<FiniteGroupoid>> {
        self.groupoid.as_ref().ok_or_else(|| Error::Schema {
            path: "/groupoid".into(),
            message: "project has no groupoid section".into(),
        })
    }

    pub fn representation(&self, id: &str) -> Result<&UnitaryRepresentation> {
        find(&self.representations, id, "representations")
    }

    pub fn vector_field(&self, id: &str) -> Result<&VectorField> {
        find(&self.vector_fields, id, "vector_fields")
    }

    pub fn haar_system(&self, id: &str) -> Result<&HaarSystem> {
        find(&self.haar, id, "haar")
    }

    pub fn kernel(&self, id: &str) -> Result<&GroupoidKernel> {
        find(&self.kernels, id, "kernels")
    }

    pub fn set_representation(&mut self, id: &str, rep: UnitaryRepresentation) {
        upsert(&mut self.representations, id, rep);
    }

    pub fn set_vector_field(&mut self, id: &str, v: VectorField) {
        upsert(&mut self.vector_fields, id, v);
    }

    pub fn set_haar(&mut self, id: &str, h: HaarSystem) {
        upsert(&mut self.haar, id, h);
    }

    pub fn set_kernel(&mut self, id: &str, k: GroupoidKernel) {
        upsert(&mut self.kernels, id, k);
    }
}
