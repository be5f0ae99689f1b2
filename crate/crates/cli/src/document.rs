//! The JSON document format for Floer data and cobordism operators.

use std::collections::BTreeMap;

use pinfloer::{
    BitMatrix, CobordismOps, CriticalManifold, FloerData, GradedComplex, GradedMap, GradedSpace, Grading, Involution,
    Kind, Metadata, ModuleOps, ModuliOperator, OpClass, TowerInfo, Window,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DocError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: {message} (line {line}, column {column})")]
    Schema {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema_version: unsupported version '{0}', expected '{SCHEMA_VERSION}'")]
    Version(String),
    #[error("{path}: {message}")]
    Semantic { path: String, message: String },
}

fn semantic(path: impl Into<String>, message: impl Into<String>) -> DocError {
    DocError::Semantic {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetadataDoc {
    pub name: String,
    pub b1: u32,
    pub rokhlin_times8: Option<i64>,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellDoc {
    pub label: String,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerDoc {
    pub tower: String,
    pub index: i64,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldDoc {
    pub id: String,
    pub kind: String,
    pub base_grading: String,
    pub cells: Vec<CellDoc>,
    /// `[source cell, target cell]` pairs of the local differential.
    #[serde(default)]
    pub differential: Vec<[String; 2]>,
    pub tower: Option<TowerDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDoc {
    pub class: String,
    pub source: String,
    pub target: String,
    pub shift: String,
    pub entries: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpsDoc {
    pub degree: String,
    pub operators: Vec<OperatorDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellImageDoc {
    pub from: [String; 2],
    pub to: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvolutionDoc {
    #[serde(default)]
    pub manifolds: BTreeMap<String, String>,
    #[serde(default)]
    pub cells: Vec<CellImageDoc>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDoc {
    pub q: Option<OpsDoc>,
    pub v: Option<OpsDoc>,
}

/// Serialized Floer data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FloerDocument {
    pub schema_version: String,
    pub metadata: MetadataDoc,
    pub grading_denominator: i64,
    /// Suggested computation window `[lo, hi]`.
    pub window: Option<[String; 2]>,
    pub manifolds: Vec<ManifoldDoc>,
    #[serde(default)]
    pub operators: Vec<OperatorDoc>,
    pub involution: Option<InvolutionDoc>,
    #[serde(default)]
    pub module: ModuleDoc,
    pub filtration: Option<BTreeMap<String, i64>>,
}

/// Serialized cobordism operators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CobordismDocument {
    pub schema_version: String,
    pub name: String,
    pub degree: String,
    pub operators: Vec<OperatorDoc>,
}

/// Floer data with the window it was generated for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub data: FloerData,
    pub window: Option<Window>,
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, DocError> {
    #[derive(Deserialize)]
    struct Version {
        schema_version: Option<serde_json::Value>,
    }
    // Syntax first, so malformed input reports a position rather than a path.
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| DocError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if let Ok(Version {
        schema_version: Some(v),
    }) = serde_json::from_value::<Version>(value)
    {
        if v != serde_json::Value::String(SCHEMA_VERSION.into()) {
            return Err(DocError::Version(v.as_str().map_or_else(|| v.to_string(), str::to_string)));
        }
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        DocError::Schema {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })
}

fn grading(path: &str, s: &str) -> Result<Grading, DocError> {
    s.parse().map_err(|e| semantic(path, format!("{e}")))
}

fn gr_string(g: Grading) -> String {
    g.to_fraction_string()
}

pub fn parse_document(text: &str) -> Result<Document, DocError> {
    let doc: FloerDocument = from_json(text)?;
    doc.resolve()
}

pub fn emit_document(data: &FloerData, window: Option<Window>) -> String {
    let doc = FloerDocument::from_data(data, window);
    to_text(&doc)
}

pub fn emit_cobordism(name: &str, ops: &CobordismOps) -> String {
    let doc = CobordismDocument {
        schema_version: SCHEMA_VERSION.into(),
        name: name.into(),
        degree: gr_string(ops.degree),
        operators: ops.ops.iter().map(op_doc).collect(),
    };
    to_text(&doc)
}

fn to_text<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

fn op_doc(op: &ModuliOperator) -> OperatorDoc {
    OperatorDoc {
        class: op.class.name().into(),
        source: op.source.clone(),
        target: op.target.clone(),
        shift: gr_string(op.shift),
        entries: op.entries.iter().map(|(a, b)| [a.clone(), b.clone()]).collect(),
    }
}

fn ops_doc(ops: &CobordismOps) -> OpsDoc {
    OpsDoc {
        degree: gr_string(ops.degree),
        operators: ops.ops.iter().map(op_doc).collect(),
    }
}

fn manifold_doc(m: &CriticalManifold) -> ManifoldDoc {
    let space = &m.local.space;
    let mut cells = Vec::new();
    let mut differential = Vec::new();
    for d in space.degrees() {
        let labels = space.labels(d);
        for l in labels {
            cells.push(CellDoc {
                label: l.clone(),
                degree: d.as_integer().expect("integral local degree"),
            });
        }
        let below = space.labels(d - 1);
        let block = m.local.d(d);
        for (c, from) in labels.iter().enumerate() {
            for (r, to) in below.iter().enumerate() {
                if block.get(r, c) {
                    differential.push([from.clone(), to.clone()]);
                }
            }
        }
    }
    ManifoldDoc {
        id: m.id.clone(),
        kind: m.kind.name().into(),
        base_grading: gr_string(m.base_grading),
        cells,
        differential,
        tower: m.tower.as_ref().map(|t| TowerDoc {
            tower: t.tower.clone(),
            index: t.index,
            sign: t.sign,
        }),
    }
}

impl FloerDocument {
    pub fn from_data(data: &FloerData, window: Option<Window>) -> Self {
        FloerDocument {
            schema_version: SCHEMA_VERSION.into(),
            metadata: MetadataDoc {
                name: data.metadata.name.clone(),
                b1: data.metadata.b1,
                rokhlin_times8: data.metadata.rokhlin_times8,
                notes: data.metadata.notes.clone(),
            },
            grading_denominator: data.grading_denominator,
            window: window.map(|w| [gr_string(w.lo), gr_string(w.hi)]),
            manifolds: data.manifolds.iter().map(manifold_doc).collect(),
            operators: data.operators.iter().map(op_doc).collect(),
            involution: data.involution.as_ref().map(|inv| InvolutionDoc {
                manifolds: inv.manifold_map.clone(),
                cells: inv
                    .cell_map
                    .iter()
                    .map(|((m, c), (n, e))| CellImageDoc {
                        from: [m.clone(), c.clone()],
                        to: [n.clone(), e.clone()],
                    })
                    .collect(),
            }),
            module: ModuleDoc {
                q: data.module.q.as_ref().map(ops_doc),
                v: data.module.v.as_ref().map(ops_doc),
            },
            filtration: data.filtration.clone(),
        }
    }

    /// Builds the in-memory data, resolving every reference.
    pub fn resolve(&self) -> Result<Document, DocError> {
        if self.grading_denominator < 1 {
            return Err(semantic("grading_denominator", "must be a positive integer"));
        }
        let mut data = FloerData {
            grading_denominator: self.grading_denominator,
            metadata: Metadata {
                name: self.metadata.name.clone(),
                b1: self.metadata.b1,
                rokhlin_times8: self.metadata.rokhlin_times8,
                notes: self.metadata.notes.clone(),
            },
            ..Default::default()
        };
        for (i, m) in self.manifolds.iter().enumerate() {
            let path = format!("manifolds[{i}]");
            if data.manifold(&m.id).is_some() {
                return Err(semantic(format!("{path}.id"), format!("duplicate manifold id '{}'", m.id)));
            }
            data.manifolds.push(resolve_manifold(&path, m)?);
        }
        for (i, op) in self.operators.iter().enumerate() {
            data.operators.push(resolve_op(&format!("operators[{i}]"), op, &data, &data)?);
        }
        if let Some(inv) = &self.involution {
            data.involution = Some(resolve_involution(inv, &data)?);
        }
        let q = self.module.q.as_ref().map(|o| resolve_ops("module.q", o, &data, &data)).transpose()?;
        let v = self.module.v.as_ref().map(|o| resolve_ops("module.v", o, &data, &data)).transpose()?;
        data.module = ModuleOps { q, v };
        if let Some(f) = &self.filtration {
            for id in f.keys() {
                if data.manifold(id).is_none() {
                    return Err(semantic(format!("filtration.{id}"), format!("unknown manifold '{id}'")));
                }
            }
            data.filtration = Some(f.clone());
        }
        let window = match &self.window {
            Some([lo, hi]) => {
                let lo = grading("window[0]", lo)?;
                let hi = grading("window[1]", hi)?;
                if lo > hi {
                    return Err(semantic("window", "lower end exceeds upper end"));
                }
                Some(Window::new(lo, hi))
            }
            None => None,
        };
        Ok(Document { data, window })
    }
}

fn resolve_manifold(path: &str, m: &ManifoldDoc) -> Result<CriticalManifold, DocError> {
    let kind: Kind = m.kind.parse().map_err(|e: String| semantic(format!("{path}.kind"), e))?;
    let base_grading = grading(&format!("{path}.base_grading"), &m.base_grading)?;
    let mut space = GradedSpace::new();
    let mut top = 0;
    for (k, c) in m.cells.iter().enumerate() {
        if c.degree < 0 {
            return Err(semantic(format!("{path}.cells[{k}].degree"), "local degrees are non-negative"));
        }
        top = top.max(c.degree);
        space.push(Grading::int(c.degree), c.label.clone());
    }
    if !space.labels_unique() {
        return Err(semantic(format!("{path}.cells"), "duplicate cell label"));
    }
    let index = space.index();
    let mut blocks: BTreeMap<Grading, BitMatrix> = BTreeMap::new();
    for (k, [a, b]) in m.differential.iter().enumerate() {
        let p = format!("{path}.differential[{k}]");
        let &(da, ia) = index.get(a.as_str()).ok_or_else(|| semantic(&p, format!("unknown cell '{a}'")))?;
        let &(db, ib) = index.get(b.as_str()).ok_or_else(|| semantic(&p, format!("unknown cell '{b}'")))?;
        if db != da - 1 {
            return Err(semantic(p, "differential entries lower the local degree by one"));
        }
        blocks
            .entry(da)
            .or_insert_with(|| BitMatrix::zeros(space.dim(db), space.dim(da)))
            .flip(ib, ia);
    }
    let mut diff = GradedMap::zero(Grading::int(-1));
    for (d, b) in blocks {
        diff.set_block(d, b);
    }
    let local = GradedComplex::new(space, diff, Window::new(-1, top + 1)).map_err(|e| semantic(path, e.to_string()))?;
    Ok(CriticalManifold {
        id: m.id.clone(),
        kind,
        base_grading,
        local,
        tower: m.tower.as_ref().map(|t| TowerInfo {
            tower: t.tower.clone(),
            index: t.index,
            sign: t.sign,
        }),
    })
}

fn resolve_op(path: &str, op: &OperatorDoc, src: &FloerData, tgt: &FloerData) -> Result<ModuliOperator, DocError> {
    let class: OpClass = op.class.parse().map_err(|e: String| semantic(format!("{path}.class"), e))?;
    let s = src
        .manifold(&op.source)
        .ok_or_else(|| semantic(format!("{path}.source"), format!("unknown manifold '{}'", op.source)))?;
    let t = tgt
        .manifold(&op.target)
        .ok_or_else(|| semantic(format!("{path}.target"), format!("unknown manifold '{}'", op.target)))?;
    for (k, [a, b]) in op.entries.iter().enumerate() {
        if s.cell(a).is_none() {
            return Err(semantic(format!("{path}.entries[{k}][0]"), format!("unknown cell '{a}' of '{}'", s.id)));
        }
        if t.cell(b).is_none() {
            return Err(semantic(format!("{path}.entries[{k}][1]"), format!("unknown cell '{b}' of '{}'", t.id)));
        }
    }
    Ok(ModuliOperator {
        class,
        source: op.source.clone(),
        target: op.target.clone(),
        shift: grading(&format!("{path}.shift"), &op.shift)?,
        entries: op.entries.iter().map(|[a, b]| (a.clone(), b.clone())).collect(),
    })
}

fn resolve_ops(path: &str, ops: &OpsDoc, src: &FloerData, tgt: &FloerData) -> Result<CobordismOps, DocError> {
    let sep = if path.is_empty() { "" } else { "." };
    Ok(CobordismOps {
        degree: grading(&format!("{path}{sep}degree"), &ops.degree)?,
        ops: ops
            .operators
            .iter()
            .enumerate()
            .map(|(i, o)| resolve_op(&format!("{path}{sep}operators[{i}]"), o, src, tgt))
            .collect::<Result<_, _>>()?,
    })
}

/// Cobordism operators between two data sets.
pub fn parse_cobordism_between(text: &str, src: &FloerData, tgt: &FloerData) -> Result<CobordismOps, DocError> {
    let doc: CobordismDocument = from_json(text)?;
    let ops = OpsDoc {
        degree: doc.degree,
        operators: doc.operators,
    };
    resolve_ops("", &ops, src, tgt)
}

fn resolve_involution(inv: &InvolutionDoc, data: &FloerData) -> Result<Involution, DocError> {
    for (a, b) in &inv.manifolds {
        for id in [a, b] {
            if data.manifold(id).is_none() {
                return Err(semantic(format!("involution.manifolds.{a}"), format!("unknown manifold '{id}'")));
            }
        }
    }
    let mut cell_map = BTreeMap::new();
    for (k, c) in inv.cells.iter().enumerate() {
        for (end, [m, cell]) in [("from", &c.from), ("to", &c.to)] {
            let p = format!("involution.cells[{k}].{end}");
            let man = data.manifold(m).ok_or_else(|| semantic(&p, format!("unknown manifold '{m}'")))?;
            if man.cell(cell).is_none() {
                return Err(semantic(p, format!("unknown cell '{cell}' of '{m}'")));
            }
        }
        let key = (c.from[0].clone(), c.from[1].clone());
        if cell_map.insert(key, (c.to[0].clone(), c.to[1].clone())).is_some() {
            return Err(semantic(format!("involution.cells[{k}]"), "cell listed twice"));
        }
    }
    Ok(Involution {
        manifold_map: inv.manifolds.clone(),
        cell_map,
    })
}
