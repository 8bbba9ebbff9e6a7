//! JSON interchange: a single file schema for algebras, representations,
//! forms, maps and covectors, with bit-stable serialization.
//!
//! Rationals travel as canonical strings (`"p"` or `"p/q"`), indices are
//! 1-based, and entry keys must already be canonical for the kind's
//! alternation pattern; the loader rejects non-canonical input instead of
//! normalizing it.

use std::collections::BTreeMap;

use num::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::catalog::{self, CatalogObject};
use crate::error::AlgebraError;
use crate::family::MatrixFamily;
use crate::ldend::{ne_pattern, NLDendriform};
use crate::linalg::{BilinearForm, Covector, LinearMap, Symmetry};
use crate::nlie::{NLieAlgebra, NLieRep};
use crate::nprelie::{NPreLieAlgebra, NPreLieRep};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::report::Report;
use crate::tensor::{Coeffs, SkewPattern, StructureTensor};

#[derive(Debug, Clone, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

fn invalid(location: impl Into<String>, message: impl Into<String>) -> IoError {
    IoError::Invalid {
        location: location.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileKind {
    NLie,
    NPreLie,
    NLDendriform,
    Representation,
    PreRepresentation,
    BilinearForm,
    LinearMap,
    Covector,
}

impl FileKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FileKind::NLie => "n_lie",
            FileKind::NPreLie => "n_pre_lie",
            FileKind::NLDendriform => "n_l_dendriform",
            FileKind::Representation => "representation",
            FileKind::PreRepresentation => "pre_representation",
            FileKind::BilinearForm => "bilinear_form",
            FileKind::LinearMap => "linear_map",
            FileKind::Covector => "covector",
        }
    }
}

/// One structure-constant entry: a 1-based canonical index tuple and the
/// sparse value vector (1-based target index -> canonical rational string).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub args: Vec<usize>,
    pub value: BTreeMap<usize, String>,
}

/// The interchange schema shared by every kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub kind: FileKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub module_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<FileEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nw_entries: Option<Vec<FileEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ne_entries: Option<Vec<FileEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_entries: Option<Vec<FileEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_entries: Option<Vec<FileEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<BTreeMap<usize, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra: Option<Box<AlgebraFile>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl AlgebraFile {
    fn empty(kind: FileKind) -> Self {
        Self {
            kind,
            arity: None,
            dim: None,
            rows: None,
            cols: None,
            module_dim: None,
            symmetry: None,
            basis: None,
            entries: None,
            nw_entries: None,
            ne_entries: None,
            l_entries: None,
            r_entries: None,
            value: None,
            algebra: None,
            metadata: BTreeMap::new(),
        }
    }

    /// Sort entry lists by their argument tuples; part of canonical form.
    pub fn sort_entries(&mut self) {
        for list in [
            &mut self.entries,
            &mut self.nw_entries,
            &mut self.ne_entries,
            &mut self.l_entries,
            &mut self.r_entries,
        ]
        .into_iter()
        .flatten()
        {
            list.sort_by(|a, b| a.args.cmp(&b.args));
        }
        if let Some(inner) = &mut self.algebra {
            inner.sort_entries();
        }
    }
}

/// Parse from JSON text.
pub fn parse_text(text: &str) -> Result<AlgebraFile, IoError> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
    validate(&file)?;
    Ok(file)
}

/// Canonical serialization: sorted entries, stable field order, trailing
/// newline. Byte-identical across runs for equal content.
pub fn to_canonical_string(file: &AlgebraFile) -> String {
    let mut sorted = file.clone();
    sorted.sort_entries();
    let mut out = serde_json::to_string_pretty(&sorted).expect("serializable");
    out.push('\n');
    out
}

/// SHA-256 of the canonical serialization, hex-encoded.
pub fn canonical_hash(file: &AlgebraFile) -> String {
    let bytes = to_canonical_string(file);
    let mut hasher = Sha256::new();
    hasher.update(bytes.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn default_basis(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("e{i}")).collect()
}

fn dual_basis(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("e{i}*")).collect()
}

/// Basis names `e1..ed, e1*..ed*` for doubled spaces.
pub fn doubled_basis(half: usize) -> Vec<String> {
    let mut names = default_basis(half);
    names.extend(dual_basis(half));
    names
}

fn parse_value_map(
    location: &str,
    raw: &BTreeMap<usize, String>,
    dim: usize,
) -> Result<Coeffs, IoError> {
    if raw.is_empty() {
        return Err(invalid(location, "empty value map"));
    }
    let mut out = Coeffs::new();
    for (&target, text) in raw {
        if target == 0 || target > dim {
            return Err(invalid(
                location,
                format!("target index {target} outside 1..{dim}"),
            ));
        }
        let value = parse_rational(text).map_err(|e| invalid(location, e))?;
        if value.is_zero() {
            return Err(invalid(location, "zero coefficient is not stored in canonical form"));
        }
        out.insert(target - 1, value);
    }
    Ok(out)
}

fn format_value_map(coeffs: &Coeffs) -> BTreeMap<usize, String> {
    coeffs
        .iter()
        .map(|(&t, c)| (t + 1, format_rational(c)))
        .collect()
}

fn parse_tensor_entries(
    location: &str,
    entries: &[FileEntry],
    dim: usize,
    pattern: &SkewPattern,
) -> Result<StructureTensor, IoError> {
    let mut tensor = StructureTensor::new(dim, pattern.clone());
    let mut seen = std::collections::BTreeSet::new();
    for (idx, entry) in entries.iter().enumerate() {
        let loc = format!("{location}[{idx}] args {:?}", entry.args);
        if entry.args.len() != pattern.arity() {
            return Err(invalid(&loc, format!("expected {} indices", pattern.arity())));
        }
        if let Some(&bad) = entry.args.iter().find(|&&a| a == 0 || a > dim) {
            return Err(invalid(&loc, format!("index {bad} outside 1..{dim}")));
        }
        let zero_based: Vec<usize> = entry.args.iter().map(|&a| a - 1).collect();
        if !pattern.is_canonical(&zero_based) {
            return Err(invalid(
                &loc,
                "non-canonical tuple (alternating blocks must be strictly increasing)",
            ));
        }
        if !seen.insert(zero_based.clone()) {
            return Err(invalid(&loc, "duplicate tuple"));
        }
        let value = parse_value_map(&loc, &entry.value, dim)?;
        tensor.insert_canonical(zero_based, value)?;
    }
    Ok(tensor)
}

fn tensor_entries(tensor: &StructureTensor) -> Vec<FileEntry> {
    tensor
        .entries()
        .map(|(key, value)| FileEntry {
            args: key.iter().map(|&i| i + 1).collect(),
            value: format_value_map(value),
        })
        .collect()
}

fn parse_family_entries(
    location: &str,
    entries: &[FileEntry],
    alg_dim: usize,
    module_dim: usize,
    pattern: &SkewPattern,
) -> Result<MatrixFamily, IoError> {
    // Entries carry one column each: args = tuple ++ [module column].
    let mut columns: BTreeMap<Vec<usize>, BTreeMap<usize, Coeffs>> = BTreeMap::new();
    for (idx, entry) in entries.iter().enumerate() {
        let loc = format!("{location}[{idx}] args {:?}", entry.args);
        if entry.args.len() != pattern.arity() + 1 {
            return Err(invalid(
                &loc,
                format!("expected {} indices (tuple plus module column)", pattern.arity() + 1),
            ));
        }
        let (tuple_part, col_part) = entry.args.split_at(pattern.arity());
        if let Some(&bad) = tuple_part.iter().find(|&&a| a == 0 || a > alg_dim) {
            return Err(invalid(&loc, format!("index {bad} outside 1..{alg_dim}")));
        }
        let col = col_part[0];
        if col == 0 || col > module_dim {
            return Err(invalid(&loc, format!("module column {col} outside 1..{module_dim}")));
        }
        let tuple: Vec<usize> = tuple_part.iter().map(|&a| a - 1).collect();
        if !pattern.is_canonical(&tuple) {
            return Err(invalid(
                &loc,
                "non-canonical tuple (alternating blocks must be strictly increasing)",
            ));
        }
        let value = parse_value_map(&loc, &entry.value, module_dim)?;
        let slot = columns.entry(tuple).or_default();
        if slot.insert(col - 1, value).is_some() {
            return Err(invalid(&loc, "duplicate tuple"));
        }
    }
    let mut family = MatrixFamily::new(alg_dim, module_dim, pattern.clone());
    for (tuple, cols) in columns {
        let mut matrix = LinearMap::zero(module_dim, module_dim);
        for (col, coeffs) in cols {
            for (&row, c) in &coeffs {
                matrix.set_entry(row, col, c.clone());
            }
        }
        family.add_matrix(&tuple, &matrix, &num::One::one())?;
    }
    Ok(family)
}

fn family_entries(family: &MatrixFamily) -> Vec<FileEntry> {
    let mut out = Vec::new();
    for (tuple, matrix) in family.entries() {
        for col in 0..family.out_dim() {
            let column = matrix.column(col);
            if crate::linalg::vec_is_zero(&column) {
                continue;
            }
            let mut args: Vec<usize> = tuple.iter().map(|&i| i + 1).collect();
            args.push(col + 1);
            out.push(FileEntry {
                args,
                value: format_value_map(&crate::tensor::coeffs_from_dense(&column)),
            });
        }
    }
    out
}

fn require<T: Copy>(field: Option<T>, kind: FileKind, name: &str) -> Result<T, IoError> {
    field.ok_or_else(|| invalid(kind.as_str(), format!("missing field `{name}`")))
}

/// Structural validation beyond JSON well-formedness. Builds the domain
/// object for algebra kinds to force canonicality checks.
pub fn validate(file: &AlgebraFile) -> Result<(), IoError> {
    match file.kind {
        FileKind::NLie => {
            to_nlie(file)?;
        }
        FileKind::NPreLie => {
            to_nprelie(file)?;
        }
        FileKind::NLDendriform => {
            to_ldend(file)?;
        }
        FileKind::Representation => {
            to_nlie_rep(file)?;
        }
        FileKind::PreRepresentation => {
            to_nprelie_rep(file)?;
        }
        FileKind::BilinearForm => {
            to_bilinear_form(file)?;
        }
        FileKind::LinearMap => {
            to_linear_map(file)?;
        }
        FileKind::Covector => {
            to_covector(file)?;
        }
    }
    Ok(())
}

fn check_basis(file: &AlgebraFile, dim: usize) -> Result<(), IoError> {
    if let Some(basis) = &file.basis {
        if basis.len() != dim {
            return Err(invalid(
                file.kind.as_str(),
                format!("basis has {} names for dimension {dim}", basis.len()),
            ));
        }
    }
    Ok(())
}

pub fn to_nlie(file: &AlgebraFile) -> Result<NLieAlgebra, IoError> {
    if file.kind != FileKind::NLie {
        return Err(invalid(file.kind.as_str(), "expected kind n_lie"));
    }
    let dim = require(file.dim, file.kind, "dim")?;
    let arity = require(file.arity, file.kind, "arity")?;
    check_basis(file, dim)?;
    let entries = file.entries.as_deref().unwrap_or(&[]);
    let tensor = parse_tensor_entries(
        "entries",
        entries,
        dim,
        &SkewPattern::fully_alternating(arity),
    )?;
    Ok(NLieAlgebra::new(dim, arity, tensor)?)
}

pub fn to_nprelie(file: &AlgebraFile) -> Result<NPreLieAlgebra, IoError> {
    // A zero-entry n_lie file is simultaneously the zero n-pre-Lie structure.
    if file.kind == FileKind::NLie && file.entries.as_deref().unwrap_or(&[]).is_empty() {
        let dim = require(file.dim, file.kind, "dim")?;
        let arity = require(file.arity, file.kind, "arity")?;
        return Ok(NPreLieAlgebra::zero(dim, arity));
    }
    if file.kind != FileKind::NPreLie {
        return Err(invalid(file.kind.as_str(), "expected kind n_pre_lie"));
    }
    let dim = require(file.dim, file.kind, "dim")?;
    let arity = require(file.arity, file.kind, "arity")?;
    check_basis(file, dim)?;
    let entries = file.entries.as_deref().unwrap_or(&[]);
    let tensor = parse_tensor_entries(
        "entries",
        entries,
        dim,
        &SkewPattern::leading_alternating(arity, arity - 1),
    )?;
    Ok(NPreLieAlgebra::new(dim, arity, tensor)?)
}

pub fn to_ldend(file: &AlgebraFile) -> Result<NLDendriform, IoError> {
    if file.kind != FileKind::NLDendriform {
        return Err(invalid(file.kind.as_str(), "expected kind n_l_dendriform"));
    }
    let dim = require(file.dim, file.kind, "dim")?;
    let arity = require(file.arity, file.kind, "arity")?;
    check_basis(file, dim)?;
    let nw = parse_tensor_entries(
        "nw_entries",
        file.nw_entries.as_deref().unwrap_or(&[]),
        dim,
        &SkewPattern::leading_alternating(arity, arity - 1),
    )?;
    let ne = parse_tensor_entries(
        "ne_entries",
        file.ne_entries.as_deref().unwrap_or(&[]),
        dim,
        &ne_pattern(arity),
    )?;
    Ok(NLDendriform::new(dim, arity, nw, ne)?)
}

pub fn to_nlie_rep(file: &AlgebraFile) -> Result<NLieRep, IoError> {
    if file.kind != FileKind::Representation {
        return Err(invalid(file.kind.as_str(), "expected kind representation"));
    }
    let inner = file
        .algebra
        .as_ref()
        .ok_or_else(|| invalid("representation", "missing embedded `algebra`"))?;
    let algebra = to_nlie(inner)?;
    let module_dim = require(file.module_dim, file.kind, "module_dim")?;
    let family = parse_family_entries(
        "entries",
        file.entries.as_deref().unwrap_or(&[]),
        algebra.dim(),
        module_dim,
        &SkewPattern::fully_alternating(algebra.arity() - 1),
    )?;
    Ok(NLieRep::new(algebra, module_dim, family)?)
}

pub fn to_nprelie_rep(file: &AlgebraFile) -> Result<NPreLieRep, IoError> {
    if file.kind != FileKind::PreRepresentation {
        return Err(invalid(file.kind.as_str(), "expected kind pre_representation"));
    }
    let inner = file
        .algebra
        .as_ref()
        .ok_or_else(|| invalid("pre_representation", "missing embedded `algebra`"))?;
    let algebra = to_nprelie(inner)?;
    let module_dim = require(file.module_dim, file.kind, "module_dim")?;
    let n = algebra.arity();
    let l = parse_family_entries(
        "l_entries",
        file.l_entries.as_deref().unwrap_or(&[]),
        algebra.dim(),
        module_dim,
        &SkewPattern::fully_alternating(n - 1),
    )?;
    let r = parse_family_entries(
        "r_entries",
        file.r_entries.as_deref().unwrap_or(&[]),
        algebra.dim(),
        module_dim,
        &SkewPattern::leading_alternating(n - 1, n.saturating_sub(2)),
    )?;
    Ok(NPreLieRep::new(algebra, module_dim, l, r)?)
}

pub fn to_bilinear_form(file: &AlgebraFile) -> Result<BilinearForm, IoError> {
    if file.kind != FileKind::BilinearForm {
        return Err(invalid(file.kind.as_str(), "expected kind bilinear_form"));
    }
    let dim = require(file.dim, file.kind, "dim")?;
    let symmetry = match file.symmetry.as_deref() {
        Some("symmetric") => Symmetry::Symmetric,
        Some("skew") => Symmetry::Skew,
        other => {
            return Err(invalid(
                "bilinear_form",
                format!("symmetry must be `symmetric` or `skew`, got {other:?}"),
            ))
        }
    };
    let mut matrix = LinearMap::zero(dim, dim);
    for (idx, entry) in file.entries.as_deref().unwrap_or(&[]).iter().enumerate() {
        let loc = format!("entries[{idx}] args {:?}", entry.args);
        if entry.args.len() != 2 {
            return Err(invalid(&loc, "expected two indices"));
        }
        let (i, j) = (entry.args[0], entry.args[1]);
        if i == 0 || i > dim || j == 0 || j > dim {
            return Err(invalid(&loc, format!("index outside 1..{dim}")));
        }
        let canonical = match symmetry {
            Symmetry::Symmetric => i <= j,
            Symmetry::Skew => i < j,
        };
        if !canonical {
            return Err(invalid(&loc, "non-canonical cell (store the upper triangle)"));
        }
        if entry.value.len() != 1 || !entry.value.contains_key(&1) {
            return Err(invalid(&loc, "cell value must be a single scalar keyed 1"));
        }
        let value = parse_rational(&entry.value[&1]).map_err(|e| invalid(&loc, e))?;
        if value.is_zero() {
            return Err(invalid(&loc, "zero coefficient is not stored in canonical form"));
        }
        if !matrix.entry(i - 1, j - 1).is_zero() {
            return Err(invalid(&loc, "duplicate cell"));
        }
        matrix.set_entry(i - 1, j - 1, value.clone());
        if i != j {
            let mirrored = match symmetry {
                Symmetry::Symmetric => value,
                Symmetry::Skew => -value,
            };
            matrix.set_entry(j - 1, i - 1, mirrored);
        }
    }
    Ok(BilinearForm::new(dim, symmetry, matrix)?)
}

pub fn to_linear_map(file: &AlgebraFile) -> Result<LinearMap, IoError> {
    if file.kind != FileKind::LinearMap {
        return Err(invalid(file.kind.as_str(), "expected kind linear_map"));
    }
    let rows = require(file.rows, file.kind, "rows")?;
    let cols = require(file.cols, file.kind, "cols")?;
    let mut matrix = LinearMap::zero(rows, cols);
    let mut seen = std::collections::BTreeSet::new();
    for (idx, entry) in file.entries.as_deref().unwrap_or(&[]).iter().enumerate() {
        let loc = format!("entries[{idx}] args {:?}", entry.args);
        if entry.args.len() != 1 {
            return Err(invalid(&loc, "expected one index (the column)"));
        }
        let col = entry.args[0];
        if col == 0 || col > cols {
            return Err(invalid(&loc, format!("column {col} outside 1..{cols}")));
        }
        if !seen.insert(col) {
            return Err(invalid(&loc, "duplicate column"));
        }
        let coeffs = parse_value_map(&loc, &entry.value, rows)?;
        for (row, c) in coeffs {
            matrix.set_entry(row, col - 1, c);
        }
    }
    Ok(matrix)
}

pub fn to_covector(file: &AlgebraFile) -> Result<Covector, IoError> {
    if file.kind != FileKind::Covector {
        return Err(invalid(file.kind.as_str(), "expected kind covector"));
    }
    let dim = require(file.dim, file.kind, "dim")?;
    let mut coeffs = vec![Rational::zero(); dim];
    if let Some(raw) = &file.value {
        for (t, c) in parse_value_map("value", raw, dim)? {
            coeffs[t] = c;
        }
    }
    Ok(Covector::new(coeffs))
}

pub fn from_nlie(algebra: &NLieAlgebra, basis: Option<Vec<String>>) -> AlgebraFile {
    let mut file = AlgebraFile::empty(FileKind::NLie);
    file.dim = Some(algebra.dim());
    file.arity = Some(algebra.arity());
    file.basis = Some(basis.unwrap_or_else(|| default_basis(algebra.dim())));
    file.entries = Some(tensor_entries(algebra.bracket()));
    file.sort_entries();
    file
}

pub fn from_nprelie(prelie: &NPreLieAlgebra, basis: Option<Vec<String>>) -> AlgebraFile {
    let mut file = AlgebraFile::empty(FileKind::NPreLie);
    file.dim = Some(prelie.dim());
    file.arity = Some(prelie.arity());
    file.basis = Some(basis.unwrap_or_else(|| default_basis(prelie.dim())));
    file.entries = Some(tensor_entries(prelie.product()));
    file.sort_entries();
    file
}

pub fn from_ldend(ldend: &NLDendriform, basis: Option<Vec<String>>) -> AlgebraFile {
    let mut file = AlgebraFile::empty(FileKind::NLDendriform);
    file.dim = Some(ldend.dim());
    file.arity = Some(ldend.arity());
    file.basis = Some(basis.unwrap_or_else(|| default_basis(ldend.dim())));
    file.nw_entries = Some(tensor_entries(ldend.nw()));
    file.ne_entries = Some(tensor_entries(ldend.ne()));
    file.sort_entries();
    file
}

pub fn from_nlie_rep(rep: &NLieRep) -> AlgebraFile {
    let mut file = AlgebraFile::empty(FileKind::Representation);
    file.module_dim = Some(rep.module_dim());
    file.algebra = Some(Box::new(from_nlie(rep.algebra(), None)));
    file.entries = Some(family_entries(rep.action()));
    file.sort_entries();
    file
}

pub fn from_nprelie_rep(rep: &NPreLieRep) -> AlgebraFile {
    let mut file = AlgebraFile::empty(FileKind::PreRepresentation);
    file.module_dim = Some(rep.module_dim());
    file.algebra = Some(Box::new(from_nprelie(rep.algebra(), None)));
    file.l_entries = Some(family_entries(rep.left()));
    file.r_entries = Some(family_entries(rep.right()));
    file.sort_entries();
    file
}

pub fn from_bilinear_form(form: &BilinearForm) -> AlgebraFile {
    let mut file = AlgebraFile::empty(FileKind::BilinearForm);
    file.dim = Some(form.dim());
    file.symmetry = Some(
        match form.symmetry() {
            Symmetry::Symmetric => "symmetric",
            Symmetry::Skew => "skew",
        }
        .to_string(),
    );
    let mut entries = Vec::new();
    for i in 0..form.dim() {
        let start = match form.symmetry() {
            Symmetry::Symmetric => i,
            Symmetry::Skew => i + 1,
        };
        for j in start..form.dim() {
            let v = form.eval_basis(i, j);
            if !v.is_zero() {
                entries.push(FileEntry {
                    args: vec![i + 1, j + 1],
                    value: BTreeMap::from([(1, format_rational(v))]),
                });
            }
        }
    }
    file.entries = Some(entries);
    file.sort_entries();
    file
}

pub fn from_linear_map(map: &LinearMap) -> AlgebraFile {
    let mut file = AlgebraFile::empty(FileKind::LinearMap);
    file.rows = Some(map.rows());
    file.cols = Some(map.cols());
    let mut entries = Vec::new();
    for col in 0..map.cols() {
        let column = map.column(col);
        if crate::linalg::vec_is_zero(&column) {
            continue;
        }
        entries.push(FileEntry {
            args: vec![col + 1],
            value: format_value_map(&crate::tensor::coeffs_from_dense(&column)),
        });
    }
    file.entries = Some(entries);
    file
}

pub fn from_covector(covector: &Covector) -> AlgebraFile {
    let mut file = AlgebraFile::empty(FileKind::Covector);
    file.dim = Some(covector.dim());
    let coeffs: Coeffs = covector
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect();
    if !coeffs.is_empty() {
        file.value = Some(format_value_map(&coeffs));
    }
    file
}

/// Render a report as JSON (1-based indices, rationals as strings).
pub fn report_to_json(report: &Report) -> serde_json::Value {
    let violations: Vec<serde_json::Value> = report
        .violations
        .iter()
        .map(|v| {
            let residual: BTreeMap<String, String> = v
                .residual
                .iter()
                .map(|(&t, c)| ((t + 1).to_string(), format_rational(c)))
                .collect();
            serde_json::json!({
                "identity": v.identity,
                "args": v.args.iter().map(|&a| a + 1).collect::<Vec<usize>>(),
                "residual": residual,
            })
        })
        .collect();
    let summary: BTreeMap<String, usize> = report.summary();
    serde_json::json!({
        "check": report.check,
        "violations": violations,
        "summary": { "total": report.len(), "families": summary },
    })
}

/// Catalog entry rendered as an interchange file.
pub fn catalog_file(name: &str) -> Result<AlgebraFile, IoError> {
    let object = catalog::lookup(name)?;
    let mut file = match object {
        CatalogObject::NLie(a) => from_nlie(&a, None),
        CatalogObject::NPreLie(p) => from_nprelie(&p, None),
        CatalogObject::Covector(c) => from_covector(&c),
    };
    file.metadata
        .insert("name".into(), serde_json::Value::String(name.to_string()));
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rational::int;

    #[test]
    fn catalog_file_round_trips_byte_identically() {
        for name in ["S3", "S4", "PL", "T1", "P3", "Z(4,3)"] {
            let file = catalog_file(name).unwrap();
            let text = to_canonical_string(&file);
            let parsed = parse_text(&text).unwrap();
            assert_eq!(to_canonical_string(&parsed), text, "{name}");
        }
    }

    #[test]
    fn non_canonical_tuple_rejected() {
        let mut file = catalog_file("S3").unwrap();
        file.entries.as_mut().unwrap()[0].args = vec![2, 1, 3];
        let text = to_canonical_string(&file);
        let err = parse_text(&text).unwrap_err();
        assert!(err.to_string().contains("non-canonical"));
    }

    #[test]
    fn non_reduced_rational_rejected() {
        let mut file = catalog_file("S3").unwrap();
        file.entries.as_mut().unwrap()[0]
            .value
            .insert(4, "4/6".into());
        let text = to_canonical_string(&file);
        let err = parse_text(&text).unwrap_err();
        assert!(err.to_string().contains("non-reduced"));
    }

    #[test]
    fn out_of_range_index_rejected() {
        let mut file = catalog_file("S3").unwrap();
        file.entries.as_mut().unwrap()[0].args = vec![1, 2, 9];
        let text = to_canonical_string(&file);
        let err = parse_text(&text).unwrap_err();
        assert!(err.to_string().contains("outside"));
    }

    #[test]
    fn zero_coefficient_rejected() {
        let mut file = catalog_file("P3").unwrap();
        file.entries.as_mut().unwrap()[0]
            .value
            .insert(1, "0".into());
        let text = to_canonical_string(&file);
        let err = parse_text(&text).unwrap_err();
        assert!(err.to_string().contains("zero coefficient"));
    }

    #[test]
    fn representation_round_trip() {
        let s3 = catalog::s3();
        s3.check();
        let adj = s3.adjoint_rep();
        adj.check().unwrap();
        let file = from_nlie_rep(&adj);
        let text = to_canonical_string(&file);
        let parsed = parse_text(&text).unwrap();
        let rebuilt = to_nlie_rep(&parsed).unwrap();
        assert!(rebuilt == adj);
        assert_eq!(to_canonical_string(&parsed), text);
    }

    #[test]
    fn pre_representation_round_trip() {
        let p3 = catalog::p3();
        p3.check();
        let adj = p3.adjoint_pre_rep().unwrap();
        let file = from_nprelie_rep(&adj);
        let text = to_canonical_string(&file);
        let rebuilt = to_nprelie_rep(&parse_text(&text).unwrap()).unwrap();
        assert!(rebuilt == adj);
    }

    #[test]
    fn forms_maps_covectors_round_trip() {
        let form = crate::geometry::canonical_symplectic_form(3);
        let file = from_bilinear_form(&form);
        let text = to_canonical_string(&file);
        assert_eq!(to_bilinear_form(&parse_text(&text).unwrap()).unwrap(), form);

        let map = LinearMap::from_fn(3, 2, |r, c| {
            if r == c {
                crate::rational::rat(1, 2)
            } else {
                int(0)
            }
        });
        let file = from_linear_map(&map);
        let text = to_canonical_string(&file);
        assert_eq!(to_linear_map(&parse_text(&text).unwrap()).unwrap(), map);

        let tau = catalog::t1();
        let file = from_covector(&tau);
        let text = to_canonical_string(&file);
        assert_eq!(to_covector(&parse_text(&text).unwrap()).unwrap(), tau);

        let zero = Covector::zero(3);
        let text = to_canonical_string(&from_covector(&zero));
        assert_eq!(to_covector(&parse_text(&text).unwrap()).unwrap(), zero);
    }

    #[test]
    fn zero_nlie_file_loads_as_zero_prelie() {
        let file = catalog_file("Z(3,3)").unwrap();
        let prelie = to_nprelie(&file).unwrap();
        assert!(prelie.product().is_zero());
        // A nonzero n_lie file does not.
        let s3 = catalog_file("S3").unwrap();
        assert!(to_nprelie(&s3).is_err());
    }

    #[test]
    fn dendriform_round_trip() {
        let p3 = catalog::p3();
        p3.check();
        let support: Vec<(usize, usize)> = (0..3).map(|i| (i, i)).collect();
        let found = crate::nprelie::rb_search(&p3, &[int(-1), int(0), int(1)], &support).unwrap();
        let p = found.iter().find(|m| !m.is_zero()).unwrap();
        let ld = crate::ldend::rb_to_ldend(&p3, p).unwrap();
        let file = from_ldend(&ld, None);
        let text = to_canonical_string(&file);
        let rebuilt = to_ldend(&parse_text(&text).unwrap()).unwrap();
        assert!(rebuilt == ld);
    }

    #[test]
    fn hashes_are_stable_per_content() {
        let a = catalog_file("S3").unwrap();
        let b = catalog_file("S3").unwrap();
        assert_eq!(canonical_hash(&a), canonical_hash(&b));
        let c = catalog_file("P3").unwrap();
        assert_ne!(canonical_hash(&a), canonical_hash(&c));
    }
}
