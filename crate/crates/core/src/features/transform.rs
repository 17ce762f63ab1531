use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FeatureCatalog, FeatureError, FeatureInfo, ValueType};
use crate::data::Dataset;
use crate::explain::ContributionSet;

/// Token shown in place of a missing reading.
pub const NO_READING: &str = "no reading";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Transform {
    /// Indicator columns shown and attributed as one categorical feature.
    OneHotGroup {
        name: String,
        columns: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        display_name: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        category: Option<String>,
    },
    /// Display value is `scale * model_value + offset`.
    Affine {
        column: String,
        scale: f64,
        offset: f64,
    },
    Rename {
        column: String,
        name: String,
    },
}

impl Transform {
    fn columns(&self) -> Vec<&str> {
        match self {
            Transform::OneHotGroup { columns, .. } => columns.iter().map(String::as_str).collect(),
            Transform::Affine { column, .. } | Transform::Rename { column, .. } => vec![column.as_str()],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSpec {
    pub transforms: Vec<Transform>,
}

pub fn load_transforms(document: &str) -> Result<TransformSpec, FeatureError> {
    Ok(serde_json::from_str(document)?)
}

pub fn load_transform_file(path: impl AsRef<Path>) -> Result<TransformSpec, FeatureError> {
    load_transforms(&std::fs::read_to_string(path)?)
}

/// A catalog or transform-spec consistency problem.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    UncatalogedColumn { column: String },
    DuplicateName { name: String },
    EmptyDisplayName { name: String },
    OverlappingGroups { column: String, groups: Vec<String> },
    MultipleTransforms { column: String },
    ZeroScale { column: String },
    UnknownColumn { column: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::UncatalogedColumn { column } => {
                write!(f, "dataset column {column:?} has no catalog entry")
            }
            Diagnostic::DuplicateName { name } => write!(f, "feature name {name:?} is not unique"),
            Diagnostic::EmptyDisplayName { name } => write!(f, "feature {name:?} has an empty display name"),
            Diagnostic::OverlappingGroups { column, groups } => {
                write!(
                    f,
                    "column {column:?} belongs to several one-hot groups: {}",
                    groups.join(", ")
                )
            }
            Diagnostic::MultipleTransforms { column } => {
                write!(f, "column {column:?} appears in more than one transform")
            }
            Diagnostic::ZeroScale { column } => {
                write!(f, "affine transform on {column:?} has a zero or non-finite scale")
            }
            Diagnostic::UnknownColumn { column } => {
                write!(f, "transform references unknown column {column:?}")
            }
        }
    }
}

/// Checks catalog, transform spec and dataset columns against each other.
/// Returns one diagnostic per violation; an empty list means consistent.
pub fn validate_catalog(catalog: &FeatureCatalog, spec: &TransformSpec, dataset: &Dataset) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for column in dataset.columns() {
        if catalog.index_of(column).is_none() {
            out.push(Diagnostic::UncatalogedColumn { column: column.clone() });
        }
    }
    out.extend(catalog_and_spec_diagnostics(catalog, spec));
    out
}

fn catalog_and_spec_diagnostics(catalog: &FeatureCatalog, spec: &TransformSpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for f in catalog.features() {
        if !seen.insert(f.name.as_str()) {
            out.push(Diagnostic::DuplicateName { name: f.name.clone() });
        }
        if f.display_name.trim().is_empty() {
            out.push(Diagnostic::EmptyDisplayName { name: f.name.clone() });
        }
    }

    // column -> (groups claiming it, other records claiming it)
    let mut claims: BTreeMap<&str, (Vec<&str>, usize)> = BTreeMap::new();
    for t in &spec.transforms {
        for column in t.columns() {
            let entry = claims.entry(column).or_default();
            match t {
                Transform::OneHotGroup { name, .. } => entry.0.push(name),
                _ => entry.1 += 1,
            }
        }
        if let Transform::Affine { column, scale, .. } = t {
            if *scale == 0.0 || !scale.is_finite() {
                out.push(Diagnostic::ZeroScale { column: column.clone() });
            }
        }
    }
    for (&column, (groups, others)) in &claims {
        if catalog.index_of(column).is_none() {
            out.push(Diagnostic::UnknownColumn {
                column: column.to_string(),
            });
        }
        if groups.len() > 1 {
            out.push(Diagnostic::OverlappingGroups {
                column: column.to_string(),
                groups: groups.iter().map(|g| g.to_string()).collect(),
            });
        } else if groups.len() + others > 1 {
            out.push(Diagnostic::MultipleTransforms {
                column: column.to_string(),
            });
        }
    }

    // interpretable names must stay unique once groups and renames apply
    let mut names: HashSet<String> = HashSet::new();
    let grouped: HashSet<&str> = spec
        .transforms
        .iter()
        .filter(|t| matches!(t, Transform::OneHotGroup { .. }))
        .flat_map(Transform::columns)
        .collect();
    for f in catalog.features() {
        if grouped.contains(f.name.as_str()) {
            continue;
        }
        let renamed = spec.transforms.iter().find_map(|t| match t {
            Transform::Rename { column, name } if *column == f.name => Some(name.clone()),
            _ => None,
        });
        names.insert(renamed.unwrap_or_else(|| f.name.clone()));
    }
    for t in &spec.transforms {
        let new_name = match t {
            Transform::OneHotGroup { name, .. } => name,
            Transform::Rename { name, .. } => name,
            Transform::Affine { .. } => continue,
        };
        let shadows_column = catalog.index_of(new_name).is_some() && !t.columns().contains(&new_name.as_str());
        if shadows_column || (matches!(t, Transform::OneHotGroup { .. }) && !names.insert(new_name.clone())) {
            out.push(Diagnostic::DuplicateName { name: new_name.clone() });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Members {
    Column { column: usize },
    Group { columns: Vec<usize> },
}

/// One feature of the interpretable space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpretableFeature {
    pub name: String,
    pub display_name: String,
    pub category: String,
    #[serde(rename = "type")]
    pub value_type: ValueType,
    pub unit: Option<String>,
    #[serde(skip)]
    pub members: Members,
    /// `(scale, offset)` mapping model values to display values.
    #[serde(skip)]
    pub affine: Option<(f64, f64)>,
}

/// Catalog plus transforms, resolved to column indices.
#[derive(Debug, Clone)]
pub struct FeatureSpace {
    catalog: FeatureCatalog,
    features: Vec<InterpretableFeature>,
    feature_of_column: Vec<usize>,
}

impl FeatureSpace {
    /// Fails on any catalog/spec inconsistency.
    pub fn build(catalog: &FeatureCatalog, spec: &TransformSpec) -> Result<Self, FeatureError> {
        let problems = catalog_and_spec_diagnostics(catalog, spec);
        if !problems.is_empty() {
            let text: Vec<String> = problems.iter().map(ToString::to_string).collect();
            return Err(FeatureError::Spec(text.join("; ")));
        }
        let mut group_of: BTreeMap<usize, usize> = BTreeMap::new();
        let mut renamed: BTreeMap<usize, &str> = BTreeMap::new();
        let mut affine: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
        let col = |name: &str| catalog.index_of(name).expect("validated above");
        for (ti, t) in spec.transforms.iter().enumerate() {
            match t {
                Transform::OneHotGroup { columns, .. } => {
                    for c in columns {
                        group_of.insert(col(c), ti);
                    }
                }
                Transform::Affine {
                    column, scale, offset, ..
                } => {
                    affine.insert(col(column), (*scale, *offset));
                }
                Transform::Rename { column, name } => {
                    renamed.insert(col(column), name);
                }
            }
        }

        let mut features: Vec<InterpretableFeature> = Vec::new();
        let mut emitted_group: BTreeMap<usize, usize> = BTreeMap::new();
        let mut feature_of_column = Vec::with_capacity(catalog.len());
        for (i, info) in catalog.features().iter().enumerate() {
            if let Some(&ti) = group_of.get(&i) {
                if let Some(&fi) = emitted_group.get(&ti) {
                    feature_of_column.push(fi);
                    continue;
                }
                let Transform::OneHotGroup {
                    name,
                    columns,
                    display_name,
                    category,
                } = &spec.transforms[ti]
                else {
                    unreachable!("group_of only holds groups")
                };
                let mut members: Vec<usize> = columns.iter().map(|c| col(c)).collect();
                members.sort_unstable();
                members.dedup();
                emitted_group.insert(ti, features.len());
                feature_of_column.push(features.len());
                features.push(InterpretableFeature {
                    name: name.clone(),
                    display_name: display_name.clone().unwrap_or_else(|| name.clone()),
                    category: category.clone().unwrap_or_else(|| info.category.clone()),
                    value_type: ValueType::Categorical,
                    unit: None,
                    members: Members::Group { columns: members },
                    affine: None,
                });
            } else {
                feature_of_column.push(features.len());
                features.push(InterpretableFeature {
                    name: renamed.get(&i).map_or_else(|| info.name.clone(), |n| n.to_string()),
                    display_name: info.display_name.clone(),
                    category: info.category.clone(),
                    value_type: info.value_type,
                    unit: info.unit.clone(),
                    members: Members::Column { column: i },
                    affine: affine.get(&i).copied(),
                });
            }
        }
        Ok(FeatureSpace {
            catalog: catalog.clone(),
            features,
            feature_of_column,
        })
    }

    pub fn identity(catalog: &FeatureCatalog) -> Result<Self, FeatureError> {
        Self::build(catalog, &TransformSpec::default())
    }

    pub fn catalog(&self) -> &FeatureCatalog {
        &self.catalog
    }

    pub fn features(&self) -> &[InterpretableFeature] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    /// Interpretable feature that model column `column` contributes to.
    pub fn feature_of_column(&self, column: usize) -> usize {
        self.feature_of_column[column]
    }

    /// The interpretable features described as a flat catalog.
    pub fn interpretable_catalog(&self) -> FeatureCatalog {
        FeatureCatalog::new(
            self.features
                .iter()
                .map(|f| FeatureInfo {
                    name: f.name.clone(),
                    display_name: f.display_name.clone(),
                    category: f.category.clone(),
                    value_type: f.value_type,
                    unit: f.unit.clone(),
                })
                .collect(),
        )
    }

    /// Sums member-column contributions into each interpretable feature.
    pub fn project(&self, contribs: &ContributionSet) -> Result<ContributionSet, FeatureError> {
        if contribs.contributions.len() != self.feature_of_column.len() {
            return Err(FeatureError::Dimension {
                expected: self.feature_of_column.len(),
                got: contribs.contributions.len(),
            });
        }
        let mut out = vec![0.0; self.features.len()];
        for (column, &phi) in contribs.contributions.iter().enumerate() {
            out[self.feature_of_column[column]] += phi;
        }
        Ok(ContributionSet {
            row: contribs.row.clone(),
            base_value: contribs.base_value,
            predicted_margin: contribs.predicted_margin,
            contributions: out,
        })
    }

    /// Human-readable value of interpretable feature `feature` for a full
    /// model-space row.
    pub fn display_value(&self, feature: usize, row: &[Option<f64>]) -> String {
        let f = &self.features[feature];
        match &f.members {
            Members::Group { columns } => {
                if columns.iter().all(|&c| row[c].is_none()) {
                    return NO_READING.to_string();
                }
                columns
                    .iter()
                    .find(|&&c| row[c].is_some_and(|v| v > 0.5))
                    .map_or_else(|| "none".to_string(), |&c| self.catalog.features()[c].name.clone())
            }
            Members::Column { column } => self.display_column(f, row[*column]),
        }
    }

    pub fn display_value_by_name(&self, name: &str, row: &[Option<f64>]) -> Result<String, FeatureError> {
        let index = self
            .index_of(name)
            .ok_or_else(|| FeatureError::UnknownFeature(name.to_string()))?;
        Ok(self.display_value(index, row))
    }

    /// Display value of a single-column feature for a raw model value.
    pub fn display_raw(&self, feature: usize, value: Option<f64>) -> String {
        self.display_column(&self.features[feature], value)
    }

    fn display_column(&self, f: &InterpretableFeature, value: Option<f64>) -> String {
        let Some(v) = value else {
            return NO_READING.to_string();
        };
        match f.value_type {
            ValueType::Boolean => if v > 0.5 { "yes" } else { "no" }.to_string(),
            ValueType::Categorical => format_number(v),
            ValueType::Numeric => {
                let shown = f.affine.map_or(v, |(a, b)| a * v + b);
                match &f.unit {
                    Some(unit) => format!("{} {unit}", format_number(shown)),
                    None => format_number(shown),
                }
            }
        }
    }
}

/// Projects contributions onto the interpretable features of `space`.
/// Base value and predicted margin pass through unchanged.
pub fn to_interpretable(contribs: &ContributionSet, space: &FeatureSpace) -> Result<ContributionSet, FeatureError> {
    space.project(contribs)
}

/// At most three decimals, trailing zeros dropped.
fn format_number(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        &s
    };
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}
