//! JSON representations of frames, sets, mass distributions, matrices,
//! refinements, rule files and compatibility relations.
//!
//! Sets serialize as arrays of element labels (cells of product frames as
//! label tuples), sorted by bit position, so equal values always produce
//! identical bytes. Floats rely on the shortest round-trip decimal form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::{Frame, FrameError, Refinement, SubsetMask};
use crate::mass::{MassDistribution, MassError};
use crate::rules::{CompatibilityRelation, ImplicationRule, RuleError};
use crate::specialization::{FlowPlan, SpecializationError, SpecializationMatrix};

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("frame must have exactly one of `elements` or `dimensions`")]
    AmbiguousFrame,
    #[error("a flat frame takes plain labels, a product frame takes label tuples")]
    ElementShape,
    #[error("{0}")]
    Frame(#[from] FrameError),
    #[error("{0}")]
    Mass(#[from] MassError),
    #[error("{0}")]
    Matrix(#[from] SpecializationError),
    #[error("{0}")]
    Rule(#[from] RuleError),
}

/// A set element: a plain label in a flat frame, a label tuple in a product
/// frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementRepr {
    Label(String),
    Cell(Vec<String>),
}

pub type SetRepr = Vec<ElementRepr>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DimensionRepr {
    pub name: String,
    pub labels: Vec<String>,
}

/// `{"elements": [...]}` or `{"dimensions": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameRepr {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimensions: Option<Vec<DimensionRepr>>,
}

impl FrameRepr {
    pub fn from_frame(frame: &Frame) -> Self {
        match frame.dimensions() {
            Some(dims) => FrameRepr {
                elements: None,
                dimensions: Some(
                    dims.iter()
                        .map(|d| DimensionRepr {
                            name: d.name.clone(),
                            labels: d.labels.clone(),
                        })
                        .collect(),
                ),
            },
            None => FrameRepr {
                elements: Some(frame.labels().to_vec()),
                dimensions: None,
            },
        }
    }

    pub fn to_frame(&self) -> Result<Frame, CodecError> {
        match (&self.elements, &self.dimensions) {
            (Some(labels), None) => Ok(Frame::new(labels.clone())?),
            (None, Some(dims)) => Ok(Frame::product(
                dims.iter().map(|d| (d.name.clone(), d.labels.clone())),
            )?),
            _ => Err(CodecError::AmbiguousFrame),
        }
    }
}

/// Serializes a subset as its sorted element list.
pub fn set_to_repr(frame: &Frame, set: SubsetMask) -> SetRepr {
    set.iter()
        .map(|index| match frame.index_to_cell(index) {
            Some(cell) => ElementRepr::Cell(cell.iter().map(|s| s.to_string()).collect()),
            None => ElementRepr::Label(frame.label(index).to_string()),
        })
        .collect()
}

/// Parses a subset from an element list.
pub fn set_from_repr(frame: &Frame, elements: &[ElementRepr]) -> Result<SubsetMask, CodecError> {
    let mut mask = SubsetMask::EMPTY;
    for element in elements {
        let index = match (element, frame.dimensions()) {
            (ElementRepr::Label(label), None) => frame
                .index_of(label)
                .ok_or_else(|| FrameError::UnknownLabel(label.clone()))?,
            (ElementRepr::Cell(cell), Some(_)) => {
                let parts: Vec<&str> = cell.iter().map(|s| s.as_str()).collect();
                frame.cell_to_index(&parts)?
            }
            _ => return Err(CodecError::ElementShape),
        };
        mask = mask.with(index);
    }
    Ok(mask)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassEntryRepr {
    pub set: SetRepr,
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassRepr {
    pub frame: FrameRepr,
    pub masses: Vec<MassEntryRepr>,
}

impl MassRepr {
    pub fn from_mass(m: &MassDistribution) -> Self {
        MassRepr {
            frame: FrameRepr::from_frame(m.frame()),
            masses: m
                .focal()
                .map(|(set, mass)| MassEntryRepr {
                    set: set_to_repr(m.frame(), set),
                    mass,
                })
                .collect(),
        }
    }

    pub fn to_mass(&self) -> Result<MassDistribution, CodecError> {
        self.to_mass_with_epsilon(crate::mass::EPSILON)
    }

    pub fn to_mass_with_epsilon(&self, epsilon: f64) -> Result<MassDistribution, CodecError> {
        let frame = self.frame.to_frame()?;
        let mut assignments = Vec::with_capacity(self.masses.len());
        for entry in &self.masses {
            assignments.push((set_from_repr(&frame, &entry.set)?, entry.mass));
        }
        Ok(MassDistribution::with_epsilon(
            &frame,
            assignments,
            false,
            epsilon,
        )?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixTargetRepr {
    pub set: SetRepr,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixRowRepr {
    pub from: SetRepr,
    pub to: Vec<MatrixTargetRepr>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixRepr {
    pub frame: FrameRepr,
    /// Policy for rows that are not listed; always `"identity"`.
    pub default: String,
    pub rows: Vec<MatrixRowRepr>,
}

impl MatrixRepr {
    pub fn from_matrix(v: &SpecializationMatrix) -> Self {
        MatrixRepr {
            frame: FrameRepr::from_frame(v.frame()),
            default: "identity".to_string(),
            rows: v
                .stored_rows()
                .map(|(source, row)| MatrixRowRepr {
                    from: set_to_repr(v.frame(), source),
                    to: row
                        .iter()
                        .map(|&(target, weight)| MatrixTargetRepr {
                            set: set_to_repr(v.frame(), target),
                            weight,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<SpecializationMatrix, CodecError> {
        self.to_matrix_with_epsilon(crate::mass::EPSILON)
    }

    pub fn to_matrix_with_epsilon(&self, epsilon: f64) -> Result<SpecializationMatrix, CodecError> {
        let frame = self.frame.to_frame()?;
        let mut rows = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let source = set_from_repr(&frame, &row.from)?;
            let mut targets = Vec::with_capacity(row.to.len());
            for target in &row.to {
                targets.push((set_from_repr(&frame, &target.set)?, target.weight));
            }
            rows.push((source, targets));
        }
        Ok(SpecializationMatrix::with_epsilon(&frame, rows, epsilon)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowRepr {
    pub from: SetRepr,
    pub to: SetRepr,
    pub amount: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowPlanRepr {
    pub frame: FrameRepr,
    pub consistency: f64,
    pub flows: Vec<FlowRepr>,
}

impl FlowPlanRepr {
    pub fn from_plan(plan: &FlowPlan) -> Self {
        FlowPlanRepr {
            frame: FrameRepr::from_frame(plan.frame()),
            consistency: plan.consistency(),
            flows: plan
                .flows()
                .map(|(source, target, amount)| FlowRepr {
                    from: set_to_repr(plan.frame(), source),
                    to: set_to_repr(plan.frame(), target),
                    amount,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefinementImageRepr {
    pub of: ElementRepr,
    pub to: SetRepr,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefinementRepr {
    pub coarse: FrameRepr,
    pub fine: FrameRepr,
    pub images: Vec<RefinementImageRepr>,
}

impl RefinementRepr {
    pub fn from_refinement(r: &Refinement) -> Self {
        RefinementRepr {
            coarse: FrameRepr::from_frame(r.coarse()),
            fine: FrameRepr::from_frame(r.fine()),
            images: (0..r.coarse().len())
                .map(|index| RefinementImageRepr {
                    of: element_repr(r.coarse(), index),
                    to: set_to_repr(r.fine(), r.image(index)),
                })
                .collect(),
        }
    }

    pub fn to_refinement(&self) -> Result<Refinement, CodecError> {
        let coarse = self.coarse.to_frame()?;
        let fine = self.fine.to_frame()?;
        let mut images = vec![SubsetMask::EMPTY; coarse.len()];
        for image in &self.images {
            let index = match (&image.of, coarse.dimensions()) {
                (ElementRepr::Label(label), None) => coarse
                    .index_of(label)
                    .ok_or_else(|| FrameError::UnknownLabel(label.clone()))?,
                (ElementRepr::Cell(cell), Some(_)) => {
                    let parts: Vec<&str> = cell.iter().map(|s| s.as_str()).collect();
                    coarse.cell_to_index(&parts)?
                }
                _ => return Err(CodecError::ElementShape),
            };
            images[index] = set_from_repr(&fine, &image.to)?;
        }
        Ok(Refinement::new(coarse, fine, images)?)
    }
}

fn element_repr(frame: &Frame, index: usize) -> ElementRepr {
    match frame.index_to_cell(index) {
        Some(cell) => ElementRepr::Cell(cell.iter().map(|s| s.to_string()).collect()),
        None => ElementRepr::Label(frame.label(index).to_string()),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleSideRepr {
    pub dim: String,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleRepr {
    pub premise: RuleSideRepr,
    pub conclusion: RuleSideRepr,
    pub priority: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RulesRepr {
    pub rules: Vec<RuleRepr>,
}

impl RulesRepr {
    pub fn from_rules(rules: &[ImplicationRule]) -> Self {
        RulesRepr {
            rules: rules
                .iter()
                .map(|rule| RuleRepr {
                    premise: RuleSideRepr {
                        dim: rule.premise_dimension.clone(),
                        labels: rule.premise.clone(),
                    },
                    conclusion: RuleSideRepr {
                        dim: rule.conclusion_dimension.clone(),
                        labels: rule.conclusion.clone(),
                    },
                    priority: rule.priority,
                })
                .collect(),
        }
    }

    pub fn to_rules(&self) -> Vec<ImplicationRule> {
        self.rules
            .iter()
            .map(|rule| ImplicationRule {
                premise_dimension: rule.premise.dim.clone(),
                premise: rule.premise.labels.clone(),
                conclusion_dimension: rule.conclusion.dim.clone(),
                conclusion: rule.conclusion.labels.clone(),
                priority: rule.priority,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompatibilityPairRepr {
    #[serde(rename = "T")]
    pub focus: Vec<String>,
    pub y: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompatibilityRepr {
    pub x_frame: FrameRepr,
    pub y_frame: FrameRepr,
    pub pairs: Vec<CompatibilityPairRepr>,
}

impl CompatibilityRepr {
    pub fn from_relation(r: &CompatibilityRelation) -> Self {
        let mut pairs = Vec::new();
        for (focus, associated) in r.listed() {
            let labels: Vec<String> = r
                .x_frame()
                .set_labels(focus)
                .iter()
                .map(|s| s.to_string())
                .collect();
            for y in associated.iter() {
                pairs.push(CompatibilityPairRepr {
                    focus: labels.clone(),
                    y: r.y_frame().label(y).to_string(),
                });
            }
        }
        CompatibilityRepr {
            x_frame: FrameRepr::from_frame(r.x_frame()),
            y_frame: FrameRepr::from_frame(r.y_frame()),
            pairs,
        }
    }

    pub fn to_relation(&self) -> Result<CompatibilityRelation, CodecError> {
        let x_frame = self.x_frame.to_frame()?;
        let y_frame = self.y_frame.to_frame()?;
        let mut pairs = Vec::with_capacity(self.pairs.len());
        for pair in &self.pairs {
            let labels: Vec<&str> = pair.focus.iter().map(|s| s.as_str()).collect();
            let focus = x_frame.subset(&labels)?;
            let y = y_frame
                .index_of(&pair.y)
                .ok_or_else(|| FrameError::UnknownLabel(pair.y.clone()))?;
            pairs.push((focus, y));
        }
        Ok(CompatibilityRelation::new(&x_frame, &y_frame, pairs)?)
    }
}
