//! Non-monotonic knowledge encoding: type-II compatibility relations and
//! prioritized implication rules over product frames, both compiled to
//! specialization matrices, plus the bird/penguin worked example.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::frame::{Frame, Refinement, SubsetMask};
use crate::specialization::{SpecializationError, SpecializationMatrix};

/// Largest frame (or product of relation spaces) for which relations and
/// rule sets are compiled to explicit rows.
pub const COMPILE_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RuleError {
    #[error("the focus set of a compatibility pair must not be empty")]
    EmptyFocus,
    #[error("space has {0} elements; this operation is capped at {1}")]
    FrameTooLargeForCheck(usize, usize),
    #[error("rules need a product frame with named dimensions")]
    NotProductFrame,
    #[error("`{0}` is not a dimension of the frame")]
    UnknownDimension(String),
    #[error("`{0}` is not a label of dimension `{1}`")]
    UnknownDimensionLabel(String, String),
    #[error("a rule must relate two different dimensions")]
    SameDimension,
    #[error("rule premise and conclusion must not be empty")]
    EmptyRuleSide,
    #[error("set and relation belong to different spaces")]
    FrameMismatch,
    #[error(transparent)]
    Matrix(#[from] SpecializationError),
}

/// A type-II compatibility relation between a space `X` and a space `Y`:
/// each nonempty focus `T ⊆ X` relates to a nonempty associated set of
/// `Y`-values. Foci without listed pairs relate to all of `Y`, the
/// non-committal completion that keeps the relation total.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityRelation {
    x_frame: Frame,
    y_frame: Frame,
    pairs: BTreeMap<SubsetMask, SubsetMask>,
}

impl CompatibilityRelation {
    /// Builds the relation from `(focus, y-element)` pairs; pairs with the
    /// same focus merge into one associated set.
    pub fn new<I>(x_frame: &Frame, y_frame: &Frame, pairs: I) -> Result<Self, RuleError>
    where
        I: IntoIterator<Item = (SubsetMask, usize)>,
    {
        let mut merged: BTreeMap<SubsetMask, SubsetMask> = BTreeMap::new();
        for (focus, y) in pairs {
            if focus.is_empty() {
                return Err(RuleError::EmptyFocus);
            }
            if !x_frame.admits(focus) || y >= y_frame.len() {
                return Err(RuleError::FrameMismatch);
            }
            let entry = merged.entry(focus).or_insert(SubsetMask::EMPTY);
            *entry = entry.with(y);
        }
        Ok(CompatibilityRelation {
            x_frame: x_frame.clone(),
            y_frame: y_frame.clone(),
            pairs: merged,
        })
    }

    pub fn x_frame(&self) -> &Frame {
        &self.x_frame
    }

    pub fn y_frame(&self) -> &Frame {
        &self.y_frame
    }

    /// Listed pairs, ascending by focus mask.
    pub fn listed(&self) -> impl Iterator<Item = (SubsetMask, SubsetMask)> + '_ {
        self.pairs.iter().map(|(t, w)| (*t, *w))
    }

    /// The associated set of `focus`: the union of its listed `Y`-values, or
    /// all of `Y` when the focus is unlisted.
    pub fn associated_set(&self, focus: SubsetMask) -> Result<SubsetMask, RuleError> {
        if focus.is_empty() {
            return Err(RuleError::EmptyFocus);
        }
        if !self.x_frame.admits(focus) {
            return Err(RuleError::FrameMismatch);
        }
        Ok(self
            .pairs
            .get(&focus)
            .copied()
            .unwrap_or_else(|| self.y_frame.full_set()))
    }

    /// Exhaustive irregularity search: the relation is irregular when some
    /// union focus has an associated set strictly inside the union of its
    /// parts' associated sets. Returns the first witness in ascending
    /// `(left, right)` order.
    pub fn irregularity(&self) -> Result<IrregularityReport, RuleError> {
        let n = self.x_frame.len();
        if n > COMPILE_CAP {
            return Err(RuleError::FrameTooLargeForCheck(n, COMPILE_CAP));
        }
        let size = 1usize << n;
        let full_y = self.y_frame.full_set();
        let mut assoc = vec![full_y; size];
        for (focus, w) in &self.pairs {
            assoc[focus.bits() as usize] = *w;
        }
        for left in 1..size {
            for right in 1..size {
                let union = left | right;
                let combined = assoc[left].union(assoc[right]);
                let w_union = assoc[union];
                if w_union.is_subset_of(combined) && w_union != combined {
                    return Ok(IrregularityReport::Irregular {
                        left: SubsetMask::from_bits(left as u32),
                        right: SubsetMask::from_bits(right as u32),
                        union: SubsetMask::from_bits(union as u32),
                    });
                }
            }
        }
        Ok(IrregularityReport::Regular)
    }

    /// Compiles the relation to a specialization matrix over the product
    /// space `X × Y`: every set `S` flows to `S ∩ (D_S × W)`, where `D_S` is
    /// the projection of `S` onto `X` and `W` the associated set of `D_S`.
    pub fn to_matrix(&self) -> Result<SpecializationMatrix, RuleError> {
        let cells = self.x_frame.len() * self.y_frame.len();
        if cells > COMPILE_CAP {
            return Err(RuleError::FrameTooLargeForCheck(cells, COMPILE_CAP));
        }
        let product = Frame::product([
            ("x".to_string(), self.x_frame.labels().to_vec()),
            ("y".to_string(), self.y_frame.labels().to_vec()),
        ])
        .expect("product of capped spaces");
        let ny = self.y_frame.len();
        let mut rows = Vec::new();
        for set in product.full_set().subsets().skip(1) {
            let mut projection = SubsetMask::EMPTY;
            for cell in set.iter() {
                projection = projection.with(cell / ny);
            }
            let associated = self.associated_set(projection)?;
            let mut kept = SubsetMask::EMPTY;
            for cell in set.iter() {
                if projection.contains(cell / ny) && associated.contains(cell % ny) {
                    kept = kept.with(cell);
                }
            }
            if kept != set {
                rows.push((set, vec![(kept, 1.0)]));
            }
        }
        Ok(SpecializationMatrix::new(&product, rows)?)
    }
}

/// Outcome of the irregularity search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IrregularityReport {
    Regular,
    /// `union = left ∪ right` has an associated set strictly inside the
    /// union of the two parts' associated sets.
    Irregular {
        left: SubsetMask,
        right: SubsetMask,
        union: SubsetMask,
    },
}

impl IrregularityReport {
    pub fn is_irregular(&self) -> bool {
        matches!(self, IrregularityReport::Irregular { .. })
    }
}

/// A default implication between two dimensions of a product frame: within
/// the premise rows, only the conclusion columns survive. Lower priority
/// ranks fire first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplicationRule {
    pub premise_dimension: String,
    pub premise: Vec<String>,
    pub conclusion_dimension: String,
    pub conclusion: Vec<String>,
    pub priority: u32,
}

/// Compiles prioritized implication rules over a product frame. Each rule
/// owns a removal set `H`: the cells combining a premise value with a
/// non-conclusion value. For every set `A` the first rule (by rank) whose
/// removal set lies fully inside `A` fires and sends `A` to `A − H`; sets no
/// rule fires on keep their mass. A row may legally land on the empty set,
/// which application reads as contradiction.
pub fn rules_to_matrix(
    frame: &Frame,
    rules: &[ImplicationRule],
) -> Result<SpecializationMatrix, RuleError> {
    let dims = frame.dimensions().ok_or(RuleError::NotProductFrame)?;
    if frame.len() > COMPILE_CAP {
        return Err(RuleError::FrameTooLargeForCheck(frame.len(), COMPILE_CAP));
    }
    let mut removals: Vec<(u32, usize, SubsetMask)> = Vec::new();
    for (index, rule) in rules.iter().enumerate() {
        if rule.premise.is_empty() || rule.conclusion.is_empty() {
            return Err(RuleError::EmptyRuleSide);
        }
        let premise_dim = dims
            .iter()
            .position(|d| d.name == rule.premise_dimension)
            .ok_or_else(|| RuleError::UnknownDimension(rule.premise_dimension.clone()))?;
        let conclusion_dim = dims
            .iter()
            .position(|d| d.name == rule.conclusion_dimension)
            .ok_or_else(|| RuleError::UnknownDimension(rule.conclusion_dimension.clone()))?;
        if premise_dim == conclusion_dim {
            return Err(RuleError::SameDimension);
        }
        let premise = dimension_values(dims, premise_dim, &rule.premise)?;
        let conclusion = dimension_values(dims, conclusion_dim, &rule.conclusion)?;
        let mut removal = SubsetMask::EMPTY;
        for cell in 0..frame.len() {
            let parts = frame.index_to_cell(cell).expect("cell in range");
            let premise_pos = dims[premise_dim]
                .labels
                .iter()
                .position(|l| l == parts[premise_dim])
                .expect("cell label");
            let conclusion_pos = dims[conclusion_dim]
                .labels
                .iter()
                .position(|l| l == parts[conclusion_dim])
                .expect("cell label");
            if premise.contains(premise_pos) && !conclusion.contains(conclusion_pos) {
                removal = removal.with(cell);
            }
        }
        removals.push((rule.priority, index, removal));
    }
    removals.sort();

    let mut rows = Vec::new();
    for set in frame.full_set().subsets().skip(1) {
        let fired = removals
            .iter()
            .find(|(_, _, removal)| !removal.is_empty() && removal.is_subset_of(set));
        if let Some((_, _, removal)) = fired {
            rows.push((set, vec![(set.difference(*removal), 1.0)]));
        }
    }
    Ok(SpecializationMatrix::new(frame, rows)?)
}

fn dimension_values(
    dims: &[crate::frame::Dimension],
    dim: usize,
    labels: &[String],
) -> Result<SubsetMask, RuleError> {
    let mut mask = SubsetMask::EMPTY;
    for label in labels {
        let pos = dims[dim]
            .labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| {
                RuleError::UnknownDimensionLabel(label.clone(), dims[dim].name.clone())
            })?;
        mask = mask.with(pos);
    }
    Ok(mask)
}

/// The bird/penguin worked example: a coarse animals-by-flight frame with
/// the rule "all birds fly", and a refined frame that splits birds into
/// eagles and penguins and adds the overriding rule "penguins don't fly".
#[derive(Debug, Clone)]
pub struct TweetyExample {
    pub coarse: Frame,
    pub fine: Frame,
    pub refinement: Refinement,
    /// "All birds fly" compiled on the coarse frame.
    pub coarse_matrix: SpecializationMatrix,
    /// Both rules compiled on the refined frame; non-monotonic.
    pub fine_matrix: SpecializationMatrix,
}

/// Builds the worked example, ready for demos and tests.
pub fn tweety() -> TweetyExample {
    let coarse = Frame::product([
        ("animals", vec!["birds", "fish"]),
        ("flight", vec!["fly", "not fly"]),
    ])
    .expect("static frame");
    let fine = Frame::product([
        ("animals", vec!["eagles", "penguins", "fish"]),
        ("flight", vec!["fly", "not fly"]),
    ])
    .expect("static frame");

    // Each coarse cell (animal, flight) splits along the animals axis only.
    let mut images = Vec::with_capacity(coarse.len());
    for index in 0..coarse.len() {
        let cell = coarse.index_to_cell(index).expect("cell");
        let animals: &[&str] = if cell[0] == "birds" {
            &["eagles", "penguins"]
        } else {
            &["fish"]
        };
        let mut image = SubsetMask::EMPTY;
        for animal in animals {
            image = image.with(fine.cell_to_index(&[animal, cell[1]]).expect("cell"));
        }
        images.push(image);
    }
    let refinement =
        Refinement::new(coarse.clone(), fine.clone(), images).expect("partition of the fine frame");

    let birds_fly = ImplicationRule {
        premise_dimension: "animals".into(),
        premise: vec!["birds".into()],
        conclusion_dimension: "flight".into(),
        conclusion: vec!["fly".into()],
        priority: 1,
    };
    let coarse_matrix = rules_to_matrix(&coarse, &[birds_fly]).expect("static rules");

    let refined_birds_fly = ImplicationRule {
        premise_dimension: "animals".into(),
        premise: vec!["eagles".into(), "penguins".into()],
        conclusion_dimension: "flight".into(),
        conclusion: vec!["fly".into()],
        priority: 1,
    };
    let penguins_dont_fly = ImplicationRule {
        premise_dimension: "animals".into(),
        premise: vec!["penguins".into()],
        conclusion_dimension: "flight".into(),
        conclusion: vec!["not fly".into()],
        priority: 2,
    };
    let fine_matrix =
        rules_to_matrix(&fine, &[refined_birds_fly, penguins_dont_fly]).expect("static rules");

    TweetyExample {
        coarse,
        fine,
        refinement,
        coarse_matrix,
        fine_matrix,
    }
}
