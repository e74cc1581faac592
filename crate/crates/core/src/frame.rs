//! Frames of discernment, subsets as bit sets, and refinement mappings
//! between compatible frames.

use std::fmt;
use std::ops::{BitAnd, BitOr};
use std::sync::Arc;

use thiserror::Error;

/// Hard cap on frame size. Dense per-subset tables need `2^n` entries, so
/// anything past 24 elements stops being a desk-scale object.
pub const MAX_FRAME_ELEMENTS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("frame elements must be pairwise distinct: `{0}` appears twice")]
    DuplicateLabel(String),
    #[error("frame has {0} elements, the supported maximum is {MAX_FRAME_ELEMENTS}")]
    FrameTooLarge(usize),
    #[error("a frame needs at least one element")]
    EmptyFrame,
    #[error("dimension `{0}` has no labels")]
    EmptyDimension(String),
    #[error("set refers to elements outside the frame it is used with")]
    FrameMismatch,
    #[error("`{0}` is not an element of the frame")]
    UnknownLabel(String),
    #[error("refinement mapping is invalid: {0}")]
    InvalidRefinement(RefinementReport),
}

/// One axis of a product frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dimension {
    pub name: String,
    pub labels: Vec<String>,
}

#[derive(Debug, PartialEq, Eq)]
struct FrameInner {
    labels: Vec<String>,
    dimensions: Option<Vec<Dimension>>,
}

/// A finite frame of discernment: an ordered list of distinct element
/// labels, each owning one bit position. Product frames additionally keep
/// their generating dimensions; their elements are cells numbered in
/// row-major order.
///
/// Frames are immutable and cheap to clone.
#[derive(Debug, Clone)]
pub struct Frame {
    inner: Arc<FrameInner>,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner == other.inner
    }
}

impl Eq for Frame {}

impl Frame {
    /// Builds a flat frame with positional bit assignment.
    pub fn new<I, S>(labels: I) -> Result<Self, FrameError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        Self::from_parts(labels, None)
    }

    /// Builds a product frame whose elements are the cells of the Cartesian
    /// product of the dimensions, in row-major order.
    pub fn product<I, S, L>(dims: I) -> Result<Self, FrameError>
    where
        I: IntoIterator<Item = (S, Vec<L>)>,
        S: Into<String>,
        L: Into<String>,
    {
        let dims: Vec<Dimension> = dims
            .into_iter()
            .map(|(name, labels)| Dimension {
                name: name.into(),
                labels: labels.into_iter().map(Into::into).collect(),
            })
            .collect();
        if dims.is_empty() {
            return Err(FrameError::EmptyFrame);
        }
        let mut total = 1usize;
        for dim in &dims {
            if dim.labels.is_empty() {
                return Err(FrameError::EmptyDimension(dim.name.clone()));
            }
            total = total.saturating_mul(dim.labels.len());
            if total > MAX_FRAME_ELEMENTS {
                return Err(FrameError::FrameTooLarge(total));
            }
        }
        let mut labels = Vec::with_capacity(total);
        for index in 0..total {
            let cell = cell_of(&dims, index);
            labels.push(format!("({})", cell.join(",")));
        }
        Self::from_parts(labels, Some(dims))
    }

    fn from_parts(labels: Vec<String>, dimensions: Option<Vec<Dimension>>) -> Result<Self, FrameError> {
        if labels.is_empty() {
            return Err(FrameError::EmptyFrame);
        }
        if labels.len() > MAX_FRAME_ELEMENTS {
            return Err(FrameError::FrameTooLarge(labels.len()));
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(FrameError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Frame {
            inner: Arc::new(FrameInner { labels, dimensions }),
        })
    }

    pub fn len(&self) -> usize {
        self.inner.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.inner.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.inner.labels.iter().position(|l| l == label)
    }

    /// Generating dimensions, if this is a product frame.
    pub fn dimensions(&self) -> Option<&[Dimension]> {
        self.inner.dimensions.as_deref()
    }

    /// Row-major index of a cell given one label per dimension.
    pub fn cell_to_index(&self, cell: &[&str]) -> Result<usize, FrameError> {
        let dims = self
            .dimensions()
            .ok_or_else(|| FrameError::UnknownLabel(format!("({})", cell.join(","))))?;
        if cell.len() != dims.len() {
            return Err(FrameError::UnknownLabel(format!("({})", cell.join(","))));
        }
        let mut index = 0usize;
        for (dim, part) in dims.iter().zip(cell) {
            let pos = dim
                .labels
                .iter()
                .position(|l| l == part)
                .ok_or_else(|| FrameError::UnknownLabel((*part).to_string()))?;
            index = index * dim.labels.len() + pos;
        }
        Ok(index)
    }

    /// Per-dimension labels of the cell at `index`, if this is a product frame.
    pub fn index_to_cell(&self, index: usize) -> Option<Vec<&str>> {
        let dims = self.dimensions()?;
        if index >= self.len() {
            return None;
        }
        let mut parts = vec![""; dims.len()];
        let mut rest = index;
        for (slot, dim) in parts.iter_mut().zip(dims).rev() {
            *slot = &dim.labels[rest % dim.labels.len()];
            rest /= dim.labels.len();
        }
        Some(parts)
    }

    pub fn full_set(&self) -> SubsetMask {
        SubsetMask::full(self.len())
    }

    /// True when every bit of `set` addresses an element of this frame.
    pub fn admits(&self, set: SubsetMask) -> bool {
        set.bits() < (1u32 << self.len())
    }

    /// Subset from a list of element labels.
    pub fn subset(&self, labels: &[&str]) -> Result<SubsetMask, FrameError> {
        let mut mask = SubsetMask::EMPTY;
        for label in labels {
            let index = self
                .index_of(label)
                .ok_or_else(|| FrameError::UnknownLabel((*label).to_string()))?;
            mask = mask.with(index);
        }
        Ok(mask)
    }

    /// Element labels of `set`, in bit order.
    pub fn set_labels(&self, set: SubsetMask) -> Vec<&str> {
        set.iter().map(|i| self.label(i)).collect()
    }
}

/// A subset of a frame's elements as a fixed-width bit set. Bit `i` stands
/// for element `i`; masks order by their numeric value, which makes subset
/// enumeration and serialization deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SubsetMask(u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn from_bits(bits: u32) -> Self {
        SubsetMask(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(index: usize) -> Self {
        SubsetMask(1 << index)
    }

    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_FRAME_ELEMENTS);
        SubsetMask(((1u64 << n) - 1) as u32)
    }

    pub fn with(self, index: usize) -> Self {
        SubsetMask(self.0 | (1 << index))
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Self) -> Self {
        SubsetMask(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        SubsetMask(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        SubsetMask(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> Self {
        SubsetMask(!self.0 & SubsetMask::full(n).0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: Self) -> bool {
        self.0 & other.0 != 0
    }

    /// Indices of the set bits, ascending.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..u32::BITS as usize).filter(move |i| self.contains(*i))
    }

    /// All subsets of `self`, ascending by mask value.
    pub fn subsets(self) -> impl Iterator<Item = SubsetMask> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let current = next?;
            next = if current == full {
                None
            } else {
                Some(current.wrapping_sub(full) & full)
            };
            Some(SubsetMask(current))
        })
    }

    /// All supersets of `self` within an `n`-element frame, ascending.
    pub fn supersets(self, n: usize) -> impl Iterator<Item = SubsetMask> {
        let base = self;
        base.complement(n).subsets().map(move |extra| base.union(extra))
    }
}

impl BitOr for SubsetMask {
    type Output = SubsetMask;
    fn bitor(self, rhs: Self) -> Self {
        self.union(rhs)
    }
}

impl BitAnd for SubsetMask {
    type Output = SubsetMask;
    fn bitand(self, rhs: Self) -> Self {
        self.intersection(rhs)
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{bits:{:b}}}", self.0)
    }
}

/// One clause violation found while checking a refinement mapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefinementViolation {
    /// The image table does not have one entry per coarse element.
    ImageCountMismatch { expected: usize, found: usize },
    /// An image refers to elements outside the fine frame.
    ForeignImage { element: String },
    /// Clause (i): an element maps to the empty set.
    EmptyImage { element: String },
    /// Clause (ii): two element images overlap.
    OverlappingImages { first: String, second: String },
    /// Clause (iii): the images do not cover the fine frame.
    NotCovering { missing: Vec<String> },
}

impl fmt::Display for RefinementViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefinementViolation::ImageCountMismatch { expected, found } => {
                write!(f, "expected {expected} element images, found {found}")
            }
            RefinementViolation::ForeignImage { element } => {
                write!(f, "image of `{element}` leaves the fine frame")
            }
            RefinementViolation::EmptyImage { element } => {
                write!(f, "image of `{element}` is empty")
            }
            RefinementViolation::OverlappingImages { first, second } => {
                write!(f, "images of `{first}` and `{second}` overlap")
            }
            RefinementViolation::NotCovering { missing } => {
                write!(f, "images do not cover the fine frame (missing: {})", missing.join(", "))
            }
        }
    }
}

/// Outcome of validating a refinement mapping; empty means valid.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RefinementReport {
    pub violations: Vec<RefinementViolation>,
}

impl RefinementReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for RefinementReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid refinement");
        }
        let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", lines.join("; "))
    }
}

/// A refinement between two compatible frames: each coarse element owns a
/// nonempty block of a partition of the fine frame. Stored as an explicit
/// element-image table so the partition laws can be checked mechanically.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    coarse: Frame,
    fine: Frame,
    images: Vec<SubsetMask>,
}

impl Refinement {
    /// Validates the partition laws and builds the mapping.
    pub fn new(coarse: Frame, fine: Frame, images: Vec<SubsetMask>) -> Result<Self, FrameError> {
        let report = Self::validate(&coarse, &fine, &images);
        if !report.is_valid() {
            return Err(FrameError::InvalidRefinement(report));
        }
        Ok(Refinement { coarse, fine, images })
    }

    /// Checks each partition clause and reports every violation.
    pub fn validate(coarse: &Frame, fine: &Frame, images: &[SubsetMask]) -> RefinementReport {
        let mut report = RefinementReport::default();
        if images.len() != coarse.len() {
            report.violations.push(RefinementViolation::ImageCountMismatch {
                expected: coarse.len(),
                found: images.len(),
            });
            return report;
        }
        for (i, image) in images.iter().enumerate() {
            if !fine.admits(*image) {
                report.violations.push(RefinementViolation::ForeignImage {
                    element: coarse.label(i).to_string(),
                });
            }
            if image.is_empty() {
                report.violations.push(RefinementViolation::EmptyImage {
                    element: coarse.label(i).to_string(),
                });
            }
        }
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                if images[i].intersects(images[j]) {
                    report.violations.push(RefinementViolation::OverlappingImages {
                        first: coarse.label(i).to_string(),
                        second: coarse.label(j).to_string(),
                    });
                }
            }
        }
        let covered = images
            .iter()
            .fold(SubsetMask::EMPTY, |acc, image| acc.union(*image));
        let missing = fine.full_set().difference(covered);
        if !missing.is_empty() {
            report.violations.push(RefinementViolation::NotCovering {
                missing: fine.set_labels(missing).iter().map(|s| s.to_string()).collect(),
            });
        }
        report
    }

    pub fn coarse(&self) -> &Frame {
        &self.coarse
    }

    pub fn fine(&self) -> &Frame {
        &self.fine
    }

    /// Image of a single coarse element.
    pub fn image(&self, index: usize) -> SubsetMask {
        self.images[index]
    }

    /// Union of element images: the fine-frame counterpart of a coarse set.
    pub fn refine_set(&self, set: SubsetMask) -> Result<SubsetMask, FrameError> {
        if !self.coarse.admits(set) {
            return Err(FrameError::FrameMismatch);
        }
        Ok(set
            .iter()
            .fold(SubsetMask::EMPTY, |acc, i| acc.union(self.images[i])))
    }

    /// Coarse elements whose image meets the fine set.
    pub fn outer_reduction(&self, fine_set: SubsetMask) -> Result<SubsetMask, FrameError> {
        if !self.fine.admits(fine_set) {
            return Err(FrameError::FrameMismatch);
        }
        let mut mask = SubsetMask::EMPTY;
        for (i, image) in self.images.iter().enumerate() {
            if image.intersects(fine_set) {
                mask = mask.with(i);
            }
        }
        Ok(mask)
    }
}

fn cell_of<'a>(dims: &'a [Dimension], index: usize) -> Vec<&'a str> {
    let mut parts = vec![""; dims.len()];
    let mut rest = index;
    for (slot, dim) in parts.iter_mut().zip(dims).rev() {
        *slot = &dim.labels[rest % dim.labels.len()];
        rest /= dim.labels.len();
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_frame_assigns_positions_in_order() {
        let frame = Frame::new(["a", "b", "c"]).unwrap();
        assert_eq!(frame.len(), 3);
        assert_eq!(frame.index_of("b"), Some(1));
        assert_eq!(frame.label(2), "c");
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert_eq!(
            Frame::new(["a", "a"]).unwrap_err(),
            FrameError::DuplicateLabel("a".into())
        );
    }

    #[test]
    fn frame_cap_enforced() {
        let labels: Vec<String> = (0..25).map(|i| format!("e{i}")).collect();
        assert!(matches!(Frame::new(labels).unwrap_err(), FrameError::FrameTooLarge(25)));
        assert_eq!(Frame::new(Vec::<String>::new()).unwrap_err(), FrameError::EmptyFrame);
    }

    #[test]
    fn product_frame_is_row_major() {
        let frame = Frame::product([
            ("animals", vec!["birds", "fish"]),
            ("flight", vec!["fly", "not fly"]),
        ])
        .unwrap();
        assert_eq!(frame.len(), 4);
        assert_eq!(frame.index_to_cell(0).unwrap(), vec!["birds", "fly"]);
        assert_eq!(frame.index_to_cell(3).unwrap(), vec!["fish", "not fly"]);
        assert_eq!(frame.cell_to_index(&["fish", "fly"]).unwrap(), 2);
    }

    #[test]
    fn six_element_product_frame() {
        let frame = Frame::product([
            ("animals", vec!["eagles", "penguins", "fish"]),
            ("flight", vec!["fly", "not fly"]),
        ])
        .unwrap();
        assert_eq!(frame.len(), 6);
        for index in 0..frame.len() {
            let cell: Vec<&str> = frame.index_to_cell(index).unwrap();
            assert_eq!(frame.cell_to_index(&cell).unwrap(), index);
        }
    }

    #[test]
    fn degenerate_single_dimension_product() {
        let frame = Frame::product([("d", vec!["a"])]).unwrap();
        assert_eq!(frame.len(), 1);
    }

    #[test]
    fn empty_dimension_rejected() {
        let err = Frame::product([("d", Vec::<String>::new())]).unwrap_err();
        assert_eq!(err, FrameError::EmptyDimension("d".into()));
    }

    #[test]
    fn product_cap_enforced() {
        let err = Frame::product([
            ("a", (0..5).map(|i| i.to_string()).collect::<Vec<_>>()),
            ("b", (0..5).map(|i| i.to_string()).collect::<Vec<_>>()),
        ])
        .unwrap_err();
        assert!(matches!(err, FrameError::FrameTooLarge(25)));
    }

    #[test]
    fn mask_algebra() {
        let a = SubsetMask::from_bits(0b101);
        let b = SubsetMask::from_bits(0b011);
        assert_eq!(a.union(b).bits(), 0b111);
        assert_eq!(a.intersection(b).bits(), 0b001);
        assert_eq!(a.difference(b).bits(), 0b100);
        assert_eq!(a.complement(4).bits(), 0b1010);
        assert!(SubsetMask::from_bits(0b001).is_subset_of(a));
        assert!(!a.is_subset_of(b));
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn subsets_enumerate_ascending() {
        let sets: Vec<u32> = SubsetMask::from_bits(0b101).subsets().map(|m| m.bits()).collect();
        assert_eq!(sets, vec![0b000, 0b001, 0b100, 0b101]);
        let sups: Vec<u32> = SubsetMask::from_bits(0b001)
            .supersets(3)
            .map(|m| m.bits())
            .collect();
        assert_eq!(sups, vec![0b001, 0b011, 0b101, 0b111]);
    }

    fn tweety_refinement() -> Refinement {
        let coarse = Frame::new(["birds", "fish"]).unwrap();
        let fine = Frame::new(["eagles", "penguins", "fish"]).unwrap();
        let images = vec![fine.subset(&["eagles", "penguins"]).unwrap(), fine.subset(&["fish"]).unwrap()];
        Refinement::new(coarse, fine, images).unwrap()
    }

    #[test]
    fn refine_set_unions_images() {
        let r = tweety_refinement();
        let birds = r.coarse().subset(&["birds"]).unwrap();
        assert_eq!(
            r.refine_set(birds).unwrap(),
            r.fine().subset(&["eagles", "penguins"]).unwrap()
        );
        assert_eq!(r.refine_set(SubsetMask::EMPTY).unwrap(), SubsetMask::EMPTY);
        assert_eq!(r.refine_set(r.coarse().full_set()).unwrap(), r.fine().full_set());
    }

    #[test]
    fn outer_reduction_projects() {
        let r = tweety_refinement();
        let eagles = r.fine().subset(&["eagles"]).unwrap();
        assert_eq!(r.outer_reduction(eagles).unwrap(), r.coarse().subset(&["birds"]).unwrap());
        assert_eq!(r.outer_reduction(SubsetMask::EMPTY).unwrap(), SubsetMask::EMPTY);
    }

    #[test]
    fn outer_reduction_inverts_refine_set() {
        let r = tweety_refinement();
        for bits in 0..(1u32 << r.coarse().len()) {
            let a = SubsetMask::from_bits(bits);
            assert_eq!(r.outer_reduction(r.refine_set(a).unwrap()).unwrap(), a);
        }
    }

    #[test]
    fn refine_set_distributes_over_union() {
        let r = tweety_refinement();
        for x in 0..(1u32 << r.coarse().len()) {
            for y in 0..(1u32 << r.coarse().len()) {
                let (a, b) = (SubsetMask::from_bits(x), SubsetMask::from_bits(y));
                assert_eq!(
                    r.refine_set(a.union(b)).unwrap(),
                    r.refine_set(a).unwrap().union(r.refine_set(b).unwrap())
                );
            }
        }
    }

    #[test]
    fn outer_reduction_is_monotone() {
        let r = tweety_refinement();
        let n = r.fine().len();
        for x in 0..(1u32 << n) {
            for y in 0..(1u32 << n) {
                let (a, b) = (SubsetMask::from_bits(x), SubsetMask::from_bits(y));
                if a.is_subset_of(b) {
                    assert!(r
                        .outer_reduction(a)
                        .unwrap()
                        .is_subset_of(r.outer_reduction(b).unwrap()));
                }
            }
        }
    }

    #[test]
    fn validation_reports_each_clause() {
        let coarse = Frame::new(["x", "y"]).unwrap();
        let fine = Frame::new(["p", "q", "r"]).unwrap();

        let ok = Refinement::validate(
            &coarse,
            &fine,
            &[fine.subset(&["p", "q"]).unwrap(), fine.subset(&["r"]).unwrap()],
        );
        assert!(ok.is_valid());

        let overlapping = Refinement::validate(
            &coarse,
            &fine,
            &[fine.subset(&["p", "q"]).unwrap(), fine.subset(&["q", "r"]).unwrap()],
        );
        assert!(overlapping
            .violations
            .iter()
            .any(|v| matches!(v, RefinementViolation::OverlappingImages { .. })));

        let gap = Refinement::validate(
            &coarse,
            &fine,
            &[fine.subset(&["p"]).unwrap(), fine.subset(&["q"]).unwrap()],
        );
        assert!(gap
            .violations
            .iter()
            .any(|v| matches!(v, RefinementViolation::NotCovering { .. })));

        let empty = Refinement::validate(
            &coarse,
            &fine,
            &[SubsetMask::EMPTY, fine.full_set()],
        );
        assert!(empty
            .violations
            .iter()
            .any(|v| matches!(v, RefinementViolation::EmptyImage { .. })));
    }
}
