use crate::geometry::BBox;

/// Per-frame target annotation of one sequence; `None` marks frames where
/// the target is not visible.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceGroundTruth {
    pub name: String,
    pub frames: Vec<Option<BBox>>,
}

impl SequenceGroundTruth {
    pub fn new(name: impl Into<String>, frames: Vec<Option<BBox>>) -> Self {
        Self {
            name: name.into(),
            frames,
        }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn get(&self, t: usize) -> Option<&BBox> {
        self.frames.get(t).and_then(|f| f.as_ref())
    }

    pub fn is_visible(&self, t: usize) -> bool {
        self.get(t).is_some()
    }

    pub fn initial_box(&self) -> Option<BBox> {
        self.get(0).copied()
    }

    pub fn visible_count(&self) -> usize {
        self.frames.iter().filter(|f| f.is_some()).count()
    }
}
