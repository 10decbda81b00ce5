use std::collections::VecDeque;

use super::FusionError;

/// Mean of a tracker's own confidence and the verifier's score.
pub fn combine_confidence(confidence: f64, verifier: f64) -> Result<f64, FusionError> {
    for v in [confidence, verifier] {
        if !(0.0..=1.0).contains(&v) {
            return Err(FusionError::ProbabilityRange(v));
        }
    }
    Ok((confidence + verifier) / 2.0)
}

/// Single-frame presence bit. The comparison is strict: a value exactly at
/// the threshold counts as absent.
pub fn binarize(value: f64, threshold: f64) -> bool {
    value > threshold
}

/// Number of positive bits a history of `len` frames must exceed.
pub fn vote_threshold(len: usize, vote_fraction: f64) -> usize {
    (vote_fraction * len as f64).floor() as usize
}

/// Windowed presence vote: present iff the number of positive bits is
/// strictly greater than `floor(vote_fraction * len)`. Histories shorter than
/// the window (warm-up) use their own length.
pub fn window_presence(history: &[bool], vote_fraction: f64) -> bool {
    if history.is_empty() {
        return false;
    }
    let positives = history.iter().filter(|&&b| b).count();
    positives > vote_threshold(history.len(), vote_fraction)
}

/// Ring buffer of the most recent single-frame presence bits.
#[derive(Debug, Clone)]
pub struct PresenceWindow {
    capacity: usize,
    bits: VecDeque<bool>,
}

impl PresenceWindow {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "window must hold at least one frame");
        Self {
            capacity,
            bits: VecDeque::with_capacity(capacity),
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.bits.len() == self.capacity {
            self.bits.pop_front();
        }
        self.bits.push_back(bit);
    }

    pub fn vote(&self, vote_fraction: f64) -> bool {
        let positives = self.bits.iter().filter(|&&b| b).count();
        !self.bits.is_empty() && positives > vote_threshold(self.bits.len(), vote_fraction)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn clear(&mut self) {
        self.bits.clear();
    }
}
