//! Ear-Voice Span from word alignments and word start times.
//!
//! Alignment and timestamp extraction happen upstream; this module averages
//! the per-link start-time differences.

use serde::{Deserialize, Serialize};

/// One source-target word alignment link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignedPair {
    #[serde(rename = "src")]
    pub src_index: usize,
    #[serde(rename = "tgt")]
    pub tgt_index: usize,
    pub src_start: f64,
    pub tgt_start: f64,
    /// Confirmed correct by an annotator.
    pub verified: bool,
}

impl AlignedPair {
    pub fn new(
        src_index: usize,
        tgt_index: usize,
        src_start: f64,
        tgt_start: f64,
        verified: bool,
    ) -> Self {
        Self {
            src_index,
            tgt_index,
            src_start,
            tgt_start,
            verified,
        }
    }

    pub fn span(&self) -> f64 {
        self.tgt_start - self.src_start
    }

    fn key(&self) -> (usize, usize, u64, u64, bool) {
        (
            self.src_index,
            self.tgt_index,
            self.src_start.to_bits(),
            self.tgt_start.to_bits(),
            self.verified,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvsMode {
    /// Only annotator-verified links: the mean EVS.
    VerifiedOnly,
    /// Every automatic link, right or wrong: the mean automatic EVS.
    Automatic,
}

/// Mean of `tgt_start - src_start` over the selected links, or `None` when
/// no link is selected. Negative spans are averaged as they are.
pub fn mean_evs(pairs: &[AlignedPair], mode: EvsMode) -> Option<f64> {
    let selected: Vec<f64> = pairs
        .iter()
        .filter(|p| mode == EvsMode::Automatic || p.verified)
        .map(AlignedPair::span)
        .collect();
    if selected.is_empty() {
        None
    } else {
        Some(selected.iter().sum::<f64>() / selected.len() as f64)
    }
}

/// Drops exact duplicate links, keeping the first occurrence. Returns the
/// number removed.
pub fn dedup_links(pairs: &[AlignedPair]) -> (Vec<AlignedPair>, usize) {
    let mut seen = std::collections::HashSet::new();
    let kept: Vec<AlignedPair> = pairs
        .iter()
        .copied()
        .filter(|p| seen.insert(p.key()))
        .collect();
    let removed = pairs.len() - kept.len();
    (kept, removed)
}

/// Per-sentence EVS summary after de-duplication.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentenceEvs {
    pub id: String,
    pub mean_evs: Option<f64>,
    pub mean_auto_evs: Option<f64>,
    pub links: usize,
    pub verified: usize,
    pub duplicates: usize,
}

impl SentenceEvs {
    pub fn compute(id: impl Into<String>, pairs: &[AlignedPair]) -> Self {
        let (links, duplicates) = dedup_links(pairs);
        Self {
            id: id.into(),
            mean_evs: mean_evs(&links, EvsMode::VerifiedOnly),
            mean_auto_evs: mean_evs(&links, EvsMode::Automatic),
            links: links.len(),
            verified: links.iter().filter(|p| p.verified).count(),
            duplicates,
        }
    }
}

/// Joins two sentences' links into one unit; the second sentence's word
/// indices are offset past the first's. Times are assumed to share one
/// timeline (EVS is unaffected by a common shift).
pub fn concat_links(a: &[AlignedPair], b: &[AlignedPair]) -> Vec<AlignedPair> {
    let src_off = a.iter().map(|p| p.src_index).max().unwrap_or(0);
    let tgt_off = a.iter().map(|p| p.tgt_index).max().unwrap_or(0);
    a.iter()
        .copied()
        .chain(b.iter().map(|p| AlignedPair {
            src_index: p.src_index + src_off,
            tgt_index: p.tgt_index + tgt_off,
            ..*p
        }))
        .collect()
}
