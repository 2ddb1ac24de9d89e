//! Asset processing: filtering, normalization, bone repair, deduplication
//! and surface resampling with interpolated skinning weights.

mod bones;
mod dedup;
mod filter;
mod inside;
mod normalize;
mod sample;

pub use bones::{correct_bones, influence_centroids, remove_unused_bones, INFLUENCE_THRESHOLD};
pub use dedup::{dedup_key, is_duplicate, DedupKey, DEDUP_CELL, DEDUP_CHAMFER_THRESHOLD};
pub use filter::{
    filter_asset, filter_counts, Decision, FilterReason, FilterReport, FilterRule, MAX_BONES_EXCLUSIVE,
    MAX_VERTICES_EXCLUSIVE, MIN_BONES_EXCLUSIVE, MIN_VERTICES_EXCLUSIVE,
};
pub use inside::{classify_inside, outside_fraction, OUTSIDE_DROP_FRACTION};
pub use normalize::{normalization_of, normalize_asset};
pub use sample::{interpolate_weights, resample_surface, SampledCloud, DEFAULT_SAMPLE_COUNT};
