//! Tabular transforms, labeled/unlabeled splitting and synthetic generators.

pub mod generators;
pub mod split;
pub mod transform;

pub use generators::{gen_blobs, gen_linear, gen_two_moons, LinearData};
pub use split::{split_labeled_unlabeled, Split};
pub use transform::{transform_fit_apply, TransformKind, TransformerState};
