//! Assignment, reverse-mode gradients of the induction loss, AdamW and
//! gradient verification.

mod adamw;
mod assignment;
pub mod gradcheck;
mod loss;
mod params;
pub mod tape;

pub use adamw::{adamw_step, AdamWConfig, AdamWState};
pub use assignment::{
    assignment_total, hungarian_maximize, project, ContinuousMappingMatrix, PermutationMatrix,
};
pub use gradcheck::{check_loss_gradients, finite_diff_check, GradCheck};
pub use loss::{
    loss_and_gradients, relaxed_loss, smooth_map, target_similarity, validate_smoothing, AlphaMode, Evaluation, LossConfig,
    LossTerms, DEFAULT_MAP_SMOOTHING,
};
pub use params::{ParamSet, MAP_INIT_MAX};
