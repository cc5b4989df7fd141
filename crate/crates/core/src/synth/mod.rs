//! Synthetic pedestrians with exact masks, keypoints and ground-truth
//! occlusion.

pub mod figure;
pub mod occluder;
pub mod rng;
pub mod scene;

pub use figure::{generate_figure, visible_bbox, FigureGeometry, FigureSpec, Pose, MIN_FIGURE_HEIGHT};
pub use occluder::{apply_occluder, render_occluder, OccludedInstance, OccluderShape, OccluderSpec, RenderedOccluder};
pub use rng::SceneRng;
pub use scene::{generate_scene, generate_scenes, ground_truth_csv, Scenario, SyntheticScene, FRAME_HEIGHT, FRAME_WIDTH};
