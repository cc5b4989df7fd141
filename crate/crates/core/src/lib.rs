//! Objective pedestrian occlusion levels from keypoint and instance-mask
//! detections.
//!
//! Keypoints are judged visible when their detector score clears a
//! threshold and they land on the pedestrian's own mask. Visible keypoints
//! switch on semantic body parts, each carrying a fixed share of a 2D body
//! surface area model; occlusion is the share that stays dark. The crate
//! also ships the pixel-wise ground truth, the CityPersons and OVIS box
//! baselines, benchmark severity schemes and a synthetic scene generator to
//! evaluate estimators end to end.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the type
//! parameters default to `f64` and the `*F32` aliases below name the
//! single-precision variants.

pub mod baselines;
pub mod bsa;
pub mod cli;
pub mod detections;
pub mod error;
pub mod geometry;
pub mod mask;
pub mod oracle;
pub mod scalar;
pub mod schemes;
pub mod synth;
pub mod visibility;

pub use baselines::{bbox_occlusion_rate, citypersons_full_box, citypersons_occlusion, CityPersonsAnnotation, FullExtentBox};
pub use bsa::{classify_frame, classify_occlusion, part_visibility, OcclusionResult, PartSet, SemanticPart};
pub use detections::{
    parse_frame_document, parse_results_document, serialize_frame_document, serialize_results, BodyExtent,
    ImageFrame, Keypoint, KeypointName, PedestrianInstance,
};
pub use error::{Error, Result};
pub use geometry::{Point2, Rect};
pub use mask::{rle_decode, rle_encode, InstanceMask};
pub use oracle::{evaluate_batch, pixelwise_occlusion, EvaluationRecord, PairedInstance};
pub use scalar::Scalar;
pub use schemes::DatasetScheme;
pub use visibility::{resolve_keypoint_visibility, KeypointVerdict, VerdictReason, VisibilityConfig};

pub type BoundingBox = Rect<f64>;
pub type BoundingBoxF32 = Rect<f32>;
pub type PointF32 = Point2<f32>;
pub type KeypointF32 = Keypoint<f32>;
pub type PedestrianInstanceF32 = PedestrianInstance<f32>;
pub type ImageFrameF32 = ImageFrame<f32>;
pub type OcclusionResultF32 = OcclusionResult<f32>;
pub type EvaluationRecordF32 = EvaluationRecord<f32>;
pub type VisibilityConfigF32 = VisibilityConfig<f32>;
