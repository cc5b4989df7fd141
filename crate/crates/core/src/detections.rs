//! Detection data model and the frame/results JSON documents.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bsa::{OcclusionResult, SemanticPart};
use crate::error::{Error, Result};
use crate::geometry::{Point2, Rect};
use crate::mask::{InstanceMask, MaskDocument};
use crate::scalar::{round2, Scalar};
use crate::schemes::DatasetScheme;

/// The 17 COCO-style human keypoints, in serialization order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeypointName {
    Nose,
    LeftEye,
    RightEye,
    LeftEar,
    RightEar,
    LeftShoulder,
    RightShoulder,
    LeftElbow,
    RightElbow,
    LeftWrist,
    RightWrist,
    LeftHip,
    RightHip,
    LeftKnee,
    RightKnee,
    LeftAnkle,
    RightAnkle,
}

impl KeypointName {
    pub const COUNT: usize = 17;

    pub const ALL: [KeypointName; 17] = [
        KeypointName::Nose,
        KeypointName::LeftEye,
        KeypointName::RightEye,
        KeypointName::LeftEar,
        KeypointName::RightEar,
        KeypointName::LeftShoulder,
        KeypointName::RightShoulder,
        KeypointName::LeftElbow,
        KeypointName::RightElbow,
        KeypointName::LeftWrist,
        KeypointName::RightWrist,
        KeypointName::LeftHip,
        KeypointName::RightHip,
        KeypointName::LeftKnee,
        KeypointName::RightKnee,
        KeypointName::LeftAnkle,
        KeypointName::RightAnkle,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            KeypointName::Nose => "nose",
            KeypointName::LeftEye => "left_eye",
            KeypointName::RightEye => "right_eye",
            KeypointName::LeftEar => "left_ear",
            KeypointName::RightEar => "right_ear",
            KeypointName::LeftShoulder => "left_shoulder",
            KeypointName::RightShoulder => "right_shoulder",
            KeypointName::LeftElbow => "left_elbow",
            KeypointName::RightElbow => "right_elbow",
            KeypointName::LeftWrist => "left_wrist",
            KeypointName::RightWrist => "right_wrist",
            KeypointName::LeftHip => "left_hip",
            KeypointName::RightHip => "right_hip",
            KeypointName::LeftKnee => "left_knee",
            KeypointName::RightKnee => "right_knee",
            KeypointName::LeftAnkle => "left_ankle",
            KeypointName::RightAnkle => "right_ankle",
        }
    }

    /// The same landmark on the other side of the body.
    pub fn mirrored(self) -> Self {
        use KeypointName::*;
        match self {
            Nose => Nose,
            LeftEye => RightEye,
            RightEye => LeftEye,
            LeftEar => RightEar,
            RightEar => LeftEar,
            LeftShoulder => RightShoulder,
            RightShoulder => LeftShoulder,
            LeftElbow => RightElbow,
            RightElbow => LeftElbow,
            LeftWrist => RightWrist,
            RightWrist => LeftWrist,
            LeftHip => RightHip,
            RightHip => LeftHip,
            LeftKnee => RightKnee,
            RightKnee => LeftKnee,
            LeftAnkle => RightAnkle,
            RightAnkle => LeftAnkle,
        }
    }
}

impl fmt::Display for KeypointName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Keypoint<T = f64> {
    pub name: KeypointName,
    pub x: T,
    pub y: T,
    pub score: T,
}

/// Head-top and feet-midpoint clicks used by the CityPersons full-box
/// baseline. Optional per instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct BodyExtent<T = f64> {
    pub head_top: Point2<T>,
    pub feet_mid: Point2<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PedestrianInstance<T = f64> {
    pub instance_id: String,
    /// Indexed by [`KeypointName::index`].
    pub keypoints: [Keypoint<T>; 17],
    pub mask: InstanceMask,
    pub bbox_visible: Rect<T>,
    pub body_extent: Option<BodyExtent<T>>,
}

impl<T: Scalar> PedestrianInstance<T> {
    pub fn keypoint(&self, name: KeypointName) -> &Keypoint<T> {
        &self.keypoints[name.index()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageFrame<T = f64> {
    pub frame_id: String,
    pub width: u32,
    pub height: u32,
    pub instances: Vec<PedestrianInstance<T>>,
}

impl<T: Scalar> ImageFrame<T> {
    /// Checks every frame and instance invariant.
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Validation(format!(
                "frame `{}` has zero size {}x{}",
                self.frame_id, self.width, self.height
            )));
        }
        let mut seen = HashSet::new();
        for inst in &self.instances {
            if !seen.insert(inst.instance_id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate instance_id `{}` in frame `{}`",
                    inst.instance_id, self.frame_id
                )));
            }
            for (kp, expected) in inst.keypoints.iter().zip(KeypointName::ALL) {
                if kp.name != expected {
                    return Err(Error::Schema {
                        instance: inst.instance_id.clone(),
                        message: format!("keypoint `{}` where `{expected}` was expected", kp.name),
                    });
                }
                if !(kp.x.is_finite() && kp.y.is_finite()) {
                    return Err(Error::Validation(format!(
                        "instance `{}`: keypoint `{}` has non-finite coordinates",
                        inst.instance_id, kp.name
                    )));
                }
                if !(kp.score >= T::zero() && kp.score <= T::one()) {
                    return Err(Error::Validation(format!(
                        "instance `{}`: keypoint `{}` score {} outside [0, 1]",
                        inst.instance_id, kp.name, kp.score
                    )));
                }
            }
            if inst.mask.width() != self.width || inst.mask.height() != self.height {
                return Err(Error::Validation(format!(
                    "instance `{}`: mask is {}x{} but frame is {}x{}",
                    inst.instance_id,
                    inst.mask.width(),
                    inst.mask.height(),
                    self.width,
                    self.height
                )));
            }
            let b = inst.bbox_visible;
            if !(b.x_min <= b.x_max && b.y_min <= b.y_max) {
                return Err(Error::Validation(format!(
                    "instance `{}`: inverted bbox_visible",
                    inst.instance_id
                )));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
struct FrameDoc<T> {
    frame_id: String,
    width: u32,
    height: u32,
    instances: Vec<InstanceDoc<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
struct InstanceDoc<T> {
    instance_id: String,
    bbox_visible: [T; 4],
    keypoints: Vec<Keypoint<T>>,
    mask: MaskDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    citypersons: Option<BodyExtent<T>>,
}

pub(crate) fn from_json<D: DeserializeOwned>(text: &str) -> Result<D> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| Error::Parse {
        field: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

/// Parses and validates one frame document.
pub fn parse_frame_document<T>(text: &str) -> Result<ImageFrame<T>>
where
    T: Scalar + DeserializeOwned,
{
    let doc: FrameDoc<T> = from_json(text)?;
    let mut instances = Vec::with_capacity(doc.instances.len());
    for inst in doc.instances {
        let keypoints: [Keypoint<T>; 17] = inst.keypoints.try_into().map_err(|v: Vec<_>| Error::Schema {
            instance: inst.instance_id.clone(),
            message: format!("expected 17 keypoints, found {}", v.len()),
        })?;
        let mask = inst.mask.decode()?;
        let [x0, y0, x1, y1] = inst.bbox_visible;
        let bbox_visible = Rect::new(x0, y0, x1, y1).map_err(|e| {
            Error::Validation(format!("instance `{}`: bbox_visible: {e}", inst.instance_id))
        })?;
        instances.push(PedestrianInstance {
            instance_id: inst.instance_id,
            keypoints,
            mask,
            bbox_visible,
            body_extent: inst.citypersons,
        });
    }
    let frame = ImageFrame {
        frame_id: doc.frame_id,
        width: doc.width,
        height: doc.height,
        instances,
    };
    frame.validate()?;
    Ok(frame)
}

pub fn serialize_frame_document<T>(frame: &ImageFrame<T>) -> String
where
    T: Scalar + Serialize,
{
    let doc = FrameDoc {
        frame_id: frame.frame_id.clone(),
        width: frame.width,
        height: frame.height,
        instances: frame
            .instances
            .iter()
            .map(|i| InstanceDoc {
                instance_id: i.instance_id.clone(),
                bbox_visible: i.bbox_visible.to_array(),
                keypoints: i.keypoints.to_vec(),
                mask: MaskDocument::from_mask(&i.mask),
                citypersons: i.body_extent,
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("frame document serializes")
}

/// Output document for one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsDocument<T = f64> {
    pub frame_id: String,
    pub instances: Vec<InstanceResult<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult<T = f64> {
    pub instance_id: String,
    pub occlusion_percent: T,
    pub visible_bsa_percent: T,
    pub occluded_parts: Vec<SemanticPart>,
    pub keypoint_visibility: Vec<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
}

/// Builds the output document, in frame instance order, with percentages
/// rounded to two decimals.
pub fn results_document<T: Scalar>(
    frame: &ImageFrame<T>,
    results: &[OcclusionResult<T>],
    scheme: Option<&DatasetScheme>,
) -> Result<ResultsDocument<T>> {
    let known: HashSet<&str> = frame.instances.iter().map(|i| i.instance_id.as_str()).collect();
    let mut by_id: HashMap<&str, &OcclusionResult<T>> = HashMap::new();
    for r in results {
        if !known.contains(r.instance_id.as_str()) {
            return Err(Error::Consistency(format!(
                "result for unknown instance `{}` in frame `{}`",
                r.instance_id, frame.frame_id
            )));
        }
        if by_id.insert(r.instance_id.as_str(), r).is_some() {
            return Err(Error::Consistency(format!(
                "two results for instance `{}`",
                r.instance_id
            )));
        }
    }

    let mut instances = Vec::with_capacity(frame.instances.len());
    for inst in &frame.instances {
        let r = by_id.get(inst.instance_id.as_str()).ok_or_else(|| {
            Error::Consistency(format!("no result for instance `{}`", inst.instance_id))
        })?;
        let category = match scheme {
            Some(s) => Some(s.categorize(r.occlusion_percent)?.to_owned()),
            None => None,
        };
        instances.push(InstanceResult {
            instance_id: inst.instance_id.clone(),
            occlusion_percent: round2(r.occlusion_percent),
            visible_bsa_percent: round2(r.visible_bsa_percent),
            occluded_parts: r.occluded_parts.iter().collect(),
            keypoint_visibility: r.keypoint_verdicts.iter().map(|v| v.visible).collect(),
            category,
        });
    }
    Ok(ResultsDocument {
        frame_id: frame.frame_id.clone(),
        instances,
    })
}

/// Serializes results as a pretty-printed output document.
pub fn serialize_results<T>(
    frame: &ImageFrame<T>,
    results: &[OcclusionResult<T>],
    scheme: Option<&DatasetScheme>,
) -> Result<String>
where
    T: Scalar + Serialize,
{
    let doc = results_document(frame, results, scheme)?;
    let mut text = serde_json::to_string_pretty(&doc).expect("results document serializes");
    text.push('\n');
    Ok(text)
}

pub fn parse_results_document<T>(text: &str) -> Result<ResultsDocument<T>>
where
    T: Scalar + DeserializeOwned,
{
    from_json(text)
}
