//! Visible body surface area from keypoint verdicts.
//!
//! Eleven semantic parts carry a 2D-adapted Rule of Nines weight. A part is
//! visible when its keypoint requirement holds: any facial keypoint for the
//! head, both endpoints for every other part. Weights total 99%, so the
//! visible share is normalised by 99 and a fully visible pedestrian scores
//! 0% occlusion.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::detections::{ImageFrame, KeypointName, PedestrianInstance};
use crate::error::{Error, Result};
use crate::scalar::{count, Scalar};
use crate::visibility::{resolve_keypoint_visibility, KeypointVerdict, VisibilityConfig};

use KeypointName as K;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemanticPart {
    Head,
    UpperTorso,
    UpperLeftArm,
    LowerLeftArm,
    UpperRightArm,
    LowerRightArm,
    LowerTorso,
    UpperLeftLeg,
    LowerLeftLeg,
    UpperRightLeg,
    LowerRightLeg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Requirement {
    AnyOf(&'static [KeypointName]),
    AllOf(&'static [KeypointName]),
}

impl Requirement {
    pub fn holds(&self, visible: impl Fn(KeypointName) -> bool) -> bool {
        match self {
            Requirement::AnyOf(names) => names.iter().any(|&n| visible(n)),
            Requirement::AllOf(names) => names.iter().all(|&n| visible(n)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartSpec {
    pub part: SemanticPart,
    /// Weight in half-percent units, so 4.5% is exactly 9.
    pub half_percent: u32,
    pub requirement: Requirement,
}

const FACE: &[KeypointName] = &[K::Nose, K::LeftEye, K::RightEye, K::LeftEar, K::RightEar];

pub const PARTS: [PartSpec; 11] = [
    part(SemanticPart::Head, 18, Requirement::AnyOf(FACE)),
    part(SemanticPart::UpperTorso, 36, Requirement::AllOf(&[K::LeftShoulder, K::RightShoulder])),
    part(SemanticPart::UpperLeftArm, 9, Requirement::AllOf(&[K::LeftShoulder, K::LeftElbow])),
    part(SemanticPart::LowerLeftArm, 9, Requirement::AllOf(&[K::LeftElbow, K::LeftWrist])),
    part(SemanticPart::UpperRightArm, 9, Requirement::AllOf(&[K::RightShoulder, K::RightElbow])),
    part(SemanticPart::LowerRightArm, 9, Requirement::AllOf(&[K::RightElbow, K::RightWrist])),
    part(SemanticPart::LowerTorso, 36, Requirement::AllOf(&[K::LeftHip, K::RightHip])),
    part(SemanticPart::UpperLeftLeg, 18, Requirement::AllOf(&[K::LeftHip, K::LeftKnee])),
    part(SemanticPart::LowerLeftLeg, 18, Requirement::AllOf(&[K::LeftKnee, K::LeftAnkle])),
    part(SemanticPart::UpperRightLeg, 18, Requirement::AllOf(&[K::RightHip, K::RightKnee])),
    part(SemanticPart::LowerRightLeg, 18, Requirement::AllOf(&[K::RightKnee, K::RightAnkle])),
];

const fn part(part: SemanticPart, half_percent: u32, requirement: Requirement) -> PartSpec {
    PartSpec {
        part,
        half_percent,
        requirement,
    }
}

/// Sum of all part weights in half-percent units (99%).
pub const TOTAL_HALF_PERCENT: u32 = {
    let mut sum = 0;
    let mut i = 0;
    while i < PARTS.len() {
        sum += PARTS[i].half_percent;
        i += 1;
    }
    sum
};

const _: () = assert!(TOTAL_HALF_PERCENT == 198);

impl SemanticPart {
    pub const ALL: [SemanticPart; 11] = [
        SemanticPart::Head,
        SemanticPart::UpperTorso,
        SemanticPart::UpperLeftArm,
        SemanticPart::LowerLeftArm,
        SemanticPart::UpperRightArm,
        SemanticPart::LowerRightArm,
        SemanticPart::LowerTorso,
        SemanticPart::UpperLeftLeg,
        SemanticPart::LowerLeftLeg,
        SemanticPart::UpperRightLeg,
        SemanticPart::LowerRightLeg,
    ];

    pub fn spec(self) -> &'static PartSpec {
        &PARTS[self as usize]
    }

    pub fn bsa_percent<T: Scalar>(self) -> T {
        count::<T>(self.spec().half_percent as u64) / count(2)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SemanticPart::Head => "head",
            SemanticPart::UpperTorso => "upper_torso",
            SemanticPart::UpperLeftArm => "upper_left_arm",
            SemanticPart::LowerLeftArm => "lower_left_arm",
            SemanticPart::UpperRightArm => "upper_right_arm",
            SemanticPart::LowerRightArm => "lower_right_arm",
            SemanticPart::LowerTorso => "lower_torso",
            SemanticPart::UpperLeftLeg => "upper_left_leg",
            SemanticPart::LowerLeftLeg => "lower_left_leg",
            SemanticPart::UpperRightLeg => "upper_right_leg",
            SemanticPart::LowerRightLeg => "lower_right_leg",
        }
    }
}

impl fmt::Display for SemanticPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Set of semantic parts as an 11-bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PartSet(u16);

impl PartSet {
    pub const EMPTY: PartSet = PartSet(0);
    pub const ALL: PartSet = PartSet((1 << 11) - 1);

    pub fn from_bits(bits: u16) -> Self {
        PartSet(bits & Self::ALL.0)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn contains(self, part: SemanticPart) -> bool {
        self.0 >> part as u16 & 1 == 1
    }

    pub fn insert(&mut self, part: SemanticPart) {
        self.0 |= 1 << part as u16;
    }

    pub fn complement(self) -> Self {
        PartSet(!self.0 & Self::ALL.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = SemanticPart> {
        SemanticPart::ALL.into_iter().filter(move |&p| self.contains(p))
    }

    /// Summed weight in half-percent units.
    pub fn half_percent(self) -> u32 {
        self.iter().map(|p| p.spec().half_percent).sum()
    }

    /// Visible surface share in percent of the 99% model total.
    pub fn visible_bsa_percent<T: Scalar>(self) -> T {
        count::<T>(100 * self.half_percent() as u64) / count(TOTAL_HALF_PERCENT as u64)
    }
}

impl FromIterator<SemanticPart> for PartSet {
    fn from_iter<I: IntoIterator<Item = SemanticPart>>(iter: I) -> Self {
        let mut set = PartSet::EMPTY;
        for p in iter {
            set.insert(p);
        }
        set
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OcclusionResult<T = f64> {
    pub instance_id: String,
    pub visible_parts: PartSet,
    pub occluded_parts: PartSet,
    pub visible_bsa_percent: T,
    pub occlusion_percent: T,
    pub keypoint_verdicts: [KeypointVerdict; 17],
}

/// Parts whose keypoint requirement is met by the visible verdicts.
pub fn part_visibility(verdicts: &[KeypointVerdict]) -> Result<PartSet> {
    let mut visible = [None; 17];
    for v in verdicts {
        let slot = &mut visible[v.name.index()];
        if slot.is_some() {
            return Err(Error::Contract(format!("duplicate verdict for `{}`", v.name)));
        }
        *slot = Some(v.visible);
    }
    if let Some(i) = visible.iter().position(Option::is_none) {
        return Err(Error::Contract(format!(
            "missing verdict for `{}`",
            KeypointName::ALL[i]
        )));
    }
    let is_visible = |n: KeypointName| visible[n.index()] == Some(true);
    Ok(PARTS
        .iter()
        .filter(|spec| spec.requirement.holds(is_visible))
        .map(|spec| spec.part)
        .collect())
}

/// Scores a set of visible parts.
pub fn occlusion_from_parts<T: Scalar>(
    instance_id: impl Into<String>,
    visible_parts: PartSet,
    keypoint_verdicts: [KeypointVerdict; 17],
) -> OcclusionResult<T> {
    let visible_bsa_percent: T = visible_parts.visible_bsa_percent();
    OcclusionResult {
        instance_id: instance_id.into(),
        visible_parts,
        occluded_parts: visible_parts.complement(),
        visible_bsa_percent,
        occlusion_percent: count::<T>(100) - visible_bsa_percent,
        keypoint_verdicts,
    }
}

/// Full pipeline for one instance: keypoint verdicts, part grouping and
/// visible surface area.
pub fn classify_occlusion<T: Scalar>(
    instance: &PedestrianInstance<T>,
    frame: &ImageFrame<T>,
    config: &VisibilityConfig<T>,
) -> OcclusionResult<T> {
    let verdicts = resolve_keypoint_visibility(instance, frame.width, frame.height, config);
    let visible = part_visibility(&verdicts).expect("one verdict per keypoint");
    occlusion_from_parts(instance.instance_id.clone(), visible, verdicts)
}

pub fn classify_frame<T: Scalar>(
    frame: &ImageFrame<T>,
    config: &VisibilityConfig<T>,
) -> Vec<OcclusionResult<T>> {
    frame
        .instances
        .iter()
        .map(|i| classify_occlusion(i, frame, config))
        .collect()
}
