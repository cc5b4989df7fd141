//! Two-step keypoint visibility: detector score threshold, then a check that
//! the keypoint lands on the instance's own mask. Keypoints outside the
//! image are truncated and count as occluded.

use serde::{Deserialize, Serialize};

use crate::detections::{KeypointName, PedestrianInstance};
use crate::error::{Error, Result};
use crate::mask::pixel_index;
use crate::scalar::{lit, Scalar};

pub const DEFAULT_SCORE_THRESHOLD: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityConfig<T = f64> {
    score_threshold: T,
}

impl<T: Scalar> VisibilityConfig<T> {
    pub fn new(score_threshold: T) -> Result<Self> {
        if !(score_threshold >= T::zero() && score_threshold <= T::one()) {
            return Err(Error::Contract(format!(
                "keypoint threshold {score_threshold} outside [0, 1]"
            )));
        }
        Ok(Self { score_threshold })
    }

    pub fn score_threshold(&self) -> T {
        self.score_threshold
    }
}

impl<T: Scalar> Default for VisibilityConfig<T> {
    fn default() -> Self {
        Self {
            score_threshold: lit(DEFAULT_SCORE_THRESHOLD),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictReason {
    Visible,
    BelowThreshold,
    OutsideMask,
    OutsideImage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KeypointVerdict {
    pub name: KeypointName,
    pub visible: bool,
    pub reason: VerdictReason,
}

impl KeypointVerdict {
    pub fn new(name: KeypointName, reason: VerdictReason) -> Self {
        Self {
            name,
            visible: reason == VerdictReason::Visible,
            reason,
        }
    }
}

/// One verdict per keypoint, in [`KeypointName::ALL`] order. The first
/// failing check wins: image bounds, then score, then mask.
pub fn resolve_keypoint_visibility<T: Scalar>(
    instance: &PedestrianInstance<T>,
    frame_width: u32,
    frame_height: u32,
    config: &VisibilityConfig<T>,
) -> [KeypointVerdict; 17] {
    instance.keypoints.map(|kp| {
        let reason = match pixel_index(kp.x, kp.y, frame_width, frame_height) {
            None => VerdictReason::OutsideImage,
            Some(_) if kp.score < config.score_threshold => VerdictReason::BelowThreshold,
            Some(_) if !instance.mask.contains_point(kp.x, kp.y) => VerdictReason::OutsideMask,
            Some(_) => VerdictReason::Visible,
        };
        KeypointVerdict::new(kp.name, reason)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detections::Keypoint;
    use crate::geometry::Rect;
    use crate::mask::{rle_decode, InstanceMask};
    use proptest::prelude::*;

    fn instance(mask: InstanceMask, at: (f64, f64), score: f64) -> PedestrianInstance {
        PedestrianInstance {
            instance_id: "p".into(),
            keypoints: KeypointName::ALL.map(|name| Keypoint {
                name,
                x: at.0,
                y: at.1,
                score,
            }),
            mask,
            bbox_visible: Rect::default(),
            body_extent: None,
        }
    }

    #[test]
    fn visible_when_all_checks_pass() {
        let inst = instance(InstanceMask::full(4, 4), (1.0, 2.0), 0.9);
        let cfg = VisibilityConfig::new(0.5).unwrap();
        let v = resolve_keypoint_visibility(&inst, 4, 4, &cfg);
        assert!(v.iter().all(|v| v.visible && v.reason == VerdictReason::Visible));
    }

    #[test]
    fn truncated_keypoint_is_outside_image() {
        let inst = instance(InstanceMask::full(4, 4), (-5.0, 1.0), 0.9);
        let v = resolve_keypoint_visibility(&inst, 4, 4, &VisibilityConfig::new(0.5).unwrap());
        assert_eq!(v[0].reason, VerdictReason::OutsideImage);
        assert!(!v[0].visible);
    }

    #[test]
    fn unset_mask_pixel_is_outside_mask() {
        let mask = rle_decode(&[5u32, 3, 8], 4, 4).unwrap();
        let inst = instance(mask, (0.0, 0.0), 0.9);
        let v = resolve_keypoint_visibility(&inst, 4, 4, &VisibilityConfig::new(0.5).unwrap());
        assert_eq!(v[0].reason, VerdictReason::OutsideMask);
    }

    #[test]
    fn low_score_beats_mask_check() {
        let inst = instance(InstanceMask::empty(4, 4), (1.0, 1.0), 0.1);
        let v = resolve_keypoint_visibility(&inst, 4, 4, &VisibilityConfig::default());
        assert_eq!(v[0].reason, VerdictReason::BelowThreshold);
        // score equal to the threshold passes
        let inst = instance(InstanceMask::full(4, 4), (1.0, 1.0), 0.3);
        let v = resolve_keypoint_visibility(&inst, 4, 4, &VisibilityConfig::default());
        assert!(v[0].visible);
    }

    #[test]
    fn threshold_must_be_a_fraction() {
        assert!(VisibilityConfig::new(1.5).is_err());
        assert!(VisibilityConfig::new(-0.1).is_err());
        assert!(VisibilityConfig::new(f64::NAN).is_err());
        assert_eq!(VisibilityConfig::<f32>::default().score_threshold(), 0.3f32);
    }

    fn arb_instance() -> impl Strategy<Value = PedestrianInstance> {
        (
            proptest::collection::vec(any::<bool>(), 36),
            proptest::collection::vec((-2.0f64..8.0, -2.0f64..8.0, 0.0f64..=1.0), 17),
        )
            .prop_map(|(bits, kps)| {
                let mask = InstanceMask::from_bits(6, 6, bits).unwrap();
                let mut inst = instance(mask, (0.0, 0.0), 0.0);
                for (kp, (x, y, s)) in inst.keypoints.iter_mut().zip(kps) {
                    kp.x = x;
                    kp.y = y;
                    kp.score = s;
                }
                inst
            })
    }

    proptest! {
        #[test]
        fn raising_threshold_never_reveals(inst in arb_instance(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let v_lo = resolve_keypoint_visibility(&inst, 6, 6, &VisibilityConfig::new(lo).unwrap());
            let v_hi = resolve_keypoint_visibility(&inst, 6, 6, &VisibilityConfig::new(hi).unwrap());
            for (l, h) in v_lo.iter().zip(&v_hi) {
                prop_assert!(!h.visible || l.visible);
            }
        }

        #[test]
        fn full_mask_zero_threshold_shows_in_bounds(inst in arb_instance()) {
            let mut inst = inst;
            inst.mask = InstanceMask::full(6, 6);
            let v = resolve_keypoint_visibility(&inst, 6, 6, &VisibilityConfig::new(0.0).unwrap());
            for (kp, verdict) in inst.keypoints.iter().zip(&v) {
                let in_bounds = pixel_index(kp.x, kp.y, 6, 6).is_some();
                prop_assert_eq!(verdict.visible, in_bounds);
            }
        }
    }
}
