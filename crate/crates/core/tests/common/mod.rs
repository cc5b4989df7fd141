#![allow(dead_code)]

use occlometer::mask::InstanceMask;
use occlometer::{ImageFrame, Keypoint, KeypointName, PedestrianInstance, Rect};

pub const W: u32 = 32;
pub const H: u32 = 32;

/// Frame with one instance whose mask covers the whole image and whose
/// keypoints sit on distinct pixels; `visible` picks which clear the
/// default score threshold.
pub fn frame_with(visible: impl Fn(KeypointName) -> bool) -> ImageFrame {
    let keypoints = KeypointName::ALL.map(|name| {
        let i = name.index() as f64;
        Keypoint {
            name,
            x: 2.0 + i,
            y: 3.0 + i,
            score: if visible(name) { 0.9 } else { 0.1 },
        }
    });
    ImageFrame {
        frame_id: "f".into(),
        width: W,
        height: H,
        instances: vec![PedestrianInstance {
            instance_id: "p".into(),
            keypoints,
            mask: InstanceMask::full(W, H),
            bbox_visible: Rect::new(0.0, 0.0, W as f64, H as f64).unwrap(),
            body_extent: None,
        }],
    }
}

pub fn visible_set(bits: u32) -> impl Fn(KeypointName) -> bool {
    move |n| bits & (1 << n.index()) != 0
}

pub fn mirror_bits(bits: u32) -> u32 {
    KeypointName::ALL
        .iter()
        .filter(|n| bits & (1 << n.index()) != 0)
        .fold(0, |acc, n| acc | 1 << n.mirrored().index())
}
