mod common;

use common::{frame_with, mirror_bits, visible_set};
use occlometer::mask::{rle_decode, rle_encode, InstanceMask};
use occlometer::oracle::pixelwise;
use occlometer::synth::generate_scene;
use occlometer::{
    classify_frame, parse_frame_document, serialize_frame_document, ImageFrame, PairedInstance, VisibilityConfig,
};
use proptest::prelude::*;

fn occlusion(bits: u32) -> f64 {
    let frame = frame_with(visible_set(bits));
    classify_frame(&frame, &VisibilityConfig::default())[0].occlusion_percent
}

fn arb_mask() -> impl Strategy<Value = InstanceMask> {
    (1u32..24, 1u32..24).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<bool>(), (w * h) as usize)
            .prop_map(move |bits| InstanceMask::from_bits(w, h, bits).unwrap())
    })
}

proptest! {
    #[test]
    fn revealing_keypoints_never_raises_occlusion(a in 0u32..1 << 17, b in 0u32..1 << 17) {
        prop_assert!(occlusion(a | b) <= occlusion(a));
    }

    #[test]
    fn mirrored_visibility_scores_the_same(bits in 0u32..1 << 17) {
        prop_assert_eq!(occlusion(bits), occlusion(mirror_bits(bits)));
    }

    #[test]
    fn occlusion_stays_in_range(bits in 0u32..1 << 17) {
        let occ = occlusion(bits);
        prop_assert!((0.0..=100.0).contains(&occ));
    }

    #[test]
    fn higher_threshold_never_lowers_occlusion(
        seed in 0u64..4, index in 0u64..200, lo in 0.0f64..1.0, hi in 0.0f64..1.0,
    ) {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let mut frame = generate_scene::<f64>(seed, index).unwrap().frame;
        for inst in &mut frame.instances {
            for (i, kp) in inst.keypoints.iter_mut().enumerate() {
                if kp.score > 0.0 {
                    kp.score = ((seed as usize * 7 + i * 13) % 17) as f64 / 16.0;
                }
            }
        }
        let at = |t| classify_frame(&frame, &VisibilityConfig::new(t).unwrap());
        for (l, h) in at(lo).iter().zip(at(hi)) {
            prop_assert!(h.occlusion_percent >= l.occlusion_percent);
            prop_assert_eq!(h.visible_parts.bits() & !l.visible_parts.bits(), 0);
        }
    }

    #[test]
    fn rle_round_trips(mask in arb_mask()) {
        let counts = rle_encode(&mask);
        prop_assert_eq!(counts.iter().sum::<u64>(), mask.width() as u64 * mask.height() as u64);
        prop_assert_eq!(rle_decode(&counts, mask.width(), mask.height()).unwrap(), mask);
    }

    #[test]
    fn pixel_occlusion_respects_intersection_bounds(full in arb_mask(), seed in any::<u64>()) {
        let cover = InstanceMask::from_fn(full.width(), full.height(), |x, y| {
            (seed >> ((x * 7 + y * 3) % 64)) & 1 == 1
        });
        let occluded = full.difference(&cover).unwrap();
        let inter = full.intersection_area(&cover).unwrap();
        prop_assert!(inter <= full.area().min(cover.area()));
        prop_assert_eq!(occluded.area() + inter, full.area());
        let pair = PairedInstance { instance_id: "p".into(), mask_full: full.clone(), mask_occluded: occluded };
        match pixelwise(&pair) {
            Ok(px) => {
                prop_assert!((0.0..=1.0).contains(&px.occlusion));
                prop_assert_eq!(px.occlusion + px.visible_ratio, 1.0);
            }
            Err(_) => prop_assert_eq!(full.area(), 0),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn frame_documents_round_trip(seed in any::<u64>(), index in 0u64..400) {
        let frame = generate_scene::<f64>(seed, index).unwrap().frame;
        let text = serialize_frame_document(&frame);
        let back: ImageFrame = parse_frame_document(&text).unwrap();
        prop_assert_eq!(&back, &frame);
        prop_assert_eq!(serialize_frame_document(&back), text);
    }
}
