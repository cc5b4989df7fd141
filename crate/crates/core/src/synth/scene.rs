//! Paired validation scenes: a reference pedestrian, the same pedestrian
//! under an occluder, and the detections a perfect keypoint/mask model
//! would report for the occluded image.
//!
//! Scene `i` targets occlusion decile `i % 10`, and the scenario cycles
//! through a fixed schedule of twenty slots weighted toward occlusion from
//! the bottom edge. Occluder size is fitted to a random target inside the
//! decile by counting covered pixels of the reference silhouette.

use crate::bsa::{part_visibility, PartSet};
use crate::detections::{ImageFrame, PedestrianInstance};
use crate::error::Result;
use crate::geometry::{Point2, Rect};
use crate::mask::{pixel_index, InstanceMask};
use crate::oracle::PairedInstance;
use crate::scalar::{lit, Scalar};
use crate::visibility::{KeypointVerdict, VerdictReason};

use super::figure::{instance_from_geometry, visible_bbox, FigureGeometry, FigureSpec, Pose};
use super::occluder::{occlude_with, render_occluder, OccluderShape, OccluderSpec, RenderedOccluder};
use super::rng::SceneRng;

pub const FRAME_WIDTH: u32 = 256;
pub const FRAME_HEIGHT: u32 = 320;

const MIN_HEIGHT: f64 = 140.0;
const MAX_HEIGHT: f64 = 240.0;
/// Horizontal clearance kept between an unoccluded figure and the border.
const SIDE_MARGIN: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Strip rising from the bottom of the frame.
    BottomStrip,
    HorizontalStrip,
    VerticalStrip,
    Rectangle,
    SecondPedestrian,
    /// Figure pushed partly out of the frame.
    Truncation,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::BottomStrip => "bottom_strip",
            Scenario::HorizontalStrip => "horizontal_strip",
            Scenario::VerticalStrip => "vertical_strip",
            Scenario::Rectangle => "rectangle",
            Scenario::SecondPedestrian => "second_pedestrian",
            Scenario::Truncation => "truncation",
        }
    }
}

use Scenario::*;

pub const SCHEDULE: [Scenario; 20] = [
    BottomStrip,
    Rectangle,
    VerticalStrip,
    SecondPedestrian,
    BottomStrip,
    Truncation,
    HorizontalStrip,
    Rectangle,
    BottomStrip,
    SecondPedestrian,
    VerticalStrip,
    BottomStrip,
    Rectangle,
    Truncation,
    BottomStrip,
    SecondPedestrian,
    HorizontalStrip,
    VerticalStrip,
    BottomStrip,
    Rectangle,
];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScene<T = f64> {
    pub frame: ImageFrame<T>,
    pub pair: PairedInstance,
    pub scenario: Scenario,
    pub target_occlusion: f64,
    pub analytic_occlusion: T,
    /// Parts whose keypoints the occluder or the frame border hides.
    pub occluded_parts: PartSet,
}

impl<T: Scalar> SyntheticScene<T> {
    pub fn target(&self) -> &PedestrianInstance<T> {
        &self.frame.instances[0]
    }
}

pub fn generate_scenes<T: Scalar>(count: usize, seed: u64) -> Result<Vec<SyntheticScene<T>>> {
    (0..count as u64).map(|i| generate_scene(seed, i)).collect()
}

pub fn generate_scene<T: Scalar>(seed: u64, index: u64) -> Result<SyntheticScene<T>> {
    let mut rng = SceneRng::new(seed, index);
    let decile = index % 10;
    let slot = (index / 10) as usize % SCHEDULE.len();
    let scenario = SCHEDULE[slot];
    let target = if decile == 0 && slot == 0 {
        0.0
    } else {
        (decile as f64 + rng.range(0.1, 0.9)) / 10.0
    };

    let height = rng.range(MIN_HEIGHT, MAX_HEIGHT);
    let pose = Pose::ALL[rng.below(Pose::ALL.len())];
    let figure_seed = rng.next_u64();
    let anchor = (
        rng.range(0.4, 0.6) * FRAME_WIDTH as f64,
        FRAME_HEIGHT as f64 - rng.range(6.0, 30.0),
    );
    let anchor = fit_horizontally(anchor, height, pose, figure_seed)?;
    let spec = |x: f64, y: f64| FigureSpec::new(Point2::new(lit::<T>(x), lit(y)), lit(height), pose, figure_seed);

    let frame_id = format!("scene_{index:04}");
    let target_id = format!("{frame_id}/p0");

    let (occluded, front) = if scenario == Truncation {
        (truncate(&mut rng, target, anchor, height, pose, figure_seed, &target_id)?, None)
    } else {
        let geometry = FigureGeometry::build(&spec(anchor.0, anchor.1)?)?;
        let reference = instance_from_geometry(&geometry, target_id.clone(), FRAME_WIDTH, FRAME_HEIGHT);
        let occluder = fit_occluder::<T>(&mut rng, scenario, target, &reference.mask, anchor, height)?;
        let rendered = render_occluder(&occluder, FRAME_WIDTH, FRAME_HEIGHT)?;
        let front = rendered.figure.clone().map(|mut f| {
            f.instance_id = format!("{frame_id}/p1");
            f
        });
        let out = occlude_with(&reference, rendered)?;
        (
            Occluded {
                pair: out.pair.clone(),
                analytic: out.analytic_occlusion(),
                detection: out.instance,
            },
            front,
        )
    };

    let occluded_parts = ground_truth_parts(&occluded.detection);
    let mut instances = vec![occluded.detection];
    instances.extend(front);
    Ok(SyntheticScene {
        frame: ImageFrame {
            frame_id,
            width: FRAME_WIDTH,
            height: FRAME_HEIGHT,
            instances,
        },
        pair: occluded.pair,
        scenario,
        target_occlusion: target,
        analytic_occlusion: occluded.analytic,
        occluded_parts,
    })
}

struct Occluded<T> {
    pair: PairedInstance,
    analytic: T,
    detection: PedestrianInstance<T>,
}

/// Shifts the anchor so the whole silhouette clears the side borders.
fn fit_horizontally(anchor: (f64, f64), height: f64, pose: Pose, seed: u64) -> Result<(f64, f64)> {
    let g = FigureGeometry::<f64>::build(&FigureSpec::new(Point2::new(anchor.0, anchor.1), height, pose, seed)?)?;
    let (x0, _, x1, _) = g.extent();
    let right = FRAME_WIDTH as f64 - 1.0 - SIDE_MARGIN;
    let dx = (SIDE_MARGIN - x0).max(0.0) - (x1 - right).max(0.0);
    Ok((anchor.0 + dx, anchor.1))
}

fn set_pixels(mask: &InstanceMask) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) {
                out.push((x as f64, y as f64));
            }
        }
    }
    out
}

fn covered_fraction(pixels: &[(f64, f64)], r: &Rect<f64>) -> f64 {
    let n = pixels
        .iter()
        .filter(|&&(x, y)| x >= r.x_min && x < r.x_max && y >= r.y_min && y < r.y_max)
        .count();
    n as f64 / pixels.len() as f64
}

/// Bisection on a coverage that grows with `t`.
fn fit_increasing(target: f64, mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut best = (f64::INFINITY, lo);
    for _ in 0..48 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if (v - target).abs() < best.0 {
            best = ((v - target).abs(), mid);
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    for t in [lo, hi] {
        if (f(t) - target).abs() < best.0 {
            best = ((f(t) - target).abs(), t);
        }
    }
    best.1
}

/// Exhaustive scan over integer offsets; first best wins.
fn fit_scan(target: f64, range: std::ops::RangeInclusive<i64>, f: impl Fn(i64) -> f64) -> i64 {
    let mut best = (f64::INFINITY, *range.start());
    for d in range {
        let err = (f(d) - target).abs();
        if err < best.0 {
            best = (err, d);
        }
    }
    best.1
}

fn fit_occluder<T: Scalar>(
    rng: &mut SceneRng,
    scenario: Scenario,
    target: f64,
    reference: &InstanceMask,
    anchor: (f64, f64),
    height: f64,
) -> Result<OccluderSpec<T>> {
    let pixels = set_pixels(reference);
    let (ex0, ey0, ex1, ey1) = reference.pixel_extent().expect("figure inside frame");
    let (x0, y0, x1, y1) = (ex0 as f64 - 0.5, ey0 as f64 - 0.5, ex1 as f64 + 0.5, ey1 as f64 + 0.5);
    let (w, h) = (x1 - x0, y1 - y0);
    let (fw, fh) = (FRAME_WIDTH as f64, FRAME_HEIGHT as f64);
    let rect = |a: f64, b: f64, c: f64, d: f64| Rect { x_min: a, y_min: b, x_max: c, y_max: d };

    let (shape, placement) = match scenario {
        BottomStrip => {
            let r = |t: f64| rect(-1.0, y1 - t * h, fw + 1.0, fh + 1.0);
            let t = fit_increasing(target, 0.0, 1.02, |t| covered_fraction(&pixels, &r(t)));
            (OccluderShape::HorizontalStrip, r(t))
        }
        HorizontalStrip => {
            let c = y0 + rng.range(0.15, 0.85) * h;
            let r = |t: f64| rect(-1.0, c - t * h, fw + 1.0, c + t * h);
            let t = fit_increasing(target, 0.0, 1.02, |t| covered_fraction(&pixels, &r(t)));
            (OccluderShape::HorizontalStrip, r(t))
        }
        VerticalStrip => {
            let from_left = rng.coin();
            let r = |t: f64| {
                if from_left {
                    rect(-1.0, -1.0, x0 + t * w, fh + 1.0)
                } else {
                    rect(x1 - t * w, -1.0, fw + 1.0, fh + 1.0)
                }
            };
            let t = fit_increasing(target, 0.0, 1.02, |t| covered_fraction(&pixels, &r(t)));
            (OccluderShape::VerticalStrip, r(t))
        }
        Rectangle => {
            let cx = x0 + rng.range(0.2, 0.8) * w;
            let cy = y0 + rng.range(0.2, 0.8) * h;
            let aspect = rng.range(0.5, 1.5);
            let r = |t: f64| {
                let (hw, hh) = (t * aspect * w, t * h);
                rect(cx - hw, cy - hh, cx + hw, cy + hh)
            };
            let t = fit_increasing(target, 0.0, 2.5, |t| covered_fraction(&pixels, &r(t)));
            (OccluderShape::Rectangle, r(t))
        }
        SecondPedestrian => {
            let h2 = height * rng.range(0.85, 1.1);
            let pose = Pose::ALL[rng.below(Pose::ALL.len())];
            let seed = rng.next_u64();
            let y2 = (anchor.1 + rng.range(2.0, 5.0)).min(fh - 1.0);
            let sign = if rng.coin() { 1.0 } else { -1.0 };
            let base = FigureGeometry::<f64>::build(&FigureSpec::new(Point2::new(anchor.0, y2), h2, pose, seed)?)?;
            let (bx0, _, bx1, _) = base.extent();
            // rasterize once on a widened canvas and slide it by whole pixels
            let pad = (bx1 - bx0).ceil() as i64 + 2;
            let shifted = FigureGeometry::<f64>::build(&FigureSpec::new(
                Point2::new(anchor.0 + pad as f64, y2),
                h2,
                pose,
                seed,
            )?)?
            .rasterize(FRAME_WIDTH + 2 * pad as u32, FRAME_HEIGHT);
            let reach = (w + (bx1 - bx0)).ceil() as i64;
            let d = fit_scan(target, 0..=reach, |d| {
                let n = pixels
                    .iter()
                    .filter(|&&(x, y)| {
                        let sx = x as i64 - (sign as i64) * d + pad;
                        sx >= 0 && shifted.get(sx as u32, y as u32)
                    })
                    .count();
                n as f64 / pixels.len() as f64
            });
            let cx = anchor.0 + sign * d as f64;
            let half = 0.205 * h2;
            (
                OccluderShape::SecondPedestrian { pose, seed },
                rect(cx - half, y2 - h2, cx + half, y2),
            )
        }
        Truncation => unreachable!("truncation is built on a padded canvas"),
    };
    OccluderSpec::new(
        shape,
        Rect {
            x_min: lit(placement.x_min),
            y_min: lit(placement.y_min),
            x_max: lit(placement.x_max),
            y_max: lit(placement.y_max),
        },
        lit(target),
    )
}

/// Renders the figure on a canvas padded on every side, slides it across
/// the frame border and treats everything outside the frame window as
/// occluded. The detection is the frame-window crop.
fn truncate<T: Scalar>(
    rng: &mut SceneRng,
    target: f64,
    anchor: (f64, f64),
    height: f64,
    pose: Pose,
    seed: u64,
    instance_id: &str,
) -> Result<Occluded<T>> {
    let pad = (height + 40.0).ceil() as u32;
    let (cw, ch) = (FRAME_WIDTH + 2 * pad, FRAME_HEIGHT + 2 * pad);
    let p = pad as f64;
    // 0: bottom, 1: left, 2: right
    let side = [0, 0, 1, 2][rng.below(4)];
    let moved = |d: f64| match side {
        0 => (anchor.0 + p, anchor.1 + p + d),
        1 => (anchor.0 + p - d, anchor.1 + p),
        _ => (anchor.0 + p + d, anchor.1 + p),
    };

    let base = FigureGeometry::<f64>::build(&FigureSpec::new(Point2::new(moved(0.0).0, moved(0.0).1), height, pose, seed)?)?
        .rasterize(cw, ch);
    let pixels = set_pixels(&base);
    let (lo_x, hi_x, hi_y) = (p, p + FRAME_WIDTH as f64, p + FRAME_HEIGHT as f64);
    let d = fit_scan(target, 0..=(height as i64 + 40), |d| {
        let d = d as f64;
        let n = pixels
            .iter()
            .filter(|&&(x, y)| match side {
                0 => y + d >= hi_y,
                1 => x - d < lo_x,
                _ => x + d >= hi_x,
            })
            .count();
        n as f64 / pixels.len() as f64
    });

    let (ax, ay) = moved(d as f64);
    let geometry = FigureGeometry::build(&FigureSpec::new(Point2::new(lit::<T>(ax), lit(ay)), lit(height), pose, seed)?)?;
    let canvas = instance_from_geometry(&geometry, instance_id.to_owned(), cw, ch);
    let outside = InstanceMask::from_fn(cw, ch, |x, y| {
        x < pad || y < pad || x >= pad + FRAME_WIDTH || y >= pad + FRAME_HEIGHT
    });
    let out = occlude_with(&canvas, RenderedOccluder { mask: outside, figure: None })?;

    let shift: T = lit(p);
    let mut detection = canvas.clone();
    detection.mask = canvas.mask.crop(pad, pad, FRAME_WIDTH, FRAME_HEIGHT);
    detection.bbox_visible = visible_bbox(&detection.mask);
    for kp in &mut detection.keypoints {
        kp.x = kp.x - shift;
        kp.y = kp.y - shift;
    }
    if let Some(ext) = &mut detection.body_extent {
        for pt in [&mut ext.head_top, &mut ext.feet_mid] {
            pt.x = pt.x - shift;
            pt.y = pt.y - shift;
        }
    }
    Ok(Occluded {
        pair: out.pair.clone(),
        analytic: out.analytic_occlusion(),
        detection,
    })
}

/// Parts hidden by construction: a keypoint counts as hidden when it lies
/// outside the frame or the occluder zeroed its score.
fn ground_truth_parts<T: Scalar>(inst: &PedestrianInstance<T>) -> PartSet {
    let verdicts: Vec<KeypointVerdict> = inst
        .keypoints
        .iter()
        .map(|kp| {
            let reason = if pixel_index(kp.x, kp.y, FRAME_WIDTH, FRAME_HEIGHT).is_none() {
                VerdictReason::OutsideImage
            } else if kp.score == T::zero() {
                VerdictReason::OutsideMask
            } else {
                VerdictReason::Visible
            };
            KeypointVerdict::new(kp.name, reason)
        })
        .collect();
    part_visibility(&verdicts).expect("17 verdicts").complement()
}

/// `instance_id,analytic_occlusion,occluded_parts` with parts joined by `;`.
pub fn ground_truth_csv<T: Scalar>(scenes: &[SyntheticScene<T>]) -> String {
    let mut out = String::from("instance_id,analytic_occlusion,occluded_parts\n");
    for s in scenes {
        let parts: Vec<&str> = s.occluded_parts.iter().map(|p| p.as_str()).collect();
        out.push_str(&format!(
            "{},{},{}\n",
            s.pair.instance_id,
            s.analytic_occlusion,
            parts.join(";")
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::pixelwise;

    #[test]
    fn scenes_are_deterministic() {
        let a = generate_scene::<f64>(42, 17).unwrap();
        let b = generate_scene::<f64>(42, 17).unwrap();
        assert_eq!(a, b);
        let c = generate_scene::<f64>(43, 17).unwrap();
        assert_ne!(a.pair, c.pair);
    }

    #[test]
    fn every_scenario_builds_an_exact_pair() {
        for i in 0..40 {
            let s = generate_scene::<f64>(7, i).unwrap();
            s.frame.validate().unwrap();
            let px = pixelwise(&s.pair).unwrap();
            assert_eq!(px.occlusion, s.analytic_occlusion, "scene {i}");
            assert_eq!(s.pair.instance_id, s.target().instance_id);
        }
    }

    #[test]
    fn bottom_strips_reach_the_frame_edge() {
        let s = generate_scene::<f64>(3, 41).unwrap();
        assert_eq!(s.scenario, BottomStrip);
        let m = &s.pair.mask_occluded;
        let (_, _, _, y_last) = m.pixel_extent().unwrap();
        let (_, _, _, y_full) = s.pair.mask_full.pixel_extent().unwrap();
        assert!(y_last < y_full);
    }

    #[test]
    fn first_scene_is_unoccluded() {
        let s = generate_scene::<f64>(0, 0).unwrap();
        assert_eq!(s.analytic_occlusion, 0.0);
        assert!(s.occluded_parts.is_empty());
    }

    #[test]
    fn fitted_occlusion_tracks_target() {
        let scenes = generate_scenes::<f64>(60, 11).unwrap();
        for s in scenes.iter().filter(|s| matches!(s.scenario, BottomStrip | VerticalStrip | Rectangle)) {
            assert!(
                (s.analytic_occlusion - s.target_occlusion).abs() < 0.05,
                "{:?} target {} got {}",
                s.scenario,
                s.target_occlusion,
                s.analytic_occlusion
            );
        }
    }
}
