//! Stick-figure pedestrians built from capsules.
//!
//! Body units put the hip midpoint at the origin with y pointing down; the
//! figure is then scaled so its silhouette is `height` pixels tall and
//! translated so the bottom-centre sits on the anchor. Segment widths make
//! the silhouette areas of the eleven parts track their surface-area
//! weights.

use crate::bsa::SemanticPart;
use crate::detections::{BodyExtent, Keypoint, KeypointName, PedestrianInstance};
use crate::error::{Error, Result};
use crate::geometry::{Point2, Rect};
use crate::mask::InstanceMask;
use crate::scalar::{lit, Scalar};

use super::rng::SceneRng;

pub const MIN_FIGURE_HEIGHT: f64 = 40.0;

/// Capsules thinner than this (in pixels) could miss their own keypoints
/// after rounding.
const MIN_RADIUS_PX: f64 = 1.0;

const TORSO_LENGTH: f64 = 0.30;
const NECK_TO_HEAD: f64 = 0.13;
const SHOULDER_HALF_SPAN: f64 = 0.075;
const HIP_HALF_SPAN: f64 = 0.055;
const UPPER_ARM: f64 = 0.16;
const FOREARM: f64 = 0.15;
const THIGH: f64 = 0.24;
const SHIN: f64 = 0.235;

const HEAD_RADIUS: f64 = 0.06;
const TORSO_RADIUS: f64 = 0.058;
const ARM_RADIUS: f64 = 0.0155;
const LEG_RADIUS: f64 = 0.021;

const JOINT_JITTER: f64 = 0.08;
const LEAN_JITTER: f64 = 0.04;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pose {
    Standing,
    Walking,
    Running,
    Cycling,
}

impl Pose {
    pub const ALL: [Pose; 4] = [Pose::Standing, Pose::Walking, Pose::Running, Pose::Cycling];

    pub fn as_str(self) -> &'static str {
        match self {
            Pose::Standing => "standing",
            Pose::Walking => "walking",
            Pose::Running => "running",
            Pose::Cycling => "cycling",
        }
    }

    /// Segment angles from straight down, radians, positive toward +x.
    fn angles(self) -> PoseAngles {
        let (ua, fa, th, sh, lean) = match self {
            Pose::Standing => ((0.12, -0.12), (0.06, -0.06), (0.04, -0.04), (0.0, 0.0), 0.0),
            Pose::Walking => ((-0.30, 0.35), (-0.10, 0.60), (0.35, -0.30), (0.15, -0.55), 0.05),
            Pose::Running => ((-0.70, 0.60), (0.60, 1.60), (0.85, -0.45), (-0.30, -1.00), 0.15),
            Pose::Cycling => ((0.90, 0.80), (1.30, 1.20), (1.30, 0.60), (-0.20, -0.10), 0.60),
        };
        PoseAngles {
            upper_arm: ua,
            forearm: fa,
            thigh: th,
            shin: sh,
            lean,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct PoseAngles {
    upper_arm: (f64, f64),
    forearm: (f64, f64),
    thigh: (f64, f64),
    shin: (f64, f64),
    lean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureSpec<T = f64> {
    /// Bottom-centre of the silhouette, in pixels.
    pub anchor: Point2<T>,
    pub height: T,
    pub pose: Pose,
    pub seed: u64,
}

impl<T: Scalar> FigureSpec<T> {
    pub fn new(anchor: Point2<T>, height: T, pose: Pose, seed: u64) -> Result<Self> {
        if !(height >= lit(MIN_FIGURE_HEIGHT)) {
            return Err(Error::Spec(format!(
                "figure height {height} below the {MIN_FIGURE_HEIGHT}px minimum"
            )));
        }
        Ok(Self {
            anchor,
            height,
            pose,
            seed,
        })
    }
}

/// Which body region a capsule belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeRole {
    Head,
    /// Split into upper and lower torso at the capsule midpoint.
    Torso,
    Limb(SemanticPart),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capsule<T = f64> {
    pub a: Point2<T>,
    pub b: Point2<T>,
    pub radius: T,
}

impl<T: Scalar> Capsule<T> {
    /// Position along the axis in [0, 1] of the closest axis point.
    pub fn axis_param(&self, p: Point2<T>) -> T {
        let (dx, dy) = (self.b.x - self.a.x, self.b.y - self.a.y);
        let len2 = dx * dx + dy * dy;
        if len2 == T::zero() {
            return T::zero();
        }
        let t = ((p.x - self.a.x) * dx + (p.y - self.a.y) * dy) / len2;
        t.max(T::zero()).min(T::one())
    }

    pub fn contains(&self, p: Point2<T>) -> bool {
        let t = self.axis_param(p);
        let cx = self.a.x + (self.b.x - self.a.x) * t;
        let cy = self.a.y + (self.b.y - self.a.y) * t;
        let (ex, ey) = (p.x - cx, p.y - cy);
        ex * ex + ey * ey <= self.radius * self.radius
    }

    fn bounds(&self) -> (T, T, T, T) {
        (
            self.a.x.min(self.b.x) - self.radius,
            self.a.y.min(self.b.y) - self.radius,
            self.a.x.max(self.b.x) + self.radius,
            self.a.y.max(self.b.y) + self.radius,
        )
    }
}

/// Pixel-space skeleton and silhouette of one figure.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureGeometry<T = f64> {
    pub keypoints: [Point2<T>; 17],
    /// Painted in order; earlier shapes win when pixels are attributed to
    /// body regions.
    pub shapes: Vec<(ShapeRole, Capsule<T>)>,
    pub head_top: Point2<T>,
    pub feet_mid: Point2<T>,
}

impl<T: Scalar> FigureGeometry<T> {
    pub fn build(spec: &FigureSpec<T>) -> Result<Self> {
        let spec = FigureSpec::new(spec.anchor, spec.height, spec.pose, spec.seed)?;
        let mut rng = SceneRng::new(spec.seed, 0);
        let mut a = spec.pose.angles();
        let mut jitter = |v: &mut f64, amount: f64| *v += rng.range(-amount, amount);
        for pair in [&mut a.upper_arm, &mut a.forearm, &mut a.thigh, &mut a.shin] {
            jitter(&mut pair.0, JOINT_JITTER);
            jitter(&mut pair.1, JOINT_JITTER);
        }
        jitter(&mut a.lean, LEAN_JITTER);

        // body units, f64
        let dir = |theta: f64| (theta.sin(), theta.cos());
        let add = |p: (f64, f64), d: (f64, f64), k: f64| (p.0 + d.0 * k, p.1 + d.1 * k);
        let up = (a.lean.sin(), -a.lean.cos());
        let across = (a.lean.cos(), a.lean.sin());
        let hip_mid = (0.0, 0.0);
        let shoulder_mid = add(hip_mid, up, TORSO_LENGTH);
        let head = add(shoulder_mid, up, NECK_TO_HEAD);
        let l_shoulder = add(shoulder_mid, across, SHOULDER_HALF_SPAN);
        let r_shoulder = add(shoulder_mid, across, -SHOULDER_HALF_SPAN);
        let l_hip = add(hip_mid, across, HIP_HALF_SPAN);
        let r_hip = add(hip_mid, across, -HIP_HALF_SPAN);
        let l_elbow = add(l_shoulder, dir(a.upper_arm.0), UPPER_ARM);
        let r_elbow = add(r_shoulder, dir(a.upper_arm.1), UPPER_ARM);
        let l_wrist = add(l_elbow, dir(a.forearm.0), FOREARM);
        let r_wrist = add(r_elbow, dir(a.forearm.1), FOREARM);
        let l_knee = add(l_hip, dir(a.thigh.0), THIGH);
        let r_knee = add(r_hip, dir(a.thigh.1), THIGH);
        let l_ankle = add(l_knee, dir(a.shin.0), SHIN);
        let r_ankle = add(r_knee, dir(a.shin.1), SHIN);
        let face = |dx: f64, dy: f64| (head.0 + dx, head.1 + dy);

        let body_kps = [
            face(0.0, 0.01),
            face(0.022, -0.012),
            face(-0.022, -0.012),
            face(0.04, 0.0),
            face(-0.04, 0.0),
            l_shoulder,
            r_shoulder,
            l_elbow,
            r_elbow,
            l_wrist,
            r_wrist,
            l_hip,
            r_hip,
            l_knee,
            r_knee,
            l_ankle,
            r_ankle,
        ];

        use SemanticPart as P;
        let body_shapes: [(ShapeRole, (f64, f64), (f64, f64), f64); 10] = [
            (ShapeRole::Head, head, head, HEAD_RADIUS),
            (ShapeRole::Torso, shoulder_mid, hip_mid, TORSO_RADIUS),
            (ShapeRole::Limb(P::UpperLeftArm), l_shoulder, l_elbow, ARM_RADIUS),
            (ShapeRole::Limb(P::LowerLeftArm), l_elbow, l_wrist, ARM_RADIUS),
            (ShapeRole::Limb(P::UpperRightArm), r_shoulder, r_elbow, ARM_RADIUS),
            (ShapeRole::Limb(P::LowerRightArm), r_elbow, r_wrist, ARM_RADIUS),
            (ShapeRole::Limb(P::UpperLeftLeg), l_hip, l_knee, LEG_RADIUS),
            (ShapeRole::Limb(P::LowerLeftLeg), l_knee, l_ankle, LEG_RADIUS),
            (ShapeRole::Limb(P::UpperRightLeg), r_hip, r_knee, LEG_RADIUS),
            (ShapeRole::Limb(P::LowerRightLeg), r_knee, r_ankle, LEG_RADIUS),
        ];

        let top = body_shapes
            .iter()
            .map(|s| s.1 .1.min(s.2 .1) - s.3)
            .fold(f64::INFINITY, f64::min);
        let bottom = body_shapes
            .iter()
            .map(|s| s.1 .1.max(s.2 .1) + s.3)
            .fold(f64::NEG_INFINITY, f64::max);

        let height = spec.height.to_f64().expect("finite height");
        let scale = height / (bottom - top);
        let (ax, ay) = (
            spec.anchor.x.to_f64().expect("finite anchor"),
            spec.anchor.y.to_f64().expect("finite anchor"),
        );
        let to_px = |p: (f64, f64)| Point2::new(lit::<T>(ax + p.0 * scale), lit::<T>(ay + (p.1 - bottom) * scale));

        let keypoints = body_kps.map(to_px);
        let shapes = body_shapes
            .iter()
            .map(|&(role, p, q, r)| {
                (
                    role,
                    Capsule {
                        a: to_px(p),
                        b: to_px(q),
                        radius: lit((r * scale).max(MIN_RADIUS_PX)),
                    },
                )
            })
            .collect();
        let head_top = to_px((head.0, head.1 - HEAD_RADIUS));
        let feet_mid = Point2::new(lit::<T>(ax + (l_ankle.0 + r_ankle.0) / 2.0 * scale), lit::<T>(ay));

        Ok(Self {
            keypoints,
            shapes,
            head_top,
            feet_mid,
        })
    }

    /// Pixel-space extent `(x_min, y_min, x_max, y_max)` of the silhouette.
    pub fn extent(&self) -> (T, T, T, T) {
        self.shapes.iter().map(|(_, c)| c.bounds()).fold(
            (T::infinity(), T::infinity(), T::neg_infinity(), T::neg_infinity()),
            |acc, b| (acc.0.min(b.0), acc.1.min(b.1), acc.2.max(b.2), acc.3.max(b.3)),
        )
    }

    /// Union of all capsules sampled at pixel centres.
    pub fn rasterize(&self, width: u32, height: u32) -> InstanceMask {
        let mut mask = InstanceMask::empty(width, height);
        for (_, capsule) in &self.shapes {
            let (x0, y0, x1, y1) = capsule.bounds();
            let Some((xs, ys)) = pixel_span(x0, x1, width).zip(pixel_span(y0, y1, height)) else {
                continue;
            };
            for y in ys {
                for x in xs.clone() {
                    if !mask.get(x, y) && capsule.contains(Point2::new(lit(x as f64), lit(y as f64))) {
                        mask.set(x, y, true);
                    }
                }
            }
        }
        mask
    }

    /// Region owning pixel `(x, y)`, if any, with torso pixels resolved to
    /// upper or lower torso.
    pub fn part_at(&self, x: u32, y: u32) -> Option<SemanticPart> {
        let p = Point2::new(lit(x as f64), lit(y as f64));
        self.shapes.iter().find(|(_, c)| c.contains(p)).map(|(role, c)| match role {
            ShapeRole::Head => SemanticPart::Head,
            ShapeRole::Torso if c.axis_param(p) < lit(0.5) => SemanticPart::UpperTorso,
            ShapeRole::Torso => SemanticPart::LowerTorso,
            ShapeRole::Limb(part) => *part,
        })
    }
}

fn pixel_span<T: Scalar>(lo: T, hi: T, limit: u32) -> Option<std::ops::RangeInclusive<u32>> {
    let lo = lo.ceil().max(T::zero());
    let hi = hi.floor().min(lit(limit as f64 - 1.0));
    if limit == 0 || lo > hi {
        return None;
    }
    Some(lo.to_u32()?..=hi.to_u32()?)
}

/// Continuous box around the set pixels (pixel centres at integers), or a
/// zero box at the origin for an empty mask.
pub fn visible_bbox<T: Scalar>(mask: &InstanceMask) -> Rect<T> {
    match mask.pixel_extent() {
        Some((x0, y0, x1, y1)) => Rect {
            x_min: lit(x0 as f64 - 0.5),
            y_min: lit(y0 as f64 - 0.5),
            x_max: lit(x1 as f64 + 0.5),
            y_max: lit(y1 as f64 + 0.5),
        },
        None => Rect::default(),
    }
}

/// A figure as a detected instance: exact keypoints with score 1 and the
/// rasterized silhouette clipped to the frame.
pub fn generate_figure<T: Scalar>(
    spec: &FigureSpec<T>,
    frame_width: u32,
    frame_height: u32,
) -> Result<PedestrianInstance<T>> {
    let geometry = FigureGeometry::build(spec)?;
    Ok(instance_from_geometry(&geometry, format!("figure-{}", spec.seed), frame_width, frame_height))
}

pub(crate) fn instance_from_geometry<T: Scalar>(
    geometry: &FigureGeometry<T>,
    instance_id: String,
    frame_width: u32,
    frame_height: u32,
) -> PedestrianInstance<T> {
    let mask = geometry.rasterize(frame_width, frame_height);
    let keypoints: [Keypoint<T>; 17] = std::array::from_fn(|i| Keypoint {
        name: KeypointName::ALL[i],
        x: geometry.keypoints[i].x,
        y: geometry.keypoints[i].y,
        score: T::one(),
    });
    PedestrianInstance {
        instance_id,
        keypoints,
        bbox_visible: visible_bbox(&mask),
        mask,
        body_extent: Some(BodyExtent {
            head_top: geometry.head_top,
            feet_mid: geometry.feet_mid,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bsa::PARTS;

    fn spec(pose: Pose, height: f64, seed: u64) -> FigureSpec {
        FigureSpec::new(Point2::new(128.0, 300.0), height, pose, seed).unwrap()
    }

    #[test]
    fn too_short_rejected() {
        assert!(matches!(
            FigureSpec::new(Point2::new(0.0, 0.0), 39.0, Pose::Standing, 1),
            Err(Error::Spec(_))
        ));
    }

    #[test]
    fn keypoints_land_inside_the_silhouette() {
        for pose in Pose::ALL {
            for height in [40.0, 63.0, 150.0, 240.0] {
                for seed in 0..8 {
                    let spec = FigureSpec::new(Point2::new(512.0, 700.0), height, pose, seed).unwrap();
                    let inst = generate_figure(&spec, 1024, 1024).unwrap();
                    for kp in &inst.keypoints {
                        assert!(inst.mask.contains_point(kp.x, kp.y), "{pose:?} {height} {seed} {}", kp.name);
                    }
                }
            }
        }
    }

    #[test]
    fn silhouette_height_matches_request() {
        for pose in Pose::ALL {
            let g = FigureGeometry::build(&spec(pose, 200.0, 3)).unwrap();
            let (_, y0, _, y1) = g.extent();
            assert!((y1 - y0 - 200.0).abs() < 1e-6, "{pose:?}");
            assert!((y1 - 300.0).abs() < 1e-6);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_figure(&spec(Pose::Running, 180.0, 11), 256, 320).unwrap();
        let b = generate_figure(&spec(Pose::Running, 180.0, 11), 256, 320).unwrap();
        let c = generate_figure(&spec(Pose::Running, 180.0, 12), 256, 320).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.keypoints, c.keypoints);
    }

    #[test]
    fn feet_below_frame_are_truncated() {
        let s = FigureSpec::new(Point2::new(128.0, 340.0), 200.0, Pose::Standing, 5).unwrap();
        let inst = generate_figure(&s, 256, 320).unwrap();
        for name in [KeypointName::LeftAnkle, KeypointName::RightAnkle] {
            assert!(inst.keypoint(name).y >= 319.5);
        }
        assert!(inst.mask.area() > 0);
    }

    #[test]
    fn part_areas_track_surface_weights() {
        // standing silhouette; each region within 20% of its weight share
        for seed in 0..4 {
            let g = FigureGeometry::build(&spec(Pose::Standing, 240.0, seed)).unwrap();
            let mut areas = [0u64; 11];
            for y in 0..320 {
                for x in 0..256 {
                    if let Some(p) = g.part_at(x, y) {
                        areas[p as usize] += 1;
                    }
                }
            }
            let total: u64 = areas.iter().sum();
            for (spec, &area) in PARTS.iter().zip(&areas) {
                let expected = spec.half_percent as f64 / 198.0;
                let share = area as f64 / total as f64;
                assert!(
                    (share / expected - 1.0).abs() <= 0.20,
                    "{}: share {share:.4} vs {expected:.4}",
                    spec.part
                );
            }
        }
    }
}
