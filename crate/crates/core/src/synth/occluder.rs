//! Occluders superimposed on a reference figure.

use crate::detections::PedestrianInstance;
use crate::error::{Error, Result};
use crate::geometry::{Point2, Rect};
use crate::mask::InstanceMask;
use crate::oracle::{occlusion_from_areas, PairedInstance};
use crate::scalar::{lit, Scalar};

use super::figure::{generate_figure, visible_bbox, FigureSpec, Pose};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OccluderShape {
    Rectangle,
    /// Full frame height.
    VerticalStrip,
    /// Full frame width.
    HorizontalStrip,
    /// Another figure standing in front, fitted to the placement box by its
    /// bottom-centre and height.
    SecondPedestrian { pose: Pose, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccluderSpec<T = f64> {
    pub shape: OccluderShape,
    pub placement: Rect<T>,
    /// Occlusion the placement was fitted to; informational.
    pub coverage_target: T,
}

impl<T: Scalar> OccluderSpec<T> {
    pub fn new(shape: OccluderShape, placement: Rect<T>, coverage_target: T) -> Result<Self> {
        if !(coverage_target >= T::zero() && coverage_target <= T::one()) {
            return Err(Error::Spec(format!(
                "coverage target {coverage_target} outside [0, 1]"
            )));
        }
        Ok(Self {
            shape,
            placement,
            coverage_target,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedOccluder<T = f64> {
    pub mask: InstanceMask,
    /// The occluding pedestrian, for the second-pedestrian shape.
    pub figure: Option<PedestrianInstance<T>>,
}

/// Pixels whose centres satisfy `x_min <= x < x_max` and
/// `y_min <= y < y_max`.
pub fn rect_mask<T: Scalar>(rect: &Rect<T>, width: u32, height: u32) -> InstanceMask {
    InstanceMask::from_fn(width, height, |x, y| {
        let (px, py) = (lit::<T>(x as f64), lit::<T>(y as f64));
        px >= rect.x_min && px < rect.x_max && py >= rect.y_min && py < rect.y_max
    })
}

pub fn render_occluder<T: Scalar>(
    occ: &OccluderSpec<T>,
    width: u32,
    height: u32,
) -> Result<RenderedOccluder<T>> {
    let p = occ.placement;
    let big: T = lit(1e9);
    let region = match occ.shape {
        OccluderShape::Rectangle => p,
        OccluderShape::VerticalStrip => Rect { y_min: -big, y_max: big, ..p },
        OccluderShape::HorizontalStrip => Rect { x_min: -big, x_max: big, ..p },
        OccluderShape::SecondPedestrian { pose, seed } => {
            let anchor = Point2::new((p.x_min + p.x_max) / lit(2.0), p.y_max);
            let spec = FigureSpec::new(anchor, p.height(), pose, seed)?;
            let figure = generate_figure(&spec, width, height)?;
            return Ok(RenderedOccluder {
                mask: figure.mask.clone(),
                figure: Some(figure),
            });
        }
    };
    Ok(RenderedOccluder {
        mask: rect_mask(&region, width, height),
        figure: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccludedInstance<T = f64> {
    pub pair: PairedInstance,
    /// The reference instance with occluded mask bits cleared and covered
    /// keypoints' scores set to zero.
    pub instance: PedestrianInstance<T>,
    pub occluder: RenderedOccluder<T>,
    pub full_pixels: u64,
    /// `full_pixels` minus the reference pixels under the occluder.
    pub visible_pixels: u64,
}

impl<T: Scalar> OccludedInstance<T> {
    /// Ground-truth occlusion fraction from the generator's own counts.
    pub fn analytic_occlusion(&self) -> T {
        occlusion_from_areas(self.visible_pixels, self.full_pixels)
            .expect("non-empty reference")
            .occlusion
    }
}

pub fn apply_occluder<T: Scalar>(
    instance: &PedestrianInstance<T>,
    occ: &OccluderSpec<T>,
) -> Result<OccludedInstance<T>> {
    let occluder = render_occluder(occ, instance.mask.width(), instance.mask.height())?;
    occlude_with(instance, occluder)
}

pub(crate) fn occlude_with<T: Scalar>(
    instance: &PedestrianInstance<T>,
    occluder: RenderedOccluder<T>,
) -> Result<OccludedInstance<T>> {
    let full = &instance.mask;
    let full_pixels = full.area();
    if full_pixels == 0 {
        return Err(Error::Degenerate(format!(
            "instance `{}` has no pixels in frame",
            instance.instance_id
        )));
    }
    let visible_pixels = full_pixels - full.intersection_area(&occluder.mask)?;
    let remaining = full.difference(&occluder.mask)?;

    let mut occluded = instance.clone();
    for kp in &mut occluded.keypoints {
        if occluder.mask.contains_point(kp.x, kp.y) {
            kp.score = T::zero();
        }
    }
    occluded.bbox_visible = visible_bbox(&remaining);
    occluded.mask = remaining.clone();

    Ok(OccludedInstance {
        pair: PairedInstance {
            instance_id: instance.instance_id.clone(),
            mask_full: full.clone(),
            mask_occluded: remaining,
        },
        instance: occluded,
        occluder,
        full_pixels,
        visible_pixels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::pixelwise_occlusion;

    fn standing() -> PedestrianInstance {
        let spec = FigureSpec::new(Point2::new(100.0, 230.0), 200.0, Pose::Standing, 9).unwrap();
        generate_figure(&spec, 200, 240).unwrap()
    }

    #[test]
    fn disjoint_occluder_changes_nothing() {
        let inst = standing();
        let occ = OccluderSpec::new(
            OccluderShape::Rectangle,
            Rect::new(0.0, 0.0, 10.0, 10.0).unwrap(),
            0.0,
        )
        .unwrap();
        let out = apply_occluder(&inst, &occ).unwrap();
        assert_eq!(out.analytic_occlusion(), 0.0);
        assert_eq!(out.instance.keypoints, inst.keypoints);
        assert_eq!(pixelwise_occlusion::<f64>(&out.pair).unwrap(), 0.0);
    }

    #[test]
    fn frame_sized_occluder_hides_everything() {
        let inst = standing();
        let occ = OccluderSpec::new(
            OccluderShape::Rectangle,
            Rect::new(-1.0, -1.0, 201.0, 241.0).unwrap(),
            1.0,
        )
        .unwrap();
        let out = apply_occluder(&inst, &occ).unwrap();
        assert_eq!(out.analytic_occlusion(), 1.0);
        assert!(out.instance.keypoints.iter().all(|k| k.score == 0.0));
        assert_eq!(out.instance.mask.area(), 0);
    }

    #[test]
    fn covered_keypoints_leave_the_mask() {
        let inst = standing();
        let occ = OccluderSpec::new(
            OccluderShape::VerticalStrip,
            Rect::new(95.0, 0.0, 140.0, 0.0).unwrap(),
            0.3,
        )
        .unwrap();
        let out = apply_occluder(&inst, &occ).unwrap();
        let mut covered = 0;
        for kp in &out.instance.keypoints {
            if kp.score == 0.0 {
                covered += 1;
                assert!(!out.pair.mask_occluded.contains_point(kp.x, kp.y));
            } else {
                assert!(out.pair.mask_occluded.contains_point(kp.x, kp.y));
            }
        }
        assert!(covered > 0);
        assert_eq!(out.visible_pixels, out.pair.mask_occluded.area());
    }

    #[test]
    fn second_pedestrian_paints_a_figure() {
        let inst = standing();
        let occ = OccluderSpec::new(
            OccluderShape::SecondPedestrian {
                pose: Pose::Walking,
                seed: 4,
            },
            Rect::new(80.0, 30.0, 140.0, 235.0).unwrap(),
            0.5,
        )
        .unwrap();
        let out = apply_occluder(&inst, &occ).unwrap();
        let front = out.occluder.figure.as_ref().unwrap();
        assert_eq!(front.mask, out.occluder.mask);
        assert!(out.analytic_occlusion() > 0.0 && out.analytic_occlusion() < 1.0);
    }

    #[test]
    fn bad_coverage_target() {
        assert!(OccluderSpec::new(OccluderShape::Rectangle, Rect::default(), 1.5).is_err());
    }
}
