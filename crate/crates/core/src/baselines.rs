//! Literature estimators: the CityPersons fixed-aspect full box and the
//! OVIS bounding-box occlusion rate. Both report occlusion (0 = fully
//! visible).

use crate::error::{Error, Result};
use crate::geometry::{union_area, Point2, Rect};
use crate::scalar::{clamp01, lit, Scalar};

/// Width over height of the CityPersons full-extent box.
pub const CITYPERSONS_ASPECT_RATIO: f64 = 0.41;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CityPersonsAnnotation<T = f64> {
    pub head_top: Point2<T>,
    pub feet_mid: Point2<T>,
    pub bbox_visible: Rect<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullExtentBox<T = f64> {
    pub bbox_full: Rect<T>,
    pub aspect_ratio: T,
}

/// Full-extent box spanning head top to feet, centred on the midpoint of
/// the head-feet line.
pub fn citypersons_full_box<T: Scalar>(ann: &CityPersonsAnnotation<T>) -> Result<FullExtentBox<T>> {
    let height = ann.feet_mid.y - ann.head_top.y;
    if !(height > T::zero()) {
        return Err(Error::Degenerate(format!(
            "feet at y={} are not below head top at y={}",
            ann.feet_mid.y, ann.head_top.y
        )));
    }
    let aspect_ratio: T = lit(CITYPERSONS_ASPECT_RATIO);
    let half_width = aspect_ratio * height / lit(2.0);
    let cx = (ann.head_top.x + ann.feet_mid.x) / lit(2.0);
    let bbox_full = Rect::new(cx - half_width, ann.head_top.y, cx + half_width, ann.feet_mid.y)?;
    Ok(FullExtentBox {
        bbox_full,
        aspect_ratio,
    })
}

/// `1 - area(visible) / area(full)`, clamped to [0, 1].
pub fn citypersons_occlusion<T: Scalar>(ann: &CityPersonsAnnotation<T>) -> Result<T> {
    let full = citypersons_full_box(ann)?.bbox_full;
    let full_area = full.area();
    if !(full_area > T::zero()) {
        return Err(Error::Degenerate("full-extent box has zero area".into()));
    }
    Ok(T::one() - clamp01(ann.bbox_visible.area() / full_area))
}

/// Share of `target` covered by the union of its overlaps with `others`.
pub fn bbox_occlusion_rate<T: Scalar>(target: &Rect<T>, others: &[Rect<T>]) -> Result<T> {
    let area = target.area();
    if !(area > T::zero()) {
        return Err(Error::Degenerate("target box has zero area".into()));
    }
    let overlaps: Vec<Rect<T>> = others.iter().filter_map(|o| target.intersection(o)).collect();
    Ok(clamp01(union_area(&overlaps) / area))
}
