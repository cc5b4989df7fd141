//! Pixel-wise occlusion ground truth and estimator evaluation.
//!
//! The pixel ratio `area(occluded) / area(full)` is the visible fraction of
//! a pedestrian; occlusion is its complement. Estimators are compared to
//! that oracle by mean absolute and root-mean-square error, overall and in
//! ten bins of oracle occlusion.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::baselines::{citypersons_occlusion, CityPersonsAnnotation};
use crate::bsa::{classify_occlusion, PartSet};
use crate::detections::{from_json, ImageFrame, PedestrianInstance};
use crate::error::{Error, Result};
use crate::mask::InstanceMask;
use crate::scalar::{clamp01, count, lit, Scalar};
use crate::visibility::VisibilityConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedInstance {
    pub instance_id: String,
    pub mask_full: InstanceMask,
    pub mask_occluded: InstanceMask,
}

/// Eq-style pixel ratio and its occlusion complement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelOcclusion<T = f64> {
    /// Visible pixels over reference pixels, unclamped.
    pub visible_ratio: T,
    pub occlusion: T,
}

/// Occlusion from pixel counts: `1 - clamp(visible / full, 0, 1)`.
pub fn occlusion_from_areas<T: Scalar>(visible: u64, full: u64) -> Result<PixelOcclusion<T>> {
    if full == 0 {
        return Err(Error::Degenerate("reference mask is empty".into()));
    }
    let visible_ratio = count::<T>(visible) / count(full);
    Ok(PixelOcclusion {
        visible_ratio,
        occlusion: T::one() - clamp01(visible_ratio),
    })
}

pub fn pixelwise(pair: &PairedInstance) -> Result<PixelOcclusion<f64>> {
    pixelwise_as(pair)
}

pub fn pixelwise_as<T: Scalar>(pair: &PairedInstance) -> Result<PixelOcclusion<T>> {
    if pair.mask_full.width() != pair.mask_occluded.width()
        || pair.mask_full.height() != pair.mask_occluded.height()
    {
        return Err(Error::Geometry(format!(
            "pair `{}` masks differ in size",
            pair.instance_id
        )));
    }
    occlusion_from_areas(pair.mask_occluded.area(), pair.mask_full.area())
        .map_err(|_| Error::Degenerate(format!("pair `{}` has an empty full mask", pair.instance_id)))
}

/// Occlusion fraction in [0, 1] for one pair.
pub fn pixelwise_occlusion<T: Scalar>(pair: &PairedInstance) -> Result<T> {
    Ok(pixelwise_as::<T>(pair)?.occlusion)
}

pub fn parse_pairs_document(text: &str) -> Result<Vec<PairedInstance>> {
    from_json(text)
}

pub fn serialize_pairs_document(pairs: &[PairedInstance]) -> String {
    serde_json::to_string(pairs).expect("pairs serialize")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Estimator {
    Proposed,
    CityPersons,
}

impl Estimator {
    pub const ALL: [Estimator; 2] = [Estimator::Proposed, Estimator::CityPersons];

    pub fn as_str(self) -> &'static str {
        match self {
            Estimator::Proposed => "proposed",
            Estimator::CityPersons => "citypersons",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRecord<T = f64> {
    pub instance_id: String,
    pub occ_pixel: T,
    pub visible_ratio: T,
    pub occ_proposed: T,
    pub occ_citypersons: Option<T>,
    pub occluded_parts: PartSet,
}

impl<T: Scalar> EvaluationRecord<T> {
    pub fn estimate(&self, estimator: Estimator) -> Option<T> {
        match estimator {
            Estimator::Proposed => Some(self.occ_proposed),
            Estimator::CityPersons => self.occ_citypersons,
        }
    }
}

/// Error statistics over a set of records; `None` when the set is empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats<T = f64> {
    pub n: usize,
    pub mae: Option<T>,
    pub rmse: Option<T>,
}

impl<T: Scalar> ErrorStats<T> {
    /// Sums run over errors in sorted order so the result does not depend
    /// on input order.
    pub fn from_errors(mut errors: Vec<T>) -> Self {
        let n = errors.len();
        if n == 0 {
            return Self {
                n,
                mae: None,
                rmse: None,
            };
        }
        for e in &mut errors {
            *e = e.abs();
        }
        errors.sort_by(|a, b| a.partial_cmp(b).expect("finite error"));
        let len = count::<T>(n as u64);
        let mae = errors.iter().fold(T::zero(), |acc, &e| acc + e) / len;
        let mse = errors.iter().fold(T::zero(), |acc, &e| acc + e * e) / len;
        Self {
            n,
            mae: Some(mae),
            rmse: Some(mse.sqrt()),
        }
    }
}

pub const BIN_COUNT: usize = 10;

/// Bin of width 0.1 over oracle occlusion; 1.0 falls in the last bin.
pub fn decile(occ_pixel: f64) -> usize {
    ((occ_pixel * BIN_COUNT as f64).floor().max(0.0) as usize).min(BIN_COUNT - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSummary<T = f64> {
    pub estimator: Estimator,
    pub overall: ErrorStats<T>,
    pub bins: [ErrorStats<T>; BIN_COUNT],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<T = f64> {
    pub records: Vec<EvaluationRecord<T>>,
    pub summaries: Vec<EstimatorSummary<T>>,
}

impl<T: Scalar> Evaluation<T> {
    pub fn summary(&self, estimator: Estimator) -> &EstimatorSummary<T> {
        self.summaries
            .iter()
            .find(|s| s.estimator == estimator)
            .expect("every estimator summarised")
    }

    /// True when there were no records to summarise.
    pub fn is_undefined(&self) -> bool {
        self.records.is_empty()
    }
}

pub fn summarize<T: Scalar>(records: &[EvaluationRecord<T>]) -> Vec<EstimatorSummary<T>> {
    Estimator::ALL
        .iter()
        .map(|&estimator| {
            let mut overall = Vec::new();
            let mut bins: [Vec<T>; BIN_COUNT] = Default::default();
            for r in records {
                if let Some(est) = r.estimate(estimator) {
                    let err = est - r.occ_pixel;
                    overall.push(err);
                    bins[decile(r.occ_pixel.to_f64().unwrap())].push(err);
                }
            }
            EstimatorSummary {
                estimator,
                overall: ErrorStats::from_errors(overall),
                bins: bins.map(ErrorStats::from_errors),
            }
        })
        .collect()
}

fn citypersons_for<T: Scalar>(inst: &PedestrianInstance<T>) -> Result<Option<T>> {
    inst.body_extent
        .map(|ext| {
            citypersons_occlusion(&CityPersonsAnnotation {
                head_top: ext.head_top,
                feet_mid: ext.feet_mid,
                bbox_visible: inst.bbox_visible,
            })
            .map_err(|e| Error::Degenerate(format!("instance `{}`: {e}", inst.instance_id)))
        })
        .transpose()
}

/// Joins each pair to its detection by instance id, scores the proposed
/// method and (where annotated) the CityPersons baseline against the pixel
/// oracle.
pub fn evaluate_batch<T: Scalar>(
    pairs: &[PairedInstance],
    detections: &[ImageFrame<T>],
    config: &VisibilityConfig<T>,
) -> Result<Evaluation<T>> {
    let mut index: HashMap<&str, (&ImageFrame<T>, &PedestrianInstance<T>)> = HashMap::new();
    for frame in detections {
        for inst in &frame.instances {
            if index.insert(inst.instance_id.as_str(), (frame, inst)).is_some() {
                return Err(Error::Consistency(format!(
                    "instance id `{}` appears in more than one frame",
                    inst.instance_id
                )));
            }
        }
    }
    let missing: Vec<String> = pairs
        .iter()
        .filter(|p| !index.contains_key(p.instance_id.as_str()))
        .map(|p| p.instance_id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Join(missing));
    }

    let records = pairs
        .iter()
        .map(|pair| {
            let (frame, inst) = index[pair.instance_id.as_str()];
            let pixel = pixelwise_as::<T>(pair)?;
            let proposed = classify_occlusion(inst, frame, config);
            Ok(EvaluationRecord {
                instance_id: pair.instance_id.clone(),
                occ_pixel: pixel.occlusion,
                visible_ratio: pixel.visible_ratio,
                occ_proposed: proposed.occlusion_percent / lit(100.0),
                occ_citypersons: citypersons_for(inst)?,
                occluded_parts: proposed.occluded_parts,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let summaries = summarize(&records);
    Ok(Evaluation { records, summaries })
}

fn opt<T: Scalar>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("<csv>", io),
        other => Error::Consistency(format!("csv: {other:?}")),
    }
}

/// `estimator,bin_low,bin_high,n,mae,rmse`; one overall row per estimator
/// followed by its ten bins. Empty cells mark undefined statistics.
pub fn write_summary_csv<T: Scalar, W: Write>(eval: &Evaluation<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["estimator", "bin_low", "bin_high", "n", "mae", "rmse"])
        .map_err(csv_err)?;
    for s in &eval.summaries {
        let rows = std::iter::once((0.0, 1.0, s.overall)).chain(
            s.bins
                .iter()
                .enumerate()
                .map(|(i, b)| (i as f64 / 10.0, (i + 1) as f64 / 10.0, *b)),
        );
        for (lo, hi, stats) in rows {
            w.write_record([
                s.estimator.as_str().to_owned(),
                lo.to_string(),
                hi.to_string(),
                stats.n.to_string(),
                opt(stats.mae),
                opt(stats.rmse),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

/// `instance_id,occ_pixel,occ_proposed,occ_citypersons` at full precision.
pub fn write_records_csv<T: Scalar, W: Write>(eval: &Evaluation<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["instance_id", "occ_pixel", "occ_proposed", "occ_citypersons"])
        .map_err(csv_err)?;
    for r in &eval.records {
        w.write_record([
            r.instance_id.clone(),
            r.occ_pixel.to_string(),
            r.occ_proposed.to_string(),
            opt(r.occ_citypersons),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}
