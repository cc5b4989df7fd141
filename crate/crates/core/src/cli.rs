//! Command implementations behind the `occlometer` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::{debug, info, warn};
use rayon::prelude::*;

use crate::baselines::{bbox_occlusion_rate, citypersons_occlusion, CityPersonsAnnotation};
use crate::bsa::classify_frame;
use crate::detections::{parse_frame_document, serialize_frame_document, serialize_results, ImageFrame};
use crate::error::{Error, Result};
use crate::oracle::{evaluate_batch, parse_pairs_document, serialize_pairs_document, write_records_csv, write_summary_csv};
use crate::schemes::{render_band_table, DatasetScheme};
use crate::synth::{generate_scene, ground_truth_csv};
use crate::visibility::{VisibilityConfig, DEFAULT_SCORE_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    CityPersons,
    Ovis,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Classify {
        input: PathBuf,
        out: PathBuf,
        scheme: Option<String>,
    },
    Evaluate {
        pairs: PathBuf,
        input: PathBuf,
        out: PathBuf,
    },
    Baseline {
        kind: BaselineKind,
        input: PathBuf,
        out: Option<PathBuf>,
    },
    Synth {
        count: usize,
        seed: u64,
        out: PathBuf,
    },
    SchemesList,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub keypoint_threshold: f64,
    /// Worker threads; `None` lets the pool pick.
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            keypoint_threshold: DEFAULT_SCORE_THRESHOLD,
            jobs: None,
        }
    }
}

/// Process exit status for an error: 2 for I/O, 4 for internal contract
/// violations, 3 for everything wrong with the input data.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } => 2,
        Error::Contract(_) | Error::Consistency(_) => 4,
        _ => 3,
    }
}

pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let visibility = VisibilityConfig::new(config.keypoint_threshold)
        .map_err(|e| Error::Validation(e.to_string()))?;
    if config.jobs == Some(0) {
        return Err(Error::Validation("--jobs must be at least 1".into()));
    }
    match &config.command {
        Command::Classify { input, out, scheme } => {
            let scheme = scheme.as_deref().map(DatasetScheme::by_name).transpose()?;
            classify(input, out, scheme, &visibility, config.jobs)
        }
        Command::Evaluate { pairs, input, out } => evaluate(pairs, input, out, &visibility, config.jobs),
        Command::Baseline { kind, input, out } => baseline(*kind, input, out.as_deref(), stdout),
        Command::Synth { count, seed, out } => synth(*count, *seed, out, config.jobs),
        Command::SchemesList => {
            stdout
                .write_all(render_band_table().as_bytes())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// A single file, or the `.json` files of a directory in name order.
fn input_files(path: &Path) -> Result<Vec<PathBuf>> {
    let meta = fs::metadata(path).map_err(|e| Error::io(path, e))?;
    if meta.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files = Vec::new();
    for entry in fs::read_dir(path).map_err(|e| Error::io(path, e))? {
        let p = entry.map_err(|e| Error::io(path, e))?.path();
        if p.is_file() && p.extension().is_some_and(|x| x == "json") {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

fn with_pool<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Contract(format!("worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn parse_frame_file(path: &Path) -> Result<ImageFrame> {
    parse_frame_document(&read(path)?).map_err(|e| {
        warn!("{}: {e}", path.display());
        e
    })
}

fn classify(
    input: &Path,
    out: &Path,
    scheme: Option<&DatasetScheme>,
    visibility: &VisibilityConfig,
    jobs: Option<usize>,
) -> Result<()> {
    let files = input_files(input)?;
    let batch = fs::metadata(input).map_err(|e| Error::io(input, e))?.is_dir();
    info!("classifying {} document(s)", files.len());

    let rendered: Vec<Result<String>> = with_pool(jobs, || {
        files
            .par_iter()
            .map(|path| {
                let frame = parse_frame_file(path)?;
                let results = classify_frame(&frame, visibility);
                debug!("{}: {} instance(s)", frame.frame_id, results.len());
                serialize_results(&frame, &results, scheme)
            })
            .collect()
    })?;

    for (path, doc) in files.iter().zip(rendered) {
        let target = if batch {
            out.join(path.file_name().expect("file name"))
        } else {
            out.to_path_buf()
        };
        write(&target, doc?.as_bytes())?;
    }
    Ok(())
}

fn evaluate(
    pairs_path: &Path,
    input: &Path,
    out: &Path,
    visibility: &VisibilityConfig,
    jobs: Option<usize>,
) -> Result<()> {
    let mut pairs = Vec::new();
    for path in input_files(pairs_path)? {
        pairs.extend(parse_pairs_document(&read(&path)?)?);
    }
    let files = input_files(input)?;
    let frames: Vec<Result<ImageFrame>> =
        with_pool(jobs, || files.par_iter().map(|p| parse_frame_file(p)).collect())?;
    let frames = frames.into_iter().collect::<Result<Vec<_>>>()?;

    let eval = evaluate_batch(&pairs, &frames, visibility)?;
    info!("evaluated {} pair(s)", eval.records.len());

    let mut summary = Vec::new();
    write_summary_csv(&eval, &mut summary)?;
    let mut records = Vec::new();
    write_records_csv(&eval, &mut records)?;
    write(&out.join("summary.csv"), &summary)?;
    write(&out.join("instances.csv"), &records)
}

fn baseline(kind: BaselineKind, input: &Path, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let mut text = String::from("frame_id,instance_id,occlusion\n");
    for path in input_files(input)? {
        let frame = parse_frame_file(&path)?;
        for (i, inst) in frame.instances.iter().enumerate() {
            let value = match kind {
                BaselineKind::CityPersons => match inst.body_extent {
                    Some(ext) => Some(citypersons_occlusion(&CityPersonsAnnotation {
                        head_top: ext.head_top,
                        feet_mid: ext.feet_mid,
                        bbox_visible: inst.bbox_visible,
                    })),
                    None => None,
                },
                BaselineKind::Ovis => {
                    let others: Vec<_> = frame
                        .instances
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, o)| o.bbox_visible)
                        .collect();
                    Some(bbox_occlusion_rate(&inst.bbox_visible, &others))
                }
            };
            let cell = match value {
                Some(Ok(v)) => v.to_string(),
                Some(Err(e)) => {
                    warn!("{}/{}: {e}", frame.frame_id, inst.instance_id);
                    String::new()
                }
                None => String::new(),
            };
            text.push_str(&format!("{},{},{cell}\n", frame.frame_id, inst.instance_id));
        }
    }
    match out {
        Some(p) => write(p, text.as_bytes()),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn synth(count: usize, seed: u64, out: &Path, jobs: Option<usize>) -> Result<()> {
    let scenes: Vec<Result<_>> = with_pool(jobs, || {
        (0..count as u64)
            .into_par_iter()
            .map(|i| generate_scene::<f64>(seed, i))
            .collect()
    })?;
    let scenes = scenes.into_iter().collect::<Result<Vec<_>>>()?;
    for s in &scenes {
        let name = format!("{}.json", s.frame.frame_id);
        write(&out.join("frames").join(&name), serialize_frame_document(&s.frame).as_bytes())?;
        write(
            &out.join("pairs").join(&name),
            serialize_pairs_document(std::slice::from_ref(&s.pair)).as_bytes(),
        )?;
    }
    write(&out.join("ground_truth.csv"), ground_truth_csv(&scenes).as_bytes())?;
    info!("wrote {} scene(s) to {}", scenes.len(), out.display());
    Ok(())
}
