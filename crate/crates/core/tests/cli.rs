mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::frame_with;
use occlometer::cli::{run, BaselineKind, Command as Cmd, RunConfig};
use occlometer::detections::ResultsDocument;
use occlometer::{parse_results_document, serialize_frame_document};

fn occlometer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_occlometer"))
        .args(args)
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_fully_visible_figure() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("frame.json");
    let out = dir.path().join("result.json");
    let fig = occlometer::synth::generate_figure::<f64>(
        &occlometer::synth::FigureSpec::new(occlometer::Point2::new(64.0, 150.0), 120.0, occlometer::synth::Pose::Standing, 3)
            .unwrap(),
        128,
        160,
    )
    .unwrap();
    let frame = occlometer::ImageFrame {
        frame_id: "solo".into(),
        width: 128,
        height: 160,
        instances: vec![fig],
    };
    fs::write(&input, serialize_frame_document(&frame)).unwrap();

    let o = occlometer(&["classify", "--input", path(&input), "--out", path(&out), "--scheme", "citypersons"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: ResultsDocument = parse_results_document(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc.instances.len(), 1);
    assert_eq!(doc.instances[0].occlusion_percent, 0.0);
    assert_eq!(doc.instances[0].category.as_deref(), Some("partial"));
}

#[test]
fn synth_then_evaluate_ten_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let eval = dir.path().join("eval");
    let o = occlometer(&["synth", "--count", "10", "--seed", "5", "--out", path(&data)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_dir(data.join("frames")).unwrap().count(), 10);

    let o = occlometer(&[
        "evaluate",
        "--pairs",
        path(&data.join("pairs")),
        "--input",
        path(&data.join("frames")),
        "--out",
        path(&eval),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let instances = fs::read_to_string(eval.join("instances.csv")).unwrap();
    assert_eq!(instances.lines().count(), 11);
    assert_eq!(instances.lines().next().unwrap(), "instance_id,occ_pixel,occ_proposed,occ_citypersons");
    let summary = fs::read_to_string(eval.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2 * 11);
    assert!(summary.lines().nth(1).unwrap().starts_with("proposed,0,1,10,"));
}

#[test]
fn schemes_list_prints_nine() {
    let o = occlometer(&["schemes", "list"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.lines().any(|l| l == "kitti not_numeric"));
}

#[test]
fn missing_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = occlometer(&[
        "classify",
        "--input",
        path(&dir.path().join("nope.json")),
        "--out",
        path(&dir.path().join("o.json")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn schema_violation_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    fs::write(&input, r#"{"frame_id": "x", "width": 0, "height": 4, "instances": []}"#).unwrap();
    let o = occlometer(&["classify", "--input", path(&input), "--out", path(&dir.path().join("o.json"))]);
    assert_eq!(o.status.code(), Some(3));
    fs::write(&input, "not json").unwrap();
    let o = occlometer(&["classify", "--input", path(&input), "--out", path(&dir.path().join("o.json"))]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bad_threshold_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.json");
    fs::write(&input, serialize_frame_document(&frame_with(|_| true))).unwrap();
    let o = occlometer(&[
        "classify",
        "--input",
        path(&input),
        "--out",
        path(&dir.path().join("o.json")),
        "--keypoint-threshold",
        "1.5",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn threshold_flag_changes_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.json");
    let out = dir.path().join("o.json");
    fs::write(&input, serialize_frame_document(&frame_with(|_| false))).unwrap();
    let read = |t: &str| {
        let o = occlometer(&["classify", "--input", path(&input), "--out", path(&out), "--keypoint-threshold", t]);
        assert!(o.status.success());
        parse_results_document::<f64>(&fs::read_to_string(&out).unwrap()).unwrap().instances[0].occlusion_percent
    };
    assert_eq!(read("0.3"), 100.0);
    assert_eq!(read("0.05"), 0.0);
}

#[test]
fn directory_batch_keeps_file_names() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    fs::create_dir(&input).unwrap();
    for name in ["b.json", "a.json"] {
        fs::write(input.join(name), serialize_frame_document(&frame_with(|_| true))).unwrap();
    }
    fs::write(input.join("notes.txt"), "skip me").unwrap();
    let out = dir.path().join("out");
    let o = occlometer(&["classify", "--input", path(&input), "--out", path(&out), "--jobs", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<_> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["a.json", "b.json"]);
}

#[test]
fn baselines_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let mut cfg = RunConfig::new(Cmd::Synth {
        count: 40,
        seed: 2,
        out: data.clone(),
    });
    cfg.jobs = Some(2);
    run(&cfg, &mut Vec::new()).unwrap();

    for kind in [BaselineKind::CityPersons, BaselineKind::Ovis] {
        let mut out = Vec::new();
        run(
            &RunConfig::new(Cmd::Baseline {
                kind,
                input: data.join("frames"),
                out: None,
            }),
            &mut out,
        )
        .unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("frame_id,instance_id,occlusion"));
        let rows: Vec<_> = lines.collect();
        assert!(rows.len() >= 40);
        assert!(rows[0].starts_with("scene_0000,scene_0000/p0,"));
    }
}
