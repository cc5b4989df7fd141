//! Occlusion severity bands used by published pedestrian benchmarks.
//!
//! Printed ranges are encoded as: `a-b` → `[a, b]`, `<a` → `[0, a)`,
//! `>a` → `(a, 100]`, `≤a` → `[0, a]`. A boundary claimed by two bands goes
//! to the lower band. Values outside every band are `unlabeled`.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

pub const UNLABELED: &str = "unlabeled";
pub const NOT_NUMERIC: &str = "not_numeric";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Inclusive(f64),
    Exclusive(f64),
}

impl Bound {
    fn value(self) -> f64 {
        match self {
            Bound::Inclusive(v) | Bound::Exclusive(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub label: &'static str,
    pub lower: Bound,
    pub upper: Bound,
}

impl Band {
    fn contains(&self, pct: f64) -> bool {
        let above = match self.lower {
            Bound::Inclusive(v) => pct >= v,
            Bound::Exclusive(v) => pct > v,
        };
        let below = match self.upper {
            Bound::Inclusive(v) => pct <= v,
            Bound::Exclusive(v) => pct < v,
        };
        above && below
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = match self.lower {
            Bound::Inclusive(_) => '[',
            Bound::Exclusive(_) => '(',
        };
        let close = match self.upper {
            Bound::Inclusive(_) => ']',
            Bound::Exclusive(_) => ')',
        };
        write!(
            f,
            "{}={open}{},{}{close}",
            self.label,
            self.lower.value(),
            self.upper.value()
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetScheme {
    pub name: &'static str,
    /// Ascending and non-overlapping. Empty for verbal-only schemes.
    pub bands: &'static [Band],
    pub numeric: bool,
}

const fn band(label: &'static str, lower: Bound, upper: Bound) -> Band {
    Band { label, lower, upper }
}

use Bound::{Exclusive as Ex, Inclusive as In};

pub static SCHEMES: [DatasetScheme; 9] = [
    DatasetScheme {
        name: "eurocity",
        bands: &[
            band("low", In(0.0), Ex(40.0)),
            band("partial", In(40.0), In(80.0)),
            band("heavy", Ex(80.0), In(100.0)),
        ],
        numeric: true,
    },
    DatasetScheme {
        name: "citypersons",
        bands: &[
            band("partial", In(0.0), Ex(35.0)),
            band("heavy", In(35.0), In(75.0)),
        ],
        numeric: true,
    },
    DatasetScheme {
        name: "kitti",
        bands: &[],
        numeric: false,
    },
    DatasetScheme {
        name: "caltech",
        bands: &[
            band("partial", In(1.0), In(35.0)),
            band("heavy", Ex(35.0), In(80.0)),
        ],
        numeric: true,
    },
    DatasetScheme {
        name: "multispectral_ovis",
        bands: &[
            band("partial", In(0.0), In(50.0)),
            band("heavy", Ex(50.0), In(100.0)),
        ],
        numeric: true,
    },
    DatasetScheme {
        name: "tju_dhd",
        bands: &[
            band("partial", In(0.0), In(35.0)),
            band("heavy", Ex(35.0), In(100.0)),
        ],
        numeric: true,
    },
    DatasetScheme {
        name: "daimler_tsinghua",
        bands: &[
            band("low", In(0.0), Ex(10.0)),
            band("partial", In(10.0), In(40.0)),
            band("heavy", In(41.0), In(80.0)),
        ],
        numeric: true,
    },
    DatasetScheme {
        name: "li2017",
        bands: &[
            band("partial", In(1.0), In(40.0)),
            band("heavy", In(41.0), In(80.0)),
        ],
        numeric: true,
    },
    DatasetScheme {
        name: "sailvos",
        bands: &[
            band("partial", In(1.0), In(25.0)),
            band("heavy", Ex(25.0), In(75.0)),
        ],
        numeric: true,
    },
];

impl DatasetScheme {
    pub fn by_name(name: &str) -> Result<&'static DatasetScheme> {
        SCHEMES.iter().find(|s| s.name == name).ok_or_else(|| {
            let names: Vec<_> = SCHEMES.iter().map(|s| s.name).collect();
            Error::Validation(format!(
                "unknown scheme `{name}`; expected one of {}",
                names.join(", ")
            ))
        })
    }

    /// Label of the band containing `occlusion_percent`.
    pub fn categorize<T: Scalar>(&self, occlusion_percent: T) -> Result<&'static str> {
        if !(occlusion_percent >= T::zero() && occlusion_percent <= lit(100.0)) {
            return Err(Error::Contract(format!(
                "occlusion {occlusion_percent}% outside [0, 100]"
            )));
        }
        if !self.numeric {
            return Ok(NOT_NUMERIC);
        }
        let pct = occlusion_percent.to_f64().expect("finite percentage");
        Ok(self
            .bands
            .iter()
            .find(|b| b.contains(pct))
            .map_or(UNLABELED, |b| b.label))
    }

    /// Position of the matching band, `None` for gaps and verbal schemes.
    pub fn band_index(&self, occlusion_percent: f64) -> Option<usize> {
        self.bands.iter().position(|b| b.contains(occlusion_percent))
    }
}

/// Text table of every scheme, one line each.
pub fn render_band_table() -> String {
    let mut out = String::new();
    for s in &SCHEMES {
        if s.numeric {
            let bands: Vec<String> = s.bands.iter().map(Band::to_string).collect();
            writeln!(out, "{} {}", s.name, bands.join(" ")).unwrap();
        } else {
            writeln!(out, "{} {NOT_NUMERIC}", s.name).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat(name: &str, pct: f64) -> &'static str {
        DatasetScheme::by_name(name).unwrap().categorize(pct).unwrap()
    }

    #[test]
    fn printed_examples() {
        assert_eq!(cat("eurocity", 25.0), "low");
        assert_eq!(cat("citypersons", 50.0), "heavy");
        assert_eq!(cat("daimler_tsinghua", 90.0), UNLABELED);
        assert_eq!(cat("kitti", 12.0), NOT_NUMERIC);
    }

    #[test]
    fn shared_boundary_goes_low() {
        assert_eq!(cat("caltech", 35.0), "partial");
        assert_eq!(cat("caltech", 35.5), "heavy");
        assert_eq!(cat("eurocity", 80.0), "partial");
        assert_eq!(cat("multispectral_ovis", 50.0), "partial");
        assert_eq!(cat("daimler_tsinghua", 40.5), UNLABELED);
    }

    #[test]
    fn out_of_range_rejected() {
        let s = DatasetScheme::by_name("eurocity").unwrap();
        assert!(matches!(s.categorize(-0.1), Err(Error::Contract(_))));
        assert!(matches!(s.categorize(100.5f32), Err(Error::Contract(_))));
        assert!(DatasetScheme::by_name("nope").is_err());
    }

    #[test]
    fn bands_ascending_and_disjoint() {
        for s in &SCHEMES {
            for pair in s.bands.windows(2) {
                assert!(pair[0].upper.value() <= pair[1].lower.value(), "{}", s.name);
            }
            // monotone over a fine sweep
            let mut last = 0;
            for i in 0..=1000 {
                if let Some(idx) = s.band_index(i as f64 / 10.0) {
                    assert!(idx >= last, "{}", s.name);
                    last = idx;
                }
            }
        }
    }
}
