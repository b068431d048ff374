use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use super::{run_with_cache, write, Cache, RunConfig};
use crate::error::{Error, Result};
use crate::evaluation::csv_field;

pub const SWEEP_CSV_HEADER: &str =
    "axis,value,embedding,algorithm,weighting,reranking,pca_dim,mean,std_dev,seeds,error";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    PcaDims,
    Algorithms,
    WeightSchemes,
    RerankSchemes,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::PcaDims => "pca_dims",
            Self::Algorithms => "algorithms",
            Self::WeightSchemes => "weight_schemes",
            Self::RerankSchemes => "rerank_schemes",
        }
    }

    fn key(self) -> &'static str {
        match self {
            Self::PcaDims => "pca_dim",
            Self::Algorithms => "algorithm",
            Self::WeightSchemes => "weighting",
            Self::RerankSchemes => "reranking",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pca_dims" | "pca_dim" | "pca" => Ok(Self::PcaDims),
            "algorithms" | "algorithm" => Ok(Self::Algorithms),
            "weight_schemes" | "weighting" => Ok(Self::WeightSchemes),
            "rerank_schemes" | "reranking" => Ok(Self::RerankSchemes),
            _ => Err(Error::InvalidArgument(format!("unknown sweep axis {s:?}"))),
        }
    }
}

/// Runs `base` once per value of `axis` and returns the results matrix.
///
/// Each cell writes its run under `<output>/sweep/<axis>/<value>/`; the
/// matrix goes to `<output>/sweep_<axis>.csv`. A failing cell becomes a row
/// with an `error` entry and the sweep moves on. Values that do not parse
/// for the axis are rejected before anything runs.
pub fn sweep(base: &RunConfig, axis: SweepAxis, values: &[String], cache: &mut Cache) -> Result<String> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one value".into()));
    }
    let mut cells = Vec::with_capacity(values.len());
    for v in values {
        let mut cfg = base.clone();
        cfg.set(axis.key(), v)?;
        cfg.output = base.output.join("sweep").join(axis.as_str()).join(v);
        cells.push((v, cfg));
    }
    base.validate()?;

    let mut csv = format!("{SWEEP_CSV_HEADER}\n");
    for (v, cfg) in cells {
        let lead = format!("{axis},{}", csv_field(v));
        match run_with_cache(&cfg, cache) {
            Ok(out) => {
                let _ = writeln!(csv, "{lead},{},", out.report.csv_row());
            }
            Err(e) => {
                let _ = writeln!(
                    csv,
                    "{lead},{},{},{},{},{},,,,{}",
                    csv_field(&cfg.embedding_label()),
                    cfg.algorithm,
                    cfg.weighting,
                    cfg.reranking,
                    cfg.pca_dim.map_or_else(|| "full".to_string(), |d| d.to_string()),
                    csv_field(&format!("{}: {e}", e.kind()))
                );
            }
        }
    }
    write(&base.output.join(format!("sweep_{axis}.csv")), &csv)?;
    Ok(csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_names() {
        for a in [
            SweepAxis::PcaDims,
            SweepAxis::Algorithms,
            SweepAxis::WeightSchemes,
            SweepAxis::RerankSchemes,
        ] {
            assert_eq!(a.as_str().parse::<SweepAxis>().unwrap(), a);
        }
    }

    #[test]
    fn bad_values_fail_before_running() {
        let base = RunConfig {
            corpus: "nowhere".into(),
            embeddings: "nothing".into(),
            ..RunConfig::default()
        };
        let err = sweep(&base, SweepAxis::PcaDims, &["ten".into()], &mut Cache::new()).unwrap_err();
        assert_eq!(err.kind(), "config");
    }
}
