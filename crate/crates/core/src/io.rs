//! Certificate JSON, characterization directories and statistics CSV.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::characterize::{Characterization, DiscoveryStats, StatsRow};
use crate::classify::{normalize, verify, FcCertificate, FcStatus, NonFcCertificate};
use crate::enumeration::PartitionList;
use crate::error::{Error, Result};
use crate::family::Family;
use crate::weights::WeightFn;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StatusTag {
    #[serde(rename = "FC")]
    Fc,
    #[serde(rename = "nonFC")]
    NonFc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessJson {
    pub family: Vec<Vec<usize>>,
    pub coefficient: u64,
}

/// On-disk certificate; exactly one of `weight` and `witnesses` is present.
/// `certified` records the normalized family the certificate speaks about.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateJson {
    pub family: Vec<Vec<usize>>,
    pub universe: usize,
    pub status: StatusTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<WitnessJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified: Option<Vec<Vec<usize>>>,
}

impl From<&FcStatus> for CertificateJson {
    fn from(st: &FcStatus) -> Self {
        let family = st.family();
        let base = CertificateJson {
            family: family.to_sets(),
            universe: family.universe(),
            status: StatusTag::Fc,
            weight: None,
            witnesses: None,
            certified: Some(normalize(family).to_sets()),
        };
        match st {
            FcStatus::Fc(c) => CertificateJson {
                weight: Some(c.weight.weights().to_vec()),
                ..base
            },
            FcStatus::NonFc(c) => CertificateJson {
                status: StatusTag::NonFc,
                witnesses: Some(
                    c.witnesses
                        .iter()
                        .map(|(f, k)| WitnessJson {
                            family: f.to_sets(),
                            coefficient: *k,
                        })
                        .collect(),
                ),
                ..base
            },
        }
    }
}

impl TryFrom<CertificateJson> for FcStatus {
    type Error = Error;

    /// Schema checks only; see [`verify`] for the mathematical check.
    fn try_from(j: CertificateJson) -> Result<Self> {
        let n = j.universe;
        let family = Family::from_sets(n, &j.family).map_err(schema)?;
        if let Some(c) = &j.certified {
            if Family::from_sets(n, c).map_err(schema)? != normalize(&family) {
                return Err(Error::Schema("certified family is not the normalized family".into()));
            }
        }
        match (j.status, j.weight, j.witnesses) {
            (StatusTag::Fc, Some(w), None) => {
                if w.len() != n {
                    return Err(Error::Schema(format!("weight has {} entries, universe is {n}", w.len())));
                }
                Ok(FcStatus::Fc(FcCertificate {
                    family,
                    weight: WeightFn::new(w),
                }))
            }
            (StatusTag::NonFc, None, Some(ws)) => {
                let witnesses = ws
                    .into_iter()
                    .map(|w| Ok((Family::from_sets(n, &w.family).map_err(schema)?, w.coefficient)))
                    .collect::<Result<_>>()?;
                Ok(FcStatus::NonFc(NonFcCertificate { family, witnesses }))
            }
            (StatusTag::Fc, _, _) => Err(Error::Schema("FC certificate needs weight and no witnesses".into())),
            (StatusTag::NonFc, _, _) => {
                Err(Error::Schema("nonFC certificate needs witnesses and no weight".into()))
            }
        }
    }
}

fn schema(e: Error) -> Error {
    Error::Schema(e.to_string())
}

pub fn certificate_to_string(st: &FcStatus) -> String {
    serde_json::to_string_pretty(&CertificateJson::from(st)).expect("plain data serializes")
}

pub fn certificate_from_str(s: &str) -> Result<FcStatus> {
    let j: CertificateJson = serde_json::from_str(s)?;
    j.try_into()
}

pub fn save_certificate(path: &Path, st: &FcStatus) -> Result<()> {
    let mut s = certificate_to_string(st);
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

/// Parses a certificate; no verification.
pub fn load_certificate(path: &Path) -> Result<FcStatus> {
    certificate_from_str(&fs::read_to_string(path)?)
}

/// Parses and verifies; a certificate that fails verification is an error.
pub fn load_verified_certificate(path: &Path) -> Result<FcStatus> {
    let st = load_certificate(path)?;
    if !verify(&st) {
        return Err(Error::Schema(format!("{} does not verify", path.display())));
    }
    Ok(st)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamiliesJson {
    n: usize,
    minimal_fc: Vec<CertificateJson>,
    maximal_nonfc: Vec<CertificateJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ListsJson {
    n: usize,
    lf: Vec<PartitionList>,
    ln: Vec<PartitionList>,
}

/// Run metadata written next to the families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub n: usize,
    pub tool_version: String,
    pub wall_clock_seconds: f64,
    pub complete: bool,
    pub minimal_fc: usize,
    pub maximal_nonfc: usize,
    pub lists_visited: usize,
    pub candidates: usize,
    pub nonfc_examined: usize,
    pub fc_same_list_covered: usize,
}

pub const FAMILIES_FILE: &str = "families.json";
pub const LISTS_FILE: &str = "lf_ln.json";
pub const STATS_FILE: &str = "stats.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

/// Writes families, lists, manifest and, when given, statistics.
pub fn save_characterization(
    dir: &Path,
    ch: &Characterization,
    stats: Option<&[StatsRow]>,
    wall_clock_seconds: f64,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let fams = FamiliesJson {
        n: ch.n,
        minimal_fc: ch
            .minimal_fc
            .iter()
            .map(|c| CertificateJson::from(&FcStatus::Fc(c.clone())))
            .collect(),
        maximal_nonfc: ch
            .maximal_nonfc
            .iter()
            .map(|c| CertificateJson::from(&FcStatus::NonFc(c.clone())))
            .collect(),
    };
    write_json(&dir.join(FAMILIES_FILE), &fams)?;
    write_json(
        &dir.join(LISTS_FILE),
        &ListsJson {
            n: ch.n,
            lf: ch.lf_lists.clone(),
            ln: ch.ln_lists.clone(),
        },
    )?;
    if let Some(rows) = stats {
        write_stats_csv(&dir.join(STATS_FILE), rows)?;
    }
    let s = &ch.stats;
    write_json(
        &dir.join(MANIFEST_FILE),
        &Manifest {
            n: ch.n,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds,
            complete: ch.complete,
            minimal_fc: ch.minimal_fc.len(),
            maximal_nonfc: ch.maximal_nonfc.len(),
            lists_visited: s.lists_visited,
            candidates: s.candidates,
            nonfc_examined: s.nonfc_examined,
            fc_same_list_covered: s.fc_same_list_covered,
        },
    )
}

pub fn load_manifest(dir: &Path) -> Result<Manifest> {
    Ok(serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?)
}

/// Loads a characterization; every certificate is verified first.
pub fn load_characterization(dir: &Path) -> Result<Characterization> {
    let fams: FamiliesJson = serde_json::from_str(&fs::read_to_string(dir.join(FAMILIES_FILE))?)?;
    let lists: ListsJson = serde_json::from_str(&fs::read_to_string(dir.join(LISTS_FILE))?)?;
    let manifest = load_manifest(dir)?;
    if lists.n != fams.n || manifest.n != fams.n {
        return Err(Error::Schema("universe sizes disagree across files".into()));
    }
    let mut minimal_fc = Vec::new();
    for j in fams.minimal_fc {
        match FcStatus::try_from(j)? {
            FcStatus::Fc(c) if c.family.universe() == fams.n && verify(&FcStatus::Fc(c.clone())) => {
                minimal_fc.push(c)
            }
            _ => return Err(Error::Schema("minimal_fc entry is not a verified FC certificate".into())),
        }
    }
    let mut maximal_nonfc = Vec::new();
    for j in fams.maximal_nonfc {
        match FcStatus::try_from(j)? {
            FcStatus::NonFc(c) if c.family.universe() == fams.n && verify(&FcStatus::NonFc(c.clone())) => {
                maximal_nonfc.push(c)
            }
            _ => return Err(Error::Schema("maximal_nonfc entry is not a verified nonFC certificate".into())),
        }
    }
    Ok(Characterization {
        n: fams.n,
        minimal_fc,
        maximal_nonfc,
        lf_lists: lists.lf,
        ln_lists: lists.ln,
        complete: manifest.complete,
        stats: DiscoveryStats {
            lists_visited: manifest.lists_visited,
            candidates: manifest.candidates,
            nonfc_examined: manifest.nonfc_examined,
            fc_same_list_covered: manifest.fc_same_list_covered,
        },
    })
}

pub const STATS_HEADER: [&str; 7] = [
    "L",
    "count_fc",
    "count_nonfc",
    "count_fc_irred",
    "count_nonfc_irred",
    "count_min_fc",
    "count_max_nonfc",
];

pub fn write_stats<W: Write>(w: W, rows: &[StatsRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    out.write_record(STATS_HEADER).map_err(csv_err)?;
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        out.write_record([
            r.list.to_string(),
            opt(r.count_fc),
            opt(r.count_nonfc),
            r.count_fc_irred.to_string(),
            r.count_nonfc_irred.to_string(),
            r.count_min_fc.to_string(),
            r.count_max_nonfc.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_stats_csv(path: &Path, rows: &[StatsRow]) -> Result<()> {
    write_stats(fs::File::create(path)?, rows)
}

pub fn read_stats_csv(path: &Path) -> Result<Vec<StatsRow>> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let num = |s: &str| -> Result<usize> {
        s.parse().map_err(|_| Error::Schema(format!("bad count {s:?}")))
    };
    let opt = |s: &str| -> Result<Option<usize>> {
        if s.is_empty() {
            Ok(None)
        } else {
            num(s).map(Some)
        }
    };
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| Error::Schema(e.to_string()))?;
        if rec.len() != STATS_HEADER.len() {
            return Err(Error::Schema(format!("stats row has {} fields", rec.len())));
        }
        rows.push(StatsRow {
            list: rec[0].parse()?,
            count_fc: opt(&rec[1])?,
            count_nonfc: opt(&rec[2])?,
            count_fc_irred: num(&rec[3])?,
            count_nonfc_irred: num(&rec[4])?,
            count_min_fc: num(&rec[5])?,
            count_max_nonfc: num(&rec[6])?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify;

    #[test]
    fn certificate_round_trip() {
        for f in [Family::of(3, &[&[0, 1, 2]]), Family::of(2, &[&[0]])] {
            let st = classify(&f).unwrap();
            let back = certificate_from_str(&certificate_to_string(&st)).unwrap();
            assert_eq!(back, st);
        }
    }

    #[test]
    fn schema_violations() {
        let both = r#"{"family":[[0]],"universe":1,"status":"FC","weight":[1],"witnesses":[]}"#;
        assert!(matches!(certificate_from_str(both), Err(Error::Schema(_))));
        let short = r#"{"family":[[0]],"universe":2,"status":"FC","weight":[1]}"#;
        assert!(matches!(certificate_from_str(short), Err(Error::Schema(_))));
        let extra = r#"{"family":[[0]],"universe":1,"status":"FC","weight":[1],"x":1}"#;
        assert!(matches!(certificate_from_str(extra), Err(Error::Schema(_))));
        let range = r#"{"family":[[3]],"universe":1,"status":"FC","weight":[1]}"#;
        assert!(matches!(certificate_from_str(range), Err(Error::Schema(_))));
    }
}
