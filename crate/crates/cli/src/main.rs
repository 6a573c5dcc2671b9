//! `fcfam`: classify set families, check certificates, and run the
//! characterization pipeline.
//!
//! Exit codes: 0 verified/true, 1 refuted/false, 2 usage or input error,
//! 3 resource cap.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use fcfam::characterize::{
    coverage_report, find_characteristic_with, stats, verify_semi_uniform_lists, CharacterizeOptions,
};
use fcfam::classify::{check_counterexample, classify, expand_counterexample, find_sufficient_d, verify, FcStatus};
use fcfam::enumeration::{enum_iso_base, Always, And, Irreducible, IncPredicate, NotFcCoveredIndexed, PartitionList};
use fcfam::io::{
    certificate_to_string, load_certificate, load_characterization, save_characterization, write_stats,
    write_stats_csv,
};
use fcfam::linarith::export_lp;
use fcfam::{parse_family, Error, Family, WeightFn};

const EXIT_TRUE: u8 = 0;
const EXIT_FALSE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;

/// Largest universe characterized without `--extended`.
const STANDARD_LIMIT: usize = 5;

#[derive(Parser)]
#[command(name = "fcfam", version, about = "Frankl-complete family classification and certification")]
struct Cli {
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide FC status and print a certificate.
    Classify {
        /// Family such as "{{0,1},{1,2}}".
        family: String,
        /// Universe size; defaults to the span of the family.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate file.
    Verify { cert: PathBuf },
    /// Print an iso-base of the L-partitioned families over [n].
    Enumerate {
        #[arg(long)]
        n: usize,
        /// Partition list such as "[0,0,2,1]".
        #[arg(long)]
        partition: String,
        #[arg(long)]
        irreducible: bool,
        /// Drop families FC-covered by the minimal FC families in this directory.
        #[arg(long)]
        not_covered_by: Option<PathBuf>,
    },
    /// Find the characteristic families of [n] and write them to a directory.
    Characterize {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        /// Allow universes above the standard limit.
        #[arg(long)]
        extended: bool,
        /// Stop after this many candidate families.
        #[arg(long)]
        candidate_cap: Option<usize>,
    },
    /// Check semi-uniform lists and total coverage of a characterization.
    CoverCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        chars: PathBuf,
    },
    /// Per-list FC and nonFC counts as CSV.
    Stats {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        chars: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the negative-share 0-1 program in LP format.
    ExportLp {
        family: String,
        /// JSON array of natural weights, one per element.
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Build the union-closed counterexample of a nonFC certificate.
    ExpandCounterexample {
        cert: PathBuf,
        /// Repetition factor; defaults to the least one that works.
        #[arg(long)]
        d: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::ResourceCap(_) | Error::IterationCap(_) | Error::UniverseTooLarge { .. }) => EXIT_CAP,
        Some(Error::Overflow(_)) => EXIT_CAP,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn read_family(s: &str, n: Option<usize>) -> anyhow::Result<Family> {
    Ok(match n {
        Some(n) => parse_family(s, n)?,
        None => s.parse()?,
    })
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cmd: Cmd) -> anyhow::Result<u8> {
    match cmd {
        Cmd::Classify { family, n, out } => {
            let f = read_family(&family, n)?;
            let st = classify(&f)?;
            emit(out.as_deref(), &certificate_to_string(&st))?;
            eprintln!("{}: {}", f, if st.is_fc() { "FC" } else { "nonFC" });
            Ok(EXIT_TRUE)
        }
        Cmd::Verify { cert } => {
            let st = load_certificate(&cert)?;
            let ok = verify(&st);
            let tag = if st.is_fc() { "FC" } else { "nonFC" };
            println!("{} {}: {}", tag, st.family(), if ok { "verified" } else { "refuted" });
            Ok(if ok { EXIT_TRUE } else { EXIT_FALSE })
        }
        Cmd::Enumerate {
            n,
            partition,
            irreducible,
            not_covered_by,
        } => {
            let l: PartitionList = partition.parse()?;
            if l.len() > n + 1 {
                bail!(Error::Usage(format!("list {l} is longer than n + 1 = {}", n + 1)));
            }
            let idx = match &not_covered_by {
                Some(dir) => Some(load_characterization(dir)?.cover_index()?),
                None => None,
            };
            let base = match (&idx, irreducible) {
                (Some(i), true) => enum_iso_base(n, &l, &And(Irreducible, NotFcCoveredIndexed(i)))?,
                (Some(i), false) => enum_iso_base(n, &l, &NotFcCoveredIndexed(i))?,
                (None, true) => enum_iso_base(n, &l, &Irreducible as &dyn IncPredicate)?,
                (None, false) => enum_iso_base(n, &l, &Always)?,
            };
            for f in base.iter() {
                println!("{f}");
            }
            eprintln!("{} families", base.len());
            Ok(EXIT_TRUE)
        }
        Cmd::Characterize {
            n,
            out,
            extended,
            candidate_cap,
        } => {
            if n > STANDARD_LIMIT && !extended {
                bail!(Error::Usage(format!("n = {n} needs --extended")));
            }
            let start = Instant::now();
            let ch = find_characteristic_with(n, &CharacterizeOptions { candidate_cap })?;
            let rows = if ch.complete { Some(stats(&ch)?) } else { None };
            save_characterization(&out, &ch, rows.as_deref(), start.elapsed().as_secs_f64())?;
            eprintln!(
                "n = {n}: {} minimal FC, {} maximal nonFC, {} nonFC examined{}",
                ch.minimal_fc.len(),
                ch.maximal_nonfc.len(),
                ch.stats.nonfc_examined,
                if ch.complete { "" } else { " (incomplete: candidate cap reached)" }
            );
            Ok(if ch.complete { EXIT_TRUE } else { EXIT_CAP })
        }
        Cmd::CoverCheck { n, chars } => {
            let ch = load_characterization(&chars)?;
            if ch.n != n {
                bail!(Error::UniverseMismatch { left: n, right: ch.n });
            }
            if !ch.complete {
                bail!(Error::ResourceCap("characterization is incomplete".into()));
            }
            let idx = ch.cover_index()?;
            let semi = verify_semi_uniform_lists(n, &idx, &ch.lf_lists, &ch.ln_lists)?;
            let report = coverage_report(n, &idx, &ch.lf_lists)?;
            println!("semi-uniform lists: {}", if semi { "verified" } else { "refuted" });
            println!(
                "total coverage: {} ({} lists, {} irreducible families not FC-covered, {} uncovered)",
                if report.holds() { "verified" } else { "refuted" },
                report.region_lists,
                report.emitted,
                report.uncovered.len()
            );
            for f in &report.uncovered {
                println!("uncovered {f}");
            }
            Ok(if semi && report.holds() { EXIT_TRUE } else { EXIT_FALSE })
        }
        Cmd::Stats { n, chars, out } => {
            let ch = load_characterization(&chars)?;
            if ch.n != n {
                bail!(Error::UniverseMismatch { left: n, right: ch.n });
            }
            let rows = stats(&ch)?;
            match out {
                Some(p) => write_stats_csv(&p, &rows)?,
                None => write_stats(std::io::stdout().lock(), &rows)?,
            }
            Ok(EXIT_TRUE)
        }
        Cmd::ExportLp { family, weights, out, n } => {
            let f = read_family(&family, n)?;
            let text = fs::read_to_string(&weights).with_context(|| format!("reading {}", weights.display()))?;
            let w: WeightFn = serde_json::from_str(&text).map_err(Error::from)?;
            export_lp(&f, &w, &out)?;
            Ok(EXIT_TRUE)
        }
        Cmd::ExpandCounterexample { cert, d, out } => {
            let FcStatus::NonFc(c) = load_certificate(&cert)? else {
                bail!(Error::Usage("expansion needs a nonFC certificate".into()));
            };
            if !verify(&FcStatus::NonFc(c.clone())) {
                eprintln!("certificate does not verify");
                return Ok(EXIT_FALSE);
            }
            let (d, fd) = match d {
                Some(d) => (d, expand_counterexample(&c, d)?),
                None => find_sufficient_d(&c)?,
            };
            let ok = check_counterexample(&c.family, &fd);
            emit(out.as_deref(), &fd.to_string())?;
            eprintln!(
                "d = {d}: {} sets over {} elements, counterexample {}",
                fd.len(),
                fd.universe(),
                if ok { "verified" } else { "refuted" }
            );
            Ok(if ok { EXIT_TRUE } else { EXIT_FALSE })
        }
    }
}
