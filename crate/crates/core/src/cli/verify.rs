//! Golden suites run by `mcg-abelian verify`.

use clap::ValueEnum;
use serde::Serialize;

use super::table51_row;
use crate::abelian::{AbelianGroup, Signature};
use crate::classify::{check_catalogue_entry, reducer_image};
use crate::error::Result;
use crate::genvec::{cup_equivalent_mod_aut, orbit_classes_oracle, GeneratingVector, OracleOptions};
use crate::ramified::{orbit_count_oracle, pipeline_count, SPACE_CEILING, TABLE51_PAIRS};
use crate::unramified::{canonical_reps_elementary, count_elementary, genus65_catalogue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Table51,
    Genus33,
    Genus65,
    UnramifiedElementary,
    PipelineVsOracle,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyCase {
    pub case: String,
    pub expected: String,
    pub actual: String,
    /// `None` when no independent route was within reach.
    pub pass: Option<bool>,
}

impl VerifyCase {
    pub fn status(&self) -> &'static str {
        match self.pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "SKIP",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub suite: String,
    pub cases: Vec<VerifyCase>,
    /// No case failed and at least one ran.
    pub passed: bool,
}

fn case(name: String, expected: impl ToString, actual: impl ToString, pass: Option<bool>) -> VerifyCase {
    VerifyCase {
        case: name,
        expected: expected.to_string(),
        actual: actual.to_string(),
        pass,
    }
}

/// Primes covering every residue class mod 12 twice where reachable.
const TABLE51_PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 37];
/// The verify suites keep the `Omega` oracle to fast sizes.
const VERIFY_OMEGA_CEILING: u128 = 1 << 22;

fn suite_table51(ceiling: u128) -> Result<Vec<VerifyCase>> {
    let mut out = Vec::new();
    for &(r, v) in &TABLE51_PAIRS {
        for &p in &TABLE51_PRIMES {
            let row = table51_row(r, v, p, ceiling.min(VERIFY_OMEGA_CEILING))?;
            let cell = |x: Option<u64>| x.map_or("-".to_string(), |n| n.to_string());
            let actual = format!("oracle {}, pipeline {}", cell(row.oracle), cell(row.pipeline));
            let pass = row.agree.filter(|_| row.closed_form.is_some());
            out.push(case(format!("r={r} v={v} p={p}"), cell(row.closed_form), actual, pass));
        }
    }
    Ok(out)
}

fn genus33_vectors(g: &AbelianGroup) -> Result<[GeneratingVector; 3]> {
    let sig = Signature::unramified(2);
    let build = |a: [&[i64]; 2], b: [&[i64]; 2]| GeneratingVector::from_coords(g, &sig, &a, &b, &[]);
    let (w1, w2, w3, z): (&[i64], &[i64], &[i64], &[i64]) = (&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[0, 0, 0]);
    Ok([
        build([w1, w3], [w2, z])?,
        build([w1, w2], [w3, z])?,
        build([w1, &[0, 2, 0]], [w2, w3])?,
    ])
}

fn suite_genus33(ceiling: u128) -> Result<Vec<VerifyCase>> {
    let g = AbelianGroup::new(vec![4, 4, 2])?;
    let sig = Signature::unramified(2);
    let opts = OracleOptions {
        ceiling,
        ..OracleOptions::default()
    };
    let oracle = orbit_classes_oracle(&g, &sig, &opts)?.count;
    let image = reducer_image(&g, 2, ceiling)?;
    let etas = genus33_vectors(&g)?;
    let mut separated = 0;
    for i in 0..3 {
        for j in i + 1..3 {
            if !cup_equivalent_mod_aut(&etas[i], &etas[j], ceiling)? {
                separated += 1;
            }
        }
    }
    Ok(vec![
        case("C4xC4xC2 rho=2: oracle classes".into(), 3, oracle, Some(oracle == 3)),
        case(
            "C4xC4xC2 rho=2: distinct reducer outputs".into(),
            "<= 6",
            image.len(),
            Some(image.len() <= 6),
        ),
        case(
            "eta1, eta2, eta3: pairs separated by the cup invariant".into(),
            3,
            separated,
            Some(separated == 3),
        ),
    ])
}

fn suite_genus65(ceiling: u128) -> Result<Vec<VerifyCase>> {
    genus65_catalogue()
        .iter()
        .map(|e| {
            let chk = check_catalogue_entry(e, ceiling)?;
            let name: Vec<String> = e.invariant_factors.iter().map(|n| format!("C{n}")).collect();
            let actual = format!(
                "{} (candidates {}, cup classes {}, oracle {})",
                chk.classes().map_or("-".to_string(), |n| n.to_string()),
                chk.candidates,
                chk.cup_classes,
                chk.oracle.map_or("-".to_string(), |n| n.to_string())
            );
            Ok(case(
                format!("{} rho={} genus {}", name.join("x"), e.orbit_genus, e.genus),
                e.published_classes,
                actual,
                chk.classes().map(|_| chk.matches_published()),
            ))
        })
        .collect()
}

/// `(p, w, rho)` with `w <= 2 rho`: `p` in {2, 3} with `rho <= 2, w <= 4`, and `p = 5, w <= 2`.
pub fn unramified_grid() -> Vec<(u64, usize, usize)> {
    let mut grid = Vec::new();
    for (p, max_w) in [(2u64, 4usize), (3, 4), (5, 2)] {
        for rho in 1..=2usize {
            for w in 1..=max_w.min(2 * rho) {
                grid.push((p, w, rho));
            }
        }
    }
    grid
}

fn suite_unramified(ceiling: u128) -> Result<Vec<VerifyCase>> {
    unramified_grid()
        .into_iter()
        .map(|(p, w, rho)| {
            let expected = count_elementary(rho as u64, w as u64);
            let reps = canonical_reps_elementary(p, w, rho)?.len();
            let g = AbelianGroup::elementary(p, w)?;
            let opts = OracleOptions {
                ceiling,
                ..OracleOptions::default()
            };
            let oracle = match orbit_classes_oracle(&g, &Signature::unramified(rho as u64), &opts) {
                Ok(res) => Some(res.count),
                Err(crate::Error::CeilingExceeded { .. }) => None,
                Err(e) => return Err(e),
            };
            let actual = format!(
                "representatives {reps}, oracle {}",
                oracle.map_or("-".to_string(), |n| n.to_string())
            );
            let pass = oracle.map(|o| o as u64 == expected && reps as u64 == expected);
            Ok(case(format!("p={p} w={w} rho={rho}"), expected, actual, pass))
        })
        .collect()
}

/// `(v, r, p)` with `p > r` where both routes are quick.
pub const PIPELINE_GRID: [(usize, usize, u64); 12] = [
    (1, 2, 5),
    (1, 3, 5),
    (2, 3, 5),
    (1, 4, 5),
    (2, 4, 5),
    (3, 4, 5),
    (1, 3, 7),
    (2, 3, 7),
    (1, 4, 7),
    (2, 4, 7),
    (1, 5, 7),
    (2, 5, 7),
];

fn suite_pipeline(ceiling: u128) -> Result<Vec<VerifyCase>> {
    PIPELINE_GRID
        .iter()
        .map(|&(v, r, p)| {
            let oracle = orbit_count_oracle(v, r, p, ceiling.max(VERIFY_OMEGA_CEILING))?;
            let pipeline = pipeline_count(v, r, p, SPACE_CEILING)? as u64;
            Ok(case(
                format!("v={v} r={r} p={p}"),
                format!("oracle {oracle}"),
                format!("pipeline {pipeline}"),
                Some(oracle == pipeline),
            ))
        })
        .collect()
}

pub fn run_suite(suite: Suite, ceiling: u128) -> Result<VerifySummary> {
    let cases = match suite {
        Suite::Table51 => suite_table51(ceiling)?,
        Suite::Genus33 => suite_genus33(ceiling)?,
        Suite::Genus65 => suite_genus65(ceiling)?,
        Suite::UnramifiedElementary => suite_unramified(ceiling)?,
        Suite::PipelineVsOracle => suite_pipeline(ceiling)?,
    };
    let name = serde_json::to_value(suite)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default();
    let passed = cases.iter().all(|c| c.pass != Some(false)) && cases.iter().any(|c| c.pass.is_some());
    Ok(VerifySummary {
        suite: name,
        cases,
        passed,
    })
}
