//! Enumeration of connection sets over a group, with every mask decided by
//! all three routes (closed-form criteria, exact block spectra, numeric
//! eigensolver) and cross-checked.  Records serialize to JSONL with a fixed
//! field order so that identical flags produce byte-identical output.

use std::collections::BTreeSet;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::criteria::check_main;
use crate::ext::{split_connection_set, ConnectionSet, ExtGroup, GroupError};
use crate::reps::{classify, Rep};
use crate::spectrum::{adjacency, exact_spectrum, is_integral_numeric, numeric_spectrum, SpectrumError};

/// The groups every cross-route sweep runs over: all non-abelian extensions
/// of small abelian groups by an index-2 involution, |G| ≤ 16.
pub const GROUP_CATALOG: [&str; 8] = [
    "dihedral(6)",
    "dihedral(8)",
    "dihedral(10)",
    "dihedral(12)",
    "dicyclic(4; 2)",
    "dicyclic(2x4; 0,2)",
    "semidihedral(8)",
    "modular(8)",
];

/// Which masks to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MaskKind {
    #[serde(rename = "all")]
    All,
    #[serde(rename = "undirected")]
    Undirected,
    #[serde(rename = "directed")]
    Directed,
}

impl std::fmt::Display for MaskKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MaskKind::All => "all",
            MaskKind::Undirected => "undirected",
            MaskKind::Directed => "directed",
        })
    }
}

impl FromStr for MaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(MaskKind::All),
            "undirected" => Ok(MaskKind::Undirected),
            "directed" => Ok(MaskKind::Directed),
            other => Err(format!(
                "unknown kind {other:?}; expected all, undirected or directed"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum CensusError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("the mask space has 2^{bits} elements, more than the limit {limit}; sampling requires an explicit seed")]
    SeedRequired { bits: u32, limit: u64 },
    #[error("numeric eigensolver failed on mask {mask}: {source}")]
    Numeric { mask: u64, source: SpectrumError },
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(
        "route disagreement on {group} mask {mask}: criteria={criteria} exact={exact} numeric={numeric}",
        group = .0.group_spec, mask = .0.mask,
        criteria = .0.verdict_criteria, exact = .0.verdict_exact, numeric = .0.verdict_numeric
    )]
    Disagreement(Box<CensusRecord>),
}

/// One decided mask.  `kind` classifies the set itself (undirected when
/// S = S⁻¹, directed when S ∩ S⁻¹ = ∅ and S ≠ ∅, mixed otherwise);
/// `spectrum` lists the exact eigenvalues, null where a block eigenvalue is
/// irrational.  `elapsed_us` stays 0 unless timings were requested, keeping
/// output byte-identical across runs.
#[derive(Clone, Debug, Serialize)]
pub struct CensusRecord {
    pub group_spec: String,
    pub mask: u64,
    pub kind: &'static str,
    pub verdict_criteria: bool,
    pub verdict_exact: bool,
    pub verdict_numeric: bool,
    pub spectrum: Vec<Option<i64>>,
    pub elapsed_us: u64,
}

impl CensusRecord {
    pub fn verdicts_agree(&self) -> bool {
        self.verdict_criteria == self.verdict_exact && self.verdict_exact == self.verdict_numeric
    }
}

/// First line of every JSONL file.
#[derive(Clone, Debug, Serialize)]
pub struct CensusHeader {
    pub schema: u32,
    pub group: String,
    pub kind: MaskKind,
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct KindCounts {
    pub undirected: u64,
    pub directed: u64,
    pub mixed: u64,
}

impl KindCounts {
    fn bump(&mut self, kind: &str) {
        match kind {
            "undirected" => self.undirected += 1,
            "directed" => self.directed += 1,
            _ => self.mixed += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.undirected + self.directed + self.mixed
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusSummary {
    pub group_spec: String,
    pub totals: KindCounts,
    pub integral: KindCounts,
    /// Up to ten witnesses that nonempty antisymmetric sets can be integral.
    pub integral_directed_examples: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct CensusOptions {
    pub kind: MaskKind,
    /// Exhaustive enumeration up to this many masks in the full space;
    /// beyond it, `seed` becomes mandatory and `limit` masks are sampled.
    pub limit: u64,
    pub seed: Option<u64>,
    pub workers: usize,
    pub timings: bool,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            kind: MaskKind::All,
            limit: 1 << 15,
            seed: None,
            workers: 1,
            timings: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CensusOutput {
    pub header: CensusHeader,
    pub records: Vec<CensusRecord>,
    pub summary: CensusSummary,
}

fn set_kind(set: &ConnectionSet) -> &'static str {
    if set.is_undirected() {
        "undirected"
    } else if set.is_directed() {
        "directed"
    } else {
        "mixed"
    }
}

fn kind_matches(set: &ConnectionSet, kind: MaskKind) -> bool {
    match kind {
        MaskKind::All => true,
        MaskKind::Undirected => set.is_undirected(),
        // The empty set counts as undirected first, but it is vacuously
        // antisymmetric, so the directed enumeration keeps it.
        MaskKind::Directed => set.s1.is_empty() && set.s2.is_empty(),
    }
}

/// All masks of the requested kind in increasing order, or a seeded uniform
/// sample of `limit` draws when the full space exceeds `limit`.
pub fn enumerate_masks(
    g: &ExtGroup,
    kind: MaskKind,
    limit: u64,
    seed: Option<u64>,
) -> Result<Vec<u64>, CensusError> {
    let bits = g.mask_bits();
    let total: u64 = 1 << bits;
    let matches = |mask: u64| -> bool {
        let set = split_connection_set(g, mask).expect("mask below 2^bits");
        kind_matches(&set, kind)
    };
    if total <= limit {
        return Ok((0..total).filter(|&m| matches(m)).collect());
    }
    let seed = seed.ok_or(CensusError::SeedRequired { bits, limit })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let drawn: BTreeSet<u64> = (0..limit).map(|_| rng.gen_range(0..total)).collect();
    Ok(drawn.into_iter().filter(|&m| matches(m)).collect())
}

/// Decide one mask by all three routes.
pub fn evaluate_mask(
    g: &ExtGroup,
    reps: &[Rep],
    mask: u64,
    timings: bool,
) -> Result<CensusRecord, CensusError> {
    let started = Instant::now();
    let set = split_connection_set(g, mask)?;
    let criteria = check_main(g, &set, reps);
    let exact = exact_spectrum(g, &set, reps);
    let numeric = numeric_spectrum(&adjacency(g, &set))
        .map_err(|source| CensusError::Numeric { mask, source })?;
    let record = CensusRecord {
        group_spec: g.spec().to_string(),
        mask,
        kind: set_kind(&set),
        verdict_criteria: criteria.overall,
        verdict_exact: exact.integral,
        verdict_numeric: is_integral_numeric(&numeric),
        spectrum: exact.eigenvalues.iter().map(|e| e.as_exact()).collect(),
        elapsed_us: if timings {
            started.elapsed().as_micros() as u64
        } else {
            0
        },
    };
    Ok(record)
}

/// Independent fold of records into a summary (re-run by tests to confirm
/// the counts a census reports).
pub fn fold_summary(group_spec: &str, records: &[CensusRecord]) -> CensusSummary {
    let mut totals = KindCounts::default();
    let mut integral = KindCounts::default();
    let mut examples = Vec::new();
    for r in records {
        totals.bump(r.kind);
        if r.verdict_exact {
            integral.bump(r.kind);
            if r.kind == "directed" && r.mask != 0 && examples.len() < 10 {
                examples.push(r.mask);
            }
        }
    }
    CensusSummary {
        group_spec: group_spec.to_string(),
        totals,
        integral,
        integral_directed_examples: examples,
    }
}

/// Evaluate every enumerated mask, in parallel, merging records back into
/// increasing mask order; any route disagreement fails the run with the
/// witness record.
pub fn run_census(g: &ExtGroup, opts: &CensusOptions) -> Result<CensusOutput, CensusError> {
    let masks = enumerate_masks(g, opts.kind, opts.limit, opts.seed)?;
    let reps = classify(g);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| CensusError::Pool(e.to_string()))?;
    let records: Vec<CensusRecord> = pool.install(|| {
        masks
            .par_iter()
            .map(|&mask| evaluate_mask(g, &reps, mask, opts.timings))
            .collect::<Result<Vec<_>, _>>()
    })?;
    if let Some(bad) = records.iter().find(|r| !r.verdicts_agree()) {
        return Err(CensusError::Disagreement(Box::new(bad.clone())));
    }
    let summary = fold_summary(g.spec(), &records);
    let total: u64 = 1 << g.mask_bits();
    Ok(CensusOutput {
        header: CensusHeader {
            schema: 1,
            group: g.spec().to_string(),
            kind: opts.kind,
            seed: if total <= opts.limit { None } else { opts.seed },
        },
        records,
        summary,
    })
}

/// Header line, then one record per line.
pub fn write_jsonl<W: Write>(out: &mut W, census: &CensusOutput) -> io::Result<()> {
    serde_json::to_writer(&mut *out, &census.header)?;
    out.write_all(b"\n")?;
    for record in &census.records {
        serde_json::to_writer(&mut *out, record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::parse_group_spec;

    fn grp(spec: &str) -> ExtGroup {
        parse_group_spec(spec).unwrap()
    }

    fn run(spec: &str, kind: MaskKind) -> CensusOutput {
        let g = grp(spec);
        let opts = CensusOptions {
            kind,
            ..CensusOptions::default()
        };
        run_census(&g, &opts).unwrap()
    }

    #[test]
    fn mask_enumeration_counts() {
        let g = grp("dihedral(8)");
        let all = enumerate_masks(&g, MaskKind::All, 1 << 15, None).unwrap();
        assert_eq!(all.len(), 128);
        assert!(all.windows(2).all(|w| w[0] < w[1]));

        // Everything in xA is an involution over a dihedral group, and a²
        // is self-inverse, so antisymmetric sets live inside {a, a³}.
        let directed = enumerate_masks(&g, MaskKind::Directed, 1 << 15, None).unwrap();
        assert_eq!(directed.len(), 3);
        assert!(directed.contains(&0));

        // Independent re-derivation of the undirected count.
        let undirected = enumerate_masks(&g, MaskKind::Undirected, 1 << 15, None).unwrap();
        let recount = (0..128u64)
            .filter(|&m| split_connection_set(&g, m).unwrap().is_undirected())
            .count();
        assert_eq!(undirected.len(), recount);
    }

    #[test]
    fn dicyclic_directed_space_has_27_masks() {
        let g = grp("dicyclic(4; 2)");
        let directed = enumerate_masks(&g, MaskKind::Directed, 1 << 15, None).unwrap();
        assert_eq!(directed.len(), 27);
        // T₁ ranges over {∅, {a}, {a³}} and T₂ over the nine subsets of A
        // whose translate condition admits them; cross-check the product
        // structure by counting distinct T₁ and T₂ parts.
        let mut t1_parts = BTreeSet::new();
        let mut t2_parts = BTreeSet::new();
        for &m in &directed {
            let set = split_connection_set(&g, m).unwrap();
            t1_parts.insert(set.t1.clone());
            t2_parts.insert(set.t2.clone());
        }
        assert_eq!(t1_parts.len(), 3);
        assert_eq!(t2_parts.len(), 9);
    }

    #[test]
    fn dicyclic_directed_census_finds_exactly_seven_integral_masks() {
        let out = run("dicyclic(4; 2)", MaskKind::Directed);
        assert_eq!(out.records.len(), 27);
        let g = grp("dicyclic(4; 2)");
        let a = g.abelian();
        let single_gen = |t1: &[crate::abelian::AbElement]| {
            t1.len() == 1 && (t1[0] == a.element(&[1]) || t1[0] == a.element(&[3]))
        };
        let mut integral = 0;
        for r in &out.records {
            assert!(r.verdicts_agree());
            let set = split_connection_set(&g, r.mask).unwrap();
            if r.verdict_exact {
                integral += 1;
                // Exactly: T₁ a single generator with T₂ = ∅, or T₁ = ∅
                // with |T₂| ≤ 1.
                assert!(
                    (single_gen(&set.t1) && set.t2.is_empty())
                        || (set.t1.is_empty() && set.t2.len() <= 1),
                    "mask {}",
                    r.mask
                );
            }
        }
        assert_eq!(integral, 7);
        // The empty mask is one of the seven but the summary buckets it as
        // undirected (kind precedence), leaving six in the directed bucket.
        assert_eq!(out.summary.integral.directed, 6);
        assert_eq!(out.summary.integral.undirected, 1);
        assert_eq!(out.summary.totals.directed, 26);
        assert_eq!(out.summary.totals.undirected, 1);
    }

    #[test]
    fn dihedral_directed_census_counts() {
        // Every directed mask over dihedral(8) is integral; over dihedral(6)
        // only the empty one is.
        let out = run("dihedral(8)", MaskKind::Directed);
        assert_eq!(out.records.len(), 3);
        assert!(out.records.iter().all(|r| r.verdict_exact));
        assert_eq!(out.summary.integral_directed_examples.len(), 2);

        let out = run("dihedral(6)", MaskKind::Directed);
        assert_eq!(out.records.len(), 3);
        let integral: Vec<u64> = out
            .records
            .iter()
            .filter(|r| r.verdict_exact)
            .map(|r| r.mask)
            .collect();
        assert_eq!(integral, vec![0]);
        assert!(out.summary.integral_directed_examples.is_empty());
    }

    #[test]
    fn jsonl_output_is_deterministic_and_ordered() {
        let first = run("dicyclic(4; 2)", MaskKind::All);
        let second = run("dicyclic(4; 2)", MaskKind::All);
        let mut buf_a = Vec::new();
        let mut buf_b = Vec::new();
        write_jsonl(&mut buf_a, &first).unwrap();
        write_jsonl(&mut buf_b, &second).unwrap();
        assert_eq!(buf_a, buf_b);
        assert_eq!(first.records.len(), 128);
        assert!(first
            .records
            .windows(2)
            .all(|w| w[0].mask < w[1].mask));

        let text = String::from_utf8(buf_a).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(
            header,
            r#"{"schema":1,"group":"dicyclic(4; 2)","kind":"all","seed":null}"#
        );
        // Field order of records is part of the persisted schema.
        let first_record = text.lines().nth(1).unwrap();
        assert!(first_record.starts_with(r#"{"group_spec":"dicyclic(4; 2)","mask":0,"kind":"undirected","#));
        assert!(first_record.contains(r#""spectrum":[0,0,0,0,0,0,0,0]"#));
        assert!(first_record.ends_with(r#""elapsed_us":0}"#));
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let g = grp("dihedral(10)");
        let base = CensusOptions::default();
        let multi = CensusOptions {
            workers: 4,
            ..CensusOptions::default()
        };
        let a = run_census(&g, &base).unwrap();
        let b = run_census(&g, &multi).unwrap();
        let mut buf_a = Vec::new();
        let mut buf_b = Vec::new();
        write_jsonl(&mut buf_a, &a).unwrap();
        write_jsonl(&mut buf_b, &b).unwrap();
        assert_eq!(buf_a, buf_b);
    }

    #[test]
    fn sampling_requires_and_respects_a_seed() {
        let g = grp("semidihedral(8)"); // 2¹⁵ masks
        match enumerate_masks(&g, MaskKind::All, 1000, None) {
            Err(CensusError::SeedRequired { bits: 15, limit: 1000 }) => {}
            other => panic!("expected SeedRequired, got {other:?}"),
        }
        let once = enumerate_masks(&g, MaskKind::All, 1000, Some(9)).unwrap();
        let again = enumerate_masks(&g, MaskKind::All, 1000, Some(9)).unwrap();
        assert_eq!(once, again);
        assert!(once.len() <= 1000 && once.len() > 900);
        assert!(once.windows(2).all(|w| w[0] < w[1]));
        let other_seed = enumerate_masks(&g, MaskKind::All, 1000, Some(10)).unwrap();
        assert_ne!(once, other_seed);

        // A sampled census still cross-checks every record.
        let opts = CensusOptions {
            limit: 64,
            seed: Some(3),
            ..CensusOptions::default()
        };
        let out = run_census(&g, &opts).unwrap();
        assert!(out.records.iter().all(|r| r.verdicts_agree()));
        assert_eq!(out.header.seed, Some(3));
    }

    #[test]
    fn summary_is_rederivable_from_records() {
        let out = run("dihedral(12)", MaskKind::All);
        let refold = fold_summary("dihedral(12)", &out.records);
        assert_eq!(out.summary, refold);
        assert_eq!(out.summary.totals.total(), 2048);
        assert_eq!(
            out.summary.totals.undirected + out.summary.totals.directed + out.summary.totals.mixed,
            2048
        );
        // Spot-check one classification: the empty set is undirected.
        assert_eq!(out.records[0].kind, "undirected");
    }

    #[test]
    fn timings_flag_fills_elapsed_microseconds() {
        let g = grp("dihedral(6)");
        let reps = classify(&g);
        let plain = evaluate_mask(&g, &reps, 5, false).unwrap();
        assert_eq!(plain.elapsed_us, 0);
        // With timings on, at least one nontrivial mask takes measurable time.
        let timed: Vec<u64> = (0..32)
            .map(|m| evaluate_mask(&g, &reps, m, true).unwrap().elapsed_us)
            .collect();
        assert!(timed.iter().any(|&t| t > 0));
    }

    #[test]
    fn catalog_specs_all_parse_to_their_canonical_names() {
        for spec in GROUP_CATALOG {
            let g = grp(spec);
            assert_eq!(g.spec(), spec);
            assert!(g.order() <= 16);
        }
    }
}
