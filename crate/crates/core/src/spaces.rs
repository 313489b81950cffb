//! Membership certification for the classical double-sequence spaces, their
//! Δ-domains, and the series spaces BS / CS_v, together with the strict
//! inclusion witness atlas.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::config::RunConfig;
use crate::convergence::{bounded, certify_rule, lq_sum, p_limit, ConvergenceReport, Rule, Verdict};
use crate::error::{Error, Result};
use crate::seq::{catalog, DoubleSequence};

/// Identifier of a sequence space.
///
/// The `*D` ids are Δ-domains ("x with Δx in the base space"); `BS` and the
/// `CS*` ids are defined through the rectangular partial-sum array: `BS`
/// means bounded partial sums, `CS_v` means partial sums converging under
/// rule v. `C_0bp` / `C_r0`-style zero-limit spaces are covered by the base
/// id plus the limit recorded in the verdict's report rather than separate
/// ids.
#[derive(Debug, Clone, Copy)]
pub enum SpaceId {
    Mu,
    Cp,
    C0p,
    Cbp,
    Cr,
    Lq(f64),
    MuD,
    CpD,
    C0pD,
    CbpD,
    CrD,
    LqD(f64),
    BS,
    CSp,
    CSbp,
    CSr,
}

impl SpaceId {
    fn key(self) -> (u8, u64) {
        use SpaceId::*;
        match self {
            Mu => (0, 0),
            Cp => (1, 0),
            C0p => (2, 0),
            Cbp => (3, 0),
            Cr => (4, 0),
            Lq(q) => (5, q.to_bits()),
            MuD => (6, 0),
            CpD => (7, 0),
            C0pD => (8, 0),
            CbpD => (9, 0),
            CrD => (10, 0),
            LqD(q) => (11, q.to_bits()),
            BS => (12, 0),
            CSp => (13, 0),
            CSbp => (14, 0),
            CSr => (15, 0),
        }
    }

    /// For Δ-domain ids, the base space the difference must land in.
    fn delta_base(self) -> Option<SpaceId> {
        use SpaceId::*;
        match self {
            MuD => Some(Mu),
            CpD => Some(Cp),
            C0pD => Some(C0p),
            CbpD => Some(Cbp),
            CrD => Some(Cr),
            LqD(q) => Some(Lq(q)),
            _ => None,
        }
    }
}

impl PartialEq for SpaceId {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}
impl Eq for SpaceId {}
impl PartialOrd for SpaceId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for SpaceId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}
impl std::hash::Hash for SpaceId {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SpaceId::*;
        match self {
            Mu => write!(f, "Mu"),
            Cp => write!(f, "Cp"),
            C0p => write!(f, "C0p"),
            Cbp => write!(f, "Cbp"),
            Cr => write!(f, "Cr"),
            Lq(q) => write!(f, "Lq({q})"),
            MuD => write!(f, "Mu_d"),
            CpD => write!(f, "Cp_d"),
            C0pD => write!(f, "C0p_d"),
            CbpD => write!(f, "Cbp_d"),
            CrD => write!(f, "Cr_d"),
            LqD(q) => write!(f, "Lq_d({q})"),
            BS => write!(f, "BS"),
            CSp => write!(f, "CSp"),
            CSbp => write!(f, "CSbp"),
            CSr => write!(f, "CSr"),
        }
    }
}

impl Serialize for SpaceId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for SpaceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<SpaceId> {
        use SpaceId::*;
        let exponent = |inner: &str| -> Result<f64> {
            let q: f64 = inner
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("bad L_q exponent `{inner}`")))?;
            if q >= 1.0 && q.is_finite() {
                Ok(q)
            } else {
                Err(Error::InvalidExponent(q))
            }
        };
        match s {
            "Mu" => Ok(Mu),
            "Cp" => Ok(Cp),
            "C0p" => Ok(C0p),
            "Cbp" => Ok(Cbp),
            "Cr" => Ok(Cr),
            "Mu_d" => Ok(MuD),
            "Cp_d" => Ok(CpD),
            "C0p_d" => Ok(C0pD),
            "Cbp_d" => Ok(CbpD),
            "Cr_d" => Ok(CrD),
            "BS" => Ok(BS),
            "CSp" => Ok(CSp),
            "CSbp" => Ok(CSbp),
            "CSr" => Ok(CSr),
            _ => {
                if let Some(inner) = s.strip_prefix("Lq_d(").and_then(|r| r.strip_suffix(')')) {
                    Ok(LqD(exponent(inner)?))
                } else if let Some(inner) = s.strip_prefix("Lq(").and_then(|r| r.strip_suffix(')')) {
                    Ok(Lq(exponent(inner)?))
                } else {
                    Err(Error::InvalidSpec(format!("unknown space id `{s}`")))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Member,
    NonMember,
    Inconclusive,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Member => "member",
            Outcome::NonMember => "non_member",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

impl From<Verdict> for Outcome {
    fn from(v: Verdict) -> Outcome {
        match v {
            Verdict::Converges => Outcome::Member,
            Verdict::Unbounded => Outcome::NonMember,
            Verdict::Inconclusive => Outcome::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NamedReport {
    pub name: String,
    pub report: ConvergenceReport,
}

/// Outcome of a membership check. `outcome` is a pure function of the
/// underlying certifier reports; `inconclusive` propagates and is never
/// replaced by a guess.
#[derive(Debug, Clone, Serialize)]
pub struct MembershipVerdict {
    pub space: String,
    pub outcome: Outcome,
    pub reports: Vec<NamedReport>,
}

fn one(space: SpaceId, name: &str, report: ConvergenceReport) -> MembershipVerdict {
    MembershipVerdict {
        space: space.to_string(),
        outcome: report.verdict.into(),
        reports: vec![NamedReport { name: name.into(), report }],
    }
}

/// Certified membership of `x` in space `s`.
pub fn member(x: &DoubleSequence, s: SpaceId, cfg: &RunConfig) -> Result<MembershipVerdict> {
    use SpaceId::*;
    if let Some(base) = s.delta_base() {
        let mut v = member(&x.delta(), base, cfg)?;
        v.space = s.to_string();
        for r in &mut v.reports {
            r.name = format!("{} of delta(x)", r.name);
        }
        return Ok(v);
    }
    Ok(match s {
        Mu => one(s, "bounded", bounded(x, cfg)?),
        Cp => one(s, "p", p_limit(x, cfg)?),
        C0p => {
            let report = p_limit(x, cfg)?;
            // Converging to a nonzero limit is definitive non-membership.
            let outcome = match report.verdict {
                Verdict::Converges if report.limit.unwrap_or(f64::NAN).abs() <= cfg.tol => {
                    Outcome::Member
                }
                Verdict::Converges | Verdict::Unbounded => Outcome::NonMember,
                Verdict::Inconclusive => Outcome::Inconclusive,
            };
            MembershipVerdict {
                space: s.to_string(),
                outcome,
                reports: vec![NamedReport { name: "p".into(), report }],
            }
        }
        Cbp => one(s, "bp", certify_rule(x, Rule::Bp, cfg)?),
        Cr => one(s, "r", certify_rule(x, Rule::R, cfg)?),
        Lq(q) => one(s, "lq_sum", lq_sum(x, q, cfg)?),
        BS => one(s, "bounded of inv_delta(x)", bounded(&x.prefix_sum(), cfg)?),
        CSp => one(s, "p of inv_delta(x)", certify_rule(&x.prefix_sum(), Rule::P, cfg)?),
        CSbp => one(s, "bp of inv_delta(x)", certify_rule(&x.prefix_sum(), Rule::Bp, cfg)?),
        CSr => one(s, "r of inv_delta(x)", certify_rule(&x.prefix_sum(), Rule::R, cfg)?),
        MuD | CpD | C0pD | CbpD | CrD | LqD(_) => unreachable!("delta domains handled above"),
    })
}

// ---------------------------------------------------------------------------
// Catalog with ground-truth annotations.
// ---------------------------------------------------------------------------

pub struct CatalogEntry {
    pub label: String,
    pub seq: DoubleSequence,
    /// Expected outcomes at the default schedule. Spaces left out are not
    /// certifiable either way at that schedule.
    pub truth: Vec<(SpaceId, Outcome)>,
}

fn entry(label: &str, name: &str, params: serde_json::Value, truth: Vec<(SpaceId, Outcome)>) -> CatalogEntry {
    CatalogEntry {
        label: label.to_string(),
        seq: catalog(name, &params).expect("catalog entry"),
        truth,
    }
}

/// The named sequences exercised by every sweep in the test suite, each
/// annotated with its certifiable memberships.
pub fn standard_catalog() -> Vec<CatalogEntry> {
    use Outcome::{Inconclusive as I, Member as M, NonMember as N};
    use SpaceId::*;
    let null = serde_json::Value::Null;
    vec![
        entry(
            "boos",
            "boos",
            null.clone(),
            vec![
                (Mu, N),
                (Cp, M),
                (C0p, M),
                (Cbp, N),
                (Cr, N),
                (Lq(2.0), N),
                (MuD, M),
                (CpD, M),
                (C0pD, M),
                (CbpD, M),
                (CrD, M),
                (LqD(2.0), N),
                (BS, N),
                (CSp, N),
                (CSbp, N),
                (CSr, N),
            ],
        ),
        entry(
            "product",
            "product",
            null.clone(),
            vec![
                (Mu, N),
                (Cp, N),
                (C0p, N),
                (Cbp, N),
                (Cr, N),
                (Lq(2.0), N),
                (MuD, M),
                (CpD, M),
                (C0pD, N),
                (CbpD, M),
                (CrD, M),
                (LqD(2.0), N),
                (BS, N),
                (CSp, N),
            ],
        ),
        entry(
            "product_shift",
            "product_shift",
            null.clone(),
            vec![
                (Mu, N),
                (Cp, N),
                (C0p, N),
                (Cbp, N),
                (Cr, N),
                (MuD, M),
                (CpD, M),
                (C0pD, N),
                (CbpD, M),
                (CrD, M),
                (LqD(2.0), N),
                (BS, N),
                (CSp, N),
            ],
        ),
        entry(
            "column0_indicator",
            "column0_indicator",
            null.clone(),
            vec![
                (Mu, M),
                (Cp, M),
                (C0p, M),
                (Cbp, M),
                (Cr, M),
                (Lq(1.0), N),
                (Lq(2.0), N),
                (Lq(3.5), N),
                (MuD, M),
                (CpD, M),
                (C0pD, M),
                (CbpD, M),
                (CrD, M),
                (LqD(1.0), M),
                (LqD(2.0), M),
                (LqD(3.5), M),
                (BS, N),
                (CSp, N),
            ],
        ),
        entry(
            "constant(1)",
            "constant",
            serde_json::json!({"c": 1}),
            vec![
                (Mu, M),
                (Cp, M),
                (C0p, N),
                (Cbp, M),
                (Cr, M),
                (Lq(2.0), N),
                (MuD, M),
                (CpD, M),
                (C0pD, M),
                (CbpD, M),
                (CrD, M),
                (LqD(2.0), M),
                (BS, N),
                (CSp, N),
                (CSbp, N),
                (CSr, N),
            ],
        ),
        entry(
            "constant(0)",
            "constant",
            serde_json::json!({"c": 0}),
            vec![
                (Mu, M),
                (Cp, M),
                (C0p, M),
                (Cbp, M),
                (Cr, M),
                (Lq(1.0), M),
                (Lq(2.0), M),
                (MuD, M),
                (CpD, M),
                (C0pD, M),
                (CbpD, M),
                (CrD, M),
                (LqD(2.0), M),
                (BS, M),
                (CSp, M),
                (CSbp, M),
                (CSr, M),
            ],
        ),
        entry(
            "geometric(0.5)",
            "geometric",
            serde_json::json!({"rho": 0.5}),
            vec![
                (Mu, M),
                (Cp, M),
                (C0p, M),
                (Cbp, M),
                (Cr, M),
                (Lq(1.0), M),
                (Lq(2.0), M),
                (MuD, M),
                (CpD, M),
                (C0pD, M),
                (CbpD, M),
                (CrD, M),
                (LqD(1.0), M),
                (BS, M),
                (CSp, M),
                (CSbp, M),
                (CSr, M),
            ],
        ),
        entry(
            "unit(0,0)",
            "unit",
            serde_json::json!({"i0": 0, "j0": 0}),
            vec![
                (Mu, M),
                (Cp, M),
                (C0p, M),
                (Cbp, M),
                (Cr, M),
                (Lq(1.0), M),
                (Lq(2.0), M),
                (MuD, M),
                (CpD, M),
                (C0pD, M),
                (CbpD, M),
                (CrD, M),
                (LqD(1.0), M),
                (BS, M),
                (CSp, M),
                (CSbp, M),
                (CSr, M),
            ],
        ),
        entry(
            "unit(2,3)",
            "unit",
            serde_json::json!({"i0": 2, "j0": 3}),
            vec![
                (Mu, M),
                (Cp, M),
                (C0p, M),
                (Cbp, M),
                (Cr, M),
                (Lq(2.0), M),
                (MuD, M),
                (CpD, M),
                (C0pD, M),
                (CbpD, M),
                (CrD, M),
                (LqD(2.0), M),
                (BS, M),
                (CSp, M),
                (CSbp, M),
                (CSr, M),
            ],
        ),
        entry(
            "alternating",
            "alternating",
            null.clone(),
            vec![
                (Mu, M),
                (Cp, I),
                (C0p, I),
                (Cbp, I),
                (Cr, I),
                (Lq(1.0), N),
                (Lq(2.0), N),
                (MuD, M),
                (CpD, I),
                (LqD(1.0), N),
                (BS, M),
                (CSp, I),
                (CSbp, I),
                (CSr, I),
            ],
        ),
        entry(
            "inv_power(1,1)",
            "inv_power",
            serde_json::json!({"p": 1, "q": 1}),
            vec![
                (Mu, M),
                (Cp, I),
                (Lq(1.0), N),
                (Lq(2.0), M),
                (MuD, M),
                (CpD, M),
                (C0pD, M),
                (CbpD, M),
                // Fringe rows of delta(x) decay like 1/n^2, too slowly for
                // the 1-D certifier at the default schedule.
                (CrD, I),
                (LqD(1.0), M),
                (BS, I),
                (CSp, I),
            ],
        ),
        entry(
            "inv_power(2,2)",
            "inv_power",
            serde_json::json!({"p": 2, "q": 2}),
            vec![
                (Mu, M),
                (Cp, M),
                (C0p, M),
                (Cbp, M),
                (Cr, I),
                (Lq(1.0), M),
                (Lq(2.0), M),
                (MuD, M),
                (CpD, M),
                (C0pD, M),
                (CbpD, M),
                (CrD, I),
                (LqD(1.0), M),
                (BS, I),
                (CSp, I),
            ],
        ),
        entry(
            "row_index",
            "row_index",
            null.clone(),
            vec![
                (Mu, N),
                (Cp, N),
                (Cbp, N),
                (Cr, N),
                (Lq(2.0), N),
                (MuD, M),
                (CpD, M),
                (C0pD, M),
                (CbpD, M),
                (CrD, M),
                (BS, N),
                (CSp, N),
            ],
        ),
        entry(
            "col_index",
            "col_index",
            null,
            vec![
                (Mu, N),
                (Cp, N),
                (Cbp, N),
                (Cr, N),
                (Lq(2.0), N),
                (MuD, M),
                (CpD, M),
                (C0pD, M),
                (CbpD, M),
                (CrD, M),
                (BS, N),
                (CSp, N),
            ],
        ),
    ]
}

/// Membership implications that no catalog sequence may definitively
/// violate: lhs `member` with rhs `non_member` is a violation; `inconclusive`
/// on either side is not.
pub fn inclusion_implications() -> Vec<(SpaceId, SpaceId)> {
    use SpaceId::*;
    vec![
        (Mu, MuD),
        (Cp, CpD),
        (C0p, C0pD),
        (Cbp, CbpD),
        (Cr, CrD),
        (Lq(1.0), LqD(1.0)),
        (Lq(2.0), LqD(2.0)),
        (Lq(3.5), LqD(3.5)),
        (Lq(1.0), BS),
        (BS, Mu),
        (CSp, Cp),
        (Cr, Cbp),
        (Cbp, Cp),
        (Cbp, Mu),
    ]
}

// ---------------------------------------------------------------------------
// Strict-inclusion witness atlas.
// ---------------------------------------------------------------------------

pub struct Witness {
    pub label: String,
    pub seq: DoubleSequence,
    pub expected: Vec<(SpaceId, Outcome)>,
}

pub fn inclusion_ids() -> Vec<&'static str> {
    vec![
        "Mu_subset_MuDelta_strict",
        "Cp_subset_CpDelta_strict",
        "C0p_subset_C0pDelta_strict",
        "Cbp_subset_CbpDelta_strict",
        "Cr_subset_CrDelta_strict",
        "Lq_subset_LqDelta_strict",
        "Lu_subset_BS_strict",
        "BS_subset_Mu_strict",
        "CSp_subset_Cp_strict",
        "Cp_not_subset_Mu",
    ]
}

/// Witness rows for a registered inclusion: each row is a sequence plus the
/// expected verdicts that together certify both the inclusion side and the
/// strictness side.
pub fn witness(inclusion_id: &str) -> Result<Vec<Witness>> {
    use Outcome::{Member as M, NonMember as N};
    use SpaceId::*;
    let null = serde_json::Value::Null;
    let mk = |label: &str, name: &str, params: &serde_json::Value, expected: Vec<(SpaceId, Outcome)>| Witness {
        label: label.to_string(),
        seq: catalog(name, params).expect("catalog entry"),
        expected,
    };
    match inclusion_id {
        "Mu_subset_MuDelta_strict" => Ok(vec![mk(
            "product",
            "product",
            &null,
            vec![(Mu, N), (MuD, M)],
        )]),
        "Cp_subset_CpDelta_strict" => Ok(vec![mk(
            "product_shift",
            "product_shift",
            &null,
            vec![(Cp, N), (CpD, M)],
        )]),
        "C0p_subset_C0pDelta_strict" => Ok(vec![mk(
            "constant(1)",
            "constant",
            &serde_json::json!({"c": 1}),
            vec![(C0p, N), (C0pD, M)],
        )]),
        "Cbp_subset_CbpDelta_strict" => Ok(vec![mk(
            "boos",
            "boos",
            &null,
            vec![(Cbp, N), (CbpD, M)],
        )]),
        "Cr_subset_CrDelta_strict" => Ok(vec![mk(
            "boos",
            "boos",
            &null,
            vec![(Cr, N), (CrD, M)],
        )]),
        "Lq_subset_LqDelta_strict" => Ok(vec![mk(
            "column0_indicator",
            "column0_indicator",
            &null,
            vec![
                (Lq(1.0), N),
                (LqD(1.0), M),
                (Lq(2.0), N),
                (LqD(2.0), M),
                (Lq(3.5), N),
                (LqD(3.5), M),
            ],
        )]),
        "Lu_subset_BS_strict" => Ok(vec![
            mk(
                "geometric(0.5)",
                "geometric",
                &serde_json::json!({"rho": 0.5}),
                vec![(Lq(1.0), M), (BS, M)],
            ),
            mk("alternating", "alternating", &null, vec![(Lq(1.0), N), (BS, M)]),
        ]),
        "BS_subset_Mu_strict" => Ok(vec![
            mk(
                "unit(0,0)",
                "unit",
                &serde_json::json!({"i0": 0, "j0": 0}),
                vec![(BS, M), (Mu, M)],
            ),
            mk(
                "constant(1)",
                "constant",
                &serde_json::json!({"c": 1}),
                vec![(BS, N), (Mu, M)],
            ),
        ]),
        "CSp_subset_Cp_strict" => Ok(vec![
            mk(
                "unit(0,0)",
                "unit",
                &serde_json::json!({"i0": 0, "j0": 0}),
                vec![(CSp, M), (Cp, M)],
            ),
            mk(
                "constant(1)",
                "constant",
                &serde_json::json!({"c": 1}),
                vec![(CSp, N), (Cp, M)],
            ),
        ]),
        "Cp_not_subset_Mu" => Ok(vec![mk("boos", "boos", &null, vec![(Cp, M), (Mu, N)])]),
        other => Err(Error::UnknownInclusion(other.to_string())),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AtlasRow {
    pub inclusion: String,
    pub witness: String,
    pub space: String,
    pub expected: Outcome,
    pub got: Outcome,
    pub pass: bool,
    /// Certified limit, when the underlying report produced one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AtlasReport {
    pub rows: Vec<AtlasRow>,
    pub pass: bool,
}

/// Runs every registered inclusion witness and compares against the expected
/// verdict rows.
pub fn run_atlas(cfg: &RunConfig) -> Result<AtlasReport> {
    let mut rows = Vec::new();
    for id in inclusion_ids() {
        for w in witness(id)? {
            for (space, expected) in &w.expected {
                let got = member(&w.seq, *space, cfg)?;
                rows.push(AtlasRow {
                    inclusion: id.to_string(),
                    witness: w.label.clone(),
                    space: space.to_string(),
                    expected: *expected,
                    got: got.outcome,
                    pass: got.outcome == *expected,
                    limit: got.reports.first().and_then(|r| r.report.limit),
                });
            }
        }
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(AtlasReport { rows, pass })
}
