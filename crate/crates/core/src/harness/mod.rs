//! Exact verification of the calculus rules.
//!
//! A check takes a [`CheckDoc`] (instances, points and named parameters),
//! decides the rule's qualification condition, computes both sides of the
//! identity exactly and compares them. Set identities are compared with
//! LP containment; identities about relative interiors are compared as
//! membership claims at sampled points. Every disagreement is reported
//! with a concrete rational point lying on exactly one side.
//!
//! [`run_suite`] drives the checks over seeded random instances.

mod checks;
mod gen;
mod sample;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cone::{cone_difference_witness, cone_hrep, proper_separation, ConeGen};
use crate::doc::{self, HPolyBody, InstanceDoc};
use crate::error::{Error, Result};
use crate::function::MaxAffineFn;
use crate::linalg::{unit, RatVec};
use crate::mapping::SVMap;
use crate::polyhedron::{symmetric_difference_witness, HPoly};
use crate::rational::Rat;

pub use gen::{gen_check, gen_instance, GenKind, Regime};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TheoremId {
    RiProps,
    Separation,
    NcIntersection,
    Rockafellar,
    RiRange,
    GemRi,
    EpiRi,
    EpiCoderiv,
    GemCoderiv,
    OvfSubdiff,
    CompositeSubdiff,
    SumRule,
    SubdiffSum,
    ChainRule,
    PreimageNc,
    SublevelNc,
}

impl TheoremId {
    pub const ALL: [TheoremId; 16] = [
        TheoremId::RiProps,
        TheoremId::Separation,
        TheoremId::NcIntersection,
        TheoremId::Rockafellar,
        TheoremId::RiRange,
        TheoremId::GemRi,
        TheoremId::EpiRi,
        TheoremId::EpiCoderiv,
        TheoremId::GemCoderiv,
        TheoremId::OvfSubdiff,
        TheoremId::CompositeSubdiff,
        TheoremId::SumRule,
        TheoremId::SubdiffSum,
        TheoremId::ChainRule,
        TheoremId::PreimageNc,
        TheoremId::SublevelNc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::RiProps => "RI_PROPS",
            TheoremId::Separation => "SEPARATION",
            TheoremId::NcIntersection => "NC_INTERSECTION",
            TheoremId::Rockafellar => "ROCKAFELLAR",
            TheoremId::RiRange => "RI_RANGE",
            TheoremId::GemRi => "GEM_RI",
            TheoremId::EpiRi => "EPI_RI",
            TheoremId::EpiCoderiv => "EPI_CODERIV",
            TheoremId::GemCoderiv => "GEM_CODERIV",
            TheoremId::OvfSubdiff => "OVF_SUBDIFF",
            TheoremId::CompositeSubdiff => "COMPOSITE_SUBDIFF",
            TheoremId::SumRule => "SUM_RULE",
            TheoremId::SubdiffSum => "SUBDIFF_SUM",
            TheoremId::ChainRule => "CHAIN_RULE",
            TheoremId::PreimageNc => "PREIMAGE_NC",
            TheoremId::SublevelNc => "SUBLEVEL_NC",
        }
    }

    /// Whether the rule is stated under a relative-interior hypothesis.
    pub fn has_qualification(self) -> bool {
        !matches!(
            self,
            TheoremId::RiProps
                | TheoremId::Separation
                | TheoremId::Rockafellar
                | TheoremId::RiRange
                | TheoremId::EpiRi
                | TheoremId::EpiCoderiv
        )
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = String;

    fn from_str(s: &str) -> Result<TheoremId, String> {
        let want = s.trim().replace('-', "_").to_ascii_uppercase();
        TheoremId::ALL
            .into_iter()
            .find(|id| id.name() == want)
            .ok_or_else(|| format!("unknown theorem id `{s}`"))
    }
}

/// A named parameter of a check document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Bool(bool),
    Int(u64),
    Scalar(Rat),
    Vector(Vec<Rat>),
    Matrix(Vec<Vec<Rat>>),
}

#[derive(Clone, Debug)]
pub enum Instance {
    Poly(HPoly),
    Fn(MaxAffineFn),
    Map(SVMap),
}

/// Everything a check needs; fully determines its verdict.
#[derive(Clone, Debug)]
pub struct CheckDoc {
    pub theorem: TheoremId,
    pub instances: Vec<Instance>,
    pub points: Vec<RatVec>,
    pub params: BTreeMap<String, Param>,
}

impl CheckDoc {
    /// SHA-256 of the canonical serialization.
    pub fn digest(&self) -> String {
        let text = doc::serialize(&InstanceDoc::from(self));
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub(crate) fn poly(&self, i: usize) -> Result<&HPoly> {
        match self.instances.get(i) {
            Some(Instance::Poly(p)) => Ok(p),
            _ => Err(self.malformed(format!("instance {i} must be an hpoly"))),
        }
    }

    pub(crate) fn func(&self, i: usize) -> Result<&MaxAffineFn> {
        match self.instances.get(i) {
            Some(Instance::Fn(f)) => Ok(f),
            _ => Err(self.malformed(format!("instance {i} must be a maxaffine function"))),
        }
    }

    pub(crate) fn map(&self, i: usize) -> Result<&SVMap> {
        match self.instances.get(i) {
            Some(Instance::Map(m)) => Ok(m),
            _ => Err(self.malformed(format!("instance {i} must be an svmap"))),
        }
    }

    pub(crate) fn point(&self, i: usize, dim: usize) -> Result<&RatVec> {
        match self.points.get(i) {
            Some(p) if p.len() == dim => Ok(p),
            Some(p) => Err(Error::DimensionMismatch { expected: dim, found: p.len() }),
            None => Err(self.malformed(format!("point {i} is missing"))),
        }
    }

    pub(crate) fn flag(&self, key: &str) -> bool {
        matches!(self.params.get(key), Some(Param::Bool(true)))
    }

    pub(crate) fn int(&self, key: &str) -> Option<u64> {
        match self.params.get(key) {
            Some(Param::Int(v)) => Some(*v),
            _ => None,
        }
    }

    pub(crate) fn scalar(&self, key: &str) -> Result<&Rat> {
        match self.params.get(key) {
            Some(Param::Scalar(v)) => Ok(v),
            _ => Err(self.malformed(format!("param `{key}` must be a rational"))),
        }
    }

    /// A list of vectors of length `dim`. A one-row matrix may also be
    /// written as a plain vector.
    pub(crate) fn vectors(&self, key: &str, dim: usize) -> Result<Vec<RatVec>> {
        let rows = match self.params.get(key) {
            Some(Param::Matrix(m)) => m.clone(),
            Some(Param::Vector(v)) => vec![v.clone()],
            // `[]` deserializes as an empty vector
            _ => return Err(self.malformed(format!("param `{key}` must be a list of vectors"))),
        };
        for r in &rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: r.len() });
            }
        }
        Ok(rows)
    }

    fn malformed(&self, msg: String) -> Error {
        Error::MalformedInstance(format!("{}: {msg}", self.theorem))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Qualification {
    Satisfied,
    /// `witness` is a vector properly separating the sets whose relative
    /// interiors were required to meet.
    NotSatisfied { reason: String, witness: RatVec },
}

/// One side of a failed comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Described {
    Set { set: HPolyBody },
    Claim { claim: String, holds: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Equal,
    /// `point` lies on exactly one side; `in_lhs` says which.
    Mismatch { lhs: Described, rhs: Described, point: RatVec, in_lhs: bool },
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub theorem: TheoremId,
    pub trial: u64,
    pub seed: u64,
    pub instance_digest: String,
    pub qualification: Qualification,
    pub outcome: Outcome,
    /// Number of comparisons carried out.
    pub comparisons: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Verdict {
    /// Re-checks a mismatch falsifier by direct membership: the point must
    /// lie in exactly one side. Claims are taken at face value.
    pub fn falsifier_holds(&self) -> Result<bool> {
        let Outcome::Mismatch { lhs, rhs, point, in_lhs } = &self.outcome else {
            return Ok(true);
        };
        let side = |d: &Described| -> Result<bool> {
            match d {
                Described::Set { set } => set.to_poly()?.contains_point(point),
                Described::Claim { holds, .. } => Ok(*holds),
            }
        };
        let (l, r) = (side(lhs)?, side(rhs)?);
        Ok(l == *in_lhs && l != r)
    }
}

/// Collects the comparisons of one check, stopping at the first failure.
pub(crate) struct Recorder {
    fault: bool,
    count: usize,
    mismatch: Option<Outcome>,
    notes: Vec<String>,
}

impl Recorder {
    fn new(fault: bool) -> Recorder {
        Recorder { fault, count: 0, mismatch: None, notes: Vec::new() }
    }

    pub(crate) fn failed(&self) -> bool {
        self.mismatch.is_some()
    }

    pub(crate) fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Consumes the pending fault, if any.
    fn corrupt(&mut self) -> bool {
        self.count += 1;
        std::mem::take(&mut self.fault)
    }

    pub(crate) fn sets(&mut self, lhs: &HPoly, rhs: &HPoly) -> Result<()> {
        if self.failed() {
            return Ok(());
        }
        let rhs = if self.corrupt() {
            if lhs.is_empty() { HPoly::universe(rhs.dim()) } else { HPoly::empty(rhs.dim()) }
        } else {
            rhs.clone()
        };
        if let Some((point, in_lhs)) = symmetric_difference_witness(lhs, &rhs)? {
            self.mismatch = Some(Outcome::Mismatch {
                lhs: Described::Set { set: lhs.into() },
                rhs: Described::Set { set: (&rhs).into() },
                point,
                in_lhs,
            });
        }
        Ok(())
    }

    pub(crate) fn cones(&mut self, lhs: &ConeGen, rhs: &ConeGen) -> Result<()> {
        if self.failed() {
            return Ok(());
        }
        let n = lhs.dim();
        let rhs = if self.corrupt() {
            if lhs.generators().is_empty() && lhs.lineality().is_empty() {
                ConeGen::new(n, Vec::new(), (0..n).map(|i| unit(n, i)).collect())?
            } else {
                ConeGen::zero(n)
            }
        } else {
            rhs.clone()
        };
        if let Some((point, in_lhs)) = cone_difference_witness(lhs, &rhs)? {
            self.mismatch = Some(Outcome::Mismatch {
                lhs: Described::Set { set: cone_hrep(lhs).into() },
                rhs: Described::Set { set: cone_hrep(&rhs).into() },
                point,
                in_lhs,
            });
        }
        Ok(())
    }

    /// `lhs ⇔ rhs` at `point`.
    pub(crate) fn iff(&mut self, point: &[Rat], lhs: (&str, bool), rhs: (&str, bool)) {
        self.claim(point, lhs, rhs, false)
    }

    /// `lhs ⇒ rhs` at `point`.
    pub(crate) fn implies(&mut self, point: &[Rat], lhs: (&str, bool), rhs: (&str, bool)) {
        self.claim(point, lhs, rhs, true)
    }

    fn claim(&mut self, point: &[Rat], lhs: (&str, bool), rhs: (&str, bool), one_way: bool) {
        if self.failed() {
            return;
        }
        let r = rhs.1 ^ self.corrupt();
        let ok = if one_way { !lhs.1 || r } else { lhs.1 == r };
        if !ok {
            self.mismatch = Some(Outcome::Mismatch {
                lhs: Described::Claim { claim: lhs.0.to_string(), holds: lhs.1 },
                rhs: Described::Claim { claim: rhs.0.to_string(), holds: r },
                point: point.to_vec(),
                in_lhs: lhs.1,
            });
        }
    }
}

/// Witness that `ri(A₁) ∩ ⋯ ∩ ri(A_k) = ∅`: a vector properly separating
/// `A₁` from `A₂` (for `k = 2`) or the product `A₁ × ⋯ × A_k` from the
/// diagonal (for `k > 2`).
pub(crate) fn qualification_of(sets: &[&HPoly], reason: &str) -> Result<Qualification> {
    if crate::polyhedron::ri_intersect_witness_all(sets)?.is_some() {
        return Ok(Qualification::Satisfied);
    }
    let (a, b) = if sets.len() == 2 {
        (sets[0].clone(), sets[1].clone())
    } else {
        let n = sets[0].dim();
        let k = sets.len();
        let prod = sets[1..].iter().fold(sets[0].clone(), |acc, s| crate::polyhedron::product(&acc, s));
        let mut diag = HPoly::universe(n * k);
        for i in 1..k {
            for j in 0..n {
                let mut c = crate::linalg::zeros(n * k);
                c[j] = Rat::one();
                c[i * n + j] = -Rat::one();
                diag = diag.with_eq(crate::polyhedron::Row::new(c, Rat::zero()))?;
            }
        }
        (prod, diag)
    };
    let cert = proper_separation(&a, &b)?.expect("disjoint relative interiors separate properly");
    Ok(Qualification::NotSatisfied { reason: reason.to_string(), witness: cert.v })
}

/// Runs the check described by `doc`.
///
/// `NotInGraph`, `NotInDomain` and similar conditions on the supplied
/// points surface as errors, never as mismatches.
pub fn check_theorem(doc: &CheckDoc) -> Result<Verdict> {
    check_with_trial(doc, 0, 0)
}

fn check_with_trial(doc: &CheckDoc, trial: u64, seed: u64) -> Result<Verdict> {
    let mut rec = Recorder::new(doc.flag("inject_fault"));
    let qualification = checks::run(doc, &mut rec)?;
    let outcome = match (&qualification, rec.mismatch.take()) {
        (Qualification::NotSatisfied { .. }, _) => Outcome::Skipped,
        (_, Some(m)) => m,
        (_, None) => Outcome::Equal,
    };
    Ok(Verdict {
        theorem: doc.theorem,
        trial,
        seed,
        instance_digest: doc.digest(),
        qualification,
        outcome,
        comparisons: rec.count,
        notes: rec.notes,
    })
}

/// Per-trial instance size limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub n: usize,
    pub m: usize,
}

impl Caps {
    /// Hard ceiling on either dimension.
    pub const MAX: usize = 3;

    pub fn new(n: usize, m: usize) -> Result<Caps> {
        if n == 0 || m == 0 || n > Caps::MAX || m > Caps::MAX {
            return Err(Error::CapsExceeded(format!("dims {n},{m} outside 1..={}", Caps::MAX)));
        }
        Ok(Caps { n, m })
    }
}

impl Default for Caps {
    fn default() -> Caps {
        Caps { n: 3, m: 3 }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub trials: u64,
    pub seed: u64,
    pub caps: Caps,
    pub regime: Regime,
    pub inject_fault: bool,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig { trials: 10, seed: 0, caps: Caps::default(), regime: Regime::Qualified, inject_fault: false }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub equal: usize,
    pub mismatch: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub verdicts: Vec<Verdict>,
    pub summary: Summary,
}

impl SuiteReport {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.summary.mismatch > 0)
    }
}

/// Seed of trial `trial` of theorem `id` under master seed `seed`.
pub fn trial_seed(seed: u64, id: TheoremId, trial: u64) -> u64 {
    let mut z = seed;
    for word in [id as u64 + 1, trial] {
        z = splitmix64(z ^ splitmix64(word));
    }
    z
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The check document of one suite trial.
pub fn trial_doc(id: TheoremId, trial: u64, cfg: &SuiteConfig) -> Result<CheckDoc> {
    let seed = trial_seed(cfg.seed, id, trial);
    let mut doc = gen_check(id, cfg.caps, cfg.regime, seed, trial)?;
    if cfg.inject_fault {
        doc.params.insert("inject_fault".into(), Param::Bool(true));
    }
    Ok(doc)
}

/// Generates and checks `cfg.trials` instances of every id, in order.
pub fn run_suite(ids: &[TheoremId], cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut verdicts = Vec::new();
    let mut summary = Summary::default();
    for &id in ids {
        for trial in 0..cfg.trials {
            let doc = trial_doc(id, trial, cfg)?;
            let v = check_with_trial(&doc, trial, trial_seed(cfg.seed, id, trial))?;
            match v.outcome {
                Outcome::Equal => summary.equal += 1,
                Outcome::Mismatch { .. } => summary.mismatch += 1,
                Outcome::Skipped => summary.skipped += 1,
            }
            verdicts.push(v);
        }
    }
    Ok(SuiteReport { verdicts, summary })
}
