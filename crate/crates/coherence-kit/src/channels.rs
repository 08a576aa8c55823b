//! Kraus-set channels: application, completeness, and classification into
//! the incoherent-operation hierarchy.
//!
//! Classification is structural and works on the given representation. An
//! operator entry counts as nonzero when its modulus exceeds
//! [`PATTERN_TOL`]; a set is complete when `sum K† K` matches the identity
//! within [`COMPLETENESS_TOL`]. The hierarchy, most restrictive first, is
//! CPO, PIO, SIO, IO. Whether a set that is PIO only after regrouping its
//! operators should count as PIO is a channel-equality question that this
//! module deliberately does not answer: only the presented representation
//! is inspected.

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::qubit::{DensityMatrix, DiagUnitary};
use serde::{Deserialize, Serialize};

/// Modulus threshold below which an entry counts as structurally zero.
pub const PATTERN_TOL: f64 = 1e-9;
/// Completeness tolerance for `sum K† K = I`.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// A single Kraus operator; a contraction (operator norm at most one).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausOperator {
    m: Mat2,
}

impl KrausOperator {
    pub fn new(m: Mat2) -> Result<Self> {
        let norm = m.operator_norm();
        if norm > 1.0 + PATTERN_TOL {
            return Err(Error::InvalidMatrix(format!(
                "Kraus operator norm {norm} exceeds 1"
            )));
        }
        Ok(KrausOperator { m })
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    fn is_zero(&self) -> bool {
        self.m.max_abs() <= PATTERN_TOL
    }
}

/// An ordered list of Kraus operators forming a trace-preserving channel.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    ops: Vec<KrausOperator>,
}

/// Residual `max_ij |(sum K† K - I)_ij|` of a prospective Kraus set.
pub fn completeness_residual(ops: &[Mat2]) -> f64 {
    let mut sum = Mat2::zero();
    for k in ops {
        sum = sum + k.adjoint() * *k;
    }
    sum.max_abs_diff(&Mat2::identity())
}

impl KrausSet {
    pub fn new(ops: Vec<KrausOperator>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidMatrix("empty Kraus set".into()));
        }
        let mats: Vec<Mat2> = ops.iter().map(|k| k.m).collect();
        let residual = completeness_residual(&mats);
        if residual > COMPLETENESS_TOL {
            return Err(Error::IncompleteChannel { residual });
        }
        Ok(KrausSet { ops })
    }

    pub fn from_matrices(mats: Vec<Mat2>) -> Result<Self> {
        let ops = mats
            .into_iter()
            .map(KrausOperator::new)
            .collect::<Result<Vec<_>>>()?;
        KrausSet::new(ops)
    }

    pub fn operators(&self) -> &[KrausOperator] {
        &self.ops
    }

    pub fn matrices(&self) -> Vec<Mat2> {
        self.ops.iter().map(|k| k.m).collect()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn completeness_residual(&self) -> f64 {
        completeness_residual(&self.matrices())
    }
}

/// Structural channel class, most restrictive class reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ChannelClass {
    NotTracePreserving,
    NotIncoherent,
    Io,
    Sio,
    Pio,
    Cpo,
}

impl ChannelClass {
    /// Position in the hierarchy; higher is more restrictive.
    pub fn rank(self) -> u8 {
        match self {
            ChannelClass::NotTracePreserving => 0,
            ChannelClass::NotIncoherent => 1,
            ChannelClass::Io => 2,
            ChannelClass::Sio => 3,
            ChannelClass::Pio => 4,
            ChannelClass::Cpo => 5,
        }
    }

    /// True when `self` is at least as restrictive as `other`.
    pub fn is_at_least(self, other: ChannelClass) -> bool {
        self.rank() >= other.rank()
    }

    pub fn name(self) -> &'static str {
        match self {
            ChannelClass::NotTracePreserving => "NOT_TRACE_PRESERVING",
            ChannelClass::NotIncoherent => "NOT_INCOHERENT",
            ChannelClass::Io => "IO",
            ChannelClass::Sio => "SIO",
            ChannelClass::Pio => "PIO",
            ChannelClass::Cpo => "CPO",
        }
    }
}

/// The six single-qubit PIO Kraus families.
///
/// `K1`/`K2` dephase (outputs `(z,0)`, `(-z,0)`), `K3`/`K4` prepare a pole
/// (`(1,0)`, `(-1,0)`), `K5`/`K6` are the phased permutations (identity and
/// swap) that make up CPO.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PioFamily {
    K1,
    K2,
    K3,
    K4,
    K5,
    K6,
}

impl PioFamily {
    pub fn name(self) -> &'static str {
        match self {
            PioFamily::K1 => "K1",
            PioFamily::K2 => "K2",
            PioFamily::K3 => "K3",
            PioFamily::K4 => "K4",
            PioFamily::K5 => "K5",
            PioFamily::K6 => "K6",
        }
    }
}

/// Result of [`classify`]: the class plus PIO family tags when applicable.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub class: ChannelClass,
    /// Family tags of the detected PIO components (also set for CPO).
    pub pio_families: Vec<PioFamily>,
    pub completeness_residual: f64,
}

/// Applies the channel: `rho -> sum K rho K†`.
pub fn apply(ch: &KrausSet, m: &DensityMatrix) -> Result<DensityMatrix> {
    let residual = ch.completeness_residual();
    if residual > COMPLETENESS_TOL {
        return Err(Error::IncompleteChannel { residual });
    }
    let rho = *m.matrix();
    let mut out = Mat2::zero();
    for k in &ch.ops {
        out = out + k.m * rho * k.m.adjoint();
    }
    DensityMatrix::new(out)
}

/// One measurement branch of a selective application.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectiveOutcome {
    pub probability: f64,
    /// `None` marks a branch whose probability is below tolerance; the
    /// entry is kept so branch indices stay aligned with Kraus indices.
    pub outcome: Option<DensityMatrix>,
}

/// Applies the channel selectively: branch `n` occurs with probability
/// `p_n = Tr(K_n rho K_n†)` and leaves the normalized post-measurement
/// state.
pub fn apply_selective(ch: &KrausSet, m: &DensityMatrix) -> Result<Vec<SelectiveOutcome>> {
    let residual = ch.completeness_residual();
    if residual > COMPLETENESS_TOL {
        return Err(Error::IncompleteChannel { residual });
    }
    let rho = *m.matrix();
    let mut outcomes = Vec::with_capacity(ch.ops.len());
    for k in &ch.ops {
        let branch = k.m * rho * k.m.adjoint();
        let p = branch.trace().re;
        if p < PATTERN_TOL {
            outcomes.push(SelectiveOutcome {
                probability: p.max(0.0),
                outcome: None,
            });
        } else {
            outcomes.push(SelectiveOutcome {
                probability: p,
                outcome: Some(DensityMatrix::new(branch.scale_re(1.0 / p))?),
            });
        }
    }
    Ok(outcomes)
}

/// Nonzero pattern of one operator at [`PATTERN_TOL`].
#[derive(Debug, Clone, Copy, PartialEq)]
struct Pattern {
    nz: [[bool; 2]; 2],
}

impl Pattern {
    fn of(m: &Mat2) -> Self {
        let mut nz = [[false; 2]; 2];
        for (i, row) in m.e.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                nz[i][j] = v.norm() > PATTERN_TOL;
            }
        }
        Pattern { nz }
    }

    /// At most one nonzero entry per column.
    fn is_incoherent(&self) -> bool {
        !(self.nz[0][0] && self.nz[1][0]) && !(self.nz[0][1] && self.nz[1][1])
    }

    /// At most one nonzero entry per row as well.
    fn is_strictly_incoherent(&self) -> bool {
        self.is_incoherent()
            && !(self.nz[0][0] && self.nz[0][1])
            && !(self.nz[1][0] && self.nz[1][1])
    }

    fn count(&self) -> usize {
        self.nz.iter().flatten().filter(|b| **b).count()
    }
}

/// Single-entry operator kinds used by the PIO family test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SingleEntry {
    E00,
    E01,
    E10,
    E11,
}

fn pio_shape(m: &Mat2) -> Option<PioShape> {
    let p = Pattern::of(m);
    match p.count() {
        1 => {
            let kind = if p.nz[0][0] {
                SingleEntry::E00
            } else if p.nz[0][1] {
                SingleEntry::E01
            } else if p.nz[1][0] {
                SingleEntry::E10
            } else {
                SingleEntry::E11
            };
            let modulus = m.max_abs();
            Some(PioShape::Single(kind, modulus))
        }
        2 if p.nz[0][0] && p.nz[1][1] => {
            let (m0, m1) = (m.e[0][0].norm(), m.e[1][1].norm());
            ((m0 - m1).abs() <= PATTERN_TOL).then_some(PioShape::Diag(0.5 * (m0 + m1)))
        }
        2 if p.nz[0][1] && p.nz[1][0] => {
            let (m0, m1) = (m.e[0][1].norm(), m.e[1][0].norm());
            ((m0 - m1).abs() <= PATTERN_TOL).then_some(PioShape::AntiDiag(0.5 * (m0 + m1)))
        }
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PioShape {
    Single(SingleEntry, f64),
    Diag(f64),
    AntiDiag(f64),
}

/// Tries to read the set as a flat PIO mixture (operators of family `i`
/// scaled by `sqrt(p_i)`): every operator must be proportional to a family
/// operator and the single-entry operators must pair up across columns with
/// matching moduli.
fn detect_pio(mats: &[&Mat2]) -> Option<Vec<PioFamily>> {
    let mut families = Vec::new();
    // (kind, modulus) of single-entry ops touching column 0 resp. column 1.
    let mut col0: Vec<(SingleEntry, f64)> = Vec::new();
    let mut col1: Vec<(SingleEntry, f64)> = Vec::new();
    for m in mats {
        match pio_shape(m)? {
            PioShape::Diag(_) => families.push(PioFamily::K5),
            PioShape::AntiDiag(_) => families.push(PioFamily::K6),
            PioShape::Single(kind, modulus) => match kind {
                SingleEntry::E00 | SingleEntry::E10 => col0.push((kind, modulus)),
                SingleEntry::E01 | SingleEntry::E11 => col1.push((kind, modulus)),
            },
        }
    }
    if col0.len() != col1.len() {
        return None;
    }
    col0.sort_by(|a, b| a.1.total_cmp(&b.1));
    col1.sort_by(|a, b| a.1.total_cmp(&b.1));
    for (&(k0, m0), &(k1, m1)) in col0.iter().zip(col1.iter()) {
        if (m0 - m1).abs() > PATTERN_TOL {
            return None;
        }
        let fam = match (k0, k1) {
            (SingleEntry::E00, SingleEntry::E11) => PioFamily::K1,
            (SingleEntry::E10, SingleEntry::E01) => PioFamily::K2,
            (SingleEntry::E00, SingleEntry::E01) => PioFamily::K3,
            (SingleEntry::E10, SingleEntry::E11) => PioFamily::K4,
            _ => unreachable!("column split guarantees a valid pairing"),
        };
        families.push(fam);
    }
    Some(families)
}

/// Classifies a complete Kraus set into the incoherent-operation hierarchy.
///
/// Operators that are structurally zero are ignored. A set whose only
/// nonzero operator is a phased permutation is CPO (a single-operator
/// complete channel is unitary, so the pattern test suffices).
pub fn classify(ch: &KrausSet) -> Result<Classification> {
    let residual = ch.completeness_residual();
    if residual > COMPLETENESS_TOL {
        return Err(Error::IncompleteChannel { residual });
    }
    let mats: Vec<&Mat2> = ch
        .ops
        .iter()
        .filter(|k| !k.is_zero())
        .map(|k| &k.m)
        .collect();

    let patterns: Vec<Pattern> = mats.iter().map(|m| Pattern::of(m)).collect();
    if patterns.iter().any(|p| !p.is_incoherent()) {
        return Ok(Classification {
            class: ChannelClass::NotIncoherent,
            pio_families: Vec::new(),
            completeness_residual: residual,
        });
    }
    if patterns.iter().any(|p| !p.is_strictly_incoherent()) {
        return Ok(Classification {
            class: ChannelClass::Io,
            pio_families: Vec::new(),
            completeness_residual: residual,
        });
    }

    if mats.len() == 1 {
        // Unitary by completeness; an incoherent unitary is a phased
        // permutation, i.e. CPO.
        let family = if Pattern::of(mats[0]).nz[0][0] {
            PioFamily::K5
        } else {
            PioFamily::K6
        };
        return Ok(Classification {
            class: ChannelClass::Cpo,
            pio_families: vec![family],
            completeness_residual: residual,
        });
    }

    if let Some(families) = detect_pio(&mats) {
        return Ok(Classification {
            class: ChannelClass::Pio,
            pio_families: families,
            completeness_residual: residual,
        });
    }

    Ok(Classification {
        class: ChannelClass::Sio,
        pio_families: Vec::new(),
        completeness_residual: residual,
    })
}

/// Conjugates the channel by diagonal unitaries: `K -> U2† K U1`.
///
/// The result is complete and has the same incoherence class as the input,
/// since diagonal phases cannot change a nonzero pattern.
pub fn conjugate_channel(ch: &KrausSet, u1: &DiagUnitary, u2: &DiagUnitary) -> Result<KrausSet> {
    let residual = ch.completeness_residual();
    if residual > COMPLETENESS_TOL {
        return Err(Error::IncompleteChannel { residual });
    }
    let u2dag = u2.matrix().adjoint();
    let ops = ch
        .ops
        .iter()
        .map(|k| KrausOperator::new(u2dag * k.m * *u1.matrix()))
        .collect::<Result<Vec<_>>>()?;
    KrausSet::new(ops)
}
