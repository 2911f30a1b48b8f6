//! Certificate schema, the six- and five-vertex classification pipelines and
//! the independent verifier that recomputes every certified claim from the
//! certificate payload alone.

use std::collections::HashMap;

use num::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog;
use crate::rational::{format_rat, parse_rat, pow2_neg, Rat};
use crate::stepton::{
    automorphism_certificate, blowup_witness_certificate, d_star, split_certificate, twin_certificate,
    StochasticVector, TournamentMatrix,
};
use crate::subcount::{blowup_threshold, count_copies};
use crate::sympoly::{d_star_poly, matrix_by_name};
use crate::tournament::{are_isomorphic, enumerate_tournaments, Tournament};

/// Disqualification argument recorded in a certificate.
#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    NotStronglyConnected,
    NontrivialAutomorphism,
    Twins,
    BlowupWitness,
    ParamMatrix,
    SplitWeights,
    ExternalReference,
}

impl Reason {
    pub fn as_str(&self) -> &'static str {
        match self {
            Reason::NotStronglyConnected => "not_strongly_connected",
            Reason::NontrivialAutomorphism => "nontrivial_automorphism",
            Reason::Twins => "twins",
            Reason::BlowupWitness => "blowup_witness",
            Reason::ParamMatrix => "param_matrix",
            Reason::SplitWeights => "split_weights",
            Reason::ExternalReference => "external_reference",
        }
    }
}

/// Reason-specific payload. Field names are disjoint across variants so the
/// untagged representation stays unambiguous.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
#[serde(untagged)]
pub enum Witness {
    Blowup {
        host: String,
        copies: u64,
    },
    Param {
        matrix: String,
        x: String,
    },
    Split {
        matrix: Vec<Vec<String>>,
        weights: Vec<String>,
        alpha: String,
        k1: usize,
        k2: usize,
    },
    StepMatrix {
        matrix: Vec<Vec<String>>,
        weights: Vec<String>,
    },
    Twins {
        pair: [usize; 2],
    },
    Automorphism {
        permutation: Vec<usize>,
    },
    External {
        citation: String,
    },
}

/// A machine-checkable disqualification record. `verify` recomputes every
/// numeric claim from the payload; no cached value is trusted.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct Certificate {
    pub tournament: String,
    pub k: u32,
    pub reason: Reason,
    pub witness: Witness,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dstar: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<String>,
    #[serde(default)]
    pub notes: String,
}

/// Outcome of the certificate-producing checks: hard precondition violations
/// are distinguished from honest rejections (claim not established).
#[derive(Debug, Error)]
pub enum CertCheckError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("rejected: {0}")]
    Rejected(String),
    #[error(transparent)]
    Stepton(#[from] crate::stepton::SteptonError),
    #[error(transparent)]
    Subcount(#[from] crate::subcount::SubcountError),
    #[error(transparent)]
    Sympoly(#[from] crate::sympoly::SympolyError),
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("reference table mismatch: {0}")]
    ReferenceMismatch(String),
    #[error("class {0} ended with no certificate")]
    Uncovered(String),
    #[error("certificate construction failed for {class}: {source}")]
    Certificate {
        class: String,
        #[source]
        source: CertCheckError,
    },
    #[error("csv parse error: {0}")]
    Csv(String),
}

/// One classification row: display code, optional name and the A-E flags.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct ClassificationRow {
    pub code: String,
    pub name: Option<String>,
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
    pub e: bool,
}

impl ClassificationRow {
    pub fn flags_string(&self) -> String {
        let mut s = String::new();
        for (set, ch) in [
            (self.a, 'A'),
            (self.b, 'B'),
            (self.c, 'C'),
            (self.d, 'D'),
            (self.e, 'E'),
        ] {
            if set {
                s.push(ch);
            }
        }
        s
    }

    pub fn flag_count(&self) -> usize {
        [self.a, self.b, self.c, self.d, self.e]
            .iter()
            .filter(|&&f| f)
            .count()
    }
}

/// Classification outcome: one row per non-transitive class plus every
/// certificate backing the flags.
#[derive(Serialize, Clone, Debug)]
pub struct Classification {
    pub n: usize,
    pub rows: Vec<ClassificationRow>,
    pub certificates: Vec<Certificate>,
}

impl Classification {
    /// Counts of the A, B, C, D, E flags in row order.
    pub fn flag_counts(&self) -> [usize; 5] {
        let mut counts = [0usize; 5];
        for row in &self.rows {
            for (i, set) in [row.a, row.b, row.c, row.d, row.e].into_iter().enumerate() {
                counts[i] += set as usize;
            }
        }
        counts
    }

    pub fn rows_with_any_of_abc(&self) -> usize {
        self.rows.iter().filter(|r| r.a || r.b || r.c).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("code,name,A,B,C,D,E\n");
        for row in &self.rows {
            out.push_str(&format!(
                "\"{}\",{},{},{},{},{},{}\n",
                row.code,
                row.name.as_deref().unwrap_or(""),
                row.a as u8,
                row.b as u8,
                row.c as u8,
                row.d as u8,
                row.e as u8
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("classification serializes")
    }

    pub fn certificates_jsonl(&self) -> String {
        let mut out = String::new();
        for cert in &self.certificates {
            out.push_str(&serde_json::to_string(cert).expect("certificate serializes"));
            out.push('\n');
        }
        out
    }
}

/// Parses the CSV emitted by [`Classification::to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<ClassificationRow>, ClassifyError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| ClassifyError::Csv("empty".into()))?;
    if header != "code,name,A,B,C,D,E" {
        return Err(ClassifyError::Csv(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (no, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let (code, rest) = if let Some(stripped) = line.strip_prefix('"') {
            let end = stripped
                .find('"')
                .ok_or_else(|| ClassifyError::Csv(format!("line {}: unterminated quote", no + 2)))?;
            let code = &stripped[..end];
            let rest = stripped[end + 1..]
                .strip_prefix(',')
                .ok_or_else(|| ClassifyError::Csv(format!("line {}: missing fields", no + 2)))?;
            (code.to_string(), rest)
        } else {
            let (code, rest) = line
                .split_once(',')
                .ok_or_else(|| ClassifyError::Csv(format!("line {}: missing fields", no + 2)))?;
            (code.to_string(), rest)
        };
        let fields: Vec<&str> = rest.split(',').collect();
        if fields.len() != 6 {
            return Err(ClassifyError::Csv(format!(
                "line {}: expected 6 trailing fields, got {}",
                no + 2,
                fields.len()
            )));
        }
        let flag = |s: &str| match s {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(ClassifyError::Csv(format!(
                "line {}: bad flag {other:?}",
                no + 2
            ))),
        };
        rows.push(ClassificationRow {
            code,
            name: (!fields[0].is_empty()).then(|| fields[0].to_string()),
            a: flag(fields[1])?,
            b: flag(fields[2])?,
            c: flag(fields[3])?,
            d: flag(fields[4])?,
            e: flag(fields[5])?,
        });
    }
    Ok(rows)
}

/// Reference row of the six-vertex classification table.
#[derive(Clone, Copy, Debug)]
pub struct ReferenceRow {
    pub code: &'static str,
    pub flags: &'static str,
    pub name: Option<&'static str>,
}

const fn row(code: &'static str, flags: &'static str) -> ReferenceRow {
    ReferenceRow {
        code,
        flags,
        name: None,
    }
}

const fn named(code: &'static str, flags: &'static str, name: &'static str) -> ReferenceRow {
    ReferenceRow {
        code,
        flags,
        name: Some(name),
    }
}

/// Display codes, flags and names for all 55 non-transitive 6-vertex
/// classes. Flags: A not strongly connected, B nontrivial automorphism,
/// C twins, D blow-up witness, E parametrized matrix.
pub static SIX_VERTEX_REFERENCE: [ReferenceRow; 55] = [
    row("00000,0000,000,01,0", "ABC"),
    row("00010,0000,000,00,0", "AC"),
    row("00011,0000,000,00,0", "C"),
    row("00010,0001,000,00,0", "C"),
    named("00010,0000,001,00,0", "E", "H_6^1"),
    row("00010,0000,000,01,0", "C"),
    row("00010,0000,000,00,1", "C"),
    row("00000,0010,000,00,0", "AC"),
    row("00001,0010,000,00,0", "C"),
    row("00000,0011,000,00,0", "AC"),
    row("00000,0010,001,00,0", "A"),
    row("00000,0010,000,01,0", "A"),
    row("00000,0010,000,00,1", "AC"),
    row("00000,0011,001,00,0", "AB"),
    row("00000,0000,010,00,0", "ABC"),
    row("00001,0000,010,00,0", "B"),
    row("00000,0001,010,00,0", "AB"),
    row("00000,0000,011,00,0", "AC"),
    row("00100,0000,000,00,0", "AC"),
    row("00110,0000,000,00,0", "AC"),
    row("00111,0000,000,00,0", "C"),
    row("00110,0001,000,00,0", "C"),
    row("00110,0000,001,00,0", "C"),
    row("00110,0000,000,01,0", "C"),
    row("00110,0000,000,00,1", "C"),
    row("00111,0000,001,00,0", "C"),
    row("00110,0001,001,00,0", "BC"),
    row("00111,0000,000,01,0", "BC"),
    named("00110,0001,000,01,0", "D", "H_6^2"),
    row("00100,0010,000,00,0", "A"),
    named("00101,0010,000,00,0", "D", "H_6^3"),
    row("00100,0011,000,00,0", "C"),
    named("00100,0010,001,00,0", "D", "H_6^4"),
    named("00100,0010,000,01,0", "D", "H_6^5"),
    named("00100,0010,000,00,1", "E", "H_6^6"),
    row("00101,0010,001,00,0", "B"),
    named("00100,0011,001,00,0", "E", "H_6^7"),
    named("00100,0011,000,01,0", "D", "H_6^8"),
    row("00110,0010,000,00,0", "AB"),
    named("00111,0010,000,00,0", "E", "H_6^9"),
    row("00111,0011,000,00,0", "C"),
    named("00111,0010,001,00,0", "D", "H_6^10"),
    row("00000,0100,000,00,0", "ABC"),
    row("00010,0100,000,00,0", "AB"),
    row("00011,0100,000,00,0", "BC"),
    named("00010,0101,000,00,0", "D", "H_6^11"),
    row("00010,0100,000,00,1", "B"),
    row("01000,0000,000,00,0", "ABC"),
    row("01000,0000,000,01,0", "AB"),
    row("01010,0000,000,00,0", "A"),
    row("01011,0000,000,00,0", "C"),
    named("01010,0001,000,00,0", "D", "H_6^12"),
    named("01010,0000,001,00,0", "D", "H_6^13"),
    named("01010,0000,000,01,0", "E", "H_6^14"),
    row("01010,0000,000,00,1", "C"),
];

/// Blow-up hosts fixed per named tournament.
pub fn blowup_hosts() -> HashMap<&'static str, &'static str> {
    let mut hosts = HashMap::new();
    for name in ["H_6^2", "H_6^3", "H_6^4", "H_6^8", "H_6^10", "H_6^11", "H_6^13"] {
        hosts.insert(name, "S_11");
    }
    hosts.insert("H_6^5", "S_15");
    hosts.insert("H_6^12", "S_15");
    hosts
}

/// Parametrized-matrix witnesses fixed per named tournament.
pub fn param_witnesses() -> HashMap<&'static str, (&'static str, Rat)> {
    let mut params = HashMap::new();
    params.insert("H_6^14", ("A_x", parse_rat("30721/100000").unwrap()));
    params.insert("H_6^9", ("B_x", parse_rat("21740/100000").unwrap()));
    params.insert("H_6^7", ("B_x", parse_rat("-21740/100000").unwrap()));
    params.insert("H_6^6", ("C_x", parse_rat("10418/100000").unwrap()));
    params.insert("H_6^1", ("C_x", parse_rat("-10418/100000").unwrap()));
    params
}

/// Certificate for a parametrized matrix at a fixed rational x: the density
/// is expanded symbolically, evaluated exactly, and cross-checked against
/// the direct map-sum route before the value is recorded.
pub fn param_matrix_certificate(
    h: &Tournament,
    matrix_name: &str,
    x: &Rat,
) -> Result<Certificate, CertCheckError> {
    if h.is_transitive() {
        return Err(CertCheckError::Precondition("pattern is transitive".into()));
    }
    if x.is_zero() {
        return Err(CertCheckError::Rejected(
            "x = 0 instantiates the constant 1/2 matrix".into(),
        ));
    }
    let m = matrix_by_name(matrix_name)?;
    let poly = d_star_poly(h, &m)?;
    let value = poly.eval(x);
    let direct = d_star(h, &m.at(x)?, &StochasticVector::uniform(m.order()))?;
    if direct != value {
        return Err(CertCheckError::Rejected(format!(
            "symbolic ({}) and map-sum ({}) routes disagree; implementation defect",
            format_rat(&value),
            format_rat(&direct)
        )));
    }
    let k = h.vertex_count();
    let threshold = pow2_neg((k * (k - 1) / 2) as u32);
    if value < threshold {
        return Err(CertCheckError::Rejected(format!(
            "d* = {} below threshold {}",
            format_rat(&value),
            format_rat(&threshold)
        )));
    }
    Ok(Certificate {
        tournament: h.format_code(),
        k: k as u32,
        reason: Reason::ParamMatrix,
        witness: Witness::Param {
            matrix: matrix_name.to_string(),
            x: format_rat(x),
        },
        dstar: Some(format_rat(&value)),
        threshold: Some(format_rat(&threshold)),
        notes: "parametrized step tournamenton with uniform weights".into(),
    })
}

/// Certificate that defers to the literature; carries a citation, never a
/// claim this tool checked.
pub fn external_certificate(t: &Tournament, citation: &str, notes: &str) -> Certificate {
    Certificate {
        tournament: t.format_code(),
        k: t.vertex_count() as u32,
        reason: Reason::ExternalReference,
        witness: Witness::External {
            citation: citation.to_string(),
        },
        dstar: None,
        threshold: None,
        notes: notes.to_string(),
    }
}

const CORPS_CITATION: &str =
    "L. N. Coregliano, R. F. Parente and C. M. Sato, Electron. J. Combin. 26 (2019), #P1.44";

/// Classifies all 55 non-transitive 6-vertex tournaments: computes the
/// structural flags, attaches the fixed blow-up and parametrized-matrix
/// witnesses for the named classes, and emits one certificate per flag.
/// Any class without a certificate is a hard error.
pub fn classify_six_vertex() -> Result<Classification, ClassifyError> {
    let classes: Vec<Tournament> = enumerate_tournaments(6)
        .into_iter()
        .filter(|t| !t.is_transitive())
        .collect();
    if classes.len() != 55 {
        return Err(ClassifyError::ReferenceMismatch(format!(
            "expected 55 non-transitive classes, enumerated {}",
            classes.len()
        )));
    }
    let mut by_canon: HashMap<u32, &ReferenceRow> = HashMap::new();
    for reference in &SIX_VERTEX_REFERENCE {
        let parsed = Tournament::parse_code(reference.code)
            .map_err(|e| ClassifyError::ReferenceMismatch(format!("{}: {e}", reference.code)))?;
        if by_canon
            .insert(parsed.canonical_code().bits(), reference)
            .is_some()
        {
            return Err(ClassifyError::ReferenceMismatch(format!(
                "duplicate class for {}",
                reference.code
            )));
        }
    }
    let hosts = blowup_hosts();
    let params = param_witnesses();
    let outcomes: Result<Vec<(ClassificationRow, Vec<Certificate>)>, ClassifyError> = classes
        .par_iter()
        .map(|class| {
            let canon = class.canonical_code();
            let reference = by_canon.get(&canon.bits()).ok_or_else(|| {
                ClassifyError::ReferenceMismatch(format!(
                    "enumerated class {canon} missing from the reference table"
                ))
            })?;
            let t = Tournament::parse_code(reference.code).expect("validated above");
            let wrap = |source: CertCheckError| ClassifyError::Certificate {
                class: reference.code.to_string(),
                source,
            };
            let a = !t.is_strongly_connected();
            let b = t.nontrivial_automorphism().is_some();
            let c = t.has_twins();
            let d = reference.name.is_some_and(|n| hosts.contains_key(n));
            let e = reference.name.is_some_and(|n| params.contains_key(n));
            let mut certs = Vec::new();
            if a {
                certs.push(split_certificate(&t).map_err(wrap)?);
            }
            if b {
                certs.push(automorphism_certificate(&t).map_err(wrap)?);
            }
            if c {
                certs.push(twin_certificate(&t).map_err(wrap)?);
            }
            if let Some(name) = reference.name {
                if let Some(host_name) = hosts.get(name) {
                    let host = catalog::catalog(host_name).expect("catalog hosts resolve");
                    certs.push(blowup_witness_certificate(&t, &host).map_err(wrap)?);
                }
                if let Some((matrix_name, x)) = params.get(name) {
                    certs.push(param_matrix_certificate(&t, matrix_name, x).map_err(wrap)?);
                }
            }
            if certs.is_empty() {
                return Err(ClassifyError::Uncovered(reference.code.to_string()));
            }
            Ok((
                ClassificationRow {
                    code: reference.code.to_string(),
                    name: reference.name.map(String::from),
                    a,
                    b,
                    c,
                    d,
                    e,
                },
                certs,
            ))
        })
        .collect();
    let mut outcomes = outcomes?;
    outcomes.sort_by(|(a, _), (b, _)| a.code.cmp(&b.code));
    let mut rows = Vec::with_capacity(outcomes.len());
    let mut certificates = Vec::new();
    for (row, certs) in outcomes {
        rows.push(row);
        certificates.extend(certs);
    }
    Ok(Classification {
        n: 6,
        rows,
        certificates,
    })
}

/// Classifies the 11 non-transitive 5-vertex tournaments: split certificates
/// for the non-strongly-connected ones, the blow-up witness for H_5, and
/// external references for F_5 (quasirandomness-forcing) and the remaining
/// strongly connected classes.
pub fn classify_five_vertex() -> Result<Classification, ClassifyError> {
    let classes: Vec<Tournament> = enumerate_tournaments(5)
        .into_iter()
        .filter(|t| !t.is_transitive())
        .collect();
    let h5 = catalog::catalog("H_5").expect("catalog");
    let f5 = catalog::catalog("F_5").expect("catalog");
    let s7 = catalog::catalog("S_7").expect("catalog");
    let mut rows = Vec::new();
    let mut certificates = Vec::new();
    for t in &classes {
        let code = t.format_code();
        let wrap = |source: CertCheckError| ClassifyError::Certificate {
            class: code.clone(),
            source,
        };
        let is_h5 = are_isomorphic(t, &h5);
        let is_f5 = are_isomorphic(t, &f5);
        let name = if is_h5 {
            Some("H_5".to_string())
        } else if is_f5 {
            Some("F_5".to_string())
        } else {
            None
        };
        let mut row = ClassificationRow {
            code: code.clone(),
            name,
            a: false,
            b: false,
            c: false,
            d: false,
            e: false,
        };
        if !t.is_strongly_connected() {
            row.a = true;
            certificates.push(split_certificate(t).map_err(wrap)?);
        } else if is_h5 {
            row.d = true;
            certificates.push(blowup_witness_certificate(t, &s7).map_err(wrap)?);
        } else if is_f5 {
            certificates.push(external_certificate(
                t,
                CORPS_CITATION,
                "quasirandomness-forcing; no disqualification certificate exists",
            ));
        } else {
            certificates.push(external_certificate(
                t,
                CORPS_CITATION,
                "not quasirandomness-forcing; established externally",
            ));
        }
        rows.push(row);
    }
    Ok(Classification {
        n: 5,
        rows,
        certificates,
    })
}

/// Verification outcome with a recomputation trace.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub accepted: bool,
    pub checks: Vec<String>,
    pub failure: Option<String>,
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.accepted {
            write!(f, "ACCEPT ({} checks)", self.checks.len())
        } else {
            write!(
                f,
                "REJECT: {}",
                self.failure.as_deref().unwrap_or("unknown failure")
            )
        }
    }
}

/// Re-checks a certificate from scratch: parses the codes, recomputes the
/// predicate or the exact density/count, and compares with the stored
/// fractions bit for bit.
pub fn verify(cert: &Certificate) -> VerifyReport {
    let mut checks = Vec::new();
    let failure = verify_inner(cert, &mut checks).err();
    VerifyReport {
        accepted: failure.is_none(),
        checks,
        failure,
    }
}

fn verify_inner(cert: &Certificate, trace: &mut Vec<String>) -> Result<(), String> {
    let t = Tournament::parse_code(&cert.tournament)
        .map_err(|e| format!("tournament code: {e}"))?;
    if t.vertex_count() != cert.k as usize {
        return Err(format!(
            "stored k = {} but code has {} vertices",
            cert.k,
            t.vertex_count()
        ));
    }
    trace.push(format!("parsed {}-vertex tournament", cert.k));
    if cert.reason == Reason::ExternalReference {
        let Witness::External { citation } = &cert.witness else {
            return Err("external_reference requires a citation witness".into());
        };
        if citation.trim().is_empty() {
            return Err("empty citation".into());
        }
        if cert.dstar.is_some() || cert.threshold.is_some() {
            return Err("external_reference certificates carry no computed values".into());
        }
        trace.push("citation recorded; not machine-checked".into());
        return Ok(());
    }
    if t.is_transitive() {
        return Err("pattern is transitive; disqualification reasons do not apply".into());
    }
    let stored_dstar = parse_required(&cert.dstar, "dstar")?;
    let stored_threshold = parse_required(&cert.threshold, "threshold")?;
    let k = t.vertex_count();
    let rho = pow2_neg((k * (k - 1) / 2) as u32);
    match (&cert.reason, &cert.witness) {
        (Reason::BlowupWitness, Witness::Blowup { host, copies }) => {
            let host_t =
                Tournament::parse_code(host).map_err(|e| format!("host code: {e}"))?;
            if host_t.vertex_count() <= k {
                return Err("host not larger than the pattern".into());
            }
            let recount = count_copies(&t, &host_t).map_err(|e| e.to_string())?;
            trace.push(format!("recounted copies: {recount}"));
            if recount != *copies {
                return Err(format!("stored copies {copies} != recomputed {recount}"));
            }
            let copies_rat = parse_rat(&copies.to_string()).unwrap();
            if stored_dstar != copies_rat {
                return Err("dstar field does not match the copy count".into());
            }
            let expected_threshold = blowup_threshold(&t, host_t.vertex_count());
            if stored_threshold != expected_threshold {
                return Err(format!(
                    "threshold must be {}",
                    format_rat(&expected_threshold)
                ));
            }
            if copies_rat < expected_threshold {
                return Err("copy count below the blow-up threshold".into());
            }
            trace.push("copy count meets the blow-up threshold".into());
        }
        (Reason::ParamMatrix, Witness::Param { matrix, x }) => {
            let m = matrix_by_name(matrix).map_err(|e| e.to_string())?;
            let x = parse_rat(x).map_err(|e| e.to_string())?;
            if x.is_zero() {
                return Err("x = 0 gives the constant 1/2 matrix".into());
            }
            let inst = m.at(&x).map_err(|e| e.to_string())?;
            let value = d_star(&t, &inst, &StochasticVector::uniform(m.order()))
                .map_err(|e| e.to_string())?;
            trace.push(format!("recomputed d* = {}", format_rat(&value)));
            if value != stored_dstar {
                return Err(format!(
                    "stored d* {} != recomputed {}",
                    format_rat(&stored_dstar),
                    format_rat(&value)
                ));
            }
            if stored_threshold != rho {
                return Err(format!("threshold must be {}", format_rat(&rho)));
            }
            if value < rho {
                return Err("d* below the random baseline".into());
            }
            trace.push("d* meets the baseline with a non-constant matrix".into());
        }
        (
            Reason::SplitWeights | Reason::NotStronglyConnected,
            Witness::Split {
                matrix,
                weights,
                alpha,
                k1,
                k2,
            },
        ) => {
            let (m, w) = parse_step_witness(matrix, weights)?;
            let alpha = parse_rat(alpha).map_err(|e| e.to_string())?;
            if alpha <= Rat::zero() || alpha >= parse_rat("1").unwrap() {
                return Err("alpha outside (0,1)".into());
            }
            if w.entries() != [alpha.clone(), parse_rat("1").unwrap() - &alpha] {
                return Err("weights do not equal (alpha, 1 - alpha)".into());
            }
            if k1 + k2 != k || *k1 == 0 || *k2 == 0 {
                return Err("part sizes do not partition the vertex set".into());
            }
            if t.is_strongly_connected() {
                return Err("pattern is strongly connected; no split exists".into());
            }
            let comps = t.strong_components();
            let mut prefix = 0;
            let cut_exists = comps[..comps.len() - 1].iter().any(|comp| {
                prefix += comp.len();
                prefix == *k1
            });
            if !cut_exists {
                return Err(format!("no condensation cut with first part of size {k1}"));
            }
            trace.push(format!("split into parts of sizes {k1} and {k2} re-derived"));
            verify_step_value(&t, &m, &w, &stored_dstar, &stored_threshold, &rho, true, trace)?;
        }
        (
            Reason::SplitWeights | Reason::NotStronglyConnected,
            Witness::StepMatrix { matrix, weights },
        ) => {
            let (m, w) = parse_step_witness(matrix, weights)?;
            verify_step_value(&t, &m, &w, &stored_dstar, &stored_threshold, &rho, false, trace)?;
        }
        (Reason::Twins, Witness::Twins { pair: [u, v] }) => {
            if k != 6 {
                return Err("the twin bound applies to 6-vertex tournaments".into());
            }
            if *u >= k || *v >= k || u == v {
                return Err("invalid twin pair".into());
            }
            let outside_agree = (0..k)
                .filter(|w| w != u && w != v)
                .all(|w| t.beats(*u, w) == t.beats(*v, w));
            if !outside_agree {
                return Err(format!("vertices {u} and {v} are not twins"));
            }
            trace.push(format!("twin pair ({u}, {v}) re-derived"));
            verify_self_blowup_value(&t, &stored_dstar, &stored_threshold, &rho, trace)?;
        }
        (Reason::NontrivialAutomorphism, Witness::Automorphism { permutation }) => {
            if k != 6 {
                return Err("the automorphism bound applies to 6-vertex tournaments".into());
            }
            if permutation.len() != k {
                return Err("permutation length mismatch".into());
            }
            let mut seen = vec![false; k];
            for &p in permutation {
                if p >= k || seen[p] {
                    return Err("not a permutation".into());
                }
                seen[p] = true;
            }
            if permutation.iter().enumerate().all(|(i, &p)| i == p) {
                return Err("permutation is the identity".into());
            }
            let preserves = (0..k).all(|i| {
                (0..k).all(|j| i == j || t.beats(i, j) == t.beats(permutation[i], permutation[j]))
            });
            if !preserves {
                return Err("permutation is not an automorphism".into());
            }
            trace.push("nontrivial automorphism re-checked".into());
            verify_self_blowup_value(&t, &stored_dstar, &stored_threshold, &rho, trace)?;
        }
        (reason, _) => {
            return Err(format!(
                "witness shape does not match reason {}",
                reason.as_str()
            ));
        }
    }
    Ok(())
}

fn parse_required(field: &Option<String>, name: &str) -> Result<Rat, String> {
    let raw = field.as_deref().ok_or_else(|| format!("missing {name}"))?;
    parse_rat(raw).map_err(|e| format!("{name}: {e}"))
}

fn parse_step_witness(
    matrix: &[Vec<String>],
    weights: &[String],
) -> Result<(TournamentMatrix, StochasticVector), String> {
    let entries: Result<Vec<Vec<Rat>>, String> = matrix
        .iter()
        .map(|row| {
            row.iter()
                .map(|s| parse_rat(s).map_err(|e| e.to_string()))
                .collect()
        })
        .collect();
    let m = TournamentMatrix::new(entries?).map_err(|e| e.to_string())?;
    let ws: Result<Vec<Rat>, String> = weights
        .iter()
        .map(|s| parse_rat(s).map_err(|e| e.to_string()))
        .collect();
    let w = StochasticVector::new(ws?).map_err(|e| e.to_string())?;
    Ok((m, w))
}

#[allow(clippy::too_many_arguments)]
fn verify_step_value(
    t: &Tournament,
    m: &TournamentMatrix,
    w: &StochasticVector,
    stored_dstar: &Rat,
    stored_threshold: &Rat,
    rho: &Rat,
    strict: bool,
    trace: &mut Vec<String>,
) -> Result<(), String> {
    if m.is_all_half() {
        return Err("matrix is constant 1/2".into());
    }
    if !w.is_strictly_positive() {
        return Err("weights are not strictly positive".into());
    }
    if w.len() != m.order() {
        return Err("matrix order and weight count differ".into());
    }
    let value = d_star(t, m, w).map_err(|e| e.to_string())?;
    trace.push(format!("recomputed d* = {}", format_rat(&value)));
    if &value != stored_dstar {
        return Err(format!(
            "stored d* {} != recomputed {}",
            format_rat(stored_dstar),
            format_rat(&value)
        ));
    }
    if stored_threshold != rho {
        return Err(format!("threshold must be {}", format_rat(rho)));
    }
    let ok = if strict { &value > rho } else { &value >= rho };
    if !ok {
        return Err(if strict {
            "threshold not strictly exceeded".into()
        } else {
            "d* below the random baseline".to_string()
        });
    }
    trace.push("threshold comparison re-established".into());
    Ok(())
}

fn verify_self_blowup_value(
    t: &Tournament,
    stored_dstar: &Rat,
    stored_threshold: &Rat,
    rho: &Rat,
    trace: &mut Vec<String>,
) -> Result<(), String> {
    let m = crate::stepton::blowup_matrix(t);
    let value = d_star(t, &m, &StochasticVector::uniform(6)).map_err(|e| e.to_string())?;
    trace.push(format!("recomputed d* = {}", format_rat(&value)));
    if &value != stored_dstar {
        return Err(format!(
            "stored d* {} != recomputed {}",
            format_rat(stored_dstar),
            format_rat(&value)
        ));
    }
    let bound = parse_rat("2/46656").unwrap();
    if value < bound {
        return Err("d* below the guaranteed bound 1/23328".into());
    }
    if stored_threshold != rho {
        return Err(format!("threshold must be {}", format_rat(rho)));
    }
    if &value < rho {
        return Err("d* below the random baseline".into());
    }
    trace.push("blow-up bound and baseline both re-established".into());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::h6;
    use crate::rational::rat;

    #[test]
    fn reference_table_is_consistent() {
        assert_eq!(SIX_VERTEX_REFERENCE.len(), 55);
        let named: Vec<&str> = SIX_VERTEX_REFERENCE
            .iter()
            .filter_map(|r| r.name)
            .collect();
        assert_eq!(named.len(), 14);
        for reference in &SIX_VERTEX_REFERENCE {
            let t = Tournament::parse_code(reference.code).unwrap();
            assert_eq!(t.vertex_count(), 6);
            assert!(!t.is_transitive());
            if let Some(name) = reference.name {
                let named_t = catalog::catalog(name).unwrap();
                assert_eq!(named_t.format_code(), reference.code);
            }
        }
    }

    #[test]
    fn witness_serde_round_trips() {
        let samples = vec![
            Witness::Blowup {
                host: "10,1".into(),
                copies: 55,
            },
            Witness::Param {
                matrix: "A_x".into(),
                x: "30721/100000".into(),
            },
            Witness::Split {
                matrix: vec![
                    vec!["1/2".into(), "1".into()],
                    vec!["0".into(), "1/2".into()],
                ],
                weights: vec!["1/2".into(), "1/2".into()],
                alpha: "1/2".into(),
                k1: 3,
                k2: 3,
            },
            Witness::StepMatrix {
                matrix: vec![
                    vec!["1/2".into(), "1".into()],
                    vec!["0".into(), "1/2".into()],
                ],
                weights: vec!["1/2".into(), "1/2".into()],
            },
            Witness::Twins { pair: [0, 3] },
            Witness::Automorphism {
                permutation: vec![1, 2, 0],
            },
            Witness::External {
                citation: "somewhere".into(),
            },
        ];
        for witness in samples {
            let json = serde_json::to_string(&witness).unwrap();
            let back: Witness = serde_json::from_str(&json).unwrap();
            assert_eq!(back, witness);
        }
    }

    #[test]
    fn certificate_json_schema_fields() {
        let cert = crate::stepton::blowup_witness_certificate(
            &catalog::catalog("H_5").unwrap(),
            &catalog::catalog("S_7").unwrap(),
        )
        .unwrap();
        let value: serde_json::Value = serde_json::from_str(&serde_json::to_string(&cert).unwrap()).unwrap();
        for field in ["tournament", "k", "reason", "witness", "dstar", "threshold", "notes"] {
            assert!(value.get(field).is_some(), "missing {field}");
        }
        assert_eq!(value["reason"], "blowup_witness");
        let back: Certificate = serde_json::from_value(value).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn emitted_certificates_verify() {
        let h5 = catalog::catalog("H_5").unwrap();
        let s7 = catalog::catalog("S_7").unwrap();
        let cert = crate::stepton::blowup_witness_certificate(&h5, &s7).unwrap();
        let report = verify(&cert);
        assert!(report.accepted, "{report}");
        let param = param_matrix_certificate(&h6(14), "A_x", &rat(30721, 100000)).unwrap();
        assert!(verify(&param).accepted);
        let external = external_certificate(&catalog::catalog("F_5").unwrap(), CORPS_CITATION, "x");
        assert!(verify(&external).accepted);
    }

    #[test]
    fn tampered_copy_count_rejects() {
        let h5 = catalog::catalog("H_5").unwrap();
        let s7 = catalog::catalog("S_7").unwrap();
        let mut cert = crate::stepton::blowup_witness_certificate(&h5, &s7).unwrap();
        if let Witness::Blowup { copies, .. } = &mut cert.witness {
            *copies -= 1;
        }
        cert.dstar = Some("20".into());
        let report = verify(&cert);
        assert!(!report.accepted);
        assert!(report.failure.unwrap().contains("recomputed"));
    }

    #[test]
    fn boundary_alpha_rejects() {
        let t = Tournament::parse_code("111,10,1").unwrap();
        let mut cert = split_certificate(&t).unwrap();
        assert!(verify(&cert).accepted);
        if let Witness::Split { alpha, weights, .. } = &mut cert.witness {
            *alpha = "0".into();
            weights[0] = "0".into();
            weights[1] = "1".into();
        }
        cert.dstar = Some("1/64".into());
        assert!(!verify(&cert).accepted);
    }

    #[test]
    fn csv_round_trip() {
        let classification = classify_five_vertex().unwrap();
        let csv = classification.to_csv();
        let rows = parse_csv(&csv).unwrap();
        assert_eq!(rows, classification.rows);
        assert!(parse_csv("bad header\n").is_err());
    }

    #[test]
    fn five_vertex_outline() {
        let classification = classify_five_vertex().unwrap();
        assert_eq!(classification.rows.len(), 11);
        let h5_row = classification
            .rows
            .iter()
            .find(|r| r.name.as_deref() == Some("H_5"))
            .unwrap();
        assert!(h5_row.d && !h5_row.a);
        let f5_row = classification
            .rows
            .iter()
            .find(|r| r.name.as_deref() == Some("F_5"))
            .unwrap();
        assert_eq!(f5_row.flag_count(), 0);
        let split_rows = classification.rows.iter().filter(|r| r.a).count();
        assert_eq!(split_rows, 5);
        let externals = classification
            .certificates
            .iter()
            .filter(|c| c.reason == Reason::ExternalReference)
            .count();
        assert_eq!(externals, 5);
        for cert in &classification.certificates {
            assert!(verify(cert).accepted, "{}", cert.tournament);
        }
    }
}
