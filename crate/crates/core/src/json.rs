//! JSON documents, schema `crystal-lab/1`.
//!
//! Series are arrays of decimal strings (coefficients of `t^0, t^1, ...`,
//! trailing zeros dropped); matrices are arrays of rows of series. Every
//! document carries `schema`, `kind` and `context = {p, N, M}`.

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::crystal::{FCrystalPresentation, SlopeMultiset};
use crate::error::{Error, Result};
use crate::extension_group::{ExtensionContext, ExtensionData, TrivializationWitness};
use crate::matrix::SeriesMatrix;
use crate::moduli::{DeformationPoint, ProbeReport};
use crate::padic_series::{PrecisionContext, TruncatedSeries};

pub const SCHEMA: &str = "crystal-lab/1";

pub type SeriesDoc = Vec<String>;
pub type MatrixDoc = Vec<Vec<SeriesDoc>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextDoc {
    pub p: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    #[serde(rename = "M")]
    pub truncation: usize,
}

impl ContextDoc {
    pub fn from_context(ctx: PrecisionContext) -> Self {
        Self {
            p: ctx.p(),
            precision: ctx.precision(),
            truncation: ctx.truncation(),
        }
    }

    pub fn to_context(self) -> Result<PrecisionContext> {
        PrecisionContext::new(self.p, self.precision, self.truncation)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalDoc {
    pub schema: String,
    pub kind: String,
    pub context: ContextDoc,
    pub rank: usize,
    pub weight: u32,
    pub frobenius: MatrixDoc,
    pub connection: MatrixDoc,
    pub pairing: MatrixDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionBody {
    pub geometric: bool,
    pub xi: MatrixDoc,
    pub v: MatrixDoc,
    pub m: MatrixDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionDoc {
    pub schema: String,
    pub kind: String,
    pub context: ContextDoc,
    pub h: usize,
    #[serde(flatten)]
    pub body: ExtensionBody,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDoc {
    pub schema: String,
    pub kind: String,
    pub context: ContextDoc,
    pub h: usize,
    pub alpha: MatrixDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDoc {
    pub schema: String,
    pub kind: String,
    pub context: ContextDoc,
    pub h: usize,
    pub n: usize,
    pub extension: ExtensionBody,
    pub hodge: Vec<SeriesDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleDoc {
    pub sample: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeDoc {
    pub schema: String,
    pub kind: String,
    pub context: ContextDoc,
    pub h: usize,
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    #[serde(rename = "nontrivial_pY")]
    pub nontrivial_py: usize,
    pub torsion_certified: usize,
    pub inconclusive: usize,
    pub counterexamples: Vec<CounterexampleDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopesDoc {
    pub schema: String,
    pub kind: String,
    pub context: ContextDoc,
    /// `[slope, multiplicity]` pairs, slopes as `"a/b"` strings.
    pub slopes: Vec<(String, usize)>,
}

pub fn series_doc(s: &TruncatedSeries) -> SeriesDoc {
    let r = s.residues();
    let len = r.iter().rposition(|c| *c != 0).map_or(0, |i| i + 1);
    r[..len].iter().map(|c| c.to_string()).collect()
}

pub fn parse_series(ctx: PrecisionContext, doc: &SeriesDoc) -> Result<TruncatedSeries> {
    if doc.len() > ctx.len() {
        return Err(Error::Parse(format!(
            "series has {} coefficients, truncation allows {}",
            doc.len(),
            ctx.len()
        )));
    }
    let coeffs = doc
        .iter()
        .map(|c| {
            c.trim()
                .parse::<i128>()
                .map_err(|_| Error::Parse(format!("coefficient {c:?} is not a decimal integer")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncatedSeries::from_coeffs(ctx, &coeffs))
}

pub fn matrix_doc(m: &SeriesMatrix) -> MatrixDoc {
    m.row_vecs()
        .iter()
        .map(|row| row.iter().map(series_doc).collect())
        .collect()
}

pub fn parse_matrix(ctx: PrecisionContext, doc: &MatrixDoc, rows: usize, cols: usize, name: &str) -> Result<SeriesMatrix> {
    if doc.len() != rows || doc.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse(format!("{name} must be {rows}x{cols}")));
    }
    let rows = doc
        .iter()
        .map(|r| r.iter().map(|s| parse_series(ctx, s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    SeriesMatrix::from_rows(ctx, rows)
}

fn header(schema: &str, kind: &str, want: &str) -> Result<()> {
    if schema != SCHEMA {
        return Err(Error::Parse(format!("schema {schema:?} is not {SCHEMA:?}")));
    }
    if kind != want {
        return Err(Error::Parse(format!("document kind {kind:?}, expected {want:?}")));
    }
    Ok(())
}

pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Compact form, for data documents.
pub fn to_string<T: Serialize>(doc: &T) -> String {
    serde_json::to_string(doc).expect("documents serialize")
}

/// Indented form, for reports.
pub fn to_string_pretty<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

/// The `kind` field of a document, if present.
pub fn document_kind(text: &str) -> Result<String> {
    let v: serde_json::Value = from_str(text)?;
    v.get("kind")
        .and_then(|k| k.as_str())
        .map(str::to_owned)
        .ok_or_else(|| Error::Parse("document has no \"kind\"".into()))
}

pub fn crystal_doc(c: &FCrystalPresentation) -> CrystalDoc {
    CrystalDoc {
        schema: SCHEMA.into(),
        kind: "crystal".into(),
        context: ContextDoc::from_context(c.context()),
        rank: c.rank(),
        weight: c.weight(),
        frobenius: matrix_doc(c.frobenius()),
        connection: matrix_doc(c.connection()),
        pairing: matrix_doc(c.pairing()),
    }
}

pub fn parse_crystal(doc: &CrystalDoc) -> Result<FCrystalPresentation> {
    header(&doc.schema, &doc.kind, "crystal")?;
    let ctx = doc.context.to_context()?;
    let r = doc.rank;
    FCrystalPresentation::new(
        parse_matrix(ctx, &doc.frobenius, r, r, "frobenius")?,
        parse_matrix(ctx, &doc.connection, r, r, "connection")?,
        parse_matrix(ctx, &doc.pairing, r, r, "pairing")?,
        doc.weight,
    )
}

fn extension_body(e: &ExtensionData) -> ExtensionBody {
    ExtensionBody {
        geometric: e.is_geometric(),
        xi: matrix_doc(e.xi()),
        v: matrix_doc(e.v()),
        m: matrix_doc(e.m()),
    }
}

fn parse_extension_body(ctx: PrecisionContext, h: usize, body: &ExtensionBody) -> Result<ExtensionData> {
    ExtensionData::new(
        parse_matrix(ctx, &body.xi, h, h, "xi")?,
        parse_matrix(ctx, &body.v, h, h, "v")?,
        parse_matrix(ctx, &body.m, h, h, "m")?,
        body.geometric,
    )
}

pub fn extension_doc(e: &ExtensionData) -> ExtensionDoc {
    ExtensionDoc {
        schema: SCHEMA.into(),
        kind: "extension".into(),
        context: ContextDoc::from_context(e.context()),
        h: e.height(),
        body: extension_body(e),
    }
}

pub fn parse_extension(doc: &ExtensionDoc) -> Result<ExtensionData> {
    header(&doc.schema, &doc.kind, "extension")?;
    let ctx = doc.context.to_context()?;
    ExtensionContext::new(ctx, doc.h)?;
    parse_extension_body(ctx, doc.h, &doc.body)
}

pub fn witness_doc(w: &TrivializationWitness) -> WitnessDoc {
    WitnessDoc {
        schema: SCHEMA.into(),
        kind: "witness".into(),
        context: ContextDoc::from_context(w.context()),
        h: w.height(),
        alpha: matrix_doc(w.alpha()),
    }
}

pub fn parse_witness(doc: &WitnessDoc) -> Result<TrivializationWitness> {
    header(&doc.schema, &doc.kind, "witness")?;
    let ctx = doc.context.to_context()?;
    ExtensionContext::new(ctx, doc.h)?;
    TrivializationWitness::new(parse_matrix(ctx, &doc.alpha, doc.h, doc.h, "alpha")?)
}

pub fn point_doc(y: &DeformationPoint) -> PointDoc {
    PointDoc {
        schema: SCHEMA.into(),
        kind: "point".into(),
        context: ContextDoc::from_context(y.context()),
        h: y.height(),
        n: y.base_degree(),
        extension: extension_body(y.extension()),
        hodge: y.hodge().iter().map(series_doc).collect(),
    }
}

pub fn parse_point(doc: &PointDoc) -> Result<DeformationPoint> {
    header(&doc.schema, &doc.kind, "point")?;
    let ctx = doc.context.to_context()?;
    if doc.n == 0 || ctx.truncation() != doc.n - 1 {
        return Err(Error::Parse(format!("context M = {} does not match n = {}", ctx.truncation(), doc.n)));
    }
    let ectx = ExtensionContext::new(ctx, doc.h)?;
    if doc.hodge.len() != doc.h {
        return Err(Error::Parse(format!("hodge must have {} entries", doc.h)));
    }
    let hodge = doc
        .hodge
        .iter()
        .map(|s| parse_series(ctx, s))
        .collect::<Result<Vec<_>>>()?;
    DeformationPoint::new(&ectx, doc.n, parse_extension_body(ctx, doc.h, &doc.extension)?, hodge)
}

pub fn probe_doc(ectx: &ExtensionContext, n: usize, r: &ProbeReport) -> ProbeDoc {
    ProbeDoc {
        schema: SCHEMA.into(),
        kind: "probe".into(),
        context: ContextDoc::from_context(ectx.context().with_truncation(n.saturating_sub(1))),
        h: ectx.height(),
        n,
        seed: r.seed,
        samples: r.samples,
        nontrivial_py: r.nontrivial_py,
        torsion_certified: r.torsion_certified,
        inconclusive: r.inconclusive,
        counterexamples: r
            .counterexamples
            .iter()
            .map(|c| CounterexampleDoc {
                sample: c.sample,
                reason: c.reason.clone(),
            })
            .collect(),
    }
}

pub fn slopes_doc(ctx: PrecisionContext, s: &SlopeMultiset) -> SlopesDoc {
    SlopesDoc {
        schema: SCHEMA.into(),
        kind: "slopes".into(),
        context: ContextDoc::from_context(ctx),
        slopes: s
            .entries()
            .iter()
            .map(|(q, m)| (q.to_string(), *m))
            .collect(),
    }
}
