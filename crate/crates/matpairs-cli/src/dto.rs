//! JSON file formats. Scalars travel as strings (`a/b` or `a/b+c/di`) so no
//! value ever passes through a float.

use std::path::Path;

use matpairs::blocks::{CongruenceStructure, Flavor, PairCanonicalStructure, Pivot, StructuredPairForm, TypeOne, TypeTwo};
use matpairs::codim::{CodimBreakdown, CodimKind, Discrepancy};
use matpairs::oracle::LinearSystemNullity;
use matpairs::pairs::EquivalenceWitness;
use matpairs::{ExactMatrix, GaussianRational, Kind};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub schema_version: String,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<String>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ExactMatrix) -> Self {
        MatrixFile {
            schema_version: SCHEMA_VERSION.into(),
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|z| z.to_string()).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ExactMatrix, CliError> {
        if self.entries.len() != self.rows * self.cols {
            return Err(CliError::Parse(format!(
                "{} entries for a {}x{} matrix",
                self.entries.len(),
                self.rows,
                self.cols
            )));
        }
        let values = self.entries.iter().map(|s| scalar(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(ExactMatrix::from_fn(self.rows, self.cols, |i, j| values[i * self.cols + j].clone()))
    }
}

pub fn scalar(s: &str) -> Result<GaussianRational, CliError> {
    s.parse().map_err(|_| CliError::Parse(format!("bad scalar {s:?}")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFile {
    pub schema_version: String,
    pub e: MatrixFile,
    pub q: MatrixFile,
}

impl PairFile {
    pub fn from_pair(e: &ExactMatrix, q: &ExactMatrix) -> Self {
        PairFile { schema_version: SCHEMA_VERSION.into(), e: MatrixFile::from_matrix(e), q: MatrixFile::from_matrix(q) }
    }

    pub fn to_pair(&self) -> Result<(ExactMatrix, ExactMatrix), CliError> {
        Ok((self.e.to_matrix()?, self.q.to_matrix()?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum KindTag {
    T,
    Star,
}

impl From<KindTag> for Kind {
    fn from(k: KindTag) -> Kind {
        match k {
            KindTag::T => Kind::T,
            KindTag::Star => Kind::Star,
        }
    }
}

impl From<Kind> for KindTag {
    fn from(k: Kind) -> KindTag {
        match k {
            Kind::T => KindTag::T,
            Kind::Star => KindTag::Star,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PivotTag {
    ENonsingular,
    QNonsingular,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeOneDto {
    pub size: usize,
    pub alpha: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeTwoDto {
    pub half: usize,
    pub mu: String,
}

/// A congruence structure, optionally with the pivot of a pair. Summands are
/// written normalized and sorted, so equal structures serialize identically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFile {
    pub schema_version: String,
    pub kind: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot: Option<PivotTag>,
    #[serde(default)]
    pub type0: Vec<usize>,
    #[serde(default)]
    pub type1: Vec<TypeOneDto>,
    #[serde(default)]
    pub type2: Vec<TypeTwoDto>,
}

impl StructureFile {
    pub fn from_structure(s: &CongruenceStructure, pivot: Option<Pivot>) -> Result<Self, CliError> {
        let s = s.normalize().map_err(|e| CliError::Inconsistent(e.to_string()))?;
        Ok(StructureFile {
            schema_version: SCHEMA_VERSION.into(),
            kind: s.kind.into(),
            pivot: pivot.map(|p| match p {
                Pivot::ENonsingular => PivotTag::ENonsingular,
                Pivot::QNonsingular => PivotTag::QNonsingular,
            }),
            type0: s.type0.clone(),
            type1: s.type1.iter().map(|t| TypeOneDto { size: t.size, alpha: t.alpha.to_string() }).collect(),
            type2: s.type2.iter().map(|t| TypeTwoDto { half: t.half, mu: t.mu.to_string() }).collect(),
        })
    }

    pub fn from_pair_structure(p: &PairCanonicalStructure) -> Result<Self, CliError> {
        Self::from_structure(&p.structure, Some(p.pivot))
    }

    pub fn to_structure(&self) -> Result<CongruenceStructure, CliError> {
        let mut s = CongruenceStructure::new(self.kind.into());
        s.type0 = self.type0.clone();
        for t in &self.type1 {
            s.type1.push(TypeOne { size: t.size, alpha: scalar(&t.alpha)? });
        }
        for t in &self.type2 {
            s.type2.push(TypeTwo { half: t.half, mu: scalar(&t.mu)? });
        }
        s.normalize().map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn pivot(&self) -> Option<Pivot> {
        self.pivot.map(|p| match p {
            PivotTag::ENonsingular => Pivot::ENonsingular,
            PivotTag::QNonsingular => Pivot::QNonsingular,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FlavorTag {
    Sym,
    SkewSym,
    Herm,
    SkewHerm,
}

impl From<FlavorTag> for Flavor {
    fn from(f: FlavorTag) -> Flavor {
        match f {
            FlavorTag::Sym => Flavor::SymT,
            FlavorTag::SkewSym => Flavor::SkewSymT,
            FlavorTag::Herm => Flavor::HermStar,
            FlavorTag::SkewHerm => Flavor::SkewHermStar,
        }
    }
}

impl From<Flavor> for FlavorTag {
    fn from(f: Flavor) -> FlavorTag {
        match f {
            Flavor::SymT => FlavorTag::Sym,
            Flavor::SkewSymT => FlavorTag::SkewSym,
            Flavor::HermStar => FlavorTag::Herm,
            Flavor::SkewHermStar => FlavorTag::SkewHerm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredFormDto {
    pub schema_version: String,
    pub flavor: FlavorTag,
    pub n_plus: usize,
    pub n_minus: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub psd: bool,
}

impl StructuredFormDto {
    pub fn from_form(f: &StructuredPairForm) -> Self {
        StructuredFormDto {
            schema_version: SCHEMA_VERSION.into(),
            flavor: f.flavor.into(),
            n_plus: f.n_plus,
            n_minus: f.n_minus,
            a: f.a,
            b: f.b,
            c: f.c,
            d: f.d,
            psd: f.is_psd(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub schema_version: String,
    pub kind: KindTag,
    pub u: MatrixFile,
    pub v: MatrixFile,
    pub v_unitary: bool,
}

impl WitnessFile {
    pub fn from_witness(w: &EquivalenceWitness) -> Self {
        WitnessFile {
            schema_version: SCHEMA_VERSION.into(),
            kind: w.kind.into(),
            u: MatrixFile::from_matrix(&w.u),
            v: MatrixFile::from_matrix(&w.v),
            v_unitary: w.v_unitary,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodimDto {
    pub kind: String,
    pub profile: String,
    pub c0: usize,
    pub c1: usize,
    pub c2: usize,
    pub c00: usize,
    pub c11: usize,
    pub c22: usize,
    pub c01: usize,
    pub c02: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c12: Option<usize>,
    pub total: usize,
    /// Real dimension for Star kinds, complex dimension for T kinds.
    pub dimension: String,
}

impl CodimDto {
    pub fn from_breakdown(b: &CodimBreakdown) -> Self {
        let (kind, real) = match b.kind {
            CodimKind::CongT => ("cong-t", false),
            CodimKind::CongStar => ("cong-star", true),
            CodimKind::PairT => ("pair-t", false),
            CodimKind::PairStar => ("pair-star", true),
        };
        CodimDto {
            kind: kind.into(),
            profile: b.profile.name().into(),
            c0: b.c0,
            c1: b.c1,
            c2: b.c2,
            c00: b.c00,
            c11: b.c11,
            c22: b.c22,
            c01: b.c01,
            c02: b.c02,
            c12: b.c12,
            total: b.total,
            dimension: if real { "real" } else { "complex" }.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscrepancyDto {
    pub structure: StructureFile,
    pub formula: CodimDto,
    pub oracle: usize,
    pub differing: Vec<String>,
}

impl DiscrepancyDto {
    pub fn new(d: &Discrepancy, reference: &CodimBreakdown) -> Result<Self, CliError> {
        Ok(DiscrepancyDto {
            structure: StructureFile::from_structure(&d.structure, d.pivot)?,
            formula: CodimDto::from_breakdown(&d.formula),
            oracle: d.oracle,
            differing: d.formula.differing_components(reference).into_iter().map(String::from).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullityDto {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complex_dim: Option<usize>,
    pub real_dim: usize,
    pub unknown_shapes: Vec<(usize, usize)>,
}

impl From<&LinearSystemNullity> for NullityDto {
    fn from(n: &LinearSystemNullity) -> Self {
        NullityDto { complex_dim: n.complex_dim, real_dim: n.real_dim, unknown_shapes: n.unknown_shapes.clone() }
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = to_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn to_pretty<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Inconsistent(format!("serialization: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = ExactMatrix::from_rows(vec![
            vec![GaussianRational::from_fracs(1, 2, -3, 4), GaussianRational::int(0)],
            vec![GaussianRational::i(), GaussianRational::int(-7)],
        ]);
        let f = MatrixFile::from_matrix(&m);
        assert_eq!(f.entries, ["1/2-3/4i", "0/1", "0/1+1/1i", "-7/1"]);
        let text = serde_json::to_string(&f).unwrap();
        let back: MatrixFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
    }

    #[test]
    fn short_entry_list_is_a_parse_error() {
        let f = MatrixFile { schema_version: "1".into(), rows: 2, cols: 2, entries: vec!["1".into()] };
        assert!(matches!(f.to_matrix(), Err(CliError::Parse(_))));
    }

    #[test]
    fn structure_serializes_normalized() {
        let s = CongruenceStructure::new(Kind::T).with_type0(1).with_h(1, GaussianRational::from_fracs(1, 2, 0, 1)).with_type0(3);
        let f = StructureFile::from_structure(&s, None).unwrap();
        assert_eq!(f.type0, [3, 1]);
        assert_eq!(f.type2[0].mu, "2/1");
        assert_eq!(f.to_structure().unwrap(), s.normalize().unwrap());
    }
}
