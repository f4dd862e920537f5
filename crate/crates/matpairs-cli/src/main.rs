//! `matpairs`: canonical forms, codimensions and oracle nullities from JSON files.
//!
//! Exit codes: 0 success, 1 mathematical refusal, 2 I/O or parse error,
//! 3 internal inconsistency. Errors are reported as JSON on stderr.

mod dto;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use matpairs::blocks::{build_block, BlockError, BlockKind, PairCanonicalStructure};
use matpairs::codim::{check_congruence, check_pair, codim_congruence, codim_pair, enumerate_structures, CodimError, Profile};
use matpairs::congruence::{congruence_structure, CongruenceError, EigenBackend, DEFAULT_TAU};
use matpairs::oracle::{interaction_nullity, nullity_congruence_system, nullity_pair_system, OracleError};
use matpairs::pairs::{check_equivalence, is_lagrangian, pair_canonical, structured_pair_canonical, PairError};
use matpairs::{ExactMatrix, GaussianRational, Kind};
use serde::Serialize;

use dto::{
    read_json, to_pretty, write_json, CodimDto, DiscrepancyDto, FlavorTag, KindTag, MatrixFile, NullityDto, PairFile,
    StructureFile, StructuredFormDto, WitnessFile,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Refusal(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Inconsistent(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Refusal(_) => 1,
            CliError::Io(_) | CliError::Parse(_) => 2,
            CliError::Inconsistent(_) => 3,
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            CliError::Refusal(_) => "refusal",
            CliError::Io(_) => "io",
            CliError::Parse(_) => "parse",
            CliError::Inconsistent(_) => "inconsistency",
        }
    }
}

impl From<PairError> for CliError {
    fn from(e: PairError) -> Self {
        match e {
            PairError::Shape(..) => CliError::Parse(e.to_string()),
            PairError::Congruence(c) => c.into(),
            PairError::Block(b) => b.into(),
            PairError::Inconsistent(_) => CliError::Inconsistent(e.to_string()),
            _ => CliError::Refusal(e.to_string()),
        }
    }
}

impl From<CongruenceError> for CliError {
    fn from(e: CongruenceError) -> Self {
        match e {
            CongruenceError::NotSquare(..) => CliError::Parse(e.to_string()),
            CongruenceError::StructureInconsistent(_) => CliError::Inconsistent(e.to_string()),
            _ => CliError::Refusal(e.to_string()),
        }
    }
}

impl From<BlockError> for CliError {
    fn from(e: BlockError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::ShapeMismatch(_) => CliError::Parse(e.to_string()),
            OracleError::DeskScaleExceeded(_) => CliError::Refusal(e.to_string()),
        }
    }
}

impl From<CodimError> for CliError {
    fn from(e: CodimError) -> Self {
        match e {
            CodimError::BadStructure(_) => CliError::Parse(e.to_string()),
            CodimError::UnsupportedPair(..) => CliError::Refusal(e.to_string()),
            CodimError::Oracle(o) => o.into(),
        }
    }
}

#[derive(Parser)]
#[command(name = "matpairs", version, about = "Canonical forms and orbit codimensions of matrix pairs under T- and *-equivalence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendTag {
    /// Exact roots in Q(i), falling back to double precision when they do not exhaust the spectrum
    Exact,
    /// Double-precision eigenvalues clustered with relative gap --tau
    Float,
}

#[derive(clap::Args)]
struct BackendArgs {
    #[arg(long, value_enum, default_value = "exact")]
    backend: BackendTag,
    /// Relative clustering gap of the float backend
    #[arg(long, default_value_t = DEFAULT_TAU)]
    tau: f64,
}

impl BackendArgs {
    fn backend(&self) -> EigenBackend {
        match self.backend {
            BackendTag::Exact => EigenBackend::ExactCandidates,
            BackendTag::Float => EigenBackend::Float { tau: self.tau },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BlockTag {
    J,
    Gamma,
    Delta,
    H,
    F,
    G,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileTag {
    AsPrinted,
    Reconciled,
}

impl From<ProfileTag> for Profile {
    fn from(p: ProfileTag) -> Profile {
        match p {
            ProfileTag::AsPrinted => Profile::AsPrinted,
            ProfileTag::Reconciled => Profile::Reconciled,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit one canonical block as a matrix file
    Block {
        #[arg(long = "type", value_enum)]
        block: BlockTag,
        /// Block size; H blocks have dimension 2*size, F and G are size x (size+1)
        #[arg(long)]
        size: usize,
        /// Eigenvalue of J, alpha of Delta or mu of H, e.g. "2", "1/2+3/4i"
        #[arg(long, allow_hyphen_values = true)]
        param: Option<String>,
    },
    /// Congruence canonical structure of a square matrix
    CongruenceStructure {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum)]
        kind: KindTag,
        #[command(flatten)]
        backend: BackendArgs,
    },
    /// Canonical form of a pair: the product structure when E or Q is
    /// nonsingular, otherwise the structured form
    PairCanonical {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, value_enum)]
        kind: KindTag,
        /// Use the structured path even when one member is nonsingular
        #[arg(long)]
        structured: bool,
        /// Required product flavor for the structured path (autodetected if absent)
        #[arg(long, value_enum)]
        flavor: Option<FlavorTag>,
        /// Write the exact equivalence witness (U, V) to this file; implies --structured
        #[arg(long)]
        witness: Option<PathBuf>,
        #[command(flatten)]
        backend: BackendArgs,
    },
    /// Orbit codimension from a structure file, a pair file, or an enumeration
    Codim {
        /// Structure file; with a pivot it is read as a pair structure
        #[arg(long, conflicts_with_all = ["pair", "enumerate"])]
        structure: Option<PathBuf>,
        #[arg(long, conflicts_with = "enumerate")]
        pair: Option<PathBuf>,
        /// Check every structure up to this size against the oracle and print the discrepancy report
        #[arg(long)]
        enumerate: Option<usize>,
        /// Required with --pair and --enumerate
        #[arg(long, value_enum)]
        kind: Option<KindTag>,
        #[arg(long, value_enum, default_value = "reconciled")]
        profile: ProfileTag,
        /// Compare with the oracle nullity; a mismatch under the reconciled profile exits with 3
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        backend: BackendArgs,
    },
    /// Nullity of the matrix equations behind a codimension
    Oracle {
        /// Pair system XE + EY = 0, -adj(X)Q + QY = 0
        #[arg(long, conflicts_with_all = ["congruence", "interaction"])]
        pair: Option<PathBuf>,
        /// Congruence system XM + M adj(X) = 0
        #[arg(long, conflicts_with = "interaction")]
        congruence: Option<PathBuf>,
        /// Interaction system of two square matrices M and N
        #[arg(long, num_args = 2, value_names = ["M", "N"])]
        interaction: Option<Vec<PathBuf>>,
        #[arg(long, value_enum)]
        kind: KindTag,
    },
    /// Whether two pairs lie in the same orbit
    Equiv {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        other: PathBuf,
        #[arg(long, value_enum)]
        kind: KindTag,
        #[command(flatten)]
        backend: BackendArgs,
    },
    /// Whether the columns of [E; Q] span a Lagrangian subspace
    Lagrangian {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, value_enum)]
        kind: KindTag,
    },
    /// Seeded plant-and-recover run; exits with 3 if any trial mismatches
    Fuzz {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 6)]
        max_dim: usize,
        #[arg(long, value_enum)]
        kind: KindTag,
        /// Plant structured pairs of this flavor instead of product structures
        #[arg(long, value_enum)]
        flavor: Option<FlavorTag>,
        /// Bound on numerators and denominators of the random transformations
        #[arg(long, default_value_t = 3)]
        bound: i64,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct Verdict {
    value: bool,
}

#[derive(Serialize)]
struct VerifiedCodim {
    codim: CodimDto,
    oracle: usize,
    agrees: bool,
}

#[derive(Serialize)]
struct EnumerationReport {
    kind: KindTag,
    profile: String,
    max_dim: usize,
    mus: Vec<String>,
    alphas: Vec<String>,
    checked: usize,
    discrepancies: Vec<DiscrepancyDto>,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
    exit_code: u8,
}

fn print<T: Serialize>(value: &T) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", to_pretty(value)?) {
        // a closed reader (`| head`) is not our failure
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn matrix(path: &PathBuf) -> Result<ExactMatrix, CliError> {
    read_json::<MatrixFile>(path)?.to_matrix()
}

fn pair(path: &PathBuf) -> Result<(ExactMatrix, ExactMatrix), CliError> {
    read_json::<PairFile>(path)?.to_pair()
}

fn need_kind(kind: Option<KindTag>) -> Result<Kind, CliError> {
    kind.map(Kind::from).ok_or_else(|| CliError::Parse("--kind is required here".into()))
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Block { block, size, param } => {
            let param = param.as_deref().map(dto::scalar).transpose()?;
            let kind = match block {
                BlockTag::J => BlockKind::J,
                BlockTag::Gamma => BlockKind::Gamma,
                BlockTag::Delta => BlockKind::Delta,
                BlockTag::H => BlockKind::H,
                BlockTag::F => BlockKind::F,
                BlockTag::G => BlockKind::G,
            };
            print(&MatrixFile::from_matrix(&build_block(kind, size, param.as_ref())?))?;
        }
        Command::CongruenceStructure { matrix: path, kind, backend } => {
            let s = congruence_structure(&matrix(&path)?, kind.into(), backend.backend())?;
            print(&StructureFile::from_structure(&s, None)?)?;
        }
        Command::PairCanonical { pair: path, kind, structured, flavor, witness, backend } => {
            let (e, q) = pair(&path)?;
            let kind = Kind::from(kind);
            let one_sided = matpairs::exactmat::is_nonsingular(&e) || matpairs::exactmat::is_nonsingular(&q);
            if one_sided && !structured && flavor.is_none() && witness.is_none() {
                print(&StructureFile::from_pair_structure(&pair_canonical(&e, &q, kind, backend.backend())?)?)?;
                return Ok(0);
            }
            let got = structured_pair_canonical(&e, &q, kind, flavor.map(Into::into))?;
            print(&StructuredFormDto::from_form(&got.form))?;
            if let Some(out) = witness {
                match got.witness {
                    Some(w) => write_json(&out, &WitnessFile::from_witness(&w))?,
                    None => {
                        let note = got.witness_note.unwrap_or_default();
                        return Err(CliError::Refusal(format!("no witness over Q(i): {note}")));
                    }
                }
            }
        }
        Command::Codim { structure, pair: pair_path, enumerate, kind, profile, verify, backend } => {
            let profile = Profile::from(profile);
            if let Some(max_dim) = enumerate {
                return enumeration(need_kind(kind)?, max_dim, profile);
            }
            let (breakdown, oracle) = if let Some(path) = structure {
                let file: StructureFile = read_json(&path)?;
                let s = file.to_structure()?;
                match file.pivot() {
                    Some(pivot) => {
                        let p = PairCanonicalStructure { pivot, structure: s };
                        let b = codim_pair(&p, profile)?;
                        let d = if verify { Some(check_pair(&p, profile)?.map_or(b.total, |d| d.oracle)) } else { None };
                        (b, d)
                    }
                    None => {
                        let b = codim_congruence(&s, profile)?;
                        let d = if verify { Some(check_congruence(&s, profile)?.map_or(b.total, |d| d.oracle)) } else { None };
                        (b, d)
                    }
                }
            } else if let Some(path) = pair_path {
                let kind = need_kind(kind)?;
                let (e, q) = pair(&path)?;
                let p = pair_canonical(&e, &q, kind, backend.backend())?;
                let b = codim_pair(&p, profile)?;
                // verify against the input pair itself, not the realized canonical one
                let d = if verify {
                    let n = nullity_pair_system(&e, &q, kind)?;
                    Some(n.complex_dim.unwrap_or(n.real_dim))
                } else {
                    None
                };
                (b, d)
            } else {
                return Err(CliError::Parse("codim needs --structure, --pair or --enumerate".into()));
            };
            match oracle {
                None => print(&CodimDto::from_breakdown(&breakdown))?,
                Some(o) => {
                    let agrees = o == breakdown.total;
                    print(&VerifiedCodim { codim: CodimDto::from_breakdown(&breakdown), oracle: o, agrees })?;
                    if !agrees && profile == Profile::Reconciled {
                        return Err(CliError::Inconsistent(format!("formula gives {} but the oracle gives {o}", breakdown.total)));
                    }
                }
            }
        }
        Command::Oracle { pair: pair_path, congruence, interaction, kind } => {
            let kind = Kind::from(kind);
            let n = if let Some(path) = pair_path {
                let (e, q) = pair(&path)?;
                nullity_pair_system(&e, &q, kind)?
            } else if let Some(path) = congruence {
                nullity_congruence_system(&matrix(&path)?, kind)?
            } else if let Some(paths) = interaction {
                interaction_nullity(&matrix(&paths[0])?, &matrix(&paths[1])?, kind)?
            } else {
                return Err(CliError::Parse("oracle needs --pair, --congruence or --interaction".into()));
            };
            print(&NullityDto::from(&n))?;
        }
        Command::Equiv { pair: a, other: b, kind, backend } => {
            let (e, q) = pair(&a)?;
            let (e1, q1) = pair(&b)?;
            print(&Verdict { value: check_equivalence(&e, &q, &e1, &q1, kind.into(), backend.backend())? })?;
        }
        Command::Lagrangian { pair: path, kind } => {
            let (e, q) = pair(&path)?;
            if !e.is_square() || e.shape() != q.shape() {
                return Err(CliError::Parse(format!("pair members must be square of equal size, got {:?} and {:?}", e.shape(), q.shape())));
            }
            print(&Verdict { value: is_lagrangian(&e, &q, kind.into()) })?;
        }
        Command::Fuzz { seed, trials, max_dim, kind, flavor, bound, out } => {
            let cfg = report::FuzzConfig { seed, trials, max_dim, bound: bound.max(1), kind: kind.into(), flavor: flavor.map(Into::into) };
            let r = report::run(&cfg)?;
            match out {
                Some(path) => write_json(&path, &r)?,
                None => print(&r)?,
            }
            if !r.mismatches.is_empty() {
                return Err(CliError::Inconsistent(format!("{} of {} trials did not recover the plant", r.mismatches.len(), r.trials)));
            }
        }
    }
    Ok(0)
}

fn enumeration(kind: Kind, max_dim: usize, profile: Profile) -> Result<u8, CliError> {
    let g = |s: &str| s.parse::<GaussianRational>().expect("literal scalar");
    let (mus, alphas): (Vec<GaussianRational>, Vec<GaussianRational>) = match kind {
        Kind::T => (["2", "3", "-1", "i"].map(g).to_vec(), Vec::new()),
        Kind::Star => (["2", "3i"].map(g).to_vec(), ["1", "-1", "i", "-i"].map(g).to_vec()),
    };
    let mut checked = 0;
    let mut discrepancies = Vec::new();
    for s in enumerate_structures(kind, max_dim, &mus, &alphas) {
        checked += 1;
        if let Some(d) = check_congruence(&s, profile)? {
            let reference = codim_congruence(&s, other(profile))?;
            discrepancies.push(DiscrepancyDto::new(&d, &reference)?);
        }
        for pivot in [matpairs::blocks::Pivot::ENonsingular, matpairs::blocks::Pivot::QNonsingular] {
            let p = PairCanonicalStructure { pivot, structure: s.clone() };
            if let Some(d) = check_pair(&p, profile)? {
                let reference = codim_pair(&p, other(profile))?;
                discrepancies.push(DiscrepancyDto::new(&d, &reference)?);
            }
        }
    }
    let failed = !discrepancies.is_empty() && profile == Profile::Reconciled;
    print(&EnumerationReport {
        kind: kind.into(),
        profile: profile.name().into(),
        max_dim,
        mus: mus.iter().map(ToString::to_string).collect(),
        alphas: alphas.iter().map(ToString::to_string).collect(),
        checked,
        discrepancies,
    })?;
    if failed {
        return Err(CliError::Inconsistent("the reconciled profile disagrees with the oracle".into()));
    }
    Ok(0)
}

fn other(p: Profile) -> Profile {
    match p {
        Profile::AsPrinted => Profile::Reconciled,
        Profile::Reconciled => Profile::AsPrinted,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help and version are successes; everything else is a usage error
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            let report = ErrorReport { error: err.tag(), message: err.to_string(), exit_code: err.code() };
            eprintln!("{}", serde_json::to_string(&report).unwrap_or_else(|_| err.to_string()));
            ExitCode::from(err.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_map_to_exit_codes() {
        assert_eq!(CliError::from(PairError::BothSingular).code(), 1);
        assert_eq!(CliError::from(PairError::Shape((2, 2), (3, 3))).code(), 2);
        assert_eq!(CliError::from(PairError::Inconsistent("x".into())).code(), 3);
        assert_eq!(CliError::Inconsistent("x".into()).tag(), "inconsistency");
    }
}
