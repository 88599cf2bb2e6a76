//! The `evss` command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage, 3 parse, 4 capacity,
//! 5 verification failure (including an attack demo that does not recover
//! the secret).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::rngs::OsRng;
use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::evolving::{bundle_size_bits, reconstruct, size_for, Dealer, SizeReport};
use crate::flawed::{exhaustive_attack, two_party_attack, FlawedDealer};
use crate::format::{write_atomic, ShareFile};
use crate::generations::GenerationLayout;
use crate::gf_base::{BaseElem, MAX_ELL};
use crate::secrecy_lab::{
    audit_evolving, audit_evolving_sets, audit_inf_default, audit_static, audit_static_with_odd_points, AuditMode,
    AuditReport, EvolvingScheme,
};
use crate::static3::StaticParams;

#[derive(Debug, Parser)]
#[command(name = "evss", version, about = "Evolving 3-threshold secret sharing over GF(2^l)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Deal shares for the listed participants and write one file each.
    Split(SplitArgs),
    /// Recover the secret from three share files.
    Join {
        #[arg(num_args = 3, required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
    },
    /// Describe a share file.
    Info { file: PathBuf },
    /// Tabulate share sizes.
    Sizes(SizesArgs),
    /// Run a perfect-secrecy audit.
    Audit(AuditArgs),
    /// Run the two-participant attack on the flawed scheme.
    AttackDemo(AttackArgs),
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long, default_value_t = 8)]
    pub ell: u32,
    /// Secret as exactly ⌈l/4⌉ hex digits.
    #[arg(long)]
    pub secret: String,
    /// Participants: comma-separated indices and ranges, e.g. `1,17..20`.
    #[arg(long)]
    pub t: String,
    #[arg(long, default_value = "paper")]
    pub layout: GenerationLayout,
    /// 64 hex digits seeding ChaCha20; without it the OS entropy source is used.
    #[arg(long)]
    pub seed: Option<String>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SizesArgs {
    #[arg(long, default_value_t = 8)]
    pub ell: u32,
    #[arg(long, default_value = "1,2,3,16,17,65536,65537")]
    pub t: String,
    #[arg(long, default_value = "paper")]
    pub layout: GenerationLayout,
    #[arg(long)]
    pub csv: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AuditTarget {
    /// The conventional scheme with even evaluation points.
    Static,
    /// The conventional scheme also issuing shares at odd points.
    StaticOdd,
    /// The revised evolving scheme on a toy layout.
    Evolving,
    /// The flawed evolving scheme on a toy layout.
    Flawed,
    /// Correctness of the default inter-generation scheme.
    Inf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Auto,
    Exhaustive,
    Linear,
}

impl From<ModeArg> for AuditMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Auto => AuditMode::Auto,
            ModeArg::Exhaustive => AuditMode::Exhaustive,
            ModeArg::Linear => AuditMode::Linear,
        }
    }
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long, value_enum, default_value_t = AuditTarget::Static)]
    pub scheme: AuditTarget,
    #[arg(long, default_value_t = 1)]
    pub ell: u32,
    /// Extension degree for the static audits.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Toy layout for the evolving audits.
    #[arg(long, default_value = "toy:4,4")]
    pub layout: GenerationLayout,
    /// Restrict an evolving audit to these participant sets, e.g. `--set 6,12`.
    #[arg(long = "set", value_name = "T,T")]
    pub sets: Vec<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    /// Point pairs examined by the odd-point audit.
    #[arg(long, default_value_t = 4096)]
    pub trials: usize,
    /// Field width for the inter-generation audit.
    #[arg(long, default_value_t = 4)]
    pub width: u32,
    #[arg(long)]
    pub csv: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[arg(long, default_value_t = 8)]
    pub ell: u32,
    #[arg(long, default_value = "paper")]
    pub layout: GenerationLayout,
    /// The two colluding participants, lower generation first.
    #[arg(long, default_value = "17,65537")]
    pub t: String,
    /// Secret as ⌈l/4⌉ hex digits; random when omitted.
    #[arg(long)]
    pub secret: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Enumerate every relevant dealer coin instead of one dealer (toy layouts).
    #[arg(long)]
    pub exhaustive: bool,
}

/// Maps a library error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) | Error::Refused(_) => 2,
        Error::Parse(_) => 3,
        Error::Capacity(_) => 4,
        Error::Verification(_) | Error::DivisionByZero => 5,
        Error::Io(_) => 1,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "evss: {e}");
            exit_code(&e)
        }
    }
}

/// Runs a parsed command. `Ok` carries the exit code.
pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<i32> {
    let done = match cmd {
        Command::Split(a) => split(a, out),
        Command::Join { files } => join(files, out),
        Command::Info { file } => info(file, out),
        Command::Sizes(a) => sizes(a, out),
        Command::Audit(a) => audit(a, out),
        Command::AttackDemo(a) => return attack_demo(a, out),
    };
    done.map(|()| 0)
}

fn check_ell(ell: u32) -> Result<()> {
    if (1..=MAX_ELL).contains(&ell) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("--ell must be in 1..={MAX_ELL}, got {ell}")))
    }
}

/// Parses exactly ⌈ℓ/4⌉ hex digits whose value fits in ℓ bits.
pub fn parse_secret(hex_digits: &str, ell: u32) -> Result<BaseElem> {
    check_ell(ell)?;
    let digits = hex_digits.strip_prefix("0x").unwrap_or(hex_digits);
    let want = ell.div_ceil(4) as usize;
    if digits.len() != want {
        return Err(Error::Parameter(format!(
            "secret must be {want} hex digits for l={ell}, got {}",
            digits.len()
        )));
    }
    let v = u32::from_str_radix(digits, 16).map_err(|_| Error::Parameter(format!("secret {digits:?} is not hex")))?;
    BaseElem::new(ell, v).map_err(|_| Error::Parameter(format!("secret {digits} does not fit in {ell} bits")))
}

pub fn format_secret(s: BaseElem) -> String {
    format!("{:0width$x}", s.bits(), width = s.ell().div_ceil(4) as usize)
}

/// Parses a 64-hex-digit ChaCha20 seed.
pub fn parse_seed(s: &str) -> Result<[u8; 32]> {
    let mut seed = [0u8; 32];
    hex::decode_to_slice(s, &mut seed).map_err(|e| Error::Parameter(format!("--seed must be 64 hex digits: {e}")))?;
    Ok(seed)
}

/// Parses `1,2,17..20`; ranges are inclusive.
pub fn parse_participants(spec: &str) -> Result<Vec<BigUint>> {
    let bad = |p: &str| Error::Parameter(format!("bad participant {p:?}"));
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            let lo: u64 = lo.trim().parse().map_err(|_| bad(part))?;
            let hi: u64 = hi.trim().parse().map_err(|_| bad(part))?;
            if lo == 0 || hi < lo || hi - lo >= 1 << 20 {
                return Err(bad(part));
            }
            out.extend((lo..=hi).map(BigUint::from));
        } else {
            let t: BigUint = part.parse().map_err(|_| bad(part))?;
            if t == BigUint::ZERO {
                return Err(Error::Parameter("participants are numbered from 1".into()));
            }
            out.push(t);
        }
    }
    if out.is_empty() {
        return Err(Error::Parameter("no participants given".into()));
    }
    Ok(out)
}

fn with_rng<T>(seed: Option<&str>, f: impl FnOnce(&mut dyn CryptoRngCore) -> Result<T>) -> Result<T> {
    match seed {
        Some(s) => f(&mut ChaCha20Rng::from_seed(parse_seed(s)?)),
        None => f(&mut OsRng),
    }
}

/// Object-safe `RngCore + CryptoRng`.
pub trait CryptoRngCore: RngCore + CryptoRng {}
impl<R: RngCore + CryptoRng> CryptoRngCore for R {}

struct DynRng<'a>(&'a mut dyn CryptoRngCore);

impl RngCore for DynRng<'_> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

impl CryptoRng for DynRng<'_> {}

/// File name used by `split` for participant `t`.
pub fn share_file_name(t: &BigUint) -> String {
    format!("share-{t}.evs")
}

fn split(a: &SplitArgs, out: &mut dyn Write) -> Result<()> {
    let secret = parse_secret(&a.secret, a.ell)?;
    let ts = parse_participants(&a.t)?;
    let mut dealer = with_rng(a.seed.as_deref(), |rng| {
        Dealer::new(secret, a.layout.clone(), &mut DynRng(rng))
    })?;
    // Issue everything before touching the file system.
    let files = ts
        .iter()
        .map(|t| Ok((t, ShareFile::new(dealer.issue_share(t)?).to_bytes()?)))
        .collect::<Result<Vec<_>>>()?;
    std::fs::create_dir_all(&a.out)?;
    for (t, bytes) in files {
        let path = a.out.join(share_file_name(t));
        write_atomic(&path, &bytes)?;
        writeln!(out, "{}", path.display())?;
    }
    Ok(())
}

fn join(files: &[PathBuf], out: &mut dyn Write) -> Result<()> {
    let [a, b, c] = files else {
        return Err(Error::Parameter("join takes exactly three share files".into()));
    };
    let shares = [a, b, c].map(|p| ShareFile::read(p));
    let [a, b, c] = shares;
    let (a, b, c) = (a?.bundle, b?.bundle, c?.bundle);
    for x in [&b, &c] {
        if x.ell != a.ell || x.layout != a.layout {
            return Err(Error::Parameter("share files use different parameters".into()));
        }
    }
    let s = reconstruct(&a, &b, &c)?;
    writeln!(out, "{}", format_secret(s))?;
    Ok(())
}

fn info(file: &Path, out: &mut dyn Write) -> Result<()> {
    let b = ShareFile::read(file)?.bundle;
    let r = bundle_size_bits(&b)?;
    writeln!(out, "participant  {}", b.t())?;
    writeln!(out, "generation   {}", b.generation())?;
    writeln!(out, "index        {}", b.locus.index_in_gen)?;
    writeln!(out, "l            {}", b.ell)?;
    writeln!(out, "layout       {}", b.layout)?;
    writeln!(out, "degree m     {}", r.m)?;
    writeln!(out, "curve index  {}", b.p3.curve_index)?;
    writeln!(out, "P1 bits      {}", r.p1_bits)?;
    writeln!(out, "P2 bits      {}", r.p2_bits)?;
    writeln!(out, "P3 bits      {}", r.p3_bits)?;
    writeln!(out, "P4 bits      {}", r.p4_bits)?;
    writeln!(out, "P5 bits      {}", r.p5_bits)?;
    writeln!(out, "total bits   {}", r.total())?;
    match r.bound_value() {
        Some(v) => writeln!(out, "bound        {v:.2}")?,
        None => writeln!(out, "bound        n/a (t < 3)")?,
    }
    Ok(())
}

/// Rows of the size table, one per participant.
pub fn size_table(ell: u32, layout: &GenerationLayout, ts: &[BigUint]) -> Result<Vec<(u64, SizeReport)>> {
    check_ell(ell)?;
    ts.iter()
        .map(|t| {
            let h = layout.index_in_gen(t)?.index_in_gen;
            let h = u64::try_from(h).unwrap_or(u64::MAX);
            Ok((h, size_for(t, ell, layout)?))
        })
        .collect()
}

fn sizes(a: &SizesArgs, out: &mut dyn Write) -> Result<()> {
    let rows = size_table(a.ell, &a.layout, &parse_participants(&a.t)?)?;
    let mut buf = Vec::new();
    if a.csv {
        let mut w = csv::Writer::from_writer(&mut buf);
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record([
            "t",
            "generation",
            "index",
            "m",
            "p1_bits",
            "p2_bits",
            "p3_bits",
            "p4_bits",
            "p5_bits",
            "total_bits",
            "bound",
            "bound_holds",
        ])
        .map_err(csv_err)?;
        for (h, r) in &rows {
            w.write_record([
                r.t.to_string(),
                r.generation.to_string(),
                h.to_string(),
                r.m.to_string(),
                r.p1_bits.to_string(),
                r.p2_bits.to_string(),
                r.p3_bits.to_string(),
                r.p4_bits.to_string(),
                r.p5_bits.to_string(),
                r.total().to_string(),
                r.bound_value().map(|v| format!("{v:.4}")).unwrap_or_default(),
                r.bound_holds().map(|b| b.to_string()).unwrap_or_default(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
    } else {
        writeln!(
            buf,
            "{:>22} {:>3} {:>20} {:>4} {:>4} {:>4} {:>5} {:>4} {:>4} {:>6} {:>9}",
            "t", "g", "h", "m", "P1", "P2", "P3", "P4", "P5", "total", "bound"
        )?;
        for (h, r) in &rows {
            let bound = match (r.bound_value(), r.bound_holds()) {
                (Some(v), Some(true)) => format!("{v:.2}"),
                (Some(v), _) => format!("{v:.2}!"),
                _ => "n/a".into(),
            };
            writeln!(
                buf,
                "{:>22} {:>3} {:>20} {:>4} {:>4} {:>4} {:>5} {:>4} {:>4} {:>6} {:>9}",
                r.t,
                r.generation,
                h,
                r.m,
                r.p1_bits,
                r.p2_bits,
                r.p3_bits,
                r.p4_bits,
                r.p5_bits,
                r.total(),
                bound
            )?;
        }
        writeln!(
            buf,
            "bound: lg t + B(P1) + l(2*ceil(log4 lg t) - 1) + l + 1; '!' marks rows above it"
        )?;
    }
    emit(&buf, a.out.as_deref(), out)
}

fn emit(buf: &[u8], path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, buf),
        None => Ok(out.write_all(buf)?),
    }
}

fn parse_sets(sets: &[String]) -> Result<Vec<Vec<u64>>> {
    sets.iter()
        .map(|s| {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Parameter(format!("bad participant set {s:?}")))
                })
                .collect()
        })
        .collect()
}

fn audit(a: &AuditArgs, out: &mut dyn Write) -> Result<()> {
    let report: AuditReport = match a.scheme {
        AuditTarget::Static => audit_static(&StaticParams::for_audit(a.ell, a.m)?)?,
        AuditTarget::StaticOdd => audit_static_with_odd_points(&StaticParams::for_audit(a.ell, a.m)?, a.trials)?,
        AuditTarget::Evolving | AuditTarget::Flawed => {
            let scheme = if a.scheme == AuditTarget::Evolving {
                EvolvingScheme::Revised
            } else {
                EvolvingScheme::Flawed
            };
            if a.sets.is_empty() {
                audit_evolving(scheme, &a.layout, a.ell, a.mode.into())?
            } else {
                audit_evolving_sets(scheme, &a.layout, a.ell, &parse_sets(&a.sets)?, a.mode.into())?
            }
        }
        AuditTarget::Inf => audit_inf_default(a.width, a.ell)?,
    };
    let mut buf = Vec::new();
    if a.csv {
        report.write_csv(&mut buf, true)?;
    } else {
        report.write_text(&mut buf)?;
    }
    emit(&buf, a.out.as_deref(), out)
}

fn attack_demo(a: &AttackArgs, out: &mut dyn Write) -> Result<i32> {
    check_ell(a.ell)?;
    let ts = parse_participants(&a.t)?;
    let [low, high] = ts.as_slice() else {
        return Err(Error::Parameter("--t takes exactly two participants".into()));
    };
    if a.exhaustive {
        let (low, high) = (u64::try_from(low), u64::try_from(high));
        let (Ok(low), Ok(high)) = (low, high) else {
            return Err(Error::Parameter(
                "exhaustive attacks need small participant indices".into(),
            ));
        };
        let tally = exhaustive_attack(&a.layout, a.ell, low, high)?;
        writeln!(
            out,
            "layout={} l={} pair=({low},{high}): recovered {}/{} transcripts over {} enumerated bits",
            a.layout, a.ell, tally.recovered, tally.transcripts, tally.variable_bits
        )?;
        return Ok(if tally.recovered == tally.transcripts { 0 } else { 5 });
    }
    let cap = a.layout.gen_of(high)?;
    let (secret, low_b, high_b) = with_rng(a.seed.as_deref(), |rng| {
        let mut rng = DynRng(rng);
        let secret = match &a.secret {
            Some(s) => parse_secret(s, a.ell)?,
            None => BaseElem::new(a.ell, rng.next_u32() & (((1u64 << a.ell) - 1) as u32))?,
        };
        let mut d = FlawedDealer::new(secret, a.layout.clone(), Some(cap), &mut rng)?;
        Ok((secret, d.issue_share(low)?, d.issue_share(high)?))
    })?;
    let recovered = two_party_attack(&low_b, &high_b)?;
    writeln!(out, "true secret      {}", format_secret(secret))?;
    writeln!(out, "recovered secret {}", format_secret(recovered))?;
    if recovered == secret {
        writeln!(out, "participants {low} and {high} recovered the secret")?;
        Ok(0)
    } else {
        writeln!(out, "attack failed")?;
        Ok(5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("evss").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn participant_lists() {
        let p = parse_participants("1, 17..=19,65537").unwrap();
        let v: Vec<String> = p.iter().map(|t| t.to_string()).collect();
        assert_eq!(v, ["1", "17", "18", "19", "65537"]);
        assert!(parse_participants("0").is_err());
        assert!(parse_participants("5..3").is_err());
        assert!(parse_participants("").is_err());
    }

    #[test]
    fn secrets_and_seeds() {
        assert_eq!(parse_secret("a5", 8).unwrap().bits(), 0xa5);
        assert_eq!(parse_secret("0x7", 3).unwrap().bits(), 7);
        assert!(parse_secret("8", 3).is_err());
        assert!(parse_secret("a5", 4).is_err());
        assert!(parse_secret("zz", 8).is_err());
        assert_eq!(format_secret(BaseElem::new(12, 0x0ab).unwrap()), "0ab");
        assert!(parse_seed(&"00".repeat(32)).is_ok());
        assert!(parse_seed("00").is_err());
    }

    #[test]
    fn sizes_row_for_seventeen() {
        let (code, out, _) = run_str(&["sizes", "--t", "17", "--csv"]);
        assert_eq!(code, 0);
        let row = out.lines().nth(1).unwrap();
        assert!(row.starts_with("17,2,1,3,32,8,24,8,8,80,"), "{row}");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&["join", "a", "b"]).0, 2);
        assert_eq!(run_str(&["split", "--secret", "a5", "--t", "1", "--ell", "40"]).0, 2);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn attack_demo_paper_layout() {
        let seed = "11".repeat(32);
        let (code, out, _) = run_str(&["attack-demo", "--secret", "c3", "--seed", &seed]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("recovered secret c3"));
    }

    #[test]
    fn info_missing_file_is_io_error() {
        assert_eq!(run_str(&["info", "/nonexistent/share.evs"]).0, 1);
    }
}
