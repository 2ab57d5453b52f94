//! Command-line front end. [`run`] takes the argument list and returns the
//! process exit code: 0 on success, 1 when a verification fails or an
//! equality turns up where escape was expected, 2 on usage or input errors.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use diag_core::analysis::{
    certify_unknowns, membership_scan, verify_designated_escape, verify_escape, write_csv, Witness,
    WitnessKind,
};
use diag_core::engine::{build_y, diag_classical, diag_perm, tower, x_infinity, z_direct};
use diag_core::enumerations::{checked_pair, BitMatrix, BuilderSpec};
use diag_core::sdl::{
    decode_term, encode_term, parse_enum, parse_file, parse_seq, row, GodelCode, Variant,
};
use diag_core::{build_enumeration, unpair, EnumTerm, FiniteSupportPerm, SeqTerm, Term};
use num_bigint::BigUint;

#[derive(Parser, Debug)]
#[command(
    name = "diag",
    version,
    about = "Diagonal constructions over enumerations of binary sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    display: Display,
}

/// Where the enumeration (or sequence) comes from.
#[derive(Args, Debug)]
struct Input {
    /// zeros, ones, identity, binary_naturals, hashrows, doubly_periodic, counterexample
    #[arg(long, global = true)]
    builder: Option<String>,
    /// salt for hashrows
    #[arg(long, global = true)]
    salt: Option<u64>,
    /// bit grid for doubly_periodic, rows separated by `;`, e.g. `011;100`
    #[arg(long, global = true)]
    matrix: Option<String>,
    /// SDL file with a `seq:` or `enum:` header line
    #[arg(long, global = true)]
    file: Option<PathBuf>,
    /// SDL expression
    #[arg(long, global = true)]
    expr: Option<String>,
    /// permutation: `id`, `t(a,b)`, `#n`, `[table]` or a `*`-product
    #[arg(long, global = true)]
    perm: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = VariantArg::Row)]
    variant: VariantArg,
}

#[derive(Args, Debug)]
struct Display {
    /// number of bits per sequence
    #[arg(long, global = true, default_value_t = 256, value_parser = clap::value_parser!(u64).range(1..))]
    horizon: u64,
    /// number of rows
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    rows: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// write to this file instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// emit a CSV header record
    #[arg(long, global = true)]
    header: bool,
    /// show row and position indices starting at 1
    #[arg(long, global = true)]
    one_based: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Row,
    Transversal,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Row => Variant::Row,
            VariantArg::Transversal => Variant::Transversal,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a prefix of a sequence, or of row `--row` of an enumeration
    Prefix {
        #[arg(long)]
        row: Option<u64>,
    },
    /// Print a rows × horizon grid; diagonal cells are bracketed in text mode
    Matrix,
    /// Print a diagonal of the enumeration
    Diag {
        #[arg(value_enum)]
        kind: DiagKind,
    },
    /// Print w_1 … w_n of the diagonal tower over (x, Y(x))
    Tower {
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        levels: u64,
    },
    /// Print the limit enumeration of the tower over (x, Y(x))
    Xinf,
    /// Run a verification suite
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
        levels: u64,
    },
    /// Permutation ranking
    Perm {
        #[command(subcommand)]
        op: PermOp,
    },
    /// Cantor pairing
    Pair { a: u64, b: u64 },
    /// Inverse of Cantor pairing
    Unpair { n: u64 },
    /// Gödel number of a term
    Encode,
    /// Term with the given Gödel number
    Decode { code: String },
    /// Look for rows of the enumeration equal to `--target`
    Scan {
        /// SDL sequence expression
        #[arg(long)]
        target: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DiagKind {
    Classical,
    Perm,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    /// the diagonal differs from every row
    Escape,
    /// the flip law and its permuted reductions
    Flip,
    /// z against the Y family
    Z,
    /// levels of the diagonal tower
    Tower,
    /// the limit enumeration
    Limit,
}

#[derive(Subcommand, Debug)]
enum PermOp {
    Unrank { n: u64 },
    Rank { perm: String },
}

/// Exit codes.
pub const OK: i32 = 0;
pub const FAILED: i32 = 1;
pub const USAGE: i32 = 2;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(io::Error),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

fn usage<T>(msg: impl ToString) -> Result<T, CliError> {
    Err(CliError::Usage(msg.to_string()))
}

impl Input {
    fn count_sources(&self) -> usize {
        [
            self.builder.is_some(),
            self.file.is_some(),
            self.expr.is_some(),
        ]
        .into_iter()
        .filter(|&b| b)
        .count()
    }

    fn term(&self, prefer_seq: bool) -> Result<Term, CliError> {
        match self.count_sources() {
            0 => return usage("give one of --builder, --file or --expr"),
            1 => {}
            _ => return usage("--builder, --file and --expr are mutually exclusive"),
        }
        if let Some(name) = &self.builder {
            let matrix = match &self.matrix {
                Some(m) => Some(m.parse::<BitMatrix>().or_else(usage)?),
                None => None,
            };
            let spec = BuilderSpec::from_name(name, self.salt, matrix).or_else(usage)?;
            return Ok(build_enumeration(&spec).into());
        }
        if let Some(path) = &self.file {
            let text =
                fs::read_to_string(path).or_else(|e| usage(format!("{}: {e}", path.display())))?;
            return parse_file(&text).or_else(|e| usage(format!("{}:{e}", path.display())));
        }
        let text = self.expr.as_deref().unwrap_or_default();
        if prefer_seq {
            if let Ok(s) = parse_seq(text) {
                return Ok(s.into());
            }
        }
        parse_enum(text).map(Term::from).or_else(usage)
    }

    fn enumeration(&self) -> Result<EnumTerm, CliError> {
        match self.term(false)? {
            Term::Enum(e) => Ok(e),
            Term::Seq(_) => usage("this command needs an enumeration, not a sequence"),
        }
    }

    fn perm(&self) -> Result<Option<FiniteSupportPerm>, CliError> {
        self.perm
            .as_deref()
            .map(|p| p.parse().or_else(usage))
            .transpose()
    }
}

struct Out<'a> {
    sink: Box<dyn Write + 'a>,
    d: &'a Display,
}

impl Out<'_> {
    fn shift(&self) -> u64 {
        u64::from(self.d.one_based)
    }

    fn csv(&mut self) -> csv::Writer<&mut dyn Write> {
        csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .flexible(true)
            .from_writer(&mut *self.sink as &mut dyn Write)
    }

    fn index_header(&mut self, len: u64) -> Result<(), CliError> {
        if self.d.format == Format::Csv && self.d.header {
            let shift = self.shift();
            self.csv()
                .write_record((0..len).map(|i| (i + shift).to_string()))?;
        }
        Ok(())
    }

    fn bits_line(&mut self, label: Option<String>, bits: &[u8]) -> Result<(), CliError> {
        match self.d.format {
            Format::Csv => {
                self.csv()
                    .write_record(bits.iter().map(|b| b.to_string()))?;
            }
            Format::Text => {
                let body: String = bits.iter().map(|b| char::from(b'0' + b)).collect();
                match label {
                    Some(l) => writeln!(self.sink, "{l} {body}")?,
                    None => writeln!(self.sink, "{body}")?,
                }
            }
        }
        Ok(())
    }

    fn matrix(&mut self, e: &EnumTerm) -> Result<(), CliError> {
        let (rows, horizon) = (self.d.rows, self.d.horizon);
        self.index_header(horizon)?;
        let width = (rows - 1 + self.shift()).to_string().len();
        for k in 0..rows {
            let bits = e.row_prefix(k, horizon);
            if self.d.format == Format::Csv {
                self.bits_line(None, &bits)?;
                continue;
            }
            let mut line = format!("{:>width$} ", k + self.shift());
            for (i, b) in bits.iter().enumerate() {
                if i as u64 == k {
                    line.push_str(&format!("[{b}]"));
                } else {
                    line.push_str(&format!(" {b} "));
                }
            }
            writeln!(self.sink, "{}", line.trim_end())?;
        }
        Ok(())
    }

    fn witnesses(&mut self, ws: &[Witness]) -> Result<(), CliError> {
        if self.d.format == Format::Csv {
            write_csv(ws, &mut *self.sink, self.d.header, self.d.one_based)?;
            return Ok(());
        }
        let shift = self.shift();
        for w in ws {
            match w.position {
                Some(p) => writeln!(
                    self.sink,
                    "row {}: {} at position {}",
                    w.row + shift,
                    w.kind,
                    p + shift
                )?,
                None => writeln!(
                    self.sink,
                    "row {}: {} (horizon {})",
                    w.row + shift,
                    w.kind,
                    w.horizon
                )?,
            }
        }
        Ok(())
    }

    fn check(&mut self, name: &str, failure: Option<String>) -> Result<bool, CliError> {
        match &failure {
            None => writeln!(self.sink, "{name}: ok")?,
            Some(why) => writeln!(self.sink, "{name}: FAILED, {why}")?,
        }
        Ok(failure.is_none())
    }
}

fn first_failure(mut checks: impl Iterator<Item = Option<String>>) -> Option<String> {
    checks.find_map(|c| c)
}

fn diag_of(input: &Input, e: &EnumTerm, kind: DiagKind) -> Result<SeqTerm, CliError> {
    Ok(match kind {
        DiagKind::Classical => diag_classical(e),
        DiagKind::Z => z_direct(e),
        DiagKind::Perm => {
            let Some(p) = input.perm()? else {
                return usage("diag perm needs --perm");
            };
            diag_perm(e, &p, input.variant.into())
        }
    })
}

fn verify(cli: &Cli, suite: Suite, levels: u64, out: &mut Out) -> Result<i32, CliError> {
    let e = cli.input.enumeration()?;
    let (rows, horizon) = (cli.display.rows, cli.display.horizon);
    let variant = Variant::from(cli.input.variant);
    let all_ok = match suite {
        Suite::Escape => {
            // the row variant has no designated position, so report the least
            let perm = cli.input.perm()?;
            let (y, mut ws) = match (&perm, variant) {
                (None, _) => {
                    let y = diag_classical(&e);
                    let ws = verify_designated_escape(&e, &y, rows, horizon, |k| k);
                    (y, ws)
                }
                (Some(p), Variant::Transversal) => {
                    let y = diag_perm(&e, p, variant);
                    let ws = verify_designated_escape(&e, &y, rows, horizon, |k| p.apply(k));
                    (y, ws)
                }
                (Some(p), Variant::Row) => {
                    let y = diag_perm(&e, p, variant);
                    let ws = verify_escape(&e, &y, rows, horizon);
                    (y, ws)
                }
            };
            certify_unknowns(&e, &y, &mut ws);
            out.witnesses(&ws)?;
            ws.iter().all(|w| w.kind == WitnessKind::Disagreement)
        }
        Suite::Flip => {
            let d = diag_classical(&e);
            let id = FiniteSupportPerm::identity();
            let dp = d.prefix(horizon);
            let flip = first_failure((0..horizon).map(|i| {
                (d.bit(i) == e.bit(i, i)).then(|| format!("position {}", i + out.shift()))
            }));
            let a = out.check("flip law", flip)?;
            let reduce = first_failure([Variant::Row, Variant::Transversal].into_iter().map(|v| {
                (diag_perm(&e, &id, v).prefix(horizon) != dp)
                    .then(|| format!("{} variant", v.name()))
            }));
            a & out.check(
                "identity permutation reduces to the classical diagonal",
                reduce,
            )?
        }
        Suite::Z => {
            let z = z_direct(&e);
            let y = build_y(&e, Variant::Row);
            let coherent = (z.prefix(horizon) != diag_classical(&y).prefix(horizon))
                .then(|| "z differs from the diagonal of Y".to_string());
            let a = out.check("z is the diagonal of Y", coherent)?;
            let escape =
                first_failure((0..rows.min(horizon)).map(|k| {
                    (z.bit(k) == y.bit(k, k)).then(|| format!("Y row {}", k + out.shift()))
                }));
            a & out.check("z escapes the Y family", escape)?
        }
        Suite::Tower => {
            let y = build_y(&e, variant);
            let mut ok = true;
            for n in 1..=levels {
                let level = tower(&e, &y, n).expect("levels start at 1");
                let escape = first_failure((0..rows.min(horizon)).map(|k| {
                    (level.w_n.bit(k) == level.x_n.bit(k, k))
                        .then(|| format!("row {}", k + out.shift()))
                }));
                ok &= out.check(&format!("w_{n} escapes x_{n}"), escape)?;
                let next = level.next();
                let top = (next.x_n.row_prefix(0, horizon) != level.w_n.prefix(horizon))
                    .then(|| "row 0 differs".to_string());
                ok &= out.check(&format!("x_{} starts with w_{n}", n + 1), top)?;
            }
            ok
        }
        Suite::Limit => {
            let y = build_y(&e, variant);
            let xi = x_infinity(&e, &y);
            let mut ok = true;
            for n in 1..=levels {
                let w = tower(&e, &y, n).expect("levels start at 1").w_n;
                let at = 2 * (n - 1);
                let placed = (xi.row_prefix(at, horizon) != w.prefix(horizon))
                    .then(|| format!("row {} differs", at + out.shift()));
                ok &= out.check(
                    &format!("w_{n} is row {} of the limit", at + out.shift()),
                    placed,
                )?;
            }
            let d = diag_classical(&xi);
            let escape =
                first_failure((0..rows.min(horizon)).map(|k| {
                    (d.bit(k) == xi.bit(k, k)).then(|| format!("row {}", k + out.shift()))
                }));
            ok & out.check("the limit diagonal escapes the limit", escape)?
        }
    };
    Ok(if all_ok { OK } else { FAILED })
}

fn execute(cli: &Cli, out: &mut Out) -> Result<i32, CliError> {
    let d = &cli.display;
    match &cli.command {
        Command::Prefix { row: k } => {
            let s = match (cli.input.term(true)?, k) {
                (Term::Seq(s), None) => s,
                (Term::Seq(_), Some(_)) => return usage("--row applies to enumerations"),
                (Term::Enum(e), Some(k)) => row(&e, *k),
                (Term::Enum(_), None) => return usage("an enumeration needs --row"),
            };
            out.index_header(d.horizon)?;
            out.bits_line(None, &s.prefix(d.horizon))?;
        }
        Command::Matrix => out.matrix(&cli.input.enumeration()?)?,
        Command::Diag { kind } => {
            let s = diag_of(&cli.input, &cli.input.enumeration()?, *kind)?;
            out.index_header(d.horizon)?;
            out.bits_line(None, &s.prefix(d.horizon))?;
        }
        Command::Tower { levels } => {
            let x = cli.input.enumeration()?;
            let y = build_y(&x, cli.input.variant.into());
            out.index_header(d.horizon)?;
            for n in 1..=*levels {
                let w = tower(&x, &y, n).expect("levels start at 1").w_n;
                out.bits_line(Some(format!("w_{n}")), &w.prefix(d.horizon))?;
            }
        }
        Command::Xinf => {
            let x = cli.input.enumeration()?;
            out.matrix(&x_infinity(&x, &build_y(&x, cli.input.variant.into())))?;
        }
        Command::Verify { suite, levels } => return verify(cli, *suite, *levels, out),
        Command::Perm { op } => match op {
            PermOp::Unrank { n } => writeln!(out.sink, "{}", FiniteSupportPerm::unrank(*n))?,
            PermOp::Rank { perm } => {
                let p: FiniteSupportPerm = perm.parse().or_else(usage)?;
                writeln!(out.sink, "{}", p.rank().or_else(usage)?)?;
            }
        },
        Command::Pair { a, b } => match checked_pair(*a, *b) {
            Some(n) => writeln!(out.sink, "{n}")?,
            None => return usage("pair does not fit in 64 bits"),
        },
        Command::Unpair { n } => {
            let (a, b) = unpair(*n);
            writeln!(out.sink, "{a} {b}")?;
        }
        Command::Encode => writeln!(out.sink, "{}", encode_term(&cli.input.term(true)?))?,
        Command::Decode { code } => {
            let n: BigUint = code
                .trim()
                .parse()
                .or_else(|_| usage(format!("not a natural number: {code:?}")))?;
            let t = decode_term(&GodelCode(n)).or_else(usage)?;
            write!(out.sink, "{}", t.to_file_text())?;
        }
        Command::Scan { target } => {
            let s = parse_seq(target).or_else(usage)?;
            let e = cli.input.enumeration()?;
            out.witnesses(&membership_scan(&s, &e, d.rows, d.horizon))?;
        }
    }
    Ok(OK)
}

/// Parses `args` (program name first) and runs the command, writing
/// results to `stdout` and diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    let sink: Box<dyn Write + '_> = match &cli.display.output {
        Some(path) => match fs::File::create(path) {
            Ok(f) => Box::new(io::BufWriter::new(f)),
            Err(e) => {
                let _ = writeln!(stderr, "error: {}: {e}", path.display());
                return USAGE;
            }
        },
        None => Box::new(&mut *stdout),
    };
    let mut out = Out {
        sink,
        d: &cli.display,
    };
    let result = execute(&cli, &mut out).and_then(|code| {
        out.sink.flush()?;
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            USAGE
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            USAGE
        }
    }
}
