//! The `pontryagin` command line: `dual`, `transform` and `verify`.
//!
//! Exit status is 0 when everything ran and passed, 1 when a verification check
//! failed or a command could not complete, and 2 for usage errors, which
//! include documents that fail to parse or validate.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use crate::bochner;
use crate::bundle::{BundleElement, BundleFunction, FibreSubset, GroupBundle};
use crate::document::BundleDocument;
use crate::duality::{self, DualBundle, DualFunction};
use crate::error::{Error, Result};
use crate::harness;
use crate::report::{Check, VerificationReport};
use crate::DEFAULT_TOLERANCE;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Fibres up to this order get the translation identity at every element;
/// larger ones at their generators.
const EXHAUSTIVE_ORDER: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "pontryagin", version, about = "Duality for finite Abelian group bundles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the dual bundle: same fibres, weights replaced by 1/(c|G|).
    Dual {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Fourier-transform a named function; the result lives on the dual bundle.
    Transform {
        input: PathBuf,
        #[arg(long)]
        function: String,
        /// Treat the input as a dual bundle and invert the transform.
        #[arg(long)]
        inverse: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run verification suites and report every check.
    Verify {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Duality,
    Gelfand,
    Plancherel,
    Bochner,
    Localization,
    Convergence,
}

impl Suite {
    const EACH: [Suite; 6] =
        [Suite::Duality, Suite::Gelfand, Suite::Plancherel, Suite::Bochner, Suite::Localization, Suite::Convergence];

    fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Duality => "duality",
            Suite::Gelfand => "gelfand",
            Suite::Plancherel => "plancherel",
            Suite::Bochner => "bochner",
            Suite::Localization => "localization",
            Suite::Convergence => "convergence",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Parses `args` (program name first) and runs the command. Output documents go
/// to `-o` or `stdout`; reports go to `stdout`; diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::Parse { .. } | Error::Validation { .. } | Error::UnknownFunction(_) | Error::Io(_) => EXIT_USAGE,
                _ => EXIT_FAIL,
            }
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Dual { input, output } => {
            let doc = BundleDocument::parse_str(&std::fs::read_to_string(&input)?)?;
            emit(&cmd_dual(&doc)?, output.as_deref(), stdout)?;
            Ok(EXIT_PASS)
        }
        Command::Transform { input, function, inverse, output } => {
            let doc = BundleDocument::parse_str(&std::fs::read_to_string(&input)?)?;
            let out = if inverse { cmd_inverse_transform(&doc, &function)? } else { cmd_transform(&doc, &function)? };
            emit(&out, output.as_deref(), stdout)?;
            Ok(EXIT_PASS)
        }
        Command::Verify { input, suite, tolerance, format } => {
            let doc = BundleDocument::parse_str(&std::fs::read_to_string(&input)?)?;
            let report = cmd_verify(&doc, suite, tolerance)?;
            let text = match format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json() + "\n",
            };
            stdout.write_all(text.as_bytes())?;
            Ok(if report.passed() { EXIT_PASS } else { EXIT_FAIL })
        }
    }
}

fn emit(doc: &BundleDocument, path: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let text = doc.to_json_string();
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// The dual bundle as a document; only the base section is carried over.
pub fn cmd_dual(doc: &BundleDocument) -> Result<BundleDocument> {
    let b = doc.bundle()?;
    Ok(BundleDocument::from_bundle(duality::dual_bundle(&b).bundle()))
}

/// The dual bundle with `f̂` stored under the same name.
pub fn cmd_transform(doc: &BundleDocument, name: &str) -> Result<BundleDocument> {
    let b = doc.bundle()?;
    let f = doc.function_on(&b, name)?;
    let db = duality::dual_bundle(&b);
    let fh = duality::fourier(&b, &f)?;
    let mut out = BundleDocument::from_bundle(db.bundle());
    out.functions.insert(name.to_string(), BundleDocument::function_table(db.bundle(), &fh));
    Ok(out)
}

/// Reads `doc` as a dual bundle carrying `F` and writes the primal bundle with
/// the inverse transform of `F`.
pub fn cmd_inverse_transform(doc: &BundleDocument, name: &str) -> Result<BundleDocument> {
    let dual = doc.bundle()?;
    let transform = DualFunction(doc.function_on(&dual, name)?);
    let db = DualBundle::from_dual(dual);
    let f = duality::inverse_fourier(&db, &transform)?;
    let mut out = BundleDocument::from_bundle(db.primal());
    out.functions.insert(name.to_string(), BundleDocument::function_table(db.primal(), &f));
    Ok(out)
}

/// Runs the selected suites. Checks are named `suite/subject/check`.
pub fn cmd_verify(doc: &BundleDocument, suite: Suite, tol: f64) -> Result<VerificationReport> {
    let ctx = Context::new(doc)?;
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let mut report = VerificationReport::new();
    for s in suites {
        let start = Instant::now();
        let part = match s {
            Suite::Duality => ctx.duality(tol)?,
            Suite::Gelfand => ctx.gelfand(tol)?,
            Suite::Plancherel => ctx.plancherel(tol)?,
            Suite::Bochner => ctx.bochner(tol)?,
            Suite::Localization => ctx.localization(tol)?,
            Suite::Convergence => ctx.convergence(doc, tol)?,
            Suite::All => unreachable!(),
        };
        report.extend(part.prefixed(s.name()));
        report.timings.push((s.name().to_string(), start.elapsed()));
    }
    Ok(report)
}

type Named = (String, BundleFunction);

struct Context {
    bundle: GroupBundle,
    functions: Vec<Named>,
    subsets: Vec<(String, FibreSubset)>,
}

/// Deterministic test functions added to whatever the document names.
pub fn probe_functions(b: &GroupBundle) -> Vec<(String, BundleFunction)> {
    let mut a = BundleFunction::zeros(b);
    let mut c = BundleFunction::zeros(b);
    for k in 0..b.len() {
        for (i, z) in a.fibre_mut(k).iter_mut().enumerate() {
            let t = i as f64;
            *z = Complex64::new((0.7 * t + 0.3 * k as f64 + 0.1).cos(), (1.3 * t + 0.5 * k as f64).sin());
        }
        for (i, z) in c.fibre_mut(k).iter_mut().enumerate() {
            *z = Complex64::new(1.0 / (1.0 + i as f64), ((i * i + k) % 7) as f64 / 7.0 - 0.5);
        }
    }
    vec![("probe.wave".into(), a), ("probe.decay".into(), c)]
}

impl Context {
    fn new(doc: &BundleDocument) -> Result<Self> {
        let bundle = doc.bundle()?;
        let mut functions = Vec::new();
        for name in doc.function_names() {
            functions.push((name.to_string(), doc.function_on(&bundle, name)?));
        }
        functions.extend(probe_functions(&bundle));
        let mut subsets = Vec::new();
        for name in doc.subsets.keys() {
            subsets.push((name.clone(), doc.subset_on(&bundle, name)?));
        }
        Ok(Context { bundle, functions, subsets })
    }

    /// Each function with itself and with its successor.
    fn pairs(&self) -> Vec<(&Named, &Named)> {
        let n = self.functions.len();
        let mut out = Vec::new();
        for i in 0..n {
            out.push((&self.functions[i], &self.functions[i]));
            if n > 1 {
                out.push((&self.functions[i], &self.functions[(i + 1) % n]));
            }
        }
        out
    }

    fn duality(&self, tol: f64) -> Result<VerificationReport> {
        let b = &self.bundle;
        let mut report = VerificationReport::new();
        report.extend(duality::verify_duality(b, tol).prefixed("phi"));
        report.extend(duality::verify_double_dual_weights(b, tol.min(1e-12)).prefixed("haar"));
        let unit = b.with_weights(&vec![1.0; b.len()])?;
        report.extend(duality::haar_independence_check(b, &unit).prefixed("haar_independence"));
        for (name, f) in &self.functions {
            report.extend(duality::verify_pullback_identity(b, f, tol)?.prefixed(name));
        }
        Ok(report)
    }

    fn gelfand(&self, tol: f64) -> Result<VerificationReport> {
        let mut report = VerificationReport::new();
        for ((fname, f), (gname, g)) in self.pairs() {
            let part = duality::verify_gelfand_homomorphism(&self.bundle, f, g, tol)?;
            report.extend(part.prefixed(&format!("{fname},{gname}")));
        }
        Ok(report)
    }

    fn plancherel(&self, tol: f64) -> Result<VerificationReport> {
        let b = &self.bundle;
        let mut report = VerificationReport::new();
        for (name, f) in &self.functions {
            report.extend(duality::verify_plancherel(b, f, tol)?.prefixed(name));
        }
        for ((fname, f), (gname, g)) in self.pairs() {
            report.push(polarized(b, f, g, tol)?.prefixed_name(&format!("{fname},{gname}")));
        }
        for (name, g) in &self.functions {
            report.push(translation(b, g, tol)?.prefixed_name(name));
        }
        Ok(report)
    }

    fn bochner(&self, tol: f64) -> Result<VerificationReport> {
        let b = &self.bundle;
        let mut report = VerificationReport::new();
        for (name, h) in &self.functions {
            let mut part = VerificationReport::new();
            let f = bochner::positive_definite_from(b, h)?;
            let fh = duality::fourier(b, &f)?;
            let hh = duality::fourier(b, h)?;
            let expected = hh.map(|z| Complex64::new(z.norm_sqr(), 0.0));
            let scale = 1.0 + expected.sup_norm();
            part.push(Check::within("transform_is_square_modulus", fh.distance(&expected)? / scale, tol, None));
            match bochner::bochner_measure_with_tolerance(b, &f, DEFAULT_TOLERANCE) {
                Ok(mu) => {
                    part.push(Check::exact("measure_nonnegative", true, None));
                    part.extend(bochner::bochner_inversion_check(b, &f, &mu, tol)?);
                    part.extend(bochner::mass_bound_check(b, &f, &mu, tol)?);
                }
                Err(e) => part.push(Check::exact("measure_nonnegative", false, Some(json!({ "error": e.to_string() })))),
            }
            part.extend(bochner::support_containment_check(b, h, &b.support(h, 0.0))?.prefixed("own_support"));
            for (sname, u) in &self.subsets {
                let restricted = restrict(b, h, u)?;
                part.extend(bochner::support_containment_check(b, &restricted, u)?.prefixed(sname));
            }
            report.extend(part.prefixed(name));
        }
        Ok(report)
    }

    fn localization(&self, tol: f64) -> Result<VerificationReport> {
        let b = &self.bundle;
        let named = |n: &str| self.subsets.iter().find(|(s, _)| s == n).map(|(_, u)| u.clone());
        let (w, v) = match (named("W"), named("V")) {
            (Some(w), Some(v)) => (w, v),
            _ => default_windows(b),
        };
        let mut report = VerificationReport::new();
        for ((gname, g), (fname, f)) in self.pairs() {
            let g = restrict(b, g, &w)?;
            let f = restrict(b, f, &v)?;
            report.extend(bochner::localization_check(b, &g, &f, &w, &v, tol)?.prefixed(&format!("{gname},{fname}")));
        }
        Ok(report)
    }

    fn convergence(&self, doc: &BundleDocument, tol: f64) -> Result<VerificationReport> {
        let mut report = VerificationReport::new();
        let Some(sc) = doc.scenario()? else {
            report.push(Check::skip("scenario", "the document has no scenario section"));
            return Ok(report);
        };
        let windows = match doc.windows()? {
            Some(w) => w,
            None => harness::Windows { w: vec![sc.limit().element.clone()], v: vec![sc.bundle().group(&sc.limit().point)?.identity()] },
        };
        report.extend(harness::check_dual_convergence(&sc).report.prefixed("dual"));
        report.extend(harness::check_phi_forward_continuity(&sc).report.prefixed("phi_forward"));
        report.extend(harness::check_phi_inverse_continuity_with(&sc, &windows, tol).report.prefixed("phi_inverse"));
        Ok(report)
    }
}

trait PrefixedName {
    fn prefixed_name(self, prefix: &str) -> Self;
}

impl PrefixedName for Check {
    fn prefixed_name(mut self, prefix: &str) -> Self {
        self.name = format!("{prefix}/{}", self.name);
        self
    }
}

fn restrict(b: &GroupBundle, h: &BundleFunction, u: &FibreSubset) -> Result<BundleFunction> {
    h.zip_with(&BundleFunction::indicator(b, u)?, |x, y| x * y)
}

/// `W = {e, a}` and `V = {e, a, a⁻¹}` in every fibre, `a` the second element.
fn default_windows(b: &GroupBundle) -> (FibreSubset, FibreSubset) {
    let mut w = FibreSubset::empty(b);
    let mut v = FibreSubset::empty(b);
    for (bi, (_, fibre)) in b.fibres().enumerate() {
        let n = fibre.group.order();
        for i in 0..n.min(2) {
            w.insert_index(bi, i);
            v.insert_index(bi, i);
            v.insert_index(bi, fibre.group.inv_index(i));
        }
    }
    (w, v)
}

/// `⟨f, g⟩ = ⟨f̂, ĝ⟩` on every fibre, relative to `‖f‖₂‖g‖₂`.
fn polarized(b: &GroupBundle, f: &BundleFunction, g: &BundleFunction, tol: f64) -> Result<Check> {
    let mut worst = 0.0f64;
    let mut witness = None;
    for x in b.base() {
        let (lhs, rhs) = duality::plancherel_pairing(b, f, g, x)?;
        let (ff, _) = duality::plancherel_pairing(b, f, f, x)?;
        let (gg, _) = duality::plancherel_pairing(b, g, g, x)?;
        let scale = (ff.re * gg.re).sqrt();
        let rel = if scale > 0.0 { (lhs - rhs).norm() / scale } else { (lhs - rhs).norm() };
        if rel > worst {
            worst = rel;
            witness = Some(json!({ "point": x, "primal": [lhs.re, lhs.im], "dual": [rhs.re, rhs.im] }));
        }
    }
    Ok(Check::within("polarized_pairing", worst, tol, witness))
}

/// The translation identity at every `s` of small fibres and at the
/// generators of large ones; reports the worst residual.
fn translation(b: &GroupBundle, g: &BundleFunction, tol: f64) -> Result<Check> {
    let mut worst: Option<Check> = None;
    let mut count = 0usize;
    for (id, fibre) in b.fibres() {
        let group = &fibre.group;
        let points: Vec<usize> =
            if group.order() <= EXHAUSTIVE_ORDER { (0..group.order()).collect() } else { duality::generators(group) };
        for s in points {
            let s = BundleElement::new(id, group.element_at(s));
            let report = duality::verify_translation_identity(b, g, &s, tol)?;
            count += 1;
            for c in report.checks {
                if worst.as_ref().is_none_or(|w| c.max_residual > w.max_residual) {
                    worst = Some(c);
                }
            }
        }
    }
    let check = worst.unwrap_or_else(|| Check::within("translation_identity", 0.0, tol, None));
    Ok(check.with_note(format!("{count} translates checked")))
}
