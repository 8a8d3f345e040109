//! `incalg`: command-line front end for `incidence-core`.
//!
//! Exit codes: 0 success, 1 verification failure (or a non-inner system
//! under `--expect-inner`), 2 bad input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use incidence_core::formats::{self, to_json};
use incidence_core::oracle::{self, Options, VerificationReport};
use incidence_core::{
    Error, IncidenceAlgebra, IncidenceFunction, Innerness, Preorder, Ring, WeightSpace, WeightSystem,
};

#[derive(Parser, Debug)]
#[command(name = "incalg", version, about = "Incidence algebras over finite rings and their multiplicative automorphisms")]
struct Cli {
    /// Seed for randomised checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Ignore enumeration guards.
    #[arg(long, global = true)]
    force: bool,
    /// Write output here instead of stdout (a directory for `decompose`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct PosetArg {
    /// Preorder file.
    #[arg(long)]
    poset: PathBuf,
}

#[derive(Args, Debug)]
struct InstanceArgs {
    #[command(flatten)]
    poset: PosetArg,
    /// Coefficient ring, e.g. `Z/12`, `Z/2 x Z/3`, `M(2,Z/2)`.
    #[arg(long)]
    ring: Option<String>,
}

#[derive(Args, Debug)]
struct WeightArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Weight system file.
    #[arg(long)]
    weights: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classes, pair count m, cyclomatic number, connectivity and height.
    Info(PosetArg),
    /// Validate a weight system.
    Check(WeightArgs),
    /// Decide whether a weight system is inner.
    IsInner {
        #[command(flatten)]
        args: WeightArgs,
        #[arg(long)]
        root: Option<String>,
        /// Exit 1 when the system is not inner.
        #[arg(long)]
        expect_inner: bool,
    },
    /// Split a weight system into a tree-trivial and an inner factor.
    Decompose {
        #[command(flatten)]
        args: WeightArgs,
        #[arg(long)]
        root: Option<String>,
    },
    /// Count multiplicative, inner and tree-trivial systems by enumeration.
    Enumerate {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        root: Option<String>,
    },
    /// Run the brute-force checks on one instance.
    Verify {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Random pairs per randomised check.
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Apply a weight system to an incidence function.
    Apply {
        #[command(flatten)]
        args: WeightArgs,
        /// Function file, or `zeta` / `delta`.
        #[arg(long)]
        function: String,
    },
    /// Convolution product of two functions.
    Convolve {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Function file, or `zeta` / `delta`.
        f: String,
        /// Function file, or `zeta` / `delta`.
        g: String,
    },
    /// Inverse of a unit.
    Invert {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Function file, or `zeta` / `delta`.
        f: String,
    },
}

enum Failure {
    Input(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (text, code) = match run(&cli) {
        Ok(text) => (text, 0),
        Err(Failure::Check(text)) => (text, 1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(msg) = emit(&cli, &text) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}

fn emit(cli: &Cli, text: &str) -> Result<(), String> {
    match (&cli.out, &cli.command) {
        (Some(_), Command::Decompose { .. }) | (None, _) => {
            print!("{text}");
            Ok(())
        }
        (Some(path), _) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_poset(arg: &PosetArg) -> Result<Preorder, Failure> {
    Ok(formats::parse_preorder(&read(&arg.poset)?, &arg.poset.display().to_string())?)
}

/// The ring from `--ring`, or else the one declared in `declared_by`.
fn load_ring(instance: &InstanceArgs, declared_by: Option<&Path>) -> Result<Ring, Failure> {
    match (&instance.ring, declared_by) {
        (Some(spec), _) => Ok(Ring::parse(spec)?),
        (None, Some(path)) => {
            let spec = formats::declared_ring(&read(path)?, &path.display().to_string())?;
            Ok(Ring::new(spec)?)
        }
        (None, None) => Err(Failure::Input("--ring is required".into())),
    }
}

fn load_algebra(instance: &InstanceArgs, declared_by: Option<&Path>) -> Result<Arc<IncidenceAlgebra>, Failure> {
    let p = load_poset(&instance.poset)?;
    let r = load_ring(instance, declared_by)?;
    Ok(IncidenceAlgebra::new(p, r))
}

fn load_weights(args: &WeightArgs) -> Result<(Arc<IncidenceAlgebra>, WeightSystem), Failure> {
    let alg = load_algebra(&args.instance, Some(&args.weights))?;
    let space = WeightSpace::for_algebra(&alg);
    let ws = formats::parse_weights(&read(&args.weights)?, &args.weights.display().to_string(), &space)?;
    Ok((alg, ws))
}

fn load_function(name: &str, alg: &Arc<IncidenceAlgebra>) -> Result<IncidenceFunction, Failure> {
    match name {
        "zeta" => Ok(alg.zeta()),
        "delta" => Ok(alg.delta()),
        path => Ok(formats::parse_function(&read(Path::new(path))?, path, alg)?),
    }
}

fn root_class(space: &WeightSpace, root: &Option<String>) -> Result<usize, Failure> {
    match root {
        None => Ok(space.default_root()),
        Some(label) => Ok(space.poset().class_by_label(label)?),
    }
}

fn options(cli: &Cli) -> Options {
    Options { force: cli.force }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Info(arg) => info(&load_poset(arg)?),
        Command::Check(args) => {
            let (_, ws) = load_weights(args)?;
            let violations = ws.validate();
            if violations.is_empty() {
                return Ok("valid\n".into());
            }
            let q = ws.space().poset();
            let mut out = String::from("invalid\n");
            for v in violations {
                out.push_str(&format!(
                    "violation: c({x},{y}) != c({x},{z}) c({z},{y})\n",
                    x = q.representative(v.x),
                    z = q.representative(v.z),
                    y = q.representative(v.y)
                ));
            }
            Err(Failure::Check(out))
        }
        Command::IsInner { args, root, expect_inner } => {
            let (_, ws) = load_weights(args)?;
            let root = root_class(ws.space(), root)?;
            match ws.find_potential(root)? {
                Innerness::Inner(v) => Ok(format!("inner\n{}", formats::format_potential(&v))),
                Innerness::NotInner(w) => {
                    let space = ws.space();
                    let text = format!(
                        "not inner\nwitness cycle: {}\nweight: {}\n",
                        space.graph().format_path(&w.cycle.path),
                        space.ring().format(w.weight)
                    );
                    if *expect_inner {
                        Err(Failure::Check(text))
                    } else {
                        Ok(text)
                    }
                }
            }
        }
        Command::Decompose { args, root } => {
            let (_, ws) = load_weights(args)?;
            let space = ws.space();
            let tree = space.spanning_tree(root_class(space, root)?)?;
            let d = ws.decompose(&tree)?;
            let files = [
                ("w1.json", formats::format_weights(&d.tree_trivial)),
                ("w0.json", formats::format_weights(&d.inner)),
                ("potential.json", formats::format_potential(&d.potential)),
            ];
            match &cli.out {
                Some(dir) => {
                    fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
                    let mut listing = String::new();
                    for (name, body) in files {
                        let path = dir.join(name);
                        fs::write(&path, body).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                        listing.push_str(&format!("wrote {}\n", path.display()));
                    }
                    Ok(listing)
                }
                None => Ok(files.iter().map(|(name, body)| format!("# {name}\n{body}")).collect()),
            }
        }
        Command::Enumerate { instance, root } => {
            let alg = load_algebra(instance, None)?;
            let space = WeightSpace::for_algebra(&alg);
            let tree = space.spanning_tree(root_class(&space, root)?)?;
            let all = oracle::enumerate_mult(&space, options(cli))?;
            let inner = oracle::enumerate_inner(&space, options(cli))?;
            let trivial = all.iter().filter(|w| w.is_tree_trivial(&tree)).count();
            Ok(format!(
                "group = {}\nmult = {}\ninner = {}\ntree_trivial = {}\n",
                space.group().len(),
                all.len(),
                inner.len(),
                trivial
            ))
        }
        Command::Verify { instance, trials } => {
            let alg = load_algebra(instance, None)?;
            let seed = cli.seed.unwrap_or(oracle::DEFAULT_SEED);
            let reports = verify(&alg, *trials, seed, options(cli))?;
            let text = to_json(&reports);
            if reports.iter().all(VerificationReport::passed) {
                Ok(text)
            } else {
                Err(Failure::Check(text))
            }
        }
        Command::Apply { args, function } => {
            let (alg, ws) = load_weights(args)?;
            let f = load_function(function, &alg)?;
            Ok(formats::format_function(&ws.apply(&f)?))
        }
        Command::Convolve { instance, f, g } => {
            let alg = load_algebra(instance, None)?;
            let (f, g) = (load_function(f, &alg)?, load_function(g, &alg)?);
            Ok(formats::format_function(&f.convolve(&g)?))
        }
        Command::Invert { instance, f } => {
            let alg = load_algebra(instance, None)?;
            Ok(formats::format_function(&load_function(f, &alg)?.invert()?))
        }
    }
}

fn info(p: &Preorder) -> Outcome {
    let q = p.quotient();
    let space = WeightSpace::new(q.clone(), Ring::parse("Z/2")?);
    let graph = space.graph();
    let classes: Vec<String> = (0..q.len())
        .map(|c| match q.member_labels(c) {
            [one] => one.clone(),
            many => format!("{{{}}}", many.join(",")),
        })
        .collect();
    Ok(format!(
        "n = {}\nclasses = {}\nm = {}\nlambda = {}\nconnected = {}\ncomponents = {}\nheight = {}\n",
        q.len(),
        classes.join(" "),
        graph.edge_count(),
        graph.cyclomatic_number(),
        graph.is_connected(),
        graph.component_count(),
        q.height()
    ))
}

/// Ring checks, the structure checks, multiplicative conjugations when the
/// unit group is small enough, the matrix embedding and the automorphism
/// action on up to 20 enumerated systems.
fn verify(alg: &Arc<IncidenceAlgebra>, trials: usize, seed: u64, opts: Options) -> Result<Vec<VerificationReport>, Error> {
    let space = WeightSpace::for_algebra(alg);
    let mut reports = vec![oracle::verify_ring(alg.ring(), 1000, seed)];
    reports.push(oracle::verify_structure(&space, opts)?);
    match oracle::verify_inner_conjugations(alg, opts) {
        Ok(r) => reports.push(r),
        Err(Error::Guard { .. }) => {}
        Err(e) => return Err(e),
    }
    reports.push(oracle::matrix_report(alg, trials, seed)?);
    let all = oracle::enumerate_mult(&space, opts)?;
    let step = (all.len() / 20).max(1);
    for ws in all.iter().step_by(step).take(20) {
        reports.push(oracle::automorphism_check(ws, alg, trials, seed)?);
    }
    Ok(reports)
}
