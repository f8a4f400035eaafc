//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or malformed input, 2 internal invariant violation.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::complex::SimplicialMap;
use crate::error::{Error, Result};
use crate::euler::{dual, euler_integral, pushforward};
use crate::exactla::LaurentPolynomial;
use crate::hecke::{kl_oracle, Coxeter, HeckeAlgebra, Perm, SymmetricGroup};
use crate::io;
use crate::pathalg::{quadratic_duality_check, Quiver};
use crate::perverse::{ic_ext, BBDGPerversity, DeltaFunction, SupportCalculator};
use crate::sheaf::{dualizing_complex, ext_groups};
use crate::strat::{ih_betti, ih_duality_check, isolated_singularity_oracle, GMPerversity};
use crate::toric::{hl_check, ih_poly, local_table, named_polytope, simple_formula, FaceLattice};

#[derive(Parser, Debug)]
#[command(name = "persheaf", version, about = "Exact sheaf, intersection and perverse computations on simplicial complexes")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simplicial complexes.
    #[command(subcommand)]
    Complex(ComplexCmd),
    /// Cellular sheaves.
    #[command(subcommand)]
    Sheaf(SheafCmd),
    /// Intersection homology of stratified complexes.
    #[command(subcommand)]
    Ih(IhCmd),
    /// Cellular perverse sheaves.
    #[command(subcommand)]
    Perverse(PerverseCmd),
    /// Path algebra of the quiver of elementary relations.
    #[command(subcommand)]
    Pathalg(PathalgCmd),
    /// Constructible functions.
    #[command(subcommand)]
    Euler(EulerCmd),
    /// Toric intersection cohomology from polytopes.
    #[command(subcommand)]
    Toric(ToricCmd),
    /// Kazhdan–Lusztig polynomials of symmetric groups.
    #[command(subcommand)]
    Hecke(HeckeCmd),
}

#[derive(Subcommand, Debug)]
enum ComplexCmd {
    /// f-vector, Betti numbers and Euler characteristic.
    Info { file: PathBuf },
    /// Emit a named complex (simplex:N, sphere:N, circle:M, torus:N, cone/…, suspension/…) as JSON.
    Build { name: String },
}

#[derive(Subcommand, Debug)]
enum SheafCmd {
    /// Cochain cohomology H^*(K; A).
    Cohomology { file: PathBuf },
    /// Ext^*(A, B).
    Ext { a: PathBuf, b: PathBuf },
    /// Global-section cohomology of the dualizing complex of a complex file.
    Dualizing { complex: PathBuf },
}

#[derive(Subcommand, Debug)]
enum IhCmd {
    /// Intersection homology Betti numbers.
    Compute {
        file: PathBuf,
        /// zero, top, lower-middle, upper-middle, or p_2,…,p_n.
        #[arg(long, short)]
        perversity: String,
        /// Work on the barycentric subdivision.
        #[arg(long)]
        subdivide: bool,
        /// Compare against the isolated-singularity oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Check IH_i^p = IH_{n−i}^q.
    Duality {
        file: PathBuf,
        #[arg(long, short)]
        p: String,
        /// Defaults to the complement of p.
        #[arg(long, short)]
        q: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum PerverseCmd {
    /// Cohomology of the cellular complex.
    Cohomology { file: PathBuf },
    /// Ext between IC objects.
    Ext {
        complex: PathBuf,
        /// zero, top, middle, or p(0),…,p(n).
        #[arg(long, allow_hyphen_values = true)]
        perversity: String,
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        tau: String,
    },
    /// Verdier dual, emitted as JSON.
    Dual { file: PathBuf },
    /// Cohomology of IC objects with supports in open perverse cells.
    Support {
        complex: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        perversity: String,
        /// Restrict to IC_τ.
        #[arg(long)]
        tau: Option<String>,
        /// Restrict to the cell of σ.
        #[arg(long)]
        sigma: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum PathalgCmd {
    /// Graded dimensions of F, A = F/I and B = F/J.
    Dims {
        complex: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        perversity: String,
    },
    /// Check D = E^⊥ and the multiplication rule in A.
    Duality {
        complex: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        perversity: String,
    },
}

#[derive(Subcommand, Debug)]
enum EulerCmd {
    /// Euler integral.
    Integrate { file: PathBuf },
    /// Pushforward along a simplicial map.
    Push {
        file: PathBuf,
        /// JSON {"target": complex, "vertex_map": [...]}.
        #[arg(long, conflicts_with = "to_point")]
        map: Option<PathBuf>,
        #[arg(long)]
        to_point: bool,
    },
    /// Euler–Verdier dual.
    Dual { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum ToricCmd {
    /// IH Poincaré polynomial and local polynomials. Takes a JSON file or a
    /// name: simplex:N, cube:N, square, polygon:M, cross:N, pyramid, prism.
    Ih { polytope: String },
}

#[derive(Subcommand, Debug)]
enum HeckeCmd {
    /// P_{y,w}; all y when --y is omitted.
    Kl {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        w: String,
        #[arg(long)]
        y: Option<String>,
        /// Compare against the bar-invariance linear solve.
        #[arg(long)]
        oracle: bool,
    },
    /// All nonzero P_{y,w}.
    Table {
        #[arg(long)]
        n: usize,
    },
}

/// A command result in both renderings.
struct Report {
    table: String,
    json: Value,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvariantViolation { .. } => 2,
        _ => 1,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("PERSHEAF_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("PERSHEAF_THREADS='{raw}' is not a natural")))?;
    // a pool may already exist when embedded; keep it
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs the command line, writing to stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(err, "error: {e}");
        return exit_code(&e);
    }
    match dispatch(&cli.command) {
        Ok(report) => {
            let text = match cli.format {
                Format::Table => report.table,
                Format::Json => report.json.to_string(),
            };
            let _ = writeln!(out, "{}", text.trim_end());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn violation(name: &str) -> Error {
    Error::InvariantViolation { name: name.into() }
}

fn degree_table(prefix: &str, h: &BTreeMap<i32, usize>) -> String {
    h.iter().map(|(r, d)| format!("{prefix}{r} = {d}\n")).collect()
}

fn degree_json(h: &BTreeMap<i32, usize>) -> Value {
    Value::Object(h.iter().map(|(r, d)| (r.to_string(), json!(d))).collect())
}

fn parse_gm(text: &str, n: usize) -> Result<GMPerversity> {
    match text {
        "zero" => Ok(GMPerversity::zero(n)),
        "top" => Ok(GMPerversity::top(n)),
        "lower-middle" | "middle" => Ok(GMPerversity::lower_middle(n)),
        "upper-middle" => Ok(GMPerversity::lower_middle(n).complement()),
        _ => {
            let vals = text
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::InvalidParameter(format!("bad perversity '{text}'")))?;
            GMPerversity::new(vals)
        }
    }
}

fn parse_bbdg(text: &str, n: usize) -> Result<BBDGPerversity> {
    match text {
        "zero" => Ok(BBDGPerversity::zero(n)),
        "top" => Ok(BBDGPerversity::top(n)),
        "middle" => Ok(BBDGPerversity::middle(n)),
        _ => {
            let vals = text
                .split(',')
                .map(|t| t.trim().parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::InvalidParameter(format!("bad perversity '{text}'")))?;
            BBDGPerversity::new(vals)
        }
    }
}

fn simplex_arg(k: &crate::complex::SimplicialComplex, key: &str) -> Result<usize> {
    let s = crate::complex::Simplex::parse_key(key)?;
    k.id(&s)
        .ok_or_else(|| Error::InvalidArgument(format!("simplex '{key}' is not in the complex")))
}

fn delta_for(complex: &Path, perversity: &str) -> Result<Arc<DeltaFunction>> {
    let k = io::read_complex(complex)?;
    let p = parse_bbdg(perversity, k.dim())?;
    Ok(Arc::new(DeltaFunction::new(k, p)?))
}

fn dispatch(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Complex(c) => complex_cmd(c),
        Command::Sheaf(c) => sheaf_cmd(c),
        Command::Ih(c) => ih_cmd(c),
        Command::Perverse(c) => perverse_cmd(c),
        Command::Pathalg(c) => pathalg_cmd(c),
        Command::Euler(c) => euler_cmd(c),
        Command::Toric(c) => toric_cmd(c),
        Command::Hecke(c) => hecke_cmd(c),
    }
}

fn complex_cmd(c: &ComplexCmd) -> Result<Report> {
    match c {
        ComplexCmd::Info { file } => {
            let k = io::read_complex(file)?;
            let f = k.f_vector();
            let b = k.betti();
            let chi = k.euler_characteristic();
            Ok(Report {
                table: format!(
                    "dim = {}\nvertices = {}\nf-vector = {f:?}\nbetti = {b:?}\neuler characteristic = {chi}\n",
                    k.dim(),
                    k.vertex_count()
                ),
                json: json!({"dim": k.dim(), "vertices": k.vertex_count(), "f_vector": f, "betti": b, "euler_characteristic": chi}),
            })
        }
        ComplexCmd::Build { name } => {
            let k = io::named_complex(name)?;
            let j = io::complex_to_json(&k);
            Ok(Report {
                table: j.to_string(),
                json: j,
            })
        }
    }
}

fn sheaf_cmd(c: &SheafCmd) -> Result<Report> {
    match c {
        SheafCmd::Cohomology { file } => {
            let a = io::read_sheaf(file)?;
            let h = a.cochain_cohomology()?;
            Ok(Report {
                table: degree_table("H^", &h),
                json: json!({"cohomology": degree_json(&h)}),
            })
        }
        SheafCmd::Ext { a, b } => {
            let a = io::read_sheaf(a)?;
            let b = io::read_sheaf(b)?;
            if a.base() != b.base() {
                return Err(Error::InvalidArgument("sheaves live on different complexes".into()));
            }
            let h = ext_groups(&a, &b)?;
            Ok(Report {
                table: degree_table("Ext^", &h),
                json: json!({"ext": degree_json(&h)}),
            })
        }
        SheafCmd::Dualizing { complex } => {
            let k = io::read_complex(complex)?;
            let betti = k.betti();
            let h = dualizing_complex(k)?.global_section_cohomology()?;
            for (&r, &d) in &h {
                let j = (-r) as usize;
                if betti.get(j).copied().unwrap_or(0) != d {
                    return Err(violation("H^{-j}(K; D) = H_j(K)"));
                }
            }
            Ok(Report {
                table: degree_table("H^", &h),
                json: json!({"cohomology": degree_json(&h), "betti": betti}),
            })
        }
    }
}

fn ih_cmd(c: &IhCmd) -> Result<Report> {
    match c {
        IhCmd::Compute {
            file,
            perversity,
            subdivide,
            oracle,
        } => {
            let mut s = io::read_stratified(file)?;
            if *subdivide {
                s = s.subdivide();
            }
            let p = parse_gm(perversity, s.dim())?;
            let ih = ih_betti(&s, &p)?;
            let mut table: String = ih
                .iter()
                .enumerate()
                .map(|(i, d)| format!("IH_{i} = {d}\n"))
                .collect();
            let mut j = json!({"perversity": p.values(), "ih": ih});
            if *oracle {
                let o = isolated_singularity_oracle(&s, &p)?;
                if o != ih {
                    return Err(violation("intersection homology matches the oracle"));
                }
                table.push_str("oracle: agrees\n");
                j["oracle"] = json!(o);
            }
            Ok(Report { table, json: j })
        }
        IhCmd::Duality { file, p, q } => {
            let s = io::read_stratified(file)?;
            let p = parse_gm(p, s.dim())?;
            let q = match q {
                Some(q) => parse_gm(q, s.dim())?,
                None => p.complement(),
            };
            let holds = ih_duality_check(&s, &p, &q)?;
            let a = ih_betti(&s, &p)?;
            let b = ih_betti(&s, &q)?;
            Ok(Report {
                table: format!("IH^{p} = {a:?}\nIH^{q} = {b:?}\nduality: {}\n", yes(holds)),
                json: json!({"p": p.values(), "q": q.values(), "ih_p": a, "ih_q": b, "duality": holds}),
            })
        }
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

fn perverse_cmd(c: &PerverseCmd) -> Result<Report> {
    match c {
        PerverseCmd::Cohomology { file } => {
            let s = io::read_perverse(file)?;
            let h = s.cohomology()?;
            Ok(Report {
                table: degree_table("H^", &h),
                json: json!({"cohomology": degree_json(&h)}),
            })
        }
        PerverseCmd::Ext {
            complex,
            perversity,
            sigma,
            tau,
        } => {
            let d = delta_for(complex, perversity)?;
            let s = simplex_arg(d.base(), sigma)?;
            let t = simplex_arg(d.base(), tau)?;
            let (deg, dim) = ic_ext(&d, s, t);
            let table = if dim > 0 {
                format!("Ext^{deg} = {dim}\n")
            } else {
                "Ext = 0 in all degrees\n".to_string()
            };
            Ok(Report {
                table,
                json: json!({"degree": deg, "dim": dim}),
            })
        }
        PerverseCmd::Dual { file } => {
            let s = io::read_perverse(file)?;
            let d = s.verdier_dual()?;
            if !d.is_valid() {
                return Err(violation("Verdier dual satisfies the relations"));
            }
            let j = io::perverse_to_json(&d);
            Ok(Report {
                table: j.to_string(),
                json: j,
            })
        }
        PerverseCmd::Support {
            complex,
            perversity,
            tau,
            sigma,
        } => {
            let d = delta_for(complex, perversity)?;
            let k = d.base();
            let taus: Vec<usize> = match tau {
                Some(t) => vec![simplex_arg(k, t)?],
                None => (0..k.len()).collect(),
            };
            let sigmas: Vec<usize> = match sigma {
                Some(s) => vec![simplex_arg(k, s)?],
                None => (0..k.len()).collect(),
            };
            let calc = SupportCalculator::new(d.clone());
            let mut table = String::new();
            let mut rows = Vec::new();
            for &t in &taus {
                for &s in &sigmas {
                    let h = calc.ic_support(t, s)?;
                    let expected: BTreeMap<i32, usize> = if s == t {
                        [(-d.delta(s) as i32, 1)].into()
                    } else {
                        BTreeMap::new()
                    };
                    if h != expected {
                        return Err(violation("support cohomology of IC objects is concentrated"));
                    }
                    let (tk, sk) = (k.simplex(t).key(), k.simplex(s).key());
                    if !h.is_empty() {
                        let degs: Vec<String> = h.iter().map(|(r, n)| format!("H^{r} = {n}")).collect();
                        table.push_str(&format!("IC_{tk} on cell {sk}: {}\n", degs.join(", ")));
                    }
                    rows.push(json!({"tau": tk, "sigma": sk, "cohomology": degree_json(&h)}));
                }
            }
            table.push_str(&format!("{} pairs checked, all others vanish\n", taus.len() * sigmas.len()));
            Ok(Report {
                table,
                json: json!({"pairs": rows}),
            })
        }
    }
}

fn pathalg_cmd(c: &PathalgCmd) -> Result<Report> {
    match c {
        PathalgCmd::Dims {
            complex,
            perversity,
        } => {
            let q = Quiver::new(delta_for(complex, perversity)?);
            let rows = q.dimension_table();
            let mut table = String::from("r\tF\tA\tB\tpairs\n");
            for r in &rows {
                table.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", r.r, r.f, r.a, r.b, r.ext_pairs));
            }
            Ok(Report {
                table,
                json: json!({"dims": rows}),
            })
        }
        PathalgCmd::Duality {
            complex,
            perversity,
        } => {
            let q = Quiver::new(delta_for(complex, perversity)?);
            let report = quadratic_duality_check(&q);
            let mult = q.a_multiplication_check();
            if !report.holds() {
                return Err(violation("D is the orthogonal complement of E"));
            }
            if !mult {
                return Err(violation("multiplication rule in A"));
            }
            Ok(Report {
                table: format!(
                    "gap-2 pairs: {}\nD = E^perp: holds\nA multiplication rule: holds\n",
                    report.pairs_checked
                ),
                json: json!({"pairs_checked": report.pairs_checked, "duality": true, "multiplication": true}),
            })
        }
    }
}

fn euler_cmd(c: &EulerCmd) -> Result<Report> {
    match c {
        EulerCmd::Integrate { file } => {
            let f = io::read_function(file)?;
            let x = euler_integral(&f);
            Ok(Report {
                table: format!("{x}\n"),
                json: json!({"integral": x}),
            })
        }
        EulerCmd::Push { file, map, to_point } => {
            let f = io::read_function(file)?;
            let pi = match (map, to_point) {
                (Some(m), _) => {
                    let v = io::read_json(m)?;
                    let dir = m.parent().map(Path::to_path_buf).unwrap_or_default();
                    let (target, vm) = io::map_target_from_value(&v, &dir)?;
                    SimplicialMap::new(f.base().clone(), target, vm)?
                }
                (None, true) => SimplicialMap::to_point(f.base()),
                (None, false) => {
                    return Err(Error::InvalidArgument("give --map or --to-point".into()));
                }
            };
            let g = pushforward(&f, &pi)?;
            if euler_integral(&g) != euler_integral(&f) {
                return Err(violation("pushforward preserves the Euler integral"));
            }
            let j = io::function_to_json(&g);
            Ok(Report {
                table: j.to_string(),
                json: j,
            })
        }
        EulerCmd::Dual { file } => {
            let f = io::read_function(file)?;
            let d = dual(&f);
            if dual(&d) != f {
                return Err(violation("D∘D = id"));
            }
            let j = io::function_to_json(&d);
            Ok(Report {
                table: j.to_string(),
                json: j,
            })
        }
    }
}

fn toric_cmd(c: &ToricCmd) -> Result<Report> {
    let ToricCmd::Ih { polytope } = c;
    let path = Path::new(polytope);
    let facets = if path.exists() {
        io::polytope_from_value(&io::read_json(path)?)?
    } else {
        named_polytope(polytope)?
    };
    let p = FaceLattice::from_facets(&facets)?;
    let h = ih_poly(&p);
    if !hl_check(&h, p.dim()) {
        return Err(violation("palindromic and unimodal IH polynomial"));
    }
    if p.is_simple() && simple_formula(&p)? != h {
        return Err(violation("recursion agrees with f(t²−1) on simple polytopes"));
    }
    let local = local_table(&p);
    let mut table = format!("{h}\n");
    let mut nontrivial = serde_json::Map::new();
    for (face, l) in &local {
        if *l != LaurentPolynomial::one() {
            let key = face.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
            table.push_str(&format!("local at face {{{key}}}: {l}\n"));
            nontrivial.insert(key, json!(l.to_string()));
        }
    }
    Ok(Report {
        table,
        json: json!({"h": h.to_string(), "f_vector": p.f_vector(), "coefficients": h.dense(), "local": nontrivial}),
    })
}

fn p_string(p: &LaurentPolynomial) -> String {
    p.display_in("q")
}

fn hecke_cmd(c: &HeckeCmd) -> Result<Report> {
    match c {
        HeckeCmd::Kl { n, w, y, oracle } => {
            let g = SymmetricGroup::new(*n)?;
            let w = Perm::parse(w)?;
            g.check(&w)?;
            let alg = HeckeAlgebra::new(g);
            let table = alg.kl_table();
            let column = table.column(&w).clone();
            if *oracle && kl_oracle(&alg, &w)? != column {
                return Err(violation("KL recursion matches the bar-invariance solve"));
            }
            let suffix = if *oracle { "oracle: agrees\n" } else { "" };
            match y {
                Some(y) => {
                    let y = Perm::parse(y)?;
                    g.check(&y)?;
                    let p = table.p(&y, &w);
                    Ok(Report {
                        table: format!("P = {}\n{suffix}", p_string(&p)),
                        json: json!({"y": y.to_string(), "w": w.to_string(), "P": p_string(&p), "coefficients": p.dense()}),
                    })
                }
                None => {
                    let mut t = String::new();
                    let mut m = serde_json::Map::new();
                    for (y, p) in &column {
                        t.push_str(&format!("P[{y}] = {}\n", p_string(p)));
                        m.insert(y.to_string(), json!(p_string(p)));
                    }
                    t.push_str(suffix);
                    Ok(Report {
                        table: t,
                        json: json!({"w": w.to_string(), "P": m}),
                    })
                }
            }
        }
        HeckeCmd::Table { n } => {
            let g = SymmetricGroup::new(*n)?;
            let table = HeckeAlgebra::new(g).kl_table();
            let mut t = String::new();
            let mut rows = Vec::new();
            for w in g.elements() {
                for (y, p) in table.column(&w) {
                    t.push_str(&format!("{y}\t{w}\t{}\n", p_string(p)));
                    rows.push(json!({"y": y.to_string(), "w": w.to_string(), "P": p_string(p)}));
                }
            }
            Ok(Report {
                table: t,
                json: json!({"n": n, "entries": rows}),
            })
        }
    }
}
