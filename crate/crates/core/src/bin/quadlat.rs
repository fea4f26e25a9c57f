use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use quadlat::data::{self, load_catalogue, load_catalogue_unchecked, profile_exists, profiles_at, OneClassGenusEntry};
use quadlat::enumerate::{
    ascension_sweep, classify, find_one_class_spinor, ClassSet, ClassificationReport, GenusOptions, GenusReport,
    Primitivity,
};
use quadlat::input::parse_lattice;
use quadlat::mass::{local_mass, total_mass};
use quadlat::padic::{bad_primes, genus_symbol, jordan_split, local_symbol, p_profile, PProfile};
use quadlat::spinor::{idele_quotient, is_type_e, theta_group};
use quadlat::verify::{Scope, Verifier};
use quadlat::watson::{mu_hat, mu_p};
use quadlat::{Error, GramLattice};

#[derive(Parser)]
#[command(name = "quadlat", version, about = "Classes, genera and spinor genera of positive definite quadratic lattices")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Directory for cached genus reports.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Worker threads for enumerations.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Treat an undecided spinor norm group as fatal (exit code 3).
    #[arg(long, global = true)]
    strict: bool,
    /// One-class genus catalogue (JSON lines).
    #[arg(long, global = true)]
    catalogue: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Lattice,
    Form,
    Any,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Cmd {
    /// Local and global invariants of one lattice.
    Analyze { input: String },
    /// All classes of primitive forms of a discriminant, by genus.
    Classify {
        #[arg(long)]
        disc: u64,
        #[arg(long, default_value_t = 4)]
        rank: usize,
    },
    /// Index-p ascension from a seed set.
    Ascend {
        #[arg(long)]
        prime: u64,
        /// JSON file holding a list of Gram matrices.
        #[arg(long, conflicts_with = "disc")]
        from: Option<PathBuf>,
        /// Seed with every primitive form class of this discriminant.
        #[arg(long)]
        disc: Option<u64>,
        #[arg(long, default_value_t = 4)]
        rank: usize,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Mode::Any)]
        keep: Mode,
    },
    /// Exact local and total masses.
    Mass { input: String },
    /// μ_p at one prime, or the iterated μ̂.
    Mu {
        #[arg(long, required_unless_present = "hat")]
        prime: Option<u64>,
        #[arg(long)]
        hat: bool,
        input: String,
    },
    /// Spinor norm groups and spinor genus counts.
    Theta {
        #[arg(long)]
        prime: Option<u64>,
        input: String,
    },
    /// One-class spinor genera that are not one-class genera.
    FindOcsg {
        #[arg(long, conflicts_with = "range")]
        disc: Option<u64>,
        /// Inclusive discriminant range `A..B`.
        #[arg(long)]
        range: Option<String>,
        #[arg(long, default_value_t = 4)]
        rank: usize,
    },
    /// Local profiles present in the one-class genus catalogue.
    Profiles {
        #[arg(long)]
        prime: u64,
        /// Report whether this profile occurs, e.g. `0,0,1,2`.
        #[arg(long)]
        profile: Option<String>,
    },
    /// Convert a list of lattices (one per line, any input spelling) to the
    /// catalogue format.
    ImportCatalogue { input: PathBuf, output: PathBuf },
    /// Run the reference checks.
    VerifyPaper {
        #[arg(long, value_enum, default_value_t = ScopeArg::Quick)]
        scope: ScopeArg,
    },
}

enum Failure {
    Usage(String),
    Check(String),
    Undecided(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::UnknownFixture(_) | Error::NotPrime(_) | Error::UnsupportedRank(_) => Failure::Usage(e.to_string()),
            Error::ThetaUndecided(..) => Failure::Undecided(e.to_string()),
            e => Failure::Check(e.to_string()),
        }
    }
}

type Out = std::result::Result<(), Failure>;

fn read_input(s: &str) -> quadlat::Result<GramLattice> {
    let p = Path::new(s);
    if !s.starts_with("fixture:") && p.is_file() {
        return parse_lattice(&fs::read_to_string(p)?);
    }
    parse_lattice(s)
}

fn gram_json(l: &GramLattice) -> Value {
    match l.to_i64_rows() {
        Ok(r) => json!(r),
        Err(_) => json!(l.gram().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()),
    }
}

fn emit(format: Format, value: &Value, table: impl FnOnce() -> String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value).expect("serializable")),
        Format::Table => print!("{}", table()),
    }
}

fn genus_json(g: &GenusReport) -> Value {
    json!({
        "symbol": g.symbol.to_string(),
        "mass": g.mass.to_string(),
        "gPlus": g.g_plus,
        "g": g.g,
        "classes": g.classes.iter().map(|c| json!({
            "gram": gram_json(&c.lattice),
            "autOrder": c.aut_order,
            "spinorGenusIndex": c.spinor_genus,
        })).collect::<Vec<_>>(),
    })
}

fn report_json(r: &ClassificationReport) -> Value {
    json!({
        "rank": r.rank,
        "discriminant": r.discriminant.to_string(),
        "classCount": r.class_count(),
        "genera": r.genera.iter().map(genus_json).collect::<Vec<_>>(),
    })
}

fn report_table(r: &ClassificationReport) -> String {
    let mut s = format!("rank {} discriminant {}: {} classes in {} genera\n", r.rank, r.discriminant, r.class_count(), r.genus_count());
    for g in &r.genera {
        s += &format!("genus {}  h={} g+={} g={} mass={}\n", g.symbol, g.class_number(), g.g_plus, g.g, g.mass);
        for c in &g.classes {
            s += &format!("  spn {}  |O|={:<6} {}\n", c.spinor_genus, c.aut_order, c.lattice);
        }
    }
    s
}

fn analyze(g: &Global, input: &str) -> Out {
    let l = read_input(input)?;
    let quot = idele_quotient(&l)?;
    let mut locals = Vec::new();
    for p in bad_primes(&l) {
        let theta = theta_group(&l, p)?;
        locals.push(json!({
            "prime": p,
            "profile": p_profile(&l, p)?.to_string(),
            "jordan": local_symbol(&l, p)?.to_string(),
            "theta": theta.to_string(),
            "localMass": local_mass(&l, p)?.to_string(),
        }));
    }
    let v = json!({
        "gram": gram_json(&l),
        "discriminant": l.discriminant().to_string(),
        "genus": genus_symbol(&l)?.to_string(),
        "local": locals,
        "gPlus": quot.g_plus(),
        "g": quot.g(),
        "mass": total_mass(&l)?.to_string(),
    });
    emit(g.format, &v, || {
        let mut s = format!("gram          {l}\ndiscriminant  {}\ngenus         {}\n", v["discriminant"].as_str().unwrap(), v["genus"].as_str().unwrap());
        for loc in v["local"].as_array().unwrap() {
            s += &format!(
                "p={:<3} profile {}  jordan {}  theta {}  m_p {}\n",
                loc["prime"], loc["profile"].as_str().unwrap(), loc["jordan"].as_str().unwrap(), loc["theta"].as_str().unwrap(), loc["localMass"].as_str().unwrap()
            );
        }
        s + &format!("g+ {}  g {}  mass {}\n", quot.g_plus(), quot.g(), v["mass"].as_str().unwrap())
    });
    Ok(())
}

fn opts(g: &Global) -> GenusOptions {
    GenusOptions { cache: g.cache.clone(), ..GenusOptions::default() }
}

fn mass_cmd(g: &Global, input: &str) -> Out {
    let l = read_input(input)?;
    let mut locals = Vec::new();
    for p in bad_primes(&l) {
        locals.push(json!({ "prime": p, "localMass": local_mass(&l, p)?.to_string() }));
    }
    let v = json!({ "discriminant": l.discriminant().to_string(), "local": locals, "mass": total_mass(&l)?.to_string() });
    emit(g.format, &v, || {
        let mut s = String::new();
        for loc in v["local"].as_array().unwrap() {
            s += &format!("m_{} = {}\n", loc["prime"], loc["localMass"].as_str().unwrap());
        }
        s + &format!("mass = {}\n", v["mass"].as_str().unwrap())
    });
    Ok(())
}

fn mu_cmd(g: &Global, prime: Option<u64>, hat: bool, input: &str) -> Out {
    let l = read_input(input)?;
    let (out, trace): (GramLattice, Vec<(u64, Vec<PProfile>)>) = if hat {
        let r = mu_hat(&l)?;
        (r.lattice, r.trace.into_iter().collect())
    } else {
        let p = prime.expect("clap requires --prime");
        let m = mu_p(&l, p)?;
        (m.clone(), vec![(p, vec![p_profile(&l, p)?, p_profile(&m, p)?])])
    };
    let v = json!({
        "gram": gram_json(&out),
        "discriminant": out.discriminant().to_string(),
        "trace": trace.iter().map(|(p, t)| json!({"prime": p, "profiles": t.iter().map(|x| x.to_string()).collect::<Vec<_>>()})).collect::<Vec<_>>(),
    });
    emit(g.format, &v, || {
        let mut s = format!("{out}\ndiscriminant {}\n", out.discriminant());
        for (p, t) in &trace {
            s += &format!("p={p}: {}\n", t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" -> "));
        }
        s
    });
    Ok(())
}

fn theta_cmd(g: &Global, prime: Option<u64>, input: &str) -> Out {
    let l = read_input(input)?;
    let primes = match prime {
        Some(p) => vec![p],
        None => bad_primes(&l),
    };
    let mut groups = Vec::new();
    for p in primes {
        let th = theta_group(&l, p)?;
        let type_e = p == 2 && is_type_e(&jordan_split(&l, 2)?);
        groups.push(json!({ "prime": p, "theta": th.to_string(), "containsUnits": th.contains_units, "typeE": type_e }));
    }
    let quot = idele_quotient(&l)?;
    let v = json!({ "groups": groups, "gPlus": quot.g_plus(), "g": quot.g() });
    emit(g.format, &v, || {
        let mut s = String::new();
        for x in v["groups"].as_array().unwrap() {
            s += &format!("p={:<3} theta {}  units {}\n", x["prime"], x["theta"].as_str().unwrap(), x["containsUnits"]);
        }
        s + &format!("g+ {}  g {}\n", quot.g_plus(), quot.g())
    });
    Ok(())
}

fn parse_range(s: &str) -> std::result::Result<(u64, u64), Failure> {
    let bad = || Failure::Usage(format!("bad range {s:?}, expected A..B"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn find_ocsg(g: &Global, disc: Option<u64>, range: Option<&str>, rank: usize) -> Out {
    let discs: Vec<u64> = match (disc, range) {
        (Some(d), _) => vec![d],
        (None, Some(r)) => {
            let (a, b) = parse_range(r)?;
            (a..=b).collect()
        }
        (None, None) => return Err(Failure::Usage("give --disc or --range".into())),
    };
    let mut reports = Vec::new();
    for d in discs {
        reports.push(classify(d, rank, &opts(g))?);
    }
    let found = find_one_class_spinor(&reports);
    let v = json!(found.iter().map(|f| json!({
        "discriminant": f.lattice.discriminant().to_string(),
        "gram": gram_json(&f.lattice),
        "h": f.h,
        "hS": f.h_s,
        "g": f.g,
    })).collect::<Vec<_>>());
    emit(g.format, &v, || {
        let mut s = format!("{} one-class spinor genera with h > 1\n", found.len());
        for f in &found {
            s += &format!("d={:<8} h={} g={}  {}\n", f.lattice.discriminant(), f.h, f.g, f.lattice);
        }
        s
    });
    Ok(())
}

fn load_seed(path: &Path, rank: usize) -> std::result::Result<ClassSet, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let grams: Vec<Vec<Vec<i64>>> = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let lats: Vec<GramLattice> = grams.iter().map(|g| GramLattice::from_rows(g)).collect::<quadlat::Result<_>>()?;
    let d = lats.first().map(|l| l.discriminant()).ok_or_else(|| Failure::Usage("empty seed list".into()))?;
    if let Some(l) = lats.iter().find(|l| l.rank() != rank || l.discriminant() != d) {
        return Err(Failure::Usage(format!("seed {l} does not match rank {rank} and discriminant {d}")));
    }
    Ok(ClassSet::from_lattices(rank, d, lats)?)
}

fn catalogue(g: &Global) -> std::result::Result<Vec<OneClassGenusEntry>, Failure> {
    let default = Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("one_class_genera.jsonl");
    let path = g.catalogue.clone().unwrap_or(default);
    if !path.is_file() {
        return Err(Failure::Usage(format!("catalogue {} not found; pass --catalogue", path.display())));
    }
    Ok(if g.strict { load_catalogue(&path)? } else { load_catalogue_unchecked(&path)? })
}

fn profiles_cmd(g: &Global, prime: u64, profile: Option<&str>) -> Out {
    let entries = catalogue(g)?;
    let v = match profile {
        Some(text) => {
            let exps: Vec<u32> = text
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| Failure::Usage(format!("bad profile {text:?}"))))
                .collect::<std::result::Result<_, _>>()?;
            let p = PProfile::new(prime, exps);
            json!({ "profile": p.to_string(), "exists": profile_exists(&entries, prime, &p, None) })
        }
        None => json!(profiles_at(&entries, prime).iter().map(|p| p.to_string()).collect::<Vec<_>>()),
    };
    emit(g.format, &v, || match &v {
        Value::Array(a) => a.iter().map(|x| format!("{}\n", x.as_str().unwrap())).collect(),
        o => format!("{} {}\n", o["profile"].as_str().unwrap(), if o["exists"].as_bool().unwrap() { "present" } else { "absent" }),
    });
    Ok(())
}

fn import_catalogue(input: &Path, output: &Path) -> Out {
    let text = fs::read_to_string(input).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
    let mut grams = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.split('#').next().unwrap_or("").trim();
        if t.is_empty() {
            continue;
        }
        let l = parse_lattice(t).map_err(|e| match e {
            Error::Parse { msg, .. } => Failure::Usage(format!("line {}: {msg}", i + 1)),
            e => Failure::Usage(format!("line {}: {e}", i + 1)),
        })?;
        grams.push(l);
    }
    data::write_catalogue(output, &grams)?;
    eprintln!("wrote {} entries to {}", grams.len(), output.display());
    Ok(())
}

fn verify(g: &Global, scope: ScopeArg) -> Out {
    let scope = match scope {
        ScopeArg::Quick => Scope::Quick,
        ScopeArg::Full => Scope::Full,
    };
    let verdicts = Verifier::new(opts(g)).run(scope);
    emit(g.format, &json!(verdicts), || verdicts.iter().map(|v| v.line() + "\n").collect());
    match verdicts.iter().filter(|v| !v.pass).count() {
        0 => Ok(()),
        n => Err(Failure::Check(format!("{n} checks failed"))),
    }
}

fn run(cli: Cli) -> Out {
    let g = &cli.global;
    if let Some(n) = g.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match &cli.cmd {
        Cmd::Analyze { input } => analyze(g, input),
        Cmd::Classify { disc, rank } => {
            let r = classify(*disc, *rank, &opts(g))?;
            emit(g.format, &report_json(&r), || report_table(&r));
            Ok(())
        }
        Cmd::Ascend { prime, from, disc, rank, steps, keep } => {
            let seed = match (from, disc) {
                (Some(p), _) => load_seed(p, *rank)?,
                (None, Some(d)) => quadlat::enumerate::form_classes(*rank, *d)?,
                (None, None) => return Err(Failure::Usage("give --from or --disc".into())),
            };
            let mode = match keep {
                Mode::Lattice => Primitivity::Lattice,
                Mode::Form => Primitivity::Form,
                Mode::Any => Primitivity::Any,
            };
            let levels = ascension_sweep(&seed, *prime, *steps, mode, &opts(g))?;
            let v = json!(levels.iter().map(report_json).collect::<Vec<_>>());
            emit(g.format, &v, || {
                levels
                    .iter()
                    .map(|r| format!("discriminant {}: {} classes in {} genera\n", r.discriminant, r.class_count(), r.genus_count()))
                    .collect()
            });
            Ok(())
        }
        Cmd::Mass { input } => mass_cmd(g, input),
        Cmd::Mu { prime, hat, input } => mu_cmd(g, *prime, *hat, input),
        Cmd::Theta { prime, input } => theta_cmd(g, *prime, input),
        Cmd::FindOcsg { disc, range, rank } => find_ocsg(g, *disc, range.as_deref(), *rank),
        Cmd::Profiles { prime, profile } => profiles_cmd(g, *prime, profile.as_deref()),
        Cmd::ImportCatalogue { input, output } => import_catalogue(input, output),
        Cmd::VerifyPaper { scope } => verify(g, *scope),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let strict = cli.global.strict;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Undecided(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(if strict { 3 } else { 1 })
        }
    }
}
