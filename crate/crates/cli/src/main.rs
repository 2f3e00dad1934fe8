use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use orbprod::classes::ClassDescriptor;
use orbprod::densities::{DensityKind, ProductDensity};
use orbprod::experiments::{analytic_density, compare, convergence_study, product_experiment, Histogram, DEFAULT_BINS};
use orbprod::group::Flavor;
use orbprod::harmonic::{nu_series, series_diagnostics, Summation};
use orbprod::io::{write_csv, write_json, Cell, Provenance};
use orbprod::pointsets::{
    deterministic_product_angles, icosahedral_lattice, minimize_energy, polar_points, random_points, riesz_energy,
    thomson_best_of, SpherePointSet,
};
use orbprod::quantize::QuantizationReport;
use orbprod::rng::stream;
use serde::Serialize;

mod angle;

#[derive(Parser, Debug)]
#[command(
    name = "orbprod",
    version,
    about = "Products of random conjugacy and spherical classes in SU(2), SL(2,R), SL(2,C)"
)]
struct Cli {
    /// Random seed; every command is deterministic given its arguments and seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Sample size (command-specific default).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    n: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format (command-specific default).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Grid points or histogram bins.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// Conjugacy classes of SU(2); parameters are class angles.
    #[value(alias = "CONJ_SU2")]
    Conj,
    /// Spherical classes of SU(2); parameters are |a11| in (0, 1).
    #[value(name = "sphA", alias = "SPH_SU2")]
    SphA,
    /// Spherical classes of SL(2,R); parameters are Cartan parameters.
    #[value(name = "sphB", alias = "SPH_SL2R")]
    SphB,
    /// Spherical classes of SL(2,C); parameters are Cartan parameters.
    #[value(name = "sphC", alias = "SPH_SL2C")]
    SphC,
}

impl Kind {
    fn density_kind(self) -> DensityKind {
        match self {
            Kind::Conj => DensityKind::ConjSu2,
            Kind::SphA => DensityKind::SphSu2,
            Kind::SphB => DensityKind::SphSl2R,
            Kind::SphC => DensityKind::SphSl2C,
        }
    }

    fn class(self, p: f64) -> orbprod::Result<ClassDescriptor<f64>> {
        match self {
            Kind::Conj => ClassDescriptor::conjugacy(p),
            Kind::SphA => ClassDescriptor::spherical_compact(p),
            Kind::SphB => ClassDescriptor::spherical_nc(p, Flavor::Real),
            Kind::SphC => ClassDescriptor::spherical_nc(p, Flavor::Complex),
        }
    }
}

#[derive(clap::Args, Debug, Clone, Copy)]
struct PairArgs {
    #[arg(value_enum)]
    kind: Kind,
    /// First class parameter (angles accept `pi/3`, `2pi/3`, `π/2`).
    #[arg(value_parser = angle::parse, allow_hyphen_values = true)]
    p: f64,
    /// Second class parameter.
    #[arg(value_parser = angle::parse, allow_hyphen_values = true)]
    q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Icosa,
    Polar,
    Random,
    Minimized,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analytic pdf, cdf and unnormalized value on a grid over the support.
    Density(PairArgs),
    /// Matrix-product experiment against the analytic density.
    Compare(PairArgs),
    /// KS distance against sample size, averaged over seeds.
    Convergence {
        #[command(flatten)]
        pair: PairArgs,
        /// Sample sizes, comma-separated and ascending.
        #[arg(long, value_delimiter = ',', default_values_t = [1_000usize, 10_000, 100_000])]
        sizes: Vec<usize>,
        /// Number of seeds, counted up from --seed.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
    },
    /// Stated versus numerically verified normalization constants.
    Constants(PairArgs),
    /// Point set on the unit sphere: `icosa M N`, `polar N`, `random N`, `minimized N`.
    Pointset {
        #[arg(value_enum)]
        method: Method,
        params: Vec<usize>,
        /// Riesz exponent used for the energy report and minimization.
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 500)]
        iters: usize,
    },
    /// Best Riesz-energy configuration over several random restarts.
    Thomson {
        points: usize,
        #[arg(default_value_t = 1.0)]
        s: f64,
        #[arg(default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 5000)]
        iters: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Product measure of two point sets placed on conjugacy classes.
    Discretize {
        #[arg(value_enum)]
        method: Method,
        #[arg(value_parser = angle::parse)]
        alpha: f64,
        #[arg(value_parser = angle::parse)]
        beta: f64,
        /// Points per set; icosahedral sets use the nearest class (13, 3) by default.
        #[arg(long, default_value_t = 2172)]
        points: usize,
    },
    /// Clebsch-Gordan labels against the continuous product support.
    Quantize {
        #[arg(value_name = "N")]
        first: u32,
        #[arg(value_name = "M")]
        second: u32,
    },
    /// Character-series values at growing truncation.
    Series {
        #[arg(value_parser = angle::parse)]
        alpha: f64,
        #[arg(value_parser = angle::parse)]
        beta: f64,
        #[arg(value_parser = angle::parse)]
        theta: f64,
        #[arg(default_value_t = 10_000)]
        k: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Lib(orbprod::Error),
    Io(io::Error),
    Usage(String),
}

impl From<orbprod::Error> for Failure {
    fn from(e: orbprod::Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<(), Failure>;

struct Ctx {
    seed: u64,
    n: Option<u64>,
    format: Option<Format>,
    grid: Option<usize>,
    out: Option<PathBuf>,
    provenance: Provenance,
}

impl Ctx {
    fn sink(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn n_or(&self, default: usize) -> usize {
        self.n.map_or(default, |n| n as usize)
    }

    fn prov(&self) -> Provenance {
        self.provenance.clone()
    }

    fn json<S: Serialize>(&self, p: &Provenance, v: &S) -> Outcome {
        write_json(self.sink()?, p, v)?;
        Ok(())
    }

    fn csv(&self, p: &Provenance, header: &[&str], rows: Vec<Vec<Cell>>) -> Outcome {
        write_csv(self.sink()?, p, header, rows)?;
        Ok(())
    }
}

fn pair_density(pair: &PairArgs) -> orbprod::Result<ProductDensity<f64>> {
    let (a, b) = (pair.kind.class(pair.p)?, pair.kind.class(pair.q)?);
    analytic_density(&a, &b)
}

fn cmd_density(ctx: &Ctx, pair: &PairArgs) -> Outcome {
    let d = pair_density(pair)?;
    let grid = ctx.grid.unwrap_or(DEFAULT_BINS);
    if grid < 2 {
        return Err(Failure::Usage("--grid must be at least 2".into()));
    }
    let curve = d.curve(grid);
    let p = ctx
        .prov()
        .with("kind", d.kind.name())
        .with("support", format!("[{:.16e}, {:.16e}]", d.support.lo, d.support.hi));
    match ctx.format_or(Format::Csv) {
        Format::Csv => ctx.csv(
            &p,
            &["point", "pdf", "cdf", "raw", "singular"],
            curve
                .iter()
                .map(|c| {
                    let pdf = if c.singular { f64::INFINITY } else { c.pdf };
                    vec![c.point.into(), pdf.into(), c.cdf.into(), c.raw.into(), c.singular.into()]
                })
                .collect(),
        ),
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                point: f64,
                pdf: Option<f64>,
                cdf: f64,
                raw: Option<f64>,
                singular: bool,
            }
            let rows: Vec<Row> = curve
                .iter()
                .map(|c| Row {
                    point: c.point,
                    pdf: (!c.singular).then_some(c.pdf),
                    cdf: c.cdf,
                    raw: c.raw.is_finite().then_some(c.raw),
                    singular: c.singular,
                })
                .collect();
            ctx.json(&p, &rows)
        }
    }
}

fn cmd_compare(ctx: &Ctx, pair: &PairArgs) -> Outcome {
    let (a, b) = (pair.kind.class(pair.p)?, pair.kind.class(pair.q)?);
    let n = ctx.n_or(1_000_000);
    let p = ctx.prov().with("n", n);
    match ctx.format_or(Format::Json) {
        Format::Json => ctx.json(&p, &compare(&a, &b, n, ctx.seed)?),
        Format::Csv => {
            let d = analytic_density(&a, &b)?;
            let sample = product_experiment(&a, &b, n, ctx.seed)?;
            let bins = ctx.grid.unwrap_or(DEFAULT_BINS);
            let h = Histogram::from_samples(d.support.lo, d.support.hi, bins, &sample)?;
            let ks = orbprod::experiments::ks_distance(&sample, |x| d.cdf(x))?;
            let p = p.with("ks", format!("{ks:.16e}")).with("l1", format!("{:.16e}", h.l1_against(|x| d.cdf(x))));
            histogram_csv(ctx, &p, &h, |x| d.cdf(x))
        }
    }
}

fn histogram_csv(ctx: &Ctx, p: &Provenance, h: &Histogram, cdf: impl Fn(f64) -> f64) -> Outcome {
    let rows = h
        .rows(cdf)
        .into_iter()
        .enumerate()
        .map(|(i, (center, count, pdf))| vec![center.into(), count.into(), h.density(i).into(), pdf.into()])
        .collect();
    ctx.csv(p, &["center", "count", "empirical_pdf", "analytic_pdf"], rows)
}

fn cmd_convergence(ctx: &Ctx, pair: &PairArgs, sizes: &[usize], seeds: u64) -> Outcome {
    let (a, b) = (pair.kind.class(pair.p)?, pair.kind.class(pair.q)?);
    let seeds: Vec<u64> = (0..seeds).map(|i| ctx.seed.wrapping_add(i)).collect();
    let t = convergence_study(&a, &b, sizes, &seeds)?;
    let p = ctx.prov().with("slope", format!("{:.16e}", t.slope));
    match ctx.format_or(Format::Csv) {
        Format::Json => ctx.json(&p, &t),
        Format::Csv => ctx.csv(
            &p,
            &["n", "mean_ks", "sd_ks"],
            t.rows.iter().map(|r| vec![r.n.into(), r.mean_ks.into(), r.sd_ks.into()]).collect(),
        ),
    }
}

fn cmd_constants(ctx: &Ctx, pair: &PairArgs) -> Outcome {
    let d = ProductDensity::new(pair.kind.density_kind(), pair.p, pair.q).map_err(|e| match e {
        orbprod::Error::DegenerateInput(m) if pair.kind == Kind::Conj => orbprod::Error::DegenerateClass(m),
        e => e,
    })?;
    let r = d.constants_report()?;
    match ctx.format_or(Format::Json) {
        Format::Json => ctx.json(&ctx.prov(), &r),
        Format::Csv => ctx.csv(
            &ctx.prov(),
            &["kind", "p", "q", "stated_constant", "verified_constant", "ratio", "flagged"],
            vec![vec![
                r.kind.name().into(),
                r.params[0].into(),
                r.params[1].into(),
                r.stated_constant.unwrap_or(f64::NAN).into(),
                r.verified_constant.into(),
                r.ratio.unwrap_or(f64::NAN).into(),
                r.flagged.into(),
            ]],
        ),
    }
}

fn build_pointset(
    ctx: &Ctx,
    method: Method,
    params: &[usize],
    s: f64,
    iters: usize,
) -> Result<SpherePointSet, Failure> {
    let one = |name: &str| match params {
        [n] if *n >= 2 => Ok(*n),
        _ => Err(Failure::Usage(format!("InvalidParams: `{name}` takes one point count N >= 2"))),
    };
    Ok(match method {
        Method::Icosa => match params {
            [m, n] => icosahedral_lattice(*m, *n)?,
            _ => return Err(Failure::Usage("InvalidParams: `icosa` takes two class parameters M N".into())),
        },
        Method::Polar => polar_points(one("polar")?)?,
        Method::Random => random_points(one("random")?, &mut stream(ctx.seed, 0)),
        Method::Minimized => minimize_energy(&polar_points(one("minimized")?)?, s, iters, 1e-9)?.set,
    })
}

fn points_csv(ctx: &Ctx, p: &Provenance, ps: &SpherePointSet) -> Outcome {
    ctx.csv(p, &["x", "y", "z"], ps.points.iter().map(|v| vec![v[0].into(), v[1].into(), v[2].into()]).collect())
}

fn cmd_pointset(ctx: &Ctx, method: Method, params: &[usize], s: f64, iters: usize) -> Outcome {
    let ps = build_pointset(ctx, method, params, s, iters)?;
    let energy = if ps.len() >= 2 { Some(riesz_energy(&ps, s)?) } else { None };
    let mut p = ctx.prov().with("points", ps.len());
    if let Some(e) = &energy {
        p = p.with("energy", format!("{:.16e}", e.energy)).with("s", s);
    }
    match ctx.format_or(Format::Csv) {
        Format::Csv => points_csv(ctx, &p, &ps),
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                set: &'a SpherePointSet,
                energy: Option<orbprod::pointsets::EnergyReport>,
            }
            ctx.json(&p, &Out { set: &ps, energy })
        }
    }
}

fn cmd_thomson(ctx: &Ctx, points: usize, s: f64, restarts: usize, iters: usize, tol: f64) -> Outcome {
    if points < 2 {
        return Err(Failure::Usage("InvalidParams: thomson needs at least 2 points".into()));
    }
    let best = thomson_best_of(points, s, restarts, iters, tol, ctx.seed)?;
    let p = ctx
        .prov()
        .with("energy", format!("{:.16e}", best.report.energy))
        .with("gradient_norm", format!("{:.16e}", best.report.gradient_norm))
        .with("converged", best.converged);
    match ctx.format_or(Format::Json) {
        Format::Json => ctx.json(&p, &best),
        Format::Csv => points_csv(ctx, &p, &best.set),
    }
}

fn cmd_discretize(ctx: &Ctx, method: Method, alpha: f64, beta: f64, points: usize) -> Outcome {
    let d = ProductDensity::conjugacy(alpha, beta)?;
    let mut rng = stream(ctx.seed, 1);
    let make = |rng: &mut _| -> Result<SpherePointSet, Failure> {
        Ok(match method {
            Method::Random => random_points(points, rng),
            Method::Icosa => icosa_near(points)?.randomly_rotated(rng),
            Method::Polar => polar_points(points)?.randomly_rotated(rng),
            Method::Minimized => minimize_energy(&polar_points(points)?, 1.0, 20, 1e-9)?.set.randomly_rotated(rng),
        })
    };
    let (pa, pb) = (make(&mut rng)?, make(&mut rng)?);
    let angles = deterministic_product_angles(&pa, alpha, &pb, beta);
    let ks = orbprod::experiments::ks_distance(&angles, |x| d.cdf(x))?;
    let mut h = Histogram::over_support(d.support, ctx.grid.unwrap_or(DEFAULT_BINS))?;
    angles.iter().for_each(|&x| h.add(x));
    let p = ctx
        .prov()
        .with("points_a", pa.len())
        .with("points_b", pb.len())
        .with("ks", format!("{ks:.16e}"))
        .with("l1", format!("{:.16e}", h.l1_against(|x| d.cdf(x))));
    match ctx.format_or(Format::Csv) {
        Format::Csv => histogram_csv(ctx, &p, &h, |x| d.cdf(x)),
        Format::Json => ctx.json(&p, &h),
    }
}

/// Icosahedral lattice with the point count closest to `n`.
fn icosa_near(n: usize) -> orbprod::Result<SpherePointSet> {
    let mut best = (usize::MAX, 1, 0);
    for m in 1..=64 {
        for k in 0..=m {
            let c = orbprod::pointsets::icosahedral_count(m, k);
            if c.abs_diff(n) < best.0 {
                best = (c.abs_diff(n), m, k);
            }
        }
    }
    icosahedral_lattice(best.1, best.2)
}

fn cmd_quantize(ctx: &Ctx, n: u32, m: u32) -> Outcome {
    let r = QuantizationReport::compute(n, m)?;
    match ctx.format_or(Format::Json) {
        Format::Json => ctx.json(&ctx.prov(), &r),
        Format::Csv => ctx.csv(
            &ctx.prov(),
            &["label", "cg", "in_support"],
            (0..=n + m)
                .map(|k| vec![k.into(), r.cg_labels.contains(&k).into(), r.support_labels.contains(&k).into()])
                .collect(),
        ),
    }
}

fn cmd_series(ctx: &Ctx, alpha: f64, beta: f64, theta: f64, k: usize) -> Outcome {
    if k == 0 {
        return Err(Failure::Usage("InvalidParams: K must be at least 1".into()));
    }
    let mut ks: Vec<usize> =
        std::iter::successors(Some(1usize), |x| x.checked_mul(10)).take_while(|&x| x < k).collect();
    ks.push(k);
    let rows = series_diagnostics(alpha, beta, theta, &ks);
    let p =
        ctx.prov().with("value_cesaro", format!("{:.16e}", nu_series(alpha, beta, theta, k, Summation::Cesaro).value));
    match ctx.format_or(Format::Csv) {
        Format::Json => ctx.json(&p, &rows),
        Format::Csv => ctx.csv(
            &p,
            &["k", "partial", "cesaro", "reference"],
            rows.iter().map(|r| vec![r.k.into(), r.partial.into(), r.cesaro.into(), r.reference.into()]).collect(),
        ),
    }
}

fn run(cli: Cli) -> Outcome {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(format!("InvalidParams: --threads: {e}")))?;
    }
    let args: Vec<String> = std::env::args().skip(1).collect();
    let provenance = Provenance::new()
        .with("command", format!("orbprod {}", args.join(" ")))
        .with("seed", cli.seed)
        .with("version", env!("CARGO_PKG_VERSION"));
    let ctx = Ctx { seed: cli.seed, n: cli.n, format: cli.format, grid: cli.grid, out: cli.out, provenance };
    match &cli.command {
        Command::Density(pair) => cmd_density(&ctx, pair),
        Command::Compare(pair) => cmd_compare(&ctx, pair),
        Command::Convergence { pair, sizes, seeds } => cmd_convergence(&ctx, pair, sizes, *seeds),
        Command::Constants(pair) => cmd_constants(&ctx, pair),
        Command::Pointset { method, params, s, iters } => cmd_pointset(&ctx, *method, params, *s, *iters),
        Command::Thomson { points, s, restarts, iters, tol } => cmd_thomson(&ctx, *points, *s, *restarts, *iters, *tol),
        Command::Discretize { method, alpha, beta, points } => cmd_discretize(&ctx, *method, *alpha, *beta, *points),
        Command::Quantize { first, second } => cmd_quantize(&ctx, *first, *second),
        Command::Series { alpha, beta, theta, k } => cmd_series(&ctx, *alpha, *beta, *theta, *k),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
