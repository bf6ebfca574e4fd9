mod cache;
mod report;
mod select;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use coarse_ends::asdim::asdim_upper_bound_with;
use coarse_ends::covers::clopen_scale_test_with;
use coarse_ends::ends::{component_tree_with, end_count_with};
use coarse_ends::{
    growth_series, parse_spec, power_generators, standard_generators, AsdimParams, EndParams, Error, GeneratorSet,
    GroupSpec, Verdict, WindowProvider,
};

use cache::CachedWindows;
use report::{csv, opt, ConfigEcho, Format, RunReport};

/// Exit statuses: 0 determinate, 1 usage, 2 resource cap, 3 undetermined,
/// 4 precondition refusal.
const EXIT_UNDETERMINED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "coarse-ends",
    version,
    about = "Ends, growth and asymptotic dimension of finitely generated groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Number of ends from component counts of window \ B(r).
    Ends(Common),
    /// Containment tree of outer components across radii.
    Tree {
        #[command(flatten)]
        common: Common,
        /// Smallest radius in the tree.
        #[arg(long, default_value_t = 1)]
        rmin: u32,
    },
    /// Interface radii of a set at the scales K^t.
    Clopen {
        #[command(flatten)]
        common: Common,
        /// component:r=N:index=I, half:axis=I:min=M or prefix:<element>.
        #[arg(long, conflicts_with = "elements", required_unless_present = "elements")]
        set: Option<String>,
        /// File listing one element per line; '#' starts a comment.
        #[arg(long)]
        elements: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        tmax: u32,
    },
    /// Sphere and ball sizes with covering numbers N_t(S).
    Growth {
        #[command(flatten)]
        common: Common,
        /// Largest t sampled for covering numbers.
        #[arg(long, default_value_t = 2)]
        tmax: u32,
    },
    /// Upper bound on asymptotic dimension from annulus covers.
    Asdim {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long, default_value_t = 2)]
        annuli: usize,
    },
}

#[derive(Args)]
struct Common {
    /// Group spec, e.g. "F2", "Z^2", "(C2 * C3)", "(Z x C2)".
    #[arg(long)]
    group: String,
    /// Use K^t as the generating set.
    #[arg(long, default_value_t = 1)]
    gen_power: u32,
    #[arg(long, default_value_t = 4)]
    rmax: u32,
    /// Window radius R, overriding the command's default.
    #[arg(long)]
    window: Option<u32>,
    /// Radii over which outer counts must agree.
    #[arg(long, default_value_t = 3)]
    span: u32,
    /// Radii over which strictly growing counts mean infinitely many ends.
    #[arg(long, default_value_t = 3)]
    growth_span: u32,
    /// Largest number of elements a window may hold.
    #[arg(long, default_value_t = coarse_ends::cayley::DEFAULT_ELEMENT_CAP)]
    cap: usize,
    /// Window cache directory; COARSE_ENDS_CACHE is used when absent.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print per-phase wall-clock times to stderr.
    #[arg(long)]
    timings: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: e.exit_code() as u8,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

/// Rendered output plus exit status.
struct Rendered {
    json: String,
    csv: String,
    text: String,
    dot: Option<String>,
    code: u8,
}

struct Context {
    spec: GroupSpec,
    generators: GeneratorSet,
    provider: CachedWindows,
    phases: Vec<(&'static str, f64)>,
    started: Instant,
}

impl Context {
    fn new(common: &Common) -> Result<Self, Failure> {
        let started = Instant::now();
        let spec = parse_spec(&common.group)?;
        let base = standard_generators(&spec);
        let generators = if common.gen_power == 1 {
            base
        } else {
            power_generators(&spec, &base, common.gen_power)?
        };
        let provider = CachedWindows::new(cache::resolve_dir(common.cache_dir.clone()), common.cap);
        let mut ctx = Context {
            spec,
            generators,
            provider,
            phases: Vec::new(),
            started,
        };
        ctx.phase("parse");
        Ok(ctx)
    }

    fn phase(&mut self, name: &'static str) {
        let now = Instant::now();
        self.phases.push((name, (now - self.started).as_secs_f64() * 1e3));
        self.started = now;
    }

    fn echo(&self, common: &Common, window: u32) -> ConfigEcho {
        ConfigEcho {
            group: self.spec.to_string(),
            gen_power: common.gen_power,
            rmax: common.rmax,
            window,
            span: common.span,
            growth_span: common.growth_span,
            cap: common.cap,
            seed: common.seed,
            tmax: None,
            set: None,
            p: None,
            s: None,
            annuli: None,
        }
    }
}

fn run_ends(common: &Common, ctx: &mut Context) -> Result<Rendered, Failure> {
    let params = EndParams {
        r_max: common.rmax,
        window: common.window,
        stab_span: common.span,
        growth_span: common.growth_span,
    };
    let v = end_count_with(&ctx.provider, &ctx.spec, &ctx.generators, &params)?;
    ctx.phase("compute");
    let mut report = RunReport::new("ends", ctx.echo(common, params.window_radius()), &v);
    if let Some(r) = v.evidence.exhausted_radius {
        report
            .warnings
            .push(format!("the window exhausted the group at radius {r}"));
    }
    let rows = v.evidence.counts.iter().map(|c| {
        vec![
            c.r.to_string(),
            c.outer.to_string(),
            c.inner.to_string(),
            c.inner_size.to_string(),
        ]
    });
    let mut text = format!("verdict: {:?}\n{}\n", v.verdict, v.note);
    for c in &v.evidence.counts {
        writeln!(
            text,
            "r = {}: {} outer, {} inner ({} elements)",
            c.r, c.outer, c.inner, c.inner_size
        )
        .unwrap();
    }
    Ok(Rendered {
        json: report.to_json(),
        csv: csv(&["r", "outer", "inner", "inner_size"], rows),
        text,
        dot: None,
        code: if v.verdict == Verdict::Undetermined {
            EXIT_UNDETERMINED
        } else {
            0
        },
    })
}

fn run_tree(common: &Common, rmin: u32, ctx: &mut Context) -> Result<Rendered, Failure> {
    let radius = common.window.unwrap_or(2 * common.rmax + 4);
    let tree = component_tree_with(&ctx.provider, &ctx.spec, &ctx.generators, rmin, common.rmax, radius)?;
    ctx.phase("compute");
    let report = RunReport::new("tree", ctx.echo(common, radius), &tree);
    let mut rows = Vec::new();
    let mut text = String::new();
    for level in &tree.levels {
        for c in &level.components {
            rows.push(vec![
                level.r.to_string(),
                c.id.to_string(),
                c.size.to_string(),
                c.outer.to_string(),
                opt(c.parent),
            ]);
        }
        let sizes: Vec<String> = level.outer().map(|c| c.size.to_string()).collect();
        writeln!(text, "r = {}: {} outer [{}]", level.r, sizes.len(), sizes.join(" ")).unwrap();
    }
    Ok(Rendered {
        json: report.to_json(),
        csv: csv(&["r", "id", "size", "outer", "parent"], rows),
        text,
        dot: Some(tree.to_dot()),
        code: 0,
    })
}

fn run_clopen(
    common: &Common,
    set: Option<&str>,
    elements: Option<&PathBuf>,
    tmax: u32,
    ctx: &mut Context,
) -> Result<Rendered, Failure> {
    let radius = common.window.unwrap_or((2 * common.rmax + 4).max(4 * tmax + 4));
    let window = ctx.provider.window(&ctx.spec, &ctx.generators, radius)?;
    let (selector, label) = match (set, elements) {
        (Some(text), _) => (select::parse_selector(text, &window)?, text.to_string()),
        (None, Some(path)) => (
            select::read_elements(path, &window)?,
            format!("file:{}", path.display()),
        ),
        (None, None) => return Err(usage("one of --set or --elements is required")),
    };
    let cert = clopen_scale_test_with(&ctx.provider, &selector, &window, tmax)?;
    ctx.phase("compute");
    let mut echo = ctx.echo(common, radius);
    echo.tmax = Some(tmax);
    echo.set = Some(label);
    let mut report = RunReport::new("clopen", echo, &cert);
    for row in cert.rows.iter().filter(|r| !r.stable) {
        report.warnings.push(format!(
            "interface at t = {} changed on the window of radius {}",
            row.scale_t,
            radius + 4
        ));
    }
    let rows = cert.rows.iter().map(|r| {
        vec![
            r.scale_t.to_string(),
            r.rho.to_string(),
            r.core_radius.to_string(),
            r.stable.to_string(),
            r.verdict.to_string(),
        ]
    });
    let mut text = format!(
        "{}\n",
        if cert.clopen_consistent {
            "clopen-consistent"
        } else {
            "not clopen"
        }
    );
    for r in &cert.rows {
        writeln!(
            text,
            "t = {}: rho {} in core {}{}",
            r.scale_t,
            r.rho,
            r.core_radius,
            if r.stable { "" } else { " (unstable)" }
        )
        .unwrap();
    }
    Ok(Rendered {
        json: report.to_json(),
        csv: csv(&["scale_t", "rho", "core_radius", "stable", "verdict"], rows),
        text,
        dot: None,
        code: 0,
    })
}

fn run_growth(common: &Common, tmax: u32, ctx: &mut Context) -> Result<Rendered, Failure> {
    let radius = common.window.unwrap_or(common.rmax).max(common.rmax);
    let window = ctx.provider.window(&ctx.spec, &ctx.generators, radius)?;
    let offsets: Vec<u32> = (1..=tmax).collect();
    let bases: Vec<u32> = (1..=common.rmax).collect();
    let table = growth_series(&window, common.rmax)?.with_coverings(&window, &offsets, &bases)?;
    ctx.phase("compute");
    let mut echo = ctx.echo(common, radius);
    echo.tmax = Some(tmax);
    let report = RunReport::new("growth", echo, &table);
    let rows =
        (0..table.spheres.len()).map(|r| vec![r.to_string(), table.spheres[r].to_string(), table.balls[r].to_string()]);
    let mut text = String::new();
    for r in 0..table.spheres.len() {
        writeln!(text, "r = {r}: sphere {}, ball {}", table.spheres[r], table.balls[r]).unwrap();
    }
    for c in &table.coverings {
        writeln!(text, "N_{}({}) = {}", c.t, c.base_radius, c.count).unwrap();
    }
    Ok(Rendered {
        json: report.to_json(),
        csv: csv(&["r", "sphere", "ball"], rows),
        text,
        dot: None,
        code: 0,
    })
}

fn run_asdim(common: &Common, p: u32, s: u32, annuli: usize, ctx: &mut Context) -> Result<Rendered, Failure> {
    let params = AsdimParams {
        p,
        s,
        annuli,
        window: common.window,
        seed: common.seed,
        ..AsdimParams::default()
    };
    let w = asdim_upper_bound_with(&ctx.provider, &ctx.spec, &ctx.generators, &params)?;
    ctx.phase("compute");
    let mut echo = ctx.echo(common, w.window_radius);
    echo.p = Some(p);
    echo.s = Some(s);
    echo.annuli = Some(annuli);
    let mut report = RunReport::new("asdim", echo, &w);
    for a in w.annuli.iter().filter(|a| !a.diameter_exact) {
        report.warnings.push(format!(
            "annulus n = {}: diameter bounded through net points, not measured",
            a.n
        ));
    }
    let rows = w.annuli.iter().map(|a| {
        vec![
            a.n.to_string(),
            a.net_size.to_string(),
            a.sets.to_string(),
            a.max_diameter.to_string(),
            a.max_multiplicity.to_string(),
        ]
    });
    let mut text = format!(
        "asdim <= {} (N2delta = {}, delta_hat = {}, cross multiplicity {})\n",
        w.bound, w.n2delta, w.delta_hat, w.cross_multiplicity
    );
    for a in &w.annuli {
        writeln!(
            text,
            "n = {}: {} sets, diameter <= {}, multiplicity {}",
            a.n, a.sets, a.max_diameter, a.max_multiplicity
        )
        .unwrap();
    }
    Ok(Rendered {
        json: report.to_json(),
        csv: csv(&["n", "net_size", "sets", "max_diameter", "max_multiplicity"], rows),
        text,
        dot: None,
        code: 0,
    })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let common = match &cli.command {
        Command::Ends(c) => c,
        Command::Tree { common, .. }
        | Command::Clopen { common, .. }
        | Command::Growth { common, .. }
        | Command::Asdim { common, .. } => common,
    };
    if common.format == Format::Dot && !matches!(cli.command, Command::Tree { .. }) {
        return Err(usage("dot output is only available for the tree command"));
    }
    let mut ctx = Context::new(common)?;
    let rendered = match &cli.command {
        Command::Ends(c) => run_ends(c, &mut ctx)?,
        Command::Tree { common, rmin } => run_tree(common, *rmin, &mut ctx)?,
        Command::Clopen {
            common,
            set,
            elements,
            tmax,
        } => run_clopen(common, set.as_deref(), elements.as_ref(), *tmax, &mut ctx)?,
        Command::Growth { common, tmax } => run_growth(common, *tmax, &mut ctx)?,
        Command::Asdim { common, p, s, annuli } => run_asdim(common, *p, *s, *annuli, &mut ctx)?,
    };
    let body = match common.format {
        Format::Json => rendered.json,
        Format::Csv => rendered.csv,
        Format::Text => rendered.text,
        Format::Dot => rendered.dot.expect("checked above"),
    };
    let io = |e: std::io::Error| usage(format!("cannot write output: {e}"));
    match &common.out {
        Some(path) => std::fs::write(path, body).map_err(io)?,
        None => std::io::stdout().lock().write_all(body.as_bytes()).map_err(io)?,
    }
    ctx.phase("write");
    if common.timings {
        for (name, ms) in &ctx.phases {
            eprintln!("{name}\t{ms:.1} ms");
        }
    }
    Ok(rendered.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
