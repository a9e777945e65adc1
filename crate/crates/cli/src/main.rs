use std::collections::BTreeMap;
use std::io::{self, Write};
use std::process::ExitCode;

use adelic_core::adelic::{
    verify_beta_adelic_q_with, verify_beta_quadratic_principal_with, verify_gamma_adelic_q_with,
    verify_gamma_adelic_quadratic_with, IdentityId, PointSampler, RegProductReport, Verdict, VerifyOptions,
    DEFAULT_TOLERANCE,
};
use adelic_core::amplitudes::{
    amplitude_adelic_check, heterotic, heterotic_factorization_check, relation_4_25, scan, superstring,
    superstring_adelic_check, veneziano, veneziano_p, virasoro, virasoro_p, AmplitudeKind, HeteroticIndexSet,
    MandelstamPoint, ReggeTrajectory, ScanRow,
};
use adelic_core::characters::{DirichletCharacterSpec, GlobalCharacterQ, QuadCharacterData};
use adelic_core::local::{gamma_complex, gamma_q, gamma_q_exact, gamma_real, local_gamma_ramified};
use adelic_core::quadfield::{fundamental_unit, make_field, split_prime, torsion_units};
use adelic_core::{ComplexValue, Error, PrecisionPolicy};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "adelic", version, about = "Local gamma and beta functions, adelic product formulas and string amplitudes")]
struct Cli {
    /// Precision policy overrides, e.g. `series_terms=60,pole_guard=1e-7`.
    #[arg(long, global = true, env = "ADELIC_POLICY")]
    policy: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlaceArg {
    Real,
    Complex,
    P,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AmpKind {
    Veneziano,
    Virasoro,
    VenezianoP,
    VirasoroP,
    Superstring,
    Heterotic,
}

#[derive(clap::Args, Clone)]
struct AmpParams {
    #[arg(value_enum)]
    kind: AmpKind,
    /// Prime power for the p-adic amplitudes.
    #[arg(long, default_value_t = 2)]
    q: u64,
    /// Heterotic type.
    #[arg(long, default_value_t = 1)]
    k: u8,
    /// Trajectory intercept; defaults to the tachyonic one of the amplitude.
    #[arg(long)]
    intercept: Option<f64>,
    #[arg(long)]
    slope: Option<f64>,
    #[arg(long)]
    mass_sum: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a local gamma function.
    #[command(allow_negative_numbers = true)]
    Gamma {
        #[arg(long, value_enum)]
        place: PlaceArg,
        /// Complex argument, e.g. `0.5`, `0.3+2i`.
        #[arg(long)]
        alpha: ComplexValue,
        #[arg(long, default_value_t = 0)]
        nu: i64,
        #[arg(long)]
        q: Option<u64>,
        /// Dirichlet character whose local component at `q` is used.
        #[arg(long)]
        character: Option<String>,
    },
    /// Decompose rational primes in a one-class quadratic field.
    #[command(allow_negative_numbers = true)]
    Split {
        #[arg(long)]
        d: i64,
        #[arg(long, conflicts_with = "upto", required_unless_present = "upto")]
        p: Option<u64>,
        #[arg(long)]
        upto: Option<u64>,
    },
    /// Discriminant, ramification and units of Q(√d).
    #[command(allow_negative_numbers = true)]
    Field {
        #[arg(long)]
        d: i64,
    },
    /// Check an identity at seeded random points.
    #[command(allow_negative_numbers = true)]
    Verify {
        identity: IdentityId,
        #[arg(long, default_value_t = 10)]
        points: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long)]
        d: Option<i64>,
        #[arg(long, default_value = "principal")]
        theta: String,
        #[arg(long, default_value = "principal")]
        pi: String,
        /// Character for gamma-quadratic (norm-induced) and superstring-adelic.
        #[arg(long)]
        chi: Option<String>,
        #[arg(long, default_value_t = 1)]
        k: u8,
    },
    /// Evaluate an amplitude on a grid; `u` follows from the mass sum.
    #[command(allow_negative_numbers = true)]
    Scan {
        #[command(flatten)]
        amp: AmpParams,
        #[arg(long, default_value_t = -6.0)]
        s_min: f64,
        #[arg(long, default_value_t = 2.0)]
        s_max: f64,
        #[arg(long, default_value_t = -6.0)]
        t_min: f64,
        #[arg(long, default_value_t = 2.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
    },
    /// Evaluate an amplitude at one point.
    #[command(allow_negative_numbers = true)]
    Amp {
        #[command(flatten)]
        amp: AmpParams,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        t: f64,
    },
}

/// Exit statuses, in decreasing precedence: invalid input, failed check,
/// inconclusive point, success.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Inconclusive,
    Failed,
    Invalid,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::Invalid => 2,
            Status::Inconclusive => 3,
        }
    }

    fn rank(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Inconclusive => 1,
            Status::Failed => 2,
            Status::Invalid => 3,
        }
    }

    fn worst(self, other: Status) -> Status {
        if other.rank() > self.rank() {
            other
        } else {
            self
        }
    }

    fn of_error(e: &Error) -> Status {
        if e.is_pole_like() {
            Status::Inconclusive
        } else {
            Status::Invalid
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let status = match run(&cli, &mut out) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            Status::of_error(&e)
        }
    };
    let mut stdout = io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes());
    let _ = stdout.flush();
    ExitCode::from(status.code())
}

fn run(cli: &Cli, out: &mut String) -> Result<Status, Error> {
    let policy = match &cli.policy {
        Some(p) => p.parse::<PrecisionPolicy>()?,
        None => PrecisionPolicy::default(),
    };
    match &cli.command {
        Command::Gamma { place, alpha, nu, q, character } => cmd_gamma(cli.format, *place, *alpha, *nu, *q, character.as_deref(), out),
        Command::Split { d, p, upto } => cmd_split(cli.format, *d, *p, *upto, out),
        Command::Field { d } => cmd_field(cli.format, *d, out),
        Command::Verify { identity, points, seed, tolerance, d, theta, pi, chi, k } => {
            let opts = VerifyOptions { policy, tolerance: *tolerance, ..VerifyOptions::default() };
            let params = VerifyParams { d: *d, theta, pi, chi: chi.as_deref(), k: *k };
            cmd_verify(cli.format, *identity, *points, *seed, &opts, &params, out)
        }
        Command::Scan { amp, s_min, s_max, t_min, t_max, step } => {
            cmd_scan(cli.format, amp, (*s_min, *s_max), (*t_min, *t_max), *step, out)
        }
        Command::Amp { amp, s, t } => cmd_amp(cli.format, amp, *s, *t, out),
    }
}

fn complex_json(z: ComplexValue) -> serde_json::Value {
    json!({ "re": z.re, "im": z.im })
}

fn push_line(out: &mut String, line: impl AsRef<str>) {
    out.push_str(line.as_ref());
    out.push('\n');
}

fn parse_character(s: &str) -> Result<DirichletCharacterSpec, Error> {
    s.parse()
}

fn cmd_gamma(
    format: Format,
    place: PlaceArg,
    alpha: ComplexValue,
    nu: i64,
    q: Option<u64>,
    character: Option<&str>,
    out: &mut String,
) -> Result<Status, Error> {
    let chi = character.map(parse_character).transpose()?;
    let mut exact = None;
    let (label, value) = match place {
        PlaceArg::Real => {
            let nu = chi.as_ref().map_or(nu, |c| c.parity() as i64);
            (format!("Γ_∞(α;{nu})"), gamma_real(alpha, nu))
        }
        PlaceArg::Complex => (format!("Γ_ω(α;{nu})"), gamma_complex(alpha, nu)),
        PlaceArg::P => {
            let q = q.ok_or_else(|| Error::Parse("--place p needs --q".into()))?;
            match chi {
                Some(chi) => {
                    let local = chi.local_component(q);
                    (format!("Γ_{q}(α;{chi})"), local_gamma_ramified(alpha, &local))
                }
                None => {
                    if alpha.im == 0.0 && alpha.re.fract() == 0.0 && alpha.re.abs() < 1e6 {
                        exact = Some(gamma_q_exact(alpha.re as i64, q)?);
                    }
                    (format!("Γ_{q}(α)"), gamma_q(alpha, q))
                }
            }
        }
    };
    let (value, pole) = match value {
        Ok(v) => (Some(v), None),
        Err(e) if e.is_pole_like() => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    match format {
        Format::Json => push_line(
            out,
            json!({
                "function": label,
                "alpha": complex_json(alpha),
                "value": value.map(complex_json),
                "exact": exact.as_ref().map(|r| r.to_string()),
                "pole": pole,
            })
            .to_string(),
        ),
        _ => {
            match (value, &pole) {
                (Some(v), _) => push_line(out, format!("{label} at α = {alpha}: {v}")),
                (None, Some(p)) => push_line(out, format!("{label} at α = {alpha}: {p}")),
                _ => {}
            }
            if let Some(r) = &exact {
                push_line(out, format!("exact: {r}"));
            }
        }
    }
    Ok(if pole.is_some() { Status::Inconclusive } else { Status::Ok })
}

fn primes_below(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| (2..p).take_while(|k| k * k <= p).all(|k| p % k != 0)).collect()
}

fn cmd_split(format: Format, d: i64, p: Option<u64>, upto: Option<u64>, out: &mut String) -> Result<Status, Error> {
    let field = make_field(d)?;
    let primes = match (p, upto) {
        (Some(p), _) => vec![p],
        (None, Some(n)) => primes_below(n),
        (None, None) => Vec::new(),
    };
    let facts = primes.iter().map(|&p| split_prime(&field, p)).collect::<Result<Vec<_>, _>>()?;
    match format {
        Format::Json => push_line(out, serde_json::to_string(&json!({ "d": d, "disc": field.disc, "primes": facts })).expect("serializable")),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["p", "case", "q", "solution", "divisors", "hensel_root"]).map_err(csv_error)?;
            for f in &facts {
                w.write_record([
                    f.p.to_string(),
                    f.case.label().to_string(),
                    f.q.to_string(),
                    f.solution.map_or(String::new(), |(a, b)| format!("({a},{b})")),
                    serde_json::to_string(&f.divisors).expect("serializable"),
                    f.hensel_root.map_or(String::new(), |r| r.to_string()),
                ])
                .map_err(csv_error)?;
            }
            out.push_str(&String::from_utf8(w.into_inner().map_err(|e| csv_error(e.into_error().into()))?).expect("utf-8"));
        }
        Format::Text => {
            push_line(out, format!("Q(√{d}), D = {}", field.disc));
            push_line(out, format!("{:>6}  {:<4} {:>8}  {:<12} {:<26} {}", "p", "case", "q", "solution", "divisors", "root"));
            for f in &facts {
                let divisors = match &f.divisors {
                    adelic_core::quadfield::Divisors::Inert => "inert".to_string(),
                    adelic_core::quadfield::Divisors::Ramified { divisor } => format!("{divisor:?}"),
                    adelic_core::quadfield::Divisors::Split { p, pbar } => format!("{p:?} {pbar:?}"),
                };
                push_line(
                    out,
                    format!(
                        "{:>6}  {:<4} {:>8}  {:<12} {:<26} {}",
                        f.p,
                        f.case.label(),
                        f.q,
                        f.solution.map_or("-".to_string(), |(a, b)| format!("({a},{b})")),
                        divisors,
                        f.hensel_root.map_or("-".to_string(), |r| r.to_string()),
                    ),
                );
            }
        }
    }
    Ok(Status::Ok)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

fn cmd_field(format: Format, d: i64, out: &mut String) -> Result<Status, Error> {
    let field = make_field(d)?;
    let torsion = torsion_units(d)?;
    let unit = if d > 0 { Some(fundamental_unit(d)?) } else { None };
    match format {
        Format::Json => push_line(
            out,
            json!({
                "field": field,
                "torsion_units": torsion,
                "fundamental_unit": unit.as_ref().map(|u| json!({
                    "x": u.x.to_string(),
                    "y": u.y.to_string(),
                    "norm": u.norm,
                    "omega_basis": u.omega_basis,
                    "value": u.value(),
                })),
            })
            .to_string(),
        ),
        _ => {
            push_line(out, format!("Q(√{d}): D = {}, one-class = {}", field.disc, field.one_class));
            let ranks: Vec<String> = field.ramified_ranks.iter().map(|(p, r)| format!("{p}^{r}")).collect();
            push_line(out, format!("ramified: {}", ranks.join(" ")));
            let labels: Vec<&str> = torsion.iter().map(|t| t.label.as_str()).collect();
            push_line(out, format!("torsion units: {}", labels.join(", ")));
            if let Some(u) = unit {
                let basis = if u.omega_basis { "ω = (1+√d)/2" } else { "√d" };
                push_line(out, format!("fundamental unit: {} + {}·{basis}, norm {}, ≈ {}", u.x, u.y, u.norm, u.value()));
            }
        }
    }
    Ok(Status::Ok)
}

struct VerifyParams<'a> {
    d: Option<i64>,
    theta: &'a str,
    pi: &'a str,
    chi: Option<&'a str>,
    k: u8,
}

fn global(s: &str) -> Result<GlobalCharacterQ, Error> {
    Ok(GlobalCharacterQ::from_character(parse_character(s)?))
}

fn verify_one(
    identity: IdentityId,
    sampler: &mut PointSampler,
    opts: &VerifyOptions,
    params: &VerifyParams,
) -> Result<RegProductReport, Error> {
    let need_d = || params.d.ok_or_else(|| Error::Parse(format!("{identity} needs --d")));
    match identity {
        IdentityId::GammaQ => {
            let alpha = sampler.complex((0.2, 0.8), (-10.0, 10.0));
            verify_gamma_adelic_q_with(alpha, &global(params.theta)?, opts)
        }
        IdentityId::BetaQ => {
            let point = sampler.beta_point((0.2, 0.8), (-5.0, 5.0));
            verify_beta_adelic_q_with(&point, &global(params.theta)?, &global(params.pi)?, opts)
        }
        IdentityId::BetaQuadratic => {
            let field = make_field(need_d()?)?;
            let point = sampler.beta_point((0.2, 0.8), (-5.0, 5.0));
            verify_beta_quadratic_principal_with(&field, &point, opts)
        }
        IdentityId::GammaQuadratic => {
            let field = make_field(need_d()?)?;
            let qc = match params.chi {
                None | Some("principal") => QuadCharacterData::principal(field.clone()),
                Some(s) => QuadCharacterData::norm_induced(field.clone(), parse_character(s)?),
            };
            let alpha = sampler.complex((0.2, 0.8), (-10.0, 10.0));
            verify_gamma_adelic_quadratic_with(&field, alpha, &qc, opts)
        }
        IdentityId::AmplitudeAdelic => {
            let field = make_field(need_d()?)?;
            let (kind, traj, scale) = if field.d > 0 {
                (AmplitudeKind::Veneziano, ReggeTrajectory::tachyon_veneziano(), 1.0)
            } else {
                (AmplitudeKind::Virasoro, ReggeTrajectory::tachyon_virasoro(), 4.0)
            };
            let pt = MandelstamPoint::new(
                scale * sampler.uniform(-4.0, 0.0),
                scale * sampler.uniform(-4.0, 0.0),
                traj.mass_sq_sum,
            );
            amplitude_adelic_check(&field, &pt, &traj, kind, opts)
        }
        IdentityId::SuperstringAdelic => {
            let g = global(params.chi.unwrap_or("kronecker:-4"))?;
            let pt = MandelstamPoint::massless(sampler.uniform(-1.5, 0.0), sampler.uniform(-1.5, 0.0));
            superstring_adelic_check(&pt, &[g.clone(), g.clone(), g], opts)
        }
        IdentityId::HeteroticFactorization => {
            let pt = MandelstamPoint::massless(sampler.uniform(-6.0, 6.0), sampler.uniform(-6.0, 6.0));
            heterotic_factorization_check(&pt, params.k)
        }
        IdentityId::Relation425 => {
            let traj = ReggeTrajectory::tachyon_veneziano();
            let pt = MandelstamPoint::new(sampler.uniform(-6.0, 2.0), sampler.uniform(-6.0, 2.0), traj.mass_sq_sum);
            relation_4_25(&pt, &traj)
        }
        other => Err(Error::Parse(format!("identity `{other}` is not exposed by `verify`"))),
    }
}

fn cmd_verify(
    format: Format,
    identity: IdentityId,
    points: usize,
    seed: u64,
    opts: &VerifyOptions,
    params: &VerifyParams,
    out: &mut String,
) -> Result<Status, Error> {
    if !(opts.tolerance > 0.0) {
        return Err(Error::Parse(format!("tolerance {} must be positive", opts.tolerance)));
    }
    let mut sampler = PointSampler::new(seed);
    let mut reports = Vec::with_capacity(points);
    for _ in 0..points {
        reports.push(verify_one(identity, &mut sampler, opts, params)?);
    }
    let mut status = Status::Ok;
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &reports {
        let (name, s) = match r.verdict {
            Verdict::Pass => ("pass", Status::Ok),
            Verdict::Diagnostic => ("diagnostic", Status::Ok),
            Verdict::Fail => ("fail", Status::Failed),
            Verdict::Inconclusive => ("inconclusive", Status::Inconclusive),
        };
        *counts.entry(name).or_default() += 1;
        status = status.worst(s);
    }
    match format {
        Format::Json => {
            push_line(
                out,
                json!({ "identity": identity, "seed": seed, "points": points, "tolerance": opts.tolerance, "policy": opts.policy })
                    .to_string(),
            );
            for r in &reports {
                push_line(out, r.to_json());
            }
        }
        _ => {
            push_line(out, format!("# {identity} seed={seed} points={points} tolerance={:e}", opts.tolerance));
            for r in &reports {
                let verdict = serde_json::to_value(r.verdict).expect("serializable");
                let residual = r.residual.map_or("-".to_string(), |x| format!("{x:.3e}"));
                let inputs: Vec<String> = r.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let mut line = format!("{:<12} residual={residual} {}", verdict.as_str().unwrap_or(""), inputs.join(" "));
                if let Some(n) = &r.note {
                    line.push_str(&format!(" [{n}]"));
                }
                push_line(out, line);
            }
            let summary: Vec<String> = counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
            push_line(out, format!("# {}", summary.join(" ")));
        }
    }
    Ok(status)
}

struct Amplitude {
    mass_sum: f64,
    eval: Box<dyn Fn(&MandelstamPoint) -> adelic_core::Result<ComplexValue>>,
}

fn amplitude(p: &AmpParams) -> Result<Amplitude, Error> {
    let trajectory = |default: ReggeTrajectory| {
        ReggeTrajectory::new(
            p.intercept.unwrap_or(default.intercept),
            p.slope.unwrap_or(default.slope),
            p.mass_sum.unwrap_or(default.mass_sq_sum),
        )
    };
    let q = p.q;
    Ok(match p.kind {
        AmpKind::Veneziano | AmpKind::VenezianoP => {
            let traj = trajectory(ReggeTrajectory::tachyon_veneziano())?;
            traj.validate(AmplitudeKind::Veneziano)?;
            let padic = p.kind == AmpKind::VenezianoP;
            Amplitude {
                mass_sum: traj.mass_sq_sum,
                eval: Box::new(move |pt| if padic { veneziano_p(pt, &traj, q) } else { veneziano(pt, &traj) }),
            }
        }
        AmpKind::Virasoro | AmpKind::VirasoroP => {
            let traj = trajectory(ReggeTrajectory::tachyon_virasoro())?;
            traj.validate(AmplitudeKind::Virasoro)?;
            let padic = p.kind == AmpKind::VirasoroP;
            Amplitude {
                mass_sum: traj.mass_sq_sum,
                eval: Box::new(move |pt| if padic { virasoro_p(pt, &traj, q) } else { virasoro(pt, &traj) }),
            }
        }
        AmpKind::Superstring => Amplitude { mass_sum: 0.0, eval: Box::new(superstring) },
        AmpKind::Heterotic => {
            let idx = HeteroticIndexSet::standard(p.k)?;
            Amplitude { mass_sum: 0.0, eval: Box::new(move |pt| heterotic(pt, &idx)) }
        }
    })
}

fn kind_name(kind: AmpKind) -> String {
    kind.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn cmd_scan(
    format: Format,
    params: &AmpParams,
    s_range: (f64, f64),
    t_range: (f64, f64),
    step: f64,
    out: &mut String,
) -> Result<Status, Error> {
    let amp = amplitude(params)?;
    let rows = scan(s_range, t_range, step, amp.mass_sum, &amp.eval)?;
    match format {
        Format::Json => push_line(
            out,
            json!({
                "amplitude": kind_name(params.kind),
                "mass_sum": amp.mass_sum,
                "step": step,
                "rows": rows,
            })
            .to_string(),
        ),
        _ => out.push_str(&rows_csv(&rows)?),
    }
    Ok(Status::Ok)
}

fn rows_csv(rows: &[ScanRow]) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["s", "t", "u", "re", "im", "pole_flag", "channel"]).map_err(csv_error)?;
    for r in rows {
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
        w.write_record([
            r.s.to_string(),
            r.t.to_string(),
            r.u.to_string(),
            opt(r.re),
            opt(r.im),
            r.pole_flag.to_string(),
            r.channel.clone().unwrap_or_default(),
        ])
        .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| csv_error(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

fn cmd_amp(format: Format, params: &AmpParams, s: f64, t: f64, out: &mut String) -> Result<Status, Error> {
    let amp = amplitude(params)?;
    let pt = MandelstamPoint::new(s, t, amp.mass_sum);
    let name = kind_name(params.kind);
    let (value, pole) = match (amp.eval)(&pt) {
        Ok(v) => (Some(v), None),
        Err(Error::AmplitudePole(p)) => (None, Some(p)),
        Err(e) => return Err(e),
    };
    match format {
        Format::Json => push_line(
            out,
            json!({ "amplitude": name, "point": pt, "value": value.map(complex_json), "pole": pole }).to_string(),
        ),
        _ => match (&value, &pole) {
            (Some(v), _) => push_line(out, format!("{name}(s={}, t={}, u={}) = {v}", pt.s, pt.t, pt.u)),
            (None, Some(p)) => push_line(out, format!("{name}(s={}, t={}, u={}): {p}", pt.s, pt.t, pt.u)),
            _ => {}
        },
    }
    Ok(if pole.is_some() { Status::Inconclusive } else { Status::Ok })
}
