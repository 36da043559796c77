//! The `legendre` command-line tool.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use legendre_core::degree::{
    builtin_map, degree_3_to_s3_estimate, degree_integral, degree_regular_value, degree_s2_estimate,
    kalman_obstruction_sphere, obstruction_tangent, winding_number, Domain, SphereMap, KALMAN_T0,
};
use legendre_core::diskcalc::{
    area_invariant, elementary_change, min_zero_parity, obstructed_curves, random_diagram, sites, DiskDiagram, Move,
};
use legendre_core::formats::{parse_map, table_of_curve, table_of_curve4, CurveSpec, Resolved, DEFAULT_RESOLUTION};
use legendre_core::invariants::{
    front_diagram, horizontal_rotation_number, loop_rotation_number, rotation_number, tb_linking_oracle,
    thurston_bennequin,
};
use legendre_core::lifts::{
    add_area_lobe, add_area_lobe_horizontal, add_area_pair, add_area_pair_horizontal, double_stabilization,
    double_stabilization_horizontal, lift_horizontal, stabilize, tangency_reports,
};
use legendre_core::selftest::{run_criterion, CRITERIA};
use legendre_core::{geiges_project, total_area, Curve3, Error, Tolerances};

pub mod render;
pub mod report;

pub use report::{Entry, Report};

#[derive(Parser, Debug)]
#[command(name = "legendre", version, about = "Invariants of Legendrian and horizontal curves")]
pub struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Samples per curve [default: 4096, or the value in a curve file].
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Positional tolerance relative to the curve diameter.
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub tol_pos: f64,
    /// Legendrian / horizontal residual tolerance.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_leg: f64,
    /// Smallest admissible derivative norm.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_deriv: f64,
    /// Minimal parameter separation of distinct branches.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub tol_sep: f64,
    /// Threshold below which an area counts as zero.
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub tol_area: f64,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct CurveInput {
    /// Builtin curve, e.g. `unknot_front`, `torus_knot(2,3)`, `stabilized(unknot_front,+,-)`.
    #[arg(long)]
    pub curve: Option<String>,
    /// Curve spec file (see docs/formats/curve.md).
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rotation number, Thurston–Bennequin invariant and front data.
    Invariants {
        #[command(flatten)]
        input: CurveInput,
        /// Write the front diagram as text.
        #[arg(long)]
        diagram_out: Option<PathBuf>,
    },
    /// Double points with their area function values.
    Tangencies {
        #[command(flatten)]
        input: CurveInput,
    },
    /// Horizontal lift of a zero-area Legendrian curve with its embedding certificate.
    Lift {
        #[command(flatten)]
        input: CurveInput,
        /// Initial value of y.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        y0: f64,
        /// Write the lift as a table spec.
        #[arg(long)]
        table_out: Option<PathBuf>,
        /// Rows of the written table.
        #[arg(long, default_value_t = 1024)]
        rows: usize,
    },
    /// Total area, optionally after one area-changing modification.
    Area {
        #[command(flatten)]
        input: CurveInput,
        /// Reidemeister I lobes `p,a,n`: n lobes of total area a near t = p.
        #[arg(long, allow_hyphen_values = true, group = "modification")]
        lobe: Option<String>,
        /// Lobe pair `p,q,a,n`: area a near p and -a near q.
        #[arg(long, allow_hyphen_values = true, group = "modification")]
        pair: Option<String>,
        /// Legendrian stabilization of sign + or -.
        #[arg(long, allow_hyphen_values = true, group = "modification")]
        stabilize: Option<String>,
        /// Double stabilization `loc,a` with tangency area a.
        #[arg(long, group = "modification")]
        double_stabilize: Option<String>,
        /// Write the modified curve as a table spec.
        #[arg(long)]
        table_out: Option<PathBuf>,
        /// Rows of the written table.
        #[arg(long, default_value_t = 1024)]
        rows: usize,
    },
    /// Disk diagram calculus.
    Disk {
        #[command(subcommand)]
        command: DiskCommand,
    },
    /// Mapping degree of a builtin or sampled sphere map.
    Degree {
        /// Builtin map name or map file.
        #[arg(long)]
        map: String,
        /// Quadrature cells per axis.
        #[arg(long)]
        grid: Option<usize>,
        /// Target point for the regular-value count, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Degree of the obstruction sphere of a loop of stereographic torus knots.
    Kalman {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        q: i64,
        #[arg(long)]
        alpha: u32,
        /// Base point of the loop.
        #[arg(long, default_value_t = KALMAN_T0, allow_hyphen_values = true)]
        t0: f64,
        /// Quadrature cells per axis.
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
    /// SVG of a front or of a disk diagram.
    #[command(group = ArgGroup::new("target").required(true).multiple(false))]
    Render {
        /// Builtin curve.
        #[arg(long, group = "target")]
        curve: Option<String>,
        /// Curve spec file.
        #[arg(long, group = "target")]
        file: Option<PathBuf>,
        /// Disk diagram file.
        #[arg(long, group = "target")]
        disk: Option<PathBuf>,
        /// Output path.
        #[arg(long)]
        svg_out: PathBuf,
    },
    /// Runs the acceptance criteria.
    Selftest {
        /// Criterion ids to run, comma separated.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum DiskCommand {
    /// The Z/2 Area invariant and the minimal zero parity.
    Area {
        #[arg(long)]
        file: PathBuf,
    },
    /// Strata that no disk of horizontal embeddings extends.
    Obstructed {
        #[arg(long)]
        file: PathBuf,
    },
    /// Applicable sites of every elementary change.
    Sites {
        #[arg(long)]
        file: PathBuf,
    },
    /// Applies one elementary change.
    Apply {
        #[arg(long)]
        file: PathBuf,
        #[arg(long = "move", value_enum)]
        mv: MoveArg,
        /// Index into the sites of the move.
        #[arg(long, default_value_t = 0)]
        site: usize,
        /// Write the result.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A seeded random diagram.
    Random {
        /// Number of strata.
        #[arg(long, default_value_t = 4)]
        size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum MoveArg {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
}

impl From<MoveArg> for Move {
    fn from(m: MoveArg) -> Move {
        Move::ALL[m as usize]
    }
}

/// A failed command: the message is printed verbatim.
#[derive(Debug)]
pub struct Failure(pub String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(format!("IoError: {e}"))
    }
}

type Outcome = std::result::Result<Report, Failure>;

/// Parses `argv`, runs the command and writes the report. Returns the exit code:
/// 0 on success, 1 on a domain error, 2 on a usage error.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let text = if cli.json { report.to_json() + "\n" } else { report.to_string() };
            let _ = out.write_all(text.as_bytes());
            if report.command == "selftest" && report.get("failed").and_then(|v| v.as_u64()).unwrap_or(0) > 0 {
                1
            } else {
                0
            }
        }
        Err(Failure(msg)) => {
            let _ = writeln!(err, "{msg}");
            1
        }
    }
}

impl Cli {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances { pos_rel: self.tol_pos, leg: self.tol_leg, deriv: self.tol_deriv, sep_min: self.tol_sep, area: self.tol_area }
    }

    fn numerics(&self, resolution: usize) -> String {
        format!("resolution {resolution}, tol_pos {:e}, tol_leg {:e}, tol_deriv {:e}", self.tol_pos, self.tol_leg, self.tol_deriv)
    }

    fn load(&self, curve: Option<&str>, file: Option<&Path>) -> std::result::Result<(CurveSpec, Resolved), Failure> {
        let spec = match (curve, file) {
            (Some(name), _) => CurveSpec::parse_inline(name, self.resolution.unwrap_or(DEFAULT_RESOLUTION))?,
            (None, Some(path)) => {
                let mut spec: CurveSpec = std::fs::read_to_string(path)?.parse()?;
                if let Some(n) = self.resolution {
                    spec = CurveSpec::new(spec.family, n)?;
                }
                spec
            }
            (None, None) => return Err(Failure("BadParameters: a curve is required".into())),
        };
        let resolved = spec.resolve(&self.tolerances())?;
        Ok((spec, resolved))
    }

    fn load_input(&self, input: &CurveInput) -> std::result::Result<(CurveSpec, Resolved), Failure> {
        self.load(input.curve.as_deref(), input.file.as_deref())
    }
}

fn numbers(s: &str, count: usize, what: &str) -> std::result::Result<Vec<f64>, Failure> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Failure(format!("BadParameters: {what} expects {count} comma-separated numbers, got {s:?}")))?;
    if v.len() != count {
        return Err(Failure(format!("BadParameters: {what} expects {count} comma-separated numbers, got {s:?}")));
    }
    Ok(v)
}

fn count(x: f64, what: &str) -> std::result::Result<usize, Failure> {
    if x >= 1.0 && x.fract() == 0.0 {
        Ok(x as usize)
    } else {
        Err(Failure(format!("BadParameters: {what} must be a positive integer, got {x}")))
    }
}

fn read_disk(path: &Path) -> std::result::Result<DiskDiagram, Failure> {
    Ok(std::fs::read_to_string(path)?.parse()?)
}

fn load_map(spec: &str) -> std::result::Result<SphereMap, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        Ok(parse_map(&std::fs::read_to_string(path)?)?)
    } else {
        Ok(builtin_map(spec)?)
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Invariants { input, diagram_out } => invariants(cli, input, diagram_out.as_deref()),
        Command::Tangencies { input } => tangencies(cli, input),
        Command::Lift { input, y0, table_out, rows } => lift(cli, input, *y0, table_out.as_deref(), *rows),
        Command::Area { input, lobe, pair, stabilize, double_stabilize, table_out, rows } => area(
            cli,
            input,
            Modification::from_flags(lobe.as_deref(), pair.as_deref(), stabilize.as_deref(), double_stabilize.as_deref())?,
            table_out.as_deref(),
            *rows,
        ),
        Command::Disk { command } => disk(cli, command),
        Command::Degree { map, grid, point } => degree(map, *grid, point.as_deref()),
        Command::Kalman { p, q, alpha, t0, grid } => kalman(*p, *q, *alpha, *t0, *grid),
        Command::Render { curve, file, disk, svg_out } => render_cmd(cli, curve.as_deref(), file.as_deref(), disk.as_deref(), svg_out),
        Command::Selftest { only } => selftest(only),
    }
}

fn invariants(cli: &Cli, input: &CurveInput, diagram_out: Option<&Path>) -> Outcome {
    let (spec, resolved) = cli.load_input(input)?;
    let tol = cli.tolerances();
    let num = cli.numerics(spec.resolution);
    let mut r = Report::new("invariants");
    r.push("curve", spec.family.to_string(), "");
    match resolved {
        Resolved::Curve(c) => {
            c.validate(&tol)?;
            let d = front_diagram(&c, &tol)?;
            let tb = thurston_bennequin(&d);
            let rot = rotation_number(&c, &tol)?;
            r.push("rot", rot, num.clone());
            r.push("tb", tb, format!("front diagram, {num}"));
            match tb_linking_oracle(&c) {
                Ok(v) => r.push("tb_oracle", v, format!("Reeb push-off linking, {num}")),
                Err(e) => r.push("tb_oracle", e.to_string(), format!("Reeb push-off linking, {num}")),
            }
            r.push("cusps", d.cusps.len(), num.clone());
            r.push("crossings", d.crossings.len(), num.clone());
            r.push("writhe", d.writhe(), num.clone());
            r.push("tb_plus_rot_odd", (tb + rot).rem_euclid(2) == 1, num.clone());
            r.push("total_area", total_area(&c), format!("periodic trapezoid, {num}"));
            if let Some(path) = diagram_out {
                std::fs::write(path, d.to_string())?;
                r.push("diagram_out", path.display().to_string(), "");
            }
        }
        Resolved::Horizontal(c) => {
            c.check_horizontal(&tol)?;
            let g = geiges_project(&c, &tol)?;
            r.push("horizontal_rot", horizontal_rotation_number(&c, &tol)?, num.clone());
            r.push("geiges_rot", rotation_number(&g, &tol)?, num.clone());
            r.push("geiges_total_area", total_area(&g), format!("periodic trapezoid, {num}"));
            r.push("horizontal_residual", c.horizontal_residual(), num.clone());
        }
        Resolved::Loop(f) => {
            r.push("theta_samples", f.theta_samples, "");
            r.push("loop_rot", loop_rotation_number(&f, &tol)?, format!("{num}, theta samples {}", f.theta_samples));
            let areas: Vec<f64> = f.thetas().map(|th| total_area(&f.at(th))).collect();
            let worst = areas.iter().fold(0.0f64, |m, a| m.max(a.abs()));
            r.push("max_abs_slice_area", worst, format!("periodic trapezoid, {num}"));
        }
    }
    Ok(r)
}

fn legendrian(resolved: Resolved, tol: &Tolerances) -> std::result::Result<Curve3, Failure> {
    match resolved {
        Resolved::Curve(c) => Ok(c),
        Resolved::Horizontal(c) => Ok(geiges_project(&c, tol)?),
        Resolved::Loop(_) => Err(Failure("BadParameters: a single curve is required, got a loop".into())),
    }
}

fn tangencies(cli: &Cli, input: &CurveInput) -> Outcome {
    let (spec, resolved) = cli.load_input(input)?;
    let tol = cli.tolerances();
    let num = cli.numerics(spec.resolution);
    let c = legendrian(resolved, &tol)?;
    let reps = tangency_reports(&c, &tol)?;
    let mut r = Report::new("tangencies");
    r.push("curve", spec.family.to_string(), "");
    r.push("double_points", reps.len(), num.clone());
    for (k, t) in reps.iter().enumerate() {
        r.push(format!("tangency.{k}.t"), json!([t.intersection.t0, t.intersection.t1]), num.clone());
        r.push(format!("tangency.{k}.epsilon_a"), t.epsilon_a, num.clone());
        r.push(format!("tangency.{k}.lower_upper"), json!([t.branch_order.0, t.branch_order.1]), num.clone());
        r.push(format!("tangency.{k}.framing_sign"), t.framing_sign, num.clone());
    }
    Ok(r)
}

fn lift(cli: &Cli, input: &CurveInput, y0: f64, table_out: Option<&Path>, rows: usize) -> Outcome {
    let (spec, resolved) = cli.load_input(input)?;
    let tol = cli.tolerances();
    let num = cli.numerics(spec.resolution);
    let c = legendrian(resolved, &tol)?;
    let mut r = Report::new("lift");
    r.push("curve", spec.family.to_string(), "");
    r.push("total_area", total_area(&c), format!("periodic trapezoid, {num}, tol_area {:e}", cli.tol_area));
    let l = lift_horizontal(&c, y0, &tol)?;
    r.push("embedded", l.embedded, format!("area certificate, {num}, tol_area {:e}", cli.tol_area));
    r.push("double_points", l.tangencies.len(), num.clone());
    for (k, t) in l.tangencies.iter().enumerate() {
        r.push(format!("tangency.{k}.epsilon_a"), t.epsilon_a, num.clone());
    }
    r.push("horizontal_residual", l.curve.horizontal_residual(), num.clone());
    r.push("horizontal_rot", horizontal_rotation_number(&l.curve, &tol)?, num.clone());
    if let Some(path) = table_out {
        std::fs::write(path, table_of_curve4(&l.curve, rows).to_string())?;
        r.push("table_out", path.display().to_string(), format!("{rows} rows"));
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy)]
enum Modification {
    None,
    Lobe { p: f64, a: f64, n: usize },
    Pair { p: f64, q: f64, a: f64, n: usize },
    Stabilize(i8),
    DoubleStabilize { loc: f64, a: f64 },
}

impl Modification {
    fn from_flags(
        lobe: Option<&str>,
        pair: Option<&str>,
        stab: Option<&str>,
        ds: Option<&str>,
    ) -> std::result::Result<Modification, Failure> {
        if let Some(s) = lobe {
            let v = numbers(s, 3, "--lobe")?;
            return Ok(Modification::Lobe { p: v[0], a: v[1], n: count(v[2], "lobe count")? });
        }
        if let Some(s) = pair {
            let v = numbers(s, 4, "--pair")?;
            return Ok(Modification::Pair { p: v[0], q: v[1], a: v[2], n: count(v[3], "lobe count")? });
        }
        if let Some(s) = stab {
            return match s.trim() {
                "+" | "1" | "+1" => Ok(Modification::Stabilize(1)),
                "-" | "-1" => Ok(Modification::Stabilize(-1)),
                _ => Err(Failure(format!("BadParameters: stabilization sign must be + or -, got {s:?}"))),
            };
        }
        if let Some(s) = ds {
            let v = numbers(s, 2, "--double-stabilize")?;
            return Ok(Modification::DoubleStabilize { loc: v[0], a: v[1] });
        }
        Ok(Modification::None)
    }
}

fn area(cli: &Cli, input: &CurveInput, m: Modification, table_out: Option<&Path>, rows: usize) -> Outcome {
    let (spec, resolved) = cli.load_input(input)?;
    let tol = cli.tolerances();
    let num = cli.numerics(spec.resolution);
    let quad = format!("periodic trapezoid, {num}");
    let mut r = Report::new("area");
    r.push("curve", spec.family.to_string(), "");
    let write_table = |r: &mut Report, text: String| -> std::result::Result<(), Failure> {
        if let Some(path) = table_out {
            std::fs::write(path, text)?;
            r.push("table_out", path.display().to_string(), format!("{rows} rows"));
        }
        Ok(())
    };
    match resolved {
        Resolved::Horizontal(c4) => {
            let before = total_area(&geiges_project(&c4, &tol)?);
            r.push("total_area", before, quad.clone());
            let modified = match m {
                Modification::None => None,
                Modification::Lobe { p, a, n } => Some(add_area_lobe_horizontal(&c4, p, a, n, &tol)?),
                Modification::Pair { p, q, a, n } => Some(add_area_pair_horizontal(&c4, p, q, a, n, &tol)?),
                Modification::DoubleStabilize { loc, a } => {
                    let (out, rep) = double_stabilization_horizontal(&c4, loc, a, None, &tol)?;
                    r.push("epsilon_a", rep.epsilon_a, num.clone());
                    Some(out)
                }
                Modification::Stabilize(_) => {
                    return Err(Failure("BadParameters: stabilization applies to Legendrian curves".into()))
                }
            };
            if let Some(out) = modified {
                r.push("modified_total_area", total_area(&geiges_project(&out, &tol)?), quad.clone());
                r.push("modified_rot", horizontal_rotation_number(&out, &tol)?, num.clone());
                write_table(&mut r, table_of_curve4(&out, rows).to_string())?;
            }
        }
        resolved => {
            let c = legendrian(resolved, &tol)?;
            r.push("total_area", total_area(&c), quad.clone());
            let modified = match m {
                Modification::None => None,
                Modification::Lobe { p, a, n } => Some(add_area_lobe(&c, p, a, n)?),
                Modification::Pair { p, q, a, n } => Some(add_area_pair(&c, p, q, a, n)?),
                Modification::Stabilize(s) => Some(stabilize(&c, s)?),
                Modification::DoubleStabilize { loc, a } => {
                    let ds = double_stabilization(&c, loc, a, &tol)?;
                    r.push("epsilon_a", ds.report.epsilon_a, num.clone());
                    Some(ds.curve)
                }
            };
            if let Some(out) = modified {
                let d = front_diagram(&out, &tol)?;
                r.push("modified_total_area", total_area(&out), quad.clone());
                r.push("modified_tb", thurston_bennequin(&d), format!("front diagram, {num}"));
                r.push("modified_rot", rotation_number(&out, &tol)?, num.clone());
                write_table(&mut r, table_of_curve(&out, rows).to_string())?;
            }
        }
    }
    Ok(r)
}

fn diagram_lines(d: &DiskDiagram) -> Vec<String> {
    d.to_string().lines().map(str::to_string).collect()
}

fn disk_summary(r: &mut Report, d: &DiskDiagram) {
    r.push("Area", area_invariant(d), "exact");
    r.push("min_zero_parity", min_zero_parity(d), "exact");
    r.push("obstructed", obstructed_curves(d), "exact");
}

fn disk(cli: &Cli, cmd: &DiskCommand) -> Outcome {
    let mut r = Report::new("disk");
    match cmd {
        DiskCommand::Area { file } => {
            let d = read_disk(file)?;
            r.push("Area", area_invariant(&d), "exact");
            r.push("min_zero_parity", min_zero_parity(&d), "exact");
        }
        DiskCommand::Obstructed { file } => {
            let d = read_disk(file)?;
            r.push("obstructed", obstructed_curves(&d), "exact");
            r.push("count", obstructed_curves(&d).len(), "exact");
        }
        DiskCommand::Sites { file } => {
            let d = read_disk(file)?;
            for mv in Move::ALL {
                let s: Vec<String> = sites(&d, mv).iter().map(|c| format!("{c:?}")).collect();
                r.push(format!("{mv:?}"), s, "exact");
            }
        }
        DiskCommand::Apply { file, mv, site, out } => {
            let d = read_disk(file)?;
            let mv = Move::from(*mv);
            let available = sites(&d, mv);
            let change = available.get(*site).ok_or_else(|| {
                Failure(format!("MoveNotApplicable: {mv:?} has {} sites, index {site} requested", available.len()))
            })?;
            let e = elementary_change(&d, change)?;
            r.push("change", format!("{change:?}"), "");
            r.push("Area_before", area_invariant(&d), "exact");
            disk_summary(&mut r, &e);
            r.push("diagram", diagram_lines(&e), "");
            if let Some(path) = out {
                std::fs::write(path, e.to_string())?;
            }
        }
        DiskCommand::Random { size, out } => {
            let d = random_diagram(cli.seed, *size);
            r.push("seed", cli.seed, "");
            disk_summary(&mut r, &d);
            r.push("diagram", diagram_lines(&d), "");
            if let Some(path) = out {
                std::fs::write(path, d.to_string())?;
            }
        }
    }
    Ok(r)
}

fn degree(spec: &str, grid: Option<usize>, point: Option<&str>) -> Outcome {
    let mut m = load_map(spec)?;
    if let Some(n) = grid {
        m = m.with_grid(n);
    }
    let mut r = Report::new("degree");
    r.push("map", spec, "");
    r.push("domain", m.domain.to_string(), "");
    match m.domain {
        Domain::Circle => {
            r.push("degree", winding_number(&m)?, format!("winding, {} samples", m.grid.max(16)));
        }
        Domain::Sphere2 | Domain::Sphere2xCircle | Domain::Sphere3 => {
            let e = if m.domain == Domain::Sphere2 { degree_s2_estimate(&m)? } else { degree_3_to_s3_estimate(&m)? };
            let prov = format!("midpoint quadrature, grid {}", e.grid);
            r.push("raw", e.raw, prov.clone());
            r.push("degree", e.degree, prov.clone());
            r.push("defect", e.defect, prov);
        }
    }
    if let Some(p) = point {
        let q = numbers(p, m.domain.target_dim(), "--point")?;
        r.push("regular_value_degree", degree_regular_value(&m, &q)?, format!("Newton preimages, seed grid from {}", m.grid));
    }
    Ok(r)
}

fn kalman(p: i64, q: i64, alpha: u32, t0: f64, grid: usize) -> Outcome {
    let m = kalman_obstruction_sphere(p, q, alpha, t0)?.with_grid(grid);
    let raw = degree_integral(&m, grid);
    let mut r = Report::new("kalman");
    let v = obstruction_tangent(p, q, t0);
    r.push("p", p, "");
    r.push("q", q, "");
    r.push("alpha", alpha, "");
    r.push("t0", t0, "");
    r.push("tangent", json!([v[0], v[1], v[2]]), "analytic");
    let prov = format!("midpoint quadrature, grid {grid}");
    r.push("raw", raw, prov.clone());
    let e = degree_s2_estimate(&m)?;
    let refined = format!("midpoint quadrature, grid {}", e.grid);
    r.push("degree", e.degree, refined.clone());
    r.push("defect", e.defect, refined);
    Ok(r)
}

fn render_cmd(cli: &Cli, curve: Option<&str>, file: Option<&Path>, disk: Option<&Path>, svg_out: &Path) -> Outcome {
    let mut r = Report::new("render");
    let svg = if let Some(path) = disk {
        let d = read_disk(path)?;
        r.push("strata", d.curves.len(), "exact");
        r.push("boundary_points", d.boundary_count(), "exact");
        render::disk_svg(&d)
    } else {
        let tol = cli.tolerances();
        let (spec, resolved) = cli.load(curve, file)?;
        let c = match resolved {
            Resolved::Loop(f) => f.at(0.0),
            other => legendrian(other, &tol)?,
        };
        let d = front_diagram(&c, &tol)?;
        let num = cli.numerics(spec.resolution);
        r.push("curve", spec.family.to_string(), "");
        r.push("cusps", d.cusps.len(), num.clone());
        r.push("crossings", d.crossings.len(), num);
        render::front_svg(&c, &tol)?
    };
    std::fs::write(svg_out, &svg)?;
    r.push("svg_out", svg_out.display().to_string(), "");
    Ok(r)
}

fn selftest(only: &[usize]) -> Outcome {
    let mut r = Report::new("selftest");
    let (mut passed, mut failed) = (0usize, 0usize);
    for id in 1..=CRITERIA {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let c = run_criterion(id);
        if c.passed {
            passed += 1;
        } else {
            failed += 1;
        }
        r.push(
            format!("criterion.{id}"),
            if c.passed { "PASS" } else { "FAIL" },
            format!("{}: {} ({:.1} s)", c.name, c.detail, c.seconds),
        );
    }
    r.push("passed", passed, "");
    r.push("failed", failed, "");
    Ok(r)
}
