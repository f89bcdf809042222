use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::ValueEnum;
use serde_json::{json, Value};

use transversal_core::centers;
use transversal_core::depth::{self, DepthRegion, HalfSpaceSide, OrthoFrame, WeightedPointCloud, FRAME_TOLERANCE};
use transversal_core::gen::{self, Family, GenParams};
use transversal_core::rational::{format_rational, parse_rational, quantize, to_f64, Point, Rational};
use transversal_core::schubert::{self, GrassmannContext};
use transversal_core::simplex::{self, VertexTuple};
use transversal_core::transversal::{self, SearchConfig, StepSchedule};

use crate::report::{emit, to_value, Output, RunManifest, Table, Timing};
use crate::{Check, Cli, Command, DepthArgs, Failure, GenArgs, ReadArgs, SchubertArgs, SimplexArgs, TransversalArgs};

/// Directions sampled for the depth of measures above dimension two.
const HEURISTIC_SAMPLES: usize = 1000;
/// Decimal digits of the rational directions in a depth profile.
const PROFILE_DIGITS: u32 = 9;

/// Runs the subcommand, writes its report, and signals a failed check after
/// the report is out.
pub fn run(cli: &Cli) -> Result<(), Failure> {
    let start = Instant::now();
    let (mut out, passed) = match &cli.command {
        Command::Bounds { m, n } => (bounds(*m, *n)?, true),
        Command::Schubert(args) => schubert_cmd(args)?,
        Command::Gen(args) => (gen_cmd(args)?, true),
        Command::Depth(args) => (depth_cmd(args)?, true),
        Command::Center { input, n, read } => (center_cmd(input, *n, read)?, true),
        Command::Simplex(args) => (simplex_cmd(args)?, true),
        Command::Transversal(args) => transversal_cmd(args)?,
    };
    if cli.timing {
        out.manifest.timing = Some(Timing { elapsed_ms: start.elapsed().as_secs_f64() * 1e3 });
    }
    emit(cli, &out)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn input_error(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Input(e.into())
}

fn rat_str(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

fn point_str(p: &[Rational]) -> Vec<String> {
    p.iter().map(format_rational).collect()
}

fn parse_point(s: &str) -> Result<Point, Failure> {
    s.split(',').map(|t| parse_rational(t.trim())).collect::<Result<_, _>>().map_err(Failure::from)
}

fn parse_number(s: &str) -> Result<f64, Failure> {
    let s = s.trim();
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Ok(to_f64(&parse_rational(s)?)),
    }
}

pub fn read_cloud(path: &Path, read: &ReadArgs) -> Result<WeightedPointCloud, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::Input)?;
    let tabular = matches!(path.extension().and_then(|e| e.to_str()), Some("csv" | "tsv"));
    let cloud = if tabular {
        WeightedPointCloud::from_csv(&text, read.denominator_bound)
    } else {
        WeightedPointCloud::from_json(&text)
    };
    cloud.map_err(|e| input_error(anyhow!("{}: {e}", path.display())))
}

fn region_table(region: &DepthRegion) -> Table {
    let header: Vec<String> = (1..=region.dim).map(|i| format!("x{i}")).collect();
    let mut t = Table { header, rows: Vec::new() };
    for v in &region.vertices {
        t.push(point_str(v));
    }
    t
}

fn float_rows_table(rows: &[Vec<f64>], prefix: &str) -> Table {
    let width = rows.first().map_or(0, Vec::len);
    let mut t = Table { header: (1..=width).map(|i| format!("{prefix}{i}")).collect(), rows: Vec::new() };
    for r in rows {
        t.push(r.iter().map(|x| format!("{x:.15e}")).collect());
    }
    t
}

fn bounds(m: usize, n: usize) -> Result<Output, Failure> {
    let n_min = schubert::min_dimension(m, n)?;
    let (rado, improved) = depth::thresholds(n)?;
    let result = json!({ "m": m, "n": n, "n_min": n_min, "rado": rat_str(&rado), "improved": rat_str(&improved) });
    let mut table = Table::new(&["m", "n", "n_min", "rado", "improved"]);
    table.push(vec![m.to_string(), n.to_string(), n_min.to_string(), format_rational(&rado), format_rational(&improved)]);
    let manifest = RunManifest::new("bounds", &[], None, json!({ "m": m, "n": n }));
    Ok(Output { manifest, result, table: Some(table) })
}

fn require(x: Option<usize>, flag: &str) -> Result<usize, Failure> {
    x.ok_or_else(|| input_error(anyhow!("--{flag} is required here")))
}

fn support_table(c: &schubert::Cochain) -> Table {
    let n = c.context().n();
    let mut t = Table { header: (1..=n).map(|i| format!("a{i}")).collect(), rows: Vec::new() };
    for a in c.support() {
        t.push(a.iter().map(usize::to_string).collect());
    }
    t
}

fn schubert_cmd(args: &SchubertArgs) -> Result<(Output, bool), Failure> {
    let config = json!({
        "n": args.n,
        "codim": args.codim,
        "exponents": args.exponents,
        "check": args.check.and_then(|c| c.to_possible_value()).map(|v| v.get_name().to_string()),
        "m": args.m,
    });
    let manifest = RunManifest::new("schubert", &[], None, config);
    if let Some(exponents) = &args.exponents {
        let ctx = GrassmannContext::new(require(args.n, "n")?, require(args.codim, "codim")?)?;
        let product = schubert::monomial(ctx, exponents)?;
        let result = json!({
            "exponents": exponents,
            "product": to_value(&product)?,
            "nonvanishing": !product.is_zero(),
        });
        let table = support_table(&product);
        return Ok((Output { manifest, result, table: Some(table) }, true));
    }
    let check = args.check.ok_or_else(|| input_error(anyhow!("give --exponents or --check")))?;
    let (result, passed, table) = match check {
        Check::MainObstruction => {
            let r = schubert::obstruction_main(require(args.m, "m")?, require(args.n, "n")?)?;
            let table = support_table(&r.product);
            (to_value(&r)?, r.passed(), Some(table))
        }
        Check::Power2free => {
            let r = schubert::obstruction_power2free(require(args.m, "m")?, require(args.n, "n")?)?;
            (to_value(&r)?, r.passed(), None)
        }
        Check::Heights => {
            let ctx = GrassmannContext::new(require(args.n, "n")?, require(args.codim, "codim")?)?;
            let top = schubert::wn_power(ctx, ctx.codim());
            let beyond = schubert::wn_power(ctx, ctx.codim() + 1);
            let h1 = schubert::height_w1(ctx);
            let passed = !top.is_zero() && beyond.is_zero() && h1 >= ctx.codim();
            let result = json!({
                "n": ctx.n(),
                "codim": ctx.codim(),
                "wn_top_power_nonzero": !top.is_zero(),
                "wn_next_power_zero": beyond.is_zero(),
                "height_w1": h1,
                "height_w1_at_least_codim": h1 >= ctx.codim(),
            });
            (result, passed, None)
        }
        Check::Whitney => {
            let ctx = GrassmannContext::new(require(args.n, "n")?, require(args.codim, "codim")?)?;
            let violation = schubert::whitney_violation(ctx);
            let result = json!({ "n": ctx.n(), "codim": ctx.codim(), "first_failing_degree": violation });
            (result, violation.is_none(), None)
        }
    };
    let mut result = result;
    result["passed"] = Value::Bool(passed);
    Ok((Output { manifest, result, table }, passed))
}

fn gen_cmd(args: &GenArgs) -> Result<Output, Failure> {
    let family: Family = args.family.parse()?;
    let config = json!({
        "family": family.name(),
        "dim": args.dim,
        "atoms": args.atoms,
        "digits": args.digits,
        "weight_max": args.weight_max,
        "spread": args.spread,
        "count": args.count,
        "out_dir": args.out_dir.as_ref().map(|p| p.display().to_string()),
    });
    let manifest = RunManifest::new("gen", &[], Some(args.seed), config);
    let mut instances = Vec::new();
    let mut files = Vec::new();
    let mut table = Table::new(&["instance", "seed", "atoms", "file"]);
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).map_err(Failure::Runtime)?;
    }
    for i in 0..args.count {
        let seed = args.seed.wrapping_add(i);
        let params = GenParams {
            dim: args.dim,
            atoms: args.atoms,
            seed,
            digits: args.digits,
            weight_max: args.weight_max,
            spread: args.spread,
        };
        let cloud = gen::generate(family, &params)?;
        let file = match &args.out_dir {
            Some(dir) => {
                let path: PathBuf = dir.join(format!("{}-{seed}.json", family.name()));
                let mut text = cloud.to_json();
                text.push('\n');
                fs::write(&path, text).with_context(|| format!("writing {}", path.display())).map_err(Failure::Runtime)?;
                files.push(path.display().to_string());
                path.display().to_string()
            }
            None => {
                instances.push(to_value(&cloud)?);
                String::new()
            }
        };
        table.push(vec![i.to_string(), seed.to_string(), cloud.len().to_string(), file]);
    }
    let result = if args.out_dir.is_some() { json!({ "files": files }) } else { json!({ "instances": instances }) };
    Ok(Output { manifest, result, table: Some(table) })
}

/// Closed half-space masses `{y : <y - x, u> >= 0}` for evenly spaced `u`.
fn profile(cloud: &WeightedPointCloud, x: &[Rational], k: usize) -> Result<Table, Failure> {
    let directions: Vec<(f64, Point)> = match cloud.dim() {
        1 => vec![(0.0, vec![Rational::from_integer(1.into())]), (std::f64::consts::PI, vec![Rational::from_integer((-1).into())])],
        2 => {
            if k == 0 {
                return Err(input_error(anyhow!("profile needs at least one direction")));
            }
            (0..k)
                .map(|i| {
                    let theta = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                    (theta, vec![quantize(theta.cos(), PROFILE_DIGITS), quantize(theta.sin(), PROFILE_DIGITS)])
                })
                .collect()
        }
        d => return Err(input_error(anyhow!("depth profiles are available in dimensions 1 and 2, not {d}"))),
    };
    let mut t = Table::new(&["angle", "mass", "mass_decimal"]);
    for (theta, u) in directions {
        let a: Rational = u.iter().zip(x).map(|(c, p)| c * p).sum();
        let mass = depth::halfspace_mass(cloud, &u, &a, HalfSpaceSide::Upper)?;
        t.push(vec![format!("{theta:.12}"), format_rational(&mass), format!("{:.12}", to_f64(&mass))]);
    }
    Ok(t)
}

fn depth_cmd(args: &DepthArgs) -> Result<Output, Failure> {
    let cloud = read_cloud(&args.input, &args.read)?;
    let config = json!({
        "point": args.point,
        "region": args.region,
        "profile": args.profile,
        "denominator_bound": args.read.denominator_bound,
    });
    let manifest = RunManifest::new("depth", &[args.input.as_path()], None, config);
    let (measure, deepest) = if cloud.dim() <= 2 {
        depth::depth_of_measure(&cloud)?
    } else {
        depth::depth_of_measure_heuristic(&cloud, HEURISTIC_SAMPLES, 0)?
    };
    let mut result = json!({
        "dim": cloud.dim(),
        "atoms": cloud.len(),
        "depth_of_measure": to_value(&measure)?,
        "deepest_point": point_str(&deepest),
    });
    let mut table = None;
    let point = args.point.as_deref().map(parse_point).transpose()?;
    if let Some(x) = &point {
        result["point"] = json!(point_str(x));
        result["point_depth"] = to_value(&depth::tukey_depth(&cloud, x)?)?;
    }
    if let Some(level) = &args.region {
        let tau = parse_rational(level)?;
        let region = depth::depth_region(&cloud, &tau)?;
        result["region_level"] = rat_str(&tau);
        result["region"] = to_value(&region)?;
        table = Some(region_table(&region));
    }
    if let Some(k) = args.profile {
        let at = point.unwrap_or(deepest);
        result["profile_center"] = json!(point_str(&at));
        table = Some(profile(&cloud, &at, k)?);
    }
    Ok(Output { manifest, result, table })
}

fn center_cmd(input: &Path, n: Option<usize>, read: &ReadArgs) -> Result<Output, Failure> {
    let cloud = read_cloud(input, read)?;
    let n = n.unwrap_or(cloud.dim());
    let report = centers::center_point(&cloud, n)?;
    let table = report.region.as_ref().map(region_table);
    let manifest = RunManifest::new("center", &[input], None, json!({ "n": n, "denominator_bound": read.denominator_bound }));
    Ok(Output { manifest, result: to_value(&report)?, table })
}

fn parse_vertices(s: &str) -> Result<Vec<Vec<f64>>, Failure> {
    s.split(';').map(|row| row.split(',').map(parse_number).collect()).collect()
}

fn simplex_cmd(args: &SimplexArgs) -> Result<Output, Failure> {
    let (tuple, surrogate, inputs): (VertexTuple, bool, Vec<&Path>) = match (&args.vertices, &args.input) {
        (Some(v), None) => (VertexTuple::new(parse_vertices(v)?)?, false, vec![]),
        (None, Some(path)) => {
            let cloud = read_cloud(path, &args.read)?;
            (simplex::witness_vertices(&cloud, cloud.dim(), args.force)?, true, vec![path.as_path()])
        }
        _ => return Err(input_error(anyhow!("give exactly one of --vertices or --input"))),
    };
    let placement = simplex::delta_of_vertices(&tuple)?;
    let config = json!({ "vertices": args.vertices, "force": args.force, "denominator_bound": args.read.denominator_bound });
    let manifest = RunManifest::new("simplex", &inputs, None, config);
    let result = json!({
        "vertex_tuple": tuple.v,
        "surrogate": surrogate,
        "placement": to_value(&placement)?,
    });
    let table = float_rows_table(&placement.delta_vertices, "x");
    Ok(Output { manifest, result, table: Some(table) })
}

fn read_frame(path: &Path) -> Result<OrthoFrame, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::Input)?;
    let rows: Vec<Vec<f64>> =
        serde_json::from_str(&text).with_context(|| format!("{}: expected a JSON array of rows", path.display())).map_err(Failure::Input)?;
    Ok(OrthoFrame::new(rows, FRAME_TOLERANCE)?)
}

fn transversal_cmd(args: &TransversalArgs) -> Result<(Output, bool), Failure> {
    let clouds = args.input.iter().map(|p| read_cloud(p, &args.read)).collect::<Result<Vec<_>, _>>()?;
    let target = match &args.target {
        Some(t) => parse_rational(t)?,
        None => depth::thresholds(args.n)?.1,
    };
    let config = SearchConfig {
        restarts: args.restarts,
        local_steps: args.local_steps,
        step_schedule: StepSchedule { initial_angle: args.initial_angle, decay: args.decay, ..StepSchedule::default() },
        master_seed: args.seed,
        target: target.clone(),
    };
    let report = match &args.frame {
        Some(path) => transversal::verify(&read_frame(path)?, &clouds, &target)?,
        None => transversal::search(&clouds, args.n, &config)?,
    };
    let table = match &report.stats {
        Some(stats) => {
            let mut t = Table::new(&["step", "objective", "objective_decimal", "angle"]);
            for p in &stats.trajectory {
                t.push(vec![p.step.to_string(), format_rational(&p.objective), format!("{:.12}", to_f64(&p.objective)), format!("{:.12}", p.angle)]);
            }
            t
        }
        None => float_rows_table(&report.frame, "e"),
    };
    let mut echo = to_value(&config)?;
    echo["n"] = json!(args.n);
    echo["frame"] = json!(args.frame.as_ref().map(|p| p.display().to_string()));
    echo["denominator_bound"] = json!(args.read.denominator_bound);
    let mut inputs: Vec<&Path> = args.input.iter().map(PathBuf::as_path).collect();
    if let Some(f) = &args.frame {
        inputs.push(f);
    }
    let manifest = RunManifest::new("transversal", &inputs, Some(args.seed), echo);
    let passed = report.success;
    Ok((Output { manifest, result: to_value(&report)?, table: Some(table) }, passed))
}
