use std::collections::BTreeMap;
use std::fmt;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sepkit_core::arith::rational_string;
use sepkit_core::construction::ConstructionReport;
use sepkit_core::separation::{OpenSetApprox, TypeCensus};
use sepkit_core::{
    constructed_v_type_census, convex_type_census, diagram_for_level, distinctness_check, emit_svg,
    endpoint_separation, exact_overlap_scan, osc_dimension, param_point, run_construction, verify_osc_open_set,
    wsp_min_displacement, ConstructionTemplate, DrivingSequence, Example, IfsSystem, ParamPoint, RationalInterval,
};

use crate::args::{Check, Command, OpenSetKind, Source};

pub enum Outcome {
    Pass,
    Violation,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(sepkit_core::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<sepkit_core::Error> for CliError {
    fn from(e: sepkit_core::Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Everything needed to reproduce a run; embedded in every JSON report.
#[derive(Serialize)]
struct RunConfig {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    example: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    template: Option<String>,
    sequence: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    param: Option<String>,
    oracle_budget: usize,
    options: BTreeMap<&'static str, Value>,
}

struct Context {
    template: ConstructionTemplate,
    sequence: DrivingSequence,
    point: ParamPoint,
    example: Option<Example>,
    exact_param: bool,
    caveats: Vec<String>,
    config: RunConfig,
}

impl Context {
    fn system(&self) -> &IfsSystem {
        &self.template.system
    }

    fn option(&mut self, key: &'static str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("plain data serializes");
        self.config.options.insert(key, v);
    }

    fn require_construction(&self, what: &str) -> CliResult<()> {
        if self.exact_param {
            return Err(CliError::Usage(format!("--param does not apply to {what}")));
        }
        Ok(())
    }

    fn seed(&self, given: Option<RationalInterval>) -> CliResult<RationalInterval> {
        given
            .or_else(|| self.example.map(Example::open_set_seed))
            .ok_or_else(|| CliError::Usage("--seed is required with --template".into()))
    }

    fn emit(&self, property: &str, passed: Option<bool>, report: impl Serialize) -> CliResult<Outcome> {
        let envelope = Envelope {
            property,
            config: &self.config,
            passed,
            caveats: &self.caveats,
            report,
        };
        let text = serde_json::to_string_pretty(&envelope).expect("report serializes");
        let mut stdout = std::io::stdout().lock();
        if let Err(e) = writeln!(stdout, "{text}") {
            if e.kind() != std::io::ErrorKind::BrokenPipe {
                return Err(sepkit_core::Error::from(e).into());
            }
        }
        Ok(if passed == Some(false) { Outcome::Violation } else { Outcome::Pass })
    }
}

#[derive(Serialize)]
struct Envelope<'a, R> {
    property: &'a str,
    config: &'a RunConfig,
    passed: Option<bool>,
    caveats: &'a [String],
    report: R,
}

fn load(command: &'static str, source: &Source) -> CliResult<Context> {
    let (template, example) = match (&source.example, &source.template) {
        (Some(ex), None) => (ex.template(), Some(*ex)),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read template {}: {e}", path.display())))?;
            let tmpl: ConstructionTemplate = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("invalid template {}: {e}", path.display())))?;
            tmpl.validate()
                .map_err(|e| CliError::Usage(format!("invalid template {}: {e}", path.display())))?;
            (tmpl, None)
        }
        _ => return Err(CliError::Usage("give exactly one of --example and --template".into())),
    };
    if source.oracle_budget == 0 {
        return Err(CliError::Usage("oracle budget must be positive".into()));
    }
    let (point, caveats) = match &source.param {
        Some(value) => (
            ParamPoint::exact(value.clone()),
            vec![format!("exact parameter a = {}: the constructed limit is not used", rational_string(value))],
        ),
        None => (param_point(&template, &source.sequence), source.sequence.caveats()),
    };
    let point = point.with_budget(source.oracle_budget);
    let validation = template.system.validate(&point)?;
    if !validation.valid {
        return Err(CliError::Usage(format!("invalid system: {}", validation.problems.join("; "))));
    }
    let config = RunConfig {
        command,
        example: example.map(Example::number),
        template: source.template.as_ref().map(|p| p.display().to_string()),
        sequence: source.sequence.to_string(),
        param: source.param.as_ref().map(rational_string),
        oracle_budget: source.oracle_budget,
        options: BTreeMap::new(),
    };
    Ok(Context {
        template,
        sequence: source.sequence.clone(),
        point,
        example,
        exact_param: source.param.is_some(),
        caveats,
        config,
    })
}

fn positive(name: &str, value: usize) -> CliResult<()> {
    if value == 0 {
        return Err(CliError::Usage(format!("--{name} must be positive")));
    }
    Ok(())
}

pub fn run(command: Command) -> CliResult<Outcome> {
    match command {
        Command::Construct {
            source,
            depth,
            digits,
            json,
        } => {
            positive("depth", depth)?;
            let mut ctx = load("construct", &source)?;
            ctx.require_construction("construct")?;
            ctx.option("depth", depth);
            ctx.option("digits", digits);
            let report = ConstructionReport::build(&ctx.template, &ctx.sequence, depth, &ctx.point, digits)?;
            if json {
                return ctx.emit("construction", None, report);
            }
            for caveat in &report.caveats {
                eprintln!("caveat: {caveat}");
            }
            match &report.a_decimal {
                Some(a) => {
                    println!("{a}");
                    Ok(Outcome::Pass)
                }
                None => Err(CliError::Core(sepkit_core::Error::Undecided {
                    depth: ctx.point.budget(),
                    expr: "a".into(),
                })),
            }
        }
        Command::Types {
            source,
            open_set,
            seed,
            levels,
            truncation,
        } => {
            positive("levels", levels)?;
            let mut ctx = load("types", &source)?;
            ctx.option("levels", levels);
            let census: TypeCensus = match open_set {
                OpenSetKind::Convex => {
                    ctx.option("open_set", "convex");
                    convex_type_census(ctx.system(), &ctx.point, levels)?
                }
                OpenSetKind::Constructed => {
                    let seed = ctx.seed(seed)?;
                    let depth = truncation.unwrap_or(levels + 2);
                    ctx.option("open_set", "constructed");
                    ctx.option("seed", &seed);
                    ctx.option("truncation", depth);
                    let approx = OpenSetApprox::new(seed, depth)?;
                    constructed_v_type_census(ctx.system(), &ctx.point, &approx, levels)?
                }
            };
            ctx.emit("neighbourhood_types", None, census)
        }
        Command::Wsp {
            source,
            max_level,
            bound,
        } => {
            positive("max-level", max_level)?;
            let mut ctx = load("wsp", &source)?;
            ctx.option("max_level", max_level);
            let report = wsp_min_displacement(ctx.system(), &ctx.point, max_level)?;
            let passed = match (&bound, report.min_expr()) {
                (None, _) => None,
                (Some(_), None) => Some(true),
                (Some(b), Some(min)) => {
                    ctx.option("bound", rational_string(b));
                    Some(ctx.point.abs_cmp(min, b)?.is_ge())
                }
            };
            ctx.emit("weak_separation", passed, report)
        }
        Command::Verify { check } => verify(check),
        Command::Render {
            source,
            levels,
            out,
            scale,
            decimals,
        } => {
            positive("levels", levels)?;
            let mut ctx = load("render", &source)?;
            ctx.require_construction("render")?;
            ctx.option("levels", levels);
            ctx.option("out", out.display().to_string());
            ctx.option("scale", scale);
            ctx.option("decimals", decimals);
            let states = run_construction(&ctx.template, &ctx.sequence, levels)?;
            std::fs::create_dir_all(&out).map_err(sepkit_core::Error::from)?;
            let stem = match ctx.example {
                Some(ex) => format!("example{}", ex.number()),
                None => "template".to_string(),
            };
            let mut files = Vec::with_capacity(levels);
            for n in 1..=levels {
                let diagram = diagram_for_level(ctx.system(), &ctx.point, &states, n)?
                    .with_scale(scale)
                    .with_decimals(decimals);
                let path = out.join(format!("{stem}-level{n}.svg"));
                emit_svg(&diagram, &path)?;
                files.push(relative(&path, &out));
            }
            ctx.emit("render", None, json!({ "files": files }))
        }
        Command::Dimension { source, digits } => {
            let mut ctx = load("dimension", &source)?;
            ctx.option("digits", digits);
            ctx.caveats
                .push("equals the Hausdorff dimension only when the open set condition holds".into());
            let report = osc_dimension(ctx.system(), digits);
            ctx.emit("dimension", None, report)
        }
    }
}

fn relative(path: &Path, base: &Path) -> String {
    path.strip_prefix(base).unwrap_or(path).display().to_string()
}

fn verify(check: Check) -> CliResult<Outcome> {
    match check {
        Check::Osc {
            source,
            seed,
            truncation,
        } => {
            let mut ctx = load("verify osc", &source)?;
            let seed = ctx.seed(seed)?;
            ctx.option("seed", &seed);
            ctx.option("truncation", truncation);
            let approx = OpenSetApprox::new(seed, truncation)?;
            let report = verify_osc_open_set(ctx.system(), &ctx.point, &approx)?;
            let passed = report.passed;
            ctx.emit("open_set_condition", Some(passed), report)
        }
        Check::Overlaps { source, max_level } => {
            positive("max-level", max_level)?;
            let mut ctx = load("verify overlaps", &source)?;
            ctx.option("max_level", max_level);
            let report = exact_overlap_scan(ctx.system(), max_level)?;
            ctx.emit("exact_overlaps", None, report)
        }
        Check::Distinctness { source, levels } => {
            positive("levels", levels)?;
            let mut ctx = load("verify distinctness", &source)?;
            ctx.require_construction("verify distinctness")?;
            ctx.option("levels", levels);
            let states = run_construction(&ctx.template, &ctx.sequence, levels)?;
            let report = distinctness_check(ctx.system(), &states, &ctx.point)?;
            let passed = report.distinct;
            ctx.emit("gap_distinctness", Some(passed), report)
        }
        Check::Endpoints { source, max_level, c } => {
            positive("max-level", max_level)?;
            let mut ctx = load("verify endpoints", &source)?;
            ctx.option("max_level", max_level);
            ctx.option("c", rational_string(&c));
            let report = endpoint_separation(ctx.system(), &ctx.point, max_level, &c)?;
            let passed = report.passed;
            ctx.emit("endpoint_separation", Some(passed), report)
        }
    }
}
