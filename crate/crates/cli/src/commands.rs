use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use mapcone::gallery::GALLERY_NAMES;
use mapcone::json::{ChoiJson, SchmidtVectorJson};
use mapcone::walkthrough::{choi_map_walkthrough, uniform_product, Side, IMAGE_MIN_NORM, OVERLAP_TOL};
use mapcone::{
    check_witness_preconditions, cone_norm, cp_split, extend_witness, is_completely_positive, is_decomposable,
    is_k_positive, kpos_bruteforce_oracle, verify_split, ConeId, GalleryMap, LinMap, MapError, SchmidtVector, Settings,
    Tolerances, VerdictKind, C64,
};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::args::{Cli, Command, GalleryAction, Input, Opts};
use crate::report::{
    AnalysisReport, MapIdentity, Operator, RunSettings, SplitSummary, VerdictEntry, SCHEMA, TOOL, VERSION,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNDEFINED: i32 = 3;

pub const NEGATIVE_OF_CP_MESSAGE: &str = "\u{2212}\u{3c6} is completely positive; split undefined";

/// A command that could not produce a report.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<MapError> for Failure {
    fn from(e: MapError) -> Self {
        match e {
            MapError::NegativeOfCpMap => Self {
                code: EXIT_UNDEFINED,
                message: NEGATIVE_OF_CP_MESSAGE.to_string(),
            },
            other => Self {
                code: EXIT_INPUT,
                message: other.to_string(),
            },
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

/// What a successful command prints, and its exit code.
#[derive(Debug)]
pub struct Output {
    pub stdout: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: EXIT_OK }
    }
}

pub fn run(cli: Cli) -> Result<Output, Failure> {
    match cli.command {
        Command::Analyze { input, opts, timings } => analyze(&input, &opts, timings),
        Command::Split { input, opts } => split(&input, &opts),
        Command::Kpos { input, opts, k, oracle } => kpos(&input, &opts, k, oracle),
        Command::Witness { input, opts, vector } => witness(&input, &opts, vector.as_deref()),
        Command::Decomposable { input, opts } => decomposable(&input, &opts),
        Command::Norm { input, opts, cone, k } => norm(&input, &opts, &cone, k),
        Command::PaperExample { json } => paper_example(json),
        Command::Gallery {
            action: GalleryAction::List { json },
        } => Ok(Output::ok(gallery_list(json))),
    }
}

pub fn load(input: &Input) -> Result<(LinMap, MapIdentity), Failure> {
    if let Some(path) = &input.choi {
        let bytes = std::fs::read(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
        let text =
            String::from_utf8(bytes.clone()).map_err(|_| input_error(format!("{} is not UTF-8", path.display())))?;
        let map = mapcone::json::parse_choi(&text)?;
        let identity = MapIdentity::File {
            path: path.display().to_string(),
            sha256: format!("{:x}", Sha256::digest(&bytes)),
        };
        return Ok((map, identity));
    }
    let name = input
        .gallery
        .as_deref()
        .ok_or_else(|| input_error("one of --gallery or --choi is required"))?;
    let map = GalleryMap::parse(name, input.dim, input.param)?.build()?;
    let identity = MapIdentity::Gallery {
        name: name.to_string(),
        dim: input.dim,
        param: input.param,
    };
    Ok((map, identity))
}

fn run_settings(opts: &Opts) -> RunSettings {
    RunSettings {
        seed: opts.seed,
        restarts: opts.restarts,
        max_iter: opts.max_iter,
        tol: opts.tol,
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

struct Stopwatch {
    enabled: bool,
    laps: BTreeMap<String, f64>,
}

impl Stopwatch {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            self.laps.insert(stage.to_string(), start.elapsed().as_secs_f64() * 1e3);
        }
        out
    }
}

pub fn build_report(
    map: &LinMap,
    identity: MapIdentity,
    opts: &Opts,
    timings: bool,
) -> Result<AnalysisReport, Failure> {
    let settings = opts.settings();
    let tol = &settings.tol;
    let mut clock = Stopwatch {
        enabled: timings,
        laps: BTreeMap::new(),
    };
    let mut verdicts = Vec::new();
    let mut skipped = Vec::new();
    let self_adjoint = map.is_self_adjoint(tol);

    let split = if !self_adjoint {
        let err = map.choi().hermitian_error();
        verdicts.push(VerdictEntry {
            cone: ConeId::CompletelyPositive.to_string(),
            k: None,
            kind: VerdictKind::CertifiedNo.into(),
            value: err,
            detail: format!(
                "Choi matrix is not Hermitian (error {err:.3e}); completely positive maps are self-adjoint"
            ),
            witness: None,
        });
        skipped.extend(
            ["positive", "k-positive", "decomposable"]
                .iter()
                .map(|c| format!("{c}: map is not self-adjoint")),
        );
        SplitSummary {
            exists: false,
            c: None,
            residual: None,
            note: Some("map is not self-adjoint".to_string()),
        }
    } else {
        let split = clock.time("split", || cp_split(map, tol));
        let (summary, operator) = match &split {
            Ok(s) => (
                SplitSummary {
                    exists: true,
                    c: Some(s.c),
                    residual: Some(verify_split(s)),
                    note: None,
                },
                Operator::ChoiCp,
            ),
            Err(MapError::NegativeOfCpMap) => (
                SplitSummary {
                    exists: false,
                    c: None,
                    residual: None,
                    note: Some(NEGATIVE_OF_CP_MESSAGE.to_string()),
                },
                Operator::Choi,
            ),
            Err(e) => return Err(e.clone().into()),
        };
        for k in 1..=map.min_dim() {
            let v = clock.time(&format!("{k}-positive"), || is_k_positive(map, k, &settings.opt, tol))?;
            let cone = if k == 1 { ConeId::Positive } else { ConeId::KPositive(k) };
            verdicts.push(VerdictEntry::new(cone.to_string(), Some(k), &v, operator));
        }
        let v = clock.time("cp", || is_completely_positive(map, tol))?;
        verdicts.push(VerdictEntry::new(
            ConeId::CompletelyPositive.to_string(),
            None,
            &v,
            Operator::Choi,
        ));
        if split.is_ok() {
            let v = clock.time("decomposable", || is_decomposable(map, &settings))?;
            verdicts.push(VerdictEntry::new(
                ConeId::Decomposable.to_string(),
                None,
                &v,
                Operator::ChoiCp,
            ));
        } else {
            skipped.push(format!("decomposable: {NEGATIVE_OF_CP_MESSAGE}"));
        }
        summary
    };

    Ok(AnalysisReport {
        schema: SCHEMA,
        tool: TOOL.to_string(),
        version: VERSION.to_string(),
        map: identity,
        dim_k: map.dim_k(),
        dim_h: map.dim_h(),
        choi: ChoiJson::from_map(map),
        self_adjoint,
        split,
        settings: run_settings(opts),
        verdicts,
        skipped,
        timings_ms: timings.then_some(clock.laps),
    })
}

fn analyze(input: &Input, opts: &Opts, timings: bool) -> Result<Output, Failure> {
    let (map, identity) = load(input)?;
    let report = build_report(&map, identity, opts, timings)?;
    if opts.json {
        return Ok(Output::ok(to_json(&report)));
    }
    let mut s = String::new();
    writeln!(s, "map           {}", report.map.label()).unwrap();
    writeln!(s, "dimensions    {} x {}", report.dim_k, report.dim_h).unwrap();
    writeln!(s, "self-adjoint  {}", if report.self_adjoint { "yes" } else { "no" }).unwrap();
    match (&report.split.c, &report.split.note) {
        (Some(c), _) => writeln!(
            s,
            "split         c = {c:.12}, residual {:.3e}",
            report.split.residual.unwrap_or(0.0)
        )
        .unwrap(),
        (None, Some(note)) => writeln!(s, "split         undefined: {note}").unwrap(),
        (None, None) => writeln!(s, "split         undefined").unwrap(),
    }
    writeln!(s, "seed          {}", report.settings.seed).unwrap();
    writeln!(s).unwrap();
    writeln!(s, "{:<14} {:<17} {:>16}  witness", "cone", "member", "value").unwrap();
    for v in &report.verdicts {
        let w = match &v.witness {
            Some(crate::report::WitnessJson::Vector { .. }) => "vector",
            Some(crate::report::WitnessJson::State { .. }) => "PPT state",
            None => "-",
        };
        writeln!(s, "{:<14} {:<17} {:>16.12}  {w}", v.cone, v.kind.label(), v.value).unwrap();
    }
    for note in &report.skipped {
        writeln!(s, "skipped: {note}").unwrap();
    }
    if let Some(t) = &report.timings_ms {
        writeln!(s).unwrap();
        for (stage, ms) in t {
            writeln!(s, "{stage:<14} {ms:>10.2} ms").unwrap();
        }
    }
    Ok(Output::ok(s))
}

fn split(input: &Input, opts: &Opts) -> Result<Output, Failure> {
    let (map, identity) = load(input)?;
    let s = cp_split(&map, &opts.settings().tol)?;
    let residual = verify_split(&s);
    if opts.json {
        let out = json!({
            "schema": SCHEMA,
            "map": identity,
            "c": s.c,
            "phi_cp": ChoiJson::from_map(&s.phi_cp),
            "residual": residual,
        });
        return Ok(Output::ok(to_json(&out)));
    }
    Ok(Output::ok(format!(
        "c = {}\nresidual = {residual:.3e}\nphi_cp = {}\n",
        s.c,
        mapcone::json::choi_to_string(&s.phi_cp)
    )))
}

fn kpos(input: &Input, opts: &Opts, k: Option<usize>, oracle: Option<usize>) -> Result<Output, Failure> {
    let (map, identity) = load(input)?;
    let settings = opts.settings();
    let ks: Vec<usize> = match k {
        Some(0) => return Err(input_error("--k must be at least 1")),
        Some(k) => vec![k],
        None => (1..=map.min_dim()).collect(),
    };
    let operator = match cp_split(&map, &settings.tol) {
        Ok(_) => Operator::ChoiCp,
        Err(MapError::NegativeOfCpMap) => Operator::Choi,
        Err(e) => return Err(e.into()),
    };
    let mut verdicts = Vec::new();
    let mut oracles = Vec::new();
    for &k in &ks {
        let v = is_k_positive(&map, k, &settings.opt, &settings.tol)?;
        verdicts.push(VerdictEntry::new(
            ConeId::KPositive(k).to_string(),
            Some(k),
            &v,
            operator,
        ));
        if let Some(samples) = oracle {
            let r = kpos_bruteforce_oracle(&map, k, samples, opts.seed, &settings.tol)?;
            if r.found_violation() && v.kind == VerdictKind::CertifiedYes {
                eprintln!("warning: oracle contradicts the certified verdict at k = {k}");
            }
            oracles.push(json!({
                "k": k,
                "samples": r.samples,
                "violations": r.violations,
                "min_eigenvalue": r.min_eigenvalue,
            }));
        }
    }
    if opts.json {
        let mut out = json!({
            "schema": SCHEMA,
            "map": identity,
            "settings": run_settings(opts),
            "verdicts": verdicts,
        });
        if oracle.is_some() {
            out["oracle"] = serde_json::Value::Array(oracles);
        }
        return Ok(Output::ok(to_json(&out)));
    }
    let mut s = String::new();
    for (i, v) in verdicts.iter().enumerate() {
        writeln!(s, "{:<12} {:<17} {:.12}", v.cone, v.kind.label(), v.value).unwrap();
        writeln!(s, "  {}", v.detail).unwrap();
        if let Some(o) = oracles.get(i) {
            writeln!(
                s,
                "  oracle: {} of {} samples violate (smallest eigenvalue {:.3e})",
                o["violations"],
                o["samples"],
                o["min_eigenvalue"].as_f64().unwrap_or(f64::NAN)
            )
            .unwrap();
        }
    }
    Ok(Output::ok(s))
}

fn witness(input: &Input, opts: &Opts, vector: Option<&std::path::Path>) -> Result<Output, Failure> {
    let (map, identity) = load(input)?;
    let tol = opts.settings().tol;
    let y = match vector {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
            let raw: SchmidtVectorJson =
                serde_json::from_str(&text).map_err(|e| input_error(format!("malformed vector JSON: {e}")))?;
            raw.to_vector()?
        }
        None => {
            let x = vec![C64::new(1.0 / (map.dim_k() as f64).sqrt(), 0.0); map.dim_k()];
            let z = vec![C64::new(1.0 / (map.dim_h() as f64).sqrt(), 0.0); map.dim_h()];
            SchmidtVector::product(&x, &z)
        }
    };
    let check = check_witness_preconditions(&map, &y, &tol)?;
    let split = cp_split(&map, &tol)?;
    let extended = if check.ok {
        Some(extend_witness(split.phi_cp.choi(), &y, &tol)?)
    } else {
        None
    };
    let objective = extended.as_ref().map(|z| z.objective(split.phi_cp.choi()));
    let rank = extended.as_ref().map(|z| z.schmidt_rank(&tol));
    if opts.json {
        let out = json!({
            "schema": SCHEMA,
            "map": identity,
            "y": SchmidtVectorJson::from_vector(&y),
            "preconditions": {
                "ok": check.ok,
                "reasons": check.reasons,
                "overlap": check.overlap,
                "residual": check.residual,
            },
            "c": split.c,
            "witness": extended.as_ref().map(SchmidtVectorJson::from_vector),
            "objective": objective,
            "schmidt_rank": rank,
        });
        return Ok(Output::ok(to_json(&out)));
    }
    let mut s = String::new();
    writeln!(s, "<y, C y>        {:.3e}", check.overlap).unwrap();
    writeln!(s, "outside X (x) Y {:.3e}", check.residual).unwrap();
    if check.ok {
        writeln!(s, "<z, C_cp z>     {:.12}", objective.unwrap_or(f64::NAN)).unwrap();
        writeln!(s, "Schmidt rank    {}", rank.unwrap_or(0)).unwrap();
        writeln!(
            s,
            "the map is not {}-positive",
            extended.as_ref().map_or(0, |z| z.schmidt_rank(&tol))
        )
        .unwrap();
    } else {
        for r in &check.reasons {
            writeln!(s, "inapplicable: {r}").unwrap();
        }
    }
    Ok(Output::ok(s))
}

fn decomposable(input: &Input, opts: &Opts) -> Result<Output, Failure> {
    let (map, identity) = load(input)?;
    let v = is_decomposable(&map, &opts.settings())?;
    let entry = VerdictEntry::new(ConeId::Decomposable.to_string(), None, &v, Operator::ChoiCp);
    if opts.json {
        let out = json!({
            "schema": SCHEMA,
            "map": identity,
            "verdict": entry,
        });
        return Ok(Output::ok(to_json(&out)));
    }
    Ok(Output::ok(format!(
        "decomposable {:<17} {:.12}\n  {}\n",
        entry.kind.label(),
        entry.value,
        entry.detail
    )))
}

fn norm(input: &Input, opts: &Opts, cone: &str, k: Option<usize>) -> Result<Output, Failure> {
    let (map, identity) = load(input)?;
    let mut cone: ConeId = cone.parse()?;
    if let Some(k) = k {
        if k == 0 {
            return Err(input_error("--k must be at least 1"));
        }
        cone = ConeId::KPositive(k);
    }
    let settings = opts.settings();
    let value = cone_norm(&map, cone, &settings)?;
    let method = match cone {
        ConeId::CompletelyPositive => "spectral radius of the Choi matrix (exact)".to_string(),
        ConeId::Positive => "power iteration over product vectors (lower bound)".to_string(),
        ConeId::KPositive(k) => format!("power iteration over Schmidt rank <= {k} (lower bound)"),
        ConeId::Decomposable => "projected gradient over PPT states (lower bound)".to_string(),
    };
    if opts.json {
        let out = json!({
            "schema": SCHEMA,
            "map": identity,
            "cone": cone.to_string(),
            "value": value,
            "method": method,
            "settings": run_settings(opts),
        });
        return Ok(Output::ok(to_json(&out)));
    }
    Ok(Output::ok(format!("{value}\n  cone {cone}, {method}\n")))
}

#[derive(Serialize)]
struct SideJson {
    map: &'static str,
    overlap: f64,
    image_norm: f64,
    c: f64,
    preconditions_ok: bool,
    witness: Option<SchmidtVectorJson>,
    witness_value: Option<f64>,
    schmidt_rank: usize,
    passed: bool,
}

fn side_json(s: &Side, tol: &Tolerances) -> SideJson {
    SideJson {
        map: s.label,
        overlap: s.overlap,
        image_norm: s.image_norm,
        c: s.c,
        preconditions_ok: s.preconditions.ok,
        witness: s.witness.as_ref().map(SchmidtVectorJson::from_vector),
        witness_value: s.witness.as_ref().map(|_| s.witness_value),
        schmidt_rank: s.witness_rank,
        passed: s.passes(tol),
    }
}

fn paper_example(as_json: bool) -> Result<Output, Failure> {
    let tol = Settings::default().tol;
    let w = choi_map_walkthrough(&tol)?;
    let passed = w.passes(&tol);
    let conclusion = "phi is neither 2-positive nor 2-copositive. Since the Choi map generates an extremal ray \
                      of the positive cone (an external result, not checked here), it is atomic: not a sum of a \
                      2-positive and a 2-copositive map.";
    let code = if passed { EXIT_OK } else { EXIT_CHECK_FAILED };
    if as_json {
        let out = json!({
            "schema": SCHEMA,
            "y": SchmidtVectorJson::from_vector(&uniform_product(3)),
            "sides": [side_json(&w.phi, &tol), side_json(&w.transposed, &tol)],
            "passed": passed,
            "conclusion": if passed { conclusion } else { "checks failed" },
        });
        return Ok(Output {
            stdout: to_json(&out),
            code,
        });
    }
    let mark = |ok: bool| if ok { "ok  " } else { "FAIL" };
    let mut s = String::new();
    writeln!(s, "Choi map phi on B(C^3), y = x (x) x with x = (1, 1, 1)/sqrt(3)").unwrap();
    for side in [&w.phi, &w.transposed] {
        let l = side.label;
        writeln!(s).unwrap();
        writeln!(s, "[{l}]  c = {:.12}", side.c).unwrap();
        writeln!(
            s,
            "{} |<y, C y>| = {:.3e} <= {OVERLAP_TOL:.0e}",
            mark(side.overlap.abs() <= OVERLAP_TOL),
            side.overlap.abs()
        )
        .unwrap();
        writeln!(
            s,
            "{} ||C y|| = {:.12} > {IMAGE_MIN_NORM:.0e}",
            mark(side.image_norm > IMAGE_MIN_NORM),
            side.image_norm
        )
        .unwrap();
        writeln!(s, "{} witness preconditions", mark(side.preconditions.ok)).unwrap();
        writeln!(
            s,
            "{} extended witness: <z, C_cp z> = {:.15} > 1, Schmidt rank {}",
            mark(side.witness_value > 1.0 + tol.cert_margin && side.witness_rank <= 2),
            side.witness_value,
            side.witness_rank
        )
        .unwrap();
    }
    writeln!(s).unwrap();
    if passed {
        writeln!(s, "{conclusion}").unwrap();
    } else {
        writeln!(s, "some checks failed").unwrap();
    }
    Ok(Output { stdout: s, code })
}

fn gallery_list(as_json: bool) -> String {
    let about = |name: &str| match name {
        "identity" => "x -> x on B(C^n); --dim n",
        "transpose" => "x -> x^t on B(C^n); --dim n",
        "trace" => "x -> Tr(x) 1 on B(C^n); --dim n",
        "choi3" => "the Choi map of B(C^3); positive but not decomposable",
        "reduction" => "x -> Tr(x) 1 - lambda x; --dim n --param lambda",
        "adv" => "x -> V x V^* with V the projector onto the first r basis vectors; --dim n --param r",
        _ => "",
    };
    if as_json {
        let list: Vec<_> = GALLERY_NAMES
            .iter()
            .map(|n| json!({"name": n, "description": about(n)}))
            .collect();
        return to_json(&json!({"schema": SCHEMA, "gallery": list}));
    }
    GALLERY_NAMES
        .iter()
        .map(|n| format!("{n:<10} {}\n", about(n)))
        .collect()
}
