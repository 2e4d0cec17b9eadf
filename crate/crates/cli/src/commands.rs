//! One runner per subcommand. Each builds the system from the resolved
//! config, runs the requested checks, validates the report against its
//! shipped schema, and says whether every check passed.

use serde_json::{json, Value};

use zdtl_core::comparison::{certify_comparison, default_pipeline_sets, ocap_estimate, Ball, OpenSet};
use zdtl_core::dynsys::{sample_points, RotationAction, TorusPoint};
use zdtl_core::lattice::{find_n0, verify_lemma, LemmaParams};
use zdtl_core::marker::{build_marker, default_marker, verify_marker, MarkerFunction, MarkerGeometry};
use zdtl_core::report::{to_value, validate_schema};
use zdtl_core::svg::{render_tiling, RenderOptions};
use zdtl_core::tiling::{verify_tiling_properties, TilingConfig};
use zdtl_core::towers::{
    build_two_towers, verify_tower_coverage, verify_tower_disjoint, TowerSpec, TwoTowersOptions,
};
use zdtl_core::Error;

use crate::config::{Format, Resolved};
use crate::CommandKind;

pub enum Output {
    Json(Value),
    Svg(String),
}

pub struct Outcome {
    pub output: Output,
    pub pass: bool,
}

/// Monte Carlo budget for the lattice lemma's tube-volume cross-check;
/// the lemma's fraction bound itself uses exhaustive counting.
const LEMMA_MC_SAMPLES: usize = 50_000;

fn err_str(e: Error) -> String {
    e.to_string()
}

fn build_action(cfg: &Resolved) -> Result<RotationAction, String> {
    match &cfg.alpha {
        Some(entries) => {
            let rows: Vec<Vec<f64>> =
                entries.chunks(cfg.m).map(|chunk| chunk.to_vec()).collect();
            RotationAction::new(rows, 50).map_err(err_str)
        }
        None => match (cfg.d, cfg.m) {
            (1, 1) => Ok(RotationAction::default_1d()),
            (2, 2) => Ok(RotationAction::default_2d()),
            (d, m) => Err(format!("no default increments for d={d}, m={m}; pass --alpha")),
        },
    }
}

fn build_marker_fn(cfg: &Resolved, action: &RotationAction) -> Result<MarkerFunction, String> {
    if cfg.center.is_none() && cfg.r_inner.is_none() && cfg.r_outer.is_none() {
        return default_marker(action).map_err(err_str);
    }
    let (def_inner, def_outer) = match cfg.m {
        1 => (0.05, 0.1),
        _ => (0.1, 0.2),
    };
    let center = TorusPoint::new(cfg.center.clone().unwrap_or_else(|| vec![0.0; cfg.m]))
        .map_err(err_str)?;
    let geometry = MarkerGeometry::new(
        center,
        cfg.r_inner.unwrap_or(def_inner),
        cfg.r_outer.unwrap_or(def_outer),
    )
    .map_err(err_str)?;
    build_marker(action, geometry).map_err(err_str)
}

fn build_config(cfg: &Resolved, marker: &MarkerFunction) -> Result<TilingConfig, String> {
    let base = TilingConfig::for_marker(marker, cfg.d);
    TilingConfig::new(
        cfg.depth.unwrap_or(base.depth),
        cfg.scale.unwrap_or(base.scale),
        base.truncation,
    )
    .map_err(err_str)
}

fn ball_set(center: Vec<f64>, radius: f64) -> Result<OpenSet, String> {
    let center = TorusPoint::new(center).map_err(err_str)?;
    OpenSet::new(vec![Ball { center, radius }]).map_err(err_str)
}

/// E and F for `certify`/`ocap`: the pipeline defaults, with any of the
/// four set parameters individually overridable.
fn resolve_sets(cfg: &Resolved) -> Result<(OpenSet, OpenSet, f64), String> {
    let (e_def, f_def, eps_def) = default_pipeline_sets(cfg.m).map_err(err_str)?;
    let e_ball = &e_def.balls()[0];
    let f_ball = &f_def.balls()[0];
    let e = ball_set(
        cfg.e_center.clone().unwrap_or_else(|| e_ball.center.coords().to_vec()),
        cfg.e_radius.unwrap_or(e_ball.radius),
    )?;
    let f = ball_set(
        cfg.f_center.clone().unwrap_or_else(|| f_ball.center.coords().to_vec()),
        cfg.f_radius.unwrap_or(f_ball.radius),
    )?;
    Ok((e, f, cfg.epsilon.unwrap_or(eps_def)))
}

fn core_inputs(cfg: &Resolved) -> Value {
    json!({
        "d": cfg.d,
        "m": cfg.m,
        "seed": cfg.seed,
        "samples": cfg.samples,
    })
}

pub fn execute(command: CommandKind, cfg: &Resolved) -> Result<Outcome, String> {
    match command {
        CommandKind::Marker => run_marker(cfg),
        CommandKind::Tiling => run_tiling(cfg),
        CommandKind::Tower => run_tower(cfg),
        CommandKind::TwoTowers => run_two_towers(cfg),
        CommandKind::Lattice => run_lattice(cfg),
        CommandKind::Ocap => run_ocap(cfg),
        CommandKind::Certify => run_certify(cfg),
    }
}

fn finish(name: &str, schema: &str, payload: Value, pass: bool) -> Result<Outcome, String> {
    let schema: Value = serde_json::from_str(schema)
        .map_err(|e| format!("internal: {name} schema is not valid JSON: {e}"))?;
    validate_schema(&payload, &schema)
        .map_err(|e| format!("internal: {name} report failed its schema: {e}"))?;
    Ok(Outcome { output: Output::Json(payload), pass })
}

fn run_marker(cfg: &Resolved) -> Result<Outcome, String> {
    let action = build_action(cfg)?;
    let marker = build_marker_fn(cfg, &action)?;
    let verification = verify_marker(&action, &marker, cfg.seed, cfg.samples).map_err(err_str)?;
    let pass = verification.pass;
    let payload = json!({
        "command": "marker",
        "inputs": core_inputs(cfg),
        "geometry": to_value(&marker.geometry).map_err(err_str)?,
        "separation": marker.separation,
        "covering": marker.covering,
        "verification": to_value(&verification).map_err(err_str)?,
        "pass": pass,
    });
    finish("marker", include_str!("../../../schemas/marker.schema.json"), payload, pass)
}

fn run_tiling(cfg: &Resolved) -> Result<Outcome, String> {
    let action = build_action(cfg)?;
    let marker = build_marker_fn(cfg, &action)?;
    let config = build_config(cfg, &marker)?;
    match cfg.format {
        Format::Svg => {
            let x = sample_points(cfg.seed, 1, cfg.m).pop().expect("one sample");
            let svg =
                render_tiling(&action, &marker, &config, &x, config.depth, &RenderOptions::default())
                    .map_err(err_str)?;
            Ok(Outcome { output: Output::Svg(svg), pass: true })
        }
        Format::Json => {
            let report =
                verify_tiling_properties(&action, &marker, &config, cfg.seed, cfg.samples)
                    .map_err(err_str)?;
            let pass = report.pass;
            let payload = json!({
                "command": "tiling",
                "inputs": core_inputs(cfg),
                "config": to_value(&config).map_err(err_str)?,
                "report": to_value(&report).map_err(err_str)?,
                "pass": pass,
            });
            finish("tiling", include_str!("../../../schemas/tiling.schema.json"), payload, pass)
        }
    }
}

fn run_tower(cfg: &Resolved) -> Result<Outcome, String> {
    let action = build_action(cfg)?;
    let marker = build_marker_fn(cfg, &action)?;
    let config = build_config(cfg, &marker)?;
    let spec = TowerSpec::new(0, cfg.n, cfg.d).map_err(err_str)?;
    let disjoint =
        verify_tower_disjoint(&action, &marker, &config, &spec, cfg.seed, cfg.samples)
            .map_err(err_str)?;
    let coverage =
        verify_tower_coverage(&action, &marker, &config, &spec, cfg.seed.wrapping_add(1), cfg.samples)
            .map_err(err_str)?;
    let pass = disjoint.pass && coverage.pass;
    let mut inputs = core_inputs(cfg);
    inputs["N"] = json!(cfg.n);
    let payload = json!({
        "command": "tower",
        "inputs": inputs,
        "spec": to_value(&spec).map_err(err_str)?,
        "disjoint": to_value(&disjoint).map_err(err_str)?,
        "coverage": to_value(&coverage).map_err(err_str)?,
        "pass": pass,
    });
    finish("tower", include_str!("../../../schemas/tower.schema.json"), payload, pass)
}

fn run_two_towers(cfg: &Resolved) -> Result<Outcome, String> {
    let action = build_action(cfg)?;
    let marker = build_marker_fn(cfg, &action)?;
    let config = build_config(cfg, &marker)?;
    let epsilon = cfg.epsilon.unwrap_or(0.2);
    let options = TwoTowersOptions { strict: cfg.strict, merge_groups_debug: cfg.merge_groups };
    let mut inputs = core_inputs(cfg);
    inputs["N"] = json!(cfg.n);
    inputs["epsilon"] = json!(epsilon);
    let schema = include_str!("../../../schemas/two_towers.schema.json");
    match build_two_towers(&action, &marker, &config, cfg.n, epsilon, options, cfg.seed, cfg.samples)
    {
        Ok(result) => {
            let pass = result.pass;
            let payload = json!({
                "command": "two-towers",
                "inputs": inputs,
                "result": to_value(&result).map_err(err_str)?,
                "pass": pass,
            });
            finish("two-towers", schema, payload, pass)
        }
        // Strict mode refuses to sample; the requirement is the report.
        Err(Error::IncreaseMarkerScale { required, guaranteed }) => {
            let payload = json!({
                "command": "two-towers",
                "inputs": inputs,
                "error": {
                    "kind": "increase_marker_scale",
                    "required": required,
                    "guaranteed": guaranteed,
                },
                "pass": false,
            });
            finish("two-towers", schema, payload, false)
        }
        Err(other) => Err(err_str(other)),
    }
}

fn run_lattice(cfg: &Resolved) -> Result<Outcome, String> {
    let epsilon = cfg.epsilon.unwrap_or(0.5);
    let n0 = find_n0(epsilon, cfg.r, cfg.d).map_err(err_str)?;
    let lemma = verify_lemma(&LemmaParams {
        d: cfg.d,
        epsilon,
        r: cfg.r,
        bodies: cfg.samples,
        seed: cfg.seed,
        mc_samples: LEMMA_MC_SAMPLES,
    })
    .map_err(err_str)?;
    let closed_form = if cfg.d == 1 {
        json!((8.0 * (cfg.r + 1.0) / epsilon).floor() as u64 + 1)
    } else {
        Value::Null
    };
    let pass = lemma.pass;
    let mut inputs = core_inputs(cfg);
    inputs["epsilon"] = json!(epsilon);
    inputs["r"] = json!(cfg.r);
    let payload = json!({
        "command": "lattice",
        "inputs": inputs,
        "N0": n0,
        "closed_form": closed_form,
        "lemma": to_value(&lemma).map_err(err_str)?,
        "pass": pass,
    });
    finish("lattice", include_str!("../../../schemas/lattice.schema.json"), payload, pass)
}

fn run_ocap(cfg: &Resolved) -> Result<Outcome, String> {
    let action = build_action(cfg)?;
    let (_, f, _) = resolve_sets(cfg)?;
    let estimate = ocap_estimate(&action, &f, cfg.n, cfg.seed, cfg.samples).map_err(err_str)?;
    let mut inputs = core_inputs(cfg);
    inputs["N"] = json!(cfg.n);
    let payload = json!({
        "command": "ocap",
        "inputs": inputs,
        "set": to_value(&f).map_err(err_str)?,
        "estimate": estimate,
        "pass": true,
    });
    finish("ocap", include_str!("../../../schemas/ocap.schema.json"), payload, true)
}

fn run_certify(cfg: &Resolved) -> Result<Outcome, String> {
    let action = build_action(cfg)?;
    let marker = build_marker_fn(cfg, &action)?;
    let config = build_config(cfg, &marker)?;
    let (e, f, epsilon) = resolve_sets(cfg)?;
    let certificate =
        certify_comparison(&action, &marker, &config, e, f, epsilon, cfg.seed, cfg.samples)
            .map_err(err_str)?;
    let pass = certificate.overall;
    let mut inputs = core_inputs(cfg);
    inputs["epsilon"] = json!(epsilon);
    let payload = json!({
        "command": "certify",
        "inputs": inputs,
        "certificate": to_value(&certificate).map_err(err_str)?,
        "pass": pass,
    });
    finish("certify", include_str!("../../../schemas/certify.schema.json"), payload, pass)
}
