use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use pseudotile::corpus::{generate, CorpusBase, CorpusSpec};
use pseudotile::embed::{embed_traced, Backtrack, EmbedError, EmbedderConfig};
use pseudotile::graph::Graph;
use pseudotile::henneberg::henneberg_decompose;
use pseudotile::lift::{
    color_edges, horn_count, is_hyperbolic_certificate, lift, reciprocal_surface, survey_report,
    EdgeColoring,
};
use pseudotile::render::{render_svg, Highlight, Projection, RenderSpec};
use pseudotile::report::verify;
use pseudotile::sparsity::{classify_sparsity, SparsityClass};
use pseudotile::stress::self_stress_basis;
use pseudotile::tiling::{Tiling, TilingJson};

const MALFORMED: u8 = 2;
const CLASS_MISMATCH: u8 = 3;
const EMBED_FAILED: u8 = 4;
const VERIFY_FAILED: u8 = 5;
const STRESS_DIMENSION: u8 = 6;

#[derive(Parser)]
#[command(
    name = "pseudotile",
    version,
    about = "Laman graphs, spherical pseudo-tilings and their lifts"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify a graph and decompose it into Henneberg steps.
    Analyze { graph: PathBuf },
    /// Embed a Laman-plus-one graph as a nice spherical pseudo-tiling.
    Embed {
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = EmbedderConfig::default().max_samples_per_step)]
        max_samples: usize,
        #[arg(long, default_value_t = EmbedderConfig::default().perturbation_radius)]
        perturbation: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a tiling and report its counts, niceness, stresses and lift.
    Verify {
        tiling: PathBuf,
        #[arg(long)]
        require_nice: bool,
    },
    /// Lift the self-stress of a tiling to a virtual polytope.
    Lift {
        tiling: PathBuf,
        /// Write the reciprocal surface as OBJ.
        #[arg(long)]
        obj: Option<PathBuf>,
        /// Basis element to use when the stress space is not a line.
        #[arg(long)]
        stress_index: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a tiling as SVG.
    Render {
        tiling: PathBuf,
        #[arg(long, value_enum, default_value_t = ProjectionArg::Both)]
        projection: ProjectionArg,
        #[arg(long, default_value_t = 32)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = HighlightArg::Digons)]
        highlight: HighlightArg,
        /// Output of `lift` (or a bare edge colouring) for red/blue edges.
        #[arg(long)]
        colors: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate random graphs by forward Henneberg steps.
    Corpus {
        #[arg(long)]
        count: usize,
        #[arg(long)]
        vertices: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = BaseArg::K4)]
        base: BaseArg,
        /// Allow non-planar graphs.
        #[arg(long)]
        non_planar: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate stress signs against corner patterns over many tilings.
    Survey {
        /// Tiling files or directories of them.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProjectionArg {
    North,
    South,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum HighlightArg {
    Digons,
    Colors,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseArg {
    Edge,
    K4,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl ToString) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(MALFORMED, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| fail(1, format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    let g: Graph = serde_json::from_str(&read(path)?)
        .map_err(|e| fail(MALFORMED, format!("{}: {e}", path.display())))?;
    if g.vertex_count() == 0 {
        return Err(fail(MALFORMED, format!("{}: empty graph", path.display())));
    }
    Ok(g)
}

fn load_tiling(path: &Path) -> Result<Tiling, Failure> {
    let j: TilingJson = serde_json::from_str(&read(path)?)
        .map_err(|e| fail(MALFORMED, format!("{}: {e}", path.display())))?;
    Tiling::try_from(j).map_err(|e| fail(MALFORMED, format!("{}: {e}", path.display())))
}

fn analyze(graph: &Path) -> Outcome {
    let g = load_graph(graph)?;
    let class = classify_sparsity(&g);
    let mut out = serde_json::to_value(&class).expect("serializable");
    let decomposable = matches!(class, SparsityClass::Laman) || class.is_laman_plus_one();
    let sequence = if decomposable {
        let s = henneberg_decompose(&g).map_err(|e| fail(CLASS_MISMATCH, e))?;
        serde_json::to_value(s).expect("serializable")
    } else {
        Value::Null
    };
    out["sequence"] = sequence;
    emit(None, &pretty(&out))
}

#[derive(Serialize)]
struct EmbedOutput {
    #[serde(flatten)]
    tiling: TilingJson,
    meta: EmbedMeta,
}

#[derive(Serialize)]
struct EmbedMeta {
    seed: u64,
    max_samples_per_step: usize,
    perturbation_radius: f64,
    backtracks: Vec<Backtrack>,
}

fn embed(graph: &Path, cfg: EmbedderConfig, out: Option<&Path>) -> Outcome {
    let g = load_graph(graph)?;
    let e = embed_traced(&g, &cfg).map_err(|e| match e {
        EmbedError::NotLamanPlusOne(_) => fail(CLASS_MISMATCH, e),
        EmbedError::InvalidConfig(_) => fail(MALFORMED, e),
        EmbedError::EmbeddingFailed { step, .. } => {
            fail(EMBED_FAILED, format!("failing step {step}: {e}"))
        }
        _ => fail(EMBED_FAILED, e),
    })?;
    let doc = EmbedOutput {
        tiling: TilingJson::from(&e.tiling),
        meta: EmbedMeta {
            seed: cfg.rng_seed,
            max_samples_per_step: cfg.max_samples_per_step,
            perturbation_radius: cfg.perturbation_radius,
            backtracks: e.backtracks,
        },
    };
    emit(out, &pretty(&doc))
}

fn verify_cmd(path: &Path, require_nice: bool) -> Outcome {
    let t = load_tiling(path)?;
    let report = verify(&t).map_err(|e| fail(MALFORMED, e))?;
    emit(None, &pretty(&report))?;
    if require_nice && !report.nice {
        Err(fail(VERIFY_FAILED, "tiling is not nice"))
    } else if !report.residuals_zero() {
        Err(fail(VERIFY_FAILED, "counting identities do not hold"))
    } else {
        Ok(())
    }
}

fn lift_cmd(
    path: &Path,
    obj: Option<&Path>,
    stress_index: Option<usize>,
    out: Option<&Path>,
) -> Outcome {
    let t = load_tiling(path)?;
    let mut basis = self_stress_basis(&t);
    let k = match (stress_index, basis.len()) {
        (Some(i), n) if i < n => i,
        (Some(i), n) => {
            return Err(fail(
                STRESS_DIMENSION,
                format!("stress index {i} out of range for a {n}-dimensional stress space"),
            ))
        }
        (None, 1) => 0,
        (None, n) => {
            return Err(fail(
                STRESS_DIMENSION,
                format!("stress space has dimension {n}; pick one with --stress-index"),
            ))
        }
    };
    let dimension = basis.len();
    let stress = basis.swap_remove(k);
    let vp = lift(&t, &stress).map_err(|e| fail(VERIFY_FAILED, e))?;
    let tiles: Vec<Value> = (0..t.face_count())
        .map(|f| {
            let a = vp.tile_linears[f];
            json!({ "face": t.face_ids(f), "linear": [a.x, a.y, a.z] })
        })
        .collect();
    let (coloring, coloring_error) = match color_edges(&vp) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let doc = json!({
        "stress_dimension": dimension,
        "stress_index": k,
        "stress": stress,
        "tile_linears": tiles,
        "closure_residual": vp.closure_residual,
        "certificate": is_hyperbolic_certificate(&vp).map_err(|e| fail(MALFORMED, e))?,
        "horn_count": horn_count(&vp).ok(),
        "coloring": coloring,
        "coloring_error": coloring_error,
    });
    if let Some(p) = obj {
        write(p, &reciprocal_surface(&vp).to_obj())?;
    }
    emit(out, &pretty(&doc))
}

fn load_coloring(path: &Path) -> Result<EdgeColoring, Failure> {
    let v: Value = serde_json::from_str(&read(path)?)
        .map_err(|e| fail(MALFORMED, format!("{}: {e}", path.display())))?;
    let inner = v.get("coloring").cloned().unwrap_or(v);
    serde_json::from_value(inner).map_err(|e| fail(MALFORMED, format!("{}: {e}", path.display())))
}

fn render(path: &Path, spec: RenderSpec, colors: Option<&Path>, out: Option<&Path>) -> Outcome {
    let t = load_tiling(path)?;
    let coloring = colors.map(load_coloring).transpose()?;
    let svg = render_svg(&t, &spec, coloring.as_ref()).map_err(|e| fail(MALFORMED, e))?;
    emit(out, &svg)
}

fn corpus(spec: CorpusSpec, out: &Path) -> Outcome {
    fs::create_dir_all(out).map_err(|e| fail(1, format!("{}: {e}", out.display())))?;
    let graphs = generate(&spec);
    let width = spec.count.saturating_sub(1).to_string().len().max(3);
    for (i, g) in graphs.iter().enumerate() {
        write(
            &out.join(format!("graph_{i:0width$}.json")),
            &pretty(&g.graph),
        )?;
    }
    let meta = json!({
        "count": spec.count,
        "vertices": spec.vertices,
        "seed": spec.seed,
        "base": spec.base,
        "planar": spec.planar,
    });
    emit(None, &pretty(&meta))
}

fn tiling_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| fail(MALFORMED, format!("{}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn survey(inputs: &[PathBuf], out: &Path) -> Outcome {
    let mut edges = String::from("tiling,edge_id,color,sign\n");
    let mut vertices = String::from("tiling,vertex_id,degree,reflex_position\n");
    let mut skipped = Vec::new();
    for file in tiling_files(inputs)? {
        let name = file
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let t = load_tiling(&file)?;
        let basis = self_stress_basis(&t);
        let [s] = basis.as_slice() else {
            skipped.push(json!({ "tiling": name, "stress_dimension": basis.len() }));
            continue;
        };
        let vp = lift(&t, s).map_err(|e| fail(VERIFY_FAILED, format!("{name}: {e}")))?;
        let report = survey_report(&vp);
        for line in report.edges_csv().lines().skip(1) {
            edges.push_str(&format!("{name},{line}\n"));
        }
        for line in report.vertices_csv().lines().skip(1) {
            vertices.push_str(&format!("{name},{line}\n"));
        }
    }
    fs::create_dir_all(out).map_err(|e| fail(1, format!("{}: {e}", out.display())))?;
    write(&out.join("edges.csv"), &edges)?;
    write(&out.join("vertices.csv"), &vertices)?;
    emit(None, &pretty(&json!({ "skipped": skipped })))
}

fn run(cli: Cli) -> Outcome {
    match cli.cmd {
        Cmd::Analyze { graph } => analyze(&graph),
        Cmd::Embed {
            graph,
            seed,
            max_samples,
            perturbation,
            out,
        } => {
            let cfg = EmbedderConfig {
                rng_seed: seed,
                max_samples_per_step: max_samples,
                perturbation_radius: perturbation,
            };
            embed(&graph, cfg, out.as_deref())
        }
        Cmd::Verify {
            tiling,
            require_nice,
        } => verify_cmd(&tiling, require_nice),
        Cmd::Lift {
            tiling,
            obj,
            stress_index,
            out,
        } => lift_cmd(&tiling, obj.as_deref(), stress_index, out.as_deref()),
        Cmd::Render {
            tiling,
            projection,
            samples,
            highlight,
            colors,
            out,
        } => {
            let spec = RenderSpec {
                projection: match projection {
                    ProjectionArg::North => Projection::StereographicNorth,
                    ProjectionArg::South => Projection::StereographicSouth,
                    ProjectionArg::Both => Projection::BothHemispheres,
                },
                samples_per_arc: samples,
                highlight: match highlight {
                    HighlightArg::Digons => Highlight::Digons,
                    HighlightArg::Colors => Highlight::Colors,
                    HighlightArg::None => Highlight::None,
                },
            };
            render(&tiling, spec, colors.as_deref(), out.as_deref())
        }
        Cmd::Corpus {
            count,
            vertices,
            seed,
            base,
            non_planar,
            out,
        } => {
            let base = match base {
                BaseArg::Edge => CorpusBase::Edge,
                BaseArg::K4 => CorpusBase::K4,
            };
            if vertices < base.base().size() {
                return Err(fail(
                    MALFORMED,
                    format!("--vertices must be at least {}", base.base().size()),
                ));
            }
            let spec = CorpusSpec {
                count,
                vertices,
                seed,
                base,
                planar: !non_planar,
            };
            corpus(spec, &out)
        }
        Cmd::Survey { inputs, out } => survey(&inputs, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
