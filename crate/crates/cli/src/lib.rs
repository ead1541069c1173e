//! Command-line front end: loads a scene (file or preset), runs one
//! subcommand inside a sized thread pool and writes artifacts atomically.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use escset::field::{
    compute_escape_field, construct_e, construct_f, encode_escape_field, encode_pbm, mask_escaping,
    mask_single_element, Mask, Tower,
};
use escset::imaging::{encode_png, encode_ppm, render_field, render_mask, Image, ImageFormat, Palette};
use escset::io::{artifact_name, write_atomic};
use escset::orbit::Word;
use escset::scene::{load_config, preset, preset_names, Scene, SceneConfig};
use escset::verify::{
    check_backward_invariance, check_containment, check_emptiness, check_forward_invariance, compare_masks,
    thinness_statistic, MaskComparison, VerificationReport,
};

pub const THREADS_ENV: &str = "ESCSET_THREADS";

#[derive(Debug, Parser)]
#[command(name = "escset", version, about = "Escaping sets of transcendental semigroups on pixel grids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Args)]
pub struct Flags {
    /// Worker threads (defaults to the environment variable, then all cores).
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Image format for renders.
    #[arg(long, global = true, default_value = "ppm")]
    pub format: ImageFormat,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Palette for escape-field renders (fire, gray).
    #[arg(long, global = true, default_value = "fire")]
    pub palette: String,
    #[arg(long, global = true)]
    pub width: Option<usize>,
    #[arg(long, global = true)]
    pub height: Option<usize>,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true)]
    pub max_iter: Option<u32>,
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SceneArgs {
    /// Scene file (JSON).
    #[arg(conflicts_with = "preset", required_unless_present = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in scene name.
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify every pixel and write the escape field.
    Classify {
        #[command(flatten)]
        scene: SceneArgs,
        /// Also render the field.
        #[arg(long)]
        render: bool,
    },
    /// Build the image/preimage tower and write its masks.
    ConstructE {
        #[command(flatten)]
        scene: SceneArgs,
    },
    /// Build the forward-image tower and write its masks.
    ConstructF {
        #[command(flatten)]
        scene: SceneArgs,
    },
    /// Run every check the scene's claims make applicable.
    Verify {
        #[command(flatten)]
        scene: SceneArgs,
    },
    /// Compare the escaping sets of two generators.
    Compare {
        #[command(flatten)]
        scene: SceneArgs,
        /// Generator indices; defaults to the scene's claimed pair, then 0 and 1.
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        pair: Option<Vec<usize>>,
    },
    /// Render the escape field as an image.
    Render {
        #[command(flatten)]
        scene: SceneArgs,
    },
    /// List the built-in scenes.
    PresetList,
}

/// Outcome of one executed check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    /// Claims decide the exit status; informational checks never do.
    pub claim: bool,
    pub passed: bool,
    pub detail: serde_json::Value,
}

impl CheckOutcome {
    fn report(r: VerificationReport, claim: bool) -> Self {
        CheckOutcome {
            name: r.check_name.clone(),
            claim,
            passed: r.passed,
            detail: serde_json::to_value(&r).expect("report serializes"),
        }
    }

    fn comparison(name: &str, c: &MaskComparison, threshold: f64) -> Self {
        CheckOutcome {
            name: name.to_string(),
            claim: true,
            passed: c.jaccard >= threshold,
            detail: json!({ "comparison": c, "min_jaccard": threshold }),
        }
    }

    pub fn line(&self) -> String {
        let status = match (self.claim, self.passed) {
            (true, true) => "PASS",
            (true, false) => "FAIL",
            (false, _) => "INFO",
        };
        format!("{status} {}", self.name)
    }
}

pub fn resolve_scene(args: &SceneArgs, flags: &Flags) -> anyhow::Result<SceneConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => load_config(path).with_context(|| format!("loading {}", path.display()))?,
        (None, Some(name)) => preset(name)?,
        (None, None) => bail!("a config path or --preset is required"),
    };
    if let Some(w) = flags.width {
        cfg.width = w;
    }
    if let Some(h) = flags.height {
        cfg.height = h;
    }
    if let Some(d) = flags.depth {
        cfg.depth = d;
    }
    if let Some(n) = flags.max_iter {
        cfg.max_iter = n;
    }
    if let Some(n) = flags.n_max {
        cfg.n_max = n;
    }
    if let Some(out) = &flags.out {
        cfg.output_dir = out.to_string_lossy().into_owned();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses arguments, runs the subcommand and returns the process exit code.
pub fn run(cli: Cli) -> anyhow::Result<i32> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.flags.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build()?;
    pool.install(|| run_subcommand(&cli.command, &cli.flags))
}

pub fn run_subcommand(command: &Command, flags: &Flags) -> anyhow::Result<i32> {
    match command {
        Command::PresetList => {
            for name in preset_names() {
                println!("{name}");
            }
            Ok(0)
        }
        Command::Classify { scene, render } => {
            let scene = resolve_scene(scene, flags)?.build()?;
            classify(&scene, flags, *render)
        }
        Command::Render { scene } => {
            let scene = resolve_scene(scene, flags)?.build()?;
            let field = field_of(&scene)?;
            let img = render_field(&field, &palette(flags)?);
            write_render(&scene.config, "field", &img, flags.format)?;
            Ok(0)
        }
        Command::ConstructE { scene } => {
            let scene = resolve_scene(scene, flags)?.build()?;
            let c = &scene.config;
            let tower = construct_e(&scene.generators, &c.grid()?, c.depth, c.n_max, &c.orbit_params()?)?;
            write_tower(&scene, "e", &tower, flags)?;
            Ok(0)
        }
        Command::ConstructF { scene } => {
            let scene = resolve_scene(scene, flags)?.build()?;
            let c = &scene.config;
            let tower = construct_f(&scene.generators, &c.grid()?, c.depth, c.n_max, &c.orbit_params()?)?;
            write_tower(&scene, "f", &tower, flags)?;
            Ok(0)
        }
        Command::Verify { scene } => {
            let scene = resolve_scene(scene, flags)?.build()?;
            let outcomes = run_checks(&scene)?;
            for o in &outcomes {
                println!("{}", o.line());
            }
            emit_report(
                flags,
                &json!({ "scene": scene.config.name, "checks": outcomes }),
            )?;
            Ok(if outcomes.iter().all(|o| !o.claim || o.passed) { 0 } else { 1 })
        }
        Command::Compare { scene, pair } => {
            let scene = resolve_scene(scene, flags)?.build()?;
            let [a, b] = match pair {
                Some(p) => [p[0], p[1]],
                None => scene.config.claims.equal_escaping.unwrap_or([0, 1]),
            };
            let n = scene.generators.len();
            if a >= n || b >= n {
                bail!("generator index out of range (scene has {n} generators)");
            }
            let outcome = compare_pair(&scene, a, b)?;
            println!("{}", outcome.line());
            emit_report(flags, &json!({ "scene": scene.config.name, "checks": [&outcome] }))?;
            Ok(if outcome.passed { 0 } else { 1 })
        }
    }
}

fn palette(flags: &Flags) -> anyhow::Result<Palette> {
    Palette::by_name(&flags.palette).with_context(|| format!("unknown palette `{}`", flags.palette))
}

fn field_of(scene: &Scene) -> anyhow::Result<escset::EscapeField<f64>> {
    let c = &scene.config;
    Ok(compute_escape_field(&scene.generators, &c.grid()?, c.depth, &c.orbit_params()?)?)
}

fn out_path(cfg: &SceneConfig, kind: &str, ext: &str) -> anyhow::Result<PathBuf> {
    let dir = Path::new(&cfg.output_dir);
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.join(artifact_name(&cfg.name, kind, cfg.width, cfg.height, ext)))
}

fn write_render(cfg: &SceneConfig, kind: &str, img: &Image, format: ImageFormat) -> anyhow::Result<PathBuf> {
    let path = out_path(cfg, kind, format.extension())?;
    let bytes = match format {
        ImageFormat::Ppm => encode_ppm(img),
        ImageFormat::Png => encode_png(img)?,
    };
    write_atomic(&path, &bytes)?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn classify(scene: &Scene, flags: &Flags, render: bool) -> anyhow::Result<i32> {
    let field = field_of(scene)?;
    let path = out_path(&scene.config, "field", "escf")?;
    write_atomic(&path, &encode_escape_field(&field))?;
    println!("wrote {}", path.display());
    println!(
        "escaping {} of {} pixels ({:.6})",
        field.escaping_count(),
        field.grid.len(),
        field.escaping_density()
    );
    if render {
        write_render(&scene.config, "field", &render_field(&field, &palette(flags)?), flags.format)?;
    }
    Ok(0)
}

fn write_tower(scene: &Scene, kind: &str, tower: &Tower<f64>, flags: &Flags) -> anyhow::Result<()> {
    let cfg = &scene.config;
    for (n, level) in tower.levels.iter().enumerate() {
        let path = out_path(cfg, &format!("{kind}{n}"), "pbm")?;
        write_atomic(&path, &encode_pbm(level))?;
    }
    let path = out_path(cfg, kind, "pbm")?;
    write_atomic(&path, &encode_pbm(&tower.intersection))?;
    println!("wrote {}", path.display());
    write_render(cfg, kind, &render_mask(&tower.intersection), flags.format)?;
    let counts: Vec<usize> = tower.levels.iter().map(Mask::count).collect();
    println!(
        "levels {counts:?}, final {} pixels, spill {:?}",
        tower.intersection.count(),
        tower.spill
    );
    Ok(())
}

fn emit_report(flags: &Flags, value: &serde_json::Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match &flags.report {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn single_masks(scene: &Scene) -> anyhow::Result<Vec<Mask<f64>>> {
    let c = &scene.config;
    let (grid, params) = (c.grid()?, c.orbit_params()?);
    (0..scene.generators.len())
        .map(|k| Ok(mask_single_element(&Word::single(k), &scene.generators, &grid, &params)?))
        .collect()
}

fn compare_pair(scene: &Scene, a: usize, b: usize) -> anyhow::Result<CheckOutcome> {
    let masks = single_masks(scene)?;
    let c = compare_masks(&masks[a], &masks[b])?;
    let names = (&scene.generators[a].name, &scene.generators[b].name);
    Ok(CheckOutcome::comparison(
        &format!("equal_escaping[{},{}]", names.0, names.1),
        &c,
        scene.config.thresholds.equal_escaping_jaccard,
    ))
}

/// Runs the unconditional checks plus those whose hypotheses the scene claims.
pub fn run_checks(scene: &Scene) -> anyhow::Result<Vec<CheckOutcome>> {
    let c = &scene.config;
    let t = &c.thresholds;
    let gens = &scene.generators;
    let field = field_of(scene)?;
    let escaping = mask_escaping(&field);
    let mut out = Vec::new();

    for (k, m) in single_masks(scene)?.iter().enumerate() {
        let mut r = check_containment(&escaping, m, t.containment)?;
        r.check_name = format!("containment[I(S) in I({})]", gens[k].name);
        out.push(CheckOutcome::report(r, true));
    }
    for r in check_forward_invariance(&field, gens, t.forward_invariance)? {
        out.push(CheckOutcome::report(r, true));
    }
    for r in check_backward_invariance(&field, gens, t.backward_invariance)? {
        out.push(CheckOutcome::report(r, c.claims.abelian));
    }
    out.push(CheckOutcome::report(check_emptiness(&field, t.emptiness), c.claims.empty));
    if let Some([a, b]) = c.claims.equal_escaping {
        out.push(compare_pair(scene, a, b)?);
    }
    if c.claims.thin {
        let s = thinness_statistic(&escaping);
        out.push(CheckOutcome {
            name: "thinness".into(),
            claim: true,
            passed: s <= t.thinness_ceiling,
            detail: json!({ "interior_fraction": s, "ceiling": t.thinness_ceiling }),
        });
    }
    if c.claims.towers {
        let (grid, params) = (c.grid()?, c.orbit_params()?);
        let e = construct_e(gens, &grid, c.depth, c.n_max, &params)?;
        let f = construct_f(gens, &grid, c.depth, c.n_max, &params)?;
        let mut r = check_containment(&e.intersection, &e.levels[0], 0.0)?;
        r.check_name = "tower[E in E_0]".into();
        out.push(CheckOutcome::report(r, true));
        let mut r = check_containment(&f.intersection, &f.levels[0], 0.0)?;
        r.check_name = "tower[F in F_0]".into();
        out.push(CheckOutcome::report(r, true));
        let mut r = check_containment(&e.intersection, &f.intersection, t.tower_containment)?;
        r.check_name = "tower[E in F]".into();
        out.push(CheckOutcome::report(r, true));
        let cmp = compare_masks(&f.intersection, &escaping)?;
        out.push(CheckOutcome::comparison("tower[F = I(S)]", &cmp, t.tower_jaccard));
    }
    Ok(out)
}
