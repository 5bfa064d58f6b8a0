//! The pack, build, plan and render stages behind the command line tool.
//!
//! Every stage starts from the input nerve file and recomputes what it
//! needs, so any stage can run on its own and identical inputs always give
//! byte-identical artifacts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Error;
use crate::filling::{self, Certificate, CuspShape, SlopePlan};
use crate::io::{canonical_json, parse_nerve, NerveFile};
use crate::link::{reduce_to_knot, synth_fal, trace_components, ComponentPartition, FALDiagram};
use crate::nerve::{dual_with_matching, subdivide_with_dimer, validate_dimer, Dimer, GenusReport, Nerve};
use crate::packing::{
    angle_sum, develop_layout, diameter_report, solve_packing_label, DiameterReport, Geometry, Layout, LayoutOptions,
    PackingLabel, SolveReport, SolverOptions,
};
use crate::par::Execution;
use crate::render::{render_diagram, render_packing};
use crate::scoop::{build_scoop, finite_volume_audit, rectangle_shape, ScoopComplex, VolumeReport};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub geometry: Option<Geometry>,
    pub tol: f64,
    pub max_iters: usize,
    pub epsilon: Option<f64>,
    pub big_r: Option<f64>,
    pub delta: Option<f64>,
    pub out: PathBuf,
    pub reduce: bool,
    pub render: bool,
    pub execution: Execution,
}

impl PipelineConfig {
    pub fn new(input: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        let solver = SolverOptions::default();
        PipelineConfig {
            input: input.into(),
            geometry: None,
            tol: solver.tol,
            max_iters: solver.max_iters,
            epsilon: None,
            big_r: None,
            delta: None,
            out: out.into(),
            reduce: true,
            render: false,
            execution: Execution::default(),
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.input.as_os_str().is_empty() || self.out.as_os_str().is_empty() {
            return Err(Error::Validation("input and output paths must be nonempty".into()));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Validation(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Validation("iteration budget must be positive".into()));
        }
        for (name, v) in [("epsilon", self.epsilon), ("bigR", self.big_r), ("delta", self.delta)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Validation(format!("{name} must be positive, got {v}")));
                }
            }
        }
        Ok(())
    }

    fn solver(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iters: self.max_iters,
            execution: self.execution,
            ..SolverOptions::default()
        }
    }
}

/// Reads and validates a nerve file.
pub fn load_nerve(path: &Path) -> Result<(Nerve, Option<Dimer>), Error> {
    let text =
        std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    let file =
        parse_nerve(&text).map_err(|e| Error::Parse { what: path.display().to_string(), message: e.to_string() })?;
    Ok(file.into_nerve()?)
}

/// Residuals of a packing, recomputed independently of the solver.
#[derive(Debug, Clone, Serialize)]
pub struct PackReport {
    pub nerve: GenusReport,
    pub geometry: Geometry,
    pub solver: SolveReport,
    pub angle_sum_residual: f64,
    pub tangency_residual: f64,
    pub orthogonality_residual: f64,
    pub holonomy_residual: f64,
    pub side_pairings: usize,
    pub diameters: DiameterReport,
}

pub struct Packed {
    pub nerve: Nerve,
    pub label: PackingLabel,
    pub layout: Layout,
    pub report: PackReport,
}

/// Solves and develops the packing of `nerve`.
pub fn pack(nerve: Nerve, cfg: &PipelineConfig) -> Result<Packed, Error> {
    let geometry = cfg.geometry.unwrap_or_else(|| Geometry::for_genus(nerve.genus()));
    let (label, solver) = solve_packing_label(&nerve, geometry, &cfg.solver())?;
    let layout =
        develop_layout(&nerve, &label, &LayoutOptions { execution: cfg.execution, ..LayoutOptions::default() })?;
    let mut angle_sum_residual = 0.0f64;
    for v in 0..nerve.vertex_count() {
        angle_sum_residual = angle_sum_residual.max((angle_sum(&nerve, &label, v)? - 2.0 * std::f64::consts::PI).abs());
    }
    let report = PackReport {
        nerve: nerve.report(),
        geometry,
        solver,
        angle_sum_residual,
        tangency_residual: layout.tangency_residual,
        orthogonality_residual: layout.orthogonality_residual,
        holonomy_residual: layout.holonomy_residual,
        side_pairings: layout.side_pairings.len(),
        diameters: diameter_report(&nerve, &layout)?,
    };
    Ok(Packed { nerve, label, layout, report })
}

/// Link metadata written next to the diagram.
#[derive(Debug, Clone, Serialize)]
pub struct LinkReport {
    pub genus: usize,
    /// The doubled manifold is the 3-sphere only for genus zero.
    pub ambient_is_s3: bool,
    pub crossing_circles: usize,
    pub strand_arcs: usize,
    pub components: usize,
    pub cusps: usize,
    pub toggles: Vec<usize>,
    pub diagram: FALDiagram,
    pub partition: ComponentPartition,
}

pub struct Built {
    pub packed: Packed,
    pub dimer: Dimer,
    pub scoop: ScoopComplex,
    pub volume: VolumeReport,
    pub fal: FALDiagram,
    pub link: LinkReport,
}

/// The working nerve: the input with its dimer, or its stellar subdivision
/// with the induced dimer when the input has none.
pub fn working_nerve(nerve: Nerve, dimer: Option<Dimer>) -> Result<(Nerve, Dimer), Error> {
    match dimer {
        Some(d) => {
            if !validate_dimer(&nerve, &d)? {
                return Err(Error::Validation(
                    "the supplied dimer leaves some face with zero or several coloured edges".into(),
                ));
            }
            Ok((nerve, d))
        }
        None => Ok(subdivide_with_dimer(&nerve)),
    }
}

pub fn build(nerve: Nerve, dimer: Option<Dimer>, cfg: &PipelineConfig) -> Result<Built, Error> {
    let (nerve, dimer) = working_nerve(nerve, dimer)?;
    let packed = pack(nerve, cfg)?;
    let scoop = build_scoop(&packed.nerve, &dimer, &packed.layout)?;
    let volume = finite_volume_audit(&scoop)?;
    let fal = synth_fal(&dual_with_matching(&packed.nerve, &dimer)?, packed.nerve.genus())?;
    let fal = if cfg.reduce { reduce_to_knot(&fal)? } else { fal };
    let partition = trace_components(&fal);
    let link = LinkReport {
        genus: fal.genus,
        ambient_is_s3: fal.genus == 0,
        crossing_circles: fal.crossing_circles.len(),
        strand_arcs: fal.strands.len(),
        components: partition.count(),
        cusps: fal.crossing_circles.len() + partition.count(),
        toggles: fal.toggles.clone(),
        diagram: fal.clone(),
        partition,
    };
    Ok(Built { packed, dimer, scoop, volume, fal, link })
}

/// Cusp shapes of the crossing circles, in diagram order.
pub fn cusp_shapes(built: &Built) -> Result<Vec<CuspShape>, Error> {
    built
        .fal
        .crossing_circles
        .iter()
        .map(|c| {
            // Crossing circles sit at the ideal vertices of coloured edges,
            // and ideal vertices are indexed by edge.
            let r = rectangle_shape(&built.scoop, c.arc)?;
            Ok(CuspShape { w: r.w, b: r.b, half_twist: c.half_twist })
        })
        .collect()
}

pub fn plan(built: &Built, cfg: &PipelineConfig) -> Result<(SlopePlan, Certificate), Error> {
    let (Some(epsilon), Some(big_r), Some(delta)) = (cfg.epsilon, cfg.big_r, cfg.delta) else {
        return Err(Error::Validation("planning needs --epsilon, --bigR and --delta".into()));
    };
    let shapes = cusp_shapes(built)?;
    let signs: Vec<i8> = built.fal.crossing_circles.iter().map(|c| if c.twist_sign < 0 { -1 } else { 1 }).collect();
    let slope_plan = filling::plan(epsilon, big_r, delta, &shapes, &signs)?;
    let cert = filling::certificate(epsilon, big_r, delta, &slope_plan)?;
    Ok((slope_plan, cert))
}

fn write(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    written.push(path);
    Ok(())
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String, Error> {
    canonical_json(value).map_err(|e| Error::Validation(format!("serialization failed: {e}")))
}

fn write_pack(packed: &Packed, cfg: &PipelineConfig, written: &mut Vec<PathBuf>) -> Result<(), Error> {
    write(&cfg.out, "label.json", &json(&packed.label)?, written)?;
    write(&cfg.out, "layout.json", &json(&packed.layout)?, written)?;
    write(&cfg.out, "residuals.json", &json(&packed.report)?, written)?;
    if cfg.render {
        write(&cfg.out, "packing.svg", &render_packing(&packed.layout)?, written)?;
    }
    Ok(())
}

/// Packs the input nerve as given.
pub fn cmd_pack(cfg: &PipelineConfig) -> Result<Vec<PathBuf>, Error> {
    cfg.validate()?;
    let (nerve, _) = load_nerve(&cfg.input)?;
    let packed = pack(nerve, cfg)?;
    let mut written = Vec::new();
    write_pack(&packed, cfg, &mut written)?;
    Ok(written)
}

fn write_build(built: &Built, cfg: &PipelineConfig, written: &mut Vec<PathBuf>) -> Result<(), Error> {
    write(&cfg.out, "nerve.json", &json(&NerveFile::from_nerve(&built.packed.nerve, Some(&built.dimer)))?, written)?;
    write_pack(&built.packed, cfg, written)?;
    #[derive(Serialize)]
    struct ScoopFile<'a> {
        complex: &'a ScoopComplex,
        volume: &'a VolumeReport,
    }
    write(&cfg.out, "scoop.json", &json(&ScoopFile { complex: &built.scoop, volume: &built.volume })?, written)?;
    write(&cfg.out, "fal.json", &json(&built.link)?, written)?;
    if cfg.render {
        write(&cfg.out, "fal.svg", &render_diagram(&built.fal, &built.packed.nerve, &built.packed.layout)?, written)?;
    }
    Ok(())
}

/// Packs the working nerve, audits the scooped complex and draws the link.
pub fn cmd_build(cfg: &PipelineConfig) -> Result<Vec<PathBuf>, Error> {
    cfg.validate()?;
    let (nerve, dimer) = load_nerve(&cfg.input)?;
    let built = build(nerve, dimer, cfg)?;
    let mut written = Vec::new();
    write_build(&built, cfg, &mut written)?;
    Ok(written)
}

/// Human-readable summary of a plan and its certificate.
pub fn plan_text(plan: &SlopePlan, cert: &Certificate) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "filling plan for epsilon = {}, R = {}, delta = {}", plan.epsilon, plan.big_r, plan.delta);
    let _ = writeln!(
        s,
        "threshold: {} crossings per twist region ({:.4} before rounding, {} crossing circles)",
        plan.threshold.crossings,
        plan.threshold.raw,
        plan.circles.len()
    );
    let _ = writeln!(s, "{:>6} {:>6} {:>8} {:>8} {:>10} {:>12}", "circle", "twist", "n", "c", "w/b", "L");
    for c in &plan.circles {
        let _ = writeln!(
            s,
            "{:>6} {:>6} {:>8} {:>8} {:>10.6} {:>12.6}",
            c.circle,
            if c.shape.half_twist { "yes" } else { "no" },
            c.n,
            c.crossings,
            c.shape.w / c.shape.b,
            c.length
        );
    }
    let _ = writeln!(
        s,
        "aggregate normalized length L = {:.6} (L^2 = {:.6})",
        plan.aggregate_length, cert.aggregate_length_sq
    );
    for step in &cert.steps {
        let _ = writeln!(s, "  {step}");
    }
    let _ = writeln!(s, "verdict: {}", if cert.passed { "PASS" } else { "FAIL" });
    s
}

/// Builds, then plans the filling of every crossing circle.
pub fn cmd_plan(cfg: &PipelineConfig) -> Result<Vec<PathBuf>, Error> {
    cfg.validate()?;
    if cfg.epsilon.is_none() || cfg.big_r.is_none() || cfg.delta.is_none() {
        return Err(Error::Validation("planning needs --epsilon, --bigR and --delta".into()));
    }
    let (nerve, dimer) = load_nerve(&cfg.input)?;
    let built = build(nerve, dimer, cfg)?;
    let (slope_plan, cert) = plan(&built, cfg)?;
    let mut written = Vec::new();
    write_build(&built, cfg, &mut written)?;
    write(&cfg.out, "plan.json", &json(&slope_plan)?, &mut written)?;
    write(&cfg.out, "certificate.json", &json(&cert)?, &mut written)?;
    write(&cfg.out, "report.txt", &plan_text(&slope_plan, &cert), &mut written)?;
    if !cert.passed {
        return Err(Error::Certificate { deficient: cert.deficient, required: cert.required_crossings });
    }
    Ok(written)
}

/// Writes only the drawings of the working nerve.
pub fn cmd_render(cfg: &PipelineConfig) -> Result<Vec<PathBuf>, Error> {
    cfg.validate()?;
    let (nerve, dimer) = load_nerve(&cfg.input)?;
    let built = build(nerve, dimer, cfg)?;
    let mut written = Vec::new();
    write(&cfg.out, "packing.svg", &render_packing(&built.packed.layout)?, &mut written)?;
    write(&cfg.out, "fal.svg", &render_diagram(&built.fal, &built.packed.nerve, &built.packed.layout)?, &mut written)?;
    Ok(written)
}
