use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use grkhs::applications::{distance_matrix, select_kernel, solve_tsp, Objective, TspMode};
use grkhs::groupoid::{pair_groupoid, validate_groupoid};
use grkhs::io::{matrix_to_raw, prefix_path, Project, ProjectFile};
use grkhs::kernel::{
    character_kernel, convolution_kernel, kernel_from_representation, GroupoidKernel,
    DEFAULT_INVARIANCE_TOL, DEFAULT_PSD_TOL,
};
use grkhs::reconstruction::{reconstruct, round_trip, DEFAULT_RECONSTRUCTION_TOL};
use grkhs::representation::{scalar_representation, validate_haar, VectorField, DEFAULT_TOL};
use grkhs::rkhs::{build_rkhs, DEFAULT_RANK_TOL};
use grkhs::{CMatrix, Error, Result, C64};

#[derive(Parser)]
#[command(
    name = "grkhs",
    version,
    about = "Kernels and RKHS models on finite groupoids"
)]
struct Cli {
    /// Print a machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the groupoid axioms, representations and Haar systems.
    Validate {
        project: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Build a kernel and print it; `--output` writes the extended project.
    BuildKernel {
        project: PathBuf,
        /// Representation for a kernel `⟨F(γ), F(χ)⟩`.
        #[arg(long, requires = "field", conflicts_with_all = ["character", "convolution"])]
        rep: Option<String>,
        /// Vector field used with `--rep`.
        #[arg(long)]
        field: Option<String>,
        /// One-dimensional representation read as a character `k(γ) = U(γ)`.
        #[arg(long, conflicts_with = "convolution")]
        character: Option<String>,
        /// Vector field whose single fiber lists `f` over the group elements.
        #[arg(long)]
        convolution: Option<String>,
        /// Haar weight of each group element.
        #[arg(long, default_value_t = 1.0)]
        weight: f64,
        #[arg(long, default_value = "K")]
        id: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Spectral positive semidefiniteness test.
    CheckPsd {
        project: PathBuf,
        #[arg(long)]
        kernel: Option<String>,
        #[arg(long, default_value_t = DEFAULT_PSD_TOL)]
        tol: f64,
    },
    /// Translation invariance across each range fiber.
    CheckInvariance {
        project: PathBuf,
        #[arg(long)]
        kernel: Option<String>,
        #[arg(long, default_value_t = DEFAULT_INVARIANCE_TOL)]
        tol: f64,
    },
    /// Rank and fiber ranks of the reproducing kernel Hilbert space.
    BuildRkhs {
        project: PathBuf,
        #[arg(long)]
        kernel: Option<String>,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        rank_tol: f64,
    },
    /// Checks that the computed orthonormal basis is a Parseval frame.
    ParsevalCheck {
        project: PathBuf,
        #[arg(long)]
        kernel: Option<String>,
        /// Drop these basis functions (by position) before checking.
        #[arg(long, num_args = 1..)]
        drop: Vec<usize>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Rebuild a unitary representation from an invariant kernel.
    Reconstruct {
        project: PathBuf,
        #[arg(long)]
        kernel: Option<String>,
        #[arg(long, default_value_t = DEFAULT_RECONSTRUCTION_TOL)]
        tol: f64,
        /// Write the reconstructed representation and retrieval field here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Reconstruct, rebuild the kernel and compare.
    RoundTrip {
        project: PathBuf,
        #[arg(long)]
        kernel: Option<String>,
        #[arg(long, default_value_t = DEFAULT_RECONSTRUCTION_TOL)]
        tol: f64,
    },
    /// Kernel distances between arrows.
    DistanceMatrix {
        project: PathBuf,
        #[arg(long)]
        kernel: Option<String>,
        /// Arrow labels; all arrows when omitted.
        #[arg(long, num_args = 1..)]
        nodes: Vec<String>,
    },
    /// Shortest closed tour through the nodes under the kernel distance.
    Tsp {
        project: PathBuf,
        #[arg(long)]
        kernel: Option<String>,
        #[arg(long, num_args = 1..)]
        nodes: Vec<String>,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        restarts: usize,
    },
    /// Rank candidate kernels by a tour or spread objective.
    SelectKernel {
        project: PathBuf,
        /// Candidate kernel ids; all kernels when omitted.
        #[arg(long, num_args = 1..)]
        kernels: Vec<String>,
        #[arg(long, num_args = 1..)]
        nodes: Vec<String>,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::MinTour)]
        objective: ObjectiveArg,
    },
    /// The two-point example: scalar representation with `U(α) = λ`.
    DemoQubit {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,1")]
        lambda: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1,0")]
        v_plus: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "2,0")]
        v_minus: C64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Heuristic,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    MinTour,
    MaxMinDistance,
}

fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re` or `re,im`, got `{s}`")),
    }
}

struct Outcome {
    passed: bool,
    report: Value,
    text: String,
}

impl Outcome {
    fn new(passed: bool, report: impl Serialize, text: String) -> Result<Self> {
        Ok(Self {
            passed,
            report: serde_json::to_value(report)?,
            text,
        })
    }
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn fmt_c(z: C64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

fn matrix_text(m: &CMatrix, labels: &[String]) -> String {
    let mut out = String::new();
    for (i, l) in labels.iter().enumerate() {
        let row: Vec<String> = m
            .row(i)
            .iter()
            .map(|&z| format!("{:>22}", fmt_c(z)))
            .collect();
        out.push_str(&format!("{l:>8} {}\n", row.join(" ")));
    }
    out
}

fn selected<'a>(
    project: &'a Project,
    id: Option<&'a str>,
) -> Result<Vec<(&'a str, &'a GroupoidKernel)>> {
    match id {
        Some(id) => Ok(vec![(id, project.kernel(id)?)]),
        None if project.kernels.is_empty() => {
            Err(Error::InvalidArgument("project has no kernels".into()))
        }
        None => Ok(project
            .kernels
            .iter()
            .map(|(k, v)| (k.as_str(), v))
            .collect()),
    }
}

fn single<'a>(project: &'a Project, id: Option<&'a str>) -> Result<(&'a str, &'a GroupoidKernel)> {
    let mut all = selected(project, id)?;
    if all.len() > 1 {
        return Err(Error::InvalidArgument(
            "project has several kernels; pass --kernel".into(),
        ));
    }
    Ok(all.remove(0))
}

fn nodes_or_all(kernel: &GroupoidKernel, nodes: &[String]) -> Vec<String> {
    if nodes.is_empty() {
        kernel.labels().to_vec()
    } else {
        nodes.to_vec()
    }
}

fn validate(path: &Path, tol: f64) -> Result<Outcome> {
    let file = ProjectFile::load(path)?;
    let mut text = String::new();
    let mut passed = true;
    let groupoid = match &file.groupoid {
        Some(raw) => {
            let v = validate_groupoid(raw).map_err(|e| prefix_path(e, "/groupoid"))?;
            text += &format!(
                "groupoid: {} base points, {} arrows, {}\n",
                v.base_points,
                v.arrows,
                verdict(v.passed)
            );
            for viol in &v.violations {
                text += &format!(
                    "  {:?} at {:?}: {}\n",
                    viol.axiom, viol.witness, viol.detail
                );
            }
            passed &= v.passed;
            Some(v)
        }
        None => None,
    };
    if !passed {
        let report = json!({ "passed": false, "groupoid": groupoid });
        return Outcome::new(false, report, text);
    }
    let project = Project::from_file(&file)?;
    let mut reps = Vec::new();
    for (id, rep) in &project.representations {
        let v = rep.validate(tol);
        text += &format!(
            "representation {id}: {} (unitarity {:.3e}, homomorphism {:.3e})\n",
            verdict(v.passed),
            v.max_unitarity_deviation,
            v.max_homomorphism_deviation
        );
        passed &= v.passed;
        reps.push(json!({ "id": id, "validation": v }));
    }
    let g = project.groupoid.clone();
    let mut haar = Vec::new();
    for (id, h) in &project.haar {
        let v = validate_haar(g.as_deref().expect("resolved"), h, tol)?;
        text += &format!(
            "haar {id}: {} (max deviation {:.3e})\n",
            verdict(v.passed),
            v.max_deviation
        );
        passed &= v.passed;
        haar.push(json!({ "id": id, "validation": v }));
    }
    text += &format!("{}\n", verdict(passed));
    let report = json!({
        "passed": passed,
        "groupoid": groupoid,
        "representations": reps,
        "haar": haar,
        "vector_fields": project.vector_fields.iter().map(|(id, _)| id).collect::<Vec<_>>(),
        "kernels": project.kernels.iter().map(|(id, _)| id).collect::<Vec<_>>(),
    });
    Outcome::new(passed, report, text)
}

#[allow(clippy::too_many_arguments)]
fn build_kernel(
    path: &Path,
    rep: Option<String>,
    field: Option<String>,
    character: Option<String>,
    convolution: Option<String>,
    weight: f64,
    id: &str,
    output: Option<PathBuf>,
) -> Result<Outcome> {
    let mut project = Project::load(path)?;
    let g = project.groupoid()?.clone();
    let kernel = if let (Some(r), Some(f)) = (&rep, &field) {
        kernel_from_representation(project.representation(r)?, project.vector_field(f)?)?
    } else if let Some(r) = &character {
        let rep = project.representation(r)?;
        if rep.family().dims().iter().any(|&d| d != 1) {
            return Err(Error::InvalidArgument(format!(
                "character source `{r}` must be one-dimensional"
            )));
        }
        let k: Vec<C64> = rep.matrices().iter().map(|m| m[(0, 0)]).collect();
        character_kernel(g.clone(), &k, 1e-12)?
    } else if let Some(f) = &convolution {
        let v = project.vector_field(f)?;
        if v.values().len() != 1 {
            return Err(Error::InvalidArgument(
                "convolution needs a group (one base point)".into(),
            ));
        }
        let values: Vec<C64> = v.values()[0].iter().copied().collect();
        convolution_kernel(g.clone(), &values, weight)?
    } else {
        return Err(Error::InvalidArgument(
            "choose one of --rep/--field, --character or --convolution".into(),
        ));
    };
    let psd = kernel.check_positive_definite(DEFAULT_PSD_TOL)?;
    let inv = kernel.check_invariance(DEFAULT_INVARIANCE_TOL);
    let mut text = matrix_text(kernel.values(), kernel.labels());
    text += &format!(
        "positive semidefinite: {} (min eigenvalue {:.3e}); invariant: {}\n",
        verdict(psd.passed),
        psd.min_eigenvalue,
        verdict(inv.passed)
    );
    let report = json!({
        "id": id,
        "legend": kernel.labels(),
        "values": matrix_to_raw(kernel.values()),
        "psd": psd,
        "invariance": inv,
    });
    if let Some(out) = output {
        project.set_kernel(id, kernel);
        project.save(&out)?;
        text += &format!("wrote {}\n", out.display());
    }
    Outcome::new(true, report, text)
}

fn check_psd(path: &Path, id: Option<&str>, tol: f64) -> Result<Outcome> {
    let project = Project::load(path)?;
    let mut passed = true;
    let mut text = String::new();
    let mut reports = Vec::new();
    for (id, k) in selected(&project, id)? {
        match k.check_positive_definite(tol) {
            Ok(r) => {
                text += &format!(
                    "{id}: {} (min eigenvalue {:.6e}, max {:.6e}, threshold {:.3e})\n",
                    verdict(r.passed),
                    r.min_eigenvalue,
                    r.max_eigenvalue,
                    r.threshold
                );
                passed &= r.passed;
                reports.push(json!({ "id": id, "legend": k.labels(), "psd": r }));
            }
            Err(e) => {
                text += &format!("{id}: FAIL ({e})\n");
                passed = false;
                reports.push(json!({ "id": id, "error": e.to_string() }));
            }
        }
    }
    Outcome::new(
        passed,
        json!({ "passed": passed, "kernels": reports }),
        text,
    )
}

fn check_invariance(path: &Path, id: Option<&str>, tol: f64) -> Result<Outcome> {
    let project = Project::load(path)?;
    let mut passed = true;
    let mut text = String::new();
    let mut reports = Vec::new();
    for (id, k) in selected(&project, id)? {
        let r = k.check_invariance(tol);
        text += &format!(
            "{id}: {} (max deviation {:.3e}, cross-fiber {:.3e})\n",
            verdict(r.passed),
            r.max_deviation,
            r.max_cross_fiber
        );
        for (chi, gamma) in r.witnesses.iter().take(5) {
            text += &format!("  witness ({chi}, {gamma})\n");
        }
        passed &= r.passed;
        reports.push(json!({ "id": id, "legend": k.labels(), "invariance": r }));
    }
    Outcome::new(
        passed,
        json!({ "passed": passed, "kernels": reports }),
        text,
    )
}

fn build_rkhs_cmd(path: &Path, id: Option<&str>, rank_tol: f64) -> Result<Outcome> {
    let project = Project::load(path)?;
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut passed = true;
    for (id, k) in selected(&project, id)? {
        let m = build_rkhs(k, rank_tol)?;
        let fibers = m.fiber_decomposition_check(1e-12)?;
        passed &= fibers.passed;
        let ranks: Vec<String> = m
            .fiber_ranks()
            .iter()
            .map(|(x, r)| format!("{x}:{r}"))
            .collect();
        text += &format!(
            "{id}: rank {} (fibers {}), fiber decomposition {}\n",
            m.rank(),
            ranks.join(" "),
            verdict(fibers.passed)
        );
        reports.push(json!({
            "id": id,
            "legend": k.labels(),
            "rank": m.rank(),
            "fiber_ranks": m.fiber_ranks(),
            "max_eigenvalue": m.eigenvalues().first(),
            "min_eigenvalue": m.eigenvalues().last(),
            "onb_deviation": m.onb_deviation(),
            "fiber_decomposition": fibers,
        }));
    }
    Outcome::new(
        passed,
        json!({ "passed": passed, "kernels": reports }),
        text,
    )
}

fn parseval(path: &Path, id: Option<&str>, drop: &[usize], tol: f64) -> Result<Outcome> {
    let project = Project::load(path)?;
    let (id, k) = single(&project, id)?;
    let m = build_rkhs(k, DEFAULT_RANK_TOL)?;
    let frame: Vec<_> = m
        .onb_functions()
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !drop.contains(i))
        .map(|(_, f)| f)
        .collect();
    let r = m.parseval_check(&frame, tol)?;
    let text = format!(
        "{id}: frame of {} / rank {}, max deviation {:.3e}, {}\n",
        r.frame_size,
        m.rank(),
        r.max_deviation,
        verdict(r.passed)
    );
    Outcome::new(
        r.passed,
        json!({ "id": id, "legend": k.labels(), "rank": m.rank(), "parseval": r }),
        text,
    )
}

fn reconstruct_cmd(
    path: &Path,
    id: Option<&str>,
    tol: f64,
    emit: Option<PathBuf>,
) -> Result<Outcome> {
    let project = Project::load(path)?;
    let (id, k) = single(&project, id)?;
    let rec = reconstruct(k, tol)?;
    let mut text = format!(
        "{id}: fiber ranks {:?}, max residual {:.3e} (threshold {:.3e}), {}\n",
        rec.fiber_ranks(),
        rec.max_residual,
        rec.residual_threshold,
        verdict(rec.validation.passed)
    );
    if let Some(out) = &emit {
        let mut p = Project::with_groupoid(k.groupoid().clone());
        p.set_representation(&format!("{id}_reconstructed"), rec.representation.clone());
        p.set_vector_field(&format!("{id}_retrieval"), rec.retrieval_field());
        p.save(out)?;
        text += &format!("wrote {}\n", out.display());
    }
    let report = json!({
        "id": id,
        "legend": k.labels(),
        "fiber_ranks": rec.fiber_ranks(),
        "max_residual": rec.max_residual,
        "residual_threshold": rec.residual_threshold,
        "validation": rec.validation,
    });
    Outcome::new(rec.validation.passed, report, text)
}

fn round_trip_cmd(path: &Path, id: Option<&str>, tol: f64) -> Result<Outcome> {
    let project = Project::load(path)?;
    let mut passed = true;
    let mut text = String::new();
    let mut reports = Vec::new();
    for (id, k) in selected(&project, id)? {
        let r = round_trip(k, tol)?;
        text += &format!(
            "{id}: max deviation {:.3e} {} {tol:e}, {}\n",
            r.max_deviation,
            if r.passed { "≤" } else { ">" },
            verdict(r.passed)
        );
        passed &= r.passed;
        reports.push(json!({ "id": id, "legend": k.labels(), "round_trip": r }));
    }
    Outcome::new(
        passed,
        json!({ "passed": passed, "kernels": reports }),
        text,
    )
}

fn distance_cmd(path: &Path, id: Option<&str>, nodes: &[String]) -> Result<Outcome> {
    let project = Project::load(path)?;
    let (id, k) = single(&project, id)?;
    let d = distance_matrix(k, &nodes_or_all(k, nodes))?;
    let mut text = String::new();
    for (i, l) in d.labels.iter().enumerate() {
        let row: Vec<String> = (0..d.len())
            .map(|j| format!("{:>12.6}", d.get(i, j)))
            .collect();
        text += &format!("{l:>8} {}\n", row.join(" "));
    }
    let report = json!({
        "id": id,
        "distances": d,
        "symmetric": d.is_symmetric(),
        "zero_diagonal": d.has_zero_diagonal(),
        "triangle_violation": d.triangle_violation(),
    });
    Outcome::new(true, report, text)
}

fn tsp_cmd(
    path: &Path,
    id: Option<&str>,
    nodes: &[String],
    mode: Mode,
    seed: u64,
    restarts: usize,
) -> Result<Outcome> {
    let project = Project::load(path)?;
    let (id, k) = single(&project, id)?;
    let d = distance_matrix(k, &nodes_or_all(k, nodes))?;
    let mode = match mode {
        Mode::Exact => TspMode::Exact,
        Mode::Heuristic => TspMode::Heuristic { restarts },
    };
    let tour = solve_tsp(&d, mode, seed)?;
    let labels = tour.labels(&d);
    let text = format!(
        "{id}: tour {} length {:.12}\n",
        labels.join(" -> "),
        tour.length
    );
    let report =
        json!({ "id": id, "mode": mode, "seed": seed, "tour": labels, "length": tour.length });
    Outcome::new(true, report, text)
}

fn select_cmd(
    path: &Path,
    ids: &[String],
    nodes: &[String],
    objective: ObjectiveArg,
) -> Result<Outcome> {
    let project = Project::load(path)?;
    let candidates: Vec<(&str, &GroupoidKernel)> = if ids.is_empty() {
        selected(&project, None)?
    } else {
        ids.iter()
            .map(|id| project.kernel(id).map(|k| (id.as_str(), k)))
            .collect::<Result<_>>()?
    };
    let nodes = nodes_or_all(candidates[0].1, nodes);
    let objective = match objective {
        ObjectiveArg::MinTour => Objective::MinTour,
        ObjectiveArg::MaxMinDistance => Objective::MaxMinDistance,
    };
    let ranking = select_kernel(&candidates, &nodes, objective)?;
    let text = ranking
        .iter()
        .map(|r| format!("{}. {} ({:.12})\n", r.rank, r.id, r.score))
        .collect();
    Outcome::new(
        true,
        json!({ "objective": objective, "nodes": nodes, "ranking": ranking }),
        text,
    )
}

fn demo_qubit(lambda: C64, vp: C64, vm: C64, output: Option<PathBuf>) -> Result<Outcome> {
    let g = Arc::new(pair_groupoid(&["+", "-"])?);
    let scalars: Vec<C64> = g
        .arrows()
        .map(|a| match g.arrow_label(a) {
            "(-,+)" => lambda,
            "(+,-)" => lambda.conj(),
            _ => C64::new(1.0, 0.0),
        })
        .collect();
    let rep = scalar_representation(g.clone(), &scalars)?;
    let validation = rep.validate(DEFAULT_TOL);
    if !validation.passed {
        return Err(Error::InvalidRepresentation(format!(
            "|lambda| = {} is not 1",
            lambda.norm()
        )));
    }
    let v = VectorField::new(vec![
        grkhs::CVector::from_element(1, vp),
        grkhs::CVector::from_element(1, vm),
    ]);
    let k = kernel_from_representation(&rep, &v)?;
    let roles = ["e(+)", "alpha^-1", "alpha", "e(-)"];
    let legend: Vec<String> = k
        .labels()
        .iter()
        .zip(roles)
        .map(|(l, r)| format!("{r}={l}"))
        .collect();
    let mut text = format!("legend: {}\n", legend.join(", "));
    text += &matrix_text(k.values(), &roles.map(String::from));
    let report = json!({
        "lambda": [lambda.re, lambda.im],
        "v_plus": [vp.re, vp.im],
        "v_minus": [vm.re, vm.im],
        "legend": k.labels(),
        "roles": roles,
        "values": matrix_to_raw(k.values()),
    });
    if let Some(out) = output {
        let mut p = Project::with_groupoid(g);
        p.set_representation("U", rep);
        p.set_vector_field("v", v);
        p.set_kernel("K", k);
        p.save(&out)?;
        text += &format!("wrote {}\n", out.display());
    }
    Outcome::new(true, report, text)
}

fn run(cli: Cli) -> Result<(&'static str, Outcome)> {
    Ok(match cli.command {
        Command::Validate { project, tol } => ("validate", validate(&project, tol)?),
        Command::BuildKernel {
            project,
            rep,
            field,
            character,
            convolution,
            weight,
            id,
            output,
        } => (
            "build-kernel",
            build_kernel(
                &project,
                rep,
                field,
                character,
                convolution,
                weight,
                &id,
                output,
            )?,
        ),
        Command::CheckPsd {
            project,
            kernel,
            tol,
        } => ("check-psd", check_psd(&project, kernel.as_deref(), tol)?),
        Command::CheckInvariance {
            project,
            kernel,
            tol,
        } => (
            "check-invariance",
            check_invariance(&project, kernel.as_deref(), tol)?,
        ),
        Command::BuildRkhs {
            project,
            kernel,
            rank_tol,
        } => (
            "build-rkhs",
            build_rkhs_cmd(&project, kernel.as_deref(), rank_tol)?,
        ),
        Command::ParsevalCheck {
            project,
            kernel,
            drop,
            tol,
        } => (
            "parseval-check",
            parseval(&project, kernel.as_deref(), &drop, tol)?,
        ),
        Command::Reconstruct {
            project,
            kernel,
            tol,
            emit,
        } => (
            "reconstruct",
            reconstruct_cmd(&project, kernel.as_deref(), tol, emit)?,
        ),
        Command::RoundTrip {
            project,
            kernel,
            tol,
        } => (
            "round-trip",
            round_trip_cmd(&project, kernel.as_deref(), tol)?,
        ),
        Command::DistanceMatrix {
            project,
            kernel,
            nodes,
        } => (
            "distance-matrix",
            distance_cmd(&project, kernel.as_deref(), &nodes)?,
        ),
        Command::Tsp {
            project,
            kernel,
            nodes,
            mode,
            seed,
            restarts,
        } => (
            "tsp",
            tsp_cmd(&project, kernel.as_deref(), &nodes, mode, seed, restarts)?,
        ),
        Command::SelectKernel {
            project,
            kernels,
            nodes,
            objective,
        } => (
            "select-kernel",
            select_cmd(&project, &kernels, &nodes, objective)?,
        ),
        Command::DemoQubit {
            lambda,
            v_plus,
            v_minus,
            output,
        } => ("demo-qubit", demo_qubit(lambda, v_plus, v_minus, output)?),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_out = cli.json;
    match run(cli) {
        Ok((command, outcome)) => {
            let body = if json_out {
                let doc = json!({
                    "command": command,
                    "passed": outcome.passed,
                    "report": outcome.report,
                    "meta": { "tool": "grkhs", "version": env!("CARGO_PKG_VERSION") },
                });
                serde_json::to_string_pretty(&doc).expect("serializable report") + "\n"
            } else {
                outcome.text
            };
            let mut out = std::io::stdout().lock();
            if let Err(e) = out.write_all(body.as_bytes()).and_then(|_| out.flush()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
