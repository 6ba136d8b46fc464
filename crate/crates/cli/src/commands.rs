use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use ogstv::metrics::format_sig6;
use ogstv::{
    add_salt_pepper_counted, blur, default_params, pgm, solve, GroupConfig, Image, Kernel, NoiseSpec,
    QualityReport, SolverConfig,
};
use rayon::prelude::*;

use crate::args::{DeblurArgs, DegradeArgs, EvaluateArgs, Method, SolveArgs, SweepArgs};
use crate::record::{self, Outcome, RunRecord};

fn read(path: &Path) -> Result<Image> {
    pgm::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, img: &Image) -> Result<()> {
    pgm::write(path, img).with_context(|| format!("cannot write {}", path.display()))
}

fn image_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn degrade(args: &DegradeArgs) -> Result<()> {
    let clean = read(&args.input)?;
    let h = args.kernel.build()?;
    let blurred = blur(&clean, &h)?;
    let (noisy, counts) = add_salt_pepper_counted(&blurred, &NoiseSpec::new(args.noise, args.seed)?)?;
    write(&args.output, &noisy)?;
    println!("fraction={}", format_sig6(counts.fraction()));
    println!("salt={}", counts.salt);
    println!("pepper={}", counts.pepper);
    Ok(())
}

pub fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let reference = read(&args.reference)?;
    let test = read(&args.test)?;
    println!("{}", QualityReport::compute(&reference, &test)?);
    Ok(())
}

/// Fills in `(mu, p)` from the noise schedule where not given explicitly.
fn resolve_params(mu: Option<f64>, p: Option<f64>, noise: Option<f64>) -> Result<(f64, f64)> {
    match (mu, p) {
        (Some(mu), Some(p)) => Ok((mu, p)),
        _ => {
            let Some(level) = noise else {
                bail!("--noise is required when --mu or --p is omitted");
            };
            let (dmu, dp) = default_params(level)?;
            Ok((mu.unwrap_or(dmu), p.unwrap_or(dp)))
        }
    }
}

fn solver_config(solve: &SolveArgs, mu: f64, p: f64, group_size: usize) -> Result<SolverConfig> {
    let cfg = SolverConfig {
        mu,
        p,
        group: GroupConfig::new(group_size)?,
        tol: solve.tol,
        max_iter: solve.max_iter,
        accelerate: solve.method == Method::FastAdmm,
        ..SolverConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn restore(
    g: &Image,
    h: &Kernel,
    cfg: &SolverConfig,
    reference: Option<&Image>,
    timing: bool,
) -> Result<(Image, Option<Outcome>)> {
    let start = Instant::now();
    let (f, report) = solve(g, h, cfg)?;
    let elapsed = start.elapsed().as_secs_f64();
    let outcome = match reference {
        Some(r) => {
            let q = QualityReport::compute(r, &f)?;
            Some(Outcome {
                iterations: report.iterations,
                psnr_db: q.psnr_db,
                ssim: q.ssim,
                re: q.re,
                wall_time_s: timing.then_some(elapsed),
            })
        }
        None => None,
    };
    println!("iterations={}", report.iterations);
    println!("converged={}", report.converged);
    Ok((f, outcome))
}

pub fn deblur(args: &DeblurArgs) -> Result<()> {
    let g = read(&args.input)?;
    let reference = args.reference.as_deref().map(read).transpose()?;
    if let Some(r) = &reference {
        if r.dims() != g.dims() {
            bail!(
                "reference is {:?} but the observation is {:?}",
                r.dims(),
                g.dims()
            );
        }
    }
    let h = args.kernel.build()?;
    let (mu, p) = resolve_params(args.mu, args.p, args.noise)?;
    let cfg = solver_config(&args.solve, mu, p, args.group_size)?;
    let (f, outcome) = restore(&g, &h, &cfg, reference.as_ref(), args.solve.timing)?;
    write(&args.output, &f)?;
    if let Some(o) = &outcome {
        println!("psnr={}", format_sig6(o.psnr_db));
        println!("ssim={}", format_sig6(o.ssim));
        println!("re={}", format_sig6(o.re));
    }
    if let (Some(path), Some(o)) = (&args.metrics_csv, outcome) {
        let rec = RunRecord {
            image_id: args.image_id.clone().unwrap_or_else(|| image_id(&args.input)),
            kernel_spec: args.kernel.to_string(),
            noise_level: args.noise,
            seed: args.seed,
            method: args.solve.method.name(),
            p,
            mu,
            group_size: args.group_size,
            outcome: Ok(o),
        };
        record::append(path, &rec)?;
    }
    Ok(())
}

struct Job<'a> {
    id: &'a str,
    clean: &'a Image,
    noise: f64,
    seed: u64,
    mu: f64,
    p: f64,
    group_size: usize,
}

/// Degrades `clean` exactly as `degrade` would (including 8-bit storage) and restores it.
fn run_job(job: &Job, h: &Kernel, solve_args: &SolveArgs) -> Result<Outcome> {
    let blurred = blur(job.clean, h)?;
    let (noisy, _) = add_salt_pepper_counted(&blurred, &NoiseSpec::new(job.noise, job.seed)?)?;
    let g = pgm::quantize(&noisy);
    let cfg = solver_config(solve_args, job.mu, job.p, job.group_size)?;
    let start = Instant::now();
    let (f, report) = solve(&g, h, &cfg)?;
    let elapsed = start.elapsed().as_secs_f64();
    let q = QualityReport::compute(job.clean, &f)?;
    Ok(Outcome {
        iterations: report.iterations,
        psnr_db: q.psnr_db,
        ssim: q.ssim,
        re: q.re,
        wall_time_s: solve_args.timing.then_some(elapsed),
    })
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let h = args.kernel.build()?;
    let images: Vec<(String, Image)> = args
        .clean
        .iter()
        .map(|p| Ok((image_id(p), read(p)?)))
        .collect::<Result<_>>()?;
    for level in &args.noise {
        NoiseSpec::new(*level, 0)?;
    }

    let mut jobs = Vec::new();
    for (id, clean) in &images {
        for &noise in &args.noise {
            let mus = if args.mu.is_empty() {
                vec![None]
            } else {
                args.mu.iter().map(|m| Some(*m)).collect()
            };
            let ps = if args.p.is_empty() {
                vec![None]
            } else {
                args.p.iter().map(|p| Some(*p)).collect()
            };
            for &mu in &mus {
                for &p in &ps {
                    let (mu, p) = resolve_params(mu, p, Some(noise))?;
                    for &group_size in &args.group_size {
                        for &seed in &args.seeds {
                            jobs.push(Job {
                                id,
                                clean,
                                noise,
                                seed,
                                mu,
                                p,
                                group_size,
                            });
                        }
                    }
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.jobs).build()?;
    let method = args.solve.method.name();
    let kernel_spec = args.kernel.to_string();
    let mut records: Vec<RunRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|job| RunRecord {
                image_id: job.id.to_string(),
                kernel_spec: kernel_spec.clone(),
                noise_level: Some(job.noise),
                seed: Some(job.seed),
                method,
                p: job.p,
                mu: job.mu,
                group_size: job.group_size,
                outcome: run_job(job, &h, &args.solve).map_err(|e| format!("{e:#}")),
            })
            .collect()
    });
    records.sort_by(|a, b| {
        a.image_id
            .cmp(&b.image_id)
            .then(
                a.noise_level
                    .unwrap_or(0.0)
                    .total_cmp(&b.noise_level.unwrap_or(0.0)),
            )
            .then(a.mu.total_cmp(&b.mu))
            .then(a.p.total_cmp(&b.p))
            .then(a.group_size.cmp(&b.group_size))
            .then(a.seed.cmp(&b.seed))
    });
    record::write_all(&args.output, &records)?;

    let failed = records.iter().filter(|r| r.outcome.is_err()).count();
    println!("runs={}", records.len());
    println!("failed={failed}");
    if failed == records.len() {
        bail!("every run failed");
    }
    Ok(())
}
