//! Command-line front door: compute, verify, tabulate, sample, and report,
//! emitting CSV or JSON lines. Exit codes: 0 pass, 1 usage error, 2
//! verification failure.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use zmeasures::density::{
    laplace_identity_residual, rho1, sigma_n_moment, MomentRoute, MomentSpec, Rho1Method,
};
use zmeasures::ewens_pd::{
    default_pd_truncation, ewens_weight, sample_ewens_with, sample_pd_with, sigma_t_n_moment,
    verify_kingman_coherence, EwensMomentRoute, EwensParams,
};
use zmeasures::partitions::partitions_of;
use zmeasures::sampling::{sample_partition_with, RngSeed};
use zmeasures::scalar::Scalar;
use zmeasures::zmeasure::{
    format_rational, parse_complex, parse_rational, verify_coherence, weight, WeightMethod,
    ZParams,
};

#[derive(Parser)]
#[command(
    name = "zm",
    version,
    about = "z-measures on the Young graph: weights, coherence, moments, densities, samplers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Params {
    /// Parameter z: rational "p/q" or complex "a+bi"
    #[arg(long)]
    z: Option<String>,
    /// Parameter z': rational "p/q" or complex "a+bi"
    #[arg(long)]
    zp: Option<String>,
    /// Ewens parameter t > 0 (selects the Kingman-graph theory)
    #[arg(long)]
    t: Option<String>,
    /// Force "complex" evaluation even for rational parameters
    #[arg(long)]
    mode: Option<String>,
    /// Output path (defaults to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tolerance override for verification subcommands
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Table of M(lambda) for all lambda of size n
    Weights {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        n: u64,
    },
    /// Coherence verification (Young graph for --z/--zp, Kingman for --t)
    Coherence {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        n: u64,
    },
    /// Controlling-measure moment tables, both routes
    Moments {
        #[command(flatten)]
        params: Params,
        /// Comma-separated exponents l_1,...,l_n
        #[arg(long, value_delimiter = ',')]
        l: Vec<u64>,
    },
    /// rho_1 over an x-grid, by one or both methods
    Density {
        #[command(flatten)]
        params: Params,
        /// Grid "lo:hi:step"
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// "lauricella", "integral", or "both"
        #[arg(long, default_value = "both")]
        method: String,
    },
    /// Residuals of the Laplace-transform identity over a real zeta grid
    LaplaceCheck {
        #[command(flatten)]
        params: Params,
        /// zeta grid "lo:hi:step"
        #[arg(long, default_value = "-1:1:0.5", allow_hyphen_values = true)]
        grid: String,
    },
    /// Draw partitions (z-measure or Ewens) or PD points (--t without --n)
    Sample {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Empirical sampler frequencies vs exact weights, with stderr columns
    Compare {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap's own exit code for usage errors is 2; the contract here
            // reserves 2 for verification failures.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// Evaluation mode resolved from the parameter flags.
enum Mode {
    Exact(ZParams<num_rational::BigRational>),
    Complex(ZParams<Complex64>),
}

fn resolve_z_params(p: &Params) -> Result<Mode, String> {
    let z = p.z.as_deref().ok_or("--z is required")?;
    let zp = p.zp.as_deref().ok_or("--zp is required")?;
    let force_complex = matches!(p.mode.as_deref(), Some("complex"));
    if !force_complex {
        if let (Some(a), Some(b)) = (parse_rational(z), parse_rational(zp)) {
            if let Ok(params) = ZParams::rational(a, b) {
                return Ok(Mode::Exact(params));
            }
        }
    }
    let a = parse_complex(z).ok_or_else(|| format!("cannot parse --z {z:?}"))?;
    let b = parse_complex(zp).ok_or_else(|| format!("cannot parse --zp {zp:?}"))?;
    ZParams::complex(a, b).map(Mode::Complex).map_err(|e| e.to_string())
}

fn complex_params(p: &Params) -> Result<ZParams<Complex64>, String> {
    match resolve_z_params(p)? {
        Mode::Exact(params) => Ok(params.to_complex()),
        Mode::Complex(params) => Ok(params),
    }
}

fn ewens_t(p: &Params) -> Result<f64, String> {
    let t = p.t.as_deref().ok_or("--t is required")?;
    let v = parse_rational(t)
        .map(|r| r.approx_f64())
        .or_else(|| t.parse::<f64>().ok())
        .ok_or_else(|| format!("cannot parse --t {t:?}"))?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("--t must be positive, got {v}"))
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid {s:?} is not lo:hi:step"));
    }
    let lo: f64 = parts[0].parse().map_err(|_| format!("bad grid lo {:?}", parts[0]))?;
    let hi: f64 = parts[1].parse().map_err(|_| format!("bad grid hi {:?}", parts[1]))?;
    let step: f64 = parts[2]
        .parse()
        .map_err(|_| format!("bad grid step {:?}", parts[2]))?;
    if step <= 0.0 || hi < lo {
        return Err(format!("grid {s:?} must have step > 0 and hi >= lo"));
    }
    let mut out = Vec::new();
    let count = ((hi - lo) / step).round() as usize;
    for k in 0..=count {
        let x = lo + k as f64 * step;
        if x <= hi + 1e-12 {
            out.push(x);
        }
    }
    Ok(out)
}

/// Artifact writer: a CSV body prefixed by a comment line embedding the
/// run configuration and toolkit version, or JSON with the same fields.
struct Output {
    dest: Option<PathBuf>,
    buf: String,
}

impl Output {
    fn new(dest: Option<PathBuf>, config: serde_json::Value) -> Self {
        let header = json!({
            "tool": "zm",
            "version": env!("CARGO_PKG_VERSION"),
            "config": config,
        });
        Output {
            dest,
            buf: format!("# {header}\n"),
        }
    }

    fn line(&mut self, s: &str) {
        self.buf.push_str(s);
        self.buf.push('\n');
    }

    fn finish(self) -> Result<(), String> {
        match self.dest {
            Some(path) => std::fs::write(&path, self.buf)
                .map_err(|e| format!("cannot write {}: {e}", path.display())),
            None => {
                print!("{}", self.buf);
                std::io::stdout().flush().ok();
                Ok(())
            }
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Weights { params, n } => cmd_weights(&params, n),
        Command::Coherence { params, n } => cmd_coherence(&params, n),
        Command::Moments { params, l } => cmd_moments(&params, &l),
        Command::Density {
            params,
            grid,
            method,
        } => cmd_density(&params, &grid, &method),
        Command::LaplaceCheck { params, grid } => cmd_laplace(&params, &grid),
        Command::Sample {
            params,
            n,
            samples,
            seed,
        } => cmd_sample(&params, n, samples, seed),
        Command::Compare {
            params,
            n,
            samples,
            seed,
        } => cmd_compare(&params, n, samples, seed),
    }
}

fn cmd_weights(p: &Params, n: u64) -> Result<bool, String> {
    let config = json!({"command": "weights", "z": p.z, "zp": p.zp, "t": p.t, "n": n, "mode": p.mode});
    let mut out = Output::new(p.out.clone(), config);
    out.line("partition,weight");
    let pass;
    if p.t.is_some() {
        let t = ewens_t(p)?;
        let params = EwensParams::new(Complex64::new(t, 0.0)).map_err(|e| e.to_string())?;
        let mut total = 0.0;
        for lam in partitions_of(n) {
            let w = ewens_weight(&lam, &params).re;
            total += w;
            out.line(&format!("\"{:?}\",{w:.17e}", lam.parts()));
        }
        out.line(&format!("\"total\",{total:.17e}"));
        pass = (total - 1.0).abs() <= p.tol.unwrap_or(1e-10);
    } else {
        match resolve_z_params(p)? {
            Mode::Exact(params) => {
                let mut total = num_rational::BigRational::from_integer(0.into());
                for lam in partitions_of(n) {
                    let w = weight(&lam, &params, WeightMethod::Boxes);
                    total += w.clone();
                    out.line(&format!("\"{:?}\",{}", lam.parts(), format_rational(&w)));
                }
                out.line(&format!("\"total\",{}", format_rational(&total)));
                pass = total == num_rational::BigRational::from_integer(1.into());
            }
            Mode::Complex(params) => {
                let mut total = Complex64::new(0.0, 0.0);
                for lam in partitions_of(n) {
                    let w = weight(&lam, &params, WeightMethod::Boxes);
                    total += w;
                    out.line(&format!("\"{:?}\",{}", lam.parts(), w));
                }
                out.line(&format!("\"total\",{total}"));
                pass = (total - Complex64::new(1.0, 0.0)).norm() <= p.tol.unwrap_or(1e-10);
            }
        }
    }
    out.finish()?;
    Ok(pass)
}

fn cmd_coherence(p: &Params, n: u64) -> Result<bool, String> {
    let config = json!({"command": "coherence", "z": p.z, "zp": p.zp, "t": p.t, "n": n, "tol": p.tol});
    let tol = p.tol.unwrap_or(1e-10);
    let report = if p.t.is_some() {
        let t = ewens_t(p)?;
        let params = EwensParams::new(Complex64::new(t, 0.0)).map_err(|e| e.to_string())?;
        verify_kingman_coherence(n, &params, tol)
    } else {
        match resolve_z_params(p)? {
            Mode::Exact(params) => verify_coherence(n, &params, tol),
            Mode::Complex(params) => verify_coherence(n, &params, tol),
        }
    };
    let mut out = Output::new(p.out.clone(), config);
    out.line(&serde_json::to_string(&report).map_err(|e| e.to_string())?);
    out.finish()?;
    Ok(report.pass)
}

fn cmd_moments(p: &Params, l: &[u64]) -> Result<bool, String> {
    if l.is_empty() {
        return Err("--l needs at least one exponent".into());
    }
    let config = json!({"command": "moments", "z": p.z, "zp": p.zp, "t": p.t, "l": l});
    let spec = MomentSpec::new(l.to_vec()).map_err(|e| e.to_string())?;
    let mut out = Output::new(p.out.clone(), config);
    out.line("route,value");
    let pass;
    if p.t.is_some() {
        let t = ewens_t(p)?;
        let params = EwensParams::new(Complex64::new(t, 0.0)).map_err(|e| e.to_string())?;
        let a = sigma_t_n_moment(&spec, &params, EwensMomentRoute::CoefficientSum)
            .map_err(|e| e.to_string())?;
        let b = sigma_t_n_moment(&spec, &params, EwensMomentRoute::ComponentSum)
            .map_err(|e| e.to_string())?;
        out.line(&format!("coefficient_sum,{a}"));
        out.line(&format!("component_sum,{b}"));
        pass = (a - b).norm() <= p.tol.unwrap_or(1e-10) * (1.0 + a.norm());
    } else {
        match resolve_z_params(p)? {
            Mode::Exact(params) => {
                let a = sigma_n_moment(&spec, &params, MomentRoute::FrobeniusSum)
                    .map_err(|e| e.to_string())?;
                let b = sigma_n_moment(&spec, &params, MomentRoute::CharacterSum)
                    .map_err(|e| e.to_string())?;
                out.line(&format!("frobenius_sum,{}", format_rational(&a)));
                out.line(&format!("character_sum,{}", format_rational(&b)));
                pass = a == b;
            }
            Mode::Complex(params) => {
                let a = sigma_n_moment(&spec, &params, MomentRoute::FrobeniusSum)
                    .map_err(|e| e.to_string())?;
                let b = sigma_n_moment(&spec, &params, MomentRoute::CharacterSum)
                    .map_err(|e| e.to_string())?;
                out.line(&format!("frobenius_sum,{a}"));
                out.line(&format!("character_sum,{b}"));
                pass = (a - b).norm() <= p.tol.unwrap_or(1e-10) * (1.0 + a.norm());
            }
        }
    }
    out.finish()?;
    Ok(pass)
}

fn cmd_density(p: &Params, grid: &str, method: &str) -> Result<bool, String> {
    let params = complex_params(p)?;
    let xs = parse_grid(grid)?;
    let tol = p.tol.unwrap_or(1e-6);
    let config = json!({"command": "density", "z": p.z, "zp": p.zp, "grid": grid, "method": method, "tol": tol});
    let mut out = Output::new(p.out.clone(), config);
    let mut pass = true;
    match method {
        "both" => {
            out.line("x,lauricella,integral,disagreement");
            for &x in &xs {
                let a = rho1(x, &params, Rho1Method::Lauricella, tol * 1e-2)
                    .map_err(|e| e.to_string())?;
                let b = rho1(x, &params, Rho1Method::Integral, tol * 1e-2)
                    .map_err(|e| e.to_string())?;
                let gap = (a.value - b.value).abs() / (1.0 + a.value.abs());
                if gap > tol {
                    pass = false;
                }
                out.line(&format!("{x},{:.17e},{:.17e},{gap:.3e}", a.value, b.value));
            }
        }
        "lauricella" | "integral" => {
            let m = if method == "lauricella" {
                Rho1Method::Lauricella
            } else {
                Rho1Method::Integral
            };
            out.line("x,rho1,tol_achieved");
            for &x in &xs {
                let a = rho1(x, &params, m, tol * 1e-2).map_err(|e| e.to_string())?;
                out.line(&format!("{x},{:.17e},{:.3e}", a.value, a.tol_achieved));
            }
        }
        other => return Err(format!("unknown method {other:?}")),
    }
    out.finish()?;
    Ok(pass)
}

fn cmd_laplace(p: &Params, grid: &str) -> Result<bool, String> {
    let params = complex_params(p)?;
    let zetas = parse_grid(grid)?;
    let tol = p.tol.unwrap_or(1e-5);
    let config = json!({"command": "laplace-check", "z": p.z, "zp": p.zp, "grid": grid, "tol": tol});
    let mut out = Output::new(p.out.clone(), config);
    out.line("zeta,lhs,rhs,residual,factorization_gap");
    let mut pass = true;
    for &zr in &zetas {
        let zeta = Complex64::new(zr, 0.0);
        let check =
            laplace_identity_residual(zeta, &params, tol * 1e-1).map_err(|e| e.to_string())?;
        if check.residual > tol || check.factorization_gap > 1e-10 {
            pass = false;
        }
        out.line(&format!(
            "{zr},{},{},{:.3e},{:.3e}",
            check.lhs, check.rhs_first, check.residual, check.factorization_gap
        ));
    }
    out.finish()?;
    Ok(pass)
}

fn cmd_sample(p: &Params, n: Option<u64>, samples: usize, seed: u64) -> Result<bool, String> {
    let config = json!({"command": "sample", "z": p.z, "zp": p.zp, "t": p.t, "n": n, "samples": samples, "seed": seed});
    let mut out = Output::new(p.out.clone(), config);
    let mut rng = RngSeed(seed).rng();
    if let Some(t_str) = &p.t {
        let _ = t_str;
        let t = ewens_t(p)?;
        match n {
            Some(n) => {
                for _ in 0..samples {
                    let lam = sample_ewens_with(n, t, &mut rng).map_err(|e| e.to_string())?;
                    out.line(&serde_json::to_string(&json!({"partition": lam.parts()})).unwrap());
                }
            }
            None => {
                let trunc = default_pd_truncation(t);
                for _ in 0..samples {
                    let omega = sample_pd_with(t, trunc, &mut rng).map_err(|e| e.to_string())?;
                    out.line(
                        &serde_json::to_string(&json!({
                            "alpha": omega.alpha,
                            "residual": omega.gamma,
                        }))
                        .unwrap(),
                    );
                }
            }
        }
    } else {
        let params = complex_params(p)?;
        let n = n.ok_or("--n is required for z-measure sampling")?;
        for _ in 0..samples {
            let lam = sample_partition_with(n, &params, &mut rng);
            out.line(&serde_json::to_string(&json!({"partition": lam.parts()})).unwrap());
        }
    }
    out.finish()?;
    Ok(true)
}

fn cmd_compare(p: &Params, n: u64, samples: usize, seed: u64) -> Result<bool, String> {
    let config = json!({"command": "compare", "z": p.z, "zp": p.zp, "t": p.t, "n": n, "samples": samples, "seed": seed});
    let mut out = Output::new(p.out.clone(), config);
    out.line("partition,exact,empirical,stderr,sigmas");
    let mut rng = RngSeed(seed).rng();
    let mut counts: std::collections::HashMap<Vec<u64>, usize> = std::collections::HashMap::new();
    let exact: Vec<(Vec<u64>, f64)> = if p.t.is_some() {
        let t = ewens_t(p)?;
        let params = EwensParams::new(Complex64::new(t, 0.0)).map_err(|e| e.to_string())?;
        for _ in 0..samples {
            let lam = sample_ewens_with(n, t, &mut rng).map_err(|e| e.to_string())?;
            *counts.entry(lam.parts().to_vec()).or_insert(0) += 1;
        }
        partitions_of(n)
            .iter()
            .map(|lam| (lam.parts().to_vec(), ewens_weight(lam, &params).re))
            .collect()
    } else {
        let params = complex_params(p)?;
        for _ in 0..samples {
            let lam = sample_partition_with(n, &params, &mut rng);
            *counts.entry(lam.parts().to_vec()).or_insert(0) += 1;
        }
        partitions_of(n)
            .iter()
            .map(|lam| {
                (
                    lam.parts().to_vec(),
                    weight(lam, &params, WeightMethod::Boxes).re,
                )
            })
            .collect()
    };
    let mut pass = true;
    for (parts, prob) in exact {
        let freq = *counts.get(&parts).unwrap_or(&0) as f64 / samples as f64;
        let stderr = (prob * (1.0 - prob) / samples as f64).sqrt();
        let sigmas = if stderr > 0.0 {
            (freq - prob).abs() / stderr
        } else {
            0.0
        };
        // 4 sigma plus a discreteness guard keeps the false-alarm rate
        // negligible across all partitions of n.
        if (freq - prob).abs() > 4.0 * stderr + 2.0 / samples as f64 {
            pass = false;
        }
        out.line(&format!(
            "\"{parts:?}\",{prob:.8e},{freq:.8e},{stderr:.3e},{sigmas:.2}"
        ));
    }
    out.finish()?;
    Ok(pass)
}
