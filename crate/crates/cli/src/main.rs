//! Batch CLI over the boundary-pair library: validation, Weyl evaluation,
//! kernels, negative squares, extensions, resolvents, generalized
//! coresolvents, realization and the acceptance suite.
//!
//! All inputs and reports are JSON with complex scalars as [re, im]. Exit
//! codes: 0 success, 1 usage or parse errors, 2 validation failure. The
//! KREIN_WEYL_TOL environment variable scales every residual tolerance and
//! is recorded in the report header.

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use krein_core::boundary::BoundaryPair;
use krein_core::extensions::{
    build_extension, coresolvent, direct_resolvent_oracle, resolvent, spectral_point_check,
};
use krein_core::gencores::{
    compression_oracle, couple, generalized_coresolvent, regularity_index, shtraus_parameter,
};
use krein_core::json::*;
use krein_core::kernels::{
    classify_pair, kernel_gamma_identities_residual, negative_squares, schur_kernel, SamplerConfig,
};
use krein_core::linalg::{max_abs, CMatrix, C64};
use krein_core::realize::realize;
use krein_core::suite::{run_all, SuiteConfig};
use serde::Serialize;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "krein",
    about = "Extension theory of isometric operators in Pontryagin spaces",
    version
)]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a colligation, boundary pair or relation file.
    Validate {
        /// Input JSON: {"colligation": ...} | {"pair": ...} | {"relation": ...}
        #[arg(long)]
        input: PathBuf,
    },
    /// Evaluate the Weyl function and gamma-field of a pair at a point.
    Weyl {
        #[arg(long)]
        pair: PathBuf,
        /// Complex point as "re" or "re,im".
        #[arg(long, value_parser = parse_complex)]
        lambda: C64,
    },
    /// Kernel evaluation and the kernel/gamma-field identity residual.
    Kernel {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, value_parser = parse_complex)]
        lambda: C64,
        #[arg(long, value_parser = parse_complex)]
        mu: C64,
    },
    /// Negative-squares estimate of a function given by a pair,
    /// colligation or Taylor data.
    Negsq {
        #[arg(long)]
        theta: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Build the extension selected by a boundary parameter.
    Extend {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        phi: PathBuf,
    },
    /// Resolvent or coresolvent of an extension, with the direct oracle.
    Resolvent {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long, value_parser = parse_complex)]
        lambda: C64,
        /// Evaluate (I - lambda V)^{-1} instead of (V - lambda)^{-1}.
        #[arg(long)]
        co: bool,
    },
    /// Generalized coresolvent of a coupled pair at a point.
    Gencores {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        parameter: PathBuf,
        #[arg(long, value_parser = parse_complex)]
        z: C64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also estimate the regularity index (slower).
        #[arg(long)]
        index: bool,
    },
    /// Realize Taylor data as a colligation-backed pair.
    Realize {
        #[arg(long)]
        input: PathBuf,
    },
    /// Run the acceptance suite.
    Suite {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re] => re
            .trim()
            .parse::<f64>()
            .map(|r| C64::new(r, 0.0))
            .map_err(|e| e.to_string()),
        [re, im] => {
            let r = re.trim().parse::<f64>().map_err(|e| e.to_string())?;
            let i = im.trim().parse::<f64>().map_err(|e| e.to_string())?;
            Ok(C64::new(r, i))
        }
        _ => Err("expected 're' or 're,im'".into()),
    }
}

fn tol_scale() -> f64 {
    std::env::var("KREIN_WEYL_TOL")
        .ok()
        .and_then(|v| v.parse::<f64>().ok())
        .unwrap_or(1.0)
}

#[derive(Serialize)]
struct ReportHeader {
    tool: &'static str,
    version: &'static str,
    tol_scale: f64,
    tolerances: krein_core::tol::Tolerances,
}

fn header() -> ReportHeader {
    ReportHeader {
        tool: "krein",
        version: env!("CARGO_PKG_VERSION"),
        tol_scale: tol_scale(),
        tolerances: krein_core::tol::Tolerances::scaled(tol_scale()),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_pair(path: &Path) -> anyhow::Result<BoundaryPair> {
    let js: PairJson = read_json(path)?;
    js.to_pair().map_err(|e| anyhow!("{e}"))
}

fn complex_json(z: C64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn matrix_json(m: &CMatrix) -> serde_json::Value {
    serde_json::to_value(matrix_to_json(m)).unwrap()
}

/// Outcome of a run: report plus pass/fail (fail maps to exit code 2).
struct Outcome {
    report: serde_json::Value,
    pass: bool,
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let scale = tol_scale();
    match &cli.command {
        Command::Validate { input } => {
            let source: ThetaSourceJson = read_json(input)?;
            if let Some(cjs) = &source.colligation {
                // build without the pass gate so the report carries residuals
                let state = cjs.state.to_space().map_err(|e| anyhow!("{e}"))?;
                let t = matrix_from_json(&cjs.t).map_err(|e| anyhow!("{e}"))?;
                let f = matrix_from_json(&cjs.f).map_err(|e| anyhow!("{e}"))?;
                let g = matrix_from_json(&cjs.g).map_err(|e| anyhow!("{e}"))?;
                let h = matrix_from_json(&cjs.h).map_err(|e| anyhow!("{e}"))?;
                let probe = krein_core::colligation::UnitaryColligation::new(
                    state.clone(),
                    t.clone(),
                    f.clone(),
                    g.clone(),
                    h.clone(),
                );
                match probe {
                    Ok(col) => {
                        let rep = col.validate();
                        Ok(Outcome {
                            report: json!({
                                "header": header(),
                                "kind": "colligation",
                                "pass": rep.pass,
                                "max_residual": rep.max_residual,
                                "identity_residuals": rep.residuals,
                                "closely_connected": col.is_closely_connected(),
                            }),
                            pass: rep.pass,
                        })
                    }
                    Err(e) => Ok(Outcome {
                        report: json!({
                            "header": header(),
                            "kind": "colligation",
                            "pass": false,
                            "error": format!("{e}"),
                        }),
                        pass: false,
                    }),
                }
            } else if let Some(pjs) = &source.pair {
                match pjs.to_pair() {
                    Ok(bp) => {
                        let cls = classify_pair(&bp);
                        Ok(Outcome {
                            report: json!({
                                "header": header(),
                                "kind": "pair",
                                "pass": true,
                                "green_identity_residual": bp.green_identity_residual(),
                                "class": format!("{:?}", cls.class),
                                "mul_gamma_dim": cls.mul_gamma_dim,
                                "ran_gamma_dim": cls.ran_gamma_dim,
                                "mul_v_dim": cls.mul_v_dim,
                                "kappa": bp.kappa(),
                            }),
                            pass: true,
                        })
                    }
                    Err(e) => Ok(Outcome {
                        report: json!({
                            "header": header(),
                            "kind": "pair",
                            "pass": false,
                            "error": format!("{e}"),
                        }),
                        pass: false,
                    }),
                }
            } else {
                let value: serde_json::Value = read_json(input)?;
                let rel_js = value.get("relation").ok_or_else(|| {
                    anyhow!("input must contain 'colligation', 'pair' or 'relation'")
                })?;
                let rel: RelationJson = serde_json::from_value(rel_js.clone())?;
                let rel = rel.to_relation().map_err(|e| anyhow!("{e}"))?;
                let cls = rel.classify();
                Ok(Outcome {
                    report: json!({
                        "header": header(),
                        "kind": "relation",
                        "pass": true,
                        "dim": rel.dim(),
                        "isometric": cls.isometric,
                        "unitary": cls.unitary,
                        "contractive": cls.contractive,
                        "expanding": cls.expanding,
                    }),
                    pass: true,
                })
            }
        }
        Command::Weyl { pair, lambda } => {
            let bp = load_pair(pair)?;
            let ev = bp.weyl(*lambda).map_err(|e| anyhow!("{e}"))?;
            Ok(Outcome {
                report: json!({
                    "header": header(),
                    "lambda": complex_json(*lambda),
                    "branch": format!("{:?}", ev.branch),
                    "theta": matrix_json(&ev.theta),
                    "gamma": matrix_json(&ev.gamma),
                    "residual": ev.residual,
                }),
                pass: true,
            })
        }
        Command::Kernel { pair, lambda, mu } => {
            let bp = load_pair(pair)?;
            let evaluator = |z: C64| bp.theta(z);
            let kernel = schur_kernel(&evaluator, *lambda, *mu).ok();
            let residual =
                kernel_gamma_identities_residual(&bp, *lambda, *mu).map_err(|e| anyhow!("{e}"))?;
            let pass = residual <= 1e-9 * scale;
            Ok(Outcome {
                report: json!({
                    "header": header(),
                    "lambda": complex_json(*lambda),
                    "mu": complex_json(*mu),
                    "kernel": kernel.as_ref().map(matrix_json),
                    "identity_residual": residual,
                    "pass": pass,
                }),
                pass,
            })
        }
        Command::Negsq { theta, seed } => {
            let source: ThetaSourceJson = read_json(theta)?;
            let cfg = SamplerConfig {
                seed: *seed,
                ..SamplerConfig::default()
            };
            let (count, stabilized, points) = if let Some(pjs) = &source.pair {
                let bp = pjs.to_pair().map_err(|e| anyhow!("{e}"))?;
                let l2 = bp.l2();
                let f = |z: C64| bp.theta(z);
                let ns = negative_squares(&f, l2, &cfg).map_err(|e| anyhow!("{e}"))?;
                (ns.count, ns.stabilized, ns.points_used)
            } else if let Some(cjs) = &source.colligation {
                let col = cjs.to_colligation().map_err(|e| anyhow!("{e}"))?;
                let l2 = col.l2();
                let f = |z: C64| col.characteristic_function(z);
                let ns = negative_squares(&f, l2, &cfg).map_err(|e| anyhow!("{e}"))?;
                (ns.count, ns.stabilized, ns.points_used)
            } else if let Some(rjs) = &source.rational {
                let (data, _) = rjs.to_data().map_err(|e| anyhow!("{e}"))?;
                let out = data.out_dim();
                let f = move |z: C64| Ok(data.eval(z));
                let ns = negative_squares(&f, out, &cfg).map_err(|e| anyhow!("{e}"))?;
                (ns.count, ns.stabilized, ns.points_used)
            } else {
                return Err(anyhow!(
                    "theta source must contain 'pair', 'colligation' or 'rational'"
                ));
            };
            Ok(Outcome {
                report: json!({
                    "header": header(),
                    "count": count,
                    "stabilized": stabilized,
                    "samples": points,
                }),
                pass: stabilized,
            })
        }
        Command::Extend { pair, phi } => {
            let bp = load_pair(pair)?;
            let pjs: ParameterJson = read_json(phi)?;
            let param = pjs.to_parameter().map_err(|e| anyhow!("{e}"))?;
            let v = build_extension(&bp, &param).map_err(|e| anyhow!("{e}"))?;
            let cls = v.classify();
            // for ordinary triples the class of the extension mirrors the
            // class of the parameter graph
            let phi_cls = param
                .as_relation(bp.l1(), bp.l2())
                .map(|rel| rel.classify())
                .ok();
            Ok(Outcome {
                report: json!({
                    "header": header(),
                    "extension": RelationJson::from_relation(&v),
                    "dim": v.dim(),
                    "isometric": cls.isometric,
                    "unitary": cls.unitary,
                    "contractive": cls.contractive,
                    "parameter_isometric": phi_cls.map(|c| c.isometric),
                    "parameter_unitary": phi_cls.map(|c| c.unitary),
                    "parameter_contractive": phi_cls.map(|c| c.contractive),
                }),
                pass: true,
            })
        }
        Command::Resolvent {
            pair,
            phi,
            lambda,
            co,
        } => {
            let bp = load_pair(pair)?;
            let pjs: ParameterJson = read_json(phi)?;
            let param = pjs.to_parameter().map_err(|e| anyhow!("{e}"))?;
            let v = build_extension(&bp, &param).map_err(|e| anyhow!("{e}"))?;
            let (value, oracle) = if *co {
                let k = coresolvent(&bp, &param, *lambda).map_err(|e| anyhow!("{e}"))?;
                let d = krein_core::extensions::direct_coresolvent_oracle(&v, *lambda);
                (k, d)
            } else {
                let r = resolvent(&bp, &param, *lambda).map_err(|e| anyhow!("{e}"))?;
                let d = direct_resolvent_oracle(&v, *lambda);
                (r, d)
            };
            let spectral = spectral_point_check(&bp, &param, *lambda).ok();
            let residual = oracle
                .matrix()
                .map(|m| max_abs(&(&value - m)) / max_abs(m).max(1.0));
            let pass = residual.is_some_and(|r| r <= 1e-8 * scale);
            Ok(Outcome {
                report: json!({
                    "header": header(),
                    "lambda": complex_json(*lambda),
                    "coresolvent": *co,
                    "value": matrix_json(&value),
                    "oracle_invertible": oracle.matrix().is_some(),
                    "residual_vs_oracle": residual,
                    "implies_eigenvalue": spectral.map(|s| s.implies_eigenvalue),
                    "pencil_invertible": spectral.map(|s| s.pencil_invertible),
                    "pass": pass,
                }),
                pass,
            })
        }
        Command::Gencores {
            base,
            parameter,
            z,
            seed,
            index,
        } => {
            let base_bp = load_pair(base)?;
            let par_bp = load_pair(parameter)?;
            let cp = couple(&base_bp, &par_bp).map_err(|e| anyhow!("{e}"))?;
            let k = generalized_coresolvent(&cp, *z).map_err(|e| anyhow!("{e}"))?;
            let compression = compression_oracle(&cp, *z).ok();
            let residual = compression
                .as_ref()
                .map(|m| max_abs(&(&k - m)) / max_abs(m).max(1.0));
            let reg = if *index {
                let cfg = SamplerConfig {
                    seed: *seed,
                    initial_points: 4,
                    max_points: 16,
                    expected: Some(cp.index_excess()),
                    ..SamplerConfig::default()
                };
                regularity_index(&cp, &cfg).ok()
            } else {
                None
            };
            let shtraus = shtraus_parameter(&cp, *z).ok();
            let pass = residual.is_some_and(|r| r <= 1e-8 * scale);
            Ok(Outcome {
                report: json!({
                    "header": header(),
                    "z": complex_json(*z),
                    "K_z": matrix_json(&k),
                    "residual_vs_compression": residual,
                    "regularity_index": reg.as_ref().map(|r| json!({
                        "count": r.count,
                        "stabilized": r.stabilized,
                    })),
                    "index_excess": cp.index_excess(),
                    "shtraus_weyl_match": shtraus.as_ref().and_then(|s| s.weyl_match_residual),
                    "shtraus_frozen_residual": shtraus.as_ref().map(|s| s.frozen_coresolvent_residual),
                    "pass": pass,
                }),
                pass,
            })
        }
        Command::Realize { input } => {
            let rjs: RealizeInputJson = read_json(input)?;
            let (data, alpha) = rjs.to_data().map_err(|e| anyhow!("{e}"))?;
            let (pair, kappa) = realize(&data, alpha).map_err(|e| anyhow!("{e}"))?;
            let col = match pair.backing() {
                krein_core::boundary::Backing::Colligation(c) => {
                    Some(ColligationJson::from_colligation(c))
                }
                krein_core::boundary::Backing::Direct => None,
            };
            Ok(Outcome {
                report: json!({
                    "header": header(),
                    "kappa": kappa,
                    "colligation": col,
                    "pair": PairJson::from_pair(&pair),
                }),
                pass: true,
            })
        }
        Command::Suite { seed } => {
            let cfg = SuiteConfig {
                seed: *seed,
                tol_scale: scale,
            };
            let reports = run_all(&cfg);
            for r in &reports {
                eprintln!("{}", r.line());
            }
            let pass = reports.iter().all(|r| r.passed);
            Ok(Outcome {
                report: json!({
                    "header": header(),
                    "seed": seed,
                    "criteria": reports.iter().map(|r| json!({
                        "id": r.id,
                        "name": r.name,
                        "passed": r.passed,
                        "details": r.details,
                    })).collect::<Vec<_>>(),
                    "pass": pass,
                }),
                pass,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => println!("{text}"),
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
