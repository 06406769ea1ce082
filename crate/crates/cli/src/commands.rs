use moment_witness::embed::{
    sample_shallow_net, staircase_decode_weights, staircase_embed, StaircaseParams, TSystem,
};
use moment_witness::graph::{connected_graphs, corpus_csv, corpus_separation_experiment, parse_tudataset};
use moment_witness::linalg::condition_number;
use moment_witness::measure::measures_equal;
use moment_witness::transport::{
    bilipschitz_experiment, instability_probe, jacobian_csv, jacobian_ratio_map, loglog_slope, ratio_records_csv,
    unit_grid,
};
use moment_witness::witness::{
    pwl_counterexample_alphabet, pwl_counterexample_integers, pwl_counterexample_measures, pwl_counterexample_sets,
    verify_separation, CounterexampleKind, DEFAULT_PROBES,
};
use moment_witness::embed::{is_invertible, tsystem_matrix};
use moment_witness::{DiscreteMeasure, Point, Seed};
use rand::Rng;
use serde_json::json;

use crate::config::{default_width, Params, RunConfig};
use crate::{CliError, Output};

pub(crate) fn execute(cfg: &RunConfig) -> Result<Output, CliError> {
    let seed = Seed(cfg.seed);
    match &cfg.params {
        Params::Bilipschitz(bl) => {
            let records = bilipschitz_experiment(bl)?;
            Ok(Output {
                body: ratio_records_csv(&records),
                summary: json!({ "records": records.len() }),
            })
        }
        Params::SeparationCorpus {
            dataset_dir,
            dataset_name,
            max_nodes,
            experiment,
        } => {
            let graphs = match dataset_dir {
                Some(dir) => parse_tudataset(dir, dataset_name.as_deref())?,
                None => connected_graphs(*max_nodes)?,
            };
            let rows = corpus_separation_experiment(&graphs, experiment)?;
            let failures: usize = rows.iter().map(|r| r.failures).sum();
            Ok(Output {
                body: corpus_csv(&rows),
                summary: json!({ "graphs": graphs.len(), "failures": failures }),
            })
        }
        Params::Counterexample {
            kind,
            activation,
            width,
            d,
            split,
            alphabet_size,
        } => {
            let net = sample_shallow_net(*width, *d, *activation, seed, 1.0)?;
            let pair = match kind {
                CounterexampleKind::SetSplit => pwl_counterexample_sets(&net, seed.child(1))?,
                CounterexampleKind::AffineDependence => pwl_counterexample_measures(&net, seed.child(1), *split)?,
                CounterexampleKind::IntegerShift => pwl_counterexample_integers(&net)?,
                CounterexampleKind::Pigeonhole => {
                    let s = *alphabet_size;
                    let alphabet: Vec<f64> = (0..s).map(|i| -1.0 + 2.0 * i as f64 / (s - 1) as f64).collect();
                    pwl_counterexample_alphabet(&net, &alphabet)?
                }
            };
            let summary = json!({
                "measures_equal": measures_equal(&pair.m1, &pair.m2)?,
                "gap_bound": pair.kind.gap_bound() * pair.embedding_scale,
                "region_verified": pair.verify_region(&net, DEFAULT_PROBES, seed.child(2)),
                "net": net.to_text(),
            });
            Ok(Output {
                body: pair.to_json_line() + "\n",
                summary,
            })
        }
        Params::JacobianMap { activation, width, grid } => {
            let net = sample_shallow_net(*width, 1, *activation, seed, 1.0)?;
            let points = unit_grid(*grid);
            let ratios = jacobian_ratio_map(&net, &points)?;
            let zeros = ratios.iter().filter(|&&r| r == 0.0).count();
            Ok(Output {
                body: jacobian_csv(&points, &ratios),
                summary: json!({ "points": points.len(), "exact_zeros": zeros, "net": net.to_text() }),
            })
        }
        Params::Instability {
            activation,
            width,
            x0,
            eps_list,
        } => {
            let net = sample_shallow_net(*width, 1, *activation, seed, 1.0)?;
            let x0 = Point::scalar(*x0)?;
            let out = instability_probe(&net, &x0, &Point::scalar(1.0)?, eps_list)?;
            let mut body = String::from("eps,ratio\n");
            for (e, r) in &out {
                body.push_str(&format!("{e},{r}\n"));
            }
            Ok(Output {
                body,
                summary: json!({ "loglog_slope": loglog_slope(&out), "net": net.to_text() }),
            })
        }
        Params::TsystemCheck { draws, k, half_range } => {
            let mut rng = seed.rng();
            let mut body = String::from("draw,condition,invertible\n");
            let mut invertible = 0;
            for draw in 0..*draws {
                let shifts = distinct_uniform(&mut rng, *k, *half_range);
                let xs = distinct_uniform(&mut rng, *k, *half_range);
                let m = tsystem_matrix(&TSystem::sigmoid_shift(shifts)?, &xs)?;
                let ok = is_invertible(&m);
                invertible += ok as usize;
                body.push_str(&format!("{draw},{},{ok}\n", condition_number(&m)));
            }
            Ok(Output {
                body,
                summary: json!({ "draws": draws, "invertible": invertible }),
            })
        }
        Params::StaircaseRoundtrip {
            draws,
            alphabet_sizes,
            max_weight,
        } => {
            let mut rng = seed.rng();
            let mut body = String::from("alphabet_size,draw,max_abs_error\n");
            let mut worst = 0.0f64;
            for &s in alphabet_sizes {
                for draw in 0..*draws {
                    // Unit-spaced letters with jitter keep every gap at least 1/2.
                    let alphabet: Vec<f64> = (0..s).map(|j| j as f64 + rng.random_range(-0.25..0.25)).collect();
                    let weights: Vec<f64> = (0..s).map(|_| rng.random_range(-max_weight..=*max_weight) as f64).collect();
                    let p = StaircaseParams::with_midpoints(alphabet.clone())?;
                    let atoms: Vec<(f64, f64)> = alphabet.iter().copied().zip(weights.iter().copied()).collect();
                    let m = DiscreteMeasure::from_scalar_atoms(&atoms)?;
                    let decoded = staircase_decode_weights(&staircase_embed(&m, &p)?, &p)?;
                    let err = decoded.iter().zip(&weights).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    worst = worst.max(err);
                    body.push_str(&format!("{s},{draw},{err}\n"));
                }
            }
            Ok(Output {
                body,
                summary: json!({ "max_abs_error": worst }),
            })
        }
        Params::WitnessVerify {
            measure1,
            measure2,
            activation,
            width,
            trials,
            tolerance,
        } => {
            let (m1, m2) = (DiscreteMeasure::read(measure1)?, DiscreteMeasure::read(measure2)?);
            let width = width.unwrap_or_else(|| default_width(m1.len().max(m2.len()).max(1), m1.dim()));
            let report = verify_separation(&m1, &m2, *activation, width, *trials, seed, *tolerance)?;
            Ok(Output {
                body: report.to_json_line() + "\n",
                summary: json!({ "separated": report.separated, "width": width }),
            })
        }
    }
}

/// Sorted, pairwise-distinct draws from `U[−h, h]`.
fn distinct_uniform(rng: &mut impl Rng, k: usize, h: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..k).map(|_| rng.random_range(-h..=h)).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[0] < w[1]) {
            return v;
        }
    }
}
