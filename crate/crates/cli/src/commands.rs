use std::path::Path;

use multalg::geometry::{MetricSpace, SampledFunction};
use multalg::hardy_pick::{ardy_multiplier_check, detect_mo, pick_feasible, pick_min_norm, separability_probe};
use multalg::kernels::{psd_check, EuclideanPointSet};
use multalg::multipliers::{
    contraction_check, kl_monotonicity_report, sampled_mult_norm, von_neumann_check, NormMethod,
};
use multalg::realization::{ModelSpec, RealizationModel, DEFAULT_RANK_TOL};
use multalg::scalar::{exact, Field};
use multalg::{BigRational, Complex, Kernel, Pick, Symbol, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::failure::{Failure, Outcome};
use crate::input::{complex_list, Inputs, MatrixInput, Scalar};
use crate::{Command, Global, ModelArgs, Run};

const PSD_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-9;
const DETECT_TOL: f64 = 1e-8;

fn value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report values serialize")
}

fn sample(inputs: &mut Inputs, path: &Path, g: &Global) -> Outcome<EuclideanPointSet<f64>> {
    let s = inputs.sample(path)?;
    Ok(match g.max_points {
        Some(n) if n < s.len() => s.subset(&(0..n).collect::<Vec<_>>()),
        _ => s,
    })
}

pub fn dispatch(cmd: &Command, g: &Global, inputs: &mut Inputs) -> Outcome<Run> {
    let tol = |default: f64| g.tol.unwrap_or(default);
    let run = |parameters: Value, result: Value| Ok(Run { parameters, result });
    match cmd {
        Command::PsdCheck { matrix } => {
            let m = inputs.file::<MatrixInput>("matrix", matrix)?.into_matrix()?;
            let t = tol(PSD_TOL);
            run(json!({ "tolerance": t }), value(&psd_check(&m, t)?))
        }
        Command::Gram {
            kernel,
            sample: sp,
            psd,
        } => {
            let k: Kernel = inputs.file("kernel", kernel)?;
            let s = sample(inputs, sp, g)?;
            let gram = k.gram(&s)?;
            let mut result = json!({ "gram": value(&gram) });
            let mut params = json!({});
            if *psd {
                let t = tol(PSD_TOL);
                result["psd"] = value(&gram.psd_check(t)?);
                params["tolerance"] = json!(t);
            }
            run(params, result)
        }
        Command::MultNorm {
            kernel,
            kernel_e,
            symbol,
            sample: sp,
        } => {
            let k_f: Kernel = inputs.file("kernel", kernel)?;
            let k_e: Kernel = match kernel_e {
                Some(p) => inputs.file("kernel_e", p)?,
                None => k_f.clone(),
            };
            let w: Symbol = inputs.file("symbol", symbol)?;
            let s = sample(inputs, sp, g)?;
            let (method, t) = (NormMethod::from(g.method), tol(NORM_TOL));
            let report = sampled_mult_norm(&k_f, &k_e, &w, &s, method, t)?;
            let mut params = json!({ "tolerance": t, "method": value(&method) });
            if let Some(path) = &g.csv {
                write_curve(path, &k_f, &k_e, &w, &s, method, t)?;
                params["csv"] = json!(path.display().to_string());
            }
            run(params, value(&report))
        }
        Command::Contraction {
            kernel,
            symbol,
            sample: sp,
        } => {
            let k: Kernel = inputs.file("kernel", kernel)?;
            let w: Symbol = inputs.file("symbol", symbol)?;
            let s = sample(inputs, sp, g)?;
            let t = tol(PSD_TOL);
            run(json!({ "tolerance": t }), value(&contraction_check(&k, &w, &s, t)?))
        }
        Command::KlCheck {
            kernel,
            kernel_l,
            symbol,
            sample: sp,
        } => {
            let k: Kernel = inputs.file("kernel", kernel)?;
            let l: Kernel = inputs.file("kernel_l", kernel_l)?;
            let w: Symbol = inputs.file("symbol", symbol)?;
            let s = sample(inputs, sp, g)?;
            let t = tol(PSD_TOL);
            run(
                json!({ "tolerance": t }),
                value(&kl_monotonicity_report(&k, &l, &w, &s, t)?),
            )
        }
        Command::VnCheck {
            symbol,
            poly,
            sample: sp,
            grid,
        } => {
            let w: Symbol = inputs.file("symbol", symbol)?;
            let p = complex_list(inputs.inline("poly", poly)?);
            let s = sample(inputs, sp, g)?;
            let t = tol(NORM_TOL);
            let report = von_neumann_check(&w, &p, &s, *grid, t)?;
            run(json!({ "tolerance": t, "boundary_grid": grid }), value(&report))
        }
        Command::Realize { model } => model_command(model, inputs, realize, realize),
        Command::TopologyProbe { model, x, eps } => {
            model_command(model, inputs, |m| topology(m, *x, *eps), |m| topology(m, *x, *eps))
        }
        Command::RankCheck {
            model,
            points,
            count,
            depth,
            allow_duplicates,
        } => {
            let pts: Option<Vec<usize>> = match points {
                Some(text) => Some(inputs.inline("points", text)?),
                None => None,
            };
            let t = tol(DEFAULT_RANK_TOL);
            let task = RankTask {
                points: pts,
                count: *count,
                depth: *depth,
                allow_duplicates: *allow_duplicates,
                tol: t,
                seed: g.seed,
            };
            let mut out = model_command(model, inputs, |m| task.run(m), |m| task.run(m))?;
            out.parameters["tolerance"] = json!(t);
            Ok(out)
        }
        Command::Roundtrip { model, coeffs } => {
            let given: Option<Vec<C64>> = match coeffs {
                Some(p) => Some(complex_list(inputs.file::<Vec<Scalar>>("coeffs", p)?)),
                None => None,
            };
            let seed = g.seed;
            model_command(
                model,
                inputs,
                |m| roundtrip(m, given.clone(), seed),
                |m| roundtrip(m, given.clone(), seed),
            )
        }
        Command::LipDual { space, x, y } => {
            let sp: MetricSpace<f64> = inputs.file("space", space)?;
            let result = match y {
                Some(y) => {
                    let (norm, witness) = sp.lip_dual_pair_norm(*x, *y)?;
                    json!({ "pair_norm": norm, "witness": witness.values })
                }
                None => json!({ "point_norm": sp.lip_point_norm(*x)? }),
            };
            run(json!({}), result)
        }
        Command::Submult { space, functions } => {
            let sp: MetricSpace<f64> = inputs.file("space", space)?;
            let fs: Vec<Vec<Scalar>> = inputs.file("functions", functions)?;
            let fs: Vec<SampledFunction<C64>> = fs.into_iter().map(|f| SampledFunction::new(complex_list(f))).collect();
            run(json!({}), value(&sp.submult_ratio(&fs)?))
        }
        Command::PickSolve { problem } => {
            let p: Pick = inputs.file("problem", problem)?;
            let t = tol(PSD_TOL);
            let feasible = pick_feasible(&p, t)?;
            let min_norm = pick_min_norm(p.nodes(), p.values(), t)?;
            run(
                json!({ "tolerance": t }),
                json!({ "t": p.t(), "feasible": value(&feasible), "min_norm": min_norm }),
            )
        }
        Command::CarlesonProbe { m, start } => {
            let t = tol(PSD_TOL);
            run(json!({ "tolerance": t }), value(&separability_probe(*m, *start, t)?))
        }
        Command::DetectMo { matrix, sample: sp } => {
            let m = inputs.file::<MatrixInput>("matrix", matrix)?.into_matrix()?;
            let s = sample(inputs, sp, g)?;
            let t = tol(DETECT_TOL);
            let found = detect_mo(&m, &s, t)?;
            run(
                json!({ "tolerance": t }),
                json!({ "is_multiplication": found.is_some(), "symbol_values": found }),
            )
        }
        Command::ArdyCheck { poly } => {
            let w = complex_list(inputs.inline("poly", poly)?);
            run(json!({}), json!({ "is_multiplier": ardy_multiplier_check(&w) }))
        }
    }
}

fn write_curve(
    path: &Path,
    k_f: &Kernel,
    k_e: &Kernel,
    w: &Symbol,
    s: &EuclideanPointSet<f64>,
    method: NormMethod,
    tol: f64,
) -> Outcome<()> {
    let mut csv = String::from("points,sampled_norm,lower_bound_sup,diagonal_bound\n");
    for n in 1..=s.len() {
        let sub = s.subset(&(0..n).collect::<Vec<_>>());
        let r = sampled_mult_norm(k_f, k_e, w, &sub, method, tol)?;
        csv.push_str(&format!(
            "{n},{},{},{}\n",
            r.sampled_norm, r.lower_bound_sup, r.diagonal_bound
        ));
    }
    std::fs::write(path, csv).map_err(|e| Failure::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Scalar types the realization commands can run in.
trait Lift: Field + PartialEq {
    const ARITHMETIC: &'static str;
    fn lift(x: f64) -> Outcome<Self>;
}

impl Lift for f64 {
    const ARITHMETIC: &'static str = "f64";
    fn lift(x: f64) -> Outcome<Self> {
        Ok(x)
    }
}

impl Lift for BigRational {
    const ARITHMETIC: &'static str = "exact";
    fn lift(x: f64) -> Outcome<Self> {
        Ok(exact(x)?)
    }
}

fn lift_complex<T: Lift>(z: C64) -> Outcome<Complex<T>> {
    Ok(Complex::new(T::lift(z.re)?, T::lift(z.im)?))
}

fn build<T: Lift>(spec: &ModelSpec<f64>) -> Outcome<RealizationModel<T>> {
    let sp = &spec.space;
    let n = sp.len();
    let dist = (0..n)
        .map(|i| (0..n).map(|j| T::lift(sp.dist(i, j))).collect::<Outcome<Vec<T>>>())
        .collect::<Outcome<Vec<_>>>()?;
    let lifted = ModelSpec {
        space: MetricSpace::new(sp.labels().to_vec(), dist, sp.base())?,
        order: spec.order.clone(),
        depth: spec.depth,
        policy: spec.policy.clone(),
        p: spec.p,
    };
    Ok(lifted.build()?)
}

/// Loads the model and runs the task in the requested arithmetic.
fn model_command(
    args: &ModelArgs,
    inputs: &mut Inputs,
    float: impl FnOnce(&RealizationModel<f64>) -> Outcome<Value>,
    rational: impl FnOnce(&RealizationModel<BigRational>) -> Outcome<Value>,
) -> Outcome<Run> {
    let spec: ModelSpec<f64> = inputs.file("model", &args.model)?;
    let (arithmetic, result) = if args.exact {
        (BigRational::ARITHMETIC, rational(&build(&spec)?)?)
    } else {
        (f64::ARITHMETIC, float(&build(&spec)?)?)
    };
    Ok(Run {
        parameters: json!({ "arithmetic": arithmetic }),
        result,
    })
}

fn floats<T: Field>(v: &[T]) -> Vec<f64> {
    v.iter().map(Field::to_f64_lossy).collect()
}

fn realize<T: Lift>(m: &RealizationModel<T>) -> Outcome<Value> {
    Ok(json!({
        "points": m.space().len(),
        "depth": m.depth(),
        "order": m.dense().order(),
        "b": floats(m.b()),
        "weighted_sup_sum": m.weighted_sup_sum().to_f64_lossy(),
        "g": m.g().iter().map(|g| floats(&g.values)).collect::<Vec<_>>(),
        "very_independent": m.very_independence_check()?,
    }))
}

fn topology<T: Lift>(m: &RealizationModel<T>, x: usize, eps: f64) -> Outcome<Value> {
    Ok(value(&m.topology_probe(x, T::lift(eps)?)?))
}

struct RankTask {
    points: Option<Vec<usize>>,
    count: Option<usize>,
    depth: Option<usize>,
    allow_duplicates: bool,
    tol: f64,
    seed: u64,
}

impl RankTask {
    fn run<T: Lift>(&self, m: &RealizationModel<T>) -> Outcome<Value> {
        let len = m.space().len();
        let points = match &self.points {
            Some(p) => p.clone(),
            None => {
                let count = self.count.unwrap_or(len.min(10));
                if count == 0 || count > len {
                    return Err(Failure::Argument(format!("--count must lie in 1..={len}")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let mut p = rand::seq::index::sample(&mut rng, len, count).into_vec();
                p.sort_unstable();
                p
            }
        };
        let depth = self.depth.unwrap_or(m.depth());
        let rank = m.point_eval_rank(&points, depth, self.tol, self.allow_duplicates)?;
        Ok(json!({
            "points": points,
            "depth": depth,
            "rank": rank,
            "full_rank": rank == points.len(),
        }))
    }
}

fn roundtrip<T: Lift>(m: &RealizationModel<T>, given: Option<Vec<C64>>, seed: u64) -> Outcome<Value> {
    let coeffs = given.unwrap_or_else(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..=m.depth())
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    });
    let f = coeffs
        .iter()
        .map(|&z| lift_complex::<T>(z))
        .collect::<Outcome<Vec<_>>>()?;
    let back = m.coefficient_roundtrip(&f)?;
    let part_max = |acc: T, z: &Complex<T>| acc.max_of(z.re.abs_val()).max_of(z.im.abs_val());
    let scale = f.iter().fold(T::zero(), part_max);
    let err = f
        .iter()
        .zip(&back)
        .map(|(a, b)| a.clone() - b.clone())
        .fold(T::zero(), |acc, z| part_max(acc, &z));
    let relative = if scale == T::zero() {
        err.to_f64_lossy()
    } else {
        (err.clone() / scale).to_f64_lossy()
    };
    Ok(json!({
        "coefficients": coeffs,
        "recovered": back.iter().map(|z| [z.re.to_f64_lossy(), z.im.to_f64_lossy()]).collect::<Vec<_>>(),
        "max_abs_error": err.to_f64_lossy(),
        "max_relative_error": relative,
        "exact_match": back == f,
    }))
}
