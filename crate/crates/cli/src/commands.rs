//! One function per subcommand; each returns the text of the main output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_traits::ToPrimitive;
use serde_json::{json, Value};
use warpath::algebra::{embeddings, path_algebra, to_rows};
use warpath::dtw::all_optimal_paths;
use warpath::enumeration::{check_budget, count_paths, paths, PathCountTable};
use warpath::learning::{
    ssg_average, train_lvq1, GradientRule, Loss, LvqTrainConfig, SsgConfig, StepSchedule, TiePolicy,
};
use warpath::multipath::{monte_carlo_uniqueness, zero_set_scan, ScanAxis, UniquenessConfig};
use warpath::random::ValueDistribution;
use warpath::{TimeSeries, Tolerance, WarpingPath};

use crate::io::{fmt_num, load_all, load_labels, load_series_file, series_csv};
use crate::{
    AlgebraArgs, AverageArgs, CliError, DelannoyArgs, DistArg, DtwArgs, EnumerateArgs, LossArg,
    LvqArgs, RuleArg, TiePolicyArg, UniquenessArgs, ZerosetArgs,
};

fn json_text(value: Value) -> String {
    let mut text = serde_json::to_string(&value).expect("JSON values serialize");
    text.push('\n');
    text
}

fn csv_header(config: &Value) -> String {
    format!("# config: {config}\n")
}

fn write_side_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn single_series(path: &Path) -> Result<TimeSeries, CliError> {
    let mut all = load_series_file(path)?;
    if all.len() != 1 {
        return Err(CliError::Runtime(format!(
            "{}: expected one series, found {}",
            path.display(),
            all.len()
        )));
    }
    Ok(all.remove(0))
}

fn big_to_json(v: &num_bigint::BigUint) -> Value {
    match v.to_u64() {
        Some(small) => json!(small),
        None => json!(v.to_string()),
    }
}

pub fn dtw(a: &DtwArgs, config: Value) -> Result<String, CliError> {
    let x = single_series(&a.x)?;
    let y = single_series(&a.y)?;
    if a.cap == 0 {
        return Err(CliError::Usage("--cap must be >= 1".into()));
    }
    let tol = a.tolerance.tolerance();
    let cap = if a.all_paths { a.cap.max(2) } else { 2 };
    let set = all_optimal_paths(&x, &y, &tol, cap)?;
    let mut out = json!({
        "config": config,
        "distance": set.optimal_cost.sqrt(),
        "distance_squared": set.optimal_cost,
        "unique": set.is_unique(),
    });
    if a.all_paths {
        let listed: Vec<&[(usize, usize)]> = set
            .paths
            .iter()
            .take(a.cap)
            .map(WarpingPath::points)
            .collect();
        out["truncated"] = json!(set.truncated || listed.len() < set.paths.len());
        out["num_paths_listed"] = json!(listed.len());
        out["paths"] = serde_json::to_value(listed).expect("paths serialize");
    }
    Ok(json_text(out))
}

pub fn delannoy(a: &DelannoyArgs, config: Value) -> Result<String, CliError> {
    if a.max_m == 0 || a.max_n == 0 {
        return Err(CliError::Usage("--max-m and --max-n must be >= 1".into()));
    }
    let table = PathCountTable::build(a.max_m, a.max_n);
    let mut text = csv_header(&config);
    text.push('m');
    for n in 1..=a.max_n {
        let _ = write!(text, ",{n}");
    }
    text.push('\n');
    for (k, row) in table.rows().enumerate() {
        let _ = write!(text, "{}", k + 1);
        for v in row {
            let _ = write!(text, ",{v}");
        }
        text.push('\n');
    }
    Ok(text)
}

pub fn enumerate(a: &EnumerateArgs, config: Value) -> Result<String, CliError> {
    if a.m == 0 || a.n == 0 {
        return Err(CliError::Usage("m and n must be >= 1".into()));
    }
    let count = count_paths(a.m, a.n);
    let listed: Vec<WarpingPath> = match a.limit {
        Some(limit) => paths(a.m, a.n).take(limit).collect(),
        None => {
            check_budget(a.m, a.n)?;
            paths(a.m, a.n).collect()
        }
    };
    let truncated = num_bigint::BigUint::from(listed.len()) < count;
    Ok(json_text(json!({
        "config": config,
        "count": big_to_json(&count),
        "num_paths_listed": listed.len(),
        "truncated": truncated,
        "paths": listed.iter().map(WarpingPath::points).collect::<Vec<_>>(),
    })))
}

pub fn algebra(a: &AlgebraArgs, config: Value) -> Result<String, CliError> {
    let points: Vec<(usize, usize)> = serde_json::from_str(&a.path).map_err(|e| {
        CliError::Runtime(format!("--path: expected a JSON list of [i, j] pairs: {e}"))
    })?;
    let p = WarpingPath::new(a.m, a.n, points)?;
    let emb = embeddings(&p);
    let alg = path_algebra(&p).serializable();
    Ok(json_text(json!({
        "config": config,
        "path": p.points(),
        "phi": to_rows(&emb.phi),
        "psi": to_rows(&emb.psi),
        "valence": alg.valence,
        "warping": alg.warping,
        "co_valence": alg.co_valence,
        "co_warping": alg.co_warping,
        "theta": alg.theta,
        "gram": alg.gram,
    })))
}

pub fn uniqueness(a: &UniquenessArgs, config: Value) -> Result<String, CliError> {
    let distribution = match a.dist {
        DistArg::Normal => ValueDistribution::StandardNormal,
        DistArg::Uniform => ValueDistribution::Uniform,
        DistArg::Quantized => ValueDistribution::Quantized { levels: a.levels },
    };
    let tolerance = Tolerance {
        tie_epsilon: a.tolerance.tie_eps,
        exact_mode: a.tolerance.exact || distribution.is_integer_valued(),
    };
    let stats = monte_carlo_uniqueness(&UniquenessConfig {
        m: a.m,
        n: a.n,
        d: a.d,
        trials: a.trials,
        distribution,
        tolerance,
        seed: a.seed,
    })?;
    Ok(json_text(json!({ "config": config, "stats": stats })))
}

pub fn zeroset(a: &ZerosetArgs, config: Value) -> Result<String, CliError> {
    if a.ranges.len() != 2 {
        return Err(CliError::Usage(format!(
            "--range must be given exactly twice, got {}",
            a.ranges.len()
        )));
    }
    let base_x = single_series(&a.base_x)?;
    let base_y = single_series(&a.base_y)?;
    let axes = [
        ScanAxis {
            index: a.free.0,
            min: a.ranges[0].0,
            max: a.ranges[0].1,
        },
        ScanAxis {
            index: a.free.1,
            min: a.ranges[1].0,
            max: a.ranges[1].1,
        },
    ];
    let scan = zero_set_scan(
        &base_x,
        &base_y,
        axes,
        a.res,
        &Tolerance::relative(a.tie_eps),
    )?;

    let header = csv_header(&config);
    let mut text = header.clone();
    text.push_str("# each segment is two consecutive rows\n");
    text.push_str("pair_i,pair_j,x1,x2,on_optimal_set\n");
    for pair in &scan.pairs {
        for point in pair.segments.iter().flatten() {
            let _ = writeln!(
                text,
                "{},{},{},{},{}",
                pair.i,
                pair.j,
                fmt_num(point.x1),
                fmt_num(point.x2),
                point.on_optimal_set
            );
        }
    }

    if let Some(path) = &a.grids {
        let values: Vec<[String; 2]> = (0..a.res)
            .map(|k| {
                [
                    axis_value(&axes[0], k, a.res),
                    axis_value(&axes[1], k, a.res),
                ]
            })
            .collect();
        let mut grids = header;
        grids.push_str("pair_i,pair_j,x1,x2,sign\n");
        for pair in &scan.pairs {
            for (idx, sign) in pair.signs.iter().enumerate() {
                let (r, c) = (idx / a.res, idx % a.res);
                let _ = writeln!(
                    grids,
                    "{},{},{},{},{sign}",
                    pair.i, pair.j, values[r][0], values[c][1]
                );
            }
        }
        write_side_file(path, &grids)?;
    }
    Ok(text)
}

fn axis_value(axis: &ScanAxis, k: usize, res: usize) -> String {
    fmt_num(axis.min + (axis.max - axis.min) * k as f64 / (res - 1) as f64)
}

pub fn average(a: &AverageArgs, config: Value) -> Result<String, CliError> {
    let sample = load_all(&a.samples)?;
    let length = match a.length {
        Some(0) => return Err(CliError::Usage("--length must be >= 1".into())),
        Some(n) => n,
        None => sample.first().map_or(1, TimeSeries::len),
    };
    let loss = match a.loss {
        LossArg::Identity => Loss::Identity,
        LossArg::Squared => Loss::Squared,
    };
    let ssg = SsgConfig {
        epochs: a.epochs,
        schedule: if a.eta_decay {
            StepSchedule::InverseEpoch(a.eta)
        } else {
            StepSchedule::Constant(a.eta)
        },
        seed: a.seed,
        tie_policy: match a.tie_policy {
            TiePolicyArg::First => TiePolicy::First,
            TiePolicyArg::Random => TiePolicy::RandomAmongOptimal,
        },
        rule: match a.rule {
            RuleArg::Printed => GradientRule::Printed,
            RuleArg::Strict => GradientRule::ChainRuleStrict,
        },
        tolerance: Tolerance::relative(a.tie_eps),
    };
    let result = ssg_average(&sample, length, loss, &ssg)?;

    let header = csv_header(&config);
    let mut trace = String::from("epoch,cost\n");
    let _ = writeln!(trace, "0,{}", fmt_num(result.initial_cost));
    for (t, cost) in result.trace.iter().enumerate() {
        let _ = writeln!(trace, "{},{}", t + 1, fmt_num(*cost));
    }
    let mut text = header.clone();
    text.push_str(&series_csv(&result.mean));
    match &a.trace {
        Some(path) => write_side_file(path, &(header + &trace))?,
        None => {
            text.push_str("# epoch cost trace\n");
            text.push_str(&trace);
        }
    }
    Ok(text)
}

pub fn lvq(a: &LvqArgs, config: Value) -> Result<String, CliError> {
    let series = load_all(&a.series)?;
    let labels = load_labels(&a.labels)?;
    if series.len() != labels.len() {
        return Err(CliError::Runtime(format!(
            "{} series but {} labels",
            series.len(),
            labels.len()
        )));
    }
    let data: Vec<(TimeSeries, u32)> = series.into_iter().zip(labels).collect();
    let training = train_lvq1(
        &data,
        &LvqTrainConfig {
            prototypes_per_class: a.prototypes_per_class,
            eta: a.eta,
            epochs: a.epochs,
            seed: a.seed,
            tolerance: Tolerance::relative(a.tie_eps),
        },
    )?;
    Ok(json_text(json!({
        "config": config,
        "codebook": training.codebook,
        "accuracy": training.accuracy,
        "nonunique_updates": training.nonunique_updates,
    })))
}
