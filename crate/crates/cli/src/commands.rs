use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use pdsphere::analysis::{
    benchmark, distance_matrix, knn_vote, loo_regression, pga_features, synthetic_clouds,
    BenchConfig, DistanceMatrix,
};
use pdsphere::io::{self, MatrixManifest};
use pdsphere::persistence::{cloud_diagrams, global_scale};
use pdsphere::sphere::{self, extrinsic_mean};
use pdsphere::wasserstein::alexandrov_geodesic;
use pdsphere::{
    delay_embed, densify, normalize_diagram, wasserstein, DensityParams, Error, Grid,
    HomologySelection, Metric, Order, PersistenceDiagram, SqrtDensity, TimeSeries,
};
use serde_json::json;

use crate::error::{at, CliError, CliResult};
use crate::{Aggregate, Command, DiagramArgs, GridKind, ScalePolicy};

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Embed {
            input,
            channel,
            m,
            tau,
            output,
        } => embed(&input, channel, m, tau, &output),
        Command::Persist {
            input,
            series,
            channel,
            m,
            tau,
            max_scale,
            temporal_links,
            output,
        } => persist(
            input,
            series,
            channel,
            (m, tau),
            max_scale,
            temporal_links,
            &output,
        ),
        Command::Density {
            input,
            diagram,
            density,
            kind,
            output,
        } => density_cmd(&input, diagram, density.params()?, kind, &output),
        Command::Dist {
            a,
            b,
            metric,
            diagram,
            density,
        } => dist(&a, &b, metric, diagram, density.params()?),
        Command::Distmat {
            inputs,
            metric,
            diagram,
            density,
            aggregate,
            output,
        } => distmat(
            &inputs,
            metric,
            diagram,
            density.params()?,
            aggregate,
            &output,
        ),
        Command::Geodesic {
            from,
            to,
            steps,
            diagram,
            density,
            kind,
            alexandrov,
            output_dir,
        } => geodesic_cmd(
            &from,
            &to,
            steps,
            diagram,
            density.params()?,
            kind,
            alexandrov,
            &output_dir,
        ),
        Command::Mean {
            inputs,
            diagram,
            density,
            kind,
            output,
        } => mean(&inputs, diagram, density.params()?, kind, &output),
        Command::Pga {
            inputs,
            components,
            diagram,
            density,
            output_dir,
        } => pga_cmd(&inputs, components, diagram, density.params()?, &output_dir),
        Command::Knn {
            train,
            test,
            k,
            metric,
            diagram,
            density,
            output,
        } => knn(
            &train,
            test.as_deref(),
            k,
            metric,
            diagram,
            density.params()?,
            output.as_deref(),
        ),
        Command::Regress {
            items,
            components,
            diagram,
            density,
            output,
        } => regress(
            &items,
            components,
            diagram,
            density.params()?,
            output.as_deref(),
        ),
        Command::Bench {
            n,
            density,
            trials,
            seed,
            output,
        } => bench(n, density.params()?, trials, seed, output.as_deref()),
        Command::Heatmap { input, output } => heatmap(&input, &output),
        Command::Synth {
            classes,
            per_class,
            seed,
            diagrams,
            output_dir,
        } => synth(classes, per_class, seed, diagrams, &output_dir),
    }
}

fn report(value: serde_json::Value) {
    println!("{value}");
}

fn label_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// File stems as labels, falling back to full paths when stems collide.
fn labels_for(paths: &[PathBuf]) -> Vec<String> {
    let stems: Vec<String> = paths.iter().map(|p| label_of(p)).collect();
    let unique: HashSet<&String> = stems.iter().collect();
    if unique.len() == stems.len() {
        stems
    } else {
        paths.iter().map(|p| p.display().to_string()).collect()
    }
}

fn check_embedding(m: usize, tau: usize) -> CliResult<()> {
    if m == 0 || tau == 0 {
        return Err(CliError::param(format!(
            "m and tau must be positive, got m={m}, tau={tau}"
        )));
    }
    Ok(())
}

fn pick_channel(
    mut series: Vec<TimeSeries>,
    channel: Option<usize>,
    path: &Path,
) -> CliResult<TimeSeries> {
    match channel {
        Some(c) if c < series.len() => Ok(series.swap_remove(c)),
        Some(c) => Err(CliError::param(format!(
            "{}: channel {c} requested but the series has {} column(s)",
            path.display(),
            series.len()
        ))),
        None if series.len() == 1 => Ok(series.remove(0)),
        None => Err(CliError::param(format!(
            "{}: series has {} columns; choose one with --channel",
            path.display(),
            series.len()
        ))),
    }
}

fn embed(
    input: &Path,
    channel: Option<usize>,
    m: usize,
    tau: usize,
    output: &Path,
) -> CliResult<()> {
    check_embedding(m, tau)?;
    let series = io::read_time_series_file(input).map_err(at(input))?;
    let series = pick_channel(series, channel, input)?;
    let cloud = delay_embed(&series, m, tau)?;
    io::write_point_cloud_file(output, &cloud).map_err(at(output))?;
    report(
        json!({"command": "embed", "m": m, "tau": tau, "points": cloud.len(), "output": output}),
    );
    Ok(())
}

fn persist(
    input: Option<PathBuf>,
    series: Option<PathBuf>,
    channel: Option<usize>,
    (m, tau): (usize, usize),
    max_scale: f64,
    temporal_links: bool,
    output: &Path,
) -> CliResult<()> {
    if !(max_scale > 0.0) {
        return Err(CliError::param(format!(
            "max-scale must be positive, got {max_scale}"
        )));
    }
    let write = |cloud: &pdsphere::PointCloud, out: &Path| -> CliResult<(usize, usize)> {
        let (h0, h1) = cloud_diagrams(cloud, max_scale, temporal_links)?;
        io::write_diagrams_file(out, &[&h0, &h1]).map_err(at(out))?;
        Ok((
            h0.len() + h0.essential().len(),
            h1.len() + h1.essential().len(),
        ))
    };
    let summary = |outputs: Vec<serde_json::Value>| {
        report(json!({
            "command": "persist",
            "max_scale": if max_scale.is_finite() { json!(max_scale) } else { json!("inf") },
            "temporal_links": temporal_links,
            "outputs": outputs,
        }))
    };

    if let Some(path) = input {
        let cloud = io::read_point_cloud_file(&path).map_err(at(&path))?;
        let (n0, n1) = write(&cloud, output)?;
        summary(vec![json!({"path": output, "h0": n0, "h1": n1})]);
        return Ok(());
    }
    let path = series.expect("clap requires --input or --series");
    check_embedding(m, tau)?;
    let all = io::read_time_series_file(&path).map_err(at(&path))?;
    if channel.is_some() || all.len() == 1 {
        let s = pick_channel(all, channel, &path)?;
        let (n0, n1) = write(&delay_embed(&s, m, tau)?, output)?;
        summary(vec![json!({"path": output, "h0": n0, "h1": n1})]);
        return Ok(());
    }
    fs::create_dir_all(output).map_err(|e| at(output)(e.into()))?;
    let mut outputs = Vec::new();
    for (i, s) in all.iter().enumerate() {
        let out = output.join(format!("channel_{i}.csv"));
        let (n0, n1) = write(&delay_embed(s, m, tau)?, &out)?;
        outputs.push(json!({"path": out, "h0": n0, "h1": n1}));
    }
    summary(outputs);
    Ok(())
}

fn load_diagram(path: &Path, dim: HomologySelection) -> CliResult<PersistenceDiagram> {
    let (h0, h1) = io::read_diagrams_file(path).map_err(at(path))?;
    Ok(dim.select(&h0, &h1))
}

fn load_all(paths: &[PathBuf], dim: HomologySelection) -> CliResult<Vec<PersistenceDiagram>> {
    paths.iter().map(|p| load_diagram(p, dim)).collect()
}

/// Resolves the scale policy over every diagram of the invocation and
/// normalizes them all by it.
fn normalize(
    diagrams: &[PersistenceDiagram],
    policy: ScalePolicy,
) -> CliResult<(f64, Vec<PersistenceDiagram>)> {
    let scale = match policy {
        ScalePolicy::Auto => global_scale(diagrams)?,
        ScalePolicy::Fixed(s) => s,
    };
    let normalized = diagrams
        .iter()
        .map(|d| normalize_diagram(d, scale))
        .collect::<pdsphere::Result<Vec<_>>>()?;
    Ok((scale, normalized))
}

fn densify_named(
    diagrams: &[PersistenceDiagram],
    names: &[String],
    params: DensityParams,
) -> CliResult<Vec<SqrtDensity>> {
    diagrams
        .iter()
        .zip(names)
        .map(|(d, name)| {
            densify(d, params).map_err(|e| match e {
                Error::EmptyDiagram => CliError::param(format!(
                    "{name}: selected diagram is empty, so it has no density (try another --dim)"
                )),
                other => other.into(),
            })
        })
        .collect()
}

fn grid_of(psi: &SqrtDensity, kind: GridKind, sigma: f64) -> CliResult<Grid> {
    Ok(match kind {
        GridKind::Pdf => psi.to_pdf(sigma)?.grid().clone(),
        GridKind::Sqrt => psi.grid().clone(),
    })
}

fn kind_name(kind: GridKind) -> &'static str {
    match kind {
        GridKind::Pdf => "pdf",
        GridKind::Sqrt => "sqrt",
    }
}

fn density_cmd(
    input: &Path,
    diagram: DiagramArgs,
    params: DensityParams,
    kind: GridKind,
    output: &Path,
) -> CliResult<()> {
    let d = load_diagram(input, diagram.dim)?;
    let (scale, normalized) = normalize(&[d], diagram.scale)?;
    let psi = densify_named(&normalized, &[input.display().to_string()], params)?.remove(0);
    io::write_grid_file(output, &grid_of(&psi, kind, params.sigma)?).map_err(at(output))?;
    report(json!({
        "command": "density", "grid": params.k, "sigma": params.sigma, "dim": diagram.dim.to_string(),
        "scale": scale, "kind": kind_name(kind), "output": output,
    }));
    Ok(())
}

fn dist(
    a: &Path,
    b: &Path,
    metric: Metric,
    diagram: DiagramArgs,
    params: DensityParams,
) -> CliResult<()> {
    let raw = load_all(&[a.to_path_buf(), b.to_path_buf()], diagram.dim)?;
    let (scale, d) = normalize(&raw, diagram.scale)?;
    let value = match metric {
        Metric::Hilbert => {
            let roots = densify_named(
                &d,
                &[a.display().to_string(), b.display().to_string()],
                params,
            )?;
            sphere::distance(&roots[0], &roots[1])?
        }
        Metric::W1 => wasserstein(&d[0], &d[1], Order::L1)?.0,
        Metric::W2 => wasserstein(&d[0], &d[1], Order::L2)?.0,
    };
    report(json!({
        "metric": metric.to_string(), "distance": value, "scale": scale, "dim": diagram.dim.to_string(),
        "grid": params.k, "sigma": params.sigma,
    }));
    Ok(())
}

/// Per-item channel files: a file is one channel, a directory holds one
/// diagram CSV per channel (sorted by name).
fn channel_files(item: &Path) -> CliResult<Vec<PathBuf>> {
    if !item.is_dir() {
        return Ok(vec![item.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(item)
        .map_err(|e| at(item)(e.into()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::param(format!(
            "{}: directory has no diagram CSV files",
            item.display()
        )));
    }
    Ok(files)
}

fn distmat(
    inputs: &[PathBuf],
    metric: Metric,
    diagram: DiagramArgs,
    params: DensityParams,
    aggregate: Aggregate,
    output: &Path,
) -> CliResult<()> {
    let labels = labels_for(inputs);
    let channels = inputs
        .iter()
        .map(|p| channel_files(p))
        .collect::<CliResult<Vec<_>>>()?;
    let count = channels[0].len();
    if let Some((i, c)) = channels.iter().enumerate().find(|(_, c)| c.len() != count) {
        return Err(CliError::param(format!(
            "{} has {} channel(s) but {} has {count}",
            inputs[i].display(),
            c.len(),
            inputs[0].display()
        )));
    }

    let n = inputs.len();
    let mut sum = vec![0.0; n * n];
    let mut scales = Vec::with_capacity(count);
    for c in 0..count {
        let paths: Vec<PathBuf> = channels.iter().map(|files| files[c].clone()).collect();
        let (scale, d) = normalize(&load_all(&paths, diagram.dim)?, diagram.scale)?;
        let m = match metric {
            Metric::Hilbert => {
                let names: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
                let roots = densify_named(&d, &names, params)?;
                pdsphere::analysis::hilbert_matrix_roots(labels.clone(), &roots)?
            }
            _ => distance_matrix(labels.clone(), &d, metric, params)?,
        };
        for (acc, v) in sum.iter_mut().zip(m.values()) {
            *acc += v;
        }
        scales.push(scale);
    }
    let matrix = match aggregate {
        Aggregate::Mean => DistanceMatrix::from_values(
            labels,
            sum.iter().map(|v| v / count as f64).collect(),
            metric,
        )?,
    };

    let mut w =
        std::io::BufWriter::new(fs::File::create(output).map_err(|e| at(output)(e.into()))?);
    io::write_distance_matrix(&mut w, &matrix).map_err(at(output))?;
    drop(w);
    let manifest_path = output.with_extension("json");
    let hilbert = metric == Metric::Hilbert;
    io::write_json(
        &manifest_path,
        &MatrixManifest {
            metric,
            items: n,
            channels: count,
            normalization_scales: scales,
            aggregate: "mean".into(),
            grid: hilbert.then_some(params.k),
            sigma: hilbert.then_some(params.sigma),
            homology: diagram.dim.to_string(),
        },
    )
    .map_err(at(&manifest_path))?;
    report(json!({
        "command": "distmat", "metric": metric.to_string(), "items": n, "channels": count,
        "grid": params.k, "sigma": params.sigma, "output": output, "manifest": manifest_path,
    }));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn geodesic_cmd(
    from: &Path,
    to: &Path,
    steps: usize,
    diagram: DiagramArgs,
    params: DensityParams,
    kind: GridKind,
    alexandrov: bool,
    output_dir: &Path,
) -> CliResult<()> {
    if steps < 2 {
        return Err(CliError::param(format!(
            "steps must be at least 2, got {steps}"
        )));
    }
    if alexandrov && diagram.dim == HomologySelection::Both {
        return Err(CliError::param(
            "--alexandrov needs a single homology dimension (--dim 0 or 1)",
        ));
    }
    let raw = load_all(&[from.to_path_buf(), to.to_path_buf()], diagram.dim)?;
    let (scale, d) = normalize(&raw, diagram.scale)?;
    let roots = densify_named(
        &d,
        &[from.display().to_string(), to.display().to_string()],
        params,
    )?;
    fs::create_dir_all(output_dir).map_err(|e| at(output_dir)(e.into()))?;

    let mut files = Vec::with_capacity(steps);
    for i in 0..steps {
        let s = i as f64 / (steps - 1) as f64;
        let point = sphere::geodesic(&roots[0], &roots[1], s)?;
        let path = output_dir.join(format!("step_{i:03}.csv"));
        io::write_grid_file(&path, &grid_of(&point, kind, params.sigma)?).map_err(at(&path))?;
        if alexandrov {
            let mid = alexandrov_geodesic(&d[0], &d[1], s)?;
            let dpath = output_dir.join(format!("diagram_{i:03}.csv"));
            io::write_diagrams_file(&dpath, &[&mid]).map_err(at(&dpath))?;
        }
        files.push(path);
    }
    report(json!({
        "command": "geodesic", "steps": steps, "grid": params.k, "sigma": params.sigma, "scale": scale,
        "distance": sphere::distance(&roots[0], &roots[1])?, "kind": kind_name(kind), "outputs": files,
    }));
    Ok(())
}

fn densities(
    paths: &[PathBuf],
    diagram: DiagramArgs,
    params: DensityParams,
) -> CliResult<(f64, Vec<SqrtDensity>)> {
    let (scale, d) = normalize(&load_all(paths, diagram.dim)?, diagram.scale)?;
    let names: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
    Ok((scale, densify_named(&d, &names, params)?))
}

fn mean(
    inputs: &[PathBuf],
    diagram: DiagramArgs,
    params: DensityParams,
    kind: GridKind,
    output: &Path,
) -> CliResult<()> {
    let (scale, roots) = densities(inputs, diagram, params)?;
    let m = extrinsic_mean(&roots)?;
    io::write_grid_file(output, &grid_of(&m, kind, params.sigma)?).map_err(at(output))?;
    report(json!({
        "command": "mean", "items": inputs.len(), "grid": params.k, "sigma": params.sigma, "scale": scale,
        "kind": kind_name(kind), "output": output,
    }));
    Ok(())
}

fn coordinate_rows(labels: &[String], coords: &[Vec<f64>]) -> Vec<Vec<String>> {
    labels
        .iter()
        .zip(coords)
        .map(|(l, c)| {
            std::iter::once(l.clone())
                .chain(c.iter().map(f64::to_string))
                .collect()
        })
        .collect()
}

fn pga_cmd(
    inputs: &[PathBuf],
    d: usize,
    diagram: DiagramArgs,
    params: DensityParams,
    output_dir: &Path,
) -> CliResult<()> {
    if d == 0 {
        return Err(CliError::param("components must be positive"));
    }
    let (scale, roots) = densities(inputs, diagram, params)?;
    let (model, coords) = pga_features(&roots, d)?;
    io::write_pga_model(output_dir, &model, params.sigma, scale).map_err(at(output_dir))?;
    let header: Vec<String> = std::iter::once("item".to_string())
        .chain((0..d).map(|i| format!("c{i}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let coords_path = output_dir.join("coords.csv");
    io::write_table(
        &coords_path,
        &header,
        &coordinate_rows(&labels_for(inputs), &coords),
    )
    .map_err(at(&coords_path))?;
    report(json!({
        "command": "pga", "items": inputs.len(), "components": d, "variances": model.variances,
        "grid": params.k, "sigma": params.sigma, "scale": scale, "output_dir": output_dir,
    }));
    Ok(())
}

fn knn(
    train: &Path,
    test: Option<&Path>,
    k: usize,
    metric: Metric,
    diagram: DiagramArgs,
    params: DensityParams,
    output: Option<&Path>,
) -> CliResult<()> {
    let train_items = io::read_item_list(train).map_err(at(train))?;
    if let Some((p, _)) = train_items.iter().find(|(_, l)| l.is_empty()) {
        return Err(CliError::new(
            crate::error::Kind::Parse,
            format!(
                "{}: training item {} has no label",
                train.display(),
                p.display()
            ),
        ));
    }
    let test_items = match test {
        Some(t) => io::read_item_list(t).map_err(at(t))?,
        None => Vec::new(),
    };
    let n_train = train_items.len();
    if k == 0 || k > n_train - usize::from(test.is_none()) {
        return Err(CliError::param(format!(
            "k={k} is out of range for {n_train} training items"
        )));
    }

    let paths: Vec<PathBuf> = train_items
        .iter()
        .chain(&test_items)
        .map(|(p, _)| p.clone())
        .collect();
    // positional labels keep duplicate file stems apart inside the matrix
    let keys: Vec<String> = (0..paths.len()).map(|i| format!("#{i}")).collect();
    let (scale, d) = normalize(&load_all(&paths, diagram.dim)?, diagram.scale)?;
    let matrix = match metric {
        Metric::Hilbert => {
            let names: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
            pdsphere::analysis::hilbert_matrix_roots(keys, &densify_named(&d, &names, params)?)?
        }
        _ => distance_matrix(keys, &d, metric, params)?,
    };
    let train_labels: Vec<String> = train_items.iter().map(|(_, l)| l.clone()).collect();

    let queries: Vec<(usize, Option<usize>)> = if test.is_some() {
        (n_train..paths.len()).map(|i| (i, None)).collect()
    } else {
        (0..n_train).map(|i| (i, Some(i))).collect()
    };
    let mut rows = Vec::with_capacity(queries.len());
    let (mut correct, mut scored) = (0usize, 0usize);
    for &(i, exclude) in &queries {
        let predicted = knn_vote(&matrix.row(i)[..n_train], &train_labels, k, exclude)?;
        let truth = if i < n_train {
            &train_items[i].1
        } else {
            &test_items[i - n_train].1
        };
        if !truth.is_empty() {
            scored += 1;
            correct += usize::from(*truth == predicted);
        }
        rows.push(vec![
            paths[i].display().to_string(),
            predicted,
            truth.clone(),
        ]);
    }
    if let Some(out) = output {
        io::write_table(out, &["item", "predicted", "truth"], &rows).map_err(at(out))?;
    }
    let accuracy = (scored > 0).then(|| correct as f64 / scored as f64);
    report(json!({
        "command": "knn", "mode": if test.is_some() { "test" } else { "leave-one-out" },
        "k": k, "metric": metric.to_string(), "accuracy": accuracy, "scored": scored,
        "train": n_train, "test": test_items.len(), "scale": scale, "dim": diagram.dim.to_string(),
        "grid": params.k, "sigma": params.sigma,
    }));
    Ok(())
}

fn regress(
    items: &Path,
    d: usize,
    diagram: DiagramArgs,
    params: DensityParams,
    output: Option<&Path>,
) -> CliResult<()> {
    if d == 0 {
        return Err(CliError::param("components must be positive"));
    }
    let list = io::read_item_list(items).map_err(at(items))?;
    let scores = list
        .iter()
        .enumerate()
        .map(|(i, (_, v))| {
            v.parse::<f64>().map_err(|_| {
                CliError::new(
                    crate::error::Kind::Parse,
                    format!(
                        "{}: item {} score '{v}' is not a number",
                        items.display(),
                        i + 1
                    ),
                )
            })
        })
        .collect::<CliResult<Vec<f64>>>()?;
    let paths: Vec<PathBuf> = list.iter().map(|(p, _)| p.clone()).collect();
    let (scale, roots) = densities(&paths, diagram, params)?;
    // the PGA basis is fit on all items; it never sees the scores
    let (model, coords) = pga_features(&roots, d)?;
    let fit = loo_regression(&coords, &scores)?;
    if let Some(out) = output {
        let rows: Vec<Vec<String>> = paths
            .iter()
            .zip(&scores)
            .zip(&fit.predictions)
            .map(|((p, s), q)| vec![p.display().to_string(), s.to_string(), q.to_string()])
            .collect();
        io::write_table(out, &["item", "score", "predicted"], &rows).map_err(at(out))?;
    }
    report(json!({
        "command": "regress", "items": paths.len(), "components": d, "pearson_r": fit.pearson_r,
        "variances": model.variances, "grid": params.k, "sigma": params.sigma, "scale": scale,
    }));
    Ok(())
}

fn bench(
    n: usize,
    params: DensityParams,
    trials: usize,
    seed: u64,
    output: Option<&Path>,
) -> CliResult<()> {
    let r = benchmark(&BenchConfig {
        n_points: n,
        k: params.k,
        sigma: params.sigma,
        trials,
        seed,
    })?;
    let mut value = serde_json::to_value(&r).expect("report serializes");
    value["speedup"] = json!(r.speedup());
    match output {
        Some(path) => {
            io::write_json(path, &value).map_err(at(path))?;
            report(json!({"command": "bench", "speedup": r.speedup(), "output": path}));
        }
        None => report(value),
    }
    Ok(())
}

fn heatmap(input: &Path, output: &Path) -> CliResult<()> {
    let grid = io::read_grid_file(input).map_err(at(input))?;
    io::write_pgm_file(output, &grid).map_err(at(output))?;
    report(json!({"command": "heatmap", "grid": grid.k(), "output": output}));
    Ok(())
}

fn synth(
    classes: usize,
    per_class: usize,
    seed: u64,
    diagrams: bool,
    output_dir: &Path,
) -> CliResult<()> {
    let clouds = synthetic_clouds(classes, per_class, seed)?;
    let cloud_dir = output_dir.join("clouds");
    fs::create_dir_all(&cloud_dir).map_err(|e| at(&cloud_dir)(e.into()))?;
    let diagram_dir = output_dir.join("diagrams");
    if diagrams {
        fs::create_dir_all(&diagram_dir).map_err(|e| at(&diagram_dir)(e.into()))?;
    }

    let mut cloud_list = Vec::with_capacity(clouds.len());
    let mut diagram_list = Vec::new();
    for (i, c) in clouds.iter().enumerate() {
        let name = format!("{}_{:03}.csv", c.label, i % per_class);
        let path = cloud_dir.join(&name);
        io::write_point_cloud_file(&path, &c.cloud).map_err(at(&path))?;
        cloud_list.push((format!("clouds/{name}"), c.label.clone()));
        if diagrams {
            let (h0, h1) = cloud_diagrams(&c.cloud, f64::INFINITY, false)?;
            let dpath = diagram_dir.join(&name);
            io::write_diagrams_file(&dpath, &[&h0, &h1]).map_err(at(&dpath))?;
            diagram_list.push((format!("diagrams/{name}"), c.label.clone()));
        }
    }
    let list = output_dir.join("clouds.csv");
    io::write_item_list(&list, &cloud_list, "label").map_err(at(&list))?;
    if diagrams {
        let list = output_dir.join("items.csv");
        io::write_item_list(&list, &diagram_list, "label").map_err(at(&list))?;
    }
    report(json!({
        "command": "synth", "classes": classes, "per_class": per_class, "seed": seed,
        "clouds": clouds.len(), "diagrams": diagrams, "output_dir": output_dir,
    }));
    Ok(())
}
