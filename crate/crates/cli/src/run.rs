//! Dispatch from a validated config to the library and back to a [`Report`].

use labelqm::correlated::{
    ambiguity_report, conditional_form_difference, joint_distribution_with, sample_pair, CorrelatedPairEnsemble,
    JointSemantics,
};
use labelqm::hilbert::{born_probabilities, Observable, QuantumState};
use labelqm::labels::{
    discrete_wigner, phase_space_label_state, reinject, weight_table, z_table, PhaseSpaceGrid, ZTable,
};
use labelqm::measurement::{direct_distribution, order_comparison, sample_protocol};
use labelqm::spin::{
    conditional_ensemble, deviation_sweep, direction_in_xz, singlet_sample, spin_amplitude, DirectionScheme,
    DirectionSet, SpinLabel,
};
use labelqm::two_slit::{pattern, sample_twoslit, slit_amplitudes, slit_conditionals, ScreenSemantics};
use labelqm::{rng, C64};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{Experiment, ExperimentConfig, GridConfig, Wavefunction};
use crate::emit::{jmatrix, jnum, jvec, num, CsvTable, Report};

#[derive(Debug, thiserror::Error)]
#[error("{experiment} experiment failed: {source}")]
pub struct RunError {
    pub experiment: &'static str,
    #[source]
    pub source: labelqm::Error,
}

type Result<T> = std::result::Result<T, labelqm::Error>;

/// Hex SHA-256 of the canonical config text.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let digest = Sha256::digest(config.canonical_text().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn run_experiment(config: &ExperimentConfig) -> std::result::Result<Report, RunError> {
    let mut report = Report {
        experiment: config.experiment,
        config_hash: config_hash(config),
        seed: config.seed(),
        config: serde_json::to_value(config).expect("config serializes"),
        summary: Vec::new(),
        tables: Vec::new(),
        sidecars: Vec::new(),
        results: Value::Null,
    };
    let outcome = match config.experiment {
        Experiment::Weights => weights(config, &mut report),
        Experiment::Ztable if config.grid.is_some() => ztable_grid(config, &mut report),
        Experiment::Ztable => ztable(config, &mut report),
        Experiment::Wigner => wigner(config, &mut report),
        Experiment::Sequence => sequence(config, &mut report),
        Experiment::Order => order(config, &mut report),
        Experiment::Pair => pair(config, &mut report),
        Experiment::Ambiguity => ambiguity(config, &mut report),
        Experiment::Spin => spin(config, &mut report),
        Experiment::Singlet => singlet(config, &mut report),
        Experiment::Twoslit => twoslit(config, &mut report),
    };
    outcome.map_err(|source| RunError { experiment: config.experiment.name(), source })?;
    Ok(report)
}

fn state(config: &ExperimentConfig) -> Result<QuantumState> {
    QuantumState::new(config.state_amplitudes())
}

fn named(config: &ExperimentConfig, name: &Option<String>) -> Result<Observable> {
    config.build_observable(name.as_deref().unwrap_or(""))
}

fn sampling(config: &ExperimentConfig) -> Result<(u64, u64)> {
    config
        .sampling
        .as_ref()
        .map(|s| (s.n_samples, s.seed))
        .ok_or_else(|| labelqm::Error::InvalidArgument("sampling section required".into()))
}

fn summary(report: &mut Report, key: &str, value: impl Into<String>) {
    report.summary.push((key.to_string(), value.into()));
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn weights(config: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let s = state(config)?;
    let (a, b) = (named(config, &config.a)?, named(config, &config.b)?);
    let w = weight_table(&s, &a, &b)?;
    let target_a = born_probabilities(&s, &a)?;
    let target_b = born_probabilities(&s, &b)?;
    let (rows, cols) = (w.row_sums(), w.column_sums());
    let err = max_abs_diff(&rows, &target_a).max(max_abs_diff(&cols, &target_b));

    let mut t = CsvTable::new("weights", &["i", "j", "w"]);
    let n = s.dim();
    for i in 0..n {
        for j in 0..n {
            t.push(vec![i.to_string(), j.to_string(), num(w.values[(i, j)])]);
        }
    }
    for (i, r) in rows.iter().enumerate() {
        t.push(vec![i.to_string(), "sum".into(), num(*r)]);
    }
    for (j, c) in cols.iter().enumerate() {
        t.push(vec!["sum".into(), j.to_string(), num(*c)]);
    }
    report.tables.push(t);
    summary(report, "max_marginal_error", format!("{err:.3e}"));
    summary(report, "max_imaginary", format!("{:.3e}", w.max_imaginary));
    summary(report, "min_weight", format!("{:.6}", w.min()));
    report.results = json!({
        "values": jmatrix(&w.values),
        "row_sums": jvec(&rows),
        "column_sums": jvec(&cols),
        "target_a": jvec(&target_a),
        "target_b": jvec(&target_b),
        "max_marginal_error": jnum(err),
        "max_imaginary": jnum(w.max_imaginary),
        "min_weight": jnum(w.min()),
    });
    Ok(())
}

fn ztable_csv(name: &str, t: &ZTable) -> CsvTable {
    let mut csv = CsvTable::new(name, &["i", "j", "re", "im"]);
    for i in 0..t.dim() {
        for j in 0..t.dim() {
            let z = t.value(i, j);
            csv.push(vec![i.to_string(), j.to_string(), num(z.re), num(z.im)]);
        }
    }
    csv
}

fn ztable_json(t: &ZTable) -> Value {
    let values = t.values();
    json!({
        "re": jmatrix(&values.map(|z| z.re)),
        "im": jmatrix(&values.map(|z| z.im)),
        "gauge_a": jvec(&t.gauge_a),
        "gauge_b": jvec(&t.gauge_b),
        "residual": jnum(t.residual),
        "restart": t.restart,
        "iterations": t.iterations,
    })
}

fn ztable(config: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let s = state(config)?;
    let (a, b) = (named(config, &config.a)?, named(config, &config.b)?);
    let params = config.solver.clone().unwrap_or_default().params();
    let t = z_table(&s, &a, &b, &params)?;
    report.tables.push(ztable_csv("ztable", &t));
    summary(report, "residual", format!("{:.3e}", t.residual));
    summary(report, "restart", t.restart.to_string());
    summary(report, "iterations", t.iterations.to_string());
    report.results = ztable_json(&t);
    Ok(())
}

fn grid(g: &GridConfig) -> Result<PhaseSpaceGrid> {
    let dx = g.dx.unwrap_or_else(|| PhaseSpaceGrid::balanced_dx(g.n_points, g.hbar));
    match g.wavefunction {
        Wavefunction::Gaussian { x0, p0, sigma } => PhaseSpaceGrid::gaussian(g.n_points, dx, g.hbar, x0, p0, sigma),
        Wavefunction::TwoPeak { separation, sigma } => {
            PhaseSpaceGrid::two_peak(g.n_points, dx, g.hbar, separation, sigma)
        }
    }
}

fn ztable_grid(config: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let gc = config.grid.as_ref().expect("dispatched on grid");
    let g = grid(gc)?;
    let n = g.n_points();
    let labeled = phase_space_label_state(&g, gc.x0_index.unwrap_or(n / 2), gc.p0_index.unwrap_or(n / 2))?;
    let params = config.solver.clone().unwrap_or_default().params();
    let fitted = reinject(&g, &labeled, &params)?;
    report.tables.push(ztable_csv("ztable_phase_space", &labeled.table));
    report.tables.push(ztable_csv("ztable", &fitted));
    summary(report, "proportionality_residual", format!("{:.3e}", labeled.proportionality_residual));
    summary(report, "reinjected_residual", format!("{:.3e}", fitted.residual));
    summary(report, "restart", fitted.restart.to_string());
    report.results = json!({
        "x0_index": labeled.x0_index,
        "p0_index": labeled.p0_index,
        "proportionality_residual": jnum(labeled.proportionality_residual),
        "factor": [jnum(labeled.factor.re), jnum(labeled.factor.im)],
        "phase_space_table": ztable_json(&labeled.table),
        "reinjected": ztable_json(&fitted),
    });
    Ok(())
}

fn wigner(config: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let g = grid(config.grid.as_ref().expect("validated"))?;
    let w = discrete_wigner(&g)?;
    let n = g.n_points();
    let px: Vec<f64> = g.psi_x().iter().map(|z| z.norm_sqr()).collect();
    let pp: Vec<f64> = g.xi_p().iter().map(|z| z.norm_sqr()).collect();
    let ex = max_abs_diff(&w.position_marginal(), &px);
    let ep = max_abs_diff(&w.momentum_marginal(), &pp);

    let mut t = CsvTable::new("wigner", &["x", "p", "w"]);
    for k in 0..n {
        for m in 0..n {
            t.push(vec![num(w.x[k]), num(w.p[m]), num(w.values[(k, m)])]);
        }
    }
    report.tables.push(t);
    let meta = json!({
        "n_points": n,
        "dx": jnum(w.dx),
        "dp": jnum(w.dp),
        "hbar": jnum(w.hbar),
        "total": jnum(w.total()),
        "min": jnum(w.min()),
        "max_imaginary": jnum(w.max_imaginary),
        "position_marginal_error": jnum(ex),
        "momentum_marginal_error": jnum(ep),
    });
    report.sidecars.push(("wigner_meta".into(), meta.clone()));
    summary(report, "total", format!("{:.12}", w.total()));
    summary(report, "min", format!("{:.6e}", w.min()));
    summary(report, "position_marginal_error", format!("{ex:.3e}"));
    summary(report, "momentum_marginal_error", format!("{ep:.3e}"));
    let mut results = meta;
    results["x"] = jvec(&w.x);
    results["p"] = jvec(&w.p);
    results["values"] = jmatrix(&w.values);
    report.results = results;
    Ok(())
}

fn sequence(config: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let s = state(config)?;
    let names = config.protocol.clone().unwrap_or_default();
    let observables: Vec<Observable> = names.iter().map(|n| config.build_observable(n)).collect::<Result<_>>()?;
    let (n_samples, seed) = sampling(config)?;

    // exact chain probabilities of every outcome tuple
    let mut chain: Vec<(Vec<usize>, f64)> =
        born_probabilities(&s, &observables[0])?.into_iter().enumerate().map(|(i, p)| (vec![i], p)).collect();
    for w in observables.windows(2) {
        let t = w[0].overlaps(&w[1])?.map(|z| z.norm_sqr());
        chain = chain
            .into_iter()
            .flat_map(|(path, p)| {
                let last = *path.last().unwrap();
                (0..w[1].dim())
                    .map(|k| {
                        let mut next = path.clone();
                        next.push(k);
                        (next, p * t[(last, k)])
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }

    let protocol: Vec<(&str, &Observable)> = names.iter().map(String::as_str).zip(&observables).collect();
    let record = sample_protocol(&s, &protocol, n_samples, seed)?;

    let mut t = CsvTable::new("sequence", &["outcome", "probability", "count", "frequency"]);
    for (path, p) in &chain {
        let count = record.count(path);
        let label: Vec<String> = path.iter().map(usize::to_string).collect();
        t.push(vec![label.join("-"), num(*p), count.to_string(), num(count as f64 / n_samples as f64)]);
    }
    report.tables.push(t);

    let last = observables.last().unwrap();
    let steps = observables.len();
    let direct = direct_distribution(&s, &observables[0], last)?;
    let mut sequential = vec![0.0; last.dim()];
    for (path, p) in &chain {
        sequential[path[steps - 1]] += p;
    }
    let empirical = record.marginal_frequencies(steps - 1);
    let mut d = CsvTable::new("sequence_final", &["i", "direct", "sequential", "empirical"]);
    for i in 0..last.dim() {
        d.push(vec![i.to_string(), num(direct[i]), num(sequential[i]), num(empirical[i])]);
    }
    report.tables.push(d);
    summary(report, "protocol", names.join(" -> "));
    summary(report, "direct", list(&direct));
    summary(report, "sequential", list(&sequential));
    summary(report, "empirical", list(&empirical));
    report.results = json!({
        "protocol": names,
        "n_samples": n_samples,
        "direct": jvec(&direct),
        "sequential": jvec(&sequential),
        "empirical": jvec(&empirical),
        "outcomes": chain.iter().map(|(path, p)| json!({
            "outcome": path,
            "probability": jnum(*p),
            "count": record.count(path),
        })).collect::<Vec<_>>(),
    });
    Ok(())
}

fn order(config: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let s = state(config)?;
    let (a, b) = (named(config, &config.a)?, named(config, &config.b)?);
    let r = order_comparison(&s, &a, &b)?;
    let mut t = CsvTable::new("order", &["i", "j", "a_first", "b_first"]);
    for i in 0..s.dim() {
        for j in 0..s.dim() {
            t.push(vec![i.to_string(), j.to_string(), num(r.a_first[(i, j)]), num(r.b_first[(i, j)])]);
        }
    }
    report.tables.push(t);
    summary(report, "tv_distance", format!("{:.12}", r.tv_distance));
    summary(report, "order_sensitive", r.order_sensitive.to_string());
    report.results = json!({
        "a_first": jmatrix(&r.a_first),
        "b_first": jmatrix(&r.b_first),
        "tv_distance": jnum(r.tv_distance),
        "order_sensitive": r.order_sensitive,
    });
    Ok(())
}

fn pair_ensemble(config: &ExperimentConfig) -> Result<(CorrelatedPairEnsemble, Observable)> {
    let z_b: Vec<C64> = config.state_amplitudes();
    let basis = named(config, &config.b)?;
    let a = named(config, &config.a)?;
    Ok((CorrelatedPairEnsemble::new(z_b, basis)?, a))
}

fn pair(config: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let (pair, a) = pair_ensemble(config)?;
    let pc = config.pair.clone().unwrap_or_default();
    let tables: Vec<_> = JointSemantics::ALL
        .iter()
        .map(|&s| joint_distribution_with(&pair, &a, s, pc.conditional))
        .collect::<Result<_>>()?;
    let amb = ambiguity_report(&pair, &a)?;
    let form_gap = conditional_form_difference(&pair, &a)?;

    let mut t = CsvTable::new("pair", &["i", "j", "label_theory", "orthodox_b_first", "orthodox_a_first"]);
    let n = pair.dim();
    for i in 0..n {
        for j in 0..n {
            t.push(vec![
                i.to_string(),
                j.to_string(),
                num(tables[2].table[(i, j)]),
                num(tables[0].table[(i, j)]),
                num(tables[1].table[(i, j)]),
            ]);
        }
    }
    report.tables.push(t);
    summary(report, "tv_distance", format!("{:.12}", amb.tv_distance));
    summary(report, "tv_label_vs_b_first", format!("{:.12}", amb.tv_label_vs_b_first));
    summary(report, "b_marginal_label", list(&amb.b_marginal_label));
    summary(report, "b_marginal_orthodox", list(&amb.b_marginal_orthodox));
    summary(report, "conditional_form_difference", format!("{form_gap:.3e}"));

    let mut results = json!({
        "conditional": pc.conditional,
        "label_theory": jmatrix(&tables[2].table),
        "orthodox_b_first": jmatrix(&tables[0].table),
        "orthodox_a_first": jmatrix(&tables[1].table),
        "tv_distance": jnum(amb.tv_distance),
        "tv_label_vs_b_first": jnum(amb.tv_label_vs_b_first),
        "marginal_deviation": jvec(&amb.marginal_deviation),
        "conditional_form_difference": jnum(form_gap),
    });
    if let Some(s) = &config.sampling {
        let rec = sample_pair(&pair, &a, pc.semantics, s.n_samples, s.seed)?;
        let mut c = CsvTable::new("pair_counts", &["i", "j", "count", "frequency"]);
        for i in 0..n {
            for j in 0..n {
                let k = rec.count(&[i, j]);
                c.push(vec![i.to_string(), j.to_string(), k.to_string(), num(k as f64 / s.n_samples as f64)]);
            }
        }
        report.tables.push(c);
        summary(report, "sampled_semantics", pc.semantics.name());
        results["sampled_semantics"] = json!(pc.semantics.name());
        results["counts"] =
            Value::Array((0..n).map(|i| Value::Array((0..n).map(|j| json!(rec.count(&[i, j]))).collect())).collect());
    }
    report.results = results;
    Ok(())
}

fn ambiguity(config: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let (pair, a) = pair_ensemble(config)?;
    let r = ambiguity_report(&pair, &a)?;
    let unmeasured = born_probabilities(&pair.state_a(), &a)?;
    let mut t = CsvTable::new("ambiguity", &["j", "b_marginal_label", "b_marginal_orthodox", "marginal_deviation"]);
    for j in 0..pair.dim() {
        t.push(vec![
            j.to_string(),
            num(r.b_marginal_label[j]),
            num(r.b_marginal_orthodox[j]),
            num(r.marginal_deviation[j]),
        ]);
    }
    report.tables.push(t);
    summary(report, "tv_distance", format!("{:.12}", r.tv_distance));
    summary(report, "ambiguous", r.ambiguous.to_string());
    summary(report, "divergent_from_orthodox", r.divergent_from_orthodox.to_string());
    summary(report, "marginal_deviation", list(&r.marginal_deviation));
    report.results = json!({
        "tv_distance": jnum(r.tv_distance),
        "tv_label_vs_b_first": jnum(r.tv_label_vs_b_first),
        "marginal_deviation": jvec(&r.marginal_deviation),
        "ambiguous": r.ambiguous,
        "divergent_from_orthodox": r.divergent_from_orthodox,
        "unmeasured_a_distribution": jvec(&unmeasured),
        "orthodox_b_first": jmatrix(&r.orthodox_b_first),
        "orthodox_a_first": jmatrix(&r.orthodox_a_first),
        "label_theory": jmatrix(&r.label_theory),
    });
    Ok(())
}

/// Exhaustive structure checks on the Fibonacci set with `k` directions.
fn spin_structure(k: usize) -> Result<Value> {
    let dirs = DirectionSet::generate(k, DirectionScheme::FibonacciHemisphere, 0)?;
    let (mut antisymmetric, mut real_zero) = (true, true);
    for bits in 0..1u64 << k {
        let f = SpinLabel::from_bits(k, bits);
        let psi = spin_amplitude(&f, &dirs)?;
        antisymmetric &= spin_amplitude(&f.flipped(), &dirs)? == -psi;
        real_zero &= psi.w == 0.0;
    }
    let mut worst = 0.0_f64;
    for n0 in 0..k {
        let ens = conditional_ensemble(n0, &dirs)?;
        let total: f64 = ens.iter().map(|(_, w)| w).sum();
        worst = worst.max((total - 1.0).abs());
        if ens.iter().any(|(_, w)| *w < 0.0) {
            worst = f64::INFINITY;
        }
    }
    Ok(json!({
        "k": k,
        "antisymmetric": antisymmetric,
        "real_part_zero": real_zero,
        "ensemble_normalization_error": jnum(worst),
        "min_line_angle_deg": jnum(dirs.min_line_angle_deg()),
    }))
}

fn spin(config: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let sc = config.spin.clone().unwrap_or_default();
    let structure: Vec<Value> = (1..=sc.structure_k).map(spin_structure).collect::<Result<_>>()?;
    let all_ok = structure.iter().all(|s| {
        s["antisymmetric"] == true
            && s["real_part_zero"] == true
            && s["ensemble_normalization_error"].as_f64().is_some_and(|e| e <= 1e-12)
    });
    summary(report, "structure_checks", format!("K=1..={}: {}", sc.structure_k, if all_ok { "pass" } else { "FAIL" }));
    let mut sweeps = Vec::new();
    for &k in &sc.k {
        let rows = deviation_sweep(k)?;
        let mut t = CsvTable::new(
            format!("spin_deviation_k{k}"),
            &["theta_deg", "label_conditional", "quantum_conditional", "deviation"],
        );
        for r in &rows {
            t.push(vec![num(r.theta_deg), num(r.label_conditional), num(r.quantum_conditional), num(r.deviation)]);
        }
        report.tables.push(t);
        let worst = rows.iter().map(|r| r.deviation.abs()).fold(0.0, f64::max);
        summary(report, &format!("max_deviation_k{k}"), format!("{worst:.6}"));
        sweeps.push(json!({
            "k": k,
            "max_abs_deviation": jnum(worst),
            "rows": rows.iter().map(|r| json!({
                "theta_deg": jnum(r.theta_deg),
                "label_conditional": jnum(r.label_conditional),
                "quantum_conditional": jnum(r.quantum_conditional),
                "deviation": jnum(r.deviation),
            })).collect::<Vec<_>>(),
        }));
    }
    report.results = json!({ "structure": structure, "deviation_sweeps": sweeps });
    Ok(())
}

fn singlet(config: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let sc = config.singlet.clone().unwrap_or_default();
    let (n_samples, seed) = sampling(config)?;
    let n = direction_in_xz(0.0);
    let mut t = CsvTable::new("singlet", &["theta_deg", "empirical_E", "analytic_E", "n_samples"]);
    let mut rows = Vec::new();
    for (idx, &theta) in sc.angles_deg.iter().enumerate() {
        let est = singlet_sample(n, direction_in_xz(theta), n_samples, rng::derive_seed(seed, idx as u64))?;
        t.push(vec![num(theta), num(est.correlation), num(est.analytic), n_samples.to_string()]);
        summary(report, &format!("theta={theta}"), format!("E={:+.5} analytic={:+.5}", est.correlation, est.analytic));
        rows.push(json!({
            "theta_deg": jnum(theta),
            "empirical_E": jnum(est.correlation),
            "analytic_E": jnum(est.analytic),
            "mean_a": jnum(est.mean_a),
            "mean_b": jnum(est.mean_b),
            "n_samples": n_samples,
        }));
    }
    report.tables.push(t);
    report.results = json!({ "angles": rows });
    Ok(())
}

fn twoslit(config: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let gc = config.geometry.clone().unwrap_or_default();
    let amps = slit_amplitudes(&gc.slits)?;
    let label = pattern(&amps, ScreenSemantics::Label);
    let orth = pattern(&amps, ScreenSemantics::Orthodox);
    let cond = slit_conditionals(&amps);
    let mut t = CsvTable::new("twoslit", &["x", "intensity_label", "intensity_orthodox", "p_l", "p_r", "defined"]);
    for i in 0..amps.positions.len() {
        t.push(vec![
            num(amps.positions[i]),
            num(label.intensity[i]),
            num(orth.intensity[i]),
            num(cond.p_l[i]),
            num(cond.p_r[i]),
            cond.defined[i].to_string(),
        ]);
    }
    report.tables.push(t);
    let sum_err = (0..amps.positions.len())
        .filter(|&i| cond.defined[i])
        .map(|i| (cond.p_l[i] + cond.p_r[i] - 1.0).abs())
        .fold(0.0, f64::max);
    summary(report, "visibility_label", format!("{:.12}", label.visibility));
    summary(report, "visibility_orthodox", format!("{:.12}", orth.visibility));
    summary(report, "max_conditional_sum_error", format!("{sum_err:.3e}"));
    let mut results = json!({
        "visibility_label": jnum(label.visibility),
        "visibility_orthodox": jnum(orth.visibility),
        "max_conditional_sum_error": jnum(sum_err),
        "positions": jvec(&amps.positions),
        "intensity_label": jvec(&label.intensity),
        "intensity_orthodox": jvec(&orth.intensity),
        "p_l": jvec(&cond.p_l),
        "defined": cond.defined,
    });
    if let Some(s) = &config.sampling {
        let counts = sample_twoslit(&gc.slits, ScreenSemantics::Label, s.n_samples, s.seed, gc.tag_fidelity)?;
        let mut c = CsvTable::new("twoslit_counts", &["x", "hits", "tag_l", "tag_r", "p_l"]);
        for i in 0..amps.positions.len() {
            c.push(vec![
                num(amps.positions[i]),
                counts.hits(i).to_string(),
                counts.counts_l[i].to_string(),
                counts.counts_r[i].to_string(),
                num(cond.p_l[i]),
            ]);
        }
        report.tables.push(c);
        summary(report, "sampled_hits", counts.n_samples.to_string());
        results["counts_l"] = json!(counts.counts_l);
        results["counts_r"] = json!(counts.counts_r);
        results["tag_fidelity"] = jnum(gc.tag_fidelity);
    }
    report.results = results;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use labelqm::hilbert::amplitudes;

    #[test]
    fn hash_depends_on_content() {
        let a = parse_config(r#"{"experiment": "spin", "spin": {"k": [4]}}"#).unwrap();
        let b = parse_config(r#"{"experiment": "spin", "spin": {"k": [6]}}"#).unwrap();
        assert_ne!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
        // whitespace and key order do not matter
        let c = parse_config("{ \"spin\": {\"k\": [4]},\n \"experiment\": \"spin\" }").unwrap();
        assert_eq!(config_hash(&a), config_hash(&c));
    }

    #[test]
    fn amplitudes_used_for_pair_state() {
        let c = parse_config(
            r#"{"experiment": "pair", "dim": 2, "state": [[0.6, 0], [0.8, 0]], "a": "hadamard", "b": "computational"}"#,
        )
        .unwrap();
        let (pair, _) = pair_ensemble(&c).unwrap();
        let z = amplitudes(&pair.state_a(), pair.basis_a()).unwrap();
        assert!((z[0].re - 0.6).abs() < 1e-15 && (z[1].re - 0.8).abs() < 1e-15);
    }
}
