//! The experiments behind each subcommand.
//!
//! Each part appends gates and estimates to a [`Report`] and returns early on
//! the first numerical error, leaving what it has already recorded in place.

use bargmann::algebra::{kc_quadrature, recommended_cutoff, AlgebraVector, C64};
use bargmann::diffop::{complexify_apply, fit_in_r_squared, radial_symbol_profile, LeftInvariantOperator};
use bargmann::euclid::{euclid_toeplitz_checks, EuclidCase};
use bargmann::heat::{analytic_norm, calibrate as pin_constants, calibration_residuals, euler_grid, semigroup_defect};
use bargmann::montecarlo::BlockedSums;
use bargmann::repr::{inner_product_k, left_derivative, BandLimited};
use bargmann::sde::{
    character_moment, character_moments_k, character_moments_kc, convergence_order, pathwise_medians, radial_ks,
    smooth_pathwise_residuals,
};
use bargmann::toeplitz::{schrodinger_target, sup_on_k, toeplitz_entries_mc, toeplitz_entries_phi1, ToeplitzCase};
use bargmann::transform::{adjoint_inversion, transform_c, unitarity_gram_defect};
use bargmann::{Result, Spin};
use serde_json::json;

use crate::config::{Config, FunctionSpec, LevelsSpec};
use crate::report::{pair, z_score, Estimate, Report};

fn spin(j: f64) -> Spin {
    Spin::from_f64(j).expect("validated spin")
}

fn build_all(specs: &[FunctionSpec]) -> Result<Vec<(String, BandLimited)>> {
    specs.iter().map(|s| Ok((s.name.clone(), s.build()?))).collect()
}

fn largest_spin<'a>(fs: impl IntoIterator<Item = &'a BandLimited>) -> Spin {
    fs.into_iter().map(|f| f.jmax()).max().unwrap_or(Spin::ZERO)
}

/// `|F|²` for `F` of spin `j` grows like `e^{2j|Y|}`.
fn cutoff_for(t: f64, j: Spin, given: Option<f64>) -> f64 {
    given.unwrap_or_else(|| recommended_cutoff(t, 2.0 * j.value()))
}

pub fn calibrate(cfg: &Config, r: &mut Report) -> Result<()> {
    let tol = cfg.calibrate.tolerance;
    let mut records = Vec::new();
    for &t in &cfg.calibrate.times {
        let cal = pin_constants(t)?;
        let id = format!("calibrate/t={t}");
        r.at_most(
            format!("{id}/mass"),
            "∫ ν_t dg = Vol(K) = 16π² (fitted constants)",
            cal.mass_residual.abs(),
            tol,
        );
        r.at_most(
            format!("{id}/unitarity-1/2"),
            "‖C_t D^{1/2}_00‖²_ν = ‖D^{1/2}_00‖² (fitted constants)",
            cal.unitarity_half_residual.abs(),
            tol,
        );
        r.at_most(
            format!("{id}/unitarity-1"),
            "‖C_t D^1_00‖²_ν = ‖D^1_00‖² (fitted constants)",
            cal.unitarity_one_residual.abs(),
            tol,
        );
        let norm = analytic_norm(t);
        let (mass, half) = calibration_residuals(t, 1.0, norm, Spin::HALF, cal.cutoff)?;
        let (_, whole) = calibration_residuals(t, 1.0, norm, Spin::ONE, cal.cutoff)?;
        r.at_most(
            format!("{id}/closed-form-mass"),
            "∫ ν_t dg = Vol(K) with β = 1, N(t)c_J = (πt)^{-3/2}e^{-t/4}",
            mass.abs(),
            tol,
        );
        r.at_most(
            format!("{id}/closed-form-unitarity-1/2"),
            "‖C_t D^{1/2}_00‖²_ν = ‖D^{1/2}_00‖² with β = 1, N(t)c_J = (πt)^{-3/2}e^{-t/4}",
            half.abs(),
            tol,
        );
        r.at_most(
            format!("{id}/closed-form-unitarity-1"),
            "‖C_t D^1_00‖²_ν = ‖D^1_00‖² with β = 1, N(t)c_J = (πt)^{-3/2}e^{-t/4}",
            whole.abs(),
            tol,
        );
        r.at_most(format!("{id}/beta"), "fitted β equals 1", (cal.beta - 1.0).abs(), tol);
        records.push(json!({
            "t": t,
            "beta": cal.beta,
            "norm_times_c_j": cal.norm_times_cj,
            "c_j": 1.0,
            "closed_form_norm": cal.analytic_norm,
            "radial_cutoff": cal.cutoff,
            "mass_residual": cal.mass_residual,
            "unitarity_half_residual": cal.unitarity_half_residual,
            "unitarity_one_residual": cal.unitarity_one_residual,
        }));
    }
    r.records.insert("calibration".into(), records.into());
    Ok(())
}

pub fn heat_check(cfg: &Config, r: &mut Report) -> Result<()> {
    let h = &cfg.heat_check;
    let grid = euler_grid(h.grid_points);
    for &[t, s] in &h.pairs {
        let defect = semigroup_defect(t, s, &grid)?;
        r.at_most(
            format!("semigroup/t={t},s={s}"),
            "sup_grid |ρ_t ⋆ ρ_s − ρ_{t+s}| = 0",
            defect,
            h.tolerance,
        );
    }
    Ok(())
}

pub fn transform_check(cfg: &Config, r: &mut Report) -> Result<()> {
    let tr = &cfg.transform_check;
    let top = spin(tr.max_spin);
    for &t in &tr.times {
        let levels = LevelsSpec::resolve(tr.quadrature, top)?;
        let rule = kc_quadrature(t, cutoff_for(t, top, tr.radial_cutoff), levels)?;
        let defect = unitarity_gram_defect(t, top, &rule);
        r.at_most(
            format!("unitarity/t={t}"),
            format!(
                "⟨C_t D_a, C_t D_b⟩_ν = ⟨D_a, D_b⟩_K over all entries of spin ≤ {}",
                top.value()
            ),
            defect,
            tr.tolerance,
        );
    }

    let adj = &tr.adjoint;
    let f = adj.function.build()?;
    let big_f = transform_c(adj.t, &f)?;
    let j = f.jmax();
    let xs = adj.elements();
    let (vals, cutoff) = adjoint_inversion(
        adj.t,
        &big_f,
        &xs,
        bargmann::algebra::KcLevels::for_spin(j),
        recommended_cutoff(adj.t, 2.0 * j.value()),
        adj.settle,
    )?;
    let mut worst = 0.0f64;
    for (i, (x, v)) in xs.iter().zip(&vals).enumerate() {
        let want = f.eval(x);
        worst = worst.max((v - want).norm());
        r.estimates.push(Estimate {
            id: format!("adjoint/t={}/point={i}", adj.t),
            identity: "(C_t^* C_t f)(x) = f(x)".into(),
            value: pair(*v),
            target: Some(pair(want)),
            ..Default::default()
        });
    }
    r.at_most(
        format!("adjoint/t={}", adj.t),
        "C_t^* C_t f = f pointwise",
        worst,
        adj.tolerance,
    );
    r.records.insert("adjoint_radial_cutoff".into(), cutoff.into());

    // Exact on coefficients, so only round-off is tolerated.
    let ops = [
        ("X3", LeftInvariantOperator::generator(2)),
        ("Laplacian", LeftInvariantOperator::laplacian()),
        (
            "X1X2 - 2X3",
            LeftInvariantOperator::from_terms(vec![(C64::new(1.0, 0.0), vec![0, 1]), (C64::new(-2.0, 0.0), vec![2])]),
        ),
    ];
    for (name, op) in ops {
        for &t in &tr.times {
            let lhs = transform_c(t, &left_derivative(&op, &f))?;
            let rhs = complexify_apply(&op, &transform_c(t, &f)?);
            let diff = (&lhs.0 - &rhs.0).norm_sqr().sqrt();
            let scale = 1.0 + lhs.0.norm_sqr().sqrt();
            r.at_most(
                format!("intertwining/t={t}/A={name}"),
                "C_t A f = A_ℂ C_t f for left-invariant A",
                diff / scale,
                1e-12,
            );
        }
    }
    Ok(())
}

fn moment_estimates(
    r: &mut Report,
    prefix: &str,
    identity: &str,
    sums: &BlockedSums,
    targets: &[(Spin, f64)],
    cfg: &Config,
    n_steps: usize,
) {
    for (i, &(j, want)) in targets.iter().enumerate() {
        let e = sums.estimate(i);
        let z = z_score(e.mean, C64::new(want, 0.0), e.stderr);
        let id = format!("{prefix}/j={}", j.value());
        r.estimates.push(Estimate {
            id: id.clone(),
            identity: identity.into(),
            value: pair(e.mean),
            target: Some([want, 0.0]),
            stderr: Some(e.stderr),
            z: Some(z),
            n_paths: Some(sums.n_paths),
            n_steps: Some(n_steps),
            master_seed: Some(cfg.master_seed),
        });
        r.blocks.push((id.clone(), sums.block_means(i)));
        r.at_most(id, identity, z, cfg.sde_check.z_max);
    }
}

pub fn sde_real_moments(cfg: &Config, r: &mut Report) -> Result<()> {
    let sde = &cfg.sde_check;
    let spins: Vec<Spin> = sde.spins.iter().map(|&j| spin(j)).collect();
    let sums = character_moments_k(sde.s, &spins, &cfg.mc(sde.n_paths, sde.n_steps))?;
    let targets: Vec<(Spin, f64)> = spins.iter().map(|&j| (j, character_moment(sde.s, 0.0, j))).collect();
    moment_estimates(
        r,
        &format!("real-moment/s={}", sde.s),
        "E χ_j(θ(A)_1) = (2j+1) e^{−s j(j+1)/2}",
        &sums,
        &targets,
        cfg,
        sde.n_steps,
    );
    Ok(())
}

pub fn sde_complex_moments(cfg: &Config, r: &mut Report) -> Result<()> {
    let sde = &cfg.sde_check;
    let spins: Vec<Spin> = sde.spins.iter().map(|&j| spin(j)).collect();
    for &[s, t] in &sde.complex_pairs {
        let sums = character_moments_kc(s, t, &spins, &cfg.mc(sde.n_paths, sde.n_steps))?;
        let targets: Vec<(Spin, f64)> = spins.iter().map(|&j| (j, character_moment(s, t, j))).collect();
        moment_estimates(
            r,
            &format!("complex-moment/s={s},t={t}"),
            "E χ_j(θ_ℂ(A + iB)_1) = (2j+1) e^{−(s−t) j(j+1)/2}",
            &sums,
            &targets,
            cfg,
            sde.n_steps,
        );
    }
    Ok(())
}

pub fn sde_pathwise(cfg: &Config, r: &mut Report) -> Result<()> {
    let pw = &cfg.sde_check.pathwise;
    let medians = pathwise_medians(pw.a_variance, pw.b_variance, pw.draws, &pw.steps, cfg.master_seed)?;
    for (&n, &m) in pw.steps.iter().zip(&medians) {
        r.estimates.push(Estimate {
            id: format!("pathwise/median/n_steps={n}"),
            identity: "median over draws of ‖θ_ℂ(A + iB)_1 − θ_ℂ(iB^{θ(A)})_1 θ(A)_1‖".into(),
            value: [m, 0.0],
            n_paths: Some(pw.draws),
            n_steps: Some(n),
            master_seed: Some(cfg.master_seed),
            ..Default::default()
        });
    }
    r.at_least(
        "pathwise/order",
        "θ_ℂ(A + iB)_1 = θ_ℂ(iB^{θ(A)})_1 θ(A)_1: log-log decay rate of the median residual",
        convergence_order(&pw.steps, &medians),
        pw.min_order,
    );
    let a = AlgebraVector::new(pw.smooth_a[0], pw.smooth_a[1], pw.smooth_a[2]);
    let b = AlgebraVector::new(pw.smooth_b[0], pw.smooth_b[1], pw.smooth_b[2]);
    let smooth = smooth_pathwise_residuals(a, b, &pw.steps)?;
    for (&n, &m) in pw.steps.iter().zip(&smooth) {
        r.estimates.push(Estimate {
            id: format!("pathwise/smooth/n_steps={n}"),
            identity: "pathwise residual along straight-line driving paths".into(),
            value: [m, 0.0],
            n_steps: Some(n),
            ..Default::default()
        });
    }
    r.at_least(
        "pathwise/smooth-order",
        "pathwise identity along straight-line paths converges like 1/n_steps",
        convergence_order(&pw.steps, &smooth),
        pw.smooth_min_order,
    );
    Ok(())
}

pub fn sde_radial_ks(cfg: &Config, r: &mut Report) -> Result<()> {
    let ks = &cfg.sde_check.radial_ks;
    if !ks.enabled {
        return Ok(());
    }
    let (stat, crit) = radial_ks(ks.s, ks.t, &cfg.mc(ks.n_paths, ks.n_steps))?;
    r.at_most(
        format!("radial-ks/s={},t={}", ks.s, ks.t),
        "polar radius of θ_ℂ(A + iB)_1 follows the radial law of ν_t (KS statistic vs 1% critical value)",
        stat,
        crit,
    );
    Ok(())
}

pub fn sde_check(cfg: &Config, r: &mut Report) -> Result<()> {
    sde_real_moments(cfg, r)?;
    sde_complex_moments(cfg, r)?;
    sde_pathwise(cfg, r)?;
    sde_radial_ks(cfg, r)
}

fn entry_id(t: f64, v: &str, a: Option<&str>, f1: &str, f2: &str) -> String {
    match a {
        None => format!("t={t}/V={v}/⟨{f1},{f2}⟩"),
        Some(a) => format!("t={t}/V={v}/A={a}/⟨{f1},{f2}⟩"),
    }
}

pub fn toeplitz_mult(cfg: &Config, r: &mut Report) -> Result<()> {
    let m = &cfg.toeplitz_mult;
    let pots = build_all(&m.potentials)?;
    let funcs = build_all(&m.functions)?;
    let mut cases = Vec::new();
    let mut labels = Vec::new();
    for (vn, v) in &pots {
        for (i, (n1, f1)) in funcs.iter().enumerate() {
            for (k, (n2, f2)) in funcs.iter().enumerate() {
                cases.push(ToeplitzCase::mult(v.clone(), f1.clone(), f2.clone()));
                labels.push((vn.clone(), v, n1.clone(), n2.clone(), i == k, f1));
            }
        }
    }
    let identity = "⟨F₁, T_{φ_V} F₂⟩_ν = ⟨f₁, e^{tΔ/4}Ṽ · f₂⟩ via ∫Ṽ(x) E[conj F₁ F₂](w x) dx";
    for &t in &m.times {
        let settings = cfg.mc(m.n_paths, m.n_steps);
        let ests = toeplitz_entries_mc(t, &cases, &settings)?;
        let mut largest = 0.0f64;
        let mut worst_stderr = 0.0f64;
        for (case, (est, (vn, v, n1, n2, diagonal, f))) in cases.iter().zip(ests.iter().zip(&labels)) {
            let target = schrodinger_target(t, case)?;
            let id = entry_id(t, vn, None, n1, n2);
            let z = z_score(est.value, target, est.stderr);
            largest = largest.max(target.norm());
            worst_stderr = worst_stderr.max(est.stderr);
            r.estimates.push(Estimate {
                id: id.clone(),
                identity: identity.into(),
                value: pair(est.value),
                target: Some(pair(target)),
                stderr: Some(est.stderr),
                z: Some(z),
                n_paths: Some(est.n_paths),
                n_steps: Some(est.n_steps),
                master_seed: Some(est.master_seed),
            });
            r.blocks.push((id.clone(), est.block_means.clone()));
            r.at_most(format!("entry/{id}"), identity, z, m.z_max);
            if *diagonal {
                let bound = sup_on_k(v) * f.norm_sqr();
                r.at_most(
                    format!("bounded/{id}"),
                    "|⟨F, T_{φ_V} F⟩| ≤ sup|Ṽ| ‖f‖² + 3 stderr",
                    est.value.norm(),
                    bound * (1.0 + 1e-12) + 3.0 * est.stderr,
                );
            }
        }
        r.at_most(
            format!("stderr/t={t}"),
            "largest stderr over the test matrix ≤ fraction of the largest entry magnitude",
            worst_stderr,
            m.stderr_fraction * largest,
        );
    }
    Ok(())
}

pub fn toeplitz_diff_stochastic(cfg: &Config, r: &mut Report) -> Result<()> {
    let d = &cfg.toeplitz_diff;
    let pots = build_all(&d.potentials)?;
    let funcs = build_all(&d.functions)?;
    let mut cases = Vec::new();
    let mut ids = Vec::new();
    for spec in &d.operators {
        let op = spec.build();
        for (vn, v) in &pots {
            for (n1, f1) in &funcs {
                for (n2, f2) in &funcs {
                    cases.push(ToeplitzCase {
                        v_tilde: v.clone(),
                        op: op.clone(),
                        f1: f1.clone(),
                        f2: f2.clone(),
                    });
                    ids.push(entry_id(d.t, vn, Some(&spec.name), n1, n2));
                }
            }
        }
    }
    let identity = "⟨F₁, T_{φ_{V,A}} F₂⟩_ν = ⟨f₁, e^{tΔ/4}Ṽ · A f₂⟩ via ∫Ṽ(x) E[conj F₁ (A_ℂF₂)](w x) dx";
    let ests = toeplitz_entries_mc(d.t, &cases, &cfg.mc(d.n_paths, d.n_steps))?;
    for ((case, est), id) in cases.iter().zip(&ests).zip(ids) {
        let target = schrodinger_target(d.t, case)?;
        let z = z_score(est.value, target, est.stderr);
        r.estimates.push(Estimate {
            id: id.clone(),
            identity: identity.into(),
            value: pair(est.value),
            target: Some(pair(target)),
            stderr: Some(est.stderr),
            z: Some(z),
            n_paths: Some(est.n_paths),
            n_steps: Some(est.n_steps),
            master_seed: Some(est.master_seed),
        });
        r.blocks.push((id.clone(), est.block_means.clone()));
        r.at_most(format!("entry/{id}"), identity, z, d.z_max);
    }
    Ok(())
}

pub fn toeplitz_diff_deterministic(cfg: &Config, r: &mut Report) -> Result<()> {
    let d = &cfg.toeplitz_diff;
    let det = &d.deterministic;
    if !det.enabled {
        return Ok(());
    }
    let t = d.t;
    let funcs = build_all(&d.functions)?;
    let top = largest_spin(funcs.iter().map(|(_, f)| f));
    let levels = LevelsSpec::resolve(det.quadrature, top)?;
    let cutoff = cutoff_for(t, top, det.radial_cutoff);
    let narrow = kc_quadrature(t, cutoff, levels)?;
    let wide = kc_quadrature(t, cutoff + 1.0, levels)?;
    let mut pairs = Vec::new();
    let mut names = Vec::new();
    for (n1, f1) in &funcs {
        for (n2, f2) in &funcs {
            pairs.push((f1.clone(), f2.clone()));
            names.push((n1, n2));
        }
    }
    let mut stability = serde_json::Map::new();
    for spec in &det.operators {
        let op = spec.build();
        let vals = toeplitz_entries_phi1(t, &op, &pairs, &narrow)?;
        let wider = toeplitz_entries_phi1(t, &op, &pairs, &wide)?;
        let mut moved = 0.0f64;
        for (((f1, f2), (n1, n2)), (v, w)) in pairs.iter().zip(&names).zip(vals.iter().zip(&wider)) {
            let af2 = left_derivative(&op, f2);
            let target = inner_product_k(f1, &af2);
            let scale = (f1.norm_sqr() * af2.norm_sqr()).sqrt();
            let scale = if scale > 0.0 { scale } else { 1.0 };
            moved = moved.max((w - v).norm() / scale);
            let id = format!("t={t}/V=1/A={}/⟨{n1},{n2}⟩", spec.name);
            r.estimates.push(Estimate {
                id: id.clone(),
                identity: "∫ conj F₁ F₂ φ_{1,A} ν_t dg = ⟨f₁, A f₂⟩".into(),
                value: pair(*v),
                target: Some(pair(target)),
                ..Default::default()
            });
            r.at_most(
                format!("symbol/{id}"),
                "∫ conj F₁ F₂ φ_{1,A} ν_t dg = ⟨f₁, A f₂⟩ (relative to ‖f₁‖‖Af₂‖)",
                (v - target).norm() / scale,
                det.tolerance,
            );
        }
        stability.insert(spec.name.clone(), moved.into());
    }
    r.records.insert("symbol_cutoff_stability".into(), stability.into());

    let n = det.profile_points;
    let radii: Vec<f64> = (0..n)
        .map(|i| det.profile_max_radius * i as f64 / (n - 1) as f64)
        .collect();
    let profile = radial_symbol_profile(&LeftInvariantOperator::laplacian(), t, &radii)?;
    let re: Vec<f64> = profile.iter().map(|p| p.re).collect();
    let imag = profile.iter().map(|p| p.im.abs()).fold(0.0, f64::max);
    let (a, b, worst) = fit_in_r_squared(&radii, &re);
    r.at_most(
        format!("profile/t={t}"),
        "φ_{1,Δ} on e^{irX₃} is a degree-1 polynomial in r² (max fit residual)",
        worst,
        det.profile_tolerance,
    );
    r.at_most(
        format!("profile-imaginary/t={t}"),
        "φ_{1,Δ} is real on e^{irX₃}",
        imag,
        det.profile_tolerance,
    );
    r.records.insert(
        "laplacian_symbol_fit".into(),
        json!({"t": t, "constant": a, "r_squared": b, "max_residual": worst}),
    );
    Ok(())
}

pub fn toeplitz_diff(cfg: &Config, r: &mut Report) -> Result<()> {
    toeplitz_diff_stochastic(cfg, r)?;
    toeplitz_diff_deterministic(cfg, r)
}

pub fn euclid_baseline(cfg: &Config, r: &mut Report) -> Result<()> {
    let e = &cfg.euclid_baseline;
    let funcs = e
        .functions
        .iter()
        .map(|s| Ok((s.name.clone(), s.build()?)))
        .collect::<Result<Vec<_>>>()?;
    let mut cases = Vec::new();
    let mut ids = Vec::new();
    for (vi, v) in e.potentials.iter().enumerate() {
        for (n1, f1) in &funcs {
            for (n2, f2) in &funcs {
                cases.push(EuclidCase {
                    v_tilde: v.clone(),
                    f1: f1.clone(),
                    f2: f2.clone(),
                });
                ids.push(format!("t={}/V=potentials[{vi}]/⟨{n1},{n2}⟩", e.t));
            }
        }
    }
    let reports = euclid_toeplitz_checks(e.t, &cases, &cfg.mc(e.n_paths, 1))?;
    for (rep, id) in reports.iter().zip(ids) {
        r.estimates.push(Estimate {
            id: format!("deterministic/{id}"),
            identity: "∫ conj F₁ Ṽ(Re z) F₂ ν_t = ⟨f₁, e^{tΔ/4}Ṽ · f₂⟩ on ℝ".into(),
            value: pair(rep.bargmann),
            target: Some(pair(rep.schrodinger)),
            ..Default::default()
        });
        r.estimates.push(Estimate {
            id: format!("mc/{id}"),
            identity: "E_b ∫ Ṽ(x) conj F₁ F₂(x + ib) dx = ⟨f₁, e^{tΔ/4}Ṽ · f₂⟩ on ℝ".into(),
            value: pair(rep.mc_value),
            target: Some(pair(rep.schrodinger)),
            stderr: Some(rep.mc_stderr),
            z: Some(rep.mc_z),
            n_paths: Some(e.n_paths),
            master_seed: Some(cfg.master_seed),
            ..Default::default()
        });
        r.blocks.push((format!("mc/{id}"), rep.mc_block_means.clone()));
        r.at_most(
            format!("deterministic/{id}"),
            "flat Toeplitz identity by exact Gauss–Hermite quadrature (relative)",
            rep.deterministic_residual,
            e.tolerance,
        );
        r.at_most(
            format!("mc/{id}"),
            "flat Toeplitz identity by the weak Monte Carlo estimator",
            rep.mc_z,
            e.z_max,
        );
    }
    Ok(())
}
