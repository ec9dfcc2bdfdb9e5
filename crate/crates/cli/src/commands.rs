use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use kgscope::dyadic::{psi_star_table_for, z_norm, DyadicParams, FourierField};
use kgscope::growthlab::{degenerate_config, growth_csv, iterate, IterationSpec};
use kgscope::resonance::certify::{certify_lower_bounds, CertifyRegion, LemmaId};
use kgscope::resonance::{analyze, check_nondegeneracy, level_set_volume, VolumeQuantity, VolumeSpec};
use kgscope::solver::RunConfig;
use kgscope::{NumericsSettings, SystemConfig};

use crate::output::{Failure, OutDir, Outcome, RunManifest, VIOLATED};
use crate::{AnalyzeArgs, Cli, Command, GrowthArgs, QuantityArg, VerifyArgs, VolumeArgs, ZnormArgs};

pub fn run(cli: &Cli, arguments: &[String]) -> Outcome<u8> {
    let start = Instant::now();
    let g = &cli.global;
    let (name, result) = match &cli.command {
        Command::Analyze(a) => ("analyze", with_out(g, |out| cmd_analyze(cli, a, out))),
        Command::VerifyLemmas(a) => ("verify-lemmas", with_out(g, |out| cmd_verify(cli, a, out))),
        Command::Simulate => ("simulate", with_out(g, |out| cmd_simulate(cli, out))),
        Command::Znorm(a) => ("znorm", with_out(g, |out| cmd_znorm(cli, a, out))),
        Command::Growth(a) => ("growth", with_out(g, |out| cmd_growth(cli, a, out))),
        Command::Volume(a) => ("volume", with_out(g, |out| cmd_volume(cli, a, out))),
    };
    let (code, out) = result?;
    out.finish(RunManifest {
        command: name.to_string(),
        arguments: arguments.to_vec(),
        config: g.config.clone(),
        output_dir: g.out.clone(),
        seed: g.seed,
        threads: g.threads,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        outputs: Vec::new(),
        exit_code: code,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })?;
    Ok(code)
}

fn with_out(g: &crate::Global, f: impl FnOnce(&mut OutDir) -> Outcome<u8>) -> Outcome<(u8, OutDir)> {
    let mut out = OutDir::create(&g.out)?;
    let code = f(&mut out)?;
    Ok((code, out))
}

fn config_path(cli: &Cli) -> Outcome<&Path> {
    cli.global
        .config
        .as_deref()
        .ok_or_else(|| Failure::usage("--config is required for this command"))
}

fn system(cli: &Cli) -> Outcome<SystemConfig> {
    Ok(SystemConfig::from_path(config_path(cli)?)?)
}

fn triple_file(t: kgscope::PhaseTriple) -> String {
    let [s, m, n] = t.as_array();
    format!("triples/triple_{s}_{m}_{n}.csv")
}

fn report_violations(report: &kgscope::resonance::NondegeneracyReport) {
    for f in report.unsigned.iter().filter(|f| !f.pass()) {
        let mut why = Vec::new();
        if !f.mass_ok {
            why.push(format!("mass defect {} vanishes", f.mass_defect));
        }
        if !f.speed_mass_ok {
            why.push(format!("speed-mass product {} is negative", f.speed_mass_product));
        }
        eprintln!("kgscope: hypotheses violated at {}: {}", f.triple, why.join("; "));
    }
}

fn cmd_analyze(cli: &Cli, a: &AnalyzeArgs, out: &mut OutDir) -> Outcome<u8> {
    let config = system(cli)?;
    let mut settings = NumericsSettings::default();
    if let Some(p) = a.points {
        settings.psi_scan_points = p;
    }
    let report = analyze(&config, a.s_max, &settings)?;
    out.write_json("report.json", &report)?;
    for t in &report.triples {
        let mut buf = Vec::new();
        t.write_csv(&mut buf).expect("writing to memory");
        out.write(&triple_file(t.triple), buf)?;
    }
    let roots: usize = report.triples.iter().map(|t| t.roots.len()).sum();
    println!(
        "nondegeneracy {}; {} triples, {} roots of Ψ",
        if report.nondegeneracy.pass { "holds" } else { "fails" },
        report.triples.len(),
        roots
    );
    if report.nondegeneracy.pass {
        Ok(0)
    } else {
        report_violations(&report.nondegeneracy);
        Ok(VIOLATED)
    }
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs, out: &mut OutDir) -> Outcome<u8> {
    let config = system(cli)?;
    let lemmas: Vec<LemmaId> = if a.lemmas.is_empty() {
        LemmaId::ALL.to_vec()
    } else {
        a.lemmas.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
    };
    let mut region = CertifyRegion::default();
    region.k_lo = a.k_lo.unwrap_or(region.k_lo);
    region.k_hi = a.k_hi.unwrap_or(region.k_hi);
    region.per_octave = a.per_octave.unwrap_or(region.per_octave);
    region.n_theta = a.n_theta.unwrap_or(region.n_theta);
    region.d0 = a.d0.unwrap_or(region.d0);
    let report = certify_lower_bounds(&config, &region, &lemmas, cli.global.refine)?;
    out.write_json("certification.json", &report)?;
    for l in &report.lemmas {
        let mut line = format!("{}: minimum {} (all triples {})", l.id, l.minimum, l.minimum_all_triples);
        if let (Some(m), Some(d)) = (l.refined_minimum, l.relative_change) {
            let _ = write!(line, ", refined {m}, change {d}");
        }
        if let Some(z) = l.max_zero_count {
            let _ = write!(line, ", max zeros {z}");
        }
        println!("{line}");
    }
    let nd = check_nondegeneracy(&config);
    if nd.pass {
        Ok(0)
    } else {
        report_violations(&nd);
        Ok(VIOLATED)
    }
}

fn cmd_simulate(cli: &Cli, out: &mut OutDir) -> Outcome<u8> {
    let run = RunConfig::from_path(config_path(cli)?)?;
    let (solver, state) = run.build()?;
    let result = solver.run(state, &run.schedule, &run.diagnostics, false)?;
    out.write("diagnostics.csv", result.series.to_csv_string()?)?;
    println!("{} records to t = {}", result.series.records.len(), result.final_state.t);
    Ok(0)
}

fn cmd_znorm(cli: &Cli, a: &ZnormArgs, out: &mut OutDir) -> Outcome<u8> {
    let config = system(cli)?;
    let params: DyadicParams = match &a.params {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?
        }
        None => DyadicParams::default(),
    };
    if a.fields.len() > config.d() {
        return Err(Failure::usage(format!(
            "{} fields given for {} species",
            a.fields.len(),
            config.d()
        )));
    }
    let fields = a
        .fields
        .iter()
        .map(FourierField::read)
        .collect::<Result<Vec<_>, _>>()?;
    if fields.iter().any(|f| !f.same_lattice(&fields[0])) {
        return Err(Failure::usage("fields live on different lattices"));
    }
    let table = psi_star_table_for(&config, &fields[0], &params, &NumericsSettings::default())?;
    let value = z_norm(&fields, &table, &params)?;
    out.write_json(
        "znorm.json",
        &serde_json::json!({ "znorm": value, "fields": a.fields, "params": params }),
    )?;
    println!("{value}");
    Ok(0)
}

fn cmd_growth(cli: &Cli, a: &GrowthArgs, out: &mut OutDir) -> Outcome<u8> {
    let config = match &cli.global.config {
        Some(p) => SystemConfig::from_path(p)?,
        None => degenerate_config(),
    };
    let mut base: IterationSpec = match &a.spec {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?
        }
        None => IterationSpec::default(),
    };
    if let Some(t) = a.triple {
        base.triple = t;
    }
    base.zero_phase |= a.zero_phase;
    let reports = a
        .j
        .iter()
        .map(|&j| iterate(&config, &IterationSpec { j, ..base.clone() }, a.rounds))
        .collect::<Result<Vec<_>, _>>()?;
    out.write_json("growth.json", &reports)?;
    out.write("growth.csv", growth_csv(&reports))?;
    for r in &reports {
        let l2: Vec<String> = r.rounds.iter().map(|rd| rd.l2.to_string()).collect();
        println!("j = {}: l2 per round {}", r.j, l2.join(", "));
    }
    Ok(0)
}

fn cmd_volume(cli: &Cli, a: &VolumeArgs, out: &mut OutDir) -> Outcome<u8> {
    let config = system(cli)?;
    let quantity = match a.quantity {
        QuantityArg::Phi => VolumeQuantity::PhiSublevel,
        QuantityArg::PhiUpsilon => VolumeQuantity::PhiUpsilon {
            eps_prime: a.eps_prime,
            d0: a.d0,
        },
        QuantityArg::PhiOmega => VolumeQuantity::PhiOmega { kappa: a.kappa },
    };
    let spec = VolumeSpec {
        samples: a.samples,
        outer_samples: a.outer_samples,
        seed: cli.global.seed,
        ..VolumeSpec::new(a.triple, quantity, a.k, a.eps.clone())
    };
    let table = level_set_volume(&config, &spec)?;
    out.write_json("volume.json", &table)?;
    let mut csv = String::from(
        "eps,volume,ci_low,ci_high,sup_at,volume_transposed,transposed_ci_low,transposed_ci_high,shape_ratio\n",
    );
    for r in &table.rows {
        let _ = writeln!(
            csv,
            "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            r.eps,
            r.volume,
            r.ci_low,
            r.ci_high,
            r.sup_at,
            r.volume_transposed,
            r.transposed_ci_low,
            r.transposed_ci_high,
            r.shape_ratio
        );
    }
    out.write("volume.csv", csv)?;
    for w in &table.warnings {
        eprintln!("kgscope: {w}");
    }
    let ratios: Vec<String> = table.halving_ratios.iter().map(|r| r.to_string()).collect();
    println!("halving ratios {}", ratios.join(", "));
    Ok(0)
}
