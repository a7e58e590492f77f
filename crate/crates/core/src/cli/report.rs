//! Batch report: one comma-delimited table per observable plus a text
//! digest. Output depends only on the manifest and the files it lists.

use std::fmt::Write as _;
use std::path::Path;

use super::manifest::{parse_manifest, Manifest, RunEntry, RunStatus};
use super::{create_dir, read_text, write_text, CliError};
use crate::evstats::{
    fit_gev, fit_lp3, fit_lp3_full, lottery_report, prob_reach, variance_split, Ecdf, Observable,
    ObservableKind, Orientation,
};
use crate::format_real;
use crate::ga::log::{parse_cfg, parse_evo_log, EvoLog};
use crate::ga::StrategyPair;

/// Reach target as a fraction of the optimum.
pub const REACH_FRACTION: f64 = 0.99;

struct LoadedRun<'m> {
    entry: &'m RunEntry,
    log: EvoLog,
}

impl LoadedRun<'_> {
    fn trace(&self) -> Vec<f64> {
        self.log.best_trace()
    }
}

fn load_runs<'m>(manifest: &'m Manifest, dir: &Path) -> Result<Vec<LoadedRun<'m>>, CliError> {
    let mut out = Vec::new();
    for entry in manifest.runs.iter().filter(|r| r.status == RunStatus::Ok) {
        let cfg = parse_cfg(&read_text(&dir.join(&entry.cfg))?).map_err(|source| CliError::Log {
            file: entry.cfg.clone(),
            source,
        })?;
        if cfg.config.strategy != entry.strategy
            || cfg.config.seed != entry.seed
            || cfg.dataset_digest != manifest.dataset.digest
        {
            return Err(CliError::Manifest(format!(
                "{} does not match its manifest entry",
                entry.cfg
            )));
        }
        let log = parse_evo_log(&read_text(&dir.join(&entry.evo))?).map_err(|source| CliError::Log {
            file: entry.evo.clone(),
            source,
        })?;
        if log.generations() != cfg.config.generations {
            return Err(CliError::Manifest(format!(
                "{} has {} generations, its cfg says {}",
                entry.evo,
                log.generations(),
                cfg.config.generations
            )));
        }
        out.push(LoadedRun { entry, log });
    }
    Ok(out)
}


fn by_strategy<'a, 'm>(runs: &'a [LoadedRun<'m>], s: StrategyPair) -> Vec<&'a LoadedRun<'m>> {
    runs.iter().filter(|r| r.entry.strategy == s).collect()
}

fn observable(runs: &[&LoadedRun<'_>], kind: ObservableKind) -> Vec<f64> {
    let traces: Vec<Vec<f64>> = runs.iter().map(|r| r.trace()).collect();
    Observable::from_traces(kind, traces.iter().map(Vec::as_slice)).values
}

fn gev_table(out: &mut String, label: &str, values: &[f64], with_lottery: bool) {
    match fit_gev(values, Orientation::Maxima, false) {
        Ok(fit) => {
            let _ = write!(
                out,
                "{label},{},ok,{},{},{},{},{},{}",
                values.len(),
                format_real(fit.params.location),
                format_real(fit.params.scale),
                format_real(fit.params.shape),
                fit.tail,
                u8::from(fit.uncertain),
                format_real(fit.ks)
            );
            if with_lottery {
                let lot = lottery_report(&fit);
                for (_, v) in lot.unlucky.iter().chain(&lot.lucky) {
                    let _ = write!(out, ",{}", format_real(*v));
                }
            }
        }
        Err(e) => {
            let _ = write!(out, "{label},{},{},,,,,,", values.len(), csv_safe(&e.to_string()));
            if with_lottery {
                out.push_str(",,,,,,");
            }
        }
    }
    out.push('\n');
}

fn csv_safe(s: &str) -> String {
    s.replace(',', ";").replace('\n', " ")
}

/// Reads the manifest at `manifest_path` and writes the report files into
/// `out_dir`. Returns the names of the files written.
pub fn cmd_report(manifest_path: &Path, out_dir: &Path) -> Result<Vec<String>, CliError> {
    let manifest = parse_manifest(&read_text(manifest_path)?)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let runs = load_runs(&manifest, dir)?;
    if runs.is_empty() {
        return Err(CliError::Manifest("no successful runs to report".into()));
    }
    let strategies: Vec<StrategyPair> = manifest
        .strategies
        .iter()
        .copied()
        .filter(|s| runs.iter().any(|r| r.entry.strategy == *s))
        .collect();
    let budget = manifest.config.generations;
    let (optimum, optimum_source) = match manifest.optimum {
        Some(o) => (o, "exhaustive"),
        None => (
            runs.iter()
                .filter_map(|r| r.trace().last().copied())
                .fold(f64::MIN, f64::max),
            "best observed",
        ),
    };

    let mut files: Vec<(&str, String)> = Vec::new();

    // Per-run table.
    let mut t = String::from("strategy,run,seed,final_r2,n_evolutions,first_reach_generation\n");
    for r in &runs {
        let trace = r.trace();
        let target = REACH_FRACTION * optimum;
        let first = trace.iter().position(|&b| b >= target);
        let _ = writeln!(
            t,
            "{},{},{},{},{},{}",
            r.entry.strategy,
            r.entry.run,
            r.entry.seed,
            format_real(*trace.last().expect("nonempty log")),
            r.log.improvement_events().len(),
            first.map(|g| g.to_string()).unwrap_or_default()
        );
    }
    files.push(("runs.csv", t));

    // Reach probabilities, ascending.
    let mut reach: Vec<(StrategyPair, usize, f64)> = Vec::new();
    for &s in &strategies {
        let group = by_strategy(&runs, s);
        let traces: Vec<Vec<f64>> = group.iter().map(|r| r.trace()).collect();
        let p = prob_reach(traces.iter().map(Vec::as_slice), optimum, REACH_FRACTION, budget)?;
        reach.push((s, group.len(), p));
    }
    let mut sorted = reach.clone();
    sorted.sort_by(|a, b| a.2.total_cmp(&b.2));
    let mut t = String::from("strategy,runs,optimum,fraction,budget,probability\n");
    for (s, n, p) in &sorted {
        let _ = writeln!(
            t,
            "{s},{n},{},{},{budget},{}",
            format_real(optimum),
            format_real(REACH_FRACTION),
            format_real(*p)
        );
    }
    files.push(("prob_reach.csv", t));

    // GEV fits.
    let head = "strategy,n,status,location,scale,shape,tail,uncertain,ks";
    let mut final_t = format!(
        "{head},unlucky_0.01,unlucky_0.05,unlucky_0.10,lucky_0.90,lucky_0.95,lucky_0.99\n"
    );
    let mut evo_t = format!("{head}\n");
    for &s in &strategies {
        let group = by_strategy(&runs, s);
        gev_table(&mut final_t, &s.to_string(), &observable(&group, ObservableKind::FinalR2), true);
        gev_table(&mut evo_t, &s.to_string(), &observable(&group, ObservableKind::NEvolutions), false);
    }
    files.push(("gev_final_r2.csv", final_t));
    files.push(("gev_n_evolutions.csv", evo_t));

    // Log-Pearson III of relative moments.
    let mut t = String::from(
        "strategy,n,status,alpha,scale,method,ks,full_mean_log,full_sd_log,full_skew_log,full_ks\n",
    );
    let all: Vec<&LoadedRun> = runs.iter().collect();
    let groups = strategies
        .iter()
        .map(|s| (s.to_string(), by_strategy(&runs, *s)))
        .chain(std::iter::once(("ALL".to_string(), all)));
    for (label, group) in groups {
        let values = observable(&group, ObservableKind::RelativeMoment);
        let _ = write!(t, "{label},{},", values.len());
        match fit_lp3(&values) {
            Ok(f) => {
                let _ = write!(
                    t,
                    "ok,{},{},{},{}",
                    format_real(f.shape),
                    format_real(f.scale),
                    serde_json::to_value(f.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                    format_real(f.ks)
                );
            }
            Err(e) => {
                let _ = write!(t, "{},,,,", csv_safe(&e.to_string()));
            }
        }
        match fit_lp3_full(&values) {
            Ok(f) => {
                let _ = writeln!(
                    t,
                    ",{},{},{},{}",
                    format_real(f.mean_log),
                    format_real(f.sd_log),
                    format_real(f.skew_log),
                    format_real(f.ks)
                );
            }
            Err(_) => t.push_str(",,,,\n"),
        }
    }
    files.push(("lp3_relative_moments.csv", t));

    // Between/within strategy variance.
    let mut t = String::from("observable,groups,n,between_ss,within_ss,total_ss,between_sd,within_sd\n");
    let mut splits = Vec::new();
    for kind in [ObservableKind::NEvolutions, ObservableKind::FinalR2] {
        let per: Vec<Vec<f64>> = strategies
            .iter()
            .map(|s| observable(&by_strategy(&runs, *s), kind))
            .collect();
        let split = variance_split(per.iter().map(Vec::as_slice))?;
        let name = match kind {
            ObservableKind::NEvolutions => "n_evolutions",
            _ => "final_r2",
        };
        let _ = writeln!(
            t,
            "{name},{},{},{},{},{},{},{}",
            split.groups,
            split.n,
            format_real(split.between_ss),
            format_real(split.within_ss),
            format_real(split.total_ss),
            format_real(split.between_sd),
            format_real(split.within_sd)
        );
        splits.push((name, split));
    }
    files.push(("variance_split.csv", t));

    // Census.
    let mut t = String::from(
        "strategy,run,mean_distinct_genotypes,mean_distinct_fitnesses,final_distinct_genotypes,final_distinct_fitnesses\n",
    );
    for r in &runs {
        let n = r.log.rows.len() as f64;
        let mg = r.log.rows.iter().map(|x| x.census.distinct_genotypes as f64).sum::<f64>() / n;
        let mf = r.log.rows.iter().map(|x| x.census.distinct_fitnesses as f64).sum::<f64>() / n;
        let last = r.log.rows.last().expect("nonempty log").census;
        let _ = writeln!(
            t,
            "{},{},{},{},{},{}",
            r.entry.strategy,
            r.entry.run,
            format_real(mg),
            format_real(mf),
            last.distinct_genotypes,
            last.distinct_fitnesses
        );
    }
    files.push(("census.csv", t));

    // ECDF of final fitness.
    let mut t = String::from("strategy,value,ecdf\n");
    for &s in &strategies {
        let ecdf = Ecdf::new(&observable(&by_strategy(&runs, s), ObservableKind::FinalR2))?;
        for (v, f) in ecdf.steps() {
            let _ = writeln!(t, "{s},{},{}", format_real(v), format_real(f));
        }
    }
    files.push(("ecdf_final_r2.csv", t));

    // Digest.
    let mut d = String::new();
    let failed = manifest.runs.len() - runs.len();
    let _ = writeln!(d, "batch `{}`: {} runs reported, {failed} failed", manifest.tag, runs.len());
    let _ = writeln!(d, "dataset digest {}", manifest.dataset.digest);
    let _ = writeln!(d, "optimum r2 = {optimum:.6} ({optimum_source})");
    let _ = writeln!(
        d,
        "\nprobability of reaching {:.0}% of the optimum within {budget} generations (ascending):",
        REACH_FRACTION * 100.0
    );
    let line: Vec<String> = sorted.iter().map(|(s, _, p)| format!("{s} - {:.0}%", p * 100.0)).collect();
    let _ = writeln!(d, "  {}", line.join(", "));
    let _ = writeln!(d, "\nfinal r2, GEV tail by strategy:");
    for &s in &strategies {
        let values = observable(&by_strategy(&runs, s), ObservableKind::FinalR2);
        let desc = match fit_gev(&values, Orientation::Maxima, false) {
            Ok(f) => format!(
                "{} (shape {:.4}{})",
                f.tail,
                f.params.shape,
                if f.uncertain { ", uncertain" } else { "" }
            ),
            Err(e) => format!("no fit: {e}"),
        };
        let _ = writeln!(d, "  {s}: {desc}");
    }
    let _ = writeln!(d, "\nvariance between vs within strategies:");
    for (name, s) in &splits {
        let _ = writeln!(
            d,
            "  {name}: between {:.4}^2, within {:.4}^2",
            s.between_sd, s.within_sd
        );
    }
    files.push(("digest.txt", d));

    create_dir(out_dir)?;
    let mut names = Vec::new();
    for (name, text) in files {
        write_text(&out_dir.join(name), &text)?;
        names.push(name.to_string());
    }
    Ok(names)
}
