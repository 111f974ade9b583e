use std::process::ExitCode;
use std::time::{Duration, Instant};

use principar::cfg::{check_sentence, Cfg};
use principar::lexicon::{compile_secondary, synth};
use principar::{GrammarNetwork, LexiconStore};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::{BenchCommand, CliError};

/// Least-squares slope of ln y against ln x.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

fn lexicon(entries: usize, lookups: usize, seed: u64) -> Result<ExitCode, CliError> {
    if entries == 0 {
        return Err(CliError::Usage("--entries must be positive".into()));
    }
    let dir = std::env::temp_dir().join(format!("principar-bench-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|source| CliError::Io {
        path: dir.clone(),
        source,
    })?;
    let result = (|| {
        let net = GrammarNetwork::english();
        let generated = synth::synthetic_entries(entries, seed);
        let keys: Vec<String> = generated.iter().map(|e| e.key.clone()).collect();
        let t = Instant::now();
        let stats = compile_secondary(generated, &dir.join("secondary.plex"))?;
        println!(
            "compiled {} entries into {} buckets in {:.2?}",
            stats.entries,
            stats.buckets,
            t.elapsed()
        );
        let store = LexiconStore::open(&dir, net.registry.clone())?;
        let mut rng = StdRng::seed_from_u64(seed);
        let mut cold = Vec::with_capacity(lookups);
        for _ in 0..lookups {
            let k = keys.choose(&mut rng).unwrap();
            store.clear_cache();
            let t = Instant::now();
            let e = store.get(k)?;
            cold.push(t.elapsed());
            debug_assert!(e.is_some());
        }
        let mut warm = Vec::with_capacity(lookups);
        for _ in 0..lookups {
            let k = keys.choose(&mut rng).unwrap();
            store.get(k)?;
            let t = Instant::now();
            store.get(k)?;
            warm.push(t.elapsed());
        }
        for (name, v) in [("cold (secondary)", &mut cold), ("warm (primary)", &mut warm)] {
            v.sort();
            let mean = v.iter().sum::<Duration>() / v.len() as u32;
            println!(
                "{name}: mean {mean:.2?} median {:.2?} p99 {:.2?} over {} lookups",
                v[v.len() / 2],
                v[v.len() * 99 / 100],
                v.len()
            );
        }
        Ok(ExitCode::SUCCESS)
    })();
    std::fs::remove_dir_all(&dir).ok();
    result
}

fn scaling(lengths: &[usize], reps: usize) -> Result<ExitCode, CliError> {
    if lengths.len() < 2 || lengths.contains(&0) {
        return Err(CliError::Usage("need at least two positive lengths".into()));
    }
    let g = Cfg::binary_ambiguous();
    let net = g.network();
    let mut points = Vec::new();
    for &n in lengths {
        let s = vec!["a".to_owned(); n];
        let mut best = f64::INFINITY;
        let mut items = 0;
        for _ in 0..reps.max(1) {
            let t = Instant::now();
            let o = g.parse(&net, &s);
            let f = o.forest(&net);
            std::hint::black_box(f.min_weight());
            best = best.min(t.elapsed().as_secs_f64());
            items = o.stats.items;
        }
        println!("n={n}: {:.3} ms, {items} items", best * 1e3);
        points.push((n as f64, best));
    }
    println!("slope {:.2}", loglog_slope(&points));
    Ok(ExitCode::SUCCESS)
}

fn oracle(grammars: usize, sentences: usize, maxlen: usize, seed: u64) -> Result<ExitCode, CliError> {
    if maxlen == 0 {
        return Err(CliError::Usage("--maxlen must be positive".into()));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let (mut checked, mut sets, mut mismatches) = (0, 0, 0);
    for g in 0..grammars {
        let cfg = Cfg::random(&mut rng, 8, 20);
        let net = cfg.network();
        for _ in 0..sentences {
            let s = cfg.random_sentence(&mut rng, maxlen);
            let r = check_sentence(&cfg, &net, &s, 20_000);
            checked += 1;
            sets += r.compared_sets as usize;
            if !r.agree {
                mismatches += 1;
                eprintln!(
                    "mismatch: grammar {g} sentence `{}`: expected {} trees, found {}\n{cfg}",
                    s.join(" "),
                    r.expected,
                    r.found
                );
            }
        }
    }
    println!("{checked} sentences over {grammars} grammars ({sets} compared as tree sets): {mismatches} mismatches");
    Ok(if mismatches == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

pub fn run(cmd: BenchCommand) -> Result<ExitCode, CliError> {
    match cmd {
        BenchCommand::Lexicon { entries, lookups, seed } => lexicon(entries, lookups, seed),
        BenchCommand::Scaling { lengths, reps } => scaling(&lengths, reps),
        BenchCommand::Oracle {
            grammars,
            sentences,
            maxlen,
            seed,
        } => oracle(grammars, sentences, maxlen, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0].iter().map(|&n: &f64| (n, 3.0 * n.powi(3))).collect();
        assert!((loglog_slope(&pts) - 3.0).abs() < 1e-9);
    }
}
