use std::io::{BufRead, Write};
use std::path::Path;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use principar::{GrammarNetwork, LexiconStore, ParseConfig, Parser, TreeFormat};
use serde_json::json;

use crate::{CliError, GrammarArgs, ParseArgs, StatsFormat};

pub fn load_grammar(path: Option<&Path>) -> Result<GrammarNetwork, CliError> {
    let Some(path) = path else {
        return Ok(GrammarNetwork::english());
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    GrammarNetwork::load(&text).map_err(|source| CliError::Grammar {
        path: path.to_owned(),
        source,
    })
}

pub fn open_lexicon(dir: Option<&Path>, net: &GrammarNetwork) -> Result<LexiconStore, CliError> {
    match dir {
        None => Ok(LexiconStore::english(net.registry.clone())?),
        Some(dir) if !dir.is_dir() => Err(CliError::Usage(format!("{}: not a lexicon directory", dir.display()))),
        Some(dir) => Ok(LexiconStore::open(dir, net.registry.clone())?),
    }
}

pub fn load(args: &GrammarArgs) -> Result<(GrammarNetwork, LexiconStore), CliError> {
    let net = load_grammar(args.grammar.as_deref())?;
    let lex = open_lexicon(args.lexicon.as_deref(), &net)?;
    Ok((net, lex))
}

/// Line comment marker of the output format.
fn comment(format: TreeFormat) -> &'static str {
    match format {
        TreeFormat::Bracketed => ";",
        TreeFormat::Graph => "//",
    }
}

/// Output for one sentence: text for stdout and stderr, and whether it
/// got a tree.
struct Report {
    out: String,
    err: String,
    parsed: bool,
}

fn parse_one(p: &Parser, net: &GrammarNetwork, sentence: &str, args: &ParseArgs) -> Result<Report, CliError> {
    let t = Instant::now();
    let outcome = p.parse(sentence)?;
    let forest = outcome.forest(net);
    let trees = forest.prune(Some(args.max_trees));
    let ms = t.elapsed().as_secs_f64() * 1e3;

    let mut out = String::new();
    for tree in &trees {
        out.push_str(&tree.render(args.format));
        if args.format == TreeFormat::Bracketed {
            out.push('\n');
        }
    }
    let best = forest.min_weight();
    match args.stats {
        Some(StatsFormat::Text) => out.push_str(&format!(
            "{} trees {} of {} weight {} items {} messages {} blocked {} time {ms:.3} ms\n",
            comment(args.format),
            trees.len(),
            forest.tree_count(),
            best.map_or("-".to_owned(), |w| w.to_string()),
            outcome.stats.items,
            outcome.stats.messages_sent,
            outcome.stats.messages_blocked,
        )),
        Some(StatsFormat::Json) => {
            let j = json!({
                "sentence": sentence,
                "tokens": outcome.tokens.len(),
                "items": outcome.stats.items,
                "messages_sent": outcome.stats.messages_sent,
                "messages_blocked": outcome.stats.messages_blocked,
                "forest_trees": forest.tree_count(),
                "best_weight": best.map(|w| w.as_f64()),
                "parse_ms": ms,
            });
            out.push_str(&j.to_string());
            out.push('\n');
        }
        None => {}
    }
    let mut err = String::new();
    for d in &outcome.diagnostics {
        err.push_str(&format!("principar: {sentence}: {d}\n"));
    }
    Ok(Report {
        out,
        err,
        parsed: !trees.is_empty(),
    })
}

pub fn run(args: ParseArgs) -> Result<ExitCode, CliError> {
    if args.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let (net, lex) = load(&args.source)?;
    let parser = Parser::new(&net, &lex).with_config(ParseConfig {
        max_items: args.max_items,
        guess_unknown: args.guess_unknown.clone(),
        ..ParseConfig::default()
    });

    let sentences: Vec<String> = if args.sentences.is_empty() {
        std::io::stdin()
            .lock()
            .lines()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|source| CliError::Io {
                path: "<stdin>".into(),
                source,
            })?
            .into_iter()
            .filter(|l| !l.trim().is_empty())
            .collect()
    } else {
        args.sentences.clone()
    };

    let results: Vec<Mutex<Option<Result<Report, CliError>>>> = sentences.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..args.jobs.min(sentences.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(sentence) = sentences.get(i) else { break };
                let r = parse_one(&parser, &net, sentence, &args);
                *results[i].lock().unwrap() = Some(r);
            });
        }
    });

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut all = true;
    let headers = sentences.len() > 1;
    for (sentence, r) in sentences.iter().zip(results) {
        let report = r.into_inner().unwrap().expect("every sentence is parsed")?;
        if headers {
            writeln!(out, "{} {sentence}", comment(args.format)).ok();
        }
        out.write_all(report.out.as_bytes()).ok();
        eprint!("{}", report.err);
        all &= report.parsed;
    }
    out.flush().ok();
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(2) })
}
