use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use principar::lexicon::{compile_text, synth, LexicalEntry, ENGLISH_LEXICON};

use crate::parse::{load_grammar, open_lexicon};
use crate::{CliError, LexCommand};

fn io(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_owned(),
        source,
    }
}

pub fn run(cmd: LexCommand) -> Result<ExitCode, CliError> {
    match cmd {
        LexCommand::Get { source, word } => {
            let net = load_grammar(source.grammar.as_deref())?;
            let lex = open_lexicon(source.lexicon.as_deref(), &net)?;
            match lex.get(&word)? {
                Some(e) => println!("{e}"),
                None => println!("absent"),
            }
            Ok(ExitCode::SUCCESS)
        }
        LexCommand::Put { grammar, lexicon, entry } => {
            let net = load_grammar(grammar.as_deref())?;
            std::fs::create_dir_all(&lexicon).map_err(io(&lexicon))?;
            let lex = open_lexicon(Some(&lexicon), &net)?;
            let e = LexicalEntry::parse(&entry, &net.registry)?;
            lex.put(e)?;
            Ok(ExitCode::SUCCESS)
        }
        LexCommand::Compile {
            grammar,
            input,
            output,
            lexicon,
        } => {
            let net = load_grammar(grammar.as_deref())?;
            let text = match &input {
                Some(p) => std::fs::read_to_string(p).map_err(io(p))?,
                None => ENGLISH_LEXICON.to_owned(),
            };
            let out: PathBuf = match (output, lexicon) {
                (Some(o), _) => o,
                (None, Some(dir)) => {
                    std::fs::create_dir_all(&dir).map_err(io(&dir))?;
                    dir.join("secondary.plex")
                }
                (None, None) => return Err(CliError::Usage("compile needs an output path or --lexicon".into())),
            };
            let s = compile_text(&text, &net.registry, &out)?;
            println!(
                "{}: {} entries, {} buckets ({} occupied), longest chain {}, mean occupied chain {:.2}",
                out.display(),
                s.entries,
                s.buckets,
                s.occupied_buckets,
                s.max_bucket_len,
                s.mean_occupied_len
            );
            Ok(ExitCode::SUCCESS)
        }
        LexCommand::Generate { entries, seed, output } => {
            let file = std::fs::File::create(&output).map_err(io(&output))?;
            let mut w = std::io::BufWriter::new(file);
            for e in synth::synthetic_entries(entries, seed) {
                writeln!(w, "{e}").map_err(io(&output))?;
            }
            w.flush().map_err(io(&output))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
