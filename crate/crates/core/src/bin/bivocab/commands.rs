use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};

use bivocab::embed::{init_new_embeddings, load_embeddings, save_embeddings, InitKind, InitStrategy};
use bivocab::merge::{merge, CategoryMap, EvictionOrder, MergeConfig, MergePlan, OverlapScope};
use bivocab::metrics::{
    categorize_slices, cswr, fertility, load_wordset, newr, MetricsError, NewrConfig, Report, RulePack,
};
use bivocab::text::{read_lines, stem_text, FoldTable, NormalizationConfig, Normalizer, StemmerConfig, TextError};
use bivocab::tokenizer::{meta_path, TokenizerModel, DEFAULT_MARKER};
use bivocab::trainer::{train, TrainError, TrainerConfig, TrainingCorpus};

use crate::args::*;
use crate::provenance::{write_json, RunRecord};
use crate::CliError;

struct Globals {
    seed: u64,
    data_dir: PathBuf,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let g = Globals {
        seed: cli.seed.unwrap_or(0),
        data_dir: cli.data_dir.unwrap_or_else(bivocab::data_dir),
    };
    match cli.command {
        Command::Prep(a) => prep(&a),
        Command::Train(a) => train_cmd(&a, &g),
        Command::Merge(a) => merge_cmd(&a, &g),
        Command::InitEmbeddings(a) => init_cmd(&a, &g),
        Command::Eval(a) => eval(a.metric, &g),
    }
}

fn text_err(path: &Path, e: TextError) -> CliError {
    match e {
        TextError::Decode { offset } => {
            CliError::Data(format!("{}: invalid UTF-8 at byte offset {offset}", path.display()))
        }
        other => CliError::data(other),
    }
}

fn metrics_err(e: MetricsError) -> CliError {
    match e {
        e @ MetricsError::UnknownLanguage { .. } => CliError::Usage(e.to_string()),
        e => CliError::data(e),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    let raw = if path == Path::new("-") {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| CliError::io(path, e))?;
        buf
    } else {
        std::fs::read(path).map_err(|e| CliError::io(path, e))?
    };
    String::from_utf8(raw).map_err(|e| {
        text_err(
            path,
            TextError::Decode {
                offset: e.utf8_error().valid_up_to(),
            },
        )
    })
}

/// Files named directly, plus the regular files of named directories in
/// name order.
fn expand_paths(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| CliError::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn read_corpus(files: &[PathBuf]) -> Result<Vec<String>, CliError> {
    let mut lines = Vec::new();
    for f in files {
        let file = std::fs::File::open(f).map_err(|e| CliError::io(f, e))?;
        for line in read_lines(BufReader::new(file)) {
            lines.push(line.map_err(|e| text_err(f, e))?);
        }
    }
    Ok(lines)
}

fn write_output(path: Option<&Path>, body: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Internal(format!("stdout: {e}")))
        }
    }
}

/// Saves a model and a sidecar holding its metadata plus the run record.
fn save_model(model: TokenizerModel, path: &Path, run: &RunRecord) -> Result<(), CliError> {
    let mut meta = model.meta.clone();
    let stage = meta.provenance.take().unwrap_or(serde_json::Value::Null);
    meta.provenance = Some(serde_json::json!({ "stage": stage, "run": run.to_value() }));
    model.save(path).map_err(CliError::data)?;
    write_json(&meta_path(path), &meta)
}

fn load_model(path: &Path) -> Result<TokenizerModel, CliError> {
    TokenizerModel::load(path).map_err(CliError::data)
}

fn prep(a: &PrepArgs) -> Result<(), CliError> {
    let text = read_text(&a.input)?;
    let folds = match &a.fold_table {
        Some(p) => FoldTable::load(p).map_err(|e| text_err(p, e))?,
        None => FoldTable::default(),
    };
    let cfg = NormalizationConfig {
        strip_html: !a.no_strip_html,
        fold_accents: !a.no_fold_accents,
        unicode_nfc: !a.no_nfc,
    };
    let mut out = Normalizer::new(cfg, folds).normalize(&text);
    if let Some(StemLanguage::Arabic) = a.stem {
        let stem_cfg = match (&a.prefixes, &a.suffixes) {
            (Some(p), Some(s)) => StemmerConfig::from_files(p, s, a.min_stem_len).map_err(CliError::data)?,
            _ => StemmerConfig {
                min_stem_len: a.min_stem_len,
                ..StemmerConfig::arabic()
            },
        };
        out = out.split_inclusive('\n').map(|l| stem_text(l, &stem_cfg)).collect();
    }
    write_output(a.output.as_deref(), &out)
}

fn train_cmd(a: &TrainArgs, g: &Globals) -> Result<(), CliError> {
    let d = TrainerConfig::default();
    let cfg = TrainerConfig {
        target_vocab_size: a.vocab_size,
        seed_vocab_size: a.seed_vocab_size.unwrap_or(d.seed_vocab_size.max(a.vocab_size * 4)),
        max_piece_len: a.max_piece_len.unwrap_or(d.max_piece_len),
        em_iterations: a.em_iterations.unwrap_or(d.em_iterations),
        prune_fraction_per_round: a.prune_fraction.unwrap_or(d.prune_fraction_per_round),
        required_char_coverage: a.char_coverage.unwrap_or(d.required_char_coverage),
        min_seed_frequency: a.min_seed_frequency.unwrap_or(d.min_seed_frequency),
        rng_seed: g.seed,
        shard_size: a.shard_size.unwrap_or(d.shard_size),
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let files = expand_paths(&a.corpus)?;
    let corpus = TrainingCorpus::from_lines(read_corpus(&files)?, DEFAULT_MARKER);
    let inputs: Vec<&Path> = files.iter().map(PathBuf::as_path).collect();
    let run = RunRecord::new("train", a, g.seed, &inputs)?;
    let mut model = train(&corpus, &cfg).map_err(|e| match e {
        TrainError::Config(m) => CliError::Usage(m),
        e => CliError::data(e),
    })?;
    model.meta.name = a.name.clone().unwrap_or_else(|| {
        a.out
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    model.meta.languages = a.language.clone();
    save_model(model, &a.out, &run)?;
    eprintln!("wrote {}", a.out.display());
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    s.into()
}

fn merge_cmd(a: &MergeArgs, g: &Globals) -> Result<(), CliError> {
    let base = load_model(&a.base)?;
    let target = load_model(&a.target)?;
    let cfg = MergeConfig {
        overlap_scope: match a.overlap_scope {
            Scope::NonAsciiOnly => OverlapScope::NonAsciiOnly,
            Scope::All => OverlapScope::All,
        },
        eviction_order: match a.eviction_order {
            Eviction::AscendingScore => EvictionOrder::AscendingScore,
            Eviction::LongestFirst => EvictionOrder::LongestFirst,
        },
        max_new_tokens: a.max_new_tokens,
        expected_vocab_size: a.expected_vocab_size,
    };
    let plan = merge(&base, &target, &cfg).map_err(CliError::data)?;
    if plan.resulting_model.vocab_size() != base.vocab_size() {
        return Err(CliError::Internal(format!(
            "merged vocabulary has {} entries, base has {}",
            plan.resulting_model.vocab_size(),
            base.vocab_size()
        )));
    }
    let run = RunRecord::new("merge", a, g.seed, &[&a.base, &a.target])?;
    let audit = a.audit.clone().unwrap_or_else(|| with_suffix(&a.out, ".audit.jsonl"));
    let categories = a
        .categories
        .clone()
        .unwrap_or_else(|| with_suffix(&a.out, ".categories.tsv"));
    std::fs::write(&audit, plan.audit_jsonl()).map_err(|e| CliError::io(&audit, e))?;
    run.write_sidecar(&audit)?;
    std::fs::write(&categories, CategoryMap::from_plan(&plan).to_tsv()).map_err(|e| CliError::io(&categories, e))?;
    run.write_sidecar(&categories)?;
    let summary = plan.summary();
    save_model(plan.resulting_model, &a.out, &run)?;

    let body = match a.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&summary).expect("summary serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let rows = [
                ("vocab_size", summary.vocab_size.to_string()),
                ("kept_english", summary.kept_english.to_string()),
                ("kept_service", summary.kept_service.to_string()),
                ("kept_other", summary.kept_other.to_string()),
                ("overlapped", summary.overlapped.to_string()),
                ("added", summary.added.to_string()),
                ("base_mean_score", format!("{:.6}", summary.scores.base_mean)),
                ("target_mean_score", format!("{:.6}", summary.scores.target_mean)),
            ];
            rows.iter().map(|(k, v)| format!("{k:<18}{v}\n")).collect()
        }
        Format::Csv => return Err(CliError::Usage("merge summary has no csv form".into())),
    };
    write_output(None, &body)
}

fn init_cmd(a: &InitArgs, g: &Globals) -> Result<(), CliError> {
    let e_o = load_embeddings(&a.embeddings).map_err(CliError::data)?;
    let base = load_model(&a.base)?;
    let audit = std::fs::read_to_string(&a.audit).map_err(|e| CliError::io(&a.audit, e))?;
    let plan = MergePlan::from_audit(&base, &audit).map_err(CliError::data)?;
    let strat = InitStrategy {
        kind: match a.strategy {
            Strategy::Nachos => InitKind::Nachos,
            Strategy::Mean => InitKind::MeanAll,
            Strategy::Random => InitKind::Random,
        },
        rng_seed: g.seed,
        random_scale: a.random_scale,
    };
    let out = init_new_embeddings(&e_o, &base, &plan, &strat).map_err(CliError::data)?;
    let run = RunRecord::new("init-embeddings", a, g.seed, &[&a.embeddings, &a.base, &a.audit])?;
    save_embeddings(&out, &a.out).map_err(CliError::data)?;
    run.write_sidecar(&a.out)?;
    eprintln!("initialized {} rows into {}", plan.added.len(), a.out.display());
    Ok(())
}

fn emit<R: Report>(report: &R, output: &Output, run: RunRecord) -> Result<(), CliError> {
    let body = match output.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
        Format::Csv => return Err(CliError::Usage("csv output is only available for adoption".into())),
    };
    write_output(output.out.as_deref(), &body)?;
    if let Some(p) = &output.out {
        run.write_sidecar(p)?;
    }
    Ok(())
}

fn normalized(text: String, skip: bool) -> String {
    if skip {
        text
    } else {
        Normalizer::default().normalize(&text)
    }
}

fn eval(metric: Metric, g: &Globals) -> Result<(), CliError> {
    let debug = format!("{metric:?}");
    match &metric {
        Metric::Fertility { model, corpus, output } => {
            let m = load_model(model)?;
            let files = expand_paths(corpus)?;
            let docs = read_corpus(&files)?;
            let report = fertility(&m, &docs).map_err(metrics_err)?;
            let mut inputs: Vec<&Path> = vec![model];
            inputs.extend(files.iter().map(PathBuf::as_path));
            emit(
                &report,
                output,
                RunRecord::new("eval fertility", &debug, g.seed, &inputs)?,
            )
        }
        Metric::Newr {
            text,
            wordset,
            names,
            lang,
            keep_numeric,
            no_normalize,
            output,
        } => {
            let body = normalized(read_text(text)?, *no_normalize);
            let words = load_wordset(wordset).map_err(metrics_err)?;
            let cfg = NewrConfig {
                exclude_numeric: !keep_numeric,
                exclude_foreign: match lang {
                    Some(l) => Some(RulePack::bundled(l, &g.data_dir).map_err(metrics_err)?.alphabet),
                    None => None,
                },
                exclude_names: match names {
                    Some(p) => Some(load_wordset(p).map_err(metrics_err)?),
                    None => None,
                },
            };
            let report = newr(&body, &words, &cfg).map_err(metrics_err)?;
            let mut inputs: Vec<&Path> = vec![text, wordset];
            inputs.extend(names.as_deref());
            emit(&report, output, RunRecord::new("eval newr", &debug, g.seed, &inputs)?)
        }
        Metric::Cswr {
            text,
            lang,
            rulepack,
            no_normalize,
            output,
        } => {
            let pack = match rulepack {
                Some(dir) => RulePack::load(dir).map_err(metrics_err)?,
                None => RulePack::bundled(lang, &g.data_dir).map_err(metrics_err)?,
            };
            let body = normalized(read_text(text)?, *no_normalize);
            let report = cswr(&body, &pack).map_err(metrics_err)?;
            emit(&report, output, RunRecord::new("eval cswr", &debug, g.seed, &[text])?)
        }
        Metric::Adoption {
            categories,
            input,
            model,
            output,
        } => {
            let tsv = std::fs::read_to_string(categories).map_err(|e| CliError::io(categories, e))?;
            let map =
                CategoryMap::from_tsv(&tsv).map_err(|e| CliError::Data(format!("{}: {e}", categories.display())))?;
            let tokenizer = model.as_deref().map(load_model).transpose()?;
            let slices = adoption_input(input, tokenizer.as_ref())?;
            let report = categorize_slices(slices.iter().map(|(s, ids)| (s.as_str(), ids.as_slice())), &map)
                .map_err(metrics_err)?;
            let mut inputs: Vec<&Path> = vec![categories, input];
            inputs.extend(model.as_deref());
            let run = RunRecord::new("eval adoption", &debug, g.seed, &inputs)?;
            if output.format == Format::Csv {
                write_output(output.out.as_deref(), &report.to_csv())?;
                if let Some(p) = &output.out {
                    run.write_sidecar(p)?;
                }
                Ok(())
            } else {
                emit(&report, output, run)
            }
        }
    }
}

/// Reads `slice<TAB>payload` lines, grouping payloads by slice in order of
/// first appearance.
fn adoption_input(path: &Path, model: Option<&TokenizerModel>) -> Result<Vec<(String, Vec<u32>)>, CliError> {
    let text = read_text(path)?;
    let mut slices: Vec<(String, Vec<u32>)> = Vec::new();
    for (no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |m: &str| CliError::Data(format!("{}:{}: {m}", path.display(), no + 1));
        let (slice, payload) = line.split_once('\t').ok_or_else(|| bad("expected slice<TAB>payload"))?;
        let ids: Vec<u32> = match model {
            Some(m) => m.encode(payload),
            None => payload
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad(&format!("bad token id {t:?}"))))
                .collect::<Result<_, _>>()?,
        };
        match slices.iter_mut().find(|(s, _)| s == slice) {
            Some((_, all)) => all.extend(ids),
            None => slices.push((slice.to_string(), ids)),
        }
    }
    Ok(slices)
}
