use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use diacorp::colloc::{association_table, concordance, dice_series, Scope};
use diacorp::corpus::lexicon_report;
use diacorp::dsm::{cosine_neighbors, dsm_build, semantic_field, Weighting};
use diacorp::fixture::{generate, FixturePlan};
use diacorp::report::{dice_timeline, emit_csv, emit_field_svg, emit_timeline_svg, FrequencyTable};
use diacorp::vertical::{parse_vertical, rejects_to_jsonl, ParseMode, ParseOptions, Reject};
use diacorp::{slice_equal_mass, Corpus, Fingerprint, LemmaGroup, PositionalIndex, Slicing};
use serde::Serialize;

use crate::{BinArgs, Cli, Command, CliError, ProjectConfig, ScopeArg, WeightingArg};

/// What a command leaves behind: files written and text for standard output.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub stdout: String,
}

/// Loaded corpus, effective config and output location for one invocation.
pub struct Session {
    pub config: ProjectConfig,
    pub corpus: Corpus,
    pub rejects: Vec<Reject>,
    pub out_dir: PathBuf,
    pub json: bool,
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?
            .install(|| dispatch(cli)),
        None => dispatch(cli),
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let mut config = match &cli.config {
        Some(path) => ProjectConfig::load(path)?,
        None => ProjectConfig::default(),
    };
    if let Command::GenFixture(args) = &cli.command {
        let out_dir = cli.out.clone().or(config.output.clone()).unwrap_or_else(|| PathBuf::from("."));
        return gen_fixture(args, &out_dir, cli.json);
    }
    apply_overrides(&mut config, cli)?;
    let session = open_session(cli, config)?;
    let mut outcome = Outcome::default();
    if !session.rejects.is_empty() {
        let name = format!("rejects_corpus_{}.jsonl", session.corpus.fingerprint().short());
        let path = write_file(&session.out_dir, &name, &rejects_to_jsonl(&session.rejects))?;
        outcome.files.push(path);
    }
    let result = match &cli.command {
        Command::Stats => stats(&session)?,
        Command::Freq(a) => freq(&session, &a.groups, a.rate, a.smooth, cli)?,
        Command::Assoc(a) => assoc(&session, &a.targets, &a.probe, cli)?,
        Command::Dice(a) => dice(&session, &a.a, &a.b, a.smooth, cli)?,
        Command::Field(a) => field(&session, &a.target, a.from.zip(a.to), cli)?,
        Command::Kwic(a) => kwic(&session, &a.group, a.limit, a.from.zip(a.to), cli)?,
        Command::GenFixture(_) => unreachable!("handled before the corpus is loaded"),
    };
    outcome.files.extend(result.files);
    outcome.stdout = result.stdout;
    if session.json {
        outcome.stdout = json_summary(cli.command.name(), &session, &outcome, &outcome.stdout);
    } else {
        for f in &outcome.files {
            let _ = writeln!(outcome.stdout, "wrote {}", f.display());
        }
    }
    Ok(outcome)
}

fn apply_bins(config: &mut ProjectConfig, bins: &BinArgs) {
    if let Some(m) = bins.target_mass {
        config.bins.target_mass = m;
    }
    if let Some(p) = bins.date_policy {
        config.bins.date_policy = p.into();
    }
    if let Some(s) = bins.max_span {
        config.bins.max_span = s;
    }
}

/// Folds command-line flags into the config so the output fingerprint reflects them.
fn apply_overrides(config: &mut ProjectConfig, cli: &Cli) -> Result<(), CliError> {
    if !cli.corpus.is_empty() {
        config.corpus = cli.corpus.clone();
    }
    if let Some(out) = &cli.out {
        config.output = Some(out.clone());
    }
    if cli.strict {
        config.parse.mode = ParseMode::Strict;
    }
    if cli.lenient {
        config.parse.mode = ParseMode::Lenient;
    }
    match &cli.command {
        Command::Freq(a) => apply_bins(config, &a.bins),
        Command::Assoc(a) => {
            if let Some(w) = a.window {
                config.analysis.window = w;
            }
            if let Some(s) = a.scope {
                config.analysis.scope = match s {
                    ScopeArg::All => Scope::All,
                    ScopeArg::Dated => Scope::Dated,
                };
            }
        }
        Command::Dice(a) => {
            apply_bins(config, &a.bins);
            if let Some(w) = a.window {
                config.analysis.window = w;
            }
        }
        Command::Field(a) => {
            apply_bins(config, &a.bins);
            let d = &mut config.dsm;
            d.window = a.window.unwrap_or(d.window);
            d.min_freq = a.min_freq.unwrap_or(d.min_freq);
            d.k = a.k.unwrap_or(d.k);
            d.edge_threshold = a.threshold.unwrap_or(d.edge_threshold);
            if let Some(w) = a.weighting {
                d.weighting = match w {
                    WeightingArg::Raw => Weighting::Raw,
                    WeightingArg::Ppmi => Weighting::Ppmi,
                    WeightingArg::Logdice => Weighting::LogDice,
                };
            }
            d.validate()?;
        }
        Command::Kwic(a) => {
            apply_bins(config, &a.bins);
            if let Some(w) = a.window {
                config.analysis.window = w;
            }
        }
        Command::Stats | Command::GenFixture(_) => {}
    }
    if config.analysis.window == 0 {
        return Err(CliError::Usage("window must be at least 1".into()));
    }
    if config.bins.target_mass == 0 {
        return Err(CliError::Usage("target mass must be at least 1".into()));
    }
    Ok(())
}

fn open_session(cli: &Cli, config: ProjectConfig) -> Result<Session, CliError> {
    if config.corpus.is_empty() {
        return Err(CliError::Usage("no corpus given; pass --corpus or set `corpus` in the config".into()));
    }
    let opts = ParseOptions { mode: config.parse.mode, era: config.parse.era()? };
    let mut documents = Vec::new();
    let mut rejects = Vec::new();
    for path in &config.corpus {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let parsed =
            parse_vertical(&text, &opts).map_err(|source| CliError::Parse { path: path.display().to_string(), source })?;
        documents.extend(parsed.corpus.documents().iter().cloned());
        rejects.extend(parsed.rejects);
    }
    let corpus = Corpus::new(documents)?;
    if corpus.is_empty() {
        return Err(CliError::EmptyCorpus);
    }
    let out_dir = config.output.clone().unwrap_or_else(|| PathBuf::from("."));
    Ok(Session { config, corpus, rejects, out_dir, json: cli.json })
}

/// Eight hex digits over the corpus, the effective config and the command arguments.
fn run_fingerprint(session: &Session, cli: &Cli) -> String {
    let args = serde_json::to_string(&cli.command).expect("arguments serialize");
    let text = format!("{}\n{}\n{}", session.corpus.fingerprint(), session.config.canonical(), args);
    Fingerprint::of_bytes(text.as_bytes()).short()
}

/// Characters other than letters, digits, `-`, `_` and `+` become `_`.
fn file_part(s: &str) -> String {
    s.chars().map(|c| if c.is_alphanumeric() || "-_+".contains(c) { c } else { '_' }).collect()
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

/// Writes `<command>_<target>_<fp8>.<ext>` for each (ext, content).
fn write_outputs(
    session: &Session,
    command: &str,
    target: &str,
    fp: &str,
    files: &[(&str, String)],
) -> Result<Vec<PathBuf>, CliError> {
    files
        .iter()
        .map(|(ext, content)| write_file(&session.out_dir, &format!("{command}_{}_{fp}.{ext}", file_part(target)), content))
        .collect()
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn json_summary(command: &str, session: &Session, outcome: &Outcome, text: &str) -> String {
    #[derive(Serialize)]
    struct Summary<'a> {
        command: &'a str,
        corpus_fingerprint: String,
        rejected_documents: usize,
        files: Vec<String>,
        output: serde_json::Value,
    }
    let output = serde_json::from_str(text).unwrap_or(serde_json::Value::String(text.to_string()));
    let s = Summary {
        command,
        corpus_fingerprint: session.corpus.fingerprint().to_string(),
        rejected_documents: session.rejects.len(),
        files: outcome.files.iter().map(|f| f.display().to_string()).collect(),
        output,
    };
    serde_json::to_string(&s).expect("summary serializes") + "\n"
}

fn require_dated(session: &Session) -> Result<(), CliError> {
    if session.corpus.stats().n_dated == 0 {
        Err(CliError::EmptyDated)
    } else {
        Ok(())
    }
}

fn slicing(session: &Session) -> Result<Slicing, CliError> {
    require_dated(session)?;
    Ok(slice_equal_mass(&session.corpus, session.config.bins.target_mass, &session.config.bins.year_config())?)
}

fn groups(session: &Session, refs: &[String]) -> Result<Vec<LemmaGroup>, CliError> {
    let groups = if refs.is_empty() {
        session.config.lemma_groups()?
    } else {
        refs.iter().map(|r| session.config.group(r)).collect::<Result<Vec<_>, _>>()?
    };
    if groups.is_empty() {
        return Err(CliError::Usage("no groups: pass --group or define [groups] in the config".into()));
    }
    diacorp::corpus::validate_groups(&groups)?;
    Ok(groups)
}

fn stats(session: &Session) -> Result<Outcome, CliError> {
    #[derive(Serialize)]
    struct StatsReport<'a> {
        fingerprint: String,
        stats: &'a diacorp::CorpusStats,
        groups: Vec<diacorp::corpus::LexiconRow>,
    }
    let lexicon = lexicon_report(&session.corpus, &session.config.lemma_groups()?);
    let stats = session.corpus.stats();
    let report = StatsReport { fingerprint: session.corpus.fingerprint().to_string(), stats, groups: lexicon.rows.clone() };
    let fp = Fingerprint::of_bytes(format!("{}\n{}", session.corpus.fingerprint(), session.config.canonical()).as_bytes()).short();
    let mut written = write_outputs(session, "stats", "corpus", &fp, &[("csv", emit_csv(stats)), ("json", to_json(&report))])?;
    if !lexicon.rows.is_empty() {
        written.extend(write_outputs(session, "stats", "groups", &fp, &[("csv", emit_csv(&lexicon))])?);
    }

    let stdout = if session.json {
        serde_json::to_string(&report).expect("report serializes")
    } else {
        let mut out = String::new();
        for row in emit_csv(stats).lines().skip(1) {
            let (k, v) = row.split_once(',').unwrap_or((row, ""));
            let _ = writeln!(out, "{k:<16} {v}");
        }
        for r in &lexicon.rows {
            let _ = writeln!(out, "{:<16} {} (dated {})", r.name, r.all, r.dated);
        }
        out
    };
    Ok(Outcome { files: written, stdout })
}

fn freq(session: &Session, refs: &[String], rate: bool, smooth: Option<usize>, cli: &Cli) -> Result<Outcome, CliError> {
    let groups = groups(session, refs)?;
    let slicing = slicing(session)?;
    let index = PositionalIndex::build(&session.corpus);
    let table = FrequencyTable::build(&index, &slicing, &groups)?;
    let names: Vec<&str> = groups.iter().map(LemmaGroup::name).collect();
    let target = names.join("+");
    let svg = emit_timeline_svg(&table.timeline(&format!("Frequency of {}", names.join(", ")), rate, smooth))?;
    let fp = run_fingerprint(session, cli);
    let mut files = write_outputs(
        session,
        "freq",
        &target,
        &fp,
        &[("csv", emit_csv(&table)), ("json", to_json(&table)), ("svg", svg)],
    )?;
    files.extend(write_outputs(session, "bins", &target, &fp, &[("csv", slicing.to_csv()), ("json", to_json(&slicing))])?);
    let mut stdout = String::new();
    if session.json {
        stdout = serde_json::to_string(&table).expect("table serializes");
    } else {
        let _ = writeln!(stdout, "{} bins of target mass {}", slicing.bins.len(), slicing.target_mass);
    }
    Ok(Outcome { files, stdout })
}

fn assoc(session: &Session, targets: &[String], probe: &str, cli: &Cli) -> Result<Outcome, CliError> {
    let probe = session.config.group(probe)?;
    let targets = targets.iter().map(|t| session.config.group(t)).collect::<Result<Vec<_>, _>>()?;
    let index = PositionalIndex::build(&session.corpus);
    let cfg = &session.config.analysis;
    let rows = association_table(&index, &targets, &probe, cfg.window, cfg.scope)?;
    let fp = run_fingerprint(session, cli);
    let files = write_outputs(session, "assoc", probe.name(), &fp, &[("csv", emit_csv(rows.as_slice())), ("json", to_json(&rows))])?;
    let stdout = if session.json {
        serde_json::to_string(&rows).expect("rows serialize")
    } else {
        let mut out = String::new();
        for r in &rows {
            let _ = writeln!(out, "{:<20} {:>8} {:>8} {:>7}%", r.target, r.occurrences, r.associations, r.percent_display());
        }
        out
    };
    Ok(Outcome { files, stdout })
}

#[derive(Serialize)]
struct BinRef {
    index: usize,
    label: String,
    midpoint: f64,
    token_mass: u64,
}

fn dice(session: &Session, a: &str, b: &str, smooth: Option<usize>, cli: &Cli) -> Result<Outcome, CliError> {
    #[derive(Serialize)]
    struct DiceReport<'a> {
        a: &'a LemmaGroup,
        b: &'a LemmaGroup,
        window: u32,
        bins: Vec<BinRef>,
        points: &'a [diacorp::colloc::DicePoint],
    }
    let (a, b) = (session.config.group(a)?, session.config.group(b)?);
    a.check_disjoint(&b)?;
    let slicing = slicing(session)?;
    let index = PositionalIndex::build(&session.corpus);
    let window = session.config.analysis.window;
    let points = dice_series(&index, &slicing, &a, &b, window)?;
    let name = format!("{}~{}", a.name(), b.name());
    let svg = emit_timeline_svg(&dice_timeline(&format!("Dice association of {} and {}", a.name(), b.name()), &name, &slicing, &points, smooth))?;
    let report = DiceReport {
        a: &a,
        b: &b,
        window,
        bins: slicing
            .bins
            .iter()
            .map(|b| BinRef { index: b.index, label: b.label(), midpoint: b.midpoint(), token_mass: b.token_mass })
            .collect(),
        points: &points,
    };
    let fp = run_fingerprint(session, cli);
    let target = format!("{}-{}", a.name(), b.name());
    let files = write_outputs(
        session,
        "dice",
        &target,
        &fp,
        &[("csv", emit_csv(points.as_slice())), ("json", to_json(&report)), ("svg", svg)],
    )?;
    let stdout = if session.json {
        serde_json::to_string(&report).expect("report serializes")
    } else {
        let mut out = String::new();
        for (p, bin) in points.iter().zip(&slicing.bins) {
            let _ = writeln!(out, "{:<12} {}", bin.label(), p.dice.round_half_up(4));
        }
        out
    };
    Ok(Outcome { files, stdout })
}

fn field(session: &Session, target: &str, years: Option<(i32, i32)>, cli: &Cli) -> Result<Outcome, CliError> {
    let index = PositionalIndex::build(&session.corpus);
    let subset = match years {
        Some((from, to)) => {
            require_dated(session)?;
            index.subset_of_years(from, to, &session.config.bins.year_config())
        }
        None => index.subset_all(),
    };
    let cfg = &session.config.dsm;
    let matrix = dsm_build(&index, &subset, cfg)?;
    let graph = semantic_field(&matrix, target, cfg)?;
    let fp = run_fingerprint(session, cli);
    let files = write_outputs(
        session,
        "field",
        target,
        &fp,
        &[("dot", graph.to_dot()), ("json", graph.to_json()), ("svg", emit_field_svg(&graph)?)],
    )?;
    let stdout = if session.json {
        serde_json::to_string(&graph).expect("graph serializes")
    } else {
        let mut out = String::new();
        for n in cosine_neighbors(&matrix, target, cfg.k)? {
            let _ = writeln!(out, "{:<24} {:.4}", n.lemma, n.similarity);
        }
        out
    };
    Ok(Outcome { files, stdout })
}

fn kwic(session: &Session, group: &str, limit: usize, years: Option<(i32, i32)>, cli: &Cli) -> Result<Outcome, CliError> {
    let group = session.config.group(group)?;
    if years.is_some() {
        require_dated(session)?;
    }
    let index = PositionalIndex::build(&session.corpus);
    let lines = concordance(&index, &group, session.config.analysis.window, limit, years, &session.config.bins.year_config())?;
    let fp = run_fingerprint(session, cli);
    let files = write_outputs(session, "kwic", group.name(), &fp, &[("csv", emit_csv(lines.as_slice())), ("json", to_json(&lines))])?;
    let stdout = if session.json {
        serde_json::to_string(&lines).expect("lines serialize")
    } else {
        lines.iter().map(|l| l.render() + "\n").collect()
    };
    Ok(Outcome { files, stdout })
}

fn gen_fixture(args: &crate::GenFixtureArgs, out_dir: &Path, json: bool) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(&args.plan).map_err(|e| CliError::io(&args.plan, e))?;
    let plan = FixturePlan::from_toml_str(&text)?;
    let fixture = generate(&plan, args.seed)?;
    let stem = file_part(&args.name);
    let files = vec![
        write_file(out_dir, &format!("{stem}.vert"), &fixture.corpus)?,
        write_file(out_dir, &format!("{stem}.manifest.json"), &fixture.manifest.to_json())?,
    ];
    let stdout = if json {
        let names: Vec<String> = files.iter().map(|f| f.display().to_string()).collect();
        serde_json::json!({ "command": "gen-fixture", "seed": args.seed, "files": names, "stats": fixture.manifest.stats })
            .to_string()
            + "\n"
    } else {
        files.iter().map(|f| format!("wrote {}\n", f.display())).collect()
    };
    Ok(Outcome { files, stdout })
}
