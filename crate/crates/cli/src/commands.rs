//! Subcommands. Every command reads and writes files only; outputs are
//! replaced atomically.

use std::{
    fs,
    path::{Path, PathBuf},
};

use anyhow::{bail, ensure, Context};
use clap::{Args, Parser, Subcommand};
use ppats::{
    election::{
        board_digest, build_ballot, tally_with_table, verify_ballot, verify_transcript_with, Board, VerifyMode,
        BoardEntry, BoardEvent, CiphertextStore, ElectionSpec, Question, SelectionRule, StoredBallot, Transcript,
    },
    group::BackendKind,
    encryption::keygen as generate_key,
    threshold::deal,
    Backend, GroupParams,
};
use rand::RngCore;
use serde_json::{json, Value};

use crate::{
    bench::{self, BenchOptions},
    dlog_cache,
    exec::{pool, Rayon},
    formats::{self, rule_name},
    json::{read_file, to_text, write_file, Codec},
    params::AnyParams,
    rng::command_rng,
    with_params,
};

/// Exit status for a failed verification or a rejected ballot.
pub const EXIT_FAILED: i32 = 1;
/// Exit status for unreadable input or a refused operation.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ppats", version, about = "Elections with a perfectly private audit trail")]
pub struct Cli {
    /// Worker threads for ballot validation and verification.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Deterministic randomness from this seed. Needs --insecure-test.
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Allow --seed. Never use for a real election.
    #[arg(long, global = true)]
    pub insecure_test: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate group parameters.
    Setup(SetupArgs),
    /// Deal threshold key shares.
    Keygen(KeygenArgs),
    /// Encrypt a ballot.
    Cast(CastArgs),
    /// Create, extend or inspect the bulletin board.
    #[command(subcommand)]
    Board(BoardCommand),
    /// Decrypt the tally with trustee shares.
    Tally(TallyArgs),
    /// Check a transcript; exits 0 only if every check passes.
    Verify(VerifyArgs),
    /// Time group operations and ballot preparation.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct SetupArgs {
    /// `toy` or `bn254`.
    #[arg(long, default_value = "bn254")]
    pub backend: String,
    /// Prime group order, toy backend only.
    #[arg(long)]
    pub order: Option<u64>,
    /// Seed the generators are hashed from; random if omitted.
    #[arg(long)]
    pub group_seed: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct KeygenArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub threshold: u32,
    #[arg(long)]
    pub trustees: u32,
    /// Receives `sharing.json` and `share-<i>.json`.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum BoardCommand {
    /// Start an election with an empty board.
    Init(BoardInitArgs),
    /// Validate ballots and append them to the board.
    Add(BoardAddArgs),
    /// Print the board contents.
    Show(BoardShowArgs),
}

#[derive(Debug, Args)]
pub struct BoardInitArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub sharing: PathBuf,
    #[arg(long)]
    pub election_id: String,
    /// Response counts per question, e.g. `2,3,4`; append `:at-most-K` to
    /// allow up to K selections instead of exactly one.
    #[arg(long)]
    pub questions: String,
    /// File with one voter id per line.
    #[arg(long, conflicts_with = "voter_count", required_unless_present = "voter_count")]
    pub voters: Option<PathBuf>,
    /// Generate the roll `voter-1` .. `voter-N`.
    #[arg(long)]
    pub voter_count: Option<u32>,
    #[arg(long)]
    pub transcript: PathBuf,
    /// Trustee-private ciphertext store.
    #[arg(long)]
    pub store: PathBuf,
}

#[derive(Debug, Args)]
pub struct CastArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub transcript: PathBuf,
    #[arg(long)]
    pub voter: String,
    /// Selected responses per question, e.g. `1;0;2`. Separate several
    /// selections with commas; leave a question empty to select nothing.
    #[arg(long, allow_hyphen_values = true)]
    pub choices: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BoardAddArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub transcript: PathBuf,
    #[arg(long)]
    pub store: PathBuf,
    #[arg(required = true)]
    pub ballots: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoardShowArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub transcript: PathBuf,
}

#[derive(Debug, Args)]
pub struct TallyArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub transcript: PathBuf,
    #[arg(long)]
    pub store: PathBuf,
    /// Trustee share files; at least the threshold.
    #[arg(long = "share", required = true)]
    pub shares: Vec<PathBuf>,
    /// Baby-step table cache; built and saved if missing or stale.
    #[arg(long)]
    pub dlog_cache: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub transcript: PathBuf,
    /// Stop at the first failing check instead of reporting all of them.
    #[arg(long)]
    pub fail_fast: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Parameter file; otherwise fresh parameters for --backend.
    #[arg(long, conflicts_with_all = ["backend", "order"])]
    pub params: Option<PathBuf>,
    #[arg(long, default_value = "bn254")]
    pub backend: String,
    #[arg(long)]
    pub order: Option<u64>,
    /// Timed repetitions per measurement.
    #[arg(long, default_value_t = 21)]
    pub samples: usize,
    /// Write the report here as well as to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a command produced: text for stdout and an exit status.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub status: i32,
}

impl Outcome {
    fn ok(value: &Value) -> Self {
        Self {
            stdout: to_text(value),
            status: 0,
        }
    }
}

struct Context_ {
    seed: Option<Vec<u8>>,
}

impl Context_ {
    fn rng(&self, command: &str, context: &[u8]) -> rand_chacha::ChaCha20Rng {
        command_rng(self.seed.as_deref(), command, context)
    }
}

/// Runs a parsed command line on a pool of `--threads` workers.
pub fn run(cli: Cli) -> anyhow::Result<Outcome> {
    if cli.seed.is_some() && !cli.insecure_test {
        bail!("--seed makes every secret predictable and requires --insecure-test");
    }
    let ctx = Context_ {
        seed: cli.seed.map(String::into_bytes),
    };
    pool(cli.threads)?.install(|| dispatch(&ctx, cli.command))
}

fn dispatch(ctx: &Context_, command: Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Setup(args) => setup(ctx, args),
        Command::Keygen(args) => {
            let params = AnyParams::load(&args.params)?;
            with_params!(&params, p => keygen(ctx, p, &args))
        }
        Command::Board(BoardCommand::Init(args)) => {
            let params = AnyParams::load(&args.params)?;
            with_params!(&params, p => board_init(p, &args))
        }
        Command::Cast(args) => {
            let params = AnyParams::load(&args.params)?;
            with_params!(&params, p => cast(ctx, p, &args))
        }
        Command::Board(BoardCommand::Add(args)) => {
            let params = AnyParams::load(&args.params)?;
            with_params!(&params, p => board_add(p, &args))
        }
        Command::Board(BoardCommand::Show(args)) => {
            let params = AnyParams::load(&args.params)?;
            with_params!(&params, p => board_show(p, &args))
        }
        Command::Tally(args) => {
            let mut params = AnyParams::load(&args.params)?;
            with_params!(&mut params, p => tally(ctx, p, &args))
        }
        Command::Verify(args) => {
            let mut params = AnyParams::load(&args.params)?;
            with_params!(&mut params, p => verify(p, &args))
        }
        Command::Bench(args) => bench_command(ctx, &args),
    }
}

fn parse_backend(name: &str) -> anyhow::Result<BackendKind> {
    name.parse()
        .map_err(|_| anyhow::anyhow!("unknown backend {name:?}, expected toy or bn254"))
}

fn setup(ctx: &Context_, args: SetupArgs) -> anyhow::Result<Outcome> {
    let kind = parse_backend(&args.backend)?;
    let seed = match args.group_seed {
        Some(seed) => seed,
        None => {
            let mut bytes = [0_u8; 16];
            ctx.rng("setup", b"").fill_bytes(&mut bytes);
            hex::encode(bytes)
        }
    };
    let params = AnyParams::setup(kind, args.order, seed.as_bytes())?;
    let value = params.to_json();
    write_file(&args.out, &value)?;
    Ok(Outcome::ok(&json!({
        "params": args.out,
        "description_hash": hex::encode(params.description_hash()),
    })))
}

fn keygen<B: Backend>(ctx: &Context_, params: &GroupParams<B>, args: &KeygenArgs) -> anyhow::Result<Outcome> {
    let mut rng = ctx.rng("keygen", params.description_hash());
    // The dealer's key exists only here and is zeroized when dropped.
    let (_, sk) = generate_key(params, &mut rng);
    let (shares, sharing) = deal(params, sk.expose_scalar(), args.threshold, args.trustees, &mut rng)?;
    drop(sk);
    fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let codec = Codec::new(params);
    let sharing_path = args.out_dir.join("sharing.json");
    write_file(&sharing_path, &codec.sharing_file(&sharing))?;
    let mut share_paths = Vec::new();
    for share in &shares {
        let path = args.out_dir.join(format!("share-{}.json", share.index));
        write_file(&path, &codec.share_file(share))?;
        share_paths.push(path);
    }
    Ok(Outcome::ok(&json!({
        "sharing": sharing_path,
        "shares": share_paths,
        "public_key": codec.g1(&sharing.public_key().elem()),
    })))
}

/// Parses `2,3,4:at-most-2`.
pub fn parse_questions(text: &str) -> anyhow::Result<Vec<Question>> {
    text.split(',')
        .map(|item| {
            let (count, rule) = match item.split_once(':') {
                Some((count, rule)) => (
                    count,
                    formats::parse_rule(rule.trim())
                        .with_context(|| format!("unknown selection rule {rule:?}"))?,
                ),
                None => (item, SelectionRule::ExactlyOne),
            };
            let responses = count
                .trim()
                .parse()
                .with_context(|| format!("invalid response count {count:?}"))?;
            Ok(Question { responses, rule })
        })
        .collect()
}

/// Parses `1;0,2;` into one selection list per question.
pub fn parse_choices(text: &str) -> anyhow::Result<Vec<Vec<u32>>> {
    text.split(';')
        .map(|question| {
            let question = question.trim();
            if question.is_empty() || question == "-" {
                return Ok(Vec::new());
            }
            question
                .split(',')
                .map(|r| r.trim().parse().with_context(|| format!("invalid response index {r:?}")))
                .collect()
        })
        .collect()
}

fn board_init<B: Backend>(params: &GroupParams<B>, args: &BoardInitArgs) -> anyhow::Result<Outcome> {
    let codec = Codec::new(params);
    let sharing = codec.read_sharing_file(&read_file(&args.sharing)?)
        .with_context(|| format!("loading {}", args.sharing.display()))?;
    let voters = match (&args.voters, args.voter_count) {
        (Some(path), _) => fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?
            .lines()
            .map(str::trim)
            .filter(|line| !line.is_empty())
            .map(String::from)
            .collect(),
        (None, Some(n)) => (1..=n).map(|i| format!("voter-{i}")).collect(),
        (None, None) => bail!("give --voters or --voter-count"),
    };
    let spec = ElectionSpec::new(
        params,
        args.election_id.clone(),
        parse_questions(&args.questions)?,
        voters,
        sharing,
    )?;
    let transcript = Transcript {
        spec,
        board: Board::default(),
        tally: None,
    };
    write_file(&args.store, &codec.store(&CiphertextStore::default()))?;
    write_file(&args.transcript, &codec.transcript(&transcript))?;
    Ok(Outcome::ok(&json!({ "transcript": args.transcript, "store": args.store })))
}

fn load_transcript<B: Backend>(codec: &Codec<'_, B>, path: &Path) -> anyhow::Result<Transcript<B>> {
    let transcript = codec
        .read_transcript(&read_file(path)?)
        .with_context(|| format!("loading {}", path.display()))?;
    transcript
        .spec
        .validate(codec.params)
        .with_context(|| format!("{}: invalid election", path.display()))?;
    Ok(transcript)
}

fn cast<B: Backend>(ctx: &Context_, params: &GroupParams<B>, args: &CastArgs) -> anyhow::Result<Outcome> {
    let codec = Codec::new(params);
    let transcript = load_transcript(&codec, &args.transcript)?;
    let choices = parse_choices(&args.choices)?;
    let mut context = args.voter.as_bytes().to_vec();
    context.push(0);
    context.extend_from_slice(args.choices.as_bytes());
    let mut rng = ctx.rng("cast", &context);
    let ballot = build_ballot(params, &transcript.spec, &args.voter, &choices, &mut rng)?;
    write_file(&args.out, &codec.ballot(&transcript.spec.election_id, &ballot))?;
    Ok(Outcome::ok(&json!({ "ballot": args.out, "voter": args.voter })))
}

fn board_add<B: Backend>(params: &GroupParams<B>, args: &BoardAddArgs) -> anyhow::Result<Outcome> {
    let codec = Codec::new(params);
    let mut transcript = load_transcript(&codec, &args.transcript)?;
    ensure!(transcript.tally.is_none(), "the board is closed: a tally has been published");
    let mut store = codec
        .read_store(&read_file(&args.store)?)
        .with_context(|| format!("loading {}", args.store.display()))?;
    ensure!(
        store.ballots.len() == transcript.board.entries.len(),
        "{} does not match the board",
        args.store.display()
    );
    let spec = &transcript.spec;

    let decoded: Vec<_> = args
        .ballots
        .iter()
        .map(|path| -> anyhow::Result<_> {
            let (election_id, ballot) = codec
                .read_ballot(&read_file(path)?)
                .with_context(|| format!("loading {}", path.display()))?;
            ensure!(election_id == spec.election_id, "ballot was cast in election {election_id:?}");
            Ok(ballot)
        })
        .collect();
    // Distinct ballots are checked in parallel; appends stay in file order.
    let checks = ppats::exec::Executor::map(&Rayon, &decoded, |ballot| match ballot {
        Ok(ballot) => verify_ballot(params, spec, ballot, &Rayon).map_err(anyhow::Error::from),
        Err(err) => Err(anyhow::anyhow!("{err:#}")),
    });

    let mut results = Vec::new();
    let mut rejected = 0;
    for ((path, ballot), check) in args.ballots.iter().zip(decoded).zip(checks) {
        match check.and(ballot) {
            Ok(ballot) => {
                let position = transcript.board.entries.len();
                let replaces = transcript.board.entries.iter().rposition(|e| e.voter == ballot.voter);
                transcript.board.entries.push(BoardEntry::from_ballot(&ballot));
                store.ballots.push(StoredBallot {
                    voter: ballot.voter.clone(),
                    cells: ballot
                        .cells
                        .iter()
                        .map(|row| row.iter().map(|cell| cell.ciphertext.clone()).collect())
                        .collect(),
                });
                results.push(json!({
                    "ballot": path,
                    "status": "posted",
                    "position": position,
                    "voter": ballot.voter,
                    "replaces": replaces,
                }));
            }
            Err(err) => {
                rejected += 1;
                results.push(json!({ "ballot": path, "status": "rejected", "error": format!("{err:#}") }));
            }
        }
    }
    // Store first: a store longer than the board is detected and refused above.
    write_file(&args.store, &codec.store(&store))?;
    write_file(&args.transcript, &codec.transcript(&transcript))?;
    Ok(Outcome {
        stdout: to_text(&Value::Array(results)),
        status: if rejected == 0 { 0 } else { EXIT_FAILED },
    })
}

fn board_show<B: Backend>(params: &GroupParams<B>, args: &BoardShowArgs) -> anyhow::Result<Outcome> {
    let codec = Codec::new(params);
    let transcript = codec
        .read_transcript(&read_file(&args.transcript)?)
        .with_context(|| format!("loading {}", args.transcript.display()))?;
    let counted = transcript.board.counted_positions();
    let entries: Vec<Value> = transcript
        .board
        .history()
        .into_iter()
        .map(|event| {
            let (position, voter, replaces) = match event {
                BoardEvent::Posted { position, voter } => (position, voter, None),
                BoardEvent::Replaced {
                    position,
                    previous,
                    voter,
                } => (position, voter, Some(previous)),
            };
            json!({
                "position": position,
                "voter": voter,
                "replaces": replaces,
                "counted": counted.contains(&position),
            })
        })
        .collect();
    let spec = &transcript.spec;
    let tally = transcript.tally.as_ref().map(|t| {
        json!({
            "counted": t.counted,
            "excluded": t.exclusions.iter().map(|x| x.position).collect::<Vec<_>>(),
            "results": t.responses.iter().map(|row| row.iter().map(|r| r.result).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    });
    Ok(Outcome::ok(&json!({
        "election_id": spec.election_id,
        "questions": spec.questions.iter().map(|q| json!({ "responses": q.responses, "rule": rule_name(q.rule) })).collect::<Vec<_>>(),
        "voters": spec.voters.len(),
        "board_digest": hex::encode(board_digest(params, &transcript.board.entries)),
        "entries": entries,
        "tally": tally,
    })))
}

fn tally<B: Backend>(ctx: &Context_, params: &mut GroupParams<B>, args: &TallyArgs) -> anyhow::Result<Outcome> {
    params.precompute();
    let params = &*params;
    let codec = Codec::new(params);
    let mut transcript = load_transcript(&codec, &args.transcript)?;
    ensure!(transcript.tally.is_none(), "a tally has already been published");
    let store = codec
        .read_store(&read_file(&args.store)?)
        .with_context(|| format!("loading {}", args.store.display()))?;
    let shares = args
        .shares
        .iter()
        .map(|path| {
            codec
                .read_share_file(&read_file(path)?)
                .with_context(|| format!("loading {}", path.display()))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let bound = transcript.spec.voters.len().max(1) as u64;
    let (table, cached) = match &args.dlog_cache {
        Some(path) => {
            let (table, cached) = dlog_cache::load_or_build(params, path, bound)?;
            (Some(table), Some(cached))
        }
        None => (None, None),
    };
    let digest = board_digest(params, &transcript.board.entries);
    let mut rng = ctx.rng("tally", &digest);
    let record = tally_with_table(
        params,
        &transcript.spec,
        &transcript.board,
        &store,
        shares,
        table.as_ref(),
        &mut rng,
        &Rayon,
    )?;
    let summary = json!({
        "counted": record.counted,
        "excluded": record.exclusions.iter().map(|x| x.position).collect::<Vec<_>>(),
        "results": record.responses.iter().map(|row| row.iter().map(|r| r.result).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "dlog_cache_hit": cached,
    });
    transcript.tally = Some(record);
    write_file(&args.transcript, &codec.transcript(&transcript))?;
    Ok(Outcome::ok(&summary))
}

fn verify<B: Backend>(params: &mut GroupParams<B>, args: &VerifyArgs) -> anyhow::Result<Outcome> {
    params.precompute();
    let params = &*params;
    let codec = Codec::new(params);
    let decoded = read_file(&args.transcript).and_then(|value| Ok(codec.read_transcript(&value)?));
    let report = match decoded {
        Ok(transcript) => {
            let mode = if args.fail_fast { VerifyMode::FirstFailure } else { VerifyMode::Full };
            formats::report(&verify_transcript_with(params, &transcript, &Rayon, mode))
        }
        // An undecodable transcript is reported as a failed check.
        Err(err) => ppats_format_failure(&format!("{err:#}")),
    };
    let passed = report["all_passed"] == Value::Bool(true);
    Ok(Outcome {
        stdout: to_text(&report),
        status: if passed { 0 } else { EXIT_FAILED },
    })
}

fn ppats_format_failure(message: &str) -> Value {
    crate::json::envelope(
        "verification-report",
        [
            ("all_passed".to_owned(), Value::Bool(false)),
            (
                "checks".to_owned(),
                json!([{ "name": "format", "passed": false, "failures": [message] }]),
            ),
        ]
        .into_iter()
        .collect(),
    )
}

fn bench_command(ctx: &Context_, args: &BenchArgs) -> anyhow::Result<Outcome> {
    let mut params = match &args.params {
        Some(path) => AnyParams::load(path)?,
        None => AnyParams::setup(parse_backend(&args.backend)?, args.order, b"bench")?,
    };
    let options = BenchOptions { samples: args.samples };
    let mut rng = ctx.rng("bench", b"");
    let report = with_params!(&mut params, p => bench::run(p, &options, &mut rng));
    if let Some(out) = &args.out {
        write_file(out, &report)?;
    }
    Ok(Outcome::ok(&report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn question_and_choice_syntax() {
        let questions = parse_questions("2, 3:at-most-2,4:exactly-one").unwrap();
        assert_eq!(
            questions,
            [
                Question::exactly_one(2),
                Question {
                    responses: 3,
                    rule: SelectionRule::AtMost(2)
                },
                Question::exactly_one(4),
            ]
        );
        assert!(parse_questions("2,x").is_err());
        assert!(parse_questions("2:any").is_err());
        assert_eq!(parse_choices("1;0,2;").unwrap(), [vec![1], vec![0, 2], vec![]]);
        assert_eq!(parse_choices("-").unwrap(), [Vec::<u32>::new()]);
        assert!(parse_choices("1;a").is_err());
    }
}
