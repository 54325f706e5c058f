//! The `matgroup` command line. [`execute`] runs one invocation and returns
//! the exit code with everything meant for stdout; files named by flags
//! are written directly.

use std::fmt::Write as _;
use std::fs;

use clap::{Args, Parser, Subcommand};
use rand::Rng as _;

use crate::analysis::{
    coset_attack, enumerate_group, linearity_attack, oracle_solve, scsp_linear_attack, AttackReport, CosetVerdict,
    LinearityVerdict, OracleAnswer, OracleQuery,
};
use crate::error::Error;
use crate::homcrypt::{hc_decrypt, hc_encrypt, hc_keygen, HomPublicKey, HomSecretKey, Presentation};
use crate::instance::{fingerprint, hom_apply, hom_random, tree_eval, tree_random, DerivationTree, GroupInstance};
use crate::matrix::{word_eval, GroupWord, Matrix, RowVector};
use crate::protocol::{
    aag_run, gdh_run, key_fingerprint, multiparty_run, random_parties, vector_point, Action, AagConfig, GdhConfig,
    Point,
};
use crate::ring::RingSpec;
use crate::rng;
use crate::trapdoor::{ltp_solve, membership};
use crate::words::{build_solvable_pair, FreeWord};

#[derive(Parser)]
#[command(name = "matgroup", about = "Matrix-group cryptography toolkit", disable_version_flag = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance: public generators and the secret tree.
    Gen {
        #[arg(long, default_value_t = 40)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "pub")]
        public: String,
        #[arg(long)]
        sec: String,
    },
    /// Write a random product of the public generators.
    Sample {
        #[arg(long = "pub")]
        public: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        len: usize,
        #[arg(long)]
        out: String,
    },
    /// Decide membership with the secret tree.
    Member {
        #[arg(long)]
        sec: String,
        #[arg(long)]
        elem: String,
        #[arg(long)]
        witness: Option<String>,
    },
    /// Find a group element moving u to v.
    Ltp {
        #[arg(long)]
        sec: String,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Two-party commutator key agreement.
    Aag(ProtocolArgs),
    /// Multi-party commutator key agreement.
    Mparty {
        #[command(flatten)]
        common: ProtocolArgs,
        #[arg(long, default_value_t = 4)]
        parties: usize,
    },
    /// Word-identity key agreement.
    Gdh {
        /// Matrix action of the public group on row vectors.
        #[arg(long = "pub", conflicts_with = "p")]
        public: Option<String>,
        /// Power action on Z_p^*.
        #[arg(long)]
        p: Option<u64>,
        /// Derived length the word pair is built for.
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        transcript: Option<String>,
    },
    /// Free-group homomorphic cryptosystem.
    #[command(subcommand)]
    Hom(HomCommand),
    /// Attacks with verified reports.
    #[command(subcommand)]
    Attack(AttackCommand),
    /// Exhaustive oracles on small groups.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Print the version.
    Version,
}

#[derive(Args)]
struct ProtocolArgs {
    #[arg(long = "pub")]
    public: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Generators per party.
    #[arg(long, default_value_t = 2)]
    gens: usize,
    /// Secret word length.
    #[arg(long, default_value_t = 6)]
    len: usize,
    #[arg(long)]
    transcript: Option<String>,
}

#[derive(Subcommand)]
enum HomCommand {
    Keygen {
        /// klein4, s3 or d4.
        #[arg(long, conflicts_with = "presentation")]
        fixture: Option<String>,
        #[arg(long)]
        presentation: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "pub")]
        public: String,
        #[arg(long)]
        sec: String,
    },
    Encrypt {
        #[arg(long = "pub")]
        public: String,
        /// Message as a JSON array of signed letters.
        #[arg(long)]
        msg: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: String,
    },
    Decrypt {
        #[arg(long)]
        sec: String,
        #[arg(long = "in")]
        input: String,
    },
}

#[derive(Subcommand)]
enum AttackCommand {
    /// Linear attack on a random conjugacy instance in GL(2, q).
    Scsp {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<String>,
    },
    /// Linear prediction of a random secret homomorphism.
    Linearity {
        #[arg(long)]
        sec: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        queries: usize,
        #[arg(long)]
        report: Option<String>,
    },
    /// Coset attack on a ciphertext under a small plaintext group.
    Coset {
        #[arg(long = "pub")]
        public: String,
        #[arg(long = "in")]
        input: String,
        #[arg(long, default_value_t = 200)]
        bound: usize,
        #[arg(long)]
        report: Option<String>,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    Enum {
        #[arg(long = "pub")]
        public: String,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
    /// Membership with --elem, conjugacy with --f and --g, transport with
    /// --u and --v.
    Solve {
        #[arg(long = "pub")]
        public: String,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        #[arg(long)]
        elem: Option<String>,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        u: Option<String>,
        #[arg(long)]
        v: Option<String>,
    },
}

/// Why a command failed.
enum Failure {
    Usage(String),
    Domain(&'static str, Error),
    Io(String),
}

type Outcome = std::result::Result<(), Failure>;

trait Module<T> {
    fn within(self, module: &'static str) -> std::result::Result<T, Failure>;
}

impl<T> Module<T> for crate::error::Result<T> {
    fn within(self, module: &'static str) -> std::result::Result<T, Failure> {
        self.map_err(|e| Failure::Domain(module, e))
    }
}

fn read(path: &str) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{path}: {e}")))
}

fn write(path: &str, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{path}: {e}")))
}

fn read_tree(path: &str) -> std::result::Result<DerivationTree, Failure> {
    DerivationTree::from_json(&read(path)?).within("instance")
}

fn read_instance(path: &str) -> std::result::Result<GroupInstance, Failure> {
    GroupInstance::from_json(&read(path)?).within("instance")
}

fn read_matrix(path: &str) -> std::result::Result<Matrix, Failure> {
    Matrix::from_json(&read(path)?).within("matrix")
}

fn random_word(alphabet: usize, len: usize, r: &mut rng::Rng) -> GroupWord {
    let mut letters: Vec<i32> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = r.gen_range(1..=alphabet as i32) * if r.gen_bool(0.5) { 1 } else { -1 };
        if letters.last() != Some(&-l) {
            letters.push(l);
        }
    }
    GroupWord(letters)
}

fn point_fingerprint(p: &Point) -> String {
    fingerprint(serde_json::to_string(p).expect("serializable").as_bytes())
}

/// Runs one invocation. Exit codes: 0 success, 1 domain failure, 2 usage.
pub fn execute<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(std::iter::once("matgroup".into()).chain(argv.into_iter().map(Into::into))) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => 2,
            };
            let code = if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { code };
            return (code, e.render().to_string());
        }
    };
    let mut out = String::new();
    match run(cli.command, &mut out) {
        Ok(()) => (0, out),
        Err(Failure::Usage(msg)) => (2, format!("{out}usage error: {msg}\n")),
        Err(Failure::Domain(module, e)) => (1, format!("{out}error: {module}: {e}\n")),
        Err(Failure::Io(msg)) => (1, format!("{out}error: io: {msg}\n")),
    }
}

fn run(command: Command, out: &mut String) -> Outcome {
    match command {
        Command::Version => {
            writeln!(out, "matgroup {}", env!("CARGO_PKG_VERSION")).unwrap();
        }
        Command::Gen { size, seed, public, sec } => {
            let t = tree_random(size, seed).within("instance")?;
            let inst = tree_eval(&t).within("instance")?;
            write(&public, &inst.public_json())?;
            write(&sec, &t.canonical_json())?;
            writeln!(out, "degree {} over {}", inst.n, inst.ring).unwrap();
            writeln!(out, "generators {}", inst.gens.len()).unwrap();
            writeln!(out, "fingerprint {}", inst.fingerprint()).unwrap();
        }
        Command::Sample { public, seed, len, out: path } => {
            let inst = read_instance(&public)?;
            let mut r = rng::from_seed(seed);
            let g = word_eval(&inst.gens, &random_word(inst.gens.len(), len, &mut r)).within("matrix")?;
            write(&path, &g.canonical_json())?;
            writeln!(out, "wrote {path}").unwrap();
        }
        Command::Member { sec, elem, witness } => {
            let t = read_tree(&sec)?;
            let g = read_matrix(&elem)?;
            let verdict = membership(&t, &g).within("trapdoor")?;
            writeln!(out, "{}", if verdict.accepted { "yes" } else { "no" }).unwrap();
            if let (Some(path), Some(w)) = (witness, &verdict.witness) {
                write(&path, &serde_json::to_string(w).expect("serializable"))?;
                writeln!(out, "witness {path}").unwrap();
            }
        }
        Command::Ltp { sec, u, v, out: path } => {
            let t = read_tree(&sec)?;
            let ring = tree_eval(&t).within("instance")?.ring;
            let u = RowVector::from_json(&ring, &read(&u)?).within("matrix")?;
            let v = RowVector::from_json(&ring, &read(&v)?).within("matrix")?;
            let g = ltp_solve(&t, &u, &v).within("trapdoor")?;
            writeln!(out, "solution {}", key_fingerprint(&g)).unwrap();
            if let Some(path) = path {
                write(&path, &g.canonical_json())?;
            }
        }
        Command::Aag(args) => {
            let inst = read_instance(&args.public)?;
            let ps = random_parties(&inst, 2, args.gens, args.len, args.seed).within("protocol")?;
            let cfg = AagConfig {
                instance: inst,
                gens_a: ps[0].gens.clone(),
                gens_b: ps[1].gens.clone(),
                secret_a: ps[0].secret.clone(),
                secret_b: ps[1].secret.clone(),
            };
            let res = aag_run(&cfg).within("protocol")?;
            writeln!(out, "key_A {}", key_fingerprint(&res.key_a)).unwrap();
            writeln!(out, "key_B {}", key_fingerprint(&res.key_b)).unwrap();
            writeln!(out, "agree {}", if res.key_a == res.key_b { "yes" } else { "no" }).unwrap();
            for w in &res.warnings {
                writeln!(out, "warning: {w}").unwrap();
            }
            if let Some(path) = args.transcript {
                write(&path, &res.transcript.to_text())?;
            }
        }
        Command::Mparty { common: args, parties } => {
            let inst = read_instance(&args.public)?;
            let ps = random_parties(&inst, parties, args.gens, args.len, args.seed).within("protocol")?;
            let res = multiparty_run(parties, &ps).within("protocol")?;
            for (i, k) in res.keys.iter().enumerate() {
                writeln!(out, "key_P{i} {} ops {}", key_fingerprint(k), res.op_counts[i]).unwrap();
            }
            let agree = res.keys.windows(2).all(|w| w[0] == w[1]);
            writeln!(out, "agree {}", if agree { "yes" } else { "no" }).unwrap();
            for w in &res.warnings {
                writeln!(out, "warning: {w}").unwrap();
            }
            if let Some(path) = args.transcript {
                write(&path, &res.transcript.to_text())?;
            }
        }
        Command::Gdh { public, p, depth, seed, transcript } => {
            let pair = build_solvable_pair(depth, None).within("words")?;
            let mut r = rng::from_seed(seed);
            let cfg = match (public, p) {
                (Some(path), None) => {
                    let inst = read_instance(&path)?;
                    let x0 = RowVector::basis(&inst.ring, inst.n, 0);
                    GdhConfig {
                        action: Action::Matrix { gens_a: inst.gens.clone(), gens_b: inst.gens.clone() },
                        pair,
                        x0: vector_point(&x0),
                        secret_a: random_word(inst.gens.len(), 6, &mut r),
                        secret_b: random_word(inst.gens.len(), 6, &mut r),
                    }
                }
                (None, Some(p)) => {
                    let units: Vec<u64> = (1..p - 1).filter(|&e| gcd(e, p - 1) == 1).collect();
                    if units.is_empty() {
                        return Err(Failure::Usage(format!("--p {p} leaves no exponents")));
                    }
                    let ea = units[r.gen_range(0..units.len())];
                    let eb = units[r.gen_range(0..units.len())];
                    GdhConfig {
                        action: Action::Power { p, gens_a: vec![ea], gens_b: vec![eb] },
                        pair,
                        x0: Point::Residue(2 % p),
                        secret_a: GroupWord(vec![1]),
                        secret_b: GroupWord(vec![1]),
                    }
                }
                _ => return Err(Failure::Usage("gdh needs exactly one of --pub and --p".into())),
            };
            let res = gdh_run(&cfg).within("protocol")?;
            writeln!(out, "key_A {}", point_fingerprint(&res.key_a)).unwrap();
            writeln!(out, "key_B {}", point_fingerprint(&res.key_b)).unwrap();
            writeln!(out, "agree {}", if res.agreed { "yes" } else { "no" }).unwrap();
            for w in &res.warnings {
                writeln!(out, "warning: {w}").unwrap();
            }
            if let Some(path) = transcript {
                write(&path, &res.transcript.to_text())?;
            }
        }
        Command::Hom(cmd) => run_hom(cmd, out)?,
        Command::Attack(cmd) => run_attack(cmd, out)?,
        Command::Oracle(cmd) => run_oracle(cmd, out)?,
    }
    Ok(())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn run_hom(cmd: HomCommand, out: &mut String) -> Outcome {
    match cmd {
        HomCommand::Keygen { fixture, presentation, seed, public, sec } => {
            let p = match (fixture, presentation) {
                (Some(name), None) => {
                    Presentation::fixture(&name).ok_or_else(|| Failure::Usage(format!("unknown fixture {name}")))?
                }
                (None, Some(path)) => Presentation::from_json(&read(&path)?).within("homcrypt")?,
                _ => return Err(Failure::Usage("keygen needs --fixture or --presentation".into())),
            };
            let (pk, sk) = hc_keygen(&p, seed).within("homcrypt")?;
            write(&public, &pk.canonical_json())?;
            write(&sec, &sk.canonical_json())?;
            writeln!(out, "key words {}", pk.x_words.len()).unwrap();
        }
        HomCommand::Encrypt { public, msg, seed, out: path } => {
            let pk = HomPublicKey::from_json(&read(&public)?).within("homcrypt")?;
            let letters: Vec<i32> =
                serde_json::from_str(&msg).map_err(|e| Failure::Usage(format!("--msg: {e}")))?;
            let m = FreeWord::new(pk.presentation.k, &letters).within("homcrypt")?;
            let c = hc_encrypt(&pk, &m, seed).within("homcrypt")?;
            write(&path, &c.to_json())?;
            writeln!(out, "ciphertext length {}", c.len()).unwrap();
        }
        HomCommand::Decrypt { sec, input } => {
            let sk = HomSecretKey::from_json(&read(&sec)?).within("homcrypt")?;
            let c = FreeWord::from_json(sk.sigma.len(), &read(&input)?).within("homcrypt")?;
            writeln!(out, "{}", hc_decrypt(&sk, &c).within("homcrypt")?.to_json()).unwrap();
        }
    }
    Ok(())
}

fn report(out: &mut String, path: Option<String>, rep: &AttackReport) -> Outcome {
    out.push_str(&rep.to_text());
    match path {
        Some(p) => write(&p, &rep.to_text()),
        None => Ok(()),
    }
}

fn run_attack(cmd: AttackCommand, out: &mut String) -> Outcome {
    match cmd {
        AttackCommand::Scsp { q, seed, report: path } => {
            let ring = RingSpec::make(&crate::ring::RingKind::Field(q)).within("ring")?;
            let gens = vec![
                Matrix::from_ints(&ring, &[vec![1, 1], vec![0, 1]]).within("matrix")?,
                Matrix::from_ints(&ring, &[vec![0, 1], vec![-1, 0]]).within("matrix")?,
                Matrix::from_ints(&ring, &[vec![-1, 0], vec![0, 1]]).within("matrix")?,
            ];
            let mut r = rng::from_seed(seed);
            let g = word_eval(&gens, &random_word(3, 12, &mut r)).within("matrix")?;
            let h = word_eval(&gens, &random_word(3, 12, &mut r)).within("matrix")?;
            let f = g.conjugate_by(&h).within("matrix")?;
            let rep = match scsp_linear_attack(&gens, &f, &g, seed) {
                Ok(res) => AttackReport {
                    attack: "scsp".into(),
                    verdict: "success".into(),
                    witness: Some(res.h.rows_json()),
                    verified: g.conjugate_by(&res.h).is_ok_and(|x| x == f),
                    seed,
                    warnings: res.warnings,
                },
                Err(e @ (Error::Failure(_) | Error::NoSolutionSpace)) => AttackReport {
                    attack: "scsp".into(),
                    verdict: format!("failure: {e}"),
                    witness: None,
                    verified: false,
                    seed,
                    warnings: vec![],
                },
                Err(e) => return Err(Failure::Domain("analysis", e)),
            };
            report(out, path, &rep)?;
        }
        AttackCommand::Linearity { sec, seed, queries, report: path } => {
            let t = read_tree(&sec)?;
            let h = hom_random(&t, seed).within("instance")?;
            let gens = tree_eval(&t).within("instance")?.gens;
            let mut r = rng::from_seed(seed);
            let (mut agree, mut inconclusive) = (0, 0);
            let mut counterexample = None;
            for _ in 0..queries {
                let q = word_eval(&gens, &random_word(gens.len(), 10, &mut r)).within("matrix")?;
                match linearity_attack(&gens, &h.gen_images, &q) {
                    LinearityVerdict::Inconclusive => inconclusive += 1,
                    LinearityVerdict::Predicted(p) => {
                        if p == hom_apply(&h, &q).within("instance")? {
                            agree += 1;
                        } else if counterexample.is_none() {
                            counterexample = Some(q.rows_json());
                        }
                    }
                }
            }
            let verdict = match &counterexample {
                Some(_) => "counterexample".to_string(),
                None => format!("agree {agree}/{queries}, inconclusive {inconclusive}"),
            };
            let rep = AttackReport {
                attack: "linearity".into(),
                verdict,
                witness: counterexample,
                verified: true,
                seed,
                warnings: vec![],
            };
            report(out, path, &rep)?;
        }
        AttackCommand::Coset { public, input, bound, report: path } => {
            let pk = HomPublicKey::from_json(&read(&public)?).within("homcrypt")?;
            let model = pk
                .presentation
                .model
                .clone()
                .ok_or_else(|| Failure::Usage("the public key has no finite model".into()))?;
            let c = FreeWord::from_json(pk.presentation.k, &read(&input)?).within("homcrypt")?;
            let attack = coset_attack(&pk, &model, bound).within("analysis")?;
            let rep = match attack.recover(&c).within("analysis")? {
                CosetVerdict::Recovered { plaintext, certificate } => AttackReport {
                    attack: "coset".into(),
                    verdict: format!("recovered {}", plaintext.to_json()),
                    witness: Some(serde_json::to_string(&certificate).expect("serializable")),
                    verified: true,
                    seed: 0,
                    warnings: vec![],
                },
                CosetVerdict::Inconclusive => AttackReport {
                    attack: "coset".into(),
                    verdict: "inconclusive".into(),
                    witness: None,
                    verified: false,
                    seed: 0,
                    warnings: vec![],
                },
            };
            report(out, path, &rep)?;
        }
    }
    Ok(())
}

fn run_oracle(cmd: OracleCommand, out: &mut String) -> Outcome {
    match cmd {
        OracleCommand::Enum { public, cap } => {
            let inst = read_instance(&public)?;
            let group = enumerate_group(&inst.gens, cap).within("analysis")?;
            writeln!(out, "order {}", group.len()).unwrap();
        }
        OracleCommand::Solve { public, cap, elem, f, g, u, v } => {
            let inst = read_instance(&public)?;
            let query = match (elem, f, g, u, v) {
                (Some(e), None, None, None, None) => OracleQuery::Membership(read_matrix(&e)?),
                (None, Some(f), Some(g), None, None) => {
                    OracleQuery::Conjugacy { f: read_matrix(&f)?, g: read_matrix(&g)? }
                }
                (None, None, None, Some(u), Some(v)) => OracleQuery::Ltp {
                    u: RowVector::from_json(&inst.ring, &read(&u)?).within("matrix")?,
                    v: RowVector::from_json(&inst.ring, &read(&v)?).within("matrix")?,
                },
                _ => return Err(Failure::Usage("give --elem, or --f and --g, or --u and --v".into())),
            };
            let group = enumerate_group(&inst.gens, cap).within("analysis")?;
            match oracle_solve(&group, &query).within("analysis")? {
                OracleAnswer::Solution { element, word } => {
                    writeln!(out, "yes {}", element.rows_json()).unwrap();
                    writeln!(out, "word {}", serde_json::to_string(&word).expect("serializable")).unwrap();
                }
                OracleAnswer::NoSolution => writeln!(out, "no").unwrap(),
            }
        }
    }
    Ok(())
}
