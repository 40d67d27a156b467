use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use kakutani_core::block_reorder::Direction;
use kakutani_core::convergence::{MorseWindow, Probe, Status};
use kakutani_core::good_sets::{good_positions, verify_independence, GoodSet, ParityMode};
use kakutani_core::report::{rational_string, Check, Report};
use kakutani_core::stage_builder::stage2::{build_stage2, verify_stage2, K2};
use kakutani_core::stage_builder::stage4::{
    sample_pairs, sample_targets, verify_good_matching, verify_lazy, verify_maps, verify_variant_matching, NotePolicy,
    Stage4,
};
use kakutani_core::stage_builder::stage6::{sample_omegas, verify_stage6, Stage6};
use kakutani_core::stage_builder::{build_k_sequence, kseq, SeqMode};
use kakutani_core::templates::basic_by_index;
use kakutani_core::{Error, Level, Result, System, Word};

#[derive(Parser)]
#[command(name = "kakutani", version, about = "Finite stages of the Morse/odometer even Kakutani equivalence")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// print the JSON report instead of a summary
    #[arg(long, global = true)]
    json: bool,
    /// also write the report to DIR/<command>.json
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// materialization cap as a power of two (default $KAKUTANI_CAP or 20)
    #[arg(long, global = true)]
    cap: Option<u32>,
}

#[derive(Subcommand)]
enum Cmd {
    /// the stage exponents k_n
    Seq {
        /// ε_2, ε_3, … as decimals or p/q; the last one repeats
        #[arg(long, value_delimiter = ',')]
        eps: Vec<String>,
        #[arg(long, value_enum, default_value = "strict")]
        mode: Mode,
        #[arg(long, value_delimiter = ',')]
        chain: Vec<u32>,
        #[arg(long, default_value_t = 4)]
        stages: usize,
    },
    /// build one stage map or the stage-2 family
    Build {
        #[arg(long)]
        stage: usize,
        #[command(flatten)]
        s4: StageArgs,
        /// index of the basic target in enumeration order
        #[arg(long, default_value_t = 0)]
        target: u128,
        /// include every pair
        #[arg(long)]
        full: bool,
    },
    /// run the verification suite of a stage
    Verify {
        #[arg(long)]
        stage: usize,
        #[arg(long, default_value = "all", value_delimiter = ',')]
        checks: Vec<String>,
        #[command(flatten)]
        s4: StageArgs,
        /// seeded template pairs for the good-set matching
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        /// templates for the diminished/augmented checks
        #[arg(long, default_value_t = 256)]
        variants: usize,
        /// note choices per target
        #[arg(long, default_value_t = 2)]
        choices: usize,
        /// seeded positions for the lazy evaluator
        #[arg(long, default_value_t = 100_000)]
        lazy: usize,
        /// random probes per ω at stage 6
        #[arg(long, default_value_t = 200)]
        random: usize,
    },
    /// good positions of a stage
    Goodset {
        #[arg(long, default_value_t = 4)]
        stage: usize,
        #[command(flatten)]
        s4: StageArgs,
        /// check independence in towers of height 2^{k+Δ} for Δ = 1..=DELTA
        #[arg(long, default_value_t = 0)]
        independence: u32,
    },
    /// φ-chain of a window and the inverse check
    EvalPhi {
        #[command(flatten)]
        w: WindowArgs,
        #[arg(long, default_value_t = 4)]
        max_stage: usize,
        #[command(flatten)]
        s4: StageArgs,
    },
    /// exact counting bound for a level of 𝒬_{k2}
    MeasureBound {
        /// k,i of the odometer level
        #[arg(long)]
        level: String,
        #[arg(long, default_value_t = 1)]
        depth: u32,
        #[command(flatten)]
        s4: StageArgs,
    },
    /// sign of the image displacement of x and T^r x
    OrbitCheck {
        #[command(flatten)]
        w: WindowArgs,
        #[arg(long, allow_hyphen_values = true)]
        r: i128,
        #[command(flatten)]
        s4: StageArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Strict,
    Min,
    Chain,
}

#[derive(Args, Clone)]
struct StageArgs {
    /// k_2, k_3, k_4 (stage 6: 2,k3,k4,k5,k6 or k4,k5,k6; default 14,30,62)
    #[arg(long, value_delimiter = ',', default_value = "2,6,14")]
    chain: Vec<u32>,
    /// auto, formula, even[:offset] or odd[:offset]
    #[arg(long, default_value = "auto")]
    parity: String,
    /// sampled targets
    #[arg(long, default_value_t = 512)]
    sample: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// every basic target instead of a sample
    #[arg(long)]
    exhaustive: bool,
    /// restrict sticky notes to the strict admissibility reading
    #[arg(long)]
    admissible: bool,
}

#[derive(Args, Clone)]
struct WindowArgs {
    /// file of 0/1 symbols (whitespace ignored)
    #[arg(long)]
    window: PathBuf,
    /// index of coordinate 0 (default: middle)
    #[arg(long)]
    center: Option<usize>,
}

impl WindowArgs {
    fn load(&self) -> Result<MorseWindow> {
        let text = std::fs::read_to_string(&self.window)
            .map_err(|e| Error::Invalid(format!("{}: {e}", self.window.display())))?;
        let w = Word::parse(&text)?;
        let c = self.center.unwrap_or(w.len() / 2);
        MorseWindow::new(w, c)
    }
}

impl StageArgs {
    fn exps(&self) -> Result<(u32, u32)> {
        match self.chain.as_slice() {
            [2, k3, k4, ..] => Ok((*k3, *k4)),
            [k3, k4] => Ok((*k3, *k4)),
            c => Err(Error::InfeasibleChain(format!("{c:?}: expected 2,k3,k4"))),
        }
    }

    fn parity(&self) -> Result<ParityMode> {
        let p = self.parity.as_str();
        let (head, off) = p.split_once(':').unwrap_or((p, ""));
        let offset = |def: u128| -> Result<u128> {
            if off.is_empty() {
                Ok(def)
            } else {
                off.parse().map_err(|_| Error::Invalid(format!("bad offset in {p:?}")))
            }
        };
        Ok(match head {
            "auto" => ParityMode::Auto,
            "formula" => ParityMode::Formula,
            "even" => ParityMode::Explicit { parity: 0, offset: offset(6)? },
            "odd" => ParityMode::Explicit { parity: 1, offset: offset(5)? },
            _ => return Err(Error::Invalid(format!("unknown parity mode {p:?}"))),
        })
    }

    fn targets(&self, k4: u32) -> Vec<kakutani_core::templates::Basic> {
        sample_targets(k4, self.sample, self.seed, self.exhaustive)
    }

    fn stage4(&self) -> Result<(Stage4, Vec<kakutani_core::templates::Basic>)> {
        let (k3, k4) = self.exps()?;
        let targets = self.targets(k4);
        let good = good_positions(K2, k3, k4, self.parity()?, false, Direction::MorseTarget, &targets)?;
        let mut st = Stage4::new(k3, k4, good)?;
        if self.admissible {
            st.policy = NotePolicy::Admissible;
        }
        Ok((st, targets))
    }

    fn config(&self) -> serde_json::Value {
        json!({
            "chain": self.chain, "parity": self.parity, "sample": self.sample, "seed": self.seed,
            "exhaustive": self.exhaustive, "admissible": self.admissible,
        })
    }
}

fn goodset_json(g: &GoodSet) -> serde_json::Value {
    json!({
        "layout": g.layout, "passing": g.passing, "count": g.count().to_string(),
        "formula_count": g.formula_count().map(|c| c.to_string()),
        "measure": rational_string(&g.measure()),
        "runs": g.runs().len(),
        "first_runs": g.runs().iter().take(8).map(|(s, l)| [s.to_string(), l.to_string()]).collect::<Vec<_>>(),
    })
}

fn wanted(checks: &[String], name: &str) -> bool {
    checks.iter().any(|c| c == "all" || c == name)
}

fn run(cli: &Cli) -> Result<Report> {
    match &cli.cmd {
        Cmd::Seq { eps, mode, chain, stages } => {
            let eps: Vec<_> = eps.iter().map(|e| kseq::parse_rational(e)).collect::<Result<_>>()?;
            let mode = match mode {
                Mode::Strict => SeqMode::Strict,
                Mode::Min => SeqMode::Min,
                Mode::Chain => SeqMode::Chain,
            };
            let p = build_k_sequence(&eps, mode, chain, *stages)?;
            let bad = kseq::validate(&p);
            let mut rep = Report::new("seq", json!({ "eps": eps.iter().map(rational_string).collect::<Vec<_>>(), "mode": mode, "chain": chain, "stages": stages }));
            rep.push(Check::new("chain re-validates", p.k.len() as u64, bad.first().cloned()));
            let fractions: Vec<String> = (2..p.k.len() - 1).map(|n| rational_string(&kseq::safe_fraction(p.k[n], p.k[n + 1]))).collect();
            rep.data = json!({ "params": p, "safe_fractions": fractions });
            Ok(rep)
        }
        Cmd::Build { stage, s4, target, full } => {
            let mut rep = Report::new("build", json!({ "stage": stage, "stage_args": s4.config(), "target": target.to_string() }));
            match stage {
                2 => {
                    let fam = build_stage2();
                    rep.data = json!(fam
                        .iter()
                        .map(|m| json!({ "source": m.source.to_string(), "target": m.target.to_string(), "A": m.pib.a(), "B": m.pib.b(), "pib": m.pib }))
                        .collect::<Vec<_>>());
                }
                4 => {
                    let (st, _) = s4.stage4()?;
                    let t = basic_by_index(System::Morse, st.k4, *target);
                    let m = st.build(&t, (0, 0))?;
                    let mut d = json!({
                        "target": t.to_string(), "I": m.pib.i.inclusive(), "J": m.pib.j.inclusive(),
                        "pairs": m.pib.pairs.len(),
                        "tail": m.tail.as_ref().map(|x| x.to_string()), "head": m.head.as_ref().map(|x| x.to_string()),
                    });
                    if *full {
                        d["pib"] = json!(m.pib);
                    }
                    rep.data = d;
                }
                _ => return Err(Error::StageUnavailable(format!("explicit build of stage {stage}; stage 6 is lazy (verify --stage 6)"))),
            }
            Ok(rep)
        }
        Cmd::Verify { stage, checks, s4, pairs, variants, choices, lazy, random } => {
            let cfg = json!({ "stage": stage, "checks": checks, "stage_args": s4.config(), "pairs": pairs, "variants": variants, "choices": choices, "lazy": lazy, "random": random });
            let mut rep = Report::new("verify", cfg);
            match stage {
                2 => rep.extend(verify_stage2()),
                4 => {
                    let (st, targets) = s4.stage4()?;
                    rep.data = json!({ "good_set": goodset_json(&st.good), "targets": targets.len() });
                    if wanted(checks, "maps") {
                        rep.extend(verify_maps(&st, &targets, *choices, s4.seed)?);
                    }
                    if wanted(checks, "matching") {
                        rep.push(verify_good_matching(&st, &sample_pairs(&targets, *pairs, s4.seed), None)?);
                    }
                    if wanted(checks, "variants") {
                        rep.extend(verify_variant_matching(&st, &targets[..(*variants).min(targets.len())])?);
                    }
                    if wanted(checks, "lazy") {
                        rep.push(verify_lazy(&st, &targets, *lazy, s4.seed)?);
                    }
                }
                6 => {
                    let (k4, k5, k6) = match s4.chain.as_slice() {
                        [2, _, k4, k5, k6] => (*k4, *k5, *k6),
                        [2, 6, 14] => (14, 30, 62),
                        [k4, k5, k6] => (*k4, *k5, *k6),
                        c => return Err(Error::InfeasibleChain(format!("{c:?}: expected 2,k3,k4,k5,k6"))),
                    };
                    let mut st = Stage6::new(k4, k5, k6)?;
                    if s4.admissible {
                        st.policy = NotePolicy::Admissible;
                    }
                    let omegas = sample_omegas(k4, k6, s4.sample.min(64), s4.seed);
                    rep.extend(verify_stage6(&st, &omegas, *random, s4.seed)?);
                }
                _ => return Err(Error::StageUnavailable(format!("stage {stage}"))),
            }
            Ok(rep)
        }
        Cmd::Goodset { stage, s4, independence } => {
            if *stage != 4 {
                return Err(Error::StageUnavailable(format!("good set of stage {stage}")));
            }
            let (k3, k4) = s4.exps()?;
            let targets = s4.targets(k4);
            let g = good_positions(K2, k3, k4, s4.parity()?, false, Direction::MorseTarget, &targets)?;
            let mut rep = Report::new("goodset", json!({ "stage": stage, "stage_args": s4.config(), "independence": independence }));
            rep.push(Check::new("good runs avoid the safe zones", g.runs().len() as u64, g.safe_zone_violation()));
            if s4.parity()? == ParityMode::Auto {
                let f = (g.passing.len() != 1).then(|| format!("parities passing: {:?}", g.passing));
                rep.push(Check::new("auto parity resolves uniquely", 2, f));
            }
            for delta in 1..=*independence {
                for sys in [System::Morse, System::Odometer] {
                    rep.extend(verify_independence(&g, sys, delta, &|i| i % 2 == 1));
                }
            }
            rep.data = goodset_json(&g);
            Ok(rep)
        }
        Cmd::EvalPhi { w, max_stage, s4 } => {
            let x = w.load()?;
            let (st, targets) = s4.stage4()?;
            let pr = Probe::new(st, targets)?;
            let mut rep = Report::new("eval-phi", json!({ "window": w.window, "center": x.center, "max_stage": max_stage, "stage_args": s4.config() }));
            let chain = pr.eval_phi(&x, (*max_stage).min(4))?;
            rep.push(Check::new("φ-chain nested", chain.entries.len() as u64, (!chain.nested).then(|| "nesting violated".into())));
            let inv = pr.check_inverse(&x, &[2, 4])?;
            let f = match &inv.status {
                Status::Fail { stage, reason } => Some(format!("stage {stage}: {reason}")),
                _ => None,
            };
            rep.push(Check::new("inverse at cylinder precision", 1, f));
            rep.data = json!({ "c2": x.cylinder(K2)?, "chain": chain, "inverse": inv });
            if *max_stage >= 6 {
                rep.data["stage6"] = json!("unresolved: needs a cylinder of 𝒫_{k6}; see inverse.phi for the local stage-6 entry");
            }
            Ok(rep)
        }
        Cmd::MeasureBound { level, depth, s4 } => {
            let bad = || Error::Invalid(format!("--level {level:?}: expected k,i"));
            let (k, i) = level.split_once(',').ok_or_else(bad)?;
            let (k, i): (u32, u128) = (k.trim().parse().map_err(|_| bad())?, i.trim().parse().map_err(|_| bad())?);
            let (st, targets) = s4.stage4()?;
            let pr = Probe::new(st, targets)?;
            let m = pr.measure_bound(&Level::v(k, i), *depth)?;
            let mut rep = Report::new("measure-bound", json!({ "level": [k.to_string(), i.to_string()], "depth": depth, "stage_args": s4.config() }));
            rep.push(Check::new("|J_n(d)| fraction meets the bound", 1, (!m.bound_ok).then(|| format!("{} < {}", rational_string(&m.fraction), rational_string(&m.bound)))));
            rep.push(Check::new("|E_n|/|D_n| = 1/2^{k_2}", 1, (!m.ratio_ok).then(|| rational_string(&m.ratio))));
            rep.data = json!(m);
            Ok(rep)
        }
        Cmd::OrbitCheck { w, r, s4 } => {
            let x = w.load()?;
            let (st, targets) = s4.stage4()?;
            let pr = Probe::new(st, targets)?;
            let o = pr.orbit_sign_check(&x, *r)?;
            let mut rep = Report::new("orbit-check", json!({ "window": w.window, "center": x.center, "r": r.to_string(), "stage_args": s4.config() }));
            let f = match &o.status {
                Status::Fail { stage, reason } => Some(format!("stage {stage}: {reason}")),
                _ => None,
            };
            rep.push(Check::new("sign(t) = sign(r)", o.entries.len() as u64, f));
            rep.data = json!(o);
            Ok(rep)
        }
    }
}

fn summary(rep: &Report) -> String {
    let mut out = String::new();
    if rep.command == "seq" {
        let p = &rep.data["params"];
        let ks = p["k"].as_array().cloned().unwrap_or_default();
        for (n, m) in p["m"].as_array().cloned().unwrap_or_default().iter().enumerate() {
            if let Some(m) = m.as_u64() {
                out.push_str(&format!("m_{} = {m}, k_{} = {}\n", n - 1, n + 1, ks[n + 1]));
            }
        }
        out.push_str(&format!("k = {}\n", serde_json::to_string(&ks).unwrap()));
    }
    if rep.command == "goodset" {
        out.push_str(&format!(
            "layout {}\npassing parities {}\n|G| = {}\nruns: {} starting {}\n",
            rep.data["layout"], rep.data["passing"], rep.data["count"], rep.data["runs"], rep.data["first_runs"]
        ));
    }
    for c in &rep.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status} {} [{}]", c.name, c.count));
        if let Some(d) = &c.detail {
            out.push_str(&format!(" ({d})"));
        }
        if let Some(x) = &c.counterexample {
            out.push_str(&format!(": {x}"));
        }
        out.push('\n');
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(c) = cli.cap {
        std::env::set_var("KAKUTANI_CAP", c.to_string());
    }
    let t = Instant::now();
    let res = run(&cli);
    eprintln!("elapsed {:.3}s", t.elapsed().as_secs_f64());
    let rep = match res {
        Ok(r) => r,
        Err(e) => {
            let mut r = Report::new("error", json!(null));
            r.push(Check::new("configuration", 0, Some(e.to_string())));
            r
        }
    };
    let text = rep.to_json();
    if let Some(dir) = &cli.out {
        let path = dir.join(format!("{}.json", rep.command));
        if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, &text)) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if cli.json {
        println!("{text}");
    } else {
        print!("{}", summary(&rep));
    }
    if rep.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
