use std::fmt::Write as _;
use std::fs;
use std::io::Read as _;

use num_bigint::BigUint;

use finiteverse::ensemble::{arrow_of_time, sample_frequencies};
use finiteverse::entanglement::{order_invariance_check, Collapse, Mode};
use finiteverse::formats;
use finiteverse::kernel::{Kernel, Power};
use finiteverse::life::{detect_period, run_block, LifeState};
use finiteverse::mwi::{singlet_events, viewer_invariance, Correlator, EventSpec};
use finiteverse::query::Query;
use finiteverse::relativity::{
    interval_class, interval_squared, reversing_velocity, temporal_order, Boost, Event,
    SPEED_OF_LIGHT,
};
use finiteverse::Error;

use crate::{Command, ModeArg, OrderArg};

pub enum Failure {
    /// An invariance check failed; the report is still printed.
    Violation(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<String, Failure>;

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))
    }
}

fn read_kernel(path: &str) -> Result<Kernel, Failure> {
    formats::parse_kernel(&read_input(path)?).map_err(|e| Failure::Input(format!("{path}: {e}")))
}

pub fn run(command: Command) -> CmdResult {
    match command {
        Command::Entangle {
            alice,
            bob,
            order,
            mode,
            max_denominator,
            kernel_out,
        } => entangle(alice, bob, order, mode, max_denominator, kernel_out),
        Command::Kernel {
            files,
            power,
            reduce,
            prob,
            materialize_limit,
            enumerate,
        } => kernel(&files, power, reduce, prob, materialize_limit, enumerate),
        Command::Sample { file, n, seed } => {
            let k = read_kernel(&file)?;
            let report = sample_frequencies(&k, n, seed)?;
            Ok(formats::sample_csv(&report, &k))
        }
        Command::Frames { file, v, si } => frames(&file, &v, si),
        Command::Tree {
            events,
            joint,
            names,
            alice,
            bob,
            orders,
            all_orders,
        } => tree(events, joint, names, alice.zip(bob), orders, all_orders),
        Command::Arrow { file, m, steps } => {
            let k = read_kernel(&file)?;
            Ok(formats::arrow_csv(&arrow_of_time(&k, m, steps)?))
        }
        Command::Life {
            file,
            horizon,
            detect_period,
            emit_states,
            budget,
        } => life(&file, horizon, detect_period, emit_states, budget),
    }
}

fn collapse_rows(out: &mut String, name: &str, c: &Collapse) {
    for (outcome, p) in &c.distribution {
        let count = c.kernel.count(&outcome.label());
        writeln!(
            out,
            "{name:<12} {:<8} {:<12} {:<10.6} {}",
            outcome.to_string(),
            p.to_string(),
            p.to_f64(),
            count
        )
        .unwrap();
    }
}

fn entangle(
    alice: i64,
    bob: i64,
    order: OrderArg,
    mode: ModeArg,
    max_denominator: u64,
    kernel_out: Option<String>,
) -> CmdResult {
    let mode = match mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Approx => Mode::Approx { max_denominator },
    };
    let inv = order_invariance_check(alice, bob, mode)?;
    let a = &inv.alice_first;
    let mut out = String::new();
    writeln!(
        out,
        "alice filter {}  bob filter {}  mode {}",
        a.config.alice_angle(),
        a.config.bob_angle(),
        match mode {
            Mode::Exact => "exact".to_string(),
            Mode::Approx { max_denominator } =>
                format!("approx (denominator <= {max_denominator})"),
        }
    )
    .unwrap();
    writeln!(
        out,
        "{:<12} {:<8} {:<12} {:<10} count",
        "order", "outcome", "probability", "decimal"
    )
    .unwrap();
    if order != OrderArg::BobFirst {
        collapse_rows(&mut out, "alice-first", a);
    }
    if order != OrderArg::AliceFirst {
        collapse_rows(&mut out, "bob-first", &inv.bob_first);
    }
    let b = &inv.bob_first;
    writeln!(
        out,
        "in flight (alice-first): Alice up -> {} toward Bob; Alice down -> {} toward Bob",
        a.in_flight[0], a.in_flight[1]
    )
    .unwrap();
    writeln!(
        out,
        "in flight (bob-first): Bob up -> {} toward Alice; Bob down -> {} toward Alice",
        b.in_flight[0], b.in_flight[1]
    )
    .unwrap();
    writeln!(out, "kernel total {}", a.kernel.total()).unwrap();
    for (name, c) in [("alice-first", a), ("bob-first", b)] {
        if let Some(err) = c.approx_error {
            writeln!(out, "max approximation error ({name}): {err:.3e}").unwrap();
        }
    }
    if let Some(path) = kernel_out {
        fs::write(&path, formats::write_kernel(&a.kernel))
            .map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    }
    if inv.agree {
        out.push_str("orders agree\n");
        Ok(out)
    } else {
        out.push_str("ORDERS DISAGREE\n");
        Err(Failure::Violation(out))
    }
}

fn kernel(
    files: &[String],
    power: Option<u64>,
    reduce: bool,
    prob: Option<String>,
    materialize_limit: u64,
    enumerate: bool,
) -> CmdResult {
    let mut k = read_kernel(&files[0])?;
    for f in &files[1..] {
        k = k.tensor(&read_kernel(f)?);
    }
    if reduce {
        k = k.reduce();
    }
    let limit = BigUint::from(materialize_limit);
    let powered = match power {
        Some(n) => k.power(n, &limit)?,
        None => Power::Materialized {
            kernel: k,
            exponent: 1,
        },
    };
    if let Some(q) = prob {
        let query: Query = q.parse()?;
        return Ok(format!("{}\n", query.probability(&powered)?));
    }
    match powered {
        Power::Materialized { kernel, .. } if enumerate => {
            let cap = materialize_limit;
            Ok(kernel
                .enumerate_universes(cap)?
                .iter()
                .map(|l| format!("{}\n", l.to_wire()))
                .collect())
        }
        Power::Materialized { kernel, .. } => Ok(formats::write_kernel(&kernel)),
        Power::Symbolic(pk) => {
            if enumerate {
                return Err(Error::EnumerationCap {
                    total: pk.total().to_string(),
                    cap: materialize_limit.to_string(),
                }
                .into());
            }
            let mut out = format!(
                "#kernel-power v1 exponent={} total={}\n",
                pk.exponent(),
                pk.total()
            );
            out.push_str(&formats::write_kernel(pk.base()));
            Ok(out)
        }
    }
}

fn frames(file: &str, velocities: &[f64], si: bool) -> CmdResult {
    let mut events = formats::parse_frame_events(&read_input(file)?)
        .map_err(|e| Failure::Input(format!("{file}: {e}")))?;
    let boosts = velocities
        .iter()
        .map(|&v| if si { Boost::from_si(v) } else { Boost::new(v) })
        .collect::<Result<Vec<_>, _>>()?;
    if si {
        events = events
            .into_iter()
            .map(|e| Event::from_si(e.label, e.t, e.x))
            .collect::<Result<_, _>>()?;
    }
    let mut out = String::from("pair,interval_squared,class,v,order,reversing_v\n");
    for (i, e1) in events.iter().enumerate() {
        for e2 in &events[i + 1..] {
            let s2 = interval_squared(e1, e2);
            let class = interval_class(e1, e2);
            let rev = match reversing_velocity(e1, e2) {
                Ok(b) if si => format!("{}", b.velocity() * SPEED_OF_LIGHT),
                Ok(b) => format!("{}", b.velocity()),
                Err(_) => "none".to_string(),
            };
            for (b, v) in boosts.iter().zip(velocities) {
                writeln!(
                    out,
                    "{}/{},{},{},{},{},{}",
                    e1.label,
                    e2.label,
                    s2,
                    class,
                    v,
                    temporal_order(e1, e2, *b),
                    rev
                )
                .unwrap();
            }
        }
    }
    Ok(out)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn tree(
    events_file: Option<String>,
    joint_file: Option<String>,
    names: Vec<String>,
    singlet: Option<(i64, i64)>,
    orders: Vec<String>,
    all_orders: bool,
) -> CmdResult {
    let (events, correlator): (Vec<EventSpec>, Correlator) =
        match (events_file, joint_file, singlet) {
            (Some(f), _, _) => {
                let ev = formats::parse_branch_events(&read_input(&f)?)
                    .map_err(|e| Failure::Input(format!("{f}: {e}")))?;
                (ev, Correlator::Independent)
            }
            (None, Some(f), _) => {
                let joint = read_kernel(&f)?;
                let names: Vec<&str> = names.iter().map(String::as_str).collect();
                (
                    EventSpec::from_joint(&joint, &names)?,
                    Correlator::Joint(joint),
                )
            }
            (None, None, Some((a, b))) => singlet_events(a, b, Mode::Exact)?,
            (None, None, None) => {
                return Err(Failure::Input(
                    "one of --events, --joint or --alice/--bob is required".into(),
                ))
            }
        };
    let n = events.len();
    let index_of = |name: &str| {
        events
            .iter()
            .position(|e| e.name == name)
            .ok_or_else(|| Failure::Input(format!("unknown event {name:?}")))
    };
    let mut perms: Vec<Vec<usize>> = orders
        .iter()
        .map(|o| {
            o.split(',')
                .map(|s| index_of(s.trim()))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    if all_orders {
        perms.extend(permutations(n));
    }
    if perms.is_empty() {
        let forward: Vec<usize> = (0..n).collect();
        let backward: Vec<usize> = (0..n).rev().collect();
        perms = vec![forward, backward];
    }
    if perms.len() == 1 {
        perms.push(perms[0].clone());
    }

    let mut out = String::new();
    let mut agree = true;
    let reference = &perms[0];
    let mut shown = Vec::new();
    for other in &perms[1..] {
        let inv = viewer_invariance(&events, reference, other, &correlator)?;
        agree &= inv.agree;
        for (order, tree, kernel) in [
            (reference, &inv.first, &inv.first_filaments),
            (other, &inv.second, &inv.second_filaments),
        ] {
            if shown.contains(order) {
                continue;
            }
            shown.push(order.clone());
            out.push_str(&tree.render());
            out.push_str(&formats::write_kernel(kernel));
            out.push('\n');
        }
    }
    if agree {
        writeln!(out, "viewer orders agree ({} orders)", shown.len()).unwrap();
        Ok(out)
    } else {
        out.push_str("VIEWER ORDERS DISAGREE\n");
        Err(Failure::Violation(out))
    }
}

fn life(file: &str, horizon: usize, period: bool, emit_states: bool, budget: usize) -> CmdResult {
    let initial = LifeState::from_plaintext(&read_input(file)?)
        .map_err(|e| Failure::Input(format!("{file}: {e}")))?;
    let mut out = String::new();
    if period {
        match detect_period(&initial, horizon) {
            Some(p) => writeln!(
                out,
                "period={} translation=({},{})",
                p.period, p.translation.0, p.translation.1
            )
            .unwrap(),
            None => writeln!(out, "not periodic within h={horizon}").unwrap(),
        }
        if !emit_states {
            return Ok(out);
        }
    }
    let history = run_block(&initial, horizon, budget)?;
    if emit_states {
        for (h, state) in history.states().iter().enumerate() {
            writeln!(out, "#pattern v1\n!h={h}").unwrap();
            out.push_str(&state.to_plaintext());
        }
    } else {
        out.push_str(&formats::population_csv(&history));
    }
    Ok(out)
}
