//! Line-oriented text format for [`StochasticGame`].
//!
//! A spec is a sequence of `[section]` headers and `key = value` lines; `#`
//! starts a comment. Sections may appear in any order and repeat. Names are
//! whitespace-free tokens; floats use Rust literal syntax (`inf` allowed).
//!
//! ```text
//! [game]
//! name = commitment
//! gamma_r = 0.9
//! actions = choose_follow follow b1 b2 pass      # global action-id order
//!
//! [humans]
//! h = 1 0 inf                  # gamma, default ν, default β
//!
//! [states]
//! s0 = initial
//! t_a = terminal
//! s1 = coord 2 3
//!
//! [actions]
//! robot s0 = choose_follow
//! human h s_follow = b1 b2
//! robot * = pass               # wildcard: any state without its own line
//!
//! [goals]
//! h g_a = t_a:1
//!
//! [transitions]
//! s_follow follow b1 = t_a:1   # state, robot action, one column per human
//! s0 choose_follow * = s_follow:1   # * expands over that agent's actions
//!
//! [nu]                         # per-(state, goal) overrides; * wildcards
//! h s_follow g_a = 0.5
//! [beta]
//! h * g_a = 2
//! [pi0]
//! h s_follow g_a = b1:0.7 b2:0.3
//! [mu]
//! h1 s0 g_a h2 = x:0.9 y:0.1
//! [inject_x]
//! h s0 = 100
//! [commitments]
//! s_commit_a = s_free do_a
//! ```
//!
//! Serialization is canonical (a deterministic function of the game), and
//! `parse(serialize(g)) == g` exactly, including state and action ids.

use crate::game::{GameBuilder, StochasticGame};
use std::collections::{HashMap, HashSet};
use std::fmt;

#[derive(Debug, Clone)]
pub struct ParseError {
    /// 1-based source line (0 when the failure has no single line, e.g.
    /// cross-line consistency).
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

struct Entry {
    line: usize,
    left: Vec<String>,
    right: Vec<String>,
}

fn parse_f64(tok: &str, line: usize) -> Result<f64, ParseError> {
    tok.parse::<f64>().or_else(|_| fail(line, format!("expected a number, found `{tok}`")))
}

fn parse_usize(tok: &str, line: usize) -> Result<usize, ParseError> {
    tok.parse::<usize>().or_else(|_| fail(line, format!("expected an integer, found `{tok}`")))
}

fn parse_bool(tok: &str, line: usize) -> Result<bool, ParseError> {
    match tok {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => fail(line, format!("expected true/false, found `{tok}`")),
    }
}

/// `name:weight` pair.
fn parse_pair(tok: &str, line: usize) -> Result<(String, f64), ParseError> {
    let Some((name, w)) = tok.rsplit_once(':') else {
        return fail(line, format!("expected `name:value`, found `{tok}`"));
    };
    Ok((name.to_string(), parse_f64(w, line)?))
}

/// Parse a game from its text form. Never panics; malformed input yields a
/// [`ParseError`] carrying the offending line.
pub fn parse_game(text: &str) -> Result<StochasticGame, ParseError> {
    // Pass 1: split into sections.
    let mut sections: HashMap<String, Vec<Entry>> = HashMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return fail(line, "unterminated section header");
            };
            if !SECTIONS_ALL.contains(&name) {
                return fail(line, format!("unknown section `{name}`"));
            }
            current = Some(name.to_string());
            continue;
        }
        let Some(section) = &current else {
            return fail(line, "content before any [section] header");
        };
        let Some((l, r)) = body.split_once('=') else {
            return fail(line, "expected `key = value`");
        };
        sections.entry(section.clone()).or_default().push(Entry {
            line,
            left: l.split_whitespace().map(str::to_string).collect(),
            right: r.split_whitespace().map(str::to_string).collect(),
        });
    }
    let section = |name: &str| -> &[Entry] {
        sections.get(name).map_or(&[][..], |v| v.as_slice())
    };

    // [game]
    let mut name = "game".to_string();
    let mut b_meta: Vec<(usize, String, Vec<String>)> = Vec::new();
    for e in section("game") {
        if e.left.len() != 1 {
            return fail(e.line, "expected a single key");
        }
        b_meta.push((e.line, e.left[0].clone(), e.right.clone()));
        if e.left[0] == "name" {
            if e.right.len() != 1 {
                return fail(e.line, "expected `name = <token>`");
            }
            name = e.right[0].clone();
        }
    }
    let mut b = GameBuilder::new(&name);
    for (line, key, val) in &b_meta {
        let one = || -> Result<&str, ParseError> {
            if val.len() == 1 {
                Ok(val[0].as_str())
            } else {
                fail(*line, "expected a single value")
            }
        };
        match key.as_str() {
            "name" => {}
            "gamma_r" => {
                b.gamma_r(parse_f64(one()?, *line)?);
            }
            "goal_resample_period" => {
                b.goal_resample_period(parse_usize(one()?, *line)?);
            }
            "relax_mutual_unreachability" => {
                if parse_bool(one()?, *line)? {
                    b.relax_mutual_unreachability();
                }
            }
            "relax_goal_cover" => {
                if parse_bool(one()?, *line)? {
                    b.relax_goal_cover();
                }
            }
            "goal_recollection" => {
                if parse_bool(one()?, *line)? {
                    b.goal_recollection();
                }
            }
            "actions" => {
                for a in val {
                    b.declare_action(a);
                }
            }
            other => return fail(*line, format!("unknown [game] key `{other}`")),
        }
    }

    // [humans]: name = gamma [nu] [beta]
    let mut humans: Vec<String> = Vec::new();
    let mut human_id: HashMap<String, usize> = HashMap::new();
    for e in section("humans") {
        if e.left.len() != 1 {
            return fail(e.line, "expected `human_name = gamma [nu] [beta]`");
        }
        let hname = &e.left[0];
        if human_id.contains_key(hname) {
            return fail(e.line, format!("duplicate human `{hname}`"));
        }
        if e.right.is_empty() || e.right.len() > 3 {
            return fail(e.line, "expected `= gamma [nu] [beta]`");
        }
        let gamma = parse_f64(&e.right[0], e.line)?;
        let nu = if e.right.len() > 1 { parse_f64(&e.right[1], e.line)? } else { 0.0 };
        let beta = if e.right.len() > 2 { parse_f64(&e.right[2], e.line)? } else { f64::INFINITY };
        human_id.insert(hname.clone(), humans.len());
        humans.push(hname.clone());
        b.human(hname, gamma, nu, beta);
    }
    let lookup_human = |tok: &str, line: usize| -> Result<usize, ParseError> {
        human_id.get(tok).copied().ok_or(ParseError {
            line,
            message: format!("unknown human `{tok}`"),
        })
    };

    // [states]: name = [initial] [terminal] [coord x y]
    let mut states: Vec<String> = Vec::new();
    let mut state_set: HashSet<String> = HashSet::new();
    let mut terminal: HashSet<String> = HashSet::new();
    for e in section("states") {
        if e.left.len() != 1 {
            return fail(e.line, "expected `state_name = [flags]`");
        }
        let sname = &e.left[0];
        if !state_set.insert(sname.clone()) {
            return fail(e.line, format!("duplicate state `{sname}`"));
        }
        states.push(sname.clone());
        let mut it = e.right.iter();
        let mut is_terminal = false;
        let mut is_initial = false;
        let mut coord = None;
        while let Some(flag) = it.next() {
            match flag.as_str() {
                "initial" => is_initial = true,
                "terminal" => is_terminal = true,
                "coord" => {
                    let (Some(x), Some(y)) = (it.next(), it.next()) else {
                        return fail(e.line, "coord needs two integers");
                    };
                    let x = x.parse::<i32>().ok();
                    let y = y.parse::<i32>().ok();
                    let (Some(x), Some(y)) = (x, y) else {
                        return fail(e.line, "coord needs two integers");
                    };
                    coord = Some((x, y));
                }
                other => return fail(e.line, format!("unknown state flag `{other}`")),
            }
        }
        if is_terminal {
            b.terminal_state(sname);
            terminal.insert(sname.clone());
        } else {
            b.state(sname);
        }
        if is_initial {
            b.mark_initial(sname);
        }
        if let Some(c) = coord {
            b.set_coord(sname, c);
        }
    }
    if states.is_empty() {
        return fail(0, "no states declared");
    }
    let check_state = |tok: &str, line: usize| -> Result<(), ParseError> {
        if state_set.contains(tok) {
            Ok(())
        } else {
            fail(line, format!("unknown state `{tok}`"))
        }
    };

    // [actions]: robot <state|*> = acts… / human <h> <state|*> = acts…
    let mut robot_sets: HashMap<String, Vec<String>> = HashMap::new();
    let mut robot_wild: Option<Vec<String>> = None;
    let mut human_sets: HashMap<(usize, String), Vec<String>> = HashMap::new();
    let mut human_wild: HashMap<usize, Vec<String>> = HashMap::new();
    for e in section("actions") {
        match e.left.first().map(String::as_str) {
            Some("robot") if e.left.len() == 2 => {
                if e.right.is_empty() {
                    return fail(e.line, "empty action set");
                }
                if e.left[1] == "*" {
                    robot_wild = Some(e.right.clone());
                } else {
                    check_state(&e.left[1], e.line)?;
                    robot_sets.insert(e.left[1].clone(), e.right.clone());
                }
            }
            Some("human") if e.left.len() == 3 => {
                if e.right.is_empty() {
                    return fail(e.line, "empty action set");
                }
                let h = lookup_human(&e.left[1], e.line)?;
                if e.left[2] == "*" {
                    human_wild.insert(h, e.right.clone());
                } else {
                    check_state(&e.left[2], e.line)?;
                    human_sets.insert((h, e.left[2].clone()), e.right.clone());
                }
            }
            _ => return fail(e.line, "expected `robot <state> = …` or `human <h> <state> = …`"),
        }
    }
    // Materialize per-state sets (explicit beats wildcard; wildcards skip
    // terminals, whose action is always the implicit pass self-loop).
    let mut robot_of: HashMap<String, Vec<String>> = HashMap::new();
    let mut human_of: HashMap<(usize, String), Vec<String>> = HashMap::new();
    for s in &states {
        let row = robot_sets.get(s).cloned().or_else(|| {
            if terminal.contains(s) {
                None
            } else {
                robot_wild.clone()
            }
        });
        if let Some(row) = row {
            let refs: Vec<&str> = row.iter().map(String::as_str).collect();
            b.robot_acts(s, &refs);
            robot_of.insert(s.clone(), row);
        } else {
            robot_of.insert(s.clone(), vec!["pass".to_string()]);
        }
        for h in 0..humans.len() {
            let row = human_sets.get(&(h, s.clone())).cloned().or_else(|| {
                if terminal.contains(s) {
                    None
                } else {
                    human_wild.get(&h).cloned()
                }
            });
            if let Some(row) = row {
                let refs: Vec<&str> = row.iter().map(String::as_str).collect();
                b.human_acts(s, h, &refs);
                human_of.insert((h, s.clone()), row);
            } else {
                human_of.insert((h, s.clone()), vec!["pass".to_string()]);
            }
        }
        // Guard against pathological joint-action blowup before the builder
        // allocates kernel rows.
        let mut joint = robot_of[s].len();
        for h in 0..humans.len() {
            joint = joint.saturating_mul(human_of[&(h, s.clone())].len());
            if joint > 1_000_000 {
                return fail(0, format!("state `{s}` has over 10^6 joint actions"));
            }
        }
    }

    // [goals]: h goal_name = member:w …
    let mut goal_names: Vec<Vec<String>> = vec![Vec::new(); humans.len()];
    for e in section("goals") {
        if e.left.len() != 2 {
            return fail(e.line, "expected `human goal_name = member:weight …`");
        }
        let h = lookup_human(&e.left[0], e.line)?;
        let gname = &e.left[1];
        let mut members = Vec::with_capacity(e.right.len());
        for tok in &e.right {
            let (m, w) = parse_pair(tok, e.line)?;
            check_state(&m, e.line)?;
            members.push((m, w));
        }
        let refs: Vec<(&str, f64)> = members.iter().map(|(m, w)| (m.as_str(), *w)).collect();
        b.goal(h, gname, &refs);
        goal_names[h].push(gname.clone());
    }
    let lookup_goal = |h: usize, tok: &str, line: usize| -> Result<usize, ParseError> {
        if let Some(g) = goal_names[h].iter().position(|n| n == tok) {
            return Ok(g);
        }
        if let Ok(g) = tok.parse::<usize>() {
            if g < goal_names[h].len() {
                return Ok(g);
            }
        }
        fail(line, format!("unknown goal `{tok}` for human `{}`", humans[h]))
    };

    // [nu] / [beta]: h <state|*> <goal|*> = value. Wildcard lines apply
    // first (least specific first), explicit lines last.
    for (sec, which) in [("nu", 0), ("beta", 1)] {
        let mut lines: Vec<(usize, usize, String, String, f64)> = Vec::new(); // (spec, h, s, g, v)
        for e in section(sec) {
            if e.left.len() != 3 || e.right.len() != 1 {
                return fail(e.line, format!("expected `human state goal = value` in [{sec}]"));
            }
            let h = lookup_human(&e.left[0], e.line)?;
            if e.left[1] != "*" {
                check_state(&e.left[1], e.line)?;
            }
            if e.left[2] != "*" {
                lookup_goal(h, &e.left[2], e.line)?;
            }
            let v = parse_f64(&e.right[0], e.line)?;
            let spec = (e.left[1] != "*") as usize * 2 + (e.left[2] != "*") as usize;
            lines.push((spec, h, e.left[1].clone(), e.left[2].clone(), v));
        }
        lines.sort_by_key(|l| l.0);
        for (_, h, stok, gtok, v) in lines {
            let ss: Vec<&String> =
                if stok == "*" { states.iter().collect() } else { states.iter().filter(|s| **s == stok).collect() };
            let gs: Vec<usize> = if gtok == "*" {
                (0..goal_names[h].len()).collect()
            } else {
                vec![lookup_goal(h, &gtok, 0)?]
            };
            for s in &ss {
                for &g in &gs {
                    if which == 0 {
                        b.set_nu(h, s, g, v);
                    } else {
                        b.set_beta(h, s, g, v);
                    }
                }
            }
        }
    }

    // [pi0]: h state goal = act:p …
    for e in section("pi0") {
        if e.left.len() != 3 {
            return fail(e.line, "expected `human state goal = action:prob …`");
        }
        let h = lookup_human(&e.left[0], e.line)?;
        check_state(&e.left[1], e.line)?;
        let g = lookup_goal(h, &e.left[2], e.line)?;
        let mut row = Vec::with_capacity(e.right.len());
        for tok in &e.right {
            row.push(parse_pair(tok, e.line)?);
        }
        let refs: Vec<(&str, f64)> = row.iter().map(|(a, p)| (a.as_str(), *p)).collect();
        b.set_pi0(h, &e.left[1], g, &refs);
    }

    // [mu]: h state goal other = act:p …
    for e in section("mu") {
        if e.left.len() != 4 {
            return fail(e.line, "expected `human state goal other_human = action:prob …`");
        }
        let h = lookup_human(&e.left[0], e.line)?;
        check_state(&e.left[1], e.line)?;
        let g = lookup_goal(h, &e.left[2], e.line)?;
        let other = lookup_human(&e.left[3], e.line)?;
        let mut row = Vec::with_capacity(e.right.len());
        for tok in &e.right {
            row.push(parse_pair(tok, e.line)?);
        }
        let refs: Vec<(&str, f64)> = row.iter().map(|(a, p)| (a.as_str(), *p)).collect();
        b.set_mu(h, &e.left[1], g, other, &refs);
    }

    // [transitions]: state ract ah… = target:p …; `*` expands over the
    // agent's declared actions at the state.
    for e in section("transitions") {
        if e.left.len() != humans.len() + 2 {
            return fail(
                e.line,
                format!("expected `state robot_action {} human column(s) = target:prob …`", humans.len()),
            );
        }
        let sname = &e.left[0];
        check_state(sname, e.line)?;
        let mut slots: Vec<Vec<String>> = Vec::with_capacity(humans.len() + 1);
        let robot_acts = &robot_of[sname];
        slots.push(if e.left[1] == "*" { robot_acts.clone() } else { vec![e.left[1].clone()] });
        for h in 0..humans.len() {
            let tok = &e.left[2 + h];
            let set = &human_of[&(h, sname.clone())];
            slots.push(if tok == "*" { set.clone() } else { vec![tok.clone()] });
        }
        let combos: usize = slots.iter().map(Vec::len).product();
        if combos > 100_000 {
            return fail(e.line, "wildcard expands to over 10^5 profiles");
        }
        let mut rows = Vec::with_capacity(e.right.len());
        for tok in &e.right {
            let (t, p) = parse_pair(tok, e.line)?;
            check_state(&t, e.line)?;
            rows.push((t, p));
        }
        let row_refs: Vec<(&str, f64)> = rows.iter().map(|(t, p)| (t.as_str(), *p)).collect();
        let mut idx = vec![0usize; slots.len()];
        loop {
            let ract = &slots[0][idx[0]];
            let hacts: Vec<&str> =
                (0..humans.len()).map(|h| slots[1 + h][idx[1 + h]].as_str()).collect();
            b.transition(sname, ract, &hacts, &row_refs);
            let mut k = slots.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < slots[k].len() {
                    break;
                }
                idx[k] = 0;
                if k == 0 {
                    break;
                }
            }
            if idx.iter().all(|&v| v == 0) {
                break;
            }
        }
    }

    // [inject_x]: h <state|*> = x (wildcard first, explicit overrides).
    let mut injections: Vec<(usize, usize, String, f64)> = Vec::new();
    for e in section("inject_x") {
        if e.left.len() != 2 || e.right.len() != 1 {
            return fail(e.line, "expected `human state = x`");
        }
        let h = lookup_human(&e.left[0], e.line)?;
        if e.left[1] != "*" {
            check_state(&e.left[1], e.line)?;
        }
        let x = parse_f64(&e.right[0], e.line)?;
        let spec = (e.left[1] != "*") as usize;
        injections.push((spec, h, e.left[1].clone(), x));
    }
    injections.sort_by_key(|i| i.0);
    for (_, h, stok, x) in injections {
        if stok == "*" {
            for s in &states {
                b.inject_x(h, s, x);
            }
        } else {
            b.inject_x(h, &stok, x);
        }
    }

    // [commitments]: state = base_state action …
    for e in section("commitments") {
        if e.left.len() != 1 || e.right.is_empty() {
            return fail(e.line, "expected `state = base_state action …`");
        }
        check_state(&e.left[0], e.line)?;
        check_state(&e.right[0], e.line)?;
        let acts: Vec<&str> = e.right[1..].iter().map(String::as_str).collect();
        b.commitment(&e.left[0], &e.right[0], &acts);
    }

    b.build().map_err(|message| ParseError { line: 0, message })
}

const SECTIONS_ALL: [&str; 12] = [
    "game",
    "humans",
    "states",
    "actions",
    "goals",
    "nu",
    "beta",
    "pi0",
    "mu",
    "transitions",
    "inject_x",
    "commitments",
];

/// Most frequent value of a slice (ties to the smaller), or `default` when
/// empty.
fn mode(values: &[f64], default: f64) -> f64 {
    if values.is_empty() {
        return default;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (mut best, mut best_n) = (sorted[0], 0usize);
    let (mut cur, mut cur_n) = (sorted[0], 0usize);
    for &v in &sorted {
        if v == cur {
            cur_n += 1;
        } else {
            cur = v;
            cur_n = 1;
        }
        if cur_n > best_n {
            best = cur;
            best_n = cur_n;
        }
    }
    best
}

/// Canonical text form: a deterministic serialization whose re-parse
/// reproduces the game exactly (state ids, action ids, and all tables).
pub fn serialize_game(game: &StochasticGame) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let sname = |s: usize| game.states[s].name.as_str();
    let aname = |a: usize| game.action_names[a].as_str();

    writeln!(out, "[game]").unwrap();
    writeln!(out, "name = {}", game.name).unwrap();
    writeln!(out, "gamma_r = {}", game.gamma_r).unwrap();
    writeln!(out, "goal_resample_period = {}", game.goal_resample_period).unwrap();
    writeln!(out, "relax_mutual_unreachability = {}", game.relax_mutual_unreachability).unwrap();
    writeln!(out, "relax_goal_cover = {}", game.relax_goal_cover).unwrap();
    writeln!(out, "goal_recollection = {}", game.goal_recollection).unwrap();
    writeln!(out, "actions = {}", game.action_names.join(" ")).unwrap();

    writeln!(out, "\n[humans]").unwrap();
    let nu_base: Vec<f64> =
        game.humans.iter().map(|h| mode(&h.nu, 0.0)).collect();
    let beta_base: Vec<f64> =
        game.humans.iter().map(|h| mode(&h.beta, f64::INFINITY)).collect();
    for (h, human) in game.humans.iter().enumerate() {
        writeln!(out, "{} = {} {} {}", human.name, human.gamma, nu_base[h], beta_base[h]).unwrap();
    }

    writeln!(out, "\n[states]").unwrap();
    for st in &game.states {
        let mut flags = Vec::new();
        if st.initial {
            flags.push("initial".to_string());
        }
        if st.terminal {
            flags.push("terminal".to_string());
        }
        if let Some((x, y)) = st.coord {
            flags.push(format!("coord {x} {y}"));
        }
        writeln!(out, "{} = {}", st.name, flags.join(" ")).unwrap();
    }

    writeln!(out, "\n[actions]").unwrap();
    let pass_only = |ids: &[usize]| ids.len() == 1 && aname(ids[0]) == "pass";
    for s in 0..game.n_states() {
        if game.states[s].terminal {
            continue;
        }
        if !pass_only(&game.robot_actions[s]) {
            let list: Vec<&str> = game.robot_actions[s].iter().map(|&a| aname(a)).collect();
            writeln!(out, "robot {} = {}", sname(s), list.join(" ")).unwrap();
        }
        for (h, human) in game.humans.iter().enumerate() {
            if !pass_only(&game.human_actions[s][h]) {
                let list: Vec<&str> =
                    game.human_actions[s][h].iter().map(|&a| aname(a)).collect();
                writeln!(out, "human {} {} = {}", human.name, sname(s), list.join(" ")).unwrap();
            }
        }
    }

    writeln!(out, "\n[goals]").unwrap();
    for human in &game.humans {
        for goal in &human.goals {
            let members: Vec<String> =
                goal.members.iter().map(|&(m, w)| format!("{}:{}", sname(m), w)).collect();
            writeln!(out, "{} {} = {}", human.name, goal.name, members.join(" ")).unwrap();
        }
    }

    // Goal token: name if unique among the human's goals, else the index.
    let goal_tok = |h: usize, g: usize| -> String {
        let gname = &game.humans[h].goals[g].name;
        if game.humans[h].goals.iter().filter(|other| &other.name == gname).count() == 1 {
            gname.clone()
        } else {
            g.to_string()
        }
    };

    for (section, pick) in
        [("nu", 0usize), ("beta", 1)]
    {
        let mut lines = Vec::new();
        for (h, human) in game.humans.iter().enumerate() {
            let ng = human.goals.len();
            let (table, base) = if pick == 0 {
                (&human.nu, nu_base[h])
            } else {
                (&human.beta, beta_base[h])
            };
            for s in 0..game.n_states() {
                for g in 0..ng {
                    let v = table[s * ng + g];
                    if v != base && !(v.is_nan() && base.is_nan()) {
                        lines.push(format!(
                            "{} {} {} = {}",
                            human.name,
                            sname(s),
                            goal_tok(h, g),
                            v
                        ));
                    }
                }
            }
        }
        if !lines.is_empty() {
            writeln!(out, "\n[{section}]").unwrap();
            for l in lines {
                writeln!(out, "{l}").unwrap();
            }
        }
    }

    let mut pi0_lines = Vec::new();
    for (h, human) in game.humans.iter().enumerate() {
        let ng = human.goals.len();
        for s in 0..game.n_states() {
            for g in 0..ng {
                if let Some(row) = human.pi0.get(s, g) {
                    let pairs: Vec<String> = row
                        .iter()
                        .enumerate()
                        .map(|(a, p)| format!("{}:{}", aname(game.human_actions[s][h][a]), p))
                        .collect();
                    pi0_lines.push(format!(
                        "{} {} {} = {}",
                        human.name,
                        sname(s),
                        goal_tok(h, g),
                        pairs.join(" ")
                    ));
                }
            }
        }
    }
    if !pi0_lines.is_empty() {
        writeln!(out, "\n[pi0]").unwrap();
        for l in pi0_lines {
            writeln!(out, "{l}").unwrap();
        }
    }

    let mut mu_lines = Vec::new();
    for (h, human) in game.humans.iter().enumerate() {
        let ng = human.goals.len();
        let others: Vec<usize> = (0..game.n_humans()).filter(|&j| j != h).collect();
        for s in 0..game.n_states() {
            for g in 0..ng {
                if let Some(rows) = &human.mu[s * ng + g] {
                    for (k, &other) in others.iter().enumerate() {
                        let pairs: Vec<String> = rows[k]
                            .iter()
                            .enumerate()
                            .map(|(a, p)| {
                                format!("{}:{}", aname(game.human_actions[s][other][a]), p)
                            })
                            .collect();
                        mu_lines.push(format!(
                            "{} {} {} {} = {}",
                            human.name,
                            sname(s),
                            goal_tok(h, g),
                            game.humans[other].name,
                            pairs.join(" ")
                        ));
                    }
                }
            }
        }
    }
    if !mu_lines.is_empty() {
        writeln!(out, "\n[mu]").unwrap();
        for l in mu_lines {
            writeln!(out, "{l}").unwrap();
        }
    }

    writeln!(out, "\n[transitions]").unwrap();
    let row_text = |row: &[(usize, f64)]| -> String {
        row.iter().map(|&(t, p)| format!("{}:{}", sname(t), p)).collect::<Vec<_>>().join(" ")
    };
    for s in 0..game.n_states() {
        if game.states[s].terminal {
            continue;
        }
        let human_counts: Vec<usize> =
            (0..game.n_humans()).map(|h| game.human_actions[s][h].len()).collect();
        let profiles: usize = human_counts.iter().product();
        for (ar, &ra) in game.robot_actions[s].iter().enumerate() {
            // If every human profile shares one row, compress with stars.
            let base = game.joint_index(s, ar, &vec![0; game.n_humans()]);
            let all_same = (0..profiles).all(|f| {
                let mut idx = Vec::with_capacity(human_counts.len());
                let mut rest = f;
                for &k in human_counts.iter().rev() {
                    idx.push(rest % k);
                    rest /= k;
                }
                idx.reverse();
                game.kernel[s][game.joint_index(s, ar, &idx)] == game.kernel[s][base]
            });
            if all_same {
                let stars = vec!["*"; game.n_humans()].join(" ");
                let sep = if game.n_humans() == 0 { "" } else { " " };
                writeln!(
                    out,
                    "{} {}{sep}{stars} = {}",
                    sname(s),
                    aname(ra),
                    row_text(&game.kernel[s][base])
                )
                .unwrap();
            } else {
                for f in 0..profiles {
                    let mut idx = Vec::with_capacity(human_counts.len());
                    let mut rest = f;
                    for &k in human_counts.iter().rev() {
                        idx.push(rest % k);
                        rest /= k;
                    }
                    idx.reverse();
                    let cols: Vec<&str> = idx
                        .iter()
                        .enumerate()
                        .map(|(h, &a)| aname(game.human_actions[s][h][a]))
                        .collect();
                    writeln!(
                        out,
                        "{} {} {} = {}",
                        sname(s),
                        aname(ra),
                        cols.join(" "),
                        row_text(&game.kernel[s][game.joint_index(s, ar, &idx)])
                    )
                    .unwrap();
                }
            }
        }
    }

    if let Some(table) = &game.injected_x {
        writeln!(out, "\n[inject_x]").unwrap();
        for (h, row) in table.iter().enumerate() {
            for (s, &x) in row.iter().enumerate() {
                writeln!(out, "{} {} = {}", game.humans[h].name, sname(s), x).unwrap();
            }
        }
    }

    if !game.commitments.is_empty() {
        writeln!(out, "\n[commitments]").unwrap();
        for c in &game.commitments {
            let acts: Vec<&str> = c.committed_set.iter().map(|&a| aname(a)).collect();
            writeln!(out, "{} = {} {}", sname(c.state), sname(c.base_state), acts.join(" "))
                .unwrap();
        }
    }

    out
}
