//! Text-format round trips, diagnostics, and parser robustness.

use empower::gamespec::{parse_game, serialize_game};
use empower::scenarios::all_default_scenarios;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// serialize → parse is the identity on every bundled game, including state
/// ids, action ids, and all numeric tables (floats are emitted with their
/// shortest exact representation).
#[test]
fn round_trip_is_exact_on_all_default_scenarios() {
    for game in all_default_scenarios() {
        let text = serialize_game(&game);
        let back = parse_game(&text)
            .unwrap_or_else(|e| panic!("{}: serialized form failed to parse: {e}", game.name));
        assert_eq!(back, game, "{}: parse(serialize(g)) != g", game.name);
        // And the serialization itself is a fixed point.
        assert_eq!(serialize_game(&back), text, "{}: serializer not canonical", game.name);
    }
}

#[test]
fn errors_carry_the_offending_line() {
    let text = "\
[game]
name = tiny
gamma_r = 0.9

[states]
a = initial
b = terminal

[actions]
robot a = go

[transitions]
a go = b:not_a_number
";
    let err = parse_game(text).unwrap_err();
    assert_eq!(err.line, 13);
    assert!(err.message.contains("not_a_number"), "message: {}", err.message);

    let err = parse_game("[nonsense]\n").unwrap_err();
    assert_eq!(err.line, 1);

    let err = parse_game("[game]\nname = x\n[states]\ns = initial\n[goals]\nq g = s:1\n")
        .unwrap_err();
    assert_eq!(err.line, 6);
    assert!(err.message.contains("unknown human"), "message: {}", err.message);
}

/// `*` in [actions] covers states without an explicit line; `*` in
/// [transitions] expands over the agent's action set; `*` in [nu]/[beta]
/// yields to more specific lines.
#[test]
fn wildcards_expand_and_defer_to_explicit_lines() {
    let text = "\
[game]
name = wild
gamma_r = 0.5

[humans]
h = 0.9 0.25 2

[states]
a = initial
b =
t = terminal

[actions]
robot * = go stay
human h * = l r
human h b = l

[goals]
h reach = t:1

[nu]
h * * = 0.5
h b reach = 0.75

[transitions]
a * * = b:1
b go l = t:1
b stay l = b:1
";
    let game = parse_game(text).unwrap();
    let sid = |n: &str| game.states.iter().position(|s| s.name == n).unwrap();
    let (a, b) = (sid("a"), sid("b"));
    assert_eq!(game.robot_actions[a].len(), 2);
    assert_eq!(game.human_actions[a][0].len(), 2);
    assert_eq!(game.human_actions[b][0].len(), 1, "explicit line beats wildcard");
    assert_eq!(game.humans[0].nu_at(a, 0), 0.5);
    assert_eq!(game.humans[0].nu_at(b, 0), 0.75, "specific [nu] line wins");
    // `a * *` covered all 2×2 joint actions of state a.
    assert_eq!(game.kernel[a].len(), 4);
    for row in &game.kernel[a] {
        assert_eq!(row, &vec![(b, 1.0)]);
    }
}

/// Random mutations of valid specs must produce either a parsed game or a
/// ParseError — never a panic — and must do so quickly.
#[test]
fn fuzzed_mutations_never_panic() {
    let seeds: Vec<String> = all_default_scenarios()
        .iter()
        .filter(|g| g.n_states() < 40)
        .map(serialize_game)
        .collect();
    assert!(seeds.len() >= 4);
    let mut rng = ChaCha8Rng::seed_from_u64(0xFEED);
    let charset: &[u8] = b"abght0123456789.*:=[]# -\ninf";
    let mut parsed = 0usize;
    let mut rejected = 0usize;
    for round in 0..20_000usize {
        let base = &seeds[round % seeds.len()];
        let mut bytes = base.clone().into_bytes();
        // Between 1 and 60 point mutations: overwrite, insert, or delete.
        for _ in 0..rng.gen_range(1..=60) {
            if bytes.is_empty() {
                break;
            }
            let i = rng.gen_range(0..bytes.len());
            match rng.gen_range(0..3) {
                0 => bytes[i] = charset[rng.gen_range(0..charset.len())],
                1 => bytes.insert(i, charset[rng.gen_range(0..charset.len())]),
                _ => {
                    bytes.remove(i);
                }
            }
        }
        let text = String::from_utf8_lossy(&bytes);
        match parse_game(&text) {
            Ok(_) => parsed += 1,
            Err(_) => rejected += 1,
        }
    }
    // Sanity: the fuzzer exercises both outcomes.
    assert!(parsed > 0, "no mutated spec parsed — mutations too destructive");
    assert!(rejected > 0);
}
