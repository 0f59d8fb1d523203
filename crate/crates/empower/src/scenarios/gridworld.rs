//! Key-door gridworld: a wall with a locked door splits the map into two
//! regions. The robot (which can pick up the key and unlock the door) and
//! the human move simultaneously on the grid and block each other's cells.
//! The human's goals are the open cells; only a robot that fetches the key,
//! unlocks the door, and then steps out of the doorway gives the human
//! access to the far region's goals.
//!
//! State = (robot cell, human cell, key held?, door open?). Moves into
//! walls, the locked door cell, or the other agent's cell leave the mover in
//! place; the human moves first within a step, so it can never be overtaken
//! into a corridor cell the robot simultaneously wants.

use crate::game::{GameBuilder, StateId, StochasticGame};
use std::collections::HashMap;

pub type Cell = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct GridworldConfig {
    pub width: usize,
    pub height: usize,
    /// Grid row that is wall except for the door cell.
    pub wall_row: usize,
    pub door: Cell,
    pub key: Cell,
    pub robot_start: Cell,
    pub human_start: Cell,
    pub gamma_h: f64,
    pub gamma_r: f64,
    /// Learner rollouts redraw goals every this many steps.
    pub goal_resample_period: usize,
}

impl GridworldConfig {
    /// 5×5 map: 2-row regions above and below the wall, door in the middle.
    pub fn standard() -> Self {
        GridworldConfig {
            width: 5,
            height: 5,
            wall_row: 2,
            door: (2, 2),
            key: (0, 1),
            robot_start: (1, 0),
            human_start: (3, 0),
            gamma_h: 0.99,
            gamma_r: 0.99,
            goal_resample_period: 100,
        }
    }

    /// 3×3 map small enough for exact solving in tests.
    pub fn small() -> Self {
        GridworldConfig {
            width: 3,
            height: 3,
            wall_row: 1,
            door: (1, 1),
            key: (0, 0),
            robot_start: (1, 0),
            human_start: (2, 0),
            gamma_h: 0.95,
            gamma_r: 0.95,
            goal_resample_period: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GridworldMeta {
    pub config: GridworldConfig,
    /// Decoded (robot, human, key_held, door_open) per state id.
    pub decode: Vec<(Cell, Cell, bool, bool)>,
    pub encode: HashMap<(Cell, Cell, bool, bool), StateId>,
    /// Region id per open cell (door cell belongs to no region).
    pub region: HashMap<Cell, usize>,
}

const MOVES: [(&str, i64, i64); 4] =
    [("up", 0, -1), ("down", 0, 1), ("left", -1, 0), ("right", 1, 0)];

fn is_wall(cfg: &GridworldConfig, c: Cell) -> bool {
    c.1 == cfg.wall_row && c != cfg.door
}

fn open_cells(cfg: &GridworldConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    for y in 0..cfg.height {
        for x in 0..cfg.width {
            if !is_wall(cfg, (x, y)) {
                cells.push((x, y));
            }
        }
    }
    cells
}

fn neighbors(cfg: &GridworldConfig, c: Cell) -> Vec<Cell> {
    MOVES
        .iter()
        .filter_map(|&(_, dx, dy)| {
            let nx = c.0 as i64 + dx;
            let ny = c.1 as i64 + dy;
            if nx < 0 || ny < 0 || nx as usize >= cfg.width || ny as usize >= cfg.height {
                None
            } else {
                Some((nx as usize, ny as usize))
            }
        })
        .collect()
}

/// Connected components of `cells` under 4-adjacency.
fn components(cfg: &GridworldConfig, cells: &[Cell]) -> HashMap<Cell, usize> {
    let set: std::collections::HashSet<Cell> = cells.iter().copied().collect();
    let mut comp = HashMap::new();
    let mut next = 0;
    for &c in cells {
        if comp.contains_key(&c) {
            continue;
        }
        let mut stack = vec![c];
        comp.insert(c, next);
        while let Some(u) = stack.pop() {
            for v in neighbors(cfg, u) {
                if set.contains(&v) && !comp.contains_key(&v) {
                    comp.insert(v, next);
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    comp
}

fn validate_config(cfg: &GridworldConfig) -> Result<(), String> {
    if cfg.width < 3 || cfg.height < 3 {
        return Err("grid must be at least 3x3".into());
    }
    if cfg.wall_row == 0 || cfg.wall_row + 1 >= cfg.height {
        return Err("wall row must have open rows on both sides".into());
    }
    if cfg.door.1 != cfg.wall_row || cfg.door.0 >= cfg.width {
        return Err("door must sit on the wall row".into());
    }
    for (what, c) in [("key", cfg.key), ("robot start", cfg.robot_start), ("human start", cfg.human_start)] {
        if c.0 >= cfg.width || c.1 >= cfg.height || is_wall(cfg, c) || c == cfg.door {
            return Err(format!("{what} cell {c:?} is not an open non-door cell"));
        }
    }
    if cfg.robot_start == cfg.human_start {
        return Err("agents cannot share a start cell".into());
    }
    let open = open_cells(cfg);
    // Door separates at least two regions…
    let sans_door: Vec<Cell> = open.iter().copied().filter(|&c| c != cfg.door).collect();
    let comp = components(cfg, &sans_door);
    let n_regions = comp.values().copied().max().map_or(0, |m| m + 1);
    if n_regions < 2 {
        return Err("door does not separate the map into regions".into());
    }
    // …and with the door open everything is mutually reachable.
    let comp_open = components(cfg, &open);
    if comp_open.values().copied().max().map_or(0, |m| m + 1) != 1 {
        return Err("some open cells are unreachable even with the door open".into());
    }
    // Key, both starts, and the door itself must be robot-reachable before
    // unlocking (same closed region as the robot start).
    let r0 = comp[&cfg.robot_start];
    if comp[&cfg.key] != r0 {
        return Err("key is not in the robot's initial region".into());
    }
    if neighbors(cfg, cfg.door).iter().all(|c| comp.get(c) != Some(&r0)) {
        return Err("door is not adjacent to the robot's initial region".into());
    }
    Ok(())
}

pub fn build_gridworld(cfg: &GridworldConfig) -> Result<(StochasticGame, GridworldMeta), String> {
    validate_config(cfg)?;
    let open = open_cells(cfg);
    let sans_door: Vec<Cell> = open.iter().copied().filter(|&c| c != cfg.door).collect();
    let region = components(cfg, &sans_door);

    let passable = |c: Cell, door_open: bool| -> bool {
        !is_wall(cfg, c) && (c != cfg.door || door_open)
    };
    let name_of = |(r, h, k, d): (Cell, Cell, bool, bool)| {
        format!("r{}_{}_h{}_{}_k{}_d{}", r.0, r.1, h.0, h.1, k as u8, d as u8)
    };

    // Enumerate valid states.
    let mut decode = Vec::new();
    let mut encode = HashMap::new();
    for &r in &open {
        for &h in &open {
            if r == h {
                continue;
            }
            for k in [false, true] {
                for d in [false, true] {
                    if !passable(r, d) || !passable(h, d) {
                        continue;
                    }
                    let id = decode.len();
                    decode.push((r, h, k, d));
                    encode.insert((r, h, k, d), id);
                }
            }
        }
    }

    let mut b = GameBuilder::new("gridworld");
    let human = b.human("h", cfg.gamma_h, 0.0, f64::INFINITY);
    b.gamma_r(cfg.gamma_r);
    b.goal_resample_period(cfg.goal_resample_period);
    b.relax_mutual_unreachability();

    let start = (cfg.robot_start, cfg.human_start, false, false);
    for &st in &decode {
        let n = name_of(st);
        if st == start {
            b.initial_state(&n);
        } else {
            b.state(&n);
        }
        b.set_coord(&n, (st.1 .0 as i32, st.1 .1 as i32));
    }

    let robot_acts = ["up", "down", "left", "right", "pickup", "unlock", "stay"];
    let human_acts = ["up", "down", "left", "right", "stay"];
    let step_cell = |c: Cell, act: &str| -> Option<Cell> {
        MOVES.iter().find(|&&(m, _, _)| m == act).and_then(|&(_, dx, dy)| {
            let nx = c.0 as i64 + dx;
            let ny = c.1 as i64 + dy;
            if nx < 0 || ny < 0 || nx as usize >= cfg.width || ny as usize >= cfg.height {
                None
            } else {
                Some((nx as usize, ny as usize))
            }
        })
    };

    for &(r, h, k, d) in &decode {
        let sname = name_of((r, h, k, d));
        b.robot_acts(&sname, &robot_acts);
        b.human_acts(&sname, human, &human_acts);
        for ha in human_acts {
            // Human moves first; it cannot enter the robot's current cell.
            let h2 = match step_cell(h, ha) {
                Some(t) if passable(t, d) && t != r => t,
                _ => h,
            };
            for ra in robot_acts {
                let mut r2 = r;
                let mut k2 = k;
                let mut d2 = d;
                match ra {
                    "pickup" => {
                        if !k && r == cfg.key {
                            k2 = true;
                        }
                    }
                    "unlock" => {
                        if k && !d && neighbors(cfg, cfg.door).contains(&r) {
                            d2 = true;
                        }
                    }
                    "stay" => {}
                    _ => {
                        if let Some(t) = step_cell(r, ra) {
                            if passable(t, d2) && t != h2 {
                                r2 = t;
                            }
                        }
                    }
                }
                let target = name_of((r2, h2, k2, d2));
                b.transition(&sname, ra, &[ha], &[(&target, 1.0)]);
            }
        }
    }

    // Goals: the human standing on each open non-door cell.
    for &c in &sans_door {
        let members: Vec<String> = decode
            .iter()
            .filter(|&&(_, h, _, _)| h == c)
            .map(|&st| name_of(st))
            .collect();
        let member_refs: Vec<(&str, f64)> = members.iter().map(|m| (m.as_str(), 1.0)).collect();
        b.goal(human, &format!("at_{}_{}", c.0, c.1), &member_refs);
    }

    let game = b.build()?;
    Ok((game, GridworldMeta { config: cfg.clone(), decode, encode, region }))
}

/// Shaping potential for learning to reach `goal_cell`: Φ(s) = −(Manhattan
/// distance of the human from the goal), which is 0 exactly on the goal's
/// member states.
pub fn shaping_potential(meta: &GridworldMeta, goal_cell: Cell) -> Vec<f64> {
    meta.decode
        .iter()
        .map(|&(_, h, _, _)| {
            -((h.0 as i64 - goal_cell.0 as i64).abs() + (h.1 as i64 - goal_cell.1 as i64).abs())
                as f64
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridEvent {
    KeyPickup,
    Unlock,
    /// After unlocking, the robot steps clear of the doorway (neither on the
    /// door cell nor adjacent to it).
    MoveAside,
    /// The human enters a region different from its starting one.
    Cross,
}

/// First occurrence, in order, of each milestone along a state trajectory.
pub fn detect_events(meta: &GridworldMeta, states: &[StateId]) -> Vec<GridEvent> {
    let cfg = &meta.config;
    let start_region = meta.region[&cfg.human_start];
    let door_zone: Vec<Cell> = {
        let mut z = neighbors(cfg, cfg.door);
        z.push(cfg.door);
        z
    };
    let mut events = Vec::new();
    let mut unlocked = false;
    let mut prev_key = false;
    let mut prev_door = false;
    for &sid in states {
        let (r, h, k, d) = meta.decode[sid];
        if k && !prev_key && !events.contains(&GridEvent::KeyPickup) {
            events.push(GridEvent::KeyPickup);
        }
        if d && !prev_door && !events.contains(&GridEvent::Unlock) {
            events.push(GridEvent::Unlock);
            unlocked = true;
        }
        if unlocked && !door_zone.contains(&r) && !events.contains(&GridEvent::MoveAside) {
            events.push(GridEvent::MoveAside);
        }
        if meta.region.get(&h).is_some_and(|&reg| reg != start_region)
            && !events.contains(&GridEvent::Cross)
        {
            events.push(GridEvent::Cross);
        }
        prev_key = k;
        prev_door = d;
    }
    events
}
