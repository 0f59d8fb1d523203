//! Finite, fully observed stochastic game model.
//!
//! One robot and a finite set of humans act simultaneously; the kernel maps
//! (state, joint action profile) to a sparse distribution over successors.
//! Each human carries a family of goals (weighted state sets), a discount
//! factor, and behavior parameters (habit weight ν, habitual policy π⁰,
//! rationality β, and beliefs μ about the other humans' actions).
//!
//! All entities are dense integer ids with a symbol table for names; tables
//! are indexed arrays because the tabular solvers dominate runtime.

use std::collections::HashMap;

pub type StateId = usize;
pub type ActionId = usize;
pub type HumanId = usize;
pub type GoalId = usize;

/// A goal is a set of member states. Entering a member state fulfills the
/// goal once (members are then treated as absorbing for that goal). Each
/// member carries an attainment weight in (0, 1]; plain indicator goals use
/// weight 1. Fractional weights stand in for the outcome of an unmodelled
/// sub-game that fulfills the goal with the stated probability, and are used
/// by scenario builders that need states with prescribed power levels.
#[derive(Debug, Clone, PartialEq)]
pub struct Goal {
    pub name: String,
    /// Sorted by state id.
    pub members: Vec<(StateId, f64)>,
}

impl Goal {
    pub fn weight(&self, s: StateId) -> f64 {
        match self.members.binary_search_by_key(&s, |m| m.0) {
            Ok(i) => self.members[i].1,
            Err(_) => 0.0,
        }
    }

    pub fn contains(&self, s: StateId) -> bool {
        self.members.binary_search_by_key(&s, |m| m.0).is_ok()
    }
}

/// Per-(state, goal) distribution table with a uniform default.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTable {
    /// Indexed by state * n_goals + goal; `None` means uniform over the
    /// state's action set.
    pub rows: Vec<Option<Vec<f64>>>,
    pub n_goals: usize,
}

impl PolicyTable {
    pub fn uniform(n_states: usize, n_goals: usize) -> Self {
        PolicyTable { rows: vec![None; n_states * n_goals], n_goals }
    }

    pub fn get(&self, s: StateId, g: GoalId) -> Option<&Vec<f64>> {
        self.rows[s * self.n_goals + g].as_ref()
    }

    pub fn set(&mut self, s: StateId, g: GoalId, row: Vec<f64>) {
        self.rows[s * self.n_goals + g] = Some(row);
    }
}

/// One human agent: goals, discounting, and behavior-prior parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Human {
    pub name: String,
    /// Discount γ_h ∈ [0, 1]; 1 is permitted only on acyclic games.
    pub gamma: f64,
    pub goals: Vec<Goal>,
    /// Habit weight ν ∈ [0,1] per (state, goal).
    pub nu: Vec<f64>,
    /// Rationality β ∈ [0, ∞] per (state, goal); ∞ = exact argmax.
    pub beta: Vec<f64>,
    /// Habitual ("system-1") policy per (state, goal).
    pub pi0: PolicyTable,
    /// Belief about each other human's action distribution, per (state,
    /// goal); `mu[s*G+g]` is `None` (uniform) or one row per *other* human
    /// in id order (self excluded).
    pub mu: Vec<Option<Vec<Vec<f64>>>>,
}

impl Human {
    pub fn nu_at(&self, s: StateId, g: GoalId) -> f64 {
        self.nu[s * self.goals.len() + g]
    }
    pub fn beta_at(&self, s: StateId, g: GoalId) -> f64 {
        self.beta[s * self.goals.len() + g]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateInfo {
    pub name: String,
    pub terminal: bool,
    pub initial: bool,
    /// Grid coordinate for games with spatial structure (shaping potentials).
    pub coord: Option<(i32, i32)>,
}

/// A commitment is a restriction of the robot's action set, encoded in the
/// state: distinct commitment histories are distinct states. The annotation
/// records which base state was restricted and to what subset.
#[derive(Debug, Clone, PartialEq)]
pub struct CommitmentAnnotation {
    pub state: StateId,
    pub base_state: StateId,
    /// Subset of the base state's robot actions still allowed here.
    pub committed_set: Vec<ActionId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticGame {
    pub name: String,
    pub states: Vec<StateInfo>,
    /// Global action name table; per-state sets index into it.
    pub action_names: Vec<String>,
    /// Robot's available actions per state (nonempty).
    pub robot_actions: Vec<Vec<ActionId>>,
    /// Humans' available actions per state: `human_actions[s][h]`.
    pub human_actions: Vec<Vec<Vec<ActionId>>>,
    pub humans: Vec<Human>,
    /// `kernel[s][j]` is the sparse successor distribution for joint action
    /// index `j` (see `joint_index`).
    pub kernel: Vec<Vec<Vec<(StateId, f64)>>>,
    pub gamma_r: f64,
    /// Steps between goal redraws during learner rollouts (N_g ≥ 1).
    pub goal_resample_period: usize,
    pub commitments: Vec<CommitmentAnnotation>,
    /// Suppress the mutual-unreachability check: goal entry is absorbed per
    /// trajectory, so repeat visits never double-count even when members can
    /// reach one another (e.g. positional goals in the gridworld).
    pub relax_mutual_unreachability: bool,
    /// Suppress the goal-cover check for analyses that intentionally leave
    /// some trajectories goal-less.
    pub relax_goal_cover: bool,
    /// Raw recurrent-reward semantics: goal rewards are re-collected on every
    /// entry instead of once per trajectory. Only used by the two-state
    /// bifurcation example; values then live in [0, 1/(1−γ)].
    pub goal_recollection: bool,
    /// Prescribed per-state power levels `injected_x[h][s]`, overriding the
    /// goal-derived X_h(s). Scenario games whose analysis fixes X(s) as a
    /// primitive (summaries of unmodelled sub-games) use this.
    pub injected_x: Option<Vec<Vec<f64>>>,
}

impl StochasticGame {
    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_humans(&self) -> usize {
        self.humans.len()
    }

    pub fn initial_states(&self) -> Vec<StateId> {
        (0..self.states.len()).filter(|&s| self.states[s].initial).collect()
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|st| st.name == name)
    }

    /// Number of joint actions at `s`: |A_r(s)| · Π_h |A_h(s)|.
    pub fn joint_count(&self, s: StateId) -> usize {
        let mut n = self.robot_actions[s].len();
        for row in &self.human_actions[s] {
            n *= row.len();
        }
        n
    }

    /// Mixed-radix joint index: robot slot is the most significant digit,
    /// then humans in id order. All indices are positions within the
    /// per-state action lists, not global action ids.
    pub fn joint_index(&self, s: StateId, ar: usize, ah: &[usize]) -> usize {
        let mut j = ar;
        for (h, &a) in ah.iter().enumerate() {
            j = j * self.human_actions[s][h].len() + a;
        }
        j
    }

    pub fn successors(&self, s: StateId, ar: usize, ah: &[usize]) -> &[(StateId, f64)] {
        &self.kernel[s][self.joint_index(s, ar, ah)]
    }

    /// U_h(s', g): the goal-fulfillment weight collected on entering s'.
    pub fn goal_indicator(&self, h: HumanId, g: GoalId, s: StateId) -> f64 {
        self.humans[h].goals[g].weight(s)
    }

    pub fn is_terminal(&self, s: StateId) -> bool {
        self.states[s].terminal
    }

    /// Iterate over all human joint-action index combinations at `s`, giving
    /// the product probability under per-human distributions `dists[h]`.
    pub fn for_each_human_profile<F: FnMut(&[usize], f64)>(
        &self,
        s: StateId,
        dists: &[&[f64]],
        mut f: F,
    ) {
        let nh = self.humans.len();
        let mut idx = vec![0usize; nh];
        loop {
            let mut p = 1.0;
            for h in 0..nh {
                p *= dists[h][idx[h]];
            }
            if p > 0.0 {
                f(&idx, p);
            }
            // mixed-radix increment
            let mut h = nh;
            loop {
                if h == 0 {
                    return;
                }
                h -= 1;
                idx[h] += 1;
                if idx[h] < self.human_actions[s][h].len() {
                    break;
                }
                idx[h] = 0;
                if h == 0 {
                    return;
                }
            }
        }
    }

    /// Support edges s → s' over all joint actions, excluding self-loops on
    /// terminal states (the terminal convention's bookkeeping loop).
    pub fn support_edges(&self) -> Vec<(StateId, StateId)> {
        let mut edges = Vec::new();
        for s in 0..self.n_states() {
            for row in &self.kernel[s] {
                for &(t, p) in row {
                    if p > 0.0 && !(t == s && self.states[s].terminal) {
                        edges.push((s, t));
                    }
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// Topological order of states if the support graph (terminal self-loops
    /// excluded) is acyclic, else `None`.
    pub fn is_acyclic(&self) -> Option<Vec<StateId>> {
        let n = self.n_states();
        let edges = self.support_edges();
        let mut out: Vec<Vec<StateId>> = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for &(a, b) in &edges {
            if a == b {
                return None; // non-terminal self-loop
            }
            out[a].push(b);
            indeg[b] += 1;
        }
        let mut queue: Vec<StateId> = (0..n).filter(|&s| indeg[s] == 0).collect();
        let mut order = Vec::with_capacity(n);
        let mut qi = 0;
        while qi < queue.len() {
            let s = queue[qi];
            qi += 1;
            order.push(s);
            for &t in &out[s] {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    queue.push(t);
                }
            }
        }
        if order.len() == n {
            Some(order)
        } else {
            None
        }
    }

    /// Forward-reachable set from `from` over support edges (terminal
    /// self-loops excluded); `from` itself only included if on a cycle.
    pub fn reachable_from(&self, from: StateId) -> Vec<bool> {
        let n = self.n_states();
        let mut adj: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (a, b) in self.support_edges() {
            adj[a].push(b);
        }
        let mut seen = vec![false; n];
        let mut stack: Vec<StateId> = adj[from].clone();
        while let Some(s) = stack.pop() {
            if !seen[s] {
                seen[s] = true;
                stack.extend(adj[s].iter().copied());
            }
        }
        seen
    }
}

/// U_h(s', g_h): 1 iff s' is a member of the goal (its stated weight for
/// weighted members).
pub fn reachable_goal_indicator(
    game: &StochasticGame,
    h: HumanId,
    g: GoalId,
    s: StateId,
) -> Result<f64, String> {
    if h >= game.humans.len() {
        return Err(format!("unknown human id {h}"));
    }
    if g >= game.humans[h].goals.len() {
        return Err(format!("unknown goal id {g} for human {h}"));
    }
    if s >= game.n_states() {
        return Err(format!("unknown state id {s}"));
    }
    Ok(game.goal_indicator(h, g, s))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    KernelRowNotNormalized { state: StateId, joint: usize, sum: f64 },
    KernelNegativeEntry { state: StateId, joint: usize },
    EmptyActionSet { state: StateId, agent: String },
    DistributionRowInvalid { state: StateId, human: HumanId, goal: GoalId, what: String },
    GoalEmpty { human: HumanId, goal: GoalId },
    GoalWeightOutOfRange { human: HumanId, goal: GoalId, state: StateId },
    GoalMembersMutuallyReachable { human: HumanId, goal: GoalId, from: StateId, to: StateId },
    GoalCoverViolated { human: HumanId, state: StateId },
    TerminalNotSelfLoop { state: StateId },
    TerminalExtraActions { state: StateId },
    CommitmentInvalid { state: StateId, why: String },
    ParamOutOfRange { what: String },
}

impl Violation {
    pub fn describe(&self, game: &StochasticGame) -> String {
        let sn = |s: &StateId| game.states[*s].name.clone();
        match self {
            Violation::KernelRowNotNormalized { state, joint, sum } => {
                format!("kernel row not normalized at {} joint {}: sum {}", sn(state), joint, sum)
            }
            Violation::KernelNegativeEntry { state, joint } => {
                format!("negative kernel entry at {} joint {}", sn(state), joint)
            }
            Violation::EmptyActionSet { state, agent } => {
                format!("empty action set for {} at {}", agent, sn(state))
            }
            Violation::DistributionRowInvalid { state, human, goal, what } => {
                format!("invalid {} row at {} (human {}, goal {})", what, sn(state), human, goal)
            }
            Violation::GoalEmpty { human, goal } => format!("empty goal {} of human {}", goal, human),
            Violation::GoalWeightOutOfRange { human, goal, state } => {
                format!("goal weight outside (0,1] at {} (human {}, goal {})", sn(state), human, goal)
            }
            Violation::GoalMembersMutuallyReachable { human, goal, from, to } => format!(
                "goal states mutually reachable: {} reaches {} (human {}, goal {})",
                sn(from),
                sn(to),
                human,
                goal
            ),
            Violation::GoalCoverViolated { human, state } => format!(
                "goal cover violated: from {} human {} may never fulfill any goal",
                sn(state),
                human
            ),
            Violation::TerminalNotSelfLoop { state } => {
                format!("terminal {} does not self-loop with probability 1", sn(state))
            }
            Violation::TerminalExtraActions { state } => {
                format!("terminal {} has more than one action per agent", sn(state))
            }
            Violation::CommitmentInvalid { state, why } => {
                format!("invalid commitment at {}: {}", sn(state), why)
            }
            Violation::ParamOutOfRange { what } => format!("parameter out of range: {}", what),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn describe(&self, game: &StochasticGame) -> Vec<String> {
        self.violations.iter().map(|v| v.describe(game)).collect()
    }
}

fn check_dist_row(row: &[f64], expected_len: usize) -> Option<String> {
    if row.len() != expected_len {
        return Some(format!("length {} expected {}", row.len(), expected_len));
    }
    if row.iter().any(|&p| !(p >= 0.0) || p > 1.0 + 1e-12) {
        return Some("entry outside [0,1]".into());
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Some(format!("sums to {sum}"));
    }
    None
}

/// Checks every structural invariant and reports all violations; never
/// panics or errors.
pub fn validate_game(game: &StochasticGame) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = game.n_states();

    for s in 0..n {
        if game.robot_actions[s].is_empty() {
            report.violations.push(Violation::EmptyActionSet { state: s, agent: "robot".into() });
        }
        for (h, row) in game.human_actions[s].iter().enumerate() {
            if row.is_empty() {
                report
                    .violations
                    .push(Violation::EmptyActionSet { state: s, agent: game.humans[h].name.clone() });
            }
        }
        for (j, row) in game.kernel[s].iter().enumerate() {
            if row.iter().any(|&(_, p)| p < 0.0) {
                report.violations.push(Violation::KernelNegativeEntry { state: s, joint: j });
            }
            let sum: f64 = row.iter().map(|&(_, p)| p).sum();
            if (sum - 1.0).abs() > 1e-12 {
                report.violations.push(Violation::KernelRowNotNormalized { state: s, joint: j, sum });
            }
        }
        if game.states[s].terminal {
            if game.joint_count(s) != 1 {
                report.violations.push(Violation::TerminalExtraActions { state: s });
            }
            let ok = game.kernel[s].len() == 1
                && (game.kernel[s][0].is_empty()
                    || (game.kernel[s][0].len() == 1
                        && game.kernel[s][0][0].0 == s
                        && (game.kernel[s][0][0].1 - 1.0).abs() <= 1e-12));
            if !ok {
                report.violations.push(Violation::TerminalNotSelfLoop { state: s });
            }
        }
    }

    if !(0.0..1.0).contains(&game.gamma_r) {
        report.violations.push(Violation::ParamOutOfRange { what: format!("gamma_r = {}", game.gamma_r) });
    }
    if game.goal_resample_period == 0 {
        report.violations.push(Violation::ParamOutOfRange { what: "goal_resample_period = 0".into() });
    }
    if let Some(table) = &game.injected_x {
        if table.len() != game.humans.len() {
            report
                .violations
                .push(Violation::ParamOutOfRange { what: "injected power table arity".into() });
        }
        for row in table {
            if row.len() != n || row.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
                report.violations.push(Violation::ParamOutOfRange {
                    what: "injected power levels must be positive and finite".into(),
                });
            }
        }
    }

    // Per-human parameter tables and goal structure.
    let acyclic = game.is_acyclic().is_some();
    let reach: Vec<Vec<bool>> = (0..n).map(|s| game.reachable_from(s)).collect();

    for (h, human) in game.humans.iter().enumerate() {
        let ng = human.goals.len();
        if !(0.0..=1.0).contains(&human.gamma) || (human.gamma == 1.0 && !acyclic) {
            report
                .violations
                .push(Violation::ParamOutOfRange { what: format!("gamma_h[{}] = {}", h, human.gamma) });
        }
        if human.goals.is_empty() {
            report.violations.push(Violation::GoalEmpty { human: h, goal: 0 });
        }
        for (g, goal) in human.goals.iter().enumerate() {
            if goal.members.is_empty() {
                report.violations.push(Violation::GoalEmpty { human: h, goal: g });
            }
            for &(s, w) in &goal.members {
                if !(w > 0.0 && w <= 1.0) {
                    report.violations.push(Violation::GoalWeightOutOfRange { human: h, goal: g, state: s });
                }
            }
            if !game.relax_mutual_unreachability {
                for &(a, _) in &goal.members {
                    for &(b, _) in &goal.members {
                        if a != b && reach[a][b] {
                            report.violations.push(Violation::GoalMembersMutuallyReachable {
                                human: h,
                                goal: g,
                                from: a,
                                to: b,
                            });
                        }
                    }
                }
            }
        }
        for s in 0..n {
            let na = game.human_actions[s][h].len();
            for g in 0..ng {
                if !(0.0..=1.0).contains(&human.nu_at(s, g)) {
                    report.violations.push(Violation::ParamOutOfRange {
                        what: format!("nu at state {} human {} goal {}", s, h, g),
                    });
                }
                let b = human.beta_at(s, g);
                if b.is_nan() || b < 0.0 {
                    report.violations.push(Violation::ParamOutOfRange {
                        what: format!("beta at state {} human {} goal {}", s, h, g),
                    });
                }
                if let Some(row) = human.pi0.get(s, g) {
                    if let Some(what) = check_dist_row(row, na) {
                        report.violations.push(Violation::DistributionRowInvalid {
                            state: s,
                            human: h,
                            goal: g,
                            what: format!("pi0 ({what})"),
                        });
                    }
                }
                if let Some(rows) = &human.mu[s * ng + g] {
                    let others: Vec<usize> =
                        (0..game.humans.len()).filter(|&j| j != h).collect();
                    if rows.len() != others.len() {
                        report.violations.push(Violation::DistributionRowInvalid {
                            state: s,
                            human: h,
                            goal: g,
                            what: "mu (wrong arity)".into(),
                        });
                    } else {
                        for (k, &j) in others.iter().enumerate() {
                            if let Some(what) =
                                check_dist_row(&rows[k], game.human_actions[s][j].len())
                            {
                                report.violations.push(Violation::DistributionRowInvalid {
                                    state: s,
                                    human: h,
                                    goal: g,
                                    what: format!("mu ({what})"),
                                });
                            }
                        }
                    }
                }
            }
        }

        // Goal cover: in the support graph, every state reachable from an
        // initial state must be able to reach some goal member of this human
        // (finite chains then fulfill a goal with probability 1), and no
        // goal-less terminal may be reachable.
        if !game.relax_goal_cover && !human.goals.is_empty() {
            let mut member = vec![false; n];
            for goal in &human.goals {
                for &(s, _) in &goal.members {
                    member[s] = true;
                }
            }
            // Backward reachability to the member set.
            let mut radj: Vec<Vec<StateId>> = vec![Vec::new(); n];
            for (a, b) in game.support_edges() {
                radj[b].push(a);
            }
            let mut can_reach = member.clone();
            let mut stack: Vec<StateId> = (0..n).filter(|&s| member[s]).collect();
            while let Some(s) = stack.pop() {
                for &p in &radj[s] {
                    if !can_reach[p] {
                        can_reach[p] = true;
                        stack.push(p);
                    }
                }
            }
            let mut fwd = vec![false; n];
            let mut stack: Vec<StateId> = game.initial_states();
            for &s in &stack {
                fwd[s] = true;
            }
            while let Some(s) = stack.pop() {
                for &(a, b) in game.support_edges().iter().filter(|&&(a, _)| a == s) {
                    let _ = a;
                    if !fwd[b] {
                        fwd[b] = true;
                        stack.push(b);
                    }
                }
            }
            for s in 0..n {
                if fwd[s] && !can_reach[s] {
                    report.violations.push(Violation::GoalCoverViolated { human: h, state: s });
                }
            }
        }
    }

    // Commitment annotations: committed set nonempty, a subset of the base
    // state's actions, and equal to the annotated state's action set.
    for c in &game.commitments {
        if c.state >= n || c.base_state >= n {
            report
                .violations
                .push(Violation::CommitmentInvalid { state: c.state.min(n - 1), why: "unknown state".into() });
            continue;
        }
        if c.committed_set.is_empty() {
            report
                .violations
                .push(Violation::CommitmentInvalid { state: c.state, why: "empty committed set".into() });
        }
        for a in &c.committed_set {
            if !game.robot_actions[c.base_state].contains(a) {
                report.violations.push(Violation::CommitmentInvalid {
                    state: c.state,
                    why: format!("action {} not in base state's set", game.action_names[*a]),
                });
            }
        }
        for a in &game.robot_actions[c.state] {
            if !c.committed_set.contains(a) {
                report.violations.push(Violation::CommitmentInvalid {
                    state: c.state,
                    why: format!("action {} outside committed set", game.action_names[*a]),
                });
            }
        }
    }

    report
}

/// Convenience constructor used by scenario builders, the parser, and tests.
pub struct GameBuilder {
    name: String,
    states: Vec<StateInfo>,
    state_ids: HashMap<String, StateId>,
    action_names: Vec<String>,
    action_ids: HashMap<String, ActionId>,
    robot_actions: Vec<Vec<ActionId>>,
    human_names: Vec<String>,
    human_gammas: Vec<f64>,
    human_actions: Vec<Vec<Vec<ActionId>>>,
    // (state, robot action name, per-human action names) -> rows
    transitions: Vec<(String, String, Vec<String>, Vec<(String, f64)>)>,
    goals: Vec<Vec<(String, Vec<(String, f64)>)>>,
    nu_default: Vec<f64>,
    beta_default: Vec<f64>,
    nu_over: Vec<(usize, String, usize, f64)>,
    beta_over: Vec<(usize, String, usize, f64)>,
    pi0_over: Vec<(usize, String, usize, Vec<(String, f64)>)>,
    mu_over: Vec<(usize, String, usize, Vec<(usize, Vec<(String, f64)>)>)>,
    gamma_r: f64,
    goal_resample_period: usize,
    commitments: Vec<(String, String, Vec<String>)>,
    relax_mutual_unreachability: bool,
    relax_goal_cover: bool,
    goal_recollection: bool,
    injected_x: Vec<(usize, String, f64)>,
}

impl GameBuilder {
    pub fn new(name: &str) -> Self {
        GameBuilder {
            name: name.to_string(),
            states: Vec::new(),
            state_ids: HashMap::new(),
            action_names: Vec::new(),
            action_ids: HashMap::new(),
            robot_actions: Vec::new(),
            human_names: Vec::new(),
            human_gammas: Vec::new(),
            human_actions: Vec::new(),
            transitions: Vec::new(),
            goals: Vec::new(),
            nu_default: Vec::new(),
            beta_default: Vec::new(),
            nu_over: Vec::new(),
            beta_over: Vec::new(),
            pi0_over: Vec::new(),
            mu_over: Vec::new(),
            gamma_r: 0.99,
            goal_resample_period: 1,
            commitments: Vec::new(),
            relax_mutual_unreachability: false,
            relax_goal_cover: false,
            goal_recollection: false,
            injected_x: Vec::new(),
        }
    }

    pub fn gamma_r(&mut self, g: f64) -> &mut Self {
        self.gamma_r = g;
        self
    }

    pub fn goal_resample_period(&mut self, n: usize) -> &mut Self {
        self.goal_resample_period = n;
        self
    }

    pub fn relax_mutual_unreachability(&mut self) -> &mut Self {
        self.relax_mutual_unreachability = true;
        self
    }

    pub fn relax_goal_cover(&mut self) -> &mut Self {
        self.relax_goal_cover = true;
        self
    }

    pub fn goal_recollection(&mut self) -> &mut Self {
        self.goal_recollection = true;
        self
    }

    /// Prescribe X_h at a state directly (see `StochasticGame::injected_x`).
    pub fn inject_x(&mut self, h: HumanId, state: &str, x: f64) -> &mut Self {
        self.injected_x.push((h, state.to_string(), x));
        self
    }

    pub fn human(&mut self, name: &str, gamma: f64, nu: f64, beta: f64) -> HumanId {
        self.human_names.push(name.to_string());
        self.human_gammas.push(gamma);
        self.nu_default.push(nu);
        self.beta_default.push(beta);
        self.goals.push(Vec::new());
        self.human_names.len() - 1
    }

    pub fn state(&mut self, name: &str) -> StateId {
        self.add_state(name, false, false)
    }

    pub fn initial_state(&mut self, name: &str) -> StateId {
        self.add_state(name, false, true)
    }

    pub fn terminal_state(&mut self, name: &str) -> StateId {
        self.add_state(name, true, false)
    }

    fn add_state(&mut self, name: &str, terminal: bool, initial: bool) -> StateId {
        if let Some(&id) = self.state_ids.get(name) {
            return id;
        }
        let id = self.states.len();
        self.states.push(StateInfo { name: name.to_string(), terminal, initial, coord: None });
        self.state_ids.insert(name.to_string(), id);
        self.robot_actions.push(Vec::new());
        self.human_actions.push(Vec::new());
        id
    }

    pub fn set_coord(&mut self, state: &str, coord: (i32, i32)) -> &mut Self {
        let id = self.state_ids[state];
        self.states[id].coord = Some(coord);
        self
    }

    pub fn mark_initial(&mut self, state: &str) -> &mut Self {
        let id = self.state_ids[state];
        self.states[id].initial = true;
        self
    }

    fn action_id(&mut self, name: &str) -> ActionId {
        if let Some(&id) = self.action_ids.get(name) {
            return id;
        }
        let id = self.action_names.len();
        self.action_names.push(name.to_string());
        self.action_ids.insert(name.to_string(), id);
        id
    }

    /// Pre-register an action name so global action ids follow a prescribed
    /// order (used by the text format to round-trip ids exactly).
    pub fn declare_action(&mut self, name: &str) -> &mut Self {
        self.action_id(name);
        self
    }

    pub fn robot_acts(&mut self, state: &str, actions: &[&str]) -> &mut Self {
        let sid = self.state_ids[state];
        self.robot_actions[sid] = actions.iter().map(|a| self.action_id(a)).collect();
        self
    }

    pub fn human_acts(&mut self, state: &str, h: HumanId, actions: &[&str]) -> &mut Self {
        let sid = self.state_ids[state];
        while self.human_actions[sid].len() <= h {
            self.human_actions[sid].push(Vec::new());
        }
        self.human_actions[sid][h] = actions.iter().map(|a| self.action_id(a)).collect();
        self
    }

    /// Transition for the full joint action profile.
    pub fn transition(
        &mut self,
        state: &str,
        robot_action: &str,
        human_actions: &[&str],
        rows: &[(&str, f64)],
    ) -> &mut Self {
        self.transitions.push((
            state.to_string(),
            robot_action.to_string(),
            human_actions.iter().map(|a| a.to_string()).collect(),
            rows.iter().map(|&(t, p)| (t.to_string(), p)).collect(),
        ));
        self
    }

    /// Transition where every human passes (their singleton action).
    pub fn rtransition(&mut self, state: &str, robot_action: &str, rows: &[(&str, f64)]) -> &mut Self {
        self.transition(state, robot_action, &[], rows)
    }

    pub fn goal(&mut self, h: HumanId, name: &str, members: &[(&str, f64)]) -> GoalId {
        self.goals[h].push((
            name.to_string(),
            members.iter().map(|&(s, w)| (s.to_string(), w)).collect(),
        ));
        self.goals[h].len() - 1
    }

    pub fn set_nu(&mut self, h: HumanId, state: &str, g: GoalId, nu: f64) -> &mut Self {
        self.nu_over.push((h, state.to_string(), g, nu));
        self
    }

    pub fn set_beta(&mut self, h: HumanId, state: &str, g: GoalId, beta: f64) -> &mut Self {
        self.beta_over.push((h, state.to_string(), g, beta));
        self
    }

    pub fn set_pi0(&mut self, h: HumanId, state: &str, g: GoalId, row: &[(&str, f64)]) -> &mut Self {
        self.pi0_over.push((
            h,
            state.to_string(),
            g,
            row.iter().map(|&(a, p)| (a.to_string(), p)).collect(),
        ));
        self
    }

    /// Belief of human `h` about `other`'s actions at (state, goal).
    pub fn set_mu(
        &mut self,
        h: HumanId,
        state: &str,
        g: GoalId,
        other: HumanId,
        row: &[(&str, f64)],
    ) -> &mut Self {
        self.mu_over.push((
            h,
            state.to_string(),
            g,
            vec![(other, row.iter().map(|&(a, p)| (a.to_string(), p)).collect())],
        ));
        self
    }

    pub fn commitment(&mut self, state: &str, base: &str, committed: &[&str]) -> &mut Self {
        self.commitments.push((
            state.to_string(),
            base.to_string(),
            committed.iter().map(|a| a.to_string()).collect(),
        ));
        self
    }

    pub fn build(mut self) -> Result<StochasticGame, String> {
        let n = self.states.len();
        let nh = self.human_names.len();
        // Fill defaults: terminal states and unspecified agents get "pass".
        let pass = self.action_id("pass");
        for s in 0..n {
            if self.robot_actions[s].is_empty() {
                self.robot_actions[s] = vec![pass];
            }
            while self.human_actions[s].len() < nh {
                self.human_actions[s].push(Vec::new());
            }
            for row in self.human_actions[s].iter_mut() {
                if row.is_empty() {
                    *row = vec![pass];
                }
            }
        }

        let mut game = StochasticGame {
            name: self.name,
            states: self.states,
            action_names: self.action_names,
            robot_actions: self.robot_actions,
            human_actions: self.human_actions,
            humans: Vec::new(),
            kernel: Vec::new(),
            gamma_r: self.gamma_r,
            goal_resample_period: self.goal_resample_period,
            commitments: Vec::new(),
            relax_mutual_unreachability: self.relax_mutual_unreachability,
            relax_goal_cover: self.relax_goal_cover,
            goal_recollection: self.goal_recollection,
            injected_x: None,
        };

        for s in 0..n {
            let jc = game.joint_count(s);
            game.kernel.push(vec![Vec::new(); jc]);
        }

        let lookup_state = |ids: &HashMap<String, StateId>, name: &str| -> Result<StateId, String> {
            ids.get(name).copied().ok_or_else(|| format!("unknown state {name}"))
        };

        for (sname, ra, has, rows) in &self.transitions {
            let s = lookup_state(&self.state_ids, sname)?;
            let ra_id = *self.action_ids.get(ra).ok_or_else(|| format!("unknown action {ra}"))?;
            let ar = game.robot_actions[s]
                .iter()
                .position(|&a| a == ra_id)
                .ok_or_else(|| format!("action {ra} not available to robot at {sname}"))?;
            let mut ah = Vec::with_capacity(nh);
            for (h, an) in has.iter().enumerate() {
                let aid = *self.action_ids.get(an).ok_or_else(|| format!("unknown action {an}"))?;
                let pos = game.human_actions[s][h]
                    .iter()
                    .position(|&a| a == aid)
                    .ok_or_else(|| format!("action {an} not available to human {h} at {sname}"))?;
                ah.push(pos);
            }
            if has.is_empty() && nh > 0 {
                // all humans pass
                for h in 0..nh {
                    let pos = game.human_actions[s][h]
                        .iter()
                        .position(|&a| game.action_names[a] == "pass")
                        .ok_or_else(|| format!("human {h} has no pass action at {sname}"))?;
                    ah.push(pos);
                }
            }
            let j = game.joint_index(s, ar, &ah);
            let mut row = Vec::with_capacity(rows.len());
            for (t, p) in rows {
                row.push((lookup_state(&self.state_ids, t)?, *p));
            }
            row.sort_by_key(|&(t, _)| t);
            game.kernel[s][j] = row;
        }

        // Terminal states self-loop; any unspecified row is an error unless
        // the state is terminal.
        for s in 0..n {
            for j in 0..game.kernel[s].len() {
                if game.kernel[s][j].is_empty() {
                    if game.states[s].terminal {
                        game.kernel[s][j] = vec![(s, 1.0)];
                    } else {
                        return Err(format!(
                            "missing transition at non-terminal {} joint {}",
                            game.states[s].name, j
                        ));
                    }
                }
            }
        }

        for h in 0..nh {
            let ng = self.goals[h].len();
            let mut goals = Vec::with_capacity(ng);
            for (gname, members) in &self.goals[h] {
                let mut ms = Vec::with_capacity(members.len());
                for (sname, w) in members {
                    ms.push((lookup_state(&self.state_ids, sname)?, *w));
                }
                ms.sort_by_key(|&(s, _)| s);
                goals.push(Goal { name: gname.clone(), members: ms });
            }
            let mut human = Human {
                name: self.human_names[h].clone(),
                gamma: self.human_gammas[h],
                goals,
                nu: vec![self.nu_default[h]; n * ng],
                beta: vec![self.beta_default[h]; n * ng],
                pi0: PolicyTable::uniform(n, ng),
                mu: vec![None; n * ng],
            };
            for (hh, sname, g, v) in &self.nu_over {
                if *hh == h {
                    let s = lookup_state(&self.state_ids, sname)?;
                    human.nu[s * ng + g] = *v;
                }
            }
            for (hh, sname, g, v) in &self.beta_over {
                if *hh == h {
                    let s = lookup_state(&self.state_ids, sname)?;
                    human.beta[s * ng + g] = *v;
                }
            }
            for (hh, sname, g, row) in &self.pi0_over {
                if *hh == h {
                    let s = lookup_state(&self.state_ids, sname)?;
                    let mut dist = vec![0.0; game.human_actions[s][h].len()];
                    for (an, p) in row {
                        let aid =
                            *self.action_ids.get(an).ok_or_else(|| format!("unknown action {an}"))?;
                        let pos = game.human_actions[s][h]
                            .iter()
                            .position(|&a| a == aid)
                            .ok_or_else(|| format!("pi0 action {an} unavailable at {sname}"))?;
                        dist[pos] = *p;
                    }
                    human.pi0.set(s, *g, dist);
                }
            }
            for (hh, sname, g, rows) in &self.mu_over {
                if *hh == h {
                    let s = lookup_state(&self.state_ids, sname)?;
                    let others: Vec<usize> = (0..nh).filter(|&j| j != h).collect();
                    let slot = &mut human.mu[s * ng + g];
                    if slot.is_none() {
                        *slot = Some(
                            others
                                .iter()
                                .map(|&j| {
                                    let k = game.human_actions[s][j].len();
                                    vec![1.0 / k as f64; k]
                                })
                                .collect(),
                        );
                    }
                    let table = slot.as_mut().unwrap();
                    for (other, row) in rows {
                        let k = others
                            .iter()
                            .position(|&j| j == *other)
                            .ok_or_else(|| format!("mu target {other} is not another human"))?;
                        let mut dist = vec![0.0; game.human_actions[s][*other].len()];
                        for (an, p) in row {
                            let aid = *self
                                .action_ids
                                .get(an)
                                .ok_or_else(|| format!("unknown action {an}"))?;
                            let pos = game.human_actions[s][*other]
                                .iter()
                                .position(|&a| a == aid)
                                .ok_or_else(|| format!("mu action {an} unavailable at {sname}"))?;
                            dist[pos] = *p;
                        }
                        table[k] = dist;
                    }
                }
            }
            game.humans.push(human);
        }

        for (sname, bname, committed) in &self.commitments {
            let state = lookup_state(&self.state_ids, sname)?;
            let base_state = lookup_state(&self.state_ids, bname)?;
            let mut set = Vec::with_capacity(committed.len());
            for an in committed {
                set.push(*self.action_ids.get(an).ok_or_else(|| format!("unknown action {an}"))?);
            }
            game.commitments.push(CommitmentAnnotation { state, base_state, committed_set: set });
        }

        if !self.injected_x.is_empty() {
            let mut table = vec![vec![f64::NAN; n]; nh];
            for (h, sname, x) in &self.injected_x {
                let s = lookup_state(&self.state_ids, sname)?;
                table[*h][s] = *x;
            }
            for (h, row) in table.iter().enumerate() {
                for (s, &x) in row.iter().enumerate() {
                    if x.is_nan() {
                        return Err(format!(
                            "injected power missing for human {} at {}",
                            h, game.states[s].name
                        ));
                    }
                }
            }
            game.injected_x = Some(table);
        }

        Ok(game)
    }
}
