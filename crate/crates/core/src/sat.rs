//! Incremental CDCL SAT solver with assumptions and final-conflict cores.
//!
//! Two watched literals with blockers, VSIDS branching over a binary heap,
//! phase saving, Luby restarts and activity-based learned clause reduction.
//! Every query leaves the solver at decision level 0, so clauses can be
//! added between calls.

use crate::cnf::{Assignment, Clause, Lit};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum LBool {
    True,
    False,
    Undef,
}

impl LBool {
    #[inline]
    fn from_bool(b: bool) -> LBool {
        if b {
            LBool::True
        } else {
            LBool::False
        }
    }
}

/// Outcome of [`Solver::solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    /// A total model over the declared variables.
    Sat(Assignment),
    /// A subset of the assumptions that is inconsistent with the clauses.
    /// Empty when the clause database alone is unsatisfiable.
    Unsat(Vec<Lit>),
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn model(&self) -> Option<&Assignment> {
        match self {
            SatResult::Sat(m) => Some(m),
            SatResult::Unsat(_) => None,
        }
    }

    pub fn core(&self) -> Option<&[Lit]> {
        match self {
            SatResult::Sat(_) => None,
            SatResult::Unsat(c) => Some(c),
        }
    }
}

/// Counters exposed for instrumentation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub solves: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

type ClauseRef = u32;

#[derive(Clone, Debug)]
struct ClauseData {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Clone, Copy, Debug)]
struct Watcher {
    cref: ClauseRef,
    blocker: Lit,
}

/// Max-heap of variables keyed by activity, with position index.
#[derive(Clone, Debug, Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn grow(&mut self, num_vars: usize) {
        self.pos.resize(num_vars, None);
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize].is_some()
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v as usize] = Some(i);
        self.sift_up(i, act);
    }

    fn decrease(&mut self, v: u32, act: &[f64]) {
        // activity increased: move towards the root
        if let Some(i) = self.pos[v as usize] {
            self.sift_up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap[0];
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = Some(0);
            self.sift_down(0, act);
        }
        Some(top)
    }

    #[inline]
    fn better(a: u32, b: u32, act: &[f64]) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if !Self::better(v, p, act) {
                break;
            }
            self.heap[i] = p;
            self.pos[p as usize] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let left = 2 * i + 1;
            if left >= n {
                break;
            }
            let right = left + 1;
            let child = if right < n && Self::better(self.heap[right], self.heap[left], act) {
                right
            } else {
                left
            };
            let c = self.heap[child];
            if !Self::better(c, v, act) {
                break;
            }
            self.heap[i] = c;
            self.pos[c as usize] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }
}

fn luby(y: f64, mut x: u64) -> f64 {
    let (mut size, mut seq) = (1u64, 0i32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}

const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f64 = 0.999;
const RESTART_FIRST: f64 = 100.0;
const RESTART_INC: f64 = 2.0;

/// An incremental CDCL solver.
#[derive(Clone, Debug)]
pub struct Solver {
    num_vars: u32,
    clauses: Vec<ClauseData>,
    learnts: Vec<ClauseRef>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<LBool>,
    level: Vec<u32>,
    reason: Vec<Option<ClauseRef>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    saved_phase: Vec<bool>,
    user_phase: Vec<Option<bool>>,
    preferred: Vec<u32>,
    seen: Vec<bool>,
    ok: bool,
    max_learnts: f64,
    problem_clauses: usize,
    free_slots: Vec<ClauseRef>,
    rng_state: u64,
    phase_rng: u64,
    stats: SolverStats,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

impl Solver {
    pub fn new() -> Solver {
        Solver::with_seed(0)
    }

    /// A solver whose initial variable order is perturbed by `seed`.
    /// Seed 0 means no perturbation. Equal seeds and equal call
    /// sequences give equal results.
    pub fn with_seed(seed: u64) -> Solver {
        Solver {
            num_vars: 0,
            clauses: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            saved_phase: Vec::new(),
            user_phase: Vec::new(),
            preferred: Vec::new(),
            seen: Vec::new(),
            ok: true,
            max_learnts: 0.0,
            problem_clauses: 0,
            free_slots: Vec::new(),
            rng_state: seed,
            phase_rng: 0,
            stats: SolverStats::default(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn stats(&self) -> &SolverStats {
        &self.stats
    }

    /// False once the clause database is known to be unsatisfiable.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    /// Number of problem (non-learned) clauses of length two or more.
    pub fn num_clauses(&self) -> usize {
        self.problem_clauses
    }

    fn next_rand(&mut self) -> u64 {
        // xorshift64*
        let mut x = self.rng_state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.rng_state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Declares variables up to `n`.
    pub fn ensure_vars(&mut self, n: u32) {
        while self.num_vars < n {
            self.new_var();
        }
    }

    /// Declares a fresh variable and returns its positive literal.
    pub fn new_var(&mut self) -> Lit {
        self.num_vars += 1;
        let v = self.num_vars;
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.assigns.push(LBool::Undef);
        self.level.push(0);
        self.reason.push(None);
        let act = if self.rng_state != 0 {
            (self.next_rand() % 1000) as f64 * 1e-5
        } else {
            0.0
        };
        self.activity.push(act);
        self.saved_phase.push(false);
        self.user_phase.push(None);
        self.seen.push(false);
        self.heap.grow(v as usize);
        self.heap.insert(v - 1, &self.activity);
        Lit::positive(v)
    }

    /// Fixes the branching polarity of `var`; `None` restores phase saving.
    pub fn set_polarity(&mut self, var: u32, polarity: Option<bool>) {
        self.ensure_vars(var);
        self.user_phase[var as usize - 1] = polarity;
    }

    /// Branches on a pseudo-random polarity, drawn from `seed`, for every
    /// variable without a fixed polarity. `None` restores phase saving.
    pub fn set_random_polarity(&mut self, seed: Option<u64>) {
        // splitmix64 finalizer; the xorshift state must be nonzero.
        self.phase_rng = seed.map_or(0, |s| {
            let mut z = s.wrapping_add(0x9E37_79B9_7F4A_7C15);
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            (z ^ (z >> 31)) | 1
        });
    }

    /// Variables decided before all others, in the given order.
    pub fn set_decision_preference(&mut self, vars: &[u32]) {
        if let Some(&max) = vars.iter().max() {
            self.ensure_vars(max);
        }
        self.preferred = vars.iter().map(|&v| v - 1).collect();
    }

    #[inline]
    fn lit_value(&self, lit: Lit) -> LBool {
        match self.assigns[lit.var() as usize - 1] {
            LBool::Undef => LBool::Undef,
            LBool::True => LBool::from_bool(lit.is_positive()),
            LBool::False => LBool::from_bool(!lit.is_positive()),
        }
    }

    #[inline]
    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    pub fn add_clause(&mut self, clause: &Clause) -> bool {
        self.add_clause_lits(clause.lits())
    }

    /// Adds a clause given as a literal slice. Duplicates and tautologies
    /// are tolerated here. Returns false if the database became
    /// unsatisfiable.
    pub fn add_clause_lits(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        debug_assert_eq!(self.decision_level(), 0);
        if let Some(max) = lits.iter().map(|l| l.var()).max() {
            self.ensure_vars(max);
        }
        let mut ps: Vec<Lit> = lits.to_vec();
        ps.sort_unstable_by_key(|l| l.code());
        ps.dedup();
        let mut out = Vec::with_capacity(ps.len());
        for (i, &l) in ps.iter().enumerate() {
            if i + 1 < ps.len() && ps[i + 1] == !l {
                return true; // tautology
            }
            match self.lit_value(l) {
                LBool::True => return true,
                LBool::False => {}
                LBool::Undef => out.push(l),
            }
        }
        match out.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.unchecked_enqueue(out[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                let cref = self.alloc_clause(out, false);
                self.attach(cref);
                self.problem_clauses += 1;
                true
            }
        }
    }

    fn alloc_clause(&mut self, lits: Vec<Lit>, learnt: bool) -> ClauseRef {
        let data = ClauseData {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
        };
        if let Some(slot) = self.free_slots.pop() {
            self.clauses[slot as usize] = data;
            slot
        } else {
            self.clauses.push(data);
            (self.clauses.len() - 1) as ClauseRef
        }
    }

    fn attach(&mut self, cref: ClauseRef) {
        let c = &self.clauses[cref as usize];
        let (l0, l1) = (c.lits[0], c.lits[1]);
        self.watches[(!l0).code()].push(Watcher { cref, blocker: l1 });
        self.watches[(!l1).code()].push(Watcher { cref, blocker: l0 });
    }

    fn unchecked_enqueue(&mut self, lit: Lit, reason: Option<ClauseRef>) {
        let v = lit.var() as usize - 1;
        debug_assert_eq!(self.assigns[v], LBool::Undef);
        self.assigns[v] = LBool::from_bool(lit.is_positive());
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    /// Unit propagation. Returns a conflicting clause if any.
    fn propagate(&mut self) -> Option<ClauseRef> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let (mut i, mut j) = (0, 0);
            'watchers: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.lit_value(w.blocker) == LBool::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref;
                let first = {
                    let c = &mut self.clauses[cref as usize];
                    if c.lits[0] == false_lit {
                        c.lits.swap(0, 1);
                    }
                    c.lits[0]
                };
                let nw = Watcher {
                    cref,
                    blocker: first,
                };
                if first != w.blocker && self.lit_value(first) == LBool::True {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                let len = self.clauses[cref as usize].lits.len();
                for k in 2..len {
                    let lk = self.clauses[cref as usize].lits[k];
                    if self.lit_value(lk) != LBool::False {
                        let c = &mut self.clauses[cref as usize];
                        c.lits.swap(1, k);
                        self.watches[(!lk).code()].push(nw);
                        continue 'watchers;
                    }
                }
                ws[j] = nw;
                j += 1;
                if self.lit_value(first) == LBool::False {
                    conflict = Some(cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.unchecked_enqueue(first, Some(cref));
                }
            }
            ws.truncate(j);
            // watchers pushed onto p's list during the scan stay
            let extra = std::mem::replace(&mut self.watches[p.code()], ws);
            self.watches[p.code()].extend(extra);
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for idx in (lim..self.trail.len()).rev() {
            let lit = self.trail[idx];
            let v = lit.var() as usize - 1;
            self.assigns[v] = LBool::Undef;
            self.reason[v] = None;
            self.saved_phase[v] = lit.is_positive();
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = self.trail.len();
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.decrease(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, cref: ClauseRef) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis with basic clause minimisation.
    fn analyze(&mut self, mut confl: ClauseRef) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![Lit::new(1)]; // placeholder for the UIP
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let dl = self.decision_level();

        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl);
            }
            let start = if p.is_some() { 1 } else { 0 };
            let len = self.clauses[confl as usize].lits.len();
            for k in start..len {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var() as usize - 1;
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= dl {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var() as usize - 1] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            let v = lit.var() as usize - 1;
            self.seen[v] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[v].expect("non-decision literal without reason");
        }
        learnt[0] = !p.unwrap();

        // drop literals implied by others in the clause
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, &l)| i == 0 || !self.redundant(l))
            .collect();
        let all = learnt.clone();
        let mut kept: Vec<Lit> = Vec::with_capacity(learnt.len());
        for (i, &l) in learnt.iter().enumerate() {
            if keep[i] {
                kept.push(l);
            }
        }
        for l in &all {
            self.seen[l.var() as usize - 1] = false;
        }
        let mut learnt = kept;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var() as usize - 1]
                    > self.level[learnt[max_i].var() as usize - 1]
                {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var() as usize - 1]
        };
        (learnt, bt)
    }

    /// Local minimisation: `lit` is redundant if every other literal of
    /// its reason is already in the learned clause or fixed at level 0.
    fn redundant(&self, lit: Lit) -> bool {
        let v = lit.var() as usize - 1;
        match self.reason[v] {
            None => false,
            Some(r) => self.clauses[r as usize].lits.iter().skip(1).all(|q| {
                let qv = q.var() as usize - 1;
                self.seen[qv] || self.level[qv] == 0
            }),
        }
    }

    /// Collects the assumptions responsible for the failed assumption
    /// `!p`. The result lists assumption literals as passed by the caller.
    fn analyze_final(&mut self, p: Lit) -> Vec<Lit> {
        let mut core = vec![!p];
        if self.decision_level() == 0 {
            return core;
        }
        self.seen[p.var() as usize - 1] = true;
        let start = self.trail_lim[0];
        for i in (start..self.trail.len()).rev() {
            let x = self.trail[i];
            let v = x.var() as usize - 1;
            if !self.seen[v] {
                continue;
            }
            match self.reason[v] {
                None => {
                    debug_assert!(self.level[v] > 0);
                    core.push(x);
                }
                Some(r) => {
                    let len = self.clauses[r as usize].lits.len();
                    for k in 1..len {
                        let q = self.clauses[r as usize].lits[k];
                        let qv = q.var() as usize - 1;
                        if self.level[qv] > 0 {
                            self.seen[qv] = true;
                        }
                    }
                }
            }
            self.seen[v] = false;
        }
        self.seen[p.var() as usize - 1] = false;
        core
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        let first = self
            .preferred
            .iter()
            .copied()
            .find(|&v| self.assigns[v as usize] == LBool::Undef);
        loop {
            let v = match first {
                Some(v) => v,
                None => self.heap.pop(&self.activity)?,
            };
            if self.assigns[v as usize] == LBool::Undef {
                self.stats.decisions += 1;
                let phase = match self.user_phase[v as usize] {
                    Some(p) => p,
                    None if self.phase_rng != 0 => {
                        let mut x = self.phase_rng;
                        x ^= x >> 12;
                        x ^= x << 25;
                        x ^= x >> 27;
                        self.phase_rng = x;
                        x.wrapping_mul(0x2545_F491_4F6C_DD1D) >> 63 == 1
                    }
                    None => self.saved_phase[v as usize],
                };
                let var = v + 1;
                return Some(if phase {
                    Lit::positive(var)
                } else {
                    Lit::negative(var)
                });
            }
        }
    }

    fn is_locked(&self, cref: ClauseRef) -> bool {
        let c = &self.clauses[cref as usize];
        let l0 = c.lits[0];
        let v = l0.var() as usize - 1;
        self.reason[v] == Some(cref) && self.lit_value(l0) == LBool::True
    }

    fn reduce_db(&mut self) {
        let mut learnts = std::mem::take(&mut self.learnts);
        learnts.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            (ca.lits.len() > 2, ca.activity)
                .partial_cmp(&(cb.lits.len() > 2, cb.activity))
                .unwrap()
                .reverse()
        });
        // most useful first; drop the lower half unless binary or locked
        let half = learnts.len() / 2;
        let mut kept = Vec::with_capacity(learnts.len());
        let mut removed = false;
        for (i, &cref) in learnts.iter().enumerate() {
            let c = &self.clauses[cref as usize];
            if i >= half && c.lits.len() > 2 && !self.is_locked(cref) {
                self.clauses[cref as usize].deleted = true;
                removed = true;
            } else {
                kept.push(cref);
            }
        }
        self.learnts = kept;
        if removed {
            for ws in &mut self.watches {
                ws.retain(|w| !self.clauses[w.cref as usize].deleted);
            }
            for (i, c) in self.clauses.iter_mut().enumerate() {
                if c.deleted && !c.lits.is_empty() {
                    c.lits = Vec::new();
                    self.free_slots.push(i as ClauseRef);
                }
            }
        }
    }

    /// CDCL search for at most `nof_conflicts` conflicts.
    fn search(&mut self, nof_conflicts: u64, assumptions: &[Lit]) -> Option<Result<(), Vec<Lit>>> {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(Err(Vec::new()));
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.unchecked_enqueue(learnt[0], None);
                } else {
                    let first = learnt[0];
                    let cref = self.alloc_clause(learnt, true);
                    self.attach(cref);
                    self.learnts.push(cref);
                    self.bump_clause(cref);
                    self.unchecked_enqueue(first, Some(cref));
                }
                self.var_inc /= VAR_DECAY;
                self.cla_inc /= CLAUSE_DECAY;
            } else {
                if conflicts >= nof_conflicts {
                    self.cancel_until(0);
                    return None;
                }
                if self.learnts.len() as f64 - self.trail.len() as f64 >= self.max_learnts {
                    self.reduce_db();
                }
                let mut next = None;
                while (self.decision_level() as usize) < assumptions.len() {
                    let p = assumptions[self.decision_level() as usize];
                    match self.lit_value(p) {
                        LBool::True => self.trail_lim.push(self.trail.len()),
                        LBool::False => return Some(Err(self.analyze_final(!p))),
                        LBool::Undef => {
                            next = Some(p);
                            break;
                        }
                    }
                }
                let decision = match next {
                    Some(p) => p,
                    None => match self.pick_branch() {
                        Some(p) => p,
                        None => return Some(Ok(())),
                    },
                };
                self.trail_lim.push(self.trail.len());
                self.unchecked_enqueue(decision, None);
            }
        }
    }

    /// Decides the clause database under `assumptions`.
    pub fn solve(&mut self, assumptions: &[Lit]) -> SatResult {
        self.stats.solves += 1;
        if let Some(max) = assumptions.iter().map(|l| l.var()).max() {
            self.ensure_vars(max);
        }
        if !self.ok {
            return SatResult::Unsat(Vec::new());
        }
        self.max_learnts = (self.problem_clauses as f64 / 3.0).max(2000.0);
        let mut curr_restarts = 0u64;
        let outcome = loop {
            let budget = (luby(RESTART_INC, curr_restarts) * RESTART_FIRST) as u64;
            match self.search(budget, assumptions) {
                Some(r) => break r,
                None => {
                    curr_restarts += 1;
                    self.stats.restarts += 1;
                    self.max_learnts *= 1.05;
                }
            }
        };
        let result = match outcome {
            Ok(()) => {
                let values = self.assigns.iter().map(|&a| a == LBool::True).collect();
                SatResult::Sat(Assignment::new(values))
            }
            Err(mut core) => {
                core.sort_unstable_by_key(|l| assumptions.iter().position(|a| a == l));
                core.dedup();
                SatResult::Unsat(core)
            }
        };
        self.cancel_until(0);
        result
    }
}
