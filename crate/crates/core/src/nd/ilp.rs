//! Small exact integer feasibility: bounded variables, linear rows, bound
//! propagation, and branching with independent components solved apart.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::error::SolveError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub terms: Vec<(usize, i64)>,
    pub cmp: Cmp,
    pub rhs: i64,
    pub tag: &'static str,
    /// Node (or child end of the edge) the row was generated for.
    pub origin: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IlpSystem {
    pub names: Vec<String>,
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
    /// Branching priority; the solver branches on the lowest class first.
    pub priority: Vec<u32>,
    pub constraints: Vec<Constraint>,
}

impl IlpSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: i64, upper: i64) -> usize {
        self.names.push(name.into());
        self.lower.push(lower);
        self.upper.push(upper);
        self.priority.push(0);
        self.names.len() - 1
    }

    pub fn add(
        &mut self,
        terms: Vec<(usize, i64)>,
        cmp: Cmp,
        rhs: i64,
        tag: &'static str,
        origin: usize,
    ) {
        self.constraints.push(Constraint {
            terms,
            cmp,
            rhs,
            tag,
            origin,
        });
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn count_tag(&self, tag: &str) -> usize {
        self.constraints.iter().filter(|c| c.tag == tag).count()
    }

    pub fn is_satisfied(&self, x: &[i64]) -> bool {
        x.len() == self.num_vars()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
            && self.constraints.iter().all(|c| {
                let lhs: i64 = c.terms.iter().map(|&(j, a)| a * x[j]).sum();
                match c.cmp {
                    Cmp::Le => lhs <= c.rhs,
                    Cmp::Eq => lhs == c.rhs,
                    Cmp::Ge => lhs >= c.rhs,
                }
            })
    }
}

pub fn ilp_feasible(sys: &IlpSystem) -> Result<bool, SolveError> {
    ilp_feasible_with(sys, super::DEFAULT_ILP_BUDGET)
}

pub fn ilp_feasible_with(sys: &IlpSystem, budget: u64) -> Result<bool, SolveError> {
    Ok(ilp_solve_with(sys, budget)?.is_some())
}

/// A feasible assignment, if any. Errors once the solver's work exceeds
/// `budget`; work counts search nodes, scanned variables and row
/// evaluations, so the budget caps both time and memory.
pub fn ilp_solve_with(sys: &IlpSystem, budget: u64) -> Result<Option<Vec<i64>>, SolveError> {
    let solver = Solver::new(sys, budget);
    let mut b = Bounds {
        lo: sys.lower.clone(),
        hi: sys.upper.clone(),
        trail: Vec::new(),
    };
    if b.lo.iter().zip(&b.hi).any(|(l, h)| l > h) {
        return Ok(None);
    }
    let mut work = 0;
    let all_rows: Vec<usize> = (0..solver.rows.len()).collect();
    if !solver.propagate(&mut b, &all_rows, &mut work)? {
        return Ok(None);
    }
    let scope: Vec<usize> = (0..sys.num_vars()).collect();
    let out = solver.search(&mut b, &scope, &mut work)?.then_some(b.lo);
    debug_assert!(out.as_ref().is_none_or(|x| sys.is_satisfied(x)));
    Ok(out)
}

/// `sum terms <= rhs`
struct Row {
    terms: Vec<(usize, i64)>,
    rhs: i64,
}

struct Solver {
    rows: Vec<Row>,
    occurs: Vec<Vec<usize>>,
    priority: Vec<u32>,
    budget: u64,
}

fn floor_div(n: i64, d: i64) -> i64 {
    let q = n / d;
    if n % d != 0 && ((n < 0) != (d < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(n: i64, d: i64) -> i64 {
    let q = n / d;
    if n % d != 0 && ((n < 0) == (d < 0)) {
        q + 1
    } else {
        q
    }
}

impl Solver {
    fn charge(&self, work: &mut u64, amount: usize) -> Result<(), SolveError> {
        *work += amount as u64;
        if *work > self.budget {
            return Err(SolveError::BudgetExceeded {
                stage: "ilp",
                estimate: *work as u128,
                budget: self.budget as u128,
            });
        }
        Ok(())
    }

    fn new(sys: &IlpSystem, budget: u64) -> Self {
        let mut rows = Vec::new();
        for c in &sys.constraints {
            let neg = || c.terms.iter().map(|&(j, a)| (j, -a)).collect();
            match c.cmp {
                Cmp::Le => rows.push(Row {
                    terms: c.terms.clone(),
                    rhs: c.rhs,
                }),
                Cmp::Ge => rows.push(Row {
                    terms: neg(),
                    rhs: -c.rhs,
                }),
                Cmp::Eq => {
                    rows.push(Row {
                        terms: c.terms.clone(),
                        rhs: c.rhs,
                    });
                    rows.push(Row {
                        terms: neg(),
                        rhs: -c.rhs,
                    });
                }
            }
        }
        let mut occurs = vec![Vec::new(); sys.num_vars()];
        for (r, row) in rows.iter().enumerate() {
            for &(j, _) in &row.terms {
                if occurs[j].last() != Some(&r) {
                    occurs[j].push(r);
                }
            }
        }
        Solver {
            rows,
            occurs,
            priority: sys.priority.clone(),
            budget,
        }
    }

    /// Tightens bounds to a fixpoint, logging every change on `trail`;
    /// false on an empty domain.
    fn propagate(
        &self,
        b: &mut Bounds,
        seed: &[usize],
        work: &mut u64,
    ) -> Result<bool, SolveError> {
        let mut queued = HashSet::new();
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &r in seed {
            if queued.insert(r) {
                queue.push_back(r);
            }
        }
        while let Some(r) = queue.pop_front() {
            queued.remove(&r);
            let row = &self.rows[r];
            self.charge(work, row.terms.len())?;
            let mins: Vec<i64> = row
                .terms
                .iter()
                .map(|&(j, a)| if a > 0 { a * b.lo[j] } else { a * b.hi[j] })
                .collect();
            let minsum: i64 = mins.iter().sum();
            if minsum > row.rhs {
                return Ok(false);
            }
            for (&(j, a), &own) in row.terms.iter().zip(&mins) {
                let room = row.rhs - (minsum - own);
                let (lo, hi) = if a > 0 {
                    (b.lo[j], b.hi[j].min(floor_div(room, a)))
                } else if a < 0 {
                    (b.lo[j].max(ceil_div(room, a)), b.hi[j])
                } else {
                    continue;
                };
                if (lo, hi) == (b.lo[j], b.hi[j]) {
                    continue;
                }
                if lo > hi {
                    return Ok(false);
                }
                b.set(j, lo, hi);
                for &r2 in &self.occurs[j] {
                    if queued.insert(r2) {
                        queue.push_back(r2);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Connected components of the free variables, linked through rows.
    fn components(
        &self,
        free: &[usize],
        b: &Bounds,
        work: &mut u64,
    ) -> Result<Vec<Vec<usize>>, SolveError> {
        let local: HashMap<usize, usize> = free.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..free.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut seen_row = HashSet::new();
        for &v in free {
            for &r in &self.occurs[v] {
                if !seen_row.insert(r) {
                    continue;
                }
                self.charge(work, self.rows[r].terms.len())?;
                let mut first = None;
                for &(j, _) in &self.rows[r].terms {
                    if b.lo[j] < b.hi[j] {
                        let j = local[&j];
                        match first {
                            None => first = Some(j),
                            Some(f) => {
                                let (x, y) = (find(&mut parent, f), find(&mut parent, j));
                                parent[x] = y;
                            }
                        }
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &v) in free.iter().enumerate() {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(v);
        }
        Ok(groups.into_values().collect())
    }

    /// True with every variable of `scope` fixed in `b`, or false with
    /// `b` as it was on entry.
    fn search(&self, b: &mut Bounds, scope: &[usize], work: &mut u64) -> Result<bool, SolveError> {
        self.charge(work, 1 + scope.len())?;
        let free: Vec<usize> = scope
            .iter()
            .copied()
            .filter(|&v| b.lo[v] < b.hi[v])
            .collect();
        if free.is_empty() {
            return Ok(true);
        }
        let mut comps = self.components(&free, b, work)?;
        if comps.len() > 1 {
            // small components are cheap to refute, and one failure decides
            comps.sort_by_key(|c| c.len());
            let mark = b.trail.len();
            for comp in &comps {
                if !self.search(b, comp, work)? {
                    b.undo(mark);
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        let comp = &comps[0];
        let var = *comp
            .iter()
            .min_by_key(|&&v| (self.priority[v], std::cmp::Reverse(self.occurs[v].len()), v))
            .unwrap();
        for value in b.lo[var]..=b.hi[var] {
            let mark = b.trail.len();
            b.set(var, value, value);
            if self.propagate(b, &self.occurs[var], work)? && self.search(b, comp, work)? {
                return Ok(true);
            }
            b.undo(mark);
        }
        Ok(false)
    }
}

/// Variable bounds with an undo log.
struct Bounds {
    lo: Vec<i64>,
    hi: Vec<i64>,
    trail: Vec<(usize, i64, i64)>,
}

impl Bounds {
    fn set(&mut self, j: usize, lo: i64, hi: i64) {
        self.trail.push((j, self.lo[j], self.hi[j]));
        self.lo[j] = lo;
        self.hi[j] = hi;
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (j, lo, hi) = self.trail.pop().unwrap();
            self.lo[j] = lo;
            self.hi[j] = hi;
        }
    }
}
