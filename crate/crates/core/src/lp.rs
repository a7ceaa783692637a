//! Dense two-phase simplex for the small feasibility problems in [`crate::split`].
//!
//! Maximizes `c·x` subject to linear constraints and `x ≥ 0`. Bland's rule is
//! used throughout, so the method terminates on degenerate problems; sizes here
//! are a few dozen rows, so the extra iterations do not matter.

use thiserror::Error;

const EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("linear program is infeasible (phase-one residual {0:.3e})")]
    Infeasible(f64),
    #[error("linear program is unbounded")]
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

/// `maximize objective·x  s.t.  constraints, x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self { num_vars, objective: vec![0.0; num_vars], constraints: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn maximize(mut self, objective: Vec<f64>) -> Self {
        assert_eq!(objective.len(), self.num_vars);
        self.objective = objective;
        self
    }

    pub fn set_objective(&mut self, objective: Vec<f64>) {
        assert_eq!(objective.len(), self.num_vars);
        self.objective = objective;
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        Tableau::build(self).run(&self.objective, self.num_vars)
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    num_cols: usize,
    first_artificial: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars;
        let m = lp.constraints.len();
        let normalized: Vec<(Vec<f64>, Relation, f64)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs < 0.0 {
                    let flipped = match c.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (c.coeffs.iter().map(|a| -a).collect(), flipped, -c.rhs)
                } else {
                    (c.coeffs.clone(), c.relation, c.rhs)
                }
            })
            .collect();
        let num_slack = normalized.iter().filter(|c| c.1 != Relation::Eq).count();
        let num_art = normalized.iter().filter(|c| c.1 != Relation::Le).count();
        let first_artificial = n + num_slack;
        let num_cols = first_artificial + num_art;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut slack, mut art) = (n, first_artificial);
        for (coeffs, rel, rhs) in normalized {
            let mut row = vec![0.0; num_cols + 1];
            row[..n].copy_from_slice(&coeffs);
            row[num_cols] = rhs;
            match rel {
                Relation::Le => {
                    row[slack] = 1.0;
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -1.0;
                    slack += 1;
                    row[art] = 1.0;
                    basis.push(art);
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = 1.0;
                    basis.push(art);
                    art += 1;
                }
            }
            rows.push(row);
        }
        Self { rows, basis, num_cols, first_artificial }
    }

    fn run(mut self, objective: &[f64], n: usize) -> Result<LpSolution, LpError> {
        if self.first_artificial < self.num_cols {
            // phase one: maximize −Σ artificials
            let mut cost = vec![0.0; self.num_cols];
            for c in &mut cost[self.first_artificial..] {
                *c = -1.0;
            }
            let mut obj = self.reduced_costs(&cost);
            self.iterate(&mut obj, self.num_cols)?;
            let residual = -obj[self.num_cols];
            if residual > 1e-9 {
                return Err(LpError::Infeasible(residual));
            }
            self.evict_artificials();
        }
        let mut cost = vec![0.0; self.num_cols];
        cost[..n].copy_from_slice(objective);
        let mut obj = self.reduced_costs(&cost);
        self.iterate(&mut obj, self.first_artificial)?;

        let mut x = vec![0.0; n];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < n {
                x[b] = row[self.num_cols].max(0.0);
            }
        }
        let objective = x.iter().zip(objective).map(|(a, c)| a * c).sum();
        Ok(LpSolution { x, objective })
    }

    /// Objective row `c_B B⁻¹ A − c` with the value in the last slot.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut obj: Vec<f64> = cost.iter().map(|c| -c).collect();
        obj.push(0.0);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let f = obj[b];
            if f != 0.0 {
                for (o, r) in obj.iter_mut().zip(row) {
                    *o -= f * r;
                }
            }
        }
        obj
    }

    fn iterate(&mut self, obj: &mut [f64], usable_cols: usize) -> Result<(), LpError> {
        loop {
            let Some(enter) = (0..usable_cols).find(|&j| obj[j] < -EPS) else {
                return Ok(());
            };
            let rhs = self.num_cols;
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[enter] > EPS {
                    let ratio = row[rhs] / row[enter];
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < best - EPS
                                || (ratio <= best + EPS && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((leave, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(leave, enter, obj);
        }
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [f64]) {
        let p = self.rows[r][c];
        for v in &mut self.rows[r] {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let f = obj[c];
        if f != 0.0 {
            for (o, pv) in obj.iter_mut().zip(&pivot_row) {
                *o -= f * pv;
            }
        }
        self.basis[r] = c;
    }

    /// Pivots zero-level artificials out of the basis; rows with no usable
    /// column are redundant and dropped.
    fn evict_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.first_artificial {
                let col = (0..self.first_artificial).find(|&j| self.rows[i][j].abs() > 1e-9);
                match col {
                    Some(j) => {
                        let mut dummy = vec![0.0; self.num_cols + 1];
                        self.pivot(i, j, &mut dummy);
                    }
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    /// Independent oracle: best objective over all basic solutions obtained by
    /// making `n` constraints (including `x ≥ 0` and every equality) tight.
    fn brute_force(lp: &LinearProgram) -> Option<f64> {
        let n = lp.num_vars;
        let mut rows: Vec<(Vec<f64>, Relation, f64)> =
            lp.constraints.iter().map(|c| (c.coeffs.clone(), c.relation, c.rhs)).collect();
        for j in 0..n {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            rows.push((a, Relation::Ge, 0.0));
        }
        let eqs: Vec<usize> =
            (0..rows.len()).filter(|&i| rows[i].1 == Relation::Eq).collect();
        let mut best: Option<f64> = None;
        let m = rows.len();
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize != n || eqs.iter().any(|&e| mask >> e & 1 == 0) {
                continue;
            }
            let picked: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
            let Some(x) = gauss(&picked.iter().map(|&i| rows[i].0.clone()).collect::<Vec<_>>(),
                                &picked.iter().map(|&i| rows[i].2).collect::<Vec<_>>()) else { continue };
            let ok = rows.iter().all(|(a, rel, b)| {
                let v: f64 = a.iter().zip(&x).map(|(p, q)| p * q).sum();
                match rel {
                    Relation::Le => v <= b + 1e-9,
                    Relation::Ge => v >= b - 1e-9,
                    Relation::Eq => (v - b).abs() <= 1e-9,
                }
            });
            if ok {
                let val: f64 = x.iter().zip(&lp.objective).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(val, |b: f64| b.max(val)));
            }
        }
        best
    }

    fn gauss(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
        let n = b.len();
        let mut m: Vec<Vec<f64>> =
            a.iter().zip(b).map(|(r, &v)| { let mut r = r.clone(); r.push(v); r }).collect();
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
            if m[p][c].abs() < 1e-9 {
                return None;
            }
            m.swap(c, p);
            for r in 0..n {
                if r != c {
                    let f = m[r][c] / m[c][c];
                    for k in c..=n {
                        m[r][k] -= f * m[c][k];
                    }
                }
            }
        }
        Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
    }

    fn random_lp() -> impl Strategy<Value = LinearProgram> {
        (
            prop::collection::vec(-5i32..=5, 3),
            prop::collection::vec((prop::collection::vec(-4i32..=4, 3), 0u8..3, -6i32..=10), 1..5),
        )
            .prop_map(|(c, cons)| {
                let mut lp = LinearProgram::new(3).maximize(c.iter().map(|&v| v as f64).collect());
                for (a, rel, b) in cons {
                    let rel = match rel {
                        0 => Relation::Le,
                        1 => Relation::Ge,
                        _ => Relation::Eq,
                    };
                    lp.add(a.iter().map(|&v| v as f64).collect(), rel, b as f64);
                }
                for j in 0..3 {
                    let mut a = vec![0.0; 3];
                    a[j] = 1.0;
                    lp.add(a, Relation::Le, 10.0);
                }
                lp
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn simplex_matches_vertex_enumeration(lp in random_lp()) {
            match (lp.solve(), brute_force(&lp)) {
                (Ok(s), Some(best)) => {
                    prop_assert!((s.objective - best).abs() < 1e-7, "{} vs {}", s.objective, best);
                    for c in lp.constraints() {
                        let v: f64 = c.coeffs.iter().zip(&s.x).map(|(p, q)| p * q).sum();
                        match c.relation {
                            Relation::Le => prop_assert!(v <= c.rhs + 1e-7),
                            Relation::Ge => prop_assert!(v >= c.rhs - 1e-7),
                            Relation::Eq => prop_assert!((v - c.rhs).abs() <= 1e-7),
                        }
                    }
                }
                (Err(LpError::Infeasible(_)), None) => {}
                (got, want) => prop_assert!(false, "simplex {:?} vs oracle {:?}", got, want),
            }
        }
    }
}
