//! Dense two-phase simplex method with Bland's anti-cycling rule.

use super::Vector;
use crate::error::{GeomError, Result};

const PIVOT_TOL: f64 = 1e-10;
const FEASIBILITY_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 50_000;

/// `maximize <objective, x>` subject to equality rows, `<=` rows, and
/// `x_j >= 0` for every variable not marked free.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    eq_rows: Vec<(Vec<f64>, f64)>,
    le_rows: Vec<(Vec<f64>, f64)>,
    free: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vector,
}

impl LinearProgram {
    /// A maximization problem over nonnegative variables.
    pub fn maximize(objective: &[f64]) -> Self {
        LinearProgram {
            objective: objective.to_vec(),
            eq_rows: Vec::new(),
            le_rows: Vec::new(),
            free: vec![false; objective.len()],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn eq(mut self, row: &[f64], rhs: f64) -> Self {
        self.eq_rows.push((row.to_vec(), rhs));
        self
    }

    pub fn le(mut self, row: &[f64], rhs: f64) -> Self {
        self.le_rows.push((row.to_vec(), rhs));
        self
    }

    /// Lift the sign constraint on variable `j`.
    pub fn free(mut self, j: usize) -> Self {
        self.free[j] = true;
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.objective) {
            return Err(GeomError::InvalidInput("non-finite objective".into()));
        }
        for (row, rhs) in self.eq_rows.iter().chain(&self.le_rows) {
            if row.len() != n {
                return Err(GeomError::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            if !finite(row) || !rhs.is_finite() {
                return Err(GeomError::InvalidInput("non-finite constraint".into()));
            }
        }
        Ok(())
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>, // each row: coefficients followed by rhs
    obj: Vec<f64>,       // reduced costs followed by -value
    basis: Vec<usize>,
    width: usize, // number of columns excluding rhs
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width]
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let piv = self.rows[p][q];
        for v in self.rows[p].iter_mut() {
            *v /= piv;
        }
        let prow = self.rows[p].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == p {
                continue;
            }
            let f = row[q];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                row[q] = 0.0;
            }
        }
        let f = self.obj[q];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            self.obj[q] = 0.0;
        }
        self.basis[p] = q;
    }

    /// Load `costs` as the objective and price out the current basis.
    fn set_objective(&mut self, costs: &[f64]) {
        self.obj = costs.to_vec();
        self.obj.push(0.0);
        for i in 0..self.rows.len() {
            let cb = costs[self.basis[i]];
            if cb != 0.0 {
                for (v, rv) in self.obj.iter_mut().zip(&self.rows[i]) {
                    *v -= cb * rv;
                }
            }
        }
    }

    /// Bland-rule simplex iterations restricted to columns `< allowed`.
    fn optimize(&mut self, allowed: usize) -> Result<()> {
        for _ in 0..MAX_PIVOTS {
            let Some(q) = (0..allowed).find(|&j| self.obj[j] > PIVOT_TOL) else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][q];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-12
                                || (ratio <= br + 1e-12 && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((p, _)) = best else {
                return Err(GeomError::Unbounded);
            };
            self.pivot(p, q);
        }
        Err(GeomError::Internal("simplex pivot limit reached".into()))
    }
}

/// Solve a linear program. Returns the optimal value and a vertex optimizer.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars();

    // Column layout: one column per nonnegative var, two (+/-) per free var,
    // then one slack per <= row, then one artificial per row.
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    let mut width = 0;
    for j in 0..n {
        if lp.free[j] {
            col_of.push((width, Some(width + 1)));
            width += 2;
        } else {
            col_of.push((width, None));
            width += 1;
        }
    }
    let structural = width;
    let m = lp.eq_rows.len() + lp.le_rows.len();
    let slack_start = width;
    width += lp.le_rows.len();
    let art_start = width;
    width += m;

    let mut rows = Vec::with_capacity(m);
    let all = lp
        .eq_rows
        .iter()
        .map(|r| (r, None))
        .chain(lp.le_rows.iter().enumerate().map(|(k, r)| (r, Some(k))));
    for (i, ((coef, rhs), slack)) in all.enumerate() {
        let mut row = vec![0.0; width + 1];
        for j in 0..n {
            let (plus, minus) = col_of[j];
            row[plus] = coef[j];
            if let Some(mi) = minus {
                row[mi] = -coef[j];
            }
        }
        if let Some(k) = slack {
            row[slack_start + k] = 1.0;
        }
        row[width] = *rhs;
        if *rhs < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
        row[art_start + i] = 1.0;
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        obj: Vec::new(),
        basis: (art_start..art_start + m).collect(),
        width,
    };

    // Phase I: maximize -(sum of artificials).
    let mut phase1 = vec![0.0; width];
    for c in phase1.iter_mut().skip(art_start) {
        *c = -1.0;
    }
    tab.set_objective(&phase1);
    tab.optimize(width)?;
    let infeasibility = tab.obj[width]; // = -(phase-one value) = sum of artificials
    let scale = 1.0
        + lp.eq_rows
            .iter()
            .chain(&lp.le_rows)
            .map(|r| r.1.abs())
            .fold(0.0, f64::max);
    if infeasibility > FEASIBILITY_TOL * scale {
        return Err(GeomError::Infeasible);
    }

    // Drive remaining artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= art_start {
            match (0..art_start).find(|&j| tab.rows[i][j].abs() > PIVOT_TOL) {
                Some(q) => {
                    tab.pivot(i, q);
                    i += 1;
                }
                None => {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    // Phase II on the original objective; artificial columns never re-enter.
    let mut costs = vec![0.0; width];
    for j in 0..n {
        let (plus, minus) = col_of[j];
        costs[plus] = lp.objective[j];
        if let Some(mi) = minus {
            costs[mi] = -lp.objective[j];
        }
    }
    tab.set_objective(&costs);
    tab.optimize(art_start)?;

    let mut values = vec![0.0; structural];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < structural {
            values[b] = tab.rhs(i);
        }
    }
    let x = Vector::from_fn(n, |j, _| {
        let (plus, minus) = col_of[j];
        values[plus] - minus.map_or(0.0, |mi| values[mi])
    });
    let value = lp.objective.iter().zip(x.iter()).map(|(c, v)| c * v).sum();
    Ok(LpSolution { value, x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn box_constraint() {
        let lp = LinearProgram::maximize(&[1.0]).le(&[1.0], 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.value, 1.0);
        assert_eq!(sol.x[0], 1.0);
    }

    #[test]
    fn tie_on_standard_simplex() {
        let lp = LinearProgram::maximize(&[1.0, 1.0]).eq(&[1.0, 1.0], 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-12);
        // Bland's rule: the first basis found in phase one is kept (x1 = 1).
        assert_eq!(sol.x.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn infeasible_is_reported() {
        let lp = LinearProgram::maximize(&[1.0]).le(&[1.0], -1.0);
        assert!(matches!(solve_lp(&lp), Err(GeomError::Infeasible)));
    }

    #[test]
    fn unbounded_is_reported() {
        let lp = LinearProgram::maximize(&[1.0, 0.0]).le(&[-1.0, 1.0], 1.0);
        assert!(matches!(solve_lp(&lp), Err(GeomError::Unbounded)));
    }

    #[test]
    fn free_variable_goes_negative() {
        // maximize -x with x free, x >= -3  (i.e. -x <= 3)
        let lp = LinearProgram::maximize(&[-1.0]).le(&[-1.0], 3.0).free(0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.x[0] + 3.0).abs() < 1e-12);
        assert!((sol.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example; Bland's rule must terminate.
        let lp = LinearProgram::maximize(&[0.75, -150.0, 0.02, -6.0])
            .le(&[0.25, -60.0, -0.04, 9.0], 0.0)
            .le(&[0.5, -90.0, -0.02, 3.0], 0.0)
            .le(&[0.0, 0.0, 1.0, 0.0], 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.value - 0.05).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch() {
        let lp = LinearProgram::maximize(&[1.0, 1.0]).le(&[1.0], 1.0);
        assert!(matches!(
            solve_lp(&lp),
            Err(GeomError::DimensionMismatch { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Primal max c.x, Ax <= b, x >= 0 against the explicitly built dual
        /// min b.y, A^T y >= c, y >= 0.
        #[test]
        fn strong_duality(
            m in 2usize..6,
            n in 2usize..6,
            seed in prop::collection::vec(0.05f64..1.0, 36),
            cs in prop::collection::vec(-1.0f64..1.0, 6),
            bs in prop::collection::vec(0.1f64..2.0, 6),
        ) {
            let a = |i: usize, j: usize| seed[i * 6 + j];
            let mut primal = LinearProgram::maximize(&cs[..n]);
            for i in 0..m {
                let row: Vec<f64> = (0..n).map(|j| a(i, j)).collect();
                primal = primal.le(&row, bs[i]);
            }
            let neg_b: Vec<f64> = bs[..m].iter().map(|b| -b).collect();
            let mut dual = LinearProgram::maximize(&neg_b);
            for j in 0..n {
                let row: Vec<f64> = (0..m).map(|i| -a(i, j)).collect();
                dual = dual.le(&row, -cs[j]);
            }
            let p = solve_lp(&primal).unwrap();
            let d = solve_lp(&dual).unwrap();
            prop_assert!((p.value + d.value).abs() < 1e-9, "{} vs {}", p.value, -d.value);
        }
    }
}
