use num_traits::{One, Zero};

use super::rational::Rational;
use super::system::LinearSystem;
use crate::error::Result;

/// Brute-force vertex enumeration: every choice of `variable_count` rows
/// (explicit, implicit unit-sum, and nonnegativity bounds) whose equality
/// version has a unique solution that satisfies the whole system.
///
/// Exponential in the row count; intended for the handful of unknowns in
/// segment analysis. Regions without vertices (for instance lines of free
/// variables) yield an empty list.
pub fn enumerate_vertices(system: &LinearSystem) -> Result<Vec<Vec<Rational>>> {
    system.validate()?;
    let n = system.variable_count;
    let mut rows: Vec<(Vec<Rational>, Rational)> =
        system.all_constraints().into_iter().map(|c| (c.coefficients, c.rhs)).collect();
    if system.nonneg {
        for i in 0..n {
            let mut unit = vec![Rational::zero(); n];
            unit[i] = Rational::one();
            rows.push((unit, Rational::zero()));
        }
    }
    let mut vertices: Vec<Vec<Rational>> = Vec::new();
    let mut chosen = Vec::with_capacity(n);
    choose(rows.len(), n, 0, &mut chosen, &mut |subset| {
        let a: Vec<Vec<Rational>> = subset.iter().map(|&i| rows[i].0.clone()).collect();
        let b: Vec<Rational> = subset.iter().map(|&i| rows[i].1.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if system.is_satisfied_by(&x) && !vertices.contains(&x) {
                vertices.push(x);
            }
        }
    });
    Ok(vertices)
}

fn choose(total: usize, k: usize, start: usize, chosen: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if chosen.len() == k {
        visit(chosen);
        return;
    }
    for i in start..total {
        if total - i < k - chosen.len() {
            break;
        }
        chosen.push(i);
        choose(total, k, i + 1, chosen, visit);
        chosen.pop();
    }
}

/// Gauss-Jordan elimination; `None` when the matrix is singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        b[col] /= &p;
        let pivot_row = a[col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for (x, pv) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= &factor * pv;
            }
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }
    Some(b)
}
