//! Exact linear solving over the rationals.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rat::{denominator_lcm, Rat};

/// Solve the square system `a x = b` exactly, or return `None` when the
/// matrix is singular. Denominators are cleared row by row and the integer
/// system is reduced by fraction-free (Bareiss) elimination, so intermediate
/// values stay integral and only the back substitution touches rationals.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    assert!(
        a.iter().all(|row| row.len() == n) && b.len() == n,
        "solve wants a square system"
    );
    if n == 0 {
        return Some(Vec::new());
    }

    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut refs: Vec<&Rat> = a[i].iter().collect();
        refs.push(&b[i]);
        let l = denominator_lcm(&refs);
        m.push(
            refs.iter()
                .map(|x| (x.numer() * &l) / x.denom())
                .collect(),
        );
    }

    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&r| !m[r][k].is_zero())?;
        m.swap(k, pivot);
        for i in k + 1..n {
            for j in k + 1..=n {
                let t = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }

    let mut x = vec![Rat::zero(); n];
    for i in (0..n).rev() {
        let mut s = Rat::from(m[i][n].clone());
        for j in i + 1..n {
            s -= Rat::from(m[i][j].clone()) * &x[j];
        }
        x[i] = s / Rat::from(m[i][i].clone());
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    #[test]
    fn solves_small_systems() {
        // x + y = 3, x - y = 1
        let a = vec![
            vec![rat_int(1), rat_int(1)],
            vec![rat_int(1), rat_int(-1)],
        ];
        let b = vec![rat_int(3), rat_int(1)];
        assert_eq!(solve(&a, &b).unwrap(), vec![rat_int(2), rat_int(1)]);

        // rational coefficients, needs a row swap
        let a = vec![
            vec![rat_int(0), rat(1, 2), rat_int(1)],
            vec![rat(1, 3), rat_int(0), rat_int(2)],
            vec![rat_int(1), rat_int(1), rat_int(1)],
        ];
        let b = vec![rat_int(2), rat(7, 3), rat_int(4)];
        let x = solve(&a, &b).unwrap();
        assert_eq!(x, vec![rat_int(1), rat_int(2), rat_int(1)]);
    }

    #[test]
    fn detects_singular_matrices() {
        let a = vec![
            vec![rat_int(1), rat_int(2)],
            vec![rat_int(2), rat_int(4)],
        ];
        let b = vec![rat_int(1), rat_int(2)];
        assert!(solve(&a, &b).is_none());
    }

    #[test]
    fn empty_system() {
        assert_eq!(solve(&[], &[]).unwrap(), Vec::<Rat>::new());
    }
}
