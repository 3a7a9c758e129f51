/// Lower-triangular `L` with `L Lᵀ = a` for a positive semidefinite `a`; zero pivots give zero columns.
pub fn cholesky_psd(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    let scale = a.iter().enumerate().map(|(i, r)| r[i].abs()).fold(0.0, f64::max);
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if d <= 1e-14 * scale {
            continue;
        }
        let piv = d.sqrt();
        l[j][j] = piv;
        for i in j + 1..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / piv;
        }
    }
    l
}

pub fn lower_mul(l: &[Vec<f64>], z: &[f64]) -> Vec<f64> {
    l.iter().map(|row| row.iter().zip(z).map(|(a, b)| a * b).sum()).collect()
}

/// Solves the small dense complex system `m x = b` by Gaussian elimination with partial pivoting.
pub fn solve_complex(mut m: Vec<Vec<num_complex::Complex64>>, mut b: Vec<num_complex::Complex64>) -> Option<Vec<num_complex::Complex64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|x, y| m[*x][col].norm().total_cmp(&m[*y][col].norm()))?;
        if m[piv][col].norm() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                let v = m[col][c];
                m[r][c] -= f * v;
            }
            let v = b[col];
            b[r] -= f * v;
        }
    }
    let mut x = vec![num_complex::Complex64::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= m[r][c] * x[c];
        }
        x[r] = s / m[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_cholesky() {
        let a = vec![vec![4.0, 0.0, 2.0], vec![0.0, 0.0, 0.0], vec![2.0, 0.0, 2.0]];
        let l = cholesky_psd(&a);
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| l[i][k] * l[j][k]).sum();
                assert!((v - a[i][j]).abs() < 1e-14);
            }
        }
    }
}
