//! Sparse LU factorisation of the simplex basis with product-form updates.
//!
//! The factorisation is left-looking: every basis column is solved against
//! the partial `L` (sparse triangular solve over the reach of its pattern)
//! and a pivot row is picked with threshold partial pivoting, preferring
//! short rows. Basis changes between refactorisations are appended as eta
//! columns.

const NONE: usize = usize::MAX;
const PIVOT_THRESHOLD: f64 = 0.1;
const SINGULAR_TOL: f64 = 1e-11;
const DROP_TOL: f64 = 1e-14;

/// Result of a factorisation that hit structurally or numerically singular columns.
#[derive(Debug, Clone)]
pub(crate) struct Singular {
    /// Basis positions whose column could not be pivoted.
    pub positions: Vec<usize>,
    /// Rows left without a pivot, in ascending order.
    pub rows: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Factor {
    m: usize,
    prow: Vec<usize>,
    pcol: Vec<usize>,
    l_start: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
    u_start: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<f64>,
    u_diag: Vec<f64>,
    eta_pos: Vec<usize>,
    eta_pivot: Vec<f64>,
    eta_start: Vec<usize>,
    eta_idx: Vec<usize>,
    eta_val: Vec<f64>,
}

impl Factor {
    /// Factorises the `m x m` matrix whose column at position `p` is produced by `column(p, buf)`.
    pub fn new<F>(m: usize, column: F) -> Result<Factor, Singular>
    where
        F: Fn(usize, &mut Vec<(usize, f64)>),
    {
        let mut cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
        let mut row_count = vec![0usize; m];
        for p in 0..m {
            let mut buf = Vec::new();
            column(p, &mut buf);
            for &(r, _) in &buf {
                row_count[r] += 1;
            }
            cols.push(buf);
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&p| (cols[p].len(), p));

        let mut f = Factor {
            m,
            prow: Vec::with_capacity(m),
            pcol: Vec::with_capacity(m),
            l_start: vec![0],
            u_start: vec![0],
            eta_start: vec![0],
            ..Default::default()
        };

        let mut pinv = vec![NONE; m];
        let mut x = vec![0.0f64; m];
        let mut mark = vec![false; m];
        let mut touched: Vec<usize> = Vec::new();
        let mut visited = vec![0u32; m];
        let mut stamp = 0u32;
        let mut topo: Vec<usize> = Vec::new();
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let mut deficient = Vec::new();

        for &pos in &order {
            stamp += 1;
            touched.clear();
            topo.clear();
            for &(r, v) in &cols[pos] {
                x[r] += v;
                if !mark[r] {
                    mark[r] = true;
                    touched.push(r);
                }
            }
            // Depth-first reach through pivoted rows gives a topological order.
            let seeds: Vec<usize> = touched.iter().copied().filter(|&r| pinv[r] != NONE).collect();
            for r in seeds {
                let k0 = pinv[r];
                if visited[k0] == stamp {
                    continue;
                }
                visited[k0] = stamp;
                stack.push((k0, f.l_start[k0]));
                while let Some(&mut (k, ref mut ptr)) = stack.last_mut() {
                    let end = f.l_start[k + 1];
                    let mut descended = false;
                    while *ptr < end {
                        let r = f.l_idx[*ptr];
                        *ptr += 1;
                        if !mark[r] {
                            mark[r] = true;
                            touched.push(r);
                        }
                        let kk = pinv[r];
                        if kk != NONE && visited[kk] != stamp {
                            visited[kk] = stamp;
                            stack.push((kk, f.l_start[kk]));
                            descended = true;
                            break;
                        }
                    }
                    if !descended {
                        topo.push(k);
                        stack.pop();
                    }
                }
            }
            for &k in topo.iter().rev() {
                let v = x[f.prow[k]];
                if v != 0.0 {
                    for idx in f.l_start[k]..f.l_start[k + 1] {
                        x[f.l_idx[idx]] -= f.l_val[idx] * v;
                    }
                }
            }

            let mut maxabs = 0.0f64;
            for &r in &touched {
                if pinv[r] == NONE {
                    maxabs = maxabs.max(x[r].abs());
                }
            }
            if maxabs <= SINGULAR_TOL {
                deficient.push(pos);
            } else {
                let mut best = NONE;
                for &r in &touched {
                    if pinv[r] == NONE && x[r].abs() >= PIVOT_THRESHOLD * maxabs {
                        let better = best == NONE
                            || row_count[r] < row_count[best]
                            || (row_count[r] == row_count[best] && r < best);
                        if better {
                            best = r;
                        }
                    }
                }
                let k = f.prow.len();
                let piv = x[best];
                for &kk in topo.iter().rev() {
                    let v = x[f.prow[kk]];
                    if v.abs() > DROP_TOL {
                        f.u_idx.push(kk);
                        f.u_val.push(v);
                    }
                }
                f.u_start.push(f.u_idx.len());
                f.u_diag.push(piv);
                for &r in &touched {
                    if pinv[r] == NONE && r != best && x[r].abs() > DROP_TOL {
                        f.l_idx.push(r);
                        f.l_val.push(x[r] / piv);
                    }
                }
                f.l_start.push(f.l_idx.len());
                f.prow.push(best);
                f.pcol.push(pos);
                pinv[best] = k;
            }
            for &r in &touched {
                x[r] = 0.0;
                mark[r] = false;
            }
        }

        if deficient.is_empty() {
            Ok(f)
        } else {
            deficient.sort_unstable();
            let rows = (0..m).filter(|&r| pinv[r] == NONE).collect();
            Err(Singular { positions: deficient, rows })
        }
    }

    pub fn num_etas(&self) -> usize {
        self.eta_pos.len()
    }

    /// Solves `B y = a`. `rhs` is indexed by row and is destroyed; `out` is indexed by basis position.
    pub fn ftran(&self, rhs: &mut [f64], out: &mut [f64]) {
        let m = self.m;
        for k in 0..m {
            let v = rhs[self.prow[k]];
            if v != 0.0 {
                for idx in self.l_start[k]..self.l_start[k + 1] {
                    rhs[self.l_idx[idx]] -= self.l_val[idx] * v;
                }
            }
        }
        // z_k lives in rhs[prow[k]] from here on.
        for k in (0..m).rev() {
            let z = rhs[self.prow[k]];
            let y = if z != 0.0 { z / self.u_diag[k] } else { 0.0 };
            out[self.pcol[k]] = y;
            if y != 0.0 {
                for idx in self.u_start[k]..self.u_start[k + 1] {
                    rhs[self.prow[self.u_idx[idx]]] -= self.u_val[idx] * y;
                }
            }
        }
        for e in 0..self.eta_pos.len() {
            let r = self.eta_pos[e];
            let v = out[r];
            if v != 0.0 {
                out[r] = v * self.eta_pivot[e];
                for idx in self.eta_start[e]..self.eta_start[e + 1] {
                    out[self.eta_idx[idx]] += self.eta_val[idx] * v;
                }
            }
        }
    }

    /// Solves `B^T y = c`. `rhs` is indexed by basis position and is destroyed; `out` is indexed by row.
    pub fn btran(&self, rhs: &mut [f64], out: &mut [f64]) {
        let m = self.m;
        for e in (0..self.eta_pos.len()).rev() {
            let r = self.eta_pos[e];
            let mut s = self.eta_pivot[e] * rhs[r];
            for idx in self.eta_start[e]..self.eta_start[e + 1] {
                s += self.eta_val[idx] * rhs[self.eta_idx[idx]];
            }
            rhs[r] = s;
        }
        // U^T z = rhs(permuted); z stored in rhs[pcol[k]].
        for k in 0..m {
            let mut s = rhs[self.pcol[k]];
            for idx in self.u_start[k]..self.u_start[k + 1] {
                s -= self.u_val[idx] * rhs[self.pcol[self.u_idx[idx]]];
            }
            rhs[self.pcol[k]] = s / self.u_diag[k];
        }
        for k in (0..m).rev() {
            let mut s = rhs[self.pcol[k]];
            for idx in self.l_start[k]..self.l_start[k + 1] {
                s -= self.l_val[idx] * out[self.l_idx[idx]];
            }
            out[self.prow[k]] = s;
        }
    }

    /// Records the replacement of the column at basis position `r`; `alpha` is
    /// the entering column expressed in the current basis.
    pub fn update(&mut self, r: usize, alpha: &[f64]) {
        let piv = alpha[r];
        self.eta_pos.push(r);
        self.eta_pivot.push(1.0 / piv);
        for (i, &a) in alpha.iter().enumerate() {
            if i != r && a.abs() > DROP_TOL {
                self.eta_idx.push(i);
                self.eta_val.push(-a / piv);
            }
        }
        self.eta_start.push(self.eta_idx.len());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_cols(a: &[Vec<f64>]) -> impl Fn(usize, &mut Vec<(usize, f64)>) + '_ {
        move |p, buf| {
            buf.clear();
            for (r, row) in a.iter().enumerate() {
                if row[p] != 0.0 {
                    buf.push((r, row[p]));
                }
            }
        }
    }

    fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        a.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    fn mat_t_vec(a: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
        let n = a[0].len();
        (0..n).map(|j| a.iter().zip(y).map(|(row, yi)| row[j] * yi).sum()).collect()
    }

    #[test]
    fn solves_small_system() {
        let a = vec![
            vec![2.0, 0.0, 1.0, 0.0],
            vec![1.0, 3.0, 0.0, 0.0],
            vec![0.0, 1.0, 4.0, 1.0],
            vec![0.0, 0.0, 1.0, -1.0],
        ];
        let f = Factor::new(4, dense_cols(&a)).unwrap();
        let b = vec![1.0, 2.0, 3.0, 4.0];
        let mut rhs = b.clone();
        let mut x = vec![0.0; 4];
        f.ftran(&mut rhs, &mut x);
        let back = matvec(&a, &x);
        for (u, v) in back.iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
        let mut rhs = b.clone();
        let mut y = vec![0.0; 4];
        f.btran(&mut rhs, &mut y);
        let back = mat_t_vec(&a, &y);
        for (u, v) in back.iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn eta_updates_track_column_replacement() {
        let mut a = vec![vec![1.0, 2.0, 0.0], vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 3.0]];
        let mut f = Factor::new(3, dense_cols(&a)).unwrap();
        let newcol = [0.5, -1.0, 2.0];
        let mut rhs = newcol.to_vec();
        let mut alpha = vec![0.0; 3];
        f.ftran(&mut rhs, &mut alpha);
        f.update(1, &alpha);
        for (r, row) in a.iter_mut().enumerate() {
            row[1] = newcol[r];
        }
        let b = vec![3.0, -2.0, 1.0];
        let mut rhs = b.clone();
        let mut x = vec![0.0; 3];
        f.ftran(&mut rhs, &mut x);
        for (u, v) in matvec(&a, &x).iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
        let mut rhs = b.clone();
        let mut y = vec![0.0; 3];
        f.btran(&mut rhs, &mut y);
        for (u, v) in mat_t_vec(&a, &y).iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn reports_singular_columns() {
        let a = vec![vec![1.0, 2.0, 0.0], vec![2.0, 4.0, 0.0], vec![0.0, 0.0, 1.0]];
        let err = Factor::new(3, dense_cols(&a)).unwrap_err();
        assert_eq!(err.positions.len(), 1);
        assert_eq!(err.rows.len(), 1);
    }
}
