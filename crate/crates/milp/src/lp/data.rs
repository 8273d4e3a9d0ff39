//! Scaled computational form `A x - y = 0` with bounds on both the
//! structural columns `x` and the row activities `y`.

use crate::model::MilpModel;

#[derive(Debug, Clone)]
pub(crate) struct LpData {
    pub n: usize,
    pub m: usize,
    pub col_start: Vec<usize>,
    pub col_row: Vec<usize>,
    pub col_val: Vec<f64>,
    pub row_start: Vec<usize>,
    pub row_col: Vec<usize>,
    pub row_val: Vec<f64>,
    /// Scaled costs for all `n + m` variables (logicals cost nothing).
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// `x_scaled = x / col_scale`.
    pub col_scale: Vec<f64>,
    /// `y_scaled = y * row_scale`.
    pub row_scale: Vec<f64>,
    /// `cost_scaled = cost * col_scale * obj_scale`.
    pub obj_scale: f64,
    pub obj_constant: f64,
}

fn pow2(x: f64) -> f64 {
    if !x.is_finite() || x <= 0.0 {
        1.0
    } else {
        2f64.powi(x.log2().round() as i32)
    }
}

impl LpData {
    pub fn from_model(model: &MilpModel, scale: bool) -> LpData {
        let n = model.num_variables();
        let m = model.num_constraints();
        let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
        for (i, c) in model.constraints().iter().enumerate() {
            for &(v, a) in &c.terms {
                if a != 0.0 {
                    triplets.push((i, v.0, a));
                }
            }
        }

        let (row_scale, col_scale) = if scale {
            geometric_scaling(n, m, &triplets)
        } else {
            (vec![1.0; m], vec![1.0; n])
        };

        let mut col_count = vec![0usize; n];
        let mut row_count = vec![0usize; m];
        for &(i, j, _) in &triplets {
            col_count[j] += 1;
            row_count[i] += 1;
        }
        let mut col_start = vec![0usize; n + 1];
        for j in 0..n {
            col_start[j + 1] = col_start[j] + col_count[j];
        }
        let mut row_start = vec![0usize; m + 1];
        for i in 0..m {
            row_start[i + 1] = row_start[i] + row_count[i];
        }
        let nnz = triplets.len();
        let mut col_row = vec![0usize; nnz];
        let mut col_val = vec![0.0; nnz];
        let mut row_col = vec![0usize; nnz];
        let mut row_val = vec![0.0; nnz];
        let mut cfill = col_start.clone();
        let mut rfill = row_start.clone();
        // Triplets are generated row by row, so both layouts come out sorted.
        for &(i, j, a) in &triplets {
            let v = a * row_scale[i] * col_scale[j];
            col_row[cfill[j]] = i;
            col_val[cfill[j]] = v;
            cfill[j] += 1;
            row_col[rfill[i]] = j;
            row_val[rfill[i]] = v;
            rfill[i] += 1;
        }

        let raw_cost = model.objective_vector();
        let max_cost = raw_cost
            .iter()
            .zip(&col_scale)
            .map(|(c, s)| (c * s).abs())
            .fold(0.0, f64::max);
        let obj_scale = if scale && max_cost > 0.0 { pow2(1.0 / max_cost) } else { 1.0 };

        let mut cost = vec![0.0; n + m];
        let mut lower = vec![0.0; n + m];
        let mut upper = vec![0.0; n + m];
        for (j, var) in model.variables().iter().enumerate() {
            cost[j] = raw_cost[j] * col_scale[j] * obj_scale;
            lower[j] = var.lower / col_scale[j];
            upper[j] = var.upper / col_scale[j];
        }
        for (i, c) in model.constraints().iter().enumerate() {
            let (lo, hi) = c.row_bounds();
            lower[n + i] = lo * row_scale[i];
            upper[n + i] = hi * row_scale[i];
        }

        LpData {
            n,
            m,
            col_start,
            col_row,
            col_val,
            row_start,
            row_col,
            row_val,
            cost,
            lower,
            upper,
            col_scale,
            row_scale,
            obj_scale,
            obj_constant: model.objective_constant(),
        }
    }

    /// Column `j` of `[A | -I]` into `buf` as `(row, value)` pairs.
    pub fn column(&self, j: usize, buf: &mut Vec<(usize, f64)>) {
        buf.clear();
        if j < self.n {
            for k in self.col_start[j]..self.col_start[j + 1] {
                buf.push((self.col_row[k], self.col_val[k]));
            }
        } else {
            buf.push((j - self.n, -1.0));
        }
    }

    /// Adds `scale * column(j)` into the dense row-indexed vector `out`.
    pub fn add_column(&self, j: usize, scale: f64, out: &mut [f64]) {
        if j < self.n {
            for k in self.col_start[j]..self.col_start[j + 1] {
                out[self.col_row[k]] += scale * self.col_val[k];
            }
        } else {
            out[j - self.n] -= scale;
        }
    }

    /// `rho^T column(j)`.
    pub fn dot_column(&self, j: usize, rho: &[f64]) -> f64 {
        if j < self.n {
            (self.col_start[j]..self.col_start[j + 1]).map(|k| rho[self.col_row[k]] * self.col_val[k]).sum()
        } else {
            -rho[j - self.n]
        }
    }

    pub fn set_structural_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lower[j] = lower / self.col_scale[j];
        self.upper[j] = upper / self.col_scale[j];
    }

    pub fn unscale_value(&self, j: usize, x: f64) -> f64 {
        if j < self.n {
            x * self.col_scale[j]
        } else {
            x / self.row_scale[j - self.n]
        }
    }

    pub fn unscale_objective(&self, z: f64) -> f64 {
        z / self.obj_scale + self.obj_constant
    }

    pub fn scale_objective(&self, z: f64) -> f64 {
        (z - self.obj_constant) * self.obj_scale
    }
}

/// Geometric-mean row/column scaling rounded to powers of two.
fn geometric_scaling(n: usize, m: usize, triplets: &[(usize, usize, f64)]) -> (Vec<f64>, Vec<f64>) {
    let mut rs = vec![1.0f64; m];
    let mut cs = vec![1.0f64; n];
    for _ in 0..6 {
        let mut rmin = vec![f64::INFINITY; m];
        let mut rmax = vec![0.0f64; m];
        for &(i, j, a) in triplets {
            let v = (a * cs[j]).abs();
            rmin[i] = rmin[i].min(v);
            rmax[i] = rmax[i].max(v);
        }
        for i in 0..m {
            if rmax[i] > 0.0 {
                rs[i] = 1.0 / (rmin[i] * rmax[i]).sqrt();
            }
        }
        let mut cmin = vec![f64::INFINITY; n];
        let mut cmax = vec![0.0f64; n];
        for &(i, j, a) in triplets {
            let v = (a * rs[i]).abs();
            cmin[j] = cmin[j].min(v);
            cmax[j] = cmax[j].max(v);
        }
        for j in 0..n {
            if cmax[j] > 0.0 {
                cs[j] = 1.0 / (cmin[j] * cmax[j]).sqrt();
            }
        }
    }
    // Equilibrate rows so the largest entry of every row is about one.
    let mut rmax = vec![0.0f64; m];
    for &(i, j, a) in triplets {
        rmax[i] = rmax[i].max((a * rs[i] * cs[j]).abs());
    }
    for i in 0..m {
        if rmax[i] > 0.0 {
            rs[i] /= rmax[i];
        }
    }
    (rs.into_iter().map(pow2).collect(), cs.into_iter().map(pow2).collect())
}
