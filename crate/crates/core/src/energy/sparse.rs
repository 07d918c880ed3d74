use crate::mesh::{EdgeTopology, Mesh};

/// Symmetric matrix stored as its upper triangle in compressed columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SymCsc {
    pub n: usize,
    pub col_ptr: Vec<usize>,
    /// Row indices, ascending within each column and never below the diagonal.
    pub row_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SymCsc {
    pub fn slot(&self, r: usize, c: usize) -> Option<usize> {
        let (r, c) = (r.min(c), r.max(c));
        let range = self.col_ptr[c]..self.col_ptr[c + 1];
        self.row_idx[range.clone()]
            .binary_search(&r)
            .ok()
            .map(|k| range.start + k)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.slot(r, c).map_or(0.0, |k| self.values[k])
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for c in 0..self.n {
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                let (r, v) = (self.row_idx[k], self.values[k]);
                y[r] += v * x[c];
                if r != c {
                    y[c] += v * x[r];
                }
            }
        }
        y
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for c in 0..self.n {
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                let (r, v) = (self.row_idx[k], self.values[k]);
                let t = v * x[r] * x[c];
                acc += if r == c { t } else { 2.0 * t };
            }
        }
        acc
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for c in 0..self.n {
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                let r = self.row_idx[k];
                d[r][c] = self.values[k];
                d[c][r] = self.values[k];
            }
        }
        d
    }
}

/// Fixed sparsity of the Newton system with precomputed scatter slots.
///
/// Degrees of freedom are interleaved, `3v + i` for vertex `v` and
/// component `i`. Two vertices are coupled when they share an element or
/// belong to the two elements adjacent to one interior edge.
#[derive(Clone, Debug)]
pub(crate) struct Pattern {
    /// Scalar vertex pattern, upper triangle.
    pub scalar_col_ptr: Vec<usize>,
    pub scalar_row_idx: Vec<usize>,
    /// Expanded pattern over `3 × vertices` dofs.
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    /// For each element, the slot of every local dof pair `(3a+i, 3b+k)`
    /// that falls on or above the diagonal, `u32::MAX` otherwise.
    pub element_slots: Vec<[u32; 81]>,
    /// For each scalar entry, its three component slots.
    pub scalar_slots: Vec<[u32; 3]>,
}

impl Pattern {
    pub fn new(mesh: &Mesh, topo: Option<&EdgeTopology>) -> Self {
        let nv = mesh.num_vertices();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
        let mut couple = |vs: &[usize]| {
            for &a in vs {
                for &b in vs {
                    if a <= b {
                        adj[b].push(a);
                    }
                }
            }
        };
        for e in &mesh.elements {
            couple(e);
        }
        if let Some(topo) = topo {
            for edge in &topo.edges {
                let [t0, t1] = edge.elements;
                let mut patch: Vec<usize> = mesh.elements[t0].iter().chain(&mesh.elements[t1]).copied().collect();
                patch.sort_unstable();
                patch.dedup();
                couple(&patch);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let mut scalar_col_ptr = Vec::with_capacity(nv + 1);
        let mut scalar_row_idx = Vec::new();
        scalar_col_ptr.push(0);
        for list in &adj {
            scalar_row_idx.extend_from_slice(list);
            scalar_col_ptr.push(scalar_row_idx.len());
        }
        let mut col_ptr = Vec::with_capacity(3 * nv + 1);
        let mut row_idx = Vec::new();
        col_ptr.push(0);
        for (w, list) in adj.iter().enumerate() {
            for k in 0..3 {
                for &v in list {
                    for i in 0..3 {
                        if v == w && i > k {
                            break;
                        }
                        row_idx.push(3 * v + i);
                    }
                }
                col_ptr.push(row_idx.len());
            }
        }
        let find = |r: usize, c: usize| -> u32 {
            let range = col_ptr[c]..col_ptr[c + 1];
            let k = row_idx[range.clone()]
                .binary_search(&r)
                .expect("coupled dofs are in the pattern");
            u32::try_from(range.start + k).expect("pattern fits in u32 slots")
        };
        let element_slots = mesh
            .elements
            .iter()
            .map(|e| {
                let mut s = [u32::MAX; 81];
                for p in 0..9 {
                    for q in 0..9 {
                        let gp = 3 * e[p / 3] + p % 3;
                        let gq = 3 * e[q / 3] + q % 3;
                        if gp <= gq {
                            s[9 * p + q] = find(gp, gq);
                        }
                    }
                }
                s
            })
            .collect();
        let mut scalar_slots = Vec::with_capacity(scalar_row_idx.len());
        for w in 0..nv {
            for &v in &scalar_row_idx[scalar_col_ptr[w]..scalar_col_ptr[w + 1]] {
                scalar_slots.push(std::array::from_fn(|i| find(3 * v + i, 3 * w + i)));
            }
        }
        Pattern {
            scalar_col_ptr,
            scalar_row_idx,
            col_ptr,
            row_idx,
            element_slots,
            scalar_slots,
        }
    }

    pub fn num_dofs(&self) -> usize {
        self.col_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    pub fn scalar_slot(&self, v: usize, w: usize) -> usize {
        let (v, w) = (v.min(w), v.max(w));
        let range = self.scalar_col_ptr[w]..self.scalar_col_ptr[w + 1];
        range.start
            + self.scalar_row_idx[range]
                .binary_search(&v)
                .expect("coupled vertices are in the pattern")
    }

    pub fn matrix(&self, values: Vec<f64>) -> SymCsc {
        SymCsc {
            n: self.num_dofs(),
            col_ptr: self.col_ptr.clone(),
            row_idx: self.row_idx.clone(),
            values,
        }
    }

    /// Scalar symmetric product `(A x)` for upper-stored scalar values,
    /// applied to each of the three interleaved components.
    pub fn scalar_mul(&self, a: &[f64], x: &[f64], y: &mut [f64]) {
        let nv = self.scalar_col_ptr.len() - 1;
        for w in 0..nv {
            for k in self.scalar_col_ptr[w]..self.scalar_col_ptr[w + 1] {
                let v = self.scalar_row_idx[k];
                let val = a[k];
                for i in 0..3 {
                    y[3 * v + i] += val * x[3 * w + i];
                    if v != w {
                        y[3 * w + i] += val * x[3 * v + i];
                    }
                }
            }
        }
    }

    /// `Σ_i x_iᵀ A x_i` over the three components.
    pub fn scalar_quad(&self, a: &[f64], x: &[f64]) -> f64 {
        let nv = self.scalar_col_ptr.len() - 1;
        let mut acc = 0.0;
        for w in 0..nv {
            for k in self.scalar_col_ptr[w]..self.scalar_col_ptr[w + 1] {
                let v = self.scalar_row_idx[k];
                let dot: f64 = (0..3).map(|i| x[3 * v + i] * x[3 * w + i]).sum();
                acc += if v == w { a[k] * dot } else { 2.0 * a[k] * dot };
            }
        }
        acc
    }
}
