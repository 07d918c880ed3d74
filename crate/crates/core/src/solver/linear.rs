use crate::error::{Error, Result};
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::sparse::linalg::cholesky::{
    factorize_symbolic_cholesky, CholeskySymbolicParams, LdltRef, SymbolicCholesky,
    SymmetricOrdering,
};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Conj, MatMut, Par, Side};

/// Sparse LDLᵀ of a symmetric matrix with a fixed upper-triangle pattern.
///
/// The symbolic analysis (AMD ordering and elimination tree) is done once;
/// each call to [`SparseLdlt::factor`] only redoes the numeric part. No
/// pivoting is performed, so indefinite matrices factor as long as no pivot
/// vanishes.
pub(crate) struct SparseLdlt {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    symbolic: SymbolicCholesky<usize>,
    l_values: Vec<f64>,
    factor_mem: MemBuffer,
    solve_mem: MemBuffer,
    factored: bool,
}

impl SparseLdlt {
    pub fn new(n: usize, col_ptr: &[usize], row_idx: &[usize]) -> Result<Self> {
        let a = SymbolicSparseColMatRef::new_checked(n, n, col_ptr, None, row_idx);
        let symbolic = factorize_symbolic_cholesky(
            a,
            Side::Upper,
            SymmetricOrdering::Amd,
            CholeskySymbolicParams::default(),
        )
        .map_err(|e| Error::LinearSolve(format!("symbolic analysis failed: {e:?}")))?;
        let factor_mem = MemBuffer::new(
            symbolic.factorize_numeric_ldlt_scratch::<f64>(Par::Seq, Default::default()),
        );
        let solve_mem = MemBuffer::new(symbolic.solve_in_place_scratch::<f64>(1, Par::Seq));
        let l_values = vec![0.0; symbolic.len_val()];
        Ok(SparseLdlt {
            n,
            col_ptr: col_ptr.to_vec(),
            row_idx: row_idx.to_vec(),
            symbolic,
            l_values,
            factor_mem,
            solve_mem,
            factored: false,
        })
    }

    pub fn factor(&mut self, values: &[f64]) -> Result<()> {
        self.factored = false;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearSolve("matrix has non-finite entries".into()));
        }
        let sym = SymbolicSparseColMatRef::new_checked(self.n, self.n, &self.col_ptr, None, &self.row_idx);
        let a = SparseColMatRef::new(sym, values);
        self.symbolic
            .factorize_numeric_ldlt(
                &mut self.l_values,
                a,
                Side::Upper,
                Default::default(),
                Par::Seq,
                MemStack::new(&mut self.factor_mem),
                Default::default(),
            )
            .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
        self.factored = true;
        Ok(())
    }

    /// Overwrites `rhs` with the solution.
    pub fn solve(&mut self, rhs: &mut [f64]) -> Result<()> {
        if !self.factored {
            return Err(Error::LinearSolve("solve before a successful factorization".into()));
        }
        let ldlt = LdltRef::<'_, usize, f64>::new(&self.symbolic, &self.l_values);
        let x = MatMut::from_column_major_slice_mut(rhs, self.n, 1);
        ldlt.solve_in_place_with_conj(Conj::No, x, Par::Seq, MemStack::new(&mut self.solve_mem));
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearSolve("solution has non-finite entries".into()));
        }
        Ok(())
    }
}
