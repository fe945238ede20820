//! Incrementally grown divided-difference table.
//!
//! Nodes are appended in iteration order `x_0, x_1, ..., x_k`. After the
//! k-th append the table holds the newest anti-diagonal
//! `f_{k,k}, f_{k,k-1}, ..., f_{k,0}` where
//!
//! ```text
//! f_{k,k}   = f(x_k)
//! f_{k,k-i} = (f_{k,k-i+1} - f_{k-1,k-i}) / (x_k - x_{k-i})
//! ```
//!
//! Only that anti-diagonal and the node list are kept, so an append costs
//! exactly k divisions.

use thiserror::Error;

use crate::numctx::{NumError, Real};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DivDiffError {
    /// The new node coincides with node `index`.
    #[error("node coincides with existing node x_{index}")]
    DuplicateNode { index: usize },
    #[error(transparent)]
    Numeric(#[from] NumError),
}

#[derive(Debug, Clone, Default)]
pub struct DividedDifferenceTable {
    nodes: Vec<Real>,
    values: Vec<Real>,
    // diagonal[i] = f_{k,k-i}
    diagonal: Vec<Real>,
    divisions: usize,
}

impl DividedDifferenceTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Real] {
        &self.nodes
    }

    pub fn values(&self) -> &[Real] {
        &self.values
    }

    /// `f_{k,k}, f_{k,k-1}, ..., f_{k,0}` for the newest node `x_k`.
    pub fn diagonal(&self) -> &[Real] {
        &self.diagonal
    }

    /// Total divisions performed by all appends so far.
    pub fn divisions(&self) -> usize {
        self.divisions
    }

    /// Appends `(x, fx)`. On error the table is left unchanged.
    pub fn append_node(&mut self, x: Real, fx: Real) -> Result<(), DivDiffError> {
        if let Some(index) = self.nodes.iter().position(|node| *node == x) {
            return Err(DivDiffError::DuplicateNode { index });
        }
        let k = self.nodes.len();
        let mut next = Vec::with_capacity(k + 1);
        next.push(fx.clone());
        for i in 1..=k {
            let numer = &next[i - 1] - &self.diagonal[i - 1];
            let denom = &x - &self.nodes[k - i];
            next.push(numer.checked_div(&denom)?);
        }
        self.divisions += k;
        self.nodes.push(x);
        self.values.push(fx);
        self.diagonal = next;
        Ok(())
    }

    /// Newton form of the interpolating polynomial through every node,
    /// evaluated by nested multiplication:
    ///
    /// `P(x) = f_{k,k} + (x - x_k)(f_{k,k-1} + (x - x_{k-1})(... + (x - x_1) f_{k,0}))`
    ///
    /// Returns `None` for an empty table.
    pub fn newton_poly_eval(&self, x: &Real) -> Option<Real> {
        let k = self.nodes.len().checked_sub(1)?;
        let mut acc = self.diagonal[k].clone();
        for i in (0..k).rev() {
            acc = &self.diagonal[i] + &((x - &self.nodes[k - i]) * acc);
        }
        Some(acc)
    }

    /// Derivative of the interpolating polynomial at the newest node,
    ///
    /// `G_k = f_{k,k-1} + sum_{i=2..k} f_{k,k-i} prod_{j=1..i-1} (x_k - x_{k-j})`,
    ///
    /// in nested form. Returns `None` with fewer than two nodes.
    pub fn newton_poly_derivative_at_last(&self) -> Option<Real> {
        let k = self.nodes.len().checked_sub(1).filter(|&k| k >= 1)?;
        let last = &self.nodes[k];
        let mut acc = self.diagonal[k].clone();
        for i in (1..k).rev() {
            acc = &self.diagonal[i] + &((last - &self.nodes[k - i]) * acc);
        }
        Some(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::NumericContext;

    fn ctx() -> NumericContext {
        NumericContext::new(50).unwrap()
    }

    fn table(points: &[(i64, i64)]) -> DividedDifferenceTable {
        let c = ctx();
        let mut t = DividedDifferenceTable::new();
        for &(x, fx) in points {
            t.append_node(c.int(x), c.int(fx)).unwrap();
        }
        t
    }

    #[test]
    fn single_node() {
        let c = ctx();
        let t = table(&[(1, 1)]);
        assert_eq!(t.diagonal(), &[c.int(1)]);
        assert!(t.newton_poly_derivative_at_last().is_none());
        let t = table(&[(1, 7)]);
        assert_eq!(t.newton_poly_eval(&c.int(42)), Some(c.int(7)));
    }

    #[test]
    fn squares_table() {
        let c = ctx();
        let t = table(&[(0, 0), (1, 1), (2, 4)]);
        // f_{2,2}, f_{2,1}, f_{2,0}
        assert_eq!(t.diagonal(), &[c.int(4), c.int(3), c.int(1)]);
        assert_eq!(t.newton_poly_eval(&c.int(3)), Some(c.int(9)));
        assert_eq!(t.newton_poly_derivative_at_last(), Some(c.int(4)));
    }

    #[test]
    fn two_nodes_give_secant_slope() {
        let c = ctx();
        let t = table(&[(1, 5), (3, 9)]);
        assert_eq!(t.newton_poly_derivative_at_last(), Some(c.int(2)));
    }

    #[test]
    fn duplicate_node_is_rejected_without_mutation() {
        let c = ctx();
        let mut t = table(&[(0, 0), (1, 1)]);
        let err = t.append_node(c.int(0), c.int(5)).unwrap_err();
        assert_eq!(err, DivDiffError::DuplicateNode { index: 0 });
        assert_eq!(t.len(), 2);
        assert_eq!(t.diagonal(), &[c.int(1), c.int(1)]);
    }

    #[test]
    fn append_costs_k_divisions() {
        let c = ctx();
        let mut t = DividedDifferenceTable::new();
        for k in 0..10 {
            let before = t.divisions();
            t.append_node(c.int(k), c.int(k * k * k)).unwrap();
            assert_eq!(t.divisions() - before, k as usize);
        }
    }

    #[test]
    fn empty_table() {
        let c = ctx();
        let t = DividedDifferenceTable::new();
        assert!(t.is_empty());
        assert!(t.newton_poly_eval(&c.one()).is_none());
    }
}
