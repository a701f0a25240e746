//! Coordinate generators of the algebra of polynomial functions on `T*[2]A[1]`
//! for a trivial bundle A = R^n x R^d -> R^n.
//!
//! Even generators: base coordinates `x_i` (i = 1..n) and their moments `p^i`.
//! Odd generators: fibre coordinates `xi_a` (a = 1..d) and their moments `th^a`.

use std::fmt;

use crate::error::EngineError;

/// Base and fibre dimensions (n, d) of the trivial bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub n: u32,
    pub d: u32,
}

impl Dims {
    pub fn new(n: u32, d: u32) -> Dims {
        Dims { n, d }
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}, d={}", self.n, self.d)
    }
}

/// The four kinds of coordinate generator. The declaration order fixes the
/// canonical generator order x < p < xi < th used by normal forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenKind {
    X,
    P,
    Xi,
    Theta,
}

/// A single generator, identified by kind and 1-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneratorId {
    pub kind: GenKind,
    pub index: u32,
}

impl GeneratorId {
    pub fn x(index: u32) -> GeneratorId {
        GeneratorId { kind: GenKind::X, index }
    }

    pub fn p(index: u32) -> GeneratorId {
        GeneratorId { kind: GenKind::P, index }
    }

    pub fn xi(index: u32) -> GeneratorId {
        GeneratorId { kind: GenKind::Xi, index }
    }

    pub fn theta(index: u32) -> GeneratorId {
        GeneratorId { kind: GenKind::Theta, index }
    }

    /// Bidegrees: x:(0,0), p:(1,1), xi:(0,1), th:(1,0).
    pub fn bidegree(&self) -> Bidegree {
        match self.kind {
            GenKind::X => Bidegree::new(0, 0),
            GenKind::P => Bidegree::new(1, 1),
            GenKind::Xi => Bidegree::new(0, 1),
            GenKind::Theta => Bidegree::new(1, 0),
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.bidegree().total()
    }

    /// Odd generators square to zero and anticommute.
    pub fn is_odd(&self) -> bool {
        matches!(self.kind, GenKind::Xi | GenKind::Theta)
    }

    pub fn check_in(&self, dims: Dims) -> Result<(), EngineError> {
        let bound = match self.kind {
            GenKind::X | GenKind::P => dims.n,
            GenKind::Xi | GenKind::Theta => dims.d,
        };
        if self.index == 0 || self.index > bound {
            return Err(EngineError::GeneratorOutOfRange {
                generator: *self,
                dims,
            });
        }
        Ok(())
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.kind {
            GenKind::X => "x",
            GenKind::P => "p",
            GenKind::Xi => "xi",
            GenKind::Theta => "th",
        };
        write!(f, "{}{}", prefix, self.index)
    }
}

/// The (N0 x N0)-valued bidegree grading the function algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Bidegree {
    pub k: u32,
    pub l: u32,
}

impl Bidegree {
    pub fn new(k: u32, l: u32) -> Bidegree {
        Bidegree { k, l }
    }

    pub fn total(&self) -> u32 {
        self.k + self.l
    }

    /// Parity of the total degree; drives all Koszul signs.
    pub fn is_odd(&self) -> bool {
        self.total() % 2 == 1
    }
}

impl std::ops::Add for Bidegree {
    type Output = Bidegree;

    fn add(self, rhs: Bidegree) -> Bidegree {
        Bidegree::new(self.k + rhs.k, self.l + rhs.l)
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k, self.l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_is_x_p_xi_theta() {
        let order = [
            GeneratorId::x(1),
            GeneratorId::x(2),
            GeneratorId::p(1),
            GeneratorId::p(2),
            GeneratorId::xi(1),
            GeneratorId::xi(2),
            GeneratorId::theta(1),
            GeneratorId::theta(2),
        ];
        for pair in order.windows(2) {
            assert!(pair[0] < pair[1], "{} should precede {}", pair[0], pair[1]);
        }
    }

    #[test]
    fn generator_bidegrees() {
        assert_eq!(GeneratorId::x(1).bidegree(), Bidegree::new(0, 0));
        assert_eq!(GeneratorId::xi(1).bidegree(), Bidegree::new(0, 1));
        assert_eq!(GeneratorId::p(1).bidegree(), Bidegree::new(1, 1));
        assert_eq!(GeneratorId::theta(1).bidegree(), Bidegree::new(1, 0));
    }

    #[test]
    fn index_bounds_checked() {
        let dims = Dims::new(2, 3);
        assert!(GeneratorId::x(2).check_in(dims).is_ok());
        assert!(GeneratorId::x(3).check_in(dims).is_err());
        assert!(GeneratorId::theta(3).check_in(dims).is_ok());
        assert!(GeneratorId::theta(4).check_in(dims).is_err());
        assert!(GeneratorId::xi(0).check_in(dims).is_err());
    }

    #[test]
    fn bidegree_addition_commutes() {
        let a = Bidegree::new(1, 2);
        let b = Bidegree::new(3, 0);
        assert_eq!(a + b, b + a);
        assert_eq!((a + b).total(), 6);
    }
}
