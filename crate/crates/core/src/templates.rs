//! The twelve linear Nijenhuis operator templates on the plane, one per
//! isomorphism class of two-dimensional left-symmetric algebra, in the
//! coordinates `x, y`. The `b` families have a non-abelian associated Lie
//! algebra, the `c` families an abelian one.

use std::fmt;

use crate::coeff::Coeff;
use crate::error::TensorError;
use crate::series::{Series, Vars};
use crate::tensor::OperatorField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    B1,
    B2,
    B3,
    B4Plus,
    B4Minus,
    B5,
    C0,
    C2,
    C3,
    C4,
    C5Plus,
    C5Minus,
}

impl Family {
    pub const ALL: [Family; 12] = [
        Family::B1,
        Family::B2,
        Family::B3,
        Family::B4Plus,
        Family::B4Minus,
        Family::B5,
        Family::C0,
        Family::C2,
        Family::C3,
        Family::C4,
        Family::C5Plus,
        Family::C5Minus,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Family::B1 => "b1",
            Family::B2 => "b2",
            Family::B3 => "b3",
            Family::B4Plus => "b4plus",
            Family::B4Minus => "b4minus",
            Family::B5 => "b5",
            Family::C0 => "c0",
            Family::C2 => "c2",
            Family::C3 => "c3",
            Family::C4 => "c4",
            Family::C5Plus => "c5plus",
            Family::C5Minus => "c5minus",
        }
    }

    /// Parse a family tag. `c1` is accepted as an alias for the
    /// low-index commutative template `c0` (the two spellings appear in
    /// different sources); the returned flag records that the alias was
    /// used so reports can surface it.
    pub fn parse(tag: &str) -> Option<(Family, bool)> {
        let t = tag.trim().to_ascii_lowercase();
        if t == "c1" {
            return Some((Family::C0, true));
        }
        Family::ALL
            .iter()
            .find(|f| f.tag() == t)
            .map(|f| (*f, false))
    }

    pub fn has_parameter(&self) -> bool {
        matches!(self, Family::B1 | Family::B2)
    }

    /// Abelian associated Lie algebra?
    pub fn is_commutative(&self) -> bool {
        matches!(
            self,
            Family::C0 | Family::C2 | Family::C3 | Family::C4 | Family::C5Plus | Family::C5Minus
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())
    }
}

/// A family tag plus its parameter where the family has one
/// (`alpha` for `b1`, `beta != 0` for `b2`).
#[derive(Clone, Debug, PartialEq)]
pub struct ClassLabel<C: Coeff> {
    pub family: Family,
    pub param: Option<C>,
}

impl<C: Coeff> ClassLabel<C> {
    pub fn plain(family: Family) -> Self {
        assert!(!family.has_parameter(), "family {family} needs a parameter");
        ClassLabel {
            family,
            param: None,
        }
    }

    pub fn with_param(family: Family, param: C) -> Self {
        assert!(family.has_parameter(), "family {family} takes no parameter");
        ClassLabel {
            family,
            param: Some(param),
        }
    }
}

impl<C: Coeff> fmt::Display for ClassLabel<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.param {
            None => write!(f, "{}", self.family),
            Some(p) => write!(f, "{}({})", self.family, p),
        }
    }
}

/// Linear operator field for a template. The parameter is required for
/// `b1`/`b2` and ignored elsewhere.
pub fn template_operator<C: Coeff>(
    family: Family,
    param: Option<&C>,
    trunc: u32,
    unit: &C,
) -> Result<OperatorField<C>, TensorError> {
    let vars = Vars::xy();
    let zero = || Series::zero(vars.clone(), trunc);
    let x = || Series::var(vars.clone(), trunc, 0, unit.clone()).expect("x");
    let y = || Series::var(vars.clone(), trunc, 1, unit.clone()).expect("y");
    let entries = match family {
        Family::B1 => {
            let alpha = param.expect("b1 needs alpha").clone();
            vec![vec![zero(), x()], vec![zero(), y().scale(&alpha)]]
        }
        Family::B2 => {
            let beta = param.expect("b2 needs beta").clone();
            assert!(!beta.is_zero(), "b2 requires beta != 0");
            // coefficient 1 - 1/beta
            let coef = unit.sub(&beta.inv().expect("nonzero beta"));
            vec![vec![y(), x().scale(&coef)], vec![zero(), y()]]
        }
        Family::B3 => vec![vec![zero(), x().add(&y())?], vec![zero(), y()]],
        Family::B4Plus => vec![
            vec![zero(), x().neg()],
            vec![x(), y().scale_int(-2)],
        ],
        Family::B4Minus => vec![
            vec![zero(), x().neg()],
            vec![x().neg(), y().scale_int(-2)],
        ],
        Family::B5 => vec![vec![y(), y()], vec![zero(), y()]],
        Family::C0 => vec![vec![zero(), zero()], vec![zero(), zero()]],
        Family::C2 => vec![vec![zero(), zero()], vec![zero(), y()]],
        Family::C3 => vec![vec![zero(), y()], vec![zero(), zero()]],
        Family::C4 => vec![vec![y(), x()], vec![zero(), y()]],
        Family::C5Plus => vec![vec![y(), x()], vec![x(), y()]],
        Family::C5Minus => vec![vec![y(), x()], vec![x().neg(), y()]],
    };
    OperatorField::new(entries, unit.clone())
}
