//! The five reference presentations used throughout the tests and docs.

use crate::presentation::{parse_presentation, PeriagroupSpec};

/// Dihedral group of order 6: one edge labelled 3 between two order-2 groups.
pub const F1: &str = include_str!("../fixtures/f1.peria");
/// `Z/2 x Z/3`: one edge labelled 2.
pub const F2: &str = include_str!("../fixtures/f2.peria");
/// `Z/3 * Z/3`: two isolated vertices.
pub const F3: &str = include_str!("../fixtures/f3.peria");
/// Mixed: path `u - v - w` with labels 2 and 3, groups of orders 3, 2, 2.
pub const F4: &str = include_str!("../fixtures/f4.peria");
/// Affine Coxeter group with triangle diagram, all labels 3.
pub const F5: &str = include_str!("../fixtures/f5.peria");

fn load(text: &str) -> PeriagroupSpec {
    parse_presentation(text).expect("bundled fixture parses")
}

pub fn f1() -> PeriagroupSpec {
    load(F1)
}

pub fn f2() -> PeriagroupSpec {
    load(F2)
}

pub fn f3() -> PeriagroupSpec {
    load(F3)
}

pub fn f4() -> PeriagroupSpec {
    load(F4)
}

pub fn f5() -> PeriagroupSpec {
    load(F5)
}

pub fn by_name(name: &str) -> Option<PeriagroupSpec> {
    Some(match name.to_ascii_uppercase().as_str() {
        "F1" => f1(),
        "F2" => f2(),
        "F3" => f3(),
        "F4" => f4(),
        "F5" => f5(),
        _ => return None,
    })
}
