//! A deliberately wrong independence structure must be caught by the axiom
//! checker.

use dagrel::category::{Category, Square};
use dagrel::independence::IndependenceCategory;
use dagrel::laws::{check_independence_axioms, IndependenceCase};

/// The cyclic group of order 3 as a one-object category.
struct Z3 {
    /// Claims every square is independent.
    gullible: bool,
}

impl Category for Z3 {
    type Obj = ();
    type Mor = u8;

    fn dom(&self, _f: &u8) {}

    fn cod(&self, _f: &u8) {}

    fn identity(&self, _x: &()) -> u8 {
        0
    }

    fn compose(&self, g: &u8, f: &u8) -> dagrel::Result<u8> {
        Ok((g + f) % 3)
    }

    fn mor_eq(&self, f: &u8, g: &u8) -> bool {
        f == g
    }

    fn validate(&self, f: &u8) -> dagrel::Result<()> {
        if *f < 3 {
            Ok(())
        } else {
            Err(dagrel::CatError::invalid(format!("{f} is not in Z/3")))
        }
    }
}

impl IndependenceCategory for Z3 {
    fn is_independent(&self, sq: &Square<u8>) -> bool {
        self.gullible || self.commutes(sq)
    }
}

fn all_squares() -> Vec<Square<u8>> {
    let mut out = Vec::new();
    for f in 0..3 {
        for g in 0..3 {
            for u in 0..3 {
                for v in 0..3 {
                    out.push(Square::new(f, g, u, v));
                }
            }
        }
    }
    out
}

#[test]
fn non_commuting_square_asserted_independent_is_an_i1_violation() {
    let cat = Z3 { gullible: true };
    let sq = Square::new(0, 0, 1, 0);
    assert!(!cat.commutes(&sq));
    let rep = check_independence_axioms(&cat, [IndependenceCase::Asserted(sq)], 1, None);
    assert!(!rep.ok());
    assert_eq!(rep.laws_failed(), vec!["I1 commutation"]);
    assert!(!rep.witnesses.is_empty());
}

#[test]
fn arbitrary_squares_expose_the_gullible_structure() {
    let cases: Vec<_> = all_squares().into_iter().map(IndependenceCase::Arbitrary).collect();
    let n = cases.len();
    let rep = check_independence_axioms(&Z3 { gullible: true }, cases.clone(), n, None);
    assert!(rep.laws_failed().contains(&"I1 commutation"));
    let honest = check_independence_axioms(&Z3 { gullible: false }, cases, n, None);
    assert!(honest.ok(), "{honest}");
    assert_eq!(honest.failed, 0);
}

#[test]
fn commuting_squares_paste_in_the_honest_structure() {
    let cat = Z3 { gullible: false };
    let left = Square::new(1, 2, 2, 1);
    let right = Square::new(1, 0, 1, 2);
    assert!(cat.commutes(&left) && cat.commutes(&right));
    let cases = vec![
        IndependenceCase::Pasting(left, right),
        IndependenceCase::Morphism(1),
        IndependenceCase::Morphism(2),
    ];
    let rep = check_independence_axioms(&cat, cases, 3, None);
    assert!(rep.ok(), "{rep}");
}
