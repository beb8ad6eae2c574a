//! Condensed forms of nonincreasing sequences: store one pair per distinct
//! value, take pointwise maxima, and answer interval-max queries over a
//! family without ever expanding the sequences.

use mast::condensed::{joint, CondensedForm, JointTree, Query};

fn main() {
    let f1 = CondensedForm::from_seq(&[5, 4, 4, 3, 2]).unwrap();
    let f2 = CondensedForm::from_seq(&[8, 7, 4, 2, 0]).unwrap();
    let f3 = CondensedForm::from_seq(&[9, 9, 5, 0, 0]).unwrap();
    println!("f2 stored as pairs {:?}", f2.pairs());

    let j = joint(&[&f1, &f2, &f3]);
    println!("pointwise max decodes to {:?}", j.decode());

    let tree = JointTree::new(&[f1, f2, f3]);
    let q = Query { lo: 1, hi: 3, j: 2 };
    println!("max over f1..f3 at position 2: {}", tree.query(q));
    assert_eq!(tree.query(q), 9);
    assert_eq!(tree.query(Query { lo: 1, hi: 1, j: 3 }), 4);
    assert_eq!(tree.query(Query { lo: 1, hi: 2, j: 2 }), 7);
}
