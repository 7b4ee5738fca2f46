//! Printed probe rows from the worked examples, checked against an
//! independent brute-force stencil search.

mod common;

use common::{oracle, oracle_label, TABLES};
use slm_core::geometry::{Point, SearchBox, Spacing};
use slm_core::labeling::{label_of, probe, Sense};
use slm_core::objectives::rosenbrock;

#[test]
fn printed_rows_match_oracle_and_probe() {
    for t in &TABLES {
        let dom = SearchBox::cube(2, -t.half, t.half).unwrap();
        let sp = Spacing::new(vec![t.probe_step; 2]).unwrap();
        for &(p, target, label) in t.rows {
            let o = oracle(t.f, p, t.probe_step, -t.half, t.half);
            assert_eq!(o, target, "{}: oracle disagrees with row {p:?}", t.name);
            assert_eq!(oracle_label(p, o), label);

            let pr = probe(&t.f, &Point(vec![p.0, p.1]), &sp, &dom, Sense::Minimize).unwrap();
            assert_eq!(pr.target.0, vec![target.0, target.1], "{}: probe from {p:?}", t.name);
            assert_eq!(
                label_of(&pr.target.minus(&[p.0, p.1])),
                label,
                "{}: label at {p:?}",
                t.name
            );
        }
    }
}

#[test]
fn label_columns() {
    let labels = |i: usize| TABLES[i].rows.iter().map(|r| r.2).collect::<Vec<_>>();
    assert_eq!(labels(0), [2, 2, 0, 1]);
    assert_eq!(labels(1), [2, 2, 0, 1, 1, 2, 0, 0]);
    assert_eq!(labels(3), [2, 1, 0, 2]);
}

/// Two printed rows name a probe target that a neighbour beats; the labels
/// still agree with the better target.
#[test]
fn misprinted_rosenbrock_rows() {
    let s = 0.512;
    let dom = SearchBox::cube(2, -2.048, 2.048).unwrap();
    for (p, printed, label) in [((1.024, 0.0), (0.512, 0.0), 1), ((0.0, 1.024), (-0.512, 0.512), 2)] {
        let better = (0.512, 0.512);
        assert!(rosenbrock(&[better.0, better.1]) < rosenbrock(&[printed.0, printed.1]));
        let o = oracle(rosenbrock, p, s, -2.048, 2.048);
        assert_eq!(o, better);
        assert_eq!(oracle_label(p, o), label);

        let pr = probe(
            &rosenbrock,
            &Point(vec![p.0, p.1]),
            &Spacing::new(vec![s, s]).unwrap(),
            &dom,
            Sense::Minimize,
        )
        .unwrap();
        assert_eq!(pr.target.0, vec![better.0, better.1]);
        assert_eq!(label_of(&pr.target.minus(&[p.0, p.1])), label);
    }
}
