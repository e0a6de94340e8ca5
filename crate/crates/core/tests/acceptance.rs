//! Runs every acceptance criterion once, prints one pass/fail line per
//! criterion, and fails if any criterion fails.
//!
//! The targets each row is judged against are restated here from closed forms,
//! so a row cannot pass by quietly loosening its own bound.

use std::io::Write;

use affine_flow::suite::{CriterionReport, Suite, Target};

fn disk_extinction_time(rho: f64) -> f64 {
    // R(t)^{4/3} = R0^{4/3} - 4t/3 for a disk shrinking with speed R^{-1/3}
    0.75 * rho.powf(4.0 / 3.0)
}

fn at_most(limit: f64) -> Target {
    Target::AtMost { limit }
}

fn at_least(limit: f64) -> Target {
    Target::AtLeast { limit }
}

fn within(expected: f64, tolerance: f64) -> Target {
    Target::Within {
        expected,
        tolerance,
    }
}

fn expected_targets(id: u8) -> Vec<Target> {
    match id {
        1 => vec![within(disk_extinction_time(1.0), 1e-3), at_most(10.0)],
        2 => vec![within(disk_extinction_time(2.0), 2e-3)],
        3 => vec![at_most(1e-6), at_most(1e-4), at_most(1e-6)],
        4 => vec![at_most(1e-3), at_most(1e-3)],
        5 => vec![at_most(1e-4), at_most(1e-2)],
        6 => vec![at_most(1e-2), at_most(1e-2), within(0.0, 0.0)],
        7 => vec![at_most(1e-7), at_most(1e-7), at_least(0.999), at_least(0.999)],
        8 => vec![at_least(-1e-6)],
        9 => vec![at_least(-1e-6), at_least(-1e-6)],
        10 => vec![at_most(1e-10), at_most(1e-6), at_most(5e-2)],
        11 => vec![at_most(1e-8), at_most(1e-2)],
        12 => vec![at_most(1e-4), at_most(1e-4)],
        _ => panic!("unexpected criterion {id}"),
    }
}

fn check_targets(report: &CriterionReport) {
    let got: Vec<Target> = report.measurements.iter().map(|m| m.target).collect();
    let want = expected_targets(report.id);
    assert_eq!(got.len(), want.len(), "criterion {}", report.id);
    for (g, w) in got.iter().zip(&want) {
        match (g, w) {
            (
                Target::Within {
                    expected: ge,
                    tolerance: gt,
                },
                Target::Within {
                    expected: we,
                    tolerance: wt,
                },
            ) => {
                assert!((ge - we).abs() <= 1e-12 * we.abs().max(1.0), "criterion {}", report.id);
                assert_eq!(gt, wt, "criterion {}", report.id);
            }
            _ => assert_eq!(g, w, "criterion {}", report.id),
        }
    }
}

#[test]
fn acceptance_criteria() {
    let reports = Suite::All.run();
    // Written to the real stdout so the table shows up without --nocapture.
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for r in &reports {
        writeln!(out, "{}", r.summary_line()).unwrap();
    }

    let ids: Vec<u8> = reports.iter().map(|r| r.id).collect();
    assert_eq!(ids, (1..=12).collect::<Vec<_>>());
    for r in &reports {
        if r.error.is_none() {
            check_targets(r);
        }
    }
    let failed: Vec<u8> = reports.iter().filter(|r| !r.passed()).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
