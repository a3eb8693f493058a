//! Cross-checks of every closed form against its numerical oracle.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;

use rayon::prelude::*;
use unruh_qfi_core::channels::{
    accelerated_color, accelerated_state, accelerated_white, check_density, initial_state,
    unruh_second_qubit,
};
use unruh_qfi_core::entanglement::{
    concurrence, concurrence_color_closed, concurrence_white_closed, white_closed_with_tail,
    whitecolor_closed_raw, WhiteColorReading,
};
use unruh_qfi_core::fisher::{
    kappa_mu_terms, qfi_single, qfi_single_white_closed, qfi_two_qubit, qfi_two_white_closed,
    singular_reason, AcceleratedFamily,
};
use unruh_qfi_core::{Channel, ModelParams, Param, QubitForm};

/// Entrywise tolerance for closed accelerated states.
pub const STATE_TOL: f64 = 1e-12;
/// Relative tolerance for the single-qubit closed forms.
pub const SINGLE_QFI_REL_TOL: f64 = 1e-6;
/// Allowed shortfall of the two-qubit QFI below the single-qubit one.
pub const DPI_SLACK: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    /// Points evaluated.
    pub grid: usize,
    pub max_residual: f64,
    pub threshold: f64,
    pub passed: bool,
    /// A known discrepancy: reported, never fails the run.
    pub ledgered: bool,
    pub notes: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    /// True iff every non-ledgered check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ledgered || c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = match (c.passed, c.ledgered) {
                (true, _) => "pass",
                (false, true) => "ledgered",
                (false, false) => "FAIL",
            };
            writeln!(
                f,
                "{status:8} {:40} grid={:<7} max_residual={:<12.3e} threshold={:.1e}{}",
                c.name,
                c.grid,
                c.max_residual,
                c.threshold,
                if c.notes.is_empty() {
                    String::new()
                } else {
                    format!("  [{}]", c.notes)
                }
            )?;
        }
        write!(
            f,
            "overall: {}",
            if self.passed() { "pass" } else { "FAIL" }
        )
    }
}

struct Scan {
    worst: f64,
    at: Option<Point>,
    points: usize,
    errors: usize,
}

impl Scan {
    /// Maximum of `f` over the points; `None` from `f` skips a point and
    /// `Err` counts an evaluation failure.
    fn run<F>(points: &[Point], f: F) -> Self
    where
        F: Fn(Point) -> Result<Option<f64>, ()> + Sync,
    {
        points
            .par_iter()
            .map(|&point| match f(point) {
                Ok(Some(v)) => Scan {
                    worst: v,
                    at: Some(point),
                    points: 1,
                    errors: 0,
                },
                Ok(None) => Scan::empty(),
                Err(()) => Scan {
                    errors: 1,
                    ..Scan::empty()
                },
            })
            .reduce(Scan::empty, Scan::merge)
    }

    fn empty() -> Self {
        Scan {
            worst: 0.0,
            at: None,
            points: 0,
            errors: 0,
        }
    }

    fn merge(self, other: Self) -> Self {
        // NaN residuals win so they cannot hide
        let (worst, at) = if other.worst > self.worst || other.worst.is_nan() || self.at.is_none() {
            if other.at.is_some() {
                (other.worst, other.at)
            } else {
                (self.worst, self.at)
            }
        } else {
            (self.worst, self.at)
        };
        Scan {
            worst,
            at,
            points: self.points + other.points,
            errors: self.errors + other.errors,
        }
    }

    fn record(self, name: &str, threshold: f64, ledgered: bool, notes: &str) -> CheckRecord {
        let mut notes = notes.to_owned();
        if let Some(at) = self.at {
            if self.worst > 0.0 {
                push_note(&mut notes, &format!("worst at {}", at.describe()));
            }
        }
        if self.errors > 0 {
            push_note(&mut notes, &format!("{} evaluation errors", self.errors));
        }
        CheckRecord {
            name: name.to_owned(),
            grid: self.points + self.errors,
            max_residual: self.worst,
            threshold,
            passed: self.errors == 0 && self.worst <= threshold,
            ledgered,
            notes,
        }
    }
}

fn push_note(notes: &mut String, note: &str) {
    if !notes.is_empty() {
        notes.push_str("; ");
    }
    notes.push_str(note);
}

/// A grid point: amplitude, noise strength, `r`, and a second noise strength
/// used only by the white-color scans.
#[derive(Clone, Copy, Debug)]
struct Point(f64, f64, f64, f64);

impl Point {
    fn describe(&self) -> String {
        let Point(a, b, c, d) = *self;
        format!("({a:.4}, {b:.4}, {c:.4}, {d:.4})")
    }
}

/// `n` equally spaced values over `[0, 1]` times `[0, 1]` times `[0, pi/4]`.
fn cube(n: usize) -> Vec<Point> {
    let t = |i: usize| i as f64 / (n - 1) as f64;
    let mut points = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                points.push(Point(t(i), t(j), t(k) * FRAC_PI_4, 0.0));
            }
        }
    }
    points
}

fn relative(a: f64, b: f64) -> f64 {
    let diff = (a - b).abs();
    if diff < 1e-12 {
        0.0
    } else {
        diff / b.abs().max(1e-12)
    }
}

/// Runs the full suite. `tol` bounds the concurrence checks and `grid_n` is
/// the number of points per axis (at least 5).
pub fn verify(tol: f64, grid_n: usize) -> VerificationReport {
    assert!(
        tol > 0.0 && grid_n >= 5,
        "verify needs tol > 0 and grid_n >= 5"
    );
    let cube = cube(grid_n);
    let mut checks = Vec::new();

    // Werner line
    let line: Vec<Point> = (0..=100)
        .map(|i| Point(FRAC_1_SQRT_2, i as f64 / 100.0, 0.0, 0.0))
        .collect();
    checks.push(
        Scan::run(&line, |Point(x, p, r, _)| {
            let c = concurrence(&accelerated_white(x, p, r).map_err(drop)?).map_err(drop)?;
            Ok(Some((c.value() - ((3.0 * p - 1.0) / 2.0).max(0.0)).abs()))
        })
        .record(
            "werner line",
            tol.min(1e-10),
            false,
            "x = 1/sqrt2, r = 0, C = max(0, (3p - 1)/2)",
        ),
    );

    // closed accelerated states against the Unruh map, plus validity
    for (name, channel) in [("white", Channel::White), ("color", Channel::Color)] {
        checks.push(
            Scan::run(&cube, |Point(x, s, r, _)| {
                let params = match channel {
                    Channel::White => ModelParams::white(x, s, r),
                    _ => ModelParams::color(x, s, r),
                }
                .map_err(drop)?;
                let closed = match channel {
                    Channel::White => accelerated_white(x, s, r),
                    _ => accelerated_color(x, s, r),
                }
                .map_err(drop)?;
                let mapped =
                    unruh_second_qubit(&initial_state(&params).map_err(drop)?, r).map_err(drop)?;
                check_density(&closed, STATE_TOL).map_err(drop)?;
                Ok(Some(closed.max_abs_diff(&mapped)))
            })
            .record(
                &format!("{name} state vs unruh map"),
                STATE_TOL,
                false,
                "entrywise; unit trace, Hermitian and PSD checked",
            ),
        );
    }

    // concurrence closed forms against Wootters
    checks.push(
        Scan::run(&cube, |Point(x, q, r, _)| {
            let exact = concurrence(&accelerated_color(x, q, r).map_err(drop)?).map_err(drop)?;
            let closed = concurrence_color_closed(x, q, r).map_err(drop)?;
            Ok(Some((exact.value() - closed.value()).abs()))
        })
        .record("color concurrence closed form", tol, false, ""),
    );
    checks.push(
        Scan::run(&cube, |Point(x, p, r, _)| {
            let exact = concurrence(&accelerated_white(x, p, r).map_err(drop)?).map_err(drop)?;
            let closed = concurrence_white_closed(x, p, r).map_err(drop)?;
            Ok(Some((exact.value() - closed.value()).abs()))
        })
        .record(
            "white concurrence closed form",
            tol,
            false,
            "tail coefficient corrected 4 -> 1/2",
        ),
    );
    let printed = |x: f64, p: f64, r: f64| -> Result<f64, ()> {
        let exact = concurrence(&accelerated_white(x, p, r).map_err(drop)?).map_err(drop)?;
        let v = white_closed_with_tail(x, p, r, 4.0)
            .map_err(drop)?
            .clamp(0.0, 1.0);
        Ok((exact.value() - v).abs())
    };
    let anchor = printed(FRAC_1_SQRT_2, 0.9, 0.0).unwrap_or(f64::NAN);
    checks.push(
        Scan::run(&cube, |Point(x, p, r, _)| printed(x, p, r).map(Some)).record(
            "white concurrence, printed tail 4",
            tol,
            true,
            &format!("residual {anchor:.4} at (1/sqrt2, 0.9, 0)"),
        ),
    );

    // white-color closed form under both readings of its cos r factors
    for (name, reading) in [
        ("unfactored", WhiteColorReading::Unfactored),
        ("cos-factored", WhiteColorReading::CosFactored),
    ] {
        let points: Vec<Point> = cube
            .iter()
            .flat_map(|&Point(x, p, r, _)| {
                (0..grid_n).filter_map(move |l| {
                    let q = l as f64 / (grid_n - 1) as f64;
                    (p + q <= 1.0 + 1e-12).then_some(Point(x, p, r, q))
                })
            })
            .collect();
        let scan = Scan::run(&points, |Point(x, p, r, q)| {
            let q = q.min(1.0 - p);
            let params = ModelParams::white_color(x, p, q, r).map_err(drop)?;
            let exact = concurrence(&accelerated_state(&params).map_err(drop)?).map_err(drop)?;
            let closed = whitecolor_closed_raw(x, p, q, r, reading)
                .map_err(drop)?
                .clamp(0.0, 1.0);
            Ok(Some((exact.value() - closed).abs()))
        });
        checks.push(scan.record(
            &format!("white-color concurrence, {name}"),
            tol,
            true,
            "which cos r reading is intended is ambiguous; both are scanned",
        ));
    }

    // single-qubit closed forms against the Bloch engine
    for param in [Param::P, Param::X, Param::R] {
        checks.push(
            Scan::run(&cube, |Point(x, p, r, _)| {
                let base = ModelParams::white(x, p, r).map_err(drop)?;
                if singular_reason(&base, param, QubitForm::Single).is_some() {
                    return Ok(None);
                }
                let fam = AcceleratedFamily::trusted(base, param);
                let numeric = qfi_single(&fam, fam.theta()).map_err(drop)?.value;
                let closed = qfi_single_white_closed(param, x, p, r).map_err(drop)?.value;
                Ok(Some(relative(numeric, closed)))
            })
            .record(
                &format!("single-qubit qfi {} closed form", param.name()),
                SINGLE_QFI_REL_TOL,
                false,
                "relative; pure-state loci skipped",
            ),
        );
    }

    // middle block eigenvalues (kappa1 -+ kappa2) / 16
    checks.push(
        Scan::run(&cube, |Point(x, p, r, _)| {
            let rho = accelerated_white(x, p, r).map_err(drop)?;
            let (a, d, b) = (rho[(1, 1)].re, rho[(2, 2)].re, rho[(1, 2)].norm());
            let half = (a + d) / 2.0;
            let radius = (((a - d) / 2.0).powi(2) + b * b).sqrt();
            let t = kappa_mu_terms(x, p, r).map_err(drop)?;
            let hi = (t.kappa1 + t.kappa2) / 16.0;
            let lo = (t.kappa1 - t.kappa2) / 16.0;
            Ok(Some(
                (hi - half - radius).abs().max((lo - half + radius).abs()),
            ))
        })
        .record(
            "two-qubit block eigenvalues",
            tol,
            false,
            "(kappa1 -+ kappa2) / 16",
        ),
    );

    // closed two-qubit QFI against the spectral engine
    for param in [Param::P, Param::X, Param::R] {
        let residuals: Vec<(f64, (f64, f64, f64))> = cube
            .par_iter()
            .filter_map(|&Point(x, p, r, _)| {
                let base = ModelParams::white(x, p, r).ok()?;
                if singular_reason(&base, param, QubitForm::Two).is_some() {
                    return None;
                }
                let closed = qfi_two_white_closed(param, x, p, r).ok()?.value;
                let fam = AcceleratedFamily::trusted(base, param);
                let numeric = qfi_two_qubit(&fam, fam.theta()).ok()?.value;
                Some((relative(closed, numeric), (x, p, r)))
            })
            .collect();
        let mut sorted: Vec<f64> = residuals.iter().map(|(v, _)| *v).collect();
        sorted.sort_by(f64::total_cmp);
        let median = sorted.get(sorted.len() / 2).copied().unwrap_or(0.0);
        let (worst, at) = residuals
            .iter()
            .copied()
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap_or((0.0, (0.0, 0.0, 0.0)));
        checks.push(CheckRecord {
            name: format!("two-qubit qfi {} closed form", param.name()),
            grid: residuals.len(),
            max_residual: worst,
            threshold: SINGLE_QFI_REL_TOL,
            passed: worst <= SINGLE_QFI_REL_TOL,
            ledgered: true,
            notes: format!(
                "relative; median {median:.3e}; worst at ({:.4}, {:.4}, {:.4}); epsilon = 0 and rank-deficient points skipped",
                at.0, at.1, at.2
            ),
        });
    }

    // data-processing inequality: tracing out a qubit cannot add information
    for (name, channel) in [("white", Channel::White), ("color", Channel::Color)] {
        let mut violations = 0;
        let mut record = Scan::empty();
        for &param in channel.params() {
            let scan = Scan::run(&cube, |Point(x, s, r, _)| {
                let base = match channel {
                    Channel::White => ModelParams::white(x, s, r),
                    _ => ModelParams::color(x, s, r),
                }
                .map_err(drop)?;
                if singular_reason(&base, param, QubitForm::Two).is_some()
                    || singular_reason(&base, param, QubitForm::Single).is_some()
                {
                    return Ok(None);
                }
                let fam = AcceleratedFamily::trusted(base, param);
                let two = qfi_two_qubit(&fam, fam.theta()).map_err(drop)?.value;
                let one = qfi_single(&fam, fam.theta()).map_err(drop)?.value;
                Ok(Some((one - two).max(0.0)))
            });
            violations += usize::from(scan.worst > DPI_SLACK);
            record = record.merge(scan);
        }
        let mut check = record.record(
            &format!("data processing inequality, {name}"),
            DPI_SLACK,
            false,
            "shortfall of two-qubit below single-qubit qfi",
        );
        push_note(
            &mut check.notes,
            &format!("{violations} parameters with violations"),
        );
        checks.push(check);
    }

    VerificationReport { checks }
}
