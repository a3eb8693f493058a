//! Grid evaluation and CSV emission.

use std::io::{self, Write};

use rayon::prelude::*;
use unruh_qfi_core::channels::accelerated_state_unchecked;
use unruh_qfi_core::entanglement::{concurrence, concurrence_closed};
use unruh_qfi_core::fisher::{
    qfi_single, qfi_single_closed, qfi_two_closed, qfi_two_qubit, singular_reason,
    AcceleratedFamily, DEFAULT_STEP, SINGULAR_MARGIN,
};
use unruh_qfi_core::{ModelParams, Param, QubitForm};

use crate::spec::{form_name, Method, Quantity, SweepSpec};

/// Significant digits written per cell.
pub const DIGITS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<String>,
    /// `None` marks a singular point or a failed evaluation.
    pub rows: Vec<Vec<Option<f64>>>,
    pub provenance: Vec<String>,
    pub empty_cells: usize,
}

struct Column {
    combo: Vec<(Param, f64)>,
    closed: bool,
}

/// Evaluates `spec` on its grid. Rows are computed in parallel and kept in
/// ascending order of the swept parameter.
pub fn run_sweep(spec: &SweepSpec) -> SweepTable {
    let methods: &[bool] = match spec.method {
        Method::Numeric => &[false],
        Method::Closed => &[true],
        Method::Both => &[false, true],
    };
    let series = spec.series();
    let mut columns = vec![spec.vary.name().to_owned()];
    let mut plan = Vec::new();
    for combo in &series {
        for &closed in methods {
            columns.push(column_name(spec, combo, closed));
            plan.push(Column {
                combo: combo.clone(),
                closed,
            });
        }
    }

    let rows: Vec<Vec<Option<f64>>> = (0..spec.range.len())
        .into_par_iter()
        .map(|i| {
            let value = spec.range.value(i);
            let mut row = Vec::with_capacity(plan.len() + 1);
            row.push(Some(value));
            for col in &plan {
                let params = spec.params_at(&col.combo, value);
                row.push(evaluate(spec, &params, col.closed));
            }
            row
        })
        .collect();
    let empty_cells = rows.iter().flatten().filter(|c| c.is_none()).count();

    let mut provenance = vec![
        format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        format!("spec: {}", spec.echo()),
    ];
    provenance.extend(spec.notes.iter().cloned());
    provenance.push(format!(
        "settings: digits={DIGITS} fd_step={DEFAULT_STEP:e} singular_margin={SINGULAR_MARGIN:e} r_max={}",
        spec.r_max
    ));
    provenance.push(format!(
        "empty cells (singular points or failed evaluations): {empty_cells}"
    ));

    SweepTable {
        columns,
        rows,
        provenance,
        empty_cells,
    }
}

fn column_name(spec: &SweepSpec, combo: &[(Param, f64)], closed: bool) -> String {
    let quantity = match spec.quantity {
        Quantity::Concurrence => "concurrence".to_owned(),
        Quantity::Qfi(p) => format!("qfi_{}_{}", p.name(), form_name(spec.qfi_form)),
    };
    let method = if closed { "closed" } else { "numeric" };
    let labels: Vec<String> = combo
        .iter()
        .filter(|(p, _)| spec.fixed(*p).is_some_and(|v| v.len() > 1))
        .map(|(p, v)| format!("{}={}", p.name(), format_value(*v)))
        .collect();
    if labels.is_empty() {
        format!("{quantity}_{method}")
    } else {
        format!("{quantity}_{method}({})", labels.join(";"))
    }
}

fn evaluate(spec: &SweepSpec, params: &ModelParams, closed: bool) -> Option<f64> {
    let value = match spec.quantity {
        Quantity::Concurrence => {
            if closed {
                concurrence_closed(params).ok()?.value()
            } else {
                concurrence(&accelerated_state_unchecked(params))
                    .ok()?
                    .value()
            }
        }
        Quantity::Qfi(param) => {
            if singular_reason(params, param, spec.qfi_form).is_some() {
                return None;
            }
            let fam = AcceleratedFamily::trusted(*params, param);
            let qfi = match (spec.qfi_form, closed) {
                (QubitForm::Single, false) => qfi_single(&fam, fam.theta()),
                (QubitForm::Two, false) => qfi_two_qubit(&fam, fam.theta()),
                (QubitForm::Single, true) => qfi_single_closed(params, param),
                (QubitForm::Two, true) => qfi_two_closed(params, param),
            };
            qfi.ok()?.value
        }
    };
    value.is_finite().then_some(value)
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed,
/// scientific notation outside `[1e-5, 1e12)`.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        return "0".to_owned();
    }
    let sci = format!("{:.*e}", DIGITS - 1, v);
    // rounding may bump the exponent, so read it back
    let (mantissa, e) = sci.split_once('e').expect("exponent");
    let e: i32 = e.parse().expect("exponent");
    if !(-5..DIGITS as i32).contains(&e) {
        let m = trim_zeros(mantissa);
        return format!("{m}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs());
    }
    let decimals = (DIGITS as i32 - 1 - e).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_owned()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes provenance comments, the header and one line per row.
/// `timestamp` adds a generation-time line; every other byte depends on the
/// table alone.
pub fn emit_csv<W: Write>(table: &SweepTable, out: W, timestamp: Option<&str>) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    for line in &table.provenance {
        writeln!(out, "# {line}")?;
    }
    if let Some(t) = timestamp {
        writeln!(out, "# generated {t}")?;
    }
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(&table.columns)?;
    for row in &table.rows {
        writer.write_record(row.iter().map(|c| c.map(format_value).unwrap_or_default()))?;
    }
    writer.flush()?;
    Ok(())
}
