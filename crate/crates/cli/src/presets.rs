//! Figure presets: one sweep per plotted panel.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use unruh_qfi_core::{Channel, Param, QubitForm};

use crate::spec::{Method, Quantity, Range, SweepSpec};

/// Largest `r` quoted by the figure legends; it slightly exceeds `pi/4`.
pub const PRESET_R_MAX: f64 = 0.8;

/// Points per panel, minus one.
const INTERVALS: usize = 100;

const R_SERIES: [f64; 3] = [0.0, 0.5, 0.8];
const X_SERIES: [f64; 3] = [0.2, 0.4, FRAC_1_SQRT_2];

pub const PRESET_NAMES: [&str; 26] = [
    "fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "fig4a", "fig4b",
    "fig5a", "fig5b", "fig5c", "fig6a", "fig6b", "fig7a", "fig7b", "fig8a", "fig8b", "fig9a",
    "fig9b", "fig10a", "fig10b", "fig11a", "fig11b", "fig11c",
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown preset {name:?}; valid presets: {}", PRESET_NAMES.join(", "))]
pub struct UnknownPreset {
    pub name: String,
}

struct Panel {
    channel: Channel,
    vary: Param,
    range: (f64, f64),
    fixed: Vec<(Param, Vec<f64>)>,
    quantity: Quantity,
    form: QubitForm,
    notes: Vec<String>,
}

impl Panel {
    fn new(channel: Channel, vary: Param, quantity: Quantity) -> Self {
        let range = if vary == Param::R {
            (0.0, FRAC_PI_4)
        } else {
            (0.0, 1.0)
        };
        Self {
            channel,
            vary,
            range,
            fixed: Vec::new(),
            quantity,
            form: QubitForm::Two,
            notes: Vec::new(),
        }
    }

    fn fix(mut self, param: Param, values: &[f64]) -> Self {
        self.fixed.push((param, values.to_vec()));
        self.fixed.sort_by_key(|(p, _)| *p);
        self
    }

    fn form(mut self, form: QubitForm) -> Self {
        self.form = form;
        self
    }

    fn upto(mut self, stop: f64, note: String) -> Self {
        self.range.1 = stop;
        self.notes.push(note);
        self
    }

    fn into_spec(self, name: &str) -> SweepSpec {
        let method = match (self.quantity, self.channel) {
            (Quantity::Concurrence, _) | (_, Channel::White) => Method::Both,
            _ => Method::Numeric,
        };
        let mut notes = vec![format!("preset {name}")];
        notes.extend(self.notes);
        let quotes_08 = self
            .fixed
            .iter()
            .any(|(p, v)| *p == Param::R && v.iter().any(|&r| r > FRAC_PI_4));
        if quotes_08 {
            notes.push(format!(
                "warning: r = {PRESET_R_MAX} exceeds pi/4 = {FRAC_PI_4:.6}; the domain is widened to r <= {PRESET_R_MAX} for this preset"
            ));
        }
        SweepSpec {
            channel: self.channel,
            vary: self.vary,
            range: Range::divided(self.range.0, self.range.1, INTERVALS),
            fixed: self.fixed,
            quantity: self.quantity,
            method,
            qfi_form: self.form,
            r_max: PRESET_R_MAX,
            notes,
        }
    }
}

/// The sweep reproducing one figure panel.
pub fn figure_preset(name: &str) -> Result<SweepSpec, UnknownPreset> {
    use Channel::{Color, White, WhiteColor};
    use Param::{P, Q, R, X};
    use Quantity::{Concurrence, Qfi};

    let pick = |i: usize, values: &[f64]| -> f64 { values[i] };
    let (fig, panel) = name
        .strip_prefix("fig")
        .and_then(|rest| rest.split_at_checked(rest.len().saturating_sub(1)))
        .ok_or_else(|| UnknownPreset {
            name: name.to_owned(),
        })?;
    let i = match panel {
        "a" => 0,
        "b" => 1,
        "c" => 2,
        _ => usize::MAX,
    };
    let unknown = || UnknownPreset {
        name: name.to_owned(),
    };
    if !PRESET_NAMES.contains(&name) {
        return Err(unknown());
    }
    let forms = [QubitForm::Single, QubitForm::Two];

    let panel = match fig {
        "1" => Panel::new(White, P, Concurrence)
            .fix(X, &[pick(i, &X_SERIES)])
            .fix(R, &R_SERIES),
        "2" => Panel::new(White, X, Concurrence)
            .fix(P, &[pick(i, &[0.4, 0.8])])
            .fix(R, &R_SERIES),
        "3" => Panel::new(Color, Q, Concurrence)
            .fix(X, &[pick(i, &X_SERIES)])
            .fix(R, &R_SERIES),
        "4" => Panel::new(Color, X, Concurrence)
            .fix(Q, &[pick(i, &[0.4, 0.8])])
            .fix(R, &R_SERIES),
        "5" => {
            let p = pick(i, &[0.2, 0.5, 0.8]);
            Panel::new(WhiteColor, Q, Concurrence)
                .fix(P, &[p])
                .fix(X, &[0.4])
                .fix(R, &R_SERIES)
                .upto(
                    1.0 - p,
                    format!(
                        "q restricted to [0, 1 - p] = [0, {}] so that p + q <= 1",
                        1.0 - p
                    ),
                )
        }
        "6" => Panel::new(WhiteColor, X, Concurrence)
            .fix(P, &[pick(i, &[0.5, 0.8])])
            .fix(Q, &[0.2])
            .fix(R, &R_SERIES),
        "7" => Panel::new(WhiteColor, R, Concurrence)
            .fix(P, &[pick(i, &[0.5, 0.8])])
            .fix(Q, &[0.2])
            .fix(X, &X_SERIES),
        "8" => Panel::new(White, P, Qfi(P))
            .fix(X, &[0.2])
            .fix(R, &R_SERIES)
            .form(forms[i]),
        "9" => Panel::new(White, X, Qfi(X))
            .fix(P, &[0.2])
            .fix(R, &R_SERIES)
            .form(forms[i]),
        "10" => Panel::new(White, R, Qfi(R))
            .fix(P, &[0.2])
            .fix(X, &X_SERIES)
            .form(forms[i]),
        "11" => Panel::new(Color, Q, Qfi([Q, X, R][i]))
            .fix(X, &[0.2])
            .fix(R, &R_SERIES),
        _ => return Err(unknown()),
    };
    Ok(panel.into_spec(name))
}
