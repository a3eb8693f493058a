//! Sweep specifications: flags, config files and validation.

use std::fmt;
use std::path::PathBuf;

use clap::Args;
use unruh_qfi_core::channels::R_MAX;
use unruh_qfi_core::{Channel, ModelParams, Param, QubitForm};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{flag}: {message}")]
pub struct ParseError {
    pub flag: String,
    pub message: String,
}

impl ParseError {
    pub fn new(flag: &str, message: impl Into<String>) -> Self {
        Self {
            flag: flag.to_owned(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    Concurrence,
    Qfi(Param),
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Concurrence => "concurrence",
            Quantity::Qfi(Param::P) => "qfi-p",
            Quantity::Qfi(Param::Q) => "qfi-q",
            Quantity::Qfi(Param::X) => "qfi-x",
            Quantity::Qfi(Param::R) => "qfi-r",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Numeric,
    Closed,
    Both,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Numeric => "numeric",
            Method::Closed => "closed",
            Method::Both => "both",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    /// Number of grid points, `floor((stop - start) / step) + 1`, with a
    /// little slack so that steps like `(1 - p) / 100` reach `stop`.
    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.len()
            && (self.start + i as f64 * self.step - self.stop).abs() < 1e-9 * self.step
        {
            self.stop
        } else {
            self.start + i as f64 * self.step
        }
    }

    /// `n` intervals over `[start, stop]`.
    pub fn divided(start: f64, stop: f64, n: usize) -> Self {
        Self {
            start,
            stop,
            step: (stop - start) / n as f64,
        }
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub channel: Channel,
    pub vary: Param,
    pub range: Range,
    /// Values of the parameters that are not swept, in `Param::ALL` order.
    /// A list with more than one value yields one series per value.
    pub fixed: Vec<(Param, Vec<f64>)>,
    pub quantity: Quantity,
    pub method: Method,
    pub qfi_form: QubitForm,
    /// Upper bound on `r` accepted by validation.
    pub r_max: f64,
    /// Extra provenance lines, e.g. from a figure preset.
    pub notes: Vec<String>,
}

impl SweepSpec {
    pub fn fixed(&self, param: Param) -> Option<&[f64]> {
        self.fixed
            .iter()
            .find(|(p, _)| *p == param)
            .map(|(_, v)| v.as_slice())
    }

    /// One-line `key=value` echo of the spec.
    pub fn echo(&self) -> String {
        let mut parts = vec![
            format!("channel={}", self.channel.name()),
            format!("vary={}", self.vary.name()),
            format!("range={}", self.range),
        ];
        for (param, values) in &self.fixed {
            let list: Vec<String> = values.iter().map(|v| v.to_string()).collect();
            parts.push(format!("{}={}", param.name(), list.join(",")));
        }
        parts.push(format!("quantity={}", self.quantity.name()));
        parts.push(format!("method={}", self.method.name()));
        if let Quantity::Qfi(_) = self.quantity {
            parts.push(format!("qfi-form={}", form_name(self.qfi_form)));
        }
        parts.join(" ")
    }

    /// Checks every invariant, naming the flag at fault.
    pub fn validate(&self) -> Result<(), ParseError> {
        let Range { start, stop, step } = self.range;
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(ParseError::new("--range", "bounds must be finite"));
        }
        if start >= stop {
            return Err(ParseError::new(
                "--range",
                format!("start {start} must be below stop {stop}"),
            ));
        }
        if step <= 0.0 {
            return Err(ParseError::new(
                "--range",
                format!("step {step} must be positive"),
            ));
        }
        let params = self.channel.params();
        if !params.contains(&self.vary) {
            return Err(ParseError::new(
                "--vary",
                format!(
                    "{} noise has no parameter {}",
                    self.channel.name(),
                    self.vary.name()
                ),
            ));
        }
        for &param in params {
            if param == self.vary {
                if self.fixed(param).is_some() {
                    return Err(ParseError::new(
                        &flag(param),
                        "the swept parameter cannot also be fixed",
                    ));
                }
            } else {
                match self.fixed(param) {
                    None => return Err(ParseError::new(&flag(param), "required for this channel")),
                    Some([]) => {
                        return Err(ParseError::new(&flag(param), "needs at least one value"))
                    }
                    Some(_) => {}
                }
            }
        }
        for (param, _) in &self.fixed {
            if !params.contains(param) {
                return Err(ParseError::new(
                    &flag(*param),
                    format!(
                        "{} noise has no parameter {}",
                        self.channel.name(),
                        param.name()
                    ),
                ));
            }
        }
        match self.quantity {
            Quantity::Concurrence => {}
            Quantity::Qfi(param) => {
                if !params.contains(&param) {
                    return Err(ParseError::new(
                        "--quantity",
                        format!(
                            "{} noise has no parameter {}",
                            self.channel.name(),
                            param.name()
                        ),
                    ));
                }
                if self.method != Method::Numeric && self.channel != Channel::White {
                    return Err(ParseError::new(
                        "--method",
                        "closed-form Fisher information exists for white noise only",
                    ));
                }
                if self.method != Method::Numeric && param == Param::Q {
                    return Err(ParseError::new("--method", "no closed form for q"));
                }
            }
        }
        // the model constraints must hold at both ends of every series
        for combo in self.series() {
            for end in [start, self.range.value(self.range.len() - 1)] {
                let params = self.params_at(&combo, end);
                if let Err(e) = params.validate_with_r_max(self.r_max) {
                    let flag = match e {
                        unruh_qfi_core::Error::Domain { name, .. } if name.len() == 1 => {
                            let p = Param::ALL.iter().find(|p| p.name() == name).copied();
                            match p {
                                Some(p) if p == self.vary => "--range".to_owned(),
                                Some(p) => flag(p),
                                None => "--range".to_owned(),
                            }
                        }
                        _ => match self.vary {
                            Param::P | Param::Q => "--range".to_owned(),
                            _ => "--p/--q".to_owned(),
                        },
                    };
                    return Err(ParseError::new(&flag, e.to_string()));
                }
            }
        }
        Ok(())
    }

    /// Every combination of the fixed values, in `Param::ALL` order with the
    /// last parameter varying fastest.
    pub fn series(&self) -> Vec<Vec<(Param, f64)>> {
        let mut combos: Vec<Vec<(Param, f64)>> = vec![Vec::new()];
        for (param, values) in &self.fixed {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    values.iter().map(move |&v| {
                        let mut next = c.clone();
                        next.push((*param, v));
                        next
                    })
                })
                .collect();
        }
        combos
    }

    /// Parameters at one grid point of one series.
    pub fn params_at(&self, combo: &[(Param, f64)], value: f64) -> ModelParams {
        let mut params = ModelParams {
            channel: self.channel,
            x: 0.0,
            p: 0.0,
            q: 0.0,
            r: 0.0,
        };
        for &(param, v) in combo {
            params = params.with(param, v);
        }
        params.with(self.vary, value)
    }
}

pub fn flag(param: Param) -> String {
    format!("--{}", param.name())
}

pub fn form_name(form: QubitForm) -> &'static str {
    match form {
        QubitForm::Single => "single",
        QubitForm::Two => "two",
    }
}

/// Flags accepted by `sweep`, all as raw text so that validation can name the
/// offending flag.
#[derive(Args, Debug, Default, Clone)]
pub struct SweepArgs {
    /// white | color | whitecolor
    #[arg(long)]
    pub channel: Option<String>,
    /// Swept parameter: p | q | x | r
    #[arg(long)]
    pub vary: Option<String>,
    /// start:stop:step
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    /// Scalar or comma list (one series per value)
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub r: Option<String>,
    /// concurrence | qfi-p | qfi-q | qfi-x | qfi-r
    #[arg(long)]
    pub quantity: Option<String>,
    /// numeric | closed | both
    #[arg(long)]
    pub method: Option<String>,
    /// single | two
    #[arg(long = "qfi-form")]
    pub qfi_form: Option<String>,
    /// Output file (default: standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Line-oriented key=value file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const KEYS: [&str; 10] = [
    "channel", "vary", "range", "x", "p", "q", "r", "quantity", "method", "qfi-form",
];

impl SweepArgs {
    fn get(&self, key: &str) -> Option<&String> {
        match key {
            "channel" => self.channel.as_ref(),
            "vary" => self.vary.as_ref(),
            "range" => self.range.as_ref(),
            "x" => self.x.as_ref(),
            "p" => self.p.as_ref(),
            "q" => self.q.as_ref(),
            "r" => self.r.as_ref(),
            "quantity" => self.quantity.as_ref(),
            "method" => self.method.as_ref(),
            "qfi-form" => self.qfi_form.as_ref(),
            _ => None,
        }
    }

    /// Builds the spec from these flags layered over `config` text.
    pub fn to_spec(&self, config: Option<&str>) -> Result<SweepSpec, ParseError> {
        let mut pairs = match config {
            Some(text) => parse_config(text)?,
            None => Vec::new(),
        };
        for key in KEYS {
            if let Some(v) = self.get(key) {
                pairs.retain(|(k, _)| k != key);
                pairs.push((key.to_owned(), v.clone()));
            }
        }
        spec_from_pairs(&pairs)
    }
}

/// Parses `key=value` lines. Blank lines and `#` comments are skipped; keys
/// may carry a leading `--`.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, ParseError> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ParseError::new(
                "--config",
                format!("line {}: expected key=value", n + 1),
            ));
        };
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(ParseError::new(
                "--config",
                format!("line {}: unknown key {key}", n + 1),
            ));
        }
        pairs.retain(|(k, _)| *k != key);
        pairs.push((key, value.trim().to_owned()));
    }
    Ok(pairs)
}

/// A number, or one of `pi/4`, `pi/2`, `1/sqrt2`.
pub fn parse_number(flag: &str, text: &str) -> Result<f64, ParseError> {
    let t = text.trim();
    let named = match t {
        "pi/4" => Some(std::f64::consts::FRAC_PI_4),
        "pi/2" => Some(std::f64::consts::FRAC_PI_2),
        "1/sqrt2" | "1/sqrt(2)" => Some(std::f64::consts::FRAC_1_SQRT_2),
        _ => None,
    };
    match named.map(Ok).unwrap_or_else(|| t.parse::<f64>()) {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ParseError::new(
            flag,
            format!("expected a number, got {t:?}"),
        )),
    }
}

fn parse_list(flag: &str, text: &str) -> Result<Vec<f64>, ParseError> {
    text.split(',').map(|v| parse_number(flag, v)).collect()
}

fn parse_range(text: &str) -> Result<Range, ParseError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(ParseError::new("--range", "expected start:stop:step"));
    };
    Ok(Range {
        start: parse_number("--range", start)?,
        stop: parse_number("--range", stop)?,
        step: parse_number("--range", step)?,
    })
}

pub fn parse_param(flag: &str, text: &str) -> Result<Param, ParseError> {
    Param::ALL
        .into_iter()
        .find(|p| p.name() == text.trim())
        .ok_or_else(|| ParseError::new(flag, format!("expected p | q | x | r, got {text:?}")))
}

fn parse_channel(text: &str) -> Result<Channel, ParseError> {
    [Channel::White, Channel::Color, Channel::WhiteColor]
        .into_iter()
        .find(|c| c.name() == text.trim())
        .ok_or_else(|| {
            ParseError::new(
                "--channel",
                format!("expected white | color | whitecolor, got {text:?}"),
            )
        })
}

fn parse_quantity(text: &str) -> Result<Quantity, ParseError> {
    let all = [
        Quantity::Concurrence,
        Quantity::Qfi(Param::P),
        Quantity::Qfi(Param::Q),
        Quantity::Qfi(Param::X),
        Quantity::Qfi(Param::R),
    ];
    all.into_iter()
        .find(|q| q.name() == text.trim())
        .ok_or_else(|| {
            ParseError::new(
                "--quantity",
                format!("expected concurrence | qfi-p | qfi-q | qfi-x | qfi-r, got {text:?}"),
            )
        })
}

fn parse_method(text: &str) -> Result<Method, ParseError> {
    [Method::Numeric, Method::Closed, Method::Both]
        .into_iter()
        .find(|m| m.name() == text.trim())
        .ok_or_else(|| {
            ParseError::new(
                "--method",
                format!("expected numeric | closed | both, got {text:?}"),
            )
        })
}

fn parse_form(text: &str) -> Result<QubitForm, ParseError> {
    [QubitForm::Single, QubitForm::Two]
        .into_iter()
        .find(|f| form_name(*f) == text.trim())
        .ok_or_else(|| {
            ParseError::new("--qfi-form", format!("expected single | two, got {text:?}"))
        })
}

/// Builds and validates a spec from `key=value` pairs.
pub fn spec_from_pairs(pairs: &[(String, String)]) -> Result<SweepSpec, ParseError> {
    let get = |key: &str| {
        pairs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    };
    let require =
        |key: &str| get(key).ok_or_else(|| ParseError::new(&format!("--{key}"), "required"));

    let channel = parse_channel(require("channel")?)?;
    let vary = parse_param("--vary", require("vary")?)?;
    let range = parse_range(require("range")?)?;
    let mut fixed = Vec::new();
    for param in Param::ALL {
        if let Some(v) = get(param.name()) {
            fixed.push((param, parse_list(&flag(param), v)?));
        }
    }
    let spec = SweepSpec {
        channel,
        vary,
        range,
        fixed,
        quantity: get("quantity")
            .map(parse_quantity)
            .transpose()?
            .unwrap_or(Quantity::Concurrence),
        method: get("method")
            .map(parse_method)
            .transpose()?
            .unwrap_or(Method::Numeric),
        qfi_form: get("qfi-form")
            .map(parse_form)
            .transpose()?
            .unwrap_or(QubitForm::Two),
        r_max: R_MAX,
        notes: Vec::new(),
    };
    spec.validate()?;
    Ok(spec)
}

#[derive(clap::Parser, Debug)]
#[command(name = "sweep", no_binary_name = true)]
struct SweepCli {
    #[command(flatten)]
    args: SweepArgs,
}

/// Parses `sweep` flags (without the subcommand name). `config` is the text
/// of the file named by `--config`, if the caller has read it.
pub fn parse_spec<I, S>(argv: I, config: Option<&str>) -> Result<SweepSpec, ParseError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = SweepCli::try_parse_from(argv).map_err(|e| {
        let flag = match e.get(clap::error::ContextKind::InvalidArg) {
            Some(clap::error::ContextValue::String(s)) => s.clone(),
            _ => "sweep".to_owned(),
        };
        ParseError::new(&flag, e.kind().to_string())
    })?;
    cli.args.to_spec(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(line: &str) -> Result<SweepSpec, ParseError> {
        parse_spec(line.split_whitespace(), None)
    }

    #[test]
    fn maps_flags_to_fields() {
        let spec = parse(
            "--channel white --vary p --range 0:1:0.01 --x 0.2 --r 0,0.5,0.8 --quantity concurrence --method both",
        );
        // r = 0.8 is outside the default domain
        assert_eq!(spec.unwrap_err().flag, "--r");

        let spec = parse(
            "--channel white --vary p --range 0:1:0.01 --x 0.2 --r 0,0.5,0.7 --quantity concurrence --method both",
        )
        .unwrap();
        assert_eq!(spec.channel, Channel::White);
        assert_eq!(spec.vary, Param::P);
        assert_eq!(spec.range.len(), 101);
        assert_eq!(spec.series().len(), 3);
        assert_eq!(spec.method, Method::Both);
        assert_eq!(spec.fixed(Param::X), Some(&[0.2][..]));
    }

    #[test]
    fn rejects_reversed_range() {
        let e = parse("--channel white --vary p --range 1:0:0.1 --x 0.2 --r 0").unwrap_err();
        assert_eq!(e.flag, "--range");
    }

    #[test]
    fn rejects_excess_noise_weight() {
        let e = parse("--channel whitecolor --vary x --range 0:1:0.1 --p 0.7 --q 0.5 --r 0")
            .unwrap_err();
        assert_eq!(e.flag, "--p/--q");
    }

    #[test]
    fn names_missing_and_foreign_flags() {
        assert_eq!(
            parse("--channel white --vary p --range 0:1:0.1 --r 0")
                .unwrap_err()
                .flag,
            "--x"
        );
        assert_eq!(
            parse("--channel white --vary p --range 0:1:0.1 --x 0.1 --r 0 --q 0.2")
                .unwrap_err()
                .flag,
            "--q"
        );
        assert_eq!(
            parse("--channel color --vary q --range 0:1:0.1 --x 0.1 --r 0 --quantity qfi-q --method closed")
                .unwrap_err()
                .flag,
            "--method"
        );
        assert_eq!(
            parse("--channel white --vary p --range 0:1:0.1 --x 0.1 --r 0 --bogus 1")
                .unwrap_err()
                .flag,
            "--bogus"
        );
        assert_eq!(parse("--channel blue").unwrap_err().flag, "--channel");
    }

    #[test]
    fn flags_override_config() {
        let config = "# sweep\nchannel = white\nvary=p\nrange=0:1:0.5\nx=0.3\nr=0.1\n";
        let spec = parse_spec(["--x", "0.6"], Some(config)).unwrap();
        assert_eq!(spec.fixed(Param::X), Some(&[0.6][..]));
        assert_eq!(spec.fixed(Param::R), Some(&[0.1][..]));
        assert_eq!(parse_config("nonsense").unwrap_err().flag, "--config");
    }

    #[test]
    fn row_count_reaches_stop() {
        let r = Range::divided(0.0, 0.3, 100);
        assert_eq!(r.len(), 101);
        assert_eq!(r.value(100), 0.3);
        let r = Range {
            start: 0.0,
            stop: 1.0,
            step: 0.3,
        };
        assert_eq!(r.len(), 4);
        assert!((r.value(3) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn named_constants() {
        assert_eq!(
            parse_number("--r", "pi/4").unwrap(),
            std::f64::consts::FRAC_PI_4
        );
        assert!(parse_number("--r", "nan").is_err());
    }
}
