use std::fmt::Write as _;

use anyhow::{Context, Result, bail};
use hiervote::Probability;

/// Formats `x` with 12 significant digits, like C's `%.12g`.
pub fn g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Parses `start:stop:steps` into `steps` evenly spaced points, both ends
/// included.
pub fn parse_grid(spec: &str) -> Result<Vec<Probability>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, steps] = parts[..] else {
        bail!("epsilon grid `{spec}` is not of the form start:stop:steps");
    };
    let start: f64 = start
        .trim()
        .parse()
        .with_context(|| format!("bad grid start `{start}`"))?;
    let stop: f64 = stop
        .trim()
        .parse()
        .with_context(|| format!("bad grid stop `{stop}`"))?;
    let steps: usize = steps
        .trim()
        .parse()
        .with_context(|| format!("bad grid step count `{steps}`"))?;
    if steps == 0 {
        bail!("epsilon grid needs at least one point");
    }
    if steps > 1 && !(start < stop) {
        bail!("epsilon grid start {start} must be below stop {stop}");
    }
    (0..steps)
        .map(|i| {
            let eps = if steps == 1 {
                start
            } else if i == steps - 1 {
                stop
            } else {
                start + (stop - start) * i as f64 / (steps - 1) as f64
            };
            Ok(Probability::new(eps)?)
        })
        .collect()
}

/// Comma-separated table with a fixed header.
pub struct Csv {
    out: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut out = header.join(",");
        out.push('\n');
        Csv { out }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.out.push_str(&cells.join(","));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

pub fn json(value: &impl serde::Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    writeln!(s)?;
    Ok(s)
}
