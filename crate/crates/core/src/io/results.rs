use serde::Serialize;

use crate::strategy::SwitchPoint;

/// Plain decimal with `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub location: String,
    pub value: f64,
}

/// Values at time 0 with a global bound, in CSV or JSON form.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultFile {
    pub model: String,
    pub level: u32,
    pub epsilon: f64,
    pub intervals: u64,
    pub bound: f64,
    pub rows: Vec<ResultRow>,
    pub switch_points: Vec<SwitchPoint>,
    pub wall_time_ms: f64,
}

#[derive(Serialize)]
struct JsonValue<'a> {
    location: &'a str,
    value: f64,
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct JsonSwitch<'a> {
    location: &'a str,
    time: f64,
    before: &'a str,
    after: &'a str,
}

#[derive(Serialize)]
struct JsonResult<'a> {
    model: &'a str,
    level: u32,
    epsilon: f64,
    intervals: u64,
    bound: f64,
    values: Vec<JsonValue<'a>>,
    switch_points: Vec<JsonSwitch<'a>>,
    wall_time_ms: f64,
}

pub const CSV_HEADER: &str = "location,value,lower,upper";

impl ResultFile {
    fn interval(&self, value: f64) -> (f64, f64) {
        ((value - self.bound).max(0.0), (value + self.bound).min(1.0))
    }

    /// `location,value,lower,upper` with 12 significant digits. With `clamp`
    /// the value column is clamped to `[0, 1]`; switch points follow as
    /// `# switch` comment lines when requested.
    pub fn to_csv(&self, clamp: bool, with_switch_points: bool) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for row in &self.rows {
            let (lower, upper) = self.interval(row.value);
            let shown = if clamp { row.value.clamp(0.0, 1.0) } else { row.value };
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.location,
                format_significant(shown, 12),
                format_significant(lower, 12),
                format_significant(upper, 12)
            ));
        }
        if with_switch_points {
            for p in &self.switch_points {
                out.push_str(&format!(
                    "# switch {} {} {} {}\n",
                    p.location,
                    format_significant(p.time, 12),
                    p.before,
                    p.after
                ));
            }
        }
        out
    }

    pub fn to_json(&self, clamp: bool) -> String {
        let json = JsonResult {
            model: &self.model,
            level: self.level,
            epsilon: self.epsilon,
            intervals: self.intervals,
            bound: self.bound,
            values: self
                .rows
                .iter()
                .map(|r| {
                    let (lower, upper) = self.interval(r.value);
                    JsonValue {
                        location: &r.location,
                        value: if clamp { r.value.clamp(0.0, 1.0) } else { r.value },
                        lower,
                        upper,
                    }
                })
                .collect(),
            switch_points: self
                .switch_points
                .iter()
                .map(|p| JsonSwitch { location: &p.location, time: p.time, before: &p.before, after: &p.after })
                .collect(),
            wall_time_ms: self.wall_time_ms,
        };
        serde_json::to_string_pretty(&json).expect("result serialises") + "\n"
    }
}
