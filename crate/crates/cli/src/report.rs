use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
    Error,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Info => "info",
            Status::Error => "error",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub name: String,
    pub status: Status,
    pub value: Value,
    pub expected: Value,
    pub provenance: String,
}

impl Row {
    pub fn info(name: impl Into<String>, value: impl Into<Value>) -> Self {
        Row { name: name.into(), status: Status::Info, value: value.into(), expected: Value::Null, provenance: "computed".into() }
    }

    pub fn check(name: impl Into<String>, ok: bool, value: impl Into<Value>, expected: impl Into<Value>, provenance: &str) -> Self {
        Row {
            name: name.into(),
            status: Status::from_bool(ok),
            value: value.into(),
            expected: expected.into(),
            provenance: provenance.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config_echo: Value,
    pub results: Vec<Row>,
    pub elapsed_ms: u64,
    /// Headline printed alone on the first line of text output.
    #[serde(skip)]
    pub primary: Option<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| matches!(r.status, Status::Pass | Status::Info))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(p) = &self.primary {
            out.push_str(p);
            out.push('\n');
        }
        for r in &self.results {
            if self.primary.is_some() && r.status == Status::Info {
                continue;
            }
            out.push_str(&format!("{:<5} {}: {}", r.status.label(), r.name, plain(&r.value)));
            if !r.expected.is_null() {
                out.push_str(&format!(" (expected {})", plain(&r.expected)));
            }
            out.push('\n');
        }
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
