use serde_json::json;

/// Anything that stops a run. Core errors keep their own machine code.
#[derive(Debug)]
pub enum Failure {
    Core(multalg::Error),
    Malformed {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    Schema {
        path: String,
        message: String,
    },
    Io {
        path: String,
        message: String,
    },
    Argument(String),
}

impl Failure {
    pub fn code(&self) -> &'static str {
        match self {
            Failure::Core(e) => e.code(),
            Failure::Malformed { .. } => "MalformedJson",
            Failure::Schema { .. } => "SchemaViolation",
            Failure::Io { .. } => "Io",
            Failure::Argument(_) => "InvalidArgument",
        }
    }

    /// 3 for numerical failures on valid input, 2 for everything else.
    pub fn status(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Malformed {
                path,
                line,
                column,
                message,
            } => format!("{path}:{line}:{column}: {message}"),
            Failure::Schema { path, message } => format!("{path}: {message}"),
            Failure::Io { path, message } => format!("{path}: {message}"),
            Failure::Argument(m) => m.clone(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut err = json!({
            "code": self.code(),
            "message": self.message(),
            "status": self.status(),
        });
        if let Failure::Malformed { line, column, .. } = self {
            err["line"] = json!(line);
            err["column"] = json!(column);
        }
        json!({ "error": err })
    }
}

impl From<multalg::Error> for Failure {
    fn from(e: multalg::Error) -> Self {
        Failure::Core(e)
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;
