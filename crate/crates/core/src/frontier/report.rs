use serde::Serialize;

/// One named assertion with the values it compared.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl Check {
    /// `|measured − expected| ≤ tol · |expected|`.
    pub fn relative(name: &str, measured: f64, expected: f64, tol: f64) -> Self {
        let passed = (measured - expected).abs() <= tol * expected.abs();
        Self { name: name.into(), passed, measured, expected, tolerance: tol }
    }

    pub fn absolute(name: &str, measured: f64, expected: f64, tol: f64) -> Self {
        let passed = (measured - expected).abs() <= tol;
        Self { name: name.into(), passed, measured, expected, tolerance: tol }
    }

    /// `measured ≤ bound + tol`.
    pub fn at_most(name: &str, measured: f64, bound: f64, tol: f64) -> Self {
        Self { name: name.into(), passed: measured <= bound + tol, measured, expected: bound, tolerance: tol }
    }

    /// `measured ≥ bound`, exact.
    pub fn at_least(name: &str, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), passed: measured >= bound, measured, expected: bound, tolerance: 0.0 }
    }

    pub fn exact(name: &str, measured: f64, expected: f64) -> Self {
        Self { name: name.into(), passed: measured == expected, measured, expected, tolerance: 0.0 }
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Self { name: name.into(), passed: ok, measured: v, expected: 1.0, tolerance: 0.0 }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
