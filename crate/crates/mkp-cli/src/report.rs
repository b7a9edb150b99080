use serde::Serialize;

/// One named verification check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// Interior maximum of the residual on the finest grid used.
    pub residual_max: f64,
    /// Coarse/fine residual ratio where the check is a convergence test.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub seconds: f64,
}

/// Machine-readable verification report; `pass` holds exactly when every
/// check passes.
#[derive(Debug, Clone, Default, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
        self.pass = self.checks.iter().all(|c| c.pass);
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }

    /// Human summary, one line per check.
    pub fn print_summary(&self) {
        for c in &self.checks {
            let ratio = c.ratio.map(|r| format!(", ratio {r:.3}")).unwrap_or_default();
            println!(
                "{} {:<22} residual {:.3e}{}, tol {:.3e}, {:.2}s",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.residual_max,
                ratio,
                c.tolerance,
                c.seconds,
            );
        }
        println!("overall: {}", if self.pass { "PASS" } else { "FAIL" });
    }
}
