//! Validation findings shared by the graph and flow manifest checks.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    DanglingEdge,
    NonPositiveH,
    NonIntegralH,
    BadOmega,
    DuplicateId,
    NonFiberVertex,
    OrientationMismatch,
    AmbiguousBandOrientation,
    UnknownReference,
    NonPositiveLeafLength,
    UnequalSeifertLengths,
    SideMismatch,
    NotFlowTransverse,
    BadSegment,
    EmptyLoop,
}

impl DiagnosticKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticKind::DanglingEdge => "DanglingEdge",
            DiagnosticKind::NonPositiveH => "NonPositiveH",
            DiagnosticKind::NonIntegralH => "NonIntegralH",
            DiagnosticKind::BadOmega => "BadOmega",
            DiagnosticKind::DuplicateId => "DuplicateId",
            DiagnosticKind::NonFiberVertex => "NonFiberVertex",
            DiagnosticKind::OrientationMismatch => "OrientationMismatch",
            DiagnosticKind::AmbiguousBandOrientation => "AmbiguousBandOrientation",
            DiagnosticKind::UnknownReference => "UnknownReference",
            DiagnosticKind::NonPositiveLeafLength => "NonPositiveLeafLength",
            DiagnosticKind::UnequalSeifertLengths => "UnequalSeifertLengths",
            DiagnosticKind::SideMismatch => "SideMismatch",
            DiagnosticKind::NotFlowTransverse => "NotFlowTransverse",
            DiagnosticKind::BadSegment => "BadSegment",
            DiagnosticKind::EmptyLoop => "EmptyLoop",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub severity: Severity,
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{sev}[{}] {}: {}",
            self.kind.as_str(),
            self.subject,
            self.message
        )
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}

impl Diagnostic {
    pub fn error(
        kind: DiagnosticKind,
        subject: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Diagnostic {
            kind,
            severity: Severity::Error,
            subject: subject.into(),
            message: message.into(),
        }
    }

    pub fn warning(
        kind: DiagnosticKind,
        subject: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Diagnostic {
            kind,
            severity: Severity::Warning,
            subject: subject.into(),
            message: message.into(),
        }
    }
}
