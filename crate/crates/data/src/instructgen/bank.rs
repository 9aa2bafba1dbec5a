use std::path::Path;

use thiserror::Error;

pub const PREFIX_COUNT: usize = 20;
pub const BODY_COUNT: usize = 20;
pub const PLACEHOLDERS: [&str; 5] = ["image", "psmiles", "descriptors", "property", "unit"];

const DEFAULT_BANK: &str = include_str!("../../data/templates.txt");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BankError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("expected {expected} {section}, found {found}")]
    Count { section: &'static str, expected: usize, found: usize },
    #[error("body {index}: placeholder {{{name}}} appears {count} times")]
    Placeholder { index: usize, name: String, count: usize },
    #[error("{0}")]
    Io(String),
}

/// Instruction prefixes and prediction bodies.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateBank {
    pub prefixes: Vec<String>,
    pub bodies: Vec<String>,
}

/// Names inside `{...}` in order of appearance.
pub(crate) fn placeholders(template: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        match after.find('}') {
            Some(close) => {
                out.push(&after[..close]);
                rest = &after[close + 1..];
            }
            None => break,
        }
    }
    out
}

impl TemplateBank {
    /// The bank shipped with the crate.
    pub fn builtin() -> TemplateBank {
        TemplateBank::parse(DEFAULT_BANK).expect("built-in template bank is valid")
    }

    pub fn load(path: &Path) -> Result<TemplateBank, BankError> {
        let text = std::fs::read_to_string(path).map_err(|e| BankError::Io(format!("{}: {e}", path.display())))?;
        TemplateBank::parse(&text)
    }

    /// Sections `[prefixes]` and `[bodies]`, one template per line; `#`
    /// starts a comment line.
    pub fn parse(text: &str) -> Result<TemplateBank, BankError> {
        let mut prefixes = Vec::new();
        let mut bodies = Vec::new();
        let mut section: Option<&mut Vec<String>> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line {
                "[prefixes]" => section = Some(&mut prefixes),
                "[bodies]" => section = Some(&mut bodies),
                l if l.starts_with('[') && l.ends_with(']') => {
                    return Err(BankError::Syntax { line: i + 1, reason: format!("unknown section {l}") })
                }
                l => match section.as_deref_mut() {
                    Some(v) => v.push(l.to_string()),
                    None => return Err(BankError::Syntax { line: i + 1, reason: "template outside a section".into() }),
                },
            }
        }
        let bank = TemplateBank { prefixes, bodies };
        bank.validate()?;
        Ok(bank)
    }

    pub fn validate(&self) -> Result<(), BankError> {
        if self.prefixes.len() != PREFIX_COUNT {
            return Err(BankError::Count { section: "prefixes", expected: PREFIX_COUNT, found: self.prefixes.len() });
        }
        if self.bodies.len() != BODY_COUNT {
            return Err(BankError::Count { section: "bodies", expected: BODY_COUNT, found: self.bodies.len() });
        }
        for (index, body) in self.bodies.iter().enumerate() {
            let found = placeholders(body);
            for name in PLACEHOLDERS {
                let count = found.iter().filter(|&&f| f == name).count();
                if count != 1 {
                    return Err(BankError::Placeholder { index, name: name.into(), count });
                }
            }
            if let Some(extra) = found.iter().find(|f| !PLACEHOLDERS.contains(f)) {
                return Err(BankError::Placeholder { index, name: extra.to_string(), count: 1 });
            }
        }
        Ok(())
    }
}
