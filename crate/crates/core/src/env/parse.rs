//! Normalization of free-form action lines into ground actions.
//!
//! Schema words and connectives match case-insensitively; object symbols
//! must match exactly. Multi-word schema spellings (`jack up`, `put away`)
//! are recognized by hyphen-joining up to three consecutive tokens.

use super::engine::{MetaAction, ParsedAction};
use super::schema::{Domain, GroundAction};
use super::state::ObjectTable;

const MAX_KEYWORD_TOKENS: usize = 3;

fn strip_line(raw: &str) -> &str {
    let t = raw.trim();
    t.strip_suffix('.').unwrap_or(t).trim()
}

/// Recognizes the two meta-actions on an already stripped line.
pub fn meta_action(line: &str) -> Option<MetaAction> {
    let norm = strip_line(line)
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase();
    match norm.as_str() {
        "check valid actions" => Some(MetaAction::CheckValidActions),
        "look around" => Some(MetaAction::LookAround),
        _ => None,
    }
}

impl Domain {
    fn keyword(&self, candidate: &str) -> Option<u8> {
        if let Some(id) = self.schema_id(candidate) {
            return Some(id);
        }
        self.spec
            .aliases
            .iter()
            .find(|(alias, _)| *alias == candidate)
            .and_then(|(_, target)| self.schema_id(target))
    }

    /// Maps a raw action line to a ground action, a meta-action, or
    /// `Unparseable` carrying the raw text. Never fails.
    pub fn normalize_action(&self, objects: &ObjectTable, raw: &str) -> ParsedAction {
        if let Some(meta) = meta_action(raw) {
            return ParsedAction::Meta(meta);
        }
        let unparseable = || ParsedAction::Unparseable(raw.to_string());
        let tokens: Vec<&str> = strip_line(raw).split_whitespace().collect();

        let mut schema = None;
        let mut args = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            if schema.is_none() {
                let longest = MAX_KEYWORD_TOKENS.min(tokens.len() - i);
                let found = (1..=longest).rev().find_map(|len| {
                    let joined = tokens[i..i + len].join("-").to_lowercase();
                    self.keyword(&joined).map(|id| (id, len))
                });
                if let Some((id, len)) = found {
                    schema = Some(id);
                    i += len;
                    continue;
                }
            }
            let tok = tokens[i];
            if let Some(id) = objects.id(tok) {
                args.push(id);
            } else if !self.spec.fillers.contains(&tok.to_lowercase().as_str()) {
                return unparseable();
            }
            i += 1;
        }

        let Some(schema) = schema else {
            return unparseable();
        };
        if args.len() > super::schema::MAX_ACTION_ARITY {
            return unparseable();
        }
        let action = GroundAction::new(schema, &args);
        if self.is_well_typed(objects, &action) {
            ParsedAction::Ground(action)
        } else {
            unparseable()
        }
    }
}
