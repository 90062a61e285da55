//! Human gameplay transcripts in `[CLS] obs [SEP] act [SEP] next obs [SEP]
//! next act [SEP]` form, and the action targets they contain.

use std::collections::HashMap;
use std::io::{self, Read};

use serde::{Deserialize, Serialize};

use crate::text::normalize;

const CLS: &str = "[CLS]";
const SEP: &str = "[SEP]";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClubFloydPair {
    pub observation: String,
    pub action: String,
    pub next_observation: String,
    pub next_action: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClubFloydParse {
    pub pairs: Vec<ClubFloydPair>,
    /// Groups (or stray text outside any group) that did not parse.
    pub skipped: usize,
}

fn parse_group(body: &str) -> Option<ClubFloydPair> {
    let parts: Vec<&str> = body.split(SEP).collect();
    if parts.len() != 5 || !parts[4].trim().is_empty() {
        return None;
    }
    let field = |i: usize| parts[i].trim().to_string();
    let pair = ClubFloydPair { observation: field(0), action: field(1), next_observation: field(2), next_action: field(3) };
    if pair.observation.is_empty() || pair.action.is_empty() {
        return None;
    }
    Some(pair)
}

pub fn parse_clubfloyd_str(input: &str) -> ClubFloydParse {
    let mut parse = ClubFloydParse::default();
    let mut chunks = input.split(CLS);
    if chunks.next().is_some_and(|lead| !lead.trim().is_empty()) {
        parse.skipped += 1;
    }
    for chunk in chunks {
        match parse_group(chunk) {
            Some(pair) => parse.pairs.push(pair),
            None => parse.skipped += 1,
        }
    }
    parse
}

/// Parses a transcript stream. Malformed groups are counted, not errors.
pub fn parse_clubfloyd<R: Read>(mut reader: R) -> io::Result<ClubFloydParse> {
    let mut input = String::new();
    reader.read_to_string(&mut input)?;
    Ok(parse_clubfloyd_str(&input))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionTarget {
    pub surface: String,
    pub normalized: String,
    pub count: usize,
}

/// Everything after the first whitespace-delimited token of an action.
pub fn action_target_of(action: &str) -> Option<&str> {
    let trimmed = action.trim();
    let (_, rest) = trimmed.split_once(char::is_whitespace)?;
    let rest = rest.trim();
    (!rest.is_empty()).then_some(rest)
}

/// Strips the verb from each pair's action and counts the remaining targets
/// by normalized form, in first-seen order. Directions count too: `go north`
/// yields `north`.
pub fn extract_action_targets(pairs: &[ClubFloydPair]) -> Vec<ActionTarget> {
    let mut targets: Vec<ActionTarget> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for pair in pairs {
        let Some(surface) = action_target_of(&pair.action) else { continue };
        let normalized = normalize(surface);
        match index.get(&normalized) {
            Some(&i) => targets[i].count += 1,
            None => {
                index.insert(normalized.clone(), targets.len());
                targets.push(ActionTarget { surface: surface.to_string(), normalized, count: 1 });
            }
        }
    }
    targets
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(obs: &str, act: &str) -> String {
        format!("[CLS] {obs} [SEP] {act} [SEP] next {obs} [SEP] next {act} [SEP]\n")
    }

    fn pairs(actions: &[&str]) -> Vec<ClubFloydPair> {
        actions
            .iter()
            .map(|a| ClubFloydPair {
                observation: "room".into(),
                action: a.to_string(),
                next_observation: String::new(),
                next_action: String::new(),
            })
            .collect()
    }

    fn counts(targets: &[ActionTarget]) -> Vec<(&str, usize)> {
        targets.iter().map(|t| (t.normalized.as_str(), t.count)).collect()
    }

    #[test]
    fn one_group() {
        let parse = parse_clubfloyd_str(&group("A dusty attic.", "take lamp"));
        assert_eq!(parse.skipped, 0);
        assert_eq!(
            parse.pairs,
            vec![ClubFloydPair {
                observation: "A dusty attic.".into(),
                action: "take lamp".into(),
                next_observation: "next A dusty attic.".into(),
                next_action: "next take lamp".into(),
            }]
        );
    }

    #[test]
    fn missing_final_sep_is_skipped() {
        let parse = parse_clubfloyd_str("[CLS] obs [SEP] act [SEP] obs2 [SEP] act2");
        assert!(parse.pairs.is_empty());
        assert_eq!(parse.skipped, 1);
    }

    #[test]
    fn groups_keep_input_order() {
        let input = [group("one", "take a"), group("two", "take b"), group("three", "take c")].concat();
        let parse = parse_clubfloyd(input.as_bytes()).unwrap();
        let obs: Vec<_> = parse.pairs.iter().map(|p| p.observation.as_str()).collect();
        assert_eq!(obs, vec!["one", "two", "three"]);
        assert_eq!(parse.skipped, 0);
    }

    #[test]
    fn empty_action_is_malformed() {
        let parse = parse_clubfloyd_str("junk [CLS] obs [SEP]  [SEP] x [SEP] y [SEP]");
        assert_eq!(parse.skipped, 2);
    }

    #[test]
    fn targets_from_actions() {
        assert_eq!(counts(&extract_action_targets(&pairs(&["take lamp", "open door", "look"]))), vec![("lamp", 1), ("door", 1)]);
        assert_eq!(counts(&extract_action_targets(&pairs(&["take lamp", "rub  LAMP"]))), vec![("lamp", 2)]);
        assert_eq!(counts(&extract_action_targets(&pairs(&["go north"]))), vec![("north", 1)]);
        let t = extract_action_targets(&pairs(&["Take Brass  Lamp"]));
        assert_eq!(t[0].surface, "Brass  Lamp");
        assert_eq!(t[0].normalized, "brass lamp");
    }
}
