//! Remote plan backend speaking the chat-completions wire protocol, plus
//! the reply parser that turns free-form text into a snapped plan.

use serde::Deserialize;
use serde_json::json;
use thiserror::Error;

use super::grid::GridSummary;
use super::{AdvisorConfig, AdvisorPlan};
use crate::world::{Position, ScenarioConfig};

#[derive(Debug, Error)]
pub enum AdvisorError {
    #[error("plan backend unavailable: {0}")]
    Unavailable(String),
    #[error("cannot parse plan reply: {0}")]
    Parse(String),
}

const SYSTEM_MESSAGE: &str = "You are an expert planner for airborne relay networks. \
Follow the requested output format exactly; the final line of your answer must be the \
bracketed list of coordinate tuples.";

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: String,
}

/// Issue one chat-completions request and return the first choice's
/// message content. Retries once per `max_retries` on transport errors.
pub fn remote_plan(prompt: &str, cfg: &AdvisorConfig) -> Result<String, AdvisorError> {
    let token = std::env::var(&cfg.api_key_env).unwrap_or_default();
    let client = reqwest::blocking::Client::builder()
        .timeout(std::time::Duration::from_secs(cfg.timeout_secs))
        .build()
        .map_err(|e| AdvisorError::Unavailable(e.to_string()))?;
    let body = json!({
        "model": cfg.model,
        "messages": [
            {"role": "system", "content": SYSTEM_MESSAGE},
            {"role": "user", "content": prompt},
        ],
        "temperature": cfg.temperature,
    });
    let mut last_err = String::new();
    for _attempt in 0..=cfg.max_retries {
        let mut request = client.post(&cfg.endpoint).json(&body);
        if !token.is_empty() {
            request = request.bearer_auth(&token);
        }
        match request.send() {
            Ok(response) => {
                if !response.status().is_success() {
                    last_err = format!("status {}", response.status());
                    continue;
                }
                match response.json::<ChatResponse>() {
                    Ok(parsed) => {
                        return parsed
                            .choices
                            .into_iter()
                            .next()
                            .map(|c| c.message.content)
                            .ok_or_else(|| {
                                AdvisorError::Unavailable("empty choices".to_string())
                            });
                    }
                    Err(e) => last_err = e.to_string(),
                }
            }
            Err(e) => last_err = e.to_string(),
        }
    }
    Err(AdvisorError::Unavailable(last_err))
}

/// Scan for the first bracketed list of numeric tuples.
fn extract_tuples(raw: &str) -> Option<Vec<(f64, f64)>> {
    let bytes = raw.as_bytes();
    for start in 0..bytes.len() {
        if bytes[start] != b'[' {
            continue;
        }
        if let Some(tuples) = parse_tuple_list(&raw[start + 1..]) {
            if !tuples.is_empty() {
                return Some(tuples);
            }
        }
    }
    None
}

/// Parse `(x, y[, z]), ... ]` starting right after the opening bracket.
fn parse_tuple_list(text: &str) -> Option<Vec<(f64, f64)>> {
    let mut tuples = Vec::new();
    let mut rest = text.trim_start();
    loop {
        rest = rest.strip_prefix('(')?.trim_start();
        let mut nums = Vec::new();
        loop {
            let end = rest
                .find(|ch: char| !(ch.is_ascii_digit() || "+-.eE".contains(ch)))
                .unwrap_or(rest.len());
            let num: f64 = rest[..end].trim().parse().ok()?;
            nums.push(num);
            rest = rest[end..].trim_start();
            match rest.chars().next()? {
                ',' => rest = rest[1..].trim_start(),
                ')' => {
                    rest = rest[1..].trim_start();
                    break;
                }
                _ => return None,
            }
        }
        if nums.len() < 2 || nums.len() > 3 {
            return None;
        }
        tuples.push((nums[0], nums[1]));
        match rest.chars().next()? {
            ',' => rest = rest[1..].trim_start(),
            ']' => return Some(tuples),
            _ => return None,
        }
    }
}

/// Turn a raw backend reply into a plan: extract the first tuple list,
/// snap each point to the nearest cell center, and truncate or pad (with
/// heuristic placements, flagged in the provenance id) to exactly
/// `n_uav` positions.
pub fn parse_plan(
    raw: &str,
    summary: &GridSummary,
    scenario: &ScenarioConfig,
    backend_id: &str,
    issued_at_step: usize,
) -> Result<AdvisorPlan, AdvisorError> {
    let tuples =
        extract_tuples(raw).ok_or_else(|| AdvisorError::Parse("no tuple list found".into()))?;
    let side = summary.side_length;
    let mut positions: Vec<Position> = tuples
        .into_iter()
        .take(scenario.n_uav)
        .map(|(x, y)| {
            let (r, c) = summary.nearest_cell(x.clamp(0.0, side), y.clamp(0.0, side));
            let (cx, cy) = summary.center(r, c);
            Position::new(cx, cy, scenario.uav_altitude)
        })
        .collect();
    let mut id = backend_id.to_string();
    if positions.len() < scenario.n_uav {
        let filler = super::heuristic::heuristic_plan(summary, scenario);
        positions.extend(filler.positions.into_iter().take(scenario.n_uav - positions.len()));
        id.push_str("+padded");
    }
    if positions.len() != scenario.n_uav {
        return Err(AdvisorError::Parse(format!(
            "expected {} positions, repaired to {}",
            scenario.n_uav,
            positions.len()
        )));
    }
    Ok(AdvisorPlan { positions, backend_id: id, issued_at_step, verified: false })
}
