//! Similarity scorers: the pluggable judge behind pseudo-label filtering.
//!
//! Two implementations ship with the crate: a deterministic keyword
//! matcher for offline runs and tests, and a client for a remote scoring
//! service speaking a minimal JSON-over-HTTP contract
//! (`POST /score` with a multipart region image + expression, answering
//! `{"score": s}`).

use std::io::Cursor;
use std::time::Duration;

use thiserror::Error;

use super::Triplet;
use crate::mask::BBox;

#[derive(Debug, Error)]
pub enum ScorerError {
    #[error("cannot score a candidate with an empty mask")]
    EmptyRegion,
    #[error("failed to read image {path}: {message}")]
    ImageRead { path: String, message: String },
    #[error("request failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("scorer returned an unusable response: {0}")]
    BadResponse(String),
}

/// Everything a scorer may look at for one candidate.
pub struct ScoreContext<'a> {
    pub triplet: &'a Triplet,
    /// Padded crop around the mask extent; `None` when the mask is empty.
    pub region: Option<BBox>,
}

/// Maps an (image region, expression) pair to a similarity in `[0, 1]`.
pub trait SimilarityScorer: Sync {
    fn score(&self, ctx: &ScoreContext) -> Result<f64, ScorerError>;
}

/// Deterministic offline scorer: 1.0 when every category of the candidate
/// appears in the expression (case-insensitive substring), else 0.0.
/// Candidates without category information score 0.0.
pub struct KeywordScorer;

impl SimilarityScorer for KeywordScorer {
    fn score(&self, ctx: &ScoreContext) -> Result<f64, ScorerError> {
        let t = ctx.triplet;
        if t.categories.is_empty() {
            return Ok(0.0);
        }
        let expression = t.expression.to_lowercase();
        let all_named = t
            .categories
            .iter()
            .all(|c| expression.contains(&c.to_lowercase()));
        Ok(if all_named { 1.0 } else { 0.0 })
    }
}

/// Client for a remote scoring service.
///
/// The candidate's image file is loaded from `triplet.image`, the scored
/// region cropped out and re-encoded as PNG, and both parts posted to the
/// endpoint. Transport errors and 5xx responses are retried up to
/// `retries` times; 4xx responses and malformed bodies fail immediately.
pub struct HttpScorer {
    endpoint: String,
    client: reqwest::blocking::Client,
    retries: u32,
}

impl HttpScorer {
    pub fn new(
        endpoint: impl Into<String>,
        timeout: Duration,
        retries: u32,
    ) -> Result<Self, ScorerError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| ScorerError::Transport {
                attempts: 0,
                message: e.to_string(),
            })?;
        Ok(Self {
            endpoint: endpoint.into(),
            client,
            retries,
        })
    }

    fn region_png(&self, ctx: &ScoreContext) -> Result<Vec<u8>, ScorerError> {
        let region = ctx.region.ok_or(ScorerError::EmptyRegion)?;
        let path = &ctx.triplet.image;
        let img = image::open(path).map_err(|e| ScorerError::ImageRead {
            path: path.clone(),
            message: e.to_string(),
        })?;
        let crop = img.crop_imm(
            region.x_min,
            region.y_min,
            region.x_max - region.x_min + 1,
            region.y_max - region.y_min + 1,
        );
        let mut bytes = Cursor::new(Vec::new());
        crop.write_to(&mut bytes, image::ImageFormat::Png)
            .map_err(|e| ScorerError::ImageRead {
                path: path.clone(),
                message: e.to_string(),
            })?;
        Ok(bytes.into_inner())
    }

    fn post_once(
        &self,
        png: Vec<u8>,
        expression: &str,
    ) -> Result<reqwest::blocking::Response, reqwest::Error> {
        let part = reqwest::blocking::multipart::Part::bytes(png)
            .file_name("region.png")
            .mime_str("image/png")
            .expect("static mime string is valid");
        let form = reqwest::blocking::multipart::Form::new()
            .part("region", part)
            .text("expression", expression.to_string());
        self.client.post(&self.endpoint).multipart(form).send()
    }
}

#[derive(serde::Deserialize)]
struct ScoreResponse {
    score: f64,
}

impl SimilarityScorer for HttpScorer {
    fn score(&self, ctx: &ScoreContext) -> Result<f64, ScorerError> {
        let png = self.region_png(ctx)?;
        let mut last_error = String::new();
        let attempts = self.retries + 1;
        for _ in 0..attempts {
            match self.post_once(png.clone(), &ctx.triplet.expression) {
                Ok(response) => {
                    let status = response.status();
                    if status.is_server_error() {
                        last_error = format!("server error {status}");
                        continue;
                    }
                    if !status.is_success() {
                        return Err(ScorerError::BadResponse(format!("status {status}")));
                    }
                    let text = response
                        .text()
                        .map_err(|e| ScorerError::BadResponse(e.to_string()))?;
                    let body: ScoreResponse = serde_json::from_str(&text)
                        .map_err(|e| ScorerError::BadResponse(e.to_string()))?;
                    if !(0.0..=1.0).contains(&body.score) {
                        return Err(ScorerError::BadResponse(format!(
                            "score {} outside [0,1]",
                            body.score
                        )));
                    }
                    return Ok(body.score);
                }
                Err(e) => last_error = e.to_string(),
            }
        }
        Err(ScorerError::Transport {
            attempts,
            message: last_error,
        })
    }
}
