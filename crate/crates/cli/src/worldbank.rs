//! World Bank indicators API client with an on-disk response cache.

use std::path::{Path, PathBuf};
use std::time::Duration;

use ardl_core::series::TimeSeries;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const API_BASE: &str = "https://api.worldbank.org/v2";
const PER_PAGE: usize = 1000;
const MAX_ATTEMPTS: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FetchError {
    #[error("request to {url} failed: {message}")]
    Http { url: String, message: String },
    #[error("unreadable response from {url}: {message}")]
    Parse { url: String, message: String },
    #[error("{0}")]
    Ingest(String),
    #[error("cache {path}: {message}")]
    Cache { path: String, message: String },
    #[error("invalid request: {0}")]
    Request(String),
}

/// Minimal blocking GET, so tests can substitute canned responses.
pub trait HttpGet {
    fn get(&self, url: &str) -> Result<String, FetchError>;
}

/// `ureq`-backed client; retries transport failures a bounded number of times.
pub struct UreqClient {
    agent: ureq::Agent,
}

impl Default for UreqClient {
    fn default() -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(30)))
            .build();
        Self {
            agent: config.into(),
        }
    }
}

impl HttpGet for UreqClient {
    fn get(&self, url: &str) -> Result<String, FetchError> {
        let mut last = String::new();
        for attempt in 0..MAX_ATTEMPTS {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(500 << attempt));
            }
            match self.agent.get(url).call() {
                Ok(mut resp) => {
                    return resp.body_mut().read_to_string().map_err(|e| FetchError::Http {
                        url: url.to_string(),
                        message: e.to_string(),
                    })
                }
                // a definite HTTP status will not change on retry
                Err(ureq::Error::StatusCode(code)) => {
                    return Err(FetchError::Http {
                        url: url.to_string(),
                        message: format!("HTTP status {code}"),
                    })
                }
                Err(e) => last = e.to_string(),
            }
        }
        Err(FetchError::Http {
            url: url.to_string(),
            message: format!("{last} (after {MAX_ATTEMPTS} attempts)"),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchRequest {
    pub country: String,
    pub indicator: String,
    pub start: i32,
    pub end: i32,
}

fn valid_code(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '.' || c == '_')
}

impl FetchRequest {
    pub fn new(country: &str, indicator: &str, start: i32, end: i32) -> Result<Self, FetchError> {
        if !valid_code(country) || !valid_code(indicator) {
            return Err(FetchError::Request(format!(
                "country `{country}` and indicator `{indicator}` must be non-empty alphanumeric codes"
            )));
        }
        if start > end {
            return Err(FetchError::Request(format!("start year {start} is after end year {end}")));
        }
        Ok(Self {
            country: country.to_ascii_uppercase(),
            indicator: indicator.to_string(),
            start,
            end,
        })
    }

    pub fn url(&self, page: usize) -> String {
        format!(
            "{API_BASE}/country/{}/indicator/{}?date={}:{}&format=json&per_page={PER_PAGE}&page={page}",
            self.country, self.indicator, self.start, self.end
        )
    }

    fn cache_stem(&self, page: usize) -> String {
        format!(
            "{}_{}_{}-{}_p{page}",
            self.country,
            self.indicator.replace('.', "-"),
            self.start,
            self.end
        )
    }
}

/// Metadata stored beside each cached response body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub url: String,
    pub request: FetchRequest,
    pub page: usize,
    pub body_sha256: String,
}

pub struct Fetcher<'a> {
    client: &'a dyn HttpGet,
    cache_dir: Option<PathBuf>,
}

impl<'a> Fetcher<'a> {
    pub fn new(client: &'a dyn HttpGet, cache_dir: Option<PathBuf>) -> Self {
        Self { client, cache_dir }
    }

    fn cache_paths(&self, req: &FetchRequest, page: usize) -> Option<(PathBuf, PathBuf)> {
        self.cache_dir.as_ref().map(|dir| {
            let stem = req.cache_stem(page);
            (dir.join(format!("{stem}.json")), dir.join(format!("{stem}.meta.json")))
        })
    }

    fn page_body(&self, req: &FetchRequest, page: usize) -> Result<String, FetchError> {
        let paths = self.cache_paths(req, page);
        if let Some((body, _)) = &paths {
            if body.exists() {
                return std::fs::read_to_string(body).map_err(|e| cache_err(body, e));
            }
        }
        let url = req.url(page);
        let text = self.client.get(&url)?;
        if let Some((body, meta)) = &paths {
            let dir = body.parent().expect("cache file has a parent");
            std::fs::create_dir_all(dir).map_err(|e| cache_err(dir, e))?;
            std::fs::write(body, &text).map_err(|e| cache_err(body, e))?;
            let record = CacheRecord {
                url,
                request: req.clone(),
                page,
                body_sha256: sha256_hex(text.as_bytes()),
            };
            let json = serde_json::to_string_pretty(&record).expect("record serializes");
            std::fs::write(meta, json).map_err(|e| cache_err(meta, e))?;
        }
        Ok(text)
    }

    /// All pages of `req`, as one series named `name`.
    pub fn fetch(&self, req: &FetchRequest, name: &str) -> Result<TimeSeries<f64>, FetchError> {
        let mut points = Vec::new();
        let mut page = 1;
        loop {
            let body = self.page_body(req, page)?;
            let parsed = parse_page(&body, &req.url(page))?;
            points.extend(parsed.points);
            if page >= parsed.pages {
                break;
            }
            page += 1;
        }
        assemble(points, name)
    }
}

fn cache_err(path: &Path, e: std::io::Error) -> FetchError {
    FetchError::Cache {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Page {
    pub pages: usize,
    pub points: Vec<(i32, Option<f64>)>,
}

/// Parses one response page: `[metadata, [observation, ...]]`, or the
/// API's `[{"message": [...]}]` error form.
pub fn parse_page(body: &str, url: &str) -> Result<Page, FetchError> {
    let bad = |m: String| FetchError::Parse {
        url: url.to_string(),
        message: m,
    };
    let v: Value = serde_json::from_str(body).map_err(|e| bad(e.to_string()))?;
    let arr = v.as_array().ok_or_else(|| bad("top level is not an array".into()))?;
    let meta = arr.first().ok_or_else(|| bad("empty response".into()))?;
    if let Some(msg) = meta.get("message") {
        return Err(FetchError::Http {
            url: url.to_string(),
            message: format!("API error: {msg}"),
        });
    }
    let pages = match meta.get("pages") {
        Some(Value::Number(n)) => n.as_u64().unwrap_or(1) as usize,
        Some(Value::String(s)) => s.parse().map_err(|_| bad(format!("bad page count `{s}`")))?,
        _ => 1,
    };
    let rows = match arr.get(1) {
        Some(Value::Array(rows)) => rows.as_slice(),
        Some(Value::Null) | None => &[],
        Some(_) => return Err(bad("observations are not an array".into())),
    };
    let points = rows
        .iter()
        .map(|row| {
            let date = row
                .get("date")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("observation without a date".into()))?;
            let year: i32 = date
                .parse()
                .map_err(|_| bad(format!("non-annual date `{date}`")))?;
            let value = match row.get("value") {
                Some(Value::Number(n)) => n.as_f64(),
                Some(Value::Null) | None => None,
                Some(other) => return Err(bad(format!("non-numeric value {other} for {year}"))),
            };
            Ok((year, value))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Page {
        pages: pages.max(1),
        points,
    })
}

/// Sorts by year, trims leading and trailing nulls, rejects interior nulls.
pub fn assemble(mut points: Vec<(i32, Option<f64>)>, name: &str) -> Result<TimeSeries<f64>, FetchError> {
    points.sort_by_key(|p| p.0);
    if points.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(FetchError::Ingest(format!("`{name}`: duplicate year in response")));
    }
    let first = points.iter().position(|p| p.1.is_some());
    let last = points.iter().rposition(|p| p.1.is_some());
    let (first, last) = match (first, last) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(FetchError::Ingest(format!("`{name}`: no observations in range"))),
    };
    let kept = &points[first..=last];
    if let Some((year, _)) = kept.iter().find(|p| p.1.is_none()) {
        return Err(FetchError::Ingest(format!("`{name}`: missing value at interior year {year}")));
    }
    if kept.windows(2).any(|w| w[1].0 != w[0].0 + 1) {
        return Err(FetchError::Ingest(format!("`{name}`: response skips a year")));
    }
    let values = kept.iter().map(|p| p.1.expect("checked above")).collect();
    TimeSeries::new(name, kept[0].0, values).map_err(|e| FetchError::Ingest(e.to_string()))
}
