use serde_json::{Map, Value};
use thiserror::Error;

use crate::analyzer::{classify, AnalyzerResources};
use crate::model::{parse_region, ClassifiedTweet, RegionCode, Tweet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("missing or empty field `{0}`")]
    MissingField(&'static str),
    #[error("unknown region `{value}` in field `{field}`")]
    UnknownRegion { field: &'static str, value: String },
    #[error("`created_at` must be a nonnegative integer")]
    BadTimestamp,
}

fn string_field<'a>(
    obj: &'a Map<String, Value>,
    name: &'static str,
) -> Result<Option<&'a str>, RecordError> {
    match obj.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(_) => Err(RecordError::MalformedJson(format!(
            "`{name}` must be a string"
        ))),
    }
}

fn region_field(
    obj: &Map<String, Value>,
    name: &'static str,
) -> Result<Option<RegionCode>, RecordError> {
    string_field(obj, name)?
        .map(|code| {
            parse_region(code).map_err(|_| RecordError::UnknownRegion {
                field: name,
                value: code.to_string(),
            })
        })
        .transpose()
}

/// Parses one JSONL tweet record. Unknown fields are ignored.
pub fn parse_record(line: &str) -> Result<Tweet, RecordError> {
    let value: Value =
        serde_json::from_str(line).map_err(|e| RecordError::MalformedJson(e.to_string()))?;
    let Value::Object(obj) = value else {
        return Err(RecordError::MalformedJson("expected an object".into()));
    };
    let id = match string_field(&obj, "id")? {
        Some(id) if !id.is_empty() => id.to_string(),
        _ => return Err(RecordError::MissingField("id")),
    };
    let text = string_field(&obj, "text")?
        .ok_or(RecordError::MissingField("text"))?
        .to_string();
    let created_at = match obj.get("created_at") {
        None | Some(Value::Null) => return Err(RecordError::MissingField("created_at")),
        Some(v) => v
            .as_i64()
            .filter(|t| *t >= 0)
            .ok_or(RecordError::BadTimestamp)?,
    };
    let user_region =
        region_field(&obj, "user_region")?.ok_or(RecordError::MissingField("user_region"))?;
    let geo_region = region_field(&obj, "geo_region")?;
    Ok(Tweet {
        id,
        text,
        created_at,
        user_region,
        geo_region,
    })
}

/// The tagged location when present, otherwise the registration region.
pub fn assign_region(tweet: &Tweet) -> RegionCode {
    tweet.geo_region.unwrap_or(tweet.user_region)
}

pub fn classify_tweet(tweet: Tweet, resources: &AnalyzerResources) -> ClassifiedTweet {
    let (label, vector) = classify(&tweet.text, resources);
    let region = assign_region(&tweet);
    ClassifiedTweet {
        tweet,
        label,
        vector,
        region,
    }
}
