//! `/api/v1` routes.
//!
//! | method | path                    | body                  | reply                         |
//! |--------|-------------------------|-----------------------|-------------------------------|
//! | GET    | /schema                 |                       | question catalog, vocabularies|
//! | POST   | /validate               | factsheet             | diagnostics + completeness    |
//! | POST   | /render?target=T        | factsheet             | rendered document             |
//! | POST   | /import/card            | card source           | factsheet + import notes      |
//! | GET    | /factsheets?filter=Q:t  |                       | summaries sorted by id        |
//! | GET    | /factsheets/{id}        |                       | stored entry                  |
//! | PUT    | /factsheets/{id}        | factsheet             | stored entry                  |
//! | DELETE | /factsheets/{id}        |                       | `{"id", "deleted"}`           |
//! | GET    | /corpus/stats           |                       | corpus statistics             |
//!
//! Factsheet bodies are canonical text or interchange JSON, chosen by
//! `Content-Type` (`application/json` versus `text/plain` or
//! `text/x-efs`); without one the body is sniffed. PUT honours `If-Match`
//! with a revision number and `?require=publishable`.

#![allow(clippy::result_large_err)]

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::header::{CONTENT_TYPE, ETAG, IF_MATCH};
use axum::http::{HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use efs_core::model::{Dimension, VocabId, EFS_VERSION};
use efs_core::render::{render, RenderTarget};
use efs_core::text::ParseError;
use efs_core::{
    catalog, completeness, corpus_stats, from_interchange, import_card, is_publishable,
    parse_canonical, validate, CompletenessReport, Diagnostic, Factsheet, SourceSpan,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::store::{Filter, Store, StoreEntry, StoreError};

pub fn router(store: Arc<Store>) -> Router {
    let api = Router::new()
        .route("/schema", get(schema))
        .route("/validate", post(validate_doc))
        .route("/render", post(render_doc))
        .route("/import/card", post(import))
        .route("/factsheets", get(list))
        .route("/factsheets/{id}", get(fetch).put(store_put).delete(remove))
        .route("/corpus/stats", get(stats));
    Router::new()
        .nest("/api/v1", api)
        .fallback(not_found)
        .with_state(store)
}

/// Structured error reply: `{code, message, span?}` plus optional detail.
#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    status: StatusCode,
    code: String,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    span: Option<SourceSpan>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    errors: Vec<ParseError>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    diagnostics: Vec<Diagnostic>,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.to_string(),
            message: message.into(),
            span: None,
            errors: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    fn bad_request(code: &str, message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, code, message)
    }

    fn parse(errors: Vec<ParseError>) -> Self {
        let first = &errors[0];
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code: first.code.to_string(),
            message: first.message.clone(),
            span: Some(first.span),
            errors,
            diagnostics: Vec::new(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(err: StoreError) -> Self {
        let (status, code) = match &err {
            StoreError::InvalidId(_) => (StatusCode::BAD_REQUEST, "invalid_id"),
            StoreError::NotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
            StoreError::Conflict { .. } => (StatusCode::CONFLICT, "conflict"),
            StoreError::Invalid(_) => (StatusCode::BAD_REQUEST, "invalid_factsheet"),
            StoreError::StorageFailure { .. } => {
                (StatusCode::INTERNAL_SERVER_ERROR, "storage_failure")
            }
        };
        ApiError::new(status, code, err.to_string())
    }
}

type ApiResult<T> = Result<T, ApiError>;

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

#[derive(Serialize)]
struct SectionDoc {
    id: Dimension,
    title: &'static str,
    questions: Vec<efs_core::QuestionId>,
}

#[derive(Serialize)]
struct TermDoc {
    token: &'static str,
    label: &'static str,
}

#[derive(Serialize)]
struct VocabularyDoc {
    open: bool,
    terms: Vec<TermDoc>,
}

/// The catalog as served at `/schema`, in section order.
pub fn schema_document() -> Value {
    let cat = catalog();
    let sections: Vec<SectionDoc> = Dimension::ALL
        .iter()
        .map(|d| SectionDoc {
            id: *d,
            title: d.section_title(),
            questions: cat.section(*d).map(|q| q.id).collect(),
        })
        .collect();
    let vocabularies: serde_json::Map<String, Value> = VocabId::ALL
        .iter()
        .map(|v| {
            let doc = VocabularyDoc {
                open: v.is_open(),
                terms: v
                    .terms()
                    .iter()
                    .map(|t| TermDoc {
                        token: t.token,
                        label: t.label,
                    })
                    .collect(),
            };
            (v.name().to_string(), serde_json::to_value(doc).unwrap())
        })
        .collect();
    json!({
        "efs_version": EFS_VERSION,
        "sections": sections,
        "questions": cat.questions,
        "vocabularies": vocabularies,
    })
}

async fn schema() -> Json<Value> {
    Json(schema_document())
}

enum BodyFormat {
    Canonical,
    Interchange,
}

fn body_format(headers: &HeaderMap, body: &str) -> ApiResult<BodyFormat> {
    let Some(ct) = headers.get(CONTENT_TYPE) else {
        return Ok(if body.trim_start().starts_with('{') {
            BodyFormat::Interchange
        } else {
            BodyFormat::Canonical
        });
    };
    let ct = ct.to_str().unwrap_or("").to_ascii_lowercase();
    let mime = ct.split(';').next().unwrap_or("").trim();
    match mime {
        "application/json" => Ok(BodyFormat::Interchange),
        "text/plain" | "text/x-efs" | "application/x-efs" => Ok(BodyFormat::Canonical),
        other => Err(ApiError::new(
            StatusCode::UNSUPPORTED_MEDIA_TYPE,
            "unsupported_media_type",
            format!("cannot read a factsheet from `{other}`"),
        )),
    }
}

fn utf8(body: &Bytes) -> ApiResult<&str> {
    std::str::from_utf8(body).map_err(|e| ApiError::bad_request("invalid_utf8", e.to_string()))
}

fn read_factsheet(headers: &HeaderMap, body: &Bytes) -> ApiResult<Factsheet> {
    let text = utf8(body)?;
    match body_format(headers, text)? {
        BodyFormat::Canonical => parse_canonical(text),
        BodyFormat::Interchange => from_interchange(text),
    }
    .map_err(ApiError::parse)
}

#[derive(Serialize)]
struct ValidationReply {
    publishable: bool,
    diagnostics: Vec<Diagnostic>,
    completeness: CompletenessReport,
}

async fn validate_doc(headers: HeaderMap, body: Bytes) -> ApiResult<Json<ValidationReply>> {
    let fs = read_factsheet(&headers, &body)?;
    let diagnostics = validate(&fs);
    Ok(Json(ValidationReply {
        publishable: !diagnostics.iter().any(Diagnostic::is_error),
        diagnostics,
        completeness: completeness(&fs),
    }))
}

#[derive(Deserialize)]
struct RenderParams {
    target: Option<String>,
}

async fn render_doc(
    Query(params): Query<RenderParams>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Response> {
    let target: RenderTarget = params
        .target
        .as_deref()
        .unwrap_or("hypertext")
        .parse()
        .map_err(|e: efs_core::RenderError| ApiError::bad_request("unknown_target", e.to_string()))?;
    let fs = read_factsheet(&headers, &body)?;
    let out = render(&fs, target);
    Ok(([(CONTENT_TYPE, HeaderValue::from_static(target.media_type()))], out).into_response())
}

async fn import(body: Bytes) -> ApiResult<Json<efs_core::ImportReport>> {
    let text = utf8(&body)?;
    import_card(text).map(Json).map_err(ApiError::parse)
}

#[derive(Deserialize)]
struct ListParams {
    filter: Option<String>,
}

async fn list(
    State(store): State<Arc<Store>>,
    Query(params): Query<ListParams>,
) -> ApiResult<Json<Value>> {
    let filter = match params.filter.as_deref().filter(|f| !f.is_empty()) {
        Some(f) => Some(f.parse::<Filter>().map_err(|e| {
            let code = match e {
                crate::store::FilterError::UnknownQuestion(_) => "unknown_question",
                crate::store::FilterError::UnknownToken { .. } => "unknown_token",
                _ => "bad_filter",
            };
            ApiError::bad_request(code, e.to_string())
        })?),
        None => None,
    };
    Ok(Json(json!({ "factsheets": store.list(filter.as_ref()) })))
}

fn entry_response(entry: &StoreEntry) -> Response {
    let etag = HeaderValue::from_str(&format!("\"{}\"", entry.revision)).unwrap();
    ([(ETAG, etag)], Json(entry)).into_response()
}

async fn fetch(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult<Response> {
    let entry = store.get(&id)?;
    Ok(entry_response(&entry))
}

/// Reads `If-Match`, accepting `3`, `"3"` and `W/"3"`.
fn expected_revision(headers: &HeaderMap) -> ApiResult<Option<u64>> {
    let Some(value) = headers.get(IF_MATCH) else {
        return Ok(None);
    };
    let raw = value.to_str().unwrap_or("").trim();
    let raw = raw.strip_prefix("W/").unwrap_or(raw).trim_matches('"');
    raw.parse().map(Some).map_err(|_| {
        ApiError::bad_request("bad_if_match", format!("If-Match must be a revision number, got `{raw}`"))
    })
}

#[derive(Deserialize)]
struct PutParams {
    require: Option<String>,
}

async fn store_put(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(params): Query<PutParams>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Response> {
    let expected = expected_revision(&headers)?;
    let fs = read_factsheet(&headers, &body)?;
    match params.require.as_deref() {
        None => {}
        Some("publishable") => {
            if !is_publishable(&fs) {
                let mut err = ApiError::new(
                    StatusCode::UNPROCESSABLE_ENTITY,
                    "unpublishable",
                    "factsheet has validation errors",
                );
                err.diagnostics = validate(&fs).into_iter().filter(Diagnostic::is_error).collect();
                return Err(err);
            }
        }
        Some(other) => {
            return Err(ApiError::bad_request(
                "bad_require",
                format!("unknown requirement `{other}`; only `publishable` is supported"),
            ))
        }
    }
    let entry = tokio::task::spawn_blocking(move || store.put(&id, fs, expected))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    Ok(entry_response(&entry))
}

async fn remove(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    headers: HeaderMap,
) -> ApiResult<Json<Value>> {
    let expected = expected_revision(&headers)?;
    let deleted = id.clone();
    tokio::task::spawn_blocking(move || store.delete(&id, expected))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    Ok(Json(json!({ "id": deleted, "deleted": true })))
}

async fn stats(State(store): State<Arc<Store>>) -> Json<efs_core::CorpusStats> {
    Json(corpus_stats(&store.all()))
}
