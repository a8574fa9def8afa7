#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use tokio::task::JoinHandle;
use vocab_expander::{EmbeddingModel, ModelRegistry, SessionParams};
use vocab_expander_service::{router, serve, AppState, SessionStore};

pub struct Server {
    pub base: String,
    pub state: Arc<AppState>,
    handle: JoinHandle<std::io::Result<()>>,
}

impl Server {
    pub fn url(&self, path: &str) -> String {
        format!("{}{}", self.base, path)
    }

    pub async fn stop(self) {
        self.handle.abort();
        let _ = self.handle.await;
    }
}

pub async fn spawn(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Server {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let app = router(state.clone(), static_dir);
    let handle = tokio::spawn(serve(listener, app));
    Server {
        base,
        state,
        handle,
    }
}

pub fn state(registry: ModelRegistry, store: SessionStore) -> Arc<AppState> {
    Arc::new(AppState::new(
        Arc::new(registry),
        store,
        SessionParams::default(),
    ))
}

/// Two small hand-made models around "smart cities".
pub fn toy_registry() -> ModelRegistry {
    let web = vec![
        ("Smart Cities", vec![1.0, 0.1, 0.0]),
        ("smart_home", vec![0.9, 0.3, 0.0]),
        ("urban_mobility", vec![0.8, 0.0, 0.2]),
        ("iot", vec![0.7, 0.3, 0.1]),
        ("energy_efficiency", vec![0.6, 0.5, 0.0]),
        ("sensor", vec![0.5, 0.2, 0.4]),
        ("banana", vec![0.0, 0.0, 1.0]),
    ];
    let kb = vec![
        ("smart_cities", vec![0.0, 1.0, 0.1]),
        ("smart_home", vec![0.1, 0.9, 0.0]),
        ("e_government", vec![0.0, 0.8, 0.3]),
        ("banana", vec![1.0, 0.0, 0.0]),
    ];
    let mut r = ModelRegistry::new();
    r.insert(EmbeddingModel::from_rows("web", 3, web).unwrap())
        .unwrap();
    r.insert(EmbeddingModel::from_rows("kb", 3, kb).unwrap())
        .unwrap();
    r
}

pub fn client() -> reqwest::Client {
    reqwest::Client::new()
}

pub async fn post_json(url: &str, body: serde_json::Value) -> (u16, serde_json::Value) {
    let resp = client()
        .post(url)
        .header("content-type", "application/json")
        .body(body.to_string())
        .send()
        .await
        .unwrap();
    let status = resp.status().as_u16();
    let text = resp.text().await.unwrap();
    (status, serde_json::from_str(&text).unwrap())
}

pub async fn get_json(url: &str) -> (u16, serde_json::Value) {
    let resp = client().get(url).send().await.unwrap();
    let status = resp.status().as_u16();
    let text = resp.text().await.unwrap();
    (status, serde_json::from_str(&text).unwrap())
}

pub async fn create(server: &Server, params: serde_json::Value) -> String {
    let (status, body) = post_json(
        &server.url("/api/sessions"),
        serde_json::json!({ "params": params }),
    )
    .await;
    assert_eq!(status, 201, "{body}");
    body["session_id"].as_str().unwrap().to_owned()
}
