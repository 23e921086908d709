#![allow(dead_code)]

use std::sync::Arc;

use numorph::service::{serve, AppState};
use numorph::session::Session;
use numorph_core::models::ModelOptions;
use numorph_core::samples;
use numorph_core::wordlist::Delimiter;

pub const SAMPLE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/table2_sample.tsv");

/// Starts a service on an ephemeral port and returns its base URL.
pub async fn spawn(session: Session) -> String {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let state: Arc<AppState> = AppState::new(session, ModelOptions::default());
    tokio::spawn(serve(state, listener));
    format!("http://{addr}")
}

pub fn sample_session() -> Session {
    Session::new(samples::table2(), None, Delimiter::Tab)
}
