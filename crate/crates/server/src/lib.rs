//! HTTP microservices around the core library: a stateless `model-checker`
//! holding the (effectively constant) closure model, and a stateful
//! `location-cache` holding the current entity positions. Both speak plain
//! JSON over REST so resource-constrained devices can call them directly.

pub mod api;
pub mod cache;
pub mod checker;

use std::net::SocketAddr;

/// Binds `router` on `addr` (port 0 picks an ephemeral port) and serves it on
/// a background task. Returns the bound address.
pub async fn serve(
    router: axum::Router,
    addr: SocketAddr,
) -> std::io::Result<(SocketAddr, tokio::task::JoinHandle<()>)> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    let bound = listener.local_addr()?;
    let handle = tokio::spawn(async move {
        if let Err(e) = axum::serve(listener, router).await {
            eprintln!("server on {bound} stopped: {e}");
        }
    });
    Ok((bound, handle))
}
