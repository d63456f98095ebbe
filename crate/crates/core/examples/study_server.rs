//! Serves a small hatching stimulus set for rating sessions.
//!
//! cargo run --example study_server -- 8080
//! then POST /session, GET /session/{id}/next, POST /session/{id}/rating

use std::net::SocketAddr;

use uniform_textures::server::{load_stimuli, serve, AppState};
use uniform_textures::synth::{gen_stimulus_set, TextureSpec, TextureType};

#[tokio::main]
async fn main() -> uniform_textures::Result<()> {
    let port: u16 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8080);
    let dir = std::env::temp_dir().join("uniform-textures-stimuli");
    let spec = TextureSpec { width: 128, height: 128, ..TextureSpec::new(TextureType::HatchH, 0) };
    for s in gen_stimulus_set(&spec, 0.05)? {
        s.texture.write_to(&dir, Some(&s.key))?;
    }
    let stimuli = load_stimuli(&dir)?;
    println!("{} stimuli in {}; listening on port {port}", stimuli.len(), dir.display());
    serve(SocketAddr::from(([127, 0, 0, 1], port)), AppState::new(stimuli, 0, None)?).await
}
