// Expanding a goal with a live chat-completions endpoint.
//
// Needs `LOGICGEN_API_KEY` or `OPENAI_API_KEY`; `LOGICGEN_BASE_URL` and
// `LOGICGEN_MODEL` select another compatible server and model. Without a key
// the example only prints what it would do.
//
// ```bash
// OPENAI_API_KEY=... cargo run --example live_oracle -- "learn to play the violin"
// ```

use std::error::Error;

use logicgen::explore::{explore, ExplorationConfig};
use logicgen::oracle::{ChatClient, ChatConfig, PromptTemplates};
use logicgen::syntax::serialize_program;
use logicgen::ProgramKind;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let goal = std::env::args().nth(1).unwrap_or_else(|| "learn to play the violin".into());
    let config = ChatConfig::from_env();
    if config.api_key.is_none() {
        println!("no API key set; would expand {goal:?} with {} at {}", config.model, config.endpoint());
        return Ok(());
    }
    let client = ChatClient::new(config, PromptTemplates::default());
    let (program, _) = explore(&ExplorationConfig::new(goal, 2, ProgramKind::Horn), &client)?;
    print!("{}", serialize_program(&program));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
