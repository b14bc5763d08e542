// Recursive goal expansion driven by a recorded oracle session, with the
// recursor, rater and advisor agents.
//
// ```bash
// cargo run --example explore_replay
// ```

use std::error::Error;

use logicgen::engine::Engine;
use logicgen::explore::{explore, save_artifacts, Agent, ExplorationConfig};
use logicgen::oracle::{ReplayFixture, ReplayOracle};
use logicgen::syntax::serialize_program;
use logicgen::ProgramKind;

const SESSION: &str = include_str!("../tests/fixtures/tailgate_replay.json");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let oracle = ReplayOracle::new(ReplayFixture::from_json(SESSION)?);

    let cfg = ExplorationConfig::new("tailgate when driving", 2, ProgramKind::Dual);
    let (program, trace) = explore(&cfg, &oracle)?;
    print!("{}", serialize_program(&program));
    println!("{} expansions, {} goals visited", trace.steps.len(), trace.visited.len());

    let dir = std::env::temp_dir().join("logicgen-explore-example");
    let paths = save_artifacts(&dir, "tailgate", &program, &trace, Engine::Fixpoint)?;
    println!("wrote {}", paths.model.display());

    for threshold in [0.0, 60.0, 90.0] {
        let mut rated = cfg.clone();
        rated.agent = Agent::Rater;
        rated.rater_threshold = threshold;
        let (p, _) = explore(&rated, &oracle)?;
        println!("rater at {threshold:>4}: {} clauses", p.len());
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
