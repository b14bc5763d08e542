// A follow-up question tree compiled to a Prolog DCG, and the sentences of
// its language.
//
// ```bash
// cargo run --example dcg_from_questions
// ```

use std::error::Error;

use logicgen::dcg::{build_qatree, generate_language, read_dcg, render_dcg, tree_to_dcg};
use logicgen::oracle::{ReplayFixture, ReplayOracle};

const SESSION: &str = include_str!("../tests/fixtures/constructive_negation_replay.json");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let oracle = ReplayOracle::new(ReplayFixture::from_json(SESSION)?);
    let question = "How constructive negation works in logic and constraint programming?";
    let tree = build_qatree(question, 3, &oracle)?;
    let grammar = tree_to_dcg(&tree);
    let prolog = render_dcg(&grammar);
    for line in prolog.lines().filter(|l| l.starts_with('q') && !l.contains("_-->")) {
        println!("{line}");
    }
    println!("opens: {}", grammar.opens.len());
    println!("dropped loops: {:?}", tree.dropped_loops);

    let sentences = generate_language(&read_dcg(&prolog)?);
    println!("{} sentences; the first one:", sentences.len());
    for terminal in &sentences[0] {
        println!("  {}", terminal.chars().take(90).collect::<String>());
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
