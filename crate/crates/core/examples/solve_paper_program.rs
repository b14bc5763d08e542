// Least model of a small Horn program with both engines.
//
// ```bash
// cargo run --example solve_paper_program
// ```

use std::error::Error;

use logicgen::engine::{self, Engine};
use logicgen::fixpoint::SolverOptions;
use logicgen::json::load_json_program;
use logicgen::syntax::serialize_program;

const PROGRAM: &str = include_str!("../tests/fixtures/paper_program.json");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let program = load_json_program(PROGRAM)?;
    print!("{}", serialize_program(&program));
    for eng in [Engine::Fixpoint, Engine::Matrix] {
        let model = engine::solve(&program, eng, SolverOptions::default())?;
        println!("{eng:?}: {:?} ({:?})", model.texts(program.symbols()), model.status);
        assert_eq!(model.texts(program.symbols()), ["p", "r"]);
    }

    let goal = program.symbols().lookup("s").expect("s occurs in the program");
    let proved = engine::solve(&program, Engine::Fixpoint, SolverOptions::with_goal(goal))?;
    println!("s provable: {}", proved.proved_goal.is_some());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
