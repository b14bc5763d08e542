// Falsifying the initiator of a Dual-Horn program by contraposition.
//
// ```bash
// cargo run --example falsify_dual_program
// ```

use std::error::Error;

use logicgen::dual::{contrapose, falsify};
use logicgen::engine::{falsified_atoms, Engine};
use logicgen::syntax::{parse_program, serialize_program};

const TAILGATE: &str = include_str!("../tests/fixtures/tailgate.pro");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let program = parse_program(TAILGATE, None)?;
    let (definite, _) = contrapose(&program)?;
    println!("compiled program:\n{}", serialize_program(&definite));

    let goal = "tailgate when driving";
    let falsified = falsify(&program, goal)?;
    println!("?- false:'{goal}'.\n{falsified}");
    assert!(falsified);

    let atoms = falsified_atoms(&program, Engine::Matrix)?;
    println!("{} falsified atoms (matrix engine)", atoms.len());

    // removing one negative fact leaves its premise and everything above it standing
    let weakened = TAILGATE.replace("'Legal consequences' => false.", "");
    let weakened = parse_program(&weakened, None)?;
    println!("without 'Legal consequences' => false: {}", falsify(&weakened, goal)?);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
