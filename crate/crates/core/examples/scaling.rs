// Solve time of both engines on layered synthetic programs.
//
// ```bash
// cargo run --release --example scaling -- 1000000
// ```

use std::error::Error;
use std::time::Instant;

use logicgen::engine::{self, Engine};
use logicgen::fixpoint::SolverOptions;
use logicgen::{Program, ProgramBuilder};

/// `layers` layers of `width` atoms; every atom of a layer depends on two
/// atoms of the layer below, and the bottom layer consists of facts.
fn layered(width: usize, layers: usize) -> Program {
    let mut b = ProgramBuilder::horn();
    let name = |l: usize, i: usize| format!("n{l}_{i}");
    for i in 0..width {
        b.fact(&name(0, i)).expect("valid fact");
    }
    for l in 1..layers {
        for i in 0..width {
            let below = [name(l - 1, i), name(l - 1, (i + 1) % width)];
            b.rule(&name(l, i), &[&below[0], &below[1]]).expect("valid rule");
        }
    }
    b.build().expect("non-empty program")
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let clauses: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20_000);
    let width = 1000.min(clauses);
    let program = layered(width, clauses / width);
    println!("{} clauses, {} atoms", program.len(), program.symbols().len());
    for eng in [Engine::Fixpoint, Engine::Matrix] {
        let start = Instant::now();
        let model = engine::solve(&program, eng, SolverOptions::default())?;
        println!("{eng:?}: {} true atoms in {:?}", model.len(), start.elapsed());
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
