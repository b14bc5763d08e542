// Relation graph of a program: implication edges from its clauses plus
// generalization edges from an oracle, exported as DOT.
//
// ```bash
// cargo run --example relation_graph > tailgate.dot
// ```

use std::error::Error;

use logicgen::oracle::{Purpose, ReplayFixture, ReplayOracle};
use logicgen::relgraph::{export_graph, generalization_edges, implication_edges, nodes, GraphFormat};
use logicgen::syntax::parse_program;

const TAILGATE: &str = include_str!("../tests/fixtures/tailgate.pro");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let program = parse_program(TAILGATE, None)?;
    let mut edges = implication_edges(&program, None);

    let atoms = nodes(&edges);
    let mut fixture = ReplayFixture::new();
    fixture.insert_reply(
        Purpose::Generalize,
        &atoms[..3].join("\n"),
        "'tailgate when driving' is 'unsafe driving'\n\
         'Increased accident risk' is 'road safety hazard'\n\
         'Reduced reaction time' is 'road safety hazard'",
    )?;
    let oracle = ReplayOracle::new(fixture);
    let generalized = generalization_edges(&atoms[..3], 8, &oracle)?;
    edges.extend(generalized.edges);

    print!("{}", export_graph(&edges, GraphFormat::Dot));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
