// Soft unification against a sentence store and export of the abduced
// clauses, which the exact solver then proves.
//
// Uses the built-in hashing embedder; pass `--backend http` to the CLI's
// `soft` commands for a real embedding model.
//
// ```bash
// cargo run --example soft_unification
// ```

use std::error::Error;

use logicgen::fixpoint::prove_text;
use logicgen::soft::{export_abduced, soft_unify, AbducedLedger, HashingBackend, SentenceStore, SoftQuery};

const QUOTES: &str = include_str!("../data/quotes.txt");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let backend = HashingBackend::default();
    let mut store = SentenceStore::for_backend(&backend);
    let lines: Vec<String> = QUOTES.lines().map(str::to_string).collect();
    store.add_sentences(&backend, &lines)?;
    println!("{} sentences", store.len());

    let mut ledger = AbducedLedger::new();
    for q in [
        "What happens if you do not know where you are going",
        "What did Wilde say about temptation",
        "quantum chromodynamics",
    ] {
        let hits = soft_unify(&store, &backend, Some(&mut ledger), &SoftQuery::new(q, 3, 75))?;
        println!("?- {q}");
        for (sentence, d) in hits {
            println!("   {d:.3}  {sentence}");
        }
    }

    let (program, annotated) = export_abduced(&ledger);
    print!("{annotated}");
    for entry in ledger.entries() {
        assert!(prove_text(&program, &entry.query)?);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
