#[allow(dead_code)]
mod solve_paper_program {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/solve_paper_program.rs"));
}

#[allow(dead_code)]
mod falsify_dual_program {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/falsify_dual_program.rs"));
}

#[allow(dead_code)]
mod explore_replay {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/explore_replay.rs"));
}

#[allow(dead_code)]
mod dcg_from_questions {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/dcg_from_questions.rs"));
}

#[allow(dead_code)]
mod soft_unification {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/soft_unification.rs"));
}

#[allow(dead_code)]
mod relation_graph {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/relation_graph.rs"));
}

#[allow(dead_code)]
mod scaling {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scaling.rs"));
}

#[allow(dead_code)]
mod live_oracle {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/live_oracle.rs"));
}

#[test]
fn solve_paper_program_example_runs() {
    solve_paper_program::run_example().expect("solve_paper_program example should run");
}

#[test]
fn falsify_dual_program_example_runs() {
    falsify_dual_program::run_example().expect("falsify_dual_program example should run");
}

#[test]
fn explore_replay_example_runs() {
    explore_replay::run_example().expect("explore_replay example should run");
}

#[test]
fn dcg_from_questions_example_runs() {
    dcg_from_questions::run_example().expect("dcg_from_questions example should run");
}

#[test]
fn soft_unification_example_runs() {
    soft_unification::run_example().expect("soft_unification example should run");
}

#[test]
fn relation_graph_example_runs() {
    relation_graph::run_example().expect("relation_graph example should run");
}

#[test]
fn scaling_example_runs() {
    scaling::run_example().expect("scaling example should run");
}

#[test]
fn live_oracle_example_runs() {
    live_oracle::run_example().expect("live_oracle example should run");
}
