use indexmap::IndexMap;

use super::{QaNode, QaTree, RepeatedAnswer};

/// `q<head> --> q<head>_, a<answer>_ [, q<next>]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DcgRule {
    pub head: usize,
    pub answer: usize,
    pub next: Option<usize>,
}

/// Nonterminal `q<i>` produces the terminal `q<i>_` (the text
/// `questions[i]`) followed by an answer terminal and, optionally, a
/// follow-up nonterminal.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DcgGrammar {
    pub rules: Vec<DcgRule>,
    pub questions: Vec<String>,
    pub answers: Vec<String>,
    pub opens: IndexMap<String, usize>,
    pub repeated_answers: Vec<RepeatedAnswer>,
}

impl DcgGrammar {
    /// Rules grouped by head nonterminal, in rule order.
    fn rules_by_head(&self) -> Vec<Vec<DcgRule>> {
        let mut by_head = vec![Vec::new(); self.questions.len()];
        for r in &self.rules {
            if r.head < by_head.len() {
                by_head[r.head].push(*r);
            }
        }
        by_head
    }

    /// Whether the rule graph has no cycle reachable from any nonterminal.
    pub fn is_acyclic(&self) -> bool {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        fn dfs(n: usize, by_head: &[Vec<DcgRule>], marks: &mut [Mark]) -> bool {
            match marks[n] {
                Mark::Done => return true,
                Mark::Active => return false,
                Mark::New => {}
            }
            marks[n] = Mark::Active;
            for r in &by_head[n] {
                if let Some(next) = r.next {
                    if next < marks.len() && !dfs(next, by_head, marks) {
                        return false;
                    }
                }
            }
            marks[n] = Mark::Done;
            true
        }
        let by_head = self.rules_by_head();
        let mut marks = vec![Mark::New; self.questions.len()];
        (0..self.questions.len()).all(|n| dfs(n, &by_head, &mut marks))
    }
}

struct Compiler {
    grammar: DcgGrammar,
    answer_index: IndexMap<String, usize>,
}

impl Compiler {
    fn answer(&mut self, text: &str) -> usize {
        if let Some(&i) = self.answer_index.get(text) {
            return i;
        }
        let i = self.grammar.answers.len();
        self.grammar.answers.push(text.to_string());
        self.answer_index.insert(text.to_string(), i);
        i
    }

    /// Numbers answered nodes in preorder and emits their rules.
    fn node(&mut self, node: &QaNode) -> usize {
        let q = self.grammar.questions.len();
        self.grammar.questions.push(node.question.clone());
        let a = self.answer(node.answer.as_deref().expect("only answered nodes are compiled"));
        let answered: Vec<&QaNode> = node.children.iter().filter(|c| !c.is_open()).collect();
        if answered.is_empty() {
            self.grammar.rules.push(DcgRule {
                head: q,
                answer: a,
                next: None,
            });
        }
        for child in answered {
            // rule order follows child order; the rule is fixed up once the
            // child's index is known
            let slot = self.grammar.rules.len();
            self.grammar.rules.push(DcgRule {
                head: q,
                answer: a,
                next: None,
            });
            let c = self.node(child);
            self.grammar.rules[slot].next = Some(c);
        }
        q
    }
}

/// Compiles a question/answer tree. Open nodes contribute only to `opens`;
/// an answered node without answered children yields a terminal-only rule.
pub fn tree_to_dcg(tree: &QaTree) -> DcgGrammar {
    let mut c = Compiler {
        grammar: DcgGrammar::default(),
        answer_index: IndexMap::new(),
    };
    if !tree.root.is_open() {
        c.node(&tree.root);
    }
    let mut grammar = c.grammar;
    // group rules by head so the listing reads like the tree, parents first
    grammar.rules.sort_by_key(|r| r.head);
    grammar.opens = tree.opens.clone();
    grammar.repeated_answers = tree.repeated_answers.clone();
    grammar
}

/// Every sentence of the grammar's language from `q0`, in rule order. A
/// sentence alternates `Q: ` and `A: ` terminals.
pub fn generate_language(g: &DcgGrammar) -> Vec<Vec<String>> {
    debug_assert!(g.is_acyclic(), "generation needs a loop-free grammar");
    fn walk(n: usize, g: &DcgGrammar, by_head: &[Vec<DcgRule>], prefix: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
        for r in &by_head[n] {
            prefix.push(format!("Q: {}", g.questions[n]));
            prefix.push(format!("A: {}", g.answers[r.answer]));
            match r.next {
                None => out.push(prefix.clone()),
                Some(next) if next < by_head.len() => walk(next, g, by_head, prefix, out),
                Some(_) => {}
            }
            prefix.truncate(prefix.len() - 2);
        }
    }
    let mut out = Vec::new();
    if g.questions.is_empty() {
        return out;
    }
    let by_head = g.rules_by_head();
    walk(0, g, &by_head, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn answered(id: usize, q: &str, a: &str, children: Vec<QaNode>) -> QaNode {
        QaNode {
            id,
            question: q.into(),
            answer: Some(a.into()),
            children,
        }
    }

    fn open(id: usize, q: &str) -> QaNode {
        QaNode {
            id,
            question: q.into(),
            answer: None,
            children: vec![],
        }
    }

    fn tree(root: QaNode) -> QaTree {
        QaTree {
            root,
            opens: IndexMap::new(),
            repeated_answers: vec![],
            dropped_loops: vec![],
        }
    }

    #[test]
    fn root_with_two_children() {
        let t = tree(answered(
            0,
            "Q0",
            "A0",
            vec![answered(1, "Q1", "A1", vec![]), answered(2, "Q2", "A2", vec![])],
        ));
        let g = tree_to_dcg(&t);
        assert_eq!(
            g.rules,
            vec![
                DcgRule { head: 0, answer: 0, next: Some(1) },
                DcgRule { head: 0, answer: 0, next: Some(2) },
                DcgRule { head: 1, answer: 1, next: None },
                DcgRule { head: 2, answer: 2, next: None },
            ]
        );
        assert_eq!(generate_language(&g).len(), 2);
    }

    #[test]
    fn open_children_do_not_become_rules() {
        let t = tree(answered(0, "Q0", "A0", vec![open(1, "later?")]));
        let g = tree_to_dcg(&t);
        assert_eq!(g.rules, vec![DcgRule { head: 0, answer: 0, next: None }]);
        assert_eq!(g.questions, vec!["Q0"]);
    }

    #[test]
    fn single_open_root_has_no_rules() {
        let mut t = tree(open(0, "Q0"));
        t.opens.insert("Q0".into(), 1);
        let g = tree_to_dcg(&t);
        assert!(g.rules.is_empty());
        assert_eq!(g.opens.len(), 1);
        assert!(generate_language(&g).is_empty());
    }

    #[test]
    fn chain_gives_one_sentence_of_six_terminals() {
        let t = tree(answered(
            0,
            "Q0",
            "A0",
            vec![answered(1, "Q1", "A1", vec![answered(2, "Q2", "A2", vec![])])],
        ));
        let lang = generate_language(&tree_to_dcg(&t));
        assert_eq!(
            lang,
            vec![vec!["Q: Q0", "A: A0", "Q: Q1", "A: A1", "Q: Q2", "A: A2"]]
        );
    }

    #[test]
    fn shared_answers_share_terminals() {
        let t = tree(answered(
            0,
            "Q0",
            "A0",
            vec![answered(1, "Q1", "same", vec![]), answered(2, "Q2", "same", vec![])],
        ));
        let g = tree_to_dcg(&t);
        assert_eq!(g.answers, vec!["A0", "same"]);
    }

    #[test]
    fn cycle_detection() {
        let mut g = DcgGrammar {
            questions: vec!["a".into(), "b".into()],
            answers: vec!["x".into()],
            rules: vec![DcgRule { head: 0, answer: 0, next: Some(1) }],
            ..Default::default()
        };
        assert!(g.is_acyclic());
        g.rules.push(DcgRule { head: 1, answer: 0, next: Some(0) });
        assert!(!g.is_acyclic());
    }
}
