use crate::logic::AndnessCode;
use crate::scalar::Scalar;

use super::SimplifiedTree;

fn section(title: &str, body: &str) -> String {
    format!("{title}\n{}\n{body}\n\n", "=".repeat(title.chars().count()))
}

const SYSTEM: &str = "\
You write reports that explain an LSP aggregation tree in precise, readable
terms. Combine what you know about LSP with the context below.";

const INSTRUCTIONS: &str = "\
1. Structure the report in three sections:
    - Overview: the overall decision logic of the tree.
    - Decision Logic Walkthrough: go from the root to the leaves; for each
      operator give its code, its meaning (use the verbalization from the
      table) and how its inputs are combined.
    - Domain Interpretation: connect the logic to known patterns of the
      domain named in the context, including notable interactions or
      compensations between inputs.

2. Write for domain experts and decision makers, not for ML specialists.

3. Name operators by code and verbalization together (for example \"HHC\"
   with \"High hyper-conjunction, must have all\").

4. Point out the most influential inputs and how they move the decision.

5. Keep jargon to a minimum and favor plain explanations.";

/// Builds the report-generation prompt for a simplified tree. The tree's JSON
/// is inlined verbatim in the Input section.
pub fn emit_report_prompt<T: Scalar>(tree: &SimplifiedTree<T>, context: &str) -> String {
    let background = format!(
        "LSP aggregators are defined in the following markdown table:\n{}",
        AndnessCode::markdown_table().trim_end()
    );
    let input = format!("The aggregation tree is expressed in the following JSON.\n```json\n{}\n```", tree.to_json());
    let mut out = String::new();
    out.push_str(&section("System", SYSTEM));
    out.push_str(&section("Context", context.trim_end()));
    out.push_str(&section("Background", &background));
    out.push_str(&section("Instructions", INSTRUCTIONS));
    out.push_str(&section("Input", &input));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::LspTree;

    fn tree(name: &str) -> SimplifiedTree<f64> {
        LspTree::from_params(vec!["a".into(), name.into(), "c".into()], &[(0.4, 1.5), (0.6, -0.5)]).unwrap().simplify(true)
    }

    #[test]
    fn contains_every_section_and_the_tree() {
        let t = tree("b");
        let p = emit_report_prompt(&t, "Screening model.");
        for header in ["System\n======", "Context\n=======", "Background\n==========", "Instructions\n============", "Input\n====="] {
            assert!(p.contains(header), "missing {header}");
        }
        assert!(p.contains(&t.to_json()));
        assert!(p.contains("| CP | Product t-norm | 5/4 |"));
        assert!(p.contains("Screening model."));
    }

    #[test]
    fn empty_context_keeps_template() {
        let p = emit_report_prompt(&tree("b"), "");
        assert!(p.contains("Context\n=======\n\n\nBackground"));
    }

    #[test]
    fn length_tracks_payload() {
        let short = emit_report_prompt(&tree("b"), "ctx");
        let long = emit_report_prompt(&tree("bbbbbb"), "ctx");
        let delta = tree("bbbbbb").to_json().len() - tree("b").to_json().len();
        assert_eq!(long.len() - short.len(), delta);
        assert_eq!(emit_report_prompt(&tree("b"), "ctx"), short);
    }
}
