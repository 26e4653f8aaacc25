use proptest::prelude::*;

use gql_core::props::Gen;
use gql_core::syntax::parser::{parse_expr, parse_graph, parse_query, parse_table};
use gql_core::syntax::print;
use gql_core::{Label, SolutionTable, Variable};

proptest! {
    #[test]
    fn graphs(seed in any::<u64>()) {
        let g = Gen::wide(seed).any_graph();
        let text = print::print_graph(&g);
        let back = parse_graph(&text).unwrap();
        prop_assert_eq!(&back, &g, "{}", text);
        prop_assert_eq!(print::print_graph(&back), text);
    }

    #[test]
    fn expressions(seed in any::<u64>()) {
        let e = Gen::wide(seed).any_expr(3);
        let text = print::expr(&e);
        prop_assert_eq!(parse_expr(&text).unwrap(), e, "{}", text);
    }

    #[test]
    fn queries(seed in any::<u64>()) {
        let q = Gen::wide(seed).any_query();
        let text = print::query(&q);
        let back = parse_query(&text).unwrap();
        prop_assert_eq!(&back, &q, "{}", text);
        prop_assert_eq!(print::query(&back), text);
    }

    #[test]
    fn tables(seed in any::<u64>(), n in 0usize..5) {
        let mut gen = Gen::wide(seed);
        let columns = vec![Variable::new("a"), Variable::new("b")];
        let rows = (0..n)
            .map(|_| vec![Label::Const(gen.constant()), Label::var("f1")])
            .collect();
        let t = SolutionTable::new(columns, rows);
        let text = print::table(&t);
        prop_assert_eq!(parse_table(&text).unwrap(), t, "{}", text);
    }
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let g = parse_graph("# header\n\na p b .  # trailing\n\nnode c .\n").unwrap();
    assert_eq!(print::print_graph(&g), "a p b .\nnode c .\n");
}

#[test]
fn syntax_errors_carry_locations() {
    let e = parse_graph("a p b .\na p .\n").unwrap_err();
    assert_eq!(e.line, 2);
    let e = parse_query("SELECT WHERE EMPTY").unwrap_err();
    assert_eq!((e.line, e.col), (1, 8));
}
