//! Term rendering. `parse_term(pretty(t), t.calculus()) == t` for every term,
//! which the canonicalizer relies on: canonical identity is the rendered
//! string. Restrictions are parenthesized except at the top of a group, so a
//! rendered `nu` never captures siblings on reparse.

use std::fmt::Write;

use crate::term::{Node, Prefix, Term};

/// Renders a term; single spaces around `+` and `|`, one space after a
/// binder dot.
pub fn pretty(t: &Term) -> String {
    let mut out = String::new();
    write_proc(t, &mut out);
    out
}

impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&pretty(self))
    }
}

fn write_proc(t: &Term, out: &mut String) {
    match t.node() {
        Node::Nu(name, body) => {
            write!(out, "nu {name}. ").expect("write to string");
            write_proc(body, out);
        }
        Node::Par(components) => {
            for (i, component) in components.iter().enumerate() {
                if i > 0 {
                    out.push_str(" | ");
                }
                write_component(component, out);
            }
        }
        Node::Sum(_) => write_sum(t, out),
    }
}

fn write_component(t: &Term, out: &mut String) {
    match t.node() {
        Node::Nu(_, _) => write_parenthesized(t, out),
        Node::Par(_) => unreachable!("Par is never nested"),
        Node::Sum(_) => write_sum(t, out),
    }
}

fn write_sum(t: &Term, out: &mut String) {
    match t.node() {
        Node::Sum(summands) if summands.is_empty() => out.push('0'),
        Node::Sum(summands) => {
            for (i, (prefix, cont)) in summands.iter().enumerate() {
                if i > 0 {
                    out.push_str(" + ");
                }
                write_prefix(prefix, out);
                out.push('.');
                write_factor(cont, out);
            }
        }
        _ => unreachable!("write_sum on non-sum"),
    }
}

fn write_prefix(prefix: &Prefix, out: &mut String) {
    match prefix {
        Prefix::Tau => out.push_str("tau"),
        Prefix::CcsIn(chan) => out.push_str(chan.as_str()),
        Prefix::CcsOut(chan) => {
            out.push('~');
            out.push_str(chan.as_str());
        }
        Prefix::PiIn { chan, binder } => {
            write!(out, "{chan}({binder})").expect("write to string");
        }
        Prefix::PiOut { chan, datum } => {
            write!(out, "{chan}<{datum}>").expect("write to string");
        }
    }
}

fn write_factor(t: &Term, out: &mut String) {
    match t.node() {
        Node::Sum(summands) if summands.len() <= 1 => write_sum(t, out),
        _ => write_parenthesized(t, out),
    }
}

fn write_parenthesized(t: &Term, out: &mut String) {
    out.push('(');
    write_proc(t, out);
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_term;
    use crate::term::Calculus;

    fn round_trip(text: &str, calculus: Calculus) {
        let t = parse_term(text, calculus).expect("parses");
        let rendered = pretty(&t);
        let back = parse_term(&rendered, calculus).expect("rendering parses");
        assert_eq!(back, t, "round trip through {rendered:?}");
    }

    #[test]
    fn rendering_reparses_to_the_same_term() {
        for text in [
            "0",
            "a.0",
            "~a.0",
            "tau.a.0",
            "a.0 + b.0",
            "a.0 + a.0",
            "a.(b.0 + c.0)",
            "a.0 | b.0 | c.0",
            "a.0 + b.0 | c.0",
            "nu x. a.0 | x.0",
            "(nu x. x.0) | a.0",
            "tau.(nu x. x.0 | a.0)",
            "nu x. nu y. x.y.0",
        ] {
            round_trip(text, Calculus::Ccs);
        }
        for text in [
            "a(x).x<b>.0",
            "a<b>.0 + tau.0",
            "nu z. a<z>.z(w).0 | a(y).y<y>.0",
            "nu #0. a<#0>.0",
        ] {
            round_trip(text, Calculus::Pi);
        }
    }

    #[test]
    fn fixed_spacing() {
        let t = parse_term("a .0+ b. 0|c.0", Calculus::Ccs).expect("parses");
        assert_eq!(pretty(&t), "a.0 + b.0 | c.0");
        let t = parse_term("nu x.(x.0)", Calculus::Ccs).expect("parses");
        assert_eq!(pretty(&t), "nu x. x.0");
    }

    #[test]
    fn nested_nu_under_prefix_is_parenthesized() {
        let t = parse_term("a.(nu x. x.0) | b.0", Calculus::Ccs).expect("parses");
        assert_eq!(pretty(&t), "a.(nu x. x.0) | b.0");
    }
}
