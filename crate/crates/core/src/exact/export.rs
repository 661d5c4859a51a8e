//! Plain-text generator export.

use std::fmt::Write;

use super::generator::GeneratorMatrix;

/// One `row col rate` line per nonzero entry of `Q`, diagonal included,
/// rows in index order.
pub fn coordinate_list(gen: &GeneratorMatrix) -> String {
    let q = gen.rates();
    let mut out = String::new();
    for a in 0..gen.dim() {
        let mut entries: Vec<(usize, f64)> = q.row(a).collect();
        if q.exit()[a] != 0.0 {
            entries.push((a, -q.exit()[a]));
        }
        entries.sort_by_key(|&(b, _)| b);
        for (b, r) in entries {
            writeln!(out, "{a} {b} {r:e}").unwrap();
        }
    }
    out
}

/// One `index v1,v2,...` line per state.
pub fn state_legend(gen: &GeneratorMatrix) -> String {
    let mut out = String::new();
    for (i, s) in gen.space().iter().enumerate() {
        let joined: Vec<String> = s.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{i} {}", joined.join(",")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::generator::two_state_chain;

    #[test]
    fn two_state_export() {
        let g = two_state_chain();
        assert_eq!(coordinate_list(&g), "0 0 -1e0\n0 1 1e0\n1 0 1e0\n1 1 -1e0\n");
        assert_eq!(state_legend(&g), "0 0\n1 1\n");
    }
}
