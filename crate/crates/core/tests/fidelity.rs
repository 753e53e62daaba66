//! The built-in catalog against an independent transcription of the table.

use std::time::Instant;

use pivotal_core::taxonomy::{catalog, PropertyId};

struct Row {
    id: u8,
    name: String,
    strategies: Vec<String>,
}

/// Splits a cell on commas outside parentheses and on line breaks.
fn split_cell(cell: &str) -> Vec<String> {
    let mut out = Vec::new();
    for line in cell.split("<br>") {
        let mut depth = 0i32;
        let mut current = String::new();
        for ch in line.chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            if ch == ',' && depth == 0 {
                out.push(current.trim().to_owned());
                current.clear();
            } else {
                current.push(ch);
            }
        }
        out.push(current.trim().to_owned());
    }
    out.retain(|s| !s.is_empty());
    out
}

fn table() -> Vec<Row> {
    include_str!("data/table1.tsv")
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let cols: Vec<&str> = line.split('\t').collect();
            assert_eq!(cols.len(), 3, "{line}");
            Row {
                id: cols[0].parse().unwrap(),
                name: cols[1].to_owned(),
                strategies: split_cell(cols[2]),
            }
        })
        .collect()
}

#[test]
fn splitter_respects_parentheses() {
    assert_eq!(
        split_cell("System models (a, b, c), Decision templates"),
        ["System models (a, b, c)", "Decision templates"]
    );
    assert_eq!(split_cell("A<br>B, C"), ["A", "B", "C"]);
}

#[test]
fn fourteen_rows_in_order() {
    let rows = table();
    assert_eq!(rows.len(), 14);
    let cat = catalog();
    assert_eq!(cat.properties.len(), 14);
    for (row, prop) in rows.iter().zip(&cat.properties) {
        assert_eq!(prop.id.get(), row.id);
        assert_eq!(prop.name, row.name);
        assert!(!prop.definition.is_empty());
    }
}

#[test]
fn strategies_match_each_row() {
    let start = Instant::now();
    let cat = catalog();
    for row in table() {
        let id = PropertyId::new(i64::from(row.id)).unwrap();
        let got: Vec<&str> = cat.strategies_for(id).map(|s| s.name.as_str()).collect();
        assert_eq!(got.len(), row.strategies.len(), "row {}: {got:?}", row.id);
        for (g, want) in got.iter().zip(&row.strategies) {
            let merged = cat
                .strategies
                .iter()
                .any(|s| s.name == *g && s.enabling_properties.len() > 1);
            if merged {
                assert!(g.eq_ignore_ascii_case(want), "row {}: {g} vs {want}", row.id);
            } else {
                assert_eq!(g, want, "row {}", row.id);
            }
        }
    }
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn every_transcribed_strategy_appears_once() {
    let mut names: Vec<String> = table()
        .into_iter()
        .flat_map(|r| r.strategies)
        .map(|s| s.to_lowercase())
        .collect();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), catalog().strategies.len());
}
