//! Ratio tables: exact two-decimal percentages with half-up rounding, plus
//! aligned-text and JSON renderings.

use serde::ser::{Serialize, SerializeMap, SerializeStruct, Serializer};

/// A raw count over a denominator. The percentage is never stored as a
/// float; it is formatted on demand with exact integer arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub numerator: u64,
    pub denominator: u64,
}

impl Ratio {
    pub fn new(numerator: u64, denominator: u64) -> Ratio {
        Ratio {
            numerator,
            denominator,
        }
    }

    /// The percentage rounded half-up to two decimals, e.g. `"92.96"`.
    ///
    /// Computed as round(10000·n/d) in integers, so ties like 0.005 always
    /// round away from zero and no float representation error can leak into
    /// the last digit.
    pub fn percent_text(&self) -> String {
        assert!(self.denominator > 0, "percentage over a zero denominator");
        let scaled = 10_000u128 * u128::from(self.numerator);
        let den = u128::from(self.denominator);
        let mut q = scaled / den;
        let rem = scaled % den;
        if 2 * rem >= den {
            q += 1;
        }
        format!("{}.{:02}", q / 100, q % 100)
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Ratio", 3)?;
        s.serialize_field("numerator", &self.numerator)?;
        s.serialize_field("denominator", &self.denominator)?;
        s.serialize_field("percent", &self.percent_text())?;
        s.end()
    }
}

/// One labeled row; a `None` cell marks a column the row does not apply to
/// and renders as a dash.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub label: String,
    pub cells: Vec<Option<Ratio>>,
}

/// A labeled grid of ratios (rows × columns).
#[derive(Debug, Clone, PartialEq)]
pub struct RatioTable {
    pub columns: Vec<String>,
    pub rows: Vec<RatioRow>,
}

impl RatioTable {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Aligned plain-text rendering: a header of column names, then one row
    /// per label with `NN.NN%` cells and `-` for inapplicable cells.
    pub fn to_text(&self) -> String {
        let cell_text = |cell: &Option<Ratio>| match cell {
            Some(r) => format!("{}%", r.percent_text()),
            None => "-".to_string(),
        };
        let label_width = self.rows.iter().map(|r| r.label.len()).max().unwrap_or(0);
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for row in &self.rows {
            for (i, cell) in row.cells.iter().enumerate() {
                widths[i] = widths[i].max(cell_text(cell).len());
            }
        }

        let mut out = String::new();
        out.push_str(&" ".repeat(label_width));
        for (name, &width) in self.columns.iter().zip(&widths) {
            out.push_str("  ");
            out.push_str(&format!("{name:<width$}"));
        }
        push_trimmed_line(&mut out);
        for row in &self.rows {
            out.push_str(&format!("{:<label_width$}", row.label));
            for (cell, &width) in row.cells.iter().zip(&widths) {
                out.push_str("  ");
                out.push_str(&format!("{:<width$}", cell_text(cell)));
            }
            push_trimmed_line(&mut out);
        }
        out
    }

    /// Pretty-printed JSON rendering carrying the raw counts alongside the
    /// formatted percentages.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("table serializes to JSON");
        out.push('\n');
        out
    }
}

fn push_trimmed_line(out: &mut String) {
    while out.ends_with(' ') {
        out.pop();
    }
    out.push('\n');
}

impl Serialize for RatioTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("RatioTable", 2)?;
        s.serialize_field("columns", &self.columns)?;
        struct Rows<'a>(&'a RatioTable);
        impl Serialize for Rows<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_seq(self.0.rows.iter().map(|row| RowWithColumns {
                    row,
                    columns: &self.0.columns,
                }))
            }
        }
        s.serialize_field("rows", &Rows(self))?;
        s.end()
    }
}

struct RowWithColumns<'a> {
    row: &'a RatioRow,
    columns: &'a [String],
}

impl Serialize for RowWithColumns<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("label", &self.row.label)?;
        struct Cells<'a>(&'a RowWithColumns<'a>);
        impl Serialize for Cells<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut cells = serializer.serialize_map(Some(self.0.row.cells.len()))?;
                for (name, cell) in self.0.columns.iter().zip(&self.0.row.cells) {
                    cells.serialize_entry(name, cell)?;
                }
                cells.end()
            }
        }
        map.serialize_entry("cells", &Cells(self))?;
        map.end()
    }
}
