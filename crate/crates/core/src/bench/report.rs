use std::io::Write;

use super::{ConvergenceTable, ErrorNorms, Order};
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 6] = ["grid", "element", "p_l2_modR", "v_h1", "v_h1_semi", "v_l2"];

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidArgument(format!("csv: {other:?}")),
    }
}

fn order_cell(o: Order) -> String {
    match o {
        Order::Value(v) => format!("{v:.6}"),
        Order::Exact => "exact".into(),
    }
}

fn error_cells(e: &ErrorNorms) -> [String; 4] {
    [e.p_l2_mod_r, e.v_h1, e.v_h1_semi, e.v_l2].map(|v| format!("{v:.6e}"))
}

/// Error rows per element followed by that element's order rows
/// (`grid` = `order_<coarse>_<fine>`).
pub fn write_convergence_csv<W: Write>(table: &ConvergenceTable, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER).map_err(csv_error)?;
    let mut elements: Vec<&str> = Vec::new();
    for r in &table.rows {
        if !elements.contains(&r.element.as_str()) {
            elements.push(&r.element);
        }
    }
    for element in elements {
        for r in table.rows.iter().filter(|r| r.element == element) {
            let [p, h1, semi, l2] = error_cells(&r.errors);
            out.write_record([r.grid.to_string(), r.element.clone(), p, h1, semi, l2]).map_err(csv_error)?;
        }
        for o in table.orders.iter().filter(|o| o.element == element) {
            out.write_record([
                format!("order_{}_{}", o.coarse, o.fine),
                o.element.clone(),
                order_cell(o.p_l2_mod_r),
                order_cell(o.v_h1),
                order_cell(o.v_h1_semi),
                order_cell(o.v_l2),
            ])
            .map_err(csv_error)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// A single error row with the convergence header.
pub fn write_errors_csv<W: Write>(grid: &str, element: &str, e: &ErrorNorms, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER).map_err(csv_error)?;
    let [p, h1, semi, l2] = error_cells(e);
    out.write_record([grid, element, &p, &h1, &semi, &l2]).map_err(csv_error)?;
    out.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: serde::Serialize>(value: &T, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::InvalidArgument(format!("json: {e}")))?;
    writeln!(w)?;
    Ok(())
}
