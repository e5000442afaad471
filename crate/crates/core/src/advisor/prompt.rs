//! Structured prompt assembly for the plan backends.

use super::grid::GridSummary;
use crate::world::ScenarioConfig;

const TEMPLATE: &str = include_str!("prompt_template.txt");

/// Render the deterministic prompt for a grid summary: scenario, objective,
/// output-format constraints, synthetic few-shot examples, and the current
/// state, with the three-step reasoning instructions.
pub fn build_prompt(summary: &GridSummary, cfg: &ScenarioConfig) -> String {
    let mut grid = String::new();
    let (rows, cols) = summary.dims;
    grid.push_str("      ");
    for c in 0..cols {
        grid.push_str(&format!("{:>6}", format!("c{c}")));
    }
    grid.push('\n');
    for r in 0..rows {
        grid.push_str(&format!("{:>6}", format!("r{r}")));
        for c in 0..cols {
            grid.push_str(&format!("{:>6}", summary.ue_counts[summary.index(r, c)]));
        }
        grid.push('\n');
    }
    let bs_cells = summary
        .bs_cells
        .iter()
        .map(|(r, c)| format!("(r{r}, c{c})"))
        .collect::<Vec<_>>()
        .join(", ");

    TEMPLATE
        .replace("{side}", &format!("{:.0}", summary.side_length))
        .replace("{rows}", &rows.to_string())
        .replace("{cols}", &cols.to_string())
        .replace("{cell_side}", &format!("{:.1}", summary.cell_side))
        .replace("{n_uav}", &cfg.n_uav.to_string())
        .replace("{altitude}", &format!("{:.0}", cfg.uav_altitude))
        .replace("{bs_cells}", &bs_cells)
        .replace("{grid}", grid.trim_end())
}
