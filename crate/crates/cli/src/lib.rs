//! Command-line front end: builds the geometries and lattices for one order
//! `q` and reports every check as a structured record.

mod commands;
mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use panel_lattices::singer::LineLabel;
use panel_lattices::{
    classical_plane, extract_difference_set, LatticeFamily, OrderedDifferenceSet, Presentation,
};
use thiserror::Error;

pub use report::{Record, Report, Status};

/// Environment variable naming a directory for cached geometry files.
pub const CACHE_ENV: &str = "PANEL_LATTICES_CACHE";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Field(#[from] panel_lattices::FieldError),
    #[error(transparent)]
    Singer(#[from] panel_lattices::SingerError),
    #[error(transparent)]
    Lattice(#[from] panel_lattices::LatticeError),
    #[error(transparent)]
    Cog(#[from] panel_lattices::CogError),
    #[error(transparent)]
    Hjelmslev(#[from] panel_lattices::HjelmslevError),
    #[error(transparent)]
    Presentation(#[from] panel_lattices::PresentationError),
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "panel-lattices", version, about = "Panel-regular lattices and their finite geometries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandName,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CommandName {
    /// Build PG(2,q), its Singer cycle and difference set.
    Plane,
    /// Build the slanted symplectic quadrangle and its stabilisers.
    Quadrangle,
    /// Print a lattice presentation.
    Lattice,
    /// Compare complex-of-groups extraction with the direct builder.
    Crosscheck,
    /// Level-2 Hjelmslev plane counts, splitting and discrimination.
    Hjelmslev,
    /// First homology, perfectness and quotient Betti numbers.
    Homology,
    /// Every applicable command for the given order.
    All,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::Plane => "plane",
            CommandName::Quadrangle => "quadrangle",
            CommandName::Lattice => "lattice",
            CommandName::Crosscheck => "crosscheck",
            CommandName::Hjelmslev => "hjelmslev",
            CommandName::Homology => "homology",
            CommandName::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Order of the projective plane.
    #[arg(long, global = true)]
    pub q: Option<u64>,
    /// Lattice family: a2-general, a2-cyclic, c2-two-panel or c2-one-panel.
    #[arg(long, global = true, value_parser = parse_family)]
    pub family: Option<LatticeFamily>,
    /// Explicit difference set, comma separated; give once or three times.
    #[arg(long = "delta", global = true)]
    pub delta: Vec<String>,
    /// Permutation of the sorted difference set (or of the line labels for C2
    /// families), comma separated; give once or per slot.
    #[arg(long = "order", global = true)]
    pub order: Vec<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for the parallel parts.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

fn parse_family(s: &str) -> Result<LatticeFamily, String> {
    LatticeFamily::parse(s).ok_or_else(|| format!("unknown family {s:?}"))
}

/// Where the difference sets came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeltaSource {
    Computed,
    Explicit(Vec<OrderedDifferenceSet>),
}

/// A validated command line.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandName,
    pub q: u64,
    pub family: Option<LatticeFamily>,
    pub delta: DeltaSource,
    pub orders: Vec<Vec<usize>>,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub cache: Option<PathBuf>,
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|t| t.trim().parse::<T>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Invalid(format!("cannot parse {what} {text:?}")))
}

impl RunConfig {
    pub fn from_cli(cli: Cli, cache: Option<PathBuf>) -> Result<Self, CliError> {
        let o = cli.options;
        let q = o
            .q
            .ok_or_else(|| CliError::Invalid("--q is required".into()))?;
        let delta = if o.delta.is_empty() {
            DeltaSource::Computed
        } else {
            if o.delta.len() != 1 && o.delta.len() != 3 {
                return Err(CliError::Invalid(format!(
                    "give --delta once or three times, not {}",
                    o.delta.len()
                )));
            }
            let sets = o
                .delta
                .iter()
                .map(|t| OrderedDifferenceSet::parse_planar(t))
                .collect::<Result<Vec<_>, _>>()?;
            DeltaSource::Explicit(sets)
        };
        let orders = o
            .order
            .iter()
            .map(|t| parse_list::<usize>(t, "permutation"))
            .collect::<Result<Vec<_>, _>>()?;
        if orders.len() > 3 {
            return Err(CliError::Invalid("at most three --order values".into()));
        }
        Ok(RunConfig {
            command: cli.command,
            q,
            family: o.family,
            delta,
            orders,
            format: o.format,
            output: o.output,
            jobs: o.jobs,
            cache,
        })
    }

    fn order_for(&self, slot: usize) -> Option<&[usize]> {
        match self.orders.len() {
            0 => None,
            1 => Some(&self.orders[0]),
            _ => self.orders.get(slot).map(Vec::as_slice),
        }
    }

    /// The three ordered difference sets of the A2 families, validated.
    pub fn difference_sets(&self) -> Result<[OrderedDifferenceSet; 3], CliError> {
        let n = self.q * self.q + self.q + 1;
        let base: Vec<OrderedDifferenceSet> = match &self.delta {
            DeltaSource::Computed => {
                let plane = classical_plane(self.q)?;
                let (p, l) = panel_lattices::singer::canonical_base_flag(&plane);
                vec![extract_difference_set(&plane, p, l)?]
            }
            DeltaSource::Explicit(sets) => sets.clone(),
        };
        for d in &base {
            if d.modulus() != n {
                return Err(CliError::Invalid(format!(
                    "difference set {} has modulus {}, expected {n} for q = {}",
                    d.entries_string(),
                    d.modulus(),
                    self.q
                )));
            }
            let r = panel_lattices::verify_planar_difference_set(d);
            if !r.passed() {
                return Err(CliError::Invalid(format!(
                    "{} is not a planar difference set",
                    d.entries_string()
                )));
            }
        }
        let mut out = Vec::with_capacity(3);
        for slot in 0..3 {
            let d = &base[slot.min(base.len() - 1)];
            let d = match self.order_for(slot) {
                Some(p) => d.sorted().reordered(p)?.normalized(),
                None => d.clone(),
            };
            out.push(d);
        }
        Ok(out.try_into().expect("three slots"))
    }

    /// The two label bijections of the C2 families.
    pub fn bijections(&self) -> Result<(Vec<LineLabel>, Vec<LineLabel>), CliError> {
        let labels = LineLabel::all(self.q as u32);
        let permute = |slot: usize| -> Result<Vec<LineLabel>, CliError> {
            match self.order_for(slot) {
                None => Ok(labels.clone()),
                Some(p) => p
                    .iter()
                    .map(|&i| {
                        labels.get(i).copied().ok_or_else(|| {
                            CliError::Invalid(format!("label index {i} out of range"))
                        })
                    })
                    .collect(),
            }
        };
        Ok((permute(0)?, permute(1)?))
    }

    /// Deterministic echo of the input for the report header.
    pub fn echo(&self) -> serde_json::Value {
        let delta = match &self.delta {
            DeltaSource::Computed => serde_json::json!("computed"),
            DeltaSource::Explicit(sets) => {
                serde_json::json!(sets.iter().map(|d| d.entries().to_vec()).collect::<Vec<_>>())
            }
        };
        serde_json::json!({
            "q": self.q,
            "family": self.family.map(|f| f.as_str()),
            "delta": delta,
            "order": self.orders,
        })
    }
}

/// Runs one command and returns its report. Invalid input is an error; failed
/// checks are recorded in the report.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new(config.command.as_str(), config.echo());
    commands::dispatch(config, &mut report)?;
    Ok(report)
}

/// Renders a presentation one relator per line.
pub(crate) fn presentation_lines(p: &Presentation) -> Vec<String> {
    let mut lines = vec![format!("generators: {}", p.generators().join(" "))];
    lines.extend(p.relators().iter().map(|r| p.render_compact(r)));
    lines
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> Result<RunConfig, CliError> {
        let mut full = vec!["panel-lattices"];
        full.extend_from_slice(args);
        RunConfig::from_cli(Cli::try_parse_from(full).unwrap(), None)
    }

    #[test]
    fn one_delta_fills_three_slots() {
        let c = config(&["lattice", "--q", "2", "--delta", "0,1,3", "--order", "0,2,1"]).unwrap();
        let sets = c.difference_sets().unwrap();
        assert!(sets.iter().all(|d| d.entries() == [0, 3, 1]));
    }

    #[test]
    fn orderings_are_normalised() {
        let c = config(&["lattice", "--q", "2", "--order", "1,0,2"]).unwrap();
        let [a, ..] = c.difference_sets().unwrap();
        assert_eq!(a.entries()[0], 0);
        assert!(panel_lattices::verify_planar_difference_set(&a).passed());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(config(&["plane"]).is_err());
        assert!(config(&["lattice", "--q", "2", "--delta", "0,1,3", "--delta", "0,1,3"]).is_err());
        let c = config(&["lattice", "--q", "3", "--delta", "0,1,3"]).unwrap();
        assert!(c.difference_sets().is_err());
        let c = config(&["lattice", "--q", "3", "--order", "0,1,9"]).unwrap();
        assert!(c.bijections().is_err());
    }

    #[test]
    fn label_permutations() {
        let c = config(&["lattice", "--q", "3", "--order", "1,0,2,3", "--order", "3,2,1,0"]).unwrap();
        let (l, l2) = c.bijections().unwrap();
        let all = LineLabel::all(3);
        assert_eq!(l[0], all[1]);
        assert_eq!(l2[0], all[3]);
    }
}
