//! File formats: operators, POMs and classical measures as JSON (complex
//! numbers as `[re, im]` pairs), and versioned CSV tables.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classical::{Atom, ClassicalMeasure, RayPoint};
use crate::error::{Error, Result};
use crate::linalg::{Operator, C64};
use crate::observables::DiscretePom;
use crate::states::Effect;

pub const TOOL_NAME: &str = "unsharp-lab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub type ComplexPair = [f64; 2];

fn pair(z: C64) -> ComplexPair {
    [z.re, z.im]
}

fn from_pair(p: ComplexPair) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dim: usize,
    pub matrix: Vec<Vec<ComplexPair>>,
}

impl From<&Operator> for OperatorJson {
    fn from(op: &Operator) -> Self {
        let d = op.dim();
        Self {
            dim: d,
            matrix: (0..d)
                .map(|i| (0..d).map(|j| pair(op.get(i, j))).collect())
                .collect(),
        }
    }
}

impl OperatorJson {
    pub fn to_operator(&self) -> Result<Operator> {
        if self.matrix.len() != self.dim || self.matrix.iter().any(|r| r.len() != self.dim) {
            return Err(Error::Parse(format!(
                "matrix rows do not match declared dimension {}",
                self.dim
            )));
        }
        let entries = self.matrix.iter().flatten().map(|&p| from_pair(p)).collect();
        Operator::from_rows(self.dim, entries)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PomJson {
    pub dim: usize,
    pub outcomes: Vec<String>,
    pub effects: Vec<Vec<Vec<ComplexPair>>>,
}

impl From<&DiscretePom> for PomJson {
    fn from(pom: &DiscretePom) -> Self {
        Self {
            dim: pom.dim(),
            outcomes: pom.outcomes().to_vec(),
            effects: pom
                .effects()
                .iter()
                .map(|e| OperatorJson::from(e.operator()).matrix)
                .collect(),
        }
    }
}

impl PomJson {
    pub fn to_pom(&self) -> Result<DiscretePom> {
        let effects = self
            .effects
            .iter()
            .map(|m| {
                Effect::new(
                    OperatorJson {
                        dim: self.dim,
                        matrix: m.clone(),
                    }
                    .to_operator()?,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        DiscretePom::new(self.outcomes.clone(), effects)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomJson {
    pub weight: f64,
    pub state_vector: Vec<ComplexPair>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureJson {
    pub atoms: Vec<AtomJson>,
}

impl From<&ClassicalMeasure> for MeasureJson {
    fn from(mu: &ClassicalMeasure) -> Self {
        Self {
            atoms: mu
                .atoms()
                .iter()
                .map(|a| AtomJson {
                    weight: a.weight,
                    state_vector: a.ray.vector().iter().map(|&z| pair(z)).collect(),
                })
                .collect(),
        }
    }
}

impl MeasureJson {
    pub fn to_measure(&self) -> Result<ClassicalMeasure> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let v: Vec<C64> = a.state_vector.iter().map(|&p| from_pair(p)).collect();
                Ok(Atom {
                    ray: RayPoint::from_vector(&v)?,
                    weight: a.weight,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ClassicalMeasure::new(atoms)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Run metadata stamped into every JSON summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub tool_version: String,
    pub command: String,
    pub parameters: serde_json::Value,
    pub seed: u64,
}

impl Metadata {
    pub fn new(command: &str, parameters: serde_json::Value, seed: u64) -> Self {
        Self {
            tool_version: format!("{TOOL_NAME} {TOOL_VERSION}"),
            command: command.to_string(),
            parameters,
            seed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary<'a, M: Serialize> {
    #[serde(flatten)]
    pub metadata: &'a Metadata,
    pub metrics: M,
}

pub fn write_json<M: Serialize>(path: &Path, metadata: &Metadata, metrics: M) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&Summary { metadata, metrics })?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// CSV table whose first line is a `#` comment carrying tool, version and command.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<T: Display>(&mut self, row: &[T]) {
        self.rows.push(row.iter().map(|x| x.to_string()).collect());
    }

    pub fn push_strings(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn version_line(command: &str) -> String {
        format!("# {TOOL_NAME} {TOOL_VERSION} {command}")
    }

    /// Body without the version line.
    pub fn body(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_error)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn write(&self, path: &Path, command: &str) -> Result<()> {
        let mut f = fs::File::create(path)?;
        writeln!(f, "{}", Self::version_line(command))?;
        f.write_all(self.body()?.as_bytes())?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}
