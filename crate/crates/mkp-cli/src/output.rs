use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use mkp_core::{Grid3, ScalarField3};

use crate::config::Format;
use crate::error::Result;

/// Grid metadata carried inside JSON profiles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxisMeta {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridMeta {
    pub x: AxisMeta,
    pub y: AxisMeta,
    pub t: AxisMeta,
}

/// JSON profile: grid metadata plus the flat values array in the same order
/// as the CSV rows (x fastest, then y, then t).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileJson {
    pub grid: GridMeta,
    pub values: Vec<f64>,
}

impl ProfileJson {
    pub fn from_field(q: &ScalarField3) -> Self {
        let g = q.grid();
        let mut values = Vec::with_capacity(g.len());
        for it in 0..g.nt {
            for iy in 0..g.ny {
                for ix in 0..g.nx {
                    values.push(q.get(ix, iy, it));
                }
            }
        }
        Self {
            grid: GridMeta {
                x: AxisMeta { min: g.x_min, max: g.x_max, count: g.nx },
                y: AxisMeta { min: g.y_min, max: g.y_max, count: g.ny },
                t: AxisMeta { min: g.t_min, max: g.t_max, count: g.nt },
            },
            values,
        }
    }

    /// Rebuilds the field; inverse of [`ProfileJson::from_field`].
    pub fn into_field(self) -> Result<ScalarField3> {
        let g = Grid3::new(
            self.grid.x.min, self.grid.x.max, self.grid.x.count,
            self.grid.y.min, self.grid.y.max, self.grid.y.count,
            self.grid.t.min, self.grid.t.max, self.grid.t.count,
        )?;
        let mut q = ScalarField3::zeros(&g);
        let mut i = 0;
        for it in 0..g.nt {
            for iy in 0..g.ny {
                for ix in 0..g.nx {
                    q.set(ix, iy, it, self.values[i]);
                    i += 1;
                }
            }
        }
        Ok(q)
    }
}

/// Writes the CSV profile: header `x,y,t,q`, one row per grid point with x
/// varying fastest, full double precision (Rust's shortest round-trip float
/// formatting), no timestamps — identical input gives byte-identical output.
pub fn write_csv<W: Write>(mut w: W, q: &ScalarField3) -> std::io::Result<()> {
    let g = q.grid();
    writeln!(w, "x,y,t,q")?;
    for it in 0..g.nt {
        for iy in 0..g.ny {
            for ix in 0..g.nx {
                writeln!(w, "{},{},{},{}", g.x(ix), g.y(iy), g.t(it), q.get(ix, iy, it))?;
            }
        }
    }
    Ok(())
}

pub fn write_json<W: Write>(mut w: W, q: &ScalarField3) -> Result<()> {
    let profile = ProfileJson::from_field(q);
    serde_json::to_writer(&mut w, &profile)
        .map_err(|e| crate::error::CliError::Numeric(format!("json write: {e}")))?;
    writeln!(&mut w)?;
    Ok(())
}

/// Emits a profile to `path` (or standard output when `path` is `None`).
pub fn emit_profile(q: &ScalarField3, format: Format, path: Option<&Path>) -> Result<()> {
    let mut sink: Box<dyn Write> = match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    match format {
        Format::Csv => write_csv(&mut sink, q)?,
        Format::Json => write_json(&mut sink, q)?,
    }
    sink.flush()?;
    Ok(())
}
