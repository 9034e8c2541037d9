//! Text formats for lattice output.
//!
//! Every file starts with `#` metadata lines; the PGM format requires its
//! `P2` magic first, so there the comments follow the magic line.

use std::io::{self, Write};

use super::{lattice_point, ErrmapSample, FieldGrid, SignClass, SignMap};

/// Metadata header shared by all output formats.
#[derive(Clone, Debug, PartialEq)]
pub struct Metadata {
    pub version: String,
    pub hamiltonian: String,
    pub order: usize,
    pub grid: Option<usize>,
    pub t: Option<String>,
    pub mode: Option<String>,
    pub epsilon_blowup: Option<f64>,
    pub threads: usize,
    /// Further `key: value` lines.
    pub extra: Vec<(String, String)>,
}

impl Metadata {
    pub fn for_field(fg: &FieldGrid, version: &str) -> Self {
        Metadata {
            version: version.to_string(),
            hamiltonian: fg.meta().hamiltonian.clone(),
            order: fg.meta().order,
            grid: Some(fg.grid()),
            t: Some(format_float(fg.t())),
            mode: Some(fg.mode().name().to_string()),
            epsilon_blowup: Some(fg.meta().epsilon_blowup),
            threads: fg.meta().threads,
            extra: vec![("lattice".into(), "x_i = i/G, y_j = j/G".into())],
        }
    }

    pub fn lines(&self) -> Vec<String> {
        let na = || "-".to_string();
        let mut out = vec![
            format!("version: {}", self.version),
            format!("hamiltonian: {}", self.hamiltonian),
            format!("order: {}", self.order),
            format!("grid: {}", self.grid.map_or_else(na, |g| g.to_string())),
            format!("t: {}", self.t.clone().unwrap_or_else(na)),
            format!("mode: {}", self.mode.clone().unwrap_or_else(na)),
            format!("epsilon_blowup: {}", self.epsilon_blowup.map_or_else(na, |e| format!("{e:e}"))),
            format!("threads: {}", self.threads),
        ];
        out.extend(self.extra.iter().map(|(k, v)| format!("{k}: {v}")));
        out
    }

    pub fn write<W: Write + ?Sized>(&self, w: &mut W) -> io::Result<()> {
        for line in self.lines() {
            writeln!(w, "# {line}")?;
        }
        Ok(())
    }
}

/// 17 significant digits, which round-trips every `f64`.
pub fn format_float(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn write_field_csv<W: Write + ?Sized>(w: &mut W, fg: &FieldGrid, meta: &Metadata) -> io::Result<()> {
    meta.write(w)?;
    writeln!(w, "x,y,re_h,im_residual,denom_abs,blowup")?;
    let g = fg.grid();
    for i in 0..g {
        for j in 0..g {
            let (x, y) = fg.point(i, j);
            let v = fg.value(i, j);
            writeln!(
                w,
                "{},{},{},{},{},{}",
                format_float(x),
                format_float(y),
                format_float(v.h),
                format_float(v.im_residual),
                format_float(v.denom_abs),
                u8::from(v.blowup)
            )?;
        }
    }
    Ok(())
}

pub fn write_errmap_csv<W: Write + ?Sized>(w: &mut W, rows: &[ErrmapSample], meta: &Metadata) -> io::Result<()> {
    meta.write(w)?;
    writeln!(w, "s,t,indicator")?;
    for r in rows {
        writeln!(w, "{},{},{}", format_float(r.s), format_float(r.t), format_float(r.indicator))?;
    }
    Ok(())
}

pub fn class_gray(c: SignClass) -> u8 {
    match c {
        SignClass::Negative => 0,
        SignClass::Blowup => 128,
        SignClass::Positive => 255,
    }
}

pub fn class_name(c: SignClass) -> &'static str {
    match c {
        SignClass::Negative => "negative",
        SignClass::Blowup => "blowup",
        SignClass::Positive => "positive",
    }
}

/// Plain PGM, one raster row per `y_j` (y increasing downward), `x`
/// increasing to the right.
pub fn write_signmap_pgm<W: Write + ?Sized>(w: &mut W, sm: &SignMap, meta: &Metadata) -> io::Result<()> {
    let g = sm.grid();
    writeln!(w, "P2")?;
    meta.write(w)?;
    writeln!(w, "# classes: negative=0 blowup=128 positive=255")?;
    writeln!(w, "{g} {g}")?;
    writeln!(w, "255")?;
    for j in 0..g {
        let row: Vec<String> = (0..g).map(|i| class_gray(sm.class(i, j)).to_string()).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn write_signmap_csv<W: Write + ?Sized>(w: &mut W, sm: &SignMap, meta: &Metadata) -> io::Result<()> {
    meta.write(w)?;
    writeln!(w, "x,y,class")?;
    let g = sm.grid();
    for i in 0..g {
        for j in 0..g {
            let (x, y) = lattice_point(g, i, j);
            writeln!(w, "{},{},{}", format_float(x), format_float(y), class_name(sm.class(i, j)))?;
        }
    }
    Ok(())
}
