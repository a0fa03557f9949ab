use std::path::{Path, PathBuf};

use serde::Serialize;

use super::CliError;

/// 17 significant digits; non-finite values as `nan`, `inf`, `-inf`.
pub fn f17(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn opt_f17(x: Option<f64>) -> String {
    x.map(f17).unwrap_or_default()
}

/// FNV-1a over the bit patterns of `z`.
pub fn point_hash(z: &[f64]) -> String {
    let h = z.iter().flat_map(|v| v.to_bits().to_le_bytes()).fold(0xCBF2_9CE4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01B3)
    });
    format!("{h:016x}")
}

#[derive(Debug, Default, Clone, PartialEq)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("cells are UTF-8")
    }
}

/// Long-format plot rows: `series, x, y, err`.
#[derive(Debug, Default)]
pub struct PlotData {
    csv: Option<Csv>,
}

impl PlotData {
    pub fn new(enabled: bool) -> Self {
        Self {
            csv: enabled.then(|| Csv::new(&["series", "x", "y", "err"])),
        }
    }

    pub fn point(&mut self, series: &str, x: f64, y: f64, err: Option<f64>) {
        if let Some(c) = self.csv.as_mut() {
            c.row(vec![series.to_string(), f17(x), f17(y), opt_f17(err)]);
        }
    }

    pub fn write(&self, out: &OutputDir) -> Result<(), CliError> {
        match &self.csv {
            Some(c) => out.write("plot_data.csv", c.render()),
            None => Ok(()),
        }
    }
}

pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root).map_err(|e| CliError::Io(format!("{}: {e}", root.display())))?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
        let p = self.path(name);
        std::fs::write(&p, contents).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
        text.push('\n');
        self.write(name, text)
    }

    pub fn write_csv(&self, name: &str, csv: &Csv) -> Result<(), CliError> {
        self.write(name, csv.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::f64::consts::PI] {
            let s = f17(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17);
        }
        assert_eq!(f17(f64::NAN), "nan");
        assert_eq!(opt_f17(None), "");
    }

    #[test]
    fn csv_render() {
        let mut c = Csv::new(&["a", "b"]);
        c.row(vec!["1".into(), "2".into()]);
        c.row(vec!["x,y".into(), "3".into()]);
        assert_eq!(c.render(), "a,b\n1,2\n\"x,y\",3\n");
        assert_ne!(point_hash(&[0.0, 1.0]), point_hash(&[1.0, 0.0]));
    }
}
