//! Tabulated scan output and its CSV encoding.

use std::io::{self, Write};

use crate::{Error, Result};

/// A strictly monotone abscissa with any number of equally long named columns.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub abscissa_name: String,
    pub abscissa: Vec<f64>,
    columns: Vec<(String, Vec<f64>)>,
    /// Free-form `key = value` records (parameters, truncation, drive).
    pub metadata: Vec<(String, String)>,
}

impl ScanResult {
    pub fn new(abscissa_name: impl Into<String>, abscissa: Vec<f64>) -> Result<Self> {
        if abscissa.is_empty() {
            return Err(Error::InvalidParameter("scan abscissa is empty".into()));
        }
        let increasing = abscissa.windows(2).all(|w| w[1] > w[0]);
        let decreasing = abscissa.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::InvalidParameter("scan abscissa must be strictly monotone".into()));
        }
        Ok(Self { abscissa_name: abscissa_name.into(), abscissa, columns: Vec::new(), metadata: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.abscissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissa.is_empty()
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if values.len() != self.abscissa.len() {
            return Err(Error::InvalidParameter(format!(
                "column {name} has {} values, abscissa has {}",
                values.len(),
                self.abscissa.len()
            )));
        }
        if self.column(&name).is_some() || name == self.abscissa_name {
            return Err(Error::InvalidParameter(format!("duplicate column {name}")));
        }
        self.columns.push((name, values));
        Ok(())
    }

    pub fn with_column(mut self, name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        self.push_column(name, values)?;
        Ok(self)
    }

    pub fn add_metadata(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    /// Write `#`-prefixed comment lines, the header row and the data rows.
    ///
    /// Numbers are written with 12 significant digits, so equal results give
    /// byte-identical files.
    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> io::Result<()> {
        for line in comments {
            writeln!(w, "# {line}")?;
        }
        for (k, v) in &self.metadata {
            writeln!(w, "# meta.{k} = {v}")?;
        }
        write!(w, "{}", self.abscissa_name)?;
        for name in self.column_names() {
            write!(w, ",{name}")?;
        }
        writeln!(w)?;
        for (i, x) in self.abscissa.iter().enumerate() {
            write!(w, "{}", format_value(*x))?;
            for (_, col) in &self.columns {
                write!(w, ",{}", format_value(col[i]))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Fixed 12-significant-digit scientific formatting.
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.11e}")
    }
}

/// Indices of strict interior local minima.
pub fn local_minima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] < values[i - 1] && values[i] < values[i + 1])
        .collect()
}

/// Indices of strict interior local maxima.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
        .collect()
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count).map(|i| if i + 1 == count { stop } else { start + step * i as f64 }).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_monotone_and_ragged() {
        assert!(ScanResult::new("x", vec![0.0, 1.0, 1.0]).is_err());
        assert!(ScanResult::new("x", vec![]).is_err());
        let s = ScanResult::new("x", vec![2.0, 1.0]).unwrap();
        assert!(s.clone().with_column("y", vec![1.0]).is_err());
        assert!(s.with_column("x", vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn csv_layout() {
        let mut s = ScanResult::new("t", vec![0.0, 0.5]).unwrap().with_column("Pe", vec![1.0, f64::NAN]).unwrap();
        s.add_metadata("cutoffs", "1,1");
        let mut buf = Vec::new();
        s.write_csv(&mut buf, &["polariton 0.1.0".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "# polariton 0.1.0\n# meta.cutoffs = 1,1\nt,Pe\n0.00000000000e0,1.00000000000e0\n5.00000000000e-1,nan\n"
        );
    }

    #[test]
    fn extrema_and_linspace() {
        let v = [3.0, 1.0, 2.0, 0.5, 4.0];
        assert_eq!(local_minima(&v), vec![1, 3]);
        assert_eq!(local_maxima(&v), vec![2]);
        let x = linspace(-0.15, 0.15, 201);
        assert_eq!(x.len(), 201);
        assert_eq!(x[200], 0.15);
        assert!((x[100]).abs() < 1e-16);
    }
}
