use std::fmt;
use std::io::Write;

use num_traits::Zero;

use super::dist::Probability;
use crate::error::{Error, Result};
use crate::gf_base::BaseElem;

/// How a cell's distance was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Exact histograms over every assignment of the enumerated variables.
    Exhaustive,
    /// Span test on the GF(2)-affine map from randomness to the view.
    Linear,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exhaustive => "exhaustive",
            Method::Linear => "linear",
        })
    }
}

/// One unqualified set against one pair of secrets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditCell {
    pub set: String,
    pub s0: BaseElem,
    pub s1: BaseElem,
    pub distance: Probability,
    pub method: Method,
    /// Number of random bits the view depends on.
    pub variable_bits: u32,
}

impl AuditCell {
    pub fn passes(&self) -> bool {
        self.distance.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub scheme: String,
    pub params: String,
    pub cells: Vec<AuditCell>,
}

impl AuditReport {
    pub fn new(scheme: impl Into<String>, params: impl Into<String>) -> Self {
        AuditReport {
            scheme: scheme.into(),
            params: params.into(),
            cells: Vec::new(),
        }
    }

    /// Pass iff every distance is exactly zero.
    pub fn passes(&self) -> bool {
        self.cells.iter().all(AuditCell::passes)
    }

    pub fn max_distance(&self) -> Probability {
        self.cells.iter().map(|c| c.distance).max().unwrap_or_default()
    }

    pub fn failing(&self) -> impl Iterator<Item = &AuditCell> {
        self.cells.iter().filter(|c| !c.passes())
    }

    pub fn cell(&self, set: &str) -> Option<&AuditCell> {
        self.cells.iter().find(|c| c.set == set)
    }

    pub fn merge(&mut self, other: AuditReport) {
        self.cells.extend(other.cells);
    }

    /// One line per cell followed by a summary line.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        for c in &self.cells {
            writeln!(
                out,
                "{} {} set={} s0={} s1={} distance={} [{}, {} bits] {}",
                self.scheme,
                self.params,
                c.set,
                c.s0,
                c.s1,
                c.distance,
                c.method,
                c.variable_bits,
                verdict(c.passes())
            )?;
        }
        writeln!(
            out,
            "{} {}: {} cells, max distance {}, {}",
            self.scheme,
            self.params,
            self.cells.len(),
            self.max_distance(),
            verdict(self.passes())
        )?;
        Ok(())
    }

    /// Columns: scheme, params, set, s0, s1, distance_num, distance_den, verdict.
    pub fn write_csv<W: Write>(&self, out: W, header: bool) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        if header {
            w.write_record(CSV_HEADER).map_err(csv_err)?;
        }
        for c in &self.cells {
            w.write_record([
                self.scheme.as_str(),
                self.params.as_str(),
                c.set.as_str(),
                &c.s0.to_string(),
                &c.s1.to_string(),
                &c.distance.numer().to_string(),
                &c.distance.denom().to_string(),
                verdict(c.passes()),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub const CSV_HEADER: [&str; 8] = [
    "scheme",
    "params",
    "set",
    "s0",
    "s1",
    "distance_num",
    "distance_den",
    "verdict",
];

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn csv_and_text() {
        let mut r = AuditReport::new("demo", "l=1");
        let s0 = BaseElem::new(1, 0).unwrap();
        let s1 = BaseElem::new(1, 1).unwrap();
        r.cells.push(AuditCell {
            set: "{1,2}".into(),
            s0,
            s1,
            distance: Ratio::new(3, 4),
            method: Method::Exhaustive,
            variable_bits: 4,
        });
        let mut buf = Vec::new();
        r.write_csv(&mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "scheme,params,set,s0,s1,distance_num,distance_den,verdict\ndemo,l=1,\"{1,2}\",0,1,3,4,fail\n"
        );
        let mut buf = Vec::new();
        r.write_text(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("max distance 3/4, fail\n"));
        assert!(!r.passes());
    }
}
