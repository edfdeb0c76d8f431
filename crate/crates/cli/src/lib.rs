//! File formats used by the `favest` command-line tool.
//!
//! Coefficients are JSON objects `{"l_max": L, "a": [[re, im], ...], "b": [...]}`
//! in flat-index order. Samples are CSV rows
//! `theta,phi,t1_re,t1_im,t2_re,t2_im,t3_re,t3_im`.

use std::io::{Read, Write};

use anyhow::{bail, ensure, Context, Result};
use favest::{spectrum_len, ScalarCoefficients, SpherePoint, TangentFieldSamples, VectorCoefficients};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// On-disk form of [`VectorCoefficients`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientsFile {
    pub l_max: usize,
    pub a: Vec<[f64; 2]>,
    pub b: Vec<[f64; 2]>,
}

impl CoefficientsFile {
    pub fn from_coefficients(c: &VectorCoefficients<f64>) -> Self {
        let pairs = |s: &ScalarCoefficients<f64>| s.values().iter().map(|z| [z.re, z.im]).collect();
        CoefficientsFile { l_max: c.l_max(), a: pairs(c.div()), b: pairs(c.curl()) }
    }

    pub fn to_coefficients(&self) -> Result<VectorCoefficients<f64>> {
        let len = spectrum_len(self.l_max);
        ensure!(
            self.a.len() == len && self.b.len() == len,
            "expected {len} entries per array for l_max {}, got {} and {}",
            self.l_max,
            self.a.len(),
            self.b.len()
        );
        ensure!(self.a[0] == [0.0; 2] && self.b[0] == [0.0; 2], "degree-0 entries must be zero");
        let scalar = |v: &[[f64; 2]]| {
            ScalarCoefficients::from_values(self.l_max, v.iter().map(|p| Complex::new(p[0], p[1])).collect())
        };
        Ok(VectorCoefficients::from_parts(scalar(&self.a)?, scalar(&self.b)?)?)
    }
}

pub fn write_coefficients(c: &VectorCoefficients<f64>, out: impl Write) -> Result<()> {
    serde_json::to_writer(out, &CoefficientsFile::from_coefficients(c))?;
    Ok(())
}

pub fn read_coefficients(input: impl Read) -> Result<VectorCoefficients<f64>> {
    let file: CoefficientsFile = serde_json::from_reader(input).context("malformed coefficients file")?;
    file.to_coefficients()
}

pub const SAMPLES_HEADER: [&str; 8] = ["theta", "phi", "t1_re", "t1_im", "t2_re", "t2_im", "t3_re", "t3_im"];

pub fn write_samples(s: &TangentFieldSamples<f64>, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SAMPLES_HEADER)?;
    for (p, v) in s.points().iter().zip(s.values()) {
        let (theta, phi) = p.to_spherical();
        let row = [theta, phi, v[0].re, v[0].im, v[1].re, v[1].im, v[2].re, v[2].im];
        w.write_record(row.iter().map(|x| format!("{x:.16e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples(input: impl Read) -> Result<TangentFieldSamples<f64>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    ensure!(header.iter().eq(SAMPLES_HEADER), "unexpected samples header {:?}", header);
    let mut points = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let x: Vec<f64> = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("samples row {}", i + 1))?;
        if x.len() != 8 {
            bail!("samples row {} has {} fields", i + 1, x.len());
        }
        points.push(SpherePoint::from_angles(x[0], x[1]));
        values.push([Complex::new(x[2], x[3]), Complex::new(x[4], x[5]), Complex::new(x[6], x[7])]);
    }
    Ok(TangentFieldSamples::new(points, values)?)
}

/// Parses `"8,16,32"`; an empty string gives an empty list.
pub fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().with_context(|| format!("bad list entry {t:?}")))
        .collect()
}
