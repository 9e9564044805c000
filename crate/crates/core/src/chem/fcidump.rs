//! FCIDUMP integral files.
//!
//! Header is a Fortran namelist (`&FCI NORB=.., NELEC=.., MS2=.., &END` or
//! terminated by `/`), followed by `value i j k l` records with 1-based
//! indices:
//!
//! * `i j k l` all non-zero: chemist-notation `(ij|kl)` with 8-fold symmetry
//! * `i j 0 0`: one-electron `h_ij` (symmetric)
//! * `i 0 0 0`: orbital energy, ignored
//! * `0 0 0 0`: core energy

use std::path::Path;

use crate::error::{Error, Result};

/// Disagreement tolerated between two records that map to the same
/// symmetry-equivalent integral.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// Spatial-orbital integrals parsed from an FCIDUMP file.
#[derive(Clone, Debug, PartialEq)]
pub struct Integrals {
    pub n_orbitals: usize,
    pub n_electrons: usize,
    /// `2·S_z` from the `MS2` key.
    pub ms2: i32,
    pub core_energy: f64,
    /// Row-major `n × n`.
    pub one_body: Vec<f64>,
    /// Chemist `(ij|kl)`, row-major `n⁴`.
    pub two_body: Vec<f64>,
}

impl Integrals {
    pub fn zeros(n_orbitals: usize, n_electrons: usize, ms2: i32) -> Self {
        Self {
            n_orbitals,
            n_electrons,
            ms2,
            core_energy: 0.0,
            one_body: vec![0.0; n_orbitals * n_orbitals],
            two_body: vec![0.0; n_orbitals.pow(4)],
        }
    }

    #[inline]
    pub fn h1(&self, i: usize, j: usize) -> f64 {
        self.one_body[i * self.n_orbitals + j]
    }

    /// `(ij|kl)`.
    #[inline]
    pub fn eri(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n_orbitals;
        self.two_body[((i * n + j) * n + k) * n + l]
    }

    fn eri_index(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        let n = self.n_orbitals;
        ((i * n + j) * n + k) * n + l
    }
}

pub fn read_fcidump(path: impl AsRef<Path>) -> Result<Integrals> {
    let text = std::fs::read_to_string(path)?;
    parse_fcidump(&text)
}

fn header_err(msg: impl Into<String>) -> Error {
    Error::Parse {
        line: 1,
        msg: msg.into(),
    }
}

/// Splits namelist text into `(KEY, [values])` pairs.
fn parse_namelist(body: &str) -> Vec<(String, Vec<String>)> {
    let mut out: Vec<(String, Vec<String>)> = Vec::new();
    for tok in body
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        if let Some((key, value)) = tok.split_once('=') {
            let mut values = Vec::new();
            if !value.is_empty() {
                values.push(value.to_string());
            }
            out.push((key.trim().to_ascii_uppercase(), values));
        } else if let Some(last) = out.last_mut() {
            last.1.push(tok.to_string());
        }
    }
    out
}

pub fn parse_fcidump(text: &str) -> Result<Integrals> {
    let upper = text.to_ascii_uppercase();
    let start = upper
        .find("&FCI")
        .ok_or_else(|| header_err("missing &FCI namelist"))?;
    let after = start + 4;
    let (end_rel, end_len) = match (upper[after..].find("&END"), upper[after..].find('/')) {
        (Some(a), Some(b)) if b < a => (b, 1),
        (Some(a), _) => (a, 4),
        (None, Some(b)) => (b, 1),
        (None, None) => return Err(header_err("unterminated &FCI namelist")),
    };
    let header = &text[after..after + end_rel];
    let body_start = after + end_rel + end_len;
    let header_lines = text[..body_start].lines().count();

    let mut norb = None;
    let mut nelec = None;
    let mut ms2 = 0i32;
    for (key, values) in parse_namelist(header) {
        let first = values.first().map(String::as_str);
        match key.as_str() {
            "NORB" => {
                norb = Some(
                    first
                        .and_then(|v| v.parse::<usize>().ok())
                        .ok_or_else(|| header_err("bad NORB"))?,
                )
            }
            "NELEC" => {
                nelec = Some(
                    first
                        .and_then(|v| v.parse::<usize>().ok())
                        .ok_or_else(|| header_err("bad NELEC"))?,
                )
            }
            "MS2" => {
                ms2 = first
                    .and_then(|v| v.parse::<i32>().ok())
                    .ok_or_else(|| header_err("bad MS2"))?
            }
            _ => {}
        }
    }
    let norb = norb.ok_or_else(|| header_err("NORB missing"))?;
    let nelec = nelec.ok_or_else(|| header_err("NELEC missing"))?;
    if norb == 0 || norb > 32 {
        return Err(header_err(format!("NORB={norb} outside 1..=32")));
    }

    let mut ints = Integrals::zeros(norb, nelec, ms2);
    let mut set1 = vec![false; norb * norb];
    let mut set2 = vec![false; norb.pow(4)];
    let mut core_set = false;

    let rest = &text[body_start..];
    // the terminator may share a line with trailing text; line numbers are
    // relative to the file start
    for (offset, raw) in rest.lines().enumerate() {
        let line_no = header_lines + offset;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 'value i j k l', got '{line}'"),
            });
        }
        let value: f64 = fields[0]
            .replace(['D', 'd'], "E")
            .parse()
            .map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad value '{}'", fields[0]),
            })?;
        let mut idx = [0usize; 4];
        for (slot, f) in idx.iter_mut().zip(&fields[1..]) {
            let v: usize = f.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad index '{f}'"),
            })?;
            if v > norb {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    limit: norb,
                });
            }
            *slot = v;
        }
        let put = |store: &mut [f64], flags: &mut [bool], at: usize| -> Result<()> {
            if flags[at] && (store[at] - value).abs() > SYMMETRY_TOL {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!(
                        "record disagrees with symmetry image ({} vs {value})",
                        store[at]
                    ),
                });
            }
            store[at] = value;
            flags[at] = true;
            Ok(())
        };
        match idx {
            [0, 0, 0, 0] => {
                if core_set && (ints.core_energy - value).abs() > SYMMETRY_TOL {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "conflicting core energy records".into(),
                    });
                }
                ints.core_energy = value;
                core_set = true;
            }
            [_, 0, 0, 0] => {}
            [i, j, 0, 0] if i > 0 && j > 0 => {
                let (i, j) = (i - 1, j - 1);
                put(&mut ints.one_body, &mut set1, i * norb + j)?;
                put(&mut ints.one_body, &mut set1, j * norb + i)?;
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                let (i, j, k, l) = (i - 1, j - 1, k - 1, l - 1);
                let images = [
                    (i, j, k, l),
                    (j, i, k, l),
                    (i, j, l, k),
                    (j, i, l, k),
                    (k, l, i, j),
                    (l, k, i, j),
                    (k, l, j, i),
                    (l, k, j, i),
                ];
                for (a, b, c, d) in images {
                    let at = ints.eri_index(a, b, c, d);
                    put(&mut ints.two_body, &mut set2, at)?;
                }
            }
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("unsupported index pattern {idx:?}"),
                })
            }
        }
    }
    Ok(ints)
}

/// Serializes integrals back to FCIDUMP, one record per symmetry-unique
/// non-zero integral.
pub fn write_fcidump(ints: &Integrals) -> String {
    let n = ints.n_orbitals;
    let mut out = format!(
        " &FCI NORB={},NELEC={},MS2={},\n &END\n",
        n, ints.n_electrons, ints.ms2
    );
    let pair = |a: usize, b: usize| if a >= b { a * (a + 1) / 2 + b } else { b * (b + 1) / 2 + a };
    for i in 0..n {
        for j in 0..=i {
            for k in 0..n {
                for l in 0..=k {
                    if pair(i, j) < pair(k, l) {
                        continue;
                    }
                    let v = ints.eri(i, j, k, l);
                    if v != 0.0 {
                        out.push_str(&format!("{v:e} {} {} {} {}\n", i + 1, j + 1, k + 1, l + 1));
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = ints.h1(i, j);
            if v != 0.0 {
                out.push_str(&format!("{v:e} {} {} 0 0\n", i + 1, j + 1));
            }
        }
    }
    out.push_str(&format!("{:e} 0 0 0 0\n", ints.core_energy));
    out
}
