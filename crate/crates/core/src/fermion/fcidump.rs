//! FCIDUMP integral files.
//!
//! The namelist header (`&FCI NORB=…,NELEC=…,MS2=…` up to `&END` or `/`) may
//! span several lines. Integral lines are `value i j k l` with 1-based
//! orbital indices in chemists' notation: all zero is the core energy,
//! `i j 0 0` a one-body element, `i 0 0 0` an orbital energy (ignored), and
//! anything else a two-body element `(ij|kl)`.

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct FermionIntegrals {
    pub n_orbitals: usize,
    pub n_electrons: usize,
    pub ms2: i64,
    pub core_energy: f64,
    /// `h[p][q]`, symmetric.
    one_body: Vec<f64>,
    /// `(pq|rs)` with full 8-fold symmetry, flattened `((p·n + q)·n + r)·n + s`.
    two_body: Vec<f64>,
}

impl FermionIntegrals {
    pub fn new(n_orbitals: usize, n_electrons: usize, ms2: i64) -> Result<Self> {
        if n_electrons > 2 * n_orbitals {
            return Err(Error::contract(format!(
                "{n_electrons} electrons do not fit in {n_orbitals} spatial orbitals"
            )));
        }
        if ms2.unsigned_abs() as usize > n_electrons || (n_electrons as i64 + ms2) % 2 != 0 {
            return Err(Error::contract(format!(
                "MS2={ms2} is inconsistent with {n_electrons} electrons"
            )));
        }
        Ok(Self {
            n_orbitals,
            n_electrons,
            ms2,
            core_energy: 0.0,
            one_body: vec![0.0; n_orbitals * n_orbitals],
            two_body: vec![0.0; n_orbitals.pow(4)],
        })
    }

    pub fn n_alpha(&self) -> usize {
        ((self.n_electrons as i64 + self.ms2) / 2) as usize
    }

    pub fn n_beta(&self) -> usize {
        ((self.n_electrons as i64 - self.ms2) / 2) as usize
    }

    #[inline]
    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.one_body[p * self.n_orbitals + q]
    }

    /// Chemists' `(pq|rs)`.
    #[inline]
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_orbitals;
        self.two_body[((p * n + q) * n + r) * n + s]
    }

    pub fn set_h(&mut self, p: usize, q: usize, value: f64) {
        let n = self.n_orbitals;
        self.one_body[p * n + q] = value;
        self.one_body[q * n + p] = value;
    }

    /// Sets `(pq|rs)` and its seven symmetry images.
    pub fn set_g(&mut self, p: usize, q: usize, r: usize, s: usize, value: f64) {
        let n = self.n_orbitals;
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            self.two_body[((a * n + b) * n + c) * n + d] = value;
        }
    }

    /// Checks the symmetric/8-fold invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_orbitals;
        for p in 0..n {
            for q in 0..n {
                if (self.h(p, q) - self.h(q, p)).abs() > SYMMETRY_TOL {
                    return Err(Error::contract(format!(
                        "one-body integrals not symmetric at ({p},{q})"
                    )));
                }
                for r in 0..n {
                    for s in 0..n {
                        let v = self.g(p, q, r, s);
                        let images = [self.g(q, p, r, s), self.g(p, q, s, r), self.g(r, s, p, q)];
                        if images.iter().any(|w| (w - v).abs() > SYMMETRY_TOL) {
                            return Err(Error::contract(format!(
                                "two-body integrals lack 8-fold symmetry at ({p}{q}|{r}{s})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_fcidump(&self) -> String {
        use std::fmt::Write as _;
        let n = self.n_orbitals;
        let mut out = format!(
            " &FCI NORB={n},NELEC={},MS2={},\n &END\n",
            self.n_electrons, self.ms2
        );
        for p in 0..n {
            for q in 0..=p {
                for r in 0..n {
                    for s in 0..=r {
                        if p * (p + 1) / 2 + q < r * (r + 1) / 2 + s {
                            continue;
                        }
                        let v = self.g(p, q, r, s);
                        if v != 0.0 {
                            writeln!(out, "{v:?} {} {} {} {}", p + 1, q + 1, r + 1, s + 1).unwrap();
                        }
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..=p {
                let v = self.h(p, q);
                if v != 0.0 {
                    writeln!(out, "{v:?} {} {} 0 0", p + 1, q + 1).unwrap();
                }
            }
        }
        writeln!(out, "{:?} 0 0 0 0", self.core_energy).unwrap();
        out
    }
}

struct Header {
    norb: usize,
    nelec: usize,
    ms2: i64,
}

fn parse_header(text: &str) -> Result<Header> {
    let upper = text.to_ascii_uppercase();
    let field = |key: &str| -> Result<Option<i64>> {
        // Keys are matched on word boundaries so `NORB` does not hit `ORBSYM`.
        let bytes = upper.as_bytes();
        let mut from = 0;
        while let Some(pos) = upper[from..].find(key) {
            let start = from + pos;
            let end = start + key.len();
            let boundary_before = start == 0 || !bytes[start - 1].is_ascii_alphanumeric();
            let rest = upper[end..].trim_start();
            if boundary_before && rest.starts_with('=') {
                let value: String = rest[1..]
                    .trim_start()
                    .chars()
                    .take_while(|c| c.is_ascii_digit() || *c == '-' || *c == '+')
                    .collect();
                return value
                    .parse()
                    .map(Some)
                    .map_err(|_| Error::parse(1, format!("bad value for {key} in header")));
            }
            from = end;
        }
        Ok(None)
    };
    let norb = field("NORB")?.ok_or_else(|| Error::parse(1, "header lacks NORB"))?;
    let nelec = field("NELEC")?.ok_or_else(|| Error::parse(1, "header lacks NELEC"))?;
    let ms2 = field("MS2")?.unwrap_or(0);
    if norb <= 0 || nelec < 0 {
        return Err(Error::parse(
            1,
            format!("invalid NORB={norb} / NELEC={nelec}"),
        ));
    }
    Ok(Header {
        norb: norb as usize,
        nelec: nelec as usize,
        ms2,
    })
}

pub fn parse_fcidump(text: &str) -> Result<FermionIntegrals> {
    let mut lines = text.lines().enumerate();
    let mut header = String::new();
    let mut saw_start = false;
    for (idx, line) in lines.by_ref() {
        let trimmed = line.trim();
        if !saw_start {
            if trimmed.is_empty() {
                continue;
            }
            if !trimmed.to_ascii_uppercase().starts_with("&FCI") {
                return Err(Error::parse(idx + 1, "expected `&FCI` namelist header"));
            }
            saw_start = true;
        }
        header.push_str(trimmed);
        header.push(' ');
        let upper = trimmed.to_ascii_uppercase();
        if upper.ends_with("&END") || upper.ends_with('/') || upper == "&END" {
            break;
        }
    }
    if !saw_start {
        return Err(Error::parse(1, "empty FCIDUMP"));
    }
    let hdr = parse_header(&header)?;
    let mut fi = FermionIntegrals::new(hdr.norb, hdr.nelec, hdr.ms2)
        .map_err(|e| Error::parse(1, e.to_string()))?;
    let n = hdr.norb;
    // Tracks explicitly given one-body elements to catch inconsistent duplicates.
    let mut seen_h = vec![false; n * n];

    for (idx, line) in lines {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 5 {
            return Err(Error::parse(
                lineno,
                format!("expected `value i j k l`, found {} fields", tokens.len()),
            ));
        }
        let value: f64 = tokens[0]
            .replace(['D', 'd'], "e")
            .parse()
            .map_err(|_| Error::parse(lineno, format!("non-numeric value {:?}", tokens[0])))?;
        let mut idx4 = [0usize; 4];
        for (slot, tok) in idx4.iter_mut().zip(&tokens[1..]) {
            let v: usize = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad orbital index {tok:?}")))?;
            if v > n {
                return Err(Error::parse(
                    lineno,
                    format!("orbital index {v} exceeds NORB={n}"),
                ));
            }
            *slot = v;
        }
        match idx4 {
            [0, 0, 0, 0] => fi.core_energy = value,
            [_, 0, 0, 0] => {}
            [i, j, 0, 0] if i > 0 && j > 0 => {
                let (p, q) = (i - 1, j - 1);
                if (seen_h[p * n + q] || seen_h[q * n + p])
                    && (fi.h(p, q) - value).abs() > SYMMETRY_TOL
                {
                    return Err(Error::parse(
                        lineno,
                        format!("one-body element ({i},{j}) conflicts with its transpose"),
                    ));
                }
                seen_h[p * n + q] = true;
                fi.set_h(p, q, value);
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                fi.set_g(i - 1, j - 1, k - 1, l - 1, value)
            }
            _ => {
                return Err(Error::parse(
                    lineno,
                    format!("unsupported index pattern {idx4:?}"),
                ))
            }
        }
    }
    Ok(fi)
}

#[cfg(test)]
mod tests {
    use super::*;

    const H2: &str = include_str!("../../tests/fixtures/h2_sto3g_0.74.fcidump");

    #[test]
    fn header_fields() {
        let fi =
            parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0\n&END\n0.7137 0 0 0 0\n-1.2563 1 1 0 0\n")
                .unwrap();
        assert_eq!((fi.n_orbitals, fi.n_electrons, fi.ms2), (2, 2, 0));
        assert_eq!(fi.core_energy, 0.7137);
        assert_eq!(fi.h(0, 0), -1.2563);
    }

    #[test]
    fn multiline_header_with_orbsym() {
        let fi = parse_fcidump(H2).unwrap();
        assert_eq!((fi.n_orbitals, fi.n_electrons, fi.ms2), (2, 2, 0));
        fi.validate().unwrap();
        assert_eq!(fi.g(1, 0, 1, 0), fi.g(0, 1, 0, 1));
        assert_eq!(fi.g(1, 1, 0, 0), fi.g(0, 0, 1, 1));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad_idx = "&FCI NORB=2,NELEC=2,MS2=0\n&END\n0.5 3 1 0 0\n";
        assert!(matches!(
            parse_fcidump(bad_idx),
            Err(Error::Parse { line: 3, .. })
        ));
        let bad_val = "&FCI NORB=2,NELEC=2,MS2=0\n&END\n0.5 1 1 0 0\nabc 1 1 1 1\n";
        assert!(matches!(
            parse_fcidump(bad_val),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(matches!(
            parse_fcidump("NORB=2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_fcidump("&FCI NELEC=2 /\n").is_err());
        assert!(parse_fcidump("&FCI NORB=1,NELEC=3 /\n").is_err());
    }

    #[test]
    fn writer_round_trips() {
        let fi = parse_fcidump(H2).unwrap();
        let again = parse_fcidump(&fi.to_fcidump()).unwrap();
        assert_eq!(fi, again);
    }
}
