//! Text formats: phase-space CSV with its grid sidecar, flat key=value
//! files, and a line-oriented Weyl symbol notation.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64 as C64;

use crate::calculus::{Coef, KProfile, Mode, WeylSymbol};
use crate::error::{Error, Result};
use crate::field::PhaseField;
use crate::grid::{Grid1D, PhaseGrid};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Parse `key = value` lines. `[section]` headers prefix the keys that follow
/// with `section.`; `#` starts a comment. Keys must be unique.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| perr(i + 1, "unterminated section header"))?.trim();
            if !name.is_empty() && !valid_key(name) {
                return Err(perr(i + 1, format!("bad section name '{name}'")));
            }
            section = name.to_string();
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| perr(i + 1, "expected key = value"))?;
        let k = k.trim();
        if !valid_key(k) {
            return Err(perr(i + 1, format!("bad key '{k}'")));
        }
        let key = if section.is_empty() { k.to_string() } else { format!("{section}.{k}") };
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(perr(i + 1, format!("duplicate key '{key}'")));
        }
    }
    Ok(out)
}

pub fn valid_key(k: &str) -> bool {
    !k.is_empty()
        && k.split('.').all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'))
}

/// Grid description stored next to a phase-space CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sidecar {
    pub grid: PhaseGrid,
    pub real: bool,
}

impl Sidecar {
    pub fn of(w: &PhaseField) -> Self {
        Self { grid: w.grid, real: w.real }
    }

    pub fn to_text(&self) -> String {
        let g = &self.grid;
        format!(
            "x.n = {}\nx.length = {}\nx.center = {}\nk.n = {}\nk.length = {}\nk.center = {}\nreal = {}\n",
            g.x.n, g.x.length, g.x.center, g.k.n, g.k.length, g.k.center, self.real
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let kv = parse_kv(text)?;
        let get = |k: &str| kv.get(k).ok_or_else(|| perr(0, format!("sidecar lacks '{k}'")));
        let num = |k: &str| -> Result<f64> { get(k)?.parse::<f64>().map_err(|_| perr(0, format!("'{k}' is not a number"))) };
        let int = |k: &str| -> Result<usize> { get(k)?.parse::<usize>().map_err(|_| perr(0, format!("'{k}' is not a count"))) };
        if let Some(extra) = kv.keys().find(|k| !SIDECAR_KEYS.contains(&k.as_str())) {
            return Err(perr(0, format!("unknown sidecar key '{extra}'")));
        }
        let x = Grid1D::new(int("x.n")?, num("x.length")?, num("x.center")?)?;
        let k = Grid1D::new(int("k.n")?, num("k.length")?, num("k.center")?)?;
        if x.n.saturating_mul(k.n) > MAX_POINTS {
            return Err(perr(0, format!("grid of {} x {} points exceeds {MAX_POINTS}", x.n, k.n)));
        }
        let real = match get("real")?.as_str() {
            "true" => true,
            "false" => false,
            other => return Err(perr(0, format!("'real' must be true or false, got '{other}'"))),
        };
        Ok(Self { grid: PhaseGrid::new(x, k), real })
    }
}

/// Largest phase grid a sidecar may describe.
pub const MAX_POINTS: usize = 1 << 24;

const SIDECAR_KEYS: [&str; 7] = ["x.n", "x.length", "x.center", "k.n", "k.length", "k.center", "real"];

/// Rows `x,k,re,im` in grid order.
pub fn write_phase_csv<W: Write>(w: &PhaseField, out: W) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidParam(format!("csv write: {e}"));
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["x", "k", "re", "im"]).map_err(io)?;
    let ks = w.grid.k.points();
    for (i, x) in w.grid.x.points().into_iter().enumerate() {
        for (j, &k) in ks.iter().enumerate() {
            let v = w.at(i, j);
            wr.write_record([x.to_string(), k.to_string(), v.re.to_string(), v.im.to_string()]).map_err(io)?;
        }
    }
    wr.flush().map_err(|e| Error::InvalidParam(format!("csv write: {e}")))?;
    Ok(())
}

/// Inverse of [`write_phase_csv`]; coordinates must sit on the sidecar grid.
pub fn read_phase_csv(data: &[u8], side: &Sidecar) -> Result<PhaseField> {
    let g = side.grid;
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(data);
    let header = rd.headers().map_err(|e| perr(1, e.to_string()))?.clone();
    if header.iter().map(str::trim).collect::<Vec<_>>() != ["x", "k", "re", "im"] {
        return Err(perr(1, "header must be x,k,re,im"));
    }
    let nk = g.k.n;
    let (tx, tk) = (1e-9 * g.x.spacing(), 1e-9 * g.k.spacing());
    let mut values = Vec::with_capacity(g.len().min(1 << 16));
    for (r, rec) in rd.records().enumerate() {
        let line = r + 2;
        let rec = rec.map_err(|e| perr(line, e.to_string()))?;
        if rec.len() != 4 {
            return Err(perr(line, "expected 4 fields"));
        }
        let mut f = [0.0; 4];
        for (slot, s) in f.iter_mut().zip(rec.iter()) {
            *slot = s.trim().parse::<f64>().map_err(|_| perr(line, format!("'{s}' is not a number")))?;
            if !slot.is_finite() {
                return Err(perr(line, "non-finite value"));
            }
        }
        if r >= g.len() {
            return Err(perr(line, "more rows than the grid holds"));
        }
        if (f[0] - g.x.point(r / nk)).abs() > tx || (f[1] - g.k.point(r % nk)).abs() > tk {
            return Err(perr(line, format!("({}, {}) is not grid point {r}", f[0], f[1])));
        }
        if side.real && f[3] != 0.0 {
            return Err(perr(line, "imaginary part in a real field"));
        }
        values.push(C64::new(f[2], f[3]));
    }
    if values.len() != g.len() {
        return Err(perr(0, format!("{} rows for a grid of {}", values.len(), g.len())));
    }
    let mut w = PhaseField::new(g, values)?;
    w.real = side.real;
    Ok(w)
}

fn fmt_c(c: C64) -> String {
    if c.im == 0.0 {
        c.re.to_string()
    } else {
        format!("{}:{}", c.re, c.im)
    }
}

fn parse_f(tok: &str, line: usize) -> Result<f64> {
    let v = tok.parse::<f64>().map_err(|_| perr(line, format!("'{tok}' is not a number")))?;
    if !v.is_finite() {
        return Err(perr(line, "non-finite number"));
    }
    Ok(v)
}

fn parse_c(tok: &str, line: usize) -> Result<C64> {
    match tok.split_once(':') {
        Some((a, b)) => Ok(C64::new(parse_f(a, line)?, parse_f(b, line)?)),
        None => Ok(C64::new(parse_f(tok, line)?, 0.0)),
    }
}

fn coef_text(c: &Coef) -> Result<String> {
    match c {
        Coef::Poly(p) => Ok(std::iter::once("poly".to_string()).chain(p.iter().map(|v| fmt_c(*v))).collect::<Vec<_>>().join(" ")),
        Coef::Gaussian { height, center, width } => Ok(format!("gaussian {height} {center} {width}")),
        Coef::Sampled(_) => Err(Error::UnsupportedSymbol("sampled coefficients have no text form".into())),
    }
}

fn parse_coef(toks: &[&str], line: usize) -> Result<Coef> {
    match toks.first() {
        Some(&"poly") => {
            if toks.len() < 2 {
                return Err(perr(line, "poly needs at least one coefficient"));
            }
            Ok(Coef::Poly(toks[1..].iter().map(|t| parse_c(t, line)).collect::<Result<_>>()?))
        }
        Some(&"gaussian") => {
            if toks.len() != 4 {
                return Err(perr(line, "gaussian takes height center width"));
            }
            Ok(Coef::Gaussian { height: parse_f(toks[1], line)?, center: parse_f(toks[2], line)?, width: parse_f(toks[3], line)? })
        }
        _ => Err(perr(line, "coefficient must start with poly or gaussian")),
    }
}

/// One line per term:
///
/// ```text
/// potential gaussian 1 0.3 1      # V(x)
/// k^2 poly 0.5                     # c_m(x) k^m, missing degrees are zero
/// mode 0.25 poly 0.5 gauss 0 rate 0:1
/// support 0.25
/// ```
pub fn symbol_to_text(l: &WeylSymbol) -> Result<String> {
    let mut s = String::new();
    match l {
        WeylSymbol::Potential(c) => s += &format!("potential {}\n", coef_text(c)?),
        WeylSymbol::PolyK(cs) => {
            for (m, c) in cs.iter().enumerate() {
                s += &format!("k^{m} {}\n", coef_text(c)?);
            }
        }
        WeylSymbol::Bandlimited { modes, support } => {
            for m in modes {
                let poly: Vec<String> = m.profile.poly.iter().map(|v| fmt_c(*v)).collect();
                s += &format!("mode {} poly {} gauss {} rate {}\n", m.u, poly.join(" "), m.profile.gauss, fmt_c(m.profile.rate));
            }
            s += &format!("support {support}\n");
        }
    }
    Ok(s)
}

pub fn parse_symbol(text: &str) -> Result<WeylSymbol> {
    let mut potential: Option<Coef> = None;
    let mut ks: BTreeMap<usize, Coef> = BTreeMap::new();
    let mut modes = Vec::new();
    let mut support: Option<f64> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };
        if head == "potential" {
            if potential.is_some() {
                return Err(perr(line, "second potential line"));
            }
            potential = Some(parse_coef(&toks[1..], line)?);
        } else if let Some(m) = head.strip_prefix("k^") {
            let m = m.parse::<usize>().map_err(|_| perr(line, format!("bad power '{head}'")))?;
            if m > crate::calculus::MAX_DEGREE {
                return Err(perr(line, format!("k-degree {m} too high")));
            }
            if ks.insert(m, parse_coef(&toks[1..], line)?).is_some() {
                return Err(perr(line, format!("k^{m} given twice")));
            }
        } else if head == "mode" {
            modes.push(parse_mode(&toks[1..], line)?);
        } else if head == "support" {
            if toks.len() != 2 || support.is_some() {
                return Err(perr(line, "support takes one value, once"));
            }
            support = Some(parse_f(toks[1], line)?);
        } else {
            return Err(perr(line, format!("unknown term '{head}'")));
        }
    }
    let kinds = potential.is_some() as u8 + !ks.is_empty() as u8 + !modes.is_empty() as u8;
    if kinds != 1 || (support.is_some() && modes.is_empty()) {
        return Err(perr(0, "a symbol is exactly one of: potential, k^m terms, modes"));
    }
    let sym = if let Some(c) = potential {
        WeylSymbol::Potential(c)
    } else if !ks.is_empty() {
        let top = *ks.keys().next_back().unwrap_or(&0);
        WeylSymbol::PolyK((0..=top).map(|m| ks.remove(&m).unwrap_or_else(|| Coef::constant(0.0))).collect())
    } else {
        let s = support.unwrap_or_else(|| modes.iter().fold(0.0_f64, |a, m: &Mode| a.max(m.u.abs())));
        WeylSymbol::Bandlimited { modes, support: s }
    };
    sym.validate()?;
    Ok(sym)
}

fn parse_mode(toks: &[&str], line: usize) -> Result<Mode> {
    if toks.len() < 3 || toks[1] != "poly" {
        return Err(perr(line, "mode takes u poly c0 [c1 ...] [gauss g] [rate r]"));
    }
    let u = parse_f(toks[0], line)?;
    let mut poly = Vec::new();
    let mut rest = &toks[2..];
    while let Some(t) = rest.first() {
        if *t == "gauss" || *t == "rate" {
            break;
        }
        poly.push(parse_c(t, line)?);
        rest = &rest[1..];
    }
    if poly.is_empty() {
        return Err(perr(line, "mode profile needs a coefficient"));
    }
    let mut profile = KProfile { poly, gauss: 0.0, rate: C64::new(0.0, 0.0) };
    let (mut seen_g, mut seen_r) = (false, false);
    while !rest.is_empty() {
        if rest.len() < 2 {
            return Err(perr(line, format!("'{}' needs a value", rest[0])));
        }
        match rest[0] {
            "gauss" if !seen_g => {
                profile.gauss = parse_f(rest[1], line)?;
                seen_g = true;
            }
            "rate" if !seen_r => {
                profile.rate = parse_c(rest[1], line)?;
                seen_r = true;
            }
            other => return Err(perr(line, format!("unexpected '{other}'"))),
        }
        rest = &rest[2..];
    }
    Ok(Mode { u, profile })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::gaussian_packet;
    use crate::wigner::{swt, SmoothingParams};

    #[test]
    fn kv_sections_and_comments() {
        let kv = parse_kv("a = 1 # one\n[grid]\nn = 64\nlength=8\n[]\nb = x y\n").unwrap();
        assert_eq!(kv["a"], "1");
        assert_eq!(kv["grid.n"], "64");
        assert_eq!(kv["grid.length"], "8");
        assert_eq!(kv["b"], "x y");
        assert!(matches!(parse_kv("a = 1\na = 2"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_kv("novalue").is_err());
        assert!(parse_kv("[bad").is_err());
        assert!(parse_kv("a..b = 1").is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let g = Grid1D::new(32, 8.0, 0.5).unwrap();
        let u = gaussian_packet(g, 0.5, 0.5, 1.0).unwrap();
        let w = swt(&u, &u, &SmoothingParams::new(1.0, 1.0, 1.0).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_phase_csv(&w, &mut buf).unwrap();
        let side = Sidecar::parse(&Sidecar::of(&w).to_text()).unwrap();
        assert_eq!(side, Sidecar::of(&w));
        let back = read_phase_csv(&buf, &side).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn csv_rejects_off_grid_rows() {
        let g = PhaseGrid::new(Grid1D::new(8, 1.0, 0.0).unwrap(), Grid1D::new(8, 1.0, 0.0).unwrap());
        let side = Sidecar { grid: g, real: true };
        assert!(read_phase_csv(b"x,k,re,im\n0.3,0,1,0\n", &side).is_err());
        assert!(read_phase_csv(b"a,b,c,d\n", &side).is_err());
        assert!(read_phase_csv(b"x,k,re,im\n", &side).is_err());
        assert!(Sidecar::parse("x.n = 8").is_err());
    }

    #[test]
    fn symbol_text_round_trip() {
        let syms = [
            WeylSymbol::x2(),
            WeylSymbol::xk(),
            WeylSymbol::cosine(0.7, 0.25),
            WeylSymbol::gaussian_x(1.0, 0.3, 1.2),
            WeylSymbol::PolyK(vec![Coef::Poly(vec![C64::new(1.0, 0.5)]), Coef::constant(0.0), Coef::constant(2.0)]),
        ];
        for s in syms {
            let t = symbol_to_text(&s).unwrap();
            assert_eq!(parse_symbol(&t).unwrap(), s, "{t}");
        }
    }

    #[test]
    fn symbol_text_errors() {
        assert!(parse_symbol("").is_err());
        assert!(parse_symbol("potential poly 1\nk^1 poly 1").is_err());
        assert!(parse_symbol("k^99 poly 1").is_err());
        assert!(parse_symbol("mode 1 poly 1\nsupport 0.5").is_err());
        assert!(parse_symbol("potential poly 0:1").is_err());
        assert!(matches!(parse_symbol("k^0 poly 1\nfrob 2"), Err(Error::Parse { line: 2, .. })));
        let s = parse_symbol("k^2 poly 1  # kinetic\n").unwrap();
        assert_eq!(s, WeylSymbol::k2());
    }
}
