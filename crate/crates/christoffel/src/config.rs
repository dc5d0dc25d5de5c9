//! Experiment configuration: a small line-based `key = value` format with
//! `[measure]`, `[weight]` and `[run]` sections, `#` comments, and strict
//! key checking so typos fail loudly instead of silently using a default.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::measure::{load_measure, DiscreteMeasure, IntervalRule, MetricWeight};
use crate::toeplitz::{RationalSymbol, SymbolFunction};

/// Which family of nodes the measure uses.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureSpec {
    Circle { m: usize, radius: f64 },
    Chebyshev { m: usize },
    Uniform { m: usize },
    File(PathBuf),
}

/// The metric weight phi.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightSpec {
    Zero,
    Gaussian(f64),
    /// phi column of the measure file; only valid with `MeasureSpec::File`.
    File,
}

/// Symbol choices understood by the config format.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolSpec {
    Constant(Complex64),
    ReZ,
    AbsSqr,
    Coordinate,
    Rational {
        numerator: Vec<Complex64>,
        denominator: Vec<Complex64>,
    },
}

impl SymbolSpec {
    pub fn to_symbol(&self) -> SymbolFunction {
        match self {
            SymbolSpec::Constant(c) => SymbolFunction::constant(*c),
            SymbolSpec::ReZ => SymbolFunction::re_z(),
            SymbolSpec::AbsSqr => SymbolFunction::abs_sqr(),
            SymbolSpec::Coordinate => SymbolFunction::coordinate(),
            SymbolSpec::Rational { .. } => self.to_rational().unwrap().to_symbol(),
        }
    }

    /// Rational form when the spec has one; the sampled symbols (re_z,
    /// abs_sqr) do not.
    pub fn to_rational(&self) -> Option<RationalSymbol> {
        match self {
            SymbolSpec::Constant(c) => Some(RationalSymbol::new(
                vec![*c],
                vec![Complex64::new(1.0, 0.0)],
            )),
            SymbolSpec::Coordinate => Some(RationalSymbol::coordinate()),
            SymbolSpec::Rational {
                numerator,
                denominator,
            } => Some(RationalSymbol::new(numerator.clone(), denominator.clone())),
            _ => None,
        }
    }

    fn canonical(&self) -> String {
        match self {
            SymbolSpec::Constant(c) => format!("const({},{})", c.re, c.im),
            SymbolSpec::ReZ => "re_z".to_string(),
            SymbolSpec::AbsSqr => "abs_sqr".to_string(),
            SymbolSpec::Coordinate => "z".to_string(),
            SymbolSpec::Rational {
                numerator,
                denominator,
            } => {
                let fmt = |v: &[Complex64]| {
                    v.iter()
                        .map(|c| format!("{},{}", c.re, c.im))
                        .collect::<Vec<_>>()
                        .join(";")
                };
                format!("rational({}/{})", fmt(numerator), fmt(denominator))
            }
        }
    }
}

/// Fully resolved experiment configuration. One file can drive all six
/// subcommands; each reads the fields it needs.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub measure: MeasureSpec,
    pub atoms: Vec<(Complex64, f64)>,
    pub weight: WeightSpec,
    pub k_list: Vec<usize>,
    /// Off-diagonal distance; defaults to a quarter of the support diameter.
    pub delta: Option<f64>,
    /// Vanishing fraction for forbidden-region scans.
    pub eps: f64,
    /// Vanishing point for forbidden-region scans.
    pub y0: Complex64,
    pub probe_radius: f64,
    pub probe_circles: usize,
    pub probe_angles: usize,
    pub f: SymbolSpec,
    pub g: SymbolSpec,
    pub p_list: Vec<f64>,
    /// Highest Toeplitz moment order to report gaps for.
    pub moment: u32,
    /// Number of randomized comparison trials.
    pub trials: usize,
    /// Degree budget for the off-space commutator.
    pub k0: usize,
    pub anchor: Complex64,
    pub anchor_radius: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let display = path.display().to_string();
        let mut sections: BTreeMap<String, BTreeMap<String, (usize, String)>> = BTreeMap::new();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                current = name.trim().to_string();
                if !matches!(current.as_str(), "measure" | "weight" | "run") {
                    return Err(Error::Parse {
                        path: display,
                        line: lineno + 1,
                        message: format!("unknown section [{current}]"),
                    });
                }
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: display.clone(),
                line: lineno + 1,
                message: "expected `key = value`".to_string(),
            })?;
            if current.is_empty() {
                return Err(Error::Parse {
                    path: display,
                    line: lineno + 1,
                    message: "key outside any [section]".to_string(),
                });
            }
            sections
                .get_mut(&current)
                .unwrap()
                .insert(key.trim().to_string(), (lineno + 1, value.trim().to_string()));
        }

        let mut cfg = ExperimentConfig::defaults();
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();

        if let Some(mut sec) = sections.remove("measure") {
            cfg.measure = parse_measure(&display, &mut sec, &base_dir)?;
            if let Some((_, atoms)) = sec.remove("atoms") {
                cfg.atoms = parse_atoms(&display, &atoms)?;
            }
            reject_leftovers(&display, "measure", &sec)?;
        }
        if let Some(mut sec) = sections.remove("weight") {
            cfg.weight = parse_weight(&display, &mut sec)?;
            reject_leftovers(&display, "weight", &sec)?;
        }
        if let Some(mut sec) = sections.remove("run") {
            parse_run(&display, &mut sec, &mut cfg, &base_dir)?;
            reject_leftovers(&display, "run", &sec)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn defaults() -> Self {
        ExperimentConfig {
            measure: MeasureSpec::Circle { m: 64, radius: 1.0 },
            atoms: Vec::new(),
            weight: WeightSpec::Zero,
            k_list: vec![4, 8, 16],
            delta: None,
            eps: 0.25,
            y0: Complex64::new(0.0, 0.0),
            probe_radius: 0.2,
            probe_circles: 8,
            probe_angles: 16,
            f: SymbolSpec::ReZ,
            g: SymbolSpec::ReZ,
            p_list: vec![1.0],
            moment: 6,
            trials: 100,
            k0: 1,
            anchor: Complex64::new(0.0, 0.0),
            anchor_radius: 0.25,
            seed: 1,
            out_dir: PathBuf::from("out"),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k_list.is_empty() {
            return Err(Error::Config("k list must not be empty".to_string()));
        }
        if self.k_list.windows(2).any(|w| w[0] >= w[1]) || self.k_list[0] < 1 {
            return Err(Error::Config(
                "k list must be strictly increasing and positive".to_string(),
            ));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::Config(format!("eps must be in (0, 1), got {}", self.eps)));
        }
        if self.p_list.is_empty() || self.p_list.iter().any(|&p| p.is_nan() || p < 1.0) {
            return Err(Error::Config("p list entries must be >= 1".to_string()));
        }
        if self.moment < 2 {
            return Err(Error::Config("moment order must be at least 2".to_string()));
        }
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".to_string()));
        }
        if self.probe_radius.is_nan()
            || self.probe_radius <= 0.0
            || self.probe_circles < 1
            || self.probe_angles < 1
        {
            return Err(Error::Config("probe grid must be nonempty".to_string()));
        }
        if self.anchor_radius.is_nan() || self.anchor_radius <= 0.0 {
            return Err(Error::Config("anchor_radius must be positive".to_string()));
        }
        if let Some(d) = self.delta {
            if d.is_nan() || d <= 0.0 {
                return Err(Error::Config("delta must be positive".to_string()));
            }
        }
        if matches!(self.weight, WeightSpec::File) && !matches!(self.measure, MeasureSpec::File(_))
        {
            return Err(Error::Config(
                "weight kind `file` needs a file-backed measure".to_string(),
            ));
        }
        Ok(())
    }

    /// Builds the measure (with atoms applied) and the metric weight.
    pub fn build_measure(&self) -> Result<(DiscreteMeasure, MetricWeight)> {
        let (base, phi) = match &self.measure {
            MeasureSpec::Circle { m, radius } => (
                DiscreteMeasure::circle(*m, *radius),
                self.weight_for(None)?,
            ),
            MeasureSpec::Chebyshev { m } => (
                DiscreteMeasure::interval(*m, IntervalRule::Chebyshev),
                self.weight_for(None)?,
            ),
            MeasureSpec::Uniform { m } => (
                DiscreteMeasure::interval(*m, IntervalRule::Uniform),
                self.weight_for(None)?,
            ),
            MeasureSpec::File(path) => {
                let (mu, samples) = load_measure(path)?;
                let phi = self.weight_for(Some((&mu, samples)))?;
                (mu, phi)
            }
        };
        let mu = base.add_atoms(&self.atoms)?;
        Ok((mu, phi))
    }

    fn weight_for(&self, file: Option<(&DiscreteMeasure, Vec<f64>)>) -> Result<MetricWeight> {
        match (&self.weight, file) {
            (WeightSpec::Zero, _) => Ok(MetricWeight::zero()),
            (WeightSpec::Gaussian(c), _) => Ok(MetricWeight::gaussian(*c)),
            (WeightSpec::File, Some((mu, samples))) => {
                Ok(MetricWeight::nearest(mu.nodes().to_vec(), samples))
            }
            (WeightSpec::File, None) => Err(Error::Config(
                "weight kind `file` needs a file-backed measure".to_string(),
            )),
        }
    }

    /// Canonical one-line-per-field rendering of every resolved setting;
    /// the config hash is the SHA-256 of this string, so any effective
    /// change to the experiment changes the hash.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let measure = match &self.measure {
            MeasureSpec::Circle { m, radius } => format!("circle({m},{radius})"),
            MeasureSpec::Chebyshev { m } => format!("chebyshev({m})"),
            MeasureSpec::Uniform { m } => format!("uniform({m})"),
            MeasureSpec::File(p) => format!("file({})", p.display()),
        };
        let _ = writeln!(s, "measure = {measure}");
        for (z, w) in &self.atoms {
            let _ = writeln!(s, "atom = {},{},{w}", z.re, z.im);
        }
        let weight = match &self.weight {
            WeightSpec::Zero => "zero".to_string(),
            WeightSpec::Gaussian(c) => format!("gaussian({c})"),
            WeightSpec::File => "file".to_string(),
        };
        let _ = writeln!(s, "weight = {weight}");
        let ks: Vec<String> = self.k_list.iter().map(|k| k.to_string()).collect();
        let _ = writeln!(s, "k = {}", ks.join(","));
        let _ = writeln!(s, "delta = {:?}", self.delta);
        let _ = writeln!(s, "eps = {}", self.eps);
        let _ = writeln!(s, "y0 = {},{}", self.y0.re, self.y0.im);
        let _ = writeln!(
            s,
            "probe = {},{},{}",
            self.probe_radius, self.probe_circles, self.probe_angles
        );
        let _ = writeln!(s, "f = {}", self.f.canonical());
        let _ = writeln!(s, "g = {}", self.g.canonical());
        let ps: Vec<String> = self.p_list.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(s, "p = {}", ps.join(","));
        let _ = writeln!(s, "moment = {}", self.moment);
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "k0 = {}", self.k0);
        let _ = writeln!(s, "anchor = {},{}", self.anchor.re, self.anchor.im);
        let _ = writeln!(s, "anchor_radius = {}", self.anchor_radius);
        let _ = writeln!(s, "seed = {}", self.seed);
        s
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn reject_leftovers(
    path: &str,
    section: &str,
    sec: &BTreeMap<String, (usize, String)>,
) -> Result<()> {
    if let Some((key, (line, _))) = sec.iter().next() {
        return Err(Error::Parse {
            path: path.to_string(),
            line: *line,
            message: format!("unknown key `{key}` in [{section}]"),
        });
    }
    Ok(())
}

fn take(
    sec: &mut BTreeMap<String, (usize, String)>,
    key: &str,
) -> Option<(usize, String)> {
    sec.remove(key)
}

fn bad(path: &str, line: usize, message: String) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        message,
    }
}

fn parse_measure(
    path: &str,
    sec: &mut BTreeMap<String, (usize, String)>,
    base_dir: &Path,
) -> Result<MeasureSpec> {
    let (kind_line, kind) = take(sec, "kind")
        .ok_or_else(|| bad(path, 0, "[measure] needs a `kind`".to_string()))?;
    match kind.as_str() {
        "circle" => {
            let m = parse_usize(path, sec, "m", 64)?;
            let radius = parse_f64(path, sec, "radius", 1.0)?;
            Ok(MeasureSpec::Circle { m, radius })
        }
        "chebyshev" => Ok(MeasureSpec::Chebyshev {
            m: parse_usize(path, sec, "m", 64)?,
        }),
        "uniform" => Ok(MeasureSpec::Uniform {
            m: parse_usize(path, sec, "m", 64)?,
        }),
        "file" => {
            let (line, rel) = take(sec, "path")
                .ok_or_else(|| bad(path, kind_line, "measure kind `file` needs `path`".to_string()))?;
            let file = base_dir.join(rel);
            if !file.exists() {
                return Err(bad(path, line, format!("measure file {} not found", file.display())));
            }
            Ok(MeasureSpec::File(file))
        }
        other => Err(bad(path, kind_line, format!("unknown measure kind `{other}`"))),
    }
}

fn parse_weight(
    path: &str,
    sec: &mut BTreeMap<String, (usize, String)>,
) -> Result<WeightSpec> {
    let (kind_line, kind) = take(sec, "kind")
        .ok_or_else(|| bad(path, 0, "[weight] needs a `kind`".to_string()))?;
    match kind.as_str() {
        "zero" => Ok(WeightSpec::Zero),
        "gaussian" => Ok(WeightSpec::Gaussian(parse_f64(path, sec, "c", 1.0)?)),
        "file" => Ok(WeightSpec::File),
        other => Err(bad(path, kind_line, format!("unknown weight kind `{other}`"))),
    }
}

fn parse_run(
    path: &str,
    sec: &mut BTreeMap<String, (usize, String)>,
    cfg: &mut ExperimentConfig,
    base_dir: &Path,
) -> Result<()> {
    if let Some((line, v)) = take(sec, "k") {
        cfg.k_list = parse_list(path, line, &v, |s| s.parse::<usize>().ok())?;
    }
    if let Some((line, v)) = take(sec, "delta") {
        cfg.delta = Some(
            v.parse::<f64>()
                .map_err(|e| bad(path, line, format!("bad delta: {e}")))?,
        );
    }
    if let Some((line, v)) = take(sec, "eps") {
        cfg.eps = v
            .parse::<f64>()
            .map_err(|e| bad(path, line, format!("bad eps: {e}")))?;
    }
    if let Some((line, v)) = take(sec, "y0") {
        cfg.y0 = parse_complex(&v).ok_or_else(|| bad(path, line, format!("bad complex `{v}`")))?;
    }
    if let Some((line, v)) = take(sec, "probe_radius") {
        cfg.probe_radius = v
            .parse::<f64>()
            .map_err(|e| bad(path, line, format!("bad probe_radius: {e}")))?;
    }
    if let Some((line, v)) = take(sec, "probe_circles") {
        cfg.probe_circles = v
            .parse::<usize>()
            .map_err(|e| bad(path, line, format!("bad probe_circles: {e}")))?;
    }
    if let Some((line, v)) = take(sec, "probe_angles") {
        cfg.probe_angles = v
            .parse::<usize>()
            .map_err(|e| bad(path, line, format!("bad probe_angles: {e}")))?;
    }
    if let Some((line, v)) = take(sec, "f") {
        cfg.f = parse_symbol(path, line, &v)?;
    }
    if let Some((line, v)) = take(sec, "g") {
        cfg.g = parse_symbol(path, line, &v)?;
    }
    if let Some((line, v)) = take(sec, "p") {
        cfg.p_list = parse_list(path, line, &v, |s| s.parse::<f64>().ok())?;
    }
    if let Some((line, v)) = take(sec, "moment") {
        cfg.moment = v
            .parse::<u32>()
            .map_err(|e| bad(path, line, format!("bad moment: {e}")))?;
    }
    if let Some((line, v)) = take(sec, "trials") {
        cfg.trials = v
            .parse::<usize>()
            .map_err(|e| bad(path, line, format!("bad trials: {e}")))?;
    }
    if let Some((line, v)) = take(sec, "k0") {
        cfg.k0 = v
            .parse::<usize>()
            .map_err(|e| bad(path, line, format!("bad k0: {e}")))?;
    }
    if let Some((line, v)) = take(sec, "anchor") {
        cfg.anchor =
            parse_complex(&v).ok_or_else(|| bad(path, line, format!("bad complex `{v}`")))?;
    }
    if let Some((line, v)) = take(sec, "anchor_radius") {
        cfg.anchor_radius = v
            .parse::<f64>()
            .map_err(|e| bad(path, line, format!("bad anchor_radius: {e}")))?;
    }
    if let Some((line, v)) = take(sec, "seed") {
        cfg.seed = v
            .parse::<u64>()
            .map_err(|e| bad(path, line, format!("bad seed: {e}")))?;
    }
    if let Some((_, v)) = take(sec, "out") {
        cfg.out_dir = base_dir.join(v);
    }
    Ok(())
}

fn parse_usize(
    path: &str,
    sec: &mut BTreeMap<String, (usize, String)>,
    key: &str,
    default: usize,
) -> Result<usize> {
    match take(sec, key) {
        Some((line, v)) => v
            .parse::<usize>()
            .map_err(|e| bad(path, line, format!("bad {key}: {e}"))),
        None => Ok(default),
    }
}

fn parse_f64(
    path: &str,
    sec: &mut BTreeMap<String, (usize, String)>,
    key: &str,
    default: f64,
) -> Result<f64> {
    match take(sec, key) {
        Some((line, v)) => v
            .parse::<f64>()
            .map_err(|e| bad(path, line, format!("bad {key}: {e}"))),
        None => Ok(default),
    }
}

fn parse_list<T>(
    path: &str,
    line: usize,
    value: &str,
    one: impl Fn(&str) -> Option<T>,
) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| one(s).ok_or_else(|| bad(path, line, format!("bad list entry `{s}`"))))
        .collect()
}

/// Accepts `a`, `bi`, `a+bi`, `a-bi` with f64 parts.
pub fn parse_complex(text: &str) -> Option<Complex64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(imag) = t.strip_suffix('i') {
        // Split at the last +/- that is not an exponent sign or leading.
        let bytes = imag.as_bytes();
        let mut split = None;
        for pos in (1..bytes.len()).rev() {
            let c = bytes[pos] as char;
            if (c == '+' || c == '-') && !matches!(bytes[pos - 1] as char, 'e' | 'E') {
                split = Some(pos);
                break;
            }
        }
        match split {
            Some(pos) => {
                let re: f64 = imag[..pos].parse().ok()?;
                let im_str = &imag[pos..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().ok()?
                };
                Some(Complex64::new(re, im))
            }
            None => {
                let im: f64 = match imag {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    other => other.parse().ok()?,
                };
                Some(Complex64::new(0.0, im))
            }
        }
    } else {
        t.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0))
    }
}

fn parse_atoms(path: &str, value: &str) -> Result<Vec<(Complex64, f64)>> {
    let mut atoms = Vec::new();
    for part in value.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (z, w) = part
            .split_once(':')
            .ok_or_else(|| bad(path, 0, format!("atom `{part}` must look like z:weight")))?;
        let z = parse_complex(z.trim())
            .ok_or_else(|| bad(path, 0, format!("bad atom position `{z}`")))?;
        let w: f64 = w
            .trim()
            .parse()
            .map_err(|e| bad(path, 0, format!("bad atom weight `{w}`: {e}")))?;
        atoms.push((z, w));
    }
    Ok(atoms)
}

fn parse_symbol(path: &str, line: usize, value: &str) -> Result<SymbolSpec> {
    if value == "re_z" {
        return Ok(SymbolSpec::ReZ);
    }
    if value == "abs_sqr" {
        return Ok(SymbolSpec::AbsSqr);
    }
    if value == "z" {
        return Ok(SymbolSpec::Coordinate);
    }
    if let Some(rest) = value.strip_prefix("const:") {
        let c = parse_complex(rest.trim())
            .ok_or_else(|| bad(path, line, format!("bad constant `{rest}`")))?;
        return Ok(SymbolSpec::Constant(c));
    }
    if let Some(rest) = value.strip_prefix("rational:") {
        let (num, den) = rest
            .split_once('/')
            .ok_or_else(|| bad(path, line, "rational symbol needs num/den".to_string()))?;
        let parse_poly = |s: &str| -> Result<Vec<Complex64>> {
            s.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| {
                    parse_complex(t)
                        .ok_or_else(|| bad(path, line, format!("bad coefficient `{t}`")))
                })
                .collect()
        };
        return Ok(SymbolSpec::Rational {
            numerator: parse_poly(num)?,
            denominator: parse_poly(den)?,
        });
    }
    Err(bad(path, line, format!("unknown symbol `{value}`")))
}
