//! Plain `key = value` experiment configs and the runner that turns one into
//! CSV tables plus a JSON manifest.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::basic::build_basic_function;
use super::case3::{case3_series, case3_witness, Case3Spec};
use super::extremal::{extremal_integral, extremal_series, ExtremalSpec};
use super::lacunary::lacunary_l1;
use super::SeqInput;
use crate::decide::{atom_requirements, Family};
use crate::error::{Error, Result};
use crate::grammar::parse_sequence;
use crate::lr::{reverse_holder_witness_with_schedule, LrIndex};
use crate::seqcore::{assumption_n_check, ParamSequence};

/// Parsed config: keys in sorted order so that manifests are deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    /// `#` starts a comment; blank lines are skipped; keys may not repeat.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", no + 1)));
            }
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key '{k}'", no + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Lacunary,
    ExtremalSeries,
    ExtremalIntegral,
    Case3,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Lacunary => "lacunary",
            Experiment::ExtremalSeries => "extremal_series",
            Experiment::ExtremalIntegral => "extremal_integral",
            Experiment::Case3 => "case3",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Experiment::Lacunary => &["b", "K", "grid", "min_growth", "growth_from", "max_spread"],
            Experiment::ExtremalSeries => &["sigma", "N", "n", "p", "q", "rho", "K_min", "K_max", "theta", "expect"],
            Experiment::ExtremalIntegral => &["sigma", "N", "p", "q", "rho", "K", "points", "L", "lambda0"],
            Experiment::Case3 => &["sigma", "N", "n", "p", "q", "gamma", "K"],
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lacunary" | "lacunary_l1" => Ok(Experiment::Lacunary),
            "extremal_series" | "extremal" => Ok(Experiment::ExtremalSeries),
            "extremal_integral" => Ok(Experiment::ExtremalIntegral),
            "case3" | "case3_series" => Ok(Experiment::Case3),
            other => Err(Error::Config(format!(
                "unknown experiment '{other}' (expected lacunary, extremal_series, extremal_integral or case3)"
            ))),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: Experiment,
    /// Every parameter as resolved, defaults included.
    pub parameters: BTreeMap<String, String>,
    pub thresholds: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Resolves parameters against defaults and records what was used.
struct Params<'a> {
    cfg: &'a Config,
    used: BTreeMap<String, String>,
}

impl<'a> Params<'a> {
    fn new(cfg: &'a Config, kind: Experiment) -> Result<Self> {
        let allowed: BTreeSet<&str> = kind.keys().iter().copied().chain(["experiment", "name"]).collect();
        if let Some(bad) = cfg.keys().find(|k| !allowed.contains(k)) {
            return Err(Error::Config(format!(
                "unknown key '{bad}' for {kind}; allowed: {}",
                kind.keys().join(", ")
            )));
        }
        if let Some(e) = cfg.get("experiment") {
            let named: Experiment = e.parse()?;
            if named != kind {
                return Err(Error::Config(format!("config is for {named}, not {kind}")));
            }
        }
        Ok(Self {
            cfg,
            used: BTreeMap::new(),
        })
    }

    fn raw(&mut self, key: &str, default: Option<&str>) -> Result<String> {
        let v = match (self.cfg.get(key), default) {
            (Some(v), _) => v.to_string(),
            (None, Some(d)) => d.to_string(),
            (None, None) => return Err(Error::Config(format!("missing required key '{key}'"))),
        };
        self.used.insert(key.to_string(), v.clone());
        Ok(v)
    }

    fn opt_raw(&mut self, key: &str) -> Option<String> {
        let v = self.cfg.get(key)?.to_string();
        self.used.insert(key.to_string(), v.clone());
        Some(v)
    }

    fn seq(&mut self, key: &str, default: Option<&str>) -> Result<ParamSequence> {
        parse_sequence(&self.raw(key, default)?).map_err(|e| Error::Config(format!("{key}: {e}")))
    }

    fn index(&mut self, key: &str, default: Option<&str>) -> Result<LrIndex> {
        LrIndex::parse(&self.raw(key, default)?).map_err(|e| Error::Config(format!("{key}: {e}")))
    }

    fn num<T: FromStr>(&mut self, key: &str, default: Option<&str>) -> Result<T> {
        let v = self.raw(key, default)?;
        v.parse()
            .map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
    }

    fn opt_num<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.opt_raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'"))),
        }
    }
}

fn check(checks: &mut Vec<Check>, name: &str, passed: bool, detail: String) {
    checks.push(Check {
        name: name.to_string(),
        passed,
        detail,
    });
}

/// Runs one experiment, writing `<name>.csv` and `<name>.manifest.json` into
/// `out_dir` (created if missing). `name` defaults to the experiment name.
pub fn run_experiment(kind: Experiment, cfg: &Config, out_dir: &Path) -> Result<Manifest> {
    let mut params = Params::new(cfg, kind)?;
    let mut thresholds = BTreeMap::new();
    let mut checks = Vec::new();
    let csv = match kind {
        Experiment::Lacunary => run_lacunary(&mut params, &mut thresholds, &mut checks)?,
        Experiment::ExtremalSeries => run_extremal_series(&mut params, &mut thresholds, &mut checks)?,
        Experiment::ExtremalIntegral => run_extremal_integral(&mut params, &mut checks)?,
        Experiment::Case3 => run_case3(&mut params, &mut checks)?,
    };
    let name = cfg.get("name").unwrap_or(kind.name()).to_string();
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(Error::Config(format!("name '{name}' must be a plain file stem")));
    }
    fs::create_dir_all(out_dir)?;
    let csv_name = format!("{name}.csv");
    fs::write(out_dir.join(&csv_name), csv)?;
    let manifest = Manifest {
        experiment: kind,
        parameters: params.used,
        thresholds,
        passed: checks.iter().all(|c| c.passed),
        checks,
        outputs: vec![csv_name],
    };
    fs::write(
        manifest_path(out_dir, &name),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(manifest)
}

pub fn manifest_path(out_dir: &Path, name: &str) -> PathBuf {
    out_dir.join(format!("{name}.manifest.json"))
}

fn run_lacunary(p: &mut Params, thresholds: &mut BTreeMap<String, f64>, checks: &mut Vec<Check>) -> Result<String> {
    let b = p.seq("b", Some("(1+j)^-1"))?;
    let k: usize = p.num("K", Some("12"))?;
    let grid: usize = p.num("grid", Some("65536"))?;
    let rep = lacunary_l1(|j| b.eval(j as u64), k, grid)?;
    check(
        checks,
        "triangle_bound",
        rep.triangle_ok(),
        "0 <= ||w_K||_1 <= 2 pi sum |b_j|".into(),
    );
    check(checks, "l2_nondecreasing", rep.l2_nondecreasing(), String::new());
    if let Some(min_growth) = p.opt_num::<f64>("min_growth")? {
        let from: usize = p.num("growth_from", Some(&(k.saturating_sub(4)).max(1).to_string()))?;
        thresholds.insert("min_growth".into(), min_growth);
        let ratio = match (rep.l1(k), rep.l1(from)) {
            (Some(a), Some(b)) if b > 0.0 => a / b,
            _ => f64::NAN,
        };
        check(checks, "strictly_increasing", rep.strictly_increasing(), String::new());
        check(
            checks,
            "growth",
            ratio > min_growth,
            format!("trace({k})/trace({from}) = {ratio:.6} vs {min_growth}"),
        );
    }
    if let Some(max_spread) = p.opt_num::<f64>("max_spread")? {
        thresholds.insert("max_spread".into(), max_spread);
        let s = rep.spread();
        check(
            checks,
            "bounded",
            s <= max_spread,
            format!("max/min = {s:.6} vs {max_spread}"),
        );
    }
    let mut out = String::from("K,l1,l2_partial\n");
    for r in &rep.rows {
        out += &format!("{},{},{}\n", r.k, r.l1, r.l2_partial);
    }
    Ok(out)
}

fn rho_input(p: &mut Params, key: &str) -> Result<Option<SeqInput>> {
    let v = p.raw(key, Some("auto"))?;
    if v == "auto" {
        Ok(None)
    } else {
        Ok(Some(SeqInput::Param(
            parse_sequence(&v).map_err(|e| Error::Config(format!("{key}: {e}")))?,
        )))
    }
}

fn run_extremal_series(
    p: &mut Params,
    thresholds: &mut BTreeMap<String, f64>,
    checks: &mut Vec<Check>,
) -> Result<String> {
    let spec = ExtremalSpec {
        sigma: p.seq("sigma", None)?,
        big_n: p.seq("N", Some("2^(1*j)"))?,
        n: p.num("n", Some("1"))?,
        p: p.index("p", None)?,
        q: p.index("q", None)?,
    };
    let rho = rho_input(p, "rho")?;
    let k_min: usize = p.num("K_min", Some("16"))?;
    let k_max: usize = p.num("K_max", Some("8192"))?;
    if k_min == 0 || k_min > k_max || k_max > 1 << 22 {
        return Err(Error::Config(format!(
            "need 1 <= K_min <= K_max <= 2^22, got {k_min}, {k_max}"
        )));
    }
    let schedule: Vec<usize> = std::iter::successors(Some(k_min), |k| Some(k * 2))
        .take_while(|k| *k <= k_max)
        .collect();
    let rep = extremal_series(&spec, rho.as_ref(), &schedule)?;
    check(checks, "monotone", rep.monotone(), "S_K nondecreasing".into());
    if let Some(theta) = p.opt_num::<f64>("theta")? {
        thresholds.insert("theta".into(), theta);
        let r = rep.min_ratio();
        check(
            checks,
            "doubling",
            r >= theta,
            format!("min S_2K/S_K = {r:.6} vs {theta}"),
        );
    }
    if let Some(expect) = p.opt_raw("expect") {
        match expect.as_str() {
            "cauchy" => check(
                checks,
                "cauchy",
                rep.increments_decreasing(),
                "|S_2K - S_K| strictly decreasing".into(),
            ),
            "diverge" => check(
                checks,
                "condition_fails",
                !rep.condition_member,
                format!("{} in l_{}: {}", rep.condition, rep.index, rep.condition_member),
            ),
            other => return Err(Error::Config(format!("expect: '{other}' is not cauchy or diverge"))),
        }
    }
    let mut out = String::from("K,S_K,S_2K,ratio,increment\n");
    for r in &rep.rows {
        out += &format!(
            "{},{},{},{},{}\n",
            r.k,
            r.log2_s_k.exp2(),
            r.log2_s_2k.exp2(),
            r.ratio,
            r.log2_increment.exp2()
        );
    }
    Ok(out)
}

fn run_extremal_integral(p: &mut Params, checks: &mut Vec<Check>) -> Result<String> {
    let sigma = p.seq("sigma", None)?;
    let big_n = p.seq("N", Some("2^(1*j)"))?;
    let pp = p.index("p", None)?;
    let k: usize = p.num("K", Some("12"))?;
    let points: usize = p.num("points", Some("64"))?;
    let rho = match rho_input(p, "rho")? {
        Some(r) => r,
        None => {
            let q = p.index("q", None)?;
            let spec = ExtremalSpec {
                sigma: sigma.clone(),
                big_n: big_n.clone(),
                n: 1,
                p: pp.clone(),
                q: q.clone(),
            };
            let w = reverse_holder_witness_with_schedule(&spec.condition(), &q, &[k])?;
            SeqInput::Sampled(w.b)
        }
    };
    let lam_default = assumption_n_check(&big_n).lambda0.to_string();
    let lambda0: f64 = p.num("lambda0", Some(&lam_default))?;
    let atoms = atom_requirements(&sigma, &big_n, 1, &pp, &pp, Family::B)?;
    let l: u32 = p.num("L", Some(&atoms.l_min.max(0).to_string()))?;
    let phi = build_basic_function(l, lambda0)?;
    let rep = extremal_integral(&phi, &sigma, &big_n, &pp, &rho, k, points)?;
    check(checks, "passages_disjoint", rep.passages_disjoint, String::new());
    check(
        checks,
        "support",
        rep.rows.iter().all(|r| r.support_ok),
        "Phi(N_j x) = 0 on P_m for j > m".into(),
    );
    check(
        checks,
        "passage_lower_bounds",
        rep.rows.iter().all(|r| r.integral >= r.lower_bound * (1.0 - 1e-12)),
        "I_m >= C2 (sum_{j<=m} w_j) |P_m|".into(),
    );
    check(
        checks,
        "total_lower_bound",
        rep.total >= rep.c * rep.s_k * (1.0 - 1e-12),
        format!("total = {:e}, c S_K = {:e}", rep.total, rep.c * rep.s_k),
    );
    let mut out = String::from("m,lo,hi,I_m,lower_bound,support_ok\n");
    for r in &rep.rows {
        out += &format!(
            "{},{},{},{},{},{}\n",
            r.m, r.lo, r.hi, r.integral, r.lower_bound, r.support_ok
        );
    }
    Ok(out)
}

fn run_case3(p: &mut Params, checks: &mut Vec<Check>) -> Result<String> {
    let spec = Case3Spec {
        sigma: p.seq("sigma", None)?,
        big_n: p.seq("N", Some("2^(1*j)"))?,
        n: p.num("n", Some("1"))?,
        p: p.index("p", None)?,
        q: p.index("q", None)?,
    };
    let k: usize = p.num("K", Some("10000"))?;
    let gamma = match rho_input(p, "gamma")? {
        Some(g) => g,
        None => SeqInput::Sampled(case3_witness(&spec, k)?),
    };
    let rep = case3_series(&spec, &gamma, k)?;
    check(
        checks,
        "norm_proxy_bound",
        rep.norm_proxy <= rep.norm_bound * (1.0 + 1e-9),
        format!("{:e} <= {:e}", rep.norm_proxy, rep.norm_bound),
    );
    let (lo, hi) = rep.count_ratio_range();
    check(
        checks,
        "cube_counts",
        lo >= 0.25 && hi <= 1.0,
        format!("exact/asymptotic in [{lo:.6}, {hi:.6}]"),
    );
    if !rep.condition_member {
        check(
            checks,
            "integral_growth",
            rep.integral_increasing,
            format!(
                "sigma^-1 not in l_{}; partial sums {:?}",
                rep.condition_index, rep.integral_partial
            ),
        );
    }
    let mut out = String::from("j,gamma_tilde,kappa,log2_M_exact,log2_M_asymptotic\n");
    for r in &rep.rows {
        out += &format!(
            "{},{},{},{},{}\n",
            r.j, r.gamma_tilde, r.kappa, r.log2_m_exact, r.log2_m_asymptotic
        );
    }
    Ok(out)
}
