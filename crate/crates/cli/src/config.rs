//! Flag and config-file resolution into a validated [`JobConfig`].

use std::path::{Path, PathBuf};

use aswlab::dwork::DworkParams;
use aswlab::rat::{fmt_q, parse_q};
use aswlab::{FPoly, RectDelta, Q};
use clap::{Args, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Hodge tables: W, H, I_D, k_n and the HP_L / HP_C slopes.
    Hodge,
    /// Closed-form generic Newton polygons for the class of `p`.
    Gnp,
    /// Slope-cluster degrees of the characteristic series.
    Eigencurve,
    /// Slopes of the zeta function of the `m`-th tower level.
    Zeta,
    /// Genericity verdict for the polynomial given by `--f`.
    Genericity,
    /// End-to-end check of `--f`: Dwork, oracle, formulas.
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Hodge => "hodge",
            Command::Gnp => "gnp",
            Command::Eigencurve => "eigencurve",
            Command::Zeta => "zeta",
            Command::Genericity => "genericity",
            Command::Verify => "verify",
        }
    }
}

/// Options shared by every subcommand.
#[derive(Args, Clone, Debug, Default)]
pub struct Flags {
    /// Rectangle width
    #[arg(long, global = true)]
    pub d1: Option<u32>,
    /// Rectangle height
    #[arg(long, global = true)]
    pub d2: Option<u32>,
    /// Prime, coprime to d1·d2
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Field degree: q = p^a
    #[arg(long, global = true)]
    pub a: Option<u32>,
    /// Character level (conductor `p^m`).
    #[arg(long, global = true)]
    pub m: Option<u32>,
    /// Polynomial file: `{"p":5,"a":1,"d1":3,"d2":3,"coeffs":{"1,0":2}}`.
    #[arg(long, global = true)]
    pub f: Option<PathBuf>,
    /// p-adic precision N.
    #[arg(long, global = true)]
    pub np: Option<u32>,
    /// T-adic precision.
    #[arg(long, global = true)]
    pub nt: Option<usize>,
    /// Basis weight bound, also the slope bound of Hodge/GNP_C tables.
    #[arg(long, global = true)]
    pub wmax: Option<String>,
    /// Number of characteristic coefficients.
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    /// Cap on enumerated points / permutations.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Slope buckets in the eigencurve report.
    #[arg(long, global = true)]
    pub imax: Option<u64>,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print JSON instead of the tab-separated view.
    #[arg(long, global = true)]
    pub json: bool,
    /// TOML file whose keys override the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    d1: Option<u32>,
    d2: Option<u32>,
    p: Option<u64>,
    a: Option<u32>,
    m: Option<u32>,
    f: Option<PathBuf>,
    np: Option<u32>,
    nt: Option<usize>,
    wmax: Option<String>,
    kmax: Option<usize>,
    budget: Option<u64>,
    imax: Option<u64>,
    out: Option<PathBuf>,
    json: Option<bool>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// A fully resolved job.
#[derive(Clone, Debug)]
pub struct JobConfig {
    pub command: Command,
    pub delta: RectDelta,
    pub p: Option<u64>,
    pub a: u32,
    pub m: u32,
    pub f: Option<FPoly>,
    pub params: Option<DworkParams>,
    pub wmax: Option<Q>,
    pub budget: Option<u64>,
    pub imax: u64,
    pub out: Option<PathBuf>,
    pub json: bool,
}

fn merge(mut flags: Flags, file: FileConfig, base: Option<&Path>) -> Flags {
    let rel = |p: PathBuf| match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p,
    };
    macro_rules! over {
        ($($k:ident),*) => { $( if file.$k.is_some() { flags.$k = file.$k; } )* };
    }
    over!(d1, d2, p, a, m, np, nt, wmax, kmax, budget, imax);
    if let Some(f) = file.f {
        flags.f = Some(rel(f));
    }
    if let Some(o) = file.out {
        flags.out = Some(rel(o));
    }
    if let Some(j) = file.json {
        flags.json = j;
    }
    flags
}

impl JobConfig {
    pub fn resolve(command: Command, flags: Flags) -> Result<JobConfig, ConfigError> {
        let flags = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).or_else(|e| err(format!("{}: {e}", path.display())))?;
                let file: FileConfig = toml::from_str(&text).or_else(|e| err(format!("{}: {e}", path.display())))?;
                let base = path.parent().map(Path::to_path_buf);
                merge(flags.clone(), file, base.as_deref())
            }
            None => flags,
        };
        let f = match &flags.f {
            Some(path) => {
                let text = std::fs::read_to_string(path).or_else(|e| err(format!("{}: {e}", path.display())))?;
                Some(FPoly::from_json_str(&text).or_else(|e| err(format!("{}: {e}", path.display())))?)
            }
            None => None,
        };
        let pick = |name: &str, flag: Option<u64>, from_f: Option<u64>| -> Result<Option<u64>, ConfigError> {
            match (flag, from_f) {
                (Some(x), Some(y)) if x != y => err(format!("--{name}={x} conflicts with {y} from --f")),
                (x, y) => Ok(x.or(y)),
            }
        };
        let d1 = pick("d1", flags.d1.map(u64::from), f.as_ref().map(|f| f.delta().d1() as u64))?;
        let d2 = pick("d2", flags.d2.map(u64::from), f.as_ref().map(|f| f.delta().d2() as u64))?;
        let p = pick("p", flags.p, f.as_ref().map(|f| f.p()))?;
        let a = pick("a", flags.a.map(u64::from), f.as_ref().map(|f| f.a() as u64))?.unwrap_or(1) as u32;
        let (Some(d1), Some(d2)) = (d1, d2) else {
            return err("--d1 and --d2 are required (or a polynomial file)");
        };
        let delta = RectDelta::new(d1 as u32, d2 as u32).or_else(|e| err(e.to_string()))?;
        if let Some(p) = p {
            if !aswlab::padic::is_prime(p) {
                return err(format!("p={p} is not prime"));
            }
            if delta.big_d() % p == 0 {
                return err(format!("p={p} divides D={}", delta.big_d()));
            }
        }
        let m = flags.m.unwrap_or(1);
        if m == 0 {
            return err("m must be at least 1");
        }
        if a == 0 {
            return err("a must be at least 1");
        }
        let wmax = match &flags.wmax {
            Some(s) => match parse_q(s) {
                Some(q) if q > Q::from_integer(0.into()) => Some(q),
                _ => return err(format!("--wmax {s:?} is not a positive rational")),
            },
            None => None,
        };
        let needs_p = !matches!(command, Command::Hodge);
        if needs_p && p.is_none() {
            return err(format!("{} needs --p", command.name()));
        }
        let needs_f = matches!(command, Command::Genericity | Command::Verify);
        if needs_f && f.is_none() {
            return err(format!("{} needs --f", command.name()));
        }
        let params = match (needs_f, p) {
            (true, Some(p)) => {
                let mut pr = match flags.kmax {
                    Some(k) => DworkParams::for_kmax(&delta, p, a, k),
                    None => DworkParams::defaults(&delta, p, a),
                };
                if let Some(np) = flags.np {
                    if np == 0 {
                        return err("np must be at least 1");
                    }
                    pr.np = np;
                }
                if let Some(nt) = flags.nt {
                    pr.nt = nt;
                }
                if let Some(w) = &wmax {
                    pr.wmax = w.clone();
                }
                Some(pr)
            }
            _ => None,
        };
        Ok(JobConfig {
            command,
            delta,
            p,
            a,
            m,
            f,
            params,
            wmax,
            budget: flags.budget,
            imax: flags.imax.unwrap_or(5),
            out: flags.out.clone(),
            json: flags.json,
        })
    }

    /// The resolved configuration, defaults included.
    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command.name(),
            "d1": self.delta.d1(),
            "d2": self.delta.d2(),
            "p": self.p,
            "a": self.a,
            "m": self.m,
            "f": self.f.as_ref().map(FPoly::to_json),
            "wmax": self.wmax.as_ref().map(fmt_q),
            "budget": self.budget,
            "imax": self.imax,
            "dwork": self.params,
        })
    }
}
