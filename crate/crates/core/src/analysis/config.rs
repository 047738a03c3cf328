//! Flat key-value sweep configuration.
//!
//! The file format is one `key = value` pair per line with `#` comments.
//! Unknown keys are rejected. The resolved config is serialized next to
//! every output so a run can be reproduced bit-exactly.

use crate::analysis::{Fig3Config, Fig4Config, Fig5Config};
use crate::error::{Error, Result};
use crate::models::{HamiltonianSpec, InitialStateSpec};
use crate::numerics::NumericsConfig;

/// Everything a batch command needs; each subcommand reads its subset.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// `single_qubit_z` or `ising`.
    pub hamiltonian: String,
    pub sites: u32,
    pub sites_list: Vec<u32>,
    pub periodic: bool,
    /// `plus_all`, `basis_zero`, or `overlap_mix`.
    pub init: String,
    /// Ground-state overlap for `overlap_mix`.
    pub p: f64,
    /// `tree`, `hedge`, or `single_layer`.
    pub family: String,
    /// Gate family for compiled runs: `U` or `V`.
    pub gates: String,
    /// Gate selector for `gate-scaling`: `U`, `V`, `W`, or `all`.
    pub gate: String,
    pub n: u32,
    pub n_min: u32,
    pub n_max: u32,
    pub n_list: Vec<u32>,
    /// Fixed step size; when absent, commands that can optimize do so.
    pub eps: Option<f64>,
    pub eps_lo: f64,
    pub eps_hi: f64,
    pub eps_tol: f64,
    pub grid_points: usize,
    pub beta_list: Vec<f64>,
    pub post_select: bool,
    pub sign: i8,
    pub p_grid: Vec<f64>,
    pub n_layers: u32,
    pub threshold: f64,
    pub n_cap: u32,
    pub eps_coeffs: Vec<f64>,
    pub vc_n_max: u32,
    pub fit_tail: f64,
    pub panels: String,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let f3 = Fig3Config::default();
        let f4 = Fig4Config::default();
        let f5 = Fig5Config::default();
        SweepConfig {
            hamiltonian: "single_qubit_z".into(),
            sites: 3,
            sites_list: f3.sites_list.clone(),
            periodic: true,
            init: "plus_all".into(),
            p: 0.5,
            family: "hedge".into(),
            gates: "U".into(),
            gate: "all".into(),
            n: 4,
            n_min: f4.n_min,
            n_max: f4.n_max,
            n_list: vec![10, 20, 40],
            eps: None,
            eps_lo: f4.eps_lo,
            eps_hi: f4.eps_hi,
            eps_tol: f4.eps_tol,
            grid_points: f4.grid_points,
            beta_list: vec![0.2, 0.5],
            post_select: false,
            sign: 1,
            p_grid: f3.p_grid.clone(),
            n_layers: f3.n_layers_a,
            threshold: f3.threshold_c,
            n_cap: f3.n_cap_c,
            eps_coeffs: f5.eps_coeffs.clone(),
            vc_n_max: f5.n_max,
            fit_tail: f5.fit_tail_fraction,
            panels: "abcd".into(),
        }
    }
}

fn parse_bool(v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::Config(format!("expected bool, got '{other}'"))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("bad value '{v}' for key '{key}'")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

impl SweepConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "hamiltonian" => self.hamiltonian = value.to_string(),
            "sites" => self.sites = parse_num(key, value)?,
            "sites_list" => self.sites_list = parse_list(key, value)?,
            "periodic" => self.periodic = parse_bool(value)?,
            "init" => self.init = value.to_string(),
            "p" => self.p = parse_num(key, value)?,
            "family" => self.family = value.to_string(),
            "gates" => self.gates = value.to_string(),
            "gate" => self.gate = value.to_string(),
            "n" => self.n = parse_num(key, value)?,
            "n_min" => self.n_min = parse_num(key, value)?,
            "n_max" => self.n_max = parse_num(key, value)?,
            "n_list" => self.n_list = parse_list(key, value)?,
            "eps" => self.eps = Some(parse_num(key, value)?),
            "eps_lo" => self.eps_lo = parse_num(key, value)?,
            "eps_hi" => self.eps_hi = parse_num(key, value)?,
            "eps_tol" => self.eps_tol = parse_num(key, value)?,
            "grid_points" => self.grid_points = parse_num(key, value)?,
            "beta_list" => self.beta_list = parse_list(key, value)?,
            "post_select" => self.post_select = parse_bool(value)?,
            "sign" => {
                self.sign = match value {
                    "+1" | "1" => 1,
                    "-1" => -1,
                    other => return Err(Error::Config(format!("bad sign '{other}'"))),
                }
            }
            "p_grid" => self.p_grid = parse_list(key, value)?,
            "n_layers" => self.n_layers = parse_num(key, value)?,
            "threshold" => self.threshold = parse_num(key, value)?,
            "n_cap" => self.n_cap = parse_num(key, value)?,
            "eps_coeffs" => self.eps_coeffs = parse_list(key, value)?,
            "vc_n_max" => self.vc_n_max = parse_num(key, value)?,
            "fit_tail" => self.fit_tail = parse_num(key, value)?,
            "panels" => self.panels = value.to_string(),
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Parses a config file body.
    pub fn parse(text: &str) -> Result<SweepConfig> {
        let mut cfg = SweepConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Canonical serialization; `parse(serialize(c)) == c`.
    pub fn serialize(&self) -> String {
        let join_u32 = |v: &[u32]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let join_f64 = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = String::new();
        out.push_str(&format!("hamiltonian = {}\n", self.hamiltonian));
        out.push_str(&format!("sites = {}\n", self.sites));
        out.push_str(&format!("sites_list = {}\n", join_u32(&self.sites_list)));
        out.push_str(&format!("periodic = {}\n", self.periodic));
        out.push_str(&format!("init = {}\n", self.init));
        out.push_str(&format!("p = {}\n", self.p));
        out.push_str(&format!("family = {}\n", self.family));
        out.push_str(&format!("gates = {}\n", self.gates));
        out.push_str(&format!("gate = {}\n", self.gate));
        out.push_str(&format!("n = {}\n", self.n));
        out.push_str(&format!("n_min = {}\n", self.n_min));
        out.push_str(&format!("n_max = {}\n", self.n_max));
        out.push_str(&format!("n_list = {}\n", join_u32(&self.n_list)));
        if let Some(e) = self.eps {
            out.push_str(&format!("eps = {e}\n"));
        }
        out.push_str(&format!("eps_lo = {}\n", self.eps_lo));
        out.push_str(&format!("eps_hi = {}\n", self.eps_hi));
        out.push_str(&format!("eps_tol = {}\n", self.eps_tol));
        out.push_str(&format!("grid_points = {}\n", self.grid_points));
        out.push_str(&format!("beta_list = {}\n", join_f64(&self.beta_list)));
        out.push_str(&format!("post_select = {}\n", self.post_select));
        out.push_str(&format!("sign = {:+}\n", self.sign));
        out.push_str(&format!("p_grid = {}\n", join_f64(&self.p_grid)));
        out.push_str(&format!("n_layers = {}\n", self.n_layers));
        out.push_str(&format!("threshold = {}\n", self.threshold));
        out.push_str(&format!("n_cap = {}\n", self.n_cap));
        out.push_str(&format!("eps_coeffs = {}\n", join_f64(&self.eps_coeffs)));
        out.push_str(&format!("vc_n_max = {}\n", self.vc_n_max));
        out.push_str(&format!("fit_tail = {}\n", self.fit_tail));
        out.push_str(&format!("panels = {}\n", self.panels));
        out
    }

    pub fn hamiltonian_spec(&self, cfg: &NumericsConfig) -> Result<HamiltonianSpec> {
        match self.hamiltonian.as_str() {
            "single_qubit_z" => Ok(HamiltonianSpec::single_qubit_z()),
            "ising" => HamiltonianSpec::mixed_field_ising(self.sites, self.periodic, cfg),
            other => Err(Error::Config(format!("unknown hamiltonian '{other}'"))),
        }
    }

    pub fn initial_state_spec(&self) -> Result<InitialStateSpec> {
        match self.init.as_str() {
            "plus_all" => Ok(InitialStateSpec::PlusAll),
            "basis_zero" => Ok(InitialStateSpec::BasisZero),
            "overlap_mix" => Ok(InitialStateSpec::OverlapMix { p: self.p }),
            other => Err(Error::Config(format!("unknown init '{other}'"))),
        }
    }

    pub fn fig3(&self) -> Fig3Config {
        Fig3Config {
            sites_list: self.sites_list.clone(),
            periodic: self.periodic,
            p_grid: self.p_grid.clone(),
            n_layers_a: self.n_layers,
            n_max_b: self.n_max,
            threshold_c: self.threshold,
            n_cap_c: self.n_cap,
            eps_lo: self.eps_lo,
            eps_hi: self.eps_hi,
            eps_tol: self.eps_tol,
            grid_points: self.grid_points,
            panels: self.panels.chars().collect(),
        }
    }

    pub fn fig4(&self) -> Fig4Config {
        Fig4Config {
            n_min: self.n_min,
            n_max: self.n_max,
            eps_fixed: self.eps.unwrap_or(0.15),
            beta_list: self.beta_list.clone(),
            eps_lo: self.eps_lo,
            eps_hi: self.eps_hi,
            eps_tol: self.eps_tol,
            grid_points: self.grid_points,
            panels: self.panels.chars().collect(),
        }
    }

    pub fn fig5(&self) -> Fig5Config {
        Fig5Config {
            sites_list: self.sites_list.clone(),
            periodic: self.periodic,
            eps_coeffs: self.eps_coeffs.clone(),
            n_max: self.vc_n_max,
            fit_tail_fraction: self.fit_tail,
        }
    }
}
