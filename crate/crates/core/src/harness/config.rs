use std::f64::consts::PI;
use std::path::PathBuf;

use crate::mesh::MeshFamily;
use crate::physics::CaseName;
use crate::{Error, Result};

/// One refinement level: nominal mesh size and requested time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowSpec {
    pub h: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub case: CaseName,
    pub family: MeshFamily,
    pub rows: Vec<RowSpec>,
    /// `None` keeps the case's own final time.
    pub final_time: Option<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// gnuplot data of the finest solution.
    pub snapshot: Option<PathBuf>,
}

/// Coarsest mesh size of each case's refinement sequence.
fn base_h(case: CaseName) -> f64 {
    match case {
        CaseName::Ex1Linear | CaseName::Ex1Sinusoidal | CaseName::Ex3Nonlinear => 0.5,
        CaseName::Ex2Linear | CaseName::Ex2Sinusoidal => 3.0,
        CaseName::Despres => 0.1,
    }
}

/// Time step tied to `h` for each case. The reference tables are the
/// three-digit truncations of these values; Example 3 uses its CFL bound
/// `h/16` since the tabulated step exceeds it.
pub fn preset_delta(case: CaseName, h: f64) -> f64 {
    match case {
        CaseName::Ex1Linear => h / 2.0,
        CaseName::Ex1Sinusoidal => h / (4.0 * PI),
        CaseName::Ex2Linear => h / 32.0,
        CaseName::Ex2Sinusoidal => h / (64.0 * PI),
        CaseName::Ex3Nonlinear => h / 16.0,
        CaseName::Despres => h,
    }
}

/// Five halvings starting from the case's coarsest mesh.
pub fn preset_rows(case: CaseName) -> Vec<RowSpec> {
    (0..5)
        .map(|k| {
            let h = base_h(case) / f64::from(1u32 << k);
            RowSpec {
                h,
                delta: preset_delta(case, h),
            }
        })
        .collect()
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("cannot read {what} from '{s}'")))
}

/// `--rows` syntax: a count `n` (first `n` preset rows) or a comma list of
/// `h` or `h:δ` entries (missing `δ` follows the case rule).
pub fn parse_rows(case: CaseName, spec: &str) -> Result<Vec<RowSpec>> {
    let spec = spec.trim();
    if let Ok(n) = spec.parse::<usize>() {
        let preset = preset_rows(case);
        if n == 0 || n > preset.len() {
            return Err(Error::Config(format!("row count must be in 1..={}", preset.len())));
        }
        return Ok(preset[..n].to_vec());
    }
    spec.split(',')
        .map(|item| {
            let mut parts = item.split(':');
            let h = parse_f64(parts.next().unwrap_or(""), "h")?;
            let delta = match parts.next() {
                Some(d) => parse_f64(d, "time step")?,
                None => preset_delta(case, h),
            };
            if parts.next().is_some() {
                return Err(Error::Config(format!("row '{item}' has more than two fields")));
            }
            Ok(RowSpec { h, delta })
        })
        .collect()
}

impl ExperimentConfig {
    /// The case's preset rows on its default mesh family.
    pub fn preset(case: CaseName) -> Self {
        Self {
            case,
            family: case.default_family(),
            rows: preset_rows(case),
            final_time: None,
            seed: 0,
            out: None,
            snapshot: None,
        }
    }

    pub fn with_family(mut self, family: MeshFamily) -> Self {
        self.family = family;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.case.supports(self.family) {
            return Err(Error::Config(format!(
                "case {} does not run on {} meshes",
                self.case, self.family
            )));
        }
        if self.rows.is_empty() {
            return Err(Error::Config("no refinement rows".into()));
        }
        for r in &self.rows {
            if !(r.h > 0.0 && r.delta > 0.0 && r.h.is_finite() && r.delta.is_finite()) {
                return Err(Error::Config(format!("row h = {}, δ = {} is not positive", r.h, r.delta)));
            }
        }
        if self.rows.windows(2).any(|w| w[1].h >= w[0].h) {
            return Err(Error::Config("mesh sizes must strictly decrease across rows".into()));
        }
        if let Some(t) = self.final_time {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("final time {t} is invalid")));
            }
        }
        Ok(())
    }
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Parse {
                line: n + 1,
                message: format!("expected key = value, found '{line}'"),
            });
        };
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Parse {
                line: n + 1,
                message: "empty key".into(),
            });
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Applies config-file entries on top of `cfg`. A new `case` resets the
/// rows to that case's presets unless `rows` is also given.
pub fn apply_overrides(cfg: &mut ExperimentConfig, entries: &[(String, String)]) -> Result<()> {
    let get = |key: &str| entries.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    if let Some(c) = get("case") {
        let case: CaseName = c.parse()?;
        if case != cfg.case {
            cfg.case = case;
            cfg.rows = preset_rows(case);
            cfg.family = case.default_family();
        }
    }
    for (k, v) in entries {
        match k.as_str() {
            "case" | "rows" => {}
            "mesh" => cfg.family = v.parse()?,
            "seed" => {
                cfg.seed = v
                    .parse()
                    .map_err(|_| Error::Config(format!("seed '{v}' is not an unsigned integer")))?
            }
            "T" => cfg.final_time = Some(parse_f64(v, "final time")?),
            "out" => cfg.out = Some(PathBuf::from(v)),
            "snapshot" => cfg.snapshot = Some(PathBuf::from(v)),
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
    }
    if let Some(r) = get("rows") {
        cfg.rows = parse_rows(cfg.case, r)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The reference tables print three significant digits, truncated.
    fn truncated(v: f64) -> f64 {
        let e = v.log10().floor();
        let m = v / 10f64.powf(e);
        (m * 100.0 + 1e-9).floor() / 100.0 * 10f64.powf(e)
    }

    #[test]
    fn presets_reproduce_reference_steps() {
        let reference: [(CaseName, [f64; 5]); 5] = [
            (CaseName::Ex1Linear, [2.50e-1, 1.25e-1, 6.25e-2, 3.12e-2, 1.56e-2]),
            (CaseName::Ex1Sinusoidal, [3.97e-2, 1.98e-2, 9.94e-3, 4.97e-3, 2.48e-3]),
            (CaseName::Ex2Linear, [9.37e-2, 4.68e-2, 2.34e-2, 1.17e-2, 5.85e-3]),
            (CaseName::Ex2Sinusoidal, [1.49e-2, 7.46e-3, 3.73e-3, 1.86e-3, 9.32e-4]),
            (CaseName::Despres, [1.00e-1, 5.00e-2, 2.50e-2, 1.25e-2, 6.25e-3]),
        ];
        for (case, col) in reference {
            for (r, want) in preset_rows(case).iter().zip(col) {
                assert!((truncated(r.delta) - want).abs() < 1e-9 * want, "{case}: {} vs {want}", r.delta);
            }
        }
        let hs: Vec<f64> = preset_rows(CaseName::Ex2Linear).iter().map(|r| r.h).collect();
        assert_eq!(hs, vec![3.0, 1.5, 0.75, 0.375, 0.1875]);
    }

    #[test]
    fn row_specs() {
        assert_eq!(parse_rows(CaseName::Ex1Linear, "2").unwrap().len(), 2);
        let r = parse_rows(CaseName::Ex1Linear, "0.5:0.1, 0.25").unwrap();
        assert_eq!(r, vec![RowSpec { h: 0.5, delta: 0.1 }, RowSpec { h: 0.25, delta: 0.125 }]);
        assert!(parse_rows(CaseName::Ex1Linear, "0").is_err());
        assert!(parse_rows(CaseName::Ex1Linear, "a:b").is_err());
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig::preset(CaseName::Despres);
        assert_eq!(c.family, MeshFamily::Staggered);
        c.validate().unwrap();
        assert!(c.clone().with_family(MeshFamily::Cartesian).validate().is_err());
        assert!(ExperimentConfig::preset(CaseName::Ex3Nonlinear)
            .with_family(MeshFamily::Hexagonal)
            .validate()
            .is_err());
        c.rows.swap(0, 1);
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_file_overrides() {
        let text = "# comment\ncase = ex2-linear\nmesh=hexagonal  # trailing\nrows = 3\nseed = 9\nT = 0.5\n";
        let entries = parse_config_file(text).unwrap();
        let mut c = ExperimentConfig::preset(CaseName::Ex1Linear);
        apply_overrides(&mut c, &entries).unwrap();
        assert_eq!(c.case, CaseName::Ex2Linear);
        assert_eq!(c.family, MeshFamily::Hexagonal);
        assert_eq!(c.rows.len(), 3);
        assert_eq!(c.rows[0].h, 3.0);
        assert_eq!((c.seed, c.final_time), (9, Some(0.5)));
        assert!(matches!(parse_config_file("x"), Err(Error::Parse { line: 1, .. })));
        assert!(apply_overrides(&mut c, &[("colour".into(), "red".into())]).is_err());
    }
}
