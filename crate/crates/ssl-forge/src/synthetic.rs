//! Named synthetic datasets for `gen` and experiment configs.

use ssl_forge_core::data::{gen_blobs, gen_linear, gen_two_moons};
use ssl_forge_core::params::ParamReader;
use ssl_forge_core::{Labels, Matrix, ParamMap};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyntheticKind {
    /// Parameters `n` (200) and `noise` (0.1).
    TwoMoons,
    /// Parameters `n` (200), `k` (3) and `sd` (1.0).
    Blobs,
    /// Parameters `n` (200), `d` (2) and `noise` (0.0). Real-valued targets.
    Linear,
}

enum Parsed {
    Moons { n: usize, noise: f64 },
    Blobs { n: usize, k: usize, sd: f64 },
    Linear { n: usize, d: usize, noise: f64 },
}

impl SyntheticKind {
    pub const NAMES: [&'static str; 3] = ["two_moons", "blobs", "linear"];

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "two_moons" => Ok(Self::TwoMoons),
            "blobs" => Ok(Self::Blobs),
            "linear" => Ok(Self::Linear),
            _ => Err(Error::Config(format!(
                "unknown dataset kind `{name}` (expected one of {})",
                Self::NAMES.join(", ")
            ))),
        }
    }

    fn read(self, params: &ParamMap) -> Result<Parsed> {
        let bad = |name: &str, why: &str| Error::Config(format!("invalid parameter `{name}`: {why}"));
        let mut r = ParamReader::new(self.name(), params);
        let n = r.usize("n", 200)?;
        let parsed = match self {
            Self::TwoMoons => {
                let noise = r.real("noise", 0.1)?;
                if n < 2 {
                    return Err(bad("n", "need at least 2 points"));
                }
                if !(noise >= 0.0 && noise.is_finite()) {
                    return Err(bad("noise", "must be finite and >= 0"));
                }
                Parsed::Moons { n, noise }
            }
            Self::Blobs => {
                let k = r.usize("k", 3)?;
                let sd = r.real("sd", 1.0)?;
                if k == 0 || n < k {
                    return Err(bad("k", "need 1 <= k <= n"));
                }
                if !(sd >= 0.0 && sd.is_finite()) {
                    return Err(bad("sd", "must be finite and >= 0"));
                }
                Parsed::Blobs { n, k, sd }
            }
            Self::Linear => {
                let d = r.usize("d", 2)?;
                let noise = r.real("noise", 0.0)?;
                if n == 0 || d == 0 {
                    return Err(bad("n", "need n >= 1 and d >= 1"));
                }
                if !(noise >= 0.0 && noise.is_finite()) {
                    return Err(bad("noise", "must be finite and >= 0"));
                }
                Parsed::Linear { n, d, noise }
            }
        };
        r.finish()?;
        Ok(parsed)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::TwoMoons => "two_moons",
            Self::Blobs => "blobs",
            Self::Linear => "linear",
        }
    }

    pub fn check(self, params: &ParamMap) -> Result<()> {
        self.read(params).map(|_| ())
    }

    pub fn generate(self, params: &ParamMap, seed: u64) -> Result<(Matrix, Labels)> {
        Ok(match self.read(params)? {
            Parsed::Moons { n, noise } => gen_two_moons(n, noise, seed),
            Parsed::Blobs { n, k, sd } => gen_blobs(n, k, sd, seed),
            Parsed::Linear { n, d, noise } => {
                let l = gen_linear(n, d, noise, seed);
                (l.x, l.y)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let (x, y) = SyntheticKind::TwoMoons.generate(&ParamMap::new().with("n", 10), 1).unwrap();
        assert_eq!((x.rows(), y.len()), (10, 10));
        let (x, _) = SyntheticKind::Linear.generate(&ParamMap::new().with("d", 3), 1).unwrap();
        assert_eq!((x.rows(), x.cols()), (200, 3));
    }

    #[test]
    fn bad_kind_and_params() {
        assert_eq!(SyntheticKind::parse("spirals").unwrap_err().exit_code(), 2);
        let e = SyntheticKind::Blobs.check(&ParamMap::new().with("radius", 1.0)).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(SyntheticKind::TwoMoons.check(&ParamMap::new().with("noise", -1.0)).is_err());
    }
}
