//! Builtin desk-scale models.
//!
//! | name           | d | M | parameters (defaults)                 |
//! |----------------|---|---|---------------------------------------|
//! | `amp_damp`     | 2 | 2 | `gamma` (1.0)                         |
//! | `qubit3`       | 2 | 3 | `gamma_minus` (1.0), `gamma_z` (0.5)  |
//! | `two_qubit_xy` | 4 | 3 | `j` (1.0), `gamma` (0.5)              |
//! | `random`       | d | M | `d` (2), `m` (3), `seed` (0)          |
//!
//! `amp_damp` and `qubit3` have mutually commuting terms, so every product
//! formula is exact on them up to rounding; only QDRIFT shows an error.

use anyhow::{bail, Context, Result};
use lindblad_rand_core::linalg::{dagger, kron};
use lindblad_rand_core::{c, CMatrix, Generator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use toml::Table;

pub const BUILTIN_NAMES: [&str; 4] = ["amp_damp", "qubit3", "two_qubit_xy", "random"];

struct Params<'a> {
    model: &'a str,
    table: &'a Table,
}

impl Params<'_> {
    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for key in self.table.keys() {
            if !allowed.contains(&key.as_str()) {
                bail!("model {} has no parameter {key:?} (known: {})", self.model, allowed.join(", "));
            }
        }
        Ok(())
    }

    fn float(&self, key: &str, default: f64) -> Result<f64> {
        match self.table.get(key) {
            None => Ok(default),
            Some(toml::Value::Float(x)) => Ok(*x),
            Some(toml::Value::Integer(i)) => Ok(*i as f64),
            Some(other) => bail!("parameter {key} of {} must be a number, got {other}", self.model),
        }
    }

    fn rate(&self, key: &str, default: f64) -> Result<f64> {
        let r = self.float(key, default)?;
        if !r.is_finite() || r < 0.0 {
            bail!("parameter {key} of {} must be a nonnegative rate, got {r}", self.model);
        }
        Ok(r)
    }

    fn uint(&self, key: &str, default: u64) -> Result<u64> {
        match self.table.get(key) {
            None => Ok(default),
            Some(toml::Value::Integer(i)) if *i >= 0 => Ok(*i as u64),
            Some(other) => bail!("parameter {key} of {} must be a nonnegative integer, got {other}", self.model),
        }
    }
}

fn pauli(which: char) -> CMatrix {
    let e = match which {
        'x' => [(0., 0.), (1., 0.), (1., 0.), (0., 0.)],
        'y' => [(0., 0.), (0., -1.), (0., 1.), (0., 0.)],
        'z' => [(1., 0.), (0., 0.), (0., 0.), (-1., 0.)],
        // |0><1|
        '-' => [(0., 0.), (1., 0.), (0., 0.), (0., 0.)],
        _ => unreachable!(),
    };
    CMatrix::from_row_slice(2, 2, &e.map(|(a, b)| c(a, b)))
}

pub fn amp_damp(gamma: f64) -> Result<Generator> {
    Ok(Generator::from_parts(pauli('z') * c(0.5, 0.), vec![(pauli('-'), gamma)])?)
}

pub fn qubit3(gamma_minus: f64, gamma_z: f64) -> Result<Generator> {
    Ok(Generator::from_parts(pauli('z') * c(0.5, 0.), vec![(pauli('-'), gamma_minus), (pauli('z'), gamma_z)])?)
}

pub fn two_qubit_xy(j: f64, gamma: f64) -> Result<Generator> {
    let id = CMatrix::identity(2, 2);
    let h = (kron(&pauli('x'), &pauli('x')) + kron(&pauli('y'), &pauli('y'))) * c(0.5 * j, 0.);
    let terms = vec![(kron(&pauli('-'), &id), gamma), (kron(&id, &pauli('-')), gamma)];
    Ok(Generator::from_parts(h, terms)?)
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    })
}

fn unit_frobenius(m: CMatrix) -> CMatrix {
    let n = m.norm();
    m / c(n, 0.)
}

/// Random Hermitian `H` and `m - 1` jump operators, all with unit Frobenius
/// norm; rates uniform in `[0.5, 1.5)`.
pub fn random(d: usize, m: usize, seed: u64) -> Result<Generator> {
    if d == 0 || m == 0 {
        bail!("random model needs d >= 1 and m >= 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = gaussian_matrix(&mut rng, d);
    let h = unit_frobenius((&a + dagger(&a)) * c(0.5, 0.));
    let mut terms = Vec::with_capacity(m - 1);
    for _ in 1..m {
        let l = unit_frobenius(gaussian_matrix(&mut rng, d));
        let rate = rng.random_range(0.5..1.5);
        terms.push((l, rate));
    }
    Ok(Generator::from_parts(h, terms)?)
}

pub fn builtin_model(name: &str, params: &Table) -> Result<Generator> {
    let p = Params { model: name, table: params };
    match name {
        "amp_damp" => {
            p.check_keys(&["gamma"])?;
            amp_damp(p.rate("gamma", 1.0)?)
        }
        "qubit3" => {
            p.check_keys(&["gamma_minus", "gamma_z"])?;
            qubit3(p.rate("gamma_minus", 1.0)?, p.rate("gamma_z", 0.5)?)
        }
        "two_qubit_xy" => {
            p.check_keys(&["j", "gamma"])?;
            two_qubit_xy(p.float("j", 1.0)?, p.rate("gamma", 0.5)?)
        }
        "random" => {
            p.check_keys(&["d", "m", "seed"])?;
            let d = p.uint("d", 2)? as usize;
            let m = p.uint("m", 3)? as usize;
            if d > 8 {
                bail!("random model dimension {d} is beyond desk scale (d <= 8)");
            }
            random(d, m, p.uint("seed", 0)?).context("building random model")
        }
        _ => bail!("unknown model {name:?} (builtin models: {})", BUILTIN_NAMES.join(", ")),
    }
}
