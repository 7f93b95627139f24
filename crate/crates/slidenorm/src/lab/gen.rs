//! Synthetic stream generators and the stream/row file formats.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Zipf};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StreamVariant {
    /// Two copies of an ordered ramp, then uniform noise, then a burst of
    /// item 1 in the last m/1000 positions.
    AppendixC,
    Zipf { s: f64 },
    Uniform,
}

#[derive(Clone, Debug)]
pub struct SyntheticSpec {
    pub m: u64,
    pub n: u64,
    pub seed: u64,
    pub variant: StreamVariant,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stream {
    pub n: u64,
    pub seed: u64,
    pub items: Vec<u64>,
}

impl Stream {
    pub fn m(&self) -> u64 {
        self.items.len() as u64
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::parameter("m", "must be positive"));
        }
        if self.n == 0 {
            return Err(Error::parameter("n", "must be positive"));
        }
        if let StreamVariant::AppendixC = self.variant {
            if !self.m.is_power_of_two() || self.m < 8 {
                return Err(Error::parameter(
                    "m",
                    format!("{} must be a power of two (>= 8) for appendix-c", self.m),
                ));
            }
            if self.n <= self.m / 2 + 1 {
                return Err(Error::parameter(
                    "n",
                    format!("{} too small: need n > m/2 + 1 = {}", self.n, self.m / 2 + 1),
                ));
            }
        }
        if let StreamVariant::Zipf { s } = self.variant {
            if !(s > 0.0) {
                return Err(Error::parameter("zipf_s", "exponent must be positive"));
            }
        }
        Ok(())
    }
}

pub fn generate(spec: &SyntheticSpec) -> Result<Stream> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let items = match spec.variant {
        StreamVariant::AppendixC => {
            let m = spec.m;
            let mut items = Vec::with_capacity(m as usize);
            // Ordered ramp s1 = {2, ..., m/4 + 1}, twice.
            for _ in 0..2 {
                items.extend(2..=m / 4 + 1);
            }
            // Uniform block from the upper universe [m/2 + 2, n]; its length
            // absorbs the rounding so the total is exactly m.
            let tail = m / 1000;
            let noise_len = m - 2 * (m / 4) - tail;
            for _ in 0..noise_len {
                items.push(rng.random_range(m / 2 + 2..=spec.n));
            }
            // The burst: the last m/1000 updates all hit item 1.
            items.extend(std::iter::repeat(1).take(tail as usize));
            items
        }
        StreamVariant::Zipf { s } => {
            let dist = Zipf::new(spec.n as f64, s)
                .map_err(|e| Error::parameter("zipf_s", format!("{e}")))?;
            (0..spec.m)
                .map(|_| (dist.sample(&mut rng) as u64).clamp(1, spec.n))
                .collect()
        }
        StreamVariant::Uniform => (0..spec.m)
            .map(|_| rng.random_range(1..=spec.n))
            .collect(),
    };
    debug_assert_eq!(items.len() as u64, spec.m);
    Ok(Stream {
        n: spec.n,
        seed: spec.seed,
        items,
    })
}

/// Gaussian rows for the regression experiments; when `response` is set, the
/// final column is a noisy linear response from a random planted model.
pub fn gaussian_rows(n: usize, d: usize, response: bool, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let planted: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    (0..n)
        .map(|_| {
            let mut row: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            if response {
                let clean: f64 = row.iter().zip(planted.iter()).map(|(a, x)| a * x).sum();
                let noise: f64 = rng.sample::<f64, _>(StandardNormal);
                row.push(clean + 0.2 * noise);
            }
            row
        })
        .collect()
}

/// Stream file: `#n=<n> m=<m> seed=<seed>` then one item per line.
pub fn write_stream(path: &Path, stream: &Stream) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "#n={} m={} seed={}", stream.n, stream.m(), stream.seed)?;
    for &x in &stream.items {
        writeln!(w, "{x}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_stream(path: &Path) -> Result<Stream> {
    let r = BufReader::new(std::fs::File::open(path)?);
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Input(format!("{}: empty stream file", path.display())))??;
    let mut n = None;
    let mut seed = 0u64;
    for tok in header.trim_start_matches('#').split_whitespace() {
        if let Some(v) = tok.strip_prefix("n=") {
            n = Some(v.parse::<u64>().map_err(|e| Error::Input(format!("bad n: {e}")))?);
        } else if let Some(v) = tok.strip_prefix("seed=") {
            seed = v.parse().unwrap_or(0);
        }
    }
    let n = n.ok_or_else(|| Error::Input("stream header missing n=".into()))?;
    let mut items = Vec::new();
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        items.push(
            t.parse::<u64>()
                .map_err(|e| Error::Input(format!("bad stream item `{t}`: {e}")))?,
        );
    }
    Ok(Stream { n, seed, items })
}

/// Row file: `#d=<d> response=<0|1>` then one row of space-separated reals
/// per line (d columns, plus the response when flagged).
pub fn write_rows(path: &Path, rows: &[Vec<f64>], d: usize, response: bool) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "#d={} response={}", d, if response { 1 } else { 0 })?;
    for row in rows {
        let cols: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
        writeln!(w, "{}", cols.join(" "))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<(Vec<Vec<f64>>, usize, bool)> {
    let r = BufReader::new(std::fs::File::open(path)?);
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Input(format!("{}: empty row file", path.display())))??;
    let mut d = None;
    let mut response = false;
    for tok in header.trim_start_matches('#').split_whitespace() {
        if let Some(v) = tok.strip_prefix("d=") {
            d = Some(v.parse::<usize>().map_err(|e| Error::Input(format!("bad d: {e}")))?);
        } else if let Some(v) = tok.strip_prefix("response=") {
            response = v == "1";
        }
    }
    let d = d.ok_or_else(|| Error::Input("row header missing d=".into()))?;
    let want = d + usize::from(response);
    let mut rows = Vec::new();
    for (ln, line) in lines.enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = t
            .split_whitespace()
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|e| Error::Input(format!("line {}: bad value `{c}`: {e}", ln + 2)))
            })
            .collect::<Result<_>>()?;
        if row.len() != want {
            return Err(Error::Input(format!(
                "line {}: {} columns, expected {want}",
                ln + 2,
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok((rows, d, response))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn appendix_c(m: u64, n: u64, seed: u64) -> Stream {
        generate(&SyntheticSpec {
            m,
            n,
            seed,
            variant: StreamVariant::AppendixC,
        })
        .unwrap()
    }

    #[test]
    fn ramp_block_is_exact() {
        let s = appendix_c(1 << 10, 1 << 16, 7);
        // s1 = {2, ..., 257}, 256 values, twice.
        assert_eq!(&s.items[..256], &(2..=257).collect::<Vec<u64>>()[..]);
        assert_eq!(&s.items[256..512], &(2..=257).collect::<Vec<u64>>()[..]);
    }

    #[test]
    fn lengths_and_burst_count() {
        for exp in 10..=15u32 {
            let m = 1u64 << exp;
            let s = appendix_c(m, 1 << 16, 3);
            assert_eq!(s.m(), m, "total length is m");
            let burst = s.items.iter().rev().take_while(|&&x| x == 1).count() as u64;
            assert!(burst >= m / 1000, "burst {burst} < {}", m / 1000);
            let ones = s.items.iter().filter(|&&x| x == 1).count() as u64;
            assert_eq!(ones, m / 1000, "item 1 frequency is floor(m/1000)");
        }
    }

    #[test]
    fn noise_block_stays_in_upper_universe() {
        let m = 1u64 << 12;
        let s = appendix_c(m, 1 << 16, 11);
        let tail = (m / 1000) as usize;
        let noise = &s.items[(m / 2) as usize..s.items.len() - tail];
        assert!(noise.iter().all(|&x| x >= m / 2 + 2 && x <= 1 << 16));
    }

    #[test]
    fn determinism_and_seed_sensitivity() {
        let a = appendix_c(1 << 10, 1 << 16, 5);
        let b = appendix_c(1 << 10, 1 << 16, 5);
        let c = appendix_c(1 << 10, 1 << 16, 6);
        assert_eq!(a, b);
        assert_ne!(a.items, c.items);
    }

    #[test]
    fn invalid_specs_rejected() {
        let bad_m = SyntheticSpec {
            m: 1000,
            n: 1 << 16,
            seed: 1,
            variant: StreamVariant::AppendixC,
        };
        assert!(generate(&bad_m).is_err());
        let bad_n = SyntheticSpec {
            m: 1024,
            n: 513,
            seed: 1,
            variant: StreamVariant::AppendixC,
        };
        assert!(generate(&bad_n).is_err());
    }

    #[test]
    fn noise_block_uniformity_chi_squared() {
        // Bin the upper universe into 64 ranges; the noise block's bin counts
        // must pass a chi-squared uniformity test at the 1% level for nearly
        // every seed.
        let m = 1u64 << 12;
        let n = 1u64 << 16;
        let bins = 64usize;
        let mut passes = 0;
        let seeds = 30u64;
        for seed in 0..seeds {
            let s = appendix_c(m, n, seed);
            let tail = (m / 1000) as usize;
            let noise = &s.items[(m / 2) as usize..s.items.len() - tail];
            let lo = m / 2 + 2;
            let span = n - lo + 1;
            let mut counts = vec![0f64; bins];
            for &x in noise {
                let b = ((x - lo) as u128 * bins as u128 / span as u128) as usize;
                counts[b.min(bins - 1)] += 1.0;
            }
            let expect = noise.len() as f64 / bins as f64;
            let stat: f64 = counts.iter().map(|c| (c - expect) * (c - expect) / expect).sum();
            // Wilson-Hilferty upper 1% quantile for df = bins - 1.
            let k = (bins - 1) as f64;
            let z = 2.326;
            let crit = k * (1.0 - 2.0 / (9.0 * k) + z * (2.0 / (9.0 * k)).sqrt()).powi(3);
            if stat <= crit {
                passes += 1;
            }
        }
        assert!(passes >= 28, "only {passes}/{seeds} seeds passed uniformity");
    }

    #[test]
    fn stream_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("slidenorm-gen-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("s.txt");
        let s = appendix_c(1 << 10, 1 << 16, 9);
        write_stream(&path, &s).unwrap();
        let r = read_stream(&path).unwrap();
        assert_eq!(s, r);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn row_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("slidenorm-rows-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("r.txt");
        let rows = gaussian_rows(20, 3, true, 4);
        write_rows(&path, &rows, 3, true).unwrap();
        let (back, d, resp) = read_rows(&path).unwrap();
        assert_eq!(d, 3);
        assert!(resp);
        assert_eq!(back.len(), 20);
        for (a, b) in rows.iter().zip(back.iter()) {
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        std::fs::remove_dir_all(&dir).ok();
    }
}
