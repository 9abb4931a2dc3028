//! Enumerations of qubit measurement settings: the angular grid and a seeded
//! uniform sampler. Both are random-access by index so sweeps can be split
//! into contiguous ranges.

use crate::error::{Error, Result};
use crate::observable::{BlochDirection, BlochSetting};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Angular step `π / divisions`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridIncrement {
    divisions: u32,
}

impl GridIncrement {
    pub const PI_OVER_2: Self = Self { divisions: 2 };
    pub const PI_OVER_4: Self = Self { divisions: 4 };
    pub const PI_OVER_8: Self = Self { divisions: 8 };

    pub fn new(divisions: u32) -> Result<Self> {
        if divisions == 0 || divisions > 1024 {
            return Err(Error::InvalidArgument(format!(
                "grid divisions must be in 1..=1024, got {divisions}"
            )));
        }
        Ok(Self { divisions })
    }

    /// Accepts only increments that divide π exactly.
    pub fn from_radians(increment: f64) -> Result<Self> {
        if !(increment > 0.0 && increment <= PI) {
            return Err(Error::InvalidArgument(format!("increment {increment} rad")));
        }
        let k = PI / increment;
        let rounded = k.round();
        if (k - rounded).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "increment {increment} rad does not divide π"
            )));
        }
        Self::new(rounded as u32)
    }

    pub fn divisions(&self) -> u32 {
        self.divisions
    }

    pub fn radians(&self) -> f64 {
        PI / self.divisions as f64
    }
}

impl fmt::Display for GridIncrement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pi/{}", self.divisions)
    }
}

impl FromStr for GridIncrement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "pi" {
            return Self::new(1);
        }
        if let Some(rest) = s.strip_prefix("pi/") {
            let k: u32 = rest
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad increment '{s}'")))?;
            return Self::new(k);
        }
        let radians: f64 = s
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad increment '{s}'")))?;
        Self::from_radians(radians)
    }
}

/// Directions with `θ ∈ {0, inc, …, π}` and `φ ∈ {0, inc, …, 2π − inc}`, θ-major.
///
/// When `keep_duplicates` is false, poles are kept once and only one of each
/// antipodal pair survives (`n` and `−n` define the same measurement).
pub fn grid_directions(increment: GridIncrement, keep_duplicates: bool) -> Vec<BlochDirection> {
    let k = increment.divisions as usize;
    let step = increment.radians();
    let mut dirs = Vec::new();
    for it in 0..=k {
        let theta = it as f64 * step;
        for ip in 0..2 * k {
            let phi = ip as f64 * step;
            if !keep_duplicates {
                let pole = it == 0 || it == k;
                if (pole && (it == k || ip > 0)) || 2 * it > k || (2 * it == k && ip >= k) {
                    continue;
                }
            }
            dirs.push(BlochDirection::new(theta, phi).expect("grid angles in range"));
        }
    }
    dirs
}

/// Mixed-radix index over `sites` copies of the direction list, first site slowest.
#[derive(Debug, Clone)]
pub struct SettingGrid {
    increment: GridIncrement,
    keep_duplicates: bool,
    sites: usize,
    directions: Vec<BlochDirection>,
}

impl SettingGrid {
    pub fn new(increment: GridIncrement, sites: usize, keep_duplicates: bool) -> Result<Self> {
        check_sites(sites)?;
        Ok(Self {
            increment,
            keep_duplicates,
            sites,
            directions: grid_directions(increment, keep_duplicates),
        })
    }

    pub fn increment(&self) -> GridIncrement {
        self.increment
    }

    pub fn keep_duplicates(&self) -> bool {
        self.keep_duplicates
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn directions(&self) -> &[BlochDirection] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len().pow(self.sites as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-site direction indices of setting `index`.
    pub fn direction_indices(&self, index: usize) -> [usize; 3] {
        let m = self.directions.len();
        let mut out = [0; 3];
        let mut rem = index;
        for s in (0..self.sites).rev() {
            out[s] = rem % m;
            rem /= m;
        }
        out
    }

    pub fn get(&self, index: usize) -> Option<BlochSetting> {
        if index >= self.len() {
            return None;
        }
        let idx = self.direction_indices(index);
        let dirs = idx[..self.sites].iter().map(|&i| self.directions[i]).collect();
        Some(BlochSetting::new(dirs).expect("2 or 3 sites"))
    }

    pub fn iter(&self) -> impl Iterator<Item = BlochSetting> + '_ {
        (0..self.len()).map(move |i| self.get(i).expect("index in range"))
    }
}

/// Directions drawn uniformly on the sphere from a ChaCha8 stream.
///
/// Setting `i` consumes `2·sites` 64-bit words starting at word offset
/// `4·sites·i` (ChaCha words are 32 bits), so any index can be reached directly.
/// Each direction uses `cos θ = 1 − 2u₁`, `φ = 2π u₂` with `u = (x >> 11)·2⁻⁵³`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSettings {
    count: usize,
    seed: u64,
    sites: usize,
}

impl RandomSettings {
    pub fn new(count: usize, seed: u64, sites: usize) -> Result<Self> {
        check_sites(sites)?;
        if count == 0 {
            return Err(Error::InvalidArgument("random setting count must be positive".into()));
        }
        Ok(Self { count, seed, sites })
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Cursor positioned at setting `start`.
    pub fn cursor(&self, start: usize) -> RandomCursor {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_word_pos((start as u128) * 4 * self.sites as u128);
        RandomCursor {
            rng,
            sites: self.sites,
        }
    }

    pub fn get(&self, index: usize) -> Option<BlochSetting> {
        (index < self.count).then(|| self.cursor(index).next_setting())
    }

    pub fn iter(&self) -> impl Iterator<Item = BlochSetting> {
        let mut cursor = self.cursor(0);
        (0..self.count).map(move |_| cursor.next_setting())
    }
}

/// Sequential reader over a [`RandomSettings`] stream.
#[derive(Debug, Clone)]
pub struct RandomCursor {
    rng: ChaCha8Rng,
    sites: usize,
}

impl RandomCursor {
    fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_direction(&mut self) -> BlochDirection {
        let cos_theta = 1.0 - 2.0 * self.unit();
        let phi = 2.0 * PI * self.unit();
        BlochDirection::new(cos_theta.acos(), phi).expect("sampled angles in range")
    }

    /// Fills `out[..sites]` with the next setting's directions.
    pub fn next_directions(&mut self, out: &mut [BlochDirection; 3]) {
        for d in out.iter_mut().take(self.sites) {
            *d = self.next_direction();
        }
    }

    pub fn next_setting(&mut self) -> BlochSetting {
        let dirs = (0..self.sites).map(|_| self.next_direction()).collect();
        BlochSetting::new(dirs).expect("2 or 3 sites")
    }
}

fn check_sites(sites: usize) -> Result<()> {
    if !(2..=3).contains(&sites) {
        return Err(Error::InvalidArgument(format!("settings cover 2 or 3 sites, got {sites}")));
    }
    Ok(())
}

/// `setting_grid(increment, sites, keep_duplicates)` from radians.
pub fn setting_grid(increment: f64, sites: usize, keep_duplicates: bool) -> Result<SettingGrid> {
    SettingGrid::new(GridIncrement::from_radians(increment)?, sites, keep_duplicates)
}

pub fn random_settings(count: usize, seed: u64, sites: usize) -> Result<RandomSettings> {
    RandomSettings::new(count, seed, sites)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observable::ProjectiveObservable;

    #[test]
    fn pi_over_8_cardinalities() {
        assert_eq!(setting_grid(PI / 8.0, 3, true).unwrap().len(), 2_985_984);
        assert_eq!(setting_grid(PI / 8.0, 2, true).unwrap().len(), 20_736);
        assert_eq!(setting_grid(PI / 2.0, 3, true).unwrap().len(), 1_728);
        assert_eq!(grid_directions(GridIncrement::PI_OVER_8, true).len(), 144);
    }

    #[test]
    fn non_divisor_increment_rejected() {
        assert!(setting_grid(0.3, 3, true).is_err());
        assert!(setting_grid(PI / 4.0, 4, true).is_err());
        assert!(GridIncrement::from_str("pi/8").unwrap() == GridIncrement::PI_OVER_8);
        assert!(GridIncrement::from_str("pi/x").is_err());
    }

    #[test]
    fn grid_order_is_lexicographic() {
        let g = setting_grid(PI / 2.0, 3, true).unwrap();
        let first = g.get(0).unwrap();
        assert!(first.directions().iter().all(|d| *d == BlochDirection::Z));
        // Last site varies fastest.
        let second = g.get(1).unwrap();
        assert_eq!(second.directions()[0], BlochDirection::Z);
        assert_eq!(second.directions()[2].phi(), PI / 2.0);
        assert_eq!(g.iter().count(), g.len());
        assert!(g.get(g.len()).is_none());
    }

    #[test]
    fn deduplicated_directions_are_distinct_measurements() {
        for inc in [GridIncrement::PI_OVER_2, GridIncrement::PI_OVER_4, GridIncrement::PI_OVER_8] {
            let full = grid_directions(inc, true);
            let dedup = grid_directions(inc, false);
            let obs: Vec<_> = dedup.iter().map(|&d| ProjectiveObservable::bloch(d)).collect();
            for i in 0..obs.len() {
                for j in i + 1..obs.len() {
                    assert!(!obs[i].same_measurement(&obs[j], 1e-9), "{} dup {}", dedup[i], dedup[j]);
                }
            }
            // Every faithful direction is represented.
            for d in full {
                let o = ProjectiveObservable::bloch(d);
                assert!(obs.iter().any(|q| q.same_measurement(&o, 1e-9)));
            }
        }
        assert_eq!(grid_directions(GridIncrement::PI_OVER_2, false).len(), 3);
        assert_eq!(grid_directions(GridIncrement::PI_OVER_8, false).len(), 57);
    }

    #[test]
    fn random_stream_is_replayable_and_seekable() {
        let r = random_settings(1000, 42, 3).unwrap();
        let a: Vec<_> = r.iter().collect();
        let b: Vec<_> = r.iter().collect();
        assert_eq!(a, b);
        assert_eq!(a.len(), 1000);
        for i in [0, 1, 17, 999] {
            assert_eq!(r.get(i).unwrap(), a[i]);
        }
        assert!(r.get(1000).is_none());
        let other = random_settings(1000, 43, 3).unwrap();
        assert_ne!(other.get(0), r.get(0));
    }

    #[test]
    fn random_stream_of_a_million() {
        let r = random_settings(1_000_000, 1, 3).unwrap();
        assert_eq!(r.len(), 1_000_000);
        assert_eq!(r.iter().count(), 1_000_000);
    }

    #[test]
    fn random_directions_uniform_in_cos_theta() {
        let r = random_settings(100_000, 2024, 2).unwrap();
        let mut cursor = r.cursor(0);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| cursor.next_direction().theta().cos()).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.02, "mean cos θ = {mean}");
    }
}
