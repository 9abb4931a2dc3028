//! Qubit evaluation kernel for contextual nonlocality sweeps.
//!
//! With rank-1 qubit projectors every dephased state is block diagonal in the
//! measured basis, so
//!
//! * `S(Φ_T ρ)` is the entropy of two 4×4 conditional operators
//!   `Tr_T[(P_± ⊗ 𝟙)ρ]` and depends only on the target direction,
//! * `S(Φ_{R,Q} ρ)` is the entropy of four 2×2 conditional operators and
//!   depends only on the two remote directions,
//! * `S(Φ_{A,B,C} ρ)` is the Shannon entropy of the eight outcome probabilities.
//!
//! On a grid the first two are tabulated per direction (pair), leaving eight
//! `x ln x` terms per setting. All three cuts share the outcome entropy, so one
//! pass yields every cut's maximum.

use super::Bipartition;
use crate::error::{Error, Result};
use crate::linalg::{xlnx, C64};
use crate::observable::BlochDirection;
use crate::realism::NEGATIVITY_SLACK;
use crate::settings::{RandomSettings, SettingGrid};
use crate::state::DensityMatrix;
use nalgebra::Matrix4;
use rayon::prelude::*;

type M2 = [[C64; 2]; 2];
type M4 = [[C64; 4]; 4];
type M8 = [[C64; 8]; 8];

const RANDOM_CHUNK: usize = 4096;

/// A 2×2 Hermitian operator written as `(t·𝟙 + r·σ)/2`.
#[derive(Debug, Clone, Copy, Default)]
struct Bloch4 {
    t: f64,
    r: [f64; 3],
}

impl Bloch4 {
    fn from_matrix(k: &M2) -> Self {
        Self {
            t: k[0][0].re + k[1][1].re,
            r: [2.0 * k[0][1].re, -2.0 * k[0][1].im, k[0][0].re - k[1][1].re],
        }
    }

    /// `-Σ λ ln λ` over the two eigenvalues `(t ± |r|)/2`; also reports the
    /// smaller eigenvalue.
    fn neg_entropy(&self) -> (f64, f64) {
        let norm = (self.r[0] * self.r[0] + self.r[1] * self.r[1] + self.r[2] * self.r[2]).sqrt();
        let lo = 0.5 * (self.t - norm);
        (xlnx(0.5 * (self.t + norm)) + xlnx(lo), lo)
    }

    /// `Tr(P_± K)` for the projectors along `n`.
    #[inline]
    fn outcome_pair(&self, n: &[f64; 3]) -> (f64, f64) {
        let dot = n[0] * self.r[0] + n[1] * self.r[1] + n[2] * self.r[2];
        (0.5 * (self.t + dot), 0.5 * (self.t - dot))
    }
}

/// Running minimum of eigenvalues / probabilities seen while evaluating.
#[derive(Debug, Clone, Copy)]
struct Floor(f64);

impl Floor {
    fn new() -> Self {
        Floor(f64::INFINITY)
    }

    #[inline]
    fn see(&mut self, x: f64) {
        if x < self.0 {
            self.0 = x;
        }
    }

    fn check(self) -> Result<()> {
        if self.0 < -NEGATIVITY_SLACK {
            Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: self.0,
            })
        } else {
            Ok(())
        }
    }
}

fn projectors(dir: &BlochDirection) -> [M2; 2] {
    dir.projector_pair()
}

/// Entropy contribution `-Σ λ ln λ` of a 4×4 Hermitian operator.
fn neg_entropy4(m: &M4, floor: &mut Floor) -> f64 {
    let mat = Matrix4::from_fn(|i, j| m[i][j]);
    let eig = mat.symmetric_eigenvalues();
    eig.iter()
        .map(|&l| {
            floor.see(l);
            xlnx(l)
        })
        .sum()
}

/// `Tr_site[(P ⊗ 𝟙) ρ]` on the two remaining qubits (ascending site order).
fn condition8(rho: &M8, site: usize, p: &M2) -> M4 {
    let others: Vec<usize> = (0..3).filter(|&s| s != site).collect();
    let (u, v) = (others[0], others[1]);
    let idx = |k: usize, x: usize, y: usize| (k << (2 - site)) | (x << (2 - u)) | (y << (2 - v));
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for x in 0..2 {
        for y in 0..2 {
            for xp in 0..2 {
                for yp in 0..2 {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..2 {
                        for m in 0..2 {
                            acc += p[k][m] * rho[idx(m, x, y)][idx(k, xp, yp)];
                        }
                    }
                    out[2 * x + y][2 * xp + yp] = acc;
                }
            }
        }
    }
    out
}

/// Contracts the first qubit of a two-qubit operator with `P`.
fn condition_first(m: &M4, p: &M2) -> M2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for y in 0..2 {
        for yp in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..2 {
                for q in 0..2 {
                    acc += p[k][q] * m[2 * q + y][2 * k + yp];
                }
            }
            out[y][yp] = acc;
        }
    }
    out
}

/// Contracts the second qubit of a two-qubit operator with `P`.
fn condition_second(m: &M4, p: &M2) -> M2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for x in 0..2 {
        for xp in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..2 {
                for q in 0..2 {
                    acc += p[k][q] * m[2 * x + q][2 * xp + k];
                }
            }
            out[x][xp] = acc;
        }
    }
    out
}

/// Best value and its first index for each of up to three cuts.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Partial {
    pub best: [(f64, usize); 3],
    min_eta: f64,
    floor: f64,
}

impl Partial {
    fn empty() -> Self {
        Self {
            best: [(f64::NEG_INFINITY, usize::MAX); 3],
            min_eta: f64::INFINITY,
            floor: f64::INFINITY,
        }
    }

    #[inline]
    fn offer(&mut self, cut: usize, value: f64, index: usize) {
        if value < self.min_eta {
            self.min_eta = value;
        }
        let b = &mut self.best[cut];
        if value > b.0 || (value == b.0 && index < b.1) {
            *b = (value, index);
        }
    }

    /// Associative and commutative, so the reduction tree shape is irrelevant.
    fn merge(mut self, other: Self) -> Self {
        for c in 0..3 {
            let (v, i) = other.best[c];
            let b = &mut self.best[c];
            if v > b.0 || (v == b.0 && i < b.1) {
                *b = (v, i);
            }
        }
        self.min_eta = self.min_eta.min(other.min_eta);
        self.floor = self.floor.min(other.floor);
        self
    }

    fn finish(self) -> Result<Self> {
        Floor(self.floor).check()?;
        if self.min_eta < -NEGATIVITY_SLACK {
            return Err(Error::InternalConsistency(format!(
                "contextual nonlocality evaluated to {:e}",
                self.min_eta
            )));
        }
        Ok(self)
    }
}

/// Clamps rounding-level negatives to zero.
pub(crate) fn clamp(value: f64) -> f64 {
    value.max(0.0)
}

fn require_qubits(rho: &DensityMatrix, sites: usize) -> Result<()> {
    if rho.num_sites() != sites || !rho.is_qubits() {
        return Err(Error::InvalidArgument(format!(
            "expected a {sites}-qubit state, got dims {:?}",
            rho.dims()
        )));
    }
    Ok(())
}

/// A three-qubit state prepared for repeated evaluation.
pub(crate) struct ThreeQubit {
    rho: M8,
    entropy: f64,
}

impl ThreeQubit {
    pub fn new(rho: &DensityMatrix) -> Result<Self> {
        require_qubits(rho, 3)?;
        let mut m = [[C64::new(0.0, 0.0); 8]; 8];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = rho.matrix()[(i, j)];
            }
        }
        Ok(Self {
            rho: m,
            entropy: rho.entropy()?,
        })
    }

    /// Unclamped `η` for each cut in `cuts` (others are NaN).
    pub fn eval(&self, dirs: &[BlochDirection; 3], cuts: [bool; 3]) -> Result<[f64; 3]> {
        let mut floor = Floor::new();
        let out = self.eval_inner(dirs, cuts, &mut floor);
        floor.check()?;
        Ok(out)
    }

    fn eval_inner(&self, dirs: &[BlochDirection; 3], cuts: [bool; 3], floor: &mut Floor) -> [f64; 3] {
        let p = [projectors(&dirs[0]), projectors(&dirs[1]), projectors(&dirs[2])];
        let n_c = dirs[2].unit_vector();
        let cond_a = [condition8(&self.rho, 0, &p[0][0]), condition8(&self.rho, 0, &p[0][1])];
        let need_b = cuts[0] || cuts[1];
        let cond_b = need_b.then(|| [condition8(&self.rho, 1, &p[1][0]), condition8(&self.rho, 1, &p[1][1])]);

        // Outcome entropy and the (A,B)-conditioned operators on C.
        let mut neg_all = 0.0;
        let mut neg_ab = 0.0;
        for ma in &cond_a {
            for pb in &p[1] {
                let k = Bloch4::from_matrix(&condition_first(ma, pb));
                let (lo_hi, lo) = k.neg_entropy();
                floor.see(lo);
                neg_ab += lo_hi;
                let (q0, q1) = k.outcome_pair(&n_c);
                floor.see(q0);
                floor.see(q1);
                neg_all += xlnx(q0) + xlnx(q1);
            }
        }
        let s_all = -neg_all;

        let mut out = [f64::NAN; 3];
        if cuts[0] {
            let s_a = -(neg_entropy4(&cond_a[0], floor) + neg_entropy4(&cond_a[1], floor));
            let mut neg_bc = 0.0;
            for mb in cond_b.as_ref().expect("computed for cut A") {
                for pc in &p[2] {
                    let (h, lo) = Bloch4::from_matrix(&condition_second(mb, pc)).neg_entropy();
                    floor.see(lo);
                    neg_bc += h;
                }
            }
            out[0] = s_a - neg_bc - s_all - self.entropy;
        }
        if cuts[1] {
            let cb = cond_b.as_ref().expect("computed for cut B");
            let s_b = -(neg_entropy4(&cb[0], floor) + neg_entropy4(&cb[1], floor));
            let mut neg_ac = 0.0;
            for ma in &cond_a {
                for pc in &p[2] {
                    let (h, lo) = Bloch4::from_matrix(&condition_second(ma, pc)).neg_entropy();
                    floor.see(lo);
                    neg_ac += h;
                }
            }
            out[1] = s_b - neg_ac - s_all - self.entropy;
        }
        if cuts[2] {
            let cc = [condition8(&self.rho, 2, &p[2][0]), condition8(&self.rho, 2, &p[2][1])];
            let s_c = -(neg_entropy4(&cc[0], floor) + neg_entropy4(&cc[1], floor));
            out[2] = s_c - neg_ab - s_all - self.entropy;
        }
        out
    }

    pub fn sweep_grid(&self, grid: &SettingGrid, cuts: [bool; 3]) -> Result<Partial> {
        let dirs = grid.directions();
        let m = dirs.len();
        let mut floor = Floor::new();
        let proj: Vec<[M2; 2]> = dirs.iter().map(projectors).collect();
        let normals: Vec<[f64; 3]> = dirs.iter().map(BlochDirection::unit_vector).collect();

        let cond: Vec<Vec<[M4; 2]>> = (0..3)
            .map(|s| {
                proj.iter()
                    .map(|p| [condition8(&self.rho, s, &p[0]), condition8(&self.rho, s, &p[1])])
                    .collect()
            })
            .collect();
        let single: Vec<Vec<f64>> = (0..3)
            .map(|s| {
                if !cuts[s] {
                    return Vec::new();
                }
                cond[s]
                    .iter()
                    .map(|c| -(neg_entropy4(&c[0], &mut floor) + neg_entropy4(&c[1], &mut floor)))
                    .collect()
            })
            .collect();

        // Pair tables: conditioned operators on the third qubit.
        let mut k_ab = vec![[Bloch4::default(); 4]; m * m];
        let mut s_ab = vec![0.0; if cuts[2] { m * m } else { 0 }];
        let mut s_ac = vec![0.0; if cuts[1] { m * m } else { 0 }];
        let mut s_bc = vec![0.0; if cuts[0] { m * m } else { 0 }];
        #[allow(clippy::needless_range_loop)]
        for d1 in 0..m {
            for d2 in 0..m {
                let q = d1 * m + d2;
                let mut neg = [0.0; 3];
                for i in 0..2 {
                    for j in 0..2 {
                        let k = Bloch4::from_matrix(&condition_first(&cond[0][d1][i], &proj[d2][j]));
                        k_ab[q][2 * i + j] = k;
                        if cuts[2] {
                            let (h, lo) = k.neg_entropy();
                            floor.see(lo);
                            neg[2] += h;
                        }
                        if cuts[1] {
                            let (h, lo) =
                                Bloch4::from_matrix(&condition_second(&cond[0][d1][i], &proj[d2][j])).neg_entropy();
                            floor.see(lo);
                            neg[1] += h;
                        }
                        if cuts[0] {
                            let (h, lo) =
                                Bloch4::from_matrix(&condition_second(&cond[1][d1][i], &proj[d2][j])).neg_entropy();
                            floor.see(lo);
                            neg[0] += h;
                        }
                    }
                }
                if cuts[2] {
                    s_ab[q] = -neg[2];
                }
                if cuts[1] {
                    s_ac[q] = -neg[1];
                }
                if cuts[0] {
                    s_bc[q] = -neg[0];
                }
            }
        }
        floor.check()?;

        let s0 = self.entropy;
        let partial = (0..m * m)
            .into_par_iter()
            .with_min_len(16)
            .fold(Partial::empty, |mut acc, q| {
                let (da, db) = (q / m, q % m);
                let ks = &k_ab[q];
                let mut lowest = f64::INFINITY;
                for (dc, n) in normals.iter().enumerate() {
                    let mut neg_all = 0.0;
                    for k in ks {
                        let (p0, p1) = k.outcome_pair(n);
                        lowest = lowest.min(p0.min(p1));
                        neg_all += xlnx(p0) + xlnx(p1);
                    }
                    let index = q * m + dc;
                    if cuts[0] {
                        acc.offer(0, single[0][da] + s_bc[db * m + dc] + neg_all - s0, index);
                    }
                    if cuts[1] {
                        acc.offer(1, single[1][db] + s_ac[da * m + dc] + neg_all - s0, index);
                    }
                    if cuts[2] {
                        acc.offer(2, single[2][dc] + s_ab[q] + neg_all - s0, index);
                    }
                }
                acc.floor = acc.floor.min(lowest);
                acc
            })
            .reduce(Partial::empty, Partial::merge);
        partial.finish()
    }

    pub fn sweep_random(&self, settings: &RandomSettings, cuts: [bool; 3]) -> Result<Partial> {
        let count = settings.len();
        let chunks = count.div_ceil(RANDOM_CHUNK);
        let partial = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * RANDOM_CHUNK;
                let end = (start + RANDOM_CHUNK).min(count);
                let mut cursor = settings.cursor(start);
                let mut dirs = [BlochDirection::Z; 3];
                let mut floor = Floor::new();
                let mut acc = Partial::empty();
                for index in start..end {
                    cursor.next_directions(&mut dirs);
                    let eta = self.eval_inner(&dirs, cuts, &mut floor);
                    for (cut, &on) in cuts.iter().enumerate() {
                        if on {
                            acc.offer(cut, eta[cut], index);
                        }
                    }
                }
                acc.floor = floor.0;
                acc
            })
            .reduce(Partial::empty, Partial::merge);
        partial.finish()
    }
}

/// A two-qubit state prepared for repeated evaluation.
pub(crate) struct TwoQubit {
    rho: M4,
    entropy: f64,
}

impl TwoQubit {
    pub fn new(rho: &DensityMatrix) -> Result<Self> {
        require_qubits(rho, 2)?;
        let mut m = [[C64::new(0.0, 0.0); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = rho.matrix()[(i, j)];
            }
        }
        Ok(Self {
            rho: m,
            entropy: rho.entropy()?,
        })
    }

    /// `[S(Φ_A ρ), conditioned operators on B]` for direction `dir` at A.
    fn site_a(&self, dir: &BlochDirection, floor: &mut Floor) -> (f64, [Bloch4; 2]) {
        let p = projectors(dir);
        let k = [
            Bloch4::from_matrix(&condition_first(&self.rho, &p[0])),
            Bloch4::from_matrix(&condition_first(&self.rho, &p[1])),
        ];
        let mut neg = 0.0;
        for b in &k {
            let (h, lo) = b.neg_entropy();
            floor.see(lo);
            neg += h;
        }
        (-neg, k)
    }

    fn site_b(&self, dir: &BlochDirection, floor: &mut Floor) -> f64 {
        let p = projectors(dir);
        let mut neg = 0.0;
        for pb in &p {
            let (h, lo) = Bloch4::from_matrix(&condition_second(&self.rho, pb)).neg_entropy();
            floor.see(lo);
            neg += h;
        }
        -neg
    }

    fn neg_outcomes(k: &[Bloch4; 2], n: &[f64; 3], floor: &mut Floor) -> f64 {
        let mut neg = 0.0;
        for b in k {
            let (p0, p1) = b.outcome_pair(n);
            floor.see(p0.min(p1));
            neg += xlnx(p0) + xlnx(p1);
        }
        neg
    }

    /// Unclamped `η_{A|B}`.
    #[cfg(test)]
    pub fn eval(&self, a: &BlochDirection, b: &BlochDirection) -> Result<f64> {
        let mut floor = Floor::new();
        let (s_a, k) = self.site_a(a, &mut floor);
        let s_b = self.site_b(b, &mut floor);
        let neg_all = Self::neg_outcomes(&k, &b.unit_vector(), &mut floor);
        floor.check()?;
        Ok(s_a + s_b + neg_all - self.entropy)
    }

    pub fn sweep_grid(&self, grid: &SettingGrid) -> Result<Partial> {
        let dirs = grid.directions();
        let m = dirs.len();
        let mut floor = Floor::new();
        let a_tables: Vec<(f64, [Bloch4; 2])> = dirs.iter().map(|d| self.site_a(d, &mut floor)).collect();
        let s_b: Vec<f64> = dirs.iter().map(|d| self.site_b(d, &mut floor)).collect();
        floor.check()?;
        let normals: Vec<[f64; 3]> = dirs.iter().map(BlochDirection::unit_vector).collect();
        let s0 = self.entropy;
        let partial = (0..m)
            .into_par_iter()
            .fold(Partial::empty, |mut acc, da| {
                let (s_a, k) = &a_tables[da];
                let mut floor = Floor::new();
                for (db, n) in normals.iter().enumerate() {
                    let neg_all = Self::neg_outcomes(k, n, &mut floor);
                    acc.offer(0, s_a + s_b[db] + neg_all - s0, da * m + db);
                }
                acc.floor = acc.floor.min(floor.0);
                acc
            })
            .reduce(Partial::empty, Partial::merge);
        partial.finish()
    }

    pub fn sweep_random(&self, settings: &RandomSettings) -> Result<Partial> {
        let count = settings.len();
        let chunks = count.div_ceil(RANDOM_CHUNK);
        let partial = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * RANDOM_CHUNK;
                let end = (start + RANDOM_CHUNK).min(count);
                let mut cursor = settings.cursor(start);
                let mut dirs = [BlochDirection::Z; 3];
                let mut floor = Floor::new();
                let mut acc = Partial::empty();
                for index in start..end {
                    cursor.next_directions(&mut dirs);
                    let (s_a, k) = self.site_a(&dirs[0], &mut floor);
                    let s_b = self.site_b(&dirs[1], &mut floor);
                    let neg_all = Self::neg_outcomes(&k, &dirs[1].unit_vector(), &mut floor);
                    acc.offer(0, s_a + s_b + neg_all - self.entropy, index);
                }
                acc.floor = floor.0;
                acc
            })
            .reduce(Partial::empty, Partial::merge);
        partial.finish()
    }
}

pub(crate) fn cut_mask(cuts: &[Bipartition]) -> [bool; 3] {
    let mut mask = [false; 3];
    for c in cuts {
        mask[c.target().0] = true;
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observable::BlochSetting;
    use crate::realism::{RealismContext, SiteIndex};
    use crate::settings::GridIncrement;
    use crate::state::{ghz_state, noisy_state, w_state, NoiseFamilySpec, StateFamily};
    use crate::sampling::{random_direction, random_mixed_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, rank: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
        random_mixed_state(&vec![2; n], rank, rng)
    }

    #[test]
    fn three_qubit_kernel_matches_dense_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..40 {
            let rho = random_state(3, 1 + trial % 4, &mut rng);
            let kernel = ThreeQubit::new(&rho).unwrap();
            let dense = RealismContext::new(rho).unwrap();
            let dirs = [random_direction(&mut rng), random_direction(&mut rng), random_direction(&mut rng)];
            let fast = kernel.eval(&dirs, [true; 3]).unwrap();
            let setting = BlochSetting::new(dirs.to_vec()).unwrap().setting();
            for (t, &f) in fast.iter().enumerate() {
                let slow = dense.eta(SiteIndex(t), &setting).unwrap();
                assert!((clamp(f) - slow).abs() < 1e-10, "cut {t}: {f} vs {slow}");
            }
        }
    }

    #[test]
    fn two_qubit_kernel_matches_dense_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for trial in 0..40 {
            let rho = random_state(2, 1 + trial % 3, &mut rng);
            let kernel = TwoQubit::new(&rho).unwrap();
            let dense = RealismContext::new(rho).unwrap();
            let (a, b) = (random_direction(&mut rng), random_direction(&mut rng));
            let setting = BlochSetting::new(vec![a, b]).unwrap().setting();
            let slow = dense.eta(SiteIndex::A, &setting).unwrap();
            assert!((clamp(kernel.eval(&a, &b).unwrap()) - slow).abs() < 1e-10);
        }
    }

    #[test]
    fn grid_tables_match_direct_evaluation() {
        let rho = noisy_state(NoiseFamilySpec::new(StateFamily::W, 0.2).unwrap());
        let kernel = ThreeQubit::new(&rho).unwrap();
        let grid = SettingGrid::new(GridIncrement::PI_OVER_2, 3, true).unwrap();
        let partial = kernel.sweep_grid(&grid, [true; 3]).unwrap();
        for cut in 0..3 {
            let mut best = (f64::NEG_INFINITY, 0);
            for i in 0..grid.len() {
                let idx = grid.direction_indices(i);
                let dirs = [grid.directions()[idx[0]], grid.directions()[idx[1]], grid.directions()[idx[2]]];
                let v = kernel.eval(&dirs, [true; 3]).unwrap()[cut];
                if v > best.0 + 1e-13 {
                    best = (v, i);
                }
            }
            assert!((partial.best[cut].0 - best.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_wrong_shapes() {
        assert!(ThreeQubit::new(&ghz_state().reduced(&[0, 1]).unwrap()).is_err());
        assert!(TwoQubit::new(&w_state()).is_err());
    }
}
