//! Brute-force reference: the full `2^N x 2^N` density matrix of the decohered
//! GHZ state, built by applying the Pauli channel qubit by qubit, and NPPT
//! decided by explicit partial transposition plus a Hermitian eigensolver.
//!
//! Bit order: qubit 0 is the most significant bit of a basis index. Qubit
//! masks ([`QubitMask`]) use bit `q` for qubit `q`, and are translated to
//! index masks internally.

mod eigen;
mod matrix;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use eigen::{eigenvalues, min_eigenvalue, HERMITIAN_TOLERANCE};
pub use matrix::CMatrix;

use crate::channel::PauliChannel;
use crate::error::{Error, Result};

/// Default size limit (matrix side 1024).
pub const N_MAX: usize = 10;

/// Hard ceiling for [`DenseState::cat_state_with_limit`].
pub const N_HARD_MAX: usize = 14;

/// NPPT threshold on the smallest partial-transpose eigenvalue.
pub const EIGEN_EPS: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

type Op2 = [[Complex64; 2]; 2];

const PAULI: [Op2; 4] = [
    [[ONE, ZERO], [ZERO, ONE]],
    [[ZERO, ONE], [ONE, ZERO]],
    [[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]],
    [[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]],
];

/// Set of qubits, bit `q` for qubit `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QubitMask(pub u64);

impl QubitMask {
    /// The first `k` qubits.
    pub fn first(k: usize) -> Self {
        QubitMask(if k >= 64 { u64::MAX } else { (1u64 << k) - 1 })
    }

    pub fn count(&self) -> u32 {
        self.0.count_ones()
    }

    fn index_mask(&self, n: usize) -> usize {
        (0..n)
            .filter(|q| self.0 >> q & 1 == 1)
            .map(|q| 1usize << (n - 1 - q))
            .sum()
    }
}

/// Density matrix of `N` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n_qubits: usize,
    rho: CMatrix,
}

impl DenseState {
    /// `|GHZ><GHZ|` on `n` qubits, `2 <= n <= N_MAX`.
    pub fn cat_state(n: usize) -> Result<Self> {
        Self::cat_state_with_limit(n, N_MAX)
    }

    /// As [`DenseState::cat_state`] with a raised size limit (at most
    /// [`N_HARD_MAX`]).
    pub fn cat_state_with_limit(n: usize, limit: usize) -> Result<Self> {
        let limit = limit.min(N_HARD_MAX);
        if limit > N_MAX {
            log::warn!("oracle limit raised to {limit} qubits; dense eigensolves will be slow");
        }
        if n > limit {
            return Err(Error::SizeTooLarge { n, max: limit });
        }
        if n < 2 {
            return Err(Error::InvalidCut { n: n as u64, k: 1 });
        }
        let dim = 1usize << n;
        let mut rho = CMatrix::zeros(dim);
        let half = Complex64::new(0.5, 0.0);
        for i in [0, dim - 1] {
            for j in [0, dim - 1] {
                rho[(i, j)] = half;
            }
        }
        Ok(Self { n_qubits: n, rho })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rho[(i, j)]
    }

    /// `U rho U†` with the single-qubit operator `u` acting on `qubit`.
    fn conjugate_local(&self, u: &Op2, qubit: usize) -> CMatrix {
        let dim = self.dim();
        let shift = self.n_qubits - 1 - qubit;
        let bit = 1usize << shift;
        let mut out = CMatrix::zeros(dim);
        for i in 0..dim {
            let bi = (i >> shift) & 1;
            let i_base = i & !bit;
            for j in 0..dim {
                let bj = (j >> shift) & 1;
                let j_base = j & !bit;
                let mut acc = ZERO;
                for (s, &us) in u[bi].iter().enumerate() {
                    if us == ZERO {
                        continue;
                    }
                    for (t, &ut) in u[bj].iter().enumerate() {
                        if ut == ZERO {
                            continue;
                        }
                        acc += us * self.rho[(i_base | s << shift, j_base | t << shift)] * ut.conj();
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// `pi0 rho + sum_i pi_i sigma_i rho sigma_i` on one qubit.
    pub fn apply_channel(&self, ch: &PauliChannel, qubit: usize) -> Result<Self> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                n: self.n_qubits,
            });
        }
        let dim = self.dim();
        let mut acc = vec![ZERO; dim * dim];
        for (prob, op) in ch.probabilities().iter().zip(&PAULI) {
            if *prob == 0.0 {
                continue;
            }
            let term = self.conjugate_local(op, qubit);
            for (a, t) in acc.iter_mut().zip(term.as_slice()) {
                *a += t * *prob;
            }
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            rho: CMatrix::from_row_major(dim, acc),
        })
    }

    /// Applies the channel to each qubit in the given order.
    pub fn apply_to_all(&self, ch: &PauliChannel, order: &[usize]) -> Result<Self> {
        order
            .iter()
            .try_fold(self.clone(), |st, &q| st.apply_channel(ch, q))
    }

    /// Partial transpose over the qubits in `mask`: entry `(i, j)` moves to
    /// `(i', j')` where `i'` takes its masked bits from `j` and vice versa.
    pub fn partial_transpose(&self, mask: QubitMask) -> Result<CMatrix> {
        let n = self.n_qubits;
        let full = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
        if mask.0 & full == 0 || mask.0 & full == full || mask.0 & !full != 0 {
            return Err(Error::EmptyOrFullMask);
        }
        Ok(partial_transpose_indices(&self.rho, mask.index_mask(n)))
    }

    /// Smallest eigenvalue of `rho` itself.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        min_eigenvalue(&self.rho)
    }

    /// Hermiticity, unit trace and imaginary-part checks; returns the largest
    /// violation found.
    pub fn check_invariants(&self) -> StateChecks {
        StateChecks {
            hermiticity_defect: self.rho.hermiticity_defect(),
            trace_error: (self.rho.trace() - ONE).norm(),
            max_imag: self.rho.max_imag(),
        }
    }
}

fn partial_transpose_indices(rho: &CMatrix, m: usize) -> CMatrix {
    let dim = rho.dim();
    let mut out = CMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            let i2 = (i & !m) | (j & m);
            let j2 = (j & !m) | (i & m);
            out[(i2, j2)] = rho[(i, j)];
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateChecks {
    pub hermiticity_defect: f64,
    pub trace_error: f64,
    pub max_imag: f64,
}

/// GHZ state on `n` qubits after the channel has acted once on every qubit.
pub fn decohere_all(n: usize, ch: &PauliChannel) -> Result<DenseState> {
    let order: Vec<usize> = (0..n).collect();
    DenseState::cat_state(n)?.apply_to_all(ch, &order)
}

/// NPPT test across one qubit subset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtResult {
    pub cut_mask: QubitMask,
    pub min_eigenvalue: f64,
    pub nppt: bool,
}

pub fn oracle_mask_verdict(state: &DenseState, mask: QubitMask) -> Result<PtResult> {
    let pt = state.partial_transpose(mask)?;
    let min = min_eigenvalue(&pt)?;
    Ok(PtResult {
        cut_mask: mask,
        min_eigenvalue: min,
        nppt: min < -EIGEN_EPS,
    })
}

/// NPPT test for the cut formed by the first `k` qubits.
pub fn oracle_cut_verdict(state: &DenseState, k: usize) -> Result<PtResult> {
    let n = state.n_qubits();
    if k < 1 || k > n / 2 {
        return Err(Error::InvalidCut {
            n: n as u64,
            k: k as u64,
        });
    }
    oracle_mask_verdict(state, QubitMask::first(k))
}

/// One cat-basis population pair `|Ψx±> = (|x> ± |x̄>)/√2`, with `x` the
/// member whose leading qubit is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatPair {
    pub index: usize,
    pub zeros: u32,
    pub plus: f64,
    pub minus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatDiagonality {
    pub max_off_diagonal: f64,
    pub passes: bool,
    pub pairs: Vec<CatPair>,
}

/// Tolerance on off-diagonal cat-basis elements.
pub const CAT_DIAGONAL_TOL: f64 = 1e-12;

/// Expresses the state in the cat basis and reports the largest
/// off-diagonal element together with the diagonal.
pub fn verify_cat_diagonality(state: &DenseState) -> CatDiagonality {
    let n = state.n_qubits();
    let dim = state.dim();
    let all = dim - 1;
    let half = dim / 2;
    // <Ψp^s| rho |Ψq^t> = (rho[p,q] + t rho[p,q̄] + s rho[p̄,q] + s t rho[p̄,q̄]) / 2
    let element = |p: usize, s: f64, q: usize, t: f64| -> Complex64 {
        let r = |i: usize, j: usize| state.get(i, j);
        (r(p, q) + r(p, all ^ q) * t + r(all ^ p, q) * s + r(all ^ p, all ^ q) * (s * t)) * 0.5
    };
    let signs = [1.0, -1.0];
    let mut worst: f64 = 0.0;
    let mut pairs = Vec::with_capacity(half);
    for p in 0..half {
        for (si, &s) in signs.iter().enumerate() {
            for q in 0..half {
                for (ti, &t) in signs.iter().enumerate() {
                    if p == q && si == ti {
                        continue;
                    }
                    worst = worst.max(element(p, s, q, t).norm());
                }
            }
        }
        pairs.push(CatPair {
            index: p,
            zeros: n as u32 - p.count_ones(),
            plus: element(p, 1.0, p, 1.0).re,
            minus: element(p, -1.0, p, -1.0).re,
        });
    }
    CatDiagonality {
        max_off_diagonal: worst,
        passes: worst < CAT_DIAGONAL_TOL,
        pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn third() -> PauliChannel {
        let t = 1.0 / 30.0;
        PauliChannel::new([0.9, t, t, t]).unwrap()
    }

    #[test]
    fn bell_and_ghz3() {
        let s = DenseState::cat_state(2).unwrap();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_eq!(s.get(i, j).re, 0.5);
        }
        let nonzero = s.matrix().as_slice().iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 4);
        let s = DenseState::cat_state(3).unwrap();
        assert_eq!(s.get(0, 7).re, 0.5);
        assert_eq!(s.get(7, 7).re, 0.5);
        for n in 2..=6 {
            let s = DenseState::cat_state(n).unwrap();
            assert_eq!(s.matrix().trace().re, 1.0);
            assert!((s.matrix().frobenius_sq() - 1.0).abs() < 1e-15);
        }
        assert!(matches!(DenseState::cat_state(11), Err(Error::SizeTooLarge { .. })));
        assert!(DenseState::cat_state_with_limit(11, 11).is_ok());
    }

    #[test]
    fn apply_channel_examples() {
        let s = DenseState::cat_state(2).unwrap();
        let same = s.apply_channel(&PauliChannel::identity(), 0).unwrap();
        assert!(same.matrix().max_abs_diff(s.matrix()) < 1e-15);

        let dephase = PauliChannel::new([0.5, 0.0, 0.0, 0.5]).unwrap();
        let out = s.apply_to_all(&dephase, &[0, 1]).unwrap();
        let expect = CMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]);
        assert!(out.matrix().max_abs_diff(&expect) < 1e-15);

        let out = s.apply_channel(&third(), 0).unwrap();
        assert!((out.get(0, 3).re - 13.0 / 30.0).abs() < 1e-15);
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-13);

        assert!(matches!(s.apply_channel(&third(), 2), Err(Error::QubitOutOfRange { .. })));
    }

    #[test]
    fn decohere_examples() {
        for n in 2..=5 {
            let s = decohere_all(n, &PauliChannel::identity()).unwrap();
            assert!(s.matrix().max_abs_diff(DenseState::cat_state(n).unwrap().matrix()) < 1e-15);
        }
        let s = decohere_all(2, &PauliChannel::new([0.25; 4]).unwrap()).unwrap();
        let expect = CMatrix::from_real_diagonal(&[0.25; 4]);
        assert!(s.matrix().max_abs_diff(&expect) < 1e-15);

        let s = decohere_all(3, &third()).unwrap();
        assert!((s.get(0, 7).re - (26.0f64 / 30.0).powi(3) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn channel_order_is_irrelevant() {
        let ch = PauliChannel::new([0.55, 0.2, 0.15, 0.1]).unwrap();
        let base = DenseState::cat_state(4).unwrap();
        let forward = base.apply_to_all(&ch, &[0, 1, 2, 3]).unwrap();
        for order in [[3, 1, 0, 2], [2, 3, 1, 0], [1, 0, 3, 2]] {
            let other = base.apply_to_all(&ch, &order).unwrap();
            assert!(forward.matrix().max_abs_diff(other.matrix()) < 1e-13);
        }
    }

    #[test]
    fn partial_transpose_examples() {
        let mixed = decohere_all(2, &PauliChannel::new([0.25; 4]).unwrap()).unwrap();
        let pt = mixed.partial_transpose(QubitMask(1)).unwrap();
        assert!(pt.max_abs_diff(mixed.matrix()) < 1e-15);

        let bell = DenseState::cat_state(2).unwrap();
        let pt = bell.partial_transpose(QubitMask(1)).unwrap();
        let ev = eigenvalues(&pt).unwrap();
        let expect = [-0.5, 0.5, 0.5, 0.5];
        for (x, y) in ev.iter().zip(expect) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!((min_eigenvalue(&pt).unwrap() + 0.5).abs() < 1e-14);

        let s = decohere_all(4, &third()).unwrap();
        for mask in [0b0001u64, 0b0110, 0b1011] {
            let pt = s.partial_transpose(QubitMask(mask)).unwrap();
            let back = partial_transpose_indices(&pt, QubitMask(mask).index_mask(4));
            assert_eq!(&back, s.matrix());
            assert!(pt.hermiticity_defect() < 1e-15);
            assert!((pt.trace() - s.matrix().trace()).norm() < 1e-15);
        }

        assert!(matches!(bell.partial_transpose(QubitMask(0)), Err(Error::EmptyOrFullMask)));
        assert!(matches!(bell.partial_transpose(QubitMask(3)), Err(Error::EmptyOrFullMask)));
        assert!(matches!(bell.partial_transpose(QubitMask(4)), Err(Error::EmptyOrFullMask)));
    }

    #[test]
    fn cat_diagonality_examples() {
        for ch in [third(), PauliChannel::new([0.4, 0.3, 0.1, 0.2]).unwrap()] {
            let r = verify_cat_diagonality(&decohere_all(2, &ch).unwrap());
            assert!(r.max_off_diagonal < 1e-15, "{}", r.max_off_diagonal);
        }
        let r = verify_cat_diagonality(&decohere_all(4, &PauliChannel::identity()).unwrap());
        assert!(r.passes);
        assert_eq!(r.pairs[0].plus, 1.0);
        let total: f64 = r.pairs.iter().map(|p| p.plus + p.minus).sum();
        assert_eq!(total, 1.0);
        assert!(r.pairs[1..].iter().all(|p| p.plus == 0.0 && p.minus == 0.0));
    }

    #[test]
    fn oracle_cut_examples() {
        let s = decohere_all(4, &PauliChannel::identity()).unwrap();
        let r = oracle_cut_verdict(&s, 2).unwrap();
        assert!(r.nppt);
        assert!((r.min_eigenvalue + 0.5).abs() < 1e-12);

        let balanced = PauliChannel::new([0.3, 0.3, 0.2, 0.2]).unwrap();
        let s = decohere_all(4, &balanced).unwrap();
        for k in 1..=2 {
            assert!(!oracle_cut_verdict(&s, k).unwrap().nppt);
        }

        let s = decohere_all(4, &third()).unwrap();
        assert!(oracle_cut_verdict(&s, 2).unwrap().nppt);
        assert!(oracle_cut_verdict(&s, 3).is_err());
    }

    #[test]
    fn subset_independence() {
        let ch = PauliChannel::new([0.7, 0.05, 0.15, 0.1]).unwrap();
        for n in 2..=6usize {
            let s = decohere_all(n, &ch).unwrap();
            for k in 1..=n / 2 {
                let reference = oracle_cut_verdict(&s, k).unwrap();
                for mask in (1u64..(1 << n) - 1).filter(|m| m.count_ones() as usize == k) {
                    let r = oracle_mask_verdict(&s, QubitMask(mask)).unwrap();
                    assert_eq!(r.nppt, reference.nppt);
                    assert!((r.min_eigenvalue - reference.min_eigenvalue).abs() < 1e-12);
                }
            }
        }
    }
}
