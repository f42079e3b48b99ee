//! Discrete Fourier transforms of vector-valued sequences.
//!
//! The transform convention is unnormalized analysis,
//! `Y_q = sum_k y_k e^{-j 2 pi q k / T}`, matching the spectral-line
//! definitions used by the excitation module (which divide by the window
//! length themselves).

use num_complex::Complex64;

use super::NumericsError;

fn twiddle(t: f64) -> Complex64 {
    // e^{-j 2 pi t}
    let angle = -2.0 * std::f64::consts::PI * t;
    Complex64::new(angle.cos(), angle.sin())
}

/// DFT of a vector-valued sequence at a single on-grid frequency index
/// `q` (frequency q/T cycles per step). `q` must lie in `[0, T)`.
pub fn dft(sequence: &[Vec<f64>], frequency_index: usize) -> Result<Vec<Complex64>, NumericsError> {
    let t_len = sequence.len();
    if frequency_index >= t_len {
        return Err(NumericsError::FrequencyOffGrid { index: frequency_index, len: t_len });
    }
    let dim = sequence[0].len();
    let mut acc = vec![Complex64::new(0.0, 0.0); dim];
    for (k, sample) in sequence.iter().enumerate() {
        assert_eq!(sample.len(), dim, "dft: ragged sequence");
        let w = twiddle((frequency_index * k % t_len) as f64 / t_len as f64);
        for (a, &x) in acc.iter_mut().zip(sample) {
            *a += w * x;
        }
    }
    Ok(acc)
}

/// DFT of a scalar sequence at a single on-grid frequency index.
pub fn dft_scalar(sequence: &[f64], frequency_index: usize) -> Result<Complex64, NumericsError> {
    let t_len = sequence.len();
    if frequency_index >= t_len {
        return Err(NumericsError::FrequencyOffGrid { index: frequency_index, len: t_len });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &x) in sequence.iter().enumerate() {
        acc += twiddle((frequency_index * k % t_len) as f64 / t_len as f64) * x;
    }
    Ok(acc)
}

/// In-place iterative radix-2 Cooley-Tukey; `data.len()` must be a power of
/// two.
fn fft_pow2(data: &mut [Complex64]) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    // Bit-reversal permutation.
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = (i.reverse_bits() >> (usize::BITS - bits)) as usize;
        if j > i {
            data.swap(i, j);
        }
    }
    let mut half = 1usize;
    while half < n {
        let step = twiddle(1.0 / (2 * half) as f64);
        for start in (0..n).step_by(2 * half) {
            let mut w = Complex64::new(1.0, 0.0);
            for k in start..start + half {
                let even = data[k];
                let odd = data[k + half] * w;
                data[k] = even + odd;
                data[k + half] = even - odd;
                w *= step;
            }
        }
        half *= 2;
    }
}

/// Full DFT of a scalar sequence: all `T` frequency bins, index order
/// `q = 0..T`. Uses radix-2 when the length is a power of two, otherwise a
/// table-driven direct transform.
pub fn full_dft_scalar(sequence: &[f64]) -> Vec<Complex64> {
    let t_len = sequence.len();
    if t_len == 0 {
        return Vec::new();
    }
    if t_len.is_power_of_two() {
        let mut data: Vec<Complex64> =
            sequence.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft_pow2(&mut data);
        return data;
    }
    // Precompute the T distinct twiddles; index products reduce mod T.
    let table: Vec<Complex64> = (0..t_len).map(|t| twiddle(t as f64 / t_len as f64)).collect();
    (0..t_len)
        .map(|q| {
            sequence
                .iter()
                .enumerate()
                .map(|(k, &x)| table[q * k % t_len] * x)
                .sum()
        })
        .collect()
}

/// Full DFT of a vector-valued sequence. Element `[q][i]` is bin `q` of
/// component `i`.
pub fn full_dft(sequence: &[Vec<f64>]) -> Vec<Vec<Complex64>> {
    let t_len = sequence.len();
    if t_len == 0 {
        return Vec::new();
    }
    let dim = sequence[0].len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; t_len];
    for i in 0..dim {
        let component: Vec<f64> = sequence
            .iter()
            .map(|s| {
                assert_eq!(s.len(), dim, "full_dft: ragged sequence");
                s[i]
            })
            .collect();
        for (q, value) in full_dft_scalar(&component).into_iter().enumerate() {
            out[q][i] = value;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{gaussian_stream, RngSpec};

    #[test]
    fn constant_sequence_concentrates_at_zero() {
        let seq: Vec<Vec<f64>> = vec![vec![3.0]; 10];
        let at0 = dft(&seq, 0).unwrap();
        assert!((at0[0] - Complex64::new(30.0, 0.0)).norm() < 1e-12);
        for q in 1..10 {
            assert!(dft(&seq, q).unwrap()[0].norm() < 1e-10, "bin {q} should vanish");
        }
    }

    #[test]
    fn cosine_line_splits_between_conjugate_bins() {
        // y_k = cos(2 pi (5/64) k): bins 5 and 59 each hold T/2 = 32.
        let t_len = 64usize;
        let seq: Vec<f64> = (0..t_len)
            .map(|k| (2.0 * std::f64::consts::PI * 5.0 * k as f64 / t_len as f64).cos())
            .collect();
        let spectrum = full_dft_scalar(&seq);
        assert!((spectrum[5] - Complex64::new(32.0, 0.0)).norm() < 1e-9);
        assert!((spectrum[59] - Complex64::new(32.0, 0.0)).norm() < 1e-9);
        for (q, v) in spectrum.iter().enumerate() {
            if q != 5 && q != 59 {
                assert!(v.norm() < 1e-9, "unexpected energy in bin {q}");
            }
        }
    }

    #[test]
    fn off_grid_index_rejected() {
        let seq: Vec<Vec<f64>> = vec![vec![1.0]; 8];
        match dft(&seq, 8) {
            Err(NumericsError::FrequencyOffGrid { index: 8, len: 8 }) => {}
            other => panic!("expected FrequencyOffGrid, got {other:?}"),
        }
        assert!(dft_scalar(&[1.0, 2.0], 5).is_err());
    }

    #[test]
    fn parseval_identity() {
        let mut g = gaussian_stream(RngSpec::new(11, 2));
        for &t_len in &[12usize, 16, 31, 64] {
            let seq: Vec<f64> = (0..t_len).map(|_| g.gaussian()).collect();
            let spectrum = full_dft_scalar(&seq);
            let time_energy: f64 = seq.iter().map(|x| x * x).sum();
            let freq_energy: f64 =
                spectrum.iter().map(|z| z.norm_sqr()).sum::<f64>() / t_len as f64;
            assert!(
                (time_energy - freq_energy).abs() < 1e-9 * time_energy.max(1.0),
                "Parseval failed at T = {t_len}"
            );
        }
    }

    #[test]
    fn fast_path_matches_direct_transform() {
        let mut g = gaussian_stream(RngSpec::new(23, 0));
        for &t_len in &[16usize, 15] {
            let seq: Vec<Vec<f64>> =
                (0..t_len).map(|_| vec![g.gaussian(), g.gaussian()]).collect();
            let full = full_dft(&seq);
            for q in 0..t_len {
                let direct = dft(&seq, q).unwrap();
                for (a, b) in full[q].iter().zip(&direct) {
                    assert!((a - b).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn empty_sequence_gives_empty_spectrum() {
        assert!(full_dft_scalar(&[]).is_empty());
        assert!(full_dft(&[]).is_empty());
    }
}
