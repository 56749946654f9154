use super::field::{gf_build, prime_power};
use super::{Basis, MubSet};
use crate::error::{Error, Result};
use crate::qmath::{root_of_unity, PureState, C64};
use crate::settings::MAX_ENTRIES;

/// Two-qubit stabilizer eigenbases; entry `e` stands for the amplitude
/// `i^e / 2`. The computational basis is prepended at construction.
const D4_PHASES: [[[u8; 4]; 4]; 4] = [
    [[0, 0, 0, 0], [0, 0, 2, 2], [0, 2, 2, 0], [0, 2, 0, 2]],
    [[0, 2, 3, 3], [0, 2, 1, 1], [0, 0, 1, 3], [0, 0, 3, 1]],
    [[0, 3, 3, 2], [0, 3, 1, 0], [0, 1, 1, 2], [0, 1, 3, 0]],
    [[0, 3, 2, 3], [0, 3, 0, 1], [0, 1, 2, 1], [0, 1, 0, 3]],
];

/// Complete set of `d + 1` MUBs for `d = 2`, `d = 4` and odd prime powers.
///
/// The first basis is always the computational one. For odd `q = p^n` basis
/// `a ∈ F_q` has vectors `b ∈ F_q` with components
/// `ω_p^{tr(a j² + b j)} / √q`, `ω_p = exp(2πi/p)`.
pub fn construct_mub_set(d: usize) -> Result<MubSet> {
    let bases = match d {
        2 => pauli_bases(),
        4 => d4_bases(),
        _ => match prime_power(d as u64) {
            Some((p, 1)) if p > 2 => {
                check_size(d)?;
                prime_bases(d)
            }
            Some((p, n)) if p > 2 => field_bases(p, n)?,
            _ => return Err(Error::UnsupportedDimension { d }),
        },
    };
    let mut all = vec![Basis::computational(d)];
    all.extend(bases);
    MubSet::new_unchecked(all)
}

fn check_size(d: usize) -> Result<()> {
    match d.checked_mul(d).and_then(|x| x.checked_mul(d + 1)) {
        Some(n) if n <= MAX_ENTRIES => Ok(()),
        _ => Err(Error::Size(format!("a complete MUB set in d = {d} exceeds {MAX_ENTRIES} entries"))),
    }
}

fn basis_from_amplitudes(vectors: Vec<Vec<C64>>) -> Basis {
    let states = vectors
        .into_iter()
        .map(|v| PureState::normalized(v).expect("non-zero construction vector"))
        .collect();
    Basis::new_unchecked(states).expect("square construction")
}

fn pauli_bases() -> Vec<Basis> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    vec![
        basis_from_amplitudes(vec![vec![re(h), re(h)], vec![re(h), re(-h)]]),
        basis_from_amplitudes(vec![vec![re(h), im(h)], vec![re(h), im(-h)]]),
    ]
}

fn d4_bases() -> Vec<Basis> {
    let unit = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
    D4_PHASES
        .iter()
        .map(|basis| {
            basis_from_amplitudes(
                basis
                    .iter()
                    .map(|v| v.iter().map(|&e| unit[e as usize] * 0.5).collect())
                    .collect(),
            )
        })
        .collect()
}

/// `ω^{k j² + i j} / √p` without field tables, for any odd prime `p`.
fn prime_bases(p: usize) -> Vec<Basis> {
    let norm = 1.0 / (p as f64).sqrt();
    (0..p)
        .map(|k| {
            basis_from_amplitudes(
                (0..p)
                    .map(|i| {
                        (0..p)
                            .map(|j| {
                                let e = (k * j % p * j + i * j) % p;
                                root_of_unity(e as i64, p) * norm
                            })
                            .collect()
                    })
                    .collect(),
            )
        })
        .collect()
}

fn field_bases(p: u64, n: u32) -> Result<Vec<Basis>> {
    let f = gf_build(p, n).map_err(|_| Error::UnsupportedDimension { d: p.pow(n) as usize })?;
    let q = f.order();
    let p = p as usize;
    let norm = 1.0 / (q as f64).sqrt();
    let squares: Vec<usize> = (0..q).map(|j| f.mul(j, j)).collect();
    Ok((0..q)
        .map(|a| {
            basis_from_amplitudes(
                (0..q)
                    .map(|b| {
                        (0..q)
                            .map(|j| {
                                let arg = f.add(f.mul(a, squares[j]), f.mul(b, j));
                                root_of_unity(f.trace(arg) as i64, p) * norm
                            })
                            .collect()
                    })
                    .collect(),
            )
        })
        .collect())
}

/// Computational basis and its discrete Fourier transform
/// `|i⟩ = Σ_k ω^{ki}|k⟩ / √d`, unbiased in every dimension `d ≥ 2`.
pub fn fourier_pair(d: usize) -> Result<MubSet> {
    if d < 2 {
        return Err(Error::domain("fourier_pair needs d >= 2"));
    }
    let norm = 1.0 / (d as f64).sqrt();
    let dft = basis_from_amplitudes(
        (0..d)
            .map(|i| (0..d).map(|k| root_of_unity((k * i % d) as i64, d) * norm).collect())
            .collect(),
    );
    MubSet::new_unchecked(vec![Basis::computational(d), dft])
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d2_matches_the_pauli_eigenbases() {
        let set = construct_mub_set(2).unwrap();
        assert_eq!(set.len(), 3);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let x = set.basis(1);
        assert!((x.vector(1).amplitudes()[1] - C64::new(-h, 0.0)).norm() < 1e-15);
        let y = set.basis(2);
        assert!((y.vector(0).amplitudes()[1] - C64::new(0.0, h)).norm() < 1e-15);
        assert!(set.verify(1e-12).unwrap().pass);
    }

    #[test]
    fn d3_cross_overlaps_are_one_third() {
        let set = construct_mub_set(3).unwrap();
        assert_eq!(set.len(), 4);
        let mut count = 0;
        for k in 0..4 {
            for l in k + 1..4 {
                for u in set.basis(k).vectors() {
                    for v in set.basis(l).vectors() {
                        assert!((u.inner(v).norm_sqr() - 1.0 / 3.0).abs() < 1e-12);
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(count, 54);
    }

    #[test]
    fn complete_sets_verify() {
        for d in [2, 3, 4, 5, 7, 9, 11, 13, 25, 27] {
            let set = construct_mub_set(d).unwrap();
            assert_eq!(set.len(), d + 1);
            let r = set.verify(1e-10).unwrap();
            assert!(r.pass, "d = {d}: {}", r.summary());
        }
    }

    #[test]
    fn larger_prime_powers_build() {
        for d in [49, 81, 121, 125, 169] {
            let set = construct_mub_set(d).unwrap();
            assert_eq!(set.len(), d + 1);
            // spot-check a few pairs; the full sweep is O(d^5)
            let sub = MubSet::new_unchecked(vec![
                set.basis(0).clone(),
                set.basis(1).clone(),
                set.basis(d / 2).clone(),
                set.basis(d).clone(),
            ])
            .unwrap();
            assert!(sub.verify(1e-10).unwrap().pass, "d = {d}");
        }
    }

    #[test]
    fn unsupported_dimensions() {
        for d in [0, 1, 6, 8, 10, 12, 16, 243] {
            assert!(
                matches!(construct_mub_set(d), Err(Error::UnsupportedDimension { .. })),
                "d = {d}"
            );
        }
        let msg = construct_mub_set(6).unwrap_err().to_string();
        assert!(msg.contains("Fourier pair"));
    }

    #[test]
    fn fourier_pairs() {
        let six = fourier_pair(6).unwrap();
        assert!(six.verify(1e-12).unwrap().pass);
        for u in six.basis(0).vectors() {
            for v in six.basis(1).vectors() {
                assert!((u.inner(v).norm_sqr() - 1.0 / 6.0).abs() < 1e-12);
            }
        }
        let two = fourier_pair(2).unwrap();
        assert_eq!(two, construct_mub_set(2).unwrap().take(2).unwrap());
        assert!(fourier_pair(3).unwrap().verify(1e-10).unwrap().pass);
        assert!(fourier_pair(1).is_err());
    }

    #[test]
    fn prime_construction_agrees_with_field_tables() {
        // n = 1 field tables reduce to the direct formula
        let direct = prime_bases(7);
        let tabled = field_bases(7, 1).unwrap();
        for (a, b) in direct.iter().zip(&tabled) {
            for (u, v) in a.vectors().iter().zip(b.vectors()) {
                assert!(u.same_ray(v, 1e-12));
            }
        }
    }
}
