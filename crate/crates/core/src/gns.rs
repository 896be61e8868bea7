//! Kernel on the tensor algebra of letter words and the Kolmogorov/GNS
//! reconstruction of the noise space.
//!
//! A word is a triple (u-list, v-list, ε-list). Its embedding reduces to a
//! combination of single letters,
//!
//!   η(u̲,v̲,ε̲) = Σ_i (−1)^{ε_i} Π_{k≠i} ⟨u_k,v_k⟩ · η(u_i,v_i),
//!
//! and on single letters the kernel has the closed generator form
//!
//!   K(u,v; p,w) = ⟨p, 𝓛(|w⟩⟨v|) u⟩ − conj(⟨u,v⟩)⟨p, Gw⟩ − conj(⟨u,Gv⟩)⟨p,w⟩,
//!
//! which is positive definite. Diagonalizing the Gram matrix over all basis
//! pair letters recovers the noise dimension, the coupling operators up to a
//! unitary gauge, and the Hamiltonian through iH = G + ½ Σ L_j†L_j.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, singular_values};
use crate::operator::{C64, HVector, I, ONE, Operator, ZERO};
use crate::semigroup::SemigroupData;

/// Element (u̲, v̲, ε̲) of the word algebra: three lists of equal length n,
/// all vectors on the initial space.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorWord {
    us: Vec<HVector>,
    vs: Vec<HVector>,
    eps: Vec<u8>,
}

impl TensorWord {
    pub fn new(us: Vec<HVector>, vs: Vec<HVector>, eps: Vec<u8>) -> Result<TensorWord> {
        if us.is_empty() || us.len() != vs.len() || us.len() != eps.len() {
            return Err(Error::InvalidConfig(format!(
                "word lists must share a positive length, got {}/{}/{}",
                us.len(),
                vs.len(),
                eps.len()
            )));
        }
        let dim = us[0].dim();
        for x in us.iter().chain(vs.iter()) {
            if x.dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "TensorWord",
                    expected: format!("dim {}", dim),
                    actual: format!("dim {}", x.dim()),
                });
            }
        }
        if eps.iter().any(|&e| e > 1) {
            return Err(Error::InvalidConfig("ε bits must be 0 or 1".into()));
        }
        Ok(TensorWord { us, vs, eps })
    }

    pub fn letter(u: HVector, v: HVector) -> TensorWord {
        TensorWord {
            us: vec![u],
            vs: vec![v],
            eps: vec![0],
        }
    }

    pub fn letter_eps(u: HVector, v: HVector, eps: u8) -> TensorWord {
        TensorWord {
            us: vec![u],
            vs: vec![v],
            eps: vec![eps],
        }
    }

    /// Number of letters; always at least one.
    pub fn len(&self) -> usize {
        self.us.len()
    }

    pub fn dim_h(&self) -> usize {
        self.us[0].dim()
    }

    pub fn us(&self) -> &[HVector] {
        &self.us
    }

    pub fn vs(&self) -> &[HVector] {
        &self.vs
    }

    pub fn eps(&self) -> &[u8] {
        &self.eps
    }

    /// Word product: concatenation of letters, ε-lists appended.
    pub fn product(&self, other: &TensorWord) -> TensorWord {
        let mut us = self.us.clone();
        us.extend(other.us.iter().cloned());
        let mut vs = self.vs.clone();
        vs.extend(other.vs.iter().cloned());
        let mut eps = self.eps.clone();
        eps.extend(other.eps.iter().cloned());
        TensorWord { us, vs, eps }
    }

    /// Involution: swap and reverse the vector lists, ε ↦ 1 + reverse(ε).
    pub fn involution(&self) -> TensorWord {
        let us: Vec<HVector> = self.vs.iter().rev().cloned().collect();
        let vs: Vec<HVector> = self.us.iter().rev().cloned().collect();
        let eps: Vec<u8> = self.eps.iter().rev().map(|e| 1 - e).collect();
        TensorWord { us, vs, eps }
    }

    /// Π_i ⟨u_i, v_i⟩, the scalar content of the word.
    pub fn content_inner(&self) -> C64 {
        self.us
            .iter()
            .zip(&self.vs)
            .map(|(u, v)| u.inner(v))
            .fold(ONE, |acc, x| acc * x)
    }
}

/// Reduction of a word to signed single letters: term i carries coefficient
/// (−1)^{ε_i} · Π_{k≠i} ⟨u_k, v_k⟩. Exactly-zero terms are dropped.
pub fn eta_reduce(word: &TensorWord) -> Vec<(C64, HVector, HVector)> {
    let n = word.len();
    let inners: Vec<C64> = word
        .us
        .iter()
        .zip(&word.vs)
        .map(|(u, v)| u.inner(v))
        .collect();
    let mut terms = Vec::with_capacity(n);
    for i in 0..n {
        let mut coeff = if word.eps[i] == 0 { ONE } else { -ONE };
        for (k, inner) in inners.iter().enumerate() {
            if k != i {
                coeff *= inner;
            }
        }
        if coeff != ZERO {
            terms.push((coeff, word.us[i].clone(), word.vs[i].clone()));
        }
    }
    terms
}

/// Single-letter kernel in generator form.
pub fn kernel_pair(
    data: &SemigroupData,
    u: &HVector,
    v: &HVector,
    p: &HVector,
    w: &HVector,
) -> Result<C64> {
    let dim = data.dim_h();
    for x in [u, v, p, w] {
        if x.dim() != dim {
            return Err(Error::DimensionMismatch {
                context: "kernel_pair",
                expected: format!("dim {}", dim),
                actual: format!("dim {}", x.dim()),
            });
        }
    }
    let g = data.g();
    let lw = data.lindblad_apply(&Operator::outer(w, v));
    Ok(p.inner(&lw.apply(u))
        - u.inner(v).conj() * p.inner(&g.apply(w))
        - u.inner(&g.apply(v)).conj() * p.inner(w))
}

/// Kernel on words via reduction and sesquilinear expansion, anti-linear in
/// the first argument.
pub fn kernel_word(data: &SemigroupData, w1: &TensorWord, w2: &TensorWord) -> Result<C64> {
    let left = eta_reduce(w1);
    let right = eta_reduce(w2);
    let mut acc = ZERO;
    for (c1, u, v) in &left {
        for (c2, p, w) in &right {
            acc += c1.conj() * c2 * kernel_pair(data, u, v, p, w)?;
        }
    }
    Ok(acc)
}

/// Formal linear combination of words.
#[derive(Debug, Clone, Default)]
pub struct WordCombo(pub Vec<(C64, TensorWord)>);

impl WordCombo {
    pub fn singleton(word: TensorWord) -> WordCombo {
        WordCombo(vec![(ONE, word)])
    }

    pub fn scale(&self, c: C64) -> WordCombo {
        WordCombo(self.0.iter().map(|(a, w)| (a * c, w.clone())).collect())
    }

    pub fn sub(&self, other: &WordCombo) -> WordCombo {
        let mut terms = self.0.clone();
        terms.extend(other.0.iter().map(|(a, w)| (-a, w.clone())));
        WordCombo(terms)
    }
}

/// Kernel inner product of two combinations.
pub fn kernel_combo(data: &SemigroupData, a: &WordCombo, b: &WordCombo) -> Result<C64> {
    let mut acc = ZERO;
    for (ca, wa) in &a.0 {
        for (cb, wb) in &b.0 {
            acc += ca.conj() * cb * kernel_word(data, wa, wb)?;
        }
    }
    Ok(acc)
}

/// Kernel-induced seminorm of a combination.
pub fn kernel_norm(data: &SemigroupData, a: &WordCombo) -> Result<f64> {
    Ok(kernel_combo(data, a, a)?.re.max(0.0).sqrt())
}

/// Representation action on a combination of embedded words:
/// π(word)·η(t) = η(word·t) − ⟨t.u̲, t.v̲⟩·η(word), extended linearly.
/// In kernel norm this always equals ⟨u̲,v̲⟩·η(t) (the representation is
/// trivial); tests compare both routes.
pub fn pi_apply(word: &TensorWord, target: &WordCombo) -> WordCombo {
    let mut terms = Vec::with_capacity(2 * target.0.len());
    for (c, t) in &target.0 {
        terms.push((*c, word.product(t)));
        terms.push((-c * t.content_inner(), word.clone()));
    }
    WordCombo(terms)
}

/// Words together with their Hermitian kernel Gram matrix.
#[derive(Debug, Clone)]
pub struct GramSample {
    pub words: Vec<TensorWord>,
    pub gram: Operator,
}

impl GramSample {
    pub fn min_eigenvalue(&self) -> Result<f64> {
        crate::linalg::min_hermitian_eigenvalue(&self.gram)
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.gram.hermitian_defect()
    }
}

pub fn gram_matrix(data: &SemigroupData, words: &[TensorWord]) -> Result<GramSample> {
    if words.is_empty() {
        return Err(Error::InvalidConfig("gram_matrix needs at least one word".into()));
    }
    let n = words.len();
    let mut gram = Operator::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            gram.set(i, j, kernel_word(data, &words[i], &words[j])?);
        }
    }
    Ok(GramSample {
        words: words.to_vec(),
        gram,
    })
}

/// Output of the Kolmogorov construction over all basis-pair letters.
#[derive(Debug, Clone)]
pub struct GnsResult {
    /// Reconstructed noise dimension (count of retained Gram eigenvalues).
    pub d_rec: usize,
    /// Coordinates of η(e_a, e_b) in the reconstructed basis, indexed by
    /// a·dim_h + b; each entry has length d_rec.
    pub eta_table: Vec<Vec<C64>>,
    /// Recovered couplings, L_j[a,b] = (eta_table[a·dim+b])_j.
    pub l_rec: Vec<Operator>,
    /// Recovered Hamiltonian, −i(G + ½ Σ L_j†L_j).
    pub h_rec: Operator,
    /// Relative rank cutoff that was used.
    pub tol_rank: f64,
    /// Gram eigenvalues in decreasing order.
    pub eigenvalues: Vec<f64>,
    /// ‖Gram(reconstructed η) − Gram‖_F, the isometry defect.
    pub isometry_defect: f64,
    /// Smallest singular value of the stacked L coefficient matrix
    /// (linear independence witness); zero when d_rec = 0.
    pub independence_sigma_min: f64,
    /// Degeneracy warnings: eigenvalues within a factor of 10 of the cutoff.
    pub warnings: Vec<String>,
}

/// Kolmogorov/GNS reconstruction from the observable semigroup data.
///
/// The sample set is fixed to all dim_h² canonical basis-pair letters.
/// Eigenvalues above `tol_rank`·λ_max are retained; η coordinates are the
/// √λ-scaled eigenvector rows. An empty spectrum yields d_rec = 0.
pub fn gns_construct(data: &SemigroupData, tol_rank: f64) -> Result<GnsResult> {
    if !(tol_rank > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "tol_rank must be positive, got {}",
            tol_rank
        )));
    }
    let dim = data.dim_h();
    let mut words = Vec::with_capacity(dim * dim);
    for a in 0..dim {
        for b in 0..dim {
            words.push(TensorWord::letter(HVector::basis(dim, a), HVector::basis(dim, b)));
        }
    }
    let sample = gram_matrix(data, &words)?;
    let (eigenvalues, vectors) = hermitian_eigen(&sample.gram)?;

    let lambda_max = eigenvalues.first().copied().unwrap_or(0.0);
    let floor = 1e-12 * sample.gram.frobenius_norm().max(1.0);
    let cutoff = tol_rank * lambda_max;
    let mut warnings = Vec::new();
    let d_rec = if lambda_max <= floor {
        0
    } else {
        for &lam in &eigenvalues {
            if lam > floor && lam >= cutoff / 10.0 && lam <= cutoff * 10.0 {
                warnings.push(format!(
                    "eigenvalue {:.3e} lies within a factor of 10 of the rank cutoff {:.3e}",
                    lam, cutoff
                ));
            }
        }
        eigenvalues.iter().filter(|&&lam| lam > cutoff).count()
    };

    let n_words = dim * dim;
    let mut eta_table = vec![vec![ZERO; d_rec]; n_words];
    for (j, &lam) in eigenvalues.iter().take(d_rec).enumerate() {
        let scale = lam.max(0.0).sqrt();
        for w in 0..n_words {
            eta_table[w][j] = vectors.get(w, j).conj() * scale;
        }
    }

    let mut l_rec = Vec::with_capacity(d_rec);
    for j in 0..d_rec {
        let mut l = Operator::zeros(dim, dim);
        for a in 0..dim {
            for b in 0..dim {
                l.set(a, b, eta_table[a * dim + b][j]);
            }
        }
        l_rec.push(l);
    }

    let mut h_rec = data.g().clone();
    for l in &l_rec {
        h_rec = h_rec.add(&l.adjoint().mul(l).scale(C64::new(0.5, 0.0)));
    }
    let h_rec = h_rec.scale(-I);

    // Isometry of the embedding: the coordinate Gram must reproduce the
    // kernel Gram.
    let mut isometry_defect = 0.0_f64;
    for i in 0..n_words {
        for j in 0..n_words {
            let mut dot = ZERO;
            for k in 0..d_rec {
                dot += eta_table[i][k].conj() * eta_table[j][k];
            }
            isometry_defect += (dot - sample.gram.get(i, j)).norm_sqr();
        }
    }
    let isometry_defect = isometry_defect.sqrt();

    let independence_sigma_min = if d_rec == 0 {
        0.0
    } else {
        let mut stacked = Operator::zeros(d_rec, dim * dim);
        for (j, l) in l_rec.iter().enumerate() {
            for (k, &value) in l.entries().iter().enumerate() {
                stacked.set(j, k, value);
            }
        }
        singular_values(&stacked)?.last().copied().unwrap_or(0.0)
    };

    Ok(GnsResult {
        d_rec,
        eta_table,
        l_rec,
        h_rec,
        tol_rank,
        eigenvalues,
        isometry_defect,
        independence_sigma_min,
        warnings,
    })
}

pub const DEFAULT_TOL_RANK: f64 = 1e-9;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelSpec, Preset};
    use crate::random;
    use crate::semigroup::build_g;
    use rand::Rng;

    fn data_for(preset: Preset) -> SemigroupData {
        SemigroupData::from_model(&preset.build(42))
    }

    fn coupling_kernel(model: &ModelSpec, u: &HVector, v: &HVector, p: &HVector, w: &HVector) -> C64 {
        model
            .couplings()
            .iter()
            .map(|l| u.inner(&l.apply(v)).conj() * p.inner(&l.apply(w)))
            .sum()
    }

    #[test]
    fn involution_is_involutive() {
        let mut rng = random::seeded_rng(211);
        let word = TensorWord::new(
            (0..3).map(|_| random::random_vector(&mut rng, 2)).collect(),
            (0..3).map(|_| random::random_vector(&mut rng, 2)).collect(),
            vec![0, 1, 1],
        )
        .unwrap();
        assert_eq!(word.involution().involution(), word);
        // Spot-check the bit rule on this word: ε* = 1 + reverse(ε).
        assert_eq!(word.involution().eps(), &[0, 0, 1]);
    }

    #[test]
    fn involution_is_antimultiplicative() {
        let mut rng = random::seeded_rng(213);
        let w1 = TensorWord::new(
            vec![random::random_vector(&mut rng, 2)],
            vec![random::random_vector(&mut rng, 2)],
            vec![1],
        )
        .unwrap();
        let w2 = TensorWord::new(
            (0..2).map(|_| random::random_vector(&mut rng, 2)).collect(),
            (0..2).map(|_| random::random_vector(&mut rng, 2)).collect(),
            vec![0, 1],
        )
        .unwrap();
        assert_eq!(
            w1.product(&w2).involution(),
            w2.involution().product(&w1.involution())
        );
    }

    #[test]
    fn reduce_single_letters() {
        let u = HVector::basis(2, 0);
        let v = HVector::basis(2, 1);
        let plain = eta_reduce(&TensorWord::letter_eps(u.clone(), v.clone(), 0));
        assert_eq!(plain.len(), 1);
        assert_eq!(plain[0].0, ONE);
        let starred = eta_reduce(&TensorWord::letter_eps(u, v, 1));
        assert_eq!(starred[0].0, -ONE);
    }

    #[test]
    fn reduce_drops_zero_coefficient_terms() {
        let e0 = HVector::basis(2, 0);
        let e1 = HVector::basis(2, 1);
        // Second letter has ⟨u₂,v₂⟩ = 0, so only its own term survives.
        let word = TensorWord::new(
            vec![e0.clone(), e0.clone()],
            vec![e0.clone(), e1.clone()],
            vec![0, 1],
        )
        .unwrap();
        let terms = eta_reduce(&word);
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0, -ONE); // (−1)^{ε₂}·⟨u₁,v₁⟩ = −1
        assert_eq!(terms[0].1, e0);
        assert_eq!(terms[0].2, e1);
    }

    #[test]
    fn kernel_vanishes_on_zero_letter_content() {
        let data = data_for(Preset::AmplitudeDamping);
        let u = HVector::basis(2, 0);
        let zero = HVector::zeros(2);
        let k = kernel_pair(&data, &u, &zero, &u, &u).unwrap();
        assert!(k.norm() < 1e-15);
    }

    #[test]
    fn kernel_of_amplitude_damping_letters() {
        let data = data_for(Preset::AmplitudeDamping);
        let e0 = HVector::basis(2, 0);
        let e1 = HVector::basis(2, 1);
        let diagonal = kernel_pair(&data, &e0, &e1, &e0, &e1).unwrap();
        assert!((diagonal - ONE).norm() < 1e-13);
        let cross = kernel_pair(&data, &e0, &e1, &e1, &e0).unwrap();
        assert!(cross.norm() < 1e-13);
    }

    #[test]
    fn kernel_two_formula_equality() {
        let mut rng = random::seeded_rng(223);
        let model = random::random_model(&mut rng, 3, 2);
        let data = SemigroupData::from_model(&model);
        for _ in 0..100 {
            let u = random::random_unit_vector(&mut rng, 3);
            let v = random::random_unit_vector(&mut rng, 3);
            let p = random::random_unit_vector(&mut rng, 3);
            let w = random::random_unit_vector(&mut rng, 3);
            let generator = kernel_pair(&data, &u, &v, &p, &w).unwrap();
            let couplings = coupling_kernel(&model, &u, &v, &p, &w);
            assert!((generator - couplings).norm() < 1e-10);
        }
    }

    #[test]
    fn kernel_is_hermitian_symmetric() {
        let mut rng = random::seeded_rng(227);
        let data = data_for(Preset::QutritRandom);
        for _ in 0..25 {
            let u = random::random_unit_vector(&mut rng, 3);
            let v = random::random_unit_vector(&mut rng, 3);
            let p = random::random_unit_vector(&mut rng, 3);
            let w = random::random_unit_vector(&mut rng, 3);
            let kf = kernel_pair(&data, &u, &v, &p, &w).unwrap();
            let kb = kernel_pair(&data, &p, &w, &u, &v).unwrap();
            assert!((kf - kb.conj()).norm() < 1e-12);
            let diag = kernel_pair(&data, &u, &v, &u, &v).unwrap();
            assert!(diag.re >= -1e-12 && diag.im.abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_gauge_covariance() {
        let mut rng = random::seeded_rng(229);
        let model = random::random_model(&mut rng, 3, 2);
        let w_gauge = random::random_unitary(&mut rng, 2);
        let gauged = model.gauged(&w_gauge).unwrap();
        let data = SemigroupData::from_model(&model);
        let data_gauged = SemigroupData::from_model(&gauged);
        for _ in 0..25 {
            let u = random::random_unit_vector(&mut rng, 3);
            let v = random::random_unit_vector(&mut rng, 3);
            let p = random::random_unit_vector(&mut rng, 3);
            let w = random::random_unit_vector(&mut rng, 3);
            let a = kernel_pair(&data, &u, &v, &p, &w).unwrap();
            let b = kernel_pair(&data_gauged, &u, &v, &p, &w).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn word_kernel_reduces_to_letter_kernel() {
        let mut rng = random::seeded_rng(233);
        let data = data_for(Preset::QutritRandom);
        let u = random::random_unit_vector(&mut rng, 3);
        let v = random::random_unit_vector(&mut rng, 3);
        let p = random::random_unit_vector(&mut rng, 3);
        let w = random::random_unit_vector(&mut rng, 3);
        let w1 = TensorWord::letter(u.clone(), v.clone());
        let w2 = TensorWord::letter(p.clone(), w.clone());
        let via_word = kernel_word(&data, &w1, &w2).unwrap();
        let via_pair = kernel_pair(&data, &u, &v, &p, &w).unwrap();
        assert!((via_word - via_pair).norm() < 1e-14);
    }

    #[test]
    fn starring_a_letter_negates_the_kernel() {
        // η(u,v,1) = −η(u,v,0), observed through kernel values against an
        // arbitrary second word.
        let mut rng = random::seeded_rng(239);
        let data = data_for(Preset::QutritRandom);
        let u = random::random_unit_vector(&mut rng, 3);
        let v = random::random_unit_vector(&mut rng, 3);
        let w2 = TensorWord::new(
            (0..2).map(|_| random::random_unit_vector(&mut rng, 3)).collect(),
            (0..2).map(|_| random::random_unit_vector(&mut rng, 3)).collect(),
            vec![0, 1],
        )
        .unwrap();
        let plain = TensorWord::letter_eps(u.clone(), v.clone(), 0);
        let starred = TensorWord::letter_eps(u, v, 1);
        let k_plain = kernel_word(&data, &plain, &w2).unwrap();
        let k_starred = kernel_word(&data, &starred, &w2).unwrap();
        assert!((k_plain + k_starred).norm() < 1e-12);
        // Same rule in the other argument, and on the diagonal.
        let d_plain = kernel_word(&data, &w2, &plain).unwrap();
        let d_starred = kernel_word(&data, &w2, &starred).unwrap();
        assert!((d_plain + d_starred).norm() < 1e-12);
    }

    #[test]
    fn two_letter_kernel_matches_explicit_expansion() {
        let mut rng = random::seeded_rng(241);
        let data = data_for(Preset::QutritRandom);
        let vecs: Vec<HVector> = (0..8).map(|_| random::random_unit_vector(&mut rng, 3)).collect();
        let w1 = TensorWord::new(
            vec![vecs[0].clone(), vecs[1].clone()],
            vec![vecs[2].clone(), vecs[3].clone()],
            vec![0, 1],
        )
        .unwrap();
        let w2 = TensorWord::new(
            vec![vecs[4].clone(), vecs[5].clone()],
            vec![vecs[6].clone(), vecs[7].clone()],
            vec![1, 0],
        )
        .unwrap();
        // Brute-force four-term expansion of the reduction formula.
        let mut expect = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                let ci = if w1.eps[i] == 0 { ONE } else { -ONE }
                    * w1.us[1 - i].inner(&w1.vs[1 - i]);
                let cj = if w2.eps[j] == 0 { ONE } else { -ONE }
                    * w2.us[1 - j].inner(&w2.vs[1 - j]);
                expect += ci.conj()
                    * cj
                    * kernel_pair(&data, &w1.us[i], &w1.vs[i], &w2.us[j], &w2.vs[j]).unwrap();
            }
        }
        let got = kernel_word(&data, &w1, &w2).unwrap();
        assert!((got - expect).norm() < 1e-12);
    }

    #[test]
    fn gram_of_trivial_model_is_zero() {
        let model = ModelSpec::new(Operator::zeros(2, 2), vec![]).unwrap();
        let data = SemigroupData::from_model(&model);
        let words = vec![
            TensorWord::letter(HVector::basis(2, 0), HVector::basis(2, 1)),
            TensorWord::letter(HVector::basis(2, 1), HVector::basis(2, 0)),
        ];
        let sample = gram_matrix(&data, &words).unwrap();
        assert!(sample.gram.frobenius_norm() < 1e-14);
    }

    #[test]
    fn gram_of_amplitude_damping_is_rank_one() {
        let data = data_for(Preset::AmplitudeDamping);
        let mut words = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                words.push(TensorWord::letter(HVector::basis(2, a), HVector::basis(2, b)));
            }
        }
        let sample = gram_matrix(&data, &words).unwrap();
        let (vals, _) = hermitian_eigen(&sample.gram).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        for &v in &vals[1..] {
            assert!(v.abs() < 1e-12);
        }
        // The mass sits on the basis-pair word (e0, e1).
        assert!((sample.gram.get(1, 1) - ONE).norm() < 1e-12);
    }

    #[test]
    fn gram_is_positive_semidefinite_on_mixed_words() {
        let mut rng = random::seeded_rng(251);
        let data = data_for(Preset::QutritRandom);
        for _ in 0..10 {
            let words: Vec<TensorWord> = (0..4)
                .map(|_| {
                    let n = rng.gen_range(1..=3usize);
                    TensorWord::new(
                        (0..n).map(|_| random::random_unit_vector(&mut rng, 3)).collect(),
                        (0..n).map(|_| random::random_unit_vector(&mut rng, 3)).collect(),
                        (0..n).map(|_| rng.gen_range(0..=1u8)).collect(),
                    )
                    .unwrap()
                })
                .collect();
            let sample = gram_matrix(&data, &words).unwrap();
            assert!(sample.hermitian_defect() < 1e-12);
            assert!(sample.min_eigenvalue().unwrap() >= -1e-10);
        }
    }

    #[test]
    fn gns_of_trivial_model_recovers_hamiltonian() {
        let h = crate::model::sigma_z();
        let model = ModelSpec::new(h.clone(), vec![]).unwrap();
        let result = gns_construct(&SemigroupData::from_model(&model), DEFAULT_TOL_RANK).unwrap();
        assert_eq!(result.d_rec, 0);
        assert!(result.h_rec.sub(&h).frobenius_norm() < 1e-12);
        assert!(result.warnings.is_empty());
    }

    #[test]
    fn gns_of_amplitude_damping_recovers_coupling_up_to_phase() {
        let model = Preset::AmplitudeDamping.build(0);
        let result = gns_construct(&SemigroupData::from_model(&model), DEFAULT_TOL_RANK).unwrap();
        assert_eq!(result.d_rec, 1);
        let l = &result.l_rec[0];
        // e^{iθ}σ₋: the only nonzero entry sits at (0,1) with unit modulus.
        assert!((l.get(0, 1).norm() - 1.0).abs() < 1e-10);
        assert!(l.get(0, 0).norm() < 1e-10);
        assert!(l.get(1, 0).norm() < 1e-10);
        assert!(l.get(1, 1).norm() < 1e-10);
        assert!(result.h_rec.frobenius_norm() < 1e-10);
        assert!(result.isometry_defect < 1e-10);
    }

    #[test]
    fn gns_recovers_rank_and_identities_for_random_model() {
        let model = Preset::QutritRandom.build(42);
        let data = SemigroupData::from_model(&model);
        let result = gns_construct(&data, DEFAULT_TOL_RANK).unwrap();
        assert_eq!(result.d_rec, 2);
        assert!(result.h_rec.hermitian_defect() < 1e-10);
        assert!(result.isometry_defect < 1e-10);
        assert!(result.independence_sigma_min > DEFAULT_TOL_RANK);
        // Σ L_rec†L_rec = −(G + G†).
        let g = build_g(&model);
        let mut lsum = Operator::zeros(3, 3);
        for l in &result.l_rec {
            lsum = lsum.add(&l.adjoint().mul(l));
        }
        assert!(lsum.add(&g.add(&g.adjoint())).frobenius_norm() < 1e-10);
    }

    #[test]
    fn gns_rejects_nonpositive_cutoff() {
        let data = data_for(Preset::AmplitudeDamping);
        assert!(gns_construct(&data, 0.0).is_err());
    }

    #[test]
    fn gns_warns_near_the_rank_cutoff() {
        // Second coupling scaled so its Gram eigenvalue (9e-10 of the top
        // one) sits just below the relative cutoff of 1e-9: it is dropped
        // but flagged as degenerate.
        let tiny = crate::model::sigma_z().scale(C64::new(3e-5 / 2f64.sqrt(), 0.0));
        let model = ModelSpec::new(
            Operator::zeros(2, 2),
            vec![crate::model::sigma_minus(), tiny],
        )
        .unwrap();
        let result = gns_construct(&SemigroupData::from_model(&model), DEFAULT_TOL_RANK).unwrap();
        assert_eq!(result.d_rec, 1);
        assert!(
            !result.warnings.is_empty(),
            "expected a degeneracy warning, eigenvalues {:?}",
            result.eigenvalues
        );
    }

    #[test]
    fn pi_action_is_trivial_in_kernel_norm() {
        let mut rng = random::seeded_rng(257);
        let data = data_for(Preset::QutritRandom);
        let word = TensorWord::new(
            vec![random::random_unit_vector(&mut rng, 3); 2],
            vec![random::random_unit_vector(&mut rng, 3); 2],
            vec![0, 1],
        )
        .unwrap();
        let target = WordCombo::singleton(TensorWord::letter(
            random::random_unit_vector(&mut rng, 3),
            random::random_unit_vector(&mut rng, 3),
        ));
        let defining = pi_apply(&word, &target);
        let trivial = target.scale(word.content_inner());
        let defect = kernel_norm(&data, &defining.sub(&trivial)).unwrap();
        assert!(defect < 1e-12, "defect {}", defect);
    }

    #[test]
    fn pi_action_annihilates_zero_content_words() {
        let data = data_for(Preset::QutritRandom);
        let word = TensorWord::letter(HVector::basis(3, 0), HVector::basis(3, 1));
        // ⟨u̲,v̲⟩ = 0, so the action sends embedded words to kernel-norm zero.
        let target = WordCombo::singleton(TensorWord::letter(
            HVector::basis(3, 0),
            HVector::basis(3, 2),
        ));
        let out = pi_apply(&word, &target);
        assert!(kernel_norm(&data, &out).unwrap() < 1e-12);
    }

    #[test]
    fn single_letter_splitting_rule() {
        // η(u⊗p, v⊗w, ε⊕ε′) = ⟨p,w⟩η(u,v,ε) + ⟨u,v⟩η(p,w,ε′) in kernel norm.
        let mut rng = random::seeded_rng(263);
        let data = data_for(Preset::QutritRandom);
        let u = random::random_unit_vector(&mut rng, 3);
        let v = random::random_unit_vector(&mut rng, 3);
        let p = random::random_unit_vector(&mut rng, 3);
        let w = random::random_unit_vector(&mut rng, 3);
        let joint = TensorWord::new(
            vec![u.clone(), p.clone()],
            vec![v.clone(), w.clone()],
            vec![0, 1],
        )
        .unwrap();
        let first = TensorWord::letter_eps(u.clone(), v.clone(), 0);
        let second = TensorWord::letter_eps(p.clone(), w.clone(), 1);
        let rhs = WordCombo(vec![
            (p.inner(&w), first),
            (u.inner(&v), second),
        ]);
        let defect = kernel_norm(&data, &WordCombo::singleton(joint).sub(&rhs)).unwrap();
        assert!(defect < 1e-12);
    }

    #[test]
    fn pi_is_multiplicative_in_kernel_norm() {
        let mut rng = random::seeded_rng(269);
        let data = data_for(Preset::QutritRandom);
        let rand_word = |rng: &mut rand_chacha::ChaCha8Rng, n: usize| {
            TensorWord::new(
                (0..n).map(|_| random::random_unit_vector(rng, 3)).collect(),
                (0..n).map(|_| random::random_unit_vector(rng, 3)).collect(),
                (0..n).map(|_| rng.gen_range(0..=1u8)).collect(),
            )
            .unwrap()
        };
        let w1 = rand_word(&mut rng, 1);
        let w2 = rand_word(&mut rng, 2);
        let target = WordCombo::singleton(rand_word(&mut rng, 1));
        let sequential = pi_apply(&w1, &pi_apply(&w2, &target));
        let joint = pi_apply(&w1.product(&w2), &target);
        let defect = kernel_norm(&data, &sequential.sub(&joint)).unwrap();
        assert!(defect < 1e-12, "defect {}", defect);
    }
}
