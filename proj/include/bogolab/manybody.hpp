#pragma once

#include <array>
#include <string>
#include <vector>

#include "bogolab/common.hpp"
#include "bogolab/fock.hpp"
#include "bogolab/oneparticle.hpp"

namespace bogolab::manybody {

/// One normal-ordered monomial coeff * a+_{c0} a+_{c1} a_{a0} a_{a1}.
///
/// Two-body terms keep the slot order of the momentum-space interaction,
/// a+_{k+q} a+_{k'-q} a_{k'} a_k, so that creators = {k+q, k'-q} and
/// annihilators = {k', k}.
struct Term {
  cplx coeff{0.0, 0.0};
  std::array<int, 2> creators{-1, -1};
  std::array<int, 2> annihilators{-1, -1};
  int n_create = 0;
  int n_annihilate = 0;
};

/// Polynomial in ladder operators: scalar + sum of normal-ordered terms.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int mode_count) : modes_(mode_count) {}

  int mode_count() const { return modes_; }
  const std::vector<Term>& terms() const { return terms_; }
  cplx scalar() const { return scalar_; }

  void add_scalar(cplx v) { scalar_ += v; }
  void add_linear_create(int mode, cplx coeff);
  void add_linear_annihilate(int mode, cplx coeff);
  void add_one_body(int create, int annihilate, cplx coeff);
  void add_two_body(int c0, int c1, int a0, int a1, cplx coeff);
  void add(const Term& t) { terms_.push_back(t); }
  void append(const Polynomial& other, cplx factor = 1.0);

  bool conserves_number() const;

 private:
  int modes_ = 0;
  cplx scalar_{0.0, 0.0};
  std::vector<Term> terms_;
};

/// Applies one term to an occupation vector in place. Returns the amplitude,
/// zero when an annihilator hits an empty mode.
double apply_term(const Term& t, std::vector<int>& occupation);

/// Sparse matrix of the polynomial on a truncated basis (terms leaving the
/// truncated space are dropped). Uses the parallel column kernel.
fock::SparseMatrix to_matrix(const Polynomial& p, const fock::OccupationBasis& basis);

/// Gaussian pair interaction u^(q) = u0 exp(-q^2 sigma^2 / 2); bound gamma = |u0|.
struct InteractionKernel {
  double u0 = 0.0;
  double sigma = 1.0;
  double operator()(const Eigen::Vector3d& q) const;
  double bound() const { return std::abs(u0); }
};

struct HamiltonianParts {
  bool h0 = false;
  bool interaction = false;
  bool source = false;
};

/// Second-quantized Hamiltonian H0 - mu N + U (+ source) in the plane-wave
/// ladder basis.
struct ManyBodyHamiltonian {
  Polynomial terms;
  /// One-particle matrix h (without -mu) in the plane-wave basis.
  Eigen::MatrixXcd one_particle;
  double mu = 0.0;
  double volume = 1.0;
  HamiltonianParts parts;
  /// Sum over interaction quadruples discarded by the mode cutoff of |u^(q)| / 2V.
  double dropped_interaction = 0.0;

  int mode_count() const { return terms.mode_count(); }
};

/// One-particle coefficients sum_i U_ki E_i conj(U_k'i) - mu delta_kk'.
Polynomial h0_terms(const oneparticle::SchrodingerEigensystem& eigs, double mu);

struct InteractionTerms {
  Polynomial terms;
  double dropped = 0.0;
};

/// (1/2V) sum u^(q) a+_{k+q} a+_{k'-q} a_{k'} a_k restricted to the basis.
InteractionTerms interaction_terms(const InteractionKernel& kernel,
                                   const oneparticle::KineticBasis& kinetic);

ManyBodyHamiltonian assemble_h0(const oneparticle::SchrodingerEigensystem& eigs,
                                const fock::OccupationBasis& basis, double mu,
                                double volume);

fock::BosonOperator assemble_interaction(const InteractionKernel& kernel,
                                         const fock::BasisPtr& basis,
                                         const oneparticle::KineticBasis& kinetic);

ManyBodyHamiltonian with_interaction(ManyBodyHamiltonian h, const InteractionKernel& kernel,
                                     const oneparticle::KineticBasis& kinetic);

/// Adds sqrt(V) (conj(eta) a_k + eta a+_k).
ManyBodyHamiltonian add_source(ManyBodyHamiltonian h, int mode, cplx eta, double volume);

/// Full H(mu) = H0 - mu N + U for one disorder realization.
ManyBodyHamiltonian assemble_full(const oneparticle::KineticBasis& kinetic,
                                  const oneparticle::SchrodingerEigensystem& eigs,
                                  const InteractionKernel& kernel, double mu);

fock::BosonOperator to_operator(const ManyBodyHamiltonian& h, const fock::BasisPtr& basis);

/// Component `axis` of the lattice momentum sum_k k a+_k a_k.
fock::BosonOperator momentum_operator(const fock::BasisPtr& basis,
                                      const oneparticle::KineticBasis& kinetic, int axis);

}  // namespace bogolab::manybody
