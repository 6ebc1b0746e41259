#include "bogolab/manybody.hpp"

#include <cmath>
#include <map>

#include "bogolab/kernels.hpp"

namespace bogolab::manybody {

void Polynomial::add_linear_create(int mode, cplx coeff) {
  Term t;
  t.coeff = coeff;
  t.creators[0] = mode;
  t.n_create = 1;
  terms_.push_back(t);
}

void Polynomial::add_linear_annihilate(int mode, cplx coeff) {
  Term t;
  t.coeff = coeff;
  t.annihilators[0] = mode;
  t.n_annihilate = 1;
  terms_.push_back(t);
}

void Polynomial::add_one_body(int create, int annihilate, cplx coeff) {
  Term t;
  t.coeff = coeff;
  t.creators[0] = create;
  t.annihilators[0] = annihilate;
  t.n_create = t.n_annihilate = 1;
  terms_.push_back(t);
}

void Polynomial::add_two_body(int c0, int c1, int a0, int a1, cplx coeff) {
  Term t;
  t.coeff = coeff;
  t.creators = {c0, c1};
  t.annihilators = {a0, a1};
  t.n_create = t.n_annihilate = 2;
  terms_.push_back(t);
}

void Polynomial::append(const Polynomial& other, cplx factor) {
  if (modes_ == 0) modes_ = other.modes_;
  if (other.modes_ != modes_) throw ConfigError("polynomials act on different mode sets");
  scalar_ += factor * other.scalar_;
  for (Term t : other.terms_) {
    t.coeff *= factor;
    terms_.push_back(t);
  }
}

bool Polynomial::conserves_number() const {
  for (const auto& t : terms_)
    if (t.n_create != t.n_annihilate) return false;
  return true;
}

double apply_term(const Term& t, std::vector<int>& n) {
  double amp = 1.0;
  for (int i = t.n_annihilate - 1; i >= 0; --i) {
    int& v = n[t.annihilators[i]];
    if (v == 0) return 0.0;
    amp *= std::sqrt(static_cast<double>(v));
    --v;
  }
  for (int i = t.n_create - 1; i >= 0; --i) {
    int& v = n[t.creators[i]];
    ++v;
    amp *= std::sqrt(static_cast<double>(v));
  }
  return amp;
}

fock::SparseMatrix to_matrix(const Polynomial& p, const fock::OccupationBasis& basis) {
  if (p.mode_count() != basis.mode_count())
    throw ConfigError("polynomial and basis have different mode counts");
  return kernels::assemble(p, basis);
}

double InteractionKernel::operator()(const Eigen::Vector3d& q) const {
  return u0 * std::exp(-0.5 * q.squaredNorm() * sigma * sigma);
}

Polynomial h0_terms(const oneparticle::SchrodingerEigensystem& eigs, double mu) {
  const auto& u = eigs.eigenvectors;
  const Eigen::MatrixXcd h = u * eigs.eigenvalues.asDiagonal() * u.adjoint();
  const int m = static_cast<int>(h.rows());
  Polynomial p(m);
  for (int k = 0; k < m; ++k)
    for (int kp = 0; kp < m; ++kp) {
      cplx c = 0.5 * (h(k, kp) + std::conj(h(kp, k)));
      if (k == kp) c = cplx(c.real() - mu, 0.0);
      if (std::abs(c) > 1e-15) p.add_one_body(k, kp, c);
    }
  return p;
}

InteractionTerms interaction_terms(const InteractionKernel& kernel,
                                   const oneparticle::KineticBasis& kinetic) {
  const int m = static_cast<int>(kinetic.size());
  const int d = kinetic.dimension();
  const double scale = 1.0 / (2.0 * kinetic.volume());
  const double unit = 2.0 * kPi / kinetic.side_length();
  InteractionTerms out{Polynomial(m), 0.0};
  if (kernel.u0 == 0.0) return out;

  auto u_of = [&](const oneparticle::Label& q) {
    return kernel(Eigen::Vector3d(unit * q[0], unit * q[1], unit * q[2]));
  };
  const int c = kinetic.cutoff();
  for (int k = 0; k < m; ++k) {
    const auto& lk = kinetic.label(k);
    for (int kp = 0; kp < m; ++kp) {
      const auto& lkp = kinetic.label(kp);
      // All q with k+q inside the difference box; keep those with k'-q inside too.
      const int qy = d >= 2 ? 2 * c : 0, qz = d >= 3 ? 2 * c : 0;
      for (int a = -2 * c; a <= 2 * c; ++a)
        for (int b = -qy; b <= qy; ++b)
          for (int e = -qz; e <= qz; ++e) {
            const oneparticle::Label q{a, b, e};
            const oneparticle::Label kq{lk[0] + a, lk[1] + b, lk[2] + e};
            const oneparticle::Label kpq{lkp[0] - a, lkp[1] - b, lkp[2] - e};
            const int i1 = kinetic.find(kq);
            const int i2 = kinetic.find(kpq);
            const double uq = u_of(q);
            if (i1 < 0 || i2 < 0) {
              if (i1 >= 0 || i2 >= 0) out.dropped += std::abs(uq) * scale;
              continue;
            }
            if (uq != 0.0) out.terms.add_two_body(i1, i2, kp, k, uq * scale);
          }
    }
  }
  return out;
}

ManyBodyHamiltonian assemble_h0(const oneparticle::SchrodingerEigensystem& eigs,
                                const fock::OccupationBasis& basis, double mu, double volume) {
  if (eigs.eigenvalues.size() != basis.mode_count())
    throw ConfigError("assemble_h0: basis mode count differs from eigensystem dimension");
  ManyBodyHamiltonian h;
  h.terms = h0_terms(eigs, mu);
  const auto& u = eigs.eigenvectors;
  h.one_particle = u * eigs.eigenvalues.asDiagonal() * u.adjoint();
  h.mu = mu;
  h.volume = volume;
  h.parts.h0 = true;
  return h;
}

fock::BosonOperator assemble_interaction(const InteractionKernel& kernel,
                                         const fock::BasisPtr& basis,
                                         const oneparticle::KineticBasis& kinetic) {
  if (static_cast<int>(kinetic.size()) != basis->mode_count())
    throw ConfigError("assemble_interaction: basis mode count differs from kinetic basis");
  auto terms = interaction_terms(kernel, kinetic);
  return {basis, to_matrix(terms.terms, *basis), true};
}

ManyBodyHamiltonian with_interaction(ManyBodyHamiltonian h, const InteractionKernel& kernel,
                                     const oneparticle::KineticBasis& kinetic) {
  auto u = interaction_terms(kernel, kinetic);
  h.terms.append(u.terms);
  h.dropped_interaction = u.dropped;
  h.parts.interaction = true;
  return h;
}

ManyBodyHamiltonian add_source(ManyBodyHamiltonian h, int mode, cplx eta, double volume) {
  if (mode < 0 || mode >= h.mode_count()) throw ConfigError("source mode outside the basis");
  if (eta == cplx(0.0)) return h;
  const double s = std::sqrt(volume);
  h.terms.add_linear_annihilate(mode, s * std::conj(eta));
  h.terms.add_linear_create(mode, s * eta);
  h.parts.source = true;
  return h;
}

ManyBodyHamiltonian assemble_full(const oneparticle::KineticBasis& kinetic,
                                  const oneparticle::SchrodingerEigensystem& eigs,
                                  const InteractionKernel& kernel, double mu) {
  ManyBodyHamiltonian h;
  h.terms = h0_terms(eigs, mu);
  const auto& u = eigs.eigenvectors;
  h.one_particle = u * eigs.eigenvalues.asDiagonal() * u.adjoint();
  h.mu = mu;
  h.volume = kinetic.volume();
  h.parts.h0 = true;
  if (kernel.u0 != 0.0) h = with_interaction(std::move(h), kernel, kinetic);
  return h;
}

fock::BosonOperator to_operator(const ManyBodyHamiltonian& h, const fock::BasisPtr& basis) {
  return {basis, to_matrix(h.terms, *basis), true};
}

fock::BosonOperator momentum_operator(const fock::BasisPtr& basis,
                                      const oneparticle::KineticBasis& kinetic, int axis) {
  Polynomial p(static_cast<int>(kinetic.size()));
  for (std::size_t k = 0; k < kinetic.size(); ++k) {
    const double kc = kinetic.momentum(k)[axis];
    if (kc != 0.0) p.add_one_body(static_cast<int>(k), static_cast<int>(k), kc);
  }
  return {basis, to_matrix(p, *basis), true};
}

}  // namespace bogolab::manybody
