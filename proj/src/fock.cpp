#include "bogolab/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace bogolab::fock {

OccupationBasis::OccupationBasis(int mode_count, int max_total, std::size_t state_cap)
    : OccupationBasis(mode_count, [&] {
        if (mode_count < 1) throw ConfigError("mode_count must be >= 1");
        ModeGroup all;
        all.cap = max_total;
        for (int m = 0; m < mode_count; ++m) all.modes.push_back(m);
        return std::vector<ModeGroup>{all};
      }(), state_cap) {}

OccupationBasis::OccupationBasis(int mode_count, std::vector<ModeGroup> groups,
                                 std::size_t state_cap)
    : modes_(mode_count), groups_(std::move(groups)) {
  if (modes_ < 1) throw ConfigError("mode_count must be >= 1");
  group_of_.assign(modes_, -1);
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (groups_[g].cap < 0) throw ConfigError("particle caps must be >= 0");
    for (int m : groups_[g].modes) {
      if (m < 0 || m >= modes_ || group_of_[m] != -1)
        throw ConfigError("mode groups must partition the modes");
      group_of_[m] = static_cast<int>(g);
    }
    max_occ_ = std::max(max_occ_, groups_[g].cap);
  }
  if (std::ranges::find(group_of_, -1) != group_of_.end())
    throw ConfigError("mode groups must partition the modes");

  bits_ = std::max(1, static_cast<int>(std::bit_width(static_cast<unsigned>(max_occ_))));
  if (bits_ * modes_ > 64)
    throw ConfigError("occupation basis too wide for the 64-bit state index");
  enumerate(state_cap);
}

void OccupationBasis::enumerate(std::size_t state_cap) {
  std::vector<int> n(modes_, 0);
  std::vector<int> remaining(groups_.size());
  for (std::size_t g = 0; g < groups_.size(); ++g) remaining[g] = groups_[g].cap;

  // Depth-first in mode order with ascending occupations gives lexicographic order.
  auto recurse = [&](auto&& self, int mode) -> void {
    if (mode == modes_) {
      if (totals_.size() >= state_cap)
        throw ConfigError("occupation basis exceeds the state cap of " +
                          std::to_string(state_cap));
      occ_.insert(occ_.end(), n.begin(), n.end());
      int t = 0;
      for (int v : n) t += v;
      totals_.push_back(t);
      return;
    }
    int& rem = remaining[group_of_[mode]];
    const int limit = rem;
    for (int v = 0; v <= limit; ++v) {
      n[mode] = v;
      rem = limit - v;
      self(self, mode + 1);
    }
    rem = limit;
    n[mode] = 0;
  };
  recurse(recurse, 0);

  index_.reserve(totals_.size() * 2);
  for (std::size_t i = 0; i < totals_.size(); ++i) index_.emplace(key(state(i)), i);
}

std::uint64_t OccupationBasis::key(std::span<const int> n) const {
  std::uint64_t k = 0;
  for (int v : n) k = (k << bits_) | static_cast<std::uint64_t>(v);
  return k;
}

std::optional<std::size_t> OccupationBasis::index_of(std::span<const int> n) const {
  if (static_cast<int>(n.size()) != modes_) return std::nullopt;
  std::vector<int> used(groups_.size(), 0);
  for (int m = 0; m < modes_; ++m) {
    if (n[m] < 0) return std::nullopt;
    used[group_of_[m]] += n[m];
  }
  for (std::size_t g = 0; g < groups_.size(); ++g)
    if (used[g] > groups_[g].cap) return std::nullopt;
  auto it = index_.find(key(n));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

BasisPtr build_basis(int mode_count, int max_total, std::size_t state_cap) {
  if (max_total < 0) throw ConfigError("max_total must be >= 0");
  return std::make_shared<const OccupationBasis>(mode_count, max_total, state_cap);
}

BasisPtr build_split_basis(int mode_count, const std::vector<int>& band_modes,
                           int band_cap, int complement_cap, std::size_t state_cap) {
  ModeGroup band{band_modes, band_cap};
  ModeGroup rest;
  rest.cap = complement_cap;
  for (int m = 0; m < mode_count; ++m)
    if (std::ranges::find(band_modes, m) == band_modes.end()) rest.modes.push_back(m);
  std::vector<ModeGroup> groups;
  if (!band.modes.empty()) groups.push_back(std::move(band));
  if (!rest.modes.empty()) groups.push_back(std::move(rest));
  return std::make_shared<const OccupationBasis>(mode_count, std::move(groups), state_cap);
}

BosonOperator ladder(const BasisPtr& basis, int mode, Ladder kind) {
  if (mode < 0 || mode >= basis->mode_count())
    throw ConfigError("ladder mode index out of range");
  const auto dim = static_cast<Eigen::Index>(basis->size());
  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(basis->size());
  std::vector<int> n(basis->mode_count());
  for (std::size_t j = 0; j < basis->size(); ++j) {
    auto s = basis->state(j);
    std::copy(s.begin(), s.end(), n.begin());
    double amp = 0.0;
    if (kind == Ladder::annihilate) {
      if (n[mode] == 0) continue;
      amp = std::sqrt(static_cast<double>(n[mode]));
      n[mode] -= 1;
    } else {
      amp = std::sqrt(static_cast<double>(n[mode] + 1));
      n[mode] += 1;
    }
    if (auto i = basis->index_of(n))
      triplets.emplace_back(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(j), amp);
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return {basis, std::move(m), false};
}

BosonOperator number(const BasisPtr& basis, int mode) {
  if (mode < 0 || mode >= basis->mode_count())
    throw ConfigError("number mode index out of range");
  const auto dim = static_cast<Eigen::Index>(basis->size());
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (std::size_t j = 0; j < basis->size(); ++j)
    if (int v = basis->occupation(j, mode); v != 0)
      triplets.emplace_back(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j), v);
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return {basis, std::move(m), true};
}

BosonOperator total_number(const BasisPtr& basis) {
  const auto dim = static_cast<Eigen::Index>(basis->size());
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (std::size_t j = 0; j < basis->size(); ++j)
    if (basis->total(j) != 0)
      triplets.emplace_back(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j),
                            basis->total(j));
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return {basis, std::move(m), true};
}

BosonOperator adjoint(const BosonOperator& op) {
  SparseMatrix m = op.matrix.adjoint();
  return {op.basis, std::move(m), op.hermitian};
}

std::vector<BosonOperator> mode_change(const BasisPtr& basis,
                                       const Eigen::MatrixXcd& unitary) {
  const int modes = basis->mode_count();
  if (unitary.rows() != modes || unitary.cols() != modes)
    throw ConfigError("mode_change: unitary dimension must equal the mode count");
  const Eigen::MatrixXcd gram = unitary.adjoint() * unitary;
  if ((gram - Eigen::MatrixXcd::Identity(modes, modes)).cwiseAbs().maxCoeff() > 1e-10)
    throw ConfigError("mode_change: matrix is not unitary to 1e-10");

  std::vector<BosonOperator> plane;
  plane.reserve(modes);
  for (int k = 0; k < modes; ++k) plane.push_back(ladder(basis, k, Ladder::annihilate));

  std::vector<BosonOperator> rotated;
  rotated.reserve(modes);
  for (int i = 0; i < modes; ++i) {
    SparseMatrix acc(plane[0].matrix.rows(), plane[0].matrix.cols());
    for (int k = 0; k < modes; ++k) {
      const cplx w = std::conj(unitary(k, i));
      if (std::abs(w) > 0.0) acc += w * plane[k].matrix;
    }
    prune(acc);
    rotated.push_back({basis, std::move(acc), false});
  }
  return rotated;
}

SparseMatrix commutator(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix c = (a * b).pruned() - (b * a).pruned();
  return c;
}

double max_abs(const SparseMatrix& m) {
  double best = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) best = std::max(best, std::abs(it.value()));
  return best;
}

void prune(SparseMatrix& m, double threshold) {
  m.prune([threshold](const Eigen::Index&, const Eigen::Index&, const cplx& v) {
    return std::abs(v) >= threshold;
  });
}

}  // namespace bogolab::fock
