#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Sparse>

#include "bogolab/common.hpp"

namespace bogolab::fock {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

/// A set of modes sharing one particle-number cap.
struct ModeGroup {
  std::vector<int> modes;
  int cap = 0;
};

/// Truncated bosonic occupation-number basis.
///
/// States are occupation vectors n = (n_1, ..., n_M) in lexicographic order.
/// The modes are partitioned into groups and the particle count of every
/// group is capped. The plain constructor uses a single group, i.e. a cap on
/// the total particle number.
class OccupationBasis {
 public:
  static constexpr std::size_t kDefaultStateCap = 20000;

  OccupationBasis(int mode_count, int max_total,
                  std::size_t state_cap = kDefaultStateCap);
  OccupationBasis(int mode_count, std::vector<ModeGroup> groups,
                  std::size_t state_cap = kDefaultStateCap);

  int mode_count() const { return modes_; }
  std::size_t size() const { return totals_.size(); }
  const std::vector<ModeGroup>& groups() const { return groups_; }
  int max_occupation() const { return max_occ_; }

  std::span<const int> state(std::size_t i) const {
    return {occ_.data() + i * static_cast<std::size_t>(modes_),
            static_cast<std::size_t>(modes_)};
  }
  int occupation(std::size_t i, int mode) const {
    return occ_[i * static_cast<std::size_t>(modes_) + mode];
  }
  int total(std::size_t i) const { return totals_[i]; }

  std::optional<std::size_t> index_of(std::span<const int> n) const;

 private:
  void enumerate(std::size_t state_cap);
  std::uint64_t key(std::span<const int> n) const;

  int modes_;
  std::vector<ModeGroup> groups_;
  std::vector<int> group_of_;
  int max_occ_ = 0;
  int bits_ = 1;
  std::vector<int> occ_;
  std::vector<int> totals_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

using BasisPtr = std::shared_ptr<const OccupationBasis>;

BasisPtr build_basis(int mode_count, int max_total,
                     std::size_t state_cap = OccupationBasis::kDefaultStateCap);

/// Basis with separate caps on a set of "band" modes and on the rest.
BasisPtr build_split_basis(int mode_count, const std::vector<int>& band_modes,
                           int band_cap, int complement_cap,
                           std::size_t state_cap = OccupationBasis::kDefaultStateCap);

struct BosonOperator {
  BasisPtr basis;
  SparseMatrix matrix;
  bool hermitian = false;
};

enum class Ladder { create, annihilate };

/// Ladder operator on one mode. Creation out of the truncated space maps to zero.
BosonOperator ladder(const BasisPtr& basis, int mode, Ladder kind);

/// a^dagger_j a_j, diagonal with entries n_j.
BosonOperator number(const BasisPtr& basis, int mode);

/// Total number operator.
BosonOperator total_number(const BasisPtr& basis);

BosonOperator adjoint(const BosonOperator& op);

/// Annihilators in a rotated one-particle basis:
///   b_i = sum_k conj(U(k, i)) a_k
/// where column i of `unitary` holds the coefficients <psi_k|phi_i>.
/// Throws ConfigError when U is not unitary to 1e-10.
std::vector<BosonOperator> mode_change(const BasisPtr& basis,
                                       const Eigen::MatrixXcd& unitary);

SparseMatrix commutator(const SparseMatrix& a, const SparseMatrix& b);

/// Largest absolute entry of a sparse matrix (0 for an empty matrix).
double max_abs(const SparseMatrix& m);

/// Drops entries with magnitude below `threshold`.
void prune(SparseMatrix& m, double threshold = 1e-15);

}  // namespace bogolab::fock
