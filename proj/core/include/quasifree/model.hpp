#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "quasifree/types.hpp"

namespace quasifree {

/// Translation-invariant hopping chain on a ring of L sites,
///
///   H = J_0 + sum_{z=1..R} J_z sum_x f^dag_x f_{x+z} + h.c.
///
/// Sites are labelled 0..L-1 internally; every index is taken modulo L.
class HoppingModel {
 public:
  /// `couplings` holds J_0..J_R, so R = couplings.size() - 1. Requires L > 2R.
  HoppingModel(int size, std::vector<double> couplings);

  int size() const { return size_; }
  int range() const { return static_cast<int>(couplings_.size()) - 1; }
  std::span<const double> couplings() const { return couplings_; }

  /// J_z, zero beyond the range.
  double coupling(int z) const;
  /// max_{z>=1} |J_z|
  double max_hopping() const;
  /// True when J_1..J_R all vanish.
  bool is_flat() const;

 private:
  int size_;
  std::vector<double> couplings_;
};

/// E(p) = J_0 + 2 sum_z J_z cos(p z)
double dispersion(const HoppingModel& model, double p);

/// d^m E / dp^m, term-by-term.
double dispersion_derivative(const HoppingModel& model, int order, double p);

/// omega_1..omega_L with omega_k = E(2 pi k / L); element i holds omega_{i+1}.
std::vector<double> eigenvalues(const HoppingModel& model);

/// Mode energies indexed by k mod L: element k holds E(2 pi k / L), so element 0 is omega_L.
/// This is the ordering that matches FFT bins.
std::vector<double> mode_energies(const HoppingModel& model);

/// Dense circulant coupling matrix h with h_{x,x+z} = J_z (indices mod L).
RealMatrix coupling_matrix(const HoppingModel& model);

/// All n in 1..L-1 with max_k |omega_{k+n} - omega_k| <= tol.
std::vector<int> shift_symmetries(const HoppingModel& model, double tol);
/// Same with the default tolerance 1e-9 * max_k |omega_k|.
std::vector<int> shift_symmetries(const HoppingModel& model);

/// Eigen decomposition h = V diag(w) V^T of a real symmetric coupling matrix.
struct Eigensystem {
  RealVector values;
  RealMatrix vectors;
};

/// Clean hopping model plus on-site potentials xi_x.
///
/// The eigen decomposition of the coupling matrix is computed lazily, once,
/// and shared between copies.
class DisorderedModel {
 public:
  DisorderedModel(HoppingModel base, std::vector<double> potentials, double half_width,
                  std::uint64_t seed);

  const HoppingModel& base() const { return base_; }
  int size() const { return base_.size(); }
  std::span<const double> potentials() const { return potentials_; }
  double half_width() const { return half_width_; }
  std::uint64_t seed() const { return seed_; }

  const Eigensystem& eigensystem() const;

 private:
  struct Cache {
    std::once_flag once;
    Eigensystem system;
  };

  HoppingModel base_;
  std::vector<double> potentials_;
  double half_width_;
  std::uint64_t seed_;
  std::shared_ptr<Cache> cache_;
};

/// Name of the generator used for disorder realizations; recorded in run manifests.
inline constexpr std::string_view kDisorderRng = "mt19937_64/u53-v1";

/// Uniform i.i.d. on-site disorder in [-w, w], a pure function of (L, w, J, seed).
DisorderedModel sample_anderson(int size, double half_width, std::vector<double> couplings,
                                std::uint64_t seed);

/// Uniform i.i.d. disorder in [lo, hi] (one-sided variants such as [0, w]).
DisorderedModel sample_uniform_disorder(int size, double lo, double hi,
                                        std::vector<double> couplings, std::uint64_t seed);

RealMatrix coupling_matrix(const DisorderedModel& model);

}  // namespace quasifree
