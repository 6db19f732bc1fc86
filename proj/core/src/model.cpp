#include "quasifree/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "quasifree/errors.hpp"

namespace quasifree {

HoppingModel::HoppingModel(int size, std::vector<double> couplings)
    : size_(size), couplings_(std::move(couplings)) {
  if (couplings_.empty()) {
    throw PreconditionViolated("HoppingModel: need at least J_0");
  }
  if (size_ <= 2 * range()) {
    throw PreconditionViolated("HoppingModel: L = " + std::to_string(size_) +
                               " must exceed 2R = " + std::to_string(2 * range()));
  }
  for (double j : couplings_) {
    if (!std::isfinite(j)) throw PreconditionViolated("HoppingModel: non-finite coupling");
  }
}

double HoppingModel::coupling(int z) const {
  return (z >= 0 && z <= range()) ? couplings_[static_cast<std::size_t>(z)] : 0.0;
}

double HoppingModel::max_hopping() const {
  double m = 0.0;
  for (int z = 1; z <= range(); ++z) m = std::max(m, std::abs(coupling(z)));
  return m;
}

bool HoppingModel::is_flat() const { return max_hopping() == 0.0; }

double dispersion(const HoppingModel& model, double p) {
  double e = model.coupling(0);
  for (int z = 1; z <= model.range(); ++z) e += 2.0 * model.coupling(z) * std::cos(p * z);
  return e;
}

double dispersion_derivative(const HoppingModel& model, int order, double p) {
  if (order < 1) throw PreconditionViolated("dispersion_derivative: order must be >= 1");
  // d^m/dp^m cos(z p) = z^m cos(z p + m pi/2)
  const double shift = order * kPi / 2.0;
  double e = 0.0;
  for (int z = 1; z <= model.range(); ++z) {
    e += 2.0 * model.coupling(z) * std::pow(static_cast<double>(z), order) *
         std::cos(p * z + shift);
  }
  return e;
}

std::vector<double> eigenvalues(const HoppingModel& model) {
  const int L = model.size();
  std::vector<double> w(static_cast<std::size_t>(L));
  for (int k = 1; k <= L; ++k) w[k - 1] = dispersion(model, kTwoPi * k / L);
  return w;
}

std::vector<double> mode_energies(const HoppingModel& model) {
  const int L = model.size();
  std::vector<double> w(static_cast<std::size_t>(L));
  for (int k = 0; k < L; ++k) w[k] = dispersion(model, kTwoPi * k / L);
  return w;
}

RealMatrix coupling_matrix(const HoppingModel& model) {
  const int L = model.size();
  RealMatrix h = RealMatrix::Zero(L, L);
  for (int x = 0; x < L; ++x) {
    h(x, x) += model.coupling(0);
    for (int z = 1; z <= model.range(); ++z) {
      h(x, wrap(x + z, L)) += model.coupling(z);
      h(wrap(x + z, L), x) += model.coupling(z);
    }
  }
  return h;
}

std::vector<int> shift_symmetries(const HoppingModel& model, double tol) {
  if (!(tol > 0.0)) throw PreconditionViolated("shift_symmetries: tol must be positive");
  const auto w = mode_energies(model);
  const int L = model.size();
  std::vector<int> shifts;
  for (int n = 1; n < L; ++n) {
    double dev = 0.0;
    for (int k = 0; k < L && dev <= tol; ++k) dev = std::max(dev, std::abs(w[wrap(k + n, L)] - w[k]));
    if (dev <= tol) shifts.push_back(n);
  }
  return shifts;
}

std::vector<int> shift_symmetries(const HoppingModel& model) {
  const auto w = mode_energies(model);
  double scale = 0.0;
  for (double v : w) scale = std::max(scale, std::abs(v));
  // An identically zero spectrum is flat; any positive tolerance works.
  return shift_symmetries(model, scale > 0.0 ? 1e-9 * scale : 1e-300);
}

DisorderedModel::DisorderedModel(HoppingModel base, std::vector<double> potentials,
                                 double half_width, std::uint64_t seed)
    : base_(std::move(base)),
      potentials_(std::move(potentials)),
      half_width_(half_width),
      seed_(seed),
      cache_(std::make_shared<Cache>()) {
  if (static_cast<int>(potentials_.size()) != base_.size()) {
    throw DimensionMismatch("DisorderedModel: need one potential per site");
  }
  if (!(half_width_ >= 0.0)) throw PreconditionViolated("DisorderedModel: w must be >= 0");
  for (double xi : potentials_) {
    if (!(std::abs(xi) <= half_width_)) {
      throw PreconditionViolated("DisorderedModel: potential outside [-w, w]");
    }
  }
}

const Eigensystem& DisorderedModel::eigensystem() const {
  std::call_once(cache_->once, [this] {
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(coupling_matrix(*this));
    cache_->system.values = solver.eigenvalues();
    cache_->system.vectors = solver.eigenvectors();
  });
  return cache_->system;
}

namespace {

// 53 high bits of a 64-bit draw mapped onto [0, 1). Written out instead of
// std::uniform_real_distribution, whose output is implementation defined.
double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

DisorderedModel sample_uniform_disorder(int size, double lo, double hi,
                                        std::vector<double> couplings, std::uint64_t seed) {
  if (!(hi >= lo)) throw PreconditionViolated("disorder interval must satisfy lo <= hi");
  HoppingModel base(size, std::move(couplings));
  std::mt19937_64 rng(seed);
  std::vector<double> xi(static_cast<std::size_t>(size));
  for (auto& v : xi) v = lo + (hi - lo) * unit_draw(rng);
  return DisorderedModel(std::move(base), std::move(xi), std::max(std::abs(lo), std::abs(hi)), seed);
}

DisorderedModel sample_anderson(int size, double half_width, std::vector<double> couplings,
                                std::uint64_t seed) {
  if (!(half_width >= 0.0)) throw PreconditionViolated("sample_anderson: w must be >= 0");
  return sample_uniform_disorder(size, -half_width, half_width, std::move(couplings), seed);
}

RealMatrix coupling_matrix(const DisorderedModel& model) {
  RealMatrix h = coupling_matrix(model.base());
  for (int x = 0; x < model.size(); ++x) h(x, x) += model.potentials()[x];
  return h;
}

}  // namespace quasifree
