#include "quasifree/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include <Eigen/Eigenvalues>

#include "quasifree/errors.hpp"

namespace quasifree {

namespace {

using State = std::uint32_t;

double jw_sign(State s, int x) { return (std::popcount(s & ((State{1} << x) - 1)) & 1) ? -1.0 : 1.0; }

// f_x |s> = sign |s'>; false when the result vanishes.
bool annihilate(State& s, int x, double& sign) {
  if (!((s >> x) & 1u)) return false;
  sign *= jw_sign(s, x);
  s ^= State{1} << x;
  return true;
}

bool create(State& s, int x, double& sign) {
  if ((s >> x) & 1u) return false;
  sign *= jw_sign(s, x);
  s |= State{1} << x;
  return true;
}

void check_sites(int sites, int cap, const char* what) {
  if (sites < 1 || sites > cap) {
    throw PreconditionViolated(std::string(what) + ": L = " + std::to_string(sites) + " outside 1.." + std::to_string(cap));
  }
}

int parity_of(State s) { return std::popcount(s) & 1; }

}  // namespace

FockOperatorSet::FockOperatorSet(int sites) : sites_(sites) {
  check_sites(sites, kMaxOracleSites, "FockOperatorSet");
  const auto dim = static_cast<Eigen::Index>(dimension());
  for (int x = 0; x < sites; ++x) {
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(dimension() / 2);
    for (State s = 0; s < dimension(); ++s) {
      State s2 = s;
      double sign = 1.0;
      if (annihilate(s2, x, sign)) t.emplace_back(s2, s, sign);
    }
    SparseOperator f(dim, dim);
    f.setFromTriplets(t.begin(), t.end());
    f_.push_back(std::move(f));
  }
  if (sites <= 8) {
    const double dev = anticommutation_deviation();
    if (dev > 1e-12) throw PostConditionFailed("FockOperatorSet: CAR violated by " + std::to_string(dev));
  }
}

SparseOperator FockOperatorSet::number() const {
  const auto dim = static_cast<Eigen::Index>(dimension());
  SparseOperator n(dim, dim);
  std::vector<Eigen::Triplet<cplx>> t;
  for (State s = 0; s < dimension(); ++s) t.emplace_back(s, s, std::popcount(s));
  n.setFromTriplets(t.begin(), t.end());
  return n;
}

double FockOperatorSet::anticommutation_deviation() const {
  const auto dim = static_cast<Eigen::Index>(dimension());
  SparseOperator id(dim, dim);
  id.setIdentity();
  double dev = 0.0;
  auto max_abs = [](const SparseOperator& m) {
    double v = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
      for (SparseOperator::InnerIterator it(m, k); it; ++it) v = std::max(v, std::abs(it.value()));
    return v;
  };
  for (int x = 0; x < sites_; ++x)
    for (int y = 0; y < sites_; ++y) {
      const SparseOperator fy_dag = creation(y);
      SparseOperator a = f_[x] * fy_dag + fy_dag * f_[x];
      if (x == y) a -= id;
      SparseOperator b = f_[x] * f_[y] + f_[y] * f_[x];
      dev = std::max({dev, max_abs(a), max_abs(b)});
    }
  return dev;
}

SparseOperator build_hamiltonian(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) throw DimensionMismatch("build_hamiltonian: h must be square");
  const int L = static_cast<int>(h.rows());
  check_sites(L, kMaxOracleSites, "build_hamiltonian");
  const State dim = State{1} << L;
  std::vector<Eigen::Triplet<cplx>> t;
  for (State s = 0; s < dim; ++s) {
    cplx diag = 0.0;
    for (int y = 0; y < L; ++y) {
      if (!((s >> y) & 1u)) continue;
      diag += h(y, y);
      for (int x = 0; x < L; ++x) {
        if (x == y || h(x, y) == cplx(0.0)) continue;
        State s2 = s;
        double sign = 1.0;
        annihilate(s2, y, sign);
        if (create(s2, x, sign)) t.emplace_back(s2, s, sign * h(x, y));
      }
    }
    if (diag != cplx(0.0)) t.emplace_back(s, s, diag);
  }
  SparseOperator H(dim, dim);
  H.setFromTriplets(t.begin(), t.end());
  return H;
}

SparseOperator build_hamiltonian(const HoppingModel& model) {
  return build_hamiltonian(ComplexMatrix(coupling_matrix(model).cast<cplx>()));
}

SparseOperator build_hamiltonian(const DisorderedModel& model) {
  return build_hamiltonian(ComplexMatrix(coupling_matrix(model).cast<cplx>()));
}

ManyBodyState ManyBodyState::pure(int sites, ComplexVector psi) {
  check_sites(sites, kMaxOracleSites, "ManyBodyState");
  if (psi.size() != (Eigen::Index{1} << sites)) throw DimensionMismatch("ManyBodyState: vector must have 2^L entries");
  ManyBodyState st;
  st.sites_ = sites;
  st.pure_ = true;
  st.psi_ = std::move(psi);
  if (std::abs(st.norm() - 1.0) > 1e-10) throw PreconditionViolated("ManyBodyState: vector not normalized");
  if (st.parity_violation() > 1e-10) throw PreconditionViolated("ManyBodyState: superposition of both parities");
  return st;
}

ManyBodyState ManyBodyState::mixed(int sites, ComplexMatrix rho) {
  check_sites(sites, kMaxDensitySites, "ManyBodyState");
  const Eigen::Index dim = Eigen::Index{1} << sites;
  if (rho.rows() != dim || rho.cols() != dim) throw DimensionMismatch("ManyBodyState: density matrix must be 2^L x 2^L");
  ManyBodyState st;
  st.sites_ = sites;
  st.pure_ = false;
  st.rho_ = std::move(rho);
  if (std::abs(st.norm() - 1.0) > 1e-10) throw PreconditionViolated("ManyBodyState: trace must be 1");
  if ((st.rho_ - st.rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw PreconditionViolated("ManyBodyState: density matrix not Hermitian");
  }
  if (st.parity_violation() > 1e-10) throw PreconditionViolated("ManyBodyState: coherences between parities");
  return st;
}

ManyBodyState ManyBodyState::fock(std::span<const int> occupations) {
  const int L = static_cast<int>(occupations.size());
  check_sites(L, kMaxOracleSites, "ManyBodyState::fock");
  State s = 0;
  for (int x = 0; x < L; ++x) {
    if (occupations[x] != 0 && occupations[x] != 1) throw PreconditionViolated("fock: occupations must be 0 or 1");
    if (occupations[x]) s |= State{1} << x;
  }
  ComplexVector psi = ComplexVector::Zero(Eigen::Index{1} << L);
  psi[s] = 1.0;
  return pure(L, std::move(psi));
}

ManyBodyState ManyBodyState::single_particle(int sites, int x) {
  std::vector<int> occ(static_cast<std::size_t>(sites), 0);
  occ.at(static_cast<std::size_t>(x)) = 1;
  return fock(occ);
}

double ManyBodyState::norm() const { return pure_ ? psi_.norm() : rho_.trace().real(); }

double ManyBodyState::parity_violation() const {
  const auto dim = static_cast<State>(pure_ ? psi_.size() : rho_.rows());
  if (pure_) {
    double w[2] = {0.0, 0.0};
    for (State s = 0; s < dim; ++s) w[parity_of(s)] += std::norm(psi_[s]);
    return std::sqrt(std::min(w[0], w[1]));
  }
  double v = 0.0;
  for (State j = 0; j < dim; ++j)
    for (State i = 0; i < dim; ++i)
      if (parity_of(i) != parity_of(j)) v = std::max(v, std::abs(rho_(i, j)));
  return v;
}

ManyBodyState::Parity ManyBodyState::parity() const {
  const auto dim = static_cast<State>(pure_ ? psi_.size() : rho_.rows());
  double w[2] = {0.0, 0.0};
  for (State s = 0; s < dim; ++s) w[parity_of(s)] += pure_ ? std::norm(psi_[s]) : rho_(s, s).real();
  if (w[0] > 1e-14 && w[1] > 1e-14) return Parity::Mixed;
  return w[1] > w[0] ? Parity::Odd : Parity::Even;
}

SectorEvolution::SectorEvolution(const SparseOperator& h, int sites) : sites_(sites) {
  check_sites(sites, kMaxOracleSites, "SectorEvolution");
  const State dim = State{1} << sites;
  if (h.rows() != static_cast<Eigen::Index>(dim) || h.cols() != static_cast<Eigen::Index>(dim)) {
    throw DimensionMismatch("SectorEvolution: H must be 2^L x 2^L");
  }
  sectors_.resize(static_cast<std::size_t>(sites + 1));
  position_.resize(dim);
  for (State s = 0; s < dim; ++s) {
    auto& sec = sectors_[std::popcount(s)];
    position_[s] = static_cast<State>(sec.states.size());
    sec.states.push_back(s);
  }
  std::vector<ComplexMatrix> blocks(sectors_.size());
  for (std::size_t n = 0; n < sectors_.size(); ++n) {
    const auto size = static_cast<Eigen::Index>(sectors_[n].states.size());
    blocks[n] = ComplexMatrix::Zero(size, size);
  }
  for (int k = 0; k < h.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(h, k); it; ++it) {
      const auto r = static_cast<State>(it.row()), c = static_cast<State>(it.col());
      if (std::popcount(r) != std::popcount(c)) {
        if (std::abs(it.value()) > 1e-14) throw PreconditionViolated("SectorEvolution: H does not conserve N");
        continue;
      }
      blocks[std::popcount(r)](position_[r], position_[c]) += it.value();
    }
  for (std::size_t n = 0; n < sectors_.size(); ++n) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(blocks[n]);
    sectors_[n].energies = solver.eigenvalues();
    sectors_[n].vectors = solver.eigenvectors();
  }
}

std::vector<double> SectorEvolution::spectrum() const {
  std::vector<double> e;
  for (const auto& sec : sectors_) e.insert(e.end(), sec.energies.begin(), sec.energies.end());
  std::sort(e.begin(), e.end());
  return e;
}

ManyBodyState SectorEvolution::evolve(const ManyBodyState& state, double t) const {
  if (state.sites() != sites_) throw DimensionMismatch("evolve_state: state and Hamiltonian differ in L");
  std::vector<ComplexMatrix> u(sectors_.size());
  for (std::size_t n = 0; n < sectors_.size(); ++n) {
    const auto& sec = sectors_[n];
    const ComplexVector phase = (sec.energies.array() * -t).unaryExpr([](double a) { return std::polar(1.0, a); });
    u[n] = sec.vectors * phase.asDiagonal() * sec.vectors.adjoint();
  }
  if (state.is_pure()) {
    const auto& psi = state.vector();
    ComplexVector out(psi.size());
    for (std::size_t n = 0; n < sectors_.size(); ++n) {
      const auto& st = sectors_[n].states;
      ComplexVector c(static_cast<Eigen::Index>(st.size()));
      for (std::size_t i = 0; i < st.size(); ++i) c[i] = psi[st[i]];
      c = u[n] * c;
      for (std::size_t i = 0; i < st.size(); ++i) out[st[i]] = c[i];
    }
    // renormalize away rounding at the 1e-15 level
    return ManyBodyState::pure(sites_, out / out.norm());
  }
  const auto& rho = state.density();
  ComplexMatrix out(rho.rows(), rho.cols());
  for (std::size_t a = 0; a < sectors_.size(); ++a)
    for (std::size_t b = 0; b < sectors_.size(); ++b) {
      const auto& sa = sectors_[a].states;
      const auto& sb = sectors_[b].states;
      ComplexMatrix blk(static_cast<Eigen::Index>(sa.size()), static_cast<Eigen::Index>(sb.size()));
      for (std::size_t j = 0; j < sb.size(); ++j)
        for (std::size_t i = 0; i < sa.size(); ++i) blk(i, j) = rho(sa[i], sb[j]);
      blk = u[a] * blk * u[b].adjoint();
      for (std::size_t j = 0; j < sb.size(); ++j)
        for (std::size_t i = 0; i < sa.size(); ++i) out(sa[i], sb[j]) = blk(i, j);
    }
  return ManyBodyState::mixed(sites_, 0.5 * (out + out.adjoint()));
}

ManyBodyState evolve_state(const ManyBodyState& state, const SparseOperator& h, double t) {
  return SectorEvolution(h, state.sites()).evolve(state, t);
}

ManyBodyState gibbs_state(const SparseOperator& h, int sites, double beta, double mu) {
  check_sites(sites, kMaxDensitySites, "gibbs_state");
  if (!(beta > 0.0)) throw PreconditionViolated("gibbs_state: beta must be > 0");
  const State dim = State{1} << sites;
  if (h.rows() != static_cast<Eigen::Index>(dim)) throw DimensionMismatch("gibbs_state: H must be 2^L x 2^L");

  std::vector<std::vector<State>> states(static_cast<std::size_t>(sites + 1));
  std::vector<State> pos(dim);
  for (State s = 0; s < dim; ++s) {
    pos[s] = static_cast<State>(states[std::popcount(s)].size());
    states[std::popcount(s)].push_back(s);
  }
  std::vector<ComplexMatrix> blocks(states.size());
  for (std::size_t n = 0; n < states.size(); ++n) {
    const auto size = static_cast<Eigen::Index>(states[n].size());
    blocks[n] = ComplexMatrix::Zero(size, size);
  }
  for (int k = 0; k < h.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(h, k); it; ++it) {
      const auto r = static_cast<State>(it.row()), c = static_cast<State>(it.col());
      if (std::popcount(r) != std::popcount(c)) {
        if (std::abs(it.value()) > 1e-14) throw PreconditionViolated("gibbs_state: H does not conserve N");
        continue;
      }
      blocks[std::popcount(r)](pos[r], pos[c]) += it.value();
    }

  std::vector<Eigen::SelfAdjointEigenSolver<ComplexMatrix>> solvers(states.size());
  double shift = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < states.size(); ++n) {
    solvers[n].compute(blocks[n]);
    shift = std::min(shift, solvers[n].eigenvalues().minCoeff() - mu * static_cast<double>(n));
  }
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  double z = 0.0;
  for (std::size_t n = 0; n < states.size(); ++n) {
    // shifted so that the largest weight is exactly 1
    const RealVector w = ((solvers[n].eigenvalues().array() - mu * static_cast<double>(n) - shift) * -beta).exp();
    z += w.sum();
    const ComplexMatrix& v = solvers[n].eigenvectors();
    const ComplexMatrix blk = v * w.cast<cplx>().asDiagonal() * v.adjoint();
    const auto& st = states[n];
    for (std::size_t j = 0; j < st.size(); ++j)
      for (std::size_t i = 0; i < st.size(); ++i) rho(st[i], st[j]) = blk(i, j);
  }
  rho /= z;
  return ManyBodyState::mixed(sites, 0.5 * (rho + rho.adjoint()));
}

namespace {

// Applies ops[k] for k = n-1 .. 0 (rightmost first); creation when dagger[k].
template <std::size_t N>
bool apply_string(State& s, const std::array<int, N>& sites, const std::array<bool, N>& dagger, double& sign) {
  for (std::size_t k = N; k-- > 0;) {
    if (!(dagger[k] ? create(s, sites[k], sign) : annihilate(s, sites[k], sign))) return false;
  }
  return true;
}

// <O> for a single ladder-operator string O.
template <std::size_t N>
cplx string_expectation(const ManyBodyState& state, const std::array<int, N>& sites, const std::array<bool, N>& dagger) {
  cplx v = 0.0;
  if (state.is_pure()) {
    const auto& psi = state.vector();
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      if (psi[i] == cplx(0.0)) continue;
      State s = static_cast<State>(i);
      double sign = 1.0;
      if (apply_string(s, sites, dagger, sign)) v += std::conj(psi[s]) * sign * psi[i];
    }
  } else {
    const auto& rho = state.density();
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
      State s = static_cast<State>(i);
      double sign = 1.0;
      if (apply_string(s, sites, dagger, sign)) v += sign * rho(i, s);
    }
  }
  return v;
}

}  // namespace

Covariance covariance_of(const ManyBodyState& state) {
  const int L = state.sites();
  ComplexMatrix g(L, L);
  for (int y = 0; y < L; ++y)
    for (int x = 0; x < L; ++x) g(x, y) = string_expectation<2>(state, {x, y}, {true, false});
  return Covariance(std::move(g));
}

cplx expectation(const ManyBodyState& state, const SparseOperator& op) {
  if (state.is_pure()) return state.vector().dot(op * state.vector());
  const auto& rho = state.density();
  cplx v = 0.0;
  for (int k = 0; k < op.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(op, k); it; ++it) v += rho(it.col(), it.row()) * it.value();
  return v;
}

double wick_deviation(const ManyBodyState& state, std::span<const Quartet> quartets) {
  const Covariance g = covariance_of(state);
  const int L = state.sites();
  double worst = 0.0;
  for (const auto& q : quartets) {
    for (int x : q)
      if (x < 0 || x >= L) throw PreconditionViolated("wick_deviation: site outside 0..L-1");
    const cplx four = string_expectation<4>(state, q, {true, true, false, false});
    const cplx wick = g(q[0], q[3]) * g(q[1], q[2]) - g(q[0], q[2]) * g(q[1], q[3]);
    worst = std::max(worst, std::abs(four - wick));
  }
  return worst;
}

std::vector<Quartet> local_quartets(int sites, int width) {
  if (width < 2 || width > sites) throw PreconditionViolated("local_quartets: need 2 <= width <= L");
  std::set<Quartet> out;
  for (int w = 0; w < sites; ++w)
    for (int a = 0; a < width; ++a)
      for (int b = 0; b < width; ++b) {
        if (a == b) continue;
        for (int c = 0; c < width; ++c)
          for (int d = 0; d < width; ++d) {
            if (c == d) continue;
            out.insert({wrap(w + a, sites), wrap(w + b, sites), wrap(w + c, sites), wrap(w + d, sites)});
          }
      }
  return {out.begin(), out.end()};
}

ManyBodyState paired_state(int blocks) {
  const int L = 4 * blocks;
  check_sites(L, kMaxOracleSites, "paired_state");
  ComplexVector psi = ComplexVector::Zero(Eigen::Index{1} << L);
  const double amp = std::pow(0.5, 0.5 * blocks);
  for (State choice = 0; choice < (State{1} << blocks); ++choice) {
    State s = 0;
    for (int b = 0; b < blocks; ++b) s |= (((choice >> b) & 1u) ? State{0b1100} : State{0b0011}) << (4 * b);
    psi[s] = amp;
  }
  return ManyBodyState::pure(L, std::move(psi));
}

}  // namespace quasifree
