#include "blockmix/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

namespace blockmix {

std::uint64_t StateSpace::encode(const std::vector<int>& spins) const {
  const auto base = static_cast<std::uint64_t>(k);
  std::uint64_t code = 0;
  for (std::size_t v = 0; v < n; ++v) code = code * base + static_cast<std::uint64_t>(spins[v]);
  return code;
}

std::size_t StateSpace::index_of(const std::vector<int>& spins) const {
  if (spins.size() != n) throw Error("state space: configuration has the wrong length");
  const std::uint64_t code = encode(spins);
  auto it = std::lower_bound(codes.begin(), codes.end(), code);
  if (it == codes.end() || *it != code) throw Error("state space: configuration not in the space");
  return static_cast<std::size_t>(it - codes.begin());
}

std::vector<double> StateSpace::pi() const {
  double total = 0.0;
  for (double w : weights) total += w;
  std::vector<double> out(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) out[i] = weights[i] / total;
  return out;
}

StateSpace enumerate_restricted(const Graph& g, Model model, int k, double lambda,
                                const std::vector<int>& fixed, std::size_t limit) {
  const std::size_t n = g.num_vertices();
  if (fixed.size() != n) throw Error("enumerate: fixed vector has the wrong length");
  StateSpace sp;
  sp.model = model;
  sp.k = model == Model::coloring ? k : 2;
  sp.lambda = lambda;
  sp.n = n;
  sp.fixed = fixed;
  if (sp.k < 1) throw Error("enumerate: need k >= 1");
  if (n > 0 && static_cast<double>(n) * std::log2(static_cast<double>(std::max(sp.k, 2))) >= 63.0)
    throw Error("enumerate: instance too large to encode");
  auto clash = [&](int a, int b) { return model == Model::coloring ? a == b : (a == 1 && b == 1); };
  std::vector<int> spins(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    if (fixed[v] >= sp.k) throw Error("enumerate: fixed spin out of range");
    if (fixed[v] >= 0) spins[v] = fixed[v];
  }
  for (Vertex v = 0; v < n; ++v)
    if (spins[v] >= 0)
      for (Vertex w : g.neighbors(v))
        if (spins[w] >= 0 && clash(spins[v], spins[w])) return sp;  // infeasible: empty

  // Iterative backtracking in vertex order; free vertices try spins ascending.
  std::vector<Vertex> free_vs;
  for (Vertex v = 0; v < n; ++v)
    if (fixed[v] < 0) free_vs.push_back(v);
  auto emit = [&] {
    if (sp.states.size() >= limit)
      throw Error("enumerate: more than " + std::to_string(limit) + " states");
    sp.states.push_back(spins);
    sp.codes.push_back(sp.encode(spins));
    if (model == Model::coloring) {
      sp.weights.push_back(1.0);
    } else {
      int occ = 0;
      for (int s : spins) occ += s;
      sp.weights.push_back(std::pow(lambda, occ));
    }
  };
  if (free_vs.empty()) {
    emit();
    return sp;
  }
  std::size_t depth = 0;
  while (true) {
    const Vertex v = free_vs[depth];
    int s = spins[v] + 1;
    for (; s < sp.k; ++s) {
      bool ok = true;
      for (Vertex w : g.neighbors(v))
        if (spins[w] >= 0 && clash(s, spins[w])) {
          ok = false;
          break;
        }
      if (ok) break;
    }
    if (s < sp.k) {
      spins[v] = s;
      if (depth + 1 == free_vs.size()) {
        emit();
      } else {
        ++depth;
      }
    } else {
      spins[v] = -1;
      if (depth == 0) break;
      --depth;
    }
  }
  return sp;
}

StateSpace enumerate_colorings(const Graph& g, int k, std::size_t limit) {
  return enumerate_restricted(g, Model::coloring, k, 0.0, std::vector<int>(g.num_vertices(), -1),
                              limit);
}

StateSpace enumerate_independent_sets(const Graph& g, double lambda, std::size_t limit) {
  if (!(lambda >= 0.0)) throw Error("enumerate: lambda must be >= 0");
  return enumerate_restricted(g, Model::hardcore, 2, lambda,
                              std::vector<int>(g.num_vertices(), -1), limit);
}

// ---------------------------------------------------------------------------

KernelMatrix unit_kernel(const StateSpace& space, const std::vector<std::vector<Vertex>>& units,
                         KernelKind kind) {
  const std::size_t m = space.size();
  if (m == 0) throw Error("kernel: empty state space");
  if (m > 20000) throw Error("kernel: state space too large for a dense matrix");
  KernelMatrix K;
  K.kind = kind;
  K.units = units.size();
  K.m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::vector<std::uint64_t> place(space.n, 1);
  for (std::size_t v = space.n; v-- > 1;) place[v - 1] = place[v] * static_cast<std::uint64_t>(space.k);
  for (const auto& unit : units) {
    // States agreeing off the unit share a key; the heat-bath unit resamples within the group.
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < m; ++i) {
      std::uint64_t key = space.codes[i];
      for (Vertex v : unit) key -= static_cast<std::uint64_t>(space.states[i][v]) * place[v];
      groups[key].push_back(i);
    }
    for (const auto& [key, members] : groups) {
      double total = 0.0;
      for (auto j : members) total += space.weights[j];
      for (auto i : members)
        for (auto j : members)
          K.m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += space.weights[j] / total;
    }
  }
  if (kind == KernelKind::discrete) {
    K.m /= static_cast<double>(std::max<std::size_t>(units.size(), 1));
    if (units.empty()) K.m.setIdentity();
  } else {
    K.m -= static_cast<double>(units.size()) * Eigen::MatrixXd::Identity(K.m.rows(), K.m.cols());
  }
  return K;
}

KernelMatrix glauber_kernel(const StateSpace& space, KernelKind kind) {
  std::vector<std::vector<Vertex>> units;
  for (Vertex v = 0; v < space.n; ++v)
    if (space.fixed[v] < 0) units.push_back({v});
  return unit_kernel(space, units, kind);
}

KernelMatrix block_kernel(const StateSpace& space, const BlockPartition& part, KernelKind kind) {
  if (part.owner.size() != space.n) throw Error("kernel: partition does not match the graph");
  std::vector<std::vector<Vertex>> units;
  for (const Block& b : part.blocks) {
    std::vector<Vertex> u;
    for (Vertex v : b.vertices)
      if (space.fixed[v] < 0) u.push_back(v);
    units.push_back(std::move(u));
  }
  return unit_kernel(space, units, kind);
}

double row_sum_error(const KernelMatrix& k) {
  const double target = k.kind == KernelKind::discrete ? 1.0 : 0.0;
  return (k.m.rowwise().sum().array() - target).abs().maxCoeff();
}

double reversibility_error(const KernelMatrix& k, const std::vector<double>& pi) {
  double worst = 0.0;
  const auto m = k.m.rows();
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j)
      worst = std::max(worst, std::abs(pi[static_cast<std::size_t>(i)] * k.m(i, j) -
                                       pi[static_cast<std::size_t>(j)] * k.m(j, i)));
  return worst;
}

bool irreducible(const KernelMatrix& k) {
  const auto m = k.m.rows();
  auto reach = [&](bool transpose) {
    std::vector<char> seen(static_cast<std::size_t>(m), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < m; ++j) {
        const double x = transpose ? k.m(j, i) : k.m(i, j);
        if (j != i && x > 0.0 && !seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = 1;
          ++count;
          stack.push_back(j);
        }
      }
    }
    return count == static_cast<std::size_t>(m);
  };
  return reach(false) && reach(true);
}

std::vector<double> stationary(const KernelMatrix& k) {
  const auto m = k.m.rows();
  if (!irreducible(k)) throw Error("stationary: kernel is reducible");
  Eigen::MatrixXd A = k.m.transpose();
  if (k.kind == KernelKind::discrete) A -= Eigen::MatrixXd::Identity(m, m);
  A.row(m - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  b(m - 1) = 1.0;
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
  return std::vector<double>(x.data(), x.data() + m);
}

double relaxation_time(const KernelMatrix& k, const std::vector<double>& pi) {
  const auto m = k.m.rows();
  if (m <= 1) return 0.0;
  if (k.units == 1) {
    if (!irreducible(k)) throw Error("relaxation: kernel is reducible");
    return 1.0;
  }
  Eigen::VectorXd s(m), si(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    s(i) = std::sqrt(pi[static_cast<std::size_t>(i)]);
    si(i) = 1.0 / s(i);
  }
  Eigen::MatrixXd S = s.asDiagonal() * k.m * si.asDiagonal();
  S = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("relaxation: eigen solver failed");
  const auto& ev = es.eigenvalues();  // ascending
  const double second = ev(m - 2);
  const double gap = k.kind == KernelKind::discrete ? 1.0 - second : -second;
  if (!(gap > 1e-13)) throw Error("relaxation: no spectral gap (reducible kernel?)");
  return 1.0 / gap;
}

std::uint64_t exact_tmix(const KernelMatrix& k, const std::vector<double>& pi, double eps,
                         std::uint64_t cap) {
  if (k.kind != KernelKind::discrete) throw Error("exact_tmix: discrete kernels only");
  const auto m = k.m.rows();
  Eigen::RowVectorXd p(m);
  for (Eigen::Index i = 0; i < m; ++i) p(i) = pi[static_cast<std::size_t>(i)];
  Eigen::MatrixXd M = k.m;
  for (std::uint64_t t = 1; t <= cap; ++t) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) worst = std::max(worst, 0.5 * (M.row(i) - p).cwiseAbs().sum());
    if (worst <= eps) return t;
    M = M * k.m;
  }
  throw Error("exact_tmix: not mixed within the step cap");
}

ComparisonReport comparison_check(const Graph& g, const BlockPartition& part, int k) {
  ComparisonReport rep;
  const StateSpace space = enumerate_colorings(g, k);
  rep.states = space.size();
  if (space.size() == 0) throw Error("comparison: no proper colorings");
  const auto pi = space.pi();
  rep.tau = relaxation_time(glauber_kernel(space, KernelKind::generator), pi);
  rep.tau_block = relaxation_time(block_kernel(space, part, KernelKind::generator), pi);
  for (const Block& b : part.blocks) {
    // Distinct boundary conditions on the outer boundary realized by proper colorings.
    std::map<std::vector<int>, std::size_t> realized;
    for (std::size_t i = 0; i < space.size(); ++i) {
      std::vector<int> key;
      key.reserve(b.outer_boundary.size());
      for (Vertex x : b.outer_boundary) key.push_back(space.states[i][x]);
      realized.emplace(std::move(key), i);
    }
    for (const auto& [key, witness] : realized) {
      std::vector<int> fixed = space.states[witness];
      for (Vertex v : b.vertices) fixed[v] = -1;
      const StateSpace local = enumerate_restricted(g, Model::coloring, k, 0.0, fixed);
      ++rep.boundary_conditions;
      if (local.size() <= 1) continue;
      const double tb = relaxation_time(glauber_kernel(local, KernelKind::generator), local.pi());
      rep.tau_b_max = std::max(rep.tau_b_max, tb);
    }
  }
  rep.q_max = 1.0;
  const double rhs = rep.tau_block * rep.tau_b_max * rep.q_max;
  rep.holds = rep.tau <= rhs;
  rep.slack = rhs - rep.tau;
  return rep;
}

}  // namespace blockmix
