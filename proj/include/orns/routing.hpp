// Spray routing, VLB with Leakage, and induced edge-load accounting.
//
// A packet released at source a at time t takes one uniformly random hop in
// each of h consecutive phases of length L, ending at intermediate a + X with
// X ~ d. It then takes one hop in each of the next h phases and arrives at b.
// Read backwards from b, the intermediate is b - Y; e is the law of -Y, so
// the backward marginal over intermediates is E_b(c) = e(c - b).
//
// VLB with Leakage routes the pair (a, b) through c with weight
// min(D_a(c), E_b(c)), normalized by the pair's total overlap. Shift symmetry
// makes the overlap depend only on b - a; eta is its minimum.

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "orns/core_model.hpp"
#include "orns/rational.hpp"

namespace orns {

/// Sum_c min(d[c], e[c - delta]).
template <class V>
V overlap_at(const std::vector<V>& d, const std::vector<V>& e, std::uint32_t delta) {
  const auto n = static_cast<std::uint32_t>(d.size());
  V acc{};
  for (std::uint32_t c = 0; c < n; ++c) {
    const V& x = d[c];
    const V& y = e[(c + n - delta) % n];
    acc += y < x ? y : x;
  }
  return acc;
}

/// Sum_c |d[c] - e[c - delta]|.
template <class V>
V l1_gap_at(const std::vector<V>& d, const std::vector<V>& e, std::uint32_t delta) {
  const auto n = static_cast<std::uint32_t>(d.size());
  V acc{};
  for (std::uint32_t c = 0; c < n; ++c) {
    const V diff = d[c] - e[(c + n - delta) % n];
    acc += diff < V{} ? V{} - diff : diff;
  }
  return acc;
}

template <class V>
struct EtaResult {
  V eta{};
  std::uint32_t offset = 0;
};

/// Minimum overlap over all offsets; ties resolve to the smallest offset.
template <class V>
EtaResult<V> compute_eta_min(const std::vector<V>& d, const std::vector<V>& e) {
  if (d.size() != e.size() || d.empty()) throw std::invalid_argument("eta: size mismatch");
  EtaResult<V> best{overlap_at(d, e, 0), 0};
  for (std::uint32_t delta = 1; delta < d.size(); ++delta) {
    V v = overlap_at(d, e, delta);
    if (v < best.eta) best = {v, delta};
  }
  return best;
}

double compute_eta(const GroupDistribution& d, const GroupDistribution& e);

struct SprayProtocol {
  const ShiftSchedule* sched = nullptr;
  std::uint32_t h = 1;
  std::uint64_t lambda = 1;
  /// Release time; the forward spray covers [t, t + hL).
  std::uint64_t t = 0;
  GroupDistribution forward;
  GroupDistribution backward;
  double eta = 0.0;
  std::uint32_t eta_offset = 0;
};

enum class EtaMethod {
  exact,
  /// eta >= 1 - (tv(d) + tv(e)) / 2, valid for every offset; O(N) per start.
  tv_bound,
};

/// Protocol for the batch released at t. Requires hL <= T.
SprayProtocol build_spray(const ShiftSchedule& sched, std::uint32_t h, std::uint64_t lambda,
                          std::uint64_t t, EtaMethod method = EtaMethod::exact);

/// Batch layout. Demand injected in ((b-1)hL, b hL] is released at b hL.
/// When hL divides T the loads are folded onto one period with T/(hL)
/// batches in steady state; otherwise `batches` batches run on an absolute
/// horizon of (batches + 1) hL timesteps.
struct BatchPlan {
  const ShiftSchedule* sched = nullptr;
  std::uint32_t h = 1;
  std::uint64_t lambda = 1;
  bool folded = false;
  std::uint64_t batches = 0;
  std::uint64_t horizon = 0;
  std::vector<SprayProtocol> protocols;
  double eta_min = 0.0;
};

BatchPlan plan_batches(const ShiftSchedule& sched, std::uint32_t h, std::uint64_t lambda,
                       std::uint64_t absolute_batches = 4, EtaMethod method = EtaMethod::exact);

enum class LoadMode { forward_half, backward_half, certified_sum };

struct EdgeLoadMap {
  std::uint32_t n_nodes = 0;
  std::uint64_t timesteps = 0;
  bool folded = false;
  /// load[t * N + i] is the flow on the edge leaving i at time t.
  std::vector<double> load;

  double at(std::uint64_t t, std::uint32_t i) const { return load[t * n_nodes + i]; }
  double max_load() const;
};

/// Receives the loads of every edge at timestep t, in increasing t.
using LoadVisitor = std::function<void(std::uint64_t t, std::span<const double> loads)>;

void visit_edge_loads(const BatchPlan& plan, const DemandSpec& demand, LoadMode mode,
                      const LoadVisitor& visit);

/// Materialized loads; refuses maps above 2^28 entries.
EdgeLoadMap edge_loads(const BatchPlan& plan, const DemandSpec& demand, LoadMode mode);
EdgeLoadMap edge_loads(const SprayProtocol& protocol, const DemandSpec& demand, LoadMode mode);

struct LatencyReport {
  /// First hop to last arrival.
  std::uint64_t in_flight = 0;
  /// In-flight plus the wait for the next aligned release.
  std::uint64_t total = 0;
};

LatencyReport max_latency(const SprayProtocol& protocol);

struct EdgeLoadEntry {
  std::uint64_t t = 0;
  std::uint32_t source = 0;
  double load = 0.0;
};

struct SimulationResult {
  double max_load = 0.0;
  double eta = 0.0;
  double rate = 0.0;
  bool folded = false;
  std::uint64_t batches = 0;
  LatencyReport latency;
  /// Highest loads, descending; ties by (t, source).
  std::vector<EdgeLoadEntry> top;
};

SimulationResult simulate(const ShiftSchedule& sched, std::uint32_t h, std::uint64_t lambda,
                          const DemandSpec& demand, LoadMode mode, std::size_t top_k,
                          std::uint64_t absolute_batches = 4,
                          EtaMethod method = EtaMethod::exact);

// ---------------------------------------------------------------------------
// Small-instance oracle with explicit paths and exact arithmetic.

inline constexpr std::uint32_t kTinyMaxNodes = 16;
inline constexpr std::uint64_t kTinyMaxLambda = 4;
inline constexpr std::uint32_t kTinyMaxHops = 2;

struct PathRecord {
  /// Times of the 2h physical hops, strictly increasing.
  std::vector<std::uint64_t> hops;
  std::uint32_t intermediate = 0;
  /// Edges from release to arrival: last hop + 1 - release.
  std::uint64_t latency = 0;
  Rational flow;
};

struct TinyRouting {
  std::vector<PathRecord> paths;
  /// Overlap of the pair before normalization.
  Rational pair_eta;
  /// Flow through each intermediate node.
  std::vector<Rational> per_node;
  /// D_a(c) and E_b(c) from path counts.
  std::vector<Rational> d_marginal, e_marginal;
};

/// Routes one unit from a to b for the batch released at t.
TinyRouting vlb_leak_tiny(const ShiftSchedule& sched, std::uint32_t h, std::uint64_t lambda,
                          std::uint32_t a, std::uint32_t b, std::uint64_t t);

/// Spray distribution with exact rational masses.
std::vector<Rational> spray_distribution_exact(const ShiftSchedule& sched, const SprayConfig& config,
                                               std::uint64_t t);

/// Exact loads on edges at times [t, t + 2hL) when every source a sends
/// `amount` to perm[a] through the oracle's paths. Index (tau - t) * N + i.
std::vector<Rational> tiny_edge_loads(const ShiftSchedule& sched, std::uint32_t h,
                                      std::uint64_t lambda, std::uint64_t t,
                                      const std::vector<std::uint32_t>& perm,
                                      const Rational& amount);

/// The dominating flow (forward + backward spray loads) / eta of the same
/// batch in exact arithmetic, same indexing as tiny_edge_loads.
std::vector<Rational> dominating_loads_exact(const ShiftSchedule& sched, std::uint32_t h,
                                             std::uint64_t lambda, std::uint64_t t,
                                             const Rational& amount);

LatencyReport max_latency(const TinyRouting& routing, std::uint64_t alignment_wait);

}  // namespace orns
