#include "orns/routing.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <type_traits>

#include "orns/fourier.hpp"

namespace orns {

double compute_eta(const GroupDistribution& d, const GroupDistribution& e) {
  const std::vector<double> dv(d.mass().begin(), d.mass().end());
  const std::vector<double> ev(e.mass().begin(), e.mass().end());
  return compute_eta_min(dv, ev).eta;
}

SprayProtocol build_spray(const ShiftSchedule& sched, std::uint32_t h, std::uint64_t lambda,
                          std::uint64_t t, EtaMethod method) {
  const SprayConfig fwd{h, lambda, Direction::forward, StartSet::all};
  const SprayConfig bwd{h, lambda, Direction::backward, StartSet::all};
  SprayProtocol p{&sched, h, lambda, t, spray_distribution(sched, fwd, t),
                  spray_distribution(sched, bwd, t), 0.0, 0};
  if (method == EtaMethod::exact) {
    const std::vector<double> dv(p.forward.mass().begin(), p.forward.mass().end());
    const std::vector<double> ev(p.backward.mass().begin(), p.backward.mass().end());
    const auto r = compute_eta_min(dv, ev);
    p.eta = r.eta;
    p.eta_offset = r.offset;
  } else {
    p.eta = std::max(0.0, 1.0 - 0.5 * (tv_to_uniform(p.forward) + tv_to_uniform(p.backward)));
  }
  return p;
}

BatchPlan plan_batches(const ShiftSchedule& sched, std::uint32_t h, std::uint64_t lambda,
                       std::uint64_t absolute_batches, EtaMethod method) {
  SprayConfig{h, lambda, Direction::forward, StartSet::all}.validate(sched.period());
  BatchPlan plan;
  plan.sched = &sched;
  plan.h = h;
  plan.lambda = lambda;
  const std::uint64_t window = h * lambda;
  plan.folded = sched.period() % window == 0;
  if (plan.folded) {
    plan.batches = sched.period() / window;
    plan.horizon = sched.period();
  } else {
    if (absolute_batches == 0) throw std::invalid_argument("need at least one batch");
    plan.batches = absolute_batches;
    plan.horizon = (absolute_batches + 1) * window;
  }
  plan.eta_min = 1.0;
  for (std::uint64_t b = 0; b < plan.batches; ++b) {
    plan.protocols.push_back(build_spray(sched, h, lambda, b * window, method));
    plan.eta_min = std::min(plan.eta_min, plan.protocols.back().eta);
  }
  return plan;
}

namespace {

template <class V>
V from_ratio(std::uint64_t num, std::uint64_t den) {
  if constexpr (std::is_same_v<V, Rational>)
    return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
  else
    return static_cast<V>(num) / static_cast<V>(den);
}

// Node masses at the start of each forward phase 1..h given the release
// masses x1.
template <class V>
std::vector<std::vector<V>> forward_masses(const ShiftSchedule& sched, std::uint32_t h,
                                           std::uint64_t lambda, std::uint64_t t,
                                           std::vector<V> x1) {
  const std::uint32_t n = sched.n_nodes();
  std::vector<std::vector<V>> out;
  out.push_back(std::move(x1));
  for (std::uint32_t j = 1; j < h; ++j) {
    const auto counts =
        window_histogram(sched, t + (j - 1) * lambda, lambda, Direction::forward);
    const auto& cur = out.back();
    std::vector<V> next(n, V{});
    for (std::uint32_t s = 0; s < n; ++s) {
      if (!counts[s]) continue;
      const V w = from_ratio<V>(counts[s], lambda);
      for (std::uint32_t i = 0; i < n; ++i) next[(i + s) % n] += w * cur[i];
    }
    out.push_back(std::move(next));
  }
  return out;
}

// Node masses at the end of each backward phase h+1..2h given the arrival
// masses; entry p - h - 1 belongs to phase p.
template <class V>
std::vector<std::vector<V>> backward_masses(const ShiftSchedule& sched, std::uint32_t h,
                                            std::uint64_t lambda, std::uint64_t t,
                                            std::vector<V> arrival) {
  const std::uint32_t n = sched.n_nodes();
  std::vector<std::vector<V>> out(h);
  out[h - 1] = std::move(arrival);
  for (std::uint32_t p = 2 * h; p > h + 1; --p) {
    const auto counts = window_histogram(sched, t + (p - 1) * lambda, lambda, Direction::forward);
    const auto& cur = out[p - h - 1];
    std::vector<V> prev(n, V{});
    for (std::uint32_t s = 0; s < n; ++s) {
      if (!counts[s]) continue;
      const V w = from_ratio<V>(counts[s], lambda);
      for (std::uint32_t i = 0; i < n; ++i) prev[i] += w * cur[(i + s) % n];
    }
    out[p - h - 2] = std::move(prev);
  }
  return out;
}

}  // namespace

void visit_edge_loads(const BatchPlan& plan, const DemandSpec& demand, LoadMode mode,
                      const LoadVisitor& visit) {
  const ShiftSchedule& sched = *plan.sched;
  const std::uint32_t n = sched.n_nodes();
  if (demand.n_nodes() != n) throw std::invalid_argument("demand size differs from N");
  const std::uint32_t h = plan.h;
  const std::uint64_t lambda = plan.lambda;
  const std::uint64_t window = h * lambda;
  if (mode == LoadMode::certified_sum)
    for (const auto& p : plan.protocols)
      if (!(p.eta > 0.0))
        throw std::domain_error("eta = 0: forward and backward sprays are disjointly supported");

  // A permutation demand gives every node egress and ingress rate * window
  // per batch.
  const double amount = demand.rate * static_cast<double>(window);
  const std::vector<double> ones(n, amount);
  const bool want_fwd = mode != LoadMode::backward_half;
  const bool want_bwd = mode != LoadMode::forward_half;
  const std::uint64_t windows = plan.folded ? plan.batches : plan.batches + 1;
  const double inv_l = 1.0 / static_cast<double>(lambda);

  std::vector<double> loads(n);
  for (std::uint64_t w = 0; w < windows; ++w) {
    const std::uint64_t t0 = w * window;
    const bool has_fwd = want_fwd && w < plan.batches;
    const bool has_bwd = want_bwd && (plan.folded || w >= 1);
    const std::uint64_t fb = w;
    const std::uint64_t bb = plan.folded ? (w + plan.batches - 1) % plan.batches : w - 1;
    std::vector<std::vector<double>> xs, ys;
    double fscale = inv_l, bscale = inv_l;
    if (has_fwd) {
      xs = forward_masses<double>(sched, h, lambda, plan.protocols[fb].t, ones);
      if (mode == LoadMode::certified_sum) fscale /= plan.protocols[fb].eta;
    }
    if (has_bwd) {
      ys = backward_masses<double>(sched, h, lambda, plan.protocols[bb].t, ones);
      if (mode == LoadMode::certified_sum) bscale /= plan.protocols[bb].eta;
    }
    for (std::uint64_t u = 0; u < window; ++u) {
      const std::uint64_t tau = t0 + u;
      const std::uint32_t j = static_cast<std::uint32_t>(u / lambda);
      std::fill(loads.begin(), loads.end(), 0.0);
      if (has_fwd)
        for (std::uint32_t i = 0; i < n; ++i) loads[i] += xs[j][i] * fscale;
      if (has_bwd) {
        const std::uint32_t s = sched.shift_at(tau);
        const auto& y = ys[j];
        for (std::uint32_t i = 0; i < n; ++i) {
          const std::uint32_t k = i + s >= n ? i + s - n : i + s;
          loads[i] += y[k] * bscale;
        }
      }
      visit(tau, loads);
    }
  }
}

double EdgeLoadMap::max_load() const {
  double m = 0.0;
  for (double v : load) m = std::max(m, v);
  return m;
}

EdgeLoadMap edge_loads(const BatchPlan& plan, const DemandSpec& demand, LoadMode mode) {
  EdgeLoadMap map;
  map.n_nodes = plan.sched->n_nodes();
  map.timesteps = plan.horizon;
  map.folded = plan.folded;
  if (map.timesteps * map.n_nodes > (std::uint64_t{1} << 28))
    throw std::length_error("edge load map too large; use visit_edge_loads");
  map.load.assign(map.timesteps * map.n_nodes, 0.0);
  visit_edge_loads(plan, demand, mode, [&](std::uint64_t t, std::span<const double> l) {
    std::copy(l.begin(), l.end(), map.load.begin() + static_cast<std::ptrdiff_t>(t * map.n_nodes));
  });
  return map;
}

EdgeLoadMap edge_loads(const SprayProtocol& protocol, const DemandSpec& demand, LoadMode mode) {
  return edge_loads(plan_batches(*protocol.sched, protocol.h, protocol.lambda), demand, mode);
}

LatencyReport max_latency(const SprayProtocol& protocol) {
  // Every path hops once in each of 2h consecutive phases, so the last
  // arrival is at most 2hL after release. Demand waits at most hL - 1
  // timesteps for the next aligned release.
  const std::uint64_t window = std::uint64_t{protocol.h} * protocol.lambda;
  return LatencyReport{2 * window, 2 * window + window - 1};
}

SimulationResult simulate(const ShiftSchedule& sched, std::uint32_t h, std::uint64_t lambda,
                          const DemandSpec& demand, LoadMode mode, std::size_t top_k,
                          std::uint64_t absolute_batches, EtaMethod method) {
  const BatchPlan plan = plan_batches(sched, h, lambda, absolute_batches, method);
  SimulationResult res;
  res.eta = plan.eta_min;
  res.rate = demand.rate;
  res.folded = plan.folded;
  res.batches = plan.batches;
  res.latency = max_latency(plan.protocols.front());

  auto worse = [](const EdgeLoadEntry& a, const EdgeLoadEntry& b) {
    if (a.load != b.load) return a.load > b.load;
    if (a.t != b.t) return a.t < b.t;
    return a.source < b.source;
  };
  // Heap whose top is the weakest retained entry.
  std::priority_queue<EdgeLoadEntry, std::vector<EdgeLoadEntry>, decltype(worse)> heap(worse);
  visit_edge_loads(plan, demand, mode, [&](std::uint64_t t, std::span<const double> l) {
    for (std::uint32_t i = 0; i < l.size(); ++i) {
      res.max_load = std::max(res.max_load, l[i]);
      if (top_k == 0) continue;
      const EdgeLoadEntry e{t, i, l[i]};
      if (heap.size() < top_k) {
        heap.push(e);
      } else if (worse(e, heap.top())) {
        heap.pop();
        heap.push(e);
      }
    }
  });
  while (!heap.empty()) {
    res.top.push_back(heap.top());
    heap.pop();
  }
  std::sort(res.top.begin(), res.top.end(), worse);
  return res;
}

// ---------------------------------------------------------------------------

namespace {

void check_tiny(const ShiftSchedule& sched, std::uint32_t h, std::uint64_t lambda) {
  if (sched.n_nodes() > kTinyMaxNodes || lambda > kTinyMaxLambda || h > kTinyMaxHops || h == 0 ||
      lambda == 0)
    throw std::invalid_argument("tiny oracle limited to N <= 16, lambda <= 4, 1 <= h <= 2");
  SprayConfig{h, lambda, Direction::forward, StartSet::all}.validate(sched.period());
}

struct HalfPath {
  std::vector<std::uint64_t> hops;
  std::uint32_t end = 0;
};

// All Lambda^h hop choices over phases first..first+h-1, in lexicographic
// order of the choice tuple. Starting node `from`; `end` is the final node.
std::vector<HalfPath> enumerate_half(const ShiftSchedule& sched, std::uint32_t h,
                                     std::uint64_t lambda, std::uint64_t phase0,
                                     std::uint32_t from) {
  const std::uint32_t n = sched.n_nodes();
  std::uint64_t total = 1;
  for (std::uint32_t j = 0; j < h; ++j) total *= lambda;
  std::vector<HalfPath> out;
  out.reserve(total);
  for (std::uint64_t code = 0; code < total; ++code) {
    HalfPath p;
    std::uint64_t rem = code;
    std::vector<std::uint64_t> digits(h);
    for (std::uint32_t j = h; j-- > 0;) {
      digits[j] = rem % lambda;
      rem /= lambda;
    }
    std::uint32_t x = from;
    for (std::uint32_t j = 0; j < h; ++j) {
      const std::uint64_t k = phase0 + j * lambda + digits[j];
      p.hops.push_back(k);
      x = (x + sched.shift_at(k)) % n;
    }
    p.end = x;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

TinyRouting vlb_leak_tiny(const ShiftSchedule& sched, std::uint32_t h, std::uint64_t lambda,
                          std::uint32_t a, std::uint32_t b, std::uint64_t t) {
  check_tiny(sched, h, lambda);
  const std::uint32_t n = sched.n_nodes();
  if (a >= n || b >= n) throw std::invalid_argument("node out of range");
  const auto fwd = enumerate_half(sched, h, lambda, t, a);
  // Backward halves start at the intermediate, which is b minus the shift
  // total; enumerate from 0 and translate.
  auto bwd = enumerate_half(sched, h, lambda, t + h * lambda, 0);
  for (auto& p : bwd) p.end = (b + n - p.end) % n;  // now the intermediate

  std::vector<std::vector<const HalfPath*>> by_c_fwd(n), by_c_bwd(n);
  for (const auto& p : fwd) by_c_fwd[p.end].push_back(&p);
  for (const auto& p : bwd) by_c_bwd[p.end].push_back(&p);

  const auto paths_per_half = static_cast<std::int64_t>(fwd.size());
  TinyRouting out;
  out.per_node.assign(n, Rational(0));
  out.d_marginal.resize(n);
  out.e_marginal.resize(n);
  std::int64_t matched = 0;
  for (std::uint32_t c = 0; c < n; ++c) {
    const auto cd = static_cast<std::int64_t>(by_c_fwd[c].size());
    const auto ce = static_cast<std::int64_t>(by_c_bwd[c].size());
    out.d_marginal[c] = Rational(cd, paths_per_half);
    out.e_marginal[c] = Rational(ce, paths_per_half);
    matched += std::min(cd, ce);
  }
  if (matched == 0) throw std::domain_error("forward and backward sprays are disjointly supported");
  out.pair_eta = Rational(matched, paths_per_half);
  const Rational flow(1, matched);
  for (std::uint32_t c = 0; c < n; ++c) {
    const std::size_t m = std::min(by_c_fwd[c].size(), by_c_bwd[c].size());
    for (std::size_t i = 0; i < m; ++i) {
      PathRecord rec;
      rec.hops = by_c_fwd[c][i]->hops;
      rec.hops.insert(rec.hops.end(), by_c_bwd[c][i]->hops.begin(), by_c_bwd[c][i]->hops.end());
      rec.intermediate = c;
      rec.latency = rec.hops.back() + 1 - t;
      rec.flow = flow;
      out.paths.push_back(std::move(rec));
    }
    out.per_node[c] = Rational(static_cast<std::int64_t>(m)) * flow;
  }
  return out;
}

std::vector<Rational> spray_distribution_exact(const ShiftSchedule& sched, const SprayConfig& config,
                                               std::uint64_t t) {
  config.validate(sched.period());
  const std::uint32_t n = sched.n_nodes();
  std::vector<Rational> acc(n, Rational(0));
  acc[0] = Rational(1);
  for (std::uint32_t j = 1; j <= config.hop_count; ++j) {
    const auto counts =
        window_histogram(sched, phase_start(config, t, j), config.phase_len, config.direction);
    std::vector<Rational> next(n, Rational(0));
    for (std::uint32_t s = 0; s < n; ++s) {
      if (!counts[s]) continue;
      const Rational w(static_cast<std::int64_t>(counts[s]),
                       static_cast<std::int64_t>(config.phase_len));
      for (std::uint32_t c = 0; c < n; ++c)
        if (acc[c] != Rational(0)) next[(c + s) % n] += w * acc[c];
    }
    acc = std::move(next);
  }
  return acc;
}

std::vector<Rational> tiny_edge_loads(const ShiftSchedule& sched, std::uint32_t h,
                                      std::uint64_t lambda, std::uint64_t t,
                                      const std::vector<std::uint32_t>& perm,
                                      const Rational& amount) {
  check_tiny(sched, h, lambda);
  const std::uint32_t n = sched.n_nodes();
  if (!is_permutation_of(perm, n)) throw std::invalid_argument("demand is not a permutation");
  const std::uint64_t span = 2 * h * lambda;
  std::vector<Rational> loads(span * n, Rational(0));
  for (std::uint32_t a = 0; a < n; ++a) {
    const auto routing = vlb_leak_tiny(sched, h, lambda, a, perm[a], t);
    for (const auto& p : routing.paths) {
      std::uint32_t x = a;
      const Rational f = amount * p.flow;
      for (auto k : p.hops) {
        loads[(k - t) * n + x] += f;
        x = (x + sched.shift_at(k)) % n;
      }
    }
  }
  return loads;
}

std::vector<Rational> dominating_loads_exact(const ShiftSchedule& sched, std::uint32_t h,
                                             std::uint64_t lambda, std::uint64_t t,
                                             const Rational& amount) {
  check_tiny(sched, h, lambda);
  const std::uint32_t n = sched.n_nodes();
  const auto d = spray_distribution_exact(sched, {h, lambda, Direction::forward, StartSet::all}, t);
  const auto e = spray_distribution_exact(sched, {h, lambda, Direction::backward, StartSet::all}, t);
  const Rational eta = compute_eta_min(d, e).eta;
  if (eta == Rational(0)) throw std::domain_error("eta = 0");
  const std::vector<Rational> ones(n, amount);
  const auto xs = forward_masses<Rational>(sched, h, lambda, t, ones);
  const auto ys = backward_masses<Rational>(sched, h, lambda, t, ones);
  const std::uint64_t window = h * lambda;
  const Rational scale = Rational(1) / (Rational(static_cast<std::int64_t>(lambda)) * eta);
  std::vector<Rational> loads(2 * window * n, Rational(0));
  for (std::uint64_t u = 0; u < window; ++u) {
    const auto j = static_cast<std::uint32_t>(u / lambda);
    for (std::uint32_t i = 0; i < n; ++i) loads[u * n + i] = xs[j][i] * scale;
  }
  for (std::uint64_t u = 0; u < window; ++u) {
    const auto j = static_cast<std::uint32_t>(u / lambda);
    const std::uint32_t s = sched.shift_at(t + window + u);
    for (std::uint32_t i = 0; i < n; ++i)
      loads[(window + u) * n + i] = ys[j][(i + s) % n] * scale;
  }
  return loads;
}

LatencyReport max_latency(const TinyRouting& routing, std::uint64_t alignment_wait) {
  LatencyReport r;
  for (const auto& p : routing.paths)
    if (p.flow > Rational(0)) r.in_flight = std::max(r.in_flight, p.latency);
  r.total = r.in_flight + alignment_wait;
  return r;
}

}  // namespace orns
