#include "orns/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "orns/certifier.hpp"
#include "orns/core_model.hpp"
#include "orns/discrepancy.hpp"
#include "orns/generators.hpp"
#include "orns/multiclass.hpp"
#include "orns/rng.hpp"
#include "orns/routing.hpp"

namespace orns::cli {

namespace {

using json = nlohmann::json;

// Input problems that should exit with the usage code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t parse_uint(std::string_view s, const char* what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size())
    throw UsageError(std::string("invalid ") + what + ": '" + std::string(s) + "'");
  return v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

ShiftSchedule load_shift(const std::string& path) {
  auto sched = read_schedule_file(path);
  if (!std::holds_alternative<ShiftSchedule>(sched))
    throw UsageError("this command needs a shift schedule: " + path);
  return std::get<ShiftSchedule>(std::move(sched));
}

void write_sidecar(const std::string& out_path, const std::vector<json>& lines) {
  std::ofstream f(out_path + ".meta.jsonl", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write sidecar for " + out_path);
  for (const auto& j : lines) f << j.dump() << '\n';
}

DemandSpec parse_demand(const std::string& text, std::uint32_t n, double rate) {
  if (text == "identity") {
    std::vector<std::uint32_t> p(n);
    for (std::uint32_t i = 0; i < n; ++i) p[i] = i;
    return DemandSpec(rate, {p});
  }
  if (text.rfind("shift:", 0) == 0) {
    const auto k = parse_uint(std::string_view(text).substr(6), "demand shift") % n;
    std::vector<std::uint32_t> p(n);
    for (std::uint32_t i = 0; i < n; ++i) p[i] = static_cast<std::uint32_t>((i + k) % n);
    return DemandSpec(rate, {p});
  }
  if (text.rfind("perm:seed=", 0) == 0) {
    const auto seed = parse_uint(std::string_view(text).substr(10), "demand seed");
    return DemandSpec(rate, {random_permutation(n, seed)});
  }
  throw UsageError("unknown demand '" + text + "' (use perm:seed=<s>, shift:<k> or identity)");
}

}  // namespace

std::vector<std::uint32_t> parse_h_list(const std::string& text) {
  std::vector<std::uint32_t> out;
  for (const auto& part : split(text, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(static_cast<std::uint32_t>(parse_uint(part, "h")));
    } else {
      const auto lo = parse_uint(std::string_view(part).substr(0, dots), "h range");
      const auto hi = parse_uint(std::string_view(part).substr(dots + 2), "h range");
      if (lo > hi) throw UsageError("empty h range: " + part);
      for (auto h = lo; h <= hi; ++h) out.push_back(static_cast<std::uint32_t>(h));
    }
  }
  if (out.empty()) throw UsageError("empty h list");
  for (auto h : out)
    if (h == 0) throw UsageError("h must be >= 1");
  return out;
}

LambdaMap parse_lambda_map(const std::string& text) {
  LambdaMap out;
  for (const auto& part : split(text, ',')) {
    if (part == "auto") continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw UsageError("expected h=value in --lambda, got '" + part + "'");
    const auto h = parse_uint(std::string_view(part).substr(0, eq), "lambda key");
    const auto v = parse_uint(std::string_view(part).substr(eq + 1), "lambda value");
    out[static_cast<std::uint32_t>(h)] = v;
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Oblivious reconfigurable network schedule toolkit"};
  app.name("orns");
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: ORNS_THREADS or all cores)");

  // gen-random
  auto* gr = app.add_subcommand("gen-random", "Uniformly random shift schedule");
  std::uint32_t gr_n = 0;
  std::uint64_t gr_t = 0, gr_seed = 0;
  std::string gr_out;
  gr->add_option("--n", gr_n, "Number of nodes")->required()->check(CLI::PositiveNumber);
  gr->add_option("--t", gr_t, "Period")->required()->check(CLI::PositiveNumber);
  gr->add_option("--seed", gr_seed, "RNG seed")->required();
  gr->add_option("--out", gr_out, "Output schedule file")->required();

  // gen-convolve
  auto* gc = app.add_subcommand("gen-convolve", "Convolution schedule from a certified base");
  std::uint32_t gc_n = 0, gc_h = 0, gc_retries = 64;
  std::uint64_t gc_lambda = 0, gc_seed = 0;
  double gc_eps = 0.5;
  std::string gc_out, gc_base;
  gc->add_option("--n", gc_n, "Number of nodes");
  gc->add_option("--lambda", gc_lambda, "Base window length");
  gc->add_option("--H", gc_h, "Number of convolution factors")->required()->check(CLI::PositiveNumber);
  gc->add_option("--eps", gc_eps, "Target epsilon")->check(CLI::Range(0.0, 1.0));
  auto* gc_seed_opt = gc->add_option("--seed", gc_seed, "RNG seed for base sampling");
  gc->add_option("--max-retries", gc_retries, "Base sampling attempts")->check(CLI::PositiveNumber);
  gc->add_option("--base", gc_base, "Use this base schedule instead of sampling");
  gc->add_option("--out", gc_out, "Output schedule file")->required();

  // gen-derand
  auto* gd = app.add_subcommand("gen-derand", "Deterministic recursive-partition schedule");
  std::uint32_t gd_log2n = 0;
  std::string gd_out;
  gd->add_option("--log2n", gd_log2n, "log2 of the node count")->required()->check(CLI::Range(1, 20));
  gd->add_option("--out", gd_out, "Output schedule file")->required();

  // gen-primitive-root
  auto* gp = app.add_subcommand("gen-primitive-root", "Powers of a primitive root (prime N)");
  std::uint32_t gp_n = 0;
  std::string gp_out;
  gp->add_option("--n", gp_n, "Prime number of nodes")->required();
  gp->add_option("--out", gp_out, "Output schedule file")->required();

  // certify
  auto* ce = app.add_subcommand("certify", "Fourier 2-norm universality test");
  std::string ce_sched, ce_h = "1", ce_lambda = "auto";
  double ce_eps = 0.5, ce_slack = 1e-6;
  bool ce_summary = false;
  ce->add_option("--schedule", ce_sched, "Shift schedule file")->required()->check(CLI::ExistingFile);
  ce->add_option("--eps", ce_eps, "Epsilon")->required()->check(CLI::Range(0.0, 1.0));
  ce->add_option("--h", ce_h, "Hop counts, e.g. 1..10 or 1,2,4");
  ce->add_option("--lambda", ce_lambda, "auto or h=value pairs");
  ce->add_option("--slack", ce_slack, "Marginal flag band around eps/2");
  ce->add_flag("--summary-only", ce_summary, "Print one line per h instead of every record");

  // certify-base
  auto* cb = app.add_subcommand("certify-base", "2H-norm test of a base window");
  std::string cb_sched;
  double cb_eps = 0.5;
  std::uint32_t cb_h = 1;
  cb->add_option("--schedule", cb_sched, "Base schedule file")->required()->check(CLI::ExistingFile);
  cb->add_option("--eps", cb_eps, "Epsilon")->required()->check(CLI::Range(0.0, 1.0));
  cb->add_option("--H", cb_h, "Number of convolution factors")->required()->check(CLI::PositiveNumber);

  // markov-test
  auto* mt = app.add_subcommand("markov-test", "Transition-matrix test for any permutation schedule");
  std::string mt_sched, mt_t = "0";
  std::uint32_t mt_h = 1;
  std::uint64_t mt_lambda = 1;
  double mt_eps = 0.0;
  mt->add_option("--schedule", mt_sched, "Schedule file (shift or perm)")->required()->check(CLI::ExistingFile);
  mt->add_option("--h", mt_h, "Hop count")->required()->check(CLI::PositiveNumber);
  mt->add_option("--lambda", mt_lambda, "Phase length")->required()->check(CLI::PositiveNumber);
  mt->add_option("--t", mt_t, "Start timestep, or 'all' for every start");
  auto* mt_eps_opt = mt->add_option("--eps", mt_eps, "Fail when a value exceeds eps/2");

  // simulate
  auto* si = app.add_subcommand("simulate", "Edge loads of VLB with Leakage");
  std::string si_sched, si_rate = "auto", si_demand = "perm:seed=0", si_mode = "certified_sum",
                        si_lambda = "auto", si_eta = "auto";
  std::uint32_t si_h = 1;
  double si_eps = 0.5;
  std::size_t si_top = 10;
  std::uint64_t si_batches = 4;
  si->add_option("--schedule", si_sched, "Shift schedule file")->required()->check(CLI::ExistingFile);
  si->add_option("--h", si_h, "Hop count")->required()->check(CLI::PositiveNumber);
  si->add_option("--eps", si_eps, "Epsilon")->check(CLI::Range(0.0, 1.0));
  si->add_option("--lambda", si_lambda, "Phase length or auto");
  si->add_option("--rate", si_rate, "Demand rate or auto = (1-eps)/(2h)");
  si->add_option("--demand", si_demand, "perm:seed=<s>, shift:<k> or identity");
  si->add_option("--mode", si_mode, "certified_sum, forward_half or backward_half");
  si->add_option("--top-k", si_top, "Rows of the most loaded edges");
  si->add_option("--batches", si_batches, "Batches when h*lambda does not divide T")->check(CLI::PositiveNumber);
  si->add_option("--eta", si_eta, "exact, tv or auto");

  // multiclass-check
  auto* mc = app.add_subcommand("multiclass-check", "Feasibility of simultaneous traffic classes");
  std::string mc_rates, mc_lambda = "auto";
  double mc_eps = 0.5;
  bool mc_tv = false;
  std::uint64_t mc_horizon = 0;
  std::uint32_t mc_n = 0;
  mc->add_option("--eps", mc_eps, "Epsilon")->required()->check(CLI::Range(0.0, 1.0));
  mc->add_option("--rates", mc_rates, "CSV of h,rate or h,t,rate")->required()->check(CLI::ExistingFile);
  mc->add_flag("--time-varying", mc_tv, "Rates file is h,t,rate");
  mc->add_option("--lambda", mc_lambda, "auto or h=value pairs (time-varying)");
  mc->add_option("--n", mc_n, "Node count for --lambda auto");
  mc->add_option("--horizon", mc_horizon, "Timesteps to evaluate (time-varying)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gr) {
      auto sched = gen_random(gr_n, gr_t, gr_seed);
      write_schedule_file(gr_out, sched);
      write_sidecar(gr_out, {json{{"construction", "random"},
                                  {"n", gr_n},
                                  {"t", gr_t},
                                  {"seed", gr_seed},
                                  {"digest", sched.digest()}}});
      err << "wrote " << gr_out << " (N=" << gr_n << ", T=" << gr_t << ")\n";
      return kExitOk;
    }

    if (*gc) {
      json meta{{"construction", "convolution"}, {"H", gc_h}, {"eps", gc_eps}};
      ShiftSchedule base = [&] {
        if (!gc_base.empty()) {
          meta["base_file"] = gc_base;
          return load_shift(gc_base);
        }
        if (gc_seed_opt->count() == 0) throw UsageError("--seed is required when sampling a base");
        if (gc_n == 0 || gc_lambda == 0) throw UsageError("--n and --lambda are required when sampling");
        auto res = gen_base_certified(gc_n, gc_lambda, gc_h, gc_eps, gc_seed, gc_retries);
        meta["seed"] = gc_seed;
        meta["attempts"] = res.attempts;
        return std::move(res.base);
      }();
      const auto cert = certify_base(base, gc_eps, gc_h);
      meta["n"] = base.n_nodes();
      meta["lambda"] = base.period();
      meta["base_norm"] = cert.norm;
      meta["base_threshold"] = cert.threshold;
      meta["base_pass"] = cert.pass;
      meta["base_digest"] = base.digest();
      auto sched = gen_convolution(base, gc_h);
      meta["t"] = sched.period();
      meta["digest"] = sched.digest();
      write_schedule_file(gc_out, sched);
      write_sidecar(gc_out, {meta});
      err << "wrote " << gc_out << " (T=" << sched.period() << ", base norm " << fmt(cert.norm)
          << ")\n";
      return cert.pass ? kExitOk : kExitNegative;
    }

    if (*gd) {
      auto res = gen_derand(gd_log2n);
      write_schedule_file(gd_out, res.schedule);
      const auto& tr = res.tree;
      std::vector<json> lines;
      lines.push_back(json{{"construction", "derandomized"},
                           {"n", tr.n_nodes},
                           {"log2n", tr.depth},
                           {"backend", "conditional-expectations"},
                           {"k_impl", tr.k_impl},
                           {"const_c", tr.const_c},
                           {"rows", tr.rows},
                           {"digest", res.schedule.digest()}});
      for (std::uint32_t l = 1; l <= tr.depth; ++l)
        lines.push_back(json{{"level", l},
                             {"max_norm", tr.level_max[l]},
                             {"recursion_bound", tr.recursion_bound[l]},
                             {"level_bound", tr.level_bound(l)},
                             {"backend_lambda", tr.backend_lambda[l - 1]},
                             {"split_disc_max", tr.split_disc_max[l - 1]}});
      write_sidecar(gd_out, lines);
      err << "wrote " << gd_out << " (N=" << tr.n_nodes << ")\n";
      return kExitOk;
    }

    if (*gp) {
      if (!is_prime(gp_n)) throw UsageError("--n must be prime");
      auto sched = gen_primitive_root(gp_n);
      write_schedule_file(gp_out, sched);
      write_sidecar(gp_out, {json{{"construction", "primitive-root"},
                                  {"n", gp_n},
                                  {"root", least_primitive_root(gp_n)},
                                  {"t", sched.period()},
                                  {"guarantee", "none"},
                                  {"digest", sched.digest()}}});
      return kExitOk;
    }

    if (*ce) {
      const auto sched = load_shift(ce_sched);
      const auto lm = parse_lambda_map(ce_lambda);
      // An auto phase length that does not fit in the period means the
      // schedule cannot be certified at that h: a negative verdict.
      std::vector<std::uint32_t> hs;
      std::vector<std::string> skipped;
      for (auto h : parse_h_list(ce_h)) {
        if (lm.count(h) == 0 && lambda_for_h(ce_eps, h, sched.n_nodes()) * h > sched.period()) {
          skipped.push_back("h=" + std::to_string(h) + " not certified: lambda*h = " +
                            std::to_string(lambda_for_h(ce_eps, h, sched.n_nodes()) * h) +
                            " exceeds period " + std::to_string(sched.period()));
          continue;
        }
        hs.push_back(h);
      }
      try {
        resolve_lambdas(sched, ce_eps, hs, lm);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      CertOptions opt;
      opt.slack = ce_slack;
      opt.threads = threads;
      if (ce_summary) {
        out << "h,lambda,start_set,starts,max_norm_p,max_norm_q,worst_t,failures,marginals\n";
      } else {
        write_report_header(out);
      }
      auto summary = certify_stream(
          sched, ce_eps, hs, lm,
          [&](const CertRecord& r) {
            if (!ce_summary) write_record_csv(out, r);
          },
          opt);
      if (ce_summary)
        for (const auto& h : summary.per_h)
          out << h.h << ',' << h.lambda << ',' << (h.start_set == StartSet::aligned ? "aligned" : "all")
              << ',' << h.starts << ',' << fmt(h.max_norm_p) << ',' << fmt(h.max_norm_q) << ','
              << h.worst_t << ',' << h.failures << ',' << h.marginals << '\n';
      const bool universal = summary.universal && skipped.empty();
      write_report_footer(out, universal, ce_eps);
      for (const auto& w : summary.warnings) err << "warning: " << w << '\n';
      for (const auto& w : skipped) err << "warning: " << w << '\n';
      return universal ? kExitOk : kExitNegative;
    }

    if (*cb) {
      const auto base = load_shift(cb_sched);
      const auto r = certify_base(base, cb_eps, cb_h);
      out << "norm,threshold,pass\n"
          << fmt(r.norm) << ',' << fmt(r.threshold) << ',' << (r.pass ? "true" : "false") << '\n';
      return r.pass ? kExitOk : kExitNegative;
    }

    if (*mt) {
      auto any = read_schedule_file(mt_sched);
      const PermSchedule sched = std::holds_alternative<PermSchedule>(any)
                                     ? std::get<PermSchedule>(std::move(any))
                                     : PermSchedule::from_shift(std::get<ShiftSchedule>(any));
      if (sched.n_nodes() > kMarkovMaxNodes)
        throw UsageError("markov-test supports N <= " + std::to_string(kMarkovMaxNodes));
      std::vector<std::uint64_t> starts;
      if (mt_t == "all") {
        const std::uint64_t span = mt_h * mt_lambda;
        const std::uint64_t step = sched.period() % span == 0 ? span : 1;
        for (std::uint64_t t = 0; t < sched.period(); t += step) starts.push_back(t);
      } else {
        starts.push_back(parse_uint(mt_t, "--t"));
      }
      bool ok = true;
      out << "h,lambda,t,value\n";
      for (auto t : starts) {
        const double v = markov_test(sched, mt_h, mt_lambda, t);
        out << mt_h << ',' << mt_lambda << ',' << t << ',' << fmt(v) << '\n';
        if (mt_eps_opt->count() && v > mt_eps / 2.0) ok = false;
      }
      return ok ? kExitOk : kExitNegative;
    }

    if (*si) {
      const auto sched = load_shift(si_sched);
      const std::uint64_t lambda = si_lambda == "auto" ? lambda_for_h(si_eps, si_h, sched.n_nodes())
                                                       : parse_uint(si_lambda, "--lambda");
      if (lambda * si_h > sched.period())
        throw UsageError("lambda*h = " + std::to_string(lambda * si_h) + " exceeds period " +
                         std::to_string(sched.period()));
      double rate = 0.0;
      if (si_rate == "auto") {
        rate = (1.0 - si_eps) / (2.0 * si_h);
      } else {
        try {
          rate = std::stod(si_rate);
        } catch (...) {
          throw UsageError("invalid --rate '" + si_rate + "'");
        }
      }
      LoadMode mode;
      if (si_mode == "certified_sum") mode = LoadMode::certified_sum;
      else if (si_mode == "forward_half") mode = LoadMode::forward_half;
      else if (si_mode == "backward_half") mode = LoadMode::backward_half;
      else throw UsageError("unknown --mode '" + si_mode + "'");
      EtaMethod eta_method;
      const std::uint64_t window = si_h * lambda;
      const std::uint64_t starts =
          sched.period() % window == 0 ? sched.period() / window : si_batches;
      const double cost = static_cast<double>(starts) * sched.n_nodes() * sched.n_nodes();
      if (si_eta == "exact") eta_method = EtaMethod::exact;
      else if (si_eta == "tv") eta_method = EtaMethod::tv_bound;
      else if (si_eta == "auto") eta_method = cost <= 4e9 ? EtaMethod::exact : EtaMethod::tv_bound;
      else throw UsageError("unknown --eta '" + si_eta + "'");
      const auto demand = parse_demand(si_demand, sched.n_nodes(), rate);
      const auto res = simulate(sched, si_h, lambda, demand, mode, si_top, si_batches, eta_method);
      out << "t,edge_source,load\n";
      for (const auto& e : res.top) out << e.t << ',' << e.source << ',' << fmt(e.load) << '\n';
      out << "# max_load=" << fmt(res.max_load) << " eta=" << fmt(res.eta) << " r=" << fmt(res.rate)
          << " in_flight_latency=" << res.latency.in_flight
          << " total_latency=" << res.latency.total << '\n';
      if (eta_method == EtaMethod::tv_bound) err << "note: eta is the total-variation lower bound\n";
      return res.max_load <= 1.0 + 1e-9 ? kExitOk : kExitNegative;
    }

    if (*mc) {
      std::ifstream f(mc_rates, std::ios::binary);
      std::stringstream ss;
      ss << f.rdbuf();
      if (!mc_tv) {
        const auto r = check_fixed_rates(mc_eps, parse_fixed_rates(ss.str()));
        out << "sum,slack,feasible\n"
            << fmt(r.sum) << ',' << fmt(r.slack) << ',' << (r.feasible ? "true" : "false") << '\n';
        return r.feasible ? kExitOk : kExitNegative;
      }
      const auto rates = parse_time_varying_rates(ss.str());
      LambdaMap lm = parse_lambda_map(mc_lambda);
      for (const auto& [h, s] : rates) {
        if (lm.count(h)) continue;
        if (mc_n < 2) throw UsageError("--n is needed to derive lambda for h=" + std::to_string(h));
        lm[h] = lambda_for_h(mc_eps, h, mc_n);
      }
      std::uint64_t horizon = mc_horizon;
      if (horizon == 0) {
        // Past the last change point plus the longest window.
        for (const auto& [h, s] : rates) {
          const std::uint64_t last = s.points.empty() ? 0 : s.points.back().first;
          horizon = std::max(horizon, last + 2 * h * lm.at(h) + 1);
        }
      }
      const auto r = check_time_varying(mc_eps, lm, rates, horizon);
      out << "feasible,first_violation,max_value,argmax,horizon\n"
          << (r.feasible ? "true" : "false") << ','
          << (r.first_violation ? std::to_string(*r.first_violation) : std::string()) << ','
          << fmt(r.max_value) << ',' << r.argmax << ',' << horizon << '\n';
      return r.feasible ? kExitOk : kExitNegative;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const RetriesExhausted& e) {
    err << "error: " << e.what() << '\n';
    return kExitNegative;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace orns::cli
