// Universality tests for connection schedules.
//
// A shift schedule is certified at hop count h and phase length L when every
// forward spray vector p_t and every backward spray vector q_t over the start
// set has starred Fourier 2-norm at most eps/2.

#pragma once

#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "orns/core_model.hpp"

namespace orns {

/// Smallest integer >= 4 (eps/2)^(-2/h) N^(1/h) ln(h N^3).
std::uint64_t lambda_for_h(double eps, std::uint32_t h, std::uint32_t n_nodes);

using LambdaMap = std::map<std::uint32_t, std::uint64_t>;

struct CertRecord {
  std::uint32_t h = 0;
  std::uint64_t lambda = 0;
  std::uint64_t t = 0;
  double norm_p = 0.0;
  double norm_q = 0.0;
  bool pass = false;
  bool marginal = false;
};

struct CertOptions {
  /// Records with a norm within `slack` of eps/2 are flagged marginal.
  double slack = 1e-6;
  /// 0 selects ORNS_THREADS or the hardware concurrency.
  unsigned threads = 0;
  /// Skip remaining work once any record fails. Only the summary is then
  /// meaningful; the sink sees a prefix of the records of each h.
  bool stop_on_failure = false;
};

/// Per-h aggregate of a certification run.
struct HCertSummary {
  std::uint32_t h = 0;
  std::uint64_t lambda = 0;
  StartSet start_set = StartSet::all;
  std::uint64_t starts = 0;
  std::uint64_t failures = 0;
  std::uint64_t marginals = 0;
  double max_norm_p = 0.0;
  double max_norm_q = 0.0;
  /// Start maximizing max(norm_p, norm_q).
  std::uint64_t worst_t = 0;
};

struct CertSummary {
  std::string digest;
  double eps = 0.0;
  bool universal = true;
  bool complete = true;
  std::vector<HCertSummary> per_h;
  std::vector<std::string> warnings;
};

struct CertReport {
  std::string digest;
  double eps = 0.0;
  std::vector<CertRecord> records;
  bool universal = false;
  std::vector<std::uint32_t> h_covered;
  std::vector<std::string> warnings;
};

using RecordSink = std::function<void(const CertRecord&)>;

/// Resolves the phase length for every h, using lambda_for_h where the map
/// has no entry. Throws std::invalid_argument naming the first h whose
/// lambda*h exceeds the period.
LambdaMap resolve_lambdas(const ShiftSchedule& sched, double eps,
                          const std::vector<std::uint32_t>& h_list, const LambdaMap& lambda_map);

/// Runs the test and feeds records to `sink` in (h, t) order.
CertSummary certify_stream(const ShiftSchedule& sched, double eps,
                           std::vector<std::uint32_t> h_list, const LambdaMap& lambda_map,
                           const RecordSink& sink, const CertOptions& options = {});

CertReport certify(const ShiftSchedule& sched, double eps, std::vector<std::uint32_t> h_list,
                   const LambdaMap& lambda_map, const CertOptions& options = {});

/// Starred 2-norms of the forward spray for every start in [0, T), computed
/// by sliding windows. Exposed for testing the fast path.
std::vector<double> forward_norms_all_starts(const ShiftSchedule& sched, std::uint32_t h,
                                             std::uint64_t lambda, unsigned threads = 0);

/// Starred 2-norms of the forward spray at each aligned start k*h*lambda.
std::vector<double> forward_norms_aligned(const ShiftSchedule& sched, std::uint32_t h,
                                          std::uint64_t lambda, unsigned threads = 0);

void write_report_csv(std::ostream& out, const CertReport& report);
void write_record_csv(std::ostream& out, const CertRecord& record);
void write_report_header(std::ostream& out);
void write_report_footer(std::ostream& out, bool universal, double eps);

struct BaseCert {
  double norm = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Starred 2H-norm of the single window spanning the whole base schedule,
/// compared against (eps/2)^(1/H).
BaseCert certify_base(const ShiftSchedule& base, double eps, std::uint32_t big_h);

inline constexpr std::uint32_t kMarkovMaxNodes = 4096;

/// Max row 1-norm of M - U where M is the product of the h phase transition
/// matrices starting at t and U is the uniform matrix.
double markov_test(const PermSchedule& sched, std::uint32_t h, std::uint64_t lambda,
                   std::uint64_t t);

}  // namespace orns
