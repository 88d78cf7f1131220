// Domain types for oblivious reconfigurable network schedules.
//
// Nodes are elements of the cyclic group Z/(N). A shift schedule connects
// node j to node j + s_k at every timestep congruent to k modulo the period.

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace orns {

/// Absolute tolerance for "sums to one" checks on probability vectors.
inline constexpr double kMassTolerance = 1e-9;

class ShiftSchedule {
 public:
  /// Throws std::invalid_argument if any shift is outside [0, N).
  ShiftSchedule(std::uint32_t n_nodes, std::vector<std::uint32_t> shifts);

  /// Builds a schedule from arbitrary integers, reducing each modulo N.
  static ShiftSchedule from_residues(std::uint32_t n_nodes,
                                     std::span<const std::int64_t> values);

  std::uint32_t n_nodes() const { return n_; }
  std::uint64_t period() const { return shifts_.size(); }
  std::span<const std::uint32_t> shifts() const { return shifts_; }

  /// Shift active at absolute timestep t (cyclic).
  std::uint32_t shift_at(std::uint64_t t) const { return shifts_[t % shifts_.size()]; }

  /// Node reached from j by the physical edge at timestep t.
  std::uint32_t apply(std::uint32_t j, std::uint64_t t) const {
    const std::uint64_t v = std::uint64_t{j} + shift_at(t);
    return static_cast<std::uint32_t>(v % n_);
  }

  /// Stable 64-bit FNV-1a digest of (N, T, shifts) as 16 hex digits.
  std::string digest() const;

  friend bool operator==(const ShiftSchedule&, const ShiftSchedule&) = default;

 private:
  std::uint32_t n_;
  std::vector<std::uint32_t> shifts_;
};

class PermSchedule {
 public:
  /// Throws std::invalid_argument if a row is not a bijection on [0, N).
  PermSchedule(std::uint32_t n_nodes, std::vector<std::vector<std::uint32_t>> perms);

  static PermSchedule from_shift(const ShiftSchedule& sched);

  std::uint32_t n_nodes() const { return n_; }
  std::uint64_t period() const { return perms_.size(); }
  const std::vector<std::uint32_t>& perm_at(std::uint64_t t) const {
    return perms_[t % perms_.size()];
  }
  const std::vector<std::vector<std::uint32_t>>& perms() const { return perms_; }

  friend bool operator==(const PermSchedule&, const PermSchedule&) = default;

 private:
  std::uint32_t n_;
  std::vector<std::vector<std::uint32_t>> perms_;
};

/// True iff `row` is a permutation of {0, ..., n-1}.
bool is_permutation_of(std::span<const std::uint32_t> row, std::uint32_t n);

/// Probability distribution over Z/(N); mass[k] = Pr(X = k).
class GroupDistribution {
 public:
  /// Throws std::invalid_argument on negative entries or total mass off by
  /// more than kMassTolerance.
  explicit GroupDistribution(std::vector<double> mass);

  static GroupDistribution uniform(std::uint32_t n_nodes);
  static GroupDistribution point_mass(std::uint32_t n_nodes, std::uint32_t at);

  std::uint32_t n_nodes() const { return static_cast<std::uint32_t>(mass_.size()); }
  double operator[](std::uint32_t k) const { return mass_[k]; }
  std::span<const double> mass() const { return mass_; }

  /// Distribution of -X.
  GroupDistribution negated() const;

 private:
  std::vector<double> mass_;
};

/// Evaluations of a generating polynomial at the N-th roots of unity.
struct FourierVector {
  std::vector<std::complex<double>> values;
  bool starred = false;

  std::uint32_t n_nodes() const { return static_cast<std::uint32_t>(values.size()); }

  /// Copy with index 0 forced to exactly zero.
  FourierVector star() const;
};

enum class Direction { forward, backward };
enum class StartSet { aligned, all };

struct SprayConfig {
  std::uint32_t hop_count = 1;
  std::uint64_t phase_len = 1;
  Direction direction = Direction::forward;
  StartSet start_set = StartSet::all;

  /// Aligned when hop_count * phase_len divides the period, all otherwise.
  static StartSet natural_start_set(std::uint32_t hop_count, std::uint64_t phase_len,
                                    std::uint64_t period);

  /// Throws std::invalid_argument when the config cannot be applied to a
  /// schedule of the given period.
  void validate(std::uint64_t period) const;
};

/// Permutation demand scaled by `rate`. A single permutation applies at every
/// timestep; a longer list is indexed by timestep modulo its length.
struct DemandSpec {
  double rate = 0.0;
  std::vector<std::vector<std::uint32_t>> perms;

  DemandSpec(double rate, std::vector<std::vector<std::uint32_t>> perms);

  std::uint32_t n_nodes() const { return static_cast<std::uint32_t>(perms.front().size()); }
  const std::vector<std::uint32_t>& perm_at(std::uint64_t t) const {
    return perms[t % perms.size()];
  }
};

/// Optimal latency scale h * N^(1/h).
double lstar(std::uint32_t h, std::uint32_t n_nodes);

// ---------------------------------------------------------------------------
// Schedule file format
//
//   orns/v1 shift N=<N> T=<T>     then T lines, one shift each
//   orns/v1 perm N=<N> T=<T>      then T lines of N space-separated values
//
// Lines starting with '#' are comments.

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

using Schedule = std::variant<ShiftSchedule, PermSchedule>;

Schedule parse_schedule(std::string_view text);
std::string serialize_schedule(const ShiftSchedule& sched);
std::string serialize_schedule(const PermSchedule& sched);
std::string serialize_schedule(const Schedule& sched);

Schedule read_schedule_file(const std::string& path);
void write_schedule_file(const std::string& path, const Schedule& sched);

}  // namespace orns
