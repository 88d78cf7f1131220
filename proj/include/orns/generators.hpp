// Shift schedule constructions.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "orns/certifier.hpp"
#include "orns/core_model.hpp"

namespace orns {

/// T shifts drawn independently and uniformly from Z/(N).
ShiftSchedule gen_random(std::uint32_t n_nodes, std::uint64_t period, std::uint64_t seed);

enum class BaseSampling {
  uniform,
  /// Concatenated random permutations of Z/(N); needs lambda to be a
  /// multiple of N.
  permutation,
};

class RetriesExhausted : public std::runtime_error {
 public:
  explicit RetriesExhausted(const std::string& what) : std::runtime_error(what) {}
};

struct BaseResult {
  ShiftSchedule base;
  BaseCert cert;
  std::uint32_t attempts = 0;
};

/// Samples length-lambda windows until one passes certify_base. Attempt k
/// uses RNG stream k, so the result depends only on the arguments.
BaseResult gen_base_certified(std::uint32_t n_nodes, std::uint64_t lambda, std::uint32_t big_h,
                              double eps, std::uint64_t seed, std::uint32_t max_retries,
                              BaseSampling sampling = BaseSampling::uniform);

inline constexpr std::uint64_t kDefaultPeriodCap = std::uint64_t{1} << 28;

/// Base-lambda digits (t_1, ..., t_H) of t, least significant first.
std::vector<std::uint64_t> to_digits(std::uint64_t t, std::uint64_t lambda, std::uint32_t big_h);
std::uint64_t from_digits(const std::vector<std::uint64_t>& digits, std::uint64_t lambda);

/// Period-lambda^H schedule with s_t = sum_j base[t_j] mod N.
ShiftSchedule gen_convolution(const ShiftSchedule& base, std::uint32_t big_h,
                              std::uint64_t period_cap = kDefaultPeriodCap);

/// Same construction with a distinct base per digit; bases[j] drives digit j.
ShiftSchedule gen_convolution(const std::vector<ShiftSchedule>& bases,
                              std::uint64_t period_cap = kDefaultPeriodCap);

/// Recursive halving of {0, ..., N-1} recorded level by level.
struct PartitionTree {
  std::uint32_t depth = 0;
  std::uint32_t n_nodes = 1;
  /// blocks[l] lists the 2^l blocks of level l, left to right.
  std::vector<std::vector<std::vector<std::uint32_t>>> blocks;
  /// block_norms[l][b] = max_{j != 0} |sum_{s in block} w^(j s)|.
  std::vector<std::vector<double>> block_norms;
  std::vector<double> level_max;
  /// Worst-case recursion bound M_l from the backend guarantee.
  std::vector<double> recursion_bound;
  /// lambda used by the coloring backend at each level l (for splitting
  /// the level-l blocks); empty for the leaf level.
  std::vector<double> backend_lambda;
  /// Observed ||W_A x||_inf for each split, level by level.
  std::vector<double> split_disc_max;
  /// Complex rows per coloring (nonzero frequencies 1..N/2).
  std::uint32_t rows = 0;
  double k_impl = 0.0;
  double const_c = 0.0;
  std::vector<std::uint32_t> leaf_order;

  /// C * 2^(-l/2) sqrt(N l).
  double level_bound(std::uint32_t level) const;
};

struct DerandResult {
  ShiftSchedule schedule;
  PartitionTree tree;
};

/// Deterministic schedule of period N = 2^log2_n whose shifts are the leaves
/// of the recursive balanced partition.
DerandResult gen_derand(std::uint32_t log2_n);

/// Constant C(N) with level maxima <= C 2^(-l/2) sqrt(N) for the backend.
double derand_constant(std::uint32_t n_nodes);

/// Smallest power of two >= C^2 (4N)^(1/h) eps^(-2/h) log2 N. h = 1 returns
/// N. Throws std::invalid_argument when lambda*h exceeds N.
std::uint64_t lambda_for_h_derand(double eps, std::uint32_t h, std::uint32_t n_nodes,
                                  double const_c);

/// s_k = x^k mod N for k in [0, N-1) with x the least primitive root of the
/// prime N.
ShiftSchedule gen_primitive_root(std::uint32_t n_nodes);

bool is_prime(std::uint64_t n);
std::uint32_t least_primitive_root(std::uint32_t p);

}  // namespace orns
