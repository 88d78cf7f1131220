#include "orns/multiclass.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "orns/numeric.hpp"

namespace orns {

FixedRateCheck check_fixed_rates(double eps, const std::map<std::uint32_t, double>& rates) {
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in [0, 1)");
  FixedRateCheck out;
  CompensatedSum sum;
  for (const auto& [h, r] : rates) {
    if (h == 0) throw std::invalid_argument("h must be >= 1");
    const double cap = (1.0 - eps) / (2.0 * h);
    if (!(r >= 0.0) || r > cap + kFeasibilityTolerance)
      throw std::invalid_argument("rate for h=" + std::to_string(h) + " outside [0, " +
                                  std::to_string(cap) + "]");
    sum.add(2.0 * h * r / (1.0 - eps));
  }
  out.sum = sum.value();
  out.slack = 1.0 - out.sum;
  out.feasible = out.sum <= 1.0 + kFeasibilityTolerance;
  return out;
}

double RateSeries::at(std::uint64_t t) const {
  auto it = std::upper_bound(points.begin(), points.end(), t,
                             [](std::uint64_t v, const auto& p) { return v < p.first; });
  if (it == points.begin()) return 0.0;
  return std::prev(it)->second;
}

namespace {

// Walks a series forward one timestep at a time.
class SeriesCursor {
 public:
  explicit SeriesCursor(const RateSeries& s) : s_(s) {}
  double next() {
    while (idx_ < s_.points.size() && s_.points[idx_].first <= t_) ++idx_;
    const double r = idx_ == 0 ? 0.0 : s_.points[idx_ - 1].second;
    ++t_;
    return r;
  }

 private:
  const RateSeries& s_;
  std::size_t idx_ = 0;
  std::uint64_t t_ = 0;
};

}  // namespace

TimeVaryingCheck check_time_varying(double eps, const LambdaMap& lambdas,
                                    const TimeVaryingRates& rates, std::uint64_t horizon) {
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in [0, 1)");
  struct ClassState {
    std::uint64_t window;
    double scale;
    SeriesCursor in, out;
    CompensatedSum sum;
  };
  std::vector<ClassState> classes;
  for (const auto& [h, series] : rates) {
    const auto it = lambdas.find(h);
    if (it == lambdas.end()) throw std::invalid_argument("no lambda for h=" + std::to_string(h));
    if (!std::is_sorted(series.points.begin(), series.points.end(),
                        [](const auto& a, const auto& b) { return a.first < b.first; }))
      throw std::invalid_argument("rate points must be sorted by time");
    for (const auto& p : series.points)
      if (!(p.second >= 0.0)) throw std::invalid_argument("rates must be >= 0");
    classes.push_back({2 * h * it->second, 1.0 / ((1.0 - eps) * it->second), SeriesCursor(series),
                       SeriesCursor(series), CompensatedSum{}});
  }

  TimeVaryingCheck out;
  for (std::uint64_t t = 0; t < horizon; ++t) {
    double total = 0.0;
    for (auto& c : classes) {
      c.sum.add(c.in.next());
      if (t >= c.window) c.sum.add(-c.out.next());
      total += c.sum.value() * c.scale;
    }
    if (total > out.max_value || t == 0) {
      out.max_value = total;
      out.argmax = t;
    }
    if (total > 1.0 + kFeasibilityTolerance && out.feasible) {
      out.feasible = false;
      out.first_violation = t;
    }
  }
  return out;
}

TimeVaryingRates constant_rates(const std::map<std::uint32_t, double>& rates) {
  TimeVaryingRates out;
  for (const auto& [h, r] : rates) out[h].points = {{0, r}};
  return out;
}

TimeVaryingRates handoff_rates(double eps, std::uint64_t lambda1, std::uint64_t lambda2,
                               std::uint64_t t_star) {
  TimeVaryingRates out;
  out[1].points = {{0, (1.0 - eps) / 2.0}, {t_star, 0.0}};
  const double step = (1.0 - eps) * static_cast<double>(lambda2) / (2.0 * lambda1);
  const double cap = (1.0 - eps) / 4.0;
  auto& c2 = out[2].points;
  for (std::uint64_t m = 1;; ++m) {
    const double level = std::min(cap, static_cast<double>(m) * step);
    c2.emplace_back(t_star + 4 * lambda2 * (m - 1), level);
    if (level >= cap) break;
  }
  return out;
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.remove_suffix(1);
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class F>
void for_each_row(std::string_view text, std::size_t fields, const F& f) {
  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty() || line.front() == '#' || line.front() == 'h') continue;
    const auto cols = split_csv(line);
    if (cols.size() != fields)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(fields) + " fields");
    f(cols, line_no);
    if (end == text.size()) break;
  }
}

std::uint64_t to_u64(std::string_view s, std::size_t line) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument("line " + std::to_string(line) + ": bad integer");
  return v;
}

double to_double(std::string_view s, std::size_t line) {
  const std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size())
    throw std::invalid_argument("line " + std::to_string(line) + ": bad number");
  return v;
}

}  // namespace

std::map<std::uint32_t, double> parse_fixed_rates(std::string_view text) {
  std::map<std::uint32_t, double> out;
  for_each_row(text, 2, [&](const auto& cols, std::size_t line) {
    const auto h = static_cast<std::uint32_t>(to_u64(cols[0], line));
    if (!out.emplace(h, to_double(cols[1], line)).second)
      throw std::invalid_argument("line " + std::to_string(line) + ": duplicate class");
  });
  return out;
}

TimeVaryingRates parse_time_varying_rates(std::string_view text) {
  TimeVaryingRates out;
  for_each_row(text, 3, [&](const auto& cols, std::size_t line) {
    const auto h = static_cast<std::uint32_t>(to_u64(cols[0], line));
    out[h].points.emplace_back(to_u64(cols[1], line), to_double(cols[2], line));
  });
  for (auto& [h, s] : out)
    std::stable_sort(s.points.begin(), s.points.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace orns
