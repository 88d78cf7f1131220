#include "orns/core_model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace orns {

namespace {

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

ShiftSchedule::ShiftSchedule(std::uint32_t n_nodes, std::vector<std::uint32_t> shifts)
    : n_(n_nodes), shifts_(std::move(shifts)) {
  if (n_ == 0) throw std::invalid_argument("N must be positive");
  if (shifts_.empty()) throw std::invalid_argument("period must be positive");
  for (auto s : shifts_)
    if (s >= n_) throw std::invalid_argument("shift out of range");
}

ShiftSchedule ShiftSchedule::from_residues(std::uint32_t n_nodes,
                                           std::span<const std::int64_t> values) {
  if (n_nodes == 0) throw std::invalid_argument("N must be positive");
  std::vector<std::uint32_t> s(values.size());
  const auto n = static_cast<std::int64_t>(n_nodes);
  for (std::size_t k = 0; k < values.size(); ++k) {
    auto r = values[k] % n;
    if (r < 0) r += n;
    s[k] = static_cast<std::uint32_t>(r);
  }
  return ShiftSchedule(n_nodes, std::move(s));
}

std::string ShiftSchedule::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = fnv1a(h, n_);
  h = fnv1a(h, shifts_.size());
  for (auto s : shifts_) h = fnv1a(h, s);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool is_permutation_of(std::span<const std::uint32_t> row, std::uint32_t n) {
  if (row.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (auto v : row) {
    if (v >= n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

PermSchedule::PermSchedule(std::uint32_t n_nodes, std::vector<std::vector<std::uint32_t>> perms)
    : n_(n_nodes), perms_(std::move(perms)) {
  if (n_ == 0) throw std::invalid_argument("N must be positive");
  if (perms_.empty()) throw std::invalid_argument("period must be positive");
  for (const auto& p : perms_)
    if (!is_permutation_of(p, n_)) throw std::invalid_argument("non-bijective permutation row");
}

PermSchedule PermSchedule::from_shift(const ShiftSchedule& sched) {
  const auto n = sched.n_nodes();
  std::vector<std::vector<std::uint32_t>> perms(sched.period(), std::vector<std::uint32_t>(n));
  for (std::uint64_t k = 0; k < sched.period(); ++k)
    for (std::uint32_t j = 0; j < n; ++j) perms[k][j] = sched.apply(j, k);
  return PermSchedule(n, std::move(perms));
}

GroupDistribution::GroupDistribution(std::vector<double> mass) : mass_(std::move(mass)) {
  if (mass_.empty()) throw std::invalid_argument("distribution must be non-empty");
  double total = 0.0;
  for (double m : mass_) {
    if (!(m >= 0.0)) throw std::invalid_argument("negative or NaN probability mass");
    total += m;
  }
  if (std::abs(total - 1.0) > kMassTolerance)
    throw std::invalid_argument("probability mass does not sum to 1");
}

GroupDistribution GroupDistribution::uniform(std::uint32_t n_nodes) {
  return GroupDistribution(std::vector<double>(n_nodes, 1.0 / n_nodes));
}

GroupDistribution GroupDistribution::point_mass(std::uint32_t n_nodes, std::uint32_t at) {
  std::vector<double> m(n_nodes, 0.0);
  m.at(at) = 1.0;
  return GroupDistribution(std::move(m));
}

GroupDistribution GroupDistribution::negated() const {
  const auto n = n_nodes();
  std::vector<double> m(n);
  for (std::uint32_t k = 0; k < n; ++k) m[(n - k) % n] = mass_[k];
  return GroupDistribution(std::move(m));
}

FourierVector FourierVector::star() const {
  FourierVector out = *this;
  if (!out.values.empty()) out.values[0] = 0.0;
  out.starred = true;
  return out;
}

StartSet SprayConfig::natural_start_set(std::uint32_t hop_count, std::uint64_t phase_len,
                                        std::uint64_t period) {
  const std::uint64_t span = std::uint64_t{hop_count} * phase_len;
  return (span != 0 && period % span == 0) ? StartSet::aligned : StartSet::all;
}

void SprayConfig::validate(std::uint64_t period) const {
  if (hop_count == 0) throw std::invalid_argument("hop count must be >= 1");
  if (phase_len == 0) throw std::invalid_argument("phase length must be >= 1");
  const std::uint64_t span = std::uint64_t{hop_count} * phase_len;
  if (span > period)
    throw std::invalid_argument("phase overrun: lambda*h = " + std::to_string(span) +
                                " exceeds period " + std::to_string(period) + " at h=" +
                                std::to_string(hop_count));
  if (start_set == StartSet::aligned && period % span != 0)
    throw std::invalid_argument("aligned starts require lambda*h to divide the period");
}

DemandSpec::DemandSpec(double rate_, std::vector<std::vector<std::uint32_t>> perms_)
    : rate(rate_), perms(std::move(perms_)) {
  if (!(rate >= 0.0)) throw std::invalid_argument("demand rate must be >= 0");
  if (perms.empty()) throw std::invalid_argument("demand needs at least one permutation");
  const auto n = static_cast<std::uint32_t>(perms.front().size());
  for (const auto& p : perms)
    if (!is_permutation_of(p, n)) throw std::invalid_argument("demand is not a permutation");
}

double lstar(std::uint32_t h, std::uint32_t n_nodes) {
  return h * std::pow(static_cast<double>(n_nodes), 1.0 / h);
}

// ---------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

bool parse_u64(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_kv(std::string_view tok, char key, std::uint64_t& out) {
  if (tok.size() < 3 || tok[0] != key || tok[1] != '=') return false;
  return parse_u64(tok.substr(2), out);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

Schedule parse_schedule(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& out) -> bool {
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = trim(text.substr(pos, end - pos));
      pos = end + 1;
      ++line_no;
      if (line.empty() || line.front() == '#') continue;
      out = line;
      return true;
    }
    return false;
  };

  std::string_view header;
  if (!next_line(header)) throw ParseError(line_no == 0 ? 1 : line_no, "malformed header");
  const auto toks = split_ws(header);
  std::uint64_t n = 0, t = 0;
  if (toks.size() != 4 || toks[0] != "orns/v1" || (toks[1] != "shift" && toks[1] != "perm") ||
      !parse_kv(toks[2], 'N', n) || !parse_kv(toks[3], 'T', t) || n == 0 || t == 0 ||
      n > 0xffffffffull)
    throw ParseError(line_no, "malformed header");
  const bool is_shift = toks[1] == "shift";
  const auto nn = static_cast<std::uint32_t>(n);

  if (is_shift) {
    std::vector<std::uint32_t> shifts;
    shifts.reserve(t);
    std::string_view line;
    for (std::uint64_t k = 0; k < t; ++k) {
      if (!next_line(line)) throw ParseError(line_no, "expected " + std::to_string(t) + " shifts");
      std::uint64_t v = 0;
      if (!parse_u64(line, v)) throw ParseError(line_no, "malformed shift");
      if (v >= n) throw ParseError(line_no, "shift out of range");
      shifts.push_back(static_cast<std::uint32_t>(v));
    }
    if (next_line(line)) throw ParseError(line_no, "trailing data after body");
    return ShiftSchedule(nn, std::move(shifts));
  }

  std::vector<std::vector<std::uint32_t>> perms;
  perms.reserve(t);
  std::string_view line;
  for (std::uint64_t k = 0; k < t; ++k) {
    if (!next_line(line)) throw ParseError(line_no, "expected " + std::to_string(t) + " rows");
    const auto vals = split_ws(line);
    if (vals.size() != n) throw ParseError(line_no, "non-bijective permutation row");
    std::vector<std::uint32_t> row(n);
    for (std::size_t j = 0; j < n; ++j) {
      std::uint64_t v = 0;
      if (!parse_u64(vals[j], v) || v >= n) throw ParseError(line_no, "non-bijective permutation row");
      row[j] = static_cast<std::uint32_t>(v);
    }
    if (!is_permutation_of(row, nn)) throw ParseError(line_no, "non-bijective permutation row");
    perms.push_back(std::move(row));
  }
  if (next_line(line)) throw ParseError(line_no, "trailing data after body");
  return PermSchedule(nn, std::move(perms));
}

std::string serialize_schedule(const ShiftSchedule& sched) {
  std::string out = "orns/v1 shift N=" + std::to_string(sched.n_nodes()) +
                    " T=" + std::to_string(sched.period()) + "\n";
  out.reserve(out.size() + sched.period() * 8);
  for (auto s : sched.shifts()) {
    out += std::to_string(s);
    out += '\n';
  }
  return out;
}

std::string serialize_schedule(const PermSchedule& sched) {
  std::string out = "orns/v1 perm N=" + std::to_string(sched.n_nodes()) +
                    " T=" + std::to_string(sched.period()) + "\n";
  for (const auto& row : sched.perms()) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ' ';
      out += std::to_string(row[j]);
    }
    out += '\n';
  }
  return out;
}

std::string serialize_schedule(const Schedule& sched) {
  return std::visit([](const auto& s) { return serialize_schedule(s); }, sched);
}

Schedule read_schedule_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open schedule file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_schedule(ss.str());
}

void write_schedule_file(const std::string& path, const Schedule& sched) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write schedule file: " + path);
  out << serialize_schedule(sched);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace orns
