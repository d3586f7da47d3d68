#include "occ/core.hpp"

#include <cmath>
#include <sstream>

namespace occ {

namespace {

[[noreturn]] void violation(const std::string& inequality, const std::string& values) {
  throw Error(ErrorKind::InvariantViolation, inequality + " (" + values + ")");
}

std::string pair_str(const char* lhs, long long l, const char* rhs, long long r) {
  std::ostringstream os;
  os << lhs << " = " << l << ", " << rhs << " = " << r;
  return os.str();
}

}  // namespace

DetectionHistory::DetectionHistory(int sites, int occasions, std::vector<std::uint8_t> cells)
    : sites_(sites), occasions_(occasions), cells_(std::move(cells)) {
  if (sites_ < 1 || occasions_ < 1) {
    throw Error(ErrorKind::Domain, "detection history needs S >= 1 and tau >= 1");
  }
  if (cells_.size() != static_cast<std::size_t>(sites_) * static_cast<std::size_t>(occasions_)) {
    throw Error(ErrorKind::Domain, "cell count does not match S x tau");
  }
  for (std::uint8_t c : cells_) {
    if (c > 1) throw Error(ErrorKind::Domain, "detection cells must be 0 or 1");
  }
}

DetectionHistory DetectionHistory::from_rows(const std::vector<std::vector<int>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw Error(ErrorKind::Domain, "detection history needs S >= 1 and tau >= 1");
  }
  const auto occasions = rows.front().size();
  std::vector<std::uint8_t> cells;
  cells.reserve(rows.size() * occasions);
  for (const auto& r : rows) {
    if (r.size() != occasions) throw Error(ErrorKind::Domain, "rows differ in length");
    for (int v : r) {
      if (v != 0 && v != 1) throw Error(ErrorKind::Domain, "detection cells must be 0 or 1");
      cells.push_back(static_cast<std::uint8_t>(v));
    }
  }
  return DetectionHistory(static_cast<int>(rows.size()), static_cast<int>(occasions),
                          std::move(cells));
}

SuffStats::SuffStats(int sites, int occasions, int f0, int y, std::optional<int> b)
    : sites_(sites), occasions_(occasions), f0_(f0), y_(y), b_(b) {
  if (sites_ < 1) violation("S >= 1", "S = " + std::to_string(sites_));
  if (occasions_ < 1) violation("tau >= 1", "tau = " + std::to_string(occasions_));
  if (f0_ < 0) violation("f0 >= 0", "f0 = " + std::to_string(f0_));
  if (f0_ > sites_) violation("f0 <= S", pair_str("f0", f0_, "S", sites_));
  const long long o = sites_ - f0_;
  if (y_ < o) violation("y >= O", pair_str("y", y_, "O", o));
  if (y_ > o * occasions_) violation("y <= O*tau", pair_str("y", y_, "O*tau", o * occasions_));
  if (b_) {
    if (*b_ < 0) violation("b >= 0", "b = " + std::to_string(*b_));
    if (*b_ > o * (occasions_ - 1)) {
      violation("b <= O*(tau-1)", pair_str("b", *b_, "O*(tau-1)", o * (occasions_ - 1)));
    }
    if (y_ - o > *b_) violation("y - O <= b", pair_str("y - O", y_ - o, "b", *b_));
  }
}

int SuffStats::b() const {
  if (!b_) throw Error(ErrorKind::Degenerate, "b (occasions after first detection) not available");
  return *b_;
}

int SuffStats::a() const { return detected() * occasions_ - detected() - b(); }

SuffStats compute_suff_stats(const DetectionHistory& history) {
  const int tau = history.occasions();
  int f0 = 0;
  int y = 0;
  int b = 0;
  for (int s = 0; s < history.sites(); ++s) {
    const auto row = history.row(s);
    int first = -1;
    for (int t = 0; t < tau; ++t) {
      if (row[t]) {
        if (first < 0) first = t;
        ++y;
      }
    }
    if (first < 0) {
      ++f0;
    } else {
      b += tau - 1 - first;
    }
  }
  return SuffStats(history.sites(), tau, f0, y, b);
}

void validate(const ModelParams& params) {
  if (!(params.psi >= 0.0 && params.psi <= 1.0)) {
    throw Error(ErrorKind::Domain, "psi must lie in [0, 1]");
  }
  if (!(params.p >= 0.0 && params.p <= 1.0)) {
    throw Error(ErrorKind::Domain, "p must lie in [0, 1]");
  }
}

double theta_of(double p, int occasions) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::Domain, "p must lie in [0, 1]");
  if (occasions < 1) throw Error(ErrorKind::Domain, "tau must be >= 1");
  if (p == 1.0) return 1.0;
  return -std::expm1(occasions * std::log1p(-p));
}

double eta_of(const ModelParams& params, int occasions) {
  validate(params);
  return params.psi * theta_of(params.p, occasions);
}

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::Full: return "full";
    case Method::TwoStage: return "two_stage";
    case Method::Partial: return "partial";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "full") return Method::Full;
  if (name == "two_stage") return Method::TwoStage;
  if (name == "partial") return Method::Partial;
  throw Error(ErrorKind::Domain, "unknown method '" + std::string(name) + "'");
}

}  // namespace occ
