#include "occ/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

namespace occ {

namespace {

constexpr double kMadConsistency = 1.4826;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPsiEdge = 1.0 - 1e-7;

double median_of(std::vector<double> v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

struct Replicate {
  std::optional<FitResult> partial;
  std::optional<FitResult> full;
};

Replicate run_replicate(const StudyCell& cell, const OptimSettings& optim, std::uint64_t index) {
  RngStream rng = RngStream::substream(cell.seed, index);
  const SuffStats stats =
      compute_suff_stats(simulate_history(cell.sites, cell.occasions, cell.psi, cell.p, rng));
  Replicate rep;
  try {
    rep.partial = fit_partial(stats);
  } catch (const Error&) {
  }
  try {
    rep.full = fit_full(stats, optim);
  } catch (const Error&) {
  }
  return rep;
}

ParamSummary summarize(const std::vector<double>& estimates, const std::vector<double>& ses) {
  const RobustSummary est = robust_summaries(estimates);
  ParamSummary out;
  out.median_estimate = est.median;
  out.mad = est.mad_scaled;
  out.variance = est.variance;
  std::vector<double> finite_ses;
  for (double se : ses) {
    if (std::isfinite(se)) finite_ses.push_back(se);
  }
  out.median_se = finite_ses.empty() ? kNaN : median_of(std::move(finite_ses));
  return out;
}

double ratio(double num, double den) { return den > 0.0 ? num / den : kNaN; }

}  // namespace

RngStream::RngStream(std::uint64_t seed) : engine_(seed) {}

RngStream RngStream::substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  RngStream stream(0);
  stream.engine_.seed(seq);
  return stream;
}

DetectionHistory simulate_history(int sites, int occasions, double psi, double p, RngStream& rng) {
  validate(ModelParams{psi, p});
  if (sites < 1 || occasions < 1) throw Error(ErrorKind::Domain, "need S >= 1 and tau >= 1");
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(sites) * occasions, 0);
  for (int s = 0; s < sites; ++s) {
    if (!rng.bernoulli(psi)) continue;
    for (int t = 0; t < occasions; ++t) {
      cells[static_cast<std::size_t>(s) * occasions + t] = rng.bernoulli(p) ? 1 : 0;
    }
  }
  return DetectionHistory(sites, occasions, std::move(cells));
}

void StudyCell::validate() const {
  if (sites < 1 || occasions < 1) throw Error(ErrorKind::Domain, "study cell needs S, tau >= 1");
  if (n_sim < 1) throw Error(ErrorKind::Domain, "study cell needs n_sim >= 1");
  if (!(psi > 0.0 && psi < 1.0) || !(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::Domain, "study cell probabilities must lie in (0, 1)");
  }
}

RobustSummary robust_summaries(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::Empty, "cannot summarize an empty sample");
  const std::vector<double> v(values.begin(), values.end());
  const double med = median_of(v);
  std::vector<double> dev;
  dev.reserve(v.size());
  for (double x : v) dev.push_back(std::abs(x - med));
  const double mad = median_of(std::move(dev)) * kMadConsistency;

  double variance = 0.0;
  if (v.size() > 1) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    for (double x : v) variance += (x - mean) * (x - mean);
    variance /= static_cast<double>(v.size() - 1);
  }
  return {med, mad, variance};
}

StudySummary run_study(const StudyCell& cell, const StudyOptions& options) {
  cell.validate();
  options.optim.validate();

  std::vector<Replicate> reps(static_cast<std::size_t>(cell.n_sim));
  unsigned threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp(threads, 1u, static_cast<unsigned>(cell.n_sim));

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < reps.size(); i = next++) {
      reps[i] = run_replicate(cell, options.optim, i);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  // Reduction runs in replicate order, independent of scheduling.
  std::vector<double> pp, pp_se, ppsi, ppsi_se, fp, fp_se, fpsi, fpsi_se;
  StudySummary out;
  out.cell = cell;
  out.drop_boundary = options.drop_boundary;
  for (const Replicate& rep : reps) {
    bool keep = rep.partial && rep.full && rep.partial->identifiable && rep.full->identifiable;
    if (keep && options.drop_boundary) {
      keep = rep.partial->psi_hat < 1.0 && rep.full->psi_hat < kPsiEdge;
    }
    if (!keep) {
      ++out.n_dropped;
      continue;
    }
    ++out.n_used;
    pp.push_back(rep.partial->p_hat);
    pp_se.push_back(rep.partial->se_p);
    ppsi.push_back(rep.partial->psi_hat);
    ppsi_se.push_back(rep.partial->se_psi);
    fp.push_back(rep.full->p_hat);
    fp_se.push_back(rep.full->se_p);
    fpsi.push_back(rep.full->psi_hat);
    fpsi_se.push_back(rep.full->se_psi);
  }
  if (out.n_used == 0) {
    throw Error(ErrorKind::AllDropped, "every replicate was dropped");
  }

  out.partial = {summarize(pp, pp_se), summarize(ppsi, ppsi_se)};
  out.full = {summarize(fp, fp_se), summarize(fpsi, fpsi_se)};
  out.efficiency_p = ratio(out.full.p.variance, out.partial.p.variance);
  out.efficiency_psi = ratio(out.full.psi.variance, out.partial.psi.variance);
  out.mad_efficiency_p = ratio(out.full.p.mad * out.full.p.mad, out.partial.p.mad * out.partial.p.mad);
  out.mad_efficiency_psi =
      ratio(out.full.psi.mad * out.full.psi.mad, out.partial.psi.mad * out.partial.psi.mad);
  return out;
}

}  // namespace occ
