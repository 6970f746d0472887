#include "lorasg/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "lorasg/errors.hpp"
#include "lorasg/rng.hpp"

namespace lorasg::montecarlo {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr long kChunk = 256;

// Runs body(rep, acc) for rep in [0, reps); acc is a slot array of integer
// accumulators. Replications own their random streams and the merge is
// integer addition, so the totals do not depend on scheduling.
template <typename Body>
std::vector<long long> run_replications(long reps, int workers, size_t slots,
                                        const Body& body) {
  std::vector<long long> total(slots, 0);
  std::atomic<long> next{0};
  std::mutex merge_mutex;
  std::exception_ptr first_error;
  auto work = [&]() {
    std::vector<long long> local(slots, 0);
    try {
      for (;;) {
        long start = next.fetch_add(kChunk);
        if (start >= reps) break;
        long stop = std::min(reps, start + kChunk);
        for (long r = start; r < stop; ++r) body(r, local.data());
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(merge_mutex);
      if (!first_error) first_error = std::current_exception();
      return;
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    for (size_t i = 0; i < slots; ++i) total[i] += local[i];
  };
  long max_useful = (reps + kChunk - 1) / kChunk;
  int n_threads = static_cast<int>(std::min<long>(workers, max_useful));
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return total;
}

SimEstimate estimate_from(long long successes, long reps) {
  SimEstimate est;
  est.replications = reps;
  est.successes = static_cast<long>(successes);
  est.p_hat = static_cast<double>(successes) / static_cast<double>(reps);
  est.std_err = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(reps));
  return est;
}

void check_class_index(const analytic::Scenario& scn, int index_n) {
  if (index_n < 1 || index_n > static_cast<int>(scn.classes.size()))
    throw std::invalid_argument("class index out of range");
}

}  // namespace

void validate(const SimConfig& cfg) {
  if (cfg.replications < 1)
    throw std::invalid_argument("replications must be positive");
  if (!(cfg.tail_epsilon > 0.0 && cfg.tail_epsilon < 0.5))
    throw std::invalid_argument("tail_epsilon must be in (0, 0.5)");
  if (cfg.workers < 0) throw std::invalid_argument("workers must be nonnegative");
  if (cfg.disk_truncation_m && !(*cfg.disk_truncation_m > 0.0))
    throw std::invalid_argument("disk_truncation_m must be positive");
}

int resolve_workers(int requested) {
  if (requested < 0) throw std::invalid_argument("workers must be nonnegative");
  int n = requested > 0
              ? requested
              : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("LORASG_THREADS")) {
    std::string text(env);
    if (!text.empty()) {
      char* end = nullptr;
      long cap = std::strtol(text.c_str(), &end, 10);
      if (end == text.c_str() || *end != '\0' || cap < 1)
        throw std::invalid_argument("LORASG_THREADS must be a positive integer");
      n = static_cast<int>(std::min<long>(n, cap));
    }
  }
  return std::max(1, n);
}

double max_relevant_radius(const analytic::Scenario& scn, double min_threshold_mw,
                           double tail_epsilon) {
  if (!(min_threshold_mw > 0.0) || !std::isfinite(min_threshold_mw))
    throw std::invalid_argument("min_threshold_mw must be positive");
  if (!(tail_epsilon > 0.0 && tail_epsilon < 0.5))
    throw std::invalid_argument("tail_epsilon must be in (0, 0.5)");
  double fq = channel::fading_quantile(scn.fading, 1.0 - tail_epsilon);
  return std::pow(scn.p_tr_mw * fq / min_threshold_mw, 1.0 / scn.pathloss.beta) /
         scn.pathloss.kappa;
}

SimEstimate simulate_class_spatial(const analytic::Scenario& scn, int index_n,
                                   const SimConfig& cfg) {
  analytic::validate(scn);
  validate(cfg);
  check_class_index(scn, index_n);
  const analytic::SfClass& cls = scn.classes[static_cast<size_t>(index_n - 1)];
  double m = scn.alpha + 2.0;
  double window = cls.airtime_s + cls.lock_s;
  // arrivals farther out clear this class's threshold with probability
  // < tail_epsilon, so the sampling disk stops there
  double r_dom = max_relevant_radius(scn, cls.sensitivity_mw, cfg.tail_epsilon);
  if (cfg.disk_truncation_m) r_dom = std::min(r_dom, *cfg.disk_truncation_m);
  double mean =
      2.0 * kPi * scn.space_time_density() * window * std::pow(r_dom, m) / m;
  if (!std::isfinite(mean)) throw numeric_error("arrival mean is not finite");
  double lower = cls.sensitivity_mw;
  double upper = index_n < static_cast<int>(scn.classes.size())
                     ? scn.classes[static_cast<size_t>(index_n)].sensitivity_mw
                     : std::numeric_limits<double>::infinity();
  auto body = [&](long rep, long long* acc) {
    rng::Stream g(cfg.seed, static_cast<std::uint64_t>(rep));
    long k = g.poisson(mean);
    bool hit = false;
    for (long j = 0; j < k && !hit; ++j) {
      double r = r_dom * std::pow(g.uniform01(), 1.0 / m);
      double f = channel::sample_fading(scn.fading, g);
      double p = channel::received_power_mw(scn.p_tr_mw, f, r, scn.pathloss);
      hit = p >= lower && p < upper;
    }
    if (!hit) acc[0] += 1;
  };
  auto sums =
      run_replications(cfg.replications, resolve_workers(cfg.workers), 1, body);
  return estimate_from(sums[0], cfg.replications);
}

SimEstimate simulate_class_power(const analytic::Scenario& scn, int index_n,
                                 const SimConfig& cfg) {
  analytic::validate(scn);
  validate(cfg);
  check_class_index(scn, index_n);
  if (cfg.disk_truncation_m)
    throw std::invalid_argument(
        "the power-domain sampler has no finite-disk variant");
  const analytic::SfClass& cls = scn.classes[static_cast<size_t>(index_n - 1)];
  double e = scn.power_exponent();
  double window = cls.airtime_s + cls.lock_s;
  double a_prime = analytic::intensity_coefficient(scn);
  double lower = cls.sensitivity_mw;
  double upper = index_n < static_cast<int>(scn.classes.size())
                     ? scn.classes[static_cast<size_t>(index_n)].sensitivity_mw
                     : std::numeric_limits<double>::infinity();
  // arrivals above the class threshold form a Poisson count; each power is a
  // Pareto draw from the tail t = lower * u^(-1/e)
  double mean = a_prime * window * std::pow(lower, -e);
  if (!std::isfinite(mean)) throw numeric_error("arrival mean is not finite");
  auto body = [&](long rep, long long* acc) {
    rng::Stream g(cfg.seed, static_cast<std::uint64_t>(rep));
    long k = g.poisson(mean);
    bool hit = false;
    if (!std::isinf(upper)) {
      for (long j = 0; j < k && !hit; ++j) {
        double p = lower * std::pow(g.uniform01(), -1.0 / e);
        hit = p < upper;
      }
    } else {
      hit = k > 0;
    }
    if (!hit) acc[0] += 1;
  };
  auto sums =
      run_replications(cfg.replications, resolve_workers(cfg.workers), 1, body);
  return estimate_from(sums[0], cfg.replications);
}

std::vector<PowerLawCell> validate_power_law(const analytic::Scenario& scn,
                                             double window_s,
                                             const std::vector<double>& thresholds_mw,
                                             const SimConfig& cfg) {
  analytic::validate(scn);
  validate(cfg);
  if (!(window_s > 0.0) || !std::isfinite(window_s))
    throw std::invalid_argument("window_s must be positive");
  if (thresholds_mw.empty())
    throw std::invalid_argument("at least one threshold is required");
  for (double t : thresholds_mw)
    if (!(t > 0.0) || !std::isfinite(t))
      throw std::invalid_argument("thresholds must be positive");
  double t_min = *std::min_element(thresholds_mw.begin(), thresholds_mw.end());
  double m = scn.alpha + 2.0;
  double r_dom = max_relevant_radius(scn, t_min, cfg.tail_epsilon);
  if (cfg.disk_truncation_m) r_dom = std::min(r_dom, *cfg.disk_truncation_m);
  double mean =
      2.0 * kPi * scn.space_time_density() * window_s * std::pow(r_dom, m) / m;
  if (!std::isfinite(mean)) throw numeric_error("arrival mean is not finite");
  size_t n = thresholds_mw.size();
  auto body = [&](long rep, long long* acc) {
    rng::Stream g(cfg.seed, static_cast<std::uint64_t>(rep));
    long k = g.poisson(mean);
    std::vector<long long> counts(n, 0);
    for (long j = 0; j < k; ++j) {
      double r = r_dom * std::pow(g.uniform01(), 1.0 / m);
      double f = channel::sample_fading(scn.fading, g);
      double p = channel::received_power_mw(scn.p_tr_mw, f, r, scn.pathloss);
      for (size_t i = 0; i < n; ++i)
        if (p >= thresholds_mw[i]) counts[i] += 1;
    }
    for (size_t i = 0; i < n; ++i) {
      acc[2 * i] += counts[i];
      acc[2 * i + 1] += counts[i] * counts[i];
    }
  };
  auto sums = run_replications(cfg.replications, resolve_workers(cfg.workers),
                               2 * n, body);
  double a_prime = analytic::intensity_coefficient(scn);
  double e = scn.power_exponent();
  double reps = static_cast<double>(cfg.replications);
  std::vector<PowerLawCell> out(n);
  for (size_t i = 0; i < n; ++i) {
    PowerLawCell& cell = out[i];
    cell.threshold_mw = thresholds_mw[i];
    cell.expected_count =
        cfg.disk_truncation_m
            ? analytic::finite_disk_intensity(scn, thresholds_mw[i], window_s,
                                              *cfg.disk_truncation_m)
            : a_prime * window_s * std::pow(thresholds_mw[i], -e);
    double sum = static_cast<double>(sums[2 * i]);
    double sum_sq = static_cast<double>(sums[2 * i + 1]);
    cell.observed_mean = sum / reps;
    double var = cfg.replications > 1
                     ? (sum_sq - sum * sum / reps) / (reps - 1.0)
                     : 0.0;
    var = std::max(var, 0.0);
    cell.std_err = std::sqrt(var / reps);
    if (cell.std_err > 0.0) {
      cell.z = (cell.observed_mean - cell.expected_count) / cell.std_err;
    } else if (cell.observed_mean == cell.expected_count) {
      cell.z = 0.0;
    } else {
      cell.z = cell.observed_mean > cell.expected_count
                   ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

}  // namespace lorasg::montecarlo
