#include "lorasg/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lorasg/errors.hpp"

namespace lorasg::analytic {

namespace {

constexpr double kPi = 3.14159265358979323846;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

template <typename F>
double adapt(F&& f, double a, double fa, double b, double fb, double m, double fm,
             double whole, double tol, int depth) {
  if (depth <= 0) throw numeric_error("adaptive quadrature did not converge");
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(F&& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a);
  double fb = f(b);
  double fm = f(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adapt(f, a, fa, b, fb, m, fm, whole, tol, 60);
}

// int_0^x t^s e^(-t) dt. Substituting t = u^6 keeps the integrand and its low
// derivatives bounded at 0 for any s > -1/2 of interest here.
double truncated_gamma_moment(double s, double x) {
  if (x <= 0.0) return 0.0;
  double full = std::tgamma(1.0 + s);
  if (x > 60.0) return full;  // truncation error below 1e-24
  double p = 6.0 * s + 5.0;
  auto g = [p](double u) {
    return 6.0 * std::pow(u, p) * std::exp(-std::pow(u, 6.0));
  };
  return integrate(g, 0.0, std::pow(x, 1.0 / 6.0), 1e-15 * (1.0 + full));
}

ClassResult class_result(const Scenario& scn, double a_prime, double e, size_t i) {
  const SfClass& c = scn.classes[i];
  ClassResult r;
  r.index_n = c.index_n;
  r.sf = c.sf;
  r.sensitivity_mw = c.sensitivity_mw;
  r.window_s = c.airtime_s + c.lock_s;
  r.a_n = a_prime * r.window_s;
  double lower = std::pow(c.sensitivity_mw, -e);
  double upper = i + 1 < scn.classes.size()
                     ? std::pow(scn.classes[i + 1].sensitivity_mw, -e)
                     : 0.0;
  // lower >= upper in exact arithmetic; clamp the rounding case
  double mass = std::max(r.a_n * (lower - upper), 0.0);
  r.pi = std::exp(-mass);
  if (!std::isfinite(r.pi))
    throw numeric_error("reception probability is not finite for class " +
                        std::to_string(c.index_n));
  return r;
}

}  // namespace

std::vector<SfClass> make_classes(const phy::RadioConfig& radio,
                                  const std::vector<std::pair<int, double>>& sf_dbm) {
  phy::validate(radio);
  std::vector<SfClass> out;
  out.reserve(sf_dbm.size());
  for (const auto& [sf, dbm] : sf_dbm) {
    SfClass c;
    c.sf = sf;
    c.sensitivity_mw = channel::dbm_to_mw(dbm);
    phy::AirTime at = phy::packet_airtime(sf, radio);
    c.airtime_s = at.total_s;
    c.lock_s = at.lock_window_s;
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const SfClass& a, const SfClass& b) {
    return a.sensitivity_mw < b.sensitivity_mw;
  });
  for (size_t i = 0; i < out.size(); ++i) out[i].index_n = static_cast<int>(i) + 1;
  return out;
}

void validate(const Scenario& scn) {
  if (!(scn.lambda_s >= 0.0) || !std::isfinite(scn.lambda_s))
    throw std::invalid_argument("lambda_s must be finite and nonnegative");
  if (!(scn.lambda_t >= 0.0) || !std::isfinite(scn.lambda_t))
    throw std::invalid_argument("lambda_t must be finite and nonnegative");
  if (!(scn.norm_radius_m > 0.0) || !std::isfinite(scn.norm_radius_m))
    throw std::invalid_argument("norm_radius_m must be positive");
  if (!std::isfinite(scn.alpha) || !(scn.alpha > -2.0))
    throw std::invalid_argument("alpha must be greater than -2");
  if (!(scn.p_tr_mw > 0.0) || !std::isfinite(scn.p_tr_mw))
    throw std::invalid_argument("p_tr_mw must be positive");
  channel::validate(scn.pathloss);
  channel::validate(scn.fading);
  phy::validate(scn.radio);
  if (scn.classes.empty())
    throw std::invalid_argument("scenario needs at least one class");
  double prev = 0.0;
  for (size_t i = 0; i < scn.classes.size(); ++i) {
    const SfClass& c = scn.classes[i];
    if (c.index_n != static_cast<int>(i) + 1)
      throw std::invalid_argument("class indices must run 1..N in storage order");
    if (c.sf < 6 || c.sf > 12)
      throw std::invalid_argument("spreading factor must be in [6, 12]");
    if (!(c.sensitivity_mw > prev) || !std::isfinite(c.sensitivity_mw))
      throw std::invalid_argument(
          "sensitivities must be positive and strictly ascending");
    if (!(c.airtime_s > 0.0) || !(c.lock_s >= 0.0))
      throw std::invalid_argument("class airtimes must be positive");
    prev = c.sensitivity_mw;
  }
}

double intensity_coefficient(const Scenario& scn) {
  validate(scn);
  double e = scn.power_exponent();
  double m = scn.alpha + 2.0;
  double moment = channel::fading_moment(scn.fading, e);
  double a = 2.0 * kPi * scn.space_time_density() * std::pow(scn.p_tr_mw, e) *
             moment / (m * std::pow(scn.pathloss.kappa, m));
  if (!std::isfinite(a)) throw numeric_error("intensity coefficient is not finite");
  return a;
}

ClassResult reception_probability(const Scenario& scn, int index_n) {
  validate(scn);
  if (index_n < 1 || index_n > static_cast<int>(scn.classes.size()))
    throw std::invalid_argument("class index out of range");
  double a_prime = intensity_coefficient(scn);
  return class_result(scn, a_prime, scn.power_exponent(),
                      static_cast<size_t>(index_n - 1));
}

std::vector<ClassResult> reception_probabilities(const Scenario& scn) {
  validate(scn);
  double a_prime = intensity_coefficient(scn);
  double e = scn.power_exponent();
  std::vector<ClassResult> out;
  out.reserve(scn.classes.size());
  for (size_t i = 0; i < scn.classes.size(); ++i)
    out.push_back(class_result(scn, a_prime, e, i));
  return out;
}

std::vector<ClassResult> reception_probabilities_disk(const Scenario& scn,
                                                      double disk_radius_m) {
  validate(scn);
  if (!(disk_radius_m > 0.0) || !std::isfinite(disk_radius_m))
    throw std::invalid_argument("disk_radius_m must be positive");
  std::vector<ClassResult> out;
  out.reserve(scn.classes.size());
  for (size_t i = 0; i < scn.classes.size(); ++i) {
    const SfClass& c = scn.classes[i];
    ClassResult r;
    r.index_n = c.index_n;
    r.sf = c.sf;
    r.sensitivity_mw = c.sensitivity_mw;
    r.window_s = c.airtime_s + c.lock_s;
    r.a_n = finite_disk_intensity(scn, c.sensitivity_mw, r.window_s, disk_radius_m);
    double above_next =
        i + 1 < scn.classes.size()
            ? finite_disk_intensity(scn, scn.classes[i + 1].sensitivity_mw,
                                    r.window_s, disk_radius_m)
            : 0.0;
    double mass = std::max(r.a_n - above_next, 0.0);
    r.pi = std::exp(-mass);
    if (!std::isfinite(r.pi))
      throw numeric_error("reception probability is not finite for class " +
                          std::to_string(c.index_n));
    out.push_back(r);
  }
  return out;
}

std::vector<double> equalize_sensitivities(const Scenario& scn, double target_pi) {
  validate(scn);
  if (!(target_pi > 0.0 && target_pi < 1.0))
    throw std::invalid_argument("target reception probability must be in (0, 1)");
  double a_prime = intensity_coefficient(scn);
  if (!(a_prime > 0.0))
    throw std::invalid_argument("equalization needs a positive arrival density");
  double e = scn.power_exponent();
  double c0 = -std::log(target_pi);
  size_t n = scn.classes.size();
  std::vector<double> out(n, 0.0);
  // per-class collision mass a_n*(t_n^-e - t_(n+1)^-e) = c0 telescopes into a
  // suffix sum over 1/a_i
  double suffix = 0.0;
  for (size_t i = n; i-- > 0;) {
    double w = scn.classes[i].airtime_s + scn.classes[i].lock_s;
    suffix += 1.0 / (a_prime * w);
    out[i] = std::pow(c0 * suffix, -1.0 / e);
    if (!std::isfinite(out[i]) || !(out[i] > 0.0))
      throw numeric_error("equalized threshold is not finite for class " +
                          std::to_string(i + 1));
  }
  return out;
}

Scenario homogeneous_equivalent(const Scenario& scn) {
  validate(scn);
  double m = scn.alpha + 2.0;
  if (!(2.0 * scn.pathloss.beta / m > 2.0))
    throw std::invalid_argument(
        "no homogeneous equivalent: requires beta > alpha + 2");
  Scenario out = scn;
  out.pathloss.beta = 2.0 * scn.pathloss.beta / m;
  out.lambda_s = scn.lambda_s * 2.0 / (m * std::pow(scn.pathloss.kappa, scn.alpha));
  out.alpha = 0.0;
  return out;
}

double finite_disk_intensity(const Scenario& scn, double threshold_mw,
                             double window_s, double disk_radius_m) {
  if (!(threshold_mw > 0.0) || !std::isfinite(threshold_mw))
    throw std::invalid_argument("threshold_mw must be positive");
  if (!(window_s >= 0.0) || !std::isfinite(window_s))
    throw std::invalid_argument("window_s must be nonnegative");
  if (!(disk_radius_m > 0.0) || !std::isfinite(disk_radius_m))
    throw std::invalid_argument("disk_radius_m must be positive");
  double m = scn.alpha + 2.0;
  double beta = scn.pathloss.beta;
  double s = m / beta;
  double rm = std::pow(disk_radius_m, m);
  double ln_rm = m * std::log(disk_radius_m);
  // c = ((p_tr/t)^(1/beta)/kappa)^m, kept in logs so huge c cannot overflow
  // before it is damped by the fading tail
  double ln_c = m * (std::log(scn.p_tr_mw / threshold_mw) / beta -
                     std::log(scn.pathloss.kappa));
  double pref = 2.0 * kPi * scn.space_time_density() * window_s / m;
  double emin = 0.0;
  switch (scn.fading.kind) {
    case channel::FadingKind::None:
      emin = ln_c >= ln_rm ? rm : std::exp(ln_c);
      break;
    case channel::FadingKind::Rayleigh: {
      // fstar solves c*F^s = R^m; below it the disk edge does not bind
      double fstar = std::exp((ln_rm - ln_c) / s);
      double trunc = truncated_gamma_moment(s, fstar);
      double tail = rm * std::exp(-fstar);
      double body = trunc > 0.0 ? std::exp(ln_c + std::log(trunc)) : 0.0;
      emin = tail + body;
      break;
    }
    case channel::FadingKind::LogNormal: {
      double sig = channel::lognormal_sigma_nat(scn.fading.sigma_db);
      double zstar = ((ln_rm - ln_c) / s + 0.5 * sig * sig) / sig;
      double tail = rm * (1.0 - normal_cdf(zstar));
      double phi = normal_cdf(zstar - s * sig);
      double body =
          phi > 0.0
              ? std::exp(ln_c + 0.5 * sig * sig * s * (s - 1.0) + std::log(phi))
              : 0.0;
      emin = tail + body;
      break;
    }
  }
  double out = pref * emin;
  if (!std::isfinite(out))
    throw numeric_error("finite-disk intensity is not finite");
  return out;
}

DiskEqualization equalize_sensitivities_disk(const Scenario& scn, double target_pi,
                                             double disk_radius_m) {
  validate(scn);
  if (!(target_pi > 0.0 && target_pi < 1.0))
    throw std::invalid_argument("target reception probability must be in (0, 1)");
  if (!(disk_radius_m > 0.0) || !std::isfinite(disk_radius_m))
    throw std::invalid_argument("disk_radius_m must be positive");
  double a_prime = intensity_coefficient(scn);
  if (!(a_prime > 0.0))
    throw std::invalid_argument("equalization needs a positive arrival density");
  double e = scn.power_exponent();
  double m = scn.alpha + 2.0;
  double c0 = -std::log(target_pi);
  size_t n = scn.classes.size();
  DiskEqualization out;
  out.sensitivity_mw.assign(n, 0.0);
  out.feasible.assign(n, false);
  out.all_feasible = true;
  // per-unit-window arrival count above t; decreasing in t with supremum
  // 2*pi*lambda*R^m/m as t -> 0
  auto g = [&](double t) { return finite_disk_intensity(scn, t, 1.0, disk_radius_m); };
  double ceiling_g = 2.0 * kPi * scn.space_time_density() *
                     std::pow(disk_radius_m, m) / m;
  double g_above = 0.0;  // g at the threshold of the class one step up
  for (size_t i = n; i-- > 0;) {
    double w = scn.classes[i].airtime_s + scn.classes[i].lock_s;
    double target_g = c0 / w + g_above;
    if (!(target_g < ceiling_g)) {
      // the disk cannot supply this much mass; this class and everything
      // below it stay unsolved
      out.all_feasible = false;
      break;
    }
    // bracket around the infinite-plane solution, then bisect in log t
    double guess = std::pow(a_prime / target_g, 1.0 / e);
    double hi = guess;
    for (int k = 0; k < 400 && g(hi) > target_g; ++k) hi *= 2.0;
    double lo = guess;
    for (int k = 0; k < 4000 && !(g(lo) > target_g); ++k) lo *= 0.5;
    if (!(g(lo) > target_g) || g(hi) > target_g)
      throw numeric_error("disk equalization failed to bracket class " +
                          std::to_string(i + 1));
    for (int k = 0; k < 300 && (hi - lo) > 1e-15 * hi; ++k) {
      double mid = std::sqrt(lo * hi);
      if (g(mid) > target_g)
        lo = mid;
      else
        hi = mid;
    }
    out.sensitivity_mw[i] = 0.5 * (lo + hi);
    out.feasible[i] = true;
    g_above = target_g;
  }
  return out;
}

}  // namespace lorasg::analytic
