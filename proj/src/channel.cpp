#include "lorasg/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lorasg::channel {

void validate(const PathLossParams& pl) {
  if (!(pl.beta > 2.0))
    throw std::invalid_argument("beta must be > 2 for a finite interference intensity");
  if (!(pl.kappa > 0.0))
    throw std::invalid_argument("kappa must be positive");
}

void validate(const FadingModel& fading) {
  if (fading.kind == FadingKind::LogNormal &&
      (!(fading.sigma_db >= 0.0) || !std::isfinite(fading.sigma_db)))
    throw std::invalid_argument("sigma_db must be finite and nonnegative");
}

double path_gain(double r_m, const PathLossParams& pl) {
  validate(pl);
  if (r_m < 0.0) throw std::invalid_argument("radius must be >= 0");
  if (r_m == 0.0) return 0.0;
  return std::pow(pl.kappa * r_m, pl.beta);
}

double received_power_mw(double p_tr_mw, double fading, double r_m,
                         const PathLossParams& pl) {
  if (!(p_tr_mw > 0.0)) throw std::invalid_argument("p_tr_mw must be positive");
  if (fading < 0.0) throw std::invalid_argument("fading must be >= 0");
  const double gain = path_gain(r_m, pl);
  if (gain == 0.0) return HUGE_VAL;
  return p_tr_mw * fading / gain;
}

double lognormal_sigma_nat(double sigma_db) {
  return sigma_db * std::log(10.0) / 10.0;
}

double fading_moment(const FadingModel& fading, double s) {
  switch (fading.kind) {
    case FadingKind::None:
      return 1.0;
    case FadingKind::Rayleigh:
      if (!(s > -1.0))
        throw std::invalid_argument("Rayleigh moment needs s > -1");
      return std::tgamma(1.0 + s);
    case FadingKind::LogNormal: {
      const double sig = lognormal_sigma_nat(fading.sigma_db);
      return std::exp(sig * sig * s * (s - 1.0) / 2.0);
    }
  }
  throw std::invalid_argument("unknown fading kind");
}

double sample_fading(const FadingModel& fading, rng::Stream& stream) {
  switch (fading.kind) {
    case FadingKind::None:
      return 1.0;
    case FadingKind::Rayleigh:
      return stream.exponential();
    case FadingKind::LogNormal: {
      const double sig = lognormal_sigma_nat(fading.sigma_db);
      return std::exp(-sig * sig / 2.0 + sig * stream.normal());
    }
  }
  throw std::invalid_argument("unknown fading kind");
}

double fading_quantile(const FadingModel& fading, double q) {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("fading_quantile needs q in (0,1)");
  switch (fading.kind) {
    case FadingKind::None:
      return 1.0;
    case FadingKind::Rayleigh:
      return -std::log1p(-q);
    case FadingKind::LogNormal: {
      const double sig = lognormal_sigma_nat(fading.sigma_db);
      return std::exp(-sig * sig / 2.0 + sig * rng::normal_quantile(q));
    }
  }
  throw std::invalid_argument("unknown fading kind");
}

double hata_exponent(double antenna_height_m) {
  if (!(antenna_height_m > 0.0))
    throw std::invalid_argument("antenna height must be positive");
  return (44.9 - 6.55 * std::log10(antenna_height_m)) / 10.0;
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) {
  if (!(mw > 0.0))
    throw std::invalid_argument("mw must be positive to convert to dBm");
  return 10.0 * std::log10(mw);
}

}  // namespace lorasg::channel
