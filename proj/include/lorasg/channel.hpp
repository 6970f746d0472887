#pragma once

// Propagation model: power-law path loss, mean-1 fading laws and their
// fractional moments, dBm/mW conversions. Powers are linear mW internally.

#include "lorasg/rng.hpp"

namespace lorasg::channel {

struct PathLossParams {
  double beta = 3.5;   // path-loss exponent, must be > 2
  double kappa = 0.5;  // 1/m scale inside (kappa*r)^beta
};

enum class FadingKind { None, Rayleigh, LogNormal };

struct FadingModel {
  FadingKind kind = FadingKind::Rayleigh;
  double sigma_db = 2.0;  // log-normal shadowing spread, used by LogNormal only
};

void validate(const PathLossParams& pl);
void validate(const FadingModel& fading);

// Path loss denominator (kappa*r)^beta; r = 0 returns 0 and callers treat the
// resulting received power as unbounded.
double path_gain(double r_m, const PathLossParams& pl);

double received_power_mw(double p_tr_mw, double fading, double r_m,
                         const PathLossParams& pl);

// E[F^s] for the mean-1 fading laws: 1, Gamma(1+s), exp(sigma^2 s(s-1)/2).
double fading_moment(const FadingModel& fading, double s);

double sample_fading(const FadingModel& fading, rng::Stream& stream);

// Inverse CDF of the fading law at probability q in (0,1).
double fading_quantile(const FadingModel& fading, double q);

// Urban path-loss exponent from base-station antenna height (meters):
// (44.9 - 6.55*log10(h)) / 10.
double hata_exponent(double antenna_height_m);

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

// Natural-log sigma of the mean-1 log-normal law from its dB spread.
double lognormal_sigma_nat(double sigma_db);

}  // namespace lorasg::channel
