#pragma once

// Closed-form reception model for a Poisson rain of packets: per-class
// reception probabilities, threshold equalization, the inhomogeneous-density
// reduction, and a finite-disk variant of the arrival intensity.

#include <utility>
#include <vector>

#include "lorasg/channel.hpp"
#include "lorasg/lora_phy.hpp"

namespace lorasg::analytic {

// One power class [sensitivity_mw, next sensitivity). index_n counts from 1
// in ascending sensitivity, so index 1 is the weakest-signal (highest SF)
// class.
struct SfClass {
  int index_n = 0;
  int sf = 0;
  double sensitivity_mw = 0.0;
  double airtime_s = 0.0;  // full packet on-air time B_n
  double lock_s = 0.0;     // capture prefix Delta_n
};

struct Scenario {
  double lambda_s = 0.0;        // spatial density coefficient, nodes / m^2 (times r^alpha)
  double lambda_t = 0.0;        // transmissions per node per second
  double norm_radius_m = 8000;  // disk radius used to normalize node counts
  double alpha = 0.0;           // radial density exponent, > -2
  double p_tr_mw = 10.0;
  channel::PathLossParams pathloss;
  channel::FadingModel fading;
  phy::RadioConfig radio;
  std::vector<SfClass> classes;  // ascending sensitivity_mw

  double space_time_density() const { return lambda_s * lambda_t; }
  // exponent e of the received-power tail t^(-e)
  double power_exponent() const { return (alpha + 2.0) / pathloss.beta; }
};

struct ClassResult {
  int index_n = 0;
  int sf = 0;
  double sensitivity_mw = 0.0;
  double window_s = 0.0;  // B_n + Delta_n
  double a_n = 0.0;       // intensity coefficient scaled by the window
  double pi = 0.0;        // probability the window holds no same-class arrival
};

// Builds the class list from (sf, sensitivity_dbm) pairs, sorted ascending by
// sensitivity, with airtimes computed from the radio config.
std::vector<SfClass> make_classes(const phy::RadioConfig& radio,
                                  const std::vector<std::pair<int, double>>& sf_dbm);

void validate(const Scenario& scn);

// Expected-count coefficient a: the number of packet arrivals in a window of
// w seconds with received power above t mW is a * w * t^(-(alpha+2)/beta).
// For alpha = 0 this is pi*lambda*P^(2/beta)*E[F^(2/beta)]/kappa^2.
double intensity_coefficient(const Scenario& scn);

ClassResult reception_probability(const Scenario& scn, int index_n);
std::vector<ClassResult> reception_probabilities(const Scenario& scn);

// Per-class probabilities when transmitters occupy only a disk; a_n then
// holds the finite-disk arrival count above the class threshold.
std::vector<ClassResult> reception_probabilities_disk(const Scenario& scn,
                                                      double disk_radius_m);

// Thresholds (mW, ascending) that give every class the same reception
// probability target_pi, keeping windows and channel fixed.
std::vector<double> equalize_sensitivities(const Scenario& scn, double target_pi);

// Homogeneous scenario (alpha = 0) with beta' = 2*beta/(alpha+2) and the
// density rescaled so all received-power statistics are unchanged.
Scenario homogeneous_equivalent(const Scenario& scn);

// Expected arrivals in `window_s` with received power above threshold_mw when
// transmitters only occupy a disk of disk_radius_m. Converges to
// intensity_coefficient * window * t^(-e) as the radius grows.
double finite_disk_intensity(const Scenario& scn, double threshold_mw,
                             double window_s, double disk_radius_m);

// Threshold equalization against the finite-disk intensity. The disk caps the
// per-class collision mass at lambda_s*lambda_t*window*pi*R^2 (alpha = 0), so
// a target can be unreachable; infeasible classes are flagged and the
// thresholds below them are not defined.
struct DiskEqualization {
  std::vector<double> sensitivity_mw;  // ascending by class index; 0 where undefined
  std::vector<bool> feasible;
  bool all_feasible = false;
};
DiskEqualization equalize_sensitivities_disk(const Scenario& scn, double target_pi,
                                             double disk_radius_m);

}  // namespace lorasg::analytic
