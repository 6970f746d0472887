#pragma once

// LoRa on-air timing arithmetic: symbol, preamble, payload and the collision
// vulnerability window derived from them. All durations are seconds.

namespace lorasg::phy {

struct RadioConfig {
  double bandwidth_hz = 125000.0;
  int n_preamble_extra = 6;   // programmed preamble symbols on top of the fixed 4.25
  int payload_bytes = 20;
  bool header_present = true; // explicit PHY header; maps to H=0 in the symbol formula
  bool low_rate_opt = false;  // DE bit
  int cr_code = 1;            // 1..4, i.e. coding rates 4/5..4/8
};

struct AirTime {
  double symbol_s = 0.0;
  double preamble_s = 0.0;
  double payload_s = 0.0;
  double total_s = 0.0;          // preamble_s + payload_s, exact
  double lock_window_s = 0.0;    // receiver capture prefix; equals preamble_s
  double vulnerability_s = 0.0;  // total_s + lock_window_s, exact
  long payload_symbols = 0;      // 8 mandatory symbols + correction blocks
};

// Throws std::invalid_argument when a field is out of range.
void validate(const RadioConfig& radio);

// 2^sf / bandwidth_hz, exactly rounded. sf must be in [6,12].
double symbol_time(int sf, double bandwidth_hz);

AirTime packet_airtime(int sf, const RadioConfig& radio);

// Shorthand for packet_airtime(sf, radio).vulnerability_s.
double vulnerability_window(int sf, const RadioConfig& radio);

}  // namespace lorasg::phy
