#include "lorasg/lora_phy.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lorasg::phy {

namespace {

constexpr int kSfMin = 6;
constexpr int kSfMax = 12;

// ceil(num/den) on exact integers, den > 0. Truncation already rounds toward
// zero for negative numerators, which is the ceiling there.
long ceil_div(long num, long den) {
  if (num > 0) return (num + den - 1) / den;
  return num / den;
}

void check_sf(int sf) {
  if (sf < kSfMin || sf > kSfMax)
    throw std::invalid_argument("sf must be in [6,12], got " + std::to_string(sf));
}

}  // namespace

void validate(const RadioConfig& radio) {
  if (!(radio.bandwidth_hz > 0.0))
    throw std::invalid_argument("bandwidth_hz must be positive");
  if (radio.n_preamble_extra < 0)
    throw std::invalid_argument("n_preamble_extra must be >= 0");
  if (radio.payload_bytes < 0)
    throw std::invalid_argument("payload_bytes must be >= 0");
  if (radio.cr_code < 1 || radio.cr_code > 4)
    throw std::invalid_argument("cr_code must be in [1,4]");
}

double symbol_time(int sf, double bandwidth_hz) {
  check_sf(sf);
  if (!(bandwidth_hz > 0.0))
    throw std::invalid_argument("bandwidth_hz must be positive");
  return double(std::int64_t(1) << sf) / bandwidth_hz;
}

AirTime packet_airtime(int sf, const RadioConfig& radio) {
  check_sf(sf);
  validate(radio);

  const long de = radio.low_rate_opt ? 1 : 0;
  const long h = radio.header_present ? 0 : 1;
  if (sf - 2 * de <= 0)
    throw std::invalid_argument("sf - 2*low_rate_opt must be positive");

  const long numer = 8L * radio.payload_bytes - 4L * sf + 28 + 16 - 20 * h;
  const long denom = 4L * (sf - 2 * de);
  const long blocks = ceil_div(numer, denom);
  const long correction = blocks > 0 ? blocks * (radio.cr_code + 4) : 0;
  const long payload_symbols = 8 + correction;

  // Quarter-symbol integer counts keep preamble and payload each a single
  // exact division, which matches hand-evaluated decimals bit-for-bit; a
  // plain 10.25*Tsym drifts one ulp for some SFs. Total and vulnerability are
  // sums so the additive identities hold exactly by construction.
  const long pre_q = 17 + 4L * radio.n_preamble_extra;  // (4.25 + n_p) symbols
  const long pay_q = 4L * payload_symbols;
  const double scale = double(std::int64_t(1) << sf);
  const double denom4 = 4.0 * radio.bandwidth_hz;

  AirTime t;
  t.symbol_s = scale / radio.bandwidth_hz;
  t.preamble_s = double(pre_q) * scale / denom4;
  t.payload_s = double(pay_q) * scale / denom4;
  t.total_s = t.preamble_s + t.payload_s;
  t.lock_window_s = t.preamble_s;
  t.vulnerability_s = t.total_s + t.lock_window_s;
  t.payload_symbols = payload_symbols;
  return t;
}

double vulnerability_window(int sf, const RadioConfig& radio) {
  return packet_airtime(sf, radio).vulnerability_s;
}

}  // namespace lorasg::phy
