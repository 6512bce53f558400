#include "critmc/rng.hpp"

#include <numbers>

namespace critmc {

namespace {

// 256-layer ziggurat for the standard normal. Every layer has equal
// area v; the magic r is the standard 256-layer constant closing the
// construction (last layer reaches x = 0, f = 1).
struct ZigguratTables {
  static constexpr int kLayers = 256;
  double x[kLayers + 1];
  double f[kLayers + 1];
  double r = 3.6541528853610088;
  double v = 0.0;

  ZigguratTables() {
    const double f_r = std::exp(-0.5 * r * r);
    const double tail =
        std::sqrt(std::numbers::pi / 2.0) * std::erfc(r / std::sqrt(2.0));
    v = r * f_r + tail;
    x[0] = v / f_r;  // pseudo-width of the base layer (holds the tail)
    x[1] = r;
    for (int i = 2; i < kLayers; ++i) {
      const double fi = v / x[i - 1] + std::exp(-0.5 * x[i - 1] * x[i - 1]);
      x[i] = std::sqrt(-2.0 * std::log(fi));
    }
    x[kLayers] = 0.0;
    for (int i = 0; i <= kLayers; ++i) f[i] = std::exp(-0.5 * x[i] * x[i]);
  }
};

const ZigguratTables& zig() {
  static const ZigguratTables tables;
  return tables;
}

}  // namespace

double ziggurat_layer_closure_error() {
  const auto& z = zig();
  return z.x[255] * (1.0 - z.f[255]) / z.v - 1.0;
}

double RandomStream::normal() {
  const auto& z = zig();
  for (;;) {
    const std::uint64_t bits = next_u64();
    const int i = int(bits & 255);
    const double mag = double((bits >> 8) & ((1ull << 53) - 1)) * 0x1.0p-53;
    const double ax = mag * z.x[i];
    if (ax < z.x[i + 1]) {
      return ((bits >> 61) & 1) ? -ax : ax;  // inside the layer: accept
    }
    if (i == 0) {
      // exact exponential-rejection sampler for the tail beyond r
      double xx, yy;
      do {
        xx = -std::log1p(-uniform01()) / z.r;
        yy = -std::log1p(-uniform01());
      } while (yy + yy < xx * xx);
      const double t = z.r + xx;
      return ((bits >> 61) & 1) ? -t : t;
    }
    const double fy = z.f[i] + uniform01() * (z.f[i + 1] - z.f[i]);
    if (fy < std::exp(-0.5 * ax * ax)) {
      return ((bits >> 61) & 1) ? -ax : ax;
    }
  }
}

}  // namespace critmc
