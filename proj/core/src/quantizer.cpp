#include "cranopt/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cranopt/detail/rng.hpp"

namespace cranopt::quantizer {
namespace {

void check_spec(const QuantizerSpec& spec) {
  if (spec.bits < 1 || spec.bits > 30) throw std::invalid_argument("quantizer bits must be in [1, 30]");
  if (!(spec.scale >= 0.0)) throw std::invalid_argument("quantizer scale must be >= 0");
}

}  // namespace

double QuantizerSpec::step() const { return std::exp2(1 - bits); }
int QuantizerSpec::levels() const { return 1 << bits; }

double scale_factor(double signal_power_w) {
  if (signal_power_w < 0.0) throw std::invalid_argument("signal power must be >= 0");
  return 3.0 * std::sqrt(signal_power_w / 2.0);
}

double quantize_branch(double value, const QuantizerSpec& spec, bool* overflowed) {
  check_spec(spec);
  if (overflowed) *overflowed = false;
  if (spec.scale == 0.0) return 0.0;  // nothing to quantize

  double y = value / spec.scale;
  if (y > 1.0 || y < -1.0) {
    if (overflowed) *overflowed = true;
    y = std::clamp(y, -1.0, 1.0);
  }

  const double half_levels = std::exp2(spec.bits - 1);  // 2^(D-1)
  // Cells are half-open (lo, hi]; y == -1 belongs to the lowest cell, which
  // the index clamp enforces (the raw ceiling would land one level below
  // the codebook).
  double index = std::ceil(half_levels * y);
  index = std::clamp(index, -half_levels + 1.0, half_levels);
  const double reconstructed = index / half_levels - std::exp2(-spec.bits);
  return spec.scale * reconstructed;
}

ComplexSample quantize_dequantize(const ComplexSample& sample, const QuantizerSpec& spec) {
  return {quantize_branch(sample.i_part, spec), quantize_branch(sample.q_part, spec)};
}

double reconstruction_level(int index, const QuantizerSpec& spec) {
  check_spec(spec);
  if (index < 0 || index >= spec.levels()) throw std::invalid_argument("level index out of range");
  return spec.scale * (-1.0 + (2.0 * index + 1.0) * std::exp2(-spec.bits));
}

double analytic_noise_power(double signal_power_w, int bits) {
  return 3.0 * signal_power_w * std::exp2(-2 * bits);
}

MonteCarloResult monte_carlo_noise_power(double signal_power_w, int bits,
                                         std::size_t num_samples, std::uint64_t seed) {
  if (num_samples < 1) throw std::invalid_argument("need at least one sample");
  QuantizerSpec spec{bits, scale_factor(signal_power_w)};
  check_spec(spec);

  detail::Rng rng(seed);
  const double branch_sigma = std::sqrt(signal_power_w / 2.0);
  double granular_err = 0.0;
  std::uint64_t granular_count = 0;
  std::uint64_t overflows = 0;

  // The uniform-error noise model describes the granular (in-range) errors,
  // so overflowed branches are excluded from the error average; the clip
  // tail is quantified separately by the overflow rate.
  auto accumulate = [&](double y) {
    bool overflowed = false;
    const double r = quantize_branch(y, spec, &overflowed);
    if (overflowed) {
      ++overflows;
    } else {
      const double e = y - r;
      granular_err += e * e;
      ++granular_count;
    }
  };
  for (std::size_t i = 0; i < num_samples; ++i) {
    accumulate(branch_sigma * rng.normal());
    accumulate(branch_sigma * rng.normal());
  }

  MonteCarloResult out;
  // complex error power: both branches contribute
  out.empirical_q_w =
      granular_count > 0 ? 2.0 * granular_err / static_cast<double>(granular_count) : 0.0;
  out.overflow_rate = static_cast<double>(overflows) / (2.0 * static_cast<double>(num_samples));
  out.seed = seed;
  out.num_samples = num_samples;
  return out;
}

}  // namespace cranopt::quantizer
