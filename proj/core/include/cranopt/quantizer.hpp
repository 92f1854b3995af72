#pragma once

#include <cstddef>
#include <cstdint>

namespace cranopt::quantizer {

// Mid-rise uniform scalar quantizer on [-1, 1] with 2^bits levels applied
// per I/Q branch after scaling by `scale`.
struct QuantizerSpec {
  int bits = 1;        // D >= 1
  double scale = 1.0;  // eta >= 0; 0 bypasses the quantizer entirely

  double step() const;  // Delta = 2^(1-D), exactly
  int levels() const;   // 2^D
};

struct ComplexSample {
  double i_part = 0.0;
  double q_part = 0.0;
};

// Three-sigma scaling for a branch of a circularly symmetric signal of
// total power S: eta = 3 sqrt(S / 2), identical on I and Q.
double scale_factor(double signal_power_w);

// One real branch: normalize by eta, clip to [-1, 1], apply the ceiling-form
// mid-rise rule ceil(2^(D-1) y) / 2^(D-1) - 2^-D, rescale. Ties at zero go
// to the negative level -2^-D. `overflowed`, when given, reports whether the
// normalized input fell outside [-1, 1].
double quantize_branch(double value, const QuantizerSpec& spec,
                       bool* overflowed = nullptr);

ComplexSample quantize_dequantize(const ComplexSample& sample, const QuantizerSpec& spec);

// Reconstruction level for index i in [0, 2^D): -1 + (2i + 1) 2^-D, scaled.
double reconstruction_level(int index, const QuantizerSpec& spec);

// Noise power of the uniform-error model: eta^2 Delta^2 / 6 = 3 S 2^(-2D).
double analytic_noise_power(double signal_power_w, int bits);

struct MonteCarloResult {
  // Mean squared complex reconstruction error of the granular (in-range)
  // samples. Overflowed branches are excluded: the uniform-error model this
  // oracle validates describes the in-range cells, while the clip tail is
  // measured separately below.
  double empirical_q_w = 0.0;
  double overflow_rate = 0.0;  // per-branch clip fraction, nominally 2Q(3)
  std::uint64_t seed = 0;
  std::size_t num_samples = 0;
};

// Draws circularly symmetric complex Gaussian samples of total power S,
// runs them through the I/Q quantizer and measures the reconstruction error
// power and branch overflow rate. This is the independent oracle for
// analytic_noise_power and the 2Q(3) overflow figure.
MonteCarloResult monte_carlo_noise_power(double signal_power_w, int bits,
                                         std::size_t num_samples, std::uint64_t seed);

}  // namespace cranopt::quantizer
