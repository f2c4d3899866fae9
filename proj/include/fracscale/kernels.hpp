#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fracscale/tensor.hpp"

namespace fracscale {

/// Scale factor r/s, always stored in lowest terms.
class RationalScale {
public:
    RationalScale(std::int64_t up, std::int64_t down);

    /// Parses "r/s" (or a bare integer "r", meaning r/1).
    static RationalScale parse(std::string_view text);

    std::int64_t up() const noexcept { return up_; }
    std::int64_t down() const noexcept { return down_; }
    double value() const noexcept { return static_cast<double>(up_) / static_cast<double>(down_); }
    std::string to_string() const;

    friend bool operator==(const RationalScale&, const RationalScale&) = default;

private:
    std::int64_t up_;
    std::int64_t down_;
};

struct ScalingMethod {
    enum class Kind { Nearest, Bilinear, Bicubic };

    Kind kind = Kind::Bilinear;
    double cubic_a = -0.5;  // Keys parameter, Bicubic only; must lie in [-1, 0]

    static ScalingMethod nearest() { return {Kind::Nearest}; }
    static ScalingMethod bilinear() { return {Kind::Bilinear}; }
    static ScalingMethod bicubic(double a = -0.5);
    static ScalingMethod parse(std::string_view name);

    std::string name() const;
    void validate() const;

    friend bool operator==(const ScalingMethod&, const ScalingMethod&) = default;
};

/// Sub-pixel offset num/den in [0, 1), not necessarily reduced.
struct PhaseOffset {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Output sample m lands at input coordinate m*s/r. Phase j (0 <= j < r)
/// covers the outputs with m mod r == j, whose fractional offset is
/// (j*s mod r)/r.
PhaseOffset phase_fraction(std::int64_t phase, const RationalScale& scale);

/// Whole-pixel part of the same coordinate: floor(j*s/r).
std::int64_t phase_shift(std::int64_t phase, const RationalScale& scale);

/// Keys cubic convolution kernel with parameter a.
double cubic_weight(double delta, double a);

struct Taps1D {
    std::vector<double> weights;
    std::int64_t anchor = 0;  // pixel offset of weights[0] from floor(u)
};

/// Interpolation weights for a sample at fractional offset `frac` past a
/// pixel: one tap for Nearest (ties go to the lower pixel), two for Bilinear, four for
/// Bicubic (anchored at -1 and renormalized to sum to one).
Taps1D weights_1d(double frac, const ScalingMethod& method);

/// Uniform per-dimension support used by every phase kernel of a method:
/// {first tap offset, tap count} relative to floor(u).
struct TapWindow {
    std::int64_t first;
    std::size_t count;
};
TapWindow tap_window(const ScalingMethod& method);

struct PhaseKernel {
    std::vector<std::size_t> phase;    // (j_1, ..., j_n)
    std::vector<std::int64_t> anchor;  // input offset of the first tap from hidden position i*s
    Tensor weights;
};

/// All prod(r_d) phase kernels for one scaling job. Kernels are stored in
/// channel order: phase tuple (j_1..j_n) sits at index
/// sum_d j_d * prod_{e>d} r_e, matching pixelshuffle.
class KernelBank {
public:
    static constexpr std::size_t kMaxRank = 3;

    const std::vector<RationalScale>& factors() const noexcept { return factors_; }
    const ScalingMethod& method() const noexcept { return method_; }
    const std::vector<PhaseKernel>& kernels() const noexcept { return kernels_; }
    std::size_t rank() const noexcept { return factors_.size(); }

    std::vector<std::size_t> stride() const;
    std::vector<std::size_t> up_factors() const;

    /// Left/right padding that keeps every tap of every phase in bounds for an
    /// input of the given shape when ceil(N_d/s_d) hidden positions are
    /// evaluated.
    PaddingSpec required_pad(std::span<const std::size_t> in_shape, PadMode mode) const;

    /// Kernels re-expressed relative to the common support box, for strided_conv.
    std::vector<ConvKernel> conv_kernels() const;

    const PhaseKernel& kernel(std::span<const std::size_t> phase) const;

    std::string to_json() const;

private:
    friend KernelBank build_bank(std::vector<RationalScale> factors, const ScalingMethod& method);

    KernelBank() = default;

    std::int64_t min_anchor(std::size_t dim) const;
    std::int64_t max_reach(std::size_t dim) const;

    std::vector<RationalScale> factors_;
    ScalingMethod method_;
    std::vector<PhaseKernel> kernels_;
};

KernelBank build_bank(std::vector<RationalScale> factors, const ScalingMethod& method);

} // namespace fracscale
