#pragma once

#include <cstddef>
#include <vector>

#include "fracscale/kernels.hpp"
#include "fracscale/tensor.hpp"

namespace fracscale {

struct ScaleJob {
    std::vector<RationalScale> factors;  // one per spatial dimension
    ScalingMethod method;
    PadMode padding = PadMode::Replicate;
    std::size_t threads = 1;  // 0 = hardware concurrency

    void validate() const;
};

/// out_d = r_d * ceil(N_d / s_d)
Shape output_shape(std::span<const std::size_t> in_shape, std::span<const RationalScale> factors);

struct HiddenShape {
    std::size_t channels;  // prod r_d
    Shape spatial;         // ceil(N_d / s_d)

    friend bool operator==(const HiddenShape&, const HiddenShape&) = default;
};

HiddenShape hidden_shape(std::span<const std::size_t> in_shape,
                         std::span<const RationalScale> factors);

/// Strided convolution of a padded input with every phase kernel of the bank.
ChannelTensor strided_conv(const Tensor& padded, const KernelBank& bank, std::size_t threads = 1);

/// Resizes x by pad -> strided convolution -> pixelshuffle. Output sample
/// (m_1..m_n) interpolates x at (m_1*s_1/r_1, ..., m_n*s_n/r_n); coordinates
/// past the edge resolve through the job's padding mode.
Tensor scale(const Tensor& x, const ScaleJob& job);

/// Same pipeline with a prebuilt bank, for callers that reuse one bank over
/// many inputs.
Tensor scale(const Tensor& x, const KernelBank& bank, PadMode padding, std::size_t threads = 1);

} // namespace fracscale
