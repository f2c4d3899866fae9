#include "fracscale/fcfs.hpp"

#include <string>

#include "fracscale/error.hpp"

namespace fracscale {

namespace {

void check_rank(std::size_t in_rank, std::size_t factor_rank) {
    if (factor_rank == 0 || factor_rank > KernelBank::kMaxRank) {
        throw UnsupportedRank("scaling supports 1 to " + std::to_string(KernelBank::kMaxRank) +
                              " dimensions, got " + std::to_string(factor_rank));
    }
    if (in_rank != factor_rank) {
        throw ShapeError("input rank " + std::to_string(in_rank) + " does not match " +
                         std::to_string(factor_rank) + " scale factors");
    }
}

} // namespace

void ScaleJob::validate() const {
    if (factors.empty() || factors.size() > KernelBank::kMaxRank) {
        throw UnsupportedRank("scaling supports 1 to " + std::to_string(KernelBank::kMaxRank) +
                              " dimensions, got " + std::to_string(factors.size()));
    }
    method.validate();
}

HiddenShape hidden_shape(std::span<const std::size_t> in_shape,
                         std::span<const RationalScale> factors) {
    check_rank(in_shape.size(), factors.size());
    HiddenShape h{1, Shape(in_shape.size())};
    for (std::size_t d = 0; d < in_shape.size(); ++d) {
        if (in_shape[d] == 0) throw ShapeError("input dimensions must be positive");
        const auto s = static_cast<std::size_t>(factors[d].down());
        h.channels *= static_cast<std::size_t>(factors[d].up());
        h.spatial[d] = (in_shape[d] + s - 1) / s;
    }
    return h;
}

Shape output_shape(std::span<const std::size_t> in_shape, std::span<const RationalScale> factors) {
    auto h = hidden_shape(in_shape, factors);
    for (std::size_t d = 0; d < h.spatial.size(); ++d) {
        h.spatial[d] *= static_cast<std::size_t>(factors[d].up());
    }
    return h.spatial;
}

ChannelTensor strided_conv(const Tensor& padded, const KernelBank& bank, std::size_t threads) {
    const auto kernels = bank.conv_kernels();
    const auto stride = bank.stride();
    return strided_conv(padded, kernels, stride, threads);
}

Tensor scale(const Tensor& x, const KernelBank& bank, PadMode padding, std::size_t threads) {
    check_rank(x.rank(), bank.rank());
    const auto padded = pad(x, bank.required_pad(x.shape(), padding));
    const auto hidden = strided_conv(padded, bank, threads);
    const auto up = bank.up_factors();
    return pixelshuffle(hidden, up);
}

Tensor scale(const Tensor& x, const ScaleJob& job) {
    job.validate();
    check_rank(x.rank(), job.factors.size());
    return scale(x, build_bank(job.factors, job.method), job.padding, job.threads);
}

} // namespace fracscale
