#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fracscale {

using Shape = std::vector<std::size_t>;

std::size_t element_count(std::span<const std::size_t> shape);

/// Dense row-major array of doubles (last dimension varies fastest).
///
/// A Tensor is never empty: every dimension is at least 1 and every stored
/// value is finite. Both are checked on construction.
class Tensor {
public:
    explicit Tensor(Shape shape, double fill = 0.0);
    Tensor(Shape shape, std::vector<double> data);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    double operator[](std::size_t flat) const { return data_[flat]; }
    double& operator[](std::size_t flat) { return data_[flat]; }

    double at(std::span<const std::size_t> index) const;
    double& at(std::span<const std::size_t> index);

    /// Row-major strides, in elements.
    std::vector<std::size_t> strides() const;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    std::size_t flat_index(std::span<const std::size_t> index) const;

    Shape shape_;
    std::vector<double> data_;
};

/// C equally shaped spatial tensors stored as one C x N1 x ... x Nn block.
class ChannelTensor {
public:
    ChannelTensor(std::size_t channels, Shape spatial, double fill = 0.0);
    /// Views a tensor of shape C x N1 x ... x Nn as C channels.
    explicit ChannelTensor(Tensor block);

    std::size_t channels() const noexcept { return block_.shape()[0]; }
    Shape spatial_shape() const;
    std::size_t channel_size() const noexcept { return block_.size() / channels(); }

    std::span<const double> channel(std::size_t c) const;
    std::span<double> channel(std::size_t c);

    /// Copy of channel c as a standalone tensor.
    Tensor channel_tensor(std::size_t c) const;

    const Tensor& block() const noexcept { return block_; }
    std::span<const double> data() const noexcept { return block_.data(); }
    std::span<double> data() noexcept { return block_.data(); }

    friend bool operator==(const ChannelTensor&, const ChannelTensor&) = default;

private:
    Tensor block_;
};

enum class PadMode { Replicate, Reflect, Zero };

struct PadAmount {
    std::size_t left = 0;
    std::size_t right = 0;
};

struct PaddingSpec {
    std::vector<PadAmount> amounts;  // one per dimension
    PadMode mode = PadMode::Replicate;
};

/// Pads every dimension by the given amounts. Reflect mirrors about the edge
/// element without repeating it, so it needs left, right < shape[d].
Tensor pad(const Tensor& x, const PaddingSpec& spec);

/// One output channel of a strided convolution.
///
/// `offset` places the weight array inside the bank's support box: tap k of
/// this kernel reads input element i*stride + offset + k for hidden position i.
struct ConvKernel {
    std::vector<std::size_t> offset;
    Tensor weights;
};

/// Extent of the smallest box holding every kernel, per dimension.
Shape support_extent(std::span<const ConvKernel> kernels);

/// Strided multi-channel cross-correlation over the kernels' common support
/// box B: output channel c at hidden position i is
///   sum_k x[i*stride + offset_c + k] * w_c[k],
/// with floor((len_d - B_d) / stride_d) + 1 hidden positions per dimension.
/// `threads` == 0 picks the hardware concurrency.
ChannelTensor strided_conv(const Tensor& x, std::span<const ConvKernel> kernels,
                           std::span<const std::size_t> stride, std::size_t threads = 1);

/// Interleaves prod(factors) channels into a tensor of shape
/// factors[d] * N_d. Output cell i reads channel
///   c = sum_d (i_d mod r_d) * prod_{e>d} r_e
/// at spatial position floor(i_d / r_d), so the first dimension owns the
/// slowest-varying part of the channel index.
Tensor pixelshuffle(const ChannelTensor& x, std::span<const std::size_t> factors);

/// Exact inverse of pixelshuffle.
ChannelTensor pixelunshuffle(const Tensor& x, std::span<const std::size_t> factors);

} // namespace fracscale
