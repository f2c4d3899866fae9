#include "fracscale/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "fracscale/error.hpp"
#include "parallel.hpp"

namespace fracscale {

namespace {

std::string shape_string(std::span<const std::size_t> shape) {
    std::string s = "(";
    for (std::size_t d = 0; d < shape.size(); ++d) {
        if (d) s += ",";
        s += std::to_string(shape[d]);
    }
    return s + ")";
}

void check_shape(const Shape& shape) {
    if (shape.empty()) throw ShapeError("tensor rank must be at least 1");
    for (auto n : shape) {
        if (n == 0) throw ShapeError("empty dimension in shape " + shape_string(shape));
    }
}

std::vector<std::size_t> row_major_strides(std::span<const std::size_t> shape) {
    std::vector<std::size_t> strides(shape.size(), 1);
    for (std::size_t d = shape.size(); d-- > 1;) strides[d - 1] = strides[d] * shape[d];
    return strides;
}

void check_factors(std::span<const std::size_t> factors, std::size_t rank) {
    if (factors.size() != rank) {
        throw ShapeError("expected " + std::to_string(rank) + " shuffle factors, got " +
                         std::to_string(factors.size()));
    }
    for (auto r : factors) {
        if (r == 0) throw ShapeError("shuffle factors must be positive");
    }
}

// Per-dimension lookup tables: for output coordinate i_d, the channel-index
// contribution and the flat spatial offset it maps to.
struct ShuffleTables {
    std::vector<std::vector<std::size_t>> channel;
    std::vector<std::vector<std::size_t>> spatial;
};

ShuffleTables shuffle_tables(const Shape& out_shape, std::span<const std::size_t> factors,
                             std::span<const std::size_t> spatial_shape) {
    const std::size_t n = out_shape.size();
    const auto spatial_strides = row_major_strides(spatial_shape);
    const auto channel_strides = row_major_strides(factors);
    ShuffleTables t;
    t.channel.resize(n);
    t.spatial.resize(n);
    for (std::size_t d = 0; d < n; ++d) {
        t.channel[d].resize(out_shape[d]);
        t.spatial[d].resize(out_shape[d]);
        for (std::size_t i = 0; i < out_shape[d]; ++i) {
            t.channel[d][i] = (i % factors[d]) * channel_strides[d];
            t.spatial[d][i] = (i / factors[d]) * spatial_strides[d];
        }
    }
    return t;
}

// Calls fn(out_flat, channel, spatial_flat) for every output cell of a shuffle.
template <typename Fn>
void for_each_shuffle_cell(const Shape& out_shape, const ShuffleTables& t, Fn&& fn) {
    std::vector<std::size_t> index(out_shape.size(), 0);
    std::size_t flat = 0;
    do {
        std::size_t c = 0;
        std::size_t s = 0;
        for (std::size_t d = 0; d < index.size(); ++d) {
            c += t.channel[d][index[d]];
            s += t.spatial[d][index[d]];
        }
        fn(flat++, c, s);
    } while (detail::next_index(index, out_shape));
}

} // namespace

std::size_t element_count(std::span<const std::size_t> shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
    check_shape(shape_);
    if (!std::isfinite(fill)) throw std::invalid_argument("tensor fill value must be finite");
    data_.assign(element_count(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    check_shape(shape_);
    if (element_count(shape_) != data_.size()) {
        throw ShapeError("shape " + shape_string(shape_) + " needs " +
                         std::to_string(element_count(shape_)) + " values, got " +
                         std::to_string(data_.size()));
    }
    if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
        throw std::invalid_argument("tensor values must be finite");
    }
}

std::vector<std::size_t> Tensor::strides() const { return row_major_strides(shape_); }

std::size_t Tensor::flat_index(std::span<const std::size_t> index) const {
    if (index.size() != shape_.size()) throw ShapeError("index rank does not match tensor rank");
    std::size_t flat = 0;
    for (std::size_t d = 0; d < index.size(); ++d) {
        if (index[d] >= shape_[d]) throw std::out_of_range("tensor index out of range");
        flat = flat * shape_[d] + index[d];
    }
    return flat;
}

double Tensor::at(std::span<const std::size_t> index) const { return data_[flat_index(index)]; }
double& Tensor::at(std::span<const std::size_t> index) { return data_[flat_index(index)]; }

ChannelTensor::ChannelTensor(std::size_t channels, Shape spatial, double fill)
    : block_([&] {
          if (channels == 0) throw ShapeError("channel count must be positive");
          if (spatial.empty()) throw ShapeError("spatial rank must be at least 1");
          spatial.insert(spatial.begin(), channels);
          return Tensor(std::move(spatial), fill);
      }()) {}

ChannelTensor::ChannelTensor(Tensor block) : block_(std::move(block)) {
    if (block_.rank() < 2) throw ShapeError("channel tensor needs a channel axis and a spatial axis");
}

Shape ChannelTensor::spatial_shape() const {
    return Shape(block_.shape().begin() + 1, block_.shape().end());
}

std::span<const double> ChannelTensor::channel(std::size_t c) const {
    if (c >= channels()) throw std::out_of_range("channel index out of range");
    return block_.data().subspan(c * channel_size(), channel_size());
}

std::span<double> ChannelTensor::channel(std::size_t c) {
    if (c >= channels()) throw std::out_of_range("channel index out of range");
    return block_.data().subspan(c * channel_size(), channel_size());
}

Tensor ChannelTensor::channel_tensor(std::size_t c) const {
    auto values = channel(c);
    return Tensor(spatial_shape(), std::vector<double>(values.begin(), values.end()));
}

Tensor pad(const Tensor& x, const PaddingSpec& spec) {
    const std::size_t n = x.rank();
    if (spec.amounts.size() != n) {
        throw ShapeError("padding spec has " + std::to_string(spec.amounts.size()) +
                         " dimensions, tensor has " + std::to_string(n));
    }
    constexpr std::ptrdiff_t kZero = -1;
    Shape out_shape(n);
    const auto in_strides = x.strides();
    // Source offset of each padded coordinate along each dimension, or kZero.
    std::vector<std::vector<std::ptrdiff_t>> source(n);
    for (std::size_t d = 0; d < n; ++d) {
        const auto len = static_cast<std::ptrdiff_t>(x.shape()[d]);
        const auto [left, right] = spec.amounts[d];
        if (spec.mode == PadMode::Reflect &&
            (left >= x.shape()[d] || right >= x.shape()[d])) {
            throw InvalidPadding("reflect padding of (" + std::to_string(left) + "," +
                                 std::to_string(right) + ") needs a dimension longer than " +
                                 std::to_string(std::max(left, right)) + ", got " +
                                 std::to_string(len));
        }
        out_shape[d] = x.shape()[d] + left + right;
        source[d].resize(out_shape[d]);
        for (std::size_t o = 0; o < out_shape[d]; ++o) {
            std::ptrdiff_t i = static_cast<std::ptrdiff_t>(o) - static_cast<std::ptrdiff_t>(left);
            if (i < 0 || i >= len) {
                switch (spec.mode) {
                case PadMode::Replicate:
                    i = std::clamp<std::ptrdiff_t>(i, 0, len - 1);
                    break;
                case PadMode::Reflect:
                    i = i < 0 ? -i : 2 * (len - 1) - i;
                    break;
                case PadMode::Zero:
                    source[d][o] = kZero;
                    continue;
                }
            }
            source[d][o] = i * static_cast<std::ptrdiff_t>(in_strides[d]);
        }
    }

    Tensor out(out_shape);
    auto dst = out.data();
    auto src = x.data();
    std::vector<std::size_t> index(n, 0);
    std::size_t flat = 0;
    do {
        std::ptrdiff_t offset = 0;
        bool zero = false;
        for (std::size_t d = 0; d < n; ++d) {
            const auto s = source[d][index[d]];
            if (s == kZero) {
                zero = true;
                break;
            }
            offset += s;
        }
        dst[flat++] = zero ? 0.0 : src[static_cast<std::size_t>(offset)];
    } while (detail::next_index(index, out_shape));
    return out;
}

Shape support_extent(std::span<const ConvKernel> kernels) {
    if (kernels.empty()) throw ShapeError("convolution needs at least one kernel");
    const std::size_t n = kernels.front().weights.rank();
    Shape box(n, 0);
    for (const auto& k : kernels) {
        if (k.weights.rank() != n || k.offset.size() != n) {
            throw ShapeError("all kernels must share one rank");
        }
        for (std::size_t d = 0; d < n; ++d) {
            box[d] = std::max(box[d], k.offset[d] + k.weights.shape()[d]);
        }
    }
    return box;
}

ChannelTensor strided_conv(const Tensor& x, std::span<const ConvKernel> kernels,
                           std::span<const std::size_t> stride, std::size_t threads) {
    const Shape box = support_extent(kernels);
    const std::size_t n = x.rank();
    if (box.size() != n) throw ShapeError("kernel rank does not match input rank");
    if (stride.size() != n) throw ShapeError("stride rank does not match input rank");

    Shape hidden(n);
    for (std::size_t d = 0; d < n; ++d) {
        if (stride[d] == 0) throw ShapeError("stride must be positive");
        if (box[d] > x.shape()[d]) {
            throw ShapeError("kernel extent " + shape_string(box) +
                             " exceeds padded input " + shape_string(x.shape()));
        }
        hidden[d] = (x.shape()[d] - box[d]) / stride[d] + 1;
    }

    // Flatten every kernel into (input offset, weight) taps. Zero weights
    // contribute nothing to a sum of finite values.
    struct Tap {
        std::size_t offset;
        double weight;
    };
    const auto in_strides = x.strides();
    std::vector<std::vector<Tap>> taps(kernels.size());
    for (std::size_t c = 0; c < kernels.size(); ++c) {
        const auto& k = kernels[c];
        const auto& kshape = k.weights.shape();
        std::vector<std::size_t> index(n, 0);
        std::size_t flat = 0;
        do {
            const double w = k.weights[flat++];
            if (w == 0.0) continue;
            std::size_t offset = 0;
            for (std::size_t d = 0; d < n; ++d) offset += (k.offset[d] + index[d]) * in_strides[d];
            taps[c].push_back({offset, w});
        } while (detail::next_index(index, kshape));
    }

    ChannelTensor out(kernels.size(), hidden);
    const std::size_t plane = out.channel_size();
    const std::size_t rows = hidden[0];
    const auto src = x.data();
    double* const dst_base = out.data().data();

    // One work item per (channel, first hidden coordinate).
    detail::parallel_for(kernels.size() * rows, threads, [&](std::size_t item) {
        const std::size_t c = item / rows;
        const std::size_t i0 = item % rows;
        const auto& kt = taps[c];
        std::vector<std::size_t> index(n, 0);
        index[0] = i0;
        std::size_t out_flat = c * plane + i0 * (plane / rows);
        do {
            std::size_t base = 0;
            for (std::size_t d = 0; d < n; ++d) base += index[d] * stride[d] * in_strides[d];
            double acc = 0.0;
            for (const auto& t : kt) acc += src[base + t.offset] * t.weight;
            dst_base[out_flat++] = acc;
        } while (detail::next_index(index, hidden, 1));
    });
    return out;
}

Tensor pixelshuffle(const ChannelTensor& x, std::span<const std::size_t> factors) {
    const Shape spatial = x.spatial_shape();
    check_factors(factors, spatial.size());
    const std::size_t expected = element_count(factors);
    if (x.channels() != expected) {
        throw ShapeError("pixelshuffle by " + shape_string(factors) + " needs " +
                         std::to_string(expected) + " channels, got " +
                         std::to_string(x.channels()));
    }
    Shape out_shape(spatial.size());
    for (std::size_t d = 0; d < spatial.size(); ++d) out_shape[d] = spatial[d] * factors[d];

    const auto tables = shuffle_tables(out_shape, factors, spatial);
    const std::size_t plane = x.channel_size();
    const auto src = x.block().data();
    Tensor out(out_shape);
    auto dst = out.data();
    for_each_shuffle_cell(out_shape, tables, [&](std::size_t o, std::size_t c, std::size_t s) {
        dst[o] = src[c * plane + s];
    });
    return out;
}

ChannelTensor pixelunshuffle(const Tensor& x, std::span<const std::size_t> factors) {
    check_factors(factors, x.rank());
    Shape spatial(x.rank());
    for (std::size_t d = 0; d < x.rank(); ++d) {
        if (x.shape()[d] % factors[d] != 0) {
            throw ShapeError("dimension " + std::to_string(d) + " of size " +
                             std::to_string(x.shape()[d]) + " is not divisible by " +
                             std::to_string(factors[d]));
        }
        spatial[d] = x.shape()[d] / factors[d];
    }
    const auto tables = shuffle_tables(x.shape(), factors, spatial);
    ChannelTensor out(element_count(factors), spatial);
    const std::size_t plane = out.channel_size();
    auto dst = out.data();
    const auto src = x.data();
    for_each_shuffle_cell(x.shape(), tables, [&](std::size_t i, std::size_t c, std::size_t s) {
        dst[c * plane + s] = src[i];
    });
    return out;
}

} // namespace fracscale
