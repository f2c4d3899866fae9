#include "fracscale/oracle.hpp"

#include <string>

#include "fracscale/error.hpp"

namespace fracscale {

namespace {

constexpr std::int64_t kOutside = -1;

struct Tap {
    std::int64_t source;  // index into the dimension, or kOutside for a zero sample
    double weight;
};

std::int64_t resolve(std::int64_t i, std::int64_t len, PadMode mode) {
    if (i >= 0 && i < len) return i;
    switch (mode) {
    case PadMode::Replicate:
        return i < 0 ? 0 : len - 1;
    case PadMode::Zero:
        return kOutside;
    case PadMode::Reflect: {
        const std::int64_t m = i < 0 ? -i : 2 * (len - 1) - i;
        if (m < 0 || m >= len) {
            throw InvalidPadding("reflect padding cannot reach index " + std::to_string(i) +
                                 " of a dimension of length " + std::to_string(len));
        }
        return m;
    }
    }
    return kOutside;
}

// taps[m] lists the (source, weight) pairs for output coordinate m.
std::vector<std::vector<Tap>> dimension_taps(std::size_t in_len, std::size_t out_len,
                                             const RationalScale& f, const ScalingMethod& method,
                                             PadMode mode) {
    const auto len = static_cast<std::int64_t>(in_len);
    std::vector<std::vector<Tap>> taps(out_len);
    for (std::size_t m = 0; m < out_len; ++m) {
        const std::int64_t pos = static_cast<std::int64_t>(m) * f.down();
        const std::int64_t base = pos / f.up();
        const double frac = static_cast<double>(pos % f.up()) / static_cast<double>(f.up());
        const auto w = weights_1d(frac, method);
        for (std::size_t t = 0; t < w.weights.size(); ++t) {
            const auto i = base + w.anchor + static_cast<std::int64_t>(t);
            taps[m].push_back({resolve(i, len, mode), w.weights[t]});
        }
    }
    return taps;
}

} // namespace

Tensor direct_resize(const Tensor& x, const ScaleJob& job) {
    job.validate();
    const Shape out_shape = output_shape(x.shape(), job.factors);
    const std::size_t n = x.rank();

    std::vector<std::vector<std::vector<Tap>>> taps(n);
    for (std::size_t d = 0; d < n; ++d) {
        taps[d] = dimension_taps(x.shape()[d], out_shape[d], job.factors[d], job.method, job.padding);
    }

    const auto in_strides = x.strides();
    Tensor out(out_shape);
    std::vector<std::size_t> m(n, 0);
    std::vector<std::size_t> t(n, 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        // Walk every combination of taps for this output sample.
        double acc = 0.0;
        std::fill(t.begin(), t.end(), 0);
        while (true) {
            double w = 1.0;
            std::int64_t offset = 0;
            bool outside = false;
            for (std::size_t d = 0; d < n; ++d) {
                const Tap& tap = taps[d][m[d]][t[d]];
                w *= tap.weight;
                if (tap.source == kOutside) outside = true;
                else offset += tap.source * static_cast<std::int64_t>(in_strides[d]);
            }
            if (!outside) acc += w * x[static_cast<std::size_t>(offset)];

            std::size_t d = n;
            while (d-- > 0) {
                if (++t[d] < taps[d][m[d]].size()) break;
                t[d] = 0;
            }
            if (d == static_cast<std::size_t>(-1)) break;
        }
        out[flat] = acc;

        for (std::size_t d = n; d-- > 0;) {
            if (++m[d] < out_shape[d]) break;
            m[d] = 0;
        }
    }
    return out;
}

} // namespace fracscale
