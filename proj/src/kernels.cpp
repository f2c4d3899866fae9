#include "fracscale/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "fracscale/error.hpp"
#include "parallel.hpp"

namespace fracscale {

namespace {

std::int64_t parse_positive(std::string_view text, std::string_view whole) {
    std::int64_t value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || value <= 0) {
        throw std::invalid_argument("invalid scale factor '" + std::string(whole) +
                                    "': expected positive integers r/s");
    }
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace

RationalScale::RationalScale(std::int64_t up, std::int64_t down) {
    if (up <= 0 || down <= 0) {
        throw std::invalid_argument("scale factor " + std::to_string(up) + "/" +
                                    std::to_string(down) + " must be positive");
    }
    const auto g = std::gcd(up, down);
    up_ = up / g;
    down_ = down / g;
}

RationalScale RationalScale::parse(std::string_view text) {
    const auto whole = trim(text);
    const auto slash = whole.find('/');
    if (slash == std::string_view::npos) return {parse_positive(whole, whole), 1};
    return {parse_positive(trim(whole.substr(0, slash)), whole),
            parse_positive(trim(whole.substr(slash + 1)), whole)};
}

std::string RationalScale::to_string() const {
    return std::to_string(up_) + "/" + std::to_string(down_);
}

ScalingMethod ScalingMethod::bicubic(double a) {
    ScalingMethod m{Kind::Bicubic, a};
    m.validate();
    return m;
}

ScalingMethod ScalingMethod::parse(std::string_view name) {
    std::string lower(trim(name));
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "nearest") return nearest();
    if (lower == "bilinear") return bilinear();
    if (lower == "bicubic") return bicubic();
    throw std::invalid_argument("unknown scaling method '" + std::string(name) +
                                "' (expected nearest, bilinear or bicubic)");
}

std::string ScalingMethod::name() const {
    switch (kind) {
    case Kind::Nearest: return "nearest";
    case Kind::Bilinear: return "bilinear";
    case Kind::Bicubic: return "bicubic";
    }
    return "unknown";
}

void ScalingMethod::validate() const {
    if (kind == Kind::Bicubic && !(cubic_a >= -1.0 && cubic_a <= 0.0)) {
        throw std::invalid_argument("bicubic parameter a must lie in [-1, 0]");
    }
}

PhaseOffset phase_fraction(std::int64_t phase, const RationalScale& scale) {
    if (phase < 0 || phase >= scale.up()) {
        throw std::out_of_range("phase " + std::to_string(phase) + " outside [0, " +
                                std::to_string(scale.up()) + ")");
    }
    return {(phase * scale.down()) % scale.up(), scale.up()};
}

std::int64_t phase_shift(std::int64_t phase, const RationalScale& scale) {
    if (phase < 0 || phase >= scale.up()) {
        throw std::out_of_range("phase " + std::to_string(phase) + " outside [0, " +
                                std::to_string(scale.up()) + ")");
    }
    return phase * scale.down() / scale.up();
}

double cubic_weight(double delta, double a) {
    const double t = std::abs(delta);
    if (t <= 1.0) return (a + 2.0) * t * t * t - (a + 3.0) * t * t + 1.0;
    if (t < 2.0) return a * t * t * t - 5.0 * a * t * t + 8.0 * a * t - 4.0 * a;
    return 0.0;
}

Taps1D weights_1d(double frac, const ScalingMethod& method) {
    if (!(frac >= 0.0 && frac < 1.0)) throw std::out_of_range("fraction must lie in [0, 1)");
    switch (method.kind) {
    case ScalingMethod::Kind::Nearest:
        return {{1.0}, frac > 0.5 ? 1 : 0};
    case ScalingMethod::Kind::Bilinear:
        return {{1.0 - frac, frac}, 0};
    case ScalingMethod::Kind::Bicubic: {
        method.validate();
        const double a = method.cubic_a;
        std::vector<double> w{cubic_weight(frac + 1.0, a), cubic_weight(frac, a),
                              cubic_weight(1.0 - frac, a), cubic_weight(2.0 - frac, a)};
        const double sum = w[0] + w[1] + w[2] + w[3];
        for (auto& v : w) v /= sum;
        return {std::move(w), -1};
    }
    }
    throw std::invalid_argument("unknown scaling method");
}

TapWindow tap_window(const ScalingMethod& method) {
    switch (method.kind) {
    case ScalingMethod::Kind::Nearest: return {0, 2};
    case ScalingMethod::Kind::Bilinear: return {0, 2};
    case ScalingMethod::Kind::Bicubic: return {-1, 4};
    }
    throw std::invalid_argument("unknown scaling method");
}

std::vector<std::size_t> KernelBank::stride() const {
    std::vector<std::size_t> s;
    for (const auto& f : factors_) s.push_back(static_cast<std::size_t>(f.down()));
    return s;
}

std::vector<std::size_t> KernelBank::up_factors() const {
    std::vector<std::size_t> r;
    for (const auto& f : factors_) r.push_back(static_cast<std::size_t>(f.up()));
    return r;
}

std::int64_t KernelBank::min_anchor(std::size_t dim) const {
    std::int64_t lo = kernels_.front().anchor[dim];
    for (const auto& k : kernels_) lo = std::min(lo, k.anchor[dim]);
    return lo;
}

std::int64_t KernelBank::max_reach(std::size_t dim) const {
    std::int64_t hi = 0;
    for (const auto& k : kernels_) {
        hi = std::max(hi, k.anchor[dim] + static_cast<std::int64_t>(k.weights.shape()[dim]));
    }
    return hi;
}

PaddingSpec KernelBank::required_pad(std::span<const std::size_t> in_shape, PadMode mode) const {
    if (in_shape.size() != rank()) {
        throw ShapeError("input rank " + std::to_string(in_shape.size()) +
                         " does not match bank rank " + std::to_string(rank()));
    }
    PaddingSpec spec;
    spec.mode = mode;
    for (std::size_t d = 0; d < rank(); ++d) {
        const auto n = static_cast<std::int64_t>(in_shape[d]);
        const auto s = factors_[d].down();
        const auto hidden = (n + s - 1) / s;
        const auto left = std::max<std::int64_t>(0, -min_anchor(d));
        // Smallest right pad that lets the last hidden position read every
        // tap. Any pad in [lo, lo + s - 1] yields exactly `hidden` positions.
        const auto right = std::max<std::int64_t>(0, (hidden - 1) * s + max_reach(d) - n);
        spec.amounts.push_back({static_cast<std::size_t>(left), static_cast<std::size_t>(right)});
    }
    return spec;
}

std::vector<ConvKernel> KernelBank::conv_kernels() const {
    std::vector<std::int64_t> origin(rank());
    for (std::size_t d = 0; d < rank(); ++d) origin[d] = std::min<std::int64_t>(0, min_anchor(d));
    std::vector<ConvKernel> out;
    out.reserve(kernels_.size());
    for (const auto& k : kernels_) {
        std::vector<std::size_t> offset(rank());
        for (std::size_t d = 0; d < rank(); ++d) {
            offset[d] = static_cast<std::size_t>(k.anchor[d] - origin[d]);
        }
        out.push_back({std::move(offset), k.weights});
    }
    return out;
}

const PhaseKernel& KernelBank::kernel(std::span<const std::size_t> phase) const {
    if (phase.size() != rank()) throw ShapeError("phase tuple rank does not match bank rank");
    std::size_t index = 0;
    for (std::size_t d = 0; d < rank(); ++d) {
        const auto r = static_cast<std::size_t>(factors_[d].up());
        if (phase[d] >= r) {
            throw std::out_of_range("phase index " + std::to_string(phase[d]) + " outside [0, " +
                                    std::to_string(r) + ")");
        }
        index = index * r + phase[d];
    }
    return kernels_[index];
}

std::string KernelBank::to_json() const {
    nlohmann::ordered_json doc;
    doc["factors"] = nlohmann::json::array();
    for (const auto& f : factors_) doc["factors"].push_back(f.to_string());
    doc["method"] = method_.name();
    if (method_.kind == ScalingMethod::Kind::Bicubic) doc["cubic_a"] = method_.cubic_a;
    doc["stride"] = stride();
    doc["kernels"] = nlohmann::json::array();
    for (const auto& k : kernels_) {
        nlohmann::ordered_json entry;
        entry["phase"] = k.phase;
        entry["anchor"] = k.anchor;
        entry["extent"] = k.weights.shape();
        entry["weights"] = std::vector<double>(k.weights.data().begin(), k.weights.data().end());
        doc["kernels"].push_back(std::move(entry));
    }
    return doc.dump(2);
}

KernelBank build_bank(std::vector<RationalScale> factors, const ScalingMethod& method) {
    if (factors.empty() || factors.size() > KernelBank::kMaxRank) {
        throw UnsupportedRank("scaling supports 1 to " + std::to_string(KernelBank::kMaxRank) +
                              " dimensions, got " + std::to_string(factors.size()));
    }
    method.validate();
    const std::size_t n = factors.size();
    const TapWindow window = tap_window(method);

    // Per-dimension 1D factors for every phase, embedded in the method's
    // uniform tap window.
    std::vector<std::vector<std::vector<double>>> taps(n);
    std::vector<std::vector<std::int64_t>> anchors(n);
    for (std::size_t d = 0; d < n; ++d) {
        for (std::int64_t j = 0; j < factors[d].up(); ++j) {
            const auto one = weights_1d(phase_fraction(j, factors[d]).value(), method);
            std::vector<double> w(window.count, 0.0);
            const auto start = static_cast<std::size_t>(one.anchor - window.first);
            std::copy(one.weights.begin(), one.weights.end(), w.begin() + static_cast<std::ptrdiff_t>(start));
            taps[d].push_back(std::move(w));
            anchors[d].push_back(phase_shift(j, factors[d]) + window.first);
        }
    }

    KernelBank bank;
    bank.factors_ = std::move(factors);
    bank.method_ = method;
    const Shape phases = bank.up_factors();
    const Shape extent(n, window.count);
    std::vector<std::size_t> phase(n, 0);
    do {
        PhaseKernel k{phase, std::vector<std::int64_t>(n), Tensor(extent)};
        for (std::size_t d = 0; d < n; ++d) k.anchor[d] = anchors[d][phase[d]];
        std::vector<std::size_t> tap(n, 0);
        std::size_t flat = 0;
        do {
            double w = 1.0;
            for (std::size_t d = 0; d < n; ++d) w *= taps[d][phase[d]][tap[d]];
            k.weights[flat++] = w;
        } while (detail::next_index(tap, extent));
        bank.kernels_.push_back(std::move(k));
    } while (detail::next_index(phase, phases));
    return bank;
}

} // namespace fracscale
