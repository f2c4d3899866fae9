#include "fracscale/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "fracscale/error.hpp"
#include "fracscale/oracle.hpp"

namespace fracscale {

namespace {

void check_same_shape(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) throw ShapeError("metric inputs must have identical shapes");
}

// Valid-region separable filtering of a rank-2 plane with a symmetric 1D kernel.
std::vector<double> filter_valid(std::span<const double> src, std::size_t rows, std::size_t cols,
                                 const std::vector<double>& k) {
    const std::size_t w = k.size();
    const std::size_t out_rows = rows - w + 1;
    const std::size_t out_cols = cols - w + 1;
    std::vector<double> tmp(rows * out_cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < out_cols; ++c) {
            double acc = 0.0;
            for (std::size_t t = 0; t < w; ++t) acc += k[t] * src[r * cols + c + t];
            tmp[r * out_cols + c] = acc;
        }
    }
    std::vector<double> out(out_rows * out_cols, 0.0);
    for (std::size_t r = 0; r < out_rows; ++r) {
        for (std::size_t c = 0; c < out_cols; ++c) {
            double acc = 0.0;
            for (std::size_t t = 0; t < w; ++t) acc += k[t] * tmp[(r + t) * out_cols + c];
            out[r * out_cols + c] = acc;
        }
    }
    return out;
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

} // namespace

double psnr(const Tensor& a, const Tensor& b, double max_value) {
    check_same_shape(a, b);
    if (!(max_value > 0.0)) throw std::invalid_argument("psnr max_value must be positive");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    const double mse = sum / static_cast<double>(a.size());
    if (mse == 0.0) return kPsnrIdentical;
    return 10.0 * std::log10(max_value * max_value / mse);
}

std::vector<double> ssim_gaussian() {
    std::vector<double> g(kSsimWindow);
    const double center = static_cast<double>(kSsimWindow / 2);
    double sum = 0.0;
    for (std::size_t i = 0; i < kSsimWindow; ++i) {
        const double x = static_cast<double>(i) - center;
        g[i] = std::exp(-(x * x) / (2.0 * kSsimSigma * kSsimSigma));
        sum += g[i];
    }
    for (auto& v : g) v /= sum;
    return g;
}

double ssim(const Tensor& a, const Tensor& b, double max_value) {
    check_same_shape(a, b);
    if (a.rank() != 2) throw ShapeError("ssim needs rank-2 inputs");
    const std::size_t rows = a.shape()[0];
    const std::size_t cols = a.shape()[1];
    if (rows < kSsimWindow || cols < kSsimWindow) {
        throw ShapeError("ssim needs images of at least 11x11");
    }
    if (!(max_value > 0.0)) throw std::invalid_argument("ssim max_value must be positive");

    const auto g = ssim_gaussian();
    std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        aa[i] = a[i] * a[i];
        bb[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }
    const auto mu_a = filter_valid(a.data(), rows, cols, g);
    const auto mu_b = filter_valid(b.data(), rows, cols, g);
    const auto e_aa = filter_valid(aa, rows, cols, g);
    const auto e_bb = filter_valid(bb, rows, cols, g);
    const auto e_ab = filter_valid(ab, rows, cols, g);

    const double c1 = (0.01 * max_value) * (0.01 * max_value);
    const double c2 = (0.03 * max_value) * (0.03 * max_value);
    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double var_a = e_aa[i] - mu_a[i] * mu_a[i];
        const double var_b = e_bb[i] - mu_b[i] * mu_b[i];
        const double cov = e_ab[i] - mu_a[i] * mu_b[i];
        const double num = (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2);
        const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (var_a + var_b + c2);
        total += num / den;
    }
    return total / static_cast<double>(mu_a.size());
}

double median(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("median of an empty sample");
    const std::size_t mid = samples.size() / 2;
    std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(mid), samples.end());
    const double upper = samples[mid];
    if (samples.size() % 2 == 1) return upper;
    const double lower = *std::max_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

Timing time_median(const std::function<void()>& fn, std::size_t reps) {
    if (reps == 0) throw std::invalid_argument("repetitions must be at least 1");
    using clock = std::chrono::steady_clock;
    fn();
    Timing t;
    t.samples_s.reserve(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        const auto start = clock::now();
        fn();
        t.samples_s.push_back(std::chrono::duration<double>(clock::now() - start).count());
    }
    t.median_s = median(t.samples_s);
    return t;
}

QualityReport compare(const Tensor& x, const ScaleJob& job, const CompareOptions& options) {
    QualityReport report;
    report.factors = job.factors;
    report.method = job.method;
    report.input_shape = x.shape();

    // Single-threaded for stable timings.
    ScaleJob serial = job;
    serial.threads = 1;
    const auto bank = build_bank(serial.factors, serial.method);

    auto conv_out = scale(x, bank, serial.padding, 1);
    auto oracle_out = direct_resize(x, serial);
    report.fcfs = time_median([&] { conv_out = scale(x, bank, serial.padding, 1); }, options.reps);
    report.oracle = time_median([&] { oracle_out = direct_resize(x, serial); }, options.reps);

    report.psnr_db = psnr(conv_out, oracle_out, options.max_value);
    for (std::size_t i = 0; i < conv_out.size(); ++i) {
        report.max_abs_diff = std::max(report.max_abs_diff, std::abs(conv_out[i] - oracle_out[i]));
    }
    const auto& s = conv_out.shape();
    if (s.size() == 2 && s[0] >= kSsimWindow && s[1] >= kSsimWindow) {
        report.ssim = ssim(conv_out, oracle_out, options.max_value);
    }
    return report;
}

std::string factor_label(const std::vector<RationalScale>& factors) {
    if (factors.empty()) return "";
    const bool uniform = std::all_of(factors.begin(), factors.end(),
                                     [&](const RationalScale& f) { return f == factors.front(); });
    if (uniform) return factors.front().to_string();
    std::string label;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) label += ":";
        label += factors[i].to_string();
    }
    return label;
}

std::string csv_row(const QualityReport& r) {
    const auto& shape = r.input_shape;
    const std::size_t height = shape.size() >= 2 ? shape[shape.size() - 2] : 1;
    const std::size_t width = shape.empty() ? 0 : shape.back();
    std::ostringstream row;
    row << factor_label(r.factors) << ',' << r.method.name() << ',' << height << ',' << width
        << ',' << format_double(r.psnr_db) << ',' << format_double(r.ssim) << ','
        << format_double(r.elapsed_fcfs_s()) << ',' << format_double(r.elapsed_oracle_s());
    return row.str();
}

std::vector<CsvRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw std::runtime_error("report CSV must start with the header '" + std::string(kCsvHeader) + "'");
    }
    std::vector<CsvRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 8) {
            throw std::runtime_error("CSV line " + std::to_string(line_no) + ": expected 8 fields");
        }
        try {
            records.push_back({fields[0], fields[1], std::stoul(fields[2]), std::stoul(fields[3]),
                               std::stod(fields[4]), std::stod(fields[5]), std::stod(fields[6]),
                               std::stod(fields[7])});
        } catch (const std::logic_error&) {
            throw std::runtime_error("CSV line " + std::to_string(line_no) + ": malformed number");
        }
    }
    return records;
}

} // namespace fracscale
