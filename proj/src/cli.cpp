#include "fracscale/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "fracscale/fcfs.hpp"
#include "fracscale/imageio.hpp"
#include "fracscale/metrics.hpp"

namespace fracscale::cli {

namespace {

constexpr const char* kCsvHelp =
    "bench CSV columns (one row per size x factor x method):\n"
    "  factor      r/s, or rh/sh:rw/sw when the dimensions differ\n"
    "  method      nearest | bilinear | bicubic\n"
    "  height      input height in pixels\n"
    "  width       input width in pixels\n"
    "  psnr_db     PSNR between conv and direct outputs, max 255; 'inf' when identical\n"
    "  ssim        mean SSIM, 11x11 Gaussian window, sigma 1.5, C1=(0.01*255)^2, C2=(0.03*255)^2;\n"
    "              'nan' when an output side is shorter than 11\n"
    "  t_fcfs_s    median seconds of the pad/conv/shuffle pipeline\n"
    "  t_oracle_s  median seconds of the direct per-pixel resize\n"
    "\n"
    "FRACSCALE_THREADS caps the threads used by `scale` (0 = all cores).";

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.emplace_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

PadMode parse_padding(const std::string& name) {
    if (name == "replicate") return PadMode::Replicate;
    if (name == "reflect") return PadMode::Reflect;
    if (name == "zero") return PadMode::Zero;
    throw std::invalid_argument("unknown padding '" + name + "' (expected replicate, reflect or zero)");
}

std::size_t env_threads() {
    const char* value = std::getenv("FRACSCALE_THREADS");
    if (!value || !*value) return 0;
    char* end = nullptr;
    const long n = std::strtol(value, &end, 10);
    if (*end != '\0' || n < 0) throw std::invalid_argument("FRACSCALE_THREADS must be a non-negative integer");
    return static_cast<std::size_t>(n);
}

std::string shape_text(const Shape& s) {
    std::string text = "(";
    for (std::size_t d = 0; d < s.size(); ++d) {
        if (d) text += ",";
        text += std::to_string(s[d]);
    }
    return text + ")";
}

// Writes to `path`, or to `out` when path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    file << text;
    if (!file) throw std::runtime_error("error writing '" + path + "'");
}

struct ScaleArgs {
    std::string factor;
    std::string method = "bilinear";
    std::string padding = "replicate";
    std::string input;
    std::string output;
    std::string dump_kernels;
};

struct BenchArgs {
    std::vector<std::size_t> sizes{128};
    std::string factors;
    std::vector<std::string> methods{"nearest", "bilinear", "bicubic"};
    std::string padding = "replicate";
    std::size_t reps = 100;
    std::string csv;
    std::string input;
};

struct KernelArgs {
    std::string factor;
    std::string method = "bilinear";
    std::size_t rank = 2;
    std::string phase;
    std::string dump_kernels;
};

int cmd_scale(const ScaleArgs& a, std::ostream& out) {
    const Image img = read_image(a.input);
    const Tensor pixels = to_tensor(img);
    ScaleJob job{parse_factors(a.factor, 2), ScalingMethod::parse(a.method), parse_padding(a.padding),
                 env_threads()};
    job.validate();
    const KernelBank bank = build_bank(job.factors, job.method);
    if (!a.dump_kernels.empty()) emit(a.dump_kernels, bank.to_json() + "\n", out);

    std::vector<Tensor> planes;
    for (const auto& plane : split_channels(pixels)) {
        planes.push_back(scale(plane, bank, job.padding, job.threads));
    }
    const Image result = from_tensor(merge_channels(planes));
    write_image(result, a.output);
    out << shape_text({img.height, img.width}) << " -> " << shape_text({result.height, result.width})
        << "\n";
    return 0;
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
    if (a.reps == 0) throw std::invalid_argument("--reps must be at least 1");
    const auto factors = a.factors.empty() ? default_bench_factors() : parse_factor_list(a.factors);
    std::vector<ScalingMethod> methods;
    for (const auto& m : a.methods) methods.push_back(ScalingMethod::parse(m));
    const PadMode padding = parse_padding(a.padding);

    std::vector<Tensor> inputs;
    if (!a.input.empty()) {
        const auto planes = split_channels(to_tensor(read_image(a.input)));
        Tensor gray = planes.front();
        for (std::size_t k = 1; k < planes.size(); ++k) {
            for (std::size_t i = 0; i < gray.size(); ++i) gray[i] += planes[k][i];
        }
        for (std::size_t i = 0; i < gray.size(); ++i) gray[i] /= static_cast<double>(planes.size());
        inputs.push_back(std::move(gray));
    } else {
        if (a.sizes.empty()) throw std::invalid_argument("--sizes needs at least one size");
        for (auto n : a.sizes) {
            if (n == 0) throw std::invalid_argument("bench sizes must be positive");
            inputs.push_back(test_pattern(n, n));
        }
    }

    std::ostringstream csv;
    csv << kCsvHeader << "\n";
    std::ostringstream table;
    table << std::left << std::setw(8) << "factor" << std::setw(10) << "method" << std::setw(11) << "size"
          << std::right << std::setw(10) << "psnr_db" << std::setw(14) << "ssim" << std::setw(12)
          << "fcfs_ms" << std::setw(12) << "oracle_ms" << std::setw(8) << "ratio" << "\n";

    CompareOptions options;
    options.reps = a.reps;
    options.max_value = 255.0;
    for (const auto& x : inputs) {
        for (const auto& f : factors) {
            for (const auto& method : methods) {
                ScaleJob job{{f, f}, method, padding, 1};
                const auto report = compare(x, job, options);
                csv << csv_row(report) << "\n";
                char line[160];
                std::snprintf(line, sizeof line, "%-8s%-10s%-11s%10.2f%14.10f%12.4f%12.4f%8.2f\n",
                              f.to_string().c_str(), method.name().c_str(),
                              (std::to_string(x.shape()[0]) + "x" + std::to_string(x.shape()[1])).c_str(),
                              report.psnr_db, report.ssim, report.elapsed_fcfs_s() * 1e3,
                              report.elapsed_oracle_s() * 1e3,
                              report.elapsed_fcfs_s() / report.elapsed_oracle_s());
                table << line;
            }
        }
    }

    // The summary goes wherever the CSV does not.
    if (a.csv.empty() || a.csv == "-") {
        out << csv.str();
        err << table.str();
    } else {
        emit(a.csv, csv.str(), out);
        out << table.str();
    }
    return 0;
}

int cmd_kernels(const KernelArgs& a, std::ostream& out) {
    const auto factors = parse_factors(a.factor, a.rank);
    const KernelBank bank = build_bank(factors, ScalingMethod::parse(a.method));
    if (a.phase.empty()) {
        emit(a.dump_kernels, bank.to_json() + "\n", out);
        return 0;
    }
    if (!a.dump_kernels.empty()) emit(a.dump_kernels, bank.to_json() + "\n", out);

    std::vector<std::size_t> phase;
    for (const auto& part : split(a.phase, ',')) {
        std::size_t pos = 0;
        long long j = -1;
        try {
            j = std::stoll(part, &pos);
        } catch (const std::logic_error&) {
        }
        if (j < 0 || pos != part.size()) throw std::invalid_argument("invalid phase index '" + part + "'");
        phase.push_back(static_cast<std::size_t>(j));
    }
    const PhaseKernel& k = bank.kernel(phase);
    const auto& extent = k.weights.shape();
    const std::size_t cols = extent.back();
    for (std::size_t i = 0; i < k.weights.size(); ++i) {
        char cell[32];
        // Print -0.00 as 0.00.
        const double v = std::round(k.weights[i] * 100.0) / 100.0;
        std::snprintf(cell, sizeof cell, "%.2f", v == 0.0 ? 0.0 : v);
        out << cell << ((i + 1) % cols == 0 ? "\n" : " ");
    }
    return 0;
}

} // namespace

std::vector<RationalScale> parse_factors(std::string_view text, std::size_t rank) {
    const auto parts = split(text, ',');
    if (parts.size() == 1) return std::vector<RationalScale>(rank, RationalScale::parse(parts[0]));
    if (parts.size() != rank) {
        throw std::invalid_argument("expected 1 or " + std::to_string(rank) + " factors in '" +
                                    std::string(text) + "'");
    }
    std::vector<RationalScale> out;
    for (const auto& p : parts) out.push_back(RationalScale::parse(p));
    return out;
}

std::vector<RationalScale> parse_factor_list(std::string_view text) {
    std::vector<RationalScale> out;
    for (const auto& p : split(text, ',')) out.push_back(RationalScale::parse(p));
    return out;
}

std::vector<RationalScale> default_bench_factors() {
    return {{2, 11}, {1, 4}, {1, 2}, {2, 3},  {5, 6},  {10, 11},
            {11, 10}, {6, 5}, {3, 2}, {2, 1}, {27, 11}, {4, 1}};
}

Tensor test_pattern(std::size_t height, std::size_t width) {
    Tensor t(Shape{height, width});
    const double cy = 0.5 * static_cast<double>(height - 1);
    const double cx = 0.5 * static_cast<double>(width - 1);
    const double reach = std::hypot(cy, cx) + 1.0;
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            const double radial = 1.0 - std::hypot(static_cast<double>(y) - cy, static_cast<double>(x) - cx) / reach;
            const double checker = ((y / 8 + x / 8) % 2) ? 1.0 : 0.0;
            t[y * width + x] = std::round(255.0 * (0.6 * radial + 0.4 * checker));
        }
    }
    return t;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fractional image scaling by pad -> strided convolution -> pixelshuffle", "fracscale"};
    app.require_subcommand(1);
    app.footer(kCsvHelp);

    ScaleArgs scale_args;
    auto* scale_cmd = app.add_subcommand("scale", "Resize an image (PNG, PPM or PGM)");
    scale_cmd->add_option("--factor", scale_args.factor, "Scale factor r/s, or rh/sh,rw/sw")->required();
    scale_cmd->add_option("--method", scale_args.method, "nearest | bilinear | bicubic")->capture_default_str();
    scale_cmd->add_option("--padding", scale_args.padding, "replicate | reflect | zero")->capture_default_str();
    scale_cmd->add_option("--dump-kernels", scale_args.dump_kernels, "Write the kernel bank as JSON ('-' for stdout)");
    scale_cmd->add_option("input", scale_args.input, "Input image")->required();
    scale_cmd->add_option("output", scale_args.output, "Output image; format from extension")->required();

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "Time and compare the conv pipeline against the direct resize");
    bench_cmd->add_option("--sizes", bench_args.sizes, "Square test-pattern sizes")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--factors", bench_args.factors, "Comma-separated factors (default: 12-factor grid)");
    bench_cmd->add_option("--methods", bench_args.methods, "Methods to run")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--padding", bench_args.padding, "replicate | reflect | zero")->capture_default_str();
    bench_cmd->add_option("--reps", bench_args.reps, "Timed repetitions per cell")->capture_default_str();
    bench_cmd->add_option("--csv", bench_args.csv, "CSV output path (default stdout)");
    bench_cmd->add_option("--input", bench_args.input, "Benchmark this image (averaged to gray) instead of the test pattern");

    KernelArgs kernel_args;
    auto* kernels_cmd = app.add_subcommand("kernels", "Print the per-phase convolution kernels");
    kernels_cmd->add_option("--factor", kernel_args.factor, "Scale factor r/s, or one per dimension")->required();
    kernels_cmd->add_option("--method", kernel_args.method, "nearest | bilinear | bicubic")->capture_default_str();
    kernels_cmd->add_option("--rank", kernel_args.rank, "Dimensions when a single factor is given")
        ->check(CLI::Range(1, 3))
        ->capture_default_str();
    kernels_cmd->add_option("--phase", kernel_args.phase, "Print one kernel, e.g. 2,2, rounded to 2 decimals");
    kernels_cmd->add_option("--dump-kernels", kernel_args.dump_kernels, "Write the kernel bank JSON here");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 1;
    }

    try {
        if (*scale_cmd) return cmd_scale(scale_args, out);
        if (*bench_cmd) return cmd_bench(bench_args, out, err);
        if (*kernels_cmd) return cmd_kernels(kernel_args, out);
    } catch (const std::exception& e) {
        err << "fracscale: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace fracscale::cli
