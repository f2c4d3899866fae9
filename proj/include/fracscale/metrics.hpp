#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "fracscale/fcfs.hpp"
#include "fracscale/tensor.hpp"

namespace fracscale {

inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// 10*log10(max^2 / MSE), or +infinity when the inputs are identical.
double psnr(const Tensor& a, const Tensor& b, double max_value);

/// Mean SSIM over the valid region of an 11x11 Gaussian window (sigma 1.5),
/// C1 = (0.01*max)^2, C2 = (0.03*max)^2. Rank-2 inputs of at least 11x11.
double ssim(const Tensor& a, const Tensor& b, double max_value);

inline constexpr std::size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

/// Normalized 1D Gaussian used (as an outer product) for the SSIM window.
std::vector<double> ssim_gaussian();

double median(std::vector<double> samples);

struct Timing {
    std::vector<double> samples_s;
    double median_s = 0.0;
};

/// One untimed warm-up call, then `reps` timed calls on a steady clock.
Timing time_median(const std::function<void()>& fn, std::size_t reps);

struct QualityReport {
    std::vector<RationalScale> factors;
    ScalingMethod method;
    Shape input_shape;
    double psnr_db = 0.0;
    double ssim = std::numeric_limits<double>::quiet_NaN();  // NaN when the output is too small
    double max_abs_diff = 0.0;
    Timing fcfs;
    Timing oracle;

    double elapsed_fcfs_s() const { return fcfs.median_s; }
    double elapsed_oracle_s() const { return oracle.median_s; }
};

struct CompareOptions {
    std::size_t reps = 100;
    double max_value = 255.0;
};

/// Runs scale() and direct_resize() on x, times both and measures how far
/// apart their outputs are.
QualityReport compare(const Tensor& x, const ScaleJob& job, const CompareOptions& options = {});

/// "3/2" when every dimension shares one factor, otherwise "3/2:2/3".
std::string factor_label(const std::vector<RationalScale>& factors);

inline constexpr const char* kCsvHeader =
    "factor,method,height,width,psnr_db,ssim,t_fcfs_s,t_oracle_s";

std::string csv_row(const QualityReport& report);

struct CsvRecord {
    std::string factor;
    std::string method;
    std::size_t height = 0;
    std::size_t width = 0;
    double psnr_db = 0.0;
    double ssim = 0.0;
    double t_fcfs_s = 0.0;
    double t_oracle_s = 0.0;
};

/// Parses a report CSV (header line required).
std::vector<CsvRecord> read_csv(std::istream& in);

} // namespace fracscale
