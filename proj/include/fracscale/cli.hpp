#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fracscale/kernels.hpp"
#include "fracscale/tensor.hpp"

namespace fracscale::cli {

/// "r/s" applied to every one of `rank` dimensions, or one comma-separated
/// factor per dimension ("rh/sh,rw/sw").
std::vector<RationalScale> parse_factors(std::string_view text, std::size_t rank);

/// Comma-separated list of independent factors ("2/11,1/2,3/2").
std::vector<RationalScale> parse_factor_list(std::string_view text);

/// Six down-scaling then six up-scaling factors used by `bench` by default.
std::vector<RationalScale> default_bench_factors();

/// Radial gradient plus an 8-pixel checkerboard, values in [0, 255].
Tensor test_pattern(std::size_t height, std::size_t width);

/// Runs the command line. args[0] is the program name. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace fracscale::cli
