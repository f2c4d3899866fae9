#pragma once

#include <stdexcept>
#include <string>

namespace fracscale {

// Shapes that do not fit together (rank mismatch, channel count, kernel larger
// than input, non-divisible unshuffle).
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidPadding : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class UnsupportedRank : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace fracscale
