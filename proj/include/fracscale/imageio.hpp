#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracscale/tensor.hpp"

namespace fracscale {

/// 8-bit gray or RGB image, rows top to bottom, channels interleaved.
struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 1;  // 1 or 3
    std::vector<std::uint8_t> samples;

    Image() = default;
    Image(std::size_t width, std::size_t height, std::size_t channels);
    Image(std::size_t width, std::size_t height, std::size_t channels,
          std::vector<std::uint8_t> samples);

    void validate() const;

    friend bool operator==(const Image&, const Image&) = default;
};

class ImageError : public std::runtime_error {
public:
    enum class Kind { Io, UnsupportedFormat, UnsupportedBitDepth, Truncated, Malformed };

    ImageError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Pgm writes P5 (gray only), Ppm writes P6 (gray is promoted to three equal
/// channels), Png writes 8-bit gray or RGB.
enum class ImageFormat { Pgm, Ppm, Png };

/// Picks a format from the extension: .pgm, .ppm, .png; .pnm chooses P5 or P6
/// from the channel count.
ImageFormat format_for_path(const std::filesystem::path& path, std::size_t channels);

/// Decodes PNG or binary PPM/PGM (P6/P5, maxval 255), detected from content.
Image decode_image(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_image(const Image& img, ImageFormat format);

Image read_image(const std::filesystem::path& path);
void write_image(const Image& img, const std::filesystem::path& path, ImageFormat format);
void write_image(const Image& img, const std::filesystem::path& path);

/// Gray -> H x W tensor; RGB -> H x W x 3. Values stay in [0, 255].
Tensor to_tensor(const Image& img);

/// Accepts H x W, H x W x 1 or H x W x 3. Clamps to [0, 255] and rounds half up.
Image from_tensor(const Tensor& t);

/// Splits H x W x C into C planes of H x W (a rank-2 tensor yields itself).
std::vector<Tensor> split_channels(const Tensor& t);
/// Inverse of split_channels; one plane yields H x W.
Tensor merge_channels(const std::vector<Tensor>& planes);

} // namespace fracscale
