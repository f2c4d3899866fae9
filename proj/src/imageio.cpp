#include "fracscale/imageio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include <png.h>

#include "fracscale/error.hpp"

namespace fracscale {

namespace {

using Kind = ImageError::Kind;

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

bool is_png(const std::vector<std::uint8_t>& bytes) {
    return bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0;
}

// ---- PPM / PGM -------------------------------------------------------------

class PnmHeaderReader {
public:
    explicit PnmHeaderReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::size_t number() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size()) throw ImageError(Kind::Truncated, "PNM header is truncated");
        if (!std::isdigit(bytes_[pos_])) throw ImageError(Kind::Malformed, "PNM header field is not a number");
        std::size_t value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + static_cast<std::size_t>(bytes_[pos_++] - '0');
            if (value > (1u << 24)) throw ImageError(Kind::Malformed, "PNM header value too large");
        }
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_start() {
        if (pos_ >= bytes_.size()) throw ImageError(Kind::Truncated, "PNM header is truncated");
        if (!std::isspace(bytes_[pos_])) throw ImageError(Kind::Malformed, "PNM header must end in whitespace");
        return pos_ + 1;
    }

    void seek(std::size_t pos) { pos_ = pos; }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

Image decode_pnm(const std::vector<std::uint8_t>& bytes) {
    const std::size_t channels = bytes[1] == '5' ? 1 : 3;
    PnmHeaderReader header(bytes);
    header.seek(2);
    const auto width = header.number();
    const auto height = header.number();
    const auto maxval = header.number();
    if (width == 0 || height == 0) throw ImageError(Kind::Malformed, "PNM image has a zero dimension");
    if (maxval != 255) {
        throw ImageError(Kind::UnsupportedBitDepth,
                         "PNM maxval " + std::to_string(maxval) + " is not supported (need 255)");
    }
    const std::size_t start = header.raster_start();
    const std::size_t count = width * height * channels;
    if (bytes.size() < start + count) {
        throw ImageError(Kind::Truncated, "PNM raster is truncated: expected " + std::to_string(count) +
                                              " bytes, found " + std::to_string(bytes.size() - std::min(bytes.size(), start)));
    }
    return Image(width, height, channels,
                 std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                                           bytes.begin() + static_cast<std::ptrdiff_t>(start + count)));
}

std::vector<std::uint8_t> encode_pnm(const Image& img, bool rgb) {
    const std::string header = std::string(rgb ? "P6" : "P5") + "\n" + std::to_string(img.width) + " " +
                               std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    if (rgb && img.channels == 1) {
        out.reserve(out.size() + img.samples.size() * 3);
        for (auto v : img.samples) out.insert(out.end(), {v, v, v});
    } else {
        out.insert(out.end(), img.samples.begin(), img.samples.end());
    }
    return out;
}

// ---- PNG -------------------------------------------------------------------
//
// libpng reports errors by longjmp. The functions that call into libpng keep
// their results behind pointers and hold no C++ objects of their own, so
// nothing is skipped when a jump lands.

struct PngIo {
    const std::uint8_t* data = nullptr;
    std::size_t size = 0;
    std::size_t pos = 0;
    bool truncated = false;
    std::vector<std::uint8_t>* sink = nullptr;
    char message[256] = {};
};

void png_error_fn(png_structp png, png_const_charp msg) {
    auto* io = static_cast<PngIo*>(png_get_error_ptr(png));
    std::snprintf(io->message, sizeof io->message, "%s", msg);
    png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

void png_read_fn(png_structp png, png_bytep out, png_size_t len) {
    auto* io = static_cast<PngIo*>(png_get_io_ptr(png));
    if (io->pos + len > io->size) {
        io->truncated = true;
        png_error(png, "unexpected end of PNG data");
    }
    std::memcpy(out, io->data + io->pos, len);
    io->pos += len;
}

void png_write_fn(png_structp png, png_bytep data, png_size_t len) {
    auto* io = static_cast<PngIo*>(png_get_io_ptr(png));
    io->sink->insert(io->sink->end(), data, data + len);
}

void png_flush_fn(png_structp) {}

enum class PngStatus { Ok, Failed, SixteenBit, Alpha };

struct PngDecoded {
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int channels = 0;
    std::vector<std::uint8_t> samples;
    std::vector<png_bytep> rows;
};

PngStatus png_decode_raw(png_structp png, png_infop info, PngIo* io, PngDecoded* out) {
    if (setjmp(png_jmpbuf(png))) return PngStatus::Failed;
    png_set_read_fn(png, io, png_read_fn);
    png_read_info(png, info);

    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (depth == 16) return PngStatus::SixteenBit;
    if ((color & PNG_COLOR_MASK_ALPHA) || png_get_valid(png, info, PNG_INFO_tRNS)) return PngStatus::Alpha;
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    out->width = png_get_image_width(png, info);
    out->height = png_get_image_height(png, info);
    out->channels = png_get_channels(png, info);
    const std::size_t stride = static_cast<std::size_t>(out->width) * static_cast<std::size_t>(out->channels);
    if (png_get_rowbytes(png, info) != stride) png_error(png, "unexpected PNG row layout");
    out->samples.resize(stride * out->height);
    out->rows.resize(out->height);
    for (png_uint_32 y = 0; y < out->height; ++y) out->rows[y] = out->samples.data() + y * stride;
    png_read_image(png, out->rows.data());
    png_read_end(png, nullptr);
    return PngStatus::Ok;
}

Image decode_png(const std::vector<std::uint8_t>& bytes) {
    PngIo io;
    io.data = bytes.data();
    io.size = bytes.size();
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &io, png_error_fn, png_warning_fn);
    if (!png) throw ImageError(Kind::Io, "cannot allocate PNG decoder");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw ImageError(Kind::Io, "cannot allocate PNG decoder");
    }
    PngDecoded decoded;
    const PngStatus status = png_decode_raw(png, info, &io, &decoded);
    png_destroy_read_struct(&png, &info, nullptr);

    switch (status) {
    case PngStatus::Ok:
        break;
    case PngStatus::SixteenBit:
        throw ImageError(Kind::UnsupportedBitDepth, "16-bit PNG images are not supported");
    case PngStatus::Alpha:
        throw ImageError(Kind::UnsupportedFormat, "PNG images with alpha are not supported");
    case PngStatus::Failed:
        if (io.truncated) throw ImageError(Kind::Truncated, "PNG data is truncated");
        throw ImageError(Kind::Malformed, std::string("corrupt PNG: ") + io.message);
    }
    if (decoded.channels != 1 && decoded.channels != 3) {
        throw ImageError(Kind::UnsupportedFormat, "unsupported PNG channel layout");
    }
    return Image(decoded.width, decoded.height, static_cast<std::size_t>(decoded.channels),
                 std::move(decoded.samples));
}

bool png_encode_raw(png_structp png, png_infop info, PngIo* io, const Image* img, png_bytepp rows) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_set_write_fn(png, io, png_write_fn, png_flush_fn);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img->width), static_cast<png_uint_32>(img->height), 8,
                 img->channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    return true;
}

std::vector<std::uint8_t> encode_png(const Image& img) {
    std::vector<std::uint8_t> out;
    std::vector<png_bytep> rows(img.height);
    const std::size_t stride = img.width * img.channels;
    // libpng takes non-const row pointers but only reads them when writing.
    auto* base = const_cast<std::uint8_t*>(img.samples.data());
    for (std::size_t y = 0; y < img.height; ++y) rows[y] = base + y * stride;

    PngIo io;
    io.sink = &out;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &io, png_error_fn, png_warning_fn);
    if (!png) throw ImageError(Kind::Io, "cannot allocate PNG encoder");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw ImageError(Kind::Io, "cannot allocate PNG encoder");
    }
    const bool ok = png_encode_raw(png, info, &io, &img, rows.data());
    png_destroy_write_struct(&png, &info);
    if (!ok) throw ImageError(Kind::Io, std::string("PNG encoding failed: ") + io.message);
    return out;
}

std::uint8_t quantize(double v) {
    return static_cast<std::uint8_t>(std::floor(std::clamp(v, 0.0, 255.0) + 0.5));
}

} // namespace

Image::Image(std::size_t w, std::size_t h, std::size_t c) : Image(w, h, c, std::vector<std::uint8_t>(w * h * c)) {}

Image::Image(std::size_t w, std::size_t h, std::size_t c, std::vector<std::uint8_t> s)
    : width(w), height(h), channels(c), samples(std::move(s)) {
    validate();
}

void Image::validate() const {
    if (width == 0 || height == 0) throw std::invalid_argument("image dimensions must be positive");
    if (channels != 1 && channels != 3) throw std::invalid_argument("images have 1 or 3 channels");
    if (samples.size() != width * height * channels) {
        throw std::invalid_argument("image sample count does not match width*height*channels");
    }
}

ImageFormat format_for_path(const std::filesystem::path& path, std::size_t channels) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".png") return ImageFormat::Png;
    if (ext == ".ppm") return ImageFormat::Ppm;
    if (ext == ".pgm") return ImageFormat::Pgm;
    if (ext == ".pnm") return channels == 1 ? ImageFormat::Pgm : ImageFormat::Ppm;
    throw ImageError(Kind::UnsupportedFormat, "cannot infer image format from '" + path.string() + "'");
}

Image decode_image(const std::vector<std::uint8_t>& bytes) {
    if (is_png(bytes)) return decode_png(bytes);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
        return decode_pnm(bytes);
    }
    if (bytes.size() < 2) throw ImageError(Kind::Truncated, "file too short to identify");
    throw ImageError(Kind::UnsupportedFormat, "not a PNG or binary PPM/PGM image");
}

std::vector<std::uint8_t> encode_image(const Image& img, ImageFormat format) {
    img.validate();
    switch (format) {
    case ImageFormat::Pgm:
        if (img.channels != 1) throw ImageError(Kind::UnsupportedFormat, "PGM holds gray images only");
        return encode_pnm(img, false);
    case ImageFormat::Ppm:
        return encode_pnm(img, true);
    case ImageFormat::Png:
        return encode_png(img);
    }
    throw ImageError(Kind::UnsupportedFormat, "unknown image format");
}

Image read_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageError(Kind::Io, "cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw ImageError(Kind::Io, "error reading '" + path.string() + "'");
    return decode_image(bytes);
}

void write_image(const Image& img, const std::filesystem::path& path, ImageFormat format) {
    const auto bytes = encode_image(img, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ImageError(Kind::Io, "cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ImageError(Kind::Io, "error writing '" + path.string() + "'");
}

void write_image(const Image& img, const std::filesystem::path& path) {
    write_image(img, path, format_for_path(path, img.channels));
}

Tensor to_tensor(const Image& img) {
    img.validate();
    Shape shape{img.height, img.width};
    if (img.channels == 3) shape.push_back(3);
    return Tensor(std::move(shape), std::vector<double>(img.samples.begin(), img.samples.end()));
}

Image from_tensor(const Tensor& t) {
    const auto& s = t.shape();
    std::size_t channels = 1;
    if (s.size() == 3) {
        channels = s[2];
        if (channels != 1 && channels != 3) throw ShapeError("image tensors have 1 or 3 channels");
    } else if (s.size() != 2) {
        throw ShapeError("image tensors have rank 2 or 3");
    }
    std::vector<std::uint8_t> samples(t.size());
    std::transform(t.data().begin(), t.data().end(), samples.begin(), quantize);
    return Image(s[1], s[0], channels, std::move(samples));
}

std::vector<Tensor> split_channels(const Tensor& t) {
    if (t.rank() == 2) return {t};
    if (t.rank() != 3) throw ShapeError("expected an H x W or H x W x C tensor");
    const std::size_t h = t.shape()[0], w = t.shape()[1], c = t.shape()[2];
    std::vector<Tensor> planes;
    for (std::size_t k = 0; k < c; ++k) {
        Tensor plane(Shape{h, w});
        for (std::size_t i = 0; i < h * w; ++i) plane[i] = t[i * c + k];
        planes.push_back(std::move(plane));
    }
    return planes;
}

Tensor merge_channels(const std::vector<Tensor>& planes) {
    if (planes.empty()) throw ShapeError("no channel planes to merge");
    if (planes.size() == 1) return planes.front();
    const Shape& s = planes.front().shape();
    if (s.size() != 2) throw ShapeError("channel planes must be rank 2");
    const std::size_t c = planes.size();
    Tensor out(Shape{s[0], s[1], c});
    for (std::size_t k = 0; k < c; ++k) {
        if (planes[k].shape() != s) throw ShapeError("channel planes differ in shape");
        for (std::size_t i = 0; i < planes[k].size(); ++i) out[i * c + k] = planes[k][i];
    }
    return out;
}

} // namespace fracscale
