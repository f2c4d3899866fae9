#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "fracscale/error.hpp"
#include "fracscale/imageio.hpp"

using namespace fracscale;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& header, std::vector<std::uint8_t> payload) {
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

ImageError::Kind decode_error(const std::vector<std::uint8_t>& bytes) {
    try {
        decode_image(bytes);
    } catch (const ImageError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an ImageError";
    return ImageError::Kind::Io;
}

Image random_image(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> dim(1, 40);
    std::uniform_int_distribution<int> byte(0, 255);
    const std::size_t channels = (rng() % 2) ? 3 : 1;
    Image img(dim(rng), dim(rng), channels);
    for (auto& s : img.samples) s = static_cast<std::uint8_t>(byte(rng));
    return img;
}

class TempDir : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("fracscale_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }
    std::filesystem::path dir_;
};

} // namespace

TEST(Ppm, DecodesRgbPayload) {
    const auto img = decode_image(bytes_of("P6\n2 2\n255\n", {255, 0, 0, 0, 255, 0, 0, 0, 255, 255, 255, 255}));
    EXPECT_EQ(img.width, 2u);
    EXPECT_EQ(img.height, 2u);
    EXPECT_EQ(img.channels, 3u);
    EXPECT_EQ(img.samples, (std::vector<std::uint8_t>{255, 0, 0, 0, 255, 0, 0, 0, 255, 255, 255, 255}));
}

TEST(Ppm, DecodesGrayAndComments) {
    const auto img = decode_image(bytes_of("P5 # gray\n1 1\n255\n", {128}));
    EXPECT_EQ(img.channels, 1u);
    EXPECT_EQ(img.samples, (std::vector<std::uint8_t>{128}));
}

TEST(Ppm, ErrorKinds) {
    EXPECT_EQ(decode_error(bytes_of("P6\n1 1\n65535\n", {0, 0, 0, 0, 0, 0})), ImageError::Kind::UnsupportedBitDepth);
    EXPECT_EQ(decode_error(bytes_of("P6\n2 2\n255\n", {1, 2, 3})), ImageError::Kind::Truncated);
    EXPECT_EQ(decode_error(bytes_of("P6\n2 2", {})), ImageError::Kind::Truncated);
    EXPECT_EQ(decode_error(bytes_of("P3\n1 1\n255\n0 0 0\n", {})), ImageError::Kind::UnsupportedFormat);
    EXPECT_EQ(decode_error(bytes_of("GIF89a", {})), ImageError::Kind::UnsupportedFormat);
    EXPECT_EQ(decode_error(bytes_of("P5\nx 1\n255\n", {0})), ImageError::Kind::Malformed);
}

TEST(Png, ErrorKinds) {
    Image img(4, 3, 3);
    auto png = encode_image(img, ImageFormat::Png);
    png.resize(png.size() / 2);
    EXPECT_EQ(decode_error(png), ImageError::Kind::Truncated);

    auto corrupt = encode_image(img, ImageFormat::Png);
    corrupt[20] ^= 0xff;  // inside IHDR, breaks its CRC
    EXPECT_EQ(decode_error(corrupt), ImageError::Kind::Malformed);
}

TEST(Encode, GrayPromotedToThreeChannelsInP6) {
    const Image gray(2, 1, 1, {7, 9});
    const auto img = decode_image(encode_image(gray, ImageFormat::Ppm));
    EXPECT_EQ(img.channels, 3u);
    EXPECT_EQ(img.samples, (std::vector<std::uint8_t>{7, 7, 7, 9, 9, 9}));
    EXPECT_THROW(encode_image(Image(1, 1, 3), ImageFormat::Pgm), ImageError);
}

TEST_F(TempDir, RandomImagesRoundTripByteExact) {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 100; ++i) {
        const auto img = random_image(rng);
        const auto pnm = dir_ / "img.pnm";
        const auto png = dir_ / "img.png";
        write_image(img, pnm);
        write_image(img, png);
        ASSERT_EQ(read_image(pnm), img);
        ASSERT_EQ(read_image(png), img);
    }
}

TEST_F(TempDir, MissingFileIsIoError) {
    try {
        read_image(dir_ / "missing.png");
        FAIL();
    } catch (const ImageError& e) {
        EXPECT_EQ(e.kind(), ImageError::Kind::Io);
    }
    EXPECT_THROW(write_image(Image(1, 1, 1), dir_ / "img.bmp"), ImageError);
}

TEST(TensorConversion, ClampAndRound) {
    const Image img(3, 1, 1, {200, 0, 255});
    const auto t = to_tensor(img);
    EXPECT_EQ(t.shape(), (Shape{1, 3}));
    EXPECT_EQ(t[0], 200.0);
    EXPECT_EQ(from_tensor(t), img);

    const Tensor odd(Shape{1, 4}, std::vector<double>{255.7, -3.2, 2.5, 2.49});
    EXPECT_EQ(from_tensor(odd).samples, (std::vector<std::uint8_t>{255, 0, 3, 2}));
    EXPECT_THROW(from_tensor(Tensor(Shape{2, 2, 2})), ShapeError);
    EXPECT_THROW(from_tensor(Tensor(Shape{4})), ShapeError);
}

TEST(TensorConversion, RgbChannelsSplitAndMerge) {
    std::mt19937_64 rng(9);
    Image img(5, 4, 3);
    for (auto& s : img.samples) s = static_cast<std::uint8_t>(rng() % 256);
    const auto t = to_tensor(img);
    EXPECT_EQ(t.shape(), (Shape{4, 5, 3}));
    const auto planes = split_channels(t);
    ASSERT_EQ(planes.size(), 3u);
    EXPECT_EQ(planes[1][0], static_cast<double>(img.samples[1]));
    EXPECT_EQ(merge_channels(planes), t);
    EXPECT_EQ(from_tensor(merge_channels(planes)), img);
}
