#include <meshcs/image.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <png.h>

using namespace meshcs;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("meshcs_image_test_" + name)).string();
}

void write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out << bytes;
}

void write_rgb_png(const std::string& path, int w, int h, const std::vector<unsigned char>& rgb) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(w);
    image.height = static_cast<png_uint_32>(h);
    image.format = PNG_FORMAT_RGB;
    ASSERT_TRUE(png_image_write_to_file(&image, path.c_str(), 0, rgb.data(), 0, nullptr));
}

}  // namespace

TEST(LoadImage, TwoByTwoPgm) {
    const auto path = temp_path("2x2.pgm");
    write_bytes(path, std::string("P5\n2 2\n255\n") + std::string({'\x00', '\xff', '\x80', '\x40'}));
    const auto img = load_image(path);
    EXPECT_EQ(img.width(), 2u);
    EXPECT_EQ(img.height(), 2u);
    EXPECT_EQ(img.precision_bits(), 8);
    EXPECT_EQ(as_vector(img), (std::vector<double>{0, 255, 128, 64}));
}

TEST(LoadImage, HeaderComments) {
    const auto path = temp_path("comment.pgm");
    write_bytes(path, std::string("P5\n# made by hand\n2 2\n255\n") + std::string({'\x01', '\x02', '\x03', '\x04'}));
    EXPECT_EQ(as_vector(load_image(path)), (std::vector<double>{1, 2, 3, 4}));
}

TEST(LoadImage, RgbPngUsesLuma) {
    const auto path = temp_path("rgb.png");
    write_rgb_png(path, 2, 1, {255, 255, 255, 100, 200, 50});
    const auto img = load_image(path);
    ASSERT_EQ(img.size(), 2u);
    EXPECT_EQ(img.at(0, 0), 255.0);
    // round(0.299*100 + 0.587*200 + 0.114*50) = round(153.0)
    EXPECT_EQ(img.at(0, 1), 153.0);
}

TEST(LoadImage, Errors) {
    EXPECT_THROW(load_image(temp_path("does_not_exist.pgm")), IoError);
    const auto bogus = temp_path("bogus.bin");
    write_bytes(bogus, "GIF89a....");
    EXPECT_THROW(load_image(bogus), IoError);
    const auto zero = temp_path("zero.pgm");
    write_bytes(zero, "P5\n0 4\n255\n");
    EXPECT_THROW(load_image(zero), ValidationError);
    const auto deep = temp_path("deep.pgm");
    write_bytes(deep, "P5\n1 1\n65535\n\x01\x02");
    EXPECT_THROW(load_image(deep), IoError);
    const auto cut = temp_path("cut.pgm");
    write_bytes(cut, "P5\n4 4\n255\nabc");
    EXPECT_THROW(load_image(cut), IoError);
}

TEST(Luma, StaysInByteRange) {
    for (int r = 0; r < 256; r += 15)
        for (int g = 0; g < 256; g += 15)
            for (int b = 0; b < 256; b += 15) {
                const int y = luma(static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                                   static_cast<std::uint8_t>(b));
                EXPECT_GE(y, 0);
                EXPECT_LE(y, 255);
            }
    EXPECT_EQ(luma(255, 255, 255), 255);
    EXPECT_EQ(luma(0, 0, 0), 0);
}

TEST(SaveImage, RoundingHalfAwayFromZero) {
    const GrayImage img(2, 2, {127.5, 127.4, 0.0, 254.5});
    const auto bytes = encode_pgm(img);
    const std::string header = "P5\n2 2\n255\n";
    ASSERT_EQ(bytes.size(), header.size() + 4);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(header.size())), header);
    EXPECT_EQ(bytes[header.size() + 0], 128);
    EXPECT_EQ(bytes[header.size() + 1], 127);
    EXPECT_EQ(bytes[header.size() + 2], 0);
    EXPECT_EQ(bytes[header.size() + 3], 255);
}

TEST(SaveImage, UnwritablePath) {
    const GrayImage img(2, 2);
    EXPECT_THROW(save_image(img, "/nonexistent_dir_for_meshcs/x.pgm"), IoError);
}

// Property: save then load is the identity on integer-valued images.
TEST(SaveImage, IntegerRoundTripProperty) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t w = 2 + rng() % 9, h = 2 + rng() % 9;
        std::vector<double> data(w * h);
        for (double& v : data) v = static_cast<double>(rng() % 256);
        const GrayImage img(w, h, data);
        const auto path = temp_path("roundtrip.pgm");
        save_image(img, path);
        EXPECT_EQ(load_image(path), img);
    }
}

TEST(AsVector, RowMajorAndReshapeInverse) {
    const GrayImage img(2, 2, {1, 2, 3, 4});
    EXPECT_EQ(as_vector(img), (std::vector<double>{1, 2, 3, 4}));
    EXPECT_EQ(img.at(1, 0), 3.0);

    const GrayImage flat(5, 1, {5, 4, 3, 2, 1});
    EXPECT_EQ(as_vector(flat), (std::vector<double>{5, 4, 3, 2, 1}));

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t w = 1 + rng() % 7, h = 1 + rng() % 7;
        std::vector<double> v(w * h);
        for (double& x : v) x = static_cast<double>(rng() % 2560) / 10.0;
        const auto img2 = from_vector(v, w, h);
        EXPECT_EQ(as_vector(img2), v);
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j) EXPECT_EQ(img2.at(i, j), v[i * w + j]);
    }
}

TEST(GrayImage, Invariants) {
    EXPECT_THROW(GrayImage(0, 3), ValidationError);
    EXPECT_THROW(GrayImage(2, 2, {1, 2, 3}), ValidationError);
    EXPECT_THROW(GrayImage(2, 2, {1, 2, 3, 256}), ValidationError);
    EXPECT_THROW(GrayImage(2, 2, {1, 2, 3, -0.5}), ValidationError);
    const auto c = GrayImage::clamped(2, 1, {-3.0, 300.0});
    EXPECT_EQ(as_vector(c), (std::vector<double>{0.0, 255.0}));
}

TEST(LoadImage, BundledCameraman) {
    const auto img = load_image(std::string(MESHCS_DATA_DIR) + "/cameraman.pgm");
    EXPECT_EQ(img.width(), 256u);
    EXPECT_EQ(img.height(), 256u);
}
