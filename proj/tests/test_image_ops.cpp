#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "autobox/error.hpp"
#include "autobox/image.hpp"
#include "autobox/image_io.hpp"
#include "autobox/image_ops.hpp"
#include "oracles.hpp"

using namespace autobox;

TEST(RasterImage, RejectsBadDimensions) {
    EXPECT_THROW(RasterImage(0, 5), Error);
    EXPECT_THROW(RasterImage(2, 2, std::vector<std::uint8_t>(11)), Error);
    EXPECT_NO_THROW(RasterImage(2, 2, std::vector<std::uint8_t>(12)));
}

TEST(Crop, FullImageIsIdentity) {
    std::mt19937_64 rng(1);
    const RasterImage img = oracle::random_image(rng, 17, 9);
    EXPECT_EQ(crop(img, {0, 0, 17, 9}), img);
}

TEST(Crop, SinglePixel) {
    std::mt19937_64 rng(2);
    const RasterImage img = oracle::random_image(rng, 10, 10);
    const RasterImage c = crop(img, {3, 4, 1, 1});
    ASSERT_EQ(c.width(), 1);
    EXPECT_EQ(c.at(0, 0), img.at(3, 4));
}

TEST(Crop, TwoToneCounts) {
    // Left 12 columns red, rest blue; a crop straddling x = 12 by 5 and 7 columns.
    RasterImage img(30, 10, Rgb{0, 0, 255});
    fill_rect(img, {0, 0, 12, 10}, Rgb{255, 0, 0});
    const RasterImage c = crop(img, {7, 2, 12, 6});
    int red = 0, blue = 0;
    for (int y = 0; y < c.height(); ++y)
        for (int x = 0; x < c.width(); ++x) (c.at(x, y).r == 255 ? red : blue)++;
    EXPECT_EQ(red, 5 * 6);
    EXPECT_EQ(blue, 7 * 6);
}

TEST(Crop, OutOfBoundsThrows) {
    const RasterImage img(10, 10);
    try {
        crop(img, {5, 5, 6, 1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::OutOfBounds);
    }
}

TEST(Crop, PasteThenCropRoundTrips) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        RasterImage canvas = oracle::random_image(rng, 40, 30);
        const int w = std::uniform_int_distribution<int>(1, 20)(rng);
        const int h = std::uniform_int_distribution<int>(1, 15)(rng);
        const int x = std::uniform_int_distribution<int>(0, 40 - w)(rng);
        const int y = std::uniform_int_distribution<int>(0, 30 - h)(rng);
        const RasterImage piece = oracle::random_image(rng, w, h);
        paste(canvas, piece, x, y);
        EXPECT_EQ(crop(canvas, {x, y, w, h}), piece);
    }
}

TEST(Resize, PreserveAspectExamples) {
    const RasterImage hd(1920, 1080, Rgb{1, 2, 3});
    const RasterImage r = resize_preserve_aspect(hd, 640);
    EXPECT_EQ(r.width(), 640);
    EXPECT_EQ(r.height(), 360);

    const RasterImage vga(640, 480, Rgb{4, 5, 6});
    EXPECT_EQ(resize_preserve_aspect(vga, 640), vga);

    const RasterImage sq = resize_preserve_aspect(RasterImage(1000, 1000), 640);
    EXPECT_EQ(sq.width(), 640);
    EXPECT_EQ(sq.height(), 640);

    const RasterImage tall = resize_preserve_aspect(RasterImage(300, 1000), 640);
    EXPECT_EQ(tall.height(), 640);
    EXPECT_EQ(tall.width(), 192); // 300 * 0.64
}

TEST(Resize, UniformStaysUniformAndDeterministic) {
    const RasterImage img(333, 211, Rgb{9, 120, 250});
    const RasterImage a = resize_bilinear(img, 100, 71);
    EXPECT_EQ(a, RasterImage(100, 71, Rgb{9, 120, 250}));
    std::mt19937_64 rng(4);
    const RasterImage noisy = oracle::random_image(rng, 50, 40);
    EXPECT_EQ(resize_bilinear(noisy, 23, 31), resize_bilinear(noisy, 23, 31));
}

TEST(Resize, IdentitySizeIsExact) {
    std::mt19937_64 rng(5);
    const RasterImage img = oracle::random_image(rng, 13, 7);
    EXPECT_EQ(resize_bilinear(img, 13, 7), img);
}

TEST(Resize, NearestMaskUpscaleByTwo) {
    BinaryMask m(2, 2, false);
    m.set(1, 0, true);
    const BinaryMask r = resize_nearest(m, 4, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) EXPECT_EQ(r.at(x, y), x >= 2 && y < 2) << x << "," << y;
}

TEST(ImageIo, PngRoundTripIsLossless) {
    const auto dir = oracle::fresh_dir("image_io");
    std::mt19937_64 rng(6);
    const RasterImage img = oracle::random_image(rng, 31, 17);
    write_image(img, dir / "a.png");
    EXPECT_EQ(read_image(dir / "a.png"), img);

    BinaryMask mask(31, 17, false);
    mask.set(3, 3, true);
    write_rgba_png(img, mask, dir / "b.png");
    const auto [px, m] = read_rgba_png(dir / "b.png");
    EXPECT_EQ(px, img);
    EXPECT_EQ(m, mask);
    std::filesystem::remove_all(dir);
}

TEST(ImageIo, JpegReadsBackSameSize) {
    const auto dir = oracle::fresh_dir("image_io_jpg");
    write_image(RasterImage(40, 20, Rgb{100, 150, 200}), dir / "a.jpg");
    const RasterImage back = read_image(dir / "a.jpg");
    EXPECT_EQ(back.width(), 40);
    EXPECT_EQ(back.height(), 20);
    EXPECT_NEAR(back.at(10, 10).g, 150, 3);
    std::filesystem::remove_all(dir);
}

TEST(ImageIo, MissingFileIsIoFailure) {
    try {
        read_image("/nonexistent/definitely.png");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IoFailure);
    }
}
