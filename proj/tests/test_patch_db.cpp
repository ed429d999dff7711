#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "autobox/error.hpp"
#include "autobox/image_io.hpp"
#include "autobox/patch_db.hpp"
#include "oracles.hpp"

using namespace autobox;
namespace fs = std::filesystem;

namespace {

Patch random_patch(std::mt19937_64& rng, const std::string& label) {
    const int w = std::uniform_int_distribution<int>(1, 30)(rng);
    const int h = std::uniform_int_distribution<int>(1, 30)(rng);
    BinaryMask m(w, h, false);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) m.set(x, y, std::uniform_int_distribution<int>(0, 1)(rng) == 1);
    m.set(0, 0, true);
    return {oracle::random_image(rng, w, h), m, label, "src_" + label + ".png"};
}

} // namespace

TEST(PatchDb, AddReloadIdentity) {
    const fs::path root = oracle::fresh_dir("patchdb");
    std::mt19937_64 rng(1);
    std::vector<std::pair<std::string, Patch>> added;
    {
        PatchDb db(root / "db");
        for (int i = 0; i < 15; ++i) {
            Patch p = random_patch(rng, i % 2 ? "cola" : "milk");
            const std::string id = "p" + std::to_string(i);
            ASSERT_TRUE(db.add(id, p));
            added.emplace_back(id, std::move(p));
        }
        EXPECT_EQ(db.size(), 15u);
    }
    const PatchDb db(root / "db");
    ASSERT_EQ(db.size(), added.size());
    for (std::size_t i = 0; i < added.size(); ++i) {
        EXPECT_EQ(db.records()[i].patch_id, added[i].first);
        EXPECT_EQ(db.records()[i].category, added[i].second.source_label);
        EXPECT_EQ(db.records()[i].width, added[i].second.pixels.width());
        EXPECT_EQ(db.get(i), added[i].second);
        EXPECT_EQ(db.load(added[i].first), added[i].second);
        EXPECT_TRUE(fs::exists(root / "db" / "patches" / added[i].second.source_label / (added[i].first + ".png")));
    }
    fs::remove_all(root);
}

TEST(PatchDb, DuplicateIdIsRefusedWithoutWriting) {
    const fs::path root = oracle::fresh_dir("patchdb_dup");
    std::mt19937_64 rng(2);
    PatchDb db(root);
    const Patch a = random_patch(rng, "x"), b = random_patch(rng, "x");
    ASSERT_TRUE(db.add("same", a));
    EXPECT_FALSE(db.add("same", b));
    EXPECT_EQ(db.size(), 1u);
    EXPECT_EQ(PatchDb(root).load("same"), a);
    fs::remove_all(root);
}

TEST(PatchDb, AlphaEncodesMask) {
    const fs::path root = oracle::fresh_dir("patchdb_alpha");
    PatchDb db(root);
    BinaryMask m(2, 1, false);
    m.set(1, 0, true);
    ASSERT_TRUE(db.add("one", {RasterImage(2, 1, Rgb{10, 20, 30}), m, "lbl", "s.png"}));
    const auto [px, mask] = read_rgba_png(db.patch_path(db.records()[0]));
    EXPECT_FALSE(mask.at(0, 0));
    EXPECT_TRUE(mask.at(1, 0));
    EXPECT_EQ(px.at(1, 0), (Rgb{10, 20, 30}));
    fs::remove_all(root);
}

TEST(PatchDb, InvalidPatchAndCorruptIndex) {
    const fs::path root = oracle::fresh_dir("patchdb_bad");
    {
        PatchDb db(root);
        EXPECT_THROW(db.add("empty", {RasterImage(2, 2), BinaryMask(2, 2, false), "l", "s"}), Error);
        EXPECT_THROW(db.add("mismatch", {RasterImage(2, 2), BinaryMask(3, 2, true), "l", "s"}), Error);
        EXPECT_EQ(db.size(), 0u);
    }
    std::ofstream(root / "index.jsonl", std::ios::app) << "{not json\n";
    try {
        PatchDb reopened(root);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
    }
    fs::remove_all(root);
}
