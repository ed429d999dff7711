#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "autobox/image_ops.hpp"
#include "autobox/selective_search.hpp"
#include "autobox/synth.hpp"
#include "oracles.hpp"

using namespace autobox;

namespace {

double best_iou(const ProposalSet& rp, const Box& target) {
    double best = 0.0;
    for (const auto& b : rp) best = std::max(best, iou(b, target));
    return best;
}

template <typename H>
double total(const H& h) {
    return std::accumulate(h.begin(), h.end(), 0.0);
}

} // namespace

TEST(Similarity, HandComputedComponents) {
    Segment a, b;
    a.pixel_count = 10;
    b.pixel_count = 30;
    a.bbox = {0, 0, 5, 2};
    b.bbox = {5, 0, 10, 3};
    a.color[0] = 1.0;
    b.color[0] = 0.5;
    b.color[1] = 0.5;
    a.texture[0] = 1.0;
    b.texture[1] = 1.0;
    // color min(1, .5) = .5; texture 0; size 1 - 40/100 = .6;
    // fill: union box 15x3 = 45 -> 1 - (45 - 40)/100 = .95.
    EXPECT_NEAR(similarity(a, b, 100), 0.5 + 0.0 + 0.6 + 0.95, 1e-12);
    EXPECT_NEAR(similarity(a, b, 100, {true, false, false, false}), 0.5, 1e-12);
    EXPECT_NEAR(similarity(a, b, 100, {false, false, true, false}), 0.6, 1e-12);
    EXPECT_NEAR(similarity(a, b, 100, {false, false, false, true}), 0.95, 1e-12);
    EXPECT_NEAR(similarity(a, b, 100, {false, true, false, false}), 0.0, 1e-12);
}

TEST(Similarity, SelfAndWholeImage) {
    Segment a;
    a.pixel_count = 50;
    a.bbox = {0, 0, 10, 10};
    a.color[3] = 1.0;
    a.texture[7] = 1.0;
    EXPECT_NEAR(similarity(a, a, 1000, {true, false, false, false}), 1.0, 1e-12);
    EXPECT_NEAR(similarity(a, a, 1000, {false, true, false, false}), 1.0, 1e-12);
    Segment b = a;
    b.pixel_count = 50;
    EXPECT_NEAR(similarity(a, b, 100, {false, false, true, false}), 0.0, 1e-12);
}

TEST(MergeSegments, SizeWeightedHistograms) {
    std::mt19937_64 rng(3);
    Segment a, b;
    a.pixel_count = 7;
    b.pixel_count = 13;
    a.bbox = {0, 0, 3, 3};
    b.bbox = {2, 5, 4, 4};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto* h : {&a.color, &b.color})
        for (auto& v : *h) v = u(rng);
    for (auto* h : {&a.texture, &b.texture})
        for (auto& v : *h) v = u(rng);
    const Segment m = merge_segments(a, b, 99);
    EXPECT_EQ(m.id, 99);
    EXPECT_EQ(m.pixel_count, 20);
    EXPECT_EQ(m.bbox, (Box{0, 0, 6, 9}));
    for (std::size_t i = 0; i < m.color.size(); ++i) EXPECT_NEAR(m.color[i], (7 * a.color[i] + 13 * b.color[i]) / 20, 1e-12);
    for (std::size_t i = 0; i < m.texture.size(); ++i)
        EXPECT_NEAR(m.texture[i], (7 * a.texture[i] + 13 * b.texture[i]) / 20, 1e-12);
}

TEST(DescribeSegments, InvariantsHold) {
    std::mt19937_64 rng(4);
    const RasterImage img = oracle::random_image(rng, 40, 30);
    const Segmentation seg = oversegment(img, {200.0, 0.8, 20});
    const auto segs = describe_segments(img, seg);
    ASSERT_EQ(static_cast<int>(segs.size()), seg.count);
    long long sum = 0;
    for (const auto& s : segs) {
        EXPECT_GE(s.pixel_count, 1);
        EXPECT_NEAR(total(s.color), 1.0, 1e-6);
        EXPECT_NEAR(total(s.texture), 1.0, 1e-6);
        int x0 = 1 << 20, y0 = 1 << 20, x1 = -1, y1 = -1;
        for (int y = 0; y < 30; ++y)
            for (int x = 0; x < 40; ++x)
                if (seg.at(x, y) == s.id) {
                    x0 = std::min(x0, x);
                    y0 = std::min(y0, y);
                    x1 = std::max(x1, x);
                    y1 = std::max(y1, y);
                }
        EXPECT_EQ(s.bbox, (Box{x0, y0, x1 - x0 + 1, y1 - y0 + 1}));
        sum += s.pixel_count;
    }
    EXPECT_EQ(sum, 40 * 30);
}

TEST(Grouping, PerformsSMinusOneMerges) {
    std::mt19937_64 rng(5);
    const RasterImage img = oracle::random_image(rng, 48, 36);
    const Segmentation seg = oversegment(img, {100.0, 0.8, 10});
    const auto segs = describe_segments(img, seg);
    const Hierarchy h = group_segments(segs, segment_adjacency(seg), 48 * 36);
    EXPECT_EQ(h.initial_count, seg.count);
    EXPECT_EQ(static_cast<int>(h.merges.size()), seg.count - 1);
    EXPECT_EQ(static_cast<int>(h.regions.size()), 2 * seg.count - 1);
    EXPECT_EQ(h.regions.back().pixel_count, 48 * 36);
    EXPECT_EQ(h.regions.back().bbox, (Box{0, 0, 48, 36}));
    // Each merged region carries the size-weighted histogram of its children.
    for (std::size_t i = 0; i < h.merges.size(); ++i) {
        const auto& r = h.regions[h.initial_count + i];
        const auto& a = h.regions[h.merges[i].first];
        const auto& b = h.regions[h.merges[i].second];
        ASSERT_EQ(r.pixel_count, a.pixel_count + b.pixel_count);
        for (std::size_t k = 0; k < r.color.size(); ++k)
            ASSERT_NEAR(r.color[k],
                        (a.color[k] * a.pixel_count + b.color[k] * b.pixel_count) / r.pixel_count, 1e-6);
    }
}

TEST(Adjacency, SortedUniquePairs) {
    RasterImage img(30, 10, Rgb{255, 0, 0});
    fill_rect(img, {10, 0, 10, 10}, Rgb{0, 255, 0});
    fill_rect(img, {20, 0, 10, 10}, Rgb{0, 0, 255});
    const Segmentation seg = oversegment(img, {300.0, 0.0, 5});
    ASSERT_EQ(seg.count, 3);
    const auto adj = segment_adjacency(seg);
    EXPECT_EQ(adj, (std::vector<std::pair<int, int>>{{0, 1}, {1, 2}}));
}

TEST(Propose, UniformImageGivesFullFrame) {
    const ProposalSet rp = propose(RasterImage(50, 40, Rgb{3, 3, 3}));
    ASSERT_EQ(rp.size(), 1u);
    EXPECT_EQ(rp[0], (Box{0, 0, 50, 40}));
}

TEST(Propose, SeparatedRectanglesAreProposed) {
    RasterImage img(200, 150, Rgb{220, 220, 220});
    const std::vector<Box> rects{{10, 10, 40, 30}, {90, 20, 50, 60}, {30, 90, 70, 40}};
    const std::vector<Rgb> colors{{200, 30, 30}, {30, 160, 40}, {40, 40, 200}};
    for (std::size_t i = 0; i < rects.size(); ++i) fill_rect(img, rects[i], colors[i]);
    const ProposalSet rp = propose(img);
    for (const auto& r : rects) EXPECT_GE(best_iou(rp, r), 0.8) << r;
    for (const auto& b : rp) EXPECT_TRUE(b.fits(200, 150));
    EXPECT_EQ(std::set<Box>(rp.begin(), rp.end()).size(), rp.size());
}

TEST(Propose, AdjacentSameColourRectanglesUnionIsProposed) {
    RasterImage img(160, 120, Rgb{230, 230, 230});
    fill_rect(img, {20, 30, 40, 50}, Rgb{180, 40, 40});
    fill_rect(img, {60, 30, 50, 50}, Rgb{180, 40, 40});
    EXPECT_GE(best_iou(propose(img), Box{20, 30, 90, 50}), 0.8);
}

TEST(Propose, CountBoundAndDeterminism) {
    SceneSpec spec;
    spec.n_objects = 3;
    spec.rng_seed = 12;
    spec.noise_amplitude = 6;
    const Scene s = generate_scene(spec);
    const Segmentation seg = oversegment(s.image);
    const ProposalSet rp = propose(s.image);
    EXPECT_LE(static_cast<int>(rp.size()), 2 * seg.count - 1);
    EXPECT_EQ(rp, propose(s.image));
}

TEST(Propose, JsonLinesRoundTrip) {
    const auto dir = oracle::fresh_dir("proposals");
    const ProposalSet rp{{0, 0, 5, 5}, {3, 4, 10, 2}};
    write_proposals_jsonl(rp, dir / "rp.jsonl");
    EXPECT_EQ(read_proposals_jsonl(dir / "rp.jsonl"), rp);
    std::filesystem::remove_all(dir);
}
