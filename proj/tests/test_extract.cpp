#include <functional>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "autobox/error.hpp"
#include "autobox/extract.hpp"
#include "autobox/synth.hpp"
#include "oracles.hpp"

using namespace autobox;

namespace {

ProposalSet random_set(std::mt19937_64& rng, int count, int extent = 200) {
    ProposalSet rp;
    std::uniform_int_distribution<int> pos(0, extent), side(1, extent / 3);
    for (int i = 0; i < count; ++i) rp.push_back({pos(rng), pos(rng), side(rng), side(rng)});
    return rp;
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::InvariantViolation;
}

} // namespace

TEST(FilterProposals, Examples) {
    EXPECT_TRUE(filter_proposals({{0, 0, 10, 10}}, 500, 4.0).empty());
    EXPECT_TRUE(filter_proposals({{0, 0, 100, 10}}, 500, 4.0).empty());
    EXPECT_TRUE(filter_proposals({{0, 0, 10, 100}}, 500, 4.0).empty());
    EXPECT_EQ(filter_proposals({{0, 0, 40, 30}}, 500, 4.0).size(), 1u);
    // Boundaries are inclusive: area == A_th and ratio == D_th survive.
    EXPECT_EQ(filter_proposals({{0, 0, 25, 20}, {0, 0, 80, 20}}, 500, 4.0).size(), 2u);
}

TEST(FilterProposals, OutputIsOrderedSubsetSatisfyingPredicate) {
    std::mt19937_64 rng(1);
    const ProposalSet rp = random_set(rng, 300);
    const ProposalSet out = filter_proposals(rp, 400, 3.0);
    std::size_t j = 0;
    for (const auto& b : rp) {
        const bool keep = b.area() >= 400 && b.width <= 3.0 * b.height && b.height <= 3.0 * b.width;
        if (keep) {
            ASSERT_LT(j, out.size());
            EXPECT_EQ(out[j++], b);
        }
    }
    EXPECT_EQ(j, out.size());
}

TEST(FilterOversized, DropsNearWholeFrameBoxes) {
    const ProposalSet rp{{0, 0, 100, 100}, {0, 0, 94, 94}, {0, 0, 95, 95}};
    // 0.9 * 10000 = 9000: 8836 kept, 9025 and 10000 dropped.
    EXPECT_EQ(filter_oversized(rp, 10000, 0.9), (ProposalSet{{0, 0, 94, 94}}));
}

TEST(MergePass, HandTraceUnion) {
    const Box a{0, 0, 10, 10}, b{5, 0, 10, 10}, c{30, 0, 4, 4};
    // Oracle by pixel counting: a and b overlap with 1/3 > 0.2, c is disjoint.
    ASSERT_NEAR(oracle::raster_iou(a, b), 1.0 / 3.0, 1e-12);
    ASSERT_EQ(oracle::raster_iou(a, c), 0.0);
    const Box ab = oracle::raster_union(a, b);
    ASSERT_EQ(ab, (Box{0, 0, 15, 10}));
    EXPECT_EQ(merge_pass({a, b, c}, 0.2, MergeMode::Union), (ProposalSet{ab, c}));
    EXPECT_EQ(merge_pass({c, b, a}, 0.2, MergeMode::Union), (ProposalSet{ab, c}));
}

TEST(MergePass, HandTraceRepresentative) {
    const Box a{0, 0, 10, 10}, b{5, 0, 10, 10}, c{30, 0, 4, 4};
    // Equal areas: the lexicographically smaller box is visited first and kept.
    EXPECT_EQ(merge_pass({b, c, a}, 0.2, MergeMode::Representative), (ProposalSet{a, c}));
}

TEST(MergePass, TrivialCases) {
    const Box b{1, 2, 3, 4};
    for (double t : {0.0, 0.5, 0.95}) EXPECT_EQ(merge_pass({b}, t, MergeMode::Union), (ProposalSet{b}));
    const ProposalSet disjoint{{0, 0, 10, 10}, {50, 50, 10, 10}};
    EXPECT_EQ(merge_pass(disjoint, 0.1, MergeMode::Union), disjoint);
}

TEST(MergePass, StrictThresholdComparison) {
    // iou exactly 1/3 does not exceed a threshold of 1/3.
    const ProposalSet rp{{0, 0, 10, 10}, {5, 0, 10, 10}};
    EXPECT_EQ(merge_pass(rp, 1.0 / 3.0, MergeMode::Union).size(), 2u);
}

TEST(MergePass, UnionModeContainsEveryInput) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 200; ++t) {
        const ProposalSet rp = random_set(rng, std::uniform_int_distribution<int>(1, 60)(rng));
        const double thr = std::uniform_real_distribution<double>(0.0, 0.9)(rng);
        const ProposalSet out = merge_pass(rp, thr, MergeMode::Union);
        ASSERT_LE(out.size(), rp.size());
        ASSERT_FALSE(out.empty());
        for (const auto& b : rp) {
            bool held = false;
            for (const auto& o : out) held = held || contains(o, b);
            ASSERT_TRUE(held) << b;
        }
        EXPECT_EQ(std::set<Box>(out.begin(), out.end()).size(), out.size());
        EXPECT_LE(merge_pass(out, thr, MergeMode::Union).size(), out.size());
    }
}

TEST(MergePass, RepresentativeModeKeepsSubset) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        const ProposalSet rp = random_set(rng, std::uniform_int_distribution<int>(1, 60)(rng));
        const double thr = std::uniform_real_distribution<double>(0.0, 0.9)(rng);
        const ProposalSet out = merge_pass(rp, thr, MergeMode::Representative);
        const std::set<Box> kept(out.begin(), out.end());
        const std::set<Box> input(rp.begin(), rp.end());
        for (const auto& k : kept) ASSERT_TRUE(input.contains(k));
        for (const auto& b : rp) {
            if (kept.contains(b)) continue;
            bool covered = false;
            for (const auto& k : kept) covered = covered || iou(b, k) > thr;
            ASSERT_TRUE(covered) << b;
        }
    }
}

TEST(ThresholdStep, Examples) {
    EXPECT_DOUBLE_EQ(threshold_step(300, 1), 2.99);
    EXPECT_DOUBLE_EQ(threshold_step(5, 3), 0.02);
    EXPECT_EQ(threshold_step(7, 7), 0.0);
    EXPECT_DOUBLE_EQ(threshold_step(2, 3), -0.01);
}

TEST(ThresholdStep, SignProperty) {
    for (int c = 1; c <= 60; ++c) {
        for (int n = 1; n <= 12; ++n) {
            const double s = threshold_step(c, n);
            EXPECT_EQ(s > 0, c > n);
            EXPECT_EQ(s == 0, c == n);
            EXPECT_EQ(s < 0, c < n);
        }
    }
}

TEST(ExtractFromProposals, AlreadyNIsReturnedUnchanged) {
    const ProposalSet rp{{0, 0, 40, 40}, {100, 100, 30, 30}};
    const ExtractResult r = extract_from_proposals(rp, 640, 480, 2);
    EXPECT_EQ(r.boxes, rp);
    EXPECT_EQ(r.iterations_used, 0);
    EXPECT_DOUBLE_EQ(r.final_iou_threshold, 0.1);
}

TEST(ExtractFromProposals, UndershootRollsBackAndRaisesThreshold) {
    // Pair one overlaps with iou 1/3, pair two with iou 1/9; N = 3.
    // Pass 1 at 0.10 fuses both pairs (2 boxes): rolled back, I_th -> 0.11.
    // Pass 2 at 0.11 still fuses both (1/9 > 0.11): rolled back, I_th -> 0.12.
    // Pass 3 at 0.12 fuses pair one only: 3 boxes.
    const Box a{0, 0, 100, 100}, b{50, 0, 100, 100}, c{300, 0, 100, 100}, d{380, 0, 100, 100};
    ASSERT_NEAR(oracle::raster_iou(c, d), 1.0 / 9.0, 1e-12);
    const ExtractResult r = extract_from_proposals({a, b, c, d}, 640, 480, 3);
    EXPECT_EQ(r.iterations_used, 3);
    EXPECT_NEAR(r.final_iou_threshold, 0.12, 1e-12);
    EXPECT_EQ(std::set<Box>(r.boxes.begin(), r.boxes.end()), (std::set<Box>{union_box(a, b), c, d}));
}

TEST(ExtractFromProposals, OvershootLowersThreshold) {
    // Two clusters with in-cluster iou 0.05 < initial 0.1; N = 2 needs I_th below 0.05.
    const Box a{0, 0, 100, 100}, b{90, 0, 100, 100}, c{300, 0, 100, 100}, d{390, 0, 100, 100};
    ExtractConfig cfg;
    const ExtractResult r = extract_from_proposals({a, b, c, d}, 640, 480, 2, cfg);
    EXPECT_EQ(std::set<Box>(r.boxes.begin(), r.boxes.end()), (std::set<Box>{union_box(a, b), union_box(c, d)}));
    EXPECT_LT(r.final_iou_threshold, oracle::raster_iou(a, b));
}

TEST(ExtractFromProposals, Errors) {
    EXPECT_EQ(code_of([] { extract_from_proposals({{0, 0, 5, 5}}, 640, 480, 1); }),
              ErrorCode::InsufficientProposals);
    EXPECT_EQ(code_of([] { extract_from_proposals({{0, 0, 50, 50}, {200, 200, 50, 50}}, 640, 480, 1); }),
              ErrorCode::NonConvergence);
    ExtractConfig bad;
    bad.initial_iou_threshold = 0.96;
    EXPECT_EQ(code_of([&] { extract_from_proposals({{0, 0, 50, 50}}, 640, 480, 1, bad); }),
              ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { extract_from_proposals({{0, 0, 50, 50}}, 640, 480, 0); }), ErrorCode::InvalidArgument);
}

TEST(ExtractFromProposals, FuzzExactCountOrError) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 300; ++t) {
        const int n = std::uniform_int_distribution<int>(1, 5)(rng);
        const ProposalSet rp = random_set(rng, std::uniform_int_distribution<int>(0, 120)(rng), 400);
        ExtractConfig cfg;
        cfg.max_iterations = std::uniform_int_distribution<int>(1, 50)(rng);
        cfg.merge_mode = t % 2 ? MergeMode::Union : MergeMode::Representative;
        try {
            const ExtractResult r = extract_from_proposals(rp, 640, 480, n, cfg);
            EXPECT_EQ(static_cast<int>(r.boxes.size()), n);
            EXPECT_LE(r.iterations_used, cfg.max_iterations);
            EXPECT_EQ(std::set<Box>(r.boxes.begin(), r.boxes.end()).size(), r.boxes.size());
            EXPECT_EQ(extract_from_proposals(rp, 640, 480, n, cfg).boxes, r.boxes);
        } catch (const Error& e) {
            EXPECT_TRUE(e.code() == ErrorCode::NonConvergence || e.code() == ErrorCode::InsufficientProposals);
        }
    }
}

TEST(Extract, SingleObjectScene) {
    SceneSpec spec;
    spec.n_objects = 1;
    spec.rng_seed = 31;
    const Scene s = generate_scene(spec);
    const ExtractResult r = extract(s.image, 1);
    ASSERT_EQ(r.boxes.size(), 1u);
    EXPECT_GE(iou(r.boxes[0], s.annotation.objects[0].box), 0.85);
}

TEST(Extract, ThreeObjectSceneMatchesOneToOne) {
    SceneSpec spec;
    spec.n_objects = 3;
    spec.rng_seed = 32;
    const Scene s = generate_scene(spec);
    const ExtractResult r = extract(s.image, 3);
    ASSERT_EQ(r.boxes.size(), 3u);
    std::set<std::size_t> used;
    for (const auto& o : s.annotation.objects) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < r.boxes.size(); ++k)
            if (iou(r.boxes[k], o.box) > iou(r.boxes[best], o.box)) best = k;
        EXPECT_GE(iou(r.boxes[best], o.box), 0.85);
        EXPECT_TRUE(used.insert(best).second);
    }
    EXPECT_EQ(extract(s.image, 3).boxes, r.boxes);
}

TEST(Extract, NoisyScenesReturnExactCountOrError) {
    for (int seed = 0; seed < 6; ++seed) {
        SceneSpec spec;
        spec.n_objects = 1 + seed % 5;
        spec.noise_amplitude = 12;
        spec.rng_seed = 500 + seed;
        const Scene s = generate_scene(spec);
        try {
            EXPECT_EQ(static_cast<int>(extract(s.image, spec.n_objects).boxes.size()), spec.n_objects);
        } catch (const Error& e) {
            EXPECT_TRUE(e.code() == ErrorCode::NonConvergence || e.code() == ErrorCode::InsufficientProposals);
        }
    }
}

TEST(MergeMode, ParseAndPrint) {
    EXPECT_EQ(parse_merge_mode("union"), MergeMode::Union);
    EXPECT_EQ(parse_merge_mode("representative"), MergeMode::Representative);
    EXPECT_EQ(to_string(MergeMode::Representative), "representative");
    EXPECT_THROW(parse_merge_mode("fuse"), Error);
}
