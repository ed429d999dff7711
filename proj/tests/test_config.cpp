#include <filesystem>
#include <fstream>
#include <functional>
#include <set>

#include <gtest/gtest.h>

#include "autobox/config.hpp"
#include "autobox/error.hpp"
#include "oracles.hpp"

using namespace autobox;

namespace {

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

TEST(Config, DefaultsMatchDocumentedValues) {
    const PipelineConfig c = parse_config("");
    EXPECT_EQ(c.proposal.segmentation.scale, 300.0);
    EXPECT_EQ(c.extract.initial_iou_threshold, 0.1);
    EXPECT_EQ(c.extract.area_min, 500);
    EXPECT_EQ(c.extract.aspect_max, 4.0);
    EXPECT_EQ(c.extract.iou_threshold_max, 0.95);
    EXPECT_EQ(c.extract.max_iterations, 100);
    EXPECT_EQ(c.extract.merge_mode, MergeMode::Union);
    EXPECT_EQ(c.confirm.score_threshold, 0.8);
    EXPECT_EQ(c.confirm.temperature, 10.0);
    EXPECT_EQ(c.occlude.coverage_min, 0.2);
    EXPECT_EQ(c.occlude.coverage_max, 0.5);
    EXPECT_EQ(c.occlude.tolerance, 30);
    EXPECT_EQ(c.eval.iou_threshold, 0.5);
    EXPECT_FALSE(c.eval.score_suppress.has_value());
    EXPECT_EQ(c.occlude.modes.size(), 2u);
    EXPECT_EQ(c.occlude.directions.size(), 4u);
}

TEST(Config, ParsesCommentsListsAndOverrides) {
    const PipelineConfig c = parse_config(R"(
# tuning
propose.scale = 500   # larger segments
extract.merge_mode = representative
confirm.valid_labels = prod01, prod02
occlude.modes = black
occlude.directions = up,down
eval.score_suppress = 0.7
synth.background = 10, 20, 30
propose.similarity = color, fill
seed = 12345678901234
)",
                                          {"extract.area_min=800", "eval.score_suppress = off"});
    EXPECT_EQ(c.proposal.segmentation.scale, 500.0);
    EXPECT_EQ(c.extract.merge_mode, MergeMode::Representative);
    EXPECT_EQ(c.confirm.valid_labels, (std::vector<std::string>{"prod01", "prod02"}));
    EXPECT_EQ(c.occlude.modes, (std::vector<OcclusionMode>{OcclusionMode::Black}));
    EXPECT_EQ(c.occlude.directions, (std::vector<Direction>{Direction::Up, Direction::Down}));
    EXPECT_FALSE(c.eval.score_suppress.has_value());
    EXPECT_EQ(c.synth.scene.background, (Rgb{10, 20, 30}));
    EXPECT_TRUE(c.proposal.weights.color && c.proposal.weights.fill);
    EXPECT_FALSE(c.proposal.weights.texture || c.proposal.weights.size);
    EXPECT_EQ(c.extract.area_min, 800);
    EXPECT_EQ(c.seed, 12345678901234ULL);
}

TEST(Config, TypedKeysRejectGarbage) {
    const std::set<std::string> free_text{"confirm.exchange_dir", "confirm.model", "confirm.valid_labels"};
    const auto keys = PipelineConfig::keys();
    EXPECT_GE(keys.size(), 40u);
    for (const auto& k : keys) {
        PipelineConfig c;
        if (free_text.contains(k))
            EXPECT_NO_THROW(c.set(k, "@@")) << k;
        else
            EXPECT_THROW(c.set(k, "@@"), Error) << k;
    }
}

TEST(Config, Errors) {
    EXPECT_EQ(code_of([] { parse_config("no.such.key = 1"); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { parse_config("extract.area_min"); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { parse_config("extract.area_min = many"); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { parse_config("extract.initial_iou_threshold = 0.99"); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { parse_config("occlude.coverage_min = 0.6"); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { parse_config("confirm.scorer = external"); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { parse_config("confirm.scorer = magic"); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { parse_config("synth.background = 1,2"); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { parse_config("", {"seed"}); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { load_config("/nonexistent/autobox.conf"); }), ErrorCode::ConfigError);
}

TEST(Config, LoadFromFile) {
    const auto dir = oracle::fresh_dir("config");
    std::ofstream(dir / "a.conf") << "synth.count = 3\n";
    EXPECT_EQ(load_config(dir / "a.conf").synth.count, 3);
    EXPECT_EQ(load_config(dir / "a.conf", {"synth.count=5"}).synth.count, 5);
    std::filesystem::remove_all(dir);
}
