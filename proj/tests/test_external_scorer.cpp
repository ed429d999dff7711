#include <filesystem>
#include <fstream>
#include <thread>

#include <gtest/gtest.h>

#include "autobox/annotation.hpp"
#include "autobox/error.hpp"
#include "autobox/external_scorer.hpp"
#include "oracles.hpp"

using namespace autobox;
namespace fs = std::filesystem;

namespace {

std::string protocol_error(std::string_view text, const std::vector<std::string>& ids) {
    try {
        parse_scorer_response(text, ids);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ScorerProtocolError);
        return e.what();
    }
    ADD_FAILURE() << "accepted: " << text;
    return {};
}

} // namespace

TEST(ScorerResponse, ParsesInRequestOrder) {
    const auto r = parse_scorer_response("c2\tmilk\t0.5\nc1\tcola\t1\n", {"c1", "c2"});
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0], (ClassScore{"cola", 1.0}));
    EXPECT_EQ(r[1], (ClassScore{"milk", 0.5}));
}

TEST(ScorerResponse, ErrorsNameTheCropId) {
    const std::vector<std::string> ids{"c1", "c2"};
    EXPECT_NE(protocol_error("c1\tcola\t0.9\n", ids).find("c2"), std::string::npos);
    EXPECT_NE(protocol_error("c1\tcola\t0.9\nc1\tcola\t0.9\nc2\tx\t0.1\n", ids).find("c1"), std::string::npos);
    EXPECT_NE(protocol_error("c1\tcola\t0.9\nc9\tx\t0.1\n", ids).find("c9"), std::string::npos);
    EXPECT_NE(protocol_error("c1\tcola\tabc\nc2\tx\t0.1\n", ids).find("c1"), std::string::npos);
    EXPECT_NE(protocol_error("c1\tcola\t1.5\nc2\tx\t0.1\n", ids).find("c1"), std::string::npos);
    EXPECT_NE(protocol_error("c1\tcola\nc2\tx\t0.1\n", ids).find("c1"), std::string::npos);
    EXPECT_NE(protocol_error("c1\t\t0.3\nc2\tx\t0.1\n", ids).find("c1"), std::string::npos);
}

TEST(FileExchangeScorer, RoundTripWithSimulatedExternalProcess) {
    const fs::path dir = oracle::fresh_dir("exchange");
    const FileExchangeScorer scorer(dir, std::chrono::seconds(20), std::chrono::milliseconds(5));
    std::jthread external([&] {
        const fs::path manifest = dir / "batch_0" / "manifest.txt";
        while (!fs::exists(manifest)) std::this_thread::sleep_for(std::chrono::milliseconds(5));
        std::ifstream in(manifest);
        std::string line, response;
        int k = 0;
        while (std::getline(in, line)) {
            const std::string id = line.substr(0, line.find('\t'));
            const std::string path = line.substr(line.find('\t') + 1);
            EXPECT_TRUE(fs::exists(path)) << path;
            response += id + "\tlabel" + std::to_string(k++) + "\t0.75\n";
        }
        write_file_atomic(dir / "batch_0" / "response.txt", response);
    });
    const std::vector<RasterImage> crops{RasterImage(5, 5), RasterImage(7, 3, Rgb{1, 2, 3})};
    const auto scores = scorer.score(crops);
    ASSERT_EQ(scores.size(), 2u);
    EXPECT_EQ(scores[0], (ClassScore{"label0", 0.75}));
    EXPECT_EQ(scores[1], (ClassScore{"label1", 0.75}));
    external.join();
    fs::remove_all(dir);
}

TEST(FileExchangeScorer, TimeoutIsProtocolError) {
    const fs::path dir = oracle::fresh_dir("exchange_timeout");
    const FileExchangeScorer scorer(dir, std::chrono::milliseconds(60), std::chrono::milliseconds(5));
    const std::vector<RasterImage> crops{RasterImage(5, 5)};
    try {
        scorer.score(crops);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ScorerProtocolError);
        EXPECT_NE(std::string(e.what()).find("b0_c0"), std::string::npos);
    }
    EXPECT_TRUE(fs::exists(dir / "batch_0" / "crops" / "b0_c0.png"));
    fs::remove_all(dir);
}
