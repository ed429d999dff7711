// Command-line entry point. Every subcommand takes --config, --set key=value
// overrides, --seed and --workers; see `autobox <command> --help`.
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "autobox/commands.hpp"
#include "autobox/config.hpp"
#include "autobox/error.hpp"

namespace fs = std::filesystem;
using namespace autobox;

namespace {

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    int workers = 0;
    bool quiet = false;
};

void add_common(CLI::App* app, CommonOptions& o) {
    app->add_option("--config", o.config_path, "key = value configuration file");
    app->add_option("--set", o.overrides, "override one key (key=value), repeatable")->take_all();
    app->add_option("--seed", o.seed, "base random seed");
    app->add_option("--workers", o.workers, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    app->add_flag("-q,--quiet", o.quiet, "suppress per-image log lines");
}

CommandContext make_context(const CommonOptions& o) {
    CommandContext ctx;
    ctx.config = o.config_path.empty() ? parse_config("", o.overrides) : load_config(o.config_path, o.overrides);
    if (o.seed) ctx.config.seed = *o.seed;
    ctx.workers = o.workers;
    ctx.log = o.quiet ? nullptr : &std::cerr;
    return ctx;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"autobox: automatic box annotation and occlusion augmentation"};
    app.require_subcommand(1);

    CommonOptions common;
    std::string manifest, db, out, predictions, ground_truth;

    auto* synth = app.add_subcommand("synth", "generate a seeded synthetic shelf corpus");
    add_common(synth, common);
    synth->add_option("--out", out, "output directory")->required();

    auto* extract = app.add_subcommand("extract", "annotate images listed in a manifest");
    add_common(extract, common);
    extract->add_option("manifest", manifest, "input manifest (<image>\\t<N>)")->required();
    extract->add_option("--out", out, "output directory")->required();

    auto* harvest = app.add_subcommand("harvest", "collect masked object patches into a patch database");
    add_common(harvest, common);
    harvest->add_option("manifest", manifest, "annotated manifest")->required();
    harvest->add_option("--db", db, "patch database directory")->required();

    auto* augment = app.add_subcommand("augment", "write occluded variants of annotated images");
    add_common(augment, common);
    augment->add_option("manifest", manifest, "annotated manifest")->required();
    augment->add_option("--db", db, "patch database directory")->required();
    augment->add_option("--out", out, "output directory")->required();

    auto* evaluate = app.add_subcommand("evaluate", "score predictions against ground truth");
    add_common(evaluate, common);
    evaluate->add_option("predictions", predictions, "predictions (JSON lines)")->required();
    evaluate->add_option("--gt", ground_truth, "ground-truth manifest")->required();
    evaluate->add_option("--out", out, "report directory")->required();

    auto* pipeline = app.add_subcommand("pipeline", "synth, extract, harvest, augment and evaluate end to end");
    add_common(pipeline, common);
    pipeline->add_option("--out", out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    CommandContext ctx;
    try {
        ctx = make_context(common);
    } catch (const Error& e) {
        std::cerr << "autobox: " << e.what() << '\n';
        return kExitConfig;
    }

    if (synth->parsed()) return cmd_synth(ctx, out);
    if (extract->parsed()) return cmd_extract(ctx, manifest, out);
    if (harvest->parsed()) return cmd_harvest(ctx, manifest, db);
    if (augment->parsed()) return cmd_augment(ctx, manifest, db, out);
    if (evaluate->parsed()) return cmd_evaluate(ctx, predictions, ground_truth, out);
    return cmd_pipeline(ctx, out);
}
