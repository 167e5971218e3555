#include <CLI11.hpp>

#include <iostream>

#include "emlab/acceptance.hpp"
#include "emlab/errors.hpp"
#include "emlab/experiment.hpp"

namespace {

int do_run(const std::string& config_path, const std::string& out_dir,
           int threads, bool reference) {
    const emlab::ExperimentConfig cfg = emlab::load_config(config_path);
    emlab::RunOptions opt;
    opt.out_dir = out_dir;
    opt.threads = threads;
    opt.reference = reference;
    const emlab::RunRecord rec = emlab::run_experiment(cfg, opt);

    std::cout.precision(10);
    for (const auto& c : rec.criteria)
        std::cout << (c.passed ? "PASS" : "FAIL") << "  " << c.name
                  << "  value=" << c.value << "  (" << c.comparison << " "
                  << c.tolerance << ")\n";
    std::cout << "wall time " << rec.wall_time_seconds << "s, "
              << rec.artifacts.size() << " artifacts\n";
    if (!rec.passed()) {
        for (const auto& c : rec.criteria)
            if (!c.passed) std::cerr << "criterion failed: " << c.name << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for emergent learning dynamics"};
    app.require_subcommand(1);

    std::string config_path, out_dir, record_path, series_name, suite_name;
    std::string scratch = "runs/acceptance";
    int threads = 1;
    bool reference = false;

    auto* run = app.add_subcommand("run", "execute an experiment config");
    run->add_option("config", config_path, "experiment config JSON")
        ->required();
    run->add_option("--out", out_dir, "output directory (overrides config)");
    auto* topt = run->add_option("--threads", threads, "worker threads");
    run->add_flag("--reference", reference,
                  "single-threaded bit-reproducible mode")
        ->excludes(topt);

    auto* emit =
        app.add_subcommand("emit", "stream a series from a run record");
    emit->add_option("runrecord", record_path, "runrecord.json path")
        ->required();
    emit->add_option("--series", series_name, "series name")->required();

    auto* validate =
        app.add_subcommand("validate", "parse, check and echo a config");
    validate->add_option("config", config_path, "experiment config JSON")
        ->required();

    auto* suite = app.add_subcommand("suite", "run a predefined battery");
    suite->add_option("name", suite_name, "battery name (acceptance)")
        ->required();
    suite->add_option("--scratch", scratch, "artifact directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return do_run(config_path, out_dir, threads, reference);
        if (emit->parsed()) {
            emlab::emit_series(record_path, series_name, std::cout);
            return 0;
        }
        if (validate->parsed()) {
            std::cout << emlab::serialize_config(
                emlab::load_config(config_path));
            return 0;
        }
        if (suite->parsed()) {
            if (suite_name != "acceptance") {
                std::cerr << "unknown suite '" << suite_name
                          << "'; available: acceptance\n";
                return 2;
            }
            const auto results = emlab::run_acceptance(scratch);
            return emlab::print_acceptance(results, std::cout) == 0 ? 0 : 1;
        }
    } catch (const emlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
