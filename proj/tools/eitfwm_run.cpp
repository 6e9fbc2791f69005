// Experiment runner: eitfwm-run --preset fig4 --out out/fig4
#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <mutex>

#include "eitfwm/config.hpp"
#include "eitfwm/experiment.hpp"
#include "eitfwm/presets.hpp"

using namespace eitfwm;

namespace {

int fail(int code, const std::string& kind, const std::string& msg) {
    json e = {{"error", kind}, {"message", msg}, {"exit_code", code}};
    std::cerr << e.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"double-lambda EIT+FWM light propagation and storage simulator"};
    std::string spec_path, preset, out_dir;
    bool dump = false, quiet = false, list = false;
    auto* o_spec = app.add_option("--spec", spec_path, "experiment spec file (INI)");
    auto* o_preset = app.add_option("--preset", preset, "built-in preset name");
    o_spec->excludes(o_preset);
    app.add_option("--out", out_dir, "output directory (default: out/<name>)");
    app.add_flag("--dump", dump, "also write full space-time fields");
    app.add_flag("--quiet", quiet, "no progress output");
    app.add_flag("--list-presets", list, "list presets and exit");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail(2, "usage", e.what());
    }

    if (list) {
        for (const auto& p : presets()) std::cout << p.name << "  " << p.description << '\n';
        return 0;
    }
    if (spec_path.empty() && preset.empty()) return fail(2, "usage", "one of --spec or --preset is required");

    std::mutex io_mutex;
    try {
        ExperimentSpec spec;
        if (!preset.empty()) {
            const Preset* p = find_preset(preset);
            if (!p) return fail(2, "validation", "unknown preset '" + preset + "' (see --list-presets)");
            spec = parse_spec(p->ini, "preset:" + p->name);
            spec.name = p->name;
        } else {
            spec = load_spec_file(spec_path);
        }
        RunOptions ro;
        ro.out_dir = out_dir.empty() ? (std::filesystem::path("out") / spec.name).string() : out_dir;
        ro.dump = dump;
        const auto t0 = std::chrono::steady_clock::now();
        if (!quiet)
            ro.log = [&](const std::string& s) {
                std::lock_guard lk(io_mutex);
                const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                std::cout << "[" << std::fixed << std::setprecision(1) << el << "s] " << s << std::endl;
            };
        const RunOutcome r = run_experiment(spec, ro);
        if (!quiet) {
            std::lock_guard lk(io_mutex);
            for (const auto& w : r.warnings) std::cout << "warning: " << w << '\n';
            std::cout << "wrote " << r.files.size() << " files to " << ro.out_dir << '\n';
        }
    } catch (const ValidationError& e) {
        return fail(2, "validation", e.what());
    } catch (const SolverError& e) {
        return fail(3, "solver", e.what());
    } catch (const std::exception& e) {
        return fail(3, "solver", e.what());
    }
    return 0;
}
