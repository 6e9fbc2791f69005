#pragma once

#include <functional>
#include <string>
#include <vector>

#include "eitfwm/config.hpp"
#include "eitfwm/io.hpp"

namespace eitfwm {

struct RunOptions {
    std::string out_dir = "out";
    bool dump = false;  // full space-time CSVs
    std::function<void(const std::string&)> log;  // progress lines, may be empty
};

struct RunOutcome {
    json summary;
    std::vector<std::string> files;
    std::vector<std::string> warnings;
};

// Runs one experiment end to end and writes its artifacts (CSV, summary.json, manifest.json).
RunOutcome run_experiment(const ExperimentSpec& spec, const RunOptions& opt);

// Echo of every resolved parameter, used in the manifest and summary.
json spec_to_json(const ExperimentSpec& spec);
json derived_to_json(const MediumParams& m);

// Spin-wave profile S(z_k, t) predicted by convolving the inputs with kernel sets built at each z_k.
cvec spinwave_profile_kernels(const MediumParams& m, const BoundaryInputs& in, const std::vector<double>& z, double t,
                              KernelMethod method, const TimeGrid& kernel_grid);

}  // namespace eitfwm
