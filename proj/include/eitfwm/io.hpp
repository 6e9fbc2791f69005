#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eitfwm/mb_solver.hpp"
#include "eitfwm/pulses.hpp"

namespace eitfwm {

using json = nlohmann::ordered_json;

using Column = std::pair<std::string, cvec>;

// Writes artifacts into one directory and remembers every file for the manifest.
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }

    // t column followed by <name>_re, <name>_im, <name>_abs per column.
    void trace(const std::string& file, const TimeGrid& g, const std::vector<Column>& cols, const std::string& what);
    // Plain numeric table.
    void table(const std::string& file, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, const std::string& what);
    // z, t, then re/im per field; fields must share nz and times.
    void space_time(const std::string& file, const std::vector<std::pair<std::string, const SpaceTimeField*>>& fields,
                    const std::string& what);
    void json_file(const std::string& file, const json& j, const std::string& what);
    // manifest.json listing every file written so far plus the echoed parameters.
    void manifest(const json& params);

    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
    void add(const std::string& file, const std::string& what);
};

// Shortest round-trip decimal for doubles so reruns diff cleanly.
std::string fmt_num(double v);

json to_json(cplx c);

}  // namespace eitfwm
