#pragma once

#include <string>
#include <vector>

namespace eitfwm {

struct Preset {
    std::string name;
    std::string description;
    std::string ini;  // same format as a spec file
};

const std::vector<Preset>& presets();
// nullptr when unknown.
const Preset* find_preset(const std::string& name);

}  // namespace eitfwm
