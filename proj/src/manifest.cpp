#include "pxplab/manifest.hpp"

#include "pxplab/version.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace pxplab {

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kVersion;
    j["command"] = command;
    j["status"] = status;
    if (!error.empty()) j["error"] = error;
    j["wall_time_seconds"] = wall_time_seconds;
    j["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config) j["config"][k] = v;
    j["tasks"] = {{"total", tasks.n_tasks}, {"ok", tasks.n_ok}, {"failed", tasks.n_failed()}};
    j["tasks"]["by_failure"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : tasks.failures) j["tasks"]["by_failure"][k] = v;
    j["outputs"] = outputs;
    j["results"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : results) j["results"][k] = v;
    j["units"] = {
        {"time", "1 / (2 J S^2)"},
        {"energy", "2 J S^3"},
        {"spin", "unit vectors, |S_i| = 1"},
        {"epsilon", "1 / sqrt(S)"},
    };
    j["conventions"] = {
        {"growth_ratio", "mean |delta S|^2(t) / mean |delta S|^2(0)"},
        {"collapse_variable", "x = epsilon * t / T"},
        {"fit", "least squares of ln(ratio) vs x; Phi_0 = exp(intercept), kappa = slope"},
    };
    return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& dir) const {
    const std::string path = dir + "/manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_json();
}

}  // namespace pxplab
