// Run manifest: a JSON record emitted for every CLI run, success or failure.
// Lists the resolved configuration, tool version, wall time, per-task status,
// every output file, the unit conventions, and headline results.
#pragma once

#include <map>
#include <string>
#include <vector>

namespace pxplab {

struct TaskStats {
    long long n_tasks = 0;
    long long n_ok = 0;
    std::map<std::string, long long> failures;  // status label -> count

    long long n_failed() const {
        long long f = 0;
        for (const auto& [_, c] : failures) f += c;
        return f;
    }
};

struct RunManifest {
    std::string command;
    std::string status = "incomplete";  // success | partial_failure | error
    std::string error;                  // set when status == error
    double wall_time_seconds = 0.0;
    std::map<std::string, std::string> config;   // resolved config echo
    std::vector<std::string> outputs;            // artifact files, manifest excluded
    TaskStats tasks;
    std::map<std::string, std::string> results;  // headline numbers as strings

    // Serializes with stable key ordering and writes <dir>/manifest.json.
    std::string to_json() const;
    void write(const std::string& dir) const;
};

}  // namespace pxplab
