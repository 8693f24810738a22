#pragma once

#include <string>
#include <string_view>

#include "hess2/cone_select.hpp"
#include "hess2/iteration.hpp"
#include "json.hpp"

namespace hess2 {

// Fully resolved settings of a solve run.
struct RunConfig {
    std::string f = "0";
    TauMode mode = TauMode::Auto;
    int n = 33;
    double bandwidth = 1.5;
    double eps_initial = 0.1;
    double eps_shrink = 0.5;
    int max_eps_halvings = 20;
    int max_outer = 30;
    double stop_tol = 1e-11;
    std::string output_dir = "out";
    bool emit_fields = false;
    int threads = 1;
    int sample_n = 21;

    // Throws ConfigError naming the first bad field.
    void validate() const;

    IterationConfig iteration() const;

    // Flat `key = value` text; '#' starts a comment. Keys not present keep
    // their current value, unknown keys throw ConfigError.
    void apply_text(std::string_view text);
    std::string to_text() const;

    nlohmann::ordered_json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);

    // Loads `path`: JSON (a report.json with a "config" object, or the object
    // itself) when it starts with '{', key=value text otherwise.
    void apply_file(const std::string& path);
};

}  // namespace hess2
