#include "hess2/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hess2/errors.hpp"

namespace hess2 {
namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ConfigError("config key '" + std::string(key) + "': not a number: " + std::string(v));
    return out;
}

int to_int(std::string_view key, std::string_view v) {
    int out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ConfigError("config key '" + std::string(key) + "': not an integer: " + std::string(v));
    return out;
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + std::string(key) + "': not a boolean: " + std::string(v));
}

}  // namespace

void RunConfig::validate() const {
    if (f.empty()) throw ConfigError("f must not be empty");
    if (n < 9 || n % 2 == 0) throw ConfigError("n must be odd and >= 9");
    if (!(bandwidth >= 1.0)) throw ConfigError("bandwidth must be >= 1");
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
    if (sample_n < 2) throw ConfigError("sample_n must be >= 2");
    iteration().validate();
}

IterationConfig RunConfig::iteration() const {
    IterationConfig c;
    c.eps_initial = eps_initial;
    c.eps_shrink = eps_shrink;
    c.max_eps_halvings = max_eps_halvings;
    c.max_outer = max_outer;
    c.stop_tol = stop_tol;
    c.threads = threads;
    return c;
}

void RunConfig::apply_text(std::string_view text) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view val = trim(line.substr(eq + 1));
        if (key == "f") f = std::string(val);
        else if (key == "mode") mode = parse_tau_mode(val);
        else if (key == "n") n = to_int(key, val);
        else if (key == "bandwidth") bandwidth = to_double(key, val);
        else if (key == "eps_initial") eps_initial = to_double(key, val);
        else if (key == "eps_shrink") eps_shrink = to_double(key, val);
        else if (key == "max_eps_halvings") max_eps_halvings = to_int(key, val);
        else if (key == "max_outer") max_outer = to_int(key, val);
        else if (key == "stop_tol") stop_tol = to_double(key, val);
        else if (key == "output_dir") output_dir = std::string(val);
        else if (key == "emit_fields") emit_fields = to_bool(key, val);
        else if (key == "threads") threads = to_int(key, val);
        else if (key == "sample_n") sample_n = to_int(key, val);
        else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
}

std::string RunConfig::to_text() const {
    std::ostringstream os;
    os << "f = " << f << '\n'
       << "mode = " << to_string(mode) << '\n'
       << "n = " << n << '\n'
       << "bandwidth = " << fmt(bandwidth) << '\n'
       << "eps_initial = " << fmt(eps_initial) << '\n'
       << "eps_shrink = " << fmt(eps_shrink) << '\n'
       << "max_eps_halvings = " << max_eps_halvings << '\n'
       << "max_outer = " << max_outer << '\n'
       << "stop_tol = " << fmt(stop_tol) << '\n'
       << "output_dir = " << output_dir << '\n'
       << "emit_fields = " << (emit_fields ? "true" : "false") << '\n'
       << "threads = " << threads << '\n'
       << "sample_n = " << sample_n << '\n';
    return os.str();
}

nlohmann::ordered_json RunConfig::to_json() const {
    nlohmann::ordered_json j;
    j["f"] = f;
    j["mode"] = std::string(to_string(mode));
    j["n"] = n;
    j["bandwidth"] = bandwidth;
    j["eps_initial"] = eps_initial;
    j["eps_shrink"] = eps_shrink;
    j["max_eps_halvings"] = max_eps_halvings;
    j["max_outer"] = max_outer;
    j["stop_tol"] = stop_tol;
    j["output_dir"] = output_dir;
    j["emit_fields"] = emit_fields;
    j["threads"] = threads;
    j["sample_n"] = sample_n;
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config JSON must be an object");
    RunConfig c;
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "f") c.f = v.get<std::string>();
            else if (key == "mode") c.mode = parse_tau_mode(v.get<std::string>());
            else if (key == "n") c.n = v.get<int>();
            else if (key == "bandwidth") c.bandwidth = v.get<double>();
            else if (key == "eps_initial") c.eps_initial = v.get<double>();
            else if (key == "eps_shrink") c.eps_shrink = v.get<double>();
            else if (key == "max_eps_halvings") c.max_eps_halvings = v.get<int>();
            else if (key == "max_outer") c.max_outer = v.get<int>();
            else if (key == "stop_tol") c.stop_tol = v.get<double>();
            else if (key == "output_dir") c.output_dir = v.get<std::string>();
            else if (key == "emit_fields") c.emit_fields = v.get<bool>();
            else if (key == "threads") c.threads = v.get<int>();
            else if (key == "sample_n") c.sample_n = v.get<int>();
            else throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config JSON: ") + e.what());
    }
    return c;
}

void RunConfig::apply_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(path + ": " + e.what());
        }
        *this = from_json(j.contains("config") ? j["config"] : j);
        return;
    }
    apply_text(text);
}

}  // namespace hess2
