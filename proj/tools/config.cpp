#include "config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace jtel::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw std::invalid_argument("config: '" + key + "' is not a finite number: '" + text + "'");
    }
    return v;
}

const std::set<std::string> kRequired = {"c_plus", "c_minus", "lambda_plus", "lambda_minus", "h_plus",
                                         "h_minus", "r_plus", "r_minus", "s0", "sigma0"};
const std::set<std::string> kOptional = {"tail_epsilon", "max_terms"};

void dump(const nlohmann::ordered_json& v, std::string& out) {
    using nlohmann::ordered_json;
    switch (v.type()) {
        case ordered_json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += ordered_json(it.key()).dump();
                out += ':';
                dump(it.value(), out);
            }
            out += '}';
            break;
        }
        case ordered_json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out += ',';
                dump(v[i], out);
            }
            out += ']';
            break;
        }
        case ordered_json::value_t::number_float: {
            const double d = v.get<double>();
            if (!std::isfinite(d)) {
                out += "null";
            } else {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", d);
                out += buf;
            }
            break;
        }
        default:
            out += v.dump();
    }
}

}  // namespace

ModelConfig parse_config(std::istream& in) {
    std::map<std::string, std::string> values;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!kRequired.count(key) && !kOptional.count(key)) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        if (!values.emplace(key, val).second) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }
    for (const auto& key : kRequired) {
        if (!values.count(key)) throw std::invalid_argument("config: missing key '" + key + "'");
    }

    ModelConfig cfg;
    ModelParams& p = cfg.params;
    p.c_plus = parse_number("c_plus", values["c_plus"]);
    p.c_minus = parse_number("c_minus", values["c_minus"]);
    p.lambda_plus = parse_number("lambda_plus", values["lambda_plus"]);
    p.lambda_minus = parse_number("lambda_minus", values["lambda_minus"]);
    p.h_plus = parse_number("h_plus", values["h_plus"]);
    p.h_minus = parse_number("h_minus", values["h_minus"]);
    p.r_plus = parse_number("r_plus", values["r_plus"]);
    p.r_minus = parse_number("r_minus", values["r_minus"]);
    p.s0 = parse_number("s0", values["s0"]);
    const std::string& sigma = values["sigma0"];
    if (sigma == "+1") {
        p.sigma0 = Regime::plus;
    } else if (sigma == "-1") {
        p.sigma0 = Regime::minus;
    } else {
        throw std::invalid_argument("config: sigma0 must be +1 or -1, got '" + sigma + "'");
    }
    if (values.count("tail_epsilon")) cfg.controls.tail_epsilon = parse_number("tail_epsilon", values["tail_epsilon"]);
    if (values.count("max_terms")) {
        const double m = parse_number("max_terms", values["max_terms"]);
        if (m != std::floor(m) || m < 1 || m > 1e6) throw std::invalid_argument("config: max_terms must be a positive integer");
        cfg.controls.max_terms = static_cast<int>(m);
    }
    cfg.controls.validate();
    return cfg;
}

ModelConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
    return parse_config(in);
}

std::string dump_json(const nlohmann::ordered_json& value) {
    std::string out;
    dump(value, out);
    return out;
}

}  // namespace jtel::cli
