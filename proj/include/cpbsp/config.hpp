// Copyright 2026 The cpbsp authors
// SPDX-License-Identifier: Apache-2.0
//
// Key/value configuration for the pipeline: `key = value` lines, `#`
// comments. Every key maps onto one CpbParams / SlicParams / PipelineConfig
// field; unknown keys are rejected.

#ifndef CPBSP_CONFIG_HPP
#define CPBSP_CONFIG_HPP

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "cpbsp/pipeline.hpp"

namespace cpbsp {

using ConfigMap = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline int parse_int(const std::string& key, const std::string& value) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
    return out;
}

inline double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double out = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size() || value.empty()) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
    return out;
}

}  // namespace detail

inline ConfigMap parse_config_text(const std::string& text) {
    ConfigMap out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        out[key] = value;
    }
    return out;
}

inline ConfigMap load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

/// Applies parsed keys onto a config. Later sources (CLI flags) should call
/// this first and then overwrite fields directly.
inline void apply_config(PipelineConfig& cfg, const ConfigMap& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "k") {
            cfg.cpb.support_count = detail::parse_int(key, value);
        } else if (key == "eta") {
            cfg.cpb.eta = detail::parse_double(key, value);
        } else if (key == "lambda") {
            cfg.cpb.lambda = detail::parse_double(key, value);
        } else if (key == "block_w") {
            cfg.cpb.block_w = detail::parse_int(key, value);
        } else if (key == "block_h") {
            cfg.cpb.block_h = detail::parse_int(key, value);
        } else if (key == "train_frames") {
            cfg.cpb.train_frames = detail::parse_int(key, value);
        } else if (key == "sigma_floor") {
            cfg.cpb.sigma_floor = detail::parse_double(key, value);
        } else if (key == "pool_radius") {
            cfg.cpb.pool_radius = detail::parse_int(key, value);
        } else if (key == "region_count") {
            cfg.slic.region_count = detail::parse_int(key, value);
        } else if (key == "superpixel_size") {
            cfg.slic.region_size = detail::parse_int(key, value);
        } else if (key == "compactness") {
            cfg.slic.compactness = detail::parse_double(key, value);
        } else if (key == "max_iters") {
            cfg.slic.max_iters = detail::parse_int(key, value);
        } else if (key == "min_region_frac") {
            cfg.slic.min_region_frac = detail::parse_double(key, value);
        } else if (key == "overlap_frac") {
            cfg.overlap_frac = detail::parse_double(key, value);
        } else if (key == "aggregate") {
            cfg.aggregate = aggregate_from_string(value);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
}

/// The effective configuration as ordered key/value pairs, e.g. for
/// echoing into a run manifest.
inline std::vector<std::pair<std::string, std::string>> effective_config(
    const PipelineConfig& cfg) {
    auto num = [](double v) {
        std::string s = std::to_string(v);
        while (s.size() > 1 && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    };
    return {
        {"k", std::to_string(cfg.cpb.support_count)},
        {"eta", num(cfg.cpb.eta)},
        {"lambda", num(cfg.cpb.lambda)},
        {"block_w", std::to_string(cfg.cpb.block_w)},
        {"block_h", std::to_string(cfg.cpb.block_h)},
        {"train_frames", std::to_string(cfg.cpb.train_frames)},
        {"sigma_floor", num(cfg.cpb.sigma_floor)},
        {"pool_radius", std::to_string(cfg.cpb.pool_radius)},
        {"region_count", std::to_string(cfg.slic.region_count)},
        {"superpixel_size", std::to_string(cfg.slic.region_size)},
        {"compactness", num(cfg.slic.compactness)},
        {"max_iters", std::to_string(cfg.slic.max_iters)},
        {"min_region_frac", num(cfg.slic.min_region_frac)},
        {"overlap_frac", num(cfg.overlap_frac)},
        {"aggregate", to_string(cfg.aggregate)},
    };
}

}  // namespace cpbsp

#endif  // CPBSP_CONFIG_HPP
