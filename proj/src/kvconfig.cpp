/*
 * Copyright 2026 The heana-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "heana/kvconfig.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "heana/error.hpp"

namespace heana {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace((unsigned char)s.front())) s.remove_prefix(1);
    while (!s.empty() && std::isspace((unsigned char)s.back())) s.remove_suffix(1);
    return s;
}

bool valid_key(std::string_view k) {
    if (k.empty()) return false;
    return std::all_of(k.begin(), k.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '.' || c == '-';
    });
}

} // namespace

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, 0, "", "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

KvConfig KvConfig::parse(std::string_view text, std::string source) {
    KvConfig cfg;
    cfg.source_ = std::move(source);
    std::size_t lineno = 0;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++lineno;
        if (const auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(cfg.source_, lineno, "", "expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view val = trim(line.substr(eq + 1));
        if (!valid_key(key)) throw ParseError(cfg.source_, lineno, std::string(key), "bad key");
        if (val.empty()) throw ParseError(cfg.source_, lineno, std::string(key), "missing value");
        if (cfg.find(key))
            throw ParseError(cfg.source_, lineno, std::string(key), "duplicate key");
        cfg.entries_.push_back({std::string(key), std::string(val), lineno});
    }
    return cfg;
}

KvConfig KvConfig::load(const std::string &path) { return parse(read_file(path), path); }

const KvConfig::Entry *KvConfig::find(std::string_view key) const {
    for (const auto &e : entries_)
        if (e.key == key) return &e;
    return nullptr;
}

std::optional<double> KvConfig::number(std::string_view key) const {
    const Entry *e = find(key);
    if (!e) return std::nullopt;
    errno = 0;
    char *end = nullptr;
    const double v = std::strtod(e->value.c_str(), &end);
    if (end == e->value.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        throw ParseError(source_, e->line, e->key, "'" + e->value + "' is not a number");
    return v;
}

void KvConfig::require_known(std::span<const std::string_view> known) const {
    for (const auto &e : entries_)
        if (std::find(known.begin(), known.end(), e.key) == known.end())
            throw ParseError(source_, e.line, e.key, "unknown key");
}

} // namespace heana
