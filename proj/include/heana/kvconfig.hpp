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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace heana {

// "key = value" lines, '#' starts a comment. Keys keep file order.
class KvConfig {
public:
    struct Entry {
        std::string key;
        std::string value;
        std::size_t line = 0;
    };

    static KvConfig parse(std::string_view text, std::string source = {});
    static KvConfig load(const std::string &path);

    const std::vector<Entry> &entries() const { return entries_; }
    const std::string &source() const { return source_; }
    const Entry *find(std::string_view key) const;

    // Throws ParseError naming the line when the value is not a finite number.
    std::optional<double> number(std::string_view key) const;

    // Throws ParseError on the first key not in known.
    void require_known(std::span<const std::string_view> known) const;

private:
    std::string source_;
    std::vector<Entry> entries_;
};

std::string read_file(const std::string &path);

} // namespace heana
