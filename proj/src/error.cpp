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

#include "heana/error.hpp"

#include <utility>

namespace heana {

namespace {

std::string locate(const std::string &file, std::size_t line, const std::string &field,
        const std::string &what) {
    std::string s = file.empty() ? std::string("<input>") : file;
    if (line) s += ":" + std::to_string(line);
    if (!field.empty()) s += ": field '" + field + "'";
    return s + ": " + what;
}

} // namespace

ParseError::ParseError(std::string file, std::size_t line, std::string field,
        const std::string &what)
    : Error(locate(file, line, field, what))
    , file_(std::move(file))
    , line_(line)
    , field_(std::move(field)) {}

CapacityExceeded::CapacityExceeded(std::size_t required, std::size_t p, std::string layer)
    : Error((layer.empty() ? std::string() : "layer '" + layer + "': ")
              + "needs " + std::to_string(required) + " capacitors in flight, BPCA has p="
              + std::to_string(p))
    , required_(required)
    , p_(p)
    , layer_(std::move(layer)) {}

} // namespace heana
