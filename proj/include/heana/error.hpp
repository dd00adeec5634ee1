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
#include <stdexcept>
#include <string>

namespace heana {

// Base of every error the library throws; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed text input. line is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(std::string file, std::size_t line, std::string field,
            const std::string &what);

    const std::string &file() const { return file_; }
    std::size_t line() const { return line_; }
    const std::string &field() const { return field_; }

private:
    std::string file_;
    std::size_t line_;
    std::string field_;
};

// Well-formed input that violates a semantic constraint.
class ValidationError : public Error {
public:
    using Error::Error;
};

// More output tiles in flight than the BPCA has capacitors.
class CapacityExceeded : public Error {
public:
    CapacityExceeded(std::size_t required, std::size_t p, std::string layer = {});

    std::size_t required() const { return required_; }
    std::size_t p() const { return p_; }
    const std::string &layer() const { return layer_; }

private:
    std::size_t required_;
    std::size_t p_;
    std::string layer_;
};

// A target bit precision cannot be met below the power ceiling.
class NoSolution : public Error {
public:
    using Error::Error;
};

} // namespace heana
