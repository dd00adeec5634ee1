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
#include <cstdint>
#include <vector>

namespace heana {

// Integer matrix with a declared element precision. Row-major.
struct QuantMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    int bits = 8;
    bool is_signed = true;
    std::vector<std::int32_t> data;

    QuantMatrix() = default;
    QuantMatrix(std::size_t r, std::size_t c, int b, bool s)
        : rows(r), cols(c), bits(b), is_signed(s), data(r * c, 0) {}

    std::int32_t at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::int32_t &at(std::size_t r, std::size_t c) { return data[r * cols + c]; }

    std::int64_t min_code() const;
    std::int64_t max_code() const;
    bool fits(std::int64_t v) const { return v >= min_code() && v <= max_code(); }

    // Throws ValidationError if shape or any element breaks the declared range.
    void validate() const;

    bool operator==(const QuantMatrix &o) const = default;
};

struct GemmDims {
    std::size_t C = 1;
    std::size_t K = 1;
    std::size_t D = 1;

    std::uint64_t macs() const { return std::uint64_t(C) * K * D; }
    bool operator==(const GemmDims &o) const = default;
};

// O = I x W with I: C x K, W: K x D.
struct GemmProblem {
    QuantMatrix I;
    QuantMatrix W;

    GemmDims dims() const { return {I.rows, I.cols, W.cols}; }
    void validate() const;
};

// groups > 1 describes grouped / depthwise convolutions; those lower to the
// per-group MAC volume (K counts one group's input channels).
struct ConvLayerShape {
    std::size_t in_h = 1, in_w = 1, in_c = 1;
    std::size_t kernel_h = 1, kernel_w = 1;
    std::size_t out_c = 1;
    std::size_t stride = 1;
    std::size_t pad = 0;
    std::size_t groups = 1;

    // Derived output extents; 0 when the window does not fit.
    std::size_t out_h() const;
    std::size_t out_w() const;

    bool operator==(const ConvLayerShape &o) const = default;
};

GemmDims lower_conv(const ConvLayerShape &shape);

// Materialized Toeplitz matrix. input is (in_h*in_w) x in_c, channels last.
// Columns are ordered (ky, kx, channel), matching weight_from_kernel.
QuantMatrix im2col(const QuantMatrix &input, const ConvLayerShape &shape);

// Wide-accumulator reference product; result is 32-bit signed.
QuantMatrix gemm_exact(const GemmProblem &p);

struct RealMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;
};

// Step of a symmetric uniform quantizer whose largest code maps to range.
double quant_step(int bits, bool is_signed, double range);

// Symmetric uniform quantization, round half away from zero, saturating.
// range is the magnitude that maps to the largest code.
QuantMatrix quantize(const RealMatrix &values, int bits, bool is_signed, double range);
RealMatrix dequantize(const QuantMatrix &q, double step);

// Uniform random operands for property tests and functional checks.
QuantMatrix random_matrix(std::size_t rows, std::size_t cols, int bits, bool is_signed,
        std::uint64_t seed);

} // namespace heana
