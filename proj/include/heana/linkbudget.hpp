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
#include <string>
#include <vector>

#include "heana/dataflow.hpp"
#include "heana/kvconfig.hpp"

namespace heana {

// Optical link and detector constants. Losses in dB, P_Si_att in dB/mm.
// P_MRR_W_OBL, P_SMF_att and d_MRR are unpublished and carry calibrated
// defaults (see heana-calibrate).
struct LinkBudgetParams {
    double P_Laser = 10.0;      // dBm per wavelength
    double R = 1.2;             // A/W
    double R_L = 50.0;          // ohm
    double I_d = 35e-9;         // A
    double T = 300.0;           // K
    double RIN = -140.0;        // dB/Hz
    double P_EC_IL = 1.44;
    double P_Si_att = 0.3;
    double P_splitter_IL = 0.01;
    double P_MRM_IL = 4.0;
    double P_MRR_IL = 0.01;
    double P_MRM_OBL = 0.01;
    double P_MRR_W_OBL = 0.0235;
    double P_filter_OBL = 0.01; // HEANA mono-wavelength filters
    double P_SMF_att = 0.0;
    double d_MRR = 0.002;       // mm
    double P_penalty_AMW = 5.8;
    double P_penalty_MAW = 4.8;
    double P_penalty_HEANA = 1.8;
    double power_ceiling_W = 10.0;

    double penalty(Arch a) const;
    void validate() const;

    static LinkBudgetParams from_config(const KvConfig &cfg);
    std::string to_config() const;
};

struct ScalePoint {
    int B = 0;
    double DR = 0;
    Arch arch = Arch::HEANA;
    std::size_t N_max = 0;
};

double dbm_to_w(double dbm);
double w_to_dbm(double w);

// Detector noise current (A) at received power P (W).
double noise_beta(double P, const LinkBudgetParams &p, double DR);

// Bit precision resolved at received power P.
double resolved_bits(double P, const LinkBudgetParams &p, double DR);

// Smallest detector power (W) resolving B bits. Throws NoSolution.
double required_power(double B, double DR, const LinkBudgetParams &p);

// Power (dBm) reaching one detector for a DPU of N wavelengths, M DPEs.
double output_power(std::size_t N, std::size_t M, const LinkBudgetParams &p, Arch a);

ScalePoint max_n(int B, double DR, const LinkBudgetParams &p, Arch a);

// The three link-budget organizations (BPCA variants share their base's optics).
inline constexpr Arch kLinkArchs[] = {Arch::HEANA, Arch::MAW, Arch::AMW};
inline constexpr double kDatarates[] = {1e9, 5e9, 10e9};

std::vector<ScalePoint> scale_sweep(const LinkBudgetParams &p);
std::string scale_csv(const std::vector<ScalePoint> &pts);

// Grid fit of the unpublished loss constants against published DPU sizes.
struct CalibrationAnchor {
    Arch arch;
    double DR;
    std::size_t N;
    bool primary;  // enters the max-error objective; others only break ties
};

struct CalibrationGrid {
    double d_max = 0.02, d_step = 0.0005;
    double smf_max = 1.0, smf_step = 0.05;
    double obl_min = 0.010, obl_max = 0.040, obl_step = 0.0005;
};

struct CalibrationResult {
    LinkBudgetParams params;
    double max_rel_error = 0;   // over primary anchors
    double mean_rel_error = 0;  // over all anchors
};

std::vector<CalibrationAnchor> published_anchors();
CalibrationResult calibrate(const LinkBudgetParams &base, const std::vector<CalibrationAnchor> &anchors,
        const CalibrationGrid &grid = {}, int bits = 4);

} // namespace heana
