#pragma once

// Internal nlohmann::json adapters shared by serialize.cpp and campaign.cpp.
// Not installed; public interfaces speak strings and files.

#include "qsd/optics.hpp"
#include "qsd/qudit.hpp"
#include "qsd/serialize.hpp"

#include <json.hpp>

namespace qsd::detail {

using nlohmann::json;

inline json coeffs_json(const RealVec& c) {
    json arr = json::array();
    for (int i = 0; i < c.size(); ++i) arr.push_back(format_sig17(c[i]));
    return arr;
}

inline RealVec coeffs_from(const json& arr) {
    if (!arr.is_array() || arr.empty())
        throw std::invalid_argument("coefficients: expected nonempty array");
    RealVec c(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& v = arr[i];
        if (v.is_string())
            c[static_cast<int>(i)] = std::stod(v.get<std::string>());
        else
            c[static_cast<int>(i)] = v.get<double>();
    }
    return c;
}

inline json geometry_json(const OpticalGeometry& g) {
    return json{{"lambda", g.lambda},
                {"f", g.f},
                {"d", g.d},
                {"a", g.a},
                {"L", g.L},
                {"pixel_pitch", g.pixel_pitch},
                {"window",
                 {{"x_min", g.window.x_min},
                  {"x_max", g.window.x_max},
                  {"samples", g.window.samples}}}};
}

inline OpticalGeometry geometry_from(const json& j) {
    OpticalGeometry g;
    g.lambda = j.value("lambda", g.lambda);
    g.f = j.value("f", g.f);
    g.d = j.value("d", g.d);
    g.a = j.value("a", g.a);
    g.L = j.value("L", g.L);
    g.pixel_pitch = j.value("pixel_pitch", g.pixel_pitch);
    if (j.contains("window")) {
        const json& w = j.at("window");
        g.window.x_min = w.value("x_min", g.window.x_min);
        g.window.x_max = w.value("x_max", g.window.x_max);
        g.window.samples = w.value("samples", g.window.samples);
    }
    g.validate();
    return g;
}

inline json noise_json(const NoiseModel& n) {
    return json{{"background", n.background},
                {"readout_sigma", n.readout_sigma},
                {"prep_amp_sigma", n.prep_amp_sigma},
                {"prep_phase_sigma", n.prep_phase_sigma},
                {"quantization_bits", n.quantization_bits},
                {"frames", n.frames},
                {"seed", n.seed}};
}

inline NoiseModel noise_from(const json& j) {
    NoiseModel n;
    n.background = j.value("background", n.background);
    n.readout_sigma = j.value("readout_sigma", n.readout_sigma);
    n.prep_amp_sigma = j.value("prep_amp_sigma", n.prep_amp_sigma);
    n.prep_phase_sigma = j.value("prep_phase_sigma", n.prep_phase_sigma);
    n.quantization_bits = j.value("quantization_bits", n.quantization_bits);
    n.frames = j.value("frames", n.frames);
    n.seed = j.value("seed", n.seed);
    n.validate();
    return n;
}

}  // namespace qsd::detail
