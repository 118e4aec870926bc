#include "paramosc/scenario.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace paramosc {

void DriveParameters::validate() const {
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(omega) || omega <= 0.0)
        throw validation_error("omega must be finite and > 0");
    if (!finite(Omega) || Omega <= 0.0)
        throw validation_error("Omega must be finite and > 0");
    if (!finite(delta_g) || delta_g < 0.0)
        throw validation_error("delta_g must be finite and >= 0");
    // delta_g > 0 requires g > delta_g so gamma(t) never changes sign; the
    // undriven case only needs g >= 0 (gamma is then a nonnegative constant).
    if (!finite(g) || (delta_g > 0.0 ? g <= delta_g : g < 0.0))
        throw validation_error("g must be finite, >= 0, and > delta_g when delta_g > 0, "
                               "so the coupling never changes sign");
    if (!finite(t0))
        throw validation_error("t0 must be finite");
}

double coupling_at(const DriveParameters& p, double t) {
    return p.g + p.delta_g * std::cos(p.Omega * t);
}

double mode_frequency_squared(const DriveParameters& p, Mode mode, double t) {
    const double two_wg = 2.0 * p.omega * coupling_at(p, t);
    return mode == Mode::minus ? p.omega * p.omega - two_wg : p.omega * p.omega + two_wg;
}

DriveParameters load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw validation_error("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("scenario file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object())
        throw validation_error("scenario file must contain a JSON object");

    DriveParameters p;
    const auto read = [&](const char* key, double& dst) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_number())
            throw validation_error(std::string("scenario key '") + key + "' must be a number");
        dst = v.get<double>();
    };
    read("omega", p.omega);
    read("g", p.g);
    read("delta_g", p.delta_g);
    read("Omega", p.Omega);
    read("t0", p.t0);
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "omega" && key != "g" && key != "delta_g" && key != "Omega" && key != "t0")
            throw validation_error("unknown scenario key '" + key + "'");
    }
    p.validate();
    return p;
}

} // namespace paramosc
