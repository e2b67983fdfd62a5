#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "crtwist/common.hpp"
#include "crtwist/geometry.hpp"
#include "crtwist/invariants.hpp"
#include "crtwist/moduli.hpp"

// Serialization of curve geometry and reports. Field order is fixed
// (nlohmann::ordered_json); reals are written with 17 significant digits in
// CSV/OBJ so re-imports reproduce doubles bitwise.

namespace crtwist {

using json = nlohmann::ordered_json;

inline constexpr int report_schema_version = 1;

struct GeometrySample {
    double s;
    std::array<double, 3> p; // Heisenberg coordinates
};

namespace detail {

inline std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    return f;
}

} // namespace detail

inline void write_csv(const std::filesystem::path& path, const std::vector<GeometrySample>& samples) {
    auto f = detail::open_out(path);
    f << "s,x,y,z\n";
    for (const auto& g : samples)
        f << detail::fmt17(g.s) << ',' << detail::fmt17(g.p[0]) << ',' << detail::fmt17(g.p[1]) << ','
          << detail::fmt17(g.p[2]) << '\n';
    if (!f) throw IoError("write failed: " + path.string());
}

inline std::vector<GeometrySample> read_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open for reading: " + path.string());
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty CSV: " + path.string());
    std::vector<GeometrySample> out;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        GeometrySample g;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream is(line);
        if (!(is >> g.s >> g.p[0] >> g.p[1] >> g.p[2]))
            throw IoError("malformed CSV row in " + path.string() + ": " + line);
        out.push_back(g);
    }
    return out;
}

inline void write_obj(const std::filesystem::path& path, const std::vector<GeometrySample>& samples,
                      bool closed) {
    auto f = detail::open_out(path);
    f << "# crtwist polyline export\n";
    for (const auto& g : samples)
        f << "v " << detail::fmt17(g.p[0]) << ' ' << detail::fmt17(g.p[1]) << ' '
          << detail::fmt17(g.p[2]) << '\n';
    if (!samples.empty()) {
        f << 'l';
        for (size_t k = 1; k <= samples.size(); ++k) f << ' ' << k;
        if (closed) f << " 1";
        f << '\n';
    }
    if (!f) throw IoError("write failed: " + path.string());
}

inline json modulus_json(const Modulus& c) { return json{{"c1", c.c1}, {"c2", c.c2}}; }

inline json classification_json(const Classification& cl) {
    json classes = json::array();
    for (auto cc : cl.curve_classes) classes.push_back(to_string(cc));
    return json{{"phase", to_string(cl.phase)},
                {"orbit", to_string(cl.orbit)},
                {"region", to_string(cl.region)},
                {"curve_classes", classes},
                {"delta1", cl.delta1},
                {"delta2", cl.delta2},
                {"separatrix_distance", cl.separatrix_distance}};
}

inline json spectrum_json(const QuinticSpectrum& spec) {
    json real = json::array(), cpx = json::array();
    for (const auto& r : spec.real_roots)
        real.push_back(json{{"value", r.value}, {"multiplicity", r.multiplicity}});
    for (const auto& q : spec.complex_pairs)
        cpx.push_back(json{{"re", q.re}, {"im", q.im}, {"multiplicity", q.multiplicity}});
    return json{{"real_roots", real}, {"complex_pairs", cpx}};
}

inline json momentum_json(const MomentumSpectrum& mom) {
    json vals = json::array();
    for (const auto& l : mom.lambda) vals.push_back(json{{"re", l.real()}, {"im", l.imag()}});
    return json{{"kind", to_string(mom.kind)}, {"eigenvalues", vals}};
}

inline json invariants_json(const QuantumNumbers& qn) {
    return json{{"spin", qn.spin.str() == "1/1" ? "1" : qn.spin.str()},
                {"wave_number", qn.wave_number},
                {"turning", qn.turning},
                {"trace", qn.trace}};
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    auto f = detail::open_out(path);
    f << j.dump(2) << '\n';
    if (!f) throw IoError("write failed: " + path.string());
}

inline json read_json(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open for reading: " + path.string());
    json j;
    f >> j;
    return j;
}

} // namespace crtwist
