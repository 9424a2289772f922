#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "srpedge/geometry.hpp"

namespace srpedge {

// Great-circle angle between two unit vectors, in degrees.
inline double angular_error_deg(const Vec3& u, const Vec3& v) {
    if (std::abs(u.norm() - 1.0) > 1e-9 || std::abs(v.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("angular_error: inputs must be unit vectors");
    }
    const double d = std::clamp(u.dot(v), -1.0, 1.0);
    return std::acos(d) * 180.0 / std::numbers::pi;
}

struct DoaSeries {
    std::vector<Vec3> truth;
    std::vector<Vec3> estimate;
    std::vector<bool> vad;  // optional; empty = all frames active

    void validate() const {
        if (truth.size() != estimate.size()) {
            throw std::invalid_argument("DoaSeries: truth/estimate length mismatch");
        }
        if (!vad.empty() && vad.size() != truth.size()) {
            throw std::invalid_argument("DoaSeries: VAD mask length mismatch");
        }
    }
    bool active(std::size_t i) const { return vad.empty() || vad[i]; }
};

inline std::vector<double> frame_errors_deg(const DoaSeries& s, bool masked) {
    s.validate();
    std::vector<double> out;
    for (std::size_t i = 0; i < s.truth.size(); ++i) {
        if (masked && !s.active(i)) continue;
        out.push_back(angular_error_deg(s.truth[i], s.estimate[i]));
    }
    return out;
}

inline double rmsae_deg(const DoaSeries& s, bool masked = false) {
    const std::vector<double> errs = frame_errors_deg(s, masked);
    if (errs.empty()) throw std::invalid_argument("rmsae: no active frames");
    double acc = 0.0;
    for (double e : errs) acc += e * e;
    return std::sqrt(acc / static_cast<double>(errs.size()));
}

inline double mae_deg(const DoaSeries& s, bool masked = false) {
    const std::vector<double> errs = frame_errors_deg(s, masked);
    if (errs.empty()) throw std::invalid_argument("mae: no active frames");
    double acc = 0.0;
    for (double e : errs) acc += e;
    return acc / static_cast<double>(errs.size());
}

// Alternative per-axis reading: RMS over independent azimuth and elevation
// errors combined in quadrature. Azimuth differences wrap at 360.
inline double rmsae_per_axis_deg(const DoaSeries& s, bool masked = false) {
    s.validate();
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < s.truth.size(); ++i) {
        if (masked && !s.active(i)) continue;
        auto angles = [](const Vec3& v) {
            const double el = std::asin(std::clamp(v.z, -1.0, 1.0)) * 180.0 / std::numbers::pi;
            double az = std::atan2(v.y, v.x) * 180.0 / std::numbers::pi;
            if (az < 0) az += 360.0;
            return std::pair<double, double>(el, az);
        };
        const auto [te, ta] = angles(s.truth[i]);
        const auto [ee, ea] = angles(s.estimate[i]);
        double daz = std::abs(ta - ea);
        if (daz > 180.0) daz = 360.0 - daz;
        acc += (te - ee) * (te - ee) + daz * daz;
        ++n;
    }
    if (n == 0) throw std::invalid_argument("rmsae: no active frames");
    return std::sqrt(acc / static_cast<double>(n));
}

// RMSAE in units of the adjacent-candidate azimuth spacing at the equator.
// Values above 1.0 mean the model fails to resolve adjacent grid cells.
inline double srp_grid_ratio(double rmsae, const CandidateGrid& grid) {
    return rmsae / grid.azimuth_step_deg();
}

}  // namespace srpedge
