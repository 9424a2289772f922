#pragma once

#include <stdexcept>
#include <vector>

#include "srpedge/srp.hpp"

namespace srpedge {

// Network input: channel 0 holds the SRP maps, channels 1 and 2 broadcast the
// normalized argmax elevation/azimuth over the spatial plane per time step.
struct FeatureTensor {
    int channels = 3;
    int time = 0;
    int res_elevation = 0;
    int res_azimuth = 0;
    std::vector<double> data;  // [channel][time][elevation][azimuth]

    std::size_t index(int c, int t, int e, int a) const {
        return ((static_cast<std::size_t>(c) * time + static_cast<std::size_t>(t)) *
                    res_elevation +
                static_cast<std::size_t>(e)) *
                   res_azimuth +
               static_cast<std::size_t>(a);
    }
    double at(int c, int t, int e, int a) const { return data[index(c, t, e, a)]; }
    std::size_t spatial_size() const {
        return static_cast<std::size_t>(res_elevation) * res_azimuth;
    }
};

inline FeatureTensor assemble(const std::vector<SrpFrame>& frames) {
    if (frames.empty()) throw std::invalid_argument("assemble: need at least one frame");
    FeatureTensor ft;
    ft.time = static_cast<int>(frames.size());
    ft.res_elevation = frames[0].res_elevation;
    ft.res_azimuth = frames[0].res_azimuth;
    ft.data.assign(3 * static_cast<std::size_t>(ft.time) * ft.spatial_size(), 0.0);
    for (int t = 0; t < ft.time; ++t) {
        const SrpFrame& f = frames[static_cast<std::size_t>(t)];
        if (f.res_elevation != ft.res_elevation || f.res_azimuth != ft.res_azimuth) {
            throw std::invalid_argument("assemble: mixed grid sizes");
        }
        const double el = f.argmax_elevation_norm();
        const double az = f.argmax_azimuth_norm();
        for (int e = 0; e < ft.res_elevation; ++e) {
            for (int a = 0; a < ft.res_azimuth; ++a) {
                ft.data[ft.index(0, t, e, a)] =
                    f.power[static_cast<std::size_t>(e) * ft.res_azimuth +
                            static_cast<std::size_t>(a)];
                ft.data[ft.index(1, t, e, a)] = el;
                ft.data[ft.index(2, t, e, a)] = az;
            }
        }
    }
    return ft;
}

}  // namespace srpedge
