#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace srpedge {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        const double n = norm();
        if (n == 0.0) throw std::invalid_argument("Vec3: cannot normalize zero vector");
        return {x / n, y / n, z / n};
    }
};

inline Vec3 direction_from_angles(double elevation_rad, double azimuth_rad) {
    return {std::cos(elevation_rad) * std::cos(azimuth_rad),
            std::cos(elevation_rad) * std::sin(azimuth_rad), std::sin(elevation_rad)};
}

struct MicArray {
    std::vector<Vec3> positions;  // meters
    double speed_of_sound = 343.0;

    int mic_count() const { return static_cast<int>(positions.size()); }

    // Unordered pairs (m, m') with m > m'.
    std::vector<std::pair<int, int>> pairs() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(static_cast<std::size_t>(mic_count()) * (mic_count() - 1) / 2);
        for (int m = 1; m < mic_count(); ++m) {
            for (int mp = 0; mp < m; ++mp) out.emplace_back(m, mp);
        }
        return out;
    }

    double pair_distance(int m, int mp) const {
        return (positions[static_cast<std::size_t>(m)] - positions[static_cast<std::size_t>(mp)])
            .norm();
    }

    void validate() const {
        if (mic_count() < 2) throw std::invalid_argument("MicArray: need at least 2 microphones");
        if (speed_of_sound <= 0.0) throw std::invalid_argument("MicArray: speed of sound <= 0");
        for (int m = 1; m < mic_count(); ++m) {
            for (int mp = 0; mp < m; ++mp) {
                if (pair_distance(m, mp) < 1e-9) {
                    throw std::invalid_argument("MicArray: coincident microphones");
                }
            }
        }
    }
};

// Shipped default: 12 microphones on an icosahedron of circumradius 0.07 m.
inline MicArray default_mic_array(double radius = 0.07) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> pts;
    for (double a : {-1.0, 1.0}) {
        for (double b : {-phi, phi}) {
            pts.push_back({0.0, a, b});
            pts.push_back({a, b, 0.0});
            pts.push_back({b, 0.0, a});
        }
    }
    const double scale = radius / pts[0].norm();
    MicArray array;
    for (auto& p : pts) array.positions.push_back(p * scale);
    array.validate();
    return array;
}

// Geometry file: `positions = [[x,y,z], ...]` in meters, optional
// `speed_of_sound = <m/s>`, `#` comments.
inline MicArray load_mic_array(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("geometry: cannot open " + path);
    std::string text, line;
    while (std::getline(f, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        text += line;
        text += '\n';
    }
    MicArray array;
    const auto sos = text.find("speed_of_sound");
    if (sos != std::string::npos) {
        const auto eq = text.find('=', sos);
        if (eq == std::string::npos) throw std::runtime_error("geometry: malformed speed_of_sound");
        array.speed_of_sound = std::stod(text.substr(eq + 1));
    }
    const auto pos = text.find("positions");
    if (pos == std::string::npos) throw std::runtime_error("geometry: missing positions");
    const auto open = text.find('[', pos);
    if (open == std::string::npos) throw std::runtime_error("geometry: malformed positions");
    std::size_t i = open + 1;
    int depth = 1;
    std::vector<double> nums;
    std::string cur;
    auto flush = [&]() {
        if (!cur.empty()) {
            nums.push_back(std::stod(cur));
            cur.clear();
        }
    };
    for (; i < text.size() && depth > 0; ++i) {
        const char c = text[i];
        if (c == '[') {
            ++depth;
        } else if (c == ']') {
            flush();
            --depth;
        } else if (c == ',' || c == '\n' || c == ' ' || c == '\t') {
            flush();
        } else {
            cur += c;
        }
    }
    if (nums.size() % 3 != 0 || nums.empty()) {
        throw std::runtime_error("geometry: positions must be triples of numbers");
    }
    for (std::size_t n = 0; n < nums.size(); n += 3) {
        array.positions.push_back({nums[n], nums[n + 1], nums[n + 2]});
    }
    array.validate();
    return array;
}

inline void save_mic_array(const std::string& path, const MicArray& array) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("geometry: cannot write " + path);
    f << "speed_of_sound = " << array.speed_of_sound << "\n";
    f << "positions = [\n";
    f.precision(17);
    for (const auto& p : array.positions) {
        f << "  [" << p.x << ", " << p.y << ", " << p.z << "],\n";
    }
    f << "]\n";
}

// Spherical candidate set, Res1 x Res2 cell centers, elevation-major flat order.
struct CandidateGrid {
    int res_elevation = 0;  // Res1
    int res_azimuth = 0;    // Res2
    std::vector<double> elevations;  // radians, cell centers in (-pi/2, pi/2)
    std::vector<double> azimuths;    // radians, cell centers in [0, 2pi)
    std::vector<Vec3> directions;    // Res1*Res2 unit vectors

    int candidate_count() const { return res_elevation * res_azimuth; }
    int flat_index(int ei, int ai) const { return ei * res_azimuth + ai; }

    double azimuth_step_deg() const { return 360.0 / res_azimuth; }

    int elevation_cell(double elevation_rad) const {
        const double u = (elevation_rad + std::numbers::pi / 2.0) / std::numbers::pi;
        int ei = static_cast<int>(std::floor(u * res_elevation));
        if (ei < 0) ei = 0;
        if (ei >= res_elevation) ei = res_elevation - 1;
        return ei;
    }
    int azimuth_cell(double azimuth_rad) const {
        double a = std::fmod(azimuth_rad, 2.0 * std::numbers::pi);
        if (a < 0) a += 2.0 * std::numbers::pi;
        int ai = static_cast<int>(std::floor(a / (2.0 * std::numbers::pi) * res_azimuth));
        if (ai >= res_azimuth) ai = res_azimuth - 1;
        return ai;
    }
};

inline CandidateGrid build_grid(int res_elevation, int res_azimuth) {
    if (res_elevation < 2 || res_azimuth < 2) {
        throw std::invalid_argument("build_grid: resolutions must be >= 2");
    }
    CandidateGrid g;
    g.res_elevation = res_elevation;
    g.res_azimuth = res_azimuth;
    for (int i = 0; i < res_elevation; ++i) {
        g.elevations.push_back(-std::numbers::pi / 2.0 +
                               (i + 0.5) * std::numbers::pi / res_elevation);
    }
    for (int j = 0; j < res_azimuth; ++j) {
        g.azimuths.push_back((j + 0.5) * 2.0 * std::numbers::pi / res_azimuth);
    }
    g.directions.reserve(static_cast<std::size_t>(g.candidate_count()));
    for (int i = 0; i < res_elevation; ++i) {
        for (int j = 0; j < res_azimuth; ++j) {
            g.directions.push_back(direction_from_angles(g.elevations[static_cast<std::size_t>(i)],
                                                         g.azimuths[static_cast<std::size_t>(j)]));
        }
    }
    return g;
}

// Steering delay difference for pair (m, m') and a far-field candidate. This is
// the arrival-time difference a plane wave from `direction` produces, so the
// steered sum aligns with the measured GCC phase.
inline double pair_tdoa(const MicArray& array, int m, int mp, const Vec3& direction) {
    return direction.dot(array.positions[static_cast<std::size_t>(mp)] -
                         array.positions[static_cast<std::size_t>(m)]) /
           array.speed_of_sound;
}

struct TdoaTable {
    int pair_count = 0;
    int candidate_count = 0;
    std::vector<double> seconds;  // [pair][candidate]

    double at(int pair, int q) const {
        return seconds[static_cast<std::size_t>(pair) * candidate_count +
                       static_cast<std::size_t>(q)];
    }
    // TDOA in sample units, tau / T with T = 1/fs.
    double lag_samples(int pair, int q, int fs) const { return at(pair, q) * fs; }
};

inline TdoaTable tdoa_table(const MicArray& array, const CandidateGrid& grid) {
    array.validate();
    const auto prs = array.pairs();
    TdoaTable t;
    t.pair_count = static_cast<int>(prs.size());
    t.candidate_count = grid.candidate_count();
    t.seconds.resize(static_cast<std::size_t>(t.pair_count) * t.candidate_count);
    for (std::size_t p = 0; p < prs.size(); ++p) {
        for (int q = 0; q < t.candidate_count; ++q) {
            t.seconds[p * static_cast<std::size_t>(t.candidate_count) +
                      static_cast<std::size_t>(q)] =
                pair_tdoa(array, prs[p].first, prs[p].second,
                          grid.directions[static_cast<std::size_t>(q)]);
        }
    }
    return t;
}

// Per-pair interpolation bound N_samp = floor(dist * fs / c) and the aggregate
// index counts used by the complexity model.
struct SampleBounds {
    int fs = 0;
    std::vector<int> per_pair;  // N_samp(m, m')

    long long two_sided_total() const {  // sum of (2 N_samp + 1)
        long long s = 0;
        for (int n : per_pair) s += 2LL * n + 1;
        return s;
    }
    long long one_sided_total() const {  // sum of (N_samp + 1)
        long long s = 0;
        for (int n : per_pair) s += n + 1LL;
        return s;
    }
    int max_per_pair() const {
        int m = 0;
        for (int n : per_pair) m = std::max(m, n);
        return m;
    }
};

inline SampleBounds n_samp(const MicArray& array, int fs) {
    if (fs <= 0) throw std::invalid_argument("n_samp: fs must be positive");
    SampleBounds b;
    b.fs = fs;
    for (const auto& [m, mp] : array.pairs()) {
        b.per_pair.push_back(
            static_cast<int>(std::floor(array.pair_distance(m, mp) * fs / array.speed_of_sound)));
    }
    return b;
}

}  // namespace srpedge
