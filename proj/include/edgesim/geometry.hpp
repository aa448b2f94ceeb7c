#pragma once

#include <cmath>
#include <stdexcept>

namespace edgesim {

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline double distance(const Point3& a, const Point3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Multi-story building box. The height must be an integer multiple of the
// floor height so every point lies on a well-defined floor.
struct BuildingGeometry {
    double width_m = 100.0;
    double depth_m = 200.0;
    double height_m = 50.0;
    double floor_height_m = 10.0;

    int num_floors() const {
        return static_cast<int>(std::lround(height_m / floor_height_m));
    }

    double floor_area() const { return width_m * depth_m; }

    int floor_of(double z) const {
        int f = static_cast<int>(std::floor(z / floor_height_m));
        if (f < 0) f = 0;
        if (f >= num_floors()) f = num_floors() - 1;
        return f;
    }

    bool contains(const Point3& p) const {
        return p.x >= 0.0 && p.x <= width_m && p.y >= 0.0 && p.y <= depth_m &&
               p.z >= 0.0 && p.z <= height_m;
    }

    void validate() const {
        if (width_m <= 0.0 || depth_m <= 0.0 || height_m <= 0.0 || floor_height_m <= 0.0)
            throw std::invalid_argument("building dimensions must be strictly positive");
        const double ratio = height_m / floor_height_m;
        if (std::abs(ratio - std::lround(ratio)) > 1e-9)
            throw std::invalid_argument("building height must be an integer multiple of floor height");
    }
};

} // namespace edgesim
