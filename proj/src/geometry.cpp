#include "tripleview/geometry.hpp"

#include <cmath>
#include <sstream>

#include "tripleview/error.hpp"

namespace tripleview {

namespace {

// sin/cos of an angle in degrees, exact at multiples of 90.
void sincos_deg(double deg, double& s, double& c) noexcept {
    const double r = std::remainder(deg, 360.0);
    const double q = std::round(r / 90.0);
    const double rem = r - q * 90.0;
    double s0 = 0.0;
    double c0 = 1.0;
    if (rem != 0.0) {
        s0 = std::sin(rem * kDegToRad);
        c0 = std::cos(rem * kDegToRad);
    }
    switch (static_cast<int>(q) & 3) {
        case 0: s = s0; c = c0; break;
        case 1: s = c0; c = -s0; break;
        case 2: s = -s0; c = -c0; break;
        default: s = -c0; c = s0; break;
    }
}

}  // namespace

double wrap_yaw(double yaw_deg) noexcept {
    if (yaw_deg >= -180.0 && yaw_deg <= 180.0) return yaw_deg;
    double w = std::fmod(yaw_deg + 180.0, 360.0);
    if (w < 0.0) w += 360.0;
    return w - 180.0;
}

ViewingDirection::ViewingDirection(double yaw_deg, double pitch_deg) {
    if (!std::isfinite(yaw_deg) || !std::isfinite(pitch_deg)) {
        fail(ErrorCode::InvalidArgument, "viewing direction must be finite");
    }
    if (pitch_deg < -90.0 || pitch_deg > 90.0) {
        std::ostringstream msg;
        msg << "pitch " << pitch_deg << " outside [-90, 90]";
        fail(ErrorCode::InvalidArgument, msg.str());
    }
    yaw_ = wrap_yaw(yaw_deg);
    pitch_ = pitch_deg;
}

bool operator==(const ViewingDirection& a, const ViewingDirection& b) noexcept {
    if (a.pitch_ != b.pitch_) return false;
    if (a.is_pole()) return true;
    if (a.yaw_ == b.yaw_) return true;
    return std::abs(a.yaw_) == 180.0 && std::abs(b.yaw_) == 180.0;
}

namespace {

double vincenty(const ViewingDirection& a, const ViewingDirection& b) noexcept {
    double sp1, cp1, sp2, cp2, sdl, cdl;
    sincos_deg(a.pitch(), sp1, cp1);
    sincos_deg(b.pitch(), sp2, cp2);
    sincos_deg(b.yaw() - a.yaw(), sdl, cdl);
    const double x = cp2 * sdl;
    const double y = cp1 * sp2 - sp1 * cp2 * cdl;
    const double num = std::hypot(x, y);
    const double den = sp1 * sp2 + cp1 * cp2 * cdl;
    return std::atan2(num, den) * kRadToDeg;
}

}  // namespace

double great_circle_distance(const ViewingDirection& a, const ViewingDirection& b) noexcept {
    // Fixed argument order keeps the result bit-for-bit symmetric.
    const bool swap = a.pitch() > b.pitch() || (a.pitch() == b.pitch() && a.yaw() > b.yaw());
    return swap ? vincenty(b, a) : vincenty(a, b);
}

Vec3 direction_to_unit_vector(const ViewingDirection& d) noexcept {
    double sy, cy, sp, cp;
    sincos_deg(d.yaw(), sy, cy);
    sincos_deg(d.pitch(), sp, cp);
    return {cp * cy, cp * sy, sp};
}

ViewingDirection unit_vector_to_direction(const Vec3& v) {
    const double h = std::hypot(v[0], v[1]);
    if (h == 0.0 && v[2] == 0.0) fail(ErrorCode::InvalidArgument, "zero vector has no direction");
    double pitch = std::atan2(v[2], h) * kRadToDeg;
    if (pitch > 90.0) pitch = 90.0;
    if (pitch < -90.0) pitch = -90.0;
    const double yaw = h == 0.0 ? 0.0 : std::atan2(v[1], v[0]) * kRadToDeg;
    return {yaw, pitch};
}

double dot(const Vec3& a, const Vec3& b) noexcept { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) noexcept {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& v) noexcept { return std::sqrt(dot(v, v)); }

Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    if (n == 0.0) fail(ErrorCode::InvalidArgument, "cannot normalize a zero vector");
    return {v[0] / n, v[1] / n, v[2] / n};
}

Vec3 rotate(const Mat3& r, const Vec3& v) noexcept {
    return {dot(Vec3{r[0][0], r[0][1], r[0][2]}, v), dot(Vec3{r[1][0], r[1][1], r[1][2]}, v),
            dot(Vec3{r[2][0], r[2][1], r[2][2]}, v)};
}

ViewingDirection rotate(const Mat3& r, const ViewingDirection& d) {
    return unit_vector_to_direction(rotate(r, direction_to_unit_vector(d)));
}

Mat3 rotation_from_euler(double yaw_deg, double pitch_deg, double roll_deg) noexcept {
    double sy, cy, sp, cp, sr, cr;
    sincos_deg(yaw_deg, sy, cy);
    sincos_deg(pitch_deg, sp, cp);
    sincos_deg(roll_deg, sr, cr);
    // Rz(yaw) * Ry(pitch) * Rx(roll)
    return Mat3{{{cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr},
                 {sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr},
                 {-sp, cp * sr, cp * cr}}};
}

}  // namespace tripleview
