#pragma once

#include <array>

namespace tripleview {

/// A point on the unit sphere given as (yaw, pitch) in degrees.
///
/// Axis convention: yaw 0 / pitch 0 is the equirectangular image center and
/// maps to +x; yaw grows to the right of the image and towards +y; pitch
/// grows upward towards +z. Yaw is normalized into [-180, 180) on
/// construction, except that an input of exactly +180 is kept as-is. Pitch
/// outside [-90, 90] is rejected.
class ViewingDirection {
public:
    ViewingDirection() = default;
    ViewingDirection(double yaw_deg, double pitch_deg);

    [[nodiscard]] double yaw() const noexcept { return yaw_; }
    [[nodiscard]] double pitch() const noexcept { return pitch_; }
    [[nodiscard]] bool is_pole() const noexcept { return pitch_ == 90.0 || pitch_ == -90.0; }

    /// Same point on the sphere. Both poles compare equal for any yaw, and
    /// yaw -180 equals yaw +180.
    friend bool operator==(const ViewingDirection& a, const ViewingDirection& b) noexcept;

private:
    double yaw_ = 0.0;
    double pitch_ = 0.0;
};

using Vec3 = std::array<double, 3>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

/// Wraps any finite angle into [-180, 180).
double wrap_yaw(double yaw_deg) noexcept;

/// Central angle in degrees, in [0, 180]. Uses the atan2 (Vincenty) form so
/// it stays accurate for nearly identical and nearly antipodal points.
double great_circle_distance(const ViewingDirection& a, const ViewingDirection& b) noexcept;

Vec3 direction_to_unit_vector(const ViewingDirection& d) noexcept;

/// Inverse of direction_to_unit_vector. The input need not be normalized but
/// must be non-zero. At the poles yaw is reported as 0.
ViewingDirection unit_vector_to_direction(const Vec3& v);

double dot(const Vec3& a, const Vec3& b) noexcept;
Vec3 cross(const Vec3& a, const Vec3& b) noexcept;
double norm(const Vec3& v) noexcept;
Vec3 normalized(const Vec3& v);

/// Row-major 3x3 rotation applied as R * v.
using Mat3 = std::array<std::array<double, 3>, 3>;

Vec3 rotate(const Mat3& r, const Vec3& v) noexcept;
ViewingDirection rotate(const Mat3& r, const ViewingDirection& d);

/// Rotation from intrinsic yaw (about z), pitch (about y) and roll (about x)
/// angles in degrees.
Mat3 rotation_from_euler(double yaw_deg, double pitch_deg, double roll_deg) noexcept;

}  // namespace tripleview
