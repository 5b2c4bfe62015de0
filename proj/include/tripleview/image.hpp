#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "tripleview/geometry.hpp"

namespace tripleview {

/// Row-major interleaved float image with any number of channels.
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, float fill = 0.0f);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] int channels() const noexcept { return channels_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    [[nodiscard]] float& at(int x, int y, int c = 0) noexcept {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    [[nodiscard]] float at(int x, int y, int c = 0) const noexcept {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    [[nodiscard]] std::span<float> pixels() noexcept { return data_; }
    [[nodiscard]] std::span<const float> pixels() const noexcept { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<float> data_;
};

enum class Sampling { Bilinear, Nearest };

/// A full 360 frame in equirectangular layout (width == 2 * height).
///
/// Pixel (u, v) is centered on yaw = u * 360 / W - 180 and
/// pitch = 90 - v * 180 / H, so the pixel at (W/2, H/2) is exactly yaw 0,
/// pitch 0 and row 0 is the north pole.
struct EquirectFrame {
    Image image;
    long frame_id = 0;

    void validate() const;
};

enum class CubeFace { Front = 0, Back, Left, Right, Up, Down };

inline constexpr std::array<CubeFace, 6> kCubeFaces = {CubeFace::Front, CubeFace::Back, CubeFace::Left,
                                                       CubeFace::Right, CubeFace::Up,   CubeFace::Down};

const char* face_name(CubeFace face) noexcept;

/// Viewing direction at the center of each face.
ViewingDirection face_center(CubeFace face) noexcept;

struct CubemapFaces {
    std::array<Image, 6> faces;
    int face_size = 0;

    [[nodiscard]] const Image& face(CubeFace f) const noexcept { return faces[static_cast<int>(f)]; }
    [[nodiscard]] Image& face(CubeFace f) noexcept { return faces[static_cast<int>(f)]; }
};

/// Samples the equirectangular image at a direction. Yaw wraps, pitch clamps
/// at the first and last rows.
void sample_equirect(const Image& equirect, const ViewingDirection& d, Sampling sampling, std::span<float> out);

CubemapFaces equirect_to_cubemap(const EquirectFrame& frame, int face_size, Sampling sampling = Sampling::Bilinear);

/// Resamples a cubemap back to an equirectangular image of the given height.
Image cubemap_to_equirect(const CubemapFaces& cube, int height, Sampling sampling = Sampling::Bilinear);

/// Gnomonic (rectilinear) view centered on `center`. `fov_deg` is the
/// horizontal field of view; pixels are square.
Image extract_viewport(const EquirectFrame& frame, const ViewingDirection& center, double fov_deg, int out_w,
                       int out_h, Sampling sampling = Sampling::Bilinear);

/// Peak signal-to-noise ratio in dB for images with samples in [0, 1],
/// restricted to rows [row_begin, row_end).
double psnr(const Image& a, const Image& b, int row_begin, int row_end);

/// Binary PPM (P6) I/O, 8-bit, 3 channels. Samples map to [0, 1].
Image read_ppm(const std::filesystem::path& path);
void write_ppm(const Image& image, const std::filesystem::path& path);

}  // namespace tripleview
