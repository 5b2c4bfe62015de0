#include "tripleview/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "tripleview/error.hpp"

namespace tripleview {

Image::Image(int width, int height, int channels, float fill) : width_(width), height_(height), channels_(channels) {
    if (width < 1 || height < 1 || channels < 1) {
        fail(ErrorCode::InvalidArgument, "image dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

void EquirectFrame::validate() const {
    if (image.empty()) fail(ErrorCode::InvalidArgument, "equirectangular frame is empty");
    if (image.width() != 2 * image.height()) {
        std::ostringstream msg;
        msg << "equirectangular frame must be 2:1, got " << image.width() << "x" << image.height();
        fail(ErrorCode::InvalidArgument, msg.str());
    }
    if (frame_id < 0) fail(ErrorCode::InvalidArgument, "frame id must be non-negative");
}

namespace {

struct FaceBasis {
    Vec3 forward;
    Vec3 right;
    Vec3 up;
};

// Matches extract_viewport at each face center with a 90 degree FoV.
constexpr std::array<FaceBasis, 6> kFaceBasis = {{
    {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},    // front
    {{-1, 0, 0}, {0, -1, 0}, {0, 0, 1}},  // back
    {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}},   // left
    {{0, 1, 0}, {-1, 0, 0}, {0, 0, 1}},   // right
    {{0, 0, 1}, {0, 1, 0}, {-1, 0, 0}},   // up
    {{0, 0, -1}, {0, 1, 0}, {1, 0, 0}},   // down
}};

int wrap_index(int i, int n) noexcept {
    const int r = i % n;
    return r < 0 ? r + n : r;
}

void sample_equirect_vec(const Image& img, const Vec3& d, Sampling sampling, std::span<float> out) {
    const int w = img.width();
    const int h = img.height();
    const double yaw = std::atan2(d[1], d[0]) * kRadToDeg;
    const double pitch = std::atan2(d[2], std::hypot(d[0], d[1])) * kRadToDeg;
    const double x = (yaw + 180.0) / 360.0 * w;
    const double y = std::clamp((90.0 - pitch) / 180.0 * h, 0.0, static_cast<double>(h - 1));
    const int channels = img.channels();

    if (sampling == Sampling::Nearest) {
        const int xi = wrap_index(static_cast<int>(std::lround(x)), w);
        const int yi = std::min(static_cast<int>(std::lround(y)), h - 1);
        for (int c = 0; c < channels; ++c) out[c] = img.at(xi, yi, c);
        return;
    }

    const double xf = std::floor(x);
    const double yf = std::floor(y);
    const double fx = x - xf;
    const double fy = y - yf;
    const int x0 = wrap_index(static_cast<int>(xf), w);
    const int x1 = wrap_index(x0 + 1, w);
    const int y0 = static_cast<int>(yf);
    const int y1 = std::min(y0 + 1, h - 1);
    for (int c = 0; c < channels; ++c) {
        const double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
        const double bottom = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
        out[c] = static_cast<float>((1.0 - fy) * top + fy * bottom);
    }
}

void sample_face(const Image& face, double px, double py, Sampling sampling, std::span<float> out) {
    const int s = face.width();
    px = std::clamp(px, 0.0, static_cast<double>(s - 1));
    py = std::clamp(py, 0.0, static_cast<double>(s - 1));
    if (sampling == Sampling::Nearest) {
        const int xi = static_cast<int>(std::lround(px));
        const int yi = static_cast<int>(std::lround(py));
        for (int c = 0; c < face.channels(); ++c) out[c] = face.at(xi, yi, c);
        return;
    }
    const int x0 = static_cast<int>(std::floor(px));
    const int y0 = static_cast<int>(std::floor(py));
    const int x1 = std::min(x0 + 1, s - 1);
    const int y1 = std::min(y0 + 1, s - 1);
    const double fx = px - x0;
    const double fy = py - y0;
    for (int c = 0; c < face.channels(); ++c) {
        const double top = (1.0 - fx) * face.at(x0, y0, c) + fx * face.at(x1, y0, c);
        const double bottom = (1.0 - fx) * face.at(x0, y1, c) + fx * face.at(x1, y1, c);
        out[c] = static_cast<float>((1.0 - fy) * top + fy * bottom);
    }
}

// Renders a pinhole view: pixel (i, j) looks along
// forward + a * right - b * up with a, b spanning [-half_w, half_w] x [-half_h, half_h].
Image render_pinhole(const Image& src, const FaceBasis& basis, double half_w, double half_h, int out_w, int out_h,
                     Sampling sampling) {
    Image out(out_w, out_h, src.channels());
    std::vector<float> px(src.channels());
    for (int j = 0; j < out_h; ++j) {
        const double b = (2.0 * (j + 0.5) / out_h - 1.0) * half_h;
        for (int i = 0; i < out_w; ++i) {
            const double a = (2.0 * (i + 0.5) / out_w - 1.0) * half_w;
            const Vec3 d = {basis.forward[0] + a * basis.right[0] - b * basis.up[0],
                            basis.forward[1] + a * basis.right[1] - b * basis.up[1],
                            basis.forward[2] + a * basis.right[2] - b * basis.up[2]};
            sample_equirect_vec(src, d, sampling, px);
            for (int c = 0; c < src.channels(); ++c) out.at(i, j, c) = px[c];
        }
    }
    return out;
}

}  // namespace

const char* face_name(CubeFace face) noexcept {
    switch (face) {
        case CubeFace::Front: return "front";
        case CubeFace::Back: return "back";
        case CubeFace::Left: return "left";
        case CubeFace::Right: return "right";
        case CubeFace::Up: return "up";
        case CubeFace::Down: return "down";
    }
    return "?";
}

ViewingDirection face_center(CubeFace face) noexcept {
    switch (face) {
        case CubeFace::Front: return {0.0, 0.0};
        case CubeFace::Back: return {180.0, 0.0};
        case CubeFace::Left: return {-90.0, 0.0};
        case CubeFace::Right: return {90.0, 0.0};
        case CubeFace::Up: return {0.0, 90.0};
        case CubeFace::Down: return {0.0, -90.0};
    }
    return {};
}

void sample_equirect(const Image& equirect, const ViewingDirection& d, Sampling sampling, std::span<float> out) {
    if (out.size() < static_cast<std::size_t>(equirect.channels())) {
        fail(ErrorCode::InvalidArgument, "output span smaller than channel count");
    }
    sample_equirect_vec(equirect, direction_to_unit_vector(d), sampling, out);
}

CubemapFaces equirect_to_cubemap(const EquirectFrame& frame, int face_size, Sampling sampling) {
    frame.validate();
    if (face_size < 1) fail(ErrorCode::InvalidArgument, "face size must be at least 1");
    CubemapFaces cube;
    cube.face_size = face_size;
    for (CubeFace f : kCubeFaces) {
        cube.face(f) = render_pinhole(frame.image, kFaceBasis[static_cast<int>(f)], 1.0, 1.0, face_size, face_size,
                                      sampling);
    }
    return cube;
}

Image cubemap_to_equirect(const CubemapFaces& cube, int height, Sampling sampling) {
    if (height < 1) fail(ErrorCode::InvalidArgument, "height must be at least 1");
    const int s = cube.face_size;
    for (const Image& f : cube.faces) {
        if (f.width() != s || f.height() != s) fail(ErrorCode::InvalidArgument, "cubemap faces must be square and equal");
    }
    const int channels = cube.faces[0].channels();
    const int width = 2 * height;
    Image out(width, height, channels);
    std::vector<float> px(channels);
    for (int v = 0; v < height; ++v) {
        const double pitch = 90.0 - v * 180.0 / height;
        for (int u = 0; u < width; ++u) {
            const double yaw = u * 360.0 / width - 180.0;
            const Vec3 d = direction_to_unit_vector({yaw, pitch});
            const double ax = std::abs(d[0]);
            const double ay = std::abs(d[1]);
            const double az = std::abs(d[2]);
            CubeFace face;
            if (ax >= ay && ax >= az) {
                face = d[0] > 0 ? CubeFace::Front : CubeFace::Back;
            } else if (ay >= az) {
                face = d[1] > 0 ? CubeFace::Right : CubeFace::Left;
            } else {
                face = d[2] > 0 ? CubeFace::Up : CubeFace::Down;
            }
            const FaceBasis& basis = kFaceBasis[static_cast<int>(face)];
            const double depth = dot(d, basis.forward);
            const double a = dot(d, basis.right) / depth;
            const double b = -dot(d, basis.up) / depth;
            sample_face(cube.face(face), (a + 1.0) * 0.5 * s - 0.5, (b + 1.0) * 0.5 * s - 0.5, sampling, px);
            for (int c = 0; c < channels; ++c) out.at(u, v, c) = px[c];
        }
    }
    return out;
}

Image extract_viewport(const EquirectFrame& frame, const ViewingDirection& center, double fov_deg, int out_w,
                       int out_h, Sampling sampling) {
    frame.validate();
    if (!(fov_deg > 0.0 && fov_deg < 180.0)) {
        std::ostringstream msg;
        msg << "field of view " << fov_deg << " outside (0, 180)";
        fail(ErrorCode::InvalidArgument, msg.str());
    }
    if (out_w < 1 || out_h < 1) fail(ErrorCode::InvalidArgument, "viewport size must be positive");
    FaceBasis basis;
    basis.forward = direction_to_unit_vector(center);
    basis.right = direction_to_unit_vector({center.yaw() + 90.0, 0.0});
    basis.up = cross(basis.forward, basis.right);
    const double half_w = std::tan(fov_deg * 0.5 * kDegToRad);
    const double half_h = half_w * out_h / out_w;
    return render_pinhole(frame.image, basis, half_w, half_h, out_w, out_h, sampling);
}

double psnr(const Image& a, const Image& b, int row_begin, int row_end) {
    if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels()) {
        fail(ErrorCode::InvalidArgument, "psnr needs images of equal shape");
    }
    row_begin = std::max(row_begin, 0);
    row_end = std::min(row_end, a.height());
    if (row_begin >= row_end) fail(ErrorCode::InvalidArgument, "psnr row range is empty");
    double sum = 0.0;
    std::size_t n = 0;
    for (int y = row_begin; y < row_end; ++y) {
        for (int x = 0; x < a.width(); ++x) {
            for (int c = 0; c < a.channels(); ++c) {
                const double d = static_cast<double>(a.at(x, y, c)) - b.at(x, y, c);
                sum += d * d;
                ++n;
            }
        }
    }
    const double mse = sum / static_cast<double>(n);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

namespace {

std::string next_token(std::istream& in) {
    std::string token;
    while (in) {
        const int ch = in.peek();
        if (ch == '#') {
            std::string skip;
            std::getline(in, skip);
        } else if (std::isspace(ch)) {
            in.get();
        } else {
            break;
        }
    }
    in >> token;
    return token;
}

}  // namespace

Image read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
    if (next_token(in) != "P6") fail(ErrorCode::Parse, path.string() + ": not a binary PPM (P6)");
    int w = 0;
    int h = 0;
    int maxval = 0;
    try {
        w = std::stoi(next_token(in));
        h = std::stoi(next_token(in));
        maxval = std::stoi(next_token(in));
    } catch (const std::exception&) {
        fail(ErrorCode::Parse, path.string() + ": malformed PPM header");
    }
    if (w < 1 || h < 1 || maxval < 1 || maxval > 255) fail(ErrorCode::Parse, path.string() + ": unsupported PPM header");
    in.get();
    std::vector<unsigned char> bytes(static_cast<std::size_t>(w) * h * 3);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) fail(ErrorCode::Parse, path.string() + ": truncated PPM");
    Image img(w, h, 3);
    auto px = img.pixels();
    for (std::size_t i = 0; i < bytes.size(); ++i) px[i] = static_cast<float>(bytes[i]) / static_cast<float>(maxval);
    return img;
}

void write_ppm(const Image& image, const std::filesystem::path& path) {
    if (image.channels() != 3 && image.channels() != 1) fail(ErrorCode::InvalidArgument, "PPM output needs 1 or 3 channels");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
    out << "P6\n" << image.width() << " " << image.height() << "\n255\n";
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            for (int c = 0; c < 3; ++c) {
                const float v = image.at(x, y, image.channels() == 3 ? c : 0);
                out.put(static_cast<char>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)));
            }
        }
    }
    if (!out) fail(ErrorCode::Io, "failed writing " + path.string());
}

}  // namespace tripleview
