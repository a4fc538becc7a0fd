#include "fdlbp/image.hpp"

#include "fdlbp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace fdlbp {

Image::Image(int width, int height, double fill) : width_(width), height_(height) {
    if (width < 0 || height < 0) {
        throw std::invalid_argument("image dimensions must be non-negative");
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Image::Image(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (width < 0 || height < 0) {
        throw std::invalid_argument("image dimensions must be non-negative");
    }
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw std::invalid_argument("image data length does not match width x height");
    }
}

ColorImage::ColorImage(Image red, Image green, Image blue) {
    if (red.width() != green.width() || red.width() != blue.width() ||
        red.height() != green.height() || red.height() != blue.height()) {
        throw std::invalid_argument("colour planes must share dimensions");
    }
    planes_[0] = std::move(red);
    planes_[1] = std::move(green);
    planes_[2] = std::move(blue);
}

Image to_grayscale(const ColorImage& image) {
    Image gray(image.width(), image.height());
    auto r = image.red().data();
    auto g = image.green().data();
    auto b = image.blue().data();
    auto out = gray.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
    }
    return gray;
}

namespace {

struct AxisSample {
    int lo;
    int hi;
    double frac;
};

std::vector<AxisSample> axis_samples(int in_size, int out_size) {
    std::vector<AxisSample> samples(static_cast<std::size_t>(out_size));
    const double scale = static_cast<double>(in_size) / static_cast<double>(out_size);
    for (int o = 0; o < out_size; ++o) {
        double s = (o + 0.5) * scale - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(in_size - 1));
        const int lo = static_cast<int>(std::floor(s));
        const int hi = std::min(lo + 1, in_size - 1);
        samples[static_cast<std::size_t>(o)] = {lo, hi, s - lo};
    }
    return samples;
}

// Exact when a == b, so constant regions stay constant.
inline double lerp(double a, double b, double t) { return a + t * (b - a); }

}  // namespace

Image resize(const Image& image, int target_width, int target_height) {
    if (target_width < 1 || target_height < 1) {
        throw std::invalid_argument("resize target must be at least 1x1");
    }
    if (image.empty()) {
        throw std::invalid_argument("cannot resize an empty image");
    }
    const auto xs = axis_samples(image.width(), target_width);
    const auto ys = axis_samples(image.height(), target_height);
    Image out(target_width, target_height);
    for (int r = 0; r < target_height; ++r) {
        const auto& y = ys[static_cast<std::size_t>(r)];
        auto top = image.row(y.lo);
        auto bottom = image.row(y.hi);
        auto dst = out.row(r);
        for (int c = 0; c < target_width; ++c) {
            const auto& x = xs[static_cast<std::size_t>(c)];
            const double upper = lerp(top[x.lo], top[x.hi], x.frac);
            const double lower = lerp(bottom[x.lo], bottom[x.hi], x.frac);
            dst[c] = lerp(upper, lower, y.frac);
        }
    }
    return out;
}

ColorImage resize(const ColorImage& image, int target_width, int target_height) {
    return ColorImage(resize(image.red(), target_width, target_height),
                      resize(image.green(), target_width, target_height),
                      resize(image.blue(), target_width, target_height));
}

Image pad_replicate(const Image& image, int margin) {
    if (margin < 0) {
        throw std::invalid_argument("padding margin must be non-negative");
    }
    if (margin == 0) {
        return image;
    }
    if (image.empty()) {
        throw std::invalid_argument("cannot pad an empty image");
    }
    const int w = image.width();
    const int h = image.height();
    Image out(w + 2 * margin, h + 2 * margin);
    for (int r = 0; r < out.height(); ++r) {
        const int src_r = std::clamp(r - margin, 0, h - 1);
        auto src = image.row(src_r);
        auto dst = out.row(r);
        for (int c = 0; c < out.width(); ++c) {
            dst[c] = src[std::clamp(c - margin, 0, w - 1)];
        }
    }
    return out;
}

namespace {

void skip_space_and_comments(std::istream& in) {
    for (;;) {
        const int ch = in.peek();
        if (ch == '#') {
            std::string ignored;
            std::getline(in, ignored);
        } else if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\v' || ch == '\f') {
            in.get();
        } else {
            return;
        }
    }
}

int read_header_int(std::istream& in, const char* what) {
    skip_space_and_comments(in);
    long value = -1;
    if (!(in >> value) || value < 0 || value > 1'000'000) {
        throw ImageIoError(std::string("bad PNM header field: ") + what);
    }
    return static_cast<int>(value);
}

struct PnmHeader {
    char kind;
    int width;
    int height;
};

PnmHeader read_header(std::istream& in) {
    char magic[2] = {0, 0};
    if (!in.read(magic, 2) || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6')) {
        throw ImageIoError("not a binary PGM/PPM file (expected P5 or P6)");
    }
    PnmHeader header{magic[1], 0, 0};
    header.width = read_header_int(in, "width");
    header.height = read_header_int(in, "height");
    const int maxval = read_header_int(in, "maxval");
    if (header.width == 0 || header.height == 0) {
        throw ImageIoError("PNM image has zero size");
    }
    if (maxval < 1 || maxval > 255) {
        throw ImageIoError("only 8-bit PNM images are supported");
    }
    // Exactly one whitespace byte separates the header from the raster.
    in.get();
    return header;
}

std::vector<unsigned char> read_raster(std::istream& in, std::size_t bytes) {
    std::vector<unsigned char> raw(bytes);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes))) {
        throw ImageIoError("PNM raster is truncated");
    }
    return raw;
}

unsigned char to_byte(double v) {
    return static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

AnyImage read_pnm(std::istream& in) {
    const PnmHeader header = read_header(in);
    const std::size_t pixels = static_cast<std::size_t>(header.width) * static_cast<std::size_t>(header.height);
    if (header.kind == '5') {
        const auto raw = read_raster(in, pixels);
        return Image(header.width, header.height, std::vector<double>(raw.begin(), raw.end()));
    }
    const auto raw = read_raster(in, pixels * 3);
    std::vector<double> planes[3];
    for (auto& p : planes) {
        p.resize(pixels);
    }
    for (std::size_t i = 0; i < pixels; ++i) {
        planes[0][i] = raw[3 * i];
        planes[1][i] = raw[3 * i + 1];
        planes[2][i] = raw[3 * i + 2];
    }
    return ColorImage(Image(header.width, header.height, std::move(planes[0])),
                      Image(header.width, header.height, std::move(planes[1])),
                      Image(header.width, header.height, std::move(planes[2])));
}

Image read_pgm(std::istream& in) {
    auto any = read_pnm(in);
    if (auto* gray = std::get_if<Image>(&any)) {
        return std::move(*gray);
    }
    throw ImageIoError("expected a P5 (grayscale) image");
}

ColorImage read_ppm(std::istream& in) {
    auto any = read_pnm(in);
    if (auto* color = std::get_if<ColorImage>(&any)) {
        return std::move(*color);
    }
    throw ImageIoError("expected a P6 (colour) image");
}

AnyImage load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ImageIoError("cannot open image: " + path.string());
    }
    try {
        return read_pnm(in);
    } catch (const ImageIoError& e) {
        throw ImageIoError(path.string() + ": " + e.what());
    }
}

void write_pgm(std::ostream& out, const Image& image) {
    out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
    std::vector<unsigned char> raw;
    raw.reserve(image.data().size());
    for (double v : image.data()) {
        raw.push_back(to_byte(v));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

void write_ppm(std::ostream& out, const ColorImage& image) {
    out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
    const std::size_t pixels = image.red().data().size();
    std::vector<unsigned char> raw(pixels * 3);
    for (std::size_t i = 0; i < pixels; ++i) {
        raw[3 * i] = to_byte(image.red().data()[i]);
        raw[3 * i + 1] = to_byte(image.green().data()[i]);
        raw[3 * i + 2] = to_byte(image.blue().data()[i]);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

void save_pgm(const std::filesystem::path& path, const Image& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ImageIoError("cannot write image: " + path.string());
    }
    write_pgm(out, image);
}

void save_ppm(const std::filesystem::path& path, const ColorImage& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ImageIoError("cannot write image: " + path.string());
    }
    write_ppm(out, image);
}

}  // namespace fdlbp
