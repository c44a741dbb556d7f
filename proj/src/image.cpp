#include "topofeat/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>

namespace topofeat {

std::size_t BinaryMask::count() const {
    std::size_t c = 0;
    for (auto v : data) c += v;
    return c;
}

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

// --- PGM ------------------------------------------------------------------

// next header token, skipping whitespace and '#' comments
std::string pgm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
        } else if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#')
                tok.push_back(static_cast<char>(in.get()));
            return tok;
        }
    }
    return tok;
}

GrayImage load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    const std::string magic = pgm_token(in);
    const bool ascii = magic == "P2";
    if (!ascii && magic != "P5") fail(path, "not a PGM (P2/P5) file");

    auto read_uint = [&](const char* what) -> long {
        const std::string t = pgm_token(in);
        if (t.empty()) fail(path, std::string("truncated PGM header: ") + what);
        try {
            return std::stol(t);
        } catch (...) {
            fail(path, std::string("bad PGM header field: ") + what);
        }
    };

    const long w = read_uint("width");
    const long h = read_uint("height");
    const long maxval = read_uint("maxval");
    if (w <= 0 || h <= 0) fail(path, "bad PGM dimensions");
    if (maxval <= 0 || maxval > 65535) fail(path, "unsupported bit depth (maxval)");

    GrayImage img;
    img.width = static_cast<std::size_t>(w);
    img.height = static_cast<std::size_t>(h);
    img.bit_depth_origin = maxval <= 255 ? 8 : 16;
    img.data.resize(img.pixels());
    const double scale = 1.0 / static_cast<double>(maxval);

    if (ascii) {
        for (std::size_t i = 0; i < img.pixels(); ++i) {
            const std::string t = pgm_token(in);
            if (t.empty()) fail(path, "truncated PGM pixel data");
            long v = std::stol(t);
            if (v < 0 || v > maxval) fail(path, "PGM sample out of range");
            img.data[i] = v * scale;
        }
    } else {
        in.get(); // single whitespace byte after maxval, then raw samples
        const int bytes = maxval <= 255 ? 1 : 2;
        std::vector<unsigned char> raw(img.pixels() * bytes);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size())
            fail(path, "truncated PGM pixel data");
        for (std::size_t i = 0; i < img.pixels(); ++i) {
            const unsigned v = bytes == 1 ? raw[i]
                                          : (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1];
            if (v > static_cast<unsigned>(maxval)) fail(path, "PGM sample out of range");
            img.data[i] = v * scale;
        }
    }
    return img;
}

// --- PNG (libpng, classic API; grayscale 8/16-bit only) --------------------

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

GrayImage load_png(const std::filesystem::path& path) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail(path, "cannot open");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(path, "png init failed");
    }

    std::vector<png_bytep> row_ptrs;
    std::vector<unsigned char> raw;
    GrayImage img;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "corrupt or unreadable PNG");
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);
    if (color_type != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "multi-channel PNG input (need single-channel grayscale)");
    }
    if (bit_depth != 8 && bit_depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported PNG bit depth " + std::to_string(bit_depth));
    }

    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    img.width = png_get_image_width(png, info);
    img.height = png_get_image_height(png, info);
    img.bit_depth_origin = bit_depth;
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    raw.resize(rowbytes * img.height);
    row_ptrs.resize(img.height);
    for (std::size_t r = 0; r < img.height; ++r) row_ptrs[r] = raw.data() + r * rowbytes;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    img.data.resize(img.pixels());
    const double scale = bit_depth == 8 ? 1.0 / 255.0 : 1.0 / 65535.0;
    for (std::size_t r = 0; r < img.height; ++r) {
        const unsigned char* row = raw.data() + r * rowbytes;
        for (std::size_t c = 0; c < img.width; ++c) {
            const unsigned v = bit_depth == 8 ? row[c]
                                              : (unsigned(row[2 * c]) << 8) | row[2 * c + 1];
            img.data[r * img.width + c] = v * scale;
        }
    }
    return img;
}

bool has_png_signature(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    unsigned char sig[8] = {};
    in.read(reinterpret_cast<char*>(sig), 8);
    return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

} // namespace

GrayImage load_gray(const std::filesystem::path& path) {
    if (has_png_signature(path)) return load_png(path);
    return load_pgm(path);
}

BinaryMask threshold_top_fraction(const GrayImage& img, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("threshold_top_fraction: fraction must be in (0,1]");
    if (img.pixels() == 0)
        throw std::invalid_argument("threshold_top_fraction: empty image");

    const std::size_t n = img.pixels();
    std::size_t k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, 1, n);

    // threshold = k-th largest intensity; >= includes all ties
    std::vector<double> sorted(img.data);
    std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end(), std::greater<>());
    const double thresh = sorted[k - 1];

    BinaryMask mask;
    mask.width = img.width;
    mask.height = img.height;
    mask.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) mask.data[i] = img.data[i] >= thresh ? 1 : 0;
    return mask;
}

PointCloud resize_pointcloud(const GrayImage& img, std::size_t grid) {
    if (grid == 0) throw std::invalid_argument("resize_pointcloud: grid must be positive");
    if (grid > img.width || grid > img.height)
        throw std::invalid_argument("resize_pointcloud: grid exceeds image size");

    const std::size_t bw = img.width / grid;
    const std::size_t bh = img.height / grid;

    PointCloud pc;
    pc.source = CloudSource::resize;
    for (std::size_t br = 0; br < grid; ++br) {
        const std::size_t r0 = br * bh;
        const std::size_t r1 = (br + 1 == grid) ? img.height : (br + 1) * bh;
        for (std::size_t bc = 0; bc < grid; ++bc) {
            const std::size_t c0 = bc * bw;
            const std::size_t c1 = (bc + 1 == grid) ? img.width : (bc + 1) * bw;
            double sum = 0.0;
            for (std::size_t r = r0; r < r1; ++r)
                for (std::size_t c = c0; c < c1; ++c) sum += img.at(r, c);
            const double avg = sum / static_cast<double>((r1 - r0) * (c1 - c0));
            if (avg > kNonzeroEps)
                pc.points.push_back({static_cast<double>(bc) + 0.5, static_cast<double>(br) + 0.5});
        }
    }
    return pc;
}

ComponentLabels label_components_8(const BinaryMask& mask) {
    const std::size_t w = mask.width, h = mask.height;
    ComponentLabels out;
    out.label.assign(w * h, 0);
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < w * h; ++start) {
        if (!mask.data[start] || out.label[start]) continue;
        const std::uint32_t id = ++out.count;
        stack.push_back(start);
        out.label[start] = id;
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            const std::size_t r = p / w, c = p % w;
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    const std::size_t nr = r + static_cast<std::size_t>(dr);
                    const std::size_t nc = c + static_cast<std::size_t>(dc);
                    if (nr >= h || nc >= w) continue; // unsigned wrap covers negatives
                    const std::size_t q = nr * w + nc;
                    if (mask.data[q] && !out.label[q]) {
                        out.label[q] = id;
                        stack.push_back(q);
                    }
                }
            }
        }
    }
    return out;
}

PointCloud contour_pointcloud(const GrayImage& img, double fraction, std::size_t min_area) {
    const BinaryMask mask = threshold_top_fraction(img, fraction);
    const ComponentLabels labels = label_components_8(mask);

    struct Acc {
        double sx = 0, sy = 0;
        std::size_t n = 0;
    };
    std::vector<Acc> acc(labels.count);
    for (std::size_t r = 0; r < mask.height; ++r) {
        for (std::size_t c = 0; c < mask.width; ++c) {
            const std::uint32_t id = labels.label[r * mask.width + c];
            if (!id) continue;
            Acc& a = acc[id - 1];
            a.sx += static_cast<double>(c);
            a.sy += static_cast<double>(r);
            a.n += 1;
        }
    }

    PointCloud pc;
    pc.source = CloudSource::contour;
    for (const Acc& a : acc) {
        if (a.n < min_area) continue;
        pc.points.push_back({a.sx / static_cast<double>(a.n), a.sy / static_cast<double>(a.n)});
    }
    return pc;
}

} // namespace topofeat
