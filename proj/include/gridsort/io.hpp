#pragma once

#include "core.hpp"
#include "metrics.hpp"

#include <json.hpp>
#ifdef GRIDSORT_HAS_LIBPNG
#include <png.h>
#endif

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace gridsort {

namespace detail {

inline double parse_number(std::string_view tok, std::size_t row) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (*(last - 1) == ' ' || *(last - 1) == '\t' ||
                            *(last - 1) == '\r'))
        --last;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw parse_error("row " + std::to_string(row) + ": non-numeric field '" +
                          std::string(tok) + "'");
    return v;
}

} // namespace detail

/// Loads a dataset from CSV (one vector per row, optional trailing
/// `label=<str>` field) or JSON (array of vectors or of
/// {"vector": [...], "label"?, "path"?}). Image paths, when present, are
/// returned through `paths`.
inline Dataset load_vectors(const std::string& path,
                            std::vector<std::string>* paths = nullptr) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open vector file: " + path);

    // Sniff: a JSON document starts with '[' or '{'.
    in >> std::ws;
    const char first = static_cast<char>(in.peek());

    std::vector<std::vector<double>> rows;
    std::vector<std::optional<std::string>> row_labels;

    if (first == '[' || first == '{') {
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const std::exception& e) {
            throw parse_error(path + ": bad JSON: " + e.what());
        }
        if (!doc.is_array()) throw parse_error(path + ": expected a JSON array");
        std::size_t row = 0;
        for (const auto& entry : doc) {
            ++row;
            const nlohmann::json* vec = &entry;
            std::optional<std::string> label;
            std::string img_path;
            if (entry.is_object()) {
                if (!entry.contains("vector"))
                    throw parse_error(path + " row " + std::to_string(row) +
                                      ": missing \"vector\"");
                vec = &entry["vector"];
                if (entry.contains("label"))
                    label = entry["label"].get<std::string>();
                if (entry.contains("path"))
                    img_path = entry["path"].get<std::string>();
            }
            if (!vec->is_array())
                throw parse_error(path + " row " + std::to_string(row) +
                                  ": vector is not an array");
            std::vector<double> v;
            for (const auto& x : *vec) {
                if (!x.is_number())
                    throw parse_error(path + " row " + std::to_string(row) +
                                      ": non-numeric entry");
                v.push_back(x.get<double>());
            }
            rows.push_back(std::move(v));
            row_labels.push_back(std::move(label));
            if (paths) paths->push_back(img_path);
        }
    } else {
        std::string line;
        std::size_t row = 0;
        while (std::getline(in, line)) {
            ++row;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::string stripped = line;
            stripped.erase(0, stripped.find_first_not_of(" \t"));
            if (stripped.empty() || stripped[0] == '#') continue;
            std::vector<double> v;
            std::optional<std::string> label;
            std::size_t pos = 0;
            while (pos <= line.size()) {
                const std::size_t comma = line.find(',', pos);
                const std::string_view tok =
                    std::string_view(line).substr(pos, comma == std::string::npos
                                                           ? std::string::npos
                                                           : comma - pos);
                std::string_view t = tok;
                while (!t.empty() && (t.front() == ' ' || t.front() == '\t'))
                    t.remove_prefix(1);
                if (t.starts_with("label=")) {
                    label = std::string(t.substr(6));
                } else {
                    v.push_back(detail::parse_number(tok, row));
                }
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
            rows.push_back(std::move(v));
            row_labels.push_back(std::move(label));
            if (paths) paths->push_back("");
        }
    }
    if (rows.empty()) throw parse_error(path + ": no vectors");

    const bool any_label =
        std::any_of(row_labels.begin(), row_labels.end(),
                    [](const auto& l) { return l.has_value(); });
    if (any_label) {
        std::vector<std::string> labels;
        labels.reserve(rows.size());
        for (std::size_t r = 0; r < row_labels.size(); ++r) {
            if (!row_labels[r])
                throw parse_error(path + " row " + std::to_string(r + 1) +
                                  ": some rows have labels, this one does not");
            labels.push_back(std::move(*row_labels[r]));
        }
        return Dataset(std::move(rows), std::move(labels));
    }
    return Dataset(std::move(rows));
}

// ---------------------------------------------------------------- arrangement

inline nlohmann::json arrangement_to_json(const Arrangement& arr) {
    nlohmann::json cells = nlohmann::json::array();
    for (int row = 0; row < arr.height(); ++row) {
        for (int col = 0; col < arr.width(); ++col) {
            const int idx = arr.index_at({col, row});
            if (idx < 0) continue;
            cells.push_back({{"col", col}, {"row", row}, {"index", idx}});
        }
    }
    return {{"width", arr.width()}, {"height", arr.height()}, {"cells", cells}};
}

inline void save_arrangement(const std::string& path, const Arrangement& arr) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write " + path);
    out << arrangement_to_json(arr).dump(2) << '\n';
}

inline Arrangement load_arrangement(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open arrangement file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw parse_error(path + ": bad JSON: " + e.what());
    }
    const int w = doc.at("width").get<int>();
    const int h = doc.at("height").get<int>();
    const auto& cells = doc.at("cells");
    std::size_t n = cells.size();
    std::vector<Cell> cell_of(n);
    std::vector<std::uint8_t> seen(n, 0);
    for (const auto& c : cells) {
        const int idx = c.at("index").get<int>();
        if (idx < 0 || static_cast<std::size_t>(idx) >= n)
            throw parse_error(path + ": cell index out of range");
        if (seen[idx]) throw parse_error(path + ": duplicate index");
        seen[idx] = 1;
        cell_of[idx] = {c.at("col").get<int>(), c.at("row").get<int>()};
    }
    return Arrangement(w, h, std::move(cell_of));
}

/// Grid whose active cells are exactly the occupied cells of an arrangement.
inline GridSpec spec_from_arrangement(const Arrangement& arr,
                                      WrapMode wrap = WrapMode::clamp) {
    std::vector<std::uint8_t> mask(
        static_cast<std::size_t>(arr.width()) * arr.height(), 0);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const Cell c = arr.cell_of(i);
        mask[static_cast<std::size_t>(c.row) * arr.width() + c.col] = 1;
    }
    return GridSpec(arr.width(), arr.height(), std::move(mask), wrap);
}

// --------------------------------------------------------------------- report

inline nlohmann::json report_to_json(const QualityReport& rep) {
    nlohmann::json metrics = nlohmann::json::object();
    for (const auto& [name, value] : rep.values) metrics[name] = value;
    nlohmann::json out = {{"metrics", metrics}};
    if (!rep.np_curve.empty()) out["np_curve"] = rep.np_curve;
    return out;
}

// --------------------------------------------------------------------- images

/// Decoded image, interleaved RGB in [0,1].
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> rgb;
};

namespace detail {

inline void skip_pnm_junk(std::istream& in) {
    while (true) {
        const int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

inline bool load_pnm(const std::string& path, Image& img, std::string& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err = "cannot open";
        return false;
    }
    std::string magic;
    in >> magic;
    const bool gray = magic == "P2" || magic == "P5";
    const bool color = magic == "P3" || magic == "P6";
    if (!gray && !color) {
        err = "not a PNM file";
        return false;
    }
    int maxval = 0;
    skip_pnm_junk(in);
    in >> img.width;
    skip_pnm_junk(in);
    in >> img.height;
    skip_pnm_junk(in);
    in >> maxval;
    if (!in || img.width < 1 || img.height < 1 || maxval < 1) {
        err = "bad PNM header";
        return false;
    }
    const std::size_t pixels = static_cast<std::size_t>(img.width) * img.height;
    const std::size_t samples = pixels * (color ? 3 : 1);
    std::vector<double> raw(samples);
    if (magic == "P2" || magic == "P3") {
        for (std::size_t i = 0; i < samples; ++i) {
            long v = 0;
            if (!(in >> v)) {
                err = "truncated PNM data";
                return false;
            }
            raw[i] = static_cast<double>(v) / maxval;
        }
    } else {
        in.get();
        const int bytes = maxval > 255 ? 2 : 1;
        for (std::size_t i = 0; i < samples; ++i) {
            long v = 0;
            for (int b = 0; b < bytes; ++b) {
                const int ch = in.get();
                if (ch == EOF) {
                    err = "truncated PNM data";
                    return false;
                }
                v = (v << 8) | ch;
            }
            raw[i] = static_cast<double>(v) / maxval;
        }
    }
    img.rgb.resize(pixels * 3);
    for (std::size_t i = 0; i < pixels; ++i) {
        if (color) {
            img.rgb[i * 3] = raw[i * 3];
            img.rgb[i * 3 + 1] = raw[i * 3 + 1];
            img.rgb[i * 3 + 2] = raw[i * 3 + 2];
        } else {
            img.rgb[i * 3] = img.rgb[i * 3 + 1] = img.rgb[i * 3 + 2] = raw[i];
        }
    }
    return true;
}

#ifdef GRIDSORT_HAS_LIBPNG
inline bool load_png(const std::string& path, Image& img, std::string& err) {
    png_image pi{};
    pi.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&pi, path.c_str())) {
        err = pi.message;
        return false;
    }
    pi.format = PNG_FORMAT_RGB;
    std::vector<unsigned char> buf(PNG_IMAGE_SIZE(pi));
    if (!png_image_finish_read(&pi, nullptr, buf.data(), 0, nullptr)) {
        err = pi.message;
        png_image_free(&pi);
        return false;
    }
    img.width = static_cast<int>(pi.width);
    img.height = static_cast<int>(pi.height);
    img.rgb.resize(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i)
        img.rgb[i] = static_cast<double>(buf[i]) / 255.0;
    return true;
}
#endif

} // namespace detail

/// Decodes PPM/PGM (and PNG when built with libpng). Returns false with a
/// reason instead of throwing so directory scans can skip bad files.
inline bool load_image(const std::string& path, Image& img, std::string& err) {
    std::string ext = std::filesystem::path(path).extension().string();
    for (char& ch : ext) ch = static_cast<char>(std::tolower(ch));
    if (ext == ".png") {
#ifdef GRIDSORT_HAS_LIBPNG
        return detail::load_png(path, img, err);
#else
        err = "PNG support not built in";
        return false;
#endif
    }
    return detail::load_pnm(path, img, err);
}

// ------------------------------------------------------------------- features

struct FeatureExtraction {
    std::vector<std::vector<double>> vectors;
    std::vector<std::string> paths;
    std::vector<std::string> warnings;
};

/// 48-dim color-layout feature per image: 4x4 downscaled mean RGB,
/// blocks row-major, values in [0,1].
inline std::vector<double> color_layout_features(const Image& img) {
    std::vector<double> out;
    out.reserve(48);
    for (int by = 0; by < 4; ++by) {
        int y0 = by * img.height / 4, y1 = (by + 1) * img.height / 4;
        if (y1 <= y0) {
            y0 = std::min(y0, img.height - 1);
            y1 = y0 + 1;
        }
        for (int bx = 0; bx < 4; ++bx) {
            int x0 = bx * img.width / 4, x1 = (bx + 1) * img.width / 4;
            if (x1 <= x0) {
                x0 = std::min(x0, img.width - 1);
                x1 = x0 + 1;
            }
            double sum[3] = {0.0, 0.0, 0.0};
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x)
                    for (int c = 0; c < 3; ++c)
                        sum[c] +=
                            img.rgb[(static_cast<std::size_t>(y) * img.width + x) *
                                        3 +
                                    c];
            const double count = static_cast<double>((y1 - y0) * (x1 - x0));
            for (double c : sum) out.push_back(c / count);
        }
    }
    return out;
}

/// Scans a directory (sorted by filename) and extracts features per image;
/// undecodable files are skipped with a warning.
inline FeatureExtraction extract_features(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path().string());
    std::sort(files.begin(), files.end());

    FeatureExtraction out;
    for (const std::string& f : files) {
        Image img;
        std::string err;
        if (!load_image(f, img, err)) {
            out.warnings.push_back("skipped " + f + ": " + err);
            continue;
        }
        out.vectors.push_back(color_layout_features(img));
        out.paths.push_back(f);
    }
    if (out.vectors.empty())
        throw invalid_input("extract_features: no decodable images in " + dir);
    return out;
}

// --------------------------------------------------------------------- render

/// SVG with one color swatch per occupied cell (vectors read as RGB).
inline void render_svg_swatches(const std::string& path, const Arrangement& arr,
                                const Dataset& ds, int cell_px = 24) {
    if (ds.dim() != 3)
        throw invalid_input("render: svg swatches need 3-dimensional vectors");
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
        << arr.width() * cell_px << "\" height=\"" << arr.height() * cell_px
        << "\">\n";
    for (int row = 0; row < arr.height(); ++row) {
        for (int col = 0; col < arr.width(); ++col) {
            const int idx = arr.index_at({col, row});
            if (idx < 0) continue; // masked cells stay transparent
            const auto v = ds.vec(idx);
            int rgb[3];
            for (int c = 0; c < 3; ++c)
                rgb[c] = static_cast<int>(
                    std::lround(std::clamp(v[c], 0.0, 1.0) * 255.0));
            char color[8];
            std::snprintf(color, sizeof color, "#%02x%02x%02x", rgb[0], rgb[1],
                          rgb[2]);
            out << "  <rect x=\"" << col * cell_px << "\" y=\"" << row * cell_px
                << "\" width=\"" << cell_px << "\" height=\"" << cell_px
                << "\" fill=\"" << color << "\"/>\n";
        }
    }
    out << "</svg>\n";
}

/// HTML grid of <img> cells; a missing source becomes a placeholder cell
/// and a warning.
inline void render_html_montage(const std::string& path, const Arrangement& arr,
                                const std::vector<std::string>& image_paths,
                                std::vector<std::string>* warnings = nullptr,
                                int cell_px = 96) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write " + path);
    out << "<!DOCTYPE html>\n<html><head><style>\n"
        << ".grid{display:grid;grid-template-columns:repeat(" << arr.width()
        << "," << cell_px << "px);}\n"
        << ".grid img,.grid div{width:" << cell_px << "px;height:" << cell_px
        << "px;object-fit:cover;}\n"
        << ".missing{background:#ddd;}\n.empty{background:none;}\n"
        << "</style></head><body><div class=\"grid\">\n";
    for (int row = 0; row < arr.height(); ++row) {
        for (int col = 0; col < arr.width(); ++col) {
            const int idx = arr.index_at({col, row});
            if (idx < 0) {
                out << "<div class=\"empty\"></div>\n";
                continue;
            }
            const std::string& src =
                static_cast<std::size_t>(idx) < image_paths.size()
                    ? image_paths[idx]
                    : std::string{};
            if (src.empty() || !std::filesystem::exists(src)) {
                out << "<div class=\"missing\"></div>\n";
                if (warnings)
                    warnings->push_back("missing image for index " +
                                        std::to_string(idx));
            } else {
                out << "<img src=\"" << src << "\" alt=\"" << idx << "\"/>\n";
            }
        }
    }
    out << "</div></body></html>\n";
}

} // namespace gridsort
