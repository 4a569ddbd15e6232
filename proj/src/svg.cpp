#include "qpass/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace qpass::svg {

namespace {

constexpr double kWidth = 525.0;   // 105 m at 5 px/m
constexpr double kHeight = 340.0;  // 68 m
constexpr double kMargin = 20.0;
constexpr double kTitleBand = 24.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    std::string s = buf;
    if (s == "-0.00") s = "0.00";
    return s;
}

double px(double x) { return kMargin + x / 100.0 * kWidth; }
double py(double y) { return kTitleBand + kMargin + y / 100.0 * kHeight; }

std::string escape(const std::string& text) {
    std::string out;
    for (char ch : text) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(ch);
        }
    }
    return out;
}

class Document {
public:
    Document(double extra_height, const std::string& title) {
        const double w = kWidth + 2 * kMargin;
        const double h = kHeight + 2 * kMargin + kTitleBand + extra_height;
        out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
             << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
             << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n"
             << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" << num(w) << "\" height=\"" << num(h)
             << "\" fill=\"#ffffff\"/>\n";
        if (!title.empty())
            out_ << "<text class=\"title\" x=\"" << num(kMargin) << "\" y=\"" << num(kMargin)
                 << "\" font-family=\"sans-serif\" font-size=\"14\">" << escape(title) << "</text>\n";
    }

    std::ostringstream& out() { return out_; }

    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

private:
    std::ostringstream out_;
};

void pitch_markings(std::ostringstream& o) {
    auto rect = [&](double x0, double y0, double x1, double y1) {
        o << "<rect class=\"marking\" x=\"" << num(px(x0)) << "\" y=\"" << num(py(y0)) << "\" width=\""
          << num(px(x1) - px(x0)) << "\" height=\"" << num(py(y1) - py(y0))
          << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";
    };
    o << "<g class=\"pitch\">\n";
    rect(0, 0, 100, 100);
    o << "<line class=\"marking\" x1=\"" << num(px(50)) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(px(50))
      << "\" y2=\"" << num(py(100)) << "\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";
    o << "<circle class=\"marking\" cx=\"" << num(px(50)) << "\" cy=\"" << num(py(50)) << "\" r=\""
      << num(9.15 / 105.0 * kWidth) << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";
    // penalty areas 16.5 m x 40.32 m, goal areas 5.5 m x 18.32 m
    const double box_x = 16.5 / 105.0 * 100.0, box_y = 40.32 / 68.0 * 100.0;
    const double six_x = 5.5 / 105.0 * 100.0, six_y = 18.32 / 68.0 * 100.0;
    rect(0, 50 - box_y / 2, box_x, 50 + box_y / 2);
    rect(100 - box_x, 50 - box_y / 2, 100, 50 + box_y / 2);
    rect(0, 50 - six_y / 2, six_x, 50 + six_y / 2);
    rect(100 - six_x, 50 - six_y / 2, 100, 50 + six_y / 2);
    o << "</g>\n";
}

void polygon(std::ostringstream& o, const Polygon& poly, const std::string& cls, const std::string& fill,
             std::size_t cluster) {
    o << "<polygon class=\"" << cls << "\" data-cluster=\"" << cluster << "\" points=\"";
    for (std::size_t i = 0; i < poly.size(); ++i) o << (i ? " " : "") << num(px(poly[i].x)) << ',' << num(py(poly[i].y));
    o << "\" fill=\"" << fill << "\" stroke=\"#ffffff\" stroke-width=\"0.75\"/>\n";
}

Rgb categorical(std::size_t k) {
    // golden-angle hue walk, fixed saturation and lightness
    const double h = std::fmod(static_cast<double>(k) * 137.508, 360.0) / 60.0;
    const double s = 0.55, l = 0.62;
    const double chroma = (1 - std::abs(2 * l - 1)) * s;
    const double x = chroma * (1 - std::abs(std::fmod(h, 2.0) - 1));
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(h)) {
        case 0: r = chroma; g = x; break;
        case 1: r = x; g = chroma; break;
        case 2: g = chroma; b = x; break;
        case 3: g = x; b = chroma; break;
        case 4: r = x; b = chroma; break;
        default: r = chroma; b = x; break;
    }
    const double m = l - chroma / 2;
    auto to8 = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255)); };
    return {to8(r + m), to8(g + m), to8(b + m)};
}

/// Keeps the part of `poly` on the side of the bisector closer to `a` than to `b`.
Polygon clip_half_plane(const Polygon& poly, Point a, Point b) {
    const double nx = b.x - a.x, ny = b.y - a.y;
    const double mid = (b.x * b.x + b.y * b.y - a.x * a.x - a.y * a.y) / 2.0;
    auto side = [&](Point p) { return nx * p.x + ny * p.y - mid; };  // <= 0 keeps
    Polygon out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point p = poly[i], q = poly[(i + 1) % poly.size()];
        const double sp = side(p), sq = side(q);
        if (sp <= 0) out.push_back(p);
        if ((sp < 0 && sq > 0) || (sp > 0 && sq < 0)) {
            const double t = sp / (sp - sq);
            out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
        }
    }
    return out;
}

const Clustering& clustering_of(const TeamPartition& partition, Side side) {
    return side == Side::own ? partition.own : partition.opp;
}

void legend(std::ostringstream& o) {
    const double y = py(100) + 14;
    o << "<defs><linearGradient id=\"diverging\" x1=\"0\" x2=\"1\" y1=\"0\" y2=\"0\">"
      << "<stop offset=\"0\" stop-color=\"" << diverging_color(-1).hex() << "\"/>"
      << "<stop offset=\"0.5\" stop-color=\"" << diverging_color(0).hex() << "\"/>"
      << "<stop offset=\"1\" stop-color=\"" << diverging_color(1).hex() << "\"/>"
      << "</linearGradient></defs>\n";
    o << "<g class=\"legend\"><rect x=\"" << num(px(30)) << "\" y=\"" << num(y) << "\" width=\""
      << num(px(70) - px(30)) << "\" height=\"10\" fill=\"url(#diverging)\" stroke=\"#333333\" stroke-width=\"0.5\"/>\n";
    const char* labels[] = {"-1", "0", "+1"};
    for (int i = 0; i < 3; ++i)
        o << "<text x=\"" << num(px(30 + 20.0 * i)) << "\" y=\"" << num(y + 24)
          << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << labels[i] << "</text>\n";
    o << "</g>\n";
}

}  // namespace

std::string Rgb::hex() const {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

Rgb diverging_color(double value) {
    const double v = std::clamp(std::isfinite(value) ? value : 0.0, -1.0, 1.0);
    // white -> (33, 102, 172) for negatives, white -> (178, 24, 43) for positives
    const double t = std::abs(v);
    const double r = v < 0 ? 33 : 178, g = v < 0 ? 102 : 24, b = v < 0 ? 172 : 43;
    auto mix = [t](double end) { return static_cast<int>(std::lround(255.0 + t * (end - 255.0))); };
    return {mix(r), mix(g), mix(b)};
}

std::vector<Polygon> voronoi_cells(std::span<const Point> sites) {
    const Polygon pitch = {{0, 0}, {100, 0}, {100, 100}, {0, 100}};
    std::vector<Polygon> cells;
    cells.reserve(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        Polygon cell = pitch;
        for (std::size_t j = 0; j < sites.size() && !cell.empty(); ++j) {
            if (j == i || sites[j] == sites[i]) continue;
            cell = clip_half_plane(cell, sites[i], sites[j]);
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

std::vector<Point> centroid_sites(const Clustering& cl) {
    const auto raw = cl.raw_centroids();
    std::vector<Point> sites;
    for (Eigen::Index k = 0; k < raw.rows(); ++k) sites.push_back(clamp_to_pitch({raw(k, 0), raw(k, 1)}));
    return sites;
}

std::string render_partition_map(const TeamPartition& partition, Side side, const std::string& title) {
    Document doc(0, title);
    auto& o = doc.out();
    const auto sites = centroid_sites(clustering_of(partition, side));
    const auto cells = voronoi_cells(sites);
    o << "<g class=\"regions\">\n";
    for (std::size_t k = 0; k < cells.size(); ++k) polygon(o, cells[k], "region", categorical(k).hex(), k);
    o << "</g>\n";
    pitch_markings(o);
    return doc.finish();
}

std::string render_value_heatmap(const TeamPartition& partition, const FieldValues& fv, Side side,
                                 const std::string& title) {
    Document doc(40, title);
    auto& o = doc.out();
    const auto sites = centroid_sites(clustering_of(partition, side));
    const auto cells = voronoi_cells(sites);
    o << "<g class=\"regions\">\n";
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const double v = side == Side::own ? fv.own(k) : fv.opp(k);
        polygon(o, cells[k], "region", diverging_color(v).hex(), k);
    }
    o << "</g>\n";
    pitch_markings(o);
    legend(o);
    return doc.finish();
}

std::string render_pass_trajectories(std::span<const QPassRecord> records, const std::string& title) {
    Document doc(0, title);
    auto& o = doc.out();
    o << "<defs><marker id=\"head\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" "
         "markerHeight=\"6\" orient=\"auto\"><path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#222222\"/></marker></defs>\n";
    pitch_markings(o);
    o << "<g class=\"passes\">\n";
    for (const auto& r : records) {
        const auto& p = r.pass;
        const std::string color = r.qpass >= 0 ? "#b2182b" : "#2166ac";
        if (p.start == p.end) {
            o << "<circle class=\"arrow degenerate\" cx=\"" << num(px(p.start.x)) << "\" cy=\"" << num(py(p.start.y))
              << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
            continue;
        }
        o << "<line class=\"arrow " << (r.successful ? "successful" : "unsuccessful") << "\" x1=\""
          << num(px(p.start.x)) << "\" y1=\"" << num(py(p.start.y)) << "\" x2=\"" << num(px(p.end.x)) << "\" y2=\""
          << num(py(p.end.y)) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
        if (!r.successful) o << " stroke-dasharray=\"4 3\"";
        o << " marker-end=\"url(#head)\"/>\n";
    }
    o << "</g>\n";
    return doc.finish();
}

std::string render_cdf(const UnsuccessfulCdf& cdf, const std::string& title) {
    Document doc(0, title);
    auto& o = doc.out();
    double lo = -0.1, hi = 0.1;
    for (const auto& [g, s] : cdf.groups) {
        if (s.points.empty()) continue;
        lo = std::min(lo, s.points.front().first);
        hi = std::max(hi, s.points.back().first);
    }
    auto ax = [&](double v) { return kMargin + (v - lo) / (hi - lo) * kWidth; };
    auto ay = [&](double f) { return kTitleBand + kMargin + (1.0 - f) * kHeight; };

    o << "<g class=\"axes\"><line x1=\"" << num(ax(lo)) << "\" y1=\"" << num(ay(0)) << "\" x2=\"" << num(ax(hi))
      << "\" y2=\"" << num(ay(0)) << "\" stroke=\"#333333\"/>\n<line x1=\"" << num(ax(0)) << "\" y1=\"" << num(ay(0))
      << "\" x2=\"" << num(ax(0)) << "\" y2=\"" << num(ay(1)) << "\" stroke=\"#999999\" stroke-dasharray=\"3 3\"/></g>\n";
    static constexpr const char* colors[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a"};
    int row = 0;
    for (const auto& [g, s] : cdf.groups) {
        const char* color = colors[static_cast<int>(g)];
        o << "<polyline class=\"cdf\" data-position=\"" << position_code(g) << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
        double prev_f = 0.0;
        bool first = true;
        for (const auto& [v, f] : s.points) {
            o << (first ? "" : " ") << num(ax(v)) << ',' << num(ay(prev_f)) << ' ' << num(ax(v)) << ',' << num(ay(f));
            prev_f = f;
            first = false;
        }
        o << "\"/>\n";
        o << "<text x=\"" << num(ax(lo) + 8) << "\" y=\"" << num(ay(1) + 14 * (row + 1))
          << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color << "\">" << position_code(g)
          << ": " << num(100.0 * s.beneficial_fraction) << "% beneficial</text>\n";
        ++row;
    }
    return doc.finish();
}

}  // namespace qpass::svg
