#include "cvxcone/postprocess.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>

#include "cvxcone/errors.hpp"
#include "cvxcone/grid_io.hpp"

namespace cvxcone {

GradientMap gradient_map(const GridFunction& u) {
    GradientMap g;
    g.gx = centered_dx(u.grid) * u.values;
    if (u.grid.dim() == 2) g.gy = centered_dy(u.grid) * u.values;
    return g;
}

Histogram2D gradient_histogram(const GradientMap& g, int bins, Interval range) {
    if (bins < 1) throw InvalidArgument("histogram needs at least one bin");
    if (!(range.hi > range.lo)) throw InvalidArgument("histogram range is empty");
    if (g.gy.size() != g.gx.size()) throw InvalidArgument("histogram needs a 2D gradient map");
    Histogram2D h;
    h.bins = bins;
    h.range = range;
    h.counts.assign(static_cast<std::size_t>(bins) * bins, 0);
    const double width = range.hi - range.lo;
    auto bin_of = [&](double v) {
        if (!(v >= range.lo && v <= range.hi)) return -1;
        int b = static_cast<int>(std::floor((v - range.lo) / width * bins));
        return std::min(b, bins - 1);
    };
    for (Eigen::Index k = 0; k < g.gx.size(); ++k) {
        int ix = bin_of(g.gx[k]);
        int iy = bin_of(g.gy[k]);
        if (ix < 0 || iy < 0) {
            ++h.outside;
            continue;
        }
        ++h.counts[static_cast<std::size_t>(iy * bins + ix)];
    }
    return h;
}

std::vector<double> contour_levels(const GridFunction& u, int count) {
    if (count < 1) throw InvalidArgument("need at least one contour level");
    double lo = u.values.minCoeff();
    double hi = u.values.maxCoeff();
    std::vector<double> levels;
    if (!(hi > lo)) return levels;
    for (int k = 1; k <= count; ++k) levels.push_back(lo + (hi - lo) * k / (count + 1));
    return levels;
}

namespace {

struct Crossing {
    std::int64_t key = 0;
    Point2 point{};
};

struct Segment {
    Crossing a;
    Crossing b;
};

std::vector<std::vector<Point2>> join_segments(const std::vector<Segment>& segs) {
    std::map<std::int64_t, std::vector<int>> at;
    for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
        at[segs[static_cast<std::size_t>(s)].a.key].push_back(s);
        at[segs[static_cast<std::size_t>(s)].b.key].push_back(s);
    }
    std::vector<bool> used(segs.size(), false);
    std::vector<std::vector<Point2>> lines;

    // Walks from `key` through unused segments, appending points.
    auto walk = [&](std::int64_t key, std::vector<Point2>& out) {
        for (;;) {
            int next = -1;
            for (int s : at[key])
                if (!used[static_cast<std::size_t>(s)]) {
                    next = s;
                    break;
                }
            if (next < 0) return;
            used[static_cast<std::size_t>(next)] = true;
            const Segment& sg = segs[static_cast<std::size_t>(next)];
            const Crossing& far = sg.a.key == key ? sg.b : sg.a;
            out.push_back(far.point);
            key = far.key;
        }
    };

    for (std::size_t s = 0; s < segs.size(); ++s) {
        if (used[s]) continue;
        used[s] = true;
        std::vector<Point2> forward{segs[s].a.point, segs[s].b.point};
        walk(segs[s].b.key, forward);
        std::vector<Point2> backward;
        walk(segs[s].a.key, backward);
        std::vector<Point2> line(backward.rbegin(), backward.rend());
        line.insert(line.end(), forward.begin(), forward.end());
        lines.push_back(std::move(line));
    }
    return lines;
}

}  // namespace

std::vector<ContourLevel> contours(const GridFunction& u, const std::vector<double>& levels) {
    const Grid& grid = u.grid;
    if (grid.dim() != 2) throw InvalidArgument("contours need a 2D grid function");
    const int n = grid.n();
    const auto total = static_cast<std::int64_t>(grid.size());

    std::vector<ContourLevel> out;
    for (double level : levels) {
        auto above = [&](int k) { return u.values[k] >= level; };
        auto crossing = [&](int p, int q) {
            if (p > q) std::swap(p, q);
            double vp = u.values[p];
            double vq = u.values[q];
            double t = (level - vp) / (vq - vp);
            auto xp = grid.point(p);
            auto xq = grid.point(q);
            return Crossing{p * total + q, {xp[0] + t * (xq[0] - xp[0]), xp[1] + t * (xq[1] - xp[1])}};
        };

        std::vector<Segment> segs;
        for (int j = 0; j + 1 < n; ++j)
            for (int i = 0; i + 1 < n; ++i) {
                // Corners counter-clockwise from the lower left; edge e joins corner e and e + 1.
                const std::array<int, 4> c{grid.index(i, j), grid.index(i + 1, j), grid.index(i + 1, j + 1),
                                           grid.index(i, j + 1)};
                std::array<bool, 4> up{};
                int count = 0;
                for (int e = 0; e < 4; ++e) {
                    up[static_cast<std::size_t>(e)] = above(c[static_cast<std::size_t>(e)]);
                    count += up[static_cast<std::size_t>(e)];
                }
                if (count == 0 || count == 4) continue;
                auto edge = [&](int e) { return crossing(c[static_cast<std::size_t>(e)], c[static_cast<std::size_t>((e + 1) % 4)]); };
                std::vector<int> cut;
                for (int e = 0; e < 4; ++e)
                    if (up[static_cast<std::size_t>(e)] != up[static_cast<std::size_t>((e + 1) % 4)]) cut.push_back(e);
                if (cut.size() == 2) {
                    segs.push_back({edge(cut[0]), edge(cut[1])});
                    continue;
                }
                // Saddle: cut off the two corners on the other side from the cell center.
                double center = 0.25 * (u.values[c[0]] + u.values[c[1]] + u.values[c[2]] + u.values[c[3]]);
                bool center_up = center >= level;
                for (int k = 0; k < 4; ++k)
                    if (up[static_cast<std::size_t>(k)] != center_up) segs.push_back({edge((k + 3) % 4), edge(k)});
            }
        out.push_back({level, join_segments(segs)});
    }
    return out;
}

std::string to_csv(const GradientMap& g, const Grid& grid) {
    std::ostringstream os;
    const bool two_d = grid.dim() == 2;
    os << (two_d ? "x,y,gx,gy\n" : "x,gx\n");
    for (int k = 0; k < grid.size(); ++k) {
        auto p = grid.point(k);
        os << format_double(p[0]);
        if (two_d) os << ',' << format_double(p[1]);
        os << ',' << format_double(g.gx[k]);
        if (two_d) os << ',' << format_double(g.gy[k]);
        os << '\n';
    }
    return os.str();
}

std::string to_csv(const Histogram2D& h) {
    std::ostringstream os;
    const double w = (h.range.hi - h.range.lo) / h.bins;
    os << "gx_lo,gx_hi,gy_lo,gy_hi,count\n";
    for (int iy = 0; iy < h.bins; ++iy)
        for (int ix = 0; ix < h.bins; ++ix) {
            os << format_double(h.range.lo + ix * w) << ',' << format_double(h.range.lo + (ix + 1) * w) << ','
               << format_double(h.range.lo + iy * w) << ',' << format_double(h.range.lo + (iy + 1) * w) << ','
               << h.count(ix, iy) << '\n';
        }
    return os.str();
}

nlohmann::json to_json(const std::vector<ContourLevel>& levels) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& lv : levels) {
        nlohmann::json lines = nlohmann::json::array();
        for (const auto& line : lv.polylines) {
            nlohmann::json pts = nlohmann::json::array();
            for (const auto& p : line) pts.push_back({p[0], p[1]});
            lines.push_back(std::move(pts));
        }
        out.push_back({{"level", lv.level}, {"polylines", std::move(lines)}});
    }
    return out;
}

}  // namespace cvxcone
