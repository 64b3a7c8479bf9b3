#include "twomode/locator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "twomode/errors.hpp"

namespace twomode {

void DeviceGeometry::validate() const {
    if (!(inner_radius_um > 0.0 && gap_um > 0.0 && annulus_inner_um > 0.0 &&
          annulus_outer_um > 0.0)) {
        throw InvalidParameterError("geometry lengths must be positive");
    }
    if (annulus_outer_um <= annulus_inner_um) {
        throw InvalidParameterError("outer annulus radius must exceed its inner radius");
    }
    if (gap_um / 2.0 + inner_radius_um >= annulus_inner_um) {
        throw InvalidParameterError("inner islands must fit inside the outer annulus");
    }
}

void GridSpec::validate() const {
    if (nx < 2 || ny < 2) throw InvalidParameterError("grid needs at least 2x2 nodes");
    if (!(dx_um > 0.0 && dy_um > 0.0)) {
        throw InvalidParameterError("grid spacing must be positive");
    }
    if (!(std::isfinite(x0_um) && std::isfinite(y0_um))) {
        throw InvalidParameterError("grid origin must be finite");
    }
}

GridSpec GridSpec::centered(double half_um, int n) {
    if (n < 2 || !(half_um > 0.0)) {
        throw InvalidParameterError("centered grid needs n >= 2 over a positive half-width");
    }
    GridSpec g;
    g.nx = g.ny = n;
    g.dx_um = g.dy_um = 2.0 * half_um / double(n - 1);
    g.x0_um = g.y0_um = -half_um;
    return g;
}

std::array<double, 2> surrogate_offsets(const DeviceGeometry& geometry, double x_um,
                                        double y_um) {
    // Fraction of a unit charge induced on each island: a normalized
    // inverse-distance-squared kernel centered on the island charge
    // centroid, with scale set by the island radius. The outer island and
    // ground absorb the remainder, so each fraction peaks at 1/2.
    const double cx = geometry.island_center_x_um();
    const double lam = geometry.inner_radius_um;
    const auto frac = [&](double ix_sign) {
        const double dx = x_um - ix_sign * cx;
        const double r2 = (dx * dx + y_um * y_um) / (lam * lam);
        return 0.5 / ((1.0 + r2) * (1.0 + r2));
    };
    const double f1 = frac(+1.0);
    const double f2 = frac(-1.0);
    return {f1 + f2, f1 - f2};
}

SensitivityMap surrogate_map(const DeviceGeometry& geometry, const GridSpec& grid) {
    geometry.validate();
    grid.validate();
    if (grid.dx_um > 10.0 || grid.dy_um > 10.0) {
        throw InvalidParameterError(
            "grid spacing above 10 um is too coarse for localization");
    }
    SensitivityMap map;
    map.grid = grid;
    map.geometry = geometry;
    map.provenance = "surrogate";
    map.s_sigma.resize(size_t(grid.nx) * size_t(grid.ny));
    map.s_delta.resize(map.s_sigma.size());
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const std::array<double, 2> s =
                surrogate_offsets(geometry, grid.x(ix), grid.y(iy));
            map.s_sigma[map.index(ix, iy)] = s[0];
            map.s_delta[map.index(ix, iy)] = s[1];
        }
    }
    return map;
}

namespace {

// Mirror symmetry (x -> -x) check; exact on the surrogate, approximate on
// loaded meshes. Requires a grid symmetric about x = 0 to be checkable.
bool check_mirror_symmetry(const SensitivityMap& map) {
    const GridSpec& g = map.grid;
    const double x_last = g.x(g.nx - 1);
    if (std::abs(g.x0_um + x_last) > 1e-6 * std::max(1.0, std::abs(x_last))) {
        return true;  // asymmetric grid: nothing to check against
    }
    double scale = 0.0;
    for (const double v : map.s_sigma) scale = std::max(scale, std::abs(v));
    const double tol = 1e-9 * std::max(scale, 1.0);
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            const int jx = g.nx - 1 - ix;
            if (std::abs(map.s_sigma[map.index(ix, iy)] - map.s_sigma[map.index(jx, iy)]) >
                    tol ||
                std::abs(map.s_delta[map.index(ix, iy)] + map.s_delta[map.index(jx, iy)]) >
                    tol) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

void save_map(const SensitivityMap& map, const std::string& path) {
    map.grid.validate();
    std::ofstream out(path);
    if (!out) throw IoError("cannot open map file for writing: " + path);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "# twomode sensitivity map v1\n"
                  "nx %d\nny %d\n"
                  "x0_um %.17g\ny0_um %.17g\ndx_um %.17g\ndy_um %.17g\n"
                  "geometry %.17g %.17g %.17g %.17g\n"
                  "provenance %s\n"
                  "# s_sigma s_delta (row-major, x fastest)\n",
                  map.grid.nx, map.grid.ny, map.grid.x0_um, map.grid.y0_um,
                  map.grid.dx_um, map.grid.dy_um, map.geometry.inner_radius_um,
                  map.geometry.gap_um, map.geometry.annulus_inner_um,
                  map.geometry.annulus_outer_um,
                  map.provenance.empty() ? "surrogate" : map.provenance.c_str());
    out << buf;
    for (size_t i = 0; i < map.s_sigma.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", map.s_sigma[i], map.s_delta[i]);
        out << buf;
    }
    if (!out) throw IoError("failed writing map file: " + path);
}

SensitivityMap load_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open map file: " + path);
    std::string line;
    SensitivityMap map;
    map.provenance = "loaded";
    bool have_nx = false, have_ny = false, have_dx = false, have_dy = false;
    bool have_x0 = false, have_y0 = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            if (line.find("s_sigma s_delta") != std::string::npos) break;
            continue;
        }
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "nx") {
            ls >> map.grid.nx;
            have_nx = bool(ls);
        } else if (key == "ny") {
            ls >> map.grid.ny;
            have_ny = bool(ls);
        } else if (key == "x0_um") {
            ls >> map.grid.x0_um;
            have_x0 = bool(ls);
        } else if (key == "y0_um") {
            ls >> map.grid.y0_um;
            have_y0 = bool(ls);
        } else if (key == "dx_um") {
            ls >> map.grid.dx_um;
            have_dx = bool(ls);
        } else if (key == "dy_um") {
            ls >> map.grid.dy_um;
            have_dy = bool(ls);
        } else if (key == "geometry") {
            ls >> map.geometry.inner_radius_um >> map.geometry.gap_um >>
                map.geometry.annulus_inner_um >> map.geometry.annulus_outer_um;
            if (!ls) throw IoError("malformed geometry header in " + path);
        } else if (key == "provenance") {
            std::string p;
            ls >> p;
        } else {
            throw IoError("unknown header key '" + key + "' in " + path);
        }
    }
    if (!(have_nx && have_ny && have_x0 && have_y0 && have_dx && have_dy)) {
        throw IoError("incomplete map header in " + path);
    }
    try {
        map.grid.validate();
    } catch (const InvalidParameterError& e) {
        throw IoError("invalid map grid in " + path + ": " + e.what());
    }
    const size_t n = size_t(map.grid.nx) * size_t(map.grid.ny);
    map.s_sigma.resize(n);
    map.s_delta.resize(n);
    for (size_t i = 0; i < n; ++i) {
        if (!(in >> map.s_sigma[i] >> map.s_delta[i])) {
            std::ostringstream err;
            err << "map " << path << " truncated at cell " << i << " of " << n;
            throw IoError(err.str());
        }
        if (!std::isfinite(map.s_sigma[i]) || !std::isfinite(map.s_delta[i])) {
            std::ostringstream err;
            err << "map " << path << " has a non-finite value at cell " << i
                << " (ix=" << i % size_t(map.grid.nx) << ", iy=" << i / size_t(map.grid.nx)
                << ")";
            throw IoError(err.str());
        }
    }
    map.symmetric = check_mirror_symmetry(map);
    if (!map.symmetric) {
        std::cerr << "warning: loaded map " << path
                  << " breaks the island mirror symmetry\n";
    }
    return map;
}

std::array<double, 2> induced_offsets(const SensitivityMap& map, double x_um, double y_um,
                                      double q) {
    const GridSpec& g = map.grid;
    const double fx = (x_um - g.x0_um) / g.dx_um;
    const double fy = (y_um - g.y0_um) / g.dy_um;
    if (fx < 0.0 || fx > double(g.nx - 1) || fy < 0.0 || fy > double(g.ny - 1)) {
        std::ostringstream err;
        err << "position (" << x_um << ", " << y_um << ") um is outside the map grid";
        throw OutOfBoundsError(err.str());
    }
    const int ix = std::min(int(fx), g.nx - 2);
    const int iy = std::min(int(fy), g.ny - 2);
    const double tx = fx - ix;
    const double ty = fy - iy;
    const auto lerp2 = [&](const std::vector<double>& v) {
        const double v00 = v[map.index(ix, iy)], v10 = v[map.index(ix + 1, iy)];
        const double v01 = v[map.index(ix, iy + 1)], v11 = v[map.index(ix + 1, iy + 1)];
        return (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) +
               ty * ((1.0 - tx) * v01 + tx * v11);
    };
    return {q * lerp2(map.s_sigma), q * lerp2(map.s_delta)};
}

namespace {

// Marching-squares segments of the chi^2 = level contour.
std::vector<Polyline> contour_segments(const GridSpec& g, const std::vector<double>& chi2,
                                       double level) {
    std::vector<Polyline> segs;
    const auto val = [&](int ix, int iy) {
        return chi2[size_t(iy) * size_t(g.nx) + size_t(ix)];
    };
    const auto cross = [&](double va, double vb, double a, double b) {
        const double t = (level - va) / (vb - va);
        return a + t * (b - a);
    };
    for (int iy = 0; iy + 1 < g.ny; ++iy) {
        for (int ix = 0; ix + 1 < g.nx; ++ix) {
            const double v00 = val(ix, iy), v10 = val(ix + 1, iy);
            const double v01 = val(ix, iy + 1), v11 = val(ix + 1, iy + 1);
            const double x0 = g.x(ix), x1 = g.x(ix + 1);
            const double y0 = g.y(iy), y1 = g.y(iy + 1);
            std::vector<std::array<double, 2>> pts;
            if ((v00 < level) != (v10 < level))
                pts.push_back({cross(v00, v10, x0, x1), y0});
            if ((v10 < level) != (v11 < level))
                pts.push_back({x1, cross(v10, v11, y0, y1)});
            if ((v01 < level) != (v11 < level))
                pts.push_back({cross(v01, v11, x0, x1), y1});
            if ((v00 < level) != (v01 < level))
                pts.push_back({x0, cross(v00, v01, y0, y1)});
            if (pts.size() >= 2) {
                // Saddle cells yield 4 crossings; pair them in order.
                for (size_t k = 0; k + 1 < pts.size(); k += 2) {
                    segs.push_back({pts[k], pts[k + 1]});
                }
            }
        }
    }
    return segs;
}

}  // namespace

bool LocalizationRegion::contains(double x_um, double y_um, double level) const {
    if (quadrant_sx_ != 0 && x_um * quadrant_sx_ < 0.0) return false;
    if (quadrant_sy_ != 0 && y_um * quadrant_sy_ < 0.0) return false;
    const double fx = (x_um - grid.x0_um) / grid.dx_um;
    const double fy = (y_um - grid.y0_um) / grid.dy_um;
    if (fx < 0.0 || fx > double(grid.nx - 1) || fy < 0.0 || fy > double(grid.ny - 1)) {
        return false;
    }
    const int ix = int(std::lround(fx));
    const int iy = int(std::lround(fy));
    return chi2[size_t(iy) * size_t(grid.nx) + size_t(ix)] <= level;
}

double LocalizationRegion::area_um2(double level) const {
    double cells = 0.0;
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            if (quadrant_sx_ != 0 && grid.x(ix) * quadrant_sx_ < 0.0) continue;
            if (quadrant_sy_ != 0 && grid.y(iy) * quadrant_sy_ < 0.0) continue;
            if (chi2[size_t(iy) * size_t(grid.nx) + size_t(ix)] <= level) cells += 1.0;
        }
    }
    return cells * grid.dx_um * grid.dy_um;
}

LocalizationRegion biangulate(double ng_sigma, double ng_delta, double sigma_sigma,
                              double sigma_delta, const SensitivityMap& map,
                              double q_assumed, bool restrict_quadrant) {
    if (!(sigma_sigma > 0.0 && sigma_delta > 0.0)) {
        throw InvalidParameterError("biangulation uncertainties must be positive");
    }
    const GridSpec& g = map.grid;
    LocalizationRegion region;
    region.grid = g;
    region.chi2.resize(map.s_sigma.size());
    double best = std::numeric_limits<double>::infinity();
    int best_ix = 0, best_iy = 0;
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            const size_t i = map.index(ix, iy);
            const double rs = (map.s_sigma[i] * q_assumed - ng_sigma) / sigma_sigma;
            const double rd = (map.s_delta[i] * q_assumed - ng_delta) / sigma_delta;
            const double c = rs * rs + rd * rd;
            region.chi2[i] = c;
            if (c < best) {
                best = c;
                best_ix = ix;
                best_iy = iy;
            }
        }
    }
    region.best_x_um = g.x(best_ix);
    region.best_y_um = g.y(best_iy);
    region.min_chi2 = best;
    region.no_solution = best > kChi2Level2Sigma;
    if (restrict_quadrant && !region.no_solution) {
        region.quadrant_restricted = true;
        region.quadrant_sx_ = region.best_x_um >= 0.0 ? 1 : -1;
        region.quadrant_sy_ = region.best_y_um >= 0.0 ? 1 : -1;
    }
    if (!region.no_solution) {
        const auto in_quadrant = [&](const Polyline& seg) {
            for (const std::array<double, 2>& p : seg) {
                if (region.quadrant_sx_ != 0 && p[0] * region.quadrant_sx_ < -1e-12)
                    return false;
                if (region.quadrant_sy_ != 0 && p[1] * region.quadrant_sy_ < -1e-12)
                    return false;
            }
            return true;
        };
        for (Polyline& seg : contour_segments(g, region.chi2, kChi2Level1Sigma)) {
            if (in_quadrant(seg)) region.contour_1sigma.push_back(std::move(seg));
        }
        for (Polyline& seg : contour_segments(g, region.chi2, kChi2Level2Sigma)) {
            if (in_quadrant(seg)) region.contour_2sigma.push_back(std::move(seg));
        }
    }
    return region;
}

}  // namespace twomode
