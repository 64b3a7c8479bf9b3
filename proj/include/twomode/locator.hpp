#ifndef TWOMODE_LOCATOR_HPP
#define TWOMODE_LOCATOR_HPP

#include <array>
#include <string>
#include <vector>

namespace twomode {

// Planar device geometry: two half-disc inner islands separated by a gap,
// inside a grounded outer annulus. Lengths in micrometers.
struct DeviceGeometry {
    double inner_radius_um = 125.0;
    double gap_um = 120.0;
    double annulus_inner_um = 389.5;
    double annulus_outer_um = 489.5;

    void validate() const;
    // x coordinate of the island-1 charge centroid; island 2 mirrors at -x.
    double island_center_x_um() const { return gap_um / 2.0 + inner_radius_um / 2.0; }

    static DeviceGeometry device_a() { return DeviceGeometry{}; }
};

struct GridSpec {
    double x0_um = 0.0;  // coordinate of node (0, 0)
    double y0_um = 0.0;
    double dx_um = 0.0;
    double dy_um = 0.0;
    int nx = 0;
    int ny = 0;

    void validate() const;
    double x(int ix) const { return x0_um + ix * dx_um; }
    double y(int iy) const { return y0_um + iy * dy_um; }
    // Symmetric grid covering [-half, half]^2 with n nodes per axis.
    static GridSpec centered(double half_um, int n);
};

// Induced (s_Sigma, s_Delta) offsets per elementary charge on a uniform
// grid; node (ix, iy) lives at flat index iy*nx + ix.
struct SensitivityMap {
    GridSpec grid;
    DeviceGeometry geometry;
    std::vector<double> s_sigma;
    std::vector<double> s_delta;
    std::string provenance;  // "surrogate" or "loaded"
    bool symmetric = true;   // mirror symmetry held on load

    size_t index(int ix, int iy) const { return size_t(iy) * size_t(grid.nx) + size_t(ix); }
};

// Analytic inverse-distance-squared induced-charge surrogate. Rejects grids
// coarser than 10 um.
SensitivityMap surrogate_map(const DeviceGeometry& geometry, const GridSpec& grid);

// Pointwise surrogate evaluation (same kernel the map is built from).
std::array<double, 2> surrogate_offsets(const DeviceGeometry& geometry, double x_um,
                                        double y_um);

void save_map(const SensitivityMap& map, const std::string& path);
SensitivityMap load_map(const std::string& path);

// Bilinear interpolation of (s_Sigma, s_Delta) scaled by q elementary
// charges. Throws OutOfBoundsError outside the grid.
std::array<double, 2> induced_offsets(const SensitivityMap& map, double x_um, double y_um,
                                      double q = 1.0);

// chi^2 levels enclosing 68.3% / 95.4% for 2 degrees of freedom.
constexpr double kChi2Level1Sigma = 2.30;
constexpr double kChi2Level2Sigma = 6.18;

using Polyline = std::vector<std::array<double, 2>>;

struct LocalizationRegion {
    double best_x_um = 0.0;
    double best_y_um = 0.0;
    double min_chi2 = 0.0;
    bool no_solution = false;       // min chi^2 above the 2-sigma level
    bool quadrant_restricted = false;
    std::vector<Polyline> contour_1sigma;
    std::vector<Polyline> contour_2sigma;
    GridSpec grid;
    std::vector<double> chi2;       // full chi^2 surface, map indexing

    // Membership of the nearest grid cell (honoring quadrant restriction).
    bool contains(double x_um, double y_um, double level = kChi2Level1Sigma) const;
    // Area (um^2) of cells below the level (honoring quadrant restriction).
    double area_um2(double level = kChi2Level1Sigma) const;

  private:
    friend LocalizationRegion biangulate(double, double, double, double,
                                         const SensitivityMap&, double, bool);
    int quadrant_sx_ = 0;  // 0 = unrestricted, else +-1
    int quadrant_sy_ = 0;
};

// Grid chi^2 misfit between measured (n_gS, n_gD) and the map forward model
// with an assumed charge q; most-likely point plus 1/2-sigma contours.
LocalizationRegion biangulate(double ng_sigma, double ng_delta, double sigma_sigma,
                              double sigma_delta, const SensitivityMap& map,
                              double q_assumed = 1.0, bool restrict_quadrant = true);

}  // namespace twomode

#endif
