#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fermiscale/mesh.hpp"
#include "fermiscale/model.hpp"
#include "fermiscale/parallel.hpp"
#include "fermiscale/region.hpp"

namespace fermiscale {

/// Unit-box smoothing window K(w) = Theta(dw - |w|)/(2 dw).
/// Integrates to one; K(0) = 1/(2 dw).
struct BoxKernel {
    double half_width;

    explicit BoxKernel(double dw) : half_width(dw) {
        if (!(dw > 0.0)) throw std::invalid_argument("BoxKernel: half width must be > 0");
    }

    double value(double omega) const {
        return std::abs(omega) <= half_width ? 0.5 / half_width : 0.0;
    }
};

/// Coarse-graining width selected on a reference mesh: twice the largest
/// single-step energy change along `step_axis`,
///   dw = 2 * max_{k,m} |w_{k+dk,m} - w_{k,m}|,  dk = (2*pi/N_axis) e_axis.
/// The returned width is meant to be fixed at the smallest lattice of a size
/// series and reused unchanged at the larger sizes.
/// Throws on a flat band (zero dispersion step); pass an explicit width then.
inline double select_window(const BlochModel& model, const MomentumMesh& reference_mesh,
                            int step_axis) {
    if (step_axis < 0 || step_axis >= reference_mesh.dimension())
        throw std::invalid_argument("select_window: step axis out of range");
    const BandTable table(model, reference_mesh);
    double dmax = 0.0;
    for (int i = 0; i < reference_mesh.size(); ++i) {
        const int j = reference_mesh.shifted_index(i, step_axis, 1);
        for (int m = 0; m < table.bands(); ++m)
            dmax = std::max(dmax, std::abs(table.energy(j, m) - table.energy(i, m)));
    }
    if (dmax == 0.0)
        throw std::runtime_error("select_window: flat band along step axis, "
                                 "coarse-graining width must be supplied explicitly");
    return 2.0 * dmax;
}

/// Geometric form factor of a region, G_A(q) = |sum_{j in A} e^{i q.j}|^2,
/// tabulated on the mesh difference set (q = k - k' is again a mesh vector).
/// Boxes use the closed-form product of Dirichlet kernels,
/// prod_a sin^2(q_a l_a/2)/sin^2(q_a/2), with the q_a = 0 factor l_a^2.
class GeomFactor {
public:
    GeomFactor(const Region& region, const MomentumMesh& mesh) {
        const auto& dims = mesh.dims();
        if (region.dimension() != mesh.dimension())
            throw std::invalid_argument("GeomFactor: region/mesh dimension mismatch");
        if (!region.empty() && !region.within(dims))
            throw std::invalid_argument("GeomFactor: region exceeds lattice bounds");
        const int v = mesh.size();
        const int d = mesh.dimension();
        values_.resize(v);
        if (region.rect_hint()) {
            const auto& len = *region.rect_hint();
            for (int f = 0; f < v; ++f) {
                double g = 1.0;
                for (int a = 0; a < d; ++a) {
                    const double q = mesh.diff_component(f, a);
                    if (q == 0.0) {
                        g *= static_cast<double>(len[a]) * len[a];
                    } else {
                        const double s = std::sin(0.5 * q);
                        const double sl = std::sin(0.5 * q * len[a]);
                        g *= (sl * sl) / (s * s);
                    }
                }
                values_[f] = g;
            }
        } else {
            for (int f = 0; f < v; ++f) {
                std::complex<double> c(0.0, 0.0);
                for (int i = 0; i < region.site_count(); ++i) {
                    auto s = region.site(i);
                    double phase = 0.0;
                    for (int a = 0; a < d; ++a) phase += mesh.diff_component(f, a) * s[a];
                    c += std::polar(1.0, phase);
                }
                values_[f] = std::norm(c);
            }
        }
    }

    double at(int flat_diff) const { return values_[flat_diff]; }

private:
    std::vector<double> values_;
};

inline GeomFactor geometric_factor(const Region& region, const MomentumMesh& mesh) {
    return GeomFactor(region, mesh);
}

/// How a region was specified; kept in series metadata so a result file is
/// sufficient to reconstruct its own inputs.
struct RegionSpec {
    std::string kind;                      // "box" or "sites"
    std::vector<int> lengths;              // box only
    std::vector<int> offset;               // box only
    std::vector<std::vector<int>> sites;   // sites only

    static RegionSpec of(const Region& r) {
        RegionSpec spec;
        if (r.rect_hint()) {
            spec.kind = "box";
            spec.lengths = *r.rect_hint();
            spec.offset = r.box_offset();
        } else {
            spec.kind = "sites";
            for (int i = 0; i < r.site_count(); ++i) {
                auto s = r.site(i);
                spec.sites.emplace_back(s.begin(), s.end());
            }
        }
        return spec;
    }

    Region resolve() const {
        if (kind == "box") return Region::box(lengths, offset);
        if (kind == "sites") {
            int d = sites.empty() ? 0 : static_cast<int>(sites.front().size());
            return Region::from_sites(d, sites);
        }
        throw std::invalid_argument("RegionSpec: unknown kind '" + kind + "'");
    }
};

struct SeriesMetadata {
    std::string model;
    std::map<std::string, double> params;
    std::vector<int> dims;
    RegionSpec region;
    double delta_omega = 0.0;
    double temperature = 0.0;
    double wall_time_s = 0.0;
};

/// Sampled smoothed spectral weight (units 1/energy) on a strictly
/// increasing frequency grid.
struct SpectrumSeries {
    std::vector<double> omega0;
    std::vector<double> value;
    SeriesMetadata meta;
};

/// Uniform frequency grid with spacing spacing_factor * dw, spanning the full
/// transition range of the table padded by padding_factor * dw on each side.
/// Ground-state series need only omega0 >= 0; pass include_negative for
/// thermal states, where downward transitions populate negative frequencies.
inline std::vector<double> default_omega0_grid(const BandTable& table, double delta_omega,
                                               bool include_negative = false,
                                               double spacing_factor = 0.25,
                                               double padding_factor = 2.0) {
    const double span = table.max_energy() - table.min_energy();
    const double pad = padding_factor * delta_omega;
    const double lo = include_negative ? -span - pad : -pad;
    const double hi = span + pad;
    const double h = spacing_factor * delta_omega;
    const int n = static_cast<int>(std::floor((hi - lo) / h)) + 1;
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = lo + i * h;
    return grid;
}

namespace detail {

inline void check_sbar_args(const MomentumMesh& mesh, const Region& region,
                            std::span<const double> grid) {
    if (!region.empty()) {
        if (region.dimension() != mesh.dimension())
            throw std::invalid_argument("sbar: region/mesh dimension mismatch");
        if (!region.within(mesh.dims()))
            throw std::invalid_argument("sbar: region exceeds lattice bounds");
    }
    if (grid.empty()) throw std::invalid_argument("sbar: empty frequency grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("sbar: frequency grid must be strictly increasing");
}

inline SeriesMetadata make_metadata(const BlochModel& model, const MomentumMesh& mesh,
                                    const Region& region, const Occupation& occ,
                                    const BoxKernel& kernel) {
    SeriesMetadata meta;
    meta.model = model.name();
    meta.params = model.params();
    meta.dims = mesh.dims();
    meta.region = RegionSpec::of(region);
    meta.delta_omega = kernel.half_width;
    meta.temperature = occ.temperature();
    return meta;
}

/// Grid positions a transition at dE = w_{k,m} - w_{k',m'} can reach:
/// candidates around omega0 = -dE within the kernel half width, padded by one
/// bin on each side so the kernel itself decides the edge cases.
inline std::pair<int, int> bin_range(std::span<const double> grid, double dE, double half_width) {
    const auto lo = std::lower_bound(grid.begin(), grid.end(), -dE - half_width);
    const auto hi = std::upper_bound(grid.begin(), grid.end(), -dE + half_width);
    int i0 = static_cast<int>(lo - grid.begin()) - 1;
    int i1 = static_cast<int>(hi - grid.begin());
    i0 = std::max(i0, 0);
    i1 = std::min(i1, static_cast<int>(grid.size()) - 1);
    return {i0, i1};
}

} // namespace detail

/// Coarse-grained dynamical structure factor of a region,
///
///   S(w0) = 1/V^2 sum_{k,m} sum_{k',m'} G_A(k-k') Tr[P_{k,m} P_{k',m'}]
///           n_{k,m} (1 - n_{k',m'}) K(w0 + w_{k,m} - w_{k',m'}),
///
/// with V the number of lattice sites. The double site sum is folded into
/// the geometric form factor; the (k,m) rows are evaluated in parallel and
/// reduced in fixed order, so results are independent of the thread count.
inline SpectrumSeries sbar(const BlochModel& model, const MomentumMesh& mesh,
                           const Region& region, const Occupation& occ, const BoxKernel& kernel,
                           std::vector<double> omega0_grid) {
    detail::check_sbar_args(mesh, region, omega0_grid);
    SpectrumSeries out;
    out.omega0 = std::move(omega0_grid);
    out.value.assign(out.omega0.size(), 0.0);
    out.meta = detail::make_metadata(model, mesh, region, occ, kernel);
    if (region.empty()) return out;

    const BandTable table(model, mesh);
    const GeomFactor geom(region, mesh);
    const int v = mesh.size();
    const int nb = table.bands();
    const int ng = static_cast<int>(out.omega0.size());
    const double inv_v2 = 1.0 / (static_cast<double>(v) * static_cast<double>(v));
    const std::span<const double> grid(out.omega0);

    std::vector<double> filled(static_cast<std::size_t>(v) * nb);
    std::vector<double> empty(static_cast<std::size_t>(v) * nb);
    for (int k = 0; k < v; ++k)
        for (int m = 0; m < nb; ++m) {
            const double n = occ(table.energy(k, m));
            filled[static_cast<std::size_t>(k) * nb + m] = n;
            empty[static_cast<std::size_t>(k) * nb + m] = 1.0 - n;
        }

    std::vector<double> rows(static_cast<std::size_t>(v) * ng, 0.0);
    parallel_for(v, [&](int k) {
        double* row = rows.data() + static_cast<std::size_t>(k) * ng;
        for (int m = 0; m < nb; ++m) {
            const double n_occ = filled[static_cast<std::size_t>(k) * nb + m];
            if (n_occ == 0.0) continue;
            const double e_occ = table.energy(k, m);
            for (int kp = 0; kp < v; ++kp) {
                const double g = geom.at(mesh.wrapped_diff(k, kp));
                if (g == 0.0) continue;
                for (int mp = 0; mp < nb; ++mp) {
                    const double n_emp = empty[static_cast<std::size_t>(kp) * nb + mp];
                    if (n_emp == 0.0) continue;
                    const double w =
                        inv_v2 * g * table.overlap(k, m, kp, mp) * n_occ * n_emp;
                    const double dE = e_occ - table.energy(kp, mp);
                    const auto [i0, i1] = detail::bin_range(grid, dE, kernel.half_width);
                    for (int i = i0; i <= i1; ++i) {
                        const double kv = kernel.value(grid[i] + dE);
                        if (kv != 0.0) row[i] += w * kv;
                    }
                }
            }
        }
    });
    for (int k = 0; k < v; ++k) {
        const double* row = rows.data() + static_cast<std::size_t>(k) * ng;
        for (int i = 0; i < ng; ++i) out.value[i] += row[i];
    }
    return out;
}

/// Literal transcription of the quadruple sum over j, j', k, k' (and bands),
/// with explicit band projector matrices. Serves as the oracle for sbar;
/// meant for small lattices (up to ~16 sites per axis).
inline SpectrumSeries sbar_naive(const BlochModel& model, const MomentumMesh& mesh,
                                 const Region& region, const Occupation& occ,
                                 const BoxKernel& kernel, std::vector<double> omega0_grid) {
    detail::check_sbar_args(mesh, region, omega0_grid);
    SpectrumSeries out;
    out.omega0 = std::move(omega0_grid);
    out.value.assign(out.omega0.size(), 0.0);
    out.meta = detail::make_metadata(model, mesh, region, occ, kernel);
    if (region.empty()) return out;

    const int v = mesh.size();
    const int nb = model.n_orb();
    const int d = mesh.dimension();
    const int na = region.site_count();
    const double inv_v2 = 1.0 / (static_cast<double>(v) * static_cast<double>(v));

    std::vector<Eigen::VectorXd> energies(v);
    std::vector<std::vector<Eigen::MatrixXcd>> projectors(v);
    for (int k = 0; k < v; ++k) {
        auto s = model.spectrum(mesh.point(k));
        energies[k] = s.energies;
        projectors[k].reserve(nb);
        for (int m = 0; m < nb; ++m)
            projectors[k].push_back(s.vectors.col(m) * s.vectors.col(m).adjoint());
    }

    for (int k = 0; k < v; ++k) {
        const auto pk = mesh.point(k);
        for (int kp = 0; kp < v; ++kp) {
            const auto pkp = mesh.point(kp);
            // explicit double sum over region sites
            std::complex<double> site_sum(0.0, 0.0);
            for (int i = 0; i < na; ++i) {
                for (int j = 0; j < na; ++j) {
                    auto ri = region.site(i);
                    auto rj = region.site(j);
                    double phase = 0.0;
                    for (int a = 0; a < d; ++a)
                        phase += (pk[a] - pkp[a]) * (ri[a] - rj[a]);
                    site_sum += std::polar(1.0, phase);
                }
            }
            const double g = site_sum.real();
            for (int m = 0; m < nb; ++m) {
                const double n_occ = occ(energies[k](m));
                if (n_occ == 0.0) continue;
                for (int mp = 0; mp < nb; ++mp) {
                    const double n_emp = 1.0 - occ(energies[kp](mp));
                    if (n_emp == 0.0) continue;
                    const double tr = (projectors[k][m] * projectors[kp][mp]).trace().real();
                    const double w = inv_v2 * g * tr * n_occ * n_emp;
                    const double dE = energies[k](m) - energies[kp](mp);
                    for (std::size_t i = 0; i < out.omega0.size(); ++i) {
                        const double kv = kernel.value(out.omega0[i] + dE);
                        if (kv != 0.0) out.value[i] += w * kv;
                    }
                }
            }
        }
    }
    for (double& s : out.value) s = std::max(s, 0.0);
    return out;
}

/// Exact transition-weight sum sum_{pairs} 1/V^2 G_A Tr[PP'] n(1-n'):
/// the full frequency integral of S(w)/(2*pi), which equals
/// Tr[C_A (1 - C_A)] at any temperature. In the ground state it coincides
/// with the one-sided integral of the sum rule since S vanishes at w < 0.
inline double transition_weight_sum(const BlochModel& model, const MomentumMesh& mesh,
                                    const Region& region, const Occupation& occ) {
    if (region.empty()) return 0.0;
    if (region.dimension() != mesh.dimension() || !region.within(mesh.dims()))
        throw std::invalid_argument("transition_weight_sum: region/mesh mismatch");
    const BandTable table(model, mesh);
    const GeomFactor geom(region, mesh);
    const int v = mesh.size();
    const int nb = table.bands();
    const double inv_v2 = 1.0 / (static_cast<double>(v) * static_cast<double>(v));
    double total = 0.0;
    for (int k = 0; k < v; ++k)
        for (int m = 0; m < nb; ++m) {
            const double n_occ = occ(table.energy(k, m));
            if (n_occ == 0.0) continue;
            for (int kp = 0; kp < v; ++kp) {
                const double g = geom.at(mesh.wrapped_diff(k, kp));
                if (g == 0.0) continue;
                for (int mp = 0; mp < nb; ++mp) {
                    const double n_emp = 1.0 - occ(table.energy(kp, mp));
                    if (n_emp == 0.0) continue;
                    total += inv_v2 * g * table.overlap(k, m, kp, mp) * n_occ * n_emp;
                }
            }
        }
    return total;
}

struct StaticVariance {
    double transition_sum;        // exact, from the weights themselves
    double quadrature_estimate;   // trapezoid over the sampled grid
    bool quadrature_reliable;     // false when the grid misses spectral support
};

/// Static particle-number variance from a computed spectrum. The exact value
/// is re-derived from the series' own provenance metadata; the quadrature of
/// the samples is returned alongside as a cross-check and flagged unreliable
/// when the grid does not cover the support.
inline StaticVariance static_variance_from_sbar(const SpectrumSeries& series) {
    const BlochModel model = make_model(series.meta.model, series.meta.params);
    const MomentumMesh mesh = build_mesh(series.meta.dims);
    const Region region = series.meta.region.resolve();
    const Occupation occ = Occupation::from_temperature(series.meta.temperature);

    StaticVariance out{};
    out.transition_sum = transition_weight_sum(model, mesh, region, occ);

    double quad = 0.0;
    for (std::size_t i = 1; i < series.omega0.size(); ++i)
        quad += 0.5 * (series.value[i] + series.value[i - 1]) *
                (series.omega0[i] - series.omega0[i - 1]);
    out.quadrature_estimate = quad;

    double peak = 0.0;
    for (double s : series.value) peak = std::max(peak, s);
    out.quadrature_reliable =
        series.value.size() >= 2 &&
        (peak == 0.0 ||
         (series.value.front() <= 1e-10 * peak && series.value.back() <= 1e-10 * peak));
    return out;
}

} // namespace fermiscale
