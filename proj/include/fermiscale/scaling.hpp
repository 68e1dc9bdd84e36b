#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fermiscale/structfact.hpp"

namespace fermiscale {

/// Candidate spatial growth laws of a subsystem quantity with linear size L
/// in dimension D: boundary (L^{D-1}), bulk (L^D), and the logarithmically
/// enhanced boundary law of gapless states (L^{D-1} ln L).
enum class ScalingLaw { area, volume, critical };

inline const char* law_name(ScalingLaw law) {
    switch (law) {
        case ScalingLaw::area: return "area";
        case ScalingLaw::volume: return "volume";
        case ScalingLaw::critical: return "critical";
    }
    return "?";
}

inline ScalingLaw law_from_name(const std::string& name) {
    if (name == "area") return ScalingLaw::area;
    if (name == "volume") return ScalingLaw::volume;
    if (name == "critical") return ScalingLaw::critical;
    throw std::invalid_argument("unknown scaling law '" + name + "'");
}

constexpr ScalingLaw kAllLaws[] = {ScalingLaw::area, ScalingLaw::volume, ScalingLaw::critical};

/// F(L) for a given law; for D = 1 the area law is a constant and the
/// critical law reduces to ln L.
inline double law_value(ScalingLaw law, double length, int dimension) {
    switch (law) {
        case ScalingLaw::area: return std::pow(length, dimension - 1);
        case ScalingLaw::volume: return std::pow(length, dimension);
        case ScalingLaw::critical:
            return std::pow(length, dimension - 1) * std::log(length);
    }
    return 0.0;
}

/// A quantity sampled over increasing subsystem sizes.
struct SizeSeries {
    std::vector<std::pair<double, double>> entries;   // (L, value), L increasing
    int dimension = 1;
    std::string label;
};

struct ScalingFit {
    ScalingLaw law = ScalingLaw::area;
    double prefactor = 0.0;
    double residual = 0.0;   // RMS of value/(c F(L)) - 1 under the chosen law
    std::map<ScalingLaw, double> per_law_residuals;
    std::map<ScalingLaw, double> per_law_prefactors;
};

/// Least-squares fit value = c * F(L) for each candidate law; the law with
/// the smallest RMS relative deviation wins. Values must be positive and at
/// least 3 sizes are required. Sub-leading corrections are not modeled.
inline ScalingFit fit_scaling(const SizeSeries& series) {
    if (series.entries.size() < 3)
        throw std::invalid_argument("fit_scaling: need at least 3 sizes");
    for (std::size_t i = 0; i < series.entries.size(); ++i) {
        if (!(series.entries[i].second > 0.0))
            throw std::invalid_argument("fit_scaling: values must be positive");
        if (i > 0 && !(series.entries[i].first > series.entries[i - 1].first))
            throw std::invalid_argument("fit_scaling: sizes must be strictly increasing");
    }
    ScalingFit fit;
    double best = std::numeric_limits<double>::infinity();
    for (ScalingLaw law : kAllLaws) {
        double sff = 0.0, sfv = 0.0;
        for (const auto& [length, value] : series.entries) {
            const double f = law_value(law, length, series.dimension);
            sff += f * f;
            sfv += f * value;
        }
        const double c = sfv / sff;
        double rss = 0.0;
        for (const auto& [length, value] : series.entries) {
            const double rel = value / (c * law_value(law, length, series.dimension)) - 1.0;
            rss += rel * rel;
        }
        const double residual = std::sqrt(rss / static_cast<double>(series.entries.size()));
        fit.per_law_residuals[law] = residual;
        fit.per_law_prefactors[law] = c;
        if (residual < best) {
            best = residual;
            fit.law = law;
            fit.prefactor = c;
            fit.residual = residual;
        }
    }
    return fit;
}

/// Collapse quality of a family of spectra indexed by subsystem size: each
/// curve is divided by F(L), and the result is the worst spread
/// (max - min across sizes) of the rescaled curves, normalized by the peak
/// of their mean, over frequency bins whose mean exceeds `mask_fraction` of
/// that peak. Zero means a perfect collapse. Normalizing by the peak rather
/// than bin-by-bin keeps low-signal bins (band edges, quasi-elastic bins of
/// gapless systems, where the window holds only a handful of discrete
/// transitions) from dominating the figure of merit.
inline double collapse_residual(const std::map<double, SpectrumSeries>& curves, ScalingLaw law,
                                int dimension, double mask_fraction = 0.05) {
    if (curves.size() < 2)
        throw std::invalid_argument("collapse_residual: need at least 2 curves");
    const auto& ref = curves.begin()->second;
    const std::size_t n = ref.omega0.size();
    for (const auto& [length, series] : curves) {
        (void)length;
        if (series.omega0.size() != n)
            throw std::invalid_argument("collapse_residual: frequency grid mismatch");
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(series.omega0[i] - ref.omega0[i]) > 1e-12)
                throw std::invalid_argument("collapse_residual: frequency grid mismatch");
    }
    std::vector<double> mean(n, 0.0), lo(n, std::numeric_limits<double>::infinity()),
        hi(n, -std::numeric_limits<double>::infinity());
    for (const auto& [length, series] : curves) {
        const double f = law_value(law, length, dimension);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = series.value[i] / f;
            mean[i] += r;
            lo[i] = std::min(lo[i], r);
            hi[i] = std::max(hi[i], r);
        }
    }
    const double count = static_cast<double>(curves.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean[i] /= count;
        peak = std::max(peak, mean[i]);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (mean[i] <= mask_fraction * peak) continue;
        worst = std::max(worst, (hi[i] - lo[i]) / peak);
    }
    return worst;
}

struct AreaVolumeFit {
    double area_coeff = 0.0;     // a, coefficient of L^{D-1}
    double volume_coeff = 0.0;   // b, coefficient of L^D
};

/// Two-parameter least-squares fit value = a L^{D-1} + b L^D, used to
/// separate the boundary and bulk contributions of a thermal series.
inline AreaVolumeFit fit_area_volume(const SizeSeries& series) {
    if (series.entries.size() < 3)
        throw std::invalid_argument("fit_area_volume: need at least 3 sizes");
    double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
    for (const auto& [length, value] : series.entries) {
        const double f1 = law_value(ScalingLaw::area, length, series.dimension);
        const double f2 = law_value(ScalingLaw::volume, length, series.dimension);
        s11 += f1 * f1;
        s12 += f1 * f2;
        s22 += f2 * f2;
        r1 += f1 * value;
        r2 += f2 * value;
    }
    const double det = s11 * s22 - s12 * s12;
    if (det == 0.0) throw std::invalid_argument("fit_area_volume: singular design matrix");
    return {(s22 * r1 - s12 * r2) / det, (s11 * r2 - s12 * r1) / det};
}

/// Crossover size below which the boundary term dominates, L_c = a/b.
/// A non-positive bulk coefficient means a pure boundary law; the crossover
/// is then reported as infinite.
inline double crossover_length(double area_coeff, double volume_coeff) {
    if (!(area_coeff > 0.0))
        throw std::invalid_argument("crossover_length: boundary coefficient must be > 0");
    if (volume_coeff <= 0.0) return std::numeric_limits<double>::infinity();
    return area_coeff / volume_coeff;
}

} // namespace fermiscale
