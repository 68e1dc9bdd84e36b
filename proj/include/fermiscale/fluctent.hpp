#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "fermiscale/mesh.hpp"
#include "fermiscale/model.hpp"
#include "fermiscale/region.hpp"

namespace fermiscale {

/// Two-point function <c†_{i,s} c_{j,s'}> restricted to a region, in the
/// (site, orbital) basis with orbital fastest. Hermitian with eigenvalues
/// in [0,1]; the trace is the expected particle number in the region.
struct CorrelationMatrix {
    Region region;
    int n_orb = 1;
    Eigen::MatrixXcd entries;
};

namespace detail {

/// Occupation-weighted projector sum M_k = sum_m n_{k,m} P_{k,m} per mesh
/// point, the k-space kernel of the one-body density matrix.
inline std::vector<Eigen::MatrixXcd> occupied_projectors(const BlochModel& model,
                                                         const MomentumMesh& mesh,
                                                         const Occupation& occ) {
    std::vector<Eigen::MatrixXcd> mk;
    mk.reserve(mesh.size());
    const int nb = model.n_orb();
    for (int k = 0; k < mesh.size(); ++k) {
        auto s = model.spectrum(mesh.point(k));
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(nb, nb);
        for (int m = 0; m < nb; ++m) {
            const double n = occ(s.energies(m));
            if (n != 0.0) acc += n * (s.vectors.col(m) * s.vectors.col(m).adjoint());
        }
        mk.push_back(std::move(acc));
    }
    return mk;
}

/// C block for a site separation dr: (1/V) sum_k e^{i k.dr} M_k^T.
/// The transpose implements <c†_{i,s} c_{j,s'}> = (1/V) sum_k e^{ik.(ri-rj)}
/// sum_m n_{k,m} [P_{k,m}]_{s's}, which follows from c_{j,s} =
/// (1/sqrt(V)) sum_k e^{-ik.j} c_{k,s}.
inline Eigen::MatrixXcd correlation_block(const MomentumMesh& mesh,
                                          const std::vector<Eigen::MatrixXcd>& mk,
                                          std::span<const int> dr) {
    const int nb = static_cast<int>(mk.front().rows());
    const int d = mesh.dimension();
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(nb, nb);
    for (int k = 0; k < mesh.size(); ++k) {
        auto p = mesh.point(k);
        double phase = 0.0;
        for (int a = 0; a < d; ++a) phase += p[a] * dr[a];
        block += std::polar(1.0, phase) * mk[k].transpose();
    }
    return block / static_cast<double>(mesh.size());
}

} // namespace detail

/// Ground-state or thermal correlation matrix of a region.
inline CorrelationMatrix correlation_matrix(const BlochModel& model, const MomentumMesh& mesh,
                                            const Region& region, const Occupation& occ) {
    if (region.dimension() != mesh.dimension() || !region.within(mesh.dims()))
        throw std::invalid_argument("correlation_matrix: region/mesh mismatch");
    const int na = region.site_count();
    const int nb = model.n_orb();
    const int d = mesh.dimension();
    const auto mk = detail::occupied_projectors(model, mesh, occ);

    // blocks depend only on the (unwrapped) site separation
    std::map<std::vector<int>, Eigen::MatrixXcd> blocks;
    std::vector<int> dr(d);
    CorrelationMatrix out{region, nb, Eigen::MatrixXcd(na * nb, na * nb)};
    for (int i = 0; i < na; ++i) {
        auto ri = region.site(i);
        for (int j = 0; j < na; ++j) {
            auto rj = region.site(j);
            for (int a = 0; a < d; ++a) dr[a] = ri[a] - rj[a];
            auto it = blocks.find(dr);
            if (it == blocks.end())
                it = blocks.emplace(dr, detail::correlation_block(mesh, mk, dr)).first;
            out.entries.block(i * nb, j * nb, nb, nb) = it->second;
        }
    }
    return out;
}

/// Particle-number variance of the region, d2N = Tr[C(1-C)] = Tr C - |C|_F^2.
inline double particle_variance(const CorrelationMatrix& c) {
    const double tr = c.entries.trace().real();
    const double frob2 = c.entries.squaredNorm();
    return tr - frob2;
}

/// Von Neumann entanglement entropy from the correlation spectrum,
/// S = -sum_nu [nu ln nu + (1-nu) ln(1-nu)], eigenvalues clipped to
/// [eps, 1-eps] with eps = 1e-12 to regularize the 0 log 0 limit.
inline double vn_entropy(const CorrelationMatrix& c) {
    constexpr double eps = 1e-12;
    if (c.entries.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(c.entries,
                                                           Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("vn_entropy: eigensolver failed");
    double s = 0.0;
    for (double nu : solver.eigenvalues()) {
        nu = std::clamp(nu, eps, 1.0 - eps);
        s -= nu * std::log(nu) + (1.0 - nu) * std::log(1.0 - nu);
    }
    return s;
}

/// Connected density-density correlator between two distinct sites,
/// <n_i n_j>_c = -sum_{s,s'} |C_{(i,s),(j,s')}|^2 for a number-conserving
/// state (Wick's theorem).
inline double connected_correlator(const BlochModel& model, const MomentumMesh& mesh,
                                   const Occupation& occ, std::span<const int> site_i,
                                   std::span<const int> site_j) {
    const int d = mesh.dimension();
    if (static_cast<int>(site_i.size()) != d || static_cast<int>(site_j.size()) != d)
        throw std::invalid_argument("connected_correlator: site dimension mismatch");
    if (std::equal(site_i.begin(), site_i.end(), site_j.begin()))
        throw std::invalid_argument("connected_correlator: sites must differ");
    const auto mk = detail::occupied_projectors(model, mesh, occ);
    std::vector<int> dr(d);
    for (int a = 0; a < d; ++a) dr[a] = site_i[a] - site_j[a];
    const Eigen::MatrixXcd block = detail::correlation_block(mesh, mk, dr);
    return -block.squaredNorm();
}

struct CorrelationLengthFit {
    double xi = 0.0;        // decay length, -1/slope of ln|c| vs distance
    double residual = 0.0;  // RMS deviation of ln|c| from the fitted line
    bool decaying = false;  // false when the fitted slope is not negative
};

/// Least-squares exponential-decay fit of (distance, correlator) samples.
/// Needs at least 4 samples with nonzero correlator; a non-negative slope
/// marks the data as non-decaying (not a gapped exponential).
inline CorrelationLengthFit fit_correlation_length(
    std::span<const std::pair<double, double>> samples) {
    if (samples.size() < 4)
        throw std::invalid_argument("fit_correlation_length: need at least 4 samples");
    std::vector<double> x, y;
    for (const auto& [r, c] : samples) {
        if (c == 0.0)
            throw std::invalid_argument("fit_correlation_length: zero correlator sample");
        x.push_back(r);
        y.push_back(std::log(std::abs(c)));
    }
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = y[i] - (intercept + slope * x[i]);
        rss += d * d;
    }
    CorrelationLengthFit fit;
    fit.residual = std::sqrt(rss / n);
    fit.decaying = slope < 0.0;
    fit.xi = fit.decaying ? -1.0 / slope : 0.0;
    return fit;
}

} // namespace fermiscale
