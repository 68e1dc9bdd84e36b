#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "fermiscale/model.hpp"
#include "fermiscale/structfact.hpp"

namespace fermiscale {

/// Spectral content of a real scalar drive f(t). Analytic forms carry a
/// complex amplitude f(w); a sampled form carries |f(w)|^2 only and cannot
/// be used where the phase matters.
///
/// The Gaussian pulse is normalized so that the narrow-pulse limit of the
/// absorption integral is (f0^2/4) W S(W): |f(w)|^2 = pi f0^2 [g(w-W)+g(w+W)]
/// with g a unit-area Gaussian of width sigma (the cross term, exponentially
/// small for sigma << W, is dropped).
class DriveSpectrum {
public:
    enum class Kind { gaussian_pulse, monochromatic, sampled };

    static DriveSpectrum gaussian_pulse(double f0, double center, double sigma_omega) {
        if (!(sigma_omega > 0.0))
            throw std::invalid_argument("DriveSpectrum: sigma must be > 0");
        DriveSpectrum d;
        d.kind_ = Kind::gaussian_pulse;
        d.f0_ = f0;
        d.center_ = center;
        d.sigma_ = sigma_omega;
        return d;
    }

    static DriveSpectrum monochromatic(double f0, double center) {
        DriveSpectrum d;
        d.kind_ = Kind::monochromatic;
        d.f0_ = f0;
        d.center_ = center;
        return d;
    }

    /// |f(w)|^2 samples on an increasing grid; mirrored to negative w
    /// (a real f(t) has |f(-w)|^2 = |f(w)|^2).
    static DriveSpectrum sampled(std::vector<double> grid, std::vector<double> power) {
        if (grid.size() != power.size() || grid.size() < 2)
            throw std::invalid_argument("DriveSpectrum: bad sampled form");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (i > 0 && !(grid[i] > grid[i - 1]))
                throw std::invalid_argument("DriveSpectrum: sampled grid must increase");
            if (power[i] < 0.0)
                throw std::invalid_argument("DriveSpectrum: negative |f|^2 sample");
        }
        DriveSpectrum d;
        d.kind_ = Kind::sampled;
        d.grid_ = std::move(grid);
        d.power_ = std::move(power);
        return d;
    }

    Kind kind() const { return kind_; }
    bool has_phase() const { return kind_ != Kind::sampled; }
    double amplitude_f0() const { return f0_; }
    double center() const { return center_; }
    double sigma() const { return sigma_; }

    /// |f(w)|^2. For the monochromatic drive this is delta-like and not
    /// representable pointwise; absorption handles it analytically.
    double power_density(double omega) const {
        switch (kind_) {
            case Kind::gaussian_pulse: {
                const double norm = 1.0 / (sigma_ * std::sqrt(2.0 * M_PI));
                auto g = [&](double x) { return norm * std::exp(-0.5 * x * x / (sigma_ * sigma_)); };
                return M_PI * f0_ * f0_ * (g(omega - center_) + g(omega + center_));
            }
            case Kind::sampled: {
                const double w = std::abs(omega);
                if (w < grid_.front() || w > grid_.back()) return 0.0;
                const auto it = std::upper_bound(grid_.begin(), grid_.end(), w);
                const std::size_t i = std::min(grid_.size() - 1,
                                               static_cast<std::size_t>(it - grid_.begin()));
                const double x0 = grid_[i - 1], x1 = grid_[i];
                const double t = (w - x0) / (x1 - x0);
                return (1.0 - t) * power_[i - 1] + t * power_[i];
            }
            case Kind::monochromatic:
                throw std::invalid_argument(
                    "DriveSpectrum: monochromatic power density is distributional");
        }
        return 0.0;
    }

    /// Complex spectral amplitude f(w); real and even for these pulses.
    std::complex<double> amplitude(double omega) const {
        if (kind_ == Kind::sampled)
            throw std::invalid_argument("DriveSpectrum: sampled |f|^2 carries no phase");
        if (kind_ == Kind::monochromatic)
            throw std::invalid_argument(
                "DriveSpectrum: monochromatic amplitude is distributional");
        const double peak = std::sqrt(M_PI) * f0_ / std::pow(2.0 * M_PI * sigma_ * sigma_, 0.25);
        auto h = [&](double x) { return std::exp(-0.25 * x * x / (sigma_ * sigma_)); };
        return peak * (h(omega - center_) + h(omega + center_));
    }

    std::pair<double, double> support() const {
        switch (kind_) {
            case Kind::gaussian_pulse: return {center_ - 4.0 * sigma_, center_ + 4.0 * sigma_};
            case Kind::monochromatic: return {center_, center_};
            case Kind::sampled: return {grid_.front(), grid_.back()};
        }
        return {0.0, 0.0};
    }

private:
    DriveSpectrum() = default;
    Kind kind_ = Kind::monochromatic;
    double f0_ = 0.0;
    double center_ = 0.0;
    double sigma_ = 0.0;
    std::vector<double> grid_;
    std::vector<double> power_;
};

/// Density-density response sampled on a symmetric frequency grid. The
/// dissipative part is odd and the reactive part even for this response.
struct ResponseSeries {
    std::vector<double> omega;
    std::vector<double> im_chi;
    std::vector<double> re_chi;    // empty until the Kramers-Kronig pass
    SeriesMetadata meta;
};

namespace detail {

inline double uniform_spacing(std::span<const double> grid, const char* who) {
    if (grid.size() < 2) throw std::invalid_argument(std::string(who) + ": grid too short");
    const double h = grid[1] - grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double step = grid[i] - grid[i - 1];
        if (std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw std::invalid_argument(std::string(who) + ": grid must be uniform");
    }
    return h;
}

inline double interp(std::span<const double> x, std::span<const double> y, double at) {
    if (at <= x.front()) return at == x.front() ? y.front() : 0.0;
    if (at >= x.back()) return at == x.back() ? y.back() : 0.0;
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double t = (at - x[i - 1]) / (x[i] - x[i - 1]);
    return (1.0 - t) * y[i - 1] + t * y[i];
}

} // namespace detail

/// Dissipative response from the noise spectrum. At T = 0,
/// Im chi(w) = [S(w) - S(-w)]/2 on a symmetrized grid (S(w)/2 on the
/// positive support). At finite T the fluctuation-dissipation relation
/// Im chi(w) = S(w) / (2[1 + n_B(w)]) = S(w)(1 - e^{-bw})/2 applies, with
/// the singular w = 0 point excluded from the output grid.
inline ResponseSeries im_chi_from_noise(const SpectrumSeries& series, const Occupation& occ) {
    const double h = detail::uniform_spacing(series.omega0, "im_chi_from_noise");
    const double reach = std::max(std::abs(series.omega0.front()), std::abs(series.omega0.back()));
    const int half = static_cast<int>(std::ceil(reach / h - 1e-9));

    ResponseSeries out;
    out.meta = series.meta;
    auto sample = [&](double w) { return detail::interp(series.omega0, series.value, w); };
    for (int i = -half; i <= half; ++i) {
        const double w = i * h;
        double im;
        if (occ.is_zero_temperature()) {
            im = 0.5 * (sample(w) - sample(-w));
        } else {
            if (i == 0) continue;   // Bose factor singular at w = 0
            im = 0.5 * sample(w) * (1.0 - std::exp(-occ.beta() * w));
        }
        out.omega.push_back(w);
        out.im_chi.push_back(im);
    }
    return out;
}

/// Principal-value Hilbert transform H[f](w) = P int dw'/pi f(w')/(w'-w) on
/// a uniform grid symmetric about zero. Trapezoidal quadrature skips the two
/// cells adjacent to the pole; the skipped window is restored with a
/// symmetric three-point rule, P int_{w-h}^{w+h} f/(w'-w) ~ f(w+h) - f(w-h),
/// which keeps only the odd part of f about the pole.
inline std::vector<double> hilbert_pv(std::span<const double> omega, std::span<const double> f) {
    if (omega.size() != f.size())
        throw std::invalid_argument("hilbert_pv: grid/value size mismatch");
    const double h = detail::uniform_spacing(omega, "hilbert_pv");
    if (std::abs(omega.front() + omega.back()) > 1e-9 * std::abs(omega.back()))
        throw std::invalid_argument("hilbert_pv: grid must be symmetric about zero");
    const int n = static_cast<int>(omega.size());
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        // trapezoid over cells [j, j+1] not touching the pole cell pair
        for (int j = 0; j + 1 < n; ++j) {
            if (j == i - 1 || j == i) continue;
            const double g0 = f[j] / (omega[j] - omega[i]);
            const double g1 = f[j + 1] / (omega[j + 1] - omega[i]);
            acc += 0.5 * h * (g0 + g1);
        }
        if (i - 1 >= 0 && i + 1 < n) acc += f[i + 1] - f[i - 1];
        out[i] = acc / M_PI;
    }
    return out;
}

/// Reactive part via the Kramers-Kronig relation,
/// Re chi(w) = P int dw'/pi Im chi(w')/(w' - w).
inline std::vector<double> re_chi_kk(std::span<const double> omega,
                                     std::span<const double> im_chi) {
    return hilbert_pv(omega, im_chi);
}

inline void fill_re_chi_kk(ResponseSeries& series) {
    series.re_chi = re_chi_kk(series.omega, series.im_chi);
}

/// Time-averaged energy absorption under a real drive (ground-state form),
/// Edot = int dw/(4 pi) w |f(w)|^2 S(w), by trapezoid over the sampled grid.
/// The monochromatic drive is the analytic narrow-pulse limit
/// (f0^2/4) W S(W) rather than a squared delta function.
inline double absorption_rate(const SpectrumSeries& series, const DriveSpectrum& drive) {
    if (series.omega0.size() < 2)
        throw std::invalid_argument("absorption_rate: spectrum grid too short");
    const auto [lo, hi] = drive.support();
    if (lo < series.omega0.front() || hi > series.omega0.back())
        throw std::invalid_argument("absorption_rate: drive support exceeds spectrum grid");

    if (drive.kind() == DriveSpectrum::Kind::monochromatic) {
        const double f0 = drive.amplitude_f0();
        const double w0 = drive.center();
        return 0.25 * f0 * f0 * w0 * detail::interp(series.omega0, series.value, w0);
    }
    double acc = 0.0;
    auto integrand = [&](std::size_t i) {
        return series.omega0[i] * drive.power_density(series.omega0[i]) * series.value[i];
    };
    for (std::size_t i = 1; i < series.omega0.size(); ++i)
        acc += 0.5 * (integrand(i) + integrand(i - 1)) * (series.omega0[i] - series.omega0[i - 1]);
    return acc / (4.0 * M_PI);
}

struct ComplexSeries {
    std::vector<double> omega;
    std::vector<std::complex<double>> value;
};

/// Linear particle response <dN_A(w)> = chi(w) f(w). Requires a drive with a
/// defined complex amplitude; sampled |f|^2 is rejected. The monochromatic
/// drive yields the two response amplitudes chi(+-W) f0.
inline ComplexSeries particle_response(const ResponseSeries& chi, const DriveSpectrum& drive) {
    if (!drive.has_phase())
        throw std::invalid_argument("particle_response: drive representation carries no phase");
    if (chi.re_chi.size() != chi.im_chi.size())
        throw std::invalid_argument("particle_response: run the Kramers-Kronig pass first");
    ComplexSeries out;
    auto chi_at = [&](double w) {
        return std::complex<double>(detail::interp(chi.omega, chi.re_chi, w),
                                    detail::interp(chi.omega, chi.im_chi, w));
    };
    if (drive.kind() == DriveSpectrum::Kind::monochromatic) {
        const double w0 = drive.center();
        for (double w : {-w0, w0}) {
            out.omega.push_back(w);
            out.value.push_back(chi_at(w) * drive.amplitude_f0());
        }
        return out;
    }
    out.omega = chi.omega;
    out.value.reserve(chi.omega.size());
    for (std::size_t i = 0; i < chi.omega.size(); ++i) {
        const std::complex<double> c(chi.re_chi[i], chi.im_chi[i]);
        out.value.push_back(c * drive.amplitude(chi.omega[i]));
    }
    return out;
}

} // namespace fermiscale
