#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>

#include "fermiscale/mesh.hpp"

namespace fermiscale {

/// Fermi-Dirac occupation, or its zero-temperature step limit.
/// Energies carry the chemical potential already (mu is absorbed in the
/// dispersion), so n acts on raw band energies. At T = 0 a level within
/// 1e-12 of zero counts as half filled, the symmetric limit of the
/// distribution.
class Occupation {
public:
    static Occupation zero_temperature() { return Occupation(0.0); }

    static Occupation thermal(double beta) {
        if (!(beta > 0.0)) throw std::invalid_argument("Occupation: beta must be > 0");
        return Occupation(beta);
    }

    /// T = 0 when `temperature` is zero, otherwise beta = 1/temperature.
    static Occupation from_temperature(double temperature) {
        if (temperature < 0.0) throw std::invalid_argument("Occupation: negative temperature");
        return temperature == 0.0 ? zero_temperature() : thermal(1.0 / temperature);
    }

    bool is_zero_temperature() const { return beta_ == 0.0; }
    double beta() const { return beta_; }
    double temperature() const { return beta_ == 0.0 ? 0.0 : 1.0 / beta_; }

    double operator()(double omega) const {
        if (beta_ == 0.0) {
            if (omega > kZeroTol) return 0.0;
            if (omega < -kZeroTol) return 1.0;
            return 0.5;
        }
        return 1.0 / (1.0 + std::exp(beta_ * omega));
    }

    static constexpr double kZeroTol = 1e-12;

private:
    explicit Occupation(double beta) : beta_(beta) {}
    double beta_;   // 0 encodes the zero-temperature limit
};

/// A lattice model defined by its Bloch matrix H_k. Bands are obtained by
/// Hermitian diagonalization at each k; band index m counts energies in
/// ascending order (m = 0 is the valence band of a two-band model).
/// Only projector overlaps enter downstream formulas, so nothing may rely
/// on the eigenvector phase gauge.
class BlochModel {
public:
    using BlochFn = std::function<Eigen::MatrixXcd(std::span<const double>)>;

    BlochModel(std::string name, int dimension, int n_orb,
               std::map<std::string, double> params, BlochFn h)
        : name_(std::move(name)),
          dimension_(dimension),
          n_orb_(n_orb),
          params_(std::move(params)),
          h_(std::move(h)) {
        if (n_orb_ < 1) throw std::invalid_argument("BlochModel: n_orb must be >= 1");
        if (dimension_ < 1) throw std::invalid_argument("BlochModel: dimension must be >= 1");
    }

    const std::string& name() const { return name_; }
    int dimension() const { return dimension_; }
    int n_orb() const { return n_orb_; }
    const std::map<std::string, double>& params() const { return params_; }

    Eigen::MatrixXcd bloch(std::span<const double> k) const {
        if (static_cast<int>(k.size()) != dimension_)
            throw std::invalid_argument("BlochModel: wavevector dimension mismatch");
        return h_(k);
    }

    struct Spectrum {
        Eigen::VectorXd energies;    // ascending
        Eigen::MatrixXcd vectors;    // orthonormal columns, one per band
    };

    Spectrum spectrum(std::span<const double> k) const {
        const Eigen::MatrixXcd h = bloch(k);
        if (n_orb_ == 1) {
            Spectrum s;
            s.energies = Eigen::VectorXd::Constant(1, h(0, 0).real());
            s.vectors = Eigen::MatrixXcd::Identity(1, 1);
            return s;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("BlochModel: eigensolver failed");
        return {solver.eigenvalues(), solver.eigenvectors()};
    }

    double energy(std::span<const double> k, int band) const {
        check_band(band);
        return spectrum(k).energies(band);
    }

    void check_band(int band) const {
        if (band < 0 || band >= n_orb_)
            throw std::out_of_range("BlochModel: band index " + std::to_string(band) +
                                    " out of range for " + std::to_string(n_orb_) + " bands");
    }

private:
    std::string name_;
    int dimension_;
    int n_orb_;
    std::map<std::string, double> params_;
    BlochFn h_;
};

/// Two-band Chern insulator on the square lattice,
/// H_k = sin(kx) sx + sin(ky) sy + (m - cos kx - cos ky) sz,
/// bands +-|d(k)|. The parameter m sets the bulk gap 2*min|d|.
inline BlochModel qwz_model(double m) {
    auto h = [m](std::span<const double> k) {
        const double dx = std::sin(k[0]);
        const double dy = std::sin(k[1]);
        const double dz = m - std::cos(k[0]) - std::cos(k[1]);
        Eigen::MatrixXcd out(2, 2);
        out(0, 0) = dz;
        out(0, 1) = std::complex<double>(dx, -dy);
        out(1, 0) = std::complex<double>(dx, dy);
        out(1, 1) = -dz;
        return out;
    };
    return BlochModel("qwz", 2, 2, {{"m", m}}, std::move(h));
}

/// Single-band square-lattice metal, w_k = -t1 cos kx - t2 cos ky + mu.
inline BlochModel metal_model_2d(double t1, double t2, double mu) {
    auto h = [t1, t2, mu](std::span<const double> k) {
        Eigen::MatrixXcd out(1, 1);
        out(0, 0) = -t1 * std::cos(k[0]) - t2 * std::cos(k[1]) + mu;
        return out;
    };
    return BlochModel("metal2d", 2, 1, {{"t1", t1}, {"t2", t2}, {"mu", mu}}, std::move(h));
}

/// Single-band chain, w_k = -t cos k + mu.
inline BlochModel metal_model_1d(double t, double mu) {
    auto h = [t, mu](std::span<const double> k) {
        Eigen::MatrixXcd out(1, 1);
        out(0, 0) = -t * std::cos(k[0]) + mu;
        return out;
    };
    return BlochModel("metal1d", 1, 1, {{"t", t}, {"mu", mu}}, std::move(h));
}

/// Factory used by config files and series metadata. Unknown model names or
/// parameter sets are rejected.
inline BlochModel make_model(const std::string& name, const std::map<std::string, double>& params) {
    auto need = [&](std::initializer_list<const char*> keys) {
        for (const auto& entry : params) {
            bool known = false;
            for (const char* s : keys)
                if (entry.first == s) { known = true; break; }
            if (!known)
                throw std::invalid_argument("model '" + name + "': unknown parameter '" +
                                            entry.first + "'");
        }
        for (const char* k : keys)
            if (!params.count(k))
                throw std::invalid_argument("model '" + name + "': missing parameter '" +
                                            std::string(k) + "'");
    };
    if (name == "qwz") {
        need({"m"});
        return qwz_model(params.at("m"));
    }
    if (name == "metal2d") {
        need({"t1", "t2", "mu"});
        return metal_model_2d(params.at("t1"), params.at("t2"), params.at("mu"));
    }
    if (name == "metal1d") {
        need({"t", "mu"});
        return metal_model_1d(params.at("t"), params.at("mu"));
    }
    throw std::invalid_argument("unknown model '" + name + "'");
}

/// Tr[P_{k,m} P_{k',m'}] = |<u_{k,m}|u_{k',m'}>|^2, clamped to [0,1].
inline double projector_overlap(const BlochModel& model, std::span<const double> k, int band,
                                std::span<const double> kprime, int band_prime) {
    model.check_band(band);
    model.check_band(band_prime);
    const auto s = model.spectrum(k);
    const auto sp = model.spectrum(kprime);
    const double v = std::norm(s.vectors.col(band).dot(sp.vectors.col(band_prime)));
    return std::clamp(v, 0.0, 1.0);
}

/// Band energies and eigenvectors tabulated over a full mesh. Immutable
/// after construction and safe to share across threads.
class BandTable {
public:
    BandTable(const BlochModel& model, const MomentumMesh& mesh)
        : bands_(model.n_orb()), mesh_size_(mesh.size()) {
        if (model.dimension() != mesh.dimension())
            throw std::invalid_argument("BandTable: model/mesh dimension mismatch");
        energies_.resize(static_cast<std::size_t>(mesh_size_) * bands_);
        vectors_.reserve(mesh_size_);
        for (int i = 0; i < mesh_size_; ++i) {
            auto s = model.spectrum(mesh.point(i));
            for (int m = 0; m < bands_; ++m)
                energies_[static_cast<std::size_t>(i) * bands_ + m] = s.energies(m);
            vectors_.push_back(std::move(s.vectors));
        }
    }

    int bands() const { return bands_; }
    int mesh_size() const { return mesh_size_; }

    double energy(int k, int band) const {
        return energies_[static_cast<std::size_t>(k) * bands_ + band];
    }

    const Eigen::MatrixXcd& vectors(int k) const { return vectors_[k]; }

    double overlap(int k, int m, int kprime, int mprime) const {
        if (bands_ == 1) return 1.0;
        return std::norm(vectors_[k].col(m).dot(vectors_[kprime].col(mprime)));
    }

    double min_energy() const { return *std::min_element(energies_.begin(), energies_.end()); }
    double max_energy() const { return *std::max_element(energies_.begin(), energies_.end()); }

private:
    int bands_;
    int mesh_size_;
    std::vector<double> energies_;
    std::vector<Eigen::MatrixXcd> vectors_;
};

} // namespace fermiscale
