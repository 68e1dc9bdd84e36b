#pragma once

#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fermiscale {

/// Discrete momentum mesh of an N_1 x ... x N_D periodic lattice.
///
/// Component a of point (j_1,...,j_D) is -pi + 2*pi*j_a/N_a with
/// j_a = 1..N_a, wrapped into [-pi, pi). Points are stored in row-major
/// (j_1,...,j_D) order and the mesh is closed under negation mod 2*pi.
class MomentumMesh {
public:
    explicit MomentumMesh(std::vector<int> dims) : dims_(std::move(dims)) {
        if (dims_.empty())
            throw std::invalid_argument("MomentumMesh: empty dimension list");
        for (int n : dims_)
            if (n < 2)
                throw std::invalid_argument("MomentumMesh: every axis needs N >= 2, got " +
                                            std::to_string(n));
        const int d = dimension();
        strides_.assign(d, 1);
        for (int a = d - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * dims_[a + 1];
        const int v = size();
        coords_.resize(static_cast<std::size_t>(v) * d);
        tuples_.resize(static_cast<std::size_t>(v) * d);
        for (int i = 0; i < v; ++i) {
            int rem = i;
            for (int a = 0; a < d; ++a) {
                const int t = rem / strides_[a];   // 0-based index, j_a = t + 1
                rem -= t * strides_[a];
                tuples_[static_cast<std::size_t>(i) * d + a] = t;
                double k = -M_PI + 2.0 * M_PI * (t + 1) / dims_[a];
                if (k >= M_PI) k -= 2.0 * M_PI;
                coords_[static_cast<std::size_t>(i) * d + a] = k;
            }
        }
    }

    int dimension() const { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const { return dims_; }

    /// Number of mesh points (= number of lattice sites V).
    int size() const {
        return std::accumulate(dims_.begin(), dims_.end(), 1, std::multiplies<int>());
    }

    std::span<const double> point(int i) const {
        return {coords_.data() + static_cast<std::size_t>(i) * dimension(),
                static_cast<std::size_t>(dimension())};
    }

    /// 0-based index tuple (j_a - 1) of point i.
    std::span<const int> index_tuple(int i) const {
        return {tuples_.data() + static_cast<std::size_t>(i) * dimension(),
                static_cast<std::size_t>(dimension())};
    }

    /// Flat index of the componentwise difference (tuple_i - tuple_j) mod N.
    /// k(i) - k(j) equals 2*pi*diff_a/N_a per axis, mod 2*pi.
    int wrapped_diff(int i, int j) const {
        const int d = dimension();
        const int* ti = tuples_.data() + static_cast<std::size_t>(i) * d;
        const int* tj = tuples_.data() + static_cast<std::size_t>(j) * d;
        int flat = 0;
        for (int a = 0; a < d; ++a) {
            int delta = ti[a] - tj[a];
            if (delta < 0) delta += dims_[a];
            flat += delta * strides_[a];
        }
        return flat;
    }

    /// Index of the point shifted by `steps` mesh units along `axis`, with periodic wrap.
    int shifted_index(int i, int axis, int steps) const {
        const int d = dimension();
        const int* t = tuples_.data() + static_cast<std::size_t>(i) * d;
        int ta = (t[axis] + steps) % dims_[axis];
        if (ta < 0) ta += dims_[axis];
        return i + (ta - t[axis]) * strides_[axis];
    }

    /// Component along `axis` of the difference vector encoded by a flat
    /// row-major offset: q_a = 2*pi*delta_a/N_a (a representative mod 2*pi).
    double diff_component(int flat_diff, int axis) const {
        const int t = (flat_diff / strides_[axis]) % dims_[axis];
        return 2.0 * M_PI * t / dims_[axis];
    }

private:
    std::vector<int> dims_;
    std::vector<int> strides_;
    std::vector<double> coords_;
    std::vector<int> tuples_;
};

inline MomentumMesh build_mesh(std::vector<int> dims) { return MomentumMesh(std::move(dims)); }

} // namespace fermiscale
